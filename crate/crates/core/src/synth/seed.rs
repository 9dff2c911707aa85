/// SplitMix64 output function; a bijection on `u64`.
pub fn mix64(x: u64) -> u64 {
    let mut z = x.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Seed for stream `index` under `root`: `mix64(root + index)`.
///
/// For a fixed root, distinct indices give distinct seeds.
pub fn derive_seed(root: u64, index: u64) -> u64 {
    mix64(root.wrapping_add(index))
}
