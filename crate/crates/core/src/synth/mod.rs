//! Seeded generators for variety-structured data and observation masks.
//!
//! Every generator is a pure function of its parameters and a 64-bit seed
//! (ChaCha8 stream). Experiments derive per-trial seeds from a root seed with
//! [`derive_seed`].

mod mask;
mod seed;
mod variety;

pub use mask::{apply_mask, sample_mask};
pub use seed::{derive_seed, mix64};
pub use variety::{
    gen_conic, gen_conic_in, gen_parametric, gen_uos, gen_uos_orthogonal, GeneratedDataset,
    VarietySpec, CIRCLE, PARABOLA,
};

pub use crate::data::ObservationMask;
