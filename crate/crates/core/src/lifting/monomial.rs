//! Multi-indices and the graded-lexicographic monomial basis.

use std::collections::HashMap;

use crate::error::{Error, Result};

/// `C(n, k)` with overflow reported as an error.
pub fn binomial(n: u64, k: u64) -> Result<u64> {
    if k > n {
        return Ok(0);
    }
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for i in 1..=u128::from(k) {
        // acc * (n - k + i) / i is exact at every step
        acc = acc
            .checked_mul(u128::from(n - k) + i)
            .ok_or(Error::Overflow("binomial coefficient"))?
            / i;
    }
    u64::try_from(acc).map_err(|_| Error::Overflow("binomial coefficient"))
}

/// Number of monomials of degree at most `d` in `n` variables, `C(n+d, d)`.
pub fn feature_dimension(n: usize, d: usize) -> Result<usize> {
    let top = (n as u64)
        .checked_add(d as u64)
        .ok_or(Error::Overflow("feature dimension"))?;
    let c = binomial(top, d as u64)?;
    usize::try_from(c).map_err(|_| Error::Overflow("feature dimension"))
}

/// Exponent vector `α` of the monomial `x^α`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct MultiIndex {
    exponents: Vec<u32>,
}

impl MultiIndex {
    pub fn new(exponents: Vec<u32>) -> Self {
        Self { exponents }
    }

    pub fn exponents(&self) -> &[u32] {
        &self.exponents
    }

    /// Total degree `|α|`.
    pub fn degree(&self) -> u32 {
        self.exponents.iter().sum()
    }

    /// Evaluates `x^α`.
    pub fn eval<T: crate::Scalar>(&self, x: &[T]) -> T {
        self.exponents
            .iter()
            .zip(x)
            .fold(T::one(), |acc, (&e, &v)| acc * v.powi(e as i32))
    }
}

impl From<Vec<u32>> for MultiIndex {
    fn from(exponents: Vec<u32>) -> Self {
        Self::new(exponents)
    }
}

/// All multi-indices with `|α| <= d` in `n` variables, ordered by total degree
/// and, within a degree, lexicographically with `x_1` largest (so for `n = 2`,
/// `d = 2` the order is `1, x1, x2, x1², x1x2, x2²`).
#[derive(Clone, Debug, PartialEq)]
pub struct MonomialBasis {
    n: usize,
    d: usize,
    entries: Vec<MultiIndex>,
    // entry i (degree >= 1) equals entries[parent.0] times x_{parent.1}
    parents: Vec<Option<(usize, usize)>>,
}

impl MonomialBasis {
    pub fn new(n: usize, d: usize) -> Result<Self> {
        if n == 0 {
            return Err(Error::Dimension("monomial basis needs n >= 1".into()));
        }
        let len = feature_dimension(n, d)?;
        let mut entries = Vec::with_capacity(len);
        let mut scratch = vec![0u32; n];
        for degree in 0..=d {
            push_compositions(degree as u32, 0, &mut scratch, &mut entries);
        }
        debug_assert_eq!(entries.len(), len);

        let position: HashMap<&[u32], usize> = entries
            .iter()
            .enumerate()
            .map(|(i, a)| (a.exponents(), i))
            .collect();
        let parents = entries
            .iter()
            .map(|a| {
                let var = a.exponents().iter().rposition(|&e| e > 0)?;
                let mut p = a.exponents().to_vec();
                p[var] -= 1;
                Some((position[p.as_slice()], var))
            })
            .collect();

        Ok(Self {
            n,
            d,
            entries,
            parents,
        })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn d(&self) -> usize {
        self.d
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn entries(&self) -> &[MultiIndex] {
        &self.entries
    }

    pub fn iter(&self) -> std::slice::Iter<'_, MultiIndex> {
        self.entries.iter()
    }

    pub(crate) fn parents(&self) -> &[Option<(usize, usize)>] {
        &self.parents
    }

    /// `c_α = d! / (α_1! ··· α_n! (d - |α|)!)`, the coefficient of `x^α y^α`
    /// in `(x·y + 1)^d`.
    pub fn multinomial_weight(&self, alpha: &MultiIndex) -> Result<u64> {
        let mut rest = self.d as u64;
        let mut acc: u64 = 1;
        for &e in alpha.exponents() {
            let e = u64::from(e);
            if e > rest {
                return Err(Error::Domain(format!(
                    "multi-index of degree {} exceeds basis degree {}",
                    alpha.degree(),
                    self.d
                )));
            }
            acc = acc
                .checked_mul(binomial(rest, e)?)
                .ok_or(Error::Overflow("multinomial weight"))?;
            rest -= e;
        }
        Ok(acc)
    }
}

impl<'a> IntoIterator for &'a MonomialBasis {
    type Item = &'a MultiIndex;
    type IntoIter = std::slice::Iter<'a, MultiIndex>;

    fn into_iter(self) -> Self::IntoIter {
        self.entries.iter()
    }
}

// Compositions of `remaining` into scratch[var..], largest leading exponent first.
fn push_compositions(remaining: u32, var: usize, scratch: &mut [u32], out: &mut Vec<MultiIndex>) {
    if var + 1 == scratch.len() {
        scratch[var] = remaining;
        out.push(MultiIndex::new(scratch.to_vec()));
        scratch[var] = 0;
        return;
    }
    for e in (0..=remaining).rev() {
        scratch[var] = e;
        push_compositions(remaining - e, var + 1, scratch, out);
    }
    scratch[var] = 0;
}

/// Graded-lex monomial basis of degree `d` in `n` variables.
pub fn monomial_basis(n: usize, d: usize) -> Result<MonomialBasis> {
    MonomialBasis::new(n, d)
}
