use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::qpp_table::QPP_TABLE;
use crate::{Error, Result};

/// Internal Turbo interleaver: output position `i` reads input `perm[i]`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Interleaver {
    perm: Vec<usize>,
}

/// Block lengths with standard QPP coefficients, ascending.
pub fn valid_block_lengths() -> impl Iterator<Item = usize> {
    QPP_TABLE.iter().map(|&(k, _, _)| k)
}

pub fn is_valid_block_length(k: usize) -> bool {
    qpp_coefficients(k).is_some()
}

/// Standard `(f1, f2)` for block length `k`.
pub fn qpp_coefficients(k: usize) -> Option<(usize, usize)> {
    QPP_TABLE
        .binary_search_by_key(&k, |&(kk, _, _)| kk)
        .ok()
        .map(|i| (QPP_TABLE[i].1, QPP_TABLE[i].2))
}

impl Interleaver {
    /// QPP interleaver with the standard coefficients for `k`.
    pub fn qpp(k: usize) -> Result<Self> {
        let (f1, f2) = qpp_coefficients(k).ok_or_else(|| {
            Error::Configuration(format!("no QPP coefficients for block length {k}"))
        })?;
        Ok(Self::qpp_with(k, f1, f2))
    }

    /// `π(i) = (f1·i + f2·i²) mod k`.
    pub fn qpp_with(k: usize, f1: usize, f2: usize) -> Self {
        let (k64, f1, f2) = (k as u64, f1 as u64, f2 as u64);
        let perm = (0..k64)
            .map(|i| ((f1 * i + f2 * ((i * i) % k64)) % k64) as usize)
            .collect();
        Self { perm }
    }

    /// Seeded uniformly random permutation.
    pub fn pseudorandom(k: usize, seed: u64) -> Self {
        let mut perm: Vec<usize> = (0..k).collect();
        perm.shuffle(&mut ChaCha8Rng::seed_from_u64(seed));
        Self { perm }
    }

    /// QPP when `k` is a standard length, otherwise the seeded fallback if
    /// one is enabled.
    pub fn for_block_length(k: usize, fallback_seed: Option<u64>) -> Result<Self> {
        match (Self::qpp(k), fallback_seed) {
            (Ok(il), _) => Ok(il),
            (Err(_), Some(seed)) if k > 0 => Ok(Self::pseudorandom(k, seed)),
            (Err(e), _) => Err(e),
        }
    }

    pub fn from_permutation(perm: Vec<usize>) -> Result<Self> {
        let il = Self { perm };
        if !il.is_bijection() {
            return Err(Error::MalformedInput(
                "permutation is not a bijection".into(),
            ));
        }
        Ok(il)
    }

    pub fn len(&self) -> usize {
        self.perm.len()
    }

    pub fn is_empty(&self) -> bool {
        self.perm.is_empty()
    }

    pub fn permutation(&self) -> &[usize] {
        &self.perm
    }

    pub fn is_bijection(&self) -> bool {
        let mut sorted = self.perm.clone();
        sorted.sort_unstable();
        sorted.iter().enumerate().all(|(i, &v)| i == v)
    }

    /// `out[i] = input[π(i)]`.
    pub fn interleave<T: Copy>(&self, input: &[T]) -> Vec<T> {
        self.perm.iter().map(|&p| input[p]).collect()
    }

    /// Inverse of [`Self::interleave`].
    pub fn deinterleave<T: Copy + Default>(&self, input: &[T]) -> Vec<T> {
        let mut out = vec![T::default(); input.len()];
        for (i, &p) in self.perm.iter().enumerate() {
            out[p] = input[i];
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn qpp_40_first_entries() {
        let il = Interleaver::qpp(40).unwrap();
        assert_eq!(il.permutation()[0], 0);
        assert_eq!(il.permutation()[1], 13);
        assert_eq!(il.permutation()[2], 6);
    }

    #[test]
    fn every_standard_length_is_a_bijection() {
        assert_eq!(valid_block_lengths().count(), 188);
        for k in valid_block_lengths() {
            let il = Interleaver::qpp(k).unwrap();
            assert_eq!(il.len(), k);
            assert!(il.is_bijection(), "K = {k}");
            assert_eq!(il.permutation()[0], 0);
        }
    }

    #[test]
    fn table_endpoints() {
        assert_eq!(qpp_coefficients(40), Some((3, 10)));
        assert_eq!(qpp_coefficients(6144), Some((263, 480)));
        assert_eq!(qpp_coefficients(41), None);
    }

    #[test]
    fn unsupported_length_needs_fallback() {
        assert!(matches!(Interleaver::qpp(8), Err(Error::Configuration(_))));
        assert!(Interleaver::for_block_length(8, None).is_err());
        let il = Interleaver::for_block_length(8, Some(3)).unwrap();
        assert!(il.is_bijection());
        assert_eq!(il, Interleaver::pseudorandom(8, 3));
    }

    #[test]
    fn interleave_roundtrip() {
        let il = Interleaver::qpp(104).unwrap();
        let x: Vec<u32> = (0..104).map(|i| i * 7 + 1).collect();
        assert_eq!(il.deinterleave(&il.interleave(&x)), x);
    }
}
