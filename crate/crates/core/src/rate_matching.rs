//! Repetition rate matching below the mother rate and chase combining.

use rand::seq::index::sample;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::{Bit, Error, Llr, Result};

/// Ratios within this distance of an integer are treated as that integer.
const RATIO_SNAP: f64 = 1e-9;

/// Fraction of coded bits repeated `ψ` times, `ψ = 0..=psi`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RepetitionProfile {
    pub psi: usize,
    pub fractions: Vec<f64>,
}

impl RepetitionProfile {
    /// Fraction of bits sent `psi + 1` times.
    pub fn top_fraction(&self) -> f64 {
        self.fractions[self.psi]
    }

    /// Fraction of bits sent `psi` times (zero when `psi = 0`).
    pub fn lower_fraction(&self) -> f64 {
        if self.psi == 0 {
            0.0
        } else {
            self.fractions[self.psi - 1]
        }
    }

    /// Transmitted length for `len` coded bits.
    pub fn transmitted_len(&self, len: usize) -> usize {
        self.psi * len + repeated_count(self.top_fraction(), len)
    }
}

fn repeated_count(fraction: f64, len: usize) -> usize {
    (fraction * len as f64).round_ties_even() as usize
}

/// Splits rate `rate` into repetition fractions relative to `mother`.
pub fn repetition_profile(rate: f64, mother: f64) -> Result<RepetitionProfile> {
    if !(rate > 0.0) || rate > mother * (1.0 + 1e-12) {
        return Err(Error::UnsupportedRate { rate, mother });
    }
    let mut ratio = mother / rate;
    if (ratio - ratio.round()).abs() < RATIO_SNAP {
        ratio = ratio.round();
    }
    let psi = ratio.ceil() as usize - 1;
    if psi == 0 {
        return Ok(RepetitionProfile {
            psi: 0,
            fractions: vec![1.0],
        });
    }
    let mut fractions = vec![0.0; psi + 1];
    fractions[psi - 1] = 1.0 + psi as f64 - ratio;
    fractions[psi] = ratio - psi as f64;
    Ok(RepetitionProfile { psi, fractions })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "lowercase")]
pub enum RepetitionMode {
    /// Circular read from offset 0: the extra copies are a contiguous prefix.
    #[default]
    Deterministic,
    /// The repeated subset is drawn uniformly from the seed.
    Random,
}

/// For every transmitted symbol, the coded-bit index it carries.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RepetitionMap {
    pub source_len: usize,
    pub sources: Vec<usize>,
}

impl RepetitionMap {
    pub fn identity(len: usize) -> Self {
        Self {
            source_len: len,
            sources: (0..len).collect(),
        }
    }

    pub fn len(&self) -> usize {
        self.sources.len()
    }

    pub fn is_empty(&self) -> bool {
        self.sources.is_empty()
    }

    /// Copies per coded bit.
    pub fn multiplicities(&self) -> Vec<usize> {
        let mut m = vec![0; self.source_len];
        for &s in &self.sources {
            m[s] += 1;
        }
        m
    }
}

/// Builds a map sending `len` coded bits as exactly `target` symbols.
///
/// Every bit goes out `⌊target/len⌋` times; the remaining
/// `target mod len` symbols repeat a prefix (deterministic) or a seeded
/// uniform subset (random).
pub fn repeat_to_length(
    len: usize,
    target: usize,
    mode: RepetitionMode,
    seed: u64,
) -> RepetitionMap {
    if len == 0 {
        return RepetitionMap {
            source_len: 0,
            sources: Vec::new(),
        };
    }
    let full = target / len;
    let extra = target % len;
    let mut sources = Vec::with_capacity(target);
    for _ in 0..full {
        sources.extend(0..len);
    }
    match mode {
        RepetitionMode::Deterministic => sources.extend(0..extra),
        RepetitionMode::Random => {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let mut chosen = sample(&mut rng, len, extra).into_vec();
            chosen.sort_unstable();
            sources.extend(chosen);
        }
    }
    RepetitionMap {
        source_len: len,
        sources,
    }
}

/// Repeats `bits` according to `profile`.
pub fn apply_repetition(
    bits: &[Bit],
    profile: &RepetitionProfile,
    mode: RepetitionMode,
    seed: u64,
) -> (Vec<Bit>, RepetitionMap) {
    let map = repeat_to_length(bits.len(), profile.transmitted_len(bits.len()), mode, seed);
    let out = map.sources.iter().map(|&i| bits[i]).collect();
    (out, map)
}

/// Sums the observations of each coded bit; bits never sent get 0.
pub fn chase_combine<T: Llr>(observations: &[T], map: &RepetitionMap) -> Vec<T> {
    assert_eq!(observations.len(), map.len(), "observation count");
    let mut out = vec![T::zero(); map.source_len];
    for (&l, &s) in observations.iter().zip(&map.sources) {
        out[s] = out[s] + l;
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::channel::{AwgnChannel, ChannelConfig};
    use proptest::prelude::*;

    const R0: f64 = 1.0 / 3.0;

    #[test]
    fn mother_rate_is_identity() {
        let p = repetition_profile(R0, R0).unwrap();
        assert_eq!(
            p,
            RepetitionProfile {
                psi: 0,
                fractions: vec![1.0]
            }
        );
        let bits: Vec<Bit> = (0..30).map(|i| (i % 3 == 0) as Bit).collect();
        let (out, map) = apply_repetition(&bits, &p, RepetitionMode::Deterministic, 0);
        assert_eq!(out, bits);
        assert_eq!(map, RepetitionMap::identity(30));
    }

    #[test]
    fn quarter_rate_fractions() {
        let p = repetition_profile(0.25, R0).unwrap();
        assert_eq!(p.psi, 1);
        assert!((p.fractions[0] - 2.0 / 3.0).abs() < 1e-12);
        assert!((p.fractions[1] - 1.0 / 3.0).abs() < 1e-12);
        assert_eq!(p.transmitted_len(300), 400);
    }

    #[test]
    fn sixth_rate_repeats_everything_once() {
        let p = repetition_profile(1.0 / 6.0, R0).unwrap();
        assert_eq!(p.psi, 1);
        assert_eq!(p.fractions, vec![0.0, 1.0]);
        let bits = vec![1; 300];
        let (out, map) = apply_repetition(&bits, &p, RepetitionMode::Random, 9);
        assert_eq!(out.len(), 600);
        assert!(map.multiplicities().iter().all(|&m| m == 2));
    }

    #[test]
    fn above_mother_rate_is_rejected() {
        assert!(matches!(
            repetition_profile(0.5, R0),
            Err(Error::UnsupportedRate { .. })
        ));
        assert!(repetition_profile(0.0, R0).is_err());
    }

    #[test]
    fn deterministic_extra_copies_form_a_prefix() {
        let map = repeat_to_length(10, 14, RepetitionMode::Deterministic, 0);
        assert_eq!(&map.sources[10..], &[0, 1, 2, 3]);
        let m = repeat_to_length(10, 14, RepetitionMode::Random, 3).multiplicities();
        assert_eq!(m.iter().filter(|&&c| c == 2).count(), 4);
        assert_eq!(m.iter().filter(|&&c| c == 1).count(), 6);
    }

    #[test]
    fn combining_rules() {
        let map = RepetitionMap {
            source_len: 3,
            sources: vec![0, 1, 1],
        };
        assert_eq!(
            chase_combine(&[1.5f64, 0.25, 0.25], &map),
            vec![1.5, 0.5, 0.0]
        );
        let id = RepetitionMap::identity(2);
        assert_eq!(chase_combine(&[-2.0f32, 3.0], &id), vec![-2.0, 3.0]);
    }

    #[test]
    fn combined_pair_behaves_like_double_snr() {
        let n = 200_000;
        let single = ChannelConfig::from_snr_db(-3.0);
        let mut ch = AwgnChannel::seeded(single, 8);
        let map = repeat_to_length(n, 2 * n, RepetitionMode::Deterministic, 0);
        let obs: Vec<f64> = ch.transmit_llr(&vec![0; 2 * n]);
        let comb = chase_combine(&obs, &map);
        let var = |v: &[f64]| {
            let m = v.iter().sum::<f64>() / v.len() as f64;
            v.iter().map(|x| (x - m).powi(2)).sum::<f64>() / v.len() as f64
        };
        let double = ChannelConfig::from_snr_db(-3.0 + 10.0 * 2f64.log10());
        let reference: Vec<f64> = AwgnChannel::seeded(double, 9).transmit_llr(&vec![0; n]);
        assert!((var(&comb) / var(&reference) - 1.0).abs() < 0.02);
    }

    proptest! {
        #[test]
        fn fractions_form_a_simplex(rate in 0.01f64..=(1.0 / 3.0)) {
            let p = repetition_profile(rate, R0).unwrap();
            let sum: f64 = p.fractions.iter().sum();
            prop_assert!((sum - 1.0).abs() < 1e-12);
            prop_assert!(p.fractions.iter().all(|&f| f >= 0.0));
            for (i, &f) in p.fractions.iter().enumerate() {
                if i + 1 < p.psi {
                    prop_assert_eq!(f, 0.0);
                }
            }
        }

        #[test]
        fn noiseless_combining_is_sign_correct(
            bits in proptest::collection::vec(0u8..2, 1..200),
            rate in 0.05f64..=(1.0 / 3.0),
            random in any::<bool>(),
        ) {
            let p = repetition_profile(rate, R0).unwrap();
            let mode = if random { RepetitionMode::Random } else { RepetitionMode::Deterministic };
            let (tx, map) = apply_repetition(&bits, &p, mode, 1);
            let llr: Vec<f64> = tx.iter().map(|&b| if b == 0 { 4.0 } else { -4.0 }).collect();
            let comb = chase_combine(&llr, &map);
            for (l, &b) in comb.iter().zip(&bits) {
                let ok = if b == 0 { *l > 0.0 } else { *l < 0.0 };
                prop_assert!(ok);
            }
        }
    }
}
