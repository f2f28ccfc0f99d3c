use super::bcjr::{bcjr_decode_into, BcjrWorkspace};
use super::encoder::TAIL_LEN;
use super::{Interleaver, Trellis};
use crate::{Bit, Error, Llr, Result};

/// Soft inputs for one code block.
#[derive(Debug, Clone, PartialEq)]
pub struct LlrFrame<T> {
    pub systematic: Vec<T>,
    pub parity1: Vec<T>,
    pub parity2: Vec<T>,
    /// Same layout as [`super::TurboCodeword::tail`].
    pub tail: [T; TAIL_LEN],
    /// External a priori LLRs per information bit; zero where none exist.
    pub apriori: Vec<T>,
}

impl<T: Llr> LlrFrame<T> {
    pub fn zeros(k: usize) -> Self {
        Self {
            systematic: vec![T::zero(); k],
            parity1: vec![T::zero(); k],
            parity2: vec![T::zero(); k],
            tail: [T::zero(); TAIL_LEN],
            apriori: vec![T::zero(); k],
        }
    }

    pub fn block_len(&self) -> usize {
        self.systematic.len()
    }

    fn validate(&self, k: usize) -> Result<()> {
        let ok = [
            self.systematic.len(),
            self.parity1.len(),
            self.parity2.len(),
            self.apriori.len(),
        ]
        .iter()
        .all(|&l| l == k);
        if ok {
            Ok(())
        } else {
            Err(Error::MalformedInput(format!(
                "LLR frame lengths do not match block length {k}"
            )))
        }
    }
}

/// Result of one Turbo decoding run.
#[derive(Debug, Clone, PartialEq)]
pub struct TurboDecodeOutput<T> {
    pub estimate: Vec<Bit>,
    /// Sum of both constituent decoders' extrinsic LLRs; excludes the
    /// channel LLR and the frame's external a priori.
    pub extrinsic: Vec<T>,
    pub posterior: Vec<T>,
    pub iterations: usize,
    /// Whether the stop predicate accepted the final estimate.
    pub stop_satisfied: bool,
}

impl<T: Llr> TurboDecodeOutput<T> {
    /// Extrinsic values at `positions`, in order.
    pub fn extrinsic_at(&self, positions: &[usize]) -> Vec<T> {
        positions.iter().map(|&p| self.extrinsic[p]).collect()
    }
}

/// Iterative decoder for the rate-1/3 mother code.
#[derive(Debug, Clone, Copy)]
pub struct TurboDecoder<'a> {
    trellis: &'a Trellis,
    interleaver: &'a Interleaver,
}

impl<'a> TurboDecoder<'a> {
    pub fn new(trellis: &'a Trellis, interleaver: &'a Interleaver) -> Self {
        Self {
            trellis,
            interleaver,
        }
    }

    pub fn block_len(&self) -> usize {
        self.interleaver.len()
    }

    /// Runs up to `max_iters` full iterations (two half-iterations each),
    /// stopping early once `stop` accepts the hard decision.
    pub fn decode<T: Llr>(
        &self,
        frame: &LlrFrame<T>,
        max_iters: usize,
        stop: Option<&dyn Fn(&[Bit]) -> bool>,
    ) -> Result<TurboDecodeOutput<T>> {
        let k = self.block_len();
        frame.validate(k)?;
        let m = self.trellis.memory();
        let perm = self.interleaver.permutation();

        let tail_stream = |which: usize, sys: bool| -> Vec<T> {
            (0..m)
                .map(|j| frame.tail[which * 6 + 2 * j + usize::from(!sys)])
                .collect()
        };
        let mut sys1 = frame.systematic.clone();
        sys1.extend(tail_stream(0, true));
        let mut par1 = frame.parity1.clone();
        par1.extend(tail_stream(0, false));
        let mut sys2: Vec<T> = perm.iter().map(|&p| frame.systematic[p]).collect();
        sys2.extend(tail_stream(1, true));
        let mut par2 = frame.parity2.clone();
        par2.extend(tail_stream(1, false));

        let mut ws = BcjrWorkspace::new();
        let mut le1 = vec![T::zero(); k];
        let mut le2 = vec![T::zero(); k];
        let mut le2_int = vec![T::zero(); k];
        let mut ap = vec![T::zero(); k];
        let mut posterior = vec![T::zero(); k];
        let mut estimate = vec![0 as Bit; k];
        let mut iterations = 0;
        let mut stop_satisfied = false;

        for _ in 0..max_iters.max(1) {
            for i in 0..k {
                ap[i] = (frame.apriori[i] + le2[i]).saturate();
            }
            bcjr_decode_into(self.trellis, &sys1, &par1, &ap, &mut ws, &mut le1, None);
            for (j, &p) in perm.iter().enumerate() {
                ap[j] = (frame.apriori[p] + le1[p]).saturate();
            }
            bcjr_decode_into(self.trellis, &sys2, &par2, &ap, &mut ws, &mut le2_int, None);
            for (j, &p) in perm.iter().enumerate() {
                le2[p] = le2_int[j];
            }
            for i in 0..k {
                posterior[i] = frame.systematic[i] + frame.apriori[i] + le1[i] + le2[i];
                estimate[i] = Bit::from(posterior[i] < T::zero());
            }
            iterations += 1;
            if let Some(pred) = stop {
                if pred(&estimate) {
                    stop_satisfied = true;
                    break;
                }
            }
        }

        let extrinsic = le1
            .iter()
            .zip(&le2)
            .map(|(&a, &b)| (a + b).saturate())
            .collect();
        Ok(TurboDecodeOutput {
            estimate,
            extrinsic,
            posterior,
            iterations,
            stop_satisfied,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::crc::{crc24_attach, crc24_passes, CRC24B};
    use crate::turbo::bcjr::bcjr_decode;
    use crate::turbo::turbo_encode;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;
    use rand_distr::{Distribution, StandardNormal};

    fn bpsk_llr(b: Bit, amp: f64) -> f64 {
        if b == 0 {
            amp
        } else {
            -amp
        }
    }

    fn frame_from_codeword(
        cw: &crate::turbo::TurboCodeword,
        amp: f64,
        noise: Option<(&mut ChaCha8Rng, f64)>,
    ) -> LlrFrame<f64> {
        let mut frame = LlrFrame::zeros(cw.block_len());
        let mut rng_sigma = noise;
        let mut map = |b: Bit| -> f64 {
            let mut v = bpsk_llr(b, 1.0);
            if let Some((rng, sigma)) = rng_sigma.as_mut() {
                let n: f64 = StandardNormal.sample(*rng);
                v += *sigma * n;
                return 2.0 * v / (*sigma * *sigma);
            }
            v * amp
        };
        frame.systematic = cw.systematic.iter().map(|&b| map(b)).collect();
        frame.parity1 = cw.parity1.iter().map(|&b| map(b)).collect();
        frame.parity2 = cw.parity2.iter().map(|&b| map(b)).collect();
        for (i, &b) in cw.tail.iter().enumerate() {
            frame.tail[i] = map(b);
        }
        frame
    }

    #[test]
    fn noiseless_block_decodes_in_one_iteration() {
        let t = Trellis::lte();
        let il = Interleaver::qpp(512).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let info: Vec<Bit> = (0..488).map(|_| rng.random_range(0..2)).collect();
        let cb = crc24_attach(&info, CRC24B);
        let cw = turbo_encode(&cb, &il, &t).unwrap();
        let frame = frame_from_codeword(&cw, 10.0, None);
        let stop = |est: &[Bit]| crc24_passes(est, CRC24B);
        let out = TurboDecoder::new(&t, &il)
            .decode(&frame, 8, Some(&stop))
            .unwrap();
        assert_eq!(out.estimate, cb);
        assert_eq!(out.iterations, 1);
        assert!(out.stop_satisfied);
    }

    #[test]
    fn saturated_prior_forces_zero() {
        let t = Trellis::lte();
        let il = Interleaver::qpp(256).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(6);
        let cb: Vec<Bit> = (0..256)
            .map(|i| {
                if i % 4 == 0 {
                    0
                } else {
                    rng.random_range(0..2)
                }
            })
            .collect();
        let cw = turbo_encode(&cb, &il, &t).unwrap();
        // very noisy channel
        let mut frame = frame_from_codeword(&cw, 0.0, Some((&mut rng, 3.0)));
        for i in (0..256).step_by(4) {
            frame.apriori[i] = f64::saturation();
            frame.systematic[i] = -5.0; // channel pulls the wrong way
        }
        let out = TurboDecoder::new(&t, &il).decode(&frame, 4, None).unwrap();
        for i in (0..256).step_by(4) {
            assert_eq!(out.estimate[i], 0);
        }
    }

    #[test]
    fn one_iteration_is_two_composed_bcjr_calls() {
        let t = Trellis::lte();
        let il = Interleaver::pseudorandom(8, 77);
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let mut frame = LlrFrame::<f64>::zeros(8);
        let mut r = || rng.random_range(-3.0..3.0);
        frame.systematic = (0..8).map(|_| r()).collect();
        frame.parity1 = (0..8).map(|_| r()).collect();
        frame.parity2 = (0..8).map(|_| r()).collect();
        frame.apriori = (0..8).map(|_| r()).collect();
        for v in frame.tail.iter_mut() {
            *v = r();
        }
        let out = TurboDecoder::new(&t, &il).decode(&frame, 1, None).unwrap();

        let perm = il.permutation();
        let tail = |w: usize, s: usize| (0..3).map(move |j| w * 6 + 2 * j + s);
        let mut s1 = frame.systematic.clone();
        s1.extend(tail(0, 0).map(|i| frame.tail[i]));
        let mut p1 = frame.parity1.clone();
        p1.extend(tail(0, 1).map(|i| frame.tail[i]));
        let h1 = bcjr_decode(&t, &s1, &p1, &frame.apriori);
        let mut s2: Vec<f64> = perm.iter().map(|&p| frame.systematic[p]).collect();
        s2.extend(tail(1, 0).map(|i| frame.tail[i]));
        let mut p2 = frame.parity2.clone();
        p2.extend(tail(1, 1).map(|i| frame.tail[i]));
        let a2: Vec<f64> = perm
            .iter()
            .map(|&p| frame.apriori[p] + h1.extrinsic[p])
            .collect();
        let h2 = bcjr_decode(&t, &s2, &p2, &a2);
        for (j, &p) in perm.iter().enumerate() {
            let expect = frame.systematic[p] + frame.apriori[p] + h1.extrinsic[p] + h2.extrinsic[j];
            assert!((out.posterior[p] - expect).abs() < 1e-9);
            assert!((out.extrinsic[p] - (h1.extrinsic[p] + h2.extrinsic[j])).abs() < 1e-9);
        }
    }

    #[test]
    fn decoding_is_deterministic() {
        let t = Trellis::lte();
        let il = Interleaver::qpp(128).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(10);
        let cb: Vec<Bit> = (0..128).map(|_| rng.random_range(0..2)).collect();
        let cw = turbo_encode(&cb, &il, &t).unwrap();
        let frame = frame_from_codeword(&cw, 0.0, Some((&mut rng, 1.2)));
        let dec = TurboDecoder::new(&t, &il);
        assert_eq!(
            dec.decode(&frame, 6, None).unwrap(),
            dec.decode(&frame, 6, None).unwrap()
        );
    }
}
