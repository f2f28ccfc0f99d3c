use super::{Interleaver, Trellis};
use crate::{Bit, Error, Result};

/// Number of tail bits emitted by the two terminated constituent encoders.
pub const TAIL_LEN: usize = 12;

/// Output of the rate-1/3 mother Turbo encoder.
///
/// `tail` holds, for encoder 1 and then encoder 2, the three termination
/// steps as `(systematic, parity)` pairs:
/// `[x1₀, z1₀, x1₁, z1₁, x1₂, z1₂, x2₀, z2₀, x2₁, z2₁, x2₂, z2₂]`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TurboCodeword {
    pub systematic: Vec<Bit>,
    pub parity1: Vec<Bit>,
    pub parity2: Vec<Bit>,
    pub tail: [Bit; TAIL_LEN],
}

impl TurboCodeword {
    pub fn block_len(&self) -> usize {
        self.systematic.len()
    }

    /// Systematic and parity bits of constituent encoder `which` (0 or 1),
    /// each `K + 3` long including the tail; encoder 2's systematic stream is
    /// the interleaved block.
    pub fn tail_pairs(&self, which: usize) -> ([Bit; 3], [Bit; 3]) {
        let base = which * 6;
        let mut sys = [0; 3];
        let mut par = [0; 3];
        for j in 0..3 {
            sys[j] = self.tail[base + 2 * j];
            par[j] = self.tail[base + 2 * j + 1];
        }
        (sys, par)
    }
}

/// Runs the recursive systematic encoder from `initial_state`, returning the
/// parity stream and the final state.
pub fn cc_encode(input: &[Bit], trellis: &Trellis, initial_state: usize) -> (Vec<Bit>, usize) {
    let mut state = initial_state;
    let parity = input
        .iter()
        .map(|&u| {
            let p = trellis.parity(state, u);
            state = trellis.next_state(state, u);
            p
        })
        .collect();
    (parity, state)
}

/// Drives the encoder back to the zero state; returns `memory` pairs of
/// (systematic, parity) tail bits.
pub fn terminate(trellis: &Trellis, mut state: usize) -> Vec<(Bit, Bit)> {
    (0..trellis.memory())
        .map(|_| {
            let u = trellis.tail_input(state);
            let p = trellis.parity(state, u);
            state = trellis.next_state(state, u);
            (u, p)
        })
        .collect()
}

/// Rate-1/3 parallel concatenated encoding of one code block.
pub fn turbo_encode(
    cb: &[Bit],
    interleaver: &Interleaver,
    trellis: &Trellis,
) -> Result<TurboCodeword> {
    if cb.len() != interleaver.len() {
        return Err(Error::MalformedInput(format!(
            "code block has {} bits, interleaver expects {}",
            cb.len(),
            interleaver.len()
        )));
    }
    debug_assert_eq!(trellis.memory(), 3);
    let (parity1, s1) = cc_encode(cb, trellis, 0);
    let (parity2, s2) = cc_encode(&interleaver.interleave(cb), trellis, 0);
    let mut tail = [0; TAIL_LEN];
    for (j, (u, p)) in terminate(trellis, s1).into_iter().enumerate() {
        tail[2 * j] = u;
        tail[2 * j + 1] = p;
    }
    for (j, (u, p)) in terminate(trellis, s2).into_iter().enumerate() {
        tail[6 + 2 * j] = u;
        tail[6 + 2 * j + 1] = p;
    }
    Ok(TurboCodeword {
        systematic: cb.to_vec(),
        parity1,
        parity2,
        tail,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    /// Shift-register model written directly from the generator polynomials
    /// `g0 = 1 + D² + D³` (feedback) and `g1 = 1 + D + D³` (feedforward).
    fn shift_register(input: &[Bit]) -> Vec<Bit> {
        let mut reg = [0u8; 3];
        input
            .iter()
            .map(|&u| {
                let a = u ^ reg[1] ^ reg[2];
                let z = a ^ reg[0] ^ reg[2];
                reg = [a, reg[0], reg[1]];
                z
            })
            .collect()
    }

    #[test]
    fn zero_input_zero_output() {
        let (p, s) = cc_encode(&[0; 50], &Trellis::lte(), 0);
        assert!(p.iter().all(|&b| b == 0));
        assert_eq!(s, 0);
    }

    #[test]
    fn impulse_response_matches_shift_register() {
        let mut x = vec![0; 24];
        x[0] = 1;
        let (p, _) = cc_encode(&x, &Trellis::lte(), 0);
        assert_eq!(p, shift_register(&x));
        // 15/13 impulse response is periodic with period 7 after the first
        // output; frozen from the shift-register model.
        assert_eq!(&p[..15], &[1, 1, 1, 1, 0, 0, 1, 0, 1, 1, 1, 0, 0, 1, 0]);
    }

    #[test]
    fn fixed_block_matches_shift_register() {
        let il = Interleaver::qpp(40).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(40);
        let cb: Vec<Bit> = (0..40).map(|_| rng.random_range(0..2)).collect();
        let cw = turbo_encode(&cb, &il, &Trellis::lte()).unwrap();
        assert_eq!(cw.parity1, shift_register(&cb));
        assert_eq!(cw.parity2, shift_register(&il.interleave(&cb)));
    }

    #[test]
    fn termination_returns_to_zero() {
        let t = Trellis::lte();
        let il = Interleaver::qpp(64).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for _ in 0..1000 {
            let cb: Vec<Bit> = (0..64).map(|_| rng.random_range(0..2)).collect();
            let cw = turbo_encode(&cb, &il, &t).unwrap();
            for (which, input) in [(0, cb.clone()), (1, il.interleave(&cb))] {
                let (sys, _) = cw.tail_pairs(which);
                let mut full = input;
                full.extend_from_slice(&sys);
                assert_eq!(cc_encode(&full, &t, 0).1, 0);
            }
        }
    }

    #[test]
    fn length_mismatch_is_rejected() {
        let il = Interleaver::qpp(40).unwrap();
        assert!(turbo_encode(&[0; 48], &il, &Trellis::lte()).is_err());
    }

    proptest! {
        #[test]
        fn encoder_is_linear(a in proptest::collection::vec(0u8..2, 48), b in proptest::collection::vec(0u8..2, 48)) {
            let t = Trellis::lte();
            let il = Interleaver::qpp(48).unwrap();
            let x: Vec<Bit> = a.iter().zip(&b).map(|(p, q)| p ^ q).collect();
            let (ca, cb, cx) = (
                turbo_encode(&a, &il, &t).unwrap(),
                turbo_encode(&b, &il, &t).unwrap(),
                turbo_encode(&x, &il, &t).unwrap(),
            );
            let xor = |u: &[Bit], v: &[Bit]| -> Vec<Bit> { u.iter().zip(v).map(|(p, q)| p ^ q).collect() };
            prop_assert_eq!(xor(&ca.parity1, &cb.parity1), cx.parity1);
            prop_assert_eq!(xor(&ca.parity2, &cb.parity2), cx.parity2);
            prop_assert_eq!(xor(&ca.tail, &cb.tail), cx.tail.to_vec());
        }
    }
}
