//! Exact log-MAP (BCJR) decoding of a terminated recursive systematic code.
//!
//! LLRs are `ln P(bit = 0) / P(bit = 1)`. The trellis starts and ends in
//! state 0; the last `memory` steps are tail steps with no a priori input.

use std::marker::PhantomData;

use super::Trellis;
use crate::Llr;

/// Soft outputs for the `K` information positions.
#[derive(Debug, Clone, PartialEq)]
pub struct BcjrOutput<T> {
    /// `posterior − apriori − systematic`.
    pub extrinsic: Vec<T>,
    pub posterior: Vec<T>,
}

/// Reusable forward/backward storage.
#[derive(Debug, Clone, Default)]
pub struct BcjrWorkspace<T> {
    alpha: Vec<f64>,
    beta_next: Vec<f64>,
    beta_cur: Vec<f64>,
    /// Per step: weight of the disfavoured input and parity value, and the
    /// favoured values.
    weights: Vec<[f64; 2]>,
    favour: Vec<[u8; 2]>,
    _scalar: PhantomData<T>,
}

impl<T: Llr> BcjrWorkspace<T> {
    pub fn new() -> Self {
        Self {
            alpha: Vec::new(),
            beta_next: Vec::new(),
            beta_cur: Vec::new(),
            weights: Vec::new(),
            favour: Vec::new(),
            _scalar: PhantomData,
        }
    }
}

/// Decodes one constituent code.
///
/// `systematic` and `parity` are `K + memory` long (tail included);
/// `apriori` is `K` long.
pub fn bcjr_decode<T: Llr>(
    trellis: &Trellis,
    systematic: &[T],
    parity: &[T],
    apriori: &[T],
) -> BcjrOutput<T> {
    let k = apriori.len();
    let mut out = BcjrOutput {
        extrinsic: vec![T::zero(); k],
        posterior: vec![T::zero(); k],
    };
    let mut ws = BcjrWorkspace::new();
    bcjr_decode_into(
        trellis,
        systematic,
        parity,
        apriori,
        &mut ws,
        &mut out.extrinsic,
        Some(&mut out.posterior),
    );
    out
}

/// Allocation-free variant of [`bcjr_decode`].
///
/// Runs in the probability domain in `f64`: a branch with half-LLR input
/// and parity terms `gu`, `gp` has weight `exp(±gu ± gp)`, scaled per step
/// so the favoured branch has weight 1. Forward and backward metrics are
/// renormalized every step. The result is the same MAP value as the
/// log-domain recursion with exact Jacobian logarithms.
pub fn bcjr_decode_into<T: Llr>(
    trellis: &Trellis,
    systematic: &[T],
    parity: &[T],
    apriori: &[T],
    ws: &mut BcjrWorkspace<T>,
    extrinsic: &mut [T],
    posterior: Option<&mut [T]>,
) {
    let k = apriori.len();
    let steps = k + trellis.memory();
    let ns = trellis.num_states();
    assert_eq!(systematic.len(), steps, "systematic length");
    assert_eq!(parity.len(), steps, "parity length");
    assert_eq!(extrinsic.len(), k, "extrinsic length");
    let f = |v: T| v.to_f64().unwrap_or(0.0);

    ws.weights.clear();
    ws.favour.clear();
    for t in 0..steps {
        let gu = 0.5
            * if t < k {
                f(apriori[t]) + f(systematic[t])
            } else {
                f(systematic[t])
            };
        let gp = 0.5 * f(parity[t]);
        ws.weights
            .push([(-2.0 * gu.abs()).exp(), (-2.0 * gp.abs()).exp()]);
        ws.favour.push([u8::from(gu < 0.0), u8::from(gp < 0.0)]);
    }
    let weight = |w: f64, bit: u8, fav: u8| if bit == fav { 1.0 } else { w };

    ws.alpha.clear();
    ws.alpha.resize((steps + 1) * ns, 0.0);
    ws.alpha[0] = 1.0;
    for t in 0..steps {
        let [wu, wp] = ws.weights[t];
        let [fu, fp] = ws.favour[t];
        let (cur, nxt) = ws.alpha[t * ns..(t + 2) * ns].split_at_mut(ns);
        for s in 0..ns {
            let a = cur[s];
            if a == 0.0 {
                continue;
            }
            for u in 0..2u8 {
                let g = weight(wu, u, fu) * weight(wp, trellis.parity(s, u), fp);
                nxt[trellis.next_state(s, u)] += a * g;
            }
        }
        let total: f64 = nxt.iter().sum();
        nxt.iter_mut().for_each(|v| *v /= total);
    }

    ws.beta_next.clear();
    ws.beta_next.resize(ns, 0.0);
    ws.beta_next[0] = 1.0;
    ws.beta_cur.clear();
    ws.beta_cur.resize(ns, 0.0);
    let sat = f(T::saturation());
    let mut post = posterior;
    for t in (0..steps).rev() {
        let [wu, wp] = ws.weights[t];
        let [fu, fp] = ws.favour[t];
        if t < k {
            let alpha_t = &ws.alpha[t * ns..(t + 1) * ns];
            let mut num = 0.0;
            let mut den = 0.0;
            for s in 0..ns {
                let a = alpha_t[s];
                if a == 0.0 {
                    continue;
                }
                num += a
                    * weight(wp, trellis.parity(s, 0), fp)
                    * ws.beta_next[trellis.next_state(s, 0)];
                den += a
                    * weight(wp, trellis.parity(s, 1), fp)
                    * ws.beta_next[trellis.next_state(s, 1)];
            }
            let ext = match (num > 0.0, den > 0.0) {
                (true, true) => (num.ln() - den.ln()).clamp(-sat, sat),
                (true, false) => sat,
                (false, true) => -sat,
                (false, false) => 0.0,
            };
            let ext = T::from_f64(ext).unwrap();
            extrinsic[t] = ext;
            if let Some(p) = post.as_deref_mut() {
                p[t] = apriori[t] + systematic[t] + ext;
            }
        }
        for s in 0..ns {
            let mut b = 0.0;
            for u in 0..2u8 {
                let g = weight(wu, u, fu) * weight(wp, trellis.parity(s, u), fp);
                b += ws.beta_next[trellis.next_state(s, u)] * g;
            }
            ws.beta_cur[s] = b;
        }
        let total: f64 = ws.beta_cur.iter().sum();
        ws.beta_cur.iter_mut().for_each(|v| *v /= total);
        std::mem::swap(&mut ws.beta_cur, &mut ws.beta_next);
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::turbo::encoder::{cc_encode, terminate};
    use crate::Bit;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn log_sum_exp(v: &[f64]) -> f64 {
        let m = v.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        m + v.iter().map(|x| (x - m).exp()).sum::<f64>().ln()
    }

    /// Exhaustive MAP over all `2^K` inputs of a terminated block.
    pub(crate) fn brute_force_posterior(sys: &[f64], par: &[f64], apr: &[f64]) -> Vec<f64> {
        let t = Trellis::lte();
        let k = apr.len();
        let mut zero = vec![Vec::new(); k];
        let mut one = vec![Vec::new(); k];
        for word in 0..(1u32 << k) {
            let u: Vec<Bit> = (0..k).map(|i| ((word >> i) & 1) as Bit).collect();
            let (p, s) = cc_encode(&u, &t, 0);
            let tail = terminate(&t, s);
            let mut metric = 0.0;
            let pm = |b: Bit| if b == 0 { 0.5 } else { -0.5 };
            for i in 0..k {
                metric += pm(u[i]) * (sys[i] + apr[i]) + pm(p[i]) * par[i];
            }
            for (j, (tu, tp)) in tail.iter().enumerate() {
                metric += pm(*tu) * sys[k + j] + pm(*tp) * par[k + j];
            }
            for i in 0..k {
                if u[i] == 0 {
                    zero[i].push(metric);
                } else {
                    one[i].push(metric);
                }
            }
        }
        (0..k)
            .map(|i| log_sum_exp(&zero[i]) - log_sum_exp(&one[i]))
            .collect()
    }

    #[test]
    fn zero_input_gives_zero_output() {
        let out = bcjr_decode(&Trellis::lte(), &[0.0f64; 11], &[0.0; 11], &[0.0; 8]);
        assert!(out.posterior.iter().all(|v| v.abs() < 1e-12));
        assert!(out.extrinsic.iter().all(|v| v.abs() < 1e-12));
    }

    #[test]
    fn matches_enumeration_on_toy_block() {
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        for _ in 0..20 {
            let sys: Vec<f64> = (0..11).map(|_| rng.random_range(-4.0..4.0)).collect();
            let par: Vec<f64> = (0..11).map(|_| rng.random_range(-4.0..4.0)).collect();
            let apr: Vec<f64> = (0..8).map(|_| rng.random_range(-3.0..3.0)).collect();
            let out = bcjr_decode(&Trellis::lte(), &sys, &par, &apr);
            let oracle = brute_force_posterior(&sys, &par, &apr);
            for i in 0..8 {
                assert!((out.posterior[i] - oracle[i]).abs() < 1e-9);
                let decomposed = apr[i] + sys[i] + out.extrinsic[i];
                assert!((decomposed - out.posterior[i]).abs() < 1e-9);
            }
        }
    }

    #[test]
    fn noiseless_codeword_is_recovered() {
        let t = Trellis::lte();
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let u: Vec<Bit> = (0..200).map(|_| rng.random_range(0..2)).collect();
        let (p, s) = cc_encode(&u, &t, 0);
        let tail = terminate(&t, s);
        let llr = |b: Bit| if b == 0 { 20.0 } else { -20.0 };
        let mut sys: Vec<f64> = u.iter().map(|&b| llr(b)).collect();
        let mut par: Vec<f64> = p.iter().map(|&b| llr(b)).collect();
        for (tu, tp) in tail {
            sys.push(llr(tu));
            par.push(llr(tp));
        }
        let out = bcjr_decode(&t, &sys, &par, &vec![0.0; 200]);
        for (i, &b) in u.iter().enumerate() {
            assert_eq!(out.posterior[i] < 0.0, b == 1);
        }
    }

    #[test]
    fn f32_tracks_f64() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let sys: Vec<f64> = (0..67).map(|_| rng.random_range(-3.0..3.0)).collect();
        let par: Vec<f64> = (0..67).map(|_| rng.random_range(-3.0..3.0)).collect();
        let apr: Vec<f64> = (0..64).map(|_| rng.random_range(-2.0..2.0)).collect();
        let t = Trellis::lte();
        let a = bcjr_decode(&t, &sys, &par, &apr);
        let f = |v: &[f64]| v.iter().map(|&x| x as f32).collect::<Vec<_>>();
        let b = bcjr_decode(&t, &f(&sys), &f(&par), &f(&apr));
        for i in 0..64 {
            assert!((a.posterior[i] - b.posterior[i] as f64).abs() < 1e-3);
        }
    }
}
