//! Sampled EXIT functions and the tunnel test.

use serde::{Deserialize, Serialize};

/// Spacing of the a priori grid.
pub const GRID_STEP: f64 = 0.02;

/// The standard grid `0, 0.02, …, 1`.
pub fn standard_grid() -> Vec<f64> {
    let n = (1.0 / GRID_STEP).round() as usize;
    (0..=n).map(|i| i as f64 / n as f64).collect()
}

/// `I_E = F(I_A)` sampled on an increasing abscissa, evaluated by linear
/// interpolation.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExitCurve {
    pub sigma_ch_tilde: f64,
    pub samples: Vec<(f64, f64)>,
}

impl ExitCurve {
    /// Builds a curve, clamping to `[0, 1]` and enforcing monotonicity by
    /// pool-adjacent-violators regression.
    pub fn from_raw(sigma_ch_tilde: f64, i_a: &[f64], i_e: &[f64]) -> Self {
        assert_eq!(i_a.len(), i_e.len());
        assert!(!i_a.is_empty());
        assert!(
            i_a.windows(2).all(|w| w[0] < w[1]),
            "abscissa must increase"
        );
        let smoothed = isotonic(i_e);
        Self {
            sigma_ch_tilde,
            samples: i_a
                .iter()
                .zip(smoothed)
                .map(|(&a, e)| (a, e.clamp(0.0, 1.0)))
                .collect(),
        }
    }

    pub fn abscissa(&self) -> Vec<f64> {
        self.samples.iter().map(|s| s.0).collect()
    }

    pub fn ordinates(&self) -> Vec<f64> {
        self.samples.iter().map(|s| s.1).collect()
    }

    /// `F(i_a)`, clamped to the sampled range.
    pub fn eval(&self, i_a: f64) -> f64 {
        let s = &self.samples;
        if i_a <= s[0].0 {
            return s[0].1;
        }
        let last = s[s.len() - 1];
        if i_a >= last.0 {
            return last.1;
        }
        let idx = s.partition_point(|p| p.0 <= i_a);
        let (x0, y0) = s[idx - 1];
        let (x1, y1) = s[idx];
        y0 + (y1 - y0) * (i_a - x0) / (x1 - x0)
    }

    /// Smallest `I_A` with `F(I_A) ≥ i_e`. Below `F(0)` this is 0; above the
    /// curve's maximum it is `+∞`.
    pub fn inverse(&self, i_e: f64) -> f64 {
        let s = &self.samples;
        if i_e <= s[0].1 {
            return s[0].0;
        }
        for w in s.windows(2) {
            let ((x0, y0), (x1, y1)) = (w[0], w[1]);
            if i_e <= y1 {
                if y1 == y0 {
                    return x0;
                }
                return x0 + (x1 - x0) * (i_e - y0) / (y1 - y0);
            }
        }
        f64::INFINITY
    }

    /// Re-samples `I_A ↦ F(g(I_A))` on `grid`.
    pub fn compose(&self, grid: &[f64], g: impl Fn(f64) -> f64) -> Self {
        let ys: Vec<f64> = grid.iter().map(|&x| self.eval(g(x))).collect();
        Self::from_raw(self.sigma_ch_tilde, grid, &ys)
    }
}

fn isotonic(y: &[f64]) -> Vec<f64> {
    // blocks of (mean, weight)
    let mut blocks: Vec<(f64, usize)> = Vec::with_capacity(y.len());
    for &v in y {
        blocks.push((v, 1));
        while blocks.len() > 1 {
            let (m1, w1) = blocks[blocks.len() - 1];
            let (m0, w0) = blocks[blocks.len() - 2];
            if m0 <= m1 {
                break;
            }
            blocks.pop();
            let w = w0 + w1;
            *blocks.last_mut().unwrap() = ((m0 * w0 as f64 + m1 * w1 as f64) / w as f64, w);
        }
    }
    blocks
        .into_iter()
        .flat_map(|(m, w)| std::iter::repeat_n(m, w))
        .collect()
}

/// Tunnel margin.
pub const TUNNEL_MARGIN: f64 = 1e-3;
/// The tunnel is checked on `[0, 1 − TUNNEL_END)`.
pub const TUNNEL_END: f64 = 1e-3;
const TUNNEL_POINTS: usize = 2000;

/// True when the chart of two identical constituent decoders with transfer
/// `curve` has an open tunnel: `F(I) > F⁻¹(I) + margin` for every checked
/// `I`.
pub fn tunnel_open(curve: &ExitCurve) -> bool {
    first_tunnel_crossing(curve).is_none()
}

/// The first `I` at which the tunnel condition fails, if any.
pub fn first_tunnel_crossing(curve: &ExitCurve) -> Option<f64> {
    let end = 1.0 - TUNNEL_END;
    (0..TUNNEL_POINTS)
        .map(|i| end * i as f64 / TUNNEL_POINTS as f64)
        .find(|&i| curve.eval(i) <= curve.inverse(i) + TUNNEL_MARGIN)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn line(a: f64, b: f64) -> ExitCurve {
        let g = standard_grid();
        let y: Vec<f64> = g.iter().map(|x| (a + b * x).min(1.0)).collect();
        ExitCurve::from_raw(1.0, &g, &y)
    }

    #[test]
    fn grid_shape() {
        let g = standard_grid();
        assert_eq!(g.len(), 51);
        assert_eq!(g[0], 0.0);
        assert_eq!(g[50], 1.0);
    }

    #[test]
    fn isotonic_pools_violators() {
        assert_eq!(isotonic(&[0.0, 0.3, 0.1, 0.5]), vec![0.0, 0.2, 0.2, 0.5]);
        assert_eq!(isotonic(&[1.0, 0.0]), vec![0.5, 0.5]);
    }

    #[test]
    fn eval_and_inverse() {
        let c = line(0.2, 0.8);
        assert!((c.eval(0.5) - 0.6).abs() < 1e-12);
        assert!((c.inverse(0.6) - 0.5).abs() < 1e-12);
        assert_eq!(c.inverse(0.1), 0.0);
        assert_eq!(line(0.0, 0.5).inverse(0.9), f64::INFINITY);
    }

    #[test]
    fn tunnel_cases() {
        // F(I) = min(1, 0.2 + I) clears its mirror image by the margin.
        assert!(tunnel_open(&line(0.2, 1.0)));
        // A straight line into (1, 1) pinches the tunnel at the top end.
        assert!(!tunnel_open(&line(0.2, 0.8)));
        // F(I) = 0.9 I never reaches 1.
        assert!(!tunnel_open(&line(0.0, 0.9)));
        assert_eq!(first_tunnel_crossing(&line(0.0, 0.9)), Some(0.0));
    }

    proptest! {
        #[test]
        fn smoothing_is_monotone_and_bounded(v in proptest::collection::vec(-0.2f64..1.2, 51)) {
            let c = ExitCurve::from_raw(1.0, &standard_grid(), &v);
            let y = c.ordinates();
            prop_assert!(y.windows(2).all(|w| w[0] <= w[1]));
            prop_assert!(y.iter().all(|&e| (0.0..=1.0).contains(&e)));
        }

        #[test]
        fn inverse_is_left_inverse(a in 0.0f64..0.5, b in 0.1f64..0.5, x in 0.0f64..1.0) {
            let c = line(a, b);
            prop_assert!((c.inverse(c.eval(x)) - x).abs() < 1e-9);
        }
    }
}
