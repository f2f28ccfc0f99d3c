//! Monte Carlo TB simulation: configuration, per-TB chains and SNR sweeps.

mod config;
mod pipeline;
mod report;

pub use config::*;
pub use pipeline::*;
pub use report::*;

use std::time::Instant;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::ic::block_count_ratio;
use crate::Result;

/// Runs every SNR point of `config` and collects the report.
pub fn run_sweep(config: &SimConfig) -> Result<SimReport> {
    run_sweep_with(config, |_| {})
}

/// As [`run_sweep`], calling `progress` after each SNR point.
pub fn run_sweep_with(
    config: &SimConfig,
    mut progress: impl FnMut(&SnrPoint),
) -> Result<SimReport> {
    let session = Session::new(config)?;
    let mut points = Vec::new();
    for (i, snr) in config.snr.values()?.into_iter().enumerate() {
        let p = run_point(&session, i, snr)?;
        progress(&p);
        points.push(p);
    }
    Ok(SimReport {
        version: format!("v{}", env!("CARGO_PKG_VERSION")),
        scheme: config.scheme.name().to_string(),
        params: session.params,
        lte_baseline: session.lte_baseline().cloned(),
        config: config.to_toml_string(),
        points,
    })
}

fn simulate_batch(
    session: &Session,
    snr_index: usize,
    snr_db: f64,
    range: std::ops::Range<u64>,
) -> Result<Vec<TbOutcome>> {
    range
        .into_par_iter()
        .map(|tb| match session.config.precision {
            Precision::F32 => session.run_tb::<f32>(snr_index, snr_db, tb, false),
            Precision::F64 => session.run_tb::<f64>(snr_index, snr_db, tb, false),
        })
        .collect()
}

/// Simulates one SNR point. TBs run in parallel batches but are counted in
/// index order, so the stopping point and totals do not depend on thread
/// count.
pub fn run_point(session: &Session, snr_index: usize, snr_db: f64) -> Result<SnrPoint> {
    let start = Instant::now();
    let stop = session.config.stop;
    let n_cbs = session.num_cbs();
    let batch = (rayon::current_num_threads() * 4).max(8) as u64;
    let (mut tbs, mut tb_errors, mut undetected) = (0usize, 0usize, 0usize);
    let mut cb_errors = vec![0usize; n_cbs];
    let (mut invocations, mut inter) = (0usize, 0usize);
    let mut next = 0u64;
    'outer: while tbs < stop.max_tbs && tb_errors < stop.max_tb_errors {
        let end = (next + batch).min(stop.max_tbs as u64);
        for o in simulate_batch(session, snr_index, snr_db, next..end)? {
            tbs += 1;
            tb_errors += usize::from(o.tb_error);
            undetected += usize::from(o.undetected);
            for (acc, e) in cb_errors.iter_mut().zip(&o.cb_errors) {
                *acc += usize::from(*e);
            }
            invocations += o.decode_invocations;
            inter += o.inter_iterations;
            if tbs >= stop.max_tbs || tb_errors >= stop.max_tb_errors {
                break 'outer;
            }
        }
        next = end;
    }
    let (lo, hi) = wilson_interval(tb_errors, tbs);
    let avg_decodes = invocations as f64 / (tbs * n_cbs) as f64;
    let ratio = match session.config.scheme {
        Scheme::Lte => 1.0,
        _ => block_count_ratio(&session.params),
    };
    Ok(SnrPoint {
        snr_db,
        tbs,
        tb_errors,
        undetected_errors: undetected,
        tber: tb_errors as f64 / tbs as f64,
        tber_ci_low: lo,
        tber_ci_high: hi,
        reliable: tb_errors >= RELIABLE_ERRORS,
        capped: tb_errors < stop.max_tb_errors,
        cber: cb_errors.iter().map(|&e| e as f64 / tbs as f64).collect(),
        avg_decodes_per_cb: avg_decodes,
        normalized_complexity: avg_decodes * ratio,
        avg_inter_iterations: inter as f64 / tbs as f64,
        wall_time_s: start.elapsed().as_secs_f64(),
    })
}

/// Block error rate of every block after every FF-FB pass.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CbProfile {
    pub snr_db: f64,
    pub tbs: usize,
    /// `cber[pass][cb]`; passes after the decoder stopped repeat its final
    /// state.
    pub cber: Vec<Vec<f64>>,
}

impl CbProfile {
    /// Long format: `pass,cb,cber`, passes counted from 1.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("pass,cb,cber\n");
        for (p, row) in self.cber.iter().enumerate() {
            for (c, v) in row.iter().enumerate() {
                out.push_str(&format!("{},{},{:.6e}\n", p + 1, c, v));
            }
        }
        out
    }
}

/// Runs `tbs` FF-FB TBs at `snr_db`, recording block errors per pass.
pub fn per_cb_profile(config: &SimConfig, snr_db: f64, tbs: usize) -> Result<CbProfile> {
    let mut cfg = config.clone();
    cfg.scheme = Scheme::IcFfFb;
    let session = Session::new(&cfg)?;
    let passes = cfg.decoder.tb_iters;
    let n = session.num_cbs();
    let outcomes: Vec<TbOutcome> = (0..tbs as u64)
        .into_par_iter()
        .map(|tb| match cfg.precision {
            Precision::F32 => session.run_tb::<f32>(0, snr_db, tb, true),
            Precision::F64 => session.run_tb::<f64>(0, snr_db, tb, true),
        })
        .collect::<Result<_>>()?;
    let mut counts = vec![vec![0usize; n]; passes];
    for o in &outcomes {
        let last = o
            .pass_cb_errors
            .last()
            .cloned()
            .unwrap_or_else(|| o.cb_errors.clone());
        for (p, row) in counts.iter_mut().enumerate() {
            let errs = o.pass_cb_errors.get(p).unwrap_or(&last);
            for (acc, &e) in row.iter_mut().zip(errs) {
                *acc += usize::from(e);
            }
        }
    }
    let denom = tbs.max(1) as f64;
    Ok(CbProfile {
        snr_db,
        tbs,
        cber: counts
            .into_iter()
            .map(|r| r.into_iter().map(|c| c as f64 / denom).collect())
            .collect(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn toy(scheme: &str) -> SimConfig {
        SimConfig::from_toml_str(&format!(
            r#"
scheme = "{scheme}"
seed = 11
[code]
num_cbs = 4
cb_len = 160
coupling_len = 16
[snr]
points = [-8.0, 6.0]
[stop]
max_tbs = 40
max_tb_errors = 10
"#
        ))
        .unwrap()
    }

    #[test]
    fn sweep_stops_on_errors_or_cap() {
        let r = run_sweep(&toy("ic-fffb")).unwrap();
        let low = &r.points[0];
        assert_eq!(low.tb_errors, 10);
        assert!(!low.capped);
        let high = &r.points[1];
        assert_eq!((high.tbs, high.tb_errors), (40, 0));
        assert!(high.capped);
        assert_eq!(high.avg_decodes_per_cb, 1.0);
        assert_eq!(high.cber, vec![0.0; 4]);
    }

    #[test]
    fn sweep_is_independent_of_thread_count() {
        let cfg = toy("ic-wd");
        let a = run_sweep(&cfg).unwrap();
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(1)
            .build()
            .unwrap();
        let b = pool.install(|| run_sweep(&cfg)).unwrap();
        for (x, y) in a.points.iter().zip(&b.points) {
            assert_eq!((x.tbs, x.tb_errors, &x.cber), (y.tbs, y.tb_errors, &y.cber));
            assert_eq!(x.avg_decodes_per_cb, y.avg_decodes_per_cb);
        }
    }

    #[test]
    fn lte_report_carries_baseline() {
        let r = run_sweep(&toy("lte")).unwrap();
        let b = r.lte_baseline.as_ref().unwrap();
        assert_eq!(b.payload_len, r.params.payload_len());
        assert_eq!(r.points[1].tb_errors, 0);
        assert_eq!(r.points[1].normalized_complexity, 1.0);
    }

    #[test]
    fn profile_rows_fill_forward() {
        let cfg = toy("ic-fffb");
        let p = per_cb_profile(&cfg, 6.0, 4).unwrap();
        assert_eq!(p.cber.len(), cfg.decoder.tb_iters);
        assert!(p.cber.iter().flatten().all(|&v| v == 0.0));
        let noisy = per_cb_profile(&cfg, -5.0, 8).unwrap();
        let first: f64 = noisy.cber[0].iter().sum();
        let last: f64 = noisy.cber.last().unwrap().iter().sum();
        assert!(last <= first);
        assert!(p.to_csv().lines().count() == 1 + cfg.decoder.tb_iters * 4);
    }
}
