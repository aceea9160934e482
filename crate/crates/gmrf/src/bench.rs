//! Monte-Carlo benchmark harness: Frobenius error of four dependence
//! estimators against AR(p) population oracles.
//!
//! Three experiments sweep one axis each while holding the others fixed:
//!
//! * `dimension`  - AR(1), `phi = 0.8`, `n = 100`, horizon sweeps;
//! * `samplesize` - AR(1), `phi = 0.8`, horizon 100, sample size sweeps;
//! * `arorder`    - AR(p) with coefficients `0.8 / p`, `n = 100`, horizon 40,
//!   order sweeps from white noise to a fully connected graph.
//!
//! Per draw, each estimator is scored on both sides of the dependence: the
//! covariance estimate against the population covariance and the precision
//! estimate against the population precision. Estimators that cannot produce
//! one of the two (a singular block, a failed inversion) record the row with
//! a failed marker instead of aborting the sweep.

use std::io::Write;

use ndarray::Array2;
use rayon::prelude::*;

use crate::arp::{population_covariance_arp, population_precision_arp, simulate_ar, ArProcessSpec};
use crate::dense::{frobenius_error, pseudo_inverse};
use crate::error::Result;
use crate::graph::band_pattern;
use crate::moments::{cov_shrink_spd, sample_covariance};
use crate::precision::{dense_inverse_of_sparse, prec_sparse, PrecisionOptions};
use crate::rng;

/// The swept axis.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ExperimentKind {
    Dimension,
    SampleSize,
    ArOrder,
}

impl ExperimentKind {
    pub fn name(&self) -> &'static str {
        match self {
            ExperimentKind::Dimension => "dimension",
            ExperimentKind::SampleSize => "samplesize",
            ExperimentKind::ArOrder => "arorder",
        }
    }
}

/// Sweep ranges: `Desk` finishes in seconds and is the default; `Paper`
/// unlocks the full published ranges.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BenchmarkScale {
    Desk,
    Paper,
}

/// The four estimators under comparison.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum EstimatorKind {
    /// Full pipeline: graph-constrained columns, per-block shrinkage,
    /// symmetry conversion.
    Gspme,
    /// Raw column-by-column estimate: no shrinkage, no symmetrization.
    Le,
    /// Shrinkage covariance towards the diagonal target; precision side via
    /// pseudo-inverse.
    Shrinkage,
    /// Plain sample covariance; precision side via pseudo-inverse.
    Sample,
}

impl EstimatorKind {
    pub const ALL: [EstimatorKind; 4] = [
        EstimatorKind::Gspme,
        EstimatorKind::Le,
        EstimatorKind::Shrinkage,
        EstimatorKind::Sample,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            EstimatorKind::Gspme => "gspme",
            EstimatorKind::Le => "le",
            EstimatorKind::Shrinkage => "shrinkage",
            EstimatorKind::Sample => "sample",
        }
    }
}

/// One benchmark row: Frobenius errors of one estimator on one draw.
#[derive(Debug, Clone)]
pub struct BenchmarkRecord {
    pub experiment: ExperimentKind,
    pub estimator: EstimatorKind,
    pub sweep_value: usize,
    pub rep: usize,
    /// Covariance-side error; `NaN` when marked failed.
    pub frob_cov: f64,
    /// Precision-side error; `NaN` when marked failed.
    pub frob_prec: f64,
    pub failed: bool,
}

#[derive(Debug, Clone)]
pub struct BenchmarkConfig {
    pub experiment: ExperimentKind,
    pub reps: usize,
    pub seed: u64,
    pub scale: BenchmarkScale,
}

/// Sweep values for an experiment at a given scale.
pub fn sweep_values(experiment: ExperimentKind, scale: BenchmarkScale) -> Vec<usize> {
    match (experiment, scale) {
        (ExperimentKind::Dimension, BenchmarkScale::Desk) => vec![10, 25, 50, 75, 100],
        (ExperimentKind::Dimension, BenchmarkScale::Paper) => {
            vec![10, 25, 50, 75, 100, 150, 200, 250, 300]
        }
        (ExperimentKind::SampleSize, BenchmarkScale::Desk) => vec![30, 100, 300, 1000],
        (ExperimentKind::SampleSize, BenchmarkScale::Paper) => {
            vec![30, 100, 300, 1000, 3000, 10000]
        }
        (ExperimentKind::ArOrder, BenchmarkScale::Desk) => vec![0, 1, 2, 4, 8, 16, 39],
        (ExperimentKind::ArOrder, BenchmarkScale::Paper) => (0..=39).collect(),
    }
}

struct SweepSetting {
    ar: ArProcessSpec,
    n: usize,
    markov_order: usize,
}

fn sweep_setting(experiment: ExperimentKind, sweep: usize) -> SweepSetting {
    match experiment {
        ExperimentKind::Dimension => SweepSetting {
            ar: ArProcessSpec::new(vec![0.8], sweep),
            n: 100,
            markov_order: 1,
        },
        ExperimentKind::SampleSize => SweepSetting {
            ar: ArProcessSpec::new(vec![0.8], 100),
            n: sweep,
            markov_order: 1,
        },
        ExperimentKind::ArOrder => SweepSetting {
            ar: ArProcessSpec::new(vec![0.8 / sweep.max(1) as f64; sweep], 40),
            n: 100,
            markov_order: sweep,
        },
    }
}

fn record(
    experiment: ExperimentKind,
    estimator: EstimatorKind,
    sweep_value: usize,
    rep: usize,
    errors: Option<(f64, f64)>,
) -> BenchmarkRecord {
    match errors {
        Some((frob_cov, frob_prec)) => BenchmarkRecord {
            experiment,
            estimator,
            sweep_value,
            rep,
            frob_cov,
            frob_prec,
            failed: !(frob_cov.is_finite() && frob_prec.is_finite()),
        },
        None => BenchmarkRecord {
            experiment,
            estimator,
            sweep_value,
            rep,
            frob_cov: f64::NAN,
            frob_prec: f64::NAN,
            failed: true,
        },
    }
}

fn run_rep(
    cfg: &BenchmarkConfig,
    setting: &SweepSetting,
    pop_cov: &Array2<f64>,
    pop_prec: &Array2<f64>,
    sweep: usize,
    rep: usize,
) -> Result<Vec<BenchmarkRecord>> {
    let t = setting.ar.horizon;
    let seed = rng::mix(cfg.seed, sweep as u64, rep as u64);
    let x = simulate_ar(&setting.ar, setting.n, seed)?;
    let graph = band_pattern(t, 1)?;
    let mut out = Vec::with_capacity(4);

    // sample covariance; pseudo-inverse on the precision side
    let s = sample_covariance(&x)?;
    let s_pinv = pseudo_inverse(&s, None);
    out.push(record(
        cfg.experiment,
        EstimatorKind::Sample,
        sweep,
        rep,
        Some((
            frobenius_error(s.as_array(), pop_cov)?,
            frobenius_error(s_pinv.as_array(), pop_prec)?,
        )),
    ));

    // shrinkage covariance; pseudo-inverse on the precision side
    let shrunk = cov_shrink_spd(&x)?.covariance;
    let shrunk_pinv = pseudo_inverse(&shrunk, None);
    out.push(record(
        cfg.experiment,
        EstimatorKind::Shrinkage,
        sweep,
        rep,
        Some((
            frobenius_error(shrunk.as_array(), pop_cov)?,
            frobenius_error(shrunk_pinv.as_array(), pop_prec)?,
        )),
    ));

    // raw column-by-column estimate
    let le_opts = PrecisionOptions {
        markov_order: setting.markov_order,
        shrinkage: false,
        symmetrize: false,
    };
    let le_errors = match prec_sparse(&x, &graph, &le_opts) {
        Ok(le) => {
            let le_dense = le.to_dense();
            let prec_err = frobenius_error(&le_dense, pop_prec)?;
            let cov_err = match dense_inverse_of_sparse(&le) {
                Some(inv) => frobenius_error(&inv, pop_cov)?,
                None => f64::NAN,
            };
            Some((cov_err, prec_err))
        }
        Err(crate::error::Error::SingularBlock { .. }) => None,
        Err(e) => return Err(e),
    };
    out.push(record(cfg.experiment, EstimatorKind::Le, sweep, rep, le_errors));

    // full pipeline
    let gspme_opts = PrecisionOptions {
        markov_order: setting.markov_order,
        shrinkage: true,
        symmetrize: true,
    };
    let gspme = prec_sparse(&x, &graph, &gspme_opts)?;
    let gspme_dense = gspme.to_dense();
    let prec_err = frobenius_error(&gspme_dense, pop_prec)?;
    let cov_err = match dense_inverse_of_sparse(&gspme) {
        Some(inv) => frobenius_error(&inv, pop_cov)?,
        None => f64::NAN,
    };
    out.push(record(
        cfg.experiment,
        EstimatorKind::Gspme,
        sweep,
        rep,
        Some((cov_err, prec_err)),
    ));

    Ok(out)
}

/// Runs the configured experiment. Rows are sorted by `(sweep_value, rep,
/// estimator)` so the output never depends on scheduling.
pub fn run_benchmark(cfg: &BenchmarkConfig) -> Result<Vec<BenchmarkRecord>> {
    let sweeps = sweep_values(cfg.experiment, cfg.scale);
    let mut records = Vec::new();
    for sweep in sweeps {
        let setting = sweep_setting(cfg.experiment, sweep);
        let t = setting.ar.horizon;
        let pop_cov = population_covariance_arp(&setting.ar, t)?.into_array();
        let pop_prec = population_precision_arp(&setting.ar, t)?.into_array();
        let mut sweep_records: Vec<BenchmarkRecord> = (0..cfg.reps)
            .into_par_iter()
            .map(|rep| run_rep(cfg, &setting, &pop_cov, &pop_prec, sweep, rep))
            .collect::<Result<Vec<_>>>()?
            .into_iter()
            .flatten()
            .collect();
        sweep_records.sort_by_key(|r| (r.sweep_value, r.rep, r.estimator));
        records.extend(sweep_records);
    }
    Ok(records)
}

/// Writes records as CSV with a header row.
pub fn write_benchmark_csv(records: &[BenchmarkRecord], out: &mut dyn Write) -> Result<()> {
    writeln!(
        out,
        "experiment,estimator,sweep_value,rep,frob_cov,frob_prec,status"
    )?;
    for r in records {
        let fmt = |v: f64| {
            if v.is_finite() {
                format!("{v:.16e}")
            } else {
                "nan".to_string()
            }
        };
        writeln!(
            out,
            "{},{},{},{},{},{},{}",
            r.experiment.name(),
            r.estimator.name(),
            r.sweep_value,
            r.rep,
            fmt(r.frob_cov),
            fmt(r.frob_prec),
            if r.failed { "failed" } else { "ok" }
        )?;
    }
    Ok(())
}

/// Mean of a metric over the non-failed records matching a filter.
pub fn mean_error(
    records: &[BenchmarkRecord],
    estimator: EstimatorKind,
    sweep_value: usize,
    precision_side: bool,
) -> Option<f64> {
    let values: Vec<f64> = records
        .iter()
        .filter(|r| r.estimator == estimator && r.sweep_value == sweep_value && !r.failed)
        .map(|r| if precision_side { r.frob_prec } else { r.frob_cov })
        .collect();
    if values.is_empty() {
        None
    } else {
        Some(values.iter().sum::<f64>() / values.len() as f64)
    }
}
