//! Trial execution.

use std::time::Instant;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::spec::{ExperimentSpec, RankSpec};
use crate::baselines::{approximate, MethodKind, MethodParams};
use crate::drm::{splitmix64, DrmType};
use crate::error::{Error, Result};
use crate::sketch::Oversampling;
use crate::tensor::{rel_errors, StructuredTensor, DEFAULT_MATERIALIZATION_CAP};

const TENSOR_STREAM: u64 = 0x5445_4E53_4F52_5345;

/// Seed of trial `trial`.
pub fn trial_seed(seed: u64, trial: usize) -> u64 {
    splitmix64(seed ^ trial as u64)
}

/// Seed the experiment's input tensor is built from.
pub fn tensor_seed(seed: u64) -> u64 {
    splitmix64(seed ^ TENSOR_STREAM)
}

/// One result row. Failed runs keep their identifying fields, leave the
/// measurements empty and carry the message in `error`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExperimentRecord {
    pub experiment: String,
    pub method: String,
    /// `-` for deterministic methods.
    pub drm_kind: String,
    pub rank: String,
    /// `-` for methods with a single DRM.
    pub oversampling: String,
    pub trial: usize,
    pub seed: u64,
    pub rel_error_input_norm: Option<f64>,
    pub rel_error_approx_norm: Option<f64>,
    pub wall_time_ms: Option<f64>,
    #[serde(default)]
    pub error: String,
}

impl ExperimentRecord {
    pub fn is_ok(&self) -> bool {
        self.error.is_empty()
    }
}

struct Job {
    method: MethodKind,
    drm: Option<DrmType>,
    oversampling: Option<Oversampling>,
    rank_index: usize,
    trial: usize,
}

fn jobs(spec: &ExperimentSpec) -> Vec<Job> {
    let mut out = Vec::new();
    for &method in &spec.methods {
        let drms: Vec<Option<DrmType>> = if method.is_randomized() {
            spec.drms.iter().copied().map(Some).collect()
        } else {
            vec![None]
        };
        let rules: Vec<Option<Oversampling>> = if method.uses_oversampling() {
            spec.oversampling.iter().copied().map(Some).collect()
        } else {
            vec![None]
        };
        let trials = if method.is_randomized() { spec.trials } else { 1 };
        for &drm in &drms {
            for &oversampling in &rules {
                for rank_index in 0..spec.ranks.len() {
                    for trial in 0..trials {
                        out.push(Job { method, drm, oversampling, rank_index, trial });
                    }
                }
            }
        }
    }
    out
}

/// Run every (method, DRM, oversampling, rank, trial) combination of `spec`
/// on the global thread pool. Deterministic methods run once per rank.
///
/// Records come back ordered by method, DRM kind, oversampling, rank and
/// trial, each in the order the spec lists them, whatever the scheduling.
pub fn run_experiment(spec: &ExperimentSpec) -> Result<Vec<ExperimentRecord>> {
    spec.validate()?;
    let tensor = spec.recipe.build(tensor_seed(spec.seed))?;
    let work = jobs(spec);
    let mut rows: Vec<(usize, ExperimentRecord)> = work
        .par_iter()
        .enumerate()
        .map(|(i, job)| (i, run_job(spec, &tensor, job)))
        .collect();
    rows.sort_by_key(|(i, _)| *i);
    Ok(rows.into_iter().map(|(_, r)| r).collect())
}

/// As [`run_experiment`] on a dedicated pool of `threads` workers.
pub fn run_experiment_with_threads(spec: &ExperimentSpec, threads: usize) -> Result<Vec<ExperimentRecord>> {
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build()
        .map_err(|e| Error::Config(format!("cannot start {threads} workers: {e}")))?;
    pool.install(|| run_experiment(spec))
}

fn run_job(spec: &ExperimentSpec, t: &StructuredTensor, job: &Job) -> ExperimentRecord {
    let rank: &RankSpec = &spec.ranks[job.rank_index];
    let seed = trial_seed(spec.seed, job.trial);
    let mut record = ExperimentRecord {
        experiment: spec.name.clone(),
        method: job.method.to_string(),
        drm_kind: job.drm.map_or("-".into(), |d| d.to_string()),
        rank: rank.to_string(),
        oversampling: job.oversampling.map_or("-".into(), |o| o.to_string()),
        trial: job.trial,
        seed,
        rel_error_input_norm: None,
        rel_error_approx_norm: None,
        wall_time_ms: None,
        error: String::new(),
    };
    let outcome = (|| -> Result<()> {
        let params = MethodParams {
            ranks: rank.resolve(t.shape())?,
            oversampling: job.oversampling.unwrap_or_default(),
            seed,
            drm: job.drm.unwrap_or(DrmType::Gaussian),
        };
        let start = Instant::now();
        let approx = approximate(job.method, t, &params)?;
        let elapsed = start.elapsed();
        let errs = rel_errors(t, &approx, DEFAULT_MATERIALIZATION_CAP)?;
        record.wall_time_ms = Some(elapsed.as_secs_f64() * 1e3);
        record.rel_error_input_norm = Some(errs.vs_input);
        record.rel_error_approx_norm = Some(errs.vs_approx);
        Ok(())
    })();
    if let Err(e) = outcome {
        record.error = e.to_string();
    }
    record
}
