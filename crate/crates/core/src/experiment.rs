//! JSON-configured batches of simulation jobs.
//!
//! A batch is computed in full before anything is written, and files are
//! moved into place only after every one of them has been written, so a failed
//! batch leaves no CSV behind.
//!
//! ```json
//! {
//!   "out_dir": "results",
//!   "seed": 1,
//!   "jobs": [
//!     {"id": "ks20", "kind": "massart-envelope", "n": 20, "eps": 0.1, "trials": 20000},
//!     {"kind": "curve", "dist": "pareto:a=2", "n_list": [100, 1000], "trials": 200,
//!      "statistic": "revenue-error"}
//!   ]
//! }
//! ```

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::bounds::{lemma_failure_bound, massart_bound};
use crate::distributions::Distribution;
use crate::empirical::Curve;
use crate::error::{Error, Result};
use crate::exec::Executor;
use crate::montecarlo::{convergence_curve, estimate_failure, CurvePoint, EventSpec, FreqEstimate, Statistic};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentConfig {
    pub jobs: Vec<JobSpec>,
    #[serde(default)]
    pub out_dir: Option<PathBuf>,
    /// Seed for jobs that do not set their own.
    #[serde(default)]
    pub seed: Option<u64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct JobSpec {
    #[serde(default)]
    pub id: Option<String>,
    #[serde(default)]
    pub seed: Option<u64>,
    #[serde(flatten)]
    pub kind: JobKind,
}

fn uniform() -> Distribution {
    Distribution::Uniform01
}

fn cdf() -> Curve {
    Curve::Cdf
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum JobKind {
    /// KS exceedance frequency next to `2 exp(-2 n eps^2)`.
    MassartEnvelope {
        #[serde(default = "uniform")]
        dist: Distribution,
        n: usize,
        eps: f64,
        trials: u64,
    },
    /// Submultiplicative violation frequency; with `p` and `q` the three-term
    /// bound is reported alongside.
    Gc {
        dist: Distribution,
        n: usize,
        eps: f64,
        alpha: f64,
        #[serde(default = "cdf")]
        side: Curve,
        trials: u64,
        #[serde(default)]
        p: Option<f64>,
        #[serde(default)]
        q: Option<f64>,
    },
    Revenue {
        dist: Distribution,
        n: usize,
        eps: f64,
        trials: u64,
    },
    Region {
        dist: Distribution,
        n: usize,
        eps: f64,
        alpha: f64,
        p: f64,
        q: f64,
        trials: u64,
    },
    Implication {
        dist: Distribution,
        n: usize,
        eps: f64,
        theta: f64,
        c: f64,
        trials: u64,
    },
    Curve {
        dist: Distribution,
        n_list: Vec<usize>,
        trials: u64,
        statistic: String,
    },
}

impl JobKind {
    pub fn name(&self) -> &'static str {
        match self {
            JobKind::MassartEnvelope { .. } => "massart-envelope",
            JobKind::Gc { .. } => "gc",
            JobKind::Revenue { .. } => "revenue",
            JobKind::Region { .. } => "region",
            JobKind::Implication { .. } => "implication",
            JobKind::Curve { .. } => "curve",
        }
    }
}

/// One row of a frequency table.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ResultRow {
    pub job_id: String,
    pub dist: String,
    pub n: usize,
    pub event: String,
    pub successes: u64,
    pub trials: u64,
    pub p_hat: f64,
    pub stderr: f64,
    /// Theoretical upper bound on the frequency, when one applies.
    pub bound: Option<f64>,
    pub bound_feasible: Option<bool>,
}

impl ResultRow {
    pub fn new(job_id: &str, est: FreqEstimate, bound: Option<(f64, bool)>) -> Self {
        Self {
            job_id: job_id.to_string(),
            dist: est.dist,
            n: est.n,
            event: est.event,
            successes: est.successes,
            trials: est.trials,
            p_hat: est.p_hat,
            stderr: est.stderr,
            bound: bound.map(|b| b.0),
            bound_feasible: bound.map(|b| b.1),
        }
    }
}

/// One row of a convergence table.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CurveRow {
    pub job_id: String,
    pub dist: String,
    pub statistic: String,
    pub n: usize,
    pub trials: u64,
    pub q25: f64,
    pub q50: f64,
    pub q75: f64,
    pub infinite: u64,
}

impl CurveRow {
    pub fn new(job_id: &str, p: CurvePoint) -> Self {
        Self {
            job_id: job_id.to_string(),
            dist: p.dist,
            statistic: p.statistic,
            n: p.n,
            trials: p.trials,
            q25: p.q25,
            q50: p.q50,
            q75: p.q75,
            infinite: p.infinite,
        }
    }
}

pub const RESULT_HEADER: &str = "job_id,dist,n,event,successes,trials,p_hat,stderr,bound,bound_feasible";
pub const CURVE_HEADER: &str = "job_id,dist,statistic,n,trials,q25,q50,q75,infinite";

/// Serializes rows as CSV with a header line, even when `rows` is empty.
pub fn write_csv<W: Write, T: Serialize>(out: W, header: &str, rows: &[T]) -> Result<()> {
    let mut w = csv::WriterBuilder::new().has_headers(false).from_writer(out);
    w.write_record(header.split(','))?;
    for row in rows {
        w.serialize(row)?;
    }
    w.flush().map_err(csv::Error::from)?;
    Ok(())
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ManifestJob {
    pub id: String,
    pub kind: String,
    pub seed: u64,
    pub file: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Manifest {
    /// Hex SHA-256 of the config bytes.
    pub config_sha256: String,
    pub crate_version: String,
    pub jobs: Vec<ManifestJob>,
}

/// A parsed config together with the hash of its source text.
#[derive(Debug, Clone)]
pub struct Experiment {
    pub config: ExperimentConfig,
    pub config_sha256: String,
}

/// Finished batch, not yet on disk.
#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentResult {
    /// `(file name, contents)` in job order.
    pub files: Vec<(String, Vec<u8>)>,
    pub manifest: Manifest,
}

fn valid_id(id: &str) -> bool {
    !id.is_empty()
        && !id.starts_with('.')
        && id.chars().all(|c| c.is_ascii_alphanumeric() || matches!(c, '-' | '_' | '.'))
}

impl Experiment {
    pub fn from_json(text: &str) -> Result<Self> {
        let config: ExperimentConfig = serde_json::from_str(text)?;
        let hash = Sha256::digest(text.as_bytes());
        let config_sha256 = hash.iter().map(|b| format!("{b:02x}")).collect();
        let exp = Self { config, config_sha256 };
        exp.check_ids()?;
        Ok(exp)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = fs::read_to_string(path).map_err(|source| Error::Io {
            path: path.to_path_buf(),
            source,
        })?;
        Self::from_json(&text)
    }

    /// Job ids, defaulting to `job<index>`.
    pub fn job_ids(&self) -> Vec<String> {
        self.config
            .jobs
            .iter()
            .enumerate()
            .map(|(i, j)| j.id.clone().unwrap_or_else(|| format!("job{i}")))
            .collect()
    }

    fn check_ids(&self) -> Result<()> {
        if self.config.jobs.is_empty() {
            return Err(Error::Parse("config has no jobs".into()));
        }
        let ids = self.job_ids();
        for (i, id) in ids.iter().enumerate() {
            if !valid_id(id) {
                return Err(Error::Parse(format!("job id `{id}` must be [A-Za-z0-9._-]+")));
            }
            if ids[..i].contains(id) || id == "manifest" {
                return Err(Error::Parse(format!("duplicate or reserved job id `{id}`")));
            }
        }
        Ok(())
    }

    /// Runs every job; the first failing job aborts the whole batch.
    pub fn run(&self, exec: &Executor) -> Result<ExperimentResult> {
        let default_seed = self.config.seed.unwrap_or(0);
        let mut files = Vec::new();
        let mut jobs = Vec::new();
        for (spec, id) in self.config.jobs.iter().zip(self.job_ids()) {
            let seed = spec.seed.unwrap_or(default_seed);
            let mut buf = Vec::new();
            run_job(&id, &spec.kind, seed, exec, &mut buf)?;
            let file = format!("{id}.csv");
            jobs.push(ManifestJob {
                id,
                kind: spec.kind.name().to_string(),
                seed,
                file: file.clone(),
            });
            files.push((file, buf));
        }
        Ok(ExperimentResult {
            files,
            manifest: Manifest {
                config_sha256: self.config_sha256.clone(),
                crate_version: env!("CARGO_PKG_VERSION").to_string(),
                jobs,
            },
        })
    }
}

/// Runs a single job and writes its CSV to `out`.
pub fn run_job<W: Write>(id: &str, kind: &JobKind, seed: u64, exec: &Executor, out: W) -> Result<()> {
    let freq = |dist: &Distribution, n: usize, event: EventSpec, trials: u64| {
        estimate_failure(dist, n, &event, trials, seed, exec)
    };
    let rows: Vec<ResultRow> = match kind {
        JobKind::MassartEnvelope { dist, n, eps, trials } => {
            let bound = massart_bound(*n as u64, *eps)?;
            let event = EventSpec::Gc { eps: *eps, alpha: 0.0, side: Curve::Cdf };
            freq(dist, *n, event, *trials)?
                .into_iter()
                .map(|e| ResultRow::new(id, e, Some((bound, true))))
                .collect()
        }
        JobKind::Gc { dist, n, eps, alpha, side, trials, p, q } => {
            let bound = match (p, q) {
                (Some(p), Some(q)) => {
                    let r = lemma_failure_bound(*n as u64, *eps, *alpha, *p, *q)?;
                    Some((r.bound, r.feasible))
                }
                (None, None) if *alpha == 0.0 && *side == Curve::Cdf => Some((massart_bound(*n as u64, *eps)?, true)),
                (None, None) => None,
                _ => return Err(Error::Parse(format!("job `{id}`: give both p and q or neither"))),
            };
            let event = EventSpec::Gc { eps: *eps, alpha: *alpha, side: *side };
            freq(dist, *n, event, *trials)?
                .into_iter()
                .map(|e| ResultRow::new(id, e, bound))
                .collect()
        }
        JobKind::Revenue { dist, n, eps, trials } => freq(dist, *n, EventSpec::Revenue { eps: *eps }, *trials)?
            .into_iter()
            .map(|e| ResultRow::new(id, e, None))
            .collect(),
        JobKind::Region { dist, n, eps, alpha, p, q, trials } => {
            let report = lemma_failure_bound(*n as u64, *eps, *alpha, *p, *q)?;
            let event = EventSpec::Region { eps: *eps, alpha: *alpha, p: *p, q: *q };
            freq(dist, *n, event, *trials)?
                .into_iter()
                .zip(report.terms)
                .map(|(e, t)| ResultRow::new(id, e, Some((t, report.feasible))))
                .collect()
        }
        JobKind::Implication { dist, n, eps, theta, c, trials } => {
            let event = EventSpec::Implication { eps: *eps, theta: *theta, c: *c };
            freq(dist, *n, event, *trials)?
                .into_iter()
                .map(|e| ResultRow::new(id, e, None))
                .collect()
        }
        JobKind::Curve { dist, n_list, trials, statistic } => {
            let statistic: Statistic = statistic.parse()?;
            let rows: Vec<CurveRow> = convergence_curve(dist, n_list, *trials, seed, statistic, exec)?
                .into_iter()
                .map(|p| CurveRow::new(id, p))
                .collect();
            return write_csv(out, CURVE_HEADER, &rows);
        }
    };
    write_csv(out, RESULT_HEADER, &rows)
}

impl ExperimentResult {
    /// Writes every CSV plus `manifest.json` into `dir`, creating it if needed.
    /// Files are staged under temporary names and renamed once all are written.
    pub fn write(&self, dir: &Path) -> Result<Vec<PathBuf>> {
        let io = |path: &Path| {
            let path = path.to_path_buf();
            move |source| Error::Io { path, source }
        };
        fs::create_dir_all(dir).map_err(io(dir))?;
        let mut manifest = serde_json::to_vec_pretty(&self.manifest)?;
        manifest.push(b'\n');
        let mut all: Vec<(&str, &[u8])> = self.files.iter().map(|(n, b)| (n.as_str(), b.as_slice())).collect();
        all.push(("manifest.json", &manifest));

        let mut staged = Vec::new();
        let stage = |staged: &mut Vec<(PathBuf, PathBuf)>| -> Result<()> {
            for (name, bytes) in &all {
                let tmp = dir.join(format!(".{name}.tmp"));
                let dst = dir.join(name);
                staged.push((tmp.clone(), dst));
                fs::write(&tmp, bytes).map_err(io(&tmp))?;
            }
            Ok(())
        };
        if let Err(e) = stage(&mut staged) {
            for (tmp, _) in &staged {
                let _ = fs::remove_file(tmp);
            }
            return Err(e);
        }
        let mut written = Vec::new();
        for (tmp, dst) in staged {
            fs::rename(&tmp, &dst).map_err(io(&dst))?;
            written.push(dst);
        }
        Ok(written)
    }
}
