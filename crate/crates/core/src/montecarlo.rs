//! Reproducible Monte Carlo estimates of the events the bounds control.
//!
//! Trial `t` draws its sample from the stream `(seed, t)`, so a trial's outcome
//! does not depend on which worker runs it. Indicators are gathered in trial
//! order and summed sequentially.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::bounds::reduce_revenue_to_gc;
use crate::distributions::Distribution;
use crate::empirical::{check_submult_event, region_violations, sup_additive_deviation, sup_submult_deviation, Curve};
use crate::error::{invalid, Error, Result};
use crate::exec::Executor;
use crate::revenue::revenue_error;
use crate::stream::StreamId;

/// The event whose frequency a run estimates.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "event", rename_all = "lowercase")]
pub enum EventSpec {
    /// Some `t` has `|F_n(t) - F(t)| > eps F(t)^alpha` (or the tail analogue).
    Gc { eps: f64, alpha: f64, side: Curve },
    /// `sup_p |r_n(p) - r(p)| > eps`.
    Revenue { eps: f64 },
    /// The CDF-side violation restricted to each of the three bands.
    Region { eps: f64, alpha: f64, p: f64, q: f64 },
    /// Counts trials where a revenue deviation above `eps` comes with a tail
    /// deviation above the reduced threshold. Requires `E[V^(1+theta)] <= c`.
    Implication { eps: f64, theta: f64, c: f64 },
}

impl EventSpec {
    fn validate(&self, dist: &Distribution) -> Result<()> {
        let positive = |name, v: f64| {
            if v > 0.0 && v.is_finite() {
                Ok(())
            } else {
                Err(invalid(name, v, "must be positive"))
            }
        };
        let alpha_ok = |a: f64| {
            if (0.0..1.0).contains(&a) {
                Ok(())
            } else {
                Err(invalid("alpha", a, "must lie in [0, 1)"))
            }
        };
        match *self {
            EventSpec::Gc { eps, alpha, .. } => {
                positive("eps", eps)?;
                alpha_ok(alpha)
            }
            EventSpec::Revenue { eps } => positive("eps", eps),
            EventSpec::Region { eps, alpha, p, q } => {
                positive("eps", eps)?;
                alpha_ok(alpha)?;
                if !(p > 0.0 && p < 1.0) {
                    return Err(invalid("p", p, "must lie in (0, 1)"));
                }
                if !(q > 0.0 && q <= 1.0) {
                    return Err(invalid("q", q, "must lie in (0, 1]"));
                }
                Ok(())
            }
            EventSpec::Implication { eps, theta, c } => {
                reduce_revenue_to_gc(eps, theta, c)?;
                let m = dist.moment(1.0 + theta)?;
                if m <= c {
                    Ok(())
                } else {
                    Err(Error::Infeasible(format!(
                        "{dist} has E[V^{}] = {m}, above the claimed bound {c}",
                        1.0 + theta
                    )))
                }
            }
        }
    }

    /// Short names of the estimates a run produces, one per indicator.
    pub fn labels(&self) -> Vec<String> {
        match self {
            EventSpec::Region { .. } => ["low", "middle", "high"]
                .iter()
                .map(|band| format!("{self}:{band}"))
                .collect(),
            _ => vec![self.to_string()],
        }
    }
}

impl fmt::Display for EventSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match *self {
            EventSpec::Gc { eps, alpha, side } => write!(f, "gc(eps={eps};alpha={alpha};side={side})"),
            EventSpec::Revenue { eps } => write!(f, "revenue(eps={eps})"),
            EventSpec::Region { eps, alpha, p, q } => write!(f, "region(eps={eps};alpha={alpha};p={p};q={q})"),
            EventSpec::Implication { eps, theta, c } => write!(f, "implication(eps={eps};theta={theta};c={c})"),
        }
    }
}

/// A frequency with its binomial standard error and provenance.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FreqEstimate {
    pub dist: String,
    pub n: usize,
    pub event: String,
    pub successes: u64,
    pub trials: u64,
    pub p_hat: f64,
    pub stderr: f64,
    pub seed: u64,
}

impl FreqEstimate {
    fn new(dist: &Distribution, n: usize, event: String, successes: u64, trials: u64, seed: u64) -> Self {
        let p_hat = successes as f64 / trials as f64;
        Self {
            dist: dist.to_string(),
            n,
            event,
            successes,
            trials,
            p_hat,
            stderr: (p_hat * (1.0 - p_hat) / trials as f64).sqrt(),
            seed,
        }
    }
}

/// Indicators for one trial, at most three.
fn indicators(dist: &Distribution, n: usize, event: &EventSpec, stream: StreamId) -> Result<[bool; 3]> {
    let sample = dist.sample(stream, n)?;
    Ok(match *event {
        EventSpec::Gc { eps, alpha, side } => [!check_submult_event(&sample, dist, alpha, eps, side)?, false, false],
        EventSpec::Revenue { eps } => [revenue_error(&sample, dist) > eps, false, false],
        EventSpec::Region { eps, alpha, p, q } => {
            let r = region_violations(&sample, dist, alpha, eps, p, q)?;
            [r.low, r.middle, r.high]
        }
        EventSpec::Implication { eps, theta, c } => {
            let reduced = reduce_revenue_to_gc(eps, theta, c)?;
            let holds = revenue_error(&sample, dist) <= eps
                || sup_submult_deviation(&sample, dist, reduced.alpha, Curve::Tail)?.value > reduced.eps;
            [holds, false, false]
        }
    })
}

/// Estimates the event frequency over `trials` independent samples of size
/// `n`. Region events yield three estimates (low, middle, high band); the
/// others yield one.
pub fn estimate_failure(
    dist: &Distribution,
    n: usize,
    event: &EventSpec,
    trials: u64,
    seed: u64,
    exec: &Executor,
) -> Result<Vec<FreqEstimate>> {
    dist.validate()?;
    if n == 0 {
        return Err(invalid("n", 0.0, "must be at least 1"));
    }
    if trials == 0 {
        return Err(invalid("trials", 0.0, "must be at least 1"));
    }
    event.validate(dist)?;
    let outcomes = exec.map(trials, |t| indicators(dist, n, event, StreamId::new(seed, t)));
    let mut counts = [0u64; 3];
    for outcome in outcomes {
        for (count, hit) in counts.iter_mut().zip(outcome?) {
            *count += hit as u64;
        }
    }
    Ok(event
        .labels()
        .into_iter()
        .zip(counts)
        .map(|(label, successes)| FreqEstimate::new(dist, n, label, successes, trials, seed))
        .collect())
}

/// Per-sample statistic tracked by [`convergence_curve`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "statistic", rename_all = "kebab-case")]
pub enum Statistic {
    RevenueError,
    Ks,
    Submult { alpha: f64 },
}

impl Statistic {
    pub fn eval(&self, sample: &crate::empirical::Sample, dist: &Distribution) -> Result<f64> {
        Ok(match *self {
            Statistic::RevenueError => revenue_error(sample, dist),
            Statistic::Ks => sup_additive_deviation(sample, dist).value,
            Statistic::Submult { alpha } => sup_submult_deviation(sample, dist, alpha, Curve::Cdf)?.value,
        })
    }
}

impl fmt::Display for Statistic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match *self {
            Statistic::RevenueError => f.write_str("revenue-error"),
            Statistic::Ks => f.write_str("ks"),
            Statistic::Submult { alpha } => write!(f, "submult:alpha={alpha}"),
        }
    }
}

impl std::str::FromStr for Statistic {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "revenue-error" => Ok(Statistic::RevenueError),
            "ks" => Ok(Statistic::Ks),
            _ => {
                let alpha = s
                    .strip_prefix("submult:alpha=")
                    .and_then(|a| a.parse::<f64>().ok())
                    .ok_or_else(|| {
                        Error::Parse(format!("unknown statistic `{s}` (expected revenue-error|ks|submult:alpha=<real>)"))
                    })?;
                if !(0.0..1.0).contains(&alpha) {
                    return Err(invalid("alpha", alpha, "must lie in [0, 1)"));
                }
                Ok(Statistic::Submult { alpha })
            }
        }
    }
}

/// Quartiles of a statistic across trials at one sample size.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CurvePoint {
    pub dist: String,
    pub statistic: String,
    pub n: usize,
    pub trials: u64,
    pub q25: f64,
    pub q50: f64,
    pub q75: f64,
    /// Trials whose statistic was `+inf`.
    pub infinite: u64,
}

/// Nearest-rank percentile of sorted data.
fn nearest_rank(sorted: &[f64], pct: f64) -> f64 {
    let rank = ((pct / 100.0) * sorted.len() as f64).ceil() as usize;
    sorted[rank.clamp(1, sorted.len()) - 1]
}

/// Quartiles of `statistic` at each size in `n_list`. Trial `t` at the
/// `k`-th size uses stream `(seed, k * 2^40 + t)`.
pub fn convergence_curve(
    dist: &Distribution,
    n_list: &[usize],
    trials: u64,
    seed: u64,
    statistic: Statistic,
    exec: &Executor,
) -> Result<Vec<CurvePoint>> {
    dist.validate()?;
    if n_list.is_empty() {
        return Err(Error::Infeasible("n_list is empty".into()));
    }
    if n_list[0] == 0 || n_list.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::Infeasible("n_list must be positive and strictly increasing".into()));
    }
    if trials == 0 || trials >= 1 << 40 {
        return Err(invalid("trials", trials as f64, "must lie in [1, 2^40)"));
    }
    if let Statistic::Submult { alpha } = statistic {
        if !(0.0..1.0).contains(&alpha) {
            return Err(invalid("alpha", alpha, "must lie in [0, 1)"));
        }
    }
    let mut out = Vec::with_capacity(n_list.len());
    for (k, &n) in n_list.iter().enumerate() {
        let values = exec.map(trials, |t| {
            let sample = dist.sample(StreamId::new(seed, ((k as u64) << 40) | t), n)?;
            statistic.eval(&sample, dist)
        });
        let mut values = values.into_iter().collect::<Result<Vec<f64>>>()?;
        values.sort_by(f64::total_cmp);
        out.push(CurvePoint {
            dist: dist.to_string(),
            statistic: statistic.to_string(),
            n,
            trials,
            q25: nearest_rank(&values, 25.0),
            q50: nearest_rank(&values, 50.0),
            q75: nearest_rank(&values, 75.0),
            infinite: values.iter().filter(|v| v.is_infinite()).count() as u64,
        });
    }
    Ok(out)
}
