//! Closed-form valuation distributions.
//!
//! Every member of the zoo is supported on `[0, ∞)` and exposes its CDF, tail
//! (quantile of a value), posted-price revenue, raw moments and atoms exactly.
//! Sampling uses the inverse-CDF transform of one uniform variate per draw.

use std::fmt;
use std::str::FromStr;

use rand::Rng;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::empirical::Sample;
use crate::error::{invalid, Error, Result};
use crate::stream::StreamId;

/// A member of the closed-form distribution zoo.
///
/// Construct through [`Distribution::pareto`], [`Distribution::eta`] or by
/// parsing a spec string (`uniform`, `pareto:a=<real>`, `equalrev`,
/// `eta:p=<real>`), which validate parameters.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Distribution {
    /// Uniform on `[0, 1]`.
    Uniform01,
    /// Pareto with scale 1: `F(t) = 1 - t^(-shape)` for `t >= 1`.
    Pareto { shape: f64 },
    /// Tail `min(1, 1/v)`: every price `p >= 1` earns expected revenue 1.
    EqualRevenue,
    /// Value `1/p` with probability `p`, otherwise 0.
    Eta { p: f64 },
}

/// Which closed-form function to evaluate.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Evaluate {
    Cdf,
    Tail,
    Revenue,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Atom {
    pub location: f64,
    pub mass: f64,
}

/// Point masses of a distribution, ordered by location.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct AtomSet {
    atoms: Vec<Atom>,
}

impl AtomSet {
    pub fn new(atoms: Vec<Atom>) -> Result<Self> {
        let mut total = 0.0;
        for (i, a) in atoms.iter().enumerate() {
            if !(a.mass > 0.0 && a.mass <= 1.0) {
                return Err(invalid("atom mass", a.mass, "must lie in (0, 1]"));
            }
            if i > 0 && atoms[i - 1].location >= a.location {
                return Err(invalid(
                    "atom location",
                    a.location,
                    "locations must be strictly increasing",
                ));
            }
            total += a.mass;
        }
        if total > 1.0 + 1e-12 {
            return Err(invalid("total atom mass", total, "must not exceed 1"));
        }
        Ok(Self { atoms })
    }

    pub fn iter(&self) -> impl Iterator<Item = &Atom> {
        self.atoms.iter()
    }

    pub fn len(&self) -> usize {
        self.atoms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.atoms.is_empty()
    }

    /// Mass located exactly at `x`, zero if `x` is not an atom.
    pub fn mass_at(&self, x: f64) -> f64 {
        self.atoms
            .iter()
            .find(|a| a.location == x)
            .map_or(0.0, |a| a.mass)
    }

    pub fn total_mass(&self) -> f64 {
        self.atoms.iter().map(|a| a.mass).sum()
    }
}

impl Distribution {
    pub fn pareto(shape: f64) -> Result<Self> {
        let d = Distribution::Pareto { shape };
        d.validate()?;
        Ok(d)
    }

    pub fn eta(p: f64) -> Result<Self> {
        let d = Distribution::Eta { p };
        d.validate()?;
        Ok(d)
    }

    pub fn validate(&self) -> Result<()> {
        match *self {
            Distribution::Pareto { shape } if !(shape > 0.0 && shape.is_finite()) => {
                Err(invalid("pareto shape", shape, "must be a positive finite real"))
            }
            Distribution::Eta { p } if !(p > 0.0 && p <= 1.0) => {
                Err(invalid("eta p", p, "must lie in (0, 1]"))
            }
            _ => Ok(()),
        }
    }

    /// The nonzero value of `Eta(p)`.
    fn eta_top(p: f64) -> f64 {
        1.0 / p
    }

    /// `F(t) = Pr[V <= t]`, defined for every real `t`.
    pub fn cdf(&self, t: f64) -> f64 {
        match *self {
            Distribution::Uniform01 => t.clamp(0.0, 1.0),
            Distribution::Pareto { shape } => {
                if t <= 1.0 {
                    0.0
                } else {
                    -(-shape * t.ln()).exp_m1()
                }
            }
            Distribution::EqualRevenue => {
                if t <= 1.0 {
                    0.0
                } else {
                    (t - 1.0) / t
                }
            }
            Distribution::Eta { p } => {
                if t < 0.0 {
                    0.0
                } else if t < Self::eta_top(p) {
                    1.0 - p
                } else {
                    1.0
                }
            }
        }
    }

    /// Left limit `F(t-) = Pr[V < t]`.
    pub fn cdf_left(&self, t: f64) -> f64 {
        match *self {
            Distribution::Eta { p } => {
                if t <= 0.0 {
                    0.0
                } else if t <= Self::eta_top(p) {
                    1.0 - p
                } else {
                    1.0
                }
            }
            _ => self.cdf(t),
        }
    }

    /// Quantile of a value, `q(v) = Pr[V >= v] = 1 - F(v-)`.
    ///
    /// Computed directly rather than as a complement so that small tails keep
    /// full relative precision.
    pub fn tail(&self, v: f64) -> f64 {
        match *self {
            Distribution::Uniform01 => (1.0 - v).clamp(0.0, 1.0),
            Distribution::Pareto { shape } => {
                if v <= 1.0 {
                    1.0
                } else {
                    (-shape * v.ln()).exp()
                }
            }
            Distribution::EqualRevenue => {
                if v <= 1.0 {
                    1.0
                } else {
                    1.0 / v
                }
            }
            Distribution::Eta { p } => {
                if v <= 0.0 {
                    1.0
                } else if v <= Self::eta_top(p) {
                    p
                } else {
                    0.0
                }
            }
        }
    }

    /// Strict tail `Pr[V > v] = 1 - F(v)`, the right limit of [`tail`](Self::tail).
    pub fn survival(&self, v: f64) -> f64 {
        match *self {
            Distribution::Eta { p } => {
                if v < 0.0 {
                    1.0
                } else if v < Self::eta_top(p) {
                    p
                } else {
                    0.0
                }
            }
            _ => self.tail(v),
        }
    }

    /// Expected revenue of posting price `price`: `price * q(price)`.
    pub fn revenue(&self, price: f64) -> f64 {
        if price <= 0.0 {
            0.0
        } else {
            price * self.tail(price)
        }
    }

    pub fn eval(&self, x: f64, which: Evaluate) -> f64 {
        match which {
            Evaluate::Cdf => self.cdf(x),
            Evaluate::Tail => self.tail(x),
            Evaluate::Revenue => self.revenue(x),
        }
    }

    /// Raw moment `E[V^k]` for `k >= 1`; `+inf` when it diverges.
    pub fn moment(&self, k: f64) -> Result<f64> {
        if !(k >= 1.0) {
            return Err(invalid("moment order", k, "must be at least 1"));
        }
        Ok(match *self {
            Distribution::Uniform01 => 1.0 / (k + 1.0),
            Distribution::Pareto { shape } => {
                if k < shape {
                    shape / (shape - k)
                } else {
                    f64::INFINITY
                }
            }
            Distribution::EqualRevenue => f64::INFINITY,
            Distribution::Eta { p } => p.powf(1.0 - k),
        })
    }

    pub fn atoms(&self) -> AtomSet {
        match *self {
            Distribution::Eta { p } => {
                let mut atoms = Vec::with_capacity(2);
                if p < 1.0 {
                    atoms.push(Atom {
                        location: 0.0,
                        mass: 1.0 - p,
                    });
                }
                atoms.push(Atom {
                    location: Self::eta_top(p),
                    mass: p,
                });
                AtomSet { atoms }
            }
            _ => AtomSet::default(),
        }
    }

    /// Open interval on which `F` is continuous and strictly increasing; `F`
    /// is constant off this interval except for jumps at atoms.
    pub fn continuous_support(&self) -> Option<(f64, f64)> {
        match *self {
            Distribution::Uniform01 => Some((0.0, 1.0)),
            Distribution::Pareto { .. } | Distribution::EqualRevenue => Some((1.0, f64::INFINITY)),
            Distribution::Eta { .. } => None,
        }
    }

    /// Points where `F` changes regime: atoms and the ends of the continuous support.
    pub(crate) fn structural_points(&self) -> Vec<f64> {
        let mut pts: Vec<f64> = self.atoms().iter().map(|a| a.location).collect();
        if let Some((lo, hi)) = self.continuous_support() {
            pts.push(lo);
            if hi.is_finite() {
                pts.push(hi);
            }
        }
        pts.sort_by(f64::total_cmp);
        pts.dedup();
        pts
    }

    /// Inverse CDF `inf { t : F(t) >= u }` for `u` in `[0, 1)`.
    pub fn quantile(&self, u: f64) -> f64 {
        match *self {
            Distribution::Uniform01 => u,
            Distribution::Pareto { shape } => (-(-u).ln_1p() / shape).exp(),
            Distribution::EqualRevenue => 1.0 / (1.0 - u),
            Distribution::Eta { p } => {
                if u < 1.0 - p {
                    0.0
                } else {
                    Self::eta_top(p)
                }
            }
        }
    }

    /// `n` i.i.d. draws from the given stream, sorted ascending.
    pub fn sample(&self, stream: StreamId, n: usize) -> Result<Sample> {
        if n == 0 {
            return Err(invalid("sample size", 0.0, "must be at least 1"));
        }
        Ok(self.sample_with(&mut stream.rng(), n))
    }

    /// `n >= 1` draws from an arbitrary generator, sorted ascending.
    pub fn sample_with<R: Rng + ?Sized>(&self, rng: &mut R, n: usize) -> Sample {
        assert!(n >= 1, "sample size must be at least 1");
        let values = (0..n).map(|_| self.quantile(rng.random::<f64>())).collect();
        Sample::from_unsorted_valid(values)
    }

    /// `(r*, p*)`: the supremum of `r` and a price attaining it.
    pub fn optimal_revenue(&self) -> (f64, f64) {
        match *self {
            Distribution::Uniform01 => (0.25, 0.5),
            Distribution::Pareto { shape } if shape < 1.0 => (f64::INFINITY, f64::INFINITY),
            Distribution::Pareto { .. } | Distribution::EqualRevenue => (1.0, 1.0),
            Distribution::Eta { p } => (1.0, Self::eta_top(p)),
        }
    }

    /// `lim r(p)` as `p -> inf`.
    pub fn revenue_at_infinity(&self) -> f64 {
        match *self {
            Distribution::Pareto { shape } if shape < 1.0 => f64::INFINITY,
            Distribution::Pareto { shape } if shape == 1.0 => 1.0,
            Distribution::EqualRevenue => 1.0,
            _ => 0.0,
        }
    }

    /// Candidate maximizers of `|c * p - r(p)|` strictly inside `(a, b)`:
    /// interior stationary points of `c * p - r(p)` plus points where the
    /// closed form of `r` changes. `b` may be `+inf`.
    pub fn revenue_critical_points(&self, slope: f64, a: f64, b: f64) -> Result<Vec<f64>> {
        if !(0.0..=1.0).contains(&slope) {
            return Err(invalid("slope", slope, "must lie in [0, 1]"));
        }
        if !(a >= 0.0 && a < b) {
            return Err(invalid("interval start", a, "need 0 <= a < b"));
        }
        let mut pts = self.structural_points();
        match *self {
            // r(p) = p(1 - p) on [0, 1].
            Distribution::Uniform01 => pts.push((1.0 - slope) / 2.0),
            // c - (1 - a) p^(-a) vanishes once when the shape is below 1.
            Distribution::Pareto { shape } if shape < 1.0 && slope > 0.0 => {
                let p = ((1.0 - shape) / slope).powf(1.0 / shape);
                if p > 1.0 {
                    pts.push(p);
                }
            }
            _ => {}
        }
        pts.retain(|&x| x > a && x < b);
        pts.sort_by(f64::total_cmp);
        pts.dedup();
        Ok(pts)
    }
}

impl fmt::Display for Distribution {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match *self {
            Distribution::Uniform01 => write!(f, "uniform"),
            Distribution::Pareto { shape } => write!(f, "pareto:a={shape}"),
            Distribution::EqualRevenue => write!(f, "equalrev"),
            Distribution::Eta { p } => write!(f, "eta:p={p}"),
        }
    }
}

impl FromStr for Distribution {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        let (family, params) = match s.split_once(':') {
            Some((fam, rest)) => (fam, Some(rest)),
            None => (s, None),
        };
        let param = |key: &str| -> Result<f64> {
            let rest = params.ok_or_else(|| Error::Parse(format!("`{s}`: missing `{key}=<real>`")))?;
            let (k, v) = rest
                .split_once('=')
                .ok_or_else(|| Error::Parse(format!("`{s}`: expected `{key}=<real>`")))?;
            if k.trim() != key {
                return Err(Error::Parse(format!("`{s}`: unknown parameter `{}`", k.trim())));
            }
            v.trim()
                .parse::<f64>()
                .map_err(|e| Error::Parse(format!("`{s}`: {e}")))
        };
        let no_params = |d: Distribution| -> Result<Distribution> {
            match params {
                None => Ok(d),
                Some(_) => Err(Error::Parse(format!("`{s}` takes no parameters"))),
            }
        };
        match family {
            "uniform" => no_params(Distribution::Uniform01),
            "equalrev" => no_params(Distribution::EqualRevenue),
            "pareto" => Distribution::pareto(param("a")?),
            "eta" => Distribution::eta(param("p")?),
            other => Err(Error::Parse(format!("unknown distribution `{other}`"))),
        }
    }
}

impl Serialize for Distribution {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for Distribution {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}
