//! Posted-price revenue: empirical curves, the exact estimation error
//! `sup_p |r_n(p) - r(p)|`, ERM pricing and regret.

use std::io::Write;

use serde::{Deserialize, Serialize};

use crate::distributions::Distribution;
use crate::empirical::Sample;
use crate::error::{invalid, Error, Result};

/// Empirical revenue `r_n(p) = p * q_n(p)`.
pub fn emp_revenue(sample: &Sample, price: f64) -> f64 {
    if price <= 0.0 {
        0.0
    } else {
        price * sample.tail(price)
    }
}

/// One piece `(left, right]` of the empirical revenue curve, on which
/// `q_n` is the constant `tail` and `r_n(p) = slope * p`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RevenueStep {
    pub piece: usize,
    pub left: f64,
    pub right: f64,
    pub tail: f64,
    pub slope: f64,
}

/// The empirical revenue curve as a list of linear pieces, ending with the
/// unbounded piece beyond the largest sample where `r_n = 0`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RevenueCurve {
    pub steps: Vec<RevenueStep>,
}

impl RevenueCurve {
    pub fn new(sample: &Sample) -> Self {
        let values = sample.values();
        let n = values.len() as f64;
        let mut steps = Vec::new();
        let mut left = 0.0;
        let mut i = 0;
        while i < values.len() {
            let right = values[i];
            let tail = (values.len() - i) as f64 / n;
            if right > left || (i == 0 && right == 0.0) {
                steps.push(RevenueStep {
                    piece: steps.len(),
                    left,
                    right,
                    tail,
                    slope: tail,
                });
            }
            left = right;
            while i < values.len() && values[i] == right {
                i += 1;
            }
        }
        steps.push(RevenueStep {
            piece: steps.len(),
            left,
            right: f64::INFINITY,
            tail: 0.0,
            slope: 0.0,
        });
        Self { steps }
    }

    /// Writes `piece,left,right,tail,slope` rows.
    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        for step in &self.steps {
            w.serialize(step)?;
        }
        w.flush().map_err(csv::Error::from)?;
        Ok(())
    }
}

/// Exact `sup_{p >= 0} |r_n(p) - r(p)|`, possibly `+inf`.
///
/// Cuts at `0`, every sample value and every structural point of `dist`.
/// On an open gap `(a, b)` the empirical tail is a constant `c`, so the gap
/// contributes the one-sided limits of `c p - r(p)` at `a` and `b` and its
/// value at interior critical points.
pub fn revenue_error(sample: &Sample, dist: &Distribution) -> f64 {
    let values = sample.values();
    let n = values.len() as f64;
    let mut cuts = Vec::with_capacity(values.len() + 4);
    cuts.push(0.0);
    cuts.extend_from_slice(values);
    cuts.extend(dist.structural_points());
    cuts.sort_by(f64::total_cmp);
    cuts.dedup();

    let mut worst = 0.0f64;
    let mut lt = 0usize;
    for (i, &b) in cuts.iter().enumerate() {
        // lt = #{v < b}; on the gap ending at b the tail is #{v >= b} / n.
        while lt < values.len() && values[lt] < b {
            lt += 1;
        }
        let c = (values.len() - lt) as f64 / n;
        if i > 0 {
            let a = cuts[i - 1];
            worst = worst.max(gap_sup(dist, c, a, b, a * dist.survival(a), b * dist.tail(b)));
        }
        worst = worst.max((b * c - dist.revenue(b)).abs());
    }
    // Beyond the last cut the empirical tail is zero.
    let last = *cuts.last().expect("cuts contain 0");
    let beyond = dist.revenue_at_infinity().max(last * dist.survival(last));
    worst = worst.max(gap_sup(dist, 0.0, last, f64::INFINITY, beyond, beyond));
    worst
}

fn gap_sup(dist: &Distribution, c: f64, a: f64, b: f64, r_left: f64, r_right: f64) -> f64 {
    let mut sup = (c * a - r_left).abs();
    if b.is_finite() {
        sup = sup.max((c * b - r_right).abs());
    } else {
        sup = sup.max(r_right);
    }
    let critical = dist
        .revenue_critical_points(c, a, b)
        .expect("c is a tail fraction and a < b");
    for p in critical {
        sup = sup.max((c * p - dist.revenue(p)).abs());
    }
    sup
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum PriceMode {
    /// Any empirical revenue maximizer.
    Erm,
    /// Maximizer among prices at most the `ceil(sqrt(n))`-th largest sample.
    Guarded,
}

impl std::str::FromStr for PriceMode {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "erm" => Ok(PriceMode::Erm),
            "guarded" => Ok(PriceMode::Guarded),
            other => Err(Error::Parse(format!("unknown price mode `{other}` (expected erm|guarded)"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PriceReport {
    pub price: f64,
    pub empirical_revenue: f64,
    /// `r(price)`, filled in by [`PriceReport::with_truth`].
    pub true_revenue: Option<f64>,
    pub mode: PriceMode,
}

impl PriceReport {
    pub fn with_truth(mut self, dist: &Distribution) -> Self {
        self.true_revenue = Some(dist.revenue(self.price));
        self
    }
}

/// Default guard index `ceil(sqrt(n))`.
pub fn default_guard(n: usize) -> usize {
    let r = n.isqrt();
    if r * r == n {
        r
    } else {
        r + 1
    }
}

/// ERM price over the sample values. `r_n` is increasing on each piece
/// `(v_(j), v_(j+1)]`, so restricting to sample values loses nothing. Ties go
/// to the smallest price.
pub fn pick_price(sample: &Sample, mode: PriceMode) -> PriceReport {
    match mode {
        PriceMode::Erm => best_price(sample, sample.len(), PriceMode::Erm),
        PriceMode::Guarded => best_price(sample, sample.len() + 1 - default_guard(sample.len()), PriceMode::Guarded),
    }
}

/// Guarded ERM with an explicit guard index `1 <= guard <= n`: candidates are
/// the sample values at most the `guard`-th largest.
pub fn pick_price_guarded(sample: &Sample, guard: usize) -> Result<PriceReport> {
    if guard == 0 || guard > sample.len() {
        return Err(invalid("guard", guard as f64, "must lie in [1, n]"));
    }
    Ok(best_price(sample, sample.len() + 1 - guard, PriceMode::Guarded))
}

/// Maximizes over the first `count` order statistics.
fn best_price(sample: &Sample, count: usize, mode: PriceMode) -> PriceReport {
    let values = sample.values();
    let n = values.len() as f64;
    let mut best = (0.0, f64::NEG_INFINITY);
    for (i, &v) in values[..count].iter().enumerate() {
        if i > 0 && values[i - 1] == v {
            continue;
        }
        let r = v * ((values.len() - i) as f64 / n);
        if r > best.1 {
            best = (v, r);
        }
    }
    PriceReport {
        price: best.0,
        empirical_revenue: best.1,
        true_revenue: None,
        mode,
    }
}

/// `r* - r(price)`; an error when `r*` is infinite.
pub fn regret(dist: &Distribution, price: f64) -> Result<f64> {
    if !(price >= 0.0) {
        return Err(invalid("price", price, "must be nonnegative"));
    }
    let (best, _) = dist.optimal_revenue();
    if !best.is_finite() {
        return Err(Error::Infeasible(format!("{dist} has unbounded revenue")));
    }
    Ok(best - dist.revenue(price))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::stream::StreamId;
    use proptest::prelude::*;

    fn s(v: &[f64]) -> Sample {
        Sample::new(v.to_vec()).unwrap()
    }

    #[test]
    fn empirical_revenue_examples() {
        let x = s(&[1.0, 2.0, 2.0, 5.0]);
        assert_eq!(emp_revenue(&x, 2.0), 1.5);
        assert_eq!(emp_revenue(&x, 3.0), 0.75);
        assert_eq!(emp_revenue(&x, 6.0), 0.0);
        assert_eq!(emp_revenue(&x, 0.0), 0.0);
    }

    #[test]
    fn curve_steps() {
        let c = RevenueCurve::new(&s(&[1.0, 2.0, 2.0, 5.0]));
        let tails: Vec<f64> = c.steps.iter().map(|st| st.tail).collect();
        assert_eq!(tails, vec![1.0, 0.75, 0.25, 0.0]);
        assert_eq!(c.steps[1].left, 1.0);
        assert_eq!(c.steps[1].right, 2.0);
        assert_eq!(c.steps[3].right, f64::INFINITY);
        for w in c.steps.windows(2) {
            assert!(w[1].tail < w[0].tail);
        }
        let mut buf = Vec::new();
        c.write_csv(&mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert!(text.starts_with("piece,left,right,tail,slope\n0,0.0,1.0,1.0,1.0\n"), "{text}");
    }

    #[test]
    fn curve_with_zero_value() {
        let c = RevenueCurve::new(&s(&[0.0, 0.0, 3.0]));
        assert_eq!(c.steps.len(), 3);
        assert_eq!((c.steps[0].left, c.steps[0].right, c.steps[0].tail), (0.0, 0.0, 1.0));
        assert_eq!(c.steps[1].tail, 1.0 / 3.0);
    }

    #[test]
    fn revenue_error_examples() {
        assert!((revenue_error(&s(&[0.5]), &Distribution::Uniform01) - 0.25).abs() < 1e-15);
        assert_eq!(revenue_error(&s(&[1.0, 1.0]), &Distribution::EqualRevenue), 1.0);
        assert_eq!(revenue_error(&s(&[3.0]), &Distribution::pareto(0.5).unwrap()), f64::INFINITY);
        // Eta(0.5): r = p on (0, 2], 0 beyond. Sample {2, 2} gives r_n = p on (0, 2].
        assert_eq!(revenue_error(&s(&[2.0, 2.0]), &Distribution::eta(0.5).unwrap()), 1.0);
        assert_eq!(revenue_error(&s(&[0.0, 2.0]), &Distribution::eta(0.5).unwrap()), 0.0);
    }

    #[test]
    fn pricing_examples() {
        let x = s(&[1.0, 2.0, 2.0, 5.0]);
        let erm = pick_price(&x, PriceMode::Erm);
        assert_eq!((erm.price, erm.empirical_revenue), (2.0, 1.5));
        let g = pick_price(&x, PriceMode::Guarded);
        assert_eq!((g.price, g.empirical_revenue), (2.0, 1.5));
        for mode in [PriceMode::Erm, PriceMode::Guarded] {
            assert_eq!(pick_price(&s(&[3.5]), mode).price, 3.5);
        }
        // Guard excludes the lone large value.
        let y = s(&[1.0, 1.0, 1.0, 1.0, 100.0]);
        assert_eq!(pick_price(&y, PriceMode::Erm).price, 100.0);
        assert_eq!(pick_price(&y, PriceMode::Guarded).price, 1.0);
        assert_eq!(pick_price_guarded(&y, 1).unwrap().price, 100.0);
        assert!(pick_price_guarded(&y, 6).is_err());
        // Ties go to the smallest price.
        assert_eq!(pick_price(&s(&[1.0, 2.0]), PriceMode::Erm).price, 1.0);
        let t = pick_price(&x, PriceMode::Erm).with_truth(&Distribution::EqualRevenue);
        assert_eq!(t.true_revenue, Some(1.0));
    }

    #[test]
    fn guard_index() {
        let expect = [(1, 1), (2, 2), (4, 2), (5, 3), (9, 3), (10, 4), (100, 10), (101, 11)];
        for (n, g) in expect {
            assert_eq!(default_guard(n), g, "n = {n}");
        }
    }

    #[test]
    fn regret_examples() {
        assert_eq!(regret(&Distribution::Uniform01, 0.5).unwrap(), 0.0);
        assert_eq!(regret(&Distribution::eta(0.1).unwrap(), 10.0).unwrap(), 0.0);
        assert_eq!(regret(&Distribution::EqualRevenue, 7.0).unwrap(), 0.0);
        assert!((regret(&Distribution::pareto(2.0).unwrap(), 2.0).unwrap() - 0.5).abs() < 1e-15);
        assert!(regret(&Distribution::pareto(0.5).unwrap(), 2.0).is_err());
    }

    fn zoo() -> Vec<Distribution> {
        vec![
            Distribution::Uniform01,
            Distribution::pareto(2.0).unwrap(),
            Distribution::pareto(3.0).unwrap(),
            Distribution::pareto(1.0).unwrap(),
            Distribution::EqualRevenue,
            Distribution::eta(0.1).unwrap(),
            Distribution::eta(0.5).unwrap(),
            Distribution::eta(1.0).unwrap(),
        ]
    }

    /// Brute force: grid plus every cut and its near neighbours, plus far-out prices.
    fn oracle(sample: &Sample, dist: &Distribution) -> f64 {
        let gap = |p: f64| (emp_revenue(sample, p) - dist.revenue(p)).abs();
        let mut probes: Vec<f64> = sample.values().to_vec();
        probes.extend([0.0, 1.0, 0.5, 10.0, 1.0 / 0.1, 2.0, 1e6, 1e9]);
        let top = 2.0 * sample.max().max(10.0);
        probes.extend((0..=20_000).map(|i| top * i as f64 / 20_000.0));
        probes.extend((0..=100_000).map(|i| i as f64 / 100_000.0));
        let mut out = 0.0f64;
        for &p in &probes {
            for d in [-1e-11, 0.0, 1e-11] {
                let x = p + d * p.max(1.0);
                if x >= 0.0 {
                    out = out.max(gap(x));
                }
            }
        }
        out
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]

        #[test]
        fn matches_brute_force(seed in any::<u64>(), n in 1usize..15, which in 0usize..8) {
            let dist = zoo()[which];
            let sample = dist.sample(StreamId::new(seed, 0), n).unwrap();
            let exact = revenue_error(&sample, &dist);
            let brute = oracle(&sample, &dist);
            prop_assert!(exact >= brute - 1e-9, "exact {} < brute {}", exact, brute);
            prop_assert!(exact <= brute + 1e-6, "exact {} > brute {}", exact, brute);
        }

        #[test]
        fn erm_regret_within_twice_error(seed in any::<u64>(), n in 1usize..60, which in 0usize..8) {
            let dist = zoo()[which];
            let sample = dist.sample(StreamId::new(seed, 1), n).unwrap();
            let err = revenue_error(&sample, &dist);
            let report = pick_price(&sample, PriceMode::Erm);
            prop_assert!(regret(&dist, report.price).unwrap() <= 2.0 * err + 1e-12);
        }

        #[test]
        fn erm_dominates_every_price(seed in any::<u64>(), n in 1usize..40, probe in 0.0f64..20.0) {
            let sample = Distribution::pareto(2.0).unwrap().sample(StreamId::new(seed, 2), n).unwrap();
            let best = pick_price(&sample, PriceMode::Erm);
            prop_assert!(best.empirical_revenue >= emp_revenue(&sample, probe));
            prop_assert_eq!(best.empirical_revenue, emp_revenue(&sample, best.price));
            let guarded = pick_price(&sample, PriceMode::Guarded);
            prop_assert!(guarded.empirical_revenue <= best.empirical_revenue);
        }

        #[test]
        fn equal_revenue_error_at_least_one(seed in any::<u64>(), n in 1usize..200) {
            let sample = Distribution::EqualRevenue.sample(StreamId::new(seed, 3), n).unwrap();
            prop_assert!(revenue_error(&sample, &Distribution::EqualRevenue) >= 1.0);
        }
    }
}
