use num_rational::BigRational;
use num_traits::Zero;
use serde::Serialize;

use super::measure::{ratio_to_f64, GroupDistribution, StepMeasure};
use super::sampling::{sample_group_walks, TailFit};
use crate::error::{Error, Result};
use crate::fullgroup::Ball;
use crate::symbolic::Subshift;

/// Cylinder depth `d(n) = ⌈√(L n ln n)⌉`, with `d(1) = d(2)` and `d(0) = 0`.
pub fn an_depth(n: usize, l: f64) -> usize {
    match n {
        0 => 0,
        _ => {
            let n = n.max(2) as f64;
            (l * n * n.ln()).sqrt().ceil() as usize
        }
    }
}

/// Where the count of `A_n` came from.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum AnSource {
    /// the ball `B(n)` filtered by depth
    Ball,
    /// only the support of `μ^{*n}` was available
    Support,
}

#[derive(Clone, Debug, Serialize)]
pub struct AnReport {
    pub n: usize,
    pub l: f64,
    pub depth: usize,
    #[serde(serialize_with = "ratio_string")]
    pub mu_an: BigRational,
    pub an_in_support: usize,
    pub an_size: usize,
    pub an_source: AnSource,
    pub support_size: usize,
    pub entropy: f64,
    /// `ρ(2d + 1) · ln(2Kn + 1)`, the log of the table-counting bound on `|A_n|`
    pub log_cardinality_bound: f64,
    /// `ln|A_n| + n(1 − μ(A_n)) ln|S| + ln 2`
    pub entropy_bound: f64,
    pub slack: f64,
}

fn ratio_string<S: serde::Serializer>(q: &BigRational, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.serialize_str(&q.to_string())
}

/// Exact mass of the set `A_n` of elements constant on every cylinder of depth
/// `d(n)`, and the entropy bound it yields.
///
/// `ball`, when given with radius at least `n` over the support of `m`,
/// supplies `|A_n|`; otherwise the support of `dist` is used.
pub fn an_report(subshift: &Subshift, m: &StepMeasure, dist: &GroupDistribution, l: f64, ball: Option<&Ball>) -> Result<AnReport> {
    let n = dist.step();
    if n == 0 || !(l > 0.0) {
        return Err(Error::InvalidArgument("the A_n report needs n ≥ 1 and L > 0".into()));
    }
    let depth = an_depth(n, l);
    let mut mu = BigRational::zero();
    let mut in_support = 0;
    for (g, p) in dist.iter() {
        if g.is_constant_on_depth(depth) {
            mu += p;
            in_support += 1;
        }
    }
    let (an_size, an_source) = match ball {
        Some(b) if b.radius() >= n => (
            b.iter().filter(|(g, len)| *len <= n && g.is_constant_on_depth(depth)).count(),
            AnSource::Ball,
        ),
        _ => (in_support, AnSource::Support),
    };
    let k = m.max_shift() as f64;
    let log_cardinality_bound = subshift.complexity(2 * depth + 1)? as f64 * (2.0 * k * n as f64 + 1.0).ln();
    let entropy = dist.entropy();
    let mu_f = ratio_to_f64(&mu);
    let entropy_bound = (an_size.max(1) as f64).ln() + n as f64 * (1.0 - mu_f) * (m.len() as f64).ln() + 2f64.ln();
    Ok(AnReport {
        n,
        l,
        depth,
        mu_an: mu,
        an_in_support: in_support,
        an_size,
        an_source,
        support_size: dist.len(),
        entropy,
        log_cardinality_bound,
        entropy_bound,
        slack: entropy_bound - entropy,
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct ReturnRow {
    pub n: usize,
    #[serde(serialize_with = "ratio_string")]
    pub return_probability: BigRational,
    #[serde(serialize_with = "ratio_string")]
    pub max_probability: BigRational,
    pub identity_is_max: bool,
    pub nonincreasing: bool,
}

/// `μ^{*2n}(e)` against `max_g μ^{*2n}(g)` for `n = 1..=n_max`.
///
/// `powers` must hold `μ^{*0}, …, μ^{*2 n_max}`.
pub fn return_probability_suite(powers: &[GroupDistribution], n_max: usize) -> Result<Vec<ReturnRow>> {
    if n_max == 0 || powers.len() < 2 * n_max + 1 {
        return Err(Error::InvalidArgument(format!(
            "need convolution powers up to {} for n_max = {n_max}",
            2 * n_max
        )));
    }
    let mut rows: Vec<ReturnRow> = Vec::with_capacity(n_max);
    for n in 1..=n_max {
        let d = &powers[2 * n];
        let id = d
            .iter()
            .find(|(g, _)| g.is_identity())
            .map(|(_, p)| p.clone())
            .unwrap_or_else(BigRational::zero);
        let max = d.max_probability();
        let nonincreasing = rows.last().map_or(true, |r| id <= r.return_probability);
        rows.push(ReturnRow {
            n,
            identity_is_max: id == max,
            return_probability: id,
            max_probability: max,
            nonincreasing,
        });
    }
    Ok(rows)
}

#[derive(Clone, Debug, Serialize)]
pub struct EnvelopeRow {
    pub n: usize,
    pub entropy: f64,
    pub entropy_per_step: f64,
    pub bound: f64,
    pub slack: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct EntropyEnvelope {
    pub c: f64,
    pub rows: Vec<EnvelopeRow>,
}

/// Grid searched for the envelope constant.
pub fn default_envelope_grid() -> Vec<f64> {
    (1..=400).map(|i| i as f64 * 0.25).collect()
}

/// `C ρ(⌈C √(n ln n)⌉) ln n` for the smallest grid `C` dominating every
/// computed `H(μ^{*n})`, `n ≥ 2`.
pub fn entropy_envelope(subshift: &Subshift, powers: &[GroupDistribution], grid: &[f64]) -> Result<EntropyEnvelope> {
    let entropies: Vec<(usize, f64)> = powers
        .iter()
        .filter(|d| d.step() >= 2)
        .map(|d| (d.step(), d.entropy()))
        .collect();
    if entropies.is_empty() {
        return Err(Error::InvalidArgument("envelope needs powers with n ≥ 2".into()));
    }
    let bound = |c: f64, n: usize| -> Result<f64> {
        let n_f = n as f64;
        let arg = (c * (n_f * n_f.ln()).sqrt()).ceil() as usize;
        Ok(c * subshift.complexity(arg)? as f64 * n_f.ln())
    };
    let mut chosen = None;
    for &c in grid {
        let mut ok = true;
        for &(n, h) in &entropies {
            if h > bound(c, n)? {
                ok = false;
                break;
            }
        }
        if ok {
            chosen = Some(c);
            break;
        }
    }
    let c = chosen.ok_or_else(|| Error::InsufficientData("no grid constant dominates the entropies".into()))?;
    let rows = entropies
        .iter()
        .map(|&(n, h)| {
            let b = bound(c, n)?;
            Ok(EnvelopeRow {
                n,
                entropy: h,
                entropy_per_step: h / n as f64,
                bound: b,
                slack: b - h,
            })
        })
        .collect::<Result<_>>()?;
    Ok(EntropyEnvelope { c, rows })
}

/// `C2 exp(C2 n^{2α/(2−α)+ε})`.
pub fn folner_bound(alpha: f64, epsilon: f64, c2: f64, n: f64) -> Result<f64> {
    if !(1.0..2.0).contains(&alpha) {
        return Err(Error::DomainError(format!("alpha = {alpha} is outside [1, 2)")));
    }
    if !(epsilon > 0.0) {
        return Err(Error::DomainError("epsilon must be positive".into()));
    }
    Ok(c2 * (c2 * n.powf(folner_exponent(alpha, epsilon))).exp())
}

pub fn folner_exponent(alpha: f64, epsilon: f64) -> f64 {
    2.0 * alpha / (2.0 - alpha) + epsilon
}

#[derive(Clone, Debug, Serialize)]
pub struct CylinderRow {
    pub cylinder: String,
    pub nonconstant_fraction: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct SingleCylinderReport {
    pub n: usize,
    pub depth: usize,
    pub bound: f64,
    pub worst: f64,
    pub holds: bool,
    pub rows: Vec<CylinderRow>,
}

/// For each cylinder of depth `d(n)`, the fraction of sampled `g_n` whose
/// cocycle is not constant on it, against `C1 n^{−L/(4D)}` with `C1`, `D`
/// taken from a tail fit.
pub fn single_cylinder_check(m: &StepMeasure, n: usize, l: f64, fit: &TailFit, trials: usize, seed: u64) -> Result<SingleCylinderReport> {
    let depth = an_depth(n, l);
    let samples = sample_group_walks(m, n, trials, seed)?;
    let bound = fit.c * (n.max(1) as f64).powf(-l / (4.0 * fit.d));
    let mut rows = Vec::new();
    for w in m.subshift().factors(2 * depth + 1)?.iter() {
        let mut bad = 0usize;
        for g in &samples {
            if !g.is_constant_on_cylinder(w.as_bytes())? {
                bad += 1;
            }
        }
        rows.push(CylinderRow {
            cylinder: w.to_string(),
            nonconstant_fraction: bad as f64 / trials.max(1) as f64,
        });
    }
    let worst = rows.iter().map(|r| r.nonconstant_fraction).fold(0.0, f64::max);
    Ok(SingleCylinderReport {
        n,
        depth,
        bound,
        worst,
        holds: worst <= bound,
        rows,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fullgroup::{ball_of, fibonacci_generators, fibonacci_subshift};
    use crate::randwalk::convolution_powers;

    #[test]
    fn depth_formula() {
        assert_eq!(an_depth(1, 9.0), an_depth(2, 9.0));
        assert_eq!(an_depth(12, 9.0), (9.0f64 * 12.0 * 12f64.ln()).sqrt().ceil() as usize);
    }

    #[test]
    fn an_report_fibonacci() {
        let s = fibonacci_subshift();
        let m = StepMeasure::uniform(&fibonacci_generators(&s).unwrap()).unwrap();
        let powers = convolution_powers(&m, 6, 100_000).unwrap();
        let b = ball_of(&s, m.atoms(), 6, 100_000).unwrap();
        let r = an_report(&s, &m, &powers[6], 9.0, Some(&b)).unwrap();
        assert!(r.slack >= 0.0);
        assert_eq!(r.an_source, AnSource::Ball);
        // a tiny L shrinks d(n) and with it A_n
        let small = an_report(&s, &m, &powers[6], 0.01, Some(&b)).unwrap();
        assert!(small.mu_an <= r.mu_an);
    }

    #[test]
    fn returns_fibonacci() {
        let s = fibonacci_subshift();
        let m = StepMeasure::uniform(&fibonacci_generators(&s).unwrap()).unwrap();
        let powers = convolution_powers(&m, 6, 100_000).unwrap();
        let rows = return_probability_suite(&powers, 3).unwrap();
        assert_eq!(rows[0].return_probability, BigRational::new(1.into(), 3.into()));
        assert!(rows.iter().all(|r| r.identity_is_max && r.nonincreasing));
    }

    #[test]
    fn envelope_for_point_mass() {
        let s = fibonacci_subshift();
        let m = StepMeasure::point_mass(s.clone()).unwrap();
        let powers = convolution_powers(&m, 4, 10).unwrap();
        let env = entropy_envelope(&s, &powers, &default_envelope_grid()).unwrap();
        assert_eq!(env.c, 0.25);
        assert!(env.rows.iter().all(|r| r.entropy == 0.0));
    }

    #[test]
    fn folner_examples() {
        assert!((folner_exponent(1.0, 0.01) - 2.01).abs() < 1e-12);
        assert!((folner_exponent(1.5, 0.0) - 6.0).abs() < 1e-12);
        assert!((folner_bound(1.2, 0.1, 2.0, 1.0).unwrap() - 2.0 * 2f64.exp()).abs() < 1e-9);
        assert!(matches!(folner_bound(2.0, 0.1, 1.0, 3.0), Err(Error::DomainError(_))));
    }
}
