use std::collections::BTreeMap;

use rand::distributions::{Distribution, WeightedIndex};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use super::measure::{GroupDistribution, StepMeasure};
use crate::error::{Error, Result};
use crate::fullgroup::CocycleElement;
use crate::points::Point;

/// Per-trial generator: stream `trial` of the seeded ChaCha8 generator, so
/// results do not depend on the number of trials drawn or on scheduling.
pub fn trial_rng(seed: u64, trial: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(trial);
    rng
}

fn atom_sampler(m: &StepMeasure) -> Result<WeightedIndex<f64>> {
    WeightedIndex::new(m.probabilities_f64()).map_err(|e| Error::InvalidArgument(format!("bad measure weights: {e}")))
}

/// Atom indices `h_1, …, h_n` for each trial.
pub fn sample_step_indices(m: &StepMeasure, n: usize, trials: usize, seed: u64) -> Result<Vec<Vec<usize>>> {
    let sampler = atom_sampler(m)?;
    Ok((0..trials)
        .into_par_iter()
        .map(|t| {
            let mut rng = trial_rng(seed, t as u64);
            (0..n).map(|_| sampler.sample(&mut rng)).collect()
        })
        .collect())
}

/// Sampled elements `g_n = h_n ⋯ h_1`, one per trial.
pub fn sample_group_walks(m: &StepMeasure, n: usize, trials: usize, seed: u64) -> Result<Vec<CocycleElement>> {
    let id = CocycleElement::identity(m.subshift().clone())?;
    sample_step_indices(m, n, trials, seed)?
        .into_par_iter()
        .map(|steps| {
            steps
                .iter()
                .try_fold(id.clone(), |g, &i| m.atoms()[i].compose(&g))
        })
        .collect()
}

/// Orbit trajectories `m_j = k_{g_j}(x)` of many independent walks.
#[derive(Clone, Debug)]
pub struct WalkSample {
    n: usize,
    trials: usize,
    seed: u64,
    max_shift: u64,
    increments: Vec<i8>,
    finals: Vec<i64>,
    max_abs: Vec<u64>,
}

impl WalkSample {
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn trials(&self) -> usize {
        self.trials
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    /// Lipschitz constant `K` of the step measure.
    pub fn max_shift(&self) -> u64 {
        self.max_shift
    }

    pub fn increments(&self, trial: usize) -> &[i8] {
        &self.increments[trial * self.n..(trial + 1) * self.n]
    }

    /// `m_0, …, m_n` for one trial.
    pub fn trajectory(&self, trial: usize) -> Vec<i64> {
        std::iter::once(0)
            .chain(self.increments(trial).iter().scan(0i64, |m, &d| {
                *m += d as i64;
                Some(*m)
            }))
            .collect()
    }

    pub fn finals(&self) -> &[i64] {
        &self.finals
    }

    /// `max_{j≤n} |m_j|` per trial.
    pub fn max_abs(&self) -> &[u64] {
        &self.max_abs
    }

    /// Empirical law of `m_n`.
    pub fn final_law(&self) -> BTreeMap<i64, f64> {
        let mut law = BTreeMap::new();
        for &m in &self.finals {
            *law.entry(m).or_insert(0.0) += 1.0;
        }
        law.values_mut().for_each(|v| *v /= self.trials as f64);
        law
    }
}

/// Independent orbit walks started at `p`. The increment at each step is the
/// sampled atom's cocycle at the current offset.
pub fn sample_orbit_walks(m: &StepMeasure, p: &Point, n: usize, trials: usize, seed: u64) -> Result<WalkSample> {
    if trials == 0 {
        return Err(Error::InvalidArgument("at least one trial is required".into()));
    }
    let k = m.max_shift();
    if k > i8::MAX as u64 {
        return Err(Error::InvalidArgument(format!("shift {k} does not fit the increment store")));
    }
    let reach = (n as u64 * k) as i64;
    // increments[atom][offset + reach]
    let table: Vec<Vec<i8>> = m
        .atoms()
        .iter()
        .map(|g| {
            let d = g.depth() as i64;
            p.with_segment(-reach - d, reach + d, |seg| {
                (0..=2 * reach as usize)
                    .map(|o| g.value(&seg[o..o + 2 * d as usize + 1]).map(|v| v as i8))
                    .collect::<Result<Vec<i8>>>()
            })?
        })
        .collect::<Result<_>>()?;
    let sampler = atom_sampler(m)?;
    let mut increments = vec![0i8; trials * n];
    let summaries: Vec<(i64, u64)> = if n == 0 {
        vec![(0, 0); trials]
    } else {
        increments
            .par_chunks_mut(n)
            .enumerate()
            .map(|(t, out)| {
                let mut rng = trial_rng(seed, t as u64);
                let (mut pos, mut max) = (0i64, 0u64);
                for slot in out.iter_mut() {
                    let d = table[sampler.sample(&mut rng)][(pos + reach) as usize];
                    *slot = d;
                    pos += d as i64;
                    max = max.max(pos.unsigned_abs());
                }
                (pos, max)
            })
            .collect()
    };
    let (finals, max_abs) = summaries.into_iter().unzip();
    Ok(WalkSample {
        n,
        trials,
        seed,
        max_shift: k,
        increments,
        finals,
        max_abs,
    })
}

/// Default grid for `a` in `P(max_{j≤n} |m_j| ≥ a√n)`.
pub fn default_tail_grid() -> Vec<f64> {
    (1..=16).map(|i| i as f64 * 0.25).collect()
}

/// Grid points need this many exceedances to enter the fit.
pub const MIN_EXCEEDANCES: u64 = 10;

/// Gaussian envelope `C exp(-(a - a0)² / D)`, flat at `C` below `a0`.
#[derive(Clone, Copy, Debug, Serialize)]
pub struct TailFit {
    pub c: f64,
    pub d: f64,
    pub a0: f64,
    /// factor applied to the least-squares `C` so the envelope dominates the data
    pub lift: f64,
    pub points_used: usize,
}

impl TailFit {
    pub fn envelope(&self, a: f64) -> f64 {
        let x = (a - self.a0).max(0.0);
        self.c * (-x * x / self.d).exp()
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct TailRow {
    pub a: f64,
    pub exceedances: u64,
    pub tail: f64,
    pub envelope: f64,
    /// `2 P(|m_n| ≥ (a - b0)√n)` at the fitted `b0`
    pub reflection_bound: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct TailReport {
    pub n: usize,
    pub trials: usize,
    pub fit: TailFit,
    pub b0: f64,
    pub rows: Vec<TailRow>,
}

impl TailReport {
    /// Whether the envelope dominates the empirical tail at every grid point.
    pub fn envelope_dominates(&self) -> bool {
        self.rows.iter().all(|r| r.tail <= r.envelope * (1.0 + 1e-12))
    }

    pub fn reflection_holds(&self) -> bool {
        self.rows.iter().all(|r| r.tail <= r.reflection_bound)
    }
}

/// Empirical maximal-displacement tail, Gaussian envelope fit and reflection check.
///
/// The fit is weighted least squares of `ln P` against a quadratic in `a`,
/// weights equal to exceedance counts, over grid points with at least
/// [`MIN_EXCEEDANCES`] exceedances.
pub fn max_displacement_tail(sample: &WalkSample, grid: &[f64]) -> Result<TailReport> {
    let n = sample.n();
    if n == 0 || grid.is_empty() {
        return Err(Error::InsufficientData("tail needs n ≥ 1 and a nonempty grid".into()));
    }
    let root = (n as f64).sqrt();
    let trials = sample.trials() as f64;
    let counts: Vec<u64> = grid
        .iter()
        .map(|&a| sample.max_abs().iter().filter(|&&m| m as f64 >= a * root).count() as u64)
        .collect();
    let tails: Vec<f64> = counts.iter().map(|&c| c as f64 / trials).collect();
    let pts: Vec<(f64, f64, f64)> = grid
        .iter()
        .zip(&counts)
        .filter(|(_, &c)| c >= MIN_EXCEEDANCES)
        .map(|(&a, &c)| (a, (c as f64 / trials).ln(), c as f64))
        .collect();
    if pts.len() < 3 {
        return Err(Error::InsufficientData(format!(
            "only {} grid points have at least {MIN_EXCEEDANCES} exceedances",
            pts.len()
        )));
    }
    let [b0, b1, b2] = weighted_quadratic_fit(&pts)?;
    if b2 >= 0.0 {
        return Err(Error::InsufficientData("empirical tail is not log-concave on the grid".into()));
    }
    let d = -1.0 / b2;
    let a0 = b1 * d / 2.0;
    let mut fit = TailFit {
        c: (b0 + a0 * a0 / d).exp(),
        d,
        a0,
        lift: 1.0,
        points_used: pts.len(),
    };
    let lift = grid
        .iter()
        .zip(&tails)
        .map(|(&a, &t)| t / fit.envelope(a))
        .fold(1.0f64, f64::max);
    fit.c *= lift;
    fit.lift = lift;

    let finals_abs: Vec<u64> = sample.finals().iter().map(|m| m.unsigned_abs()).collect();
    let final_tail = |x: f64| {
        if x <= 0.0 {
            1.0
        } else {
            finals_abs.iter().filter(|&&m| m as f64 >= x).count() as f64 / trials
        }
    };
    let b0_grid = (0..=80).map(|i| i as f64 * 0.05);
    let mut b0_hat = 4.0;
    for b in b0_grid {
        if grid
            .iter()
            .zip(&tails)
            .all(|(&a, &t)| t <= 2.0 * final_tail((a - b) * root))
        {
            b0_hat = b;
            break;
        }
    }
    let rows = grid
        .iter()
        .zip(counts.iter().zip(&tails))
        .map(|(&a, (&c, &t))| TailRow {
            a,
            exceedances: c,
            tail: t,
            envelope: fit.envelope(a),
            reflection_bound: 2.0 * final_tail((a - b0_hat) * root),
        })
        .collect();
    Ok(TailReport {
        n,
        trials: sample.trials(),
        fit,
        b0: b0_hat,
        rows,
    })
}

fn weighted_quadratic_fit(pts: &[(f64, f64, f64)]) -> Result<[f64; 3]> {
    // normal equations for y ≈ b0 + b1 a + b2 a²
    let mut m = [[0.0f64; 4]; 3];
    for &(a, y, w) in pts {
        let basis = [1.0, a, a * a];
        for i in 0..3 {
            for j in 0..3 {
                m[i][j] += w * basis[i] * basis[j];
            }
            m[i][3] += w * basis[i] * y;
        }
    }
    for col in 0..3 {
        let pivot = (col..3)
            .max_by(|&a, &b| m[a][col].abs().total_cmp(&m[b][col].abs()))
            .expect("nonempty range");
        if m[pivot][col].abs() < 1e-300 {
            return Err(Error::InsufficientData("degenerate tail fit".into()));
        }
        m.swap(col, pivot);
        for row in 0..3 {
            if row != col {
                let f = m[row][col] / m[col][col];
                for k in col..4 {
                    m[row][k] -= f * m[col][k];
                }
            }
        }
    }
    Ok([m[0][3] / m[0][0], m[1][3] / m[1][1], m[2][3] / m[2][2]])
}

/// `−(1/n) ln μ^{*n}(g_n)` along sampled paths.
pub fn shannon_diagnostic(m: &StepMeasure, dist: &GroupDistribution, trials: usize, seed: u64) -> Result<Vec<f64>> {
    let n = dist.step();
    if n == 0 {
        return Err(Error::InvalidArgument("diagnostic needs n ≥ 1".into()));
    }
    sample_group_walks(m, n, trials, seed)?
        .iter()
        .map(|g| {
            let p = super::measure::ratio_to_f64(&dist.probability(g));
            if p > 0.0 {
                Ok(-p.ln() / n as f64)
            } else {
                Err(Error::Internal("sampled element outside the exact support".into()))
            }
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fullgroup::{fibonacci_generators, fibonacci_subshift};

    fn fib() -> (StepMeasure, Point) {
        let s = fibonacci_subshift();
        let m = StepMeasure::uniform(&fibonacci_generators(&s).unwrap()).unwrap();
        (m, Point::default_for(s).unwrap())
    }

    #[test]
    fn quadratic_fit_recovers_parabola() {
        let pts: Vec<(f64, f64, f64)> = (0..6)
            .map(|i| {
                let a = i as f64 * 0.5;
                (a, 0.3 - (a - 0.7).powi(2) / 1.5, 1.0 + i as f64)
            })
            .collect();
        let [b0, b1, b2] = weighted_quadratic_fit(&pts).unwrap();
        let d = -1.0 / b2;
        assert!((d - 1.5).abs() < 1e-9);
        assert!((b1 * d / 2.0 - 0.7).abs() < 1e-9);
        assert!((b0 + 0.49 / 1.5 - 0.3).abs() < 1e-9);
    }

    #[test]
    fn one_step_is_lazy_and_reproducible() {
        let (m, p) = fib();
        let s = sample_orbit_walks(&m, &p, 1, 30_000, 7).unwrap();
        let law = s.final_law();
        for k in [-1, 0, 1] {
            assert!((law[&k] - 1.0 / 3.0).abs() < 0.015, "{law:?}");
        }
        let again = sample_orbit_walks(&m, &p, 1, 30_000, 7).unwrap();
        assert_eq!(s.finals(), again.finals());
        // a prefix of trials is unchanged by drawing more of them
        let more = sample_orbit_walks(&m, &p, 1, 40_000, 7).unwrap();
        assert_eq!(&more.finals()[..30_000], s.finals());
    }

    #[test]
    fn identity_measure_stays_put() {
        let s = fibonacci_subshift();
        let m = StepMeasure::point_mass(s.clone()).unwrap();
        let w = sample_orbit_walks(&m, &Point::default_for(s).unwrap(), 20, 50, 1).unwrap();
        assert!(w.max_abs().iter().all(|&x| x == 0));
    }

    #[test]
    fn increments_are_lipschitz() {
        let (m, p) = fib();
        let w = sample_orbit_walks(&m, &p, 50, 200, 3).unwrap();
        for t in 0..w.trials() {
            let traj = w.trajectory(t);
            assert_eq!(*traj.last().unwrap(), w.finals()[t]);
            assert!(traj.windows(2).all(|x| (x[1] - x[0]).unsigned_abs() <= w.max_shift()));
        }
    }

    #[test]
    fn group_walks_agree_with_orbit_walks() {
        let (m, p) = fib();
        let gs = sample_group_walks(&m, 8, 200, 11).unwrap();
        let w = sample_orbit_walks(&m, &p, 8, 200, 11).unwrap();
        for (g, &f) in gs.iter().zip(w.finals()) {
            assert_eq!(g.evaluate(&p, 0).unwrap(), f);
        }
    }

    #[test]
    fn tail_report_on_lazy_walk() {
        let (m, p) = fib();
        let w = sample_orbit_walks(&m, &p, 100, 20_000, 5).unwrap();
        let r = max_displacement_tail(&w, &default_tail_grid()).unwrap();
        assert!(r.envelope_dominates());
        assert!(r.reflection_holds());
        assert!(r.fit.d > 0.0);
    }
}
