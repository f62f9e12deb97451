use std::collections::{BTreeMap, HashMap};
use std::sync::Arc;

use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::fullgroup::{CocycleElement, GeneratorSet};
use crate::points::Point;
use crate::symbolic::Subshift;

/// Default cap on the support size of a convolution power.
pub const DEFAULT_SUPPORT_CAP: usize = 2_000_000;

/// A symmetric, finitely supported probability measure on the full group.
#[derive(Clone, Debug)]
pub struct StepMeasure {
    subshift: Arc<Subshift>,
    names: Vec<String>,
    atoms: Vec<CocycleElement>,
    probabilities: Vec<BigRational>,
}

impl StepMeasure {
    pub fn new(subshift: Arc<Subshift>, atoms: Vec<(String, CocycleElement, BigRational)>) -> Result<Self> {
        if atoms.is_empty() {
            return Err(Error::InvalidArgument("measure has no atoms".into()));
        }
        let mut m = StepMeasure {
            subshift,
            names: Vec::new(),
            atoms: Vec::new(),
            probabilities: Vec::new(),
        };
        for (name, g, p) in atoms {
            if g.subshift().spec() != m.subshift.spec() {
                return Err(Error::SpecMismatch(format!("atom '{name}' lives on another subshift")));
            }
            if p <= BigRational::zero() {
                return Err(Error::InvalidArgument(format!("atom '{name}' has nonpositive probability")));
            }
            if m.atoms.contains(&g) {
                return Err(Error::InvalidArgument(format!("atom '{name}' repeats an earlier element")));
            }
            m.names.push(name);
            m.atoms.push(g);
            m.probabilities.push(p);
        }
        let total: BigRational = m.probabilities.iter().sum();
        if (ratio_to_f64(&total) - 1.0).abs() > 1e-12 {
            return Err(Error::InvalidArgument(format!("probabilities sum to {total}, not 1")));
        }
        for (i, g) in m.atoms.iter().enumerate() {
            let inv = g.inverse()?;
            match m.atoms.iter().position(|h| *h == inv) {
                Some(j) if m.probabilities[j] == m.probabilities[i] => {}
                _ => {
                    return Err(Error::InvalidArgument(format!(
                        "measure is not symmetric at atom '{}'",
                        m.names[i]
                    )))
                }
            }
        }
        Ok(m)
    }

    /// Equidistributed measure on `gens ∪ gens⁻¹`.
    pub fn uniform(gens: &GeneratorSet) -> Result<Self> {
        let sym = gens.symmetrized()?;
        if sym.is_empty() {
            return Err(Error::InvalidArgument("no generators".into()));
        }
        let p = BigRational::new(1.into(), (sym.len() as u64).into());
        StepMeasure::new(
            sym.subshift().clone(),
            sym.names()
                .iter()
                .cloned()
                .zip(sym.elements().iter().cloned())
                .map(|(n, g)| (n, g, p.clone()))
                .collect(),
        )
    }

    /// Point mass at the identity.
    pub fn point_mass(subshift: Arc<Subshift>) -> Result<Self> {
        let id = CocycleElement::identity(subshift.clone())?;
        StepMeasure::new(subshift, vec![("e".into(), id, BigRational::one())])
    }

    pub fn subshift(&self) -> &Arc<Subshift> {
        &self.subshift
    }

    pub fn len(&self) -> usize {
        self.atoms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.atoms.is_empty()
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn atoms(&self) -> &[CocycleElement] {
        &self.atoms
    }

    pub fn probabilities(&self) -> &[BigRational] {
        &self.probabilities
    }

    pub fn probabilities_f64(&self) -> Vec<f64> {
        self.probabilities.iter().map(ratio_to_f64).collect()
    }

    /// Smallest atom probability.
    pub fn delta(&self) -> BigRational {
        self.probabilities.iter().min().cloned().unwrap_or_default()
    }

    /// Maximal absolute shift over the support.
    pub fn max_shift(&self) -> u64 {
        self.atoms.iter().map(|g| g.max_shift()).max().unwrap_or(0)
    }

    /// Maximal depth over the support.
    pub fn max_depth(&self) -> usize {
        self.atoms.iter().map(|g| g.depth()).max().unwrap_or(0)
    }
}

pub fn ratio_to_f64(q: &BigRational) -> f64 {
    q.to_f64().unwrap_or(f64::NAN)
}

/// The law of `g_n = h_n ⋯ h_1` for i.i.d. steps `h_i`.
#[derive(Clone, Debug)]
pub struct GroupDistribution {
    step: usize,
    support: Vec<(CocycleElement, BigRational)>,
    index: HashMap<CocycleElement, usize>,
}

impl GroupDistribution {
    pub fn point_mass(g: CocycleElement) -> Self {
        GroupDistribution {
            step: 0,
            index: HashMap::from([(g.clone(), 0)]),
            support: vec![(g, BigRational::one())],
        }
    }

    pub fn step(&self) -> usize {
        self.step
    }

    pub fn len(&self) -> usize {
        self.support.len()
    }

    pub fn is_empty(&self) -> bool {
        self.support.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&CocycleElement, &BigRational)> {
        self.support.iter().map(|(g, p)| (g, p))
    }

    pub fn probability(&self, g: &CocycleElement) -> BigRational {
        self.index
            .get(g)
            .map(|&i| self.support[i].1.clone())
            .unwrap_or_else(BigRational::zero)
    }

    pub fn total_mass(&self) -> BigRational {
        self.support.iter().map(|(_, p)| p).sum()
    }

    pub fn max_probability(&self) -> BigRational {
        self.support.iter().map(|(_, p)| p).max().cloned().unwrap_or_default()
    }

    /// Shannon entropy in nats.
    pub fn entropy(&self) -> f64 {
        entropy(self.support.iter().map(|(_, p)| ratio_to_f64(p)))
    }

    /// Law of `k_{g_n}` at the point `τ^position p`.
    pub fn pushforward(&self, p: &Point, position: i64) -> Result<BTreeMap<i64, BigRational>> {
        let mut law: BTreeMap<i64, BigRational> = BTreeMap::new();
        for (g, q) in &self.support {
            *law.entry(g.evaluate(p, position)?).or_insert_with(BigRational::zero) += q;
        }
        Ok(law)
    }

    /// One more step of the left walk: `μ * d`.
    pub fn convolve(&self, m: &StepMeasure, cap: usize) -> Result<Self> {
        let products: Vec<Vec<(CocycleElement, BigRational)>> = self
            .support
            .par_iter()
            .map(|(g, p)| {
                m.atoms
                    .iter()
                    .zip(&m.probabilities)
                    .map(|(h, q)| Ok((h.compose(g)?, p * q)))
                    .collect::<Result<Vec<_>>>()
            })
            .collect::<Result<_>>()?;
        let mut support: Vec<(CocycleElement, BigRational)> = Vec::new();
        let mut index: HashMap<CocycleElement, usize> = HashMap::new();
        for (g, p) in products.into_iter().flatten() {
            match index.get(&g) {
                Some(&i) => support[i].1 += p,
                None => {
                    if support.len() >= cap {
                        return Err(Error::ResourceLimit {
                            what: format!("support of step {}", self.step + 1),
                            cap,
                        });
                    }
                    index.insert(g.clone(), support.len());
                    support.push((g, p));
                }
            }
        }
        Ok(GroupDistribution {
            step: self.step + 1,
            support,
            index,
        })
    }
}

/// `μ^{*n}` computed exactly.
pub fn exact_convolution(m: &StepMeasure, n: usize) -> Result<GroupDistribution> {
    Ok(convolution_powers(m, n, DEFAULT_SUPPORT_CAP)?.pop().expect("n + 1 powers"))
}

/// `μ^{*0}, …, μ^{*n}`.
pub fn convolution_powers(m: &StepMeasure, n: usize, cap: usize) -> Result<Vec<GroupDistribution>> {
    let mut out = vec![GroupDistribution::point_mass(CocycleElement::identity(m.subshift.clone())?)];
    for _ in 0..n {
        let next = out.last().expect("nonempty").convolve(m, cap)?;
        out.push(next);
    }
    Ok(out)
}

/// Shannon entropy of a probability vector, natural log, `0 log 0 = 0`.
pub fn entropy(probabilities: impl IntoIterator<Item = f64>) -> f64 {
    probabilities
        .into_iter()
        .filter(|&p| p > 0.0)
        .map(|p| -p * p.ln())
        .sum::<f64>()
        .max(0.0)
}

/// Result of comparing a mixture's entropy with the mixture bound.
#[derive(Clone, Debug, serde::Serialize)]
pub struct MixtureCheck {
    pub entropy: f64,
    pub bound: f64,
    pub slack: f64,
    pub holds: bool,
}

/// `H(∑ αᵢνᵢ) ≤ ∑ αᵢH(νᵢ) − ∑ αᵢ log αᵢ`.
pub fn mixture_entropy_check<K: Ord + Clone>(components: &[BTreeMap<K, f64>], weights: &[f64]) -> Result<MixtureCheck> {
    if components.len() != weights.len() || components.is_empty() {
        return Err(Error::InvalidArgument("one weight per component is required".into()));
    }
    if (weights.iter().sum::<f64>() - 1.0).abs() > 1e-9 || weights.iter().any(|&w| w < 0.0) {
        return Err(Error::InvalidArgument("mixture weights must form a probability vector".into()));
    }
    let mut mixture: BTreeMap<K, f64> = BTreeMap::new();
    for (c, &w) in components.iter().zip(weights) {
        for (k, &p) in c {
            *mixture.entry(k.clone()).or_insert(0.0) += w * p;
        }
    }
    let h = entropy(mixture.values().copied());
    let bound = components
        .iter()
        .zip(weights)
        .map(|(c, &w)| w * entropy(c.values().copied()))
        .sum::<f64>()
        + entropy(weights.iter().copied());
    let slack = bound - h;
    Ok(MixtureCheck {
        entropy: h,
        bound,
        slack,
        holds: slack >= -1e-12,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fullgroup::{fibonacci_generators, fibonacci_subshift};

    fn fib_measure() -> StepMeasure {
        let s = fibonacci_subshift();
        StepMeasure::uniform(&fibonacci_generators(&s).unwrap()).unwrap()
    }

    fn third() -> BigRational {
        BigRational::new(1.into(), 3.into())
    }

    #[test]
    fn second_power_by_brute_force() {
        let m = fib_measure();
        let d2 = exact_convolution(&m, 2).unwrap();
        assert_eq!(d2.total_mass(), BigRational::one());
        let id = CocycleElement::identity(m.subshift().clone()).unwrap();
        assert_eq!(d2.probability(&id), third());
        // 9 ordered pairs: three give e, six distinct products
        let mut pairs = Vec::new();
        for h in m.atoms() {
            for g in m.atoms() {
                pairs.push(h.compose(g).unwrap());
            }
        }
        assert_eq!(pairs.iter().filter(|g| g.is_identity()).count(), 3);
        assert_eq!(d2.len(), 7);
    }

    #[test]
    fn symmetric_and_conserved() {
        let m = fib_measure();
        for d in convolution_powers(&m, 6, 10_000).unwrap() {
            assert_eq!(d.total_mass(), BigRational::one());
            for (g, p) in d.iter() {
                assert_eq!(d.probability(&g.inverse().unwrap()), *p);
            }
        }
    }

    #[test]
    fn asymmetric_measure_rejected() {
        let s = fibonacci_subshift();
        let tau = CocycleElement::shift_power(s.clone(), 1).unwrap();
        let r = StepMeasure::new(s, vec![("t".into(), tau, BigRational::one())]);
        assert!(matches!(r, Err(Error::InvalidArgument(_))));
    }

    #[test]
    fn entropy_examples() {
        assert_eq!(entropy([1.0]), 0.0);
        assert!((entropy([1.0 / 3.0; 3]) - 3f64.ln()).abs() < 1e-12);
        let d1 = exact_convolution(&fib_measure(), 1).unwrap();
        assert!((d1.entropy() - 3f64.ln()).abs() < 1e-12);
    }

    #[test]
    fn mixture_examples() {
        let a: BTreeMap<u8, f64> = [(0, 1.0)].into();
        let b: BTreeMap<u8, f64> = [(1, 1.0)].into();
        let one = mixture_entropy_check(&[a.clone()], &[1.0]).unwrap();
        assert!(one.slack.abs() < 1e-12);
        let two = mixture_entropy_check(&[a, b], &[0.5, 0.5]).unwrap();
        assert!((two.entropy - 2f64.ln()).abs() < 1e-12);
        assert!(two.slack.abs() < 1e-12);
    }

    #[test]
    fn cap_is_enforced() {
        let r = convolution_powers(&fib_measure(), 4, 5);
        assert!(matches!(r, Err(Error::ResourceLimit { .. })));
    }
}
