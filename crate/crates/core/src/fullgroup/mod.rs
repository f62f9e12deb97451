//! Topological full group elements as finite orbit-cocycle tables.

mod coupling;
mod element;

use std::collections::{BTreeMap, HashMap};
use std::sync::Arc;

use rayon::prelude::*;

pub use coupling::{coupling_lemma_check, CouplingCounterexample, CouplingReport};
pub use element::CocycleElement;

use crate::error::{Error, Result};
use crate::symbolic::{Subshift, Substitution, SubshiftSpec, Word};

/// Default cap on the number of elements enumerated by [`ball`].
pub const DEFAULT_BALL_CAP: usize = 2_000_000;

/// Named generators together with their maximal depth `l0` and shift `K`.
#[derive(Clone, Debug)]
pub struct GeneratorSet {
    subshift: Arc<Subshift>,
    names: Vec<String>,
    elements: Vec<CocycleElement>,
}

impl GeneratorSet {
    pub fn new(subshift: Arc<Subshift>, named: Vec<(String, CocycleElement)>) -> Result<Self> {
        let mut names = Vec::with_capacity(named.len());
        let mut elements = Vec::with_capacity(named.len());
        for (name, g) in named {
            if g.subshift().spec() != subshift.spec() {
                return Err(Error::SpecMismatch(format!("generator '{name}' lives on another subshift")));
            }
            if names.contains(&name) {
                return Err(Error::InvalidArgument(format!("duplicate generator name '{name}'")));
            }
            names.push(name);
            elements.push(g);
        }
        Ok(GeneratorSet {
            subshift,
            names,
            elements,
        })
    }

    pub fn subshift(&self) -> &Arc<Subshift> {
        &self.subshift
    }

    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn elements(&self) -> &[CocycleElement] {
        &self.elements
    }

    pub fn get(&self, name: &str) -> Option<&CocycleElement> {
        self.names.iter().position(|n| n == name).map(|i| &self.elements[i])
    }

    /// Maximal generator depth.
    pub fn l0(&self) -> usize {
        self.elements.iter().map(|g| g.depth()).max().unwrap_or(0)
    }

    /// Maximal absolute shift over all generators.
    pub fn max_shift(&self) -> u64 {
        self.elements.iter().map(|g| g.max_shift()).max().unwrap_or(0)
    }

    /// Index of the generator equal to the inverse of generator `i`, if any.
    pub fn inverse_index(&self, i: usize) -> Result<Option<usize>> {
        let inv = self.elements[i].inverse()?;
        Ok(self.elements.iter().position(|g| *g == inv))
    }

    /// The set with a generator `name^-1` appended for every generator whose
    /// inverse is not already present.
    pub fn symmetrized(&self) -> Result<Self> {
        let mut named: Vec<(String, CocycleElement)> =
            self.names.iter().cloned().zip(self.elements.iter().cloned()).collect();
        for i in 0..self.len() {
            if self.inverse_index(i)?.is_none() {
                let inv = self.elements[i].inverse()?;
                if !named.iter().any(|(_, g)| *g == inv) {
                    named.push((format!("{}^-1", self.names[i]), inv));
                }
            }
        }
        GeneratorSet::new(self.subshift.clone(), named)
    }

    /// Product `s_{w_1} · … · s_{w_n}` of generators given by index.
    pub fn product(&self, word: &[usize]) -> Result<CocycleElement> {
        let mut g = CocycleElement::identity(self.subshift.clone())?;
        for &i in word {
            let s = self.elements.get(i).ok_or_else(|| {
                Error::InvalidArgument(format!("generator index {i} out of range"))
            })?;
            g = g.compose(s)?;
        }
        Ok(g)
    }
}

/// The Fibonacci substitution `a -> ab, b -> a`.
pub fn fibonacci_substitution() -> Substitution {
    Substitution::from_pairs([("a", "ab"), ("b", "a")], "a").expect("valid substitution")
}

/// The Fibonacci subshift.
pub fn fibonacci_subshift() -> Arc<Subshift> {
    Subshift::new(SubshiftSpec::Substitution(fibonacci_substitution()))
}

fn pair_generator(s: &Arc<Subshift>, pair: &[u8; 2]) -> Result<CocycleElement> {
    // depth 2 windows x_{-2} x_{-1} x_0 x_1 x_2
    let table: BTreeMap<Word, i64> = s
        .factors(5)?
        .iter()
        .map(|w| {
            let b = w.as_bytes();
            let k = if &b[1..3] == pair {
                1
            } else if &b[0..2] == pair {
                -1
            } else {
                0
            };
            (w.clone(), k)
        })
        .collect();
    CocycleElement::from_table(s.clone(), 2, table)
}

/// The involutions `α`, `β`, `γ` of the Fibonacci subshift.
///
/// Any subshift with the Fibonacci language is accepted (the golden-mean
/// Sturmian subshift, for instance).
pub fn fibonacci_generators(subshift: &Arc<Subshift>) -> Result<GeneratorSet> {
    let reference = fibonacci_subshift();
    let n = 11;
    if subshift.alphabet().letters() != b"ab" || subshift.factors(n)? != reference.factors(n)? {
        return Err(Error::SpecMismatch(
            "the builtin generators require the Fibonacci subshift".into(),
        ));
    }
    let alpha = pair_generator(subshift, b"aa")?;
    let beta = pair_generator(subshift, b"ba")?;
    let gamma_table: BTreeMap<Word, i64> = subshift
        .factors(3)?
        .iter()
        .map(|w| {
            let b = w.as_bytes();
            let k = if b[1] == b'b' {
                1
            } else if b[0] == b'b' {
                -1
            } else {
                0
            };
            (w.clone(), k)
        })
        .collect();
    let gamma = CocycleElement::from_table(subshift.clone(), 1, gamma_table)?;
    GeneratorSet::new(
        subshift.clone(),
        vec![
            ("alpha".into(), alpha),
            ("beta".into(), beta),
            ("gamma".into(), gamma),
        ],
    )
}

/// Elements of word length at most `radius`, in breadth-first order.
#[derive(Clone, Debug)]
pub struct Ball {
    radius: usize,
    elements: Vec<CocycleElement>,
    lengths: Vec<usize>,
    index: HashMap<CocycleElement, usize>,
    sphere_sizes: Vec<usize>,
}

impl Ball {
    pub fn radius(&self) -> usize {
        self.radius
    }

    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    pub fn elements(&self) -> &[CocycleElement] {
        &self.elements
    }

    pub fn iter(&self) -> impl Iterator<Item = (&CocycleElement, usize)> {
        self.elements.iter().zip(self.lengths.iter().copied())
    }

    /// Word length of `g`, if it lies in the ball.
    pub fn length_of(&self, g: &CocycleElement) -> Option<usize> {
        self.index.get(g).map(|&i| self.lengths[i])
    }

    /// Number of elements of each exact word length `0..=radius`.
    pub fn sphere_sizes(&self) -> &[usize] {
        &self.sphere_sizes
    }
}

/// Breadth-first enumeration of the ball of radius `radius` for the word
/// metric of `gens ∪ gens⁻¹`.
pub fn ball(gens: &GeneratorSet, radius: usize) -> Result<Ball> {
    ball_with_cap(gens, radius, DEFAULT_BALL_CAP)
}

pub fn ball_with_cap(gens: &GeneratorSet, radius: usize, cap: usize) -> Result<Ball> {
    ball_of(gens.subshift(), gens.elements(), radius, cap)
}

/// Ball for the word metric of `steps ∪ steps⁻¹` (identity steps are harmless).
pub fn ball_of(subshift: &Arc<Subshift>, steps: &[CocycleElement], radius: usize, cap: usize) -> Result<Ball> {
    let mut all: Vec<CocycleElement> = Vec::with_capacity(2 * steps.len());
    for g in steps {
        for s in [g.clone(), g.inverse()?] {
            if !s.is_identity() && !all.contains(&s) {
                all.push(s);
            }
        }
    }
    let steps = all;
    let id = CocycleElement::identity(subshift.clone())?;
    let mut elements = vec![id.clone()];
    let mut lengths = vec![0];
    let mut index = HashMap::from([(id, 0usize)]);
    let mut sphere_sizes = vec![1];
    let mut frontier = 0..1;
    for r in 1..=radius {
        let products: Vec<Vec<CocycleElement>> = elements[frontier.clone()]
            .par_iter()
            .map(|g| steps.iter().map(|s| s.compose(g)).collect::<Result<Vec<_>>>())
            .collect::<Result<_>>()?;
        let start = elements.len();
        for g in products.into_iter().flatten() {
            if index.contains_key(&g) {
                continue;
            }
            if elements.len() >= cap {
                return Err(Error::ResourceLimit {
                    what: format!("ball of radius {radius}"),
                    cap,
                });
            }
            index.insert(g.clone(), elements.len());
            elements.push(g);
            lengths.push(r);
        }
        sphere_sizes.push(elements.len() - start);
        frontier = start..elements.len();
        if frontier.is_empty() {
            sphere_sizes.resize(radius + 1, 0);
            break;
        }
    }
    Ok(Ball {
        radius,
        elements,
        lengths,
        index,
        sphere_sizes,
    })
}
