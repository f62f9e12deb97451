use serde::Serialize;

use super::{CocycleElement, GeneratorSet};
use crate::error::{Error, Result};
use crate::points::Point;
use crate::symbolic::Word;

/// Outcome of the exhaustive coupling check.
#[derive(Clone, Debug, Default, Serialize)]
pub struct CouplingReport {
    pub n_max: usize,
    pub l_max: usize,
    pub l0: usize,
    pub words: usize,
    pub cylinders: usize,
    /// `(word, cylinder)` pairs where the displacement hypothesis held
    pub applicable: u64,
    pub counterexamples: Vec<CouplingCounterexample>,
}

#[derive(Clone, Debug, Serialize)]
pub struct CouplingCounterexample {
    pub word: Vec<String>,
    pub cylinder: String,
    pub step: usize,
}

struct Cylinder {
    word: Word,
    l: usize,
    anchor: i64,
}

/// For every generator word `h_1 … h_n` with `n ≤ n_max` and every admissible
/// cylinder of depth `l ≤ l_max`, witnessed at an occurrence in `p`, check
/// that `g_j = h_j ⋯ h_1` has cocycle constant on the cylinder whenever the
/// orbit offsets stay within `l - l0` up to step `j`.
pub fn coupling_lemma_check(gens: &GeneratorSet, p: &Point, n_max: usize, l_max: usize) -> Result<CouplingReport> {
    let l0 = gens.l0();
    let search = 1 << 14;
    let seg = p.segment(-search, search)?;
    let mut cylinders = Vec::new();
    for l in l0..=l_max {
        for w in gens.subshift().factors(2 * l + 1)?.iter() {
            let at = seg
                .windows(w.len())
                .position(|x| x == w.as_bytes())
                .ok_or_else(|| Error::InsufficientData(format!("no occurrence of '{w}' near the origin")))?;
            cylinders.push(Cylinder {
                word: w.clone(),
                l,
                anchor: at as i64 - search + l as i64,
            });
        }
    }
    let mut report = CouplingReport {
        n_max,
        l_max,
        l0,
        cylinders: cylinders.len(),
        ..Default::default()
    };
    let offsets = vec![(0i64, 0u64); cylinders.len()];
    let id = CocycleElement::identity(gens.subshift().clone())?;
    let mut path = Vec::new();
    descend(gens, p, &cylinders, &id, &offsets, &mut path, n_max, &mut report)?;
    Ok(report)
}

#[allow(clippy::too_many_arguments)]
fn descend(
    gens: &GeneratorSet,
    p: &Point,
    cylinders: &[Cylinder],
    g: &CocycleElement,
    offsets: &[(i64, u64)],
    path: &mut Vec<usize>,
    remaining: usize,
    report: &mut CouplingReport,
) -> Result<()> {
    if remaining == 0 {
        return Ok(());
    }
    for (i, h) in gens.elements().iter().enumerate() {
        let next = h.compose(g)?;
        path.push(i);
        report.words += 1;
        let mut next_offsets = Vec::with_capacity(offsets.len());
        for (c, &(m, max)) in cylinders.iter().zip(offsets) {
            let m = m + h.evaluate(p, c.anchor + m)?;
            let max = max.max(m.unsigned_abs());
            next_offsets.push((m, max));
            if max + report.l0 as u64 <= c.l as u64 {
                report.applicable += 1;
                if !next.is_constant_on_cylinder(c.word.as_bytes())? {
                    report.counterexamples.push(CouplingCounterexample {
                        word: path.iter().map(|&j| gens.names()[j].clone()).collect(),
                        cylinder: c.word.to_string(),
                        step: path.len(),
                    });
                }
            }
        }
        descend(gens, p, cylinders, &next, &next_offsets, path, remaining - 1, report)?;
        path.pop();
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fullgroup::{fibonacci_generators, fibonacci_subshift};

    #[test]
    fn small_coupling_check_is_clean() {
        let s = fibonacci_subshift();
        let gens = fibonacci_generators(&s).unwrap();
        let p = Point::default_for(s).unwrap();
        let r = coupling_lemma_check(&gens, &p, 4, 6).unwrap();
        assert_eq!(r.words, 3 + 9 + 27 + 81);
        assert!(r.applicable > 0);
        assert!(r.counterexamples.is_empty(), "{:?}", r.counterexamples);
    }
}
