//! Balls in Schreier orbit graphs, with vertices identified with offsets in ℤ.

use std::collections::{BTreeMap, HashMap, VecDeque};
use std::fmt::Write as _;

use crate::error::{Error, Result};
use crate::fullgroup::GeneratorSet;
use crate::points::Point;

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct LabeledEdge {
    pub src: i64,
    pub label: String,
    pub dst: i64,
}

/// Vertices within graph distance `radius` of `τ^0 x`, as offsets, and the
/// generator-labeled edges between them.
#[derive(Clone, Debug)]
pub struct SchreierBall {
    radius: usize,
    max_shift: u64,
    labels: Vec<String>,
    distances: BTreeMap<i64, usize>,
    edges: Vec<LabeledEdge>,
}

impl SchreierBall {
    pub fn radius(&self) -> usize {
        self.radius
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    /// Offsets with their graph distance from 0.
    pub fn vertices(&self) -> &BTreeMap<i64, usize> {
        &self.distances
    }

    pub fn edges(&self) -> &[LabeledEdge] {
        &self.edges
    }

    /// Whether every edge moves by at most `K` along ℤ.
    pub fn is_lipschitz(&self) -> bool {
        self.edges
            .iter()
            .all(|e| (e.dst - e.src).unsigned_abs() <= self.max_shift)
    }

    /// Whether every edge `a → b` has some edge `b → a`.
    pub fn is_symmetric(&self) -> bool {
        let mut pairs: HashMap<(i64, i64), usize> = HashMap::new();
        for e in &self.edges {
            *pairs.entry((e.src, e.dst)).or_default() += 1;
        }
        pairs.keys().all(|&(a, b)| pairs.contains_key(&(b, a)))
    }

    /// Vertices strictly inside the ball carry each label exactly once.
    pub fn interior_degrees_exact(&self) -> bool {
        let mut seen: HashMap<i64, Vec<&str>> = HashMap::new();
        for e in &self.edges {
            seen.entry(e.src).or_default().push(&e.label);
        }
        self.distances.iter().filter(|(_, &d)| d < self.radius).all(|(v, _)| {
            let mut got = seen.get(v).cloned().unwrap_or_default();
            got.sort_unstable();
            let mut want: Vec<&str> = self.labels.iter().map(String::as_str).collect();
            want.sort_unstable();
            got == want
        })
    }

    /// Whether the vertices are consecutive integers, each carrying a loop,
    /// and every non-loop edge joins neighbours.
    pub fn is_path_with_loops(&self) -> bool {
        let vs: Vec<i64> = self.distances.keys().copied().collect();
        let consecutive = vs.windows(2).all(|w| w[1] == w[0] + 1);
        let loops = vs
            .iter()
            .all(|v| self.edges.iter().any(|e| e.src == *v && e.dst == *v));
        let steps = self.edges.iter().all(|e| (e.dst - e.src).abs() <= 1);
        let links = vs
            .windows(2)
            .all(|w| self.edges.iter().any(|e| e.src == w[0] && e.dst == w[1]));
        consecutive && loops && steps && links
    }

    pub fn to_dot(&self) -> String {
        export_dot(self)
    }

    /// `src,label,dst` rows with a header.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("src,label,dst\n");
        for e in &self.edges {
            let _ = writeln!(out, "{},{},{}", e.src, e.label, e.dst);
        }
        out
    }
}

/// Breadth-first ball around offset 0.
pub fn build_ball(p: &Point, gens: &GeneratorSet, radius: usize) -> Result<SchreierBall> {
    let mut distances = BTreeMap::from([(0i64, 0usize)]);
    let mut queue = VecDeque::from([0i64]);
    let mut raw = Vec::new();
    while let Some(v) = queue.pop_front() {
        let d = distances[&v];
        for (name, g) in gens.names().iter().zip(gens.elements()) {
            let w = v + g.evaluate(p, v)?;
            raw.push(LabeledEdge {
                src: v,
                label: name.clone(),
                dst: w,
            });
            if d < radius && !distances.contains_key(&w) {
                distances.insert(w, d + 1);
                queue.push_back(w);
            }
        }
    }
    check_aperiodic(p, gens, &distances)?;
    let mut edges: Vec<LabeledEdge> = raw
        .into_iter()
        .filter(|e| distances.contains_key(&e.dst))
        .collect();
    edges.sort();
    Ok(SchreierBall {
        radius,
        max_shift: gens.max_shift(),
        labels: gens.names().to_vec(),
        distances,
        edges,
    })
}

/// Offsets are only faithful vertex names when the windows they see differ.
fn check_aperiodic(p: &Point, gens: &GeneratorSet, vertices: &BTreeMap<i64, usize>) -> Result<()> {
    let (lo, hi) = match (vertices.keys().next(), vertices.keys().next_back()) {
        (Some(&lo), Some(&hi)) if hi > lo => (lo, hi),
        _ => return Ok(()),
    };
    let probe = (hi - lo) + gens.l0() as i64 + 1;
    let seg = p.segment(lo - probe, hi + probe)?;
    let width = 2 * probe as usize + 1;
    let mut seen: HashMap<&[u8], i64> = HashMap::new();
    for &v in vertices.keys() {
        let start = (v - lo) as usize;
        if let Some(&first) = seen.get(&seg[start..start + width]) {
            return Err(Error::PeriodicCollision { first, second: v });
        }
        seen.insert(&seg[start..start + width], v);
    }
    Ok(())
}

/// DOT digraph with one node per offset and one labeled edge per generator move.
pub fn export_dot(ball: &SchreierBall) -> String {
    let mut out = String::from("digraph schreier {\n");
    for (v, d) in &ball.distances {
        let _ = writeln!(out, "  \"{v}\" [label=\"{v}\", distance={d}];");
    }
    for e in &ball.edges {
        let _ = writeln!(out, "  \"{}\" -> \"{}\" [label=\"{}\"];", e.src, e.dst, e.label);
    }
    out.push_str("}\n");
    out
}

/// Edges of a DOT text written by [`export_dot`].
pub fn parse_dot_edges(dot: &str) -> Result<Vec<LabeledEdge>> {
    let bad = |line: &str| Error::InvalidArgument(format!("unrecognized DOT edge line: {line}"));
    let mut edges = Vec::new();
    for line in dot.lines().map(str::trim).filter(|l| l.contains("->")) {
        let (lhs, rest) = line.split_once("->").ok_or_else(|| bad(line))?;
        let (rhs, attrs) = rest.split_once('[').ok_or_else(|| bad(line))?;
        let label = attrs
            .split_once("label=\"")
            .and_then(|(_, r)| r.split_once('"'))
            .map(|(l, _)| l.to_string())
            .ok_or_else(|| bad(line))?;
        let node = |s: &str| s.trim().trim_matches('"').parse::<i64>().map_err(|_| bad(line));
        edges.push(LabeledEdge {
            src: node(lhs)?,
            label,
            dst: node(rhs)?,
        });
    }
    Ok(edges)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fullgroup::{fibonacci_generators, fibonacci_subshift};
    use crate::points::PointGenerator;
    use crate::symbolic::{Alphabet, Subshift, SubshiftSpec, Word};

    fn fib() -> (Point, GeneratorSet) {
        let s = fibonacci_subshift();
        (Point::default_for(s.clone()).unwrap(), fibonacci_generators(&s).unwrap())
    }

    #[test]
    fn radius_two_is_a_path_with_loops() {
        let (p, g) = fib();
        let b = build_ball(&p, &g, 2).unwrap();
        assert_eq!(b.vertices().keys().copied().collect::<Vec<_>>(), vec![-2, -1, 0, 1, 2]);
        assert!(b.is_path_with_loops());
        assert!(b.is_lipschitz() && b.is_symmetric() && b.interior_degrees_exact());
    }

    #[test]
    fn radius_zero_keeps_loops_only() {
        let (p, g) = fib();
        let b = build_ball(&p, &g, 0).unwrap();
        assert_eq!(b.vertices().len(), 1);
        assert!(b.edges().iter().all(|e| e.src == 0 && e.dst == 0));
        assert_eq!(b.edges().len(), 1);
    }

    #[test]
    fn empty_generators_give_one_node() {
        let s = fibonacci_subshift();
        let g = GeneratorSet::new(s.clone(), vec![]).unwrap();
        let b = build_ball(&Point::default_for(s).unwrap(), &g, 3).unwrap();
        let dot = export_dot(&b);
        assert_eq!(dot.matches("[label=").count(), 1);
        assert!(parse_dot_edges(&dot).unwrap().is_empty());
    }

    #[test]
    fn dot_round_trip() {
        let (p, g) = fib();
        let b = build_ball(&p, &g, 5).unwrap();
        assert_eq!(parse_dot_edges(&b.to_dot()).unwrap(), b.edges());
        assert_eq!(b.to_csv().lines().count(), b.edges().len() + 1);
    }

    #[test]
    fn periodic_point_collides() {
        let s = Subshift::new(SubshiftSpec::FullShift(Alphabet::parse("ab").unwrap()));
        let shift = crate::fullgroup::CocycleElement::shift_power(s.clone(), 1).unwrap();
        let g = GeneratorSet::new(s.clone(), vec![("t".into(), shift)]).unwrap();
        let p = Point::new(s, PointGenerator::Periodic { period: Word::from("ab") }).unwrap();
        assert!(matches!(build_ball(&p, &g, 3), Err(Error::PeriodicCollision { .. })));
    }
}
