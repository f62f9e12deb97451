use std::collections::{BTreeMap, BTreeSet};

use super::word::{Alphabet, Word};
use crate::error::{Error, Result};

/// Shift of finite type given by a finite list of forbidden words.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FiniteType {
    alphabet: Alphabet,
    forbidden: BTreeSet<Word>,
    /// allowed words of length `memory` lying on bi-infinite paths
    essential: BTreeSet<Word>,
    memory: usize,
}

impl FiniteType {
    pub fn new(alphabet: Alphabet, forbidden: BTreeSet<Word>) -> Result<Self> {
        for w in &forbidden {
            if w.is_empty() {
                return Err(Error::InvalidSpec("forbidden word is empty".into()));
            }
            alphabet.check_word(w.as_bytes())?;
        }
        let memory = forbidden.iter().map(|w| w.len()).max().unwrap_or(1).max(2) - 1;
        let mut ft = FiniteType {
            alphabet,
            forbidden,
            essential: BTreeSet::new(),
            memory,
        };
        ft.essential = ft.essential_vertices()?;
        Ok(ft)
    }

    pub fn alphabet(&self) -> &Alphabet {
        &self.alphabet
    }

    pub fn forbidden(&self) -> &BTreeSet<Word> {
        &self.forbidden
    }

    /// True when no forbidden word occurs in `w`.
    pub fn avoids_forbidden(&self, w: &[u8]) -> bool {
        self.forbidden
            .iter()
            .all(|f| f.len() > w.len() || !w.windows(f.len()).any(|x| x == f.as_bytes()))
    }

    fn all_words(&self, len: usize) -> Vec<Vec<u8>> {
        let mut words = vec![Vec::new()];
        for _ in 0..len {
            let mut next = Vec::with_capacity(words.len() * self.alphabet.len());
            for w in &words {
                for &c in self.alphabet.letters() {
                    let mut v = w.clone();
                    v.push(c);
                    if self.avoids_forbidden(&v) {
                        next.push(v);
                    }
                }
            }
            words = next;
        }
        words
    }

    /// De Bruijn vertices (allowed `memory`-words) with at least one
    /// bi-infinite path through them: prune sources and sinks to a fixpoint.
    fn essential_vertices(&self) -> Result<BTreeSet<Word>> {
        let m = self.memory;
        let mut vertices: BTreeSet<Vec<u8>> = self.all_words(m).into_iter().collect();
        loop {
            let mut has_out: BTreeMap<&[u8], bool> = BTreeMap::new();
            let mut has_in: BTreeMap<&[u8], bool> = BTreeMap::new();
            for v in &vertices {
                for &c in self.alphabet.letters() {
                    let mut e = v.clone();
                    e.push(c);
                    if !self.avoids_forbidden(&e) {
                        continue;
                    }
                    if vertices.contains(&e[1..]) {
                        has_out.insert(v.as_slice(), true);
                        has_in.insert(vertices.get(&e[1..]).unwrap().as_slice(), true);
                    }
                }
            }
            let keep: BTreeSet<Vec<u8>> = vertices
                .iter()
                .filter(|v| has_out.contains_key(v.as_slice()) && has_in.contains_key(v.as_slice()))
                .cloned()
                .collect();
            if keep.len() == vertices.len() {
                break;
            }
            vertices = keep;
        }
        if vertices.is_empty() {
            return Err(Error::InvalidSpec("subshift of finite type is empty".into()));
        }
        Ok(vertices.into_iter().map(Word::new).collect())
    }

    /// Admissible words of length `n`, enumerated by walking the pruned
    /// de Bruijn graph. Fails with `ResourceLimit` above `cap` words.
    pub fn factors(&self, n: usize, cap: usize) -> Result<BTreeSet<Word>> {
        let m = self.memory;
        if n <= m {
            return Ok(self
                .essential
                .iter()
                .map(|v| Word::from(&v.as_bytes()[..n]))
                .collect());
        }
        let mut words: Vec<Vec<u8>> = self.essential.iter().map(|v| v.as_bytes().to_vec()).collect();
        for _ in m..n {
            let mut next = Vec::new();
            for w in &words {
                for &c in self.alphabet.letters() {
                    let mut v = w.clone();
                    v.push(c);
                    let tail = &v[v.len() - m - 1..];
                    if self.avoids_forbidden(tail) && self.essential.contains(&tail[1..]) {
                        next.push(v);
                    }
                }
            }
            if next.len() > cap {
                return Err(Error::ResourceLimit {
                    what: format!("factors of length {n}"),
                    cap,
                });
            }
            words = next;
        }
        Ok(words.into_iter().map(Word::new).collect())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn golden_mean() -> FiniteType {
        FiniteType::new(Alphabet::parse("ab").unwrap(), [Word::from("bb")].into()).unwrap()
    }

    #[test]
    fn golden_mean_shift_counts_are_fibonacci() {
        let ft = golden_mean();
        let counts: Vec<usize> = (0..8).map(|n| ft.factors(n, 1000).unwrap().len()).collect();
        assert_eq!(counts, vec![1, 2, 3, 5, 8, 13, 21, 34]);
    }

    #[test]
    fn dead_ends_are_pruned() {
        // "ab" forbidden and "ba" forbidden: only constant sequences survive
        let ft = FiniteType::new(
            Alphabet::parse("ab").unwrap(),
            [Word::from("ab"), Word::from("ba")].into(),
        )
        .unwrap();
        let f3: Vec<String> = ft.factors(3, 100).unwrap().iter().map(|w| w.to_string()).collect();
        assert_eq!(f3, vec!["aaa", "bbb"]);
        // "bb" forbidden and "ba" forbidden: b can only be followed by nothing
        let ft = FiniteType::new(
            Alphabet::parse("ab").unwrap(),
            [Word::from("bb"), Word::from("ba")].into(),
        )
        .unwrap();
        let f2: Vec<String> = ft.factors(2, 100).unwrap().iter().map(|w| w.to_string()).collect();
        assert_eq!(f2, vec!["aa"]);
    }

    #[test]
    fn empty_shift_rejected() {
        let r = FiniteType::new(
            Alphabet::parse("a").unwrap(),
            [Word::from("a")].into(),
        );
        assert!(r.is_err());
    }
}
