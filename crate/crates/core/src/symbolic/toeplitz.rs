use super::word::{Alphabet, Word, HOLE};
use crate::error::{Error, Result};

/// A Toeplitz pattern over `alphabet ∪ {*}`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ToeplitzPattern {
    pattern: Vec<u8>,
    alphabet: Alphabet,
    /// rank of each hole among the holes of the pattern
    hole_rank: Vec<Option<usize>>,
    holes: usize,
}

impl ToeplitzPattern {
    pub fn new(pattern: &[u8]) -> Result<Self> {
        match pattern.first() {
            None => return Err(Error::InvalidSpec("Toeplitz pattern is empty".into())),
            Some(&HOLE) => {
                return Err(Error::InvalidSpec(
                    "Toeplitz pattern must start with a letter".into(),
                ))
            }
            _ => {}
        }
        let mut letters: Vec<u8> = pattern.iter().copied().filter(|&c| c != HOLE).collect();
        letters.sort_unstable();
        letters.dedup();
        let alphabet = Alphabet::new(letters)?;
        let mut hole_rank = Vec::with_capacity(pattern.len());
        let mut holes = 0;
        for &c in pattern {
            if c == HOLE {
                hole_rank.push(Some(holes));
                holes += 1;
            } else {
                hole_rank.push(None);
            }
        }
        if holes == 0 {
            return Err(Error::InvalidSpec(
                "Toeplitz pattern must contain at least one hole".into(),
            ));
        }
        Ok(ToeplitzPattern {
            pattern: pattern.to_vec(),
            alphabet,
            hole_rank,
            holes,
        })
    }

    pub fn parse(s: &str) -> Result<Self> {
        ToeplitzPattern::new(s.as_bytes())
    }

    pub fn pattern(&self) -> &[u8] {
        &self.pattern
    }

    pub fn alphabet(&self) -> &Alphabet {
        &self.alphabet
    }

    /// Pattern length `p`.
    pub fn period(&self) -> usize {
        self.pattern.len()
    }

    /// Number of holes `q`.
    pub fn holes(&self) -> usize {
        self.holes
    }

    /// Exponent `log p / log(p/q)` governing the complexity growth for coprime patterns.
    pub fn complexity_exponent(&self) -> f64 {
        let p = self.period() as f64;
        let q = self.holes as f64;
        p.ln() / (p / q).ln()
    }

    pub fn is_coprime(&self) -> bool {
        gcd(self.period(), self.holes) == 1
    }

    /// Letter at position `j` of the two-sided Toeplitz sequence whose
    /// restriction to `j >= 0` is the one-sided Toeplitz word. Holes at
    /// position `j` are filled by the letter at the hole's index. Returns
    /// `None` if `j` lies on a chain of holes that is never filled.
    pub fn letter_at(&self, mut j: i64) -> Option<u8> {
        let p = self.period() as i64;
        let q = self.holes as i64;
        // once a negative chain enters [-q, -1] it stays there
        let mut inside = 0i64;
        loop {
            let r = j.rem_euclid(p) as usize;
            match self.hole_rank[r] {
                None => return Some(self.pattern[r]),
                Some(rank) => {
                    let next = j.div_euclid(p) * q + rank as i64;
                    if (-q..0).contains(&next) {
                        inside += 1;
                        if inside > q {
                            return None;
                        }
                    }
                    j = next;
                }
            }
        }
    }

    /// First `len` letters of the one-sided Toeplitz word, in one pass:
    /// the `k`-th hole takes the `k`-th letter, which lies strictly earlier.
    pub fn prefix(&self, len: usize) -> Vec<u8> {
        let p = self.period();
        let q = self.holes;
        let mut out = Vec::with_capacity(len);
        for j in 0..len {
            let r = j % p;
            let c = match self.hole_rank[r] {
                None => self.pattern[r],
                Some(rank) => out[(j / p) * q + rank],
            };
            out.push(c);
        }
        out
    }
}

fn gcd(a: usize, b: usize) -> usize {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

/// First `len` letters of the Toeplitz word of `pattern`, computed by
/// repeated hole filling: each round fills the holes of the periodic
/// word with the previous round, until the prefix has no holes left.
///
/// The pattern only has to start with a letter; a pattern without holes
/// yields its periodic word.
pub fn toeplitz_word(pattern: &[u8], len: usize) -> Result<Word> {
    match pattern.first() {
        None | Some(&HOLE) => {
            return Err(Error::InvalidSpec(
                "Toeplitz pattern must start with a letter".into(),
            ))
        }
        _ => {}
    }
    Alphabet::new(pattern.iter().copied().filter(|&c| c != HOLE).collect::<std::collections::BTreeSet<_>>())?;
    let w = pattern;
    let periodic: Vec<u8> = (0..len).map(|j| w[j % w.len()]).collect();
    let mut current = periodic.clone();
    while current.contains(&HOLE) {
        let mut next = periodic.clone();
        let mut filler = current.iter();
        for c in next.iter_mut() {
            if *c == HOLE {
                // the k-th hole sits past position k, so the filler never runs out
                *c = *filler.next().expect("filler shorter than hole count");
            }
        }
        current = next;
    }
    Ok(Word::new(current))
}
