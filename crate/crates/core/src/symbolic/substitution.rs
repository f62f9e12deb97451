use std::collections::BTreeMap;

use super::word::{Alphabet, Word};
use crate::error::{Error, Result, SubstitutionCondition};

/// A substitution rule set with a distinguished seed letter.
///
/// Construction checks both standing assumptions: the seed image starts
/// with the seed, and every letter has unboundedly growing iterates.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Substitution {
    alphabet: Alphabet,
    rules: BTreeMap<u8, Word>,
    seed: u8,
    primitive: bool,
}

impl Substitution {
    pub fn new(rules: BTreeMap<u8, Word>, seed: u8) -> Result<Self> {
        let alphabet = Alphabet::new(rules.keys().copied())?;
        for (&letter, image) in &rules {
            if image.is_empty() {
                return Err(Error::InvalidSpec(format!(
                    "image of '{}' is empty",
                    letter as char
                )));
            }
            alphabet.check_word(image.as_bytes())?;
        }
        if !alphabet.contains(seed) {
            return Err(Error::InvalidSpec(format!(
                "seed '{}' has no rule",
                seed as char
            )));
        }
        if rules[&seed].first() != Some(seed) {
            return Err(Error::ConditionViolated {
                condition: SubstitutionCondition::SeedPrefix,
                letter: seed as char,
            });
        }
        let growing = growing_letters(&alphabet, &rules);
        if let Some(i) = growing.iter().position(|g| !g) {
            return Err(Error::ConditionViolated {
                condition: SubstitutionCondition::Growth,
                letter: alphabet.letters()[i] as char,
            });
        }
        let primitive = is_primitive(&alphabet, &rules);
        Ok(Substitution {
            alphabet,
            rules,
            seed,
            primitive,
        })
    }

    /// Parses rules given as `(letter, image)` string pairs.
    pub fn from_pairs<'a>(pairs: impl IntoIterator<Item = (&'a str, &'a str)>, seed: &str) -> Result<Self> {
        let mut rules = BTreeMap::new();
        for (k, v) in pairs {
            let k = single_letter(k)?;
            if rules.insert(k, Word::from(v)).is_some() {
                return Err(Error::InvalidSpec(format!("duplicate rule for '{}'", k as char)));
            }
        }
        Substitution::new(rules, single_letter(seed)?)
    }

    pub fn alphabet(&self) -> &Alphabet {
        &self.alphabet
    }

    pub fn rules(&self) -> &BTreeMap<u8, Word> {
        &self.rules
    }

    pub fn seed(&self) -> u8 {
        self.seed
    }

    pub fn is_primitive(&self) -> bool {
        self.primitive
    }

    pub fn image(&self, letter: u8) -> &[u8] {
        self.rules[&letter].as_bytes()
    }

    /// One application of the substitution to a word.
    pub fn apply(&self, word: &[u8]) -> Vec<u8> {
        let mut out = Vec::with_capacity(word.len() * 2);
        for &c in word {
            out.extend_from_slice(self.image(c));
        }
        out
    }

    /// `k` applications starting from `word`.
    pub fn iterate(&self, word: &[u8], k: usize) -> Word {
        let mut w = word.to_vec();
        for _ in 0..k {
            w = self.apply(&w);
        }
        Word::new(w)
    }
}

pub(crate) fn single_letter(s: &str) -> Result<u8> {
    match s.as_bytes() {
        [c] => Ok(*c),
        _ => Err(Error::InvalidSpec(format!("'{s}' is not a single letter"))),
    }
}

/// `k`-th iterate of `seed` under `rules`, by concatenation.
pub fn substitution_iterate(rules: &Substitution, seed: u8, k: usize) -> Word {
    rules.iterate(&[seed], k)
}

/// Boolean incidence: `m[y][x]` is true when `x` occurs in the image of `y`.
fn incidence(alphabet: &Alphabet, rules: &BTreeMap<u8, Word>) -> Vec<Vec<bool>> {
    let n = alphabet.len();
    let mut m = vec![vec![false; n]; n];
    for (y, &ly) in alphabet.letters().iter().enumerate() {
        for &x in rules[&ly].as_bytes() {
            m[y][alphabet.index_of(x).unwrap()] = true;
        }
    }
    m
}

fn bool_product(a: &[Vec<bool>], b: &[Vec<bool>]) -> Vec<Vec<bool>> {
    let n = a.len();
    let mut c = vec![vec![false; n]; n];
    for i in 0..n {
        for k in 0..n {
            if a[i][k] {
                for j in 0..n {
                    c[i][j] |= b[k][j];
                }
            }
        }
    }
    c
}

/// True when some power of the incidence matrix is all-true. Powers up to
/// `|A|²` are examined, which exceeds Wielandt's bound `(|A|-1)² + 1`.
fn is_primitive(alphabet: &Alphabet, rules: &BTreeMap<u8, Word>) -> bool {
    let m = incidence(alphabet, rules);
    let n = alphabet.len();
    let mut power = m.clone();
    for _ in 1..=n * n {
        if power.iter().all(|row| row.iter().all(|&b| b)) {
            return true;
        }
        power = bool_product(&power, &m);
    }
    false
}

/// For each letter, whether the lengths of its iterates tend to infinity.
///
/// A letter grows iff it reaches a letter `c` lying on a cycle of the
/// incidence graph whose strongly connected component contains a letter
/// with an image of length at least two.
fn growing_letters(alphabet: &Alphabet, rules: &BTreeMap<u8, Word>) -> Vec<bool> {
    let n = alphabet.len();
    let m = incidence(alphabet, rules);
    // reach[i][j]: j reachable from i in at least one step
    let mut reach = m.clone();
    for k in 0..n {
        for i in 0..n {
            if reach[i][k] {
                for j in 0..n {
                    if reach[k][j] {
                        reach[i][j] = true;
                    }
                }
            }
        }
    }
    let long_image: Vec<bool> = alphabet
        .letters()
        .iter()
        .map(|c| rules[c].len() >= 2)
        .collect();
    let expanding: Vec<bool> = (0..n)
        .map(|c| reach[c][c] && (0..n).any(|e| (e == c || (reach[c][e] && reach[e][c])) && long_image[e]))
        .collect();
    (0..n)
        .map(|b| expanding[b] || (0..n).any(|c| reach[b][c] && expanding[c]))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn fib() -> Substitution {
        Substitution::from_pairs([("a", "ab"), ("b", "a")], "a").unwrap()
    }

    #[test]
    fn fibonacci_is_valid_and_primitive() {
        let s = fib();
        assert!(s.is_primitive());
        assert_eq!(substitution_iterate(&s, b'a', 3).to_string(), "abaab");
        assert_eq!(substitution_iterate(&s, b'a', 0).to_string(), "a");
        let long = substitution_iterate(&s, b'a', 15);
        assert!(long.to_string().starts_with("abaababaabaababaababa"));
    }

    #[test]
    fn non_primitive_example() {
        let s = Substitution::from_pairs([("a", "aba"), ("b", "bb")], "a").unwrap();
        assert!(!s.is_primitive());
    }

    #[test]
    fn identity_rule_fails_growth() {
        let err = Substitution::from_pairs([("a", "a")], "a").unwrap_err();
        assert!(matches!(
            err,
            Error::ConditionViolated { condition: SubstitutionCondition::Growth, letter: 'a' }
        ));
    }

    #[test]
    fn seed_prefix_condition() {
        let err = Substitution::from_pairs([("a", "ba"), ("b", "ab")], "a").unwrap_err();
        assert!(matches!(
            err,
            Error::ConditionViolated { condition: SubstitutionCondition::SeedPrefix, .. }
        ));
    }

    #[test]
    fn bounded_letter_detected() {
        // b -> c -> c never grows even though a does
        let err = Substitution::from_pairs([("a", "ab"), ("b", "c"), ("c", "c")], "a").unwrap_err();
        assert!(matches!(
            err,
            Error::ConditionViolated { condition: SubstitutionCondition::Growth, letter: 'b' }
        ));
        // a letter feeding into a growing cycle grows
        assert!(Substitution::from_pairs([("a", "ab"), ("b", "c"), ("c", "cc")], "a").is_ok());
    }

    #[test]
    fn single_letter_doubling_is_primitive() {
        let s = Substitution::from_pairs([("a", "aa")], "a").unwrap();
        assert!(s.is_primitive());
    }

    #[test]
    fn growth_matches_simulation() {
        // cross-check the reachability criterion against brute iteration lengths
        let cases: &[&[(&str, &str)]] = &[
            &[("a", "ab"), ("b", "a")],
            &[("a", "aba"), ("b", "bb")],
            &[("a", "ab"), ("b", "b")],
            &[("a", "abc"), ("b", "c"), ("c", "b")],
            &[("a", "ab"), ("b", "cd"), ("c", "c"), ("d", "d")],
        ];
        for rules in cases {
            let map: BTreeMap<u8, Word> =
                rules.iter().map(|(k, v)| (k.as_bytes()[0], Word::from(*v))).collect();
            let alpha = Alphabet::new(map.keys().copied()).unwrap();
            let growing = growing_letters(&alpha, &map);
            for (i, &c) in alpha.letters().iter().enumerate() {
                let mut w = vec![c];
                let mut lens = Vec::new();
                for _ in 0..24 {
                    w = w.iter().flat_map(|x| map[x].as_bytes().to_vec()).collect();
                    lens.push(w.len());
                }
                let simulated = lens[23] > lens[11] && lens[11] > lens[0];
                assert_eq!(growing[i], simulated, "letter {} in {:?}", c as char, rules);
            }
        }
    }
}
