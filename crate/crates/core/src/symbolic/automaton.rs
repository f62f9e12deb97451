//! Suffix automaton used to count distinct factors of every length at once.

use super::word::Alphabet;

const NONE: u32 = u32::MAX;

struct SuffixAutomaton {
    k: usize,
    next: Vec<u32>,
    link: Vec<u32>,
    len: Vec<u32>,
    last: u32,
}

impl SuffixAutomaton {
    fn with_capacity(k: usize, text_len: usize) -> Self {
        let cap = 2 * text_len + 2;
        let mut sam = SuffixAutomaton {
            k,
            next: Vec::with_capacity(cap * k),
            link: Vec::with_capacity(cap),
            len: Vec::with_capacity(cap),
            last: 0,
        };
        sam.push_state(0, NONE);
        sam
    }

    fn push_state(&mut self, len: u32, link: u32) -> u32 {
        let id = self.len.len() as u32;
        self.len.push(len);
        self.link.push(link);
        self.next.extend(std::iter::repeat_n(NONE, self.k));
        id
    }

    fn go(&self, state: u32, c: usize) -> u32 {
        self.next[state as usize * self.k + c]
    }

    fn set(&mut self, state: u32, c: usize, to: u32) {
        self.next[state as usize * self.k + c] = to;
    }

    fn extend(&mut self, c: usize) {
        let cur = self.push_state(self.len[self.last as usize] + 1, NONE);
        let mut p = self.last;
        while p != NONE && self.go(p, c) == NONE {
            self.set(p, c, cur);
            p = self.link[p as usize];
        }
        if p == NONE {
            self.link[cur as usize] = 0;
        } else {
            let q = self.go(p, c);
            if self.len[p as usize] + 1 == self.len[q as usize] {
                self.link[cur as usize] = q;
            } else {
                let clone = self.push_state(self.len[p as usize] + 1, self.link[q as usize]);
                let (src, dst) = (q as usize * self.k, clone as usize * self.k);
                self.next.copy_within(src..src + self.k, dst);
                while p != NONE && self.go(p, c) == q {
                    self.set(p, c, clone);
                    p = self.link[p as usize];
                }
                self.link[q as usize] = clone;
                self.link[cur as usize] = clone;
            }
        }
        self.last = cur;
    }
}

/// Number of distinct factors of `text` of each length `0..=n_max`.
///
/// Every letter of `text` must belong to `alphabet`.
pub fn factor_counts(text: &[u8], alphabet: &Alphabet, n_max: usize) -> Vec<u64> {
    let mut sam = SuffixAutomaton::with_capacity(alphabet.len(), text.len());
    for &c in text {
        sam.extend(alphabet.index_of(c).expect("letter outside alphabet"));
    }
    let mut diff = vec![0i64; n_max + 2];
    for v in 1..sam.len.len() {
        let lo = sam.len[sam.link[v] as usize] as usize + 1;
        let hi = (sam.len[v] as usize).min(n_max);
        if lo <= hi {
            diff[lo] += 1;
            diff[hi + 1] -= 1;
        }
    }
    let mut counts = Vec::with_capacity(n_max + 1);
    let mut acc = 0i64;
    for (n, d) in diff.iter().take(n_max + 1).enumerate() {
        acc += d;
        counts.push(if n == 0 { 1 } else { acc as u64 });
    }
    counts
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use std::collections::HashSet;

    fn brute(text: &[u8], n_max: usize) -> Vec<u64> {
        (0..=n_max)
            .map(|n| {
                if n == 0 {
                    1
                } else if n > text.len() {
                    0
                } else {
                    text.windows(n).collect::<HashSet<_>>().len() as u64
                }
            })
            .collect()
    }

    #[test]
    fn small_text() {
        let a = Alphabet::parse("ab").unwrap();
        assert_eq!(factor_counts(b"abaab", &a, 6), vec![1, 2, 3, 3, 2, 1, 0]);
    }

    proptest! {
        #[test]
        fn matches_brute_force(text in proptest::collection::vec(prop_oneof![Just(b'a'), Just(b'b'), Just(b'c')], 0..200), n_max in 0usize..40) {
            let a = Alphabet::parse("abc").unwrap();
            prop_assert_eq!(factor_counts(&text, &a, n_max), brute(&text, n_max));
        }
    }
}
