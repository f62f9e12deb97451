use super::word::Alphabet;
use crate::error::{Error, Result};

/// Sturmian subshift given by continued-fraction coefficients of the slope.
///
/// The coefficient list is repeated cyclically, so `[1]` is the golden slope.
/// Characteristic words come from the standard-word recursion
/// `s_{-1} = b`, `s_0 = a`, `s_k = s_{k-1}^{c_k} s_{k-2}`; with the default
/// letter convention the golden slope reproduces the Fibonacci word.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Sturmian {
    coefficients: Vec<u32>,
    swap_letters: bool,
}

impl Sturmian {
    pub fn new(coefficients: Vec<u32>, swap_letters: bool) -> Result<Self> {
        if coefficients.is_empty() {
            return Err(Error::InvalidSpec("continued fraction list is empty".into()));
        }
        if coefficients.contains(&0) {
            return Err(Error::InvalidSpec(
                "continued fraction coefficients must be positive".into(),
            ));
        }
        Ok(Sturmian {
            coefficients,
            swap_letters,
        })
    }

    pub fn golden() -> Self {
        Sturmian {
            coefficients: vec![1],
            swap_letters: false,
        }
    }

    pub fn coefficients(&self) -> &[u32] {
        &self.coefficients
    }

    pub fn swap_letters(&self) -> bool {
        self.swap_letters
    }

    pub fn alphabet(&self) -> Alphabet {
        Alphabet::parse("ab").unwrap()
    }

    fn coefficient(&self, k: usize) -> usize {
        self.coefficients[(k - 1) % self.coefficients.len()] as usize
    }

    /// Standard words `s_k` for `k = 0, 1, ...` until one has at least `min_len`
    /// letters and index parity `parity` (when given).
    pub fn standard_word(&self, min_len: usize, parity: Option<usize>) -> Vec<u8> {
        let (a, b) = if self.swap_letters { (b'b', b'a') } else { (b'a', b'b') };
        let mut prev = vec![b];
        let mut cur = vec![a];
        let mut k = 0;
        while cur.len() < min_len || parity.is_some_and(|p| k % 2 != p) {
            k += 1;
            let reps = self.coefficient(k);
            let mut next = Vec::with_capacity(cur.len() * reps + prev.len());
            for _ in 0..reps {
                next.extend_from_slice(&cur);
            }
            next.extend_from_slice(&prev);
            prev = std::mem::replace(&mut cur, next);
        }
        cur
    }

    /// First `len` letters of the characteristic word.
    pub fn characteristic_prefix(&self, len: usize) -> Vec<u8> {
        let mut w = self.standard_word(len, None);
        w.truncate(len);
        w
    }
}
