use std::borrow::Borrow;
use std::fmt;

use crate::error::{Error, Result};

/// Marker used for holes in Toeplitz patterns.
pub const HOLE: u8 = b'*';

/// A finite word. Letters are single ASCII bytes.
#[derive(Clone, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Word(Vec<u8>);

impl Word {
    pub fn new(letters: Vec<u8>) -> Self {
        Word(letters)
    }

    pub fn empty() -> Self {
        Word(Vec::new())
    }

    pub fn as_bytes(&self) -> &[u8] {
        &self.0
    }

    pub fn into_bytes(self) -> Vec<u8> {
        self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn first(&self) -> Option<u8> {
        self.0.first().copied()
    }

    pub fn last(&self) -> Option<u8> {
        self.0.last().copied()
    }

    /// Centered subword of radius `radius` inside a word of odd length.
    pub fn center(&self, radius: usize) -> &[u8] {
        center_slice(&self.0, radius)
    }
}

/// Centered slice of radius `radius` of an odd-length slice.
pub fn center_slice(letters: &[u8], radius: usize) -> &[u8] {
    let mid = letters.len() / 2;
    &letters[mid - radius..=mid + radius]
}

impl Borrow<[u8]> for Word {
    fn borrow(&self) -> &[u8] {
        &self.0
    }
}

impl AsRef<[u8]> for Word {
    fn as_ref(&self) -> &[u8] {
        &self.0
    }
}

impl From<&str> for Word {
    fn from(s: &str) -> Self {
        Word(s.as_bytes().to_vec())
    }
}

impl From<Vec<u8>> for Word {
    fn from(v: Vec<u8>) -> Self {
        Word(v)
    }
}

impl From<&[u8]> for Word {
    fn from(v: &[u8]) -> Self {
        Word(v.to_vec())
    }
}

impl fmt::Display for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&String::from_utf8_lossy(&self.0))
    }
}

impl fmt::Debug for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "\"{self}\"")
    }
}

/// Ordered finite set of letters.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Alphabet {
    letters: Vec<u8>,
}

impl Alphabet {
    /// Letters must be printable ASCII, distinct, and different from the hole marker.
    pub fn new(letters: impl IntoIterator<Item = u8>) -> Result<Self> {
        let mut letters: Vec<u8> = letters.into_iter().collect();
        if letters.is_empty() {
            return Err(Error::EmptyAlphabet);
        }
        for &c in &letters {
            if !c.is_ascii_graphic() || c == HOLE {
                return Err(Error::InvalidSpec(format!(
                    "letter {:?} is not a printable non-hole ASCII character",
                    c as char
                )));
            }
        }
        let n = letters.len();
        letters.sort_unstable();
        letters.dedup();
        if letters.len() != n {
            return Err(Error::InvalidSpec("duplicate letter in alphabet".into()));
        }
        Ok(Alphabet { letters })
    }

    pub fn parse(s: &str) -> Result<Self> {
        Alphabet::new(s.bytes())
    }

    pub fn letters(&self) -> &[u8] {
        &self.letters
    }

    pub fn len(&self) -> usize {
        self.letters.len()
    }

    pub fn is_empty(&self) -> bool {
        self.letters.is_empty()
    }

    pub fn contains(&self, c: u8) -> bool {
        self.letters.binary_search(&c).is_ok()
    }

    pub fn index_of(&self, c: u8) -> Option<usize> {
        self.letters.binary_search(&c).ok()
    }

    pub fn check_word(&self, w: &[u8]) -> Result<()> {
        match w.iter().find(|&&c| !self.contains(c)) {
            Some(&c) => Err(Error::InvalidSpec(format!(
                "letter {:?} is not in the alphabet",
                c as char
            ))),
            None => Ok(()),
        }
    }
}

impl fmt::Display for Alphabet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&String::from_utf8_lossy(&self.letters))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn alphabet_rejects_duplicates_and_empty() {
        assert!(matches!(Alphabet::parse(""), Err(Error::EmptyAlphabet)));
        assert!(Alphabet::parse("aba").is_err());
        assert!(Alphabet::parse("a*").is_err());
        let a = Alphabet::parse("ba").unwrap();
        assert_eq!(a.letters(), b"ab");
        assert_eq!(a.index_of(b'b'), Some(1));
    }

    #[test]
    fn center_slice_picks_middle() {
        let w = Word::from("abcde");
        assert_eq!(w.center(1), b"bcd");
        assert_eq!(w.center(0), b"c");
        assert_eq!(w.center(2), b"abcde");
    }
}
