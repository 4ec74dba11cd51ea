use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result};

/// Hard cap on the alphabet size.  Class sizes and enumeration trees grow
/// fast with `d`; everything in this crate is exercised at `d <= 5`.
pub const MAX_LETTERS: usize = 10;

/// Index of a letter inside its [`Alphabet`].
pub type Letter = u8;

/// An ordered alphabet of `d >= 2` distinct symbols.
///
/// The ordering is fixed at construction and gives each letter a canonical
/// index used everywhere else (vectors over the alphabet, matrix rows, ...).
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Alphabet {
    letters: Vec<String>,
}

impl Alphabet {
    pub fn new<S: Into<String>>(letters: impl IntoIterator<Item = S>) -> Result<Arc<Self>> {
        let letters: Vec<String> = letters.into_iter().map(Into::into).collect();
        if letters.len() < 2 {
            return Err(Error::Parse("alphabet needs at least 2 letters".into()));
        }
        if letters.len() > MAX_LETTERS {
            return Err(Error::OutOfRange(format!(
                "alphabet size {} exceeds the cap {}",
                letters.len(),
                MAX_LETTERS
            )));
        }
        for (i, a) in letters.iter().enumerate() {
            if a.is_empty() {
                return Err(Error::Parse("empty letter".into()));
            }
            if letters[..i].contains(a) {
                return Err(Error::Parse(format!("repeated letter `{a}`")));
            }
        }
        Ok(Arc::new(Alphabet { letters }))
    }

    /// The standard alphabet `a, b, c, ...` on `d` letters.
    pub fn latin(d: usize) -> Result<Arc<Self>> {
        if d > MAX_LETTERS {
            return Err(Error::OutOfRange(format!("d = {d} exceeds the cap {MAX_LETTERS}")));
        }
        Self::new((0..d).map(|i| ((b'a' + i as u8) as char).to_string()))
    }

    pub fn len(&self) -> usize {
        self.letters.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn name(&self, l: Letter) -> &str {
        &self.letters[l as usize]
    }

    pub fn index_of(&self, name: &str) -> Option<Letter> {
        self.letters.iter().position(|s| s == name).map(|i| i as Letter)
    }

    pub fn letters(&self) -> impl Iterator<Item = Letter> + '_ {
        (0..self.len() as Letter).map(move |l| l)
    }
}

impl fmt::Display for Alphabet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.letters.join(" "))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_degenerate_alphabets() {
        assert!(Alphabet::new(["a"]).is_err());
        assert!(Alphabet::new(["a", "a"]).is_err());
        assert!(Alphabet::new(["a", ""]).is_err());
        assert!(Alphabet::latin(11).is_err());
    }

    #[test]
    fn latin_indexing() {
        let ab = Alphabet::latin(3).unwrap();
        assert_eq!(ab.len(), 3);
        assert_eq!(ab.name(2), "c");
        assert_eq!(ab.index_of("b"), Some(1));
        assert_eq!(ab.index_of("z"), None);
    }
}
