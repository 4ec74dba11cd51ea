use std::fmt;
use std::sync::Arc;

use crate::alphabet::{Alphabet, Letter};
use crate::error::{Error, Result};

/// Top or bottom, the two Rauzy operations and the two rows of a permutation.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Kind {
    Top,
    Bottom,
}

impl Kind {
    pub fn other(self) -> Kind {
        match self {
            Kind::Top => Kind::Bottom,
            Kind::Bottom => Kind::Top,
        }
    }

    pub fn as_char(self) -> char {
        match self {
            Kind::Top => 't',
            Kind::Bottom => 'b',
        }
    }

    pub fn from_char(c: char) -> Result<Kind> {
        match c {
            't' => Ok(Kind::Top),
            'b' => Ok(Kind::Bottom),
            other => Err(Error::Parse(format!("unknown arrow kind `{other}`"))),
        }
    }
}

/// A pair of bijections from the alphabet onto `{1..d}`, stored as the two
/// rows: `top[i]` is the letter in position `i + 1` of the top row.
#[derive(Clone)]
pub struct Permutation {
    alphabet: Arc<Alphabet>,
    top: Vec<Letter>,
    bottom: Vec<Letter>,
}

impl PartialEq for Permutation {
    fn eq(&self, other: &Self) -> bool {
        self.top == other.top
            && self.bottom == other.bottom
            && (Arc::ptr_eq(&self.alphabet, &other.alphabet) || self.alphabet == other.alphabet)
    }
}

impl Eq for Permutation {}

impl std::hash::Hash for Permutation {
    fn hash<H: std::hash::Hasher>(&self, state: &mut H) {
        self.top.hash(state);
        self.bottom.hash(state);
    }
}

impl fmt::Debug for Permutation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Permutation({self})")
    }
}

impl fmt::Display for Permutation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let row = |r: &[Letter]| {
            r.iter()
                .map(|&l| self.alphabet.name(l))
                .collect::<Vec<_>>()
                .join(" ")
        };
        write!(f, "{} / {}", row(&self.top), row(&self.bottom))
    }
}

impl Permutation {
    /// Build from explicit rows.  Both rows must enumerate the full alphabet.
    pub fn from_rows(alphabet: Arc<Alphabet>, top: Vec<Letter>, bottom: Vec<Letter>) -> Result<Self> {
        let d = alphabet.len();
        for row in [&top, &bottom] {
            if row.len() != d {
                return Err(Error::Parse("rows of unequal length".into()));
            }
            let mut seen = vec![false; d];
            for &l in row {
                if (l as usize) >= d || seen[l as usize] {
                    return Err(Error::Parse("row is not a bijection".into()));
                }
                seen[l as usize] = true;
            }
        }
        Ok(Permutation { alphabet, top, bottom })
    }

    /// Parse the text form `a b c / c b a` (letters whitespace-separated).
    pub fn parse(text: &str) -> Result<Self> {
        let (t, b) = text
            .split_once('/')
            .ok_or_else(|| Error::Parse("expected two rows joined by `/`".into()))?;
        let top_names: Vec<&str> = t.split_whitespace().collect();
        let bottom_names: Vec<&str> = b.split_whitespace().collect();
        if top_names.len() != bottom_names.len() {
            return Err(Error::Parse("rows of unequal length".into()));
        }
        let alphabet = {
            let mut sorted = top_names.clone();
            sorted.sort_unstable();
            Alphabet::new(sorted)?
        };
        let lookup = |names: &[&str]| -> Result<Vec<Letter>> {
            names
                .iter()
                .map(|n| {
                    alphabet
                        .index_of(n)
                        .ok_or_else(|| Error::Parse(format!("unknown letter `{n}`")))
                })
                .collect()
        };
        let top = lookup(&top_names)?;
        let bottom = lookup(&bottom_names)?;
        Permutation::from_rows(alphabet, top, bottom)
    }

    /// The symmetric permutation `a b ... / ... b a` on `d` letters.
    pub fn symmetric(d: usize) -> Result<Self> {
        let alphabet = Alphabet::latin(d)?;
        let top: Vec<Letter> = (0..d as Letter).collect();
        let bottom: Vec<Letter> = (0..d as Letter).rev().collect();
        Permutation::from_rows(alphabet, top, bottom)
    }

    pub fn alphabet(&self) -> &Arc<Alphabet> {
        &self.alphabet
    }

    pub fn len(&self) -> usize {
        self.alphabet.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn row(&self, kind: Kind) -> &[Letter] {
        match kind {
            Kind::Top => &self.top,
            Kind::Bottom => &self.bottom,
        }
    }

    /// Position (1-based) of `l` in the given row; the map `pi_t` / `pi_b`.
    pub fn position(&self, kind: Kind, l: Letter) -> usize {
        self.row(kind).iter().position(|&x| x == l).expect("letter in row") + 1
    }

    pub fn last(&self, kind: Kind) -> Letter {
        *self.row(kind).last().unwrap()
    }

    /// A permutation is irreducible when no strict prefix of the top row is a
    /// permutation of the same-length prefix of the bottom row.
    pub fn is_irreducible(&self) -> bool {
        let d = self.len();
        let mut top_seen = 0u16;
        let mut bottom_seen = 0u16;
        for k in 0..d - 1 {
            top_seen |= 1 << self.top[k];
            bottom_seen |= 1 << self.bottom[k];
            if top_seen == bottom_seen {
                return false;
            }
        }
        true
    }

    /// Apply the top or bottom Rauzy operation, returning the full arrow.
    pub fn apply_operation(&self, kind: Kind) -> Result<Arrow> {
        if !self.is_irreducible() {
            return Err(Error::Reducible);
        }
        let alpha = self.last(Kind::Top);
        let beta = self.last(Kind::Bottom);
        let (winner, loser) = match kind {
            Kind::Top => (alpha, beta),
            Kind::Bottom => (beta, alpha),
        };
        // The named row stays fixed; in the other row the loser moves to the
        // slot just right of the winner's position.
        let mut moved: Vec<Letter> = self
            .row(kind.other())
            .iter()
            .copied()
            .filter(|&l| l != loser)
            .collect();
        let wpos = moved.iter().position(|&l| l == winner).expect("winner in row");
        moved.insert(wpos + 1, loser);
        let end = match kind {
            Kind::Top => Permutation {
                alphabet: self.alphabet.clone(),
                top: self.top.clone(),
                bottom: moved,
            },
            Kind::Bottom => Permutation {
                alphabet: self.alphabet.clone(),
                top: moved,
                bottom: self.bottom.clone(),
            },
        };
        Ok(Arrow {
            start: self.clone(),
            end,
            kind,
            winner,
            loser,
        })
    }
}

/// One edge of a Rauzy diagram.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Arrow {
    pub start: Permutation,
    pub end: Permutation,
    pub kind: Kind,
    pub winner: Letter,
    pub loser: Letter,
}
