use std::fmt;

use crate::diagram::RauzyClass;
use crate::error::{Error, Result};
use crate::perm::{Arrow, Kind, Permutation};

/// A path in a Rauzy diagram, stored as its start vertex and the sequence of
/// arrow kinds.  The arrows are recoverable because every vertex has exactly
/// one outgoing arrow of each kind.  The empty sequence is the trivial path
/// identified with its start vertex.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Path {
    start: Permutation,
    kinds: Vec<Kind>,
}

impl fmt::Debug for Path {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Path({self})")
    }
}

impl fmt::Display for Path {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} : ", self.start)?;
        for k in &self.kinds {
            write!(f, "{}", k.as_char())?;
        }
        Ok(())
    }
}

impl Path {
    pub fn trivial(start: Permutation) -> Self {
        Path { start, kinds: Vec::new() }
    }

    pub fn from_kinds(start: Permutation, kinds: impl IntoIterator<Item = Kind>) -> Result<Self> {
        if !start.is_irreducible() {
            return Err(Error::Reducible);
        }
        Ok(Path {
            start,
            kinds: kinds.into_iter().collect(),
        })
    }

    /// Parse the text form `a b / b a : tbtb`; the kinds part may be empty.
    pub fn parse(text: &str) -> Result<Self> {
        let (perm, kinds) = text
            .rsplit_once(':')
            .ok_or_else(|| Error::Parse("expected `<permutation> : <kinds>`".into()))?;
        let start = Permutation::parse(perm)?;
        let kinds = kinds
            .trim()
            .chars()
            .map(Kind::from_char)
            .collect::<Result<Vec<_>>>()?;
        Path::from_kinds(start, kinds)
    }

    pub fn start(&self) -> &Permutation {
        &self.start
    }

    pub fn kinds(&self) -> &[Kind] {
        &self.kinds
    }

    pub fn len(&self) -> usize {
        self.kinds.len()
    }

    pub fn is_trivial(&self) -> bool {
        self.kinds.is_empty()
    }

    /// Expand into the arrow sequence.
    pub fn arrows(&self) -> Result<Vec<Arrow>> {
        let mut out = Vec::with_capacity(self.kinds.len());
        let mut at = self.start.clone();
        for &k in &self.kinds {
            let arrow = at.apply_operation(k)?;
            at = arrow.end.clone();
            out.push(arrow);
        }
        Ok(out)
    }

    pub fn end(&self) -> Result<Permutation> {
        let mut at = self.start.clone();
        for &k in &self.kinds {
            at = at.apply_operation(k)?.end;
        }
        Ok(at)
    }

    /// The vertex reached after each prefix, starting with the start vertex
    /// itself (`len() + 1` entries).
    pub fn vertices(&self) -> Result<Vec<Permutation>> {
        let mut out = Vec::with_capacity(self.kinds.len() + 1);
        let mut at = self.start.clone();
        out.push(at.clone());
        for &k in &self.kinds {
            at = at.apply_operation(k)?.end;
            out.push(at.clone());
        }
        Ok(out)
    }

    /// Concatenation; the end of `self` must be the start of `other`.
    pub fn concat(&self, other: &Path) -> Result<Path> {
        if self.end()? != *other.start() {
            return Err(Error::MismatchedStart);
        }
        let mut kinds = self.kinds.clone();
        kinds.extend_from_slice(&other.kinds);
        Ok(Path {
            start: self.start.clone(),
            kinds,
        })
    }

    pub fn prefix(&self, len: usize) -> Path {
        Path {
            start: self.start.clone(),
            kinds: self.kinds[..len].to_vec(),
        }
    }
}

/// The partial order on paths from a common start: `gamma_s <= gamma` iff
/// `gamma` starts by `gamma_s`.
pub fn path_order(gamma_s: &Path, gamma: &Path) -> Result<bool> {
    if gamma_s.start() != gamma.start() {
        return Err(Error::MismatchedStart);
    }
    Ok(gamma.kinds().starts_with(gamma_s.kinds()))
}

/// Visitor verdict for [`enumerate_paths`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Verdict {
    /// Extend this path by both arrows.
    Descend,
    /// Emit this path and do not descend past it.
    Emit,
    /// Drop this path and its whole subtree.
    Prune,
}

/// View of the current node handed to the visitor.
pub struct PathNode<'a> {
    pub kinds: &'a [Kind],
    /// Vertex index (in the class) reached by the path.
    pub end: usize,
}

/// Depth-first traversal of the binary path tree rooted at `start`.
///
/// Each emitted family is disjoint by construction: the traversal never
/// descends past an emitted or pruned path.  The visitor must guarantee
/// termination through its own cutoffs.
pub fn enumerate_paths<V>(class: &RauzyClass, start: usize, mut visitor: V) -> Vec<Path>
where
    V: FnMut(&PathNode) -> Verdict,
{
    fn go<V: FnMut(&PathNode) -> Verdict>(
        class: &RauzyClass,
        start: usize,
        vertex: usize,
        kinds: &mut Vec<Kind>,
        visitor: &mut V,
        out: &mut Vec<Path>,
    ) {
        match visitor(&PathNode { kinds, end: vertex }) {
            Verdict::Emit => out.push(
                Path::from_kinds(class.vertex(start).clone(), kinds.iter().copied())
                    .expect("class vertices are irreducible"),
            ),
            Verdict::Prune => {}
            Verdict::Descend => {
                for kind in [Kind::Top, Kind::Bottom] {
                    kinds.push(kind);
                    go(class, start, class.arrow(vertex, kind).end, kinds, visitor, out);
                    kinds.pop();
                }
            }
        }
    }

    let mut emitted = Vec::new();
    let mut kinds = Vec::new();
    go(class, start, start, &mut kinds, &mut visitor, &mut emitted);
    emitted
}
