use std::collections::{BTreeSet, VecDeque};

use crate::alphabet::{Alphabet, Letter};
use crate::diagram::RauzyClass;
use crate::error::{Error, Result};
use crate::path::Path;
use crate::perm::{Kind, Permutation};

/// A non-empty proper subset of the alphabet, the coloring set.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct LetterSubset {
    mask: u16,
    d: usize,
}

impl LetterSubset {
    pub fn new(letters: &[Letter], alphabet: &Alphabet) -> Result<Self> {
        let d = alphabet.len();
        let mut mask = 0u16;
        for &l in letters {
            if (l as usize) >= d {
                return Err(Error::OutOfRange(format!("letter index {l} out of range")));
            }
            mask |= 1 << l;
        }
        if mask == 0 || mask == (1 << d) - 1 {
            return Err(Error::EmptySubset);
        }
        Ok(LetterSubset { mask, d })
    }

    pub fn parse(names: &str, alphabet: &Alphabet) -> Result<Self> {
        let letters: Vec<Letter> = names
            .split(|c: char| c == ',' || c.is_whitespace())
            .filter(|s| !s.is_empty())
            .map(|n| {
                alphabet
                    .index_of(n)
                    .ok_or_else(|| Error::Parse(format!("unknown letter `{n}`")))
            })
            .collect::<Result<_>>()?;
        Self::new(&letters, alphabet)
    }

    pub fn contains(&self, l: Letter) -> bool {
        self.mask & (1 << l) != 0
    }

    pub fn letters(&self) -> Vec<Letter> {
        (0..self.d as Letter).filter(|&l| self.contains(l)).collect()
    }

    pub fn complement_letters(&self) -> Vec<Letter> {
        (0..self.d as Letter).filter(|&l| !self.contains(l)).collect()
    }

    pub fn indices(&self) -> Vec<usize> {
        self.letters().into_iter().map(|l| l as usize).collect()
    }

    pub fn complement_indices(&self) -> Vec<usize> {
        self.complement_letters().into_iter().map(|l| l as usize).collect()
    }
}

/// Flags of one arrow relative to the coloring set.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ArrowFlags {
    /// Winner in the subset.
    pub colored: bool,
    /// Winner and loser both in the subset.
    pub separated: bool,
    /// Winner and loser both outside the subset.
    pub both_in_complement: bool,
}

/// Flags of a whole path relative to the coloring set.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct PathFlags {
    /// Every arrow wins inside the subset.
    pub colored: bool,
    /// Every arrow has winner and loser inside the subset.
    pub complement_separated: bool,
    /// No arrow loses inside the subset; equivalently the path matrix is
    /// block-triangular between the subset and its complement.
    pub preferring: bool,
}

pub fn classify_arrows(path: &Path, subset: &LetterSubset) -> Result<(Vec<ArrowFlags>, PathFlags)> {
    let mut per_arrow = Vec::with_capacity(path.len());
    let mut flags = PathFlags {
        colored: true,
        complement_separated: true,
        preferring: true,
    };
    for arrow in path.arrows()? {
        let win = subset.contains(arrow.winner);
        let lose = subset.contains(arrow.loser);
        per_arrow.push(ArrowFlags {
            colored: win,
            separated: win && lose,
            both_in_complement: !win && !lose,
        });
        flags.colored &= win;
        flags.complement_separated &= win && lose;
        flags.preferring &= !lose;
    }
    Ok((per_arrow, flags))
}

/// Vertex classification by how many of the two row-last letters lie in the
/// coloring set, which equals its colored in/out degree.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum VertexClass {
    Trivial,
    Intermediate,
    Essential,
}

pub fn classify_vertex(pi: &Permutation, subset: &LetterSubset) -> VertexClass {
    let top = subset.contains(pi.last(Kind::Top));
    let bottom = subset.contains(pi.last(Kind::Bottom));
    match (top, bottom) {
        (false, false) => VertexClass::Trivial,
        (true, true) => VertexClass::Essential,
        _ => VertexClass::Intermediate,
    }
}

/// A minimal non-trivial colored path between essential vertices.  All its
/// arrows share one type and one winner; the losers are distinct and only
/// the first lies in the coloring set.
#[derive(Debug, Clone)]
pub struct DecoratedArc {
    pub start: usize,
    pub end: usize,
    pub kind: Kind,
    pub winner: Letter,
    pub first_loser: Letter,
    pub length: usize,
}

/// A maximal subset of a Rauzy class connected by colored arrows, with its
/// vertex classification and (when essential) its arcs.
#[derive(Debug, Clone)]
pub struct DecoratedClass {
    class: RauzyClass,
    subset: LetterSubset,
    members: Vec<usize>,
    classification: Vec<VertexClass>,
    arcs: Vec<DecoratedArc>,
}

/// The maximal colored-connected component of `pi` inside its class.
pub fn decorate(class: &RauzyClass, pi: &Permutation, subset: LetterSubset) -> Result<DecoratedClass> {
    let seed = class.index_of(pi).ok_or(Error::NotInClass)?;
    // colored adjacency, traversed both ways
    let n = class.len();
    let mut forward: Vec<Vec<usize>> = vec![Vec::new(); n];
    let mut backward: Vec<Vec<usize>> = vec![Vec::new(); n];
    for v in 0..n {
        for kind in [Kind::Top, Kind::Bottom] {
            let a = class.arrow(v, kind);
            if subset.contains(a.winner) {
                forward[v].push(a.end);
                backward[a.end].push(v);
            }
        }
    }
    let mut seen = vec![false; n];
    let mut queue = VecDeque::from([seed]);
    seen[seed] = true;
    let mut members = BTreeSet::from([seed]);
    while let Some(v) = queue.pop_front() {
        for &w in forward[v].iter().chain(&backward[v]) {
            if !seen[w] {
                seen[w] = true;
                members.insert(w);
                queue.push_back(w);
            }
        }
    }
    let members: Vec<usize> = members.into_iter().collect();
    let classification: Vec<VertexClass> = (0..n)
        .map(|v| classify_vertex(class.vertex(v), &subset))
        .collect();
    let mut decorated = DecoratedClass {
        class: class.clone(),
        subset,
        members,
        classification,
        arcs: Vec::new(),
    };
    if decorated.is_trivial() {
        debug_assert_eq!(decorated.members.len(), 1);
    }
    if decorated.is_essential() {
        decorated.arcs = decorated.compute_arcs()?;
    }
    Ok(decorated)
}

impl DecoratedClass {
    pub fn class(&self) -> &RauzyClass {
        &self.class
    }

    pub fn subset(&self) -> &LetterSubset {
        &self.subset
    }

    pub fn members(&self) -> &[usize] {
        &self.members
    }

    pub fn classification(&self, vertex: usize) -> VertexClass {
        self.classification[vertex]
    }

    pub fn is_trivial(&self) -> bool {
        self.members
            .iter()
            .any(|&v| self.classification[v] == VertexClass::Trivial)
    }

    pub fn is_essential(&self) -> bool {
        self.members
            .iter()
            .any(|&v| self.classification[v] == VertexClass::Essential)
    }

    pub fn essential_members(&self) -> Vec<usize> {
        self.members
            .iter()
            .copied()
            .filter(|&v| self.classification[v] == VertexClass::Essential)
            .collect()
    }

    pub fn arcs(&self) -> &[DecoratedArc] {
        &self.arcs
    }

    /// The arc of the given type leaving an essential member.
    pub fn arc_from(&self, vertex: usize, kind: Kind) -> Result<&DecoratedArc> {
        self.arcs
            .iter()
            .find(|a| a.start == vertex && a.kind == kind)
            .ok_or(Error::NotEssential)
    }

    fn compute_arcs(&self) -> Result<Vec<DecoratedArc>> {
        let mut arcs = Vec::new();
        for &start in &self.essential_members() {
            for kind in [Kind::Top, Kind::Bottom] {
                let first = self.class.arrow(start, kind);
                debug_assert!(self.subset.contains(first.winner));
                let winner = first.winner;
                let first_loser = first.loser;
                let mut at = first.end;
                let mut length = 1;
                let mut losers = vec![first.loser];
                while self.classification[at] != VertexClass::Essential {
                    debug_assert_eq!(self.classification[at], VertexClass::Intermediate);
                    // the unique colored arrow out of an intermediate vertex
                    let next = [Kind::Top, Kind::Bottom]
                        .into_iter()
                        .map(|k| self.class.arrow(at, k))
                        .find(|a| self.subset.contains(a.winner))
                        .ok_or(Error::NotEssential)?;
                    debug_assert_eq!(next.winner, winner, "arc arrows share one winner");
                    losers.push(next.loser);
                    at = next.end;
                    length += 1;
                }
                debug_assert!(self.subset.contains(first_loser));
                debug_assert!(losers[1..].iter().all(|l| !self.subset.contains(*l)));
                arcs.push(DecoratedArc {
                    start,
                    end: at,
                    kind,
                    winner,
                    first_loser,
                    length,
                });
            }
        }
        Ok(arcs)
    }

    /// `π^ess`: an essential vertex itself, or the end of the unique arc
    /// through an intermediate vertex.
    pub fn essential_anchor(&self, vertex: usize) -> Result<usize> {
        match self.classification[vertex] {
            VertexClass::Essential => Ok(vertex),
            VertexClass::Trivial => Err(Error::NotEssential),
            VertexClass::Intermediate => {
                // follow colored arrows until the next essential vertex
                let mut at = vertex;
                for _ in 0..self.class.len() + 1 {
                    let next = [Kind::Top, Kind::Bottom]
                        .into_iter()
                        .map(|k| self.class.arrow(at, k))
                        .find(|a| self.subset.contains(a.winner))
                        .ok_or(Error::NotEssential)?;
                    at = next.end;
                    if self.classification[at] == VertexClass::Essential {
                        return Ok(at);
                    }
                }
                Err(Error::NotEssential)
            }
        }
    }
}

/// A reduced permutation together with the original letters that survive,
/// in reduced-alphabet order.
#[derive(Debug, Clone, PartialEq)]
pub struct Reduced<T> {
    pub value: T,
    pub letters: Vec<Letter>,
}

/// The admissible end: delete as many letters from the start of both rows
/// as needed to leave the shortest irreducible suffix pair.
fn admissible_end(top: &[Letter], bottom: &[Letter]) -> (Vec<Letter>, Vec<Letter>) {
    let d = top.len();
    let mut split = 0;
    let mut top_seen = 0u16;
    let mut bottom_seen = 0u16;
    for k in 0..d - 1 {
        top_seen |= 1 << top[k];
        bottom_seen |= 1 << bottom[k];
        if top_seen == bottom_seen {
            split = k + 1;
        }
    }
    (top[split..].to_vec(), bottom[split..].to_vec())
}

/// Reduction of an essential (or intermediate, via its anchor) vertex:
/// delete the letters outside the coloring set from both rows and keep the
/// admissible end.
pub fn reduce_vertex(decorated: &DecoratedClass, vertex: usize) -> Result<Reduced<Permutation>> {
    let anchor = decorated.essential_anchor(vertex)?;
    let pi = decorated.class().vertex(anchor);
    let keep = |row: &[Letter]| -> Vec<Letter> {
        row.iter()
            .copied()
            .filter(|&l| decorated.subset.contains(l))
            .collect()
    };
    let (top, bottom) = admissible_end(&keep(pi.row(Kind::Top)), &keep(pi.row(Kind::Bottom)));
    // surviving letters, in original alphabet order
    let mut letters: Vec<Letter> = top.clone();
    letters.sort_unstable();
    let alphabet = Alphabet::new(
        letters
            .iter()
            .map(|&l| pi.alphabet().name(l).to_string()),
    )?;
    let relabel = |row: &[Letter]| -> Vec<Letter> {
        row.iter()
            .map(|l| letters.iter().position(|x| x == l).unwrap() as Letter)
            .collect()
    };
    let value = Permutation::from_rows(alphabet, relabel(&top), relabel(&bottom))?;
    debug_assert!(value.is_irreducible());
    Ok(Reduced { value, letters })
}

/// Reduction of a colored path: complete it to a concatenation of arcs
/// (`γ^ess`), then map each arc to one arrow of the same type whose winner
/// is the arc winner and whose loser is the arc's first loser.
pub fn reduce_path(decorated: &DecoratedClass, path: &Path) -> Result<Reduced<Path>> {
    let class = decorated.class();
    let start = class.index_of(path.start()).ok_or(Error::NotInClass)?;
    let (_, flags) = classify_arrows(path, &decorated.subset)?;
    if !flags.colored {
        return Err(Error::NotEssential);
    }
    // collect the arcs of gamma^ess: one per arrow leaving an essential vertex
    let mut arcs: Vec<&DecoratedArc> = Vec::new();
    let mut at = start;
    for &kind in path.kinds() {
        if decorated.classification(at) == VertexClass::Essential {
            arcs.push(decorated.arc_from(at, kind)?);
        }
        at = class.arrow(at, kind).end;
    }
    let reduced_start = reduce_vertex(decorated, start)?;
    let mut kinds = Vec::with_capacity(arcs.len());
    // sanity: each reduced arrow must carry the arc's winner and first loser
    let mut cursor = reduced_start.value.clone();
    for arc in &arcs {
        let arrow = cursor.apply_operation(arc.kind)?;
        let winner_name = class.alphabet().name(arc.winner);
        let loser_name = class.alphabet().name(arc.first_loser);
        debug_assert_eq!(cursor.alphabet().name(arrow.winner), winner_name);
        debug_assert_eq!(cursor.alphabet().name(arrow.loser), loser_name);
        cursor = arrow.end;
        kinds.push(arc.kind);
    }
    Ok(Reduced {
        value: Path::from_kinds(reduced_start.value, kinds)?,
        letters: reduced_start.letters,
    })
}

/// Drift data of a vertex: the positions of the rightmost letter outside
/// the coloring set in the top and bottom rows, and their sum.
pub fn drift(pi: &Permutation, subset: &LetterSubset) -> Result<(usize, usize, usize)> {
    let pos = |kind: Kind| -> Result<usize> {
        pi.row(kind)
            .iter()
            .rposition(|&l| !subset.contains(l))
            .map(|p| p + 1)
            .ok_or_else(|| Error::OutOfRange("subset complement misses a row".into()))
    };
    let dt = pos(Kind::Top)?;
    let db = pos(Kind::Bottom)?;
    Ok((dt, db, dt + db))
}

/// An arrow between essential vertices is drifting when the drift sum grows
/// by one across it.
pub fn is_drifting(arrow: &crate::perm::Arrow, subset: &LetterSubset) -> Result<bool> {
    let (_, _, before) = drift(&arrow.start, subset)?;
    let (_, _, after) = drift(&arrow.end, subset)?;
    Ok(after == before + 1)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn setup(text: &str, letters: &str) -> (RauzyClass, LetterSubset) {
        let pi = Permutation::parse(text).unwrap();
        let class = RauzyClass::generate(&pi).unwrap();
        let subset = LetterSubset::parse(letters, pi.alphabet()).unwrap();
        (class, subset)
    }

    #[test]
    fn subset_validation() {
        let pi = Permutation::parse("a b c / c b a").unwrap();
        assert!(LetterSubset::parse("a,c", pi.alphabet()).is_ok());
        assert!(LetterSubset::parse("", pi.alphabet()).is_err());
        assert!(LetterSubset::parse("a,b,c", pi.alphabet()).is_err());
        assert!(LetterSubset::parse("z", pi.alphabet()).is_err());
    }

    #[test]
    fn arrow_classification_examples() {
        let pi = Permutation::parse("a b / b a").unwrap();
        let t = Path::from_kinds(pi.clone(), [Kind::Top]).unwrap();
        let sub_b = LetterSubset::parse("b", pi.alphabet()).unwrap();
        let (arrows, flags) = classify_arrows(&t, &sub_b).unwrap();
        // top arrow wins b, loses a
        assert!(arrows[0].colored);
        assert!(flags.colored);
        assert!(flags.preferring);
        let sub_a = LetterSubset::parse("a", pi.alphabet()).unwrap();
        let (arrows, flags) = classify_arrows(&t, &sub_a).unwrap();
        assert!(!arrows[0].colored);
        assert!(!flags.colored);
        assert!(!flags.preferring);
        // trivial path: all flags vacuously true
        let trivial = Path::trivial(pi.clone());
        let (_, flags) = classify_arrows(&trivial, &sub_a).unwrap();
        assert!(flags.colored && flags.complement_separated && flags.preferring);
    }

    #[test]
    fn preferring_means_block_triangular() {
        use crate::cocycle::CocycleMatrix;
        use num::Zero;
        let (class, subset) = setup("a b c d / d c b a", "a,b");
        // sample a bunch of short paths and compare the flag with the
        // block-triangularity of the matrix
        for len in 0..6u32 {
            for code in 0..(1u32 << len) {
                let kinds: Vec<Kind> = (0..len)
                    .map(|i| if code >> i & 1 == 0 { Kind::Top } else { Kind::Bottom })
                    .collect();
                let path = Path::from_kinds(class.vertex(0).clone(), kinds).unwrap();
                let (_, flags) = classify_arrows(&path, &subset).unwrap();
                let m = CocycleMatrix::path_matrix(&path).unwrap();
                let block_triangular = subset.complement_indices().iter().all(|&a| {
                    subset.indices().iter().all(|&b| m[(b, a)].is_zero())
                });
                assert_eq!(flags.preferring, block_triangular, "{path}");
            }
        }
    }

    #[test]
    fn decorate_trivial_and_essential() {
        let (class, sub_b) = setup("a b c / c b a", "b");
        let pi = Permutation::parse("a b c / c b a").unwrap();
        let dec = decorate(&class, &pi, sub_b).unwrap();
        assert!(dec.is_trivial());
        assert_eq!(dec.members().len(), 1);

        let (class, sub_ac) = setup("a b c / c b a", "a,c");
        let dec = decorate(&class, &pi, sub_ac).unwrap();
        assert!(dec.is_essential());
        assert_eq!(
            classify_vertex(&pi, dec.subset()),
            VertexClass::Essential
        );
    }

    #[test]
    fn arcs_have_uniform_type_and_winner() {
        for (text, letters) in [
            ("a b c / c b a", "a,c"),
            ("a b c d / d c b a", "a,d"),
            ("a b c d / d c b a", "b,d"),
            ("a b c d / d c b a", "a,c,d"),
        ] {
            let (class, subset) = setup(text, letters);
            for v in 0..class.len() {
                let dec = decorate(&class, class.vertex(v), subset).unwrap();
                if !dec.is_essential() {
                    continue;
                }
                for arc in dec.arcs() {
                    assert!(dec.subset().contains(arc.winner));
                    assert!(dec.subset().contains(arc.first_loser));
                    assert_eq!(
                        dec.classification(arc.end),
                        VertexClass::Essential
                    );
                }
            }
        }
    }

    #[test]
    fn reduce_symmetric_d3() {
        let (class, subset) = setup("a b c / c b a", "a,c");
        let pi = Permutation::parse("a b c / c b a").unwrap();
        let dec = decorate(&class, &pi, subset).unwrap();
        let reduced = reduce_vertex(&dec, class.index_of(&pi).unwrap()).unwrap();
        assert_eq!(reduced.value.to_string(), "a c / c a");
        assert_eq!(reduced.letters, vec![0, 2]);
    }

    #[test]
    fn reduction_is_a_bijection_on_essential_members() {
        for (text, letters) in [
            ("a b c d / d c b a", "a,d"),
            ("a b c d / d c b a", "a,c,d"),
            ("a b c d e / e d c b a", "a,d,e"),
        ] {
            let (class, subset) = setup(text, letters);
            let mut seen_components: Vec<Vec<usize>> = Vec::new();
            for v in 0..class.len() {
                let dec = decorate(&class, class.vertex(v), subset).unwrap();
                if !dec.is_essential() || seen_components.contains(&dec.members().to_vec()) {
                    continue;
                }
                seen_components.push(dec.members().to_vec());
                let essentials = dec.essential_members();
                let reduced: Vec<String> = essentials
                    .iter()
                    .map(|&e| reduce_vertex(&dec, e).unwrap().value.to_string())
                    .collect();
                // injective
                let mut unique = reduced.clone();
                unique.sort();
                unique.dedup();
                assert_eq!(unique.len(), reduced.len(), "{text} {letters}");
                // onto a full Rauzy class
                let first = reduce_vertex(&dec, essentials[0]).unwrap().value;
                let reduced_class = RauzyClass::generate(&first).unwrap();
                assert_eq!(reduced_class.len(), reduced.len(), "{text} {letters}");
                for r in &reduced {
                    let p = Permutation::parse(r).unwrap();
                    assert!(reduced_class.index_of(&p).is_some());
                }
            }
        }
    }

    #[test]
    fn drift_examples() {
        let pi = Permutation::parse("a b c / c b a").unwrap();
        let subset = LetterSubset::parse("a,c", pi.alphabet()).unwrap();
        assert_eq!(drift(&pi, &subset).unwrap(), (2, 2, 4));
        // positions are bounded by the alphabet size
        let (dt, db, d) = drift(&pi, &subset).unwrap();
        assert!(dt <= 3 && db <= 3 && d <= 6);
    }

    #[test]
    fn drift_never_decreases_along_colored_arrows() {
        let (class, subset) = setup("a b c d / d c b a", "a,d");
        for v in 0..class.len() {
            if classify_vertex(class.vertex(v), &subset) != VertexClass::Essential {
                continue;
            }
            for kind in [Kind::Top, Kind::Bottom] {
                let arrow = class.arrow_value(v, kind);
                if !subset.contains(arrow.winner) {
                    continue;
                }
                let (_, _, before) = drift(&arrow.start, &subset).unwrap();
                let (_, _, after) = drift(&arrow.end, &subset).unwrap();
                assert!(after == before || after == before + 1);
                assert_eq!(is_drifting(&arrow, &subset).unwrap(), after == before + 1);
            }
        }
    }
}
