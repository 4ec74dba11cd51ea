use std::collections::HashSet;

use num::BigInt;

use crate::cocycle::CocycleMatrix;
use crate::cone::ConeSpec;
use crate::diagram::RauzyClass;
use crate::error::{Error, Result};
use crate::omega::theta_cone;
use crate::path::Path;
use crate::perm::Kind;

/// Maximal `k` such that the path splits into `k` complete factors, found by
/// greedily cutting minimal complete prefixes.  Greedy cutting maximizes the
/// number of factors, so this is exactly the completeness degree.
pub fn completeness(path: &Path) -> Result<usize> {
    let d = path.start().len();
    let mut seen: HashSet<u8> = HashSet::new();
    let mut k = 0;
    for arrow in path.arrows()? {
        seen.insert(arrow.winner);
        if seen.len() == d {
            k += 1;
            seen.clear();
        }
    }
    Ok(k)
}

/// True when every entry of `B_γ` is at least one.
pub fn is_positive(path: &Path) -> Result<bool> {
    Ok(CocycleMatrix::path_matrix(path)?.is_positive())
}

/// A path is strongly positive when it is positive and `(B*_γ)^{-1}` maps
/// the closed suspension cone of its start, minus the origin, strictly into
/// the open suspension cone of its end.  Decided exactly on the extreme rays
/// of the closed start cone: linear maps preserve extreme-ray generation, so
/// checking rays is necessary and sufficient.
pub fn is_strongly_positive(path: &Path) -> Result<bool> {
    let matrix = CocycleMatrix::path_matrix(path)?;
    if !matrix.is_positive() {
        return Ok(false);
    }
    let start_cone = theta_cone(path.start());
    let end_cone = theta_cone(&path.end()?);
    let inv = CocycleMatrix::path_star_inverse(path)?;
    strongly_positive_on_rays(&start_cone.extreme_rays()?, &inv, &end_cone)
}

fn strongly_positive_on_rays(
    rays: &[Vec<BigInt>],
    star_inverse: &CocycleMatrix,
    end_cone: &ConeSpec,
) -> Result<bool> {
    for ray in rays {
        let image = star_inverse.apply_bigint(ray);
        if !end_cone.contains_strict_bigint(&image) {
            return Ok(false);
        }
    }
    Ok(true)
}

/// A loop is neat when it is strongly positive and no non-trivial proper
/// prefix equals a suffix (as kind sequences anchored at matching vertices).
pub fn is_neat(path: &Path) -> Result<bool> {
    let vertices = path.vertices()?;
    let end = vertices.last().unwrap();
    if end != path.start() {
        return Err(Error::NotALoop);
    }
    if has_border(path)? {
        return Ok(false);
    }
    is_strongly_positive(path)
}

/// Check for a non-trivial proper prefix that equals a suffix of the loop.
/// The suffix of length `k` is the path starting at the vertex `m - k` steps
/// in; equality requires that vertex to be the loop's start.
pub fn has_border(path: &Path) -> Result<bool> {
    let m = path.len();
    let kinds = path.kinds();
    let vertices = path.vertices()?;
    for k in 1..m {
        if vertices[m - k] == *path.start() && kinds[..k] == kinds[m - k..] {
            return Ok(true);
        }
    }
    Ok(false)
}

/// Outcome of an exhaustive search over the binary path tree for
/// counterexamples to the positivity lemmas.
#[derive(Debug, Clone, Default)]
pub struct LemmaSearch {
    pub paths_checked: u64,
    pub complete_hits: u64,
    pub counterexamples: Vec<Path>,
}

/// Exhaustively check, over every path of length up to `max_len` from every
/// vertex of the class, that `k`-completeness with `k >= threshold` implies
/// the given predicate.  Matrices and inverse transposes are maintained by
/// in-place row operations along the depth-first walk.
pub fn search_completeness_lemma<P>(
    class: &RauzyClass,
    max_len: usize,
    threshold: usize,
    mut predicate: P,
) -> Result<LemmaSearch>
where
    P: FnMut(&Path, &CocycleMatrix, &CocycleMatrix) -> Result<bool>,
{
    let d = class.alphabet().len();
    let mut out = LemmaSearch::default();
    for start in 0..class.len() {
        let mut kinds: Vec<Kind> = Vec::new();
        let mut matrix = CocycleMatrix::identity(d);
        let mut star_inv = CocycleMatrix::identity(d);
        // stack of (vertex, completeness segments) driven manually
        struct Frame {
            vertex: usize,
            next: u8,
        }
        let mut seen_stack: Vec<(u64, usize)> = vec![(0, 0)]; // (winner bitmask, factors)
        let mut stack = vec![Frame { vertex: start, next: 0 }];
        while let Some(frame) = stack.last_mut() {
            if frame.next == 2 {
                stack.pop();
                if let Some(kind) = kinds.pop() {
                    let parent = stack.last().unwrap().vertex;
                    let arrow = class.arrow(parent, kind);
                    matrix.left_mul_arrow_inverse(arrow.winner as usize, arrow.loser as usize);
                    star_inv
                        .left_mul_star_inverse_arrow_undo(arrow.winner as usize, arrow.loser as usize);
                    seen_stack.pop();
                }
                continue;
            }
            let kind = if frame.next == 0 { Kind::Top } else { Kind::Bottom };
            frame.next += 1;
            if kinds.len() == max_len {
                continue;
            }
            let vertex = frame.vertex;
            let arrow = class.arrow(vertex, kind);
            kinds.push(kind);
            matrix.left_mul_arrow(arrow.winner as usize, arrow.loser as usize);
            star_inv.left_mul_star_inverse_arrow(arrow.winner as usize, arrow.loser as usize);
            let (mut mask, mut factors) = *seen_stack.last().unwrap();
            mask |= 1 << arrow.winner;
            if mask.count_ones() as usize == d {
                factors += 1;
                mask = 0;
            }
            seen_stack.push((mask, factors));
            out.paths_checked += 1;
            if factors >= threshold {
                out.complete_hits += 1;
                let path = Path::from_kinds(class.vertex(start).clone(), kinds.iter().copied())?;
                if !predicate(&path, &matrix, &star_inv)? {
                    out.counterexamples.push(path);
                }
            }
            stack.push(Frame {
                vertex: arrow.end,
                next: 0,
            });
        }
    }
    Ok(out)
}

/// Search for `(2d-3)`-complete non-positive paths.
pub fn search_positive_lemma(class: &RauzyClass, max_len: usize) -> Result<LemmaSearch> {
    let d = class.alphabet().len();
    search_completeness_lemma(class, max_len, 2 * d - 3, |_, matrix, _| Ok(matrix.is_positive()))
}

/// Search for `(3d-4)`-complete paths that fail strong positivity.
pub fn search_strongly_positive_lemma(class: &RauzyClass, max_len: usize) -> Result<LemmaSearch> {
    let d = class.alphabet().len();
    let rays: Vec<Vec<Vec<BigInt>>> = class
        .vertices()
        .iter()
        .map(|v| theta_cone(v).extreme_rays())
        .collect::<Result<_>>()?;
    let cones: Vec<ConeSpec> = class.vertices().iter().map(theta_cone).collect();
    search_completeness_lemma(class, max_len, 3 * d - 4, |path, matrix, star_inv| {
        if !matrix.is_positive() {
            return Ok(false);
        }
        let start = class.index_of(path.start()).ok_or(Error::NotInClass)?;
        let end = class.index_of(&path.end()?).ok_or(Error::NotInClass)?;
        strongly_positive_on_rays(&rays[start], star_inv, &cones[end])
    })
}
