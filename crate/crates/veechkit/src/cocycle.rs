use std::fmt;
use std::ops::{Index, IndexMut};

use num::bigint::Sign;
use num::{BigInt, BigRational, One, Signed, Zero};

use crate::error::Result;
use crate::path::Path;
use crate::perm::Arrow;

/// Square integer matrix attached to a path of a Rauzy diagram.
///
/// Orientation convention, used throughout the crate: for an arrow with
/// winner `w` and loser `l`, the winner column gains the loser row
/// (`B e_w = e_w + e_l`); acting on weight vectors, `(B q) = q + q_w e_l`;
/// acting on length vectors through the transpose, `B* λ = λ + λ_l e_w`.
#[derive(Clone, PartialEq, Eq)]
pub struct CocycleMatrix {
    d: usize,
    /// Row-major entries; `entries[row * d + col]`.
    entries: Vec<BigInt>,
}

impl fmt::Debug for CocycleMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for r in 0..self.d {
            writeln!(f, "{:?}", &self.entries[r * self.d..(r + 1) * self.d])?;
        }
        Ok(())
    }
}

impl Index<(usize, usize)> for CocycleMatrix {
    type Output = BigInt;
    fn index(&self, (row, col): (usize, usize)) -> &BigInt {
        &self.entries[row * self.d + col]
    }
}

impl IndexMut<(usize, usize)> for CocycleMatrix {
    fn index_mut(&mut self, (row, col): (usize, usize)) -> &mut BigInt {
        &mut self.entries[row * self.d + col]
    }
}

impl CocycleMatrix {
    pub fn identity(d: usize) -> Self {
        let mut entries = vec![BigInt::zero(); d * d];
        for i in 0..d {
            entries[i * d + i] = BigInt::one();
        }
        CocycleMatrix { d, entries }
    }

    pub fn dim(&self) -> usize {
        self.d
    }

    pub fn iter(&self) -> impl Iterator<Item = &BigInt> {
        self.entries.iter()
    }

    /// The elementary matrix of a single arrow.
    pub fn arrow_matrix(a: &Arrow) -> Self {
        let mut m = Self::identity(a.start.len());
        m[(a.loser as usize, a.winner as usize)] = BigInt::one();
        m
    }

    /// `B_gamma` for a path, via `B_{γ1 γ2} = B_{γ2} B_{γ1}`.
    pub fn path_matrix(path: &Path) -> Result<Self> {
        let mut m = Self::identity(path.start().len());
        for arrow in path.arrows()? {
            m.left_mul_arrow(arrow.winner as usize, arrow.loser as usize);
        }
        Ok(m)
    }

    /// In-place `B_a · self` for an arrow: row `loser` += row `winner`.
    pub fn left_mul_arrow(&mut self, winner: usize, loser: usize) {
        let d = self.d;
        for c in 0..d {
            let w = self.entries[winner * d + c].clone();
            self.entries[loser * d + c] += w;
        }
    }

    /// Undo of [`Self::left_mul_arrow`].
    pub fn left_mul_arrow_inverse(&mut self, winner: usize, loser: usize) {
        let d = self.d;
        for c in 0..d {
            let w = self.entries[winner * d + c].clone();
            self.entries[loser * d + c] -= w;
        }
    }

    /// In-place `(B*_a)^{-1} · self` for an arrow: row `winner` -= row `loser`.
    ///
    /// Extending a path by an arrow turns `(B*_γ)^{-1}` into
    /// `(B*_a)^{-1} (B*_γ)^{-1}`, so a running inverse-transpose is
    /// maintained by this single row operation.
    pub fn left_mul_star_inverse_arrow(&mut self, winner: usize, loser: usize) {
        let d = self.d;
        for c in 0..d {
            let l = self.entries[loser * d + c].clone();
            self.entries[winner * d + c] -= l;
        }
    }

    /// Undo of [`Self::left_mul_star_inverse_arrow`].
    pub fn left_mul_star_inverse_arrow_undo(&mut self, winner: usize, loser: usize) {
        let d = self.d;
        for c in 0..d {
            let l = self.entries[loser * d + c].clone();
            self.entries[winner * d + c] += l;
        }
    }

    /// `(B*_γ)^{-1}` for a whole path.
    pub fn path_star_inverse(path: &Path) -> Result<Self> {
        let mut m = Self::identity(path.start().len());
        for arrow in path.arrows()? {
            m.left_mul_star_inverse_arrow(arrow.winner as usize, arrow.loser as usize);
        }
        Ok(m)
    }

    pub fn mul(&self, rhs: &CocycleMatrix) -> CocycleMatrix {
        assert_eq!(self.d, rhs.d);
        let d = self.d;
        let mut entries = vec![BigInt::zero(); d * d];
        for r in 0..d {
            for k in 0..d {
                let a = &self.entries[r * d + k];
                if a.is_zero() {
                    continue;
                }
                for c in 0..d {
                    let b = &rhs.entries[k * d + c];
                    if !b.is_zero() {
                        entries[r * d + c] += a * b;
                    }
                }
            }
        }
        CocycleMatrix { d, entries }
    }

    pub fn transpose(&self) -> CocycleMatrix {
        let d = self.d;
        let mut entries = vec![BigInt::zero(); d * d];
        for r in 0..d {
            for c in 0..d {
                entries[c * d + r] = self.entries[r * d + c].clone();
            }
        }
        CocycleMatrix { d, entries }
    }

    /// Exact determinant by fraction-free (Bareiss) elimination.
    pub fn det(&self) -> BigInt {
        let d = self.d;
        let mut m = self.entries.clone();
        let mut prev = BigInt::one();
        let mut sign = Sign::Plus;
        for k in 0..d {
            // pivot search
            if m[k * d + k].is_zero() {
                let swap = (k + 1..d).find(|&r| !m[r * d + k].is_zero());
                match swap {
                    Some(r) => {
                        for c in 0..d {
                            m.swap(k * d + c, r * d + c);
                        }
                        sign = if sign == Sign::Plus { Sign::Minus } else { Sign::Plus };
                    }
                    None => return BigInt::zero(),
                }
            }
            for r in k + 1..d {
                for c in k + 1..d {
                    let num = &m[r * d + c] * &m[k * d + k] - &m[r * d + k] * &m[k * d + c];
                    m[r * d + c] = num / &prev;
                }
                m[r * d + k] = BigInt::zero();
            }
            prev = m[k * d + k].clone();
        }
        let det = m[(d - 1) * d + (d - 1)].clone();
        if sign == Sign::Minus {
            -det
        } else {
            det
        }
    }

    pub fn is_positive(&self) -> bool {
        self.entries.iter().all(|e| e.is_positive())
    }

    pub fn is_nonnegative(&self) -> bool {
        self.entries.iter().all(|e| !e.is_negative())
    }

    /// Matrix-vector product over the rationals.
    pub fn apply_rational(&self, v: &[BigRational]) -> Vec<BigRational> {
        assert_eq!(v.len(), self.d);
        (0..self.d)
            .map(|r| {
                let mut acc = BigRational::zero();
                for c in 0..self.d {
                    let e = &self.entries[r * self.d + c];
                    if !e.is_zero() {
                        acc += BigRational::from(e.clone()) * &v[c];
                    }
                }
                acc
            })
            .collect()
    }

    pub fn apply_bigint(&self, v: &[BigInt]) -> Vec<BigInt> {
        assert_eq!(v.len(), self.d);
        (0..self.d)
            .map(|r| {
                let mut acc = BigInt::zero();
                for c in 0..self.d {
                    let e = &self.entries[r * self.d + c];
                    if !e.is_zero() {
                        acc += e * &v[c];
                    }
                }
                acc
            })
            .collect()
    }

    pub fn apply_f64(&self, v: &[f64]) -> Vec<f64> {
        use num::ToPrimitive;
        assert_eq!(v.len(), self.d);
        (0..self.d)
            .map(|r| {
                (0..self.d)
                    .map(|c| self.entries[r * self.d + c].to_f64().unwrap_or(f64::NAN) * v[c])
                    .sum()
            })
            .collect()
    }

    /// Row-major array of rows of decimal strings, for JSON reports.
    pub fn to_decimal_rows(&self) -> Vec<Vec<String>> {
        (0..self.d)
            .map(|r| {
                (0..self.d)
                    .map(|c| self.entries[r * self.d + c].to_string())
                    .collect()
            })
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::perm::{Kind, Permutation};

    fn path(text: &str) -> Path {
        Path::parse(text).unwrap()
    }

    fn entries_i64(m: &CocycleMatrix) -> Vec<i64> {
        use num::ToPrimitive;
        m.iter().map(|e| e.to_i64().unwrap()).collect()
    }

    #[test]
    fn arrow_matrix_convention() {
        let pi = Permutation::parse("a b / b a").unwrap();
        let arrow = pi.apply_operation(Kind::Top).unwrap(); // winner b, loser a
        let m = CocycleMatrix::arrow_matrix(&arrow);
        // B e_b = e_a + e_b, B e_a = e_a  (basis order a, b)
        assert_eq!(entries_i64(&m), vec![1, 1, 0, 1]);
        // on weights, (B q) = q + q_winner e_loser
        let q = [BigInt::from(1), BigInt::from(1)];
        assert_eq!(m.apply_bigint(&q), vec![BigInt::from(2), BigInt::from(1)]);
    }

    #[test]
    fn trivial_path_is_identity() {
        let m = CocycleMatrix::path_matrix(&path("a b / b a : ")).unwrap();
        assert_eq!(m, CocycleMatrix::identity(2));
    }

    #[test]
    fn tb_matrix() {
        let m = CocycleMatrix::path_matrix(&path("a b / b a : tb")).unwrap();
        assert_eq!(entries_i64(&m), vec![1, 1, 1, 2]);
        assert_eq!(m.det(), BigInt::one());
    }

    #[test]
    fn composition_law() {
        let g1 = path("a b c / c b a : ttb");
        let g2 = Path::from_kinds(g1.end().unwrap(), [Kind::Bottom, Kind::Top, Kind::Top]).unwrap();
        let whole = g1.concat(&g2).unwrap();
        let m = CocycleMatrix::path_matrix(&whole).unwrap();
        let m1 = CocycleMatrix::path_matrix(&g1).unwrap();
        let m2 = CocycleMatrix::path_matrix(&g2).unwrap();
        assert_eq!(m, m2.mul(&m1));
    }

    #[test]
    fn tb_powers_have_unit_determinant() {
        let start = Permutation::parse("a b / b a").unwrap();
        let mut kinds = Vec::new();
        for _ in 0..30 {
            kinds.push(Kind::Top);
            kinds.push(Kind::Bottom);
            let p = Path::from_kinds(start.clone(), kinds.iter().copied()).unwrap();
            let m = CocycleMatrix::path_matrix(&p).unwrap();
            assert_eq!(m.det(), BigInt::one());
            assert!(m.is_nonnegative());
        }
        // entries of (tb)^30 overflow i64 comfortably; spot-check growth
        let p = Path::from_kinds(start, kinds).unwrap();
        let m = CocycleMatrix::path_matrix(&p).unwrap();
        assert!(m[(1, 1)] > BigInt::from(u64::MAX));
    }

    #[test]
    fn star_inverse_inverts_the_transpose() {
        let p = path("a b c / c b a : tbtbbt");
        let m = CocycleMatrix::path_matrix(&p).unwrap();
        let inv = CocycleMatrix::path_star_inverse(&p).unwrap();
        assert_eq!(inv.mul(&m.transpose()), CocycleMatrix::identity(3));
    }
}
