use num::{BigInt, BigRational, Integer, One, Signed, Zero};

use crate::cocycle::CocycleMatrix;
use crate::error::{Error, Result};

/// One linear functional bounding a cone.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Facet {
    pub coeffs: Vec<BigRational>,
    pub strict: bool,
}

impl Facet {
    pub fn eval_rational(&self, x: &[BigRational]) -> BigRational {
        self.coeffs
            .iter()
            .zip(x)
            .fold(BigRational::zero(), |acc, (c, v)| acc + c * v)
    }

    pub fn eval_bigint(&self, x: &[BigInt]) -> BigRational {
        self.coeffs
            .iter()
            .zip(x)
            .fold(BigRational::zero(), |acc, (c, v)| {
                acc + c * BigRational::from_integer(v.clone())
            })
    }

    pub fn eval_f64(&self, x: &[f64]) -> f64 {
        use num::ToPrimitive;
        self.coeffs
            .iter()
            .zip(x)
            .map(|(c, v)| c.to_f64().unwrap_or(f64::NAN) * v)
            .sum()
    }
}

/// A pointed rational polyhedral cone given by facet functionals, together
/// with a stored interior witness.  Facets marked strict bound the open
/// cone; the closure replaces every `>` by `>=`.
#[derive(Debug, Clone)]
pub struct ConeSpec {
    dim: usize,
    facets: Vec<Facet>,
    witness: Vec<BigRational>,
}

impl ConeSpec {
    pub fn new(dim: usize, facets: Vec<Facet>, witness: Vec<BigRational>) -> Result<Self> {
        let cone = ConeSpec { dim, facets, witness };
        if !cone.contains_strict_rational(&cone.witness) {
            return Err(Error::BoundaryPoint);
        }
        Ok(cone)
    }

    /// The positive orthant of dimension `d`.
    pub fn positive_orthant(d: usize) -> Self {
        let facets = (0..d)
            .map(|i| {
                let mut coeffs = vec![BigRational::zero(); d];
                coeffs[i] = BigRational::one();
                Facet { coeffs, strict: true }
            })
            .collect();
        let witness = vec![BigRational::one(); d];
        ConeSpec { dim: d, facets, witness }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn facets(&self) -> &[Facet] {
        &self.facets
    }

    pub fn witness(&self) -> &[BigRational] {
        &self.witness
    }

    pub fn contains_strict_rational(&self, x: &[BigRational]) -> bool {
        self.facets.iter().all(|f| f.eval_rational(x).is_positive())
    }

    pub fn contains_strict_bigint(&self, x: &[BigInt]) -> bool {
        self.facets.iter().all(|f| f.eval_bigint(x).is_positive())
    }

    pub fn contains_closure_rational(&self, x: &[BigRational]) -> bool {
        self.facets.iter().all(|f| !f.eval_rational(x).is_negative())
    }

    pub fn contains_strict_f64(&self, x: &[f64]) -> bool {
        self.facets.iter().all(|f| f.eval_f64(x) > 0.0)
    }

    /// The pullback `{x : m x ∈ self}`, with the witness supplied by the
    /// caller (typically the image of this cone's witness under `m^{-1}`).
    pub fn pullback(&self, m: &CocycleMatrix, witness: Vec<BigRational>) -> Result<ConeSpec> {
        let d = self.dim;
        let facets = self
            .facets
            .iter()
            .map(|f| {
                let coeffs = (0..d)
                    .map(|j| {
                        (0..d)
                            .map(|i| &f.coeffs[i] * BigRational::from_integer(m[(i, j)].clone()))
                            .fold(BigRational::zero(), |a, b| a + b)
                    })
                    .collect();
                Facet { coeffs, strict: f.strict }
            })
            .collect();
        ConeSpec::new(d, facets, witness)
    }

    /// Extreme rays of the closure as primitive integer vectors, canonically
    /// ordered, computed by the double-description method.
    pub fn extreme_rays(&self) -> Result<Vec<Vec<BigInt>>> {
        let rows = self.integer_facets();
        let d = self.dim;
        if rank_rational(&rows, d) < d {
            return Err(Error::NonPointedCone);
        }

        // Start from a simplicial cone cut out by d independent facets.
        let base = independent_rows(&rows, d);
        let base_matrix: Vec<Vec<BigInt>> = base.iter().map(|&i| rows[i].clone()).collect();
        let mut rays: Vec<Vec<BigInt>> = inverse_columns(&base_matrix);

        let mut processed: Vec<usize> = base.clone();
        for (i, row) in rows.iter().enumerate() {
            if base.contains(&i) {
                continue;
            }
            rays = insert_halfspace(&rays, row, &rows, &processed);
            processed.push(i);
        }
        for r in &mut rays {
            make_primitive(r);
        }
        rays.sort();
        rays.dedup();
        Ok(rays)
    }

    /// Independent oracle for [`Self::extreme_rays`]: try every
    /// `(d-1)`-subset of facets, solve for a one-dimensional kernel and keep
    /// the feasible generators.
    pub fn extreme_rays_brute(&self) -> Result<Vec<Vec<BigInt>>> {
        let rows = self.integer_facets();
        let d = self.dim;
        if rank_rational(&rows, d) < d {
            return Err(Error::NonPointedCone);
        }
        let mut rays: Vec<Vec<BigInt>> = Vec::new();
        let n = rows.len();
        let mut subset: Vec<usize> = (0..d - 1).collect();
        loop {
            let chosen: Vec<Vec<BigInt>> = subset.iter().map(|&i| rows[i].clone()).collect();
            if let Some(mut v) = kernel_generator(&chosen, d) {
                make_primitive(&mut v);
                for cand in [v.clone(), v.iter().map(|x| -x).collect::<Vec<_>>()] {
                    let feasible = rows
                        .iter()
                        .all(|row| !dot(row, &cand).is_negative());
                    if feasible && cand.iter().any(|x| !x.is_zero()) && !rays.contains(&cand) {
                        rays.push(cand);
                    }
                }
            }
            // next (d-1)-subset of {0..n}
            let k = d - 1;
            let mut i = k;
            loop {
                if i == 0 {
                    rays.sort();
                    return Ok(rays);
                }
                i -= 1;
                if subset[i] != i + n - k {
                    subset[i] += 1;
                    for j in i + 1..k {
                        subset[j] = subset[j - 1] + 1;
                    }
                    break;
                }
            }
        }
    }

    /// Facet coefficient rows cleared to primitive integer vectors.
    fn integer_facets(&self) -> Vec<Vec<BigInt>> {
        self.facets
            .iter()
            .map(|f| {
                let lcm = f
                    .coeffs
                    .iter()
                    .fold(BigInt::one(), |acc, c| acc.lcm(c.denom()));
                let mut row: Vec<BigInt> = f
                    .coeffs
                    .iter()
                    .map(|c| c.numer() * (&lcm / c.denom()))
                    .collect();
                make_primitive(&mut row);
                row
            })
            .collect()
    }
}

fn dot(a: &[BigInt], b: &[BigInt]) -> BigInt {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn make_primitive(v: &mut [BigInt]) {
    let mut g = BigInt::zero();
    for x in v.iter() {
        g = g.gcd(x);
    }
    if g > BigInt::one() {
        for x in v.iter_mut() {
            *x = &*x / &g;
        }
    }
}

fn rank_rational(rows: &[Vec<BigInt>], d: usize) -> usize {
    let mut m: Vec<Vec<BigRational>> = rows
        .iter()
        .map(|r| r.iter().map(|x| BigRational::from_integer(x.clone())).collect())
        .collect();
    let mut rank = 0;
    for col in 0..d {
        let pivot = (rank..m.len()).find(|&r| !m[r][col].is_zero());
        let Some(p) = pivot else { continue };
        m.swap(rank, p);
        let inv = m[rank][col].clone();
        for r in 0..m.len() {
            if r != rank && !m[r][col].is_zero() {
                let factor = &m[r][col] / &inv;
                for c in col..d {
                    let sub = &factor * &m[rank][c];
                    m[r][c] -= sub;
                }
            }
        }
        rank += 1;
        if rank == m.len() {
            break;
        }
    }
    rank
}

/// Indices of `d` linearly independent rows.
fn independent_rows(rows: &[Vec<BigInt>], d: usize) -> Vec<usize> {
    let mut chosen: Vec<usize> = Vec::new();
    for i in 0..rows.len() {
        let mut trial: Vec<Vec<BigInt>> = chosen.iter().map(|&j| rows[j].clone()).collect();
        trial.push(rows[i].clone());
        if rank_rational(&trial, d) == trial.len() {
            chosen.push(i);
            if chosen.len() == d {
                break;
            }
        }
    }
    chosen
}

/// Columns of the inverse of a square integer matrix, scaled to integer
/// vectors: column `j` solves `M x = e_j` up to a positive factor.
fn inverse_columns(m: &[Vec<BigInt>]) -> Vec<Vec<BigInt>> {
    let d = m.len();
    let mut out = Vec::with_capacity(d);
    for j in 0..d {
        let mut rhs = vec![BigRational::zero(); d];
        rhs[j] = BigRational::one();
        let x = solve_rational(m, &rhs).expect("base matrix is invertible");
        let lcm = x.iter().fold(BigInt::one(), |acc, c| acc.lcm(c.denom()));
        let mut v: Vec<BigInt> = x.iter().map(|c| c.numer() * (&lcm / c.denom())).collect();
        make_primitive(&mut v);
        out.push(v);
    }
    out
}

fn solve_rational(m: &[Vec<BigInt>], rhs: &[BigRational]) -> Option<Vec<BigRational>> {
    let d = rhs.len();
    let mut a: Vec<Vec<BigRational>> = m
        .iter()
        .map(|r| r.iter().map(|x| BigRational::from_integer(x.clone())).collect())
        .collect();
    let mut b = rhs.to_vec();
    for col in 0..d {
        let pivot = (col..d).find(|&r| !a[r][col].is_zero())?;
        a.swap(col, pivot);
        b.swap(col, pivot);
        let inv = a[col][col].clone();
        for r in 0..d {
            if r != col && !a[r][col].is_zero() {
                let factor = &a[r][col] / &inv;
                for c in col..d {
                    let sub = &factor * &a[col][c];
                    a[r][c] -= sub;
                }
                let sub = &factor * &b[col];
                b[r] -= sub;
            }
        }
    }
    Some(
        (0..d)
            .map(|i| &b[i] / &a[i][i])
            .collect(),
    )
}

/// Generator of the kernel of `rows` when it is one-dimensional.
fn kernel_generator(rows: &[Vec<BigInt>], d: usize) -> Option<Vec<BigInt>> {
    if rank_rational(rows, d) != d - 1 {
        return None;
    }
    // Reduced row echelon over the rationals, then read off the free column.
    let mut m: Vec<Vec<BigRational>> = rows
        .iter()
        .map(|r| r.iter().map(|x| BigRational::from_integer(x.clone())).collect())
        .collect();
    let mut pivots: Vec<usize> = Vec::new();
    let mut rank = 0;
    for col in 0..d {
        let pivot = (rank..m.len()).find(|&r| !m[r][col].is_zero());
        let Some(p) = pivot else { continue };
        m.swap(rank, p);
        let inv = m[rank][col].clone();
        for c in col..d {
            m[rank][c] = &m[rank][c] / &inv;
        }
        for r in 0..m.len() {
            if r != rank && !m[r][col].is_zero() {
                let factor = m[r][col].clone();
                for c in col..d {
                    let sub = &factor * &m[rank][c];
                    m[r][c] -= sub;
                }
            }
        }
        pivots.push(col);
        rank += 1;
    }
    let free = (0..d).find(|c| !pivots.contains(c))?;
    let mut x = vec![BigRational::zero(); d];
    x[free] = BigRational::one();
    for (r, &pc) in pivots.iter().enumerate() {
        x[pc] = -m[r][free].clone();
    }
    let lcm = x.iter().fold(BigInt::one(), |acc, c| acc.lcm(c.denom()));
    Some(x.iter().map(|c| c.numer() * (&lcm / c.denom())).collect())
}

/// One double-description step: intersect the cone generated by `rays` with
/// `{x : row(x) >= 0}`.  `processed` indexes the facets already active; the
/// combinatorial adjacency test runs against them.
fn insert_halfspace(
    rays: &[Vec<BigInt>],
    row: &[BigInt],
    all_rows: &[Vec<BigInt>],
    processed: &[usize],
) -> Vec<Vec<BigInt>> {
    let values: Vec<BigInt> = rays.iter().map(|r| dot(row, r)).collect();
    let mut keep: Vec<Vec<BigInt>> = Vec::new();
    let mut plus = Vec::new();
    let mut minus = Vec::new();
    for (i, v) in values.iter().enumerate() {
        if v.is_negative() {
            minus.push(i);
        } else {
            keep.push(rays[i].clone());
            if v.is_positive() {
                plus.push(i);
            }
        }
    }
    let tight_set = |ray: &[BigInt]| -> Vec<bool> {
        processed
            .iter()
            .map(|&f| dot(&all_rows[f], ray).is_zero())
            .collect()
    };
    let tights: Vec<Vec<bool>> = rays.iter().map(|r| tight_set(r)).collect();
    for &p in &plus {
        for &n in &minus {
            let common: Vec<bool> = tights[p]
                .iter()
                .zip(&tights[n])
                .map(|(a, b)| *a && *b)
                .collect();
            // adjacency: no third ray is tight on every facet common to p and n
            let adjacent = (0..rays.len()).all(|k| {
                k == p || k == n || common.iter().zip(&tights[k]).any(|(c, t)| *c && !*t)
            });
            if !adjacent {
                continue;
            }
            let mut new_ray: Vec<BigInt> = (0..row.len())
                .map(|c| &values[p] * &rays[n][c] - &values[n] * &rays[p][c])
                .collect();
            make_primitive(&mut new_ray);
            if !keep.contains(&new_ray) {
                keep.push(new_ray);
            }
        }
    }
    keep
}

/// The Hilbert pseudo-metric of the cone evaluated through its facet
/// functionals: `ln( max_i f_i(x)/f_i(y) * max_j f_j(y)/f_j(x) )`.
///
/// Both points must be strictly inside the cone.  Proportional vectors are
/// at distance zero.
pub fn hilbert_distance_rational(
    cone: &ConeSpec,
    x: &[BigRational],
    y: &[BigRational],
) -> Result<f64> {
    let fx: Vec<BigRational> = cone.facets().iter().map(|f| f.eval_rational(x)).collect();
    let fy: Vec<BigRational> = cone.facets().iter().map(|f| f.eval_rational(y)).collect();
    if fx.iter().any(|v| !v.is_positive()) || fy.iter().any(|v| !v.is_positive()) {
        return Err(Error::BoundaryPoint);
    }
    let mut max_xy: Option<BigRational> = None;
    let mut max_yx: Option<BigRational> = None;
    for (a, b) in fx.iter().zip(&fy) {
        let r = a / b;
        if max_xy.as_ref().map_or(true, |m| &r > m) {
            max_xy = Some(r.clone());
        }
        let r = b / a;
        if max_yx.as_ref().map_or(true, |m| &r > m) {
            max_yx = Some(r);
        }
    }
    let prod = max_xy.unwrap() * max_yx.unwrap();
    use num::ToPrimitive;
    Ok(prod.to_f64().map_or(f64::INFINITY, f64::ln))
}

/// `f64` twin of [`hilbert_distance_rational`] for sampled pairs.
pub fn hilbert_distance_f64(cone: &ConeSpec, x: &[f64], y: &[f64]) -> Result<f64> {
    let fx: Vec<f64> = cone.facets().iter().map(|f| f.eval_f64(x)).collect();
    let fy: Vec<f64> = cone.facets().iter().map(|f| f.eval_f64(y)).collect();
    if fx.iter().any(|v| *v <= 0.0) || fy.iter().any(|v| *v <= 0.0) {
        return Err(Error::BoundaryPoint);
    }
    let mut max_xy = f64::NEG_INFINITY;
    let mut max_yx = f64::NEG_INFINITY;
    for (a, b) in fx.iter().zip(&fy) {
        max_xy = max_xy.max(a / b);
        max_yx = max_yx.max(b / a);
    }
    Ok((max_xy * max_yx).ln())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::omega::theta_cone;
    use crate::perm::Permutation;

    fn ray(v: &[i64]) -> Vec<BigInt> {
        v.iter().map(|&x| BigInt::from(x)).collect()
    }

    fn q(n: i64) -> BigRational {
        BigRational::from_integer(BigInt::from(n))
    }

    #[test]
    fn orthant_rays() {
        let rays = ConeSpec::positive_orthant(2).extreme_rays().unwrap();
        assert_eq!(rays, vec![ray(&[0, 1]), ray(&[1, 0])]);
        let rays3 = ConeSpec::positive_orthant(3).extreme_rays().unwrap();
        assert_eq!(rays3.len(), 3);
    }

    #[test]
    fn theta_d2_rays() {
        let cone = theta_cone(&Permutation::parse("a b / b a").unwrap());
        let mut rays = cone.extreme_rays().unwrap();
        rays.sort();
        let mut expected = vec![ray(&[1, 0]), ray(&[0, -1])];
        expected.sort();
        assert_eq!(rays, expected);
    }

    #[test]
    fn theta_d3_rays_match_brute_force() {
        let cone = theta_cone(&Permutation::parse("a b c / c b a").unwrap());
        let dd = cone.extreme_rays().unwrap();
        let brute = cone.extreme_rays_brute().unwrap();
        assert_eq!(dd, brute);
        assert_eq!(dd.len(), 4);
        // each ray annihilates exactly two of the four facets
        for r in &dd {
            let tight = cone
                .facets()
                .iter()
                .filter(|f| f.eval_bigint(r).is_zero())
                .count();
            assert_eq!(tight, 2, "{r:?}");
        }
    }

    #[test]
    fn theta_rays_match_brute_force_across_classes() {
        use crate::diagram::RauzyClass;
        for d in 2..=5 {
            let class = RauzyClass::generate(&Permutation::symmetric(d).unwrap()).unwrap();
            for v in class.vertices() {
                let cone = theta_cone(v);
                assert_eq!(
                    cone.extreme_rays().unwrap(),
                    cone.extreme_rays_brute().unwrap(),
                    "{v}"
                );
            }
        }
    }

    #[test]
    fn rays_of_a_generic_pointed_cone() {
        // {x >= 0, y >= 0, x + y - z >= 0, z >= 0} in R^3
        let f = |c: &[i64]| Facet {
            coeffs: c.iter().map(|&x| q(x)).collect(),
            strict: false,
        };
        let cone = ConeSpec::new(
            3,
            vec![f(&[1, 0, 0]), f(&[0, 1, 0]), f(&[1, 1, -1]), f(&[0, 0, 1])],
            vec![q(1), q(1), q(1)],
        )
        .unwrap();
        assert_eq!(cone.extreme_rays().unwrap(), cone.extreme_rays_brute().unwrap());
    }

    #[test]
    fn non_pointed_cone_is_rejected() {
        let cone = ConeSpec {
            dim: 2,
            facets: vec![Facet { coeffs: vec![q(1), q(0)], strict: false }],
            witness: vec![q(1), q(0)],
        };
        assert!(matches!(cone.extreme_rays(), Err(Error::NonPointedCone)));
    }

    #[test]
    fn hilbert_distance_examples() {
        let orthant = ConeSpec::positive_orthant(2);
        let d = hilbert_distance_rational(&orthant, &[q(1), q(1)], &[q(2), q(1)]).unwrap();
        assert!((d - std::f64::consts::LN_2).abs() < 1e-14);
        let zero = hilbert_distance_rational(&orthant, &[q(1), q(1)], &[q(3), q(3)]).unwrap();
        assert_eq!(zero, 0.0);
        let same = hilbert_distance_rational(&orthant, &[q(1), q(1)], &[q(1), q(1)]).unwrap();
        assert_eq!(same, 0.0);
        assert!(hilbert_distance_rational(&orthant, &[q(0), q(1)], &[q(1), q(1)]).is_err());
    }

    #[test]
    fn hilbert_metric_axioms_on_random_triples() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(7);
        let orthant = ConeSpec::positive_orthant(4);
        for _ in 0..200 {
            let mut pt = || -> Vec<f64> { (0..4).map(|_| rng.gen_range(0.05..5.0)).collect() };
            let (x, y, z) = (pt(), pt(), pt());
            let dxy = hilbert_distance_f64(&orthant, &x, &y).unwrap();
            let dyx = hilbert_distance_f64(&orthant, &y, &x).unwrap();
            let dxz = hilbert_distance_f64(&orthant, &x, &z).unwrap();
            let dzy = hilbert_distance_f64(&orthant, &z, &y).unwrap();
            assert!((dxy - dyx).abs() < 1e-12);
            assert!(dxy >= 0.0);
            assert!(dxy <= dxz + dzy + 1e-12);
            // projective invariance
            let sx: Vec<f64> = x.iter().map(|v| 3.25 * v).collect();
            let ds = hilbert_distance_f64(&orthant, &sx, &y).unwrap();
            assert!((dxy - ds).abs() < 1e-12);
        }
    }
}
