use num::BigRational;

use crate::cone::{ConeSpec, Facet};
use crate::numeric::Scalar;
use crate::perm::{Kind, Permutation};

/// The antisymmetric pairing matrix of a permutation.
///
/// `entry(x, y)` is `+1` when `x` comes later on top and earlier on the
/// bottom than `y`, `-1` in the mirrored case, `0` otherwise; it equals
/// `<Ω e_x, e_y>`, so the y-coordinate of `Ω v` is `Σ_x entry(x, y) v_x`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OmegaMatrix {
    d: usize,
    entries: Vec<i8>,
}

impl OmegaMatrix {
    pub fn dim(&self) -> usize {
        self.d
    }

    pub fn entry(&self, x: usize, y: usize) -> i8 {
        self.entries[x * self.d + y]
    }

    /// `Ω v`.
    pub fn apply<S: Scalar>(&self, v: &[S]) -> Vec<S> {
        assert_eq!(v.len(), self.d);
        (0..self.d)
            .map(|y| {
                let mut acc = S::zero();
                for x in 0..self.d {
                    match self.entry(x, y) {
                        1 => acc = acc + v[x].clone(),
                        -1 => acc = acc - v[x].clone(),
                        _ => {}
                    }
                }
                acc
            })
            .collect()
    }
}

pub fn omega_matrix(pi: &Permutation) -> OmegaMatrix {
    let d = pi.len();
    let mut entries = vec![0i8; d * d];
    for x in 0..d {
        for y in 0..d {
            let t = pi.position(Kind::Top, x as u8) as i64 - pi.position(Kind::Top, y as u8) as i64;
            let b =
                pi.position(Kind::Bottom, x as u8) as i64 - pi.position(Kind::Bottom, y as u8) as i64;
            entries[x * d + y] = if t > 0 && b < 0 {
                1
            } else if t < 0 && b > 0 {
                -1
            } else {
                0
            };
        }
    }
    OmegaMatrix { d, entries }
}

/// Rectangle heights `h = -Ω(π) τ`.
pub fn height_vector<S: Scalar>(pi: &Permutation, tau: &[S]) -> Vec<S> {
    omega_matrix(pi).apply(tau).into_iter().map(|v| -v).collect()
}

/// Area of the suspended surface, `-<λ, Ω τ>`.
pub fn area_form<S: Scalar>(omega: &OmegaMatrix, lambda: &[S], tau: &[S]) -> S {
    let omega_tau = omega.apply(tau);
    let mut acc = S::zero();
    for (l, w) in lambda.iter().zip(&omega_tau) {
        acc = acc - l.clone() * w.clone();
    }
    acc
}

/// The open cone of admissible suspension data over `π`: for every
/// `1 <= k <= d-1` the first `k` top letters carry positive total `τ` and
/// the first `k` bottom letters a negative one.  The stored interior
/// witness is `τ_ξ = π_b(ξ) - π_t(ξ)`.
pub fn theta_cone(pi: &Permutation) -> ConeSpec {
    let d = pi.len();
    let mut facets = Vec::with_capacity(2 * (d - 1));
    for kind in [Kind::Top, Kind::Bottom] {
        let sign = match kind {
            Kind::Top => 1,
            Kind::Bottom => -1,
        };
        for k in 1..d {
            let mut coeffs = vec![BigRational::from_int(0); d];
            for &l in &pi.row(kind)[..k] {
                coeffs[l as usize] = BigRational::from_int(sign);
            }
            facets.push(Facet { coeffs, strict: true });
        }
    }
    let witness: Vec<BigRational> = (0..d)
        .map(|x| {
            BigRational::from_int(
                pi.position(Kind::Bottom, x as u8) as i64 - pi.position(Kind::Top, x as u8) as i64,
            )
        })
        .collect();
    ConeSpec::new(d, facets, witness).expect("theta witness is interior")
}

#[cfg(test)]
mod tests {
    use super::*;
    use num::BigRational;

    fn p(text: &str) -> Permutation {
        Permutation::parse(text).unwrap()
    }

    fn q(n: i64) -> BigRational {
        BigRational::from_int(n)
    }

    #[test]
    fn omega_d2() {
        let m = omega_matrix(&p("a b / b a"));
        assert_eq!(m.entry(0, 1), -1);
        assert_eq!(m.entry(1, 0), 1);
        assert_eq!(m.entry(0, 0), 0);
        assert_eq!(m.entry(1, 1), 0);
    }

    #[test]
    fn omega_is_antisymmetric() {
        for text in ["a b / b a", "a b c / c b a", "a b c d / d c b a", "a b c d / d a c b"] {
            let m = omega_matrix(&p(text));
            for x in 0..m.dim() {
                assert_eq!(m.entry(x, x), 0);
                for y in 0..m.dim() {
                    assert_eq!(m.entry(x, y), -m.entry(y, x));
                }
            }
        }
    }

    #[test]
    fn omega_d3_entry() {
        let m = omega_matrix(&p("a b c / c b a"));
        // pi_t(a) < pi_t(c), pi_b(a) > pi_b(c)
        assert_eq!(m.entry(0, 2), -1);
        assert_eq!(m.entry(2, 0), 1);
    }

    #[test]
    fn heights_d2() {
        let h = height_vector(&p("a b / b a"), &[q(1), q(-1)]);
        assert_eq!(h, vec![q(1), q(1)]);
        let z = height_vector(&p("a b / b a"), &[q(0), q(0)]);
        assert_eq!(z, vec![q(0), q(0)]);
    }

    #[test]
    fn area_d2() {
        let pi = p("a b / b a");
        let omega = omega_matrix(&pi);
        let a = area_form(
            &omega,
            &[BigRational::from_ratio(1, 2), BigRational::from_ratio(1, 2)],
            &[q(1), q(-1)],
        );
        assert_eq!(a, q(1));
        let zero = area_form(&omega, &[q(1), q(1)], &[q(0), q(0)]);
        assert_eq!(zero, q(0));
    }

    #[test]
    fn theta_facets_d2_and_d3() {
        let c2 = theta_cone(&p("a b / b a"));
        assert_eq!(c2.facets().len(), 2);
        assert!(c2.contains_strict_rational(&[q(1), q(-1)]));
        assert!(!c2.contains_strict_rational(&[q(1), q(1)]));

        let c3 = theta_cone(&p("a b c / c b a"));
        assert_eq!(c3.facets().len(), 4);
        // witness (2, 0, -2)
        assert_eq!(c3.witness(), &[q(2), q(0), q(-2)]);
        assert!(c3.contains_strict_rational(c3.witness()));
    }

    #[test]
    fn witness_is_interior_for_whole_classes() {
        use crate::diagram::RauzyClass;
        for d in 2..=5 {
            let class = RauzyClass::generate(&Permutation::symmetric(d).unwrap()).unwrap();
            for v in class.vertices() {
                let cone = theta_cone(v);
                assert!(cone.contains_strict_rational(cone.witness()), "{v}");
            }
        }
    }

    #[test]
    fn theta_implies_positive_heights() {
        // τ in Θ_π forces h = -Ω τ into the positive orthant
        use crate::diagram::RauzyClass;
        let class = RauzyClass::generate(&p("a b c d / d c b a")).unwrap();
        for v in class.vertices() {
            let cone = theta_cone(v);
            let h = height_vector(v, cone.witness());
            assert!(h.iter().all(|x| x > &q(0)), "{v}: {h:?}");
        }
    }
}
