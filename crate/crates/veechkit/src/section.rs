use num::ToPrimitive;
use rand::Rng;

use crate::cocycle::CocycleMatrix;
use crate::cone::ConeSpec;
use crate::diagram::RauzyClass;
use crate::error::{Error, Result};
use crate::numeric::Scalar;
use crate::omega::theta_cone;
use crate::path::Path;
use crate::perm::Kind;
use crate::positivity::is_neat;
use crate::zippered::{in_theta, sample_theta, ZipperedState};

/// Default cap on induction steps while waiting for a section return.
/// Escaping orbits exist but carry zero measure.
pub const DEFAULT_RETURN_CAP: usize = 100_000;

/// A precompact Poincaré section for the renormalization flow, carried by a
/// neat loop `γ*`: the set of unit-norm, unit-area states whose forward
/// itinerary begins with `γ*` and whose suspension data pulls back into the
/// cone over the loop's base vertex.
#[derive(Debug, Clone)]
pub struct SectionSpec {
    class: RauzyClass,
    loop_path: Path,
    base: usize,
    star: CocycleMatrix,
    star_inv: CocycleMatrix,
    star_i64: Vec<i64>,
    star_inv_i64: Vec<i64>,
    theta: ConeSpec,
    theta_loop: ConeSpec,
    pub return_cap: usize,
}

/// Result of one first-return computation.
#[derive(Debug, Clone)]
pub struct SectionReturn<S: Scalar> {
    pub state: ZipperedState<S>,
    /// Return time of the flow, `-ln |(B*_γ)^{-1} λ|`.
    pub roof: f64,
    /// The return word.
    pub word: Path,
}

impl SectionSpec {
    pub fn new(class: RauzyClass, loop_path: Path) -> Result<Self> {
        if !is_neat(&loop_path)? {
            return Err(Error::NotNeat(loop_path.to_string()));
        }
        let base = class
            .index_of(loop_path.start())
            .ok_or(Error::NotInClass)?;
        let star = CocycleMatrix::path_matrix(&loop_path)?.transpose();
        let star_inv = CocycleMatrix::path_star_inverse(&loop_path)?;
        let d = class.alphabet().len();
        let to_i64 = |m: &CocycleMatrix| -> Vec<i64> {
            (0..d * d)
                .map(|i| m[(i / d, i % d)].to_i64().expect("loop matrix fits i64"))
                .collect()
        };
        let theta = theta_cone(loop_path.start());
        let witness = star_inv.apply_rational(theta.witness());
        let theta_loop = theta.pullback(&star, witness)?;
        Ok(SectionSpec {
            star_i64: to_i64(&star),
            star_inv_i64: to_i64(&star_inv),
            class,
            loop_path,
            base,
            star,
            star_inv,
            theta,
            theta_loop,
            return_cap: DEFAULT_RETURN_CAP,
        })
    }

    /// Shortest neat loop at the given vertex, searched in depth order with
    /// the top arrow explored first.
    pub fn find_neat_loop(class: &RauzyClass, base: usize, max_len: usize) -> Result<Path> {
        for len in 1..=max_len {
            let mut kinds = vec![Kind::Top; len];
            loop {
                // follow the kinds and keep only loops
                let mut at = base;
                for &k in &kinds {
                    at = class.arrow(at, k).end;
                }
                if at == base {
                    let path =
                        Path::from_kinds(class.vertex(base).clone(), kinds.iter().copied())?;
                    if is_neat(&path)? {
                        return Ok(path);
                    }
                }
                // next kind string
                let mut i = len;
                loop {
                    if i == 0 {
                        break;
                    }
                    i -= 1;
                    if kinds[i] == Kind::Top {
                        kinds[i] = Kind::Bottom;
                        for k in kinds.iter_mut().skip(i + 1) {
                            *k = Kind::Top;
                        }
                        break;
                    }
                }
                if i == 0 && kinds.iter().all(|&k| k == Kind::Top) {
                    break;
                }
            }
        }
        Err(Error::NotNeat(format!(
            "no neat loop of length <= {max_len} at vertex {base}"
        )))
    }

    pub fn class(&self) -> &RauzyClass {
        &self.class
    }

    pub fn loop_path(&self) -> &Path {
        &self.loop_path
    }

    pub fn base_vertex(&self) -> usize {
        self.base
    }

    /// The cone `Θ_π` over the base vertex.
    pub fn theta(&self) -> &ConeSpec {
        &self.theta
    }

    /// The fiber cone `Θ_{γ*}` of the section.
    pub fn theta_loop(&self) -> &ConeSpec {
        &self.theta_loop
    }

    pub fn star(&self) -> &CocycleMatrix {
        &self.star
    }

    fn apply_i64<S: Scalar>(&self, m: &[i64], v: &[S]) -> Vec<S> {
        let d = v.len();
        (0..d)
            .map(|r| {
                let mut acc = S::zero();
                for c in 0..d {
                    let e = m[r * d + c];
                    if e != 0 {
                        acc = acc + S::from_int(e) * v[c].clone();
                    }
                }
                acc
            })
            .collect()
    }

    /// `(B*_{γ*})^{-1} v`.
    pub fn apply_star_inv<S: Scalar>(&self, v: &[S]) -> Vec<S> {
        self.apply_i64(&self.star_inv_i64, v)
    }

    /// `B*_{γ*} v`.
    pub fn apply_star<S: Scalar>(&self, v: &[S]) -> Vec<S> {
        self.apply_i64(&self.star_i64, v)
    }

    /// Section membership for a normalized state: the itinerary begins with
    /// the loop (tested exactly through `(B*_{γ*})^{-1} λ > 0`), the
    /// suspension data lies in the loop cone, and the area is one within
    /// `tol`.  Errors when `|λ|` is not one within `tol`.
    pub fn membership<S: Scalar>(&self, z: &ZipperedState<S>, tol: f64) -> Result<bool> {
        if (z.total().to_f64() - 1.0).abs() > tol {
            return Err(Error::NotInSection("state is not normalized to |λ| = 1".into()));
        }
        if self.class.index_of(&z.perm) != Some(self.base) {
            return Ok(false);
        }
        let pulled = self.apply_star_inv(&z.lambda);
        if !pulled.iter().all(|x| x.is_positive()) {
            return Ok(false);
        }
        let pushed = self.apply_star(&z.tau);
        if !in_theta(&z.perm, &pushed) {
            return Ok(false);
        }
        Ok((z.area().to_f64() - 1.0).abs() <= tol)
    }

    /// First return of the flow to the section.  The base coordinates step
    /// through Rauzy induction until the itinerary completes a return word
    /// and sits in the loop cylinder again; the reported roof value is the
    /// flow time `-ln |(B*_γ)^{-1} λ|`.
    pub fn section_return<S: Scalar>(
        &self,
        z: &ZipperedState<S>,
        tol: f64,
    ) -> Result<SectionReturn<S>> {
        if !self.membership(z, tol)? {
            return Err(Error::NotInSection("section_return needs a section point".into()));
        }
        let mut state = z.clone();
        let mut vertex = self.base;
        let mut kinds: Vec<Kind> = Vec::new();
        for _ in 0..self.return_cap {
            let (next, arrow) = state.step()?;
            vertex = self.class.arrow(vertex, arrow.kind).end;
            kinds.push(arrow.kind);
            state = next;
            if vertex == self.base && kinds.len() >= self.loop_path.len() {
                let pulled = self.apply_star_inv(&state.lambda);
                if pulled.iter().all(|x| x.is_positive()) {
                    let norm = state.total();
                    let roof = -norm.to_f64().ln();
                    let lambda = state
                        .lambda
                        .iter()
                        .map(|l| l.clone() / norm.clone())
                        .collect();
                    let tau = state.tau.iter().map(|t| t.clone() * norm.clone()).collect();
                    let word = Path::from_kinds(
                        self.loop_path.start().clone(),
                        kinds.iter().copied(),
                    )?;
                    return Ok(SectionReturn {
                        state: ZipperedState {
                            lambda,
                            perm: state.perm,
                            tau,
                            logscale: z.logscale,
                        },
                        roof,
                        word,
                    });
                }
            }
        }
        Err(Error::ReturnBudget(self.return_cap))
    }

    /// Draw a section point: `λ` uniform on the simplex slice of the loop
    /// cylinder, `τ` by rejection in the cone over the base vertex mapped
    /// through `(B*_{γ*})^{-1}`, then scaled to unit area.
    pub fn sample_state<R: Rng>(&self, rng: &mut R) -> ZipperedState<f64> {
        let d = self.class.alphabet().len();
        // uniform barycentric weights: normalized standard exponentials
        let mut y: Vec<f64> = (0..d)
            .map(|_| -f64::ln(1.0 - rng.gen::<f64>()))
            .collect();
        let s: f64 = y.iter().sum();
        for v in &mut y {
            *v /= s;
        }
        // map through the columns of B*: lambda = B* y, then normalize
        let mut lambda = self.apply_star(&y);
        let total: f64 = lambda.iter().sum();
        for l in &mut lambda {
            *l /= total;
        }
        let base_perm = self.class.vertex(self.base).clone();
        let sigma = sample_theta(&base_perm, rng);
        let mut tau = self.apply_star_inv(&sigma);
        let z = ZipperedState {
            lambda,
            perm: base_perm,
            tau: tau.clone(),
            logscale: 0.0,
        };
        let area = z.area();
        debug_assert!(area > 0.0);
        for t in &mut tau {
            *t /= area;
        }
        ZipperedState { tau, ..z }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::perm::Permutation;
    use num::BigRational;
    use rand::SeedableRng;

    type Q = BigRational;

    fn d2_section() -> SectionSpec {
        let class = RauzyClass::generate(&Permutation::parse("a b / b a").unwrap()).unwrap();
        let gamma = Path::parse("a b / b a : tb").unwrap();
        SectionSpec::new(class, gamma).unwrap()
    }

    fn exact_state(section: &SectionSpec, x: (i64, i64), sigma: (i64, i64)) -> ZipperedState<Q> {
        // lambda = B* x / |B* x|, tau = (B*)^{-1} sigma scaled to area 1
        let x = vec![Q::from_int(x.0), Q::from_int(x.1)];
        let lam_raw = section.apply_star(&x);
        let total = Q::sum(&lam_raw);
        let lambda: Vec<Q> = lam_raw.into_iter().map(|l| l / total.clone()).collect();
        let sigma = vec![Q::from_int(sigma.0), Q::from_int(sigma.1)];
        let tau = section.apply_star_inv(&sigma);
        let z = ZipperedState {
            lambda,
            perm: section.loop_path().start().clone(),
            tau: tau.clone(),
            logscale: 0.0,
        };
        let area = z.area();
        let tau = tau.into_iter().map(|t| t / area.clone()).collect();
        ZipperedState { tau, ..z }
    }

    #[test]
    fn find_neat_loop_d2() {
        let class = RauzyClass::generate(&Permutation::parse("a b / b a").unwrap()).unwrap();
        let found = SectionSpec::find_neat_loop(&class, 0, 8).unwrap();
        assert_eq!(found.to_string(), "a b / b a : tb");
    }

    #[test]
    fn non_neat_loop_is_rejected() {
        let class = RauzyClass::generate(&Permutation::parse("a b / b a").unwrap()).unwrap();
        let bad = Path::parse("a b / b a : tbtb").unwrap();
        assert!(SectionSpec::new(class, bad).is_err());
    }

    #[test]
    fn membership_examples() {
        let section = d2_section();
        let z = exact_state(&section, (1, 1), (1, -1));
        assert!(section.membership(&z, 1e-9).unwrap());

        // lambda outside the loop cylinder
        let mut bad = z.clone();
        bad.lambda = vec![Q::from_ratio(9, 10), Q::from_ratio(1, 10)];
        assert!(!section.membership(&bad, 1e-9).unwrap());

        // unnormalized state errors
        let mut unnorm = z.clone();
        unnorm.lambda = vec![Q::from_int(2), Q::from_int(1)];
        assert!(section.membership(&unnorm, 1e-9).is_err());
    }

    #[test]
    fn exact_return_has_roof_at_least_ln2() {
        let section = d2_section();
        for (x, s) in [((1, 1), (1, -1)), ((2, 1), (1, -2)), ((1, 3), (3, -2))] {
            let z = exact_state(&section, x, s);
            let ret = section.section_return(&z, 1e-12).unwrap();
            assert!(ret.roof >= std::f64::consts::LN_2 - 1e-12, "roof {}", ret.roof);
            assert!(section.membership(&ret.state, 1e-9).unwrap());
            assert_eq!(ret.state.area(), Q::from_int(1));
            // the return word begins with the loop and ends with a fresh
            // entry into its cylinder
            assert!(ret.word.len() >= section.loop_path().len());
        }
    }

    #[test]
    fn sampled_returns_stay_in_section() {
        let section = d2_section();
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(5);
        for _ in 0..200 {
            let z = section.sample_state(&mut rng);
            assert!(section.membership(&z, 1e-7).unwrap());
            let ret = section.section_return(&z, 1e-7).unwrap();
            assert!(ret.roof >= std::f64::consts::LN_2 - 1e-12);
            assert!(section.membership(&ret.state, 1e-6).unwrap());
        }
    }

    #[test]
    fn fiber_contraction_for_equal_lambda() {
        use crate::cone::hilbert_distance_f64;
        let section = d2_section();
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(9);
        let mut worst: f64 = 0.0;
        let mut checked = 0;
        while checked < 300 {
            let z1 = section.sample_state(&mut rng);
            let z2 = {
                let other = section.sample_state(&mut rng);
                ZipperedState {
                    lambda: z1.lambda.clone(),
                    perm: z1.perm.clone(),
                    tau: other.tau,
                    logscale: 0.0,
                }
            };
            let cone = section.theta_loop();
            let before = hilbert_distance_f64(cone, &z1.tau, &z2.tau).unwrap();
            if before < 1e-6 {
                continue;
            }
            let r1 = section.section_return(&z1, 1e-7).unwrap();
            let r2 = section.section_return(&z2, 1e-7).unwrap();
            assert_eq!(r1.word, r2.word, "equal lambda must share the return word");
            let after = hilbert_distance_f64(cone, &r1.state.tau, &r2.state.tau).unwrap();
            worst = worst.max(after / before);
            checked += 1;
        }
        assert!(worst < 1.0, "worst contraction factor {worst}");
    }
}
