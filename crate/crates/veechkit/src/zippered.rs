use rand::Rng;

use crate::error::{Error, Result};
use crate::iet::IetState;
use crate::numeric::Scalar;
use crate::omega::{area_form, omega_matrix, OmegaMatrix};
use crate::perm::{Arrow, Kind, Permutation};

/// A zippered-rectangles phase point `(λ, π, τ)` with an accumulated
/// log-scale side channel for long float runs.
#[derive(Debug, Clone, PartialEq)]
pub struct ZipperedState<S: Scalar> {
    pub lambda: Vec<S>,
    pub perm: Permutation,
    pub tau: Vec<S>,
    pub logscale: f64,
}

/// Strict membership of `τ` in the suspension cone over `π`, tested on the
/// defining prefix sums directly.
pub fn in_theta<S: Scalar>(perm: &Permutation, tau: &[S]) -> bool {
    let d = perm.len();
    for (kind, positive) in [(Kind::Top, true), (Kind::Bottom, false)] {
        let mut acc = S::zero();
        for &l in &perm.row(kind)[..d - 1] {
            acc = acc + tau[l as usize].clone();
            if positive != acc.is_positive() || acc.is_zero() {
                return false;
            }
        }
    }
    true
}

impl<S: Scalar> ZipperedState<S> {
    pub fn new(lambda: Vec<S>, perm: Permutation, tau: Vec<S>) -> Result<Self> {
        let iet = IetState::new(lambda, perm)?;
        if tau.len() != iet.perm.len() {
            return Err(Error::OutOfRange("suspension vector does not match the alphabet".into()));
        }
        if !in_theta(&iet.perm, &tau) {
            return Err(Error::OutOfRange("tau outside the suspension cone".into()));
        }
        let state = ZipperedState {
            lambda: iet.lambda,
            perm: iet.perm,
            tau,
            logscale: 0.0,
        };
        if !state.area().is_positive() {
            return Err(Error::OutOfRange("non-positive area".into()));
        }
        Ok(state)
    }

    pub fn iet(&self) -> IetState<S> {
        IetState {
            lambda: self.lambda.clone(),
            perm: self.perm.clone(),
        }
    }

    pub fn omega(&self) -> OmegaMatrix {
        omega_matrix(&self.perm)
    }

    /// Area of the suspended translation surface, `-<λ, Ω τ>`.
    pub fn area(&self) -> S {
        area_form(&self.omega(), &self.lambda, &self.tau)
    }

    pub fn total(&self) -> S {
        S::sum(&self.lambda)
    }

    /// One step of induction on zippered rectangles: the base moves by
    /// Rauzy induction and `τ` by `(B*_γ)^{-1}`, which subtracts the loser
    /// coordinate from the winner coordinate.
    pub fn step(&self) -> Result<(ZipperedState<S>, Arrow)> {
        let (base, arrow) = self.iet().rauzy_step()?;
        let mut tau = self.tau.clone();
        let winner = arrow.winner as usize;
        let loser = arrow.loser as usize;
        tau[winner] = tau[winner].clone() - tau[loser].clone();
        Ok((
            ZipperedState {
                lambda: base.lambda,
                perm: base.perm,
                tau,
                logscale: self.logscale,
            },
            arrow,
        ))
    }

    /// `φ` of the image under one induction step, `|λ| - λ_loser`, without
    /// performing the step.  Errors on a tie.
    pub fn next_total(&self) -> Result<S> {
        let alpha = self.perm.last(Kind::Top);
        let beta = self.perm.last(Kind::Bottom);
        let la = &self.lambda[alpha as usize];
        let lb = &self.lambda[beta as usize];
        let loser = if la > lb {
            beta
        } else if lb > la {
            alpha
        } else {
            return Err(Error::Tie);
        };
        Ok(self.total() - self.lambda[loser as usize].clone())
    }

    /// Membership in the fundamental domain: `φ(Q̂ x) < 1 <= φ(x)`.
    pub fn in_fundamental_domain(&self) -> Result<bool> {
        let one = S::one();
        Ok(self.next_total()? < one && self.total() >= S::one())
    }
}

impl ZipperedState<f64> {
    /// Flow for time `t >= 0` through the fundamental domain: scale
    /// `(λ, τ) -> (e^t λ, e^{-t} τ)`, then apply the unique number of
    /// induction steps that lands back in the domain.
    pub fn veech_flow(&self, t: f64) -> Result<ZipperedState<f64>> {
        if t < 0.0 {
            return Err(Error::OutOfRange("flow time must be non-negative".into()));
        }
        if !self.in_fundamental_domain()? {
            return Err(Error::NotInSection("state outside the fundamental domain".into()));
        }
        if t == 0.0 {
            return Ok(self.clone());
        }
        let scale = t.exp();
        let mut state = self.clone();
        for l in &mut state.lambda {
            *l *= scale;
        }
        for v in &mut state.tau {
            *v /= scale;
        }
        state.logscale += t;
        while !state.in_fundamental_domain()? {
            state = state.step()?.0;
        }
        Ok(state)
    }
}

/// Rejection-sample `τ` strictly inside the suspension cone over `perm`
/// from the box `[-1, 1]^A`.
pub fn sample_theta<R: Rng>(perm: &Permutation, rng: &mut R) -> Vec<f64> {
    let d = perm.len();
    loop {
        let tau: Vec<f64> = (0..d).map(|_| rng.gen_range(-1.0..1.0)).collect();
        if in_theta(perm, &tau) {
            return tau;
        }
    }
}
