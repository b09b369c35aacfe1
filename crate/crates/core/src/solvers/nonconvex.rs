use super::singleton::{adal_loop, AdalSpec, EStep, MuRule};
use super::split::split_loop;
use super::{check_finite, Problem, SolverConfig, SolverResult, XStep};
use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// ADAL for the rank-constrained model
///
/// ```text
/// min ‖E‖₁   s.t.  X + E = B,  rank(X₍ᵢ₎) ≤ rᵢ
/// ```
///
/// Each `Xᵢ` is the best rank-`rᵢ` approximation of `B + μΛᵢ − E` in its
/// unfolding; `E = (1/N) S_μ(Σᵢ B + μΛᵢ − Xᵢ)`. `μ` follows
/// `mu_schedule`. With a mask the same steps run under `Y`-splitting.
/// Convergence is not guaranteed: the run stops with `MaxIters` when the
/// residuals stall.
pub fn solve_nonconvex<T: Scalar>(p: &Problem<T>, c: &SolverConfig<T>) -> Result<SolverResult<T>> {
    check_finite(p)?;
    c.mu_schedule.validate()?;
    let ranks = c.check_ranks(p.shape())?;
    c.validate(p.shape())?;
    let step = XStep::Rank(ranks);
    let mu = MuRule::Schedule(c.mu_schedule.clone());
    match p.mask() {
        Some(mask) => split_loop(p, mask, c, &step, &mu, T::one(), true),
        None => {
            let spec = AdalSpec { step, mu, e_step: EStep::Shrink(T::one()), stall_guard: true };
            adal_loop(p, c, &spec)
        }
    }
}

/// ADAL for the Tucker problem `min ‖E‖² s.t. X + E = B, rank(X₍ᵢ₎) ≤ rᵢ`:
/// the nonconvex scheme with `E = Σᵢ (B + μΛᵢ − Xᵢ) / (N + 2μ)`.
pub fn solve_tucker<T: Scalar>(p: &Problem<T>, c: &SolverConfig<T>) -> Result<SolverResult<T>> {
    if p.mask().is_some() {
        return Err(Error::MaskNotSupported);
    }
    check_finite(p)?;
    c.mu_schedule.validate()?;
    let ranks = c.check_ranks(p.shape())?;
    c.validate(p.shape())?;
    let spec = AdalSpec {
        step: XStep::Rank(ranks),
        mu: MuRule::Schedule(c.mu_schedule.clone()),
        e_step: EStep::Squared,
        stall_guard: true,
    };
    adal_loop(p, c, &spec)
}
