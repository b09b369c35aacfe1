use super::singleton::MuRule;
use super::{
    check_finite, residuals, IterRecord, Problem, SolverConfig, SolverResult, SolverState,
    StallDetector, Status, XStep,
};
use crate::error::{Error, Result};
use crate::prox::shrink_scalar;
use crate::scalar::Scalar;
use crate::tensor::{DenseTensor, ObservationMask, TensorArray};

/// ADAL for the singleton model with partial observations.
///
/// Splits `X` into `X₁..X_N` tied to an auxiliary `Y`:
///
/// ```text
/// min Σᵢ wᵢ‖Xᵢ₍ᵢ₎‖_* + λ₁‖E‖₁   s.t.  Xᵢ = Y,  A_Ω(Y + E) = B_Ω
/// ```
///
/// and alternates between the block `{X₁..X_N, E}` and `Y`. The `Y` step
/// solves `(N·I + A_Ω*A_Ω) Y = rhs`, which is diagonal: division by `N + 1`
/// on observed entries and by `N` elsewhere. The returned `E` is exactly zero
/// off `Ω`.
pub fn solve_singleton_partial<T: Scalar>(
    p: &Problem<T>,
    c: &SolverConfig<T>,
) -> Result<SolverResult<T>> {
    let mask = p.mask().ok_or(Error::MaskRequired)?;
    check_finite(p)?;
    c.validate(p.shape())?;
    let n = p.shape().order();
    let weights = c.weights(n)?.into_iter().map(|w| w * c.lambda_star).collect();
    split_loop(p, mask, c, &XStep::Nuclear(weights), &MuRule::Fixed(c.mu), c.lambda1, false)
}

/// Two-block ADAL under `Y`-splitting, shared with the partial nonconvex solver.
pub(crate) fn split_loop<T: Scalar>(
    p: &Problem<T>,
    mask: &ObservationMask,
    c: &SolverConfig<T>,
    step: &XStep<T>,
    mu_rule: &MuRule<T>,
    l1: T,
    stall_guard: bool,
) -> Result<SolverResult<T>> {
    let b = p.b();
    let shape = p.shape().clone();
    let n = shape.order();
    let nf = T::from_usize_lossy(n);
    let keep = mask.indicator();
    let mut st = SolverState::zeros(&shape, n, n, mu_rule.at(0))?;
    st.y = Some(DenseTensor::zeros(shape.clone()));
    st.lambda_obs = Some(DenseTensor::zeros(shape.clone()));
    let mut history = Vec::new();
    let mut status = Status::MaxIters;
    let mut stall = StallDetector::new();

    for k in 0..c.max_iters {
        let mu = mu_rule.at(k);
        st.mu = mu;
        let prev = st.clone();
        let inv_mu = T::one() / mu;
        let y = st.y.take().expect("split state carries Y");
        let mut lam_obs = st.lambda_obs.take().expect("split state carries λ");

        // block 1: X_i and E
        let mut nuclear = T::zero();
        let mut xs = Vec::with_capacity(n);
        for i in 0..n {
            let mut z = y.clone();
            z.add_scaled(mu, &st.lambdas.components()[i])?;
            let (x, norm) = step.apply(z, i, mu)?;
            nuclear += norm;
            xs.push(x);
        }
        let mut e = DenseTensor::zeros(shape.clone());
        let tau = mu * l1;
        for (j, ev) in e.as_mut_slice().iter_mut().enumerate() {
            if keep[j] {
                let v = b.as_slice()[j] + mu * lam_obs.as_slice()[j] - y.as_slice()[j];
                *ev = shrink_scalar(v, tau);
            }
        }

        // block 2: Y
        let mut rhs = b.clone();
        rhs.add_scaled(mu, &lam_obs)?;
        rhs.add_scaled(-T::one(), &e)?;
        for (x, lam) in xs.iter().zip(st.lambdas.components()) {
            rhs.add_scaled(T::one(), x)?;
            rhs.add_scaled(-mu, lam)?;
        }
        let (with_obs, without) = (T::one() / (nf + T::one()), T::one() / nf);
        for (v, &obs) in rhs.as_mut_slice().iter_mut().zip(&keep) {
            *v *= if obs { with_obs } else { without };
        }
        let y = rhs;

        // multipliers
        let mut lams = std::mem::replace(&mut st.lambdas, st.xs.clone()).into_components();
        for (lam, x) in lams.iter_mut().zip(&xs) {
            lam.add_scaled(-inv_mu, x)?;
            lam.add_scaled(inv_mu, &y)?;
        }
        for (j, l) in lam_obs.as_mut_slice().iter_mut().enumerate() {
            if keep[j] {
                *l -= inv_mu * (y.as_slice()[j] + e.as_slice()[j] - b.as_slice()[j]);
            }
        }

        st.xs = TensorArray::new(xs)?;
        st.lambdas = TensorArray::new(lams)?;
        st.e = e;
        st.y = Some(y);
        st.lambda_obs = Some(lam_obs);
        st.iter = k + 1;

        let (primal, dual) = residuals(&st, &prev, p, c)?;
        history.push(IterRecord { primal, dual, objective: nuclear + l1 * st.e.l1_norm() });
        if primal.max(dual) < c.tol_adal {
            status = Status::Converged;
            break;
        }
        if stall_guard && stall.push(primal.max(dual)) {
            break;
        }
    }

    Ok(SolverResult {
        x: st.xs.mean(),
        e: st.e,
        components: st.xs,
        iterations: history.len(),
        status,
        history,
        multipliers: Some(st.lambdas),
        e_multiplier: st.lambda_obs,
        mu: st.mu,
    })
}
