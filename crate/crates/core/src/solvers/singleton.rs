use super::{
    check_finite, residuals, IterRecord, MuSchedule, Problem, SolverConfig, SolverResult,
    SolverState, StallDetector, Status, XStep,
};
use crate::error::{Error, Result};
use crate::prox::shrink_in_place;
use crate::scalar::Scalar;
use crate::tensor::{DenseTensor, TensorArray};

/// ADAL for the singleton model with full observations.
///
/// Per iteration, with `wᵢ = λ*·λ*ᵢ`:
///
/// ```text
/// Xᵢ ← T_{i, μ wᵢ}(B + μΛᵢ − E)
/// E  ← S_{μλ₁/N}((1/N) Σᵢ (B + μΛᵢ − Xᵢ))
/// Λᵢ ← Λᵢ − (Xᵢ + E − B)/μ
/// ```
///
/// Stops once both relative residuals fall below `tol_adal`; returns the
/// mean of the `Xᵢ`.
pub fn solve_singleton<T: Scalar>(p: &Problem<T>, c: &SolverConfig<T>) -> Result<SolverResult<T>> {
    if p.mask().is_some() {
        return Err(Error::MaskNotSupported);
    }
    check_finite(p)?;
    c.validate(p.shape())?;
    let n = p.shape().order();
    let weights: Vec<T> = c.weights(n)?.into_iter().map(|w| w * c.lambda_star).collect();
    let spec = AdalSpec {
        step: XStep::Nuclear(weights),
        mu: MuRule::Fixed(c.mu),
        e_step: EStep::Shrink(c.lambda1),
        stall_guard: false,
    };
    adal_loop(p, c, &spec)
}

pub(crate) enum MuRule<T> {
    Fixed(T),
    Schedule(MuSchedule<T>),
}

impl<T: Scalar> MuRule<T> {
    pub(crate) fn at(&self, k: usize) -> T {
        match self {
            MuRule::Fixed(mu) => *mu,
            MuRule::Schedule(s) => s.at(k),
        }
    }
}

/// How `E` is formed from `A = Σᵢ (B + μΛᵢ − Xᵢ)`.
pub(crate) enum EStep<T> {
    /// `S_{μλ₁/N}(A/N)`; objective term `λ₁‖E‖₁`.
    Shrink(T),
    /// `A/(N + 2μ)`, the minimiser of `μ‖E‖² + ½ Σᵢ ‖E − (B + μΛᵢ − Xᵢ)‖²`;
    /// objective term `‖E‖²`.
    Squared,
}

pub(crate) struct AdalSpec<T> {
    pub step: XStep<T>,
    pub mu: MuRule<T>,
    pub e_step: EStep<T>,
    /// Stop with `MaxIters` once the residuals stop moving.
    pub stall_guard: bool,
}

/// ADAL over `{Xᵢ}` and `E` with constraints `Xᵢ + E = B`, shared by the
/// singleton, nonconvex and Tucker solvers.
pub(crate) fn adal_loop<T: Scalar>(
    p: &Problem<T>,
    c: &SolverConfig<T>,
    spec: &AdalSpec<T>,
) -> Result<SolverResult<T>> {
    let b = p.b();
    let shape = p.shape().clone();
    let n = shape.order();
    let nf = T::from_usize_lossy(n);
    let mut st = SolverState::zeros(&shape, n, n, spec.mu.at(0))?;
    let mut history = Vec::new();
    let mut status = Status::MaxIters;
    let mut stall = StallDetector::new();

    for k in 0..c.max_iters {
        let mu = spec.mu.at(k);
        st.mu = mu;
        let prev = st.clone();
        let mut nuclear = T::zero();
        let mut xs = Vec::with_capacity(n);
        for i in 0..n {
            let z = adal_target(b, &st.lambdas.components()[i], &st.e, mu)?;
            let (x, norm) = spec.step.apply(z, i, mu)?;
            nuclear += norm;
            xs.push(x);
        }

        let mut acc = DenseTensor::zeros(shape.clone());
        for (x, lam) in xs.iter().zip(st.lambdas.components()) {
            acc.add_scaled(T::one(), b)?;
            acc.add_scaled(mu, lam)?;
            acc.add_scaled(-T::one(), x)?;
        }
        let objective_e;
        st.e = match spec.e_step {
            EStep::Shrink(l1) => {
                let mut e = acc.scale(T::one() / nf);
                shrink_in_place(&mut e, mu * l1 / nf)?;
                objective_e = l1 * e.l1_norm();
                e
            }
            EStep::Squared => {
                let e = acc.scale(T::one() / (nf + mu + mu));
                let norm = e.fro_norm();
                objective_e = norm * norm;
                e
            }
        };
        st.xs = TensorArray::new(xs)?;
        update_multipliers(&mut st, b, mu)?;
        st.iter = k + 1;

        let (primal, dual) = residuals(&st, &prev, p, c)?;
        history.push(IterRecord { primal, dual, objective: nuclear + objective_e });
        if primal.max(dual) < c.tol_adal {
            status = Status::Converged;
            break;
        }
        if spec.stall_guard && stall.push(primal.max(dual)) {
            break;
        }
    }
    let mu = st.mu;
    Ok(finish_singleton(st, history, status, mu))
}

/// `B + μΛ − E`.
pub(crate) fn adal_target<T: Scalar>(
    b: &DenseTensor<T>,
    lam: &DenseTensor<T>,
    e: &DenseTensor<T>,
    mu: T,
) -> Result<DenseTensor<T>> {
    let mut z = b.clone();
    z.add_scaled(mu, lam)?;
    z.add_scaled(-T::one(), e)?;
    Ok(z)
}

/// `Λᵢ ← Λᵢ − (Xᵢ + E − B)/μ`.
fn update_multipliers<T: Scalar>(st: &mut SolverState<T>, b: &DenseTensor<T>, mu: T) -> Result<()> {
    let inv_mu = T::one() / mu;
    let mut lams = std::mem::replace(&mut st.lambdas, st.xs.clone()).into_components();
    for (lam, x) in lams.iter_mut().zip(st.xs.components()) {
        lam.add_scaled(-inv_mu, x)?;
        lam.add_scaled(-inv_mu, &st.e)?;
        lam.add_scaled(inv_mu, b)?;
    }
    st.lambdas = TensorArray::new(lams)?;
    Ok(())
}

fn finish_singleton<T: Scalar>(
    st: SolverState<T>,
    history: Vec<IterRecord<T>>,
    status: Status,
    mu: T,
) -> SolverResult<T> {
    let e_multiplier = st.lambdas.sum_components();
    SolverResult {
        x: st.xs.mean(),
        e: st.e,
        components: st.xs,
        iterations: history.len(),
        status,
        history,
        multipliers: Some(st.lambdas),
        e_multiplier: Some(e_multiplier),
        mu,
    }
}
