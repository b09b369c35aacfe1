use super::{
    check_finite, residuals, IterRecord, Problem, SolverConfig, SolverResult, SolverState, Status,
    XStep,
};
use crate::error::Result;
use crate::prox::shrink_in_place;
use crate::scalar::Scalar;
use crate::tensor::TensorArray;

/// Inexact ADAL for the mixture model `X = Σᵢ Xᵢ`, full or partial.
///
/// The coupled `X` block is replaced by one proximal-gradient step of size
/// `η` on `½‖A(Σᵢ Xᵢ + E − B − μΛ)‖²`, where `A` is the identity or the
/// restriction to `Ω`:
///
/// ```text
/// G  ← A(Σᵢ Xᵢ + E − B − μΛ)
/// Xᵢ ← T_{i, ημwᵢ}(Xᵢ − ηG)
/// E  ← S_{μλ₁}(A(B + μΛ − Σᵢ Xᵢ))
/// Λ  ← Λ − A(Σᵢ Xᵢ + E − B)/μ
/// ```
///
/// The multiplier is updated every iteration. Returns `Σᵢ Xᵢ`.
pub fn solve_mixture<T: Scalar>(p: &Problem<T>, c: &SolverConfig<T>) -> Result<SolverResult<T>> {
    check_finite(p)?;
    c.validate(p.shape())?;
    let b = p.b();
    let shape = p.shape().clone();
    let n = shape.order();
    let weights: Vec<T> = c.weights(n)?.into_iter().map(|w| w * c.lambda_star).collect();
    let step = XStep::Nuclear(weights);
    let eta = c.eta_for(n);
    let mu = c.mu;
    let inv_mu = T::one() / mu;
    let mut st = SolverState::zeros(&shape, n, 1, mu)?;
    let mut history = Vec::new();
    let mut status = Status::MaxIters;

    for k in 0..c.max_iters {
        let prev = st.clone();
        let lam = &st.lambdas.components()[0];

        let mut g = st.xs.sum_components();
        g.add_scaled(T::one(), &st.e)?;
        g.add_scaled(-T::one(), b)?;
        g.add_scaled(-mu, lam)?;
        p.restrict(&mut g);

        let mut nuclear = T::zero();
        let mut xs = Vec::with_capacity(n);
        for (i, x) in st.xs.iter().enumerate() {
            let mut z = x.clone();
            z.add_scaled(-eta, &g)?;
            let (x, norm) = step.apply(z, i, eta * mu)?;
            nuclear += norm;
            xs.push(x);
        }
        let sum = TensorArray::new(xs)?;
        let total = sum.sum_components();

        let mut e = b.clone();
        e.add_scaled(mu, lam)?;
        e.add_scaled(-T::one(), &total)?;
        p.restrict(&mut e);
        shrink_in_place(&mut e, mu * c.lambda1)?;

        let mut r = total;
        r.add_scaled(T::one(), &e)?;
        r.add_scaled(-T::one(), b)?;
        p.restrict(&mut r);
        let mut lam = lam.clone();
        lam.add_scaled(-inv_mu, &r)?;

        st.xs = sum;
        st.e = e;
        st.lambdas = TensorArray::new(vec![lam])?;
        st.iter = k + 1;

        let (primal, dual) = residuals(&st, &prev, p, c)?;
        history.push(IterRecord {
            primal,
            dual,
            objective: nuclear + c.lambda1 * st.e.l1_norm(),
        });
        if primal.max(dual) < c.tol_adal {
            status = Status::Converged;
            break;
        }
    }

    let lam = st.lambdas.components()[0].clone();
    Ok(SolverResult {
        x: st.xs.sum_components(),
        e: st.e,
        multipliers: Some(TensorArray::replicate(&lam, n)?),
        e_multiplier: Some(lam),
        components: st.xs,
        iterations: history.len(),
        status,
        history,
        mu,
    })
}
