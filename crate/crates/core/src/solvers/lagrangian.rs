use super::{check_finite, IterRecord, Problem, SolverConfig, SolverResult, SolverState, Status};
use crate::error::{Error, Result};
use crate::prox::shrink_in_place;
use crate::scalar::Scalar;
use crate::tensor::{DenseTensor, TensorArray};

use super::nuclear_step;

/// Coupling of the penalised models.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum LagrangianModel {
    /// `½ Σᵢ ‖A(Xᵢ + E − B)‖²`
    Singleton,
    /// `½ ‖A(Σᵢ Xᵢ + E − B)‖²`
    Mixture,
}

/// Residual tensors of the smooth part: one per mode for the singleton
/// coupling, a single one for the mixture coupling.
fn smooth_residuals<T: Scalar>(
    p: &Problem<T>,
    model: LagrangianModel,
    xs: &TensorArray<T>,
    e: &DenseTensor<T>,
) -> Result<Vec<DenseTensor<T>>> {
    if xs.component_shape() != p.shape() || e.shape() != p.shape() {
        return Err(Error::ShapeMismatch {
            expected: p.shape().dims().to_vec(),
            found: e.dims().to_vec(),
        });
    }
    let form = |mut r: DenseTensor<T>| -> Result<DenseTensor<T>> {
        r.add_scaled(T::one(), e)?;
        r.add_scaled(-T::one(), p.b())?;
        p.restrict(&mut r);
        Ok(r)
    };
    match model {
        LagrangianModel::Singleton => xs.iter().map(|x| form(x.clone())).collect(),
        LagrangianModel::Mixture => Ok(vec![form(xs.sum_components())?]),
    }
}

/// Smooth part `l(X₁..X_N, E)` of the penalised objective.
pub fn smooth_loss<T: Scalar>(
    p: &Problem<T>,
    model: LagrangianModel,
    xs: &TensorArray<T>,
    e: &DenseTensor<T>,
) -> Result<T> {
    let rs = smooth_residuals(p, model, xs, e)?;
    Ok(rs.iter().map(|r| r.inner(r).expect("same shape")).sum::<T>() / T::lit(2.0))
}

/// Gradient of [`smooth_loss`] with respect to `(X₁..X_N, E)`.
pub fn smooth_gradient<T: Scalar>(
    p: &Problem<T>,
    model: LagrangianModel,
    xs: &TensorArray<T>,
    e: &DenseTensor<T>,
) -> Result<(TensorArray<T>, DenseTensor<T>)> {
    let rs = smooth_residuals(p, model, xs, e)?;
    match model {
        LagrangianModel::Singleton => {
            let ge = TensorArray::new(rs)?;
            let sum = ge.sum_components();
            Ok((ge, sum))
        }
        LagrangianModel::Mixture => {
            let r = rs.into_iter().next().expect("one residual");
            Ok((TensorArray::replicate(&r, xs.len())?, r))
        }
    }
}

/// FISTA with continuation for the penalised singleton or mixture model
///
/// ```text
/// min l(X₁..X_N, E) + λ* Σᵢ λ*ᵢ ‖Xᵢ₍ᵢ₎‖_* + λ₁ ‖E‖₁,   λ₁ = α·r·λ*
/// ```
///
/// The gradient of `l` is `(N+1)`-Lipschitz for both couplings, so the step
/// is fixed at `1/(N+1)`. `λ*` starts at `continuation.lambda0` and shrinks
/// geometrically to `continuation.lambda_bar`. Momentum follows the standard
/// FISTA rule with `t₀ = 1`. Stops when the relative primal residual and the
/// relative change between iterates are both below `tol_fista`.
pub fn solve_lagrangian<T: Scalar>(
    p: &Problem<T>,
    c: &SolverConfig<T>,
    model: LagrangianModel,
) -> Result<SolverResult<T>> {
    check_finite(p)?;
    c.continuation.validate()?;
    c.validate(p.shape())?;
    let shape = p.shape().clone();
    let n = shape.order();
    let nf = T::from_usize_lossy(n);
    let w = c.weights(n)?;
    let step = T::one() / (nf + T::one());
    let cont = &c.continuation;
    let b_norm = match model {
        LagrangianModel::Singleton => p.b().fro_norm() * nf.sqrt(),
        LagrangianModel::Mixture => p.b().fro_norm(),
    };
    let scale = b_norm.max(T::one());

    let mut lambda = cont.lambda0;
    let mut st = SolverState::zeros(&shape, n, 1, step)?;
    let mut ys = st.xs.clone();
    let mut ye = st.e.clone();
    let mut history = Vec::new();
    let mut status = Status::MaxIters;

    for k in 0..c.max_iters {
        let (gx, ge) = smooth_gradient(p, model, &ys, &ye)?;
        let l1 = cont.alpha * cont.ratio * lambda;

        let mut nuclear = T::zero();
        let mut xs = Vec::with_capacity(n);
        for (i, (y, g)) in ys.iter().zip(gx.iter()).enumerate() {
            let mut z = y.clone();
            z.add_scaled(-step, g)?;
            let (x, norm) = nuclear_step(z, i, step * lambda * w[i], w[i] > T::zero())?;
            nuclear += w[i] * norm;
            xs.push(x);
        }
        let xs = TensorArray::new(xs)?;
        let mut e = ye.clone();
        e.add_scaled(-step, &ge)?;
        shrink_in_place(&mut e, step * l1)?;

        let t_next = (T::one() + (T::one() + T::lit(4.0) * st.t * st.t).sqrt()) / T::lit(2.0);
        let beta = (st.t - T::one()) / t_next;
        let mut diff_ss = T::zero();
        let mut old_ss = T::zero();
        let mut next_ys = Vec::with_capacity(n);
        for (new, old) in xs.iter().zip(st.xs.iter()) {
            let d = new.sub(old)?;
            let dn = d.fro_norm();
            let on = old.fro_norm();
            diff_ss += dn * dn;
            old_ss += on * on;
            let mut y = new.clone();
            y.add_scaled(beta, &d)?;
            next_ys.push(y);
        }
        let de = e.sub(&st.e)?;
        let (dn, on) = (de.fro_norm(), st.e.fro_norm());
        diff_ss += dn * dn;
        old_ss += on * on;
        ye = e.clone();
        ye.add_scaled(beta, &de)?;
        ys = TensorArray::new(next_ys)?;
        let change = diff_ss.sqrt() / old_ss.sqrt().max(T::one());

        let loss = smooth_loss(p, model, &xs, &e)?;
        let primal = (loss + loss).sqrt() / scale;
        let objective = loss + lambda * nuclear + l1 * e.l1_norm();

        st.xs = xs;
        st.e = e;
        st.t = t_next;
        st.iter = k + 1;
        history.push(IterRecord { primal, dual: change, objective });
        lambda = (cont.factor * lambda).max(cont.lambda_bar);
        if primal < c.tol_fista && change < c.tol_fista {
            status = Status::Converged;
            break;
        }
    }

    let x = match model {
        LagrangianModel::Singleton => st.xs.mean(),
        LagrangianModel::Mixture => st.xs.sum_components(),
    };
    Ok(SolverResult {
        x,
        e: st.e,
        components: st.xs,
        iterations: history.len(),
        status,
        history,
        multipliers: None,
        e_multiplier: None,
        mu: step,
    })
}
