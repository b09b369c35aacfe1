use super::{residuals, Model, Problem, SolverConfig, SolverResult, SolverState};
use crate::error::{Error, Result};
use crate::prox::{shrink_scalar, thin_svd};
use crate::scalar::Scalar;
use crate::tensor::DenseTensor;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum KktKind {
    Convex,
    Nonconvex,
}

/// Optimality residuals of a solver result. Every entry is nonnegative and
/// vanishes at a KKT point.
///
/// Convex models (singleton, mixture), with `wᵢ = λ*·λ*ᵢ`:
/// * `spectral_norms[i] = ‖Λᵢ₍ᵢ₎‖₂ / wᵢ`, at most 1 at optimality
///   (the raw norm when `wᵢ = 0`, where `Λᵢ` must vanish);
/// * `nuclear_gap[i] = |⟨Λᵢ, Xᵢ⟩ − wᵢ‖Xᵢ₍ᵢ₎‖_*|`;
/// * `e_fixed_point_gap`: largest entrywise violation of
///   `Λ_E ∈ λ₁ ∂‖E‖₁`, where `Λ_E` is the multiplier acting on `E`.
///
/// Nonconvex models (nonconvex, tucker):
/// * `orthogonality[i] = max(‖Λᵢ₍ᵢ₎ Vᵢ‖, ‖Uᵢᵀ Λᵢ₍ᵢ₎‖) / max(1, ‖Λᵢ‖)` with
///   `Uᵢ, Vᵢ` the singular vectors of `Xᵢ₍ᵢ₎`;
/// * `e_fixed_point_gap`: `‖E − (1/N) S_μ(Σᵢ B + μΛᵢ − Xᵢ)‖∞`, or the
///   corresponding fixed point of the `E` step for tucker and partial data.
///
/// `feasibility` is the relative primal residual of the final iterate.
#[derive(Clone, Debug, PartialEq)]
pub struct KktCertificate<T> {
    pub kind: KktKind,
    pub spectral_norms: Vec<T>,
    pub nuclear_gap: Vec<T>,
    pub orthogonality: Vec<T>,
    pub e_fixed_point_gap: T,
    pub feasibility: T,
}

impl<T: Scalar> KktCertificate<T> {
    /// Largest gap, excluding the spectral ratios (which are bounds, not gaps).
    pub fn max_gap(&self) -> T {
        self.nuclear_gap
            .iter()
            .chain(&self.orthogonality)
            .copied()
            .fold(self.e_fixed_point_gap.max(self.feasibility), T::max)
    }
}

pub fn kkt_certificate<T: Scalar>(
    result: &SolverResult<T>,
    p: &Problem<T>,
    c: &SolverConfig<T>,
) -> Result<KktCertificate<T>> {
    let (lambdas, e_mult) = match (&result.multipliers, &result.e_multiplier) {
        (Some(l), Some(e)) => (l, e),
        _ => return Err(Error::MultipliersAbsent),
    };
    let n = p.shape().order();
    if lambdas.len() != n || result.components.len() != n {
        return Err(Error::DimensionMismatch(format!(
            "{} multipliers and {} components for an order-{n} problem",
            lambdas.len(),
            result.components.len()
        )));
    }
    let p = p.normalized();
    let feasibility = feasibility(result, &p, c)?;

    match c.model {
        Model::Singleton | Model::Mixture => {
            let w: Vec<T> = c.weights(n)?.into_iter().map(|w| w * c.lambda_star).collect();
            let mut spectral_norms = Vec::with_capacity(n);
            let mut nuclear_gap = Vec::with_capacity(n);
            for (i, (lam, x)) in lambdas.iter().zip(result.components.iter()).enumerate() {
                let sl = thin_svd(&lam.unfold(i)?)?.s;
                let spec = sl.first().copied().unwrap_or_else(T::zero);
                spectral_norms.push(if w[i] > T::zero() { spec / w[i] } else { spec });
                let nuc: T = thin_svd(&x.unfold(i)?)?.s.iter().copied().sum();
                nuclear_gap.push((lam.inner(x)? - w[i] * nuc).abs());
            }
            let e_gap = l1_subgradient_gap(&result.e, e_mult, c.lambda1)?;
            Ok(KktCertificate {
                kind: KktKind::Convex,
                spectral_norms,
                nuclear_gap,
                orthogonality: Vec::new(),
                e_fixed_point_gap: e_gap,
                feasibility,
            })
        }
        Model::Nonconvex | Model::Tucker => {
            let mut orthogonality = Vec::with_capacity(n);
            for (i, (lam, x)) in lambdas.iter().zip(result.components.iter()).enumerate() {
                orthogonality.push(orthogonality_residual(lam, x, i)?);
            }
            let e_gap = nonconvex_e_gap(result, &p, c.model == Model::Tucker)?;
            Ok(KktCertificate {
                kind: KktKind::Nonconvex,
                spectral_norms: Vec::new(),
                nuclear_gap: Vec::new(),
                orthogonality,
                e_fixed_point_gap: e_gap,
                feasibility,
            })
        }
        Model::SingletonLagrangian | Model::MixtureLagrangian => Err(Error::MultipliersAbsent),
    }
}

/// Relative constraint violation of the returned iterates. Under splitting
/// the returned `X` stands in for `Y`.
fn feasibility<T: Scalar>(r: &SolverResult<T>, p: &Problem<T>, c: &SolverConfig<T>) -> Result<T> {
    let n = r.components.len();
    let mut st = SolverState::zeros(p.shape(), n, 1, r.mu)?;
    st.xs = r.components.clone();
    st.e = r.e.clone();
    if p.mask().is_some() && !c.model.is_mixture_family() {
        st.y = Some(r.x.clone());
    }
    Ok(residuals(&st, &st, p, c)?.0)
}

/// `max_j dist(m_j, λ₁ ∂|e_j|)`.
fn l1_subgradient_gap<T: Scalar>(e: &DenseTensor<T>, m: &DenseTensor<T>, l1: T) -> Result<T> {
    if e.shape() != m.shape() {
        return Err(Error::ShapeMismatch {
            expected: e.dims().to_vec(),
            found: m.dims().to_vec(),
        });
    }
    Ok(e.as_slice()
        .iter()
        .zip(m.as_slice())
        .map(|(&ev, &mv)| {
            if ev > T::zero() {
                (mv - l1).abs()
            } else if ev < T::zero() {
                (mv + l1).abs()
            } else {
                (mv.abs() - l1).max(T::zero())
            }
        })
        .fold(T::zero(), T::max))
}

fn orthogonality_residual<T: Scalar>(lam: &DenseTensor<T>, x: &DenseTensor<T>, mode: usize) -> Result<T> {
    let svd = thin_svd(&x.unfold(mode)?)?;
    let r = svd.rank(T::lit(1e-12));
    if r == 0 {
        return Ok(T::zero());
    }
    let l = lam.unfold(mode)?;
    let mut lv = T::zero();
    let mut ul = T::zero();
    for j in 0..r {
        // ‖Λ v_j‖² and ‖u_jᵀ Λ‖²
        let v = (0..svd.v.rows()).map(|k| svd.v[(k, j)]);
        let mut col = vec![T::zero(); l.rows()];
        for (k, vk) in v.enumerate() {
            for (o, &a) in col.iter_mut().zip(l.col(k)) {
                *o += a * vk;
            }
        }
        lv += col.iter().map(|&a| a * a).sum::<T>();
        let u = svd.u.col(j);
        for k in 0..l.cols() {
            let d: T = u.iter().zip(l.col(k)).map(|(&a, &b)| a * b).sum();
            ul += d * d;
        }
    }
    Ok(lv.sqrt().max(ul.sqrt()) / lam.fro_norm().max(T::one()))
}

fn nonconvex_e_gap<T: Scalar>(r: &SolverResult<T>, p: &Problem<T>, tucker: bool) -> Result<T> {
    let mu = r.mu;
    let n = T::from_usize_lossy(r.components.len());
    let lambdas = r.multipliers.as_ref().ok_or(Error::MultipliersAbsent)?;
    let target = match p.mask() {
        Some(_) => {
            // A_Ω*λ ∈ ∂‖E‖₁  ⇔  E = S_μ(E + μ A_Ω*λ)
            let m = r.e_multiplier.as_ref().ok_or(Error::MultipliersAbsent)?;
            let mut t = r.e.clone();
            t.add_scaled(mu, m)?;
            t.map(|v| shrink_scalar(v, mu))
        }
        None => {
            let mut acc = DenseTensor::zeros(p.shape().clone());
            for (lam, x) in lambdas.iter().zip(r.components.iter()) {
                acc.add_scaled(T::one(), p.b())?;
                acc.add_scaled(mu, lam)?;
                acc.add_scaled(-T::one(), x)?;
            }
            if tucker {
                acc.scale(T::one() / (n + mu + mu))
            } else {
                acc.map(|v| shrink_scalar(v, mu) / n)
            }
        }
    };
    r.e.max_abs_diff(&target)
}
