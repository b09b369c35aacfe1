use crate::scalar::Scalar;
use crate::solvers::{Continuation, Model, Problem, SolverConfig};
use crate::tensor::population_std;

/// Data-dependent defaults for `model` on `p`.
///
/// * `μ = max(10 · std(B_Ω), 1e-6)` with the population standard deviation
///   of the observed values;
/// * `λ₁ = α / √I_max`, with `α = 1` for the singleton models and `1/N` for
///   the mixture models; `λ* = 1`;
/// * continuation from `λ₀ = max(0.99‖B_Ω‖, 1e-6)` by factor `0.97` down to
///   `1e-5 · λ₀`, with ratio `1/√I_max` and the same `α`.
pub fn default_params<T: Scalar>(p: &Problem<T>, model: Model) -> SolverConfig<T> {
    let n = p.shape().order();
    let r = T::one() / T::from_usize_lossy(p.shape().max_dim()).sqrt();
    let alpha = if model.is_mixture_family() {
        T::one() / T::from_usize_lossy(n)
    } else {
        T::one()
    };
    let observed = p.observed_values();
    let b_norm = observed.iter().map(|&v| v * v).sum::<T>().sqrt();
    let lambda0 = (T::lit(0.99) * b_norm).max(T::lit(1e-6));

    let mut c = SolverConfig::new(model);
    c.mu = (T::lit(10.0) * population_std(&observed)).max(T::lit(1e-6));
    c.lambda1 = alpha * r;
    c.lambda_star = T::one();
    c.continuation = Continuation {
        lambda0,
        lambda_bar: T::lit(1e-5) * lambda0,
        factor: T::lit(0.97),
        ratio: r,
        alpha,
    };
    c
}
