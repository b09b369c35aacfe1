//! HoRPCA solvers.
//!
//! | model | algorithm | returns |
//! |---|---|---|
//! | singleton | ADAL over `{X_i}` and `E` (Y-splitting with a mask) | mean of `X_i` |
//! | mixture | inexact ADAL with a proximal-gradient `X` block | `Σ X_i` |
//! | singleton-lagrangian, mixture-lagrangian | FISTA with continuation | mean / sum |
//! | nonconvex | ADAL with rank projections and a decreasing `μ` | mean of `X_i` |
//! | tucker | the nonconvex scheme with a squared-loss `E` step | mean of `X_i` |
//!
//! The ADAL penalty follows the `1/(2μ)` convention: larger `μ` means
//! stronger thresholding and smaller multiplier steps.

mod config_file;
mod kkt;
mod lagrangian;
mod mixture;
mod nonconvex;
mod singleton;
mod split;

use std::fmt;
use std::io::Write;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::prox::{rank_project_mode, svt_mode_with_norm};
use crate::scalar::Scalar;
use crate::tensor::{DenseTensor, ObservationMask, Shape, TensorArray};

pub use config_file::parse_key_values;
pub use kkt::{kkt_certificate, KktCertificate, KktKind};
pub use lagrangian::{smooth_gradient, smooth_loss, solve_lagrangian, LagrangianModel};
pub use mixture::solve_mixture;
pub use nonconvex::{solve_nonconvex, solve_tucker};
pub use singleton::solve_singleton;
pub use split::solve_singleton_partial;

/// Which HoRPCA model to solve.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Model {
    Singleton,
    Mixture,
    SingletonLagrangian,
    MixtureLagrangian,
    Nonconvex,
    Tucker,
}

impl Model {
    pub const ALL: [Model; 6] = [
        Model::Singleton,
        Model::Mixture,
        Model::SingletonLagrangian,
        Model::MixtureLagrangian,
        Model::Nonconvex,
        Model::Tucker,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Model::Singleton => "singleton",
            Model::Mixture => "mixture",
            Model::SingletonLagrangian => "singleton-lagrangian",
            Model::MixtureLagrangian => "mixture-lagrangian",
            Model::Nonconvex => "nonconvex",
            Model::Tucker => "tucker",
        }
    }

    /// Short code used on the command line.
    pub fn code(self) -> &'static str {
        match self {
            Model::Singleton => "s",
            Model::Mixture => "m",
            Model::SingletonLagrangian => "sp",
            Model::MixtureLagrangian => "mp",
            Model::Nonconvex => "c",
            Model::Tucker => "tucker",
        }
    }

    /// Mixture-family models weight `λ₁` by `1/N` in the default heuristic.
    pub fn is_mixture_family(self) -> bool {
        matches!(self, Model::Mixture | Model::MixtureLagrangian)
    }

    pub fn is_lagrangian(self) -> bool {
        matches!(self, Model::SingletonLagrangian | Model::MixtureLagrangian)
    }

    pub fn needs_ranks(self) -> bool {
        matches!(self, Model::Nonconvex | Model::Tucker)
    }
}

impl fmt::Display for Model {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Model {
    type Err = Error;

    /// Accepts full names and the short codes (`s-adp` is the singleton model).
    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        Model::ALL
            .into_iter()
            .find(|m| m.name() == s || m.code() == s)
            .or((s == "s-adp").then_some(Model::Singleton))
            .ok_or_else(|| Error::param(format!("unknown model `{s}`")))
    }
}

/// Continuation pack for the FISTA solvers.
///
/// `λ*` starts at `lambda0` and is multiplied by `factor` after every
/// iteration until it reaches `lambda_bar`; the `ℓ₁` weight tracks it as
/// `λ₁ = alpha · ratio · λ*`.
#[derive(Clone, Debug, PartialEq)]
pub struct Continuation<T> {
    pub lambda0: T,
    pub lambda_bar: T,
    pub factor: T,
    pub ratio: T,
    pub alpha: T,
}

impl<T: Scalar> Continuation<T> {
    pub fn validate(&self) -> Result<()> {
        let c = self;
        if !(c.lambda_bar > T::zero() && c.lambda0 >= c.lambda_bar && c.lambda0.is_finite()) {
            return Err(Error::param(format!(
                "continuation needs lambda0 >= lambda_bar > 0, got {} and {}",
                c.lambda0, c.lambda_bar
            )));
        }
        if !(c.factor > T::zero() && c.factor < T::one()) {
            return Err(Error::param(format!("continuation factor {} outside (0, 1)", c.factor)));
        }
        if !(c.ratio > T::zero() && c.ratio.is_finite()) {
            return Err(Error::param(format!("continuation ratio {} must be positive", c.ratio)));
        }
        if !(c.alpha > T::zero() && c.alpha.is_finite()) {
            return Err(Error::param(format!("continuation alpha {} must be positive", c.alpha)));
        }
        Ok(())
    }
}

/// Geometric decrease of `μ` for the nonconvex solvers: multiply by `factor`
/// every `period` iterations, never going below `floor`.
#[derive(Clone, Debug, PartialEq)]
pub struct MuSchedule<T> {
    pub initial: T,
    pub factor: T,
    pub period: usize,
    pub floor: T,
}

impl<T: Scalar> Default for MuSchedule<T> {
    fn default() -> Self {
        Self {
            initial: T::one(),
            factor: T::lit(0.9),
            period: 10,
            floor: T::lit(1e-4),
        }
    }
}

impl<T: Scalar> MuSchedule<T> {
    pub fn validate(&self) -> Result<()> {
        if !(self.initial > T::zero() && self.initial.is_finite()) {
            return Err(Error::param(format!("mu_schedule.initial {} must be positive", self.initial)));
        }
        if !(self.factor > T::zero() && self.factor <= T::one()) {
            return Err(Error::param(format!("mu_schedule.factor {} outside (0, 1]", self.factor)));
        }
        if self.period == 0 {
            return Err(Error::param("mu_schedule.period must be at least 1"));
        }
        if !(self.floor > T::zero()) {
            return Err(Error::param(format!("mu_schedule.floor {} must be positive", self.floor)));
        }
        Ok(())
    }

    /// `μ` in effect at zero-based iteration `k`.
    pub fn at(&self, k: usize) -> T {
        let steps = (k / self.period) as i32;
        (self.initial * self.factor.powi(steps)).max(self.floor.min(self.initial))
    }
}

/// Every tunable of every solver. Fields a model does not use are ignored.
#[derive(Clone, Debug, PartialEq)]
pub struct SolverConfig<T> {
    pub model: Model,
    /// `ℓ₁` weight `λ₁` (ADAL models).
    pub lambda1: T,
    /// Nuclear-norm scale `λ*` (ADAL models); the FISTA models drive `λ*`
    /// through [`Continuation`] instead.
    pub lambda_star: T,
    /// Per-mode nuclear weights `λ*ᵢ`; `None` means all ones.
    pub mode_weights: Option<Vec<T>>,
    /// ADAL penalty `μ` (convex ADAL models).
    pub mu: T,
    /// Proximal step `η` of the mixture solver; `None` means `1/(N+1)`.
    pub eta: Option<T>,
    pub continuation: Continuation<T>,
    /// Tucker-rank bounds `rᵢ` (nonconvex, tucker).
    pub target_ranks: Option<Vec<usize>>,
    pub mu_schedule: MuSchedule<T>,
    pub tol_adal: T,
    pub tol_fista: T,
    pub max_iters: usize,
}

impl<T: Scalar> SolverConfig<T> {
    /// Configuration with unit weights and the fixed defaults; data-dependent
    /// values come from [`crate::harness::default_params`].
    pub fn new(model: Model) -> Self {
        Self {
            model,
            lambda1: T::one(),
            lambda_star: T::one(),
            mode_weights: None,
            mu: T::one(),
            eta: None,
            continuation: Continuation {
                lambda0: T::one(),
                lambda_bar: T::lit(1e-5),
                factor: T::lit(0.97),
                ratio: T::one(),
                alpha: T::one(),
            },
            target_ranks: None,
            mu_schedule: MuSchedule::default(),
            tol_adal: T::lit(1e-3),
            tol_fista: T::lit(1e-4),
            max_iters: 500,
        }
    }

    /// Per-mode weights for an order-`n` problem.
    pub fn weights(&self, n: usize) -> Result<Vec<T>> {
        match &self.mode_weights {
            None => Ok(vec![T::one(); n]),
            Some(w) if w.len() != n => Err(Error::param(format!(
                "{} mode weights for an order-{n} tensor",
                w.len()
            ))),
            Some(w) => Ok(w.clone()),
        }
    }

    /// Mixture proximal step, defaulting to `1/(N+1)`.
    pub fn eta_for(&self, n: usize) -> T {
        self.eta
            .unwrap_or_else(|| T::one() / T::from_usize_lossy(n + 1))
    }

    /// Checks every field the configured model reads against a problem shape.
    pub fn validate(&self, shape: &Shape) -> Result<()> {
        let n = shape.order();
        let positive = |name: &str, v: T| {
            if v > T::zero() && v.is_finite() {
                Ok(())
            } else {
                Err(Error::param(format!("{name} must be positive and finite, got {v}")))
            }
        };
        positive("tol_adal", self.tol_adal)?;
        positive("tol_fista", self.tol_fista)?;
        if self.max_iters == 0 {
            return Err(Error::param("max_iters must be at least 1"));
        }
        match self.model {
            Model::Singleton | Model::Mixture => {
                positive("lambda1", self.lambda1)?;
                positive("lambda_star", self.lambda_star)?;
                positive("mu", self.mu)?;
            }
            Model::SingletonLagrangian | Model::MixtureLagrangian => self.continuation.validate()?,
            Model::Nonconvex | Model::Tucker => {
                self.mu_schedule.validate()?;
                self.check_ranks(shape)?;
            }
        }
        if !self.model.needs_ranks() {
            let w = self.weights(n)?;
            if w.iter().any(|&x| !(x >= T::zero() && x.is_finite())) {
                return Err(Error::param("mode weights must be nonnegative and finite"));
            }
            if w.iter().all(|&x| x == T::zero()) {
                return Err(Error::param("at least one mode weight must be positive"));
            }
        }
        if self.model == Model::Mixture {
            let eta = self.eta_for(n);
            let bound = T::one() / T::from_usize_lossy(n);
            if !(eta > T::zero() && eta < bound) {
                return Err(Error::param(format!(
                    "mixture step eta = {eta} must lie in (0, 1/N) = (0, {bound})"
                )));
            }
        }
        Ok(())
    }

    pub(crate) fn check_ranks(&self, shape: &Shape) -> Result<Vec<usize>> {
        let ranks = self
            .target_ranks
            .as_ref()
            .ok_or_else(|| Error::param(format!("model {} needs target_ranks", self.model)))?;
        if ranks.len() != shape.order() {
            return Err(Error::param(format!(
                "{} target ranks for an order-{} tensor",
                ranks.len(),
                shape.order()
            )));
        }
        for (mode, &rank) in ranks.iter().enumerate() {
            let (rows, cols) = shape.unfolding_dims(mode)?;
            let limit = rows.min(cols);
            if rank > limit {
                return Err(Error::RankOutOfRange { mode, rank, limit });
            }
        }
        Ok(ranks.clone())
    }
}

/// Observed data `B` and optional observation set `Ω`.
#[derive(Clone, Debug)]
pub struct Problem<T> {
    b: DenseTensor<T>,
    mask: Option<ObservationMask>,
}

impl<T: Scalar> Problem<T> {
    /// Full observations.
    pub fn full(b: DenseTensor<T>) -> Self {
        Self { b, mask: None }
    }

    /// Partial observations; entries of `b` outside the mask are zeroed.
    pub fn partial(b: DenseTensor<T>, mask: ObservationMask) -> Result<Self> {
        let b = mask.restrict(&b)?;
        Ok(Self { b, mask: Some(mask) })
    }

    pub fn new(b: DenseTensor<T>, mask: Option<ObservationMask>) -> Result<Self> {
        match mask {
            None => Ok(Self::full(b)),
            Some(m) => Self::partial(b, m),
        }
    }

    pub fn b(&self) -> &DenseTensor<T> {
        &self.b
    }

    pub fn mask(&self) -> Option<&ObservationMask> {
        self.mask.as_ref()
    }

    pub fn shape(&self) -> &Shape {
        self.b.shape()
    }

    /// Same data with a full mask dropped.
    pub fn normalized(&self) -> Self {
        match &self.mask {
            Some(m) if m.is_full() => Self::full(self.b.clone()),
            _ => self.clone(),
        }
    }

    /// Values the solver can see: all of `b`, or `b` on `Ω`.
    pub fn observed_values(&self) -> Vec<T> {
        match &self.mask {
            None => self.b.as_slice().to_vec(),
            Some(m) => m.project(&self.b).expect("mask shape checked at construction"),
        }
    }

    /// `max(1, ‖B‖)`, the normaliser of every relative residual.
    pub fn residual_scale(&self) -> T {
        self.b.fro_norm().max(T::one())
    }

    pub(crate) fn restrict(&self, x: &mut DenseTensor<T>) {
        if let Some(m) = &self.mask {
            m.restrict_in_place(x).expect("iterates share the problem shape");
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Status {
    Converged,
    MaxIters,
}

impl fmt::Display for Status {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Status::Converged => "converged",
            Status::MaxIters => "max-iters",
        })
    }
}

/// One row of a residual history. For the FISTA solvers `dual` holds the
/// relative change between consecutive iterates.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct IterRecord<T> {
    pub primal: T,
    pub dual: T,
    pub objective: T,
}

#[derive(Clone, Debug, PartialEq)]
pub struct SolverResult<T> {
    /// Recovered low-rank tensor.
    pub x: DenseTensor<T>,
    /// Recovered sparse tensor.
    pub e: DenseTensor<T>,
    /// Final `X_i`.
    pub components: TensorArray<T>,
    pub iterations: usize,
    pub status: Status,
    pub history: Vec<IterRecord<T>>,
    /// Multipliers paired with each `X_i` (ADAL models only).
    pub multipliers: Option<TensorArray<T>>,
    /// Multiplier acting on `E` (`Σ Λᵢ`, `Λ`, or `A_Ω* λ`).
    pub e_multiplier: Option<DenseTensor<T>>,
    /// Final penalty `μ` (ADAL) or gradient step (FISTA).
    pub mu: T,
}

impl<T: Scalar> SolverResult<T> {
    pub fn final_primal(&self) -> T {
        self.history.last().map_or_else(T::zero, |r| r.primal)
    }

    /// Writes the history as CSV with header `iter,primal,dual,objective`.
    pub fn write_history_csv<W: Write>(&self, mut w: W) -> Result<()> {
        writeln!(w, "iter,primal,dual,objective")?;
        for (k, r) in self.history.iter().enumerate() {
            writeln!(
                w,
                "{},{:e},{:e},{:e}",
                k + 1,
                r.primal.to_f64_lossy(),
                r.dual.to_f64_lossy(),
                r.objective.to_f64_lossy()
            )?;
        }
        w.flush()?;
        Ok(())
    }
}

/// Iterate set shared by the ADAL solvers.
#[derive(Clone, Debug, PartialEq)]
pub struct SolverState<T> {
    pub xs: TensorArray<T>,
    pub e: DenseTensor<T>,
    /// Splitting variable of the partial-observation singleton/nonconvex solvers.
    pub y: Option<DenseTensor<T>>,
    /// `Λᵢ` per mode, or a single `Λ` for the mixture model.
    pub lambdas: TensorArray<T>,
    /// `A_Ω* λ`, the multiplier of the observation constraint under splitting.
    pub lambda_obs: Option<DenseTensor<T>>,
    /// FISTA momentum.
    pub t: T,
    /// FISTA extrapolation point (components then `E`).
    pub ys: Option<TensorArray<T>>,
    pub mu: T,
    pub iter: usize,
}

impl<T: Scalar> SolverState<T> {
    /// All-zero iterates with `n` components and `multipliers` multiplier tensors.
    pub fn zeros(shape: &Shape, n: usize, multipliers: usize, mu: T) -> Result<Self> {
        Ok(Self {
            xs: TensorArray::zeros(shape.clone(), n)?,
            e: DenseTensor::zeros(shape.clone()),
            y: None,
            lambdas: TensorArray::zeros(shape.clone(), multipliers)?,
            lambda_obs: None,
            t: T::one(),
            ys: None,
            mu,
            iter: 0,
        })
    }
}

/// Relative primal and dual residuals of `state`, with `previous` supplying
/// the second block (`Y` under splitting, otherwise `E`) one iteration back.
///
/// * primal: `‖constraint violations‖ / max(1, ‖B‖)` where the violations are
///   `X_i + E − B` (singleton, nonconvex, tucker), `A_Ω*A_Ω(Σ X_i + E − B)`
///   (mixture) or `X_i − Y` together with `A_Ω(Y + E) − B_Ω` (splitting).
/// * dual: `‖block − previous block‖ / (μ · max(1, ‖B‖))`.
pub fn residuals<T: Scalar>(
    state: &SolverState<T>,
    previous: &SolverState<T>,
    p: &Problem<T>,
    c: &SolverConfig<T>,
) -> Result<(T, T)> {
    let scale = p.residual_scale();
    let b = p.b();
    let mut ss = T::zero();
    let mut acc = |mut r: DenseTensor<T>| {
        p.restrict(&mut r);
        let n = r.fro_norm();
        ss += n * n;
    };
    if c.model.is_mixture_family() {
        let mut r = state.xs.sum_components();
        r.add_scaled(T::one(), &state.e)?;
        r.add_scaled(-T::one(), b)?;
        acc(r);
    } else if let Some(y) = &state.y {
        let mut dev = T::zero();
        for x in &state.xs {
            let d = x.sub(y)?.fro_norm();
            dev += d * d;
        }
        let mut r = y.add(&state.e)?;
        r.add_scaled(-T::one(), b)?;
        acc(r);
        ss += dev;
    } else {
        for x in &state.xs {
            let mut r = x.add(&state.e)?;
            r.add_scaled(-T::one(), b)?;
            acc(r);
        }
    }
    let primal = ss.sqrt() / scale;
    let (now, before) = match (&state.y, &previous.y) {
        (Some(y), Some(y0)) => (y, y0),
        _ => (&state.e, &previous.e),
    };
    let dual = now.sub(before)?.fro_norm() / (state.mu * scale);
    Ok((primal, dual))
}

/// Solves `p` with the model named in `c`. A full mask is treated as no mask.
pub fn solve<T: Scalar>(p: &Problem<T>, c: &SolverConfig<T>) -> Result<SolverResult<T>> {
    let p = p.normalized();
    match c.model {
        Model::Singleton if p.mask().is_some() => solve_singleton_partial(&p, c),
        Model::Singleton => solve_singleton(&p, c),
        Model::Mixture => solve_mixture(&p, c),
        Model::SingletonLagrangian => solve_lagrangian(&p, c, LagrangianModel::Singleton),
        Model::MixtureLagrangian => solve_lagrangian(&p, c, LagrangianModel::Mixture),
        Model::Nonconvex => solve_nonconvex(&p, c),
        Model::Tucker => solve_tucker(&p, c),
    }
}

/// `T_{mode, tau}(z)` and the nuclear norm of the result; a zero weight skips
/// the SVD and returns `z` (its nuclear norm is then irrelevant).
pub(crate) fn nuclear_step<T: Scalar>(
    z: DenseTensor<T>,
    mode: usize,
    tau: T,
    weighted: bool,
) -> Result<(DenseTensor<T>, T)> {
    if !weighted {
        return Ok((z, T::zero()));
    }
    svt_mode_with_norm(&z, mode, tau)
}

/// Either the convex SVT step or the nonconvex rank projection.
#[derive(Clone, Debug)]
pub(crate) enum XStep<T> {
    Nuclear(Vec<T>),
    Rank(Vec<usize>),
}

impl<T: Scalar> XStep<T> {
    /// Applies the mode-`i` step to `z` with penalty `mu`; returns the new
    /// component and its weighted nuclear norm (zero for projections).
    pub(crate) fn apply(&self, z: DenseTensor<T>, i: usize, mu: T) -> Result<(DenseTensor<T>, T)> {
        match self {
            XStep::Nuclear(w) => {
                let (x, norm) = nuclear_step(z, i, mu * w[i], w[i] > T::zero())?;
                Ok((x, w[i] * norm))
            }
            XStep::Rank(r) => Ok((rank_project_mode(&z, i, r[i])?, T::zero())),
        }
    }
}

/// Sliding-window stall detector for the nonconvex solvers.
pub(crate) struct StallDetector<T> {
    window: usize,
    threshold: T,
    values: std::collections::VecDeque<T>,
}

impl<T: Scalar> StallDetector<T> {
    pub(crate) fn new() -> Self {
        Self {
            window: 30,
            threshold: T::lit(1e-8),
            values: std::collections::VecDeque::new(),
        }
    }

    /// Records a residual; true once the last `window` changes all stayed
    /// below the threshold.
    pub(crate) fn push(&mut self, v: T) -> bool {
        self.values.push_back(v);
        if self.values.len() > self.window + 1 {
            self.values.pop_front();
        }
        if self.values.len() <= self.window {
            return false;
        }
        let hi = self.values.iter().copied().fold(T::neg_infinity(), T::max);
        let lo = self.values.iter().copied().fold(T::infinity(), T::min);
        hi - lo < self.threshold
    }
}

fn check_finite<T: Scalar>(p: &Problem<T>) -> Result<()> {
    if p.b().is_finite() {
        Ok(())
    } else {
        Err(Error::NonFinite("observed data"))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn shape() -> Shape {
        Shape::new(vec![3, 4, 2]).unwrap()
    }

    #[test]
    fn model_codes_round_trip() {
        for m in Model::ALL {
            assert_eq!(m.code().parse::<Model>().unwrap(), m);
            assert_eq!(m.name().parse::<Model>().unwrap(), m);
        }
        assert_eq!("s-adp".parse::<Model>().unwrap(), Model::Singleton);
        assert!("x".parse::<Model>().is_err());
    }

    #[test]
    fn mixture_step_guard() {
        let mut c = SolverConfig::<f64>::new(Model::Mixture);
        assert!(c.validate(&shape()).is_ok());
        c.eta = Some(1.0 / 3.0);
        assert!(c.validate(&shape()).is_err());
        c.eta = Some(0.3);
        assert!(c.validate(&shape()).is_ok());
    }

    #[test]
    fn rank_validation() {
        let mut c = SolverConfig::<f64>::new(Model::Nonconvex);
        assert!(c.validate(&shape()).is_err());
        c.target_ranks = Some(vec![3, 4, 2]);
        assert!(c.validate(&shape()).is_ok());
        c.target_ranks = Some(vec![3, 5, 2]);
        assert!(matches!(c.validate(&shape()), Err(Error::RankOutOfRange { mode: 1, .. })));
    }

    #[test]
    fn mu_schedule_steps_and_floor() {
        let s = MuSchedule::<f64>::default();
        assert_eq!(s.at(0), 1.0);
        assert_eq!(s.at(9), 1.0);
        assert!((s.at(10) - 0.9).abs() < 1e-15);
        assert_eq!(s.at(100_000), 1e-4);
    }

    #[test]
    fn residual_formula_on_hand_built_state() {
        let s = shape();
        let b = DenseTensor::from_vec(s.clone(), (0..24).map(|v| v as f64 * 0.1).collect()).unwrap();
        let p = Problem::full(b.clone());
        let c = SolverConfig::new(Model::Singleton);
        // X_i = 2B, E = 0 so that X_i + E - B = B
        let mut st = SolverState::zeros(&s, 3, 3, 1.0).unwrap();
        st.xs = TensorArray::replicate(&b.scale(2.0), 3).unwrap();
        let (primal, dual) = residuals(&st, &st, &p, &c).unwrap();
        let bn = b.fro_norm();
        assert!((primal - bn * 3f64.sqrt() / bn.max(1.0)).abs() < 1e-12);
        assert_eq!(dual, 0.0);

        let feasible = SolverState {
            xs: TensorArray::replicate(&b, 3).unwrap(),
            ..st.clone()
        };
        assert_eq!(residuals(&feasible, &feasible, &p, &c).unwrap(), (0.0, 0.0));
    }

    #[test]
    fn stall_detector() {
        let mut d = StallDetector::<f64>::new();
        for _ in 0..30 {
            assert!(!d.push(0.5));
        }
        assert!(d.push(0.5));
        assert!(!d.push(0.6));
    }
}
