mod common;

use common::{hooi, instance, matrix_rpca, random_tensor, to_na};
use horpca::harness::{default_params, gen_low_rank, rel_error, sample_mask, SynthSpec};
use horpca::solvers::{
    kkt_certificate, smooth_gradient, smooth_loss, solve, solve_mixture, solve_singleton,
    solve_singleton_partial, solve_tucker, KktKind, LagrangianModel, Model, Problem, SolverConfig,
    SolverResult, Status,
};
use horpca::tensor::{DenseTensor, ObservationMask, Shape, TensorArray};
use horpca::Error;

fn tight(mut c: SolverConfig<f64>, tol: f64, iters: usize) -> SolverConfig<f64> {
    c.tol_adal = tol;
    c.max_iters = iters;
    c
}

#[test]
fn zero_data_gives_zero_solution_for_every_model() {
    let p = Problem::full(DenseTensor::<f64>::zeros(Shape::new(vec![4, 3, 2]).unwrap()));
    for model in Model::ALL {
        let mut c = default_params(&p, model);
        c.target_ranks = Some(vec![1, 1, 1]);
        let r = solve(&p, &c).unwrap();
        assert_eq!(r.x.max_abs(), 0.0, "{model}");
        assert_eq!(r.e.max_abs(), 0.0, "{model}");
        assert_eq!(r.status, Status::Converged, "{model}");
    }
    let c = default_params(&p, Model::Singleton);
    assert_eq!(solve(&p, &c).unwrap().iterations, 1);
}

#[test]
fn singleton_recovers_a_small_instance() {
    let (x0, b) = instance(&[20, 20, 10], &[2, 2, 2], 0.05, 3);
    let p = Problem::full(b);
    let c = default_params(&p, Model::Singleton);
    let r = solve(&p, &c).unwrap();
    assert_eq!(r.status, Status::Converged);
    assert!(rel_error(&r.x, &x0).unwrap() < 1e-2);
    assert!(r.final_primal() < c.tol_adal);
}

#[test]
fn converged_result_is_feasible() {
    let (_, b) = instance(&[12, 10, 8], &[2, 2, 2], 0.1, 8);
    let p = Problem::full(b.clone());
    let c = default_params(&p, Model::Singleton);
    let r = solve(&p, &c).unwrap();
    assert_eq!(r.status, Status::Converged);
    let scale = b.fro_norm().max(1.0);
    let mut worst = 0.0f64;
    for x in r.components.iter() {
        let v = x.add(&r.e).unwrap().sub(&b).unwrap().fro_norm() / scale;
        worst = worst.max(v);
    }
    assert!(worst < c.tol_adal);
}

#[test]
fn partial_solver_with_full_mask_matches_full_solver() {
    let (_, b) = instance(&[6, 5, 4], &[2, 2, 2], 0.1, 11);
    let full = Problem::full(b.clone());
    let mut c = tight(default_params(&full, Model::Singleton), 1e-11, 50_000);
    c.mu = 0.01;
    let a = solve_singleton(&full, &c).unwrap();
    let masked = Problem::partial(b.clone(), ObservationMask::full(b.shape().clone())).unwrap();
    let s = solve_singleton_partial(&masked, &c).unwrap();
    assert_eq!(a.status, Status::Converged);
    assert_eq!(s.status, Status::Converged);
    assert!(a.x.max_abs_diff(&s.x).unwrap() < 1e-6);
    assert!(a.e.max_abs_diff(&s.e).unwrap() < 1e-6);
    // the dispatcher drops a full mask entirely
    let d = solve(&masked, &c).unwrap();
    assert_eq!(d.x, a.x);
}

#[test]
fn one_hot_weights_reproduce_matrix_rpca() {
    let (_, b) = instance(&[14, 10], &[2, 2], 0.1, 5);
    let lambda = 1.0 / (14f64).sqrt();
    let (xo, eo) = matrix_rpca(&to_na(&b.unfold(0).unwrap()), lambda, 1e-12);
    let p = Problem::full(b.clone());
    for weights in [vec![1.0, 0.0], vec![0.0, 1.0]] {
        let mut c = tight(SolverConfig::new(Model::Singleton), 1e-11, 100_000);
        c.lambda1 = lambda;
        c.mu = default_params(&p, Model::Singleton).mu;
        c.mode_weights = Some(weights.clone());
        let r = solve(&p, &c).unwrap();
        assert_eq!(r.status, Status::Converged);
        let x = to_na(&r.x.unfold(0).unwrap());
        let e = to_na(&r.e.unfold(0).unwrap());
        assert!((&x - &xo).amax() < 1e-6, "{weights:?}: {}", (&x - &xo).amax());
        assert!((&e - &eo).amax() < 1e-6, "{weights:?}");
    }
}

#[test]
fn mixture_and_singleton_coincide_for_order_one() {
    let b = random_tensor(&[30], 2);
    let p = Problem::full(b);
    let mut c = tight(SolverConfig::new(Model::Singleton), 1e-11, 100_000);
    c.lambda1 = 0.3;
    c.mu = 0.5;
    let s = solve(&p, &c).unwrap();
    c.model = Model::Mixture;
    let m = solve(&p, &c).unwrap();
    assert_eq!(s.status, Status::Converged);
    assert_eq!(m.status, Status::Converged);
    assert!(s.x.max_abs_diff(&m.x).unwrap() < 1e-6);
    assert!(s.e.max_abs_diff(&m.e).unwrap() < 1e-6);
}

#[test]
fn partial_singleton_leaves_unobserved_error_at_zero() {
    let (x0, b) = instance(&[20, 20, 10], &[2, 2, 2], 0.05, 4);
    let mask = sample_mask(b.shape(), 0.8, 4).unwrap();
    let p = Problem::partial(b, mask.clone()).unwrap();
    let c = default_params(&p, Model::Singleton);
    let r = solve(&p, &c).unwrap();
    let keep = mask.indicator();
    for (j, &v) in r.e.as_slice().iter().enumerate() {
        if !keep[j] {
            assert_eq!(v, 0.0);
        }
    }
    assert!(rel_error(&r.x, &x0).unwrap() < 5e-2);
}

#[test]
fn mixture_recovers_low_rank_sum() {
    let (x0, b) = instance(&[20, 20, 10], &[2, 2, 2], 0.05, 6);
    let p = Problem::full(b);
    let c = default_params(&p, Model::Mixture);
    let r = solve_mixture(&p, &c).unwrap();
    assert_eq!(r.components.len(), 3);
    assert!(r.x.max_abs_diff(&r.components.sum_components()).unwrap() < 1e-12);
    assert!(rel_error(&r.x, &x0).unwrap() < 0.5);
}

#[test]
fn lagrangian_singleton_recovers_and_reports_iterate_change() {
    let (x0, b) = instance(&[20, 20, 10], &[2, 2, 2], 0.05, 12);
    let p = Problem::full(b);
    let c = default_params(&p, Model::SingletonLagrangian);
    let r = solve(&p, &c).unwrap();
    assert_eq!(r.status, Status::Converged);
    assert!(rel_error(&r.x, &x0).unwrap() < 1e-2);
    assert!(r.multipliers.is_none());
    let last = r.history.last().unwrap();
    assert!(last.primal < c.tol_fista && last.dual < c.tol_fista);
    assert!(matches!(kkt_certificate(&r, &p, &c), Err(Error::MultipliersAbsent)));
}

#[test]
fn lagrangian_objective_decreases_over_windows_once_continuation_ends() {
    let (_, b) = instance(&[10, 10, 6], &[2, 2, 2], 0.05, 2);
    let p = Problem::full(b);
    let mut c = default_params(&p, Model::MixtureLagrangian);
    c.tol_fista = 1e-12;
    c.max_iters = 900;
    let r = solve(&p, &c).unwrap();
    // λ* hits its floor after ln(1e-5)/ln(0.97) ≈ 378 iterations
    let tail: Vec<f64> = r.history[400..].iter().map(|h| h.objective).collect();
    let minima: Vec<f64> = tail
        .chunks(50)
        .map(|w| w.iter().copied().fold(f64::INFINITY, f64::min))
        .collect();
    for pair in minima.windows(2) {
        assert!(pair[1] <= pair[0] * (1.0 + 1e-9), "{minima:?}");
    }
}

#[test]
fn smooth_gradient_matches_central_differences() {
    let shape = Shape::new(vec![4, 3, 3]).unwrap();
    let b = random_tensor(&[4, 3, 3], 1);
    let mask = sample_mask(&shape, 0.6, 3).unwrap();
    let problems = [Problem::full(b.clone()), Problem::partial(b, mask).unwrap()];
    for p in &problems {
        for model in [LagrangianModel::Singleton, LagrangianModel::Mixture] {
            for point in 0..5u64 {
                let xs = TensorArray::new((0..3).map(|i| random_tensor(&[4, 3, 3], 100 + 10 * point + i)).collect()).unwrap();
                let e = random_tensor(&[4, 3, 3], 200 + point);
                let (gx, ge) = smooth_gradient(p, model, &xs, &e).unwrap();
                let h = 1e-5;
                let mut num = Vec::new();
                let mut ana = Vec::new();
                for i in 0..3 {
                    for j in 0..e.len() {
                        let bump = |d: f64| {
                            let mut comps = xs.components().to_vec();
                            comps[i].as_mut_slice()[j] += d;
                            smooth_loss(p, model, &TensorArray::new(comps).unwrap(), &e).unwrap()
                        };
                        num.push((bump(h) - bump(-h)) / (2.0 * h));
                        ana.push(gx.components()[i].as_slice()[j]);
                    }
                }
                for j in 0..e.len() {
                    let bump = |d: f64| {
                        let mut e2 = e.clone();
                        e2.as_mut_slice()[j] += d;
                        smooth_loss(p, model, &xs, &e2).unwrap()
                    };
                    num.push((bump(h) - bump(-h)) / (2.0 * h));
                    ana.push(ge.as_slice()[j]);
                }
                let diff: f64 = num.iter().zip(&ana).map(|(a, b)| (a - b) * (a - b)).sum::<f64>().sqrt();
                let norm: f64 = ana.iter().map(|a| a * a).sum::<f64>().sqrt();
                assert!(diff <= 1e-6 * norm, "{model:?}: {diff} vs {norm}");
            }
        }
    }
}

#[test]
fn kkt_gaps_vanish_at_a_closed_form_optimum() {
    // B = σ u vᵀ with λ₁ huge: X = B, E = 0, Λᵢ = u vᵀ
    let (m, n) = (5, 4);
    let u: Vec<f64> = (0..m).map(|i| (i as f64 + 1.0).sin()).collect();
    let v: Vec<f64> = (0..n).map(|j| (j as f64 + 2.0).cos()).collect();
    let (nu, nv) = (u.iter().map(|a| a * a).sum::<f64>().sqrt(), v.iter().map(|a| a * a).sum::<f64>().sqrt());
    let shape = Shape::new(vec![m, n]).unwrap();
    let mut uv = DenseTensor::zeros(shape.clone());
    for i in 0..m {
        for j in 0..n {
            uv.set(&[i, j], u[i] * v[j] / (nu * nv));
        }
    }
    let b = uv.scale(3.0);
    let p = Problem::full(b.clone());
    let mut c = SolverConfig::new(Model::Singleton);
    c.lambda1 = 1e6;
    let result = SolverResult {
        x: b.clone(),
        e: DenseTensor::zeros(shape.clone()),
        components: TensorArray::replicate(&b, 2).unwrap(),
        iterations: 1,
        status: Status::Converged,
        history: Vec::new(),
        multipliers: Some(TensorArray::replicate(&uv, 2).unwrap()),
        e_multiplier: Some(uv.scale(2.0)),
        mu: 1.0,
    };
    let k = kkt_certificate(&result, &p, &c).unwrap();
    assert_eq!(k.kind, KktKind::Convex);
    for s in &k.spectral_norms {
        assert!((s - 1.0).abs() < 1e-6);
    }
    assert!(k.max_gap() < 1e-6, "{k:?}");

    // and the solver lands on it
    let r = solve(&p, &tight(c.clone(), 1e-8, 10_000)).unwrap();
    assert!(r.x.max_abs_diff(&b).unwrap() < 1e-6);
    assert!(kkt_certificate(&r, &p, &c).unwrap().max_gap() < 1e-6);
}

#[test]
fn kkt_certificate_of_zero_problem_is_zero() {
    let p = Problem::full(DenseTensor::<f64>::zeros(Shape::new(vec![3, 3, 2]).unwrap()));
    let c = default_params(&p, Model::Singleton);
    let r = solve(&p, &c).unwrap();
    let k = kkt_certificate(&r, &p, &c).unwrap();
    assert_eq!(k.max_gap(), 0.0);
    assert!(k.spectral_norms.iter().all(|&s| s == 0.0));
}

#[test]
fn kkt_certificate_on_converged_convex_instances() {
    let (_, b) = instance(&[15, 15, 8], &[2, 2, 2], 0.1, 21);
    let p = Problem::full(b);
    for model in [Model::Singleton, Model::Mixture] {
        let mut c = tight(default_params(&p, model), 1e-6, 20_000);
        c.mu = 0.1;
        let r = solve(&p, &c).unwrap();
        assert_eq!(r.status, Status::Converged, "{model}");
        let k = kkt_certificate(&r, &p, &c).unwrap();
        assert!(k.spectral_norms.iter().all(|&s| s <= 1.01), "{model}: {k:?}");
        assert!(k.max_gap() <= 1e-2, "{model}: {k:?}");
    }
    let mask = sample_mask(p.shape(), 0.7, 21).unwrap();
    let pp = Problem::partial(p.b().clone(), mask).unwrap();
    let mut c = tight(default_params(&pp, Model::Singleton), 1e-6, 20_000);
    c.mu = 0.1;
    let r = solve(&pp, &c).unwrap();
    assert_eq!(r.status, Status::Converged);
    let k = kkt_certificate(&r, &pp, &c).unwrap();
    assert!(k.spectral_norms.iter().all(|&s| s <= 1.01), "{k:?}");
    assert!(k.max_gap() <= 1e-2, "{k:?}");
}

#[test]
fn nonconvex_fixes_clean_low_rank_data() {
    let x0 = gen_low_rank::<f64>(&SynthSpec::new(&[12, 10, 8], &[3, 2, 2], 1).unwrap()).unwrap();
    let p = Problem::full(x0.clone());
    let mut c = default_params(&p, Model::Nonconvex);
    c.target_ranks = Some(vec![3, 2, 2]);
    let r = solve(&p, &c).unwrap();
    assert!(r.x.max_abs_diff(&x0).unwrap() < 1e-6);
    assert!(r.e.max_abs() < 1e-6);
    let k = kkt_certificate(&r, &p, &c).unwrap();
    assert_eq!(k.kind, KktKind::Nonconvex);
    assert!(k.max_gap() < 1e-6, "{k:?}");
}

#[test]
fn nonconvex_recovers_corrupted_partial_data() {
    let (x0, b) = instance(&[20, 20, 10], &[2, 2, 2], 0.2, 9);
    let mask = sample_mask(b.shape(), 0.5, 9).unwrap();
    let p = Problem::partial(b, mask).unwrap();
    let mut c = default_params(&p, Model::Nonconvex);
    c.target_ranks = Some(vec![2, 2, 2]);
    let r = solve(&p, &c).unwrap();
    assert!(rel_error(&r.x, &x0).unwrap() < 2e-2);
}

#[test]
fn tucker_fits_exactly_low_rank_data() {
    let x0 = gen_low_rank::<f64>(&SynthSpec::new(&[10, 9, 8], &[2, 3, 2], 4).unwrap()).unwrap();
    let p = Problem::full(x0.clone());
    let mut c = SolverConfig::new(Model::Tucker);
    c.target_ranks = Some(vec![2, 3, 2]);
    let r = solve_tucker(&p, &c).unwrap();
    assert!(rel_error(&r.x, &x0).unwrap() <= 1e-6);
}

#[test]
fn tucker_with_full_ranks_is_identity() {
    let b = random_tensor(&[4, 3, 5], 2);
    let p = Problem::full(b.clone());
    let mut c = SolverConfig::new(Model::Tucker);
    c.target_ranks = Some(vec![4, 3, 5]);
    let r = solve(&p, &c).unwrap();
    assert!(r.x.max_abs_diff(&b).unwrap() < 1e-6);
    assert!(r.e.max_abs() < 1e-6);
}

#[test]
fn tucker_fit_is_close_to_hooi_on_gaussian_data() {
    let b = random_tensor(&[10, 10, 10], 17);
    let p = Problem::full(b.clone());
    let mut c = SolverConfig::new(Model::Tucker);
    c.target_ranks = Some(vec![2, 2, 2]);
    c.max_iters = 2000;
    let r = solve(&p, &c).unwrap();
    let ours = rel_error(&r.x, &b).unwrap();
    let oracle = rel_error(&hooi(&b, &[2, 2, 2], 50), &b).unwrap();
    assert!(ours <= oracle * 1.02, "{ours} vs {oracle}");
}

#[test]
fn solves_are_bit_identical_across_runs() {
    let (_, b) = instance(&[10, 8, 6], &[2, 2, 2], 0.1, 30);
    let mask = sample_mask(b.shape(), 0.7, 30).unwrap();
    let p = Problem::partial(b, mask).unwrap();
    for model in Model::ALL {
        let mut c = default_params(&p, model);
        c.target_ranks = Some(vec![2, 2, 2]);
        c.max_iters = 60;
        if model == Model::Tucker {
            continue;
        }
        let a = solve(&p, &c).unwrap();
        let b = solve(&p, &c).unwrap();
        assert_eq!(a.x, b.x, "{model}");
        assert_eq!(a.e, b.e, "{model}");
        assert_eq!(a.history, b.history, "{model}");
    }
}

#[test]
fn single_precision_solve() {
    let (x0, b) = instance(&[20, 20, 10], &[2, 2, 2], 0.05, 7);
    let p = Problem::full(b.cast::<f32>());
    let c = default_params(&p, Model::Singleton);
    let r = solve(&p, &c).unwrap();
    let single = rel_error(&r.x, &x0.cast::<f32>()).unwrap();
    let pd = Problem::full(b);
    let double = rel_error(&solve(&pd, &default_params(&pd, Model::Singleton)).unwrap().x, &x0).unwrap();
    assert!(single < 5e-2);
    assert!((f64::from(single) - double).abs() < 1e-3, "{single} vs {double}");
}

#[test]
fn precondition_errors() {
    let b = random_tensor(&[4, 4, 3], 1);
    let mask = sample_mask(b.shape(), 0.5, 1).unwrap();
    let full = Problem::full(b.clone());
    let part = Problem::partial(b.clone(), mask).unwrap();
    let c = default_params(&full, Model::Singleton);
    assert!(matches!(solve_singleton(&part, &c), Err(Error::MaskNotSupported)));
    assert!(matches!(solve_singleton_partial(&full, &c), Err(Error::MaskRequired)));

    let mut t = SolverConfig::new(Model::Tucker);
    t.target_ranks = Some(vec![2, 2, 2]);
    assert!(matches!(solve(&part, &t), Err(Error::MaskNotSupported)));
    t.target_ranks = None;
    assert!(solve(&full, &t).is_err());
    t.target_ranks = Some(vec![5, 2, 2]);
    assert!(matches!(solve(&full, &t), Err(Error::RankOutOfRange { .. })));

    let mut m = default_params(&full, Model::Mixture);
    m.eta = Some(0.5);
    assert!(solve(&full, &m).is_err());

    let mut w = c.clone();
    w.mode_weights = Some(vec![0.0, 0.0, 0.0]);
    assert!(solve(&full, &w).is_err());
    w.mode_weights = Some(vec![1.0, 1.0]);
    assert!(solve(&full, &w).is_err());

    let mut nan = b.clone();
    nan.as_mut_slice()[0] = f64::NAN;
    assert!(solve(&Problem::full(nan), &c).is_err());
}

#[test]
fn max_iters_still_returns_a_result() {
    let (_, b) = instance(&[10, 10, 6], &[2, 2, 2], 0.1, 1);
    let p = Problem::full(b);
    let mut c = default_params(&p, Model::Singleton);
    c.max_iters = 2;
    let r = solve(&p, &c).unwrap();
    assert_eq!(r.status, Status::MaxIters);
    assert_eq!(r.iterations, 2);
    assert_eq!(r.history.len(), 2);
}

#[test]
fn history_csv_has_one_row_per_iteration() {
    let (_, b) = instance(&[8, 8, 4], &[2, 2, 2], 0.1, 1);
    let p = Problem::full(b);
    let r = solve(&p, &default_params(&p, Model::Singleton)).unwrap();
    let mut out = Vec::new();
    r.write_history_csv(&mut out).unwrap();
    let text = String::from_utf8(out).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines[0], "iter,primal,dual,objective");
    assert_eq!(lines.len(), r.iterations + 1);
}
