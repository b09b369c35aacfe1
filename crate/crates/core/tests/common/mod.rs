//! Independent oracles and fixtures shared by the integration tests.
#![allow(dead_code)]

use horpca::harness::{corrupt, gen_low_rank, CorruptionSpec, SynthSpec};
use horpca::tensor::{DenseTensor, Matrix, Shape};
use nalgebra::DMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn random_tensor(dims: &[usize], seed: u64) -> DenseTensor<f64> {
    let shape = Shape::new(dims.to_vec()).unwrap();
    let mut r = rng(seed);
    let data = (0..shape.len()).map(|_| r.random_range(-1.0..1.0)).collect();
    DenseTensor::from_vec(shape, data).unwrap()
}

pub fn random_matrix(rows: usize, cols: usize, seed: u64) -> Matrix<f64> {
    let mut r = rng(seed);
    let data = (0..rows * cols).map(|_| r.random_range(-1.0..1.0)).collect();
    Matrix::from_col_major(rows, cols, data).unwrap()
}

pub fn to_na(m: &Matrix<f64>) -> DMatrix<f64> {
    DMatrix::from_column_slice(m.rows(), m.cols(), m.as_slice())
}

pub fn from_na(m: &DMatrix<f64>) -> Matrix<f64> {
    Matrix::from_col_major(m.nrows(), m.ncols(), m.as_slice().to_vec()).unwrap()
}

/// Low-rank tensor plus sparse corruption: `(X₀, B)`.
pub fn instance(
    dims: &[usize],
    ranks: &[usize],
    rho_n: f64,
    seed: u64,
) -> (DenseTensor<f64>, DenseTensor<f64>) {
    let x0 = gen_low_rank(&SynthSpec::new(dims, ranks, seed).unwrap()).unwrap();
    let (b, _) = corrupt(&x0, &CorruptionSpec { rho_n, magnitude: 1.0, seed }).unwrap();
    (x0, b)
}

/// Brute-force entry of the mode-`mode` unfolding: row `i_mode`, column the
/// lexicographic rank (last index fastest) of the remaining indices.
pub fn unfold_brute(x: &DenseTensor<f64>, mode: usize) -> Vec<Vec<f64>> {
    let dims = x.dims().to_vec();
    let others: Vec<usize> = (0..dims.len()).filter(|&k| k != mode).collect();
    let cols: usize = others.iter().map(|&k| dims[k]).product();
    let mut out = vec![vec![0.0; cols]; dims[mode]];
    for lin in 0..x.len() {
        let idx = x.shape().multi_index(lin);
        let mut c = 0;
        for &k in &others {
            c = c * dims[k] + idx[k];
        }
        out[idx[mode]][c] = x.as_slice()[lin];
    }
    out
}

/// `(X ×ₙ A)[.., j, ..] = Σ_k A[j, k] X[.., k, ..]` by explicit loops.
pub fn mode_multiply_brute(x: &DenseTensor<f64>, a: &Matrix<f64>, mode: usize) -> DenseTensor<f64> {
    let mut dims = x.dims().to_vec();
    dims[mode] = a.rows();
    let shape = Shape::new(dims).unwrap();
    let mut out = DenseTensor::zeros(shape.clone());
    for lin in 0..shape.len() {
        let mut idx = shape.multi_index(lin);
        let j = idx[mode];
        let mut acc = 0.0;
        for k in 0..a.cols() {
            idx[mode] = k;
            acc += a[(j, k)] * x.get(&idx);
        }
        out.as_mut_slice()[lin] = acc;
    }
    out
}

fn svt_na(m: &DMatrix<f64>, tau: f64) -> DMatrix<f64> {
    let svd = m.clone().svd(true, true);
    let s = svd.singular_values.map(|v| (v - tau).max(0.0));
    svd.u.unwrap() * DMatrix::from_diagonal(&s) * svd.v_t.unwrap()
}

/// Matrix RPCA `min ‖X‖_* + λ‖E‖₁ s.t. X + E = B` by the inexact augmented
/// Lagrangian method with a fixed penalty, on nalgebra's SVD.
pub fn matrix_rpca(b: &DMatrix<f64>, lambda: f64, tol: f64) -> (DMatrix<f64>, DMatrix<f64>) {
    let beta = 1.25 / b.clone().svd(false, false).singular_values[0];
    let mut x = DMatrix::zeros(b.nrows(), b.ncols());
    let mut e = DMatrix::zeros(b.nrows(), b.ncols());
    let mut y = DMatrix::zeros(b.nrows(), b.ncols());
    let nb = b.norm().max(1.0);
    for _ in 0..200_000 {
        let xn = svt_na(&(b - &e + &y / beta), 1.0 / beta);
        let en = (b - &xn + &y / beta).map(|v| v.signum() * (v.abs() - lambda / beta).max(0.0));
        let r = b - &xn - &en;
        y += &r * beta;
        let change = (&en - &e).norm() + (&xn - &x).norm();
        x = xn;
        e = en;
        if r.norm() / nb < tol && change / nb < tol {
            break;
        }
    }
    (x, e)
}

/// Truncated HOSVD followed by alternating least squares (HOOI): a Tucker
/// fit computed with nalgebra only.
pub fn hooi(x: &DenseTensor<f64>, ranks: &[usize], sweeps: usize) -> DenseTensor<f64> {
    let n = x.order();
    let leading = |m: &DMatrix<f64>, r: usize| -> DMatrix<f64> {
        let svd = m.clone().svd(true, false);
        let u = svd.u.unwrap();
        let mut order: Vec<usize> = (0..svd.singular_values.len()).collect();
        order.sort_by(|&a, &b| svd.singular_values[b].total_cmp(&svd.singular_values[a]));
        DMatrix::from_fn(u.nrows(), r, |i, j| u[(i, order[j])])
    };
    let mut us: Vec<DMatrix<f64>> = (0..n)
        .map(|k| leading(&to_na(&x.unfold(k).unwrap()), ranks[k]))
        .collect();
    for _ in 0..sweeps {
        for k in 0..n {
            let mut y = x.clone();
            for (j, u) in us.iter().enumerate() {
                if j != k {
                    y = y.mode_multiply(&from_na(&u.transpose()), j).unwrap();
                }
            }
            us[k] = leading(&to_na(&y.unfold(k).unwrap()), ranks[k]);
        }
    }
    let mut out = x.clone();
    for (k, u) in us.iter().enumerate() {
        out = out.mode_multiply(&from_na(&(u * u.transpose())), k).unwrap();
    }
    out
}
