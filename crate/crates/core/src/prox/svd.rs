//! Thin QR and thin SVD.
//!
//! The SVD reduces the input to a square triangular factor with Householder
//! QR, then runs one-sided (Hestenes) Jacobi on its transpose. Jacobi gives
//! singular vectors orthogonal to working precision even for clustered or
//! vanishing singular values, which the shrinkage iterations depend on.

use crate::error::{Error, Result};
use crate::scalar::Scalar;
use crate::tensor::Matrix;

use crate::tensor::{axpy, dot, norm2};

const MAX_SWEEPS: usize = 80;

/// Thin singular value decomposition `M = U diag(s) Vᵀ`.
///
/// `u` is `rows × k`, `v` is `cols × k` with `k = min(rows, cols)`; `s` is
/// nonincreasing. Each column of `u` has its largest-magnitude entry
/// nonnegative (first such row on ties).
#[derive(Clone, Debug, PartialEq)]
pub struct Svd<T> {
    pub u: Matrix<T>,
    pub s: Vec<T>,
    pub v: Matrix<T>,
}

impl<T: Scalar> Svd<T> {
    /// `U diag(weights) Vᵀ` using the leading `weights.len()` triples.
    pub fn reconstruct_with(&self, weights: &[T]) -> Matrix<T> {
        weighted_product(&self.u, weights, &self.v)
    }

    pub fn reconstruct(&self) -> Matrix<T> {
        self.reconstruct_with(&self.s)
    }

    /// Count of singular values above `rel · σ_max`.
    pub fn rank(&self, rel: T) -> usize {
        let smax = self.s.first().copied().unwrap_or_else(T::zero);
        if smax == T::zero() {
            return 0;
        }
        self.s.iter().filter(|&&s| s > rel * smax).count()
    }
}

/// `Σ_j w_j u_j v_jᵀ` over the first `weights.len()` columns.
pub(crate) fn weighted_product<T: Scalar>(u: &Matrix<T>, weights: &[T], v: &Matrix<T>) -> Matrix<T> {
    let rows = u.rows();
    let cols = v.rows();
    let mut out = Matrix::zeros(rows, cols);
    for c in 0..cols {
        let dst = out.col_mut(c);
        for (j, &w) in weights.iter().enumerate() {
            let coeff = w * v[(c, j)];
            if coeff != T::zero() {
                axpy(coeff, u.col(j), dst);
            }
        }
    }
    out
}

/// Householder QR of a tall matrix (`rows ≥ cols`): `A = Q R` with `Q` of
/// size `rows × cols` having orthonormal columns and `R` upper triangular
/// with a nonnegative diagonal.
pub fn thin_qr<T: Scalar>(a: &Matrix<T>) -> Result<(Matrix<T>, Matrix<T>)> {
    let (p, q) = (a.rows(), a.cols());
    if p < q {
        return Err(Error::DimensionMismatch(format!("thin QR needs rows ≥ cols, got {p}x{q}")));
    }
    if !a.is_finite() {
        return Err(Error::NonFinite("QR input"));
    }
    let mut work = a.clone();
    let mut reflectors: Vec<(Vec<T>, T)> = Vec::with_capacity(q);
    for k in 0..q {
        let x = &work.col(k)[k..];
        let xnorm = norm2(x);
        if xnorm == T::zero() {
            reflectors.push((Vec::new(), T::zero()));
            continue;
        }
        let alpha = if x[0] >= T::zero() { -xnorm } else { xnorm };
        let mut v = x.to_vec();
        v[0] -= alpha;
        let vv = dot(&v, &v);
        let beta = if vv == T::zero() { T::zero() } else { T::lit(2.0) / vv };
        for j in k + 1..q {
            let col = &mut work.col_mut(j)[k..];
            let proj = beta * dot(&v, col);
            axpy(-proj, &v, col);
        }
        let col = &mut work.col_mut(k)[k..];
        col[0] = alpha;
        col[1..].iter_mut().for_each(|c| *c = T::zero());
        reflectors.push((v, beta));
    }

    let mut r = Matrix::zeros(q, q);
    for j in 0..q {
        for i in 0..=j {
            r[(i, j)] = work[(i, j)];
        }
    }

    let mut qm = Matrix::zeros(p, q);
    for j in 0..q {
        qm[(j, j)] = T::one();
    }
    for k in (0..q).rev() {
        let (v, beta) = &reflectors[k];
        if *beta == T::zero() {
            continue;
        }
        for j in k..q {
            let col = &mut qm.col_mut(j)[k..];
            let proj = *beta * dot(v, col);
            axpy(-proj, v, col);
        }
    }

    for k in 0..q {
        if r[(k, k)] < T::zero() {
            for j in k..q {
                r[(k, j)] = -r[(k, j)];
            }
            qm.col_mut(k).iter_mut().for_each(|x| *x = -*x);
        }
    }
    Ok((qm, r))
}

/// Thin SVD with the deterministic sign convention described on [`Svd`].
pub fn thin_svd<T: Scalar>(m: &Matrix<T>) -> Result<Svd<T>> {
    if !m.is_finite() {
        return Err(Error::NonFinite("SVD input"));
    }
    let wide = m.rows() < m.cols();
    let tall = if wide { m.transpose() } else { m.clone() };

    // tall = Q R ; Rᵀ = W diag(s) Zᵀ  ⇒  tall = (Q Z) diag(s) Wᵀ
    let (q, r) = if tall.rows() > tall.cols() {
        let (q, r) = thin_qr(&tall)?;
        (Some(q), r)
    } else {
        (None, tall)
    };
    let (w, s, z) = jacobi_square(r.transpose());
    let left = match q {
        Some(q) => q.matmul(&z)?,
        None => z,
    };
    let (mut u, mut v) = if wide { (w, left) } else { (left, w) };
    fix_signs(&mut u, &mut v);
    Ok(Svd { u, s, v })
}

/// One-sided Jacobi on a square matrix `A`: returns `(U, s, V)` with
/// `A = U diag(s) Vᵀ`, `s` sorted nonincreasing.
fn jacobi_square<T: Scalar>(mut a: Matrix<T>) -> (Matrix<T>, Vec<T>, Matrix<T>) {
    let n = a.cols();
    let mut v = Matrix::identity(n);
    let eps = T::epsilon();
    for _ in 0..MAX_SWEEPS {
        let mut rotated = false;
        for j in 0..n.saturating_sub(1) {
            for k in j + 1..n {
                let (aj, ak) = a.col_pair_mut(j, k);
                let alpha = dot(aj, aj);
                let beta = dot(ak, ak);
                let gamma = dot(aj, ak);
                if gamma == T::zero() || gamma.abs() <= eps * alpha.sqrt() * beta.sqrt() {
                    continue;
                }
                rotated = true;
                let zeta = (beta - alpha) / (gamma + gamma);
                let t = zeta.signum() / (zeta.abs() + T::one().hypot(zeta));
                let c = T::one() / T::one().hypot(t);
                let s = c * t;
                rotate(aj, ak, c, s);
                let (vj, vk) = v.col_pair_mut(j, k);
                rotate(vj, vk, c, s);
            }
        }
        if !rotated {
            break;
        }
    }

    let norms: Vec<T> = (0..n).map(|j| norm2(a.col(j))).collect();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&x, &y| norms[y].partial_cmp(&norms[x]).unwrap_or(std::cmp::Ordering::Equal));

    let mut u = Matrix::zeros(n, n);
    let mut vs = Matrix::zeros(n, n);
    let mut s = Vec::with_capacity(n);
    let mut missing = Vec::new();
    for (dst, &src) in order.iter().enumerate() {
        let sigma = norms[src];
        s.push(sigma);
        vs.col_mut(dst).copy_from_slice(v.col(src));
        if sigma > T::zero() {
            let inv = T::one() / sigma;
            for (o, &x) in u.col_mut(dst).iter_mut().zip(a.col(src)) {
                *o = x * inv;
            }
        } else {
            missing.push(dst);
        }
    }
    complete_basis(&mut u, &missing);
    (u, s, vs)
}

#[inline]
fn rotate<T: Scalar>(x: &mut [T], y: &mut [T], c: T, s: T) {
    for (xi, yi) in x.iter_mut().zip(y.iter_mut()) {
        let a = *xi;
        let b = *yi;
        *xi = c * a - s * b;
        *yi = s * a + c * b;
    }
}

/// Fills the listed (zero) columns of `u` with unit vectors orthogonal to
/// every other column, by Gram–Schmidt on the standard basis.
fn complete_basis<T: Scalar>(u: &mut Matrix<T>, missing: &[usize]) {
    if missing.is_empty() {
        return;
    }
    let n = u.rows();
    let mut filled: Vec<usize> = (0..u.cols()).filter(|j| !missing.contains(j)).collect();
    let mut candidate = 0;
    for &dst in missing {
        while candidate < n {
            let mut e = vec![T::zero(); n];
            e[candidate] = T::one();
            candidate += 1;
            for _ in 0..2 {
                for &j in &filled {
                    let proj = dot(u.col(j), &e);
                    axpy(-proj, u.col(j), &mut e);
                }
            }
            let norm = norm2(&e);
            if norm > T::lit(0.5) {
                let inv = T::one() / norm;
                for (o, x) in u.col_mut(dst).iter_mut().zip(e) {
                    *o = x * inv;
                }
                filled.push(dst);
                break;
            }
        }
    }
}

fn fix_signs<T: Scalar>(u: &mut Matrix<T>, v: &mut Matrix<T>) {
    for j in 0..u.cols() {
        let col = u.col(j);
        let mut best = 0;
        for (i, x) in col.iter().enumerate() {
            if x.abs() > col[best].abs() {
                best = i;
            }
        }
        if col[best] < T::zero() {
            u.col_mut(j).iter_mut().for_each(|x| *x = -*x);
            v.col_mut(j).iter_mut().for_each(|x| *x = -*x);
        }
    }
}
