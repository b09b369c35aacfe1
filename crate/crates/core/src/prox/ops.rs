use super::svd::{thin_svd, weighted_product};
use crate::error::{Error, Result};
use crate::scalar::Scalar;
use crate::tensor::{DenseTensor, Matrix};

fn check_tau<T: Scalar>(tau: T) -> Result<()> {
    if tau.is_nan() || tau < T::zero() {
        return Err(Error::param(format!("threshold must be nonnegative, got {tau}")));
    }
    Ok(())
}

/// Singular value thresholding `U diag(max(σ − τ, 0)) Vᵀ`.
pub fn svt<T: Scalar>(m: &Matrix<T>, tau: T) -> Result<Matrix<T>> {
    svt_with_norm(m, tau).map(|(out, _)| out)
}

/// [`svt`] plus the nuclear norm of its output.
pub fn svt_with_norm<T: Scalar>(m: &Matrix<T>, tau: T) -> Result<(Matrix<T>, T)> {
    check_tau(tau)?;
    let svd = thin_svd(m)?;
    let kept: Vec<T> = svd
        .s
        .iter()
        .map(|&s| s - tau)
        .take_while(|&s| s > T::zero())
        .collect();
    let norm = kept.iter().copied().sum();
    Ok((weighted_product(&svd.u, &kept, &svd.v), norm))
}

/// `fold(svt(unfold(x, mode), tau), mode)`.
pub fn svt_mode<T: Scalar>(x: &DenseTensor<T>, mode: usize, tau: T) -> Result<DenseTensor<T>> {
    svt_mode_with_norm(x, mode, tau).map(|(out, _)| out)
}

pub fn svt_mode_with_norm<T: Scalar>(
    x: &DenseTensor<T>,
    mode: usize,
    tau: T,
) -> Result<(DenseTensor<T>, T)> {
    let (m, norm) = svt_with_norm(&x.unfold(mode)?, tau)?;
    Ok((DenseTensor::fold(&m, mode, x.shape())?, norm))
}

/// Soft threshold of one value; `|x| = τ` maps to exactly zero.
#[inline]
pub fn shrink_scalar<T: Scalar>(x: T, tau: T) -> T {
    if x > tau {
        x - tau
    } else if x < -tau {
        x + tau
    } else {
        T::zero()
    }
}

/// Elementwise `sign(x)·max(|x| − τ, 0)`.
pub fn shrink<T: Scalar>(x: &DenseTensor<T>, tau: T) -> Result<DenseTensor<T>> {
    let mut out = x.clone();
    shrink_in_place(&mut out, tau)?;
    Ok(out)
}

pub fn shrink_in_place<T: Scalar>(x: &mut DenseTensor<T>, tau: T) -> Result<()> {
    check_tau(tau)?;
    x.as_mut_slice().iter_mut().for_each(|v| *v = shrink_scalar(*v, tau));
    Ok(())
}

/// Best rank-`k` approximation (truncated SVD).
pub fn rank_project<T: Scalar>(m: &Matrix<T>, k: usize) -> Result<Matrix<T>> {
    let limit = m.rows().min(m.cols());
    if k > limit {
        return Err(Error::RankOutOfRange { mode: 0, rank: k, limit });
    }
    if k == 0 {
        return Ok(Matrix::zeros(m.rows(), m.cols()));
    }
    let svd = thin_svd(m)?;
    Ok(weighted_product(&svd.u, &svd.s[..k], &svd.v))
}

/// `fold(rank_project(unfold(x, mode), k), mode)`.
pub fn rank_project_mode<T: Scalar>(
    x: &DenseTensor<T>,
    mode: usize,
    k: usize,
) -> Result<DenseTensor<T>> {
    let m = x.unfold(mode)?;
    let p = rank_project(&m, k).map_err(|e| match e {
        Error::RankOutOfRange { rank, limit, .. } => Error::RankOutOfRange { mode, rank, limit },
        other => other,
    })?;
    DenseTensor::fold(&p, mode, x.shape())
}

pub fn nuclear_norm<T: Scalar>(m: &Matrix<T>) -> Result<T> {
    Ok(thin_svd(m)?.s.iter().copied().sum())
}

pub fn spectral_norm<T: Scalar>(m: &Matrix<T>) -> Result<T> {
    Ok(thin_svd(m)?.s.first().copied().unwrap_or_else(T::zero))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::tensor::Shape;

    #[test]
    fn svt_diagonal() {
        let m = Matrix::<f64>::from_diag(&[3.0, 1.0]);
        let out = svt(&m, 2.0).unwrap();
        assert!(out.max_abs_diff(&Matrix::from_diag(&[1.0, 0.0])) < 1e-14);
        assert!(svt(&m, 3.5).unwrap().max_abs() == 0.0);
        assert!(svt(&m, 0.0).unwrap().max_abs_diff(&m) < 1e-14);
        assert!(svt(&m, -1.0).is_err());
        let (_, norm) = svt_with_norm(&m, 0.5).unwrap();
        assert!((norm - 3.0).abs() < 1e-14);
    }

    #[test]
    fn svt_mode_rank_one_scaling() {
        // outer product of (3,4)/5 and (1,0,0,...) scaled to σ = 5
        let shape = Shape::new(vec![2, 2, 2]).unwrap();
        let mut x = DenseTensor::zeros(shape);
        x.set(&[0, 0, 0], 3.0);
        x.set(&[1, 0, 0], 4.0);
        let y = svt_mode(&x, 0, 1.0).unwrap();
        assert!(y.max_abs_diff(&x.scale(0.8)).unwrap() < 1e-14);
    }

    #[test]
    fn shrink_values() {
        let s = Shape::new(vec![3]).unwrap();
        let x = DenseTensor::from_vec(s, vec![3.0, -0.5, 0.0]).unwrap();
        assert_eq!(shrink(&x, 1.0).unwrap().as_slice(), &[2.0, 0.0, 0.0]);
        assert_eq!(shrink(&x, 0.0).unwrap(), x);
        assert_eq!(shrink_scalar(1.0, 1.0), 0.0);
        assert_eq!(shrink_scalar(-1.0, 1.0), 0.0);
        assert!(shrink(&x, -0.1).is_err());
    }

    #[test]
    fn rank_projection() {
        let m = Matrix::<f64>::from_diag(&[3.0, 1.0]);
        assert!(rank_project(&m, 1).unwrap().max_abs_diff(&Matrix::from_diag(&[3.0, 0.0])) < 1e-14);
        assert!(rank_project(&m, 2).unwrap().max_abs_diff(&m) < 1e-14);
        assert_eq!(rank_project(&m, 0).unwrap().max_abs(), 0.0);
        assert!(matches!(rank_project(&m, 3), Err(Error::RankOutOfRange { .. })));
    }
}
