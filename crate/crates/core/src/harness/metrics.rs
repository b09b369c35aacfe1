use crate::error::{Error, Result};
use crate::prox::{thin_qr, thin_svd};
use crate::scalar::Scalar;
use crate::tensor::{DenseTensor, Matrix};

/// `‖X − X₀‖_F / ‖X₀‖_F`.
pub fn rel_error<T: Scalar>(x: &DenseTensor<T>, x0: &DenseTensor<T>) -> Result<T> {
    let d = x.sub(x0)?;
    let r = x0.fro_norm();
    if r == T::zero() {
        return Err(Error::ZeroReference);
    }
    Ok(d.fro_norm() / r)
}

/// Per-mode count of singular values above `threshold · σ_max` of each
/// unfolding. A zero tensor has rank zero in every mode.
pub fn estimate_rank<T: Scalar>(x: &DenseTensor<T>, threshold: T) -> Result<Vec<usize>> {
    if !(threshold > T::zero() && threshold < T::one()) {
        return Err(Error::param(format!("rank threshold {threshold} must lie in (0, 1)")));
    }
    (0..x.order())
        .map(|mode| Ok(thin_svd(&x.unfold(mode)?)?.rank(threshold)))
        .collect()
}

/// Truncated HOSVD: the leading `rᵢ` left singular vectors `Uᵢ` of every
/// unfolding and the core `G = X ×₁ U₁ᵀ ⋯ ×_N U_Nᵀ`. Frames are completed
/// with an orthonormal complement when `rᵢ` exceeds the unfolding's column
/// count.
pub fn core_tensor<T: Scalar>(
    x: &DenseTensor<T>,
    ranks: &[usize],
) -> Result<(DenseTensor<T>, Vec<Matrix<T>>)> {
    if ranks.len() != x.order() {
        return Err(Error::param(format!(
            "{} ranks for an order-{} tensor",
            ranks.len(),
            x.order()
        )));
    }
    let mut factors = Vec::with_capacity(ranks.len());
    for (mode, (&r, &d)) in ranks.iter().zip(x.dims()).enumerate() {
        if r == 0 || r > d {
            return Err(Error::RankOutOfRange { mode, rank: r, limit: d });
        }
        factors.push(leading_frame(&thin_svd(&x.unfold(mode)?)?.u, r)?);
    }
    let mut g = x.clone();
    for (mode, u) in factors.iter().enumerate() {
        g = g.mode_multiply(&u.transpose(), mode)?;
    }
    Ok((g, factors))
}

/// First `r` columns of `u`, extended by an orthonormal complement if needed.
fn leading_frame<T: Scalar>(u: &Matrix<T>, r: usize) -> Result<Matrix<T>> {
    let rows = u.rows();
    let have = u.cols().min(r);
    let mut data: Vec<T> = u.as_slice()[..rows * have].to_vec();
    if have == r {
        return Matrix::from_col_major(rows, r, data);
    }
    // Gram–Schmidt the standard basis against the columns already present.
    let mut count = have;
    for k in 0..rows {
        if count == r {
            break;
        }
        let mut v = vec![T::zero(); rows];
        v[k] = T::one();
        for _ in 0..2 {
            for j in 0..count {
                let q = &data[j * rows..(j + 1) * rows];
                let d: T = q.iter().zip(&v).map(|(&a, &b)| a * b).sum();
                for (vi, &qi) in v.iter_mut().zip(q) {
                    *vi -= d * qi;
                }
            }
        }
        let n = v.iter().map(|&a| a * a).sum::<T>().sqrt();
        if n > T::lit(1e-6) {
            data.extend(v.into_iter().map(|a| a / n));
            count += 1;
        }
    }
    let (q, _) = thin_qr(&Matrix::from_col_major(rows, r, data)?)?;
    Ok(q)
}

/// `G ×₁ U₁ ⋯ ×_N U_N`.
pub fn reconstruct<T: Scalar>(g: &DenseTensor<T>, factors: &[Matrix<T>]) -> Result<DenseTensor<T>> {
    if factors.len() != g.order() {
        return Err(Error::param(format!(
            "{} factors for an order-{} core",
            factors.len(),
            g.order()
        )));
    }
    let mut x = g.clone();
    for (mode, u) in factors.iter().enumerate() {
        x = x.mode_multiply(u, mode)?;
    }
    Ok(x)
}
