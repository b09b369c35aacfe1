//! Dense tensors, matricization and the linear operators the solvers build on.
//!
//! Storage is generalized column-major: the first index varies fastest, so the
//! mode-0 unfolding is a plain reshape. The mode-`n` unfolding places the
//! mode-`n` fibers as columns, ordered lexicographically in the remaining
//! indices with the earliest remaining index most significant and the last
//! one varying fastest. [`DenseTensor::fold`] is the exact inverse.

mod array;
pub mod io;
mod mask;
mod matrix;

pub use array::TensorArray;
pub use mask::ObservationMask;
pub use matrix::Matrix;

use crate::error::{Error, Result};
use crate::scalar::Scalar;
pub(crate) use matrix::{axpy, dot, norm2};

/// Extents `I_1 × … × I_N` of an N-way tensor.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Shape {
    dims: Vec<usize>,
    len: usize,
}

impl Shape {
    pub fn new(dims: impl Into<Vec<usize>>) -> Result<Self> {
        let dims = dims.into();
        if dims.is_empty() {
            return Err(Error::InvalidShape("a tensor needs at least one mode".into()));
        }
        if let Some(pos) = dims.iter().position(|&d| d == 0) {
            return Err(Error::InvalidShape(format!("mode {pos} has zero extent")));
        }
        let len = dims
            .iter()
            .try_fold(1usize, |acc, &d| acc.checked_mul(d))
            .ok_or_else(|| Error::InvalidShape(format!("{dims:?} overflows the index range")))?;
        Ok(Self { dims, len })
    }

    #[inline]
    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    /// Number of modes `N`.
    #[inline]
    pub fn order(&self) -> usize {
        self.dims.len()
    }

    /// Number of elements `Π I_n`.
    #[inline]
    pub fn len(&self) -> usize {
        self.len
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn max_dim(&self) -> usize {
        self.dims.iter().copied().max().unwrap_or(1)
    }

    /// Dimensions `(I_mode, Π_{j≠mode} I_j)` of the mode unfolding.
    pub fn unfolding_dims(&self, mode: usize) -> Result<(usize, usize)> {
        self.check_mode(mode)?;
        let rows = self.dims[mode];
        Ok((rows, self.len / rows))
    }

    pub fn check_mode(&self, mode: usize) -> Result<()> {
        if mode >= self.order() {
            Err(Error::ModeOutOfRange { mode, order: self.order() })
        } else {
            Ok(())
        }
    }

    /// Copy of this shape with one extent replaced.
    pub fn with_dim(&self, mode: usize, extent: usize) -> Result<Self> {
        self.check_mode(mode)?;
        let mut dims = self.dims.clone();
        dims[mode] = extent;
        Shape::new(dims)
    }

    /// Linear storage index of a multi-index.
    pub fn linear_index(&self, idx: &[usize]) -> usize {
        debug_assert_eq!(idx.len(), self.order());
        let mut lin = 0;
        let mut stride = 1;
        for (&i, &d) in idx.iter().zip(&self.dims) {
            debug_assert!(i < d);
            lin += i * stride;
            stride *= d;
        }
        lin
    }

    /// Multi-index of a linear storage index.
    pub fn multi_index(&self, mut lin: usize) -> Vec<usize> {
        self.dims
            .iter()
            .map(|&d| {
                let i = lin % d;
                lin /= d;
                i
            })
            .collect()
    }
}

impl std::fmt::Display for Shape {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let parts: Vec<String> = self.dims.iter().map(|d| d.to_string()).collect();
        f.write_str(&parts.join("x"))
    }
}

/// Precomputed index maps between storage order and one unfolding.
///
/// Storage splits as `left + L·(i + I·right)` where `left` ranges over the
/// modes before `mode` and `right` over those after. Lexicographic column
/// order reverses digit significance within each group, hence the two tables.
struct UnfoldPlan {
    left_len: usize,
    rows: usize,
    right_len: usize,
    left_lex: Vec<usize>,
    right_lex: Vec<usize>,
}

impl UnfoldPlan {
    fn new(shape: &Shape, mode: usize) -> Self {
        let dims = shape.dims();
        let left = &dims[..mode];
        let right = &dims[mode + 1..];
        Self {
            left_len: left.iter().product(),
            rows: dims[mode],
            right_len: right.iter().product(),
            left_lex: lex_table(left),
            right_lex: lex_table(right),
        }
    }

    #[inline]
    fn column(&self, l: usize, r: usize) -> usize {
        self.left_lex[l] * self.right_len + self.right_lex[r]
    }
}

/// For each first-index-fastest linear index over `dims`, the linear index of
/// the same multi-index under last-index-fastest ordering.
fn lex_table(dims: &[usize]) -> Vec<usize> {
    let len: usize = dims.iter().product();
    let mut table = Vec::with_capacity(len);
    let mut idx = vec![0usize; dims.len()];
    for _ in 0..len {
        let mut lex = 0;
        for (&i, &d) in idx.iter().zip(dims) {
            lex = lex * d + i;
        }
        table.push(lex);
        for (i, &d) in idx.iter_mut().zip(dims) {
            *i += 1;
            if *i < d {
                break;
            }
            *i = 0;
        }
    }
    table
}

/// N-way array of reals with an explicit shape.
#[derive(Clone, Debug, PartialEq)]
pub struct DenseTensor<T> {
    shape: Shape,
    data: Vec<T>,
}

impl<T: Scalar> DenseTensor<T> {
    pub fn zeros(shape: Shape) -> Self {
        let data = vec![T::zero(); shape.len()];
        Self { shape, data }
    }

    pub fn filled(shape: Shape, value: T) -> Self {
        let data = vec![value; shape.len()];
        Self { shape, data }
    }

    /// Wraps storage-ordered values; rejects wrong lengths and non-finite entries.
    pub fn from_vec(shape: Shape, data: Vec<T>) -> Result<Self> {
        if data.len() != shape.len() {
            return Err(Error::DimensionMismatch(format!(
                "{} values for shape {shape}",
                data.len()
            )));
        }
        if !data.iter().all(|v| v.is_finite()) {
            return Err(Error::NonFinite("tensor values"));
        }
        Ok(Self { shape, data })
    }

    #[inline]
    pub fn shape(&self) -> &Shape {
        &self.shape
    }

    #[inline]
    pub fn dims(&self) -> &[usize] {
        self.shape.dims()
    }

    #[inline]
    pub fn order(&self) -> usize {
        self.shape.order()
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.data.len()
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        self.data.is_empty()
    }

    #[inline]
    pub fn as_slice(&self) -> &[T] {
        &self.data
    }

    #[inline]
    pub fn as_mut_slice(&mut self) -> &mut [T] {
        &mut self.data
    }

    pub fn into_vec(self) -> Vec<T> {
        self.data
    }

    pub fn get(&self, idx: &[usize]) -> T {
        self.data[self.shape.linear_index(idx)]
    }

    pub fn set(&mut self, idx: &[usize], value: T) {
        let lin = self.shape.linear_index(idx);
        self.data[lin] = value;
    }

    pub fn is_finite(&self) -> bool {
        self.data.iter().all(|v| v.is_finite())
    }

    pub(crate) fn check_same_shape(&self, other: &Self) -> Result<()> {
        if self.shape != other.shape {
            return Err(Error::ShapeMismatch {
                expected: self.dims().to_vec(),
                found: other.dims().to_vec(),
            });
        }
        Ok(())
    }

    /// Mode unfolding `X_(mode)`.
    pub fn unfold(&self, mode: usize) -> Result<Matrix<T>> {
        let (rows, cols) = self.shape.unfolding_dims(mode)?;
        let plan = UnfoldPlan::new(&self.shape, mode);
        let mut out = vec![T::zero(); rows * cols];
        let mut src = self.data.chunks_exact(plan.left_len);
        for r in 0..plan.right_len {
            for i in 0..plan.rows {
                let block = src.next().expect("storage covers the plan");
                for (l, &v) in block.iter().enumerate() {
                    out[i + rows * plan.column(l, r)] = v;
                }
            }
        }
        Ok(Matrix::from_col_major(rows, cols, out).expect("unfolding dims are positive"))
    }

    /// Inverse of [`unfold`](Self::unfold): the tensor whose mode unfolding is `m`.
    pub fn fold(m: &Matrix<T>, mode: usize, shape: &Shape) -> Result<Self> {
        let (rows, cols) = shape.unfolding_dims(mode)?;
        if m.rows() != rows || m.cols() != cols {
            return Err(Error::DimensionMismatch(format!(
                "a {}x{} matrix cannot fold into mode {mode} of shape {shape}",
                m.rows(),
                m.cols()
            )));
        }
        let plan = UnfoldPlan::new(shape, mode);
        let src = m.as_slice();
        let mut data = Vec::with_capacity(shape.len());
        for r in 0..plan.right_len {
            for i in 0..plan.rows {
                for l in 0..plan.left_len {
                    data.push(src[i + rows * plan.column(l, r)]);
                }
            }
        }
        Ok(Self { shape: shape.clone(), data })
    }

    /// n-mode product `X ×_mode A`, with `A` of size `J × I_mode`.
    pub fn mode_multiply(&self, a: &Matrix<T>, mode: usize) -> Result<Self> {
        self.shape.check_mode(mode)?;
        if a.cols() != self.dims()[mode] {
            return Err(Error::DimensionMismatch(format!(
                "a {}x{} factor cannot multiply mode {mode} of extent {}",
                a.rows(),
                a.cols(),
                self.dims()[mode]
            )));
        }
        let product = a.matmul(&self.unfold(mode)?)?;
        let shape = self.shape.with_dim(mode, a.rows())?;
        Self::fold(&product, mode, &shape)
    }

    /// Tensor inner product `⟨X, Y⟩`.
    pub fn inner(&self, other: &Self) -> Result<T> {
        self.check_same_shape(other)?;
        Ok(dot(&self.data, &other.data))
    }

    pub fn fro_norm(&self) -> T {
        norm2(&self.data)
    }

    pub fn l1_norm(&self) -> T {
        self.data.iter().map(|v| v.abs()).sum()
    }

    pub fn max_abs(&self) -> T {
        self.data.iter().fold(T::zero(), |m, v| m.max(v.abs()))
    }

    /// Number of nonzero entries.
    pub fn count_nonzero(&self) -> usize {
        self.data.iter().filter(|v| **v != T::zero()).count()
    }

    pub fn map(&self, f: impl Fn(T) -> T) -> Self {
        Self {
            shape: self.shape.clone(),
            data: self.data.iter().map(|&v| f(v)).collect(),
        }
    }

    pub fn scale(&self, alpha: T) -> Self {
        self.map(|v| alpha * v)
    }

    /// `self += alpha * other`.
    pub fn add_scaled(&mut self, alpha: T, other: &Self) -> Result<()> {
        self.check_same_shape(other)?;
        axpy(alpha, &other.data, &mut self.data);
        Ok(())
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        let mut out = self.clone();
        out.add_scaled(T::one(), other)?;
        Ok(out)
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        let mut out = self.clone();
        out.add_scaled(-T::one(), other)?;
        Ok(out)
    }

    /// Largest absolute entrywise deviation from `other`.
    pub fn max_abs_diff(&self, other: &Self) -> Result<T> {
        self.check_same_shape(other)?;
        Ok(self
            .data
            .iter()
            .zip(&other.data)
            .fold(T::zero(), |m, (a, b)| m.max((*a - *b).abs())))
    }

    /// Population standard deviation of the entries.
    pub fn std_dev(&self) -> T {
        population_std(&self.data)
    }

    /// Converts to another scalar type.
    pub fn cast<U: Scalar>(&self) -> DenseTensor<U> {
        DenseTensor {
            shape: self.shape.clone(),
            data: self
                .data
                .iter()
                .map(|v| U::from_f64(v.to_f64_lossy()).unwrap_or_else(U::nan))
                .collect(),
        }
    }
}

pub(crate) fn population_std<T: Scalar>(values: &[T]) -> T {
    if values.is_empty() {
        return T::zero();
    }
    let n = T::from_usize_lossy(values.len());
    let mean = values.iter().copied().sum::<T>() / n;
    let var = values.iter().map(|&v| (v - mean) * (v - mean)).sum::<T>() / n;
    var.sqrt()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn seq_tensor(dims: &[usize]) -> DenseTensor<f64> {
        let shape = Shape::new(dims.to_vec()).unwrap();
        let data = (1..=shape.len()).map(|v| v as f64).collect();
        DenseTensor::from_vec(shape, data).unwrap()
    }

    #[test]
    fn shape_rejects_degenerate_input() {
        assert!(Shape::new(vec![]).is_err());
        assert!(Shape::new(vec![3, 0]).is_err());
        assert!(Shape::new(vec![usize::MAX, 2]).is_err());
        assert_eq!(Shape::new(vec![2, 3, 4]).unwrap().len(), 24);
    }

    #[test]
    fn mode1_unfolding_of_cube() {
        let x = seq_tensor(&[2, 2, 2]);
        let m = x.unfold(0).unwrap();
        let expected =
            Matrix::from_rows(&[&[1.0, 5.0, 3.0, 7.0], &[2.0, 6.0, 4.0, 8.0]]).unwrap();
        assert_eq!(m, expected);
        assert_eq!(DenseTensor::fold(&expected, 0, x.shape()).unwrap(), x);
    }

    #[test]
    fn mode2_unfolding_of_matrix_is_transpose() {
        // 2x3 matrix [[1,3,5],[2,4,6]] in column-major storage
        let x = seq_tensor(&[2, 3]);
        let m0 = x.unfold(0).unwrap();
        assert_eq!(x.unfold(1).unwrap(), m0.transpose());
    }

    #[test]
    fn order_one_unfolding_is_column() {
        let x = seq_tensor(&[4]);
        let m = x.unfold(0).unwrap();
        assert_eq!((m.rows(), m.cols()), (4, 1));
        assert_eq!(m.as_slice(), x.as_slice());
    }

    #[test]
    fn fold_scalar() {
        let m = Matrix::from_col_major(1, 1, vec![2.5]).unwrap();
        let s = Shape::new(vec![1, 1]).unwrap();
        let x = DenseTensor::fold(&m, 0, &s).unwrap();
        assert_eq!(x.as_slice(), &[2.5]);
    }

    #[test]
    fn unfold_errors() {
        let x = seq_tensor(&[2, 3]);
        assert!(matches!(x.unfold(2), Err(Error::ModeOutOfRange { .. })));
        let m = Matrix::<f64>::zeros(3, 3);
        assert!(DenseTensor::fold(&m, 0, x.shape()).is_err());
    }

    #[test]
    fn unfold_matches_brute_force_column_order() {
        let x = seq_tensor(&[2, 3, 4, 2]);
        for mode in 0..4 {
            let m = x.unfold(mode).unwrap();
            for lin in 0..x.len() {
                let idx = x.shape().multi_index(lin);
                let mut col = 0;
                for (j, (&i, &d)) in idx.iter().zip(x.dims()).enumerate() {
                    if j != mode {
                        col = col * d + i;
                    }
                }
                assert_eq!(m[(idx[mode], col)], x.as_slice()[lin]);
            }
        }
    }

    #[test]
    fn mode_multiply_reduces_to_matrix_product() {
        let x = seq_tensor(&[2, 2]);
        let a = Matrix::from_rows(&[&[0.0, 1.0], &[2.0, -1.0]]).unwrap();
        let y = x.mode_multiply(&a, 0).unwrap();
        let direct = a.matmul(&x.unfold(0).unwrap()).unwrap();
        assert_eq!(y.as_slice(), direct.as_slice());
        let id = Matrix::identity(2);
        assert_eq!(x.mode_multiply(&id, 1).unwrap(), x);
        assert!(x.mode_multiply(&Matrix::zeros(2, 3), 0).is_err());
    }

    #[test]
    fn norms() {
        let ones = DenseTensor::filled(Shape::new(vec![2, 2, 2]).unwrap(), 1.0);
        assert!((ones.fro_norm() - 8f64.sqrt()).abs() < 1e-15);
        let m = DenseTensor::from_vec(Shape::new(vec![2, 2]).unwrap(), vec![1.0, 0.0, -2.0, 3.0])
            .unwrap();
        assert_eq!(m.l1_norm(), 6.0);
        let z = DenseTensor::zeros(m.shape().clone());
        assert_eq!(m.inner(&z).unwrap(), 0.0);
        assert!(m.inner(&ones).is_err());
    }

    #[test]
    fn from_vec_rejects_nan() {
        let s = Shape::new(vec![2]).unwrap();
        assert!(matches!(
            DenseTensor::from_vec(s, vec![1.0, f64::NAN]),
            Err(Error::NonFinite(_))
        ));
    }
}
