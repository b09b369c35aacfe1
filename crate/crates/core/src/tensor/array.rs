use super::{DenseTensor, Shape};
use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// Stack of same-shape tensors, treated as one vector in the solvers.
///
/// Linear operators act component-wise. [`sum_components`](Self::sum_components)
/// is the summation operator and [`replicate`](Self::replicate) its adjoint.
#[derive(Clone, Debug, PartialEq)]
pub struct TensorArray<T> {
    shape: Shape,
    components: Vec<DenseTensor<T>>,
}

impl<T: Scalar> TensorArray<T> {
    pub fn new(components: Vec<DenseTensor<T>>) -> Result<Self> {
        let first = components
            .first()
            .ok_or_else(|| Error::InvalidShape("a tensor array needs at least one component".into()))?;
        let shape = first.shape().clone();
        for c in &components[1..] {
            first.check_same_shape(c)?;
        }
        Ok(Self { shape, components })
    }

    pub fn zeros(shape: Shape, count: usize) -> Result<Self> {
        Self::new((0..count).map(|_| DenseTensor::zeros(shape.clone())).collect())
    }

    /// `n` copies of `x`.
    pub fn replicate(x: &DenseTensor<T>, n: usize) -> Result<Self> {
        Self::new(vec![x.clone(); n])
    }

    /// `Σ_i X_i`.
    pub fn sum_components(&self) -> DenseTensor<T> {
        sum_of(&self.components)
    }

    /// Shape shared by the components.
    pub fn component_shape(&self) -> &Shape {
        &self.shape
    }

    pub fn len(&self) -> usize {
        self.components.len()
    }

    pub fn is_empty(&self) -> bool {
        self.components.is_empty()
    }

    pub fn components(&self) -> &[DenseTensor<T>] {
        &self.components
    }

    pub fn get(&self, i: usize) -> Option<&DenseTensor<T>> {
        self.components.get(i)
    }

    pub fn into_components(self) -> Vec<DenseTensor<T>> {
        self.components
    }

    pub fn iter(&self) -> std::slice::Iter<'_, DenseTensor<T>> {
        self.components.iter()
    }

    /// Inner product over the stacked vector.
    pub fn inner(&self, other: &Self) -> Result<T> {
        if self.len() != other.len() {
            return Err(Error::DimensionMismatch(format!(
                "arrays of {} and {} components",
                self.len(),
                other.len()
            )));
        }
        let mut acc = T::zero();
        for (a, b) in self.components.iter().zip(&other.components) {
            acc += a.inner(b)?;
        }
        Ok(acc)
    }

    pub fn fro_norm(&self) -> T {
        stacked_norm(self.components.iter())
    }

    /// Entrywise mean of the components.
    pub fn mean(&self) -> DenseTensor<T> {
        let n = T::from_usize_lossy(self.len());
        self.sum_components().scale(T::one() / n)
    }
}

impl<'a, T> IntoIterator for &'a TensorArray<T> {
    type Item = &'a DenseTensor<T>;
    type IntoIter = std::slice::Iter<'a, DenseTensor<T>>;
    fn into_iter(self) -> Self::IntoIter {
        self.components.iter()
    }
}

pub(crate) fn sum_of<T: Scalar>(xs: &[DenseTensor<T>]) -> DenseTensor<T> {
    let mut acc = xs[0].clone();
    for x in &xs[1..] {
        acc.add_scaled(T::one(), x).expect("components share a shape");
    }
    acc
}

/// Frobenius norm of a stack of tensors.
pub(crate) fn stacked_norm<'a, T: Scalar>(xs: impl Iterator<Item = &'a DenseTensor<T>>) -> T {
    let mut ss = T::zero();
    for x in xs {
        let n = x.fro_norm();
        ss += n * n;
    }
    ss.sqrt()
}
