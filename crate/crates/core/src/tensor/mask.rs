use super::{DenseTensor, Shape};
use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// Set Ω of observed linear indices, with projection `A_Ω` and adjoint `A_Ω*`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ObservationMask {
    shape: Shape,
    indices: Vec<usize>,
}

impl ObservationMask {
    /// Indices must be strictly increasing and inside the shape.
    pub fn new(shape: Shape, indices: Vec<usize>) -> Result<Self> {
        if let Some(w) = indices.windows(2).find(|w| w[0] >= w[1]) {
            return Err(Error::Format(format!(
                "mask indices not strictly increasing at {} -> {}",
                w[0], w[1]
            )));
        }
        if let Some(&last) = indices.last() {
            if last >= shape.len() {
                return Err(Error::Format(format!(
                    "mask index {last} outside a tensor of {} elements",
                    shape.len()
                )));
            }
        }
        Ok(Self { shape, indices })
    }

    pub fn full(shape: Shape) -> Self {
        let indices = (0..shape.len()).collect();
        Self { shape, indices }
    }

    pub fn empty(shape: Shape) -> Self {
        Self { shape, indices: Vec::new() }
    }

    pub fn shape(&self) -> &Shape {
        &self.shape
    }

    pub fn indices(&self) -> &[usize] {
        &self.indices
    }

    /// Number of observed entries `m`.
    pub fn len(&self) -> usize {
        self.indices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.indices.is_empty()
    }

    pub fn is_full(&self) -> bool {
        self.indices.len() == self.shape.len()
    }

    /// Observed fraction `m / Π I_n`.
    pub fn fraction(&self) -> f64 {
        self.indices.len() as f64 / self.shape.len() as f64
    }

    fn check_shape<T: Scalar>(&self, x: &DenseTensor<T>) -> Result<()> {
        if x.shape() != &self.shape {
            return Err(Error::ShapeMismatch {
                expected: self.shape.dims().to_vec(),
                found: x.dims().to_vec(),
            });
        }
        Ok(())
    }

    /// `A_Ω(x)`: observed entries in index order.
    pub fn project<T: Scalar>(&self, x: &DenseTensor<T>) -> Result<Vec<T>> {
        self.check_shape(x)?;
        let src = x.as_slice();
        Ok(self.indices.iter().map(|&i| src[i]).collect())
    }

    /// `A_Ω*(v)`: zero tensor with `v` written at the observed positions.
    pub fn embed<T: Scalar>(&self, v: &[T]) -> Result<DenseTensor<T>> {
        if v.len() != self.indices.len() {
            return Err(Error::DimensionMismatch(format!(
                "{} values for a mask of {} entries",
                v.len(),
                self.indices.len()
            )));
        }
        let mut out = DenseTensor::zeros(self.shape.clone());
        let dst = out.as_mut_slice();
        for (&i, &val) in self.indices.iter().zip(v) {
            dst[i] = val;
        }
        Ok(out)
    }

    /// `A_Ω*A_Ω(x)`: zeroes every unobserved entry.
    pub fn restrict<T: Scalar>(&self, x: &DenseTensor<T>) -> Result<DenseTensor<T>> {
        let mut out = x.clone();
        self.restrict_in_place(&mut out)?;
        Ok(out)
    }

    pub fn restrict_in_place<T: Scalar>(&self, x: &mut DenseTensor<T>) -> Result<()> {
        self.check_shape(x)?;
        if self.is_full() {
            return Ok(());
        }
        let keep = self.indicator();
        for (v, &k) in x.as_mut_slice().iter_mut().zip(&keep) {
            if !k {
                *v = T::zero();
            }
        }
        Ok(())
    }

    /// Dense membership flags in storage order.
    pub fn indicator(&self) -> Vec<bool> {
        let mut flags = vec![false; self.shape.len()];
        for &i in &self.indices {
            flags[i] = true;
        }
        flags
    }
}
