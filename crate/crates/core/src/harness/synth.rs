use rand::Rng;
use rand_distr::StandardNormal;

use super::rng::stream;
use crate::error::{Error, Result};
use crate::prox::{thin_qr, thin_svd};
use crate::scalar::Scalar;
use crate::tensor::{DenseTensor, Matrix, ObservationMask, Shape};

const MAX_ATTEMPTS: usize = 10;

/// Ground-truth size and Tucker rank.
#[derive(Clone, Debug, PartialEq)]
pub struct SynthSpec {
    pub dims: Shape,
    pub ranks: Vec<usize>,
    pub seed: u64,
}

impl SynthSpec {
    pub fn new(dims: &[usize], ranks: &[usize], seed: u64) -> Result<Self> {
        let dims = Shape::new(dims.to_vec())?;
        if ranks.len() != dims.order() {
            return Err(Error::param(format!(
                "{} ranks for an order-{} tensor",
                ranks.len(),
                dims.order()
            )));
        }
        for (mode, (&r, &d)) in ranks.iter().zip(dims.dims()).enumerate() {
            if r == 0 || r > d {
                return Err(Error::RankOutOfRange { mode, rank: r, limit: d });
            }
        }
        Ok(Self { dims, ranks: ranks.to_vec(), seed })
    }
}

/// Fraction, magnitude and seed of the additive gross corruption.
#[derive(Clone, Debug, PartialEq)]
pub struct CorruptionSpec {
    pub rho_n: f64,
    pub magnitude: f64,
    pub seed: u64,
}

fn check_fraction(name: &str, v: f64) -> Result<()> {
    if (0.0..=1.0).contains(&v) {
        Ok(())
    } else {
        Err(Error::param(format!("{name} = {v} is not a fraction in [0, 1]")))
    }
}

fn gaussian_matrix<R: Rng, T: Scalar>(rng: &mut R, rows: usize, cols: usize) -> Matrix<T> {
    let data = (0..rows * cols)
        .map(|_| T::lit(rng.sample::<f64, _>(StandardNormal)))
        .collect();
    Matrix::from_col_major(rows, cols, data).expect("positive dims")
}

/// Random tensor of exactly the requested Tucker rank: a standard normal core
/// multiplied in every mode by a Haar-distributed orthonormal frame (QR of a
/// Gaussian matrix with the `R` diagonal made nonnegative). Redraws on the
/// measure-zero event that some unfolding loses rank.
pub fn gen_low_rank<T: Scalar>(spec: &SynthSpec) -> Result<DenseTensor<T>> {
    let dims = spec.dims.dims();
    let coords: Vec<u64> = dims.iter().chain(&spec.ranks).map(|&v| v as u64).collect();
    let mut rng = stream(spec.seed, "gen", &coords);
    let core_shape = Shape::new(spec.ranks.clone())?;
    for _ in 0..MAX_ATTEMPTS {
        let data = (0..core_shape.len())
            .map(|_| T::lit(rng.sample::<f64, _>(StandardNormal)))
            .collect();
        let mut x = DenseTensor::from_vec(core_shape.clone(), data)?;
        for (mode, (&d, &r)) in dims.iter().zip(&spec.ranks).enumerate() {
            let (q, _) = thin_qr(&gaussian_matrix::<_, T>(&mut rng, d, r))?;
            x = x.mode_multiply(&q, mode)?;
        }
        if has_ranks(&x, &spec.ranks)? {
            return Ok(x);
        }
    }
    Err(Error::GenerationFailed(MAX_ATTEMPTS))
}

fn has_ranks<T: Scalar>(x: &DenseTensor<T>, ranks: &[usize]) -> Result<bool> {
    for (mode, &r) in ranks.iter().enumerate() {
        if thin_svd(&x.unfold(mode)?)?.rank(T::lit(1e-8)) != r {
            return Ok(false);
        }
    }
    Ok(true)
}

/// `round(fraction · n)`, halves rounded up.
fn rounded_count(fraction: f64, n: usize) -> usize {
    ((fraction * n as f64 + 0.5).floor() as usize).min(n)
}

/// First `k` entries of a partial Fisher–Yates shuffle of `pool`.
fn choose<R: Rng>(rng: &mut R, mut pool: Vec<usize>, k: usize) -> Vec<usize> {
    let n = pool.len();
    for i in 0..k {
        let j = rng.random_range(i..n);
        pool.swap(i, j);
    }
    pool.truncate(k);
    pool
}

/// Adds i.i.d. `U(−M, M)` noise to a uniformly random `round(ρ_n·len)`
/// subset of entries. Returns `(B, E₀)` with `B = X + E₀`.
pub fn corrupt<T: Scalar>(
    x: &DenseTensor<T>,
    spec: &CorruptionSpec,
) -> Result<(DenseTensor<T>, DenseTensor<T>)> {
    corrupt_among(x, spec, (0..x.len()).collect())
}

/// [`corrupt`] with the support drawn from the observed entries only; the
/// count is `round(ρ_n·|Ω|)`.
pub fn corrupt_within<T: Scalar>(
    x: &DenseTensor<T>,
    spec: &CorruptionSpec,
    mask: &ObservationMask,
) -> Result<(DenseTensor<T>, DenseTensor<T>)> {
    if mask.shape() != x.shape() {
        return Err(Error::ShapeMismatch {
            expected: x.dims().to_vec(),
            found: mask.shape().dims().to_vec(),
        });
    }
    corrupt_among(x, spec, mask.indices().to_vec())
}

fn corrupt_among<T: Scalar>(
    x: &DenseTensor<T>,
    spec: &CorruptionSpec,
    pool: Vec<usize>,
) -> Result<(DenseTensor<T>, DenseTensor<T>)> {
    check_fraction("rho_n", spec.rho_n)?;
    let m = spec.magnitude;
    if !(m > 0.0 && m.is_finite()) {
        return Err(Error::param(format!("corruption magnitude {m} must be positive")));
    }
    let mut rng = stream(spec.seed, "corrupt", &[spec.rho_n.to_bits(), m.to_bits()]);
    let k = rounded_count(spec.rho_n, pool.len());
    let support = choose(&mut rng, pool, k);
    let mut e0 = DenseTensor::zeros(x.shape().clone());
    let dst = e0.as_mut_slice();
    for &i in &support {
        let v = loop {
            let v: f64 = rng.random_range(-m..m);
            if v != -m {
                break v;
            }
        };
        dst[i] = T::lit(v);
    }
    Ok((x.add(&e0)?, e0))
}

/// Uniformly random observation set of `round(ρ_o·len)` entries.
pub fn sample_mask(shape: &Shape, rho_o: f64, seed: u64) -> Result<ObservationMask> {
    check_fraction("rho_o", rho_o)?;
    let mut rng = stream(seed, "mask", &[rho_o.to_bits()]);
    let k = rounded_count(rho_o, shape.len());
    let mut idx = choose(&mut rng, (0..shape.len()).collect(), k);
    idx.sort_unstable();
    ObservationMask::new(shape.clone(), idx)
}
