//! Proximal maps and projections used by every solver.

mod ops;
mod svd;

pub use ops::{
    nuclear_norm, rank_project, rank_project_mode, shrink, shrink_in_place, shrink_scalar,
    spectral_norm, svt, svt_mode, svt_mode_with_norm, svt_with_norm,
};
pub use svd::{thin_qr, thin_svd, Svd};
