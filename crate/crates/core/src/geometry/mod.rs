//! Polytopes spanned by positively dependent generators and the regular simplex.

mod simplex;
mod zonotope;

pub use simplex::{
    cayley_menger_vd, delta_closed, delta_recursive, simplex_vertices, vd_cayley_menger, vd_closed,
    vd_edge_det, zonotope_volume_f64, SimplexFamily, VdReport,
};
pub use zonotope::{greedy_reorder, RationalPoint, Reordering, TilingReport, Zonotope};

use thiserror::Error;

use crate::lattice::LatticeVector;
use crate::support::{SupportClass, SupportError};

#[derive(Debug, Error, PartialEq, Eq)]
pub enum GeometryError {
    #[error(transparent)]
    Support(#[from] SupportError),
    #[error("generators must be positively dependent, got {0:?}")]
    NotPositivelyDependent(SupportClass),
    #[error("greedy reordering stuck at step {step} with partial sum {sum}")]
    StuckStep { step: usize, sum: LatticeVector },
    #[error("coordinate overflow")]
    Overflow,
}
