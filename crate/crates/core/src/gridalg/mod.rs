//! Exact algebra of finite unions of grids c(ℤ^d + 𝒘)M over a real number
//! field: commensurability classes, presentations, the rational subspaces
//! 𝔏(S), L_j^ψ and L_j, admissibility, and torus component data.

pub mod grid;
mod lattice;
pub mod matrix;
pub mod presentation;
pub mod subspace;
pub mod torus;

use thiserror::Error;

use crate::exactfield::FieldError;

pub use grid::{commensurable, CommensurabilityWitness, Grid, Member};
pub use presentation::{
    canonical_presentation, make_admissible, Admissibility, ClassData, GridJson, Mark,
    NumberJson, Presentation, PresentationJson,
};
pub use presentation::standard_lattice;
pub use subspace::{frak_l, in_subspace_mod_lattice, RationalSubspace};
pub use torus::{torus_data, TorusComponentSet, TorusMode, DEFAULT_ORBIT_CAP};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum GridError {
    #[error(transparent)]
    Field(#[from] FieldError),
    #[error("dimension mismatch: expected {expected}, got {got}")]
    Dimension { expected: usize, got: usize },
    #[error("grid scale must be positive")]
    NonPositiveScale,
    #[error("grid matrix must have determinant 1")]
    DeterminantNotOne,
    #[error("grids are not commensurable")]
    NotCommensurable,
    #[error("matrix is singular")]
    Singular,
    #[error("empty grid collection")]
    Empty,
    #[error("class or member index out of range")]
    IndexOutOfRange,
    #[error("component orbit too large (cap {cap})")]
    OrbitTooLarge { cap: usize },
    #[error("base point is not in the marked grid")]
    NotInGrid,
    #[error("presentation is not admissible at mark {0}")]
    NotAdmissible(Mark),
    #[error("unsupported dimension {0}")]
    UnsupportedDimension(usize),
}
