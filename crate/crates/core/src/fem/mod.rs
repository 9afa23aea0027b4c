//! Finite element building blocks: quadrature, reference elements, degree of
//! freedom maps and the mapping of basis functions to physical cells.

mod eval;
pub mod quadrature;
pub mod reference;
mod space;

pub use eval::{physical_gradient, physical_laplacian, CellBasis, Tabulation};
pub use quadrature::{make_quadrature, QuadratureRule};
pub use reference::{BasisEval, NodeKind, ReferenceElement};
pub use space::{DofMap, Discretization, PairKind, ScalarDofMap, SpacePair, SystemLayout};
