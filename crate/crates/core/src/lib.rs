//! Triply graded Khovanov homology of link diagrams on surfaces with boundary,
//! and the Kauffman bracket expansion it categorifies.

pub mod chainmaps;
pub mod diagram;
pub mod error;
pub mod homology;
pub mod matrix;
pub mod morse;
pub mod skein;
pub mod state_complex;
pub mod surface;
pub mod verify;

pub use chainmaps::{ChainMap, CheckReport, SkeinTriple, SparseMap};
pub use diagram::{Circle, Diagram, Edge, Endpoint, Lineage, Marker, R1Side, R2Site, R3Site, Smoothing, Strand};
pub use error::{ChainMapError, DiagramError, HomologyError, SkeinError, SurfaceError};
pub use surface::{reduce_cyclic, Catalogue, CurveClass, CurveKind, CurveWord, GradingS, Letter, SurfaceModel};
pub use homology::{homology, table_isomorphic, AbelianGroup, Coefficients, HomologyTable};
pub use matrix::Matrix;
pub use skein::{kauffman_bracket, phi_expand, BasisElement, BracketExpansion, LaurentPolyA, QCoefficients};
pub use state_complex::{Block, EnhancedState, GradedComplex, SignRule, StateSpace};
