pub mod certificate;
pub mod disk_oracle;
pub mod error;
pub mod fixtures;
pub mod homology;
pub mod normal;
pub mod perm;
pub mod sat;
pub mod subdivision;
pub mod triangulation;

pub use error::{Result, TopoError};
pub use perm::Perm4;
pub use subdivision::{barycentric_subdivide, knot_complement, BoundarySurface, KnotComplement, KnotSpec, Subdivision};
pub use triangulation::{validate_manifold, walk_edge, Classes, EdgeWalk, Gluing, ManifoldReport, Problem, TetComplex, Triangulation};
pub use homology::is_null_homologous;
