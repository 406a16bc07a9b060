pub mod config;
pub mod decompose;
pub mod error;
pub mod eval;
pub mod json;
pub mod lattice;
pub mod sparse;
pub mod tiling;
pub mod laurent;
pub mod vector;

pub use config::{add_views, ConfigView, FiberSum, PeriodicConfig, PeriodicFiber, Region, Verdict, WindowConfig};
pub use decompose::{Bounds, Component, Decomposition, DifferenceProduct};
pub use error::{Error, Result};
pub use eval::{Eval, Evaluator};
pub use lattice::{CosetSystem, IntLattice, SubspaceBasis};
pub use laurent::{LaurentPoly, LineDescriptor};
pub use vector::IntVector;
