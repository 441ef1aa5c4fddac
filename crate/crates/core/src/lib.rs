pub mod cutnorm;
pub mod distance;
pub mod error;
pub mod generate;
pub mod graph;
pub mod hom;
pub mod inversion;
pub mod linalg;
pub mod refine;
pub mod overlay;
pub mod suite;
pub mod transport;

pub use error::{Error, Result};
pub use graph::{Graph, Rational, WeightedGraph};
