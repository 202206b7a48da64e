pub mod bisector;
pub mod cli;
pub mod distinct;
pub mod error;
pub mod geom;
pub mod hypergraph;
pub mod norm;
pub mod oracle;
pub mod progression;
pub mod ring;
pub mod search;
pub mod svg;

pub use error::{Error, Result};
pub use geom::{Segment, Vec2, Window, DEFAULT_EPS};
pub use norm::{FacetData, Norm, NormSpec, PolygonalNorm};
