//! Geodesic center of a simple polygon with a metered workspace of O(s)
//! words. The input polygon is read-only; every word of working memory the
//! solver keeps is charged to a [`workspace::Meter`].
//!
//! Entry point: [`center::geodesic_center`].
//!
//! ```
//! use geocenter::center::{geodesic_center, CenterConfig};
//! use geocenter::polygon::Polygon;
//! use geocenter::workspace::{BudgetPolicy, WorkspaceBudget};
//! use geocenter::Point;
//!
//! # fn main() -> geocenter::Result<()> {
//! let poly = Polygon::new(vec![
//!     Point::new(0.0, 0.0), Point::new(2.0, 0.0), Point::new(2.0, 1.0),
//!     Point::new(1.0, 1.0), Point::new(1.0, 2.0), Point::new(0.0, 2.0),
//! ])?;
//! let cfg = CenterConfig {
//!     budget: WorkspaceBudget::new(16, BudgetPolicy::Enforce),
//!     ..CenterConfig::for_polygon(&poly)
//! };
//! let r = geodesic_center(&poly, &cfg)?;
//! assert!((r.radius - 2f64.sqrt()).abs() < 1e-9);
//! # Ok(())
//! # }
//! ```

pub mod center;
pub mod chord_center;
pub mod error;
pub mod gen;
pub mod geom;
pub mod oracle;
pub mod polygon;
pub mod prune;
pub mod spt;
pub mod workspace;

pub use error::{Error, GeomError, Result};
pub use geom::{CircleConstraint, DirectedLine, HalfPlane, Point, Rotation, Segment, Side};
