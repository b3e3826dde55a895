//! Finite, checkable computations around geodesic ray bundles in relative
//! Cayley graphs: group arithmetic, balls and geodesic DAGs, slimness
//! estimates, truncated bundles and `Geo₁`, and the label coding built on
//! top of them.

pub mod bundles;
pub mod coding;
pub mod error;
pub mod geodesics;
pub mod groups;
pub mod hyperbolicity;
pub mod relgraph;
pub mod report;

pub use error::{Error, Result};
