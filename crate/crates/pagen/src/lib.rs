//! Generator and analysis toolkit for polynomial preferential-attachment
//! random graphs.
//!
//! The toolkit grows directed multigraphs in which every new vertex
//! attaches `m` edges whose targets mix three kinds of draws: both ends of
//! a uniformly chosen edge, the target end of a uniformly chosen edge, and
//! a uniformly chosen vertex. The mixture is described by a
//! [`model::WeightTable`]; the derived constants `A`, `B` and `D` determine
//! the degree-distribution exponent, the growth law of two-paths and the
//! limiting clustering coefficient, all of which can be evaluated in closed
//! form ([`theory`]) and measured on generated graphs ([`analytics`]).
//! Monte Carlo audits ([`audit`]) verify that a model instance satisfies
//! the defining one-step increment laws.
//!
//! ```
//! use pagen::generator::{generate, GenerationConfig};
//! use pagen::model::ThreeParamSpec;
//! use pagen::analytics;
//!
//! let table = ThreeParamSpec::new(2, 0.0, 0.4)?.to_table();
//! let cfg = GenerationConfig::new(2_000, table, 7);
//! let (graph, trace) = generate(&cfg)?;
//! assert_eq!(graph.vertex_count(), 2_000);
//! assert_eq!(graph.edge_count(), 4_000);
//!
//! let last = trace.rows.last().unwrap();
//! assert_eq!(last.triangles, analytics::count_triangles(&graph));
//! # Ok::<(), pagen::Error>(())
//! ```

pub mod analytics;
pub mod audit;
mod error;
pub mod generator;
pub mod graph;
pub mod model;
pub mod rng;
pub mod theory;

pub use error::{Error, Result};

#[cfg(doctest)]
mod book;
