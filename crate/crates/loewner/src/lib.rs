//! A numerical laboratory for Loewner theory on the unit disc and unit ball.
//!
//! The crate integrates Herglotz vector fields into evolution families,
//! builds finite-horizon Loewner chains and verifies their defining
//! identities, classifies the biholomorphism type of the union of chain
//! images via Kobayashi-metric limits, lifts disc chains to the ball through
//! the Roper-Suffridge extension, and certifies spiral- and star-shapedness
//! of locally univalent maps.
//!
//! Layout:
//! - [`geometry`]: domains, the Kobayashi metric/distance, ball automorphisms
//! - [`fields`]: Herglotz vector fields and their admissibility checks
//! - [`flow`]: the initial-value problem for evolution families, with the
//!   variational equation for Jacobians
//! - [`chains`]: finite-horizon Loewner chains, the backward PDE check,
//!   winding-number membership, Newton inversion
//! - [`range`]: the metric limit beta and range classification
//! - [`operators`]: the Roper-Suffridge extension and origin normalization
//! - [`shapes`]: spiral/star-shapedness certification
//! - [`spec_io`]: the JSON envelope for field specifications

pub mod chains;
pub mod error;
pub mod fields;
pub mod flow;
pub mod geometry;
pub mod linalg;
pub mod operators;
pub mod range;
pub mod shapes;
pub mod spec_io;

pub use error::{Error, Result};
