//! Neighborhood growth dynamics on the two-dimensional Hamming plane.
//!
//! A point of the quadrant joins the occupied set when the pair formed by the
//! number of occupied points on its row and on its column falls outside a
//! fixed Young diagram, the *zero-set*. This crate provides:
//!
//! * [`young`]: zero-sets as Young diagrams and their perturbations;
//! * [`growth`]: the plain and enhanced growth transformation, fixpoints and
//!   spanning checks;
//! * [`extremal`]: exact smallest spanning sets (plain and thin) with the
//!   known lower and upper bounds;
//! * [`rate`]: the energy–entropy functional, the large-deviation rate of the
//!   spanning probability, its closed forms and its support;
//! * [`euclid`]: continuous zero-sets, discretization and limit diagnostics;
//! * [`randmc`]: Monte Carlo estimation of spanning probabilities and random
//!   Young diagram samplers.
//!
//! All rate arithmetic is done in exact rationals ([`Q`]).

pub mod error;
pub mod euclid;
pub mod extremal;
pub mod flow;
pub mod growth;
pub mod randmc;
pub mod rate;
pub mod rational;
pub mod young;

pub use error::{Error, Result};
pub use extremal::{GammaResult, SearchBudget};
pub use growth::{Enhancement, PointSet};
pub use rate::{RateQuery, RateResult};
pub use rational::Q;
pub use young::{Cell, YoungDiagram};
