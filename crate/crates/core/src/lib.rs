//! Agent-based model of cultural identities built from acceptance segments
//! on several worldviews, the attitudes they induce between agents, and the
//! contraction of acceptance margins under terrorist threat messages.
//!
//! - [`model`]: segments, identities and the attitude functions.
//! - [`threat`]: threat reactions and multi-message scenarios.
//! - [`synthesis`]: prototype-based populations, indicators and calibration.
//! - [`analysis`]: attitude matrices, change classes and margin conditions.
//! - [`config`], [`io`], [`cli`]: run configuration, file formats and the command line.

pub mod analysis;
pub mod cli;
pub mod config;
pub mod error;
pub mod io;
pub mod model;
pub mod pairwise;
pub mod population;
pub mod rng;
pub mod synthesis;
pub mod threat;

pub use error::{Error, Result};
