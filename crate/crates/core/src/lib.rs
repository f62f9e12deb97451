//! Low-complexity subshifts, their topological full groups as finite
//! cocycle tables, and random-walk entropy experiments on those groups.

pub mod cli;
pub mod error;
pub mod fullgroup;
pub mod io;
pub mod points;
pub mod randwalk;
pub mod schreier;
pub mod symbolic;

pub use error::{Error, Result};
