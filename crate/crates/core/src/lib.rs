pub mod coeff;
pub mod error;
pub mod exprparse;
pub mod fracops;
pub mod kernels;
pub mod linalg;
pub mod mms;
pub mod quad;
pub mod solver1d;
pub mod solver2d;
pub mod special;

pub use error::{Error, Result};
