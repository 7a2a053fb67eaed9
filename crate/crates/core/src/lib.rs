pub mod bigfloat;
pub mod error;

pub use error::{Error, Result};
pub mod mat2;
pub mod radical;
pub mod circle;
pub mod jet;
pub mod scalar;
pub mod cocycle;
pub mod matrix;
pub mod modular;
pub mod par;
pub mod linalg;
pub mod transfer;
pub mod fourier;
pub mod poisson;
pub mod verify;
pub mod report;
pub mod cache;
