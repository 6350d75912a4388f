pub mod cli;
pub mod coadjoint;
pub mod coherent;
pub mod error;
pub mod lorentz;
pub mod measures;
pub mod orbits;
pub mod quad1d;
pub mod uir;
pub mod verify;

pub use error::{Error, Result};
