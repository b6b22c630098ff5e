pub mod convalg;
pub mod error;
pub mod groupoid;
pub mod harness;
pub mod interp;
pub mod measure;
pub mod nclp;
pub mod numkit;
pub mod repmod;

pub use error::{Error, Result};
