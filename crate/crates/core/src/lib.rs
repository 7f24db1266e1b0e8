//! Connected-hypergraph enumeration and giant-component statistics for the
//! random r-uniform hypergraph `H^r(n, p)`.

pub mod asymptotics;
pub mod cli;
pub mod crosscheck;
pub mod dd;
pub mod error;
pub mod exact;
pub mod forests;
pub mod logreal;
pub mod numeric;
pub mod params;
pub mod simulate;
pub mod verify;

pub use error::{Error, Result};
pub use logreal::LogReal;
pub use params::{EnumerationInstance, ModelParams, RhoProfile};
