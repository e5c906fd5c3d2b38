//! Spectral periods of free-group representations into `SL(d, R)`.

pub mod cocycles;
pub mod error;
pub mod extended;
pub mod exterior;
pub mod functional;
pub mod representation;
pub mod scaled;
pub mod spectral;
pub mod statistics;
pub mod suites;
pub mod words;

pub use error::{Error, Result};
pub use functional::Functional;
pub use representation::{schottky_sl2, sym_power, ExteriorLift, GroupRep};
pub use scaled::ScaledMatrix;
pub use spectral::{ExteriorTower, ProximalityCert, SpectralRecord};
pub use words::{canonical_class, cyclic_reduce, free_reduce, Alphabet, CountMode, CyclicWord, Letter, Word};
