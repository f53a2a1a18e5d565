//! Analysis of noisy quantum channels on finite-dimensional systems.
//!
//! Given an input state `ρ` and a channel in operator-sum form, the library
//! computes the entanglement fidelity, the entropy exchange and the coherent
//! information, evaluates the quantum Fano and data-processing inequalities,
//! and decides whether the channel can be perfectly corrected on `ρ`. When it
//! can, [`correction::construct_corrector`] returns an explicit recovery
//! channel.
//!
//! ```
//! use qchannel::channels::{zoo, StandardChannel};
//! use qchannel::info::report;
//! use qchannel::states::DensityOperator;
//!
//! let rho = DensityOperator::maximally_mixed(2).unwrap();
//! let ch = zoo(&StandardChannel::Dephasing(0.25)).unwrap();
//! let r = report(&rho, &ch).unwrap();
//! assert!((r.entanglement_fidelity - 0.75).abs() < 1e-12);
//! ```

pub mod channels;
pub mod cli;
pub mod correction;
pub mod error;
pub mod info;
pub mod io;
pub mod linalg;
pub mod random;
pub mod states;

pub use channels::{KrausChannel, UnitaryDilation};
pub use error::{Error, Result};
pub use states::{DensityOperator, PureState};
