//! Coherence quantifiers built on the α-affinity, least-square-measurement
//! state discrimination, and the coherence/path-distinguishability relation
//! for multi-slit interferometers.

pub mod coherence;
pub mod discrimination;
pub mod duality;
pub mod error;
pub mod io;
pub mod linalg;
pub mod states;
pub mod verify;

pub use coherence::{AlphaParam, BlochVector, CoherenceReport, MeasureKind};
pub use discrimination::{DiscriminationResult, Povm, Strategy};
pub use duality::{IncoherentChannel, Quanton, QuantonDetectorModel};
pub use error::{Error, Result};
pub use linalg::{ComplexMatrix, Spectrum};
pub use states::{DensityMatrix, IncoherentState, PureEnsemble};
