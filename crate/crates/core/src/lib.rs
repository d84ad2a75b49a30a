//! Exactly solvable one-dimensional Schrödinger problems built from
//! constant-coefficient Riccati equations and shape-invariant
//! factorizations, together with a finite-difference oracle that checks
//! every closed form.

pub mod basis;
pub mod error;
pub mod families;
pub mod numerics;
pub mod partners;
pub mod riccati;
pub mod spectra;
pub mod taylor;
pub mod verify;

pub use basis::Jet;
pub use error::{DivergentEnd, Error, Result};
pub use families::{Family, FamilyDescriptor, FamilyKind, FamilyParams, FreeConstants, Preset};
pub use numerics::{Grid, GridFunction};
pub use partners::{PotentialPair, Superpotential};
pub use riccati::{ExtendedReal, SignClass};
pub use spectra::{ChainDirection, SpectralChain, WaveFunction};
