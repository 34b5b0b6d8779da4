//! Motional physics of a two-ion crystal in a linear Paul trap, and what its
//! heating rates say about spontaneous wave-function collapse.
//!
//! The library models a light atomic ion (the coolant / readout ion) trapped
//! together with a heavy charged molecule. It computes:
//!
//! - single-ion Mathieu stability and secular frequencies ([`trap`]),
//! - the coupled axial/radial normal modes of the two-ion crystal ([`modes`]),
//! - heating rates induced by a mass-proportional collapse noise field,
//!   both for point masses and for an extended molecular mass distribution
//!   ([`csl`]),
//! - heating from fluctuating electric fields, for comparison ([`noise`]),
//! - sideband-readout feasibility ([`readout`]),
//! - parameter scans and exclusion bounds on the collapse parameters
//!   ([`scan`], [`csl`]).
//!
//! All internal quantities are SI; angular frequencies are rad/s. Public
//! constructors accept lab-friendly units (amu, elementary charges, mm, Hz)
//! and convert on the way in.

pub mod config;
pub mod constants;
pub mod csl;
pub mod modes;
pub mod noise;
pub mod readout;
pub mod scan;
pub mod species;
pub mod trap;

mod error;

pub use error::PhysicsError;
