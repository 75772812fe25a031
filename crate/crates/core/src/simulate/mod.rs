//! Trajectories of the triangular arrays and of their frozen-`u` companions.
//!
//! All randomness is read from a [`NoiseReservoir`] by index, so two
//! simulations that address the same variates are coupled exactly.

mod affine;
mod coupling;
mod finite;
mod inar;
mod path;
mod reservoir;
mod walk;

pub use affine::{
    contraction_moment, simulate_affine, AffineDraw, AffineModel, AffineSimulator, ContractionCheck,
};
pub use coupling::{inar_coupled_gap, CoupledGap, GapEstimator};
pub use finite::{simulate_finite, FiniteSimulator};
pub use inar::{poisson_inverse, simulate_inar, simulate_stationary_inar, InarModel};
pub use path::PathSample;
pub use reservoir::{spine_index, NoiseReservoir, VariateRow, SPINE};
pub use walk::{simulate_random_walk, WalkModel};
