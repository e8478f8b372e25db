//! Energy-optimal shortcuts for driven qubit protocols.
//!
//! Given a drift protocol `H0(t)` that connects the eigenbasis of `H_i` to the
//! eigenbasis of `H_f`, this crate builds three controls that realize the
//! same eigenstate transfer in finite time:
//!
//! * the counterdiabatic drive ([`cd`]), which pins the state to the
//!   instantaneous eigenstate at all times;
//! * the minimum-energy drive ([`qoste`]), a constant rotation along the
//!   rotating-frame geodesic;
//! * robust controls at a prescribed energy, found by ensemble GRAPE ([`grape`]).
//!
//! ```
//! use qoste_core::{cd_drive_general, energy_cost, lz_protocol, qoste_solution, TimeGrid};
//!
//! let p = lz_protocol(-10.0, 20.0, 1.0, 1.0).unwrap();
//! let grid = TimeGrid::new(1.0, 10_000).unwrap();
//! let c_cd = energy_cost(&cd_drive_general(&p, &grid).unwrap());
//! let c_min = qoste_solution(&p, &grid).unwrap().cost;
//! assert!(c_min < c_cd);
//! ```
//!
//! The crate is `no_std` and only needs `alloc`.

#![no_std]
#![allow(clippy::neg_cmp_op_on_partial_ord)]

extern crate alloc;

pub mod cd;
pub mod error;
pub mod grape;
pub mod propagation;
pub mod protocol;
pub mod qoste;
pub mod quad;
pub mod qubit;

pub use cd::{cd_cost_lz, cd_drive_general, cd_drive_lz, energy_cost, ControlWaveform};
pub use error::{Error, Result};
pub use grape::{
    avg_fidelity, eta_scan, grad_avg_fidelity, make_ensemble, make_ensemble_with, n_eta_sensitivity, optimize,
    project_energy, tradeoff_sweep, EnsembleFidelity, EtaLayout, FrontierPoint, GrapeOptions, RobustControl,
    RobustnessEnsemble,
};
pub use propagation::{fidelity, propagate_state, propagate_u, TimeGrid, Trajectory, UnitaryPath};
pub use protocol::{boundaries, eval_h0, lz_protocol, BoundaryData, LandauZener, Protocol, Tabulated};
pub use qoste::{
    cost_chain_check, final_bloch, path_geometry, qoste_solution, ratio_scaling, ChainReport, PathGeometry,
    QosteSolution, RatioPoint, ScalingResolution, SlopeEstimate,
};
pub use qubit::{bloch_of, compose, eig2, expi, BlochVector, EigenFrame, Mat2, PauliCoeffs, StateVector};
