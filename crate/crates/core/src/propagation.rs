//! Time-ordered propagation on a uniform grid.
//!
//! Every step applies the exact exponential of the Hamiltonian sampled at the
//! step midpoint, which is unitary to rounding and second-order accurate.

use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::qubit::{expi, BlochVector, Mat2, PauliCoeffs, StateVector};

/// Default resolution for protocols with `ω·t_f = O(1)`.
pub const DEFAULT_STEPS: usize = 10_000;

/// Uniform partition of `[0, t_f]` into `n_steps` intervals.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct TimeGrid {
    t_f: f64,
    n_steps: usize,
}

impl TimeGrid {
    pub fn new(t_f: f64, n_steps: usize) -> Result<Self> {
        if !(t_f > 0.0) || !t_f.is_finite() {
            return Err(Error::InvalidDuration(t_f));
        }
        if n_steps == 0 {
            return Err(Error::InvalidInput("grid needs at least one step"));
        }
        Ok(Self { t_f, n_steps })
    }

    pub fn t_f(&self) -> f64 {
        self.t_f
    }

    pub fn n_steps(&self) -> usize {
        self.n_steps
    }

    pub fn dt(&self) -> f64 {
        self.t_f / self.n_steps as f64
    }

    /// Node `t_k`, exact at both ends.
    pub fn t(&self, k: usize) -> f64 {
        if k == self.n_steps {
            self.t_f
        } else {
            self.t_f * k as f64 / self.n_steps as f64
        }
    }

    /// Midpoint of step `k`.
    pub fn t_mid(&self, k: usize) -> f64 {
        self.t_f * (k as f64 + 0.5) / self.n_steps as f64
    }

    pub fn nodes(&self) -> impl Iterator<Item = f64> + '_ {
        (0..=self.n_steps).map(|k| self.t(k))
    }
}

/// Propagators `U(t_k)` for every node, `U(0) = I`.
#[derive(Debug, Clone, PartialEq)]
pub struct UnitaryPath {
    pub grid: TimeGrid,
    pub unitaries: Vec<Mat2>,
}

impl UnitaryPath {
    pub fn last(&self) -> &Mat2 {
        self.unitaries.last().expect("path has n_steps + 1 entries")
    }
}

/// States `ψ(t_k)` for every node.
#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory {
    pub grid: TimeGrid,
    pub states: Vec<StateVector>,
}

impl Trajectory {
    pub fn bloch(&self) -> Vec<BlochVector> {
        self.states.iter().map(StateVector::bloch_unchecked).collect()
    }

    pub fn last(&self) -> &StateVector {
        self.states.last().expect("trajectory has n_steps + 1 entries")
    }
}

/// `U(t_{k+1}) = expi(h(t_k + dt/2), dt)·U(t_k)`.
pub fn propagate_u(h: impl Fn(f64) -> PauliCoeffs, grid: &TimeGrid) -> UnitaryPath {
    let dt = grid.dt();
    let mut unitaries = Vec::with_capacity(grid.n_steps() + 1);
    let mut u = Mat2::IDENTITY;
    unitaries.push(u);
    for k in 0..grid.n_steps() {
        u = expi(&h(grid.t_mid(k)), dt) * u;
        unitaries.push(u);
    }
    UnitaryPath { grid: *grid, unitaries }
}

/// Propagates `psi0` with the same rule as [`propagate_u`].
pub fn propagate_state(h: impl Fn(f64) -> PauliCoeffs, grid: &TimeGrid, psi0: &StateVector) -> Trajectory {
    propagate_state_steps(grid, psi0, |k| h(grid.t_mid(k)))
}

/// Like [`propagate_state`] but the Hamiltonian is looked up by step index.
pub fn propagate_state_steps(grid: &TimeGrid, psi0: &StateVector, h: impl Fn(usize) -> PauliCoeffs) -> Trajectory {
    let dt = grid.dt();
    let mut states = Vec::with_capacity(grid.n_steps() + 1);
    let mut psi = *psi0;
    states.push(psi);
    for k in 0..grid.n_steps() {
        psi = step(&psi, &h(k), dt);
        states.push(psi);
    }
    Trajectory { grid: *grid, states }
}

/// Final state only, without storing the trajectory.
pub fn final_state_steps(grid: &TimeGrid, psi0: &StateVector, h: impl Fn(usize) -> PauliCoeffs) -> StateVector {
    let dt = grid.dt();
    (0..grid.n_steps()).fold(*psi0, |psi, k| step(&psi, &h(k), dt))
}

fn step(psi: &StateVector, h: &PauliCoeffs, dt: f64) -> StateVector {
    let next = expi(h, dt).apply(psi);
    if (next.norm_sqr() - 1.0).abs() > 1e-12 {
        next.normalized()
    } else {
        next
    }
}

/// `|⟨a|b⟩|²`, clamped to `[0, 1]`.
pub fn fidelity(a: &StateVector, b: &StateVector) -> f64 {
    a.inner(b).norm_sqr().clamp(0.0, 1.0)
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_complex::Complex64;

    #[test]
    fn grid_validation() {
        assert!(TimeGrid::new(0.0, 10).is_err());
        assert!(TimeGrid::new(1.0, 0).is_err());
        let g = TimeGrid::new(2.0, 4).unwrap();
        assert_eq!(g.dt(), 0.5);
        assert_eq!(g.t(4), 2.0);
        assert_eq!(g.t_mid(0), 0.25);
    }

    #[test]
    fn constant_hamiltonian_matches_single_exponential() {
        let c = PauliCoeffs::new(0.2, 0.7, -1.1, 0.4);
        let grid = TimeGrid::new(1.3, 1000).unwrap();
        let path = propagate_u(|_| c, &grid);
        assert!((*path.last() - expi(&c, 1.3)).frobenius_norm() < 1e-10);
    }

    #[test]
    fn free_evolution_is_identity() {
        let grid = TimeGrid::new(1.0, 50).unwrap();
        let path = propagate_u(|_| PauliCoeffs::ZERO, &grid);
        assert_eq!(path.unitaries.len(), 51);
        assert!(path.unitaries.iter().all(|u| *u == Mat2::IDENTITY));
    }

    #[test]
    fn eigenstate_stays_put() {
        let grid = TimeGrid::new(3.0, 300).unwrap();
        let traj = propagate_state(|_| PauliCoeffs::new(0.0, 0.0, 0.0, 2.0), &grid, &StateVector::UP);
        assert!(traj.bloch().iter().all(|b| (b.z - 1.0).abs() < 1e-12));
    }

    #[test]
    fn fidelity_basics() {
        let a = StateVector::from_real(0.6, 0.8);
        assert!((fidelity(&a, &a) - 1.0).abs() < 1e-15);
        assert!(fidelity(&a, &a.orthogonal()) < 1e-30);
        for phi in [0.3, 1.7, -2.9] {
            let b = a.scale(Complex64::from_polar(1.0, phi));
            assert!((fidelity(&a, &b) - 1.0).abs() < 1e-15);
        }
    }
}
