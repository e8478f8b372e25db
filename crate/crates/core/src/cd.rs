//! Counterdiabatic driving and the energy cost of control waveforms.

// f64 math when std is not linked; shadowed by the inherent methods otherwise
#[allow(unused_imports)]
use num_traits::Float;

use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::propagation::TimeGrid;
use crate::protocol::{boundaries, eval_h0, Protocol};
use crate::quad;
use crate::qubit::{cross3, norm3, PauliCoeffs};

/// Piecewise-constant control `V(t) = ω_i·v⃗(t)·σ⃗`.
///
/// `v[k]` acts on `[t_k, t_{k+1})`.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct ControlWaveform {
    pub grid: TimeGrid,
    pub v: Vec<[f64; 3]>,
    pub omega_i: f64,
}

impl ControlWaveform {
    pub fn new(grid: TimeGrid, v: Vec<[f64; 3]>, omega_i: f64) -> Result<Self> {
        if v.len() != grid.n_steps() {
            return Err(Error::GridMismatch {
                expected: grid.n_steps(),
                found: v.len(),
            });
        }
        if !(omega_i > 0.0) || !omega_i.is_finite() {
            return Err(Error::InvalidInput("omega_i must be positive"));
        }
        Ok(Self { grid, v, omega_i })
    }

    pub fn zero(grid: TimeGrid, omega_i: f64) -> Self {
        Self {
            grid,
            v: alloc::vec![[0.0; 3]; grid.n_steps()],
            omega_i,
        }
    }

    pub fn scaled(&self, s: f64) -> Self {
        let v = self.v.iter().map(|u| [s * u[0], s * u[1], s * u[2]]).collect();
        Self { v, ..self.clone() }
    }

    /// Control Hamiltonian on step `k` with amplitude error `η`.
    pub fn coeffs(&self, k: usize, eta: f64) -> PauliCoeffs {
        let s = (1.0 + eta) * self.omega_i;
        let u = self.v[k];
        PauliCoeffs::new(0.0, s * u[0], s * u[1], s * u[2])
    }

    /// `Σ_k |v⃗_k|²`.
    pub fn sum_sq(&self) -> f64 {
        self.v.iter().map(|u| u[0] * u[0] + u[1] * u[1] + u[2] * u[2]).sum()
    }

    pub fn is_zero(&self) -> bool {
        self.v.iter().all(|u| *u == [0.0; 3])
    }
}

/// `C = (ω_i/2)·Σ_k |v⃗_k|²·dt`, i.e. `(1/4ω_i)∫‖V‖²_F dt`.
pub fn energy_cost(w: &ControlWaveform) -> f64 {
    0.5 * w.omega_i * w.sum_sq() * w.grid.dt()
}

/// Counterdiabatic drive for an arbitrary qubit protocol.
///
/// For `H0 = c0·I + h⃗·σ⃗` the drive is `(h⃗ × ḣ⃗)·σ⃗ / (2|h⃗|²)`. It is sampled at
/// step midpoints, with `ḣ⃗` the central difference of the two adjacent nodes.
pub fn cd_drive_general(p: &Protocol, grid: &TimeGrid) -> Result<ControlWaveform> {
    let omega_i = boundaries(p)?.omega_i;
    let dt = grid.dt();
    let gap_floor = |c: &PauliCoeffs| 1e-14 * c.c0.abs().max(1.0);
    let mut left = eval_h0(p, 0.0)?;
    let mut v = Vec::with_capacity(grid.n_steps());
    for k in 0..grid.n_steps() {
        let right = eval_h0(p, grid.t(k + 1))?;
        let mid = eval_h0(p, grid.t_mid(k))?;
        for c in [&mid, &right] {
            let r = c.norm();
            if !(r > gap_floor(c)) {
                return Err(Error::DegenerateHamiltonian { splitting: r });
            }
        }
        let h = mid.vector();
        let hr = right.vector();
        let hl = left.vector();
        let hdot = [(hr[0] - hl[0]) / dt, (hr[1] - hl[1]) / dt, (hr[2] - hl[2]) / dt];
        let x = cross3(h, hdot);
        let s = 1.0 / (2.0 * norm3(h).powi(2) * omega_i);
        v.push([x[0] * s, x[1] * s, x[2] * s]);
        left = right;
    }
    ControlWaveform::new(*grid, v, omega_i)
}

/// Closed-form Landau-Zener drive `−Δ̇ω/(2(Δ² + ω²))·σy` sampled at step midpoints.
pub fn cd_drive_lz(p: &Protocol, grid: &TimeGrid) -> Result<ControlWaveform> {
    let lz = p.as_landau_zener()?;
    let omega_i = boundaries(p)?.omega_i;
    let rate = lz.detuning_rate();
    let w = lz.omega;
    let v = (0..grid.n_steps())
        .map(|k| {
            let d = lz.detuning(grid.t_mid(k));
            [0.0, -rate * w / (2.0 * (d * d + w * w)) / omega_i, 0.0]
        })
        .collect();
    ControlWaveform::new(*grid, v, omega_i)
}

/// `C[V_CD] = (1/2ω_i)∫ ω²Δ̇²/(4(Δ² + ω²)²) dt` by adaptive quadrature.
pub fn cd_cost_lz(p: &Protocol) -> Result<f64> {
    let lz = *p.as_landau_zener()?;
    let omega_i = boundaries(p)?.omega_i;
    let rate = lz.detuning_rate();
    if rate == 0.0 {
        return Ok(0.0);
    }
    let w2 = lz.omega * lz.omega;
    let integrand = |t: f64| {
        let d = lz.detuning(t);
        let den = d * d + w2;
        w2 * rate * rate / (4.0 * den * den)
    };
    Ok(quad::integrate(integrand, 0.0, lz.t_f, 1e-11) / (2.0 * omega_i))
}
