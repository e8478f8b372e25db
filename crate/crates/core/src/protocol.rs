//! Uncontrolled protocols `H0(t)` and their boundary eigenframes.

// f64 math when std is not linked; shadowed by the inherent methods otherwise
#[allow(unused_imports)]
use num_traits::Float;

use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::qubit::{eig2, PauliCoeffs, StateVector};

/// Linear Landau-Zener sweep `H0(t) = Δ(t)σz + ωσx`, `Δ(t) = Δ0 + Δd·t/t_f`.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct LandauZener {
    pub delta0: f64,
    pub delta_d: f64,
    pub omega: f64,
    pub t_f: f64,
}

impl LandauZener {
    pub fn detuning(&self, t: f64) -> f64 {
        self.delta0 + self.delta_d * t / self.t_f
    }

    /// `dΔ/dt`, constant for the linear sweep.
    pub fn detuning_rate(&self) -> f64 {
        self.delta_d / self.t_f
    }
}

/// Pauli coefficients sampled at strictly increasing times, linearly interpolated.
#[derive(Debug, Clone, PartialEq)]
pub struct Tabulated {
    times: Vec<f64>,
    coeffs: Vec<PauliCoeffs>,
}

impl Tabulated {
    /// Validates `times[0] == 0`, strict monotonicity and finiteness.
    pub fn new(times: Vec<f64>, coeffs: Vec<PauliCoeffs>) -> Result<Self> {
        if times.len() != coeffs.len() {
            return Err(Error::InvalidTable {
                row: times.len().min(coeffs.len()),
                reason: "length mismatch",
            });
        }
        if times.len() < 2 {
            return Err(Error::InvalidTable {
                row: 0,
                reason: "need at least two samples",
            });
        }
        if times[0] != 0.0 {
            return Err(Error::InvalidTable {
                row: 0,
                reason: "first time must be 0",
            });
        }
        for (row, (t, c)) in times.iter().zip(&coeffs).enumerate() {
            if !t.is_finite() || !c.is_finite() {
                return Err(Error::InvalidTable {
                    row,
                    reason: "non-finite value",
                });
            }
            if row > 0 && *t <= times[row - 1] {
                return Err(Error::InvalidTable {
                    row,
                    reason: "times must be strictly increasing",
                });
            }
        }
        Ok(Self { times, coeffs })
    }

    /// Samples `f` at `n_samples` uniform times on `[0, t_f]`.
    pub fn sample(t_f: f64, n_samples: usize, f: impl Fn(f64) -> PauliCoeffs) -> Result<Self> {
        if !(t_f > 0.0) || !t_f.is_finite() {
            return Err(Error::InvalidDuration(t_f));
        }
        let n = n_samples.max(2);
        let times: Vec<f64> = (0..n)
            .map(|k| {
                if k == n - 1 {
                    t_f
                } else {
                    t_f * k as f64 / (n - 1) as f64
                }
            })
            .collect();
        let coeffs = times.iter().map(|&t| f(t)).collect();
        Self::new(times, coeffs)
    }

    pub fn times(&self) -> &[f64] {
        &self.times
    }

    pub fn coeffs(&self) -> &[PauliCoeffs] {
        &self.coeffs
    }

    pub fn t_f(&self) -> f64 {
        *self.times.last().expect("validated nonempty")
    }

    fn interpolate(&self, t: f64) -> PauliCoeffs {
        let idx = self.times.partition_point(|&s| s <= t);
        if idx == 0 {
            return self.coeffs[0];
        }
        if idx >= self.times.len() {
            return *self.coeffs.last().expect("validated nonempty");
        }
        let (t0, t1) = (self.times[idx - 1], self.times[idx]);
        let w = (t - t0) / (t1 - t0);
        let (a, b) = (self.coeffs[idx - 1], self.coeffs[idx]);
        a + (b - a).scale(w)
    }
}

/// The drift Hamiltonian of a transfer, from `H_i = H0(0)` to `H_f = H0(t_f)`.
#[derive(Debug, Clone, PartialEq)]
pub enum Protocol {
    LandauZener(LandauZener),
    Tabulated(Tabulated),
}

impl Protocol {
    pub fn t_f(&self) -> f64 {
        match self {
            Protocol::LandauZener(lz) => lz.t_f,
            Protocol::Tabulated(tab) => tab.t_f(),
        }
    }

    /// A time-independent protocol, stored as a two-row table.
    pub fn constant(c: PauliCoeffs, t_f: f64) -> Result<Self> {
        if !(t_f > 0.0) || !t_f.is_finite() {
            return Err(Error::InvalidDuration(t_f));
        }
        Tabulated::new(alloc::vec![0.0, t_f], alloc::vec![c, c]).map(Protocol::Tabulated)
    }

    pub fn as_landau_zener(&self) -> Result<&LandauZener> {
        match self {
            Protocol::LandauZener(lz) => Ok(lz),
            Protocol::Tabulated(_) => Err(Error::WrongProtocolKind),
        }
    }

    /// Evaluation without the range check; `t` is clamped for tables.
    pub(crate) fn eval_unchecked(&self, t: f64) -> PauliCoeffs {
        match self {
            Protocol::LandauZener(lz) => PauliCoeffs::new(0.0, lz.omega, 0.0, lz.detuning(t)),
            Protocol::Tabulated(tab) => tab.interpolate(t),
        }
    }
}

/// Linear Landau-Zener protocol.
pub fn lz_protocol(delta0: f64, delta_d: f64, omega: f64, t_f: f64) -> Result<Protocol> {
    if !(t_f > 0.0) || !t_f.is_finite() {
        return Err(Error::InvalidDuration(t_f));
    }
    if omega == 0.0 {
        return Err(Error::ZeroCoupling);
    }
    if !(delta0.is_finite() && delta_d.is_finite() && omega.is_finite()) {
        return Err(Error::InvalidInput("non-finite Landau-Zener parameter"));
    }
    Ok(Protocol::LandauZener(LandauZener {
        delta0,
        delta_d,
        omega,
        t_f,
    }))
}

/// `H0(t)` for `t ∈ [0, t_f]`.
pub fn eval_h0(p: &Protocol, t: f64) -> Result<PauliCoeffs> {
    let t_f = p.t_f();
    let slack = 1e-12 * t_f;
    if !(t >= -slack && t <= t_f + slack) {
        return Err(Error::OutOfRange { t, t_f });
    }
    Ok(p.eval_unchecked(t.clamp(0.0, t_f)))
}

/// Initial and final eigenbases of a protocol.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BoundaryData {
    pub omega_i: f64,
    pub omega_f: f64,
    pub e_i: StateVector,
    pub g_i: StateVector,
    pub e_f: StateVector,
    pub g_f: StateVector,
    /// Mixing angles of the Landau-Zener eigenbases; `None` for other protocols.
    pub theta_i: Option<f64>,
    pub theta_f: Option<f64>,
}

/// Mixing angle with `|e⟩ = cos(θ/2)|1⟩ + sin(θ/2)|0⟩` for `H = Δσz + ωσx`.
///
/// Equals `arctan(ω/Δ) + (π/2)(1 − sign Δ)` for `ω > 0`, `Δ ≠ 0`, and stays
/// continuous through `Δ = 0`.
pub fn mixing_angle(delta: f64, omega: f64) -> f64 {
    omega.atan2(delta)
}

/// Splittings and eigenvectors of `H0(0)` and `H0(t_f)`.
pub fn boundaries(p: &Protocol) -> Result<BoundaryData> {
    let start = eig2(&eval_h0(p, 0.0)?, None)?;
    let end = eig2(&eval_h0(p, p.t_f())?, None)?;
    let (theta_i, theta_f) = match p {
        Protocol::LandauZener(lz) => {
            let ti = mixing_angle(lz.detuning(0.0), lz.omega);
            let tf = mixing_angle(lz.detuning(lz.t_f), lz.omega);
            for (theta, e) in [(ti, start.v_plus), (tf, end.v_plus)] {
                let want = StateVector::from_real((theta / 2.0).cos(), (theta / 2.0).sin());
                debug_assert!(
                    want.sub(&e).norm_sqr().sqrt() < 1e-10,
                    "mixing angle disagrees with eig2"
                );
            }
            (Some(ti), Some(tf))
        }
        Protocol::Tabulated(_) => (None, None),
    };
    Ok(BoundaryData {
        omega_i: start.half_gap(),
        omega_f: end.half_gap(),
        e_i: start.v_plus,
        g_i: start.v_minus,
        e_f: end.v_plus,
        g_f: end.v_minus,
        theta_i,
        theta_f,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use core::f64::consts::PI;

    fn lz() -> Protocol {
        lz_protocol(-10.0, 20.0, 1.0, 1.0).unwrap()
    }

    #[test]
    fn lz_midpoint_and_endpoints() {
        let p = lz();
        let mid = eval_h0(&p, 0.5).unwrap();
        assert_eq!(mid.cz, 0.0);
        assert_eq!(mid.cx, 1.0);
        assert_eq!(eval_h0(&p, 0.0).unwrap(), PauliCoeffs::new(0.0, 1.0, 0.0, -10.0));
        assert_eq!(eval_h0(&p, 1.0).unwrap(), PauliCoeffs::new(0.0, 1.0, 0.0, 10.0));
    }

    #[test]
    fn lz_static_sweep_is_constant() {
        let p = lz_protocol(3.0, 0.0, 0.5, 2.0).unwrap();
        let c0 = eval_h0(&p, 0.0).unwrap();
        for k in 0..=10 {
            assert_eq!(eval_h0(&p, 0.2 * k as f64).unwrap(), c0);
        }
    }

    #[test]
    fn lz_rejects_bad_parameters() {
        assert_eq!(lz_protocol(1.0, 1.0, 0.0, 1.0), Err(Error::ZeroCoupling));
        assert!(matches!(
            lz_protocol(1.0, 1.0, 1.0, 0.0),
            Err(Error::InvalidDuration(_))
        ));
    }

    #[test]
    fn eval_out_of_range() {
        let p = lz();
        assert!(matches!(eval_h0(&p, -0.1), Err(Error::OutOfRange { .. })));
        assert!(matches!(eval_h0(&p, 1.1), Err(Error::OutOfRange { .. })));
        assert!(eval_h0(&p, 1.0 + 1e-14).is_ok());
    }

    #[test]
    fn tabulated_matches_lz_off_grid() {
        let lz = lz();
        let tab = Protocol::Tabulated(Tabulated::sample(1.0, 10_000, |t| lz.eval_unchecked(t)).unwrap());
        for k in 0..997 {
            let t = (k as f64 + 0.37) / 997.0;
            let d = eval_h0(&tab, t).unwrap().max_abs_diff(&eval_h0(&lz, t).unwrap());
            assert!(d < 1e-6, "t={t}: {d}");
        }
    }

    #[test]
    fn tabulated_validation() {
        let c = PauliCoeffs::ZERO;
        assert!(matches!(
            Tabulated::new(alloc::vec![0.1, 1.0], alloc::vec![c, c]),
            Err(Error::InvalidTable { row: 0, .. })
        ));
        assert!(matches!(
            Tabulated::new(alloc::vec![0.0, 0.5, 0.5], alloc::vec![c, c, c]),
            Err(Error::InvalidTable { row: 2, .. })
        ));
        assert!(matches!(
            Tabulated::new(alloc::vec![0.0], alloc::vec![c]),
            Err(Error::InvalidTable { .. })
        ));
    }

    #[test]
    fn reference_lz_boundaries() {
        let b = boundaries(&lz()).unwrap();
        assert!((b.omega_i - 101f64.sqrt()).abs() < 1e-12);
        assert!((b.omega_f - 101f64.sqrt()).abs() < 1e-12);
        let theta_i = b.theta_i.unwrap();
        assert!((theta_i - ((1.0f64 / -10.0).atan() + PI)).abs() < 1e-14);
        let theta_f = b.theta_f.unwrap();
        assert!((theta_f - (1.0f64 / 10.0).atan()).abs() < 1e-14);
        for (e, g, th) in [(b.e_i, b.g_i, theta_i), (b.e_f, b.g_f, theta_f)] {
            assert!(e.inner(&g).norm() < 1e-12);
            let want = StateVector::from_real((th / 2.0).cos(), (th / 2.0).sin());
            assert!(want.sub(&e).norm_sqr().sqrt() < 1e-10);
            let want_g = StateVector::from_real(-(th / 2.0).sin(), (th / 2.0).cos());
            assert!(want_g.sub(&g).norm_sqr().sqrt() < 1e-10);
        }
    }

    #[test]
    fn diagonal_limits_of_mixing_angle() {
        let b = boundaries(&lz_protocol(5.0, 1.0, 1e-9, 1.0).unwrap()).unwrap();
        assert!(b.theta_i.unwrap().abs() < 1e-8);
        assert!((b.e_i.inner(&StateVector::UP).norm() - 1.0).abs() < 1e-12);
        let b = boundaries(&lz_protocol(-5.0, 1.0, 1e-9, 1.0).unwrap()).unwrap();
        assert!((b.theta_i.unwrap() - PI).abs() < 1e-8);
        assert!((b.e_i.inner(&StateVector::DOWN).norm() - 1.0).abs() < 1e-12);
    }
}
