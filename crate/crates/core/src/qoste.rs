//! Energy-optimal transfer drive and the Bloch-sphere geometry that bounds it.
//!
//! In the frame co-moving with the drift propagator `U0(t)` the cheapest drive
//! is a constant rotation carrying `|e_i⟩` along the great circle to
//! `U0†(t_f)|e_f⟩`. Its cost is `G̃²/(8ω_i t_f)`, with `G̃` the great-circle
//! angle between the two points.

// f64 math when std is not linked; shadowed by the inherent methods otherwise
#[allow(unused_imports)]
use num_traits::Float;

use alloc::vec::Vec;

use num_complex::Complex64;

use crate::cd::{cd_drive_general, energy_cost, ControlWaveform};
use crate::error::{Error, Result};
use crate::propagation::{propagate_u, TimeGrid};
use crate::protocol::{boundaries, eval_h0, BoundaryData, Protocol};
use crate::qubit::{eig2, expi, BlochVector, Mat2, StateVector};

/// Targets closer than this to the antipode of `|e_i⟩` (measured on `1 + zf`)
/// have no unique geodesic.
pub const ANTIPODAL_EPS: f64 = 1e-9;

/// Below `1 − zf` of this size `arccos(zf)/√(1 − zf²)` is evaluated by its series.
const POLE_SERIES_BELOW: f64 = 1e-6;

/// Absolute tolerance of the verdicts in [`ChainReport`].
pub const CHAIN_TOL: f64 = 1e-6;

/// Analytic minimum-energy drive.
#[derive(Debug, Clone, PartialEq)]
pub struct QosteSolution {
    /// Rotation coefficient; the rotating-frame drive is `ω_i(−Im r·σx⁽ⁱ⁾ + Re r·σy⁽ⁱ⁾)`.
    pub r: Complex64,
    pub xf: f64,
    pub yf: f64,
    pub zf: f64,
    /// `G̃ = arccos(zf)`.
    pub geodesic_len: f64,
    /// `G̃²/(8ω_i t_f)`.
    pub cost: f64,
    pub waveform: ControlWaveform,
}

/// Lengths entering the cost inequality chain, in radians.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct PathGeometry {
    /// Length of the adiabatic path of the instantaneous excited state.
    pub l: f64,
    /// Same path seen in the frame of the drift propagator.
    pub l_tilde: f64,
    /// Rotating-frame geodesic from `|e_i⟩` to the target.
    pub g_tilde: f64,
}

/// Numbers of the chain `C[V_CD] ≥ L²/8ω_i t_f = L̃²/8ω_i t_f ≥ G̃²/8ω_i t_f = C[V_QOSTE]`.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct ChainReport {
    pub c_cd: f64,
    pub l_bound: f64,
    pub l_tilde_bound: f64,
    pub g_bound: f64,
    pub c_qoste: f64,
    pub geometry: PathGeometry,
    pub omega_i: f64,
    pub t_f: f64,
    pub tolerance: f64,
    pub cd_above_l: bool,
    pub l_equals_l_tilde: bool,
    pub l_tilde_above_g: bool,
    pub g_equals_qoste: bool,
    pub chain_holds: bool,
}

#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct RatioPoint {
    pub t_f: f64,
    pub n_steps: usize,
    pub c_cd: f64,
    pub c_qoste: f64,
    pub ratio: f64,
}

/// Least-squares fit of `ln(C[V_CD]/C[V_QOSTE])` against `ln t_f`.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct SlopeEstimate {
    pub slope: f64,
    pub intercept: f64,
    pub points: Vec<RatioPoint>,
}

/// Bloch coordinates of `φ` in the basis `{|e⟩, |g⟩}`.
pub fn bloch_in_basis(phi: &StateVector, e: &StateVector, g: &StateVector) -> BlochVector {
    let alpha = e.inner(phi);
    let beta = g.inner(phi);
    let ab = alpha.conj() * beta;
    BlochVector::new(2.0 * ab.re, 2.0 * ab.im, alpha.norm_sqr() - beta.norm_sqr())
}

fn rotating_target(bd: &BoundaryData, u_f: &Mat2) -> BlochVector {
    let phi = u_f.adjoint().apply(&bd.e_f);
    let b = bloch_in_basis(&phi, &bd.e_i, &bd.g_i);
    let n = b.norm();
    BlochVector::new(b.x / n, b.y / n, b.z / n)
}

/// `(xf, yf, zf)`: Bloch coordinates of `U0†(t_f)|e_f⟩` in the `{|e_i⟩, |g_i⟩}` basis.
pub fn final_bloch(p: &Protocol, grid: &TimeGrid) -> Result<BlochVector> {
    let bd = boundaries(p)?;
    let path = propagate_u(|t| p.eval_unchecked(t), grid);
    Ok(rotating_target(&bd, path.last()))
}

/// Great-circle angle from the pole to `b`.
fn polar_angle(b: &BlochVector) -> f64 {
    b.x.hypot(b.y).atan2(b.z)
}

/// `arccos(z)/√(1 − z²)` on the unit sphere, continued analytically to the pole.
fn geodesic_gain(b: &BlochVector) -> f64 {
    let rho2 = b.x * b.x + b.y * b.y;
    // 1 − z without cancellation
    let u = rho2 / (1.0 + b.z);
    if u < POLE_SERIES_BELOW {
        1.0 + u / 3.0 + 2.0 * u * u / 15.0
    } else {
        polar_angle(b) / rho2.sqrt()
    }
}

/// Analytic minimum-energy drive for `p` sampled on `grid`.
pub fn qoste_solution(p: &Protocol, grid: &TimeGrid) -> Result<QosteSolution> {
    let bd = boundaries(p)?;
    let dt = grid.dt();
    let n = grid.n_steps();

    // drift propagator at every step midpoint, plus U0(t_f)
    let mut mids = Vec::with_capacity(n);
    let mut u = Mat2::IDENTITY;
    for k in 0..n {
        let t = grid.t(k);
        mids.push(expi(&p.eval_unchecked(t + 0.25 * dt), 0.5 * dt) * u);
        u = expi(&p.eval_unchecked(grid.t_mid(k)), dt) * u;
    }

    let target = rotating_target(&bd, &u);
    if target.z <= -1.0 + ANTIPODAL_EPS {
        return Err(Error::AntipodalTarget {
            zf: target.z,
            t_f: grid.t_f(),
        });
    }
    let geodesic_len = polar_angle(&target);
    let scale = geodesic_gain(&target) / (2.0 * bd.omega_i * grid.t_f());
    let r = Complex64::new(target.x * scale, target.y * scale);

    let e_g = Mat2::outer(&bd.e_i, &bd.g_i);
    let g_e = Mat2::outer(&bd.g_i, &bd.e_i);
    let sx = e_g + g_e;
    let sy = (g_e - e_g).scale(Complex64::new(0.0, 1.0));
    let rot = sx.scale((-r.im).into()) + sy.scale(r.re.into());
    let v = mids
        .iter()
        .map(|um| (*um * rot * um.adjoint()).decompose().vector())
        .collect();
    let waveform = ControlWaveform::new(*grid, v, bd.omega_i)?;

    Ok(QosteSolution {
        r,
        xf: target.x,
        yf: target.y,
        zf: target.z,
        geodesic_len,
        cost: geodesic_len * geodesic_len / (8.0 * bd.omega_i * grid.t_f()),
        waveform,
    })
}

/// `L`, `L̃` and `G̃` on `grid`, with path lengths summed as great-circle angles
/// between consecutive nodes.
pub fn path_geometry(p: &Protocol, grid: &TimeGrid) -> Result<PathGeometry> {
    let bd = boundaries(p)?;
    let path = propagate_u(|t| p.eval_unchecked(t), grid);
    let mut l = 0.0;
    let mut l_tilde = 0.0;
    let mut prev: Option<(BlochVector, BlochVector)> = None;
    let mut anchor = StateVector::UP;
    for (k, u) in path.unitaries.iter().enumerate() {
        let frame = eig2(&eval_h0(p, grid.t(k))?, Some(&anchor))?;
        anchor = frame.v_plus;
        let lab = frame.v_plus.bloch_unchecked();
        let rotating = u.adjoint().apply(&frame.v_plus).bloch_unchecked();
        if let Some((pl, pr)) = prev {
            l += pl.angle_to(&lab);
            l_tilde += pr.angle_to(&rotating);
        }
        prev = Some((lab, rotating));
    }
    let g_tilde = polar_angle(&rotating_target(&bd, path.last()));
    Ok(PathGeometry { l, l_tilde, g_tilde })
}

/// Evaluates every member of the energy-cost chain on `grid`.
pub fn cost_chain_check(p: &Protocol, grid: &TimeGrid) -> Result<ChainReport> {
    let bd = boundaries(p)?;
    let geometry = path_geometry(p, grid)?;
    let c_cd = energy_cost(&cd_drive_general(p, grid)?);
    let c_qoste = energy_cost(&qoste_solution(p, grid)?.waveform);
    let denom = 8.0 * bd.omega_i * grid.t_f();
    let l_bound = geometry.l * geometry.l / denom;
    let l_tilde_bound = geometry.l_tilde * geometry.l_tilde / denom;
    let g_bound = geometry.g_tilde * geometry.g_tilde / denom;
    let tol = CHAIN_TOL;
    let cd_above_l = c_cd >= l_bound - tol;
    let l_equals_l_tilde = (l_bound - l_tilde_bound).abs() <= tol;
    let l_tilde_above_g = l_tilde_bound >= g_bound - tol;
    let g_equals_qoste = (g_bound - c_qoste).abs() <= tol;
    Ok(ChainReport {
        c_cd,
        l_bound,
        l_tilde_bound,
        g_bound,
        c_qoste,
        geometry,
        omega_i: bd.omega_i,
        t_f: grid.t_f(),
        tolerance: tol,
        cd_above_l,
        l_equals_l_tilde,
        l_tilde_above_g,
        g_equals_qoste,
        chain_holds: cd_above_l && l_equals_l_tilde && l_tilde_above_g && g_equals_qoste,
    })
}

/// Resolution policy for [`ratio_scaling`]: `max(min_steps, ⌈steps_per_time·t_f⌉)`.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct ScalingResolution {
    pub steps_per_time: f64,
    pub min_steps: usize,
}

impl Default for ScalingResolution {
    fn default() -> Self {
        Self {
            steps_per_time: 4000.0,
            min_steps: 10_000,
        }
    }
}

impl ScalingResolution {
    pub fn grid(&self, t_f: f64) -> Result<TimeGrid> {
        let n = (self.steps_per_time * t_f).ceil();
        let n = if n.is_finite() && n > 0.0 { n as usize } else { 0 };
        TimeGrid::new(t_f, n.max(self.min_steps))
    }
}

/// Cost ratio `C[V_CD]/C[V_QOSTE]` over a family of durations and its log-log slope.
pub fn ratio_scaling(
    family: impl Fn(f64) -> Result<Protocol>,
    tf_list: &[f64],
    resolution: &ScalingResolution,
) -> Result<SlopeEstimate> {
    if tf_list.len() < 2 {
        return Err(Error::InvalidInput("need at least two durations"));
    }
    if tf_list.windows(2).any(|w| !(w[1] > w[0])) {
        return Err(Error::InvalidInput("durations must be increasing"));
    }
    let mut points = Vec::with_capacity(tf_list.len());
    for &t_f in tf_list {
        let p = family(t_f)?;
        let grid = resolution.grid(t_f)?;
        let c_cd = energy_cost(&cd_drive_general(&p, &grid)?);
        let c_qoste = qoste_solution(&p, &grid)?.cost;
        if !(c_qoste > 0.0) {
            return Err(Error::InvalidInput("optimal cost vanished; ratio undefined"));
        }
        points.push(RatioPoint {
            t_f,
            n_steps: grid.n_steps(),
            c_cd,
            c_qoste,
            ratio: c_cd / c_qoste,
        });
    }
    let xs: Vec<f64> = points.iter().map(|p| p.t_f.ln()).collect();
    let ys: Vec<f64> = points.iter().map(|p| p.ratio.ln()).collect();
    let (slope, intercept) = least_squares(&xs, &ys);
    Ok(SlopeEstimate {
        slope,
        intercept,
        points,
    })
}

fn least_squares(xs: &[f64], ys: &[f64]) -> (f64, f64) {
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = xs.iter().map(|x| (x - mx) * (x - mx)).sum();
    let slope = sxy / sxx;
    (slope, my - slope * mx)
}
