//! Robust pulse optimization at fixed control energy.
//!
//! Controls are distorted by a static amplitude error,
//! `H_η(t) = H0(t) + (1 + η)·ω_i·v⃗(t)·σ⃗`, and the figure of merit is the
//! fidelity to `|e_f⟩` averaged over a discrete set of `η`. The optimizer is a
//! projected gradient ascent: every trial point is rescaled back onto the
//! sphere of constant energy before it is evaluated.

// f64 math when std is not linked; shadowed by the inherent methods otherwise
#[allow(unused_imports)]
use num_traits::Float;

use alloc::vec::Vec;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::cd::{energy_cost, ControlWaveform};
use crate::error::{Error, Result};
use crate::propagation::{fidelity, final_state_steps, TimeGrid};
use crate::protocol::{boundaries, BoundaryData, Protocol};
use crate::qubit::{expi, expi_with_gradient, PauliCoeffs, StateVector};

/// Where the `N_η` sample points sit inside `[−ε, ε]`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "snake_case"))]
pub enum EtaLayout {
    /// Uniform grid including both endpoints.
    #[default]
    Endpoints,
    /// Centers of `N_η` equal cells partitioning the interval.
    CellCenters,
}

/// Discrete amplitude-error values, symmetric about zero.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct RobustnessEnsemble {
    pub epsilon: f64,
    pub layout: EtaLayout,
    pub etas: Vec<f64>,
}

impl RobustnessEnsemble {
    pub fn n_eta(&self) -> usize {
        self.etas.len()
    }
}

/// Uniform grid on `[−ε, ε]` including both endpoints and zero.
pub fn make_ensemble(epsilon: f64, n_eta: usize) -> Result<RobustnessEnsemble> {
    make_ensemble_with(epsilon, n_eta, EtaLayout::Endpoints)
}

pub fn make_ensemble_with(epsilon: f64, n_eta: usize, layout: EtaLayout) -> Result<RobustnessEnsemble> {
    if !(epsilon >= 0.0) || !epsilon.is_finite() {
        return Err(Error::InvalidEnsemble("epsilon must be finite and nonnegative"));
    }
    if n_eta == 0 {
        return Err(Error::InvalidEnsemble("n_eta must be at least 1"));
    }
    if n_eta.is_multiple_of(2) {
        return Err(Error::InvalidEnsemble(
            "n_eta must be odd so that the grid contains eta = 0",
        ));
    }
    if epsilon == 0.0 || n_eta == 1 {
        return Ok(RobustnessEnsemble {
            epsilon,
            layout,
            etas: alloc::vec![0.0],
        });
    }
    let n = n_eta as f64;
    let spacing = match layout {
        EtaLayout::Endpoints => n - 1.0,
        EtaLayout::CellCenters => n,
    };
    let etas = (0..n_eta)
        .map(|j| epsilon * (2.0 * j as f64 - (n - 1.0)) / spacing)
        .collect();
    Ok(RobustnessEnsemble { epsilon, layout, etas })
}

/// Mean fidelity and its per-`η` terms, in ensemble order.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct EnsembleFidelity {
    pub mean: f64,
    pub per_eta: Vec<f64>,
}

/// Drift sampled at the step midpoints of a grid, reused across evaluations.
struct Problem {
    bd: BoundaryData,
    drift: Vec<PauliCoeffs>,
}

impl Problem {
    fn new(p: &Protocol, grid: &TimeGrid) -> Result<Self> {
        let bd = boundaries(p)?;
        let drift = (0..grid.n_steps()).map(|k| p.eval_unchecked(grid.t_mid(k))).collect();
        Ok(Self { bd, drift })
    }

    fn final_state(&self, w: &ControlWaveform, eta: f64) -> StateVector {
        final_state_steps(&w.grid, &self.bd.e_i, |k| self.drift[k] + w.coeffs(k, eta))
    }

    fn avg_fidelity(&self, w: &ControlWaveform, ens: &RobustnessEnsemble) -> EnsembleFidelity {
        let per_eta: Vec<f64> = ens
            .etas
            .iter()
            .map(|&eta| fidelity(&self.bd.e_f, &self.final_state(w, eta)))
            .collect();
        let mean = per_eta.iter().sum::<f64>() / per_eta.len() as f64;
        EnsembleFidelity { mean, per_eta }
    }

    /// Fidelity for one `η` and its exact gradient, accumulated into `grad` with weight `weight`.
    fn accumulate_gradient(&self, w: &ControlWaveform, eta: f64, weight: f64, grad: &mut [[f64; 3]]) -> f64 {
        let dt = w.grid.dt();
        let n = w.grid.n_steps();
        let mut forward = Vec::with_capacity(n + 1);
        let mut psi = self.bd.e_i;
        forward.push(psi);
        for k in 0..n {
            psi = expi(&(self.drift[k] + w.coeffs(k, eta)), dt).apply(&psi);
            forward.push(psi);
        }
        let overlap = self.bd.e_f.inner(&psi);
        let chain = (1.0 + eta) * w.omega_i * weight;
        // costate ⟨λ_{k+1}| = ⟨e_f|U_{n-1}⋯U_{k+1}
        let mut costate = self.bd.e_f;
        for k in (0..n).rev() {
            let (u, du) = expi_with_gradient(&(self.drift[k] + w.coeffs(k, eta)), dt);
            for (axis, d) in du.iter().enumerate() {
                let dov: Complex64 = costate.inner(&d.apply(&forward[k]));
                grad[k][axis] += 2.0 * chain * (overlap.conj() * dov).re;
            }
            costate = u.adjoint().apply(&costate);
        }
        overlap.norm_sqr()
    }

    fn gradient(&self, w: &ControlWaveform, ens: &RobustnessEnsemble) -> (EnsembleFidelity, Vec<[f64; 3]>) {
        let mut grad = alloc::vec![[0.0; 3]; w.grid.n_steps()];
        let weight = 1.0 / ens.n_eta() as f64;
        let per_eta: Vec<f64> = ens
            .etas
            .iter()
            .map(|&eta| self.accumulate_gradient(w, eta, weight, &mut grad))
            .collect();
        let mean = per_eta.iter().sum::<f64>() / per_eta.len() as f64;
        (EnsembleFidelity { mean, per_eta }, grad)
    }
}

fn check_grid(w: &ControlWaveform, grid: &TimeGrid) -> Result<()> {
    if w.grid != *grid {
        return Err(Error::GridMismatch {
            expected: grid.n_steps(),
            found: w.grid.n_steps(),
        });
    }
    Ok(())
}

/// `F̄ = (1/N_η)·Σ_η |⟨e_f|ψ_η(t_f)⟩|²`, propagating from `|e_i⟩`.
pub fn avg_fidelity(
    w: &ControlWaveform,
    p: &Protocol,
    ens: &RobustnessEnsemble,
    grid: &TimeGrid,
) -> Result<EnsembleFidelity> {
    check_grid(w, grid)?;
    Ok(Problem::new(p, grid)?.avg_fidelity(w, ens))
}

/// `∂F̄/∂v_k(j)` for every step `j` and axis `k`, from one forward and one
/// backward sweep per `η`. Exact for piecewise-constant controls.
pub fn grad_avg_fidelity(
    w: &ControlWaveform,
    p: &Protocol,
    ens: &RobustnessEnsemble,
    grid: &TimeGrid,
) -> Result<(EnsembleFidelity, Vec<[f64; 3]>)> {
    check_grid(w, grid)?;
    Ok(Problem::new(p, grid)?.gradient(w, ens))
}

/// Removes the component of `grad` along `v`, leaving the part tangent to the
/// constant-energy sphere.
pub fn tangent_gradient(w: &ControlWaveform, grad: &[[f64; 3]]) -> Vec<[f64; 3]> {
    let vv = w.sum_sq();
    if vv == 0.0 {
        return grad.to_vec();
    }
    let gv: f64 = grad
        .iter()
        .zip(&w.v)
        .map(|(g, v)| g[0] * v[0] + g[1] * v[1] + g[2] * v[2])
        .sum();
    let s = gv / vv;
    grad.iter()
        .zip(&w.v)
        .map(|(g, v)| [g[0] - s * v[0], g[1] - s * v[1], g[2] - s * v[2]])
        .collect()
}

/// Uniform rescaling of `w` to energy cost `c_target`.
pub fn project_energy(w: &ControlWaveform, c_target: f64) -> Result<ControlWaveform> {
    if !(c_target >= 0.0) || !c_target.is_finite() {
        return Err(Error::InvalidInput("target cost must be finite and nonnegative"));
    }
    if c_target == 0.0 {
        return Ok(ControlWaveform::zero(w.grid, w.omega_i));
    }
    let cost = energy_cost(w);
    if cost == 0.0 {
        return Err(Error::ZeroWaveform);
    }
    Ok(w.scaled((c_target / cost).sqrt()))
}

/// Optimizer settings.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(default, deny_unknown_fields))]
pub struct GrapeOptions {
    pub max_iters: usize,
    /// Iterations improving `F̄` by less than this count toward `patience`.
    pub tol_f: f64,
    pub patience: usize,
    /// First trial step, relative to the waveform norm.
    pub initial_step: f64,
    /// Step multiplier after an accepted iteration.
    pub step_growth: f64,
    /// Upper bound on the relative step.
    pub max_step: f64,
    /// Backtracking halvings before giving up on an iteration.
    pub max_halvings: usize,
    pub seed: u64,
    /// Relative amplitude of seeded noise added to the initial waveform.
    pub init_noise: f64,
}

impl Default for GrapeOptions {
    fn default() -> Self {
        Self {
            max_iters: 2000,
            tol_f: 1e-10,
            patience: 20,
            initial_step: 0.05,
            step_growth: 1.5,
            max_step: 1.0,
            max_halvings: 30,
            seed: 0,
            init_noise: 0.0,
        }
    }
}

/// Outcome of [`optimize`].
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct RobustControl {
    pub waveform: ControlWaveform,
    pub cost: f64,
    pub avg_fidelity: f64,
    pub per_eta_fidelity: Vec<f64>,
    pub iterations: usize,
    pub converged: bool,
    /// `F̄` of the projected initial point followed by every accepted iterate.
    pub history: Vec<f64>,
}

/// Maximizes `F̄` over waveforms of energy `c_target`, starting from `init`.
pub fn optimize(
    p: &Protocol,
    ens: &RobustnessEnsemble,
    grid: &TimeGrid,
    c_target: f64,
    init: &ControlWaveform,
    opts: &GrapeOptions,
) -> Result<RobustControl> {
    check_grid(init, grid)?;
    let problem = Problem::new(p, grid)?;
    let mut start = init.clone();
    if opts.init_noise > 0.0 {
        add_noise(&mut start, opts.init_noise, opts.seed);
    }
    let mut w = project_energy(&start, c_target)?;
    let (mut current, mut grad) = problem.gradient(&w, ens);
    let mut history = alloc::vec![current.mean];

    if c_target == 0.0 {
        return Ok(finish(w, current, 0, true, history));
    }

    let mut step = opts.initial_step;
    let mut stalled = 0;
    let mut converged = false;
    let mut iterations = 0;
    while iterations < opts.max_iters {
        iterations += 1;
        let direction = tangent_gradient(&w, &grad);
        let dnorm = direction
            .iter()
            .map(|d| d[0] * d[0] + d[1] * d[1] + d[2] * d[2])
            .sum::<f64>()
            .sqrt();
        if !(dnorm > 0.0) {
            converged = true;
            break;
        }
        let scale = w.sum_sq().sqrt() / dnorm;
        let mut accepted = None;
        for _ in 0..=opts.max_halvings {
            let s = step * scale;
            let v =
                w.v.iter()
                    .zip(&direction)
                    .map(|(v, d)| [v[0] + s * d[0], v[1] + s * d[1], v[2] + s * d[2]])
                    .collect();
            let trial = project_energy(&ControlWaveform { v, ..w.clone() }, c_target)?;
            let f = problem.avg_fidelity(&trial, ens);
            if f.mean > current.mean {
                accepted = Some(trial);
                break;
            }
            step *= 0.5;
        }
        let Some(trial) = accepted else {
            converged = true;
            break;
        };
        let previous = current.mean;
        w = trial;
        (current, grad) = problem.gradient(&w, ens);
        history.push(current.mean);
        step = (step * opts.step_growth).min(opts.max_step);
        if current.mean - previous < opts.tol_f {
            stalled += 1;
            if stalled >= opts.patience {
                converged = true;
                break;
            }
        } else {
            stalled = 0;
        }
    }
    Ok(finish(w, current, iterations, converged, history))
}

fn finish(
    waveform: ControlWaveform,
    f: EnsembleFidelity,
    iterations: usize,
    converged: bool,
    history: Vec<f64>,
) -> RobustControl {
    RobustControl {
        cost: energy_cost(&waveform),
        waveform,
        avg_fidelity: f.mean,
        per_eta_fidelity: f.per_eta,
        iterations,
        converged,
        history,
    }
}

fn add_noise(w: &mut ControlWaveform, relative: f64, seed: u64) {
    let rms = (w.sum_sq() / (3 * w.v.len().max(1)) as f64).sqrt();
    let amp = if rms > 0.0 { relative * rms } else { relative };
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for u in &mut w.v {
        for x in u.iter_mut() {
            *x += amp * rng.gen_range(-1.0..1.0);
        }
    }
}

/// One point of the robustness/energy frontier.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct FrontierPoint {
    pub c_target: f64,
    pub control: RobustControl,
}

/// Runs [`optimize`] for each cost in increasing order, warm-starting from the
/// previous optimum (the first run starts from `init`).
pub fn tradeoff_sweep(
    p: &Protocol,
    ens: &RobustnessEnsemble,
    grid: &TimeGrid,
    c_list: &[f64],
    init: &ControlWaveform,
    opts: &GrapeOptions,
) -> Result<Vec<FrontierPoint>> {
    if c_list.windows(2).any(|w| !(w[1] > w[0])) {
        return Err(Error::InvalidInput("cost targets must be increasing"));
    }
    let mut out: Vec<FrontierPoint> = Vec::with_capacity(c_list.len());
    for &c in c_list {
        let start = out.last().map_or(init, |fp| &fp.control.waveform);
        let control = optimize(p, ens, grid, c, start, opts)?;
        out.push(FrontierPoint { c_target: c, control });
    }
    Ok(out)
}

/// Fidelity on a uniform `η` grid of `n_points` values over `[−ε, ε]`.
pub fn eta_scan(w: &ControlWaveform, p: &Protocol, epsilon: f64, n_points: usize) -> Result<Vec<(f64, f64)>> {
    let ens = make_ensemble(epsilon, n_points)?;
    let f = avg_fidelity(w, p, &ens, &w.grid)?;
    Ok(ens.etas.into_iter().zip(f.per_eta).collect())
}

/// `|F̄(N_η) − F̄(2N_η + 1)|` for a fixed control.
pub fn n_eta_sensitivity(
    w: &ControlWaveform,
    p: &Protocol,
    epsilon: f64,
    n_eta: usize,
    layout: EtaLayout,
) -> Result<f64> {
    let coarse = avg_fidelity(w, p, &make_ensemble_with(epsilon, n_eta, layout)?, &w.grid)?;
    let fine = avg_fidelity(w, p, &make_ensemble_with(epsilon, 2 * n_eta + 1, layout)?, &w.grid)?;
    Ok((coarse.mean - fine.mean).abs())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn reference_ensemble() {
        let e = make_ensemble(0.15, 7).unwrap();
        let want = [-0.15, -0.10, -0.05, 0.0, 0.05, 0.10, 0.15];
        for (a, b) in e.etas.iter().zip(want) {
            assert!((a - b).abs() < 1e-15);
        }
        assert_eq!(e.etas[3], 0.0);
    }

    #[test]
    fn cell_center_ensemble() {
        let e = make_ensemble_with(0.14, 7, EtaLayout::CellCenters).unwrap();
        let want = [-0.12, -0.08, -0.04, 0.0, 0.04, 0.08, 0.12];
        for (a, b) in e.etas.iter().zip(want) {
            assert!((a - b).abs() < 1e-15);
        }
    }

    #[test]
    fn degenerate_ensembles() {
        assert_eq!(make_ensemble(0.0, 7).unwrap().etas, alloc::vec![0.0]);
        assert_eq!(make_ensemble(0.3, 1).unwrap().etas, alloc::vec![0.0]);
        assert!(matches!(make_ensemble(0.1, 4), Err(Error::InvalidEnsemble(_))));
        assert!(matches!(make_ensemble(-0.1, 3), Err(Error::InvalidEnsemble(_))));
    }

    #[test]
    fn ensemble_is_symmetric() {
        for layout in [EtaLayout::Endpoints, EtaLayout::CellCenters] {
            let e = make_ensemble_with(0.37, 11, layout).unwrap();
            for j in 0..11 {
                assert_eq!(e.etas[j], -e.etas[10 - j]);
            }
        }
    }

    #[test]
    fn projection() {
        let grid = TimeGrid::new(1.0, 10).unwrap();
        let w = ControlWaveform::new(grid, alloc::vec![[0.2, -0.1, 0.3]; 10], 2.0).unwrap();
        let c = energy_cost(&w);
        let half = project_energy(&w, c / 4.0).unwrap();
        for (a, b) in half.v.iter().zip(&w.v) {
            for k in 0..3 {
                assert!((a[k] - 0.5 * b[k]).abs() < 1e-15);
            }
        }
        assert!(project_energy(&w, 0.0).unwrap().is_zero());
        let once = project_energy(&w, 0.7).unwrap();
        let twice = project_energy(&once, 0.7).unwrap();
        assert!((energy_cost(&twice) - 0.7).abs() < 1e-15);
        for (a, b) in once.v.iter().zip(&twice.v) {
            for k in 0..3 {
                assert!((a[k] - b[k]).abs() < 1e-15);
            }
        }
        let zero = ControlWaveform::zero(grid, 2.0);
        assert_eq!(project_energy(&zero, 0.1), Err(Error::ZeroWaveform));
    }

    #[test]
    fn tangent_gradient_is_orthogonal() {
        let grid = TimeGrid::new(1.0, 4).unwrap();
        let w = ControlWaveform::new(
            grid,
            alloc::vec![[0.2, -0.1, 0.3], [0.0, 1.0, 0.5], [0.1; 3], [0.4, 0.0, 0.0]],
            1.0,
        )
        .unwrap();
        let g = [[1.0, 2.0, 3.0], [-1.0, 0.5, 0.0], [0.3, 0.3, 0.3], [2.0, 0.0, -1.0]];
        let t = tangent_gradient(&w, &g);
        let dot: f64 = t
            .iter()
            .zip(&w.v)
            .map(|(a, b)| a[0] * b[0] + a[1] * b[1] + a[2] * b[2])
            .sum();
        assert!(dot.abs() < 1e-14);
    }
}
