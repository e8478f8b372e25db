//! One function per subcommand. Each writes its files into the configured
//! output directory and returns the report it serialized.

use std::path::PathBuf;

use qoste_core::propagation::{propagate_state_steps, Trajectory};
use qoste_core::{
    avg_fidelity, boundaries, cd_cost_lz, cd_drive_general, cost_chain_check, energy_cost, eta_scan, eval_h0, fidelity,
    final_bloch, lz_protocol, make_ensemble_with, path_geometry, qoste_solution, ratio_scaling, tradeoff_sweep,
    ChainReport, ControlWaveform, EtaLayout, PathGeometry, Protocol, SlopeEstimate,
};
use serde::{Deserialize, Serialize};

use crate::config::{Experiment, ProtocolSpec};
use crate::error::{Error, Result};
use crate::io;

fn out_dir(exp: &Experiment) -> Result<PathBuf> {
    let dir = exp.config.output_dir.clone();
    std::fs::create_dir_all(&dir).map_err(|source| Error::Output {
        path: dir.clone(),
        source,
    })?;
    Ok(dir)
}

fn run_with(p: &Protocol, w: &ControlWaveform) -> Trajectory {
    let bd = boundaries(p).expect("boundaries checked by caller");
    let grid = w.grid;
    propagate_state_steps(&grid, &bd.e_i, |k| {
        eval_h0(p, grid.t_mid(k)).unwrap() + w.coeffs(k, 0.0)
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimulateReport {
    pub n_steps: usize,
    pub t_f: f64,
    pub omega_i: f64,
    pub fidelity_drift: f64,
    pub fidelity_cd: f64,
    pub fidelity_qoste: f64,
    pub cost_cd: f64,
    pub cost_qoste: f64,
}

/// Drift, counterdiabatic and optimal trajectories plus both drive waveforms.
pub fn simulate(exp: &Experiment) -> Result<SimulateReport> {
    let p = &exp.protocol;
    let grid = exp.grid;
    let bd = boundaries(p)?;
    let cd = cd_drive_general(p, &grid)?;
    let q = qoste_solution(p, &grid)?;
    let drift = ControlWaveform::zero(grid, bd.omega_i);
    let dir = out_dir(exp)?;
    let mut fids = [0.0; 3];
    for (i, (name, w)) in [("drift", &drift), ("cd", &cd), ("qoste", &q.waveform)]
        .into_iter()
        .enumerate()
    {
        let traj = run_with(p, w);
        fids[i] = fidelity(traj.last(), &bd.e_f);
        io::write_trajectory_csv(&dir.join(format!("trajectory_{name}.csv")), &traj)?;
    }
    io::write_waveform_csv(&dir.join("waveform_cd.csv"), &cd)?;
    io::write_waveform_csv(&dir.join("waveform_qoste.csv"), &q.waveform)?;
    let report = SimulateReport {
        n_steps: grid.n_steps(),
        t_f: grid.t_f(),
        omega_i: bd.omega_i,
        fidelity_drift: fids[0],
        fidelity_cd: fids[1],
        fidelity_qoste: fids[2],
        cost_cd: energy_cost(&cd),
        cost_qoste: q.cost,
    };
    io::write_json(&dir.join("simulate.json"), &report)?;
    Ok(report)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CostsReport {
    pub n_steps: usize,
    pub chain: ChainReport,
    /// Quadrature value of the counterdiabatic cost (Landau-Zener only).
    pub c_cd_quadrature: Option<f64>,
    /// `C[V_CD]/C[V_QOSTE]`; absent when the optimal cost vanishes.
    pub ratio: Option<f64>,
}

pub fn costs(exp: &Experiment) -> Result<CostsReport> {
    let chain = cost_chain_check(&exp.protocol, &exp.grid)?;
    let c_cd_quadrature = match exp.protocol {
        Protocol::LandauZener(_) => Some(cd_cost_lz(&exp.protocol)?),
        Protocol::Tabulated(_) => None,
    };
    let report = CostsReport {
        n_steps: exp.grid.n_steps(),
        chain,
        c_cd_quadrature,
        ratio: (chain.c_qoste > 0.0).then(|| chain.c_cd / chain.c_qoste),
    };
    io::write_json(&out_dir(exp)?.join("costs.json"), &report)?;
    Ok(report)
}

/// Cost ratio over the configured durations, keeping `Δ0/ω` and `Δd/ω` fixed.
pub fn scaling(exp: &Experiment) -> Result<SlopeEstimate> {
    let ProtocolSpec::LandauZener {
        delta0_per_omega,
        delta_d_per_omega,
        ..
    } = exp.config.protocol
    else {
        return Err(Error::Config(vec![
            "protocol.kind: scaling needs a landau_zener protocol".into(),
        ]));
    };
    let family = |t_f| lz_protocol(delta0_per_omega, delta_d_per_omega, 1.0, t_f);
    let est = ratio_scaling(family, &exp.config.scaling.omega_t_f, &exp.scaling_resolution())?;
    io::write_json(&out_dir(exp)?.join("scaling.json"), &est)?;
    Ok(est)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GeometryReport {
    pub geometry: PathGeometry,
    pub omega_i: f64,
    pub t_f: f64,
    /// Target in the rotating frame, Bloch coordinates in the initial eigenbasis.
    pub target_bloch: [f64; 3],
    pub l_bound: f64,
    pub g_bound: f64,
}

pub fn geometry(exp: &Experiment) -> Result<GeometryReport> {
    let p = &exp.protocol;
    let g = path_geometry(p, &exp.grid)?;
    let omega_i = boundaries(p)?.omega_i;
    let t_f = exp.grid.t_f();
    let bound = |len: f64| len * len / (8.0 * omega_i * t_f);
    let report = GeometryReport {
        geometry: g,
        omega_i,
        t_f,
        target_bloch: final_bloch(p, &exp.grid)?.as_array(),
        l_bound: bound(g.l),
        g_bound: bound(g.g_tilde),
    };
    io::write_json(&out_dir(exp)?.join("geometry.json"), &report)?;
    Ok(report)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ControlSummary {
    pub label: String,
    pub cost: f64,
    pub avg_fidelity: f64,
    pub per_eta_fidelity: Vec<f64>,
    /// Worst `1 − F` over the fine scan.
    pub max_scan_infidelity: f64,
    pub scan_file: String,
    pub waveform_file: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FrontierEntry {
    pub c_target: f64,
    pub iterations: usize,
    pub converged: bool,
    pub control: ControlSummary,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FrontierReport {
    pub epsilon: f64,
    pub layout: EtaLayout,
    pub etas: Vec<f64>,
    pub n_steps: usize,
    pub scan_points: usize,
    pub seed: u64,
    pub qoste: ControlSummary,
    pub cd: ControlSummary,
    pub frontier: Vec<FrontierEntry>,
    pub warnings: Vec<String>,
}

/// Frontier of ensemble fidelity against energy, warm-started from the
/// analytic optimum, with fine `η` scans of every control.
pub fn robust(exp: &Experiment) -> Result<FrontierReport> {
    let p = &exp.protocol;
    let grid = exp.grid;
    let cfg = &exp.config;
    let ens = make_ensemble_with(cfg.ensemble.epsilon, cfg.ensemble.n_eta, cfg.ensemble.layout)?;
    let q = qoste_solution(p, &grid)?.waveform;
    let cd = cd_drive_general(p, &grid)?;
    let (c_q, c_cd) = (energy_cost(&q), energy_cost(&cd));
    let mut targets: Vec<f64> = cfg.cost_targets.iter().map(|t| t.resolve(c_q, c_cd)).collect();
    targets.sort_by(f64::total_cmp);
    targets.dedup();

    let dir = out_dir(exp)?;
    let summarize = |label: &str, w: &ControlWaveform| -> Result<ControlSummary> {
        let f = avg_fidelity(w, p, &ens, &grid)?;
        let scan = eta_scan(w, p, cfg.ensemble.epsilon, cfg.scan_points)?;
        let scan_file = format!("scan_{label}.csv");
        let waveform_file = format!("waveform_{label}.csv");
        io::write_scan_csv(&dir.join(&scan_file), &scan)?;
        io::write_waveform_csv(&dir.join(&waveform_file), w)?;
        Ok(ControlSummary {
            label: label.to_owned(),
            cost: energy_cost(w),
            avg_fidelity: f.mean,
            per_eta_fidelity: f.per_eta,
            max_scan_infidelity: scan.iter().map(|(_, f)| 1.0 - f).fold(0.0, f64::max),
            scan_file,
            waveform_file,
        })
    };

    let qoste = summarize("qoste", &q)?;
    let cd_summary = summarize("cd", &cd)?;
    let sweep = tradeoff_sweep(p, &ens, &grid, &targets, &q, &exp.grape_options())?;
    let mut warnings = Vec::new();
    let mut frontier = Vec::with_capacity(sweep.len());
    for (i, point) in sweep.iter().enumerate() {
        if !point.control.converged {
            warnings.push(format!(
                "point {i} (C = {}): stopped after {} iterations without meeting the tolerance",
                point.c_target, point.control.iterations
            ));
        }
        frontier.push(FrontierEntry {
            c_target: point.c_target,
            iterations: point.control.iterations,
            converged: point.control.converged,
            control: summarize(&format!("point{i:02}"), &point.control.waveform)?,
        });
    }
    let report = FrontierReport {
        epsilon: ens.epsilon,
        layout: ens.layout,
        etas: ens.etas.clone(),
        n_steps: grid.n_steps(),
        scan_points: cfg.scan_points,
        seed: cfg.seed,
        qoste,
        cd: cd_summary,
        frontier,
        warnings,
    };
    io::write_json(&dir.join("frontier.json"), &report)?;
    Ok(report)
}

/// Writes a copy of the resolved config next to the outputs.
pub fn record_config(exp: &Experiment) -> Result<PathBuf> {
    let path = out_dir(exp)?.join("config.resolved.json");
    io::write_json(&path, &exp.config)?;
    Ok(path)
}
