use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use qoste::commands;
use qoste::config::{self, Overrides};

#[derive(Parser)]
#[command(name = "qoste", version, about = "Energy-optimal and counterdiabatic qubit drives")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Drift, counterdiabatic and optimal trajectories and waveforms
    Simulate(Common),
    /// Energy costs and the geometric bounds between them
    Costs(Common),
    /// Cost ratio against duration and its log-log slope
    Scaling(Common),
    /// Robust controls at fixed energy and their fidelity scans
    Robust(Common),
    /// Path lengths of the adiabatic and rotating-frame trajectories
    Geometry(Common),
}

#[derive(Args)]
struct Common {
    /// Experiment config (JSON)
    #[arg(short, long)]
    config: PathBuf,
    #[arg(long)]
    n_steps: Option<usize>,
    #[arg(long)]
    seed: Option<u64>,
    /// Output directory
    #[arg(long)]
    out: Option<PathBuf>,
}

fn run(cli: Cli) -> qoste::Result<()> {
    let (Command::Simulate(c) | Command::Costs(c) | Command::Scaling(c) | Command::Robust(c) | Command::Geometry(c)) =
        &cli.command;
    let overrides = Overrides {
        n_steps: c.n_steps,
        seed: c.seed,
        output_dir: c.out.clone(),
    };
    let exp = config::load(&c.config, &overrides)?;
    commands::record_config(&exp)?;
    let dir = exp.config.output_dir.display();
    match cli.command {
        Command::Simulate(_) => {
            let r = commands::simulate(&exp)?;
            println!(
                "fidelity: drift {:.9}  cd {:.12}  qoste {:.12}",
                r.fidelity_drift, r.fidelity_cd, r.fidelity_qoste
            );
            println!("cost: cd {:.6}  qoste {:.6}", r.cost_cd, r.cost_qoste);
        }
        Command::Costs(_) => {
            let r = commands::costs(&exp)?;
            let c = &r.chain;
            println!("C[V_CD]     = {:.8}", c.c_cd);
            println!("L bound     = {:.8}", c.l_bound);
            println!("L~ bound    = {:.8}", c.l_tilde_bound);
            println!("G~ bound    = {:.8}", c.g_bound);
            println!("C[V_QOSTE]  = {:.8}", c.c_qoste);
            println!("chain holds: {}", c.chain_holds);
        }
        Command::Scaling(_) => {
            let r = commands::scaling(&exp)?;
            for p in &r.points {
                println!("omega t_f = {:>8}  ratio = {:.6e}", p.t_f, p.ratio);
            }
            println!("slope = {:.4}", r.slope);
        }
        Command::Robust(_) => {
            let r = commands::robust(&exp)?;
            println!("qoste: C = {:.6}  F = {:.6}", r.qoste.cost, r.qoste.avg_fidelity);
            println!("cd:    C = {:.6}  F = {:.6}", r.cd.cost, r.cd.avg_fidelity);
            for e in &r.frontier {
                println!(
                    "C = {:.6}  F = {:.8}  iters = {}",
                    e.c_target, e.control.avg_fidelity, e.iterations
                );
            }
            for w in &r.warnings {
                eprintln!("warning: {w}");
            }
        }
        Command::Geometry(_) => {
            let r = commands::geometry(&exp)?;
            let g = &r.geometry;
            println!("L = {:.8}  L~ = {:.8}  G~ = {:.8}", g.l, g.l_tilde, g.g_tilde);
        }
    }
    println!("outputs in {dir}");
    Ok(())
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
