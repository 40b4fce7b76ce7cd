//! `nlslab` — spectral laboratory for scattering thresholds of the
//! focusing mass-subcritical nonlinear Schrödinger equation.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use nls_lab::config::{to_sorted_json, ExperimentConfig};
use nls_lab::error::LabError;
use nls_lab::{gap, oscillate, runner, threshold, verify, witness};

use nls_core::exponents::{exponent_set, strauss_exponent, validate_window, PhysParams};
use nls_core::groundstate::{petviashvili_solve, pohozaev_check, PetviashviliOptions};
use nls_core::{snapshot, SpectralEngine};

#[derive(Parser)]
#[command(
    name = "nlslab",
    about = "Spectral simulation laboratory for the focusing mass-subcritical NLS equation",
    version
)]
struct Cli {
    /// Root directory for run outputs.
    #[arg(long, global = true, default_value = "out")]
    out: PathBuf,
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Print the exponent system attached to (N, p).
    Exponents {
        #[arg(long)]
        dim: u32,
        #[arg(long)]
        power: f64,
    },
    /// Evolve and classify one configured data family member.
    Simulate {
        #[arg(short = 'c', long)]
        config: PathBuf,
    },
    /// Solve for the ground state and persist profile + metadata.
    Groundstate {
        #[arg(short = 'c', long)]
        config: PathBuf,
    },
    /// Bisect the scattering threshold along the configured family.
    Threshold {
        #[arg(short = 'c', long)]
        config: PathBuf,
    },
    /// Classify chirped data e^{ib|x|²}ψ across the configured b grid.
    Oscillate {
        #[arg(short = 'c', long)]
        config: PathBuf,
    },
    /// Demonstrate the standing-wave gap: a non-scattering datum with
    /// ℓ strictly below ℓ(Q).
    Theorem2 {
        #[arg(short = 'c', long)]
        config: PathBuf,
    },
    /// Check the negative-energy floor along a run.
    Witness {
        #[arg(short = 'c', long)]
        config: PathBuf,
    },
    /// Run a pinned verification suite
    /// (exponents | decay | jt | pythagoras | conservation).
    Verify { suite: String },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match dispatch(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}

fn load(config: &PathBuf) -> Result<ExperimentConfig, LabError> {
    ExperimentConfig::load(config)
}

fn dispatch(cli: Cli) -> Result<(), LabError> {
    match cli.cmd {
        Cmd::Exponents { dim, power } => exponents_cmd(dim, power),
        Cmd::Simulate { config } => {
            let cfg = load(&config)?;
            let out = runner::run_simulation(&cfg, Some(&cli.out))?;
            println!("label={}", out.record.label);
            println!("config_hash={}", out.record.config_hash);
            println!("initial_mass={}", out.record.initial_mass);
            println!("initial_energy={}", out.record.initial_energy);
            println!("initial_ell={}", out.record.initial_ell);
            println!("verdict={}", out.record.verdict);
            println!("tail_slope={}", out.record.tail_slope);
            println!("reason={}", out.record.reason);
            if let Some(dir) = &out.out_dir {
                println!("run_dir={}", dir.display());
            }
            Ok(())
        }
        Cmd::Groundstate { config } => {
            let cfg = load(&config)?;
            groundstate_cmd(&cfg, &cli.out)
        }
        Cmd::Threshold { config } => {
            let cfg = load(&config)?;
            let res = threshold::threshold_bisect(&cfg)?;
            let dir = cli.out.join(format!("threshold-{}", cfg.hash()));
            std::fs::create_dir_all(&dir)?;
            std::fs::write(dir.join("threshold.json"), to_sorted_json(&res)?)?;
            println!("family={}", res.family);
            for p in &res.probes {
                println!(
                    "probe c={:.6} ell={:.6} verdict={} slope={:.4}",
                    p.amplitude, p.ell, p.verdict, p.tail_slope
                );
            }
            println!("bracket=[{}, {}]", res.c_lo, res.c_hi);
            println!("ell_bracket=[{}, {}]", res.ell_lo, res.ell_hi);
            println!("undetermined={}", res.undetermined_count);
            if let Some(gap) = res.standing_wave_gap {
                println!("ell_unit={}", res.ell_unit);
                println!("standing_wave_gap={gap}");
            }
            println!("report={}", dir.join("threshold.json").display());
            if res.inconclusive {
                return Err(LabError::Inconclusive(format!(
                    "{} of {} probes undetermined",
                    res.undetermined_count, res.budget
                )));
            }
            Ok(())
        }
        Cmd::Oscillate { config } => {
            let cfg = load(&config)?;
            let rep = oscillate::oscillation_sweep(&cfg)?;
            let dir = cli.out.join(format!("oscillate-{}", cfg.hash()));
            std::fs::create_dir_all(&dir)?;
            std::fs::write(dir.join("sweep.json"), to_sorted_json(&rep)?)?;
            println!("base={} amplitude={}", rep.base_label, rep.base_amplitude);
            println!("base_verdict={} base_free_norm={:.6}", rep.base_verdict, rep.base_free_norm);
            for row in &rep.rows {
                println!(
                    "b={:+.3} verdict={} slope={:.4} free_norm={:.6}",
                    row.b, row.verdict, row.tail_slope, row.free_spacetime_norm
                );
            }
            println!("scatter_onset_positive={:?}", rep.scatter_onset_positive);
            println!("scatter_onset_negative={:?}", rep.scatter_onset_negative);
            println!("free_norms_nonincreasing={}", rep.free_norms_nonincreasing);
            println!("report={}", dir.join("sweep.json").display());
            if rep.scatter_onset_positive.is_none() || rep.scatter_onset_negative.is_none() {
                return Err(LabError::Inconclusive(
                    "no Scatter verdict on one of the chirp signs within the grid".into(),
                ));
            }
            Ok(())
        }
        Cmd::Theorem2 { config } => {
            let cfg = load(&config)?;
            let rep = gap::standing_wave_gap(&cfg)?;
            let dir = cli.out.join(format!("theorem2-{}", cfg.hash()));
            std::fs::create_dir_all(&dir)?;
            std::fs::write(dir.join("gap.json"), to_sorted_json(&rep)?)?;
            println!("ell_ground_state={}", rep.ell_ground_state);
            println!("energy_ground_state={}", rep.energy_ground_state);
            println!("c0={}", rep.c0);
            println!("energy_c0={}", rep.energy_c0);
            println!("ell_c0={}", rep.ell_c0);
            println!("gap_ratio={}", rep.gap_ratio);
            println!("verdict_c0={}", rep.verdict_c0);
            println!("report={}", dir.join("gap.json").display());
            if !rep.passed {
                return Err(LabError::InvariantFailure(
                    "standing-wave gap demonstration failed".into(),
                ));
            }
            Ok(())
        }
        Cmd::Witness { config } => {
            let cfg = load(&config)?;
            let (rep, _run) = witness::negative_energy_witness(&cfg, Some(&cli.out))?;
            let dir = cli.out.join(format!("witness-{}", cfg.hash()));
            std::fs::create_dir_all(&dir)?;
            std::fs::write(dir.join("witness.json"), to_sorted_json(&rep)?)?;
            println!("initial_energy={}", rep.initial_energy);
            println!("floor={}", rep.floor);
            println!("min_relative_margin={}", rep.min_relative_margin);
            println!("floor_violations={}", rep.floor_violations);
            println!("verdict={}", rep.verdict);
            println!("report={}", dir.join("witness.json").display());
            if !rep.passed {
                return Err(LabError::InvariantFailure("negative-energy witness failed".into()));
            }
            Ok(())
        }
        Cmd::Verify { suite } => {
            let lines = verify::run_suite(&suite)?;
            let mut all = true;
            for l in &lines {
                println!("[{}] {} — {}", if l.passed { "PASS" } else { "FAIL" }, l.name, l.detail);
                all &= l.passed;
            }
            if !all {
                return Err(LabError::InvariantFailure(format!("suite '{suite}' failed")));
            }
            Ok(())
        }
    }
}

fn exponents_cmd(dim: u32, power: f64) -> Result<(), LabError> {
    let params = PhysParams::focusing(dim, power)
        .map_err(|e| LabError::InvalidConfig(e.to_string()))?;
    let p_st = strauss_exponent(dim).map_err(|e| LabError::InvalidConfig(e.to_string()))?;
    let set = exponent_set(&params).map_err(|e| LabError::InvalidConfig(e.to_string()))?;
    // fixed-order key=value listing
    println!("p_strauss={p_st}");
    println!("rho={}", set.rho);
    println!("gamma={}", set.gamma);
    println!("rho_tilde={}", set.rho_tilde);
    println!("gamma_tilde={}", set.gamma_tilde);
    println!("delta_gamma={}", set.delta_gamma);
    for c in validate_window(&params).checks {
        println!("check_{}={}", c.name, if c.passed { "pass" } else { "fail" });
    }
    Ok(())
}

fn groundstate_cmd(cfg: &ExperimentConfig, out: &std::path::Path) -> Result<(), LabError> {
    let params = cfg.phys_params()?;
    let grid = cfg.make_grid()?;
    let eng = SpectralEngine::new(grid.clone());
    let sol = petviashvili_solve(&params, grid, &eng, &PetviashviliOptions::default())?;
    let pohozaev = pohozaev_check(&sol.profile, &params, &eng)?;
    let energy = nls_core::diagnostics::energy(&sol.profile, &params, &eng)?;
    let ell = nls_core::diagnostics::ell(&sol.profile, &params);

    let dir = out.join(format!("groundstate-{}", cfg.hash()));
    std::fs::create_dir_all(&dir)?;
    snapshot::write_field(&dir.join("profile.bin"), &sol.profile)?;
    if sol.profile.grid().dim() == 1 {
        snapshot::write_field_csv_1d(&dir.join("profile.csv"), &sol.profile)?;
    }
    #[derive(serde::Serialize)]
    struct Meta {
        power: f64,
        dim: u32,
        omega: f64,
        residual: f64,
        iterations: usize,
        converged: bool,
        energy: f64,
        ell: f64,
        pohozaev_defect: f64,
    }
    let meta = Meta {
        power: params.power,
        dim: params.dim,
        omega: sol.omega,
        residual: sol.residual_norm,
        iterations: sol.iterations,
        converged: sol.converged,
        energy,
        ell,
        pohozaev_defect: pohozaev,
    };
    std::fs::write(dir.join("profile.json"), to_sorted_json(&meta)?)?;
    println!("converged={}", sol.converged);
    println!("iterations={}", sol.iterations);
    println!("residual={}", sol.residual_norm);
    println!("energy={energy}");
    println!("ell={ell}");
    println!("pohozaev_defect={pohozaev}");
    println!("profile={}", dir.join("profile.bin").display());
    if !sol.converged {
        return Err(LabError::InvariantFailure("ground-state solve did not converge".into()));
    }
    Ok(())
}
