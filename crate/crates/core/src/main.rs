//! Command-line driver: loads an instance, runs one of the pipelines, and
//! writes a deterministic JSON report.

use clap::{Parser, Subcommand};
use mirror_charge::amodel::{za_series, ComplexParams, TAU};
use mirror_charge::bmodel::{
    grade_restriction_check, mb_inverse_fourier, mb_integrand_samples, verify_main_theorem,
    FiberCycleChart, QuadratureSpec,
};
use mirror_charge::config::{load_config, InstanceConfig};
use mirror_charge::cycles::{
    arrangement_cells, boundary_is_zero, ccc_cycle, ccc_cycle_definition, cells_svg, chains_equal,
    rho_map, zb_over_syz_n1,
};
use mirror_charge::error::Error;
use mirror_charge::lattice::{check_positivity, enumerate_keff};
use mirror_charge::rational::{rat_from_str, rat_to_f64, Rat};
use mirror_charge::report;
use num::complex::Complex64;
use std::path::PathBuf;
use std::process::ExitCode;

#[derive(Parser)]
#[command(name = "mirror-charge", about = "Central charges of line bundles on toric Fano orbifolds, on both sides of mirror symmetry")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    /// Write the JSON report here instead of stdout.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Override the comparison tolerance.
    #[arg(long, global = true)]
    tol: Option<f64>,
    /// Override the curve-class degree bound (rational).
    #[arg(long, global = true)]
    degree_bound: Option<String>,
    /// Override the localization seed.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Write an SVG cell diagram here (cycle subcommand, n = 2).
    #[arg(long, global = true)]
    svg: Option<PathBuf>,
    /// Write a CSV side table here (cells or integrand samples).
    #[arg(long, global = true)]
    csv: Option<PathBuf>,
    /// Suppress the report on stdout.
    #[arg(long, global = true)]
    quiet: bool,
}

#[derive(Subcommand)]
enum Command {
    /// Fan, anticones, Box table, curve classes, positivity verdict.
    Analyze { config: PathBuf },
    /// A-side central charge by the hypergeometric series.
    Za { config: PathBuf },
    /// B-side central charge by Mellin-Barnes quadrature.
    ZbMb { config: PathBuf },
    /// B-side central charge by direct oscillatory integration.
    ZbOsc { config: PathBuf },
    /// Cell decomposition and characteristic cycle of the twist.
    Cycle { config: PathBuf },
    /// The conical map from rays to the dual space.
    Rho { config: PathBuf },
    /// Full mirror-symmetry verification across all methods.
    Verify { config: PathBuf },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Ok(threads) = std::env::var("MIRROR_CHARGE_THREADS") {
        if let Ok(v) = threads.parse::<usize>() {
            let _ = rayon::ThreadPoolBuilder::new().num_threads(v.max(1)).build_global();
        }
    }
    match run(&cli) {
        Ok(pass) => {
            if pass {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(1)
            }
        }
        Err(e) => {
            eprintln!("error: {e}");
            match e {
                Error::MismatchBeyondTolerance { .. } => ExitCode::from(1),
                _ => ExitCode::from(2),
            }
        }
    }
}

fn emit(cli: &Cli, body: String) -> Result<(), Error> {
    if let Some(path) = &cli.out {
        std::fs::write(path, &body)?;
    }
    if !cli.quiet && cli.out.is_none() {
        print!("{body}");
    }
    Ok(())
}

fn emit_csv(cli: &Cli, body: String) -> Result<(), Error> {
    if let Some(path) = &cli.csv {
        std::fs::write(path, &body)?;
    }
    Ok(())
}

fn load(cli: &Cli, path: &PathBuf) -> Result<InstanceConfig, Error> {
    let mut cfg = load_config(path)?;
    if let Some(tol) = cli.tol {
        cfg.tolerances.compare_rel = tol;
    }
    if let Some(db) = &cli.degree_bound {
        cfg.degree_bound = rat_from_str(db)
            .ok_or_else(|| Error::SchemaError(vec!["--degree-bound: not a rational".into()]))?;
    }
    if let Some(seed) = cli.seed {
        cfg.seeds.localization = seed;
    }
    Ok(cfg)
}

fn run(cli: &Cli) -> Result<bool, Error> {
    match &cli.command {
        Command::Analyze { config } => {
            let cfg = load(cli, config)?;
            let classes = enumerate_keff(&cfg.git, &cfg.fan, &cfg.boxes, &cfg.degree_bound)?;
            let positivity = check_positivity(&cfg.git, &cfg.fan);
            let rep = report::analyze_report(
                &cfg.name,
                &cfg.git,
                &cfg.fan,
                &cfg.boxes,
                &classes,
                &positivity,
            );
            emit(cli, report::to_json_string(&rep))?;
            Ok(true)
        }
        Command::Za { config } => {
            let cfg = load(cli, config)?;
            let t_eval = cfg.t_effective();
            let params = ComplexParams::new(t_eval.clone(), cfg.z)?;
            let out = za_series(
                &cfg.git,
                &cfg.fan,
                &cfg.boxes,
                &cfg.twist,
                &params,
                cfg.tolerances.series,
                &cfg.degree_bound,
                cfg.seeds.localization,
            )?;
            let rep = report::SeriesReport {
                name: cfg.name.clone(),
                t: cfg.t.iter().map(|&c| c.into()).collect(),
                t_evaluated: t_eval.iter().map(|&c| c.into()).collect(),
                z: cfg.z,
                twist: report::rationals(&cfg.twist.c),
                h: report::rationals(&cfg.twist.h),
                localization_seed: cfg.seeds.localization,
                charge: (&out.charge).into(),
                terms: report::term_json(&out.records),
            };
            emit(cli, report::to_json_string(&rep))?;
            Ok(true)
        }
        Command::ZbMb { config } => {
            let cfg = load(cli, config)?;
            let t_eval = cfg.t_effective();
            let params = ComplexParams::new(t_eval.clone(), cfg.z)?;
            let spec = QuadratureSpec::default_for(&cfg.git, cfg.tolerances.quadrature)?;
            let im_t: Vec<f64> = t_eval.iter().map(|c| c.im).collect();
            let (_, margin) = grade_restriction_check(&cfg.git, &cfg.twist, &im_t);
            let charge = mb_inverse_fourier(&cfg.git, &cfg.twist, &params, &spec)?;
            if cli.csv.is_some() {
                let samples = mb_integrand_samples(&cfg.git, &cfg.twist, &params, &spec, 512, 30.0);
                emit_csv(cli, report::integrand_csv(&samples))?;
            }
            let rep = report::BChargeReport {
                name: cfg.name.clone(),
                t: cfg.t.iter().map(|&c| c.into()).collect(),
                t_evaluated: t_eval.iter().map(|&c| c.into()).collect(),
                z: cfg.z,
                twist: report::rationals(&cfg.twist.c),
                grade_margin: margin,
                charge: (&charge).into(),
            };
            emit(cli, report::to_json_string(&rep))?;
            Ok(true)
        }
        Command::ZbOsc { config } => {
            let cfg = load(cli, config)?;
            let t_eval = cfg.t_effective();
            let params = ComplexParams::new(t_eval.clone(), cfg.z)?;
            let spec = QuadratureSpec::default_for(&cfg.git, cfg.tolerances.quadrature)?;
            let im_t: Vec<f64> = t_eval.iter().map(|c| c.im).collect();
            let chart = FiberCycleChart::compatible(&cfg.git, &cfg.twist, &im_t)?;
            let charge =
                mirror_charge::bmodel::fiber_oscillatory(&cfg.git, &cfg.twist, &params, &chart, &spec)?;
            let rep = report::BChargeReport {
                name: cfg.name.clone(),
                t: cfg.t.iter().map(|&c| c.into()).collect(),
                t_evaluated: t_eval.iter().map(|&c| c.into()).collect(),
                z: cfg.z,
                twist: report::rationals(&cfg.twist.c),
                grade_margin: f64::NAN,
                charge: (&charge).into(),
            };
            emit(cli, report::to_json_string(&rep))?;
            Ok(true)
        }
        Command::Cycle { config } => {
            let cfg = load(cli, config)?;
            // Cells at the requested shift a = ell'(Im t / 2 pi) + c (the
            // twist sign matching the pinned inversion kernel).
            let a: Vec<Rat> = (0..cfg.git.r_rays)
                .map(|i| {
                    let v: f64 = (0..cfg.git.k())
                        .map(|b| rat_to_f64(&cfg.git.splitting.ell[i][b]) * cfg.t[b].im / TAU)
                        .sum();
                    let num = (v * 1e9).round() as i64;
                    Rat::new(num.into(), 1_000_000_000i64.into()) + &cfg.twist.c[i]
                })
                .collect();
            let (cells, degenerate) = arrangement_cells(&cfg.git, &cfg.fan, &a)?;
            let cycle = ccc_cycle(&cfg.git, &cfg.fan, &a)?;
            let def = ccc_cycle_definition(&cfg.git, &cfg.fan, &a)?;
            let agree = chains_equal(&cfg.git, &cycle, &def, &a);
            let boundary = boundary_is_zero(&cfg.git, &cycle)?;
            let rep = report::cycle_report(&cfg.name, &a, degenerate, &cells, &cycle, boundary, agree);
            if cli.svg.is_some() && cfg.git.n == 2 {
                if let Some(path) = &cli.svg {
                    std::fs::write(path, cells_svg(&cfg.git, &cells, &a))?;
                }
            }
            emit_csv(cli, report::cells_csv(&cells))?;
            emit(cli, report::to_json_string(&rep))?;
            Ok(boundary && agree)
        }
        Command::Rho { config } => {
            let cfg = load(cli, config)?;
            let rho = rho_map(&cfg.git, &cfg.fan)?;
            #[derive(serde::Serialize)]
            struct RhoJson {
                name: String,
                pieces: Vec<RhoPieceJson>,
            }
            #[derive(serde::Serialize)]
            struct RhoPieceJson {
                cone_gens: Vec<Vec<String>>,
                matrix: Vec<Vec<String>>,
            }
            let rep = RhoJson {
                name: cfg.name.clone(),
                pieces: rho
                    .pieces
                    .iter()
                    .map(|p| RhoPieceJson {
                        cone_gens: p.cone_gens.iter().map(|v| report::rationals(v)).collect(),
                        matrix: p.matrix.iter().map(|v| report::rationals(v)).collect(),
                    })
                    .collect(),
            };
            emit(cli, report::to_json_string(&rep))?;
            Ok(true)
        }
        Command::Verify { config } => {
            let cfg = load(cli, config)?;
            let t_eval = cfg.t_effective();
            let params = ComplexParams::new(t_eval.clone(), cfg.z)?;
            let main = verify_main_theorem(
                &cfg.git,
                &cfg.fan,
                &cfg.boxes,
                &cfg.twist,
                &params,
                cfg.tolerances.compare_rel,
                &cfg.degree_bound,
                cfg.seeds.localization,
            )?;
            // Theorem-5.8-style check when the dimension is one.
            let syz = if cfg.git.n == 1 {
                let charge = zb_over_syz_n1(
                    &cfg.git,
                    &cfg.fan,
                    &cfg.twist,
                    &params,
                    cfg.tolerances.quadrature,
                    4000,
                )?;
                let normalize = Complex64::new(0.0, TAU).powi(-(cfg.git.n as i32));
                let expected = main.kappa * normalize * charge.value;
                let residual = (main.za.value - expected).norm() / main.za.value.norm().max(1e-300);
                Some((charge, residual))
            } else {
                None
            };
            let mut pass = main.pass;
            if let Some((_, residual)) = &syz {
                if *residual > cfg.tolerances.compare_rel {
                    pass = false;
                }
            }
            let rep = report::verify_report(
                &cfg.name,
                &cfg.t,
                &t_eval,
                cfg.z,
                &cfg.twist.c,
                &main,
                syz.as_ref().map(|(c, r)| (c, *r)),
            );
            emit(cli, report::to_json_string(&rep))?;
            if !pass {
                let worst = rep
                    .residuals
                    .iter()
                    .map(|r| r.relative_residual)
                    .fold(0.0f64, f64::max);
                eprintln!(
                    "verification FAILED for {} (worst residual {:.3e}, kappa {})",
                    cfg.name, worst, rep.kappa_name
                );
            }
            Ok(pass)
        }
    }
}
