mod args;
mod output;

use std::process::ExitCode;

use anyhow::{anyhow, bail, Context};
use clap::Parser;
use serde_json::{json, Value};

use args::{Cli, Command, GridArgs, LayoutArg, ProtocolArgs, Target};
use dmcv_core::scenario_file::DEFAULT_FIGURE;
use dmcv_core::{
    max_distance, optimize_t, optimize_tv, parse_scenario_for, scenarios, secret_key_rate, serialize_scenario, Error, FigureId, Layout,
    OptimizationGrid, ProtocolConfig, RatioDistance, SweepSpec, SymmetricDistance, ZpcSetting,
};

const THREADS_ENV: &str = "DMCV_THREADS";

enum Failure {
    /// Bad flags, bad input, or I/O trouble.
    Usage(anyhow::Error),
    NonPhysical,
}

impl From<anyhow::Error> for Failure {
    fn from(e: anyhow::Error) -> Self {
        Failure::Usage(e)
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Usage(e.into())
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(1) } else { ExitCode::SUCCESS };
        }
    };
    if let Err(e) = configure_threads() {
        eprintln!("error: {e:#}");
        return ExitCode::from(1);
    }
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::NonPhysical) => ExitCode::from(2),
        Err(Failure::Usage(e)) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
    }
}

fn configure_threads() -> anyhow::Result<()> {
    let Ok(raw) = std::env::var(THREADS_ENV) else {
        return Ok(());
    };
    let n: usize = raw
        .trim()
        .parse()
        .ok()
        .filter(|&n| n > 0)
        .ok_or_else(|| anyhow!("{THREADS_ENV} must be a positive integer, got `{raw}`"))?;
    rayon::ThreadPoolBuilder::new().num_threads(n).build_global()?;
    Ok(())
}

fn run(cli: Cli) -> Result<(), Failure> {
    match cli.command {
        Command::Keyrate { protocol } => keyrate(&protocol),
        Command::Optimize {
            optimize,
            protocol,
            grid,
            layout,
            ratio_d,
            tol_km,
        } => optimize_cmd(optimize, &protocol, &grid, layout, ratio_d, tol_km),
        Command::Figure {
            figure,
            out,
            protocol,
            grid,
            distance_steps,
            variance_steps,
            beta_steps,
            modulation_steps,
        } => {
            let mut spec = resolve(&protocol, &grid, Some(figure))?;
            let axes = [
                (distance_steps, &mut spec.distance_axis.steps),
                (variance_steps, &mut spec.variance_axis.steps),
                (beta_steps, &mut spec.beta_axis.steps),
                (modulation_steps, &mut spec.modulation_axis.steps),
            ];
            for (flag, slot) in axes {
                if let Some(n) = flag {
                    *slot = n;
                }
            }
            spec.validate()?;
            let output = scenarios::run(&spec)?;
            for w in &output.warnings {
                eprintln!("warning: {w}");
            }
            let written = output::write_figure(&out, &spec, serialize_scenario(&spec), &output)?;
            for path in written {
                println!("{}", path.display());
            }
            Ok(())
        }
    }
}

/// Scenario file (if any) as defaults, then explicit flags on top.
fn resolve(protocol: &ProtocolArgs, grid: &GridArgs, figure: Option<FigureId>) -> anyhow::Result<SweepSpec> {
    let text = match &protocol.scenario {
        Some(path) => std::fs::read_to_string(path).with_context(|| format!("cannot read scenario file {}", path.display()))?,
        None => String::new(),
    };
    let mut spec = parse_scenario_for(&text, figure.unwrap_or(DEFAULT_FIGURE))?;
    if let Some(f) = figure {
        if spec.figure != f {
            bail!("scenario file is for {} but {f} was requested", spec.figure);
        }
    }

    let b = &mut spec.base;
    if let Some(s) = protocol.scheme {
        b.scheme = s;
    }
    if let Some(t) = &protocol.zpc_t {
        b.zpc = if t.eq_ignore_ascii_case("off") {
            ZpcSetting::OFF
        } else {
            let t: f64 = t.parse().map_err(|_| anyhow!("--zpc-t expects a number or `off`, got `{t}`"))?;
            ZpcSetting::on(t)?
        };
    }
    let scalars = [
        (protocol.variance, &mut b.variance_v),
        (protocol.beta, &mut b.beta),
        (protocol.eps_a, &mut b.eps_a),
        (protocol.eps_b, &mut b.eps_b),
        (protocol.lac, &mut b.geometry.l_ac),
        (protocol.lbc, &mut b.geometry.l_bc),
        (protocol.mu, &mut b.geometry.loss_mu),
    ];
    for (flag, slot) in scalars {
        if let Some(x) = flag {
            *slot = x;
        }
    }
    if let Some(eps) = protocol.eps {
        *b = b.with_eps(eps);
    }

    let g = &mut spec.grid;
    let reals = [(grid.t_lo, &mut g.t_lo), (grid.t_hi, &mut g.t_hi), (grid.v_lo, &mut g.v_lo), (grid.v_hi, &mut g.v_hi)];
    for (flag, slot) in reals {
        if let Some(x) = flag {
            *slot = x;
        }
    }
    let counts = [(grid.t_steps, &mut g.t_steps), (grid.v_steps, &mut g.v_steps), (grid.refine_iters, &mut g.refine_iters)];
    for (flag, slot) in counts {
        if let Some(n) = flag {
            *slot = n;
        }
    }
    spec.validate()?;
    Ok(spec)
}

fn print_json(value: &Value) -> anyhow::Result<()> {
    use std::io::Write;
    let text = serde_json::to_string_pretty(value)?;
    match writeln!(std::io::stdout(), "{text}") {
        Err(e) if e.kind() != std::io::ErrorKind::BrokenPipe => Err(e.into()),
        _ => Ok(()),
    }
}

fn keyrate(protocol: &ProtocolArgs) -> Result<(), Failure> {
    let config = resolve(protocol, &GridArgs::default(), None)?.base;
    let result = match secret_key_rate(&config) {
        Ok(r) => r,
        Err(e @ (Error::NonPhysical | Error::NonPhysicalCorrelation { .. })) => {
            eprintln!("error: {e}");
            return Err(Failure::NonPhysical);
        }
        Err(e) => return Err(e.into()),
    };
    let mut out = serde_json::to_value(result).map_err(anyhow::Error::from)?;
    out["config"] = serde_json::to_value(config).map_err(anyhow::Error::from)?;
    print_json(&out)?;
    if result.domain_warning {
        eprintln!("warning: effective modulation variance above 0.5 (outside the Gaussian-channel domain)");
    }
    if result.physical {
        Ok(())
    } else {
        Err(Failure::NonPhysical)
    }
}

fn layout_for(layout: LayoutArg, ratio_d: Option<f64>) -> Layout {
    match (ratio_d, layout) {
        (Some(d), _) => Layout::Ratio {
            d,
            reported: RatioDistance::Total,
        },
        (None, LayoutArg::Asymmetric) => Layout::Asymmetric,
        (None, LayoutArg::Symmetric) => Layout::Symmetric(SymmetricDistance::Total),
        (None, LayoutArg::SymmetricPerArm) => Layout::Symmetric(SymmetricDistance::PerArm),
    }
}

fn grid_json(grid: &OptimizationGrid) -> Value {
    serde_json::to_value(grid).unwrap_or(Value::Null)
}

fn optimize_cmd(target: Target, protocol: &ProtocolArgs, grid: &GridArgs, layout: LayoutArg, ratio_d: Option<f64>, tol_km: f64) -> Result<(), Failure> {
    let spec = resolve(protocol, grid, None)?;
    let config: ProtocolConfig = spec.base;
    let grid = spec.grid;
    let out = match target {
        Target::T => {
            if !config.zpc.enabled {
                return Err(Failure::Usage(Error::ZpcDisabled.into()));
            }
            let o = optimize_t(&config, &grid)?;
            json!({
                "optimize": "t",
                "t_star": o.t_star,
                "skr_star": o.skr_star,
                "has_key": o.has_key,
                "grid": grid_json(&grid),
                "config": config,
            })
        }
        Target::Tv => {
            let o = optimize_tv(&config, &grid)?;
            json!({
                "optimize": "tv",
                "t_star": o.t_star,
                "v_star": o.v_star,
                "skr_star": o.skr_star,
                "has_key": o.has_key,
                "grid": grid_json(&grid),
                "config": config,
            })
        }
        Target::Distance => {
            let layout = layout_for(layout, ratio_d);
            let o = max_distance(&config, layout, &grid, tol_km)?;
            // the bracket midpoint can sit just past the edge; report the rate on the keyed side
            let inside = (o.distance_km - 0.5 * tol_km).max(0.0);
            let at = dmcv_core::optimize::best_over_t(&config.at_distance(layout, inside)?, &grid)?;
            json!({
                "optimize": "distance",
                "layout": format!("{layout:?}"),
                "max_distance_km": o.distance_km,
                "t_star": at.t_star,
                "skr_star": at.skr_star,
                "has_key": o.has_key,
                "tol_km": tol_km,
                "grid": grid_json(&grid),
                "config": config,
            })
        }
    };
    print_json(&out)?;
    Ok(())
}
