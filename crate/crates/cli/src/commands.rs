use std::io::Write;
use std::path::Path;

use twofluid::eos::{tabulate, FugacityBeta};
use twofluid::fvm::{default_min_width, count_plateaus, Simulation};
use twofluid::hyperbolicity::{check_conditions, eigenvalues, genuine_nonlinearity, interlacing};
use twofluid::rankine_hugoniot::{trace_shock_curve, Direction, RhError, ShockCurve, TraceOptions};
use twofluid::{ConfigError, ConfigMap, ModelParams, PrimitiveState};

use crate::error::CliError;
use crate::output::{self, write_file};
use crate::{DirectionArg, EosArgs, HypArgs, ParamArgs, ShockArgs, SimulateArgs, StateArgs, WavesArgs};

fn usage(msg: impl std::fmt::Display) -> CliError {
    CliError::Usage(msg.to_string())
}

fn params(a: &ParamArgs) -> Result<ModelParams, CliError> {
    ModelParams::new(a.alpha, a.c_tilde).map_err(usage)
}

fn state(a: &StateArgs) -> Result<PrimitiveState, CliError> {
    if !(a.rho_n > 0.0 && a.rho_s > 0.0) {
        return Err(usage("densities must be positive"));
    }
    Ok(PrimitiveState::new(a.rho_n, a.rho_s, a.u_n, a.u_s))
}

pub fn eos(a: &EosArgs, out: &mut impl Write) -> Result<u8, CliError> {
    if a.dim < 2 {
        return Err(usage("--dim must be at least 2"));
    }
    if a.n == 0 {
        return Err(usage("-n must be positive"));
    }
    let lo = FugacityBeta::new(a.beta_min).map_err(usage)?;
    let hi = FugacityBeta::new(a.beta_max).map_err(usage)?;
    if a.beta_min >= a.beta_max {
        return Err(usage("--beta-min must be below --beta-max"));
    }
    let rows = tabulate(lo, hi, a.n, a.dim);
    writeln!(out, "beta,F0,F2,S,S_prime")?;
    for r in &rows {
        writeln!(out, "{},{},{},{},{}", r.beta, r.f0, r.f2, r.s, r.s_prime)?;
    }
    Ok(if rows.iter().any(|r| r.s_prime >= 0.0) { 2 } else { 0 })
}

pub fn hyp(a: &HypArgs, out: &mut impl Write) -> Result<u8, CliError> {
    let p = params(&a.params)?;
    let u = state(&a.state)?;
    let cond = check_conditions(&u, &p);
    let spec = eigenvalues(&u, &p);
    writeln!(out, "alpha = {}, c_tilde = {}, c = {}", p.alpha(), p.c_tilde(), p.c())?;
    writeln!(out, "state rho_n = {}, rho_s = {}, u_n = {}, u_s = {}", u.rho_n, u.rho_s, u.u_n, u.u_s)?;
    writeln!(out, "cond1 (u_n - u_s)^2 < c rho_n^(2/3): {}", cond.cond1)?;
    writeln!(out, "cond2 (u_n - u_s)^2 < c alpha rho_s rho_n^(2/3) / (2 a_n): {}", cond.cond2)?;
    writeln!(out, "cond3 rho_n <= (c / 2 alpha)^3: {}", cond.cond3)?;
    writeln!(out, "certified: {}", spec.certified)?;
    for (k, &l) in spec.lambdas.iter().enumerate() {
        write!(out, "lambda_{} = {l}", k + 1)?;
        if let Some(b) = spec.brackets {
            write!(out, "  bracket [{}, {}]", b[k].0, b[k].1)?;
        }
        if spec.certified {
            match genuine_nonlinearity(l, &u, &p) {
                Ok(g) => write!(out, "  grad.r = {}  sign_condition = {}", g.value, g.sign_condition)?,
                Err(e) => write!(out, "  grad.r unavailable ({e})")?,
            }
        }
        writeln!(out)?;
    }
    if spec.certified {
        let il = interlacing(&spec.lambdas, &u, &p);
        writeln!(
            out,
            "interlacing about u_s: {}, about u_n: {}, about (u_n + u_s)/2: {}",
            il.about_superfluid, il.about_normal, il.about_midpoint
        )?;
    }
    Ok(if spec.certified { 0 } else { 1 })
}

fn rh_failure(e: RhError) -> CliError {
    match e {
        RhError::NonpositiveDensity { .. } | RhError::InvalidRequest | RhError::NoShockBranch { .. } => usage(e),
        other => CliError::Solver(other.to_string()),
    }
}

pub fn shock(a: &ShockArgs, out: &mut impl Write) -> Result<u8, CliError> {
    let p = params(&a.params)?;
    let u = state(&a.state)?;
    let sigma0 = match (a.sigma0, a.family) {
        (Some(s), None) => s,
        (None, Some(k)) => eigenvalues(&u, &p).lambdas[usize::from(k) - 1],
        _ => return Err(usage("give exactly one of --sigma0 and --family")),
    };
    if !(a.kick > 0.0) {
        return Err(usage("--kick must be positive"));
    }
    let opts = TraceOptions { kick: a.kick, ..TraceOptions::default() };
    let trace = |d| trace_shock_curve(&u, sigma0, a.span, a.steps, d, &p, &opts).map_err(rh_failure);
    let mut halves: Vec<ShockCurve> = Vec::new();
    if a.direction != DirectionArg::Increasing {
        halves.push(trace(Direction::DecreasingSigma)?);
    }
    if a.direction != DirectionArg::Decreasing {
        halves.push(trace(Direction::IncreasingSigma)?);
    }
    let mut text = String::from(output::SHOCK_HEADER);
    text.push('\n');
    // Ascending sigma: the decreasing half reversed, then the increasing
    // half without its repeated seed.
    let mut rows = Vec::new();
    for c in &halves {
        let pts: Vec<_> = match c.direction {
            Direction::DecreasingSigma => c.points.iter().rev().collect(),
            Direction::IncreasingSigma => c.points.iter().skip(usize::from(!rows.is_empty())).collect(),
        };
        rows.extend(pts.into_iter().map(|pt| output::shock_row(pt, &u, &p)));
        log::info!("family {} {:?}: {} points", c.family, c.direction, c.points.len());
        if let Some(t) = c.truncated {
            eprintln!("twofluid: {:?} half stopped early: {t:?}", c.direction);
        }
    }
    for r in rows {
        text.push_str(&r);
        text.push('\n');
    }
    match &a.output {
        Some(path) => {
            write_file(path, &text)?;
            if a.gnuplot {
                write_file(&path.with_extension("gp"), &output::shock_gnuplot(path))?;
            }
        }
        None => out.write_all(text.as_bytes())?,
    }
    Ok(0)
}

fn config_error(path: &Path, e: ConfigError) -> CliError {
    CliError::BadInput { path: path.to_path_buf(), msg: e.to_string() }
}

pub fn simulate(a: &SimulateArgs, out: &mut impl Write) -> Result<u8, CliError> {
    let source = a.config.clone().unwrap_or_else(|| "<command line>".into());
    let mut map = match &a.config {
        Some(path) => {
            let text = std::fs::read_to_string(path)
                .map_err(|source| CliError::Read { path: path.clone(), source })?;
            ConfigMap::parse(&text).map_err(|e| config_error(path, e))?
        }
        None => ConfigMap::default(),
    };
    for kv in &a.overrides {
        let (k, v) = kv.split_once('=').ok_or_else(|| usage(format!("--set expects KEY=VALUE, got `{kv}`")))?;
        map.set(k.trim(), v.trim()).map_err(usage)?;
    }
    let flags = [
        ("n_cells", a.n_cells.map(|v| v.to_string())),
        ("t_final", a.t_final.map(|v| v.to_string())),
        ("output_every", a.output_every.map(|v| v.to_string())),
    ];
    for (k, v) in flags {
        if let Some(v) = v {
            map.set(k, &v).map_err(usage)?;
        }
    }
    let e = map.experiment().map_err(|err| config_error(&source, err))?;

    std::fs::create_dir_all(&a.out).map_err(|source| CliError::Write { path: a.out.clone(), source })?;
    let centers = e.grid.centers();
    let mut sim = Simulation::riemann(e.solver, e.grid, &e.left, &e.right, e.params)
        .map_err(|err| CliError::Solver(err.to_string()))?;
    let mut monitors = String::from(output::MONITOR_HEADER);
    monitors.push('\n');
    let mut index = 0usize;
    let mut write_err = None;
    let mut last = None;
    let result = sim.run_with(|frame| {
        if write_err.is_some() {
            return;
        }
        let name = format!("frame_{index}.csv");
        if let Err(err) = write_file(&a.out.join(&name), &output::frame_csv(&frame, &centers, &e.params)) {
            write_err = Some(err);
        }
        monitors.push_str(&output::monitor_row(&frame));
        monitors.push('\n');
        index += 1;
        last = Some((name, frame));
    });
    if let Some(err) = write_err {
        return Err(err);
    }
    write_file(&a.out.join("monitors.csv"), &monitors)?;
    if let Err(err) = result {
        return Err(CliError::Solver(err.to_string()));
    }
    let (name, frame) = last.expect("run emits the initial frame");
    if a.gnuplot {
        write_file(&a.out.join("frames.gp"), &output::frames_gnuplot(&name))?;
    }
    let rho: Vec<f64> = frame.primitive.iter().map(|u| u.rho_n).collect();
    let n = e.grid.n_cells();
    let plateaus = count_plateaus(&rho, e.grid.dx(), twofluid::fvm::DEFAULT_SLOPE_TOL, default_min_width(n));
    writeln!(out, "frames: {index}")?;
    writeln!(out, "t: {}", frame.t)?;
    writeln!(out, "steps: {}", frame.step)?;
    writeln!(out, "rho_n plateaus: {plateaus}")?;
    Ok(0)
}

pub fn waves(a: &WavesArgs, out: &mut impl Write) -> Result<u8, CliError> {
    let text =
        std::fs::read_to_string(&a.frame).map_err(|source| CliError::Read { path: a.frame.clone(), source })?;
    let bad = |msg: String| CliError::BadInput { path: a.frame.clone(), msg };
    let mut lines = text.lines().filter(|l| !l.trim().is_empty());
    let header: Vec<&str> = lines.next().ok_or_else(|| bad("empty file".into()))?.split(',').map(str::trim).collect();
    let x_col = header.iter().position(|&h| h == "x").ok_or_else(|| bad("no `x` column".into()))?;
    let mut columns = vec![Vec::new(); header.len()];
    for (i, line) in lines.enumerate() {
        let fields: Vec<&str> = line.split(',').collect();
        if fields.len() != header.len() {
            return Err(bad(format!("row {} has {} fields, expected {}", i + 2, fields.len(), header.len())));
        }
        for (col, f) in columns.iter_mut().zip(fields) {
            col.push(f.trim().parse::<f64>().map_err(|_| bad(format!("row {}: cannot parse `{f}`", i + 2)))?);
        }
    }
    let n = columns[x_col].len();
    if n == 0 {
        return Err(bad("no data rows".into()));
    }
    let dx = if n > 1 { (columns[x_col][n - 1] - columns[x_col][0]) / (n - 1) as f64 } else { 1.0 };
    let min_width = a.min_width.unwrap_or_else(|| default_min_width(n));
    writeln!(out, "field,plateaus")?;
    for (h, col) in header.iter().zip(&columns) {
        if *h != "x" {
            writeln!(out, "{h},{}", count_plateaus(col, dx, a.slope_tol, min_width))?;
        }
    }
    Ok(0)
}
