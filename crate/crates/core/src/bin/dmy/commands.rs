use std::io::{self, Write};
use std::path::Path;

use serde::Serialize;
use serde_json::json;

use dmy_core::counterexample::{build_f, run_pipeline, CounterexampleConfig, PhiProfile};
use dmy_core::dynamics::{
    basin_raster, dissipativity_bound, find_periodic, ray_samples, verify_invariant_ray,
    DissipativityConfig, NewtonConfig, OmegaConfig, CODE_ESCAPING, CODE_ORIGIN, CODE_PERIODIC,
    CODE_UNDECIDED,
};
use dmy_core::map::iterate_with_escape;
use dmy_core::output::{emit_csv, emit_json, emit_pgm, format_float, json_string, CsvTable};
use dmy_core::sampling::{log_space, parse_grid_dims, Region, Sampling};
use dmy_core::spectral::{
    check_ball, check_interval_free, check_real_free, spectrum_over, SpectrumReport, Verdict,
};
use dmy_core::{DmyError, Mat2, PlanarMap, Point2, Result};

use crate::args::*;
use crate::{EXIT_FAIL, EXIT_IO, EXIT_PASS, EXIT_USAGE};

pub fn run(command: Command) -> u8 {
    let outcome = match command {
        Command::Spectrum(a) => spectrum(&a),
        Command::Orbit(a) => orbit(&a),
        Command::Periodic(a) => periodic(&a),
        Command::Basin(a) => basin(&a),
        Command::Counterexample(a) => counterexample(&a),
        Command::Phi(a) => phi(&a),
        Command::Ray(a) => ray(&a),
        Command::Dissipativity(a) => dissipativity(&a),
    };
    match outcome {
        Ok(true) => EXIT_PASS,
        Ok(false) => EXIT_FAIL,
        Err(e) => {
            eprintln!("dmy: {e}");
            exit_code(&e)
        }
    }
}

fn exit_code(e: &DmyError) -> u8 {
    match e {
        DmyError::InvalidParameter(_) | DmyError::Input(_) | DmyError::NonFiniteInput { .. } => {
            EXIT_USAGE
        }
        DmyError::Io(_) | DmyError::Json(_) => EXIT_IO,
        _ => EXIT_FAIL,
    }
}

fn input(msg: impl Into<String>) -> DmyError {
    DmyError::Input(msg.into())
}

fn parse_floats(s: &str, n: usize, what: &str) -> Result<Vec<f64>> {
    let v: Vec<f64> = s
        .split(',')
        .map(|t| t.trim().parse::<f64>())
        .collect::<std::result::Result<_, _>>()
        .map_err(|_| input(format!("{what}: cannot parse '{s}'")))?;
    if v.len() != n {
        return Err(input(format!(
            "{what}: expected {n} comma-separated numbers, got '{s}'"
        )));
    }
    Ok(v)
}

fn parse_point(s: &str, what: &str) -> Result<Point2> {
    let v = parse_floats(s, 2, what)?;
    Point2::try_new(v[0], v[1])
}

fn build_map(m: &MapArgs) -> Result<PlanarMap> {
    match m.map {
        MapKind::Linear => {
            let v = parse_floats(&m.matrix, 4, "--matrix")?;
            PlanarMap::linear(Mat2::new(v[0], v[1], v[2], v[3]))
        }
        MapKind::Szlenk => PlanarMap::szlenk(m.k),
        MapKind::Ga => PlanarMap::ga(m.k, m.a),
        MapKind::Counterexample => {
            Ok(build_f(m.k, m.a, m.eps, &CounterexampleConfig::default())?.f)
        }
    }
}

/// Writes `{tool, version, command, config, result, passed}` to `out` or stdout.
fn report<C: Serialize, R: Serialize>(
    command: &str,
    config: &C,
    result: &R,
    passed: bool,
    out: Option<&Path>,
) -> Result<()> {
    let envelope = json!({
        "tool": "dmy",
        "version": env!("CARGO_PKG_VERSION"),
        "command": command,
        "config": serde_json::to_value(config)?,
        "result": serde_json::to_value(result)?,
        "passed": passed,
    });
    match out {
        Some(path) => emit_json(&envelope, path),
        None => print_stdout(json_string(&envelope)?.as_bytes()),
    }
}

fn print_stdout(bytes: &[u8]) -> Result<()> {
    let mut stdout = io::stdout().lock();
    stdout.write_all(bytes)?;
    stdout.flush()?;
    Ok(())
}

fn write_csv(table: &CsvTable, out: Option<&Path>) -> Result<()> {
    match out {
        Some(path) => emit_csv(table, path),
        None => print_stdout(&table.to_bytes()?),
    }
}

fn parse_check(spec: &str, report: &SpectrumReport) -> Result<Verdict> {
    let parts: Vec<&str> = spec.split(':').collect();
    let num = |s: &str| {
        s.trim()
            .parse::<f64>()
            .map_err(|_| input(format!("--check: bad number '{s}' in '{spec}'")))
    };
    match parts.as_slice() {
        ["ball", r] => Ok(check_ball(report, num(r)?)),
        ["interval", lo, hi] => Ok(check_interval_free(report, num(lo)?, num(hi)?)),
        ["real-free"] => Ok(check_real_free(report)),
        _ => Err(input(format!(
            "--check must be ball:R, interval:LO:HI or real-free, got '{spec}'"
        ))),
    }
}

fn spectrum(args: &SpectrumArgs) -> Result<bool> {
    let map = build_map(&args.map)?;
    let region: Region = args.region.parse()?;
    let sampling = match args.random {
        Some(n) => Sampling::random(region, n, args.rng_seed),
        None => {
            let (nx, ny) = parse_grid_dims(&args.grid)?;
            Sampling::grid(region, nx, ny)
        }
    };
    let mut rep = spectrum_over(&map, &sampling)?;
    let verdicts = args
        .check
        .iter()
        .map(|c| parse_check(c, &rep))
        .collect::<Result<Vec<_>>>()?;
    rep.checks = verdicts;
    let passed = rep.flagged == 0 && rep.checks.iter().all(|v| v.passed);
    for v in rep.checks.iter().filter(|v| !v.passed) {
        eprintln!("dmy: check {} failed: {}", v.check, v.detail);
    }
    report("spectrum", args, &rep, passed, args.out.as_deref())?;
    Ok(passed)
}

fn orbit(args: &OrbitArgs) -> Result<bool> {
    let map = build_map(&args.map)?;
    let seed = parse_point(&args.seed, "--seed")?;
    let orbit = iterate_with_escape(&map, seed, args.steps, args.escape_radius)?;
    let mut table = CsvTable::new(["step", "x", "y"]);
    for (i, p) in orbit.points.iter().enumerate() {
        table.push_row(vec![i.to_string(), format_float(p.x), format_float(p.y)]);
    }
    write_csv(&table, args.out.as_deref())?;
    if orbit.escaped {
        eprintln!(
            "dmy: orbit left the {}-ball after {} steps",
            args.escape_radius,
            orbit.points.len() - 1
        );
    }
    Ok(true)
}

fn periodic(args: &PeriodicArgs) -> Result<bool> {
    let map = build_map(&args.map)?;
    let seed = parse_point(&args.seed, "--seed")?;
    let cfg = NewtonConfig {
        tol: args.tol,
        max_steps: args.max_steps,
    };
    let orbit = find_periodic(&map, args.period, seed, &cfg)?;
    let result = json!({
        "orbit": orbit,
        "distance_from_unit_circle": orbit.distance_from_unit_circle(),
    });
    report("periodic", args, &result, true, args.out.as_deref())?;
    Ok(true)
}

fn omega_config(o: &OmegaArgs) -> OmegaConfig {
    OmegaConfig {
        max_iterations: o.max_iterations,
        origin_tol: o.origin_tol,
        escape_radius: o.escape_radius,
        window: o.window,
        cycle_rel_tol: o.cycle_tol,
    }
}

fn basin(args: &BasinArgs) -> Result<bool> {
    let map = build_map(&args.map)?;
    let dims = parse_grid_dims(&args.resolution)?;
    let cfg = omega_config(&args.omega);
    let grid = basin_raster(&map, args.half_width, dims, &cfg)?;
    emit_pgm(&grid, &args.out)?;
    let counts = json!({
        "origin": grid.count(CODE_ORIGIN),
        "periodic": grid.count(CODE_PERIODIC),
        "escaping": grid.count(CODE_ESCAPING),
        "undecided": grid.count(CODE_UNDECIDED),
    });
    eprintln!(
        "dmy: wrote {} ({}x{}): {}",
        args.out.display(),
        grid.width,
        grid.height,
        counts
    );
    if let Some(path) = &args.summary {
        let result = json!({
            "pgm": args.out.display().to_string(),
            "width": grid.width,
            "height": grid.height,
            "counts": counts,
        });
        report("basin", args, &result, true, Some(path))?;
    }
    Ok(true)
}

fn counterexample(args: &CounterexampleArgs) -> Result<bool> {
    let cfg = CounterexampleConfig {
        sweep_radii: args.sweep_radii,
        sweep_angles: args.sweep_angles,
        phi_samples: args.phi_samples,
        ..CounterexampleConfig::default()
    };
    let outcome = run_pipeline(args.k, args.a, args.eps, &cfg)?;
    let rep = &outcome.report;
    for c in rep.checks.iter().filter(|c| !c.passed) {
        eprintln!("dmy: check {} failed: {}", c.name, c.detail);
    }
    let b = &outcome.bundle;
    let result = json!({
        "verification": rep,
        "a_attempts": outcome.a_attempts,
        "eps_halvings": b.eps_halvings,
        "ga_sr": b.ga_sr,
        "f_sr": b.f_sr,
        "sampling": cfg,
    });
    report(
        "counterexample",
        args,
        &result,
        rep.passed,
        args.out.as_deref(),
    )?;
    Ok(rep.passed)
}

fn phi(args: &PhiArgs) -> Result<bool> {
    let profile = PhiProfile::new(args.inner_radius, args.norm_bound, args.eps)?;
    if args.log_samples == 0 {
        return Err(input("--log-samples must be positive"));
    }
    let r_max = args.r_max.unwrap_or(10.0 * profile.tail_radius);
    if !(args.r_min > 0.0 && r_max > args.r_min && r_max.is_finite()) {
        return Err(input(format!(
            "need 0 < r-min < r-max, got {} and {r_max}",
            args.r_min
        )));
    }
    let bound = args.eps / 8.0;
    let mut table = CsvTable::new(["r", "phi", "phi_prime_times_r"]);
    let mut passed = true;
    let radii = std::iter::once(0.0).chain(log_space(args.r_min, r_max, args.log_samples));
    for r in radii {
        let d = profile.deriv_times_r(r);
        passed &= d.abs() <= bound;
        table.push_floats(&[r, profile.eval(r), d]);
    }
    write_csv(&table, args.out.as_deref())?;
    if !passed {
        eprintln!("dmy: |phi'(r)·r| exceeded eps/8 = {bound}");
    }
    Ok(passed)
}

fn ray(args: &RayArgs) -> Result<bool> {
    let map = build_map(&args.map)?;
    if args.samples == 0 || !(args.r_max > 0.0) {
        return Err(input("ray needs --samples > 0 and --r-max > 0"));
    }
    let samples = ray_samples(args.angle, args.r_max, args.samples);
    let verdict = verify_invariant_ray(&map, &samples, args.tol)?;
    report("ray", args, &verdict, verdict.passed, args.out.as_deref())?;
    Ok(verdict.passed)
}

fn dissipativity(args: &DissipativityArgs) -> Result<bool> {
    let (map, r) = if args.radius.trim() == "tail" {
        if args.map.map != MapKind::Counterexample {
            return Err(input("--R tail needs --map counterexample"));
        }
        let b = build_f(
            args.map.k,
            args.map.a,
            args.map.eps,
            &CounterexampleConfig::default(),
        )?;
        let r = b.profile.tail_radius;
        (b.f, r)
    } else {
        let r: f64 = args.radius.trim().parse().map_err(|_| {
            input(format!(
                "--R must be a number or 'tail', got '{}'",
                args.radius
            ))
        })?;
        (build_map(&args.map)?, r)
    };
    let bound = dissipativity_bound(&map, r, args.alpha, &DissipativityConfig::default())?;
    report(
        "dissipativity",
        args,
        &bound,
        bound.passed,
        args.out.as_deref(),
    )?;
    Ok(bound.passed)
}
