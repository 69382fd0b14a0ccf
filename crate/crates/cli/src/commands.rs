use std::fmt::Write as _;
use std::fs;
use std::io::BufWriter;
use std::path::{Path, PathBuf};
use std::time::Instant;

use fracsub::coeff::Fn3;
use fracsub::kernels::{kernel_profile, KernelSpec};
use fracsub::mms::{
    convergence_study, gimel_of, level_errors, run_case, solve_case, Axis, CaseGrid, CaseSolution, ExampleCase,
    ExampleId,
};
use fracsub::solver1d::{self, fmt_g17, validate_compatibility, Grid1D, SolutionHistory};
use fracsub::solver2d::{self, Grid2D, SolutionHistory2D};
use rayon::prelude::*;
use serde::Serialize;

use crate::config::{BuiltProblem, GridSection, ResolvedGrid, RunConfig};
use crate::output::{out_dir, sha256_hex, to_table, Manifest};
use crate::{AxisArg, CliError, ConvergenceArgs, GridArgs, KernelSignArgs, Nu2Rule, SolveArgs, SweepArgs, TableArgs};

const EXT_COLUMNS: [(f64, f64); 4] = [(0.5, 0.1), (0.5, 0.7), (2.2, 0.1), (2.2, 0.7)];

enum Selection {
    Case(ExampleId),
    Extension,
}

fn parse_example(s: &str) -> Result<Selection, CliError> {
    if s.eq_ignore_ascii_case("ex1ext") {
        return Ok(Selection::Extension);
    }
    ExampleId::parse(s)
        .map(Selection::Case)
        .ok_or_else(|| CliError::Config(format!("unknown example `{s}` (ex1i, ex1ii, ex1ext, ex2, ex3, ex4)")))
}

fn single_case(s: &str) -> Result<ExampleId, CliError> {
    match parse_example(s)? {
        Selection::Case(id) => Ok(id),
        Selection::Extension => Err(CliError::Config(
            "ex1ext has four columns; use `table ex1ext`".into(),
        )),
    }
}

fn published_nu1(sel: &Selection) -> Vec<f64> {
    match sel {
        Selection::Extension => vec![0.6, 0.7, 0.8, 0.9],
        Selection::Case(ExampleId::Ex2) => (0..9).map(|i| (15 + 10 * i) as f64 / 100.0).collect(),
        Selection::Case(_) => (1..=9).map(|i| i as f64 / 10.0).collect(),
    }
}

fn nu2_for(id: ExampleId, nu1: f64, rule: Option<Nu2Rule>) -> f64 {
    match rule {
        Some(r) => r.apply(nu1),
        None => nu1 / id.nu2_divisor(),
    }
}

fn make_case(id: ExampleId, nu1: f64, rule: Option<Nu2Rule>) -> Result<ExampleCase, CliError> {
    ExampleCase::with_orders(id, nu1, nu2_for(id, nu1, rule)).map_err(|e| CliError::Config(e.to_string()))
}

fn case_grid(id: ExampleId, g: &GridArgs) -> CaseGrid {
    match CaseGrid::default_for(id) {
        CaseGrid::OneD { intervals, levels } => CaseGrid::OneD {
            intervals: g.k.unwrap_or(intervals),
            levels: g.j.unwrap_or(levels),
        },
        CaseGrid::TwoD { kx, ky, levels } => CaseGrid::TwoD {
            kx: g.kx.or(g.k).unwrap_or(kx),
            ky: g.ky.or(g.k).unwrap_or(ky),
            levels: g.j.unwrap_or(levels),
        },
    }
}

fn grid_section(g: CaseGrid) -> GridSection {
    match g {
        CaseGrid::OneD { intervals, levels } => GridSection {
            k: Some(intervals),
            j: Some(levels),
            ..GridSection::default()
        },
        CaseGrid::TwoD { kx, ky, levels } => GridSection {
            kx: Some(kx),
            ky: Some(ky),
            j: Some(levels),
            ..GridSection::default()
        },
    }
}

fn resolved_to_case(g: ResolvedGrid) -> CaseGrid {
    match g {
        ResolvedGrid::OneD { intervals, levels } => CaseGrid::OneD { intervals, levels },
        ResolvedGrid::TwoD { kx, ky, levels } => CaseGrid::TwoD { kx, ky, levels },
    }
}

fn apply_grid_overrides(cfg: &mut RunConfig, g: &GridArgs) {
    if g.k.is_some() {
        cfg.grid.k = g.k;
    }
    if g.kx.is_some() {
        cfg.grid.kx = g.kx;
    }
    if g.ky.is_some() {
        cfg.grid.ky = g.ky;
    }
    if g.j.is_some() {
        cfg.grid.j = g.j;
    }
}

fn read_config(path: &Path) -> Result<(RunConfig, String), CliError> {
    let text = fs::read_to_string(path).map_err(|e| CliError::Config(format!("{}: {e}", path.display())))?;
    let cfg = RunConfig::from_toml(&text).map_err(|e| CliError::Config(format!("{}: {e}", path.display())))?;
    Ok((cfg, sha256_hex(text.as_bytes())))
}

fn create(path: &Path) -> Result<BufWriter<fs::File>, CliError> {
    fs::File::create(path)
        .map(BufWriter::new)
        .map_err(|e| CliError::Io(format!("{}: {e}", path.display())))
}

fn write_text(path: &Path, text: &str) -> Result<(), CliError> {
    fs::write(path, text).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))
}

fn display(path: &Path) -> String {
    path.display().to_string()
}

fn pool(jobs: usize) -> Result<rayon::ThreadPool, CliError> {
    if jobs == 0 {
        return Err(CliError::Config("--jobs must be at least 1".into()));
    }
    rayon::ThreadPoolBuilder::new()
        .num_threads(jobs)
        .build()
        .map_err(|e| CliError::Io(e.to_string()))
}

/// Writes the solution lattice: one CSV for 1D, one CSV per level in a
/// directory for 2D. Returns the written paths.
fn write_solution(dir: &Path, name: &str, solution: &CaseSolution) -> Result<Vec<String>, CliError> {
    match solution {
        CaseSolution::OneD(hist) => {
            let path = dir.join(format!("{name}.csv"));
            hist.write_csv(create(&path)?)?;
            Ok(vec![display(&path)])
        }
        CaseSolution::TwoD(hist) => {
            let sub = dir.join(name);
            fs::create_dir_all(&sub)?;
            let mut written = Vec::new();
            for j in 0..=hist.newest() {
                let path = sub.join(format!("level_{j:05}.csv"));
                hist.write_level_csv(j, create(&path)?)?;
                written.push(display(&path));
            }
            Ok(written)
        }
    }
}

#[derive(Serialize)]
struct ExampleParams {
    example: String,
    nu1: f64,
    nu2: f64,
    richardson: bool,
    grid: GridSection,
}

pub fn solve(a: &SolveArgs) -> Result<(), CliError> {
    match (&a.config, &a.example) {
        (Some(path), _) => solve_config(a, path),
        (None, Some(ex)) => solve_example(a, ex),
        (None, None) => Err(CliError::Config("either --config or --example is required".into())),
    }
}

fn solve_example(a: &SolveArgs, ex: &str) -> Result<(), CliError> {
    let id = single_case(ex)?;
    let nu1 = a.nu1.ok_or_else(|| CliError::Config("--example needs --nu1".into()))?;
    let case = make_case(id, nu1, a.nu2_rule)?;
    let grid = case_grid(id, &a.grid);
    let richardson = a.richardson.map_or(true, |r| r.enabled());
    let params = ExampleParams {
        example: id.to_string(),
        nu1,
        nu2: case.nu2,
        richardson,
        grid: grid_section(grid),
    };
    let name = format!("{id}_nu1_{nu1}");
    let mut manifest = Manifest::new("solve", to_table(&params));
    if a.dry_run {
        println!("{}", toml::to_string(&params).expect("parameters serialize").trim_end());
        if !id.is_2d() {
            let p = case.problem1d().map_err(|e| CliError::Config(e.to_string()))?;
            report_compatibility(&p);
        }
        return Ok(());
    }
    let started = Instant::now();
    let solution = solve_case(&case, grid, richardson).map_err(CliError::numerical)?;
    let gimel = gimel_of(&level_errors(&case, &solution));
    manifest.seconds = started.elapsed().as_secs_f64();
    let dir = out_dir(a.out.out.as_deref())?;
    manifest.outputs = write_solution(&dir, &name, &solution)?;
    manifest.results.insert("gimel".into(), gimel.into());
    let mpath = dir.join(format!("{name}.manifest.toml"));
    manifest.write(&mpath)?;
    println!("gimel = {}", fmt_g17(gimel));
    println!("wrote {} ({} file(s)) and {}", manifest.outputs[0], manifest.outputs.len(), mpath.display());
    Ok(())
}

fn report_compatibility(p: &solver1d::Problem1D) {
    let diags = validate_compatibility(p);
    if diags.is_empty() {
        println!("compatibility: ok");
    }
    for d in diags {
        println!("compatibility: {:?} end, {}: residual {}", d.side, d.condition, fmt_g17(d.residual));
    }
}

fn config_with_overrides(a: &SolveArgs, path: &Path) -> Result<(RunConfig, String), CliError> {
    let (mut cfg, file_hash) = read_config(path)?;
    if let Some(nu1) = a.nu1 {
        cfg.problem.nu1 = nu1;
    }
    if let Some(rule) = a.nu2_rule {
        cfg.problem.nu2 = rule.apply(cfg.problem.nu1);
    }
    if let Some(r) = a.richardson {
        cfg.solver.richardson = r.enabled();
    }
    apply_grid_overrides(&mut cfg, &a.grid);
    Ok((cfg, file_hash))
}

/// Solves a configured problem; returns the solution and, when the config
/// has an exact solution, the error.
fn run_config(cfg: &RunConfig) -> Result<(CaseSolution, Option<f64>), CliError> {
    let built = cfg.build()?;
    let richardson = cfg.solver.richardson;
    let (solution, per_level) = match (built.problem, built.grid) {
        (BuiltProblem::OneD(p), ResolvedGrid::OneD { intervals, levels }) => {
            let g = Grid1D::for_problem(&p, intervals, levels).map_err(|e| CliError::Config(e.to_string()))?;
            let hist = solver1d::solve(&p, &g, richardson).map_err(CliError::numerical)?;
            let errs = built.exact.as_ref().map(|u| errors_1d(&hist, u));
            (CaseSolution::OneD(hist), errs)
        }
        (BuiltProblem::TwoD(p), ResolvedGrid::TwoD { kx, ky, levels }) => {
            let g = Grid2D::for_problem(&p, kx, ky, levels).map_err(|e| CliError::Config(e.to_string()))?;
            let hist = solver2d::solve_2d(&p, &g, richardson).map_err(CliError::numerical)?;
            let errs = built.exact.as_ref().map(|u| errors_2d(&hist, u));
            (CaseSolution::TwoD(hist), errs)
        }
        _ => unreachable!("grid dimension follows the problem dimension"),
    };
    Ok((solution, per_level.map(|e| gimel_of(&e))))
}

fn errors_1d(hist: &SolutionHistory, exact: &Fn3) -> Vec<f64> {
    hist.levels()
        .iter()
        .zip(hist.times())
        .map(|(row, &t)| {
            row.iter()
                .zip(hist.nodes())
                .fold(0.0_f64, |m, (v, &x)| m.max((v - exact(x, 0.0, t)).abs()))
        })
        .collect()
}

fn errors_2d(hist: &SolutionHistory2D, exact: &Fn3) -> Vec<f64> {
    let g = hist.grid();
    (0..=hist.newest())
        .map(|j| {
            let t = g.t(j);
            let mut worst = 0.0_f64;
            for l in 0..=g.ky {
                for k in 0..=g.kx {
                    worst = worst.max((hist.value(j, k, l) - exact(g.x(k), g.y(l), t)).abs());
                }
            }
            worst
        })
        .collect()
}

fn solve_config(a: &SolveArgs, path: &Path) -> Result<(), CliError> {
    let (cfg, file_hash) = config_with_overrides(a, path)?;
    let built = cfg.build()?;
    if a.dry_run {
        println!("{}", cfg.to_toml().trim_end());
        match (&built.problem, built.grid) {
            (BuiltProblem::OneD(p), ResolvedGrid::OneD { intervals, levels }) => {
                println!("# resolved grid: K = {intervals}, J = {levels}");
                report_compatibility(p);
            }
            (_, ResolvedGrid::TwoD { kx, ky, levels }) => {
                println!("# resolved grid: Kx = {kx}, Ky = {ky}, J = {levels}");
            }
            _ => {}
        }
        return Ok(());
    }
    let started = Instant::now();
    let (solution, gimel) = run_config(&cfg)?;
    let mut manifest = Manifest::new("solve", to_table(&cfg));
    manifest.seconds = started.elapsed().as_secs_f64();
    manifest.config_file = Some(display(path));
    manifest.config_file_sha256 = Some(file_hash);
    let explicit: Option<PathBuf> = a.out.out.clone().or_else(|| cfg.solver.out.clone().map(PathBuf::from));
    let dir = out_dir(explicit.as_deref())?;
    let name = cfg.name();
    manifest.outputs = write_solution(&dir, &name, &solution)?;
    if let Some(g) = gimel {
        manifest.results.insert("gimel".into(), g.into());
        println!("gimel = {}", fmt_g17(g));
    }
    let mpath = dir.join(format!("{name}.manifest.toml"));
    manifest.write(&mpath)?;
    println!("wrote {} ({} file(s)) and {}", manifest.outputs[0], manifest.outputs.len(), mpath.display());
    Ok(())
}

struct Row {
    nu1: f64,
    nu2: f64,
    gimels: Vec<Option<f64>>,
    grid: CaseGrid,
    richardson: bool,
    seconds: f64,
}

fn table_csv(rows: &[Row], gimel_headers: &[String]) -> String {
    let two_d = rows.first().is_some_and(|r| matches!(r.grid, CaseGrid::TwoD { .. }));
    let mut s = String::from("nu1,nu2,");
    s += &gimel_headers.join(",");
    s += if two_d { ",Kx,Ky,J" } else { ",K,J" };
    s += ",richardson,seconds\n";
    for r in rows {
        let _ = write!(s, "{},{}", r.nu1, r.nu2);
        for g in &r.gimels {
            let _ = write!(s, ",{}", g.map(fmt_g17).unwrap_or_default());
        }
        let _ = match r.grid {
            CaseGrid::OneD { intervals, levels } => write!(s, ",{intervals},{levels}"),
            CaseGrid::TwoD { kx, ky, levels } => write!(s, ",{kx},{ky},{levels}"),
        };
        let _ = writeln!(s, ",{},{}", if r.richardson { "on" } else { "off" }, fmt_g17(r.seconds));
    }
    s
}

fn catalog_rows(
    sel: &Selection,
    nus: &[f64],
    rule: Option<Nu2Rule>,
    grid: &GridArgs,
    richardson: bool,
    jobs: usize,
) -> Result<Vec<Row>, CliError> {
    // Validate every row before starting any solve.
    let mut work: Vec<(f64, Vec<ExampleCase>)> = Vec::with_capacity(nus.len());
    for &nu1 in nus {
        let cases = match sel {
            Selection::Case(id) => vec![make_case(*id, nu1, rule)?],
            Selection::Extension => EXT_COLUMNS
                .iter()
                .map(|&(rho2, final_time)| make_case(ExampleId::Ex1Ext { rho2, final_time }, nu1, rule))
                .collect::<Result<_, _>>()?,
        };
        work.push((nu1, cases));
    }
    let id = match sel {
        Selection::Case(id) => *id,
        Selection::Extension => ExampleId::Ex1i,
    };
    let g = case_grid(id, grid);
    pool(jobs)?.install(|| {
        work.par_iter()
            .map(|(nu1, cases)| {
                let started = Instant::now();
                let gimels = cases
                    .iter()
                    .map(|c| run_case(c, g, richardson).map(|r| Some(r.gimel)))
                    .collect::<Result<Vec<_>, _>>()
                    .map_err(CliError::numerical)?;
                Ok(Row {
                    nu1: *nu1,
                    nu2: cases[0].nu2,
                    gimels,
                    grid: g,
                    richardson,
                    seconds: started.elapsed().as_secs_f64(),
                })
            })
            .collect()
    })
}

fn gimel_headers(sel: &Selection) -> Vec<String> {
    match sel {
        Selection::Case(_) => vec!["gimel".into()],
        Selection::Extension => EXT_COLUMNS
            .iter()
            .map(|(rho2, t)| format!("gimel_rho2_{rho2}_T_{t}"))
            .collect(),
    }
}

#[derive(Serialize)]
struct TableParams {
    example: String,
    nu1: Vec<f64>,
    nu2_rule: String,
    richardson: bool,
    grid: GridSection,
}

fn rule_name(rule: Option<Nu2Rule>) -> String {
    match rule {
        Some(Nu2Rule::Half) => "half".into(),
        Some(Nu2Rule::Third) => "third".into(),
        None => "published".into(),
    }
}

fn finish_table(
    command: &str,
    stem: &str,
    out: Option<&Path>,
    csv: &str,
    params: toml::Table,
    started: Instant,
    extra: Option<(String, String)>,
) -> Result<(), CliError> {
    let dir = out_dir(out)?;
    let path = dir.join(format!("{stem}.csv"));
    write_text(&path, csv)?;
    let mut manifest = Manifest::new(command, params);
    if let Some((file, hash)) = extra {
        manifest.config_file = Some(file);
        manifest.config_file_sha256 = Some(hash);
    }
    manifest.seconds = started.elapsed().as_secs_f64();
    manifest.outputs = vec![display(&path)];
    let mpath = dir.join(format!("{stem}.manifest.toml"));
    manifest.write(&mpath)?;
    print!("{csv}");
    eprintln!("wrote {} and {}", path.display(), mpath.display());
    Ok(())
}

pub fn table(a: &TableArgs) -> Result<(), CliError> {
    let sel = parse_example(&a.example)?;
    let nus = a.nu1.clone().unwrap_or_else(|| published_nu1(&sel));
    let started = Instant::now();
    let richardson = a.richardson.enabled();
    let rows = catalog_rows(&sel, &nus, a.nu2_rule, &a.grid, richardson, a.jobs)?;
    let csv = table_csv(&rows, &gimel_headers(&sel));
    let stem = format!("table_{}", a.example.to_ascii_lowercase());
    let params = TableParams {
        example: a.example.to_ascii_lowercase(),
        nu1: nus,
        nu2_rule: rule_name(a.nu2_rule),
        richardson,
        grid: grid_section(rows[0].grid),
    };
    finish_table("table", &stem, a.out.out.as_deref(), &csv, to_table(&params), started, None)
}

pub fn sweep(a: &SweepArgs) -> Result<(), CliError> {
    if a.nu1.is_empty() {
        return Err(CliError::Config("--nu1 needs at least one value".into()));
    }
    let started = Instant::now();
    if let Some(ex) = &a.example {
        let sel = Selection::Case(single_case(ex)?);
        let richardson = a.richardson.map_or(true, |r| r.enabled());
        let rows = catalog_rows(&sel, &a.nu1, a.nu2_rule, &a.grid, richardson, a.jobs)?;
        let csv = table_csv(&rows, &gimel_headers(&sel));
        let params = TableParams {
            example: ex.to_ascii_lowercase(),
            nu1: a.nu1.clone(),
            nu2_rule: rule_name(a.nu2_rule),
            richardson,
            grid: grid_section(rows[0].grid),
        };
        let stem = format!("sweep_{}", ex.to_ascii_lowercase());
        return finish_table("sweep", &stem, a.out.out.as_deref(), &csv, to_table(&params), started, None);
    }
    let path = a.config.as_ref().expect("clap requires --config without --example");
    let (mut base, file_hash) = read_config(path)?;
    if let Some(r) = a.richardson {
        base.solver.richardson = r.enabled();
    }
    apply_grid_overrides(&mut base, &a.grid);
    let configs: Vec<RunConfig> = a
        .nu1
        .iter()
        .map(|&nu1| {
            let mut c = base.clone();
            c.problem.nu1 = nu1;
            if let Some(rule) = a.nu2_rule {
                c.problem.nu2 = rule.apply(nu1);
            }
            c.build().map(|_| c)
        })
        .collect::<Result<_, _>>()?;
    let grid = resolved_to_case(base.resolved_grid());
    let rows: Vec<Row> = pool(a.jobs)?.install(|| {
        configs
            .par_iter()
            .map(|c| {
                let t0 = Instant::now();
                let (_, gimel) = run_config(c)?;
                Ok(Row {
                    nu1: c.problem.nu1,
                    nu2: c.problem.nu2,
                    gimels: vec![gimel],
                    grid,
                    richardson: c.solver.richardson,
                    seconds: t0.elapsed().as_secs_f64(),
                })
            })
            .collect::<Result<_, CliError>>()
    })?;
    let csv = table_csv(&rows, &["gimel".to_string()]);
    let mut params = to_table(&base);
    params.insert(
        "sweep_nu1".into(),
        toml::Value::Array(a.nu1.iter().map(|&v| v.into()).collect()),
    );
    params.insert("sweep_nu2_rule".into(), rule_name(a.nu2_rule).into());
    let stem = format!("sweep_{}", base.name());
    let out: Option<PathBuf> = a.out.out.clone().or_else(|| base.solver.out.clone().map(PathBuf::from));
    finish_table(
        "sweep",
        &stem,
        out.as_deref(),
        &csv,
        params,
        started,
        Some((display(path), file_hash)),
    )
}

#[derive(Serialize)]
struct ConvergenceParams {
    example: String,
    nu1: f64,
    nu2: f64,
    axis: String,
    grids: usize,
    richardson: bool,
    base_grid: GridSection,
}

pub fn convergence(a: &ConvergenceArgs) -> Result<(), CliError> {
    let id = single_case(&a.example)?;
    if a.levels < 2 {
        return Err(CliError::Config(format!(
            "--levels must be at least 2 to estimate an order, got {}",
            a.levels
        )));
    }
    let case = make_case(id, a.nu1, a.nu2_rule)?;
    let base = case_grid(id, &a.grid);
    let (axis, axis_name) = match a.axis {
        AxisArg::Time => (Axis::Time, "time"),
        AxisArg::Space => (Axis::Space, "space"),
    };
    let started = Instant::now();
    let richardson = a.richardson.enabled();
    let rows = convergence_study(&case, base, a.levels, axis, richardson).map_err(CliError::numerical)?;
    let final_time = case.final_time();
    let mut csv = String::new();
    csv += if id.is_2d() {
        "refinement,Kx,Ky,J,step,gimel,order\n"
    } else {
        "refinement,K,J,step,gimel,order\n"
    };
    for (i, r) in rows.iter().enumerate() {
        let (dims, step) = match (r.grid, axis) {
            (CaseGrid::OneD { intervals, levels }, Axis::Time) => {
                (format!("{intervals},{levels}"), final_time / levels as f64)
            }
            (CaseGrid::OneD { intervals, levels }, Axis::Space) => (format!("{intervals},{levels}"), 1.0 / intervals as f64),
            (CaseGrid::TwoD { kx, ky, levels }, Axis::Time) => (format!("{kx},{ky},{levels}"), final_time / levels as f64),
            (CaseGrid::TwoD { kx, ky, levels }, Axis::Space) => (format!("{kx},{ky},{levels}"), 1.0 / kx as f64),
        };
        let order = r.order.map(fmt_g17).unwrap_or_default();
        let _ = writeln!(csv, "{i},{dims},{},{},{order}", fmt_g17(step), fmt_g17(r.gimel));
    }
    let params = ConvergenceParams {
        example: id.to_string(),
        nu1: case.nu1,
        nu2: case.nu2,
        axis: axis_name.into(),
        grids: a.levels,
        richardson,
        base_grid: grid_section(base),
    };
    let stem = format!("convergence_{id}_{axis_name}");
    finish_table("convergence", &stem, a.out.out.as_deref(), &csv, to_table(&params), started, None)
}

#[derive(Serialize)]
struct KernelParams {
    rho1: f64,
    rho2: f64,
    nu1: f64,
    nu2: f64,
    final_time: f64,
    samples: usize,
}

pub fn kernel_sign(a: &KernelSignArgs) -> Result<(), CliError> {
    let spec = KernelSpec::new(a.rho1, a.rho2, a.nu1, a.nu2).map_err(|e| CliError::Config(e.to_string()))?;
    if a.samples < 2 {
        return Err(CliError::Config(format!("--samples must be at least 2, got {}", a.samples)));
    }
    if !(a.final_time > 0.0 && a.final_time.is_finite()) {
        return Err(CliError::Config(format!("--T must be positive, got {}", a.final_time)));
    }
    let started = Instant::now();
    let profile = kernel_profile(&spec, a.final_time, a.samples).map_err(CliError::numerical)?;
    let dir = out_dir(a.out.out.as_deref())?;
    let path = dir.join("kernel_sign.csv");
    profile.write_csv(create(&path)?)?;
    let params = KernelParams {
        rho1: a.rho1,
        rho2: a.rho2,
        nu1: a.nu1,
        nu2: a.nu2,
        final_time: a.final_time,
        samples: a.samples,
    };
    let mut manifest = Manifest::new("kernel-sign", to_table(&params));
    manifest.seconds = started.elapsed().as_secs_f64();
    manifest.outputs = vec![display(&path)];
    match profile.sign_change {
        Some(ts) => {
            manifest.results.insert("t_star".into(), ts.into());
            let place = if ts <= a.final_time { "inside" } else { "outside" };
            println!("t* = {} ({place} (0, T])", fmt_g17(ts));
        }
        None => println!("t* absent: N does not change sign"),
    }
    let mpath = dir.join("kernel_sign.manifest.toml");
    manifest.write(&mpath)?;
    eprintln!("wrote {} and {}", path.display(), mpath.display());
    Ok(())
}
