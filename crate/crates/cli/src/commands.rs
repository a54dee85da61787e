use std::path::{Path, PathBuf};

use nematic_core::field2d::{self, dirichlet_energy, el_residual_2d, ldg_energy_2d, lift};
use nematic_core::harmonic::{
    self, branch_field, dirichlet_energy_2d, e0_energy, explicit_profile, minus_uv, E0Value,
};
use nematic_core::io::{profile_to_csv, read_profile, residual_to_csv, to_json, write_atomic};
use nematic_core::qtensor::{ansatz, QTensor};
use nematic_core::reduced::{
    continuation_records, grad_norm, l2_distance, minimize, ode_residual, reduced_energy,
    BranchPoint, SolveReport,
};
use nematic_core::{Branch, Error, ModelParams, PolarGrid, Profile, RadialGrid};
use serde::Serialize;

use crate::config::{CommonArgs, RunConfig};
use crate::error::{CliError, CliResult};
use crate::render::{build_glyphs, chart_svg, field_svg, EigenChart, RenderSpec};
use crate::{Command, RenderArgs, ResidualArgs, SourceArgs, SweepArgs};

pub fn dispatch(cmd: &Command) -> CliResult<()> {
    match cmd {
        Command::Solve(a) => solve(&a.common),
        Command::Limit(a) => limit(&a.common),
        Command::Residual(a) => residual(a),
        Command::Render(a) => render(a),
        Command::Sweep(a) => sweep(a),
        Command::Energy(a) => energy(a),
    }
}

fn out_path(common: &CommonArgs, name: &str) -> CliResult<PathBuf> {
    std::fs::create_dir_all(&common.out_dir).map_err(|e| {
        CliError::Io(format!(
            "cannot create output directory {}: {e}",
            common.out_dir.display()
        ))
    })?;
    Ok(common.out_dir.join(name))
}

fn write(path: &Path, contents: &str) -> CliResult<()> {
    write_atomic(path, contents.as_bytes())?;
    println!("wrote {}", path.display());
    Ok(())
}

fn json<T: Serialize>(value: &T) -> CliResult<String> {
    let mut s = to_json(value)?;
    s.push('\n');
    Ok(s)
}

fn load_profile(path: &Path) -> CliResult<Profile> {
    match read_profile(path) {
        Ok(p) => Ok(p),
        Err(Error::Io(e)) => Err(CliError::Input(format!(
            "cannot read {}: {e}",
            path.display()
        ))),
        Err(e) => Err(CliError::Input(format!("{}: {e}", path.display()))),
    }
}

#[derive(Serialize)]
struct GridInfo {
    n: usize,
    m: usize,
    r_min_positive: f64,
}

impl GridInfo {
    fn new(g: &RadialGrid, m: usize) -> Self {
        GridInfo {
            n: g.intervals(),
            m,
            r_min_positive: g.r(1),
        }
    }
}

#[derive(Serialize)]
struct SolveOutput<'a> {
    #[serde(flatten)]
    report: &'a SolveReport,
    ode_residual_interior_max: f64,
    params: ModelParams,
    grid: GridInfo,
}

fn solve(common: &CommonArgs) -> CliResult<()> {
    let cfg = RunConfig::resolve(common)?;
    let params = cfg.finite_l_params("solve")?;
    let grid = cfg.radial_grid()?;
    let opts = cfg.solver_options(&grid)?;
    let (profile, report, failure) = match minimize(&params, &grid, &opts) {
        Ok((p, r)) => (p, r, None),
        Err(Error::NonConvergence(b)) => {
            let (p, r) = *b;
            let msg = format!("solver did not converge: {}", r.summary());
            (p, r, Some(msg))
        }
        Err(e) => return Err(e.into()),
    };
    let res = ode_residual(&profile, &params)?;
    let out = SolveOutput {
        report: &report,
        ode_residual_interior_max: res.interior_max(1),
        params,
        grid: GridInfo::new(&grid, cfg.m),
    };
    write(&out_path(common, "profile.csv")?, &profile_to_csv(&profile))?;
    write(&out_path(common, "report.json")?, &json(&out)?)?;
    match failure {
        Some(msg) => Err(CliError::Numeric(msg)),
        None => {
            println!("{}", report.summary());
            Ok(())
        }
    }
}

#[derive(Serialize)]
struct EnergyRow {
    branch: &'static str,
    closed_form: f64,
    quadrature: f64,
    relative_error: f64,
}

#[derive(Serialize)]
struct LimitOutput {
    params: ModelParams,
    grid: GridInfo,
    energies: Vec<EnergyRow>,
    notes: Vec<String>,
}

fn limit(common: &CommonArgs) -> CliResult<()> {
    let cfg = RunConfig::resolve(common)?;
    let params = cfg.params()?;
    params.require_b2_zero()?;
    let grid = cfg.radial_grid()?;
    let polar = PolarGrid::new(grid.clone(), cfg.m)?;
    let minus = explicit_profile(Branch::Minus, &params, &grid)?;
    let plus = explicit_profile(Branch::Plus, &params, &grid)?;
    write(&out_path(common, "minus.csv")?, &profile_to_csv(&minus))?;
    write(&out_path(common, "plus.csv")?, &profile_to_csv(&plus))?;

    let even = params.k % 2 == 0;
    let mut charts = vec![
        EigenChart::from_uv("minus", grid.nodes(), &minus.u, &minus.v),
        EigenChart::from_uv("plus", grid.nodes(), &plus.u, &plus.v),
    ];
    if even {
        charts.push(EigenChart::from_sampler(
            "uniaxial",
            grid.nodes(),
            branch_field(Branch::UniaxialEscape, &params)?,
        ));
    }
    write(&out_path(common, "eigenvalues.csv")?, &charts_csv(&charts))?;

    let mut energies = Vec::new();
    let mut notes = Vec::new();
    for b in [Branch::Minus, Branch::Plus, Branch::UniaxialEscape] {
        if b == Branch::UniaxialEscape && !even {
            notes.push(format!(
                "uniaxial row omitted: the escaped uniaxial solution needs even k, got k = {}",
                params.k
            ));
            continue;
        }
        let d = dirichlet_energy_2d(b, &params, &polar)?;
        energies.push(EnergyRow {
            branch: b.name(),
            closed_form: d.closed_form,
            quadrature: d.quadrature,
            relative_error: d.relative_error(),
        });
    }
    let out = LimitOutput {
        params,
        grid: GridInfo::new(&grid, cfg.m),
        energies,
        notes,
    };
    write(&out_path(common, "energies.json")?, &json(&out)?)?;
    Ok(())
}

fn charts_csv(charts: &[EigenChart]) -> String {
    use nematic_core::io::fmt_f64;
    let mut header = vec!["r".to_string()];
    for c in charts {
        for s in &c.series {
            header.push(format!("{}_{}", c.title, s.label));
        }
    }
    let mut out = header.join(",");
    out.push('\n');
    for i in 0..charts[0].r.len() {
        let mut row = vec![fmt_f64(charts[0].r[i])];
        for c in charts {
            for s in &c.series {
                row.push(fmt_f64(s.values[i]));
            }
        }
        out.push_str(&row.join(","));
        out.push('\n');
    }
    out
}

#[derive(Serialize)]
struct ResidualSummary {
    input: String,
    ode_interior_max: f64,
    neumann_defect: f64,
    el_max: f64,
    el_l2: f64,
    grad_norm: f64,
    energy: f64,
    params: ModelParams,
}

fn residual(args: &ResidualArgs) -> CliResult<()> {
    let cfg = RunConfig::resolve(&args.common)?;
    let params = cfg.finite_l_params("residual")?;
    let profile = load_profile(&args.input)?;
    check_radius(&profile, &params)?;
    let res = ode_residual(&profile, &params)?;
    let field = lift(
        &profile,
        params.k,
        &PolarGrid::new(profile.grid.clone(), cfg.m)?,
    )?;
    let el = el_residual_2d(&field, &params)?;
    let summary = ResidualSummary {
        input: args.input.display().to_string(),
        ode_interior_max: res.interior_max(1),
        neumann_defect: res.neumann_defect,
        el_max: el.max,
        el_l2: el.l2,
        grad_norm: grad_norm(&profile, &params)?,
        energy: reduced_energy(&profile, &params)?,
        params,
    };
    write(
        &out_path(&args.common, "residual.csv")?,
        &residual_to_csv(&profile.grid, &res),
    )?;
    let text = json(&summary)?;
    write(&out_path(&args.common, "residual.json")?, &text)?;
    Ok(())
}

fn check_radius(p: &Profile, params: &ModelParams) -> CliResult<()> {
    let r = p.grid.radius();
    if (r - params.r).abs() > 1e-12 * params.r {
        return Err(CliError::Input(format!(
            "profile ends at r = {r} but R = {}; pass --R {r}",
            params.r
        )));
    }
    Ok(())
}

enum Source {
    Profile(Profile),
    Branch(Branch),
}

fn source(args: &SourceArgs, params: &ModelParams) -> CliResult<Source> {
    match (&args.input, args.branch) {
        (Some(path), None) => {
            let p = load_profile(path)?;
            check_radius(&p, params)?;
            Ok(Source::Profile(p))
        }
        (None, Some(b)) => {
            params.require_b2_zero()?;
            if b == Branch::UniaxialEscape && params.k % 2 != 0 {
                return Err(Error::OddK(params.k).into());
            }
            Ok(Source::Branch(b))
        }
        _ => Err(CliError::Config(
            "give exactly one of --input <profile.csv> or --branch <minus|plus|uniaxial>".into(),
        )),
    }
}

type Sampler = Box<dyn Fn(f64, f64) -> QTensor + Send + Sync>;

/// Piecewise linear interpolation of a profile, lifted with the ansatz.
fn profile_sampler(p: &Profile, k: i32) -> Sampler {
    let p = p.clone();
    Box::new(move |r, phi| {
        let nodes = p.grid.nodes();
        let i = nodes.partition_point(|&x| x <= r).clamp(1, nodes.len() - 1);
        let t = ((r - nodes[i - 1]) / (nodes[i] - nodes[i - 1])).clamp(0.0, 1.0);
        let u = p.u[i - 1] + t * (p.u[i] - p.u[i - 1]);
        let v = p.v[i - 1] + t * (p.v[i] - p.v[i - 1]);
        ansatz(u, v, phi, k)
    })
}

fn render(args: &RenderArgs) -> CliResult<()> {
    let common = &args.source.common;
    let cfg = RunConfig::resolve(common)?;
    let params = cfg.params()?;
    let spec = RenderSpec {
        style: args.style,
        density: args.density,
        colormap: args.colormap,
        size: args.size,
        shift: args.shift,
    };
    spec.validate()?;
    let (title, sampler, chart) = match source(&args.source, &params)? {
        Source::Profile(p) => {
            let title = args
                .source
                .input
                .as_ref()
                .map(|x| x.display().to_string())
                .unwrap_or_default();
            let chart = EigenChart::from_uv(&title, p.grid.nodes(), &p.u, &p.v);
            (title, profile_sampler(&p, params.k), chart)
        }
        Source::Branch(b) => {
            let grid = cfg.radial_grid()?;
            let title = format!("{} branch, k = {}", b.name(), params.k);
            let chart = match b {
                Branch::UniaxialEscape => {
                    EigenChart::from_sampler(&title, grid.nodes(), branch_field(b, &params)?)
                }
                _ => {
                    let p = explicit_profile(b, &params, &grid)?;
                    EigenChart::from_uv(&title, grid.nodes(), &p.u, &p.v)
                }
            };
            (title, branch_field(b, &params)?, chart)
        }
    };
    let glyphs = build_glyphs(&sampler, params.r, &spec)?;
    write(
        &out_path(common, "field.svg")?,
        &field_svg(&glyphs, params.r, &spec, &title),
    )?;
    write(
        &out_path(common, "eigenvalues.svg")?,
        &chart_svg(&chart, spec.size),
    )?;
    Ok(())
}

#[derive(Serialize, Debug)]
pub struct SweepRecord {
    pub value: f64,
    pub converged: bool,
    pub energy: Option<f64>,
    pub s_plus: f64,
    pub u_r: Option<f64>,
    pub v_r: Option<f64>,
    pub norm_bound_margin: Option<f64>,
    pub distance_to_minus: Option<f64>,
    pub error: Option<String>,
}

#[derive(Serialize)]
struct SweepOutput {
    parameter: &'static str,
    params: ModelParams,
    grid: GridInfo,
    records: Vec<SweepRecord>,
}

fn parse_list(flag: &str, text: &str) -> CliResult<Vec<f64>> {
    let items: Vec<&str> = text
        .split(',')
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .collect();
    if items.is_empty() {
        return Err(CliError::Config(format!("{flag} is empty")));
    }
    items
        .iter()
        .map(|s| {
            s.parse::<f64>()
                .ok()
                .filter(|x| x.is_finite())
                .ok_or_else(|| CliError::Config(format!("{flag}: '{s}' is not a finite number")))
        })
        .collect()
}

/// Explicit `Y₋` shape with the current `s₊`, used as reference also for `b² > 0`.
fn minus_reference(params: &ModelParams, grid: &RadialGrid) -> CliResult<Profile> {
    let (u, v) = grid
        .nodes()
        .iter()
        .map(|&r| minus_uv(r, params.r, params.k, params.s_plus))
        .unzip();
    Ok(Profile::new(grid.clone(), u, v)?)
}

fn record(
    value: f64,
    params: &ModelParams,
    step: Result<(Profile, SolveReport), Error>,
) -> SweepRecord {
    let ok = |p: &Profile, r: &SolveReport, error: Option<String>| {
        let n = p.len() - 1;
        SweepRecord {
            value,
            converged: r.converged,
            energy: Some(r.energy),
            s_plus: params.s_plus,
            u_r: Some(p.u[n]),
            v_r: Some(p.v[n]),
            norm_bound_margin: Some(r.norm_bound_margin),
            distance_to_minus: minus_reference(params, &p.grid)
                .ok()
                .and_then(|m| l2_distance(p, &m).ok()),
            error,
        }
    };
    match step {
        Ok((p, r)) => ok(&p, &r, None),
        Err(Error::NonConvergence(b)) => {
            let msg = format!("solver did not converge: {}", b.1.summary());
            ok(&b.0, &b.1, Some(msg))
        }
        Err(e) => SweepRecord {
            value,
            converged: false,
            energy: None,
            s_plus: params.s_plus,
            u_r: None,
            v_r: None,
            norm_bound_margin: None,
            distance_to_minus: None,
            error: Some(e.to_string()),
        },
    }
}

fn sweep(args: &SweepArgs) -> CliResult<()> {
    let cfg = RunConfig::resolve(&args.common)?;
    let base = cfg.params()?;
    let grid = cfg.radial_grid()?;
    let opts = cfg.solver_options(&grid)?;
    let (parameter, records) = match (&args.l_list, &args.b2_list) {
        (Some(text), None) => {
            let ls = parse_list("--l-list", text)?;
            let up = ls.windows(2).all(|w| w[1] > w[0]);
            let down = ls.windows(2).all(|w| w[1] < w[0]);
            if !(up || down) {
                return Err(CliError::Config(
                    "--l-list must be strictly monotone".into(),
                ));
            }
            let params: Vec<ModelParams> = ls
                .iter()
                .map(|&l| {
                    if l > 0.0 {
                        Ok(base.with_l(l)?)
                    } else {
                        Err(CliError::Config(format!(
                            "--l-list values must be positive, got {l}; use `limit` for L = 0"
                        )))
                    }
                })
                .collect::<CliResult<_>>()?;
            // independent solves; output order follows the list
            let records = std::thread::scope(|s| {
                let handles: Vec<_> = params
                    .iter()
                    .map(|p| {
                        let grid = &grid;
                        let opts = &opts;
                        s.spawn(move || record(p.l, p, minimize(p, grid, opts)))
                    })
                    .collect();
                handles
                    .into_iter()
                    .map(|h| h.join().expect("sweep worker panicked"))
                    .collect::<Vec<_>>()
            });
            ("L", records)
        }
        (None, Some(text)) => {
            let bs = parse_list("--b2-list", text)?;
            let steps = continuation_records(&base, &bs, &grid, &opts)?;
            let records = steps
                .into_iter()
                .map(|(b2, step)| {
                    let params = base.with_b2(b2)?;
                    let step = step.map(
                        |BranchPoint {
                             profile, report, ..
                         }| (profile, report),
                    );
                    Ok(record(b2, &params, step))
                })
                .collect::<CliResult<Vec<_>>>()?;
            ("b2", records)
        }
        _ => {
            return Err(CliError::Config(
                "give exactly one of --l-list or --b2-list".into(),
            ))
        }
    };
    let failed = records.iter().filter(|r| r.error.is_some()).count();
    let total = records.len();
    let out = SweepOutput {
        parameter,
        params: base,
        grid: GridInfo::new(&grid, cfg.m),
        records,
    };
    write(&out_path(&args.common, "sweep.json")?, &json(&out)?)?;
    if failed > 0 {
        return Err(CliError::Numeric(format!(
            "{failed} of {total} sweep steps failed; see sweep.json"
        )));
    }
    Ok(())
}

#[derive(Serialize)]
struct EnergyOutput {
    source: String,
    params: ModelParams,
    reduced: Option<f64>,
    ldg_2d: Option<f64>,
    dirichlet_2d: f64,
    e0: Option<E0Value>,
}

fn energy(args: &SourceArgs) -> CliResult<()> {
    let cfg = RunConfig::resolve(&args.common)?;
    let params = cfg.params()?;
    let finite_l = params.l > 0.0;
    let (name, profile, field) = match source(args, &params)? {
        Source::Profile(p) => {
            let polar = PolarGrid::new(p.grid.clone(), cfg.m)?;
            let f = lift(&p, params.k, &polar)?;
            let name = args
                .input
                .as_ref()
                .map(|x| x.display().to_string())
                .unwrap_or_default();
            (name, Some(p), f)
        }
        Source::Branch(b) => {
            let grid = cfg.radial_grid()?;
            let polar = PolarGrid::new(grid.clone(), cfg.m)?;
            let f = field2d::Field2D::from_sampler(&polar, branch_field(b, &params)?);
            let p = match b {
                Branch::UniaxialEscape => None,
                _ => Some(harmonic::explicit_profile(b, &params, &grid)?),
            };
            (b.name().to_string(), p, f)
        }
    };
    let out = EnergyOutput {
        source: name,
        params,
        reduced: match (&profile, finite_l) {
            (Some(p), true) => Some(reduced_energy(p, &params)?),
            _ => None,
        },
        ldg_2d: if finite_l {
            Some(ldg_energy_2d(&field, &params)?)
        } else {
            None
        },
        dirichlet_2d: dirichlet_energy(&field),
        e0: match &profile {
            Some(p) => Some(e0_energy(p, &params)?),
            None => None,
        },
    };
    print!("{}", json(&out)?);
    Ok(())
}
