use std::path::Path;
use std::process::{Command, Output};

use nematic_cli::render::{build_glyphs, EigenChart, GlyphStyle, RenderSpec};
use nematic_core::harmonic::{branch_field, explicit_profile};
use nematic_core::qtensor::director;
use nematic_core::{Branch, ModelParams, RadialGrid};
use serde_json::Value;
use tempfile::TempDir;

fn nematic(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_nematic"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn code(o: &Output) -> i32 {
    o.status.code().unwrap()
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

fn read_json(path: &Path) -> Value {
    serde_json::from_str(&std::fs::read_to_string(path).unwrap()).unwrap()
}

fn dir_arg(d: &TempDir) -> String {
    d.path().display().to_string()
}

#[test]
fn solve_writes_converged_report() {
    let d = TempDir::new().unwrap();
    let o = nematic(&[
        "solve",
        "--a2",
        "1",
        "--c2",
        "1",
        "--b2",
        "0",
        "--L",
        "0.01",
        "--R",
        "1",
        "--k",
        "1",
        "--n",
        "512",
        "--out-dir",
        &dir_arg(&d),
    ]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let rep = read_json(&d.path().join("report.json"));
    assert_eq!(rep["converged"], true);
    assert_eq!(rep["sign_structure"]["u_positive"], true);
    assert_eq!(rep["sign_structure"]["v_negative"], true);
    assert!(rep["norm_bound_margin"].as_f64().unwrap() >= -1e-8);
    assert!(d.path().join("profile.csv").exists());
    // keys in a stable order
    let text = std::fs::read_to_string(d.path().join("report.json")).unwrap();
    let e = text.find("\"energy\"").unwrap();
    let p = text.find("\"params\"").unwrap();
    assert!(e < p);
}

#[test]
fn invalid_k_and_l_exit_two() {
    let o = nematic(&["solve", "--k", "0"]);
    assert_eq!(code(&o), 2);
    let err = stderr(&o);
    assert!(err.starts_with("error[E_CONFIG]"), "{err}");
    assert!(err.contains("k in Z \\ {0}"), "{err}");
    assert_eq!(err.trim_end().lines().count(), 1);

    let o = nematic(&["solve", "--L", "0"]);
    assert_eq!(code(&o), 2);
    assert!(stderr(&o).contains("`limit`"));

    let o = nematic(&["solve", "--no-such-flag"]);
    assert_eq!(code(&o), 2);
    assert!(stderr(&o).starts_with("error[E_USAGE]"));
}

#[test]
fn config_file_is_overridden_by_flags_and_rejects_unknown_keys() {
    let d = TempDir::new().unwrap();
    let cfg = d.path().join("c.json");
    std::fs::write(&cfg, r#"{"L": 0.05, "n": 64, "k": 1}"#).unwrap();
    let out = d.path().join("o");
    let o = nematic(&[
        "solve",
        "--config",
        cfg.to_str().unwrap(),
        "--n",
        "128",
        "--out-dir",
        out.to_str().unwrap(),
    ]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let rep = read_json(&out.join("report.json"));
    assert_eq!(rep["params"]["L"], 0.05);
    assert_eq!(rep["grid"]["n"], 128);

    std::fs::write(&cfg, r#"{"L": 0.05, "lambda": 2}"#).unwrap();
    let o = nematic(&["solve", "--config", cfg.to_str().unwrap()]);
    assert_eq!(code(&o), 2);
    assert!(stderr(&o).contains("lambda"));
}

#[test]
fn non_convergence_writes_partial_results_and_exits_one() {
    let d = TempDir::new().unwrap();
    let o = nematic(&[
        "solve",
        "--L",
        "0.01",
        "--n",
        "256",
        "--max-iter",
        "1",
        "--init",
        "linear",
        "--tol",
        "1e-14",
        "--out-dir",
        &dir_arg(&d),
    ]);
    assert_eq!(code(&o), 1, "{}", stderr(&o));
    assert!(stderr(&o).starts_with("error[E_NUMERIC]"));
    let rep = read_json(&d.path().join("report.json"));
    assert_eq!(rep["converged"], false);
}

#[test]
fn identical_config_gives_identical_bytes() {
    let a = TempDir::new().unwrap();
    let b = TempDir::new().unwrap();
    for d in [&a, &b] {
        let o = nematic(&[
            "solve",
            "--L",
            "0.03",
            "--n",
            "256",
            "--out-dir",
            &dir_arg(d),
        ]);
        assert_eq!(code(&o), 0);
        let o = nematic(&["render", "--branch", "plus", "--out-dir", &dir_arg(d)]);
        assert_eq!(code(&o), 0);
    }
    for f in ["profile.csv", "report.json", "field.svg", "eigenvalues.svg"] {
        let x = std::fs::read(a.path().join(f)).unwrap();
        let y = std::fs::read(b.path().join(f)).unwrap();
        assert!(x == y, "{f} differs");
    }
}

#[test]
fn limit_table_for_odd_and_even_k() {
    let d = TempDir::new().unwrap();
    let o = nematic(&["limit", "--k", "1", "--out-dir", &dir_arg(&d)]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let t = read_json(&d.path().join("energies.json"));
    let rows = t["energies"].as_array().unwrap();
    assert_eq!(rows.len(), 2);
    let pi = std::f64::consts::PI;
    assert!((rows[0]["closed_form"].as_f64().unwrap() - pi).abs() < 1e-12);
    assert!((rows[1]["closed_form"].as_f64().unwrap() - 3.0 * pi).abs() < 1e-12);
    for r in rows {
        assert!(r["relative_error"].as_f64().unwrap() < 5e-3);
    }
    assert!(t["notes"][0].as_str().unwrap().contains("even k"));
    for f in ["minus.csv", "plus.csv", "eigenvalues.csv"] {
        assert!(d.path().join(f).exists());
    }

    let o = nematic(&["limit", "--k", "2", "--out-dir", &dir_arg(&d)]);
    assert_eq!(code(&o), 0);
    let t = read_json(&d.path().join("energies.json"));
    let cf: Vec<f64> = t["energies"]
        .as_array()
        .unwrap()
        .iter()
        .map(|r| r["closed_form"].as_f64().unwrap())
        .collect();
    let want = [2.0 * pi, 6.0 * pi, 6.0 * pi];
    for (a, b) in cf.iter().zip(want) {
        assert!((a - b).abs() < 1e-12);
    }

    let o = nematic(&["limit", "--b2", "0.1"]);
    assert_eq!(code(&o), 2);
}

#[test]
fn residual_of_solver_output_and_of_limit_profile() {
    let d = TempDir::new().unwrap();
    let o = nematic(&[
        "solve",
        "--L",
        "0.01",
        "--n",
        "512",
        "--out-dir",
        &dir_arg(&d),
    ]);
    assert_eq!(code(&o), 0);
    let input = d.path().join("profile.csv");
    let o = nematic(&[
        "residual",
        "--L",
        "0.01",
        "--input",
        input.to_str().unwrap(),
        "--out-dir",
        &dir_arg(&d),
    ]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let s = read_json(&d.path().join("residual.json"));
    assert!(s["ode_interior_max"].as_f64().unwrap() < 1e-3);
    let csv = std::fs::read_to_string(d.path().join("residual.csv")).unwrap();
    assert!(csv.starts_with("r,ru,rv\n"));
    assert_eq!(csv.lines().count(), 514);

    // the L = 0 profile does not solve the finite-L equations
    let o = nematic(&["limit", "--n", "512", "--out-dir", &dir_arg(&d)]);
    assert_eq!(code(&o), 0);
    let input = d.path().join("minus.csv");
    let o = nematic(&[
        "residual",
        "--L",
        "0.01",
        "--input",
        input.to_str().unwrap(),
        "--out-dir",
        &dir_arg(&d),
    ]);
    assert_eq!(code(&o), 0);
    let s = read_json(&d.path().join("residual.json"));
    assert!(s["ode_interior_max"].as_f64().unwrap() > 1.0);
}

#[test]
fn residual_rejects_bad_files_with_line_numbers() {
    let d = TempDir::new().unwrap();
    let empty = d.path().join("empty.csv");
    std::fs::write(&empty, "").unwrap();
    let o = nematic(&["residual", "--input", empty.to_str().unwrap()]);
    assert_eq!(code(&o), 2);
    assert!(stderr(&o).starts_with("error[E_INPUT]"));

    let bad = d.path().join("bad.csv");
    let mut text = String::from("r,u,v\n");
    for i in 0..=20 {
        let r = f64::from(i) / 20.0;
        if i == 7 {
            text.push_str("0.35,abc,-0.1\n");
        } else {
            text.push_str(&format!("{r},{},{}\n", r, -0.5));
        }
    }
    std::fs::write(&bad, text).unwrap();
    let o = nematic(&["residual", "--input", bad.to_str().unwrap()]);
    assert_eq!(code(&o), 2);
    assert!(stderr(&o).contains("line 9"), "{}", stderr(&o));

    let o = nematic(&[
        "residual",
        "--input",
        d.path().join("missing.csv").to_str().unwrap(),
    ]);
    assert_eq!(code(&o), 2);
}

fn params(k: i32) -> ModelParams {
    ModelParams::new(1.0, 0.0, 1.0, 0.0, 1.0, k).unwrap()
}

#[test]
fn boundary_glyphs_follow_the_director() {
    let p = params(1);
    let f = branch_field(Branch::Minus, &p).unwrap();
    let glyphs = build_glyphs(&f, p.r, &RenderSpec::default()).unwrap();
    let ring: Vec<_> = glyphs.iter().filter(|g| g.on_boundary).collect();
    assert!(ring.len() >= 32);
    for g in ring {
        let phi = g.y.atan2(g.x);
        let n = director(phi, 1);
        let d = g.rod_dir.expect("boundary glyph is a rod");
        assert!((d[0] * n[0] + d[1] * n[1]).abs() > 1.0 - 1e-10);
        assert!(g.biaxiality < 1e-10);
    }
}

#[test]
fn centre_glyph_of_minus_branch_is_isotropic_in_plane() {
    let p = params(1);
    let f = branch_field(Branch::Minus, &p).unwrap();
    for style in [GlyphStyle::Rod, GlyphStyle::Box] {
        let spec = RenderSpec {
            style,
            ..RenderSpec::default()
        };
        let glyphs = build_glyphs(&f, p.r, &spec).unwrap();
        let c = glyphs.iter().find(|g| g.x == 0.0 && g.y == 0.0).unwrap();
        assert!(c.anisotropy < 1e-12);
        // λ_min is the unique negative eigenvalue, along e₃
        assert!(c.eigenvalues[0] < 0.0 && c.eigenvalues[1] > 0.0);
        if style == GlyphStyle::Box {
            // in-plane square: all hull vertices at the same distance
            let d: Vec<f64> = c.outline.iter().map(|p| p[0].hypot(p[1])).collect();
            assert_eq!(d.len(), 4);
            for x in &d {
                assert!((x - d[0]).abs() < 1e-12 * d[0]);
            }
        }
    }
}

#[test]
fn render_spec_errors_exit_two() {
    let o = nematic(&["render", "--branch", "minus", "--density", "3"]);
    assert_eq!(code(&o), 2);
    let o = nematic(&[
        "render", "--branch", "minus", "--style", "box", "--shift", "0.1",
    ]);
    assert_eq!(code(&o), 2);
    assert!(stderr(&o).contains("shift"));
    let o = nematic(&["render", "--branch", "uniaxial", "--k", "1"]);
    assert_eq!(code(&o), 2);
    let o = nematic(&["render"]);
    assert_eq!(code(&o), 2);
}

#[test]
fn plus_chart_has_interior_crossing_at_the_uniaxial_point() {
    let p = params(1);
    let grid = RadialGrid::uniform(1.0, 400).unwrap();
    let y = explicit_profile(Branch::Plus, &p, &grid).unwrap();
    let chart = EigenChart::from_uv("plus", grid.nodes(), &y.u, &y.v);
    let c = chart.crossings();
    assert_eq!(c.len(), 1);
    assert_eq!(chart.series[c[0].a].label, "lambda_n");
    assert_eq!(chart.series[c[0].b].label, "lambda_z");
    // ψ₊ = 2π/3 where tan(π/3) = 1/(√3 r), i.e. r = 1/3
    assert!((c[0].r - 1.0 / 3.0).abs() < 1e-4);

    let y = explicit_profile(Branch::Minus, &p, &grid).unwrap();
    let chart = EigenChart::from_uv("minus", grid.nodes(), &y.u, &y.v);
    assert!(chart.crossings().is_empty(), "{:?}", chart.crossings());
}

#[test]
fn l_sweep_distance_decreases() {
    let d = TempDir::new().unwrap();
    let o = nematic(&[
        "sweep",
        "--k",
        "1",
        "--l-list",
        "0.1,0.03,0.01,0.003",
        "--out-dir",
        &dir_arg(&d),
    ]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let s = read_json(&d.path().join("sweep.json"));
    let recs = s["records"].as_array().unwrap();
    let vals: Vec<f64> = recs.iter().map(|r| r["value"].as_f64().unwrap()).collect();
    assert_eq!(vals, [0.1, 0.03, 0.01, 0.003]);
    let dist: Vec<f64> = recs
        .iter()
        .map(|r| r["distance_to_minus"].as_f64().unwrap())
        .collect();
    assert!(dist.windows(2).all(|w| w[1] < w[0]), "{dist:?}");
}

#[test]
fn b2_sweep_reports_s_plus() {
    let d = TempDir::new().unwrap();
    let o = nematic(&[
        "sweep",
        "--b2-list",
        "0,0.05,0.1",
        "--n",
        "256",
        "--out-dir",
        &dir_arg(&d),
    ]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let s = read_json(&d.path().join("sweep.json"));
    for r in s["records"].as_array().unwrap() {
        let b2 = r["value"].as_f64().unwrap();
        let want = (b2 + (b2 * b2 + 24.0).sqrt()) / 4.0;
        assert!((r["s_plus"].as_f64().unwrap() - want).abs() < 1e-14);
        assert_eq!(r["converged"], true);
        let u_r = r["u_r"].as_f64().unwrap();
        assert!((u_r - want / 2f64.sqrt()).abs() < 1e-12);
    }
}

#[test]
fn sweep_list_errors_exit_two() {
    for args in [
        &["sweep", "--l-list", ""][..],
        &["sweep", "--b2-list", " , "],
        &["sweep", "--l-list", "0.1,0.3,0.2"],
        &["sweep", "--b2-list", "0.05,0.1"],
        &["sweep"],
    ] {
        let o = nematic(args);
        assert_eq!(code(&o), 2, "{args:?}: {}", stderr(&o));
    }
}

#[test]
fn energy_prints_json() {
    let o = nematic(&["energy", "--branch", "minus", "--L", "0", "--n", "256"]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let v: Value = serde_json::from_slice(&o.stdout).unwrap();
    let pi = std::f64::consts::PI;
    assert!((v["dirichlet_2d"].as_f64().unwrap() - pi).abs() < 1e-3);
    assert!(v["reduced"].is_null());
    assert!(v["e0"]["Finite"].as_f64().is_some());

    let o = nematic(&["energy", "--branch", "plus", "--L", "0.1", "--n", "256"]);
    let v: Value = serde_json::from_slice(&o.stdout).unwrap();
    assert!(v["reduced"].as_f64().is_some());
    assert!(v["ldg_2d"].as_f64().is_some());
}

#[test]
fn in_process_run_matches_binary_exit_codes() {
    assert_eq!(nematic_cli::run(["nematic", "solve", "--k", "0"]), 2);
    assert_eq!(nematic_cli::run(["nematic", "--version"]), 0);
}
