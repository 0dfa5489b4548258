//! Acceptance suite: one PASS/FAIL line per criterion, nonzero exit on any failure.

use std::f64::consts::PI;
use std::fs;
use std::path::Path;
use std::process::Command;
use std::time::{Duration, Instant};

use ffem_core::fem1d::{assemble_1d, EndConditions, Rod1D, ThetaStepper, TransientState};
use ffem_core::fem2d::{
    apply_wall_dirichlet, assemble_loads, solve_plate, BoundaryConditionSet, BoundaryLoads,
    PlateParameters, Source, WallLoad,
};
use ffem_core::fuzzy::{AlphaLevels, Interval, TriangularFuzzyNumber};
use ffem_core::mesh::{Mesh2D, Wall};
use ffem_core::uq::{
    propagate, sensitivity, CrispModel, FuzzyScenario, ParameterKind, ParameterPoint, PlateModel,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

type Check = Result<String, String>;
type Criterion = (&'static str, Option<Duration>, Box<dyn Fn() -> Check>);

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn plate_mesh(nx: usize, ny: usize) -> Mesh2D<f64> {
    Mesh2D::structured(20.0, 10.0, nx, ny).expect("valid mesh")
}

fn nominal_scenario(kinds: &[ParameterKind]) -> FuzzyScenario<f64> {
    FuzzyScenario::with_tolerance(
        &PlateParameters::default(),
        kinds,
        0.05,
        AlphaLevels::uniform(11).unwrap(),
    )
    .unwrap()
}

fn random_interval(rng: &mut ChaCha8Rng, avoid_zero: bool) -> Interval<f64> {
    if avoid_zero {
        let lo = rng.gen_range(0.01..50.0);
        let iv = Interval::new(lo, lo + rng.gen_range(0.0..50.0)).unwrap();
        if rng.gen() {
            -iv
        } else {
            iv
        }
    } else {
        Interval::spanning(rng.gen_range(-100.0..100.0), rng.gen_range(-100.0..100.0))
    }
}

fn sub_interval(rng: &mut ChaCha8Rng, x: Interval<f64>) -> Interval<f64> {
    let mut at = || (x.lo() + rng.gen::<f64>() * x.width()).clamp(x.lo(), x.hi());
    Interval::spanning(at(), at())
}

fn apply(op: usize, x: Interval<f64>, y: Interval<f64>) -> Interval<f64> {
    match op {
        0 => x + y,
        1 => x - y,
        2 => x * y,
        _ => x.checked_div(&y).expect("divisor excludes zero"),
    }
}

fn apply_real(op: usize, u: f64, v: f64) -> f64 {
    match op {
        0 => u + v,
        1 => u - v,
        2 => u * v,
        _ => u / v,
    }
}

fn fuzzy_arithmetic() -> Check {
    const TOL: f64 = 1e-12;
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    for case in 0..1000 {
        let (x, y) = (
            random_interval(&mut rng, false),
            random_interval(&mut rng, true),
        );
        let (xs, ys) = (sub_interval(&mut rng, x), sub_interval(&mut rng, y));
        for op in 0..4 {
            let (wide, narrow) = (apply(op, x, y), apply(op, xs, ys));
            ensure(narrow.is_within(&wide, TOL), || {
                format!("case {case} op {op}: {narrow} not in {wide}")
            })?;
        }
    }
    for case in 0..20 {
        let (x, y) = (
            random_interval(&mut rng, false),
            random_interval(&mut rng, true),
        );
        let results: Vec<_> = (0..4).map(|op| apply(op, x, y)).collect();
        for _ in 0..1000 {
            let (u, v) = (
                rng.gen_range(x.lo()..=x.hi()),
                rng.gen_range(y.lo()..=y.hi()),
            );
            for (op, r) in results.iter().enumerate() {
                let p = apply_real(op, u, v);
                ensure(p >= r.lo() - TOL && p <= r.hi() + TOL, || {
                    format!("case {case} op {op}: {p} outside {r}")
                })?;
            }
        }
    }
    for case in 0..1000 {
        let m = rng.gen_range(-50.0..50.0);
        let t = TriangularFuzzyNumber::new(
            m - rng.gen_range(0.0..10.0),
            m,
            m + rng.gen_range(0.0..10.0),
        )
        .unwrap();
        let (a, b): (f64, f64) = (rng.gen(), rng.gen());
        let outer = t.alpha_cut(a.min(b)).unwrap();
        let inner = t.alpha_cut(a.max(b)).unwrap();
        ensure(inner.is_within(&outer, TOL), || {
            format!("tfn case {case}: {inner} not in {outer}")
        })?;
    }
    Ok("4 ops x 1000 inclusion cases, 20 x 1000 point samples, 1000 alpha-cut pairs".into())
}

fn patch_test() -> Check {
    let m = plate_mesh(5, 5);
    let (k, a, b, c) = (1.5, 4.0, 0.35, -0.8);
    let exact = |i: usize| {
        let (x, y) = m.coords(i);
        a + b * x + c * y
    };
    let mut boundary: Vec<usize> = Wall::ALL
        .into_iter()
        .flat_map(|w| m.nodes_on_wall(w))
        .collect();
    boundary.sort_unstable();
    boundary.dedup();

    let mut dirichlet = assemble_loads(
        &m,
        k,
        Source::Uniform(0.0),
        &BoundaryLoads::uniform(WallLoad::Adiabatic),
    )
    .map_err(|e| e.to_string())?;
    for &i in &boundary {
        dirichlet = dirichlet
            .apply_dirichlet(&[i], exact(i))
            .map_err(|e| e.to_string())?;
    }

    let flux_loads = BoundaryLoads {
        left: WallLoad::Flux(-k * b),
        right: WallLoad::Adiabatic,
        top: WallLoad::Flux(k * c),
        bottom: WallLoad::Flux(-k * c),
    };
    let mut flux =
        assemble_loads(&m, k, Source::Uniform(0.0), &flux_loads).map_err(|e| e.to_string())?;
    for i in m.nodes_on_wall(Wall::Right) {
        flux = flux
            .apply_dirichlet(&[i], exact(i))
            .map_err(|e| e.to_string())?;
    }

    let mut worst: f64 = 0.0;
    for sys in [dirichlet, flux] {
        let t = sys.solve().map_err(|e| e.to_string())?;
        for (i, v) in t.values.iter().enumerate() {
            worst = worst.max((v - exact(i)).abs());
        }
    }
    ensure(worst <= 1e-9, || format!("max nodal error {worst:e}"))?;
    Ok(format!(
        "max nodal error {worst:.2e} (Dirichlet and flux variants)"
    ))
}

fn manufactured_error(n: usize) -> Result<f64, String> {
    let (w, h, k) = (20.0, 10.0, 1.5);
    let exact = move |x: f64, y: f64| (PI * x / w).sin() * (PI * y / h).sin();
    let g = move |x: f64, y: f64| k * PI * PI * (1.0 / (w * w) + 1.0 / (h * h)) * exact(x, y);
    let m = plate_mesh(n, n);
    let loads = BoundaryLoads::uniform(WallLoad::Dirichlet(0.0));
    let raw = assemble_loads(&m, k, Source::Field(&g), &loads).map_err(|e| e.to_string())?;
    let t = apply_wall_dirichlet(&raw, &m, &loads)
        .and_then(|s| s.solve())
        .map_err(|e| e.to_string())?;
    let mut sum = 0.0;
    for tri in m.elements() {
        let third = m.triangle_area(tri) / 3.0;
        for &i in &tri.nodes {
            let (x, y) = m.coords(i);
            sum += third * (t.values[i] - exact(x, y)).powi(2);
        }
    }
    Ok(sum.sqrt())
}

fn manufactured_convergence() -> Check {
    let e = [5, 10, 20]
        .into_iter()
        .map(manufactured_error)
        .collect::<Result<Vec<_>, _>>()?;
    let orders = [(e[0] / e[1]).log2(), (e[1] / e[2]).log2()];
    ensure(orders.iter().all(|&p| p >= 1.9), || {
        format!("orders {orders:?}")
    })?;
    Ok(format!("L2 orders {:.3}, {:.3}", orders[0], orders[1]))
}

fn analytic_profile() -> Check {
    let m = plate_mesh(5, 5);
    let mut worst: f64 = 0.0;
    for k in [0.5, 1.5, 4.0] {
        let params = PlateParameters {
            k,
            h: 0.0,
            q: 2.0,
            ..Default::default()
        };
        let t = solve_plate(&m, &params, &BoundaryConditionSet::default())
            .map_err(|e| e.to_string())?;
        for (i, v) in t.values.iter().enumerate() {
            let x = m.coords(i).0;
            worst = worst.max((v - (params.t_fixed + (2.0 / k) * (20.0 - x))).abs());
        }
    }
    ensure(worst <= 1e-8, || format!("max error {worst:e}"))?;
    Ok(format!("k in {{0.5, 1.5, 4}}, max error {worst:.2e}"))
}

fn crisp_consistency() -> Check {
    let m = plate_mesh(5, 5);
    let params = PlateParameters::default();
    let bc = BoundaryConditionSet::default();
    let crisp = solve_plate(&m, &params, &bc).map_err(|e| e.to_string())?;
    use ParameterKind::*;
    for kinds in [&[H][..], &[Q], &[TInf], &[H, Q, TInf]] {
        let field =
            propagate(&m, &params, &bc, &nominal_scenario(kinds)).map_err(|e| e.to_string())?;
        let top = field.envelope_at(1.0).ok_or("no alpha = 1 level")?;
        for (i, (iv, t)) in top.iter().zip(&crisp.values).enumerate() {
            ensure(
                iv.lo().to_bits() == t.to_bits() && iv.hi().to_bits() == t.to_bits(),
                || format!("{kinds:?} node {i}: {iv} vs {t}"),
            )?;
        }
    }
    Ok("alpha = 1 bit-identical to crisp solve for 4 scenarios".into())
}

fn vertex_vs_grid() -> Check {
    let m = plate_mesh(1, 1);
    let params = PlateParameters::default();
    let bc = BoundaryConditionSet::default();
    let s = nominal_scenario(&[ParameterKind::H, ParameterKind::Q]);
    let field = propagate(&m, &params, &bc, &s).map_err(|e| e.to_string())?;
    let support = field.envelope_at(0.0).ok_or("no alpha = 0 level")?;
    let model = PlateModel::new(&m, params, bc);
    let (hc, qc) = (s.h.cut(0.0).unwrap(), s.q.cut(0.0).unwrap());
    let mut lo = vec![f64::INFINITY; m.node_count()];
    let mut hi = vec![f64::NEG_INFINITY; m.node_count()];
    for i in 0..=20 {
        for j in 0..=20 {
            let p = ParameterPoint {
                h: hc.lo() + hc.width() * i as f64 / 20.0,
                q: qc.lo() + qc.width() * j as f64 / 20.0,
                t_inf: params.t_inf,
            };
            let values = model.evaluate(&p).map_err(|e| e.to_string())?;
            for (n, v) in values.into_iter().enumerate() {
                lo[n] = lo[n].min(v);
                hi[n] = hi[n].max(v);
            }
        }
    }
    let mut worst: f64 = 0.0;
    for (n, iv) in support.iter().enumerate() {
        worst = worst
            .max((iv.lo() - lo[n]).abs())
            .max((iv.hi() - hi[n]).abs());
    }
    ensure(worst <= 1e-8, || format!("max deviation {worst:e}"))?;
    Ok(format!(
        "2 triangles, 441 grid points, max deviation {worst:.2e}"
    ))
}

fn envelope_nesting() -> Check {
    let m = plate_mesh(5, 5);
    let s = nominal_scenario(&[ParameterKind::H, ParameterKind::Q]);
    let field = propagate(
        &m,
        &PlateParameters::default(),
        &BoundaryConditionSet::default(),
        &s,
    )
    .map_err(|e| e.to_string())?;
    ensure(field.alphas().len() == 11, || "expected 11 levels".into())?;
    for li in 1..field.alphas().len() {
        for (n, (inner, outer)) in field
            .envelope(li)
            .iter()
            .zip(field.envelope(li - 1))
            .enumerate()
        {
            ensure(inner.is_within(outer, 1e-10), || {
                format!("level {li} node {n}: {inner} not in {outer}")
            })?;
        }
    }
    Ok("11 levels x 36 nodes nested".into())
}

fn read_sensitivity(path: &Path) -> Result<(Vec<f64>, f64, f64), String> {
    let mut r = csv::Reader::from_path(path).map_err(|e| e.to_string())?;
    let (mut widths, mut avg, mut var) = (Vec::new(), None, None);
    for rec in r.records() {
        let rec = rec.map_err(|e| e.to_string())?;
        let v: f64 = rec[2]
            .parse()
            .map_err(|_| format!("bad number {}", &rec[2]))?;
        match &rec[1] {
            "average_width" => avg = Some(v),
            "variance" => var = Some(v),
            _ => widths.push(v),
        }
    }
    Ok((
        widths,
        avg.ok_or("no average row")?,
        var.ok_or("no variance row")?,
    ))
}

fn sensitivity_pipeline(tmp: &Path) -> Check {
    let m = plate_mesh(5, 5);
    let params = PlateParameters::default();
    let bc = BoundaryConditionSet::default();
    for kind in [ParameterKind::H, ParameterKind::Q] {
        let field =
            propagate(&m, &params, &bc, &nominal_scenario(&[kind])).map_err(|e| e.to_string())?;
        let r = sensitivity(&field, kind.name()).map_err(|e| e.to_string())?;
        let n = r.widths.len() as f64;
        let mean = r.widths.iter().sum::<f64>() / n;
        let var = r.widths.iter().map(|w| (w - mean).powi(2)).sum::<f64>() / n;
        ensure(r.widths.iter().all(|&w| w >= 0.0), || {
            "negative width".into()
        })?;
        ensure(
            (r.average_width - mean).abs() <= 1e-12 && (r.variance_of_widths - var).abs() <= 1e-12,
            || format!("{}: statistics disagree with widths", kind.name()),
        )?;
    }

    let out = tmp.join("sensitivity");
    let o = Command::new(env!("CARGO_BIN_EXE_ffem"))
        .args([
            "fuzzy-sweep",
            "--scenario",
            "h-only",
            "--scenario",
            "q-only",
            "--out",
        ])
        .arg(&out)
        .output()
        .map_err(|e| e.to_string())?;
    ensure(o.status.success(), || {
        String::from_utf8_lossy(&o.stderr).into_owned()
    })?;
    let mut summary = Vec::new();
    for s in ["h-only", "q-only"] {
        let (widths, avg, var) = read_sensitivity(&out.join(s).join("sensitivity.csv"))?;
        ensure(
            widths.len() == 36 && widths.iter().all(|&w| w >= 0.0),
            || format!("{s}: bad widths"),
        )?;
        summary.push(format!("{s} avg {avg} var {var}"));
    }
    let stdout = String::from_utf8_lossy(&o.stdout);
    let verdict = stdout.lines().last().unwrap_or_default();
    ensure(
        verdict.contains("sensitiv") || verdict.contains("verdict"),
        || format!("no verdict in output: {stdout}"),
    )?;
    Ok(summary.join("; "))
}

fn rod_transient() -> Check {
    let rod: Rod1D<f64> = Rod1D {
        length: 1.0,
        n_elems: 10,
        k: 1.0,
        u1: 0.0,
        q_src: 0.0,
    };
    let sys = assemble_1d(&rod).map_err(|e| e.to_string())?;
    let ends = EndConditions::fixed(0.0, 1.0);
    let stepper = ThetaStepper::new(&sys, 0.05, 1.0, ends).map_err(|e| e.to_string())?;
    let mut s = TransientState::uniform(&rod, 0.0);
    for _ in 0..400 {
        s = stepper.step(&s).map_err(|e| e.to_string())?;
    }
    let mut worst: f64 = 0.0;
    for (i, v) in s.values.iter().enumerate() {
        worst = worst.max((v - rod.node_x(i)).abs());
    }
    ensure(worst <= 1e-6, || {
        format!("distance to linear profile {worst:e}")
    })?;

    let mixed: Rod1D<f64> = Rod1D {
        k: 0.3,
        u1: 0.2,
        q_src: 0.5,
        ..rod
    };
    let msys = assemble_1d(&mixed).map_err(|e| e.to_string())?;
    let steady = TransientState {
        time: 0.0,
        values: msys.steady(&ends).map_err(|e| e.to_string())?,
    };
    let mut drift: f64 = 0.0;
    for (dt, theta) in [(0.01, 1.0), (0.5, 0.5), (3.0, 0.0), (0.2, 0.7)] {
        let next = ThetaStepper::new(&msys, dt, theta, ends)
            .and_then(|st| st.step(&steady))
            .map_err(|e| e.to_string())?;
        for (a, b) in next.values.iter().zip(&steady.values) {
            drift = drift.max((a - b).abs());
        }
    }
    ensure(drift <= 1e-12, || format!("fixed-point drift {drift:e}"))?;
    Ok(format!(
        "steady error {worst:.2e}, fixed-point drift {drift:.2e}"
    ))
}

fn determinism(tmp: &Path) -> Check {
    let mut outputs = Vec::new();
    for workers in ["1", "3", "8"] {
        let out = tmp.join(format!("workers-{workers}"));
        let o = Command::new(env!("CARGO_BIN_EXE_ffem"))
            .args([
                "fuzzy-sweep",
                "--scenario",
                "all",
                "--workers",
                workers,
                "--out",
            ])
            .arg(&out)
            .output()
            .map_err(|e| e.to_string())?;
        ensure(o.status.success(), || {
            String::from_utf8_lossy(&o.stderr).into_owned()
        })?;
        outputs.push(fs::read(out.join("envelope.csv")).map_err(|e| e.to_string())?);
    }
    ensure(outputs.windows(2).all(|w| w[0] == w[1]), || {
        "envelope.csv differs between worker counts".into()
    })?;
    Ok(format!(
        "1, 3 and 8 workers, {} identical bytes",
        outputs[0].len()
    ))
}

fn main() {
    let tmp = tempfile::tempdir().expect("temporary directory");
    let tmp = tmp.path().to_path_buf();
    let tmp2 = tmp.clone();
    let criteria: Vec<Criterion> = vec![
        (
            "fuzzy arithmetic",
            Some(Duration::from_secs(5)),
            Box::new(fuzzy_arithmetic),
        ),
        (
            "FEM patch test",
            Some(Duration::from_secs(1)),
            Box::new(patch_test),
        ),
        (
            "manufactured-solution convergence",
            Some(Duration::from_secs(10)),
            Box::new(manufactured_convergence),
        ),
        ("analytic profile", None, Box::new(analytic_profile)),
        ("crisp consistency", None, Box::new(crisp_consistency)),
        (
            "vertex vs grid oracle",
            Some(Duration::from_secs(5)),
            Box::new(vertex_vs_grid),
        ),
        ("envelope nesting", None, Box::new(envelope_nesting)),
        (
            "sensitivity pipeline",
            None,
            Box::new(move || sensitivity_pipeline(&tmp)),
        ),
        (
            "1D transient",
            Some(Duration::from_secs(2)),
            Box::new(rod_transient),
        ),
        ("determinism", None, Box::new(move || determinism(&tmp2))),
    ];

    let mut failures = 0;
    for (n, (name, limit, check)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let result = std::panic::catch_unwind(std::panic::AssertUnwindSafe(check))
            .unwrap_or_else(|_| Err("panicked".into()));
        let elapsed = start.elapsed();
        let result = match (result, limit) {
            (Ok(_), Some(l)) if elapsed > *l => Err(format!("took {elapsed:.2?}, limit {l:?}")),
            (r, _) => r,
        };
        let (status, detail) = match &result {
            Ok(d) => ("PASS", d),
            Err(d) => {
                failures += 1;
                ("FAIL", d)
            }
        };
        println!("{status} [{:>2}] {name} ({elapsed:.2?}): {detail}", n + 1);
    }
    println!(
        "acceptance: {} passed, {} failed",
        criteria.len() - failures,
        failures
    );
    if failures > 0 {
        std::process::exit(1);
    }
}
