//! Acceptance run: one PASS/FAIL line per criterion. Tolerances and time
//! budgets are fixed here, not read from any config.

use psym::dual::{
    find_critical_points, gradient_check, hessian_index, theorem32_crosscheck, DualElement, FinderOptions, HessianRoute,
    OrbitRecord, PsiEvaluator, SymmetryClass, DEFAULT_SCHEDULE,
};
use psym::geometry::{EllipsoidSurface, GaugeOracle};
use psym::index::{bott_sum, ellipsoid_index, index_crossing, pinching_bounds, IndexOptions};
use psym::path::{extend_by_symmetry, integrate_fundamental, CoefficientFunction};
use psym::sym::{standard_p, UnitCircleValue};
use psym::{Dim, Mat};
use psym_cli::commands::{run, Command};
use psym_cli::config::RunConfig;
use psym_cli::report::Status;
use psym_cli::suite::{
    case_formula_checks, decomposition_checks, product_checks, random_p_symmetric_path, splitting_checks, Check,
    SuiteConfig,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use std::f64::consts::PI;
use std::path::PathBuf;
use std::sync::Arc;
use std::time::{Duration, Instant};

const DIMS: [(usize, usize); 4] = [(2, 0), (2, 1), (3, 0), (3, 1)];

const BUDGET_ELLIPSOID_GRID: Duration = Duration::from_secs(120);
const BUDGET_BOTT: Duration = Duration::from_secs(600);
const BUDGET_END_TO_END: Duration = Duration::from_secs(300);

const BOTT_PATHS_PER_DIM: usize = 50;
const BOTT_M: [usize; 3] = [1, 3, 5];
const RANDOM_PRODUCTS: usize = 200;
const RANDOM_DECOMPOSITIONS: usize = 1000;
const CROSS_ORACLE_MAX_RATIO: f64 = 1.25;
const ACTION_REL_TOL: f64 = 1e-4;
const TOL_CIRCLE: f64 = 1e-7;
const SPHERE_TOL: f64 = 1e-6;
const GRADIENT_REL_TOL: f64 = 1e-5;

struct Outcome {
    passed: bool,
    detail: String,
}

fn outcome(passed: bool, detail: impl Into<String>) -> Outcome {
    Outcome { passed, detail: detail.into() }
}

fn suite_failures(checks: &[Check]) -> (usize, Vec<String>) {
    let bad: Vec<String> = checks
        .iter()
        .filter(|c| !c.passed)
        .map(|c| format!("{} / {}: {:?}", c.group, c.name, c.error))
        .collect();
    (checks.len(), bad)
}

fn summarize(name: &str, total: usize, bad: &[String]) -> String {
    if bad.is_empty() {
        format!("{name}: {total}/{total}")
    } else {
        format!("{name}: {}/{total}; first failure {}", total - bad.len(), bad[0])
    }
}

fn ellipsoid_grid() -> Outcome {
    let start = Instant::now();
    let mut jobs = Vec::new();
    for (n, kappa) in DIMS {
        for c in [0.5, 1.0, 2.0] {
            for s in [PI / 2.0, PI, 2.0 * PI, 3.0 * PI] {
                jobs.push((n, kappa, c, s));
            }
        }
    }
    let bad: Vec<String> = jobs
        .par_iter()
        .filter_map(|&(n, kappa, c, s)| {
            let dim = Dim::new(n, kappa).unwrap();
            let p = standard_p::<f64>(dim).into_inner();
            let coeff = CoefficientFunction::constant(Mat::<f64>::identity(2 * n, 2 * n) * c, s).unwrap();
            let path = integrate_fundamental(&coeff, 256).unwrap();
            let want = ellipsoid_index(dim, c, s).unwrap();
            match index_crossing(&path, UnitCircleValue::one(), &p, &IndexOptions::default()) {
                Ok(r) if r.i - kappa as i64 == want => None,
                Ok(r) => Some(format!("n={n} κ={kappa} c={c} s={s:.4}: crossing − κ = {} vs {want}", r.i - kappa as i64)),
                Err(e) => Some(format!("n={n} κ={kappa} c={c} s={s:.4}: {e}")),
            }
        })
        .collect();
    let t = start.elapsed();
    let detail = format!("{} in {:.1}s (budget {}s)", summarize("grid points", jobs.len(), &bad), t.as_secs_f64(), BUDGET_ELLIPSOID_GRID.as_secs());
    outcome(bad.is_empty() && t < BUDGET_ELLIPSOID_GRID, detail)
}

fn bott_identity() -> Outcome {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(0xb077);
    let mut jobs = Vec::new();
    for (n, kappa) in DIMS {
        let dim = Dim::new(n, kappa).unwrap();
        for k in 0..BOTT_PATHS_PER_DIM {
            jobs.push((dim, k, random_p_symmetric_path(dim, &mut rng).unwrap()));
        }
    }
    let opts = IndexOptions::default();
    let one = UnitCircleValue::one();
    let mut checks = 0;
    let mut nontrivial = 0;
    let mut bad = Vec::new();
    for (dim, k, path) in &jobs {
        let p = standard_p::<f64>(*dim).into_inner();
        for m in BOTT_M {
            checks += 1;
            let res = bott_sum(path, &p, m, one, &opts).and_then(|sum| {
                let it = extend_by_symmetry(path, &p, m)?;
                index_crossing(&it, one, &p, &opts).map(|d| (sum, d))
            });
            match res {
                Ok((sum, d)) if (sum.i, sum.nu) == (d.i, d.nu) => {
                    if d.i != 0 {
                        nontrivial += 1;
                    }
                }
                Ok((sum, d)) => bad.push(format!("n={} κ={} path {k} m={m}: sum ({}, {}) vs direct ({}, {})", dim.n(), dim.kappa(), sum.i, sum.nu, d.i, d.nu)),
                Err(e) => bad.push(format!("n={} κ={} path {k} m={m}: {e}", dim.n(), dim.kappa())),
            }
        }
    }
    let t = start.elapsed();
    let detail = format!(
        "{} ({nontrivial} with nonzero index) in {:.1}s (budget {}s)",
        summarize("identities", checks, &bad),
        t.as_secs_f64(),
        BUDGET_BOTT.as_secs()
    );
    outcome(bad.is_empty() && t < BUDGET_BOTT, detail)
}

fn case_formulas() -> Outcome {
    let cfg = SuiteConfig { m_range: vec![1, 2, 3, 4], dims: DIMS.to_vec(), ..SuiteConfig::default() };
    let checks = case_formula_checks(&cfg, &IndexOptions::default());
    // θ = 2π/3 puts (2m−1)θ/2π on an integer at m = 2: the degenerate branch.
    let degenerate = checks.iter().filter(|c| c.name.contains("θ=2.094395") && c.name.contains("m=2")).count();
    let (total, bad) = suite_failures(&checks);
    outcome(bad.is_empty() && degenerate > 0, format!("{} ({degenerate} on the degenerate branch)", summarize("case/iterate/dim rows", total, &bad)))
}

fn splitting_numbers() -> Outcome {
    let cfg = SuiteConfig { random_products: RANDOM_PRODUCTS, ..SuiteConfig::default() };
    let opts = IndexOptions::default();
    let table = splitting_checks(&cfg, &opts);
    let products = product_checks(&cfg, &opts);
    let (t1, b1) = suite_failures(&table);
    let (t2, b2) = suite_failures(&products);
    let detail = format!("{}; {}", summarize("table points", t1, &b1), summarize("product identities", t2, &b2));
    outcome(b1.is_empty() && b2.is_empty(), detail)
}

fn ellipsoid(n: usize, kappa: usize, radii: &[f64]) -> EllipsoidSurface {
    EllipsoidSurface::new(Dim::new(n, kappa).unwrap(), radii.to_vec(), 1.5).unwrap()
}

/// Ellipsoids with ratio ≤ 1.25 in both symmetry classes, with their orbits.
fn pinched_orbits() -> Vec<(EllipsoidSurface, Vec<OrbitRecord>)> {
    let mut out = Vec::new();
    for kappa in [0, 1] {
        for radii in [[1.0, 1.2], [1.2, 1.0], [1.0, 1.25]] {
            let g = ellipsoid(2, kappa, &radii);
            let orbits = find_critical_points(&g, &FinderOptions { restarts: 2, ..FinderOptions::default() }).unwrap_or_default();
            out.push((g, orbits));
        }
    }
    out
}

fn cross_oracle(families: &[(EllipsoidSurface, Vec<OrbitRecord>)]) -> Outcome {
    let mut checks = 0;
    let mut bad = Vec::new();
    for (g, orbits) in families {
        let ratio = g.radii().iter().cloned().fold(0.0, f64::max) / g.radii().iter().cloned().fold(f64::INFINITY, f64::min);
        assert!(ratio <= CROSS_ORACLE_MAX_RATIO);
        if orbits.is_empty() {
            bad.push(format!("{:?} κ={}: no orbits found", g.radii(), g.dim().kappa()));
        }
        let shared: Arc<dyn GaugeOracle> = Arc::new(g.clone());
        for (k, o) in orbits.iter().enumerate() {
            for m in [1, 2] {
                checks += 1;
                match theorem32_crosscheck(o, shared.clone(), m, &DEFAULT_SCHEDULE, &IndexOptions::default()) {
                    Ok(c) if c.consistent && c.hessian.1 == c.crossing.1 - 1 => {}
                    Ok(c) => bad.push(format!("{:?} κ={} orbit {k} m={m}: {c:?}", g.radii(), g.dim().kappa())),
                    Err(e) => bad.push(format!("{:?} κ={} orbit {k} m={m}: {e}", g.radii(), g.dim().kappa())),
                }
            }
        }
    }
    outcome(bad.is_empty() && checks > 0, summarize("orbit iterates", checks, &bad))
}

fn pinching_index_bounds(families: &[(EllipsoidSurface, Vec<OrbitRecord>)]) -> Outcome {
    let mut checks = 0;
    let mut triggered = 0;
    let mut bad = Vec::new();
    for (g, orbits) in families {
        let r = g.radii().iter().cloned().fold(f64::INFINITY, f64::min);
        let big_r = g.radii().iter().cloned().fold(0.0, f64::max);
        for (k, o) in orbits.iter().enumerate() {
            for m in [1, 2] {
                checks += 1;
                let h = match hessian_index(o, g, m, &DEFAULT_SCHEDULE, HessianRoute::Reduced) {
                    Ok(h) => h,
                    Err(e) => {
                        bad.push(format!("{:?} orbit {k} m={m}: {e}", g.radii()));
                        continue;
                    }
                };
                let (lower, upper) = pinching_bounds(o.tau2, m, r, big_r, g.dim()).unwrap();
                triggered += usize::from(lower.is_some()) + usize::from(upper.is_some());
                let ok = lower.map_or(true, |l| h.i >= l) && upper.map_or(true, |u| h.i + h.nu <= u);
                if !ok {
                    bad.push(format!("{:?} orbit {k} m={m}: i={} ν={} bounds {lower:?}/{upper:?}", g.radii(), h.i, h.nu));
                }
            }
        }
    }
    outcome(bad.is_empty() && triggered > 0, format!("{} ({triggered} bounds triggered)", summarize("orbit iterates", checks, &bad)))
}

fn iterated_bounds() -> Outcome {
    let cfg = SuiteConfig { decompositions: RANDOM_DECOMPOSITIONS, ..SuiteConfig::default() };
    let checks = decomposition_checks(&cfg, &IndexOptions::default());
    let bounds: Vec<Check> = checks.iter().filter(|c| c.group != "decomposition-formula").cloned().collect();
    let heights = bounds.iter().filter(|c| c.group == "iterated-height").count();
    let (total, bad) = suite_failures(&bounds);
    outcome(bad.is_empty(), format!("{} ({heights} height conclusions checked)", summarize("bound and height rows", total, &bad)))
}

fn tmp_file(name: &str, body: &str) -> PathBuf {
    let p = PathBuf::from(env!("CARGO_TARGET_TMPDIR")).join(name);
    std::fs::write(&p, body).unwrap();
    p
}

fn analyze_config(surface: PathBuf) -> RunConfig {
    RunConfig { surface: Some(surface), reproducible: true, ..RunConfig::default() }.resolve().unwrap()
}

fn end_to_end() -> Outcome {
    let start = Instant::now();
    let cfg = analyze_config(tmp_file("acceptance_e12.json", r#"{ "n": 2, "kappa": 0, "radii": [1.0, 1.2] }"#));
    let report = match run(Command::EllipsoidAnalyze, &cfg) {
        Ok(r) => r,
        Err(e) => return outcome(false, e.to_string()),
    };
    let t = start.elapsed();
    let (lo, hi) = (PI * (1.0 - ACTION_REL_TOL), PI * 1.44 * (1.0 + ACTION_REL_TOL));
    let orbits = report.results["orbits"].as_array().cloned().unwrap_or_default();
    let good: Vec<f64> = orbits
        .iter()
        .filter(|o| {
            let a = o["action"].as_f64().unwrap_or(f64::NAN);
            let on_circle = o["floquet"]["report"]["multipliers"]
                .as_array()
                .map(|ms| {
                    ms.iter()
                        .filter(|z| (z["modulus"].as_f64().unwrap_or(0.0).ln().abs()) <= TOL_CIRCLE)
                        .map(|z| z["multiplicity"].as_u64().unwrap_or(0))
                        .sum::<u64>()
                })
                .unwrap_or(0);
            o["symmetry_class"] == "p-symmetric" && a >= lo && a <= hi && on_circle >= 4
        })
        .map(|o| o["action"].as_f64().unwrap())
        .collect();
    let headline = report.verdict("two elliptic P-symmetric orbits").map(|v| v.status);
    let ok = good.len() >= 2 && headline == Some(Status::Pass) && report.failures() == 0 && t < BUDGET_END_TO_END;
    outcome(
        ok,
        format!(
            "{} qualifying orbits, actions/π {:?}, report failures {}, {:.1}s (budget {}s)",
            good.len(),
            good.iter().map(|a| (a / PI * 1e6).round() / 1e6).collect::<Vec<_>>(),
            report.failures(),
            t.as_secs_f64(),
            BUDGET_END_TO_END.as_secs()
        ),
    )
}

fn sphere_anchor() -> Outcome {
    let g = ellipsoid(2, 0, &[1.0, 1.0]);
    let orbits = match find_critical_points(&g, &FinderOptions { restarts: 1, ..FinderOptions::default() }) {
        Ok(o) if !o.is_empty() => o,
        other => return outcome(false, format!("no orbit: {other:?}")),
    };
    let o = &orbits[0];
    let h = match hessian_index(o, &g, 1, &DEFAULT_SCHEDULE, HessianRoute::Reduced) {
        Ok(h) => h,
        Err(e) => return outcome(false, e.to_string()),
    };
    let ok = (h.i, h.nu) == (0, 3)
        && (o.action - PI).abs() <= SPHERE_TOL
        && (o.minimal_period - 2.0 * PI).abs() <= SPHERE_TOL
        && o.symmetry_class == SymmetryClass::PSymmetric;
    outcome(
        ok,
        format!(
            "(i, ν) = ({}, {}), action − π = {:.2e}, period − 2π = {:.2e}",
            h.i,
            h.nu,
            o.action - PI,
            o.minimal_period - 2.0 * PI
        ),
    )
}

fn hygiene(families: &[(EllipsoidSurface, Vec<OrbitRecord>)]) -> Outcome {
    // Gradient against central differences at random points.
    let mut worst = 0.0f64;
    let mut rng = ChaCha8Rng::seed_from_u64(0x6d);
    for (n, kappa, radii) in [(2, 0, vec![1.0, 1.2]), (2, 1, vec![1.0, 1.1]), (3, 1, vec![1.0, 1.1, 1.2])] {
        let g = ellipsoid(n, kappa, &radii);
        let eval = PsiEvaluator::new(&g, 6);
        let len = DualElement::zeros(g.dim(), 6).to_real().len();
        for k in 0..4 {
            let x: Vec<f64> = (0..len).map(|_| rng.gen_range(-0.3..0.3)).collect();
            let u = DualElement::from_real(g.dim(), 6, &x).unwrap();
            worst = worst.max(gradient_check(&eval, &u, 10, k).unwrap_or(f64::INFINITY));
        }
    }
    // Inertia must be identical over the whole mode schedule.
    let mut unstable = Vec::new();
    let mut forms = 0;
    for (g, orbits) in families.iter().take(2) {
        for o in orbits {
            for m in [1, 2] {
                forms += 1;
                match hessian_index(o, g, m, &DEFAULT_SCHEDULE, HessianRoute::Reduced) {
                    Ok(h) if h.levels.iter().all(|l| (l.1, l.2) == (h.levels[0].1, h.levels[0].2)) => {}
                    Ok(h) => unstable.push(format!("{:?}", h.levels)),
                    Err(e) => unstable.push(e.to_string()),
                }
            }
        }
    }
    // Byte-identical reproducible reports.
    let cfg = analyze_config(tmp_file("acceptance_repro.json", r#"{ "n": 2, "kappa": 1, "radii": [1.0, 1.1] }"#));
    let a = run(Command::EllipsoidAnalyze, &cfg).and_then(|r| Ok(r.to_json().unwrap()));
    let b = run(Command::EllipsoidAnalyze, &cfg).and_then(|r| Ok(r.to_json().unwrap()));
    let identical = matches!((&a, &b), (Ok(x), Ok(y)) if x == y);
    let ok = worst <= GRADIENT_REL_TOL && unstable.is_empty() && forms > 0 && identical;
    outcome(
        ok,
        format!(
            "gradient rel. error {worst:.2e} (tol {GRADIENT_REL_TOL:e}); inertia stable on {}/{forms} forms over {DEFAULT_SCHEDULE:?}; reports identical: {identical}",
            forms - unstable.len()
        ),
    )
}

fn main() {
    let start = Instant::now();
    let mut failed = 0;
    let mut report = |id: usize, name: &str, f: &dyn Fn() -> Outcome| {
        let t = Instant::now();
        let o = f();
        if !o.passed {
            failed += 1;
        }
        println!("{} [{id:>2}] {name}: {} ({:.1}s)", if o.passed { "PASS" } else { "FAIL" }, o.detail, t.elapsed().as_secs_f64());
    };
    report(1, "ellipsoid index identity", &ellipsoid_grid);
    report(2, "iteration sum over roots of unity", &bott_identity);
    report(3, "case iteration formulas", &case_formulas);
    report(4, "splitting numbers", &splitting_numbers);
    let families = pinched_orbits();
    report(5, "Hessian vs crossing index on ellipsoid orbits", &|| cross_oracle(&families));
    report(6, "iterated-index bounds and height conclusions", &iterated_bounds);
    report(7, "index bounds from pinching", &|| pinching_index_bounds(&families));
    report(8, "two elliptic P-symmetric orbits on radii (1, 1.2)", &end_to_end);
    report(9, "round sphere anchor", &sphere_anchor);
    report(10, "numerical hygiene", &|| hygiene(&families));
    println!("acceptance: {} criteria failed, {:.1}s total", failed, start.elapsed().as_secs_f64());
    if failed > 0 {
        std::process::exit(1);
    }
}
