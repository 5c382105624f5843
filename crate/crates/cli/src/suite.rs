//! Property matrix behind `verify-suite`: closed iteration formulas against
//! crossing counts, tabled splitting numbers against their numeric limits,
//! splitting-number identities on random ⋄-products, and the iterated-index
//! bounds on random normal-form decompositions.

use crate::pathspec::winding_polar_path;
use psym::index::{index_crossing, iterate_closed_form, iterate_closed_form_decomposition, theorem37_check, IndexOptions};
use psym::normal_form::{
    build_basic_form, splitting_numbers_numeric, BasicForm, CaseTag, NormalFormDecomposition, SplittingTable,
    DEFAULT_EPSILON_SCHEDULE,
};
use psym::path::{extend_by_symmetry, integrate_fundamental, CoefficientFunction, SymplecticPath};
use psym::sym::{diamond_all, dilation, elliptic_height, krein_type, sign_pattern_p, standard_p, UnitCircleValue};
use psym::{Dim, Mat, Tolerances};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};
use std::f64::consts::PI;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SuiteConfig {
    /// `m` of the `(2m−1)`-th iterates checked against the closed forms.
    pub m_range: Vec<usize>,
    /// `(n, κ)` of the padded case paths.
    pub dims: Vec<(usize, usize)>,
    /// Angles of the Case 7–9 representatives.
    pub thetas: Vec<f64>,
    /// Extra windings `e^{2πktJ}` of the case paths (they shift `i₁`).
    pub loops: Vec<i32>,
    pub random_products: usize,
    pub decompositions: usize,
    /// How many of the random decompositions also get crossing counts.
    pub crossing_sample: usize,
    pub epsilon_schedule: Vec<f64>,
    pub seed: u64,
    /// Swaps the Case 7 table entries (mutation fixture).
    #[serde(skip_serializing_if = "std::ops::Not::not")]
    pub flip_case7: bool,
}

impl Default for SuiteConfig {
    fn default() -> Self {
        SuiteConfig {
            m_range: vec![1, 2, 3, 4],
            dims: vec![(2, 0), (2, 1)],
            thetas: vec![2.0, 2.0 * PI / 3.0],
            loops: vec![0, 1],
            random_products: 200,
            decompositions: 1000,
            crossing_sample: 20,
            epsilon_schedule: DEFAULT_EPSILON_SCHEDULE.to_vec(),
            seed: 0x5eed,
            flip_case7: false,
        }
    }
}

impl SuiteConfig {
    pub fn validate(&self) -> Result<(), String> {
        if self.m_range.iter().any(|&m| m == 0) {
            return Err("suite.m_range values must be positive".into());
        }
        if let Some(&(n, k)) = self.dims.iter().find(|(n, k)| Dim::new(*n, *k).is_err()) {
            return Err(format!("suite.dims contains invalid (n, κ) = ({n}, {k})"));
        }
        if self.thetas.iter().any(|&t| !(t > 0.0 && t < 2.0 * PI && (t - PI).abs() > 1e-9)) {
            return Err("suite.thetas must lie in (0, π) ∪ (π, 2π)".into());
        }
        let e = &self.epsilon_schedule;
        if e.len() < 2 || e.windows(2).any(|w| !(w[0] > w[1] && w[1] > 0.0)) {
            return Err("suite.epsilon_schedule must be strictly decreasing and positive".into());
        }
        Ok(())
    }
}

/// One row of the property matrix.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Check {
    pub group: String,
    pub name: String,
    pub passed: bool,
    pub expected: Value,
    pub expected_oracle: String,
    pub observed: Value,
    pub observed_oracle: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
}

impl Check {
    fn compare<T: PartialEq + Serialize>(group: &str, name: String, expected: (T, &str), observed: (T, &str)) -> Self {
        Check {
            group: group.into(),
            name,
            passed: expected.0 == observed.0,
            expected: json!(expected.0),
            expected_oracle: expected.1.into(),
            observed: json!(observed.0),
            observed_oracle: observed.1.into(),
            error: None,
        }
    }

    fn failed(group: &str, name: String, error: String) -> Self {
        Check {
            group: group.into(),
            name,
            passed: false,
            expected: Value::Null,
            expected_oracle: String::new(),
            observed: Value::Null,
            observed_oracle: String::new(),
            error: Some(error),
        }
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct GroupCount {
    pub group: String,
    pub passed: usize,
    pub failed: usize,
}

#[derive(Clone, Debug, Serialize)]
pub struct SuiteReport {
    pub summary: Vec<GroupCount>,
    pub checks: Vec<Check>,
}

impl SuiteReport {
    pub fn failures(&self) -> usize {
        self.checks.iter().filter(|c| !c.passed).count()
    }

    fn from_checks(checks: Vec<Check>) -> Self {
        let mut summary: Vec<GroupCount> = Vec::new();
        for c in &checks {
            let pos = match summary.iter().position(|g| g.group == c.group) {
                Some(p) => p,
                None => {
                    summary.push(GroupCount { group: c.group.clone(), ..GroupCount::default() });
                    summary.len() - 1
                }
            };
            if c.passed {
                summary[pos].passed += 1;
            } else {
                summary[pos].failed += 1;
            }
        }
        SuiteReport { summary, checks }
    }
}

pub const ORACLE_CROSSING: &str = "crossing-count";
pub const ORACLE_CLOSED_FORM: &str = "closed-form";
pub const ORACLE_TABLE: &str = "splitting-table";
pub const ORACLE_SPLITTING: &str = "splitting-limit";
pub const ORACLE_KREIN: &str = "krein-form";
pub const ORACLE_SPECTRUM: &str = "eigenvalues";

/// Basic normal forms standing for Cases 1–9, with the Case 7–9 angles given.
pub fn case_representatives(thetas: &[f64]) -> Vec<(BasicForm, CaseTag)> {
    let n1 = |lambda: f64, b: f64, case: u8| (BasicForm::N1 { lambda, b }, CaseTag::new(case));
    let mut reps = vec![n1(1.0, 1.0, 1), n1(1.0, 0.0, 2), n1(1.0, -1.0, 3), n1(-1.0, -1.0, 4), n1(-1.0, 0.0, 5), n1(-1.0, 1.0, 6)];
    for &t in thetas {
        reps.push((BasicForm::R { theta: t }, CaseTag::with_theta(7, t)));
        reps.push((BasicForm::n2_scaled(t, 0.7), CaseTag::with_theta(8, t)));
        reps.push((BasicForm::n2_scaled(t, -0.7), CaseTag::with_theta(9, t)));
    }
    reps
}

/// `block ⋄ D(2)^{⋄k}` (or the padding first) of size `2n`.
pub fn padded(form: &BasicForm, n: usize, pad_front: bool) -> Result<Mat<f64>, String> {
    let block: Mat<f64> = build_basic_form(form).map_err(|e| e.to_string())?;
    if block.nrows() > 2 * n {
        return Err(format!("block of size {} does not fit n = {n}", block.nrows()));
    }
    let pads = (2 * n - block.nrows()) / 2;
    let mut parts = vec![dilation(2.0); pads];
    if pad_front {
        parts.push(block);
    } else {
        parts.insert(0, block);
    }
    diamond_all(&parts).map_err(|e| e.to_string())
}

fn describe(tag: &CaseTag) -> String {
    match tag.theta {
        Some(t) => format!("case {} θ={t:.6}", tag.case_id),
        None => format!("case {}", tag.case_id),
    }
}

struct CaseJob {
    form: BasicForm,
    tag: CaseTag,
    dim: Dim,
    pad_front: bool,
    loops: i32,
}

fn case_jobs(cfg: &SuiteConfig) -> Vec<CaseJob> {
    let mut jobs = Vec::new();
    for &(n, kappa) in &cfg.dims {
        let dim = Dim::new(n, kappa).expect("validated");
        for (form, tag) in case_representatives(&cfg.thetas) {
            if form.size() > 2 * n {
                continue;
            }
            let sides: &[bool] = if form.size() < 2 * n { &[true, false] } else { &[true] };
            for &pad_front in sides {
                for &loops in &cfg.loops {
                    jobs.push(CaseJob { form: form.clone(), tag, dim, pad_front, loops });
                }
            }
        }
    }
    jobs
}

fn job_label(j: &CaseJob) -> String {
    format!(
        "{} n={} κ={} pad={} loops={}",
        describe(&j.tag),
        j.dim.n(),
        j.dim.kappa(),
        if j.pad_front { "front" } else { "back" },
        j.loops
    )
}

/// A path `γ` on `[0, 1]` with `γ(1)P = x`, declared P-symmetric.
pub fn path_for(x: &Mat<f64>, p: &Mat<f64>, loops: i32) -> Result<psym::path::SymplecticPath<f64>, String> {
    Ok(winding_polar_path(&(x * p), loops)?.assume_p_symmetric())
}

fn case_formula_rows(job: &CaseJob, m_range: &[usize], opts: &IndexOptions) -> Vec<Check> {
    const G: &str = "case-formula";
    let label = job_label(job);
    let one = UnitCircleValue::one();
    let p = standard_p::<f64>(job.dim).into_inner();
    let setup = padded(&job.form, job.dim.n(), job.pad_front).and_then(|x| path_for(&x, &p, job.loops)).and_then(|path| {
        let i1 = index_crossing(&path, one, &p, opts).map_err(|e| e.to_string())?.i;
        Ok((path, i1))
    });
    let (path, i1) = match setup {
        Ok(v) => v,
        Err(e) => return vec![Check::failed(G, label, e)],
    };
    m_range
        .iter()
        .map(|&m| {
            let name = format!("{label} m={m}");
            let direct = extend_by_symmetry(&path, &p, 2 * m - 1)
                .and_then(|it| index_crossing(&it, one, &p, opts))
                .map(|r| (r.i, r.nu));
            let closed = iterate_closed_form(&job.tag, i1, m).map(|r| (r.i, r.nu));
            match (closed, direct) {
                (Ok(c), Ok(d)) => Check::compare(G, name, (c, ORACLE_CLOSED_FORM), (d, ORACLE_CROSSING)),
                (c, d) => Check::failed(G, name, format!("{:?} / {:?}", c.err(), d.err())),
            }
        })
        .collect()
}

/// Closed iteration formulas of Cases 1–9 against crossing counts of the
/// iterated paths.
pub fn case_formula_checks(cfg: &SuiteConfig, opts: &IndexOptions) -> Vec<Check> {
    case_jobs(cfg).par_iter().flat_map_iter(|j| case_formula_rows(j, &cfg.m_range, opts)).collect()
}

/// Points where a tag's splitting numbers are tabled, plus off-spectrum points.
fn splitting_points(tag: &CaseTag) -> Vec<UnitCircleValue<f64>> {
    let mut pts = tag.circle_spectrum();
    pts.push(UnitCircleValue::from_angle(1.0));
    match tag.case_id {
        1..=3 => pts.push(UnitCircleValue::minus_one()),
        4..=6 => pts.push(UnitCircleValue::one()),
        _ => {}
    }
    pts
}

fn angle_label(w: UnitCircleValue<f64>) -> String {
    format!("ω=e^(i·{:.6})", w.angle())
}

/// Tabled splitting numbers against the one-sided index jumps.
pub fn splitting_checks(cfg: &SuiteConfig, opts: &IndexOptions) -> Vec<Check> {
    const G: &str = "splitting-table";
    let table = SplittingTable { flip_case7: cfg.flip_case7 };
    let mut jobs = Vec::new();
    for &(n, kappa) in &cfg.dims {
        let dim = Dim::new(n, kappa).expect("validated");
        for (form, tag) in case_representatives(&cfg.thetas) {
            if form.size() <= 2 * n {
                for w in splitting_points(&tag) {
                    jobs.push((form.clone(), tag, dim, w));
                }
            }
        }
    }
    jobs.par_iter()
        .map(|(form, tag, dim, w)| {
            let name = format!("{} n={} κ={} {}", describe(tag), dim.n(), dim.kappa(), angle_label(*w));
            let p = standard_p::<f64>(*dim).into_inner();
            let numeric = padded(form, dim.n(), true)
                .and_then(|x| path_for(&x, &p, 0))
                .and_then(|path| splitting_numbers_numeric(&path, *w, &p, &cfg.epsilon_schedule, opts).map_err(|e| e.to_string()));
            match (table.lookup(tag, *w), numeric) {
                (Ok(t), Ok(s)) => Check::compare(G, name, (t.pair(), ORACLE_TABLE), (s.pair(), ORACLE_SPLITTING)),
                (t, s) => Check::failed(G, name, format!("{:?} / {:?}", t.err(), s.err())),
            }
        })
        .collect()
}

/// Random basic normal forms filling `planes` symplectic planes.
pub fn random_blocks(rng: &mut impl Rng, planes: usize) -> Vec<(BasicForm, CaseTag)> {
    let angle = |rng: &mut dyn rand::RngCore| loop {
        let t: f64 = rng.gen_range(0.2..2.0 * PI - 0.2);
        if (t - PI).abs() > 0.2 {
            return t;
        }
    };
    let mut out = Vec::new();
    let mut left = planes;
    while left > 0 {
        let pick = rng.gen_range(0..if left >= 2 { 10 } else { 8 });
        let block = match pick {
            0..=5 => {
                let (lambda, b) = [(1.0, 1.0), (1.0, 0.0), (1.0, -1.0), (-1.0, -1.0), (-1.0, 0.0), (-1.0, 1.0)][pick];
                (BasicForm::N1 { lambda, b }, CaseTag::new(pick as u8 + 1))
            }
            6 => {
                let t = angle(rng);
                (BasicForm::R { theta: t }, CaseTag::with_theta(7, t))
            }
            7 => {
                let lambda = if rng.gen_bool(0.5) { 2.0 } else { -2.0 };
                (BasicForm::D { lambda }, CaseTag::new(10))
            }
            _ => {
                let t = angle(rng);
                let a = if pick == 8 { 0.7 } else { -0.7 };
                (BasicForm::n2_scaled(t, a), CaseTag::with_theta(if pick == 8 { 8 } else { 9 }, t))
            }
        };
        left -= block.0.size() / 2;
        out.push(block);
    }
    out
}

/// A random P-symmetric coefficient `A(t) = cI + a·S₀ + a·S₁ sin(πt/T)` on
/// `[0, T]`, with `S₀` commuting and `S₁` anticommuting with `P`, so that the
/// `P`-continuation is `A(t + T) = P A(t) P`. Close to a rotation, so indices
/// are nontrivial and the flow stays well conditioned.
pub fn random_p_symmetric_path(dim: Dim, rng: &mut impl Rng) -> Result<SymplecticPath<f64>, String> {
    let size = dim.size();
    let p = standard_p::<f64>(dim).into_inner();
    let mut random_sym = || {
        let m = Mat::<f64>::from_fn(size, size, |_, _| rng.gen_range(-1.0..1.0));
        (&m + m.transpose()) * 0.5
    };
    let (a, b) = (random_sym(), random_sym());
    let s0 = (&a + &p * &a * &p) * 0.5;
    let s1 = (&b - &p * &b * &p) * 0.5;
    let (s0, s1) = (s0 / a.norm().max(1e-12), s1 / b.norm().max(1e-12));
    let c: f64 = rng.gen_range(0.5..3.0);
    let t_half: f64 = rng.gen_range(0.5..2.0);
    let amp = 0.3;
    let coeff = CoefficientFunction::new(dim.n(), t_half, move |t: f64| {
        Mat::<f64>::identity(size, size) * c + &s0 * amp + &s1 * (amp * (PI * t / t_half).sin())
    })
    .and_then(|f| f.verify_p_symmetry(&p, 16, 1e-12))
    .map_err(|e| e.to_string())?;
    integrate_fundamental(&coeff, 256).map_err(|e| e.to_string())
}

/// A random `M₁ ⋄ … ⋄ M_k` with a random sign pattern `P = P₁ ⋄ … ⋄ P_k`.
#[derive(Clone, Debug)]
pub struct RandomProduct {
    pub blocks: Vec<(BasicForm, CaseTag)>,
    pub reflected: Vec<bool>,
}

impl RandomProduct {
    pub fn generate(rng: &mut impl Rng) -> Self {
        let planes = rng.gen_range(1..=3);
        let blocks = random_blocks(rng, planes);
        let reflected = (0..planes).map(|_| rng.gen_bool(0.5)).collect();
        RandomProduct { blocks, reflected }
    }

    /// `(X_j, P_j)` of every block and the plane range it occupies.
    fn pieces(&self) -> Result<Vec<(Mat<f64>, Mat<f64>)>, String> {
        let mut at = 0;
        self.blocks
            .iter()
            .map(|(form, _)| {
                let x: Mat<f64> = build_basic_form(form).map_err(|e| e.to_string())?;
                let k = x.nrows() / 2;
                let p = sign_pattern_p::<f64>(&self.reflected[at..at + k]).into_inner();
                at += k;
                Ok((x, p))
            })
            .collect()
    }

    fn points(&self) -> Vec<UnitCircleValue<f64>> {
        let mut pts: Vec<UnitCircleValue<f64>> = Vec::new();
        for (_, tag) in &self.blocks {
            for w in tag.circle_spectrum() {
                if pts.iter().all(|q| (q.value() - w.value()).norm() > 1e-9) {
                    pts.push(w);
                }
            }
        }
        pts
    }
}

fn splitting_of(x: &Mat<f64>, p: &Mat<f64>, w: UnitCircleValue<f64>, cfg: &SuiteConfig, opts: &IndexOptions) -> Result<(usize, usize), String> {
    let path = path_for(x, p, 0)?;
    splitting_numbers_numeric(&path, w, p, &cfg.epsilon_schedule, opts).map(|s| s.pair()).map_err(|e| e.to_string())
}

fn product_rows(k: usize, prod: &RandomProduct, cfg: &SuiteConfig, opts: &IndexOptions, tol: &Tolerances) -> Vec<Check> {
    let label = format!(
        "product #{k} [{}] P-signs {:?}",
        prod.blocks.iter().map(|(_, t)| describe(t)).collect::<Vec<_>>().join(" ⋄ "),
        prod.reflected.iter().map(|&r| if r { -1 } else { 1 }).collect::<Vec<_>>()
    );
    let pieces = match prod.pieces() {
        Ok(p) => p,
        Err(e) => return vec![Check::failed("splitting-krein", label, e)],
    };
    let x = diamond_all(&pieces.iter().map(|(x, _)| x.clone()).collect::<Vec<_>>()).expect("blocks are square");
    let p = sign_pattern_p::<f64>(&prod.reflected).into_inner();
    let mut rows = Vec::new();
    for w in prod.points() {
        let name = format!("{label} {}", angle_label(w));
        let whole = splitting_of(&x, &p, w, cfg, opts);
        let krein = krein_type(&x, w, tol).map(|(a, b)| a as i64 - b as i64).map_err(|e| e.to_string());
        rows.push(match (&krein, &whole) {
            (Ok(k), Ok(s)) => Check::compare("splitting-krein", name.clone(), (*k, ORACLE_KREIN), (s.0 as i64 - s.1 as i64, ORACLE_SPLITTING)),
            _ => Check::failed("splitting-krein", name.clone(), format!("{:?} / {:?}", krein.err(), whole.as_ref().err())),
        });
        let parts: Result<Vec<(usize, usize)>, String> = pieces.iter().map(|(xj, pj)| splitting_of(xj, pj, w, cfg, opts)).collect();
        rows.push(match (parts, &whole) {
            (Ok(parts), Ok(s)) => {
                let sum = parts.iter().fold((0, 0), |a, b| (a.0 + b.0, a.1 + b.1));
                Check::compare("splitting-additivity", name, (sum, "sum of block splitting limits"), (*s, ORACLE_SPLITTING))
            }
            (parts, whole) => Check::failed("splitting-additivity", name, format!("{:?} / {:?}", parts.err(), whole.as_ref().err())),
        });
    }
    rows
}

/// `S⁺ − S⁻ = p − q` and `⋄`-additivity of the splitting numbers on random products.
pub fn product_checks(cfg: &SuiteConfig, opts: &IndexOptions) -> Vec<Check> {
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed ^ 0x00b1_0c45);
    let products: Vec<RandomProduct> = (0..cfg.random_products).map(|_| RandomProduct::generate(&mut rng)).collect();
    products.par_iter().enumerate().flat_map_iter(|(k, prod)| product_rows(k, prod, cfg, opts, &opts.tol)).collect()
}

/// A random decomposition of size `2n` with its `i₁` and `κ`.
#[derive(Clone, Debug)]
pub struct RandomDecomposition {
    pub dec: NormalFormDecomposition,
    pub dim: Dim,
    pub i1: i64,
}

impl RandomDecomposition {
    pub fn generate(rng: &mut impl Rng) -> Self {
        let n = rng.gen_range(2..=3);
        let kappa = rng.gen_range(0..=1);
        let dec = NormalFormDecomposition::from_blocks(random_blocks(rng, n));
        RandomDecomposition { dec, dim: Dim::new(n, kappa).expect("κ < n"), i1: rng.gen_range(-2..=6) }
    }
}

/// `(i(u), ν(u), i(u³), ν(u³))` on the dual side from P-indices at `ω = 1`.
fn dual_side(dim: Dim, first: (i64, usize), third: (i64, usize)) -> (i64, i64, i64, i64) {
    let k = dim.kappa() as i64;
    (first.0 - k, first.1 as i64 - 1, third.0 - k, third.1 as i64 - 1)
}

fn decomposition_rows(k: usize, rd: &RandomDecomposition, with_crossings: bool, opts: &IndexOptions) -> Vec<Check> {
    const G: &str = "iterated-bounds";
    let label = format!(
        "decomposition #{k} n={} κ={} i₁={} [{}]",
        rd.dim.n(),
        rd.dim.kappa(),
        rd.i1,
        rd.dec.blocks.iter().map(|(_, t)| describe(t)).collect::<Vec<_>>().join(" ⋄ ")
    );
    let closed = iterate_closed_form_decomposition(&rd.dec, rd.i1, 1)
        .and_then(|a| iterate_closed_form_decomposition(&rd.dec, rd.i1, 2).map(|b| ((a.i, a.nu), (b.i, b.nu))));
    let (first, third) = match closed {
        Ok(v) => v,
        Err(e) => return vec![Check::failed(G, label, e.to_string())],
    };
    let (iu, nu, iu3, nu3) = dual_side(rd.dim, first, third);
    let mut rows = Vec::new();
    match theorem37_check(&rd.dec, iu, nu, iu3, nu3, rd.dim) {
        Err(e) => rows.push(Check::failed(G, label.clone(), e.to_string())),
        Ok(rep) => {
            let ok = rep.diff3 <= rep.bound_upper && rep.diffnu3 >= rep.bound_lower;
            rows.push(Check {
                group: G.into(),
                name: format!("{label} bounds"),
                passed: ok,
                expected: json!({ "diff3_at_most": rep.bound_upper, "diffnu3_at_least": rep.bound_lower }),
                expected_oracle: "2κ+2n / 2κ+2−2n".into(),
                observed: json!({ "diff3": rep.diff3, "diffnu3": rep.diffnu3 }),
                observed_oracle: ORACLE_CLOSED_FORM.into(),
                error: None,
            });
            if let Some(h) = rep.asserted_height() {
                let x = rd.dec.reconstruct::<f64>().expect("basic forms build");
                let e = elliptic_height(&(&x * &x), Tolerances::default().circle).height as i64;
                rows.push(Check {
                    group: "iterated-height".into(),
                    name: format!("{label} e(X²)"),
                    passed: e >= h,
                    expected: json!({ "at_least": h }),
                    expected_oracle: "iterated-bounds conclusion".into(),
                    observed: json!(e),
                    observed_oracle: ORACLE_SPECTRUM.into(),
                    error: None,
                });
            }
        }
    }
    if with_crossings {
        let p = standard_p::<f64>(rd.dim).into_inner();
        let one = UnitCircleValue::one();
        let direct = rd.dec.reconstruct::<f64>().map_err(|e| e.to_string()).and_then(|x| path_for(&x, &p, 0)).and_then(|path| {
            let a = index_crossing(&path, one, &p, opts).map_err(|e| e.to_string())?;
            let third = extend_by_symmetry(&path, &p, 3).and_then(|it| index_crossing(&it, one, &p, opts)).map_err(|e| e.to_string())?;
            let closed = iterate_closed_form_decomposition(&rd.dec, a.i, 2).map_err(|e| e.to_string())?;
            Ok(((closed.i, closed.nu), (third.i, third.nu)))
        });
        rows.push(match direct {
            Ok((c, d)) => Check::compare("decomposition-formula", format!("{label} third iterate"), (c, ORACLE_CLOSED_FORM), (d, ORACLE_CROSSING)),
            Err(e) => Check::failed("decomposition-formula", format!("{label} third iterate"), e),
        });
    }
    rows
}

/// Iterated-index bounds and their elliptic-height conclusions on random
/// decompositions; the first `crossing_sample` also go through crossing counts.
pub fn decomposition_checks(cfg: &SuiteConfig, opts: &IndexOptions) -> Vec<Check> {
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed ^ 0x7e03_3037);
    let decs: Vec<RandomDecomposition> = (0..cfg.decompositions).map(|_| RandomDecomposition::generate(&mut rng)).collect();
    decs.par_iter()
        .enumerate()
        .flat_map_iter(|(k, rd)| decomposition_rows(k, rd, k < cfg.crossing_sample, opts))
        .collect()
}

pub fn run_suite(cfg: &SuiteConfig, opts: &IndexOptions) -> SuiteReport {
    let mut checks = case_formula_checks(cfg, opts);
    checks.extend(splitting_checks(cfg, opts));
    checks.extend(product_checks(cfg, opts));
    checks.extend(decomposition_checks(cfg, opts));
    SuiteReport::from_checks(checks)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn representatives_cover_cases_one_to_nine() {
        let reps = case_representatives(&[2.0]);
        let ids: Vec<u8> = reps.iter().map(|(_, t)| t.case_id).collect();
        assert_eq!(ids, vec![1, 2, 3, 4, 5, 6, 7, 8, 9]);
        let t = Tolerances::default();
        for (form, tag) in reps {
            let x = padded(&form, 2, true).unwrap();
            let dec = psym::normal_form::decompose_mp(&x, &t).unwrap();
            assert!(dec.blocks.iter().any(|(_, b)| b.case_id == tag.case_id), "{tag:?}");
        }
    }

    #[test]
    fn random_blocks_fill_the_planes() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for planes in 1..=4 {
            for _ in 0..50 {
                let b = random_blocks(&mut rng, planes);
                assert_eq!(b.iter().map(|(f, _)| f.size()).sum::<usize>(), 2 * planes);
            }
        }
    }

    #[test]
    fn random_coefficients_are_p_symmetric() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for (n, kappa) in [(2, 0), (3, 1)] {
            let dim = Dim::new(n, kappa).unwrap();
            let path = random_p_symmetric_path(dim, &mut rng).unwrap();
            assert!(path.is_p_symmetric());
            assert!(extend_by_symmetry(&path, &standard_p::<f64>(dim).into_inner(), 3).is_ok());
        }
    }

    #[test]
    fn trivial_range_passes() {
        let cfg = SuiteConfig {
            m_range: vec![1],
            dims: vec![(2, 0)],
            thetas: vec![2.0],
            loops: vec![0],
            random_products: 3,
            decompositions: 20,
            crossing_sample: 2,
            ..SuiteConfig::default()
        };
        let rep = run_suite(&cfg, &IndexOptions::default());
        let bad: Vec<_> = rep.checks.iter().filter(|c| !c.passed).collect();
        assert!(bad.is_empty(), "{bad:#?}");
        assert!(rep.summary.iter().any(|g| g.group == "case-formula" && g.passed > 0));
    }

    #[test]
    fn flipped_table_fails_exactly_case_seven_points() {
        let cfg = SuiteConfig { dims: vec![(2, 0)], thetas: vec![2.0], flip_case7: true, ..SuiteConfig::default() };
        let rows = splitting_checks(&cfg, &IndexOptions::default());
        for c in &rows {
            let on_spectrum = c.name.starts_with("case 7") && !c.name.contains("e^(i·1.000000)");
            assert_eq!(!c.passed, on_spectrum, "{}", c.name);
        }
    }
}
