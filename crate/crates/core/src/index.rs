//! The P-index `(i_{P,ω}, ν_{P,ω})` by signed crossing count, Bott-type
//! sums over roots of unity, closed-form iteration formulas, the iterated
//! index bounds with their stability conclusions, the constant-coefficient
//! index formula and the pinching bounds.

use crate::error::{Error, Result};
use crate::normal_form::{CaseTag, NormalFormDecomposition};
use crate::path::{xi_value, SymplecticPath};
use crate::scalar::{complexify, Mat};
use crate::sym::{complex_singular_values, d_p_omega_complex, exp_j, nu_p_omega, standard_j, Dim, Tolerances, UnitCircleValue};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

/// Knobs of the crossing counter.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct IndexOptions {
    pub tol: Tolerances,
    /// Size of the fixed-endpoint bump perturbation.
    pub delta: f64,
    /// Seeds of the perturbation directions (two voters and a tie-breaker).
    pub seeds: [u64; 3],
    /// Largest entrywise change of the path between neighbouring grid points.
    pub max_step: f64,
    /// Minimum number of uniform grid cells on `γ ∗ ξ_n`.
    pub min_grid: usize,
    /// Decreasing schedule of `s` in `γ(t)e^{−stJ/T}` for degenerate endpoints.
    pub endpoint_schedule: Vec<f64>,
    /// Bisection stops when the bracket is shorter than this (in path time).
    pub root_tol: f64,
}

impl Default for IndexOptions {
    fn default() -> Self {
        IndexOptions {
            tol: Tolerances::default(),
            delta: 0.1,
            seeds: [0x5eed_0001, 0x5eed_0002, 0x5eed_0003],
            max_step: 0.05,
            min_grid: 256,
            endpoint_schedule: vec![5e-2, 2e-2, 1e-2, 1e-3, 1e-4],
            root_tol: 1e-10,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CrossingRecord {
    /// Parameter on `γ ∗ ξ_n`, rescaled to `[0, 2]` (`[0, 1]` is `ξ_n`).
    pub t: f64,
    pub sign: i8,
    pub on_xi_segment: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct IndexPair {
    pub i: i64,
    pub nu: usize,
    pub at_omega: UnitCircleValue<f64>,
    pub perturbation_used: Option<f64>,
    pub crossings: Vec<CrossingRecord>,
}

impl IndexPair {
    pub fn plain(i: i64, nu: usize, at_omega: UnitCircleValue<f64>) -> Self {
        IndexPair { i, nu, at_omega, perturbation_used: None, crossings: Vec::new() }
    }
}

/// `E(a) = min{k ∈ Z : k ≥ a}`, `φ(a) = E(a) − [a]`, `[a]`, `{a}`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CeilingParts {
    pub e: i64,
    pub phi: i64,
    pub floor: i64,
    pub frac: f64,
}

/// Values within this distance of an integer are treated as integers.
pub const INTEGER_TOL: f64 = 1e-12;
/// Integer band for iteration ratios such as `(2m − 1)θ/2π`.
pub const RATIO_INTEGER_TOL: f64 = 1e-9;

pub fn ceiling_parts(a: f64) -> CeilingParts {
    ceiling_parts_tol(a, INTEGER_TOL)
}

pub fn ceiling_parts_tol(a: f64, tol: f64) -> CeilingParts {
    let r = a.round();
    if (a - r).abs() <= tol {
        let k = r as i64;
        return CeilingParts { e: k, phi: 0, floor: k, frac: 0.0 };
    }
    let f = a.floor();
    CeilingParts { e: a.ceil() as i64, phi: 1, floor: f as i64, frac: a - f }
}

/// Smallest singular value of `M − ωP` below which a cell counts as close
/// to the singular set.
const NEAR_SINGULAR: f64 = 0.25;
/// Grid step multiplier inside such cells.
const NEAR_STEP_FACTOR: f64 = 0.04;
/// Cells are split while the path moves more than this fraction of the
/// second smallest singular value of `M − ωP`.
const CLUSTER_STEP_FACTOR: f64 = 0.25;

fn sign_of(x: f64) -> i8 {
    if x > 0.0 {
        1
    } else if x < 0.0 {
        -1
    } else {
        0
    }
}

/// Width of the ramps of the bump profile.
const BUMP_RAMP: f64 = 0.1;

fn ramp(x: f64) -> f64 {
    let w = (0.5 * PI * (x / BUMP_RAMP).min(1.0)).sin();
    w * w
}

/// `γ ∗ ξ_n` reparametrized on `[0, 2]`, with the bump perturbation
/// `exp(a(s) J S)` applied on the right. The amplitude rises from `0` to `δ`
/// at the start and, near the end, moves to `δ_end`: a value for which
/// `γ(T) exp(τ δ_end JS)`, `τ ∈ [0, 1]`, provably stays off the singular set, so
/// the perturbed path is homotopic to `γ ∗ ξ_n` with nondegenerate endpoints
/// and crossings close to `T` are still split by a visible amount. The moved
/// endpoints of the degenerate schedule use `δ_end = 0`, the bump fading out.
struct Concatenation<'a> {
    path: &'a SymplecticPath<f64>,
    n: usize,
    bump: Mat<f64>,
    delta: f64,
    delta_end: f64,
    omega: UnitCircleValue<f64>,
    p: &'a Mat<f64>,
}

impl Concatenation<'_> {
    fn matrix(&self, s: f64) -> Mat<f64> {
        let base = if s <= 1.0 {
            xi_value(self.n, 1.0, s)
        } else {
            self.path.eval((s - 1.0) * self.path.t_end())
        };
        let amp = if s <= 1.0 {
            self.delta * ramp(s)
        } else {
            self.delta_end + (self.delta - self.delta_end) * ramp(2.0 - s)
        };
        if amp == 0.0 {
            base
        } else {
            base * (&self.bump * amp).exp()
        }
    }

    fn d(&self, m: &Mat<f64>) -> f64 {
        d_p_omega_complex(m, self.omega, self.p).re
    }

    fn f(&self, s: f64) -> f64 {
        self.d(&self.matrix(s))
    }

    /// Sign of `D` on the positive side of the singular set at `m`.
    fn positive_side(&self, m: &Mat<f64>) -> Option<i8> {
        for h in [1e-8, 1e-7, 1e-6, 1e-5, 1e-4] {
            let plus = self.d(&(m * exp_j(self.n, h)));
            let minus = self.d(&(m * exp_j(self.n, -h)));
            let (sp, sm) = (sign_of(plus), sign_of(minus));
            if sp != 0 && sm != 0 && sp != sm {
                return Some(sp);
            }
        }
        None
    }
}

fn random_symmetric(dim: usize, seed: u64) -> Mat<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut s = Mat::<f64>::zeros(dim, dim);
    for i in 0..dim {
        for j in i..dim {
            let v: f64 = rng.gen_range(-1.0..1.0);
            s[(i, j)] = v;
            s[(j, i)] = v;
        }
    }
    let norm = s.norm();
    s / norm
}

/// Signed crossings of one perturbed concatenation.
fn count_once(
    path: &SymplecticPath<f64>,
    omega: UnitCircleValue<f64>,
    p: &Mat<f64>,
    seed: u64,
    end_bump: bool,
    opts: &IndexOptions,
) -> Result<Vec<CrossingRecord>> {
    let n = path.n();
    let bump = standard_j::<f64>(n) * random_symmetric(2 * n, seed);
    let sigma_min = |m: &Mat<f64>| {
        let a = complexify(m) - complexify(p) * omega.value();
        complex_singular_values(&a).last().copied().unwrap_or(0.0)
    };
    let end = path.endpoint();
    let end_gap = sigma_min(&end);
    // σ_min is 1-Lipschitz and ‖e^{aJS} − I‖ ≤ a·e^a for ‖S‖ ≤ 1, so this
    // amplitude keeps every γ(T)e^{τ δ_end JS} at least half the gap away
    // from the singular set.
    let end_norm = end.norm();
    let bound = if end_bump { opts.delta.min(end_gap / (2.0 * std::f64::consts::E * end_norm)) } else { 0.0 };
    let delta_end = if bound < 1e-12 { 0.0 } else { bound };
    let cat = Concatenation { path, n, bump, delta: opts.delta, delta_end, omega, p };

    // Adaptive grid: split cells until the path moves less than max_step,
    // and much less than that close to the singular set, where the
    // perturbation splits a degenerate crossing into nearby simple ones.
    // (near the singular set, second smallest singular value)
    let near = |m: &Mat<f64>| {
        let a = complexify(m) - complexify(p) * omega.value();
        let sv = complex_singular_values(&a);
        let k = sv.len();
        (sv[k - 1] < NEAR_SINGULAR, if k > 1 { sv[k - 2] } else { f64::INFINITY })
    };
    let cells = opts.min_grid.max(16);
    let mut grid: Vec<(f64, Mat<f64>, (bool, f64))> = (0..=cells)
        .map(|k| {
            let s = 2.0 * k as f64 / cells as f64;
            let m = cat.matrix(s);
            let nr = near(&m);
            (s, m, nr)
        })
        .collect();
    let mut refined: Vec<(f64, Mat<f64>, (bool, f64))> = Vec::with_capacity(grid.len() * 2);
    for _ in 0..60 {
        let mut changed = false;
        refined.clear();
        for w in grid.windows(2) {
            refined.push(w[0].clone());
            let moved = (&w[1].1 - &w[0].1).amax();
            let scale = 1.0 + w[0].1.amax();
            let step = if w[0].2 .0 || w[1].2 .0 { opts.max_step * NEAR_STEP_FACTOR } else { opts.max_step };
            // Clustered roots keep a second singular value of their own size.
            let cluster = CLUSTER_STEP_FACTOR * w[0].2 .1.min(w[1].2 .1);
            if (moved > step * scale || moved > cluster) && w[1].0 - w[0].0 > 1e-9 {
                let mid = 0.5 * (w[0].0 + w[1].0);
                let m = cat.matrix(mid);
                let nr = near(&m);
                refined.push((mid, m, nr));
                changed = true;
            }
        }
        refined.push(grid[grid.len() - 1].clone());
        std::mem::swap(&mut grid, &mut refined);
        if !changed {
            break;
        }
    }
    let vals: Vec<(f64, f64)> = grid.iter().map(|(s, m, _)| (*s, cat.d(m))).collect();

    let mut brackets: Vec<(f64, f64, f64, f64)> = Vec::new();
    for w in vals.windows(2) {
        let ((a, fa), (b, fb)) = (w[0], w[1]);
        if sign_of(fa) * sign_of(fb) < 0 {
            brackets.push((a, fa, b, fb));
        }
    }
    // A pair of roots inside one cell leaves no sign change; look at every
    // local extremum of D that points toward zero.
    for k in 1..vals.len().saturating_sub(1) {
        let (a, fa) = vals[k - 1];
        let (_, fb) = vals[k];
        let (c, fc) = vals[k + 1];
        let sg = sign_of(fb);
        if sg == 0 || sign_of(fa) != sg || sign_of(fc) != sg {
            continue;
        }
        if fb.abs() < fa.abs() && fb.abs() <= fc.abs() {
            if let Some((x, fx)) = golden_toward_zero(&cat, a, c, sg) {
                brackets.push((a, fa, x, fx));
                brackets.push((x, fx, c, fc));
            }
        }
    }

    // Exact zeros on the grid are moved off by a tiny shift.
    for k in 0..vals.len() {
        if vals[k].1 == 0.0 && k > 0 && k + 1 < vals.len() {
            let (s, _) = vals[k];
            let (l, r) = (cat.f(s - 1e-9), cat.f(s + 1e-9));
            if sign_of(l) * sign_of(r) < 0 {
                brackets.push((s - 1e-9, l, s + 1e-9, r));
            }
        }
    }

    let t_scale = path.t_end().max(1.0);
    let mut out = Vec::with_capacity(brackets.len());
    for (mut a, mut fa, mut b, fb) in brackets {
        while (b - a) * t_scale > opts.root_tol {
            let mid = 0.5 * (a + b);
            let fm = cat.f(mid);
            if fm == 0.0 {
                a = mid;
                b = mid;
                break;
            }
            if sign_of(fm) == sign_of(fa) {
                a = mid;
                fa = fm;
            } else {
                b = mid;
            }
        }
        let root = 0.5 * (a + b);
        let m = cat.matrix(root);
        let side = cat.positive_side(&m).ok_or_else(|| {
            Error::Convergence(format!("tangential crossing at s = {root} could not be resolved"))
        })?;
        out.push(CrossingRecord { t: root, sign: sign_of(fb) * side, on_xi_segment: root <= 1.0 });
    }
    out.sort_by(|x, y| x.t.partial_cmp(&y.t).unwrap_or(std::cmp::Ordering::Equal));
    Ok(out)
}

/// Golden-section search on `[a, c]` for a point where `D` has the sign
/// opposite to `sg`.
fn golden_toward_zero(cat: &Concatenation<'_>, a: f64, c: f64, sg: i8) -> Option<(f64, f64)> {
    let g = 0.5 * (5f64.sqrt() - 1.0);
    let obj = |s: f64| f64::from(sg) * cat.f(s);
    let (mut lo, mut hi) = (a, c);
    let mut x1 = hi - g * (hi - lo);
    let mut x2 = lo + g * (hi - lo);
    let (mut f1, mut f2) = (obj(x1), obj(x2));
    for _ in 0..60 {
        if f1 < 0.0 {
            return Some((x1, cat.f(x1)));
        }
        if f2 < 0.0 {
            return Some((x2, cat.f(x2)));
        }
        if hi - lo < 1e-13 {
            break;
        }
        if f1 < f2 {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - g * (hi - lo);
            f1 = obj(x1);
        } else {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + g * (hi - lo);
            f2 = obj(x2);
        }
    }
    None
}

/// Crossing count with seed voting: two seeds must agree, otherwise a
/// third decides.
fn count_voted(
    path: &SymplecticPath<f64>,
    omega: UnitCircleValue<f64>,
    p: &Mat<f64>,
    end_bump: bool,
    opts: &IndexOptions,
) -> Result<(i64, Vec<CrossingRecord>)> {
    let run = |seed| count_once(path, omega, p, seed, end_bump, opts).map(|c| (c.iter().map(|r| i64::from(r.sign)).sum::<i64>(), c));
    let first = run(opts.seeds[0]);
    let second = run(opts.seeds[1]);
    match (&first, &second) {
        (Ok(a), Ok(b)) if a.0 == b.0 => return first,
        _ => {}
    }
    let third = run(opts.seeds[2]);
    let votes: Vec<&(i64, Vec<CrossingRecord>)> = [&first, &second, &third].into_iter().filter_map(|r| r.as_ref().ok()).collect();
    for (k, v) in votes.iter().enumerate() {
        if votes.iter().skip(k + 1).any(|w| w.0 == v.0) {
            return Ok((*v).clone());
        }
    }
    Err(Error::Convergence(format!(
        "crossing counts disagree across perturbation seeds: {:?}",
        [&first, &second, &third].iter().map(|r| r.as_ref().map(|x| x.0).map_err(|e| e.to_string())).collect::<Vec<_>>()
    )))
}

/// `(i_{P,ω}(γ), ν_{P,ω}(γ))` as the intersection number of `γ ∗ ξ_n`
/// with `{D_{P,ω} = 0}`. A degenerate endpoint is moved by
/// `γ(t)e^{−stJ/T}` for the decreasing schedule of `s`, and the count is
/// taken from the first two neighbouring values that agree.
pub fn index_crossing(
    path: &SymplecticPath<f64>,
    omega: UnitCircleValue<f64>,
    p: &Mat<f64>,
    opts: &IndexOptions,
) -> Result<IndexPair> {
    if p.nrows() != 2 * path.n() {
        return Err(Error::Dimension("P does not match the path size".into()));
    }
    let start_gap = (path.start() - Mat::<f64>::identity(p.nrows(), p.nrows())).amax();
    if start_gap > 1e-8 {
        return Err(Error::Parameter(format!("path must start at I (gap {start_gap:e})")));
    }
    let nu = nu_p_omega(&path.endpoint(), omega, p, opts.tol.rank);
    if nu == 0 {
        let (i, crossings) = count_voted(path, omega, p, true, opts)?;
        return Ok(IndexPair { i, nu, at_omega: omega, perturbation_used: None, crossings });
    }
    let sched = &opts.endpoint_schedule;
    if sched.len() < 2 || sched.windows(2).any(|w| !(w[0] > w[1] && w[1] > 0.0)) {
        return Err(Error::Parameter("endpoint schedule must be strictly decreasing and positive".into()));
    }
    let mut values: Vec<(f64, Option<(i64, Vec<CrossingRecord>)>)> = Vec::with_capacity(sched.len());
    let end = path.endpoint();
    let gap = |sigma: f64| {
        let a = complexify(&(&end * exp_j(path.n(), -sigma))) - complexify(p) * omega.value();
        complex_singular_values(&a).last().copied().unwrap_or(0.0)
    };
    for &s in sched {
        let moved = path.rotated_back(s);
        // The rotation arc must not come back toward the singular set
        // before reaching `s`.
        let mut peak = 0.0f64;
        let clean = (1..=32).all(|k| {
            let g = gap(s * k as f64 / 32.0);
            peak = peak.max(g);
            g >= 0.5 * peak
        });
        if !clean || nu_p_omega(&moved.endpoint(), omega, p, opts.tol.rank) != 0 {
            values.push((s, None));
            continue;
        }
        let v = count_voted(&moved, omega, p, false, opts);
        if let Err(e) = &v {
            log::debug!("moved endpoint s = {s}: {e}");
        }
        let prev = values.last().and_then(|(_, x)| x.as_ref().map(|x| x.0));
        let agrees = matches!((prev, &v), (Some(a), Ok(b)) if a == b.0);
        values.push((s, v.ok()));
        if agrees {
            break;
        }
    }
    // First pair of neighbouring schedule entries that agree.
    let settled = values.windows(2).find_map(|w| match (&w[0].1, &w[1].1) {
        (Some(a), Some(b)) if a.0 == b.0 => Some((w[1].0, b)),
        _ => None,
    });
    match settled {
        Some((s, b)) => Ok(IndexPair { i: b.0, nu, at_omega: omega, perturbation_used: Some(s), crossings: b.1.clone() }),
        None => Err(Error::Convergence(format!(
            "degenerate-endpoint index did not stabilize: {:?}",
            values.iter().map(|(s, v)| (*s, v.as_ref().map(|x| x.0))).collect::<Vec<_>>()
        ))),
    }
}

/// The `m` roots of `ω^m = z`, in increasing angle from `arg(z)/m`.
pub fn roots_of(z: UnitCircleValue<f64>, m: usize) -> Vec<UnitCircleValue<f64>> {
    let base = z.angle() / m as f64;
    (0..m).map(|k| UnitCircleValue::from_angle(base + 2.0 * PI * k as f64 / m as f64)).collect()
}

/// `Σ_{ω^m = z} (i_{P,ω}(γ), ν_{P,ω}(γ))`, evaluated in parallel.
pub fn bott_sum(
    path: &SymplecticPath<f64>,
    p: &Mat<f64>,
    m: usize,
    z: UnitCircleValue<f64>,
    opts: &IndexOptions,
) -> Result<IndexPair> {
    if m == 0 {
        return Err(Error::Parameter("m must be positive".into()));
    }
    let parts: Vec<Result<IndexPair>> =
        roots_of(z, m).into_par_iter().map(|w| index_crossing(path, w, p, opts)).collect();
    let mut total = IndexPair::plain(0, 0, z);
    for part in parts {
        let part = part?;
        total.i += part.i;
        total.nu += part.nu;
        total.crossings.extend(part.crossings);
    }
    Ok(total)
}

/// `(i_{P,1}(γ^{2m−1,P}), ν_{P,1}(γ^{2m−1,P}))` from the case of `γ(T)P`
/// and `i_1 = i_{P,1}(γ)`.
pub fn iterate_closed_form(tag: &CaseTag, i1: i64, m: usize) -> Result<IndexPair> {
    if m == 0 {
        return Err(Error::Parameter("m must be positive".into()));
    }
    tag.validate()?;
    let k = (2 * m - 1) as i64;
    let one = UnitCircleValue::one();
    let ratio = || {
        let theta = tag.theta.expect("validated");
        ceiling_parts_tol(k as f64 * theta / (2.0 * PI), RATIO_INTEGER_TOL)
    };
    let (i, nu) = match tag.case_id {
        1 => (k * (i1 + 1) - 1, 1),
        2 => (k * (i1 + 1) - 1, 2),
        3 => (k * i1, 1),
        4..=6 | 10 => (k * i1, 0),
        7 => {
            let c = ratio();
            (k * (i1 - 1) + 2 * c.e - 1, (2 - 2 * c.phi) as usize)
        }
        8 => {
            let c = ratio();
            (k * i1 + 2 * c.phi - 2, (2 - 2 * c.phi) as usize)
        }
        9 => {
            let c = ratio();
            (k * i1, (2 - 2 * c.phi) as usize)
        }
        c => return Err(Error::Parameter(format!("unknown case {c}"))),
    };
    Ok(IndexPair::plain(i, nu, one))
}

/// Closed form for a `⋄`-product: every block contributes its own
/// correction to `(2m−1)·i₁`, nullities add up.
pub fn iterate_closed_form_decomposition(dec: &NormalFormDecomposition, i1: i64, m: usize) -> Result<IndexPair> {
    if m == 0 {
        return Err(Error::Parameter("m must be positive".into()));
    }
    let k = (2 * m - 1) as i64;
    let mut i = k * i1;
    let mut nu = 0;
    for (_, tag) in &dec.blocks {
        let b = iterate_closed_form(tag, 0, m)?;
        i += b.i;
        nu += b.nu;
    }
    Ok(IndexPair::plain(i, nu, UnitCircleValue::one()))
}

/// Outcome of the iterated-index bounds for one orbit.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Theorem37Report {
    /// `i(u³) − 3i(u)`.
    pub diff3: i64,
    /// `i(u³) + ν(u³) − 3(i(u) + ν(u))`.
    pub diffnu3: i64,
    /// `2κ + 2p₋ + 2p₀ + 2r`.
    pub block_upper: i64,
    /// `2κ + 2 − 2p₀ − 2p₊ − 2r`.
    pub block_lower: i64,
    /// `2κ + 2n`.
    pub bound_upper: i64,
    /// `2κ + 2 − 2n`.
    pub bound_lower: i64,
    /// Lower bound `2n − 2κ` on the elliptic height when `diff3 ≥ 2n`.
    pub conclusion_i: Option<i64>,
    /// Lower bound `2n − 4κ` on the elliptic height when `diffnu3 ≤ 6κ + 2 − 2n`.
    pub conclusion_ii: Option<i64>,
}

impl Theorem37Report {
    /// The strongest elliptic-height bound asserted.
    pub fn asserted_height(&self) -> Option<i64> {
        match (self.conclusion_i, self.conclusion_ii) {
            (Some(a), Some(b)) => Some(a.max(b)),
            (a, b) => a.or(b),
        }
    }
}

/// Checks `diff3 ≤ 2κ+2p₋+2p₀+2r ≤ 2κ+2n` and
/// `diffnu3 ≥ 2κ+2−2p₀−2p₊−2r ≥ 2κ+2−2n` for dual-side indices
/// `i(u) = i_{P,1} − κ`, `ν(u) = ν_{P,1} − 1`, and records the conclusions.
pub fn theorem37_check(
    dec: &NormalFormDecomposition,
    i_u: i64,
    nu_u: i64,
    i_u3: i64,
    nu_u3: i64,
    dim: Dim,
) -> Result<Theorem37Report> {
    let (n, kappa) = (dim.n() as i64, dim.kappa() as i64);
    if dec.total_dim() as i64 != 2 * n {
        return Err(Error::Dimension(format!("decomposition has size {} for n = {n}", dec.total_dim())));
    }
    let diff3 = i_u3 - 3 * i_u;
    let diffnu3 = i_u3 + nu_u3 - 3 * (i_u + nu_u);
    let block_upper = 2 * kappa + dec.upper_slack() as i64;
    let block_lower = 2 * kappa + 2 - dec.lower_slack() as i64;
    let report = Theorem37Report {
        diff3,
        diffnu3,
        block_upper,
        block_lower,
        bound_upper: 2 * kappa + 2 * n,
        bound_lower: 2 * kappa + 2 - 2 * n,
        conclusion_i: (diff3 >= 2 * n).then_some(2 * n - 2 * kappa),
        conclusion_ii: (diffnu3 <= 6 * kappa + 2 - 2 * n).then_some(2 * n - 4 * kappa),
    };
    if diff3 > block_upper || block_upper > report.bound_upper {
        return Err(Error::TheoremViolation(format!(
            "i(u³) − 3i(u) = {diff3} exceeds 2κ+2p₋+2p₀+2r = {block_upper} (≤ {})",
            report.bound_upper
        )));
    }
    if diffnu3 < block_lower || block_lower < report.bound_lower {
        return Err(Error::TheoremViolation(format!(
            "i(u³)+ν(u³) − 3(i(u)+ν(u)) = {diffnu3} is below 2κ+2−2p₀−2p₊−2r = {block_lower} (≥ {})",
            report.bound_lower
        )));
    }
    Ok(report)
}

/// `2κ(E(cs/2π) − 1) + 2(n − κ)(E((cs + π)/2π) − 1)`.
pub fn ellipsoid_index(dim: Dim, c: f64, s: f64) -> Result<i64> {
    if !(c > 0.0 && s > 0.0) {
        return Err(Error::Parameter("c and s must be positive".into()));
    }
    let (n, kappa) = (dim.n() as i64, dim.kappa() as i64);
    let a = ceiling_parts(c * s / (2.0 * PI)).e;
    let b = ceiling_parts((c * s + PI) / (2.0 * PI)).e;
    Ok(2 * kappa * (a - 1) + 2 * (n - kappa) * (b - 1))
}

/// Dual Morse index of an iterate from its P-index at `ω = 1`:
/// `i(u) = i_{P,1} − κ`, `ν(u) = ν_{P,1} − 1`.
pub fn dual_index_from_p_index(pair: &IndexPair, dim: Dim) -> (i64, i64) {
    (pair.i - dim.kappa() as i64, pair.nu as i64 - 1)
}

/// Relative margin of the strict action inequalities in [`pinching_bounds`].
pub const BOUND_REL_MARGIN: f64 = 1e-9;

/// Bounds on the iterated index from the pinching constants:
/// `i ≥ 2nl` for the largest `l` with `(2m−1)τ₂/2 > lπR²`, and
/// `i + ν ≤ 2n(l−1) − 1` for the smallest `l` with `(2m−1)τ₂/2 < (l−½)πr²`.
pub fn pinching_bounds(tau2: f64, m: usize, r: f64, big_r: f64, dim: Dim) -> Result<(Option<i64>, Option<i64>)> {
    if !(tau2 > 0.0 && r > 0.0 && r <= big_r) || m == 0 {
        return Err(Error::Parameter("need τ₂ > 0, m ≥ 1 and 0 < r ≤ R".into()));
    }
    let n = dim.n() as i64;
    let x = (2 * m - 1) as f64 * tau2 / 2.0;
    // Strict inequalities with a relative margin: an action sitting on a
    // threshold up to rounding must not trigger either bound.
    let l_low = (x / (PI * big_r * big_r * (1.0 + BOUND_REL_MARGIN))).ceil() as i64 - 1;
    let lower = (l_low >= 1).then_some(2 * n * l_low);
    let l_up = (x / (PI * r * r * (1.0 - BOUND_REL_MARGIN)) + 0.5).floor() as i64 + 1;
    let upper = Some(2 * n * (l_up - 1) - 1);
    Ok((lower, upper))
}
