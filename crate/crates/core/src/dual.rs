//! Clarke–Ekeland dual action on `L²_κ(0,½)` in a truncated Fourier basis.
//!
//! An element `u` is stored through its complex coefficients `c_f` at the
//! positive frequencies allowed by the symmetry `u(t+½) = Pu(t)`:
//! odd `f` on the `P = −1` planes, even nonzero `f` on the `P = +1` planes.
//! With `u(t) = Σ 2 Re(c_f e^{2πift})` the real vector `(Re c, Im c)` is an
//! isometric copy of `L²(0,½)`, so coefficient gradients are L² gradients.

use crate::error::{Error, Result};
use crate::geometry::{GaugeOracle, Vector};
use crate::index::{index_crossing, IndexOptions};
use crate::path::{extend_by_symmetry, integrate_fundamental, CoefficientFunction};
use crate::scalar::Mat;
use crate::sym::{elliptic_height, spectrum, standard_j, standard_p, Dim, Tolerances};
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;
use std::sync::Arc;

/// Truncation used by the orbit search.
pub const DEFAULT_N_MAX: usize = 15;
/// Truncations on which the Galerkin inertia must agree.
pub const DEFAULT_SCHEDULE: [usize; 3] = [64, 96, 128];
/// Hausdorff tolerance for telling orbits apart.
pub const DEDUP_TOL: f64 = 1e-4;
/// Stationarity threshold, relative to `1 + |Ψ|`.
pub const GRAD_TOL: f64 = 1e-9;
/// Eigenvalues of an index form below this fraction of the largest one count
/// as zero.
pub const FORM_ZERO_TOL: f64 = 1e-7;
/// Largest time-shift divisor tried by the minimal-period search.
pub const MAX_MULTIPLICITY: usize = 12;
const PERIOD_MATCH_TOL: f64 = 1e-6;

fn allowed(dim: Dim, comp: usize, f: usize) -> bool {
    if f == 0 {
        return false;
    }
    if dim.plane_sign(comp % dim.n()) < 0 {
        f % 2 == 1
    } else {
        f % 2 == 0
    }
}

/// `(component, frequency)` pairs carried by the truncated space.
fn slots(dim: Dim, n_max: usize) -> Vec<(usize, usize)> {
    let mut out = Vec::new();
    for comp in 0..dim.size() {
        for f in 1..=n_max {
            if allowed(dim, comp, f) {
                out.push((comp, f));
            }
        }
    }
    out
}

/// Symplectic partner of a coordinate and the entry `J[partner, comp]`.
fn j_partner(n: usize, comp: usize) -> (usize, f64) {
    if comp < n {
        (comp + n, 1.0)
    } else {
        (comp - n, -1.0)
    }
}

fn apply_j(v: &Vector) -> Vector {
    let n = v.len() / 2;
    Vector::from_fn(v.len(), |i, _| if i < n { -v[i + n] } else { v[i - n] })
}

/// Subspace searched by one family of restarts.
///
/// A plane sector keeps only the coordinates of one symplectic plane. Flipping
/// the sign of any other plane commutes with `J`, `P` and `Π` and preserves a
/// diagonal ellipsoid gauge, so critical points inside a sector are critical
/// points of the full functional.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(tag = "kind", content = "plane", rename_all = "snake_case")]
pub enum Sector {
    Full,
    Plane(usize),
}

impl Sector {
    fn contains(&self, n: usize, comp: usize) -> bool {
        match *self {
            Sector::Full => true,
            Sector::Plane(k) => comp % n == k,
        }
    }
}

/// Truncated element of `L²_κ(0,½)`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DualElement {
    dim: Dim,
    n_max: usize,
    /// `[re, im]` of each allowed `(component, frequency)` slot, components
    /// outermost.
    coeffs: Vec<[f64; 2]>,
}

impl DualElement {
    pub fn zeros(dim: Dim, n_max: usize) -> Self {
        let len = slots(dim, n_max).len();
        DualElement { dim, n_max, coeffs: vec![[0.0; 2]; len] }
    }

    pub fn dim(&self) -> Dim {
        self.dim
    }

    pub fn n_max(&self) -> usize {
        self.n_max
    }

    pub fn slots(&self) -> Vec<(usize, usize)> {
        slots(self.dim, self.n_max)
    }

    pub fn coeff(&self, k: usize) -> Complex64 {
        Complex64::new(self.coeffs[k][0], self.coeffs[k][1])
    }

    fn set(&mut self, k: usize, c: Complex64) {
        self.coeffs[k] = [c.re, c.im];
    }

    /// Sets the coefficient of `(comp, f)`.
    pub fn with_mode(mut self, comp: usize, f: usize, c: Complex64) -> Result<Self> {
        let k = self
            .slots()
            .iter()
            .position(|&s| s == (comp, f))
            .ok_or_else(|| Error::Parameter(format!("frequency {f} is not allowed on component {comp}")))?;
        self.set(k, c);
        Ok(self)
    }

    /// Modes on the `P = −1` planes (the `u₁` part).
    pub fn u1_modes(&self) -> Vec<(usize, usize, Complex64)> {
        self.modes_with_sign(-1)
    }

    /// Modes on the `P = +1` planes (the `u₂` part, no zero mode).
    pub fn u2_modes(&self) -> Vec<(usize, usize, Complex64)> {
        self.modes_with_sign(1)
    }

    fn modes_with_sign(&self, sign: i32) -> Vec<(usize, usize, Complex64)> {
        self.slots()
            .into_iter()
            .enumerate()
            .filter(|(_, (c, _))| self.dim.plane_sign(c % self.dim.n()) == sign)
            .map(|(k, (c, f))| (c, f, self.coeff(k)))
            .collect()
    }

    pub fn to_real(&self) -> Vec<f64> {
        let mut v = Vec::with_capacity(2 * self.coeffs.len());
        v.extend(self.coeffs.iter().map(|c| c[0]));
        v.extend(self.coeffs.iter().map(|c| c[1]));
        v
    }

    pub fn from_real(dim: Dim, n_max: usize, v: &[f64]) -> Result<Self> {
        let mut out = DualElement::zeros(dim, n_max);
        let s = out.coeffs.len();
        if v.len() != 2 * s {
            return Err(Error::Dimension(format!("expected {} real coordinates, got {}", 2 * s, v.len())));
        }
        for k in 0..s {
            out.coeffs[k] = [v[k], v[s + k]];
        }
        Ok(out)
    }

    /// `‖u‖_{L²(0,½)}`.
    pub fn norm(&self) -> f64 {
        self.coeffs.iter().map(|c| c[0] * c[0] + c[1] * c[1]).sum::<f64>().sqrt()
    }

    /// `⟨u, v⟩_{L²(0,½)}`.
    pub fn dot(&self, other: &DualElement) -> f64 {
        self.coeffs.iter().zip(&other.coeffs).map(|(a, b)| a[0] * b[0] + a[1] * b[1]).sum()
    }

    fn map_coeffs(&self, f: impl Fn(usize, (usize, usize), Complex64) -> Complex64) -> DualElement {
        let mut out = self.clone();
        for (k, s) in self.slots().into_iter().enumerate() {
            out.set(k, f(k, s, self.coeff(k)));
        }
        out
    }

    fn evaluate_with(&self, t: f64, scale: impl Fn(usize) -> Complex64) -> Vector {
        let mut v = Vector::zeros(self.dim.size());
        for (k, (comp, f)) in self.slots().into_iter().enumerate() {
            let c = self.coeff(k) * scale(f);
            let (s, co) = (2.0 * PI * f as f64 * t).sin_cos();
            v[comp] += 2.0 * (c.re * co - c.im * s);
        }
        v
    }

    /// `u(t)`.
    pub fn eval(&self, t: f64) -> Vector {
        self.evaluate_with(t, |_| Complex64::new(1.0, 0.0))
    }

    /// `(Π_κ u)(t)`: the primitive with the normalizations of `L²_κ`, which in
    /// Fourier space is division by `2πif`.
    pub fn primitive(&self, t: f64) -> Vector {
        self.evaluate_with(t, |f| Complex64::new(0.0, -1.0 / (2.0 * PI * f as f64)))
    }

    /// `Π_κ u` as coefficients.
    pub fn apply_pi(&self) -> DualElement {
        self.map_coeffs(|_, (_, f), c| c / Complex64::new(0.0, 2.0 * PI * f as f64))
    }

    /// `−JΠ_κu`, the gradient of `½∫Ju·Π_κu`.
    fn linear_part(&self) -> DualElement {
        let n = self.dim.n();
        let index: std::collections::HashMap<(usize, usize), usize> =
            self.slots().into_iter().enumerate().map(|(k, s)| (s, k)).collect();
        self.map_coeffs(|_, (comp, f), _| {
            // (Jw)_comp = J[comp, partner] w_partner.
            let (partner, _) = j_partner(n, comp);
            let (_, j_pc) = j_partner(n, partner);
            let w = self.coeff(index[&(partner, f)]) / Complex64::new(0.0, 2.0 * PI * f as f64);
            -w * j_pc
        })
    }

    pub fn project(&self, sector: Sector) -> DualElement {
        let n = self.dim.n();
        self.map_coeffs(|_, (comp, _), c| if sector.contains(n, comp) { c } else { Complex64::new(0.0, 0.0) })
    }

    /// Same function in a space of different truncation (modes above the new
    /// order are dropped).
    pub fn resized(&self, n_max: usize) -> DualElement {
        let mut out = DualElement::zeros(self.dim, n_max);
        let index: std::collections::HashMap<(usize, usize), usize> =
            out.slots().into_iter().enumerate().map(|(k, s)| (s, k)).collect();
        for (k, s) in self.slots().into_iter().enumerate() {
            if let Some(&j) = index.get(&s) {
                out.coeffs[j] = self.coeffs[k];
            }
        }
        out
    }

    /// Critical point of the `k`-fold iterate: `u^k(t) = μk·u(kt)` with
    /// `μ = k^{1/(α−2)}`, so that `Π u^k − ξ` again solves `ẋ = JH_α′(x)`.
    pub fn iterate(&self, k: usize, alpha: f64) -> Result<DualElement> {
        if k % 2 == 0 {
            return Err(Error::Parameter("only odd iterates stay in L²_κ".into()));
        }
        let scale = (k as f64).powf(1.0 / (alpha - 2.0)) * k as f64;
        let mut out = DualElement::zeros(self.dim, self.n_max * k);
        let index: std::collections::HashMap<(usize, usize), usize> =
            out.slots().into_iter().enumerate().map(|(j, s)| (s, j)).collect();
        for (j, (comp, f)) in self.slots().into_iter().enumerate() {
            let target = index[&(comp, f * k)];
            out.coeffs[target] = [self.coeffs[j][0] * scale, self.coeffs[j][1] * scale];
        }
        Ok(out)
    }
}

/// Uniform quadrature on `[0,½)`.
struct Grid {
    t: Vec<f64>,
    weight: f64,
}

impl Grid {
    fn new(n_max: usize) -> Self {
        let m = (8 * n_max).max(64);
        Grid { t: (0..m).map(|j| 0.5 * j as f64 / m as f64).collect(), weight: 0.5 / m as f64 }
    }
}

/// Precomputed `2cos`, `2sin` tables of the slots on a grid.
struct Tables {
    cos: Vec<Vec<f64>>,
    sin: Vec<Vec<f64>>,
}

impl Tables {
    fn new(slots: &[(usize, usize)], grid: &Grid) -> Self {
        let n_max = slots.iter().map(|s| s.1).max().unwrap_or(0);
        let mut cos = vec![Vec::new(); n_max + 1];
        let mut sin = vec![Vec::new(); n_max + 1];
        for f in 1..=n_max {
            cos[f] = grid.t.iter().map(|t| 2.0 * (2.0 * PI * f as f64 * t).cos()).collect();
            sin[f] = grid.t.iter().map(|t| 2.0 * (2.0 * PI * f as f64 * t).sin()).collect();
        }
        Tables { cos, sin }
    }
}

fn values_on_grid(u: &DualElement, slots: &[(usize, usize)], tab: &Tables, m: usize) -> Vec<Vector> {
    let mut vals = vec![Vector::zeros(u.dim.size()); m];
    for (k, &(comp, f)) in slots.iter().enumerate() {
        let c = u.coeff(k);
        if c.re == 0.0 && c.im == 0.0 {
            continue;
        }
        for (j, v) in vals.iter_mut().enumerate() {
            v[comp] += c.re * tab.cos[f][j] - c.im * tab.sin[f][j];
        }
    }
    vals
}

/// Ψ and its L² gradient.
pub struct PsiEvaluator<'a> {
    gauge: &'a dyn GaugeOracle,
    dim: Dim,
    n_max: usize,
    slots: Vec<(usize, usize)>,
    grid: Grid,
    tables: Tables,
}

impl<'a> PsiEvaluator<'a> {
    pub fn new(gauge: &'a dyn GaugeOracle, n_max: usize) -> Self {
        let dim = gauge.dim();
        let slots = slots(dim, n_max);
        let grid = Grid::new(n_max);
        let tables = Tables::new(&slots, &grid);
        PsiEvaluator { gauge, dim, n_max, slots, grid, tables }
    }

    fn check(&self, u: &DualElement) -> Result<()> {
        if u.dim != self.dim || u.n_max != self.n_max {
            return Err(Error::Dimension("element does not match the evaluator's truncation".into()));
        }
        Ok(())
    }

    pub fn value(&self, u: &DualElement) -> Result<f64> {
        Ok(self.value_and_gradient(u)?.0)
    }

    pub fn value_and_gradient(&self, u: &DualElement) -> Result<(f64, DualElement)> {
        self.check(u)?;
        let m = self.grid.t.len();
        let vals = values_on_grid(u, &self.slots, &self.tables, m);
        let mut g_sum = 0.0;
        let mut g_vals = Vec::with_capacity(m);
        for v in &vals {
            let w = -apply_j(v);
            g_sum += self.gauge.dual_h(&w);
            g_vals.push(apply_j(&self.gauge.grad_dual_h(&w)));
        }
        let lin = u.linear_part();
        let value = 0.5 * u.dot(&lin) + self.grid.weight * g_sum;
        let mut grad = lin;
        // Fourier coefficient ∫₀¹ g e^{−2πift} = (1/m) Σ g_j (cos − i sin).
        let inv = 1.0 / m as f64;
        for (k, &(comp, f)) in self.slots.iter().enumerate() {
            let (mut re, mut im) = (0.0, 0.0);
            for (j, g) in g_vals.iter().enumerate() {
                re += g[comp] * self.tables.cos[f][j];
                im -= g[comp] * self.tables.sin[f][j];
            }
            let c = grad.coeff(k) + Complex64::new(0.5 * re * inv, 0.5 * im * inv);
            grad.set(k, c);
        }
        Ok((value, grad))
    }

    /// Hessian of Ψ in the real coordinates of [`DualElement::to_real`]; this
    /// is the Galerkin matrix of the formal Hessian `Q_a`.
    pub fn hessian(&self, u: &DualElement) -> Result<Mat<f64>> {
        self.check(u)?;
        let vals = values_on_grid(u, &self.slots, &self.tables, self.grid.t.len());
        let kt: Vec<Mat<f64>> = vals
            .iter()
            .map(|v| {
                let h = self.gauge.hess_dual_h(&(-apply_j(v)));
                let j = standard_j::<f64>(self.dim.n());
                j.transpose() * h * j
            })
            .collect();
        Ok(assemble_form(self.dim, &self.slots, 0.5, &self.grid.t, &kt))
    }
}

/// Galerkin matrix of `∫₀^L (Jv·Π v + K̃-weighted Jv·Jv)` on the
/// orthonormal real basis `√(2/L)cos(πft/L)e_c`, `−√(2/L)sin(πft/L)e_c`.
///
/// `kt` holds `JᵀK(t)J` on the uniform grid `ts` covering `[0, 2L)` or, when
/// the integrand has period `L`, covering `[0, L)`.
fn assemble_form(dim: Dim, slots: &[(usize, usize)], half: f64, ts: &[f64], kt: &[Mat<f64>]) -> Mat<f64> {
    let n = dim.n();
    let s = slots.len();
    let mut q = Mat::<f64>::zeros(2 * s, 2 * s);
    let index: std::collections::HashMap<(usize, usize), usize> = slots.iter().enumerate().map(|(k, &sl)| (sl, k)).collect();
    // Π term: only cos/sin pairs of one frequency on partner coordinates.
    for (k, &(comp, f)) in slots.iter().enumerate() {
        let omega = PI * f as f64 / half;
        let (partner, j_pc) = j_partner(n, comp);
        let kp = index[&(partner, f)];
        // Q[(partner, f, im), (comp, f, re)] = J[partner, comp]/ω.
        q[(s + kp, k)] = j_pc / omega;
        q[(k, s + kp)] = j_pc / omega;
    }
    // K term by quadrature, grouped by coordinate pairs.
    let m = ts.len();
    let span = ts.last().map(|t| t + (ts[1] - ts[0])).unwrap_or(0.0);
    let weight = span / m as f64 * (half / span);
    let amp = (2.0 / half).sqrt();
    let mut by_comp: Vec<Vec<(usize, usize)>> = vec![Vec::new(); 2 * n];
    for (k, &(comp, f)) in slots.iter().enumerate() {
        by_comp[comp].push((k, f));
    }
    let basis = |list: &[(usize, usize)]| -> Mat<f64> {
        let mut b = Mat::<f64>::zeros(m, 2 * list.len());
        for (col, &(_, f)) in list.iter().enumerate() {
            let omega = PI * f as f64 / half;
            for (j, t) in ts.iter().enumerate() {
                let (sn, cs) = (omega * t).sin_cos();
                b[(j, col)] = amp * cs;
                b[(j, list.len() + col)] = -amp * sn;
            }
        }
        b
    };
    let bases: Vec<Mat<f64>> = by_comp.iter().map(|l| basis(l)).collect();
    let blocks: Vec<((usize, usize), Mat<f64>)> = (0..2 * n)
        .flat_map(|a| (0..2 * n).map(move |b| (a, b)))
        .collect::<Vec<_>>()
        .into_par_iter()
        .filter(|&(a, b)| !by_comp[a].is_empty() && !by_comp[b].is_empty())
        .filter_map(|(a, b)| {
            let w: Vec<f64> = kt.iter().map(|k| k[(a, b)] * weight).collect();
            if w.iter().all(|x| *x == 0.0) {
                return None;
            }
            let mut weighted = bases[b].clone();
            for (j, wj) in w.iter().enumerate() {
                weighted.row_mut(j).scale_mut(*wj);
            }
            Some(((a, b), bases[a].transpose() * weighted))
        })
        .collect();
    for ((a, b), block) in blocks {
        let (la, lb) = (&by_comp[a], &by_comp[b]);
        for (ia, &(ka, _)) in la.iter().enumerate() {
            for (ib, &(kb, _)) in lb.iter().enumerate() {
                q[(ka, kb)] += block[(ia, ib)];
                q[(ka, s + kb)] += block[(ia, lb.len() + ib)];
                q[(s + ka, kb)] += block[(la.len() + ia, ib)];
                q[(s + ka, s + kb)] += block[(la.len() + ia, lb.len() + ib)];
            }
        }
    }
    q
}

/// Negative and zero counts of a symmetric matrix.
pub fn inertia(q: &Mat<f64>, zero_tol: f64) -> (usize, usize) {
    let sym = (q + q.transpose()) * 0.5;
    let eig = sym.symmetric_eigenvalues();
    let scale = eig.iter().fold(0.0f64, |a, x| a.max(x.abs())).max(f64::MIN_POSITIVE);
    let cut = zero_tol * scale;
    let neg = eig.iter().filter(|&&x| x < -cut).count();
    let zero = eig.iter().filter(|&&x| x.abs() <= cut).count();
    (neg, zero)
}

/// Settings of the critical-point search.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct FinderOptions {
    pub restarts: usize,
    pub seed: u64,
    pub n_max: usize,
    pub dedup_tol: f64,
    pub max_iter: usize,
    pub schedule: Vec<usize>,
    pub trajectory_samples: usize,
}

impl Default for FinderOptions {
    fn default() -> Self {
        FinderOptions {
            restarts: 4,
            seed: 0x0_5eed,
            n_max: DEFAULT_N_MAX,
            dedup_tol: DEDUP_TOL,
            max_iter: 3000,
            schedule: DEFAULT_SCHEDULE.to_vec(),
            trajectory_samples: 256,
        }
    }
}

/// Outcome of one descent run.
#[derive(Clone, Debug)]
pub struct CriticalPoint {
    pub u: DualElement,
    pub psi: f64,
    pub grad_norm: f64,
    pub iterations: usize,
}

fn random_start(dim: Dim, n_max: usize, sector: Sector, rng: &mut impl Rng) -> DualElement {
    let mut u = DualElement::zeros(dim, n_max);
    for (k, (comp, f)) in u.slots().into_iter().enumerate() {
        if sector.contains(dim.n(), comp) {
            let a: f64 = rng.gen_range(-1.0..1.0);
            let b: f64 = rng.gen_range(-1.0..1.0);
            u.set(k, Complex64::new(a, b) * (0.5 / f as f64));
        }
    }
    u
}

/// L-BFGS descent with Armijo backtracking inside a sector, then Newton
/// polishing on the Galerkin Hessian.
pub fn descend(
    eval: &PsiEvaluator<'_>,
    start: DualElement,
    sector: Sector,
    max_iter: usize,
) -> Result<CriticalPoint> {
    let dim = eval.dim;
    let n_max = eval.n_max;
    let vg = |x: &[f64]| -> Result<(f64, Vec<f64>)> {
        let u = DualElement::from_real(dim, n_max, x)?;
        let (v, g) = eval.value_and_gradient(&u)?;
        Ok((v, g.project(sector).to_real()))
    };
    let dot = |a: &[f64], b: &[f64]| a.iter().zip(b).map(|(x, y)| x * y).sum::<f64>();
    let mut x = start.project(sector).to_real();
    let (mut fx, mut gx) = vg(&x)?;
    let mut mem: std::collections::VecDeque<(Vec<f64>, Vec<f64>, f64)> = std::collections::VecDeque::new();
    let mut iterations = 0;
    for it in 0..max_iter {
        iterations = it;
        let gnorm = dot(&gx, &gx).sqrt();
        if gnorm <= 1e-3 * GRAD_TOL * (1.0 + fx.abs()) {
            break;
        }
        // Two-loop recursion.
        let mut d: Vec<f64> = gx.iter().map(|v| -v).collect();
        let mut alphas = Vec::with_capacity(mem.len());
        for (s, y, rho) in mem.iter().rev() {
            let a = rho * dot(s, &d);
            for (di, yi) in d.iter_mut().zip(y) {
                *di -= a * yi;
            }
            alphas.push(a);
        }
        if let Some((s, y, _)) = mem.back() {
            let gamma = dot(s, y) / dot(y, y);
            d.iter_mut().for_each(|v| *v *= gamma);
        } else {
            let scale = 1.0 / gnorm.max(1e-12);
            d.iter_mut().for_each(|v| *v *= scale.min(1.0));
        }
        for ((s, y, rho), a) in mem.iter().zip(alphas.iter().rev()) {
            let b = rho * dot(y, &d);
            for (di, si) in d.iter_mut().zip(s) {
                *di += (a - b) * si;
            }
        }
        let mut slope = dot(&gx, &d);
        if slope >= 0.0 {
            mem.clear();
            d = gx.iter().map(|v| -v).collect();
            slope = -gnorm * gnorm;
        }
        let mut step = 1.0;
        let mut accepted = None;
        for _ in 0..60 {
            let xn: Vec<f64> = x.iter().zip(&d).map(|(a, b)| a + step * b).collect();
            let (fnew, gnew) = vg(&xn)?;
            if fnew <= fx + 1e-4 * step * slope {
                accepted = Some((xn, fnew, gnew));
                break;
            }
            step *= 0.5;
        }
        let Some((xn, fnew, gnew)) = accepted else {
            break;
        };
        let s: Vec<f64> = xn.iter().zip(&x).map(|(a, b)| a - b).collect();
        let y: Vec<f64> = gnew.iter().zip(&gx).map(|(a, b)| a - b).collect();
        let sy = dot(&s, &y);
        if sy > 1e-14 * dot(&s, &s).sqrt() * dot(&y, &y).sqrt() {
            mem.push_back((s, y, 1.0 / sy));
            if mem.len() > 12 {
                mem.pop_front();
            }
        }
        let stalled = (fx - fnew).abs() <= 1e-16 * (1.0 + fx.abs());
        x = xn;
        fx = fnew;
        gx = gnew;
        if stalled {
            break;
        }
    }
    let u = DualElement::from_real(dim, n_max, &x)?;
    let polished = newton_polish(eval, u, sector)?;
    Ok(CriticalPoint { iterations, ..polished })
}

fn newton_polish(eval: &PsiEvaluator<'_>, mut u: DualElement, sector: Sector) -> Result<CriticalPoint> {
    let dim = eval.dim;
    let keep: Vec<usize> = {
        let sl = u.slots();
        let s = sl.len();
        (0..2 * s).filter(|&i| sector.contains(dim.n(), sl[i % s].0)).collect()
    };
    let (mut psi, mut grad) = eval.value_and_gradient(&u)?;
    grad = grad.project(sector);
    for _ in 0..20 {
        let gnorm = grad.norm();
        if gnorm <= 0.1 * GRAD_TOL * (1.0 + psi.abs()) {
            break;
        }
        let h = eval.hessian(&u)?;
        let hk = Mat::from_fn(keep.len(), keep.len(), |a, b| h[(keep[a], keep[b])]);
        let gr = grad.to_real();
        let eig = ((&hk + hk.transpose()) * 0.5).symmetric_eigen();
        let scale = eig.eigenvalues.iter().fold(0.0f64, |a, x| a.max(x.abs()));
        let mut delta = vec![0.0; gr.len()];
        for (i, &lam) in eig.eigenvalues.iter().enumerate() {
            if lam.abs() <= 1e-10 * scale {
                continue;
            }
            let v = eig.eigenvectors.column(i);
            let proj: f64 = keep.iter().enumerate().map(|(a, &k)| v[a] * gr[k]).sum();
            for (a, &k) in keep.iter().enumerate() {
                delta[k] -= proj / lam * v[a];
            }
        }
        let mut step = 1.0;
        let mut improved = false;
        let x = u.to_real();
        for _ in 0..20 {
            let xn: Vec<f64> = x.iter().zip(&delta).map(|(a, b)| a + step * b).collect();
            let un = DualElement::from_real(dim, eval.n_max, &xn)?;
            let (pn, gn) = eval.value_and_gradient(&un)?;
            let gn = gn.project(sector);
            if gn.norm() < gnorm {
                u = un;
                psi = pn;
                grad = gn;
                improved = true;
                break;
            }
            step *= 0.5;
        }
        if !improved {
            break;
        }
    }
    Ok(CriticalPoint { grad_norm: grad.norm(), psi, u, iterations: 0 })
}

/// Maximum relative error of the analytic gradient against central
/// differences along random directions.
pub fn gradient_check(eval: &PsiEvaluator<'_>, u: &DualElement, directions: usize, seed: u64) -> Result<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let (_, g) = eval.value_and_gradient(u)?;
    let x = u.to_real();
    let mut worst = 0.0f64;
    for _ in 0..directions {
        let d: Vec<f64> = (0..x.len()).map(|_| rng.gen_range(-1.0..1.0)).collect();
        let norm = d.iter().map(|v| v * v).sum::<f64>().sqrt();
        let d: Vec<f64> = d.iter().map(|v| v / norm).collect();
        let h = 1e-5;
        let shift = |s: f64| -> Result<f64> {
            let xs: Vec<f64> = x.iter().zip(&d).map(|(a, b)| a + s * b).collect();
            eval.value(&DualElement::from_real(u.dim, u.n_max, &xs)?)
        };
        let fd = (shift(h)? - shift(-h)?) / (2.0 * h);
        let an: f64 = g.to_real().iter().zip(&d).map(|(a, b)| a * b).sum();
        let rel = (fd - an).abs() / an.abs().max(fd.abs()).max(1e-8);
        worst = worst.max(rel);
    }
    Ok(worst)
}

/// P-symmetric orbits leave the fixed subspace of `P`; P-fixed ones stay in it.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SymmetryClass {
    PSymmetric,
    PFixed,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FloquetMultiplier {
    pub re: f64,
    pub im: f64,
    pub modulus: f64,
    pub multiplicity: usize,
    pub on_circle: bool,
    pub krein: Option<(usize, usize)>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FloquetReport {
    pub multipliers: Vec<FloquetMultiplier>,
    pub elliptic_height: usize,
    pub borderline: bool,
    pub monodromy: Vec<Vec<f64>>,
}

impl FloquetReport {
    pub fn from_monodromy(m: &Mat<f64>, tol: &Tolerances) -> Self {
        let rep = spectrum(m, tol);
        let h = elliptic_height(m, tol.circle);
        let multipliers = rep
            .eigenvalues
            .iter()
            .zip(&rep.on_circle)
            .zip(&rep.krein)
            .map(|((&(z, k), &c), kr)| FloquetMultiplier {
                re: z.re,
                im: z.im,
                modulus: z.norm(),
                multiplicity: k,
                on_circle: c,
                krein: *kr,
            })
            .collect();
        FloquetReport {
            multipliers,
            elliptic_height: h.height,
            borderline: h.borderline,
            monodromy: (0..m.nrows()).map(|i| m.row(i).iter().copied().collect()).collect(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TrajectorySample {
    pub s: f64,
    pub y: Vec<f64>,
}

/// A closed characteristic recovered from a critical point of Ψ.
///
/// Times `s` are in the `ẏ = JH₂′(y)` parametrization, in which the loop of
/// `u` has period `τ₂` equal to its action.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct OrbitRecord {
    pub u: DualElement,
    pub sector: Sector,
    pub seed: u64,
    pub psi: f64,
    pub grad_norm: f64,
    pub xi_shift: Vec<f64>,
    /// Gauge value of `x = Π_κu − ξ`; `y = x/λ` lies on `Σ`.
    pub lambda: f64,
    pub trajectory: Vec<TrajectorySample>,
    /// Period of the prime orbit under `ẏ = JN_Σ(y)` (its length).
    pub minimal_period: f64,
    /// How many times the loop of `u` covers the prime orbit.
    pub multiplicity: usize,
    /// `A(τ, y)` of the loop of `u`, equal to `τ₂`.
    pub action: f64,
    pub prime_action: f64,
    pub tau2: f64,
    pub residual: f64,
    pub symmetry_class: SymmetryClass,
    pub index: Option<i64>,
    pub nullity: Option<i64>,
    pub floquet: Option<FloquetReport>,
}

impl OrbitRecord {
    pub fn dim(&self) -> Dim {
        self.u.dim
    }

    /// `y(s)` for any `s` (the loop has period `τ₂`).
    pub fn y_at(&self, s: f64) -> Vector {
        let t = s / self.tau2;
        let xi = Vector::from_column_slice(&self.xi_shift);
        (self.u.primitive(t) - xi) / self.lambda
    }

    pub fn alpha_time_scale(&self) -> f64 {
        self.tau2
    }

    /// `A(t) = H₂″(y(t))` on `[0, τ₂/2]`.
    pub fn coefficient(&self, gauge: Arc<dyn GaugeOracle>) -> Result<CoefficientFunction<f64>> {
        let me = self.clone();
        let n = self.dim().n();
        let coeff = CoefficientFunction::new(n, 0.5 * self.tau2, move |s: f64| {
            gauge.hess_h2(&me.y_at(s)).expect("orbit avoids the origin")
        })?;
        let p = standard_p::<f64>(self.dim()).into_inner();
        coeff.verify_p_symmetry(&p, 16, 1e-7)
    }

    /// Monodromy over the loop of `u`: `γ(τ₂) = Pγ(τ₂/2)Pγ(τ₂/2)`.
    pub fn monodromy(&self, gauge: Arc<dyn GaugeOracle>, steps: usize) -> Result<(Mat<f64>, Mat<f64>)> {
        let coeff = self.coefficient(gauge)?;
        let path = integrate_fundamental(&coeff, steps)?;
        let half = path.endpoint();
        let p = standard_p::<f64>(self.dim()).into_inner();
        Ok((&p * &half * &p * &half, half))
    }
}

/// Largest distance from a sample of `a` to the continuous loop of `b`
/// (optionally mirrored by `P`). The nearest sample of `b` is refined by a
/// golden-section search on the neighbouring arc.
fn one_sided_distance(a: &OrbitRecord, b: &OrbitRecord, mirror: bool) -> f64 {
    let dim = b.dim();
    let sign = |i: usize| if mirror { f64::from(dim.plane_sign(i % dim.n())) } else { 1.0 };
    let curve = |s: f64| {
        let y = b.y_at(s);
        Vector::from_fn(y.len(), |i, _| sign(i) * y[i])
    };
    let pts: Vec<Vector> = b.trajectory.iter().map(|s| curve(s.s)).collect();
    let ds = b.tau2 / pts.len().max(1) as f64;
    let gr = 0.5 * (5f64.sqrt() - 1.0);
    a.trajectory
        .iter()
        .map(|sa| {
            let p = Vector::from_column_slice(&sa.y);
            let (k, _) = pts
                .iter()
                .enumerate()
                .map(|(k, q)| (k, (&p - q).norm()))
                .fold((0, f64::INFINITY), |best, c| if c.1 < best.1 { c } else { best });
            let dist = |s: f64| (&p - curve(s)).norm();
            let (mut lo, mut hi) = (b.trajectory[k].s - ds, b.trajectory[k].s + ds);
            for _ in 0..60 {
                let x1 = hi - gr * (hi - lo);
                let x2 = lo + gr * (hi - lo);
                if dist(x1) < dist(x2) {
                    hi = x2;
                } else {
                    lo = x1;
                }
            }
            dist(0.5 * (lo + hi))
        })
        .fold(0.0, f64::max)
}

/// Hausdorff distance of the two images, directly or after applying `P` to one.
pub fn orbit_distance(a: &OrbitRecord, b: &OrbitRecord) -> f64 {
    let direct = one_sided_distance(a, b, false).max(one_sided_distance(b, a, false));
    let mirrored = one_sided_distance(a, b, true).max(one_sided_distance(b, a, true));
    direct.min(mirrored)
}

/// `false` when the images agree up to `tol` in Hausdorff distance, directly
/// or after applying `P` to one of them.
pub fn geometric_distinctness(a: &OrbitRecord, b: &OrbitRecord, tol: f64) -> bool {
    a.dim() != b.dim() || orbit_distance(a, b) > tol
}

/// Builds the orbit data of a certified critical point.
pub fn reconstruct_orbit(
    gauge: &dyn GaugeOracle,
    cp: &CriticalPoint,
    sector: Sector,
    seed: u64,
    samples: usize,
) -> Result<OrbitRecord> {
    let u = &cp.u;
    let dim = u.dim;
    let alpha = gauge.alpha();
    let m = (16 * u.n_max).max(256);
    let ts: Vec<f64> = (0..m).map(|j| j as f64 / m as f64).collect();
    let xs: Vec<Vector> = ts.iter().map(|&t| gauge.grad_dual_h(&(-apply_j(&u.eval(t))))).collect();
    let prim: Vec<Vector> = ts.iter().map(|&t| u.primitive(t)).collect();
    let mut xi = Vector::zeros(dim.size());
    for (p, x) in prim.iter().zip(&xs) {
        xi += p - x;
    }
    xi /= m as f64;
    let gauges: Vec<f64> = prim.iter().map(|p| gauge.j(&(p - &xi))).collect();
    let lambda = gauges.iter().sum::<f64>() / m as f64;
    if !(lambda > 0.0) {
        return Err(Error::Numerical("critical point reconstructs to the origin".into()));
    }
    let spread = gauges.iter().fold(0.0f64, |a, g| a.max((g - lambda).abs())) / lambda;

    // ‖u − JH_α′(x)‖ relative to ‖u‖, on the unit-period loop.
    let mut res = 0.0;
    let mut unorm = 0.0;
    for (&t, p) in ts.iter().zip(&prim) {
        let x = p - &xi;
        let ut = u.eval(t);
        let rhs = apply_j(&gauge.grad_h_alpha(&x)?);
        res += (&ut - rhs).norm_squared();
        unorm += ut.norm_squared();
    }
    let residual = (res / unorm.max(f64::MIN_POSITIVE)).sqrt().max(spread);

    // x solves ẋ = JH_α′(x); y = x/λ then runs at H₂-speed αλ^{α−2}/2.
    let tau2 = 0.5 * alpha * lambda.powf(alpha - 2.0);
    let mut action = 0.0;
    for (&t, p) in ts.iter().zip(&prim) {
        let x = p - &xi;
        action += 0.5 * apply_j(&x).dot(&u.eval(t));
    }
    action /= m as f64 * lambda * lambda;
    if (action - tau2).abs() > 1e-6 * tau2 {
        log::warn!("action {action} and period {tau2} disagree");
    }

    let scale = prim.iter().map(|p| (p - &xi).amax()).fold(0.0, f64::max);
    let mut multiplicity = 1;
    for k in (2..=MAX_MULTIPLICITY).rev() {
        let shift = 1.0 / k as f64;
        let ok = ts.iter().take(64).all(|&t| (u.primitive(t + shift) - u.primitive(t)).amax() <= PERIOD_MATCH_TOL * scale);
        if ok {
            multiplicity = k;
            break;
        }
    }
    let length: f64 = ts.iter().map(|&t| u.eval(t).norm()).sum::<f64>() / (m as f64 * lambda);
    let u1_energy: f64 = u.u1_modes().iter().map(|(_, _, c)| c.norm_sqr()).sum();
    let symmetry_class = if u1_energy.sqrt() <= 1e-8 * u.norm() { SymmetryClass::PFixed } else { SymmetryClass::PSymmetric };

    let mut rec = OrbitRecord {
        u: u.clone(),
        sector,
        seed,
        psi: cp.psi,
        grad_norm: cp.grad_norm,
        xi_shift: xi.iter().copied().collect(),
        lambda,
        trajectory: Vec::new(),
        minimal_period: length / multiplicity as f64,
        multiplicity,
        action: tau2,
        prime_action: tau2 / multiplicity as f64,
        tau2,
        residual,
        symmetry_class,
        index: None,
        nullity: None,
        floquet: None,
    };
    rec.trajectory = (0..samples)
        .map(|i| {
            let s = tau2 * i as f64 / samples as f64;
            TrajectorySample { s, y: rec.y_at(s).iter().copied().collect() }
        })
        .collect();
    Ok(rec)
}

/// Runs the seeded restarts in every sector, keeps certified nonzero critical
/// points and removes geometric duplicates, lowest action first.
pub fn find_critical_points(gauge: &dyn GaugeOracle, opts: &FinderOptions) -> Result<Vec<OrbitRecord>> {
    if opts.restarts == 0 {
        return Err(Error::Parameter("at least one restart is required".into()));
    }
    let dim = gauge.dim();
    let eval = PsiEvaluator::new(gauge, opts.n_max);
    let mut sectors = vec![Sector::Full];
    sectors.extend((0..dim.n()).map(Sector::Plane));
    let jobs: Vec<(Sector, u64)> = sectors
        .iter()
        .enumerate()
        .flat_map(|(si, &s)| {
            (0..opts.restarts).map(move |r| (s, opts.seed.wrapping_mul(0x9e37_79b9).wrapping_add((si * 1000 + r) as u64)))
        })
        .collect();
    let found: Vec<Option<OrbitRecord>> = jobs
        .par_iter()
        .map(|&(sector, seed)| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let start = random_start(dim, opts.n_max, sector, &mut rng);
            let cp = match descend(&eval, start, sector, opts.max_iter) {
                Ok(cp) => cp,
                Err(e) => {
                    log::info!("restart {seed:#x} in {sector:?} failed: {e}");
                    return None;
                }
            };
            let (_, full_grad) = eval.value_and_gradient(&cp.u).ok()?;
            let gn = full_grad.norm();
            if cp.u.norm() < 1e-6 {
                log::info!("restart {seed:#x} in {sector:?} fell to the zero critical point");
                return None;
            }
            if gn > GRAD_TOL * (1.0 + cp.psi.abs()) {
                log::info!("restart {seed:#x} in {sector:?} stopped at gradient {gn:e}");
                return None;
            }
            let cp = CriticalPoint { grad_norm: gn, ..cp };
            match reconstruct_orbit(gauge, &cp, sector, seed, opts.trajectory_samples) {
                Ok(r) => Some(r),
                Err(e) => {
                    log::info!("restart {seed:#x}: {e}");
                    None
                }
            }
        })
        .collect();
    let mut all: Vec<OrbitRecord> = found.into_iter().flatten().collect();
    all.sort_by(|a, b| a.action.partial_cmp(&b.action).unwrap_or(std::cmp::Ordering::Equal));
    let mut kept: Vec<OrbitRecord> = Vec::new();
    for r in all {
        if kept.iter().all(|k| geometric_distinctness(k, &r, opts.dedup_tol)) {
            kept.push(r);
        }
    }
    Ok(kept)
}

/// Which quadratic form measures the Morse index.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum HessianRoute {
    /// `q_{(2m−1)τ₂/2,κ}` with `H₂″(y)^{−1}`; nullity is the zero count − 1.
    Reduced,
    /// The formal Hessian `Q_a` of Ψ at the iterate of `u`.
    Dual,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct HessianIndex {
    pub i: i64,
    pub nu: i64,
    pub route: HessianRoute,
    /// `(truncation, negative count, zero count)` per schedule entry.
    pub levels: Vec<(usize, usize, usize)>,
}

fn reduced_form(orbit: &OrbitRecord, gauge: &dyn GaugeOracle, m: usize, n_max: usize) -> Result<Mat<f64>> {
    let dim = orbit.dim();
    let half = (2 * m - 1) as f64 * orbit.tau2 / 2.0;
    let grid = (8 * n_max).max(64);
    let ts: Vec<f64> = (0..grid).map(|j| 2.0 * half * j as f64 / grid as f64).collect();
    let j = standard_j::<f64>(dim.n());
    let kt = ts
        .iter()
        .map(|&s| {
            let h = gauge.hess_h2(&orbit.y_at(s))?;
            let k = h.try_inverse().ok_or_else(|| Error::Numerical("H₂″ is singular on the orbit".into()))?;
            Ok(j.transpose() * k * &j)
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(assemble_form(dim, &slots(dim, n_max), half, &ts, &kt))
}

fn dual_form(orbit: &OrbitRecord, gauge: &dyn GaugeOracle, m: usize, n_max: usize) -> Result<Mat<f64>> {
    let k = 2 * m - 1;
    let uk = orbit.u.iterate(k, gauge.alpha())?;
    let uk = if uk.n_max() > n_max { uk.resized(n_max) } else { uk.resized(n_max) };
    PsiEvaluator::new(gauge, n_max).hessian(&uk)
}

/// Morse index and nullity of `u^{2m−1}` from a Galerkin form, required to
/// be stable over the last three truncations of `schedule`.
pub fn hessian_index(
    orbit: &OrbitRecord,
    gauge: &dyn GaugeOracle,
    m: usize,
    schedule: &[usize],
    route: HessianRoute,
) -> Result<HessianIndex> {
    if m == 0 {
        return Err(Error::Parameter("m must be positive".into()));
    }
    if schedule.is_empty() {
        return Err(Error::Parameter("empty truncation schedule".into()));
    }
    let levels = schedule
        .iter()
        .map(|&nm| {
            let q = match route {
                HessianRoute::Reduced => reduced_form(orbit, gauge, m, nm)?,
                HessianRoute::Dual => dual_form(orbit, gauge, m, nm)?,
            };
            let (neg, zero) = inertia(&q, FORM_ZERO_TOL);
            Ok((nm, neg, zero))
        })
        .collect::<Result<Vec<_>>>()?;
    let tail = &levels[levels.len().saturating_sub(3)..];
    if tail.iter().any(|l| (l.1, l.2) != (tail[0].1, tail[0].2)) {
        return Err(Error::Convergence(format!("Galerkin inertia not stable: {levels:?}")));
    }
    let (neg, zero) = (tail[0].1 as i64, tail[0].2 as i64);
    let nu = match route {
        HessianRoute::Reduced => zero - 1,
        HessianRoute::Dual => zero,
    };
    Ok(HessianIndex { i: neg, nu, route, levels })
}

/// Both index oracles on one iterate.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CrossCheck {
    pub m: usize,
    pub kappa: usize,
    pub hessian: (i64, i64),
    pub crossing: (i64, i64),
    pub consistent: bool,
}

/// `(i_{P,1}, ν_{P,1})` of `γ^{2m−1,P}` for the linearized flow along the orbit.
pub fn crossing_index_of_orbit(
    orbit: &OrbitRecord,
    gauge: Arc<dyn GaugeOracle>,
    m: usize,
    opts: &IndexOptions,
) -> Result<(i64, i64)> {
    let coeff = orbit.coefficient(gauge)?;
    let path = integrate_fundamental(&coeff, 256)?;
    let p = standard_p::<f64>(orbit.dim()).into_inner();
    let iterated = extend_by_symmetry(&path, &p, 2 * m - 1)?;
    let r = index_crossing(&iterated, crate::sym::UnitCircleValue::one(), &p, opts)?;
    Ok((r.i, r.nu as i64))
}

/// `i(u^{2m−1}) = i_{P,1}(γ^{2m−1,P}) − κ` and `ν(u^{2m−1}) = ν_{P,1} − 1`.
pub fn theorem32_crosscheck(
    orbit: &OrbitRecord,
    gauge: Arc<dyn GaugeOracle>,
    m: usize,
    schedule: &[usize],
    opts: &IndexOptions,
) -> Result<CrossCheck> {
    let h = hessian_index(orbit, gauge.as_ref(), m, schedule, HessianRoute::Reduced)?;
    let c = crossing_index_of_orbit(orbit, gauge, m, opts)?;
    let kappa = orbit.dim().kappa();
    let consistent = h.i == c.0 - kappa as i64 && h.nu == c.1 - 1;
    let out = CrossCheck { m, kappa, hessian: (h.i, h.nu), crossing: c, consistent };
    if !consistent {
        return Err(Error::CrossOracle(format!(
            "m = {m}: Hessian gives (i, ν) = ({}, {}), crossings give ({}, {}) with κ = {kappa}",
            h.i, h.nu, c.0, c.1
        )));
    }
    Ok(out)
}

/// Fills index, nullity and Floquet data of a record.
pub fn annotate_orbit(
    orbit: &mut OrbitRecord,
    gauge: Arc<dyn GaugeOracle>,
    schedule: &[usize],
    tol: &Tolerances,
) -> Result<()> {
    let h = hessian_index(orbit, gauge.as_ref(), 1, schedule, HessianRoute::Reduced)?;
    orbit.index = Some(h.i);
    orbit.nullity = Some(h.nu);
    let (mono, _) = orbit.monodromy(gauge, 256)?;
    orbit.floquet = Some(FloquetReport::from_monodromy(&mono, tol));
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::EllipsoidSurface;
    use crate::index::ellipsoid_index;

    fn surface(n: usize, kappa: usize, radii: &[f64]) -> EllipsoidSurface {
        EllipsoidSurface::new(Dim::new(n, kappa).unwrap(), radii.to_vec(), 1.5).unwrap()
    }

    #[test]
    fn slots_follow_parity() {
        let dim = Dim::new(2, 1).unwrap();
        let s = slots(dim, 4);
        // Plane 0 is P = −1 (odd), plane 1 is P = +1 (even, no zero mode).
        assert!(s.contains(&(0, 1)) && s.contains(&(2, 3)) && !s.contains(&(0, 2)));
        assert!(s.contains(&(1, 2)) && s.contains(&(3, 4)) && !s.contains(&(1, 1)));
    }

    #[test]
    fn primitive_examples() {
        let dim = Dim::new(2, 0).unwrap();
        // u₁(t) = cos(2πt)·e₀ ⇒ Π u = sin(2πt)/(2π)·e₀.
        let u = DualElement::zeros(dim, 3).with_mode(0, 1, Complex64::new(0.5, 0.0)).unwrap();
        for t in [0.0, 0.1, 0.37] {
            let x = u.primitive(t);
            assert!((x[0] - (2.0 * PI * t).sin() / (2.0 * PI)).abs() < 1e-15);
            assert!((u.eval(t)[0] - (2.0 * PI * t).cos()).abs() < 1e-15);
        }
        assert_eq!(DualElement::zeros(dim, 3).primitive(0.2), Vector::zeros(4));
    }

    #[test]
    fn primitive_of_even_mode_matches_quadrature() {
        let dim = Dim::new(2, 1).unwrap();
        // u₂(t) = sin(4πt)·w.
        let u = DualElement::zeros(dim, 4).with_mode(1, 2, Complex64::new(0.0, -0.5)).unwrap();
        let t = 0.3;
        assert!((u.eval(t)[1] - (4.0 * PI * t).sin()).abs() < 1e-14);
        // ∫₀ᵗ u₂ − 2∫₀^{1/2}∫₀^s u₂ by midpoint quadrature.
        let q = |a: f64, b: f64, k: usize, f: &dyn Fn(f64) -> f64| {
            let h = (b - a) / k as f64;
            (0..k).map(|i| f(a + (i as f64 + 0.5) * h)).sum::<f64>() * h
        };
        let inner = |s: f64| q(0.0, s, 400, &|r| (4.0 * PI * r).sin());
        let expected = inner(t) - 2.0 * q(0.0, 0.5, 400, &inner);
        assert!((u.primitive(t)[1] - expected).abs() < 1e-5);
    }

    #[test]
    fn zero_element_has_zero_value() {
        let g = surface(2, 0, &[1.0, 1.2]);
        let eval = PsiEvaluator::new(&g, 5);
        let (v, grad) = eval.value_and_gradient(&DualElement::zeros(g.dim(), 5)).unwrap();
        assert_eq!(v, 0.0);
        assert_eq!(grad.norm(), 0.0);
    }

    #[test]
    fn gradient_matches_differences() {
        let g = surface(2, 1, &[1.0, 1.2]);
        let eval = PsiEvaluator::new(&g, 7);
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        for _ in 0..10 {
            let u = random_start(g.dim(), 7, Sector::Full, &mut rng);
            assert!(gradient_check(&eval, &u, 20, 8).unwrap() <= 1e-5);
        }
    }

    #[test]
    fn hessian_matches_gradient_differences() {
        let g = surface(2, 0, &[1.0, 1.3]);
        let eval = PsiEvaluator::new(&g, 5);
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let u = random_start(g.dim(), 5, Sector::Full, &mut rng);
        let h = eval.hessian(&u).unwrap();
        let x = u.to_real();
        let eps = 1e-6;
        for k in [0, 3, 7, x.len() - 1] {
            let mut xp = x.clone();
            let mut xm = x.clone();
            xp[k] += eps;
            xm[k] -= eps;
            let gp = eval.value_and_gradient(&DualElement::from_real(g.dim(), 5, &xp).unwrap()).unwrap().1.to_real();
            let gm = eval.value_and_gradient(&DualElement::from_real(g.dim(), 5, &xm).unwrap()).unwrap().1.to_real();
            for i in 0..x.len() {
                let fd = (gp[i] - gm[i]) / (2.0 * eps);
                assert!((fd - h[(i, k)]).abs() < 1e-5, "entry ({i},{k}): {fd} vs {}", h[(i, k)]);
            }
        }
    }

    #[test]
    fn pi_form_is_symmetric() {
        let dim = Dim::new(3, 1).unwrap();
        let sl = slots(dim, 6);
        let ts: Vec<f64> = (0..64).map(|j| j as f64 / 64.0).collect();
        let kt = vec![Mat::<f64>::zeros(6, 6); 64];
        let q = assemble_form(dim, &sl, 0.5, &ts, &kt);
        assert!((&q - q.transpose()).amax() < 1e-12);
    }

    fn sphere_orbit() -> (EllipsoidSurface, OrbitRecord) {
        let g = surface(2, 0, &[1.0, 1.0]);
        let opts = FinderOptions { restarts: 1, ..FinderOptions::default() };
        let orbits = find_critical_points(&g, &opts).unwrap();
        (g, orbits[0].clone())
    }

    #[test]
    fn sphere_orbit_data() {
        let (g, o) = sphere_orbit();
        assert!((o.action - PI).abs() < 1e-6, "action {}", o.action);
        assert!((o.minimal_period - 2.0 * PI).abs() < 1e-6, "period {}", o.minimal_period);
        assert!(o.psi < 0.0);
        assert!(o.residual < 1e-6);
        assert_eq!(o.symmetry_class, SymmetryClass::PSymmetric);
        for s in &o.trajectory {
            assert!((g.j(&Vector::from_column_slice(&s.y)) - 1.0).abs() < 1e-8);
        }
        assert!(!geometric_distinctness(&o, &o, 1e-6));
    }

    #[test]
    fn sphere_orbit_index() {
        let (g, o) = sphere_orbit();
        let b = hessian_index(&o, &g, 1, &DEFAULT_SCHEDULE, HessianRoute::Reduced).unwrap();
        assert_eq!((b.i, b.nu), (0, 3));
        let a = hessian_index(&o, &g, 1, &[24, 32, 40], HessianRoute::Dual).unwrap();
        assert_eq!((a.i, a.nu), (0, 3));
    }

    #[test]
    fn ellipsoid_orbits_and_cross_check() {
        let g = surface(2, 0, &[1.0, 1.2]);
        let orbits = find_critical_points(&g, &FinderOptions { restarts: 2, ..FinderOptions::default() }).unwrap();
        assert_eq!(orbits.len(), 2);
        assert!((orbits[0].action - PI).abs() < 1e-6);
        assert!((orbits[1].action - 1.44 * PI).abs() < 1e-6);
        assert!(geometric_distinctness(&orbits[0], &orbits[1], DEDUP_TOL));
        let shared: Arc<dyn GaugeOracle> = Arc::new(g.clone());
        for o in &orbits {
            for m in [1, 2] {
                let c = theorem32_crosscheck(o, shared.clone(), m, &DEFAULT_SCHEDULE, &IndexOptions::default()).unwrap();
                assert!(c.consistent);
                let a = hessian_index(o, &g, m, &[24, 32, 40], HessianRoute::Dual).unwrap();
                assert_eq!((a.i, a.nu), c.hessian, "dual route at m = {m}");
            }
        }
    }

    #[test]
    fn reduced_form_on_constant_coefficients_matches_formula() {
        // A round sphere of radius ρ has H₂″ = (2/ρ²)I, so the form is the
        // constant-coefficient one with c = 2/ρ² on [0, (2m−1)τ₂/2].
        let (_, o) = sphere_orbit();
        for rho in [0.8, 1.0, 1.3] {
            let g = surface(2, 0, &[rho, rho]);
            let h = hessian_index(&o, &g, 2, &DEFAULT_SCHEDULE, HessianRoute::Reduced).unwrap();
            let c = 2.0 / (rho * rho);
            let s = 3.0 * o.tau2 / 2.0;
            assert_eq!(h.i, ellipsoid_index(g.dim(), c, s).unwrap(), "ρ = {rho}");
        }
    }

    /// Great circle in plane `k` of the unit sphere as an exact critical point:
    /// `x(t) = λ(cos 2πt e_k + sin 2πt e_{n+k})`, `u = ẋ`, `αλ^{α−2} = 2π`.
    fn great_circle(n: usize, k: usize, alpha: f64) -> (DualElement, f64) {
        let lambda = (2.0 * PI / alpha).powf(1.0 / (alpha - 2.0));
        let u = DualElement::zeros(Dim::new(n, 0).unwrap(), 7)
            .with_mode(k, 1, Complex64::new(0.0, PI * lambda))
            .unwrap()
            .with_mode(n + k, 1, Complex64::new(PI * lambda, 0.0))
            .unwrap();
        (u, lambda)
    }

    #[test]
    fn great_circle_value_matches_closed_form() {
        let g = surface(2, 0, &[1.0, 1.0]);
        let eval = PsiEvaluator::new(&g, 7);
        let (u, lambda) = great_circle(2, 0, 1.5);
        let (v, grad) = eval.value_and_gradient(&u).unwrap();
        // ½∫Ju·x = −πλ²/2 and ∫G(−Ju) = (α−1)λ^α/2 over [0,½].
        let expected = 0.5 * (-PI * lambda * lambda + 0.5 * lambda.powf(1.5));
        assert!((v - expected).abs() < 1e-14, "{v} vs {expected}");
        assert!(v < 0.0);
        assert!(grad.norm() < 1e-12 * (1.0 + v.abs()));
    }

    #[test]
    fn distinctness_examples() {
        let g = surface(2, 0, &[1.0, 1.0]);
        let record = |k: usize| {
            let (u, _) = great_circle(2, k, 1.5);
            let cp = CriticalPoint { u, psi: 0.0, grad_norm: 0.0, iterations: 0 };
            reconstruct_orbit(&g, &cp, Sector::Plane(k), 0, 128).unwrap()
        };
        let a = record(0);
        let b = record(1);
        assert!(geometric_distinctness(&a, &b, DEDUP_TOL));
        assert!((orbit_distance(&a, &b) - 2f64.sqrt()).abs() < 1e-6);

        let mut shifted = a.clone();
        for s in shifted.trajectory.iter_mut() {
            s.s += 0.37;
            s.y = a.y_at(s.s).iter().copied().collect();
        }
        assert!(!geometric_distinctness(&a, &shifted, 1e-8));

        let ell = surface(2, 1, &[1.0, 1.2]);
        let o = find_critical_points(&ell, &FinderOptions { restarts: 1, ..FinderOptions::default() }).unwrap().remove(0);
        let dim = o.dim();
        let sign = |i: usize| f64::from(dim.plane_sign(i % dim.n()));
        let mut mirrored = o.clone();
        mirrored.u = o.u.map_coeffs(|_, (c, _), z| z * sign(c));
        mirrored.xi_shift = o.xi_shift.iter().enumerate().map(|(i, x)| sign(i) * x).collect();
        for s in mirrored.trajectory.iter_mut() {
            s.y = s.y.iter().enumerate().map(|(i, x)| sign(i) * x).collect();
        }
        assert!(!geometric_distinctness(&o, &mirrored, 1e-8));
    }

    #[test]
    fn comparison_forms_sandwich_the_orbit_form() {
        let (r, big_r) = (1.0, 1.2);
        let g = surface(2, 0, &[r, big_r]);
        let inner = surface(2, 0, &[r, r]);
        let outer = surface(2, 0, &[big_r, big_r]);
        for o in find_critical_points(&g, &FinderOptions { restarts: 1, ..FinderOptions::default() }).unwrap() {
            for m in [1, 2, 3] {
                let q = hessian_index(&o, &g, m, &DEFAULT_SCHEDULE, HessianRoute::Reduced).unwrap().i;
                let q_big = hessian_index(&o, &outer, m, &DEFAULT_SCHEDULE, HessianRoute::Reduced).unwrap().i;
                let q_small = hessian_index(&o, &inner, m, &DEFAULT_SCHEDULE, HessianRoute::Reduced).unwrap().i;
                assert!(q_big <= q && q <= q_small, "m = {m}: {q_big} ≤ {q} ≤ {q_small}");
                let s = (2 * m - 1) as f64 * o.tau2 / 2.0;
                assert_eq!(q_big, ellipsoid_index(g.dim(), 2.0 / (big_r * big_r), s).unwrap());
            }
        }
    }

    #[test]
    fn ordered_orbits_satisfy_index_interval() {
        for (n, kappa, radii) in [(2, 0, vec![1.0, 1.2]), (3, 1, vec![1.0, 1.1, 1.2])] {
            let g = surface(n, kappa, &radii);
            let orbits = find_critical_points(&g, &FinderOptions { restarts: 1, ..FinderOptions::default() }).unwrap();
            assert!(orbits.len() >= n - kappa);
            for i in [1, n - kappa] {
                let h = hessian_index(&orbits[i - 1], &g, 1, &DEFAULT_SCHEDULE, HessianRoute::Reduced).unwrap();
                let target = 2 * (i as i64 - 1);
                assert!(h.i <= target && target <= h.i + h.nu - 1, "orbit {i}: (i, ν) = ({}, {})", h.i, h.nu);
            }
        }
    }

    #[test]
    fn constant_coefficient_orbit_matches_both_oracles() {
        let (_, o) = sphere_orbit();
        let g = surface(2, 0, &[0.9, 0.9]);
        let shared: Arc<dyn GaugeOracle> = Arc::new(g.clone());
        for m in [1, 2] {
            let expected = ellipsoid_index(g.dim(), 2.0 / 0.81, (2 * m - 1) as f64 * o.tau2 / 2.0).unwrap();
            let c = theorem32_crosscheck(&o, shared.clone(), m, &DEFAULT_SCHEDULE, &IndexOptions::default()).unwrap();
            assert_eq!(c.hessian.0, expected);
        }
    }

}
