//! Symplectic paths: fundamental solutions of `γ̇ = J A(t) γ`, extension of
//! a half-period path by the P-symmetry identity, the reference path `ξ_n`
//! and concatenation.

use crate::error::{Error, Result};
use crate::scalar::{lit, max_abs, to_f64, Mat, Scalar};
use crate::sym::{reproject, standard_j, symplectic_defect};
use std::fmt;
use std::sync::Arc;

pub type MatFn<T> = Arc<dyn Fn(T) -> Mat<T> + Send + Sync>;

/// Default bound for `‖A(t + T) − P A(t) P‖` in symmetry checks.
pub const TOL_SYM: f64 = 1e-9;
/// Largest symplectic defect accepted at the end of an integration.
pub const INTEGRATION_DEFECT: f64 = 1e-8;
/// Endpoint change between successive step doublings accepted as converged.
const INTEGRATION_AGREEMENT: f64 = 1e-10;
const MAX_STEPS: usize = 1 << 16;

/// A symmetric coefficient `t ↦ A(t)` with the half period `T = τ₂/2`.
#[derive(Clone)]
pub struct CoefficientFunction<T: Scalar> {
    a: MatFn<T>,
    n: usize,
    half_period: T,
    symmetry_checked: bool,
}

impl<T: Scalar> fmt::Debug for CoefficientFunction<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("CoefficientFunction")
            .field("n", &self.n)
            .field("half_period", &self.half_period)
            .field("symmetry_checked", &self.symmetry_checked)
            .finish()
    }
}

impl<T: Scalar> CoefficientFunction<T> {
    pub fn new(n: usize, half_period: T, a: impl Fn(T) -> Mat<T> + Send + Sync + 'static) -> Result<Self> {
        if n == 0 {
            return Err(Error::Dimension("coefficient needs n ≥ 1".into()));
        }
        if !(half_period > T::zero()) {
            return Err(Error::Parameter(format!("half period must be positive, got {half_period}")));
        }
        Ok(CoefficientFunction { a: Arc::new(a), n, half_period, symmetry_checked: false })
    }

    /// `A(t) ≡ a`.
    pub fn constant(a: Mat<T>, half_period: T) -> Result<Self> {
        let n = a.nrows() / 2;
        if !a.is_square() || a.nrows() % 2 != 0 {
            return Err(Error::Dimension("coefficient must be an even square matrix".into()));
        }
        Self::new(n, half_period, move |_| a.clone())
    }

    pub fn eval(&self, t: T) -> Mat<T> {
        (self.a)(t)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn half_period(&self) -> T {
        self.half_period
    }

    pub fn symmetry_checked(&self) -> bool {
        self.symmetry_checked
    }

    /// Checks symmetry of `A(t)` and `A(t + T) = P A(t) P` on `samples`
    /// points of `[0, T]`; marks the coefficient as checked on success.
    pub fn verify_p_symmetry(mut self, p: &Mat<T>, samples: usize, tol: f64) -> Result<Self> {
        if p.nrows() != 2 * self.n {
            return Err(Error::Dimension("P does not match the coefficient size".into()));
        }
        let count = samples.max(2);
        for k in 0..count {
            let t = self.half_period * lit::<T>(k as f64 / (count - 1) as f64);
            let a = self.eval(t);
            let scale = to_f64(max_abs(&a)).max(1.0);
            let asym = to_f64(max_abs(&(&a - a.transpose())));
            if asym > tol * scale {
                return Err(Error::Symmetry(format!("A({t}) is not symmetric (defect {asym:e})")));
            }
            let shifted = self.eval(t + self.half_period);
            let defect = to_f64(max_abs(&(shifted - p * &a * p)));
            if defect > tol * scale {
                return Err(Error::Symmetry(format!("A(t + T) ≠ P A(t) P at t = {t} (defect {defect:e})")));
            }
        }
        self.symmetry_checked = true;
        Ok(self)
    }

    /// Coefficient restricted to `[0, T]` and continued by
    /// `Ã(t) = P^j A(t − jT) P^j`; symmetric by construction.
    pub fn symmetric_extension(&self, p: &Mat<T>) -> Self {
        let a = self.a.clone();
        let t_half = self.half_period;
        let p = p.clone();
        CoefficientFunction {
            a: Arc::new(move |t: T| {
                let (j, s) = split_period(t, t_half);
                let v = a(s);
                if j % 2 == 1 {
                    &p * v * &p
                } else {
                    v
                }
            }),
            n: self.n,
            half_period: t_half,
            symmetry_checked: true,
        }
    }
}

/// `t = jT + s` with `s ∈ [0, T)`; the last point `t = mT` maps to `(m − 1, T)`.
fn split_period<T: Scalar>(t: T, t_half: T) -> (usize, T) {
    let q = to_f64(t / t_half);
    if q <= 0.0 {
        return (0, t);
    }
    let mut j = q.floor() as usize;
    if j as f64 == q && j > 0 {
        j -= 1;
    }
    (j, t - t_half * lit::<T>(j as f64))
}

/// A continuous path of symplectic matrices on `[0, t_end]`.
///
/// Samples are kept for inspection and serialization; `eval` gives the
/// value at any time (re-integrating from the nearest sample when the path
/// came from a coefficient).
#[derive(Clone)]
pub struct SymplecticPath<T: Scalar> {
    n: usize,
    t_end: T,
    samples: Vec<(T, Mat<T>)>,
    eval: MatFn<T>,
    generator: Option<CoefficientFunction<T>>,
    symmetric: bool,
}

impl<T: Scalar> fmt::Debug for SymplecticPath<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("SymplecticPath")
            .field("n", &self.n)
            .field("t_end", &self.t_end)
            .field("samples", &self.samples.len())
            .field("generator", &self.generator)
            .finish()
    }
}

impl<T: Scalar> SymplecticPath<T> {
    /// Path given by an evaluator, sampled on `samples + 1` uniform points.
    pub fn from_fn(n: usize, t_end: T, samples: usize, f: impl Fn(T) -> Mat<T> + Send + Sync + 'static) -> Result<Self> {
        if !(t_end > T::zero()) {
            return Err(Error::Parameter(format!("path length must be positive, got {t_end}")));
        }
        let eval: MatFn<T> = Arc::new(f);
        let count = samples.max(1);
        let pts = (0..=count)
            .map(|k| {
                let t = t_end * lit::<T>(k as f64 / count as f64);
                (t, eval(t))
            })
            .collect();
        Ok(SymplecticPath { n, t_end, samples: pts, eval, generator: None, symmetric: false })
    }

    /// Path through the given samples, piecewise linear in between and
    /// re-projected onto `Sp(2n)`.
    pub fn from_samples(samples: Vec<(T, Mat<T>)>, tol_sp: f64) -> Result<Self> {
        if samples.len() < 2 {
            return Err(Error::Parameter("a sampled path needs at least two samples".into()));
        }
        let n = samples[0].1.nrows() / 2;
        if to_f64(samples[0].0).abs() > 1e-12 {
            return Err(Error::Parameter("sampled path must start at t = 0".into()));
        }
        for w in samples.windows(2) {
            if !(w[1].0 > w[0].0) {
                return Err(Error::Parameter("sample times must increase".into()));
            }
        }
        for (t, m) in &samples {
            if m.nrows() != 2 * n || !m.is_square() {
                return Err(Error::Dimension(format!("sample at t = {t} has the wrong shape")));
            }
            let d = to_f64(symplectic_defect(m));
            if d > tol_sp {
                return Err(Error::Numerical(format!("sample at t = {t} has symplectic defect {d:e}")));
            }
        }
        let t_end = samples[samples.len() - 1].0;
        let data = Arc::new(samples.clone());
        let eval: MatFn<T> = Arc::new(move |t: T| {
            let k = match data.binary_search_by(|s| s.0.partial_cmp(&t).unwrap_or(std::cmp::Ordering::Less)) {
                Ok(k) => return data[k].1.clone(),
                Err(k) => k.clamp(1, data.len() - 1),
            };
            let (t0, m0) = &data[k - 1];
            let (t1, m1) = &data[k];
            let w = (t - *t0) / (*t1 - *t0);
            reproject(&(m0 * (T::one() - w) + m1 * w))
        });
        Ok(SymplecticPath { n, t_end, samples, eval, generator: None, symmetric: false })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn t_end(&self) -> T {
        self.t_end
    }

    pub fn samples(&self) -> &[(T, Mat<T>)] {
        &self.samples
    }

    pub fn generator(&self) -> Option<&CoefficientFunction<T>> {
        self.generator.as_ref()
    }

    pub fn eval(&self, t: T) -> Mat<T> {
        (self.eval)(t)
    }

    pub fn evaluator(&self) -> MatFn<T> {
        self.eval.clone()
    }

    pub fn endpoint(&self) -> Mat<T> {
        self.samples.last().map(|s| s.1.clone()).unwrap_or_else(|| self.eval(self.t_end))
    }

    pub fn start(&self) -> Mat<T> {
        self.samples[0].1.clone()
    }

    /// Whether the iterate identity may be applied (symmetric generator, or
    /// declared by [`SymplecticPath::assume_p_symmetric`]).
    pub fn is_p_symmetric(&self) -> bool {
        self.symmetric || self.generator.as_ref().is_some_and(|g| g.symmetry_checked)
    }

    /// Declares that the path is the half-period piece of a P-symmetric
    /// system, so that [`extend_by_symmetry`] may iterate it.
    pub fn assume_p_symmetric(mut self) -> Self {
        self.symmetric = true;
        self
    }

    /// `t ↦ γ(t)·e^{−s t J / T}`, used to move a degenerate endpoint.
    pub fn rotated_back(&self, s: T) -> Self {
        let inner = self.eval.clone();
        let t_end = self.t_end;
        let n = self.n;
        let f = move |t: T| {
            let m = inner(t);
            m * crate::sym::exp_j(n, -s * t / t_end)
        };
        let mut out = SymplecticPath::from_fn(n, t_end, self.samples.len().max(2) - 1, f)
            .expect("positive length is inherited");
        out.symmetric = self.symmetric;
        out
    }

    /// Largest symplectic defect among the stored samples.
    pub fn max_defect(&self) -> T {
        self.samples.iter().fold(T::zero(), |a, s| a.max(symplectic_defect(&s.1)))
    }
}

fn rk4_step<T: Scalar>(coeff: &CoefficientFunction<T>, j: &Mat<T>, t: T, h: T, y: &Mat<T>) -> Mat<T> {
    let half = lit::<T>(0.5);
    let f = |s: T, m: &Mat<T>| j * coeff.eval(s) * m;
    let k1 = f(t, y);
    let k2 = f(t + h * half, &(y + &k1 * (h * half)));
    let k3 = f(t + h * half, &(y + &k2 * (h * half)));
    let k4 = f(t + h, &(y + &k3 * h));
    let incr = (k1 + (k2 + k3) * lit::<T>(2.0) + k4) * (h / lit::<T>(6.0));
    reproject(&(y + incr))
}

fn integrate_fixed<T: Scalar>(coeff: &CoefficientFunction<T>, t_end: T, steps: usize) -> Vec<(T, Mat<T>)> {
    let dim = 2 * coeff.n();
    let j = standard_j::<T>(coeff.n());
    let h = t_end / lit::<T>(steps as f64);
    let mut y = Mat::<T>::identity(dim, dim);
    let mut out = Vec::with_capacity(steps + 1);
    out.push((T::zero(), y.clone()));
    for k in 0..steps {
        let t = h * lit::<T>(k as f64);
        y = rk4_step(coeff, &j, t, h, &y);
        let tk = if k + 1 == steps { t_end } else { h * lit::<T>((k + 1) as f64) };
        out.push((tk, y.clone()));
    }
    out
}

/// Fundamental solution of `γ̇ = J A(t) γ`, `γ(0) = I`, on `[0, T]` with
/// `T` the coefficient's half period.
pub fn integrate_fundamental<T: Scalar>(coeff: &CoefficientFunction<T>, steps: usize) -> Result<SymplecticPath<T>> {
    integrate_on(coeff, coeff.half_period(), steps)
}

/// Fundamental solution on `[0, t_end]`. Steps double until the endpoint
/// changes by less than `1e−10` (relative) between refinements.
pub fn integrate_on<T: Scalar>(coeff: &CoefficientFunction<T>, t_end: T, steps: usize) -> Result<SymplecticPath<T>> {
    if steps < 64 {
        return Err(Error::Parameter(format!("integration needs at least 64 steps, got {steps}")));
    }
    if !(t_end > T::zero()) {
        return Err(Error::Parameter("integration interval must be positive".into()));
    }
    let mut n_steps = steps;
    let mut coarse = integrate_fixed(coeff, t_end, n_steps);
    loop {
        let fine = integrate_fixed(coeff, t_end, 2 * n_steps);
        let (ec, ef) = (&coarse[coarse.len() - 1].1, &fine[fine.len() - 1].1);
        let diff = to_f64(max_abs(&(ec - ef)));
        let scale = 1.0 + to_f64(max_abs(ef));
        let defect = to_f64(symplectic_defect(ef));
        if diff <= INTEGRATION_AGREEMENT * scale && defect <= INTEGRATION_DEFECT {
            return Ok(path_from_integration(coeff.clone(), t_end, 2 * n_steps, fine));
        }
        n_steps *= 2;
        if 2 * n_steps > MAX_STEPS {
            return Err(Error::Integration(format!(
                "no convergence with {} steps (change {diff:e}, defect {defect:e})",
                2 * n_steps
            )));
        }
        coarse = fine;
    }
}

fn path_from_integration<T: Scalar>(
    coeff: CoefficientFunction<T>,
    t_end: T,
    steps: usize,
    samples: Vec<(T, Mat<T>)>,
) -> SymplecticPath<T> {
    let data = Arc::new(samples.clone());
    let h = t_end / lit::<T>(steps as f64);
    let c2 = coeff.clone();
    let j = standard_j::<T>(coeff.n());
    let eval: MatFn<T> = Arc::new(move |t: T| {
        let q = to_f64(t / h).clamp(0.0, steps as f64);
        let k = q.floor() as usize;
        let (t0, m0) = &data[k.min(steps)];
        let dt = t - *t0;
        if to_f64(dt).abs() <= 1e-15 * to_f64(t_end) {
            return m0.clone();
        }
        // At most one base step: a few RK4 substeps from the sample.
        let sub = 4;
        let hs = dt / lit::<T>(sub as f64);
        let mut y = m0.clone();
        for i in 0..sub {
            y = rk4_step(&c2, &j, *t0 + hs * lit::<T>(i as f64), hs, &y);
        }
        y
    });
    SymplecticPath { n: coeff.n(), t_end, samples, eval, generator: Some(coeff), symmetric: false }
}

/// Path `t ↦ U^t S^t` on `[0, 1]` from `I` to a symplectic `x = US`, where
/// `S = (xᵀx)^{1/2}` and `U` is orthogonal symplectic, i.e. a unitary
/// `W = A + iB` in the complex coordinates `x + iy`. Powers of `W` come from
/// its (diagonal) Schur form, powers of `S` from its eigenvectors.
pub fn path_to_matrix(x: &Mat<f64>, samples: usize) -> Result<SymplecticPath<f64>> {
    use nalgebra::{Complex, DMatrix};
    if !x.is_square() || x.nrows() % 2 != 0 {
        return Err(Error::Dimension("target must be a square matrix of even size".into()));
    }
    let n = x.nrows() / 2;
    let defect = symplectic_defect(x);
    if defect > 1e-8 * (1.0 + max_abs(x) * max_abs(x)) {
        return Err(Error::Numerical(format!("target is not symplectic (defect {defect:e})")));
    }
    let eig = (x.transpose() * x).symmetric_eigen();
    let v = eig.eigenvectors.clone();
    let lam = eig.eigenvalues.clone();
    let s_inv = &v * Mat::from_diagonal(&lam.map(|l| 1.0 / l.sqrt())) * v.transpose();
    let u = x * s_inv;
    let w = DMatrix::from_fn(n, n, |i, j| Complex::new(u[(i, j)], u[(n + i, j)]));
    let (q, t) = w.schur().unpack();
    let phases: Vec<f64> = (0..n).map(|k| t[(k, k)].arg()).collect();
    let f = move |s: f64| {
        let d = DMatrix::from_diagonal(&nalgebra::DVector::from_iterator(
            n,
            phases.iter().map(|ph| Complex::from_polar(1.0, s * ph)),
        ));
        let ws = &q * d * q.adjoint();
        let mut us = Mat::<f64>::zeros(2 * n, 2 * n);
        for i in 0..n {
            for j in 0..n {
                let z = ws[(i, j)];
                us[(i, j)] = z.re;
                us[(i, n + j)] = -z.im;
                us[(n + i, j)] = z.im;
                us[(n + i, n + j)] = z.re;
            }
        }
        let ss = &v * Mat::from_diagonal(&lam.map(|l| l.powf(0.5 * s))) * v.transpose();
        us * ss
    };
    let end = f(1.0);
    let miss = (&end - x).amax();
    if miss > 1e-9 * (1.0 + max_abs(x)) {
        return Err(Error::Numerical(format!("polar path misses its target by {miss:e}")));
    }
    SymplecticPath::from_fn(n, 1.0, samples, f)
}

/// Builds `γ^{m,P}` on `[0, mT]` from `γ(jT + s) = P^j γ(s) P^j γ(jT)`,
/// `γ((j+1)T) = P γ(jT) P γ(T)`.
pub fn extend_by_symmetry<T: Scalar>(path: &SymplecticPath<T>, p: &Mat<T>, m: usize) -> Result<SymplecticPath<T>> {
    if m == 0 || m % 2 == 0 {
        return Err(Error::Parameter(format!("iteration count must be odd and positive, got {m}")));
    }
    if !path.is_p_symmetric() {
        return Err(Error::Symmetry("path is not certified P-symmetric; extension undefined".into()));
    }
    if p.nrows() != 2 * path.n() {
        return Err(Error::Dimension("P does not match the path size".into()));
    }
    let t_half = path.t_end();
    let g_t = path.endpoint();
    let mut g = vec![Mat::<T>::identity(p.nrows(), p.nrows())];
    for j in 0..m {
        let next = p * &g[j] * p * &g_t;
        g.push(next);
    }
    let g = Arc::new(g);
    let inner = path.evaluator();
    let p2 = p.clone();
    let eval = move |t: T| {
        let (j, s) = split_period(t, t_half);
        let base = inner(s);
        if j == 0 {
            base
        } else if j % 2 == 1 {
            &p2 * base * &p2 * &g[j]
        } else {
            base * &g[j]
        }
    };
    let t_end = t_half * lit::<T>(m as f64);
    let per = path.samples().len().max(2) - 1;
    let mut out = SymplecticPath::from_fn(path.n(), t_end, per * m, eval)?;
    out.generator = path.generator.as_ref().map(|g| g.symmetric_extension(p));
    out.symmetric = true;
    Ok(out)
}

/// `ξ_n(t) = diag(2 − t/τ, (2 − t/τ)^{−1})^{⋄n}` on `[0, τ]`.
pub fn xi_path<T: Scalar>(n: usize, tau: T) -> Result<SymplecticPath<T>> {
    if n == 0 {
        return Err(Error::Dimension("ξ_n needs n ≥ 1".into()));
    }
    SymplecticPath::from_fn(n, tau, 16, move |t: T| xi_value(n, tau, t))
}

pub fn xi_value<T: Scalar>(n: usize, tau: T, t: T) -> Mat<T> {
    let a = lit::<T>(2.0) - t / tau;
    let mut m = Mat::<T>::zeros(2 * n, 2 * n);
    for k in 0..n {
        m[(k, k)] = a;
        m[(n + k, n + k)] = T::one() / a;
    }
    m
}

/// `η ∗ ξ` on `[0, τ]` with `τ` the length of `η`: `ξ` runs on the first
/// half, `η` on the second. Requires `ξ(end) = η(0)`.
pub fn concatenate<T: Scalar>(eta: &SymplecticPath<T>, xi: &SymplecticPath<T>) -> Result<SymplecticPath<T>> {
    if eta.n() != xi.n() {
        return Err(Error::Dimension("concatenated paths differ in size".into()));
    }
    let gap = to_f64(max_abs(&(xi.endpoint() - eta.start())));
    if gap > 1e-8 {
        return Err(Error::Concatenation(format!("ξ(end) and η(0) differ by {gap:e}")));
    }
    let tau = eta.t_end();
    let (te, tx) = (eta.t_end(), xi.t_end());
    let (fe, fx) = (eta.evaluator(), xi.evaluator());
    let half = tau * lit::<T>(0.5);
    let eval = move |t: T| {
        if t <= half {
            fx(t / half * tx)
        } else {
            fe((t - half) / half * te)
        }
    };
    let count = eta.samples().len() + xi.samples().len();
    let mut out = SymplecticPath::from_fn(eta.n(), tau, count, eval)?;
    // Keep the endpoints exact.
    out.samples[0].1 = xi.start();
    let last = out.samples.len() - 1;
    out.samples[last].1 = eta.endpoint();
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sym::{exp_j, standard_p, Dim};
    use std::f64::consts::PI;

    fn close(a: &Mat<f64>, b: &Mat<f64>, tol: f64) -> bool {
        (a - b).amax() <= tol
    }

    #[test]
    fn constant_coefficient_matches_exponential() {
        let a = Mat::<f64>::identity(4, 4) * 2.0;
        let c = CoefficientFunction::constant(a, PI / 2.0).unwrap();
        let path = integrate_fundamental(&c, 64).unwrap();
        assert!(close(&path.endpoint(), &(-Mat::<f64>::identity(4, 4)), 1e-9));
        for s in [0.3, 1.1] {
            assert!(close(&path.eval(s), &exp_j(2, 2.0 * s), 1e-9));
        }
        assert!(path.max_defect() < 1e-8);
    }

    #[test]
    fn zero_field_is_identity() {
        let c = CoefficientFunction::constant(Mat::<f64>::zeros(4, 4), 1.0).unwrap();
        let path = integrate_fundamental(&c, 64).unwrap();
        assert!(path.samples().iter().all(|(_, m)| close(m, &Mat::identity(4, 4), 0.0)));
    }

    #[test]
    fn too_few_steps_rejected() {
        let c = CoefficientFunction::constant(Mat::<f64>::zeros(2, 2), 1.0).unwrap();
        assert!(matches!(integrate_fundamental(&c, 10), Err(Error::Parameter(_))));
    }

    #[test]
    fn sphere_extension_closes_up() {
        let p = standard_p::<f64>(Dim::new(2, 0).unwrap()).into_inner();
        let c = CoefficientFunction::constant(Mat::<f64>::identity(4, 4) * 2.0, PI / 2.0)
            .unwrap()
            .verify_p_symmetry(&p, 8, TOL_SYM)
            .unwrap();
        let path = integrate_fundamental(&c, 64).unwrap();
        let full = extend_by_symmetry(&path, &p, 1).unwrap();
        assert!(close(&full.endpoint(), &path.endpoint(), 0.0));
        let m = &p * path.endpoint();
        let two = extend_two_halves(&path, &p);
        assert!(close(&two, &(&m * &m), 1e-12));
        assert!(close(&two, &Mat::identity(4, 4), 1e-9));
        let three = extend_by_symmetry(&path, &p, 3).unwrap();
        assert!(close(&three.endpoint(), &exp_j(2, 3.0 * PI), 1e-9));
    }

    /// `γ(2T)` composed from the identity.
    fn extend_two_halves(path: &SymplecticPath<f64>, p: &Mat<f64>) -> Mat<f64> {
        let g = path.endpoint();
        p * &g * p * &g
    }

    #[test]
    fn extension_requires_symmetry_certificate() {
        let c = CoefficientFunction::constant(Mat::<f64>::identity(4, 4), 1.0).unwrap();
        let path = integrate_fundamental(&c, 64).unwrap();
        let p = standard_p::<f64>(Dim::new(2, 1).unwrap()).into_inner();
        assert!(matches!(extend_by_symmetry(&path, &p, 3), Err(Error::Symmetry(_))));
        assert!(matches!(
            extend_by_symmetry(&path.clone().assume_p_symmetric(), &p, 2),
            Err(Error::Parameter(_))
        ));
    }

    #[test]
    fn symmetry_violation_is_detected() {
        let p = standard_p::<f64>(Dim::new(2, 1).unwrap()).into_inner();
        // The (0,1) entry couples a reflected and a fixed plane, so it must
        // flip sign over a half period; a constant one does not.
        let mut a = Mat::<f64>::identity(4, 4);
        a[(0, 1)] = 0.3;
        a[(1, 0)] = 0.3;
        let c = CoefficientFunction::constant(a, 1.0).unwrap();
        assert!(matches!(c.verify_p_symmetry(&p, 8, TOL_SYM), Err(Error::Symmetry(_))));
    }

    #[test]
    fn xi_path_values() {
        let xi = xi_path::<f64>(2, 1.0).unwrap();
        let d = |v: [f64; 4]| Mat::from_diagonal(&nalgebra::DVector::from_vec(v.to_vec()));
        assert!(close(&xi.eval(0.0), &d([2.0, 2.0, 0.5, 0.5]), 0.0));
        assert!(close(&xi.eval(1.0), &Mat::identity(4, 4), 0.0));
        assert!(close(&xi.eval(0.5), &d([1.5, 1.5, 2.0 / 3.0, 2.0 / 3.0]), 1e-15));
    }

    #[test]
    fn concatenation_endpoints() {
        let c = CoefficientFunction::constant(Mat::<f64>::identity(4, 4), 1.0).unwrap();
        let g = integrate_fundamental(&c, 64).unwrap();
        let xi = xi_path::<f64>(2, 1.0).unwrap();
        let cat = concatenate(&g, &xi).unwrap();
        assert!(close(&cat.start(), &xi.start(), 0.0));
        assert!(close(&cat.endpoint(), &g.endpoint(), 0.0));
        assert!(close(&cat.eval(0.25), &xi.eval(0.5), 1e-15));
        assert!(close(&cat.eval(0.75), &g.eval(0.5), 1e-9));
        assert!(matches!(concatenate(&xi, &g), Err(Error::Concatenation(_))));
        let id = SymplecticPath::from_fn(2, 1.0, 4, |_| Mat::<f64>::identity(4, 4)).unwrap();
        let cat = concatenate(&id, &id).unwrap();
        assert!(cat.samples().iter().all(|(_, m)| close(m, &Mat::identity(4, 4), 0.0)));
    }

    #[test]
    fn sampled_path_interpolates_symplectically() {
        let pts: Vec<(f64, Mat<f64>)> = (0..=20).map(|k| {
            let t = k as f64 / 20.0;
            (t, exp_j(2, t))
        }).collect();
        let path = SymplecticPath::from_samples(pts, 1e-9).unwrap();
        let m = path.eval(0.512);
        assert!(symplectic_defect(&m) < 1e-12);
        assert!(close(&m, &exp_j(2, 0.512), 1e-3));
    }

    #[test]
    fn path_to_matrix_reaches_targets() {
        use crate::normal_form::{build_basic_form, BasicForm};
        use crate::sym::{diamond, rotation};
        let n2 = build_basic_form::<f64>(&BasicForm::n2_scaled(2.0, -0.7)).unwrap();
        let shear = build_basic_form::<f64>(&BasicForm::N1 { lambda: -1.0, b: 1.0 }).unwrap();
        let d = build_basic_form::<f64>(&BasicForm::D { lambda: -2.0 }).unwrap();
        let p = standard_p::<f64>(Dim::new(3, 1).unwrap()).into_inner();
        let x = &diamond(&diamond(&shear, &rotation(PI)).unwrap(), &d).unwrap() * &p;
        for target in [n2, x] {
            let path = path_to_matrix(&target, 32).unwrap();
            assert!(close(&path.start(), &Mat::identity(target.nrows(), target.nrows()), 1e-12));
            assert!(close(&path.endpoint(), &target, 1e-10));
            for k in 0..=10 {
                assert!(symplectic_defect(&path.eval(k as f64 / 10.0)) < 1e-10);
            }
        }
    }

}
