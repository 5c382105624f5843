//! P-symmetric convex hypersurfaces: the diagonal ellipsoid family, its gauge,
//! the homogeneous Hamiltonians built from it, and the dual transforms the
//! dual-action functional needs.

use crate::error::{Error, Result};
use crate::scalar::Mat;
use crate::sym::Dim;
use nalgebra::DVector;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

pub type Vector = DVector<f64>;

/// Tolerance of the sampled P-symmetry check.
pub const SYMMETRY_TOL: f64 = 1e-12;

/// Everything the variational machinery asks of a hypersurface.
///
/// `H_α = j^α` drives the orbit search and `H₂ = j²` the index forms; `G` is
/// the Fenchel transform of `H_α`.
pub trait GaugeOracle: Send + Sync {
    fn dim(&self) -> Dim;
    fn alpha(&self) -> f64;
    fn j(&self, x: &Vector) -> f64;
    fn grad_j(&self, x: &Vector) -> Result<Vector>;
    fn hess_h2(&self, x: &Vector) -> Result<Mat<f64>>;
    fn polar(&self, y: &Vector) -> f64;
    fn dual_h(&self, y: &Vector) -> f64;
    fn grad_dual_h(&self, y: &Vector) -> Vector;
    fn hess_dual_h(&self, y: &Vector) -> Mat<f64>;

    fn h2(&self, x: &Vector) -> f64 {
        let j = self.j(x);
        j * j
    }

    fn grad_h2(&self, x: &Vector) -> Result<Vector> {
        Ok(self.grad_j(x)? * (2.0 * self.j(x)))
    }

    fn h_alpha(&self, x: &Vector) -> f64 {
        self.j(x).powf(self.alpha())
    }

    fn grad_h_alpha(&self, x: &Vector) -> Result<Vector> {
        let a = self.alpha();
        Ok(self.grad_j(x)? * (a * self.j(x).powf(a - 1.0)))
    }
}

/// Axis-aligned ellipsoid; plane `k` (coordinates `k`, `n+k`) has radius `r_k`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "SurfaceFile", into = "SurfaceFile")]
pub struct EllipsoidSurface {
    dim: Dim,
    radii: Vec<f64>,
    alpha: f64,
}

/// On-disk form of a surface.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct SurfaceFile {
    pub n: usize,
    pub kappa: usize,
    pub radii: Vec<f64>,
    #[serde(default = "default_alpha")]
    pub alpha: f64,
}

fn default_alpha() -> f64 {
    1.5
}

impl TryFrom<SurfaceFile> for EllipsoidSurface {
    type Error = Error;
    fn try_from(f: SurfaceFile) -> Result<Self> {
        EllipsoidSurface::new(Dim::new(f.n, f.kappa)?, f.radii, f.alpha)
    }
}

impl From<EllipsoidSurface> for SurfaceFile {
    fn from(s: EllipsoidSurface) -> Self {
        SurfaceFile { n: s.dim.n(), kappa: s.dim.kappa(), radii: s.radii, alpha: s.alpha }
    }
}

impl EllipsoidSurface {
    pub fn new(dim: Dim, radii: Vec<f64>, alpha: f64) -> Result<Self> {
        if radii.len() != dim.n() {
            return Err(Error::Dimension(format!("{} radii for n = {}", radii.len(), dim.n())));
        }
        if let Some(r) = radii.iter().find(|r| !(r.is_finite() && **r > 0.0)) {
            return Err(Error::Parameter(format!("radius {r} is not positive")));
        }
        if !(alpha > 1.0 && alpha < 2.0) {
            return Err(Error::Parameter(format!("alpha = {alpha} outside (1, 2)")));
        }
        Ok(EllipsoidSurface { dim, radii, alpha })
    }

    pub fn sphere(dim: Dim) -> Self {
        EllipsoidSurface { dim, radii: vec![1.0; dim.n()], alpha: default_alpha() }
    }

    pub fn radii(&self) -> &[f64] {
        &self.radii
    }

    pub fn with_alpha(mut self, alpha: f64) -> Result<Self> {
        if !(alpha > 1.0 && alpha < 2.0) {
            return Err(Error::Parameter(format!("alpha = {alpha} outside (1, 2)")));
        }
        self.alpha = alpha;
        Ok(self)
    }

    /// Squared radius attached to coordinate `i`.
    fn r2(&self, i: usize) -> f64 {
        let r = self.radii[i % self.dim.n()];
        r * r
    }

    fn check_len(&self, x: &Vector) {
        assert_eq!(x.len(), self.dim.size(), "vector length must be 2n");
    }

    /// Conjugate exponent `β` with `1/α + 1/β = 1`.
    pub fn beta(&self) -> f64 {
        self.alpha / (self.alpha - 1.0)
    }

    fn dual_coefficient(&self) -> f64 {
        let b = self.beta();
        b.recip() * self.alpha.powf(-b / self.alpha)
    }

    pub fn evaluate(&self, x: &Vector) -> Result<GaugeValues> {
        let j = self.j(x);
        let grad_j = self.grad_j(x)?;
        Ok(GaugeValues {
            j,
            h2: j * j,
            grad_h2: &grad_j * (2.0 * j),
            hess_h2: self.hess_h2(x)?,
            h_alpha: j.powf(self.alpha),
            grad_h_alpha: &grad_j * (self.alpha * j.powf(self.alpha - 1.0)),
            grad_j,
        })
    }

    /// Random point of `Σ` along a uniformly random direction.
    pub fn sample_point(&self, rng: &mut impl Rng) -> Vector {
        let d = random_direction(self.dim.size(), rng);
        let j = self.j(&d);
        d / j
    }
}

/// All gauge quantities at one point.
#[derive(Clone, Debug)]
pub struct GaugeValues {
    pub j: f64,
    pub grad_j: Vector,
    pub h2: f64,
    pub grad_h2: Vector,
    pub hess_h2: Mat<f64>,
    pub h_alpha: f64,
    pub grad_h_alpha: Vector,
}

impl GaugeOracle for EllipsoidSurface {
    fn dim(&self) -> Dim {
        self.dim
    }

    fn alpha(&self) -> f64 {
        self.alpha
    }

    fn j(&self, x: &Vector) -> f64 {
        self.check_len(x);
        x.iter().enumerate().map(|(i, v)| v * v / self.r2(i)).sum::<f64>().sqrt()
    }

    fn grad_j(&self, x: &Vector) -> Result<Vector> {
        let j = self.j(x);
        if j == 0.0 {
            return Err(Error::Domain("gauge derivative requested at the origin".into()));
        }
        Ok(Vector::from_fn(x.len(), |i, _| x[i] / (self.r2(i) * j)))
    }

    fn hess_h2(&self, x: &Vector) -> Result<Mat<f64>> {
        if self.j(x) == 0.0 {
            return Err(Error::Domain("Hessian requested at the origin".into()));
        }
        Ok(Mat::from_fn(x.len(), x.len(), |i, k| if i == k { 2.0 / self.r2(i) } else { 0.0 }))
    }

    fn polar(&self, y: &Vector) -> f64 {
        self.check_len(y);
        y.iter().enumerate().map(|(i, v)| v * v * self.r2(i)).sum::<f64>().sqrt()
    }

    fn dual_h(&self, y: &Vector) -> f64 {
        self.dual_coefficient() * self.polar(y).powf(self.beta())
    }

    fn grad_dual_h(&self, y: &Vector) -> Vector {
        let p = self.polar(y);
        if p == 0.0 {
            return Vector::zeros(y.len());
        }
        let b = self.beta();
        let s = self.dual_coefficient() * b * p.powf(b - 2.0);
        Vector::from_fn(y.len(), |i, _| s * self.r2(i) * y[i])
    }

    fn hess_dual_h(&self, y: &Vector) -> Mat<f64> {
        let size = y.len();
        let p = self.polar(y);
        if p == 0.0 {
            return Mat::zeros(size, size);
        }
        let b = self.beta();
        let c = self.dual_coefficient() * b;
        let ry = Vector::from_fn(size, |i, _| self.r2(i) * y[i]);
        let mut h = &ry * ry.transpose() * (c * (b - 2.0) * p.powf(b - 4.0));
        for i in 0..size {
            h[(i, i)] += c * p.powf(b - 2.0) * self.r2(i);
        }
        h
    }
}

fn random_direction(len: usize, rng: &mut impl Rng) -> Vector {
    loop {
        let v = Vector::from_fn(len, |_, _| {
            // Box-Muller keeps the direction isotropic.
            let u1: f64 = rng.gen_range(f64::EPSILON..1.0);
            let u2: f64 = rng.gen();
            (-2.0 * u1.ln()).sqrt() * (2.0 * std::f64::consts::PI * u2).cos()
        });
        let norm = v.norm();
        if norm > 1e-8 {
            return v / norm;
        }
    }
}

/// Fenchel transform of `H_α` by direct maximization along the optimal ray,
/// for validating closed forms only.
pub fn dual_h_by_maximization(gauge: &dyn GaugeOracle, y: &Vector) -> f64 {
    let p = gauge.polar(y);
    if p == 0.0 {
        return 0.0;
    }
    // The unit-gauge maximizer of x·y has x·y = j*(y); only the scale remains.
    let alpha = gauge.alpha();
    let obj = |s: f64| s * p - s.powf(alpha);
    let (mut lo, mut hi) = (0.0, 1.0);
    while obj(hi) > obj(hi / 2.0) || hi < 1e3 * f64::EPSILON {
        hi *= 2.0;
    }
    let g = 0.5 * (5f64.sqrt() - 1.0);
    for _ in 0..200 {
        let a = hi - g * (hi - lo);
        let b = lo + g * (hi - lo);
        if obj(a) > obj(b) {
            hi = b;
        } else {
            lo = a;
        }
    }
    obj(0.5 * (lo + hi))
}

/// Pinching constants and the ratio thresholds the stability results use.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PinchingCertificate {
    pub r: f64,
    #[serde(rename = "R")]
    pub big_r: f64,
    pub ratio: f64,
    pub passes_53: bool,
    pub passes_32: bool,
    pub passes_sqrt2: bool,
}

impl PinchingCertificate {
    pub fn from_bounds(r: f64, big_r: f64) -> Result<Self> {
        if !(r > 0.0 && r <= big_r) {
            return Err(Error::Parameter(format!("invalid pinching bounds r = {r}, R = {big_r}")));
        }
        let ratio = big_r / r;
        Ok(PinchingCertificate {
            r,
            big_r,
            ratio,
            passes_53: ratio < (5.0f64 / 3.0).sqrt(),
            passes_32: ratio < 1.5f64.sqrt(),
            passes_sqrt2: ratio < 2f64.sqrt(),
        })
    }
}

/// For a diagonal ellipsoid the Hessian bounds of `½H₂″` are exactly
/// `1/R²` and `1/r²`.
pub fn pinching_certificate(surface: &EllipsoidSurface) -> PinchingCertificate {
    let r = surface.radii.iter().copied().fold(f64::INFINITY, f64::min);
    let big_r = surface.radii.iter().copied().fold(0.0, f64::max);
    PinchingCertificate::from_bounds(r, big_r).expect("radii validated at construction")
}

/// Outcome of a sampled P-symmetry check.
#[derive(Clone, Debug, PartialEq)]
pub struct SymmetryVerdict {
    pub passed: bool,
    pub samples: usize,
    pub worst: f64,
    pub witness: Option<Vec<f64>>,
}

/// Samples `x ∈ Σ` and checks `|j(Px) − 1| ≤ 1e−12`.
///
/// `j` is any gauge; `Σ` is sampled by rescaling random directions.
pub fn check_p_symmetry(dim: Dim, j: &(dyn Fn(&Vector) -> f64 + Sync), samples: usize, seed: u64) -> SymmetryVerdict {
    if samples == 0 {
        log::warn!("P-symmetry check with zero samples is vacuous");
        return SymmetryVerdict { passed: true, samples: 0, worst: 0.0, witness: None };
    }
    let size = dim.size();
    let sign = |i: usize| f64::from(dim.plane_sign(i % dim.n()));
    const CHUNK: usize = 256;
    let chunks = samples.div_ceil(CHUNK);
    let worst = (0..chunks)
        .into_par_iter()
        .map(|c| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed.wrapping_add(c as u64));
            let mut worst = (0.0f64, None::<Vector>);
            for _ in 0..CHUNK.min(samples - c * CHUNK) {
                let d = random_direction(size, &mut rng);
                let x = &d / j(&d);
                let px = Vector::from_fn(size, |i, _| sign(i) * x[i]);
                let dev = (j(&px) - 1.0).abs();
                if dev > worst.0 || !dev.is_finite() {
                    worst = (if dev.is_finite() { dev } else { f64::INFINITY }, Some(x));
                }
            }
            worst
        })
        .reduce(|| (0.0, None), |a, b| if b.0 > a.0 { b } else { a });
    let passed = worst.0 <= SYMMETRY_TOL;
    SymmetryVerdict {
        passed,
        samples,
        worst: worst.0,
        witness: if passed { None } else { worst.1.map(|v| v.iter().copied().collect()) },
    }
}

/// Errors with the witness point when the sampled check fails.
pub fn validate_p_symmetry(surface: &EllipsoidSurface, samples: usize, seed: u64) -> Result<bool> {
    let v = check_p_symmetry(surface.dim, &|x: &Vector| surface.j(x), samples, seed);
    if v.passed {
        Ok(true)
    } else {
        Err(Error::Symmetry(format!("j(Px) deviates from 1 by {} at x = {:?}", v.worst, v.witness)))
    }
}

/// Sampled extremes of `|x|` on `Σ` and of `½ yᵀH₂″(x)y / |y|²`.
#[derive(Clone, Debug)]
pub struct PinchingSample {
    pub min_norm: f64,
    pub max_norm: f64,
    pub min_form: f64,
    pub max_form: f64,
}

pub fn sample_pinching(gauge: &dyn GaugeOracle, samples: usize, seed: u64) -> Result<PinchingSample> {
    let size = gauge.dim().size();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = PinchingSample {
        min_norm: f64::INFINITY,
        max_norm: 0.0,
        min_form: f64::INFINITY,
        max_form: 0.0,
    };
    for _ in 0..samples {
        let d = random_direction(size, &mut rng);
        let x = &d / gauge.j(&d);
        let y = random_direction(size, &mut rng);
        let h = gauge.hess_h2(&x)?;
        let form = 0.5 * (y.transpose() * &h * &y)[(0, 0)];
        out.min_norm = out.min_norm.min(x.norm());
        out.max_norm = out.max_norm.max(x.norm());
        out.min_form = out.min_form.min(form);
        out.max_form = out.max_form.max(form);
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::{prop_assert, prop_assume, proptest};

    fn surf(n: usize, kappa: usize, radii: &[f64]) -> EllipsoidSurface {
        EllipsoidSurface::new(Dim::new(n, kappa).unwrap(), radii.to_vec(), 1.5).unwrap()
    }

    fn v(xs: &[f64]) -> Vector {
        Vector::from_column_slice(xs)
    }

    #[test]
    fn gauge_examples() {
        let s = surf(2, 0, &[1.0, 1.0]);
        let x = v(&[0.6, 0.0, 0.8, 0.0]);
        let g = s.evaluate(&x).unwrap();
        assert!((g.j - 1.0).abs() < 1e-15 && (g.h2 - 1.0).abs() < 1e-15);
        assert!((g.hess_h2 - Mat::identity(4, 4) * 2.0).amax() < 1e-15);

        let e = surf(2, 0, &[1.0, 2.0]);
        assert!((e.j(&v(&[0.0, 1.0, 0.0, 0.0])) - 0.5).abs() < 1e-15);
        assert!(e.grad_j(&Vector::zeros(4)).is_err());
        assert_eq!(e.j(&Vector::zeros(4)), 0.0);
    }

    #[test]
    fn polar_examples() {
        let s = surf(2, 0, &[1.0, 1.0]);
        let y = v(&[0.3, -0.4, 1.2, 0.0]);
        assert!((s.polar(&y) - y.norm()).abs() < 1e-15);
        let e = surf(2, 0, &[1.0, 2.0]);
        assert!((e.polar(&v(&[0.0, 1.0, 0.0, 0.0])) - 2.0).abs() < 1e-15);
    }

    #[test]
    fn duality_inequality_on_samples() {
        let e = surf(3, 1, &[1.0, 1.7, 0.6]);
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for _ in 0..1000 {
            let x = random_direction(6, &mut rng) * 3.0;
            let y = random_direction(6, &mut rng);
            let slack = e.j(&x) * e.polar(&y) - x.dot(&y);
            assert!(slack >= -1e-12);
            // The aligned point attains equality.
            let xa = Vector::from_fn(6, |i, _| e.r2(i) * y[i]);
            let eq = e.j(&xa) * e.polar(&y) - xa.dot(&y);
            assert!(eq.abs() <= 1e-9 * xa.dot(&y).abs().max(1.0));
        }
    }

    #[test]
    fn pinching_examples() {
        let c = pinching_certificate(&surf(2, 0, &[1.0, 1.2]));
        assert!(c.passes_53 && (c.ratio - 1.2).abs() < 1e-15);
        let c = pinching_certificate(&surf(2, 0, &[1.0, 1.3]));
        assert!(!c.passes_53 && c.passes_sqrt2);
        let c = pinching_certificate(&surf(2, 0, &[1.0, 1.0]));
        assert!(c.passes_53 && c.passes_32 && c.passes_sqrt2 && c.r == c.big_r);
    }

    #[test]
    fn sampled_pinching_respects_certificate() {
        let e = surf(3, 1, &[1.0, 1.25, 0.9]);
        let c = pinching_certificate(&e);
        let s = sample_pinching(&e, 2000, 3).unwrap();
        assert!(s.min_norm >= c.r - 1e-12 && s.max_norm <= c.big_r + 1e-12);
        assert!(s.min_form >= 1.0 / (c.big_r * c.big_r) - 1e-12);
        assert!(s.max_form <= 1.0 / (c.r * c.r) + 1e-12);
    }

    #[test]
    fn symmetry_check() {
        let e = surf(3, 1, &[1.0, 1.3, 0.8]);
        assert!(validate_p_symmetry(&e, 1000, 9).unwrap());
        let broken = |x: &Vector| e.j(x) + 1e-3 * x[0].powi(3);
        let v = check_p_symmetry(e.dim(), &broken, 1000, 9);
        assert!(!v.passed && v.witness.is_some());
        assert!(check_p_symmetry(e.dim(), &broken, 0, 9).passed);
    }

    #[test]
    fn fenchel_closed_form_matches_maximization() {
        let e = surf(2, 1, &[1.0, 1.4]);
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for _ in 0..20 {
            let y = random_direction(4, &mut rng) * rng.gen_range(0.1..3.0);
            let closed = e.dual_h(&y);
            let numeric = dual_h_by_maximization(&e, &y);
            assert!((closed - numeric).abs() <= 1e-9 * closed.max(1.0), "{closed} vs {numeric}");
        }
    }

    #[test]
    fn fenchel_quadratic_limit() {
        // For α = 2 the transform is j*(y)²/4; approach it from inside (1, 2).
        let e = surf(2, 0, &[1.0, 1.3]).with_alpha(2.0 - 1e-9).unwrap();
        let y = v(&[0.4, -1.0, 0.2, 0.7]);
        let q = e.polar(&y).powi(2) / 4.0;
        assert!((e.dual_h(&y) - q).abs() < 1e-7);
    }

    #[test]
    fn surface_file_roundtrip() {
        let e = surf(2, 1, &[1.0, 1.2]);
        let s = serde_json::to_string(&e).unwrap();
        assert!(s.contains("\"kappa\":1"));
        let back: EllipsoidSurface = serde_json::from_str(&s).unwrap();
        assert_eq!(back, e);
        assert!(serde_json::from_str::<EllipsoidSurface>(r#"{"n":2,"kappa":0,"radii":[1.0,-1.0]}"#).is_err());
    }

    proptest! {
        #[test]
        fn gauge_is_homogeneous(xs in proptest::collection::vec(-5.0f64..5.0, 6), lam in 0.01f64..10.0) {
            let e = surf(3, 1, &[1.0, 1.5, 0.7]);
            let x = Vector::from_vec(xs);
            prop_assert!((e.j(&(&x * lam)) - lam * e.j(&x)).abs() <= 1e-12 * (1.0 + lam * e.j(&x)));
            prop_assert!((e.h2(&(&x * 3.0)) - 9.0 * e.h2(&x)).abs() <= 1e-12 * (1.0 + 9.0 * e.h2(&x)));
        }

        #[test]
        fn dual_gradient_matches_differences(xs in proptest::collection::vec(-2.0f64..2.0, 4)) {
            let e = surf(2, 0, &[1.0, 1.2]);
            let y = Vector::from_vec(xs);
            prop_assume!(y.norm() > 0.1);
            let g = e.grad_dual_h(&y);
            let h = e.hess_dual_h(&y);
            let eps = 1e-6;
            for i in 0..4 {
                let mut yp = y.clone();
                let mut ym = y.clone();
                yp[i] += eps;
                ym[i] -= eps;
                let fd = (e.dual_h(&yp) - e.dual_h(&ym)) / (2.0 * eps);
                prop_assert!((fd - g[i]).abs() <= 1e-6 * (1.0 + g[i].abs()));
                let gd = (e.grad_dual_h(&yp) - e.grad_dual_h(&ym)) / (2.0 * eps);
                for k in 0..4 {
                    prop_assert!((gd[k] - h[(k, i)]).abs() <= 1e-5 * (1.0 + h[(k, i)].abs()));
                }
            }
        }
    }
}
