//! Symplectic linear algebra: the standard matrices `J` and `P`, the
//! ⋄-product, the determinant function `D_{P,ω}`, nullities, spectra,
//! Krein types and the elliptic height.
//!
//! Matrices act on `R^{2n}` with coordinates `(x_1..x_n, y_1..y_n)`; the
//! `k`-th symplectic plane is spanned by coordinates `k` and `n + k`.

use crate::error::{Error, Result};
use crate::scalar::{complexify, lit, max_abs, CMat, Mat, Scalar};
use nalgebra::{ComplexField, DMatrix};
use num_complex::Complex;
use serde::{Deserialize, Serialize};
use std::ops::Deref;

/// Numerical thresholds shared by all index computations.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Tolerances {
    /// Bound on `‖MᵀJM − J‖_∞` for a matrix to count as symplectic.
    pub sp: f64,
    /// Relative singular-value threshold (`σ ≤ rank·σ_max` counts as zero).
    pub rank: f64,
    /// Half-width of the band `|ln|λ|| ≤ circle` treated as the unit circle.
    pub circle: f64,
    /// Eigenvalues closer than this are merged into one cluster.
    pub cluster: f64,
    /// Largest imaginary residue accepted when `D_{P,ω}` is made real.
    pub imag: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Tolerances { sp: 1e-9, rank: 1e-8, circle: 1e-7, cluster: 1e-6, imag: 1e-9 }
    }
}

impl Tolerances {
    pub fn validate(&self) -> Result<()> {
        let all = [self.sp, self.rank, self.circle, self.cluster, self.imag];
        if all.iter().all(|t| t.is_finite() && *t > 0.0) {
            Ok(())
        } else {
            Err(Error::Parameter(format!("tolerances must be positive: {self:?}")))
        }
    }
}

/// Half-dimension `n` together with the symmetry parameter `κ`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Dim {
    n: usize,
    kappa: usize,
}

impl Dim {
    /// Accepts `n ≥ 1` and `0 ≤ κ < n`, so that `P` has at least one
    /// reflected plane. The stability theorem additionally needs
    /// [`Dim::theorem_admissible`].
    pub fn new(n: usize, kappa: usize) -> Result<Self> {
        if n == 0 {
            return Err(Error::Dimension("half-dimension n must be positive".into()));
        }
        if kappa >= n {
            return Err(Error::Dimension(format!("kappa = {kappa} must be < n = {n}")));
        }
        Ok(Dim { n, kappa })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn kappa(&self) -> usize {
        self.kappa
    }

    pub fn size(&self) -> usize {
        2 * self.n
    }

    /// `n ≥ 2` and `κ < n − 1`: the range in which the two-orbit stability
    /// statement is made.
    pub fn theorem_admissible(&self) -> bool {
        self.n >= 2 && self.kappa + 1 < self.n
    }

    /// Sign of `P` on plane `k` (`−1` for the first `n − κ` planes).
    pub fn plane_sign(&self, k: usize) -> i32 {
        if k < self.n - self.kappa {
            -1
        } else {
            1
        }
    }
}

/// A real `2n × 2n` matrix known to satisfy `MᵀJM = J` to tolerance.
#[derive(Debug, Clone, PartialEq)]
pub struct SymplecticMatrix<T: Scalar>(Mat<T>);

impl<T: Scalar> SymplecticMatrix<T> {
    /// Validates shape and the symplectic defect against `tol_sp`.
    pub fn new(entries: Mat<T>, tol_sp: f64) -> Result<Self> {
        check_even_square(&entries)?;
        let defect = symplectic_defect(&entries);
        if defect > lit(tol_sp) {
            return Err(Error::Numerical(format!(
                "symplectic defect {defect} exceeds {tol_sp}"
            )));
        }
        Ok(SymplecticMatrix(entries))
    }

    /// Wraps a matrix that is symplectic by construction.
    pub fn from_trusted(entries: Mat<T>) -> Self {
        debug_assert!(entries.is_square() && entries.nrows() % 2 == 0);
        SymplecticMatrix(entries)
    }

    pub fn identity(n: usize) -> Self {
        SymplecticMatrix(Mat::identity(2 * n, 2 * n))
    }

    pub fn half_dim(&self) -> usize {
        self.0.nrows() / 2
    }

    pub fn as_mat(&self) -> &Mat<T> {
        &self.0
    }

    pub fn into_inner(self) -> Mat<T> {
        self.0
    }

    pub fn mul(&self, other: &SymplecticMatrix<T>) -> SymplecticMatrix<T> {
        SymplecticMatrix(&self.0 * &other.0)
    }

    pub fn inverse(&self) -> SymplecticMatrix<T> {
        // M⁻¹ = −J Mᵀ J
        let j = standard_j::<T>(self.half_dim());
        SymplecticMatrix(-(&j * self.0.transpose() * &j))
    }
}

impl<T: Scalar> Deref for SymplecticMatrix<T> {
    type Target = Mat<T>;
    fn deref(&self) -> &Mat<T> {
        &self.0
    }
}

/// A point `ω` on the unit circle.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct UnitCircleValue<T: Scalar>(Complex<T>);

impl<T: Scalar> UnitCircleValue<T> {
    pub fn new(omega: Complex<T>) -> Result<Self> {
        let slack = lit::<T>(1e-12).max(T::default_epsilon() * lit(16.0));
        if (omega.modulus() - T::one()).abs() > slack {
            return Err(Error::Parameter(format!("|ω| = {} is not 1", omega.modulus())));
        }
        Ok(UnitCircleValue(omega))
    }

    pub fn from_angle(theta: T) -> Self {
        UnitCircleValue(Complex::new(theta.cos(), theta.sin()))
    }

    pub fn one() -> Self {
        UnitCircleValue(Complex::new(T::one(), T::zero()))
    }

    pub fn minus_one() -> Self {
        UnitCircleValue(Complex::new(-T::one(), T::zero()))
    }

    pub fn value(&self) -> Complex<T> {
        self.0
    }

    /// Argument in `[0, 2π)`.
    pub fn angle(&self) -> T {
        let a = self.0.im.atan2(self.0.re);
        if a < T::zero() {
            a + T::two_pi()
        } else {
            a
        }
    }

    /// `ω · e^{iε}`.
    pub fn rotate(&self, eps: T) -> Self {
        UnitCircleValue(self.0 * Complex::new(eps.cos(), eps.sin()))
    }

    pub fn conj(&self) -> Self {
        UnitCircleValue(self.0.conj())
    }

    pub fn powi(&self, m: i32) -> Self {
        UnitCircleValue(self.0.powi(m))
    }
}

fn check_even_square<T: Scalar>(m: &Mat<T>) -> Result<()> {
    if !m.is_square() || m.nrows() % 2 != 0 || m.nrows() == 0 {
        return Err(Error::Dimension(format!(
            "expected a non-empty even square matrix, got {}×{}",
            m.nrows(),
            m.ncols()
        )));
    }
    Ok(())
}

/// `J = [[0, −I_n], [I_n, 0]]`.
pub fn standard_j<T: Scalar>(n: usize) -> Mat<T> {
    let mut j = Mat::zeros(2 * n, 2 * n);
    for k in 0..n {
        j[(k, n + k)] = -T::one();
        j[(n + k, k)] = T::one();
    }
    j
}

/// `P = diag(−I_{n−κ}, I_κ, −I_{n−κ}, I_κ)`.
pub fn standard_p<T: Scalar>(dim: Dim) -> SymplecticMatrix<T> {
    let n = dim.n();
    let mut p = Mat::zeros(2 * n, 2 * n);
    for k in 0..n {
        let s: T = if dim.plane_sign(k) < 0 { -T::one() } else { T::one() };
        p[(k, k)] = s;
        p[(n + k, n + k)] = s;
    }
    SymplecticMatrix(p)
}

/// `P` from an arbitrary list of per-plane signs (`true` = reflected).
pub fn sign_pattern_p<T: Scalar>(reflected: &[bool]) -> SymplecticMatrix<T> {
    let n = reflected.len();
    let mut p = Mat::zeros(2 * n, 2 * n);
    for (k, &r) in reflected.iter().enumerate() {
        let s: T = if r { -T::one() } else { T::one() };
        p[(k, k)] = s;
        p[(n + k, n + k)] = s;
    }
    SymplecticMatrix(p)
}

pub fn make_standard_matrices<T: Scalar>(dim: Dim) -> (Mat<T>, SymplecticMatrix<T>) {
    (standard_j(dim.n()), standard_p(dim))
}

/// `‖MᵀJM − J‖_∞` (largest absolute entry).
pub fn symplectic_defect<T: Scalar>(m: &Mat<T>) -> T {
    let j = standard_j::<T>(m.nrows() / 2);
    max_abs(&(m.transpose() * &j * m - &j))
}

pub fn is_symplectic<T: Scalar>(m: &Mat<T>, tol: f64) -> bool {
    m.is_square() && m.nrows() % 2 == 0 && symplectic_defect(m) <= lit(tol)
}

/// One Newton-type correction `M ← M (I + ½ J Δ)` with `Δ = MᵀJM − J`,
/// repeated while it still reduces the defect.
pub fn reproject<T: Scalar>(m: &Mat<T>) -> Mat<T> {
    let dim = m.nrows();
    let j = standard_j::<T>(dim / 2);
    let mut cur = m.clone();
    let mut defect = symplectic_defect(&cur);
    for _ in 0..3 {
        if defect <= T::default_epsilon() * lit(8.0) {
            break;
        }
        let delta = cur.transpose() * &j * &cur - &j;
        let corr = Mat::identity(dim, dim) + (&j * delta) * lit::<T>(0.5);
        let next = &cur * corr;
        let nd = symplectic_defect(&next);
        if nd >= defect {
            break;
        }
        cur = next;
        defect = nd;
    }
    cur
}

/// The ⋄-product: interleaves the four `m_k × m_k` blocks of each factor.
pub fn diamond<T: Scalar>(a: &Mat<T>, b: &Mat<T>) -> Result<Mat<T>> {
    check_even_square(a)?;
    check_even_square(b)?;
    let (m1, m2) = (a.nrows() / 2, b.nrows() / 2);
    let m = m1 + m2;
    let mut out = Mat::zeros(2 * m, 2 * m);
    // Row/column index maps: first factor occupies (0..m1, m..m+m1).
    let map_a = |i: usize| if i < m1 { i } else { m + (i - m1) };
    let map_b = |i: usize| if i < m2 { m1 + i } else { m + m1 + (i - m2) };
    for i in 0..2 * m1 {
        for j in 0..2 * m1 {
            out[(map_a(i), map_a(j))] = a[(i, j)];
        }
    }
    for i in 0..2 * m2 {
        for j in 0..2 * m2 {
            out[(map_b(i), map_b(j))] = b[(i, j)];
        }
    }
    Ok(out)
}

/// ⋄-product of a non-empty list.
pub fn diamond_all<T: Scalar>(blocks: &[Mat<T>]) -> Result<Mat<T>> {
    let (first, rest) = blocks
        .split_first()
        .ok_or_else(|| Error::Dimension("empty ⋄-product".into()))?;
    rest.iter().try_fold(first.clone(), |acc, b| diamond(&acc, b))
}

/// Complex value `(−1)^{n−1} ω̄ⁿ det(M − ωP)` before the real part is taken.
pub fn d_p_omega_complex<T: Scalar>(m: &Mat<T>, omega: UnitCircleValue<T>, p: &Mat<T>) -> Complex<T> {
    let n = m.nrows() / 2;
    let w = omega.value();
    let a: CMat<T> = complexify(m) - complexify(p) * w;
    let det = a.lu().determinant();
    let sign = if (n - 1) % 2 == 0 { T::one() } else { -T::one() };
    det * w.conj().powi(n as i32) * Complex::new(sign, T::zero())
}

/// The real function whose zero set is the singular hypersurface
/// `Sp(2n)⁰_{P,ω}`.
pub fn d_p_omega<T: Scalar>(
    m: &Mat<T>,
    omega: UnitCircleValue<T>,
    p: &Mat<T>,
    tol_imag: f64,
) -> Result<T> {
    if m.shape() != p.shape() {
        return Err(Error::Dimension("M and P differ in size".into()));
    }
    let d = d_p_omega_complex(m, omega, p);
    let scale = T::one().max(d.modulus());
    if d.im.abs() > lit::<T>(tol_imag) * scale {
        return Err(Error::Numerical(format!(
            "D_(P,ω) has imaginary residue {} (real part {})",
            d.im, d.re
        )));
    }
    Ok(d.re)
}

/// Singular values of a complex matrix, sorted descending.
pub(crate) fn complex_singular_values<T: Scalar>(a: &CMat<T>) -> Vec<T> {
    let mut s: Vec<T> = a.clone().svd(false, false).singular_values.iter().copied().collect();
    s.sort_by(|x, y| y.partial_cmp(x).unwrap_or(std::cmp::Ordering::Equal));
    s
}

pub(crate) fn real_singular_values<T: Scalar>(a: &Mat<T>) -> Vec<T> {
    let mut s: Vec<T> = a.clone().svd(false, false).singular_values.iter().copied().collect();
    s.sort_by(|x, y| y.partial_cmp(x).unwrap_or(std::cmp::Ordering::Equal));
    s
}

/// Number of singular values at or below `tol_rank · max(σ_max, scale)`.
///
/// `scale` is the magnitude of the operands the matrix was built from, so a
/// matrix that is zero up to rounding noise is seen as zero rather than as
/// a full-rank matrix of tiny norm.
pub(crate) fn nullity_from_singular<T: Scalar>(s: &[T], tol_rank: f64, scale: T) -> usize {
    let smax = s.first().copied().unwrap_or_else(T::zero).max(scale);
    if smax <= T::zero() {
        return s.len();
    }
    let cut = smax * lit(tol_rank);
    s.iter().filter(|&&x| x <= cut).count()
}

/// `dim_C ker(M − ωP)`.
pub fn nu_p_omega<T: Scalar>(m: &Mat<T>, omega: UnitCircleValue<T>, p: &Mat<T>, tol_rank: f64) -> usize {
    let a: CMat<T> = complexify(m) - complexify(p) * omega.value();
    let scale = max_abs(m).max(max_abs(p));
    nullity_from_singular(&complex_singular_values(&a), tol_rank, scale)
}

/// Real nullity `dim ker A`, with `scale` the size of the operands `A` was
/// formed from (pass zero for a purely relative cut).
pub fn real_nullity<T: Scalar>(a: &Mat<T>, tol_rank: f64, scale: T) -> usize {
    nullity_from_singular(&real_singular_values(a), tol_rank, scale)
}

/// Eigenvalues of a real square matrix.
pub fn eigenvalues<T: Scalar>(m: &Mat<T>) -> Vec<Complex<T>> {
    m.clone().schur().complex_eigenvalues().iter().copied().collect()
}

/// Merges eigenvalues closer than `tol` (single linkage) and returns
/// `(mean, multiplicity)` sorted by argument, then modulus.
pub fn cluster_eigenvalues<T: Scalar>(vals: &[Complex<T>], tol: f64) -> Vec<(Complex<T>, usize)> {
    let tol = lit::<T>(tol);
    let n = vals.len();
    let mut label: Vec<usize> = (0..n).collect();
    fn find(label: &mut [usize], i: usize) -> usize {
        let mut r = i;
        while label[r] != r {
            r = label[r];
        }
        label[i] = r;
        r
    }
    for i in 0..n {
        for j in i + 1..n {
            if (vals[i] - vals[j]).modulus() <= tol {
                let (a, b) = (find(&mut label, i), find(&mut label, j));
                if a != b {
                    label[b.max(a)] = a.min(b);
                }
            }
        }
    }
    let mut groups: Vec<(Complex<T>, usize)> = Vec::new();
    let mut roots: Vec<usize> = Vec::new();
    for i in 0..n {
        let r = find(&mut label, i);
        match roots.iter().position(|&x| x == r) {
            Some(g) => {
                groups[g].0 += vals[i];
                groups[g].1 += 1;
            }
            None => {
                roots.push(r);
                groups.push((vals[i], 1));
            }
        }
    }
    for g in groups.iter_mut() {
        g.0 /= Complex::new(T::from_usize(g.1).unwrap(), T::zero());
    }
    groups.sort_by(|a, b| {
        let ka = (to_angle(a.0), a.0.modulus());
        let kb = (to_angle(b.0), b.0.modulus());
        ka.partial_cmp(&kb).unwrap_or(std::cmp::Ordering::Equal)
    });
    groups
}

fn to_angle<T: Scalar>(z: Complex<T>) -> f64 {
    let a = crate::scalar::to_f64(z.im.atan2(z.re));
    // Snap the branch cut so that conjugate pairs on the negative real axis
    // sort together.
    if a < -std::f64::consts::PI + 1e-12 {
        std::f64::consts::PI
    } else {
        a
    }
}

pub fn on_unit_circle<T: Scalar>(z: Complex<T>, tol_circle: f64) -> bool {
    z.modulus().ln().abs() <= lit(tol_circle)
}

/// Eigenvalue clusters with circle flags and Krein types.
#[derive(Debug, Clone, PartialEq)]
pub struct SpectrumReport<T: Scalar> {
    pub eigenvalues: Vec<(Complex<T>, usize)>,
    pub on_circle: Vec<bool>,
    pub krein: Vec<Option<(usize, usize)>>,
}

impl<T: Scalar> SpectrumReport<T> {
    pub fn total_multiplicity(&self) -> usize {
        self.eigenvalues.iter().map(|e| e.1).sum()
    }

    /// Every cluster `λ` has a partner near `1/λ̄` of equal multiplicity.
    pub fn is_reciprocal_symmetric(&self, tol: f64) -> bool {
        let tol = lit::<T>(tol);
        self.eigenvalues.iter().all(|&(l, k)| {
            let target = Complex::new(T::one(), T::zero()) / l.conj();
            let mult: usize = self
                .eigenvalues
                .iter()
                .filter(|(m, _)| (*m - target).modulus() <= tol * (T::one() + target.modulus()))
                .map(|e| e.1)
                .sum();
            mult == k
        })
    }
}

pub fn spectrum<T: Scalar>(m: &Mat<T>, tol: &Tolerances) -> SpectrumReport<T> {
    let vals = eigenvalues(m);
    let eigenvalues = cluster_eigenvalues(&vals, tol.cluster);
    let on_circle: Vec<bool> = eigenvalues.iter().map(|e| on_unit_circle(e.0, tol.circle)).collect();
    let krein = eigenvalues
        .iter()
        .zip(&on_circle)
        .map(|(&(l, k), &c)| {
            if c {
                let w = UnitCircleValue(l / Complex::new(l.modulus(), T::zero()));
                krein_on_cluster(m, w, k, tol).ok()
            } else {
                None
            }
        })
        .collect();
    SpectrumReport { eigenvalues, on_circle, krein }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum StabilityClass {
    Elliptic,
    Hyperbolic,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct EllipticHeight {
    pub height: usize,
    pub class: Option<StabilityClass>,
    /// Some eigenvalue sits close to the edge of the circle band.
    pub borderline: bool,
}

/// Total algebraic multiplicity of eigenvalues in the band
/// `|ln|λ|| ≤ tol_circle`.
pub fn elliptic_height<T: Scalar>(m: &Mat<T>, tol_circle: f64) -> EllipticHeight {
    let vals = eigenvalues(m);
    let mut height = 0;
    let mut borderline = false;
    for z in &vals {
        let r = crate::scalar::to_f64(z.modulus().ln().abs());
        if r <= tol_circle {
            height += 1;
        }
        if r >= 0.5 * tol_circle && r <= 2.0 * tol_circle {
            borderline = true;
        }
    }
    let n2 = m.nrows();
    let class = if height == n2 {
        Some(StabilityClass::Elliptic)
    } else if height == 2 {
        Some(StabilityClass::Hyperbolic)
    } else {
        None
    };
    EllipticHeight { height, class, borderline }
}

/// Orthonormal basis (columns) of the `k`-dimensional approximate kernel:
/// right singular vectors belonging to the `k` smallest singular values.
pub(crate) fn complex_kernel_basis<T: Scalar>(a: &CMat<T>, k: usize) -> CMat<T> {
    let svd = a.clone().svd(false, true);
    let vt = svd.v_t.expect("requested V^H");
    let s = svd.singular_values;
    let mut idx: Vec<usize> = (0..s.len()).collect();
    idx.sort_by(|&x, &y| s[x].partial_cmp(&s[y]).unwrap_or(std::cmp::Ordering::Equal));
    let nrow = a.ncols();
    let mut basis = CMat::<T>::zeros(nrow, k);
    for (c, &i) in idx.iter().take(k).enumerate() {
        for r in 0..nrow {
            basis[(r, c)] = vt[(i, r)].conj();
        }
    }
    basis
}

pub(crate) fn real_kernel_basis<T: Scalar>(a: &Mat<T>, k: usize) -> Mat<T> {
    let svd = a.clone().svd(false, true);
    let vt = svd.v_t.expect("requested Vᵀ");
    let s = svd.singular_values;
    let mut idx: Vec<usize> = (0..s.len()).collect();
    idx.sort_by(|&x, &y| s[x].partial_cmp(&s[y]).unwrap_or(std::cmp::Ordering::Equal));
    let nrow = a.ncols();
    let mut basis = Mat::<T>::zeros(nrow, k);
    for (c, &i) in idx.iter().take(k).enumerate() {
        for r in 0..nrow {
            basis[(r, c)] = vt[(i, r)];
        }
    }
    basis
}

/// Inertia `(positive, negative)` of a Hermitian matrix, via its real
/// symmetric embedding. Eigenvalues below `tol · max|λ|` count as zero.
pub(crate) fn hermitian_inertia<T: Scalar>(g: &CMat<T>, tol: f64) -> (usize, usize) {
    let k = g.nrows();
    let mut emb = Mat::<T>::zeros(2 * k, 2 * k);
    for i in 0..k {
        for j in 0..k {
            let z = (g[(i, j)] + g[(j, i)].conj()) * Complex::new(lit::<T>(0.5), T::zero());
            emb[(i, j)] = z.re;
            emb[(k + i, k + j)] = z.re;
            emb[(i, k + j)] = -z.im;
            emb[(k + i, j)] = z.im;
        }
    }
    let ev = emb.symmetric_eigenvalues();
    let scale = ev.iter().fold(T::zero(), |a, &x| a.max(x.abs()));
    let cut = scale * lit(tol);
    let pos = ev.iter().filter(|&&x| x > cut).count();
    let neg = ev.iter().filter(|&&x| x < -cut).count();
    (pos / 2, neg / 2)
}

fn krein_on_cluster<T: Scalar>(
    m: &Mat<T>,
    omega: UnitCircleValue<T>,
    mult: usize,
    tol: &Tolerances,
) -> Result<(usize, usize)> {
    let n2 = m.nrows();
    let shifted: CMat<T> = complexify(m) - CMat::<T>::identity(n2, n2) * omega.value();
    let mut power = shifted.clone();
    for _ in 1..mult {
        power = &power * &shifted;
    }
    let v = complex_kernel_basis(&power, mult);
    let ij: CMat<T> = complexify(&standard_j::<T>(n2 / 2)) * Complex::new(T::zero(), T::one());
    let g = v.adjoint() * ij * &v;
    let (p, q) = hermitian_inertia(&g, tol.rank.max(1e-6));
    if p + q != mult {
        return Err(Error::Numerical(format!(
            "Krein form degenerate on the generalized eigenspace of {} (p={p}, q={q}, mult={mult})",
            omega.value()
        )));
    }
    Ok((p, q))
}

/// Krein type `(p, q)` of `M` at the unit-circle eigenvalue `ω`: the
/// signature of `v ↦ v†(iJ)v` on the generalized eigenspace.
///
/// With this sign `R(θ)`, `θ ∈ (0, π)`, has type `(0, 1)` at `e^{iθ}`, which
/// makes `S⁺ − S⁻ = p − q` hold with the usual splitting-number tables.
pub fn krein_type<T: Scalar>(m: &Mat<T>, omega: UnitCircleValue<T>, tol: &Tolerances) -> Result<(usize, usize)> {
    let vals = eigenvalues(m);
    let clusters = cluster_eigenvalues(&vals, tol.cluster);
    let w = omega.value();
    let hit = clusters
        .iter()
        .filter(|(l, _)| (*l - w).modulus() <= lit::<T>(tol.cluster.max(1e-7)) * lit(10.0))
        .min_by(|a, b| {
            (a.0 - w).modulus().partial_cmp(&(b.0 - w).modulus()).unwrap_or(std::cmp::Ordering::Equal)
        });
    let (l, mult) = hit.ok_or_else(|| Error::Spectrum(format!("{w} is not an eigenvalue")))?;
    let unit = UnitCircleValue(*l / Complex::new(l.modulus(), T::zero()));
    krein_on_cluster(m, unit, *mult, tol)
}

/// `e^{sJ}` on `R^{2n}`: a plane-wise rotation by angle `s`.
pub fn exp_j<T: Scalar>(n: usize, s: T) -> Mat<T> {
    let (c, sn) = (s.cos(), s.sin());
    let mut m = Mat::zeros(2 * n, 2 * n);
    for k in 0..n {
        m[(k, k)] = c;
        m[(n + k, n + k)] = c;
        m[(k, n + k)] = -sn;
        m[(n + k, k)] = sn;
    }
    m
}

/// `R(θ)` embedded as `R(θ)^{⋄n}`.
pub fn rotation<T: Scalar>(theta: T) -> Mat<T> {
    exp_j(1, theta)
}

/// `D(λ) = diag(λ, 1/λ)`.
pub fn dilation<T: Scalar>(lambda: T) -> Mat<T> {
    DMatrix::from_row_slice(2, 2, &[lambda, T::zero(), T::zero(), T::one() / lambda])
}
