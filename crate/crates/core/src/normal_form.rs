//! Basic normal forms, the ten-case classification of `MP`, block
//! decomposition of monodromies and splitting numbers.

use crate::error::{Error, Result};
use crate::scalar::{lit, max_abs, to_f64, Mat, Scalar};
use crate::sym::{
    cluster_eigenvalues, diamond_all, eigenvalues, krein_type, nu_p_omega, on_unit_circle,
    real_kernel_basis, real_nullity, standard_j, Tolerances, UnitCircleValue,
};
use nalgebra::ComplexField;
use num_complex::Complex;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

/// Absolute band around `±2` for the trace of a 2×2 unipotent candidate.
const UNIPOTENT_TRACE_TOL: f64 = 1e-8;
/// `MP` within this distance of `±I` is classified as the identity case.
const IDENTITY_TOL: f64 = 1e-9;
/// Sign invariants smaller than this are ties and are not classified.
const SIGN_TIE: f64 = 1e-10;
/// Entries below this (relative) do not couple two symplectic planes.
const COUPLING_TOL: f64 = 1e-13;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind")]
pub enum BasicForm {
    /// `diag(λ, 1/λ)`, `λ = ±2`.
    D { lambda: f64 },
    /// `[[λ, b], [0, λ]]`, `λ = ±1`, `b ∈ {−1, 0, 1}`.
    N1 { lambda: f64, b: f64 },
    /// Rotation by `θ ∈ (0, π) ∪ (π, 2π)`.
    R { theta: f64 },
    /// `[[R(θ), B], [0, R(θ)]]` with `B = [[b1, b2], [b3, b4]]`.
    N2 { theta: f64, b: [f64; 4] },
    /// Off-circle part of dimension `dim`; represented by `D(2)^{⋄dim/2}`.
    HyperbolicRest { dim: usize },
}

impl BasicForm {
    pub fn size(&self) -> usize {
        match self {
            BasicForm::D { .. } | BasicForm::N1 { .. } | BasicForm::R { .. } => 2,
            BasicForm::N2 { .. } => 4,
            BasicForm::HyperbolicRest { dim } => *dim,
        }
    }

    /// `N2(θ, aR(θ))`: the symplectic representative with `(b2 − b3) sin θ = −2a sin²θ`.
    pub fn n2_scaled(theta: f64, a: f64) -> Self {
        let (c, s) = (theta.cos(), theta.sin());
        BasicForm::N2 { theta, b: [a * c, -a * s, a * s, a * c] }
    }
}

fn theta_in_range(theta: f64) -> bool {
    theta > 0.0 && theta < 2.0 * PI && (theta - PI).abs() > 0.0
}

/// The literal matrix of a basic normal form.
pub fn build_basic_form<T: Scalar>(form: &BasicForm) -> Result<Mat<T>> {
    match *form {
        BasicForm::D { lambda } => {
            if lambda != 2.0 && lambda != -2.0 {
                return Err(Error::Parameter(format!("D(λ) needs λ = ±2, got {lambda}")));
            }
            Ok(crate::sym::dilation(lit(lambda)))
        }
        BasicForm::N1 { lambda, b } => {
            if lambda != 1.0 && lambda != -1.0 {
                return Err(Error::Parameter(format!("N1(λ, b) needs λ = ±1, got {lambda}")));
            }
            if b != 1.0 && b != -1.0 && b != 0.0 {
                return Err(Error::Parameter(format!("N1(λ, b) needs b ∈ {{−1, 0, 1}}, got {b}")));
            }
            Ok(Mat::from_row_slice(2, 2, &[lit(lambda), lit(b), T::zero(), lit(lambda)]))
        }
        BasicForm::R { theta } => {
            if !theta_in_range(theta) {
                return Err(Error::Parameter(format!("R(θ) needs θ ∈ (0,π)∪(π,2π), got {theta}")));
            }
            Ok(crate::sym::rotation(lit(theta)))
        }
        BasicForm::N2 { theta, b } => {
            if !theta_in_range(theta) {
                return Err(Error::Parameter(format!("N2 needs θ ∈ (0,π)∪(π,2π), got {theta}")));
            }
            if b[1] == b[2] {
                return Err(Error::Parameter("N2 needs b2 ≠ b3".into()));
            }
            let (c, s) = (theta.cos(), theta.sin());
            // Symplectic in the standard J exactly when R(θ)ᵀB is symmetric.
            let rtb_12 = c * b[1] + s * b[3];
            let rtb_21 = -s * b[0] + c * b[2];
            let scale = 1.0 + b.iter().fold(0.0f64, |a, x| a.max(x.abs()));
            if (rtb_12 - rtb_21).abs() > 1e-12 * scale {
                return Err(Error::Parameter(
                    "N2 block B must make R(θ)ᵀB symmetric to be symplectic".into(),
                ));
            }
            let mut m = Mat::<T>::zeros(4, 4);
            let r = [[c, -s], [s, c]];
            for i in 0..2 {
                for j in 0..2 {
                    m[(i, j)] = lit(r[i][j]);
                    m[(2 + i, 2 + j)] = lit(r[i][j]);
                    m[(i, 2 + j)] = lit(b[2 * i + j]);
                }
            }
            Ok(m)
        }
        BasicForm::HyperbolicRest { dim } => {
            if dim == 0 || dim % 2 != 0 {
                return Err(Error::Parameter(format!("hyperbolic rest needs even positive size, got {dim}")));
            }
            let blocks: Vec<Mat<T>> = (0..dim / 2).map(|_| crate::sym::dilation(lit(2.0))).collect();
            diamond_all(&blocks)
        }
    }
}

/// One of the ten conjugacy patterns of `MP`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CaseTag {
    pub case_id: u8,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub theta: Option<f64>,
    /// Sign of `b` (Cases 1, 3, 4, 6) or of `(b2 − b3) sin θ` (Cases 8, 9).
    #[serde(skip_serializing_if = "Option::is_none")]
    pub sign: Option<i8>,
}

impl CaseTag {
    pub fn new(case_id: u8) -> Self {
        CaseTag { case_id, theta: None, sign: None }
    }

    pub fn with_theta(case_id: u8, theta: f64) -> Self {
        CaseTag { case_id, theta: Some(theta), sign: None }
    }

    pub fn validate(&self) -> Result<()> {
        match self.case_id {
            1..=6 | 10 => Ok(()),
            7..=9 => match self.theta {
                Some(t) if theta_in_range(t) => Ok(()),
                Some(t) => Err(Error::Parameter(format!("case {} angle {t} out of range", self.case_id))),
                None => Err(Error::Parameter(format!("case {} needs θ", self.case_id))),
            },
            c => Err(Error::Parameter(format!("case id {c} is not in 1..=10"))),
        }
    }

    /// Unit-circle spectrum of the pattern (with the conjugate for 7–9).
    pub fn circle_spectrum(&self) -> Vec<UnitCircleValue<f64>> {
        match self.case_id {
            1..=3 => vec![UnitCircleValue::one()],
            4..=6 => vec![UnitCircleValue::minus_one()],
            7..=9 => {
                let t = self.theta.unwrap_or(f64::NAN);
                vec![UnitCircleValue::from_angle(t), UnitCircleValue::from_angle(-t)]
            }
            _ => vec![],
        }
    }

    /// Size of the pattern's block (`0` for Case 10, which has any size).
    pub fn block_size(&self) -> usize {
        match self.case_id {
            1..=7 => 2,
            8 | 9 => 4,
            _ => 0,
        }
    }
}

/// Counts `(p₋, p₀, p₊, r, s)` of the normal-form pattern
/// `N1(1,1)^{⋄p₋} ⋄ N1(1,−1)^{⋄p₊} ⋄ I_{2p₀} ⋄ R(θ_1)⋄…⋄R(θ_r) ⋄ N2^{⋄s} ⋄ M₀`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct BlockCounts {
    pub p_minus: usize,
    pub p_zero: usize,
    pub p_plus: usize,
    pub r: usize,
    pub s: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NormalFormDecomposition {
    pub blocks: Vec<(BasicForm, CaseTag)>,
    pub counts: BlockCounts,
    /// Dimension of `M₀`: eigenvalue `−1` blocks plus the off-circle part.
    pub rest_dim: usize,
}

impl NormalFormDecomposition {
    /// Builds a decomposition from blocks, filling the counts.
    pub fn from_blocks(blocks: Vec<(BasicForm, CaseTag)>) -> Self {
        let mut counts = BlockCounts::default();
        let mut rest_dim = 0;
        for (form, tag) in &blocks {
            match tag.case_id {
                1 => counts.p_minus += 1,
                2 => counts.p_zero += 1,
                3 => counts.p_plus += 1,
                7 => counts.r += 1,
                8 | 9 => counts.s += 1,
                _ => rest_dim += form.size(),
            }
        }
        NormalFormDecomposition { blocks, counts, rest_dim }
    }

    pub fn total_dim(&self) -> usize {
        let c = &self.counts;
        2 * (c.p_minus + c.p_zero + c.p_plus) + 2 * c.r + 4 * c.s + self.rest_dim
    }

    /// The ⋄-product of the block representatives.
    pub fn reconstruct<T: Scalar>(&self) -> Result<Mat<T>> {
        let mats: Vec<Mat<T>> = self.blocks.iter().map(|(f, _)| build_basic_form(f)).collect::<Result<_>>()?;
        diamond_all(&mats)
    }

    /// `2p₋ + 2p₀ + 2r`: the upper slack in the iterated-index bound.
    pub fn upper_slack(&self) -> usize {
        2 * (self.counts.p_minus + self.counts.p_zero + self.counts.r)
    }

    /// `2p₀ + 2p₊ + 2r`: the lower slack in the iterated-index bound.
    pub fn lower_slack(&self) -> usize {
        2 * (self.counts.p_zero + self.counts.p_plus + self.counts.r)
    }
}

/// Splitting numbers `S^±` at one point of the unit circle.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SplittingPair {
    pub s_plus: usize,
    pub s_minus: usize,
    pub at_omega: UnitCircleValue<f64>,
}

impl SplittingPair {
    pub fn pair(&self) -> (usize, usize) {
        (self.s_plus, self.s_minus)
    }
}

fn sym_part<T: Scalar>(a: &Mat<T>) -> Mat<T> {
    (a + a.transpose()) * lit::<T>(0.5)
}

/// `tr(J·A)`, the trace of the symmetric part of `J·A`.
fn j_trace<T: Scalar>(a: &Mat<T>) -> f64 {
    let j = standard_j::<T>(a.nrows() / 2);
    to_f64((&j * a).trace())
}

/// Classifies `MP` into Cases 1–10.
///
/// The sign data are read from the semidefinite form `v ↦ vᵀJNv`, where
/// `N` is the nilpotent factor (`MP ∓ I` or `(MP)² − 2cos θ·MP + I`); its
/// sign is invariant under symplectic conjugation.
pub fn classify_case<T: Scalar>(m: &Mat<T>, p: &Mat<T>, tol: &Tolerances) -> Result<CaseTag> {
    if m.shape() != p.shape() || !m.is_square() || m.nrows() % 2 != 0 {
        return Err(Error::Dimension("M and P must be equal even square matrices".into()));
    }
    classify_mp(&(m * p), tol)
}

/// Same as [`classify_case`] with `MP` given directly.
pub fn classify_mp<T: Scalar>(x: &Mat<T>, tol: &Tolerances) -> Result<CaseTag> {
    let size = x.nrows();
    let vals = eigenvalues(x);
    if vals.iter().all(|z| !on_unit_circle(*z, tol.circle)) {
        return Ok(CaseTag::new(10));
    }
    match size {
        2 => classify_2x2(x),
        4 => classify_n2(x, tol),
        _ => Err(Error::UnknownCase(format!("{size}×{size} MP with unit-circle spectrum"))),
    }
}

fn classify_2x2<T: Scalar>(x: &Mat<T>) -> Result<CaseTag> {
    let id = Mat::<T>::identity(2, 2);
    let tr = to_f64(x.trace());
    for (lambda, ident_case, pos_case, neg_case) in [(1.0, 2u8, 1u8, 3u8), (-1.0, 5, 6, 4)] {
        if (tr - 2.0 * lambda).abs() <= UNIPOTENT_TRACE_TOL {
            let shifted = x - &id * lit::<T>(lambda);
            if to_f64(max_abs(&shifted)) <= IDENTITY_TOL {
                return Ok(CaseTag::new(ident_case));
            }
            let b = j_trace(&shifted);
            if b.abs() <= SIGN_TIE {
                return Err(Error::UnknownCase(format!("unipotent sign tie (b = {b:e})")));
            }
            let (case, sign) = if b > 0.0 { (pos_case, 1) } else { (neg_case, -1) };
            return Ok(CaseTag { case_id: case, theta: None, sign: Some(sign) });
        }
    }
    if tr.abs() < 2.0 {
        let base = (tr / 2.0).clamp(-1.0, 1.0).acos();
        let rot = j_trace(x);
        if rot.abs() <= SIGN_TIE {
            return Err(Error::UnknownCase("rotation direction tie".into()));
        }
        let theta = if rot < 0.0 { base } else { 2.0 * PI - base };
        return Ok(CaseTag::with_theta(7, theta));
    }
    Ok(CaseTag::new(10))
}

fn classify_n2<T: Scalar>(x: &Mat<T>, tol: &Tolerances) -> Result<CaseTag> {
    let clusters = cluster_eigenvalues(&eigenvalues(x), tol.cluster);
    let upper: Vec<_> = clusters.iter().filter(|(z, _)| z.im > T::zero()).collect();
    let ok = clusters.len() == 2
        && upper.len() == 1
        && upper[0].1 == 2
        && on_unit_circle(upper[0].0, tol.circle);
    if !ok {
        return Err(Error::UnknownCase("4×4 MP is not of N2 type".into()));
    }
    let phi = to_f64(upper[0].0.im.atan2(upper[0].0.re));
    let w = UnitCircleValue::from_angle(lit::<T>(phi));
    if nu_p_omega(x, w, &Mat::identity(4, 4), tol.rank) != 1 {
        return Err(Error::UnknownCase("double rotation eigenvalue is semisimple".into()));
    }
    let n = n2_nilpotent(x, phi);
    let sign = j_trace(&n);
    if sign.abs() <= SIGN_TIE {
        return Err(Error::UnknownCase("N2 sign tie".into()));
    }
    let case = if sign < 0.0 { 8 } else { 9 };
    Ok(CaseTag { case_id: case, theta: Some(phi), sign: Some(if sign < 0.0 { -1 } else { 1 }) })
}

/// `X² − 2cos φ·X + I`.
fn n2_nilpotent<T: Scalar>(x: &Mat<T>, phi: f64) -> Mat<T> {
    let id = Mat::<T>::identity(x.nrows(), x.nrows());
    x * x - x * lit::<T>(2.0 * phi.cos()) + id
}

/// Union-find over symplectic planes coupled by nonzero entries.
fn plane_components<T: Scalar>(x: &Mat<T>) -> Vec<Vec<usize>> {
    let n = x.nrows() / 2;
    let scale = to_f64(max_abs(x)).max(1.0);
    let mut parent: Vec<usize> = (0..n).collect();
    fn root(p: &mut [usize], i: usize) -> usize {
        let mut r = i;
        while p[r] != r {
            r = p[r];
        }
        p[i] = r;
        r
    }
    for k in 0..n {
        for l in 0..n {
            if k == l {
                continue;
            }
            let coupled = [k, n + k].iter().any(|&i| {
                [l, n + l].iter().any(|&j| to_f64(x[(i, j)]).abs() > COUPLING_TOL * scale)
            });
            if coupled {
                let (a, b) = (root(&mut parent, k), root(&mut parent, l));
                if a != b {
                    parent[a.max(b)] = a.min(b);
                }
            }
        }
    }
    let mut comps: Vec<Vec<usize>> = Vec::new();
    let mut roots: Vec<usize> = Vec::new();
    for k in 0..n {
        let r = root(&mut parent, k);
        match roots.iter().position(|&x| x == r) {
            Some(i) => comps[i].push(k),
            None => {
                roots.push(r);
                comps.push(vec![k]);
            }
        }
    }
    comps
}

/// Restriction of `x` to the listed planes, in `(x-coords, y-coords)` order.
pub(crate) fn plane_submatrix<T: Scalar>(x: &Mat<T>, planes: &[usize]) -> Mat<T> {
    let n = x.nrows() / 2;
    let idx: Vec<usize> = planes.iter().copied().chain(planes.iter().map(|k| n + k)).collect();
    Mat::from_fn(idx.len(), idx.len(), |i, j| x[(idx[i], idx[j])])
}

/// Inertia of `Wᵀ sym(J A) W` for an orthonormal basis `W`.
fn restricted_inertia<T: Scalar>(a: &Mat<T>, w: &Mat<T>) -> (usize, usize) {
    let j = standard_j::<T>(a.nrows() / 2);
    let f = w.transpose() * sym_part(&(&j * a)) * w;
    let f = sym_part(&f);
    let ev = f.symmetric_eigenvalues();
    let scale = ev.iter().fold(0.0f64, |acc, &x| acc.max(to_f64(x).abs()));
    let cut = (scale * 1e-6).max(1e-12);
    let pos = ev.iter().filter(|&&x| to_f64(x) > cut).count();
    let neg = ev.iter().filter(|&&x| to_f64(x) < -cut).count();
    (pos, neg)
}

/// Normal-form blocks for the eigenvalue `λ = ±1` of one component.
fn unipotent_blocks<T: Scalar>(
    x: &Mat<T>,
    lambda: f64,
    mult: usize,
    tol: &Tolerances,
) -> Result<Vec<(BasicForm, CaseTag)>> {
    if mult % 2 != 0 {
        return Err(Error::DecompositionUnsupported(format!("eigenvalue {lambda} with odd multiplicity {mult}")));
    }
    let k = mult / 2;
    let size = x.nrows();
    let shifted = x - Mat::<T>::identity(size, size) * lit::<T>(lambda);
    let scale = max_abs(x) + T::one();
    let nu = real_nullity(&shifted, tol.rank, scale);
    if nu < k || nu > mult {
        return Err(Error::DecompositionUnsupported(format!(
            "eigenvalue {lambda}: nullity {nu} incompatible with multiplicity {mult}"
        )));
    }
    let sq = &shifted * &shifted;
    if real_nullity(&sq, tol.rank, scale * scale) != mult {
        return Err(Error::DecompositionUnsupported(format!("eigenvalue {lambda} has Jordan blocks longer than 2")));
    }
    let w = real_kernel_basis(&sq, mult);
    let (pos, neg) = restricted_inertia(&shifted, &w);
    let jordan = mult - nu;
    if pos + neg != jordan {
        return Err(Error::DecompositionUnsupported(format!(
            "eigenvalue {lambda}: form rank {} differs from Jordan count {jordan}",
            pos + neg
        )));
    }
    let p_zero = nu - k;
    let mut out = Vec::new();
    let (ident_case, pos_case, neg_case) = if lambda > 0.0 { (2u8, 1u8, 3u8) } else { (5, 6, 4) };
    for _ in 0..pos {
        out.push((BasicForm::N1 { lambda, b: 1.0 }, CaseTag { case_id: pos_case, theta: None, sign: Some(1) }));
    }
    for _ in 0..neg {
        out.push((BasicForm::N1 { lambda, b: -1.0 }, CaseTag { case_id: neg_case, theta: None, sign: Some(-1) }));
    }
    for _ in 0..p_zero {
        out.push((BasicForm::N1 { lambda, b: 0.0 }, CaseTag::new(ident_case)));
    }
    Ok(out)
}

fn rotation_blocks<T: Scalar>(
    x: &Mat<T>,
    z: Complex<T>,
    mult: usize,
    tol: &Tolerances,
) -> Result<Vec<(BasicForm, CaseTag)>> {
    let phi = to_f64(z.im.atan2(z.re));
    let w = UnitCircleValue::from_angle(lit::<T>(phi));
    let size = x.nrows();
    let r = |theta: f64| (BasicForm::R { theta }, CaseTag::with_theta(7, theta));
    match mult {
        1 => {
            let (p, _) = krein_type(x, w, tol)?;
            Ok(vec![r(if p == 0 { phi } else { 2.0 * PI - phi })])
        }
        2 => {
            let nu = nu_p_omega(x, w, &Mat::identity(size, size), tol.rank);
            if nu == 2 {
                let (p, q) = krein_type(x, w, tol)?;
                Ok(match (p, q) {
                    (0, 2) => vec![r(phi), r(phi)],
                    (2, 0) => vec![r(2.0 * PI - phi), r(2.0 * PI - phi)],
                    _ => vec![r(phi), r(2.0 * PI - phi)],
                })
            } else {
                let n = n2_nilpotent(x, phi);
                let sq = &n * &n;
                let scale = (max_abs(x) + T::one()).powi(4);
                if real_nullity(&sq, tol.rank, scale) != 4 {
                    return Err(Error::DecompositionUnsupported("defective rotation pair of unexpected shape".into()));
                }
                let wb = real_kernel_basis(&sq, 4);
                let (pos, neg) = restricted_inertia(&n, &wb);
                let (case, a, sign) = match (pos, neg) {
                    (0, k) if k > 0 => (8u8, 1.0, -1i8),
                    (k, 0) if k > 0 => (9u8, -1.0, 1i8),
                    _ => return Err(Error::DecompositionUnsupported("indefinite N2 form".into())),
                };
                Ok(vec![(
                    BasicForm::n2_scaled(phi, a),
                    CaseTag { case_id: case, theta: Some(phi), sign: Some(sign) },
                )])
            }
        }
        _ => Err(Error::DecompositionUnsupported(format!(
            "unit-circle eigenvalue e^(i{phi}) with multiplicity {mult} > 2"
        ))),
    }
}

fn decompose_component<T: Scalar>(x: &Mat<T>, tol: &Tolerances) -> Result<Vec<(BasicForm, CaseTag)>> {
    if x.nrows() == 2 {
        let tag = classify_2x2(x)?;
        let form = match tag.case_id {
            1 | 3 => BasicForm::N1 { lambda: 1.0, b: f64::from(tag.sign.unwrap_or(1)) },
            2 => BasicForm::N1 { lambda: 1.0, b: 0.0 },
            4 | 6 => BasicForm::N1 { lambda: -1.0, b: f64::from(tag.sign.unwrap_or(1)) },
            5 => BasicForm::N1 { lambda: -1.0, b: 0.0 },
            7 => BasicForm::R { theta: tag.theta.unwrap_or(f64::NAN) },
            _ => BasicForm::D { lambda: if to_f64(x.trace()) < 0.0 { -2.0 } else { 2.0 } },
        };
        return Ok(vec![(form, tag)]);
    }
    let clusters = cluster_eigenvalues(&eigenvalues(x), tol.cluster);
    let mut blocks = Vec::new();
    let mut rest = 0;
    let eps = tol.cluster.max(1e-7) * 10.0;
    for &(z, mult) in &clusters {
        if !on_unit_circle(z, tol.circle) {
            rest += mult;
            continue;
        }
        let (re, im) = (to_f64(z.re), to_f64(z.im));
        if im.abs() <= eps {
            let lambda = if re > 0.0 { 1.0 } else { -1.0 };
            blocks.extend(unipotent_blocks(x, lambda, mult, tol)?);
        } else if im > 0.0 {
            blocks.extend(rotation_blocks(x, z, mult, tol)?);
        }
    }
    if rest > 0 {
        blocks.push((BasicForm::HyperbolicRest { dim: rest }, CaseTag::new(10)));
    }
    Ok(blocks)
}

/// Splits `MP` along uncoupled symplectic planes and classifies the
/// eigenvalue structure of each piece.
pub fn decompose<T: Scalar>(m: &Mat<T>, p: &Mat<T>, tol: &Tolerances) -> Result<NormalFormDecomposition> {
    if m.shape() != p.shape() || !m.is_square() || m.nrows() % 2 != 0 {
        return Err(Error::Dimension("M and P must be equal even square matrices".into()));
    }
    decompose_mp(&(m * p), tol)
}

pub fn decompose_mp<T: Scalar>(x: &Mat<T>, tol: &Tolerances) -> Result<NormalFormDecomposition> {
    let mut blocks = Vec::new();
    for comp in plane_components(x) {
        blocks.extend(decompose_component(&plane_submatrix(x, &comp), tol)?);
    }
    let mut hyper = 0;
    let mut kept = Vec::new();
    for (form, tag) in blocks {
        match form {
            BasicForm::HyperbolicRest { dim } => hyper += dim,
            _ => kept.push((form, tag)),
        }
    }
    if hyper > 0 {
        kept.push((BasicForm::HyperbolicRest { dim: hyper }, CaseTag::new(10)));
    }
    let dec = NormalFormDecomposition::from_blocks(kept);
    debug_assert_eq!(dec.total_dim(), x.nrows());
    Ok(dec)
}

/// The decomposition reproduces the unit-circle eigenvalues of `MP`, with
/// multiplicities and nullities.
pub fn decomposition_matches<T: Scalar>(x: &Mat<T>, dec: &NormalFormDecomposition, tol: &Tolerances) -> Result<bool> {
    let rec: Mat<T> = dec.reconstruct()?;
    if rec.nrows() != x.nrows() {
        return Ok(false);
    }
    let circle = |a: &Mat<T>| -> Vec<(Complex<T>, usize)> {
        cluster_eigenvalues(&eigenvalues(a), tol.cluster)
            .into_iter()
            .filter(|(z, _)| on_unit_circle(*z, tol.circle))
            .collect()
    };
    let (cx, cr) = (circle(x), circle(&rec));
    if cx.len() != cr.len() {
        return Ok(false);
    }
    let id = Mat::<T>::identity(x.nrows(), x.nrows());
    for (z, k) in &cx {
        let Some((zr, kr)) = cr.iter().find(|(w, _)| (*w - *z).modulus() <= lit(1e-5)) else {
            return Ok(false);
        };
        if k != kr {
            return Ok(false);
        }
        let unit = |v: Complex<T>| UnitCircleValue::from_angle(v.im.atan2(v.re));
        if nu_p_omega(x, unit(*z), &id, tol.rank) != nu_p_omega(&rec, unit(*zr), &id, tol.rank) {
            return Ok(false);
        }
    }
    Ok(true)
}

/// The splitting-number table of the ten cases. `flip_case7` swaps the
/// Case 7 entries and exists to exercise verification reports.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct SplittingTable {
    pub flip_case7: bool,
}

fn same_point(a: UnitCircleValue<f64>, b: UnitCircleValue<f64>) -> bool {
    (a.value() - b.value()).norm() <= 1e-9
}

impl SplittingTable {
    pub fn lookup(&self, tag: &CaseTag, omega: UnitCircleValue<f64>) -> Result<SplittingPair> {
        tag.validate()?;
        let pair = |s_plus, s_minus| Ok(SplittingPair { s_plus, s_minus, at_omega: omega });
        let spectrum = tag.circle_spectrum();
        if !spectrum.iter().any(|&w| same_point(w, omega)) {
            return pair(0, 0);
        }
        match tag.case_id {
            1 | 2 | 4 | 5 | 8 => pair(1, 1),
            3 | 6 | 9 => pair(0, 0),
            7 => {
                // (0, 1) at e^{iθ}; the conjugate point carries the mirrored pair.
                let at_theta = same_point(spectrum[0], omega);
                let (a, b) = if at_theta { (0, 1) } else { (1, 0) };
                if self.flip_case7 {
                    pair(b, a)
                } else {
                    pair(a, b)
                }
            }
            c => Err(Error::UnsupportedPoint(format!("case {c} at {}", omega.value()))),
        }
    }
}

pub fn splitting_numbers_table(tag: &CaseTag, omega: UnitCircleValue<f64>) -> Result<SplittingPair> {
    SplittingTable::default().lookup(tag, omega)
}

/// Blockwise sum of table splitting numbers over a decomposition.
pub fn splitting_numbers_decomposition(
    dec: &NormalFormDecomposition,
    omega: UnitCircleValue<f64>,
) -> Result<SplittingPair> {
    let mut total = SplittingPair { s_plus: 0, s_minus: 0, at_omega: omega };
    for (_, tag) in &dec.blocks {
        let s = splitting_numbers_table(tag, omega)?;
        total.s_plus += s.s_plus;
        total.s_minus += s.s_minus;
    }
    Ok(total)
}

/// Default ε-schedule for the one-sided limits.
pub const DEFAULT_EPSILON_SCHEDULE: [f64; 3] = [1e-2, 1e-3, 1e-4];

/// `S^±` as the stabilized jumps `i_{P, ω e^{±iε}}(γ) − i_{P,ω}(γ)`.
pub fn splitting_numbers_numeric(
    path: &crate::path::SymplecticPath<f64>,
    omega: UnitCircleValue<f64>,
    p: &Mat<f64>,
    schedule: &[f64],
    opts: &crate::index::IndexOptions,
) -> Result<SplittingPair> {
    if schedule.len() < 2 || schedule.windows(2).any(|w| !(w[0] > w[1] && w[1] > 0.0)) {
        return Err(Error::Parameter("ε-schedule must be strictly decreasing and positive".into()));
    }
    // The jumps are constant for every ε below the distance from ω to the
    // rest of σ(γ(T)P) ∩ U; beyond that the count may pick up another point.
    let others = crate::sym::eigenvalues(&(path.endpoint() * p))
        .into_iter()
        .filter(|z| (z.norm() - 1.0).abs() < 1e-6)
        .map(|z| (z - omega.value()).norm())
        .filter(|&d| d > 1e-3)
        .fold(f64::INFINITY, f64::min);
    let base = crate::index::index_crossing(path, omega, p, opts)?.i;
    let mut trace = Vec::new();
    for &eps in schedule.iter().filter(|&&e| 2.0 * e < others) {
        // Close to a Jordan block the rotated endpoint sits ~ε² from the
        // singular set, so a tiny ε may fail to resolve; it then stays unset.
        let jump = |e: f64| crate::index::index_crossing(path, omega.rotate(e), p, opts).map(|r| r.i - base).ok();
        trace.push((eps, jump(eps), jump(-eps)));
    }
    // First pair of neighbouring ε that agree.
    let settled = trace.windows(2).find_map(|w| match (w[0].1, w[0].2, w[1].1, w[1].2) {
        (Some(p1), Some(m1), Some(p2), Some(m2)) if p1 == p2 && m1 == m2 && p1 >= 0 && m1 >= 0 => Some((p1, m1)),
        _ => None,
    });
    let Some((p2, m2)) = settled else {
        return Err(Error::Convergence(format!("splitting numbers did not stabilize: {trace:?}")));
    };
    Ok(SplittingPair { s_plus: p2 as usize, s_minus: m2 as usize, at_omega: omega })
}
