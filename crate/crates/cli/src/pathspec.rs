//! On-disk description of a symplectic path.

use psym::path::{integrate_fundamental, path_to_matrix, CoefficientFunction, SymplecticPath};
use psym::sym::{exp_j, standard_p};
use psym::{Dim, Mat};
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

type Rows = Vec<Vec<f64>>;

/// Path files are tagged by `kind`:
///
/// * `constant`: fundamental solution of `γ̇ = JAγ` on `[0, length]` with
///   `A = cI` or a given symmetric `matrix`;
/// * `samples`: explicit `γ(t_k)`, piecewise linear and re-projected;
/// * `endpoint`: the polar path from `I` to `matrix`, wound `loops` extra
///   times around `e^{2πtJ}`.
///
/// Sampled and endpoint paths may only be iterated with `p_symmetric: true`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum PathSpec {
    Constant {
        n: usize,
        kappa: usize,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        c: Option<f64>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        matrix: Option<Rows>,
        length: f64,
    },
    Samples {
        n: usize,
        kappa: usize,
        t: Vec<f64>,
        matrices: Vec<Rows>,
        #[serde(default)]
        p_symmetric: bool,
    },
    Endpoint {
        n: usize,
        kappa: usize,
        matrix: Rows,
        #[serde(default)]
        loops: i32,
        #[serde(default)]
        p_symmetric: bool,
    },
}

pub fn to_mat(rows: &Rows, size: usize) -> Result<Mat<f64>, String> {
    if rows.len() != size || rows.iter().any(|r| r.len() != size) {
        return Err(format!("expected a {size}×{size} matrix"));
    }
    Ok(Mat::from_fn(size, size, |i, j| rows[i][j]))
}

pub fn to_rows(m: &Mat<f64>) -> Rows {
    (0..m.nrows()).map(|i| m.row(i).iter().copied().collect()).collect()
}

impl PathSpec {
    pub fn dim(&self) -> Result<Dim, String> {
        let (n, kappa) = match self {
            PathSpec::Constant { n, kappa, .. } | PathSpec::Samples { n, kappa, .. } | PathSpec::Endpoint { n, kappa, .. } => {
                (*n, *kappa)
            }
        };
        Dim::new(n, kappa).map_err(|e| e.to_string())
    }

    /// The scalar `c` of a constant path `A = cI`, when that is what it is.
    pub fn scalar_coefficient(&self) -> Option<(f64, f64)> {
        match self {
            PathSpec::Constant { c: Some(c), matrix: None, length, .. } => Some((*c, *length)),
            _ => None,
        }
    }

    pub fn build(&self) -> Result<SymplecticPath<f64>, String> {
        let dim = self.dim()?;
        let size = dim.size();
        let p = standard_p::<f64>(dim).into_inner();
        let err = |e: psym::Error| e.to_string();
        match self {
            PathSpec::Constant { c, matrix, length, .. } => {
                let a = match (c, matrix) {
                    (Some(c), None) => Mat::identity(size, size) * *c,
                    (None, Some(rows)) => to_mat(rows, size)?,
                    _ => return Err("a constant path needs exactly one of `c` and `matrix`".into()),
                };
                let coeff = CoefficientFunction::constant(a, *length).map_err(err)?;
                // A constant coefficient is P-symmetric exactly when it commutes with P.
                let coeff = match coeff.clone().verify_p_symmetry(&p, 2, 1e-12) {
                    Ok(c) => c,
                    Err(e) => {
                        log::info!("constant coefficient is not P-symmetric: {e}");
                        coeff
                    }
                };
                integrate_fundamental(&coeff, 256).map_err(err)
            }
            PathSpec::Samples { t, matrices, p_symmetric, .. } => {
                if t.len() != matrices.len() {
                    return Err(format!("{} times for {} matrices", t.len(), matrices.len()));
                }
                let samples =
                    t.iter().zip(matrices).map(|(&t, m)| Ok((t, to_mat(m, size)?))).collect::<Result<Vec<_>, String>>()?;
                let path = SymplecticPath::from_samples(samples, 1e-9).map_err(err)?;
                Ok(if *p_symmetric { path.assume_p_symmetric() } else { path })
            }
            PathSpec::Endpoint { matrix, loops, p_symmetric, .. } => {
                let path = winding_polar_path(&to_mat(matrix, size)?, *loops)?;
                Ok(if *p_symmetric { path.assume_p_symmetric() } else { path })
            }
        }
    }
}

/// `t ↦ e^{2πkt J}·(polar path to x)(t)` on `[0, 1]`.
pub fn winding_polar_path(x: &Mat<f64>, loops: i32) -> Result<SymplecticPath<f64>, String> {
    let base = path_to_matrix(x, 64).map_err(|e| e.to_string())?;
    if loops == 0 {
        return Ok(base);
    }
    let n = base.n();
    let eval = base.evaluator();
    SymplecticPath::from_fn(n, 1.0, 64, move |t: f64| exp_j(n, 2.0 * PI * f64::from(loops) * t) * eval(t))
        .map_err(|e| e.to_string())
}

#[cfg(test)]
mod tests {
    use super::*;
    use psym::sym::symplectic_defect;

    #[test]
    fn constant_spec_round_trips_and_builds() {
        let text = r#"{ "kind": "constant", "n": 2, "kappa": 0, "c": 2.0, "length": 1.5707963267948966 }"#;
        let spec: PathSpec = serde_json::from_str(text).unwrap();
        assert_eq!(spec.scalar_coefficient(), Some((2.0, std::f64::consts::FRAC_PI_2)));
        let path = spec.build().unwrap();
        assert!(path.is_p_symmetric());
        // e^{2·(π/2)·J} = −I.
        assert!((path.endpoint() + Mat::<f64>::identity(4, 4)).amax() < 1e-9);
        let again: PathSpec = serde_json::from_str(&serde_json::to_string(&spec).unwrap()).unwrap();
        assert_eq!(again, spec);
    }

    #[test]
    fn endpoint_spec_reaches_its_matrix() {
        let x = psym::sym::diamond(&psym::sym::rotation(1.0), &psym::sym::dilation(2.0)).unwrap();
        let spec = PathSpec::Endpoint { n: 2, kappa: 1, matrix: to_rows(&x), loops: 1, p_symmetric: true };
        let path = spec.build().unwrap();
        assert!((path.endpoint() - &x).amax() < 1e-9);
        assert!(symplectic_defect(&path.eval(0.37)) < 1e-9);
        assert!(path.is_p_symmetric());
    }

    #[test]
    fn malformed_specs_are_rejected() {
        assert!(serde_json::from_str::<PathSpec>(r#"{ "kind": "constant", "n": 2, "kappa": 0, "c": 1, "length": 1, "x": 0 }"#).is_err());
        let both = PathSpec::Constant { n: 1, kappa: 0, c: Some(1.0), matrix: Some(vec![vec![1.0, 0.0], vec![0.0, 1.0]]), length: 1.0 };
        assert!(both.build().is_err());
        let bad = PathSpec::Endpoint { n: 1, kappa: 0, matrix: vec![vec![1.0, 1.0], vec![1.0, 1.0]], loops: 0, p_symmetric: false };
        assert!(bad.build().is_err());
    }
}
