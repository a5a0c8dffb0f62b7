//! Affine models and pointwise evaluation of the symbol
//!
//! ```text
//! sigma(x, xi) = 1/2 xi' a(x) xi + b(x) . xi + J_0(xi) + sum_l x_l J_l(xi)
//! a(x) = a0 + sum_l x_l a_l,   b_i(x) = b0_i + sum_l b_slope[i][l] x_l
//! ```
//!
//! The symbol variable is `xi = i u`; derivatives are complex derivatives in
//! `xi`, so `d_xi (1/2 a xi^2) = a xi` evaluates to `i a u`.

use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::jumps::{JumpSpec, Truncation};
use crate::error::{Error, Result};
use crate::multiindex::{FlatIndexer, MultiIndex};

/// Coefficients of an affine generator on a box-shaped state domain.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AffineModel {
    pub dimension: usize,
    #[serde(default)]
    pub a0: Vec<Vec<f64>>,
    /// `a_slope[l]` is the matrix multiplying `x_l`.
    #[serde(default)]
    pub a_slope: Vec<Vec<Vec<f64>>>,
    #[serde(default)]
    pub b0: Vec<f64>,
    /// `b_slope[i][l]` multiplies `x_l` in the drift of coordinate `i`.
    #[serde(default)]
    pub b_slope: Vec<Vec<f64>>,
    /// `jumps[0]` is `nu_0`, `jumps[l]` multiplies `x_l`.
    #[serde(default)]
    pub jumps: Vec<JumpSpec>,
    #[serde(default)]
    pub truncation: Truncation,
    /// `[lo, hi]` per coordinate, `null` for an infinite end.
    #[serde(default)]
    pub state_domain: Vec<[Option<f64>; 2]>,
}

/// One affine component: the constant part (`index 0`) or the slope part of
/// direction `l` (`index l`).
#[derive(Debug, Clone, Copy)]
pub struct Component<'a> {
    pub a: &'a [Vec<f64>],
    pub b: ComponentDrift<'a>,
    pub jump: &'a JumpSpec,
}

#[derive(Debug, Clone, Copy)]
pub enum ComponentDrift<'a> {
    Constant(&'a [f64]),
    /// Column `l` of `b_slope`.
    Column(&'a [Vec<f64>], usize),
}

impl ComponentDrift<'_> {
    pub fn get(&self, i: usize) -> f64 {
        match self {
            ComponentDrift::Constant(b) => b[i],
            ComponentDrift::Column(m, l) => m[i][*l],
        }
    }
}

fn zeros(d: usize) -> Vec<Vec<f64>> {
    vec![vec![0.0; d]; d]
}

impl AffineModel {
    /// The zero generator of dimension `dim` on `R^dim`.
    pub fn zero(dim: usize) -> Self {
        AffineModel {
            dimension: dim,
            a0: zeros(dim),
            a_slope: vec![zeros(dim); dim],
            b0: vec![0.0; dim],
            b_slope: zeros(dim),
            jumps: vec![JumpSpec::None; dim + 1],
            truncation: Truncation::None,
            state_domain: vec![[None, None]; dim],
        }
    }

    /// Parse, fill omitted fields with zeros, and validate.
    pub fn from_json_str(s: &str) -> Result<Self> {
        let de = &mut serde_json::Deserializer::from_str(s);
        let model: AffineModel = serde_path_to_error::deserialize(de).map_err(|e| {
            let path = e.path().to_string();
            Error::model(
                if path == "." { String::new() } else { path },
                e.inner().to_string(),
            )
        })?;
        let model = model.normalized()?;
        model.validate()?;
        Ok(model)
    }

    /// As [`AffineModel::from_json_str`], from an already parsed value.
    pub fn from_json_value(v: serde_json::Value) -> Result<Self> {
        let model: AffineModel = serde_path_to_error::deserialize(v).map_err(|e| {
            let path = e.path().to_string();
            Error::model(
                if path == "." { String::new() } else { path },
                e.inner().to_string(),
            )
        })?;
        let model = model.normalized()?;
        model.validate()?;
        Ok(model)
    }

    pub fn from_json_file(path: &std::path::Path) -> Result<Self> {
        Self::from_json_str(&crate::error::read_file(path)?)
    }

    pub fn to_json_string(&self) -> Result<String> {
        serde_json::to_string_pretty(self).map_err(|e| Error::model("", e.to_string()))
    }

    fn normalized(mut self) -> Result<Self> {
        let d = self.dimension;
        if d == 0 {
            return Err(Error::model("dimension", "must be at least 1"));
        }
        if self.a0.is_empty() {
            self.a0 = zeros(d);
        }
        if self.a_slope.is_empty() {
            self.a_slope = vec![zeros(d); d];
        }
        if self.b0.is_empty() {
            self.b0 = vec![0.0; d];
        }
        if self.b_slope.is_empty() {
            self.b_slope = zeros(d);
        }
        if self.jumps.is_empty() {
            self.jumps = vec![JumpSpec::None; d + 1];
        }
        if self.state_domain.is_empty() {
            self.state_domain = vec![[None, None]; d];
        }
        Ok(self)
    }

    /// Shapes, symmetry, finiteness, semi-ellipticity and jump intensities.
    pub fn validate(&self) -> Result<()> {
        let d = self.dimension;
        check_matrix(&self.a0, d, "a0")?;
        check_len(self.a_slope.len(), d, "a_slope")?;
        for (l, m) in self.a_slope.iter().enumerate() {
            check_matrix(m, d, &format!("a_slope[{l}]"))?;
        }
        check_vector(&self.b0, d, "b0")?;
        check_len(self.b_slope.len(), d, "b_slope")?;
        for (i, row) in self.b_slope.iter().enumerate() {
            check_vector(row, d, &format!("b_slope[{i}]"))?;
        }
        check_len(self.jumps.len(), d + 1, "jumps")?;
        for (c, j) in self.jumps.iter().enumerate() {
            check_jump(j, d, &format!("jumps[{c}]"))?;
        }
        check_len(self.state_domain.len(), d, "state_domain")?;
        for (i, [lo, hi]) in self.state_domain.iter().enumerate() {
            if let (Some(lo), Some(hi)) = (lo, hi) {
                if !(lo <= hi) {
                    return Err(Error::model(
                        format!("state_domain[{i}]"),
                        "lower bound exceeds upper bound",
                    ));
                }
            }
        }
        if self.truncation == Truncation::UnitBall {
            for (c, j) in self.jumps.iter().enumerate() {
                if matches!(j, JumpSpec::Gaussian { .. } | JumpSpec::Exponential { .. }) && d != 1 {
                    return Err(Error::model(
                        format!("jumps[{c}]"),
                        "unit_ball truncation with closed-form jumps is supported in one dimension only",
                    ));
                }
            }
        }
        self.check_semi_elliptic()?;
        self.check_intensities()
    }

    fn check_semi_elliptic(&self) -> Result<()> {
        let d = self.dimension;
        let bounds = self.domain_bounds();
        // directions in which the domain is unbounded
        for l in 0..d {
            let (lo, hi) = bounds[l];
            if hi.is_infinite() && min_eigenvalue(&self.a_slope[l]) < -tol(&self.a_slope[l]) {
                return Err(Error::model(
                    format!("a_slope[{l}]"),
                    "must be positive semidefinite since the domain is unbounded above in this coordinate",
                ));
            }
            if lo.is_infinite() {
                let neg: Vec<Vec<f64>> = self.a_slope[l]
                    .iter()
                    .map(|r| r.iter().map(|v| -v).collect())
                    .collect();
                if min_eigenvalue(&neg) < -tol(&neg) {
                    return Err(Error::model(
                        format!("a_slope[{l}]"),
                        "must be negative semidefinite since the domain is unbounded below in this coordinate",
                    ));
                }
            }
        }
        let finite = |lo: f64, hi: f64| -> (f64, f64) {
            match (lo.is_finite(), hi.is_finite()) {
                (true, true) => (lo, hi),
                (true, false) => (lo, lo.max(0.0) + 10.0),
                (false, true) => (hi.min(0.0) - 10.0, hi),
                (false, false) => (-10.0, 10.0),
            }
        };
        let boxes: Vec<(f64, f64)> = bounds.iter().map(|&(lo, hi)| finite(lo, hi)).collect();
        let mut points = Vec::new();
        for mask in 0..(1usize << d) {
            points.push(
                (0..d)
                    .map(|i| {
                        if mask >> i & 1 == 1 {
                            boxes[i].1
                        } else {
                            boxes[i].0
                        }
                    })
                    .collect::<Vec<f64>>(),
            );
        }
        let mut rng = ChaCha8Rng::seed_from_u64(0x5eed);
        for _ in 0..64 {
            points.push(
                boxes
                    .iter()
                    .map(|&(lo, hi)| rng.random_range(lo..=hi))
                    .collect(),
            );
        }
        for x in points {
            let a = self.diffusion_at(&x);
            if min_eigenvalue(&a) < -tol(&a) {
                let no_slopes = self.a_slope.iter().flatten().flatten().all(|&v| v == 0.0);
                return Err(Error::model(
                    if no_slopes { "a0" } else { "a_slope" },
                    format!("diffusion matrix is not positive semidefinite at x = {x:?}"),
                ));
            }
        }
        Ok(())
    }

    /// Sufficient condition for a nonnegative jump measure: every term
    /// `lambda_0` and `x_l lambda_l` is nonnegative on the domain.
    fn check_intensities(&self) -> Result<()> {
        let bounds = self.domain_bounds();
        for (c, j) in self.jumps.iter().enumerate() {
            let Some(lambda) = j.intensity() else {
                continue;
            };
            if lambda == 0.0 {
                continue;
            }
            if c == 0 {
                if lambda < 0.0 {
                    return Err(Error::model("jumps[0].intensity", "must be nonnegative"));
                }
                continue;
            }
            let (lo, hi) = bounds[c - 1];
            let ok = if lambda > 0.0 { lo >= 0.0 } else { hi <= 0.0 };
            if !ok {
                return Err(Error::model(
                    format!("jumps[{c}].intensity"),
                    format!("x_{c} * intensity must be nonnegative on the state domain"),
                ));
            }
        }
        Ok(())
    }

    pub fn dim(&self) -> usize {
        self.dimension
    }

    /// `(lo, hi)` per coordinate with infinite ends.
    pub fn domain_bounds(&self) -> Vec<(f64, f64)> {
        self.state_domain
            .iter()
            .map(|[lo, hi]| (lo.unwrap_or(f64::NEG_INFINITY), hi.unwrap_or(f64::INFINITY)))
            .collect()
    }

    pub fn domain_is_bounded(&self) -> bool {
        self.domain_bounds()
            .iter()
            .all(|(lo, hi)| lo.is_finite() && hi.is_finite())
    }

    pub fn contains(&self, x: &[f64]) -> bool {
        x.len() == self.dimension
            && self
                .domain_bounds()
                .iter()
                .zip(x)
                .all(|(&(lo, hi), &v)| lo <= v && v <= hi)
    }

    fn check_point(&self, x: &[f64]) -> Result<()> {
        if x.len() != self.dimension {
            return Err(Error::Contract(format!(
                "state point has {} coordinates, model dimension is {}",
                x.len(),
                self.dimension
            )));
        }
        if !self.contains(x) {
            return Err(Error::Domain(format!(
                "x = {x:?} lies outside the state domain"
            )));
        }
        Ok(())
    }

    /// Component `0` (constant part) or `l` (slope of direction `l`, 1-based).
    pub fn component(&self, c: usize) -> Component<'_> {
        if c == 0 {
            Component {
                a: &self.a0,
                b: ComponentDrift::Constant(&self.b0),
                jump: &self.jumps[0],
            }
        } else {
            Component {
                a: &self.a_slope[c - 1],
                b: ComponentDrift::Column(&self.b_slope, c - 1),
                jump: &self.jumps[c],
            }
        }
    }

    pub fn diffusion_at(&self, x: &[f64]) -> Vec<Vec<f64>> {
        let d = self.dimension;
        let mut a = self.a0.clone();
        for (l, &xl) in x.iter().enumerate() {
            for i in 0..d {
                for j in 0..d {
                    a[i][j] += xl * self.a_slope[l][i][j];
                }
            }
        }
        a
    }

    /// `true` when every slope coefficient and slope jump vanishes.
    pub fn is_levy(&self) -> bool {
        self.a_slope.iter().flatten().flatten().all(|&v| v == 0.0)
            && self.b_slope.iter().flatten().all(|&v| v == 0.0)
            && self.jumps[1..].iter().all(JumpSpec::is_none)
    }

    pub fn has_jumps(&self) -> bool {
        self.jumps.iter().any(|j| !j.is_none())
    }

    pub fn without_jumps(&self) -> Self {
        let mut m = self.clone();
        m.jumps = vec![JumpSpec::None; self.dimension + 1];
        m
    }

    /// `d^eps` of component `c` at `xi` for every `|eps| <= max_order`, by
    /// flat slot.
    pub fn component_derivatives(
        &self,
        c: usize,
        xi: &[Complex64],
        max_order: u32,
    ) -> Result<Vec<Complex64>> {
        let d = self.dimension;
        let comp = self.component(c);
        let mut out = comp.jump.derivatives(xi, max_order, self.truncation)?;
        // order 0
        let mut q = Complex64::new(0.0, 0.0);
        for i in 0..d {
            q += comp.b.get(i) * xi[i];
            for j in 0..d {
                q += 0.5 * comp.a[i][j] * xi[i] * xi[j];
            }
        }
        out[0] += q;
        if max_order >= 1 {
            for i in 0..d {
                let mut g = Complex64::new(comp.b.get(i), 0.0);
                for j in 0..d {
                    g += comp.a[i][j] * xi[j];
                }
                out[1 + i] += g;
            }
        }
        if max_order >= 2 {
            let indexer = FlatIndexer::new(d, 2);
            for i in 0..d {
                for j in i..d {
                    let mut eps = MultiIndex::unit(d, i);
                    eps = eps.raised(j);
                    let s = indexer.slot(&eps).expect("second-order slot");
                    out[s] += comp.a[i][j];
                }
            }
        }
        Ok(out)
    }

    /// Whether `d^eps` of component `c` can be nonzero.
    pub fn component_may_be_nonzero(&self, c: usize, eps: &MultiIndex) -> bool {
        component_pattern(self.component(c), None, eps)
    }

    /// Whether `d^eps` of component `c` can differ between `self` and `other`.
    pub fn component_may_differ(&self, other: &AffineModel, c: usize, eps: &MultiIndex) -> bool {
        component_pattern(self.component(c), Some(other.component(c)), eps)
    }

    /// `sigma(x, xi)` at a complex symbol argument.
    pub fn symbol_at(&self, x: &[f64], xi: &[Complex64]) -> Result<Complex64> {
        self.check_point(x)?;
        let mut v = self.component_derivatives(0, xi, 0)?[0];
        for (l, &xl) in x.iter().enumerate() {
            if xl != 0.0 {
                v += xl * self.component_derivatives(l + 1, xi, 0)?[0];
            }
        }
        Ok(v)
    }

    /// `sigma(x, iu)`.
    pub fn eval_symbol(&self, x: &[f64], u: &[f64]) -> Result<Complex64> {
        self.symbol_at(x, &imag(u))
    }

    /// `sigma_l(xi)` for 1-based `l`.
    pub fn slope_symbol_at(&self, l: usize, xi: &[Complex64]) -> Result<Complex64> {
        Ok(self.component_derivatives(l, xi, 0)?[0])
    }

    /// `sigma(0, xi)`, the constant part; not restricted to the domain.
    pub fn constant_symbol_at(&self, xi: &[Complex64]) -> Result<Complex64> {
        Ok(self.component_derivatives(0, xi, 0)?[0])
    }
}

/// `i u` as a complex vector.
pub fn imag(u: &[f64]) -> Vec<Complex64> {
    u.iter().map(|&v| Complex64::new(0.0, v)).collect()
}

fn component_pattern(p: Component<'_>, q: Option<Component<'_>>, eps: &MultiIndex) -> bool {
    let d = eps.dim();
    let a = |i: usize, j: usize| p.a[i][j] - q.map_or(0.0, |q| q.a[i][j]);
    let b = |i: usize| p.b.get(i) - q.map_or(0.0, |q| q.b.get(i));
    let jump = match q {
        None => p.jump.may_be_nonzero(eps),
        Some(q) => p.jump != q.jump && (p.jump.may_be_nonzero(eps) || q.jump.may_be_nonzero(eps)),
    };
    if jump {
        return true;
    }
    match eps.order() {
        0 => (0..d).any(|i| b(i) != 0.0 || (0..d).any(|j| a(i, j) != 0.0)),
        1 => {
            let i = eps.first_nonzero().expect("order one");
            b(i) != 0.0 || (0..d).any(|j| a(i, j) != 0.0)
        }
        2 => {
            let i = eps.first_nonzero().expect("order two");
            let j = eps
                .lowered(i)
                .and_then(|e| e.first_nonzero())
                .expect("order two");
            a(i, j) != 0.0
        }
        _ => false,
    }
}

fn check_len(n: usize, want: usize, path: &str) -> Result<()> {
    if n != want {
        return Err(Error::model(
            path,
            format!("expected {want} entries, found {n}"),
        ));
    }
    Ok(())
}

fn check_vector(v: &[f64], d: usize, path: &str) -> Result<()> {
    check_len(v.len(), d, path)?;
    for (i, x) in v.iter().enumerate() {
        if !x.is_finite() {
            return Err(Error::model(format!("{path}[{i}]"), "must be finite"));
        }
    }
    Ok(())
}

fn check_matrix(m: &[Vec<f64>], d: usize, path: &str) -> Result<()> {
    check_len(m.len(), d, path)?;
    for (i, row) in m.iter().enumerate() {
        check_vector(row, d, &format!("{path}[{i}]"))?;
    }
    for i in 0..d {
        for j in 0..i {
            if (m[i][j] - m[j][i]).abs() > 1e-12 * (1.0 + m[i][j].abs()) {
                return Err(Error::model(
                    format!("{path}[{i}][{j}]"),
                    "matrix must be symmetric",
                ));
            }
        }
    }
    Ok(())
}

fn check_jump(j: &JumpSpec, d: usize, path: &str) -> Result<()> {
    match j {
        JumpSpec::Gaussian {
            intensity,
            mean,
            covariance,
        } => {
            if !intensity.is_finite() {
                return Err(Error::model(format!("{path}.intensity"), "must be finite"));
            }
            check_vector(mean, d, &format!("{path}.mean"))?;
            check_matrix(covariance, d, &format!("{path}.covariance"))?;
            if min_eigenvalue(covariance) < -tol(covariance) {
                return Err(Error::model(
                    format!("{path}.covariance"),
                    "must be positive semidefinite",
                ));
            }
        }
        JumpSpec::Exponential { intensity, rates } => {
            if !intensity.is_finite() {
                return Err(Error::model(format!("{path}.intensity"), "must be finite"));
            }
            check_len(rates.len(), d, &format!("{path}.rates"))?;
            for (i, r) in rates.iter().enumerate() {
                if let Some(r) = r {
                    if !(r.is_finite() && *r > 0.0) {
                        return Err(Error::model(
                            format!("{path}.rates[{i}]"),
                            "must be positive",
                        ));
                    }
                }
            }
        }
        JumpSpec::None | JumpSpec::User(_) => {}
    }
    Ok(())
}

fn tol(m: &[Vec<f64>]) -> f64 {
    1e-12 * (1.0 + m.iter().flatten().fold(0.0f64, |a, v| a.max(v.abs())))
}

fn min_eigenvalue(m: &[Vec<f64>]) -> f64 {
    let d = m.len();
    if d == 0 {
        return 0.0;
    }
    let mat = DMatrix::from_fn(d, d, |i, j| m[i][j]);
    mat.symmetric_eigen().eigenvalues.min()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn bm() -> AffineModel {
        let mut m = AffineModel::zero(1);
        m.a0 = vec![vec![1.0]];
        m
    }

    #[test]
    fn brownian_symbol() {
        let v = bm().eval_symbol(&[0.3], &[2.0]).unwrap();
        assert!((v - Complex64::new(-2.0, 0.0)).norm() < 1e-15);
        let mut drifted = bm();
        drifted.b0 = vec![0.25];
        let v = drifted.eval_symbol(&[5.0], &[1.5]).unwrap();
        assert!((v - Complex64::new(-1.125, 0.375)).norm() < 1e-15);
    }

    #[test]
    fn slope_symbol_of_drift() {
        let mut m = AffineModel::zero(2);
        m.b_slope = vec![vec![0.5, -1.0], vec![2.0, 0.0]];
        let u = [0.7, -0.3];
        let s1 = m.slope_symbol_at(1, &imag(&u)).unwrap();
        assert!((s1 - Complex64::new(0.0, 0.5 * 0.7 + 2.0 * -0.3)).norm() < 1e-15);
        let s2 = m.slope_symbol_at(2, &imag(&u)).unwrap();
        assert!((s2 - Complex64::new(0.0, -0.7)).norm() < 1e-15);
    }

    #[test]
    fn json_round_trip_and_defaults() {
        let m = AffineModel::from_json_str(
            r#"{"dimension": 1, "a0": [[0.04]], "b0": [0.1], "b_slope": [[-0.5]]}"#,
        )
        .unwrap();
        assert_eq!(m.a_slope, vec![vec![vec![0.0]]]);
        assert_eq!(m.jumps.len(), 2);
        let back = AffineModel::from_json_str(&m.to_json_string().unwrap()).unwrap();
        assert_eq!(back, m);
    }

    #[test]
    fn schema_errors_name_the_field() {
        let e = AffineModel::from_json_str(r#"{"dimension": 1, "a0": [["x"]]}"#).unwrap_err();
        match e {
            Error::Model { path, .. } => assert_eq!(path, "a0[0][0]"),
            other => panic!("{other:?}"),
        }
        let e = AffineModel::from_json_str(r#"{"dimension": 2, "a0": [[1, 0.5], [0.4, 1]]}"#)
            .unwrap_err();
        assert!(
            matches!(e, Error::Model { ref path, .. } if path == "a0[1][0]"),
            "{e:?}"
        );
        let e = AffineModel::from_json_str(r#"{"dimension": 1, "a0": [[-1]]}"#).unwrap_err();
        assert_eq!(e.kind(), "schema");
        let e = AffineModel::from_json_str(r#"{"dimension": 1, "jumps": [{"type": "gaussian", "intensity": 1, "mean": [0], "covariance": [[1]]}, {"type": "none"}], "bogus": 1}"#)
            .unwrap_err();
        assert_eq!(e.kind(), "schema");
    }

    #[test]
    fn cir_needs_a_positive_domain() {
        let mut m = AffineModel::zero(1);
        m.a_slope = vec![vec![vec![0.09]]];
        assert!(m.validate().is_err());
        m.state_domain = vec![[Some(0.0), None]];
        m.validate().unwrap();
    }

    #[test]
    fn domain_violation() {
        let mut m = bm();
        m.state_domain = vec![[Some(-1.0), Some(1.0)]];
        assert_eq!(m.eval_symbol(&[2.0], &[1.0]).unwrap_err().kind(), "domain");
    }
}
