//! Hyperquadric models of the space forms, their totally umbilical
//! hypersurfaces, and the upper half-space chart of hyperbolic space.
//!
//! Points live in `R^{n+2}` equipped with the bilinear form
//! `<u,v> = u_1 v_1 + ... + u_{n+1} v_{n+1} + c u_{n+2} v_{n+2}`.
//! For `c = 1` the model is the unit sphere; for `c = -1` it is the upper sheet
//! `x_{n+2} > 0` of `<p,p> = -1`. The flat case `c = 0` is only used for
//! Euclidean curves in `R^{n+1}`, where the form is the ordinary dot product.

use std::fmt;

use nalgebra::{DMatrix, DVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{GeomError, Result};

pub type AmbientVector = DVector<f64>;

/// Tolerance for hyperquadric and tangency residuals.
pub const TOL_CONSTRAINT: f64 = 1e-9;

/// Below this `|<a,a>|` (relative to the Euclidean norm of `a`) the normal is null.
const NULL_TOL: f64 = 1e-12;

/// Curvature sign of the ambient space form.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(into = "i8", try_from = "i8")]
pub enum SpaceForm {
    Hyperbolic,
    Euclidean,
    Spherical,
}

impl SpaceForm {
    pub fn c(self) -> f64 {
        self.sign() as f64
    }

    pub fn sign(self) -> i8 {
        match self {
            SpaceForm::Hyperbolic => -1,
            SpaceForm::Euclidean => 0,
            SpaceForm::Spherical => 1,
        }
    }

    pub fn from_sign(c: i64) -> Result<Self> {
        match c {
            -1 => Ok(SpaceForm::Hyperbolic),
            0 => Ok(SpaceForm::Euclidean),
            1 => Ok(SpaceForm::Spherical),
            other => Err(GeomError::InvalidInput(format!(
                "curvature sign must be -1, 0 or 1, got {other}"
            ))),
        }
    }

    /// Whether curves live on a hyperquadric (`c = ±1`).
    pub fn is_curved(self) -> bool {
        self != SpaceForm::Euclidean
    }
}

impl From<SpaceForm> for i8 {
    fn from(f: SpaceForm) -> i8 {
        f.sign()
    }
}

impl TryFrom<i8> for SpaceForm {
    type Error = GeomError;
    fn try_from(c: i8) -> Result<Self> {
        SpaceForm::from_sign(c as i64)
    }
}

impl fmt::Display for SpaceForm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.sign())
    }
}

/// What an ambient vector is supposed to represent.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Role {
    PointOnHyperquadric,
    Tangent,
    Free,
}

/// The diagonal bilinear form `(1, ..., 1, c)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Metric {
    pub form: SpaceForm,
}

impl Metric {
    pub fn new(form: SpaceForm) -> Self {
        Metric { form }
    }

    pub fn inner(&self, u: &AmbientVector, v: &AmbientVector) -> Result<f64> {
        if u.len() != v.len() {
            return Err(GeomError::DimensionMismatch {
                expected: u.len(),
                found: v.len(),
            });
        }
        Ok(self.dot(u, v))
    }

    /// Unchecked inner product for hot loops; lengths must match.
    #[inline]
    pub fn dot(&self, u: &AmbientVector, v: &AmbientVector) -> f64 {
        debug_assert_eq!(u.len(), v.len());
        let n = u.len();
        if !self.form.is_curved() {
            return u.dot(v);
        }
        let mut acc = 0.0;
        for i in 0..n - 1 {
            acc += u[i] * v[i];
        }
        acc + self.form.c() * u[n - 1] * v[n - 1]
    }

    #[inline]
    pub fn norm_sq(&self, u: &AmbientVector) -> f64 {
        self.dot(u, u)
    }

    /// Lowers an index: returns `G u` with `G = diag(1, ..., 1, c)`.
    pub fn lower(&self, u: &AmbientVector) -> AmbientVector {
        let mut out = u.clone();
        if self.form.is_curved() {
            let n = out.len();
            out[n - 1] *= self.form.c();
        }
        out
    }

    /// Removes from `v` its components along mutually orthogonal, non-null `basis` vectors.
    pub fn orthogonalize(&self, v: &AmbientVector, basis: &[&AmbientVector]) -> AmbientVector {
        let mut out = v.clone();
        for b in basis {
            let bb = self.dot(b, b);
            let coef = self.dot(&out, b) / bb;
            out.axpy(-coef, b, 1.0);
        }
        out
    }

    /// Scales a spacelike vector to unit length.
    pub fn normalize_spacelike(&self, v: &AmbientVector) -> Option<AmbientVector> {
        let q = self.dot(v, v);
        if q > 0.0 && q.is_finite() {
            Some(v / q.sqrt())
        } else {
            None
        }
    }

    /// Checks that `v` plays `role`; tangents are checked against `base`.
    pub fn check(
        &self,
        v: &AmbientVector,
        role: Role,
        base: Option<&AmbientVector>,
        tol: f64,
    ) -> Result<()> {
        match role {
            Role::Free => Ok(()),
            Role::PointOnHyperquadric => {
                if !self.form.is_curved() {
                    return Ok(());
                }
                let r = self.dot(v, v) - self.form.c();
                if r.abs() > tol {
                    return Err(GeomError::InvalidInput(format!(
                        "point off the hyperquadric (residual {r:.3e})"
                    )));
                }
                if self.form == SpaceForm::Hyperbolic && v[v.len() - 1] <= 0.0 {
                    return Err(GeomError::InvalidInput(
                        "point on the lower sheet of the hyperboloid".into(),
                    ));
                }
                Ok(())
            }
            Role::Tangent => {
                let p = base.ok_or_else(|| {
                    GeomError::InvalidInput("tangent check needs a base point".into())
                })?;
                let r = self.inner(v, p)?;
                if self.form.is_curved() && r.abs() > tol {
                    return Err(GeomError::InvalidInput(format!(
                        "vector not tangent at the base point (residual {r:.3e})"
                    )));
                }
                Ok(())
            }
        }
    }
}

/// `<u,v>` for the space form `form`.
pub fn inner(u: &AmbientVector, v: &AmbientVector, form: SpaceForm) -> Result<f64> {
    Metric::new(form).inner(u, v)
}

/// Rescales `p` radially onto the hyperquadric `<q,q> = c`.
pub fn project_to_hyperquadric(p: &AmbientVector, form: SpaceForm) -> Result<AmbientVector> {
    let metric = Metric::new(form);
    let q = metric.norm_sq(p);
    match form {
        SpaceForm::Euclidean => Err(GeomError::Projection(
            "the flat model has no hyperquadric".into(),
        )),
        SpaceForm::Spherical if q > 0.0 => Ok(p / q.sqrt()),
        SpaceForm::Hyperbolic if q < 0.0 => {
            if p[p.len() - 1] <= 0.0 {
                return Err(GeomError::Projection(
                    "vector points into the lower sheet".into(),
                ));
            }
            Ok(p / (-q).sqrt())
        }
        _ => Err(GeomError::Projection(format!(
            "<p,p> = {q:.3e} has the wrong sign for c = {form}"
        ))),
    }
}

/// Totally umbilical hypersurface types.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum SurfaceKind {
    TotallyGeodesicPlane,
    EquidistantSurface,
    Horosphere,
    GeodesicSphereH3,
    TotallyGeodesicSphere,
    GeodesicSphereS3,
    /// Higher-dimensional totally geodesic hypersurface (`n > 2`).
    TotallyGeodesicHypersurface,
    /// Higher-dimensional non-geodesic umbilical hypersurface (`n > 2`).
    UmbilicalHypersurface,
}

impl SurfaceKind {
    pub fn is_totally_geodesic(self) -> bool {
        matches!(
            self,
            SurfaceKind::TotallyGeodesicPlane
                | SurfaceKind::TotallyGeodesicSphere
                | SurfaceKind::TotallyGeodesicHypersurface
        )
    }
}

/// `U_{a,σ} = { p on the hyperquadric : <p,a> = σ }` with `<a,a> = ε ∈ {-1,0,1}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct UmbilicalSurface {
    pub c: SpaceForm,
    #[serde(with = "vector_serde")]
    pub a: AmbientVector,
    pub sigma: f64,
    pub kind: SurfaceKind,
    #[serde(rename = "H")]
    pub mean_curvature: f64,
    pub epsilon: i8,
    pub lambda: f64,
    #[serde(rename = "K_ext")]
    pub extrinsic_curvature: f64,
    #[serde(rename = "K")]
    pub intrinsic_curvature: f64,
}

impl UmbilicalSurface {
    pub fn dim(&self) -> usize {
        self.a.len()
    }

    pub fn metric(&self) -> Metric {
        Metric::new(self.c)
    }

    /// Builds a horosphere from an almost-null normal, snapping it onto the light cone
    /// and rescaling to the `σ = -1` convention.
    pub fn horosphere_from_near_null(b: &AmbientVector, sigma: f64) -> Result<Self> {
        let n = b.len();
        let spatial = b.rows(0, n - 1).norm();
        if spatial == 0.0 || sigma == 0.0 {
            return Err(GeomError::InvalidSurface(
                "a horosphere needs a non-zero null normal and σ ≠ 0".into(),
            ));
        }
        let mut a = b.clone();
        a[n - 1] = b[n - 1].signum() * spatial;
        finish_null(a, sigma, SpaceForm::Hyperbolic)
    }
}

/// Normalizes `(a, σ)` and classifies the resulting umbilical hypersurface.
pub fn classify_surface(a: &AmbientVector, sigma: f64, form: SpaceForm) -> Result<UmbilicalSurface> {
    if !form.is_curved() {
        return Err(GeomError::InvalidSurface(
            "classification is defined for c = ±1 only".into(),
        ));
    }
    if a.len() < 4 {
        return Err(GeomError::InvalidInput(format!(
            "ambient dimension must be at least 4, got {}",
            a.len()
        )));
    }
    let scale = a.norm();
    if scale == 0.0 || !scale.is_finite() || !sigma.is_finite() {
        return Err(GeomError::InvalidSurface("normal vector must be non-zero and finite".into()));
    }
    let metric = Metric::new(form);
    let q = metric.norm_sq(a);
    if q.abs() < NULL_TOL * scale * scale {
        if form == SpaceForm::Spherical {
            return Err(GeomError::InvalidSurface("null normal in S^{n+1}".into()));
        }
        if sigma == 0.0 {
            return Err(GeomError::InvalidSurface(
                "null hyperplane through the origin misses H^{n+1}".into(),
            ));
        }
        return finish_null(a.clone(), sigma, form);
    }
    let k = 1.0 / q.abs().sqrt();
    let a = a * k;
    let mut sigma = sigma * k;
    if sigma.abs() < 1e-12 {
        sigma = 0.0;
    }
    let epsilon: i8 = if q > 0.0 { 1 } else { -1 };
    let higher = a.len() > 4;
    let (kind, lambda, h, k_ext, k_int) = match form {
        SpaceForm::Spherical => {
            if sigma.abs() >= 1.0 {
                return Err(GeomError::InvalidSurface(format!(
                    "S^{{n+1}} requires |σ| < 1, got {sigma}"
                )));
            }
            let lambda = 1.0 / (1.0 - sigma * sigma).sqrt();
            let h = sigma * lambda;
            let kind = match (higher, sigma == 0.0) {
                (true, true) => SurfaceKind::TotallyGeodesicHypersurface,
                (true, false) => SurfaceKind::UmbilicalHypersurface,
                (false, true) => SurfaceKind::TotallyGeodesicSphere,
                (false, false) => SurfaceKind::GeodesicSphereS3,
            };
            (kind, lambda, h, h * h, 1.0 / (1.0 - sigma * sigma))
        }
        SpaceForm::Hyperbolic => {
            let kind = if epsilon == 1 {
                match (higher, sigma == 0.0) {
                    (true, true) => SurfaceKind::TotallyGeodesicHypersurface,
                    (true, false) => SurfaceKind::UmbilicalHypersurface,
                    (false, true) => SurfaceKind::TotallyGeodesicPlane,
                    (false, false) => SurfaceKind::EquidistantSurface,
                }
            } else {
                if sigma.abs() <= 1.0 {
                    return Err(GeomError::InvalidSurface(format!(
                        "geodesic spheres need |σ| > 1 for a timelike normal, got {sigma}"
                    )));
                }
                if higher {
                    SurfaceKind::UmbilicalHypersurface
                } else {
                    SurfaceKind::GeodesicSphereH3
                }
            };
            let d = epsilon as f64 + sigma * sigma;
            let lambda = 1.0 / d.sqrt();
            let k_ext = sigma * sigma / d;
            (kind, lambda, lambda * sigma, k_ext, k_ext - 1.0)
        }
        SpaceForm::Euclidean => unreachable!(),
    };
    Ok(UmbilicalSurface {
        c: form,
        a,
        sigma,
        kind,
        mean_curvature: h,
        epsilon,
        lambda,
        extrinsic_curvature: k_ext,
        intrinsic_curvature: k_int,
    })
}

fn finish_null(a: AmbientVector, sigma: f64, form: SpaceForm) -> Result<UmbilicalSurface> {
    // σ = -1 convention: <p, a'> = -1 with a' = -a/σ.
    let a = a * (-1.0 / sigma);
    let sigma = -1.0;
    let kind = if a.len() > 4 {
        SurfaceKind::UmbilicalHypersurface
    } else {
        SurfaceKind::Horosphere
    };
    Ok(UmbilicalSurface {
        c: form,
        a,
        sigma,
        kind,
        mean_curvature: -1.0,
        epsilon: 0,
        lambda: 1.0,
        extrinsic_curvature: 1.0,
        intrinsic_curvature: 0.0,
    })
}

fn on_surface_tol(s: &UmbilicalSurface, p: &AmbientVector) -> f64 {
    TOL_CONSTRAINT * (1.0 + p.norm() * s.a.norm())
}

/// Unit normal of `S` at `p`.
pub fn surface_normal(s: &UmbilicalSurface, p: &AmbientVector) -> Result<AmbientVector> {
    let residual = membership_residual(s, p)?;
    if residual.abs() > on_surface_tol(s, p) {
        return Err(GeomError::NotOnSurface { residual });
    }
    match s.c {
        SpaceForm::Hyperbolic => Ok((&s.a + p * s.sigma) * (-s.lambda)),
        SpaceForm::Spherical => Ok((&s.a - p * s.sigma) / (1.0 - s.sigma * s.sigma).sqrt()),
        SpaceForm::Euclidean => unreachable!("surfaces are only built for c = ±1"),
    }
}

/// `<p,a> - σ`; vanishes exactly on the surface.
pub fn membership_residual(s: &UmbilicalSurface, p: &AmbientVector) -> Result<f64> {
    Ok(s.metric().inner(p, &s.a)? - s.sigma)
}

/// Hyperquadric → upper half-space: `(x_1, ..., x_n, 1) / (x_{n+1} + x_{n+2})`.
pub fn to_upper_halfspace(p: &AmbientVector) -> Result<Vec<f64>> {
    let m = p.len();
    if m < 3 {
        return Err(GeomError::InvalidInput("point too short for the chart".into()));
    }
    let d = p[m - 2] + p[m - 1];
    if d <= 0.0 || !d.is_finite() {
        return Err(GeomError::OutOfChart(d));
    }
    let mut out: Vec<f64> = p.iter().take(m - 2).map(|x| x / d).collect();
    out.push(1.0 / d);
    Ok(out)
}

/// Inverse of [`to_upper_halfspace`]; the last coordinate is the height `z > 0`.
pub fn from_upper_halfspace(coords: &[f64]) -> Result<AmbientVector> {
    let k = coords.len();
    if k < 2 {
        return Err(GeomError::InvalidInput("need at least two chart coordinates".into()));
    }
    let z = coords[k - 1];
    if z <= 0.0 || !z.is_finite() {
        return Err(GeomError::InvalidInput(format!("height must be positive, got {z}")));
    }
    let d = 1.0 / z;
    let mut p = DVector::zeros(k + 1);
    let mut sq = 0.0;
    for i in 0..k - 1 {
        p[i] = coords[i] * d;
        sq += p[i] * p[i];
    }
    // (x3 - x4)(x3 + x4) = -1 - |x'|^2
    let diff = -(1.0 + sq) / d;
    p[k - 1] = 0.5 * (d + diff);
    p[k] = 0.5 * (d - diff);
    Ok(p)
}

/// A linear map of `R^{n+2}` preserving the form.
#[derive(Debug, Clone, PartialEq)]
pub struct Isometry {
    pub form: SpaceForm,
    pub matrix: DMatrix<f64>,
}

impl Isometry {
    pub fn identity(form: SpaceForm, dim: usize) -> Self {
        Isometry {
            form,
            matrix: DMatrix::identity(dim, dim),
        }
    }

    pub fn apply(&self, v: &AmbientVector) -> AmbientVector {
        &self.matrix * v
    }

    pub fn compose(&self, other: &Isometry) -> Isometry {
        Isometry {
            form: self.form,
            matrix: &self.matrix * &other.matrix,
        }
    }
}

fn plane_rotation(dim: usize, i: usize, j: usize, angle: f64) -> DMatrix<f64> {
    let mut m = DMatrix::identity(dim, dim);
    let (s, c) = angle.sin_cos();
    m[(i, i)] = c;
    m[(j, j)] = c;
    m[(i, j)] = -s;
    m[(j, i)] = s;
    m
}

fn boost(dim: usize, i: usize, rapidity: f64) -> DMatrix<f64> {
    let mut m = DMatrix::identity(dim, dim);
    let t = dim - 1;
    let (ch, sh) = (rapidity.cosh(), rapidity.sinh());
    m[(i, i)] = ch;
    m[(t, t)] = ch;
    m[(i, t)] = sh;
    m[(t, i)] = sh;
    m
}

/// Deterministic rigid motion of the model, composed from coordinate-plane
/// rotations and (for `c = -1`) boosts. Seed 0 is the identity.
pub fn random_isometry(form: SpaceForm, dim: usize, seed: u64) -> Isometry {
    if seed == 0 || dim < 2 {
        return Isometry::identity(form, dim);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut m = DMatrix::identity(dim, dim);
    // Rotations of the spacelike block; for c = +1 (and c = 0) every axis is spacelike.
    let rot_dim = if form == SpaceForm::Hyperbolic { dim - 1 } else { dim };
    if rot_dim >= 2 {
        for _ in 0..6 {
            let i = rng.random_range(0..rot_dim);
            let mut j = rng.random_range(0..rot_dim - 1);
            if j >= i {
                j += 1;
            }
            let angle = rng.random_range(-std::f64::consts::PI..std::f64::consts::PI);
            m = plane_rotation(dim, i, j, angle) * m;
        }
    }
    if form == SpaceForm::Hyperbolic {
        for _ in 0..3 {
            let i = rng.random_range(0..dim - 1);
            let rapidity = rng.random_range(-0.5..0.5);
            m = boost(dim, i, rapidity) * m;
        }
    }
    Isometry { form, matrix: m }
}

pub(crate) mod vector_serde {
    use nalgebra::DVector;
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(v: &DVector<f64>, s: S) -> Result<S::Ok, S::Error> {
        s.collect_seq(v.iter())
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<DVector<f64>, D::Error> {
        Ok(DVector::from_vec(Vec::<f64>::deserialize(d)?))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use proptest::prelude::*;

    fn v(xs: &[f64]) -> AmbientVector {
        DVector::from_column_slice(xs)
    }

    const SQRT2: f64 = std::f64::consts::SQRT_2;

    #[test]
    fn inner_examples() {
        let h = SpaceForm::Hyperbolic;
        assert_eq!(inner(&v(&[0., 0., 0., 1.]), &v(&[0., 0., 0., 1.]), h).unwrap(), -1.0);
        assert_eq!(inner(&v(&[1., 0., 0., 0.]), &v(&[1., 0., 0., 0.]), h).unwrap(), 1.0);
        let p = v(&[0., 0., 1., SQRT2]);
        assert_abs_diff_eq!(inner(&p, &p, h).unwrap(), -1.0, epsilon = 1e-15);
        assert!(matches!(
            inner(&v(&[1., 0., 0.]), &p, h),
            Err(GeomError::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn projection_examples() {
        let q = project_to_hyperquadric(&v(&[0., 0., 0., 2.]), SpaceForm::Hyperbolic).unwrap();
        assert_eq!(q, v(&[0., 0., 0., 1.]));
        let q = project_to_hyperquadric(&v(&[2., 0., 0., 0.]), SpaceForm::Spherical).unwrap();
        assert_eq!(q, v(&[1., 0., 0., 0.]));
        let p = v(&[0., 0., 1., SQRT2]);
        let q = project_to_hyperquadric(&p, SpaceForm::Hyperbolic).unwrap();
        assert_abs_diff_eq!((q - p).amax(), 0.0, epsilon = 1e-15);
        assert!(project_to_hyperquadric(&v(&[1., 0., 0., 0.]), SpaceForm::Hyperbolic).is_err());
        assert!(project_to_hyperquadric(&v(&[0., 0., 0., -2.]), SpaceForm::Hyperbolic).is_err());
        assert!(project_to_hyperquadric(&v(&[0., 0., 0., 0.]), SpaceForm::Spherical).is_err());
    }

    #[test]
    fn classify_examples() {
        let horo = classify_surface(&v(&[0., 0., 1., -1.]), 1.0, SpaceForm::Hyperbolic).unwrap();
        assert_eq!(horo.kind, SurfaceKind::Horosphere);
        assert_eq!(horo.epsilon, 0);
        assert_eq!(horo.sigma, -1.0);
        assert_abs_diff_eq!(horo.mean_curvature.abs(), 1.0);

        let s3 = classify_surface(&v(&[0., 0., 0., 1.]), 0.5, SpaceForm::Spherical).unwrap();
        assert_eq!(s3.kind, SurfaceKind::GeodesicSphereS3);
        assert_abs_diff_eq!(s3.mean_curvature, 1.0 / 3f64.sqrt(), epsilon = 1e-15);
        // radius of the sphere is sqrt(1 - σ²)
        assert_abs_diff_eq!((1.0 - s3.sigma * s3.sigma).sqrt(), 3f64.sqrt() / 2.0, epsilon = 1e-15);

        let plane = classify_surface(&v(&[1., 0., 0., 0.]), 0.0, SpaceForm::Hyperbolic).unwrap();
        assert_eq!(plane.kind, SurfaceKind::TotallyGeodesicPlane);
        assert_eq!(plane.mean_curvature, 0.0);
    }

    #[test]
    fn classify_rejects_invalid() {
        let s = SpaceForm::Spherical;
        assert!(classify_surface(&v(&[0., 0., 0., 1.]), 1.0, s).is_err());
        assert!(classify_surface(&v(&[0., 0., 0., 2.]), 2.5, s).is_err());
        let h = SpaceForm::Hyperbolic;
        assert!(classify_surface(&v(&[0., 0., 0., 1.]), 0.5, h).is_err());
        assert!(classify_surface(&v(&[0., 0., 0., 1.]), -1.0, h).is_err());
        assert!(classify_surface(&v(&[0., 0., 1., 1.]), 0.0, h).is_err());
        assert!(classify_surface(&v(&[0., 0., 0., 0.]), 1.0, h).is_err());
    }

    #[test]
    fn classify_h3_taxonomy_and_formulas() {
        let h = SpaceForm::Hyperbolic;
        let eq = classify_surface(&v(&[2., 0., 0., 0.]), 3.0, h).unwrap();
        assert_eq!(eq.kind, SurfaceKind::EquidistantSurface);
        assert_abs_diff_eq!(eq.sigma, 1.5);
        assert_abs_diff_eq!(eq.mean_curvature, 1.5 / (1.0f64 + 2.25).sqrt(), epsilon = 1e-15);
        let sph = classify_surface(&v(&[0., 0., 0., 1.]), 2.0, h).unwrap();
        assert_eq!(sph.kind, SurfaceKind::GeodesicSphereH3);
        assert_eq!(sph.epsilon, -1);
        assert_abs_diff_eq!(1.0 / sph.mean_curvature.powi(2), 0.75, epsilon = 1e-14);
        assert_abs_diff_eq!(sph.intrinsic_curvature, sph.extrinsic_curvature - 1.0);
        assert_abs_diff_eq!(sph.intrinsic_curvature, -(-1.0) / (-1.0 + 4.0), epsilon = 1e-15);
        let hyper = classify_surface(&v(&[0., 0., 0., 0., 1.]), 0.5, SpaceForm::Spherical).unwrap();
        assert_eq!(hyper.kind, SurfaceKind::UmbilicalHypersurface);
    }

    #[test]
    fn normal_examples() {
        let h = SpaceForm::Hyperbolic;
        let m = Metric::new(h);
        let horo = classify_surface(&v(&[0., 0., 1., -1.]), 1.0, h).unwrap();
        let p = v(&[0., 0., 0., 1.]);
        let xi = surface_normal(&horo, &p).unwrap();
        assert_abs_diff_eq!(m.dot(&xi, &xi), 1.0, epsilon = 1e-14);
        assert_abs_diff_eq!(m.dot(&xi, &p), 0.0, epsilon = 1e-14);

        let great = classify_surface(&v(&[0., 0., 0., 1.]), 0.0, SpaceForm::Spherical).unwrap();
        let xi = surface_normal(&great, &v(&[1., 0., 0., 0.])).unwrap();
        assert_eq!(xi, v(&[0., 0., 0., 1.]));

        let s3 = classify_surface(&v(&[0., 0., 0., 1.]), 0.5, SpaceForm::Spherical).unwrap();
        let p = v(&[3f64.sqrt() / 2.0, 0., 0., 0.5]);
        let xi = surface_normal(&s3, &p).unwrap();
        let expected = (v(&[0., 0., 0., 1.]) - v(&[3f64.sqrt() / 4.0, 0., 0., 0.25])) / 0.75f64.sqrt();
        assert_abs_diff_eq!((&xi - expected).amax(), 0.0, epsilon = 1e-15);
        assert_abs_diff_eq!(xi.norm_squared(), 1.0, epsilon = 1e-14);
        assert_abs_diff_eq!(xi.dot(&p), 0.0, epsilon = 1e-14);

        assert!(matches!(
            surface_normal(&s3, &v(&[1., 0., 0., 0.])),
            Err(GeomError::NotOnSurface { .. })
        ));
    }

    #[test]
    fn membership_examples() {
        let horo = classify_surface(&v(&[0., 0., 1., -1.]), 1.0, SpaceForm::Hyperbolic).unwrap();
        assert_eq!(membership_residual(&horo, &v(&[0., 0., 0., 1.])).unwrap(), 0.0);
        let great = classify_surface(&v(&[0., 0., 0., 1.]), 0.0, SpaceForm::Spherical).unwrap();
        assert_eq!(membership_residual(&great, &v(&[0.6, 0.8, 0., 0.])).unwrap(), 0.0);
        let s3 = classify_surface(&v(&[0., 0., 0., 1.]), 0.5, SpaceForm::Spherical).unwrap();
        assert_eq!(membership_residual(&s3, &v(&[1., 0., 0., 0.])).unwrap(), -0.5);
    }

    #[test]
    fn chart_examples() {
        assert_eq!(to_upper_halfspace(&v(&[0., 0., 0., 1.])).unwrap(), vec![0., 0., 1.]);
        let z = to_upper_halfspace(&v(&[0.3, -0.2, 0.4, 0.6])).unwrap()[2];
        assert_eq!(z, 1.0);
        let u = to_upper_halfspace(&v(&[0., 0., 1., SQRT2])).unwrap();
        assert_abs_diff_eq!(u[2], 1.0 / (1.0 + SQRT2), epsilon = 1e-15);
        assert!(matches!(
            to_upper_halfspace(&v(&[0., 0., -1., 1.])),
            Err(GeomError::OutOfChart(_))
        ));
        assert_eq!(from_upper_halfspace(&[0., 0., 1.]).unwrap(), v(&[0., 0., 0., 1.]));
        assert_eq!(from_upper_halfspace(&[1., 0., 1.]).unwrap(), v(&[1., 0., -0.5, 1.5]));
        assert!(from_upper_halfspace(&[1., 0., 0.]).is_err());
    }

    #[test]
    fn identity_seed() {
        let iso = random_isometry(SpaceForm::Hyperbolic, 4, 0);
        assert_eq!(iso.matrix, DMatrix::identity(4, 4));
    }

    proptest! {
        #[test]
        fn inner_is_symmetric(u in prop::collection::vec(-10.0..10.0f64, 4), w in prop::collection::vec(-10.0..10.0f64, 4), c in -1i64..=1) {
            let form = SpaceForm::from_sign(c).unwrap();
            let (u, w) = (v(&u), v(&w));
            prop_assert_eq!(inner(&u, &w, form).unwrap(), inner(&w, &u, form).unwrap());
        }

        #[test]
        fn projection_is_idempotent(x in prop::collection::vec(-3.0..3.0f64, 3), t in 0.1..5.0f64) {
            let spatial = x[0] * x[0] + x[1] * x[1] + x[2] * x[2];
            let p = v(&[x[0], x[1], x[2], (1.0 + spatial).sqrt() * t.max(1.0) + 0.1]);
            let q = project_to_hyperquadric(&p, SpaceForm::Hyperbolic).unwrap();
            let r = project_to_hyperquadric(&q, SpaceForm::Hyperbolic).unwrap();
            prop_assert!((&q - &r).amax() <= 1e-13 * q.amax());
        }

        #[test]
        fn chart_round_trip(x in -5.0..5.0f64, y in -5.0..5.0f64, z in 0.05..20.0f64) {
            let p = from_upper_halfspace(&[x, y, z]).unwrap();
            let m = Metric::new(SpaceForm::Hyperbolic);
            prop_assert!((m.norm_sq(&p) + 1.0).abs() < 1e-9 * (1.0 + p.norm_squared()));
            prop_assert!(p[3] > 0.0);
            let back = to_upper_halfspace(&p).unwrap();
            for (a, b) in back.iter().zip([x, y, z]) {
                prop_assert!((a - b).abs() <= 1e-12 * (1.0 + b.abs()));
            }
        }

        #[test]
        fn isometries_preserve_the_form(seed in 1u64..10_000, c in prop::sample::select(vec![-1i64, 1]),
                                       u in prop::collection::vec(-2.0..2.0f64, 4), w in prop::collection::vec(-2.0..2.0f64, 4)) {
            let form = SpaceForm::from_sign(c).unwrap();
            let iso = random_isometry(form, 4, seed);
            let (u, w) = (v(&u), v(&w));
            let m = Metric::new(form);
            let before = m.dot(&u, &w);
            let after = m.dot(&iso.apply(&u), &iso.apply(&w));
            prop_assert!((before - after).abs() < 1e-12, "{} vs {}", before, after);
            if form == SpaceForm::Hyperbolic {
                let p = v(&[0.0, 0.0, 0.0, 1.0]);
                prop_assert!(iso.apply(&p)[3] > 0.0);
            }
        }

        #[test]
        fn classification_is_isometry_invariant(seed in 1u64..10_000, sigma in 1.05..3.0f64, which in 0usize..3) {
            let form = SpaceForm::Hyperbolic;
            let a = match which {
                0 => v(&[1.0, 0.0, 0.0, 0.0]),
                1 => v(&[0.0, 0.0, 1.0, -1.0]),
                _ => v(&[0.0, 0.0, 0.0, 1.0]),
            };
            let iso = random_isometry(form, 4, seed);
            let s1 = classify_surface(&a, sigma, form).unwrap();
            let s2 = classify_surface(&iso.apply(&a), sigma, form).unwrap();
            prop_assert_eq!(s1.kind, s2.kind);
            prop_assert!((s1.mean_curvature - s2.mean_curvature).abs() < 1e-9);
            prop_assert!((s1.extrinsic_curvature - s2.extrinsic_curvature).abs() < 1e-9);
            prop_assert!((s1.intrinsic_curvature - s2.intrinsic_curvature).abs() < 1e-9);
            prop_assert!((s1.mean_curvature.powi(2) - s1.extrinsic_curvature).abs() < 1e-12);
        }

        #[test]
        fn normal_is_unit_and_tangent(sigma in -0.95..0.95f64, theta in 0.0..std::f64::consts::TAU) {
            let s = classify_surface(&v(&[0.0, 0.0, 0.0, 1.0]), sigma, SpaceForm::Spherical).unwrap();
            let r = (1.0 - sigma * sigma).sqrt();
            let p = v(&[r * theta.cos(), r * theta.sin(), 0.0, sigma]);
            let xi = surface_normal(&s, &p).unwrap();
            prop_assert!((xi.norm_squared() - 1.0).abs() < 1e-10);
            prop_assert!(xi.dot(&p).abs() < 1e-10);
            prop_assert!((s.mean_curvature.powi(2) - s.extrinsic_curvature).abs() < 1e-12);
        }
    }
}
