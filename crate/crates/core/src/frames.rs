//! Frenet and rotation-minimizing frames of sampled arc-length curves.
//!
//! The Levi-Civita connection of the model is the tangential part of the
//! ambient derivative: along a unit-speed curve `∇_T T = α'' + c α`, which we
//! evaluate as `α''` minus its component along `α`. All derivatives are
//! second-order finite differences on the uniform arc-length grid.

use nalgebra::{DVector, Matrix3};

use crate::error::{GeomError, Result};
use crate::par::Execution;
use crate::spaceform::{AmbientVector, Isometry, Metric, SpaceForm, TOL_CONSTRAINT};
use crate::stencil;

/// Default lower bound on κ below which the Frenet frame is rejected.
pub const KAPPA_MIN: f64 = 1e-4;

/// Tolerance on unit speed after arc-length resampling.
pub const TOL_ARCLENGTH: f64 = 1e-6;

/// Relative tolerance on the uniformity of the arc-length grid.
const GRID_TOL: f64 = 1e-6;

/// An arc-length parametrized curve sampled on a uniform grid.
#[derive(Debug, Clone, PartialEq)]
pub struct SampledCurve {
    form: SpaceForm,
    s0: f64,
    ds: f64,
    points: Vec<AmbientVector>,
}

impl SampledCurve {
    /// Builds a curve from points at `s0, s0 + ds, ...`.
    pub fn new(form: SpaceForm, s0: f64, ds: f64, points: Vec<AmbientVector>) -> Result<Self> {
        if points.len() < 4 {
            return Err(GeomError::InvalidInput(format!(
                "a curve needs at least 4 samples, got {}",
                points.len()
            )));
        }
        if !(ds > 0.0 && ds.is_finite()) {
            return Err(GeomError::InvalidInput(format!("step must be positive, got {ds}")));
        }
        let dim = points[0].len();
        let min_dim = if form.is_curved() { 4 } else { 3 };
        if dim < min_dim {
            return Err(GeomError::InvalidInput(format!(
                "ambient dimension {dim} too small for c = {form}"
            )));
        }
        let metric = Metric::new(form);
        for (i, p) in points.iter().enumerate() {
            if p.len() != dim {
                return Err(GeomError::DimensionMismatch {
                    expected: dim,
                    found: p.len(),
                });
            }
            if p.iter().any(|x| !x.is_finite()) {
                return Err(GeomError::InvalidInput(format!("non-finite coordinate at sample {i}")));
            }
            if form.is_curved() {
                let r = metric.norm_sq(p) - form.c();
                if r.abs() > TOL_CONSTRAINT * (1.0 + p.norm_squared()) {
                    return Err(GeomError::InvalidInput(format!(
                        "sample {i} is off the hyperquadric (residual {r:.3e})"
                    )));
                }
                if form == SpaceForm::Hyperbolic && p[dim - 1] <= 0.0 {
                    return Err(GeomError::InvalidInput(format!(
                        "sample {i} lies on the lower sheet"
                    )));
                }
            }
        }
        Ok(SampledCurve {
            form,
            s0,
            ds,
            points,
        })
    }

    /// Builds a curve from explicit parameter values, which must be uniformly spaced.
    pub fn from_samples(form: SpaceForm, s: &[f64], points: Vec<AmbientVector>) -> Result<Self> {
        if s.len() != points.len() {
            return Err(GeomError::InvalidInput(format!(
                "{} parameter values for {} points",
                s.len(),
                points.len()
            )));
        }
        if s.len() < 2 {
            return Err(GeomError::InvalidInput("a curve needs at least 4 samples".into()));
        }
        let ds = (s[s.len() - 1] - s[0]) / (s.len() - 1) as f64;
        for (i, w) in s.windows(2).enumerate() {
            let step = w[1] - w[0];
            if step <= 0.0 {
                return Err(GeomError::InvalidInput(format!(
                    "arc length not strictly increasing at sample {}",
                    i + 1
                )));
            }
            if (step - ds).abs() > GRID_TOL * ds.abs().max(1e-300) + 1e-12 * s[i + 1].abs() {
                return Err(GeomError::InvalidInput(format!(
                    "non-uniform arc-length spacing at sample {}",
                    i + 1
                )));
            }
        }
        SampledCurve::new(form, s[0], ds, points)
    }

    pub fn form(&self) -> SpaceForm {
        self.form
    }

    pub fn metric(&self) -> Metric {
        Metric::new(self.form)
    }

    pub fn dim(&self) -> usize {
        self.points[0].len()
    }

    /// Number of normal directions: `n` for a curve in `M^{n+1}(c)`.
    pub fn normal_count(&self) -> usize {
        if self.form.is_curved() {
            self.dim() - 2
        } else {
            self.dim() - 1
        }
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn ds(&self) -> f64 {
        self.ds
    }

    pub fn s0(&self) -> f64 {
        self.s0
    }

    pub fn s(&self, i: usize) -> f64 {
        self.s0 + i as f64 * self.ds
    }

    pub fn s_values(&self) -> Vec<f64> {
        (0..self.len()).map(|i| self.s(i)).collect()
    }

    pub fn points(&self) -> &[AmbientVector] {
        &self.points
    }

    pub fn point(&self, i: usize) -> &AmbientVector {
        &self.points[i]
    }

    /// Applies a rigid motion to every sample.
    pub fn transformed(&self, iso: &Isometry) -> Result<SampledCurve> {
        let points = self.points.iter().map(|p| iso.apply(p)).collect();
        SampledCurve::new(self.form, self.s0, self.ds, points)
    }

    /// Sub-curve of samples whose parameter lies in `[lo, hi]`.
    pub fn window(&self, lo: f64, hi: f64) -> Result<SampledCurve> {
        let first = ((lo - self.s0) / self.ds - 1e-9).ceil().max(0.0) as usize;
        let last = (((hi - self.s0) / self.ds + 1e-9).floor() as isize).min(self.len() as isize - 1);
        if last < first as isize + 3 {
            return Err(GeomError::InvalidInput(format!(
                "window [{lo}, {hi}] holds fewer than 4 samples"
            )));
        }
        let points = self.points[first..=last as usize].to_vec();
        SampledCurve::new(self.form, self.s(first), self.ds, points)
    }

    /// Largest deviation of chord length per step from `ds`, relative to `ds`.
    pub fn max_speed_deviation(&self) -> f64 {
        let m = self.metric();
        self.points
            .windows(2)
            .map(|w| {
                let d = &w[1] - &w[0];
                (m.norm_sq(&d).max(0.0).sqrt() / self.ds - 1.0).abs()
            })
            .fold(0.0, f64::max)
    }

    /// Largest `|<p,p> - c|` over the samples.
    pub fn max_constraint_residual(&self) -> f64 {
        if !self.form.is_curved() {
            return 0.0;
        }
        let m = self.metric();
        self.points
            .iter()
            .map(|p| (m.norm_sq(p) - self.form.c()).abs())
            .fold(0.0, f64::max)
    }
}

/// Unit tangent at sample `i`, re-orthogonalized against the position vector.
fn unit_tangent(curve: &SampledCurve, i: usize) -> AmbientVector {
    let m = curve.metric();
    let p = &curve.points[i];
    let mut t = stencil::vector_derivative_at(&curve.points, i, curve.ds);
    if curve.form.is_curved() {
        t = m.orthogonalize(&t, &[p]);
    }
    let q = m.norm_sq(&t);
    t / q.max(f64::MIN_POSITIVE).sqrt()
}

/// `α''` at sample `i` with the component along `α` removed (the covariant acceleration).
fn tangential_accel(curve: &SampledCurve, i: usize) -> AmbientVector {
    let acc = stencil::vector_second_derivative_at(&curve.points, i, curve.ds);
    if curve.form.is_curved() {
        curve.metric().orthogonalize(&acc, &[&curve.points[i]])
    } else {
        acc
    }
}

/// `∇_T T` at an interior sample: the tangential part of `α''`, i.e. `α'' + cα`.
pub fn covariant_accel(curve: &SampledCurve, i: usize) -> Result<AmbientVector> {
    if i == 0 || i + 1 >= curve.len() {
        return Err(GeomError::Stencil(format!(
            "sample {i} has no central stencil (curve has {} samples)",
            curve.len()
        )));
    }
    Ok(tangential_accel(curve, i))
}

/// Per-sample Frenet apparatus, stored column-wise.
#[derive(Debug, Clone, PartialEq)]
pub struct FrenetData {
    pub form: SpaceForm,
    pub ds: f64,
    pub s: Vec<f64>,
    pub tangent: Vec<AmbientVector>,
    pub normal: Vec<AmbientVector>,
    pub binormal: Vec<AmbientVector>,
    pub kappa: Vec<f64>,
    pub tau: Vec<f64>,
    pub kappa_prime: Vec<f64>,
    /// Samples whose values depend on one-sided stencils.
    pub low_confidence: Vec<bool>,
}

impl FrenetData {
    pub fn len(&self) -> usize {
        self.s.len()
    }

    pub fn is_empty(&self) -> bool {
        self.s.is_empty()
    }

    /// Indices computed from central stencils only.
    pub fn trusted(&self) -> impl Iterator<Item = usize> + '_ {
        (0..self.len()).filter(|&i| !self.low_confidence[i])
    }
}

#[derive(Debug, Clone, Copy)]
pub struct FrenetOptions {
    pub kappa_min: f64,
    pub execution: Execution,
}

impl Default for FrenetOptions {
    fn default() -> Self {
        FrenetOptions {
            kappa_min: KAPPA_MIN,
            execution: Execution::default(),
        }
    }
}

/// Metric-orthogonal completion of three vectors in `R^4`, oriented so that
/// `det[u, v, w, result] > 0`.
pub(crate) fn completion4(metric: &Metric, u: &AmbientVector, v: &AmbientVector, w: &AmbientVector) -> AmbientVector {
    let mut cof = DVector::zeros(4);
    for j in 0..4 {
        let cols: Vec<usize> = (0..4).filter(|&k| k != j).collect();
        let minor = Matrix3::from_fn(|r, c| {
            let row = match r {
                0 => u,
                1 => v,
                _ => w,
            };
            row[cols[c]]
        });
        let sign = if (3 + j) % 2 == 0 { 1.0 } else { -1.0 };
        cof[j] = sign * minor.determinant();
    }
    // Raise the index so that <B, x> = det[u, v, w, x].
    if metric.form.is_curved() {
        cof[3] *= metric.form.c();
    }
    cof
}

fn cross3(u: &AmbientVector, v: &AmbientVector) -> AmbientVector {
    DVector::from_vec(vec![
        u[1] * v[2] - u[2] * v[1],
        u[2] * v[0] - u[0] * v[2],
        u[0] * v[1] - u[1] * v[0],
    ])
}

pub fn frenet_apparatus(curve: &SampledCurve) -> Result<FrenetData> {
    frenet_apparatus_with(curve, &FrenetOptions::default())
}

/// Frenet frame, curvature, torsion and `κ'` of a curve in a three-dimensional space form.
///
/// `B` completes `{α, T, N}` (or `{T, N}` when `c = 0`) with positive
/// orientation, and `τ = <∇_T N, B>`.
pub fn frenet_apparatus_with(curve: &SampledCurve, opts: &FrenetOptions) -> Result<FrenetData> {
    let n = curve.len();
    let expected_dim = if curve.form.is_curved() { 4 } else { 3 };
    if curve.dim() != expected_dim {
        return Err(GeomError::InvalidInput(format!(
            "Frenet frames need a three-dimensional space form (ambient dimension {expected_dim}), got {}",
            curve.dim()
        )));
    }
    if n < 5 {
        return Err(GeomError::Stencil(format!("need at least 5 samples, got {n}")));
    }
    let metric = curve.metric();
    let exec = opts.execution;

    let first_pass: Vec<(AmbientVector, AmbientVector, f64)> = exec.map_indices(n, |i| {
        let t = unit_tangent(curve, i);
        let acc = tangential_accel(curve, i);
        let acc_perp = metric.orthogonalize(&acc, &[&t]);
        let kappa = metric.norm_sq(&acc_perp).max(0.0).sqrt();
        (t, acc_perp, kappa)
    });

    if let Some(first) = first_pass.iter().position(|x| !(x.2 >= opts.kappa_min)) {
        let last = first
            + first_pass[first..]
                .iter()
                .take_while(|x| !(x.2 >= opts.kappa_min))
                .count()
            - 1;
        return Err(GeomError::GeodesicPoint {
            first,
            last,
            kappa_min: opts.kappa_min,
        });
    }

    let mut tangent = Vec::with_capacity(n);
    let mut normal = Vec::with_capacity(n);
    let mut kappa = Vec::with_capacity(n);
    for (t, acc, k) in first_pass {
        normal.push(acc / k);
        tangent.push(t);
        kappa.push(k);
    }

    let mut binormal: Vec<AmbientVector> = exec.map_indices(n, |i| {
        let b = if curve.form.is_curved() {
            completion4(&metric, &curve.points[i], &tangent[i], &normal[i])
        } else {
            cross3(&tangent[i], &normal[i])
        };
        let q = metric.norm_sq(&b);
        b / q.sqrt()
    });
    for i in 1..n {
        if metric.dot(&binormal[i], &binormal[i - 1]) < 0.0 {
            binormal[i] = -&binormal[i];
        }
    }

    let ds = curve.ds;
    let tau = exec.map_indices(n, |i| {
        let dn = stencil::vector_derivative_at(&normal, i, ds);
        metric.dot(&dn, &binormal[i])
    });
    let kappa_prime = stencil::derivative(&kappa, ds)?;
    let low_confidence = (0..n).map(|i| i < 2 || i + 2 >= n).collect();

    Ok(FrenetData {
        form: curve.form,
        ds,
        s: curve.s_values(),
        tangent,
        normal,
        binormal,
        kappa,
        tau,
        kappa_prime,
        low_confidence,
    })
}

/// Rotation-minimizing frame data, stored column-wise.
#[derive(Debug, Clone, PartialEq)]
pub struct RMData {
    pub form: SpaceForm,
    pub ds: f64,
    pub s: Vec<f64>,
    pub tangent: Vec<AmbientVector>,
    /// `normals[i][k]` is `N_k` at sample `i`.
    pub normals: Vec<Vec<AmbientVector>>,
    /// `kappas[i][k] = <∇_T T, N_k>` at sample `i`.
    pub kappas: Vec<Vec<f64>>,
    pub low_confidence: Vec<bool>,
}

impl RMData {
    pub fn len(&self) -> usize {
        self.s.len()
    }

    pub fn is_empty(&self) -> bool {
        self.s.is_empty()
    }

    pub fn normal_count(&self) -> usize {
        self.normals.first().map_or(0, Vec::len)
    }

    /// Largest deviation of `{T, N_1, ..., N_n}` from an orthonormal set over all samples.
    pub fn max_orthonormality_defect(&self) -> f64 {
        let m = Metric::new(self.form);
        let mut worst: f64 = 0.0;
        for (t, ns) in self.tangent.iter().zip(&self.normals) {
            let frame: Vec<&AmbientVector> = std::iter::once(t).chain(ns.iter()).collect();
            for a in 0..frame.len() {
                for b in a..frame.len() {
                    let target = if a == b { 1.0 } else { 0.0 };
                    worst = worst.max((m.dot(frame[a], frame[b]) - target).abs());
                }
            }
        }
        worst
    }
}

/// Completes `{α, T}` (curved case) or `{T}` (flat case) with coordinate axes.
fn default_normal_frame(curve: &SampledCurve, p: &AmbientVector, t: &AmbientVector) -> Result<Vec<AmbientVector>> {
    let m = curve.metric();
    let want = curve.normal_count();
    let mut basis: Vec<AmbientVector> = Vec::with_capacity(want + 2);
    if curve.form.is_curved() {
        basis.push(p.clone());
    }
    basis.push(t.clone());
    let fixed = basis.len();
    let dim = curve.dim();
    // Prefer the axes least aligned with the existing vectors.
    let mut axes: Vec<(f64, usize)> = (0..dim)
        .map(|k| {
            let mut e = DVector::zeros(dim);
            e[k] = 1.0;
            let refs: Vec<&AmbientVector> = basis.iter().collect();
            let r = m.orthogonalize(&e, &refs);
            (m.norm_sq(&r), k)
        })
        .collect();
    axes.sort_by(|a, b| b.0.total_cmp(&a.0));
    for (_, k) in axes {
        if basis.len() - fixed == want {
            break;
        }
        let mut e = DVector::zeros(dim);
        e[k] = 1.0;
        let refs: Vec<&AmbientVector> = basis.iter().collect();
        let r = m.orthogonalize(&e, &refs);
        if m.norm_sq(&r) > 1e-6 {
            let r = m.orthogonalize(&r, &refs);
            basis.push(m.normalize_spacelike(&r).ok_or_else(|| {
                GeomError::Degenerate("could not complete the normal frame".into())
            })?);
        }
    }
    if basis.len() - fixed != want {
        return Err(GeomError::Degenerate("could not complete the normal frame".into()));
    }
    Ok(basis.split_off(fixed))
}

/// Projects `vs` onto the normal space of `{α, T}` and re-orthonormalizes them in order.
fn renormalize_normals(metric: &Metric, curved: bool, p: &AmbientVector, t: &AmbientVector, vs: &mut [AmbientVector]) -> Result<()> {
    let mut fixed: Vec<AmbientVector> = Vec::with_capacity(vs.len() + 2);
    if curved {
        fixed.push(p.clone());
    }
    fixed.push(t.clone());
    for v in vs.iter_mut() {
        let refs: Vec<&AmbientVector> = fixed.iter().collect();
        let r = metric.orthogonalize(v, &refs);
        let r = metric
            .normalize_spacelike(&r)
            .ok_or_else(|| GeomError::Degenerate("normal frame collapsed during transport".into()))?;
        *v = r.clone();
        fixed.push(r);
    }
    Ok(())
}

/// Reflection through the hyperplane metric-orthogonal to `u`.
fn reflect(metric: &Metric, u: &AmbientVector, uu: f64, v: &AmbientVector) -> AmbientVector {
    let coef = 2.0 * metric.dot(v, u) / uu;
    v - u * coef
}

/// Rotation-minimizing frame along a curve in `M^{n+1}(c)`, any `n ≥ 2`.
///
/// Normals are carried from sample to sample by two reflections: the first
/// maps `α_k` to `α_{k+1}`, the second fixes `α_{k+1}` and maps the image of
/// `T_k` onto `T_{k+1}`. Reflections preserve the form, so the transported
/// frame stays orthonormal; it is then projected onto the normal space and
/// Gram–Schmidt'ed to remove rounding drift.
pub fn rm_apparatus(curve: &SampledCurve, initial_frame: Option<&[AmbientVector]>) -> Result<RMData> {
    rm_apparatus_with(curve, initial_frame, Execution::default())
}

pub fn rm_apparatus_with(
    curve: &SampledCurve,
    initial_frame: Option<&[AmbientVector]>,
    exec: Execution,
) -> Result<RMData> {
    let n = curve.len();
    let metric = curve.metric();
    let curved = curve.form.is_curved();
    let want = curve.normal_count();
    if want < 2 {
        return Err(GeomError::InvalidInput("rotation-minimizing frames need n ≥ 2".into()));
    }
    let tangent: Vec<AmbientVector> = exec.map_indices(n, |i| unit_tangent(curve, i));
    let p0 = &curve.points[0];

    let mut frame: Vec<AmbientVector> = match initial_frame {
        None => default_normal_frame(curve, p0, &tangent[0])?,
        Some(given) => {
            if given.len() != want {
                return Err(GeomError::InvalidInput(format!(
                    "initial frame has {} vectors, expected {want}",
                    given.len()
                )));
            }
            for (k, v) in given.iter().enumerate() {
                if v.len() != curve.dim() {
                    return Err(GeomError::DimensionMismatch {
                        expected: curve.dim(),
                        found: v.len(),
                    });
                }
                let along_t = metric.dot(v, &tangent[0]);
                let along_p = if curved { metric.dot(v, p0) } else { 0.0 };
                if along_t.abs() > 1e-6 || along_p.abs() > 1e-6 {
                    return Err(GeomError::InvalidInput(format!(
                        "initial normal {k} is not orthogonal to the curve"
                    )));
                }
                for (l, w) in given.iter().enumerate().take(k + 1) {
                    let target = if k == l { 1.0 } else { 0.0 };
                    if (metric.dot(v, w) - target).abs() > 1e-6 {
                        return Err(GeomError::InvalidInput(
                            "initial normal frame is not orthonormal".into(),
                        ));
                    }
                }
            }
            given.to_vec()
        }
    };
    renormalize_normals(&metric, curved, p0, &tangent[0], &mut frame)?;

    let mut normals = Vec::with_capacity(n);
    normals.push(frame.clone());
    for k in 0..n - 1 {
        let (pk, pk1) = (&curve.points[k], &curve.points[k + 1]);
        let u1 = pk1 - pk;
        let uu1 = metric.norm_sq(&u1);
        if uu1 <= 0.0 {
            return Err(GeomError::Degenerate(format!("repeated sample at {k}")));
        }
        let t_left = reflect(&metric, &u1, uu1, &tangent[k]);
        let u2 = &tangent[k + 1] - &t_left;
        let uu2 = metric.norm_sq(&u2);
        for v in frame.iter_mut() {
            let mut w = reflect(&metric, &u1, uu1, v);
            if uu2 > 1e-300 {
                w = reflect(&metric, &u2, uu2, &w);
            }
            *v = w;
        }
        renormalize_normals(&metric, curved, pk1, &tangent[k + 1], &mut frame)?;
        normals.push(frame.clone());
    }

    let kappas = exec.map_indices(n, |i| {
        let acc = stencil::vector_second_derivative_at(&curve.points, i, curve.ds);
        normals[i].iter().map(|nk| metric.dot(&acc, nk)).collect::<Vec<f64>>()
    });
    let low_confidence = (0..n).map(|i| stencil::is_boundary(i, n)).collect();
    Ok(RMData {
        form: curve.form,
        ds: curve.ds,
        s: curve.s_values(),
        tangent,
        normals,
        kappas,
        low_confidence,
    })
}

// Cubic Lagrange basis on nodes 0, 1, 2, 3 and its derivative.
fn lagrange4(t: f64) -> ([f64; 4], [f64; 4]) {
    let l = [
        -(t - 1.0) * (t - 2.0) * (t - 3.0) / 6.0,
        t * (t - 2.0) * (t - 3.0) / 2.0,
        -t * (t - 1.0) * (t - 3.0) / 2.0,
        t * (t - 1.0) * (t - 2.0) / 6.0,
    ];
    let d = [
        -(3.0 * t * t - 12.0 * t + 11.0) / 6.0,
        (3.0 * t * t - 10.0 * t + 6.0) / 2.0,
        -(3.0 * t * t - 8.0 * t + 3.0) / 2.0,
        (3.0 * t * t - 6.0 * t + 2.0) / 6.0,
    ];
    (l, d)
}

const GAUSS5: [(f64, f64); 5] = [
    (0.0, 0.568_888_888_888_888_9),
    (-0.538_469_310_105_683_1, 0.478_628_670_499_366_5),
    (0.538_469_310_105_683_1, 0.478_628_670_499_366_5),
    (-0.906_179_845_938_664, 0.236_926_885_056_189_1),
    (0.906_179_845_938_664, 0.236_926_885_056_189_1),
];

/// Piecewise-cubic interpolant through raw samples, projected onto the model.
struct Interpolant<'a> {
    form: SpaceForm,
    metric: Metric,
    pts: &'a [AmbientVector],
}

impl Interpolant<'_> {
    fn stencil_start(&self, seg: usize) -> usize {
        seg.saturating_sub(1).min(self.pts.len() - 4)
    }

    /// Position and velocity of the raw polynomial at `seg + u`, `u ∈ [0, 1]`.
    fn raw(&self, seg: usize, u: f64) -> (AmbientVector, AmbientVector) {
        let j0 = self.stencil_start(seg);
        let t = (seg - j0) as f64 + u;
        let (l, d) = lagrange4(t);
        let dim = self.pts[0].len();
        let mut p = DVector::zeros(dim);
        let mut v = DVector::zeros(dim);
        for k in 0..4 {
            p.axpy(l[k], &self.pts[j0 + k], 1.0);
            v.axpy(d[k], &self.pts[j0 + k], 1.0);
        }
        (p, v)
    }

    /// Speed of the projected interpolant.
    fn speed(&self, seg: usize, u: f64) -> f64 {
        let (p, v) = self.raw(seg, u);
        if !self.form.is_curved() {
            return v.norm();
        }
        let pp = self.metric.norm_sq(&p);
        let w = &v - &p * (self.metric.dot(&p, &v) / pp);
        (self.metric.norm_sq(&w).max(0.0) / pp.abs()).sqrt()
    }

    fn length(&self, seg: usize, u0: f64, u1: f64) -> f64 {
        let half = 0.5 * (u1 - u0);
        let mid = 0.5 * (u1 + u0);
        GAUSS5
            .iter()
            .map(|&(x, w)| w * self.speed(seg, mid + half * x))
            .sum::<f64>()
            * half
    }

    fn point(&self, seg: usize, u: f64) -> Result<AmbientVector> {
        let (p, _) = self.raw(seg, u);
        if self.form.is_curved() {
            crate::spaceform::project_to_hyperquadric(&p, self.form)
        } else {
            Ok(p)
        }
    }
}

/// Resamples a curve at uniform arc length.
///
/// Points are joined by local cubic interpolants (projected onto the model);
/// segment lengths come from 5-point Gauss–Legendre quadrature and are
/// inverted per target by Newton's method. `ds` defaults to the mean segment length.
pub fn arclength_reparametrize(points: &[AmbientVector], form: SpaceForm, ds: Option<f64>) -> Result<SampledCurve> {
    let m = points.len();
    if m < 4 {
        return Err(GeomError::InvalidInput(format!("need at least 4 points, got {m}")));
    }
    let metric = Metric::new(form);
    let mut pts: Vec<AmbientVector> = Vec::with_capacity(m);
    for p in points {
        if p.len() != points[0].len() {
            return Err(GeomError::DimensionMismatch {
                expected: points[0].len(),
                found: p.len(),
            });
        }
        pts.push(if form.is_curved() {
            crate::spaceform::project_to_hyperquadric(p, form)?
        } else {
            p.clone()
        });
    }
    let scale = pts.iter().map(|p| p.amax()).fold(0.0, f64::max).max(1.0);
    for (i, w) in pts.windows(2).enumerate() {
        if (&w[1] - &w[0]).amax() <= 1e-14 * scale {
            return Err(GeomError::Degenerate(format!("points {i} and {} coincide", i + 1)));
        }
    }
    let interp = Interpolant {
        form,
        metric,
        pts: &pts,
    };
    let mut cumulative = vec![0.0; m];
    for seg in 0..m - 1 {
        cumulative[seg + 1] = cumulative[seg] + interp.length(seg, 0.0, 1.0);
    }
    let total = cumulative[m - 1];
    let ds = ds.unwrap_or(total / (m - 1) as f64);
    if !(ds > 0.0) || ds > total / 3.0 {
        return Err(GeomError::InvalidInput(format!(
            "step {ds} too large for curve of length {total}"
        )));
    }
    let count = (total / ds * (1.0 + 1e-12)).floor() as usize + 1;
    let mut out = Vec::with_capacity(count);
    let mut seg = 0usize;
    for k in 0..count {
        let target = (k as f64 * ds).min(total);
        while seg + 1 < m - 1 && cumulative[seg + 1] < target {
            seg += 1;
        }
        let local = target - cumulative[seg];
        let seg_len = cumulative[seg + 1] - cumulative[seg];
        let mut u = (local / seg_len).clamp(0.0, 1.0);
        for _ in 0..20 {
            let f = interp.length(seg, 0.0, u) - local;
            let step = f / interp.speed(seg, u).max(1e-300);
            u = (u - step).clamp(0.0, 1.0);
            if step.abs() < 1e-15 {
                break;
            }
        }
        out.push(interp.point(seg, u)?);
    }
    SampledCurve::new(form, 0.0, ds, out)
}
