//! Constant-torsion curves on totally umbilical surfaces, plus closed-form
//! oracle curves used as test fixtures.
//!
//! A curve of constant torsion `τ ≠ 0` on an umbilical surface with mean
//! curvature `H` has `κ(s) = |H| / sin(τs + a)`. Three generators are provided:
//! the planar angle system on the horosphere `x3 + x4 = 1`, the spherical-chart
//! system on the geodesic spheres `x4 = σ` of `S^3`, and a direct integration of
//! the ambient Frenet equations that works on any non-geodesic umbilical surface.

use std::f64::consts::PI;

use nalgebra::DVector;
use serde::{Deserialize, Serialize};

use crate::error::{GeomError, Result};
use crate::frames::{completion4, SampledCurve};
use crate::spaceform::{classify_surface, AmbientVector, Metric, SpaceForm, UmbilicalSurface};

/// Closest the phase `τs + a` may come to `0` or `π`.
pub const PHASE_MARGIN: f64 = 0.02;

/// Fraction of the maximal domain trimmed at each end for accuracy claims.
pub const TRIM_FRACTION: f64 = 0.15;

/// Sign choice for the geodesic curvature (`θ' = ±cot(τs + a)` on the horosphere).
/// `Plus` produces curves of torsion `+τ`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Branch {
    #[default]
    Plus,
    Minus,
}

impl Branch {
    pub fn sign(self) -> f64 {
        match self {
            Branch::Plus => 1.0,
            Branch::Minus => -1.0,
        }
    }
}

/// `κ(s) = |H| / sin(τs + a)`.
pub fn constant_torsion_curvature(h: f64, tau: f64, a: f64, s: f64) -> Result<f64> {
    if h == 0.0 || tau == 0.0 {
        return Err(GeomError::Domain("H and τ must be non-zero".into()));
    }
    let sn = (tau * s + a).sin();
    if sn <= 0.0 {
        return Err(GeomError::Domain(format!(
            "sin(τs + a) = {sn:.3e} ≤ 0 at s = {s}"
        )));
    }
    Ok(h.abs() / sn)
}

/// Maximal interval of `s` on which `sin(τs + a) > 0`.
pub fn maximal_domain(tau: f64, a: f64) -> (f64, f64) {
    let (u, v) = (-a / tau, (PI - a) / tau);
    (u.min(v), u.max(v))
}

/// Maximal domain with `TRIM_FRACTION` of its length removed at each end.
pub fn trimmed_domain(tau: f64, a: f64) -> (f64, f64) {
    let (lo, hi) = maximal_domain(tau, a);
    let l = hi - lo;
    (lo + TRIM_FRACTION * l, hi - TRIM_FRACTION * l)
}

/// Output of a synthesis run.
#[derive(Debug, Clone)]
pub struct Synthesis {
    pub curve: SampledCurve,
    pub surface: UmbilicalSurface,
    /// Largest constraint violation seen before each projection step (0 when none is needed).
    pub constraint_drift: f64,
}

fn check_phase(tau: f64, a: f64, lo: f64, hi: f64, s0: f64) -> Result<()> {
    if tau == 0.0 || !tau.is_finite() {
        return Err(GeomError::Domain("torsion must be non-zero".into()));
    }
    if !(lo < hi) {
        return Err(GeomError::Domain(format!("empty range [{lo}, {hi}]")));
    }
    let (dlo, dhi) = maximal_domain(tau, a);
    let margin = PHASE_MARGIN / tau.abs();
    for s in [lo, hi, s0] {
        if s < dlo + margin || s > dhi - margin {
            return Err(GeomError::Domain(format!(
                "s = {s} is outside ({:.6}, {:.6}) or too close to the curvature blow-up",
                dlo + margin,
                dhi - margin
            )));
        }
    }
    Ok(())
}

fn check_step(ds: f64, lo: f64, hi: f64) -> Result<()> {
    if !(ds > 0.0 && ds.is_finite()) || ds * 3.0 > hi - lo {
        return Err(GeomError::Domain(format!("step {ds} unusable on [{lo}, {hi}]")));
    }
    Ok(())
}

fn rk4_step<F>(rhs: &F, s: f64, y: &DVector<f64>, h: f64) -> DVector<f64>
where
    F: Fn(f64, &DVector<f64>) -> DVector<f64>,
{
    let k1 = rhs(s, y);
    let k2 = rhs(s + 0.5 * h, &(y + &k1 * (0.5 * h)));
    let k3 = rhs(s + 0.5 * h, &(y + &k2 * (0.5 * h)));
    let k4 = rhs(s + h, &(y + &k3 * h));
    y + (k1 + k2 * 2.0 + k3 * 2.0 + k4) * (h / 6.0)
}

/// Integrates from `s0` in both directions on the grid `s0 + k ds` and returns
/// the first grid value in `[lo, hi]` together with the states there.
fn integrate_grid<F, P>(rhs: F, mut post: P, s0: f64, y0: DVector<f64>, lo: f64, hi: f64, ds: f64) -> Result<(f64, Vec<DVector<f64>>)>
where
    F: Fn(f64, &DVector<f64>) -> DVector<f64>,
    P: FnMut(f64, &mut DVector<f64>) -> Result<()>,
{
    let k_lo = ((lo - s0) / ds - 1e-9).ceil() as i64;
    let k_hi = ((hi - s0) / ds + 1e-9).floor() as i64;
    let mut forward = vec![y0.clone()];
    let mut y = y0.clone();
    for k in 0..k_hi.max(0) {
        let s = s0 + k as f64 * ds;
        y = rk4_step(&rhs, s, &y, ds);
        post(s + ds, &mut y)?;
        forward.push(y.clone());
    }
    let mut backward = Vec::new();
    let mut y = y0;
    for k in 0..(-k_lo).max(0) {
        let s = s0 - k as f64 * ds;
        y = rk4_step(&rhs, s, &y, -ds);
        post(s - ds, &mut y)?;
        backward.push(y.clone());
    }
    let mut states = Vec::with_capacity((k_hi - k_lo + 1).max(0) as usize);
    for k in k_lo..=k_hi {
        let state = if k >= 0 {
            &forward[k as usize]
        } else {
            &backward[(-k - 1) as usize]
        };
        states.push(state.clone());
    }
    Ok((s0 + k_lo as f64 * ds, states))
}

/// Parameters for curves on the horosphere `x3 + x4 = 1` of `H^3`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HorosphereParams {
    pub tau: f64,
    pub phase: f64,
    pub s0: f64,
    pub x1_0: f64,
    pub x2_0: f64,
    pub s_range: (f64, f64),
    pub ds: f64,
    pub branch: Branch,
}

impl HorosphereParams {
    /// Initial data of the planar example: `s0 = π/(2τ)`, origin, trimmed domain.
    pub fn figure(tau: f64) -> Self {
        HorosphereParams {
            tau,
            phase: 0.0,
            s0: PI / (2.0 * tau),
            x1_0: 0.0,
            x2_0: 0.0,
            s_range: trimmed_domain(tau, 0.0),
            ds: 1e-3,
            branch: Branch::Plus,
        }
    }
}

/// Horosphere `U_{(0,0,1,-1),1}` in the σ = -1 normalization.
pub fn standard_horosphere() -> UmbilicalSurface {
    classify_surface(&DVector::from_vec(vec![0.0, 0.0, 1.0, -1.0]), 1.0, SpaceForm::Hyperbolic)
        .expect("the standard horosphere is valid")
}

/// Integrates `x1' = cos θ`, `x2' = sin θ` with `θ = ±(1/τ) log sin(τs + a)`
/// and lifts `(x1, x2)` to the horosphere `x3 + x4 = 1`.
pub fn synthesize_horosphere(p: &HorosphereParams) -> Result<Synthesis> {
    let (lo, hi) = p.s_range;
    check_phase(p.tau, p.phase, lo, hi, p.s0)?;
    check_step(p.ds, lo, hi)?;
    let (tau, a, sign) = (p.tau, p.phase, p.branch.sign());
    let theta = move |s: f64| sign * (tau * s + a).sin().ln() / tau;
    let rhs = move |s: f64, _y: &DVector<f64>| {
        let (sn, cs) = theta(s).sin_cos();
        DVector::from_vec(vec![cs, sn])
    };
    let y0 = DVector::from_vec(vec![p.x1_0, p.x2_0]);
    let (first, states) = integrate_grid(rhs, |_, _| Ok(()), p.s0, y0, lo, hi, p.ds)?;
    let points = states
        .iter()
        .map(|y| {
            let r2 = y[0] * y[0] + y[1] * y[1];
            DVector::from_vec(vec![y[0], y[1], -0.5 * r2, 1.0 + 0.5 * r2])
        })
        .collect();
    Ok(Synthesis {
        curve: SampledCurve::new(SpaceForm::Hyperbolic, first, p.ds, points)?,
        surface: standard_horosphere(),
        constraint_drift: 0.0,
    })
}

/// Parameters for curves on the geodesic sphere `x4 = σ` of `S^3`, written in
/// the chart `R(cos φ cos θ, cos φ sin θ, sin φ)` with `R = sqrt(1 - σ²)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SphereParams {
    pub sigma: f64,
    pub tau: f64,
    pub phase: f64,
    pub s0: f64,
    pub phi0: f64,
    pub theta0: f64,
    pub dphi0: f64,
    pub dtheta0: f64,
    pub s_range: (f64, f64),
    pub ds: f64,
    pub branch: Branch,
}

impl SphereParams {
    /// `σ = 1/2`, `s0 = π/4`, `φ = θ = 0`, `θ' = 1`, `φ' = 1/√3`, trimmed domain.
    pub fn figure(tau: f64) -> Self {
        SphereParams {
            sigma: 0.5,
            tau,
            phase: 0.0,
            s0: PI / 4.0,
            phi0: 0.0,
            theta0: 0.0,
            dphi0: 1.0 / 3f64.sqrt(),
            dtheta0: 1.0,
            s_range: trimmed_domain(tau, 0.0),
            ds: 1e-3,
            branch: Branch::Plus,
        }
    }

    /// Positive `φ'` completing `θ'` to unit speed.
    pub fn unit_speed_dphi(sigma: f64, phi: f64, dtheta: f64) -> Result<f64> {
        let q = 1.0 / (1.0 - sigma * sigma) - (dtheta * phi.cos()).powi(2);
        if q < 0.0 {
            return Err(GeomError::Domain(format!(
                "θ' = {dtheta} exceeds unit speed at φ = {phi}"
            )));
        }
        Ok(q.sqrt())
    }
}

/// Integrates a constant-torsion curve on the sphere `x4 = σ` of `S^3`.
///
/// The curve has geodesic curvature `k_g = ∓|H| cot(τs + a)` inside the
/// sphere, so that `κ² = H² + k_g² = H² / sin²(τs + a)`; the `Plus` branch
/// gives torsion `+τ`. The chart equations
///
/// ```text
/// φ'' = -sin φ cos φ θ'² - k_g cos φ θ'
/// θ'' = (2 sin φ φ' θ' + k_g φ') / cos φ
/// ```
///
/// are integrated with RK4; after each step `(φ', θ')` is rescaled onto
/// `φ'² + cos²φ θ'² = 1/(1 - σ²)`.
pub fn synthesize_geodesic_sphere_s3(p: &SphereParams) -> Result<Synthesis> {
    let (lo, hi) = p.s_range;
    let sigma = p.sigma;
    if !(sigma.abs() < 1.0) || sigma == 0.0 {
        return Err(GeomError::Domain(format!(
            "need 0 < |σ| < 1 for a non-geodesic sphere, got {sigma}"
        )));
    }
    check_phase(p.tau, p.phase, lo, hi, p.s0)?;
    check_step(p.ds, lo, hi)?;
    let r2 = 1.0 - sigma * sigma;
    let speed_sq = 1.0 / r2;
    let q0 = p.dphi0.powi(2) + (p.phi0.cos() * p.dtheta0).powi(2);
    if (q0 - speed_sq).abs() > 1e-10 * speed_sq {
        return Err(GeomError::InvalidInput(format!(
            "initial velocity violates unit speed: φ'² + cos²φ θ'² = {q0}, expected {speed_sq}"
        )));
    }
    if p.phi0.cos().abs() < 1e-8 {
        return Err(GeomError::InvalidInput("initial point sits on a chart pole".into()));
    }
    let h_abs = sigma.abs() / r2.sqrt();
    let (tau, a, sign) = (p.tau, p.phase, p.branch.sign());
    let rhs = move |s: f64, y: &DVector<f64>| {
        let (phi, dphi, dtheta) = (y[0], y[2], y[3]);
        let u = tau * s + a;
        let kg = -sign * h_abs * u.cos() / u.sin();
        let (sp, cp) = phi.sin_cos();
        DVector::from_vec(vec![
            dphi,
            dtheta,
            -sp * cp * dtheta * dtheta - kg * cp * dtheta,
            (2.0 * sp * dphi * dtheta + kg * dphi) / cp,
        ])
    };
    let mut drift: f64 = 0.0;
    let post = |s: f64, y: &mut DVector<f64>| {
        let cp = y[0].cos();
        if cp.abs() < 1e-8 || !y.iter().all(|v| v.is_finite()) {
            return Err(GeomError::Integration {
                s,
                reason: "trajectory reached a pole of the (φ, θ) chart".into(),
            });
        }
        let q = y[2] * y[2] + (cp * y[3]).powi(2);
        drift = drift.max((q - speed_sq).abs());
        let k = (speed_sq / q).sqrt();
        y[2] *= k;
        y[3] *= k;
        Ok(())
    };
    let y0 = DVector::from_vec(vec![p.phi0, p.theta0, p.dphi0, p.dtheta0]);
    let (first, states) = integrate_grid(rhs, post, p.s0, y0, lo, hi, p.ds)?;
    let r = r2.sqrt();
    let points = states
        .iter()
        .map(|y| {
            let (sp, cp) = y[0].sin_cos();
            let (st, ct) = y[1].sin_cos();
            DVector::from_vec(vec![r * cp * ct, r * cp * st, r * sp, sigma])
        })
        .collect();
    let surface = classify_surface(&DVector::from_vec(vec![0.0, 0.0, 0.0, 1.0]), sigma, SpaceForm::Spherical)?;
    Ok(Synthesis {
        curve: SampledCurve::new(SpaceForm::Spherical, first, p.ds, points)?,
        surface,
        constraint_drift: drift,
    })
}

/// Some point of the umbilical surface `S`.
pub fn point_on_surface(surface: &UmbilicalSurface) -> Result<AmbientVector> {
    let metric = surface.metric();
    let a = &surface.a;
    let dim = a.len();
    let sigma = surface.sigma;
    let c = surface.c.c();
    let axis = |k: usize| {
        let mut e = DVector::zeros(dim);
        e[k] = 1.0;
        e
    };
    let aa = metric.norm_sq(a);
    let p = if surface.epsilon == 0 {
        // null normal: combine a with its mirror image m, <a, m> = -2 a_t²
        let mut m = -a.clone();
        m[dim - 1] = a[dim - 1];
        let am = metric.dot(a, &m);
        let mu = sigma / am;
        let lambda = -1.0 / (2.0 * mu * am);
        a * lambda + m * mu
    } else {
        let base = a * (sigma / aa);
        // the complement of a has the signature needed to reach <p,p> = c
        let rest = c - sigma * sigma / aa;
        let want_timelike = rest < 0.0;
        let mut best: Option<AmbientVector> = None;
        for k in (0..dim).rev() {
            let u = metric.orthogonalize(&axis(k), &[a]);
            let q = metric.norm_sq(&u);
            if (q < -1e-6 && want_timelike) || (q > 1e-6 && !want_timelike) {
                best = Some(u / q.abs().sqrt());
                break;
            }
        }
        let u = best.ok_or_else(|| GeomError::InvalidSurface("no point found on the surface".into()))?;
        let p = &base + &u * rest.abs().sqrt();
        if surface.c == SpaceForm::Hyperbolic && p[dim - 1] <= 0.0 {
            &base - &u * rest.abs().sqrt()
        } else {
            p
        }
    };
    if surface.c == SpaceForm::Hyperbolic && p[dim - 1] <= 0.0 {
        return Err(GeomError::InvalidSurface("surface misses the upper sheet".into()));
    }
    let res = metric.dot(&p, a) - sigma;
    if res.abs() > 1e-9 * (1.0 + p.norm() * a.norm()) || (metric.norm_sq(&p) - c).abs() > 1e-9 * (1.0 + p.norm_squared()) {
        return Err(GeomError::InvalidSurface(format!(
            "constructed point misses the surface (residual {res:.3e})"
        )));
    }
    Ok(p)
}

/// Gram–Schmidt re-orthonormalization of the ambient Frenet state `(α, T, N, B)`.
fn reorthonormalize(metric: &Metric, y: &mut DVector<f64>, dim: usize) {
    let c = metric.form.c();
    let mut vs: Vec<AmbientVector> = (0..4).map(|k| y.rows(k * dim, dim).into_owned()).collect();
    let q = metric.norm_sq(&vs[0]);
    vs[0] /= (q / c).sqrt();
    for k in 1..4 {
        let (done, rest) = vs.split_at_mut(k);
        let refs: Vec<&AmbientVector> = done.iter().collect();
        let v = metric.orthogonalize(&rest[0], &refs);
        rest[0] = &v / metric.norm_sq(&v).sqrt();
    }
    for (k, v) in vs.iter().enumerate() {
        y.rows_mut(k * dim, dim).copy_from(v);
    }
}

/// Parameters for constant-torsion curves on an arbitrary umbilical surface.
#[derive(Debug, Clone, PartialEq)]
pub struct SurfaceCurveParams {
    pub surface: UmbilicalSurface,
    pub tau: f64,
    pub phase: f64,
    pub s0: f64,
    pub s_range: (f64, f64),
    pub ds: f64,
    /// Starting point on the surface; a canonical one is used when absent.
    pub start: Option<AmbientVector>,
}

impl SurfaceCurveParams {
    pub fn new(surface: UmbilicalSurface, tau: f64) -> Self {
        SurfaceCurveParams {
            surface,
            tau,
            phase: 0.0,
            s0: PI / (2.0 * tau),
            s_range: trimmed_domain(tau, 0.0),
            ds: 1e-3,
            start: None,
        }
    }
}

/// Integrates the ambient Frenet equations
/// `α' = T, T' = κN - cα, N' = -κT + τB, B' = -τN` with `κ = |H|/sin(τs + a)`,
/// starting from a frame for which `α + N/κ - (κ'/(κ²τ))B` is the surface's
/// center vector `b = c a / σ`; that vector is then constant, which keeps the
/// curve on the surface.
pub fn synthesize_on_surface(p: &SurfaceCurveParams) -> Result<Synthesis> {
    let surface = &p.surface;
    let form = surface.c;
    if !form.is_curved() || surface.dim() != 4 {
        return Err(GeomError::InvalidSurface("need a surface of H^3 or S^3".into()));
    }
    if surface.kind.is_totally_geodesic() || surface.sigma == 0.0 {
        return Err(GeomError::InvalidSurface(
            "totally geodesic surfaces carry no canonical constant-torsion curve".into(),
        ));
    }
    let (lo, hi) = p.s_range;
    check_phase(p.tau, p.phase, lo, hi, p.s0)?;
    check_step(p.ds, lo, hi)?;
    let metric = surface.metric();
    let c = form.c();
    let h_abs = surface.mean_curvature.abs();
    let big_c = 1.0 / (h_abs * h_abs);

    let alpha0 = match &p.start {
        Some(q) => {
            let r = metric.dot(q, &surface.a) - surface.sigma;
            if r.abs() > 1e-9 * (1.0 + q.norm() * surface.a.norm()) {
                return Err(GeomError::NotOnSurface { residual: r });
            }
            q.clone()
        }
        None => point_on_surface(surface)?,
    };
    let b = &surface.a * (c / surface.sigma);
    let v = &b - &alpha0;
    let vv = metric.norm_sq(&v);
    if (vv - big_c).abs() > 1e-8 * big_c.max(1.0) {
        return Err(GeomError::InvalidSurface(format!(
            "center vector inconsistent with H: <v,v> = {vv}, expected {big_c}"
        )));
    }
    let v_hat = &v / vv.sqrt();

    // T0: any unit vector orthogonal to α0 and v.
    let mut t0 = None;
    for k in 0..4 {
        let mut e = DVector::zeros(4);
        e[k] = 1.0;
        let u = metric.orthogonalize(&e, &[&alpha0, &v_hat]);
        if metric.norm_sq(&u) > 1e-3 {
            let u = metric.orthogonalize(&u, &[&alpha0, &v_hat]);
            t0 = metric.normalize_spacelike(&u);
            break;
        }
    }
    let t0 = t0.ok_or_else(|| GeomError::Degenerate("no tangent direction found".into()))?;
    let w = completion4(&metric, &alpha0, &t0, &v_hat);
    let w = &w / metric.norm_sq(&w).sqrt();

    let u0 = p.tau * p.s0 + p.phase;
    let kappa0 = h_abs / u0.sin();
    let g0 = -u0.cos() / h_abs;
    let (cos_phi, sin_phi) = (1.0 / (kappa0 * big_c.sqrt()), g0 / big_c.sqrt());
    let n0 = &v_hat * cos_phi + &w * sin_phi;
    let b0 = &v_hat * (-sin_phi) + &w * cos_phi;

    let mut y0 = DVector::zeros(16);
    for (k, vec) in [&alpha0, &t0, &n0, &b0].into_iter().enumerate() {
        y0.rows_mut(4 * k, 4).copy_from(vec);
    }
    let (tau, a) = (p.tau, p.phase);
    let rhs = move |s: f64, y: &DVector<f64>| {
        let kappa = h_abs / (tau * s + a).sin();
        let al = y.rows(0, 4);
        let t = y.rows(4, 4);
        let n = y.rows(8, 4);
        let bb = y.rows(12, 4);
        let mut out = DVector::zeros(16);
        out.rows_mut(0, 4).copy_from(&t);
        out.rows_mut(4, 4).copy_from(&(n * kappa - al * c));
        out.rows_mut(8, 4).copy_from(&(bb * tau - t * kappa));
        out.rows_mut(12, 4).copy_from(&(n * (-tau)));
        out
    };
    let mut drift: f64 = 0.0;
    let post = |s: f64, y: &mut DVector<f64>| {
        if !y.iter().all(|x| x.is_finite()) {
            return Err(GeomError::Integration {
                s,
                reason: "non-finite state".into(),
            });
        }
        let al = y.rows(0, 4).into_owned();
        drift = drift.max((metric.norm_sq(&al) - c).abs());
        reorthonormalize(&metric, y, 4);
        Ok(())
    };
    let (first, states) = integrate_grid(rhs, post, p.s0, y0, lo, hi, p.ds)?;
    let points = states.iter().map(|y| y.rows(0, 4).into_owned()).collect();
    Ok(Synthesis {
        curve: SampledCurve::new(form, first, p.ds, points)?,
        surface: surface.clone(),
        constraint_drift: drift,
    })
}

/// Closed-form point of a curve with constant curvature `κ` and zero torsion
/// starting at `(p0, T0, N0)`.
fn circle_point(c: f64, kappa: f64, p0: &AmbientVector, t0: &AmbientVector, n0: &AmbientVector, s: f64) -> AmbientVector {
    let w2 = kappa * kappa + c;
    let (sn, one_minus_cos) = if w2 > 1e-14 {
        let w = w2.sqrt();
        ((w * s).sin() / w, (1.0 - (w * s).cos()) / w2)
    } else if w2 < -1e-14 {
        let w = (-w2).sqrt();
        ((w * s).sinh() / w, (1.0 - (w * s).cosh()) / w2)
    } else {
        (s, 0.5 * s * s)
    };
    p0 + t0 * sn + (n0 * kappa - p0 * c) * one_minus_cos
}

/// A curve of constant geodesic curvature `kappa_g` on `surface`, sampled at
/// `s = 0, ds, ..., (count - 1) ds`. Its ambient torsion vanishes.
pub fn oracle_circle_on_surface(surface: &UmbilicalSurface, kappa_g: f64, ds: f64, count: usize) -> Result<SampledCurve> {
    if surface.dim() != 4 {
        return Err(GeomError::InvalidSurface("need a surface of H^3 or S^3".into()));
    }
    let metric = surface.metric();
    let p0 = point_on_surface(surface)?;
    let xi = crate::spaceform::surface_normal(surface, &p0)?;
    let mut t0 = None;
    for k in 0..4 {
        let mut e = DVector::zeros(4);
        e[k] = 1.0;
        let u = metric.orthogonalize(&e, &[&p0, &xi]);
        if metric.norm_sq(&u) > 1e-3 {
            t0 = metric.normalize_spacelike(&u);
            break;
        }
    }
    let t0 = t0.ok_or_else(|| GeomError::Degenerate("no tangent direction found".into()))?;
    let nu = completion4(&metric, &p0, &t0, &xi);
    let nu = &nu / metric.norm_sq(&nu).sqrt();
    let h = surface.mean_curvature;
    let kappa = (h * h + kappa_g * kappa_g).sqrt();
    let points: Vec<AmbientVector> = if kappa == 0.0 {
        (0..count)
            .map(|i| circle_point(surface.c.c(), 0.0, &p0, &t0, &xi, i as f64 * ds))
            .collect()
    } else {
        let n0 = (&xi * h + &nu * kappa_g) / kappa;
        (0..count)
            .map(|i| circle_point(surface.c.c(), kappa, &p0, &t0, &n0, i as f64 * ds))
            .collect()
    };
    SampledCurve::new(surface.c, 0.0, ds, points)
}

/// `α(s) = (r cos(s/r), r sin(s/r), 0, sqrt(1 - r²))` on `S^3`.
pub fn oracle_circle_s3(r: f64, ds: f64, count: usize) -> Result<SampledCurve> {
    if !(r > 0.0 && r <= 1.0) {
        return Err(GeomError::InvalidInput(format!("radius must lie in (0, 1], got {r}")));
    }
    let h = (1.0 - r * r).sqrt();
    let points = (0..count)
        .map(|i| {
            let s = i as f64 * ds;
            DVector::from_vec(vec![r * (s / r).cos(), r * (s / r).sin(), 0.0, h])
        })
        .collect();
    SampledCurve::new(SpaceForm::Spherical, 0.0, ds, points)
}

/// Curve on the equidistant surface `{x1 = σ}` of `H^3` (ε = 1).
///
/// Without torsion it is a closed-form circle of geodesic curvature `kappa_g`;
/// with `Some(τ)` it is the constant-torsion curve on the trimmed domain.
pub fn oracle_equidistant_h3(sigma: f64, kappa_g: f64, torsion: Option<f64>, ds: f64, count: usize) -> Result<SampledCurve> {
    let surface = classify_surface(&DVector::from_vec(vec![1.0, 0.0, 0.0, 0.0]), sigma, SpaceForm::Hyperbolic)?;
    match torsion {
        None => oracle_circle_on_surface(&surface, kappa_g, ds, count),
        Some(tau) => {
            let mut p = SurfaceCurveParams::new(surface, tau);
            p.ds = ds;
            Ok(synthesize_on_surface(&p)?.curve)
        }
    }
}

/// Curve on the hypersurface `x5 = σ` of `S^4` winding around a flat torus:
/// `R(cos θ0 cos(a t), cos θ0 sin(a t), sin θ0 cos(b t), sin θ0 sin(b t), σ/R)`
/// reparametrized by arc length.
pub fn torus_curve_s4(sigma: f64, theta0: f64, a: f64, b: f64, ds: f64, count: usize) -> Result<SampledCurve> {
    if !(sigma.abs() < 1.0) {
        return Err(GeomError::Domain(format!("need |σ| < 1, got {sigma}")));
    }
    let r = (1.0 - sigma * sigma).sqrt();
    let (st, ct) = theta0.sin_cos();
    let speed = r * ((ct * a).powi(2) + (st * b).powi(2)).sqrt();
    if speed == 0.0 {
        return Err(GeomError::Degenerate("torus curve has zero speed".into()));
    }
    let points = (0..count)
        .map(|i| {
            let t = i as f64 * ds / speed;
            DVector::from_vec(vec![
                r * ct * (a * t).cos(),
                r * ct * (a * t).sin(),
                r * st * (b * t).cos(),
                r * st * (b * t).sin(),
                sigma,
            ])
        })
        .collect();
    SampledCurve::new(SpaceForm::Spherical, 0.0, ds, points)
}
