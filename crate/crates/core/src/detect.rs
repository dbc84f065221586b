//! Membership tests for umbilical surfaces and explicit surface recovery.
//!
//! A Frenet curve with `τ ≠ 0` lies on a totally umbilical surface exactly when
//! `C = 1/κ² + κ'²/(κ⁴τ²)` is constant; then `C = 1/H²` and the vector
//! `β = α + N/κ - (κ'/(κ²τ)) B` is constant and determines the surface.
//! Constancy of `C` is equivalent (where `κ' ≠ 0`) to the vanishing of the
//! fourth-order residual `τ/κ - (κ'/(κ²τ))'`, because
//! `C' = (-2κ'/(τκ²)) (τ/κ - (κ'/(κ²τ))')`.

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::error::{GeomError, Result};
use crate::frames::{frenet_apparatus_with, FrenetData, FrenetOptions, RMData, SampledCurve, KAPPA_MIN};
use crate::par::Execution;
use crate::spaceform::{classify_surface, AmbientVector, Metric, SpaceForm, SurfaceKind, UmbilicalSurface};
use crate::stencil;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DetectConfig {
    /// Below this `|τ|` a sample counts as torsion-free.
    pub tau_zero_tol: f64,
    /// Largest accepted relative spread of `C` over the window.
    pub c_spread_tol: f64,
    /// `|C - 1|` below which a hyperbolic curve is assigned to a horosphere.
    pub horosphere_band: f64,
    pub kappa_min: f64,
    /// Samples with `|κ'|` below this are left out of the fourth-order aggregate.
    pub kappa_prime_min: f64,
    /// Largest accepted spread of `β` relative to `max(1, |b|)`.
    pub beta_spread_tol: f64,
    /// Relative fourth-order residual above which a constant-κ curve is rejected.
    pub fourth_order_tol: f64,
    /// Analyzed range of `s`; all centrally-differenced samples when absent.
    pub window: Option<(f64, f64)>,
    #[serde(skip)]
    pub execution: Execution,
}

impl Default for DetectConfig {
    fn default() -> Self {
        DetectConfig {
            tau_zero_tol: 1e-5,
            c_spread_tol: 0.01,
            horosphere_band: 0.02,
            kappa_min: KAPPA_MIN,
            kappa_prime_min: 1e-6,
            beta_spread_tol: 1e-2,
            fourth_order_tol: 1e-2,
            window: None,
            execution: Execution::default(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Verdict {
    TotallyGeodesic,
    UmbilicalNonGeodesic,
    NotUmbilical,
    Inconclusive,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Diagnostics {
    /// First and last `s` of the analyzed samples.
    pub window: (f64, f64),
    pub samples_used: usize,
    pub thresholds: DetectConfig,
    pub note: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DetectionReport {
    pub verdict: Verdict,
    pub c: SpaceForm,
    /// Mean of `C` over the window.
    #[serde(rename = "C_estimate")]
    pub c_estimate: Option<f64>,
    /// Largest deviation of `C` from its median, relative to the median.
    #[serde(rename = "C_spread")]
    pub c_spread: Option<f64>,
    #[serde(rename = "H_estimate")]
    pub h_estimate: Option<f64>,
    /// Sphere radius `sqrt(C)` for Euclidean curves.
    pub radius: Option<f64>,
    pub tau_mean: f64,
    pub recovered_surface: Option<UmbilicalSurface>,
    /// Median of `β` before normalization (the sphere center when `c = 0`).
    pub recovered_b: Option<Vec<f64>>,
    pub beta_spread: Option<f64>,
    /// `C_i / C_estimate - 1` per analyzed sample.
    pub residual_third_order: Vec<f64>,
    /// `τ/κ - (κ'/(κ²τ))'` per analyzed sample.
    pub residual_fourth_order: Vec<f64>,
    pub diagnostics: Diagnostics,
}

/// `1/κ² + κ'²/(κ⁴τ²)`.
pub fn invariant_c(kappa: f64, kappa_prime: f64, tau: f64) -> Result<f64> {
    if tau == 0.0 {
        return Err(GeomError::UndefinedInvariant("C needs τ ≠ 0".into()));
    }
    if !(kappa > 0.0) {
        return Err(GeomError::InvalidInput(format!("κ must be positive, got {kappa}")));
    }
    let k2 = kappa * kappa;
    Ok(1.0 / k2 + kappa_prime * kappa_prime / (k2 * k2 * tau * tau))
}

/// `τ/κ - (κ'/(κ²τ))'` per sample, the derivative taken by finite differences.
pub fn fourth_order_residual(kappa: &[f64], kappa_prime: &[f64], tau: &[f64], ds: f64) -> Result<Vec<f64>> {
    let n = kappa.len();
    if kappa_prime.len() != n || tau.len() != n {
        return Err(GeomError::DimensionMismatch {
            expected: n,
            found: if kappa_prime.len() != n { kappa_prime.len() } else { tau.len() },
        });
    }
    if let Some(i) = tau.iter().position(|&t| t == 0.0) {
        return Err(GeomError::UndefinedInvariant(format!("τ = 0 at sample {i}")));
    }
    if let Some(i) = kappa.iter().position(|&k| !(k > 0.0)) {
        return Err(GeomError::InvalidInput(format!("κ ≤ 0 at sample {i}")));
    }
    let g: Vec<f64> = (0..n)
        .map(|i| kappa_prime[i] / (kappa[i] * kappa[i] * tau[i]))
        .collect();
    let dg = stencil::derivative(&g, ds)?;
    Ok((0..n).map(|i| tau[i] / kappa[i] - dg[i]).collect())
}

fn median(values: &[f64]) -> f64 {
    let mut v = values.to_vec();
    v.sort_by(f64::total_cmp);
    let n = v.len();
    if n % 2 == 1 {
        v[n / 2]
    } else {
        0.5 * (v[n / 2 - 1] + v[n / 2])
    }
}

/// Indices inside the configured window whose fourth-order residual only
/// involves centrally-differenced values: the two one-sided samples at each
/// end plus one more.
fn window_indices(s: &[f64], low_confidence: &[bool], cfg: &DetectConfig) -> Vec<usize> {
    let n = s.len();
    (0..n)
        .filter(|&i| !low_confidence[i] && i >= 3 && i + 3 < n)
        .filter(|&i| match cfg.window {
            Some((lo, hi)) => s[i] >= lo - 1e-12 && s[i] <= hi + 1e-12,
            None => true,
        })
        .collect()
}

/// Outcome of the scalar (κ, κ', τ) analysis shared by all space forms.
struct ScalarAnalysis {
    outcome: ScalarOutcome,
    used: Vec<usize>,
    c_estimate: Option<f64>,
    c_spread: Option<f64>,
    tau_mean: f64,
    third: Vec<f64>,
    fourth: Vec<f64>,
    note: String,
}

#[derive(Debug, Clone, Copy, PartialEq)]
enum ScalarOutcome {
    TorsionFree,
    ConstantC,
    NotUmbilical,
    Inconclusive,
}

fn analyze_scalars(kappa: &[f64], kappa_prime: &[f64], tau: &[f64], ds: f64, idx: &[usize], cfg: &DetectConfig) -> Result<ScalarAnalysis> {
    let mut out = ScalarAnalysis {
        outcome: ScalarOutcome::Inconclusive,
        used: Vec::new(),
        c_estimate: None,
        c_spread: None,
        tau_mean: 0.0,
        third: Vec::new(),
        fourth: Vec::new(),
        note: String::new(),
    };
    if idx.is_empty() {
        out.note = "no centrally-differenced samples in the window".into();
        return Ok(out);
    }
    out.tau_mean = idx.iter().map(|&i| tau[i]).sum::<f64>() / idx.len() as f64;
    let max_tau = idx.iter().map(|&i| tau[i].abs()).fold(0.0, f64::max);
    if max_tau < cfg.tau_zero_tol {
        out.outcome = ScalarOutcome::TorsionFree;
        out.used = idx.to_vec();
        out.note = format!("max |τ| = {max_tau:.3e} below tolerance");
        return Ok(out);
    }
    let used: Vec<usize> = idx
        .iter()
        .copied()
        .filter(|&i| tau[i].abs() >= cfg.tau_zero_tol)
        .collect();
    if used.len() < 5 {
        out.note = "too few samples with non-zero torsion".into();
        return Ok(out);
    }
    let positive = used.iter().filter(|&&i| tau[i] > 0.0).count();
    if positive != 0 && positive != used.len() {
        out.note = "torsion changes sign inside the window".into();
        return Ok(out);
    }
    let cs: Vec<f64> = used
        .iter()
        .map(|&i| invariant_c(kappa[i], kappa_prime[i], tau[i]))
        .collect::<Result<_>>()?;
    let c_mean = cs.iter().sum::<f64>() / cs.len() as f64;
    let c_med = median(&cs);
    let spread = cs.iter().map(|c| (c - c_med).abs()).fold(0.0, f64::max) / c_med.abs();

    // fourth-order residual on the full series; samples with τ ≈ 0 get NaN
    let safe_tau: Vec<f64> = tau
        .iter()
        .map(|&t| if t.abs() < cfg.tau_zero_tol { f64::NAN } else { t })
        .collect();
    let g: Vec<f64> = (0..kappa.len())
        .map(|i| kappa_prime[i] / (kappa[i] * kappa[i] * safe_tau[i]))
        .collect();
    let dg = stencil::derivative(&g, ds)?;
    out.fourth = used.iter().map(|&i| tau[i] / kappa[i] - dg[i]).collect();
    out.third = cs.iter().map(|c| c / c_mean - 1.0).collect();
    out.c_estimate = Some(c_mean);
    out.c_spread = Some(spread);

    let flat = used.iter().all(|&i| kappa_prime[i].abs() < cfg.kappa_prime_min);
    if spread < cfg.c_spread_tol && flat {
        // κ' ≡ 0: C is trivially constant, so the fourth-order residual decides
        let scale = median(&used.iter().map(|&i| (tau[i] / kappa[i]).abs()).collect::<Vec<_>>());
        let res = median(&out.fourth.iter().map(|r| r.abs()).collect::<Vec<_>>());
        if res > cfg.fourth_order_tol * scale {
            out.outcome = ScalarOutcome::NotUmbilical;
            out.note = format!("constant curvature with τ ≠ 0: fourth-order residual {res:.3e}");
        } else {
            out.outcome = ScalarOutcome::ConstantC;
            out.note = "constant curvature with vanishing fourth-order residual".into();
        }
    } else if spread < cfg.c_spread_tol {
        out.outcome = ScalarOutcome::ConstantC;
    } else {
        out.outcome = ScalarOutcome::NotUmbilical;
        let considered: Vec<f64> = used
            .iter()
            .zip(&out.fourth)
            .filter(|(&i, _)| kappa_prime[i].abs() >= cfg.kappa_prime_min)
            .map(|(_, r)| r.abs())
            .collect();
        let worst = considered.iter().copied().fold(0.0, f64::max);
        out.note = format!("C spread {spread:.3e} exceeds tolerance; max fourth-order residual {worst:.3e}");
    }
    out.used = used;
    Ok(out)
}

/// Result of reconstructing the surface from the constant vector `β`.
#[derive(Debug, Clone, PartialEq)]
pub struct Recovery {
    pub surface: UmbilicalSurface,
    /// Median of `β` before normalization.
    pub b: AmbientVector,
    /// Largest deviation of `β` from `b`, relative to `max(1, |b|)`.
    pub beta_spread: f64,
}

fn beta_median(curve: &SampledCurve, frenet: &FrenetData, idx: &[usize]) -> Result<(AmbientVector, f64)> {
    if idx.is_empty() {
        return Err(GeomError::Recovery("no samples to recover from".into()));
    }
    let mut betas = Vec::with_capacity(idx.len());
    for &i in idx {
        let (k, t) = (frenet.kappa[i], frenet.tau[i]);
        if t == 0.0 {
            return Err(GeomError::Recovery(format!("τ = 0 at sample {i}")));
        }
        let g = frenet.kappa_prime[i] / (k * k * t);
        betas.push(curve.point(i) + &frenet.normal[i] / k - &frenet.binormal[i] * g);
    }
    let dim = curve.dim();
    let b = DVector::from_fn(dim, |j, _| median(&betas.iter().map(|v| v[j]).collect::<Vec<_>>()));
    let scale = b.norm().max(1.0);
    let spread = betas.iter().map(|v| (v - &b).norm()).fold(0.0, f64::max) / scale;
    Ok((b, spread))
}

/// Builds the surface `U_{b,c}` from the recovered center vector.
fn surface_from_b(b: &AmbientVector, form: SpaceForm, c_est: f64, band: f64) -> Result<UmbilicalSurface> {
    match form {
        SpaceForm::Hyperbolic => {
            if (c_est - 1.0).abs() < band {
                UmbilicalSurface::horosphere_from_near_null(b, -1.0)
            } else {
                let s = classify_surface(b, -1.0, form)?;
                let expected = if c_est > 1.0 {
                    SurfaceKind::EquidistantSurface
                } else {
                    SurfaceKind::GeodesicSphereH3
                };
                if s.kind != expected {
                    return Err(GeomError::Recovery(format!(
                        "recovered {:?} contradicts C = {c_est}",
                        s.kind
                    )));
                }
                Ok(s)
            }
        }
        SpaceForm::Spherical => classify_surface(b, 1.0, form),
        SpaceForm::Euclidean => Err(GeomError::Recovery("no umbilical surface model for c = 0".into())),
    }
}

/// Recovers the umbilical surface containing a curve with `τ ≠ 0`, using every
/// centrally-differenced sample.
pub fn recover_surface(curve: &SampledCurve, frenet: &FrenetData) -> Result<Recovery> {
    let cfg = DetectConfig::default();
    let idx = window_indices(&frenet.s, &frenet.low_confidence, &cfg);
    recover_on(curve, frenet, &idx, &cfg)
}

fn recover_on(curve: &SampledCurve, frenet: &FrenetData, idx: &[usize], cfg: &DetectConfig) -> Result<Recovery> {
    if idx.iter().any(|&i| frenet.tau[i].abs() < cfg.tau_zero_tol) {
        return Err(GeomError::Recovery("torsion vanishes; use the totally geodesic branch".into()));
    }
    let (b, beta_spread) = beta_median(curve, frenet, idx)?;
    if beta_spread > cfg.beta_spread_tol {
        return Err(GeomError::Recovery(format!(
            "β is not constant (spread {beta_spread:.3e})"
        )));
    }
    let c_est = idx
        .iter()
        .map(|&i| invariant_c(frenet.kappa[i], frenet.kappa_prime[i], frenet.tau[i]))
        .sum::<Result<f64>>()?
        / idx.len() as f64;
    let surface = surface_from_b(&b, curve.form(), c_est, cfg.horosphere_band)?;
    Ok(Recovery {
        surface,
        b,
        beta_spread,
    })
}

pub fn detect(curve: &SampledCurve) -> Result<DetectionReport> {
    detect_with(curve, &DetectConfig::default())
}

/// Full pipeline: Frenet data, the torsion-free branch, constancy of `C`, and
/// surface recovery.
pub fn detect_with(curve: &SampledCurve, cfg: &DetectConfig) -> Result<DetectionReport> {
    let frenet = frenet_apparatus_with(
        curve,
        &FrenetOptions {
            kappa_min: cfg.kappa_min,
            execution: cfg.execution,
        },
    )?;
    detect_from_frenet(curve, &frenet, cfg)
}

/// Like [`detect_with`] but reuses precomputed Frenet data.
pub fn detect_from_frenet(curve: &SampledCurve, frenet: &FrenetData, cfg: &DetectConfig) -> Result<DetectionReport> {
    let form = curve.form();
    let idx = window_indices(&frenet.s, &frenet.low_confidence, cfg);
    let scalars = analyze_scalars(&frenet.kappa, &frenet.kappa_prime, &frenet.tau, frenet.ds, &idx, cfg)?;
    let mut report = base_report(form, &frenet.s, &scalars, cfg);
    let metric = Metric::new(form);

    match scalars.outcome {
        ScalarOutcome::TorsionFree => {
            // B is constant and orthogonal to the curve: α lies in U_{B,0}
            let dim = curve.dim();
            let b = DVector::from_fn(dim, |j, _| {
                median(&scalars.used.iter().map(|&i| frenet.binormal[i][j]).collect::<Vec<_>>())
            });
            let spread = scalars
                .used
                .iter()
                .map(|&i| (&frenet.binormal[i] - &b).norm())
                .fold(0.0, f64::max)
                / b.norm().max(1.0);
            report.recovered_b = Some(b.iter().copied().collect());
            report.beta_spread = Some(spread);
            if spread > cfg.beta_spread_tol {
                report.verdict = Verdict::Inconclusive;
                report.diagnostics.note = format!("τ ≈ 0 but B varies (spread {spread:.3e})");
                return Ok(report);
            }
            report.verdict = Verdict::TotallyGeodesic;
            report.diagnostics.note = format!("{}; plane orthogonal to B", scalars.note);
            if form.is_curved() {
                let s = classify_surface(&b, 0.0, form)?;
                let worst = scalars
                    .used
                    .iter()
                    .map(|&i| metric.dot(curve.point(i), &s.a).abs())
                    .fold(0.0, f64::max);
                if worst > cfg.beta_spread_tol {
                    report.verdict = Verdict::Inconclusive;
                    report.diagnostics.note = format!("τ ≈ 0 but <α, B> = {worst:.3e}");
                    return Ok(report);
                }
                report.recovered_surface = Some(s);
            }
            Ok(report)
        }
        ScalarOutcome::ConstantC => {
            let c_est = scalars.c_estimate.expect("constant C has an estimate");
            report.h_estimate = Some(1.0 / c_est.sqrt());
            let (b, spread) = beta_median(curve, frenet, &scalars.used)?;
            report.recovered_b = Some(b.iter().copied().collect());
            report.beta_spread = Some(spread);
            if spread > cfg.beta_spread_tol {
                report.verdict = Verdict::Inconclusive;
                report.diagnostics.note = format!("C is constant but β varies (spread {spread:.3e})");
                return Ok(report);
            }
            if form.is_curved() {
                match surface_from_b(&b, form, c_est, cfg.horosphere_band) {
                    Ok(s) => report.recovered_surface = Some(s),
                    Err(e) => {
                        report.verdict = Verdict::Inconclusive;
                        report.diagnostics.note = e.to_string();
                        return Ok(report);
                    }
                }
            } else {
                report.radius = Some(c_est.sqrt());
            }
            report.verdict = Verdict::UmbilicalNonGeodesic;
            Ok(report)
        }
        ScalarOutcome::NotUmbilical => {
            report.verdict = Verdict::NotUmbilical;
            Ok(report)
        }
        ScalarOutcome::Inconclusive => {
            report.verdict = Verdict::Inconclusive;
            Ok(report)
        }
    }
}

fn base_report(form: SpaceForm, s: &[f64], scalars: &ScalarAnalysis, cfg: &DetectConfig) -> DetectionReport {
    let window = match (scalars.used.first(), scalars.used.last()) {
        (Some(&a), Some(&b)) => (s[a], s[b]),
        _ => (f64::NAN, f64::NAN),
    };
    DetectionReport {
        verdict: Verdict::Inconclusive,
        c: form,
        c_estimate: scalars.c_estimate,
        c_spread: scalars.c_spread,
        h_estimate: None,
        radius: None,
        tau_mean: scalars.tau_mean,
        recovered_surface: None,
        recovered_b: None,
        beta_spread: None,
        residual_third_order: scalars.third.clone(),
        residual_fourth_order: scalars.fourth.clone(),
        diagnostics: Diagnostics {
            window,
            samples_used: scalars.used.len(),
            thresholds: *cfg,
            note: scalars.note.clone(),
        },
    }
}

/// Sphere test for a curve in `R^3` from its curvature, torsion and `κ'` series:
/// constant `C = R²`, or a plane when the torsion vanishes.
pub fn detect_euclidean(kappa: &[f64], kappa_prime: &[f64], tau: &[f64], ds: f64) -> Result<DetectionReport> {
    detect_euclidean_with(kappa, kappa_prime, tau, ds, &DetectConfig::default())
}

pub fn detect_euclidean_with(kappa: &[f64], kappa_prime: &[f64], tau: &[f64], ds: f64, cfg: &DetectConfig) -> Result<DetectionReport> {
    let n = kappa.len();
    if kappa_prime.len() != n || tau.len() != n {
        return Err(GeomError::DimensionMismatch {
            expected: n,
            found: if kappa_prime.len() != n { kappa_prime.len() } else { tau.len() },
        });
    }
    if n < 5 {
        return Err(GeomError::Stencil(format!("need at least 5 samples, got {n}")));
    }
    if let Some(i) = kappa.iter().position(|&k| !(k >= cfg.kappa_min)) {
        return Err(GeomError::GeodesicPoint {
            first: i,
            last: i,
            kappa_min: cfg.kappa_min,
        });
    }
    let s: Vec<f64> = (0..n).map(|i| i as f64 * ds).collect();
    let low: Vec<bool> = (0..n).map(|i| i < 2 || i + 2 >= n).collect();
    let idx = window_indices(&s, &low, cfg);
    let scalars = analyze_scalars(kappa, kappa_prime, tau, ds, &idx, cfg)?;
    let mut report = base_report(SpaceForm::Euclidean, &s, &scalars, cfg);
    report.verdict = match scalars.outcome {
        ScalarOutcome::TorsionFree => {
            report.diagnostics.note = format!("{}; planar curve", scalars.note);
            Verdict::TotallyGeodesic
        }
        ScalarOutcome::ConstantC => {
            let c = scalars.c_estimate.expect("constant C has an estimate");
            report.radius = Some(c.sqrt());
            report.h_estimate = Some(1.0 / c.sqrt());
            Verdict::UmbilicalNonGeodesic
        }
        ScalarOutcome::NotUmbilical => Verdict::NotUmbilical,
        ScalarOutcome::Inconclusive => Verdict::Inconclusive,
    };
    Ok(report)
}

/// Linear relation `Σ a_i κ_i + σ = 0` among rotation-minimizing curvatures.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LinearRelation {
    /// Coefficients `a_i`, normalized to unit length.
    pub coefficients: Vec<f64>,
    pub sigma: f64,
    /// Smallest singular value of the sample matrix over `sqrt(samples)`.
    pub residual: f64,
    /// All singular values of the sample matrix, descending.
    pub singular_values: Vec<f64>,
    pub samples_used: usize,
}

/// Singular values below this (after dividing by `sqrt(samples)`) count as zero
/// when checking whether the relation is unique.
pub const RELATION_NULL_TOL: f64 = 1e-6;

/// Least-squares fit of `Σ a_i κ_i + σ = 0` over the centrally-differenced samples.
///
/// The sample matrix `K` has rows `(κ_1, ..., κ_n, 1)`; the minimizer over unit
/// vectors is the right singular vector of its smallest singular value,
/// computed from a thin QR factorization followed by an SVD of `R`.
pub fn detect_rm_linear_relation(rm: &RMData) -> Result<LinearRelation> {
    let n = rm.normal_count();
    let idx: Vec<usize> = (0..rm.len()).filter(|&i| !rm.low_confidence[i]).collect();
    let m = idx.len();
    if m < n + 2 {
        return Err(GeomError::InvalidInput(format!(
            "need at least {} interior samples, got {m}",
            n + 2
        )));
    }
    let k = DMatrix::from_fn(m, n + 1, |r, col| if col < n { rm.kappas[idx[r]][col] } else { 1.0 });
    let r = k.qr().r();
    let svd = r.svd(false, true);
    let v_t = svd
        .v_t
        .as_ref()
        .ok_or_else(|| GeomError::Degenerate("SVD did not converge".into()))?;
    let mut order: Vec<usize> = (0..svd.singular_values.len()).collect();
    order.sort_by(|&a, &b| svd.singular_values[b].total_cmp(&svd.singular_values[a]));
    let singular_values: Vec<f64> = order.iter().map(|&j| svd.singular_values[j]).collect();
    let root_m = (m as f64).sqrt();
    let zeros = singular_values.iter().filter(|&&s| s / root_m < RELATION_NULL_TOL).count();
    if zeros > 1 {
        return Err(GeomError::AmbiguousRelation(zeros));
    }
    let last = *order.last().expect("non-empty spectrum");
    let v = v_t.row(last).transpose();
    let a_norm = v.rows(0, n).norm();
    if a_norm < 1e-12 {
        return Err(GeomError::Degenerate("relation has no curvature terms".into()));
    }
    // fix the overall sign so the largest coefficient is positive
    let mut sign = 1.0;
    let lead = (0..n).max_by(|&a, &b| v[a].abs().total_cmp(&v[b].abs())).unwrap_or(0);
    if v[lead] < 0.0 {
        sign = -1.0;
    }
    Ok(LinearRelation {
        coefficients: (0..n).map(|j| sign * v[j] / a_norm).collect(),
        sigma: sign * v[n] / a_norm,
        residual: singular_values[singular_values.len() - 1] / root_m,
        singular_values,
        samples_used: m,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::frames::{frenet_apparatus, rm_apparatus};
    use crate::synth::{oracle_circle_s3, synthesize_horosphere, HorosphereParams};
    use std::f64::consts::PI;

    #[test]
    fn invariant_c_examples() {
        for s in [0.3, 1.0, 2.0, 2.8] {
            let (sn, cs) = f64::sin_cos(s);
            let c = invariant_c(1.0 / sn, -cs / (sn * sn), 1.0).unwrap();
            assert!((c - 1.0).abs() < 1e-12);
            let h = 1.0 / 3f64.sqrt();
            let (sn2, cs2) = f64::sin_cos(2.0 * s);
            if sn2 > 0.0 {
                let c = invariant_c(h / sn2, -2.0 * h * cs2 / (sn2 * sn2), 2.0).unwrap();
                assert!((c - 3.0).abs() < 1e-10);
            }
        }
        assert!((invariant_c(2.0, 0.0, 1.0).unwrap() - 0.25).abs() < 1e-15);
        assert!(matches!(invariant_c(1.0, 0.0, 0.0), Err(GeomError::UndefinedInvariant(_))));
    }

    #[test]
    fn fourth_order_residual_examples() {
        let ds = 1e-3;
        let s: Vec<f64> = (0..1000).map(|i| 0.5 + i as f64 * ds).collect();
        let k: Vec<f64> = s.iter().map(|s| 1.0 / s.sin()).collect();
        let kp: Vec<f64> = s.iter().map(|s| -s.cos() / s.sin().powi(2)).collect();
        let t = vec![1.0; s.len()];
        let r = fourth_order_residual(&k, &kp, &t, ds).unwrap();
        assert!(r.iter().all(|r| r.abs() < 1e-3));

        let (k0, t0) = (2.0, 0.5);
        let r = fourth_order_residual(&[k0; 10], &[0.0; 10], &[t0; 10], ds).unwrap();
        assert!(r.iter().all(|r| (r - t0 / k0).abs() < 1e-12));
        assert!(fourth_order_residual(&[1.0; 2], &[0.0; 2], &[1.0; 2], ds).is_err());
        assert!(fourth_order_residual(&[1.0; 5], &[0.0; 5], &[0.0; 5], ds).is_err());
    }

    #[test]
    fn horosphere_round_trip() {
        let s = synthesize_horosphere(&HorosphereParams::figure(1.0)).unwrap();
        let r = detect(&s.curve).unwrap();
        assert_eq!(r.verdict, Verdict::UmbilicalNonGeodesic);
        let surf = r.recovered_surface.unwrap();
        assert_eq!(surf.kind, SurfaceKind::Horosphere);
        assert!((r.c_estimate.unwrap() - 1.0).abs() < 1e-3);
    }

    #[test]
    fn circle_is_totally_geodesic() {
        let c = oracle_circle_s3(3f64.sqrt() / 2.0, 1e-3, 500).unwrap();
        let r = detect(&c).unwrap();
        assert_eq!(r.verdict, Verdict::TotallyGeodesic);
        let s = r.recovered_surface.unwrap();
        assert_eq!(s.kind, SurfaceKind::TotallyGeodesicSphere);
        assert!(s.sigma == 0.0);
    }

    #[test]
    fn recovery_rejects_torsion_free_curves() {
        let c = oracle_circle_s3(0.6, 1e-3, 300).unwrap();
        let f = frenet_apparatus(&c).unwrap();
        assert!(matches!(recover_surface(&c, &f), Err(GeomError::Recovery(_))));
    }

    #[test]
    fn euclidean_sphere_and_helix() {
        for (r, tau) in [(1.0, 1.0), (2.0, 2.0)] {
            let ds = 1e-3;
            let n = (0.7 * PI / tau / ds) as usize;
            let s: Vec<f64> = (0..n).map(|i| 0.15 * PI / tau + i as f64 * ds).collect();
            let k: Vec<f64> = s.iter().map(|s| 1.0 / (r * (tau * s).sin())).collect();
            let kp: Vec<f64> = s
                .iter()
                .map(|s| -tau * (tau * s).cos() / (r * (tau * s).sin().powi(2)))
                .collect();
            let t = vec![tau; n];
            let rep = detect_euclidean(&k, &kp, &t, ds).unwrap();
            assert_eq!(rep.verdict, Verdict::UmbilicalNonGeodesic);
            assert!((rep.c_estimate.unwrap() - r * r).abs() < 1e-6);
        }
        let rep = detect_euclidean(&[2.0; 50], &[0.0; 50], &[0.5; 50], 1e-2).unwrap();
        assert_eq!(rep.verdict, Verdict::NotUmbilical);
        assert!(rep.residual_fourth_order.iter().all(|r| (r - 0.25).abs() < 1e-6));
        let rep = detect_euclidean(&[2.0; 50], &[0.0; 50], &[0.0; 50], 1e-2).unwrap();
        assert_eq!(rep.verdict, Verdict::TotallyGeodesic);
    }

    #[test]
    fn rm_relation_on_great_sphere() {
        // curve on x4 = 0: α = (cos t cos u, cos t sin u, sin t, 0)-type, non-circular
        let ds = 1e-3;
        let pts: Vec<AmbientVector> = (0..3000)
            .map(|i| {
                let t = i as f64 * ds;
                let v = DVector::from_vec(vec![t.cos() + 0.3, (1.3 * t).sin(), 0.4 * (0.7 * t).cos() + 0.2, 0.0]);
                &v / v.norm()
            })
            .collect();
        let c = crate::frames::arclength_reparametrize(&pts, SpaceForm::Spherical, Some(ds)).unwrap();
        let rm = rm_apparatus(&c, None).unwrap();
        let rel = detect_rm_linear_relation(&rm).unwrap();
        assert!(rel.residual < 1e-6, "residual {}", rel.residual);
        assert!(rel.sigma.abs() < 1e-6);
    }

    #[test]
    fn serialized_report_has_expected_keys() {
        let s = synthesize_horosphere(&HorosphereParams::figure(1.0)).unwrap();
        let r = detect(&s.curve).unwrap();
        let v = serde_json::to_value(&r).unwrap();
        for key in ["verdict", "C_estimate", "C_spread", "H_estimate", "recovered_surface", "diagnostics"] {
            assert!(v.get(key).is_some(), "{key}");
        }
        assert_eq!(v["verdict"], "UmbilicalNonGeodesic");
        assert_eq!(v["recovered_surface"]["kind"], "Horosphere");
    }
}
