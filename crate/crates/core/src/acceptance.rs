//! End-to-end checks shared by the `acceptance` test target and `umbilic selftest`.
//!
//! Every check compares against an independent closed form (curvature
//! formulas, mean curvatures computed from `σ` and `ε` directly), never against
//! the code path under test.

use std::f64::consts::PI;
use std::time::{Duration, Instant};

use nalgebra::{DMatrix, DVector};

use crate::detect::{detect, detect_euclidean, detect_rm_linear_relation, detect_with, fourth_order_residual, invariant_c, DetectConfig, Verdict};
use crate::error::Result;
use crate::frames::{arclength_reparametrize, frenet_apparatus, rm_apparatus, SampledCurve};
use crate::spaceform::{classify_surface, random_isometry, AmbientVector, Metric, SpaceForm, SurfaceKind};
use crate::synth::{
    synthesize_geodesic_sphere_s3, synthesize_horosphere, synthesize_on_surface, torus_curve_s4, HorosphereParams,
    SphereParams, SurfaceCurveParams,
};

#[derive(Debug, Clone, PartialEq)]
pub struct CriterionResult {
    pub id: u8,
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
    pub elapsed: Duration,
}

impl CriterionResult {
    pub fn line(&self) -> String {
        format!(
            "[{}] criterion {}: {} ({:.2?}) {}",
            if self.passed { "PASS" } else { "FAIL" },
            self.id,
            self.name,
            self.elapsed,
            self.detail
        )
    }
}

#[derive(Debug, Clone, Copy)]
pub struct Options {
    /// Arc-length step for the round-trip criteria.
    pub ds: f64,
    /// Base seed for the random isometries and frame rotations.
    pub seed: u64,
}

impl Default for Options {
    fn default() -> Self {
        Options { ds: 1e-3, seed: 1 }
    }
}

/// Collects named checks; the criterion passes when all of them hold.
struct Checks {
    failures: Vec<String>,
    notes: Vec<String>,
}

impl Checks {
    fn new() -> Self {
        Checks {
            failures: Vec::new(),
            notes: Vec::new(),
        }
    }

    fn check(&mut self, ok: bool, what: String) {
        if ok {
            self.notes.push(what);
        } else {
            self.failures.push(what);
        }
    }

    fn fail(&mut self, what: String) {
        self.failures.push(what);
    }

    fn finish(self, id: u8, name: &'static str, start: Instant) -> CriterionResult {
        let passed = self.failures.is_empty();
        let detail = if passed {
            self.notes.join("; ")
        } else {
            format!("failed: {}", self.failures.join("; "))
        };
        CriterionResult {
            id,
            name,
            passed,
            detail,
            elapsed: start.elapsed(),
        }
    }
}

fn run<F>(id: u8, name: &'static str, body: F) -> CriterionResult
where
    F: FnOnce(&mut Checks) -> Result<()>,
{
    let start = Instant::now();
    let mut checks = Checks::new();
    if let Err(e) = body(&mut checks) {
        checks.fail(format!("error: {e}"));
    }
    checks.finish(id, name, start)
}

fn max_over<I: Iterator<Item = f64>>(it: I) -> f64 {
    it.fold(0.0, f64::max)
}

/// Horosphere round trip with the planar example's initial data.
pub fn criterion_1(opts: &Options) -> CriterionResult {
    run(1, "horosphere round trip", |ck| {
        let start = Instant::now();
        let mut p = HorosphereParams::figure(1.0);
        p.ds = opts.ds;
        p.s_range = (0.15 * PI, 0.85 * PI);
        let syn = synthesize_horosphere(&p)?;
        let frenet = frenet_apparatus(&syn.curve)?;
        let report = detect(&syn.curve)?;
        let elapsed = start.elapsed();

        let kerr = max_over(frenet.trusted().map(|i| (frenet.kappa[i] * frenet.s[i].sin() - 1.0).abs()));
        let terr = max_over(frenet.trusted().map(|i| (frenet.tau[i] - 1.0).abs()));
        ck.check(kerr < 1e-3, format!("max rel κ error {kerr:.2e}"));
        ck.check(terr < 1e-3, format!("max |τ - 1| {terr:.2e}"));
        let kind = report.recovered_surface.as_ref().map(|s| s.kind);
        ck.check(
            report.verdict == Verdict::UmbilicalNonGeodesic && kind == Some(SurfaceKind::Horosphere),
            format!("verdict {:?} kind {:?}", report.verdict, kind),
        );
        let c = report.c_estimate.unwrap_or(f64::NAN);
        ck.check((c - 1.0).abs() < 2e-3, format!("|C - 1| {:.2e}", (c - 1.0).abs()));
        match &report.recovered_b {
            Some(b) => {
                let b = DVector::from_vec(b.clone());
                let m = Metric::new(SpaceForm::Hyperbolic);
                let ab = max_over(syn.curve.points().iter().map(|a| (m.dot(a, &b) + 1.0).abs()));
                let bb = m.norm_sq(&b).abs();
                ck.check(ab < 1e-5, format!("max |<α,b> + 1| {ab:.2e}"));
                ck.check(bb < 1e-5, format!("|<b,b>| {bb:.2e}"));
            }
            None => ck.fail("no recovered b".into()),
        }
        ck.check(elapsed < Duration::from_secs(1), format!("runtime {elapsed:.2?}"));
        Ok(())
    })
}

/// Sphere round trip in `S^3` for `τ = 1` and `τ = 2`.
pub fn criterion_2(opts: &Options) -> CriterionResult {
    run(2, "S^3 geodesic sphere round trip", |ck| {
        for tau in [1.0, 2.0] {
            let start = Instant::now();
            let mut p = SphereParams::figure(tau);
            p.ds = opts.ds;
            let syn = synthesize_geodesic_sphere_s3(&p)?;
            let report = detect(&syn.curve)?;
            let elapsed = start.elapsed();
            ck.check(
                syn.constraint_drift < 1e-6,
                format!("τ={tau}: drift {:.2e}", syn.constraint_drift),
            );
            let c = report.c_estimate.unwrap_or(f64::NAN);
            ck.check(
                report.verdict == Verdict::UmbilicalNonGeodesic && (c - 3.0).abs() < 0.03,
                format!("τ={tau}: {:?} C = {c:.6}", report.verdict),
            );
            let sigma = report.recovered_surface.as_ref().map_or(f64::NAN, |s| s.sigma);
            ck.check((sigma - 0.5).abs() < 0.005, format!("τ={tau}: σ = {sigma:.6}"));
            ck.check(
                elapsed < Duration::from_secs(2),
                format!("τ={tau}: runtime {elapsed:.2?}"),
            );
        }
        Ok(())
    })
}

/// Kind and `|H|` recovery over equidistant surfaces, a horosphere and geodesic spheres of `H^3`.
pub fn criterion_3(opts: &Options) -> CriterionResult {
    run(3, "classification grid", |ck| {
        let e1 = vec![1.0, 0.0, 0.0, 0.0];
        let e4_past = vec![0.0, 0.0, 0.0, -1.0];
        // (normal, σ, ε, expected kind)
        let mut cases: Vec<(Vec<f64>, f64, f64, SurfaceKind)> = Vec::new();
        for sigma in [1.2, 1.5, 2.0] {
            cases.push((e1.clone(), sigma, 1.0, SurfaceKind::EquidistantSurface));
        }
        cases.push((vec![0.0, 0.0, 1.0, -1.0], 1.0, 0.0, SurfaceKind::Horosphere));
        for sigma in [1.5, 2.0] {
            cases.push((e4_past.clone(), sigma, -1.0, SurfaceKind::GeodesicSphereH3));
        }
        let mut correct = 0;
        for (a, sigma, eps, kind) in &cases {
            let surface = classify_surface(&DVector::from_vec(a.clone()), *sigma, SpaceForm::Hyperbolic)?;
            let curve = if *kind == SurfaceKind::Horosphere {
                let mut p = HorosphereParams::figure(1.0);
                p.ds = opts.ds;
                synthesize_horosphere(&p)?.curve
            } else {
                let mut p = SurfaceCurveParams::new(surface, 1.0);
                p.ds = opts.ds;
                synthesize_on_surface(&p)?.curve
            };
            let report = detect(&curve)?;
            // |H| = |σ| / sqrt(ε + σ²), with |H| = 1 for horospheres
            let h_expected = if *eps == 0.0 { 1.0 } else { sigma.abs() / (eps + sigma * sigma).sqrt() };
            let (got_kind, h) = match &report.recovered_surface {
                Some(s) => (Some(s.kind), s.mean_curvature.abs()),
                None => (None, f64::NAN),
            };
            let ok_kind = got_kind == Some(*kind);
            let ok_h = (h - h_expected).abs() < 0.01 * h_expected;
            if ok_kind {
                correct += 1;
            }
            ck.check(
                ok_kind && ok_h,
                format!("{kind:?} σ={sigma}: got {got_kind:?} |H|={h:.5} (expected {h_expected:.5})"),
            );
        }
        ck.check(correct == cases.len(), format!("kind accuracy {correct}/{}", cases.len()));
        Ok(())
    })
}

/// Rotation of the normal frame `normals` by the orthogonal matrix `q`.
fn rotate_frame(normals: &[AmbientVector], q: &DMatrix<f64>) -> Vec<AmbientVector> {
    (0..normals.len())
        .map(|j| {
            let mut v = DVector::zeros(normals[0].len());
            for (k, n) in normals.iter().enumerate() {
                v.axpy(q[(j, k)], n, 1.0);
            }
            v
        })
        .collect()
}

/// Linear relation among rotation-minimizing curvatures in `S^4`.
pub fn criterion_4(opts: &Options) -> CriterionResult {
    run(4, "RM linear relation in S^4", |ck| {
        let curve = torus_curve_s4(0.5, 0.6, 1.0, 2.3, opts.ds, 4000)?;
        let rm = rm_apparatus(&curve, None)?;
        let rel = detect_rm_linear_relation(&rm)?;
        ck.check(rel.residual < 1e-4, format!("residual {:.2e}", rel.residual));
        // |H| of x5 = 1/2 in S^4 is σ/sqrt(1 - σ²) = 1/√3
        let h = 0.5 / 0.75f64.sqrt();
        ck.check(
            (rel.sigma.abs() - h).abs() < 1e-3,
            format!("|σ| = {:.6} (expected {h:.6})", rel.sigma.abs()),
        );

        let q = random_isometry(SpaceForm::Spherical, 3, opts.seed.max(1)).matrix;
        let rotated = rotate_frame(&rm.normals[0], &q);
        let rm2 = rm_apparatus(&curve, Some(&rotated))?;
        let rel2 = detect_rm_linear_relation(&rm2)?;
        let change = (rel2.residual - rel.residual).abs();
        ck.check(change < 1e-10, format!("residual change under frame rotation {change:.2e}"));

        // negative control: a generic curve, resampled by arc length
        let pts: Vec<AmbientVector> = (0..4000)
            .map(|i| {
                let t = i as f64 * 1e-3;
                let v = DVector::from_vec(vec![t.cos(), (2.0 * t).sin(), 0.3 * (3.0 * t).cos(), 0.5 * t.sin(), 1.0 + 0.2 * t]);
                &v / v.norm()
            })
            .collect();
        let generic = arclength_reparametrize(&pts, SpaceForm::Spherical, Some(1e-3))?;
        let neg = detect_rm_linear_relation(&rm_apparatus(&generic, None)?)?;
        ck.check(neg.residual > 1e-2, format!("negative control residual {:.2e}", neg.residual));
        Ok(())
    })
}

/// `C'` factorizes through the fourth-order residual.
pub fn criterion_5(_opts: &Options) -> CriterionResult {
    run(5, "derivative identity", |ck| {
        // closed-form κ, κ', κ''; the second family is not umbilical
        type Family = fn(f64) -> (f64, f64, f64);
        let families: [(&str, Family); 2] = [
            ("κ = 1/sin s", |s| {
                let (sn, cs) = s.sin_cos();
                (1.0 / sn, -cs / (sn * sn), (1.0 + cs * cs) / (sn * sn * sn))
            }),
            ("κ = 1/sin s + cos(3s)/5", |s| {
                let (sn, cs) = s.sin_cos();
                (
                    1.0 / sn + 0.2 * (3.0 * s).cos(),
                    -cs / (sn * sn) - 0.6 * (3.0 * s).sin(),
                    (1.0 + cs * cs) / (sn * sn * sn) - 1.8 * (3.0 * s).cos(),
                )
            }),
        ];
        let tau = 1.0;
        for (name, f) in families {
            let mut worst: f64 = 0.0;
            for k in 0..200 {
                let s = 0.5 + k as f64 * (PI - 1.0) / 199.0;
                let (kp, kpp) = (f(s).1, f(s).2);
                let kappa = f(s).0;
                // dC/ds by a fine central difference of the closed-form C
                let h = 1e-5;
                let c = |x: f64| invariant_c(f(x).0, f(x).1, tau);
                let dc = (c(s + h)? - c(s - h)?) / (2.0 * h);
                let residual = tau / kappa - (kpp * kappa - 2.0 * kp * kp) / (kappa.powi(3) * tau);
                let rhs = -2.0 * kp / (tau * kappa * kappa) * residual;
                worst = worst.max((dc - rhs).abs());
            }
            ck.check(worst < 1e-6, format!("{name}: identity error {worst:.2e}"));
        }
        let ds = 1e-3;
        let s: Vec<f64> = (0..2000).map(|i| 0.5 + i as f64 * ds).collect();
        let k: Vec<f64> = s.iter().map(|s| 1.0 / s.sin()).collect();
        let kp: Vec<f64> = s.iter().map(|s| -s.cos() / s.sin().powi(2)).collect();
        let res = fourth_order_residual(&k, &kp, &vec![tau; s.len()], ds)?;
        let worst = max_over(res.iter().map(|r| r.abs()));
        ck.check(worst < 1e-3, format!("finite-difference residual {worst:.2e}"));
        Ok(())
    })
}

/// Spheres and helices in `R^3`.
pub fn criterion_6(opts: &Options) -> CriterionResult {
    run(6, "Euclidean baseline", |ck| {
        for r in [1.0, 2.0] {
            for tau in [1.0, 2.0] {
                let ds = opts.ds;
                let (lo, hi) = (0.15 * PI / tau, 0.85 * PI / tau);
                let n = ((hi - lo) / ds) as usize;
                let s: Vec<f64> = (0..n).map(|i| lo + i as f64 * ds).collect();
                let k: Vec<f64> = s.iter().map(|s| 1.0 / (r * (tau * s).sin())).collect();
                let kp: Vec<f64> = s
                    .iter()
                    .map(|s| -tau * (tau * s).cos() / (r * (tau * s).sin().powi(2)))
                    .collect();
                let rep = detect_euclidean(&k, &kp, &vec![tau; n], ds)?;
                let c = rep.c_estimate.unwrap_or(f64::NAN);
                ck.check(
                    rep.verdict == Verdict::UmbilicalNonGeodesic && (c - r * r).abs() < 1e-6,
                    format!("R={r} τ={tau}: C - R² = {:.2e}", c - r * r),
                );
            }
        }
        // circular helix with κ = 2, τ = 1/2: closed-form series, then sampled in space
        let (kappa, tau): (f64, f64) = (2.0, 0.5);
        let n = 3000;
        let rep = detect_euclidean(&vec![kappa; n], &vec![0.0; n], &vec![tau; n], opts.ds)?;
        let dev = max_over(rep.residual_fourth_order.iter().map(|r| (r - tau / kappa).abs()));
        ck.check(
            rep.verdict == Verdict::NotUmbilical && dev < 1e-6,
            format!("helix series {:?}, residual - τ/κ up to {dev:.2e}", rep.verdict),
        );
        let w2 = kappa * kappa + tau * tau;
        let (a, b) = (kappa / w2, tau / w2);
        let w = w2.sqrt();
        let ds = opts.ds;
        let pts: Vec<AmbientVector> = (0..n)
            .map(|i| {
                let t = i as f64 * ds * w;
                DVector::from_vec(vec![a * t.cos(), a * t.sin(), b * t])
            })
            .collect();
        let helix = SampledCurve::new(SpaceForm::Euclidean, 0.0, ds, pts)?;
        let rep = detect(&helix)?;
        ck.check(
            rep.verdict == Verdict::NotUmbilical,
            format!("sampled helix {:?}", rep.verdict),
        );
        Ok(())
    })
}

/// Frame drift, isometry invariance and step-size convergence.
pub fn criterion_7(opts: &Options) -> CriterionResult {
    run(7, "robustness", |ck| {
        // long run: 10^4+ samples on an equidistant surface of H^3
        let surface = classify_surface(&DVector::from_vec(vec![1.0, 0.0, 0.0, 0.0]), 1.5, SpaceForm::Hyperbolic)?;
        let mut p = SurfaceCurveParams::new(surface, 1.0);
        p.ds = 2e-4;
        let long = synthesize_on_surface(&p)?.curve;
        let rm = rm_apparatus(&long, None)?;
        let drift = rm.max_orthonormality_defect();
        ck.check(
            long.len() >= 10_000 && drift < 1e-6,
            format!("RM frame drift {drift:.2e} over {} samples", long.len()),
        );
        let frenet = frenet_apparatus(&long)?;
        let m = long.metric();
        let mut fdrift: f64 = 0.0;
        for i in 0..frenet.len() {
            let frame = [long.point(i), &frenet.tangent[i], &frenet.normal[i], &frenet.binormal[i]];
            let gram = [-1.0, 1.0, 1.0, 1.0];
            for x in 0..4 {
                for y in x..4 {
                    let target = if x == y { gram[x] } else { 0.0 };
                    fdrift = fdrift.max((m.dot(frame[x], frame[y]) - target).abs());
                }
            }
        }
        ck.check(fdrift < 1e-6, format!("Frenet frame drift {fdrift:.2e}"));

        let mut hp = HorosphereParams::figure(1.0);
        hp.ds = opts.ds;
        let mut sp = SphereParams::figure(1.0);
        sp.ds = opts.ds;
        let bases = [
            synthesize_horosphere(&hp)?.curve,
            synthesize_geodesic_sphere_s3(&sp)?.curve,
        ];
        for base in &bases {
            let r0 = detect(base)?;
            let c0 = r0.c_estimate.unwrap_or(f64::NAN);
            let mut worst: f64 = 0.0;
            let mut same = true;
            for k in 0..20u64 {
                let iso = random_isometry(base.form(), 4, opts.seed.wrapping_mul(1000).wrapping_add(k + 1));
                let r = detect(&base.transformed(&iso)?)?;
                same &= r.verdict == r0.verdict;
                worst = worst.max((r.c_estimate.unwrap_or(f64::NAN) - c0).abs());
            }
            ck.check(
                same && worst < 1e-8,
                format!("c={}: 20 isometries, same verdict {same}, max ΔC {worst:.2e}", base.form()),
            );
        }

        // halving ds: curvature error and C error on the horosphere example
        let errors = |ds: f64| -> Result<(f64, f64)> {
            let mut p = HorosphereParams::figure(1.0);
            p.ds = ds;
            let c = synthesize_horosphere(&p)?.curve;
            let f = frenet_apparatus(&c)?;
            let ek = max_over(f.trusted().map(|i| (f.kappa[i] * f.s[i].sin() - 1.0).abs()));
            let r = detect_with(&c, &DetectConfig::default())?;
            Ok((ek, (r.c_estimate.unwrap_or(f64::NAN) - 1.0).abs()))
        };
        let (k1, c1) = errors(opts.ds)?;
        let (k2, c2) = errors(opts.ds / 2.0)?;
        ck.check(k1 / k2 >= 3.0, format!("κ error ratio {:.2}", k1 / k2));
        ck.check(c1 / c2 >= 3.0, format!("C error ratio {:.2}", c1 / c2));
        Ok(())
    })
}

/// Runs criteria 1–7 and then criterion 8 (total time, zero failures).
pub fn run_all(opts: &Options) -> Vec<CriterionResult> {
    let start = Instant::now();
    let runners: [fn(&Options) -> CriterionResult; 7] = [
        criterion_1,
        criterion_2,
        criterion_3,
        criterion_4,
        criterion_5,
        criterion_6,
        criterion_7,
    ];
    let mut results: Vec<CriterionResult> = runners.iter().map(|f| f(opts)).collect();
    let total = start.elapsed();
    let failures = results.iter().filter(|r| !r.passed).count();
    results.push(CriterionResult {
        id: 8,
        name: "selftest",
        passed: failures == 0 && total < Duration::from_secs(60),
        detail: format!("{failures} failures, total {total:.2?}"),
        elapsed: total,
    });
    results
}
