use nalgebra::DVector;

use umbilic_core::detect::{detect_rm_linear_relation, detect_with, DetectConfig, Verdict};
use umbilic_core::frames::{frenet_apparatus_with, rm_apparatus_with, FrenetOptions};
use umbilic_core::io::{read_curve, read_upper_halfspace, write_curve, write_upper_halfspace};
use umbilic_core::spaceform::{classify_surface, SpaceForm, SurfaceKind};
use umbilic_core::synth::{synthesize_horosphere, synthesize_on_surface, torus_curve_s4, HorosphereParams, SurfaceCurveParams};
use umbilic_core::Execution;

#[test]
fn sequential_and_parallel_agree_bitwise() {
    let curve = synthesize_horosphere(&HorosphereParams::figure(1.0)).unwrap().curve;
    let run = |execution| {
        let f = frenet_apparatus_with(&curve, &FrenetOptions { execution, ..Default::default() }).unwrap();
        let cfg = DetectConfig { execution, ..Default::default() };
        (f, detect_with(&curve, &cfg).unwrap())
    };
    let (fs, ds) = run(Execution::Sequential);
    let (fp, dp) = run(Execution::Parallel);
    assert_eq!(fs.kappa, fp.kappa);
    assert_eq!(fs.tau, fp.tau);
    assert_eq!(ds.c_estimate, dp.c_estimate);
    assert_eq!(ds.verdict, Verdict::UmbilicalNonGeodesic);

    let torus = torus_curve_s4(0.5, 0.6, 1.0, 2.3, 1e-3, 1500).unwrap();
    let a = rm_apparatus_with(&torus, None, Execution::Sequential).unwrap();
    let b = rm_apparatus_with(&torus, None, Execution::Parallel).unwrap();
    assert_eq!(a.kappas, b.kappas);
    assert_eq!(
        detect_rm_linear_relation(&a).unwrap().coefficients,
        detect_rm_linear_relation(&b).unwrap().coefficients
    );
}

#[test]
fn file_round_trip_preserves_the_verdict() {
    let surface = classify_surface(&DVector::from_vec(vec![1.0, 0.0, 0.0, 0.0]), 1.5, SpaceForm::Hyperbolic).unwrap();
    let curve = synthesize_on_surface(&SurfaceCurveParams::new(surface, 1.0)).unwrap().curve;
    let back = read_curve(&write_curve(&curve)).unwrap();
    let uhs = read_upper_halfspace(&write_upper_halfspace(&curve).unwrap()).unwrap();
    for c in [back, uhs] {
        let rep = detect_with(&c, &DetectConfig::default()).unwrap();
        assert_eq!(rep.verdict, Verdict::UmbilicalNonGeodesic);
        assert_eq!(rep.recovered_surface.unwrap().kind, SurfaceKind::EquidistantSurface);
        assert!((rep.h_estimate.unwrap().abs() - 1.5 / 3.25f64.sqrt()).abs() < 1e-3);
    }
}
