use num_complex::Complex64 as C64;
use proptest::prelude::*;
use surface_kz::linalg::{q, qf, Q};
use surface_kz::quad::Quadrature;
use surface_kz::schottky::checks::{forms_suite, residue_formula_residual};
use surface_kz::schottky::{f_coeff, CurveConfig, FormEvaluator, GroupWord, SchottkyGroup};

fn c(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

#[test]
fn mobius_examples() {
    let g = SchottkyGroup::default_for(2).unwrap();
    let z = c(0.4, 1.3);
    assert_eq!(g.mobius_apply(&GroupWord::identity(), z), z);
    for a in 0..2 {
        let h = g.handle(a);
        assert!((g.mobius_apply(&GroupWord::generator(a, 1), h.alpha) - h.alpha).norm() < 1e-13);
        assert!(g.cross_ratio_residual(a, z) < 1e-12);
    }
}

#[test]
fn f_examples() {
    let w = GroupWord::from_runs(&[(1, -2), (0, 3)]);
    assert_eq!(f_coeff(&[], &w), q(1));
    for lam in [-3i64, -1, 2, 5] {
        let w = GroupWord::generator(0, lam);
        assert_eq!(f_coeff(&[0], &w), q(-lam));
        assert_eq!(f_coeff(&[1], &w), q(0));
        assert_eq!(f_coeff(&[0, 0], &w), qf(lam * lam, 2));
    }
}

#[test]
fn psi_leading_term_is_the_log_bidifferential() {
    let g = SchottkyGroup::default_for(1).unwrap();
    let ev = FormEvaluator::new(&g, 0, 1);
    let (z, w) = (c(0.1, 1.4), c(-0.3, -1.2));
    let v = ev.psi(&[], z, w).unwrap().value;
    assert!((v - 1.0 / ((z - w) * (z - w))).norm() < 1e-15);
    assert!(ev.psi(&[], z, z).is_err());
    // s ≥ 1 is regular on the diagonal
    let full = FormEvaluator::new(&g, 8, 1);
    assert!(full.psi(&[0], z, z).unwrap().value.is_finite());
}

#[test]
fn psi3_vanishes_for_equal_endpoints() {
    let g = SchottkyGroup::default_for(2).unwrap();
    let ev = FormEvaluator::new(&g, 4, 2);
    let v = ev.psi3(&[0, 1], c(0.2, 1.5), c(-0.5, -1.0), c(-0.5, -1.0)).unwrap();
    assert_eq!(v.value, C64::new(0.0, 0.0));
}

#[test]
fn genus_one_period_is_log_q() {
    let g = SchottkyGroup::default_for(1).unwrap();
    let ev = FormEvaluator::new(&g, 8, 0);
    let pm = ev.period_matrix(c(0.0, -2.0), &Quadrature::new(32, 8)).unwrap();
    let expect = C64::new(0.1, 0.0).ln() / (2.0 * std::f64::consts::PI * C64::i());
    let d = pm.tau[0][0] - expect;
    assert!((d - d.re.round()).norm() < 1e-7, "{:?}", pm.tau);
    assert!(!pm.degenerate);
}

#[test]
fn genus_two_period_matrix_is_symmetric() {
    let g = SchottkyGroup::default_for(2).unwrap();
    let ev = FormEvaluator::new(&g, 6, 0);
    let pm = ev.period_matrix(c(0.0, -2.0), &Quadrature::new(32, 8)).unwrap();
    assert!(pm.symmetry_residual < 1e-6);
}

#[test]
fn residue_formula_for_holomorphic_and_polar_forms() {
    let g = SchottkyGroup::default_for(1).unwrap();
    let ev = FormEvaluator::new(&g, 8, 1);
    let quad = Quadrature::new(32, 8);
    let w = c(0.2, 1.6);
    let hol = |z: C64| ev.omega(&[0], z, w).unwrap().value;
    let (r, _) = residue_formula_residual(&ev, &quad, &[], &hol);
    assert!(r.norm() < 1e-8);
    let polar = |z: C64| ev.omega(&[0, 0], z, w).unwrap().value;
    let (r, _) = residue_formula_residual(&ev, &quad, &[w], &polar);
    assert!(r.norm() < 1e-6, "{r}");
}

#[test]
fn forms_suite_passes_on_default_curves() {
    for g in [1, 2] {
        let recs = forms_suite(&CurveConfig::default_for(g).unwrap(), 3).unwrap();
        let failed: Vec<_> = recs.iter().filter(|r| !r.pass).map(|r| (&r.check, r.residual, r.budget)).collect();
        assert!(failed.is_empty(), "g={g}: {failed:?}");
    }
}

#[test]
fn curve_config_round_trips() {
    let cfg = CurveConfig::default_for(2).unwrap();
    let s = serde_json::to_string(&cfg).unwrap();
    assert!(s.contains("\"L\":6"));
    let back: CurveConfig = serde_json::from_str(&s).unwrap();
    assert_eq!(back, cfg);
    let custom: CurveConfig = serde_json::from_str(
        r#"{"g":1,"alpha":[[-1,0.5]],"beta":[1],"q":[[0.05,0.02]],"L":6,"quad_nodes":24,"tol":1e-6}"#,
    )
    .unwrap();
    assert!(custom.group().is_ok());
}

proptest! {
    #[test]
    fn f_inverse_symmetry(runs in prop::collection::vec((0usize..2, -3i64..=3), 0..5),
                          idx in prop::collection::vec(0usize..2, 0..4)) {
        let w = GroupWord::from_runs(&runs);
        let rev: Vec<usize> = idx.iter().rev().copied().collect();
        let sign: Q = if idx.len() % 2 == 0 { q(1) } else { q(-1) };
        prop_assert_eq!(f_coeff(&rev, &w.inverse()), f_coeff(&idx, &w) * sign);
    }

    #[test]
    fn mobius_composition(runs1 in prop::collection::vec((0usize..2, -2i64..=2), 0..3),
                          runs2 in prop::collection::vec((0usize..2, -2i64..=2), 0..3),
                          re in -3.0f64..3.0, im in -3.0f64..3.0) {
        let g = SchottkyGroup::default_for(2).unwrap();
        let (u, v) = (GroupWord::from_runs(&runs1), GroupWord::from_runs(&runs2));
        let z = C64::new(re, im);
        let lhs = g.mobius_apply(&u.mul(&v), z);
        let rhs = g.mobius_apply(&u, g.mobius_apply(&v, z));
        prop_assert!((lhs - rhs).norm() <= 1e-9 * (1.0 + lhs.norm()));
    }

    #[test]
    fn inverse_word_is_inverse(runs in prop::collection::vec((0usize..3, -3i64..=3), 0..6)) {
        let w = GroupWord::from_runs(&runs);
        prop_assert!(w.mul(&w.inverse()).is_identity());
    }
}
