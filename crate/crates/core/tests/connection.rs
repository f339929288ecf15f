use num_complex::Complex64 as C64;
use proptest::prelude::*;
use surface_kz::connection::checks::{
    closedness_defect, commutation_residual, flatness_suite, sample_tuples, simplicial_suite, ConnectionSetup, Sample,
};
use surface_kz::connection::{max_norm, Connection};
use surface_kz::lie::GeneratorSymbol;
use surface_kz::schottky::{CurveConfig, SchottkyGroup};
use surface_kz::tgn::Bounds;

fn c(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

fn conn(g: usize, n: usize, l: usize) -> Connection {
    Connection::new(&SchottkyGroup::default_for(g).unwrap(), n, Bounds::new(2, 2), l).unwrap()
}

fn failures(recs: &[surface_kz::report::CheckRecord]) -> Vec<String> {
    recs.iter().filter(|r| !r.pass).map(|r| format!("{} r={:e} b={:e} {}", r.check, r.residual, r.budget, r.detail)).collect()
}

#[test]
fn one_point_genus_one_is_the_omega_series() {
    let cn = conn(1, 1, 8);
    let (z, w) = (c(0.3, 1.7), c(-0.4, -1.5));
    let v = cn.eval(&[z], 1, w).unwrap();
    let x = cn.generator_vec(GeneratorSymbol::x(1, 1)).unwrap();
    let mut term = cn.generator_vec(GeneratorSymbol::y(1, 1)).unwrap();
    let mut expect = vec![c(0.0, 0.0); cn.dim()];
    for s in 0..=2usize {
        let om = cn.evaluator().omega(&vec![0; s + 1], z, w).unwrap().value;
        for (e, t) in expect.iter_mut().zip(&term) {
            *e += om * t;
        }
        term = cn.bracket(&x, &term);
    }
    let d: Vec<C64> = v.value.iter().zip(&expect).map(|(a, b)| a - b).collect();
    assert!(max_norm(&d) < 1e-14);
    assert_eq!(cn.dropped_terms(), 0);
}

#[test]
fn leading_coefficient_is_the_holomorphic_form() {
    let cn = conn(2, 2, 6);
    let pts = [c(0.2, 1.4), c(-0.7, -1.9)];
    let v = cn.eval(&pts, 2, c(2.5, 2.5)).unwrap();
    for a in 0..2 {
        let k = cn.generator_coord(GeneratorSymbol::y(2, a + 1)).unwrap();
        let oracle = cn.evaluator().holomorphic_coset(a, pts[1]).value;
        assert!((v.value[k] - oracle).norm() < 1e-7);
    }
}

#[test]
fn coincident_points_are_rejected() {
    let cn = conn(1, 2, 4);
    assert!(cn.eval(&[c(0.1, 2.0), c(0.1, 2.0)], 1, c(0.0, -2.0)).is_err());
    assert!(cn.eval(&[c(0.1, 2.0), c(0.5, 2.0)], 1, c(0.1, 2.0)).is_err());
    assert!(cn.eval(&[c(0.1, 2.0)], 1, c(0.0, -2.0)).is_err());
    assert!(Connection::new(&SchottkyGroup::default_for(1).unwrap(), 2, Bounds::new(2, 0), 4).is_err());
}

#[test]
fn closedness_defect_is_antisymmetric() {
    let cn = conn(1, 3, 6);
    let s = &sample_tuples(cn.group(), 3, 1, 11)[0];
    let (d12, _) = closedness_defect(&cn, s, 1, 2, 1e-2).unwrap();
    let (d21, _) = closedness_defect(&cn, s, 2, 1, 1e-2).unwrap();
    for (a, b) in d12.iter().zip(&d21) {
        assert_eq!(*a, -*b);
    }
    let (d11, b11) = closedness_defect(&cn, s, 1, 1, 1e-2).unwrap();
    assert!(d11.iter().all(|x| x.norm() == 0.0) && b11 == 0.0);
}

#[test]
fn commutation_detects_a_wrong_connection() {
    // dropping the t-terms of α_2 must break [α_1, α_2] = 0
    let cn = conn(1, 2, 8);
    let s = &sample_tuples(cn.group(), 2, 1, 5)[0];
    let (r, b) = commutation_residual(&cn, s, 1, 2).unwrap();
    assert!(r < 10.0 * b);
    let a1 = cn.eval(&s.points, 1, s.w).unwrap().value;
    let mut a2 = cn.eval(&s.points, 2, s.w).unwrap().value;
    let t = cn.generator_coord(GeneratorSymbol::t(1, 2)).unwrap();
    a2[t] = c(0.0, 0.0);
    let bad = max_norm(&cn.bracket(&a1, &a2));
    assert!(bad > 1e3 * b, "{bad} vs {b}");
}

#[test]
fn commutation_improves_with_cutoff() {
    let s = &sample_tuples(&SchottkyGroup::default_for(2).unwrap(), 2, 1, 3)[0];
    let r3 = commutation_residual(&conn(2, 2, 3), s, 1, 2).unwrap().0;
    let r6 = commutation_residual(&conn(2, 2, 6), s, 1, 2).unwrap().0;
    assert!(r6 < r3 + 1e-12, "{r6} vs {r3}");
}

#[test]
fn flatness_suite_passes_for_small_instances() {
    for (g, n) in [(1, 2), (1, 3), (2, 2)] {
        let setup = ConnectionSetup::new(CurveConfig::default_for(g).unwrap(), n, Bounds::new(2, 2), 1);
        let recs = flatness_suite(&setup).unwrap();
        assert!(recs.iter().any(|r| r.check == "commutation"));
        assert_eq!(failures(&recs), Vec::<String>::new(), "g={g} n={n}");
    }
}

#[test]
fn simplicial_suite_passes_in_genus_one() {
    for n in [2, 3] {
        let setup = ConnectionSetup::new(CurveConfig::default_for(1).unwrap(), n, Bounds::new(2, 2), 2);
        let recs = simplicial_suite(&setup).unwrap();
        assert_eq!(recs.len(), 3);
        assert_eq!(failures(&recs), Vec::<String>::new(), "n={n}");
    }
}

#[test]
fn simplicial_needs_two_points() {
    let setup = ConnectionSetup::new(CurveConfig::default_for(1).unwrap(), 1, Bounds::new(2, 2), 2);
    assert!(simplicial_suite(&setup).is_err());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn alpha_does_not_depend_on_w(seed in 0u64..1000, wr in -3.0f64..3.0, wi in -3.0f64..3.0) {
        let cn = conn(1, 2, 8);
        let s: Sample = sample_tuples(cn.group(), 2, 1, seed).remove(0);
        let w2 = c(wr, wi);
        prop_assume!(cn.group().in_fundamental_domain(w2, 0.4));
        prop_assume!(s.points.iter().all(|p| (p - w2).norm() > 0.3));
        for i in 1..=2 {
            let a = cn.eval(&s.points, i, s.w).unwrap();
            let b = cn.eval(&s.points, i, w2).unwrap();
            let d: Vec<C64> = a.value.iter().zip(&b.value).map(|(x, y)| x - y).collect();
            prop_assert!(max_norm(&d) < 10.0 * (a.tail + b.tail) + 1e-10);
        }
    }
}
