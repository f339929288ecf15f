use num_complex::Complex64 as C64;
use proptest::prelude::*;
use surface_kz::holonomy::checks::{holonomy_suite, HolonomySetup};
use surface_kz::holonomy::group::{compose, transposition};
use surface_kz::holonomy::{BraidWord, Gen, Holonomy, Orientation, Piece, TransportOptions};
use surface_kz::lie::GeneratorSymbol;
use surface_kz::quad::Path;
use surface_kz::report::CheckRecord;
use surface_kz::schottky::{CurveConfig, SchottkyGroup};

fn failures(recs: &[CheckRecord]) -> Vec<String> {
    recs.iter().filter(|r| !r.pass).map(|r| format!("{} r={:e} b={:e} {}", r.check, r.residual, r.budget, r.detail)).collect()
}

fn hol(g: usize, n: usize, order: usize, orientation: Orientation) -> Holonomy {
    Holonomy::new(&SchottkyGroup::default_for(g).unwrap(), n, order, 6, orientation, TransportOptions::default()).unwrap()
}

#[test]
fn suite_passes_in_genus_one() {
    for (n, order) in [(2, 2), (3, 2), (2, 3)] {
        let recs = holonomy_suite(&HolonomySetup::new(CurveConfig::default_for(1).unwrap(), n, order)).unwrap();
        assert_eq!(failures(&recs), Vec::<String>::new(), "n={n} N={order}");
        for family in ["Xa:Ya", "rel:pi:1", "leading_terms", "sigma_square", "a_cycle_log"] {
            assert!(recs.iter().any(|r| r.check == family), "{family} missing");
        }
        if n == 3 {
            assert!(recs.iter().any(|r| r.check == "braids"));
            assert!(recs.iter().any(|r| r.check == "Xa:sigmai:comm"));
        }
    }
}

#[test]
fn suite_passes_in_genus_two() {
    let recs = holonomy_suite(&HolonomySetup::new(CurveConfig::default_for(2).unwrap(), 2, 2)).unwrap();
    assert_eq!(failures(&recs), Vec::<String>::new());
    assert!(recs.iter().any(|r| r.check == "Xa:Xb"));
}

#[test]
fn opposite_half_turns_break_the_mixed_relation() {
    let h = hol(1, 2, 2, Orientation::Clockwise);
    let s = BraidWord::gen(Gen::Sigma { i: 1 });
    let table = h.generators(&[Gen::X { a: 1, i: 1 }, Gen::Y { a: 1, i: 1 }, Gen::Sigma { i: 1 }]).unwrap();
    let (sq, _, _) = h.evaluate(&s.clone().then(&s), &table).unwrap();
    let log = h.envelope().log(&sq);
    let t = h.connection().generator_coord(GeneratorSymbol::t(1, 2)).unwrap();
    // clockwise exchange gives −t_12, so (Xa:Ya) cannot hold
    assert!((log[t] + 1.0).norm() < 1e-8, "{}", log[t]);
    let setup = HolonomySetup { orientation: Orientation::Clockwise, ..HolonomySetup::new(CurveConfig::default_for(1).unwrap(), 2, 2) };
    let recs = holonomy_suite(&setup).unwrap();
    let mixed = recs.iter().find(|r| r.check == "Xa:Ya").unwrap();
    assert!(!mixed.pass && mixed.residual > 1.0);
}

#[test]
fn sigma_square_is_the_residue_of_t12() {
    let h = hol(1, 2, 2, Orientation::Counterclockwise);
    let table = h.generators(&[Gen::Sigma { i: 1 }]).unwrap();
    let s = BraidWord::gen(Gen::Sigma { i: 1 });
    let (sq, _, _) = h.evaluate(&s.clone().then(&s), &table).unwrap();
    assert_eq!(sq.perm, vec![0, 1]);
    assert_eq!(table[&Gen::Sigma { i: 1 }].element.perm, vec![1, 0]);
    let log = h.envelope().log(&sq);
    let t = h.connection().generator_coord(GeneratorSymbol::t(1, 2)).unwrap();
    for (k, c) in log.iter().enumerate() {
        let expect = if k == t { 1.0 } else { 0.0 };
        assert!((c - expect).norm() < 1e-8, "{}: {c}", h.connection().quotient().basis_label(k));
    }
}

#[test]
fn order_is_capped() {
    let g = SchottkyGroup::default_for(1).unwrap();
    for order in [0, 4] {
        assert!(Holonomy::new(&g, 2, order, 6, Orientation::Counterclockwise, TransportOptions::default()).is_err());
    }
}

#[test]
fn coarse_steps_are_refused() {
    let g = SchottkyGroup::default_for(1).unwrap();
    let opts = TransportOptions { nodes: 2, segments: 2, ..TransportOptions::default() };
    let h = Holonomy::new(&g, 1, 2, 6, Orientation::Counterclockwise, opts).unwrap();
    let lp = h.geometry().loop_x(h.group(), 1, 1).unwrap();
    let err = h.transport(&lp).unwrap_err().to_string();
    assert!(err.contains("refine steps"), "{err}");
}

#[test]
fn legs_must_start_where_the_point_is() {
    let h = hol(1, 1, 2, Orientation::Counterclockwise);
    let base = h.geometry().base.clone();
    let off = base[0] + C64::new(0.05, 0.0);
    let pieces = vec![Piece::Move(vec![(0, Path::segment(off, base[0]))])];
    assert!(h.transport_open("bad", &pieces, &base).is_err());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn group_law_is_associative_with_permutations(
        a in prop::collection::vec(-1.0f64..1.0, 6),
        b in prop::collection::vec(-1.0f64..1.0, 6),
        pa in 0usize..2, pb in 0usize..2,
    ) {
        let h = hol(1, 3, 2, Orientation::Counterclockwise);
        let env = h.envelope();
        let gens = [GeneratorSymbol::x(1, 1), GeneratorSymbol::y(2, 1), GeneratorSymbol::x(3, 1), GeneratorSymbol::y(1, 1), GeneratorSymbol::t(1, 3), GeneratorSymbol::t(2, 3)];
        let vec_of = |c: &[f64]| {
            let mut v = vec![C64::new(0.0, 0.0); env.letters()];
            for (s, x) in gens.iter().zip(c) {
                let k = h.connection().generator_coord(*s).unwrap();
                v[k] += C64::new(*x, 0.5 * x);
            }
            v
        };
        let mut ga = env.exp_lie(&vec_of(&a));
        ga.perm = transposition(3, pa);
        let mut gb = env.exp_lie(&vec_of(&b));
        gb.perm = transposition(3, pb);
        let ab = env.mul(&ga, &gb).unwrap();
        prop_assert_eq!(&ab.perm, &compose(&ga.perm, &gb.perm));
        prop_assert!(env.lie_defect(&ab) < 1e-12);
        let left = env.mul(&env.mul(&ab, &ga).unwrap(), &gb).unwrap();
        let right = env.mul(&ga, &env.mul(&gb, &env.mul(&ga, &gb).unwrap()).unwrap()).unwrap();
        prop_assert_eq!(&left.perm, &right.perm);
        for (x, y) in left.coeffs.iter().zip(&right.coeffs) {
            prop_assert!((x - y).norm() < 1e-12);
        }
        let one = env.mul(&ab, &env.inverse(&ab).unwrap()).unwrap();
        prop_assert!(one.coeffs.iter().zip(&env.identity().coeffs).all(|(x, y)| (x - y).norm() < 1e-12));
    }
}
