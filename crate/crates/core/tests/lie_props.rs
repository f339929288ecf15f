use proptest::prelude::*;
use surface_kz::lie::*;
use surface_kz::linalg::q;

fn random_element(alpha: &Alphabet, spec: &[(usize, usize, i64)]) -> LieElement {
    // (degree, index into the basis of that degree, coefficient)
    let mut e = LieElement::zero();
    for &(d, k, c) in spec {
        let basis = lyndon_basis(alpha, d).unwrap();
        let w = basis[k % basis.len()].clone();
        e = e.add(&LieElement::monomial(w).scale(&q(c)));
    }
    e
}

fn elem() -> impl Strategy<Value = Vec<(usize, usize, i64)>> {
    prop::collection::vec((1usize..=2, 0usize..50, -3i64..=3), 1..3)
}

/// Right-normed expansion in the tensor algebra, computed without the
/// Lyndon machinery: [a,b] = ab - ba on word polynomials.
fn assoc_bracket(a: &AssocPoly, b: &AssocPoly) -> AssocPoly {
    let mut out = AssocPoly::new();
    for (u, cu) in a {
        for (v, cv) in b {
            let mut uv = u.clone();
            uv.extend(v);
            *out.entry(uv).or_insert_with(|| q(0)) += cu * cv;
            let mut vu = v.clone();
            vu.extend(u);
            *out.entry(vu).or_insert_with(|| q(0)) -= cu * cv;
        }
    }
    out.retain(|_, c| *c != q(0));
    out
}

proptest! {
    #[test]
    fn antisymmetry(a in elem(), b in elem()) {
        let alpha = Alphabet::plain(3);
        let c = ExpansionCache::new();
        let (x, y) = (random_element(&alpha, &a), random_element(&alpha, &b));
        prop_assert_eq!(bracket(&x, &y, &c), bracket(&y, &x, &c).neg());
    }

    #[test]
    fn jacobi_and_tensor_algebra_agree(a in elem(), b in elem(), d in elem()) {
        let alpha = Alphabet::plain(3);
        let c = ExpansionCache::new();
        let (x, y, z) = (random_element(&alpha, &a), random_element(&alpha, &b), random_element(&alpha, &d));
        let j = bracket(&x, &bracket(&y, &z, &c), &c)
            .add(&bracket(&y, &bracket(&z, &x, &c), &c))
            .add(&bracket(&z, &bracket(&x, &y, &c), &c));
        prop_assert!(j.is_zero());
        let lhs = bracket(&x, &bracket(&y, &z, &c), &c).to_assoc(&c);
        let rhs = assoc_bracket(&x.to_assoc(&c), &assoc_bracket(&y.to_assoc(&c), &z.to_assoc(&c)));
        prop_assert_eq!(lhs, rhs);
    }

    #[test]
    fn normal_form_is_idempotent(a in elem()) {
        let alpha = Alphabet::plain(3);
        let c = ExpansionCache::new();
        let x = random_element(&alpha, &a);
        let once = LieElement::from_assoc(&x.to_assoc(&c), &c).unwrap();
        let twice = LieElement::from_assoc(&once.to_assoc(&c), &c).unwrap();
        prop_assert_eq!(&once, &x);
        prop_assert_eq!(once, twice);
    }

    #[test]
    fn bracket_is_bilinear(a in elem(), b in elem(), d in elem(), k in -4i64..=4) {
        let alpha = Alphabet::plain(2);
        let c = ExpansionCache::new();
        let (x, y, z) = (random_element(&alpha, &a), random_element(&alpha, &b), random_element(&alpha, &d));
        let lhs = bracket(&x.add(&y.scale(&q(k))), &z, &c);
        let rhs = bracket(&x, &z, &c).add(&bracket(&y, &z, &c).scale(&q(k)));
        prop_assert_eq!(lhs, rhs);
    }
}

#[test]
fn jacobi_on_all_basis_triples_up_to_degree_6() {
    let alpha = Alphabet::plain(2);
    let c = ExpansionCache::new();
    let mut basis = Vec::new();
    for d in 1..=4 {
        basis.extend(lyndon_basis(&alpha, d).unwrap().into_iter().map(|w| (d, LieElement::monomial(w))));
    }
    for (da, a) in &basis {
        for (db, b) in &basis {
            for (dc, e) in &basis {
                if da + db + dc > 6 {
                    continue;
                }
                let j = bracket(a, &bracket(b, e, &c), &c)
                    .add(&bracket(b, &bracket(e, a, &c), &c))
                    .add(&bracket(e, &bracket(a, b, &c), &c));
                assert!(j.is_zero());
            }
        }
    }
}

#[test]
fn witt_counts_for_alphabets_2_to_8() {
    fn witt(k: i64, d: i64) -> i64 {
        let mu = |n: i64| -> i64 {
            let f: Vec<i64> = (2..=n).filter(|p| n % p == 0 && (2..*p).all(|r| p % r != 0)).collect();
            if f.iter().any(|p| n % (p * p) == 0) { 0 } else if f.len() % 2 == 0 { 1 } else { -1 }
        };
        (1..=d).filter(|e| d % e == 0).map(|e| mu(d / e) * k.pow(e as u32)).sum::<i64>() / d
    }
    for k in 2..=8 {
        for d in 1..=6 {
            let expected = witt(k, d);
            assert_eq!(free_slice_dim(k as usize, 0, 0, d as usize, 0), expected.into());
            if expected < 50_000 {
                assert_eq!(lyndon_basis(&Alphabet::plain(k as usize), d as usize).unwrap().len() as i64, expected);
            }
        }
    }
}
