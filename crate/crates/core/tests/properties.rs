use proptest::prelude::*;
use semigroup_core::dilation::egervary_dilation;
use semigroup_core::interp::{multilinear_compress, ContractionTuple, DiscretizedSemigroup};
use semigroup_core::linalg::{kron, op_norm};
use semigroup_core::structure::structure_report;
use semigroup_core::torus::{bscr_check, koopman_u, projector_p, GridTime};
use semigroup_core::{CMatrix, Tolerance, C64};

fn matrix(n: usize) -> impl Strategy<Value = CMatrix> {
    prop::collection::vec((-1.0f64..1.0, -1.0f64..1.0), n * n)
        .prop_map(move |v| CMatrix::new(n, n, v.into_iter().map(|(a, b)| C64::new(a, b)).collect()).unwrap())
}

fn normalised(m: CMatrix) -> CMatrix {
    let n = op_norm(&m).unwrap();
    if n > 0.0 {
        m.scale_real(1.0 / n)
    } else {
        m
    }
}

/// `d` polynomials in one contraction `Z`, each normalised to norm one.
fn commuting_tuple(d: usize, dim: usize) -> impl Strategy<Value = ContractionTuple> {
    (matrix(dim), prop::collection::vec(prop::collection::vec((-1.0f64..1.0, -1.0f64..1.0), 2), d)).prop_map(
        move |(z, coeffs)| {
            let z = normalised(z);
            let z2 = &z * &z;
            let mats = coeffs
                .into_iter()
                .map(|c| {
                    let q = &z.scale(C64::new(c[0].0, c[0].1)) + &z2.scale(C64::new(c[1].0, c[1].1));
                    normalised(q)
                })
                .collect();
            ContractionTuple::new(mats, Tolerance::default()).unwrap()
        },
    )
}

fn shape() -> impl Strategy<Value = (usize, usize, usize)> {
    (1usize..=2, 1usize..=2, 1usize..=3)
}

/// `∏_i [U_i(t_i)P_i(t_i) ⊗ S_i^{⌊t_i⌋} + U_i(t_i)(𝟙 − P_i(t_i)) ⊗ S_i^{⌊t_i⌋+1}]`.
fn product_form(tuple: &ContractionTuple, n: usize, t: &GridTime) -> CMatrix {
    let d = tuple.d();
    let len = n.pow(d as u32);
    let mut acc = CMatrix::identity(len * tuple.dim());
    for (axis, s) in tuple.mats().iter().enumerate() {
        let k = t.nums()[axis];
        let u = koopman_u(n, d, axis, k).unwrap();
        let p = projector_p(n, d, axis, k).unwrap();
        let q = &CMatrix::identity(len) - &p;
        let fl = k / n;
        let factor = &kron(&(&u * &p), &s.pow(fl)).unwrap() + &kron(&(&u * &q), &s.pow(fl + 1)).unwrap();
        acc = &acc * &factor;
    }
    acc
}

#[test]
fn product_form_oracle_two_axes() {
    let z = normalised(CMatrix::from_rows(&[
        vec![C64::new(0.3, 0.1), C64::new(0.7, -0.2)],
        vec![C64::new(-0.1, 0.4), C64::new(0.2, 0.0)],
    ])
    .unwrap());
    let tuple = ContractionTuple::new(vec![z.clone(), normalised(&z * &z)], Tolerance::default()).unwrap();
    for n in 2..=3 {
        let sg = DiscretizedSemigroup::new(tuple.clone(), n).unwrap();
        for t in GridTime::enumerate(n, 2, 2 * n).unwrap() {
            let got = sg.eval(&t).unwrap();
            let oracle = product_form(&tuple, n, &t);
            assert!((&got - &oracle).max_abs() <= 1e-13, "N = {n}, t = {t}");
        }
    }
}

#[test]
fn bscr_exact_on_larger_grids() {
    for n in [5usize, 7, 12] {
        for s in 0..2 * n {
            for t in 0..2 * n {
                assert_eq!(bscr_check(n, s, t).unwrap(), 0.0, "N = {n}, s = {s}, t = {t}");
            }
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn dense_homomorphism_and_contractivity(
        (tuple, n) in shape().prop_flat_map(|(d, dim, n)| (commuting_tuple(d, dim), Just(n))),
        a in prop::collection::vec(0usize..8, 2),
        b in prop::collection::vec(0usize..8, 2),
    ) {
        let d = tuple.d();
        let sg = DiscretizedSemigroup::new(tuple, n).unwrap();
        let s = GridTime::new(n, a[..d].to_vec()).unwrap();
        let t = GridTime::new(n, b[..d].to_vec()).unwrap();
        let st = s.checked_add(&t).unwrap();
        let lhs = &sg.eval(&s).unwrap() * &sg.eval(&t).unwrap();
        let rhs = sg.eval(&st).unwrap();
        prop_assert!(op_norm(&(&lhs - &rhs)).unwrap() <= 1e-10);
        prop_assert!(op_norm(&rhs).unwrap() <= 1.0 + 1e-10);
    }

    #[test]
    fn compression_matches_multilinear(
        (tuple, n) in shape().prop_flat_map(|(d, dim, n)| (commuting_tuple(d, dim), Just(n))),
        a in prop::collection::vec(0usize..12, 2),
    ) {
        let d = tuple.d();
        let sg = DiscretizedSemigroup::new(tuple, n).unwrap();
        let t = GridTime::new(n, a[..d].to_vec()).unwrap();
        let c = sg.compress(&t).unwrap();
        let ml = multilinear_compress(sg.base(), &t.to_reals()).unwrap();
        prop_assert!(op_norm(&(&c - &ml)).unwrap() <= 1e-12);
    }

    #[test]
    fn unitary_predicate_implies_unit_norm(s in (1usize..=3).prop_flat_map(matrix), m in 1usize..=3) {
        let v = egervary_dilation(&normalised(s), m, Tolerance::default()).unwrap().unitaries.remove(0);
        let r = structure_report(&v, Tolerance::default()).unwrap();
        prop_assert!(r.is_unitary);
        prop_assert!((op_norm(&v).unwrap() - 1.0).abs() <= 1e-10);
    }

    #[test]
    fn axis_factors_commute_exactly(n in 2usize..5, k in 0usize..10, l in 0usize..10) {
        let ops_i = [koopman_u(n, 2, 0, k).unwrap(), projector_p(n, 2, 0, k).unwrap()];
        let ops_j = [koopman_u(n, 2, 1, l).unwrap(), projector_p(n, 2, 1, l).unwrap()];
        for a in &ops_i {
            for b in &ops_j {
                prop_assert_eq!(a * b, b * a);
            }
        }
    }
}
