use std::collections::BTreeMap;

use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use dgcell::bimodule::CatA;
use dgcell::cells::{predicted_weak, Orders, Side};
use dgcell::commutative::maximal_dg_ideals;
use dgcell::examples;
use dgcell::graded::{cohomology_all, shift, Complex, GradedMap, GradedVectorSpace};
use dgcell::input::parse_str;
use dgcell::linalg::{q, sign, Mat, Subspace, Q};
use dgcell::twisted::{cone, random_tc, tc_hcompose, tc_hom};

fn small_q() -> impl Strategy<Value = Q> {
    (-3i64..=3, 1i64..=2).prop_map(|(n, d)| Q::new(n.into(), d.into()))
}

fn matrix(rows: usize, cols: usize) -> impl Strategy<Value = Mat> {
    prop::collection::vec(small_q(), rows * cols).prop_map(move |v| Mat::from_flat(rows, cols, v))
}

fn sized_matrix() -> impl Strategy<Value = Mat> {
    (1usize..5, 1usize..5).prop_flat_map(|(r, c)| matrix(r, c))
}

/// Three-term complex `V^-1 -> V^0 -> V^1`, the first map built from the
/// kernel of the second.
fn complex() -> impl Strategy<Value = Complex> {
    sized_matrix().prop_map(|d0| {
        let ker = d0.kernel();
        let (n1, n0) = (d0.rows, d0.cols);
        let dm1 = Mat::from_cols(&ker, n0);
        let dims: BTreeMap<i64, usize> = [(-1, ker.len()), (0, n0), (1, n1)].into_iter().filter(|(_, d)| *d > 0).collect();
        let space = GradedVectorSpace::new(dims);
        let mut blocks = BTreeMap::new();
        blocks.insert(0, d0);
        if !ker.is_empty() {
            blocks.insert(-1, dm1);
        }
        let d = GradedMap::new(&space, &space, 1, blocks).unwrap();
        Complex::new(space, d).unwrap()
    })
}

fn cat_by_index(i: usize) -> CatA {
    let all = examples::all();
    CatA::new(all[i % all.len()].1.clone(), 0)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn rank_nullity(m in sized_matrix()) {
        let k = m.kernel();
        prop_assert_eq!(m.rank() + k.len(), m.cols);
        for v in &k {
            prop_assert!(m.apply(v).iter().all(|x| *x == q(0)));
        }
    }

    #[test]
    fn subspace_dimension_formula(a in matrix(4, 2), b in matrix(4, 3)) {
        let cols = |m: &Mat| (0..m.cols).map(|c| m.col(c)).collect::<Vec<_>>();
        let (u, w) = (Subspace::span(4, &cols(&a)), Subspace::span(4, &cols(&b)));
        prop_assert_eq!(u.sum(&w).dim() + u.intersect(&w).dim(), u.dim() + w.dim());
        prop_assert!(u.sum(&w).contains_space(&u));
        prop_assert!(u.contains_space(&u.intersect(&w)));
    }

    #[test]
    fn shifting_preserves_cohomology_up_to_reindexing(c in complex(), t in -2i64..=2) {
        let s = shift(&c, t);
        let h: BTreeMap<i64, usize> = cohomology_all(&c);
        let hs: BTreeMap<i64, usize> = cohomology_all(&s).into_iter().map(|(k, d)| (k + t, d)).collect();
        prop_assert_eq!(h, hs);
        let back = shift(&s, -t);
        prop_assert_eq!(back.space.dims(), c.space.dims());
        for k in c.space.degrees() {
            prop_assert_eq!(back.diff(k), c.diff(k));
        }
    }

    #[test]
    fn algebra_axioms_on_random_elements(i in 0usize..5, seed in any::<u64>()) {
        let a = &examples::all()[i].1;
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        use rand::Rng;
        let n = a.dim();
        let homog = |rng: &mut ChaCha8Rng| {
            let j = rng.gen_range(0..n);
            (a.degrees[j], a.basis_vec(j))
        };
        let (ka, x) = homog(&mut rng);
        let (_, y) = homog(&mut rng);
        let (_, z) = homog(&mut rng);
        prop_assert_eq!(a.mul(&a.mul(&x, &y), &z), a.mul(&x, &a.mul(&y, &z)));
        prop_assert_eq!(a.mul(&a.unit, &x), x.clone());
        let lhs = a.d(&a.mul(&x, &y));
        let rhs: Vec<Q> = a
            .mul(&a.d(&x), &y)
            .iter()
            .zip(a.mul(&x, &a.d(&y)))
            .map(|(p, r)| p + sign(ka) * r)
            .collect();
        prop_assert_eq!(lhs, rhs);
        prop_assert!(a.d(&a.d(&x)).iter().all(|c| *c == q(0)));
    }

    #[test]
    fn composites_of_random_complexes_are_twisted(i in 0usize..5, seed in any::<u64>()) {
        let c = cat_by_index(i);
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let x = random_tc(&c, &mut rng, 2, 3);
        let y = random_tc(&c, &mut rng, 2, 3);
        prop_assert!(x.is_valid(&c) && y.is_valid(&c));
        if x.objects(&c).map(|o| o.0) == y.objects(&c).map(|o| o.1) {
            let z = tc_hcompose(&c, &x, &y).unwrap();
            prop_assert!(z.is_valid(&c));
        }
    }

    #[test]
    fn associativity_on_random_triples(i in 0usize..3, seed in any::<u64>()) {
        let c = cat_by_index(i);
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let x = random_tc(&c, &mut rng, 1, 2);
        let y = random_tc(&c, &mut rng, 1, 2);
        let z = random_tc(&c, &mut rng, 1, 2);
        let obj = |t: &dgcell::twisted::TwistedComplex| t.objects(&c);
        prop_assume!(obj(&x).map(|o| o.0) == obj(&y).map(|o| o.1) && obj(&y).map(|o| o.0) == obj(&z).map(|o| o.1));
        let l = tc_hcompose(&c, &tc_hcompose(&c, &x, &y).unwrap(), &z).unwrap().normalize(&c);
        let r = tc_hcompose(&c, &x, &tc_hcompose(&c, &y, &z).unwrap()).unwrap().normalize(&c);
        prop_assert!(l.same_data(&r));
    }

    #[test]
    fn hom_complexes_square_to_zero_and_cones_of_identities_vanish(i in 0usize..5, seed in any::<u64>()) {
        let c = cat_by_index(i);
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let x = random_tc(&c, &mut rng, 1, 2);
        let y = random_tc(&c, &mut rng, 1, 2);
        let h = tc_hom(&c, &x, &y);
        for k in h.degrees() {
            prop_assert!(h.complex.diff(k + 1).mul(&h.complex.diff(k)).is_zero());
        }
        let e = tc_hom(&c, &x, &x);
        if let Some(id) = e.identity_coords() {
            let cn = cone(&c, &x, &x, &e.morphism(0, &id)).unwrap();
            prop_assert!(cohomology_all(&tc_hom(&c, &cn, &cn).complex).is_empty());
        }
    }

    #[test]
    fn parsing_never_panics(text in "[a-z =\"\\[\\]\n0-9*+-]{0,80}") {
        let _ = parse_str(&text);
    }

    #[test]
    fn split_quadratics_have_two_maximal_ideals(r in -5i64..=5, s in -5i64..=5) {
        // (x - r)(x - s)
        let a = examples::truncated_poly(&[r * s, -(r + s), 1]);
        let rep = maximal_dg_ideals(&a, &[], 0).unwrap();
        prop_assert_eq!(rep.ideals.len(), if r == s { 1 } else { 2 });
    }
}

#[test]
fn weak_order_is_a_preorder_matching_the_closed_form() {
    for (_, a) in examples::all() {
        let c = CatA::new(a, 0);
        let o = Orders::new(&c);
        for side in Side::ALL {
            let m = o.weak_matrix(side);
            let n = o.gens.len();
            for i in 0..n {
                assert!(m[i][i].is_true());
                for j in 0..n {
                    assert_eq!(m[i][j].is_true(), predicted_weak(&c, side, o.gens[i], o.gens[j]));
                    for k in 0..n {
                        if m[i][j].is_true() && m[j][k].is_true() {
                            assert!(m[i][k].is_true());
                        }
                    }
                }
            }
        }
    }
}
