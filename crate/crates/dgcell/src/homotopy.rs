//! Homotopy-level predicates: H^0 of Hom complexes, null-homotopy,
//! acyclicity, dg isomorphism, and direct-summand tests through trace slices.

use crate::algebra::{grid, DgAlgebra, Idempotent, Locality, GRID_DIM_LIMIT, IDEMPOTENT_SAMPLES};
use crate::bimodule::CatA;
use crate::linalg::{q, unit_vec, zero_vec, Mat, Subspace, Q};
use crate::twisted::{tc_hom, TcHom, TcMorphism, TwistedComplex};
use num_traits::Zero;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use thiserror::Error;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum HomotopyError {
    #[error("morphism is not a degree-0 cycle")]
    NotCycle,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Mode {
    /// Underlying graded category, differential ignored.
    IgnoreD,
    /// dg morphisms (cycles).
    Dg,
    /// Cycles modulo boundaries.
    Homotopy,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "verdict", content = "reason", rename_all = "kebab-case")]
pub enum SummandVerdict {
    True,
    False,
    Inconclusive(String),
}

impl SummandVerdict {
    pub fn is_true(&self) -> bool {
        matches!(self, SummandVerdict::True)
    }
}

#[derive(Clone, Debug)]
pub struct H0 {
    pub dim: usize,
    /// Cycle representatives in tc Hom coordinates, degree 0.
    pub basis: Vec<Vec<Q>>,
}

pub fn cycles(h: &TcHom, k: i64) -> Subspace {
    let n = h.dim(k);
    if h.dim(k + 1) == 0 {
        return Subspace::full(n);
    }
    Subspace::span(n, &h.complex.diff(k).kernel())
}

pub fn h0_hom(cat: &CatA, x: &TwistedComplex, y: &TwistedComplex) -> H0 {
    let h = tc_hom(cat, x, y);
    let z = cycles(&h, 0);
    let b = h.boundaries(0);
    let mut acc = b.clone();
    let mut basis = Vec::new();
    for v in z.basis() {
        if !acc.contains(v) {
            acc = acc.add_vecs(std::slice::from_ref(v));
            basis.push(v.clone());
        }
    }
    H0 { dim: basis.len(), basis }
}

pub fn is_null_homotopic(cat: &CatA, x: &TwistedComplex, y: &TwistedComplex, f: &TcMorphism) -> Result<bool, HomotopyError> {
    let h = tc_hom(cat, x, y);
    let c = h.morphism_coords(f);
    if f.degree != 0 || !cycles(&h, 0).contains(&c) {
        return Err(HomotopyError::NotCycle);
    }
    Ok(h.boundaries(0).contains(&c))
}

/// `id_X` is a boundary in `End(X)`.
pub fn is_acyclic_object(cat: &CatA, x: &TwistedComplex) -> bool {
    let h = tc_hom(cat, x, x);
    match h.identity_coords() {
        Some(id) => h.boundaries(0).contains(&id),
        None => true,
    }
}

/// An ungraded algebra spanned by square matrices closed under product.
#[derive(Clone, Debug)]
pub struct MatrixRing {
    pub basis: Vec<Mat>,
    span: Subspace,
    pub alg: DgAlgebra,
}

impl MatrixRing {
    pub fn new(mats: &[Mat], size: usize) -> MatrixRing {
        let flat: Vec<Vec<Q>> = mats.iter().map(|m| m.flatten()).collect();
        let span = Subspace::span(size * size, &flat);
        let basis: Vec<Mat> = span.basis().iter().map(|v| Mat::from_flat(size, size, v.clone())).collect();
        let n = basis.len();
        let coords = |m: &Mat| span.coords(&m.flatten()).expect("matrix ring not closed under product");
        let mult = (0..n).map(|i| (0..n).map(|j| coords(&basis[i].mul(&basis[j]))).collect()).collect();
        let unit = if n == 0 { vec![] } else { span.coords(&Mat::identity(size).flatten()).unwrap_or_else(|| zero_vec(n)) };
        let alg = DgAlgebra {
            labels: (0..n).map(|i| format!("r{i}")).collect(),
            degrees: vec![0; n],
            mult,
            unit: unit.clone(),
            idempotents: vec![Idempotent { label: "1".into(), vector: unit }],
            diff: Mat::zeros(n, n),
        };
        MatrixRing { basis, span, alg }
    }

    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    pub fn coords(&self, m: &Mat) -> Option<Vec<Q>> {
        self.span.coords(&m.flatten())
    }

    pub fn coords_space(&self, mats: &[Mat]) -> Subspace {
        let v: Vec<Vec<Q>> = mats.iter().map(|m| self.coords(m).expect("element outside the ring")).collect();
        Subspace::span(self.dim(), &v)
    }
}

/// Preimage of the radical of `alg / ideal`.
pub fn pullback_radical(alg: &DgAlgebra, ideal: &Subspace) -> Subspace {
    let quo = alg.quotient_ungraded(ideal);
    let comp = ideal.complement_basis();
    let mut vecs: Vec<Vec<Q>> = ideal.basis().to_vec();
    for r in quo.radical().basis() {
        let mut v = zero_vec(alg.dim());
        for (c, b) in r.iter().zip(&comp) {
            crate::linalg::axpy(&mut v, c, b);
        }
        vecs.push(v);
    }
    Subspace::span(alg.dim(), &vecs)
}

/// Degree-0 endomorphism ring of `g`: all (ignore-d) or cycles (dg, homotopy).
pub fn endo_ring(cat: &CatA, g: &TwistedComplex, mode: Mode) -> (TcHom, MatrixRing) {
    let h = tc_hom(cat, g, g);
    let vecs: Vec<Vec<Q>> = match mode {
        Mode::IgnoreD => (0..h.dim(0)).map(|i| unit_vec(h.dim(0), i)).collect(),
        _ => cycles(&h, 0).basis().to_vec(),
    };
    let mats: Vec<Mat> = vecs.iter().map(|c| h.matrix(0, c)).collect();
    let ring = MatrixRing::new(&mats, h.rx.dim());
    (h, ring)
}

/// Locality of the endomorphism ring relevant to `mode`; in homotopy mode,
/// of `H^0(End g)`.
pub fn has_local_endo_ring(cat: &CatA, g: &TwistedComplex, mode: Mode) -> Locality {
    let (h, ring) = endo_ring(cat, g, mode);
    match mode {
        Mode::Homotopy => {
            let b = boundary_ideal(&h, &ring);
            ring.alg.quotient_ungraded(&b).locality(cat.seed)
        }
        _ => ring.alg.locality(cat.seed),
    }
}

pub fn boundary_ideal(h: &TcHom, ring: &MatrixRing) -> Subspace {
    let mats: Vec<Mat> = h.boundaries(0).basis().iter().map(|c| h.matrix(0, c)).collect();
    ring.coords_space(&mats)
}

/// Span of `p o q` with `p : X -> G`, `q : G -> X` of opposite degrees,
/// as realised endomorphisms of `G`.
pub fn trace_slice(cat: &CatA, g: &TwistedComplex, x: &TwistedComplex, mode: Mode) -> Vec<Mat> {
    let hxg = tc_hom(cat, x, g);
    let hgx = tc_hom(cat, g, x);
    let pick = |h: &TcHom, k: i64| -> Vec<Vec<Q>> {
        match mode {
            Mode::IgnoreD => (0..h.dim(k)).map(|i| unit_vec(h.dim(k), i)).collect(),
            _ => cycles(h, k).basis().to_vec(),
        }
    };
    let mut out = Vec::new();
    for a in hxg.degrees() {
        if hgx.dim(-a) == 0 {
            continue;
        }
        let ps: Vec<Mat> = pick(&hxg, a).iter().map(|c| hxg.matrix(a, c)).collect();
        let qs: Vec<Mat> = pick(&hgx, -a).iter().map(|c| hgx.matrix(-a, c)).collect();
        for p in &ps {
            for qm in &qs {
                let m = p.mul(qm);
                if !m.is_zero() {
                    out.push(m);
                }
            }
        }
    }
    out
}

/// Is `G` a direct summand of `X` (in the sense of `mode`)?
pub fn dg_summand_test(cat: &CatA, g: &TwistedComplex, x: &TwistedComplex, mode: Mode) -> SummandVerdict {
    let (h, ring) = endo_ring(cat, g, mode);
    if ring.dim() == 0 {
        // G is the zero object
        return SummandVerdict::True;
    }
    let slice = ring.coords_space(&trace_slice(cat, g, x, mode));
    let (quotient, radical) = if mode == Mode::Homotopy {
        let b = boundary_ideal(&h, &ring);
        if b.contains(&ring.alg.unit) {
            return SummandVerdict::True;
        }
        (ring.alg.quotient_ungraded(&b), pullback_radical(&ring.alg, &b))
    } else {
        (ring.alg.clone(), ring.alg.radical())
    };
    match quotient.locality(cat.seed) {
        Locality::Local => {}
        Locality::NotLocal => return SummandVerdict::Inconclusive("endomorphism ring is not local".into()),
        Locality::Undetermined => return SummandVerdict::Inconclusive("locality of endomorphism ring undetermined".into()),
    }
    if radical.contains_space(&slice) {
        SummandVerdict::False
    } else {
        SummandVerdict::True
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum IsoVerdict {
    Isomorphic,
    NotIsomorphic,
    Undetermined,
}

/// Search for a dg isomorphism `X -> Y` among degree-0 cycles.
pub fn dg_isomorphic(cat: &CatA, x: &TwistedComplex, y: &TwistedComplex) -> (IsoVerdict, Option<Mat>) {
    let h = tc_hom(cat, x, y);
    if h.rx.dim() != h.ry.dim() {
        return (IsoVerdict::NotIsomorphic, None);
    }
    if h.rx.dim() == 0 {
        return (IsoVerdict::Isomorphic, Some(Mat::zeros(0, 0)));
    }
    let z = cycles(&h, 0);
    if z.is_zero() {
        return (IsoVerdict::NotIsomorphic, None);
    }
    let m = z.dim();
    let mut rng = ChaCha8Rng::seed_from_u64(cat.seed);
    let mut samples: Vec<Vec<Q>> = (0..IDEMPOTENT_SAMPLES).map(|_| (0..m).map(|_| q(rng.gen_range(-2..=2))).collect()).collect();
    let exhaustive = m <= GRID_DIM_LIMIT;
    if exhaustive {
        samples.extend(grid(m));
    }
    for s in samples {
        let mut c = zero_vec(h.dim(0));
        for (a, b) in s.iter().zip(z.basis()) {
            if !a.is_zero() {
                crate::linalg::axpy(&mut c, a, b);
            }
        }
        let f = h.matrix(0, &c);
        if f.det() != Q::zero() {
            return (IsoVerdict::Isomorphic, Some(f));
        }
    }
    (IsoVerdict::Undetermined, None)
}

/// dg indecomposability: `Z^0 End(X)` local.
pub fn dg_indecomposable(cat: &CatA, x: &TwistedComplex) -> Locality {
    has_local_endo_ring(cat, x, Mode::Dg)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bimodule::Gen;
    use crate::examples;
    use crate::graded::cohomology_all;
    use crate::twisted::{cone, hcompose};

    fn single(g: Gen) -> TwistedComplex {
        TwistedComplex::single(g, 0)
    }

    fn cone_id(c: &CatA, x: &TwistedComplex) -> TwistedComplex {
        let h = tc_hom(c, x, x);
        cone(c, x, x, &h.morphism(0, &h.identity_coords().unwrap())).unwrap()
    }

    #[test]
    fn h0_examples() {
        let a2 = CatA::new(examples::a2(), 0);
        assert_eq!(h0_hom(&a2, &single(Gen::P(0, 0)), &single(Gen::P(0, 0))).dim, 1);
        let ac = CatA::new(examples::dual_numbers(-1, true), 0);
        let p = single(Gen::P(0, 0));
        assert_eq!(h0_hom(&ac, &p, &p).dim, 0);
        let cn = cone_id(&a2, &single(Gen::P(0, 1)));
        assert_eq!(h0_hom(&a2, &cn, &cn).dim, 0);
    }

    #[test]
    fn acyclicity_three_ways() {
        for (_, a) in examples::all() {
            let c = CatA::new(a, 0);
            for g in c.generators() {
                for x in [single(g), cone_id(&c, &single(g))] {
                    let ac = is_acyclic_object(&c, &x);
                    let h = tc_hom(&c, &x, &x);
                    let zero_h = cohomology_all(&h.complex).values().all(|&d| d == 0);
                    let id = h.identity_coords().unwrap();
                    let h0 = h0_hom(&c, &x, &x);
                    let id_zero_in_h0 = h.boundaries(0).contains(&id) || h0.dim == 0;
                    assert_eq!(ac, zero_h);
                    assert_eq!(ac, id_zero_in_h0);
                }
            }
        }
        let l0 = CatA::new(examples::dual_numbers(0, false), 0);
        assert!(!is_acyclic_object(&l0, &single(Gen::P(0, 0))));
        let ac = CatA::new(examples::dual_numbers(-1, true), 0);
        assert!(is_acyclic_object(&ac, &single(Gen::P(0, 0))));
    }

    #[test]
    fn null_homotopy() {
        let c = CatA::new(examples::dual_numbers(0, false), 0);
        let x = single(Gen::P(0, 0));
        let h = tc_hom(&c, &x, &x);
        assert!(is_null_homotopic(&c, &x, &x, &h.morphism(0, &zero_vec(h.dim(0)))).unwrap());
        assert!(!is_null_homotopic(&c, &x, &x, &h.morphism(0, &h.identity_coords().unwrap())).unwrap());
    }

    #[test]
    fn summand_examples() {
        let a2 = CatA::new(examples::a2(), 0);
        for g in a2.generators() {
            for mode in [Mode::IgnoreD, Mode::Dg, Mode::Homotopy] {
                assert_eq!(dg_summand_test(&a2, &single(g), &single(g), mode), SummandVerdict::True);
            }
        }
        assert_eq!(
            dg_summand_test(&a2, &single(Gen::P(0, 1)), &single(Gen::P(0, 0)), Mode::IgnoreD),
            SummandVerdict::False
        );
        let l0 = CatA::new(examples::dual_numbers(0, false), 0);
        let pp = hcompose(&l0, Gen::P(0, 0), Gen::P(0, 0)).unwrap();
        assert!(dg_summand_test(&l0, &single(Gen::P(0, 0)), &pp, Mode::Dg).is_true());
        // acyclic G is accepted in homotopy mode
        let cn = cone_id(&l0, &single(Gen::P(0, 0)));
        assert!(dg_summand_test(&l0, &cn, &single(Gen::P(0, 0)), Mode::Homotopy).is_true());
    }

    #[test]
    fn locality() {
        let a2 = CatA::new(examples::a2(), 0);
        for g in a2.generators() {
            assert_eq!(has_local_endo_ring(&a2, &single(g), Mode::IgnoreD), Locality::Local);
        }
        let x = single(Gen::P(0, 0));
        assert_eq!(has_local_endo_ring(&a2, &x.direct_sum(&x), Mode::IgnoreD), Locality::NotLocal);
        let l0 = CatA::new(examples::dual_numbers(0, false), 0);
        assert_eq!(has_local_endo_ring(&l0, &single(Gen::Id(0)), Mode::Dg), Locality::Local);
    }

    #[test]
    fn cone_of_x_multiplication_indecomposable() {
        let c = CatA::new(examples::dual_numbers(0, false), 0);
        let g = Gen::P(0, 0);
        let x = single(g);
        let xm = c.hom(g, g).elem(0, &c.pp_map(g, g, &c.alg.basis_vec(1), &c.alg.basis_vec(0))).unwrap();
        let f = TcMorphism { degree: 0, gamma: [((0, 0), xm)].into_iter().collect() };
        let cn = cone(&c, &x, &x, &f).unwrap();
        assert!(h0_hom(&c, &cn, &cn).dim > 0);
        assert_eq!(dg_indecomposable(&c, &cn), Locality::Local);
    }

    #[test]
    fn isomorphism_search() {
        let c = CatA::new(examples::dual_numbers(0, false), 0);
        let x = single(Gen::P(0, 0));
        assert_eq!(dg_isomorphic(&c, &x, &x).0, IsoVerdict::Isomorphic);
        assert_eq!(dg_isomorphic(&c, &x, &x.direct_sum(&x)).0, IsoVerdict::NotIsomorphic);
    }
}
