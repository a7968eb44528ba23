//! Generator 1-morphisms `Id_i` and `P(e,f) = Ae (x) fA` realised as explicit
//! dg bimodules inside tensor powers of `A`, their Hom complexes, and the
//! horizontal structure (whiskering, expansion of composites).

use crate::algebra::{BlockDecomposition, DgAlgebra, IdempotentClasses};
use crate::graded::{decompose_complex, Complex, GradedMap, GradedVectorSpace};
use crate::linalg::{axpy, independent_subset, is_zero_vec, sign, zero_vec, Mat, Subspace, Q};
use num_traits::{One, Zero};
use serde::Serialize;
use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::sync::{Arc, Mutex};
use thiserror::Error;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum BimoduleError {
    #[error("1-morphisms {0} and {1} are not composable")]
    NotComposable(String, String),
    #[error("unknown generator {0}")]
    UnknownGenerator(String),
    #[error("middle 1-morphism mismatch in vertical composition")]
    MiddleMismatch,
    #[error("map is not a bimodule homomorphism of the expected degree")]
    NotInHom,
}

/// Tensor power `A^{(x) r}` helpers on flat coordinate vectors.
#[derive(Clone, Debug)]
pub struct Tensors<'a> {
    pub alg: &'a DgAlgebra,
}

impl<'a> Tensors<'a> {
    pub fn len(&self, r: usize) -> usize {
        self.alg.dim().pow(r as u32)
    }

    fn digits(&self, mut idx: usize, r: usize) -> Vec<usize> {
        let n = self.alg.dim();
        let mut d = vec![0; r];
        for p in (0..r).rev() {
            d[p] = idx % n;
            idx /= n;
        }
        d
    }

    fn index(&self, digits: &[usize]) -> usize {
        let n = self.alg.dim();
        digits.iter().fold(0, |acc, &x| acc * n + x)
    }

    pub fn degree_of_index(&self, idx: usize, r: usize) -> i64 {
        self.digits(idx, r).iter().map(|&i| self.alg.degrees[i]).sum()
    }

    /// Elementary tensor of the given factors.
    pub fn pure(&self, factors: &[&[Q]]) -> Vec<Q> {
        let mut t = vec![Q::one()];
        for f in factors {
            let mut next = Vec::with_capacity(t.len() * f.len());
            for a in &t {
                for b in f.iter() {
                    next.push(a * b);
                }
            }
            t = next;
        }
        t
    }

    /// Multiply the first tensor factor on the left by `a`.
    pub fn left(&self, a: &[Q], t: &[Q], r: usize) -> Vec<Q> {
        let n = self.alg.dim();
        let rest = n.pow(r as u32 - 1);
        let mut out = zero_vec(t.len());
        for i in 0..n {
            let block = &t[i * rest..(i + 1) * rest];
            if is_zero_vec(block) {
                continue;
            }
            let ab = self.alg.mul(a, &self.alg.basis_vec(i));
            for (k, c) in ab.iter().enumerate() {
                if c.is_zero() {
                    continue;
                }
                for (j, x) in block.iter().enumerate() {
                    if !x.is_zero() {
                        out[k * rest + j] += c * x;
                    }
                }
            }
        }
        out
    }

    /// Multiply the last tensor factor on the right by `b`.
    pub fn right(&self, t: &[Q], b: &[Q]) -> Vec<Q> {
        let n = self.alg.dim();
        let mut out = zero_vec(t.len());
        let blocks = t.len() / n;
        for p in 0..blocks {
            for i in 0..n {
                let x = &t[p * n + i];
                if x.is_zero() {
                    continue;
                }
                let ib = self.alg.mul(&self.alg.basis_vec(i), b);
                for (k, c) in ib.iter().enumerate() {
                    if !c.is_zero() {
                        out[p * n + k] += x * c;
                    }
                }
            }
        }
        out
    }

    /// Leibniz differential with Koszul signs across factors.
    pub fn d(&self, t: &[Q], r: usize) -> Vec<Q> {
        let mut out = zero_vec(t.len());
        for (idx, x) in t.iter().enumerate() {
            if x.is_zero() {
                continue;
            }
            let dig = self.digits(idx, r);
            let mut before = 0;
            for p in 0..r {
                let dcol = self.alg.diff.col(dig[p]);
                for (k, c) in dcol.iter().enumerate() {
                    if c.is_zero() {
                        continue;
                    }
                    let mut nd = dig.clone();
                    nd[p] = k;
                    out[self.index(&nd)] += sign(before) * c * x;
                }
                before += self.alg.degrees[dig[p]];
            }
        }
        out
    }

    /// Multiply the last factor of `t` with the first factor of `u`.
    pub fn glue(&self, t: &[Q], r: usize, u: &[Q], s: usize) -> Vec<Q> {
        let n = self.alg.dim();
        let len = self.len(r + s - 1);
        let mut out = zero_vec(len);
        let u_rest = n.pow(s as u32 - 1);
        for (i, x) in t.iter().enumerate() {
            if x.is_zero() {
                continue;
            }
            let head = i / n;
            let last = i % n;
            for (j, y) in u.iter().enumerate() {
                if y.is_zero() {
                    continue;
                }
                let first = j / u_rest;
                let tail = j % u_rest;
                let p = &self.alg.mult[last][first];
                for (k, c) in p.iter().enumerate() {
                    if !c.is_zero() {
                        out[(head * n + k) * u_rest + tail] += c * x * y;
                    }
                }
            }
        }
        out
    }
}

/// A dg bimodule realised as a homogeneous subspace of `A^{(x) r}`.
#[derive(Clone, Debug)]
pub struct Bimod {
    pub r: usize,
    pub basis: Vec<Vec<Q>>,
    pub degrees: Vec<i64>,
    by_degree: BTreeMap<i64, (usize, Subspace)>,
    index_degrees: Vec<i64>,
}

impl Bimod {
    /// Span of homogeneous tensors.
    pub fn from_span(alg: &DgAlgebra, r: usize, vecs: &[Vec<Q>]) -> Bimod {
        let ts = Tensors { alg };
        let len = ts.len(r);
        let index_degrees: Vec<i64> = (0..len).map(|i| ts.degree_of_index(i, r)).collect();
        let mut grouped: BTreeMap<i64, Vec<Vec<Q>>> = BTreeMap::new();
        for v in vecs {
            for (k, part) in split_by_degree(v, &index_degrees) {
                grouped.entry(k).or_default().push(part);
            }
        }
        let mut basis = Vec::new();
        let mut degrees = Vec::new();
        let mut by_degree = BTreeMap::new();
        for (k, vs) in grouped {
            let s = Subspace::span(len, &vs);
            if s.is_zero() {
                continue;
            }
            by_degree.insert(k, (basis.len(), s.clone()));
            for b in s.basis() {
                basis.push(b.clone());
                degrees.push(k);
            }
        }
        Bimod { r, basis, degrees, by_degree, index_degrees }
    }

    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    pub fn coords(&self, v: &[Q]) -> Option<Vec<Q>> {
        let mut out = zero_vec(self.dim());
        for (k, part) in split_by_degree(v, &self.index_degrees) {
            let (offset, s) = self.by_degree.get(&k)?;
            let c = s.coords(&part)?;
            for (i, x) in c.into_iter().enumerate() {
                out[offset + i] = x;
            }
        }
        Some(out)
    }

    pub fn vector(&self, coords: &[Q]) -> Vec<Q> {
        let mut v = zero_vec(self.index_degrees.len());
        for (c, b) in coords.iter().zip(&self.basis) {
            axpy(&mut v, c, b);
        }
        v
    }

    fn matrix_of(&self, f: impl Fn(&[Q]) -> Vec<Q>) -> Mat {
        let cols: Vec<Vec<Q>> =
            self.basis.iter().map(|b| self.coords(&f(b)).expect("bimodule not closed under the operation")).collect();
        Mat::from_cols(&cols, self.dim())
    }

    pub fn left_matrix(&self, alg: &DgAlgebra, a: &[Q]) -> Mat {
        let ts = Tensors { alg };
        self.matrix_of(|b| ts.left(a, b, self.r))
    }

    pub fn right_matrix(&self, alg: &DgAlgebra, a: &[Q]) -> Mat {
        let ts = Tensors { alg };
        self.matrix_of(|b| ts.right(b, a))
    }

    pub fn diff_matrix(&self, alg: &DgAlgebra) -> Mat {
        let ts = Tensors { alg };
        self.matrix_of(|b| ts.d(b, self.r))
    }

    pub fn graded_space(&self) -> GradedVectorSpace {
        let mut dims = BTreeMap::new();
        for &k in &self.degrees {
            *dims.entry(k).or_insert(0) += 1;
        }
        GradedVectorSpace::new(dims)
    }
}

fn split_by_degree(v: &[Q], index_degrees: &[i64]) -> Vec<(i64, Vec<Q>)> {
    let mut parts: BTreeMap<i64, Vec<Q>> = BTreeMap::new();
    for (i, x) in v.iter().enumerate() {
        if x.is_zero() {
            continue;
        }
        parts.entry(index_degrees[i]).or_insert_with(|| zero_vec(v.len()))[i] = x.clone();
    }
    parts.into_iter().collect()
}

/// Generator 1-morphisms. Idempotents are referred to by their index in the
/// algebra's idempotent list.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub enum Gen {
    Id(usize),
    P(usize, usize),
}

/// A homogeneous 2-morphism: degree and coordinates in the Hom space basis.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct HomElem {
    pub degree: i64,
    pub coords: Vec<Q>,
}

#[derive(Clone, Debug)]
struct HomDegree {
    maps: Vec<Mat>,
    span: Subspace,
}

/// Graded Hom complex between two generator bimodules, with an explicit
/// basis of bimodule maps in each degree.
#[derive(Clone, Debug)]
pub struct HomSpace {
    pub source: Gen,
    pub target: Gen,
    pub object_mismatch: bool,
    src_dim: usize,
    tgt_dim: usize,
    by_degree: BTreeMap<i64, HomDegree>,
    pub complex: Complex,
}

impl HomSpace {
    fn build(
        source: Gen,
        target: Gen,
        src: &Bimod,
        tgt: &Bimod,
        spanning: BTreeMap<i64, Vec<Mat>>,
        dsrc: &Mat,
        dtgt: &Mat,
        object_mismatch: bool,
    ) -> HomSpace {
        let (sd, td) = (src.dim(), tgt.dim());
        let mut by_degree = BTreeMap::new();
        for (k, maps) in spanning {
            let flat: Vec<Vec<Q>> = maps.iter().map(|m| m.flatten()).collect();
            let span = Subspace::span(sd * td, &flat);
            if span.is_zero() {
                continue;
            }
            let maps = span.basis().iter().map(|v| Mat::from_flat(td, sd, v.clone())).collect();
            by_degree.insert(k, HomDegree { maps, span });
        }
        let dims: BTreeMap<i64, usize> = by_degree.iter().map(|(&k, h)| (k, h.maps.len())).collect();
        let space = GradedVectorSpace::new(dims);
        let mut blocks = BTreeMap::new();
        for (&k, h) in &by_degree {
            let s = sign(k);
            let cols: Vec<Vec<Q>> = h
                .maps
                .iter()
                .map(|f| {
                    let df = dtgt.mul(f).sub(&f.mul(dsrc).scale(&s));
                    if df.is_zero() {
                        return zero_vec(space.dim(k + 1));
                    }
                    by_degree
                        .get(&(k + 1))
                        .and_then(|h1: &HomDegree| h1.span.coords(&df.flatten()))
                        .expect("Hom space not closed under the differential")
                })
                .collect();
            blocks.insert(k, Mat::from_cols(&cols, space.dim(k + 1)));
        }
        let d = GradedMap::new(&space, &space, 1, blocks).expect("Hom differential shapes");
        let complex = Complex::new(space, d).expect("Hom differential squares to zero");
        HomSpace { source, target, object_mismatch, src_dim: sd, tgt_dim: td, by_degree, complex }
    }

    pub fn dim(&self, k: i64) -> usize {
        self.by_degree.get(&k).map_or(0, |h| h.maps.len())
    }

    pub fn total_dim(&self) -> usize {
        self.by_degree.values().map(|h| h.maps.len()).sum()
    }

    pub fn degrees(&self) -> Vec<i64> {
        self.by_degree.keys().copied().collect()
    }

    pub fn basis_maps(&self, k: i64) -> &[Mat] {
        self.by_degree.get(&k).map_or(&[], |h| h.maps.as_slice())
    }

    pub fn span(&self, k: i64) -> Subspace {
        self.by_degree.get(&k).map_or_else(|| Subspace::zero(self.src_dim * self.tgt_dim), |h| h.span.clone())
    }

    /// Matrix of an element.
    pub fn matrix(&self, e: &HomElem) -> Mat {
        let mut m = Mat::zeros(self.tgt_dim, self.src_dim);
        for (c, b) in e.coords.iter().zip(self.basis_maps(e.degree)) {
            if !c.is_zero() {
                m = m.add(&b.scale(c));
            }
        }
        m
    }

    /// Coordinates of a map in degree `k`.
    pub fn coords(&self, k: i64, m: &Mat) -> Option<Vec<Q>> {
        if m.is_zero() {
            return Some(zero_vec(self.dim(k)));
        }
        self.by_degree.get(&k)?.span.coords(&m.flatten())
    }

    pub fn elem(&self, k: i64, m: &Mat) -> Option<HomElem> {
        Some(HomElem { degree: k, coords: self.coords(k, m)? })
    }

    pub fn basis_elem(&self, k: i64, i: usize) -> HomElem {
        let mut coords = zero_vec(self.dim(k));
        coords[i] = Q::one();
        HomElem { degree: k, coords }
    }

    pub fn differential(&self, e: &HomElem) -> HomElem {
        let coords = self.complex.diff(e.degree).apply(&e.coords);
        HomElem { degree: e.degree + 1, coords }
    }

    pub fn same_spaces(&self, other: &HomSpace) -> bool {
        let ks: std::collections::BTreeSet<i64> = self.by_degree.keys().chain(other.by_degree.keys()).copied().collect();
        ks.into_iter().all(|k| self.span(k) == other.span(k))
    }
}

/// One copy of a generator inside the expansion of a composite.
#[derive(Clone, Debug)]
pub struct ExpansionCopy {
    pub gen: Gen,
    pub shift: i64,
    /// Junction label: index of the adapted basis element of the middle
    /// complex, or `None` when one factor is an identity.
    pub label: Option<usize>,
}

/// `F o G` written as a twisted complex over generator copies: the copies,
/// the connecting maps between them (all multiples of identities), and the
/// isomorphism from the direct sum of copies onto the composite model.
#[derive(Clone, Debug)]
pub struct Expansion {
    pub outer: Gen,
    pub inner: Gen,
    pub model: Arc<Bimod>,
    pub copies: Vec<ExpansionCopy>,
    /// `(from, to, coefficient)` with `from > to`.
    pub connections: Vec<(usize, usize, Q)>,
    theta: Mat,
    theta_inv: Mat,
    offsets: Vec<usize>,
}

/// The 2-category attached to a dg algebra, restricted to generator
/// 1-morphisms, with cached bimodule models and Hom spaces.
pub struct CatA {
    pub alg: DgAlgebra,
    pub blocks: BlockDecomposition,
    pub classes: IdempotentClasses,
    pub seed: u64,
    models: Mutex<HashMap<Gen, Arc<Bimod>>>,
    homs: Mutex<HashMap<(Gen, Gen), Arc<HomSpace>>>,
    expansions: Mutex<HashMap<(Gen, Gen), Arc<Expansion>>>,
    diffs: Mutex<HashMap<Gen, Arc<Mat>>>,
}

impl fmt::Debug for CatA {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("CatA").field("dim", &self.alg.dim()).field("blocks", &self.blocks).finish()
    }
}

impl CatA {
    pub fn new(alg: DgAlgebra, seed: u64) -> CatA {
        let blocks = alg.blocks();
        let classes = alg.idempotent_classes(seed);
        CatA {
            alg,
            blocks,
            classes,
            seed,
            models: Mutex::new(HashMap::new()),
            homs: Mutex::new(HashMap::new()),
            expansions: Mutex::new(HashMap::new()),
            diffs: Mutex::new(HashMap::new()),
        }
    }

    pub fn idem(&self, i: usize) -> &[Q] {
        &self.alg.idempotents[i].vector
    }

    pub fn block_of_idem(&self, i: usize) -> usize {
        self.blocks.block_of[i]
    }

    pub fn block_unit(&self, b: usize) -> Vec<Q> {
        self.alg.block_unit_of(&self.blocks.blocks[b])
    }

    /// Representative idempotents, lowest index per class.
    pub fn reps(&self) -> Vec<usize> {
        self.classes.representatives.clone()
    }

    /// Generator list: identities for every block, then `P(e,f)` for
    /// representative idempotents.
    pub fn generators(&self) -> Vec<Gen> {
        let mut g: Vec<Gen> = (0..self.blocks.blocks.len()).map(Gen::Id).collect();
        for &e in &self.reps() {
            for &f in &self.reps() {
                g.push(Gen::P(e, f));
            }
        }
        g
    }

    /// `(source, target)` objects.
    pub fn objects(&self, g: Gen) -> (usize, usize) {
        match g {
            Gen::Id(i) => (i, i),
            Gen::P(e, f) => (self.block_of_idem(f), self.block_of_idem(e)),
        }
    }

    pub fn composable(&self, outer: Gen, inner: Gen) -> bool {
        self.objects(outer).0 == self.objects(inner).1
    }

    pub fn name(&self, g: Gen) -> String {
        match g {
            Gen::Id(i) => format!("Id:{}", i + 1),
            Gen::P(e, f) => format!("P:{},{}", self.alg.idempotents[e].label, self.alg.idempotents[f].label),
        }
    }

    pub fn parse_gen(&self, s: &str) -> Result<Gen, BimoduleError> {
        let err = || BimoduleError::UnknownGenerator(s.to_string());
        let s = s.trim();
        if let Some(rest) = s.strip_prefix("Id:") {
            let b: usize = rest.trim().parse().map_err(|_| err())?;
            if b == 0 || b > self.blocks.blocks.len() {
                return Err(err());
            }
            return Ok(Gen::Id(b - 1));
        }
        let body = s
            .strip_prefix("P:")
            .or_else(|| s.strip_prefix("P(").and_then(|r| r.strip_suffix(')')))
            .ok_or_else(err)?;
        let (a, b) = body.split_once(',').ok_or_else(err)?;
        let find = |l: &str| self.alg.idempotents.iter().position(|e| e.label == l.trim()).ok_or_else(err);
        Ok(Gen::P(find(a)?, find(b)?))
    }

    pub fn model(&self, g: Gen) -> Arc<Bimod> {
        if let Some(m) = self.models.lock().unwrap().get(&g) {
            return m.clone();
        }
        let alg = &self.alg;
        let m = match g {
            Gen::Id(i) => {
                let eps = self.block_unit(i);
                let vecs: Vec<Vec<Q>> = alg.corner(&eps, &eps).into_iter().map(|(_, v)| v).collect();
                Bimod::from_span(alg, 1, &vecs)
            }
            Gen::P(e, f) => {
                let ts = Tensors { alg };
                let ae = alg.corner(&alg.unit, self.idem(e));
                let fa = alg.corner(self.idem(f), &alg.unit);
                let mut vecs = Vec::new();
                for (_, x) in &ae {
                    for (_, y) in &fa {
                        vecs.push(ts.pure(&[x, y]));
                    }
                }
                Bimod::from_span(alg, 2, &vecs)
            }
        };
        let m = Arc::new(m);
        self.models.lock().unwrap().insert(g, m.clone());
        m
    }

    pub fn diff_of(&self, g: Gen) -> Arc<Mat> {
        if let Some(m) = self.diffs.lock().unwrap().get(&g) {
            return m.clone();
        }
        let d = Arc::new(self.model(g).diff_matrix(&self.alg));
        self.diffs.lock().unwrap().insert(g, d.clone());
        d
    }

    /// Bimodule map `P(e,f) -> P(e',f')` sending `x (x) y` to
    /// `(-1)^{n|x|} x u (x) v y`, for homogeneous `u` in `eAe'` and `v` in `f'Af`.
    pub fn pp_map(&self, src: Gen, tgt: Gen, u: &[Q], v: &[Q]) -> Mat {
        let alg = &self.alg;
        let ts = Tensors { alg };
        let (ms, mt) = (self.model(src), self.model(tgt));
        let n = alg.degree_of(u).unwrap().unwrap_or(0) + alg.degree_of(v).unwrap().unwrap_or(0);
        let Gen::P(e, f) = src else { panic!("pp_map needs projective generators") };
        let ae = alg.corner(&alg.unit, self.idem(e));
        let fa = alg.corner(self.idem(f), &alg.unit);
        // the model basis is an echelon basis; evaluate on pure tensors and convert
        let mut pure_in = Vec::new();
        let mut pure_out = Vec::new();
        for (kx, x) in &ae {
            for (_, y) in &fa {
                pure_in.push(ms.coords(&ts.pure(&[x, y])).unwrap());
                let img = ts.pure(&[&alg.mul(x, u), &alg.mul(v, y)]);
                let img: Vec<Q> = img.iter().map(|c| c * sign(n * kx)).collect();
                pure_out.push(mt.coords(&img).expect("image outside the target model"));
            }
        }
        solve_linear_map(&pure_in, &pure_out, ms.dim(), mt.dim())
    }

    /// Closed-form Hom space, cached.
    pub fn hom(&self, src: Gen, tgt: Gen) -> Arc<HomSpace> {
        if let Some(h) = self.homs.lock().unwrap().get(&(src, tgt)) {
            return h.clone();
        }
        let h = Arc::new(self.closed_form_hom(src, tgt));
        self.homs.lock().unwrap().insert((src, tgt), h.clone());
        h
    }

    fn empty_hom(&self, src: Gen, tgt: Gen, mismatch: bool) -> HomSpace {
        let (ms, mt) = (self.model(src), self.model(tgt));
        HomSpace::build(src, tgt, &ms, &mt, BTreeMap::new(), &self.diff_of(src), &self.diff_of(tgt), mismatch)
    }

    pub fn closed_form_hom(&self, src: Gen, tgt: Gen) -> HomSpace {
        if self.objects(src) != self.objects(tgt) {
            return self.empty_hom(src, tgt, true);
        }
        let alg = &self.alg;
        let (ms, mt) = (self.model(src), self.model(tgt));
        let mut spanning: BTreeMap<i64, Vec<Mat>> = BTreeMap::new();
        match (src, tgt) {
            (Gen::P(e, f), Gen::P(e2, f2)) => {
                let us = alg.corner(self.idem(e), self.idem(e2));
                let vs = alg.corner(self.idem(f2), self.idem(f));
                for (ku, u) in &us {
                    for (kv, v) in &vs {
                        spanning.entry(ku + kv).or_default().push(self.pp_map(src, tgt, u, v));
                    }
                }
            }
            (Gen::Id(i), Gen::Id(_)) => {
                let eps = self.block_unit(i);
                let z = alg.center();
                for (k, zv) in alg.homogeneous_basis(&z) {
                    let zv = alg.mul(&zv, &eps);
                    if is_zero_vec(&zv) {
                        continue;
                    }
                    spanning.entry(k).or_default().push(self.center_map(i, &zv, k));
                }
            }
            (Gen::P(e, f), Gen::Id(_)) => {
                // determined by the image of e (x) f in eAf
                for (k, x) in alg.corner(self.idem(e), self.idem(f)) {
                    spanning.entry(k).or_default().push(self.p_to_id_map(src, tgt, &x, k));
                }
            }
            (Gen::Id(i), Gen::P(..)) => {
                // determined by the image z of the block unit: graded-central elements of P
                let eps = self.block_unit(i);
                let acts: Vec<(i64, Mat, Mat)> = alg
                    .corner(&eps, &eps)
                    .into_iter()
                    .map(|(ka, a)| (ka, mt.left_matrix(alg, &a), mt.right_matrix(alg, &a)))
                    .collect();
                let mut degs: Vec<i64> = mt.degrees.clone();
                degs.dedup();
                for n in degs {
                    let idx: Vec<usize> = (0..mt.dim()).filter(|&j| mt.degrees[j] == n).collect();
                    let mut rows = Vec::new();
                    for (ka, l, r) in &acts {
                        let c = l.scale(&sign(n * ka)).sub(r);
                        for row in 0..mt.dim() {
                            rows.push(idx.iter().map(|&j| c[(row, j)].clone()).collect::<Vec<Q>>());
                        }
                    }
                    for sol in Mat::from_rows(&rows, idx.len()).kernel() {
                        let mut z = zero_vec(mt.dim());
                        for (c, &j) in sol.iter().zip(&idx) {
                            z[j] = c.clone();
                        }
                        let zv = mt.vector(&z);
                        let cols: Vec<Vec<Q>> = ms
                            .basis
                            .iter()
                            .map(|a| mt.coords(&Tensors { alg }.right(&zv, a)).expect("right action stays in the model"))
                            .collect();
                        spanning.entry(n).or_default().push(Mat::from_cols(&cols, mt.dim()));
                    }
                }
            }
        }
        HomSpace::build(src, tgt, &ms, &mt, spanning, &self.diff_of(src), &self.diff_of(tgt), false)
    }

    /// Bimodule map `P(e,f) -> Id` sending `a (x) b` to `(-1)^{k|a|} a x b` for `x` in `eAf`.
    fn p_to_id_map(&self, src: Gen, tgt: Gen, x: &[Q], k: i64) -> Mat {
        let alg = &self.alg;
        let ts = Tensors { alg };
        let (ms, mt) = (self.model(src), self.model(tgt));
        let Gen::P(e, f) = src else { unreachable!() };
        let ae = alg.corner(&alg.unit, self.idem(e));
        let fa = alg.corner(self.idem(f), &alg.unit);
        let mut ins = Vec::new();
        let mut outs = Vec::new();
        for (ka, a) in &ae {
            for (_, b) in &fa {
                ins.push(ms.coords(&ts.pure(&[a, b])).unwrap());
                let v: Vec<Q> = alg.mul(&alg.mul(a, x), b).iter().map(|c| c * sign(k * ka)).collect();
                outs.push(mt.coords(&v).expect("image inside the block"));
            }
        }
        solve_linear_map(&ins, &outs, ms.dim(), mt.dim())
    }

    /// Endomorphism `a -> (-1)^{k|a|} a z` of `Id_i` for a central `z` of degree `k`.
    pub fn center_map(&self, i: usize, z: &[Q], k: i64) -> Mat {
        let alg = &self.alg;
        let m = self.model(Gen::Id(i));
        let eps = self.block_unit(i);
        let block = alg.corner(&eps, &eps);
        let ins: Vec<Vec<Q>> = block.iter().map(|(_, a)| m.coords(a).unwrap()).collect();
        let outs: Vec<Vec<Q>> = block
            .iter()
            .map(|(ka, a)| {
                let v: Vec<Q> = alg.mul(a, z).iter().map(|c| c * sign(k * ka)).collect();
                m.coords(&v).expect("central element of the block")
            })
            .collect();
        solve_linear_map(&ins, &outs, m.dim(), m.dim())
    }

    /// Brute-force Hom space: all `phi` with `phi(a m) = (-1)^{n|a|} a phi(m)`
    /// and `phi(m b) = phi(m) b`.
    pub fn oracle_hom(&self, src: Gen, tgt: Gen) -> HomSpace {
        if self.objects(src) != self.objects(tgt) {
            return self.empty_hom(src, tgt, true);
        }
        let (ms, mt) = (self.model(src), self.model(tgt));
        let spanning = oracle_maps(&self.alg, &ms, &mt);
        HomSpace::build(src, tgt, &ms, &mt, spanning, &self.diff_of(src), &self.diff_of(tgt), false)
    }

    /// Vertical composition `g o f`.
    pub fn vcompose(&self, g: &HomElem, g_src: Gen, g_tgt: Gen, f: &HomElem, f_src: Gen, f_tgt: Gen) -> Result<HomElem, BimoduleError> {
        if g_src != f_tgt {
            return Err(BimoduleError::MiddleMismatch);
        }
        let hg = self.hom(g_src, g_tgt);
        let hf = self.hom(f_src, f_tgt);
        let m = hg.matrix(g).mul(&hf.matrix(f));
        self.hom(f_src, g_tgt).elem(g.degree + f.degree, &m).ok_or(BimoduleError::NotInHom)
    }

    pub fn identity_elem(&self, g: Gen) -> HomElem {
        let h = self.hom(g, g);
        h.elem(0, &Mat::identity(self.model(g).dim())).expect("identity is a bimodule map")
    }

    /// Model of the composite `outer o inner`, glued along the middle factor.
    fn composite_model(&self, outer: Gen, inner: Gen) -> Bimod {
        let ts = Tensors { alg: &self.alg };
        let (mo, mi) = (self.model(outer), self.model(inner));
        let mut vecs = Vec::new();
        for x in &mo.basis {
            for y in &mi.basis {
                vecs.push(ts.glue(x, mo.r, y, mi.r));
            }
        }
        Bimod::from_span(&self.alg, mo.r + mi.r - 1, &vecs)
    }

    /// Adapted basis of the middle complex `fAe'` as homogeneous vectors:
    /// free generators first, then pairs `(d b, b)`.
    fn middle_basis(&self, f: usize, e2: usize) -> Vec<(i64, Vec<Q>, Option<usize>)> {
        let alg = &self.alg;
        let basis = alg.corner(self.idem(f), self.idem(e2));
        let mut labels: BTreeMap<i64, Vec<String>> = BTreeMap::new();
        let mut per_degree: BTreeMap<i64, Vec<Vec<Q>>> = BTreeMap::new();
        for (k, v) in &basis {
            per_degree.entry(*k).or_default().push(v.clone());
            labels.entry(*k).or_default().push(String::new());
        }
        let space = GradedVectorSpace::with_labels(labels);
        let mut blocks = BTreeMap::new();
        for (&k, vs) in &per_degree {
            let Some(next) = per_degree.get(&(k + 1)) else { continue };
            let m = Mat::from_cols(next, alg.dim());
            let cols: Vec<Vec<Q>> = vs.iter().map(|v| m.solve(&alg.d(v)).expect("corner closed under d")).collect();
            blocks.insert(k, Mat::from_cols(&cols, next.len()));
        }
        let d = GradedMap::new(&space, &space, 1, blocks).expect("middle complex shapes");
        let cx = Complex::new(space, d).expect("middle complex");
        let ab = decompose_complex(&cx);
        let to_vec = |k: i64, c: &[Q]| {
            let mut v = zero_vec(alg.dim());
            for (a, b) in c.iter().zip(&per_degree[&k]) {
                axpy(&mut v, a, b);
            }
            v
        };
        let mut out = Vec::new();
        for g in &ab.free {
            out.push((g.degree, to_vec(g.degree, &g.vector), None));
        }
        for p in &ab.pairs {
            let t = out.len();
            out.push((p.degree + 1, to_vec(p.degree + 1, &p.target), None));
            out.push((p.degree, to_vec(p.degree, &p.source), Some(t)));
        }
        out
    }

    /// Expansion of `outer o inner` into shifted generator copies.
    pub fn expansion(&self, outer: Gen, inner: Gen) -> Result<Arc<Expansion>, BimoduleError> {
        if !self.composable(outer, inner) {
            return Err(BimoduleError::NotComposable(self.name(outer), self.name(inner)));
        }
        if let Some(x) = self.expansions.lock().unwrap().get(&(outer, inner)) {
            return Ok(x.clone());
        }
        let alg = &self.alg;
        let ts = Tensors { alg };
        let model = Arc::new(self.composite_model(outer, inner));
        let mut copies = Vec::new();
        let mut connections = Vec::new();
        let mut cols: Vec<Vec<Q>> = Vec::new();
        let mut offsets = Vec::new();
        match (outer, inner) {
            (Gen::Id(_), g) | (g, Gen::Id(_)) => {
                let mg = self.model(g);
                offsets.push(0);
                for b in &mg.basis {
                    cols.push(model.coords(b).expect("identity composite"));
                }
                copies.push(ExpansionCopy { gen: g, shift: 0, label: None });
            }
            (Gen::P(e, f), Gen::P(e2, f2)) => {
                let target = Gen::P(e, f2);
                let mp = self.model(target);
                let ae = alg.corner(&alg.unit, self.idem(e));
                let fa = alg.corner(self.idem(f2), &alg.unit);
                for (idx, (k, c, partner)) in self.middle_basis(f, e2).into_iter().enumerate() {
                    offsets.push(cols.len());
                    let mut ins = Vec::new();
                    let mut outs = Vec::new();
                    for (kx, x) in &ae {
                        for (_, y) in &fa {
                            ins.push(mp.coords(&ts.pure(&[x, y])).unwrap());
                            let t: Vec<Q> = ts.pure(&[x, &c, y]).iter().map(|z| z * sign(k * kx)).collect();
                            outs.push(model.coords(&t).expect("copy inside the composite"));
                        }
                    }
                    let theta = solve_linear_map(&ins, &outs, mp.dim(), model.dim());
                    for j in 0..theta.cols {
                        cols.push(theta.col(j));
                    }
                    copies.push(ExpansionCopy { gen: target, shift: -k, label: Some(idx) });
                    if let Some(t) = partner {
                        connections.push((idx, t, Q::one()));
                    }
                }
            }
        }
        let theta = Mat::from_cols(&cols, model.dim());
        let theta_inv = theta.inverse().expect("expansion is an isomorphism");
        let x = Arc::new(Expansion { outer, inner, model, copies, connections, theta, theta_inv, offsets });
        self.expansions.lock().unwrap().insert((outer, inner), x.clone());
        Ok(x)
    }

    /// `phi o_0 id_G` on composite models, for `phi : F2 -> F1`.
    pub fn whisker_left_matrix(&self, phi: &Mat, f2: Gen, f1: Gen, g: Gen) -> Mat {
        let ts = Tensors { alg: &self.alg };
        let (m2, m1, mg) = (self.model(f2), self.model(f1), self.model(g));
        let (c2, c1) = (self.expansion(f2, g).unwrap(), self.expansion(f1, g).unwrap());
        let mut ins = Vec::new();
        let mut outs = Vec::new();
        for (i, x) in m2.basis.iter().enumerate() {
            let fx = m1.vector(&phi.col(i));
            for y in &mg.basis {
                ins.push(c2.model.coords(&ts.glue(x, m2.r, y, mg.r)).unwrap());
                outs.push(c1.model.coords(&ts.glue(&fx, m1.r, y, mg.r)).expect("whiskered image"));
            }
        }
        solve_linear_map(&ins, &outs, c2.model.dim(), c1.model.dim())
    }

    /// `id_F o_0 psi` on composite models, for `psi : G2 -> G1` of degree `n`,
    /// with Koszul sign `(-1)^{n|x|}`.
    pub fn whisker_right_matrix(&self, f: Gen, psi: &Mat, n: i64, g2: Gen, g1: Gen) -> Mat {
        let ts = Tensors { alg: &self.alg };
        let (mf, m2, m1) = (self.model(f), self.model(g2), self.model(g1));
        let (c2, c1) = (self.expansion(f, g2).unwrap(), self.expansion(f, g1).unwrap());
        let mut ins = Vec::new();
        let mut outs = Vec::new();
        for (xi, x) in mf.basis.iter().enumerate() {
            let s = sign(n * mf.degrees[xi]);
            for (i, y) in m2.basis.iter().enumerate() {
                let py = m1.vector(&psi.col(i));
                ins.push(c2.model.coords(&ts.glue(x, mf.r, y, m2.r)).unwrap());
                let out: Vec<Q> = ts.glue(x, mf.r, &py, m1.r).iter().map(|c| c * &s).collect();
                outs.push(c1.model.coords(&out).expect("whiskered image"));
            }
        }
        solve_linear_map(&ins, &outs, c2.model.dim(), c1.model.dim())
    }
}

impl Expansion {
    /// Block `(to, from)` of `theta^{-1} W theta'` for a map `W` between
    /// composite models, as a matrix between generator models.
    pub fn component(&self, w: &Mat, from_exp: &Expansion, to: usize, from: usize) -> Mat {
        let full = self.theta_inv.mul(w).mul(&from_exp.theta);
        let r0 = self.offsets[to];
        let r1 = self.offsets.get(to + 1).copied().unwrap_or(full.rows);
        let c0 = from_exp.offsets[from];
        let c1 = from_exp.offsets.get(from + 1).copied().unwrap_or(full.cols);
        let mut m = Mat::zeros(r1 - r0, c1 - c0);
        for r in r0..r1 {
            for c in c0..c1 {
                m[(r - r0, c - c0)] = full[(r, c)].clone();
            }
        }
        m
    }
}

/// The unique linear map sending `ins[i]` to `outs[i]`; inputs must span.
pub fn solve_linear_map(ins: &[Vec<Q>], outs: &[Vec<Q>], src_dim: usize, tgt_dim: usize) -> Mat {
    let idx = independent_subset(ins, src_dim);
    assert_eq!(idx.len(), src_dim, "inputs do not span the source");
    let a = Mat::from_cols(&idx.iter().map(|&i| ins[i].clone()).collect::<Vec<_>>(), src_dim);
    let b = Mat::from_cols(&idx.iter().map(|&i| outs[i].clone()).collect::<Vec<_>>(), tgt_dim);
    let m = b.mul(&a.inverse().expect("independent inputs"));
    debug_assert!(ins.iter().zip(outs).all(|(i, o)| m.apply(i) == *o), "map not well defined");
    m
}

/// Solve the bimodule-map equations degree by degree.
pub fn oracle_maps(alg: &DgAlgebra, ms: &Bimod, mt: &Bimod) -> BTreeMap<i64, Vec<Mat>> {
    let (sd, td) = (ms.dim(), mt.dim());
    let mut out = BTreeMap::new();
    if sd == 0 || td == 0 {
        return out;
    }
    let lefts: Vec<(Mat, Mat, i64)> = (0..alg.dim())
        .map(|a| {
            let v = alg.basis_vec(a);
            (ms.left_matrix(alg, &v), mt.left_matrix(alg, &v), alg.degrees[a])
        })
        .collect();
    let rights: Vec<(Mat, Mat)> = (0..alg.dim())
        .map(|a| {
            let v = alg.basis_vec(a);
            (ms.right_matrix(alg, &v), mt.right_matrix(alg, &v))
        })
        .collect();
    let mut degs: Vec<i64> = Vec::new();
    for &a in &ms.degrees {
        for &b in &mt.degrees {
            degs.push(b - a);
        }
    }
    degs.sort();
    degs.dedup();
    for n in degs {
        // variables: entries (j, i) with deg_j = deg_i + n
        let vars: Vec<(usize, usize)> = (0..td)
            .flat_map(|j| (0..sd).map(move |i| (j, i)))
            .filter(|&(j, i)| mt.degrees[j] == ms.degrees[i] + n)
            .collect();
        let mut rows: Vec<Vec<Q>> = Vec::new();
        let build = |ls: &Mat, lt: &Mat, s: &Q, rows: &mut Vec<Vec<Q>>| {
            // X ls - s lt X = 0, as linear forms in the variables
            for r in 0..td {
                for c in 0..sd {
                    let mut row = zero_vec(vars.len());
                    for (v, &(j, i)) in vars.iter().enumerate() {
                        let mut coef = Q::zero();
                        if j == r {
                            coef += &ls[(i, c)];
                        }
                        if i == c {
                            coef -= s * &lt[(r, j)];
                        }
                        row[v] = coef;
                    }
                    if !is_zero_vec(&row) {
                        rows.push(row);
                    }
                }
            }
        };
        for (ls, lt, ka) in &lefts {
            build(ls, lt, &sign(n * ka), &mut rows);
        }
        for (rs, rt) in &rights {
            build(rs, rt, &Q::one(), &mut rows);
        }
        let sols = if rows.is_empty() {
            (0..vars.len()).map(|v| crate::linalg::unit_vec(vars.len(), v)).collect()
        } else {
            Mat::from_rows(&rows, vars.len()).kernel()
        };
        let maps: Vec<Mat> = sols
            .iter()
            .map(|s| {
                let mut m = Mat::zeros(td, sd);
                for (c, &(j, i)) in s.iter().zip(&vars) {
                    m[(j, i)] = c.clone();
                }
                m
            })
            .collect();
        if !maps.is_empty() {
            out.insert(n, maps);
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::examples;
    use crate::linalg::q;

    fn cats() -> Vec<CatA> {
        let mut v: Vec<CatA> = examples::all().into_iter().map(|(_, a)| CatA::new(a, 7)).collect();
        v.push(CatA::new(examples::dual_numbers(1, false), 7));
        v.push(CatA::new(examples::dual_numbers_times_q(), 7));
        v
    }

    #[test]
    fn closed_form_matches_oracle() {
        for c in cats() {
            let gens = c.generators();
            for &s in &gens {
                for &t in &gens {
                    let a = c.hom(s, t);
                    let b = c.oracle_hom(s, t);
                    assert!(a.same_spaces(&b), "{} -> {}", c.name(s), c.name(t));
                }
            }
        }
    }

    #[test]
    fn pp_composition_sign() {
        let c = CatA::new(examples::dual_numbers(1, false), 7);
        let g = Gen::P(0, 0);
        let basis: Vec<Vec<Q>> = (0..2).map(|i| c.alg.basis_vec(i)).collect();
        for u1 in &basis {
            for v1 in &basis {
                for u2 in &basis {
                    for v2 in &basis {
                        let f1 = c.pp_map(g, g, u1, v1);
                        let f2 = c.pp_map(g, g, u2, v2);
                        let deg = |x: &[Q]| c.alg.degree_of(x).unwrap().unwrap();
                        let s = sign(deg(u1) * (deg(u2) + deg(v2)));
                        let uu = c.alg.mul(u1, u2);
                        let vv = c.alg.mul(v2, v1);
                        let expect = if is_zero_vec(&uu) || is_zero_vec(&vv) {
                            Mat::zeros(f1.rows, f1.cols)
                        } else {
                            c.pp_map(g, g, &uu, &vv).scale(&s)
                        };
                        assert_eq!(f2.mul(&f1), expect);
                    }
                }
            }
        }
    }

    #[test]
    fn expansions_intertwine_differentials() {
        for c in cats() {
            let gens = c.generators();
            for &f in &gens {
                for &g in &gens {
                    if !c.composable(f, g) {
                        assert!(c.expansion(f, g).is_err());
                        continue;
                    }
                    let x = c.expansion(f, g).unwrap();
                    let dc = x.model.diff_matrix(&c.alg);
                    for (j, cj) in x.copies.iter().enumerate() {
                        for i in 0..x.copies.len() {
                            let block = x.component(&dc, &x, i, j);
                            let mut expect = if i == j {
                                c.diff_of(cj.gen).scale(&sign(cj.shift))
                            } else {
                                Mat::zeros(block.rows, block.cols)
                            };
                            for (from, to, k) in &x.connections {
                                if *from == j && *to == i {
                                    expect = expect.add(&Mat::identity(block.cols).scale(k));
                                }
                            }
                            assert_eq!(block, expect, "{} o {}", c.name(f), c.name(g));
                        }
                    }
                }
            }
        }
    }

    #[test]
    fn acyclic_middle_gives_pair() {
        let c = CatA::new(examples::dual_numbers(-1, true), 1);
        let x = c.expansion(Gen::P(0, 0), Gen::P(0, 0)).unwrap();
        assert_eq!(x.copies.len(), 2);
        assert_eq!(x.connections, vec![(1, 0, q(1))]);
        assert_eq!((x.copies[0].shift, x.copies[1].shift), (0, 1));
    }

    #[test]
    fn whiskering_is_functorial() {
        for c in cats() {
            let gens = c.generators();
            for &f in &gens {
                let h = c.hom(f, f);
                for &g in &gens {
                    if !c.composable(f, g) {
                        continue;
                    }
                    for k1 in h.degrees() {
                        for k2 in h.degrees() {
                            for a in h.basis_maps(k1) {
                                for b in h.basis_maps(k2) {
                                    let lhs = c.whisker_left_matrix(&b.mul(a), f, f, g);
                                    let rhs = c.whisker_left_matrix(b, f, f, g).mul(&c.whisker_left_matrix(a, f, f, g));
                                    assert_eq!(lhs, rhs);
                                }
                            }
                        }
                    }
                }
            }
        }
    }

    #[test]
    fn identity_hom_is_graded_centre() {
        let c = CatA::new(examples::dual_numbers(0, false), 1);
        assert_eq!(c.hom(Gen::Id(0), Gen::Id(0)).total_dim(), 2);
        let c = CatA::new(examples::matrix2(), 1);
        assert_eq!(c.hom(Gen::Id(0), Gen::Id(0)).total_dim(), 1);
        assert_eq!(c.reps(), vec![0]);
    }

    #[test]
    fn parse_names() {
        let c = CatA::new(examples::a2(), 1);
        assert_eq!(c.parse_gen("P:e1,e2").unwrap(), Gen::P(0, 1));
        assert_eq!(c.parse_gen("Id:1").unwrap(), Gen::Id(0));
        assert!(c.parse_gen("Id:9").is_err());
        assert_eq!(c.name(Gen::P(0, 1)), "P:e1,e2");
    }
}
