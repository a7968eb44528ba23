//! One-sided twisted complexes over generator 1-morphisms.
//!
//! A twisted complex is realised concretely as the direct sum of its entry
//! models with differential `diag((-1)^{t_m} d) + alpha`; Maurer-Cartan is
//! the statement that this matrix squares to zero.

use crate::bimodule::{CatA, Gen, HomElem, HomSpace};
use crate::graded::{Complex, GradedMap, GradedVectorSpace};
use crate::linalg::{sign, zero_vec, Mat, Subspace, Q};
use num_traits::{One, Zero};
use rand::Rng;
use std::collections::BTreeMap;
use std::sync::Arc;
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum TwistedError {
    #[error("alpha entry ({0},{1}) is not strictly upper triangular")]
    NotUpperTriangular(usize, usize),
    #[error("alpha entry ({0},{1}) has underlying degree {2}, expected {3}")]
    AlphaDegree(usize, usize, i64, i64),
    #[error("entries do not share source and target objects")]
    ObjectMismatch,
    #[error("Maurer-Cartan fails at entry ({0},{1})")]
    MaurerCartan(usize, usize),
    #[error("morphism is not a cycle of degree 0")]
    NotDg,
    #[error("twisted complexes are not composable")]
    NotComposable,
    #[error("entry index out of range")]
    BadIndex,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Entry {
    pub gen: Gen,
    pub shift: i64,
    /// Provenance from horizontal composition: entry positions in the
    /// factors and junction copy labels. Empty for atomic entries.
    pub pos: Vec<usize>,
    pub label: Vec<Option<usize>>,
    /// Part of `shift` contributed by junctions of horizontal composition.
    pub junction_shift: i64,
}

#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct TwistedComplex {
    pub entries: Vec<Entry>,
    /// `(k, l) -> alpha_{k,l} : X_l -> X_k`, `k < l`, underlying degree `1 - t_l + t_k`.
    pub alpha: BTreeMap<(usize, usize), HomElem>,
}

/// The realised bimodule of a twisted complex.
#[derive(Clone, Debug)]
pub struct Realized {
    pub offsets: Vec<usize>,
    pub dims: Vec<usize>,
    pub d: Mat,
    /// Total degree of each basis vector.
    pub degrees: Vec<i64>,
}

impl Realized {
    pub fn dim(&self) -> usize {
        self.dims.iter().sum()
    }

    pub fn block(&self, m: &Mat, row_entry: usize, col_entry: usize, other: &Realized) -> Mat {
        let (r0, c0) = (self.offsets[row_entry], other.offsets[col_entry]);
        let mut out = Mat::zeros(self.dims[row_entry], other.dims[col_entry]);
        for r in 0..out.rows {
            for c in 0..out.cols {
                out[(r, c)] = m[(r0 + r, c0 + c)].clone();
            }
        }
        out
    }
}

fn put_block(m: &mut Mat, r0: usize, c0: usize, b: &Mat) {
    for r in 0..b.rows {
        for c in 0..b.cols {
            if !b[(r, c)].is_zero() {
                m[(r0 + r, c0 + c)] += &b[(r, c)];
            }
        }
    }
}

impl TwistedComplex {
    pub fn zero() -> TwistedComplex {
        TwistedComplex::default()
    }

    pub fn single(gen: Gen, shift: i64) -> TwistedComplex {
        TwistedComplex { entries: vec![Entry { gen, shift, pos: vec![], label: vec![], junction_shift: 0 }], alpha: BTreeMap::new() }
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// Underlying degree required of `alpha_{k,l}`.
    pub fn alpha_degree(&self, k: usize, l: usize) -> i64 {
        1 - self.entries[l].shift + self.entries[k].shift
    }

    /// `(source, target)` objects, `None` when empty.
    pub fn objects(&self, cat: &CatA) -> Option<(usize, usize)> {
        self.entries.first().map(|e| cat.objects(e.gen))
    }

    pub fn realize(&self, cat: &CatA) -> Realized {
        let dims: Vec<usize> = self.entries.iter().map(|e| cat.model(e.gen).dim()).collect();
        let mut offsets = Vec::with_capacity(dims.len());
        let mut acc = 0;
        for &d in &dims {
            offsets.push(acc);
            acc += d;
        }
        let mut d = Mat::zeros(acc, acc);
        let mut degrees = Vec::with_capacity(acc);
        for (i, e) in self.entries.iter().enumerate() {
            put_block(&mut d, offsets[i], offsets[i], &cat.diff_of(e.gen).scale(&sign(e.shift)));
            degrees.extend(cat.model(e.gen).degrees.iter().map(|k| k - e.shift));
        }
        for (&(k, l), a) in &self.alpha {
            let h = cat.hom(self.entries[l].gen, self.entries[k].gen);
            put_block(&mut d, offsets[k], offsets[l], &h.matrix(a));
        }
        Realized { offsets, dims, d, degrees }
    }

    /// Upper-triangularity, degrees, objects and Maurer-Cartan; the first
    /// failure is reported.
    pub fn validate(&self, cat: &CatA) -> Result<(), TwistedError> {
        if let Some(o) = self.objects(cat) {
            if self.entries.iter().any(|e| cat.objects(e.gen) != o) {
                return Err(TwistedError::ObjectMismatch);
            }
        }
        for (&(k, l), a) in &self.alpha {
            if l >= self.len() {
                return Err(TwistedError::BadIndex);
            }
            if k >= l {
                return Err(TwistedError::NotUpperTriangular(k, l));
            }
            let want = self.alpha_degree(k, l);
            let h = cat.hom(self.entries[l].gen, self.entries[k].gen);
            if a.degree != want || a.coords.len() != h.dim(a.degree) {
                return Err(TwistedError::AlphaDegree(k, l, a.degree, want));
            }
        }
        let r = self.realize(cat);
        let sq = r.d.mul(&r.d);
        if sq.is_zero() {
            return Ok(());
        }
        for k in 0..self.len() {
            for l in 0..self.len() {
                if !r.block(&sq, k, l, &r).is_zero() {
                    return Err(TwistedError::MaurerCartan(k, l));
                }
            }
        }
        unreachable!()
    }

    pub fn is_valid(&self, cat: &CatA) -> bool {
        self.validate(cat).is_ok()
    }

    /// `X<t>`: shifts increase by `t`, alpha scales by `(-1)^t`.
    pub fn shift(&self, t: i64) -> TwistedComplex {
        let s = sign(t);
        TwistedComplex {
            entries: self.entries.iter().map(|e| Entry { shift: e.shift + t, ..e.clone() }).collect(),
            alpha: self
                .alpha
                .iter()
                .map(|(&k, a)| (k, HomElem { degree: a.degree, coords: a.coords.iter().map(|c| c * &s).collect() }))
                .collect(),
        }
    }

    fn atomic(&self) -> TwistedComplex {
        let mut out = self.clone();
        for e in &mut out.entries {
            e.pos.clear();
            e.label.clear();
        }
        out
    }

    pub fn direct_sum(&self, other: &TwistedComplex) -> TwistedComplex {
        let n = self.len();
        let mut out = self.atomic();
        out.entries.extend(other.atomic().entries);
        for (&(k, l), a) in &other.alpha {
            out.alpha.insert((k + n, l + n), a.clone());
        }
        out
    }

    /// Drop entries with zero model and re-sort by provenance when
    /// that keeps alpha upper triangular.
    pub fn normalize(&self, cat: &CatA) -> TwistedComplex {
        let keep: Vec<usize> = (0..self.len()).filter(|&i| cat.model(self.entries[i].gen).dim() > 0).collect();
        let mut order = keep.clone();
        let key = |i: usize| (&self.entries[i].pos, &self.entries[i].label);
        order.sort_by(|&a, &b| key(a).cmp(&key(b)));
        let pos = |ord: &[usize]| {
            let mut p = vec![usize::MAX; self.len()];
            for (i, &j) in ord.iter().enumerate() {
                p[j] = i;
            }
            p
        };
        let mut p = pos(&order);
        let nonzero: Vec<(&(usize, usize), &HomElem)> =
            self.alpha.iter().filter(|(_, a)| a.coords.iter().any(|c| !c.is_zero())).collect();
        if nonzero.iter().any(|(&(k, l), _)| p[k] >= p[l]) {
            p = pos(&keep);
        }
        let mut entries = vec![None; keep.len()];
        for &i in &keep {
            entries[p[i]] = Some(self.entries[i].clone());
        }
        let alpha = nonzero
            .into_iter()
            .filter(|(&(k, l), _)| p[k] != usize::MAX && p[l] != usize::MAX)
            .map(|(&(k, l), a)| ((p[k], p[l]), a.clone()))
            .collect();
        TwistedComplex { entries: entries.into_iter().map(Option::unwrap).collect(), alpha }
    }

    /// Data equality ignoring labels.
    pub fn same_data(&self, other: &TwistedComplex) -> bool {
        self.len() == other.len()
            && self.entries.iter().zip(&other.entries).all(|(a, b)| a.gen == b.gen && a.shift == b.shift)
            && self.alpha == other.alpha
    }
}

/// A morphism of twisted complexes: a matrix of generator Hom elements.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TcMorphism {
    pub degree: i64,
    /// `(n, m) -> gamma_{n,m} : X_m -> Y_n`.
    pub gamma: BTreeMap<(usize, usize), HomElem>,
}

/// Graded Hom complex between two twisted complexes.
#[derive(Clone, Debug)]
pub struct TcHom {
    pub x: TwistedComplex,
    pub y: TwistedComplex,
    pub rx: Realized,
    pub ry: Realized,
    pub complex: Complex,
    homs: Vec<Vec<Arc<HomSpace>>>,
    /// Per total degree: `(n, m, underlying degree, basis index)`.
    basis: BTreeMap<i64, Vec<(usize, usize, i64, usize)>>,
}

impl TcHom {
    pub fn new(cat: &CatA, x: &TwistedComplex, y: &TwistedComplex) -> TcHom {
        let rx = x.realize(cat);
        let ry = y.realize(cat);
        let homs: Vec<Vec<Arc<HomSpace>>> =
            y.entries.iter().map(|yn| x.entries.iter().map(|xm| cat.hom(xm.gen, yn.gen)).collect()).collect();
        let mut basis: BTreeMap<i64, Vec<(usize, usize, i64, usize)>> = BTreeMap::new();
        for (n, yn) in y.entries.iter().enumerate() {
            for (m, xm) in x.entries.iter().enumerate() {
                let h = &homs[n][m];
                for k in h.degrees() {
                    let total = k + xm.shift - yn.shift;
                    for i in 0..h.dim(k) {
                        basis.entry(total).or_default().push((n, m, k, i));
                    }
                }
            }
        }
        let dims: BTreeMap<i64, usize> = basis.iter().map(|(&k, v)| (k, v.len())).collect();
        let space = GradedVectorSpace::new(dims);
        let mut out = TcHom { x: x.clone(), y: y.clone(), rx, ry, complex: Complex::zero_differential(space.clone()), homs, basis };
        let mut blocks = BTreeMap::new();
        for (&total, list) in &out.basis {
            let mut cols = Vec::with_capacity(list.len());
            for i in 0..list.len() {
                let mut e = zero_vec(list.len());
                e[i] = Q::one();
                let g = out.matrix(total, &e);
                let dg = out.ry.d.mul(&g).sub(&g.mul(&out.rx.d).scale(&sign(total)));
                cols.push(out.coords(total + 1, &dg).expect("tc Hom not closed under the differential"));
            }
            blocks.insert(total, Mat::from_cols(&cols, space.dim(total + 1)));
        }
        let d = GradedMap::new(&space, &space, 1, blocks).expect("tc Hom shapes");
        out.complex = Complex::new(space, d).expect("tc Hom differential squares to zero");
        out
    }

    pub fn dim(&self, k: i64) -> usize {
        self.basis.get(&k).map_or(0, Vec::len)
    }

    pub fn degrees(&self) -> Vec<i64> {
        self.basis.keys().copied().collect()
    }

    /// Realised matrix of the element with coordinates `c` in total degree `k`.
    pub fn matrix(&self, k: i64, c: &[Q]) -> Mat {
        let mut out = Mat::zeros(self.ry.dim(), self.rx.dim());
        let Some(list) = self.basis.get(&k) else { return out };
        for (coef, &(n, m, kk, i)) in c.iter().zip(list) {
            if coef.is_zero() {
                continue;
            }
            let b = &self.homs[n][m].basis_maps(kk)[i];
            put_block(&mut out, self.ry.offsets[n], self.rx.offsets[m], &b.scale(coef));
        }
        out
    }

    /// Coordinates of a realised matrix in total degree `k`.
    pub fn coords(&self, k: i64, g: &Mat) -> Option<Vec<Q>> {
        let list = self.basis.get(&k);
        let mut out = zero_vec(list.map_or(0, Vec::len));
        for n in 0..self.y.len() {
            for m in 0..self.x.len() {
                let b = self.ry.block(g, n, m, &self.rx);
                if b.is_zero() {
                    continue;
                }
                let kk = k - self.x.entries[m].shift + self.y.entries[n].shift;
                let c = self.homs[n][m].coords(kk, &b)?;
                let list = list?;
                let mut j = 0;
                for (pos, &(nn, mm, k2, _)) in list.iter().enumerate() {
                    if nn == n && mm == m && k2 == kk {
                        out[pos] = c[j].clone();
                        j += 1;
                    }
                }
            }
        }
        Some(out)
    }

    pub fn morphism(&self, k: i64, c: &[Q]) -> TcMorphism {
        let mut gamma: BTreeMap<(usize, usize), HomElem> = BTreeMap::new();
        if let Some(list) = self.basis.get(&k) {
            for (coef, &(n, m, kk, i)) in c.iter().zip(list) {
                let h = &self.homs[n][m];
                let e = gamma.entry((n, m)).or_insert_with(|| HomElem { degree: kk, coords: zero_vec(h.dim(kk)) });
                e.coords[i] += coef;
            }
        }
        TcMorphism { degree: k, gamma }
    }

    pub fn morphism_coords(&self, f: &TcMorphism) -> Vec<Q> {
        let list = self.basis.get(&f.degree).cloned().unwrap_or_default();
        list.iter()
            .map(|&(n, m, _, i)| f.gamma.get(&(n, m)).map_or_else(Q::zero, |e| e.coords[i].clone()))
            .collect()
    }

    pub fn morphism_matrix(&self, f: &TcMorphism) -> Mat {
        self.matrix(f.degree, &self.morphism_coords(f))
    }

    pub fn cycles(&self, k: i64) -> Vec<Vec<Q>> {
        self.complex.diff(k).kernel()
    }

    pub fn boundaries(&self, k: i64) -> Subspace {
        let d = self.complex.diff(k - 1);
        let cols: Vec<Vec<Q>> = (0..d.cols).map(|j| d.col(j)).collect();
        Subspace::span(self.dim(k), &cols)
    }

    pub fn identity_coords(&self) -> Option<Vec<Q>> {
        self.coords(0, &Mat::identity(self.rx.dim()))
    }
}

pub fn tc_hom(cat: &CatA, x: &TwistedComplex, y: &TwistedComplex) -> TcHom {
    TcHom::new(cat, x, y)
}

/// `C_f = (Y (+) X<1>, [[beta, -f], [0, alpha_{X<1>}]])` for a dg morphism `f : X -> Y`.
pub fn cone(cat: &CatA, x: &TwistedComplex, y: &TwistedComplex, f: &TcMorphism) -> Result<TwistedComplex, TwistedError> {
    let h = tc_hom(cat, x, y);
    let c = h.morphism_coords(f);
    if f.degree != 0 || (h.dim(1) > 0 && !h.complex.diff(0).apply(&c).iter().all(Zero::is_zero)) {
        return Err(TwistedError::NotDg);
    }
    let mut out = y.direct_sum(&x.shift(1));
    let ny = y.len();
    for (&(n, m), g) in &f.gamma {
        if g.coords.iter().all(Zero::is_zero) {
            continue;
        }
        let neg = HomElem { degree: g.degree, coords: g.coords.iter().map(|v| -v).collect() };
        out.alpha.insert((n, ny + m), neg);
    }
    debug_assert!(out.is_valid(cat));
    Ok(out)
}

/// Canonical maps of a cone: `Y -> C_f`, `C_f -> X<1>`, and the degree -1
/// homotopy `h : X -> C_f` with `d(h) = -(inclusion o f)`.
pub fn cone_maps(cat: &CatA, x: &TwistedComplex, y: &TwistedComplex, c: &TwistedComplex) -> (Mat, Mat, Mat) {
    let rc = c.realize(cat);
    let (dy, dx) = (y.realize(cat).dim(), x.realize(cat).dim());
    let mut incl = Mat::zeros(rc.dim(), dy);
    let mut proj = Mat::zeros(dx, rc.dim());
    let mut h = Mat::zeros(rc.dim(), dx);
    for i in 0..dy {
        incl[(i, i)] = Q::one();
    }
    for i in 0..dx {
        proj[(i, dy + i)] = Q::one();
        h[(dy + i, i)] = Q::one();
    }
    (incl, proj, h)
}

/// Strict horizontal composite `X o X'`.
pub fn tc_hcompose(cat: &CatA, x: &TwistedComplex, xp: &TwistedComplex) -> Result<TwistedComplex, TwistedError> {
    if let (Some(a), Some(b)) = (x.objects(cat), xp.objects(cat)) {
        if a.0 != b.1 {
            return Err(TwistedError::NotComposable);
        }
    }
    let mut entries = Vec::new();
    // (m, n) -> index of the first copy
    let mut first: BTreeMap<(usize, usize), usize> = BTreeMap::new();
    let mut exps = BTreeMap::new();
    for (m, fm) in x.entries.iter().enumerate() {
        for (n, fn_) in xp.entries.iter().enumerate() {
            let e = cat.expansion(fm.gen, fn_.gen).map_err(|_| TwistedError::NotComposable)?;
            first.insert((m, n), entries.len());
            for c in &e.copies {
                let mut pos = if fm.pos.is_empty() { vec![m] } else { fm.pos.clone() };
                pos.extend(if fn_.pos.is_empty() { vec![n] } else { fn_.pos.clone() });
                let mut label = fm.label.clone();
                label.push(c.label);
                label.extend(fn_.label.iter().cloned());
                entries.push(Entry {
                    gen: c.gen,
                    shift: fm.shift + fn_.shift + c.shift,
                    pos,
                    label,
                    junction_shift: fm.junction_shift + c.shift + fn_.junction_shift,
                });
            }
            exps.insert((m, n), e);
        }
    }
    let mut out = TwistedComplex { entries, alpha: BTreeMap::new() };
    let add = |out: &mut TwistedComplex, to: usize, from: usize, m: &Mat| {
        if m.is_zero() {
            return;
        }
        let k = out.alpha_degree(to, from);
        let h = cat.hom(out.entries[from].gen, out.entries[to].gen);
        let c = h.coords(k, m).expect("whiskered component is not a bimodule map of the expected degree");
        let slot = out.alpha.entry((to, from)).or_insert_with(|| HomElem { degree: k, coords: zero_vec(c.len()) });
        for (a, b) in slot.coords.iter_mut().zip(c) {
            *a += b;
        }
    };
    for (&(m, n), e) in &exps {
        let base = first[&(m, n)];
        let s = sign(x.entries[m].shift + xp.entries[n].shift);
        for (from, to, coef) in &e.connections {
            let dim = cat.model(e.copies[*from].gen).dim();
            add(&mut out, base + to, base + from, &Mat::identity(dim).scale(&(coef * &s)));
        }
    }
    // alpha o_0 id
    for (&(m, m2), a) in &x.alpha {
        let (fm, fm2) = (x.entries[m].gen, x.entries[m2].gen);
        let phi = cat.hom(fm2, fm).matrix(a);
        for (n, fn_) in xp.entries.iter().enumerate() {
            let w = cat.whisker_left_matrix(&phi, fm2, fm, fn_.gen).scale(&sign(a.degree * fn_.shift));
            let (to_e, from_e) = (&exps[&(m, n)], &exps[&(m2, n)]);
            for i in 0..to_e.copies.len() {
                for j in 0..from_e.copies.len() {
                    let b = to_e.component(&w, from_e, i, j);
                    add(&mut out, first[&(m, n)] + i, first[&(m2, n)] + j, &b);
                }
            }
        }
    }
    // id o_0 alpha'
    for (&(n, n2), a) in &xp.alpha {
        let (gn, gn2) = (xp.entries[n].gen, xp.entries[n2].gen);
        let psi = cat.hom(gn2, gn).matrix(a);
        for (m, fm) in x.entries.iter().enumerate() {
            let w = cat.whisker_right_matrix(fm.gen, &psi, a.degree, gn2, gn).scale(&sign(fm.shift));
            let (to_e, from_e) = (&exps[&(m, n)], &exps[&(m, n2)]);
            for i in 0..to_e.copies.len() {
                for j in 0..from_e.copies.len() {
                    let b = to_e.component(&w, from_e, i, j);
                    add(&mut out, first[&(m, n)] + i, first[&(m, n2)] + j, &b);
                }
            }
        }
    }
    // canonical symbol order: generator shifts, then junction shifts, each left to right
    let mut eps = Vec::with_capacity(out.len());
    for (&(m, n), e) in &exps {
        let (jo, ji) = (x.entries[m].junction_shift, xp.entries[n].junction_shift);
        let gi = xp.entries[n].shift - ji;
        for c in &e.copies {
            eps.push(sign(c.shift * ji + gi * jo));
        }
    }
    for (&(k, l), a) in out.alpha.iter_mut() {
        let s = &eps[k] * &eps[l];
        for c in a.coords.iter_mut() {
            *c *= &s;
        }
    }
    out.alpha.retain(|_, a| a.coords.iter().any(|c| !c.is_zero()));
    if let Err(e) = out.validate(cat) {
        panic!("horizontal composite violates Maurer-Cartan: {e}");
    }
    Ok(out)
}

/// Horizontal composite of two generators as a twisted complex.
pub fn hcompose(cat: &CatA, f: Gen, g: Gen) -> Result<TwistedComplex, TwistedError> {
    tc_hcompose(cat, &TwistedComplex::single(f, 0), &TwistedComplex::single(g, 0))
}

/// An object `X_e` of the dg idempotent completion.
#[derive(Clone, Debug)]
pub struct IdempotentObject {
    pub host: TwistedComplex,
    pub e: TcMorphism,
}

#[derive(Clone, Debug)]
pub enum Summand {
    /// `e = 0`.
    Zero,
    /// `e = id`.
    Whole(TwistedComplex),
    /// `X = Z (+) Z'` inside twisted complexes with `iota p = e`, `p iota = id_Z`.
    Internal { summand: TwistedComplex, complement: TwistedComplex, p: Mat, iota: Mat },
    /// No internal splitting found; the formal object with compressed Hom spaces.
    Completion(IdempotentObject),
}

impl IdempotentObject {
    pub fn new(cat: &CatA, host: TwistedComplex, e: TcMorphism) -> Result<IdempotentObject, TwistedError> {
        let h = tc_hom(cat, &host, &host);
        let c = h.morphism_coords(&e);
        let m = h.matrix(0, &c);
        let cycle = h.dim(1) == 0 || h.complex.diff(0).apply(&c).iter().all(Zero::is_zero);
        if e.degree != 0 || !cycle || m.mul(&m) != m {
            return Err(TwistedError::NotDg);
        }
        Ok(IdempotentObject { host, e })
    }
}

/// `f Hom(X, Y) e` in total degree `k`, as realised matrices.
pub fn compressed_hom(cat: &CatA, x: &IdempotentObject, y: &IdempotentObject, k: i64) -> Vec<Mat> {
    let h = tc_hom(cat, &x.host, &y.host);
    let e = tc_hom(cat, &x.host, &x.host).morphism_matrix(&x.e);
    let f = tc_hom(cat, &y.host, &y.host).morphism_matrix(&y.e);
    let imgs: Vec<Vec<Q>> = (0..h.dim(k))
        .map(|i| {
            let mut c = zero_vec(h.dim(k));
            c[i] = Q::one();
            h.coords(k, &f.mul(&h.matrix(k, &c)).mul(&e)).expect("compression stays in Hom")
        })
        .collect();
    Subspace::span(h.dim(k), &imgs).basis().iter().map(|c| h.matrix(k, c)).collect()
}

/// Sub-twisted complex on a subset of entries.
fn restrict(x: &TwistedComplex, keep: &[usize]) -> TwistedComplex {
    let mut pos = vec![usize::MAX; x.len()];
    for (i, &j) in keep.iter().enumerate() {
        pos[j] = i;
    }
    TwistedComplex {
        entries: keep.iter().map(|&i| Entry { pos: vec![], label: vec![], ..x.entries[i].clone() }).collect(),
        alpha: x
            .alpha
            .iter()
            .filter(|(&(k, l), _)| pos[k] != usize::MAX && pos[l] != usize::MAX)
            .map(|(&(k, l), a)| ((pos[k], pos[l]), a.clone()))
            .collect(),
    }
}

const SPLIT_MAX_ENTRIES: usize = 12;
const SPLIT_TRIES: usize = 8;

/// Try to realise the image of `e` as a sub-twisted complex `Z` with dg maps
/// `p : X -> Z`, `iota : Z -> X`, `p iota = id`, `iota p = e`.
fn find_split(cat: &CatA, x: &TwistedComplex, e: &Mat, rng: &mut impl Rng) -> Option<(TwistedComplex, Mat, Mat)> {
    let rank = e.rank();
    let rx = x.realize(cat);
    let n = x.len();
    if n > SPLIT_MAX_ENTRIES {
        return None;
    }
    for mask in 1u32..(1 << n) {
        let keep: Vec<usize> = (0..n).filter(|i| mask & (1 << i) != 0).collect();
        if keep.iter().map(|&i| rx.dims[i]).sum::<usize>() != rank {
            continue;
        }
        let z = restrict(x, &keep);
        if !z.is_valid(cat) {
            continue;
        }
        // dg maps iota with e iota = iota, and p with p e = p
        let hzx = tc_hom(cat, &z, x);
        let hxz = tc_hom(cat, x, &z);
        let iotas: Vec<Mat> = hzx
            .cycles(0)
            .iter()
            .map(|c| hzx.matrix(0, c))
            .map(|m| e.mul(&m))
            .collect();
        let ps: Vec<Mat> = hxz.cycles(0).iter().map(|c| hxz.matrix(0, c)).map(|m| m.mul(e)).collect();
        if iotas.is_empty() || ps.is_empty() {
            continue;
        }
        for _ in 0..SPLIT_TRIES {
            let combo = |ms: &[Mat], rng: &mut dyn rand::RngCore| {
                let mut acc = Mat::zeros(ms[0].rows, ms[0].cols);
                for m in ms {
                    let c: i64 = rng.gen_range(-3..=3);
                    acc = acc.add(&m.scale(&Q::from_integer(c.into())));
                }
                acc
            };
            let iota = combo(&iotas, rng);
            let p = combo(&ps, rng);
            if let Some(inv) = p.mul(&iota).inverse() {
                let p = inv.mul(&p);
                if iota.mul(&p) == *e {
                    return Some((z, p, iota));
                }
            }
        }
    }
    None
}

pub fn split_idempotent(cat: &CatA, obj: &IdempotentObject) -> Summand {
    use rand::SeedableRng;
    let h = tc_hom(cat, &obj.host, &obj.host);
    let e = h.morphism_matrix(&obj.e);
    let n = e.rows;
    if e.is_zero() {
        return Summand::Zero;
    }
    if e == Mat::identity(n) {
        return Summand::Whole(obj.host.clone());
    }
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(cat.seed);
    let comp = Mat::identity(n).sub(&e);
    if let (Some((z, p, iota)), Some((zc, _, _))) =
        (find_split(cat, &obj.host, &e, &mut rng), find_split(cat, &obj.host, &comp, &mut rng))
    {
        return Summand::Internal { summand: z, complement: zc, p, iota };
    }
    Summand::Completion(obj.clone())
}

/// A random valid twisted complex built from generators by direct sums,
/// cones of random dg morphisms and horizontal composition.
pub fn random_tc(cat: &CatA, rng: &mut impl Rng, steps: usize, max_entries: usize) -> TwistedComplex {
    let gens: Vec<Gen> = cat.generators();
    let pick = |rng: &mut dyn rand::RngCore, obj: Option<(usize, usize)>| -> Option<Gen> {
        let c: Vec<Gen> = gens.iter().copied().filter(|g| obj.is_none_or(|o| cat.objects(*g) == o)).collect();
        if c.is_empty() {
            None
        } else {
            Some(c[rng.gen_range(0..c.len())])
        }
    };
    let g0 = pick(rng, None).expect("at least one generator");
    let mut x = TwistedComplex::single(g0, rng.gen_range(-1..=1));
    let obj = cat.objects(g0);
    for _ in 0..steps {
        if x.len() >= max_entries {
            break;
        }
        let Some(g) = pick(rng, Some(obj)) else { break };
        let y = TwistedComplex::single(g, rng.gen_range(-1..=1));
        match rng.gen_range(0..3) {
            0 => x = x.direct_sum(&y),
            1 => {
                let (src, tgt) = if rng.gen_bool(0.5) { (x.clone(), y) } else { (y, x.clone()) };
                let h = tc_hom(cat, &src, &tgt);
                let cyc = h.cycles(0);
                let mut c = zero_vec(h.dim(0));
                for v in &cyc {
                    let k: i64 = rng.gen_range(-2..=2);
                    for (a, b) in c.iter_mut().zip(v) {
                        *a += b * Q::from_integer(k.into());
                    }
                }
                let f = h.morphism(0, &c);
                x = cone(cat, &src, &tgt, &f).expect("random cycle is dg");
            }
            _ => {
                if obj.0 == obj.1 {
                    let nx = if rng.gen_bool(0.5) { tc_hcompose(cat, &x, &y) } else { tc_hcompose(cat, &y, &x) };
                    if let Ok(nx) = nx {
                        if nx.len() <= max_entries && !nx.is_empty() {
                            x = nx;
                        }
                    }
                }
            }
        }
    }
    x
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::examples;
    use crate::graded::cohomology_all;
    use rand::SeedableRng;

    fn lambda0() -> CatA {
        CatA::new(examples::dual_numbers(0, false), 3)
    }

    #[test]
    fn single_entry_valid_and_hom_reduces() {
        let c = lambda0();
        let x = TwistedComplex::single(Gen::P(0, 0), 0);
        assert!(x.is_valid(&c));
        let h = tc_hom(&c, &x, &x);
        assert_eq!(h.dim(0), c.hom(Gen::P(0, 0), Gen::P(0, 0)).dim(0));
    }

    #[test]
    fn cone_of_identity_is_contractible() {
        for (_, a) in examples::all() {
            let c = CatA::new(a, 1);
            for g in c.generators() {
                let x = TwistedComplex::single(g, 0);
                let h = tc_hom(&c, &x, &x);
                let id = h.morphism(0, &h.identity_coords().unwrap());
                let cn = cone(&c, &x, &x, &id).unwrap();
                assert!(cn.is_valid(&c));
                let e = tc_hom(&c, &cn, &cn);
                assert!(cohomology_all(&e.complex).values().all(|&d| d == 0));
            }
        }
    }

    #[test]
    fn invalid_alpha_detected() {
        let c = lambda0();
        // x-multiplication twice in a row: alpha o alpha != 0
        let g = Gen::P(0, 0);
        let h = c.hom(g, g);
        let x = c.alg.basis_vec(1);
        let one = c.alg.basis_vec(0);
        let xm = h.elem(0, &c.pp_map(g, g, &x, &one)).unwrap();
        let mut t = TwistedComplex::single(g, 0).direct_sum(&TwistedComplex::single(g, 1)).direct_sum(&TwistedComplex::single(g, 2));
        t.alpha.insert((0, 1), xm.clone());
        t.alpha.insert((1, 2), HomElem { degree: 0, coords: xm.coords.iter().map(|v| -v).collect() });
        assert!(t.is_valid(&c));
        let idm = c.identity_elem(g);
        t.alpha.insert((1, 2), idm);
        assert_eq!(t.validate(&c), Err(TwistedError::MaurerCartan(0, 2)));
        t.alpha.insert((2, 1), xm);
        assert_eq!(t.validate(&c), Err(TwistedError::NotUpperTriangular(2, 1)));
    }

    #[test]
    fn shift_reindexes_hom() {
        let c = lambda0();
        let x = TwistedComplex::single(Gen::P(0, 0), 0);
        let a = tc_hom(&c, &x, &x.shift(1));
        let b = tc_hom(&c, &x.shift(-1), &x);
        assert_eq!(a.complex.space.dims(), b.complex.space.dims());
    }

    #[test]
    fn cone_triangle() {
        let c = lambda0();
        let g = Gen::P(0, 0);
        let x = TwistedComplex::single(g, 0);
        let h = c.hom(g, g);
        let xm = h.elem(0, &c.pp_map(g, g, &c.alg.basis_vec(1), &c.alg.basis_vec(0))).unwrap();
        let f = TcMorphism { degree: 0, gamma: [((0, 0), xm)].into_iter().collect() };
        let cn = cone(&c, &x, &x, &f).unwrap();
        let (incl, proj, hmt) = cone_maps(&c, &x, &x, &cn);
        let hyc = tc_hom(&c, &x, &cn);
        let hcx = tc_hom(&c, &cn, &x.shift(1));
        let ci = hyc.coords(0, &incl).unwrap();
        assert!(hyc.complex.diff(0).apply(&ci).iter().all(Zero::is_zero));
        let cp = hcx.coords(0, &proj).unwrap();
        assert!(hcx.complex.diff(0).apply(&cp).iter().all(Zero::is_zero));
        let fm = tc_hom(&c, &x, &x).morphism_matrix(&f);
        let comp = hyc.coords(0, &incl.mul(&fm)).unwrap();
        assert!(hyc.boundaries(0).contains(&comp));
        let hc = hyc.coords(-1, &hmt).unwrap();
        let dh = hyc.complex.diff(-1).apply(&hc);
        assert_eq!(dh, comp.iter().map(|v| -v).collect::<Vec<_>>());
    }

    #[test]
    fn cone_of_zero_is_direct_sum() {
        let c = lambda0();
        let x = TwistedComplex::single(Gen::P(0, 0), 0);
        let f = TcMorphism { degree: 0, gamma: BTreeMap::new() };
        assert!(cone(&c, &x, &x, &f).unwrap().same_data(&x.direct_sum(&x.shift(1))));
    }

    #[test]
    fn unit_and_one_entry_composition() {
        for (_, a) in examples::all() {
            let c = CatA::new(a, 1);
            for g in c.generators() {
                let x = TwistedComplex::single(g, 0);
                let (s, t) = c.objects(g);
                let l = tc_hcompose(&c, &TwistedComplex::single(Gen::Id(t), 0), &x).unwrap();
                let r = tc_hcompose(&c, &x, &TwistedComplex::single(Gen::Id(s), 0)).unwrap();
                assert!(l.same_data(&x) && r.same_data(&x));
            }
        }
    }

    #[test]
    fn examples_of_composites() {
        let c = lambda0();
        let x = hcompose(&c, Gen::P(0, 0), Gen::P(0, 0)).unwrap();
        assert_eq!(x.len(), 2);
        assert!(x.alpha.is_empty());
        let c = CatA::new(examples::dual_numbers(-1, true), 1);
        let x = hcompose(&c, Gen::P(0, 0), Gen::P(0, 0)).unwrap();
        assert_eq!(x.len(), 2);
        assert_eq!(x.alpha.len(), 1);
    }

    fn assoc_sides(c: &CatA, x: &TwistedComplex, y: &TwistedComplex, z: &TwistedComplex) -> (TwistedComplex, TwistedComplex) {
        let l = tc_hcompose(c, &tc_hcompose(c, x, y).unwrap(), z).unwrap().normalize(c);
        let r = tc_hcompose(c, x, &tc_hcompose(c, y, z).unwrap()).unwrap().normalize(c);
        (l, r)
    }

    fn assert_assoc(c: &CatA, x: &TwistedComplex, y: &TwistedComplex, z: &TwistedComplex) {
        let (l, r) = assoc_sides(c, x, y, z);
        assert!(l.same_data(&r), "{l:?} vs {r:?}");
    }

    #[test]
    fn associativity_on_random_complexes() {
        for a in [examples::a2(), examples::dual_numbers(-1, true), examples::dual_numbers(1, false)] {
            let c = CatA::new(a, 5);
            let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(3);
            for _ in 0..6 {
                let x = random_tc(&c, &mut rng, 2, 3);
                let y = random_tc(&c, &mut rng, 2, 3);
                let z = random_tc(&c, &mut rng, 2, 3);
                assert_assoc(&c, &x, &y, &z);
            }
        }
    }

    #[test]
    fn associativity_on_generator_triples() {
        let mut cs: Vec<CatA> = examples::all().into_iter().map(|(_, a)| CatA::new(a, 1)).collect();
        cs.push(CatA::new(examples::dual_numbers(1, false), 1));
        for c in cs {
            let gens = c.generators();
            for &f in &gens {
                for &g in &gens {
                    for &h in &gens {
                        if !c.composable(f, g) || !c.composable(g, h) {
                            continue;
                        }
                        for (a, b, d) in [(0, 0, 0), (1, 0, 1), (1, 1, 1), (-1, 1, 0)] {
                            let (xf, xg, xh) =
                                (TwistedComplex::single(f, a), TwistedComplex::single(g, b), TwistedComplex::single(h, d));
                            assert_assoc(&c, &xf, &xg, &xh);
                        }
                    }
                }
            }
        }
    }

    #[test]
    fn random_composites_satisfy_mc() {
        for a in [examples::a2(), examples::dual_numbers(0, false), examples::dual_numbers(-1, true)] {
            let c = CatA::new(a, 5);
            let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(11);
            for _ in 0..20 {
                let x = random_tc(&c, &mut rng, 3, 4);
                let y = random_tc(&c, &mut rng, 3, 4);
                assert!(x.is_valid(&c) && y.is_valid(&c));
                if x.objects(&c).unwrap().0 == y.objects(&c).unwrap().1 {
                    assert!(tc_hcompose(&c, &x, &y).unwrap().is_valid(&c));
                }
            }
        }
    }

    #[test]
    fn split_diagonal_idempotent() {
        let c = lambda0();
        let g = Gen::P(0, 0);
        let x = TwistedComplex::single(g, 0).direct_sum(&TwistedComplex::single(g, 0));
        let h = tc_hom(&c, &x, &x);
        let n = c.model(g).dim();
        let mut m = Mat::zeros(2 * n, 2 * n);
        for i in 0..n {
            m[(i, i)] = Q::one();
        }
        let e = h.morphism(0, &h.coords(0, &m).unwrap());
        let obj = IdempotentObject::new(&c, x.clone(), e).unwrap();
        match split_idempotent(&c, &obj) {
            Summand::Internal { summand, .. } => assert!(summand.same_data(&TwistedComplex::single(g, 0))),
            other => panic!("{other:?}"),
        }
        let id = h.morphism(0, &h.identity_coords().unwrap());
        assert!(matches!(split_idempotent(&c, &IdempotentObject::new(&c, x.clone(), id).unwrap()), Summand::Whole(_)));
        let z = h.morphism(0, &zero_vec(h.dim(0)));
        assert!(matches!(split_idempotent(&c, &IdempotentObject::new(&c, x.clone(), z).unwrap()), Summand::Zero));
        let obj = IdempotentObject::new(&c, x.clone(), h.morphism(0, &h.coords(0, &m).unwrap())).unwrap();
        let hs = compressed_hom(&c, &obj, &obj, 0);
        assert_eq!(hs.len(), c.hom(g, g).dim(0));
    }
}
