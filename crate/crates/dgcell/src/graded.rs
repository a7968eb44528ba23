//! Graded vector spaces, homogeneous maps and complexes over the rationals.

use crate::linalg::{independent_subset, sign, Mat, Subspace, Q};
use serde::Serialize;
use std::collections::BTreeMap;
use thiserror::Error;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum GradedError {
    #[error("block in degree {degree} has shape {got:?}, expected {expected:?}")]
    Shape { degree: i64, got: (usize, usize), expected: (usize, usize) },
    #[error("differential must have degree 1, got {0}")]
    DifferentialDegree(i64),
    #[error("map degree mismatch: {0}")]
    Degree(String),
}

#[derive(Clone, Debug, PartialEq, Eq, Default, Serialize)]
pub struct GradedVectorSpace {
    dims: BTreeMap<i64, usize>,
    labels: BTreeMap<i64, Vec<String>>,
}

impl GradedVectorSpace {
    pub fn new(dims: BTreeMap<i64, usize>) -> Self {
        let dims: BTreeMap<i64, usize> = dims.into_iter().filter(|(_, d)| *d > 0).collect();
        let labels = dims
            .iter()
            .map(|(&k, &d)| (k, (0..d).map(|i| format!("v{k}_{i}")).collect()))
            .collect();
        GradedVectorSpace { dims, labels }
    }

    pub fn with_labels(labels: BTreeMap<i64, Vec<String>>) -> Self {
        let labels: BTreeMap<i64, Vec<String>> = labels.into_iter().filter(|(_, l)| !l.is_empty()).collect();
        let dims = labels.iter().map(|(&k, l)| (k, l.len())).collect();
        GradedVectorSpace { dims, labels }
    }

    pub fn dim(&self, k: i64) -> usize {
        self.dims.get(&k).copied().unwrap_or(0)
    }

    pub fn total_dim(&self) -> usize {
        self.dims.values().sum()
    }

    pub fn degrees(&self) -> impl Iterator<Item = i64> + '_ {
        self.dims.keys().copied()
    }

    pub fn window(&self) -> Option<(i64, i64)> {
        Some((*self.dims.keys().next()?, *self.dims.keys().next_back()?))
    }

    pub fn labels(&self, k: i64) -> &[String] {
        self.labels.get(&k).map(|v| v.as_slice()).unwrap_or(&[])
    }

    pub fn dims(&self) -> &BTreeMap<i64, usize> {
        &self.dims
    }

    /// `(V<t>)^k = V^{k+t}`.
    pub fn shifted(&self, t: i64) -> Self {
        GradedVectorSpace {
            dims: self.dims.iter().map(|(&k, &d)| (k - t, d)).collect(),
            labels: self.labels.iter().map(|(&k, l)| (k - t, l.clone())).collect(),
        }
    }
}

/// A homogeneous map of degree `degree`; block `k` sends `V^k` to `W^{k+degree}`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GradedMap {
    pub source: GradedVectorSpace,
    pub target: GradedVectorSpace,
    pub degree: i64,
    blocks: BTreeMap<i64, Mat>,
}

impl GradedMap {
    pub fn zero(source: &GradedVectorSpace, target: &GradedVectorSpace, degree: i64) -> Self {
        GradedMap { source: source.clone(), target: target.clone(), degree, blocks: BTreeMap::new() }
    }

    pub fn new(
        source: &GradedVectorSpace,
        target: &GradedVectorSpace,
        degree: i64,
        blocks: BTreeMap<i64, Mat>,
    ) -> Result<Self, GradedError> {
        for (&k, m) in &blocks {
            let expected = (target.dim(k + degree), source.dim(k));
            if (m.rows, m.cols) != expected {
                return Err(GradedError::Shape { degree: k, got: (m.rows, m.cols), expected });
            }
        }
        let blocks = blocks.into_iter().filter(|(_, m)| !m.is_zero()).collect();
        Ok(GradedMap { source: source.clone(), target: target.clone(), degree, blocks })
    }

    pub fn identity(v: &GradedVectorSpace) -> Self {
        let blocks = v.degrees().map(|k| (k, Mat::identity(v.dim(k)))).collect();
        GradedMap { source: v.clone(), target: v.clone(), degree: 0, blocks }
    }

    /// The block `V^k -> W^{k+n}`, zero if absent.
    pub fn block(&self, k: i64) -> Mat {
        self.blocks
            .get(&k)
            .cloned()
            .unwrap_or_else(|| Mat::zeros(self.target.dim(k + self.degree), self.source.dim(k)))
    }

    pub fn is_zero(&self) -> bool {
        self.blocks.values().all(|m| m.is_zero())
    }

    pub fn compose(&self, f: &GradedMap) -> Result<GradedMap, GradedError> {
        if f.target != self.source {
            return Err(GradedError::Degree("middle space mismatch".into()));
        }
        let n = f.degree + self.degree;
        let blocks = f.source.degrees().map(|k| (k, self.block(k + f.degree).mul(&f.block(k)))).collect();
        GradedMap::new(&f.source, &self.target, n, blocks)
    }

    pub fn add(&self, other: &GradedMap) -> Result<GradedMap, GradedError> {
        if self.degree != other.degree || self.source != other.source || self.target != other.target {
            return Err(GradedError::Degree("sum of maps with different shapes".into()));
        }
        let blocks = self.source.degrees().map(|k| (k, self.block(k).add(&other.block(k)))).collect();
        GradedMap::new(&self.source, &self.target, self.degree, blocks)
    }

    pub fn scale(&self, c: &Q) -> GradedMap {
        let blocks = self.blocks.iter().map(|(&k, m)| (k, m.scale(c))).collect();
        GradedMap { source: self.source.clone(), target: self.target.clone(), degree: self.degree, blocks }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Complex {
    pub space: GradedVectorSpace,
    pub d: GradedMap,
}

impl Complex {
    pub fn new(space: GradedVectorSpace, d: GradedMap) -> Result<Self, GradedError> {
        if d.degree != 1 {
            return Err(GradedError::DifferentialDegree(d.degree));
        }
        if d.source != space || d.target != space {
            return Err(GradedError::Degree("differential not an endomorphism of the space".into()));
        }
        let c = Complex { space, d };
        for k in c.space.degrees() {
            if !c.d.block(k + 1).mul(&c.d.block(k)).is_zero() {
                return Err(GradedError::Degree(format!("d^2 != 0 in degree {k}")));
            }
        }
        Ok(c)
    }

    pub fn zero_differential(space: GradedVectorSpace) -> Self {
        let d = GradedMap::zero(&space, &space, 1);
        Complex { space, d }
    }

    pub fn diff(&self, k: i64) -> Mat {
        self.d.block(k)
    }
}

/// `d_W f - (-1)^n f d_V` for `f` of degree `n`.
pub fn map_differential(f: &GradedMap, dv: &GradedMap, dw: &GradedMap) -> Result<GradedMap, GradedError> {
    if dv.degree != 1 || dw.degree != 1 {
        return Err(GradedError::DifferentialDegree(if dv.degree != 1 { dv.degree } else { dw.degree }));
    }
    if dv.source != f.source || dw.source != f.target {
        return Err(GradedError::Degree("differentials do not match the map".into()));
    }
    let n = f.degree;
    let s = sign(n);
    let blocks = f
        .source
        .degrees()
        .chain(f.source.degrees().map(|k| k - 1))
        .map(|k| {
            let a = dw.block(k + n).mul(&f.block(k));
            let b = f.block(k + 1).mul(&dv.block(k)).scale(&s);
            (k, a.sub(&b))
        })
        .collect();
    GradedMap::new(&f.source, &f.target, n + 1, blocks)
}

/// `V<t>` with differential `(-1)^t d_V`.
pub fn shift(v: &Complex, t: i64) -> Complex {
    let space = v.space.shifted(t);
    let s = sign(t);
    let blocks = space.degrees().map(|k| (k, v.d.block(k + t).scale(&s))).collect();
    let d = GradedMap::new(&space, &space, 1, blocks).expect("shifted blocks keep their shapes");
    Complex { space, d }
}

pub fn cohomology(v: &Complex, k: i64) -> usize {
    let dim = v.space.dim(k);
    if dim == 0 {
        return 0;
    }
    dim - v.diff(k).rank() - v.diff(k - 1).rank()
}

pub fn cohomology_all(v: &Complex) -> BTreeMap<i64, usize> {
    v.space.degrees().map(|k| (k, cohomology(v, k))).filter(|(_, h)| *h > 0).collect()
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FreeGen {
    pub degree: i64,
    pub vector: Vec<Q>,
}

/// A contractible pair `b -> d(b)` with `b` in degree `degree`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ContractiblePair {
    pub degree: i64,
    pub source: Vec<Q>,
    pub target: Vec<Q>,
}

#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct AdaptedBasis {
    pub free: Vec<FreeGen>,
    pub pairs: Vec<ContractiblePair>,
}

impl AdaptedBasis {
    pub fn free_count(&self, k: i64) -> usize {
        self.free.iter().filter(|g| g.degree == k).count()
    }

    pub fn pair_count(&self, k: i64) -> usize {
        self.pairs.iter().filter(|p| p.degree == k).count()
    }

    /// Change of basis in degree `k`: columns are the adapted basis vectors,
    /// ordered free generators, pair sources, pair targets.
    pub fn basis_matrix(&self, space: &GradedVectorSpace, k: i64) -> Mat {
        let mut cols: Vec<Vec<Q>> = self.free.iter().filter(|g| g.degree == k).map(|g| g.vector.clone()).collect();
        cols.extend(self.pairs.iter().filter(|p| p.degree == k).map(|p| p.source.clone()));
        cols.extend(self.pairs.iter().filter(|p| p.degree + 1 == k).map(|p| p.target.clone()));
        Mat::from_cols(&cols, space.dim(k))
    }
}

pub fn decompose_complex(v: &Complex) -> AdaptedBasis {
    let mut out = AdaptedBasis::default();
    let mut boundaries: BTreeMap<i64, Vec<Vec<Q>>> = BTreeMap::new();
    for k in v.space.degrees() {
        let dk = v.diff(k);
        let n = v.space.dim(k);
        let ker = Subspace::span(n, &dk.kernel());
        for c in ker.complement_basis() {
            let t = dk.apply(&c);
            boundaries.entry(k + 1).or_default().push(t.clone());
            out.pairs.push(ContractiblePair { degree: k, source: c, target: t });
        }
    }
    for k in v.space.degrees() {
        let n = v.space.dim(k);
        let ker = v.diff(k).kernel();
        let mut all = boundaries.get(&k).cloned().unwrap_or_default();
        let nb = all.len();
        all.extend(ker);
        for i in independent_subset(&all, n) {
            if i >= nb {
                out.free.push(FreeGen { degree: k, vector: all[i].clone() });
            }
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::q;

    fn two_term() -> Complex {
        // x in degree -1, 1 in degree 0, d(x) = 1
        let space = GradedVectorSpace::new([(-1, 1), (0, 1)].into_iter().collect());
        let d = GradedMap::new(&space, &space, 1, [(-1, Mat::identity(1))].into_iter().collect()).unwrap();
        Complex::new(space, d).unwrap()
    }

    #[test]
    fn contracting_homotopy_differential_is_identity() {
        let v = two_term();
        let f = GradedMap::new(&v.space, &v.space, -1, [(0, Mat::identity(1))].into_iter().collect()).unwrap();
        let df = map_differential(&f, &v.d, &v.d).unwrap();
        assert_eq!(df, GradedMap::identity(&v.space));
    }

    #[test]
    fn differential_of_differential_vanishes() {
        let v = two_term();
        assert!(map_differential(&v.d, &v.d, &v.d).unwrap().is_zero());
    }

    #[test]
    fn shifts() {
        let v = two_term();
        assert_eq!(shift(&v, 0), v);
        assert_eq!(shift(&shift(&v, 1), -1), v);
        let w = Complex::zero_differential(GradedVectorSpace::new([(0, 2)].into_iter().collect()));
        assert_eq!(shift(&w, 1).space.dim(-1), 2);
        assert_eq!(shift(&w, 1).space.dim(0), 0);
    }

    #[test]
    fn cohomology_cases() {
        let v = two_term();
        assert_eq!(cohomology(&v, -1), 0);
        assert_eq!(cohomology(&v, 0), 0);
        let w = Complex::zero_differential(GradedVectorSpace::new([(0, 2), (3, 1)].into_iter().collect()));
        assert_eq!(cohomology(&w, 0), 2);
        assert_eq!(cohomology(&w, 3), 1);
    }

    #[test]
    fn decomposition_counts() {
        let a = decompose_complex(&two_term());
        assert_eq!(a.free.len(), 0);
        assert_eq!(a.pairs.len(), 1);
        let w = Complex::zero_differential(GradedVectorSpace::new([(0, 2)].into_iter().collect()));
        let b = decompose_complex(&w);
        assert_eq!(b.free.len(), 2);
        assert!(b.pairs.is_empty());
        assert_eq!(b.basis_matrix(&w.space, 0).rank(), 2);
        assert_eq!(a.pairs[0].target, vec![q(1)]);
    }

    #[test]
    fn bad_shapes_rejected() {
        let v = two_term();
        let err = GradedMap::new(&v.space, &v.space, 0, [(0, Mat::identity(2))].into_iter().collect());
        assert!(matches!(err, Err(GradedError::Shape { .. })));
        let w = two_term();
        assert!(map_differential(&w.d, &GradedMap::identity(&w.space), &w.d).is_err());
    }
}
