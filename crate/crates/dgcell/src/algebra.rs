//! Finite-dimensional dg algebras given by structure constants.

use crate::linalg::{add_vec, axpy, is_zero_vec, parity, q, sign, sub_vec, unit_vec, zero_vec, Mat, Subspace, Q};
use crate::poly::Poly;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use std::collections::BTreeMap;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum AlgebraError {
    #[error("subspace is not a two-sided ideal")]
    NotIdeal,
    #[error("vector is not homogeneous")]
    NotHomogeneous,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Idempotent {
    pub label: String,
    pub vector: Vec<Q>,
}

/// A dg algebra on a homogeneous basis. `mult[i][j]` holds the coordinates
/// of `b_i b_j`; column `j` of `diff` holds the coordinates of `d(b_j)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DgAlgebra {
    pub labels: Vec<String>,
    pub degrees: Vec<i64>,
    pub mult: Vec<Vec<Vec<Q>>>,
    pub unit: Vec<Q>,
    pub idempotents: Vec<Idempotent>,
    pub diff: Mat,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Violation {
    pub kind: String,
    pub detail: String,
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct ValidationReport {
    pub violations: Vec<Violation>,
}

impl ValidationReport {
    pub fn ok(&self) -> bool {
        self.violations.is_empty()
    }

    fn push(&mut self, kind: &str, detail: String) {
        self.violations.push(Violation { kind: kind.to_string(), detail });
    }
}

/// Ring-theoretic verdict for "is this finite-dimensional algebra local".
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Locality {
    Local,
    NotLocal,
    Undetermined,
}

impl DgAlgebra {
    pub fn dim(&self) -> usize {
        self.labels.len()
    }

    pub fn basis_vec(&self, i: usize) -> Vec<Q> {
        unit_vec(self.dim(), i)
    }

    pub fn mul(&self, x: &[Q], y: &[Q]) -> Vec<Q> {
        let n = self.dim();
        let mut out = zero_vec(n);
        for (i, a) in x.iter().enumerate() {
            if a.is_zero_q() {
                continue;
            }
            for (j, b) in y.iter().enumerate() {
                if b.is_zero_q() {
                    continue;
                }
                let c = a * b;
                axpy(&mut out, &c, &self.mult[i][j]);
            }
        }
        out
    }

    pub fn d(&self, x: &[Q]) -> Vec<Q> {
        self.diff.apply(x)
    }

    /// Matrix of `y -> x y`.
    pub fn left_mult(&self, x: &[Q]) -> Mat {
        let cols: Vec<Vec<Q>> = (0..self.dim()).map(|j| self.mul(x, &self.basis_vec(j))).collect();
        Mat::from_cols(&cols, self.dim())
    }

    /// Matrix of `y -> y x`.
    pub fn right_mult(&self, x: &[Q]) -> Mat {
        let cols: Vec<Vec<Q>> = (0..self.dim()).map(|j| self.mul(&self.basis_vec(j), x)).collect();
        Mat::from_cols(&cols, self.dim())
    }

    /// Degree of a nonzero homogeneous vector.
    pub fn degree_of(&self, x: &[Q]) -> Result<Option<i64>, AlgebraError> {
        let mut deg = None;
        for (i, c) in x.iter().enumerate() {
            if c.is_zero_q() {
                continue;
            }
            match deg {
                None => deg = Some(self.degrees[i]),
                Some(d) if d != self.degrees[i] => return Err(AlgebraError::NotHomogeneous),
                _ => {}
            }
        }
        Ok(deg)
    }

    pub fn degree_set(&self) -> Vec<i64> {
        let mut d = self.degrees.clone();
        d.sort();
        d.dedup();
        d
    }

    /// Coordinates supported on degree `k`.
    pub fn degree_indices(&self, k: i64) -> Vec<usize> {
        (0..self.dim()).filter(|&i| self.degrees[i] == k).collect()
    }

    /// Homogeneous basis of a graded subspace, grouped by degree.
    pub fn homogeneous_basis(&self, s: &Subspace) -> Vec<(i64, Vec<Q>)> {
        let mut out = Vec::new();
        for k in self.degree_set() {
            let idx = self.degree_indices(k);
            let coord = Subspace::span(self.dim(), &idx.iter().map(|&i| self.basis_vec(i)).collect::<Vec<_>>());
            for v in s.intersect(&coord).basis() {
                out.push((k, v.clone()));
            }
        }
        out
    }

    /// Homogeneous basis of `xAy` for degree-0 elements `x`, `y`.
    pub fn corner(&self, x: &[Q], y: &[Q]) -> Vec<(i64, Vec<Q>)> {
        let vecs: Vec<Vec<Q>> = (0..self.dim()).map(|j| self.mul(&self.mul(x, &self.basis_vec(j)), y)).collect();
        self.homogeneous_basis(&Subspace::span(self.dim(), &vecs))
    }

    pub fn corner_dim(&self, x: &[Q], y: &[Q]) -> usize {
        self.corner(x, y).len()
    }

    pub fn is_ideal(&self, s: &Subspace) -> bool {
        s.basis().iter().all(|v| {
            (0..self.dim()).all(|i| {
                let b = self.basis_vec(i);
                s.contains(&self.mul(&b, v)) && s.contains(&self.mul(v, &b))
            })
        })
    }

    pub fn validate(&self) -> ValidationReport {
        let mut r = ValidationReport::default();
        let n = self.dim();
        if self.degrees.len() != n || self.unit.len() != n || self.mult.len() != n {
            r.push("shape", "basis, degrees, unit and multiplication table differ in size".into());
            return r;
        }
        if self.mult.iter().any(|row| row.len() != n || row.iter().any(|v| v.len() != n))
            || self.diff.rows != n
            || self.diff.cols != n
            || self.idempotents.iter().any(|e| e.vector.len() != n)
        {
            r.push("shape", "structure tensor, differential or idempotent has the wrong size".into());
            return r;
        }
        let l = &self.labels;
        for i in 0..n {
            for j in 0..n {
                let p = &self.mult[i][j];
                for k in 0..n {
                    if !p[k].is_zero_q() && self.degrees[k] != self.degrees[i] + self.degrees[j] {
                        r.push("grading", format!("{}*{} has a component on {} of the wrong degree", l[i], l[j], l[k]));
                        break;
                    }
                }
            }
            let dc = self.diff.col(i);
            for k in 0..n {
                if !dc[k].is_zero_q() && self.degrees[k] != self.degrees[i] + 1 {
                    r.push("grading", format!("d({}) has a component on {} not of degree {}", l[i], l[k], self.degrees[i] + 1));
                    break;
                }
            }
        }
        for i in 0..n {
            for j in 0..n {
                let ij = &self.mult[i][j];
                for k in 0..n {
                    let left = self.mul(ij, &self.basis_vec(k));
                    let right = self.mul(&self.basis_vec(i), &self.mult[j][k]);
                    if left != right {
                        r.push("associativity", format!("({}*{})*{} != {}*({}*{})", l[i], l[j], l[k], l[i], l[j], l[k]));
                    }
                }
            }
        }
        if self.degree_of(&self.unit).ok().flatten() != Some(0) {
            r.push("unit", "unit is not homogeneous of degree 0".into());
        }
        for i in 0..n {
            let b = self.basis_vec(i);
            if self.mul(&self.unit, &b) != b || self.mul(&b, &self.unit) != b {
                r.push("unit", format!("unit does not act as identity on {}", l[i]));
            }
        }
        let d2 = self.diff.mul(&self.diff);
        for j in 0..n {
            if !is_zero_vec(&d2.col(j)) {
                r.push("differential", format!("d(d({})) != 0", l[j]));
            }
        }
        for i in 0..n {
            for j in 0..n {
                let bi = self.basis_vec(i);
                let bj = self.basis_vec(j);
                let lhs = self.d(&self.mult[i][j]);
                let rhs = add_vec(
                    &self.mul(&self.d(&bi), &bj),
                    &self.mul(&bi, &self.d(&bj)).iter().map(|x| x * sign(self.degrees[i])).collect::<Vec<_>>(),
                );
                if lhs != rhs {
                    r.push("leibniz", format!("d({}*{}) violates the Leibniz rule", l[i], l[j]));
                }
            }
        }
        self.validate_idempotents(&mut r);
        r
    }

    fn validate_idempotents(&self, r: &mut ValidationReport) {
        let n = self.dim();
        if self.idempotents.is_empty() {
            r.push("idempotents", "no idempotents listed".into());
            return;
        }
        let mut sum = zero_vec(n);
        for (a, e) in self.idempotents.iter().enumerate() {
            sum = add_vec(&sum, &e.vector);
            if !matches!(self.degree_of(&e.vector), Ok(Some(0))) {
                r.push("idempotents", format!("{} is not a nonzero element of degree 0", e.label));
            }
            if !is_zero_vec(&self.d(&e.vector)) {
                r.push("idempotents", format!("d({}) != 0", e.label));
            }
            for (b, f) in self.idempotents.iter().enumerate() {
                let p = self.mul(&e.vector, &f.vector);
                let expected = if a == b { e.vector.clone() } else { zero_vec(n) };
                if p != expected {
                    r.push("idempotents", format!("{}*{} violates orthogonal idempotence", e.label, f.label));
                }
            }
        }
        if sum != self.unit {
            r.push("idempotents", "idempotents do not sum to the unit".into());
        }
        if !r.ok() {
            return;
        }
        for e in &self.idempotents {
            let cyc = self.corner_algebra(&e.vector).cycle_subalgebra_degree0();
            match cyc.locality(0) {
                Locality::Local => {}
                Locality::NotLocal => r.push("primitivity", format!("{} is not primitive", e.label)),
                Locality::Undetermined => {
                    r.push("primitivity", format!("primitivity of {} could not be decided", e.label))
                }
            }
        }
    }

    /// Corner algebra `eAe` on a homogeneous basis, with unit `e`.
    pub fn corner_algebra(&self, e: &[Q]) -> DgAlgebra {
        let basis = self.corner(e, e);
        self.subalgebra(&basis, e)
    }

    /// Subalgebra on a homogeneous basis closed under product and differential.
    pub fn subalgebra(&self, basis: &[(i64, Vec<Q>)], unit: &[Q]) -> DgAlgebra {
        let m = basis.len();
        let vecs: Vec<Vec<Q>> = basis.iter().map(|(_, v)| v.clone()).collect();
        let mat = Mat::from_cols(&vecs, self.dim());
        let coords = |v: &[Q]| mat.solve(v).expect("subalgebra not closed");
        let mult = (0..m).map(|i| (0..m).map(|j| coords(&self.mul(&vecs[i], &vecs[j]))).collect()).collect();
        let dcols: Vec<Vec<Q>> = vecs.iter().map(|v| coords(&self.d(v))).collect();
        let unit_c = coords(unit);
        DgAlgebra {
            labels: (0..m).map(|i| format!("s{i}")).collect(),
            degrees: basis.iter().map(|(k, _)| *k).collect(),
            mult,
            unit: unit_c.clone(),
            idempotents: vec![Idempotent { label: "1".into(), vector: unit_c }],
            diff: Mat::from_cols(&dcols, m),
        }
    }

    /// Degree-0 cycles as an ungraded algebra with zero differential.
    pub fn cycle_subalgebra_degree0(&self) -> DgAlgebra {
        let idx = self.degree_indices(0);
        let n = self.dim();
        let coord: Vec<Vec<Q>> = idx.iter().map(|&i| self.basis_vec(i)).collect();
        let deg0 = Subspace::span(n, &coord);
        let ker = Subspace::span(n, &self.diff.kernel());
        let z: Vec<(i64, Vec<Q>)> = deg0.intersect(&ker).basis().iter().map(|v| (0, v.clone())).collect();
        self.subalgebra(&z, &self.unit)
    }

    /// Degree-0 part as an ungraded algebra with zero differential.
    pub fn degree0_subalgebra(&self) -> DgAlgebra {
        let z: Vec<(i64, Vec<Q>)> = self.degree_indices(0).iter().map(|&i| (0, self.basis_vec(i))).collect();
        self.subalgebra(&z, &self.unit)
    }

    /// Jacobson radical via the kernel of the trace form `tr(L_x L_y)`.
    pub fn radical(&self) -> Subspace {
        let n = self.dim();
        let ls: Vec<Mat> = (0..n).map(|i| self.left_mult(&self.basis_vec(i))).collect();
        let mut form = Mat::zeros(n, n);
        for i in 0..n {
            for j in 0..n {
                form[(i, j)] = ls[i].mul(&ls[j]).trace();
            }
        }
        let ker = Subspace::span(n, &form.kernel());
        let hom: Vec<Vec<Q>> = self.homogeneous_basis(&ker).into_iter().map(|(_, v)| v).collect();
        Subspace::span(n, &hom)
    }

    /// Largest differential-stable ideal inside the ideal `i0`.
    pub fn rad_dg(&self, i0: &Subspace) -> Result<Subspace, AlgebraError> {
        if !self.is_ideal(i0) {
            return Err(AlgebraError::NotIdeal);
        }
        let mut cur = i0.clone();
        loop {
            let next = cur.intersect(&cur.preimage(&self.diff));
            if next.dim() == cur.dim() {
                return Ok(next);
            }
            cur = next;
        }
    }

    /// Graded centre: homogeneous `z` with `z b = (-1)^{|z||b|} b z`.
    pub fn center(&self) -> Subspace {
        let n = self.dim();
        let mut out = Vec::new();
        for k in self.degree_set() {
            let idx = self.degree_indices(k);
            let mut rows: Vec<Vec<Q>> = Vec::new();
            for b in 0..n {
                let s = sign(k * self.degrees[b]);
                // columns: unknown coefficients of z over idx
                let cols: Vec<Vec<Q>> = idx
                    .iter()
                    .map(|&i| sub_vec(&self.mult[i][b], &self.mult[b][i].iter().map(|x| x * &s).collect::<Vec<_>>()))
                    .collect();
                let m = Mat::from_cols(&cols, n);
                for r in 0..n {
                    rows.push(m.row(r));
                }
            }
            let sys = Mat::from_rows(&rows, idx.len());
            for sol in sys.kernel() {
                let mut v = zero_vec(n);
                for (c, &i) in sol.iter().zip(&idx) {
                    v[i] = c.clone();
                }
                out.push(v);
            }
        }
        Subspace::span(n, &out)
    }

    /// Minimal polynomial of `x` under multiplication.
    pub fn min_poly(&self, x: &[Q]) -> Poly {
        let n = self.dim();
        let mut powers = vec![self.unit.clone()];
        loop {
            let next = self.mul(powers.last().unwrap(), x);
            let m = Mat::from_cols(&powers, n);
            if let Some(c) = m.solve(&next) {
                let mut coeffs: Vec<Q> = c.iter().map(|v| -v.clone()).collect();
                coeffs.push(q(1));
                return Poly::new(coeffs);
            }
            powers.push(next);
            if powers.len() > n + 1 {
                unreachable!("minimal polynomial degree exceeds dimension");
            }
        }
    }

    pub fn eval_poly(&self, p: &Poly, x: &[Q]) -> Vec<Q> {
        let mut acc = zero_vec(self.dim());
        for c in p.coeffs().iter().rev() {
            acc = self.mul(&acc, x);
            axpy(&mut acc, c, &self.unit);
        }
        acc
    }

    /// Quotient by a two-sided ideal, ungraded, zero differential.
    pub fn quotient_ungraded(&self, ideal: &Subspace) -> DgAlgebra {
        let n = self.dim();
        let comp = ideal.complement_basis();
        let m = comp.len();
        let mut all = comp.clone();
        all.extend(ideal.basis().iter().cloned());
        let change = Mat::from_cols(&all, n);
        let inv = change.inverse().expect("complement completes a basis");
        let proj = |v: &[Q]| inv.apply(v)[..m].to_vec();
        let mult = (0..m).map(|i| (0..m).map(|j| proj(&self.mul(&comp[i], &comp[j]))).collect()).collect();
        DgAlgebra {
            labels: (0..m).map(|i| format!("q{i}")).collect(),
            degrees: vec![0; m],
            mult,
            unit: proj(&self.unit),
            idempotents: vec![],
            diff: Mat::zeros(m, m),
        }
    }

    pub fn is_commutative(&self) -> bool {
        let n = self.dim();
        (0..n).all(|i| (0..n).all(|j| self.mult[i][j] == self.mult[j][i]))
    }

    /// Whether the ungraded algebra is local, i.e. its semisimple quotient
    /// is a division algebra. Idempotents are searched through minimal
    /// polynomials of sampled elements; a reducible separable minimal
    /// polynomial exhibits a nontrivial idempotent.
    pub fn locality(&self, seed: u64) -> Locality {
        if self.dim() == 0 {
            return Locality::NotLocal;
        }
        let s = self.quotient_ungraded(&self.radical());
        let m = s.dim();
        if m == 1 {
            return Locality::Local;
        }
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut field_witness = false;
        let mut samples: Vec<Vec<Q>> = (0..m).map(|i| unit_vec(m, i)).collect();
        for _ in 0..IDEMPOTENT_SAMPLES {
            samples.push((0..m).map(|_| q(rng.gen_range(-2..=2))).collect());
        }
        if m <= GRID_DIM_LIMIT {
            samples.extend(grid(m));
        }
        for x in samples {
            let p = s.min_poly(&x);
            let (factors, complete) = p.factor_squarefree();
            if factors.len() > 1 {
                return Locality::NotLocal;
            }
            if complete && factors.len() == 1 && factors[0].degree() as usize == m {
                field_witness = true;
            }
        }
        if field_witness && s.is_commutative() {
            Locality::Local
        } else {
            Locality::Undetermined
        }
    }
}

pub const IDEMPOTENT_SAMPLES: usize = 64;
pub const GRID_DIM_LIMIT: usize = 4;

/// Coefficient vectors in `{-1,0,1}^m`, without the zero vector.
pub fn grid(m: usize) -> Vec<Vec<Q>> {
    let mut out = Vec::new();
    let total = 3usize.pow(m as u32);
    for code in 1..total {
        let mut c = code;
        let mut v = Vec::with_capacity(m);
        for _ in 0..m {
            v.push(q((c % 3) as i64 - 1));
            c /= 3;
        }
        if v.iter().any(|x| !x.is_zero_q()) {
            out.push(v);
        }
    }
    out
}

trait IsZeroQ {
    fn is_zero_q(&self) -> bool;
}

impl IsZeroQ for Q {
    fn is_zero_q(&self) -> bool {
        num_traits::Zero::is_zero(self)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum EquivalenceVerdict {
    /// Certified by explicit elements.
    Equivalent,
    /// No pair exists; exact because one corner has no degree-0 cycles.
    NotEquivalentExact,
    /// Exhaustive grid search found no pair.
    NotEquivalentGrid,
    Undetermined,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct IdempotentClasses {
    /// Class index for each idempotent.
    pub class_of: Vec<usize>,
    /// Lowest-index member of each class.
    pub representatives: Vec<usize>,
    pub verdicts: BTreeMap<String, EquivalenceVerdict>,
}

impl IdempotentClasses {
    pub fn representative_of(&self, i: usize) -> usize {
        self.representatives[self.class_of[i]]
    }
}

impl DgAlgebra {
    fn degree0_cycles_in(&self, x: &[Q], y: &[Q]) -> Vec<Vec<Q>> {
        let n = self.dim();
        let c: Vec<Vec<Q>> = self.corner(x, y).into_iter().filter(|(k, _)| *k == 0).map(|(_, v)| v).collect();
        if c.is_empty() {
            return c;
        }
        let dm = Mat::from_cols(&c.iter().map(|v| self.d(v)).collect::<Vec<_>>(), n);
        dm.kernel()
            .iter()
            .map(|k| {
                let mut v = zero_vec(n);
                for (a, b) in k.iter().zip(&c) {
                    axpy(&mut v, a, b);
                }
                v
            })
            .collect()
    }

    /// Decide whether `e_i` and `e_j` are linked by degree-0 cycles `a`, `b`
    /// with `ab = e_i`, `ba = e_j`; returns the verdict and a certificate.
    pub fn idempotents_equivalent(&self, i: usize, j: usize, seed: u64) -> (EquivalenceVerdict, Option<(Vec<Q>, Vec<Q>)>) {
        let ei = &self.idempotents[i].vector;
        let ej = &self.idempotents[j].vector;
        if i == j {
            return (EquivalenceVerdict::Equivalent, Some((ei.clone(), ei.clone())));
        }
        let za = self.degree0_cycles_in(ei, ej);
        let zb = self.degree0_cycles_in(ej, ei);
        if za.is_empty() || zb.is_empty() {
            return (EquivalenceVerdict::NotEquivalentExact, None);
        }
        let n = self.dim();
        let try_a = |coef: &[Q]| -> Option<(Vec<Q>, Vec<Q>)> {
            let mut a = zero_vec(n);
            for (c, z) in coef.iter().zip(&za) {
                axpy(&mut a, c, z);
            }
            // unknown b = sum t_k zb_k: a b = e_i, b a = e_j
            let mut rows = Vec::new();
            let mut rhs = Vec::new();
            let ab: Vec<Vec<Q>> = zb.iter().map(|z| self.mul(&a, z)).collect();
            let ba: Vec<Vec<Q>> = zb.iter().map(|z| self.mul(z, &a)).collect();
            for r in 0..n {
                rows.push(ab.iter().map(|v| v[r].clone()).collect::<Vec<_>>());
                rhs.push(ei[r].clone());
                rows.push(ba.iter().map(|v| v[r].clone()).collect::<Vec<_>>());
                rhs.push(ej[r].clone());
            }
            let t = Mat::from_rows(&rows, zb.len()).solve(&rhs)?;
            let mut b = zero_vec(n);
            for (c, z) in t.iter().zip(&zb) {
                axpy(&mut b, c, z);
            }
            Some((a, b))
        };
        let mut rng = ChaCha8Rng::seed_from_u64(seed ^ ((i as u64) << 32 | j as u64));
        for _ in 0..IDEMPOTENT_SAMPLES {
            let coef: Vec<Q> = (0..za.len()).map(|_| q(rng.gen_range(-2..=2))).collect();
            if let Some(c) = try_a(&coef) {
                return (EquivalenceVerdict::Equivalent, Some(c));
            }
        }
        if za.len() > GRID_DIM_LIMIT {
            return (EquivalenceVerdict::Undetermined, None);
        }
        for coef in grid(za.len()) {
            if let Some(c) = try_a(&coef) {
                return (EquivalenceVerdict::Equivalent, Some(c));
            }
        }
        (EquivalenceVerdict::NotEquivalentGrid, None)
    }

    pub fn idempotent_classes(&self, seed: u64) -> IdempotentClasses {
        let s = self.idempotents.len();
        let mut parent: Vec<usize> = (0..s).collect();
        fn find(p: &mut [usize], x: usize) -> usize {
            let mut r = x;
            while p[r] != r {
                r = p[r];
            }
            p[x] = r;
            r
        }
        let mut verdicts = BTreeMap::new();
        for i in 0..s {
            for j in i + 1..s {
                let (v, _) = self.idempotents_equivalent(i, j, seed);
                if v == EquivalenceVerdict::Equivalent {
                    let (a, b) = (find(&mut parent, i), find(&mut parent, j));
                    parent[a.max(b)] = a.min(b);
                }
                verdicts.insert(format!("{}~{}", self.idempotents[i].label, self.idempotents[j].label), v);
            }
        }
        let roots: Vec<usize> = (0..s).map(|i| find(&mut parent, i)).collect();
        let mut representatives: Vec<usize> = roots.clone();
        representatives.sort();
        representatives.dedup();
        let class_of = roots.iter().map(|r| representatives.iter().position(|x| x == r).unwrap()).collect();
        IdempotentClasses { class_of, representatives, verdicts }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct BlockDecomposition {
    /// Idempotent indices per block.
    pub blocks: Vec<Vec<usize>>,
    pub semisimple: Vec<bool>,
    pub block_of: Vec<usize>,
}

impl BlockDecomposition {
    pub fn non_semisimple(&self) -> Vec<usize> {
        (0..self.blocks.len()).filter(|&b| !self.semisimple[b]).collect()
    }
}

impl DgAlgebra {
    pub fn blocks(&self) -> BlockDecomposition {
        let s = self.idempotents.len();
        let mut block_of = vec![usize::MAX; s];
        let mut blocks = Vec::new();
        for start in 0..s {
            if block_of[start] != usize::MAX {
                continue;
            }
            let b = blocks.len();
            let mut comp = vec![start];
            block_of[start] = b;
            let mut stack = vec![start];
            while let Some(i) = stack.pop() {
                for j in 0..s {
                    if block_of[j] != usize::MAX {
                        continue;
                    }
                    let ei = &self.idempotents[i].vector;
                    let ej = &self.idempotents[j].vector;
                    if self.corner_dim(ei, ej) > 0 || self.corner_dim(ej, ei) > 0 {
                        block_of[j] = b;
                        comp.push(j);
                        stack.push(j);
                    }
                }
            }
            comp.sort();
            blocks.push(comp);
        }
        let rad = self.radical();
        let semisimple = blocks
            .iter()
            .map(|comp| {
                let eps = self.block_unit_of(comp);
                rad.basis().iter().all(|r| is_zero_vec(&self.mul(&self.mul(&eps, r), &eps)))
            })
            .collect();
        BlockDecomposition { blocks, semisimple, block_of }
    }

    pub fn block_unit_of(&self, comp: &[usize]) -> Vec<Q> {
        let mut eps = zero_vec(self.dim());
        for &i in comp {
            eps = add_vec(&eps, &self.idempotents[i].vector);
        }
        eps
    }

    /// Replace the differential by zero.
    pub fn with_zero_differential(&self) -> DgAlgebra {
        let mut a = self.clone();
        a.diff = Mat::zeros(self.dim(), self.dim());
        a
    }

    pub fn sign_deg(&self, i: usize, k: i64) -> Q {
        sign(self.degrees[i] * k)
    }

    pub fn parity_of(&self, i: usize) -> i64 {
        parity(self.degrees[i])
    }
}
