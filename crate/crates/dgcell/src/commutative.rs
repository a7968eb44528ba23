//! One-object mode for a commutative dg algebra `R`: maximal
//! differential-stable ideals and the quotients they define.

use std::collections::BTreeMap;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use thiserror::Error;

use crate::algebra::{grid, DgAlgebra, GRID_DIM_LIMIT, IDEMPOTENT_SAMPLES};
use crate::linalg::{q, Subspace, Q};
use crate::poly::Poly;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum CommError {
    #[error("algebra is not commutative")]
    NotCommutative,
    #[error("no element generating the semisimple quotient was found")]
    NoPrimitiveElement,
}

/// One maximal differential-stable ideal.
#[derive(Clone, Debug, Serialize)]
pub struct CommIdeal {
    /// Irreducible factor of the generating element's minimal polynomial,
    /// coefficients from the constant term.
    pub factor: Vec<String>,
    pub ideal_dim: usize,
    pub quotient_dim: usize,
    pub quotient_dims: BTreeMap<i64, usize>,
    /// The quotient is acyclic: `1` is a boundary modulo the ideal.
    pub acyclic: bool,
    #[serde(skip)]
    pub ideal: Subspace,
}

#[derive(Clone, Debug, Serialize)]
pub struct CommReport {
    pub dim: usize,
    pub radical_dim: usize,
    /// Minimal polynomial of the chosen generator of `R / rad R`.
    pub generator_min_poly: Vec<String>,
    /// Factorisation of that polynomial is certified irreducible.
    pub factorization_complete: bool,
    pub ideals: Vec<CommIdeal>,
}

fn is_graded_commutative(alg: &DgAlgebra) -> bool {
    alg.is_commutative() || alg.center().dim() == alg.dim()
}

/// Split factors by gcd against user-supplied polynomials.
fn refine(factors: Vec<Poly>, user: &[Poly]) -> Vec<Poly> {
    let mut out = factors;
    loop {
        let mut changed = false;
        let mut next = Vec::new();
        for f in out {
            let split = user.iter().find_map(|u| {
                let g = f.gcd(u);
                (g.degree() > 0 && g.degree() < f.degree()).then_some(g)
            });
            match split {
                Some(g) => {
                    next.push(f.divrem(&g).0.monic());
                    next.push(g.monic());
                    changed = true;
                }
                None => next.push(f),
            }
        }
        out = next;
        if !changed {
            return out;
        }
    }
}

/// Maximal differential-stable ideals of a commutative `R`, one per
/// irreducible factor of the minimal polynomial of a generator of
/// `R / rad R`, keeping the maximal ones after passing to the largest
/// stable ideal inside each maximal ideal.
pub fn maximal_dg_ideals(alg: &DgAlgebra, user_factors: &[Poly], seed: u64) -> Result<CommReport, CommError> {
    if !is_graded_commutative(alg) {
        return Err(CommError::NotCommutative);
    }
    let n = alg.dim();
    let rad = alg.radical();
    let target = n - rad.dim();
    let deg0 = alg.degree_indices(0);
    let embed = |c: &[Q]| -> Vec<Q> {
        let mut v = vec![q(0); n];
        for (ci, &i) in c.iter().zip(&deg0) {
            v[i] = ci.clone();
        }
        v
    };
    let mut samples: Vec<Vec<Q>> = Vec::new();
    if deg0.len() <= GRID_DIM_LIMIT {
        samples.extend(grid(deg0.len()));
    } else {
        samples.extend((0..deg0.len()).map(|i| crate::linalg::unit_vec(deg0.len(), i)));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for _ in 0..IDEMPOTENT_SAMPLES {
        samples.push((0..deg0.len()).map(|_| q(rng.gen_range(-3..=3))).collect());
    }
    let (x, p) = samples
        .iter()
        .map(|c| embed(c))
        .find_map(|x| {
            let p = alg.min_poly(&x).squarefree();
            (p.degree() as usize == target).then_some((x, p))
        })
        .ok_or(CommError::NoPrimitiveElement)?;
    let (factors, complete) = p.factor_squarefree();
    let factors = refine(factors, user_factors);
    let user_certified = factors.iter().all(|f| user_factors.iter().any(|u| u.monic() == *f));
    let basis: Vec<Vec<Q>> = (0..n).map(|i| alg.basis_vec(i)).collect();
    let mut candidates: Vec<(Poly, Subspace)> = Vec::new();
    for f in &factors {
        let fx = alg.eval_poly(f, &x);
        let gens: Vec<Vec<Q>> = basis.iter().map(|b| alg.mul(&fx, b)).collect();
        let m = rad.add_vecs(&gens);
        let stable = alg.rad_dg(&m).expect("maximal ideal");
        candidates.push((f.clone(), stable));
    }
    let mut ideals = Vec::new();
    for (i, (f, s)) in candidates.iter().enumerate() {
        let dominated = candidates.iter().enumerate().any(|(j, (_, t))| {
            j != i && t.contains_space(s) && (t.dim() > s.dim() || (t.dim() == s.dim() && j < i))
        });
        if dominated {
            continue;
        }
        let mut quotient_dims = BTreeMap::new();
        for k in alg.degree_set() {
            let idx = alg.degree_indices(k);
            let slice = Subspace::span(n, &idx.iter().map(|&i| alg.basis_vec(i)).collect::<Vec<_>>());
            let d = slice.dim() - slice.intersect(s).dim();
            if d > 0 {
                quotient_dims.insert(k, d);
            }
        }
        let boundaries: Vec<Vec<Q>> = basis.iter().map(|b| alg.d(b)).collect();
        let acyclic = s.add_vecs(&boundaries).contains(&alg.unit);
        ideals.push(CommIdeal {
            factor: f.to_strings(),
            ideal_dim: s.dim(),
            quotient_dim: n - s.dim(),
            quotient_dims,
            acyclic,
            ideal: s.clone(),
        });
    }
    Ok(CommReport {
        dim: n,
        radical_dim: rad.dim(),
        generator_min_poly: p.to_strings(),
        factorization_complete: complete || user_certified,
        ideals,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::examples;

    fn count(coeffs: &[i64]) -> CommReport {
        maximal_dg_ideals(&examples::truncated_poly(coeffs), &[], 0).unwrap()
    }

    #[test]
    fn quadratic_examples() {
        let r = count(&[-1, 0, 1]);
        assert_eq!(r.ideals.len(), 2);
        assert!(r.ideals.iter().all(|i| i.quotient_dim == 1));
        let r = count(&[1, 0, 1]);
        assert_eq!(r.ideals.len(), 1);
        assert_eq!(r.ideals[0].quotient_dim, 2);
        let r = count(&[0, 0, 1]);
        assert_eq!(r.ideals.len(), 1);
        assert_eq!(r.ideals[0].quotient_dim, 1);
        assert!(r.factorization_complete);
    }

    #[test]
    fn products_and_differentials() {
        let r = maximal_dg_ideals(&examples::q_times_q(), &[], 0).unwrap();
        assert_eq!(r.ideals.len(), 2);
        let r = maximal_dg_ideals(&examples::dual_numbers(-1, true), &[], 0).unwrap();
        assert_eq!(r.ideals.len(), 1);
        assert_eq!(r.ideals[0].ideal_dim, 0);
        assert!(r.ideals[0].acyclic);
        let r = maximal_dg_ideals(&examples::dual_numbers_times_q(), &[], 0).unwrap();
        assert_eq!(r.ideals.len(), 2);
    }

    #[test]
    fn user_factors_split_quartics() {
        // (x^2 - 2)(x^2 - 3) has no rational roots
        let a = examples::truncated_poly(&[6, 0, -5, 0, 1]);
        let r = maximal_dg_ideals(&a, &[Poly::from_ints(&[-2, 0, 1])], 0).unwrap();
        assert_eq!(r.ideals.len(), 2);
        assert!(r.ideals.iter().all(|i| i.quotient_dim == 2));
    }

    #[test]
    fn rejects_noncommutative() {
        assert_eq!(maximal_dg_ideals(&examples::matrix2(), &[], 0).unwrap_err(), CommError::NotCommutative);
    }
}
