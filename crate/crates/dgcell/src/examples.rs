//! Built-in small dg algebras used by the test suites and the CLI.

use crate::algebra::{DgAlgebra, Idempotent};
use crate::linalg::{q, unit_vec, zero_vec, Mat, Q};

fn table(n: usize, entries: &[(usize, usize, usize)]) -> Vec<Vec<Vec<Q>>> {
    let mut m = vec![vec![zero_vec(n); n]; n];
    for &(i, j, k) in entries {
        m[i][j] = unit_vec(n, k);
    }
    m
}

fn idem(label: &str, n: usize, i: usize) -> Idempotent {
    Idempotent { label: label.into(), vector: unit_vec(n, i) }
}

/// `Q[x]/(x^2)` with `|x| = deg`; when `acyclic`, `d(x) = 1`.
pub fn dual_numbers(deg: i64, acyclic: bool) -> DgAlgebra {
    let mut diff = Mat::zeros(2, 2);
    if acyclic {
        diff[(0, 1)] = q(1);
    }
    DgAlgebra {
        labels: vec!["1".into(), "x".into()],
        degrees: vec![0, deg],
        mult: table(2, &[(0, 0, 0), (0, 1, 1), (1, 0, 1)]),
        unit: unit_vec(2, 0),
        idempotents: vec![idem("e", 2, 0)],
        diff,
    }
}

/// Path algebra of `1 -> 2`: basis `e1, e2, a` with `a = e2 a e1`.
pub fn a2() -> DgAlgebra {
    DgAlgebra {
        labels: vec!["e1".into(), "e2".into(), "a".into()],
        degrees: vec![0, 0, 0],
        mult: table(3, &[(0, 0, 0), (1, 1, 1), (1, 2, 2), (2, 0, 2)]),
        unit: vec![q(1), q(1), q(0)],
        idempotents: vec![idem("e1", 3, 0), idem("e2", 3, 1)],
        diff: Mat::zeros(3, 3),
    }
}

pub fn q_times_q() -> DgAlgebra {
    DgAlgebra {
        labels: vec!["e1".into(), "e2".into()],
        degrees: vec![0, 0],
        mult: table(2, &[(0, 0, 0), (1, 1, 1)]),
        unit: vec![q(1), q(1)],
        idempotents: vec![idem("e1", 2, 0), idem("e2", 2, 1)],
        diff: Mat::zeros(2, 2),
    }
}

/// 2x2 matrices on matrix units `E11, E12, E21, E22`.
pub fn matrix2() -> DgAlgebra {
    let idx = |i: usize, j: usize| 2 * i + j;
    let mut entries = Vec::new();
    for i in 0..2 {
        for j in 0..2 {
            for k in 0..2 {
                entries.push((idx(i, j), idx(j, k), idx(i, k)));
            }
        }
    }
    DgAlgebra {
        labels: vec!["E11".into(), "E12".into(), "E21".into(), "E22".into()],
        degrees: vec![0; 4],
        mult: table(4, &entries),
        unit: vec![q(1), q(0), q(0), q(1)],
        idempotents: vec![idem("E11", 4, 0), idem("E22", 4, 3)],
        diff: Mat::zeros(4, 4),
    }
}

/// `Q[x]/(x^2) x Q`.
pub fn dual_numbers_times_q() -> DgAlgebra {
    DgAlgebra {
        labels: vec!["e1".into(), "x".into(), "e2".into()],
        degrees: vec![0, 0, 0],
        mult: table(3, &[(0, 0, 0), (0, 1, 1), (1, 0, 1), (2, 2, 2)]),
        unit: vec![q(1), q(0), q(1)],
        idempotents: vec![idem("e1", 3, 0), idem("e2", 3, 2)],
        diff: Mat::zeros(3, 3),
    }
}

/// `Q[x]/(p)` for a monic `p` given by coefficients from the constant term,
/// on the basis `1, x, ..., x^{n-1}`, all in degree 0.
pub fn truncated_poly(coeffs: &[i64]) -> DgAlgebra {
    let n = coeffs.len() - 1;
    assert_eq!(coeffs[n], 1, "polynomial must be monic");
    // x^k reduced modulo p
    let mut powers: Vec<Vec<Q>> = (0..n).map(|k| unit_vec(n, k)).collect();
    for k in n..2 * n - 1 {
        let prev = powers[k - 1].clone();
        let mut next = zero_vec(n);
        next[1..n].clone_from_slice(&prev[..n - 1]);
        let top = prev[n - 1].clone();
        for (i, c) in coeffs[..n].iter().enumerate() {
            next[i] -= &top * q(*c);
        }
        powers.push(next);
    }
    let mult = (0..n).map(|i| (0..n).map(|j| powers[i + j].clone()).collect()).collect();
    DgAlgebra {
        labels: (0..n).map(|k| if k == 0 { "1".into() } else { format!("x^{k}") }).collect(),
        degrees: vec![0; n],
        mult,
        unit: unit_vec(n, 0),
        idempotents: vec![idem("1", n, 0)],
        diff: Mat::zeros(n, n),
    }
}

/// The five acceptance algebras.
pub fn all() -> Vec<(&'static str, DgAlgebra)> {
    vec![
        ("dual_numbers", dual_numbers(0, false)),
        ("acyclic_dual_numbers", dual_numbers(-1, true)),
        ("a2", a2()),
        ("q_times_q", q_times_q()),
        ("matrix2", matrix2()),
    ]
}
