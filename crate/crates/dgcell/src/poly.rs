//! Univariate polynomials over the rationals with a small factoriser
//! (rational roots and quadratic factors).

use crate::linalg::{q, Q};
use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};

/// Coefficients from the constant term upwards; no trailing zeros.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Poly(Vec<Q>);

/// Largest absolute integer value whose divisors are enumerated.
const DIVISOR_LIMIT: i64 = 1_000_000;

impl Poly {
    pub fn new(mut c: Vec<Q>) -> Poly {
        while c.last().is_some_and(|x| x.is_zero()) {
            c.pop();
        }
        Poly(c)
    }

    pub fn from_ints(c: &[i64]) -> Poly {
        Poly::new(c.iter().map(|&x| q(x)).collect())
    }

    pub fn coeffs(&self) -> &[Q] {
        &self.0
    }

    pub fn one() -> Poly {
        Poly(vec![Q::one()])
    }

    pub fn x() -> Poly {
        Poly(vec![Q::zero(), Q::one()])
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_empty()
    }

    /// Degree, with the zero polynomial given degree -1.
    pub fn degree(&self) -> i64 {
        self.0.len() as i64 - 1
    }

    pub fn lead(&self) -> Q {
        self.0.last().cloned().unwrap_or_else(Q::zero)
    }

    pub fn monic(&self) -> Poly {
        if self.is_zero() {
            return self.clone();
        }
        let l = self.lead();
        Poly(self.0.iter().map(|c| c / &l).collect())
    }

    pub fn add(&self, o: &Poly) -> Poly {
        let n = self.0.len().max(o.0.len());
        Poly::new(
            (0..n)
                .map(|i| self.0.get(i).cloned().unwrap_or_else(Q::zero) + o.0.get(i).cloned().unwrap_or_else(Q::zero))
                .collect(),
        )
    }

    pub fn neg(&self) -> Poly {
        Poly(self.0.iter().map(|c| -c).collect())
    }

    pub fn sub(&self, o: &Poly) -> Poly {
        self.add(&o.neg())
    }

    pub fn mul(&self, o: &Poly) -> Poly {
        if self.is_zero() || o.is_zero() {
            return Poly(vec![]);
        }
        let mut c = vec![Q::zero(); self.0.len() + o.0.len() - 1];
        for (i, a) in self.0.iter().enumerate() {
            for (j, b) in o.0.iter().enumerate() {
                c[i + j] += a * b;
            }
        }
        Poly::new(c)
    }

    pub fn divrem(&self, d: &Poly) -> (Poly, Poly) {
        assert!(!d.is_zero(), "division by zero polynomial");
        let mut r = self.0.clone();
        let dd = d.0.len();
        if r.len() < dd {
            return (Poly(vec![]), self.clone());
        }
        let mut quo = vec![Q::zero(); r.len() - dd + 1];
        let l = d.lead();
        for i in (0..quo.len()).rev() {
            let c = &r[i + dd - 1] / &l;
            if !c.is_zero() {
                for (j, dj) in d.0.iter().enumerate() {
                    r[i + j] -= &c * dj;
                }
            }
            quo[i] = c;
        }
        (Poly::new(quo), Poly::new(r))
    }

    pub fn gcd(&self, o: &Poly) -> Poly {
        let (mut a, mut b) = (self.clone(), o.clone());
        while !b.is_zero() {
            let r = a.divrem(&b).1;
            a = b;
            b = r;
        }
        a.monic()
    }

    pub fn derivative(&self) -> Poly {
        Poly::new(self.0.iter().enumerate().skip(1).map(|(i, c)| c * q(i as i64)).collect())
    }

    /// Product of the distinct monic irreducible factors.
    pub fn squarefree(&self) -> Poly {
        if self.degree() <= 0 {
            return self.monic();
        }
        let g = self.gcd(&self.derivative());
        self.divrem(&g).0.monic()
    }

    pub fn eval(&self, x: &Q) -> Q {
        let mut acc = Q::zero();
        for c in self.0.iter().rev() {
            acc = acc * x + c;
        }
        acc
    }

    /// Scaled to coprime integer coefficients with positive leading term.
    fn primitive_ints(&self) -> Vec<BigInt> {
        let mut l = BigInt::one();
        for c in &self.0 {
            l = l.lcm(c.denom());
        }
        let ints: Vec<BigInt> = self.0.iter().map(|c| (c * Q::from_integer(l.clone())).to_integer()).collect();
        let mut g = BigInt::zero();
        for c in &ints {
            g = g.gcd(c);
        }
        let sgn = if ints.last().is_some_and(|c| c.is_negative()) { -BigInt::one() } else { BigInt::one() };
        ints.into_iter().map(|c| c / &g * &sgn).collect()
    }

    /// Distinct rational roots; `None` when divisor enumeration would be too large.
    pub fn rational_roots(&self) -> Option<Vec<Q>> {
        if self.degree() < 1 {
            return Some(vec![]);
        }
        let mut p = self.clone();
        let mut roots = Vec::new();
        while p.0.first().is_some_and(|c| c.is_zero()) {
            if !roots.contains(&Q::zero()) {
                roots.push(Q::zero());
            }
            p = Poly(p.0[1..].to_vec());
        }
        if p.degree() < 1 {
            return Some(roots);
        }
        let ints = p.primitive_ints();
        let a0 = divisors(ints.first()?)?;
        let an = divisors(ints.last()?)?;
        for n in &a0 {
            for d in &an {
                for s in [1, -1] {
                    let r = Q::new(BigInt::from(s * n), BigInt::from(*d));
                    if p.eval(&r).is_zero() && !roots.contains(&r) {
                        roots.push(r);
                    }
                }
            }
        }
        roots.sort();
        Some(roots)
    }

    /// A monic quadratic factor, found by interpolation through divisor values.
    fn quadratic_factor(&self) -> Option<Option<Poly>> {
        let ints = self.primitive_ints();
        let f = Poly::new(ints.iter().map(|c| Q::from_integer(c.clone())).collect());
        let pts = [q(0), q(1), q(-1)];
        let vals: Vec<BigInt> = pts.iter().map(|x| f.eval(x).to_integer()).collect();
        if vals.iter().any(|v| v.is_zero()) {
            return Some(None);
        }
        let lead_divs = divisors(ints.last()?)?;
        let divs: Vec<Vec<i64>> = vals.iter().map(divisors).collect::<Option<_>>()?;
        let signed = |ds: &Vec<i64>| ds.iter().flat_map(|&d| [d, -d]).collect::<Vec<_>>();
        let (d0, d1, d2) = (signed(&divs[0]), signed(&divs[1]), signed(&divs[2]));
        for &u in &lead_divs {
            for &g0 in &d0 {
                for &g1 in &d1 {
                    for &g2 in &d2 {
                        // g(x) = u x^2 + b x + c with g(0)=g0, g(1)=g1, g(-1)=g2
                        let c = g0;
                        if g1 + g2 - 2 * c != 2 * u {
                            continue;
                        }
                        if (g1 - g2) % 2 != 0 {
                            continue;
                        }
                        let b = (g1 - g2) / 2;
                        let g = Poly::from_ints(&[c, b, u]);
                        if f.divrem(&g).1.is_zero() {
                            return Some(Some(g.monic()));
                        }
                    }
                }
            }
        }
        Some(None)
    }

    /// Monic irreducible factors of the squarefree part, and whether the
    /// factorisation is certified complete.
    pub fn factor_squarefree(&self) -> (Vec<Poly>, bool) {
        let mut p = self.squarefree();
        if p.degree() <= 0 {
            return (vec![], true);
        }
        let mut out = Vec::new();
        let Some(roots) = p.rational_roots() else {
            return (vec![p], false);
        };
        for r in roots {
            let lin = Poly::new(vec![-r, Q::one()]);
            p = p.divrem(&lin).0;
            out.push(lin);
        }
        let mut complete = true;
        let mut stack = vec![p];
        while let Some(f) = stack.pop() {
            let d = f.degree();
            if d <= 0 {
                continue;
            }
            if d <= 3 {
                out.push(f.monic());
                continue;
            }
            match f.quadratic_factor() {
                Some(Some(g)) => {
                    let rest = f.divrem(&g).0;
                    out.push(g);
                    stack.push(rest);
                }
                Some(None) => {
                    if d > 5 {
                        complete = false;
                    }
                    out.push(f.monic());
                }
                None => {
                    complete = false;
                    out.push(f.monic());
                }
            }
        }
        out.sort_by(|a, b| a.degree().cmp(&b.degree()).then_with(|| a.0.cmp(&b.0)));
        (out, complete)
    }

    pub fn to_strings(&self) -> Vec<String> {
        self.0.iter().map(crate::linalg::fmt_q).collect()
    }
}

fn divisors(n: &BigInt) -> Option<Vec<i64>> {
    let n = n.abs().to_i64()?;
    if n == 0 || n > DIVISOR_LIMIT {
        return None;
    }
    let mut out = Vec::new();
    let mut i = 1;
    while i * i <= n {
        if n % i == 0 {
            out.push(i);
            if i != n / i {
                out.push(n / i);
            }
        }
        i += 1;
    }
    out.sort();
    Some(out)
}
