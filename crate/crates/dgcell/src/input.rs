//! Algebra input files (TOML): structure constants (`form = "table"`) or a
//! quiver with relations (`form = "quiver"`).
//!
//! Scalars are integers or strings `"p/q"`. Elements are written as linear
//! combinations such as `"2*x - 1/2*e1"`; in quiver form a term may be a
//! path `"b*a"` (first `a`, then `b`).

use std::collections::BTreeMap;
use std::fmt;

use num_traits::{One, Zero};
use serde::Deserialize;
use thiserror::Error;

use crate::algebra::{DgAlgebra, Idempotent, ValidationReport};
use crate::linalg::{parse_q, unit_vec, zero_vec, Mat, Subspace, Q};
use crate::poly::Poly;

/// Largest truncation bound accepted for quivers.
pub const MAX_TRUNCATION: usize = 16;
pub const DEFAULT_TRUNCATION: usize = 8;

#[derive(Debug, Error)]
pub enum InputError {
    #[error("malformed input: {0}")]
    Syntax(String),
    #[error("schema violation: {0}")]
    Schema(String),
    #[error("quiver algebra is infinite-dimensional or longer than the truncation bound {0}")]
    InfiniteDimensional(usize),
    #[error("algebra fails validation:\n{0}")]
    Invalid(Report),
}

/// Itemised validation failure.
#[derive(Debug)]
pub struct Report(pub ValidationReport);

impl fmt::Display for Report {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for v in &self.0.violations {
            writeln!(f, "  - {}: {}", v.kind, v.detail)?;
        }
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum InputMode {
    #[default]
    Bimodules,
    Commutative,
}

#[derive(Clone, Debug, Deserialize)]
#[serde(untagged)]
enum Scalar {
    Int(i64),
    Str(String),
}

impl Scalar {
    fn value(&self) -> Result<Q, InputError> {
        match self {
            Scalar::Int(n) => Ok(Q::from_integer((*n).into())),
            Scalar::Str(s) => parse_q(s).ok_or_else(|| InputError::Schema(format!("bad scalar `{s}`"))),
        }
    }
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct IdemSpec {
    label: String,
    value: String,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct ArrowSpec {
    name: String,
    source: String,
    target: String,
    #[serde(default)]
    degree: i64,
    #[serde(default)]
    diff: Option<String>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawSpec {
    #[serde(default)]
    field: Option<String>,
    form: String,
    #[serde(default)]
    mode: InputMode,
    #[serde(default)]
    factorizations: Vec<Vec<Scalar>>,
    // table form
    #[serde(default)]
    basis: Vec<String>,
    #[serde(default)]
    degrees: Vec<i64>,
    #[serde(default)]
    unit: Option<String>,
    #[serde(default)]
    mult: BTreeMap<String, String>,
    #[serde(default)]
    diff: BTreeMap<String, String>,
    #[serde(default)]
    idempotents: Vec<IdemSpec>,
    // quiver form
    #[serde(default)]
    vertices: Vec<String>,
    #[serde(default)]
    arrows: Vec<ArrowSpec>,
    #[serde(default)]
    relations: Vec<String>,
    #[serde(default)]
    truncation: Option<usize>,
}

/// A parsed and validated input file.
#[derive(Clone, Debug)]
pub struct AlgebraInput {
    pub algebra: DgAlgebra,
    pub mode: InputMode,
    pub factorizations: Vec<Poly>,
}

fn schema(msg: impl Into<String>) -> InputError {
    InputError::Schema(msg.into())
}

/// Split `"2*x - 1/2*b*a"` into signed terms of `*`-separated factors.
fn terms(expr: &str) -> Result<Vec<(Q, Vec<String>)>, InputError> {
    let s: String = expr.chars().filter(|c| !c.is_whitespace()).collect();
    if s.is_empty() {
        return Err(schema("empty expression"));
    }
    let mut out = Vec::new();
    let mut cur = String::new();
    let mut sign = Q::one();
    let mut flush = |cur: &mut String, sign: &Q| -> Result<(), InputError> {
        if cur.is_empty() {
            return Err(schema(format!("dangling sign in `{expr}`")));
        }
        let factors: Vec<String> = cur.split('*').map(str::to_string).collect();
        if factors.iter().any(String::is_empty) {
            return Err(schema(format!("empty factor in `{expr}`")));
        }
        out.push((sign.clone(), factors));
        cur.clear();
        Ok(())
    };
    for (i, ch) in s.chars().enumerate() {
        if (ch == '+' || ch == '-') && i > 0 {
            flush(&mut cur, &sign)?;
            sign = if ch == '-' { -Q::one() } else { Q::one() };
        } else if ch == '-' {
            sign = -Q::one();
        } else if ch == '+' {
        } else {
            cur.push(ch);
        }
    }
    flush(&mut cur, &sign)?;
    Ok(out)
}

/// Separate numeric factors from symbols: a factor naming a symbol is a
/// symbol, otherwise it must be a rational.
fn split_factors(factors: &[String], is_symbol: &dyn Fn(&str) -> bool) -> Result<(Q, Vec<String>), InputError> {
    let mut c = Q::one();
    let mut syms = Vec::new();
    for f in factors {
        if is_symbol(f) {
            syms.push(f.clone());
        } else if let Some(v) = parse_q(f) {
            c *= v;
        } else {
            return Err(schema(format!("unknown symbol `{f}`")));
        }
    }
    Ok((c, syms))
}

fn parse_table_expr(expr: &str, labels: &[String]) -> Result<Vec<Q>, InputError> {
    let n = labels.len();
    let mut v = zero_vec(n);
    for (sign, factors) in terms(expr)? {
        let (c, mut syms) = split_factors(&factors, &|f| labels.iter().any(|l| l == f))?;
        // a label such as "1" also reads as a scalar; keep only the last one as a symbol
        let mut c = c;
        while syms.len() > 1 {
            match parse_q(&syms[0]) {
                Some(v) => {
                    c *= v;
                    syms.remove(0);
                }
                None => break,
            }
        }
        match syms.as_slice() {
            [] if c.is_zero() => {}
            [] => return Err(schema(format!("constant term in `{expr}` needs a basis element"))),
            [s] => {
                let i = labels.iter().position(|l| l == s).unwrap();
                v[i] += sign * c;
            }
            _ => return Err(schema(format!("products are not allowed in `{expr}`"))),
        }
    }
    Ok(v)
}

pub fn parse_str(text: &str) -> Result<AlgebraInput, InputError> {
    let raw: RawSpec = toml::from_str(text).map_err(|e| InputError::Syntax(e.to_string()))?;
    if let Some(f) = &raw.field {
        if f != "Q" {
            return Err(schema(format!("unsupported field `{f}`; only Q")));
        }
    }
    let algebra = match raw.form.as_str() {
        "table" => table_algebra(&raw)?,
        "quiver" => quiver_algebra(&raw)?,
        other => return Err(schema(format!("unknown form `{other}`"))),
    };
    let report = algebra.validate();
    if !report.ok() {
        return Err(InputError::Invalid(Report(report)));
    }
    let factorizations = raw
        .factorizations
        .iter()
        .map(|cs| Ok(Poly::new(cs.iter().map(Scalar::value).collect::<Result<_, _>>()?)))
        .collect::<Result<Vec<_>, InputError>>()?;
    Ok(AlgebraInput { algebra, mode: raw.mode, factorizations })
}

pub fn parse_file(path: &std::path::Path) -> Result<(AlgebraInput, Vec<u8>), InputError> {
    let bytes = std::fs::read(path).map_err(|e| InputError::Syntax(format!("{}: {e}", path.display())))?;
    let text = std::str::from_utf8(&bytes).map_err(|e| InputError::Syntax(e.to_string()))?;
    Ok((parse_str(text)?, bytes))
}

fn table_algebra(raw: &RawSpec) -> Result<DgAlgebra, InputError> {
    let labels = raw.basis.clone();
    let n = labels.len();
    if n == 0 {
        return Err(schema("table form needs a nonempty `basis`"));
    }
    if raw.degrees.len() != n {
        return Err(schema(format!("`degrees` has {} entries for {} basis elements", raw.degrees.len(), n)));
    }
    for (i, l) in labels.iter().enumerate() {
        if labels[..i].contains(l) {
            return Err(schema(format!("duplicate basis label `{l}`")));
        }
    }
    let mut mult = vec![vec![zero_vec(n); n]; n];
    for (key, val) in &raw.mult {
        let parts: Vec<&str> = key.split('*').map(str::trim).collect();
        let idx = |s: &str| labels.iter().position(|l| l == s).ok_or_else(|| schema(format!("unknown label `{s}` in mult key `{key}`")));
        let [a, b] = parts.as_slice() else { return Err(schema(format!("mult key `{key}` must be `a*b`"))) };
        mult[idx(a)?][idx(b)?] = parse_table_expr(val, &labels)?;
    }
    let mut diff = Mat::zeros(n, n);
    for (key, val) in &raw.diff {
        let i = labels.iter().position(|l| l == key).ok_or_else(|| schema(format!("unknown label `{key}` in diff")))?;
        diff.set_col(i, &parse_table_expr(val, &labels)?);
    }
    let unit = parse_table_expr(raw.unit.as_deref().ok_or_else(|| schema("table form needs `unit`"))?, &labels)?;
    let idempotents = if raw.idempotents.is_empty() {
        vec![Idempotent { label: "1".into(), vector: unit.clone() }]
    } else {
        raw.idempotents
            .iter()
            .map(|e| Ok(Idempotent { label: e.label.clone(), vector: parse_table_expr(&e.value, &labels)? }))
            .collect::<Result<_, InputError>>()?
    };
    Ok(DgAlgebra { labels, degrees: raw.degrees.clone(), mult, unit, idempotents, diff })
}

/// A path: vertex or arrow sequence in composition order (last applied first).
#[derive(Clone, Debug, PartialEq, Eq)]
enum Path {
    Vertex(usize),
    Arrows(Vec<usize>),
}

struct Quiver {
    vertices: Vec<String>,
    arrows: Vec<(String, usize, usize, i64)>,
}

impl Quiver {
    fn source(&self, p: &Path) -> usize {
        match p {
            Path::Vertex(v) => *v,
            Path::Arrows(a) => self.arrows[*a.last().unwrap()].1,
        }
    }

    fn target(&self, p: &Path) -> usize {
        match p {
            Path::Vertex(v) => *v,
            Path::Arrows(a) => self.arrows[a[0]].2,
        }
    }

    fn len(p: &Path) -> usize {
        match p {
            Path::Vertex(_) => 0,
            Path::Arrows(a) => a.len(),
        }
    }

    fn degree(&self, p: &Path) -> i64 {
        match p {
            Path::Vertex(_) => 0,
            Path::Arrows(a) => a.iter().map(|&i| self.arrows[i].3).sum(),
        }
    }

    /// `p * q`: first `q`, then `p`.
    fn compose(&self, p: &Path, q: &Path) -> Option<Path> {
        if self.source(p) != self.target(q) {
            return None;
        }
        Some(match (p, q) {
            (Path::Vertex(_), _) => q.clone(),
            (_, Path::Vertex(_)) => p.clone(),
            (Path::Arrows(a), Path::Arrows(b)) => Path::Arrows(a.iter().chain(b).copied().collect()),
        })
    }

    fn name(&self, p: &Path) -> String {
        match p {
            Path::Vertex(v) => format!("e{}", self.vertices[*v]),
            Path::Arrows(a) => a.iter().map(|&i| self.arrows[i].0.clone()).collect::<Vec<_>>().join("*"),
        }
    }

    /// All paths up to length `max`, shortest first.
    fn paths(&self, max: usize) -> Vec<Path> {
        let mut out: Vec<Path> = (0..self.vertices.len()).map(Path::Vertex).collect();
        let mut layer: Vec<Vec<usize>> = (0..self.arrows.len()).map(|i| vec![i]).collect();
        for _ in 1..=max {
            out.extend(layer.iter().cloned().map(Path::Arrows));
            let mut next = Vec::new();
            for p in &layer {
                for (i, a) in self.arrows.iter().enumerate() {
                    // prepend arrow i after p
                    if a.1 == self.arrows[p[0]].2 {
                        let mut q = vec![i];
                        q.extend(p);
                        next.push(q);
                    }
                }
            }
            layer = next;
        }
        out
    }
}

fn quiver_algebra(raw: &RawSpec) -> Result<DgAlgebra, InputError> {
    if raw.vertices.is_empty() {
        return Err(schema("quiver form needs `vertices`"));
    }
    let vidx = |s: &str| raw.vertices.iter().position(|v| v == s).ok_or_else(|| schema(format!("unknown vertex `{s}`")));
    let mut arrows = Vec::new();
    for a in &raw.arrows {
        if raw.arrows.iter().filter(|b| b.name == a.name).count() > 1 || raw.vertices.iter().any(|v| format!("e{v}") == a.name) {
            return Err(schema(format!("arrow name `{}` is not unique", a.name)));
        }
        arrows.push((a.name.clone(), vidx(&a.source)?, vidx(&a.target)?, a.degree));
    }
    let quiver = Quiver { vertices: raw.vertices.clone(), arrows };
    let bound = raw.truncation.unwrap_or(DEFAULT_TRUNCATION);
    if bound > MAX_TRUNCATION {
        return Err(schema(format!("truncation {bound} exceeds {MAX_TRUNCATION}")));
    }
    // work with all paths up to length bound + 1
    let all = quiver.paths(bound + 1);
    let np = all.len();
    let index = |p: &Path| all.iter().position(|q| q == p);
    let names: Vec<String> = all.iter().map(|p| quiver.name(p)).collect();
    let expr = |e: &str| -> Result<Vec<Q>, InputError> {
        let mut v = zero_vec(np);
        for (sign, factors) in terms(e)? {
            let is_sym = |f: &str| names.iter().any(|n| n == f);
            let (c, syms) = split_factors(&factors, &is_sym)?;
            if syms.is_empty() {
                if c.is_zero() {
                    continue;
                }
                return Err(schema(format!("constant term in `{e}` needs a path")));
            }
            let mut p: Option<Path> = Some(all[names.iter().position(|n| *n == syms[0]).unwrap()].clone());
            for s in &syms[1..] {
                let q = &all[names.iter().position(|n| n == s).unwrap()];
                p = p.and_then(|p| quiver.compose(&p, q));
            }
            if let Some(p) = p {
                if Quiver::len(&p) <= bound + 1 {
                    let i = index(&p).unwrap();
                    v[i] += sign * c;
                }
            }
        }
        Ok(v)
    };
    let mul_vec = |x: &[Q], y: &[Q]| -> Vec<Q> {
        let mut out = zero_vec(np);
        for (i, a) in x.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in y.iter().enumerate() {
                if b.is_zero() {
                    continue;
                }
                if let Some(p) = quiver.compose(&all[i], &all[j]) {
                    if let Some(k) = index(&p) {
                        out[k] += a * b;
                    }
                }
            }
        }
        out
    };
    // relation ideal, truncated above length bound + 1
    let mut gens: Vec<Vec<Q>> = Vec::new();
    for r in &raw.relations {
        let rv = expr(r)?;
        let degs: Vec<i64> = rv.iter().enumerate().filter(|(_, c)| !c.is_zero()).map(|(i, _)| quiver.degree(&all[i])).collect();
        if degs.windows(2).any(|w| w[0] != w[1]) {
            return Err(schema(format!("relation `{r}` is not homogeneous")));
        }
        for p in &all {
            for q in &all {
                let pv = unit_vec(np, index(p).unwrap());
                let qv = unit_vec(np, index(q).unwrap());
                let g = mul_vec(&mul_vec(&pv, &rv), &qv);
                if g.iter().any(|c| !c.is_zero()) {
                    gens.push(g);
                }
            }
        }
    }
    let ideal = Subspace::span(np, &gens);
    // paths of length bound + 1 must already vanish
    for (i, p) in all.iter().enumerate() {
        if Quiver::len(p) == bound + 1 && !ideal.contains(&unit_vec(np, i)) {
            return Err(InputError::InfiniteDimensional(bound));
        }
    }
    let mut kept: Vec<usize> = Vec::new();
    let mut span = ideal.clone();
    for i in 0..np {
        let v = unit_vec(np, i);
        if !span.contains(&v) {
            span = span.add_vecs(&[v]);
            kept.push(i);
        }
    }
    let n = kept.len();
    let mut change_cols: Vec<Vec<Q>> = kept.iter().map(|&i| unit_vec(np, i)).collect();
    change_cols.extend(ideal.basis().iter().cloned());
    let inv = Mat::from_cols(&change_cols, np).inverse().expect("complement of the relation ideal");
    let reduce = |v: &[Q]| -> Vec<Q> { inv.apply(v)[..n].to_vec() };
    let mult: Vec<Vec<Vec<Q>>> = kept
        .iter()
        .map(|&i| kept.iter().map(|&j| reduce(&mul_vec(&unit_vec(np, i), &unit_vec(np, j)))).collect())
        .collect();
    // differential on arrows, extended by the Leibniz rule with Koszul signs
    let mut arrow_d: Vec<Vec<Q>> = vec![zero_vec(np); quiver.arrows.len()];
    for (i, a) in raw.arrows.iter().enumerate() {
        if let Some(d) = &a.diff {
            arrow_d[i] = expr(d)?;
        }
    }
    let d_path = |p: &Path| -> Vec<Q> {
        let Path::Arrows(arr) = p else { return zero_vec(np) };
        let mut out = zero_vec(np);
        for k in 0..arr.len() {
            let left = if k == 0 { None } else { Some(Path::Arrows(arr[..k].to_vec())) };
            let right = if k + 1 == arr.len() { None } else { Some(Path::Arrows(arr[k + 1..].to_vec())) };
            let sign_deg: i64 = left.as_ref().map_or(0, |l| quiver.degree(l));
            let mut term = arrow_d[arr[k]].clone();
            if let Some(l) = &left {
                term = mul_vec(&unit_vec(np, index(l).unwrap()), &term);
            }
            if let Some(r) = &right {
                term = mul_vec(&term, &unit_vec(np, index(r).unwrap()));
            }
            let s = crate::linalg::sign(sign_deg);
            for (o, t) in out.iter_mut().zip(&term) {
                *o += &s * t;
            }
        }
        out
    };
    let dcols: Vec<Vec<Q>> = kept.iter().map(|&i| reduce(&d_path(&all[i]))).collect();
    let mut unit = zero_vec(np);
    for v in 0..quiver.vertices.len() {
        unit[v] = Q::one();
    }
    let idempotents = (0..quiver.vertices.len())
        .map(|v| Idempotent { label: quiver.name(&Path::Vertex(v)), vector: reduce(&unit_vec(np, v)) })
        .collect();
    Ok(DgAlgebra {
        labels: kept.iter().map(|&i| names[i].clone()).collect(),
        degrees: kept.iter().map(|&i| quiver.degree(&all[i])).collect(),
        mult,
        unit: reduce(&unit),
        idempotents,
        diff: Mat::from_cols(&dcols, n),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    const DUAL: &str = r#"
form = "quiver"
vertices = [""]
relations = ["x*x"]
[[arrows]]
name = "x"
source = ""
target = ""
degree = 0
"#;

    #[test]
    fn quiver_dual_numbers() {
        let a = parse_str(DUAL).unwrap().algebra;
        assert_eq!(a.dim(), 2);
        assert_eq!(a.labels, vec!["e", "x"]);
    }

    #[test]
    fn quiver_acyclic_dual_numbers() {
        let text = r#"
form = "quiver"
vertices = [""]
relations = ["x*x"]
[[arrows]]
name = "x"
source = ""
target = ""
degree = -1
diff = "e"
"#;
        let a = parse_str(text).unwrap().algebra;
        assert_eq!(a.dim(), 2);
        assert_eq!(a.d(&a.basis_vec(1)), a.basis_vec(0));
    }

    #[test]
    fn quiver_a2() {
        let text = r#"
form = "quiver"
vertices = ["1", "2"]
truncation = 1
[[arrows]]
name = "a"
source = "1"
target = "2"
"#;
        let a = parse_str(text).unwrap().algebra;
        assert_eq!(a.dim(), 3);
        assert_eq!(a.idempotents.len(), 2);
        assert_eq!(a.idempotents[0].label, "e1");
    }

    #[test]
    fn infinite_quiver_detected() {
        let text = DUAL.replace("relations = [\"x*x\"]", "relations = []");
        assert!(matches!(parse_str(&text), Err(InputError::InfiniteDimensional(_))));
    }

    #[test]
    fn table_matches_builtin() {
        let text = r#"
field = "Q"
form = "table"
basis = ["1", "x"]
degrees = [0, 0]
unit = "1"
[mult]
"1*1" = "1"
"1*x" = "x"
"x*1" = "x"
[[idempotents]]
label = "e"
value = "1"
"#;
        let a = parse_str(text).unwrap().algebra;
        assert_eq!(a.mult, crate::examples::dual_numbers(0, false).mult);
    }

    #[test]
    fn table_errors_are_itemised() {
        let text = r#"
form = "table"
basis = ["1", "x"]
degrees = [0, 0]
unit = "1"
[mult]
"1*1" = "1"
"1*x" = "x"
"x*1" = "2*x"
"#;
        match parse_str(text) {
            Err(InputError::Invalid(r)) => assert!(!r.0.violations.is_empty()),
            other => panic!("expected validation failure, got {other:?}"),
        }
        assert!(matches!(parse_str("form = \"table\"\nbasis = [\"a\"]\ndegrees = []\nunit = \"a\""), Err(InputError::Schema(_))));
        assert!(matches!(parse_str("form = 3"), Err(InputError::Syntax(_))));
        assert!(matches!(parse_str("form = \"table\"\nbasis = [\"a\"]\ndegrees = [0]\nunit = \"q\""), Err(InputError::Schema(_))));
    }

    #[test]
    fn rational_scalars_and_factorizations() {
        let text = r#"
form = "table"
mode = "commutative"
basis = ["1"]
degrees = [0]
unit = "2/2*1"
factorizations = [["-2", 0, 1]]
[mult]
"1*1" = "1"
"#;
        let s = parse_str(text).unwrap();
        assert_eq!(s.mode, InputMode::Commutative);
        assert_eq!(s.factorizations[0].degree(), 2);
    }
}
