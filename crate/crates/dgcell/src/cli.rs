//! Command dispatch and report rendering shared by the binary and the C ABI.

use serde::Serialize;
use serde_json::{json, Value};
use sha2::{Digest, Sha256};
use thiserror::Error;

use crate::bimodule::CatA;
use crate::cells::{
    bounded_leq_gen, cell_rep, enumerate_cells, max_ideal, resolve_cell, verify_classification, Bounded, OrderKind, Orders, Side,
};
use crate::commutative::{maximal_dg_ideals, CommError};
use crate::homotopy::{Mode, SummandVerdict};
use crate::input::{AlgebraInput, InputError, InputMode};

pub const SCHEMA_VERSION: u32 = 1;

/// Process exit codes.
pub const EXIT_OK: i32 = 0;
pub const EXIT_CONTRADICTION: i32 = 1;
pub const EXIT_INPUT: i32 = 2;

/// Cell id used for the single cell in commutative mode.
pub const COMMUTATIVE_CELL: &str = "R";

#[derive(Debug, Error)]
pub enum CliError {
    #[error(transparent)]
    Input(#[from] InputError),
    #[error(transparent)]
    Cell(#[from] crate::cells::CellError),
    #[error("unknown generator `{0}`")]
    UnknownGenerator(String),
    #[error("ideal index {0} out of range ({1} ideals)")]
    IdealIndex(usize, usize),
    #[error("{0}")]
    Unsupported(String),
    #[error(transparent)]
    Commutative(#[from] CommError),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Command {
    Validate,
    Cells { depth: usize, weak_only: bool },
    MaxSpec { cell: String },
    CellRep { cell: String, ideal: usize },
    Order { kind: OrderKind, side: Side, lhs: String, rhs: String, depth: usize },
    Verify { depth: usize },
}

impl Command {
    pub fn name(&self) -> &'static str {
        match self {
            Command::Validate => "validate",
            Command::Cells { .. } => "cells",
            Command::MaxSpec { .. } => "maxspec",
            Command::CellRep { .. } => "cellrep",
            Command::Order { .. } => "order",
            Command::Verify { .. } => "verify",
        }
    }

    fn args(&self) -> Value {
        match self {
            Command::Validate => json!({}),
            Command::Cells { depth, weak_only } => json!({ "depth": depth, "weak_only": weak_only }),
            Command::MaxSpec { cell } => json!({ "cell": cell }),
            Command::CellRep { cell, ideal } => json!({ "cell": cell, "ideal": ideal }),
            Command::Order { kind, side, lhs, rhs, depth } => {
                json!({ "kind": kind, "side": side, "lhs": lhs, "rhs": rhs, "depth": depth })
            }
            Command::Verify { depth } => json!({ "depth": depth }),
        }
    }
}

#[derive(Clone, Debug, Serialize, serde::Deserialize, PartialEq)]
pub struct AlgebraInfo {
    pub fingerprint: String,
    pub dim: usize,
    pub labels: Vec<String>,
    pub mode: String,
}

#[derive(Clone, Debug, Serialize, serde::Deserialize, PartialEq)]
pub struct Report {
    pub schema_version: u32,
    pub command: String,
    pub args: Value,
    pub algebra: AlgebraInfo,
    pub seed: u64,
    pub result: Value,
    /// Disagreements between direct computation and closed forms.
    pub consistency_flags: Vec<String>,
}

impl Report {
    pub fn exit_code(&self) -> i32 {
        if self.consistency_flags.is_empty() {
            EXIT_OK
        } else {
            EXIT_CONTRADICTION
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serialises")
    }

    pub fn to_text(&self) -> String {
        let mut out = format!("{} (algebra {}, dim {})\n", self.command, &self.algebra.fingerprint[..12], self.algebra.dim);
        render_text(&self.result, 0, &mut out);
        if self.consistency_flags.is_empty() {
            out.push_str("consistency: ok\n");
        } else {
            out.push_str("consistency: FAILED\n");
            for f in &self.consistency_flags {
                out.push_str(&format!("  - {f}\n"));
            }
        }
        out
    }
}

fn render_text(v: &Value, indent: usize, out: &mut String) {
    let pad = "  ".repeat(indent);
    match v {
        Value::Object(m) => {
            for (k, x) in m {
                if x.as_object().is_some_and(|o| !o.is_empty()) || (x.is_array() && x.as_array().unwrap().iter().any(|e| e.is_object())) {
                    out.push_str(&format!("{pad}{k}:\n"));
                    render_text(x, indent + 1, out);
                } else {
                    out.push_str(&format!("{pad}{k}: {}\n", compact(x)));
                }
            }
        }
        Value::Array(a) => {
            for x in a {
                if x.is_object() {
                    out.push_str(&format!("{pad}-\n"));
                    render_text(x, indent + 1, out);
                } else {
                    out.push_str(&format!("{pad}- {}\n", compact(x)));
                }
            }
        }
        other => out.push_str(&format!("{pad}{}\n", compact(other))),
    }
}

fn compact(v: &Value) -> String {
    match v {
        Value::String(s) => s.clone(),
        other => other.to_string(),
    }
}

pub fn fingerprint(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}

fn info(input: &AlgebraInput, bytes: &[u8]) -> AlgebraInfo {
    AlgebraInfo {
        fingerprint: fingerprint(bytes),
        dim: input.algebra.dim(),
        labels: input.algebra.labels.clone(),
        mode: match input.mode {
            InputMode::Bimodules => "bimodules".into(),
            InputMode::Commutative => "commutative".into(),
        },
    }
}

/// Report for an input that failed validation.
pub fn validation_failure(bytes: &[u8], err: &InputError) -> Report {
    let violations: Vec<Value> = match err {
        InputError::Invalid(r) => r.0.violations.iter().map(|v| json!({ "kind": v.kind, "detail": v.detail })).collect(),
        other => vec![json!({ "kind": "input", "detail": other.to_string() })],
    };
    Report {
        schema_version: SCHEMA_VERSION,
        command: "validate".into(),
        args: json!({}),
        algebra: AlgebraInfo { fingerprint: fingerprint(bytes), dim: 0, labels: vec![], mode: "unknown".into() },
        seed: 0,
        result: json!({ "valid": false, "violations": violations }),
        consistency_flags: vec![],
    }
}

fn to_value<T: Serialize>(t: &T) -> Value {
    serde_json::to_value(t).expect("serialisable result")
}

fn verdict_value(v: &SummandVerdict) -> Value {
    match v {
        SummandVerdict::True => json!({ "verdict": "true" }),
        SummandVerdict::False => json!({ "verdict": "false" }),
        SummandVerdict::Inconclusive(r) => json!({ "verdict": "inconclusive", "reason": r }),
    }
}

pub fn run(input: &AlgebraInput, bytes: &[u8], cmd: &Command, seed: u64) -> Result<Report, CliError> {
    let (result, flags) = match input.mode {
        InputMode::Bimodules => run_bimodules(input, cmd, seed)?,
        InputMode::Commutative => run_commutative(input, cmd, seed)?,
    };
    Ok(Report {
        schema_version: SCHEMA_VERSION,
        command: cmd.name().into(),
        args: cmd.args(),
        algebra: info(input, bytes),
        seed,
        result,
        consistency_flags: flags,
    })
}

fn run_bimodules(input: &AlgebraInput, cmd: &Command, seed: u64) -> Result<(Value, Vec<String>), CliError> {
    let alg = &input.algebra;
    if let Command::Validate = cmd {
        let blocks = alg.blocks();
        let cat = CatA::new(alg.clone(), seed);
        let gens: Vec<String> = cat.generators().into_iter().map(|g| cat.name(g)).collect();
        let result = json!({
            "valid": true,
            "violations": [],
            "degrees": alg.degrees,
            "blocks": blocks.blocks,
            "semisimple_blocks": blocks.semisimple,
            "idempotent_classes": cat.classes.class_of,
            "generators": gens,
        });
        return Ok((result, vec![]));
    }
    let cat = CatA::new(alg.clone(), seed);
    match cmd {
        Command::Validate => unreachable!(),
        Command::Cells { depth, weak_only } => {
            let s = enumerate_cells(&cat, if *weak_only { None } else { Some(*depth) });
            let flags = s.contradictions.clone();
            Ok((to_value(&s), flags))
        }
        Command::MaxSpec { cell } => {
            let orders = Orders::new(&cat);
            let c = resolve_cell(&cat, &orders, cell)?;
            let ideal = max_ideal(&cat, &c);
            let mut flags = Vec::new();
            if ideal.certificate.closed_form == Some(false) {
                flags.push(format!("cell {}: ideal slices differ from the closed form", c.id));
            }
            Ok((json!({ "cell": c.id, "ideals": [to_value(&ideal)] }), flags))
        }
        Command::CellRep { cell, ideal } => {
            let orders = Orders::new(&cat);
            let c = resolve_cell(&cat, &orders, cell)?;
            if *ideal != 0 {
                return Err(CliError::IdealIndex(*ideal, 1));
            }
            let i = max_ideal(&cat, &c);
            let rep = cell_rep(&cat, &i, 0);
            let flags = rep.contradictions.clone();
            Ok((to_value(&rep), flags))
        }
        Command::Order { kind, side, lhs, rhs, depth } => {
            let f = cat.parse_gen(lhs).map_err(|_| CliError::UnknownGenerator(lhs.clone()))?;
            let g = cat.parse_gen(rhs).map_err(|_| CliError::UnknownGenerator(rhs.clone()))?;
            let verdict = match kind {
                OrderKind::Weak => {
                    let orders = Orders::new(&cat);
                    if orders.index(f).is_none() {
                        return Err(CliError::UnknownGenerator(lhs.clone()));
                    }
                    if orders.index(g).is_none() {
                        return Err(CliError::UnknownGenerator(rhs.clone()));
                    }
                    verdict_value(&orders.weak_leq(f, g, *side))
                }
                OrderKind::Strong | OrderKind::Tri => {
                    let mode = if *kind == OrderKind::Tri { Mode::Homotopy } else { Mode::Dg };
                    let b: Bounded = bounded_leq_gen(&cat, f, g, *side, mode, *depth);
                    to_value(&b)
                }
            };
            Ok((json!({ "lhs": cat.name(f), "rhs": cat.name(g), "result": verdict }), vec![]))
        }
        Command::Verify { depth } => {
            let r = verify_classification(&cat, *depth);
            let flags = r.assertions.iter().filter(|a| !a.passed).map(|a| format!("{}: {}", a.name, a.detail)).collect();
            Ok((to_value(&r), flags))
        }
    }
}

fn run_commutative(input: &AlgebraInput, cmd: &Command, seed: u64) -> Result<(Value, Vec<String>), CliError> {
    let alg = &input.algebra;
    let check_cell = |cell: &str| -> Result<(), CliError> {
        if cell == COMMUTATIVE_CELL {
            Ok(())
        } else {
            Err(crate::cells::CellError::UnknownCell(cell.to_string()).into())
        }
    };
    match cmd {
        Command::Validate => {
            let commutative = alg.is_commutative() || alg.center().dim() == alg.dim();
            Ok((json!({ "valid": true, "violations": [], "degrees": alg.degrees, "commutative": commutative }), vec![]))
        }
        Command::Cells { .. } => {
            maximal_dg_ideals(alg, &input.factorizations, seed)?;
            Ok((json!({ "cells": [{ "id": COMMUTATIVE_CELL, "members": [COMMUTATIVE_CELL] }] }), vec![]))
        }
        Command::MaxSpec { cell } => {
            check_cell(cell)?;
            let r = maximal_dg_ideals(alg, &input.factorizations, seed)?;
            Ok((json!({ "cell": cell, "report": to_value(&r) }), vec![]))
        }
        Command::CellRep { cell, ideal } => {
            check_cell(cell)?;
            let r = maximal_dg_ideals(alg, &input.factorizations, seed)?;
            let i = r.ideals.get(*ideal).ok_or(CliError::IdealIndex(*ideal, r.ideals.len()))?;
            Ok((
                json!({
                    "cell": cell,
                    "ideal": ideal,
                    "quotient_dim": i.quotient_dim,
                    "quotient_dims": i.quotient_dims,
                    "acyclic": i.acyclic,
                }),
                vec![],
            ))
        }
        Command::Order { .. } => Err(CliError::Unsupported("order relations need the bimodule mode".into())),
        Command::Verify { .. } => {
            let r = maximal_dg_ideals(alg, &input.factorizations, seed)?;
            let mut flags = Vec::new();
            if !r.factorization_complete {
                flags.push("factorisation of the generator's minimal polynomial is not certified".to_string());
            }
            Ok((json!({ "maximal_ideals": r.ideals.len(), "report": to_value(&r) }), flags))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::input::parse_str;

    const A2: &str = "form = \"quiver\"\nvertices = [\"1\", \"2\"]\ntruncation = 1\n[[arrows]]\nname = \"a\"\nsource = \"1\"\ntarget = \"2\"\n";

    #[test]
    fn reports_are_deterministic() {
        let input = parse_str(A2).unwrap();
        let cmd = Command::Cells { depth: 2, weak_only: false };
        let a = run(&input, A2.as_bytes(), &cmd, 0).unwrap();
        let b = run(&input, A2.as_bytes(), &cmd, 0).unwrap();
        assert_eq!(a.to_json(), b.to_json());
        assert_eq!(a.exit_code(), EXIT_OK);
        assert_eq!(a.algebra.fingerprint, fingerprint(A2.as_bytes()));
    }

    #[test]
    fn flags_set_the_contradiction_exit_code() {
        let input = parse_str(A2).unwrap();
        let mut r = run(&input, A2.as_bytes(), &Command::Validate, 0).unwrap();
        r.consistency_flags.push("synthetic".into());
        assert_eq!(r.exit_code(), EXIT_CONTRADICTION);
        assert!(r.to_text().contains("consistency: FAILED"));
    }

    #[test]
    fn unknown_ids_are_errors() {
        let input = parse_str(A2).unwrap();
        assert!(matches!(
            run(&input, b"", &Command::MaxSpec { cell: "L9:zz".into() }, 0),
            Err(CliError::Cell(crate::cells::CellError::UnknownCell(_)))
        ));
        let order = Command::Order { kind: OrderKind::Weak, side: Side::L, lhs: "P:e9,e1".into(), rhs: "Id:1".into(), depth: 1 };
        assert!(matches!(run(&input, b"", &order, 0), Err(CliError::UnknownGenerator(_))));
    }

    #[test]
    fn invalid_input_report() {
        let err = parse_str("form = \"table\"\nbasis = [\"1\", \"x\"]\ndegrees = [0, 0]\nunit = \"1\"\n[mult]\n\"1*1\" = \"1\"\n\"1*x\" = \"x\"\n\"x*1\" = \"2*x\"\n").unwrap_err();
        let r = validation_failure(b"x", &err);
        assert_eq!(r.result["valid"], false);
        assert!(!r.result["violations"].as_array().unwrap().is_empty());
    }
}
