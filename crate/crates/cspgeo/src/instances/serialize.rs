//! Line-oriented text format for instances, plus DIMACS CNF export.
//!
//! Header line: `<ensemble> <n> <m> <k>` where ensemble is one of
//! `coloring`, `sat`, `nae`. Then one constraint per line:
//! - coloring: `u v` (0-based vertex pair);
//! - sat: signed 1-based literals, e.g. `1 -3 4`;
//! - nae: 0-based vertex list.

use super::{Clause, CnfInstance, GraphInstance, HypergraphInstance, Instance, Literal};
use crate::error::{Error, Result};
use std::fmt::Write as _;

pub fn write_instance(instance: &Instance) -> String {
    let mut out = String::new();
    let _ = writeln!(
        out,
        "{} {} {} {}",
        instance.ensemble_name(),
        instance.num_variables(),
        instance.num_constraints(),
        match instance {
            Instance::Coloring(g) => g.k as usize,
            Instance::Sat(f) => f.k,
            Instance::Nae(h) => h.k,
        }
    );
    match instance {
        Instance::Coloring(g) => {
            for &(u, v) in &g.edges {
                let _ = writeln!(out, "{u} {v}");
            }
        }
        Instance::Sat(f) => {
            for clause in &f.clauses {
                let line: Vec<String> = clause
                    .literals
                    .iter()
                    .map(|l| {
                        let signed = (l.var as i64 + 1) * if l.negated { -1 } else { 1 };
                        signed.to_string()
                    })
                    .collect();
                let _ = writeln!(out, "{}", line.join(" "));
            }
        }
        Instance::Nae(h) => {
            for edge in &h.edges {
                let line: Vec<String> = edge.iter().map(|v| v.to_string()).collect();
                let _ = writeln!(out, "{}", line.join(" "));
            }
        }
    }
    out
}

pub fn parse_instance(text: &str) -> Result<Instance> {
    let mut lines = text.lines().filter(|l| !l.trim().is_empty());
    let header = lines
        .next()
        .ok_or_else(|| Error::Parse("empty instance text".into()))?;
    let fields: Vec<&str> = header.split_whitespace().collect();
    if fields.len() != 4 {
        return Err(Error::Parse(format!("bad header {header:?}")));
    }
    let n: usize = parse_num(fields[1])?;
    let m: usize = parse_num(fields[2])?;
    let k: usize = parse_num(fields[3])?;
    let body: Vec<&str> = lines.collect();
    if body.len() != m {
        return Err(Error::Parse(format!(
            "header says {m} constraints, found {}",
            body.len()
        )));
    }
    match fields[0] {
        "coloring" => {
            let mut edges = Vec::with_capacity(m);
            for line in body {
                let vs: Vec<u32> = line
                    .split_whitespace()
                    .map(parse_num::<u32>)
                    .collect::<Result<_>>()?;
                if vs.len() != 2 || vs[0] == vs[1] || vs.iter().any(|&v| v as usize >= n) {
                    return Err(Error::Parse(format!("bad edge line {line:?}")));
                }
                edges.push((vs[0].min(vs[1]), vs[0].max(vs[1])));
            }
            edges.sort_unstable();
            edges.dedup();
            if edges.len() != m {
                return Err(Error::Parse("duplicate edges".into()));
            }
            Ok(Instance::Coloring(GraphInstance { n, k: k as u8, edges }))
        }
        "sat" => {
            let mut clauses = Vec::with_capacity(m);
            for line in body {
                let lits: Vec<i64> = line
                    .split_whitespace()
                    .map(parse_num::<i64>)
                    .collect::<Result<_>>()?;
                if lits.len() != k {
                    return Err(Error::Parse(format!("clause width != {k}: {line:?}")));
                }
                let literals: Vec<Literal> = lits
                    .iter()
                    .map(|&s| {
                        let var = s.unsigned_abs() as u32 - 1;
                        if s == 0 || var as usize >= n {
                            return Err(Error::Parse(format!("bad literal {s}")));
                        }
                        Ok(Literal { var, negated: s < 0 })
                    })
                    .collect::<Result<_>>()?;
                clauses.push(Clause::new(literals));
            }
            Ok(Instance::Sat(CnfInstance { n, k, clauses }))
        }
        "nae" => {
            let mut edges = Vec::with_capacity(m);
            for line in body {
                let mut vs: Vec<u32> = line
                    .split_whitespace()
                    .map(parse_num::<u32>)
                    .collect::<Result<_>>()?;
                vs.sort_unstable();
                if vs.len() != k || vs.windows(2).any(|w| w[0] == w[1]) {
                    return Err(Error::Parse(format!("bad hyperedge {line:?}")));
                }
                if vs.iter().any(|&v| v as usize >= n) {
                    return Err(Error::Parse(format!("vertex out of range in {line:?}")));
                }
                edges.push(vs);
            }
            edges.sort_unstable();
            Ok(Instance::Nae(HypergraphInstance { n, k, edges }))
        }
        other => Err(Error::Parse(format!("unknown ensemble {other:?}"))),
    }
}

fn parse_num<T: std::str::FromStr>(s: &str) -> Result<T> {
    s.parse()
        .map_err(|_| Error::Parse(format!("bad number {s:?}")))
}

/// DIMACS CNF form: `p cnf n m` then zero-terminated clause lines.
pub fn to_dimacs(f: &CnfInstance) -> String {
    let mut out = format!("p cnf {} {}\n", f.n, f.clauses.len());
    for clause in &f.clauses {
        for l in &clause.literals {
            let signed = (l.var as i64 + 1) * if l.negated { -1 } else { 1 };
            let _ = write!(out, "{signed} ");
        }
        out.push_str("0\n");
    }
    out
}
