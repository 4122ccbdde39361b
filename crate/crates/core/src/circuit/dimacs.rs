use super::boolean::{BoolGate, BooleanCircuit, GateKind, Wire};
use crate::error::{Error, Result};

/// A CNF formula over variables `1..=nvars`, variable `i` being `w_i`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CnfFormula {
    pub nvars: usize,
    pub clauses: Vec<Vec<i64>>,
}

impl CnfFormula {
    pub fn new(nvars: usize, clauses: Vec<Vec<i64>>) -> Result<Self> {
        for c in &clauses {
            for &lit in c {
                if lit == 0 || lit.unsigned_abs() as usize > nvars {
                    return Err(Error::InvalidCircuit(format!("literal {lit} out of range 1..={nvars}")));
                }
            }
        }
        Ok(CnfFormula { nvars, clauses })
    }

    pub fn parse(text: &str) -> Result<Self> {
        let mut header: Option<(usize, usize)> = None;
        let mut clauses = Vec::new();
        let mut current = Vec::new();
        for (idx, raw) in text.lines().enumerate() {
            let line_no = idx + 1;
            let line = raw.trim();
            if line.is_empty() || line.starts_with('c') {
                continue;
            }
            if line.starts_with('%') {
                break;
            }
            if line.starts_with('p') {
                if header.is_some() {
                    return Err(Error::parse(line_no, "second problem line"));
                }
                let parts: Vec<&str> = line.split_whitespace().collect();
                if parts.len() != 4 || parts[0] != "p" || parts[1] != "cnf" {
                    return Err(Error::parse(line_no, "expected 'p cnf <vars> <clauses>'"));
                }
                let nv = parts[2]
                    .parse()
                    .map_err(|_| Error::parse(line_no, format!("bad variable count '{}'", parts[2])))?;
                let nc = parts[3]
                    .parse()
                    .map_err(|_| Error::parse(line_no, format!("bad clause count '{}'", parts[3])))?;
                header = Some((nv, nc));
                continue;
            }
            let (nvars, _) = header.ok_or_else(|| Error::parse(line_no, "clause before the problem line"))?;
            for tok in line.split_whitespace() {
                let lit: i64 = tok
                    .parse()
                    .map_err(|_| Error::parse(line_no, format!("bad literal '{tok}'")))?;
                if lit == 0 {
                    clauses.push(std::mem::take(&mut current));
                } else if lit.unsigned_abs() as usize > nvars {
                    return Err(Error::parse(line_no, format!("literal {lit} exceeds {nvars} variables")));
                } else {
                    current.push(lit);
                }
            }
        }
        let (nvars, nclauses) = header.ok_or_else(|| Error::parse(0, "missing 'p cnf' line"))?;
        if !current.is_empty() {
            clauses.push(current);
        }
        if clauses.len() != nclauses {
            log::warn!("header declares {nclauses} clauses, found {}", clauses.len());
        }
        Ok(CnfFormula { nvars, clauses })
    }

    /// Direct clause evaluation, `w_1` the lowest bit of `w`.
    pub fn eval(&self, w: u64) -> bool {
        self.clauses.iter().all(|c| {
            c.iter().any(|&lit| {
                let bit = (w >> (lit.unsigned_abs() - 1)) & 1 == 1;
                bit == (lit > 0)
            })
        })
    }

    pub fn to_dimacs(&self) -> String {
        let mut s = format!("p cnf {} {}\n", self.nvars, self.clauses.len());
        for c in &self.clauses {
            for lit in c {
                s.push_str(&format!("{lit} "));
            }
            s.push_str("0\n");
        }
        s
    }

    /// Clause by clause: a FANOUT split for each read of a variable that is
    /// read again later, NOT per negative literal, an OR chain per clause,
    /// and one AND folding the clause into the running conjunction.
    pub fn to_circuit(&self) -> BooleanCircuit {
        let mut b = Builder {
            next: self.nvars,
            gates: Vec::new(),
        };
        let mut left = vec![0usize; self.nvars];
        for c in &self.clauses {
            for &lit in c {
                left[lit.unsigned_abs() as usize - 1] += 1;
            }
        }
        let mut current: Vec<Wire> = (0..self.nvars).collect();
        let mut conjunction: Option<Wire> = None;
        for c in &self.clauses {
            let lits: Vec<Wire> = c
                .iter()
                .map(|&lit| {
                    let v = lit.unsigned_abs() as usize - 1;
                    left[v] -= 1;
                    let w = if left[v] > 0 {
                        let (copy, rest) = b.split(current[v]);
                        current[v] = rest;
                        copy
                    } else {
                        current[v]
                    };
                    if lit < 0 {
                        b.gate(GateKind::Not, vec![w])
                    } else {
                        w
                    }
                })
                .collect();
            let clause = b.chain(GateKind::Or, GateKind::Const0, lits);
            conjunction = Some(match conjunction {
                None => clause,
                Some(acc) => b.gate(GateKind::And, vec![acc, clause]),
            });
        }
        let output = conjunction.unwrap_or_else(|| b.gate(GateKind::Const1, vec![]));
        BooleanCircuit::new(self.nvars, b.gates, output).expect("construction is well formed")
    }
}

struct Builder {
    next: Wire,
    gates: Vec<BoolGate>,
}

impl Builder {
    fn fresh(&mut self) -> Wire {
        self.next += 1;
        self.next - 1
    }

    fn gate(&mut self, kind: GateKind, inputs: Vec<Wire>) -> Wire {
        let o = self.fresh();
        self.gates.push(BoolGate::new(kind, inputs, vec![o]));
        o
    }

    /// `(copy, rest)` of `w`.
    fn split(&mut self, w: Wire) -> (Wire, Wire) {
        let (a, c) = (self.fresh(), self.fresh());
        self.gates.push(BoolGate::new(GateKind::Fanout, vec![w], vec![a, c]));
        (a, c)
    }

    fn chain(&mut self, op: GateKind, unit: GateKind, wires: Vec<Wire>) -> Wire {
        let mut it = wires.into_iter();
        match it.next() {
            None => self.gate(unit, vec![]),
            Some(first) => it.fold(first, |acc, w| self.gate(op, vec![acc, w])),
        }
    }
}

pub fn parse_dimacs(text: &str) -> Result<BooleanCircuit> {
    CnfFormula::parse(text).map(|f| f.to_circuit())
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    const FIG1: &str = "p cnf 4 4\n4 0\n-3 0\n-2 0\n1 0\n";

    #[test]
    fn single_positive_literal() {
        let c = parse_dimacs("p cnf 1 1\n1 0\n").unwrap();
        assert!(!c.eval(0));
        assert!(c.eval(1));
    }

    #[test]
    fn fig1_has_unique_solution_1001() {
        let c = parse_dimacs(FIG1).unwrap();
        let sols: Vec<u64> = (0..16).filter(|&w| c.eval(w)).collect();
        assert_eq!(sols, vec![0b1001]);
    }

    #[test]
    fn random_3cnf_matches_direct_evaluation() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..10 {
            let clauses: Vec<Vec<i64>> = (0..30)
                .map(|_| {
                    (0..3)
                        .map(|_| {
                            let v = rng.gen_range(1..=10i64);
                            if rng.gen() {
                                v
                            } else {
                                -v
                            }
                        })
                        .collect()
                })
                .collect();
            let f = CnfFormula::new(10, clauses).unwrap();
            let c = f.to_circuit();
            for w in 0..1024 {
                assert_eq!(c.eval(w), f.eval(w));
            }
        }
    }

    #[test]
    fn empty_clause_and_empty_formula() {
        let c = parse_dimacs("p cnf 2 2\n1 2 0\n0\n").unwrap();
        assert!((0..4).all(|w| !c.eval(w)));
        let t = parse_dimacs("p cnf 3 0\n").unwrap();
        assert!((0..8).all(|w| t.eval(w)));
    }

    #[test]
    fn comments_and_trailer() {
        let c = parse_dimacs("c hello\np cnf 2 1\n1 -2\n 0\n%\n0\n").unwrap();
        assert_eq!((0..4).filter(|&w| c.eval(w)).count(), 3);
    }

    #[test]
    fn parse_errors() {
        assert!(matches!(parse_dimacs("p cnf x 1\n"), Err(Error::Parse { line: 1, .. })));
        assert!(matches!(parse_dimacs("p cnf 2 1\n3 0\n"), Err(Error::Parse { line: 2, .. })));
        assert!(parse_dimacs("1 0\n").is_err());
        assert!(parse_dimacs("").is_err());
        assert!(parse_dimacs("p dnf 1 1\n").is_err());
    }

    #[test]
    fn round_trip_text() {
        let f = CnfFormula::parse(FIG1).unwrap();
        assert_eq!(CnfFormula::parse(&f.to_dimacs()).unwrap(), f);
    }
}
