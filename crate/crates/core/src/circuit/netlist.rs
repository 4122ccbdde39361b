use std::collections::{BTreeSet, HashMap};

use nalgebra::DMatrix;
use num_complex::Complex64 as C64;

use super::boolean::{BoolGate, BooleanCircuit, GateKind, Wire};
use super::quantum::{GateName, GaussianGate, QuantumCircuit, QuantumGate};
use super::Circuit;
use crate::error::{Error, Result};
use crate::scalar::parse_complex;

/// Parses the line-oriented netlist format. Wires and qubits are 1-based;
/// `#` starts a comment.
///
/// Boolean: `in <n>`, `anc <k>` (wires `n+1..=n+k` held at 0),
/// `gate <NAME> <ins…> -> <outs…>`, `out <wire>`. Gates may be listed in any
/// order.
///
/// Quantum: `qubits <N>`, `qgate <NAME> <targets…>`,
/// `qgate MAT <targets…> <entries…>`, `ggate <first-mode> <entries…>`, and
/// optionally `in <n>` (solution bits, default all qubits), `anc <k>` and
/// `out <qubit>` (default 1).
pub fn parse_netlist(text: &str) -> Result<Circuit> {
    let mut lines = Vec::new();
    for (idx, raw) in text.lines().enumerate() {
        let body = raw.split('#').next().unwrap_or("").trim();
        if !body.is_empty() {
            lines.push((idx + 1, body.split_whitespace().collect::<Vec<_>>()));
        }
    }
    let quantum = lines
        .iter()
        .any(|(_, t)| matches!(t[0], "qubits" | "qgate" | "ggate"));
    if quantum {
        parse_quantum(&lines).map(Circuit::Quantum)
    } else {
        parse_boolean(&lines).map(Circuit::Boolean)
    }
}

type Lines<'a> = [(usize, Vec<&'a str>)];

fn number(line: usize, tok: &str, what: &str) -> Result<usize> {
    tok.parse()
        .map_err(|_| Error::parse(line, format!("bad {what} '{tok}'")))
}

fn one_based(line: usize, tok: &str, what: &str) -> Result<usize> {
    match number(line, tok, what)? {
        0 => Err(Error::parse(line, format!("{what} numbers start at 1"))),
        v => Ok(v - 1),
    }
}

fn single_value(line: usize, toks: &[&str], slot: &mut Option<usize>) -> Result<usize> {
    if toks.len() != 2 {
        return Err(Error::parse(line, format!("'{}' takes one number", toks[0])));
    }
    if slot.is_some() {
        return Err(Error::parse(line, format!("'{}' given twice", toks[0])));
    }
    let v = number(line, toks[1], toks[0])?;
    *slot = Some(v);
    Ok(v)
}

fn parse_boolean(lines: &Lines) -> Result<BooleanCircuit> {
    let (mut n, mut anc, mut out) = (None, None, None);
    let mut gates: Vec<(usize, BoolGate)> = Vec::new();
    for (line, toks) in lines {
        let line = *line;
        match toks[0] {
            "in" => {
                single_value(line, toks, &mut n)?;
            }
            "anc" => {
                single_value(line, toks, &mut anc)?;
            }
            "out" => {
                if toks.len() != 2 || out.is_some() {
                    return Err(Error::parse(line, "'out' takes one wire and appears once"));
                }
                out = Some(one_based(line, toks[1], "wire")?);
            }
            "gate" => {
                let name = toks
                    .get(1)
                    .ok_or_else(|| Error::parse(line, "gate without a name"))?;
                let kind = GateKind::from_name(name)
                    .ok_or_else(|| Error::parse(line, format!("unknown gate '{name}'")))?;
                let arrow = toks
                    .iter()
                    .position(|&t| t == "->")
                    .ok_or_else(|| Error::parse(line, "gate needs '->' between inputs and outputs"))?;
                let ins = toks[2..arrow]
                    .iter()
                    .map(|t| one_based(line, t, "wire"))
                    .collect::<Result<Vec<_>>>()?;
                let outs = toks[arrow + 1..]
                    .iter()
                    .map(|t| one_based(line, t, "wire"))
                    .collect::<Result<Vec<_>>>()?;
                let (ni, no) = kind.arity();
                if ins.len() != ni || outs.len() != no {
                    return Err(Error::parse(
                        line,
                        format!("{kind} takes {ni} inputs and {no} outputs, got {} and {}", ins.len(), outs.len()),
                    ));
                }
                gates.push((line, BoolGate::new(kind, ins, outs)));
            }
            other => return Err(Error::parse(line, format!("unknown directive '{other}'"))),
        }
    }
    let n = n.ok_or_else(|| Error::parse(0, "missing 'in <n>'"))?;
    let out = out.ok_or_else(|| Error::parse(0, "missing 'out <wire>'"))?;
    let anc = anc.unwrap_or(0);
    let mut all: Vec<(usize, BoolGate)> = (n..n + anc)
        .map(|w| (0, BoolGate::new(GateKind::Const0, vec![], vec![w])))
        .collect();
    all.extend(gates);
    let ordered = topological(n, all)?;
    BooleanCircuit::new(n, ordered, out)
}

/// Kahn's algorithm, keeping textual order among ready gates.
fn topological(n: usize, gates: Vec<(usize, BoolGate)>) -> Result<Vec<BoolGate>> {
    let mut driver: HashMap<Wire, usize> = HashMap::new();
    for (k, (line, g)) in gates.iter().enumerate() {
        for &w in &g.outputs {
            if w < n || driver.insert(w, k).is_some() {
                return Err(Error::parse(*line, format!("wire {} is driven twice", w + 1)));
            }
        }
    }
    let mut pending = vec![0usize; gates.len()];
    let mut dependants: Vec<Vec<usize>> = vec![Vec::new(); gates.len()];
    for (k, (line, g)) in gates.iter().enumerate() {
        for &w in &g.inputs {
            if w < n {
                continue;
            }
            let d = *driver
                .get(&w)
                .ok_or_else(|| Error::parse(*line, format!("wire {} is never driven", w + 1)))?;
            pending[k] += 1;
            dependants[d].push(k);
        }
    }
    let mut ready: BTreeSet<usize> = (0..gates.len()).filter(|&k| pending[k] == 0).collect();
    let mut order = Vec::with_capacity(gates.len());
    while let Some(k) = ready.pop_first() {
        order.push(k);
        for &d in &dependants[k] {
            pending[d] -= 1;
            if pending[d] == 0 {
                ready.insert(d);
            }
        }
    }
    if order.len() != gates.len() {
        let stuck = (0..gates.len()).find(|&k| pending[k] > 0).expect("some gate left");
        return Err(Error::parse(gates[stuck].0, "cyclic wiring"));
    }
    let mut slots: Vec<Option<BoolGate>> = gates.into_iter().map(|(_, g)| Some(g)).collect();
    Ok(order.into_iter().map(|k| slots[k].take().expect("each once")).collect())
}

fn parse_quantum(lines: &Lines) -> Result<QuantumCircuit> {
    let (mut qubits, mut n, mut anc, mut out) = (None, None, None, None);
    let mut gates = Vec::new();
    for (line, toks) in lines {
        let line = *line;
        match toks[0] {
            "qubits" => {
                single_value(line, toks, &mut qubits)?;
            }
            "in" => {
                single_value(line, toks, &mut n)?;
            }
            "anc" => {
                single_value(line, toks, &mut anc)?;
            }
            "out" => {
                if toks.len() != 2 || out.is_some() {
                    return Err(Error::parse(line, "'out' takes one qubit and appears once"));
                }
                out = Some(one_based(line, toks[1], "qubit")?);
            }
            "qgate" => gates.push((line, qgate(line, &toks[1..])?)),
            "ggate" => gates.push((line, ggate(line, &toks[1..])?)),
            "gate" => return Err(Error::parse(line, "Boolean 'gate' in a quantum netlist")),
            other => return Err(Error::parse(line, format!("unknown directive '{other}'"))),
        }
    }
    let qubits = match (qubits, n, anc) {
        (Some(q), _, _) => q,
        (None, Some(n), a) => n + a.unwrap_or(0),
        (None, None, _) => return Err(Error::parse(0, "missing 'qubits <N>'")),
    };
    let n = n.unwrap_or(qubits - anc.unwrap_or(0).min(qubits));
    if let Some(a) = anc {
        if n + a != qubits {
            return Err(Error::parse(0, format!("in {n} plus anc {a} differs from qubits {qubits}")));
        }
    }
    let mut c = QuantumCircuit::with_io(qubits, n, out.unwrap_or(0), vec![]).map_err(|e| Error::parse(0, e.to_string()))?;
    for (line, g) in gates {
        c.push(g).map_err(|e| Error::parse(line, e.to_string()))?;
    }
    Ok(c)
}

fn qgate(line: usize, toks: &[&str]) -> Result<QuantumGate> {
    let name = toks.first().ok_or_else(|| Error::parse(line, "qgate without a name"))?;
    if name.eq_ignore_ascii_case("MAT") {
        // targets come first; the entry count 4^k fixes k
        let rest = &toks[1..];
        let k = (1..=3)
            .find(|&k| rest.len() == k + (1 << (2 * k)))
            .ok_or_else(|| Error::parse(line, "MAT needs k targets and 4^k entries, 1 <= k <= 3"))?;
        let targets = rest[..k]
            .iter()
            .map(|t| one_based(line, t, "qubit"))
            .collect::<Result<Vec<_>>>()?;
        let entries = rest[k..]
            .iter()
            .map(|t| parse_complex(t).ok_or_else(|| Error::parse(line, format!("bad complex entry '{t}'"))))
            .collect::<Result<Vec<C64>>>()?;
        let d = 1 << k;
        return Ok(QuantumGate::Matrix {
            matrix: DMatrix::from_row_slice(d, d, &entries),
            targets,
        });
    }
    let gate = GateName::from_name(name).ok_or_else(|| Error::parse(line, format!("unknown gate '{name}'")))?;
    let targets = toks[1..]
        .iter()
        .map(|t| one_based(line, t, "qubit"))
        .collect::<Result<Vec<_>>>()?;
    if targets.len() != gate.arity() {
        return Err(Error::parse(
            line,
            format!("{gate} takes {} qubits, got {}", gate.arity(), targets.len()),
        ));
    }
    Ok(QuantumGate::Named { name: gate, targets })
}

fn ggate(line: usize, toks: &[&str]) -> Result<QuantumGate> {
    let first = one_based(line, toks.first().ok_or_else(|| Error::parse(line, "ggate needs a mode"))?, "mode")?;
    let entries = toks[1..]
        .iter()
        .map(|t| t.parse::<f64>().map_err(|_| Error::parse(line, format!("bad real entry '{t}'"))))
        .collect::<Result<Vec<_>>>()?;
    let d = (entries.len() as f64).sqrt().round() as usize;
    if d == 0 || d * d != entries.len() || !d.is_multiple_of(2) {
        return Err(Error::parse(line, "ggate needs (2w)^2 generator entries"));
    }
    let g = GaussianGate::new(first, DMatrix::from_row_slice(d, d, &entries)).map_err(|e| Error::parse(line, e.to_string()))?;
    Ok(QuantumGate::Gaussian(g))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn boolean(text: &str) -> BooleanCircuit {
        match parse_netlist(text).unwrap() {
            Circuit::Boolean(b) => b,
            other => panic!("expected Boolean circuit, got {other:?}"),
        }
    }

    fn quantum(text: &str) -> QuantumCircuit {
        match parse_netlist(text).unwrap() {
            Circuit::Quantum(q) => q,
            other => panic!("expected quantum circuit, got {other:?}"),
        }
    }

    #[test]
    fn and_netlist() {
        let c = boolean("in 2\ngate AND 1 2 -> 3\nout 3\n");
        assert_eq!((0..4).map(|w| c.eval(w)).collect::<Vec<_>>(), [false, false, false, true]);
    }

    #[test]
    fn out_of_order_gates_are_sorted() {
        let c = boolean("in 2 # two inputs\ngate NOT 4 -> 5\ngate XOR 1 2 -> 4\nout 5\n");
        assert_eq!(c.gates()[0].kind, GateKind::Xor);
        assert_eq!((0..4).map(|w| c.eval(w)).collect::<Vec<_>>(), [true, false, false, true]);
    }

    #[test]
    fn ancilla_wires_are_zero() {
        let c = boolean("in 1\nanc 1\ngate OR 1 2 -> 3\nout 3\n");
        assert!(!c.eval(0) && c.eval(1));
    }

    #[test]
    fn boolean_errors() {
        let cyclic = "in 1\ngate AND 1 3 -> 2\ngate NOT 2 -> 3\nout 2\n";
        assert!(matches!(parse_netlist(cyclic), Err(Error::Parse { message, .. }) if message.contains("cyclic")));
        assert!(matches!(
            parse_netlist("in 2\ngate NAND 1 2 -> 3\nout 3\n"),
            Err(Error::Parse { line: 2, .. })
        ));
        assert!(parse_netlist("in 2\ngate AND 1 -> 3\nout 3\n").is_err());
        assert!(parse_netlist("in 2\ngate AND 1 2 -> 3\n").is_err());
        assert!(parse_netlist("in 2\ngate AND 1 7 -> 3\nout 3\n").is_err());
    }

    #[test]
    fn quantum_netlists() {
        let h = quantum("qubits 1\nqgate H 1\n");
        assert!(h.is_clifford());
        assert_eq!((h.n_inputs(), h.output()), (1, 0));
        let t = quantum("qubits 1\nqgate T 1\n");
        assert!(!t.is_clifford());
        let io = quantum("in 2\nanc 1\nqgate Toffoli 1 2 3\nout 3\n");
        assert_eq!((io.qubits(), io.n_inputs(), io.output()), (3, 2, 2));
    }

    #[test]
    fn matrix_and_gaussian_gates() {
        let m = quantum("qubits 2\nqgate MAT 2 0 1 1 0\nggate 1 0 0.5 0 0 -0.5 0 0 0 0 0 0 0.25 0 0 -0.25 0\n");
        assert_eq!(m.gates().len(), 2);
        assert!(matches!(&m.gates()[0], QuantumGate::Matrix { targets, .. } if targets == &vec![1]));
        assert!(matches!(&m.gates()[1], QuantumGate::Gaussian(g) if g.width() == 2));
        let phase = quantum("qubits 1\nqgate MAT 1 1 0 0 i\n");
        assert_eq!(phase.gates()[0].matrix()[(1, 1)], C64::new(0.0, 1.0));
    }

    #[test]
    fn quantum_errors() {
        assert!(matches!(parse_netlist("qubits 1\nqgate MAT 1 1 1 1 1\n"), Err(Error::Parse { line: 2, .. })));
        assert!(parse_netlist("qubits 2\nqgate CNOT 1\n").is_err());
        assert!(parse_netlist("qubits 1\nggate 1 0 1 1 0\n").is_err());
        assert!(parse_netlist("qubits 1\nqgate FOO 1\n").is_err());
        assert!(parse_netlist("qubits 2\ngate AND 1 2 -> 3\n").is_err());
        assert!(parse_netlist("qubits 2\nin 1\nanc 2\n").is_err());
    }
}
