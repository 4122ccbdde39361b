use super::boolean::{BooleanCircuit, GateKind};
use crate::error::{Error, Result};

#[derive(Copy, Clone, Debug, PartialEq, Eq)]
pub enum RevGate {
    Not(usize),
    Cnot { control: usize, target: usize },
    Toffoli { controls: [usize; 2], target: usize },
}

impl RevGate {
    pub fn apply(&self, bits: &mut [bool]) {
        match *self {
            RevGate::Not(t) => bits[t] ^= true,
            RevGate::Cnot { control, target } => bits[target] ^= bits[control],
            RevGate::Toffoli { controls: [a, b], target } => bits[target] ^= bits[a] & bits[b],
        }
    }

    pub fn lines(&self) -> Vec<usize> {
        match *self {
            RevGate::Not(t) => vec![t],
            RevGate::Cnot { control, target } => vec![control, target],
            RevGate::Toffoli { controls: [a, b], target } => vec![a, b, target],
        }
    }
}

/// A NOT/CNOT/Toffoli circuit. Lines `0..n_inputs` carry `w`, the rest start
/// at 0.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ReversibleCircuit {
    lines: usize,
    n_inputs: usize,
    gates: Vec<RevGate>,
    result: usize,
}

impl ReversibleCircuit {
    pub fn new(lines: usize, n_inputs: usize, gates: Vec<RevGate>, result: usize) -> Result<Self> {
        if n_inputs > lines || result >= lines {
            return Err(Error::InvalidCircuit(format!(
                "{lines} lines cannot hold {n_inputs} inputs and result line {result}"
            )));
        }
        for g in &gates {
            let ls = g.lines();
            if ls.iter().any(|&l| l >= lines) {
                return Err(Error::InvalidCircuit(format!("{g:?} addresses a line beyond {lines}")));
            }
            if (1..ls.len()).any(|i| ls[..i].contains(&ls[i])) {
                return Err(Error::InvalidCircuit(format!("{g:?} repeats a line")));
            }
        }
        Ok(ReversibleCircuit {
            lines,
            n_inputs,
            gates,
            result,
        })
    }

    pub fn lines(&self) -> usize {
        self.lines
    }

    pub fn n_inputs(&self) -> usize {
        self.n_inputs
    }

    pub fn gates(&self) -> &[RevGate] {
        &self.gates
    }

    pub fn result(&self) -> usize {
        self.result
    }

    pub fn run(&self, bits: &mut [bool]) {
        self.gates.iter().for_each(|g| g.apply(bits));
    }

    pub fn run_backward(&self, bits: &mut [bool]) {
        self.gates.iter().rev().for_each(|g| g.apply(bits));
    }

    /// Result line after running on `(w, 0…0)`.
    pub fn eval(&self, w: u64) -> bool {
        let mut bits: Vec<bool> = (0..self.lines).map(|i| i < self.n_inputs && (w >> i) & 1 == 1).collect();
        self.run(&mut bits);
        bits[self.result]
    }
}

/// Gate-by-gate reversible embedding without uncomputation.
///
/// AND becomes a Toffoli onto a fresh ancilla, XOR two CNOTs onto a fresh
/// ancilla, NOT an in-place NOT, OR the De Morgan form (NOT, NOT, Toffoli
/// onto a fresh ancilla, NOT), FANOUT a CNOT onto a fresh ancilla and the
/// constants a fresh ancilla, negated for CONST1. The OR leaves its inputs
/// negated, which is harmless since every wire is read once.
pub fn make_reversible(c: &BooleanCircuit) -> ReversibleCircuit {
    let n = c.n_inputs();
    let mut line_of: Vec<Option<usize>> = vec![None; c.n_wires()];
    for (w, slot) in line_of.iter_mut().enumerate().take(n) {
        *slot = Some(w);
    }
    let mut lines = n;
    let mut gates = Vec::new();
    let mut fresh = || {
        lines += 1;
        lines - 1
    };
    for g in c.gates() {
        let ins: Vec<usize> = g.inputs.iter().map(|&w| line_of[w].expect("validated circuit")).collect();
        match g.kind {
            GateKind::Not => {
                gates.push(RevGate::Not(ins[0]));
                line_of[g.outputs[0]] = Some(ins[0]);
            }
            GateKind::And => {
                let t = fresh();
                gates.push(RevGate::Toffoli {
                    controls: [ins[0], ins[1]],
                    target: t,
                });
                line_of[g.outputs[0]] = Some(t);
            }
            GateKind::Or => {
                let t = fresh();
                gates.push(RevGate::Not(ins[0]));
                gates.push(RevGate::Not(ins[1]));
                gates.push(RevGate::Toffoli {
                    controls: [ins[0], ins[1]],
                    target: t,
                });
                gates.push(RevGate::Not(t));
                line_of[g.outputs[0]] = Some(t);
            }
            GateKind::Xor => {
                let t = fresh();
                gates.push(RevGate::Cnot { control: ins[0], target: t });
                gates.push(RevGate::Cnot { control: ins[1], target: t });
                line_of[g.outputs[0]] = Some(t);
            }
            GateKind::Fanout => {
                let t = fresh();
                gates.push(RevGate::Cnot { control: ins[0], target: t });
                line_of[g.outputs[0]] = Some(ins[0]);
                line_of[g.outputs[1]] = Some(t);
            }
            GateKind::Const0 | GateKind::Const1 => {
                let t = fresh();
                if g.kind == GateKind::Const1 {
                    gates.push(RevGate::Not(t));
                }
                line_of[g.outputs[0]] = Some(t);
            }
        }
    }
    let result = line_of[c.output()].expect("output driven");
    ReversibleCircuit::new(lines, n, gates, result).expect("construction is well formed")
}
