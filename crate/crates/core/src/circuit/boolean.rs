use std::fmt;

use crate::error::{Error, Result};

/// Wire identifier. Wires `0..n_inputs` are the circuit inputs, wire `i`
/// carrying `w_{i+1}`.
pub type Wire = usize;

#[derive(Copy, Clone, Debug, PartialEq, Eq, Hash)]
pub enum GateKind {
    And,
    Or,
    Not,
    Xor,
    Const0,
    Const1,
    Fanout,
}

impl GateKind {
    pub const ALL: [GateKind; 7] = [
        GateKind::And,
        GateKind::Or,
        GateKind::Not,
        GateKind::Xor,
        GateKind::Const0,
        GateKind::Const1,
        GateKind::Fanout,
    ];

    /// (inputs, outputs)
    pub fn arity(self) -> (usize, usize) {
        match self {
            GateKind::And | GateKind::Or | GateKind::Xor => (2, 1),
            GateKind::Not => (1, 1),
            GateKind::Const0 | GateKind::Const1 => (0, 1),
            GateKind::Fanout => (1, 2),
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            GateKind::And => "AND",
            GateKind::Or => "OR",
            GateKind::Not => "NOT",
            GateKind::Xor => "XOR",
            GateKind::Const0 => "CONST0",
            GateKind::Const1 => "CONST1",
            GateKind::Fanout => "FANOUT",
        }
    }

    pub fn from_name(name: &str) -> Option<Self> {
        GateKind::ALL.into_iter().find(|k| k.name().eq_ignore_ascii_case(name))
    }

    /// Output bits for the given input bits, over 64 lanes at once.
    pub fn eval_words(self, ins: &[u64]) -> [u64; 2] {
        match self {
            GateKind::And => [ins[0] & ins[1], 0],
            GateKind::Or => [ins[0] | ins[1], 0],
            GateKind::Xor => [ins[0] ^ ins[1], 0],
            GateKind::Not => [!ins[0], 0],
            GateKind::Const0 => [0, 0],
            GateKind::Const1 => [!0, 0],
            GateKind::Fanout => [ins[0], ins[0]],
        }
    }
}

impl fmt::Display for GateKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BoolGate {
    pub kind: GateKind,
    pub inputs: Vec<Wire>,
    pub outputs: Vec<Wire>,
}

impl BoolGate {
    pub fn new(kind: GateKind, inputs: Vec<Wire>, outputs: Vec<Wire>) -> Self {
        BoolGate { kind, inputs, outputs }
    }
}

/// A switching function `f: {0,1}^n → {0,1}` as a gate list.
///
/// Every wire is driven once and read at most once; fan-out goes through
/// explicit `FANOUT` gates. Driven wires that are never read are garbage.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BooleanCircuit {
    n_inputs: usize,
    n_wires: usize,
    gates: Vec<BoolGate>,
    output: Wire,
}

impl BooleanCircuit {
    /// Validates a topologically ordered gate list.
    pub fn new(n_inputs: usize, gates: Vec<BoolGate>, output: Wire) -> Result<Self> {
        let n_wires = gates
            .iter()
            .flat_map(|g| g.inputs.iter().chain(&g.outputs))
            .chain(std::iter::once(&output))
            .map(|&w| w + 1)
            .max()
            .unwrap_or(0)
            .max(n_inputs);
        let mut driven = vec![false; n_wires];
        let mut read = vec![false; n_wires];
        driven[..n_inputs].iter_mut().for_each(|d| *d = true);
        for (k, g) in gates.iter().enumerate() {
            let (ni, no) = g.kind.arity();
            if g.inputs.len() != ni || g.outputs.len() != no {
                return Err(Error::InvalidCircuit(format!(
                    "gate {} ({}) takes {ni} inputs and {no} outputs, got {} and {}",
                    k + 1,
                    g.kind,
                    g.inputs.len(),
                    g.outputs.len()
                )));
            }
            for &w in &g.inputs {
                if !driven[w] {
                    return Err(Error::InvalidCircuit(format!(
                        "gate {} ({}) reads wire {} before it is driven",
                        k + 1,
                        g.kind,
                        w + 1
                    )));
                }
                if read[w] {
                    return Err(Error::InvalidCircuit(format!(
                        "wire {} is read twice; route it through FANOUT",
                        w + 1
                    )));
                }
                read[w] = true;
            }
            for &w in &g.outputs {
                if driven[w] {
                    return Err(Error::InvalidCircuit(format!("wire {} is driven twice", w + 1)));
                }
                driven[w] = true;
            }
        }
        if !driven[output] {
            return Err(Error::InvalidCircuit(format!("output wire {} is never driven", output + 1)));
        }
        if read[output] {
            return Err(Error::InvalidCircuit(format!("output wire {} is also read by a gate", output + 1)));
        }
        Ok(BooleanCircuit {
            n_inputs,
            n_wires,
            gates,
            output,
        })
    }

    pub fn n_inputs(&self) -> usize {
        self.n_inputs
    }

    pub fn n_wires(&self) -> usize {
        self.n_wires
    }

    pub fn gates(&self) -> &[BoolGate] {
        &self.gates
    }

    pub fn output(&self) -> Wire {
        self.output
    }

    /// Driven wires read by no gate, other than the output.
    pub fn garbage_wires(&self) -> Vec<Wire> {
        let mut read = vec![false; self.n_wires];
        let mut driven = vec![false; self.n_wires];
        driven[..self.n_inputs].iter_mut().for_each(|d| *d = true);
        for g in &self.gates {
            g.inputs.iter().for_each(|&w| read[w] = true);
            g.outputs.iter().for_each(|&w| driven[w] = true);
        }
        (0..self.n_wires)
            .filter(|&w| driven[w] && !read[w] && w != self.output)
            .collect()
    }

    /// All wire values for 64 assignments at once; `inputs[i]` holds the
    /// lanes of `w_{i+1}`.
    pub fn eval_wires_words(&self, inputs: &[u64]) -> Vec<u64> {
        assert_eq!(inputs.len(), self.n_inputs, "one word per input");
        let mut wires = vec![0u64; self.n_wires];
        wires[..self.n_inputs].copy_from_slice(inputs);
        let mut ins = [0u64; 2];
        for g in &self.gates {
            for (slot, &w) in ins.iter_mut().zip(&g.inputs) {
                *slot = wires[w];
            }
            let out = g.kind.eval_words(&ins[..g.inputs.len()]);
            for (&w, v) in g.outputs.iter().zip(out) {
                wires[w] = v;
            }
        }
        wires
    }

    pub fn eval_words(&self, inputs: &[u64]) -> u64 {
        self.eval_wires_words(inputs)[self.output]
    }

    /// `f(w)` with `w_1` the lowest bit of `w`.
    pub fn eval(&self, w: u64) -> bool {
        let inputs: Vec<u64> = (0..self.n_inputs).map(|i| if (w >> i) & 1 == 1 { !0 } else { 0 }).collect();
        self.eval_words(&inputs) & 1 == 1
    }
}
