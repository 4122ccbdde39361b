use num_complex::Complex64 as C64;

use super::boolean::{BooleanCircuit, GateKind};
use super::quantum::QuantumCircuit;
use super::Circuit;
use crate::error::{Error, Result};
use crate::scalar::Scalar;
use crate::tensor::{operator_tensor, IndexId, LabelAlloc, Tensor, TensorNetwork};

/// A lowered checker: an open network with one input index per line, one
/// designated output index and the remaining outputs as ancilla outputs.
#[derive(Clone, Debug)]
pub struct CheckerNetwork<T> {
    net: TensorNetwork<T>,
    inputs: Vec<IndexId>,
    n_solution: usize,
    output: IndexId,
    ancilla_outputs: Vec<IndexId>,
    deterministic: bool,
    line_outputs: Option<Vec<IndexId>>,
}

impl<T: Scalar> CheckerNetwork<T> {
    /// Lines `0..n_solution` of `inputs` take `w`, the others `|0⟩`.
    pub fn new(
        net: TensorNetwork<T>,
        inputs: Vec<IndexId>,
        n_solution: usize,
        output: IndexId,
        ancilla_outputs: Vec<IndexId>,
        deterministic: bool,
    ) -> Result<Self> {
        if n_solution > inputs.len() {
            return Err(Error::InvalidCircuit(format!(
                "{n_solution} solution bits on {} lines",
                inputs.len()
            )));
        }
        let mut open = net.open_labels();
        open.sort();
        let mut declared: Vec<IndexId> = inputs
            .iter()
            .chain(&ancilla_outputs)
            .chain(std::iter::once(&output))
            .copied()
            .collect();
        declared.sort();
        if open != declared {
            return Err(Error::InvalidCircuit(
                "declared inputs and outputs differ from the open indices".into(),
            ));
        }
        if net.dims_all_two(&declared) {
            Ok(CheckerNetwork {
                net,
                inputs,
                n_solution,
                output,
                ancilla_outputs,
                deterministic,
                line_outputs: None,
            })
        } else {
            Err(Error::InvalidCircuit("input and output indices must have dimension 2".into()))
        }
    }

    pub fn network(&self) -> &TensorNetwork<T> {
        &self.net
    }

    pub fn inputs(&self) -> &[IndexId] {
        &self.inputs
    }

    pub fn lines(&self) -> usize {
        self.inputs.len()
    }

    pub fn n_solution(&self) -> usize {
        self.n_solution
    }

    pub fn output(&self) -> IndexId {
        self.output
    }

    pub fn ancilla_outputs(&self) -> &[IndexId] {
        &self.ancilla_outputs
    }

    /// All tensors are 0/1 with one nonzero per input assignment.
    pub fn is_deterministic(&self) -> bool {
        self.deterministic
    }

    /// Output index of every line, when lines map to outputs one to one.
    pub fn line_outputs(&self) -> Option<&[IndexId]> {
        self.line_outputs.as_deref()
    }

    /// Records the per-line outputs; they must be the declared outputs.
    pub fn with_line_outputs(mut self, outs: Vec<IndexId>) -> Result<Self> {
        let mut a = outs.clone();
        a.sort();
        let mut b: Vec<IndexId> = self.ancilla_outputs.iter().copied().chain([self.output]).collect();
        b.sort();
        if a != b || outs.len() != self.inputs.len() {
            return Err(Error::InvalidCircuit("line outputs must list every output once per line".into()));
        }
        self.line_outputs = Some(outs);
        Ok(self)
    }

    /// Same checker with every label shifted past `alloc`'s range, for
    /// placing several copies in one network.
    pub fn relabeled(&self, alloc: &mut LabelAlloc) -> Result<Self> {
        let base = alloc.peek();
        let shift = |l: IndexId| IndexId(l.0 + base);
        let tensors = self
            .net
            .tensors()
            .iter()
            .map(|t| t.relabel(shift))
            .collect::<Result<Vec<_>>>()?;
        for t in &tensors {
            for &l in t.labels() {
                alloc.reserve(l);
            }
        }
        Ok(CheckerNetwork {
            net: TensorNetwork::new(tensors)?,
            inputs: self.inputs.iter().map(|&l| shift(l)).collect(),
            n_solution: self.n_solution,
            output: shift(self.output),
            ancilla_outputs: self.ancilla_outputs.iter().map(|&l| shift(l)).collect(),
            deterministic: self.deterministic,
            line_outputs: self.line_outputs.as_ref().map(|v| v.iter().map(|&l| shift(l)).collect()),
        })
    }
}

impl<T: Scalar> TensorNetwork<T> {
    fn dims_all_two(&self, labels: &[IndexId]) -> bool {
        labels.iter().all(|&l| self.dim_of(l) == Some(2))
    }
}

fn delta<T: Scalar>(labels: Vec<IndexId>, f: impl Fn(&[usize]) -> bool) -> Tensor<T> {
    let dims = vec![2; labels.len()];
    Tensor::from_fn(labels, dims, |idx| if f(idx) { T::one() } else { T::zero() }).expect("well-formed delta")
}

/// δ-tensor network of a Boolean circuit: `[g]^{i…o…} = δ_{g(i), o}`.
///
/// Inputs that no gate reads, and an output that is an input, pass through
/// an identity tensor so every open index belongs to exactly one tensor.
pub fn lower_boolean<T: Scalar>(c: &BooleanCircuit) -> Result<CheckerNetwork<T>> {
    let mut alloc = LabelAlloc::new();
    let wire: Vec<IndexId> = alloc.fresh_n(c.n_wires());
    let mut tensors = Vec::with_capacity(c.gates().len() + c.n_inputs());
    for g in c.gates() {
        let labels: Vec<IndexId> = g.inputs.iter().chain(&g.outputs).map(|&w| wire[w]).collect();
        let t = match g.kind {
            GateKind::And => delta(labels, |v| v[2] == (v[0] & v[1])),
            GateKind::Or => delta(labels, |v| v[2] == (v[0] | v[1])),
            GateKind::Xor => delta(labels, |v| v[2] == (v[0] ^ v[1])),
            GateKind::Not => delta(labels, |v| v[1] == 1 - v[0]),
            GateKind::Const0 => delta(labels, |v| v[0] == 0),
            GateKind::Const1 => delta(labels, |v| v[0] == 1),
            GateKind::Fanout => delta(labels, |v| v[0] == v[1] && v[1] == v[2]),
        };
        tensors.push(t);
    }
    let inputs: Vec<IndexId> = wire[..c.n_inputs()].to_vec();
    let garbage = c.garbage_wires();
    let mut outputs: Vec<(usize, IndexId)> = Vec::new();
    for w in 0..c.n_wires() {
        if w != c.output() && garbage.binary_search(&w).is_err() {
            continue;
        }
        if w < c.n_inputs() {
            let through = alloc.fresh();
            tensors.push(delta(vec![wire[w], through], |v| v[0] == v[1]));
            outputs.push((w, through));
        } else {
            outputs.push((w, wire[w]));
        }
    }
    let output = outputs.iter().find(|(w, _)| *w == c.output()).expect("output listed").1;
    let ancilla_outputs = outputs.iter().filter(|(w, _)| *w != c.output()).map(|p| p.1).collect();
    let net = TensorNetwork::with_alloc(tensors, alloc)?;
    CheckerNetwork::new(net, inputs, c.n_inputs(), output, ancilla_outputs, true)
}

/// Gate-tensor network of a quantum circuit in the system `T`.
///
/// Fails with a number-system error if a gate entry is not representable,
/// so exact systems accept permutation circuits only.
pub fn lower_quantum<T: Scalar>(c: &QuantumCircuit) -> Result<CheckerNetwork<T>> {
    let mut alloc = LabelAlloc::new();
    let inputs = alloc.fresh_n(c.qubits());
    let mut current = inputs.clone();
    let mut touched = vec![false; c.qubits()];
    let mut tensors: Vec<Tensor<T>> = Vec::with_capacity(c.gates().len());
    for g in c.gates() {
        let targets = g.targets();
        let cols: Vec<IndexId> = targets.iter().map(|&q| current[q]).collect();
        let rows = alloc.fresh_n(targets.len());
        tensors.push(operator_tensor(&g.matrix(), &cols, &rows)?);
        for (&q, &r) in targets.iter().zip(&rows) {
            current[q] = r;
            touched[q] = true;
        }
    }
    for q in 0..c.qubits() {
        if !touched[q] {
            let out = alloc.fresh();
            tensors.push(delta(vec![current[q], out], |v| v[0] == v[1]));
            current[q] = out;
        }
    }
    let output = current[c.output()];
    let ancilla_outputs = (0..c.qubits()).filter(|&q| q != c.output()).map(|q| current[q]).collect();
    let net = TensorNetwork::with_alloc(tensors, alloc)?;
    CheckerNetwork::new(net, inputs, c.n_inputs(), output, ancilla_outputs, c.is_permutation())?.with_line_outputs(current)
}

pub fn lower_to_network<T: Scalar>(c: &Circuit) -> Result<CheckerNetwork<T>> {
    match c {
        Circuit::Boolean(b) => lower_boolean(b),
        Circuit::Quantum(q) => lower_quantum(q),
    }
}

/// Complex lowering, the usual choice for quantum checkers.
pub fn lower_quantum_complex(c: &QuantumCircuit) -> Result<CheckerNetwork<C64>> {
    lower_quantum(c)
}
