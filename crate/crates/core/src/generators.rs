//! Seeded random instances for tests, benchmarks and the `verify` command.

use nalgebra::DMatrix;
use rand::seq::SliceRandom;
use rand::Rng;

use crate::circuit::boolean::{BoolGate, BooleanCircuit, GateKind};
use crate::circuit::dimacs::CnfFormula;
use crate::circuit::quantum::{GateName, GaussianGate, QuantumCircuit, QuantumGate};
use crate::circuit::boolean_to_quantum;
use crate::tensor::{IndexId, Tensor, TensorNetwork};

/// Random CNF with clauses of up to three distinct variables.
pub fn random_cnf(rng: &mut impl Rng, nvars: usize, nclauses: usize) -> CnfFormula {
    let vars: Vec<i64> = (1..=nvars as i64).collect();
    let width = nvars.min(3);
    let clauses = (0..nclauses)
        .map(|_| {
            vars.choose_multiple(rng, width)
                .map(|&v| if rng.gen_bool(0.5) { v } else { -v })
                .collect()
        })
        .collect();
    CnfFormula::new(nvars, clauses).expect("literals are in range")
}

/// Random Clifford circuit with a random output qubit.
pub fn random_clifford(rng: &mut impl Rng, m: usize, gates: usize) -> QuantumCircuit {
    let names = [
        GateName::X,
        GateName::Y,
        GateName::Z,
        GateName::H,
        GateName::S,
        GateName::Cnot,
        GateName::Cz,
        GateName::Swap,
    ];
    let output = rng.gen_range(0..m);
    let mut c = QuantumCircuit::with_io(m, m, output, vec![]).expect("valid layout");
    for _ in 0..gates {
        let name = names[rng.gen_range(0..if m > 1 { names.len() } else { 5 })];
        c.push(QuantumGate::named(name, &distinct(rng, m, name.arity()))).expect("valid gate");
    }
    c
}

fn distinct(rng: &mut impl Rng, m: usize, k: usize) -> Vec<usize> {
    let all: Vec<usize> = (0..m).collect();
    all.choose_multiple(rng, k).copied().collect()
}

/// Random Gaussian circuit of one- and two-mode gates, measured on `output`.
pub fn random_gaussian(rng: &mut impl Rng, m: usize, gates: usize, output: usize) -> QuantumCircuit {
    let mut c = QuantumCircuit::with_io(m, m, output, vec![]).expect("valid layout");
    for _ in 0..gates {
        let w = if m > 1 && rng.gen_bool(0.7) { 2 } else { 1 };
        let first = rng.gen_range(0..=m - w);
        let d = 2 * w;
        let mut h = DMatrix::<f64>::zeros(d, d);
        for a in 0..d {
            for b in a + 1..d {
                let v = rng.gen_range(-1.0..1.0);
                h[(a, b)] = v;
                h[(b, a)] = -v;
            }
        }
        c.push(QuantumGate::Gaussian(GaussianGate::new(first, h).expect("antisymmetric")))
            .expect("valid gate");
    }
    c
}

/// AND of `n` inputs as a balanced binary tree.
pub fn balanced_and_tree(n: usize) -> BooleanCircuit {
    assert!(n >= 1, "at least one input");
    let mut layer: Vec<usize> = (0..n).collect();
    let mut next_wire = n;
    let mut gates = Vec::with_capacity(n);
    if n == 1 {
        gates.push(BoolGate::new(GateKind::Not, vec![0], vec![1]));
        gates.push(BoolGate::new(GateKind::Not, vec![1], vec![2]));
        return BooleanCircuit::new(1, gates, 2).expect("valid tree");
    }
    while layer.len() > 1 {
        let mut up = Vec::with_capacity(layer.len().div_ceil(2));
        for pair in layer.chunks(2) {
            if let [a, b] = *pair {
                gates.push(BoolGate::new(GateKind::And, vec![a, b], vec![next_wire]));
                up.push(next_wire);
                next_wire += 1;
            } else {
                up.push(pair[0]);
            }
        }
        layer = up;
    }
    BooleanCircuit::new(n, gates, layer[0]).expect("valid tree")
}

/// Random read-once formula over all `n` inputs: every input feeds one
/// gate, so the wiring is a tree.
pub fn random_tree_formula(rng: &mut impl Rng, n: usize) -> BooleanCircuit {
    let mut pool: Vec<usize> = (0..n).collect();
    let mut next_wire = n;
    let mut gates = Vec::new();
    let mut fresh = |gates: &mut Vec<BoolGate>, kind, inputs| {
        let w = next_wire;
        next_wire += 1;
        gates.push(BoolGate::new(kind, inputs, vec![w]));
        w
    };
    while pool.len() > 1 {
        let a = pool.swap_remove(rng.gen_range(0..pool.len()));
        let b = pool.swap_remove(rng.gen_range(0..pool.len()));
        let kind = *[GateKind::And, GateKind::Or, GateKind::Xor].choose(rng).expect("non-empty");
        let mut w = fresh(&mut gates, kind, vec![a, b]);
        if rng.gen_bool(0.3) {
            w = fresh(&mut gates, GateKind::Not, vec![w]);
        }
        pool.push(w);
    }
    if gates.is_empty() {
        let w = fresh(&mut gates, GateKind::Not, vec![pool[0]]);
        pool[0] = fresh(&mut gates, GateKind::Not, vec![w]);
    }
    BooleanCircuit::new(n, gates, pool[0]).expect("valid formula")
}

/// A tree-formula front (in reversible quantum form) followed by a random
/// Clifford back on every line, measured on the formula's result line.
/// Returns the full circuit and the number of front gates.
pub fn tree_front_clifford_back(rng: &mut impl Rng, n: usize, back_gates: usize) -> (QuantumCircuit, usize) {
    let front = boolean_to_quantum(&random_tree_formula(rng, n));
    let m = front.qubits();
    let back = random_clifford(rng, m, back_gates);
    let split = front.gates().len();
    let mut gates = front.gates().to_vec();
    gates.extend(back.gates().iter().cloned());
    let c = QuantumCircuit::with_io(m, front.n_inputs(), front.output(), gates).expect("same layout");
    (c, split)
}

/// Random closed network of `k` tensors: each pair is bonded with
/// probability `p` by an index of dimension 1 to 3, capping rank at 4.
pub fn random_closed_network<T: crate::scalar::Scalar, R: Rng>(
    rng: &mut R,
    k: usize,
    p: f64,
    mut entry: impl FnMut(&mut R) -> T,
) -> TensorNetwork<T> {
    let mut legs: Vec<Vec<(IndexId, usize)>> = vec![Vec::new(); k];
    let mut next = 0u64;
    for a in 0..k {
        for b in a + 1..k {
            if legs[a].len() < 4 && legs[b].len() < 4 && rng.gen_bool(p) {
                let d = rng.gen_range(1..=3);
                let l = IndexId(next);
                next += 1;
                legs[a].push((l, d));
                legs[b].push((l, d));
            }
        }
    }
    let tensors = legs
        .into_iter()
        .map(|ls| {
            let (labels, dims): (Vec<_>, Vec<_>) = ls.into_iter().unzip();
            Tensor::from_fn(labels, dims, |_| entry(rng)).expect("well-formed tensor")
        })
        .collect();
    TensorNetwork::new(tensors).expect("each label used twice")
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn and_tree_evaluates() {
        for n in [1, 2, 5, 8] {
            let c = balanced_and_tree(n);
            let all = (1u64 << n) - 1;
            for w in 0..1u64 << n {
                assert_eq!(c.eval(w), w == all, "n = {n}, w = {w}");
            }
        }
    }

    #[test]
    fn tree_formula_reads_every_input_once() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for n in 1..7 {
            let c = random_tree_formula(&mut rng, n);
            assert!(c.garbage_wires().is_empty());
        }
    }

    #[test]
    fn tree_front_fits_the_dense_budget() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        for _ in 0..20 {
            let (c, split) = tree_front_clifford_back(&mut rng, 3, 10);
            assert!(c.qubits() <= 10);
            assert!(c.split_at(split).1.is_clifford());
        }
    }

    #[test]
    fn generated_cliffords_are_flagged() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        assert!(random_clifford(&mut rng, 4, 30).is_clifford());
        assert!(random_gaussian(&mut rng, 3, 5, 0).is_gaussian());
    }
}
