//! Boolean, reversible and quantum circuit forms and their lowering to
//! tensor networks.

pub mod boolean;
pub mod dimacs;
pub mod lower;
pub mod netlist;
pub mod quantum;
pub mod reversible;

pub use boolean::{BoolGate, BooleanCircuit, GateKind, Wire};
pub use dimacs::{parse_dimacs, CnfFormula};
pub use lower::{lower_boolean, lower_quantum, lower_quantum_complex, lower_to_network, CheckerNetwork};
pub use netlist::parse_netlist;
pub use quantum::{GateName, GaussianGate, QuantumCircuit, QuantumGate};
pub use reversible::{make_reversible, RevGate, ReversibleCircuit};

/// Either circuit family a netlist can describe.
#[derive(Clone, Debug, PartialEq)]
pub enum Circuit {
    Boolean(BooleanCircuit),
    Quantum(QuantumCircuit),
}

/// The standard permutation-unitary form: NOT to X, CNOT and Toffoli to
/// themselves. Line `i` becomes qubit `i`.
pub fn reversible_to_quantum(c: &ReversibleCircuit) -> QuantumCircuit {
    let gates = c
        .gates()
        .iter()
        .map(|g| match *g {
            RevGate::Not(t) => QuantumGate::named(GateName::X, &[t]),
            RevGate::Cnot { control, target } => QuantumGate::named(GateName::Cnot, &[control, target]),
            RevGate::Toffoli { controls: [a, b], target } => QuantumGate::named(GateName::Toffoli, &[a, b, target]),
        })
        .collect();
    QuantumCircuit::with_io(c.lines(), c.n_inputs(), c.result(), gates).expect("reversible circuit is valid")
}

/// Boolean checker → reversible → quantum.
pub fn boolean_to_quantum(c: &BooleanCircuit) -> QuantumCircuit {
    reversible_to_quantum(&make_reversible(c))
}

impl Circuit {
    /// The quantum form, converting Boolean circuits.
    pub fn to_quantum(&self) -> QuantumCircuit {
        match self {
            Circuit::Boolean(b) => boolean_to_quantum(b),
            Circuit::Quantum(q) => q.clone(),
        }
    }

    pub fn n_solution(&self) -> usize {
        match self {
            Circuit::Boolean(b) => b.n_inputs(),
            Circuit::Quantum(q) => q.n_inputs(),
        }
    }
}
