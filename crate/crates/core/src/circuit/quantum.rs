use std::f64::consts::FRAC_1_SQRT_2;
use std::fmt;

use nalgebra::DMatrix;
use num_complex::Complex64 as C64;

use crate::error::{Error, Result};

const UNITARY_TOL: f64 = 1e-12;

#[derive(Copy, Clone, Debug, PartialEq, Eq, Hash)]
pub enum GateName {
    X,
    Y,
    Z,
    H,
    S,
    Cnot,
    Cz,
    T,
    Toffoli,
    Swap,
}

impl GateName {
    pub const ALL: [GateName; 10] = [
        GateName::X,
        GateName::Y,
        GateName::Z,
        GateName::H,
        GateName::S,
        GateName::Cnot,
        GateName::Cz,
        GateName::T,
        GateName::Toffoli,
        GateName::Swap,
    ];

    pub fn name(self) -> &'static str {
        match self {
            GateName::X => "X",
            GateName::Y => "Y",
            GateName::Z => "Z",
            GateName::H => "H",
            GateName::S => "S",
            GateName::Cnot => "CNOT",
            GateName::Cz => "CZ",
            GateName::T => "T",
            GateName::Toffoli => "Toffoli",
            GateName::Swap => "SWAP",
        }
    }

    pub fn from_name(s: &str) -> Option<Self> {
        GateName::ALL.into_iter().find(|g| g.name().eq_ignore_ascii_case(s))
    }

    pub fn arity(self) -> usize {
        match self {
            GateName::Cnot | GateName::Cz | GateName::Swap => 2,
            GateName::Toffoli => 3,
            _ => 1,
        }
    }

    pub fn is_clifford(self) -> bool {
        !matches!(self, GateName::T | GateName::Toffoli)
    }

    /// Matrix with the first target as the most significant bit.
    pub fn matrix(self) -> DMatrix<C64> {
        let r = |x: f64| C64::new(x, 0.0);
        let (o, z, i) = (r(1.0), r(0.0), C64::new(0.0, 1.0));
        match self {
            GateName::X => DMatrix::from_row_slice(2, 2, &[z, o, o, z]),
            GateName::Y => DMatrix::from_row_slice(2, 2, &[z, -i, i, z]),
            GateName::Z => DMatrix::from_row_slice(2, 2, &[o, z, z, -o]),
            GateName::H => {
                let h = r(FRAC_1_SQRT_2);
                DMatrix::from_row_slice(2, 2, &[h, h, h, -h])
            }
            GateName::S => DMatrix::from_row_slice(2, 2, &[o, z, z, i]),
            GateName::T => DMatrix::from_row_slice(2, 2, &[o, z, z, C64::from_polar(1.0, std::f64::consts::FRAC_PI_4)]),
            GateName::Cnot => permutation_matrix(&[0, 1, 3, 2]),
            GateName::Cz => DMatrix::from_diagonal(&nalgebra::DVector::from_vec(vec![o, o, o, -o])),
            GateName::Swap => permutation_matrix(&[0, 2, 1, 3]),
            GateName::Toffoli => permutation_matrix(&[0, 1, 2, 3, 4, 5, 7, 6]),
        }
    }
}

impl fmt::Display for GateName {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// `|perm[j]⟩⟨j|` summed over `j`.
pub fn permutation_matrix(perm: &[usize]) -> DMatrix<C64> {
    let d = perm.len();
    let mut m = DMatrix::zeros(d, d);
    for (j, &p) in perm.iter().enumerate() {
        m[(p, j)] = C64::new(1.0, 0.0);
    }
    m
}

/// Single-qubit Pauli matrix for `'I' | 'X' | 'Y' | 'Z'`.
pub fn pauli_matrix(letter: char) -> DMatrix<C64> {
    match letter {
        'I' => DMatrix::identity(2, 2),
        'X' => GateName::X.matrix(),
        'Y' => GateName::Y.matrix(),
        'Z' => GateName::Z.matrix(),
        _ => panic!("not a Pauli letter: {letter}"),
    }
}

/// Kronecker product with `factors[0]` most significant.
pub fn kron_all(factors: &[DMatrix<C64>]) -> DMatrix<C64> {
    factors
        .iter()
        .fold(DMatrix::identity(1, 1), |acc: DMatrix<C64>, f| acc.kronecker(f))
}

/// Jordan–Wigner Majorana operator `c_mu` (0-based) on `modes` modes, with
/// mode `j` on qubit `j`, `c_{2j} = Z…Z X_j` and `c_{2j+1} = Z…Z Y_j`, the
/// Z string running over qubits below `j`. Qubit `modes − 1` is the most
/// significant factor.
pub fn majorana_matrix(modes: usize, mu: usize) -> DMatrix<C64> {
    let j = mu / 2;
    let factors: Vec<DMatrix<C64>> = (0..modes)
        .rev()
        .map(|q| {
            let letter = if q < j {
                'Z'
            } else if q > j {
                'I'
            } else if mu.is_multiple_of(2) {
                'X'
            } else {
                'Y'
            };
            pauli_matrix(letter)
        })
        .collect();
    kron_all(&factors)
}

/// A Gaussian (matchgate) gate on the adjacent modes
/// `first_mode .. first_mode + width`, given by a real antisymmetric
/// generator `h` over their `2·width` Majorana operators.
///
/// The gate is `U = exp(½ Σ h_{μν} c_μ c_ν)`, which conjugates
/// `U† c_μ U = Σ_ν exp(2h)_{μν} c_ν`.
#[derive(Clone, Debug, PartialEq)]
pub struct GaussianGate {
    first_mode: usize,
    generator: DMatrix<f64>,
}

impl GaussianGate {
    pub fn new(first_mode: usize, generator: DMatrix<f64>) -> Result<Self> {
        let d = generator.nrows();
        if d == 0 || !d.is_multiple_of(2) || generator.ncols() != d {
            return Err(Error::InvalidCircuit(format!(
                "Gaussian generator must be 2w x 2w, got {}x{}",
                generator.nrows(),
                generator.ncols()
            )));
        }
        for a in 0..d {
            for b in 0..d {
                if generator[(a, b)] != -generator[(b, a)] {
                    return Err(Error::InvalidCircuit("Gaussian generator is not antisymmetric".into()));
                }
            }
        }
        Ok(GaussianGate { first_mode, generator })
    }

    pub fn first_mode(&self) -> usize {
        self.first_mode
    }

    pub fn width(&self) -> usize {
        self.generator.nrows() / 2
    }

    pub fn generator(&self) -> &DMatrix<f64> {
        &self.generator
    }

    /// `exp(2h)` on the gate's own `2·width` Majorana operators.
    pub fn rotation(&self) -> DMatrix<f64> {
        (&self.generator * 2.0).exp()
    }

    /// Unitary on the window qubits, first mode most significant.
    pub fn unitary(&self) -> DMatrix<C64> {
        let w = self.width();
        // local operators with qubit order reversed so the first mode is the MSB
        let local = |mu: usize| -> DMatrix<C64> {
            let j = mu / 2;
            let factors: Vec<DMatrix<C64>> = (0..w)
                .map(|q| {
                    pauli_matrix(if q < j {
                        'Z'
                    } else if q > j {
                        'I'
                    } else if mu.is_multiple_of(2) {
                        'X'
                    } else {
                        'Y'
                    })
                })
                .collect();
            kron_all(&factors)
        };
        let cs: Vec<DMatrix<C64>> = (0..2 * w).map(local).collect();
        let dim = 1 << w;
        let mut gen = DMatrix::<C64>::zeros(dim, dim);
        for a in 0..2 * w {
            for b in 0..2 * w {
                let h = self.generator[(a, b)];
                if h != 0.0 {
                    gen += &cs[a] * &cs[b] * C64::new(0.5 * h, 0.0);
                }
            }
        }
        gen.exp()
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum QuantumGate {
    Named { name: GateName, targets: Vec<usize> },
    Matrix { matrix: DMatrix<C64>, targets: Vec<usize> },
    Gaussian(GaussianGate),
}

impl QuantumGate {
    pub fn named(name: GateName, targets: &[usize]) -> Self {
        QuantumGate::Named {
            name,
            targets: targets.to_vec(),
        }
    }

    /// Qubits acted on; the first is the most significant bit of `matrix()`.
    pub fn targets(&self) -> Vec<usize> {
        match self {
            QuantumGate::Named { targets, .. } | QuantumGate::Matrix { targets, .. } => targets.clone(),
            QuantumGate::Gaussian(g) => (g.first_mode..g.first_mode + g.width()).collect(),
        }
    }

    pub fn matrix(&self) -> DMatrix<C64> {
        match self {
            QuantumGate::Named { name, .. } => name.matrix(),
            QuantumGate::Matrix { matrix, .. } => matrix.clone(),
            QuantumGate::Gaussian(g) => g.unitary(),
        }
    }

    pub fn is_clifford(&self) -> bool {
        matches!(self, QuantumGate::Named { name, .. } if name.is_clifford())
    }

    pub fn is_gaussian(&self) -> bool {
        matches!(self, QuantumGate::Gaussian(_))
    }

    pub fn label(&self) -> String {
        match self {
            QuantumGate::Named { name, targets } => format!("{name} {}", one_based(targets)),
            QuantumGate::Matrix { targets, .. } => format!("MAT {}", one_based(targets)),
            QuantumGate::Gaussian(g) => format!("Gaussian on modes {}..{}", g.first_mode + 1, g.first_mode + g.width()),
        }
    }

    fn validate(&self, qubits: usize) -> Result<()> {
        let targets = self.targets();
        if let Some(&q) = targets.iter().find(|&&q| q >= qubits) {
            return Err(Error::InvalidCircuit(format!(
                "{} addresses qubit {} of {qubits}",
                self.label(),
                q + 1
            )));
        }
        if (1..targets.len()).any(|i| targets[..i].contains(&targets[i])) {
            return Err(Error::InvalidCircuit(format!("{} repeats a qubit", self.label())));
        }
        match self {
            QuantumGate::Named { name, targets } if targets.len() != name.arity() => Err(Error::InvalidCircuit(
                format!("{name} takes {} qubits, got {}", name.arity(), targets.len()),
            )),
            QuantumGate::Matrix { matrix, targets } => {
                let d = 1usize << targets.len();
                if targets.is_empty() || targets.len() > 3 || matrix.nrows() != d || matrix.ncols() != d {
                    return Err(Error::InvalidCircuit(format!(
                        "matrix gate on {} qubits must be {d}x{d} with 1 to 3 targets",
                        targets.len()
                    )));
                }
                let defect = (matrix.adjoint() * matrix - DMatrix::<C64>::identity(d, d))
                    .iter()
                    .map(|c| c.norm())
                    .fold(0.0, f64::max);
                if defect > UNITARY_TOL {
                    return Err(Error::InvalidCircuit(format!(
                        "matrix gate on {} is not unitary (defect {defect:.2e})",
                        one_based(targets)
                    )));
                }
                Ok(())
            }
            _ => Ok(()),
        }
    }

    /// Whether the matrix is a 0/1 permutation.
    pub fn is_permutation(&self) -> bool {
        match self {
            QuantumGate::Named { name, .. } => matches!(
                name,
                GateName::X | GateName::Cnot | GateName::Toffoli | GateName::Swap
            ),
            QuantumGate::Matrix { matrix, .. } => {
                matrix.iter().all(|c| *c == C64::new(0.0, 0.0) || *c == C64::new(1.0, 0.0))
                    && matrix.row_iter().all(|r| r.iter().filter(|c| c.re == 1.0).count() == 1)
            }
            QuantumGate::Gaussian(_) => false,
        }
    }
}

fn one_based(targets: &[usize]) -> String {
    targets.iter().map(|q| (q + 1).to_string()).collect::<Vec<_>>().join(" ")
}

/// A circuit `C = g_M … g_1` on `qubits` qubits.
///
/// Qubits `0..n_inputs` receive the solution bits (qubit `i` carries
/// `w_{i+1}`), the rest start in `|0⟩`. `output` is the measured qubit.
#[derive(Clone, Debug, PartialEq)]
pub struct QuantumCircuit {
    qubits: usize,
    n_inputs: usize,
    output: usize,
    gates: Vec<QuantumGate>,
}

impl QuantumCircuit {
    /// All qubits are inputs and qubit 0 is measured.
    pub fn new(qubits: usize, gates: Vec<QuantumGate>) -> Result<Self> {
        Self::with_io(qubits, qubits, 0, gates)
    }

    pub fn with_io(qubits: usize, n_inputs: usize, output: usize, gates: Vec<QuantumGate>) -> Result<Self> {
        if qubits == 0 {
            return Err(Error::InvalidCircuit("circuit needs at least one qubit".into()));
        }
        if n_inputs > qubits || output >= qubits {
            return Err(Error::InvalidCircuit(format!(
                "{qubits} qubits cannot hold {n_inputs} inputs and output qubit {}",
                output + 1
            )));
        }
        for g in &gates {
            g.validate(qubits)?;
        }
        Ok(QuantumCircuit {
            qubits,
            n_inputs,
            output,
            gates,
        })
    }

    pub fn push(&mut self, gate: QuantumGate) -> Result<()> {
        gate.validate(self.qubits)?;
        self.gates.push(gate);
        Ok(())
    }

    pub fn qubits(&self) -> usize {
        self.qubits
    }

    pub fn n_inputs(&self) -> usize {
        self.n_inputs
    }

    pub fn output(&self) -> usize {
        self.output
    }

    pub fn gates(&self) -> &[QuantumGate] {
        &self.gates
    }

    pub fn is_clifford(&self) -> bool {
        self.gates.iter().all(QuantumGate::is_clifford)
    }

    pub fn is_gaussian(&self) -> bool {
        self.gates.iter().all(QuantumGate::is_gaussian)
    }

    pub fn is_permutation(&self) -> bool {
        self.gates.iter().all(QuantumGate::is_permutation)
    }

    /// Start of the longest run of trailing gates satisfying `pred`.
    pub fn trailing_run(&self, pred: impl Fn(&QuantumGate) -> bool) -> usize {
        self.gates.iter().rposition(|g| !pred(g)).map_or(0, |p| p + 1)
    }

    /// `(g_1 … g_{k}, g_{k+1} … g_M)` on the same qubits and IO.
    pub fn split_at(&self, k: usize) -> (QuantumCircuit, QuantumCircuit) {
        let mut front = self.clone();
        let back_gates = front.gates.split_off(k);
        let back = QuantumCircuit {
            gates: back_gates,
            ..self.clone()
        };
        (front, back)
    }

    /// First gate rejected by `pred`, for error messages.
    pub fn first_offending(&self, pred: impl Fn(&QuantumGate) -> bool) -> Option<String> {
        self.gates.iter().find(|g| !pred(g)).map(QuantumGate::label)
    }
}
