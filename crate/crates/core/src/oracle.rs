//! Brute-force references: exhaustive enumeration and dense state vectors.

use nalgebra::DMatrix;
use num_complex::Complex64 as C64;
use num_traits::Zero;

use crate::bits::BitString;
use crate::circuit::boolean::BooleanCircuit;
use crate::circuit::quantum::QuantumCircuit;
use crate::counter::{input_states, InputState};
use crate::error::{Error, Result};

pub const ENUMERATION_LIMIT: usize = 24;
pub const STATE_QUBIT_LIMIT: usize = 12;
pub const OPERATOR_QUBIT_LIMIT: usize = 6;

/// Lane patterns of the low six free bits.
const LANE_BITS: [u64; 6] = [
    0xAAAA_AAAA_AAAA_AAAA,
    0xCCCC_CCCC_CCCC_CCCC,
    0xF0F0_F0F0_F0F0_F0F0,
    0xFF00_FF00_FF00_FF00,
    0xFFFF_0000_FFFF_0000,
    0xFFFF_FFFF_0000_0000,
];

/// `#(x,n,w')` by evaluating the circuit on every completion of the suffix.
/// Inputs above `n` are held at 0.
pub fn enumerate_count(c: &BooleanCircuit, n: usize, suffix: &BitString) -> Result<u64> {
    if n > ENUMERATION_LIMIT {
        return Err(Error::BudgetExceeded {
            what: "enumeration (bits)",
            requested: n,
            limit: ENUMERATION_LIMIT,
        });
    }
    if suffix.len() > n || n > c.n_inputs() {
        return Err(Error::InvalidQuery(format!(
            "need |w'| <= n <= {}, got |w'| = {}, n = {n}",
            c.n_inputs(),
            suffix.len()
        )));
    }
    let fixed = suffix.len();
    let free = n - fixed;
    let low = free.min(6);
    let lanes = if low == 6 { !0u64 } else { (1u64 << (1 << low)) - 1 };
    let mut inputs = vec![0u64; c.n_inputs()];
    for (i, word) in inputs.iter_mut().enumerate().take(fixed) {
        *word = if suffix.bit(i + 1) { !0 } else { 0 };
    }
    let mut total = 0u64;
    for chunk in 0..1u64 << (free - low) {
        for j in 0..free {
            inputs[fixed + j] = if j < 6 {
                LANE_BITS[j]
            } else if (chunk >> (j - 6)) & 1 == 1 {
                !0
            } else {
                0
            };
        }
        total += (c.eval_words(&inputs) & lanes).count_ones() as u64;
    }
    Ok(total)
}

/// A state vector on at most `STATE_QUBIT_LIMIT` qubits, qubit 0 least
/// significant.
#[derive(Clone, Debug, PartialEq)]
pub struct DenseState {
    qubits: usize,
    amps: Vec<C64>,
}

impl DenseState {
    /// Product state, `factors[q]` on qubit `q`.
    pub fn product(factors: &[[C64; 2]]) -> Result<Self> {
        let m = factors.len();
        if m > STATE_QUBIT_LIMIT {
            return Err(Error::BudgetExceeded {
                what: "dense state (qubits)",
                requested: m,
                limit: STATE_QUBIT_LIMIT,
            });
        }
        let amps = (0..1usize << m)
            .map(|i| factors.iter().enumerate().map(|(q, f)| f[(i >> q) & 1]).product())
            .collect();
        Ok(DenseState { qubits: m, amps })
    }

    pub fn basis(qubits: usize, index: usize) -> Result<Self> {
        let factors: Vec<[C64; 2]> = (0..qubits)
            .map(|q| {
                if (index >> q) & 1 == 1 {
                    [C64::zero(), C64::new(1.0, 0.0)]
                } else {
                    [C64::new(1.0, 0.0), C64::zero()]
                }
            })
            .collect();
        Self::product(&factors)
    }

    pub fn qubits(&self) -> usize {
        self.qubits
    }

    pub fn amplitudes(&self) -> &[C64] {
        &self.amps
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amps.iter().map(|a| a.norm_sqr()).sum()
    }

    /// Applies `matrix` to `targets`, `targets[0]` its most significant bit.
    pub fn apply(&mut self, matrix: &DMatrix<C64>, targets: &[usize]) {
        let k = targets.len();
        let dim = 1usize << k;
        let mask: usize = targets.iter().map(|&t| 1usize << t).sum();
        let spread = |base: usize, l: usize| -> usize {
            targets
                .iter()
                .enumerate()
                .fold(base, |acc, (j, &t)| acc | (((l >> (k - 1 - j)) & 1) << t))
        };
        let mut buf = vec![C64::zero(); dim];
        for base in 0..self.amps.len() {
            if base & mask != 0 {
                continue;
            }
            for (l, b) in buf.iter_mut().enumerate() {
                *b = self.amps[spread(base, l)];
            }
            for r in 0..dim {
                let mut s = C64::zero();
                for (c, b) in buf.iter().enumerate() {
                    s += matrix[(r, c)] * b;
                }
                self.amps[spread(base, r)] = s;
            }
        }
    }

    pub fn run(&mut self, c: &QuantumCircuit) {
        for g in c.gates() {
            self.apply(&g.matrix(), &g.targets());
        }
    }

    /// `⟨ψ|Π_q|ψ⟩` with `Π = |1⟩⟨1|` on qubit `q`.
    pub fn probability_one(&self, q: usize) -> f64 {
        self.amps
            .iter()
            .enumerate()
            .filter(|(i, _)| (i >> q) & 1 == 1)
            .map(|(_, a)| a.norm_sqr())
            .sum()
    }
}

fn amplitudes(s: InputState) -> [C64; 2] {
    let h = std::f64::consts::FRAC_1_SQRT_2;
    match s {
        InputState::Zero => [C64::new(1.0, 0.0), C64::zero()],
        InputState::One => [C64::zero(), C64::new(1.0, 0.0)],
        InputState::Plus => [C64::new(h, 0.0), C64::new(h, 0.0)],
    }
}

/// `P(output = 1)` of `c` on the product input `factors`.
pub fn dense_probability(c: &QuantumCircuit, factors: &[[C64; 2]], output: usize) -> Result<f64> {
    if factors.len() != c.qubits() {
        return Err(Error::SiteMismatch {
            left: c.qubits(),
            right: factors.len(),
        });
    }
    let mut psi = DenseState::product(factors)?;
    psi.run(c);
    Ok(psi.probability_one(output))
}

/// `P` of the counter input for `#(x,n,w')` on the circuit's own output.
pub fn dense_count_probability(c: &QuantumCircuit, n: usize, suffix: &BitString) -> Result<f64> {
    let factors: Vec<[C64; 2]> = input_states(n, suffix, c.qubits())?.into_iter().map(amplitudes).collect();
    dense_probability(c, &factors, c.output())
}

/// The circuit unitary, qubit 0 least significant.
pub fn dense_operator(c: &QuantumCircuit) -> Result<DMatrix<C64>> {
    let m = c.qubits();
    if m > OPERATOR_QUBIT_LIMIT {
        return Err(Error::BudgetExceeded {
            what: "dense operator (qubits)",
            requested: m,
            limit: OPERATOR_QUBIT_LIMIT,
        });
    }
    let dim = 1usize << m;
    let mut u = DMatrix::<C64>::zeros(dim, dim);
    for col in 0..dim {
        let mut psi = DenseState::basis(m, col)?;
        psi.run(c);
        u.set_column(col, &nalgebra::DVector::from_column_slice(psi.amplitudes()));
    }
    Ok(u)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::circuit::quantum::{GateName, QuantumGate};
    use crate::circuit::{boolean_to_quantum, parse_dimacs, CnfFormula};
    use crate::generators::{random_clifford, random_cnf};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    const FIG1: &str = "p cnf 4 4\n4 0\n-3 0\n-2 0\n1 0\n";

    #[test]
    fn tautology_counts_everything() {
        let f = CnfFormula::new(3, vec![]).unwrap().to_circuit();
        assert_eq!(enumerate_count(&f, 3, &BitString::empty()).unwrap(), 8);
        assert_eq!(enumerate_count(&f, 3, &"1".parse().unwrap()).unwrap(), 4);
    }

    #[test]
    fn fig1_has_one_solution() {
        let c = parse_dimacs(FIG1).unwrap();
        assert_eq!(enumerate_count(&c, 4, &BitString::empty()).unwrap(), 1);
        assert_eq!(enumerate_count(&c, 4, &"1001".parse().unwrap()).unwrap(), 1);
        assert_eq!(enumerate_count(&c, 4, &"0".parse().unwrap()).unwrap(), 0);
    }

    #[test]
    fn sliced_counts_match_direct_evaluation() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for nvars in [3, 7, 10] {
            let f = random_cnf(&mut rng, nvars, 2 * nvars);
            let c = f.to_circuit();
            for suffix in ["", "1", "01", "110"] {
                let s: BitString = suffix.parse().unwrap();
                let direct = (0..1u64 << nvars)
                    .filter(|&w| BitString::from_u64(w, nvars).has_suffix(&s) && f.eval(w))
                    .count() as u64;
                assert_eq!(enumerate_count(&c, nvars, &s).unwrap(), direct);
                if s.len() == nvars {
                    continue;
                }
                let a = enumerate_count(&c, nvars, &s.extended(false)).unwrap();
                let b = enumerate_count(&c, nvars, &s.extended(true)).unwrap();
                assert_eq!(a + b, direct);
            }
        }
    }

    #[test]
    fn sixteen_variables_finish() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let f = random_cnf(&mut rng, 16, 40);
        let c = f.to_circuit();
        let all = enumerate_count(&c, 16, &BitString::empty()).unwrap();
        let split = enumerate_count(&c, 16, &"0".parse().unwrap()).unwrap() + enumerate_count(&c, 16, &"1".parse().unwrap()).unwrap();
        assert_eq!(all, split);
        assert!(enumerate_count(&c, 25, &BitString::empty()).is_err());
    }

    #[test]
    fn simple_probabilities() {
        let c = QuantumCircuit::new(1, vec![]).unwrap();
        let one = [[C64::zero(), C64::new(1.0, 0.0)]];
        assert!((dense_probability(&c, &one, 0).unwrap() - 1.0).abs() < 1e-15);
        assert!((dense_count_probability(&c, 1, &BitString::empty()).unwrap() - 0.5).abs() < 1e-15);
    }

    #[test]
    fn fig1_probability_is_one_sixteenth() {
        let q = boolean_to_quantum(&parse_dimacs(FIG1).unwrap());
        let p = dense_count_probability(&q, 4, &BitString::empty()).unwrap();
        assert!((p - 1.0 / 16.0).abs() < 1e-12);
        assert!((p * 16.0 - 1.0).abs() < 1e-9);
    }

    #[test]
    fn operators() {
        let c = QuantumCircuit::new(2, vec![]).unwrap();
        assert_eq!(dense_operator(&c).unwrap(), DMatrix::identity(4, 4));
        let x = QuantumCircuit::new(1, vec![QuantumGate::named(GateName::X, &[0])]).unwrap();
        assert_eq!(dense_operator(&x).unwrap(), GateName::X.matrix());
        // CNOT with control qubit 1 flips qubit 0 on indices 2 and 3
        let cx = QuantumCircuit::new(2, vec![QuantumGate::named(GateName::Cnot, &[1, 0])]).unwrap();
        let u = dense_operator(&cx).unwrap();
        assert_eq!(u[(3, 2)], C64::new(1.0, 0.0));
        assert_eq!(u[(2, 3)], C64::new(1.0, 0.0));
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let u = dense_operator(&random_clifford(&mut rng, 4, 30)).unwrap();
        let defect = (u.adjoint() * &u - DMatrix::<C64>::identity(16, 16)).iter().map(|c| c.norm()).fold(0.0, f64::max);
        assert!(defect < 1e-10);
        assert!(dense_operator(&QuantumCircuit::new(7, vec![]).unwrap()).is_err());
    }

    #[test]
    fn state_norm_is_kept() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let c = random_clifford(&mut rng, 8, 50);
        let mut psi = DenseState::product(&vec![[C64::new(0.6, 0.0), C64::new(0.0, 0.8)]; 8]).unwrap();
        psi.run(&c);
        assert!((psi.norm_sqr() - 1.0).abs() < 1e-10);
        assert!(DenseState::basis(13, 0).is_err());
    }
}
