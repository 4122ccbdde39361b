use std::fmt;
use std::str::FromStr;

use nalgebra::DMatrix;
use num_complex::Complex64 as C64;

use crate::circuit::quantum::{kron_all, pauli_matrix, GateName, QuantumCircuit, QuantumGate};
use crate::error::{Error, Result};

#[derive(Copy, Clone, Debug, PartialEq, Eq, Hash)]
pub enum Pauli {
    I,
    X,
    Y,
    Z,
}

impl Pauli {
    pub fn letter(self) -> char {
        match self {
            Pauli::I => 'I',
            Pauli::X => 'X',
            Pauli::Y => 'Y',
            Pauli::Z => 'Z',
        }
    }

    fn from_letter(c: char) -> Option<Self> {
        match c {
            'I' => Some(Pauli::I),
            'X' => Some(Pauli::X),
            'Y' => Some(Pauli::Y),
            'Z' => Some(Pauli::Z),
            _ => None,
        }
    }

    fn bits(self) -> (bool, bool) {
        match self {
            Pauli::I => (false, false),
            Pauli::X => (true, false),
            Pauli::Y => (true, true),
            Pauli::Z => (false, true),
        }
    }

    fn from_bits(x: bool, z: bool) -> Self {
        match (x, z) {
            (false, false) => Pauli::I,
            (true, false) => Pauli::X,
            (true, true) => Pauli::Y,
            (false, true) => Pauli::Z,
        }
    }

    /// `self · other = i^k · result`.
    fn times(self, other: Pauli) -> (u8, Pauli) {
        use Pauli::*;
        let (x1, z1) = self.bits();
        let (x2, z2) = other.bits();
        let result = Pauli::from_bits(x1 ^ x2, z1 ^ z2);
        let k = match (self, other) {
            (X, Y) | (Y, Z) | (Z, X) => 1,
            (Y, X) | (Z, Y) | (X, Z) => 3,
            _ => 0,
        };
        (k, result)
    }

    pub fn matrix(self) -> DMatrix<C64> {
        pauli_matrix(self.letter())
    }
}

/// `i^phase · σ_{m−1} ⊗ … ⊗ σ_0`, letter `q` acting on qubit `q`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct PauliString {
    letters: Vec<Pauli>,
    phase: u8,
}

impl PauliString {
    pub fn identity(m: usize) -> Self {
        PauliString {
            letters: vec![Pauli::I; m],
            phase: 0,
        }
    }

    pub fn single(m: usize, qubit: usize, p: Pauli) -> Self {
        let mut s = Self::identity(m);
        s.letters[qubit] = p;
        s
    }

    pub fn new(letters: Vec<Pauli>, phase: u8) -> Self {
        PauliString { letters, phase: phase % 4 }
    }

    pub fn qubits(&self) -> usize {
        self.letters.len()
    }

    pub fn letters(&self) -> &[Pauli] {
        &self.letters
    }

    /// Exponent `k` of the phase `i^k`.
    pub fn phase(&self) -> u8 {
        self.phase
    }

    pub fn phase_value(&self) -> C64 {
        [C64::new(1.0, 0.0), C64::new(0.0, 1.0), C64::new(-1.0, 0.0), C64::new(0.0, -1.0)][self.phase as usize]
    }

    pub fn times_phase(mut self, k: u8) -> Self {
        self.phase = (self.phase + k) % 4;
        self
    }

    pub fn mul(&self, other: &PauliString) -> Result<PauliString> {
        if self.qubits() != other.qubits() {
            return Err(Error::SiteMismatch {
                left: self.qubits(),
                right: other.qubits(),
            });
        }
        let mut phase = self.phase + other.phase;
        let letters = self
            .letters
            .iter()
            .zip(&other.letters)
            .map(|(&a, &b)| {
                let (k, p) = a.times(b);
                phase += k;
                p
            })
            .collect();
        Ok(PauliString { letters, phase: phase % 4 })
    }

    /// Dense `2^m × 2^m` matrix, qubit 0 least significant.
    pub fn dense(&self) -> DMatrix<C64> {
        let factors: Vec<DMatrix<C64>> = self.letters.iter().rev().map(|p| p.matrix()).collect();
        kron_all(&factors) * self.phase_value()
    }
}

impl fmt::Display for PauliString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(["+", "+i", "-", "-i"][self.phase as usize])?;
        for p in self.letters.iter().rev() {
            write!(f, "{}", p.letter())?;
        }
        Ok(())
    }
}

impl FromStr for PauliString {
    type Err = Error;

    /// `[+|-][i]LETTERS`, highest qubit first.
    fn from_str(s: &str) -> Result<Self> {
        let (sign, rest) = match s.as_bytes().first() {
            Some(b'-') => (2u8, &s[1..]),
            Some(b'+') => (0, &s[1..]),
            _ => (0, s),
        };
        let (imag, rest) = match rest.strip_prefix('i') {
            Some(r) => (1u8, r),
            None => (0, rest),
        };
        let mut letters = Vec::with_capacity(rest.len());
        for c in rest.chars().rev() {
            letters.push(Pauli::from_letter(c).ok_or_else(|| Error::parse(1, format!("'{c}' is not a Pauli letter")))?);
        }
        Ok(PauliString::new(letters, sign + imag))
    }
}

/// Images of `X_q` and `Z_q` for the qubits `q` a gate touches, under
/// `g† · g`.
fn generator_image(gate: GateName, targets: &[usize], m: usize, q: usize, x: bool) -> PauliString {
    use Pauli::*;
    let one = |qubit, p| PauliString::single(m, qubit, p);
    let two = |a, pa, b, pb| {
        let mut s = PauliString::identity(m);
        s.letters[a] = pa;
        s.letters[b] = pb;
        s
    };
    match (gate, x) {
        (GateName::X, true) => one(q, X),
        (GateName::X, false) => one(q, Z).times_phase(2),
        (GateName::Y, true) => one(q, X).times_phase(2),
        (GateName::Y, false) => one(q, Z).times_phase(2),
        (GateName::Z, true) => one(q, X).times_phase(2),
        (GateName::Z, false) => one(q, Z),
        (GateName::H, true) => one(q, Z),
        (GateName::H, false) => one(q, X),
        (GateName::S, true) => one(q, Y).times_phase(2),
        (GateName::S, false) => one(q, Z),
        (GateName::Cnot, _) => {
            let (c, t) = (targets[0], targets[1]);
            match (q == c, x) {
                (true, true) => two(c, X, t, X),
                (true, false) => one(c, Z),
                (false, true) => one(t, X),
                (false, false) => two(c, Z, t, Z),
            }
        }
        (GateName::Cz, _) => {
            let other = if q == targets[0] { targets[1] } else { targets[0] };
            if x {
                two(q, X, other, Z)
            } else {
                one(q, Z)
            }
        }
        (GateName::Swap, _) => {
            let other = if q == targets[0] { targets[1] } else { targets[0] };
            one(other, if x { X } else { Z })
        }
        (GateName::T | GateName::Toffoli, _) => unreachable!("non-Clifford gates are rejected earlier"),
    }
}

fn conjugate_by_gate(gate: GateName, targets: &[usize], p: &PauliString) -> PauliString {
    let m = p.qubits();
    let mut rest = p.clone();
    let mut image = PauliString::identity(m);
    for &q in targets {
        let letter = p.letters[q];
        rest.letters[q] = Pauli::I;
        // Y = i·X·Z
        let (x, z) = letter.bits();
        if letter == Pauli::Y {
            image.phase = (image.phase + 1) % 4;
        }
        if x {
            image = image.mul(&generator_image(gate, targets, m, q, true)).expect("same size");
        }
        if z {
            image = image.mul(&generator_image(gate, targets, m, q, false)).expect("same size");
        }
    }
    rest.mul(&image).expect("same size")
}

/// `C† p C` for a Clifford circuit `C = g_M … g_1`, gate by gate from
/// `g_M` inward.
pub fn conjugate_pauli(circ: &QuantumCircuit, p: &PauliString) -> Result<PauliString> {
    if p.qubits() != circ.qubits() {
        return Err(Error::SiteMismatch {
            left: circ.qubits(),
            right: p.qubits(),
        });
    }
    let mut cur = p.clone();
    for g in circ.gates().iter().rev() {
        match g {
            QuantumGate::Named { name, targets } if name.is_clifford() => {
                cur = conjugate_by_gate(*name, targets, &cur);
            }
            other => return Err(Error::inapplicable("stabiliser", format!("gate {} is not Clifford", other.label()))),
        }
    }
    Ok(cur)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::generators::random_clifford;
    use crate::oracle::dense_operator;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn max_diff(a: &DMatrix<C64>, b: &DMatrix<C64>) -> f64 {
        (a - b).iter().map(|c| c.norm()).fold(0.0, f64::max)
    }

    #[test]
    fn hadamard_maps_z_to_x() {
        let c = QuantumCircuit::new(1, vec![QuantumGate::named(GateName::H, &[0])]).unwrap();
        let out = conjugate_pauli(&c, &"Z".parse().unwrap()).unwrap();
        assert_eq!(out.to_string(), "+X");
    }

    #[test]
    fn s_conjugation_follows_the_matrix() {
        let c = QuantumCircuit::new(1, vec![QuantumGate::named(GateName::S, &[0])]).unwrap();
        let out = conjugate_pauli(&c, &"X".parse().unwrap()).unwrap();
        assert_eq!(out.to_string(), "-Y");
        let s = GateName::S.matrix();
        let dense = s.adjoint() * Pauli::X.matrix() * &s;
        assert!(max_diff(&dense, &out.dense()) < 1e-15);
        assert_eq!(conjugate_pauli(&c, &"Y".parse().unwrap()).unwrap().to_string(), "+X");
    }

    #[test]
    fn products_track_phase() {
        let x: PauliString = "X".parse().unwrap();
        let y: PauliString = "Y".parse().unwrap();
        assert_eq!(x.mul(&y).unwrap().to_string(), "+iZ");
        assert_eq!(y.mul(&x).unwrap().to_string(), "-iZ");
        let a: PauliString = "-iXYZ".parse().unwrap();
        assert!(max_diff(&a.mul(&a).unwrap().dense(), &(a.dense() * a.dense())) < 1e-15);
    }

    #[test]
    fn random_cliffords_match_dense_conjugation() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..20 {
            let c = random_clifford(&mut rng, 6, 20);
            let u = dense_operator(&c).unwrap();
            let p = PauliString::single(6, 5, Pauli::Z);
            let out = conjugate_pauli(&c, &p).unwrap();
            let dense = u.adjoint() * p.dense() * &u;
            assert!(max_diff(&dense, &out.dense()) < 1e-10);
        }
    }

    #[test]
    fn every_generator_image_matches_dense() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for _ in 0..50 {
            let c = random_clifford(&mut rng, 3, 1);
            let u = dense_operator(&c).unwrap();
            for q in 0..3 {
                for p in [Pauli::X, Pauli::Y, Pauli::Z] {
                    let s = PauliString::single(3, q, p);
                    let out = conjugate_pauli(&c, &s).unwrap();
                    assert!(max_diff(&(u.adjoint() * s.dense() * &u), &out.dense()) < 1e-12, "{:?} {s}", c.gates());
                }
            }
        }
    }

    #[test]
    fn non_clifford_is_rejected() {
        let c = QuantumCircuit::new(1, vec![QuantumGate::named(GateName::T, &[0])]).unwrap();
        let err = conjugate_pauli(&c, &"Z".parse().unwrap()).unwrap_err();
        assert!(err.to_string().contains("T 1"));
    }

    #[test]
    fn text_round_trip() {
        for s in ["+IXYZ", "-iZZ", "+iX", "-I"] {
            assert_eq!(s.parse::<PauliString>().unwrap().to_string(), s);
        }
        assert!("XQ".parse::<PauliString>().is_err());
    }
}
