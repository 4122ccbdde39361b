use std::collections::HashMap;
use std::fmt;
use std::str::FromStr;

use num_bigint::BigUint;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::bits::BitString;
use crate::circuit::CheckerNetwork;
use crate::error::{Error, Result};
use crate::geometric::{contract_counter, OrderKind};
use crate::scalar::{CountReadout, Scalar};
use crate::tensor::{contract_shared, IndexId, LabelAlloc, Tensor, TensorNetwork};

/// Residue allowed when reading a probability as a count.
pub const COUNT_TOLERANCE: f64 = 1e-6;

/// How a counter turns the checker into a number.
#[derive(Copy, Clone, Debug, PartialEq, Eq, Hash)]
pub enum Mode {
    /// One layer, unnormalised sums: contracts to `#(x,n,w')`.
    Exact,
    /// Ket and bra layers with the projector: contracts to `P`.
    Probability,
}

impl fmt::Display for Mode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Mode::Exact => "exact",
            Mode::Probability => "probability",
        })
    }
}

impl FromStr for Mode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "exact" => Ok(Mode::Exact),
            "probability" => Ok(Mode::Probability),
            _ => Err(Error::InvalidQuery(format!("unknown mode '{s}'"))),
        }
    }
}

/// `(x, n, w')` with `n' = |w'| ≤ n ≤ n_max`; `x` is held by the caller.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CountQuery {
    n: usize,
    suffix: BitString,
    n_max: usize,
}

impl CountQuery {
    pub fn new(n: usize, suffix: BitString, n_max: usize) -> Result<Self> {
        if suffix.len() > n || n > n_max {
            return Err(Error::InvalidQuery(format!(
                "need |w'| <= n <= n_max, got |w'| = {}, n = {n}, n_max = {n_max}",
                suffix.len()
            )));
        }
        Ok(CountQuery { n, suffix, n_max })
    }

    /// A query with `n_max = n`.
    pub fn at(n: usize, suffix: BitString) -> Result<Self> {
        Self::new(n, suffix, n)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn suffix(&self) -> &BitString {
        &self.suffix
    }

    pub fn n_max(&self) -> usize {
        self.n_max
    }

    /// `n − n'`, the number of summed bits.
    pub fn free_bits(&self) -> usize {
        self.n - self.suffix.len()
    }
}

/// Single-line input state.
#[derive(Copy, Clone, Debug, PartialEq, Eq)]
pub enum InputState {
    Zero,
    One,
    /// `(1,1)/√2` in probability mode, `(1,1)` in exact mode.
    Plus,
}

impl InputState {
    pub fn amplitudes<T: Scalar>(self, mode: Mode) -> Result<[T; 2]> {
        Ok(match self {
            InputState::Zero => [T::one(), T::zero()],
            InputState::One => [T::zero(), T::one()],
            InputState::Plus => match mode {
                Mode::Exact => [T::one(), T::one()],
                Mode::Probability => {
                    let h = T::frac_1_sqrt_2().ok_or_else(|| Error::NumberSystem {
                        system: T::SYSTEM,
                        what: "1/sqrt(2) in an unfolded superposition input".into(),
                    })?;
                    [h.clone(), h]
                }
            },
        })
    }

    /// `|ψ⟩⟨ψ|` as a dimension-4 vector, index `2·ket + bra`.
    pub fn folded<T: Scalar>(self) -> Result<[T; 4]> {
        let (z, o) = (T::zero(), T::one());
        Ok(match self {
            InputState::Zero => [o, z.clone(), z.clone(), z],
            InputState::One => [z.clone(), z.clone(), z, o],
            InputState::Plus => {
                let h = T::half().ok_or_else(|| Error::NumberSystem {
                    system: T::SYSTEM,
                    what: "1/2 in a folded superposition input".into(),
                })?;
                [h.clone(), h.clone(), h.clone(), h]
            }
        })
    }
}

/// States of lines `1..=lines` (index 0 is line 1): the suffix bits on the
/// lowest `n'` lines, superpositions up to line `n`, `|0⟩` above.
pub fn input_states(n: usize, suffix: &BitString, lines: usize) -> Result<Vec<InputState>> {
    if suffix.len() > n || n > lines {
        return Err(Error::InvalidQuery(format!(
            "need |w'| <= n <= lines, got |w'| = {}, n = {n}, lines = {lines}",
            suffix.len()
        )));
    }
    Ok((0..lines)
        .map(|i| {
            if i < suffix.len() {
                if suffix.bit(i + 1) {
                    InputState::One
                } else {
                    InputState::Zero
                }
            } else if i < n {
                InputState::Plus
            } else {
                InputState::Zero
            }
        })
        .collect())
}

/// One vector per label, `labels[i]` taking line `i + 1`.
pub fn input_state_tensors<T: Scalar>(
    n: usize,
    suffix: &BitString,
    labels: &[IndexId],
    mode: Mode,
) -> Result<Vec<Tensor<T>>> {
    input_states(n, suffix, labels.len())?
        .into_iter()
        .zip(labels)
        .map(|(s, &l)| Ok(Tensor::vector(l, s.amplitudes::<T>(mode)?.to_vec())))
        .collect()
}

/// `|1⟩⟨1|` between the ket and bra output legs.
pub fn projector_tensor<T: Scalar>(ket: IndexId, bra: IndexId) -> Tensor<T> {
    Tensor::new(
        vec![ket, bra],
        vec![2, 2],
        vec![T::zero(), T::zero(), T::zero(), T::one()],
    )
    .expect("2x2 projector")
}

/// What a tensor of the counter is.
#[derive(Copy, Clone, Debug, PartialEq, Eq)]
pub enum Role {
    Ket,
    Bra,
    Projector,
    /// Operator site placed between the ket and bra outputs.
    Bridge,
    /// Output selector or ancilla sum of an exact counter.
    Boundary,
}

#[derive(Clone, Debug)]
struct InputLeg {
    ket: IndexId,
    bra: Option<IndexId>,
    state: InputState,
}

/// The closed network of a tensor counter.
///
/// Input vectors are kept symbolic so the same counter can be materialised
/// unfolded (needs `1/√2`) or folded (needs `1/2`).
#[derive(Clone, Debug)]
pub struct Counter<T> {
    mode: Mode,
    query: CountQuery,
    body: Vec<Tensor<T>>,
    roles: Vec<Role>,
    groups: Vec<Vec<usize>>,
    partner: HashMap<IndexId, IndexId>,
    inputs: Vec<InputLeg>,
    alloc: LabelAlloc,
    /// Only ket = bra configurations contribute: the checker is a
    /// permutation and the operator between the layers is diagonal.
    diagonal: bool,
}

impl<T: Scalar> Counter<T> {
    pub fn mode(&self) -> Mode {
        self.mode
    }

    pub fn query(&self) -> &CountQuery {
        &self.query
    }

    /// `log₂ 𝒩 = (n' − n)/2` in probability mode, 0 in exact mode.
    pub fn normalization_log2(&self) -> f64 {
        match self.mode {
            Mode::Exact => 0.0,
            Mode::Probability => -(self.query.free_bits() as f64) / 2.0,
        }
    }

    /// Roles of the non-input tensors, in network order.
    pub fn roles(&self) -> &[Role] {
        &self.roles
    }

    pub fn input_states(&self) -> Vec<InputState> {
        self.inputs.iter().map(|l| l.state).collect()
    }

    /// The unfolded network: body tensors followed by the input vectors.
    pub fn network(&self) -> Result<TensorNetwork<T>> {
        let mut tensors = self.body.clone();
        for leg in &self.inputs {
            let amps = leg.state.amplitudes::<T>(self.mode)?;
            if let Some(b) = leg.bra {
                tensors.push(Tensor::vector(b, amps.iter().map(Scalar::conj).collect()));
            }
            tensors.push(Tensor::vector(leg.ket, amps.to_vec()));
        }
        TensorNetwork::with_alloc(tensors, self.alloc.clone())
    }

    /// Merges each ket/bra pair into one tensor on doubled legs (value
    /// `2·ket + bra`, keeping the ket label) and each input pair into a
    /// dimension-4 vector.
    ///
    /// For a permutation checker under a diagonal operator the doubled legs
    /// keep only their `00` and `11` values, so they stay dimension 2.
    pub(crate) fn fold(&self) -> Result<TensorNetwork<T>> {
        let mut out = Vec::with_capacity(self.groups.len() + self.inputs.len());
        for g in &self.groups {
            let mut t = self.body[g[0]].clone();
            for &k in &g[1..] {
                t = contract_shared(&t, &self.body[k])?;
            }
            for l in t.labels().to_vec() {
                if let Some(&p) = self.partner.get(&l) {
                    if t.axis(p).is_some() {
                        t = t.fuse(l, p)?;
                        if self.diagonal {
                            t = t.select(l, &DIAGONAL)?;
                        }
                    }
                }
            }
            out.push(t);
        }
        for leg in &self.inputs {
            let v = leg.state.folded::<T>()?;
            let v = if self.diagonal { DIAGONAL.map(|k| v[k].clone()).to_vec() } else { v.to_vec() };
            out.push(Tensor::vector(leg.ket, v));
        }
        TensorNetwork::with_alloc(out, self.alloc.clone())
    }
}

/// Positions of `00` and `11` on a fused ket/bra leg.
const DIAGONAL: [usize; 2] = [0, 3];

fn check_query<T: Scalar>(checker: &CheckerNetwork<T>, q: &CountQuery) -> Result<()> {
    if q.n() > checker.n_solution() {
        return Err(Error::InvalidQuery(format!(
            "length {} exceeds the checker's {} solution bits",
            q.n(),
            checker.n_solution()
        )));
    }
    Ok(())
}

/// Builds the counter of `checker` for `q`.
///
/// Exact mode needs a deterministic checker: one layer, inputs `(1,1)`,
/// output fixed to 1, ancilla outputs summed. Probability mode mirrors the
/// checker into a conjugated bra layer, bonds the ancilla outputs bra to
/// ket and puts the projector between the two output legs.
pub fn build_counter<T: Scalar>(checker: &CheckerNetwork<T>, q: &CountQuery, mode: Mode) -> Result<Counter<T>> {
    check_query(checker, q)?;
    match mode {
        Mode::Exact => build_exact(checker, q),
        Mode::Probability => {
            let closure: Vec<IndexId> = checker.ancilla_outputs().to_vec();
            let mut counter = build_layers(checker, q, &closure, |ket, bra, _| {
                Ok(vec![(projector_tensor(ket(checker.output()), bra(checker.output())), Role::Projector)])
            })?;
            counter.diagonal = checker.is_deterministic();
            Ok(counter)
        }
    }
}

fn build_exact<T: Scalar>(checker: &CheckerNetwork<T>, q: &CountQuery) -> Result<Counter<T>> {
    if !checker.is_deterministic() {
        return Err(Error::CheckerViolation(
            "exact-count mode needs a deterministic (0/1 permutation) checker".into(),
        ));
    }
    let mut body: Vec<Tensor<T>> = checker.network().tensors().to_vec();
    let mut roles = vec![Role::Ket; body.len()];
    body.push(Tensor::vector(checker.output(), vec![T::zero(), T::one()]));
    roles.push(Role::Boundary);
    for &a in checker.ancilla_outputs() {
        body.push(Tensor::vector(a, vec![T::one(), T::one()]));
        roles.push(Role::Boundary);
    }
    let groups = (0..body.len()).map(|k| vec![k]).collect();
    let inputs = input_states(q.n(), q.suffix(), checker.lines())?
        .into_iter()
        .zip(checker.inputs())
        .map(|(state, &ket)| InputLeg { ket, bra: None, state })
        .collect();
    Ok(Counter {
        mode: Mode::Exact,
        query: q.clone(),
        body,
        roles,
        groups,
        partner: HashMap::new(),
        inputs,
        alloc: checker.network().alloc().clone(),
        diagonal: false,
    })
}

/// Two-layer counter with caller-supplied tensors between the layers.
///
/// `closure` lists outputs bonded directly bra to ket. `bridge` receives
/// the ket and bra label maps and returns the tensors joining the
/// remaining outputs.
pub(crate) fn build_layers<T: Scalar>(
    checker: &CheckerNetwork<T>,
    q: &CountQuery,
    closure: &[IndexId],
    bridge: impl FnOnce(&dyn Fn(IndexId) -> IndexId, &dyn Fn(IndexId) -> IndexId, &mut LabelAlloc) -> Result<Vec<(Tensor<T>, Role)>>,
) -> Result<Counter<T>> {
    check_query(checker, q)?;
    let mut alloc = checker.network().alloc().clone();
    let offset = alloc.peek();
    let closed: std::collections::HashSet<IndexId> = closure.iter().copied().collect();
    let bra_of = |l: IndexId| if closed.contains(&l) { l } else { IndexId(l.0 + offset) };
    let ket_of = |l: IndexId| l;
    let ket_tensors = checker.network().tensors();
    let mut partner = HashMap::new();
    let mut body = Vec::with_capacity(2 * ket_tensors.len() + 2);
    let mut roles = Vec::with_capacity(body.capacity());
    let mut groups = Vec::with_capacity(ket_tensors.len() + 1);
    for t in ket_tensors {
        let bra = t.conj().relabel(bra_of)?;
        for &l in t.labels() {
            alloc.reserve(bra_of(l));
            if !closed.contains(&l) {
                partner.insert(l, bra_of(l));
            }
        }
        groups.push(vec![body.len(), body.len() + 1]);
        body.push(t.clone());
        roles.push(Role::Ket);
        body.push(bra);
        roles.push(Role::Bra);
    }
    for (t, role) in bridge(&ket_of, &bra_of, &mut alloc)? {
        for &l in t.labels() {
            alloc.reserve(l);
        }
        groups.push(vec![body.len()]);
        body.push(t);
        roles.push(role);
    }
    let inputs = input_states(q.n(), q.suffix(), checker.lines())?
        .into_iter()
        .zip(checker.inputs())
        .map(|(state, &ket)| InputLeg {
            ket,
            bra: Some(bra_of(ket)),
            state,
        })
        .collect();
    Ok(Counter {
        mode: Mode::Probability,
        query: q.clone(),
        body,
        roles,
        groups,
        partner,
        inputs,
        alloc,
        diagonal: false,
    })
}

/// Reads a contraction value as `#(x,n,w')`: the value itself in exact
/// mode, `round(P · 2^{n−n'})` in probability mode.
pub fn count_from_value<T: Scalar>(v: &T, q: &CountQuery, mode: Mode) -> Result<BigUint> {
    let shift = match mode {
        Mode::Exact => 0,
        Mode::Probability => q.free_bits() as u32,
    };
    v.scaled_count(shift, COUNT_TOLERANCE).map_err(|e| match e {
        CountReadout::Negative(x) => Error::NegativeValue(x),
        CountReadout::Residue(r) => Error::Residue {
            value: v.to_c64().re,
            residue: r,
        },
    })
}

/// Outcome of checking the squared-sum condition on sampled inputs.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct CheckerReport {
    pub n: usize,
    pub checked: usize,
    pub exhaustive: bool,
    pub solutions: Vec<BitString>,
    /// Inputs whose summed squared amplitude is neither 0 nor 1.
    pub violations: Vec<(BitString, f64)>,
}

impl CheckerReport {
    pub fn passed(&self) -> bool {
        self.violations.is_empty()
    }
}

/// Tolerance on the 0/1 squared sums.
pub const CHECKER_TOLERANCE: f64 = 1e-9;

/// For each sampled `w` of length `n` (all of them when `2^n ≤ budget`),
/// fixes the inputs to `w` and the output to 1, sums the squared
/// magnitudes over the ancilla outputs and checks the sum is 0 or 1.
pub fn verify_checker<T: Scalar>(checker: &CheckerNetwork<T>, n: usize, budget: usize, seed: u64) -> Result<CheckerReport> {
    if n > checker.n_solution() || n >= 64 {
        return Err(Error::InvalidQuery(format!(
            "length {n} exceeds the checker's {} solution bits",
            checker.n_solution()
        )));
    }
    let total = 1u128 << n;
    let exhaustive = total <= budget as u128;
    let samples: Vec<u64> = if exhaustive {
        (0..total as u64).collect()
    } else {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut s: Vec<u64> = (0..budget).map(|_| rng.gen_range(0..total as u64)).collect();
        s.sort_unstable();
        s.dedup();
        s
    };
    let mut report = CheckerReport {
        n,
        checked: samples.len(),
        exhaustive,
        ..Default::default()
    };
    for w in samples {
        let bits = BitString::from_u64(w, n);
        let q = CountQuery::at(n, bits.clone())?;
        let counter = build_counter(checker, &q, Mode::Probability)?;
        let (v, _) = contract_counter(&counter, OrderKind::Auto)?;
        let x = v.to_c64();
        if (x.re - 1.0).abs() <= CHECKER_TOLERANCE && x.im.abs() <= CHECKER_TOLERANCE {
            report.solutions.push(bits);
        } else if !(x.re.abs() <= CHECKER_TOLERANCE && x.im.abs() <= CHECKER_TOLERANCE) {
            report.violations.push((bits, x.re));
        }
    }
    Ok(report)
}
