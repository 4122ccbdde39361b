//! Counting queries under a chosen strategy, and the search-by-counting
//! driver.

use std::fmt;
use std::str::FromStr;

use num_bigint::{BigInt, BigUint};
use num_complex::Complex64 as C64;
use num_traits::Zero;

use crate::algebraic::{contract_concatenated, evolve_projector_gaussian, evolve_projector_stabiliser, MatrixProductOperator};
use crate::bits::BitString;
use crate::circuit::lower::{lower_quantum, lower_to_network};
use crate::circuit::quantum::{QuantumCircuit, QuantumGate};
use crate::circuit::{BooleanCircuit, Circuit, CnfFormula};
use crate::counter::{build_counter, count_from_value, CountQuery, Mode};
use crate::error::{Error, Result};
use crate::geometric::{contract_counter, ContractionReport, OrderKind};

#[derive(Copy, Clone, Debug, PartialEq, Eq, Hash)]
pub enum Strategy {
    Geometric,
    Stabiliser,
    Gaussian,
    Concat,
    Auto,
}

impl fmt::Display for Strategy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Strategy::Geometric => "geometric",
            Strategy::Stabiliser => "stabiliser",
            Strategy::Gaussian => "gaussian",
            Strategy::Concat => "concat",
            Strategy::Auto => "auto",
        })
    }
}

impl FromStr for Strategy {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Ok(match s {
            "geometric" => Strategy::Geometric,
            "stabiliser" | "stabilizer" => Strategy::Stabiliser,
            "gaussian" => Strategy::Gaussian,
            "concat" => Strategy::Concat,
            "auto" => Strategy::Auto,
            _ => return Err(Error::InvalidQuery(format!("unknown strategy '{s}'"))),
        })
    }
}

/// One answered count query.
#[derive(Clone, Debug)]
pub struct CountResult {
    pub count: BigUint,
    /// `P` in probability mode.
    pub probability: Option<f64>,
    pub mode: Mode,
    /// The strategy that ran (never `Auto`).
    pub strategy: Strategy,
    pub report: ContractionReport,
    /// Bond dimension of the evolved projector, for algebraic strategies.
    pub chi: Option<usize>,
}

/// Answers `#(x,n,w')` for a circuit.
#[derive(Copy, Clone, Debug, PartialEq, Eq)]
pub struct Engine {
    pub strategy: Strategy,
    pub order: OrderKind,
    /// `None` picks exact for Boolean circuits, probability for quantum.
    pub mode: Option<Mode>,
}

impl Default for Engine {
    fn default() -> Self {
        Engine {
            strategy: Strategy::Auto,
            order: OrderKind::Auto,
            mode: None,
        }
    }
}

impl Engine {
    pub fn new(strategy: Strategy, order: OrderKind, mode: Option<Mode>) -> Self {
        Engine { strategy, order, mode }
    }

    pub fn mode_for(&self, c: &Circuit) -> Mode {
        self.mode.unwrap_or(match c {
            Circuit::Boolean(_) => Mode::Exact,
            Circuit::Quantum(_) => Mode::Probability,
        })
    }

    /// The strategy `count` would run on `c`.
    pub fn resolve(&self, c: &Circuit) -> Result<Strategy> {
        let mode = self.mode_for(c);
        if mode == Mode::Exact {
            return match self.strategy {
                Strategy::Auto | Strategy::Geometric => Ok(Strategy::Geometric),
                s => Err(Error::inapplicable(s, "exact-count mode runs on the geometric strategy only")),
            };
        }
        if self.strategy != Strategy::Auto {
            return Ok(self.strategy);
        }
        let qc = c.to_quantum();
        Ok(if qc.is_clifford() {
            Strategy::Stabiliser
        } else if qc.is_gaussian() {
            Strategy::Gaussian
        } else if back_split(&qc).is_some() {
            Strategy::Concat
        } else {
            Strategy::Geometric
        })
    }

    pub fn count(&self, c: &Circuit, q: &CountQuery) -> Result<CountResult> {
        let mode = self.mode_for(c);
        let strategy = self.resolve(c)?;
        if mode == Mode::Exact {
            let checker = lower_to_network::<BigInt>(c)?;
            let counter = build_counter(&checker, q, Mode::Exact)?;
            let (v, report) = contract_counter(&counter, self.order)?;
            return Ok(CountResult {
                count: count_from_value(&v, q, mode)?,
                probability: None,
                mode,
                strategy,
                report,
                chi: None,
            });
        }
        let (v, strategy, report, chi) = self.evaluate_probability(c, q)?;
        Ok(CountResult {
            count: count_from_value(&v, q, mode)?,
            probability: Some(v.re),
            mode,
            strategy,
            report,
            chi,
        })
    }

    /// `P` for the query's input state, whether or not `c` is a checker.
    pub fn probability(&self, c: &Circuit, q: &CountQuery) -> Result<f64> {
        Ok(self.evaluate_probability(c, q)?.0.re)
    }

    fn evaluate_probability(&self, c: &Circuit, q: &CountQuery) -> Result<(C64, Strategy, ContractionReport, Option<usize>)> {
        let probe = Engine {
            mode: Some(Mode::Probability),
            ..*self
        };
        let strategy = probe.resolve(c)?;
        let qc = c.to_quantum();
        let (v, report, chi) = match strategy {
            Strategy::Geometric => {
                let counter = build_counter(&lower_quantum::<C64>(&qc)?, q, Mode::Probability)?;
                let (v, r) = contract_counter(&counter, self.order)?;
                (v, r, None)
            }
            Strategy::Stabiliser => {
                if let Some(g) = qc.first_offending(QuantumGate::is_clifford) {
                    return Err(Error::inapplicable(strategy, format!("gate {g} is not Clifford")));
                }
                self.concat(&qc.split_at(0), evolve_projector_stabiliser, q)?
            }
            Strategy::Gaussian => {
                if let Some(g) = qc.first_offending(QuantumGate::is_gaussian) {
                    return Err(Error::inapplicable(strategy, format!("gate {g} is not Gaussian")));
                }
                self.concat(&qc.split_at(0), evolve_projector_gaussian, q)?
            }
            Strategy::Concat => match back_split(&qc) {
                Some((k, Strategy::Stabiliser)) => self.concat(&qc.split_at(k), evolve_projector_stabiliser, q)?,
                Some((k, _)) => self.concat(&qc.split_at(k), evolve_projector_gaussian, q)?,
                None => {
                    return Err(Error::inapplicable(
                        strategy,
                        format!(
                            "the last gate {} is neither Clifford nor Gaussian",
                            qc.gates().last().map(QuantumGate::label).unwrap_or_default()
                        ),
                    ))
                }
            },
            Strategy::Auto => unreachable!("resolved above"),
        };
        Ok((v, strategy, report, chi))
    }

    fn concat(
        &self,
        (front, back): &(QuantumCircuit, QuantumCircuit),
        evolve: fn(&QuantumCircuit) -> Result<MatrixProductOperator>,
        q: &CountQuery,
    ) -> Result<(C64, ContractionReport, Option<usize>)> {
        let mpo = evolve(back)?;
        let (v, r) = contract_concatenated(&lower_quantum::<C64>(front)?, &mpo, q, self.order)?;
        Ok((v, r, Some(mpo.chi())))
    }
}

/// Where the longest non-empty trailing Clifford or Gaussian run starts,
/// leaving a non-empty front. Clifford wins ties.
fn back_split(qc: &QuantumCircuit) -> Option<(usize, Strategy)> {
    let m = qc.gates().len();
    let kc = qc.trailing_run(QuantumGate::is_clifford);
    let kg = qc.trailing_run(QuantumGate::is_gaussian);
    let (k, s) = if kc <= kg { (kc, Strategy::Stabiliser) } else { (kg, Strategy::Gaussian) };
    (k > 0 && k < m).then_some((k, s))
}

/// Checkers for the solution lengths of one instance.
pub trait CheckerFamily {
    /// Lengths with a checker, ascending, up to `n_max`.
    fn lengths(&self, n_max: usize) -> Vec<usize>;

    fn checker(&self, n: usize) -> Result<Circuit>;
}

/// A single checker whose solution length is its input count.
#[derive(Clone, Debug)]
pub struct FixedLength(pub Circuit);

impl CheckerFamily for FixedLength {
    fn lengths(&self, n_max: usize) -> Vec<usize> {
        let n = self.0.n_solution();
        if (1..=n_max).contains(&n) {
            vec![n]
        } else {
            vec![]
        }
    }

    fn checker(&self, _n: usize) -> Result<Circuit> {
        Ok(self.0.clone())
    }
}

/// The empty clause at every length: never satisfiable.
#[derive(Copy, Clone, Debug, Default)]
pub struct Contradiction;

impl CheckerFamily for Contradiction {
    fn lengths(&self, n_max: usize) -> Vec<usize> {
        (1..=n_max).collect()
    }

    fn checker(&self, n: usize) -> Result<Circuit> {
        Ok(Circuit::Boolean(CnfFormula::new(n, vec![vec![]])?.to_circuit()))
    }
}

/// Checkers built on demand by a closure.
pub struct FnFamily<F>(pub F);

impl<F: Fn(usize) -> Result<Option<Circuit>>> CheckerFamily for FnFamily<F> {
    fn lengths(&self, n_max: usize) -> Vec<usize> {
        (1..=n_max).filter(|&n| matches!((self.0)(n), Ok(Some(_)))).collect()
    }

    fn checker(&self, n: usize) -> Result<Circuit> {
        (self.0)(n)?.ok_or_else(|| Error::InvalidQuery(format!("no checker for length {n}")))
    }
}

#[derive(Copy, Clone, Debug, PartialEq, Eq)]
pub enum Source {
    Queried,
    Inferred,
}

impl fmt::Display for Source {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Source::Queried => "queried",
            Source::Inferred => "inferred",
        })
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TraceRow {
    pub n: usize,
    pub suffix: BitString,
    pub count: BigUint,
    pub source: Source,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Status {
    Found(BitString),
    NoneExists,
}

#[derive(Clone, Debug)]
pub struct SearchOutcome {
    pub status: Status,
    pub n_max: usize,
    pub trace: Vec<TraceRow>,
    /// Queries with the empty suffix.
    pub sweep_queries: usize,
    /// Queries with a non-empty suffix.
    pub suffix_queries: usize,
}

impl SearchOutcome {
    pub fn solution(&self) -> Option<&BitString> {
        match &self.status {
            Status::Found(w) => Some(w),
            Status::NoneExists => None,
        }
    }

    pub fn total_queries(&self) -> usize {
        self.sweep_queries + self.suffix_queries
    }

    pub fn trace_tsv(&self) -> String {
        let mut s = String::from("n\tsuffix\tcount\tsource\n");
        for r in &self.trace {
            s.push_str(&format!("{}\t{}\t{}\t{}\n", r.n, r.suffix, r.count, r.source));
        }
        s
    }
}

/// Search by counting: the first length with a non-zero count, then one
/// suffix bit at a time from `w_1` upward. A zero count for the
/// 0-extension makes the bit 1 with the parent's count; `paranoid` queries
/// that branch too.
pub fn find(family: &dyn CheckerFamily, n_max: usize, engine: &Engine, paranoid: bool) -> Result<SearchOutcome> {
    let mut out = SearchOutcome {
        status: Status::NoneExists,
        n_max,
        trace: Vec::new(),
        sweep_queries: 0,
        suffix_queries: 0,
    };
    for n in family.lengths(n_max) {
        let c = family.checker(n)?;
        let mut parent = engine.count(&c, &CountQuery::at(n, BitString::empty())?)?.count;
        out.sweep_queries += 1;
        out.trace.push(row(n, BitString::empty(), parent.clone(), Source::Queried));
        if parent.is_zero() {
            continue;
        }
        let mut suffix = BitString::empty();
        for _ in 0..n {
            let zero = suffix.extended(false);
            let c0 = engine.count(&c, &CountQuery::at(n, zero.clone())?)?.count;
            out.suffix_queries += 1;
            out.trace.push(row(n, zero.clone(), c0.clone(), Source::Queried));
            let one = suffix.extended(true);
            let c1 = if paranoid {
                let c1 = engine.count(&c, &CountQuery::at(n, one.clone())?)?.count;
                out.suffix_queries += 1;
                out.trace.push(row(n, one.clone(), c1.clone(), Source::Queried));
                if &c0 + &c1 != parent {
                    return Err(Error::CheckerViolation(format!(
                        "counts {c0} + {c1} for suffixes {zero} and {one} do not add up to {parent}"
                    )));
                }
                c1
            } else {
                BigUint::zero()
            };
            if !c0.is_zero() {
                suffix = zero;
                parent = c0;
            } else {
                if !paranoid {
                    out.trace.push(row(n, one.clone(), parent.clone(), Source::Inferred));
                } else {
                    parent = c1;
                }
                suffix = one;
            }
        }
        confirm(&c, &suffix, engine)?;
        out.status = Status::Found(suffix);
        return Ok(out);
    }
    Ok(out)
}

fn row(n: usize, suffix: BitString, count: BigUint, source: Source) -> TraceRow {
    TraceRow { n, suffix, count, source }
}

/// The checker must accept the returned solution.
fn confirm(c: &Circuit, w: &BitString, engine: &Engine) -> Result<()> {
    let accepted = match c {
        Circuit::Boolean(b) if b.n_inputs() == w.len() => b.eval(w.to_u64()),
        _ => engine.count(c, &CountQuery::at(w.len(), w.clone())?)?.count == BigUint::from(1u8),
    };
    if accepted {
        Ok(())
    } else {
        Err(Error::CheckerViolation(format!("the checker rejects the found solution {w}")))
    }
}

/// Convenience wrapper for a single Boolean checker.
pub fn find_boolean(c: &BooleanCircuit, engine: &Engine, paranoid: bool) -> Result<SearchOutcome> {
    find(&FixedLength(Circuit::Boolean(c.clone())), c.n_inputs(), engine, paranoid)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::circuit::parse_dimacs;
    use crate::generators::random_cnf;
    use crate::oracle::enumerate_count;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    const FIG1: &str = "p cnf 4 4\n4 0\n-3 0\n-2 0\n1 0\n";

    fn fig1() -> Circuit {
        Circuit::Boolean(parse_dimacs(FIG1).unwrap())
    }

    fn q(n: usize, s: &str) -> CountQuery {
        CountQuery::at(n, s.parse().unwrap()).unwrap()
    }

    #[test]
    fn tautology_counts_all() {
        let c = Circuit::Boolean(CnfFormula::new(5, vec![]).unwrap().to_circuit());
        let r = Engine::default().count(&c, &q(5, "")).unwrap();
        assert_eq!(r.count, BigUint::from(32u32));
        assert_eq!(r.strategy, Strategy::Geometric);
    }

    #[test]
    fn fig1_counts_in_every_strategy() {
        let c = fig1();
        for (s, mode) in [
            (Strategy::Auto, None),
            (Strategy::Geometric, Some(Mode::Probability)),
            (Strategy::Auto, Some(Mode::Probability)),
        ] {
            let e = Engine::new(s, OrderKind::Auto, mode);
            for (suffix, expected) in [("", 1u32), ("0", 0), ("1", 1), ("01", 1), ("001", 1), ("1001", 1), ("0001", 0)] {
                assert_eq!(e.count(&c, &q(4, suffix)).unwrap().count, BigUint::from(expected), "{s} {suffix}");
            }
        }
    }

    #[test]
    fn copied_output_runs_concatenated() {
        use crate::circuit::boolean_to_quantum;
        use crate::circuit::quantum::GateName;
        let inner = boolean_to_quantum(&parse_dimacs(FIG1).unwrap());
        let n = inner.qubits();
        let mut gates = inner.gates().to_vec();
        gates.push(QuantumGate::named(GateName::Cnot, &[inner.output(), n]));
        let c = Circuit::Quantum(QuantumCircuit::with_io(n + 1, 4, n, gates).unwrap());
        let auto = Engine::default();
        assert_eq!(auto.resolve(&c).unwrap(), Strategy::Concat);
        for suffix in ["", "0", "1", "001", "0001", "1001"] {
            let a = auto.count(&c, &q(4, suffix)).unwrap();
            let g = Engine::new(Strategy::Geometric, OrderKind::Auto, None).count(&c, &q(4, suffix)).unwrap();
            assert_eq!(a.count, g.count, "{suffix}");
            assert_eq!(a.chi, Some(2));
            assert!((a.probability.unwrap() - g.probability.unwrap()).abs() < 1e-12);
        }
    }

    #[test]
    fn fig1_search_trace() {
        let out = find(&FixedLength(fig1()), 4, &Engine::default(), false).unwrap();
        assert_eq!(out.solution().unwrap().to_string(), "1001");
        let rows: Vec<(String, u32, Source)> = out
            .trace
            .iter()
            .map(|r| (r.suffix.to_string(), r.count.to_u32_digits().first().copied().unwrap_or(0), r.source))
            .collect();
        use Source::*;
        assert_eq!(
            rows,
            vec![
                ("".into(), 1, Queried),
                ("0".into(), 0, Queried),
                ("1".into(), 1, Inferred),
                ("01".into(), 1, Queried),
                ("001".into(), 1, Queried),
                ("0001".into(), 0, Queried),
                ("1001".into(), 1, Inferred),
            ]
        );
        assert_eq!((out.sweep_queries, out.suffix_queries), (1, 4));
        let paranoid = find(&FixedLength(fig1()), 4, &Engine::default(), true).unwrap();
        assert_eq!(paranoid.solution(), out.solution());
        assert_eq!(paranoid.suffix_queries, 8);
        assert!(paranoid.trace.iter().all(|r| r.source == Source::Queried));
    }

    #[test]
    fn contradiction_sweeps_every_length() {
        let out = find(&Contradiction, 6, &Engine::default(), false).unwrap();
        assert_eq!(out.status, Status::NoneExists);
        assert_eq!(out.trace.len(), 6);
        assert!(out.trace.iter().all(|r| r.count.is_zero()));
    }

    #[test]
    fn random_counts_match_enumeration() {
        let mut rng = ChaCha8Rng::seed_from_u64(17);
        for _ in 0..5 {
            let f = random_cnf(&mut rng, 10, 25);
            let b = f.to_circuit();
            let c = Circuit::Boolean(b.clone());
            for _ in 0..3 {
                let len = rng.gen_range(0..5);
                let s = BitString::from_u64(rng.gen_range(0..1u64 << len), len);
                let expected = enumerate_count(&b, 10, &s).unwrap();
                let got = Engine::default().count(&c, &CountQuery::at(10, s).unwrap()).unwrap();
                assert_eq!(got.count, BigUint::from(expected));
            }
        }
    }

    #[test]
    fn found_solution_is_smallest_by_suffix() {
        let mut rng = ChaCha8Rng::seed_from_u64(23);
        let mut found = 0;
        while found < 3 {
            let f = random_cnf(&mut rng, 12, 30);
            let b = f.to_circuit();
            let sols: Vec<u64> = (0..1u64 << 12).filter(|&w| f.eval(w)).collect();
            let out = find_boolean(&b, &Engine::default(), false).unwrap();
            match out.solution() {
                None => assert!(sols.is_empty()),
                Some(w) => {
                    // bit-reversed order puts w_1 first
                    let key = |w: u64| w.reverse_bits();
                    let best = *sols.iter().min_by_key(|&&w| key(w)).unwrap();
                    assert_eq!(w.to_u64(), best);
                    found += 1;
                }
            }
        }
    }

    #[test]
    fn inapplicable_strategies_name_the_gate() {
        let e = Engine::new(Strategy::Stabiliser, OrderKind::Auto, None);
        let err = e.count(&fig1(), &q(4, "")).unwrap_err();
        assert!(matches!(err, Error::StrategyInapplicable { .. }));
        let e = Engine::new(Strategy::Stabiliser, OrderKind::Auto, Some(Mode::Probability));
        let err = e.count(&fig1(), &q(4, "")).unwrap_err().to_string();
        assert!(err.contains("Toffoli") || err.contains("TOFFOLI"), "{err}");
    }
}
