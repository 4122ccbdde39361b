use nalgebra::DMatrix;
use num_bigint::{BigInt, BigUint};
use num_complex::Complex64 as C64;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use tensor_counter::algebraic::{conjugate_pauli, mpo_add, mpo_multiply, pauli_to_mpo, Pauli, PauliString};
use tensor_counter::circuit::Circuit;
use tensor_counter::counter::{CountQuery, Mode};
use tensor_counter::generators::{random_clifford, random_closed_network, random_cnf};
use tensor_counter::geometric::{order_for, OrderKind};
use tensor_counter::oracle::{dense_operator, enumerate_count};
use tensor_counter::search::{Engine, Strategy as Method};
use tensor_counter::tensor::{contract_network, ContractionOrder};
use tensor_counter::BitString;

fn pauli_string(m: usize) -> impl Strategy<Value = PauliString> {
    (prop::collection::vec(0u8..4, m), 0u8..4).prop_map(|(ls, phase)| {
        let letters = ls
            .into_iter()
            .map(|k| [Pauli::I, Pauli::X, Pauli::Y, Pauli::Z][k as usize])
            .collect();
        PauliString::new(letters, phase)
    })
}

fn max_diff(a: &DMatrix<C64>, b: &DMatrix<C64>) -> f64 {
    (a - b).iter().map(|c| c.norm()).fold(0.0, f64::max)
}

fn exact() -> Engine {
    Engine::new(Method::Auto, OrderKind::Auto, Some(Mode::Exact))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn suffix_counts_add_up(seed in any::<u64>(), nvars in 1usize..9, clauses in 1usize..20) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let c = Circuit::Boolean(random_cnf(&mut rng, nvars, clauses).to_circuit());
        let len = rng.gen_range(0..nvars);
        let suffix = BitString::from_u64(rng.gen_range(0..1u64 << len), len);
        let count = |s: BitString| exact().count(&c, &CountQuery::at(nvars, s).unwrap()).unwrap().count;
        let parent = count(suffix.clone());
        prop_assert_eq!(parent, count(suffix.extended(false)) + count(suffix.extended(true)));
    }

    #[test]
    fn probability_scales_to_the_count(seed in any::<u64>(), nvars in 1usize..9, clauses in 1usize..20) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let b = random_cnf(&mut rng, nvars, clauses).to_circuit();
        let len = rng.gen_range(0..=nvars);
        let suffix = BitString::from_u64(rng.gen_range(0..1u64 << len), len);
        let want = enumerate_count(&b, nvars, &suffix).unwrap();
        let q = CountQuery::at(nvars, suffix).unwrap();
        let engine = Engine::new(Method::Auto, OrderKind::Auto, Some(Mode::Probability));
        let r = engine.count(&Circuit::Boolean(b), &q).unwrap();
        prop_assert_eq!(r.count, BigUint::from(want));
        let p = r.probability.unwrap();
        prop_assert!((p * 2f64.powi(q.free_bits() as i32) - want as f64).abs() < 1e-9);
    }

    #[test]
    fn mpo_algebra_matches_dense(a in pauli_string(3), b in pauli_string(3)) {
        let (ma, mb) = (pauli_to_mpo(&a), pauli_to_mpo(&b));
        let sum = mpo_add(&ma, &mb).unwrap().dense().unwrap();
        prop_assert!(max_diff(&sum, &(a.dense() + b.dense())) < 1e-12);
        let prod = mpo_multiply(&ma, &mb).unwrap().dense().unwrap();
        prop_assert!(max_diff(&prod, &(a.dense() * b.dense())) < 1e-12);
        prop_assert!(max_diff(&prod, &a.mul(&b).unwrap().dense()) < 1e-12);
    }

    #[test]
    fn clifford_conjugation_matches_dense(seed in any::<u64>(), p in pauli_string(3)) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let gates = rng.gen_range(0..25);
        let c = random_clifford(&mut rng, 3, gates);
        let u = dense_operator(&c).unwrap();
        let got = conjugate_pauli(&c, &p).unwrap().dense();
        prop_assert!(max_diff(&got, &(u.adjoint() * p.dense() * &u)) < 1e-10);
    }

    #[test]
    fn contraction_order_does_not_change_the_value(seed in any::<u64>(), k in 2usize..8) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let net = random_closed_network::<BigInt, _>(&mut rng, k, 0.5, |r| BigInt::from(r.gen_range(-2..=2)));
        let reference = contract_network(&net, &ContractionOrder::sequential(k)).unwrap();
        for kind in [OrderKind::Minfill, OrderKind::Auto] {
            let (order, _) = order_for(&net, kind).unwrap();
            let value = contract_network(&net, &order).unwrap();
            prop_assert_eq!(value.scalar_value(), reference.scalar_value());
        }
    }

    #[test]
    fn bitstrings_round_trip(value in any::<u64>(), len in 0usize..64) {
        let w = BitString::from_u64(value & ((1u64 << len) - 1), len);
        let text = w.to_string();
        prop_assert_eq!(text.len(), len);
        prop_assert_eq!(text.parse::<BitString>().unwrap(), w);
    }
}
