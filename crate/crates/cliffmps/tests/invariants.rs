use std::path::PathBuf;

use cliffmps::circuit::{Circuit, Gate};
use cliffmps::clifford::CliffordTableau;
use cliffmps::ensemble::sample_cmps;
use cliffmps::experiments::{run, ExperimentConfig, ExperimentKind};
use cliffmps::io::{decode_mps, encode_mps};
use cliffmps::mps::MpsState;
use cliffmps::numeric::Rng;
use cliffmps::pauli::PauliString;
use cliffmps::statevector::StateVector;
use proptest::prelude::*;

fn pauli(n: usize) -> impl Strategy<Value = PauliString> {
    (any::<u64>(), any::<u64>(), 0u8..4).prop_map(move |(x, z, ph)| {
        let mask = (1u64 << n) - 1;
        PauliString::from_masks(n, x & mask, z & mask).with_phase_exponent(ph)
    })
}

fn gate(n: usize) -> impl Strategy<Value = Gate> {
    (0usize..4, 0..n, 1..n.max(2)).prop_map(move |(kind, q, off)| match kind {
        0 => Gate::H(q),
        1 => Gate::S(q),
        2 => Gate::T(q),
        _ => Gate::Cnot(q, (q + off) % n.max(2)),
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn random_tableaux_are_symplectic_and_invertible(n in 1usize..12, seed: u64) {
        let mut rng = Rng::new(seed);
        let a = CliffordTableau::random(n, &mut rng);
        let b = CliffordTableau::random(n, &mut rng);
        prop_assert!(a.is_symplectic());
        let ab = a.then(&b).unwrap();
        prop_assert!(ab.is_symplectic());
        prop_assert_eq!(a.then(&a.inverse()).unwrap().key(), CliffordTableau::identity(n).key());
        prop_assert_eq!(ab.inverse().key(), b.inverse().then(&a.inverse()).unwrap().key());
    }

    #[test]
    fn conjugation_is_a_homomorphism(seed: u64, (p, q) in (pauli(5), pauli(5))) {
        let t = CliffordTableau::random(5, &mut Rng::new(seed));
        let pq = t.conjugate(&p.multiply(&q).unwrap()).unwrap();
        let split = t.conjugate(&p).unwrap().multiply(&t.conjugate(&q).unwrap()).unwrap();
        prop_assert_eq!(pq, split);
        prop_assert_eq!(t.conjugate(&p).unwrap().commutes_with(&t.conjugate(&q).unwrap()), p.commutes_with(&q));
        prop_assert_eq!(t.conjugate_dagger(&t.conjugate(&p).unwrap()).unwrap(), p);
    }

    #[test]
    fn pauli_text_roundtrip(p in pauli(9)) {
        let back: PauliString = p.to_string().parse().unwrap();
        prop_assert_eq!(back, p);
    }

    #[test]
    fn circuit_json_roundtrip(gates in proptest::collection::vec(gate(4), 0..20)) {
        let c = Circuit::new(gates);
        prop_assert!(c.validate(4).is_ok());
        prop_assert_eq!(Circuit::from_json(&c.to_json()).unwrap(), c);
    }

    #[test]
    fn clifford_circuits_match_tableaux(gates in proptest::collection::vec(gate(3), 0..12), seed: u64) {
        let c = Circuit::new(gates.into_iter().filter(Gate::is_clifford).collect());
        let t = CliffordTableau::from_circuit(3, &c).unwrap();
        let psi = StateVector::haar(3, &mut Rng::new(seed)).unwrap();
        let mut a = psi.clone();
        a.apply_circuit(&c).unwrap();
        let mut b = psi;
        b.apply_clifford(&t).unwrap();
        prop_assert!((a.fidelity(&b).unwrap() - 1.0).abs() < 1e-10);
    }

    #[test]
    fn sre_is_clifford_invariant(n in 1usize..6, seed: u64) {
        let mut rng = Rng::new(seed);
        let psi = StateVector::haar(n, &mut rng).unwrap();
        let mut phi = psi.clone();
        phi.apply_clifford(&CliffordTableau::random(n, &mut rng)).unwrap();
        for k in [2, 3] {
            let a = psi.exact_sre(k).unwrap().entropy;
            let b = phi.exact_sre(k).unwrap().entropy;
            prop_assert!((a - b).abs() < 1e-9, "k={k}: {a} vs {b}");
        }
    }

    #[test]
    fn rmps_are_normalized_and_canonical(n in 1usize..10, log_chi in 0u32..5, seed: u64) {
        let chi = (1usize << log_chi).min(1 << (n - 1).min(10));
        let mps = MpsState::sample_rmps_obc(n, chi, &mut Rng::new(seed)).unwrap();
        prop_assert!((mps.norm_sqr() - 1.0).abs() < 1e-10);
        prop_assert!(mps.right_normalization_defect() < 1e-10);
        let dense = mps.to_statevector().unwrap();
        prop_assert!((dense.norm_sqr() - 1.0).abs() < 1e-10);
    }

    #[test]
    fn cmps_pauli_expectations_match_dense(n in 2usize..7, seed: u64, x: u64, z: u64) {
        let mut rng = Rng::new(seed);
        let s = sample_cmps(n, 2, &mut rng).unwrap();
        let mask = (1u64 << n) - 1;
        let p = PauliString::from_masks(n, x & mask, z & mask);
        let dense = s.to_statevector().unwrap().pauli_expectation(&p).unwrap();
        prop_assert!((s.pauli_expectation(&p).unwrap() - dense).abs() < 1e-10);
    }

    #[test]
    fn mps_file_roundtrip(n in 1usize..8, seed: u64, tag in proptest::option::of(any::<u64>())) {
        let mps = MpsState::sample_rmps_obc(n, 2.min(1 << (n - 1)), &mut Rng::new(seed)).unwrap();
        let bytes = encode_mps(&mps, tag);
        let (back, header) = decode_mps(&bytes).unwrap();
        prop_assert_eq!(header.seed, tag);
        prop_assert_eq!(back.tensors(), mps.tensors());
    }
}

#[test]
fn config_roundtrip_and_hash() {
    for kind in [ExperimentKind::MagicScan, ExperimentKind::Brickwork, ExperimentKind::DesignAudit, ExperimentKind::Cooling] {
        let cfg = ExperimentConfig::default_for(kind);
        cfg.validate().unwrap();
        let back = ExperimentConfig::from_json(&cfg.to_json()).unwrap();
        assert_eq!(back, cfg);
        assert_eq!(back.hash(), cfg.hash());
        let other = ExperimentConfig { seed: cfg.seed + 1, ..cfg.clone() };
        assert_ne!(other.hash(), cfg.hash());
    }
}

#[test]
fn identical_config_gives_identical_csv() {
    let cfg = ExperimentConfig {
        sites: vec![2],
        chi: vec![1, 2],
        samples: 200,
        seed: 11,
        ..ExperimentConfig::default_for(ExperimentKind::DesignAudit)
    };
    let a = run(&cfg).unwrap().to_csv();
    let b = run(&cfg).unwrap().to_csv();
    assert_eq!(a, b);
    assert!(a.starts_with("# cliffmps "));
    assert!(a.lines().next().unwrap().contains(&format!("config_sha256={}", cfg.hash())));
}

fn corpus(target: &str) -> Vec<(String, Vec<u8>)> {
    let dir = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../fuzz/corpus").join(target);
    let mut out: Vec<_> = std::fs::read_dir(dir)
        .unwrap()
        .map(|e| {
            let p = e.unwrap().path();
            (p.file_name().unwrap().to_string_lossy().into_owned(), std::fs::read(&p).unwrap())
        })
        .collect();
    out.sort();
    out
}

#[test]
fn fuzz_seeds_parse_as_labelled() {
    for (name, bytes) in corpus("mps_decode") {
        let ok = decode_mps(&bytes).is_ok();
        assert_eq!(ok, name == "zero2" || name == "bell", "{name}");
        if name == "bell" {
            let (mps, _) = decode_mps(&bytes).unwrap();
            let zz = mps.pauli_expectation(&"ZZ".parse().unwrap()).unwrap();
            assert!((zz - 1.0).abs() < 1e-12);
        }
    }
    for (name, bytes) in corpus("circuit_json") {
        let c = Circuit::from_json(std::str::from_utf8(&bytes).unwrap());
        let ok = c.is_ok_and(|c| c.validate(3).is_ok());
        assert_eq!(ok, !name.starts_with("bad"), "{name}");
    }
    for (name, bytes) in corpus("config_json") {
        let c = ExperimentConfig::from_json(std::str::from_utf8(&bytes).unwrap());
        assert_eq!(c.is_ok(), name != "invalid.json", "{name}");
    }
    for (name, bytes) in corpus("pauli_parse") {
        let p = std::str::from_utf8(&bytes).unwrap().parse::<PauliString>();
        assert_eq!(p.is_ok(), !name.starts_with("bad"), "{name}");
    }
}
