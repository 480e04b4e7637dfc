#![no_main]

use cliffmps::circuit::Circuit;
use cliffmps::clifford::CliffordTableau;
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    let Ok(circuit) = Circuit::from_json(text) else { return };
    let back = Circuit::from_json(&circuit.to_json()).expect("serialized circuit parses");
    assert_eq!(back, circuit);
    for n in [1usize, 2, 3, 4] {
        if circuit.validate(n).is_ok() && circuit.is_clifford() {
            let t = CliffordTableau::from_circuit(n, &circuit).expect("valid Clifford circuit");
            assert!(t.is_symplectic());
        }
    }
});
