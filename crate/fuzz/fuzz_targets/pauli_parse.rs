#![no_main]

use cliffmps::pauli::PauliString;
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    let Ok(p) = text.parse::<PauliString>() else { return };
    let back: PauliString = p.to_string().parse().expect("display output parses");
    assert_eq!(back, p);
});
