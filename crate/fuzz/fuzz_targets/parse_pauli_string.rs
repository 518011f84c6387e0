#![no_main]
use libfuzzer_sys::fuzz_target;

use mubwit::pauli::parse_pauli_string;

fuzz_target!(|data: &[u8]| {
    if let Ok(text) = std::str::from_utf8(data) {
        if let Ok(s) = parse_pauli_string(text) {
            assert_eq!(parse_pauli_string(&s.to_string()), Ok(s));
        }
    }
});
