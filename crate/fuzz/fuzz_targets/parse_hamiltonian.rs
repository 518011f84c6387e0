#![no_main]
use libfuzzer_sys::fuzz_target;

use mubwit::bell::pauli_terms_to_energies;
use mubwit::io::parse_hamiltonian;

fuzz_target!(|data: &[u8]| {
    if let Ok(text) = std::str::from_utf8(data) {
        if let Ok(terms) = parse_hamiltonian(text) {
            let _ = pauli_terms_to_energies(&terms);
        }
    }
});
