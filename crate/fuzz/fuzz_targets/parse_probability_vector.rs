#![no_main]
use libfuzzer_sys::fuzz_target;

use mubwit::io::parse_probability_vector;

fuzz_target!(|data: &[u8]| {
    if let Ok(text) = std::str::from_utf8(data) {
        if let Ok(p) = parse_probability_vector(text) {
            let total: f64 = p.as_array().iter().sum();
            assert!((total - 1.0).abs() < 1e-6);
            assert!(p.as_array().iter().all(|x| *x >= 0.0));
        }
    }
});
