#![no_main]
use libfuzzer_sys::fuzz_target;

use mubwit::witness::WitnessSpec;

fuzz_target!(|data: &[u8]| {
    if let Ok(spec) = serde_json::from_slice::<WitnessSpec>(data) {
        let json = serde_json::to_vec(&spec).unwrap();
        let back: WitnessSpec = serde_json::from_slice(&json).unwrap();
        assert_eq!(back.shape, spec.shape);
    }
});
