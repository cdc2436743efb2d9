#![no_main]

use libfuzzer_sys::fuzz_target;
use qimage::circuit::Circuit;

// Anything that parses must serialize and parse again.
fuzz_target!(|data: &[u8]| {
    if let Ok(value) = serde_json::from_slice::<Circuit>(data) {
        let text = serde_json::to_vec(&value).unwrap();
        serde_json::from_slice::<Circuit>(&text).unwrap();
    }
});
