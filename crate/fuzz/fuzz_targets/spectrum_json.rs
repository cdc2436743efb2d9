#![no_main]

use libfuzzer_sys::fuzz_target;
use qimage::spectral::Spectrum;

// Anything that parses must serialize and parse again.
fuzz_target!(|data: &[u8]| {
    if let Ok(value) = serde_json::from_slice::<Spectrum>(data) {
        let text = serde_json::to_vec(&value).unwrap();
        serde_json::from_slice::<Spectrum>(&text).unwrap();
    }
});
