#![no_main]

use libfuzzer_sys::fuzz_target;
use qimage::imageio::decode_raster;

fuzz_target!(|data: &[u8]| {
    if let Ok(raster) = decode_raster(data) {
        assert_eq!(raster.values.len(), raster.width * raster.height);
        assert!(raster.values.iter().all(|p| (0.0..=1.0).contains(p)));
    }
});
