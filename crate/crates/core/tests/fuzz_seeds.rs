//! The fuzz corpus seeds parse or fail exactly as their names say.

use std::path::{Path, PathBuf};

use qimage::circuit::Circuit;
use qimage::imageio::{decode_pgm, decode_raster, ImageGrid};
use qimage::spectral::Spectrum;
use qimage::tensnet::{Mps, StateVector};

const MALFORMED: [&str; 6] = ["truncated", "bad_m", "mismatch", "bad_layout", "not_unitary", "out_of_range"];

fn seeds(target: &str) -> Vec<PathBuf> {
    let dir = Path::new(env!("CARGO_MANIFEST_DIR")).join("../../fuzz/corpus").join(target);
    let mut files: Vec<PathBuf> = std::fs::read_dir(&dir).unwrap().map(|e| e.unwrap().path()).collect();
    files.sort();
    assert!(!files.is_empty(), "no seeds in {}", dir.display());
    files
}

fn check(target: &str, parses: impl Fn(&[u8]) -> bool) {
    for path in seeds(target) {
        let name = path.file_name().unwrap().to_str().unwrap();
        let expected = !MALFORMED.contains(&name);
        assert_eq!(parses(&std::fs::read(&path).unwrap()), expected, "{target}/{name}");
    }
}

#[test]
fn raster_seeds() {
    check("pgm", |b| decode_pgm(b).is_ok());
    check("png", |b| decode_raster(b).is_ok());
}

#[test]
fn json_seeds() {
    check("state_json", |b| serde_json::from_slice::<StateVector>(b).is_ok());
    check("mps_json", |b| serde_json::from_slice::<Mps>(b).is_ok());
    check("spectrum_json", |b| serde_json::from_slice::<Spectrum>(b).is_ok());
    check("circuit_json", |b| serde_json::from_slice::<Circuit>(b).is_ok());
    check("grid_json", |b| serde_json::from_slice::<ImageGrid>(b).is_ok());
}
