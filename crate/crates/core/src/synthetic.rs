//! Deterministic synthetic inputs: decay-model images with random phases and
//! random canonical matrix product states.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};
use crate::imageio::ImageGrid;
use crate::linalg::{gaussian_matrix, qr_unitary};
use crate::spectral::{alias_fold, idft2, DecayModel, Field, MasterSpectrum};
use crate::tensnet::{Mps, Tensor3};

/// Recipe for a family of images sharing one master spectrum.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SyntheticSpec {
    pub model: DecayModel,
    /// Master side is `2^master_log2`.
    pub master_log2: usize,
    /// Hard frequency cutoff applied to the master, if any.
    pub cutoff: Option<usize>,
}

impl SyntheticSpec {
    /// Hermitian-symmetrized master with random phases for `seed`.
    pub fn master(&self, seed: u64) -> Result<MasterSpectrum> {
        if !(2..=12).contains(&self.master_log2) {
            return invalid(format!("master_log2 {} outside 2..=12", self.master_log2));
        }
        let m = MasterSpectrum::from_model(&self.model, 1 << self.master_log2, self.cutoff, Some(seed))?;
        Ok(m.hermitian_symmetrized())
    }

    /// Real image at resolution `2^n`, affinely rescaled to `[0, 1]`.
    pub fn image(&self, seed: u64, n: usize) -> Result<ImageGrid> {
        image_from_master(&self.master(seed)?, n)
    }
}

/// Folds `master` to `2^n`, inverts the DFT and rescales the real part to
/// span `[0, 1]`. A constant field maps to the constant `1/2`.
pub fn image_from_master(master: &MasterSpectrum, n: usize) -> Result<ImageGrid> {
    let field = field_from_master(master, n)?;
    let re: Vec<f64> = field.data().iter().map(|x| x.re).collect();
    let (lo, hi) = re.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(l, h), &x| (l.min(x), h.max(x)));
    let span = hi - lo;
    let pixels = if span > 1e-12 * hi.abs().max(lo.abs()).max(1e-300) {
        re.iter().map(|x| ((x - lo) / span).clamp(0.0, 1.0)).collect()
    } else {
        vec![0.5; re.len()]
    };
    ImageGrid::new(n, pixels)
}

/// Complex field of the folded master at resolution `2^n`.
pub fn field_from_master(master: &MasterSpectrum, n: usize) -> Result<Field> {
    Ok(idft2(&alias_fold(master, n)?))
}

/// Random left-canonical MPS with bonds `min(χ, 2^j, 2^{m−j})`, built from
/// Haar-like isometries.
pub fn random_left_canonical_mps(m: usize, chi: usize, seed: u64) -> Result<Mps> {
    if m == 0 || chi == 0 {
        return invalid("random MPS needs m ≥ 1 and χ ≥ 1");
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let bond = |j: usize| chi.min(1usize << j.min(m - j).min(40));
    let mut tensors = Vec::with_capacity(m);
    for j in 0..m {
        let (left, right) = (bond(j), bond(j + 1));
        let q = qr_unitary(&gaussian_matrix(left * 2, left * 2, &mut rng));
        let mut t = Tensor3::zeros(left, right);
        for row in 0..left * 2 {
            for c in 0..right {
                t.data[row * right + c] = q[(row, c)];
            }
        }
        tensors.push(t);
    }
    Mps::new(tensors)?.into_left_canonical(1e-10)
}
