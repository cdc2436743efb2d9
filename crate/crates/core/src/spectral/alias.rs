use std::f64::consts::PI;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use super::{DecayModel, Spectrum};
use crate::error::{invalid, Result};
use crate::C64;

/// Continuum Fourier coefficients `F̂(k, ℓ)` on `k, ℓ ∈ [−side/2, side/2)`,
/// stored centered like [`Spectrum`].
#[derive(Clone, Debug, PartialEq)]
pub struct MasterSpectrum {
    side: usize,
    coeffs: Vec<C64>,
}

impl MasterSpectrum {
    pub fn new(side: usize, coeffs: Vec<C64>) -> Result<Self> {
        if side < 2 || !side.is_power_of_two() || coeffs.len() != side * side {
            return invalid(format!("master side {side} with {} coefficients", coeffs.len()));
        }
        Ok(MasterSpectrum { side, coeffs })
    }

    /// Saturating master `|F̂| = envelope`, optionally restricted to
    /// `|k|, |ℓ| ≤ cutoff`. With `phase_seed`, every coefficient gets a phase
    /// `e^{iπx}` with `x` standard normal.
    pub fn from_model(model: &DecayModel, side: usize, cutoff: Option<usize>, phase_seed: Option<u64>) -> Result<Self> {
        let mut rng = phase_seed.map(ChaCha8Rng::seed_from_u64);
        let h = (side / 2) as i64;
        let cut = cutoff.map_or(i64::MAX, |c| c as i64);
        let mut coeffs = Vec::with_capacity(side * side);
        for l in -h..h {
            for k in -h..h {
                let mag = if k.abs() <= cut && l.abs() <= cut { model.envelope(k, l) } else { 0.0 };
                let v = match rng.as_mut() {
                    Some(r) => C64::from_polar(mag, PI * r.sample::<f64, _>(StandardNormal)),
                    None => C64::new(mag, 0.0),
                };
                coeffs.push(v);
            }
        }
        Self::new(side, coeffs)
    }

    pub fn side(&self) -> usize {
        self.side
    }

    pub fn get(&self, k: i64, l: i64) -> C64 {
        let h = (self.side / 2) as i64;
        self.coeffs[((l + h) as usize) * self.side + (k + h) as usize]
    }

    /// Replaces `F̂(k,ℓ)` by `(F̂(k,ℓ) + conj F̂(−k,−ℓ))/2` so that every
    /// folded spectrum transforms to a real field. Entries whose mirror falls
    /// outside the master are zeroed.
    pub fn hermitian_symmetrized(&self) -> Self {
        let h = (self.side / 2) as i64;
        let mut coeffs = Vec::with_capacity(self.coeffs.len());
        for l in -h..h {
            for k in -h..h {
                let v = if k == -h || l == -h {
                    C64::new(0.0, 0.0)
                } else {
                    (self.get(k, l) + self.get(-k, -l).conj()) * 0.5
                };
                coeffs.push(v);
            }
        }
        MasterSpectrum { side: self.side, coeffs }
    }
}

/// `f̂_pq = Σ_{i,j} F̂(p + i·2^n, q + j·2^n)` over all shifts inside the master.
pub fn alias_fold(master: &MasterSpectrum, n: usize) -> Result<Spectrum> {
    if n == 0 || master.side < 2 << n {
        return invalid(format!("master side {} is smaller than 2·2^{n}", master.side));
    }
    let mut out = Spectrum::zeros(n)?;
    let small = 1i64 << n;
    let (hs, hm) = (small / 2, (master.side / 2) as i64);
    for l in -hm..hm {
        let q = (l + hs).rem_euclid(small) - hs;
        for k in -hm..hm {
            let p = (k + hs).rem_euclid(small) - hs;
            let v = out.get(p, q) + master.get(k, l);
            out.set(p, q, v);
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spectral::{idft2, saturating_folded_magnitude, DecayModel};

    #[test]
    fn cutoff_master_folds_to_identity() {
        let model = DecayModel::exponential(1.0, 0.3, 0.5).unwrap();
        let master = MasterSpectrum::from_model(&model, 64, Some(3), Some(1)).unwrap();
        let s = alias_fold(&master, 3).unwrap();
        for (p, q, c) in s.iter() {
            assert_eq!(c, master.get(p, q));
        }
    }

    #[test]
    fn positive_exponential_master_matches_closed_form() {
        let model = DecayModel::exponential(1.0, 0.2, 0.7).unwrap();
        let master = MasterSpectrum::from_model(&model, 512, None, None).unwrap();
        let s = alias_fold(&master, 3).unwrap();
        for (p, q, c) in s.iter() {
            let closed = saturating_folded_magnitude(model.kind, model.alpha, p, 8, None).unwrap()
                * saturating_folded_magnitude(model.kind, model.beta, q, 8, None).unwrap();
            assert!((c.re - closed).abs() < 1e-10 * closed.max(1.0));
        }
    }

    #[test]
    fn low_frequencies_stabilize_across_resolutions() {
        let model = DecayModel::exponential(1.0, 0.5, 0.5).unwrap();
        let master = MasterSpectrum::from_model(&model, 256, None, Some(3)).unwrap();
        let (a, b) = (alias_fold(&master, 5).unwrap(), alias_fold(&master, 6).unwrap());
        for p in -2..=2 {
            for q in -2..=2 {
                assert!((a.get(p, q) - b.get(p, q)).norm() < 1e-5);
            }
        }
    }

    #[test]
    fn hermitian_master_gives_real_field() {
        let model = DecayModel::algebraic(1.0, 1.2, 1.2).unwrap();
        let master = MasterSpectrum::from_model(&model, 64, None, Some(5)).unwrap().hermitian_symmetrized();
        let f = idft2(&alias_fold(&master, 4).unwrap());
        assert!(f.data().iter().all(|x| x.im.abs() < 1e-12));
    }

    #[test]
    fn small_master_errors() {
        let model = DecayModel::exponential(1.0, 0.3, 0.5).unwrap();
        let master = MasterSpectrum::from_model(&model, 8, None, None).unwrap();
        assert!(alias_fold(&master, 3).is_err());
    }
}
