use std::f64::consts::PI;

use super::Spectrum;
use crate::error::{invalid, Result};
use crate::tensnet::{Mps, Tensor3};
use crate::C64;

fn phase(freq: i64, sigma: usize, level: usize) -> C64 {
    if sigma == 0 {
        return C64::new(1.0, 0.0);
    }
    let denom = (1u64 << (level + 1)) as f64;
    C64::from_polar(1.0, 2.0 * PI * freq as f64 / denom)
}

/// Register of `n` diagonal plane-wave tensors carrying the active
/// frequencies `freqs`; the boundary at `open_left` (or the right end
/// otherwise) collapses to a single bond.
fn plane_wave_register(freqs: &[i64], n: usize, open_left: bool) -> Vec<Tensor3> {
    let chi = freqs.len();
    (0..n)
        .map(|j| {
            let left = if open_left && j == 0 { 1 } else { chi };
            let right = if !open_left && j == n - 1 { 1 } else { chi };
            let mut t = Tensor3::zeros(left, right);
            for (k, &f) in freqs.iter().enumerate() {
                let (l, r) = (if left == 1 { 0 } else { k }, if right == 1 { 0 } else { k });
                for s in 0..2 {
                    t.set(l, s, r, phase(f, s, j));
                }
            }
            t
        })
        .collect()
}

/// Plane-wave MPS of the inverse DFT of `spec` over `2n` qubits (y register
/// first, both registers most-significant bit first). Bond dimensions are the
/// number of active `q` values on the y register and the number of active `p`
/// values on the x register. The MPS is normalized but not canonical.
pub fn spectrum_to_mps(spec: &Spectrum) -> Result<Mps> {
    let n = spec.n();
    let (lo, hi) = spec.freq_range();
    let zero = C64::new(0.0, 0.0);
    let active_q: Vec<i64> = (lo..=hi).filter(|&q| (lo..=hi).any(|p| spec.get(p, q) != zero)).collect();
    let active_p: Vec<i64> = (lo..=hi).filter(|&p| (lo..=hi).any(|q| spec.get(p, q) != zero)).collect();
    if active_q.is_empty() {
        return invalid("empty spectrum");
    }
    let mut tensors = plane_wave_register(&active_q, n, true);
    let last = tensors.pop().expect("n ≥ 1");
    let chi_r = active_p.len();
    let mut merged = Tensor3::zeros(last.left, chi_r);
    for l in 0..last.left {
        for s in 0..2 {
            for (beta, &p) in active_p.iter().enumerate() {
                let v: C64 =
                    active_q.iter().enumerate().map(|(alpha, &q)| last.get(l, s, alpha) * spec.get(p, q)).sum();
                merged.set(l, s, beta, v);
            }
        }
    }
    tensors.push(merged);
    tensors.extend(plane_wave_register(&active_p, n, false));
    let mut mps = Mps::new(tensors)?;
    let norm = mps.norm_sqr().sqrt();
    mps.scale(C64::new(1.0 / norm, 0.0));
    Ok(mps)
}
