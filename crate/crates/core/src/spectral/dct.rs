use std::f64::consts::PI;

use crate::imageio::ImageGrid;
use crate::C64;

/// Mirror-extended array and its (quarter-wave) DFT coefficients.
#[derive(Clone, Debug, PartialEq)]
pub struct DctExtension {
    /// Side length `L` of the extended array.
    pub side: usize,
    /// `h` row-major over `b` then `a`, both offset by `L/2`.
    pub h: Vec<f64>,
    /// `ĥ_pq` for `p, q ∈ [−L/2, L/2)`, centered like a spectrum.
    pub coeffs: Vec<C64>,
}

impl DctExtension {
    pub fn coeff(&self, p: i64, q: i64) -> C64 {
        let h = (self.side / 2) as i64;
        self.coeffs[((q + h) as usize) * self.side + (p + h) as usize]
    }

    /// Real parts of `ĥ_pq` for `p, q ∈ [0, 2^n)`, row-major over `q`. The
    /// type-I extension has period `L = 2(2^n − 1)`, so `p = L/2` wraps to
    /// `−L/2`; the type-II range never wraps.
    pub fn dct_coefficients(&self, n: usize) -> Vec<f64> {
        let side = 1i64 << n;
        let half = (self.side / 2) as i64;
        let wrap = |k: i64| if k >= half { k - 2 * half } else { k };
        (0..side).flat_map(|q| (0..side).map(move |p| (p, q))).map(|(p, q)| self.coeff(wrap(p), wrap(q)).re).collect()
    }
}

/// `(1/L²) Σ_ab h_ab e^{−i2π(p(a+s) + q(b+s))/L}` with `a, b, p, q` ranging over `[−L/2, L/2)`.
fn shifted_dft(h: &[f64], side: usize, shift: f64) -> Vec<C64> {
    let half = (side / 2) as i64;
    let twiddle: Vec<C64> = (-half..half)
        .flat_map(|p| (-half..half).map(move |a| (p, a)))
        .map(|(p, a)| C64::from_polar(1.0, -2.0 * PI * p as f64 * (a as f64 + shift) / side as f64))
        .collect();
    let tw = |p: usize, a: usize| twiddle[p * side + a];
    let mut rows = vec![C64::new(0.0, 0.0); side * side];
    for b in 0..side {
        for p in 0..side {
            rows[b * side + p] = (0..side).map(|a| tw(p, a) * h[b * side + a]).sum();
        }
    }
    let norm = 1.0 / (side * side) as f64;
    let mut out = vec![C64::new(0.0, 0.0); side * side];
    for q in 0..side {
        for p in 0..side {
            out[q * side + p] = (0..side).map(|b| tw(q, b) * rows[b * side + p]).sum::<C64>() * norm;
        }
    }
    out
}

fn endpoint_weight(a: usize, side: usize) -> f64 {
    1.0 + (a == 0) as u8 as f64 + (a == side - 1) as u8 as f64
}

/// DCT-I: `f̂_pq = (N−1)^{−2} Σ_ab f_ab cos(πpa/(N−1)) cos(πqb/(N−1)) / (w_a w_b)`
/// with `w_a = 1 + δ_{a,0} + δ_{a,N−1}`; row-major over `q`.
pub fn dct1_direct(grid: &ImageGrid) -> Vec<f64> {
    let side = grid.side();
    let m = (side - 1) as f64;
    let basis = |p: usize, a: usize| (PI * (p * a) as f64 / m).cos() / endpoint_weight(a, side);
    separable_real(grid.pixels(), side, basis, 1.0 / (m * m))
}

/// Inverse of [`dct1_direct`].
pub fn idct1(coeffs: &[f64], n: usize) -> Vec<f64> {
    let side = 1usize << n;
    let m = (side - 1) as f64;
    let basis = |a: usize, p: usize| (PI * (p * a) as f64 / m).cos() * (3.0 - endpoint_weight(p, side));
    separable_real(coeffs, side, basis, 1.0)
}

/// DCT-II: `f̂_pq = N^{−2} Σ_ab f_ab cos(πp(a+½)/N) cos(πq(b+½)/N)`; row-major over `q`.
pub fn dct2_direct(grid: &ImageGrid) -> Vec<f64> {
    let side = grid.side();
    let nn = side as f64;
    let basis = |p: usize, a: usize| (PI * p as f64 * (a as f64 + 0.5) / nn).cos();
    separable_real(grid.pixels(), side, basis, 1.0 / (nn * nn))
}

/// Inverse of [`dct2_direct`].
pub fn idct2(coeffs: &[f64], n: usize) -> Vec<f64> {
    let side = 1usize << n;
    let nn = side as f64;
    let basis = |a: usize, p: usize| (PI * p as f64 * (a as f64 + 0.5) / nn).cos() * if p == 0 { 1.0 } else { 2.0 };
    separable_real(coeffs, side, basis, 1.0)
}

/// `out[y·N + x] = scale · Σ_{u,v} k(x, u) k(y, v) input[v·N + u]`.
fn separable_real(input: &[f64], side: usize, k: impl Fn(usize, usize) -> f64, scale: f64) -> Vec<f64> {
    let mut rows = vec![0.0; side * side];
    for v in 0..side {
        for x in 0..side {
            rows[v * side + x] = (0..side).map(|u| k(x, u) * input[v * side + u]).sum();
        }
    }
    let mut out = vec![0.0; side * side];
    for y in 0..side {
        for x in 0..side {
            out[y * side + x] = scale * (0..side).map(|v| k(y, v) * rows[v * side + x]).sum::<f64>();
        }
    }
    out
}

/// Mirror extension `h_ab = f_{|a|,|b|}` on `a, b ∈ [−(N−1), N−2]` and its
/// DFT with normalization `1/(2(N−1))²`; `ĥ_pq` equals the DCT-I coefficient
/// `f̂_{|p|,|q|}`.
pub fn dct_extend_type1(grid: &ImageGrid) -> DctExtension {
    let n = grid.side();
    let side = 2 * (n - 1);
    let half = (n - 1) as i64;
    let h: Vec<f64> = (-half..half)
        .flat_map(|b| (-half..half).map(move |a| (a, b)))
        .map(|(a, b)| grid.get(a.unsigned_abs() as usize, b.unsigned_abs() as usize))
        .collect();
    let coeffs = shifted_dft(&h, side, 0.0);
    DctExtension { side, h, coeffs }
}

/// Half-sample mirror `h_ab = f_{|a+½|−½, |b+½|−½}` on `a, b ∈ [−N, N−1]` and
/// its quarter-wave DFT; `ĥ_pq` equals the DCT-II coefficient `f̂_{|p|,|q|}`
/// and vanishes on the `p = −N` and `q = −N` lines.
pub fn dct_extend_type2(grid: &ImageGrid) -> DctExtension {
    let n = grid.side() as i64;
    let side = 2 * n as usize;
    let fold = |a: i64| if a >= 0 { a as usize } else { (-a - 1) as usize };
    let h: Vec<f64> =
        (-n..n).flat_map(|b| (-n..n).map(move |a| (a, b))).map(|(a, b)| grid.get(fold(a), fold(b))).collect();
    let coeffs = shifted_dft(&h, side, 0.5);
    DctExtension { side, h, coeffs }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn random_grid(n: usize, seed: u64) -> ImageGrid {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        ImageGrid::from_fn(n, |_, _| rng.random::<f64>()).unwrap()
    }

    #[test]
    fn constant_grid_has_single_coefficient() {
        let g = ImageGrid::from_fn(2, |_, _| 0.4).unwrap();
        for c in [dct1_direct(&g), dct2_direct(&g)] {
            assert!((c[0] - 0.4).abs() < 1e-14);
            assert!(c[1..].iter().all(|x| x.abs() < 1e-14));
        }
    }

    #[test]
    fn inverses_round_trip() {
        let g = random_grid(2, 1);
        let back1 = idct1(&dct1_direct(&g), 2);
        let back2 = idct2(&dct2_direct(&g), 2);
        for ((x, y), z) in g.pixels().iter().zip(&back1).zip(&back2) {
            assert!((x - y).abs() < 1e-10 && (x - z).abs() < 1e-10);
        }
    }

    #[test]
    fn mirrored_dft_paths_agree() {
        let g = random_grid(2, 2);
        let e1 = dct_extend_type1(&g);
        for (x, y) in e1.dct_coefficients(2).iter().zip(dct1_direct(&g)) {
            assert!((x - y).abs() < 1e-12);
        }
        let e2 = dct_extend_type2(&g);
        for (x, y) in e2.dct_coefficients(2).iter().zip(dct2_direct(&g)) {
            assert!((x - y).abs() < 1e-12);
        }
        for k in -4..4 {
            assert!(e2.coeff(-4, k).norm() < 1e-12 && e2.coeff(k, -4).norm() < 1e-12);
        }
        assert!(e1.coeffs.iter().chain(&e2.coeffs).all(|c| c.im.abs() < 1e-12));
    }
}
