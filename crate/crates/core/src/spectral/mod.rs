//! Two-dimensional Fourier machinery: transforms with the `f = Σ f̂ e^{+i…}`
//! convention, spectrum truncation, plane-wave MPS construction, alias
//! folding of continuum spectra and closed-form truncation-error bounds.

mod alias;
mod bound;
mod dct;
mod tomps;
mod zeta;

pub use alias::{alias_fold, MasterSpectrum};
pub use bound::{
    bound_algebraic, bound_exponential, discarded_weight_bound, saturating_discarded_weight,
    saturating_folded_magnitude,
};
pub use dct::{dct1_direct, dct2_direct, dct_extend_type1, dct_extend_type2, idct1, idct2, DctExtension};
pub use tomps::spectrum_to_mps;
pub use zeta::hurwitz_zeta;

use rustfft::FftPlanner;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::imageio::ImageGrid;
use crate::tensnet::StateVector;
use crate::C64;

/// Complex `2^n × 2^n` array stored row-major (`data[b·2^n + a]`).
#[derive(Clone, Debug, PartialEq)]
pub struct Field {
    n: usize,
    data: Vec<C64>,
}

impl Field {
    pub fn new(n: usize, data: Vec<C64>) -> Result<Self> {
        if n == 0 || n > 13 || data.len() != 1 << (2 * n) {
            return Err(Error::Dimension(format!("{} values for a field with n={n}", data.len())));
        }
        Ok(Field { n, data })
    }

    pub fn from_grid(grid: &ImageGrid) -> Self {
        let data = grid.pixels().iter().map(|&x| C64::new(x, 0.0)).collect();
        Field { n: grid.n(), data }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn side(&self) -> usize {
        1 << self.n
    }

    pub fn data(&self) -> &[C64] {
        &self.data
    }

    pub fn get(&self, a: usize, b: usize) -> C64 {
        self.data[b * self.side() + a]
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.data.iter().map(|x| x.norm_sqr()).sum::<f64>().sqrt()
    }

    /// Amplitude encoding with row-major addressing.
    pub fn to_state(&self) -> Result<StateVector> {
        StateVector::normalized(self.data.clone())
    }
}

/// DFT coefficients `f̂_pq` on signed frequencies `p, q ∈ [−2^n/2, 2^n/2)`,
/// stored centered: `coeffs[(q + 2^n/2)·2^n + (p + 2^n/2)]`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "SpectrumJson", into = "SpectrumJson")]
pub struct Spectrum {
    n: usize,
    coeffs: Vec<C64>,
}

#[derive(Serialize, Deserialize)]
struct SpectrumJson {
    n: usize,
    layout: String,
    coeffs: Vec<C64>,
}

impl TryFrom<SpectrumJson> for Spectrum {
    type Error = Error;
    fn try_from(j: SpectrumJson) -> Result<Self> {
        if j.layout != "centered" {
            return Err(Error::Decode(format!("unsupported layout '{}'", j.layout)));
        }
        Spectrum::new(j.n, j.coeffs)
    }
}

impl From<Spectrum> for SpectrumJson {
    fn from(s: Spectrum) -> Self {
        SpectrumJson { n: s.n, layout: "centered".into(), coeffs: s.coeffs }
    }
}

impl Spectrum {
    pub fn new(n: usize, coeffs: Vec<C64>) -> Result<Self> {
        if n == 0 || n > 13 || coeffs.len() != 1 << (2 * n) {
            return Err(Error::Dimension(format!("{} coefficients for n={n}", coeffs.len())));
        }
        if coeffs.iter().any(|c| !c.re.is_finite() || !c.im.is_finite()) {
            return invalid("non-finite spectrum coefficient");
        }
        Ok(Spectrum { n, coeffs })
    }

    pub fn zeros(n: usize) -> Result<Self> {
        Self::new(n, vec![C64::new(0.0, 0.0); 1 << (2 * n.min(13))])
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn side(&self) -> usize {
        1 << self.n
    }

    /// Smallest and largest signed frequency.
    pub fn freq_range(&self) -> (i64, i64) {
        let h = (self.side() / 2) as i64;
        (-h, h - 1)
    }

    pub fn coeffs(&self) -> &[C64] {
        &self.coeffs
    }

    fn offset(&self, p: i64, q: i64) -> usize {
        let h = (self.side() / 2) as i64;
        debug_assert!((-h..h).contains(&p) && (-h..h).contains(&q));
        ((q + h) as usize) * self.side() + (p + h) as usize
    }

    pub fn get(&self, p: i64, q: i64) -> C64 {
        self.coeffs[self.offset(p, q)]
    }

    pub fn set(&mut self, p: i64, q: i64, v: C64) {
        let o = self.offset(p, q);
        self.coeffs[o] = v;
    }

    /// All `(p, q, f̂_pq)` in storage order.
    pub fn iter(&self) -> impl Iterator<Item = (i64, i64, C64)> + '_ {
        let side = self.side();
        let h = (side / 2) as i64;
        self.coeffs.iter().enumerate().map(move |(i, &c)| ((i % side) as i64 - h, (i / side) as i64 - h, c))
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.coeffs.iter().map(|x| x.norm_sqr()).sum::<f64>().sqrt()
    }
}

fn fft2(data: &mut [C64], side: usize, inverse: bool) {
    let mut planner = FftPlanner::new();
    let fft = if inverse { planner.plan_fft_inverse(side) } else { planner.plan_fft_forward(side) };
    for row in data.chunks_exact_mut(side) {
        fft.process(row);
    }
    let mut col = vec![C64::new(0.0, 0.0); side];
    for a in 0..side {
        for b in 0..side {
            col[b] = data[b * side + a];
        }
        fft.process(&mut col);
        for b in 0..side {
            data[b * side + a] = col[b];
        }
    }
}

/// `f̂_pq = 2^{−2n} Σ_ab f_ab e^{−i2π(pa+qb)/2^n}`.
pub fn dft2_field(field: &Field) -> Spectrum {
    let side = field.side();
    let mut data = field.data.clone();
    fft2(&mut data, side, false);
    let scale = 1.0 / (side * side) as f64;
    let h = side / 2;
    let mut coeffs = vec![C64::new(0.0, 0.0); side * side];
    for q in 0..side {
        for p in 0..side {
            let (sp, sq) = ((p + h) % side, (q + h) % side);
            coeffs[sq * side + sp] = data[q * side + p] * scale;
        }
    }
    Spectrum { n: field.n, coeffs }
}

pub fn dft2(grid: &ImageGrid) -> Spectrum {
    dft2_field(&Field::from_grid(grid))
}

/// `f_ab = Σ_pq f̂_pq e^{+i2π(pa+qb)/2^n}`.
pub fn idft2(spec: &Spectrum) -> Field {
    let side = spec.side();
    let h = side / 2;
    let mut data = vec![C64::new(0.0, 0.0); side * side];
    for q in 0..side {
        for p in 0..side {
            let (sp, sq) = ((p + h) % side, (q + h) % side);
            data[q * side + p] = spec.coeffs[sq * side + sp];
        }
    }
    fft2(&mut data, side, true);
    Field { n: spec.n, data }
}

/// Frequency cutoff `Λ`; the retained block is `{−Λ..Λ}²`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TruncationSpec {
    pub lambda: usize,
}

impl TruncationSpec {
    pub fn new(lambda: usize, n: usize) -> Result<Self> {
        if 2 * lambda + 1 > 1 << n {
            return invalid(format!("2Λ+1 = {} exceeds 2^n = {}", 2 * lambda + 1, 1usize << n));
        }
        Ok(TruncationSpec { lambda })
    }

    pub fn chi(&self) -> usize {
        2 * self.lambda + 1
    }

    pub fn retains(&self, p: i64, q: i64) -> bool {
        let l = self.lambda as i64;
        p.abs() <= l && q.abs() <= l
    }
}

/// Zeroes every coefficient outside `I_appr`; returns the truncated spectrum
/// and the discarded weight `Σ_{I_disc} |f̂|²`.
pub fn truncate_spectrum(spec: &Spectrum, t: TruncationSpec) -> Result<(Spectrum, f64)> {
    let t = TruncationSpec::new(t.lambda, spec.n)?;
    let mut out = spec.clone();
    let mut discarded = 0.0;
    let side = spec.side();
    let h = (side / 2) as i64;
    for (i, c) in out.coeffs.iter_mut().enumerate() {
        let (p, q) = ((i % side) as i64 - h, (i / side) as i64 - h);
        if !t.retains(p, q) {
            discarded += c.norm_sqr();
            *c = C64::new(0.0, 0.0);
        }
    }
    Ok((out, discarded))
}

/// Decay envelope of a continuum spectrum.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub enum DecayKind {
    Exponential,
    Algebraic,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct DecayModel {
    pub kind: DecayKind,
    pub c: f64,
    pub alpha: f64,
    pub beta: f64,
}

impl DecayModel {
    pub fn new(kind: DecayKind, c: f64, alpha: f64, beta: f64) -> Result<Self> {
        let min = match kind {
            DecayKind::Exponential => 0.0,
            DecayKind::Algebraic => 1.0,
        };
        let ok = |x: f64| x.is_finite() && x > min;
        if !(c.is_finite() && c > 0.0) || !ok(alpha) || !ok(beta) {
            return invalid(format!("decay parameters C={c}, α={alpha}, β={beta} out of domain for {kind:?}"));
        }
        Ok(DecayModel { kind, c, alpha, beta })
    }

    pub fn exponential(c: f64, alpha: f64, beta: f64) -> Result<Self> {
        Self::new(DecayKind::Exponential, c, alpha, beta)
    }

    pub fn algebraic(c: f64, alpha: f64, beta: f64) -> Result<Self> {
        Self::new(DecayKind::Algebraic, c, alpha, beta)
    }

    /// `|F̂(k, ℓ)|` for a saturating spectrum.
    pub fn envelope(&self, k: i64, l: i64) -> f64 {
        let (k, l) = (k.unsigned_abs() as f64, l.unsigned_abs() as f64);
        match self.kind {
            DecayKind::Exponential => self.c * (-self.alpha * k - self.beta * l).exp(),
            DecayKind::Algebraic => self.c / ((k + 1.0).powf(self.alpha) * (l + 1.0).powf(self.beta)),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;
    use std::f64::consts::PI;

    fn brute_dft(f: &Field) -> Spectrum {
        let side = f.side();
        let h = (side / 2) as i64;
        let mut s = Spectrum::zeros(f.n()).unwrap();
        for q in -h..h {
            for p in -h..h {
                let mut acc = C64::new(0.0, 0.0);
                for b in 0..side {
                    for a in 0..side {
                        let ph = -2.0 * PI * (p * a as i64 + q * b as i64) as f64 / side as f64;
                        acc += f.get(a, b) * C64::from_polar(1.0, ph);
                    }
                }
                s.set(p, q, acc / (side * side) as f64);
            }
        }
        s
    }

    fn random_grid(n: usize, seed: u64) -> ImageGrid {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        ImageGrid::from_fn(n, |_, _| rng.random::<f64>()).unwrap()
    }

    #[test]
    fn constant_grid_has_only_dc() {
        let s = dft2(&ImageGrid::from_fn(3, |_, _| 0.7).unwrap());
        for (p, q, c) in s.iter() {
            let expected = if p == 0 && q == 0 { 0.7 } else { 0.0 };
            assert!((c - C64::new(expected, 0.0)).norm() < 1e-14);
        }
    }

    #[test]
    fn cosine_grid() {
        let g = ImageGrid::from_fn(3, |a, _| 0.5 + 0.5 * (2.0 * PI * a as f64 / 8.0).cos()).unwrap();
        let s = dft2(&g);
        assert!((s.get(1, 0).re - 0.25).abs() < 1e-14);
        assert!((s.get(-1, 0).re - 0.25).abs() < 1e-14);
    }

    #[test]
    fn matches_direct_summation_and_round_trips() {
        let g = random_grid(3, 4);
        let s = dft2(&g);
        let b = brute_dft(&Field::from_grid(&g));
        for (x, y) in s.coeffs().iter().zip(b.coeffs()) {
            assert!((x - y).norm() < 1e-14);
        }
        let back = idft2(&s);
        for (x, y) in back.data().iter().zip(g.pixels()) {
            assert!((x - C64::new(*y, 0.0)).norm() < 1e-12);
        }
    }

    #[test]
    fn delta_spectrum_gives_plane_wave() {
        let mut s = Spectrum::zeros(3).unwrap();
        s.set(-2, 1, C64::new(1.0, 0.0));
        let f = idft2(&s);
        for b in 0..8 {
            for a in 0..8 {
                let ph = 2.0 * PI * (-2.0 * a as f64 + b as f64) / 8.0;
                assert!((f.get(a, b) - C64::from_polar(1.0, ph)).norm() < 1e-12);
            }
        }
    }

    #[test]
    fn truncation() {
        let s = dft2(&random_grid(3, 9));
        let total: f64 = s.coeffs().iter().map(|c| c.norm_sqr()).sum();
        let kept: f64 = s.iter().filter(|&(p, q, _)| p.abs() <= 1 && q.abs() <= 1).map(|t| t.2.norm_sqr()).sum();
        let (t, d) = truncate_spectrum(&s, TruncationSpec { lambda: 1 }).unwrap();
        assert!((d - (total - kept)).abs() < 1e-14);
        assert!((t.frobenius_norm().powi(2) - kept).abs() < 1e-14);
        let (full, d) = truncate_spectrum(&s, TruncationSpec { lambda: 3 }).unwrap();
        assert!(d > 0.0 && full != s);
        assert!(truncate_spectrum(&s, TruncationSpec { lambda: 4 }).is_err());
        let c = dft2(&ImageGrid::from_fn(2, |_, _| 0.2).unwrap());
        assert_eq!(truncate_spectrum(&c, TruncationSpec { lambda: 0 }).unwrap(), (c.clone(), 0.0));
    }

    #[test]
    fn model_domains() {
        assert!(DecayModel::algebraic(1.0, 1.0, 2.0).is_err());
        assert!(DecayModel::exponential(1.0, 0.0, 2.0).is_err());
        assert!(DecayModel::algebraic(0.5, 1.24, 1.12).is_ok());
    }
}
