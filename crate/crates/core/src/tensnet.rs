//! Dense states, matrix product states, truncated-SVD compression,
//! entanglement profiles and state distances.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::linalg::{isometry_error, left_spectrum, Mat};
use crate::{C64, DENSE_MAX_QUBITS};

const ZERO: C64 = C64::new(0.0, 0.0);

/// Normalized state of `m` qubits; qubit 0 is the most significant index bit.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "StateJson", into = "StateJson")]
pub struct StateVector {
    m: usize,
    amps: Vec<C64>,
}

#[derive(Serialize, Deserialize)]
struct StateJson {
    m: usize,
    amps: Vec<C64>,
}

impl TryFrom<StateJson> for StateVector {
    type Error = Error;
    fn try_from(s: StateJson) -> Result<Self> {
        let state = StateVector::new(s.amps)?;
        if state.m != s.m {
            return Err(Error::Dimension(format!("m={} but {} amplitudes", s.m, state.dim())));
        }
        Ok(state)
    }
}

impl From<StateVector> for StateJson {
    fn from(s: StateVector) -> Self {
        StateJson { m: s.m, amps: s.amps }
    }
}

fn qubits_for_len(len: usize) -> Result<usize> {
    if len < 2 || !len.is_power_of_two() {
        return Err(Error::Dimension(format!("{len} amplitudes is not 2^m with m ≥ 1")));
    }
    let m = len.trailing_zeros() as usize;
    if m > DENSE_MAX_QUBITS {
        return Err(Error::TooLarge(m));
    }
    Ok(m)
}

impl StateVector {
    /// Wraps amplitudes that are already normalized within 1e−10.
    pub fn new(amps: Vec<C64>) -> Result<Self> {
        let m = qubits_for_len(amps.len())?;
        let norm: f64 = amps.iter().map(|a| a.norm_sqr()).sum();
        if !norm.is_finite() || (norm - 1.0).abs() > 1e-10 {
            return invalid(format!("state norm² {norm} is not 1"));
        }
        Ok(StateVector { m, amps })
    }

    /// Normalizes arbitrary nonzero amplitudes.
    pub fn normalized(mut amps: Vec<C64>) -> Result<Self> {
        let m = qubits_for_len(amps.len())?;
        let norm = amps.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
        if !(norm > 0.0 && norm.is_finite()) {
            return invalid("cannot normalize a zero or non-finite vector");
        }
        amps.iter_mut().for_each(|a| *a /= norm);
        Ok(StateVector { m, amps })
    }

    /// Computational basis state `|index⟩`.
    pub fn basis(m: usize, index: usize) -> Result<Self> {
        if m == 0 || m > DENSE_MAX_QUBITS {
            return Err(Error::TooLarge(m));
        }
        if index >= 1 << m {
            return invalid(format!("basis index {index} out of range for {m} qubits"));
        }
        let mut amps = vec![ZERO; 1 << m];
        amps[index] = C64::new(1.0, 0.0);
        Ok(StateVector { m, amps })
    }

    pub fn num_qubits(&self) -> usize {
        self.m
    }

    pub fn dim(&self) -> usize {
        self.amps.len()
    }

    pub fn amps(&self) -> &[C64] {
        &self.amps
    }

    pub fn into_amps(self) -> Vec<C64> {
        self.amps
    }

    /// Applies a permutation of basis indices: amplitude at `i` moves to `f(i)`.
    pub fn permute_basis(&self, f: impl Fn(usize) -> usize) -> Self {
        let mut amps = vec![ZERO; self.dim()];
        for (i, &a) in self.amps.iter().enumerate() {
            amps[f(i)] = a;
        }
        StateVector { m: self.m, amps }
    }

    /// Reorders qubits: qubit `q` of `self` becomes qubit `perm[q]`.
    pub fn permute_qubits(&self, perm: &[usize]) -> Result<Self> {
        let m = self.m;
        let mut seen = vec![false; m];
        if perm.len() != m || perm.iter().any(|&p| p >= m || std::mem::replace(&mut seen[p], true)) {
            return invalid("qubit permutation is not a bijection");
        }
        Ok(self.permute_basis(|i| {
            let mut j = 0;
            for (q, &p) in perm.iter().enumerate() {
                if i >> (m - 1 - q) & 1 == 1 {
                    j |= 1 << (m - 1 - p);
                }
            }
            j
        }))
    }
}

fn check_dims(x: &StateVector, y: &StateVector) -> Result<()> {
    if x.dim() != y.dim() {
        return Err(Error::Dimension(format!("{} vs {} amplitudes", x.dim(), y.dim())));
    }
    Ok(())
}

fn inner(x: &[C64], y: &[C64]) -> C64 {
    x.iter().zip(y).map(|(a, b)| a.conj() * b).sum()
}

/// `|⟨x|y⟩|²`.
pub fn fidelity(x: &StateVector, y: &StateVector) -> Result<f64> {
    check_dims(x, y)?;
    Ok(inner(&x.amps, &y.amps).norm_sqr().min(1.0))
}

/// `min_φ ‖x − e^{iφ} y‖₂`.
pub fn two_norm_distance(x: &StateVector, y: &StateVector) -> Result<f64> {
    check_dims(x, y)?;
    let nx: f64 = x.amps.iter().map(|a| a.norm_sqr()).sum();
    let ny: f64 = y.amps.iter().map(|a| a.norm_sqr()).sum();
    Ok((nx + ny - 2.0 * inner(&x.amps, &y.amps).norm()).max(0.0).sqrt())
}

/// i.i.d. real standard-normal amplitudes, normalized.
pub fn random_normal_state(m: usize, seed: u64) -> Result<StateVector> {
    if m == 0 || m > DENSE_MAX_QUBITS {
        return Err(Error::TooLarge(m));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let amps = (0..1usize << m).map(|_| C64::new(rng.sample(StandardNormal), 0.0)).collect();
    StateVector::normalized(amps)
}

/// Rank-3 tensor with shape `(left, 2, right)`, stored as `[(l·2 + σ)·right + r]`.
#[derive(Clone, Debug, PartialEq)]
pub struct Tensor3 {
    pub left: usize,
    pub right: usize,
    pub data: Vec<C64>,
}

impl Tensor3 {
    pub fn zeros(left: usize, right: usize) -> Self {
        Tensor3 { left, right, data: vec![ZERO; left * 2 * right] }
    }

    pub fn get(&self, l: usize, s: usize, r: usize) -> C64 {
        self.data[(l * 2 + s) * self.right + r]
    }

    pub fn set(&mut self, l: usize, s: usize, r: usize, v: C64) {
        self.data[(l * 2 + s) * self.right + r] = v;
    }

    /// The tensor reshaped as a `(left·2) × right` matrix.
    pub fn as_left_matrix(&self) -> Mat {
        Mat::from_row_slice(self.left * 2, self.right, &self.data)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Canonical {
    None,
    Left,
    Right,
}

/// Open-boundary matrix product state with physical dimension 2.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "MpsJson", into = "MpsJson")]
pub struct Mps {
    tensors: Vec<Tensor3>,
    canonical: Canonical,
}

#[derive(Serialize, Deserialize)]
struct MpsJson {
    bonds: Vec<usize>,
    tensors: Vec<Vec<Vec<Vec<C64>>>>,
    #[serde(default = "no_canonical")]
    canonical: Canonical,
}

fn no_canonical() -> Canonical {
    Canonical::None
}

impl TryFrom<MpsJson> for Mps {
    type Error = Error;
    fn try_from(j: MpsJson) -> Result<Self> {
        if j.bonds.len() != j.tensors.len() + 1 {
            return Err(Error::Dimension("bonds must have one more entry than tensors".into()));
        }
        let mut tensors = Vec::with_capacity(j.tensors.len());
        for (site, t) in j.tensors.iter().enumerate() {
            let (left, right) = (j.bonds[site], j.bonds[site + 1]);
            if left.saturating_mul(right) > 1 << 24 {
                return Err(Error::Dimension(format!("bond too large at site {site}")));
            }
            if t.len() != left || t.iter().any(|x| x.len() != 2 || x.iter().any(|y| y.len() != right)) {
                return Err(Error::Dimension(format!("tensor {site} does not match bonds")));
            }
            let data = t.iter().flatten().flatten().copied().collect();
            tensors.push(Tensor3 { left, right, data });
        }
        let mps = Mps::new(tensors)?;
        match j.canonical {
            Canonical::Left => mps.into_left_canonical(1e-10),
            _ => Ok(mps),
        }
    }
}

impl From<Mps> for MpsJson {
    fn from(m: Mps) -> Self {
        let bonds = m.bonds();
        let tensors = m
            .tensors
            .iter()
            .map(|t| {
                (0..t.left).map(|l| (0..2).map(|s| (0..t.right).map(|r| t.get(l, s, r)).collect()).collect()).collect()
            })
            .collect();
        MpsJson { bonds, tensors, canonical: m.canonical }
    }
}

/// Outcome of a truncated compression.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CompressionReport {
    pub chi_max: usize,
    /// Sum of squared dropped singular values, one entry per bond.
    pub discarded_weight: Vec<f64>,
    pub infidelity: f64,
    pub two_norm_distance: f64,
}

impl CompressionReport {
    pub fn total_discarded(&self) -> f64 {
        self.discarded_weight.iter().sum()
    }
}

impl Mps {
    /// Checks bond consistency; the result carries no canonical flag.
    pub fn new(tensors: Vec<Tensor3>) -> Result<Self> {
        if tensors.is_empty() {
            return invalid("an MPS needs at least one site");
        }
        if tensors[0].left != 1 || tensors[tensors.len() - 1].right != 1 {
            return Err(Error::Dimension("boundary bonds must be 1".into()));
        }
        for (j, t) in tensors.iter().enumerate() {
            if t.left == 0 || t.right == 0 || t.data.len() != t.left * 2 * t.right {
                return Err(Error::Dimension(format!("tensor {j} has inconsistent shape")));
            }
            if j + 1 < tensors.len() && t.right != tensors[j + 1].left {
                return Err(Error::Dimension(format!("bond {} mismatch", j + 1)));
            }
        }
        Ok(Mps { tensors, canonical: Canonical::None })
    }

    /// Marks the MPS left-canonical after verifying every isometry.
    pub fn into_left_canonical(mut self, tol: f64) -> Result<Self> {
        for (j, t) in self.tensors.iter().enumerate() {
            let err = isometry_error(&t.as_left_matrix());
            if err > tol {
                return Err(Error::NotCanonical(format!("site {j} isometry error {err:.3e}")));
            }
        }
        self.canonical = Canonical::Left;
        Ok(self)
    }

    pub fn canonical(&self) -> Canonical {
        self.canonical
    }

    pub fn tensors(&self) -> &[Tensor3] {
        &self.tensors
    }

    pub fn num_sites(&self) -> usize {
        self.tensors.len()
    }

    /// Bond dimensions `χ_0..χ_m`, including the trivial boundaries.
    pub fn bonds(&self) -> Vec<usize> {
        let mut b: Vec<usize> = self.tensors.iter().map(|t| t.left).collect();
        b.push(1);
        b
    }

    pub fn max_bond(&self) -> usize {
        self.bonds().into_iter().max().unwrap_or(1)
    }

    /// `⟨ψ|ψ⟩` by transfer-matrix contraction.
    pub fn norm_sqr(&self) -> f64 {
        let mut env = Mat::from_element(1, 1, C64::new(1.0, 0.0));
        for t in &self.tensors {
            let mut next = Mat::zeros(t.right, t.right);
            for s in 0..2 {
                let a = Mat::from_fn(t.left, t.right, |l, r| t.get(l, s, r));
                next += a.adjoint() * &env * &a;
            }
            env = next;
        }
        env[(0, 0)].re
    }

    /// Multiplies the first tensor by `factor`.
    pub fn scale(&mut self, factor: C64) {
        self.tensors[0].data.iter_mut().for_each(|x| *x *= factor);
        self.canonical = Canonical::None;
    }

    /// Dense contraction, renormalized to unit norm.
    pub fn to_state(&self) -> Result<StateVector> {
        let m = self.num_sites();
        if m > DENSE_MAX_QUBITS {
            return Err(Error::TooLarge(m));
        }
        let mut acc = vec![C64::new(1.0, 0.0)];
        let mut rows = 1usize;
        for t in &self.tensors {
            let mut next = vec![ZERO; rows * 2 * t.right];
            for i in 0..rows {
                for l in 0..t.left {
                    let a = acc[i * t.left + l];
                    if a == ZERO {
                        continue;
                    }
                    for s in 0..2 {
                        let out = &mut next[(i * 2 + s) * t.right..(i * 2 + s + 1) * t.right];
                        let row = &t.data[(l * 2 + s) * t.right..(l * 2 + s + 1) * t.right];
                        for (o, &v) in out.iter_mut().zip(row) {
                            *o += a * v;
                        }
                    }
                }
            }
            acc = next;
            rows *= 2;
        }
        StateVector::normalized(acc)
    }
}

struct Sweep {
    mps: Mps,
    discarded: Vec<f64>,
    schmidt_weights: Vec<Vec<f64>>,
}

fn sweep(state: &StateVector, chi_max: usize) -> Sweep {
    let m = state.num_qubits();
    let mut rest = state.amps().to_vec();
    let mut chi_l = 1usize;
    let mut tensors = Vec::with_capacity(m);
    let mut discarded = Vec::with_capacity(m.saturating_sub(1));
    let mut schmidt_weights = Vec::with_capacity(m.saturating_sub(1));
    for j in 0..m - 1 {
        let cols = 1usize << (m - 1 - j);
        let mat = Mat::from_row_slice(chi_l * 2, cols, &rest);
        let (u, w) = left_spectrum(&mat);
        let floor = w.first().copied().unwrap_or(0.0) * 1e-28;
        let keep = w.iter().take(chi_max).take_while(|&&x| x > floor).count().max(1);
        discarded.push(w[keep..].iter().sum());
        schmidt_weights.push(w);
        let mut t = Tensor3::zeros(chi_l, keep);
        for row in 0..chi_l * 2 {
            for c in 0..keep {
                t.data[row * keep + c] = u[(row, c)];
            }
        }
        tensors.push(t);
        let projected = u.columns(0, keep).adjoint() * &mat;
        rest = (0..keep * cols).map(|i| projected[(i / cols, i % cols)]).collect();
        chi_l = keep;
    }
    let norm = rest.iter().map(|x| x.norm_sqr()).sum::<f64>().sqrt();
    let last =
        Tensor3 { left: chi_l, right: 1, data: rest.iter().map(|x| if norm > 0.0 { x / norm } else { *x }).collect() };
    tensors.push(last);
    let mps = Mps { tensors, canonical: Canonical::Left };
    Sweep { mps, discarded, schmidt_weights }
}

/// Left-to-right truncated SVD sweep keeping at most `chi_max` singular values
/// per bond. The final site absorbs the norm and is renormalized, so the
/// result is left-canonical and normalized.
pub fn mps_from_state(state: &StateVector, chi_max: usize) -> Result<(Mps, CompressionReport)> {
    if chi_max < 1 {
        return invalid("chi_max must be at least 1");
    }
    let Sweep { mps, discarded, .. } = sweep(state, chi_max);
    let approx = mps.to_state()?;
    let infidelity = (1.0 - fidelity(state, &approx)?).clamp(0.0, 1.0);
    let report = CompressionReport {
        chi_max,
        discarded_weight: discarded,
        infidelity,
        two_norm_distance: two_norm_distance(state, &approx)?,
    };
    Ok((mps, report))
}

/// Contracts an MPS into a normalized dense state.
pub fn mps_to_state(mps: &Mps) -> Result<StateVector> {
    mps.to_state()
}

/// Von Neumann entropies (nats) across every contiguous cut.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EntanglementProfile {
    /// `cuts[k]` is the entropy between qubits `0..=k` and the rest.
    pub cuts: Vec<f64>,
    pub max: f64,
}

/// Entropy `−Σ λ² ln λ²` of a Schmidt-weight list.
pub fn entropy_of_weights(weights: &[f64]) -> f64 {
    let total: f64 = weights.iter().sum();
    let s: f64 = weights.iter().map(|&w| w / total).filter(|&p| p > 0.0).map(|p| -p * p.ln()).sum();
    if (-1e-12..0.0).contains(&s) {
        0.0
    } else {
        s.max(0.0)
    }
}

pub fn entanglement_profile(state: &StateVector) -> EntanglementProfile {
    if state.num_qubits() < 2 {
        return EntanglementProfile { cuts: Vec::new(), max: 0.0 };
    }
    let Sweep { schmidt_weights, .. } = sweep(state, usize::MAX);
    let cuts: Vec<f64> = schmidt_weights.iter().map(|w| entropy_of_weights(w)).collect();
    let max = cuts.iter().copied().fold(0.0, f64::max);
    EntanglementProfile { cuts, max }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64) -> C64 {
        C64::new(re, 0.0)
    }

    fn bell() -> StateVector {
        let h = std::f64::consts::FRAC_1_SQRT_2;
        StateVector::new(vec![c(h), c(0.0), c(0.0), c(h)]).unwrap()
    }

    #[test]
    fn product_state_is_exact_at_chi_one() {
        let s = StateVector::normalized(vec![c(1.0); 16]).unwrap();
        let (mps, rep) = mps_from_state(&s, 1).unwrap();
        assert_eq!(mps.max_bond(), 1);
        assert!(rep.total_discarded() < 1e-15);
        assert!(rep.infidelity < 1e-14);
    }

    #[test]
    fn bell_state_truncation() {
        let (_, rep) = mps_from_state(&bell(), 1).unwrap();
        assert!((rep.infidelity - 0.5).abs() < 1e-12);
        let prof = entanglement_profile(&bell());
        assert!((prof.cuts[0] - 2f64.ln()).abs() < 1e-12);
    }

    #[test]
    fn infidelity_matches_dense_recomputation() {
        let s = random_normal_state(8, 11).unwrap();
        let (mps, rep) = mps_from_state(&s, 4).unwrap();
        let approx = mps_to_state(&mps).unwrap();
        let overlap: C64 = s.amps().iter().zip(approx.amps()).map(|(a, b)| a.conj() * b).sum();
        assert!((rep.infidelity - (1.0 - overlap.norm_sqr())).abs() < 1e-12);
        assert_eq!(mps.canonical(), Canonical::Left);
        assert!(mps.bonds().iter().all(|&b| b <= 4));
    }

    #[test]
    fn lossless_round_trip() {
        let s = random_normal_state(9, 5).unwrap();
        let (mps, rep) = mps_from_state(&s, usize::MAX).unwrap();
        assert!(rep.infidelity < 1e-12);
        assert!(fidelity(&s, &mps_to_state(&mps).unwrap()).unwrap() >= 1.0 - 1e-12);
    }

    #[test]
    fn single_tensor_mps() {
        let t = Tensor3 { left: 1, right: 1, data: vec![c(1.0), c(0.0)] };
        let s = Mps::new(vec![t]).unwrap().to_state().unwrap();
        assert_eq!(s.amps(), &[c(1.0), c(0.0)]);
    }

    #[test]
    fn distances() {
        let a = StateVector::basis(2, 0).unwrap();
        let b = StateVector::basis(2, 3).unwrap();
        assert_eq!(fidelity(&a, &b).unwrap(), 0.0);
        assert!((two_norm_distance(&a, &b).unwrap() - 2f64.sqrt()).abs() < 1e-15);
        assert!(two_norm_distance(&a, &a).unwrap() < 1e-15);
        assert!(fidelity(&a, &StateVector::basis(3, 0).unwrap()).is_err());
    }

    #[test]
    fn random_state_is_deterministic() {
        assert_eq!(random_normal_state(6, 3).unwrap(), random_normal_state(6, 3).unwrap());
        assert_ne!(random_normal_state(6, 3).unwrap(), random_normal_state(6, 4).unwrap());
    }

    #[test]
    fn page_scaling_at_ten_qubits() {
        let sizes = [6usize, 8, 10, 12];
        let means: Vec<f64> = sizes
            .iter()
            .map(|&m| {
                (0..100)
                    .map(|seed| {
                        let s = random_normal_state(m, seed).unwrap();
                        entanglement_profile(&s).cuts[m / 2 - 1]
                    })
                    .sum::<f64>()
                    / 100.0
            })
            .collect();
        let xs: Vec<f64> = sizes.iter().map(|&m| m as f64).collect();
        let (xm, ym) = (xs.iter().sum::<f64>() / 4.0, means.iter().sum::<f64>() / 4.0);
        let slope = xs.iter().zip(&means).map(|(x, y)| (x - xm) * (y - ym)).sum::<f64>()
            / xs.iter().map(|x| (x - xm).powi(2)).sum::<f64>();
        let fit = ym + slope * (10.0 - xm);
        let sample = entanglement_profile(&random_normal_state(10, 1000).unwrap()).cuts[4];
        assert!((sample - fit).abs() / fit < 0.1, "sample {sample} fit {fit}");
    }

    #[test]
    fn json_round_trip() {
        let s = random_normal_state(3, 1).unwrap();
        let back: StateVector = serde_json::from_str(&serde_json::to_string(&s).unwrap()).unwrap();
        assert_eq!(s, back);
        let (mps, _) = mps_from_state(&s, 2).unwrap();
        let text = serde_json::to_string(&mps).unwrap();
        let back: Mps = serde_json::from_str(&text).unwrap();
        assert_eq!(mps, back);
        assert!(serde_json::from_str::<StateVector>(r#"{"m":1,"amps":[[1,0],[1,0]]}"#).is_err());
    }
}
