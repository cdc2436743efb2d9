//! Gate circuits acting on `|0…0⟩`: dense simulation, exact sequential
//! circuits from left-canonical MPS, and the 1-D sequential, 2-D sequential
//! and MERA ansätze.

use std::collections::{BTreeSet, VecDeque};

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::linalg::{
    complete_unitary, gaussian_matrix, haar_unitary, isometry_error, qr_unitary, unitarity_error, Mat,
};
use crate::tensnet::{Mps, StateVector};
use crate::{C64, DENSE_MAX_QUBITS};

/// Default magnitude of the random perturbation added to identity gates.
pub const INIT_PERTURBATION: f64 = 1e-2;
const UNITARY_TOL: f64 = 1e-10;

/// A `k`-qubit unitary; `targets[0]` is the most significant bit of the
/// matrix index.
#[derive(Clone, Debug, PartialEq)]
pub struct Gate {
    targets: Vec<usize>,
    matrix: Mat,
}

impl Gate {
    pub fn new(targets: Vec<usize>, matrix: Mat) -> Result<Self> {
        let k = targets.len();
        if k == 0 || k > 12 {
            return invalid(format!("gate acts on {k} qubits"));
        }
        let mut seen = BTreeSet::new();
        if !targets.iter().all(|t| seen.insert(*t)) {
            return invalid(format!("repeated gate target in {targets:?}"));
        }
        if matrix.nrows() != 1 << k || matrix.ncols() != 1 << k {
            return Err(Error::Dimension(format!("{}×{} matrix on {k} qubits", matrix.nrows(), matrix.ncols())));
        }
        let err = unitarity_error(&matrix);
        if err.is_nan() || err > UNITARY_TOL {
            return Err(Error::NotUnitary(format!("gate on {targets:?} deviates by {err:.3e}")));
        }
        Ok(Gate { targets, matrix })
    }

    pub fn identity(targets: Vec<usize>) -> Result<Self> {
        let d = 1 << targets.len().min(12);
        Self::new(targets, Mat::identity(d, d))
    }

    pub fn targets(&self) -> &[usize] {
        &self.targets
    }

    pub fn matrix(&self) -> &Mat {
        &self.matrix
    }

    /// Replaces the matrix; the new matrix must stay unitary.
    pub fn set_matrix(&mut self, matrix: Mat) -> Result<()> {
        *self = Gate::new(std::mem::take(&mut self.targets), matrix)?;
        Ok(())
    }
}

/// Structural origin of a circuit.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Ansatz {
    MpsExact,
    Seq1d { layers: usize },
    Seq2d { layers: usize },
    Mera,
}

impl std::fmt::Display for Ansatz {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Ansatz::MpsExact => write!(f, "mps_exact"),
            Ansatz::Seq1d { layers } => write!(f, "seq1d:{layers}"),
            Ansatz::Seq2d { layers } => write!(f, "seq2d:{layers}"),
            Ansatz::Mera => write!(f, "mera"),
        }
    }
}

/// Rectangular qubit lattice with removed sites. Remaining sites are numbered
/// row-major.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "LayoutJson", into = "LayoutJson")]
pub struct Layout2D {
    rows: usize,
    cols: usize,
    removed: BTreeSet<(usize, usize)>,
}

#[derive(Serialize, Deserialize)]
struct LayoutJson {
    rows: usize,
    cols: usize,
    removed: Vec<(usize, usize)>,
}

impl TryFrom<LayoutJson> for Layout2D {
    type Error = Error;
    fn try_from(j: LayoutJson) -> Result<Self> {
        Layout2D::new(j.rows, j.cols, j.removed)
    }
}

impl From<Layout2D> for LayoutJson {
    fn from(l: Layout2D) -> Self {
        LayoutJson { rows: l.rows, cols: l.cols, removed: l.removed.into_iter().collect() }
    }
}

impl Layout2D {
    pub fn new(rows: usize, cols: usize, removed: impl IntoIterator<Item = (usize, usize)>) -> Result<Self> {
        if rows == 0 || cols == 0 || rows.saturating_mul(cols) > 4096 {
            return invalid(format!("lattice {rows}×{cols} is empty or too large"));
        }
        let removed: BTreeSet<_> = removed.into_iter().collect();
        if let Some(&(r, c)) = removed.iter().find(|&&(r, c)| r >= rows || c >= cols) {
            return invalid(format!("removed site ({r}, {c}) outside {rows}×{cols}"));
        }
        if removed.len() == rows * cols {
            return invalid("every site removed");
        }
        Ok(Layout2D { rows, cols, removed })
    }

    pub fn full(rows: usize, cols: usize) -> Result<Self> {
        Self::new(rows, cols, [])
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn present(&self, r: usize, c: usize) -> bool {
        r < self.rows && c < self.cols && !self.removed.contains(&(r, c))
    }

    pub fn num_sites(&self) -> usize {
        self.rows * self.cols - self.removed.len()
    }

    /// Qubit index of site `(r, c)`.
    pub fn qubit(&self, r: usize, c: usize) -> Option<usize> {
        if !self.present(r, c) {
            return None;
        }
        let before = self.removed.range(..(r, c)).count();
        Some(r * self.cols + c - before)
    }

    pub fn is_connected(&self) -> bool {
        let start = (0..self.rows).flat_map(|r| (0..self.cols).map(move |c| (r, c))).find(|&(r, c)| self.present(r, c));
        let Some(start) = start else { return false };
        let mut seen = BTreeSet::from([start]);
        let mut queue = VecDeque::from([start]);
        while let Some((r, c)) = queue.pop_front() {
            let nbrs = [(r.wrapping_sub(1), c), (r + 1, c), (r, c.wrapping_sub(1)), (r, c + 1)];
            for (nr, nc) in nbrs {
                if self.present(nr, nc) && seen.insert((nr, nc)) {
                    queue.push_back((nr, nc));
                }
            }
        }
        seen.len() == self.num_sites()
    }

    /// One layer of nearest-neighbour pairs: anti-diagonals from the top-left
    /// corner, horizontal pairs before vertical pairs, top to bottom within a
    /// diagonal.
    pub fn diagonal_schedule(&self) -> Vec<[usize; 2]> {
        let mut out = Vec::new();
        for d in 0..self.rows + self.cols - 1 {
            let diag: Vec<(usize, usize)> =
                (0..self.rows).filter(|&r| r <= d && d - r < self.cols).map(|r| (r, d - r)).collect();
            for &(r, c) in &diag {
                if let (Some(a), Some(b)) = (self.qubit(r, c), self.qubit(r, c + 1)) {
                    out.push([a, b]);
                }
            }
            for &(r, c) in &diag {
                if let (Some(a), Some(b)) = (self.qubit(r, c), self.qubit(r + 1, c)) {
                    out.push([a, b]);
                }
            }
        }
        out
    }
}

/// Ordered gate list applied to `|0…0⟩` on `m` qubits.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "CircuitJson", into = "CircuitJson")]
pub struct Circuit {
    m: usize,
    ansatz: Ansatz,
    layout: Option<Layout2D>,
    gates: Vec<Gate>,
}

#[derive(Serialize, Deserialize)]
struct GateJson {
    targets: Vec<usize>,
    matrix: Vec<C64>,
}

#[derive(Serialize, Deserialize)]
struct CircuitJson {
    m: usize,
    ansatz: Ansatz,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    layout: Option<Layout2D>,
    gates: Vec<GateJson>,
}

impl TryFrom<CircuitJson> for Circuit {
    type Error = Error;
    fn try_from(j: CircuitJson) -> Result<Self> {
        let mut gates = Vec::with_capacity(j.gates.len());
        for g in j.gates {
            let k = g.targets.len();
            if k == 0 || k > 12 || g.matrix.len() != 1 << (2 * k) {
                return Err(Error::Dimension(format!("{} matrix entries for {k} targets", g.matrix.len())));
            }
            gates.push(Gate::new(g.targets, Mat::from_row_slice(1 << k, 1 << k, &g.matrix))?);
        }
        Circuit::new(j.m, j.ansatz, j.layout, gates)
    }
}

impl From<Circuit> for CircuitJson {
    fn from(c: Circuit) -> Self {
        let gates = c
            .gates
            .into_iter()
            .map(|g| {
                let d = g.matrix.nrows();
                let matrix = (0..d * d).map(|i| g.matrix[(i / d, i % d)]).collect();
                GateJson { targets: g.targets, matrix }
            })
            .collect();
        CircuitJson { m: c.m, ansatz: c.ansatz, layout: c.layout, gates }
    }
}

impl Circuit {
    pub fn new(m: usize, ansatz: Ansatz, layout: Option<Layout2D>, gates: Vec<Gate>) -> Result<Self> {
        if m == 0 {
            return invalid("a circuit needs at least one qubit");
        }
        if let Some(g) = gates.iter().find(|g| g.targets.iter().any(|&t| t >= m)) {
            return invalid(format!("gate targets {:?} out of range for {m} qubits", g.targets));
        }
        if let Some(l) = &layout {
            if l.num_sites() != m {
                return invalid(format!("layout has {} sites but the circuit has {m} qubits", l.num_sites()));
            }
        }
        Ok(Circuit { m, ansatz, layout, gates })
    }

    fn from_pattern(
        m: usize,
        ansatz: Ansatz,
        layout: Option<Layout2D>,
        pattern: Vec<Vec<usize>>,
        seed: u64,
        scale: f64,
    ) -> Result<Self> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let gates = pattern
            .into_iter()
            .map(|t| {
                let d = 1 << t.len();
                let u = if scale == 0.0 {
                    Mat::identity(d, d)
                } else {
                    qr_unitary(&(Mat::identity(d, d) + gaussian_matrix(d, d, &mut rng) * C64::new(scale, 0.0)))
                };
                Gate::new(t, u)
            })
            .collect::<Result<_>>()?;
        Circuit::new(m, ansatz, layout, gates)
    }

    pub fn num_qubits(&self) -> usize {
        self.m
    }

    pub fn ansatz(&self) -> Ansatz {
        self.ansatz
    }

    pub fn layout(&self) -> Option<&Layout2D> {
        self.layout.as_ref()
    }

    pub fn gates(&self) -> &[Gate] {
        &self.gates
    }

    pub fn gates_mut(&mut self) -> &mut [Gate] {
        &mut self.gates
    }

    /// Same structure with the listed perturbation scale around identity.
    pub fn reinitialized(&self, seed: u64, scale: f64) -> Result<Self> {
        let pattern = self.gates.iter().map(|g| g.targets.clone()).collect();
        Self::from_pattern(self.m, self.ansatz, self.layout.clone(), pattern, seed, scale)
    }

    /// Same structure with Haar-random gates.
    pub fn randomized(&self, seed: u64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let gates = self
            .gates
            .iter()
            .map(|g| Gate { targets: g.targets.clone(), matrix: haar_unitary(g.matrix.nrows(), &mut rng) })
            .collect();
        Circuit { gates, ..self.clone() }
    }

    /// Inverse circuit: reversed order, conjugate-transposed gates.
    pub fn inverse_gates(&self) -> Vec<Gate> {
        self.gates.iter().rev().map(|g| Gate { targets: g.targets.clone(), matrix: g.matrix.adjoint() }).collect()
    }
}

/// Iterates every basis index whose target bits are zero, paired with the
/// offsets of the `2^k` local basis states.
pub(crate) struct GateIndexer {
    offsets: Vec<usize>,
    mask: usize,
    full: usize,
}

impl GateIndexer {
    pub(crate) fn new(m: usize, targets: &[usize]) -> Self {
        let k = targets.len();
        let bits: Vec<usize> = targets.iter().map(|&t| 1 << (m - 1 - t)).collect();
        let offsets =
            (0..1usize << k).map(|l| (0..k).filter(|i| l >> (k - 1 - i) & 1 == 1).map(|i| bits[i]).sum()).collect();
        GateIndexer { offsets, mask: bits.iter().sum(), full: (1 << m) - 1 }
    }

    pub(crate) fn for_each_base(&self, mut f: impl FnMut(usize)) {
        let free = self.full & !self.mask;
        let mut base = 0usize;
        loop {
            f(base);
            if base == free {
                break;
            }
            base = ((base | self.mask) + 1) & free;
        }
    }

    pub(crate) fn offsets(&self) -> &[usize] {
        &self.offsets
    }
}

pub(crate) fn apply_matrix(amps: &mut [C64], m: usize, targets: &[usize], u: &Mat) {
    let idx = GateIndexer::new(m, targets);
    let d = idx.offsets().len();
    let mut buf = vec![C64::new(0.0, 0.0); d];
    idx.for_each_base(|base| {
        for (b, &o) in buf.iter_mut().zip(idx.offsets()) {
            *b = amps[base + o];
        }
        for r in 0..d {
            amps[base + idx.offsets()[r]] = (0..d).map(|c| u[(r, c)] * buf[c]).sum();
        }
    });
}

pub(crate) fn zero_state(m: usize) -> Vec<C64> {
    let mut v = vec![C64::new(0.0, 0.0); 1 << m];
    v[0] = C64::new(1.0, 0.0);
    v
}

/// Dense simulation of the circuit on `|0…0⟩`.
pub fn apply_circuit(circuit: &Circuit) -> Result<StateVector> {
    if circuit.m > DENSE_MAX_QUBITS {
        return Err(Error::TooLarge(circuit.m));
    }
    let mut amps = zero_state(circuit.m);
    for g in &circuit.gates {
        apply_matrix(&mut amps, circuit.m, &g.targets, &g.matrix);
    }
    StateVector::normalized(amps)
}

/// Sequential circuit preparing a left-canonical MPS. Bonds are padded to
/// powers of two `2^{η_j}`; site `j` becomes one `(η_j+1)`-qubit gate on
/// qubits `j−η_j..=j`, and gates run from the last site to the first.
pub fn mps_to_circuit(mps: &Mps) -> Result<Circuit> {
    let m = mps.num_sites();
    let bonds = mps.bonds();
    let eta: Vec<usize> = bonds.iter().map(|b| b.next_power_of_two().trailing_zeros() as usize).collect();
    let mut gates = Vec::with_capacity(m);
    for j in (0..m).rev() {
        let t = &mps.tensors()[j];
        let w = t.as_left_matrix();
        let err = isometry_error(&w);
        if err > 1e-8 {
            return Err(Error::NotCanonical(format!("site {j} isometry error {err:.3e}")));
        }
        if eta[j] > j {
            return Err(Error::NotCanonical(format!("bond {j} exceeds 2^{j}")));
        }
        let d = 2usize << eta[j];
        let mut padded = Mat::zeros(d, t.right);
        for row in 0..t.left * 2 {
            for c in 0..t.right {
                padded[(row, c)] = w[(row, c)];
            }
        }
        let u = complete_unitary(&padded, t.right);
        gates.push(Gate::new((j - eta[j]..=j).collect(), u)?);
    }
    Circuit::new(m, Ansatz::MpsExact, None, gates)
}

fn seq1d_pattern(m: usize, layers: usize) -> Vec<Vec<usize>> {
    (0..layers).flat_map(|_| (0..m - 1).map(|i| vec![i, i + 1])).collect()
}

/// Staircase of `layers·(m−1)` two-qubit gates on `(i, i+1)`.
pub fn ansatz_seq1d(m: usize, layers: usize, seed: u64) -> Result<Circuit> {
    ansatz_seq1d_scaled(m, layers, seed, INIT_PERTURBATION)
}

pub fn ansatz_seq1d_scaled(m: usize, layers: usize, seed: u64, scale: f64) -> Result<Circuit> {
    if m < 2 || layers == 0 {
        return invalid("seq1d needs m ≥ 2 and at least one layer");
    }
    Circuit::from_pattern(m, Ansatz::Seq1d { layers }, None, seq1d_pattern(m, layers), seed, scale)
}

/// Repeated diagonal schedule over a connected lattice.
pub fn ansatz_seq2d(layout: &Layout2D, layers: usize, seed: u64) -> Result<Circuit> {
    ansatz_seq2d_scaled(layout, layers, seed, INIT_PERTURBATION)
}

pub fn ansatz_seq2d_scaled(layout: &Layout2D, layers: usize, seed: u64, scale: f64) -> Result<Circuit> {
    if layers == 0 {
        return invalid("seq2d needs at least one layer");
    }
    if !layout.is_connected() {
        return invalid("seq2d layout is disconnected");
    }
    let layer = layout.diagonal_schedule();
    let pattern = (0..layers).flat_map(|_| layer.iter().map(|p| p.to_vec())).collect();
    Circuit::from_pattern(layout.num_sites(), Ansatz::Seq2d { layers }, Some(layout.clone()), pattern, seed, scale)
}

/// Qubit counts from the top of the MERA down to `m`: each step towards the
/// top maps an even `s` to `s/2` and an odd `s` to `(s−1)/2 + 1`.
pub fn mera_layer_sizes(m: usize) -> Result<Vec<usize>> {
    if m < 2 {
        return invalid("MERA needs m ≥ 2");
    }
    let mut sizes = vec![m];
    let mut s = m;
    while s > 2 {
        s = s.div_ceil(2);
        sizes.push(s);
    }
    sizes.reverse();
    Ok(sizes)
}

fn mera_pattern(m: usize) -> Result<Vec<Vec<usize>>> {
    let sizes = mera_layer_sizes(m)?;
    let mut phys: Vec<Vec<usize>> = vec![Vec::new(); sizes.len()];
    phys[sizes.len() - 1] = (0..m).collect();
    for k in (0..sizes.len() - 1).rev() {
        let fine = &phys[k + 1];
        let s = sizes[k + 1];
        let mut coarse: Vec<usize> = (0..s / 2).map(|i| fine[2 * i]).collect();
        if s % 2 == 1 {
            coarse.push(fine[s - 1]);
        }
        phys[k] = coarse;
    }
    let mut pattern = vec![vec![phys[0][0], phys[0][1]]];
    for k in 1..sizes.len() {
        let (s, q) = (sizes[k], &phys[k]);
        for i in 0..s / 2 {
            pattern.push(vec![q[2 * i], q[2 * i + 1]]);
        }
        for i in (1..s - 1).step_by(2) {
            pattern.push(vec![q[i], q[i + 1]]);
        }
        if s % 2 == 0 {
            pattern.push(vec![q[s - 1], q[0]]);
        }
    }
    Ok(pattern)
}

/// MERA emitted top-down: one gate on the top pair, then per layer the
/// isometries (coarse qubit and a fresh partner) followed by disentanglers.
/// Even layers close periodically; on odd layers the last qubit is unpaired
/// and the first qubit gets no disentangler.
pub fn ansatz_mera(m: usize, seed: u64) -> Result<Circuit> {
    ansatz_mera_scaled(m, seed, INIT_PERTURBATION)
}

pub fn ansatz_mera_scaled(m: usize, seed: u64, scale: f64) -> Result<Circuit> {
    Circuit::from_pattern(m, Ansatz::Mera, None, mera_pattern(m)?, seed, scale)
}

/// Independent real parameters: a `k`-qubit gate whose `f` inputs are still
/// `|0⟩` is an isometry of `2^k × 2^{k−f}` with `2np − p²` parameters.
pub fn param_count(circuit: &Circuit) -> u64 {
    let mut touched = vec![false; circuit.m];
    let mut total = 0u64;
    for g in &circuit.gates {
        let k = g.targets.len() as u32;
        let fixed = g.targets.iter().filter(|&&t| !touched[t]).count() as u32;
        let (n, p) = (1u64 << k, 1u64 << (k - fixed));
        total += 2 * n * p - p * p;
        for &t in &g.targets {
            touched[t] = true;
        }
    }
    total
}
