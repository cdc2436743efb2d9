//! Amplitude, FRQI and NEQR encodings of gray grids, with row-major,
//! hierarchical and snake pixel addressing.

use std::f64::consts::FRAC_PI_2;

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::imageio::ImageGrid;
pub use crate::tensnet::StateVector;
use crate::C64;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum EncodingKind {
    Amplitude,
    Frqi,
    /// NEQR with `q` color qubits, `1 ≤ q ≤ 8`.
    Neqr(u32),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Indexing {
    RowMajor,
    Hierarchical,
    Snake,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct EncodingSpec {
    pub kind: EncodingKind,
    pub indexing: Indexing,
}

impl EncodingSpec {
    pub fn new(kind: EncodingKind, indexing: Indexing) -> Result<Self> {
        if let EncodingKind::Neqr(q) = kind {
            if !(1..=8).contains(&q) {
                return invalid(format!("NEQR color-qubit count {q} outside 1..=8"));
            }
        }
        Ok(EncodingSpec { kind, indexing })
    }

    /// Number of color qubits.
    pub fn color_qubits(&self) -> usize {
        match self.kind {
            EncodingKind::Amplitude => 0,
            EncodingKind::Frqi => 1,
            EncodingKind::Neqr(q) => q as usize,
        }
    }

    /// Total qubit count for a `2^n` grid.
    pub fn num_qubits(&self, n: usize) -> usize {
        2 * n + self.color_qubits()
    }
}

impl std::fmt::Display for EncodingKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            EncodingKind::Amplitude => write!(f, "amplitude"),
            EncodingKind::Frqi => write!(f, "frqi"),
            EncodingKind::Neqr(q) => write!(f, "neqr{q}"),
        }
    }
}

impl std::str::FromStr for EncodingKind {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "amplitude" | "amp" => Ok(EncodingKind::Amplitude),
            "frqi" => Ok(EncodingKind::Frqi),
            _ => match s.strip_prefix("neqr").map(|q| q.trim_start_matches(':').parse::<u32>()) {
                Some(Ok(q)) if (1..=8).contains(&q) => Ok(EncodingKind::Neqr(q)),
                _ => invalid(format!("unknown encoding '{s}'")),
            },
        }
    }
}

impl std::fmt::Display for Indexing {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Indexing::RowMajor => "row",
            Indexing::Hierarchical => "hierarchical",
            Indexing::Snake => "snake",
        })
    }
}

impl std::str::FromStr for Indexing {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "row" | "rowmajor" | "row-major" => Ok(Indexing::RowMajor),
            "hierarchical" | "hier" => Ok(Indexing::Hierarchical),
            "snake" => Ok(Indexing::Snake),
            _ => invalid(format!("unknown indexing '{s}'")),
        }
    }
}

/// Address of pixel `(a, b)` on a `2^n` grid.
pub fn pixel_index(a: usize, b: usize, indexing: Indexing, n: usize) -> Result<usize> {
    let side = 1usize << n;
    if a >= side || b >= side {
        return invalid(format!("pixel ({a}, {b}) outside a {side}×{side} grid"));
    }
    Ok(address(a, b, indexing, n))
}

fn address(a: usize, b: usize, indexing: Indexing, n: usize) -> usize {
    let side = 1usize << n;
    match indexing {
        Indexing::RowMajor => b * side + a,
        Indexing::Snake => b * side + if b & 1 == 1 { side - 1 - a } else { a },
        Indexing::Hierarchical => (0..n).fold(0, |j, k| {
            let bit = n - 1 - k;
            (j << 2) | ((b >> bit & 1) << 1) | (a >> bit & 1)
        }),
    }
}

/// NEQR level `⌊x·(2^q−1) + 1/2⌋`.
pub fn quantize(x: f64, q: u32) -> usize {
    let levels = ((1u64 << q) - 1) as f64;
    (x * levels + 0.5).floor().clamp(0.0, levels) as usize
}

pub fn encode_state(grid: &ImageGrid, spec: EncodingSpec) -> Result<StateVector> {
    let spec = EncodingSpec::new(spec.kind, spec.indexing)?;
    let n = grid.n();
    let side = grid.side();
    let m = spec.num_qubits(n);
    if m > crate::DENSE_MAX_QUBITS {
        return Err(Error::TooLarge(m));
    }
    let cells = side * side;
    let mut amps = vec![C64::new(0.0, 0.0); cells << spec.color_qubits()];
    let inv = 1.0 / side as f64;
    for b in 0..side {
        for a in 0..side {
            let j = address(a, b, spec.indexing, n);
            let x = grid.get(a, b);
            match spec.kind {
                EncodingKind::Amplitude => amps[j] = C64::new(x, 0.0),
                EncodingKind::Frqi => {
                    amps[j] = C64::new((FRAC_PI_2 * x).cos() * inv, 0.0);
                    amps[cells + j] = C64::new((FRAC_PI_2 * x).sin() * inv, 0.0);
                }
                EncodingKind::Neqr(q) => amps[quantize(x, q) * cells + j] = C64::new(inv, 0.0),
            }
        }
    }
    if spec.kind == EncodingKind::Amplitude && grid.pixels().iter().all(|&x| x == 0.0) {
        return invalid("amplitude encoding of an all-zero image");
    }
    StateVector::normalized(amps)
}

pub fn decode_image(state: &StateVector, spec: EncodingSpec, n: usize) -> Result<ImageGrid> {
    let spec = EncodingSpec::new(spec.kind, spec.indexing)?;
    if n == 0 || state.num_qubits() != spec.num_qubits(n) {
        return Err(Error::Dimension(format!(
            "{} qubits cannot hold a {} grid with n={n}",
            state.num_qubits(),
            spec.kind
        )));
    }
    let amps = state.amps();
    let side = 1usize << n;
    let cells = side * side;
    let max_amp = amps.iter().map(|x| x.norm()).fold(0.0, f64::max);
    ImageGrid::from_fn(n, |a, b| {
        let j = address(a, b, spec.indexing, n);
        let x = match spec.kind {
            EncodingKind::Amplitude => amps[j].norm() / max_amp,
            EncodingKind::Frqi => amps[cells + j].norm().atan2(amps[j].norm()) / FRAC_PI_2,
            EncodingKind::Neqr(q) => {
                let levels = 1usize << q;
                let best = (0..levels)
                    .max_by(|&u, &v| amps[u * cells + j].norm().total_cmp(&amps[v * cells + j].norm()).then(v.cmp(&u)))
                    .unwrap_or(0);
                best as f64 / (levels - 1) as f64
            }
        };
        x.clamp(0.0, 1.0)
    })
}
