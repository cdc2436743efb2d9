//! Fidelity maximization over gate unitaries with a Riemannian Adam update.
//!
//! Gradients are Euclidean in the real coordinates of each gate matrix:
//! entry `(i, j)` holds `∂F/∂Re U_ij + i·∂F/∂Im U_ij = 2·o·conj(E_ij)` for
//! overlap `o = ⟨target|ψ⟩` and gate environment `E`.

use std::time::Instant;

use crate::circuit::{apply_matrix, zero_state, Circuit, GateIndexer};
use crate::error::{invalid, Error, Result};
use crate::linalg::{polar_unitary, qr_unitary, skew, unitarity_error, Mat};
use crate::tensnet::StateVector;
use crate::{C64, DENSE_MAX_QUBITS};

const INPUT_UNITARY_TOL: f64 = 1e-8;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Retraction {
    Qr,
    Polar,
}

impl std::str::FromStr for Retraction {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "qr" => Ok(Retraction::Qr),
            "polar" => Ok(Retraction::Polar),
            _ => invalid(format!("unknown retraction '{s}'")),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct OptimizerConfig {
    pub steps: usize,
    pub lr: f64,
    pub beta1: f64,
    pub beta2: f64,
    pub eps: f64,
    /// Recorded for reproducibility of the run; ansatz initialization draws
    /// from it, the update itself is deterministic.
    pub seed: u64,
    /// Stop once the best infidelity improved by less than `tol` over the
    /// last `patience` steps.
    pub tol: f64,
    pub patience: usize,
    pub retraction: Retraction,
}

impl Default for OptimizerConfig {
    fn default() -> Self {
        OptimizerConfig {
            steps: 2000,
            lr: 5e-3,
            beta1: 0.9,
            beta2: 0.999,
            eps: 1e-8,
            seed: 0,
            tol: 1e-9,
            patience: 200,
            retraction: Retraction::Qr,
        }
    }
}

impl OptimizerConfig {
    pub fn validate(&self) -> Result<()> {
        let betas = (0.0..1.0).contains(&self.beta1) && (0.0..1.0).contains(&self.beta2);
        let lr = (0.0..f64::INFINITY).contains(&self.lr);
        let eps = self.eps > 0.0 && self.eps.is_finite();
        let tol = self.tol >= 0.0;
        if self.steps == 0 || !lr || !betas || !eps || !tol {
            return invalid(format!("invalid optimizer configuration {self:?}"));
        }
        Ok(())
    }
}

/// First moment (a tangent vector, re-projected at every step) and scalar
/// second moment of one gate.
#[derive(Clone, Debug, Default)]
pub struct Moments {
    first: Option<Mat>,
    second: f64,
    t: i32,
}

#[derive(Clone, Debug)]
pub struct OptTrace {
    pub infidelity: Vec<f64>,
    pub best_infidelity: Vec<f64>,
    pub best: f64,
    pub best_step: usize,
    pub best_circuit: Circuit,
    pub wall_time_s: f64,
}

fn check_target(circuit: &Circuit, target: &StateVector) -> Result<()> {
    if target.num_qubits() != circuit.num_qubits() {
        return Err(Error::Dimension(format!(
            "target has {} qubits, circuit {}",
            target.num_qubits(),
            circuit.num_qubits()
        )));
    }
    if circuit.num_qubits() > DENSE_MAX_QUBITS {
        return Err(Error::TooLarge(circuit.num_qubits()));
    }
    Ok(())
}

fn overlap(a: &[C64], b: &[C64]) -> C64 {
    a.iter().zip(b).map(|(x, y)| x.conj() * y).sum()
}

/// `|⟨target|ψ⟩|²` for the state prepared by `circuit`.
pub fn circuit_fidelity(circuit: &Circuit, target: &StateVector) -> Result<f64> {
    check_target(circuit, target)?;
    let m = circuit.num_qubits();
    let mut psi = zero_state(m);
    for g in circuit.gates() {
        apply_matrix(&mut psi, m, g.targets(), g.matrix());
    }
    Ok(overlap(target.amps(), &psi).norm_sqr())
}

/// `E[i][j] = Σ_rest conj(λ[i, rest])·ρ[j, rest]`, so that the overlap is
/// `Σ_ij U_ij E_ij`.
fn environment(lambda: &[C64], rho: &[C64], m: usize, targets: &[usize]) -> Mat {
    let idx = GateIndexer::new(m, targets);
    let d = idx.offsets().len();
    let mut env = Mat::zeros(d, d);
    idx.for_each_base(|base| {
        for (i, &oi) in idx.offsets().iter().enumerate() {
            let l = lambda[base + oi].conj();
            for (j, &oj) in idx.offsets().iter().enumerate() {
                env[(i, j)] += l * rho[base + oj];
            }
        }
    });
    env
}

/// Fidelity and per-gate Euclidean gradients `2·o·conj(E)`.
pub fn fidelity_gradient(circuit: &Circuit, target: &StateVector) -> Result<(f64, Vec<Mat>)> {
    check_target(circuit, target)?;
    let m = circuit.num_qubits();
    let mut rho = zero_state(m);
    for g in circuit.gates() {
        apply_matrix(&mut rho, m, g.targets(), g.matrix());
    }
    let o = overlap(target.amps(), &rho);
    let mut lambda = target.amps().to_vec();
    let mut grads = vec![Mat::zeros(0, 0); circuit.gates().len()];
    for (k, g) in circuit.gates().iter().enumerate().rev() {
        let adj = g.matrix().adjoint();
        apply_matrix(&mut rho, m, g.targets(), &adj);
        let env = environment(&lambda, &rho, m, g.targets());
        grads[k] = env.map(|e| 2.0 * o * e.conj());
        apply_matrix(&mut lambda, m, g.targets(), &adj);
    }
    Ok((o.norm_sqr(), grads))
}

/// Tangent-space projection `U·skew(U†G)` at unitary `U`.
pub fn project_tangent(u: &Mat, g: &Mat) -> Mat {
    u * skew(&(u.adjoint() * g))
}

fn retract(x: &Mat, retraction: Retraction) -> Mat {
    match retraction {
        Retraction::Qr => qr_unitary(x),
        Retraction::Polar => polar_unitary(x),
    }
}

/// One Adam ascent step on the unitary manifold.
pub fn riemannian_step(gate: &Mat, euclid_grad: &Mat, moments: &mut Moments, config: &OptimizerConfig) -> Result<Mat> {
    let err = unitarity_error(gate);
    if err.is_nan() || err > INPUT_UNITARY_TOL {
        return Err(Error::NotUnitary(format!("gate deviates by {err:.3e}")));
    }
    if euclid_grad.shape() != gate.shape() {
        return Err(Error::Dimension(format!("gradient {:?} for gate {:?}", euclid_grad.shape(), gate.shape())));
    }
    let rg = project_tangent(gate, euclid_grad);
    let (b1, b2) = (config.beta1, config.beta2);
    let first = match moments.first.take() {
        Some(prev) => project_tangent(gate, &prev) * C64::from(b1) + &rg * C64::from(1.0 - b1),
        None => &rg * C64::from(1.0 - b1),
    };
    moments.second = b2 * moments.second + (1.0 - b2) * rg.norm_squared();
    moments.t += 1;
    let m_hat = 1.0 / (1.0 - b1.powi(moments.t));
    let v_hat = moments.second / (1.0 - b2.powi(moments.t));
    let scale = config.lr * m_hat / (v_hat.sqrt() + config.eps);
    let step = &first * C64::from(scale);
    moments.first = Some(first);
    if step.norm() == 0.0 {
        return Ok(gate.clone());
    }
    Ok(retract(&(gate + step), config.retraction))
}

/// Maximizes the fidelity of `circuit` with `target`; returns the best
/// circuit seen.
pub fn optimize(circuit: &Circuit, target: &StateVector, config: &OptimizerConfig) -> Result<(Circuit, OptTrace)> {
    config.validate()?;
    check_target(circuit, target)?;
    let start = Instant::now();
    let mut current = circuit.clone();
    let mut moments = vec![Moments::default(); current.gates().len()];
    let mut best_circuit = current.clone();
    let (mut best, mut best_step) = (f64::INFINITY, 0);
    let (mut infidelity, mut best_infidelity) = (Vec::new(), Vec::new());
    for step in 0..config.steps {
        let (f, grads) = fidelity_gradient(&current, target)?;
        let inf = (1.0 - f).max(0.0);
        infidelity.push(inf);
        if inf < best {
            best = inf;
            best_step = step;
            best_circuit = current.clone();
        }
        best_infidelity.push(best);
        if step >= config.patience {
            let past = best_infidelity[step - config.patience];
            if past - best < config.tol {
                break;
            }
        }
        if step + 1 == config.steps {
            break;
        }
        for ((gate, grad), mom) in current.gates_mut().iter_mut().zip(&grads).zip(&mut moments) {
            let next = riemannian_step(gate.matrix(), grad, mom, config)?;
            gate.set_matrix(next)?;
        }
    }
    let trace = OptTrace {
        infidelity,
        best_infidelity,
        best,
        best_step,
        best_circuit: best_circuit.clone(),
        wall_time_s: start.elapsed().as_secs_f64(),
    };
    Ok((best_circuit, trace))
}
