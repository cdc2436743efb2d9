use super::{DecayKind, DecayModel, TruncationSpec};
use crate::error::{invalid, Result};
use crate::spectral::hurwitz_zeta;

/// Per-axis sums of the squared coefficient bound over all frequencies,
/// over the retained block and over the discarded frequencies.
struct AxisSums {
    all: f64,
    appr: f64,
    disc: f64,
}

impl AxisSums {
    /// Weight of `I_disc = I_all \ I_appr` for a product of two axes.
    fn discarded_product(x: &AxisSums, y: &AxisSums) -> f64 {
        x.disc * y.all + x.appr * y.disc
    }
}

/// Exponential decay: exact finite-`N` sums of
/// `(e^{−α|p|} + 2cosh(αp)·u/(1−u))²`, `u = e^{−αN}`.
fn exp_axis(alpha: f64, side: usize, chi: usize) -> AxisSums {
    let (nn, chi) = (side as f64, chi as f64);
    let u = (-alpha * nn).exp();
    let coth = 1.0 / alpha.tanh();
    let ratio = (1.0 + u) / (1.0 - u);
    let tail = 2.0 * u / (1.0 - u).powi(2);
    let decay = (-alpha * chi).exp() / alpha.sinh();
    let grow = u * (alpha * chi).sinh() / alpha.sinh();
    AxisSums {
        all: coth * ratio + nn * tail,
        appr: (coth - decay) * ratio + (chi + grow) * tail,
        disc: decay * ratio + (nn - chi - grow) * tail,
    }
}

/// Algebraic decay: sums of `(1/(|p|+1)^α + Z/N^α)²` with
/// `Z = ζ(α,1/2) + ζ(α,1)`.
fn alg_axis(alpha: f64, side: usize, chi: usize) -> Result<AxisSums> {
    let nn = side as f64;
    let half = nn / 2.0 + 1.0;
    let lam2 = ((chi - 1) / 2) as f64 + 2.0;
    let z = hurwitz_zeta(alpha, 0.5)? + hurwitz_zeta(alpha, 1.0)?;
    let shift = z / nn.powf(alpha);
    let harmonic_sums = |s: f64| -> Result<(f64, f64, f64)> {
        let z1 = hurwitz_zeta(s, 1.0)?;
        let zl = hurwitz_zeta(s, lam2)?;
        let zh = hurwitz_zeta(s, half)?;
        let edge = half.powf(-s);
        Ok((2.0 * z1 - 1.0 + edge - 2.0 * zh, 2.0 * z1 - 2.0 * zl - 1.0, edge + 2.0 * zl - 2.0 * zh))
    };
    let (q_all, q_appr, q_disc) = harmonic_sums(2.0 * alpha)?;
    let (l_all, l_appr, l_disc) = harmonic_sums(alpha)?;
    let sq = shift * shift;
    let chi = chi as f64;
    Ok(AxisSums {
        all: q_all + 2.0 * shift * l_all + nn * sq,
        appr: q_appr + 2.0 * shift * l_appr + chi * sq,
        disc: q_disc + 2.0 * shift * l_disc + (nn - chi) * sq,
    })
}

/// Closed-form upper bound on `Σ_{I_disc} |f̂_pq|²` for any spectrum whose
/// continuum coefficients are enveloped by `model`. For a positive saturating
/// exponential spectrum the bound is attained.
pub fn discarded_weight_bound(model: &DecayModel, n: usize, lambda: usize) -> Result<f64> {
    let t = TruncationSpec::new(lambda, n)?;
    let side = 1usize << n;
    let (x, y) = match model.kind {
        DecayKind::Exponential => (exp_axis(model.alpha, side, t.chi()), exp_axis(model.beta, side, t.chi())),
        DecayKind::Algebraic => (alg_axis(model.alpha, side, t.chi())?, alg_axis(model.beta, side, t.chi())?),
    };
    Ok(model.c * model.c * AxisSums::discarded_product(&x, &y))
}

fn bound_from_weight(weight: f64, g_norm: f64) -> Result<f64> {
    if !(g_norm > 0.0 && g_norm.is_finite()) {
        return invalid(format!("‖ĝ‖_F must be positive, got {g_norm}"));
    }
    Ok(2.0 * weight.max(0.0).sqrt() / g_norm)
}

/// `2·√W/‖ĝ‖_F` with `W` the exponential-decay discarded-weight bound.
pub fn bound_exponential(model: &DecayModel, n: usize, lambda: usize, g_norm: f64) -> Result<f64> {
    if model.kind != DecayKind::Exponential {
        return invalid("bound_exponential needs an exponential model");
    }
    let model = DecayModel::new(model.kind, model.c, model.alpha, model.beta)?;
    bound_from_weight(discarded_weight_bound(&model, n, lambda)?, g_norm)
}

/// `2·√W/‖ĝ‖_F` with `W` the algebraic-decay discarded-weight bound.
pub fn bound_algebraic(model: &DecayModel, n: usize, lambda: usize, g_norm: f64) -> Result<f64> {
    if model.kind != DecayKind::Algebraic {
        return invalid("bound_algebraic needs an algebraic model");
    }
    let model = DecayModel::new(model.kind, model.c, model.alpha, model.beta)?;
    bound_from_weight(discarded_weight_bound(&model, n, lambda)?, g_norm)
}

/// Exact `Σ_i envelope(p + i·side)` for a positive saturating one-axis
/// envelope with unit prefactor. With `master_side`, only shifts inside
/// `[−master_side/2, master_side/2)` are summed.
pub fn saturating_folded_magnitude(
    kind: DecayKind,
    alpha: f64,
    p: i64,
    side: usize,
    master_side: Option<usize>,
) -> Result<f64> {
    let nn = side as f64;
    let h = (side / 2) as i64;
    if !(-h..h).contains(&p) {
        return invalid(format!("frequency {p} outside a grid of side {side}"));
    }
    let counts = master_side.map(|m| {
        let k = (m / 2) as i64;
        let up = (k - 1 - p).div_euclid(side as i64).max(0);
        let down = (p + k).div_euclid(side as i64).max(0);
        (up, down)
    });
    let pf = p as f64;
    match kind {
        DecayKind::Exponential => {
            let u = (-alpha * nn).exp();
            let series = |count: Option<i64>| u * (1.0 - count.map_or(0.0, |c| u.powi(c as i32))) / (1.0 - u);
            Ok((-alpha * pf.abs()).exp()
                + (-alpha * pf).exp() * series(counts.map(|c| c.0))
                + (alpha * pf).exp() * series(counts.map(|c| c.1)))
        }
        DecayKind::Algebraic => {
            let partial = |a: f64, count: Option<i64>| -> Result<f64> {
                let full = hurwitz_zeta(alpha, a)?;
                Ok(match count {
                    Some(c) => full - hurwitz_zeta(alpha, a + c as f64)?,
                    None => full,
                })
            };
            let up = partial(1.0 + (pf + 1.0) / nn, counts.map(|c| c.0))?;
            let down = partial(1.0 - (pf - 1.0) / nn, counts.map(|c| c.1))?;
            Ok((pf.abs() + 1.0).powf(-alpha) + nn.powf(-alpha) * (up + down))
        }
    }
}

/// Exact discarded weight of the alias-folded positive saturating spectrum
/// `model`, optionally truncated to a finite master.
pub fn saturating_discarded_weight(
    model: &DecayModel,
    n: usize,
    lambda: usize,
    master_side: Option<usize>,
) -> Result<f64> {
    TruncationSpec::new(lambda, n)?;
    let side = 1usize << n;
    let h = (side / 2) as i64;
    let axis = |alpha: f64| -> Result<AxisSums> {
        let mut s = AxisSums { all: 0.0, appr: 0.0, disc: 0.0 };
        for p in -h..h {
            let v = saturating_folded_magnitude(model.kind, alpha, p, side, master_side)?.powi(2);
            s.all += v;
            if p.unsigned_abs() as usize <= lambda {
                s.appr += v;
            } else {
                s.disc += v;
            }
        }
        Ok(s)
    };
    let (x, y) = (axis(model.alpha)?, axis(model.beta)?);
    Ok(model.c * model.c * AxisSums::discarded_product(&x, &y))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spectral::{alias_fold, MasterSpectrum};

    fn brute_discarded(model: &DecayModel, n: usize, lambda: usize, master: usize) -> f64 {
        let m = MasterSpectrum::from_model(model, master, None, None).unwrap();
        let s = alias_fold(&m, n).unwrap();
        let l = lambda as i64;
        s.iter().filter(|&(p, q, _)| p.abs() > l || q.abs() > l).map(|t| t.2.norm_sqr()).sum()
    }

    #[test]
    fn exponential_closed_form_is_attained() {
        let model = DecayModel::exponential(1.0, 0.2, 0.2).unwrap();
        for (n, lambda) in [(3, 1), (5, 0), (5, 7), (6, 20)] {
            let closed = discarded_weight_bound(&model, n, lambda).unwrap();
            let brute = brute_discarded(&model, n, lambda, 512);
            assert!(((closed - brute) / brute).abs() < 1e-8, "n={n} Λ={lambda}: {closed} vs {brute}");
        }
        let asym = DecayModel::exponential(2.0, 0.35, 0.6).unwrap();
        let closed = discarded_weight_bound(&asym, 4, 2).unwrap();
        let brute = brute_discarded(&asym, 4, 2, 256);
        assert!(((closed - brute) / brute).abs() < 1e-8);
    }

    #[test]
    fn saturating_weight_matches_brute_force_on_finite_master() {
        for model in [DecayModel::algebraic(1.0, 1.2, 1.2).unwrap(), DecayModel::exponential(1.0, 0.2, 0.2).unwrap()] {
            for (n, lambda) in [(5, 3), (6, 10)] {
                let exact = saturating_discarded_weight(&model, n, lambda, Some(512)).unwrap();
                let brute = brute_discarded(&model, n, lambda, 512);
                assert!(((exact - brute) / brute).abs() < 1e-9, "{model:?} n={n}: {exact} vs {brute}");
            }
        }
    }

    #[test]
    fn algebraic_bound_dominates_exact_weight() {
        let model = DecayModel::algebraic(1.0, 1.2, 1.2).unwrap();
        for (n, lambda) in [(4, 1), (5, 3), (7, 31)] {
            let bound = discarded_weight_bound(&model, n, lambda).unwrap();
            let exact = saturating_discarded_weight(&model, n, lambda, None).unwrap();
            assert!(bound >= exact);
        }
    }

    #[test]
    fn algebraic_axis_matches_per_coefficient_sum() {
        let (alpha, side, chi) = (1.3, 32usize, 7usize);
        let z = hurwitz_zeta(alpha, 0.5).unwrap() + hurwitz_zeta(alpha, 1.0).unwrap();
        let h = (side / 2) as i64;
        let coef = |p: i64| ((p.abs() as f64 + 1.0).powf(-alpha) + z / (side as f64).powf(alpha)).powi(2);
        let all: f64 = (-h..h).map(coef).sum();
        let appr: f64 = (-3..=3).map(coef).sum();
        let s = alg_axis(alpha, side, chi).unwrap();
        assert!((s.all - all).abs() < 1e-10 * all);
        assert!((s.appr - appr).abs() < 1e-10 * appr);
        assert!((s.disc - (all - appr)).abs() < 1e-10 * all);
    }

    #[test]
    fn bounds_are_monotone_in_lambda() {
        let e = DecayModel::exponential(1.0, 0.2, 0.2).unwrap();
        let a = DecayModel::algebraic(0.5, 1.24, 1.12).unwrap();
        for n in [4, 6, 8] {
            let max = (1 << (n - 1)) - 1;
            let be: Vec<f64> = (0..=max).map(|l| bound_exponential(&e, n, l, 1.0).unwrap()).collect();
            let ba: Vec<f64> = (0..=max).map(|l| bound_algebraic(&a, n, l, 1.0).unwrap()).collect();
            assert!(be.windows(2).all(|w| w[1] <= w[0]));
            assert!(ba.windows(2).all(|w| w[1] <= w[0]) && ba.iter().all(|x| x.is_finite()));
        }
    }

    #[test]
    fn domain_errors() {
        let e = DecayModel::exponential(1.0, 0.2, 0.2).unwrap();
        let a = DecayModel::algebraic(1.0, 1.2, 1.2).unwrap();
        assert!(bound_algebraic(&e, 4, 1, 1.0).is_err());
        assert!(bound_exponential(&a, 4, 1, 1.0).is_err());
        assert!(bound_exponential(&e, 4, 8, 1.0).is_err());
        assert!(bound_exponential(&e, 4, 1, 0.0).is_err());
        let bad = DecayModel { kind: DecayKind::Algebraic, c: 1.0, alpha: 0.9, beta: 1.5 };
        assert!(bound_algebraic(&bad, 4, 1, 1.0).is_err());
    }
}
