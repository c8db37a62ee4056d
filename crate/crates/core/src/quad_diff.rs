//! Pushforward of the quadratic differentials `Q_i = dt^2 / (t - z_i)` under
//! `P(t) = t^d + c`.
//!
//! Coefficients only are handled: a differential `q(t) dt^2` is the function
//! `q`, and `P_* q (t) = sum_{P(u) = t} q(u) / P'(u)^2`.

use crate::error::{KochError, Result};
use crate::numeric::{nth_roots, orbit, root_of_unity, Cx};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::f64::consts::TAU;

const POLE_GUARD: f64 = 1e-9;
const SAMPLE_GUARD: f64 = 1e-3;

fn guard(t: Cx, poles: &[Cx], radius: f64) -> Result<()> {
    match poles.iter().find(|p| (t - *p).norm() <= radius) {
        Some(_) => Err(KochError::EvaluationAtPole { re: t.re, im: t.im }),
        None => Ok(()),
    }
}

/// `P_* q` at `t`, summing over the `d` preimages of `t`.
pub fn pushforward(d: u32, c: Cx, q: impl Fn(Cx) -> Cx, t: Cx) -> Result<Cx> {
    guard(t, &[c], POLE_GUARD)?;
    Ok(nth_roots(t - c, d as usize)
        .into_iter()
        .map(|u| {
            let dp = d as f64 * u.powu(d - 1);
            q(u) / (dp * dp)
        })
        .sum())
}

/// `P_* Q_i` at `t`, where `z_i` is the `i`-th point of the critical orbit.
pub fn pushforward_eval(d: u32, c: Cx, i: usize, t: Cx) -> Result<Cx> {
    let z = orbit(d, c, i + 1)?;
    guard(t, &[z[0], z[i]], POLE_GUARD)?;
    let zi = z[i - 1];
    pushforward(d, c, |u| (u - zi).inv(), t)
}

/// `(Q_{i+1} - Q_1) / delta_i` at `t`.
pub fn pushforward_rhs(d: u32, c: Cx, i: usize, t: Cx) -> Result<Cx> {
    let z = orbit(d, c, i + 1)?;
    let delta = d as f64 * z[i - 1].powu(d - 1);
    if delta.norm() <= POLE_GUARD {
        return Err(KochError::DegenerateIdentity(i));
    }
    guard(t, &[z[0], z[i]], POLE_GUARD)?;
    Ok(((t - z[i]).inv() - (t - z[0]).inv()) / delta)
}

#[derive(Debug, Clone, PartialEq)]
pub struct PushforwardReport {
    pub samples: usize,
    pub max_rel_error: f64,
}

/// Compares both sides of `P_* Q_i = (Q_{i+1} - Q_1) / delta_i` at random
/// points of the annulus `1 <= |t - c| <= 4`.
pub fn verify_pushforward_identity(d: u32, c: Cx, i: usize, samples: usize, seed: u64) -> Result<PushforwardReport> {
    if i == 0 {
        return Err(KochError::InvalidIndex("orbit index starts at 1".into()));
    }
    let z = orbit(d, c, i + 1)?;
    let delta = d as f64 * z[i - 1].powu(d - 1);
    if delta.norm() <= POLE_GUARD {
        return Err(KochError::DegenerateIdentity(i));
    }
    let poles = [c, z[i]];
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut max_rel_error: f64 = 0.0;
    let mut taken = 0;
    while taken < samples {
        // area-uniform radius on the annulus
        let r = rng.random_range(1.0f64..16.0).sqrt();
        let t = c + Cx::from_polar(r, rng.random_range(0.0..TAU));
        if poles.iter().any(|p| (t - p).norm() < SAMPLE_GUARD) {
            continue;
        }
        let lhs = pushforward_eval(d, c, i, t)?;
        let rhs = pushforward_rhs(d, c, i, t)?;
        let scale = lhs.norm().max(rhs.norm()).max(f64::MIN_POSITIVE);
        max_rel_error = max_rel_error.max((lhs - rhs).norm() / scale);
        taken += 1;
    }
    Ok(PushforwardReport {
        samples,
        max_rel_error,
    })
}

/// Both sides of
/// `sum_{j=0}^{d-1} 1 / (xi^{-j} chi - xi^{-2j}) = d chi^{d-2} / (chi^d - 1)`,
/// `xi = exp(2 pi i / d)`.
pub fn partial_fraction_identity(d: u32, chi: Cx) -> Result<(Cx, Cx)> {
    let chid = chi.powu(d);
    if (chid - 1.0).norm() <= POLE_GUARD {
        return Err(KochError::RootOfUnity);
    }
    let lhs = (0..d as i64)
        .map(|j| (root_of_unity(-j, d) * chi - root_of_unity(-2 * j, d)).inv())
        .sum();
    let rhs = d as f64 * chi.powi(d as i32 - 2) / (chid - 1.0);
    Ok((lhs, rhs))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Cx {
        Cx::new(re, im)
    }

    #[test]
    fn anchor_value() {
        let v = pushforward_eval(2, c(-1.0, 0.0), 1, c(1.0, 0.0)).unwrap();
        assert!((v - c(-0.25, 0.0)).norm() < 1e-15);
        let r = pushforward_rhs(2, c(-1.0, 0.0), 1, c(1.0, 0.0)).unwrap();
        assert!((r - c(-0.25, 0.0)).norm() < 1e-15);
        // hand sum over the preimages +-sqrt 2
        let s = 2f64.sqrt();
        let hand = (1.0 / (1.0 + s) + 1.0 / (1.0 - s)) / 8.0;
        assert!((v.re - hand).abs() < 1e-15);
    }

    #[test]
    fn poles_are_rejected() {
        let err = pushforward_eval(2, c(-1.0, 0.0), 1, c(-1.0, 0.0)).unwrap_err();
        assert!(err.to_string().contains("evaluation at pole"));
        // z_2 = 0 is the image of the pole of Q_1
        assert!(pushforward_eval(2, c(-1.0, 0.0), 1, c(1e-12, 0.0)).is_err());
    }

    #[test]
    fn preimage_order_does_not_matter() {
        let (d, cc, t) = (3, c(0.1, 0.6), c(1.3, -0.2));
        let zi = orbit(d, cc, 2).unwrap()[1];
        let f = |u: Cx| (u - zi).inv() / (9.0 * u.powu(4));
        let mut roots = nth_roots(t - cc, 3);
        let a: Cx = roots.iter().map(|u| f(*u)).sum();
        roots.reverse();
        let b: Cx = roots.iter().map(|u| f(*u)).sum();
        assert!((a - b).norm() < 1e-15 * a.norm().max(1.0));
        assert!((pushforward_eval(d, cc, 2, t).unwrap() - a).norm() < 1e-14);
    }

    #[test]
    fn identity_examples() {
        let r = verify_pushforward_identity(2, c(0.0, 1.0), 1, 100, 7).unwrap();
        assert!(r.max_rel_error < 1e-9, "{r:?}");
        // d = 3, c = i: orbit (i, 0, i, ...)
        let r = verify_pushforward_identity(3, c(0.0, 1.0), 1, 100, 7).unwrap();
        assert!(r.max_rel_error < 1e-9, "{r:?}");
        let err = verify_pushforward_identity(2, c(-1.0, 0.0), 2, 10, 7).unwrap_err();
        assert!(err.to_string().contains("identity degenerate (critical orbit point)"));
    }

    #[test]
    fn partial_fraction_examples() {
        let (l, r) = partial_fraction_identity(2, c(2.0, 0.0)).unwrap();
        assert!((l - c(2.0 / 3.0, 0.0)).norm() < 1e-15 && (r - c(2.0 / 3.0, 0.0)).norm() < 1e-15);
        let (l, r) = partial_fraction_identity(3, c(2.0, 0.0)).unwrap();
        assert!((l - c(6.0 / 7.0, 0.0)).norm() < 1e-14 && (r - c(6.0 / 7.0, 0.0)).norm() < 1e-15);
        let (l, r) = partial_fraction_identity(2, c(1e6, 0.0)).unwrap();
        assert!(l.norm() < 1e-5 && r.norm() < 1e-5);
        assert_eq!(partial_fraction_identity(4, c(0.0, 1.0)).unwrap_err(), KochError::RootOfUnity);
    }

    #[test]
    fn pushforward_is_linear() {
        let (d, cc) = (3, c(-0.2, 0.4));
        let (p1, p2) = (c(0.3, 0.1), c(-0.5, 0.9));
        let (a, b) = (c(1.5, -2.0), c(0.25, 0.75));
        for t in [c(2.0, 1.0), c(-1.5, 0.3), c(0.1, -3.0)] {
            let combo = pushforward(d, cc, |u| a / (u - p1) + b / (u - p2), t).unwrap();
            let sep = a * pushforward(d, cc, |u| (u - p1).inv(), t).unwrap()
                + b * pushforward(d, cc, |u| (u - p2).inv(), t).unwrap();
            assert!((combo - sep).norm() <= 1e-9 * combo.norm().max(1.0));
        }
    }
}
