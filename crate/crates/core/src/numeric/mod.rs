//! Complex-arithmetic kernels shared by the rest of the crate: critical
//! orbits of `t^d + c`, simultaneous root finding, small dense eigenproblems
//! and tolerant multiset comparison.

mod matrix;
mod multiset;
mod roots;
mod scaled;

pub use matrix::{characteristic_polynomial, eigenvalues, SquareMatrix};
pub use multiset::{multiset_match, MatchFailure, Matching, Multiset, Tolerance};
pub use roots::{cluster_roots, find_roots, find_roots_with, Holomorphic, RootCluster, RootOptions};
pub use scaled::ScaledCx;

use crate::error::{KochError, Result};

/// The ambient scalar field.
pub type Cx = num_complex::Complex64;

pub(crate) fn cx(re: f64, im: f64) -> Cx {
    Cx::new(re, im)
}

pub fn is_finite(z: Cx) -> bool {
    z.re.is_finite() && z.im.is_finite()
}

/// `exp(2 pi i j / d)`.
pub fn root_of_unity(j: i64, d: u32) -> Cx {
    let j = j.rem_euclid(d as i64);
    // Exact values on the axes keep d = 2, 4 free of rounding noise.
    if (4 * j) % d as i64 == 0 {
        return match (4 * j) / d as i64 {
            0 => cx(1.0, 0.0),
            1 => cx(0.0, 1.0),
            2 => cx(-1.0, 0.0),
            _ => cx(0.0, -1.0),
        };
    }
    Cx::from_polar(1.0, 2.0 * std::f64::consts::PI * j as f64 / d as f64)
}

/// All `n`-th roots of `w`, starting from the principal one.
pub fn nth_roots(w: Cx, n: usize) -> Vec<Cx> {
    let principal = if w == Cx::new(0.0, 0.0) {
        w
    } else {
        Cx::from_polar(w.norm().powf(1.0 / n as f64), w.arg() / n as f64)
    };
    (0..n)
        .map(|j| principal * root_of_unity(j as i64, n as u32))
        .collect()
}

/// Critical orbit `(z_1, ..., z_n)` of `P(t) = t^d + c`, i.e. `z_1 = c` and
/// `z_{i+1} = z_i^d + c`.
pub fn orbit(d: u32, c: Cx, n: usize) -> Result<Vec<Cx>> {
    let mut out = Vec::with_capacity(n);
    let mut z = c;
    for step in 0..n {
        if !is_finite(z) {
            return Err(KochError::OrbitDiverged { d, step });
        }
        out.push(z);
        z = z.powu(d) + c;
    }
    Ok(out)
}

/// Orbit together with the parameter derivative `dz_i/dc`, which obeys
/// `z'_1 = 1`, `z'_{i+1} = d z_i^{d-1} z'_i + 1`.
pub fn orbit_with_param_derivative(d: u32, c: Cx, n: usize) -> Result<Vec<(Cx, Cx)>> {
    let mut out = Vec::with_capacity(n);
    let (mut z, mut dz) = (c, Cx::new(1.0, 0.0));
    let df = d as f64;
    for step in 0..n {
        if !is_finite(z) || !is_finite(dz) {
            return Err(KochError::OrbitDiverged { d, step });
        }
        out.push((z, dz));
        dz = df * z.powu(d - 1) * dz + 1.0;
        z = z.powu(d) + c;
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn close(a: Cx, b: Cx, tol: f64) -> bool {
        (a - b).norm() <= tol
    }

    #[test]
    fn orbit_examples() {
        let o = orbit(2, cx(-1.0, 0.0), 4).unwrap();
        assert_eq!(o, vec![cx(-1.0, 0.0), cx(0.0, 0.0), cx(-1.0, 0.0), cx(0.0, 0.0)]);
        assert_eq!(orbit(2, cx(0.0, 0.0), 3).unwrap(), vec![cx(0.0, 0.0); 3]);
        let o = orbit(2, cx(-2.0, 0.0), 4).unwrap();
        assert_eq!(o, vec![cx(-2.0, 0.0), cx(2.0, 0.0), cx(2.0, 0.0), cx(2.0, 0.0)]);
    }

    #[test]
    fn orbit_divergence_is_an_error() {
        let err = orbit(2, cx(3.0, 0.0), 40).unwrap_err();
        assert!(matches!(err, KochError::OrbitDiverged { .. }));
        assert!(err.to_string().contains("orbit diverged"));
    }

    // Central differences in c, h = 1e-6.
    fn fd_derivative(d: u32, c: Cx, n: usize) -> Vec<Cx> {
        let h = 1e-6;
        let plus = orbit(d, c + h, n).unwrap();
        let minus = orbit(d, c - h, n).unwrap();
        plus.iter().zip(&minus).map(|(p, m)| (p - m) / (2.0 * h)).collect()
    }

    #[test]
    fn param_derivative_examples() {
        let z = orbit_with_param_derivative(2, cx(0.0, 0.0), 3).unwrap();
        assert!(z.iter().all(|(_, dz)| *dz == cx(1.0, 0.0)));

        // values frozen from the finite-difference oracle
        let fd = fd_derivative(2, cx(-1.0, 0.0), 3);
        for (f, want) in fd.iter().zip([1.0, -1.0, 1.0]) {
            assert!(close(*f, cx(want, 0.0), 1e-6));
        }
        let z = orbit_with_param_derivative(2, cx(-1.0, 0.0), 3).unwrap();
        let got: Vec<Cx> = z.iter().map(|p| p.1).collect();
        assert_eq!(got, vec![cx(1.0, 0.0), cx(-1.0, 0.0), cx(1.0, 0.0)]);

        let fd = fd_derivative(2, cx(-2.0, 0.0), 3);
        for (f, want) in fd.iter().zip([1.0, -3.0, -11.0]) {
            assert!(close(*f, cx(want, 0.0), 1e-5));
        }
        let z = orbit_with_param_derivative(2, cx(-2.0, 0.0), 3).unwrap();
        let got: Vec<Cx> = z.iter().map(|p| p.1).collect();
        assert_eq!(got, vec![cx(1.0, 0.0), cx(-3.0, 0.0), cx(-11.0, 0.0)]);
    }

    #[test]
    fn roots_of_unity_are_exact_on_axes() {
        assert_eq!(root_of_unity(1, 2), cx(-1.0, 0.0));
        assert_eq!(root_of_unity(1, 4), cx(0.0, 1.0));
        assert_eq!(root_of_unity(-1, 4), cx(0.0, -1.0));
        let b = root_of_unity(1, 3);
        assert!(close(b.powu(3), cx(1.0, 0.0), 1e-15));
    }

    #[test]
    fn nth_roots_cover_all_branches() {
        let w = cx(4.0, 4.0);
        let r = nth_roots(w, 3);
        assert_eq!(r.len(), 3);
        for z in &r {
            assert!(close(z.powu(3), w, 1e-12));
        }
    }

    proptest::proptest! {
        #[test]
        fn param_derivative_matches_finite_differences(
            re in -2.0f64..2.0, im in -2.0f64..2.0, n in 1usize..=12, d in 2u32..=3,
        ) {
            let c = cx(re, im);
            // only orbits that stay bounded are meaningful for a difference quotient
            let Ok(z) = orbit_with_param_derivative(d, c, n) else { return Ok(()) };
            if c.norm() > 2.0 || z.iter().any(|(v, dv)| v.norm() >= 2.5 || dv.norm() >= 1e3) {
                return Ok(());
            }
            let fd = fd_derivative(d, c, n);
            for ((_, dz), f) in z.iter().zip(&fd) {
                let scale = dz.norm().max(1.0);
                proptest::prop_assert!((dz - f).norm() <= 1e-5 * scale,
                    "analytic {dz} vs fd {f}");
            }
        }
    }
}
