//! Simultaneous root finding (Aberth-Ehrlich) on evaluation form.
//!
//! The functions handled here are polynomials that are cheap to evaluate
//! through a recurrence but expensive to expand into coefficients, so the
//! solver never sees coefficients: it only asks for Newton corrections.

use super::{is_finite, Cx};
use crate::error::{KochError, Result};
use std::f64::consts::TAU;

/// A holomorphic function known through its value and derivative.
pub trait Holomorphic {
    /// `(g(c), g'(c))`.
    fn eval(&self, c: Cx) -> (Cx, Cx);

    /// Newton correction `g(c) / g'(c)`.
    fn newton_step(&self, c: Cx) -> Cx {
        let (g, dg) = self.eval(c);
        g / dg
    }

    /// `|g(c)|`, used to accept polishing steps.
    fn residual(&self, c: Cx) -> f64 {
        self.eval(c).0.norm()
    }
}

impl<F> Holomorphic for F
where
    F: Fn(Cx) -> (Cx, Cx),
{
    fn eval(&self, c: Cx) -> (Cx, Cx) {
        self(c)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RootOptions {
    pub max_iterations: usize,
    /// Aberth step size (relative to `1 + |z|`) below which a root is frozen.
    pub step_tol: f64,
    /// Target for `|g|` after Newton polishing.
    pub residual_tol: f64,
    pub polish_iterations: usize,
}

impl Default for RootOptions {
    fn default() -> Self {
        Self {
            max_iterations: 800,
            step_tol: 1e-14,
            residual_tol: 1e-12,
            polish_iterations: 8,
        }
    }
}

/// All `degree` roots of `eval`, repeated according to multiplicity, with
/// starters on the circle `|c| = radius_hint`.
pub fn find_roots<H: Holomorphic + ?Sized>(eval: &H, degree: usize, radius_hint: f64) -> Result<Vec<Cx>> {
    find_roots_with(eval, degree, radius_hint, &RootOptions::default())
}

pub fn find_roots_with<H: Holomorphic + ?Sized>(
    eval: &H,
    degree: usize,
    radius_hint: f64,
    opts: &RootOptions,
) -> Result<Vec<Cx>> {
    if degree == 0 {
        return Ok(Vec::new());
    }
    let radius = if radius_hint.is_finite() && radius_hint > 0.0 {
        radius_hint
    } else {
        1.0
    };
    // The offset keeps starters off the real axis, where symmetric
    // polynomials would otherwise trap pairs of iterates.
    let offset = 0.4;
    let mut z: Vec<Cx> = (0..degree)
        .map(|j| Cx::from_polar(radius, TAU * j as f64 / degree as f64 + offset))
        .collect();
    let mut frozen = vec![false; degree];

    let mut iterations = 0;
    while iterations < opts.max_iterations && frozen.iter().any(|f| !f) {
        iterations += 1;
        for i in 0..degree {
            if frozen[i] {
                continue;
            }
            let newton = eval.newton_step(z[i]);
            if !is_finite(newton) {
                // g' vanished (or overflowed); nudge off the bad spot
                let nudge = 1e-7 * (1.0 + z[i].norm());
                z[i] += Cx::from_polar(nudge, 1.0 + i as f64);
                continue;
            }
            if newton.norm() == 0.0 {
                frozen[i] = true;
                continue;
            }
            let repulsion: Cx = z
                .iter()
                .enumerate()
                .filter(|&(j, zj)| j != i && *zj != z[i])
                .map(|(_, zj)| (z[i] - zj).inv())
                .sum();
            let denom = Cx::new(1.0, 0.0) - newton * repulsion;
            let step = if is_finite(denom) && denom.norm() > 0.0 {
                newton / denom
            } else {
                newton
            };
            z[i] -= step;
            if step.norm() <= opts.step_tol * (1.0 + z[i].norm()) {
                frozen[i] = true;
            }
        }
    }

    polish(eval, &mut z, opts);

    let unconverged: Vec<usize> = (0..degree)
        .filter(|&i| !frozen[i] && !(eval.residual(z[i]) <= opts.residual_tol))
        .collect();
    if !unconverged.is_empty() {
        return Err(KochError::NoConvergence {
            unconverged,
            iterations,
        });
    }
    if z.iter().any(|v| !is_finite(*v)) {
        return Err(KochError::NonFinite("root finder output"));
    }
    Ok(z)
}

/// Newton polishing that refuses steps which would jump to a neighbouring
/// root or raise the residual.
fn polish<H: Holomorphic + ?Sized>(eval: &H, z: &mut [Cx], opts: &RootOptions) {
    for i in 0..z.len() {
        let nearest = z
            .iter()
            .enumerate()
            .filter(|&(j, _)| j != i)
            .map(|(_, zj)| (z[i] - zj).norm())
            .fold(f64::INFINITY, f64::min);
        let mut res = eval.residual(z[i]);
        for _ in 0..opts.polish_iterations {
            if res <= opts.residual_tol {
                break;
            }
            let step = eval.newton_step(z[i]);
            if !is_finite(step) || step.norm() > 0.25 * nearest {
                break;
            }
            let cand = z[i] - step;
            let cand_res = eval.residual(cand);
            if cand_res < res {
                z[i] = cand;
                res = cand_res;
            } else {
                break;
            }
        }
    }
}

/// A group of numerically coincident roots.
#[derive(Debug, Clone, PartialEq)]
pub struct RootCluster {
    /// Mean of the members.
    pub value: Cx,
    pub multiplicity: usize,
    pub members: Vec<usize>,
}

/// Single-linkage grouping of roots closer than `radius`; clusters come out
/// in order of their first member.
pub fn cluster_roots(roots: &[Cx], radius: f64) -> Vec<RootCluster> {
    let n = roots.len();
    let mut label: Vec<Option<usize>> = vec![None; n];
    let mut clusters = Vec::new();
    for seed in 0..n {
        if label[seed].is_some() {
            continue;
        }
        let id = clusters.len();
        let mut members = vec![seed];
        label[seed] = Some(id);
        let mut cursor = 0;
        while cursor < members.len() {
            let cur = members[cursor];
            for j in 0..n {
                if label[j].is_none() && (roots[j] - roots[cur]).norm() <= radius {
                    label[j] = Some(id);
                    members.push(j);
                }
            }
            cursor += 1;
        }
        members.sort_unstable();
        let value = members.iter().map(|&j| roots[j]).sum::<Cx>() / members.len() as f64;
        clusters.push(RootCluster {
            value,
            multiplicity: members.len(),
            members,
        });
    }
    clusters
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numeric::{multiset_match, Multiset, Tolerance};

    fn sorted_re(mut v: Vec<Cx>) -> Vec<Cx> {
        v.sort_by(|a, b| a.re.total_cmp(&b.re).then(a.im.total_cmp(&b.im)));
        v
    }

    #[test]
    fn quadratic_with_imaginary_roots() {
        let roots = find_roots(&|c: Cx| (c * c + 1.0, 2.0 * c), 2, 2.0).unwrap();
        let roots = sorted_re(roots);
        let mut want = vec![Cx::new(0.0, -1.0), Cx::new(0.0, 1.0)];
        want = sorted_re(want);
        for (r, w) in roots.iter().zip(&want) {
            assert!((r - w).norm() < 1e-12, "{r} vs {w}");
        }
    }

    #[test]
    fn quadratic_matches_quadratic_formula() {
        // -c^2 - 2c: roots by the quadratic formula are 0 and -2
        let (a, b, c0) = (-1.0f64, -2.0f64, 0.0f64);
        let disc = (b * b - 4.0 * a * c0).sqrt();
        let want = [(-b + disc) / (2.0 * a), (-b - disc) / (2.0 * a)];
        let roots = find_roots(&|c: Cx| (-c * c - 2.0 * c, -2.0 * c - 2.0), 2, 2.0).unwrap();
        let got = Multiset::new(roots, Tolerance::absolute(1e-12));
        let want = Multiset::new(want.iter().map(|&r| Cx::new(r, 0.0)).collect(), Tolerance::absolute(1e-12));
        assert!(multiset_match(&got, &want).is_ok());
    }

    #[test]
    fn linear() {
        let roots = find_roots(&|c: Cx| (c - 5.0, Cx::new(1.0, 0.0)), 1, 2.0).unwrap();
        assert!((roots[0] - Cx::new(5.0, 0.0)).norm() < 1e-12);
    }

    #[test]
    fn degree_zero_has_no_roots() {
        let roots = find_roots(&|_c: Cx| (Cx::new(1.0, 0.0), Cx::new(0.0, 0.0)), 0, 1.0).unwrap();
        assert!(roots.is_empty());
    }

    #[test]
    fn non_convergence_is_reported() {
        // claims degree 2 but has no roots at all
        let opts = RootOptions {
            max_iterations: 20,
            ..RootOptions::default()
        };
        let err = find_roots_with(&|c: Cx| (c.exp(), c.exp()), 2, 1.0, &opts).unwrap_err();
        match err {
            KochError::NoConvergence { unconverged, .. } => assert!(!unconverged.is_empty()),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn double_root_is_clustered() {
        // (c - 1)^2 (c + 2)
        let f = |c: Cx| {
            let g = (c - 1.0) * (c - 1.0) * (c + 2.0);
            let dg = 2.0 * (c - 1.0) * (c + 2.0) + (c - 1.0) * (c - 1.0);
            (g, dg)
        };
        let roots = find_roots(&f, 3, 3.0).unwrap();
        let clusters = cluster_roots(&roots, 1e-6);
        assert_eq!(clusters.len(), 2);
        let double = clusters.iter().find(|c| c.multiplicity == 2).unwrap();
        assert!((double.value - Cx::new(1.0, 0.0)).norm() < 1e-7);
        assert_eq!(clusters.iter().map(|c| c.multiplicity).sum::<usize>(), 3);
    }

    proptest::proptest! {
        #![proptest_config(proptest::prelude::ProptestConfig::with_cases(64))]
        #[test]
        fn recovers_random_monic_polynomials(
            raw in proptest::collection::vec((-1.0f64..1.0, -1.0f64..1.0), 1..=64),
        ) {
            let want: Vec<Cx> = raw.iter().map(|&(re, im)| Cx::new(re, im)).collect();
            // product form, derivative by the product rule
            let roots = want.clone();
            let f = move |c: Cx| {
                let g: Cx = roots.iter().map(|r| c - r).product();
                let mut dg = Cx::new(0.0, 0.0);
                for i in 0..roots.len() {
                    let mut p = Cx::new(1.0, 0.0);
                    for (j, r) in roots.iter().enumerate() {
                        if j != i {
                            p *= c - r;
                        }
                    }
                    dg += p;
                }
                (g, dg)
            };
            let got = find_roots(&f, want.len(), 2.0).unwrap();
            // all roots lie in the unit box, so max(1, |root|) <= 1.5
            let a = Multiset::new(got, Tolerance::absolute(1e-8));
            let b = Multiset::new(want, Tolerance::absolute(1e-8));
            let m = multiset_match(&a, &b);
            proptest::prop_assert!(m.is_ok(), "{:?}", m.err());
        }
    }
}
