//! Randomised invariants of the maps, Jacobians and numeric helpers.

use koch_core::numeric::{eigenvalues, multiset_match, nth_roots, Cx, Multiset, SquareMatrix, Tolerance};
use koch_core::space::{
    apply_f, apply_f_tilde, apply_f_trunc, apply_g, in_m, project_pi, tau, tau_inverse, KochIndex, SeqVec, TruncVec,
};
use koch_core::spectral::{jacobian_f, jacobian_fd, jacobian_g, tau_matrix};
use proptest::prelude::*;

fn cx() -> impl Strategy<Value = Cx> {
    (-1.5f64..1.5, -1.5f64..1.5).prop_map(|(a, b)| Cx::new(a, b))
}

fn index() -> impl Strategy<Value = KochIndex> {
    (2u32..=4, 0usize..=3, 1usize..=3)
        .prop_flat_map(|(d, k, m)| (Just(d), 1..d, Just(k), Just(m)))
        .prop_map(|(d, j, k, m)| KochIndex::new(d, j, k, m).unwrap())
}

fn index_with_point(min_dim: usize) -> impl Strategy<Value = (KochIndex, Vec<Cx>)> {
    index()
        .prop_filter("dimension", move |i| i.dim() >= min_dim)
        .prop_flat_map(|i| (Just(i), prop::collection::vec(cx(), i.dim())))
}

fn sup_diff(a: &[Cx], b: &[Cx]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).norm()).fold(0.0, f64::max)
}

fn sup(a: &[Cx]) -> f64 {
    a.iter().map(|x| x.norm()).fold(0.0, f64::max)
}

proptest! {
    #[test]
    fn pi_is_idempotent_onto_m(idx in index(), raw in prop::collection::vec(cx(), 12)) {
        let x = TruncVec::new(raw);
        let once = project_pi(&idx, &x).unwrap();
        let twice = project_pi(&idx, &once).unwrap();
        prop_assert!(sup_diff(once.entries(), twice.entries()) <= 1e-12 * (1.0 + once.sup_norm()));
        // pi only subtracts a constant
        let shift = x.get(1) - once.get(1);
        for i in 1..=x.len() {
            prop_assert!((x.get(i) - once.get(i) - shift).norm() <= 1e-12 * (1.0 + x.sup_norm()));
        }
    }

    #[test]
    fn truncated_and_coordinate_maps_agree((idx, x) in index_with_point(1)) {
        let p = SeqVec::new(idx, x).unwrap();
        let len = idx.k + 3 * idx.m + 2;
        let full = apply_f_trunc(&idx, &p.expand(len)).unwrap();
        let fx = apply_f(&idx, &p);
        prop_assert!(in_m(&idx, &full, 1e-10));
        let scale = 1.0 + full.sup_norm();
        for i in 1..=len {
            prop_assert!((full.get(i) - fx.get(i)).norm() <= 1e-11 * scale, "entry {i}");
        }
    }

    #[test]
    fn f_is_homogeneous((idx, x) in index_with_point(1), a in cx()) {
        let p = SeqVec::new(idx, x).unwrap();
        let lhs = apply_f(&idx, &p.scale(a));
        let rhs = apply_f(&idx, &p).scale(a.powu(idx.d));
        prop_assert!(sup_diff(lhs.coords(), rhs.coords()) <= 1e-11 * (1.0 + rhs.sup_norm()));
    }

    #[test]
    fn tau_round_trips_and_conjugates((idx, x) in index_with_point(2)) {
        let u = tau(&idx, &x).unwrap();
        let back = tau_inverse(&idx, &u).unwrap();
        prop_assert!(sup_diff(&back, &x) <= 1e-12 * (1.0 + sup(&x)));
        let lhs = tau(&idx, &apply_g(&idx, &x).unwrap()).unwrap();
        let rhs = apply_f_tilde(&idx, &u).unwrap();
        prop_assert!(sup_diff(&lhs, &rhs) <= 1e-11 * (1.0 + sup(&rhs)));
        // tau composed with the power map is F in coordinates
        let f = apply_f(&idx, &SeqVec::new(idx, x.clone()).unwrap());
        let ft = apply_f_tilde(&idx, &x).unwrap();
        prop_assert!(sup_diff(f.coords(), &ft) <= 1e-12 * (1.0 + sup(&ft)));
    }

    #[test]
    fn tau_matrix_is_tau((idx, x) in index_with_point(2)) {
        let t = tau_matrix(&idx).unwrap();
        let lin = t.mul_vec(&x);
        prop_assert!(sup_diff(&lin, &tau(&idx, &x).unwrap()) <= 1e-12 * (1.0 + sup(&x)));
    }

    #[test]
    fn jacobian_matches_finite_differences((idx, x) in index_with_point(1)) {
        let p = SeqVec::new(idx, x).unwrap();
        let exact = jacobian_f(&p);
        let fd = jacobian_fd(&p, 1e-6);
        let err = exact.sub(&fd).max_abs();
        prop_assert!(err <= 1e-6 * (1.0 + exact.max_abs()), "error {err}");
    }

    #[test]
    fn g_jacobian_is_conjugate_to_f_jacobian((idx, x) in index_with_point(2)) {
        // differentiating tau∘G = F∘tau gives T L_G(x) = L_F(tau x) T
        let t = tau_matrix(&idx).unwrap();
        let lg = jacobian_g(&idx, &x).unwrap();
        let lhs = t.mul(&lg);
        let rhs = jacobian_f(&SeqVec::new(idx, tau(&idx, &x).unwrap()).unwrap()).mul(&t);
        prop_assert!(lhs.sub(&rhs).max_abs() <= 1e-10 * (1.0 + lhs.max_abs()));
    }

    #[test]
    fn roots_solve_the_power_equation(w in cx(), n in 1usize..8) {
        let roots = nth_roots(w, n);
        prop_assert_eq!(roots.len(), n);
        for u in roots {
            prop_assert!((u.powu(n as u32) - w).norm() <= 1e-13 * (1.0 + w.norm()));
        }
    }

    #[test]
    fn matching_ignores_order(values in prop::collection::vec(cx(), 0..8), rot in 0usize..8) {
        let tol = Tolerance::default();
        let a = Multiset::new(values.clone(), tol);
        let mut shuffled = values.clone();
        if !shuffled.is_empty() {
            let r = rot % shuffled.len();
            shuffled.rotate_left(r);
        }
        let b = Multiset::new(shuffled, tol);
        let m = multiset_match(&a, &b).unwrap();
        prop_assert!(m.max_distance <= 1e-15);
        prop_assert_eq!(m.pairs.len(), values.len());
    }

    #[test]
    fn triangular_spectrum_is_the_diagonal(diag in prop::collection::vec(cx(), 1..6), upper in prop::collection::vec(cx(), 15)) {
        let n = diag.len();
        let mut it = upper.into_iter();
        let mut m = SquareMatrix::zeros(n);
        for i in 0..n {
            m.set(i, i, diag[i]);
            for j in i + 1..n {
                m.set(i, j, it.next().unwrap());
            }
        }
        let got = eigenvalues(&m).unwrap().with_tolerance(Tolerance::new(1e-6, 1e-6));
        let want = Multiset::new(diag, Tolerance::new(1e-6, 1e-6));
        prop_assert!(multiset_match(&got, &want).is_ok());
    }
}
