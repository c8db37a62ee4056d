//! Jacobians of `F_{k,m}` and `G_{k,m}` at fixed points, their spectra, and
//! the action of the transposed Jacobian on linear forms.

use crate::error::{KochError, Result};
use crate::fixed_points::FixedPointRecord;
use crate::numeric::{
    eigenvalues, multiset_match, nth_roots, root_of_unity, Cx, Multiset, SquareMatrix, Tolerance,
};
use crate::space::{apply_f, first_entry, lt, tau, KochIndex, SeqVec, TypePair};
use nalgebra::DMatrix;

/// A linear form on `M_{k,m}`, as coefficients in the coordinate forms
/// `omega_1, ..., omega_{k+m-1}` (`omega_i(x) = x_i`).
#[derive(Debug, Clone, PartialEq)]
pub struct Covector {
    index: KochIndex,
    coeffs: Vec<Cx>,
}

impl Covector {
    pub fn zero(index: KochIndex) -> Self {
        Self {
            index,
            coeffs: vec![Cx::new(0.0, 0.0); index.dim()],
        }
    }

    /// `omega_i` for any `i >= 0`, reduced to the basis.
    pub fn omega(index: KochIndex, i: usize) -> Self {
        let mut out = Self::zero(index);
        if let Some((j, coef)) = index.reduce(i) {
            out.coeffs[j - 1] = coef;
        }
        out
    }

    pub fn from_coeffs(index: KochIndex, coeffs: Vec<Cx>) -> Result<Self> {
        if coeffs.len() != index.dim() {
            return Err(KochError::DimensionMismatch {
                expected: index.dim(),
                got: coeffs.len(),
            });
        }
        Ok(Self { index, coeffs })
    }

    pub fn coeffs(&self) -> &[Cx] {
        &self.coeffs
    }

    pub fn add(&self, rhs: &Self) -> Self {
        self.zip(rhs, |a, b| a + b)
    }

    pub fn sub(&self, rhs: &Self) -> Self {
        self.zip(rhs, |a, b| a - b)
    }

    pub fn scale(&self, a: Cx) -> Self {
        Self {
            index: self.index,
            coeffs: self.coeffs.iter().map(|c| a * c).collect(),
        }
    }

    fn zip(&self, rhs: &Self, f: impl Fn(Cx, Cx) -> Cx) -> Self {
        Self {
            index: self.index,
            coeffs: self.coeffs.iter().zip(&rhs.coeffs).map(|(a, b)| f(*a, *b)).collect(),
        }
    }

    pub fn evaluate(&self, x: &SeqVec) -> Cx {
        self.coeffs.iter().zip(x.coords()).map(|(a, b)| a * b).sum()
    }

    /// The pull-back `L^* f = f ∘ L`, given the matrix of `L`.
    pub fn pull_back(&self, l: &SquareMatrix) -> Self {
        Self {
            index: self.index,
            coeffs: l.transpose().mul_vec(&self.coeffs),
        }
    }

    pub fn sup_norm(&self) -> f64 {
        self.coeffs.iter().map(|c| c.norm()).fold(0.0, f64::max)
    }
}

/// `delta_i = d z_i^{d-1}` (with `z_0 = 0`).
pub fn delta(z: &SeqVec, i: usize) -> Cx {
    let d = z.index().d;
    d as f64 * z.get(i).powu(d - 1)
}

/// `L v` for `L = D_z F_{k,m}`: `w_i = delta_{i-1} v_{i-1} + w_1`.
pub fn jacobian_apply(z: &SeqVec, v: &SeqVec) -> Vec<Cx> {
    let idx = z.index();
    let u = |i: usize| delta(z, i) * v.get(i);
    let w1 = first_entry(idx, u);
    (1..=idx.dim())
        .map(|i| if i == 1 { w1 } else { u(i - 1) + w1 })
        .collect()
}

fn unit(idx: KochIndex, j: usize) -> SeqVec {
    let mut coords = vec![Cx::new(0.0, 0.0); idx.dim()];
    coords[j] = Cx::new(1.0, 0.0);
    SeqVec::new(idx, coords).expect("unit vector has the right length")
}

fn from_columns(n: usize, col: impl Fn(usize) -> Vec<Cx>) -> SquareMatrix {
    let cols: Vec<Vec<Cx>> = (0..n).map(col).collect();
    SquareMatrix::from_fn(n, |i, j| cols[j][i])
}

/// Matrix of `D_z F_{k,m}` in the coordinates `v_1, ..., v_{k+m-1}`.
pub fn jacobian_f(z: &SeqVec) -> SquareMatrix {
    let idx = *z.index();
    from_columns(idx.dim(), |j| jacobian_apply(z, &unit(idx, j)))
}

/// Central differences of `apply_f`, for cross-checking [`jacobian_f`].
pub fn jacobian_fd(z: &SeqVec, h: f64) -> SquareMatrix {
    let idx = *z.index();
    from_columns(idx.dim(), |j| {
        let e = unit(idx, j);
        let step = |s: f64| {
            let coords: Vec<Cx> = z.coords().iter().zip(e.coords()).map(|(a, b)| a + s * b).collect();
            apply_f(&idx, &SeqVec::new(idx, coords).expect("same length"))
        };
        let (plus, minus) = (step(h), step(-h));
        plus.coords()
            .iter()
            .zip(minus.coords())
            .map(|(p, m)| (p - m) / (2.0 * h))
            .collect()
    })
}

/// Matrix of the linear map `tau`.
pub fn tau_matrix(idx: &KochIndex) -> Result<SquareMatrix> {
    let n = idx.dim();
    let cols = (0..n)
        .map(|j| tau(idx, unit(*idx, j).coords()))
        .collect::<Result<Vec<_>>>()?;
    Ok(SquareMatrix::from_fn(n, |i, j| cols[j][i]))
}

/// Jacobian of `G_{k,m} = power ∘ tau`: `diag(d tau_i(x)^{d-1}) T`.
pub fn jacobian_g(idx: &KochIndex, x: &[Cx]) -> Result<SquareMatrix> {
    let t = tau(idx, x)?;
    let tm = tau_matrix(idx)?;
    let d = idx.d;
    Ok(SquareMatrix::from_fn(idx.dim(), |i, j| {
        d as f64 * t[i].powu(d - 1) * tm.get(i, j)
    }))
}

/// Representative of `j` in `{k+1, ..., k+m}` modulo `m`.
pub fn cyclic_rep(idx: &KochIndex, j: i64) -> usize {
    let (k, m) = (idx.k as i64, idx.m as i64);
    (k + 1 + (j - k - 1).rem_euclid(m)) as usize
}

/// The spanning family of the annihilator of `M_{k',m'}` inside the dual of
/// `M_{k,m}`: `alpha_i = omega_i - omega_{i+m'}` for `1 <= i <= k+m` when
/// `k' = 0`, else `beta_j = omega_{j} - omega_{j+m'}` over `j` mod `m`
/// (indices taken in `{k+1, ..., k+m}`).
pub fn annihilator_family(idx: &KochIndex, inner: TypePair) -> Result<Vec<Covector>> {
    if !lt(inner, idx.type_pair()) {
        return Err(KochError::NotStrictlyBelow {
            k: inner.k,
            m: inner.m,
            outer_k: idx.k,
            outer_m: idx.m,
        });
    }
    let w = |i: usize| Covector::omega(*idx, i);
    Ok(if inner.k == 0 {
        (1..=idx.k + idx.m).map(|i| w(i).sub(&w(i + inner.m))).collect()
    } else {
        (0..idx.m as i64).map(|j| beta_form(idx, inner, j)).collect()
    })
}

/// `beta_j` for `k' != 0`.
pub fn beta_form(idx: &KochIndex, inner: TypePair, j: i64) -> Covector {
    let a = cyclic_rep(idx, j);
    let b = cyclic_rep(idx, j + inner.m as i64);
    Covector::omega(*idx, a).sub(&Covector::omega(*idx, b))
}

/// A basis of the annihilator, picked greedily from [`annihilator_family`].
pub fn annihilator_basis(idx: &KochIndex, inner: TypePair) -> Result<Vec<Covector>> {
    let family = annihilator_family(idx, inner)?;
    let expected = idx.dim() - (inner.k + inner.m - 1);
    // Gram-Schmidt on copies, keeping the original forms
    let mut ortho: Vec<Vec<Cx>> = Vec::new();
    let mut basis = Vec::new();
    for f in family {
        let mut r = f.coeffs.clone();
        for q in &ortho {
            let dot: Cx = q.iter().zip(&r).map(|(a, b)| a.conj() * b).sum();
            for (ri, qi) in r.iter_mut().zip(q) {
                *ri -= dot * qi;
            }
        }
        let norm = r.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt();
        if norm > 1e-9 * f.sup_norm().max(1.0) {
            ortho.push(r.iter().map(|c| c / norm).collect());
            basis.push(f);
        }
    }
    if basis.len() != expected {
        return Err(KochError::DimensionMismatch {
            expected,
            got: basis.len(),
        });
    }
    Ok(basis)
}

fn basis_matrix(basis: &[Covector], n: usize) -> DMatrix<Cx> {
    DMatrix::from_fn(n, basis.len(), |i, j| basis[j].coeffs[i])
}

/// Matrix `R` of `L^*` restricted to the span of `basis`, i.e. `B R = L^T B`,
/// together with the relative residual of that equation.
pub fn restricted_pullback(l: &SquareMatrix, basis: &[Covector]) -> Result<(SquareMatrix, f64)> {
    let n = l.n();
    let b = basis_matrix(basis, n);
    let lb = l.transpose().as_dmatrix() * &b;
    let gram = b.adjoint() * &b;
    let r = gram
        .try_inverse()
        .ok_or(KochError::Singular)?
        * (b.adjoint() * &lb);
    let resid = (&b * &r - &lb).iter().map(|c| c.norm()).fold(0.0, f64::max);
    let scale = lb.iter().map(|c| c.norm()).fold(1.0, f64::max);
    Ok((SquareMatrix::from(r), resid / scale))
}

/// Outer block of the spectrum: `0` with multiplicity `(k+m-1) - (m'-1)` when
/// `k' = 0`, otherwise the `m - m'` solutions of `mu^m = lambda^{m/m'}` with
/// `mu^{m'} != lambda`.
pub fn predicted_outer_spectrum(rec: &FixedPointRecord) -> Result<Multiset> {
    let idx = rec.index;
    let inner = rec.exact_type;
    if inner == idx.type_pair() {
        return Err(KochError::NoOuterBlock);
    }
    let values = if inner.k == 0 {
        vec![Cx::new(0.0, 0.0); idx.dim() - (inner.m - 1)]
    } else {
        predicted_outer_values(rec.lambda, inner.m, idx.m)
    };
    Ok(Multiset::new(values, Tolerance::default()))
}

/// `nu zeta` with `nu` the principal `m'`-th root of `lambda`, `zeta^m = 1`
/// and `zeta^{m'} != 1`.
pub fn predicted_outer_values(lambda: Cx, inner_m: usize, m: usize) -> Vec<Cx> {
    let nu = nth_roots(lambda, inner_m)[0];
    (0..m)
        .filter(|&j| (j * inner_m) % m != 0)
        .map(|j| nu * root_of_unity(j as i64, m as u32))
        .collect()
}

/// Which case of the spectral trichotomy a fixed point falls in.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SpectralCase {
    /// `c = 0`: the Jacobian vanishes.
    TrivialZero,
    /// Exact type `(k, m)`: no critical coincidences, all `|mu| > 1`.
    OutsidePc,
    /// Exact type `(0, m')`: the outer block is nilpotent.
    InsidePcPeriodic,
    /// Exact type `(k, m')`, `k != 0`: outer eigenvalues are roots of `lambda`.
    InsidePcPreperiodic,
}

impl SpectralCase {
    pub fn label(&self) -> &'static str {
        match self {
            Self::TrivialZero => "trivial_zero",
            Self::OutsidePc => "outside_PC",
            Self::InsidePcPeriodic => "inside_PC_k0",
            Self::InsidePcPreperiodic => "inside_PC_kpos",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SpectrumReport {
    pub c: Cx,
    pub exact_type: TypePair,
    pub case: SpectralCase,
    pub computed: Multiset,
    pub inner: Multiset,
    pub outer_predicted: Multiset,
    pub matched: bool,
    /// Largest distance in the matching (0 when there is nothing to match).
    pub match_error: f64,
    pub match_failure: Option<String>,
    /// Every computed eigenvalue is ~0 or has modulus > 1.
    pub zero_or_expanding: bool,
    /// Every inner eigenvalue has modulus > 1.
    pub inner_expanding: bool,
    /// Predicted outer values lying within tolerance of an inner value.
    pub coincidences: usize,
}

impl SpectrumReport {
    pub fn passed(&self) -> bool {
        self.matched && self.zero_or_expanding && self.inner_expanding
    }
}

/// Margin used for the `|mu| = 0` / `|mu| > 1` dichotomy.
pub const MODULUS_MARGIN: f64 = 1e-7;

pub fn is_zero_or_expanding(mu: Cx) -> bool {
    let r = mu.norm();
    r < MODULUS_MARGIN || r > 1.0 + MODULUS_MARGIN
}

/// Computes the spectrum at a fixed point and checks it against
/// `Spec(inner) ⊎ predicted outer block`.
pub fn verify_spectrum(rec: &FixedPointRecord, tol_match: f64) -> Result<SpectrumReport> {
    let idx = rec.index;
    let tol = Tolerance::new(tol_match, tol_match);
    let z = rec.point();
    let computed = eigenvalues(&jacobian_f(&z))?.with_tolerance(tol);
    let whole = rec.exact_type == idx.type_pair();
    let case = if rec.is_trivial {
        SpectralCase::TrivialZero
    } else if whole {
        SpectralCase::OutsidePc
    } else if rec.exact_type.k == 0 {
        SpectralCase::InsidePcPeriodic
    } else {
        SpectralCase::InsidePcPreperiodic
    };

    let (inner, outer) = if whole {
        (computed.clone(), Multiset::new(Vec::new(), tol))
    } else {
        let inner_z = rec.inner_point();
        let inner = eigenvalues(&jacobian_f(&inner_z))?.with_tolerance(tol);
        (inner, predicted_outer_spectrum(rec)?.with_tolerance(tol))
    };

    let union = inner.union(&outer);
    let (matched, match_error, match_failure) = match multiset_match(&computed, &union) {
        Ok(m) => (true, m.max_distance, None),
        Err(f) => (false, f64::NAN, Some(f.to_string())),
    };
    let scale = union.max_modulus();
    let coincidences = outer
        .values()
        .iter()
        .filter(|o| inner.values().iter().any(|i| (*o - i).norm() <= tol.effective(scale)))
        .count();
    Ok(SpectrumReport {
        c: rec.c,
        exact_type: rec.exact_type,
        case,
        zero_or_expanding: computed.values().iter().all(|mu| is_zero_or_expanding(*mu)),
        inner_expanding: inner.values().iter().all(|mu| mu.norm() > 1.0 + MODULUS_MARGIN),
        computed,
        inner,
        outer_predicted: outer,
        matched,
        match_error,
        match_failure,
        coincidences,
    })
}

/// Outcome of a batch of numerical identity checks.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct CheckReport {
    pub checks: usize,
    pub max_error: f64,
    pub failures: Vec<String>,
}

impl CheckReport {
    pub fn passed(&self) -> bool {
        self.failures.is_empty()
    }

    /// Records `error <= tol` under `name`.
    pub fn check(&mut self, name: impl FnOnce() -> String, error: f64, tol: f64) {
        self.checks += 1;
        if error.is_nan() || error > tol {
            self.failures.push(format!("{}: error {error:e} > {tol:e}", name()));
        }
        if !error.is_nan() {
            self.max_error = self.max_error.max(error);
        }
    }

    /// Records a boolean check.
    pub fn require(&mut self, ok: bool, name: impl FnOnce() -> String) {
        self.checks += 1;
        if !ok {
            self.failures.push(name());
        }
    }

    pub fn merge(&mut self, other: CheckReport) {
        self.checks += other.checks;
        self.max_error = self.max_error.max(other.max_error);
        self.failures.extend(other.failures);
    }
}

fn rel_diff(a: &Covector, b: &Covector, scale: f64) -> f64 {
    a.sub(b).sup_norm() / scale.max(1.0)
}

fn matrix_rel(m: &DMatrix<Cx>, scale: f64) -> f64 {
    m.iter().map(|c| c.norm()).fold(0.0, f64::max) / scale.max(1.0)
}

/// Checks the pull-back identities of `L^* = (D_z F_{k,m})^T` at a fixed
/// point on coordinate forms and on the annihilator of `M_{k',m'}`.
pub fn verify_dual_action(rec: &FixedPointRecord, tol: f64) -> Result<CheckReport> {
    let idx = rec.index;
    let z = rec.point();
    let l = jacobian_f(&z);
    let lnorm = l.inf_norm();
    let mut report = CheckReport::default();
    let w = |i: usize| Covector::omega(idx, i);

    // L^* omega_i = delta_{i-1} omega_{i-1} + L^* omega_1
    let l_w1 = w(1).pull_back(&l);
    for i in 2..=idx.k + 2 * idx.m {
        let lhs = w(i).pull_back(&l);
        let rhs = w(i - 1).scale(delta(&z, i - 1)).add(&l_w1);
        report.check(|| format!("pull-back of omega_{i}"), rel_diff(&lhs, &rhs, lnorm), tol);
    }

    let inner = rec.exact_type;
    if inner == idx.type_pair() {
        return Ok(report);
    }
    let basis = annihilator_basis(&idx, inner)?;
    let bmat = basis_matrix(&basis, idx.dim());
    let bnorm = matrix_rel(&bmat, 0.0);
    let lt = l.transpose();

    if inner.k == 0 {
        let m1 = inner.m;
        let alpha = |i: usize| w(i).sub(&w(i + m1));
        report.check(
            || "L^* alpha_1 = 0".into(),
            alpha(1).pull_back(&l).sup_norm() / lnorm.max(1.0),
            tol,
        );
        for i in 2..=idx.k + idx.m {
            let lhs = alpha(i).pull_back(&l);
            let rhs = alpha(i - 1).scale(delta(&z, i - 1));
            report.check(|| format!("L^* alpha_{i} = delta alpha_{}", i - 1), rel_diff(&lhs, &rhs, lnorm), tol);
        }
        let p = idx.k + idx.m;
        let nil = lt.pow(p).as_dmatrix() * &bmat;
        report.check(
            || format!("(L^*)^{p} vanishes on the annihilator"),
            matrix_rel(&nil, lnorm.powi(p as i32) * bnorm),
            tol,
        );
    } else {
        let (m, m1) = (idx.m as i64, inner.m);
        let p = idx.m / m1;
        let lambda = rec.lambda;
        let sigma = |j: i64| delta(&z, cyclic_rep(&idx, j));
        let b = |j: i64| beta_form(&idx, inner, j);
        for j in 0..m {
            let lhs = b(j).pull_back(&l);
            let rhs = b(j - 1).scale(sigma(j - 1));
            report.check(|| format!("L^* beta_{j} = sigma beta_{}", j - 1), rel_diff(&lhs, &rhs, lnorm), tol);

            let lp = lt.pow(m1);
            let lhs = Covector::from_coeffs(idx, lp.mul_vec(b(j).coeffs()))?;
            let rhs = b(j - m1 as i64).scale(lambda);
            report.check(
                || format!("(L^*)^{m1} beta_{j} = lambda beta_{}", j - m1 as i64),
                rel_diff(&lhs, &rhs, lnorm.powi(m1 as i32)),
                tol,
            );

            let lm = lt.pow(idx.m);
            let lhs = Covector::from_coeffs(idx, lm.mul_vec(b(j).coeffs()))?;
            let rhs = b(j).scale(lambda.powu(p as u32));
            report.check(
                || format!("(L^*)^{m} beta_{j} = lambda^{p} beta_{j}"),
                rel_diff(&lhs, &rhs, lnorm.powi(m as i32)),
                tol,
            );
        }
        // Id + T + ... + T^{m-1} = 0 on the annihilator, T = L^* / nu
        for nu in nth_roots(lambda, m1) {
            let t = lt.scale(nu.inv());
            let mut power = bmat.clone();
            let mut sum = DMatrix::<Cx>::zeros(bmat.nrows(), bmat.ncols());
            let mut scale: f64 = 0.0;
            for _ in 0..m {
                sum += &power;
                scale = scale.max(matrix_rel(&power, 0.0));
                power = t.as_dmatrix() * power;
            }
            report.check(
                || format!("geometric sum of L^*/nu vanishes (nu = {nu})"),
                matrix_rel(&sum, scale),
                tol,
            );
        }
        // the restricted operator has simple eigenvalues
        let (r, _) = restricted_pullback(&l, &basis)?;
        let eig = eigenvalues(&r)?;
        let v = eig.values();
        let mut gap = f64::INFINITY;
        for i in 0..v.len() {
            for j in i + 1..v.len() {
                gap = gap.min((v[i] - v[j]).norm());
            }
        }
        report.require(gap > 1e-6, || format!("restricted pull-back has a repeated eigenvalue (gap {gap:e})"));
    }

    let (_, resid) = restricted_pullback(&l, &basis)?;
    report.check(|| "annihilator is invariant under L^*".into(), resid, tol);
    Ok(report)
}

/// Result of the `L_*` inverse check.
#[derive(Debug, Clone, PartialEq)]
pub struct LstarReport {
    pub l_lower_star: SquareMatrix,
    pub inverse_error: f64,
    pub spectrum: Multiset,
    pub max_modulus: f64,
}

impl LstarReport {
    pub fn passed(&self, tol: f64) -> bool {
        self.inverse_error <= tol && self.max_modulus < 1.0 - MODULUS_MARGIN
    }
}

/// Matrix of `L_*`, defined on forms by `L_* omega_i = (omega_{i+1} - omega_1) / delta_i`.
pub fn lower_star(z: &SeqVec) -> Result<SquareMatrix> {
    let idx = *z.index();
    let n = idx.dim();
    let eps = 1e-9 * (1.0 + (1..=n).map(|i| delta(z, i).norm()).fold(0.0, f64::max));
    let mut cols = Vec::with_capacity(n);
    for i in 1..=n {
        let di = delta(z, i);
        if di.norm() <= eps {
            return Err(KochError::NotExactType {
                index: i,
                value: di.norm(),
            });
        }
        let f = Covector::omega(idx, i + 1).sub(&Covector::omega(idx, 1)).scale(di.inv());
        cols.push(f.coeffs);
    }
    Ok(SquareMatrix::from_fn(n, |r, c| cols[c][r]))
}

/// Checks that `L_*` inverts `L^*` and that its spectrum lies in the unit disk.
pub fn verify_lstar_inverse(rec: &FixedPointRecord) -> Result<LstarReport> {
    let z = rec.point();
    let ls = lower_star(&z)?;
    let lt = jacobian_f(&z).transpose();
    let id = SquareMatrix::identity(ls.n());
    let err_a = ls.mul(&lt).sub(&id).max_abs();
    let err_b = lt.mul(&ls).sub(&id).max_abs();
    let spectrum = eigenvalues(&ls)?;
    let max_modulus = spectrum.max_modulus();
    Ok(LstarReport {
        l_lower_star: ls,
        inverse_error: err_a.max(err_b),
        spectrum,
        max_modulus,
    })
}
