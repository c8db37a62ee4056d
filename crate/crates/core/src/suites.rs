//! The property battery: every identity the library is meant to confirm,
//! run over a grid of indices.
//!
//! Work is split per grid cell so that callers can spread cells over
//! threads; [`merge`] folds per-cell outcomes back together in order.

use crate::error::Result;
use crate::fixed_points::{enumerate_fixed_points, FixedPointRecord, ParameterEquation, DEFAULT_DEGREE_CAP};
use crate::numeric::{eigenvalues, multiset_match, Cx, Multiset, Tolerance};
use crate::quad_diff::{partial_fraction_identity, pushforward_eval, verify_pushforward_identity};
use crate::space::{
    apply_f, apply_f_tilde, apply_f_trunc, apply_g, in_delta, in_m, leq, lt, project_pi, q_map, tau,
    tau_inverse, KochIndex, SeqVec, TruncVec, TypePair,
};
use crate::spectral::{
    is_zero_or_expanding, jacobian_f, jacobian_fd, jacobian_g, verify_dual_action, verify_lstar_inverse,
    verify_spectrum, CheckReport, MODULUS_MARGIN,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

#[derive(Debug, Clone, PartialEq)]
pub struct SuiteConfig {
    /// Spectral multiset matching (absolute, and relative to the largest modulus).
    pub tol_match: f64,
    /// Bound on `|g(c)|` at enumerated parameters.
    pub tol_residual: f64,
    /// Matrix identities of the dual action and `L_*`.
    pub tol_identity: f64,
    /// Random points per check.
    pub samples: usize,
    pub seed: u64,
    pub degree_cap: u64,
}

impl Default for SuiteConfig {
    fn default() -> Self {
        Self {
            tol_match: 1e-7,
            tol_residual: 1e-10,
            tol_identity: 1e-9,
            samples: 100,
            seed: 0,
            degree_cap: DEFAULT_DEGREE_CAP,
        }
    }
}

/// `d ∈ {2, 3}`, every beta, `k <= 3`, `m <= 3`, `k + m >= 2`.
pub fn default_grid() -> Vec<KochIndex> {
    let mut out = Vec::new();
    for d in 2..=3u32 {
        for j in 1..d {
            for k in 0..=3 {
                for m in 1..=3 {
                    if k + m >= 2 {
                        out.push(KochIndex::new(d, j, k, m).expect("grid indices are valid"));
                    }
                }
            }
        }
    }
    out
}

#[derive(Debug, Clone, PartialEq)]
pub struct SuiteOutcome {
    pub name: String,
    pub report: CheckReport,
    /// Observations that are reported but not failures.
    pub notes: Vec<String>,
}

impl SuiteOutcome {
    fn new(name: &str) -> Self {
        Self {
            name: name.to_string(),
            report: CheckReport::default(),
            notes: Vec::new(),
        }
    }

    pub fn passed(&self) -> bool {
        self.report.passed()
    }
}

/// Folds outcomes with the same name, keeping first-seen order.
pub fn merge(outcomes: impl IntoIterator<Item = Vec<SuiteOutcome>>) -> Vec<SuiteOutcome> {
    let mut out: Vec<SuiteOutcome> = Vec::new();
    for batch in outcomes {
        for o in batch {
            match out.iter_mut().find(|x| x.name == o.name) {
                Some(x) => {
                    x.report.merge(o.report);
                    x.notes.extend(o.notes);
                }
                None => out.push(o),
            }
        }
    }
    out
}

/// One grid cell with its fixed points.
#[derive(Debug, Clone, PartialEq)]
pub struct Cell {
    pub index: KochIndex,
    pub records: Vec<FixedPointRecord>,
}

pub fn enumerate_cell(index: KochIndex, degree_cap: u64) -> Result<Cell> {
    Ok(Cell {
        index,
        records: enumerate_fixed_points(&index, degree_cap)?,
    })
}

/// SplitMix64 step, used to derive independent per-cell seeds.
pub fn derive_seed(seed: u64, stream: u64) -> u64 {
    let mut z = seed ^ stream.wrapping_mul(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

fn cell_label(idx: &KochIndex) -> String {
    format!("d={} j={} (k,m)=({},{})", idx.d, idx.beta_index, idx.k, idx.m)
}

fn rec_label(rec: &FixedPointRecord) -> String {
    format!("{} c={:.6}", cell_label(&rec.index), rec.c)
}

fn random_cx(rng: &mut ChaCha8Rng) -> Cx {
    Cx::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0))
}

fn random_coords(rng: &mut ChaCha8Rng, n: usize) -> Vec<Cx> {
    (0..n).map(|_| random_cx(rng)).collect()
}

fn random_point(rng: &mut ChaCha8Rng, idx: KochIndex) -> SeqVec {
    SeqVec::new(idx, random_coords(rng, idx.dim())).expect("length matches")
}

fn sup(v: &[Cx]) -> f64 {
    v.iter().map(|z| z.norm()).fold(0.0, f64::max)
}

fn sup_diff(a: &[Cx], b: &[Cx]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).norm()).fold(0.0, f64::max)
}

fn rel(a: &[Cx], b: &[Cx]) -> f64 {
    let scale = sup(a).max(sup(b));
    if scale == 0.0 {
        0.0
    } else {
        sup_diff(a, b) / scale
    }
}

// fixed-point residuals are measured against 1 + |x| so that the tiny points
// near a clustered root at c = 0 are not judged relatively
fn fixed_residual(a: &[Cx], b: &[Cx]) -> f64 {
    sup_diff(a, b) / (1.0 + sup(a).max(sup(b)))
}

/// All suites that depend on one grid cell.
pub fn cell_suites(cell: &Cell, cfg: &SuiteConfig, seed: u64) -> Result<Vec<SuiteOutcome>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    Ok(vec![
        enumeration(cell, cfg),
        theorem_a(cell)?,
        decomposition(cell, cfg)?,
        dual_action(cell, cfg)?,
        lstar_inverse(cell, cfg)?,
        pushforward(cell, cfg, rng.random())?,
        conjugacy(cell, cfg, &mut rng)?,
        jacobian_differences(cell, &mut rng),
        pi_projection(cell.index, cfg, &mut rng)?,
        homogeneity(cell.index, cfg, &mut rng),
        nondegeneracy(cell.index, &mut rng),
        restriction(cell.index, cfg, &mut rng),
        critical_values(cell.index, cfg, &mut rng),
        delta_invariance(cell.index, cfg, &mut rng),
        largest_invariant(cell.index, cfg, &mut rng)?,
    ])
}

/// Suites that do not depend on a grid cell.
pub fn global_suites(cfg: &SuiteConfig) -> Result<Vec<SuiteOutcome>> {
    let mut rng = ChaCha8Rng::seed_from_u64(derive_seed(cfg.seed, u64::MAX));
    Ok(vec![
        worked_example()?,
        spectral_anchors(cfg)?,
        partial_fraction(&mut rng)?,
        order_inclusion(&mut rng),
        counterexample()?,
    ])
}

/// Everything, sequentially: global suites, then each cell of `grid`.
pub fn run_all(grid: &[KochIndex], cfg: &SuiteConfig) -> Result<Vec<SuiteOutcome>> {
    let mut batches = vec![global_suites(cfg)?];
    for (n, idx) in grid.iter().enumerate() {
        let cell = enumerate_cell(*idx, cfg.degree_cap)?;
        batches.push(cell_suites(&cell, cfg, derive_seed(cfg.seed, n as u64))?);
    }
    Ok(merge(batches))
}

fn reals(v: &[f64]) -> Vec<Cx> {
    v.iter().map(|&x| Cx::new(x, 0.0)).collect()
}

/// `d = 2, beta = -1, x = (2, 0, 0, ...)`: `Q(x) = (0, 4, 0, ...)`,
/// `F_{2,1}(x) = (-2, 2, -2, ...)`, `F_{3,1}(x) = (0, 4, 0, ...)`.
pub fn worked_example() -> Result<SuiteOutcome> {
    let mut s = SuiteOutcome::new("worked_example");
    let tol = 1e-12;
    let len = 12;
    let mut x = vec![0.0; len];
    x[0] = 2.0;
    let x = TruncVec::new(reals(&x));

    let mut want_q = vec![0.0; len];
    want_q[1] = 4.0;
    let q = q_map(2, &x);
    s.report.check(|| "Q(x)".into(), sup_diff(q.entries(), &reals(&want_q)), tol);

    let f21 = KochIndex::new(2, 1, 2, 1)?;
    let mut want21 = vec![-2.0; len];
    want21[1] = 2.0;
    let y = apply_f_trunc(&f21, &x)?;
    s.report.check(|| "F_{2,1}(x) on E".into(), sup_diff(y.entries(), &reals(&want21)), tol);
    let y = apply_f(&f21, &SeqVec::new(f21, reals(&[2.0, 0.0]))?).expand(len);
    s.report.check(|| "F_{2,1}(x) on M_{2,1}".into(), sup_diff(y.entries(), &reals(&want21)), tol);

    let f31 = KochIndex::new(2, 1, 3, 1)?;
    let y = apply_f_trunc(&f31, &x)?;
    s.report.check(|| "F_{3,1}(x) on E".into(), sup_diff(y.entries(), &reals(&want_q)), tol);
    let y = apply_f(&f31, &SeqVec::new(f31, reals(&[2.0, 0.0, 0.0]))?).expand(len);
    s.report.check(|| "F_{3,1}(x) on M_{3,1}".into(), sup_diff(y.entries(), &reals(&want_q)), tol);
    Ok(s)
}

fn enumeration(cell: &Cell, cfg: &SuiteConfig) -> SuiteOutcome {
    let mut s = SuiteOutcome::new("enumeration");
    let idx = cell.index;
    let t = idx.type_pair();
    let degree = ParameterEquation::new(idx).degree().unwrap_or(u64::MAX);
    let total: usize = cell.records.iter().map(|r| r.multiplicity).sum();
    s.report.require(total as u64 == degree, || {
        format!("{}: {total} roots for degree {degree}", cell_label(&idx))
    });
    for rec in &cell.records {
        let scale = 1.0 + sup(&rec.orbit);
        s.report.check(|| format!("{}: |g(c)|", rec_label(rec)), rec.residual_param, cfg.tol_residual);
        s.report.check(|| format!("{}: F(z) = z", rec_label(rec)), rec.residual_fixed / scale, 1e-9);
        s.report.require(leq(rec.exact_type, t), || {
            format!("{}: exact type {} not below {t}", rec_label(rec), rec.exact_type)
        });
        s.report.require(rec.in_delta == lt(rec.exact_type, t), || {
            format!("{}: in_delta = {} but exact type {}", rec_label(rec), rec.in_delta, rec.exact_type)
        });
        let lam = rec.lambda.norm();
        if rec.exact_type.k == 0 {
            s.report.require(lam < 1e-9, || format!("{}: periodic case with lambda = {}", rec_label(rec), rec.lambda));
        } else {
            s.report.require(lam > 1.0, || format!("{}: |lambda| = {lam} <= 1", rec_label(rec)));
        }
        if rec.multiplicity > 1 {
            s.notes.push(format!("{}: root of multiplicity {}", rec_label(rec), rec.multiplicity));
        }
    }
    s
}

fn theorem_a(cell: &Cell) -> Result<SuiteOutcome> {
    let mut s = SuiteOutcome::new("theorem_a");
    for rec in &cell.records {
        let spec = eigenvalues(&jacobian_f(&rec.point()))?;
        for mu in spec.values() {
            s.report.require(is_zero_or_expanding(*mu), || {
                format!("{}: eigenvalue {mu} with |mu| = {} in the forbidden band", rec_label(rec), mu.norm())
            });
            let r = mu.norm();
            // distance into the safe side of the margin, for the error column
            let slack = if r < MODULUS_MARGIN { r } else { 0.0 };
            s.report.max_error = s.report.max_error.max(slack);
        }
    }
    Ok(s)
}

fn decomposition(cell: &Cell, cfg: &SuiteConfig) -> Result<SuiteOutcome> {
    let mut s = SuiteOutcome::new("decomposition");
    for rec in &cell.records {
        let r = verify_spectrum(rec, cfg.tol_match)?;
        s.report.checks += 1;
        if !r.passed() {
            let why = r
                .match_failure
                .clone()
                .unwrap_or_else(|| "modulus condition violated".into());
            s.report.failures.push(format!("{} [{}]: {why}", rec_label(rec), r.case.label()));
        } else {
            s.report.max_error = s.report.max_error.max(r.match_error);
        }
        if r.coincidences > 0 {
            s.notes.push(format!(
                "{}: {} outer eigenvalue(s) coincide with inner ones",
                rec_label(rec),
                r.coincidences
            ));
        }
    }
    Ok(s)
}

/// The three hand-derived spectra.
pub fn spectral_anchors(cfg: &SuiteConfig) -> Result<SuiteOutcome> {
    use crate::fixed_points::fixed_point_record;
    let mut s = SuiteOutcome::new("spectral_anchors");
    let c = |re: f64, im: f64| Cx::new(re, im);
    let cases = [
        (KochIndex::new(2, 1, 1, 2)?, c(-2.0, 0.0), vec![c(2.0, 0.0), c(-4.0, 0.0)]),
        (KochIndex::new(2, 1, 2, 2)?, c(-1.0, 0.0), vec![c(2.0, 0.0), c(0.0, 0.0), c(0.0, 0.0)]),
        (KochIndex::new(2, 1, 1, 2)?, c(0.0, 1.0), vec![c(2.0, 0.0), c(-1.0, -1.0)]),
    ];
    for (idx, param, want) in cases {
        let rec = fixed_point_record(&idx, param)?;
        let r = verify_spectrum(&rec, cfg.tol_match)?;
        let want = Multiset::new(want, Tolerance::new(cfg.tol_match, cfg.tol_match));
        match multiset_match(&r.computed, &want) {
            Ok(m) => s.report.check(|| rec_label(&rec), m.max_distance, cfg.tol_match),
            Err(f) => s.report.require(false, || format!("{}: {f}", rec_label(&rec))),
        }
        s.report.require(r.passed(), || format!("{}: decomposition failed", rec_label(&rec)));
    }
    Ok(s)
}

fn dual_action(cell: &Cell, cfg: &SuiteConfig) -> Result<SuiteOutcome> {
    let mut s = SuiteOutcome::new("dual_action");
    for rec in &cell.records {
        let mut r = verify_dual_action(rec, cfg.tol_identity)?;
        let label = rec_label(rec);
        r.failures.iter_mut().for_each(|f| *f = format!("{label}: {f}"));
        s.report.merge(r);
    }
    Ok(s)
}

fn lstar_inverse(cell: &Cell, cfg: &SuiteConfig) -> Result<SuiteOutcome> {
    let mut s = SuiteOutcome::new("lstar_inverse");
    for rec in cell.records.iter().filter(|r| r.exact_type == cell.index.type_pair()) {
        let r = verify_lstar_inverse(rec)?;
        s.report.check(|| format!("{}: L_* L^T = I", rec_label(rec)), r.inverse_error, cfg.tol_identity);
        s.report.require(r.max_modulus < 1.0 - MODULUS_MARGIN, || {
            format!("{}: spectral radius of L_* is {}", rec_label(rec), r.max_modulus)
        });
    }
    Ok(s)
}

fn pushforward(cell: &Cell, cfg: &SuiteConfig, seed: u64) -> Result<SuiteOutcome> {
    let mut s = SuiteOutcome::new("pushforward");
    let idx = cell.index;
    for (n, rec) in cell.records.iter().enumerate().filter(|(_, r)| r.exact_type.k >= 1) {
        for i in 1..=idx.k + idx.m {
            let pair_seed = derive_seed(seed, (n * 64 + i) as u64);
            let r = verify_pushforward_identity(idx.d, rec.c, i, cfg.samples, pair_seed)?;
            s.report.check(|| format!("{} i={i}", rec_label(rec)), r.max_rel_error, 1e-9);
        }
    }
    Ok(s)
}

fn partial_fraction(rng: &mut ChaCha8Rng) -> Result<SuiteOutcome> {
    let mut s = SuiteOutcome::new("partial_fraction");
    let anchor = pushforward_eval(2, Cx::new(-1.0, 0.0), 1, Cx::new(1.0, 0.0))?;
    s.report.check(|| "anchor P_*Q_1(1) = -1/4".into(), (anchor - Cx::new(-0.25, 0.0)).norm(), 1e-12);
    for d in 2..=6u32 {
        for _ in 0..100 {
            let r = rng.random_range(0.1f64..10.0);
            let chi = Cx::from_polar(r, rng.random_range(0.0..std::f64::consts::TAU));
            let Ok((l, rhs)) = partial_fraction_identity(d, chi) else {
                continue;
            };
            let err = (l - rhs).norm() / rhs.norm().max(1.0);
            s.report.check(|| format!("d={d} chi={chi:.6}"), err, 1e-10);
        }
    }
    Ok(s)
}

fn conjugacy(cell: &Cell, cfg: &SuiteConfig, rng: &mut ChaCha8Rng) -> Result<SuiteOutcome> {
    let mut s = SuiteOutcome::new("conjugacy");
    let idx = cell.index;
    if idx.dim() < 2 {
        return Ok(s);
    }
    let label = cell_label(&idx);
    for _ in 0..cfg.samples {
        let x = random_coords(rng, idx.dim());
        let lhs = tau(&idx, &apply_g(&idx, &x)?)?;
        let rhs = apply_f_tilde(&idx, &tau(&idx, &x)?)?;
        s.report.check(|| format!("{label}: tau G = F tau"), rel(&lhs, &rhs), 1e-10);
    }
    // conjugate spectra must agree to 1e-8, or tighter if matching is tighter
    let t = cfg.tol_match.min(1e-8);
    let tol = Tolerance::new(t, t);
    for rec in &cell.records {
        let z = rec.point();
        let w = tau_inverse(&idx, z.coords())?;
        s.report.check(|| format!("{}: G fixes tau^-1(z)", rec_label(rec)), fixed_residual(&apply_g(&idx, &w)?, &w), 1e-9);
        let sf = eigenvalues(&jacobian_f(&z))?.with_tolerance(tol);
        let sg = eigenvalues(&jacobian_g(&idx, &w)?)?.with_tolerance(tol);
        match multiset_match(&sf, &sg) {
            Ok(m) => s.report.check(|| rec_label(rec), m.max_distance, tol.effective(sf.max_modulus())),
            Err(f) => s.report.require(false, || format!("{}: Jacobian spectra of F and G differ: {f}", rec_label(rec))),
        }
    }
    Ok(s)
}

fn jacobian_differences(cell: &Cell, rng: &mut ChaCha8Rng) -> SuiteOutcome {
    let mut s = SuiteOutcome::new("jacobian_fd");
    let idx = cell.index;
    let mut points: Vec<(String, SeqVec)> = cell.records.iter().map(|r| (rec_label(r), r.point())).collect();
    for n in 0..5 {
        points.push((format!("{} random #{n}", cell_label(&idx)), random_point(rng, idx)));
    }
    for (label, z) in points {
        let a = jacobian_f(&z);
        let b = jacobian_fd(&z, 1e-6);
        let err = a.sub(&b).max_abs() / a.max_abs().max(1.0);
        s.report.check(|| label, err, 1e-6);
    }
    s
}

fn pi_projection(idx: KochIndex, cfg: &SuiteConfig, rng: &mut ChaCha8Rng) -> Result<SuiteOutcome> {
    let mut s = SuiteOutcome::new("pi_projection");
    let len = idx.k + idx.m + 8;
    let label = cell_label(&idx);
    let beta = idx.beta();
    for _ in 0..cfg.samples {
        let x = TruncVec::new(random_coords(rng, len));
        let y = project_pi(&idx, &x)?;
        let yy = project_pi(&idx, &y)?;
        s.report.check(|| format!("{label}: pi idempotent"), sup_diff(y.entries(), yy.entries()), 1e-12);
        s.report.check(
            || format!("{label}: beta y_(k+m) = y_k"),
            (beta * y.get(idx.k + idx.m) - y.get(idx.k)).norm(),
            1e-12,
        );
        let constant = TruncVec::new(vec![random_cx(rng); len]);
        s.report.check(|| format!("{label}: constants in kernel"), project_pi(&idx, &constant)?.sup_norm(), 1e-12);
    }
    Ok(s)
}

fn homogeneity(idx: KochIndex, cfg: &SuiteConfig, rng: &mut ChaCha8Rng) -> SuiteOutcome {
    let mut s = SuiteOutcome::new("homogeneity");
    let label = cell_label(&idx);
    for _ in 0..cfg.samples {
        let x = random_point(rng, idx);
        let a = random_cx(rng) * 2.0;
        let lhs = apply_f(&idx, &x.scale(a));
        let rhs = apply_f(&idx, &x).scale(a.powu(idx.d));
        s.report.check(|| format!("{label}: F(ax) = a^d F(x)"), rel(lhs.coords(), rhs.coords()), 1e-10);
    }
    s
}

fn nondegeneracy(idx: KochIndex, rng: &mut ChaCha8Rng) -> SuiteOutcome {
    let mut s = SuiteOutcome::new("nondegeneracy");
    // M_{0,1} = {0} has no unit sphere
    if idx.dim() == 0 {
        return s;
    }
    let mut min = f64::INFINITY;
    for _ in 0..1000 {
        let x = random_point(rng, idx);
        let norm = x.coords().iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt();
        let x = x.scale(Cx::new(1.0 / norm, 0.0));
        let y = apply_f(&idx, &x);
        min = min.min(y.coords().iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt());
    }
    s.report.require(min > 0.0, || format!("{}: F vanishes on the unit sphere", cell_label(&idx)));
    s.notes.push(format!("{}: min |F(x)| on unit sphere = {min:.3e}", cell_label(&idx)));
    s
}

/// Every type below `t` in the partial order.
pub fn types_below(t: TypePair) -> Vec<TypePair> {
    let mut out = Vec::new();
    for m in 1..=t.m {
        for k in 0..=t.k {
            let a = TypePair::new(k, m);
            if leq(a, t) {
                out.push(a);
            }
        }
    }
    out
}

fn restriction(idx: KochIndex, cfg: &SuiteConfig, rng: &mut ChaCha8Rng) -> SuiteOutcome {
    let mut s = SuiteOutcome::new("restriction");
    for inner in types_below(idx.type_pair()) {
        let small = idx.with_type(inner);
        for _ in 0..cfg.samples.min(20) {
            let x = random_point(rng, small);
            let lhs = apply_f(&idx, &x.embed(idx));
            let rhs = apply_f(&small, &x).embed(idx);
            s.report.check(
                || format!("{}: F restricted to {inner}", cell_label(&idx)),
                rel(lhs.coords(), rhs.coords()),
                1e-10,
            );
        }
    }
    s
}

/// `a ≼ b` exactly when generic points of `M_a` lie in `M_b`, over `k, m <= 4`.
pub fn order_inclusion(rng: &mut ChaCha8Rng) -> SuiteOutcome {
    let mut s = SuiteOutcome::new("order_inclusion");
    let types: Vec<TypePair> = (0..=4).flat_map(|k| (1..=4).map(move |m| TypePair::new(k, m))).collect();
    for (d, j) in [(2, 1), (3, 1), (3, 2)] {
        for &a in &types {
            for &b in &types {
                let ia = KochIndex::new(d, j, a.k, a.m).expect("valid");
                let ib = ia.with_type(b);
                let x = random_point(rng, ia).expand(b.k + b.m + 8);
                let inside = in_m(&ib, &x, 1e-9);
                s.report.require(inside == leq(a, b), || {
                    format!("d={d} j={j}: {a} vs {b}: leq = {}, inclusion = {inside}", leq(a, b))
                });
            }
        }
    }
    s
}

fn critical_values(idx: KochIndex, cfg: &SuiteConfig, rng: &mut ChaCha8Rng) -> SuiteOutcome {
    let mut s = SuiteOutcome::new("critical_values");
    if idx.dim() == 0 {
        return s;
    }
    for _ in 0..cfg.samples {
        let mut coords = random_coords(rng, idx.dim());
        let r = rng.random_range(0..idx.dim());
        coords[r] = Cx::new(0.0, 0.0);
        let x = SeqVec::new(idx, coords).expect("length matches");
        let y = apply_f(&idx, &x);
        s.report.require(in_delta(&idx, &y, 1e-9), || {
            format!("{}: critical value outside Delta (x_{} = 0)", cell_label(&idx), r + 1)
        });
    }
    s
}

fn delta_invariance(idx: KochIndex, cfg: &SuiteConfig, rng: &mut ChaCha8Rng) -> SuiteOutcome {
    let mut s = SuiteOutcome::new("delta_invariance");
    let top = idx.k + idx.m;
    if top < 2 {
        return s;
    }
    for _ in 0..cfg.samples {
        let mut coords = random_coords(rng, idx.dim());
        let i = rng.random_range(1..top);
        let j = rng.random_range(i + 1..=top);
        // force x_i = x_j; x_j may itself be a multiple of x_i
        coords[i - 1] = match idx.reduce(j) {
            Some((r, _)) if r == i => Cx::new(0.0, 0.0),
            Some((r, coef)) => coef * coords[r - 1],
            None => Cx::new(0.0, 0.0),
        };
        let x = SeqVec::new(idx, coords).expect("length matches");
        s.report.require(in_delta(&idx, &x, 1e-9), || format!("{}: sample not in Delta", cell_label(&idx)));
        let y = apply_f(&idx, &x);
        s.report.require(in_delta(&idx, &y, 1e-9), || {
            format!("{}: F(x) left Delta (x_{i} = x_{j})", cell_label(&idx))
        });
    }
    s
}

fn largest_invariant(idx: KochIndex, cfg: &SuiteConfig, rng: &mut ChaCha8Rng) -> Result<SuiteOutcome> {
    let mut s = SuiteOutcome::new("largest_invariant");
    let (k, m) = (idx.k, idx.m);
    let len = k + m + 8;
    for _ in 0..cfg.samples.min(20) {
        let mut y = TruncVec::new(random_coords(rng, len));
        for n in 1..=6 {
            y = apply_f_trunc(&idx, &y)?;
            // F is homogeneous, so rescaling keeps the claim intact and the values finite
            let norm = y.sup_norm();
            if norm > 0.0 {
                y = TruncVec::new(y.entries().iter().map(|v| v / norm).collect());
            }
            if n < 2 {
                continue;
            }
            let err = (k + 1..=k + n - 1)
                .map(|i| (y.get(i + m) - y.get(i)).norm())
                .fold(0.0, f64::max);
            s.report.check(|| format!("{}: n = {n}", cell_label(&idx)), err, 1e-9);
        }
    }
    Ok(s)
}

/// `(2, 1)` is not below `(3, 1)`, and indeed `F_{3,1}` does not restrict to
/// `F_{2,1}` on `x = (2, 0, 0, ...)`, a point of both spaces.
pub fn counterexample() -> Result<SuiteOutcome> {
    let mut s = SuiteOutcome::new("counterexample");
    let small = KochIndex::new(2, 1, 2, 1)?;
    let big = KochIndex::new(2, 1, 3, 1)?;
    s.report.require(!leq(small.type_pair(), big.type_pair()), || "(2,1) ≼ (3,1) should be false".into());
    let x = SeqVec::new(small, reals(&[2.0, 0.0]))?;
    s.report.require(in_m(&big, &x.expand(12), 1e-12), || "x should lie in M_{3,1}".into());
    let lhs = apply_f(&big, &x.embed(big));
    let rhs = apply_f(&small, &x).embed(big);
    let gap = sup_diff(lhs.coords(), rhs.coords());
    s.report.require(gap > 1.0, || format!("restriction unexpectedly holds (gap {gap:e})"));
    Ok(s)
}
