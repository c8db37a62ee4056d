//! Fixed points of `F_{k,m}` through the critical orbit.
//!
//! A fixed point `z` of `F_{k,m}` is the critical orbit `z_i = P_c^i(0)` of
//! some `P_c(t) = t^d + c` with `beta z_{k+m} = z_k`, so the whole fixed-point
//! set is the zero set of the one-variable polynomial
//! `g(c) = beta P_c^{k+m}(0) - P_c^k(0)` of degree `d^{k+m-1}`.

use crate::error::{KochError, Result};
use crate::numeric::{
    cluster_roots, find_roots, orbit, orbit_with_param_derivative, Cx, Holomorphic, ScaledCx,
};
use crate::space::{apply_f, in_delta, KochIndex, SeqVec, TypePair};

/// Starters sit just outside the disk `|c| <= 2` holding every bounded orbit.
const START_RADIUS: f64 = 2.2;
const CLUSTER_RADIUS: f64 = 1e-8;
pub const DEFAULT_DEGREE_CAP: u64 = 4096;

/// `g(c)` for one index, evaluated through the orbit recurrence.
#[derive(Debug, Clone, Copy)]
pub struct ParameterEquation {
    idx: KochIndex,
}

impl ParameterEquation {
    pub fn new(idx: KochIndex) -> Self {
        Self { idx }
    }

    pub fn degree(&self) -> Option<u64> {
        (self.idx.d as u64).checked_pow((self.idx.k + self.idx.m - 1) as u32)
    }
}

impl Holomorphic for ParameterEquation {
    fn eval(&self, c: Cx) -> (Cx, Cx) {
        parameter_residual(&self.idx, c)
    }

    // Far from the roots the orbit overflows; the Newton ratio does not.
    fn newton_step(&self, c: Cx) -> Cx {
        let KochIndex { d, k, m, .. } = self.idx;
        let one = ScaledCx::new(Cx::new(1.0, 0.0));
        let cs = ScaledCx::new(c);
        let (mut z, mut dz) = (ScaledCx::ZERO, ScaledCx::ZERO);
        let (mut zk, mut dzk) = (ScaledCx::ZERO, ScaledCx::ZERO);
        for step in 1..=k + m {
            dz = z.powu(d - 1).mul(dz).scale(Cx::new(d as f64, 0.0)).add(one);
            z = z.powu(d).add(cs);
            if step == k {
                zk = z;
                dzk = dz;
            }
        }
        let beta = self.idx.beta();
        let g = z.scale(beta).sub(zk);
        let dg = dz.scale(beta).sub(dzk);
        g.ratio(dg)
    }
}

/// `(g(c), g'(c))` with `g(c) = beta P_c^{k+m}(0) - P_c^k(0)`; non-finite when
/// the orbit escapes.
pub fn parameter_residual(idx: &KochIndex, c: Cx) -> (Cx, Cx) {
    let n = idx.k + idx.m;
    let inf = Cx::new(f64::INFINITY, f64::INFINITY);
    let Ok(zs) = orbit_with_param_derivative(idx.d, c, n) else {
        return (inf, inf);
    };
    let at = |i: usize| if i == 0 { (Cx::new(0.0, 0.0), Cx::new(0.0, 0.0)) } else { zs[i - 1] };
    let beta = idx.beta();
    let (zn, dzn) = at(n);
    let (zk, dzk) = at(idx.k);
    (beta * zn - zk, beta * dzn - dzk)
}

/// One fixed point of `F_{k,m}`.
#[derive(Debug, Clone, PartialEq)]
pub struct FixedPointRecord {
    pub index: KochIndex,
    /// `c = z_1`.
    pub c: Cx,
    /// `z_1, ..., z_{k+m}`.
    pub orbit: Vec<Cx>,
    pub exact_type: TypePair,
    pub lambda: Cx,
    pub residual_param: f64,
    pub residual_fixed: f64,
    pub is_trivial: bool,
    pub in_delta: bool,
    /// Number of raw roots merged into this one (1 for a simple root).
    pub multiplicity: usize,
}

impl FixedPointRecord {
    /// The fixed point as a point of `M_{k,m}`.
    pub fn point(&self) -> SeqVec {
        let n = self.index.dim();
        SeqVec::new(self.index, self.orbit[..n].to_vec()).expect("orbit has k+m entries")
    }

    /// The same orbit as a point of `M_{k',m'}`.
    pub fn inner_point(&self) -> SeqVec {
        let inner = self.index.with_type(self.exact_type);
        let n = inner.dim();
        SeqVec::new(inner, self.orbit[..n].to_vec()).expect("inner type is not larger")
    }
}

fn scale_of(z: &[Cx]) -> f64 {
    1.0 + z.iter().map(|v| v.norm()).fold(0.0, f64::max)
}

/// Smallest `m'`, then smallest `k'` (bounded by `bound`) with
/// `z_{i+m'} = z_i` for every `i >= k'+1` covered by the orbit.
pub fn exact_type(orbit: &[Cx], bound: TypePair, tol: f64) -> Result<TypePair> {
    let eps = tol * scale_of(orbit);
    let len = orbit.len();
    for m in 1..=bound.m {
        for k in 0..=bound.k {
            if k + m >= len {
                continue;
            }
            // orbit[i - 1] holds z_i
            if (k + 1..=len - m).all(|i| (orbit[i + m - 1] - orbit[i - 1]).norm() <= eps) {
                return Ok(TypePair::new(k, m));
            }
        }
    }
    Err(KochError::NotPreperiodic)
}

/// `lambda = prod_{i=k'+1}^{k'+m'} d z_i^{d-1}`, the multiplier of the cycle
/// the critical orbit falls into.
pub fn cycle_multiplier(d: u32, c: Cx, t: TypePair) -> Result<Cx> {
    let z = orbit(d, c, t.k + t.m)?;
    Ok(z[t.k..t.k + t.m]
        .iter()
        .map(|zi| d as f64 * zi.powu(d - 1))
        .product())
}

/// Newton polishing that only accepts steps lowering `|g|`.
fn polish(eq: &ParameterEquation, c: Cx) -> Cx {
    let mut c = c;
    let mut res = eq.residual(c);
    for _ in 0..6 {
        let cand = c - eq.newton_step(c);
        let r = eq.residual(cand);
        if r.is_finite() && r < res {
            c = cand;
            res = r;
        } else {
            break;
        }
    }
    c
}

/// Every fixed point of `F_{k,m}`, ordered by `(|c|, arg c)`.
pub fn enumerate_fixed_points(idx: &KochIndex, degree_cap: u64) -> Result<Vec<FixedPointRecord>> {
    let eq = ParameterEquation::new(*idx);
    let degree = eq.degree().unwrap_or(u64::MAX);
    if degree > degree_cap {
        return Err(KochError::DegreeCapExceeded {
            degree,
            cap: degree_cap,
        });
    }
    let roots = find_roots(&eq, degree as usize, START_RADIUS)?;
    let mut records = cluster_roots(&roots, CLUSTER_RADIUS)
        .into_iter()
        .map(|cl| build_record(idx, &eq, polish(&eq, cl.value), cl.multiplicity))
        .collect::<Result<Vec<_>>>()?;
    records.sort_by(|a, b| {
        a.c.norm()
            .total_cmp(&b.c.norm())
            .then_with(|| a.c.arg().total_cmp(&b.c.arg()))
    });
    Ok(records)
}

/// Builds and validates the record for a root `c` of the parameter equation.
pub fn fixed_point_record(idx: &KochIndex, c: Cx) -> Result<FixedPointRecord> {
    build_record(idx, &ParameterEquation::new(*idx), c, 1)
}

fn build_record(idx: &KochIndex, eq: &ParameterEquation, c: Cx, multiplicity: usize) -> Result<FixedPointRecord> {
    let (k, m) = (idx.k, idx.m);
    let long = orbit(idx.d, c, k + 2 * m)?;
    let tol = 1e-9;
    let exact = exact_type(&long, idx.type_pair(), tol)?;
    let lambda = cycle_multiplier(idx.d, c, exact)?;
    let z = SeqVec::new(*idx, long[..idx.dim()].to_vec())?;
    let fz = apply_f(idx, &z);
    let residual_fixed = fz
        .coords()
        .iter()
        .zip(z.coords())
        .map(|(a, b)| (a - b).norm())
        .fold(0.0, f64::max);
    if residual_fixed > tol * scale_of(z.coords()) {
        return Err(KochError::NonFinite("fixed-point validation (F(z) != z)"));
    }
    let trivial_eps = tol * scale_of(&long);
    Ok(FixedPointRecord {
        index: *idx,
        c,
        orbit: long[..k + m].to_vec(),
        exact_type: exact,
        lambda,
        residual_param: eq.residual(c),
        residual_fixed,
        is_trivial: c.norm() <= trivial_eps,
        in_delta: in_delta(idx, &z, tol),
        multiplicity,
    })
}
