use super::Cx;

/// A complex number stored as `mantissa * 2^exp` with a mantissa of order one.
///
/// Critical orbits of starters outside the connectedness locus grow doubly
/// exponentially, so `P^n(0)` overflows `f64` long before the root finder
/// has pulled the starters in. Newton corrections only need ratios, which
/// stay representable.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScaledCx {
    mant: Cx,
    exp: i64,
}

fn pow2(e: i64) -> f64 {
    // two steps so that |e| up to ~2000 neither overflows nor flushes early
    let e = e.clamp(-2100, 2100);
    let half = e / 2;
    2f64.powi(half as i32) * 2f64.powi((e - half) as i32)
}

impl ScaledCx {
    pub const ZERO: ScaledCx = ScaledCx {
        mant: Cx::new(0.0, 0.0),
        exp: 0,
    };

    pub fn new(z: Cx) -> Self {
        Self { mant: z, exp: 0 }.normalized()
    }

    fn normalized(self) -> Self {
        let big = self.mant.re.abs().max(self.mant.im.abs());
        if big == 0.0 || !big.is_finite() {
            return Self {
                mant: self.mant,
                exp: if big == 0.0 { 0 } else { self.exp },
            };
        }
        let shift = big.log2().floor() as i64;
        Self {
            mant: self.mant * pow2(-shift),
            exp: self.exp + shift,
        }
    }

    pub fn is_zero(&self) -> bool {
        self.mant.re == 0.0 && self.mant.im == 0.0
    }

    pub fn is_finite(&self) -> bool {
        self.mant.re.is_finite() && self.mant.im.is_finite()
    }

    pub fn mul(self, rhs: Self) -> Self {
        Self {
            mant: self.mant * rhs.mant,
            exp: self.exp + rhs.exp,
        }
        .normalized()
    }

    pub fn scale(self, s: Cx) -> Self {
        Self {
            mant: self.mant * s,
            exp: self.exp,
        }
        .normalized()
    }

    pub fn powu(self, n: u32) -> Self {
        let mut acc = Self::new(Cx::new(1.0, 0.0));
        let mut base = self;
        let mut n = n;
        while n > 0 {
            if n & 1 == 1 {
                acc = acc.mul(base);
            }
            base = base.mul(base);
            n >>= 1;
        }
        acc
    }

    pub fn add(self, rhs: Self) -> Self {
        if self.is_zero() {
            return rhs;
        }
        if rhs.is_zero() {
            return self;
        }
        let (hi, lo) = if self.exp >= rhs.exp { (self, rhs) } else { (rhs, self) };
        let gap = hi.exp - lo.exp;
        if gap > 1100 {
            return hi;
        }
        Self {
            mant: hi.mant + lo.mant * pow2(-gap),
            exp: hi.exp,
        }
        .normalized()
    }

    pub fn sub(self, rhs: Self) -> Self {
        self.add(rhs.scale(Cx::new(-1.0, 0.0)))
    }

    /// `self / rhs` as a plain complex number; saturates to infinity or zero.
    pub fn ratio(self, rhs: Self) -> Cx {
        let q = self.mant / rhs.mant;
        q * pow2(self.exp - rhs.exp)
    }

    /// `|self|` as `f64` (infinite when out of range).
    pub fn norm(&self) -> f64 {
        let e = self.exp.clamp(-2100, 2100);
        self.mant.norm() * pow2(e)
    }

    /// `log2 |self|`, finite for every nonzero value.
    pub fn log2_norm(&self) -> f64 {
        self.mant.norm().log2() + self.exp as f64
    }

    pub fn to_cx(&self) -> Cx {
        self.mant * pow2(self.exp)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn arithmetic_agrees_with_plain_complex_in_range() {
        let a = Cx::new(3.5, -1.25);
        let b = Cx::new(-0.75, 2.0);
        let (sa, sb) = (ScaledCx::new(a), ScaledCx::new(b));
        assert!((sa.mul(sb).to_cx() - a * b).norm() < 1e-14);
        assert!((sa.add(sb).to_cx() - (a + b)).norm() < 1e-14);
        assert!((sa.sub(sb).to_cx() - (a - b)).norm() < 1e-14);
        assert!((sa.powu(7).to_cx() - a.powu(7)).norm() < 1e-9 * a.norm().powi(7));
        assert!((sa.ratio(sb) - a / b).norm() < 1e-14);
    }

    #[test]
    fn survives_values_beyond_f64_range() {
        let big = ScaledCx::new(Cx::new(2.0, 1.0)).powu(4096);
        assert!(big.is_finite());
        assert!(big.log2_norm() > 4000.0);
        let ratio = big.ratio(big.scale(Cx::new(2.0, 0.0)));
        assert!((ratio - Cx::new(0.5, 0.0)).norm() < 1e-12);
        // adding something negligible leaves the value untouched
        let sum = big.add(ScaledCx::new(Cx::new(1.0, 0.0)));
        assert!((sum.ratio(big) - Cx::new(1.0, 0.0)).norm() < 1e-15);
    }
}
