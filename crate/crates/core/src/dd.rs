//! Double-double arithmetic: an unevaluated sum `hi + lo` of two `f64`s,
//! good to roughly 32 significant digits.

use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Dd {
    pub hi: f64,
    pub lo: f64,
}

const LN2: Dd = Dd {
    hi: std::f64::consts::LN_2,
    lo: 2.319_046_813_846_299_6e-17,
};

fn two_sum(a: f64, b: f64) -> (f64, f64) {
    let s = a + b;
    let bb = s - a;
    (s, (a - (s - bb)) + (b - bb))
}

fn quick_two_sum(a: f64, b: f64) -> Dd {
    let s = a + b;
    Dd { hi: s, lo: b - (s - a) }
}

impl Dd {
    pub const ZERO: Dd = Dd { hi: 0.0, lo: 0.0 };
    pub const ONE: Dd = Dd { hi: 1.0, lo: 0.0 };

    pub fn new(x: f64) -> Self {
        Dd { hi: x, lo: 0.0 }
    }

    pub fn to_f64(self) -> f64 {
        self.hi + self.lo
    }

    pub fn abs(self) -> Self {
        if self.hi < 0.0 {
            -self
        } else {
            self
        }
    }

    pub fn powi(self, k: u32) -> Self {
        let mut acc = Dd::ONE;
        let mut base = self;
        let mut k = k;
        while k > 0 {
            if k & 1 == 1 {
                acc = acc * base;
            }
            base = base * base;
            k >>= 1;
        }
        acc
    }

    fn mul_pow2(self, k: i32) -> Self {
        let f = 2f64.powi(k);
        Dd {
            hi: self.hi * f,
            lo: self.lo * f,
        }
    }

    pub fn sqrt(self) -> Self {
        if self.hi <= 0.0 {
            return if self.hi == 0.0 { Dd::ZERO } else { Dd::new(f64::NAN) };
        }
        let s = Dd::new(self.hi.sqrt());
        s + (self - s * s) / (s * 2.0)
    }

    pub fn exp(self) -> Self {
        if self.hi > 709.0 {
            return Dd::new(f64::INFINITY);
        }
        if self.hi < -745.0 {
            return Dd::ZERO;
        }
        let k = (self.hi / LN2.hi).round();
        let r = self - LN2 * k;
        (Dd::ONE + r.exp_m1_reduced()).mul_pow2(k as i32)
    }

    /// `e^x - 1` for `|x| <= 1/2`, squared up in the form `y(y+2)` to keep the relative error flat.
    fn exp_m1_reduced(self) -> Self {
        let r = self.mul_pow2(-10);
        let mut term = r;
        let mut sum = r;
        for j in 2..=20 {
            term = term * r / f64::from(j);
            sum = sum + term;
            if term.hi.abs() <= 1e-34 * sum.hi.abs() {
                break;
            }
        }
        for _ in 0..10 {
            sum = sum * (sum + 2.0);
        }
        sum
    }

    pub fn ln(self) -> Self {
        if self.hi <= 0.0 {
            return Dd::new(if self.hi == 0.0 { f64::NEG_INFINITY } else { f64::NAN });
        }
        let mut y = Dd::new(self.hi.ln());
        for _ in 0..2 {
            y = y + self * (-y).exp() - 1.0;
        }
        y
    }

    /// `ln(1 + x)`, accurate for small `x`.
    pub fn ln_1p(self) -> Self {
        if self.hi.abs() > 0.5 {
            return (Dd::ONE + self).ln();
        }
        let mut y = Dd::new(self.hi.ln_1p());
        for _ in 0..2 {
            // y <- y + (1+x) e^{-y} - 1, with e^{-y} - 1 kept small
            let em1 = (-y).exp_m1();
            y = y + em1 + self * (em1 + 1.0);
        }
        y
    }

    /// `e^x - 1`, accurate for small `x`.
    pub fn exp_m1(self) -> Self {
        if self.hi.abs() > 0.5 {
            return self.exp() - 1.0;
        }
        if self.hi == 0.0 {
            return Dd::ZERO;
        }
        self.exp_m1_reduced()
    }
}

impl From<f64> for Dd {
    fn from(x: f64) -> Self {
        Dd::new(x)
    }
}

impl Neg for Dd {
    type Output = Dd;
    fn neg(self) -> Dd {
        Dd {
            hi: -self.hi,
            lo: -self.lo,
        }
    }
}

impl Add for Dd {
    type Output = Dd;
    fn add(self, o: Dd) -> Dd {
        let (s, e) = two_sum(self.hi, o.hi);
        let (t, f) = two_sum(self.lo, o.lo);
        let r = quick_two_sum(s, e + t);
        quick_two_sum(r.hi, r.lo + f)
    }
}

impl Sub for Dd {
    type Output = Dd;
    fn sub(self, o: Dd) -> Dd {
        self + (-o)
    }
}

impl Mul for Dd {
    type Output = Dd;
    fn mul(self, o: Dd) -> Dd {
        let p = self.hi * o.hi;
        let e = self.hi.mul_add(o.hi, -p);
        quick_two_sum(p, e + self.hi * o.lo + self.lo * o.hi)
    }
}

impl Div for Dd {
    type Output = Dd;
    fn div(self, o: Dd) -> Dd {
        let q1 = self.hi / o.hi;
        let r = self - o * q1;
        let q2 = r.hi / o.hi;
        let r = r - o * q2;
        let q3 = r.hi / o.hi;
        quick_two_sum(q1, q2) + Dd::new(q3)
    }
}

macro_rules! scalar_ops {
    ($($tr:ident $f:ident),*) => {$(
        impl $tr<f64> for Dd {
            type Output = Dd;
            fn $f(self, o: f64) -> Dd {
                $tr::$f(self, Dd::new(o))
            }
        }
        impl $tr<Dd> for f64 {
            type Output = Dd;
            fn $f(self, o: Dd) -> Dd {
                $tr::$f(Dd::new(self), o)
            }
        }
    )*};
}

scalar_ops!(Add add, Sub sub, Mul mul, Div div);

impl PartialOrd for Dd {
    fn partial_cmp(&self, o: &Dd) -> Option<Ordering> {
        match self.hi.partial_cmp(&o.hi) {
            Some(Ordering::Equal) => self.lo.partial_cmp(&o.lo),
            c => c,
        }
    }
}

impl fmt::Display for Dd {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:e}", self.to_f64())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn third_times_three() {
        let t = Dd::ONE / 3.0;
        let back = t * 3.0 - 1.0;
        assert!(back.to_f64().abs() < 1e-31);
    }

    #[test]
    fn exp_ln_roundtrip() {
        for &x in &[1e-20, 1e-3, 0.5, 1.0, 2.5, 40.0, 1e5] {
            let d = Dd::new(x);
            let back = d.ln().exp();
            assert!(((back - d) / d).abs().to_f64() < 1e-30, "{x}");
        }
    }

    #[test]
    fn known_constants() {
        let e = Dd::ONE.exp();
        // e = 2.71828182845904523536028747135266...
        let ref_hi = 2.718281828459045;
        let ref_lo = 1.4456468917292502e-16;
        assert!((e - Dd { hi: ref_hi, lo: ref_lo }).abs().to_f64() < 1e-30);
        let two = Dd::new(2.0).sqrt();
        assert!((two * two - 2.0).abs().to_f64() < 1e-30);
        assert!((Dd::new(2.0).ln() - LN2).abs().to_f64() < 1e-31);
    }

    #[test]
    fn small_argument_functions() {
        let x = Dd::new(1e-12);
        let l = x.ln_1p();
        // ln(1+x) = x - x^2/2 + x^3/3
        let series = x - x * x / 2.0 + x * x * x / 3.0;
        assert!(((l - series) / x).abs().to_f64() < 1e-30);
        let e = x.exp_m1();
        let series = x + x * x / 2.0 + x * x * x / 6.0;
        assert!(((e - series) / x).abs().to_f64() < 1e-30);
        assert!((Dd::new(-0.3).ln_1p() - (Dd::ONE - Dd::new(0.3)).ln()).abs().to_f64() < 1e-31);
    }

    #[test]
    fn integer_powers() {
        let q = Dd::ONE - Dd::new(1e-3);
        let direct = q * q * q * q * q;
        assert!((q.powi(5) - direct).abs().to_f64() < 1e-32);
        assert_eq!(q.powi(0), Dd::ONE);
    }
}
