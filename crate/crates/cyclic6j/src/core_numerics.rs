//! Root-of-unity context and modular exponent bookkeeping.

use crate::error::{domain, Error, Result};
use num_complex::Complex64;
use std::f64::consts::PI;

pub type C64 = Complex64;

pub const DEFAULT_TOL_REL: f64 = 1e-9;
pub const DEFAULT_TOL_ABS: f64 = 1e-12;

/// Fixed data for one odd order `N`: `ω = exp(2iπ/N)` and `ω^{1/2} = ω^{P+1}`.
#[derive(Clone, Debug)]
pub struct Context {
    n: usize,
    p: usize,
    powers: Vec<C64>,
    pub tol_rel: f64,
    pub tol_abs: f64,
}

impl Context {
    pub fn new(n: i64) -> Result<Self> {
        Self::with_tolerances(n, DEFAULT_TOL_REL, DEFAULT_TOL_ABS)
    }

    pub fn with_tolerances(n: i64, tol_rel: f64, tol_abs: f64) -> Result<Self> {
        if n < 3 || n % 2 == 0 {
            return Err(Error::InvalidN(n));
        }
        if !(tol_rel > 0.0 && tol_abs > 0.0) {
            return Err(domain("tolerances must be positive"));
        }
        let n = n as usize;
        let powers = (0..n)
            .map(|k| C64::from_polar(1.0, 2.0 * PI * k as f64 / n as f64))
            .collect();
        Ok(Context {
            n,
            p: (n - 1) / 2,
            powers,
            tol_rel,
            tol_abs,
        })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn p(&self) -> usize {
        self.p
    }

    pub fn omega(&self) -> C64 {
        self.powers[1 % self.n]
    }

    pub fn omega_half(&self) -> C64 {
        self.powers[(self.p + 1) % self.n]
    }

    /// Canonical representative of `k` in `[0, N)`.
    pub fn modn(&self, k: i64) -> usize {
        k.rem_euclid(self.n as i64) as usize
    }

    /// `ω^k` for any integer `k`, read from the exact power table.
    pub fn w(&self, k: i64) -> C64 {
        self.powers[self.modn(k)]
    }

    /// `ω^{num / 2^den_log2}` with `1/2 := P+1 (mod N)`.
    pub fn omega_pow(&self, num: i64, den_log2: u32) -> C64 {
        let n = self.n as i64;
        let mut e = num.rem_euclid(n);
        for _ in 0..den_log2 {
            e = (e * (self.p as i64 + 1)) % n;
        }
        self.powers[e as usize]
    }

    /// `k/2 mod N`, i.e. multiplication by the inverse of 2.
    pub fn halve(&self, k: i64) -> usize {
        let n = self.n as i64;
        ((k.rem_euclid(n) * (self.p as i64 + 1)) % n) as usize
    }

    /// Principal N-th root: argument in `(-π/N, π/N]`.
    pub fn principal_root(&self, w: C64) -> C64 {
        let (r, theta) = w.to_polar();
        C64::from_polar(r.powf(1.0 / self.n as f64), theta / self.n as f64)
    }

    /// Principal root multiplied by `ω^branch`.
    pub fn root_branch(&self, w: C64, branch: usize) -> C64 {
        self.principal_root(w) * self.w(branch as i64)
    }

    pub fn nth_roots(&self, w: C64) -> Result<Vec<C64>> {
        if w.norm() == 0.0 {
            return Err(domain("N-th root of zero"));
        }
        let r = self.principal_root(w);
        Ok((0..self.n).map(|k| r * self.powers[k]).collect())
    }

    /// `x^k` for a signed integer exponent.
    pub fn ipow(x: C64, k: i64) -> C64 {
        if k >= 0 {
            x.powi(k as i32)
        } else {
            C64::new(1.0, 0.0) / x.powi((-k) as i32)
        }
    }

    pub fn xn(&self, x: C64) -> C64 {
        x.powi(self.n as i32)
    }
}

/// Relative residual used everywhere: `max|a-b| / max(max|b|, tol_abs)`.
pub fn rel_residual(a: &[C64], b: &[C64], tol_abs: f64) -> f64 {
    assert_eq!(a.len(), b.len());
    let mut num: f64 = 0.0;
    let mut den: f64 = 0.0;
    for (x, y) in a.iter().zip(b) {
        num = num.max((x - y).norm());
        den = den.max(y.norm());
    }
    num / den.max(tol_abs)
}

pub fn scalar_residual(a: C64, b: C64, tol_abs: f64) -> f64 {
    (a - b).norm() / b.norm().max(tol_abs)
}

pub fn gcd(a: u64, b: u64) -> u64 {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

/// Distance from `x` to the rays `{t·ω^k : t ≥ 1}` along which the principal
/// fractional powers in `r`, `g` and `Φ` are discontinuous.
pub fn cut_distance(ctx: &Context, x: C64) -> f64 {
    (0..ctx.n())
        .map(|k| {
            let u = x * ctx.w(-(k as i64));
            if u.re >= 1.0 {
                u.im.abs()
            } else {
                (u - 1.0).norm()
            }
        })
        .fold(f64::INFINITY, f64::min)
}

/// Distance from `x` to the N-th roots of unity.
pub fn root_distance(ctx: &Context, x: C64) -> f64 {
    (0..ctx.n())
        .map(|k| (x - ctx.w(k as i64)).norm())
        .fold(f64::INFINITY, f64::min)
}
