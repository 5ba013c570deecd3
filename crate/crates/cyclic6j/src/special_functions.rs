//! Scalar special functions: cyclic ω-functions on the Fermat curve, the
//! bracket `[x]`, the branch functions `r`, `g`, `h`, `Φ`, the q-Pochhammer
//! symbol, Euler's dilogarithm and the semiclassical factor `S`.

use crate::core_numerics::{scalar_residual, Context, C64, DEFAULT_TOL_ABS};
use crate::error::{domain, singular, Result};

/// Point `[x, y, z]` with `x^N + y^N = z^N`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct FermatTriple {
    pub x: C64,
    pub y: C64,
    pub z: C64,
}

impl FermatTriple {
    pub fn new(ctx: &Context, x: C64, y: C64, z: C64) -> Result<Self> {
        if y.norm() < ctx.tol_abs || z.norm() < ctx.tol_abs {
            return Err(domain("Fermat triple needs y ≠ 0 and z ≠ 0"));
        }
        let scale = x.norm().max(y.norm()).max(z.norm()).powi(ctx.n() as i32);
        let defect = (ctx.xn(x) + ctx.xn(y) - ctx.xn(z)).norm();
        if defect > ctx.tol_rel * scale {
            return Err(domain(format!(
                "x^N + y^N - z^N = {defect:.3e} exceeds tolerance"
            )));
        }
        Ok(FermatTriple { x, y, z })
    }

    pub fn residual(&self, ctx: &Context) -> f64 {
        let scale = self
            .x
            .norm()
            .max(self.y.norm())
            .max(self.z.norm())
            .powi(ctx.n() as i32);
        (ctx.xn(self.x) + ctx.xn(self.y) - ctx.xn(self.z)).norm() / scale
    }
}

/// `ω(x,y,z|n) = ∏_{j=1}^{n mod N} y/(z − xω^j)`.
pub fn omega_fermat(ctx: &Context, t: &FermatTriple, n: i64) -> Result<C64> {
    let m = ctx.modn(n);
    let mut v = C64::new(1.0, 0.0);
    for j in 1..=m {
        let d = t.z - t.x * ctx.w(j as i64);
        if d.norm() < ctx.tol_abs {
            return Err(singular(format!("ω-function pole at j = {j}")));
        }
        v *= t.y / d;
    }
    Ok(v)
}

/// Values `ω(x,y,z|n)` for `n = 0..N`.
pub fn omega_fermat_table(ctx: &Context, t: &FermatTriple) -> Result<Vec<C64>> {
    let mut out = Vec::with_capacity(ctx.n());
    let mut v = C64::new(1.0, 0.0);
    out.push(v);
    for j in 1..ctx.n() {
        let d = t.z - t.x * ctx.w(j as i64);
        if d.norm() < ctx.tol_abs {
            return Err(singular(format!("ω-function pole at j = {j}")));
        }
        v *= t.y / d;
        out.push(v);
    }
    Ok(out)
}

/// `ω(x,y,z|m,n) = ω(x,y,z|m−n) ω^{n²/2}`.
pub fn omega_fermat2(ctx: &Context, t: &FermatTriple, m: i64, n: i64) -> Result<C64> {
    Ok(omega_fermat(ctx, t, m - n)? * ctx.omega_pow(n * n, 1))
}

/// `ω(x|n) = ∏_{j=1}^n 1/(1 − xω^j)` for `n` in `[0, N)`; not periodic.
pub fn omega_simple(ctx: &Context, x: C64, n: usize) -> Result<C64> {
    if n >= ctx.n() {
        return Err(domain(format!("ω(x|n) needs 0 ≤ n < N, got n = {n}")));
    }
    let mut v = C64::new(1.0, 0.0);
    for j in 1..=n {
        let d = 1.0 - x * ctx.w(j as i64);
        if d.norm() < ctx.tol_abs {
            return Err(singular(format!("ω(x|n) pole at j = {j}")));
        }
        v /= d;
    }
    Ok(v)
}

/// `f(x,y|z) = Σ_σ ω(x|σ)/ω(y|σ) z^σ` subject to `z^N(1 − y^N) = 1 − x^N`.
pub fn f_func(ctx: &Context, x: C64, y: C64, z: C64) -> Result<C64> {
    let lhs = ctx.xn(z) * (1.0 - ctx.xn(y));
    let rhs = 1.0 - ctx.xn(x);
    if (lhs - rhs).norm() > ctx.tol_rel * lhs.norm().max(rhs.norm()).max(1.0) {
        return Err(domain("f needs z^N (1 − y^N) = 1 − x^N"));
    }
    let mut s = C64::new(0.0, 0.0);
    for sigma in 0..ctx.n() {
        s += omega_simple(ctx, x, sigma)? / omega_simple(ctx, y, sigma)? * z.powi(sigma as i32);
    }
    Ok(s)
}

/// Product form `(yω)^P g(1) g(yω/x) g(x/(yz)) / (g(1/x) g(yω) g(ω/z))` of `f`.
pub fn f_product_form(ctx: &Context, x: C64, y: C64, z: C64) -> Result<C64> {
    let w = ctx.omega();
    let num = (y * w).powi(ctx.p() as i32)
        * g_one(ctx)
        * g_func(ctx, y * w / x)?
        * g_func(ctx, x / (y * z))?;
    let den = g_func(ctx, 1.0 / x)? * g_func(ctx, y * w)? * g_func(ctx, w / z)?;
    Ok(num / den)
}

/// `[x] = (1 − x^N)/(N(1 − x))`.
pub fn bracket(ctx: &Context, x: C64) -> Result<C64> {
    if (x - 1.0).norm() < ctx.tol_abs {
        return Err(singular("[x] at x = 1"));
    }
    Ok((1.0 - ctx.xn(x)) / (ctx.n() as f64 * (1.0 - x)))
}

/// 1 if `N | n`, else 0.
pub fn kron_delta_n(ctx: &Context, n: i64) -> u8 {
    u8::from(ctx.modn(n) == 0)
}

/// `r(x) = (1 − x^N)^{1/N}`, principal power.
pub fn r_func(ctx: &Context, x: C64) -> Result<C64> {
    let u = 1.0 - ctx.xn(x);
    if u.norm() < ctx.tol_abs {
        return Err(singular("r(x) at x^N = 1"));
    }
    Ok(u.powf(1.0 / ctx.n() as f64))
}

/// `g(x) = ∏_{j=1}^{N−1} (1 − xω^j)^{j/N}`, principal power per factor.
pub fn g_func(ctx: &Context, x: C64) -> Result<C64> {
    let n = ctx.n() as f64;
    let mut v = C64::new(1.0, 0.0);
    for j in 1..ctx.n() {
        let u = 1.0 - x * ctx.w(j as i64);
        if u.norm() < ctx.tol_abs {
            return Err(singular(format!("g(x) factor {j} vanishes")));
        }
        v *= u.powf(j as f64 / n);
    }
    Ok(v)
}

pub fn g_one(ctx: &Context) -> C64 {
    g_func(ctx, C64::new(1.0, 0.0)).expect("g(1) factors are nonzero")
}

/// `h(x) = x^{−P} g(x)/g(1)`.
pub fn h_func(ctx: &Context, x: C64) -> Result<C64> {
    if x.norm() < ctx.tol_abs {
        return Err(singular("h(x) at x = 0"));
    }
    Ok(g_func(ctx, x)? / (x.powi(ctx.p() as i32) * g_one(ctx)))
}

/// `Φ(x, ζ, N) = (1 − x^N)^{(N−1)/2N} ∏_{k=1}^{N−1} (1 − ζ^k x)^{−k/N}` for `|x| < 1`.
pub fn phi_func(ctx: &Context, x: C64, zeta: C64) -> Result<C64> {
    if x.norm() >= 1.0 {
        return Err(domain("Φ is evaluated on the open unit disk only"));
    }
    check_primitive(ctx, zeta)?;
    let n = ctx.n() as f64;
    let mut v = (1.0 - ctx.xn(x)).powf((n - 1.0) / (2.0 * n));
    for k in 1..ctx.n() {
        v *= (1.0 - zeta.powi(k as i32) * x).powf(-(k as f64) / n);
    }
    Ok(v)
}

fn check_primitive(ctx: &Context, zeta: C64) -> Result<()> {
    if (ctx.xn(zeta) - 1.0).norm() > 1e-10 {
        return Err(domain("ζ is not an N-th root of unity"));
    }
    for k in 1..ctx.n() {
        if (zeta.powi(k as i32) - 1.0).norm() < 1e-8 {
            return Err(domain("ζ is not a primitive N-th root of unity"));
        }
    }
    Ok(())
}

const SERIES_FLOOR: f64 = 1e-18;

/// `(x; q)_∞ = ∏_{n≥0} (1 − xq^n)`, truncated once `|xq^n|` drops below
/// `1e-18` or after `max_terms` factors.
pub fn q_pochhammer(x: C64, q: C64, max_terms: usize) -> Result<C64> {
    if q.norm() >= 1.0 - DEFAULT_TOL_ABS {
        return Err(domain("(x; q)_∞ needs |q| < 1"));
    }
    let mut v = C64::new(1.0, 0.0);
    let mut t = x;
    for _ in 0..max_terms {
        if t.norm() < SERIES_FLOOR {
            break;
        }
        v *= 1.0 - t;
        t *= q;
    }
    Ok(v)
}

/// `−Σ_{n≥1} x^n / (n(1 − q^n))`, the logarithm of `(x; q)_∞` for `|x|, |q| < 1`.
pub fn log_q_pochhammer_series(x: C64, q: C64, max_terms: usize) -> Result<C64> {
    if q.norm() >= 1.0 || x.norm() >= 1.0 {
        return Err(domain("series needs |x| < 1 and |q| < 1"));
    }
    let mut s = C64::new(0.0, 0.0);
    let mut xn = x;
    let mut qn = q;
    for n in 1..=max_terms {
        let term = xn / (n as f64 * (1.0 - qn));
        s -= term;
        if term.norm() < SERIES_FLOOR {
            break;
        }
        xn *= x;
        qn *= q;
    }
    Ok(s)
}

/// `Li₂(x) = Σ x^n/n²` for `|x| < 1`.
pub fn euler_dilog(x: C64) -> Result<C64> {
    if x.norm() > 1.0 - DEFAULT_TOL_ABS {
        return Err(domain("Li₂ series needs |x| < 1"));
    }
    let mut s = C64::new(0.0, 0.0);
    let mut xn = x;
    for n in 1..10_000_000u64 {
        let term = xn / (n as f64 * n as f64);
        s += term;
        if term.norm() < SERIES_FLOOR {
            break;
        }
        xn *= x;
    }
    Ok(s)
}

/// `S(x, ε) = (1 − x)^{1/2} exp(−Li₂(x)/ε)`.
pub fn s_classical(x: C64, eps: C64) -> Result<C64> {
    if eps.re <= 0.0 {
        return Err(domain("S(x, ε) needs Re ε > 0"));
    }
    Ok((1.0 - x).sqrt() * (-euler_dilog(x)? / eps).exp())
}

/// `(x; q)_∞ / ((1 − x^N)^{(1−N)/2N} S(x^N, ε) Φ(x))` with `q = exp(−ε/N²) ζ`.
pub fn asymptotic_ratio(ctx: &Context, x: C64, eps: C64, zeta: C64) -> Result<C64> {
    if eps.re <= 0.0 {
        return Err(domain("needs Re ε > 0"));
    }
    let n = ctx.n() as f64;
    let q = (-eps / (n * n)).exp() * zeta;
    let terms = (200.0 * n * n / eps.re) as usize + 1000;
    let qp = q_pochhammer(x, q, terms)?;
    let xn = ctx.xn(x);
    let pre = (1.0 - xn).powf((1.0 - n) / (2.0 * n));
    Ok(qp / (pre * s_classical(xn, eps)? * phi_func(ctx, x, zeta)?))
}

/// Largest residual of `ω(x,y,z|m+n) = ω(x,y,z|n) ω(xω^n,y,z|m)` over `m, n ∈ [0,N)`.
pub fn shift_identity_residual(ctx: &Context, t: &FermatTriple) -> Result<f64> {
    let mut worst: f64 = 0.0;
    for n in 0..ctx.n() as i64 {
        let shifted = FermatTriple {
            x: t.x * ctx.w(n),
            ..*t
        };
        for m in 0..ctx.n() as i64 {
            let lhs = omega_fermat(ctx, t, m + n)?;
            let rhs = omega_fermat(ctx, t, n)? * omega_fermat(ctx, &shifted, m)?;
            worst = worst.max(scalar_residual(lhs, rhs, ctx.tol_abs));
        }
    }
    Ok(worst)
}

/// Largest residual of `ω(x,y,z|k−l) ω(z,−ω^{1/2}y,ωx|l−k) = ω^{kl} ω^{−l²/2−k²/2}`.
pub fn inversion_residual(ctx: &Context, t: &FermatTriple) -> Result<f64> {
    let dual = FermatTriple::new(ctx, t.z, -ctx.omega_half() * t.y, ctx.omega() * t.x)?;
    let mut worst: f64 = 0.0;
    for k in 0..ctx.n() as i64 {
        for l in 0..ctx.n() as i64 {
            let lhs = omega_fermat(ctx, t, k - l)? * omega_fermat(ctx, &dual, l - k)?;
            let rhs = ctx.w(k * l) * ctx.omega_pow(-(l * l) - k * k, 1);
            worst = worst.max(scalar_residual(lhs, rhs, ctx.tol_abs));
        }
    }
    Ok(worst)
}

/// `[x]` against `h(1/x) h(x) x^P`.
pub fn bracket_factorization_residual(ctx: &Context, x: C64) -> Result<f64> {
    let rhs = h_func(ctx, 1.0 / x)? * h_func(ctx, x)? * x.powi(ctx.p() as i32);
    Ok(scalar_residual(bracket(ctx, x)?, rhs, ctx.tol_abs))
}

/// `f(x,y|z)` against its product form.
pub fn f_factorization_residual(ctx: &Context, x: C64, y: C64, z: C64) -> Result<f64> {
    Ok(scalar_residual(
        f_func(ctx, x, y, z)?,
        f_product_form(ctx, x, y, z)?,
        ctx.tol_abs,
    ))
}

/// Largest residual of `Φ(xζ^k) = Φ(x) ∏_{j<k} r(x)/(1 − xζ^j)` over `k ∈ [0,N)`.
pub fn phi_shift_residual(ctx: &Context, x: C64, zeta: C64) -> Result<f64> {
    let base = phi_func(ctx, x, zeta)?;
    let r = r_func(ctx, x)?;
    let mut rhs = base;
    let mut worst: f64 = 0.0;
    for k in 0..ctx.n() as i32 {
        let lhs = phi_func(ctx, x * zeta.powi(k), zeta)?;
        worst = worst.max(scalar_residual(lhs, rhs, ctx.tol_abs));
        rhs *= r / (1.0 - x * zeta.powi(k));
    }
    Ok(worst)
}

/// `log (x;q)_∞` against `−Σ x^n/(n(1 − q^n))`.
pub fn log_series_residual(x: C64, q: C64, max_terms: usize) -> Result<f64> {
    let lhs = q_pochhammer(x, q, max_terms)?.ln();
    let rhs = log_q_pochhammer_series(x, q, max_terms)?;
    Ok(scalar_residual(lhs, rhs, DEFAULT_TOL_ABS))
}

/// `||g(1)| − √N|`.
pub fn g_one_norm_residual(ctx: &Context) -> f64 {
    (g_one(ctx).norm() - (ctx.n() as f64).sqrt()).abs()
}

/// `|ratio(2ε) − 1| / |ratio(ε) − 1|` at `ζ = ω`.
pub fn asymptotic_error_growth(ctx: &Context, x: C64, eps: f64) -> Result<f64> {
    let e = |t: f64| -> Result<f64> {
        Ok((asymptotic_ratio(ctx, x, C64::new(t, 0.0), ctx.omega())? - 1.0).norm())
    };
    Ok(e(2.0 * eps)? / e(eps)?)
}
