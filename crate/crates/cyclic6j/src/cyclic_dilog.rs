//! The cyclic dilogarithm `Ψ_{a,b,c}(A)`, anticyclic pairs, the five-term
//! identity and the Gaussian operator `Υ`.

use crate::core_numerics::{rel_residual, scalar_residual, Context, C64};
use crate::error::{domain, singular, Error, Result};
use crate::linalg::{embed_monomial, eye, mat_pow, mat_residual, one, zero, CMat, Legs, Monomial};
use crate::weyl_reps::{mono_pow, mono_y, mono_z};
use std::f64::consts::PI;

/// Parameters of `Ψ_{a,b,c}`, constrained by `a^N + c^N = b^N`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CyclicDilogParams {
    pub a: C64,
    pub b: C64,
    pub c: C64,
    pub h: C64,
}

impl CyclicDilogParams {
    pub fn new(ctx: &Context, a: C64, b: C64, c: C64) -> Result<Self> {
        Self::with_h(ctx, a, b, c, one())
    }

    pub fn with_h(ctx: &Context, a: C64, b: C64, c: C64, h: C64) -> Result<Self> {
        if b.norm() < ctx.tol_abs || c.norm() < ctx.tol_abs || a.norm() < ctx.tol_abs {
            return Err(domain("cyclic dilogarithm needs nonzero a, b, c"));
        }
        let p = CyclicDilogParams { a, b, c, h };
        let d = p.constraint_residual(ctx);
        if d > ctx.tol_rel {
            return Err(domain(format!(
                "a^N + c^N − b^N defect {d:.3e} exceeds tolerance"
            )));
        }
        Ok(p)
    }

    pub fn constraint_residual(&self, ctx: &Context) -> f64 {
        let scale = self
            .a
            .norm()
            .max(self.b.norm())
            .max(self.c.norm())
            .powi(ctx.n() as i32);
        (ctx.xn(self.a) + ctx.xn(self.c) - ctx.xn(self.b)).norm() / scale
    }

    /// Coefficients `h ∏_{s=1}^n a/(c − ω^{−s}b)` of `A^n`, `n = 0..N`.
    pub fn coefficients(&self, ctx: &Context) -> Result<Vec<C64>> {
        let mut out = Vec::with_capacity(ctx.n());
        let mut v = self.h;
        out.push(v);
        for s in 1..ctx.n() {
            let d = self.c - ctx.w(-(s as i64)) * self.b;
            if d.norm() < ctx.tol_abs * self.b.norm().max(1.0) {
                return Err(singular(format!("c = ω^{{-{s}}} b")));
            }
            v *= self.a / d;
            out.push(v);
        }
        Ok(out)
    }

    /// Scalar polynomial `Ψ(λ)`.
    pub fn value(&self, ctx: &Context, lambda: C64) -> Result<C64> {
        let coef = self.coefficients(ctx)?;
        Ok(coef.iter().rev().fold(zero(), |acc, &c| acc * lambda + c))
    }
}

fn check_spectrum(ctx: &Context, a: &CMat) -> Result<()> {
    let n = a.nrows();
    let res = mat_residual(&mat_pow(a, ctx.n()), &(-eye(n)), ctx.tol_abs);
    if res > ctx.tol_rel {
        return Err(Error::Spectrum(format!("A^N + id residual {res:.3e}")));
    }
    Ok(())
}

fn check_spectrum_mono(ctx: &Context, a: &Monomial) -> Result<()> {
    let p = a.pow(ctx.n());
    let minus = vec![-one(); a.dim()];
    let ok = p.target.iter().enumerate().all(|(j, &t)| j == t);
    if !ok || rel_residual(&p.coef, &minus, ctx.tol_abs) > ctx.tol_rel {
        return Err(Error::Spectrum("A^N ≠ −id".into()));
    }
    Ok(())
}

/// Dense `Ψ_{a,b,c}(A)` for any square `A` with `A^N = −id`.
pub fn cyclic_dilog_op(ctx: &Context, p: &CyclicDilogParams, a: &CMat) -> Result<CMat> {
    check_spectrum(ctx, a)?;
    let coef = p.coefficients(ctx)?;
    let mut out = CMat::zeros(a.nrows(), a.ncols());
    let mut pow = eye(a.nrows());
    for (k, c) in coef.iter().enumerate() {
        if k > 0 {
            pow = &pow * a;
        }
        out += &pow * *c;
    }
    Ok(out)
}

/// `Ψ_{a,b,c}(A)` as the list of scaled monomials `c_n A^n`.
pub fn cyclic_dilog_terms(
    ctx: &Context,
    p: &CyclicDilogParams,
    a: &Monomial,
) -> Result<Vec<Monomial>> {
    check_spectrum_mono(ctx, a)?;
    let coef = p.coefficients(ctx)?;
    let mut out = Vec::with_capacity(coef.len());
    let mut pow = Monomial::identity(a.dim());
    for (k, c) in coef.iter().enumerate() {
        if k > 0 {
            pow = pow.mul(a);
        }
        out.push(pow.scale(*c));
    }
    Ok(out)
}

/// Eigenvalue multiplicities of a monomial `A` with `A^N = −id` on `λ_n = −ω^n`.
pub fn spectrum_multiplicities(ctx: &Context, a: &Monomial) -> Result<Vec<usize>> {
    check_spectrum_mono(ctx, a)?;
    let n = ctx.n();
    let mut traces = Vec::with_capacity(n);
    let mut pow = Monomial::identity(a.dim());
    for _ in 0..n {
        traces.push(pow.trace());
        pow = pow.mul(a);
    }
    let mut out = Vec::with_capacity(n);
    for m in 0..n {
        let lam = -ctx.w(m as i64);
        let s: C64 = traces
            .iter()
            .enumerate()
            .map(|(k, t)| t / lam.powi(k as i32))
            .sum();
        let v = s.re / n as f64;
        let r = v.round();
        if (v - r).abs() > 1e-6 || r < 0.0 {
            return Err(Error::Spectrum(format!("non-integral multiplicity {v}")));
        }
        out.push(r as usize);
    }
    Ok(out)
}

/// `log det Ψ_{a,b,c}(A)` from the spectrum of a monomial `A`.
pub fn log_det_monomial(ctx: &Context, p: &CyclicDilogParams, a: &Monomial) -> Result<C64> {
    let mult = spectrum_multiplicities(ctx, a)?;
    let mut acc = zero();
    for (m, k) in mult.iter().enumerate() {
        if *k == 0 {
            continue;
        }
        let v = p.value(ctx, -ctx.w(m as i64))?;
        if v.norm() == 0.0 {
            return Err(singular("Ψ has a zero eigenvalue"));
        }
        acc += v.ln() * *k as f64;
    }
    Ok(acc)
}

/// `U = −Y`, `V = −Z^{−1}`: `U^N = V^N = −id` and `UV = ωVU`.
pub fn anticyclic_pair_mono(ctx: &Context) -> (Monomial, Monomial) {
    let u = mono_y(ctx).scale(-one());
    let v = mono_z(ctx).inverse().scale(-one());
    (u, v)
}

pub fn make_anticyclic_pair(ctx: &Context) -> Result<(CMat, CMat)> {
    let (um, vm) = anticyclic_pair_mono(ctx);
    let (u, v) = (um.to_dense(), vm.to_dense());
    check_spectrum(ctx, &u)?;
    check_spectrum(ctx, &v)?;
    let res = mat_residual(&(&u * &v), &((&v * &u) * ctx.omega()), ctx.tol_abs);
    if res > ctx.tol_rel {
        return Err(Error::Validation {
            location: "anticyclic pair".into(),
            message: format!("UV − ωVU residual {res:.3e}"),
        });
    }
    Ok((u, v))
}

/// `Ψ(ω^{−1}A)Ψ(A)^{−1}` against `(c − aA)/b`.
pub fn functional_identity_residual(ctx: &Context, p: &CyclicDilogParams, a: &CMat) -> Result<f64> {
    let shifted = cyclic_dilog_op(ctx, p, &(a * ctx.w(-1)))?;
    let base = cyclic_dilog_op(ctx, p, a)?;
    let inv = crate::linalg::inverse(&base)?;
    let lhs = shifted * inv;
    let rhs = (eye(a.nrows()) * p.c - a * p.a) / p.b;
    Ok(mat_residual(&lhs, &rhs, ctx.tol_abs))
}

/// Five parameter sets `(x_i, 1, y_i)` of the five-term identity.
#[derive(Clone, Debug, PartialEq)]
pub struct Thm410Params {
    pub params: [CyclicDilogParams; 5],
}

impl Thm410Params {
    pub fn xs(&self) -> [C64; 5] {
        self.params.map(|p| p.a)
    }

    pub fn ys(&self) -> [C64; 5] {
        self.params.map(|p| p.c)
    }

    /// Residuals of `y_0 y_2 = y_1 y_4`, `y_1 = y_2 y_3`, `x_3 = x_0 x_1`, `x_2 = x_1 y_4`, `x_4 = x_0 y_2`.
    pub fn relation_residuals(&self, tol_abs: f64) -> [f64; 5] {
        let (x, y) = (self.xs(), self.ys());
        [
            scalar_residual(y[0] * y[2], y[1] * y[4], tol_abs),
            scalar_residual(y[1], y[2] * y[3], tol_abs),
            scalar_residual(x[3], x[0] * x[1], tol_abs),
            scalar_residual(x[2], x[1] * y[4], tol_abs),
            scalar_residual(x[4], x[0] * y[2], tol_abs),
        ]
    }
}

/// Completes `x_0, x_1` to the five parameter sets; `y_0, y_1, y_3` are principal
/// roots of `1 − x^N`, the rest follow from the multiplicative relations.
pub fn solve_thm410_params(ctx: &Context, x0: C64, x1: C64) -> Result<Thm410Params> {
    let root = |x: C64| ctx.principal_root(1.0 - ctx.xn(x));
    let x3 = x0 * x1;
    let (y0, y1, y3) = (root(x0), root(x1), root(x3));
    if y3.norm() < ctx.tol_abs {
        return Err(domain("1 − (x_0 x_1)^N vanishes"));
    }
    let y2 = y1 / y3;
    let y4 = y0 / y3;
    let x2 = x1 * y4;
    let x4 = x0 * y2;
    let one = one();
    let mk = |x: C64, y: C64| CyclicDilogParams::new(ctx, x, one, y);
    let params = [
        mk(x0, y0)?,
        mk(x1, y1)?,
        mk(x2, y2)?,
        mk(x3, y3)?,
        mk(x4, y4)?,
    ];
    for p in &params {
        p.coefficients(ctx)?;
    }
    Ok(Thm410Params { params })
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Thm410Report {
    pub residual: f64,
    pub det_residual: f64,
    pub h3: C64,
}

/// `Ψ_0(V)Ψ_1(U) = Ψ_2(U)Ψ_3(−UV)Ψ_4(V)` with `h_3` fixed by equal determinants.
pub fn verify_thm410(ctx: &Context, tp: &Thm410Params, u: &CMat, v: &CMat) -> Result<Thm410Report> {
    let [p0, p1, p2, p3, p4] = tp.params;
    let uv = -(u * v);
    let lhs = cyclic_dilog_op(ctx, &p0, v)? * cyclic_dilog_op(ctx, &p1, u)?;
    let rhs = cyclic_dilog_op(ctx, &p2, u)?
        * cyclic_dilog_op(ctx, &p3, &uv)?
        * cyclic_dilog_op(ctx, &p4, v)?;
    let ratio = lhs.clone().determinant() / rhs.clone().determinant();
    let mut best: Option<Thm410Report> = None;
    for h3 in ctx.nth_roots(ratio)? {
        let scaled = &rhs * h3;
        let residual = mat_residual(&lhs, &scaled, ctx.tol_abs);
        let det_residual = scalar_residual(
            lhs.clone().determinant() / scaled.determinant(),
            one(),
            ctx.tol_abs,
        );
        if best.is_none_or(|b| residual < b.residual) {
            best = Some(Thm410Report {
                residual,
                det_residual,
                h3,
            });
        }
    }
    best.ok_or_else(|| domain("no root of the determinant ratio"))
}

/// `Υ = (1/N) Σ_{i,j} ω^{ij} Z_1^{−i} Y_2^j`, literal double sum.
pub fn upsilon(ctx: &Context) -> CMat {
    let n = ctx.n();
    let (z, y) = (mono_z(ctx), mono_y(ctx));
    let mut out = CMat::zeros(n * n, n * n);
    for i in 0..n as i64 {
        let zi = mono_pow(&z, -i);
        for j in 0..n as i64 {
            let term = zi.kron(&mono_pow(&y, j));
            term.add_into(&mut out, ctx.w(i * j) / n as f64);
        }
    }
    out
}

/// `Σ_i Z_1^{−i} Ŷ_2^i` with `Ŷ^i = (1/N) Σ_k ω^{ik} Y^k`.
pub fn upsilon_hat_form(ctx: &Context) -> CMat {
    let n = ctx.n();
    let (z, y) = (mono_z(ctx), mono_y(ctx));
    let mut out = CMat::zeros(n * n, n * n);
    for i in 0..n as i64 {
        let mut yhat = CMat::zeros(n, n);
        for k in 0..n as i64 {
            mono_pow(&y, k).add_into(&mut yhat, ctx.w(i * k) / n as f64);
        }
        out += crate::linalg::kron(&mono_pow(&z, -i).to_dense(), &yhat);
    }
    out
}

/// `Υ(v_k ⊗ v_l) = v_k ⊗ Y^k v_l` as a monomial matrix.
pub fn upsilon_mono(ctx: &Context) -> Monomial {
    let n = ctx.n();
    let mut target = Vec::with_capacity(n * n);
    let mut coef = Vec::with_capacity(n * n);
    for k in 0..n {
        for l in 0..n {
            target.push(k * n + (l + k) % n);
            let e = (k * k) as i64;
            coef.push(ctx.omega_pow(e, 1) * ctx.w((k * l) as i64));
        }
    }
    Monomial { target, coef }
}

/// Closed form `(Υ^{−1})^{k,l}_{i,j} = ω^{−k²/2 − kj} δ(i − k) δ(j + k − l)`.
pub fn upsilon_inverse_closed(ctx: &Context) -> CMat {
    let n = ctx.n();
    let mut out = CMat::zeros(n * n, n * n);
    for k in 0..n {
        for l in 0..n {
            let j = ctx.modn(l as i64 - k as i64);
            let e = -((k * k) as i64);
            out[(k * n + j, k * n + l)] = ctx.omega_pow(e, 1) * ctx.w(-((k * j) as i64));
        }
    }
    out
}

/// `Υ_12 Υ_13 Υ_23` against `Υ_23 Υ_12` on `V^{⊗3}`.
pub fn upsilon_pentagon_residual(ctx: &Context) -> f64 {
    let n = ctx.n();
    let u = upsilon_mono(ctx);
    let (u12, u13, u23) = (
        embed_monomial(&u, Legs::L12, n),
        embed_monomial(&u, Legs::L13, n),
        embed_monomial(&u, Legs::L23, n),
    );
    let lhs = u12.mul(&u13).mul(&u23).to_dense();
    let rhs = u23.mul(&u12).to_dense();
    mat_residual(&lhs, &rhs, ctx.tol_abs)
}

/// N-th roots of a log-determinant ratio spread over `dim` eigenvalues: the root
/// of `exp(log_ratio)` of order `dim` closest to `estimate`.
pub fn nearest_root_of_log(log_ratio: C64, dim: usize, estimate: C64) -> C64 {
    let base = log_ratio / dim as f64;
    let step = 2.0 * PI / dim as f64;
    let target = if estimate.norm() > 0.0 {
        estimate.arg()
    } else {
        base.im
    };
    let k = ((target - base.im) / step).round();
    (base + C64::new(0.0, k * step)).exp()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::inverse;
    use crate::special_functions::{omega_fermat, FermatTriple};

    fn params(ctx: &Context, a: C64, c: C64) -> CyclicDilogParams {
        let b = ctx.principal_root(ctx.xn(a) + ctx.xn(c));
        CyclicDilogParams::new(ctx, a, b, c).unwrap()
    }

    #[test]
    fn rejects_off_constraint() {
        let ctx = Context::new(3).unwrap();
        let o = one();
        assert!(CyclicDilogParams::new(&ctx, o, o, o).is_err());
        let b = ctx.principal_root(C64::new(2.0, 0.0));
        assert!(CyclicDilogParams::new(&ctx, o, b, o).is_ok());
    }

    #[test]
    fn anticyclic_pair_checks() {
        for n in [3, 5, 7, 9] {
            let ctx = Context::new(n).unwrap();
            let (u, v) = make_anticyclic_pair(&ctx).unwrap();
            let vu_inv = inverse(&(&v * &u)).unwrap();
            assert!(
                mat_residual(&(&u * &v * vu_inv), &(eye(n as usize) * ctx.omega()), 1e-12) < 1e-12
            );
            let (um, vm) = anticyclic_pair_mono(&ctx);
            assert_eq!(
                spectrum_multiplicities(&ctx, &um).unwrap(),
                vec![1; n as usize]
            );
            assert_eq!(
                spectrum_multiplicities(&ctx, &vm).unwrap(),
                vec![1; n as usize]
            );
        }
    }

    #[test]
    fn spectrum_check_rejects() {
        let ctx = Context::new(3).unwrap();
        let p = params(&ctx, C64::new(0.4, 0.2), C64::new(1.1, -0.3));
        assert!(matches!(
            cyclic_dilog_op(&ctx, &p, &eye(3)),
            Err(Error::Spectrum(_))
        ));
    }

    #[test]
    fn leading_term_is_identity() {
        let ctx = Context::new(5).unwrap();
        let p = params(&ctx, C64::new(0.4, 0.2), C64::new(1.1, -0.3));
        let coef = p.coefficients(&ctx).unwrap();
        assert_eq!(coef[0], one());
    }

    #[test]
    fn functional_identity_on_pair() {
        for n in [3, 5, 7] {
            let ctx = Context::new(n).unwrap();
            let (u, v) = make_anticyclic_pair(&ctx).unwrap();
            let p = params(&ctx, C64::new(0.7, -0.4), C64::new(0.9, 0.6));
            assert!(functional_identity_residual(&ctx, &p, &u).unwrap() < 1e-10);
            assert!(functional_identity_residual(&ctx, &p, &v).unwrap() < 1e-10);
        }
    }

    #[test]
    fn spectrum_ratios_are_omega_functions() {
        let ctx = Context::new(5).unwrap();
        let p = params(&ctx, C64::new(0.7, -0.4), C64::new(0.9, 0.6));
        let a = CMat::from_diagonal(&nalgebra::DVector::from_fn(5, |i, _| -ctx.w(i as i64)));
        let psi = cyclic_dilog_op(&ctx, &p, &a).unwrap();
        let t = FermatTriple::new(&ctx, -p.a, p.b, p.c).unwrap();
        for k in 0..5 {
            let ratio = psi[(k, k)] / psi[(0, 0)];
            let expected = omega_fermat(&ctx, &t, k as i64).unwrap();
            assert!(scalar_residual(ratio, expected, 1e-12) < 1e-11);
        }
    }

    #[test]
    fn log_det_matches_dense() {
        let ctx = Context::new(5).unwrap();
        let p = params(&ctx, C64::new(0.7, -0.4), C64::new(0.9, 0.6));
        let (u, _) = anticyclic_pair_mono(&ctx);
        let dense = cyclic_dilog_op(&ctx, &p, &u.to_dense())
            .unwrap()
            .determinant();
        let ld = log_det_monomial(&ctx, &p, &u).unwrap();
        assert!(scalar_residual(ld.exp(), dense, 1e-12) < 1e-10);
    }

    #[test]
    fn five_term_identity() {
        for n in [3, 5, 7] {
            let ctx = Context::new(n).unwrap();
            let (u, v) = make_anticyclic_pair(&ctx).unwrap();
            let tp = solve_thm410_params(&ctx, C64::new(0.3, 0.2), C64::new(-0.25, 0.35)).unwrap();
            assert!(tp.relation_residuals(1e-12).iter().all(|r| *r < 1e-12));
            let rep = verify_thm410(&ctx, &tp, &u, &v).unwrap();
            assert!(rep.residual < 1e-8, "N={n}: {}", rep.residual);
            assert!(rep.det_residual < 1e-8);
        }
    }

    #[test]
    fn upsilon_forms_agree() {
        for n in [3, 5, 7] {
            let ctx = Context::new(n).unwrap();
            let lit = upsilon(&ctx);
            assert!(mat_residual(&upsilon_hat_form(&ctx), &lit, 1e-12) < 1e-12);
            assert!(mat_residual(&upsilon_mono(&ctx).to_dense(), &lit, 1e-12) < 1e-12);
            let prod = &lit * upsilon_inverse_closed(&ctx);
            let nn = (n * n) as usize;
            assert!(mat_residual(&prod, &eye(nn), 1e-12) < 1e-12);
            assert!(upsilon_pentagon_residual(&ctx) < 1e-12);
        }
    }

    #[test]
    fn nearest_root_picks_branch() {
        let target = C64::from_polar(2.0, 0.7);
        let log_ratio = (target.powi(9)).ln();
        let got = nearest_root_of_log(log_ratio, 9, target * 1.01);
        assert!((got - target).norm() < 1e-12);
    }
}
