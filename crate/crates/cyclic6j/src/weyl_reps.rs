//! Standard cyclic representations of the Weyl algebra, fusion, involutions,
//! the Borel parametrization Ψ and the normal representations.

use crate::core_numerics::{cut_distance, root_distance, scalar_residual, Context, C64};
use crate::error::{domain, Error, Result};
use crate::linalg::{kron, mat_residual, CMat, Monomial};
use crate::special_functions::r_func;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

/// Minimum distance kept between branch-function arguments and the cut rays or poles.
pub const CUT_MARGIN: f64 = 0.05;

/// Parameters of `ρ(E) = a²Z`, `ρ(D) = ayX`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct StandardRep {
    pub a: C64,
    pub y: C64,
}

#[derive(Serialize, Deserialize)]
struct RepJson {
    a: [f64; 2],
    y: [f64; 2],
}

impl Serialize for StandardRep {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        RepJson {
            a: [self.a.re, self.a.im],
            y: [self.y.re, self.y.im],
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for StandardRep {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let r = RepJson::deserialize(d)?;
        Ok(StandardRep {
            a: C64::new(r.a[0], r.a[1]),
            y: C64::new(r.y[0], r.y[1]),
        })
    }
}

impl StandardRep {
    pub fn new(ctx: &Context, a: C64, y: C64) -> Result<Self> {
        if a.norm() < ctx.tol_abs || y.norm() < ctx.tol_abs {
            return Err(domain("standard representation needs a ≠ 0 and y ≠ 0"));
        }
        Ok(StandardRep { a, y })
    }

    pub fn inverse(&self) -> Self {
        StandardRep {
            a: 1.0 / self.a,
            y: -self.y,
        }
    }

    pub fn conjugate(&self) -> Self {
        StandardRep {
            a: self.a.conj(),
            y: self.y.conj(),
        }
    }
}

pub fn inverse_rep(rho: &StandardRep) -> StandardRep {
    rho.inverse()
}

pub fn conjugate_rep(rho: &StandardRep) -> StandardRep {
    rho.conjugate()
}

/// Upper-triangular `[[t, x], [0, 1/t]]`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct BorelElement {
    pub t: C64,
    pub x: C64,
}

#[derive(Serialize, Deserialize)]
struct BorelJson {
    t: [f64; 2],
    x: [f64; 2],
}

impl Serialize for BorelElement {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        BorelJson {
            t: [self.t.re, self.t.im],
            x: [self.x.re, self.x.im],
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for BorelElement {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let b = BorelJson::deserialize(d)?;
        Ok(BorelElement {
            t: C64::new(b.t[0], b.t[1]),
            x: C64::new(b.x[0], b.x[1]),
        })
    }
}

impl BorelElement {
    pub fn new(t: C64, x: C64) -> Result<Self> {
        if t.norm() == 0.0 {
            return Err(domain("Borel element needs t ≠ 0"));
        }
        Ok(BorelElement { t, x })
    }

    pub fn mul(&self, o: &BorelElement) -> BorelElement {
        BorelElement {
            t: self.t * o.t,
            x: self.t * o.x + self.x / o.t,
        }
    }

    pub fn inverse(&self) -> BorelElement {
        BorelElement {
            t: 1.0 / self.t,
            x: -self.x,
        }
    }

    pub fn entries(&self) -> [[C64; 2]; 2] {
        [[self.t, self.x], [C64::new(0.0, 0.0), 1.0 / self.t]]
    }

    pub fn distance(&self, o: &BorelElement) -> f64 {
        let (a, b) = (self.entries(), o.entries());
        let mut num: f64 = 0.0;
        let mut den: f64 = 0.0;
        for i in 0..2 {
            for j in 0..2 {
                num = num.max((a[i][j] - b[i][j]).norm());
                den = den.max(b[i][j].norm());
            }
        }
        num / den
    }
}

/// `Ψ(ρ) = [[a^N, y^N], [0, a^{−N}]]`.
pub fn psi_param(ctx: &Context, rho: &StandardRep) -> BorelElement {
    BorelElement {
        t: ctx.xn(rho.a),
        x: ctx.xn(rho.y),
    }
}

pub fn mono_z(ctx: &Context) -> Monomial {
    let n = ctx.n();
    Monomial {
        target: (0..n).collect(),
        coef: (0..n).map(|i| ctx.w(i as i64)).collect(),
    }
}

pub fn mono_x(ctx: &Context) -> Monomial {
    let n = ctx.n();
    Monomial {
        target: (0..n).map(|j| (j + 1) % n).collect(),
        coef: vec![C64::new(1.0, 0.0); n],
    }
}

/// `Y = ω^{1/2} X Z`.
pub fn mono_y(ctx: &Context) -> Monomial {
    mono_x(ctx).mul(&mono_z(ctx)).scale(ctx.omega_half())
}

/// Signed power of a monomial matrix.
pub fn mono_pow(m: &Monomial, k: i64) -> Monomial {
    if k >= 0 {
        m.pow(k as usize)
    } else {
        m.inverse().pow((-k) as usize)
    }
}

pub fn mat_z(ctx: &Context) -> CMat {
    mono_z(ctx).to_dense()
}

pub fn mat_x(ctx: &Context) -> CMat {
    mono_x(ctx).to_dense()
}

pub fn mat_y(ctx: &Context) -> CMat {
    mono_y(ctx).to_dense()
}

pub fn rep_e(ctx: &Context, rho: &StandardRep) -> CMat {
    mat_z(ctx) * (rho.a * rho.a)
}

pub fn rep_d(ctx: &Context, rho: &StandardRep) -> CMat {
    mat_x(ctx) * (rho.a * rho.y)
}

/// `Δ(E) = E ⊗ E` on `V_ρ ⊗ V_μ`.
pub fn tensor_e(ctx: &Context, rho: &StandardRep, mu: &StandardRep) -> CMat {
    kron(&rep_e(ctx, rho), &rep_e(ctx, mu))
}

/// `Δ(D) = E ⊗ D + D ⊗ 1` on `V_ρ ⊗ V_μ`.
pub fn tensor_d(ctx: &Context, rho: &StandardRep, mu: &StandardRep) -> CMat {
    let id = CMat::identity(ctx.n(), ctx.n());
    kron(&rep_e(ctx, rho), &rep_d(ctx, mu)) + kron(&rep_d(ctx, rho), &id)
}

/// `a_ρ^N y_μ^N + y_ρ^N a_μ^{−N}`, the N-th power of the fused `y`.
pub fn fused_y_power(ctx: &Context, rho: &StandardRep, mu: &StandardRep) -> C64 {
    ctx.xn(rho.a) * ctx.xn(mu.y) + ctx.xn(rho.y) / ctx.xn(mu.a)
}

pub fn is_regular_pair(ctx: &Context, rho: &StandardRep, mu: &StandardRep) -> bool {
    let t1 = ctx.xn(rho.a) * ctx.xn(mu.y);
    let t2 = ctx.xn(rho.y) / ctx.xn(mu.a);
    (t1 + t2).norm() >= ctx.tol_abs * t1.norm().max(t2.norm())
}

pub fn fuse(
    ctx: &Context,
    rho: &StandardRep,
    mu: &StandardRep,
    branch: usize,
) -> Result<StandardRep> {
    if !is_regular_pair(ctx, rho, mu) {
        return Err(Error::NotRegular("D^N vanishes on the product".into()));
    }
    Ok(StandardRep {
        a: rho.a * mu.a,
        y: ctx.root_branch(fused_y_power(ctx, rho, mu), branch % ctx.n()),
    })
}

/// Branch index `k` with `fused.y = ω^k · principal root`, read back from parameters.
pub fn infer_branch(
    ctx: &Context,
    rho: &StandardRep,
    mu: &StandardRep,
    fused: &StandardRep,
) -> usize {
    let base = ctx.principal_root(fused_y_power(ctx, rho, mu));
    (0..ctx.n())
        .min_by(|&i, &j| {
            let di = (fused.y - base * ctx.w(i as i64)).norm();
            let dj = (fused.y - base * ctx.w(j as i64)).norm();
            di.total_cmp(&dj)
        })
        .unwrap_or(0)
}

/// Matrices `(E, D, Ē, D̄)` of a normal representation.
#[derive(Clone, Debug)]
pub struct NormalRep {
    pub e: CMat,
    pub d: CMat,
    pub ebar: CMat,
    pub dbar: CMat,
}

impl NormalRep {
    /// Largest residual of the six defining relations at `q = ω^{−1}`.
    pub fn relation_residual(&self, ctx: &Context) -> f64 {
        let q = ctx.w(-1);
        let (e, d, eb, db) = (&self.e, &self.d, &self.ebar, &self.dbar);
        let t = ctx.tol_abs;
        [
            mat_residual(&(d * e), &((e * d) * q), t),
            mat_residual(&(db * eb), &((eb * db) * q), t),
            mat_residual(&(e * eb), &((eb * e) * q), t),
            mat_residual(&(e * db), &((db * e) * q), t),
            mat_residual(&(d * eb), &(eb * d), t),
            mat_residual(&(d * db - db * d), &(e * (1.0 - q)), t),
        ]
        .into_iter()
        .fold(0.0, f64::max)
    }
}

pub fn normal_rep(ctx: &Context, rho: &StandardRep) -> NormalRep {
    let (a, y) = (rho.a, rho.y);
    let z = mono_z(ctx);
    let ym = mono_y(ctx);
    NormalRep {
        e: z.inverse().to_dense() * (1.0 / (a * a)),
        d: ym.inverse().to_dense() * (-y / a),
        ebar: ym.to_dense() * (1.0 / (a * a)),
        dbar: mat_x(ctx) * (ctx.omega_pow(-1, 1) / (a * y)),
    }
}

/// Distance of `y_ρμ/(a_ρ y_μ)` to the roots of unity and the cut rays.
pub fn pair_margin(
    ctx: &Context,
    rho: &StandardRep,
    mu: &StandardRep,
    rho_mu: &StandardRep,
) -> f64 {
    let x = rho_mu.y / (rho.a * mu.y);
    cut_distance(ctx, x).min(root_distance(ctx, x))
}

/// Three representations with their pairwise and triple fusions.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FusedTriple {
    pub rho: StandardRep,
    pub mu: StandardRep,
    pub nu: StandardRep,
    pub rho_mu: StandardRep,
    pub mu_nu: StandardRep,
    pub rho_mu_nu: StandardRep,
    pub branches: [usize; 3],
}

impl FusedTriple {
    pub fn with_branches(
        ctx: &Context,
        rho: &StandardRep,
        mu: &StandardRep,
        nu: &StandardRep,
        branches: [usize; 3],
    ) -> Result<Self> {
        let rho_mu = fuse(ctx, rho, mu, branches[0])?;
        let mu_nu = fuse(ctx, mu, nu, branches[1])?;
        let rho_mu_nu = fuse(ctx, &rho_mu, nu, branches[2])?;
        Ok(FusedTriple {
            rho: *rho,
            mu: *mu,
            nu: *nu,
            rho_mu,
            mu_nu,
            rho_mu_nu,
            branches,
        })
    }

    /// Triple assembled from already fused parameters.
    pub fn from_parts(reps: [StandardRep; 6], branches: [usize; 3]) -> Self {
        FusedTriple {
            rho: reps[0],
            mu: reps[1],
            nu: reps[2],
            rho_mu: reps[3],
            mu_nu: reps[4],
            rho_mu_nu: reps[5],
            branches,
        }
    }

    /// Triple assembled from parameters, with branch indices read back.
    pub fn from_reps(ctx: &Context, reps: [StandardRep; 6]) -> Self {
        let [rho, mu, nu, rho_mu, mu_nu, rho_mu_nu] = reps;
        let branches = [
            infer_branch(ctx, &rho, &mu, &rho_mu),
            infer_branch(ctx, &mu, &nu, &mu_nu),
            infer_branch(ctx, &rho_mu, &nu, &rho_mu_nu),
        ];
        FusedTriple::from_parts(reps, branches)
    }

    pub fn reps(&self) -> [StandardRep; 6] {
        [
            self.rho,
            self.mu,
            self.nu,
            self.rho_mu,
            self.mu_nu,
            self.rho_mu_nu,
        ]
    }

    /// `(y_ρμν y_μ, y_ρ y_ν, y_ρμ y_μν)`, a point of the Fermat curve.
    pub fn fermat_args(&self) -> (C64, C64, C64) {
        (
            self.rho_mu_nu.y * self.mu.y,
            self.rho.y * self.nu.y,
            self.rho_mu.y * self.mu_nu.y,
        )
    }

    /// Argument `y_ρμ y_μν / (y_ρμν y_μ)` of `r`, `g` and `h`.
    pub fn cut_arg(&self) -> C64 {
        let (x, _, z) = self.fermat_args();
        z / x
    }

    pub fn convention_residual(&self, ctx: &Context) -> f64 {
        let lhs = -self.rho.y * self.nu.y / (self.rho_mu_nu.y * self.mu.y);
        match r_func(ctx, self.cut_arg()) {
            Ok(rhs) => scalar_residual(rhs, lhs, ctx.tol_abs),
            Err(_) => f64::INFINITY,
        }
    }

    pub fn fermat_residual(&self, ctx: &Context) -> f64 {
        let (x, y, z) = self.fermat_args();
        let lhs = ctx.xn(z) - ctx.xn(x);
        scalar_residual(lhs, ctx.xn(y), ctx.tol_abs)
    }

    /// Smallest distance of the branch argument to a cut ray or a root of unity.
    pub fn margin(&self, ctx: &Context) -> f64 {
        let x = self.cut_arg();
        cut_distance(ctx, x).min(root_distance(ctx, x))
    }

    /// Smallest [`pair_margin`] over the four fusions.
    pub fn pair_margins(&self, ctx: &Context) -> f64 {
        [
            pair_margin(ctx, &self.rho, &self.mu, &self.rho_mu),
            pair_margin(ctx, &self.mu, &self.nu, &self.mu_nu),
            pair_margin(ctx, &self.rho_mu, &self.nu, &self.rho_mu_nu),
            pair_margin(ctx, &self.rho, &self.mu_nu, &self.rho_mu_nu),
        ]
        .into_iter()
        .fold(f64::INFINITY, f64::min)
    }

    pub fn is_admissible(&self, ctx: &Context) -> bool {
        self.convention_residual(ctx) < ctx.tol_rel && self.margin(ctx) >= CUT_MARGIN
    }

    pub fn conjugate(&self, ctx: &Context) -> FusedTriple {
        let r = self.reps().map(|r| r.conjugate());
        let b = self.branches.map(|b| ctx.modn(-(b as i64)));
        FusedTriple::from_parts(r, b)
    }
}

/// First branch triple in lexicographic order accepted by `accept`.
pub fn fuse_triple_search(
    ctx: &Context,
    rho: &StandardRep,
    mu: &StandardRep,
    nu: &StandardRep,
    accept: impl Fn(&FusedTriple) -> bool,
) -> Result<FusedTriple> {
    for p in [(rho, mu), (mu, nu)] {
        if !is_regular_pair(ctx, p.0, p.1) {
            return Err(Error::NotRegular(
                "pair in the triple is not regular".into(),
            ));
        }
    }
    let n = ctx.n();
    for b1 in 0..n {
        for b2 in 0..n {
            for b3 in 0..n {
                let t = FusedTriple::with_branches(ctx, rho, mu, nu, [b1, b2, b3])?;
                if t.is_admissible(ctx) && accept(&t) {
                    return Ok(t);
                }
            }
        }
    }
    Err(Error::NoAdmissibleBranch(
        "no branch triple satisfies the sign convention off the cuts".into(),
    ))
}

pub fn fuse_triple_admissible(
    ctx: &Context,
    rho: &StandardRep,
    mu: &StandardRep,
    nu: &StandardRep,
) -> Result<FusedTriple> {
    fuse_triple_search(ctx, rho, mu, nu, |_| true)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{eye, mat_residual};

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    fn rep(a: C64, y: C64) -> StandardRep {
        StandardRep { a, y }
    }

    #[test]
    fn matrices_n3() {
        let ctx = Context::new(3).unwrap();
        let z = mat_z(&ctx);
        assert_eq!(z[(1, 1)], ctx.omega());
        let x = mat_x(&ctx);
        assert_eq!(x[(1, 0)], c(1.0, 0.0));
        assert_eq!(x[(2, 1)], c(1.0, 0.0));
        assert_eq!(x[(0, 2)], c(1.0, 0.0));
        let y = mat_y(&ctx);
        for j in 0..3 {
            let expected = ctx.omega_half() * ctx.w(j as i64);
            assert!((y[((j + 1) % 3, j)] - expected).norm() < 1e-15);
        }
        let ypow = mono_y(&ctx).pow(3).to_dense();
        assert!(mat_residual(&ypow, &eye(3), 1e-12) < 1e-14);
    }

    #[test]
    fn rep_examples() {
        let ctx = Context::new(5).unwrap();
        let unit = rep(c(1.0, 0.0), c(1.0, 0.0));
        assert_eq!(rep_e(&ctx, &unit), mat_z(&ctx));
        assert_eq!(rep_d(&ctx, &unit), mat_x(&ctx));
        let r = rep(c(0.8, 0.3), c(-1.1, 0.4));
        let e = rep_e(&ctx, &r);
        let d = rep_d(&ctx, &r);
        assert!(mat_residual(&(&e * &d), &((&d * &e) * ctx.omega()), 1e-12) < 1e-14);
    }

    #[test]
    fn involutions() {
        let r = rep(c(2.0, 0.0), c(0.0, 3.0));
        assert_eq!(r.inverse(), rep(c(0.5, 0.0), c(0.0, -3.0)));
        assert_eq!(r.conjugate(), rep(c(2.0, 0.0), c(0.0, -3.0)));
        assert_eq!(r.inverse().inverse(), r);
        assert_eq!(r.conjugate().conjugate(), r);
    }

    #[test]
    fn regularity_examples() {
        let ctx = Context::new(3).unwrap();
        let unit = rep(c(1.0, 0.0), c(1.0, 0.0));
        assert!(is_regular_pair(&ctx, &unit, &unit));
        let r = rep(c(0.7, 0.2), c(1.2, -0.5));
        assert!(!is_regular_pair(&ctx, &r, &r.inverse()));
        assert!(fuse(&ctx, &r, &r.inverse(), 0).is_err());
        let f = fuse(&ctx, &unit, &unit, 1).unwrap();
        assert!((f.y - ctx.omega() * 2f64.powf(1.0 / 3.0)).norm() < 1e-15);
    }

    #[test]
    fn psi_examples() {
        let ctx = Context::new(3).unwrap();
        let unit = rep(c(1.0, 0.0), c(1.0, 0.0));
        let p = psi_param(&ctx, &unit);
        assert_eq!(
            p,
            BorelElement {
                t: c(1.0, 0.0),
                x: c(1.0, 0.0)
            }
        );
    }

    #[test]
    fn serde_round_trip() {
        let r = rep(c(2.0, -1.0), c(0.5, 3.0));
        let s = serde_json::to_string(&r).unwrap();
        assert_eq!(s, r#"{"a":[2.0,-1.0],"y":[0.5,3.0]}"#);
        let back: StandardRep = serde_json::from_str(&s).unwrap();
        assert_eq!(back, r);
        let b = BorelElement {
            t: c(1.0, 0.0),
            x: c(0.0, 2.0),
        };
        let back: BorelElement = serde_json::from_str(&serde_json::to_string(&b).unwrap()).unwrap();
        assert_eq!(back, b);
    }

    #[test]
    fn normal_rep_relations() {
        for n in [3, 5, 7] {
            let ctx = Context::new(n).unwrap();
            let nr = normal_rep(&ctx, &rep(c(0.9, -0.4), c(1.3, 0.7)));
            let q = ctx.w(-1);
            let (e, d, eb, db) = (&nr.e, &nr.d, &nr.ebar, &nr.dbar);
            assert!(mat_residual(&(d * e), &((e * d) * q), 1e-12) < 1e-12);
            assert!(mat_residual(&(db * eb), &((eb * db) * q), 1e-12) < 1e-12);
            assert!(mat_residual(&(e * eb), &((eb * e) * q), 1e-12) < 1e-12);
            assert!(mat_residual(&(e * db), &((db * e) * q), 1e-12) < 1e-12);
            assert!(mat_residual(&(d * eb), &(eb * d), 1e-12) < 1e-12);
            let comm = d * db - db * d;
            assert!(mat_residual(&comm, &(e * (1.0 - q)), 1e-12) < 1e-12);
            assert!(nr.relation_residual(&ctx) < 1e-12);
        }
    }

    #[test]
    fn coproduct_scalars() {
        let ctx = Context::new(5).unwrap();
        let r = rep(c(0.8, 0.3), c(-1.1, 0.4));
        let m = rep(c(1.2, -0.5), c(0.6, 0.9));
        let te = tensor_e(&ctx, &r, &m);
        let td = tensor_d(&ctx, &r, &m);
        assert!(mat_residual(&(&te * &td), &((&td * &te) * ctx.omega()), 1e-12) < 1e-13);
        let dn = crate::linalg::mat_pow(&td, 5);
        let s = ctx.xn(r.a * m.a) * fused_y_power(&ctx, &r, &m);
        assert!(mat_residual(&dn, &(eye(25) * s), 1e-12) < 1e-12);
        let en = crate::linalg::mat_pow(&rep_e(&ctx, &r), 5);
        assert!(mat_residual(&en, &(eye(5) * r.a.powi(10)), 1e-12) < 1e-13);
    }

    #[test]
    fn psi_is_multiplicative_for_every_branch() {
        let ctx = Context::new(7).unwrap();
        let r = rep(c(0.8, 0.3), c(-1.1, 0.4));
        let m = rep(c(1.2, -0.5), c(0.6, 0.9));
        let prod = psi_param(&ctx, &r).mul(&psi_param(&ctx, &m));
        for b in 0..7 {
            let f = fuse(&ctx, &r, &m, b).unwrap();
            assert!(psi_param(&ctx, &f).distance(&prod) < 1e-12);
        }
    }

    #[test]
    fn admissible_triple_invariants() {
        let ctx = Context::new(5).unwrap();
        let r = rep(c(0.8, 0.3), c(-1.1, 0.4));
        let m = rep(c(1.2, -0.5), c(0.6, 0.9));
        let v = rep(c(0.7, 0.7), c(1.4, -0.2));
        let t = fuse_triple_admissible(&ctx, &r, &m, &v).unwrap();
        assert!(t.convention_residual(&ctx) < 1e-9);
        assert!(t.fermat_residual(&ctx) < 1e-12);
        assert!(t.margin(&ctx) >= CUT_MARGIN);
        assert_eq!(t.rho_mu_nu.a, r.a * m.a * v.a);
    }
}
