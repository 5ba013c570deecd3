//! Clebsch-Gordan operator families, 6j-symbol tensors and the relations
//! between them: duality, intertwining, factorization through `Υ`, the
//! recoupling decomposition and the pentagon.

use crate::core_numerics::{rel_residual, scalar_residual, Context, C64};
use crate::cyclic_dilog::{
    cyclic_dilog_terms, log_det_monomial, nearest_root_of_log, upsilon, upsilon_pentagon_residual,
    CyclicDilogParams,
};
use crate::error::{domain, Error, Result};
use crate::linalg::{
    apply_leg, embed, expand_product, eye, kron, mat_residual, one, sum_monomials, zero, CMat,
    Legs, Monomial,
};
use crate::special_functions::{bracket, h_func, omega_fermat, omega_fermat2, FermatTriple};
use crate::weyl_reps::{
    fuse, fuse_triple_search, is_regular_pair, mono_pow, mono_y, mono_z, rep_d, rep_e, tensor_d,
    tensor_e, FusedTriple, StandardRep,
};
use serde::{Deserialize, Serialize};

/// `h(y_ρμ/(a_ρ y_μ))`.
pub fn default_ocg_h(
    ctx: &Context,
    rho: &StandardRep,
    mu: &StandardRep,
    rho_mu: &StandardRep,
) -> Result<C64> {
    h_func(ctx, rho_mu.y / (rho.a * mu.y))
}

/// `K_α(ρ,μ)` (`N²×N`, rows `(i,j)`) and `K̄^α(ρ,μ)` (`N×N²`) for `α = 0..N`.
#[derive(Clone, Debug)]
pub struct OcgFamily {
    pub rho: StandardRep,
    pub mu: StandardRep,
    pub rho_mu: StandardRep,
    pub h: C64,
    pub k: Vec<CMat>,
    pub kbar: Vec<CMat>,
}

pub fn ocg(
    ctx: &Context,
    rho: &StandardRep,
    mu: &StandardRep,
    rho_mu: &StandardRep,
    h: Option<C64>,
) -> Result<OcgFamily> {
    if !is_regular_pair(ctx, rho, mu) {
        return Err(Error::NotRegular("OCG needs a regular pair".into()));
    }
    let n = ctx.n();
    let h = match h {
        Some(h) => h,
        None => default_ocg_h(ctx, rho, mu, rho_mu)?,
    };
    let x = rho.a * mu.y;
    let y = rho.y / mu.a;
    let t = FermatTriple::new(ctx, x, y, rho_mu.y)?;
    let tb = FermatTriple::new(ctx, x * ctx.w(-1), y, rho_mu.y)?;
    let pre = bracket(ctx, x / rho_mu.y)? / h;
    let mut k = Vec::with_capacity(n);
    let mut kbar = Vec::with_capacity(n);
    for alpha in 0..n as i64 {
        let mut ka = CMat::zeros(n * n, n);
        let mut kb = CMat::zeros(n, n * n);
        for i in 0..n as i64 {
            let om = omega_fermat2(ctx, &t, i, alpha)?;
            let omb = omega_fermat2(ctx, &tb, i, alpha)?;
            for j in 0..n as i64 {
                let row = (i * n as i64 + j) as usize;
                let col = ctx.modn(i + j);
                ka[(row, col)] = h * ctx.w(alpha * j) * om;
                kb[(col, row)] = pre * ctx.w(-alpha * j) / omb;
            }
        }
        k.push(ka);
        kbar.push(kb);
    }
    Ok(OcgFamily {
        rho: *rho,
        mu: *mu,
        rho_mu: *rho_mu,
        h,
        k,
        kbar,
    })
}

impl OcgFamily {
    /// Residuals of `K̄^α K_β = δ(α−β) id` and `Σ_α K_α K̄^α = id`.
    pub fn duality_residuals(&self, ctx: &Context) -> (f64, f64) {
        let n = ctx.n();
        let mut first: f64 = 0.0;
        for a in 0..n {
            for b in 0..n {
                let prod = &self.kbar[a] * &self.k[b];
                let r = if a == b {
                    mat_residual(&prod, &eye(n), ctx.tol_abs)
                } else {
                    prod.iter().map(|v| v.norm()).fold(0.0, f64::max)
                };
                first = first.max(r);
            }
        }
        let mut sum = CMat::zeros(n * n, n * n);
        for a in 0..n {
            sum += &self.k[a] * &self.kbar[a];
        }
        (first, mat_residual(&sum, &eye(n * n), ctx.tol_abs))
    }

    /// Residuals of `Δ(E) K_α = K_α ρμ(E)` and `Δ(D) K_α = K_α ρμ(D)`.
    pub fn intertwining_residuals(&self, ctx: &Context) -> (f64, f64) {
        let te = tensor_e(ctx, &self.rho, &self.mu);
        let td = tensor_d(ctx, &self.rho, &self.mu);
        let e = rep_e(ctx, &self.rho_mu);
        let d = rep_d(ctx, &self.rho_mu);
        let mut re: f64 = 0.0;
        let mut rd: f64 = 0.0;
        for ka in &self.k {
            re = re.max(mat_residual(&(&te * ka), &(ka * &e), ctx.tol_abs));
            rd = rd.max(mat_residual(&(&td * ka), &(ka * &d), ctx.tol_abs));
        }
        (re, rd)
    }

    /// `R(ρ,μ)` with rows `(α,k)` and columns `(i,j)`: `R^{α,k}_{i,j} = K_α^k_{i,j}`.
    pub fn block_matrix(&self) -> CMat {
        let n = self.k.len();
        let mut out = CMat::zeros(n * n, n * n);
        for (alpha, ka) in self.k.iter().enumerate() {
            for row in 0..n * n {
                for kk in 0..n {
                    out[(alpha * n + kk, row)] = ka[(row, kk)];
                }
            }
        }
        out
    }
}

/// `Ψ(ρ,μ) = h Σ_t (−(y_ρ/(a_ρa_μy_μ)) Y_1^{−1}Z_2^{−1}Y_2)^t ∏_{s≤t} 1/(1 − ω^{−s} y_ρμ/(a_ρy_μ))`.
pub fn psi_pair(
    ctx: &Context,
    rho: &StandardRep,
    mu: &StandardRep,
    rho_mu: &StandardRep,
    h: C64,
) -> Result<CMat> {
    let n = ctx.n();
    let w = pair_operator(ctx).scale(-rho.y / (rho.a * mu.a * mu.y));
    let beta = rho_mu.y / (rho.a * mu.y);
    let mut out = CMat::zeros(n * n, n * n);
    let mut pr = h;
    let mut pow = Monomial::identity(n * n);
    for t in 0..n {
        if t > 0 {
            let d = 1.0 - ctx.w(-(t as i64)) * beta;
            if d.norm() < ctx.tol_abs {
                return Err(crate::error::singular(format!("Ψ(ρ,μ) pole at s = {t}")));
            }
            pr /= d;
            pow = pow.mul(&w);
        }
        pow.add_into(&mut out, pr);
    }
    Ok(out)
}

/// `Y^{−1} ⊗ Z^{−1}Y`, the monomial underlying `Ψ(ρ,μ)`.
pub fn pair_operator(ctx: &Context) -> Monomial {
    let (z, y) = (mono_z(ctx), mono_y(ctx));
    mono_pow(&y, -1).kron(&mono_pow(&z, -1).mul(&y))
}

/// `Ψ(ρ,μ)_{k,l}^{i,j} = h ω^{−k(i−k)} ω(a_ρy_μ, y_ρ/a_μ, y_ρμ | i−k) δ(l+k−i−j)`, rows `(k,l)`.
pub fn psi_pair_closed(
    ctx: &Context,
    rho: &StandardRep,
    mu: &StandardRep,
    rho_mu: &StandardRep,
    h: C64,
) -> Result<CMat> {
    let n = ctx.n();
    let t = FermatTriple::new(ctx, rho.a * mu.y, rho.y / mu.a, rho_mu.y)?;
    let mut out = CMat::zeros(n * n, n * n);
    for i in 0..n as i64 {
        for j in 0..n as i64 {
            for k in 0..n as i64 {
                let l = ctx.modn(i + j - k) as i64;
                let v = h * ctx.w(-k * (i - k)) * omega_fermat(ctx, &t, i - k)?;
                out[((k * n as i64 + l) as usize, (i * n as i64 + j) as usize)] = v;
            }
        }
    }
    Ok(out)
}

/// `Υ·Ψ(ρ,μ)` against the block matrix of the OCG family, default normalization.
pub fn factorization_residual(
    ctx: &Context,
    rho: &StandardRep,
    mu: &StandardRep,
    rho_mu: &StandardRep,
) -> Result<f64> {
    let fam = ocg(ctx, rho, mu, rho_mu, None)?;
    let psi = psi_pair(ctx, rho, mu, rho_mu, fam.h)?;
    Ok(mat_residual(
        &(upsilon(ctx) * psi),
        &fam.block_matrix(),
        ctx.tol_abs,
    ))
}

/// `Ψ(ρ,μ)` as the cyclic dilogarithm with `(a,b,c) = (y_ρ/(a_μ y_ρμ), 1, a_ρ y_μ/y_ρμ)`.
pub fn pair_dilog_params(
    ctx: &Context,
    rho: &StandardRep,
    mu: &StandardRep,
    rho_mu: &StandardRep,
) -> Result<CyclicDilogParams> {
    let h = default_ocg_h(ctx, rho, mu, rho_mu)?;
    CyclicDilogParams::with_h(
        ctx,
        rho.y / (mu.a * rho_mu.y),
        one(),
        rho.a * mu.y / rho_mu.y,
        h,
    )
}

/// Normalization of the 6j-symbols.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Normalization {
    /// `ω^{1/8} h(y_ρμ y_μν/(y_ρμν y_μ))`: the choice under which the pentagon holds.
    Corrected,
    /// `h(y_ρμ y_μν/(y_ρμν y_μ))` without the eighth-root phase.
    Literal,
}

pub fn sixj_h(ctx: &Context, triple: &FusedTriple, norm: Normalization) -> Result<C64> {
    let base = h_func(ctx, triple.cut_arg())?;
    Ok(match norm {
        Normalization::Corrected => base * ctx.omega_pow(1, 3),
        Normalization::Literal => base,
    })
}

/// `R[γ][δ][α][β]` and `R̄[α][β][γ][δ]`, stored row-major.
#[derive(Clone, Debug, PartialEq)]
pub struct SixJTensor {
    pub triple: FusedTriple,
    pub h: C64,
    pub n: usize,
    pub r: Vec<C64>,
    pub rbar: Vec<C64>,
}

pub(crate) fn idx4(n: usize, a: usize, b: usize, c: usize, d: usize) -> usize {
    ((a * n + b) * n + c) * n + d
}

/// Operator with rows `(α,β)` and columns `(γ,δ)` from a tensor indexed `[γ][δ][α][β]`.
pub(crate) fn upper_lower_matrix(n: usize, t: &[C64]) -> CMat {
    CMat::from_fn(n * n, n * n, |row, col| {
        t[idx4(n, col / n, col % n, row / n, row % n)]
    })
}

impl SixJTensor {
    pub fn entry(&self, g: usize, d: usize, a: usize, b: usize) -> C64 {
        self.r[idx4(self.n, g, d, a, b)]
    }

    pub fn inv_entry(&self, a: usize, b: usize, g: usize, d: usize) -> C64 {
        self.rbar[idx4(self.n, a, b, g, d)]
    }

    /// `M_{(α,β),(γ,δ)} = R^{γ,δ}_{α,β}`.
    pub fn matrix(&self) -> CMat {
        upper_lower_matrix(self.n, &self.r)
    }

    /// `M̄_{(γ,δ),(α,β)} = R̄^{α,β}_{γ,δ}`.
    pub fn inv_matrix(&self) -> CMat {
        upper_lower_matrix(self.n, &self.rbar)
    }

    pub fn inverse_residual(&self, ctx: &Context) -> f64 {
        mat_residual(
            &(self.matrix() * self.inv_matrix()),
            &eye(self.n * self.n),
            ctx.tol_abs,
        )
    }

    /// Entries off `γ + δ ≡ β` are exactly zero, in both tensors.
    pub fn support_ok(&self) -> bool {
        let n = self.n;
        (0..n).all(|g| {
            (0..n).all(|d| {
                (0..n).all(|a| {
                    (0..n).all(|b| {
                        (g + d) % n == b
                            || (self.entry(g, d, a, b) == zero()
                                && self.inv_entry(a, b, g, d) == zero())
                    })
                })
            })
        })
    }

    pub fn to_dump(&self) -> TensorDump {
        TensorDump::new(self.n, &self.triple, self.h, &self.r, &self.rbar, None)
    }
}

pub fn sixj(ctx: &Context, triple: &FusedTriple, h: Option<C64>) -> Result<SixJTensor> {
    let h = match h {
        Some(h) => h,
        None => sixj_h(ctx, triple, Normalization::Corrected)?,
    };
    let n = ctx.n();
    let (x, yv, zv) = triple.fermat_args();
    let t = FermatTriple::new(ctx, x, yv, zv)?;
    let tb = FermatTriple::new(ctx, x * ctx.w(-1), yv, zv)?;
    let pre = bracket(ctx, x / zv)? / h;
    let mut r = vec![zero(); n * n * n * n];
    let mut rbar = vec![zero(); n * n * n * n];
    for g in 0..n {
        for a in 0..n {
            let om = omega_fermat2(ctx, &t, g as i64, a as i64)?;
            let omb = omega_fermat2(ctx, &tb, g as i64, a as i64)?;
            for d in 0..n {
                let b = (g + d) % n;
                let phase = (a * d) as i64;
                r[idx4(n, g, d, a, b)] = h * ctx.w(phase) * om;
                rbar[idx4(n, a, b, g, d)] = pre * ctx.w(-phase) / omb;
            }
        }
    }
    Ok(SixJTensor {
        triple: triple.clone(),
        h,
        n,
        r,
        rbar,
    })
}

pub fn sixj_normalized(
    ctx: &Context,
    triple: &FusedTriple,
    norm: Normalization,
) -> Result<SixJTensor> {
    sixj(ctx, triple, Some(sixj_h(ctx, triple, norm)?))
}

/// The four OCG families entering the recoupling of `ρ ⊗ μ ⊗ ν`.
#[derive(Clone, Debug)]
pub struct Recoupling {
    pub k12: OcgFamily,
    pub k12_3: OcgFamily,
    pub k23: OcgFamily,
    pub k1_23: OcgFamily,
}

impl Recoupling {
    pub fn new(ctx: &Context, t: &FusedTriple) -> Result<Self> {
        Ok(Recoupling {
            k12: ocg(ctx, &t.rho, &t.mu, &t.rho_mu, None)?,
            k12_3: ocg(ctx, &t.rho_mu, &t.nu, &t.rho_mu_nu, None)?,
            k23: ocg(ctx, &t.mu, &t.nu, &t.mu_nu, None)?,
            k1_23: ocg(ctx, &t.rho, &t.mu_nu, &t.rho_mu_nu, None)?,
        })
    }

    /// `(K̄^γ(ρ,μν) (id ⊗ K̄^δ(μ,ν)) (K_α(ρ,μ) ⊗ id) K_β(ρμ,ν))^0_0`.
    pub fn entry(&self, g: usize, d: usize, a: usize, b: usize) -> C64 {
        let n = self.k12.k.len();
        let v = self.k12_3.k[b].column(0).into_owned();
        let v = kron(&self.k12.k[a], &eye(n)) * v;
        let v = kron(&eye(n), &self.k23.kbar[d]) * v;
        let v = &self.k1_23.kbar[g] * v;
        v[0]
    }

    /// Full tensor `[γ][δ][α][β]` read off the OCG families.
    pub fn tensor(&self) -> Vec<C64> {
        let n = self.k12.k.len();
        let mut out = vec![zero(); n * n * n * n];
        for g in 0..n {
            for d in 0..n {
                for a in 0..n {
                    for b in 0..n {
                        out[idx4(n, g, d, a, b)] = self.entry(g, d, a, b);
                    }
                }
            }
        }
        out
    }

    /// Max over `(α,β)` of `(K_α⊗id)K_β` against `Σ R^{γ,δ}_{α,β} (id⊗K_δ)K_γ`.
    pub fn decomposition_residual(&self, ctx: &Context, r: &SixJTensor) -> f64 {
        let n = ctx.n();
        let id = eye(n);
        let gmat: Vec<Vec<CMat>> = (0..n)
            .map(|g| {
                (0..n)
                    .map(|d| kron(&id, &self.k23.k[d]) * &self.k1_23.k[g])
                    .collect()
            })
            .collect();
        let mut worst: f64 = 0.0;
        for a in 0..n {
            let left = kron(&self.k12.k[a], &id);
            for b in 0..n {
                let lhs = &left * &self.k12_3.k[b];
                let mut rhs = CMat::zeros(n * n * n, n);
                for (g, row) in gmat.iter().enumerate() {
                    for (d, m) in row.iter().enumerate() {
                        let c = r.entry(g, d, a, b);
                        if c != zero() {
                            rhs += m * c;
                        }
                    }
                }
                worst = worst.max(mat_residual(&lhs, &rhs, ctx.tol_abs));
            }
        }
        worst
    }
}

/// Whether the 6j formula's `(0,0,0,0)` entry reproduces the recoupled one.
pub fn recoupling_matches(ctx: &Context, t: &FusedTriple) -> Result<bool> {
    recoupling_matches_normalized(ctx, t, Normalization::Corrected)
}

/// As [`recoupling_matches`] with the 6j formula under `norm`.
pub fn recoupling_matches_normalized(
    ctx: &Context,
    t: &FusedTriple,
    norm: Normalization,
) -> Result<bool> {
    let rec = Recoupling::new(ctx, t)?;
    let formula = sixj_h(ctx, t, norm)?
        * omega_fermat2(
            ctx,
            &{
                let (x, y, z) = t.fermat_args();
                FermatTriple::new(ctx, x, y, z)?
            },
            0,
            0,
        )?;
    Ok(scalar_residual(rec.entry(0, 0, 0, 0), formula, ctx.tol_abs) < ctx.tol_rel.max(1e-8))
}

/// First admissible branch triple whose 6j formula is the recoupling tensor.
pub fn fuse_triple_recoupling(
    ctx: &Context,
    rho: &StandardRep,
    mu: &StandardRep,
    nu: &StandardRep,
) -> Result<FusedTriple> {
    fuse_triple_recoupling_normalized(ctx, rho, mu, nu, Normalization::Corrected)
}

pub fn fuse_triple_recoupling_normalized(
    ctx: &Context,
    rho: &StandardRep,
    mu: &StandardRep,
    nu: &StandardRep,
    norm: Normalization,
) -> Result<FusedTriple> {
    fuse_triple_search(ctx, rho, mu, nu, |t| {
        recoupling_matches_normalized(ctx, t, norm).unwrap_or(false)
    })
}

/// `leg12(m0) leg13(m1) leg23(m2)` and `scale · leg23(m3) leg12(m4)`.
pub fn pentagon_sides(n: usize, m: [&CMat; 5], scale: C64) -> (CMat, CMat) {
    let lhs = apply_leg(
        m[0],
        Legs::L12,
        n,
        &apply_leg(m[1], Legs::L13, n, &embed(m[2], Legs::L23, n)),
    );
    let rhs = apply_leg(m[3], Legs::L23, n, &embed(m[4], Legs::L12, n)) * scale;
    (lhs, rhs)
}

/// Four representations with one branch choice for each of the six fusions
/// `ρμ, μν, νv, ρμν, μνv, ρμνv`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PentagonData {
    pub reps: [StandardRep; 4],
    pub fused: [StandardRep; 6],
    pub branches: [usize; 6],
}

impl PentagonData {
    /// `(ρ,μ,ν)`, `(ρ,μν,v)`, `(μ,ν,v)`, `(ρμ,ν,v)`, `(ρ,μ,νv)` with their fusions.
    pub fn triples(&self, ctx: &Context) -> [FusedTriple; 5] {
        let [rho, mu, nu, v] = self.reps;
        let [rm, mn, nv, rmn, mnv, rmnv] = self.fused;
        [
            FusedTriple::from_reps(ctx, [rho, mu, nu, rm, mn, rmn]),
            FusedTriple::from_reps(ctx, [rho, mn, v, rmn, mnv, rmnv]),
            FusedTriple::from_reps(ctx, [mu, nu, v, mn, nv, mnv]),
            FusedTriple::from_reps(ctx, [rm, nu, v, rmn, nv, rmnv]),
            FusedTriple::from_reps(ctx, [rho, mu, nv, rm, mnv, rmnv]),
        ]
    }
}

fn first_branch(ctx: &Context, ok: impl Fn(usize) -> bool) -> Option<usize> {
    (0..ctx.n()).find(|&b| ok(b))
}

/// Global branch assignment making all five triples admissible, by nested search:
/// each sign convention fixes one remaining branch from the others.
pub fn pentagon_assignment(
    ctx: &Context,
    rho: &StandardRep,
    mu: &StandardRep,
    nu: &StandardRep,
    v: &StandardRep,
) -> Result<PentagonData> {
    let n = ctx.n();
    let reps = [*rho, *mu, *nu, *v];
    for b1 in 0..n {
        let rm = fuse(ctx, rho, mu, b1)?;
        for b2 in 0..n {
            let mn = fuse(ctx, mu, nu, b2)?;
            let t0 = |b4: usize| -> Option<(FusedTriple, StandardRep)> {
                let rmn = fuse(ctx, &rm, nu, b4).ok()?;
                let t = FusedTriple::from_parts([*rho, *mu, *nu, rm, mn, rmn], [b1, b2, b4]);
                t.is_admissible(ctx).then_some((t, rmn))
            };
            let Some(b4) = first_branch(ctx, |b| t0(b).is_some()) else {
                continue;
            };
            let rmn = t0(b4).map(|x| x.1).ok_or_else(|| domain("branch"))?;
            for b3 in 0..n {
                let nv = fuse(ctx, nu, v, b3)?;
                let t2 = |b5: usize| -> Option<StandardRep> {
                    let mnv = fuse(ctx, &mn, v, b5).ok()?;
                    FusedTriple::from_parts([*mu, *nu, *v, mn, nv, mnv], [b2, b3, b5])
                        .is_admissible(ctx)
                        .then_some(mnv)
                };
                let Some(b5) = first_branch(ctx, |b| t2(b).is_some()) else {
                    continue;
                };
                let mnv = t2(b5).ok_or_else(|| domain("branch"))?;
                let t4 = |b6: usize| -> Option<StandardRep> {
                    let rmnv = fuse(ctx, &rmn, v, b6).ok()?;
                    FusedTriple::from_parts([*rho, *mu, nv, rm, mnv, rmnv], [b1, 0, 0])
                        .is_admissible(ctx)
                        .then_some(rmnv)
                };
                let Some(b6) = first_branch(ctx, |b| t4(b).is_some()) else {
                    continue;
                };
                let rmnv = t4(b6).ok_or_else(|| domain("branch"))?;
                let t1 = FusedTriple::from_parts([*rho, mn, *v, rmn, mnv, rmnv], [0; 3]);
                let t3 = FusedTriple::from_parts([rm, *nu, *v, rmn, nv, rmnv], [0; 3]);
                if t1.is_admissible(ctx) && t3.is_admissible(ctx) {
                    return Ok(PentagonData {
                        reps,
                        fused: [rm, mn, nv, rmn, mnv, rmnv],
                        branches: [b1, b2, b3, b4, b5, b6],
                    });
                }
            }
        }
    }
    Err(Error::NoAdmissibleBranch(
        "no global branch assignment satisfies the sign convention on all five triples".into(),
    ))
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct PentagonReport {
    pub residual: f64,
    pub det_residual: f64,
    pub upsilon_residual: f64,
    pub dilog_residual: f64,
    pub dilog_det_residual: f64,
}

/// Both sides of the pentagon with the default normalization, plus its
/// factorized pieces: the `Υ` pentagon and the cyclic dilogarithm relation.
pub fn verify_pentagon(ctx: &Context, data: &PentagonData) -> Result<PentagonReport> {
    let n = ctx.n();
    let triples = data.triples(ctx);
    let mats: Vec<CMat> = triples
        .iter()
        .map(|t| sixj(ctx, t, None).map(|s| s.matrix()))
        .collect::<Result<_>>()?;
    let (lhs, rhs) = pentagon_sides(n, [&mats[0], &mats[1], &mats[2], &mats[3], &mats[4]], one());
    let residual = mat_residual(&lhs, &rhs, ctx.tol_abs);
    let d: Vec<C64> = mats.iter().map(|m| m.clone().determinant()).collect();
    let det_ratio = (d[0] * d[1] * d[2] / (d[3] * d[4])).powi(n as i32);
    let det_residual = scalar_residual(det_ratio, one(), ctx.tol_abs);
    let (dilog_residual, dilog_det_residual) = verify_dilog_factor(ctx, &triples[0])?;
    Ok(PentagonReport {
        residual,
        det_residual,
        upsilon_residual: upsilon_pentagon_residual(ctx),
        dilog_residual,
        dilog_det_residual,
    })
}

/// `Ψ(ρμ,ν)(V) Ψ(ρ,μ)(U) = h Ψ(Yv/Zv, 1, X/Zv)(U) Ψ(ρ,μν)(−UV) Ψ(μ,ν)(V)` on `V^{⊗3}`
/// with `U = −Y_1^{−1}Z_2^{−1}Y_2`, `V = −Y_2^{−1}Z_3^{−1}Y_3` and `h` fixed by
/// equal determinants. Returns the identity and determinant residuals.
pub fn verify_dilog_factor(ctx: &Context, t: &FusedTriple) -> Result<(f64, f64)> {
    let n = ctx.n();
    let dim = n * n * n;
    let w = pair_operator(ctx);
    let u = w.kron(&Monomial::identity(n)).scale(-one());
    let v = Monomial::identity(n).kron(&w).scale(-one());
    let uv = u.mul(&v).scale(-one());
    let (x, yv, zv) = t.fermat_args();
    let p_rm_n = pair_dilog_params(ctx, &t.rho_mu, &t.nu, &t.rho_mu_nu)?;
    let p_r_m = pair_dilog_params(ctx, &t.rho, &t.mu, &t.rho_mu)?;
    let p_mid = CyclicDilogParams::new(ctx, yv / zv, one(), x / zv)?;
    let p_r_mn = pair_dilog_params(ctx, &t.rho, &t.mu_nu, &t.rho_mu_nu)?;
    let p_m_n = pair_dilog_params(ctx, &t.mu, &t.nu, &t.mu_nu)?;
    let lhs_terms = expand_product(
        &cyclic_dilog_terms(ctx, &p_rm_n, &v)?,
        &cyclic_dilog_terms(ctx, &p_r_m, &u)?,
    );
    let rhs_terms = expand_product(
        &expand_product(
            &cyclic_dilog_terms(ctx, &p_mid, &u)?,
            &cyclic_dilog_terms(ctx, &p_r_mn, &uv)?,
        ),
        &cyclic_dilog_terms(ctx, &p_m_n, &v)?,
    );
    let lhs = sum_monomials(&lhs_terms, dim);
    let rhs = sum_monomials(&rhs_terms, dim);
    let log_l = log_det_monomial(ctx, &p_rm_n, &v)? + log_det_monomial(ctx, &p_r_m, &u)?;
    let log_r = log_det_monomial(ctx, &p_mid, &u)?
        + log_det_monomial(ctx, &p_r_mn, &uv)?
        + log_det_monomial(ctx, &p_m_n, &v)?;
    let rr: C64 = rhs.iter().map(|z| z.norm_sqr()).sum::<f64>().into();
    let rl: C64 = rhs.iter().zip(lhs.iter()).map(|(r, l)| r.conj() * l).sum();
    let h = nearest_root_of_log(log_l - log_r, dim, rl / rr);
    let residual = mat_residual(&lhs, &(rhs * h), ctx.tol_abs);
    let det = (log_l - log_r - h.ln() * dim as f64).exp();
    Ok((residual, scalar_residual(det, one(), ctx.tol_abs)))
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ChargeBlock {
    pub a: i64,
    pub c: i64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ParamBlock {
    pub rho: StandardRep,
    pub mu: StandardRep,
    pub nu: StandardRep,
    pub rho_mu: StandardRep,
    pub mu_nu: StandardRep,
    pub rho_mu_nu: StandardRep,
    pub branches: [usize; 3],
    pub h: [f64; 2],
}

/// JSON layout of a (charged) 6j tensor and its inverse.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TensorDump {
    #[serde(rename = "N")]
    pub n: usize,
    pub shape: [usize; 4],
    pub index_order: String,
    pub entries: Vec<[f64; 2]>,
    pub inverse_index_order: String,
    pub inverse_entries: Vec<[f64; 2]>,
    pub params: ParamBlock,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub charges: Option<ChargeBlock>,
}

fn pairs(v: &[C64]) -> Vec<[f64; 2]> {
    v.iter().map(|z| [z.re, z.im]).collect()
}

fn unpairs(v: &[[f64; 2]]) -> Vec<C64> {
    v.iter().map(|p| C64::new(p[0], p[1])).collect()
}

impl TensorDump {
    pub fn new(
        n: usize,
        t: &FusedTriple,
        h: C64,
        r: &[C64],
        rbar: &[C64],
        charges: Option<ChargeBlock>,
    ) -> Self {
        TensorDump {
            n,
            shape: [n; 4],
            index_order: "gamma,delta,alpha,beta".into(),
            entries: pairs(r),
            inverse_index_order: "alpha,beta,gamma,delta".into(),
            inverse_entries: pairs(rbar),
            params: ParamBlock {
                rho: t.rho,
                mu: t.mu,
                nu: t.nu,
                rho_mu: t.rho_mu,
                mu_nu: t.mu_nu,
                rho_mu_nu: t.rho_mu_nu,
                branches: t.branches,
                h: [h.re, h.im],
            },
            charges,
        }
    }

    pub fn triple(&self) -> FusedTriple {
        let p = &self.params;
        FusedTriple::from_parts(
            [p.rho, p.mu, p.nu, p.rho_mu, p.mu_nu, p.rho_mu_nu],
            p.branches,
        )
    }

    pub fn h(&self) -> C64 {
        C64::new(self.params.h[0], self.params.h[1])
    }

    pub fn entries(&self) -> Result<(Vec<C64>, Vec<C64>)> {
        let len = self.n.pow(4);
        if self.entries.len() != len || self.inverse_entries.len() != len {
            return Err(domain(format!("tensor dump needs {len} entries")));
        }
        Ok((unpairs(&self.entries), unpairs(&self.inverse_entries)))
    }

    pub fn to_sixj(&self) -> Result<SixJTensor> {
        let (r, rbar) = self.entries()?;
        Ok(SixJTensor {
            triple: self.triple(),
            h: self.h(),
            n: self.n,
            r,
            rbar,
        })
    }
}

/// Relative distance between two tensors of equal size.
pub fn tensor_residual(a: &[C64], b: &[C64], tol_abs: f64) -> f64 {
    rel_residual(a, b, tol_abs)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::weyl_reps::fuse_triple_admissible;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    fn reps() -> [StandardRep; 4] {
        [
            StandardRep {
                a: c(0.8, 0.3),
                y: c(-1.1, 0.4),
            },
            StandardRep {
                a: c(1.2, -0.5),
                y: c(0.6, 0.9),
            },
            StandardRep {
                a: c(0.7, 0.7),
                y: c(1.4, -0.2),
            },
            StandardRep {
                a: c(1.3, 0.2),
                y: c(-0.4, -1.1),
            },
        ]
    }

    #[test]
    fn ocg_duality_and_intertwining() {
        for n in [3, 5] {
            let ctx = Context::new(n).unwrap();
            let [r, m, _, _] = reps();
            for b in 0..n as usize {
                let rm = fuse(&ctx, &r, &m, b).unwrap();
                let fam = ocg(&ctx, &r, &m, &rm, None).unwrap();
                let (d1, d2) = fam.duality_residuals(&ctx);
                assert!(d1 < 1e-10 && d2 < 1e-10, "{d1} {d2}");
                let (ie, id) = fam.intertwining_residuals(&ctx);
                assert!(ie < 1e-10 && id < 1e-10, "{ie} {id}");
            }
        }
    }

    #[test]
    fn factorization_through_upsilon() {
        for n in [3, 5, 7] {
            let ctx = Context::new(n).unwrap();
            let [r, m, _, _] = reps();
            for b in 0..n as usize {
                let rm = fuse(&ctx, &r, &m, b).unwrap();
                assert!(factorization_residual(&ctx, &r, &m, &rm).unwrap() < 1e-10);
                let h = default_ocg_h(&ctx, &r, &m, &rm).unwrap();
                let lit = psi_pair(&ctx, &r, &m, &rm, h).unwrap();
                let closed = psi_pair_closed(&ctx, &r, &m, &rm, h).unwrap();
                assert!(mat_residual(&lit, &closed, 1e-12) < 1e-12);
            }
        }
    }

    #[test]
    fn sixj_support_and_inverse() {
        let ctx = Context::new(5).unwrap();
        let [r, m, v, _] = reps();
        let t = fuse_triple_admissible(&ctx, &r, &m, &v).unwrap();
        let s = sixj(&ctx, &t, None).unwrap();
        assert!(s.support_ok());
        assert!(s.inverse_residual(&ctx) < 1e-10);
    }

    #[test]
    fn recoupling_tensor_matches_formula() {
        for n in [3, 5] {
            let ctx = Context::new(n).unwrap();
            let [r, m, v, _] = reps();
            let t = fuse_triple_recoupling(&ctx, &r, &m, &v).unwrap();
            let s = sixj(&ctx, &t, None).unwrap();
            let rec = Recoupling::new(&ctx, &t).unwrap();
            assert!(tensor_residual(&rec.tensor(), &s.r, 1e-12) < 1e-9);
            assert!(rec.decomposition_residual(&ctx, &s) < 1e-9);
        }
    }

    #[test]
    fn pentagon_n3() {
        let ctx = Context::new(3).unwrap();
        let [r, m, v, w] = reps();
        let data = pentagon_assignment(&ctx, &r, &m, &v, &w).unwrap();
        let rep = verify_pentagon(&ctx, &data).unwrap();
        assert!(rep.residual < 1e-8, "{rep:?}");
        assert!(rep.det_residual < 1e-8);
        assert!(rep.upsilon_residual < 1e-8);
        assert!(rep.dilog_residual < 1e-8, "{rep:?}");
        assert!(rep.dilog_det_residual < 1e-8);
    }

    #[test]
    fn literal_normalization_breaks_pentagon() {
        let ctx = Context::new(3).unwrap();
        let [r, m, v, w] = reps();
        let data = pentagon_assignment(&ctx, &r, &m, &v, &w).unwrap();
        let mats: Vec<CMat> = data
            .triples(&ctx)
            .iter()
            .map(|t| {
                sixj_normalized(&ctx, t, Normalization::Literal)
                    .unwrap()
                    .matrix()
            })
            .collect();
        let (lhs, rhs) =
            pentagon_sides(3, [&mats[0], &mats[1], &mats[2], &mats[3], &mats[4]], one());
        assert!(mat_residual(&lhs, &rhs, 1e-12) > 1e-3);
        let fix = ctx.omega_pow(-1, 3);
        assert!(mat_residual(&lhs, &(rhs * fix), 1e-12) < 1e-8);
    }

    #[test]
    fn dump_round_trip() {
        let ctx = Context::new(3).unwrap();
        let [r, m, v, _] = reps();
        let t = fuse_triple_admissible(&ctx, &r, &m, &v).unwrap();
        let s = sixj(&ctx, &t, None).unwrap();
        let text = serde_json::to_string(&s.to_dump()).unwrap();
        let back: TensorDump = serde_json::from_str(&text).unwrap();
        assert_eq!(back.to_sixj().unwrap(), s);
        assert_eq!(serde_json::to_string(&back).unwrap(), text);
    }
}
