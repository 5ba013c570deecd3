//! Seeded rejection samplers. Sample `i` under seed `s` draws from ChaCha8
//! seeded by `s` on stream `i`, so samples are independent of evaluation order.

use crate::core_numerics::{Context, C64};
use crate::cyclic_dilog::CyclicDilogParams;
use crate::error::{Error, Result};
use crate::intertwiners::{
    fuse_triple_recoupling, fuse_triple_recoupling_normalized, pentagon_assignment, Normalization,
    PentagonData,
};
use crate::special_functions::{r_func, FermatTriple};
use crate::weyl_reps::{
    fuse, fuse_triple_admissible, is_regular_pair, pair_margin, FusedTriple, StandardRep,
    CUT_MARGIN,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::f64::consts::PI;

/// Rejection budget per sample.
pub const MAX_ATTEMPTS: usize = 4000;

/// Modulus range for sampled representation parameters.
pub const REP_MODULUS: (f64, f64) = (0.5, 2.0);

pub fn sample_rng(seed: u64, index: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index);
    rng
}

/// Modulus uniform in `[rmin, rmax]`, uniform argument.
pub fn sample_complex<R: Rng>(rng: &mut R, rmin: f64, rmax: f64) -> C64 {
    C64::from_polar(rng.random_range(rmin..=rmax), rng.random_range(-PI..PI))
}

pub fn sample_rep<R: Rng>(rng: &mut R) -> StandardRep {
    let (lo, hi) = REP_MODULUS;
    StandardRep {
        a: sample_complex(rng, lo, hi),
        y: sample_complex(rng, lo, hi),
    }
}

fn exhausted(what: &str) -> Error {
    Error::NoAdmissibleBranch(format!(
        "{what}: rejection budget of {MAX_ATTEMPTS} draws exhausted"
    ))
}

/// A regular pair with a uniformly drawn fusion branch, off the poles and cuts
/// of its Clebsch-Gordan operators.
pub fn sample_fused_pair<R: Rng>(
    ctx: &Context,
    rng: &mut R,
) -> Result<(StandardRep, StandardRep, StandardRep)> {
    for _ in 0..MAX_ATTEMPTS {
        let (r, m) = (sample_rep(rng), sample_rep(rng));
        let b = rng.random_range(0..ctx.n());
        if is_regular_pair(ctx, &r, &m) {
            let rm = fuse(ctx, &r, &m, b)?;
            if pair_margin(ctx, &r, &m, &rm) >= CUT_MARGIN {
                return Ok((r, m, rm));
            }
        }
    }
    Err(exhausted("regular pair"))
}

pub fn sample_triple<R: Rng>(ctx: &Context, rng: &mut R) -> Result<FusedTriple> {
    for _ in 0..MAX_ATTEMPTS {
        let (r, m, v) = (sample_rep(rng), sample_rep(rng), sample_rep(rng));
        if let Ok(t) = fuse_triple_admissible(ctx, &r, &m, &v) {
            return Ok(t);
        }
    }
    Err(exhausted("admissible triple"))
}

/// Admissible triple whose 6j formula is the recoupling tensor, with all four
/// fusions off the poles and cuts of their Clebsch-Gordan operators.
pub fn sample_recoupling_triple<R: Rng>(ctx: &Context, rng: &mut R) -> Result<FusedTriple> {
    for _ in 0..MAX_ATTEMPTS {
        let (r, m, v) = (sample_rep(rng), sample_rep(rng), sample_rep(rng));
        if let Ok(t) = fuse_triple_recoupling(ctx, &r, &m, &v) {
            if t.pair_margins(ctx) >= CUT_MARGIN {
                return Ok(t);
            }
        }
    }
    Err(exhausted("recoupling triple"))
}

/// Three representations admitting a recoupling triple under both normalizations.
pub fn sample_symmetry_reps<R: Rng>(ctx: &Context, rng: &mut R) -> Result<[StandardRep; 3]> {
    for _ in 0..MAX_ATTEMPTS {
        let reps = [sample_rep(rng), sample_rep(rng), sample_rep(rng)];
        let ok = [Normalization::Corrected, Normalization::Literal]
            .iter()
            .all(|&norm| {
                fuse_triple_recoupling_normalized(ctx, &reps[0], &reps[1], &reps[2], norm).is_ok()
            });
        if ok {
            return Ok(reps);
        }
    }
    Err(exhausted("symmetry triple"))
}

pub fn sample_pentagon<R: Rng>(ctx: &Context, rng: &mut R) -> Result<PentagonData> {
    for _ in 0..MAX_ATTEMPTS {
        let reps = [
            sample_rep(rng),
            sample_rep(rng),
            sample_rep(rng),
            sample_rep(rng),
        ];
        if let Ok(d) = pentagon_assignment(ctx, &reps[0], &reps[1], &reps[2], &reps[3]) {
            return Ok(d);
        }
    }
    Err(exhausted("pentagon quadruple"))
}

/// Uniform residue mod `N`.
pub fn sample_charge<R: Rng>(ctx: &Context, rng: &mut R) -> i64 {
    rng.random_range(0..ctx.n() as i64)
}

fn pole_gap(ctx: &Context, t: &FermatTriple) -> f64 {
    (0..ctx.n() as i64)
        .map(|j| {
            let a = (t.z - t.x * ctx.w(j)).norm() / t.z.norm();
            let b = (ctx.omega() * t.x + ctx.omega_half() * t.y * ctx.w(j)).norm() / t.x.norm();
            a.min(b)
        })
        .fold(f64::INFINITY, f64::min)
}

/// Point of the Fermat curve kept at relative distance `0.05` from the poles of
/// `ω(x,y,z|·)` and of its inversion partner.
pub fn sample_fermat<R: Rng>(ctx: &Context, rng: &mut R) -> Result<FermatTriple> {
    for _ in 0..MAX_ATTEMPTS {
        let (x, y) = (sample_complex(rng, 0.5, 2.0), sample_complex(rng, 0.5, 2.0));
        let z = ctx.principal_root(ctx.xn(x) + ctx.xn(y));
        if let Ok(t) = FermatTriple::new(ctx, x, y, z) {
            if pole_gap(ctx, &t) > 0.05 {
                return Ok(t);
            }
        }
    }
    Err(exhausted("Fermat point"))
}

/// `0.1 < |x| < 0.9`, `|arg x| < 2π/N − 0.05`.
pub fn sample_bracket_point<R: Rng>(ctx: &Context, rng: &mut R) -> C64 {
    let amax = 2.0 * PI / ctx.n() as f64 - 0.05;
    C64::from_polar(rng.random_range(0.1..0.9), rng.random_range(-amax..amax))
}

/// `|x|, |y| ∈ (0.2, 0.8)`, `arg x ∈ [−π/N, −π/2N)`, `arg y ∈ [−π/2N, 0)`, `z = r(x)/r(y)`.
pub fn sample_f_point<R: Rng>(ctx: &Context, rng: &mut R) -> Result<(C64, C64, C64)> {
    let a = PI / ctx.n() as f64;
    let x = C64::from_polar(rng.random_range(0.2..0.8), rng.random_range(-a..-a / 2.0));
    let y = C64::from_polar(rng.random_range(0.2..0.8), rng.random_range(-a / 2.0..0.0));
    Ok((x, y, r_func(ctx, x)? / r_func(ctx, y)?))
}

/// `|x| < 0.9` and a primitive `N`-th root of unity `ζ`.
pub fn sample_phi_point<R: Rng>(ctx: &Context, rng: &mut R) -> (C64, C64) {
    let n = ctx.n() as u64;
    let k = loop {
        let k = rng.random_range(1..n);
        if crate::core_numerics::gcd(k, n) == 1 {
            break k;
        }
    };
    let x = C64::from_polar(0.9 * rng.random::<f64>().sqrt(), rng.random_range(-PI..PI));
    (x, ctx.w(k as i64))
}

/// `|x| < 0.5`, `|q| < 0.6`.
pub fn sample_log_series_point<R: Rng>(rng: &mut R) -> (C64, C64) {
    let x = C64::from_polar(0.5 * rng.random::<f64>().sqrt(), rng.random_range(-PI..PI));
    let q = C64::from_polar(0.6 * rng.random::<f64>().sqrt(), rng.random_range(-PI..PI));
    (x, q)
}

/// Parameters on `a^N + c^N = b^N` with `|a|, |c| ∈ [0.5, 2]`.
pub fn sample_dilog_params<R: Rng>(ctx: &Context, rng: &mut R) -> Result<CyclicDilogParams> {
    for _ in 0..MAX_ATTEMPTS {
        let (a, c) = (sample_complex(rng, 0.5, 2.0), sample_complex(rng, 0.5, 2.0));
        let b = ctx.principal_root(ctx.xn(a) + ctx.xn(c));
        if let Ok(p) = CyclicDilogParams::new(ctx, a, b, c) {
            return Ok(p);
        }
    }
    Err(exhausted("cyclic dilogarithm parameters"))
}

/// `(x_0, x_1)` with moduli in `[0.15, 0.6]`.
pub fn sample_five_term_point<R: Rng>(rng: &mut R) -> (C64, C64) {
    (
        sample_complex(rng, 0.15, 0.6),
        sample_complex(rng, 0.15, 0.6),
    )
}
