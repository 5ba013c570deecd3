//! Seeded verification harness: each relation is checked on independently
//! sampled parameter sets and summarized by its largest relative residual.

use crate::charged::{
    commutation_residuals, conjugation_residual, extended_pentagon_residual, lemma68_residual,
    orthogonality_residual, verify_symmetries, ChargePair,
};
use crate::core_numerics::Context;
use crate::cyclic_dilog::{
    functional_identity_residual, make_anticyclic_pair, solve_thm410_params,
    upsilon_pentagon_residual, verify_thm410,
};
use crate::error::{Error, Result};
use crate::intertwiners::{factorization_residual, ocg, sixj, verify_pentagon, Recoupling};
use crate::sampling::*;
use crate::special_functions::{
    asymptotic_error_growth, bracket_factorization_residual, f_factorization_residual,
    g_one_norm_residual, inversion_residual, log_series_residual, phi_shift_residual,
    shift_identity_residual,
};
use crate::weyl_reps::normal_rep;
use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;
use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Relation {
    OcgDuality,
    Intertwining,
    Factorization,
    CgDecomposition,
    Pentagon,
    CyclicDilog424,
    Thm410,
    UpsilonPentagon,
    HeisenbergRelations,
    Eq28Shift,
    Lemma34,
    Lemma61,
    Lemma62,
    Lemma63,
    G1Norm,
    Eq9Log,
    Prop33Asymptotic,
    Lemma68,
    Commutations,
    Symmetries,
    Conjugation,
    ExtendedPentagon,
    Orthogonality,
}

impl Relation {
    pub const ALL: [Relation; 23] = [
        Relation::OcgDuality,
        Relation::Intertwining,
        Relation::Factorization,
        Relation::CgDecomposition,
        Relation::Pentagon,
        Relation::CyclicDilog424,
        Relation::Thm410,
        Relation::UpsilonPentagon,
        Relation::HeisenbergRelations,
        Relation::Eq28Shift,
        Relation::Lemma34,
        Relation::Lemma61,
        Relation::Lemma62,
        Relation::Lemma63,
        Relation::G1Norm,
        Relation::Eq9Log,
        Relation::Prop33Asymptotic,
        Relation::Lemma68,
        Relation::Commutations,
        Relation::Symmetries,
        Relation::Conjugation,
        Relation::ExtendedPentagon,
        Relation::Orthogonality,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Relation::OcgDuality => "ocg-duality",
            Relation::Intertwining => "intertwining",
            Relation::Factorization => "factorization",
            Relation::CgDecomposition => "cg-decomposition",
            Relation::Pentagon => "pentagon",
            Relation::CyclicDilog424 => "cyclic-dilog-424",
            Relation::Thm410 => "thm410",
            Relation::UpsilonPentagon => "upsilon-pentagon",
            Relation::HeisenbergRelations => "heisenberg-relations",
            Relation::Eq28Shift => "eq28-shift",
            Relation::Lemma34 => "lemma34",
            Relation::Lemma61 => "lemma61",
            Relation::Lemma62 => "lemma62",
            Relation::Lemma63 => "lemma63",
            Relation::G1Norm => "g1-norm",
            Relation::Eq9Log => "eq9-log",
            Relation::Prop33Asymptotic => "prop33-asymptotic",
            Relation::Lemma68 => "lemma68",
            Relation::Commutations => "commutations",
            Relation::Symmetries => "symmetries",
            Relation::Conjugation => "conjugation",
            Relation::ExtendedPentagon => "extended-pentagon",
            Relation::Orthogonality => "orthogonality",
        }
    }

    /// Pass threshold on the largest residual.
    pub fn default_tol(self) -> f64 {
        match self {
            Relation::HeisenbergRelations | Relation::G1Norm => 1e-12,
            Relation::OcgDuality
            | Relation::Intertwining
            | Relation::Factorization
            | Relation::CyclicDilog424
            | Relation::Lemma68
            | Relation::Commutations
            | Relation::Conjugation => 1e-10,
            Relation::CgDecomposition
            | Relation::Orthogonality
            | Relation::Eq28Shift
            | Relation::Lemma34
            | Relation::Lemma61
            | Relation::Lemma62
            | Relation::Lemma63
            | Relation::Eq9Log => 1e-9,
            Relation::Pentagon
            | Relation::Thm410
            | Relation::UpsilonPentagon
            | Relation::Symmetries
            | Relation::ExtendedPentagon => 1e-8,
            Relation::Prop33Asymptotic => 1e-12,
        }
    }
}

impl fmt::Display for Relation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Relation {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Relation::ALL
            .into_iter()
            .find(|r| r.name() == s)
            .ok_or_else(|| Error::Validation {
                location: "relation".into(),
                message: format!("unknown relation {s:?}"),
            })
    }
}

/// `all` or a single relation.
pub fn parse_relations(s: &str) -> Result<Vec<Relation>> {
    if s == "all" {
        Ok(Relation::ALL.to_vec())
    } else {
        Ok(vec![s.parse()?])
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SampleRecord {
    pub index: u64,
    pub residual: Option<f64>,
    pub pass: bool,
    #[serde(skip_serializing_if = "BTreeMap::is_empty")]
    pub detail: BTreeMap<String, f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct VerificationReport {
    pub relation: String,
    #[serde(rename = "N")]
    pub n: usize,
    pub samples: usize,
    pub seed: u64,
    pub tol: f64,
    pub rng: &'static str,
    pub max_residual: Option<f64>,
    pub pass: bool,
    /// For the symmetries: the `ζ` candidate passing on every sample.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub zeta: Option<String>,
    pub records: Vec<SampleRecord>,
}

pub const RNG_NAME: &str = "ChaCha8 seeded by seed, stream = sample index";

struct Outcome {
    residual: f64,
    detail: BTreeMap<String, f64>,
    note: Option<String>,
}

impl Outcome {
    fn plain(residual: f64) -> Self {
        Outcome {
            residual,
            detail: BTreeMap::new(),
            note: None,
        }
    }

    fn parts(parts: &[(&str, f64)]) -> Self {
        Outcome {
            residual: parts.iter().map(|p| p.1).fold(0.0, f64::max),
            detail: parts.iter().map(|(k, v)| (k.to_string(), *v)).collect(),
            note: None,
        }
    }
}

fn charge_pair(ctx: &Context, rng: &mut ChaCha8Rng) -> ChargePair {
    let a = sample_charge(ctx, rng);
    let c = sample_charge(ctx, rng);
    ChargePair::new(ctx, a, c)
}

const PROP33_POINTS: [f64; 3] = [0.1, 0.2, 0.3];

fn run_sample(
    rel: Relation,
    ctx: &Context,
    index: u64,
    rng: &mut ChaCha8Rng,
    tol: f64,
) -> Result<Outcome> {
    Ok(match rel {
        Relation::OcgDuality => {
            let (r, m, rm) = sample_fused_pair(ctx, rng)?;
            let (d1, d2) = ocg(ctx, &r, &m, &rm, None)?.duality_residuals(ctx);
            Outcome::parts(&[("k_kbar", d1), ("kbar_k", d2)])
        }
        Relation::Intertwining => {
            let (r, m, rm) = sample_fused_pair(ctx, rng)?;
            let (e, d) = ocg(ctx, &r, &m, &rm, None)?.intertwining_residuals(ctx);
            Outcome::parts(&[("E", e), ("D", d)])
        }
        Relation::Factorization => {
            let (r, m, rm) = sample_fused_pair(ctx, rng)?;
            Outcome::plain(factorization_residual(ctx, &r, &m, &rm)?)
        }
        Relation::CgDecomposition => {
            let t = sample_recoupling_triple(ctx, rng)?;
            let s = sixj(ctx, &t, None)?;
            Outcome::plain(Recoupling::new(ctx, &t)?.decomposition_residual(ctx, &s))
        }
        Relation::Pentagon => {
            let data = sample_pentagon(ctx, rng)?;
            let r = verify_pentagon(ctx, &data)?;
            Outcome::parts(&[
                ("pentagon", r.residual),
                ("determinant", r.det_residual),
                ("upsilon", r.upsilon_residual),
                ("dilog", r.dilog_residual),
                ("dilog_determinant", r.dilog_det_residual),
            ])
        }
        Relation::CyclicDilog424 => {
            let p = sample_dilog_params(ctx, rng)?;
            let (u, v) = make_anticyclic_pair(ctx)?;
            Outcome::parts(&[
                ("U", functional_identity_residual(ctx, &p, &u)?),
                ("V", functional_identity_residual(ctx, &p, &v)?),
            ])
        }
        Relation::Thm410 => {
            let (x0, x1) = sample_five_term_point(rng);
            let tp = solve_thm410_params(ctx, x0, x1)?;
            let (u, v) = make_anticyclic_pair(ctx)?;
            let r = verify_thm410(ctx, &tp, &u, &v)?;
            let rel = tp
                .relation_residuals(ctx.tol_abs)
                .into_iter()
                .fold(0.0, f64::max);
            Outcome::parts(&[
                ("identity", r.residual),
                ("determinant", r.det_residual),
                ("parameters", rel),
            ])
        }
        Relation::UpsilonPentagon => Outcome::plain(upsilon_pentagon_residual(ctx)),
        Relation::HeisenbergRelations => {
            Outcome::plain(normal_rep(ctx, &sample_rep(rng)).relation_residual(ctx))
        }
        Relation::Eq28Shift => {
            Outcome::plain(shift_identity_residual(ctx, &sample_fermat(ctx, rng)?)?)
        }
        Relation::Lemma34 => {
            let (x, zeta) = sample_phi_point(ctx, rng);
            Outcome::plain(phi_shift_residual(ctx, x, zeta)?)
        }
        Relation::Lemma61 => {
            let (x, y, z) = sample_f_point(ctx, rng)?;
            Outcome::plain(f_factorization_residual(ctx, x, y, z)?)
        }
        Relation::Lemma62 => Outcome::plain(inversion_residual(ctx, &sample_fermat(ctx, rng)?)?),
        Relation::Lemma63 => Outcome::plain(bracket_factorization_residual(
            ctx,
            sample_bracket_point(ctx, rng),
        )?),
        Relation::G1Norm => Outcome::plain(g_one_norm_residual(ctx)),
        Relation::Eq9Log => {
            let (x, q) = sample_log_series_point(rng);
            Outcome::plain(log_series_residual(x, q, 4000)?)
        }
        Relation::Prop33Asymptotic => {
            let x = match PROP33_POINTS.get(index as usize) {
                Some(&x) => x,
                None => rng.random_range(0.1..0.3),
            };
            let g = asymptotic_error_growth(ctx, crate::C64::new(x, 0.0), 0.1)?;
            let mut o = Outcome::plain(((g - 2.0).abs() - 0.5).max(0.0));
            o.detail.insert("growth".into(), g);
            o.detail.insert("x".into(), x);
            o
        }
        Relation::Lemma68 => {
            let t = sample_triple(ctx, rng)?;
            let s = sixj(ctx, &t, None)?;
            let mut worst: f64 = 0.0;
            for a in 0..ctx.n() as i64 {
                for c in 0..ctx.n() as i64 {
                    worst = worst.max(lemma68_residual(ctx, &s, ChargePair::new(ctx, a, c)));
                }
            }
            Outcome::plain(worst)
        }
        Relation::Commutations => {
            let t = sample_triple(ctx, rng)?;
            let [c1, c2, c3] = commutation_residuals(ctx, &sixj(ctx, &t, None)?);
            Outcome::parts(&[("C1", c1), ("C2", c2), ("C3", c3)])
        }
        Relation::Symmetries => {
            let reps = sample_symmetry_reps(ctx, rng)?;
            let q = charge_pair(ctx, rng);
            let rep = verify_symmetries(ctx, [&reps[0], &reps[1], &reps[2]], q, tol)?;
            let mut detail = BTreeMap::new();
            for row in &rep.rows {
                let norm = format!("{:?}", row.normalization).to_lowercase();
                for (k, r) in row.residuals.iter().enumerate() {
                    detail.insert(format!("{norm} {} relation {}", row.candidate, k + 1), *r);
                }
            }
            let residual = rep
                .rows
                .iter()
                .filter(|r| r.listed_candidate)
                .map(|r| r.residuals.iter().copied().fold(0.0, f64::max))
                .fold(f64::INFINITY, f64::min);
            Outcome {
                residual,
                detail,
                note: rep
                    .winner
                    .map(|(n, c)| format!("{}:{c}", format!("{n:?}").to_lowercase())),
            }
        }
        Relation::Conjugation => {
            let t = sample_triple(ctx, rng)?;
            let q = charge_pair(ctx, rng);
            Outcome::plain(conjugation_residual(
                ctx,
                &t,
                q,
                crate::intertwiners::Normalization::Corrected,
            )?)
        }
        Relation::ExtendedPentagon => {
            let data = sample_pentagon(ctx, rng)?;
            let q = [(); 5].map(|_| sample_charge(ctx, rng));
            Outcome::plain(extended_pentagon_residual(ctx, &data, q)?)
        }
        Relation::Orthogonality => {
            let t = sample_triple(ctx, rng)?;
            let q = charge_pair(ctx, rng);
            Outcome::plain(orthogonality_residual(ctx, &sixj(ctx, &t, None)?, q))
        }
    })
}

/// Runs one relation on `samples` seeded samples in parallel; records are kept
/// in sample order.
pub fn verify_relation(
    rel: Relation,
    ctx: &Context,
    samples: usize,
    seed: u64,
    tol: Option<f64>,
) -> VerificationReport {
    let tol = tol.unwrap_or(rel.default_tol());
    let records: Vec<SampleRecord> = (0..samples as u64)
        .into_par_iter()
        .map(|index| {
            let mut rng = sample_rng(seed, index);
            match run_sample(rel, ctx, index, &mut rng, tol) {
                Ok(o) => SampleRecord {
                    index,
                    residual: Some(o.residual),
                    pass: o.residual.is_finite()
                        && o.residual < tol
                        && (rel != Relation::Symmetries || o.note.is_some()),
                    detail: o.detail,
                    note: o.note,
                    error: None,
                },
                Err(e) => SampleRecord {
                    index,
                    residual: None,
                    pass: false,
                    detail: BTreeMap::new(),
                    note: None,
                    error: Some(e.to_string()),
                },
            }
        })
        .collect();
    let max_residual = records
        .iter()
        .map(|r| r.residual)
        .try_fold(0.0f64, |m, r| r.map(|r| m.max(r)));
    let pass = !records.is_empty() && records.iter().all(|r| r.pass);
    let zeta = if rel == Relation::Symmetries {
        let first = records.first().and_then(|r| r.note.clone());
        first.filter(|w| records.iter().all(|r| r.note.as_ref() == Some(w)))
    } else {
        None
    };
    VerificationReport {
        relation: rel.name().into(),
        n: ctx.n(),
        samples,
        seed,
        tol,
        rng: RNG_NAME,
        max_residual,
        pass,
        zeta,
        records,
    }
}

pub fn verify(
    relations: &[Relation],
    ctx: &Context,
    samples: usize,
    seed: u64,
    tol: Option<f64>,
) -> Vec<VerificationReport> {
    relations
        .iter()
        .map(|&r| verify_relation(r, ctx, samples, seed, tol))
        .collect()
}

impl VerificationReport {
    /// One summary line.
    pub fn summary_line(&self) -> String {
        let res = match self.max_residual {
            Some(r) => format!("{r:.3e}"),
            None => "error".into(),
        };
        let mut line = format!(
            "{:<20} N={:<2} samples={:<4} seed={} max_residual={} tol={:.0e} {}",
            self.relation,
            self.n,
            self.samples,
            self.seed,
            res,
            self.tol,
            if self.pass { "PASS" } else { "FAIL" }
        );
        if self.relation == Relation::Symmetries.name() {
            line.push_str(&format!(" zeta={}", self.zeta.as_deref().unwrap_or("none")));
        }
        if let Some(e) = self.records.iter().find_map(|r| r.error.as_ref()) {
            line.push_str(&format!(" first_error=\"{e}\""));
        }
        line
    }
}
