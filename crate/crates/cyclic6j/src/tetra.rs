//! Decorated tetrahedra: branchings, full Borel cocycles, integral charges,
//! states, and the Ξ tensor entries they select.

use crate::charged::{c_sixj, charged_prefactor, ChargePair};
use crate::core_numerics::{Context, C64};
use crate::error::{Error, Result};
use crate::intertwiners::{fuse_triple_recoupling, sixj};
use crate::weyl_reps::{psi_param, BorelElement, FusedTriple, StandardRep};
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;

/// Edges as pairs of branching positions, in storage order.
pub const EDGES: [(usize, usize); 6] = [(0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3)];

/// Face `f_k` is opposite vertex `v_k`.
pub const FACES: [[usize; 3]; 4] = [[1, 2, 3], [0, 2, 3], [0, 1, 3], [0, 1, 2]];

pub fn edge_name(e: usize) -> String {
    format!("{}{}", EDGES[e].0, EDGES[e].1)
}

fn edge_index(i: usize, j: usize) -> usize {
    let (i, j) = (i.min(j), i.max(j));
    EDGES
        .iter()
        .position(|&e| e == (i, j))
        .expect("distinct vertices")
}

fn face_edges(f: usize) -> [usize; 3] {
    let [i, j, k] = FACES[f];
    [edge_index(i, j), edge_index(i, k), edge_index(j, k)]
}

fn invalid(location: impl Into<String>, message: impl Into<String>) -> Error {
    Error::Validation {
        location: location.into(),
        message: message.into(),
    }
}

/// A vertex ordering; edges point from the earlier vertex to the later one.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Branching {
    pub vertex_order: [usize; 4],
}

impl Branching {
    pub fn new(vertex_order: [usize; 4]) -> Result<Self> {
        let mut seen = [false; 4];
        for &v in &vertex_order {
            if v > 3 || seen[v] {
                return Err(invalid("vertex_order", "must be a permutation of 0..4"));
            }
            seen[v] = true;
        }
        Ok(Branching { vertex_order })
    }

    /// Branching from six oriented edges `(tail, head)` on vertex labels.
    pub fn from_edges(oriented: [(usize, usize); 6]) -> Result<Self> {
        let mut out = [0usize; 4];
        let mut covered = [false; 6];
        for &(u, v) in &oriented {
            if u > 3 || v > 3 || u == v {
                return Err(invalid("edges", format!("bad edge ({u},{v})")));
            }
            let e = edge_index(u, v);
            if covered[e] {
                return Err(invalid(
                    "edges",
                    format!("edge {} given twice", edge_name(e)),
                ));
            }
            covered[e] = true;
            out[u] += 1;
        }
        for (f, vs) in FACES.iter().enumerate() {
            let cyclic = vs.iter().all(|&v| {
                oriented
                    .iter()
                    .filter(|&&(a, b)| a == v && vs.contains(&b))
                    .count()
                    == 1
            });
            if cyclic {
                return Err(invalid(
                    format!("face f{f}"),
                    "edge orientations form an oriented cycle",
                ));
            }
        }
        let mut order = [0usize; 4];
        for v in 0..4 {
            order[3 - out[v]] = v;
        }
        Branching::new(order)
    }

    /// Orientation induced on the tetrahedron: the sign of the vertex permutation.
    pub fn orientation(&self) -> i8 {
        let o = self.vertex_order;
        let inversions = (0..4)
            .flat_map(|i| (i + 1..4).map(move |j| (i, j)))
            .filter(|&(i, j)| o[i] > o[j])
            .count();
        if inversions % 2 == 0 {
            1
        } else {
            -1
        }
    }

    /// Oriented edges `(tail, head)` on vertex labels.
    pub fn oriented_edges(&self) -> [(usize, usize); 6] {
        EDGES.map(|(i, j)| (self.vertex_order[i], self.vertex_order[j]))
    }
}

pub fn make_branching(vertex_order: [usize; 4]) -> Result<Branching> {
    Branching::new(vertex_order)
}

/// Borel 1-cocycle given by its values on `[v0,v1]`, `[v1,v2]`, `[v2,v3]`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct BorelCocycle {
    pub g01: BorelElement,
    pub g12: BorelElement,
    pub g23: BorelElement,
}

impl BorelCocycle {
    /// `z([vi,vj])` for `i < j`, and its inverse for `i > j`.
    pub fn value(&self, i: usize, j: usize) -> BorelElement {
        if i > j {
            return self.value(j, i).inverse();
        }
        let gens = [self.g01, self.g12, self.g23];
        let mut acc = gens[i];
        for g in &gens[i + 1..j] {
            acc = acc.mul(g);
        }
        acc
    }

    pub fn values(&self) -> [BorelElement; 6] {
        EDGES.map(|(i, j)| self.value(i, j))
    }

    /// Largest `z(vi,vj) z(vj,vk)` against `z(vi,vk)` over the faces.
    pub fn cocycle_residual(&self) -> f64 {
        FACES
            .iter()
            .map(|&[i, j, k]| {
                self.value(i, j)
                    .mul(&self.value(j, k))
                    .distance(&self.value(i, k))
            })
            .fold(0.0, f64::max)
    }

    pub fn check_full(&self, tol_abs: f64) -> Result<()> {
        for (e, z) in self.values().iter().enumerate() {
            let scale = z.t.norm().max(1.0 / z.t.norm());
            if z.x.norm() <= tol_abs * scale {
                return Err(invalid(
                    format!("edge {}", edge_name(e)),
                    "cocycle value is diagonal",
                ));
            }
        }
        Ok(())
    }
}

pub fn cocycle_from_generators(
    g01: BorelElement,
    g12: BorelElement,
    g23: BorelElement,
    tol_abs: f64,
) -> Result<BorelCocycle> {
    for (name, g) in [("g01", g01), ("g12", g12), ("g23", g23)] {
        if g.t.norm() == 0.0 || !g.t.is_finite() || !g.x.is_finite() {
            return Err(invalid(name, "generator must be finite with t ≠ 0"));
        }
    }
    let z = BorelCocycle { g01, g12, g23 };
    z.check_full(tol_abs)?;
    Ok(z)
}

/// Integer edge weights, in [`EDGES`] order.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct IntegralCharge {
    pub c: [i64; 6],
}

impl IntegralCharge {
    pub fn new(c: [i64; 6]) -> Result<Self> {
        let q = IntegralCharge { c };
        q.validate()?;
        Ok(q)
    }

    pub fn edge(&self, i: usize, j: usize) -> i64 {
        self.c[edge_index(i, j)]
    }

    pub fn validate(&self) -> Result<()> {
        for f in 0..4 {
            let s: i64 = face_edges(f).iter().map(|&e| self.c[e]).sum();
            if s != 1 {
                return Err(invalid(
                    format!("face f{f}"),
                    format!("edge charges sum to {s}, expected 1"),
                ));
            }
        }
        Ok(())
    }

    /// Weights `w` on the opposite pairs `(01,23)`, `(02,13)`, `(03,12)`.
    pub fn from_opposite_pairs(w: [i64; 3]) -> Result<Self> {
        IntegralCharge::new([w[0], w[1], w[2], w[2], w[1], w[0]])
    }
}

impl Serialize for IntegralCharge {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let m: BTreeMap<String, i64> = (0..6).map(|e| (edge_name(e), self.c[e])).collect();
        m.serialize(s)
    }
}

impl<'de> Deserialize<'de> for IntegralCharge {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let m = BTreeMap::<String, i64>::deserialize(d)?;
        let mut c = [0i64; 6];
        for (e, slot) in c.iter_mut().enumerate() {
            *slot = *m.get(&edge_name(e)).ok_or_else(|| {
                serde::de::Error::custom(format!("charges: missing edge {}", edge_name(e)))
            })?;
        }
        if let Some(k) = m.keys().find(|k| !(0..6).any(|e| edge_name(e) == **k)) {
            return Err(serde::de::Error::custom(format!(
                "charges: unknown edge {k}"
            )));
        }
        Ok(IntegralCharge { c })
    }
}

/// `c/2 mod N`.
pub fn halve_charge(ctx: &Context, n: i64) -> usize {
    ctx.halve(n)
}

/// Root branches for `t(e)^{1/N}` and `x(e)^{1/N}` on one edge.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct RootBranch {
    #[serde(default)]
    pub t: usize,
    #[serde(default)]
    pub x: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DecoratedTetrahedron {
    pub orientation: i8,
    pub vertex_order: [usize; 4],
    pub cocycle: BorelCocycle,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub charges: Option<IntegralCharge>,
    /// `α_k` on face `f_k`.
    pub state: [usize; 4],
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub root_branches: BTreeMap<String, RootBranch>,
}

impl DecoratedTetrahedron {
    pub fn branching(&self) -> Result<Branching> {
        Branching::new(self.vertex_order)
    }

    /// `*`: the given orientation read through the branching.
    pub fn star(&self) -> Result<i8> {
        if self.orientation != 1 && self.orientation != -1 {
            return Err(invalid("orientation", "must be +1 or -1"));
        }
        Ok(self.orientation * self.branching()?.orientation())
    }

    fn root_branch(&self, e: &str) -> RootBranch {
        self.root_branches.get(e).copied().unwrap_or_default()
    }

    /// Structural checks that do not depend on `N`.
    pub fn validate(&self, ctx: &Context, use_charges: bool) -> Result<()> {
        self.star()?;
        for k in self.root_branches.keys() {
            if !(0..6).any(|e| edge_name(e) == *k) {
                return Err(invalid(format!("root_branches.{k}"), "unknown edge"));
            }
        }
        for e in ["02", "13", "03"] {
            if self.root_branch(e).t != 0 {
                return Err(invalid(
                    format!("root_branches.{e}"),
                    "t-branch of a composite edge is fixed by the product",
                ));
            }
        }
        for (k, &a) in self.state.iter().enumerate() {
            if a >= ctx.n() {
                return Err(invalid(
                    format!("state[{k}]"),
                    format!("must be below N = {}", ctx.n()),
                ));
            }
        }
        cocycle_from_generators(
            self.cocycle.g01,
            self.cocycle.g12,
            self.cocycle.g23,
            ctx.tol_abs,
        )?;
        if use_charges {
            self.charges
                .as_ref()
                .ok_or_else(|| invalid("charges", "required for the charged evaluation"))?
                .validate()?;
        }
        Ok(())
    }
}

fn edge_rep(ctx: &Context, z: &BorelElement, b: RootBranch) -> StandardRep {
    StandardRep {
        a: ctx.root_branch(z.t, b.t),
        y: ctx.root_branch(z.x, b.x),
    }
}

/// Representations on `[v0,v1]`, `[v1,v2]`, `[v2,v3]` with their fusions on
/// `[v0,v2]`, `[v1,v3]`, `[v0,v3]`.
pub fn reps_from_cocycle(ctx: &Context, tet: &DecoratedTetrahedron) -> Result<FusedTriple> {
    let z = &tet.cocycle;
    let rho = edge_rep(ctx, &z.g01, tet.root_branch("01"));
    let mu = edge_rep(ctx, &z.g12, tet.root_branch("12"));
    let nu = edge_rep(ctx, &z.g23, tet.root_branch("23"));
    let given: Vec<bool> = ["02", "13", "03"]
        .iter()
        .map(|e| tet.root_branches.contains_key(*e))
        .collect();
    if given.iter().all(|g| *g) {
        let ys = [(0, 2), (1, 3), (0, 3)].map(|(i, j)| {
            let e = edge_name(edge_index(i, j));
            ctx.root_branch(z.value(i, j).x, tet.root_branch(&e).x)
        });
        let rho_mu = StandardRep {
            a: rho.a * mu.a,
            y: ys[0],
        };
        let mu_nu = StandardRep {
            a: mu.a * nu.a,
            y: ys[1],
        };
        let rho_mu_nu = StandardRep {
            a: rho_mu.a * nu.a,
            y: ys[2],
        };
        let t = FusedTriple::from_reps(ctx, [rho, mu, nu, rho_mu, mu_nu, rho_mu_nu]);
        if !t.is_admissible(ctx) {
            return Err(Error::NoAdmissibleBranch(
                "root_branches on 02, 13, 03 violate the sign convention or sit on a cut".into(),
            ));
        }
        Ok(t)
    } else if given.iter().any(|g| *g) {
        Err(invalid(
            "root_branches",
            "give x-branches for all of 02, 13, 03 or none",
        ))
    } else {
        fuse_triple_recoupling(ctx, &rho, &mu, &nu)
    }
}

/// Largest distance between `Ψ` of a fused representation, the product of
/// `Ψ` of its factors, and the cocycle value on the composite edge.
pub fn psi_multiplicativity_residual(
    ctx: &Context,
    tet: &DecoratedTetrahedron,
    t: &FusedTriple,
) -> f64 {
    let z = &tet.cocycle;
    [
        (&t.rho, &t.mu, &t.rho_mu, z.value(0, 2)),
        (&t.mu, &t.nu, &t.mu_nu, z.value(1, 3)),
        (&t.rho_mu, &t.nu, &t.rho_mu_nu, z.value(0, 3)),
    ]
    .iter()
    .map(|(a, b, ab, edge)| {
        let prod = psi_param(ctx, a).mul(&psi_param(ctx, b));
        prod.distance(edge).max(psi_param(ctx, ab).distance(edge))
    })
    .fold(0.0, f64::max)
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct XiEvaluation {
    pub value: [f64; 2],
    pub star: i8,
    pub charges: Option<ChargePair>,
    pub triple: FusedTriple,
    pub cocycle_residual: f64,
    pub psi_residual: f64,
    pub convention_residual: f64,
    pub margin: f64,
    pub on_support: bool,
}

/// `R^{α2,α0}_{α3,α1}` for `* = +1`, `R̄^{α3,α1}_{α2,α0}` for `* = −1`, charged by
/// `(c(01)/2, c(12)/2)` when `use_charges`.
pub fn evaluate_xi_report(
    ctx: &Context,
    tet: &DecoratedTetrahedron,
    use_charges: bool,
) -> Result<XiEvaluation> {
    tet.validate(ctx, use_charges)?;
    let star = tet.star()?;
    let t = reps_from_cocycle(ctx, tet)?;
    let base = sixj(ctx, &t, None)?;
    let [a0, a1, a2, a3] = tet.state;
    let (value, charges) = if use_charges {
        let q = tet.charges.as_ref().expect("validated");
        let ch = ChargePair {
            a: halve_charge(ctx, q.edge(0, 1)),
            c: halve_charge(ctx, q.edge(1, 2)),
        };
        let c = c_sixj(ctx, &base, ch);
        let v = if star == 1 {
            c.entry(a2, a0, a3, a1)
        } else {
            c.inv_entry(a3, a1, a2, a0)
        };
        (v, Some(ch))
    } else {
        let v = if star == 1 {
            base.entry(a2, a0, a3, a1)
        } else {
            base.inv_entry(a3, a1, a2, a0)
        };
        (v, None)
    };
    Ok(XiEvaluation {
        value: [value.re, value.im],
        star,
        charges,
        cocycle_residual: tet.cocycle.cocycle_residual(),
        psi_residual: psi_multiplicativity_residual(ctx, tet, &t),
        convention_residual: t.convention_residual(ctx),
        margin: t.margin(ctx),
        on_support: (a2 + a0) % ctx.n() == a1,
        triple: t,
    })
}

pub fn evaluate_xi(ctx: &Context, tet: &DecoratedTetrahedron, use_charges: bool) -> Result<C64> {
    let r = evaluate_xi_report(ctx, tet, use_charges)?;
    Ok(C64::new(r.value[0], r.value[1]))
}

/// `(y_ρμ y_μν)^P` for the decoration.
pub fn xi_prefactor(ctx: &Context, tet: &DecoratedTetrahedron) -> Result<C64> {
    Ok(charged_prefactor(ctx, &reps_from_cocycle(ctx, tet)?))
}
