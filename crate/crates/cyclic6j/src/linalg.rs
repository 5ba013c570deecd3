//! Dense complex matrices, leg embeddings on threefold products, and
//! monomial (generalized permutation) matrices.

use crate::core_numerics::{rel_residual, C64};
use crate::error::{singular, Result};
use nalgebra::DMatrix;

pub type CMat = DMatrix<C64>;

pub fn zero() -> C64 {
    C64::new(0.0, 0.0)
}

pub fn one() -> C64 {
    C64::new(1.0, 0.0)
}

pub fn eye(n: usize) -> CMat {
    CMat::identity(n, n)
}

pub fn kron(a: &CMat, b: &CMat) -> CMat {
    a.kronecker(b)
}

pub fn mat_residual(a: &CMat, b: &CMat, tol_abs: f64) -> f64 {
    assert_eq!(a.shape(), b.shape());
    rel_residual(a.as_slice(), b.as_slice(), tol_abs)
}

pub fn mat_pow(a: &CMat, k: usize) -> CMat {
    let mut out = eye(a.nrows());
    for _ in 0..k {
        out = mul_sparse(&out, a);
    }
    out
}

pub fn inverse(a: &CMat) -> Result<CMat> {
    a.clone()
        .try_inverse()
        .ok_or_else(|| singular("matrix is not invertible"))
}

pub fn det(a: &CMat) -> C64 {
    a.clone().determinant()
}

/// Product that skips the structural zeros of `a`.
pub fn mul_sparse(a: &CMat, b: &CMat) -> CMat {
    assert_eq!(a.ncols(), b.nrows());
    let mut out = CMat::zeros(a.nrows(), b.ncols());
    for k in 0..a.ncols() {
        for i in 0..a.nrows() {
            let v = a[(i, k)];
            if v == zero() {
                continue;
            }
            for j in 0..b.ncols() {
                let bv = b[(k, j)];
                if bv != zero() {
                    out[(i, j)] += v * bv;
                }
            }
        }
    }
    out
}

/// Pair of tensor factors of `V ⊗ V ⊗ V` on which an `N²×N²` operator acts.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Legs {
    L12,
    L13,
    L23,
}

impl Legs {
    fn split(self, n: usize, p: usize, q: usize, s: usize) -> usize {
        match self {
            Legs::L12 => (p * n + q) * n + s,
            Legs::L13 => (p * n + s) * n + q,
            Legs::L23 => (s * n + p) * n + q,
        }
    }
}

fn leg_triplets(m: &CMat, legs: Legs, n: usize) -> Vec<(usize, usize, C64)> {
    assert_eq!(m.nrows(), n * n);
    let mut out = Vec::new();
    for c in 0..n * n {
        for r in 0..n * n {
            let v = m[(r, c)];
            if v == zero() {
                continue;
            }
            let (p, q) = (r / n, r % n);
            let (pp, qq) = (c / n, c % n);
            for s in 0..n {
                out.push((legs.split(n, p, q, s), legs.split(n, pp, qq, s), v));
            }
        }
    }
    out
}

/// `N³×N³` matrix of `m` acting on the given legs (flattening `(i,j,k) → (iN+j)N+k`).
pub fn embed(m: &CMat, legs: Legs, n: usize) -> CMat {
    let mut out = CMat::zeros(n * n * n, n * n * n);
    for (r, c, v) in leg_triplets(m, legs, n) {
        out[(r, c)] += v;
    }
    out
}

/// `embed(m, legs) · a` without forming the embedding.
pub fn apply_leg(m: &CMat, legs: Legs, n: usize, a: &CMat) -> CMat {
    let dim = n * n * n;
    assert_eq!(a.nrows(), dim);
    let trip = leg_triplets(m, legs, n);
    let mut out = CMat::zeros(dim, a.ncols());
    for col in 0..a.ncols() {
        for &(r, c, v) in &trip {
            let x = a[(c, col)];
            if x != zero() {
                out[(r, col)] += v * x;
            }
        }
    }
    out
}

/// Monomial `m` acting on the given legs of `V ⊗ V ⊗ V`.
pub fn embed_monomial(m: &Monomial, legs: Legs, n: usize) -> Monomial {
    assert_eq!(m.dim(), n * n);
    let dim = n * n * n;
    let mut target = vec![0; dim];
    let mut coef = vec![zero(); dim];
    for c in 0..n * n {
        let r = m.target[c];
        let (p, q) = (r / n, r % n);
        let (pp, qq) = (c / n, c % n);
        for s in 0..n {
            let col = legs.split(n, pp, qq, s);
            target[col] = legs.split(n, p, q, s);
            coef[col] = m.coef[c];
        }
    }
    Monomial { target, coef }
}

/// Matrix with exactly one entry per column: column `j` is `coef[j]·e_{target[j]}`.
#[derive(Clone, Debug, PartialEq)]
pub struct Monomial {
    pub target: Vec<usize>,
    pub coef: Vec<C64>,
}

impl Monomial {
    pub fn identity(dim: usize) -> Self {
        Monomial {
            target: (0..dim).collect(),
            coef: vec![one(); dim],
        }
    }

    pub fn dim(&self) -> usize {
        self.target.len()
    }

    pub fn from_dense(m: &CMat) -> Option<Self> {
        if m.nrows() != m.ncols() {
            return None;
        }
        let mut target = Vec::with_capacity(m.ncols());
        let mut coef = Vec::with_capacity(m.ncols());
        for j in 0..m.ncols() {
            let nz: Vec<usize> = (0..m.nrows()).filter(|&i| m[(i, j)] != zero()).collect();
            if nz.len() != 1 {
                return None;
            }
            target.push(nz[0]);
            coef.push(m[(nz[0], j)]);
        }
        let mut seen = vec![false; target.len()];
        for &t in &target {
            if seen[t] {
                return None;
            }
            seen[t] = true;
        }
        Some(Monomial { target, coef })
    }

    pub fn to_dense(&self) -> CMat {
        let mut out = CMat::zeros(self.dim(), self.dim());
        self.add_into(&mut out, one());
        out
    }

    pub fn add_into(&self, out: &mut CMat, scale: C64) {
        for (j, (&t, &c)) in self.target.iter().zip(&self.coef).enumerate() {
            out[(t, j)] += scale * c;
        }
    }

    /// `self · other`.
    pub fn mul(&self, other: &Monomial) -> Monomial {
        let target = other.target.iter().map(|&t| self.target[t]).collect();
        let coef = other
            .target
            .iter()
            .zip(&other.coef)
            .map(|(&t, &c)| self.coef[t] * c)
            .collect();
        Monomial { target, coef }
    }

    pub fn scale(&self, s: C64) -> Monomial {
        Monomial {
            target: self.target.clone(),
            coef: self.coef.iter().map(|c| c * s).collect(),
        }
    }

    pub fn pow(&self, k: usize) -> Monomial {
        let mut out = Monomial::identity(self.dim());
        for _ in 0..k {
            out = out.mul(self);
        }
        out
    }

    pub fn inverse(&self) -> Monomial {
        let mut target = vec![0; self.dim()];
        let mut coef = vec![zero(); self.dim()];
        for (j, (&t, &c)) in self.target.iter().zip(&self.coef).enumerate() {
            target[t] = j;
            coef[t] = one() / c;
        }
        Monomial { target, coef }
    }

    pub fn trace(&self) -> C64 {
        self.target
            .iter()
            .zip(&self.coef)
            .enumerate()
            .filter(|(j, (&t, _))| *j == t)
            .map(|(_, (_, &c))| c)
            .sum()
    }

    pub fn kron(&self, other: &Monomial) -> Monomial {
        let d = other.dim();
        let mut target = Vec::with_capacity(self.dim() * d);
        let mut coef = Vec::with_capacity(self.dim() * d);
        for j in 0..self.dim() {
            for l in 0..d {
                target.push(self.target[j] * d + other.target[l]);
                coef.push(self.coef[j] * other.coef[l]);
            }
        }
        Monomial { target, coef }
    }
}

/// Dense sum of scaled monomials.
pub fn sum_monomials(terms: &[Monomial], dim: usize) -> CMat {
    let mut out = CMat::zeros(dim, dim);
    for t in terms {
        t.add_into(&mut out, one());
    }
    out
}

/// All products `a_i · b_j` of two monomial expansions.
pub fn expand_product(a: &[Monomial], b: &[Monomial]) -> Vec<Monomial> {
    a.iter()
        .flat_map(|x| b.iter().map(move |y| x.mul(y)))
        .collect()
}
