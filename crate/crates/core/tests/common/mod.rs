//! Brute-force oracles built from Kronecker products and the literal sum
//! formulas over mode labels. Nothing here calls the sign kernels.

#![allow(dead_code)]

use fermikit_core::{ModeSet, Operator, OrderedPartition, C64};
use nalgebra::DMatrix;

pub fn c(x: f64) -> C64 {
    C64::new(x, 0.0)
}

pub fn ms(s: &str) -> ModeSet {
    s.parse().unwrap()
}

/// Bits of `index` over `n` modes, smallest label first.
pub fn bits(index: usize, n: usize) -> Vec<u8> {
    (0..n).map(|r| ((index >> (n - 1 - r)) & 1) as u8).collect()
}

pub fn index_of(bits: &[u8]) -> usize {
    bits.iter().fold(0, |acc, &b| (acc << 1) | b as usize)
}

fn m2(a: [f64; 4]) -> DMatrix<C64> {
    DMatrix::from_row_slice(2, 2, &a.map(c))
}

pub fn annihilate() -> DMatrix<C64> {
    m2([0.0, 1.0, 0.0, 0.0])
}

pub fn create() -> DMatrix<C64> {
    m2([0.0, 0.0, 1.0, 0.0])
}

pub fn z() -> DMatrix<C64> {
    m2([1.0, 0.0, 0.0, -1.0])
}

pub fn eye(d: usize) -> DMatrix<C64> {
    DMatrix::identity(d, d)
}

/// `ã_i` or `ã_i†` on `y` as `Z ⊗ … ⊗ Z ⊗ a ⊗ I ⊗ … ⊗ I`.
pub fn ladder_oracle(i: u32, y: &ModeSet, dagger: bool) -> DMatrix<C64> {
    y.labels().iter().fold(eye(1), |acc, &k| {
        let f = if k < i {
            z()
        } else if k == i {
            if dagger {
                create()
            } else {
                annihilate()
            }
        } else {
            eye(2)
        };
        acc.kronecker(&f)
    })
}

/// `Ẽ^{ν,ν'}` of the modes `x`, realised on the host `y` as the ordered
/// product of ladder combinations. With `y = x` this is the fermionic basis
/// of `x` itself, with `y ⊃ x` its canonical embedding.
pub fn fermionic_unit_oracle(x: &ModeSet, y: &ModeSet, nu: &[u8], nup: &[u8]) -> DMatrix<C64> {
    let d = y.dim();
    x.labels().iter().enumerate().fold(eye(d), |acc, (r, &i)| {
        let a = ladder_oracle(i, y, false);
        let ad = ladder_oracle(i, y, true);
        let f = match (nu[r], nup[r]) {
            (0, 0) => &a * &ad,
            (0, 1) => a,
            (1, 0) => ad,
            _ => &ad * &a,
        };
        acc * f
    })
}

fn hs(a: &DMatrix<C64>, b: &DMatrix<C64>) -> C64 {
    a.iter().zip(b.iter()).map(|(x, y)| x.conj() * y).sum()
}

/// Embedding by expanding `A` in the fermionic basis of `x` and replacing
/// every basis element by its ladder realisation on `y`.
pub fn embed_oracle(x: &ModeSet, y: &ModeSet, a: &Operator) -> DMatrix<C64> {
    let (dx, n) = (x.dim(), x.len());
    let mut out = DMatrix::zeros(y.dim(), y.dim());
    for r in 0..dx {
        for col in 0..dx {
            let (nu, nup) = (bits(r, n), bits(col, n));
            let coef = hs(&fermionic_unit_oracle(x, x, &nu, &nup), a.matrix());
            out += fermionic_unit_oracle(x, y, &nu, &nup) * coef;
        }
    }
    out
}

/// Reduced operator from the adjoint relation
/// `<Ẽ_X, ρ_X> = <embed(Ẽ_X), ρ_Y>` over the fermionic basis of `x`.
pub fn ptrace_adjoint_oracle(y: &ModeSet, x: &ModeSet, rho: &Operator) -> DMatrix<C64> {
    let (dx, n) = (x.dim(), x.len());
    let mut out = DMatrix::zeros(dx, dx);
    for r in 0..dx {
        for col in 0..dx {
            let (nu, nup) = (bits(r, n), bits(col, n));
            let coef = hs(&fermionic_unit_oracle(x, y, &nu, &nup), rho.matrix());
            out += fermionic_unit_oracle(x, x, &nu, &nup) * coef;
        }
    }
    out
}

/// `u_{X X̄}(ν) = (-1)^{Σ_{i∈X̄} ν_i Σ_{l∈X, i<l} ν_l}`.
pub fn u_bipartite(y: &ModeSet, x: &ModeSet, nu: &[u8]) -> f64 {
    let labels = y.labels();
    let mut s = 0u32;
    for (p, &i) in labels.iter().enumerate() {
        if x.contains(i) {
            continue;
        }
        for (q, &l) in labels.iter().enumerate() {
            if x.contains(l) && i < l {
                s += (nu[p] * nu[q]) as u32;
            }
        }
    }
    if s.is_multiple_of(2) {
        1.0
    } else {
        -1.0
    }
}

/// Plain partial trace over `y \ x`, by label lookup.
pub fn standard_ptrace(y: &ModeSet, x: &ModeSet, a: &DMatrix<C64>) -> DMatrix<C64> {
    let n = y.len();
    let mut out = DMatrix::zeros(x.dim(), x.dim());
    for r in 0..y.dim() {
        for col in 0..y.dim() {
            let (br, bc) = (bits(r, n), bits(col, n));
            let same_rest = y.labels().iter().enumerate().all(|(p, &l)| x.contains(l) || br[p] == bc[p]);
            if !same_rest {
                continue;
            }
            let pick = |b: &[u8]| -> Vec<u8> {
                y.labels().iter().enumerate().filter(|(_, &l)| x.contains(l)).map(|(p, _)| b[p]).collect()
            };
            out[(index_of(&pick(&br)), index_of(&pick(&bc)))] += a[(r, col)];
        }
    }
    out
}

/// `Tr_{Y,X}(U† A U)` with `U = diag(u_{X X̄})`.
pub fn ptrace_u_oracle(y: &ModeSet, x: &ModeSet, a: &Operator) -> DMatrix<C64> {
    let n = y.len();
    let u =
        DMatrix::from_fn(y.dim(), y.dim(), |r, col| if r == col { c(u_bipartite(y, x, &bits(r, n))) } else { c(0.0) });
    standard_ptrace(y, x, &(u.adjoint() * a.matrix() * &u))
}

fn sign(s: u32) -> i8 {
    if s.is_multiple_of(2) {
        1
    } else {
        -1
    }
}

/// Literal `f_Y` sum over labels.
pub fn f_sum(y: &ModeSet, nu: &[u8], nup: &[u8]) -> i8 {
    let l = y.labels();
    let mut s = 0u32;
    for p in 0..l.len() {
        for q in 0..l.len() {
            if l[p] < l[q] {
                s += (nup[p] * (nu[q] + nup[q])) as u32;
            }
        }
    }
    sign(s)
}

/// Position of each label of `y` in the list of parts.
fn part_of(y: &ModeSet, parts: &[ModeSet]) -> Vec<usize> {
    y.labels().iter().map(|&l| parts.iter().position(|p| p.contains(l)).unwrap()).collect()
}

/// Literal `h_ξ` sum: cross-part terms of the `f` exponent.
pub fn h_sum(y: &ModeSet, parts: &[ModeSet], nu: &[u8], nup: &[u8]) -> i8 {
    let l = y.labels();
    let owner = part_of(y, parts);
    let mut s = 0u32;
    for p in 0..l.len() {
        for q in 0..l.len() {
            if owner[p] != owner[q] && l[p] < l[q] {
                s += (nup[p] * (nu[q] + nup[q])) as u32;
            }
        }
    }
    sign(s)
}

/// Literal `l_ξ⃗` sum with parts in tuple order.
pub fn l_sum(xi: &OrderedPartition, nu: &[u8], nup: &[u8]) -> i8 {
    let y = xi.modes();
    let l = y.labels();
    let owner = part_of(y, xi.parts());
    let mut s = 0u32;
    for p in 0..l.len() {
        for q in 0..l.len() {
            // i at p in a later part X_r, k at q in an earlier part X_s
            if owner[q] < owner[p] && l[p] < l[q] {
                s += ((nu[p] + nup[p]) * (nu[q] + nup[q])) as u32;
            }
        }
    }
    sign(s)
}

/// Literal `u_ξ⃗` sum.
pub fn u_sum(xi: &OrderedPartition, nu: &[u8]) -> i8 {
    let y = xi.modes();
    let l = y.labels();
    let owner = part_of(y, xi.parts());
    let mut s = 0u32;
    for p in 0..l.len() {
        for q in 0..l.len() {
            if owner[q] < owner[p] && l[p] < l[q] {
                s += (nu[p] * nu[q]) as u32;
            }
        }
    }
    sign(s)
}

/// Every ordered partition of `y` (all set partitions in every order).
pub fn all_ordered_partitions(y: &ModeSet) -> Vec<OrderedPartition> {
    fn set_partitions(labels: &[u32]) -> Vec<Vec<Vec<u32>>> {
        let Some((&first, rest)) = labels.split_first() else {
            return vec![vec![]];
        };
        let mut out = Vec::new();
        for p in set_partitions(rest) {
            for k in 0..p.len() {
                let mut q = p.clone();
                q[k].insert(0, first);
                out.push(q);
            }
            let mut q = p.clone();
            q.insert(0, vec![first]);
            out.push(q);
        }
        out
    }
    fn permutations(v: Vec<Vec<u32>>) -> Vec<Vec<Vec<u32>>> {
        if v.len() <= 1 {
            return vec![v];
        }
        let mut out = Vec::new();
        for k in 0..v.len() {
            let mut rest = v.clone();
            let head = rest.remove(k);
            for mut p in permutations(rest) {
                p.insert(0, head.clone());
                out.push(p);
            }
        }
        out
    }
    let mut out = Vec::new();
    for p in set_partitions(y.labels()) {
        for order in permutations(p) {
            let parts = order.into_iter().map(|l| ModeSet::new(l).unwrap()).collect();
            out.push(OrderedPartition::new(parts).unwrap());
        }
    }
    out
}

pub fn max_diff(a: &DMatrix<C64>, b: &DMatrix<C64>) -> f64 {
    assert_eq!(a.shape(), b.shape());
    a.iter().zip(b.iter()).map(|(x, y)| (x - y).norm()).fold(0.0, f64::max)
}
