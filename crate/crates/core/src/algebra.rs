//! Operators on occupation spaces and the fermionic operations on them.
//!
//! An [`Operator`] is a plain coefficient matrix in the computational basis.
//! Whether it was built from standard or fermionic basis elements is a
//! matter of which constructor produced it.

use std::fmt;

use nalgebra::{DMatrix, Dyn, SymmetricEigen};
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::modes::{deposit_bits, extract_bits, pattern_index, ModeSet, OccPattern, OrderedPartition, Partition};
use crate::phase::{f_sign, h_sign, l_sign};

pub type C64 = Complex64;

/// Default entrywise absolute tolerance.
pub const DEFAULT_TOL: f64 = 1e-10;

/// A `2^|Y| x 2^|Y|` complex matrix tagged with its mode set.
#[derive(Clone, Debug, PartialEq)]
pub struct Operator {
    modes: ModeSet,
    mat: DMatrix<C64>,
}

impl Operator {
    pub fn new(modes: ModeSet, mat: DMatrix<C64>) -> Result<Self> {
        let d = modes.dim();
        if mat.nrows() != d || mat.ncols() != d {
            return Err(Error::Shape(format!("{}x{} matrix on {modes} (needs {d}x{d})", mat.nrows(), mat.ncols())));
        }
        Ok(Operator { modes, mat })
    }

    pub fn from_fn(modes: ModeSet, f: impl FnMut(usize, usize) -> C64) -> Self {
        let d = modes.dim();
        Operator { mat: DMatrix::from_fn(d, d, f), modes }
    }

    pub fn zeros(modes: &ModeSet) -> Self {
        let d = modes.dim();
        Operator { modes: modes.clone(), mat: DMatrix::zeros(d, d) }
    }

    pub fn identity(modes: &ModeSet) -> Self {
        let d = modes.dim();
        Operator { modes: modes.clone(), mat: DMatrix::identity(d, d) }
    }

    /// A 1x1 operator on the empty mode set.
    pub fn scalar(c: C64) -> Self {
        Operator { modes: ModeSet::empty(), mat: DMatrix::from_element(1, 1, c) }
    }

    pub fn diagonal(modes: &ModeSet, f: impl Fn(usize) -> C64) -> Self {
        Self::from_fn(modes.clone(), |r, c| if r == c { f(r) } else { C64::new(0.0, 0.0) })
    }

    pub fn modes(&self) -> &ModeSet {
        &self.modes
    }

    pub fn matrix(&self) -> &DMatrix<C64> {
        &self.mat
    }

    pub fn into_matrix(self) -> DMatrix<C64> {
        self.mat
    }

    pub fn dim(&self) -> usize {
        self.mat.nrows()
    }

    pub fn get(&self, r: usize, c: usize) -> C64 {
        self.mat[(r, c)]
    }

    /// The single entry of an operator on the empty set.
    pub fn as_scalar(&self) -> Result<C64> {
        if !self.modes.is_empty() {
            return Err(Error::Shape(format!("operator on {} is not a scalar", self.modes)));
        }
        Ok(self.mat[(0, 0)])
    }

    pub fn dagger(&self) -> Operator {
        Operator { modes: self.modes.clone(), mat: self.mat.adjoint() }
    }

    pub fn trace(&self) -> C64 {
        self.mat.trace()
    }

    fn same_modes(&self, other: &Operator, what: &str) -> Result<()> {
        if self.modes != other.modes {
            return Err(Error::Shape(format!("{what} of operators on {} and {}", self.modes, other.modes)));
        }
        Ok(())
    }

    pub fn mul(&self, other: &Operator) -> Result<Operator> {
        self.same_modes(other, "product")?;
        Ok(Operator { modes: self.modes.clone(), mat: &self.mat * &other.mat })
    }

    pub fn add(&self, other: &Operator) -> Result<Operator> {
        self.same_modes(other, "sum")?;
        Ok(Operator { modes: self.modes.clone(), mat: &self.mat + &other.mat })
    }

    pub fn sub(&self, other: &Operator) -> Result<Operator> {
        self.same_modes(other, "difference")?;
        Ok(Operator { modes: self.modes.clone(), mat: &self.mat - &other.mat })
    }

    pub fn scale(&self, c: C64) -> Operator {
        Operator { modes: self.modes.clone(), mat: &self.mat * c }
    }

    /// `AB + BA`.
    pub fn anticommutator(&self, other: &Operator) -> Result<Operator> {
        self.mul(other)?.add(&other.mul(self)?)
    }

    /// `AB - BA`.
    pub fn commutator(&self, other: &Operator) -> Result<Operator> {
        self.mul(other)?.sub(&other.mul(self)?)
    }

    pub fn max_abs(&self) -> f64 {
        self.mat.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    /// Largest entrywise deviation; infinite when the mode sets differ.
    pub fn max_abs_diff(&self, other: &Operator) -> f64 {
        if self.modes != other.modes {
            return f64::INFINITY;
        }
        self.mat.iter().zip(other.mat.iter()).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max)
    }

    pub fn approx_eq(&self, other: &Operator, tol: f64) -> bool {
        self.max_abs_diff(other) <= tol
    }

    /// `max |A - A†|`.
    pub fn hermiticity_residual(&self) -> f64 {
        let d = self.dim();
        let mut worst = 0.0f64;
        for r in 0..d {
            for c in r..d {
                worst = worst.max((self.mat[(r, c)] - self.mat[(c, r)].conj()).norm());
            }
        }
        worst
    }

    pub fn is_hermitian(&self, tol: f64) -> bool {
        self.hermiticity_residual() <= tol
    }

    /// Multiplies entry `(r, c)` by `f(r, c)`.
    pub fn map_entries(&self, f: impl Fn(usize, usize) -> f64) -> Operator {
        let mut mat = self.mat.clone();
        for c in 0..mat.ncols() {
            for r in 0..mat.nrows() {
                mat[(r, c)] *= f(r, c);
            }
        }
        Operator { modes: self.modes.clone(), mat }
    }

    /// Smallest eigenvalue of the Hermitian part.
    pub fn min_eigenvalue(&self) -> f64 {
        let h = (&self.mat + self.mat.adjoint()) * C64::new(0.5, 0.0);
        hermitian_eigen(h).eigenvalues.iter().copied().fold(f64::INFINITY, f64::min)
    }
}

/// Eigendecomposition of a Hermitian matrix.
///
/// The dense solver can return NaN on very sparse, highly degenerate inputs
/// (e.g. the Choi matrix of the identity on four modes), so the spectrum is
/// computed for `h + sI` with `s` above the spectral radius and shifted back.
pub(crate) fn hermitian_eigen(h: DMatrix<C64>) -> SymmetricEigen<C64, Dyn> {
    let n = h.nrows();
    let shift = 1.0 + (0..n).map(|r| h.row(r).iter().map(|z| z.norm()).sum::<f64>()).fold(0.0, f64::max);
    let mut eig = (h + DMatrix::<C64>::identity(n, n) * C64::new(shift, 0.0)).symmetric_eigen();
    eig.eigenvalues.iter_mut().for_each(|e| *e -= shift);
    eig
}

impl fmt::Display for Operator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "operator on {}", self.modes)?;
        for r in 0..self.dim() {
            let row: Vec<String> = (0..self.dim()).map(|c| format!("{}", self.mat[(r, c)])).collect();
            writeln!(f, "  [{}]", row.join(", "))?;
        }
        Ok(())
    }
}

/// Standard basis `E` or fermionic basis `Ẽ = f E`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Basis {
    Standard,
    Fermionic,
}

/// Direction of an invertible sign map. Both directions coincide numerically.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Direction {
    Forward,
    Inverse,
}

/// Single-mode operator selected for [`jw_ladder`].
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum LadderKind {
    Create,
    Annihilate,
    Number,
    Hole,
    Phase,
    Identity,
}

impl LadderKind {
    /// The 2x2 matrix on one mode, basis order `|0>, |1>`.
    pub fn matrix(self) -> DMatrix<C64> {
        let (a, b, c, d) = match self {
            LadderKind::Create => (0.0, 0.0, 1.0, 0.0),
            LadderKind::Annihilate => (0.0, 1.0, 0.0, 0.0),
            LadderKind::Number => (0.0, 0.0, 0.0, 1.0),
            LadderKind::Hole => (1.0, 0.0, 0.0, 0.0),
            LadderKind::Phase => (1.0, 0.0, 0.0, -1.0),
            LadderKind::Identity => (1.0, 0.0, 0.0, 1.0),
        };
        DMatrix::from_row_slice(2, 2, &[a, b, c, d].map(|x| C64::new(x, 0.0)))
    }

    pub fn is_odd(self) -> bool {
        matches!(self, LadderKind::Create | LadderKind::Annihilate)
    }
}

fn one() -> C64 {
    C64::new(1.0, 0.0)
}

fn zero() -> C64 {
    C64::new(0.0, 0.0)
}

/// `E^{ν,ν'}` or `Ẽ^{ν,ν'}` on `y`.
pub fn elementary(y: &ModeSet, nu: &OccPattern, nup: &OccPattern, basis: Basis) -> Result<Operator> {
    let (a, b) = (pattern_index(y, nu)?, pattern_index(y, nup)?);
    Ok(elementary_index(y, a, b, basis))
}

pub(crate) fn elementary_index(y: &ModeSet, a: usize, b: usize, basis: Basis) -> Operator {
    let mut op = Operator::zeros(y);
    op.mat[(a, b)] = match basis {
        Basis::Standard => one(),
        Basis::Fermionic => C64::new(f_sign(a, b).as_f64(), 0.0),
    };
    op
}

/// Jordan-Wigner representation of a single-mode operator at mode `i`.
///
/// Odd selections get the phase string `p` on every mode before `i`.
pub fn jw_ladder(i: u32, y: &ModeSet, which: LadderKind) -> Result<Operator> {
    let bit = y.bit_of(i).ok_or_else(|| Error::Domain(format!("mode {i} is not in {y}")))?;
    let single = which.matrix();
    let before = !((1usize << (bit + 1)) - 1) & (y.dim() - 1);
    let rest = (y.dim() - 1) & !(1usize << bit);
    Ok(Operator::from_fn(y.clone(), |r, c| {
        if r & rest != c & rest {
            return zero();
        }
        let v = single[((r >> bit) & 1, (c >> bit) & 1)];
        if which.is_odd() && (r & before).count_ones() % 2 == 1 {
            -v
        } else {
            v
        }
    }))
}

/// `Φ_Y`: entrywise multiplication by `f`.
pub fn phi(y: &ModeSet, a: &Operator, _direction: Direction) -> Result<Operator> {
    if a.modes() != y {
        return Err(Error::Shape(format!("operator on {} passed as {y}", a.modes())));
    }
    Ok(a.map_entries(|r, c| f_sign(r, c).as_f64()))
}

/// `Ψ_ξ`: entrywise multiplication by `h`.
pub fn psi(xi: &Partition, a: &Operator, _direction: Direction) -> Result<Operator> {
    if a.modes() != xi.modes() {
        return Err(Error::Partition(format!("partition {xi} does not cover {}", a.modes())));
    }
    let masks = xi.masks();
    Ok(a.map_entries(|r, c| h_sign(&masks, r, c).as_f64()))
}

/// `Λ_ξ⃗`: entrywise multiplication by `l`.
pub fn lambda_map(xi: &OrderedPartition, a: &Operator, _direction: Direction) -> Result<Operator> {
    if a.modes() != xi.modes() {
        return Err(Error::Partition(format!("partition {xi} does not cover {}", a.modes())));
    }
    let masks = xi.masks();
    Ok(a.map_entries(|r, c| l_sign(&masks, r, c).as_f64()))
}

/// Plain tensor product with indices interleaved into the union's order.
pub fn tensor_standard(operands: &[Operator]) -> Result<Operator> {
    let mut y = ModeSet::empty();
    for op in operands {
        if !op.modes().is_disjoint(&y) {
            return Err(Error::Partition(format!("operand on {} overlaps {y}", op.modes())));
        }
        y = y.union(op.modes());
    }
    let masks: Vec<usize> = operands.iter().map(|op| op.modes().mask_in(&y)).collect::<Result<_>>()?;
    Ok(Operator::from_fn(y, |r, c| {
        operands.iter().zip(&masks).fold(one(), |acc, (op, &m)| acc * op.mat[(extract_bits(r, m), extract_bits(c, m))])
    }))
}

fn match_operands<'a>(parts: &[ModeSet], operands: &'a [Operator]) -> Result<Vec<&'a Operator>> {
    if parts.len() != operands.len() {
        return Err(Error::Partition(format!("{} operands for {} parts", operands.len(), parts.len())));
    }
    parts
        .iter()
        .map(|p| {
            operands
                .iter()
                .find(|op| op.modes() == p)
                .ok_or_else(|| Error::Partition(format!("no operand on part {p}")))
        })
        .collect()
}

/// Fermionic tensor product `⊗̃`; operands are matched to parts by mode set.
pub fn tensor_fermionic(xi: &Partition, operands: &[Operator]) -> Result<Operator> {
    let ops: Vec<Operator> = match_operands(xi.parts(), operands)?.into_iter().cloned().collect();
    psi(xi, &tensor_standard(&ops)?, Direction::Forward)
}

/// Plain `A ⊗ I` on `y`, the non-fermionic embedding.
pub fn embed_standard(x: &ModeSet, y: &ModeSet, a: &Operator) -> Result<Operator> {
    check_embed(x, y, a)?;
    tensor_standard(&[a.clone(), Operator::identity(&y.difference(x))])
}

fn check_embed(x: &ModeSet, y: &ModeSet, a: &Operator) -> Result<()> {
    if !x.is_subset(y) {
        return Err(Error::Domain(format!("{x} is not a subset of {y}")));
    }
    if a.modes() != x {
        return Err(Error::Domain(format!("operator on {} embedded as {x}", a.modes())));
    }
    Ok(())
}

/// Fermionic canonical embedding `A ⊗̃ I` of an operator on `x` into `y`.
pub fn embed(x: &ModeSet, y: &ModeSet, a: &Operator) -> Result<Operator> {
    check_embed(x, y, a)?;
    let mx = x.mask_in(y)?;
    let mb = (y.dim() - 1) & !mx;
    let masks = [mx, mb];
    Ok(Operator::from_fn(y.clone(), |r, c| {
        if r & mb != c & mb {
            return zero();
        }
        a.mat[(extract_bits(r, mx), extract_bits(c, mx))] * h_sign(&masks, r, c).as_f64()
    }))
}

/// Ordered product `⊗̃'`: the product of embeddings in tuple order.
pub fn ordered_product(xi: &OrderedPartition, operands: &[Operator]) -> Result<Operator> {
    if xi.parts().len() != operands.len() {
        return Err(Error::Partition(format!("{} operands for {} parts", operands.len(), xi.parts().len())));
    }
    let y = xi.modes();
    let mut acc = Operator::identity(y);
    for (part, op) in xi.parts().iter().zip(operands) {
        if op.modes() != part {
            return Err(Error::Partition(format!("operand on {} given for part {part}", op.modes())));
        }
        acc = acc.mul(&embed(part, y, op)?)?;
    }
    Ok(acc)
}

/// Fermionic partial trace `Tr̃_{Y,X}`.
pub fn partial_trace(y: &ModeSet, x: &ModeSet, a: &Operator) -> Result<Operator> {
    if a.modes() != y {
        return Err(Error::Domain(format!("operator on {} traced as {y}", a.modes())));
    }
    if !x.is_subset(y) {
        return Err(Error::Domain(format!("{x} is not a subset of {y}")));
    }
    let mx = x.mask_in(y)?;
    let mb = (y.dim() - 1) & !mx;
    let db = 1usize << mb.count_ones();
    let rest: Vec<usize> = (0..db).map(|c| deposit_bits(c, mb)).collect();
    Ok(Operator::from_fn(x.clone(), |r, c| {
        let (rr, cc) = (deposit_bits(r, mx), deposit_bits(c, mx));
        let sum = rest.iter().fold(zero(), |acc, &k| {
            let (i, j) = (rr | k, cc | k);
            acc + a.mat[(i, j)] * f_sign(i, j).as_f64()
        });
        sum * f_sign(r, c).as_f64()
    }))
}

/// Hilbert-Schmidt pairing `Tr(A† B)`.
pub fn hs_inner(a: &Operator, b: &Operator) -> Result<C64> {
    if a.modes() != b.modes() {
        return Err(Error::Shape(format!("inner product of operators on {} and {}", a.modes(), b.modes())));
    }
    Ok(a.mat.iter().zip(b.mat.iter()).map(|(x, y)| x.conj() * y).sum())
}
