//! Superoperators: fermionic products and embeddings of maps, map parity,
//! physicality, locality and complete positivity.
//!
//! Vectorization is row-major: `vec(A)[r * d + c] = A[r, c]`. A superoperator
//! from `A_X` to `A_Z` is a `4^|Z| x 4^|X|` matrix, so maps that change the
//! subsystem (traces, partial traces) are representable.

use nalgebra::{DMatrix, DVector};

use crate::algebra::{elementary_index, hermitian_eigen, partial_trace, Basis, Operator, C64};
use crate::error::{Error, Result};
use crate::modes::{extract_bits, ModeSet, OrderedPartition, Partition};
use crate::parity::Parity;
use crate::phase::{h_sign, l_sign};

/// Largest mode set for dense superoperators (`4^n x 4^n` storage).
pub const MAP_MODE_CAP: usize = 6;

/// Dense superoperator from operators on `input` to operators on `output`.
#[derive(Clone, Debug, PartialEq)]
pub struct SuperOp {
    input: ModeSet,
    output: ModeSet,
    mat: DMatrix<C64>,
}

fn check_cap(m: &ModeSet) -> Result<()> {
    if m.len() > MAP_MODE_CAP {
        return Err(Error::Cap(format!("superoperators on {m} exceed the map cap of {MAP_MODE_CAP} modes")));
    }
    Ok(())
}

/// Row-major vectorization.
pub fn vectorize(a: &Operator) -> DVector<C64> {
    let d = a.dim();
    DVector::from_fn(d * d, |k, _| a.get(k / d, k % d))
}

/// Inverse of [`vectorize`].
pub fn unvectorize(modes: &ModeSet, v: &DVector<C64>) -> Result<Operator> {
    let d = modes.dim();
    if v.len() != d * d {
        return Err(Error::Shape(format!("vector of length {} on {modes}", v.len())));
    }
    Ok(Operator::from_fn(modes.clone(), |r, c| v[r * d + c]))
}

/// `(-1)^{|ν| + |ν'|}` for the vec index `k = ν d + ν'`.
#[inline]
fn vec_parity(k: usize, d: usize) -> bool {
    ((k / d) ^ (k % d)).count_ones() % 2 == 1
}

impl SuperOp {
    pub fn new(input: ModeSet, output: ModeSet, mat: DMatrix<C64>) -> Result<Self> {
        check_cap(&input)?;
        check_cap(&output)?;
        let (di, dout) = (input.dim().pow(2), output.dim().pow(2));
        if mat.nrows() != dout || mat.ncols() != di {
            return Err(Error::Shape(format!(
                "{}x{} matrix for a map {input} -> {output} (needs {dout}x{di})",
                mat.nrows(),
                mat.ncols()
            )));
        }
        Ok(SuperOp { input, output, mat })
    }

    /// Builds the map column by column from its action on `E^{ν,ν'}`.
    pub fn from_fn(
        input: &ModeSet,
        output: &ModeSet,
        mut f: impl FnMut(&Operator) -> Result<Operator>,
    ) -> Result<Self> {
        check_cap(input)?;
        check_cap(output)?;
        let d = input.dim();
        let mut mat = DMatrix::zeros(output.dim().pow(2), d * d);
        for k in 0..d * d {
            let e = elementary_index(input, k / d, k % d, Basis::Standard);
            let img = f(&e)?;
            if img.modes() != output {
                return Err(Error::Shape(format!("map image on {} instead of {output}", img.modes())));
            }
            mat.set_column(k, &vectorize(&img));
        }
        Ok(SuperOp { input: input.clone(), output: output.clone(), mat })
    }

    pub fn identity(modes: &ModeSet) -> Result<Self> {
        check_cap(modes)?;
        let n = modes.dim().pow(2);
        Ok(SuperOp { input: modes.clone(), output: modes.clone(), mat: DMatrix::identity(n, n) })
    }

    pub fn zeros(input: &ModeSet, output: &ModeSet) -> Result<Self> {
        Self::new(input.clone(), output.clone(), DMatrix::zeros(output.dim().pow(2), input.dim().pow(2)))
    }

    /// Diagonal map multiplying `E^{ν,ν'}` by `f(ν, ν')`.
    pub fn diagonal(modes: &ModeSet, f: impl Fn(usize, usize) -> C64) -> Result<Self> {
        check_cap(modes)?;
        let d = modes.dim();
        let diag = DVector::from_fn(d * d, |k, _| f(k / d, k % d));
        Ok(SuperOp { input: modes.clone(), output: modes.clone(), mat: DMatrix::from_diagonal(&diag) })
    }

    pub fn input(&self) -> &ModeSet {
        &self.input
    }

    pub fn output(&self) -> &ModeSet {
        &self.output
    }

    pub fn matrix(&self) -> &DMatrix<C64> {
        &self.mat
    }

    pub fn apply(&self, a: &Operator) -> Result<Operator> {
        if a.modes() != &self.input {
            return Err(Error::Shape(format!("map on {} applied to operator on {}", self.input, a.modes())));
        }
        unvectorize(&self.output, &(&self.mat * vectorize(a)))
    }

    /// `self ∘ inner`.
    pub fn compose(&self, inner: &SuperOp) -> Result<SuperOp> {
        if inner.output != self.input {
            return Err(Error::Shape(format!(
                "cannot compose a map on {} after a map into {}",
                self.input, inner.output
            )));
        }
        Ok(SuperOp { input: inner.input.clone(), output: self.output.clone(), mat: &self.mat * &inner.mat })
    }

    /// Adjoint with respect to the Hilbert-Schmidt inner product.
    pub fn adjoint(&self) -> SuperOp {
        SuperOp { input: self.output.clone(), output: self.input.clone(), mat: self.mat.adjoint() }
    }

    fn same_shape(&self, other: &SuperOp) -> Result<()> {
        if self.input != other.input || self.output != other.output {
            return Err(Error::Shape("maps between different mode sets".into()));
        }
        Ok(())
    }

    pub fn add(&self, other: &SuperOp) -> Result<SuperOp> {
        self.same_shape(other)?;
        Ok(SuperOp { mat: &self.mat + &other.mat, ..self.clone() })
    }

    pub fn sub(&self, other: &SuperOp) -> Result<SuperOp> {
        self.same_shape(other)?;
        Ok(SuperOp { mat: &self.mat - &other.mat, ..self.clone() })
    }

    pub fn scale(&self, c: C64) -> SuperOp {
        SuperOp { mat: &self.mat * c, ..self.clone() }
    }

    pub fn max_abs(&self) -> f64 {
        self.mat.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    pub fn max_abs_diff(&self, other: &SuperOp) -> f64 {
        if self.input != other.input || self.output != other.output {
            return f64::INFINITY;
        }
        self.mat.iter().zip(other.mat.iter()).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max)
    }

    /// Multiplies entry `(out, in)` of the matrix by a sign.
    fn signed(&self, f: impl Fn(usize, usize) -> f64) -> SuperOp {
        let mut mat = self.mat.clone();
        for c in 0..mat.ncols() {
            for r in 0..mat.nrows() {
                mat[(r, c)] *= f(r, c);
            }
        }
        SuperOp { mat, ..self.clone() }
    }
}

/// `A ↦ T A T`, the operator parity map `Θ_Y`.
pub fn theta_map(y: &ModeSet) -> Result<SuperOp> {
    SuperOp::diagonal(y, |a, b| C64::new(if (a ^ b).count_ones() % 2 == 0 { 1.0 } else { -1.0 }, 0.0))
}

/// `A ↦ Tr A`, landing on the empty mode set.
pub fn trace_map(y: &ModeSet) -> Result<SuperOp> {
    SuperOp::from_fn(y, &ModeSet::empty(), |a| Ok(Operator::scalar(a.trace())))
}

/// `A ↦ Aᵀ` in the computational basis.
pub fn transpose_map(y: &ModeSet) -> Result<SuperOp> {
    SuperOp::from_fn(y, y, |a| Operator::new(y.clone(), a.matrix().transpose()))
}

/// `A ↦ L A`.
pub fn left_multiply(l: &Operator) -> Result<SuperOp> {
    SuperOp::from_fn(l.modes(), l.modes(), |a| l.mul(a))
}

/// `A ↦ A R`.
pub fn right_multiply(r: &Operator) -> Result<SuperOp> {
    SuperOp::from_fn(r.modes(), r.modes(), |a| a.mul(r))
}

/// `A ↦ U A U†`.
pub fn conjugation(u: &Operator) -> Result<SuperOp> {
    let ud = u.dagger();
    SuperOp::from_fn(u.modes(), u.modes(), |a| u.mul(a)?.mul(&ud))
}

/// The fermionic partial trace `Tr̃_{Y,X}` as a map `A_Y -> A_X`.
pub fn partial_trace_map(y: &ModeSet, x: &ModeSet) -> Result<SuperOp> {
    SuperOp::from_fn(y, x, |a| partial_trace(y, x, a))
}

/// Which fermionic product of maps to build.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum MapProduct {
    /// Acts naturally on fermionic tensor products `⊗̃`.
    Fermionic,
    /// Acts naturally on ordered products `⊗̃'`.
    Ordered,
}

/// Per-part sub-indices of every vec index of `modes`.
fn split_vec_indices(modes: &ModeSet, masks: &[usize], dims: &[usize]) -> Vec<Vec<usize>> {
    let d = modes.dim();
    (0..d * d)
        .map(|k| {
            let (r, c) = (k / d, k % d);
            masks.iter().zip(dims).map(|(&m, &dk)| extract_bits(r, m) * dk + extract_bits(c, m)).collect()
        })
        .collect()
}

/// Sign of a vec index under `Ψ` (and `Λ` for the ordered kind).
fn vec_signs(modes: &ModeSet, masks: &[usize], kind: MapProduct) -> Vec<f64> {
    let d = modes.dim();
    (0..d * d)
        .map(|k| {
            let (r, c) = (k / d, k % d);
            let mut s = h_sign(masks, r, c);
            if kind == MapProduct::Ordered {
                s = s * l_sign(masks, r, c);
            }
            s.as_f64()
        })
        .collect()
}

/// Fermionic (`⊗̃`) or ordered (`⊗̃'`) product of maps.
///
/// Operand `k` must act on part `k` of `xi`. Output sets may differ from
/// input sets but must be pairwise disjoint; their tuple order follows `xi`.
pub fn map_tensor(kind: MapProduct, xi: &OrderedPartition, operands: &[SuperOp]) -> Result<SuperOp> {
    if operands.len() != xi.parts().len() {
        return Err(Error::Partition(format!("{} maps for {} parts", operands.len(), xi.parts().len())));
    }
    let mut out = ModeSet::empty();
    for (part, om) in xi.parts().iter().zip(operands) {
        if om.input() != part {
            return Err(Error::Partition(format!("map on {} given for part {part}", om.input())));
        }
        if !om.output().is_disjoint(&out) {
            return Err(Error::Partition(format!("map outputs overlap at {}", om.output())));
        }
        out = out.union(om.output());
    }
    let input = xi.modes().clone();
    check_cap(&input)?;
    check_cap(&out)?;
    let in_masks: Vec<usize> = xi.parts().iter().map(|p| p.mask_in(&input)).collect::<Result<_>>()?;
    let out_masks: Vec<usize> = operands.iter().map(|o| o.output().mask_in(&out)).collect::<Result<_>>()?;
    let in_dims: Vec<usize> = xi.parts().iter().map(ModeSet::dim).collect();
    let out_dims: Vec<usize> = operands.iter().map(|o| o.output().dim()).collect();
    let in_split = split_vec_indices(&input, &in_masks, &in_dims);
    let out_split = split_vec_indices(&out, &out_masks, &out_dims);
    let in_sign = vec_signs(&input, &in_masks, kind);
    let out_sign = vec_signs(&out, &out_masks, kind);
    let mat = DMatrix::from_fn(out_split.len(), in_split.len(), |o, i| {
        let v = operands
            .iter()
            .enumerate()
            .fold(C64::new(1.0, 0.0), |acc, (k, om)| acc * om.mat[(out_split[o][k], in_split[i][k])]);
        v * (out_sign[o] * in_sign[i])
    });
    SuperOp::new(input, out, mat)
}

/// Embeds `Ω` acting on `x` into `y` with the identity on the complement.
pub fn map_embed(kind: MapProduct, x: &ModeSet, y: &ModeSet, omega: &SuperOp) -> Result<SuperOp> {
    if !x.is_subset(y) {
        return Err(Error::Domain(format!("{x} is not a subset of {y}")));
    }
    if omega.input() != x {
        return Err(Error::Domain(format!("map on {} embedded as {x}", omega.input())));
    }
    let rest = y.difference(x);
    if rest.is_empty() {
        return Ok(omega.clone());
    }
    if x.is_empty() {
        // A map on the empty set is a scalar multiple of the trivial map.
        if !omega.output().is_empty() {
            return Err(Error::Domain("map on the empty set must land on the empty set".into()));
        }
        return Ok(SuperOp::identity(y)?.scale(omega.mat[(0, 0)]));
    }
    if !omega.output().is_disjoint(&rest) {
        return Err(Error::Domain(format!("map output {} overlaps {rest}", omega.output())));
    }
    let xi = OrderedPartition::new(vec![x.clone(), rest.clone()])?;
    map_tensor(kind, &xi, &[omega.clone(), SuperOp::identity(&rest)?])
}

/// Even and odd parts `ℙ^± Ω = (Ω ± Θ Ω Θ) / 2`.
pub fn map_parity_parts(omega: &SuperOp) -> (SuperOp, SuperOp) {
    let (din, dout) = (omega.input.dim(), omega.output.dim());
    let even = omega.signed(|o, i| if vec_parity(o, dout) == vec_parity(i, din) { 1.0 } else { 0.0 });
    let odd = omega.signed(|o, i| if vec_parity(o, dout) != vec_parity(i, din) { 1.0 } else { 0.0 });
    (even, odd)
}

/// Classifies `Ω` by comparing `Θ∘Ω` with `±Ω∘Θ`.
pub fn map_parity(omega: &SuperOp, tol: f64) -> Parity {
    let (even, odd) = map_parity_parts(omega);
    if odd.max_abs() <= tol {
        Parity::Even
    } else if even.max_abs() <= tol {
        Parity::Odd
    } else {
        Parity::Mixed
    }
}

/// Even and annihilating every odd operator.
pub fn is_physical_map(omega: &SuperOp, tol: f64) -> bool {
    if map_parity(omega, tol) != Parity::Even {
        return false;
    }
    let din = omega.input.dim();
    (0..omega.mat.ncols()).filter(|&i| vec_parity(i, din)).all(|i| omega.mat.column(i).iter().all(|z| z.norm() <= tol))
}

/// Target of a locality test.
#[derive(Clone, Copy, Debug)]
pub enum LocalTarget<'a> {
    Modes(&'a ModeSet),
    Partition(&'a Partition),
}

/// Outcome of [`is_local_map`], with the recovered local maps for audit.
#[derive(Clone, Debug)]
pub struct LocalityReport {
    pub local: bool,
    /// Whether `Ω` itself is physical; an embedding with identity on the
    /// complement never is, so this does not decide locality.
    pub physical: bool,
    /// Max entrywise misfit on the locally physical inputs.
    pub residual: f64,
    /// Whether the remainder `Ξ = Ω - (embedded factors)` is physical.
    pub remainder_physical: bool,
    /// Recovered physical factors, one per part (a single map for a mode set).
    pub factors: Vec<SuperOp>,
}

/// Residual threshold of the locality fit.
pub const LOCALITY_TOL: f64 = 1e-8;

/// Tests `X`-locality or `ξ`-locality: `Ω = (embedded physical factors) + Ξ`
/// with `Ξ` physical and vanishing on locally physical inputs.
///
/// The map restricted to locally physical inputs is compared with the
/// ordered embedding (resp. ordered product) of recovered physical factors;
/// the fit is an exact linear least-squares solve for a mode set and a
/// rank-one tensor fit for a partition. The remainder is then checked for
/// physicality at [`LOCALITY_TOL`].
pub fn is_local_map(omega: &SuperOp, target: LocalTarget<'_>, tol: f64) -> Result<LocalityReport> {
    if omega.input != omega.output {
        return Err(Error::Domain("locality needs a map from a mode set to itself".into()));
    }
    let y = omega.input.clone();
    let physical = is_physical_map(omega, tol);
    let ((residual, factors), extension) = match target {
        LocalTarget::Modes(x) => {
            let fit = fit_embedded(omega, x)?;
            let ext = map_embed(MapProduct::Ordered, x, &y, &fit.1[0])?;
            (fit, ext)
        }
        LocalTarget::Partition(xi) => {
            let fit = fit_product(omega, xi)?;
            let ext = map_tensor(MapProduct::Ordered, &xi.canonical_order(), &fit.1)?;
            (fit, ext)
        }
    };
    let factors_physical = factors.iter().all(|f| is_physical_map(f, LOCALITY_TOL));
    let remainder_physical = is_physical_map(&omega.sub(&extension)?, LOCALITY_TOL);
    Ok(LocalityReport {
        local: residual <= LOCALITY_TOL && factors_physical && remainder_physical,
        physical,
        residual,
        remainder_physical,
        factors,
    })
}

/// Local parities of a vec index are all even.
fn locally_even(k: usize, d: usize, masks: &[usize]) -> bool {
    let x = (k / d) ^ (k % d);
    masks.iter().all(|m| (x & m).count_ones().is_multiple_of(2))
}

fn fit_embedded(omega: &SuperOp, x: &ModeSet) -> Result<(f64, Vec<SuperOp>)> {
    let y = omega.input.clone();
    let mx = x.mask_in(&y)?;
    let mb = (y.dim() - 1) & !mx;
    let masks = [mx, mb];
    let d = y.dim();
    let dx = x.dim();
    let sign = vec_signs(&y, &masks, MapProduct::Ordered);
    let pair = |k: usize, m: usize, dk: usize| extract_bits(k / d, m) * dk + extract_bits(k % d, m);
    let rest = |k: usize| ((k / d) & mb, (k % d) & mb);
    let cols: Vec<usize> = (0..d * d).filter(|&k| locally_even(k, d, &masks)).collect();
    let mut sum = DMatrix::<C64>::zeros(dx * dx, dx * dx);
    let mut count = DMatrix::<f64>::zeros(dx * dx, dx * dx);
    for &i in &cols {
        for o in 0..d * d {
            if rest(o) != rest(i) || !locally_even(o, d, &masks) {
                continue;
            }
            let (a, b) = (pair(o, mx, dx), pair(i, mx, dx));
            sum[(a, b)] += omega.mat[(o, i)] * (sign[o] * sign[i]);
            count[(a, b)] += 1.0;
        }
    }
    let w = DMatrix::from_fn(dx * dx, dx * dx, |a, b| {
        if count[(a, b)] > 0.0 {
            sum[(a, b)] / count[(a, b)]
        } else {
            C64::new(0.0, 0.0)
        }
    });
    let mut residual = 0.0f64;
    for &i in &cols {
        for o in 0..d * d {
            let model = if rest(o) == rest(i) && locally_even(o, d, &masks) {
                w[(pair(o, mx, dx), pair(i, mx, dx))] * (sign[o] * sign[i])
            } else {
                C64::new(0.0, 0.0)
            };
            residual = residual.max((omega.mat[(o, i)] - model).norm());
        }
    }
    Ok((residual, vec![SuperOp::new(x.clone(), x.clone(), w)?]))
}

fn fit_product(omega: &SuperOp, xi: &Partition) -> Result<(f64, Vec<SuperOp>)> {
    let y = omega.input.clone();
    if xi.modes() != &y {
        return Err(Error::Partition(format!("partition {xi} does not cover {y}")));
    }
    let masks = xi.masks();
    let d = y.dim();
    let dims: Vec<usize> = xi.parts().iter().map(|p| p.dim() * p.dim()).collect();
    let sizes: Vec<usize> = dims.iter().map(|&n| n * n).collect();
    let total: usize = sizes.iter().product();
    let mut strides = vec![1usize; sizes.len()];
    for k in (0..sizes.len().saturating_sub(1)).rev() {
        strides[k] = strides[k + 1] * sizes[k + 1];
    }
    let parts_dim: Vec<usize> = xi.parts().iter().map(ModeSet::dim).collect();
    let split = split_vec_indices(&y, &masks, &parts_dim);
    let sign = vec_signs(&y, &masks, MapProduct::Ordered);
    let cols: Vec<usize> = (0..d * d).filter(|&k| locally_even(k, d, &masks)).collect();
    let mut t = vec![C64::new(0.0, 0.0); total];
    let mut outside = 0.0f64;
    for &i in &cols {
        for o in 0..d * d {
            let v = omega.mat[(o, i)];
            if !locally_even(o, d, &masks) {
                outside = outside.max(v.norm());
                continue;
            }
            let flat: usize = (0..sizes.len()).map(|k| (split[o][k] * dims[k] + split[i][k]) * strides[k]).sum();
            t[flat] = v * (sign[o] * sign[i]);
        }
    }
    let norm = t.iter().map(|z| z.norm()).fold(0.0, f64::max);
    if norm == 0.0 {
        let factors = xi.parts().iter().map(|p| SuperOp::zeros(p, p)).collect::<Result<_>>()?;
        return Ok((outside, factors));
    }
    // Leading left singular vector of every single-part flattening.
    let mut us: Vec<DVector<C64>> = Vec::new();
    for k in 0..sizes.len() {
        let n = sizes[k];
        let mut gram = DMatrix::<C64>::zeros(n, n);
        let other = total / n;
        let mut cols_k: Vec<Vec<C64>> = vec![vec![C64::new(0.0, 0.0); n]; other];
        for (flat, v) in t.iter().enumerate() {
            if v.norm() == 0.0 {
                continue;
            }
            let p = flat / strides[k] % n;
            let q = flat / (strides[k] * n) * strides[k] + flat % strides[k];
            cols_k[q][p] = *v;
        }
        for col in cols_k.iter().filter(|c| c.iter().any(|z| z.norm() > 0.0)) {
            for a in 0..n {
                if col[a].norm() == 0.0 {
                    continue;
                }
                for b in 0..n {
                    gram[(a, b)] += col[a] * col[b].conj();
                }
            }
        }
        let eig = hermitian_eigen(gram);
        let top = eig.eigenvalues.imax();
        us.push(eig.eigenvectors.column(top).into_owned());
    }
    let product_at = |flat: usize| -> C64 {
        (0..sizes.len()).fold(C64::new(1.0, 0.0), |acc, k| acc * us[k][flat / strides[k] % sizes[k]])
    };
    let coeff: C64 = t.iter().enumerate().map(|(f, v)| product_at(f).conj() * v).sum();
    let residual = t.iter().enumerate().map(|(f, v)| (v - coeff * product_at(f)).norm()).fold(outside, f64::max);
    let factors = xi
        .parts()
        .iter()
        .enumerate()
        .map(|(k, p)| {
            let n = dims[k];
            let scale = if k == 0 { coeff } else { C64::new(1.0, 0.0) };
            SuperOp::new(p.clone(), p.clone(), DMatrix::from_fn(n, n, |a, b| us[k][a * n + b] * scale))
        })
        .collect::<Result<_>>()?;
    Ok((residual, factors))
}

/// Choi matrix with block `(ν, ν')` equal to `Ω(E^{ν,ν'})`.
#[derive(Clone, Debug, PartialEq)]
pub struct ChoiMatrix {
    pub input: ModeSet,
    pub output: ModeSet,
    pub matrix: DMatrix<C64>,
}

pub fn choi(omega: &SuperOp) -> ChoiMatrix {
    let (din, dout) = (omega.input.dim(), omega.output.dim());
    let matrix = DMatrix::from_fn(din * dout, din * dout, |r, c| {
        let (nu, mu) = (r / dout, r % dout);
        let (nup, mup) = (c / dout, c % dout);
        omega.mat[(mu * dout + mup, nu * din + nup)]
    });
    ChoiMatrix { input: omega.input.clone(), output: omega.output.clone(), matrix }
}

/// Details of a TPCP check.
#[derive(Clone, Debug, PartialEq)]
pub struct TpcpReport {
    pub completely_positive: bool,
    pub trace_preserving: bool,
    pub choi_min_eigenvalue: f64,
    pub trace_residual: f64,
}

impl TpcpReport {
    pub fn is_tpcp(&self) -> bool {
        self.completely_positive && self.trace_preserving
    }
}

pub fn tpcp_report(omega: &SuperOp, tol: f64) -> TpcpReport {
    let c = choi(omega);
    let herm = (&c.matrix + c.matrix.adjoint()) * C64::new(0.5, 0.0);
    let skew = (&c.matrix - &herm).iter().map(|z| z.norm()).fold(0.0, f64::max);
    let min_eig = hermitian_eigen(herm).eigenvalues.iter().copied().fold(f64::INFINITY, f64::min);
    let (din, dout) = (omega.input.dim(), omega.output.dim());
    let mut trace_residual = 0.0f64;
    for nu in 0..din {
        for nup in 0..din {
            let tr: C64 = (0..dout).map(|mu| omega.mat[(mu * dout + mu, nu * din + nup)]).sum();
            let want = if nu == nup { 1.0 } else { 0.0 };
            trace_residual = trace_residual.max((tr - want).norm());
        }
    }
    TpcpReport {
        completely_positive: skew <= tol && min_eig >= -tol,
        trace_preserving: trace_residual <= tol,
        choi_min_eigenvalue: min_eig,
        trace_residual,
    }
}

/// Completely positive (Choi PSD) and trace preserving.
pub fn is_tpcp(omega: &SuperOp, tol: f64) -> bool {
    tpcp_report(omega, tol).is_tpcp()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::{jw_ladder, LadderKind, DEFAULT_TOL};

    fn ms(s: &str) -> ModeSet {
        s.parse().unwrap()
    }

    #[test]
    fn apply_examples() {
        let y = ms("{1,2}");
        let a = jw_ladder(2, &y, LadderKind::Annihilate).unwrap();
        assert_eq!(SuperOp::identity(&y).unwrap().apply(&a).unwrap(), a);
        assert_eq!(theta_map(&y).unwrap().apply(&a).unwrap(), a.scale(C64::new(-1.0, 0.0)));
        let t = trace_map(&y).unwrap().apply(&Operator::identity(&y)).unwrap();
        assert_eq!(t.as_scalar().unwrap(), C64::new(4.0, 0.0));
    }

    #[test]
    fn parity_examples() {
        let y = ms("{1,2}");
        assert_eq!(map_parity(&theta_map(&y).unwrap(), DEFAULT_TOL), Parity::Even);
        let a = jw_ladder(1, &y, LadderKind::Annihilate).unwrap();
        let left = left_multiply(&a).unwrap();
        assert_eq!(map_parity(&left, DEFAULT_TOL), Parity::Odd);
        let sum = left.add(&SuperOp::identity(&y).unwrap()).unwrap();
        assert_eq!(map_parity(&sum, DEFAULT_TOL), Parity::Mixed);
        assert!(!is_physical_map(&SuperOp::identity(&y).unwrap(), DEFAULT_TOL));
        assert!(!is_physical_map(&theta_map(&y).unwrap(), DEFAULT_TOL));
    }

    #[test]
    fn tpcp_examples() {
        let y = ms("{1,2}");
        assert!(is_tpcp(&theta_map(&y).unwrap(), DEFAULT_TOL));
        assert!(!is_tpcp(&transpose_map(&y).unwrap(), DEFAULT_TOL));
        assert!(is_tpcp(&partial_trace_map(&y, &ms("{2}")).unwrap(), DEFAULT_TOL));
    }

    #[test]
    fn identity_choi_on_four_modes_has_finite_spectrum() {
        let y = ModeSet::range(4).unwrap();
        let r = tpcp_report(&SuperOp::identity(&y).unwrap(), DEFAULT_TOL);
        assert!(r.choi_min_eigenvalue.abs() <= 1e-12);
        assert!(r.is_tpcp());
    }

    #[test]
    fn cap_is_enforced() {
        assert!(matches!(SuperOp::identity(&ModeSet::range(7).unwrap()), Err(Error::Cap(_))));
    }
}
