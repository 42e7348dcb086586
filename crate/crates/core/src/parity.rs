//! Fermion-number parity on vectors, operators and maps; local parity
//! sectors; the tensor-product-structure unitary; and the product-extension
//! classifier.

use std::fmt;

use nalgebra::DVector;

use crate::algebra::{embed, ordered_product, tensor_standard, Operator, C64};
use crate::error::{Error, Result};
use crate::maps::SuperOp;
use crate::modes::{ModeSet, OrderedPartition, Partition};
use crate::phase::{u_sign, Sign};

/// Parity class of a vector, operator or map.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Parity {
    Even,
    Odd,
    Mixed,
}

impl fmt::Display for Parity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Parity::Even => "even",
            Parity::Odd => "odd",
            Parity::Mixed => "mixed",
        })
    }
}

/// A choice of local parity `ε_X` for every part of a partition.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct ParitySector {
    partition: Partition,
    signs: Vec<Sign>,
}

impl ParitySector {
    /// Signs are listed in the partition's canonical part order.
    pub fn new(partition: &Partition, signs: Vec<Sign>) -> Result<Self> {
        if signs.len() != partition.parts().len() {
            return Err(Error::Sector(format!(
                "{} signs for the {} parts of {partition}",
                signs.len(),
                partition.parts().len()
            )));
        }
        Ok(ParitySector { partition: partition.clone(), signs })
    }

    /// Parses the glyph syntax `"++-"`.
    pub fn parse(partition: &Partition, s: &str) -> Result<Self> {
        let signs = s
            .trim()
            .chars()
            .map(|c| Sign::from_glyph(c).ok_or_else(|| Error::Sector(format!("bad sector glyph {c:?}"))))
            .collect::<Result<Vec<_>>>()?;
        Self::new(partition, signs)
    }

    pub fn all_even(partition: &Partition) -> Self {
        ParitySector { partition: partition.clone(), signs: vec![Sign::Plus; partition.parts().len()] }
    }

    /// Every sector of `partition`, `+` before `-`, first part most significant.
    pub fn all(partition: &Partition) -> Vec<Self> {
        let k = partition.parts().len();
        (0..1usize << k)
            .map(|m| ParitySector {
                partition: partition.clone(),
                signs: (0..k).map(|j| Sign::from_parity((m >> (k - 1 - j)) as u32 & 1)).collect(),
            })
            .collect()
    }

    pub fn partition(&self) -> &Partition {
        &self.partition
    }

    pub fn signs(&self) -> &[Sign] {
        &self.signs
    }

    /// Whether the operator entry `(a, b)` lies in this sector.
    fn contains_entry(&self, masks: &[usize], a: usize, b: usize) -> bool {
        let d = a ^ b;
        masks.iter().zip(&self.signs).all(|(m, &s)| Sign::from_parity((d & m).count_ones()) == s)
    }
}

impl fmt::Display for ParitySector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for s in &self.signs {
            write!(f, "{}", s.glyph())?;
        }
        Ok(())
    }
}

/// State vector on a mode set.
#[derive(Clone, Debug, PartialEq)]
pub struct StateVector {
    modes: ModeSet,
    amps: DVector<C64>,
}

impl StateVector {
    pub fn new(modes: ModeSet, amps: DVector<C64>) -> Result<Self> {
        if amps.len() != modes.dim() {
            return Err(Error::Shape(format!("{} amplitudes on {modes}", amps.len())));
        }
        if amps.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(Error::Input("amplitudes must be finite".into()));
        }
        Ok(StateVector { modes, amps })
    }

    /// The occupation basis vector with index `index`.
    pub fn basis(modes: &ModeSet, index: usize) -> Result<Self> {
        if index >= modes.dim() {
            return Err(Error::Domain(format!("index {index} out of range for {modes}")));
        }
        let amps = DVector::from_fn(modes.dim(), |k, _| C64::new(if k == index { 1.0 } else { 0.0 }, 0.0));
        Ok(StateVector { modes: modes.clone(), amps })
    }

    /// The vacuum `|0...0>`.
    pub fn vacuum(modes: &ModeSet) -> Self {
        Self::basis(modes, 0).expect("index 0 always exists")
    }

    pub fn modes(&self) -> &ModeSet {
        &self.modes
    }

    pub fn amplitudes(&self) -> &DVector<C64> {
        &self.amps
    }

    pub fn norm(&self) -> f64 {
        self.amps.norm()
    }

    /// `|ψ><ψ|`.
    pub fn projector(&self) -> Operator {
        Operator::from_fn(self.modes.clone(), |r, c| self.amps[r] * self.amps[c].conj())
    }

    pub fn apply(&self, a: &Operator) -> Result<StateVector> {
        if a.modes() != &self.modes {
            return Err(Error::Shape(format!("operator on {} applied to vector on {}", a.modes(), self.modes)));
        }
        Ok(StateVector { modes: self.modes.clone(), amps: a.matrix() * &self.amps })
    }

    pub fn max_abs_diff(&self, other: &StateVector) -> f64 {
        if self.modes != other.modes {
            return f64::INFINITY;
        }
        self.amps.iter().zip(other.amps.iter()).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max)
    }
}

#[inline]
fn parity_sign(index: usize) -> f64 {
    if index.count_ones().is_multiple_of(2) {
        1.0
    } else {
        -1.0
    }
}

/// `T_Y = diag((-1)^{|ν|})`.
pub fn parity_operator(y: &ModeSet) -> Operator {
    Operator::diagonal(y, |k| C64::new(parity_sign(k), 0.0))
}

/// `P^± = (I ± T_Y) / 2`.
pub fn parity_projector(y: &ModeSet, sign: Sign) -> Operator {
    Operator::diagonal(y, |k| C64::new(if parity_sign(k) == sign.as_f64() { 1.0 } else { 0.0 }, 0.0))
}

/// Vector-level local projector `∏_X embed(P_X^{ε_X})`.
pub fn local_parity_projector(sector: &ParitySector) -> Result<Operator> {
    let xi = sector.partition();
    let ops: Vec<Operator> = xi.parts().iter().zip(sector.signs()).map(|(p, &s)| parity_projector(p, s)).collect();
    let mut acc = Operator::identity(xi.modes());
    for (p, op) in xi.parts().iter().zip(&ops) {
        acc = acc.mul(&embed(p, xi.modes(), op)?)?;
    }
    Ok(acc)
}

/// Operator-level projector `Π_ξ^ε` as a superoperator.
pub fn local_parity_superprojector(sector: &ParitySector) -> Result<SuperOp> {
    let masks = sector.partition().masks();
    SuperOp::diagonal(sector.partition().modes(), |a, b| {
        C64::new(if sector.contains_entry(&masks, a, b) { 1.0 } else { 0.0 }, 0.0)
    })
}

/// `Π_ξ^ε(A)`: keeps the entries of `A` in the sector.
pub fn project_sector(sector: &ParitySector, a: &Operator) -> Result<Operator> {
    if a.modes() != sector.partition().modes() {
        return Err(Error::Sector(format!(
            "sector over {} applied to operator on {}",
            sector.partition().modes(),
            a.modes()
        )));
    }
    let masks = sector.partition().masks();
    Ok(a.map_entries(|r, c| if sector.contains_entry(&masks, r, c) { 1.0 } else { 0.0 }))
}

/// Nonzero sector components of `A`, in [`ParitySector::all`] order.
pub fn sectors(xi: &Partition, a: &Operator, tol: f64) -> Result<Vec<(ParitySector, Operator)>> {
    let mut out = Vec::new();
    for s in ParitySector::all(xi) {
        let block = project_sector(&s, a)?;
        if block.max_abs() > tol {
            out.push((s, block));
        }
    }
    Ok(out)
}

/// `Θ_Y(A) = T A T`.
pub fn theta(a: &Operator) -> Operator {
    a.map_entries(|r, c| parity_sign(r ^ c))
}

/// Even and odd parts `Π^±(A)`.
pub fn parity_parts(a: &Operator) -> (Operator, Operator) {
    let even = a.map_entries(|r, c| if (r ^ c).count_ones() % 2 == 0 { 1.0 } else { 0.0 });
    let odd = a.map_entries(|r, c| if (r ^ c).count_ones() % 2 == 1 { 1.0 } else { 0.0 });
    (even, odd)
}

/// Even, odd, or mixed within `tol` (max entry of the complementary part).
/// The zero operator counts as even.
pub fn operator_parity(a: &Operator, tol: f64) -> Parity {
    let (even, odd) = parity_parts(a);
    if odd.max_abs() <= tol {
        Parity::Even
    } else if even.max_abs() <= tol {
        Parity::Odd
    } else {
        Parity::Mixed
    }
}

/// Even (`+1`), odd (`-1`) or mixed support of a vector.
pub fn vector_parity(v: &StateVector, tol: f64) -> Parity {
    let worst = |want: u32| {
        v.amps.iter().enumerate().filter(|(k, _)| k.count_ones() % 2 == want).map(|(_, z)| z.norm()).fold(0.0, f64::max)
    };
    if worst(1) <= tol {
        Parity::Even
    } else if worst(0) <= tol {
        Parity::Odd
    } else {
        Parity::Mixed
    }
}

/// `U_ξ⃗ = diag(u_ξ⃗(ν))`.
pub fn tps_unitary(xi: &OrderedPartition) -> Operator {
    let masks = xi.masks();
    Operator::diagonal(xi.modes(), |k| C64::new(u_sign(&masks, k).as_f64(), 0.0))
}

/// `U_ξ⃗ (⊗ |ψ_X>)`, the joint vector of locally parity-definite vectors.
pub fn tensor_vectors(xi: &OrderedPartition, vectors: &[StateVector]) -> Result<StateVector> {
    if vectors.len() != xi.parts().len() {
        return Err(Error::Partition(format!("{} vectors for {} parts", vectors.len(), xi.parts().len())));
    }
    let y = xi.modes();
    let masks: Vec<usize> = xi.parts().iter().map(|p| p.mask_in(y)).collect::<Result<_>>()?;
    for (p, v) in xi.parts().iter().zip(vectors) {
        if v.modes() != p {
            return Err(Error::Partition(format!("vector on {} given for part {p}", v.modes())));
        }
    }
    let amps = DVector::from_fn(y.dim(), |k, _| {
        vectors
            .iter()
            .zip(&masks)
            .fold(C64::new(1.0, 0.0), |acc, (v, &m)| acc * v.amps[crate::modes::extract_bits(k, m)])
    });
    let u = tps_unitary(xi);
    StateVector::new(y.clone(), amps)?.apply(&u)
}

/// Counts of even, odd and mixed operands.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct ParityCounts {
    pub even: usize,
    pub odd: usize,
    pub mixed: usize,
}

/// Closed-form self-adjointness of an ordered product of nonzero Hermitian
/// operands with `odd` odd and `mixed` mixed factors.
pub fn predicted_self_adjoint(odd: usize, mixed: usize) -> bool {
    (mixed == 0 && matches!(odd % 4, 0 | 1)) || (mixed == 1 && odd.is_multiple_of(4))
}

/// Closed-form positivity of an ordered product of nonzero PSD operands.
pub fn predicted_psd(mixed: usize) -> bool {
    mixed <= 1
}

/// Outcome of [`product_extension_classify`].
#[derive(Clone, Debug)]
pub struct ProductExtensionReport {
    pub counts: ParityCounts,
    pub self_adjoint: bool,
    pub predicted_self_adjoint: bool,
    /// `max |P - P†|` of the product.
    pub adjoint_residual: f64,
    pub operands_psd: bool,
    /// Positivity of the product; only meaningful for PSD operands.
    pub psd: bool,
    pub predicted_psd: Option<bool>,
    pub min_eigenvalue: Option<f64>,
    pub product: Operator,
}

/// Classifies the ordered product of Hermitian operands and cross-checks the
/// closed-form predicates against the matrix.
///
/// Tolerances are relative to the largest entry involved. Disagreement
/// between predicate and matrix is an [`Error::Invariant`].
pub fn product_extension_classify(
    xi: &OrderedPartition,
    operands: &[Operator],
    tol: f64,
) -> Result<ProductExtensionReport> {
    let mut counts = ParityCounts::default();
    let mut operands_psd = true;
    for op in operands {
        let scale = op.max_abs();
        if scale == 0.0 {
            return Err(Error::Input(format!("zero operand on {}", op.modes())));
        }
        if !op.is_hermitian(tol * scale.max(1.0)) {
            return Err(Error::Input(format!("operand on {} is not Hermitian", op.modes())));
        }
        match operator_parity(op, tol * scale.max(1.0)) {
            Parity::Even => counts.even += 1,
            Parity::Odd => counts.odd += 1,
            Parity::Mixed => counts.mixed += 1,
        }
        operands_psd &= op.min_eigenvalue() >= -tol * scale.max(1.0);
    }
    let product = ordered_product(xi, operands)?;
    let scale = product.max_abs().max(1.0);
    let adjoint_residual = product.hermiticity_residual();
    let self_adjoint = adjoint_residual <= tol * scale;
    let min_eigenvalue = self_adjoint.then(|| product.min_eigenvalue());
    let psd = self_adjoint && min_eigenvalue.is_some_and(|m| m >= -tol * scale);
    let pred_sa = predicted_self_adjoint(counts.odd, counts.mixed);
    let pred_psd = operands_psd.then(|| predicted_psd(counts.mixed));
    if pred_sa != self_adjoint {
        return Err(Error::Invariant(format!(
            "self-adjointness predicted {pred_sa} but found {self_adjoint} (residual {adjoint_residual:e})"
        )));
    }
    if let Some(p) = pred_psd {
        if p != psd {
            return Err(Error::Invariant(format!("positivity predicted {p} but found {psd}")));
        }
    }
    Ok(ProductExtensionReport {
        counts,
        self_adjoint,
        predicted_self_adjoint: pred_sa,
        adjoint_residual,
        operands_psd,
        psd,
        predicted_psd: pred_psd,
        min_eigenvalue,
        product,
    })
}

/// The non-fermionic product `⊗ A_X` conjugated by `U_ξ⃗`.
pub fn tps_product(xi: &OrderedPartition, operands: &[Operator]) -> Result<Operator> {
    let u = tps_unitary(xi);
    let plain = tensor_standard(operands)?;
    if plain.modes() != xi.modes() {
        return Err(Error::Partition(format!("operands do not cover {}", xi.modes())));
    }
    u.mul(&plain)?.mul(&u.dagger())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::{jw_ladder, LadderKind, DEFAULT_TOL};
    use nalgebra::DMatrix;

    fn ms(s: &str) -> ModeSet {
        s.parse().unwrap()
    }

    fn diag_of(op: &Operator) -> Vec<f64> {
        (0..op.dim()).map(|k| op.get(k, k).re).collect()
    }

    #[test]
    fn parity_operator_examples() {
        assert_eq!(diag_of(&parity_operator(&ms("{1}"))), vec![1.0, -1.0]);
        let t = parity_operator(&ms("{1,2}"));
        assert_eq!(diag_of(&t), vec![1.0, -1.0, -1.0, 1.0]);
        assert_eq!(t.mul(&t).unwrap(), Operator::identity(&ms("{1,2}")));
    }

    #[test]
    fn projector_examples() {
        assert_eq!(diag_of(&parity_projector(&ms("{1}"), Sign::Plus)), vec![1.0, 0.0]);
        let y = ms("{1,2}");
        let m = parity_projector(&y, Sign::Minus);
        assert_eq!(diag_of(&m), vec![0.0, 1.0, 1.0, 0.0]);
        let p = parity_projector(&y, Sign::Plus);
        assert_eq!(p.mul(&m).unwrap().max_abs(), 0.0);
    }

    #[test]
    fn local_projector_example() {
        let xi: Partition = "{1}|{2}".parse().unwrap();
        let s = ParitySector::parse(&xi, "+-").unwrap();
        assert_eq!(diag_of(&local_parity_projector(&s).unwrap()), vec![0.0, 1.0, 0.0, 0.0]);
        assert!(matches!(ParitySector::parse(&xi, "+"), Err(Error::Sector(_))));
    }

    #[test]
    fn operator_parity_examples() {
        let y = ms("{1,2,3}");
        let a = jw_ladder(2, &y, LadderKind::Annihilate).unwrap();
        let ad = jw_ladder(2, &y, LadderKind::Create).unwrap();
        assert_eq!(operator_parity(&a, DEFAULT_TOL), Parity::Odd);
        assert_eq!(operator_parity(&ad.mul(&a).unwrap(), DEFAULT_TOL), Parity::Even);
        let mixed = Operator::identity(&y).add(&a).unwrap();
        assert_eq!(operator_parity(&mixed, DEFAULT_TOL), Parity::Mixed);
    }

    #[test]
    fn vector_parity_examples() {
        let y = ms("{1,2}");
        assert_eq!(vector_parity(&StateVector::vacuum(&y), DEFAULT_TOL), Parity::Even);
        let h = std::f64::consts::FRAC_1_SQRT_2;
        let bell =
            StateVector::new(y.clone(), DVector::from_vec(vec![h, 0.0, 0.0, h]).map(|x| C64::new(x, 0.0))).unwrap();
        assert_eq!(vector_parity(&bell, DEFAULT_TOL), Parity::Even);
        let plus = StateVector::new(ms("{1}"), DVector::from_vec(vec![C64::new(h, 0.0), C64::new(h, 0.0)])).unwrap();
        assert_eq!(vector_parity(&plus, DEFAULT_TOL), Parity::Mixed);
    }

    #[test]
    fn tps_unitary_examples() {
        let u = tps_unitary(&"{2}|{1}".parse().unwrap());
        assert_eq!(diag_of(&u), vec![1.0, 1.0, 1.0, -1.0]);
        let u = tps_unitary(&"{1}|{2}".parse().unwrap());
        assert_eq!(u, Operator::identity(&ms("{1,2}")));
    }

    #[test]
    fn two_mode_counterexample_is_not_self_adjoint() {
        let one = C64::new(1.0, 0.0);
        let a = Operator::new(ms("{1}"), DMatrix::from_element(2, 2, one)).unwrap();
        let b = Operator::new(ms("{2}"), DMatrix::from_element(2, 2, one)).unwrap();
        let r = product_extension_classify(&"{1}|{2}".parse().unwrap(), &[a, b], DEFAULT_TOL).unwrap();
        assert_eq!(r.counts.mixed, 2);
        assert!(!r.self_adjoint && !r.psd);
        assert_eq!(r.adjoint_residual, 2.0);
    }

    #[test]
    fn predicates() {
        assert!(predicted_self_adjoint(0, 0));
        assert!(predicted_self_adjoint(1, 0));
        assert!(!predicted_self_adjoint(2, 0));
        assert!(!predicted_self_adjoint(3, 0));
        assert!(predicted_self_adjoint(4, 0));
        assert!(predicted_self_adjoint(0, 1));
        assert!(!predicted_self_adjoint(1, 1));
        assert!(!predicted_self_adjoint(0, 2));
    }
}
