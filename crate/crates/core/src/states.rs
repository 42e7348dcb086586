//! Density matrices, state reduction and correlation classification with and
//! without the parity superselection rule.

use nalgebra::{DMatrix, DVector};

use crate::algebra::{ordered_product, partial_trace, Basis, Operator, C64};
use crate::error::{Error, Result};
use crate::modes::{ModeSet, Partition};
use crate::parity::{operator_parity, project_sector, Parity, ParitySector, StateVector};
use crate::phase::f_sign;

/// A validated state: Hermitian, positive semidefinite, unit trace.
#[derive(Clone, Debug, PartialEq)]
pub struct DensityMatrix {
    op: Operator,
}

impl DensityMatrix {
    /// Checks the state invariants to absolute tolerance `tol`.
    pub fn new(op: Operator, tol: f64) -> Result<Self> {
        let herm = op.hermiticity_residual();
        if herm > tol {
            return Err(Error::State(format!("not Hermitian (residual {herm:e})")));
        }
        let tr = op.trace();
        if (tr - C64::new(1.0, 0.0)).norm() > tol {
            return Err(Error::State(format!("trace {} differs from 1", tr.re)));
        }
        let min = op.min_eigenvalue();
        if min < -tol {
            return Err(Error::State(format!("not positive (min eigenvalue {min:e})")));
        }
        Ok(DensityMatrix { op })
    }

    /// `I / 2^|Y|`.
    pub fn maximally_mixed(y: &ModeSet) -> Self {
        let w = 1.0 / y.dim() as f64;
        DensityMatrix { op: Operator::identity(y).scale(C64::new(w, 0.0)) }
    }

    /// `|ψ><ψ|` for a unit vector.
    pub fn pure(v: &StateVector, tol: f64) -> Result<Self> {
        let n = v.norm();
        if (n - 1.0).abs() > tol {
            return Err(Error::State(format!("vector norm {n} is not 1")));
        }
        Ok(DensityMatrix { op: v.projector() })
    }

    pub fn modes(&self) -> &ModeSet {
        self.op.modes()
    }

    pub fn operator(&self) -> &Operator {
        &self.op
    }

    pub fn into_operator(self) -> Operator {
        self.op
    }
}

/// Expansion coefficients of a state in the standard (`R`) or fermionic
/// (`R̃ = f ∘ R`) basis.
#[derive(Clone, Debug, PartialEq)]
pub struct CoeffMatrix {
    pub modes: ModeSet,
    pub basis: Basis,
    pub entries: DMatrix<C64>,
}

impl CoeffMatrix {
    /// Converts to the other basis; the map is an involution.
    pub fn to_basis(&self, basis: Basis) -> CoeffMatrix {
        if basis == self.basis {
            return self.clone();
        }
        let entries = DMatrix::from_fn(self.entries.nrows(), self.entries.ncols(), |r, c| {
            self.entries[(r, c)] * f_sign(r, c).as_f64()
        });
        CoeffMatrix { modes: self.modes.clone(), basis, entries }
    }

    pub fn into_operator(self) -> Operator {
        let standard = self.to_basis(Basis::Standard);
        Operator::new(standard.modes, standard.entries).expect("coefficient shape matches its modes")
    }
}

pub fn coeffs(rho: &Operator, basis: Basis) -> CoeffMatrix {
    CoeffMatrix { modes: rho.modes().clone(), basis: Basis::Standard, entries: rho.matrix().clone() }.to_basis(basis)
}

/// Reduced state on `x`. A reduction that breaks the state invariants is an
/// [`Error::Invariant`].
pub fn reduce_state(rho: &DensityMatrix, x: &ModeSet, tol: f64) -> Result<DensityMatrix> {
    let op = partial_trace(rho.modes(), x, rho.operator())?;
    DensityMatrix::new(op, tol.max(1e-9)).map_err(|e| Error::Invariant(format!("reduced state on {x}: {e}")))
}

/// Marginals on the parts of `xi`, in canonical part order.
pub fn marginals(rho: &DensityMatrix, xi: &Partition, tol: f64) -> Result<Vec<DensityMatrix>> {
    if xi.modes() != rho.modes() {
        return Err(Error::Partition(format!("{xi} does not partition {}", rho.modes())));
    }
    xi.parts().iter().map(|p| reduce_state(rho, p, tol)).collect()
}

/// `⊗̃′` of the marginals, parts ordered by smallest label.
pub fn product_of_marginals(rho: &DensityMatrix, xi: &Partition, tol: f64) -> Result<Operator> {
    let ops: Vec<Operator> = marginals(rho, xi, tol)?.into_iter().map(DensityMatrix::into_operator).collect();
    ordered_product(&xi.canonical_order(), &ops)
}

/// Which correlation notion to test.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SsrMode {
    /// No superselection: compare `ρ` with the product of its marginals.
    NoSsr,
    /// Parity superselection: compare the all-even sector projection.
    Ssr,
}

#[derive(Clone, Debug, PartialEq)]
pub struct CorrelationReport {
    pub mode: SsrMode,
    pub physical: bool,
    pub uncorrelated: bool,
    /// `None` without superselection.
    pub product_physical: Option<bool>,
    /// `max |Π(ρ) − ⊗̃′ρ_X|`, with `Π` the identity in [`SsrMode::NoSsr`].
    pub uncorrelated_residual: f64,
    /// `max |ρ − ⊗̃′ρ_X|`.
    pub product_residual: f64,
    /// Whether the reconstruction `⊗̃′ρ_X` is Hermitian.
    pub reconstruction_hermitian: bool,
}

/// Classifies `ρ` against the uncorrelated and product sets of `xi`.
///
/// In superselection mode both sets are restricted to physical states, and
/// the inclusion of the product set in the uncorrelated set is checked on
/// every call.
pub fn classify_correlation(rho: &DensityMatrix, xi: &Partition, mode: SsrMode, tol: f64) -> Result<CorrelationReport> {
    let recon = product_of_marginals(rho, xi, tol)?;
    let physical = operator_parity(rho.operator(), tol) == Parity::Even;
    let product_residual = rho.operator().max_abs_diff(&recon);
    let reconstruction_hermitian = recon.is_hermitian(tol);
    let report = match mode {
        SsrMode::NoSsr => CorrelationReport {
            mode,
            physical,
            uncorrelated: product_residual <= tol,
            product_physical: None,
            uncorrelated_residual: product_residual,
            product_residual,
            reconstruction_hermitian,
        },
        SsrMode::Ssr => {
            let projected = project_sector(&ParitySector::all_even(xi), rho.operator())?;
            let uncorrelated_residual = projected.max_abs_diff(&recon);
            let uncorrelated = physical && uncorrelated_residual <= tol;
            let product_physical = physical && product_residual <= tol;
            if product_physical && !uncorrelated {
                return Err(Error::Invariant(format!(
                    "product state is not uncorrelated (residual {uncorrelated_residual:e})"
                )));
            }
            CorrelationReport {
                mode,
                physical,
                uncorrelated,
                product_physical: Some(product_physical),
                uncorrelated_residual,
                product_residual,
                reconstruction_hermitian,
            }
        }
    };
    Ok(report)
}

/// One term of a separable decomposition.
#[derive(Clone, Debug)]
pub struct ProductTerm {
    pub weight: f64,
    /// Local pure states, one per part in canonical order.
    pub locals: Vec<StateVector>,
}

/// Explicit convex decomposition of a state into products of local pure
/// states, with the residual of the fit.
#[derive(Clone, Debug)]
pub struct SeparableCertificate {
    pub terms: Vec<ProductTerm>,
    pub residual: f64,
}

/// Searches for a convex decomposition of `rho` into at most `max_terms`
/// products of parity-definite local pure states.
///
/// The candidate dictionary holds every occupation basis product plus
/// `samples` random local products drawn from `rng`; weights are fitted by
/// nonnegative least squares. `None` means the search failed, not that the
/// state is entangled.
pub fn separable_certificate<R: rand::Rng>(
    rho: &DensityMatrix,
    xi: &Partition,
    samples: usize,
    max_terms: usize,
    tol: f64,
    rng: &mut R,
) -> Result<Option<SeparableCertificate>> {
    if xi.modes() != rho.modes() {
        return Err(Error::Partition(format!("{xi} does not partition {}", rho.modes())));
    }
    let order = xi.canonical_order();
    let mut candidates: Vec<Vec<StateVector>> = Vec::new();
    for k in 0..rho.modes().dim() {
        let y = rho.modes();
        let locals = order
            .parts()
            .iter()
            .map(|p| {
                let m = p.mask_in(y)?;
                StateVector::basis(p, crate::modes::extract_bits(k, m))
            })
            .collect::<Result<Vec<_>>>()?;
        candidates.push(locals);
    }
    for _ in 0..samples {
        let locals = order
            .parts()
            .iter()
            .map(|p| {
                let sign = if rng.random::<bool>() { crate::phase::Sign::Plus } else { crate::phase::Sign::Minus };
                crate::random::random_parity_vector(p, sign, rng)
            })
            .collect::<Result<Vec<_>>>()?;
        candidates.push(locals);
    }

    let d = rho.modes().dim();
    let n = d * d;
    let mut a = DMatrix::<f64>::zeros(2 * n, candidates.len());
    for (j, locals) in candidates.iter().enumerate() {
        let ops: Vec<Operator> = locals.iter().map(StateVector::projector).collect();
        let prod = ordered_product(&order, &ops)?;
        for (k, z) in prod.matrix().transpose().iter().enumerate() {
            a[(k, j)] = z.re;
            a[(n + k, j)] = z.im;
        }
    }
    let target = rho.operator().matrix().transpose();
    let b = DVector::from_fn(2 * n, |k, _| if k < n { target[k].re } else { target[k - n].im });
    let w = nnls(&a, &b, 1e-14);
    let mut idx: Vec<usize> = (0..w.len()).filter(|&j| w[j] > 0.0).collect();
    idx.sort_by(|&i, &j| w[j].total_cmp(&w[i]).then(i.cmp(&j)));
    idx.truncate(max_terms);
    let fit = idx.iter().fold(DVector::zeros(2 * n), |acc, &j| acc + a.column(j) * w[j]);
    let residual = (fit - &b).amax();
    if residual > tol {
        return Ok(None);
    }
    let terms = idx.into_iter().map(|j| ProductTerm { weight: w[j], locals: candidates[j].clone() }).collect();
    Ok(Some(SeparableCertificate { terms, residual }))
}

/// Lawson-Hanson nonnegative least squares `min |Ax - b|, x >= 0`.
pub(crate) fn nnls(a: &DMatrix<f64>, b: &DVector<f64>, tol: f64) -> DVector<f64> {
    let n = a.ncols();
    let mut x = DVector::<f64>::zeros(n);
    let mut passive = vec![false; n];
    let solve = |passive: &[bool]| -> DVector<f64> {
        let cols: Vec<usize> = (0..n).filter(|&j| passive[j]).collect();
        let sub = DMatrix::from_fn(a.nrows(), cols.len(), |r, c| a[(r, cols[c])]);
        let s = sub.svd(true, true).solve(b, 1e-12).expect("SVD computed with both factors");
        let mut full = DVector::zeros(n);
        for (k, &j) in cols.iter().enumerate() {
            full[j] = s[k];
        }
        full
    };
    for _ in 0..3 * n.max(1) {
        let grad = a.transpose() * (b - a * &x);
        let next = (0..n).filter(|&j| !passive[j] && grad[j] > tol).max_by(|&i, &j| grad[i].total_cmp(&grad[j]));
        let Some(j) = next else { break };
        passive[j] = true;
        loop {
            let s = solve(&passive);
            let blocked: Vec<usize> = (0..n).filter(|&i| passive[i] && s[i] <= 0.0).collect();
            if blocked.is_empty() {
                x = s;
                break;
            }
            let alpha = blocked.iter().map(|&i| x[i] / (x[i] - s[i])).fold(f64::INFINITY, f64::min);
            x += (s - &x) * alpha;
            for i in 0..n {
                if passive[i] && x[i] <= tol {
                    passive[i] = false;
                    x[i] = 0.0;
                }
            }
            if !passive.iter().any(|&p| p) {
                break;
            }
        }
    }
    x
}
