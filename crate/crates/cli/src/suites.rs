//! Named invariant suites behind `fermikit check`.
//!
//! Each suite draws from its own ChaCha8 stream seeded with `seed + k`, where
//! `k` is the suite's position in [`SUITES`], so a suite reports the same
//! numbers whether it runs alone or as part of `all`.

use fermikit_core::algebra::{Basis, Direction};
use fermikit_core::io::{operator_to_json, round12};
use fermikit_core::maps::{left_multiply, partial_trace_map, right_multiply, theta_map, trace_map};
use fermikit_core::modes::extract_bits;
use fermikit_core::parity::{tensor_vectors, tps_product};
use fermikit_core::phase::l_sign;
use fermikit_core::random::{
    random_density, random_hermitian, random_locally_even, random_operator, random_ordered_partition,
    random_parity_hermitian, random_parity_operator, random_parity_vector, random_subset, rng,
};
use fermikit_core::{
    elementary, embed, hs_inner, index_pattern, jw_ladder, lambda_map, local_parity_projector,
    local_parity_superprojector, map_embed, operator_parity, ordered_product, partial_trace, phi,
    product_extension_classify, psi, tensor_fermionic, tpcp_report, Error, LadderKind, MapProduct, ModeSet, Operator,
    OrderedPartition, Parity, ParitySector, Result, Sign, StateVector, SuperOp, C64,
};
use itertools::Itertools;
use rand::seq::index::sample;
use rand::Rng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use serde_json::{json, Value};

/// Suite names in execution order.
pub const SUITES: [&str; 9] = ["car", "phi", "tensor", "lambda", "ptrace", "parity", "tps", "prodext", "maps"];

/// Largest `--max-modes` accepted; dense operators beyond this are slow.
pub const MAX_MODES_LIMIT: usize = 8;

/// Map-level invariants use at most this many modes (superoperators are `4^n` square).
const MAP_SUITE_MODES: usize = 4;

/// Random map invariants stay smaller still.
const RANDOM_MAP_MODES: usize = 3;

#[derive(Clone, Copy, Debug)]
pub struct CheckConfig {
    pub max_modes: usize,
    pub seed: u64,
    pub trials: usize,
}

#[derive(Clone, Debug, Serialize)]
pub struct InvariantReport {
    pub name: String,
    pub passed: bool,
    pub checked: usize,
    pub failed: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub threshold: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub max_residual: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub counterexample: Option<Value>,
}

#[derive(Clone, Debug, Serialize)]
pub struct SuiteReport {
    pub name: String,
    pub passed: bool,
    pub invariants: Vec<InvariantReport>,
}

#[derive(Clone, Debug, Serialize)]
pub struct CheckReport {
    pub suite: String,
    pub seed: u64,
    pub max_modes: usize,
    pub trials: usize,
    pub passed: bool,
    pub suites: Vec<SuiteReport>,
}

/// Accumulates one invariant's outcomes; keeps the first counterexample.
struct Inv {
    report: InvariantReport,
}

impl Inv {
    fn numeric(name: &str, threshold: f64) -> Self {
        let mut inv = Inv::predicate(name);
        inv.report.threshold = Some(threshold);
        inv.report.max_residual = Some(0.0);
        inv
    }

    fn predicate(name: &str) -> Self {
        Inv {
            report: InvariantReport {
                name: name.to_string(),
                passed: false,
                checked: 0,
                failed: 0,
                threshold: None,
                max_residual: None,
                counterexample: None,
            },
        }
    }

    fn residual(&mut self, r: f64, ctx: impl FnOnce() -> Value) {
        let threshold = self.report.threshold.expect("numeric invariant");
        let worst = self.report.max_residual.get_or_insert(0.0);
        if r.is_nan() || r > *worst {
            *worst = r;
        }
        self.record(r <= threshold, || {
            let mut v = ctx();
            v["residual"] = json!(round12(r));
            v
        });
    }

    fn holds(&mut self, ok: bool, ctx: impl FnOnce() -> Value) {
        self.record(ok, ctx);
    }

    fn record(&mut self, ok: bool, ctx: impl FnOnce() -> Value) {
        self.report.checked += 1;
        if !ok {
            self.report.failed += 1;
            if self.report.counterexample.is_none() {
                self.report.counterexample = Some(ctx());
            }
        }
    }

    fn finish(mut self) -> InvariantReport {
        self.report.passed = self.report.failed == 0;
        self.report.max_residual = self.report.max_residual.map(round12);
        self.report
    }
}

fn finish(name: &str, invs: Vec<Inv>) -> SuiteReport {
    let invariants: Vec<InvariantReport> = invs.into_iter().map(Inv::finish).collect();
    SuiteReport { name: name.to_string(), passed: invariants.iter().all(|i| i.passed), invariants }
}

/// Runs one suite, or every suite for `"all"`.
pub fn check_suite(name: &str, cfg: CheckConfig) -> Result<CheckReport> {
    if cfg.max_modes == 0 || cfg.max_modes > MAX_MODES_LIMIT {
        return Err(Error::Input(format!("--max-modes must be between 1 and {MAX_MODES_LIMIT}")));
    }
    if cfg.trials == 0 {
        return Err(Error::Input("--trials must be positive".into()));
    }
    let selected: Vec<(usize, &str)> = if name == "all" {
        SUITES.iter().copied().enumerate().collect()
    } else {
        match SUITES.iter().position(|s| *s == name) {
            Some(k) => vec![(k, SUITES[k])],
            None => {
                return Err(Error::Input(format!("unknown suite {name:?}; expected one of all, {}", SUITES.join(", "))))
            }
        }
    };
    let suites = selected
        .into_iter()
        .map(|(k, s)| {
            let mut g = rng(cfg.seed.wrapping_add(k as u64));
            let invs = match s {
                "car" => car(cfg)?,
                "phi" => phi_suite(cfg, &mut g)?,
                "tensor" => tensor(cfg, &mut g)?,
                "lambda" => lambda(cfg, &mut g)?,
                "ptrace" => ptrace(cfg, &mut g)?,
                "parity" => parity(cfg, &mut g)?,
                "tps" => tps(cfg, &mut g)?,
                "prodext" => prodext(cfg, &mut g)?,
                "maps" => maps(cfg, &mut g)?,
                _ => unreachable!("suite list is fixed"),
            };
            Ok(finish(s, invs))
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(CheckReport {
        suite: name.to_string(),
        seed: cfg.seed,
        max_modes: cfg.max_modes,
        trials: cfg.trials,
        passed: suites.iter().all(|s| s.passed),
        suites,
    })
}

/// `n` distinct labels drawn from `1..=12`, so label gaps are exercised.
fn random_modes(n: usize, g: &mut ChaCha8Rng) -> ModeSet {
    let labels: Vec<u32> = sample(g, 12, n).into_iter().map(|k| k as u32 + 1).collect();
    ModeSet::new(labels).expect("distinct small labels")
}

fn random_size(lo: usize, hi: usize, g: &mut ChaCha8Rng) -> usize {
    g.random_range(lo..=hi.max(lo))
}

fn op_json(a: &Operator) -> Value {
    operator_to_json(a, false)
}

fn cplx(z: C64) -> Value {
    json!([round12(z.re), round12(z.im)])
}

/// Partition of `y` into runs of consecutive labels.
fn contiguous_ordering(y: &ModeSet, g: &mut ChaCha8Rng) -> Result<OrderedPartition> {
    let mut parts = vec![Vec::new()];
    for (k, &l) in y.labels().iter().enumerate() {
        if k > 0 && g.random::<bool>() {
            parts.push(Vec::new());
        }
        parts.last_mut().expect("non-empty").push(l);
    }
    OrderedPartition::new(parts.into_iter().map(ModeSet::new).collect::<Result<_>>()?)
}

/// Non-empty proper subset of `y` (needs `|y| ≥ 2`).
fn proper_subset(y: &ModeSet, g: &mut ChaCha8Rng) -> ModeSet {
    loop {
        let x = random_subset(y, g);
        if !x.is_empty() && x.len() < y.len() {
            return x;
        }
    }
}

fn car(cfg: CheckConfig) -> Result<Vec<Inv>> {
    let mut aa = Inv::numeric("{a_i, a_j} = 0", 0.0);
    let mut dd = Inv::numeric("{a_i^dag, a_j^dag} = 0", 0.0);
    let mut ad = Inv::numeric("{a_i, a_j^dag} = delta_ij I", 0.0);
    for n in 1..=cfg.max_modes as u32 {
        let y = ModeSet::range(n)?;
        let ann: Vec<Operator> = (1..=n).map(|i| jw_ladder(i, &y, LadderKind::Annihilate)).collect::<Result<_>>()?;
        let cre: Vec<Operator> = (1..=n).map(|i| jw_ladder(i, &y, LadderKind::Create)).collect::<Result<_>>()?;
        let id = Operator::identity(&y);
        for i in 0..n as usize {
            for j in 0..n as usize {
                let ctx = || json!({"modes": y.to_string(), "i": i + 1, "j": j + 1});
                aa.residual(ann[i].anticommutator(&ann[j])?.max_abs(), ctx);
                dd.residual(cre[i].anticommutator(&cre[j])?.max_abs(), ctx);
                let mixed = ann[i].anticommutator(&cre[j])?;
                let r = if i == j { mixed.max_abs_diff(&id) } else { mixed.max_abs() };
                ad.residual(r, ctx);
            }
        }
    }
    Ok(vec![aa, dd, ad])
}

fn phi_suite(cfg: CheckConfig, g: &mut ChaCha8Rng) -> Result<Vec<Inv>> {
    let mut hs = Inv::numeric("phi preserves the Hilbert-Schmidt inner product", 1e-10);
    let mut inv = Inv::numeric("phi is an involution", 0.0);
    let mut basis = Inv::numeric("phi maps standard basis elements to fermionic ones", 0.0);
    for _ in 0..cfg.trials {
        let y = random_modes(random_size(1, cfg.max_modes, g), g);
        let (a, b) = (random_operator(&y, g), random_operator(&y, g));
        let (pa, pb) = (phi(&y, &a, Direction::Forward)?, phi(&y, &b, Direction::Forward)?);
        let ctx = || json!({"modes": y.to_string(), "a": op_json(&a), "b": op_json(&b)});
        hs.residual((hs_inner(&pa, &pb)? - hs_inner(&a, &b)?).norm(), ctx);
        inv.residual(phi(&y, &pa, Direction::Inverse)?.max_abs_diff(&a), ctx);
    }
    for n in 1..=cfg.max_modes.min(3) as u32 {
        let y = ModeSet::range(n)?;
        for r in 0..y.dim() {
            for c in 0..y.dim() {
                let (nu, nup) = (index_pattern(&y, r)?, index_pattern(&y, c)?);
                let std = elementary(&y, &nu, &nup, Basis::Standard)?;
                let ferm = elementary(&y, &nu, &nup, Basis::Fermionic)?;
                basis.residual(
                    phi(&y, &std, Direction::Forward)?.max_abs_diff(&ferm),
                    || json!({"modes": y.to_string(), "row": nu.to_string(), "col": nup.to_string()}),
                );
            }
        }
    }
    Ok(vec![hs, inv, basis])
}

fn tensor(cfg: CheckConfig, g: &mut ChaCha8Rng) -> Result<Vec<Inv>> {
    let mut basis = Inv::numeric("fermionic tensor of local basis elements is the joint basis element", 0.0);
    let mut lam = Inv::numeric("ordered product equals lambda of the fermionic tensor", 1e-10);
    let mut contiguous = Inv::numeric("ordered product equals fermionic tensor on contiguous orderings", 1e-12);
    let mut hom = Inv::numeric("embedding is a *-homomorphism", 1e-10);
    if cfg.max_modes < 2 {
        return Ok(vec![basis, lam, contiguous, hom]);
    }
    for _ in 0..cfg.trials {
        let y = random_modes(random_size(2, cfg.max_modes, g), g);
        let xi = random_ordered_partition(&y, 4, g)?;
        let un = xi.unordered();
        let (r, c) = (g.random_range(0..y.dim()), g.random_range(0..y.dim()));
        let locals = un
            .parts()
            .iter()
            .zip(un.masks())
            .map(|(p, m)| {
                elementary(
                    p,
                    &index_pattern(p, extract_bits(r, m))?,
                    &index_pattern(p, extract_bits(c, m))?,
                    Basis::Fermionic,
                )
            })
            .collect::<Result<Vec<_>>>()?;
        let joint = elementary(&y, &index_pattern(&y, r)?, &index_pattern(&y, c)?, Basis::Fermionic)?;
        basis.residual(
            tensor_fermionic(&un, &locals)?.max_abs_diff(&joint),
            || json!({"partition": un.to_string(), "row": r, "col": c}),
        );

        let ops: Vec<Operator> = xi.parts().iter().map(|p| random_operator(p, g)).collect();
        let ft = tensor_fermionic(&un, &ops)?;
        let op = ordered_product(&xi, &ops)?;
        lam.residual(
            op.max_abs_diff(&lambda_map(&xi, &ft, Direction::Forward)?),
            || json!({"ordering": xi.to_string(), "operands": ops.iter().map(op_json).collect::<Vec<_>>()}),
        );

        let cont = contiguous_ordering(&y, g)?;
        let cops: Vec<Operator> = cont.parts().iter().map(|p| random_operator(p, g)).collect();
        let diff = ordered_product(&cont, &cops)?.max_abs_diff(&tensor_fermionic(&cont.unordered(), &cops)?);
        contiguous.residual(diff, || json!({"ordering": cont.to_string()}));

        let x = proper_subset(&y, g);
        let (a, b) = (random_operator(&x, g), random_operator(&x, g));
        let (ea, eb) = (embed(&x, &y, &a)?, embed(&x, &y, &b)?);
        let r1 = embed(&x, &y, &a.mul(&b)?)?.max_abs_diff(&ea.mul(&eb)?);
        let r2 = embed(&x, &y, &a.dagger())?.max_abs_diff(&ea.dagger());
        hom.residual(
            r1.max(r2),
            || json!({"x": x.to_string(), "y": y.to_string(), "a": op_json(&a), "b": op_json(&b)}),
        );
    }
    Ok(vec![basis, lam, contiguous, hom])
}

fn lambda(cfg: CheckConfig, g: &mut ChaCha8Rng) -> Result<Vec<Inv>> {
    let mut psi_hs = Inv::numeric("psi preserves the Hilbert-Schmidt inner product", 1e-10);
    let mut lam_hs = Inv::numeric("lambda preserves the Hilbert-Schmidt inner product", 1e-10);
    let mut involution = Inv::numeric("lambda is an involution", 0.0);
    let mut identity = Inv::numeric("lambda is the identity on contiguous orderings", 0.0);
    for _ in 0..cfg.trials {
        let y = random_modes(random_size(1, cfg.max_modes, g), g);
        let xi = random_ordered_partition(&y, 4, g)?;
        let un = xi.unordered();
        let (a, b) = (random_operator(&y, g), random_operator(&y, g));
        let ctx = || json!({"ordering": xi.to_string(), "a": op_json(&a), "b": op_json(&b)});
        let base = hs_inner(&a, &b)?;
        let (sa, sb) = (psi(&un, &a, Direction::Forward)?, psi(&un, &b, Direction::Forward)?);
        psi_hs.residual((hs_inner(&sa, &sb)? - base).norm(), ctx);
        let (la, lb) = (lambda_map(&xi, &a, Direction::Forward)?, lambda_map(&xi, &b, Direction::Forward)?);
        lam_hs.residual((hs_inner(&la, &lb)? - base).norm(), ctx);
        involution.residual(lambda_map(&xi, &la, Direction::Inverse)?.max_abs_diff(&a), ctx);
        let cont = contiguous_ordering(&y, g)?;
        identity.residual(
            lambda_map(&cont, &a, Direction::Forward)?.max_abs_diff(&a),
            || json!({"ordering": cont.to_string(), "a": op_json(&a)}),
        );
    }
    Ok(vec![psi_hs, lam_hs, involution, identity])
}

/// `Tr_{X̄}(U† A U)` with `U = diag u_{X X̄}`, computed label by label.
fn conjugated_trace(y: &ModeSet, x: &ModeSet, a: &Operator) -> Result<Operator> {
    let labels = y.labels();
    let n = labels.len();
    let occ = |k: usize, p: usize| (k >> (n - 1 - p)) & 1;
    let u = |k: usize| -> f64 {
        let mut s = 0;
        for (p, &i) in labels.iter().enumerate() {
            for (q, &l) in labels.iter().enumerate() {
                if !x.contains(i) && x.contains(l) && i < l {
                    s += occ(k, p) * occ(k, q);
                }
            }
        }
        if s % 2 == 0 {
            1.0
        } else {
            -1.0
        }
    };
    let local = |k: usize| -> usize {
        labels.iter().enumerate().filter(|(_, &l)| x.contains(l)).fold(0, |acc, (p, _)| acc * 2 + occ(k, p))
    };
    let rest = |k: usize| -> Vec<usize> {
        labels.iter().enumerate().filter(|(_, &l)| !x.contains(l)).map(|(p, _)| occ(k, p)).collect()
    };
    let mut out = Operator::zeros(x).into_matrix();
    for r in 0..y.dim() {
        for c in 0..y.dim() {
            if rest(r) == rest(c) {
                out[(local(r), local(c))] += a.get(r, c) * (u(r) * u(c));
            }
        }
    }
    Operator::new(x.clone(), out)
}

fn ptrace(cfg: CheckConfig, g: &mut ChaCha8Rng) -> Result<Vec<Inv>> {
    let mut oracle = Inv::numeric("partial trace matches the conjugated-trace oracle", 1e-10);
    let mut adjoint = Inv::numeric("partial trace is the adjoint of the embedding", 1e-10);
    let mut nesting = Inv::numeric("partial traces nest", 1e-10);
    let mut trace = Inv::numeric("partial trace preserves the trace", 1e-10);
    for _ in 0..cfg.trials {
        let y = random_modes(random_size(1, cfg.max_modes, g), g);
        let rho = random_density(&y, g);
        let z = random_subset(&y, g);
        let x = random_subset(&z, g);
        let ctx = || json!({"y": y.to_string(), "x": x.to_string(), "state": op_json(&rho)});
        let red = partial_trace(&y, &x, &rho)?;
        oracle.residual(red.max_abs_diff(&conjugated_trace(&y, &x, &rho)?), ctx);
        let b = random_operator(&x, g);
        adjoint.residual((hs_inner(&red, &b)? - hs_inner(&rho, &embed(&x, &y, &b)?)?).norm(), ctx);
        let two_step = partial_trace(&z, &x, &partial_trace(&y, &z, &rho)?)?;
        nesting.residual(
            two_step.max_abs_diff(&red),
            || json!({"y": y.to_string(), "z": z.to_string(), "x": x.to_string(), "state": op_json(&rho)}),
        );
        trace.residual((red.trace() - rho.trace()).norm(), ctx);
    }
    Ok(vec![oracle, adjoint, nesting, trace])
}

fn parity(cfg: CheckConfig, g: &mut ChaCha8Rng) -> Result<Vec<Inv>> {
    let mut ee = Inv::numeric("even-even embeddings commute", 1e-12);
    let mut eo = Inv::numeric("even-odd embeddings commute", 1e-12);
    let mut oo = Inv::numeric("odd-odd embeddings anticommute", 1e-12);
    let mut traceless = Inv::numeric("odd operators are traceless", 1e-12);
    let mut preserved = Inv::predicate("embedding and partial trace preserve parity");
    let mut resolution = Inv::numeric("local parity projectors resolve the identity", 0.0);
    let mut super_resolution = Inv::numeric("local parity superprojectors resolve the identity", 0.0);
    for _ in 0..cfg.trials {
        let y = random_modes(random_size(1, cfg.max_modes, g), g);
        let odd_y = random_parity_operator(&y, Sign::Minus, g);
        traceless.residual(odd_y.trace().norm(), || json!({"operator": op_json(&odd_y)}));
        let xi = random_ordered_partition(&y, 3, g)?.unordered();
        let mut total = Operator::zeros(&y);
        for s in ParitySector::all(&xi) {
            total = total.add(&local_parity_projector(&s)?)?;
        }
        resolution.residual(total.max_abs_diff(&Operator::identity(&y)), || json!({"partition": xi.to_string()}));
        if y.len() <= RANDOM_MAP_MODES {
            let mut sum = SuperOp::zeros(&y, &y)?;
            for s in ParitySector::all(&xi) {
                sum = sum.add(&local_parity_superprojector(&s)?)?;
            }
            super_resolution
                .residual(sum.max_abs_diff(&SuperOp::identity(&y)?), || json!({"partition": xi.to_string()}));
        }
        if y.len() < 2 {
            continue;
        }
        let x = proper_subset(&y, g);
        let xb = y.difference(&x);
        let e = |a: &Operator| embed(a.modes(), &y, a);
        let (ae, ao) = (random_parity_operator(&x, Sign::Plus, g), random_parity_operator(&x, Sign::Minus, g));
        let (be, bo) = (random_parity_operator(&xb, Sign::Plus, g), random_parity_operator(&xb, Sign::Minus, g));
        let ctx = || json!({"y": y.to_string(), "x": x.to_string()});
        ee.residual(e(&ae)?.commutator(&e(&be)?)?.max_abs(), ctx);
        eo.residual(e(&ae)?.commutator(&e(&bo)?)?.max_abs().max(e(&ao)?.commutator(&e(&be)?)?.max_abs()), ctx);
        oo.residual(e(&ao)?.anticommutator(&e(&bo)?)?.max_abs(), ctx);
        let ok = operator_parity(&e(&ao)?, 1e-10) == Parity::Odd
            && operator_parity(&e(&ae)?, 1e-10) == Parity::Even
            && operator_parity(&partial_trace(&y, &x, &odd_y)?, 1e-10) == Parity::Odd;
        preserved.holds(ok, ctx);
    }
    Ok(vec![ee, eo, oo, traceless, preserved, resolution, super_resolution])
}

fn tps(cfg: CheckConfig, g: &mut ChaCha8Rng) -> Result<Vec<Inv>> {
    let mut identity =
        Inv::numeric("ordered product equals U (plain tensor) U^dag for locally even operands, all orderings", 1e-10);
    let mut signs = Inv::numeric("l signs agree across orderings on locally even index pairs", 0.0);
    let mut lam = Inv::numeric("lambda is ordering independent on locally even operators", 0.0);
    let mut vectors =
        Inv::numeric("product of parity-definite vectors matches the ordered product of projectors", 1e-10);
    for _ in 0..cfg.trials {
        let y = random_modes(random_size(1, cfg.max_modes, g), g);
        let xi = random_ordered_partition(&y, 4, g)?.unordered();
        let ops: Vec<Operator> = xi.parts().iter().map(|p| random_parity_operator(p, Sign::Plus, g)).collect();
        let a = random_locally_even(&xi, g)?;
        let masks = xi.masks();
        let d = y.dim();
        let even_pair = |r: usize, c: usize| masks.iter().all(|m| ((r ^ c) & m).count_ones().is_multiple_of(2));
        let mut base_lambda: Option<Operator> = None;
        let mut base_masks: Option<Vec<usize>> = None;
        for perm in (0..xi.parts().len()).permutations(xi.parts().len()) {
            let ordering = OrderedPartition::new(perm.iter().map(|&k| xi.parts()[k].clone()).collect())?;
            let ordered_ops: Vec<Operator> = perm.iter().map(|&k| ops[k].clone()).collect();
            let diff = ordered_product(&ordering, &ordered_ops)?.max_abs_diff(&tps_product(&ordering, &ordered_ops)?);
            identity.residual(diff, || {
                json!({"ordering": ordering.to_string(), "operands": ordered_ops.iter().map(op_json).collect::<Vec<_>>()})
            });
            let om = ordering.masks();
            match &base_masks {
                None => base_masks = Some(om),
                Some(bm) => {
                    let mismatches = (0..d)
                        .flat_map(|r| (0..d).map(move |c| (r, c)))
                        .filter(|&(r, c)| even_pair(r, c) && l_sign(bm, r, c) != l_sign(&om, r, c))
                        .count();
                    signs.residual(
                        mismatches as f64,
                        || json!({"partition": xi.to_string(), "ordering": ordering.to_string()}),
                    );
                }
            }
            let la = lambda_map(&ordering, &a, Direction::Forward)?;
            match &base_lambda {
                None => base_lambda = Some(la),
                Some(b) => lam.residual(
                    la.max_abs_diff(b),
                    || json!({"ordering": ordering.to_string(), "operator": op_json(&a)}),
                ),
            }
        }
        let order = xi.canonical_order();
        let vs: Vec<StateVector> = order
            .parts()
            .iter()
            .map(|p| random_parity_vector(p, if g.random::<bool>() { Sign::Plus } else { Sign::Minus }, g))
            .collect::<Result<_>>()?;
        let joint = tensor_vectors(&order, &vs)?;
        let projectors: Vec<Operator> = vs.iter().map(StateVector::projector).collect();
        let diff = joint.projector().max_abs_diff(&ordered_product(&order, &projectors)?);
        vectors.residual(diff.max((joint.norm() - 1.0).abs()), || json!({"ordering": order.to_string()}));
    }
    Ok(vec![identity, signs, lam, vectors])
}

#[derive(Clone, Copy)]
enum Class {
    Even,
    Odd,
    Mixed,
}

fn prodext_operand(p: &ModeSet, class: Class, psd: bool, g: &mut ChaCha8Rng) -> Operator {
    match (class, psd) {
        (Class::Even, false) => random_parity_hermitian(p, Sign::Plus, g),
        (Class::Odd, _) => random_parity_hermitian(p, Sign::Minus, g),
        (Class::Mixed, false) => random_hermitian(p, g),
        (Class::Even, true) => {
            let v = random_parity_operator(p, Sign::Plus, g);
            v.mul(&v.dagger()).expect("same modes")
        }
        (Class::Mixed, true) => {
            let v = random_operator(p, g);
            v.mul(&v.dagger()).expect("same modes")
        }
    }
}

fn prodext(cfg: CheckConfig, g: &mut ChaCha8Rng) -> Result<Vec<Inv>> {
    let mut agree = Inv::predicate("closed-form self-adjointness and positivity predicates agree with the matrix");
    let mut counterexample = Inv::numeric("two-mode counterexample a = b = 1 has max |A - A^dag| = 2", 0.0);
    let top = cfg.max_modes.max(2);
    for _ in 0..cfg.trials {
        let parts = random_size(2, top.min(4), g);
        let y = ModeSet::range(random_size(parts, top, g) as u32)?;
        let xi = loop {
            let xi = random_ordered_partition(&y, parts, g)?;
            if xi.parts().len() == parts {
                break xi;
            }
        };
        let psd = g.random::<bool>();
        let ops: Vec<Operator> = xi
            .parts()
            .iter()
            .map(|p| {
                let class = match (g.random_range(0..3), psd) {
                    (0, _) => Class::Even,
                    (1, false) => Class::Odd,
                    (1, true) => Class::Even,
                    _ => Class::Mixed,
                };
                prodext_operand(p, class, psd, g)
            })
            .collect();
        let ctx = |detail: String| json!({"ordering": xi.to_string(), "detail": detail, "operands": ops.iter().map(op_json).collect::<Vec<_>>()});
        match product_extension_classify(&xi, &ops, 1e-10) {
            Ok(r) => agree.holds(r.predicted_self_adjoint == r.self_adjoint, || ctx(String::new())),
            Err(Error::Invariant(msg)) => agree.holds(false, || ctx(msg)),
            Err(e) => return Err(e),
        }
    }
    let ones = |p: &str| -> Result<Operator> { Ok(Operator::from_fn(p.parse()?, |_, _| C64::new(1.0, 0.0))) };
    let xi: OrderedPartition = "{1}|{2}".parse()?;
    let r = product_extension_classify(&xi, &[ones("{1}")?, ones("{2}")?], 1e-10)?;
    let residual = if r.self_adjoint { f64::INFINITY } else { (r.adjoint_residual - 2.0).abs() };
    counterexample.residual(residual, || json!({"adjoint_residual": round12(r.adjoint_residual)}));
    Ok(vec![agree, counterexample])
}

fn maps(cfg: CheckConfig, g: &mut ChaCha8Rng) -> Result<Vec<Inv>> {
    let mut tpcp = Inv::predicate("partial trace is TPCP for every subset");
    let mut as_embedding = Inv::numeric("partial trace is the ordered embedding of the trace map", 1e-12);
    let mut strong = Inv::numeric("even embedded maps satisfy both strong-extension identities", 1e-10);
    let mut first = Inv::numeric("odd embedded map satisfies the first extension identity", 0.0);
    let mut flipped = Inv::numeric("odd embedded map violates the second identity by exactly -1", 0.0);
    for n in 1..=cfg.max_modes.min(MAP_SUITE_MODES) as u32 {
        let y = ModeSet::range(n)?;
        for x in y.subsets() {
            let pt = partial_trace_map(&y, &x)?;
            let rep = tpcp_report(&pt, 1e-10);
            tpcp.holds(rep.is_tpcp(), || {
                json!({
                    "y": y.to_string(),
                    "x": x.to_string(),
                    "choi_min_eigenvalue": round12(rep.choi_min_eigenvalue),
                    "trace_residual": round12(rep.trace_residual),
                })
            });
            let xb = y.difference(&x);
            let via = map_embed(MapProduct::Ordered, &xb, &y, &trace_map(&xb)?)?;
            as_embedding.residual(via.max_abs_diff(&pt), || json!({"y": y.to_string(), "x": x.to_string()}));
        }
    }
    let top = cfg.max_modes.min(RANDOM_MAP_MODES);
    if top < 2 {
        return Ok(vec![tpcp, as_embedding, strong, first, flipped]);
    }
    for _ in 0..cfg.trials {
        let y = random_modes(random_size(2, top, g), g);
        let x = proper_subset(&y, g);
        let xb = y.difference(&x);
        let l = left_multiply(&random_parity_operator(&x, Sign::Plus, g))?;
        let r = right_multiply(&random_parity_operator(&x, Sign::Plus, g))?;
        let omega = l.compose(&r)?.add(&theta_map(&x)?)?;
        let big = map_embed(MapProduct::Ordered, &x, &y, &omega)?;
        let (a, b) = (random_operator(&x, g), random_operator(&xb, g));
        let (ea, eb) = (embed(&x, &y, &a)?, embed(&xb, &y, &b)?);
        let ew = embed(&x, &y, &omega.apply(&a)?)?;
        let r1 = big.apply(&ea.mul(&eb)?)?.max_abs_diff(&ew.mul(&eb)?);
        let r2 = big.apply(&eb.mul(&ea)?)?.max_abs_diff(&eb.mul(&ew)?);
        strong.residual(
            r1.max(r2),
            || json!({"y": y.to_string(), "x": x.to_string(), "a": op_json(&a), "b": op_json(&b)}),
        );

        // odd witness: Ω = left multiplication by a_i, A = a_i^dag, B = a_j
        let i = x.labels()[g.random_range(0..x.len())];
        let j = xb.labels()[g.random_range(0..xb.len())];
        let odd = left_multiply(&jw_ladder(i, &x, LadderKind::Annihilate)?)?;
        let big = map_embed(MapProduct::Ordered, &x, &y, &odd)?;
        let ea = embed(&x, &y, &jw_ladder(i, &x, LadderKind::Create)?)?;
        let eb = embed(&xb, &y, &jw_ladder(j, &xb, LadderKind::Annihilate)?)?;
        let image = big.apply(&ea)?;
        let ctx = || json!({"y": y.to_string(), "x": x.to_string(), "i": i, "j": j});
        first.residual(big.apply(&ea.mul(&eb)?)?.max_abs_diff(&image.mul(&eb)?), ctx);
        let lhs = big.apply(&eb.mul(&ea)?)?;
        let rhs = eb.mul(&image)?;
        let r = if rhs.max_abs() < 0.5 { f64::INFINITY } else { lhs.add(&rhs)?.max_abs() };
        flipped.residual(r, || {
            let mut v = ctx();
            v["rhs_corner"] = cplx(rhs.get(0, 0));
            v
        });
    }
    Ok(vec![tpcp, as_embedding, strong, first, flipped])
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cfg() -> CheckConfig {
        CheckConfig { max_modes: 3, seed: 1, trials: 5 }
    }

    #[test]
    fn every_suite_passes_small() {
        let report = check_suite("all", cfg()).unwrap();
        for s in &report.suites {
            for i in &s.invariants {
                assert!(i.passed, "{}: {} {:?}", s.name, i.name, i.counterexample);
            }
        }
        assert!(report.passed);
    }

    #[test]
    fn suites_are_independent_of_selection() {
        let all = check_suite("all", cfg()).unwrap();
        let one = check_suite("tps", cfg()).unwrap();
        let from_all = all.suites.iter().find(|s| s.name == "tps").unwrap();
        assert_eq!(serde_json::to_string(from_all).unwrap(), serde_json::to_string(&one.suites[0]).unwrap());
    }

    #[test]
    fn bad_arguments_are_rejected() {
        assert!(matches!(check_suite("nope", cfg()), Err(Error::Input(_))));
        assert!(check_suite("car", CheckConfig { max_modes: 0, ..cfg() }).is_err());
        assert!(check_suite("car", CheckConfig { trials: 0, ..cfg() }).is_err());
    }

    #[test]
    fn conjugated_trace_matches_library_on_a_sample() {
        let mut g = rng(4);
        let y: ModeSet = "{1,3,4}".parse().unwrap();
        let rho = random_density(&y, &mut g);
        let x: ModeSet = "{3}".parse().unwrap();
        let got = partial_trace(&y, &x, &rho).unwrap();
        assert!(got.max_abs_diff(&conjugated_trace(&y, &x, &rho).unwrap()) <= 1e-12);
    }
}
