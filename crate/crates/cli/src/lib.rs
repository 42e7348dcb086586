//! Command-line front end for fermikit.
//!
//! [`run`] parses an argument list, executes one command and returns the
//! process exit code: 0 on success, 1 on malformed input or usage errors,
//! 2 when a numeric invariant fails (for example a claimed density matrix
//! that is not positive, or a failing `check` suite). All numbers are printed
//! at 12 significant digits, so output is byte-stable for fixed inputs.

pub mod args;
pub mod suites;

use std::ffi::OsString;
use std::io::{Read, Write};
use std::path::Path;

use clap::error::ErrorKind;
use clap::Parser;
use fermikit_core::io::{operator_to_json, parse_object, round12, superop_to_json, vector_to_json, Object};
use fermikit_core::{
    choi, classify_correlation, coeffs, embed, emit_table, is_local_map, is_physical_map, local_parity_projector,
    map_embed, map_parity, map_tensor, operator_parity, ordered_product, partial_trace, project_sector, reduce_state,
    sectors, tensor_fermionic, tpcp_report, vector_parity, Basis, DensityMatrix, Error, LocalTarget, MapProduct,
    ModeSet, Operator, OrderedPartition, ParitySector, Partition, SsrMode, SuperOp, TableArg, TableKind,
};
use serde_json::{json, Value};

use args::{BasisArg, Cli, Command, Format, Kind, MapCommand, MapKind, ParityCommand, StateCommand};
pub use suites::{check_suite, CheckConfig, CheckReport, SUITES};

/// Why a command did not succeed.
#[derive(Debug)]
enum Failure {
    Usage(String),
    Core(Error),
    Io(String),
    /// A `check` report was printed and contains failures.
    ChecksFailed,
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Core(e)
    }
}

impl Failure {
    fn code(&self) -> i32 {
        match self {
            Failure::Core(e) if e.is_numeric() => 2,
            Failure::ChecksFailed => 2,
            _ => 1,
        }
    }
}

type Outcome<T> = std::result::Result<T, Failure>;

/// Runs the CLI with process stdout and stderr.
pub fn run<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let (stdout, stderr) = (std::io::stdout(), std::io::stderr());
    run_with(argv, &mut stdout.lock(), &mut stderr.lock())
}

/// Runs the CLI, writing results to `out` and diagnostics to `err`.
pub fn run_with<I, T>(argv: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            let text = e.render().to_string();
            return if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) {
                let _ = write!(out, "{text}");
                0
            } else {
                let _ = write!(err, "{text}");
                1
            };
        }
    };
    match execute(&cli, out) {
        Ok(()) => 0,
        Err(f) => {
            match &f {
                Failure::Usage(m) => {
                    let _ = writeln!(err, "error: {m}");
                }
                Failure::Core(e) => {
                    let _ = writeln!(err, "error: {e}");
                }
                Failure::Io(m) => {
                    let _ = writeln!(err, "error: {m}");
                }
                Failure::ChecksFailed => {
                    let _ = writeln!(err, "error: invariant suite failed");
                }
            }
            f.code()
        }
    }
}

fn execute(cli: &Cli, out: &mut dyn Write) -> Outcome<()> {
    let tol = cli.tol;
    if !(tol.is_finite() && tol > 0.0) {
        return Err(Failure::Usage(format!("tolerance must be positive and finite, got {tol}")));
    }
    let text = match &cli.command {
        Command::Phase(a) => phase(a)?,
        Command::Tensor(a) => {
            let ops = a.operands.iter().map(|p| read_operator(p, tol)).collect::<Outcome<Vec<_>>>()?;
            let modes: Vec<ModeSet> = ops.iter().map(|o| o.modes().clone()).collect();
            let product = if a.fermionic {
                tensor_fermionic(&Partition::new(modes)?, &ops)?
            } else {
                ordered_product(&OrderedPartition::new(modes)?, &ops)?
            };
            compact(&operator_to_json(&product, false))
        }
        Command::Embed(a) => {
            let op = read_operator(&a.op, tol)?;
            let y: ModeSet = a.into.parse()?;
            compact(&operator_to_json(&embed(op.modes(), &y, &op)?, false))
        }
        Command::Reduce(a) => {
            let x: ModeSet = a.keep.parse()?;
            match read_object(&a.state, tol)? {
                Object::Density(rho) => compact(&operator_to_json(reduce_state(&rho, &x, tol)?.operator(), true)),
                Object::Operator(op) => compact(&operator_to_json(&partial_trace(op.modes(), &x, &op)?, false)),
                _ => return Err(Failure::Usage("reduce expects an operator or state".into())),
            }
        }
        Command::State(s) => state(s, tol)?,
        Command::Parity(p) => parity(p, tol)?,
        Command::Map(m) => map(m, tol)?,
        Command::Check(a) => {
            let cfg = CheckConfig { max_modes: a.max_modes, seed: a.seed, trials: a.trials };
            let report = check_suite(&a.suite, cfg).map_err(|e| match e {
                Error::Input(m) => Failure::Usage(m),
                other => Failure::Core(other),
            })?;
            let text = pretty(&serde_json::to_value(&report).expect("report serializes"));
            write_out(out, &text)?;
            return if report.passed { Ok(()) } else { Err(Failure::ChecksFailed) };
        }
    };
    write_out(out, &text)
}

fn write_out(out: &mut dyn Write, text: &str) -> Outcome<()> {
    out.write_all(text.as_bytes()).map_err(|e| Failure::Io(e.to_string()))
}

/// One-line JSON, used for operator and map payloads.
fn compact(v: &Value) -> String {
    let mut s = serde_json::to_string(v).expect("JSON values serialize");
    s.push('\n');
    s
}

fn pretty(v: &Value) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("JSON values serialize");
    s.push('\n');
    s
}

fn read_text(path: &Path) -> Outcome<String> {
    if path.as_os_str() == "-" {
        let mut s = String::new();
        std::io::stdin().read_to_string(&mut s).map_err(|e| Failure::Io(format!("stdin: {e}")))?;
        Ok(s)
    } else {
        std::fs::read_to_string(path).map_err(|e| Failure::Io(format!("{}: {e}", path.display())))
    }
}

fn read_object(path: &Path, tol: f64) -> Outcome<Object> {
    Ok(parse_object(&read_text(path)?, tol)?)
}

fn read_operator(path: &Path, tol: f64) -> Outcome<Operator> {
    match read_object(path, tol)? {
        Object::Operator(op) => Ok(op),
        Object::Density(rho) => Ok(rho.into_operator()),
        _ => Err(Failure::Usage(format!("{}: expected an operator", path.display()))),
    }
}

/// Reads an operator and validates it as a state whether or not it is flagged.
fn read_state(path: &Path, tol: f64) -> Outcome<DensityMatrix> {
    match read_object(path, tol)? {
        Object::Density(rho) => Ok(rho),
        Object::Operator(op) => Ok(DensityMatrix::new(op, tol)?),
        _ => Err(Failure::Usage(format!("{}: expected a state", path.display()))),
    }
}

fn read_map(path: &Path, tol: f64) -> Outcome<SuperOp> {
    match read_object(path, tol)? {
        Object::Super(s) => Ok(s),
        _ => Err(Failure::Usage(format!("{}: expected a superoperator", path.display()))),
    }
}

fn phase(a: &args::PhaseArgs) -> Outcome<String> {
    let kind = match a.kind {
        Kind::F => TableKind::F,
        Kind::H => TableKind::H,
        Kind::L => TableKind::L,
        Kind::U => TableKind::U,
    };
    let table = if let Some(m) = &a.modes {
        emit_table(kind, TableArg::Modes(&m.parse()?))?
    } else if let Some(p) = &a.partition {
        emit_table(kind, TableArg::Partition(&p.parse()?))?
    } else if let Some(p) = &a.ordered {
        emit_table(kind, TableArg::Ordered(&p.parse()?))?
    } else {
        unreachable!("clap requires one target")
    };
    Ok(match a.format {
        Format::Glyphs => table.to_glyphs(),
        Format::Csv => table.to_csv(),
        Format::Json => compact(&table.to_json()),
    })
}

fn state(cmd: &StateCommand, tol: f64) -> Outcome<String> {
    match cmd {
        StateCommand::Reduce(a) => {
            let rho = read_state(&a.state, tol)?;
            let x: ModeSet = a.keep.parse()?;
            Ok(compact(&operator_to_json(reduce_state(&rho, &x, tol)?.operator(), true)))
        }
        StateCommand::Coeffs { state, basis } => {
            let rho = read_state(state, tol)?;
            let (basis, name) = match basis {
                BasisArg::Standard => (Basis::Standard, "standard"),
                BasisArg::Fermionic => (Basis::Fermionic, "fermionic"),
            };
            let c = coeffs(rho.operator(), basis);
            let mut v = operator_to_json(&Operator::new(c.modes, c.entries)?, false);
            v["basis"] = json!(name);
            Ok(compact(&v))
        }
        StateCommand::Classify { state, partition, ssr } => {
            let rho = read_state(state, tol)?;
            let xi: Partition = partition.parse()?;
            let mode = if *ssr { SsrMode::Ssr } else { SsrMode::NoSsr };
            let r = classify_correlation(&rho, &xi, mode, tol)?;
            Ok(compact(&json!({
                "partition": xi.to_string(),
                "ssr": ssr,
                "physical": r.physical,
                "uncorrelated": r.uncorrelated,
                "product_physical": r.product_physical,
                "uncorrelated_residual": round12(r.uncorrelated_residual),
                "product_residual": round12(r.product_residual),
                "reconstruction_hermitian": r.reconstruction_hermitian,
            })))
        }
    }
}

fn parity(cmd: &ParityCommand, tol: f64) -> Outcome<String> {
    match cmd {
        ParityCommand::Classify { input } => {
            let v = match read_object(input, tol)? {
                Object::Operator(op) => json!({"object": "operator", "parity": operator_parity(&op, tol).to_string()}),
                Object::Density(rho) => {
                    json!({"object": "operator", "parity": operator_parity(rho.operator(), tol).to_string()})
                }
                Object::Vector(v) => json!({"object": "vector", "parity": vector_parity(&v, tol).to_string()}),
                Object::Super(s) => json!({
                    "object": "map",
                    "parity": map_parity(&s, tol).to_string(),
                    "physical": is_physical_map(&s, tol),
                }),
            };
            Ok(compact(&v))
        }
        ParityCommand::Project { input, partition, sector } => {
            let xi: Partition = partition.parse()?;
            let sector = ParitySector::parse(&xi, sector)?;
            match read_object(input, tol)? {
                Object::Operator(op) => Ok(compact(&operator_to_json(&project_sector(&sector, &op)?, false))),
                Object::Density(rho) => {
                    Ok(compact(&operator_to_json(&project_sector(&sector, rho.operator())?, false)))
                }
                Object::Vector(v) => Ok(compact(&vector_to_json(&v.apply(&local_parity_projector(&sector)?)?))),
                Object::Super(_) => Err(Failure::Usage("project expects an operator or vector".into())),
            }
        }
        ParityCommand::Sectors { input, partition } => {
            let xi: Partition = partition.parse()?;
            let blocks: Vec<Value> = match read_object(input, tol)? {
                Object::Operator(op) => sector_blocks(&xi, &op, tol)?,
                Object::Density(rho) => sector_blocks(&xi, rho.operator(), tol)?,
                Object::Vector(v) => {
                    let mut out = Vec::new();
                    for s in ParitySector::all(&xi) {
                        let part = v.apply(&local_parity_projector(&s)?)?;
                        if part.norm() > tol {
                            out.push(json!({"sector": s.to_string(), "vector": vector_to_json(&part)}));
                        }
                    }
                    out
                }
                Object::Super(_) => return Err(Failure::Usage("sectors expects an operator or vector".into())),
            };
            Ok(compact(&json!({"partition": xi.to_string(), "sectors": blocks})))
        }
    }
}

fn sector_blocks(xi: &Partition, op: &Operator, tol: f64) -> Outcome<Vec<Value>> {
    Ok(sectors(xi, op, tol)?
        .into_iter()
        .map(|(s, block)| json!({"sector": s.to_string(), "operator": operator_to_json(&block, false)}))
        .collect())
}

fn product_kind(kind: MapKind) -> MapProduct {
    match kind {
        MapKind::F => MapProduct::Fermionic,
        MapKind::Fp => MapProduct::Ordered,
    }
}

fn map(cmd: &MapCommand, tol: f64) -> Outcome<String> {
    match cmd {
        MapCommand::Embed { map, into, kind } => {
            let omega = read_map(map, tol)?;
            let y: ModeSet = into.parse()?;
            Ok(compact(&superop_to_json(&map_embed(product_kind(*kind), omega.input(), &y, &omega)?)))
        }
        MapCommand::Tensor { kind, maps } => {
            let ops = maps.iter().map(|p| read_map(p, tol)).collect::<Outcome<Vec<_>>>()?;
            let xi = OrderedPartition::new(ops.iter().map(|o| o.input().clone()).collect())?;
            Ok(compact(&superop_to_json(&map_tensor(product_kind(*kind), &xi, &ops)?)))
        }
        MapCommand::Choi { map } => {
            let omega = read_map(map, tol)?;
            let c = choi(&omega);
            let rep = tpcp_report(&omega, tol);
            let part = |f: fn(&fermikit_core::C64) -> f64| -> Vec<Vec<f64>> {
                (0..c.matrix.nrows())
                    .map(|r| (0..c.matrix.ncols()).map(|k| round12(f(&c.matrix[(r, k)]))).collect())
                    .collect()
            };
            Ok(compact(&json!({
                "input": c.input.labels(),
                "output": c.output.labels(),
                "re": part(|z| z.re),
                "im": part(|z| z.im),
                "completely_positive": rep.completely_positive,
                "trace_preserving": rep.trace_preserving,
                "tpcp": rep.is_tpcp(),
                "choi_min_eigenvalue": round12(rep.choi_min_eigenvalue),
                "trace_residual": round12(rep.trace_residual),
            })))
        }
        MapCommand::Classify { map, local, partition } => {
            let omega = read_map(map, tol)?;
            let rep = tpcp_report(&omega, tol);
            let mut v = json!({
                "parity": map_parity(&omega, tol).to_string(),
                "physical": is_physical_map(&omega, tol),
                "completely_positive": rep.completely_positive,
                "trace_preserving": rep.trace_preserving,
                "tpcp": rep.is_tpcp(),
                "choi_min_eigenvalue": round12(rep.choi_min_eigenvalue),
                "trace_residual": round12(rep.trace_residual),
            });
            let locality = if let Some(x) = local {
                let x: ModeSet = x.parse()?;
                Some((x.to_string(), is_local_map(&omega, LocalTarget::Modes(&x), tol)?))
            } else if let Some(p) = partition {
                let xi: Partition = p.parse()?;
                Some((xi.to_string(), is_local_map(&omega, LocalTarget::Partition(&xi), tol)?))
            } else {
                None
            };
            if let Some((target, r)) = locality {
                v["locality"] = json!({
                    "target": target,
                    "local": r.local,
                    "residual": round12(r.residual),
                    "remainder_physical": r.remainder_physical,
                    "factors": r.factors.iter().map(superop_to_json).collect::<Vec<_>>(),
                });
            }
            Ok(compact(&v))
        }
    }
}
