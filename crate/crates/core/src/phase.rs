//! Exact sign kernels `f`, `h`, `l`, `u` and their tables.
//!
//! Kernels work on raw matrix indices (see [`crate::modes`] for the bit
//! convention). With `d = a ^ b`, the parity of `ν_k + ν'_k` summed over a
//! mask is `popcount(d & mask)`, and "modes after bit `t`" are the bits
//! below `t`.

use std::fmt;
use std::ops::Mul;

use serde_json::Value;

use crate::error::{Error, Result};
use crate::modes::{index_pattern, pattern_index, ModeSet, OccPattern, OrderedPartition, Partition};

/// An exact sign, `+1` or `-1`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Sign {
    Plus,
    Minus,
}

impl Sign {
    /// `(-1)^parity`.
    #[inline]
    pub fn from_parity(parity: u32) -> Sign {
        if parity & 1 == 0 {
            Sign::Plus
        } else {
            Sign::Minus
        }
    }

    pub fn value(self) -> i8 {
        match self {
            Sign::Plus => 1,
            Sign::Minus => -1,
        }
    }

    #[inline]
    pub fn as_f64(self) -> f64 {
        match self {
            Sign::Plus => 1.0,
            Sign::Minus => -1.0,
        }
    }

    pub fn glyph(self) -> char {
        match self {
            Sign::Plus => '+',
            Sign::Minus => '-',
        }
    }

    pub fn from_glyph(c: char) -> Option<Sign> {
        match c {
            '+' => Some(Sign::Plus),
            '-' | '\u{2212}' => Some(Sign::Minus),
            _ => None,
        }
    }
}

impl Mul for Sign {
    type Output = Sign;
    fn mul(self, rhs: Sign) -> Sign {
        if self == rhs {
            Sign::Plus
        } else {
            Sign::Minus
        }
    }
}

impl fmt::Display for Sign {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.glyph())
    }
}

#[inline]
fn below(bit: u32) -> usize {
    (1usize << bit) - 1
}

#[inline]
fn part_of(masks: &[usize], bit: u32) -> usize {
    masks.iter().position(|m| m >> bit & 1 == 1).expect("bit covered by a part")
}

/// Exponent parity of `f` on raw indices.
#[inline]
pub fn f_parity(a: usize, b: usize) -> u32 {
    let d = a ^ b;
    let mut rest = b;
    let mut acc = 0u32;
    while rest != 0 {
        let t = rest.trailing_zeros();
        acc += (d & below(t)).count_ones();
        rest &= rest - 1;
    }
    acc & 1
}

/// `f_Y(a, b)` on raw indices.
#[inline]
pub fn f_sign(a: usize, b: usize) -> Sign {
    Sign::from_parity(f_parity(a, b))
}

/// `h_ξ(a, b)`; `masks` are the parts' bit masks, possibly empty.
#[inline]
pub fn h_sign(masks: &[usize], a: usize, b: usize) -> Sign {
    let d = a ^ b;
    let mut rest = b;
    let mut acc = 0u32;
    while rest != 0 {
        let t = rest.trailing_zeros();
        let own = masks[part_of(masks, t)];
        acc += (d & below(t) & !own).count_ones();
        rest &= rest - 1;
    }
    Sign::from_parity(acc)
}

/// `l_ξ⃗(a, b)`; `masks` in tuple order.
#[inline]
pub fn l_sign(masks: &[usize], a: usize, b: usize) -> Sign {
    let d = a ^ b;
    let mut rest = d;
    let mut acc = 0u32;
    while rest != 0 {
        let t = rest.trailing_zeros();
        let r = part_of(masks, t);
        let earlier = masks[..r].iter().fold(0, |m, x| m | x);
        acc += (d & below(t) & earlier).count_ones();
        rest &= rest - 1;
    }
    Sign::from_parity(acc)
}

/// `u_ξ⃗(a)`; `masks` in tuple order.
#[inline]
pub fn u_sign(masks: &[usize], a: usize) -> Sign {
    let mut rest = a;
    let mut acc = 0u32;
    while rest != 0 {
        let t = rest.trailing_zeros();
        let r = part_of(masks, t);
        let earlier = masks[..r].iter().fold(0, |m, x| m | x);
        acc += (a & below(t) & earlier).count_ones();
        rest &= rest - 1;
    }
    Sign::from_parity(acc)
}

fn indices(y: &ModeSet, nu: &OccPattern, nup: &OccPattern) -> Result<(usize, usize)> {
    Ok((pattern_index(y, nu)?, pattern_index(y, nup)?))
}

fn on_partition(y: &ModeSet, nu: &OccPattern, nup: &OccPattern) -> Result<(usize, usize)> {
    if nu.modes() != y || nup.modes() != y {
        return Err(Error::Partition(format!(
            "patterns on {} and {} do not match the partitioned set {y}",
            nu.modes(),
            nup.modes()
        )));
    }
    indices(y, nu, nup)
}

/// `f_Y(ν, ν')`.
pub fn phase_f(y: &ModeSet, nu: &OccPattern, nup: &OccPattern) -> Result<Sign> {
    let (a, b) = indices(y, nu, nup)?;
    Ok(f_sign(a, b))
}

/// `h_ξ(ν, ν')`.
pub fn phase_h(xi: &Partition, nu: &OccPattern, nup: &OccPattern) -> Result<Sign> {
    let (a, b) = on_partition(xi.modes(), nu, nup)?;
    Ok(h_sign(&xi.masks(), a, b))
}

/// `l_ξ⃗(ν, ν')`.
pub fn phase_l(xi: &OrderedPartition, nu: &OccPattern, nup: &OccPattern) -> Result<Sign> {
    let (a, b) = on_partition(xi.modes(), nu, nup)?;
    Ok(l_sign(&xi.masks(), a, b))
}

/// `u_ξ⃗(ν)`.
pub fn phase_u(xi: &OrderedPartition, nu: &OccPattern) -> Result<Sign> {
    let (a, _) = on_partition(xi.modes(), nu, nu)?;
    Ok(u_sign(&xi.masks(), a))
}

/// Which kernel to tabulate.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum TableKind {
    F,
    H,
    L,
    U,
}

impl std::str::FromStr for TableKind {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "f" => Ok(TableKind::F),
            "h" => Ok(TableKind::H),
            "l" => Ok(TableKind::L),
            "u" => Ok(TableKind::U),
            _ => Err(Error::Parse(format!("unknown table kind {s:?}"))),
        }
    }
}

/// Argument of [`emit_table`].
#[derive(Clone, Copy, Debug)]
pub enum TableArg<'a> {
    Modes(&'a ModeSet),
    Partition(&'a Partition),
    Ordered(&'a OrderedPartition),
}

/// Rows of signs; `u` tables have a single row.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SignTable {
    pub rows: Vec<Vec<Sign>>,
}

impl SignTable {
    /// Space-separated glyph rows, one line per row.
    pub fn to_glyphs(&self) -> String {
        let mut s = String::new();
        for row in &self.rows {
            let line: Vec<String> = row.iter().map(|x| x.glyph().to_string()).collect();
            s.push_str(&line.join(" "));
            s.push('\n');
        }
        s
    }

    pub fn to_csv(&self) -> String {
        let mut s = String::new();
        for row in &self.rows {
            let line: Vec<String> = row.iter().map(|x| x.value().to_string()).collect();
            s.push_str(&line.join(","));
            s.push('\n');
        }
        s
    }

    pub fn to_json(&self) -> Value {
        Value::Array(
            self.rows.iter().map(|r| Value::Array(r.iter().map(|x| Value::from(x.value())).collect())).collect(),
        )
    }

    /// Parses the glyph format produced by [`SignTable::to_glyphs`].
    pub fn parse_glyphs(s: &str) -> Result<SignTable> {
        let rows = s
            .lines()
            .filter(|l| !l.trim().is_empty())
            .map(|l| {
                l.split_whitespace()
                    .map(|g| {
                        let mut cs = g.chars();
                        match (cs.next().and_then(Sign::from_glyph), cs.next()) {
                            (Some(x), None) => Ok(x),
                            _ => Err(Error::Parse(format!("bad sign glyph {g:?}"))),
                        }
                    })
                    .collect::<Result<Vec<_>>>()
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(SignTable { rows })
    }
}

/// Tabulates a kernel in the lexicographic index order.
pub fn emit_table(kind: TableKind, arg: TableArg<'_>) -> Result<SignTable> {
    let (modes, masks) = match (kind, arg) {
        (TableKind::F, TableArg::Modes(y)) => (y.clone(), vec![]),
        (TableKind::F, TableArg::Partition(p)) => (p.modes().clone(), vec![]),
        (TableKind::F, TableArg::Ordered(p)) => (p.modes().clone(), vec![]),
        (TableKind::H, TableArg::Partition(p)) => (p.modes().clone(), p.masks()),
        (TableKind::H, TableArg::Ordered(p)) => (p.modes().clone(), p.masks()),
        (TableKind::L | TableKind::U, TableArg::Ordered(p)) => (p.modes().clone(), p.masks()),
        (_, TableArg::Modes(_)) => return Err(Error::Partition(format!("{kind:?} tables need a partition"))),
        (_, TableArg::Partition(_)) => {
            return Err(Error::Partition(format!("{kind:?} tables need an ordered partition")))
        }
    };
    let dim = modes.dim();
    // Round-trip through the pattern API so the table order is the public one.
    let pats: Vec<OccPattern> = (0..dim).map(|i| index_pattern(&modes, i)).collect::<Result<_>>()?;
    let idx = |p: &OccPattern| pattern_index(&modes, p);
    let rows = match kind {
        TableKind::U => {
            vec![pats.iter().map(|p| Ok(u_sign(&masks, idx(p)?))).collect::<Result<Vec<_>>>()?]
        }
        _ => pats
            .iter()
            .map(|p| {
                pats.iter()
                    .map(|q| {
                        let (a, b) = (idx(p)?, idx(q)?);
                        Ok(match kind {
                            TableKind::F => f_sign(a, b),
                            TableKind::H => h_sign(&masks, a, b),
                            _ => l_sign(&masks, a, b),
                        })
                    })
                    .collect::<Result<Vec<_>>>()
            })
            .collect::<Result<Vec<_>>>()?,
    };
    Ok(SignTable { rows })
}
