//! JSON interchange for operators, states, vectors and superoperators, and
//! the 12-significant-digit number formatting shared by all output.
//!
//! An operator is `{"modes": [1, 2], "re": [[..]], "im": [[..]]}` with `im`
//! optional; `modes` may also be given as the text `"{1,2}"`.
//! `"density": true` requests state validation. A superoperator adds
//! `"super": true` and an optional `"out_modes"` (default `modes`). A vector
//! has one-dimensional `re`/`im` arrays.

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::algebra::{Operator, C64};
use crate::error::{Error, Result};
use crate::maps::SuperOp;
use crate::modes::ModeSet;
use crate::parity::StateVector;
use crate::states::DensityMatrix;

/// Rounds to 12 significant digits; `-0` becomes `0`.
pub fn round12(x: f64) -> f64 {
    if !x.is_finite() || x == 0.0 {
        return if x == 0.0 { 0.0 } else { x };
    }
    let r: f64 = format!("{x:.11e}").parse().expect("formatted float parses");
    if r == 0.0 {
        0.0
    } else {
        r
    }
}

/// Shortest decimal text of [`round12`]`(x)`.
pub fn fmt12(x: f64) -> String {
    format!("{}", round12(x))
}

/// `a+bi` text with both parts at 12 significant digits.
pub fn fmt_complex(z: C64) -> String {
    let (re, im) = (round12(z.re), round12(z.im));
    if im == 0.0 {
        fmt12(re)
    } else if re == 0.0 {
        format!("{}i", fmt12(im))
    } else if im < 0.0 {
        format!("{}-{}i", fmt12(re), fmt12(-im))
    } else {
        format!("{}+{}i", fmt12(re), fmt12(im))
    }
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(untagged)]
enum ModesJson {
    List(Vec<u32>),
    Text(String),
}

impl ModesJson {
    fn of(m: &ModeSet) -> Self {
        ModesJson::List(m.labels().to_vec())
    }

    fn parse(&self) -> Result<ModeSet> {
        match self {
            ModesJson::List(v) => ModeSet::new(v.iter().copied()),
            ModesJson::Text(s) => s.parse(),
        }
    }
}

#[derive(Debug, Serialize, Deserialize)]
struct MatrixJson {
    modes: ModesJson,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    out_modes: Option<ModesJson>,
    re: Vec<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    im: Option<Vec<Vec<f64>>>,
    #[serde(default, skip_serializing_if = "std::ops::Not::not")]
    density: bool,
    #[serde(default, rename = "super", skip_serializing_if = "std::ops::Not::not")]
    is_super: bool,
}

#[derive(Debug, Serialize, Deserialize)]
struct VectorJson {
    modes: ModesJson,
    re: Vec<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    im: Option<Vec<f64>>,
}

/// Any object the CLI reads.
#[derive(Clone, Debug)]
pub enum Object {
    Operator(Operator),
    Density(DensityMatrix),
    Super(SuperOp),
    Vector(StateVector),
}

fn to_matrix(re: &[Vec<f64>], im: Option<&Vec<Vec<f64>>>) -> Result<DMatrix<C64>> {
    let rows = re.len();
    let cols = re.first().map_or(0, Vec::len);
    if re.iter().any(|r| r.len() != cols) {
        return Err(Error::Shape("ragged rows in \"re\"".into()));
    }
    if let Some(im) = im {
        if im.len() != rows || im.iter().any(|r| r.len() != cols) {
            return Err(Error::Shape("\"im\" shape differs from \"re\"".into()));
        }
    }
    let m = DMatrix::from_fn(rows, cols, |r, c| C64::new(re[r][c], im.map_or(0.0, |im| im[r][c])));
    if m.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
        return Err(Error::Input("entries must be finite".into()));
    }
    Ok(m)
}

fn split(m: &DMatrix<C64>) -> (Vec<Vec<f64>>, Vec<Vec<f64>>) {
    let part =
        |f: fn(&C64) -> f64| (0..m.nrows()).map(|r| (0..m.ncols()).map(|c| round12(f(&m[(r, c)]))).collect()).collect();
    (part(|z| z.re), part(|z| z.im))
}

/// Parses any supported JSON object; density matrices are validated at `tol`.
pub fn parse_object(text: &str, tol: f64) -> Result<Object> {
    let value: Value = serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))?;
    let is_vector = value.get("re").and_then(Value::as_array).is_some_and(|a| a.first().is_some_and(Value::is_number));
    if is_vector {
        let v: VectorJson = serde_json::from_value(value).map_err(|e| Error::Parse(e.to_string()))?;
        let modes = v.modes.parse()?;
        if v.im.as_ref().is_some_and(|im| im.len() != v.re.len()) {
            return Err(Error::Shape("\"im\" length differs from \"re\"".into()));
        }
        let amps = DVector::from_fn(v.re.len(), |k, _| C64::new(v.re[k], v.im.as_ref().map_or(0.0, |im| im[k])));
        return Ok(Object::Vector(StateVector::new(modes, amps)?));
    }
    let m: MatrixJson = serde_json::from_value(value).map_err(|e| Error::Parse(e.to_string()))?;
    let modes = m.modes.parse()?;
    let mat = to_matrix(&m.re, m.im.as_ref())?;
    if m.is_super {
        let out = match &m.out_modes {
            Some(o) => o.parse()?,
            None => modes.clone(),
        };
        return Ok(Object::Super(SuperOp::new(modes, out, mat)?));
    }
    let op = Operator::new(modes, mat)?;
    if m.density {
        return Ok(Object::Density(DensityMatrix::new(op, tol)?));
    }
    Ok(Object::Operator(op))
}

pub fn operator_from_json(text: &str) -> Result<Operator> {
    match parse_object(text, f64::INFINITY)? {
        Object::Operator(op) => Ok(op),
        Object::Density(d) => Ok(d.into_operator()),
        _ => Err(Error::Parse("expected an operator".into())),
    }
}

pub fn operator_to_json(op: &Operator, density: bool) -> Value {
    let (re, im) = split(op.matrix());
    serde_json::to_value(MatrixJson {
        modes: ModesJson::of(op.modes()),
        out_modes: None,
        re,
        im: Some(im),
        density,
        is_super: false,
    })
    .expect("plain data serializes")
}

pub fn superop_to_json(omega: &SuperOp) -> Value {
    let (re, im) = split(omega.matrix());
    let out_modes = (omega.output() != omega.input()).then(|| ModesJson::of(omega.output()));
    serde_json::to_value(MatrixJson {
        modes: ModesJson::of(omega.input()),
        out_modes,
        re,
        im: Some(im),
        density: false,
        is_super: true,
    })
    .expect("plain data serializes")
}

pub fn vector_to_json(v: &StateVector) -> Value {
    let amps = v.amplitudes();
    serde_json::to_value(VectorJson {
        modes: ModesJson::of(v.modes()),
        re: amps.iter().map(|z| round12(z.re)).collect(),
        im: Some(amps.iter().map(|z| round12(z.im)).collect()),
    })
    .expect("plain data serializes")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rounding() {
        assert_eq!(round12(0.1 + 0.2), 0.3);
        assert_eq!(round12(-0.0), 0.0);
        assert_eq!(fmt12(1.0 / 3.0), "0.333333333333");
        assert_eq!(fmt12(2.0), "2");
        assert_eq!(fmt_complex(C64::new(1.0, -0.5)), "1-0.5i");
    }

    #[test]
    fn operator_round_trip() {
        let y: ModeSet = "{1,2}".parse().unwrap();
        let op = Operator::from_fn(y, |r, c| C64::new(r as f64, c as f64 * 0.5));
        let text = operator_to_json(&op, false).to_string();
        assert_eq!(operator_from_json(&text).unwrap(), op);
    }

    #[test]
    fn density_flag_validates() {
        let text = r#"{"modes":"{1}","re":[[2,0],[0,-1]],"density":true}"#;
        assert!(matches!(parse_object(text, 1e-10), Err(Error::State(_))));
        let text = r#"{"modes":"{1}","re":[[0.5,0],[0,0.5]],"density":true}"#;
        assert!(matches!(parse_object(text, 1e-10), Ok(Object::Density(_))));
    }

    #[test]
    fn vectors_and_maps() {
        let text = r#"{"modes":[1],"re":[0.6,0.8]}"#;
        assert!(matches!(parse_object(text, 1e-10), Ok(Object::Vector(_))));
        let omega = crate::maps::trace_map(&"{1}".parse().unwrap()).unwrap();
        let text = superop_to_json(&omega).to_string();
        match parse_object(&text, 1e-10).unwrap() {
            Object::Super(s) => assert_eq!(s, omega),
            other => panic!("{other:?}"),
        }
    }
}
