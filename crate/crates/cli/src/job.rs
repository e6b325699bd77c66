//! Parsing of field descriptors, scalars and matrices from JSON.

use maslov::{FieldCtx, FieldKind, FormMatrix, Matrix, Scalar, Sign};
use serde_json::{json, Value};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Parse(String),
    #[error("{0}")]
    Validation(#[from] maslov::Error),
    #[error("{0}")]
    Io(#[from] std::io::Error),
}

impl CliError {
    pub fn kind(&self) -> &'static str {
        match self {
            CliError::Parse(_) => "ParseError",
            CliError::Validation(_) => "ValidationError",
            CliError::Io(_) => "IoError",
        }
    }

    pub fn to_json(&self) -> Value {
        let mut v = json!({ "error": self.kind(), "message": self.to_string() });
        if let CliError::Validation(e) = self {
            v["name"] = json!(e.name());
        }
        v
    }
}

pub type CliResult<T> = std::result::Result<T, CliError>;

fn parse_err(msg: impl Into<String>) -> CliError {
    CliError::Parse(msg.into())
}

/// Accepts `{"kind":"Fp","p":5,"eps":1}` or the short forms `Q`, `Fp:5`,
/// `Fp2:3`, `QSqrt:-1`.
pub fn parse_field(desc: &str, eps: Option<i64>) -> CliResult<FieldCtx> {
    let desc = desc.trim();
    let (kind, param, json_eps) = if desc.starts_with('{') {
        let v: Value = serde_json::from_str(desc).map_err(|e| parse_err(format!("field descriptor: {e}")))?;
        let kind = v["kind"].as_str().ok_or_else(|| parse_err("field descriptor needs a \"kind\""))?.to_string();
        let param = v.get("p").or_else(|| v.get("d")).and_then(Value::as_i64);
        (kind, param, v.get("eps").and_then(Value::as_i64))
    } else {
        match desc.split_once(':') {
            Some((k, p)) => {
                let p = p.trim().parse::<i64>().map_err(|_| parse_err(format!("bad field parameter {p:?}")))?;
                (k.trim().to_string(), Some(p), None)
            }
            None => (desc.to_string(), None, None),
        }
    };
    let eps = match eps.or(json_eps).unwrap_or(1) {
        1 => Sign::Plus,
        -1 => Sign::Minus,
        e => return Err(parse_err(format!("eps must be 1 or -1, got {e}"))),
    };
    let need = |what: &str| param.ok_or_else(|| parse_err(format!("field kind {kind} needs {what}")));
    let prime = |p: i64| u64::try_from(p).map_err(|_| parse_err(format!("bad prime {p}")));
    let kind = match kind.as_str() {
        "Q" => FieldKind::RationalsId,
        "Fp" => FieldKind::PrimeFieldId(prime(need("p")?)?),
        "Fp2" => FieldKind::FrobeniusQuadratic(prime(need("p")?)?),
        "QSqrt" => FieldKind::QuadExtConj(need("d")?),
        other => return Err(parse_err(format!("unknown field kind {other:?}"))),
    };
    Ok(FieldCtx::new(kind, eps)?)
}

pub fn field_json(ctx: &FieldCtx) -> Value {
    let mut v = match ctx.kind {
        FieldKind::RationalsId => json!({ "kind": "Q" }),
        FieldKind::PrimeFieldId(p) => json!({ "kind": "Fp", "p": p }),
        FieldKind::FrobeniusQuadratic(p) => json!({ "kind": "Fp2", "p": p }),
        FieldKind::QuadExtConj(d) => json!({ "kind": "QSqrt", "d": d }),
    };
    v["eps"] = json!(ctx.eps.value());
    v
}

/// `--input` is either inline JSON or a path to a JSON file.
pub fn load_input(arg: Option<&str>) -> CliResult<Value> {
    let Some(arg) = arg else { return Ok(Value::Null) };
    let text = if arg.trim_start().starts_with(['{', '[']) {
        arg.to_string()
    } else {
        std::fs::read_to_string(arg)?
    };
    serde_json::from_str(&text).map_err(|e| parse_err(format!("input: {e}")))
}

/// A scalar is a string (`"3/4"`, `"1+2*w"`), an integer, or a pair `[a, b]`
/// of coordinates.
pub fn scalar(ctx: &FieldCtx, v: &Value) -> CliResult<Scalar> {
    match v {
        Value::String(s) => Ok(ctx.parse_scalar(s)?),
        Value::Number(n) => {
            let k = n.as_i64().ok_or_else(|| parse_err(format!("non-integer number {n}; use a string")))?;
            Ok(ctx.from_int(k))
        }
        Value::Array(pair) if pair.len() == 2 => {
            let part = |x: &Value| match x {
                Value::String(s) => Ok(maslov::field::parse_rational(s)?),
                Value::Number(n) => Ok(maslov::field::parse_rational(&n.to_string())?),
                _ => Err(parse_err(format!("bad coordinate {x}"))),
            };
            Ok(ctx.from_parts(&part(&pair[0])?, &part(&pair[1])?)?)
        }
        _ => Err(parse_err(format!("bad scalar {v}"))),
    }
}

/// Row-major array of rows.
pub fn matrix(ctx: &FieldCtx, v: &Value) -> CliResult<Matrix> {
    let rows = v.as_array().ok_or_else(|| parse_err(format!("matrix must be an array of rows, got {v}")))?;
    let rows = rows
        .iter()
        .map(|r| {
            r.as_array()
                .ok_or_else(|| parse_err(format!("matrix row must be an array, got {r}")))?
                .iter()
                .map(|x| scalar(ctx, x))
                .collect::<CliResult<Vec<_>>>()
        })
        .collect::<CliResult<Vec<_>>>()?;
    Ok(Matrix::from_rows(*ctx, rows)?)
}

pub fn form(ctx: &FieldCtx, v: &Value) -> CliResult<FormMatrix> {
    Ok(FormMatrix::new(matrix(ctx, v)?, ctx.eps)?)
}

pub fn field<'a>(input: &'a Value, key: &str) -> CliResult<&'a Value> {
    input.get(key).ok_or_else(|| parse_err(format!("input needs {key:?}")))
}

pub fn scalar_json(x: &Scalar) -> Value {
    json!(x.to_string())
}

pub fn matrix_json(m: &Matrix) -> Value {
    Value::Array(m.to_rows().iter().map(|r| Value::Array(r.iter().map(scalar_json).collect())).collect())
}
