//! JSON codecs for matrices, Plücker vectors and resistor networks.
//!
//! Matrix: `{"rows": k, "cols": n, "data": [[..]], "scalar": "rational" | "float"}`
//! with rational entries as `"p/q"` strings. Plücker vector:
//! `{"k": k, "n": n, "coords": {"1,2": "..", ..}}` with 1-based keys.
//! Network: `{"boundary": [..], "edges": [[u, v, "c"], ..]}`.

use serde_json::{json, Map, Value};

use crate::electrical::ResistorNetwork;
use crate::error::{Error, Result};
use crate::grassmann::PluckerVector;
use crate::matrix::Matrix;
use crate::scalar::Scalar;
use crate::subsets::{parse_subset_key, subset_key};

fn field<'a>(obj: &'a Map<String, Value>, name: &str, ctx: &str) -> Result<&'a Value> {
    obj.get(name)
        .ok_or_else(|| Error::parse(ctx, format!("missing field {name:?}")))
}

fn as_object<'a>(v: &'a Value, ctx: &str) -> Result<&'a Map<String, Value>> {
    v.as_object().ok_or_else(|| Error::parse(ctx, "expected an object"))
}

fn as_usize(v: &Value, ctx: &str) -> Result<usize> {
    v.as_u64()
        .map(|x| x as usize)
        .ok_or_else(|| Error::parse(ctx, format!("expected a nonnegative integer, got {v}")))
}

/// A scalar from a JSON string (`"p/q"`, integer or decimal) or number.
pub fn scalar_from_value<T: Scalar>(v: &Value, ctx: &str) -> Result<T> {
    let parsed = match v {
        Value::String(s) => T::parse_str(s),
        Value::Number(n) => match (n.as_i64(), n.as_f64()) {
            (Some(i), _) => Some(T::from_ratio(i, 1)),
            (None, Some(f)) if T::EXACT => T::parse_str(&n.to_string()).or(Some(T::from_f64(f))),
            (None, Some(f)) => Some(T::from_f64(f)),
            _ => None,
        },
        _ => None,
    };
    parsed.ok_or_else(|| Error::parse(ctx, format!("not a {} scalar: {v}", T::NAME)))
}

pub fn scalar_to_value<T: Scalar>(x: &T) -> Value {
    if T::EXACT {
        Value::String(x.to_string())
    } else {
        let f = x.to_f64();
        serde_json::Number::from_f64(f).map_or_else(|| Value::String(f.to_string()), Value::Number)
    }
}

pub fn matrix_to_json<T: Scalar>(m: &Matrix<T>) -> Value {
    let data: Vec<Value> = (0..m.rows())
        .map(|i| Value::Array(m.row(i).iter().map(scalar_to_value).collect()))
        .collect();
    json!({"rows": m.rows(), "cols": m.cols(), "data": data, "scalar": T::NAME})
}

pub fn matrix_from_json<T: Scalar>(v: &Value) -> Result<Matrix<T>> {
    let obj = as_object(v, "matrix")?;
    let rows = as_usize(field(obj, "rows", "matrix")?, "matrix.rows")?;
    let cols = as_usize(field(obj, "cols", "matrix.cols")?, "matrix.cols")?;
    if let Some(s) = obj.get("scalar") {
        match s.as_str() {
            Some("rational") | Some("float") => {}
            _ => return Err(Error::parse("matrix.scalar", format!("expected \"rational\" or \"float\", got {s}"))),
        }
    }
    let data = field(obj, "data", "matrix")?
        .as_array()
        .ok_or_else(|| Error::parse("matrix.data", "expected an array of rows"))?;
    if data.len() != rows {
        return Err(Error::parse("matrix.data", format!("expected {rows} rows, got {}", data.len())));
    }
    let mut out = Vec::with_capacity(rows * cols);
    for (i, row) in data.iter().enumerate() {
        let ctx = format!("matrix.data[{i}]");
        let row = row.as_array().ok_or_else(|| Error::parse(&ctx, "expected an array"))?;
        if row.len() != cols {
            return Err(Error::parse(&ctx, format!("expected {cols} entries, got {}", row.len())));
        }
        for (j, x) in row.iter().enumerate() {
            out.push(scalar_from_value(x, &format!("matrix.data[{i}][{j}]"))?);
        }
    }
    Matrix::new(rows, cols, out)
}

pub fn plucker_to_json<T: Scalar>(p: &PluckerVector<T>) -> Value {
    let coords: Map<String, Value> = p
        .iter()
        .map(|(s, x)| (subset_key(&s), scalar_to_value(x)))
        .collect();
    json!({"k": p.k(), "n": p.n(), "coords": coords})
}

/// Missing keys read as zero; unknown or malformed keys are errors.
pub fn plucker_from_json<T: Scalar>(v: &Value) -> Result<PluckerVector<T>> {
    let obj = as_object(v, "plucker")?;
    let k = as_usize(field(obj, "k", "plucker")?, "plucker.k")?;
    let n = as_usize(field(obj, "n", "plucker")?, "plucker.n")?;
    let coords = as_object(field(obj, "coords", "plucker")?, "plucker.coords")?;
    if k > n {
        return Err(Error::parse("plucker.k", format!("k = {k} exceeds n = {n}")));
    }
    let mut values = vec![T::zero(); crate::subsets::binomial(n, k)];
    for (key, x) in coords {
        let subset = parse_subset_key(key, n, k)?;
        let idx = crate::subsets::subset_rank(&subset, n);
        values[idx] = scalar_from_value(x, &format!("plucker.coords[{key:?}]"))?;
    }
    PluckerVector::new(k, n, values)
}

pub fn network_to_json<T: Scalar>(net: &ResistorNetwork<T>) -> Value {
    let edges: Vec<Value> = net
        .edges()
        .iter()
        .map(|(u, v, c)| json!([u, v, c.to_string()]))
        .collect();
    json!({"boundary": net.boundary(), "edges": edges})
}

pub fn network_from_json<T: Scalar>(v: &Value) -> Result<ResistorNetwork<T>> {
    let obj = as_object(v, "network")?;
    let boundary = field(obj, "boundary", "network")?
        .as_array()
        .ok_or_else(|| Error::parse("network.boundary", "expected an array"))?
        .iter()
        .enumerate()
        .map(|(i, x)| as_usize(x, &format!("network.boundary[{i}]")))
        .collect::<Result<Vec<_>>>()?;
    let edges = field(obj, "edges", "network")?
        .as_array()
        .ok_or_else(|| Error::parse("network.edges", "expected an array"))?
        .iter()
        .enumerate()
        .map(|(i, e)| {
            let ctx = format!("network.edges[{i}]");
            match e.as_array().map(Vec::as_slice) {
                Some([u, v, c]) => Ok((as_usize(u, &ctx)?, as_usize(v, &ctx)?, scalar_from_value(c, &ctx)?)),
                _ => Err(Error::parse(&ctx, "expected [u, v, conductance]")),
            }
        })
        .collect::<Result<Vec<_>>>()?;
    ResistorNetwork::new(boundary, edges)
}

/// Parses text, reporting the line and column of syntax errors.
pub fn parse_json(text: &str) -> Result<Value> {
    serde_json::from_str(text).map_err(|e| Error::parse(format!("line {} column {}", e.line(), e.column()), e.to_string()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::{rat, Rational};

    #[test]
    fn rational_matrix_round_trip() {
        let m = Matrix::from_rows(vec![vec![rat(1, 3), rat(-2, 1)], vec![rat(0, 1), rat(7, 5)]]).unwrap();
        let v = matrix_to_json(&m);
        assert_eq!(v["data"][0][0], "1/3");
        assert_eq!(v["scalar"], "rational");
        let back: Matrix<Rational> = matrix_from_json(&parse_json(&v.to_string()).unwrap()).unwrap();
        assert_eq!(back, m);
    }

    #[test]
    fn float_matrix_round_trip() {
        let m = Matrix::from_rows(vec![vec![0.1, -2.5, 1e-17]]).unwrap();
        let back: Matrix<f64> = matrix_from_json(&matrix_to_json(&m)).unwrap();
        assert_eq!(back, m);
    }

    #[test]
    fn malformed_subset_key_is_named() {
        let v = json!({"k": 2, "n": 4, "coords": {"2,1": "1"}});
        let err = plucker_from_json::<Rational>(&v).unwrap_err().to_string();
        assert!(err.contains("\"2,1\""), "{err}");
    }

    #[test]
    fn plucker_round_trip() {
        let m = Matrix::from_rows(vec![vec![rat(1, 1), rat(0, 1), rat(-1, 2)], vec![rat(0, 1), rat(1, 1), rat(2, 3)]]).unwrap();
        let p = crate::grassmann::plucker_raw(&m).unwrap();
        let back: PluckerVector<Rational> = plucker_from_json(&plucker_to_json(&p)).unwrap();
        assert_eq!(back.coords(), p.coords());
    }

    #[test]
    fn schema_errors_name_the_field() {
        let v = json!({"rows": 1, "cols": 2, "data": [["1", "x"]]});
        let err = matrix_from_json::<Rational>(&v).unwrap_err().to_string();
        assert!(err.contains("matrix.data[0][1]"), "{err}");
        let err = parse_json("{\n\"rows\": }").unwrap_err().to_string();
        assert!(err.contains("line 2"), "{err}");
    }

    #[test]
    fn network_round_trip() {
        let v = json!({"boundary": [0, 2], "edges": [[0, 1, "1/2"], [1, 2, "3"]]});
        let net: ResistorNetwork<Rational> = network_from_json(&v).unwrap();
        assert_eq!(net.edges()[0].2, rat(1, 2));
        assert_eq!(network_to_json(&net), v);
    }
}
