//! The JSON input document: étale data, zeta factors and optional extras.
//!
//! Integers are read from JSON numbers or decimal strings and written as
//! numbers when they fit in `i64`. Rational entries are `"num/den"` strings.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive};
use serde_json::{json, Map, Value};
use thiserror::Error;

use crate::exactalg::{IntMatrix, RatMatrix};
use crate::frobmod::{FrobeniusModule, Part, PrimeSupport};
use crate::weilcoh::EtaleData;
use crate::zetaval::{Example, HodgeTable, ZetaInput};
use crate::FpGroup;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum DocError {
    #[error("malformed JSON: {0}")]
    Json(String),
    #[error("{path}: {msg}")]
    Schema { path: String, msg: String },
}

fn schema(path: &str, msg: impl Into<String>) -> DocError {
    DocError::Schema {
        path: path.to_string(),
        msg: msg.into(),
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Document {
    pub q: BigInt,
    pub p: u64,
    pub d: usize,
    pub n: i64,
    pub etale: BTreeMap<usize, FrobeniusModule>,
    pub zeta: Option<Vec<Vec<BigInt>>>,
    pub point_counts: Option<Vec<BigInt>>,
    pub hodge: Option<HodgeTable>,
    pub pairing: Option<IntMatrix>,
    pub motivic_q_dims: Option<BTreeMap<usize, usize>>,
}

impl Document {
    pub fn parse(text: &str) -> Result<Document, DocError> {
        let v: Value = serde_json::from_str(text).map_err(|e| DocError::Json(e.to_string()))?;
        Document::from_value(&v)
    }

    pub fn from_value(v: &Value) -> Result<Document, DocError> {
        let obj = v.as_object().ok_or_else(|| schema("$", "expected an object"))?;
        let field = |k: &str| obj.get(k).filter(|v| !v.is_null());
        let req = |k: &str| field(k).ok_or_else(|| schema(k, "missing"));
        let q = int(req("q")?, "q")?;
        let p = small::<u64>(req("p")?, "p")?;
        let d = small::<usize>(req("d")?, "d")?;
        let n = small::<i64>(req("n")?, "n")?;
        let mut etale = BTreeMap::new();
        if let Some(e) = field("etale") {
            let e = e.as_object().ok_or_else(|| schema("etale", "expected an object"))?;
            for (key, spec) in e {
                let path = format!("etale.{key}");
                let t: usize = key
                    .parse()
                    .map_err(|_| schema(&path, "degree key must be a non-negative integer"))?;
                if t > 2 * d + 1 {
                    return Err(schema(&path, format!("degree outside [0, {}]", 2 * d + 1)));
                }
                etale.insert(t, module(spec, &path)?);
            }
        }
        let zeta = match field("zeta") {
            Some(z) => {
                let f = z.get("factors").ok_or_else(|| schema("zeta.factors", "missing"))?;
                Some(list(f, "zeta.factors", int_list)?)
            }
            None => None,
        };
        let point_counts = field("point_counts")
            .map(|v| int_list(v, "point_counts"))
            .transpose()?;
        let hodge = field("hodge")
            .map(|v| list(v, "hodge", int_list).map(|h| HodgeTable { h }))
            .transpose()?;
        let pairing = field("pairing").map(|v| int_matrix(v, "pairing")).transpose()?;
        let motivic_q_dims = match field("motivic_q_dims") {
            Some(m) => {
                let m = m
                    .as_object()
                    .ok_or_else(|| schema("motivic_q_dims", "expected an object"))?;
                let mut out = BTreeMap::new();
                for (k, v) in m {
                    let path = format!("motivic_q_dims.{k}");
                    let t = k.parse().map_err(|_| schema(&path, "bad degree key"))?;
                    out.insert(t, small::<usize>(v, &path)?);
                }
                Some(out)
            }
            None => None,
        };
        Ok(Document {
            q,
            p,
            d,
            n,
            etale,
            zeta,
            point_counts,
            hodge,
            pairing,
            motivic_q_dims,
        })
    }

    pub fn to_value(&self) -> Value {
        let mut obj = Map::new();
        obj.insert("q".into(), int_value(&self.q));
        obj.insert("p".into(), json!(self.p));
        obj.insert("d".into(), json!(self.d));
        obj.insert("n".into(), json!(self.n));
        let etale: Map<String, Value> = self
            .etale
            .iter()
            .map(|(t, m)| (t.to_string(), module_value(m)))
            .collect();
        obj.insert("etale".into(), Value::Object(etale));
        if let Some(z) = &self.zeta {
            obj.insert("zeta".into(), json!({ "factors": z.iter().map(|f| ints_value(f)).collect::<Vec<_>>() }));
        }
        if let Some(c) = &self.point_counts {
            obj.insert("point_counts".into(), ints_value(c));
        }
        if let Some(h) = &self.hodge {
            obj.insert("hodge".into(), Value::Array(h.h.iter().map(|r| ints_value(r)).collect()));
        }
        if let Some(m) = &self.pairing {
            obj.insert("pairing".into(), int_matrix_value(m));
        }
        if let Some(m) = &self.motivic_q_dims {
            let m: Map<String, Value> = m.iter().map(|(k, v)| (k.to_string(), json!(v))).collect();
            obj.insert("motivic_q_dims".into(), Value::Object(m));
        }
        Value::Object(obj)
    }

    /// Canonical form: pretty-printed with sorted keys and a final newline.
    pub fn to_json_string(&self) -> String {
        let mut s = serde_json::to_string_pretty(&self.to_value()).expect("documents serialize");
        s.push('\n');
        s
    }

    pub fn etale_data(&self) -> EtaleData {
        EtaleData {
            q: self.q.clone(),
            p: self.p,
            d: self.d,
            n: self.n,
            modules: self.etale.clone(),
        }
    }

    pub fn zeta_input(&self) -> Option<ZetaInput> {
        self.zeta.as_ref().map(|factors| ZetaInput {
            q: self.q.clone(),
            factors: factors.clone(),
            point_counts: self.point_counts.clone(),
        })
    }

    pub fn from_example(ex: &Example) -> Document {
        Document {
            q: ex.data.q.clone(),
            p: ex.data.p,
            d: ex.data.d,
            n: ex.data.n,
            etale: ex.data.modules.clone(),
            zeta: Some(ex.zeta.factors.clone()),
            point_counts: ex.zeta.point_counts.clone(),
            hodge: Some(ex.hodge.clone()),
            pairing: None,
            motivic_q_dims: None,
        }
    }
}

fn int(v: &Value, path: &str) -> Result<BigInt, DocError> {
    match v {
        Value::Number(n) => n
            .as_i64()
            .map(BigInt::from)
            .or_else(|| n.as_u64().map(BigInt::from))
            .ok_or_else(|| schema(path, "expected an integer")),
        Value::String(s) => s.trim().parse().map_err(|_| schema(path, "expected an integer string")),
        _ => Err(schema(path, "expected an integer")),
    }
}

fn small<T: TryFrom<BigInt>>(v: &Value, path: &str) -> Result<T, DocError> {
    T::try_from(int(v, path)?).map_err(|_| schema(path, "integer out of range"))
}

fn list<T>(v: &Value, path: &str, f: impl Fn(&Value, &str) -> Result<T, DocError>) -> Result<Vec<T>, DocError> {
    v.as_array()
        .ok_or_else(|| schema(path, "expected an array"))?
        .iter()
        .enumerate()
        .map(|(i, x)| f(x, &format!("{path}[{i}]")))
        .collect()
}

fn int_list(v: &Value, path: &str) -> Result<Vec<BigInt>, DocError> {
    list(v, path, int)
}

fn rational(v: &Value, path: &str) -> Result<BigRational, DocError> {
    let bad = || schema(path, "expected \"num/den\"");
    match v {
        Value::String(s) => match s.split_once('/') {
            Some((a, b)) => {
                let a: BigInt = a.trim().parse().map_err(|_| bad())?;
                let b: BigInt = b.trim().parse().map_err(|_| bad())?;
                if b == BigInt::from(0) {
                    return Err(schema(path, "zero denominator"));
                }
                Ok(BigRational::new(a, b))
            }
            None => Ok(BigRational::from_integer(int(v, path)?)),
        },
        Value::Number(_) => Ok(BigRational::from_integer(int(v, path)?)),
        _ => Err(bad()),
    }
}

fn rows_cols<T>(rows: &[Vec<T>], path: &str) -> Result<usize, DocError> {
    let cols = rows.first().map_or(0, Vec::len);
    if rows.iter().any(|r| r.len() != cols) {
        return Err(schema(path, "matrix is not rectangular"));
    }
    Ok(cols)
}

fn int_matrix(v: &Value, path: &str) -> Result<IntMatrix, DocError> {
    let rows = list(v, path, int_list)?;
    let cols = rows_cols(&rows, path)?;
    IntMatrix::try_from_rows(rows, cols).ok_or_else(|| schema(path, "matrix is not rectangular"))
}

fn rat_matrix(v: &Value, path: &str) -> Result<RatMatrix, DocError> {
    let rows = list(v, path, |r, p| list(r, p, rational))?;
    let cols = rows_cols(&rows, path)?;
    RatMatrix::try_from_rows(rows, cols).ok_or_else(|| schema(path, "matrix is not rectangular"))
}

fn module(v: &Value, path: &str) -> Result<FrobeniusModule, DocError> {
    let parts = v
        .get("parts")
        .ok_or_else(|| schema(&format!("{path}.parts"), "missing"))?;
    let parts = list(parts, &format!("{path}.parts"), part)?;
    Ok(FrobeniusModule::new(parts))
}

fn part(v: &Value, path: &str) -> Result<Part, DocError> {
    let get = |k: &str| v.get(k).ok_or_else(|| schema(&format!("{path}.{k}"), "missing"));
    let sub = |k: &str| format!("{path}.{k}");
    let kind = get("kind")?
        .as_str()
        .ok_or_else(|| schema(&sub("kind"), "expected a string"))?;
    match kind {
        "lattice" => Ok(Part::Lattice {
            phi: int_matrix(get("phi")?, &sub("phi"))?,
        }),
        "finite" => Ok(Part::Finite {
            group: FpGroup::from_relations(int_matrix(get("relations")?, &sub("relations"))?),
            phi: int_matrix(get("phi")?, &sub("phi"))?,
        }),
        "divisible" => {
            let s = get("support")?;
            let support = if let Some(p) = s.get("coprime_to") {
                PrimeSupport::CoprimeTo(small(p, &sub("support.coprime_to"))?)
            } else if let Some(ps) = s.get("primes") {
                PrimeSupport::Primes(list(ps, &sub("support.primes"), small::<u64>)?)
            } else {
                return Err(schema(&sub("support"), "expected coprime_to or primes"));
            };
            Ok(Part::Divisible {
                rank: small(get("rank")?, &sub("rank"))?,
                support,
                phi: int_matrix(get("phi")?, &sub("phi"))?,
            })
        }
        "declared" => Ok(Part::Declared {
            invariants: FpGroup::from_invariants(&int_list(get("invariant_factors")?, &sub("invariant_factors"))?),
            note: v.get("note").and_then(Value::as_str).unwrap_or_default().to_string(),
        }),
        "rational" => Ok(Part::Rational {
            phi: rat_matrix(get("phi")?, &sub("phi"))?,
        }),
        other => Err(schema(&sub("kind"), format!("unknown part kind {other:?}"))),
    }
}

fn int_value(x: &BigInt) -> Value {
    match x.to_i64() {
        Some(v) => json!(v),
        None => Value::String(x.to_string()),
    }
}

fn ints_value(xs: &[BigInt]) -> Value {
    Value::Array(xs.iter().map(int_value).collect())
}

fn int_matrix_value(m: &IntMatrix) -> Value {
    Value::Array(m.to_rows().iter().map(|r| ints_value(r)).collect())
}

fn rational_value(x: &BigRational) -> Value {
    Value::String(format!("{}/{}", x.numer(), x.denom()))
}

fn module_value(m: &FrobeniusModule) -> Value {
    let parts: Vec<Value> = m.parts.iter().map(part_value).collect();
    json!({ "parts": parts })
}

fn part_value(p: &Part) -> Value {
    match p {
        Part::Lattice { phi } => json!({ "kind": "lattice", "phi": int_matrix_value(phi) }),
        Part::Finite { group, phi } => json!({
            "kind": "finite",
            "relations": int_matrix_value(group.relations()),
            "phi": int_matrix_value(phi),
        }),
        Part::Divisible { rank, support, phi } => {
            let support = match support {
                PrimeSupport::CoprimeTo(p) => json!({ "coprime_to": p }),
                PrimeSupport::Primes(ps) => json!({ "primes": ps }),
            };
            json!({ "kind": "divisible", "rank": rank, "support": support, "phi": int_matrix_value(phi) })
        }
        Part::Declared { invariants, note } => {
            let mut f = invariants.invariant_factors().to_vec();
            if f.is_empty() {
                f.push(BigInt::one());
            }
            json!({ "kind": "declared", "invariant_factors": ints_value(&f), "note": note })
        }
        Part::Rational { phi } => json!({
            "kind": "rational",
            "phi": phi.to_rows().iter().map(|r| Value::Array(r.iter().map(rational_value).collect())).collect::<Vec<_>>(),
        }),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::zetaval::{example_elliptic, example_projective_space};

    #[test]
    fn builder_round_trip() {
        let docs = [
            Document::from_example(&example_projective_space(&BigInt::from(3), 2, 1).unwrap()),
            Document::from_example(&example_elliptic(&BigInt::from(5), &BigInt::from(2), None).unwrap()),
        ];
        for doc in docs {
            let s = doc.to_json_string();
            let back = Document::parse(&s).unwrap();
            assert_eq!(back.to_json_string(), s);
            assert_eq!(back.etale_data().modules.len(), doc.etale.len());
        }
    }

    #[test]
    fn all_part_kinds_parse() {
        let text = r#"{
            "q": "4", "p": 2, "d": 1, "n": 0,
            "etale": {
                "0": {"parts": [{"kind": "lattice", "phi": [[1]]}]},
                "1": {"parts": [
                    {"kind": "finite", "relations": [[3]], "phi": [[2]]},
                    {"kind": "divisible", "rank": 1, "support": {"primes": [3, 5]}, "phi": [[4]]},
                    {"kind": "declared", "invariant_factors": [2], "note": "given"},
                    {"kind": "rational", "phi": [["1/2", "0/1"], ["0/1", "2"]]}
                ]}
            },
            "pairing": [[1, 0], [0, 1]],
            "motivic_q_dims": {"0": 1}
        }"#;
        let doc = Document::parse(text).unwrap();
        assert_eq!(doc.q, BigInt::from(4));
        let kinds: Vec<_> = doc.etale[&1].parts.iter().map(Part::kind).collect();
        assert_eq!(kinds, ["finite", "divisible", "declared", "rational"]);
        let again = Document::parse(&doc.to_json_string()).unwrap();
        assert_eq!(again.to_json_string(), doc.to_json_string());
    }

    #[test]
    fn schema_errors() {
        assert!(matches!(Document::parse("{"), Err(DocError::Json(_))));
        assert!(matches!(Document::parse(r#"{"q": 3}"#), Err(DocError::Schema { .. })));
        let ragged = r#"{"q":3,"p":3,"d":1,"n":0,"etale":{"0":{"parts":[{"kind":"lattice","phi":[[1,0],[1]]}]}}}"#;
        assert!(matches!(Document::parse(ragged), Err(DocError::Schema { .. })));
        let far = r#"{"q":3,"p":3,"d":1,"n":0,"etale":{"4":{"parts":[]}}}"#;
        assert!(matches!(Document::parse(far), Err(DocError::Schema { .. })));
        let kind = r#"{"q":3,"p":3,"d":1,"n":0,"etale":{"0":{"parts":[{"kind":"torus"}]}}}"#;
        assert!(matches!(Document::parse(kind), Err(DocError::Schema { .. })));
    }
}
