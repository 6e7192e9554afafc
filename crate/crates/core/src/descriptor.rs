//! Descriptor JSON, scalar/matrix serialisation and the content-addressed
//! closure cache.
//!
//! Wire formats: rationals are "num/den" strings, cyclotomic elements are
//! arrays of such strings (coefficient of zeta^j at index j, length phi(N)),
//! prime-field elements are bare integers. Matrices are row-major arrays of
//! rows. Field strings are "Q", "C<N>" and "F<p>".

use std::path::{Path, PathBuf};
use std::str::FromStr;

use num_bigint::BigInt;
use num_rational::BigRational;
use serde_json::{json, Value};
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};
use crate::fields::{euler_phi, FieldSpec, Scalar, ScalarRepr};
use crate::linalg::{AffineMap, Matrix};
use crate::monoid::{close, close_affine, AffineMonoidHandle, ClosureStatus, MonoidHandle};

// ---------------------------------------------------------------------------
// Scalar and matrix wire form
// ---------------------------------------------------------------------------

fn rational_to_string(q: &BigRational) -> String {
    format!("{}/{}", q.numer(), q.denom())
}

fn rational_from_str(s: &str) -> Result<BigRational> {
    let (num, den) = match s.split_once('/') {
        Some((n, d)) => (n, d),
        None => (s, "1"),
    };
    let num = BigInt::from_str(num.trim())
        .map_err(|_| Error::Descriptor(format!("bad rational {s:?}")))?;
    let den = BigInt::from_str(den.trim())
        .map_err(|_| Error::Descriptor(format!("bad rational {s:?}")))?;
    if den == BigInt::from(0) {
        return Err(Error::Descriptor("zero denominator".into()));
    }
    Ok(BigRational::new(num, den))
}

pub fn scalar_to_json(s: &Scalar) -> Value {
    match &s.repr {
        ScalarRepr::Rational(q) => Value::String(rational_to_string(q)),
        ScalarRepr::Cyclotomic(c) => {
            Value::Array(c.iter().map(|q| Value::String(rational_to_string(q))).collect())
        }
        ScalarRepr::Prime(r) => json!(r),
    }
}

pub fn scalar_from_json(field: FieldSpec, v: &Value) -> Result<Scalar> {
    match (field, v) {
        (FieldSpec::Rationals, Value::String(s)) => {
            Scalar::from_big_rational(field, rational_from_str(s)?)
        }
        (FieldSpec::Cyclotomic(n), Value::Array(items)) => {
            let phi = euler_phi(n) as usize;
            if items.len() != phi {
                return Err(Error::Descriptor(format!(
                    "cyclotomic element needs {phi} coefficients"
                )));
            }
            let mut acc = Scalar::zero(field);
            let zeta = Scalar::zeta(n);
            for (j, item) in items.iter().enumerate() {
                let Value::String(s) = item else {
                    return Err(Error::Descriptor(
                        "cyclotomic coefficient must be a string".into(),
                    ));
                };
                let coef = Scalar::from_big_rational(field, rational_from_str(s)?)?;
                acc = acc.add(&coef.mul(&zeta.pow(j as u64)?)?)?;
            }
            Ok(acc)
        }
        (FieldSpec::PrimeField(_), Value::Number(num)) => {
            let r = num
                .as_i64()
                .ok_or_else(|| Error::Descriptor("bad residue".into()))?;
            Ok(Scalar::from_integer(field, r))
        }
        _ => Err(Error::Descriptor(format!(
            "scalar form does not match field {field}"
        ))),
    }
}

pub fn matrix_to_json(m: &Matrix) -> Value {
    Value::Array(
        (0..m.dim)
            .map(|r| Value::Array(m.row(r).iter().map(scalar_to_json).collect()))
            .collect(),
    )
}

pub fn matrix_from_json(field: FieldSpec, dim: usize, v: &Value) -> Result<Matrix> {
    let Value::Array(rows) = v else {
        return Err(Error::Descriptor("matrix must be an array of rows".into()));
    };
    if rows.len() != dim {
        return Err(Error::Descriptor("matrix row count differs from dim".into()));
    }
    let mut out = vec![];
    for row in rows {
        let Value::Array(items) = row else {
            return Err(Error::Descriptor("matrix row must be an array".into()));
        };
        if items.len() != dim {
            return Err(Error::Descriptor(
                "matrix column count differs from dim".into(),
            ));
        }
        out.push(
            items
                .iter()
                .map(|x| scalar_from_json(field, x))
                .collect::<Result<Vec<_>>>()?,
        );
    }
    Matrix::from_rows(field, out)
}

pub fn affine_to_json(m: &AffineMap) -> Value {
    json!({
        "A": matrix_to_json(&m.linear),
        "b": Value::Array(m.translation.iter().map(scalar_to_json).collect()),
    })
}

pub fn affine_from_json(field: FieldSpec, dim: usize, v: &Value) -> Result<AffineMap> {
    let a = v
        .get("A")
        .ok_or_else(|| Error::Descriptor("affine map needs \"A\"".into()))?;
    let b = v
        .get("b")
        .and_then(|b| b.as_array())
        .ok_or_else(|| Error::Descriptor("affine map needs \"b\"".into()))?;
    let linear = matrix_from_json(field, dim, a)?;
    let translation = b
        .iter()
        .map(|x| scalar_from_json(field, x))
        .collect::<Result<Vec<_>>>()?;
    AffineMap::new(linear, translation)
}

// ---------------------------------------------------------------------------
// Descriptor
// ---------------------------------------------------------------------------

/// Generator-level description of a monoid, the unit of file I/O.
#[derive(Debug, Clone)]
pub enum Descriptor {
    Linear {
        field: FieldSpec,
        dim: usize,
        generators: Vec<Matrix>,
    },
    Affine {
        field: FieldSpec,
        dim: usize,
        generators: Vec<AffineMap>,
    },
}

impl Descriptor {
    pub fn field(&self) -> FieldSpec {
        match self {
            Descriptor::Linear { field, .. } | Descriptor::Affine { field, .. } => *field,
        }
    }

    pub fn dim(&self) -> usize {
        match self {
            Descriptor::Linear { dim, .. } | Descriptor::Affine { dim, .. } => *dim,
        }
    }

    pub fn generator_count(&self) -> usize {
        match self {
            Descriptor::Linear { generators, .. } => generators.len(),
            Descriptor::Affine { generators, .. } => generators.len(),
        }
    }

    pub fn to_json(&self) -> Value {
        match self {
            Descriptor::Linear {
                field,
                dim,
                generators,
            } => json!({
                "field": field.to_string(),
                "dim": dim,
                "kind": "linear",
                "generators": generators.iter().map(matrix_to_json).collect::<Vec<_>>(),
            }),
            Descriptor::Affine {
                field,
                dim,
                generators,
            } => json!({
                "field": field.to_string(),
                "dim": dim,
                "kind": "affine",
                "generators": generators.iter().map(affine_to_json).collect::<Vec<_>>(),
            }),
        }
    }

    pub fn from_json(v: &Value) -> Result<Descriptor> {
        let field = FieldSpec::parse(
            v.get("field")
                .and_then(|f| f.as_str())
                .ok_or_else(|| Error::Descriptor("missing \"field\"".into()))?,
        )?;
        let dim = v
            .get("dim")
            .and_then(|d| d.as_u64())
            .ok_or_else(|| Error::Descriptor("missing \"dim\"".into()))? as usize;
        let kind = v
            .get("kind")
            .and_then(|k| k.as_str())
            .ok_or_else(|| Error::Descriptor("missing \"kind\"".into()))?;
        let gens = v
            .get("generators")
            .and_then(|g| g.as_array())
            .ok_or_else(|| Error::Descriptor("missing \"generators\"".into()))?;
        match kind {
            "linear" => Ok(Descriptor::Linear {
                field,
                dim,
                generators: gens
                    .iter()
                    .map(|g| matrix_from_json(field, dim, g))
                    .collect::<Result<_>>()?,
            }),
            "affine" => Ok(Descriptor::Affine {
                field,
                dim,
                generators: gens
                    .iter()
                    .map(|g| affine_from_json(field, dim, g))
                    .collect::<Result<_>>()?,
            }),
            other => Err(Error::Descriptor(format!("unknown kind {other:?}"))),
        }
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        let text = serde_json::to_string_pretty(&self.to_json())
            .map_err(|e| Error::Descriptor(e.to_string()))?;
        std::fs::write(path, text)?;
        Ok(())
    }

    pub fn load(path: &Path) -> Result<Descriptor> {
        let text = std::fs::read_to_string(path)?;
        let v: Value =
            serde_json::from_str(&text).map_err(|e| Error::Descriptor(e.to_string()))?;
        Descriptor::from_json(&v)
    }

    /// Stable content digest of the canonical JSON form.
    pub fn digest(&self) -> String {
        let text = serde_json::to_string(&self.to_json()).unwrap();
        hex_digest(text.as_bytes())
    }
}

pub fn hex_digest(bytes: &[u8]) -> String {
    let mut hasher = Sha256::new();
    hasher.update(bytes);
    hasher
        .finalize()
        .iter()
        .map(|b| format!("{b:02x}"))
        .collect()
}

// ---------------------------------------------------------------------------
// Closure cache
// ---------------------------------------------------------------------------

pub const CACHE_ENV: &str = "PROJMON_CACHE";
pub const CACHE_DEFAULT: &str = ".projmon-cache";

pub struct ClosureCache {
    pub dir: PathBuf,
}

impl ClosureCache {
    pub fn from_env() -> ClosureCache {
        let dir = std::env::var(CACHE_ENV).unwrap_or_else(|_| CACHE_DEFAULT.into());
        ClosureCache { dir: dir.into() }
    }

    pub fn at(dir: &Path) -> ClosureCache {
        ClosureCache {
            dir: dir.to_path_buf(),
        }
    }

    fn entry_path(&self, digest: &str) -> PathBuf {
        self.dir.join(format!("{digest}.json"))
    }

    /// Load a finite element list for the descriptor. Entries whose embedded
    /// element digest no longer matches are discarded.
    pub fn load(&self, descriptor: &Descriptor) -> Option<Vec<Value>> {
        let path = self.entry_path(&descriptor.digest());
        let text = std::fs::read_to_string(path).ok()?;
        let v: Value = serde_json::from_str(&text).ok()?;
        let elements = v.get("elements")?.as_array()?.clone();
        let stored = v.get("elements_digest")?.as_str()?;
        let actual = hex_digest(serde_json::to_string(&elements).ok()?.as_bytes());
        if stored != actual {
            return None;
        }
        Some(elements)
    }

    /// Store a finite element list under the descriptor digest, writing a
    /// temporary file first and renaming it into place.
    pub fn store(&self, descriptor: &Descriptor, elements: &[Value]) -> Result<()> {
        std::fs::create_dir_all(&self.dir)?;
        let digest = descriptor.digest();
        let elements_vec: Vec<Value> = elements.to_vec();
        let payload = json!({
            "descriptor": descriptor.to_json(),
            "elements": elements_vec,
            "elements_digest": hex_digest(
                serde_json::to_string(&elements_vec).unwrap().as_bytes()
            ),
        });
        let final_path = self.entry_path(&digest);
        let tmp_path = self.dir.join(format!(".{digest}.tmp"));
        std::fs::write(&tmp_path, serde_json::to_string(&payload).unwrap())?;
        std::fs::rename(&tmp_path, &final_path)?;
        Ok(())
    }
}

/// A closed monoid of either kind.
pub enum ClosedMonoid {
    Linear(MonoidHandle),
    Affine(AffineMonoidHandle),
}

impl ClosedMonoid {
    pub fn size(&self) -> usize {
        match self {
            ClosedMonoid::Linear(m) => m.size(),
            ClosedMonoid::Affine(m) => m.size(),
        }
    }

    pub fn is_finite(&self) -> bool {
        match self {
            ClosedMonoid::Linear(m) => m.status.is_finite(),
            ClosedMonoid::Affine(m) => m.status.is_finite(),
        }
    }

    pub fn status_line(&self) -> String {
        match self {
            ClosedMonoid::Linear(m) => status_line(&m.status),
            ClosedMonoid::Affine(m) => status_line(&m.status),
        }
    }
}

/// Close the monoid behind a descriptor, consulting the cache when given.
/// Cached finite closures larger than the cap are recomputed, so cache hits
/// and misses produce identical outcomes.
pub fn close_descriptor(
    descriptor: &Descriptor,
    cap: usize,
    cache: Option<&ClosureCache>,
) -> Result<ClosedMonoid> {
    if let Some(cache) = cache {
        if let Some(elements) = cache.load(descriptor) {
            if elements.len() <= cap {
                match descriptor {
                    Descriptor::Linear {
                        field,
                        dim,
                        generators,
                    } => {
                        let parsed: Result<Vec<Matrix>> = elements
                            .iter()
                            .map(|e| matrix_from_json(*field, *dim, e))
                            .collect();
                        if let Ok(parsed) = parsed {
                            let m = crate::monoid::GenericMonoid::from_closed_elements(
                                *field,
                                *dim,
                                generators.clone(),
                                parsed,
                            );
                            return Ok(ClosedMonoid::Linear(m));
                        }
                    }
                    Descriptor::Affine {
                        field,
                        dim,
                        generators,
                    } => {
                        let parsed: Result<Vec<AffineMap>> = elements
                            .iter()
                            .map(|e| affine_from_json(*field, *dim, e))
                            .collect();
                        if let Ok(parsed) = parsed {
                            let m = crate::monoid::GenericMonoid::from_closed_elements(
                                *field,
                                *dim,
                                generators.clone(),
                                parsed,
                            );
                            return Ok(ClosedMonoid::Affine(m));
                        }
                    }
                }
            }
        }
    }
    let closed = match descriptor {
        Descriptor::Linear { generators, .. } => ClosedMonoid::Linear(close(generators, cap)?),
        Descriptor::Affine { generators, .. } => {
            ClosedMonoid::Affine(close_affine(generators, cap)?)
        }
    };
    if let Some(cache) = cache {
        match &closed {
            ClosedMonoid::Linear(m) if m.status.is_finite() => {
                let elements: Vec<Value> = m.elements().iter().map(matrix_to_json).collect();
                cache.store(descriptor, &elements)?;
            }
            ClosedMonoid::Affine(m) if m.status.is_finite() => {
                let elements: Vec<Value> = m.elements().iter().map(affine_to_json).collect();
                cache.store(descriptor, &elements)?;
            }
            _ => {}
        }
    }
    Ok(closed)
}

/// Render a closure status for user output.
pub fn status_line<T>(status: &ClosureStatus<T>) -> String {
    match status {
        ClosureStatus::Unclosed => "unclosed".into(),
        ClosureStatus::Finite(n) => format!("finite({n})"),
        ClosureStatus::CapExceeded(Some(_)) => "cap-exceeded (infiniteness witness found)".into(),
        ClosureStatus::CapExceeded(None) => "cap-exceeded (no witness found)".into(),
    }
}

// ---------------------------------------------------------------------------
// CLI scalar expressions
// ---------------------------------------------------------------------------

/// Parse a scalar expression: a rational like "3/2" or "-1", the symbol "z"
/// (the reference root of unity zeta_N of a cyclotomic field) with an
/// optional power "z^4", or a product "3/2*z^2". Prime fields take integers.
pub fn parse_scalar(field: FieldSpec, input: &str) -> Result<Scalar> {
    let s = input.trim();
    let (sign, s) = match s.strip_prefix('-') {
        Some(rest) => (true, rest.trim()),
        None => (false, s),
    };
    let (coef_str, unity_str) = match s.split_once('*') {
        Some((a, b)) => (a.trim(), Some(b.trim())),
        None => {
            if s.starts_with('z') {
                ("1", Some(s))
            } else {
                (s, None)
            }
        }
    };
    let coef = rational_from_str(coef_str)?;
    let mut out = Scalar::from_big_rational(field, coef)?;
    if let Some(u) = unity_str {
        let FieldSpec::Cyclotomic(n) = field else {
            return Err(Error::Descriptor(
                "unity symbol z needs a cyclotomic field".into(),
            ));
        };
        let power: u64 = match u.strip_prefix('z') {
            Some("") => 1,
            Some(rest) => rest
                .strip_prefix('^')
                .and_then(|p| p.parse().ok())
                .ok_or_else(|| Error::Descriptor(format!("bad unity power {u:?}")))?,
            None => return Err(Error::Descriptor(format!("bad scalar {input:?}"))),
        };
        out = out.mul(&Scalar::zeta(n).pow(power)?)?;
    }
    if sign {
        out = out.neg();
    }
    Ok(out)
}

pub fn parse_scalar_list(field: FieldSpec, input: &str) -> Result<Vec<Scalar>> {
    input
        .split(',')
        .filter(|s| !s.trim().is_empty())
        .map(|s| parse_scalar(field, s))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    const Q: FieldSpec = FieldSpec::Rationals;

    #[test]
    fn scalar_round_trip() {
        let samples = vec![
            Scalar::from_rational(Q, -3, 7).unwrap(),
            Scalar::zero(Q),
            Scalar::from_integer(Q, 42),
        ];
        for s in samples {
            let v = scalar_to_json(&s);
            assert_eq!(scalar_from_json(Q, &v).unwrap(), s);
        }
        let c3 = FieldSpec::Cyclotomic(3);
        let z = Scalar::zeta(3);
        let mixed = z
            .mul(&Scalar::from_rational(c3, 5, 2).unwrap())
            .unwrap()
            .add(&Scalar::one(c3))
            .unwrap();
        let v = scalar_to_json(&mixed);
        assert_eq!(scalar_from_json(c3, &v).unwrap(), mixed);

        let f5 = FieldSpec::PrimeField(5);
        let s = Scalar::from_integer(f5, 3);
        assert_eq!(scalar_from_json(f5, &scalar_to_json(&s)).unwrap(), s);
    }

    #[test]
    fn descriptor_round_trip_preserves_closure() {
        let gens = vec![
            Matrix::from_int_rows(Q, &[&[1, -1], &[0, 0]]),
            Matrix::from_int_rows(Q, &[&[0, 0], &[-1, 1]]),
        ];
        let d = Descriptor::Linear {
            field: Q,
            dim: 2,
            generators: gens.clone(),
        };
        let v = d.to_json();
        let d2 = Descriptor::from_json(&v).unwrap();
        let m1 = close(&gens, 1000).unwrap();
        let ClosedMonoid::Linear(m2) = close_descriptor(&d2, 1000, None).unwrap() else {
            panic!("expected linear")
        };
        assert_eq!(m1.size(), m2.size());
        for e in m1.elements() {
            assert!(m2.contains(e));
        }
    }

    #[test]
    fn cache_round_trip_and_integrity() {
        let tmp = tempfile::tempdir().unwrap();
        let cache = ClosureCache::at(tmp.path());
        let gens = vec![
            Matrix::from_int_rows(Q, &[&[1, -1], &[0, 0]]),
            Matrix::from_int_rows(Q, &[&[0, 0], &[-1, 1]]),
        ];
        let d = Descriptor::Linear {
            field: Q,
            dim: 2,
            generators: gens,
        };
        let cold = close_descriptor(&d, 1000, Some(&cache)).unwrap();
        let warm = close_descriptor(&d, 1000, Some(&cache)).unwrap();
        assert_eq!(cold.size(), warm.size());
        // Corrupt the entry: the digest check must force a recompute.
        let path = cache.entry_path(&d.digest());
        let mut v: Value =
            serde_json::from_str(&std::fs::read_to_string(&path).unwrap()).unwrap();
        v["elements"][0] = v["elements"][1].clone();
        std::fs::write(&path, serde_json::to_string(&v).unwrap()).unwrap();
        assert!(cache.load(&d).is_none());
        let again = close_descriptor(&d, 1000, Some(&cache)).unwrap();
        assert_eq!(again.size(), cold.size());
    }

    #[test]
    fn scalar_expressions() {
        assert_eq!(
            parse_scalar(Q, "-3/4").unwrap(),
            Scalar::from_rational(Q, -3, 4).unwrap()
        );
        let c4 = FieldSpec::Cyclotomic(4);
        assert_eq!(parse_scalar(c4, "z").unwrap(), Scalar::zeta(4));
        assert_eq!(parse_scalar(c4, "-z^2").unwrap(), Scalar::one(c4));
        assert_eq!(
            parse_scalar(c4, "3*z").unwrap(),
            Scalar::zeta(4).mul(&Scalar::from_integer(c4, 3)).unwrap()
        );
        assert!(parse_scalar(Q, "z").is_err());
        let list = parse_scalar_list(Q, "1,-1").unwrap();
        assert_eq!(list.len(), 2);
    }
}
