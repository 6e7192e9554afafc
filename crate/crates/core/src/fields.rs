//! Exact scalar arithmetic over the rationals, cyclotomic fields and prime
//! fields, with root-of-unity detection.
//!
//! Every scalar is kept in a canonical form: rationals are reduced fractions,
//! cyclotomic elements are residues of degree < phi(N) modulo the N-th
//! cyclotomic polynomial, and prime-field elements are residues in [0, p).
//! Two scalars are equal as field elements exactly when their representations
//! are equal, which is what makes matrix sets decidable downstream.

use std::cmp::Ordering;
use std::collections::HashMap;
use std::fmt;
use std::sync::{Arc, Mutex, OnceLock};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};

use crate::error::{Error, Result};

/// Ground field selector.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum FieldSpec {
    Rationals,
    /// The field Q(zeta_N), realised as Q[x]/Phi_N(x). Cyclotomic(1) behaves
    /// identically to Rationals.
    Cyclotomic(u32),
    /// GF(p) for a prime p.
    PrimeField(u32),
}

impl FieldSpec {
    pub fn validate(self) -> Result<()> {
        match self {
            FieldSpec::Rationals => Ok(()),
            FieldSpec::Cyclotomic(n) if n >= 1 => Ok(()),
            FieldSpec::Cyclotomic(n) => Err(Error::InvalidField(format!("N = {n} must be >= 1"))),
            FieldSpec::PrimeField(p) if is_prime(p) => Ok(()),
            FieldSpec::PrimeField(p) => Err(Error::InvalidField(format!("{p} is not prime"))),
        }
    }

    pub fn characteristic(self) -> u32 {
        match self {
            FieldSpec::PrimeField(p) => p,
            _ => 0,
        }
    }

    /// Number of roots of unity the field contains.
    pub fn unity_count(self) -> u64 {
        match self {
            FieldSpec::Rationals => 2,
            FieldSpec::Cyclotomic(n) => {
                if n == 1 {
                    2
                } else if n % 2 == 0 {
                    n as u64
                } else {
                    2 * n as u64
                }
            }
            FieldSpec::PrimeField(p) => (p - 1).max(1) as u64,
        }
    }

    pub fn parse(s: &str) -> Result<FieldSpec> {
        let spec = if s == "Q" {
            FieldSpec::Rationals
        } else if let Some(n) = s.strip_prefix('C') {
            FieldSpec::Cyclotomic(
                n.parse()
                    .map_err(|_| Error::InvalidField(format!("bad field string {s:?}")))?,
            )
        } else if let Some(p) = s.strip_prefix('F') {
            FieldSpec::PrimeField(
                p.parse()
                    .map_err(|_| Error::InvalidField(format!("bad field string {s:?}")))?,
            )
        } else {
            return Err(Error::InvalidField(format!("bad field string {s:?}")));
        };
        spec.validate()?;
        Ok(spec)
    }
}

impl fmt::Display for FieldSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FieldSpec::Rationals => write!(f, "Q"),
            FieldSpec::Cyclotomic(n) => write!(f, "C{n}"),
            FieldSpec::PrimeField(p) => write!(f, "F{p}"),
        }
    }
}

fn is_prime(p: u32) -> bool {
    if p < 2 {
        return false;
    }
    let mut d = 2u64;
    let p = p as u64;
    while d * d <= p {
        if p % d == 0 {
            return false;
        }
        d += 1;
    }
    true
}

pub fn euler_phi(n: u32) -> u32 {
    let mut n = n;
    let mut result = n;
    let mut d = 2;
    while d * d <= n {
        if n % d == 0 {
            while n % d == 0 {
                n /= d;
            }
            result -= result / d;
        }
        d += 1;
    }
    if n > 1 {
        result -= result / n;
    }
    result
}

// ---------------------------------------------------------------------------
// Dense polynomial helpers over Q (used only for the cyclotomic residue ring).
// ---------------------------------------------------------------------------

type Poly = Vec<BigRational>;

fn poly_trim(p: &mut Poly) {
    while p.last().map_or(false, |c| c.is_zero()) {
        p.pop();
    }
}

fn poly_mul(a: &[BigRational], b: &[BigRational]) -> Poly {
    if a.is_empty() || b.is_empty() {
        return vec![];
    }
    let mut out = vec![BigRational::zero(); a.len() + b.len() - 1];
    for (i, ai) in a.iter().enumerate() {
        if ai.is_zero() {
            continue;
        }
        for (j, bj) in b.iter().enumerate() {
            if !bj.is_zero() {
                out[i + j] += ai * bj;
            }
        }
    }
    poly_trim(&mut out);
    out
}

/// Division with remainder; the divisor must be non-zero.
fn poly_divrem(num: &[BigRational], den: &[BigRational]) -> (Poly, Poly) {
    let mut rem: Poly = num.to_vec();
    poly_trim(&mut rem);
    let mut quo: Poly = vec![];
    let dlead = den.last().expect("non-zero divisor");
    let dd = den.len() - 1;
    while rem.len() >= den.len() && !rem.is_empty() {
        let shift = rem.len() - 1 - dd;
        let coef = rem.last().unwrap() / dlead;
        if quo.len() < shift + 1 {
            quo.resize(shift + 1, BigRational::zero());
        }
        quo[shift] = coef.clone();
        for (k, dk) in den.iter().enumerate() {
            let idx = shift + k;
            let t = &coef * dk;
            rem[idx] -= t;
        }
        poly_trim(&mut rem);
    }
    poly_trim(&mut quo);
    (quo, rem)
}

/// Extended gcd: returns (g, s, t) with s*a + t*b = g, g monic or zero.
fn poly_ext_gcd(a: &[BigRational], b: &[BigRational]) -> (Poly, Poly, Poly) {
    let mut r0: Poly = a.to_vec();
    let mut r1: Poly = b.to_vec();
    poly_trim(&mut r0);
    poly_trim(&mut r1);
    let mut s0: Poly = vec![BigRational::one()];
    let mut s1: Poly = vec![];
    let mut t0: Poly = vec![];
    let mut t1: Poly = vec![BigRational::one()];
    while !r1.is_empty() {
        let (q, r) = poly_divrem(&r0, &r1);
        let new_s = poly_sub(&s0, &poly_mul(&q, &s1));
        let new_t = poly_sub(&t0, &poly_mul(&q, &t1));
        r0 = r1;
        r1 = r;
        s0 = s1;
        s1 = new_s;
        t0 = t1;
        t1 = new_t;
    }
    if let Some(lead) = r0.last().cloned() {
        let inv = BigRational::one() / lead;
        for c in r0.iter_mut().chain(s0.iter_mut()).chain(t0.iter_mut()) {
            *c *= &inv;
        }
    }
    (r0, s0, t0)
}

fn poly_sub(a: &[BigRational], b: &[BigRational]) -> Poly {
    let mut out: Poly = a.to_vec();
    if out.len() < b.len() {
        out.resize(b.len(), BigRational::zero());
    }
    for (i, bi) in b.iter().enumerate() {
        out[i] -= bi;
    }
    poly_trim(&mut out);
    out
}

/// x^n - 1 as a dense polynomial.
fn x_pow_minus_one(n: u32) -> Poly {
    let mut p = vec![BigRational::zero(); n as usize + 1];
    p[0] = -BigRational::one();
    p[n as usize] = BigRational::one();
    p
}

/// The N-th cyclotomic polynomial, by dividing x^N - 1 by all Phi_d, d | N, d < N.
fn cyclotomic_poly(n: u32) -> Poly {
    if n == 1 {
        return vec![-BigRational::one(), BigRational::one()];
    }
    let mut num = x_pow_minus_one(n);
    for d in 1..n {
        if n % d == 0 {
            let (q, r) = poly_divrem(&num, &cyclotomic_poly(d));
            debug_assert!(r.is_empty());
            num = q;
        }
    }
    num
}

struct CycData {
    phi: usize,
    modulus: Poly,
}

fn cyc_data(n: u32) -> Arc<CycData> {
    static CACHE: OnceLock<Mutex<HashMap<u32, Arc<CycData>>>> = OnceLock::new();
    let cache = CACHE.get_or_init(|| Mutex::new(HashMap::new()));
    let mut guard = cache.lock().unwrap();
    guard
        .entry(n)
        .or_insert_with(|| {
            Arc::new(CycData {
                phi: euler_phi(n) as usize,
                modulus: cyclotomic_poly(n),
            })
        })
        .clone()
}

// ---------------------------------------------------------------------------
// Scalar
// ---------------------------------------------------------------------------

/// Canonical representation of one field element.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum ScalarRepr {
    Rational(BigRational),
    /// Coefficient of zeta^j at index j; always exactly phi(N) entries.
    Cyclotomic(Vec<BigRational>),
    Prime(u64),
}

/// An exact element of Q, Q(zeta_N) or GF(p).
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Scalar {
    pub field: FieldSpec,
    pub repr: ScalarRepr,
}

impl Scalar {
    pub fn zero(field: FieldSpec) -> Scalar {
        Scalar::from_integer(field, 0)
    }

    pub fn one(field: FieldSpec) -> Scalar {
        Scalar::from_integer(field, 1)
    }

    pub fn from_integer(field: FieldSpec, v: i64) -> Scalar {
        match field {
            FieldSpec::Rationals => Scalar {
                field,
                repr: ScalarRepr::Rational(BigRational::from_integer(BigInt::from(v))),
            },
            FieldSpec::Cyclotomic(n) => {
                let data = cyc_data(n);
                let mut coeffs = vec![BigRational::zero(); data.phi];
                coeffs[0] = BigRational::from_integer(BigInt::from(v));
                Scalar {
                    field,
                    repr: ScalarRepr::Cyclotomic(coeffs),
                }
            }
            FieldSpec::PrimeField(p) => {
                let p = p as i64;
                Scalar {
                    field,
                    repr: ScalarRepr::Prime(v.rem_euclid(p) as u64),
                }
            }
        }
    }

    pub fn from_rational(field: FieldSpec, num: i64, den: i64) -> Result<Scalar> {
        if den == 0 {
            return Err(Error::DivisionByZero);
        }
        let n = Scalar::from_integer(field, num);
        let d = Scalar::from_integer(field, den);
        n.div(&d)
    }

    pub fn from_big_rational(field: FieldSpec, q: BigRational) -> Result<Scalar> {
        match field {
            FieldSpec::Rationals => Ok(Scalar {
                field,
                repr: ScalarRepr::Rational(q),
            }),
            FieldSpec::Cyclotomic(n) => {
                let data = cyc_data(n);
                let mut coeffs = vec![BigRational::zero(); data.phi];
                coeffs[0] = q;
                Ok(Scalar {
                    field,
                    repr: ScalarRepr::Cyclotomic(coeffs),
                })
            }
            FieldSpec::PrimeField(p) => {
                let p_big = BigInt::from(p);
                let den = q.denom().clone();
                let dres = den.modpow(&BigInt::one(), &p_big);
                if dres.is_zero() {
                    return Err(Error::DivisionByZero);
                }
                let num = Scalar {
                    field,
                    repr: ScalarRepr::Prime(mod_residue(q.numer(), p)),
                };
                let den = Scalar {
                    field,
                    repr: ScalarRepr::Prime(mod_residue(&den, p)),
                };
                num.div(&den)
            }
        }
    }

    /// The class of x in Q[x]/Phi_N(x), i.e. the reference primitive N-th root.
    pub fn zeta(n: u32) -> Scalar {
        let field = FieldSpec::Cyclotomic(n);
        let data = cyc_data(n);
        if data.phi == 1 {
            // N = 1 or 2: zeta is 1 or -1.
            return Scalar::from_integer(field, if n == 2 { -1 } else { 1 });
        }
        let mut coeffs = vec![BigRational::zero(); data.phi];
        coeffs[1] = BigRational::one();
        Scalar {
            field,
            repr: ScalarRepr::Cyclotomic(coeffs),
        }
    }

    pub fn is_zero(&self) -> bool {
        match &self.repr {
            ScalarRepr::Rational(q) => q.is_zero(),
            ScalarRepr::Cyclotomic(c) => c.iter().all(|x| x.is_zero()),
            ScalarRepr::Prime(r) => *r == 0,
        }
    }

    pub fn is_one(&self) -> bool {
        *self == Scalar::one(self.field)
    }

    fn check_field(&self, other: &Scalar) -> Result<()> {
        if self.field == other.field {
            Ok(())
        } else {
            Err(Error::FieldMismatch)
        }
    }

    pub fn add(&self, other: &Scalar) -> Result<Scalar> {
        self.check_field(other)?;
        let repr = match (&self.repr, &other.repr) {
            (ScalarRepr::Rational(a), ScalarRepr::Rational(b)) => ScalarRepr::Rational(a + b),
            (ScalarRepr::Cyclotomic(a), ScalarRepr::Cyclotomic(b)) => {
                ScalarRepr::Cyclotomic(a.iter().zip(b).map(|(x, y)| x + y).collect())
            }
            (ScalarRepr::Prime(a), ScalarRepr::Prime(b)) => {
                let p = self.field.characteristic() as u64;
                ScalarRepr::Prime((a + b) % p)
            }
            _ => return Err(Error::FieldMismatch),
        };
        Ok(Scalar {
            field: self.field,
            repr,
        })
    }

    pub fn neg(&self) -> Scalar {
        let repr = match &self.repr {
            ScalarRepr::Rational(a) => ScalarRepr::Rational(-a),
            ScalarRepr::Cyclotomic(a) => ScalarRepr::Cyclotomic(a.iter().map(|x| -x).collect()),
            ScalarRepr::Prime(a) => {
                let p = self.field.characteristic() as u64;
                ScalarRepr::Prime((p - a) % p)
            }
        };
        Scalar {
            field: self.field,
            repr,
        }
    }

    pub fn sub(&self, other: &Scalar) -> Result<Scalar> {
        self.add(&other.neg())
    }

    pub fn mul(&self, other: &Scalar) -> Result<Scalar> {
        self.check_field(other)?;
        let repr = match (&self.repr, &other.repr) {
            (ScalarRepr::Rational(a), ScalarRepr::Rational(b)) => ScalarRepr::Rational(a * b),
            (ScalarRepr::Cyclotomic(a), ScalarRepr::Cyclotomic(b)) => {
                let n = match self.field {
                    FieldSpec::Cyclotomic(n) => n,
                    _ => unreachable!(),
                };
                let data = cyc_data(n);
                let prod = poly_mul(a, b);
                let (_, rem) = poly_divrem(&prod, &data.modulus);
                let mut coeffs = rem;
                coeffs.resize(data.phi, BigRational::zero());
                ScalarRepr::Cyclotomic(coeffs)
            }
            (ScalarRepr::Prime(a), ScalarRepr::Prime(b)) => {
                let p = self.field.characteristic() as u64;
                ScalarRepr::Prime((a * b) % p)
            }
            _ => return Err(Error::FieldMismatch),
        };
        Ok(Scalar {
            field: self.field,
            repr,
        })
    }

    pub fn inv(&self) -> Result<Scalar> {
        if self.is_zero() {
            return Err(Error::DivisionByZero);
        }
        let repr = match &self.repr {
            ScalarRepr::Rational(a) => ScalarRepr::Rational(BigRational::one() / a),
            ScalarRepr::Cyclotomic(a) => {
                let n = match self.field {
                    FieldSpec::Cyclotomic(n) => n,
                    _ => unreachable!(),
                };
                let data = cyc_data(n);
                let (g, s, _) = poly_ext_gcd(a, &data.modulus);
                if g.len() != 1 {
                    return Err(Error::Inconsistency(
                        "cyclotomic polynomial not coprime to residue".into(),
                    ));
                }
                let (_, rem) = poly_divrem(&s, &data.modulus);
                let mut coeffs = rem;
                coeffs.resize(data.phi, BigRational::zero());
                ScalarRepr::Cyclotomic(coeffs)
            }
            ScalarRepr::Prime(a) => {
                let p = self.field.characteristic() as u64;
                ScalarRepr::Prime(mod_inverse(*a, p))
            }
        };
        Ok(Scalar {
            field: self.field,
            repr,
        })
    }

    pub fn div(&self, other: &Scalar) -> Result<Scalar> {
        self.mul(&other.inv()?)
    }

    pub fn pow(&self, mut e: u64) -> Result<Scalar> {
        let mut base = self.clone();
        let mut acc = Scalar::one(self.field);
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.mul(&base)?;
            }
            e >>= 1;
            if e > 0 {
                base = base.mul(&base)?;
            }
        }
        Ok(acc)
    }

    /// True when the element is rational (lies in the prime subfield for
    /// cyclotomic representations); returns the rational value if so.
    pub fn as_rational(&self) -> Option<BigRational> {
        match &self.repr {
            ScalarRepr::Rational(q) => Some(q.clone()),
            ScalarRepr::Cyclotomic(c) => {
                if c.iter().skip(1).all(|x| x.is_zero()) {
                    Some(c[0].clone())
                } else {
                    None
                }
            }
            ScalarRepr::Prime(_) => None,
        }
    }
}

fn mod_residue(v: &BigInt, p: u32) -> u64 {
    let p_big = BigInt::from(p);
    let r = ((v % &p_big) + &p_big) % &p_big;
    let (_, digits) = r.to_u64_digits();
    digits.first().copied().unwrap_or(0)
}

fn mod_inverse(a: u64, p: u64) -> u64 {
    // Fermat: a^(p-2) mod p.
    let mut e = p - 2;
    let mut base = a % p;
    let mut acc = 1u64;
    while e > 0 {
        if e & 1 == 1 {
            acc = acc * base % p;
        }
        base = base * base % p;
        e >>= 1;
    }
    acc
}

/// Deterministic total order used for canonical forms and tie-breaking.
impl PartialOrd for Scalar {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Scalar {
    fn cmp(&self, other: &Self) -> Ordering {
        match self.field.cmp(&other.field) {
            Ordering::Equal => {}
            ord => return ord,
        }
        match (&self.repr, &other.repr) {
            (ScalarRepr::Rational(a), ScalarRepr::Rational(b)) => a.cmp(b),
            (ScalarRepr::Cyclotomic(a), ScalarRepr::Cyclotomic(b)) => a.cmp(b),
            (ScalarRepr::Prime(a), ScalarRepr::Prime(b)) => a.cmp(b),
            _ => Ordering::Equal,
        }
    }
}

impl fmt::Display for Scalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.repr {
            ScalarRepr::Rational(q) => write!(f, "{q}"),
            ScalarRepr::Prime(r) => write!(f, "{r}"),
            ScalarRepr::Cyclotomic(c) => {
                let mut parts = vec![];
                for (j, coef) in c.iter().enumerate() {
                    if coef.is_zero() {
                        continue;
                    }
                    let body = if j == 0 {
                        format!("{coef}")
                    } else if j == 1 {
                        if coef.is_one() {
                            "z".into()
                        } else {
                            format!("{coef}*z")
                        }
                    } else if coef.is_one() {
                        format!("z^{j}")
                    } else {
                        format!("{coef}*z^{j}")
                    };
                    parts.push(body);
                }
                if parts.is_empty() {
                    write!(f, "0")
                } else {
                    write!(f, "{}", parts.join("+").replace("+-", "-"))
                }
            }
        }
    }
}

// ---------------------------------------------------------------------------
// Field handle
// ---------------------------------------------------------------------------

/// A root of unity together with its certified multiplicative order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct UnityRoot {
    pub order: u64,
    pub witness: Scalar,
}

/// Handle giving access to constants and root-of-unity data for one field.
#[derive(Debug, Clone)]
pub struct Field {
    pub spec: FieldSpec,
}

pub fn make_field(spec: FieldSpec) -> Result<Field> {
    spec.validate()?;
    Ok(Field { spec })
}

impl Field {
    pub fn zero(&self) -> Scalar {
        Scalar::zero(self.spec)
    }

    pub fn one(&self) -> Scalar {
        Scalar::one(self.spec)
    }

    pub fn int(&self, v: i64) -> Scalar {
        Scalar::from_integer(self.spec, v)
    }

    pub fn characteristic(&self) -> u32 {
        self.spec.characteristic()
    }

    pub fn unity_count(&self) -> u64 {
        self.spec.unity_count()
    }

    /// A generator of the (cyclic) group of roots of unity in the field.
    pub fn unity_generator(&self) -> Scalar {
        match self.spec {
            FieldSpec::Rationals => self.int(-1),
            FieldSpec::Cyclotomic(n) => {
                if n == 1 {
                    self.int(-1)
                } else if n % 2 == 0 {
                    Scalar::zeta(n)
                } else {
                    Scalar::zeta(n).neg()
                }
            }
            FieldSpec::PrimeField(p) => {
                if p == 2 {
                    return self.one();
                }
                let m = self.unity_count();
                for g in 2..p {
                    let s = self.int(g as i64);
                    if order_of_unity(&s).ok().flatten() == Some(m) {
                        return s;
                    }
                }
                unreachable!("GF(p) has a primitive root")
            }
        }
    }

    /// All roots of unity in the field, as powers of the generator.
    pub fn roots_of_unity(&self) -> Vec<Scalar> {
        let g = self.unity_generator();
        let m = self.unity_count();
        let mut out = Vec::with_capacity(m as usize);
        let mut cur = self.one();
        for _ in 0..m {
            out.push(cur.clone());
            cur = cur.mul(&g).unwrap();
        }
        out
    }

    /// A primitive cube root of unity, when the field has one.
    pub fn primitive_cube_root(&self) -> Option<Scalar> {
        let m = self.unity_count();
        if m % 3 != 0 {
            return None;
        }
        if let FieldSpec::Cyclotomic(n) = self.spec {
            if n % 3 == 0 {
                // Pin omega to zeta_N^(N/3), i.e. the canonical zeta_3.
                return Some(Scalar::zeta(n).pow((n / 3) as u64).unwrap());
            }
        }
        let g = self.unity_generator();
        g.pow(m / 3).ok()
    }
}

/// Multiplicative order of a non-zero scalar, or None when it is not a root of
/// unity. Orders are found by direct power iteration up to the field's
/// root-of-unity count.
pub fn order_of_unity(z: &Scalar) -> Result<Option<u64>> {
    if z.is_zero() {
        return Err(Error::NotRootOfUnity("zero".into()));
    }
    let m = z.field.unity_count();
    let mut cur = z.clone();
    for k in 1..=m {
        if cur.is_one() {
            return Ok(Some(k));
        }
        cur = cur.mul(z)?;
    }
    Ok(None)
}

/// Order of the cyclic group generated by a set of roots of unity: the lcm of
/// their individual orders.
pub fn unity_subgroup_order<'a, I: IntoIterator<Item = &'a Scalar>>(zs: I) -> Result<u64> {
    let mut acc = 1u64;
    for z in zs {
        match order_of_unity(z)? {
            Some(k) => acc = num_integer::lcm(acc, k),
            None => return Err(Error::NotRootOfUnity(z.to_string())),
        }
    }
    Ok(acc)
}
