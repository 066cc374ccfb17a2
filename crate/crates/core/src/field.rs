//! Finite fields GF(p^k) with a designated involution.
//!
//! Elements are stored as compact codes `c_0 + c_1 p + ... + c_{k-1} p^{k-1}` of
//! their canonical little-endian coefficient vectors, and every operation is a
//! table lookup into a context built once per field. Enumeration follows the
//! code order.

use std::fmt;

use thiserror::Error;

/// Default upper bound on `|K|`.
pub const DEFAULT_FIELD_CAP: usize = 512;

/// Hard ceiling on `|K|`; the lookup tables are quadratic in the field size.
pub const MAX_FIELD_CAP: usize = 4096;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum FieldError {
    #[error("{0} is not prime")]
    NotPrime(u32),
    #[error("modulus is reducible over GF({p}): divisible by {factor}")]
    ReducibleModulus { p: u32, factor: String },
    #[error("frobenius involution needs even extension degree, got k={0}")]
    BadInvolution(u32),
    #[error("bad modulus: {0}")]
    BadModulus(String),
    #[error("field of size {size} exceeds the configured cap {cap}")]
    FieldTooLarge { size: usize, cap: usize },
    #[error("bad element literal `{0}`")]
    BadLiteral(String),
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ScalarError {
    #[error("lambda is not unitary: bar(lambda)*lambda = {0}")]
    LambdaNotUnitary(String),
    #[error("mu != bar(mu)*lambda (mu = {mu}, bar(mu)*lambda = {rhs})")]
    MuConditionFailed { mu: String, rhs: String },
    #[error("bar(bar(x)) != lambda*x*bar(lambda) at x = {0}")]
    InvolutionSquareFailed(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum InvolutionKind {
    Identity,
    /// `x -> x^(p^(k/2))`, the unique field automorphism of order two.
    FrobeniusHalf,
}

/// A field element; meaningful only together with the [`FieldCtx`] that produced it.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct Elem(pub(crate) u16);

impl Elem {
    pub const ZERO: Elem = Elem(0);
    pub const ONE: Elem = Elem(1);

    pub fn code(self) -> usize {
        self.0 as usize
    }

    pub fn is_zero(self) -> bool {
        self.0 == 0
    }
}

/// Immutable arithmetic context for GF(p^k).
#[derive(Clone)]
pub struct FieldCtx {
    p: u32,
    k: u32,
    q: usize,
    modulus: Vec<u32>,
    involution: InvolutionKind,
    add: Vec<u16>,
    mul: Vec<u16>,
    neg: Vec<u16>,
    inv: Vec<u16>,
    bar: Vec<u16>,
}

impl fmt::Debug for FieldCtx {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("FieldCtx")
            .field("p", &self.p)
            .field("k", &self.k)
            .field("modulus", &self.modulus)
            .field("involution", &self.involution)
            .finish()
    }
}

impl PartialEq for FieldCtx {
    fn eq(&self, other: &Self) -> bool {
        self.p == other.p && self.k == other.k && self.modulus == other.modulus && self.involution == other.involution
    }
}

impl Eq for FieldCtx {}

pub fn is_prime(p: u32) -> bool {
    if p < 2 {
        return false;
    }
    let mut d = 2u32;
    while d * d <= p {
        if p.is_multiple_of(d) {
            return false;
        }
        d += 1;
    }
    true
}

// Polynomial helpers over GF(p), little-endian, used only during construction.

fn poly_trim(mut a: Vec<u32>) -> Vec<u32> {
    while a.len() > 1 && *a.last().unwrap() == 0 {
        a.pop();
    }
    a
}

fn poly_rem(a: &[u32], b: &[u32], p: u32) -> Vec<u32> {
    // b is monic
    let mut r = a.to_vec();
    let db = b.len() - 1;
    while r.len() > db {
        let lead = *r.last().unwrap();
        let shift = r.len() - 1 - db;
        if lead != 0 {
            for (i, &c) in b.iter().enumerate() {
                let idx = shift + i;
                r[idx] = (r[idx] + p - (lead * c) % p) % p;
            }
        }
        r.pop();
    }
    if r.is_empty() {
        r.push(0);
    }
    poly_trim(r)
}

fn format_poly(c: &[u32]) -> String {
    let mut terms = Vec::new();
    for (i, &ci) in c.iter().enumerate().rev() {
        if ci == 0 {
            continue;
        }
        let coef = if ci == 1 && i > 0 {
            String::new()
        } else {
            ci.to_string()
        };
        terms.push(match i {
            0 => coef,
            1 => format!("{coef}t"),
            _ => format!("{coef}t^{i}"),
        });
    }
    if terms.is_empty() {
        "0".into()
    } else {
        terms.join("+")
    }
}

/// Returns a monic factor of degree `1..=deg/2` if `modulus` is reducible.
fn find_factor(modulus: &[u32], p: u32) -> Option<Vec<u32>> {
    let deg = modulus.len() - 1;
    for d in 1..=deg / 2 {
        let count = (p as u64).pow(d as u32);
        for code in 0..count {
            let mut cand = Vec::with_capacity(d + 1);
            let mut c = code;
            for _ in 0..d {
                cand.push((c % p as u64) as u32);
                c /= p as u64;
            }
            cand.push(1);
            let r = poly_rem(modulus, &cand, p);
            if r.len() == 1 && r[0] == 0 {
                return Some(cand);
            }
        }
    }
    None
}

impl FieldCtx {
    /// Builds GF(p^k) from a monic irreducible `modulus` (little-endian, length k+1).
    pub fn new(p: u32, k: u32, modulus: &[u32], involution: InvolutionKind) -> Result<Self, FieldError> {
        Self::with_cap(p, k, modulus, involution, DEFAULT_FIELD_CAP)
    }

    pub fn with_cap(
        p: u32,
        k: u32,
        modulus: &[u32],
        involution: InvolutionKind,
        cap: usize,
    ) -> Result<Self, FieldError> {
        if !is_prime(p) {
            return Err(FieldError::NotPrime(p));
        }
        if k == 0 {
            return Err(FieldError::BadModulus("extension degree must be >= 1".into()));
        }
        if modulus.len() != k as usize + 1 {
            return Err(FieldError::BadModulus(format!(
                "expected {} coefficients for degree {k}, got {}",
                k + 1,
                modulus.len()
            )));
        }
        if let Some(&c) = modulus.iter().find(|&&c| c >= p) {
            return Err(FieldError::BadModulus(format!("coefficient {c} not reduced mod {p}")));
        }
        if modulus[k as usize] != 1 {
            return Err(FieldError::BadModulus("modulus must be monic".into()));
        }
        if involution == InvolutionKind::FrobeniusHalf && !k.is_multiple_of(2) {
            return Err(FieldError::BadInvolution(k));
        }
        let cap = cap.min(MAX_FIELD_CAP);
        let q = (p as u64)
            .checked_pow(k)
            .filter(|&q| q <= cap as u64)
            .ok_or(FieldError::FieldTooLarge {
                size: (p as u64).saturating_pow(k).min(usize::MAX as u64) as usize,
                cap,
            })? as usize;
        if let Some(f) = find_factor(modulus, p) {
            return Err(FieldError::ReducibleModulus {
                p,
                factor: format_poly(&f),
            });
        }

        let ku = k as usize;
        let digits: Vec<Vec<u32>> = (0..q)
            .map(|mut c| {
                (0..ku)
                    .map(|_| {
                        let d = (c % p as usize) as u32;
                        c /= p as usize;
                        d
                    })
                    .collect()
            })
            .collect();
        let encode = |d: &[u32]| -> u16 { d.iter().rev().fold(0usize, |acc, &c| acc * p as usize + c as usize) as u16 };

        let mut add = vec![0u16; q * q];
        let mut mul = vec![0u16; q * q];
        let mut tmp = vec![0u32; ku];
        let mut prod = vec![0u32; 2 * ku];
        for a in 0..q {
            for b in 0..q {
                for i in 0..ku {
                    tmp[i] = (digits[a][i] + digits[b][i]) % p;
                }
                add[a * q + b] = encode(&tmp);

                prod.iter_mut().for_each(|c| *c = 0);
                for i in 0..ku {
                    if digits[a][i] == 0 {
                        continue;
                    }
                    for j in 0..ku {
                        prod[i + j] = (prod[i + j] + digits[a][i] * digits[b][j]) % p;
                    }
                }
                let r = poly_rem(&prod, modulus, p);
                tmp.iter_mut().for_each(|c| *c = 0);
                tmp[..r.len().min(ku)].copy_from_slice(&r[..r.len().min(ku)]);
                mul[a * q + b] = encode(&tmp);
            }
        }
        let neg: Vec<u16> = (0..q)
            .map(|a| (0..q).find(|&b| add[a * q + b] == 0).unwrap() as u16)
            .collect();
        let mut inv = vec![0u16; q];
        for a in 1..q {
            inv[a] = (1..q).find(|&b| mul[a * q + b] == 1).unwrap() as u16;
        }
        let bar = match involution {
            InvolutionKind::Identity => (0..q as u16).collect(),
            InvolutionKind::FrobeniusHalf => {
                let e = (p as u64).pow(k / 2);
                (0..q)
                    .map(|a| {
                        let mut r = 1usize;
                        for _ in 0..e {
                            r = mul[r * q + a] as usize;
                        }
                        if a == 0 {
                            0
                        } else {
                            r as u16
                        }
                    })
                    .collect()
            }
        };

        Ok(FieldCtx {
            p,
            k,
            q,
            modulus: modulus.to_vec(),
            involution,
            add,
            mul,
            neg,
            inv,
            bar,
        })
    }

    /// The prime field GF(p) with identity involution.
    pub fn prime(p: u32) -> Result<Self, FieldError> {
        Self::new(p, 1, &[0, 1], InvolutionKind::Identity)
    }

    pub fn characteristic(&self) -> u32 {
        self.p
    }

    pub fn degree(&self) -> u32 {
        self.k
    }

    pub fn size(&self) -> usize {
        self.q
    }

    pub fn modulus(&self) -> &[u32] {
        &self.modulus
    }

    pub fn involution(&self) -> InvolutionKind {
        self.involution
    }

    pub fn zero(&self) -> Elem {
        Elem::ZERO
    }

    pub fn one(&self) -> Elem {
        Elem::ONE
    }

    #[inline]
    pub fn add(&self, a: Elem, b: Elem) -> Elem {
        Elem(self.add[a.code() * self.q + b.code()])
    }

    #[inline]
    pub fn neg(&self, a: Elem) -> Elem {
        Elem(self.neg[a.code()])
    }

    #[inline]
    pub fn sub(&self, a: Elem, b: Elem) -> Elem {
        self.add(a, self.neg(b))
    }

    #[inline]
    pub fn mul(&self, a: Elem, b: Elem) -> Elem {
        Elem(self.mul[a.code() * self.q + b.code()])
    }

    /// Multiplicative inverse; `None` for zero.
    #[inline]
    pub fn inv(&self, a: Elem) -> Option<Elem> {
        (!a.is_zero()).then(|| Elem(self.inv[a.code()]))
    }

    /// `a / b`, panicking on division by zero.
    pub fn div(&self, a: Elem, b: Elem) -> Elem {
        self.mul(a, self.inv(b).expect("division by zero in GF(p^k)"))
    }

    /// The involution `x -> bar(x)`.
    #[inline]
    pub fn involute(&self, a: Elem) -> Elem {
        Elem(self.bar[a.code()])
    }

    pub fn pow(&self, a: Elem, e: i64) -> Elem {
        let mut base = if e < 0 {
            self.inv(a).expect("negative power of zero")
        } else {
            a
        };
        let mut e = e.unsigned_abs();
        let mut acc = Elem::ONE;
        while e > 0 {
            if e & 1 == 1 {
                acc = self.mul(acc, base);
            }
            base = self.mul(base, base);
            e >>= 1;
        }
        acc
    }

    /// Image of the integer `n` under `Z -> GF(p)`.
    pub fn from_int(&self, n: i64) -> Elem {
        let r = n.rem_euclid(self.p as i64) as u16;
        Elem(r)
    }

    /// All `p^k` elements in code order.
    pub fn elements(&self) -> impl Iterator<Item = Elem> + '_ {
        (0..self.q as u16).map(Elem)
    }

    /// Nonzero elements in code order.
    pub fn units(&self) -> impl Iterator<Item = Elem> + '_ {
        (1..self.q as u16).map(Elem)
    }

    /// Element from its code; `None` when out of range.
    pub fn from_code(&self, code: usize) -> Option<Elem> {
        (code < self.q).then_some(Elem(code as u16))
    }

    pub fn coeffs(&self, a: Elem) -> Vec<u32> {
        let mut c = a.code();
        (0..self.k)
            .map(|_| {
                let d = (c % self.p as usize) as u32;
                c /= self.p as usize;
                d
            })
            .collect()
    }

    pub fn from_coeffs(&self, coeffs: &[u32]) -> Result<Elem, FieldError> {
        if coeffs.len() != self.k as usize || coeffs.iter().any(|&c| c >= self.p) {
            return Err(FieldError::BadLiteral(
                coeffs.iter().map(|c| c.to_string()).collect::<Vec<_>>().join(","),
            ));
        }
        let code = coeffs
            .iter()
            .rev()
            .fold(0usize, |acc, &c| acc * self.p as usize + c as usize);
        Ok(Elem(code as u16))
    }

    /// Parses a literal such as `1,1,0` (little-endian base-p digits, exactly k of them).
    pub fn parse_elem(&self, s: &str) -> Result<Elem, FieldError> {
        let digits: Result<Vec<u32>, _> = s.split(',').map(|d| d.trim().parse::<u32>()).collect();
        let digits = digits.map_err(|_| FieldError::BadLiteral(s.to_string()))?;
        self.from_coeffs(&digits)
            .map_err(|_| FieldError::BadLiteral(s.to_string()))
    }

    /// Parses exactly `count` consecutive element literals from a comma-separated digit list.
    pub fn parse_elems(&self, s: &str, count: usize) -> Result<Vec<Elem>, FieldError> {
        let tokens: Vec<&str> = s.split(',').map(str::trim).collect();
        let k = self.k as usize;
        if tokens.len() != count * k {
            return Err(FieldError::BadLiteral(s.to_string()));
        }
        tokens
            .chunks(k)
            .map(|chunk| self.parse_elem(&chunk.join(",")))
            .collect()
    }

    pub fn format_elem(&self, a: Elem) -> String {
        self.coeffs(a)
            .iter()
            .map(|c| c.to_string())
            .collect::<Vec<_>>()
            .join(",")
    }
}

/// Validated symmetry `lambda` and element `mu` of a Hermitian field.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct HermitianScalars {
    pub lambda: Elem,
    pub mu: Elem,
}

/// Checks `bar(lambda) lambda = 1`, `mu = bar(mu) lambda` and
/// `bar(bar(x)) = lambda x bar(lambda)` for every `x` in the field.
pub fn validate_scalars(field: &FieldCtx, lambda: Elem, mu: Elem) -> Result<HermitianScalars, ScalarError> {
    let f = field;
    let norm = f.mul(f.involute(lambda), lambda);
    if norm != Elem::ONE {
        return Err(ScalarError::LambdaNotUnitary(f.format_elem(norm)));
    }
    let rhs = f.mul(f.involute(mu), lambda);
    if rhs != mu {
        return Err(ScalarError::MuConditionFailed {
            mu: f.format_elem(mu),
            rhs: f.format_elem(rhs),
        });
    }
    let lam_bar = f.involute(lambda);
    for x in f.elements() {
        let lhs = f.involute(f.involute(x));
        let rhs = f.mul(f.mul(lambda, x), lam_bar);
        if lhs != rhs {
            return Err(ScalarError::InvolutionSquareFailed(f.format_elem(x)));
        }
    }
    Ok(HermitianScalars { lambda, mu })
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Independent schoolbook arithmetic on coefficient vectors.
    fn oracle_mul(a: &[u32], b: &[u32], m: &[u32], p: u32) -> Vec<u32> {
        let k = m.len() - 1;
        let mut prod = vec![0u32; 2 * k];
        for i in 0..k {
            for j in 0..k {
                prod[i + j] = (prod[i + j] + a[i] * b[j]) % p;
            }
        }
        for d in (k..2 * k).rev() {
            let c = prod[d];
            if c != 0 {
                for (i, &mi) in m.iter().enumerate().take(k + 1) {
                    let idx = d - k + i;
                    prod[idx] = (prod[idx] + p * p - c * mi % p) % p;
                }
            }
        }
        prod.truncate(k);
        prod
    }

    fn gf8() -> FieldCtx {
        FieldCtx::new(2, 3, &[1, 1, 0, 1], InvolutionKind::Identity).unwrap()
    }

    fn gf4() -> FieldCtx {
        FieldCtx::new(2, 2, &[1, 1, 1], InvolutionKind::FrobeniusHalf).unwrap()
    }

    fn gf9() -> FieldCtx {
        FieldCtx::new(3, 2, &[1, 0, 1], InvolutionKind::FrobeniusHalf).unwrap()
    }

    #[test]
    fn construction_examples() {
        assert_eq!(gf8().size(), 8);
        assert_eq!(gf4().size(), 4);
        assert!(matches!(
            FieldCtx::new(2, 2, &[1, 0, 1], InvolutionKind::Identity),
            Err(FieldError::ReducibleModulus { .. })
        ));
        assert_eq!(
            FieldCtx::new(4, 1, &[0, 1], InvolutionKind::Identity).unwrap_err(),
            FieldError::NotPrime(4)
        );
        assert_eq!(
            FieldCtx::new(2, 3, &[1, 1, 0, 1], InvolutionKind::FrobeniusHalf).unwrap_err(),
            FieldError::BadInvolution(3)
        );
        assert!(matches!(
            FieldCtx::new(2, 10, &[1, 0, 0, 1, 0, 0, 0, 0, 0, 0, 1], InvolutionKind::Identity),
            Err(FieldError::FieldTooLarge { .. })
        ));
    }

    #[test]
    fn involution_examples() {
        let f = gf4();
        let t = f.parse_elem("0,1").unwrap();
        assert_eq!(f.format_elem(f.involute(t)), "1,1");
        let f = gf8();
        let t2 = f.parse_elem("0,0,1").unwrap();
        assert_eq!(f.involute(t2), t2);
        let f = gf9();
        let t = f.parse_elem("0,1").unwrap();
        assert_eq!(f.format_elem(f.involute(t)), "0,2");
    }

    #[test]
    fn tables_match_schoolbook_oracle() {
        for f in [
            gf8(),
            gf4(),
            gf9(),
            FieldCtx::new(5, 2, &[2, 0, 1], InvolutionKind::Identity).unwrap(),
        ] {
            let (p, m) = (f.characteristic(), f.modulus().to_vec());
            for a in f.elements() {
                for b in f.elements() {
                    let ca = f.coeffs(a);
                    let cb = f.coeffs(b);
                    let expect = oracle_mul(&ca, &cb, &m, p);
                    assert_eq!(f.coeffs(f.mul(a, b)), expect);
                    let sum: Vec<u32> = ca.iter().zip(&cb).map(|(x, y)| (x + y) % p).collect();
                    assert_eq!(f.coeffs(f.add(a, b)), sum);
                }
                if !a.is_zero() {
                    assert_eq!(f.mul(a, f.inv(a).unwrap()), Elem::ONE);
                }
            }
        }
    }

    #[test]
    fn involution_is_field_automorphism_of_order_two() {
        for f in [gf8(), gf4(), gf9()] {
            assert_eq!(f.involute(Elem::ONE), Elem::ONE);
            for a in f.elements() {
                assert_eq!(f.involute(f.involute(a)), a);
                for b in f.elements() {
                    assert_eq!(f.involute(f.add(a, b)), f.add(f.involute(a), f.involute(b)));
                    assert_eq!(f.involute(f.mul(a, b)), f.mul(f.involute(b), f.involute(a)));
                }
            }
        }
    }

    #[test]
    fn enumeration_is_complete_and_distinct() {
        let f = gf9();
        let mut seen: Vec<Vec<u32>> = f.elements().map(|e| f.coeffs(e)).collect();
        assert_eq!(seen.len(), 9);
        seen.sort();
        seen.dedup();
        assert_eq!(seen.len(), 9);
    }

    #[test]
    fn literal_round_trip() {
        let f = gf8();
        for a in f.elements() {
            assert_eq!(f.parse_elem(&f.format_elem(a)).unwrap(), a);
        }
        assert!(f.parse_elem("1,1").is_err());
        assert!(f.parse_elem("2,0,0").is_err());
        let f5 = FieldCtx::prime(5).unwrap();
        assert_eq!(f5.format_elem(f5.from_int(-1)), "4");
        assert_eq!(f5.parse_elems("1,4", 2).unwrap(), vec![Elem::ONE, f5.from_int(4)]);
    }

    #[test]
    fn scalar_validation() {
        let f2 = FieldCtx::prime(2).unwrap();
        assert!(validate_scalars(&f2, Elem::ONE, Elem::ONE).is_ok());
        let f5 = FieldCtx::prime(5).unwrap();
        assert!(matches!(
            validate_scalars(&f5, f5.from_int(4), Elem::ONE),
            Err(ScalarError::MuConditionFailed { .. })
        ));
        assert!(validate_scalars(&f5, f5.from_int(4), Elem::ZERO).is_ok());
        assert!(matches!(
            validate_scalars(&f5, f5.from_int(2), Elem::ZERO),
            Err(ScalarError::LambdaNotUnitary(_))
        ));
    }
}
