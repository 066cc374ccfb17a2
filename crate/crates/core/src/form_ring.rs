//! The Heisenberg group on `K x K`, the trace map and odd form parameters.
//!
//! Every operation is sign-indexed: `Sign::Plus` uses the Hermitian data
//! `(bar, lambda, mu)`, `Sign::Minus` the inverse data `(bar, bar(lambda), bar(lambda) bar(mu) lambda)`.
//! Odd form parameters are finite, so they are materialised as sorted vectors
//! with a membership bitmap over the `|K|^2` universe.

use std::ops::Deref;

use thiserror::Error;

use crate::field::{Elem, FieldCtx, HermitianScalars};

/// Default upper bound on the rank `n`.
pub const DEFAULT_RANK_CAP: usize = 6;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum FormError {
    #[error("generator {0} lies outside Delta_max")]
    GeneratorOutsideMax(String),
    #[error("K x 0 is not an odd form parameter here: ({0},0) has nonzero trace")]
    KTimesZeroInvalid(String),
    #[error("rank n={n} outside 1..={cap}")]
    BadRank { n: usize, cap: usize },
    #[error("odd form parameter invariant violated: {0}")]
    InvariantViolated(String),
}

/// The sign `epsilon` attached to hyperbolic indices and to the two Heisenberg structures.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Sign {
    Plus,
    Minus,
}

impl Sign {
    /// `epsilon(i)` for a nonzero index.
    pub fn of(i: i32) -> Sign {
        debug_assert!(i != 0);
        if i > 0 {
            Sign::Plus
        } else {
            Sign::Minus
        }
    }

    pub fn flip(self) -> Sign {
        match self {
            Sign::Plus => Sign::Minus,
            Sign::Minus => Sign::Plus,
        }
    }

    pub fn value(self) -> i32 {
        match self {
            Sign::Plus => 1,
            Sign::Minus => -1,
        }
    }
}

/// An element `(x, y)` of the Heisenberg group.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct HPair {
    pub x: Elem,
    pub y: Elem,
}

impl HPair {
    pub const ZERO: HPair = HPair {
        x: Elem::ZERO,
        y: Elem::ZERO,
    };

    pub fn new(x: Elem, y: Elem) -> Self {
        HPair { x, y }
    }

    pub fn is_zero(self) -> bool {
        self == HPair::ZERO
    }
}

/// How an odd form parameter was specified.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Descriptor {
    Min,
    Max,
    KTimesZero,
    Generated(Vec<HPair>),
}

/// A materialised odd form parameter (`Delta` for `Sign::Plus`, `Delta^{-1}` for `Sign::Minus`).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FormParameter {
    descriptor: Descriptor,
    sign: Sign,
    q: usize,
    members: Vec<HPair>,
    bitmap: Vec<bool>,
}

impl FormParameter {
    fn from_members(descriptor: Descriptor, sign: Sign, q: usize, mut members: Vec<HPair>) -> Self {
        members.sort();
        members.dedup();
        let mut bitmap = vec![false; q * q];
        for h in &members {
            bitmap[h.x.code() * q + h.y.code()] = true;
        }
        FormParameter {
            descriptor,
            sign,
            q,
            members,
            bitmap,
        }
    }

    pub fn descriptor(&self) -> &Descriptor {
        &self.descriptor
    }

    pub fn sign(&self) -> Sign {
        self.sign
    }

    #[inline]
    pub fn contains(&self, h: HPair) -> bool {
        self.bitmap[h.x.code() * self.q + h.y.code()]
    }

    /// Members in lexicographic `(x, y)` code order.
    pub fn members(&self) -> &[HPair] {
        &self.members
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }
}

/// A Hermitian field `(K, bar, lambda, mu)`: the data needed before an odd form parameter is chosen.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct HermitianField {
    pub field: FieldCtx,
    pub scalars: HermitianScalars,
}

impl HermitianField {
    pub fn new(field: FieldCtx, scalars: HermitianScalars) -> Self {
        HermitianField { field, scalars }
    }

    pub fn lambda(&self) -> Elem {
        self.scalars.lambda
    }

    pub fn mu(&self) -> Elem {
        self.scalars.mu
    }

    /// `lambda` for `Plus`, the inverse ring's symmetry `bar(lambda)` for `Minus`.
    pub fn lambda_s(&self, sign: Sign) -> Elem {
        let f = &self.field;
        match sign {
            Sign::Plus => self.scalars.lambda,
            Sign::Minus => {
                let lb = f.involute(self.scalars.lambda);
                f.mul(f.mul(lb, f.involute(self.scalars.lambda)), self.scalars.lambda)
            }
        }
    }

    /// `mu` for `Plus`, `bar(lambda) bar(mu) lambda` for `Minus`.
    pub fn mu_s(&self, sign: Sign) -> Elem {
        let f = &self.field;
        match sign {
            Sign::Plus => self.scalars.mu,
            Sign::Minus => f.mul(
                f.mul(f.involute(self.scalars.lambda), f.involute(self.scalars.mu)),
                self.scalars.lambda,
            ),
        }
    }

    /// `lambda^e` for small integer exponents.
    pub fn lambda_pow(&self, e: i32) -> Elem {
        self.field.pow(self.scalars.lambda, e as i64)
    }

    /// `(x1 + x2, y1 + y2 - bar(x1) mu x2)`.
    pub fn h_add(&self, sign: Sign, a: HPair, b: HPair) -> HPair {
        let f = &self.field;
        let twist = f.mul(f.mul(f.involute(a.x), self.mu_s(sign)), b.x);
        HPair {
            x: f.add(a.x, b.x),
            y: f.sub(f.add(a.y, b.y), twist),
        }
    }

    /// `(-x, -y - bar(x) mu x)`.
    pub fn h_neg(&self, sign: Sign, a: HPair) -> HPair {
        let f = &self.field;
        let twist = f.mul(f.mul(f.involute(a.x), self.mu_s(sign)), a.x);
        HPair {
            x: f.neg(a.x),
            y: f.sub(f.neg(a.y), twist),
        }
    }

    /// `a -(b)`, i.e. `a + (-b)` in the Heisenberg group.
    pub fn h_sub(&self, sign: Sign, a: HPair, b: HPair) -> HPair {
        self.h_add(sign, a, self.h_neg(sign, b))
    }

    /// `(x a, bar(a) y a)`.
    pub fn h_scale(&self, _sign: Sign, h: HPair, a: Elem) -> HPair {
        let f = &self.field;
        HPair {
            x: f.mul(h.x, a),
            y: f.mul(f.mul(f.involute(a), h.y), a),
        }
    }

    /// `bar(x) mu x + y + bar(y) lambda`.
    pub fn trace(&self, sign: Sign, h: HPair) -> Elem {
        let f = &self.field;
        let a = f.mul(f.mul(f.involute(h.x), self.mu_s(sign)), h.x);
        let b = f.mul(f.involute(h.y), self.lambda_s(sign));
        f.add(f.add(a, h.y), b)
    }

    /// All of `K x K` in lexicographic code order.
    pub fn universe(&self) -> impl Iterator<Item = HPair> + '_ {
        self.field
            .elements()
            .flat_map(move |x| self.field.elements().map(move |y| HPair { x, y }))
    }

    /// `Delta_min = {(0, x - bar(x) lambda)}`.
    pub fn delta_min_members(&self, sign: Sign) -> Vec<HPair> {
        let f = &self.field;
        let lam = self.lambda_s(sign);
        f.elements()
            .map(|x| HPair::new(Elem::ZERO, f.sub(x, f.mul(f.involute(x), lam))))
            .collect()
    }

    /// `Delta_max = ker(trace)`.
    pub fn delta_max_members(&self, sign: Sign) -> Vec<HPair> {
        self.universe().filter(|&h| self.trace(sign, h).is_zero()).collect()
    }

    /// Smallest subgroup containing `seeds` that is stable under scaling by `K`.
    pub fn closure(&self, sign: Sign, seeds: &[HPair]) -> Vec<HPair> {
        let q = self.field.size();
        let mut span: Vec<HPair> = Vec::new();
        let mut in_span = vec![false; q * q];
        for &s in seeds {
            for c in self.field.elements() {
                let h = self.h_scale(sign, s, c);
                let idx = h.x.code() * q + h.y.code();
                if !in_span[idx] {
                    in_span[idx] = true;
                    span.push(h);
                }
            }
        }
        let mut seen = vec![false; q * q];
        seen[0] = true;
        let mut out = vec![HPair::ZERO];
        let mut head = 0;
        while head < out.len() {
            let a = out[head];
            head += 1;
            for &s in &span {
                let b = self.h_add(sign, a, s);
                let idx = b.x.code() * q + b.y.code();
                if !seen[idx] {
                    seen[idx] = true;
                    out.push(b);
                }
            }
        }
        out
    }

    /// Materialises an odd form parameter for the `Plus` structure.
    pub fn build_parameter(&self, descriptor: Descriptor) -> Result<FormParameter, FormError> {
        let sign = Sign::Plus;
        let q = self.field.size();
        let max = self.delta_max_members(sign);
        let min = self.delta_min_members(sign);
        let members = match &descriptor {
            Descriptor::Max => max.clone(),
            Descriptor::Min => self.closure(sign, &min),
            Descriptor::KTimesZero => {
                let gens: Vec<HPair> = self.field.elements().map(|x| HPair::new(x, Elem::ZERO)).collect();
                if let Some(bad) = gens.iter().find(|&&h| !self.trace(sign, h).is_zero()) {
                    return Err(FormError::KTimesZeroInvalid(self.field.format_elem(bad.x)));
                }
                let seeds: Vec<HPair> = min.iter().chain(gens.iter()).copied().collect();
                self.closure(sign, &seeds)
            }
            Descriptor::Generated(gens) => {
                if let Some(bad) = gens.iter().find(|&&h| !self.trace(sign, h).is_zero()) {
                    return Err(FormError::GeneratorOutsideMax(self.format_pair(*bad)));
                }
                let seeds: Vec<HPair> = min.iter().chain(gens.iter()).copied().collect();
                self.closure(sign, &seeds)
            }
        };
        let param = FormParameter::from_members(descriptor, sign, q, members);
        self.check_parameter(&param)?;
        Ok(param)
    }

    /// Asserts `Delta_min <= Delta <= Delta_max`, `(0,0)` membership and closure.
    pub fn check_parameter(&self, param: &FormParameter) -> Result<(), FormError> {
        let sign = param.sign();
        let bad = |what: &str, h: HPair| {
            Err(FormError::InvariantViolated(format!(
                "{what} at {}",
                self.format_pair(h)
            )))
        };
        if !param.contains(HPair::ZERO) {
            return bad("missing neutral element", HPair::ZERO);
        }
        for h in self.delta_min_members(sign) {
            if !param.contains(h) {
                return bad("Delta_min not contained", h);
            }
        }
        for &h in param.members() {
            if !self.trace(sign, h).is_zero() {
                return bad("outside Delta_max", h);
            }
            for c in self.field.elements() {
                let s = self.h_scale(sign, h, c);
                if !param.contains(s) {
                    return bad("not closed under scaling", s);
                }
            }
        }
        let members = param.members();
        // Full additive closure check when affordable; otherwise against a sample row.
        let limit = if members.len() * members.len() <= 1 << 22 {
            members.len()
        } else {
            64
        };
        for &a in &members[..limit.min(members.len())] {
            for &b in members {
                let s = self.h_add(sign, a, b);
                if !param.contains(s) {
                    return bad("not closed under addition", s);
                }
            }
        }
        Ok(())
    }

    pub fn format_pair(&self, h: HPair) -> String {
        format!("({},{})", self.field.format_elem(h.x), self.field.format_elem(h.y))
    }
}

/// A validated Hermitian form field together with the rank `n`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FormSetup {
    pub herm: HermitianField,
    pub delta: FormParameter,
    pub delta_inv: FormParameter,
    pub n: usize,
    pub j_delta: Vec<Elem>,
}

impl Deref for FormSetup {
    type Target = HermitianField;

    fn deref(&self) -> &HermitianField {
        &self.herm
    }
}

impl FormSetup {
    pub fn new(herm: HermitianField, descriptor: Descriptor, n: usize) -> Result<Self, FormError> {
        Self::with_rank_cap(herm, descriptor, n, DEFAULT_RANK_CAP)
    }

    pub fn with_rank_cap(
        herm: HermitianField,
        descriptor: Descriptor,
        n: usize,
        cap: usize,
    ) -> Result<Self, FormError> {
        if n == 0 || n > cap {
            return Err(FormError::BadRank { n, cap });
        }
        let delta = herm.build_parameter(descriptor.clone())?;
        let f = &herm.field;
        let inv_members: Vec<HPair> = delta
            .members()
            .iter()
            .map(|h| HPair::new(h.x, f.involute(h.y)))
            .collect();
        let delta_inv = FormParameter::from_members(descriptor, Sign::Minus, f.size(), inv_members);
        herm.check_parameter(&delta_inv)?;
        let mut j_delta: Vec<Elem> = delta.members().iter().map(|h| h.x).collect();
        j_delta.dedup();
        Ok(FormSetup {
            herm,
            delta,
            delta_inv,
            n,
            j_delta,
        })
    }

    pub fn field(&self) -> &FieldCtx {
        &self.herm.field
    }

    /// `Delta` for `Plus`, `Delta^{-1}` for `Minus`.
    pub fn param(&self, sign: Sign) -> &FormParameter {
        match sign {
            Sign::Plus => &self.delta,
            Sign::Minus => &self.delta_inv,
        }
    }

    /// Whether `J(Delta)` is the whole field (the only alternative is `{0}`).
    pub fn j_is_field(&self) -> bool {
        self.j_delta.len() == self.field().size()
    }

    /// `mu = 0` and `K x 0` inside `Delta`: the setups with a third odd form ideal.
    pub fn admits_tlevel(&self) -> bool {
        self.mu().is_zero()
            && self
                .field()
                .elements()
                .all(|x| self.delta.contains(HPair::new(x, Elem::ZERO)))
    }

    /// `a == b mod Delta` in the Heisenberg group.
    pub fn congruent(&self, a: HPair, b: HPair) -> bool {
        self.delta.contains(self.h_sub(Sign::Plus, a, b))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::{validate_scalars, InvolutionKind};

    fn herm(f: FieldCtx, lambda: i64, mu: i64) -> HermitianField {
        let (l, m) = (f.from_int(lambda), f.from_int(mu));
        let s = validate_scalars(&f, l, m).unwrap();
        HermitianField::new(f, s)
    }

    fn pair(f: &FieldCtx, x: i64, y: i64) -> HPair {
        HPair::new(f.from_int(x), f.from_int(y))
    }

    #[test]
    fn add_examples() {
        let h = herm(FieldCtx::prime(5).unwrap(), 4, 0);
        let f = &h.field;
        assert_eq!(h.h_add(Sign::Plus, pair(f, 2, 1), pair(f, 3, 4)), HPair::ZERO);
        let h2 = herm(FieldCtx::prime(2).unwrap(), 1, 1);
        let f2 = &h2.field;
        assert_eq!(h2.h_add(Sign::Plus, pair(f2, 1, 0), pair(f2, 1, 1)), HPair::ZERO);
        for a in h2.universe() {
            assert_eq!(h2.h_add(Sign::Plus, HPair::ZERO, a), a);
        }
    }

    #[test]
    fn neg_examples() {
        let h2 = herm(FieldCtx::prime(2).unwrap(), 1, 1);
        let f2 = &h2.field;
        assert_eq!(h2.h_neg(Sign::Plus, pair(f2, 1, 0)), pair(f2, 1, 1));
        let h5 = herm(FieldCtx::prime(5).unwrap(), 4, 0);
        let f5 = &h5.field;
        assert_eq!(h5.h_neg(Sign::Plus, pair(f5, 2, 1)), pair(f5, 3, 4));
    }

    #[test]
    fn scale_example_gf4() {
        let f = FieldCtx::new(2, 2, &[1, 1, 1], InvolutionKind::FrobeniusHalf).unwrap();
        let h = herm(f, 1, 0);
        let f = &h.field;
        let t = f.parse_elem("0,1").unwrap();
        // brute force: t*t and t^2 * 1 * t by repeated multiplication
        let tt = f.mul(t, t);
        let ttt = f.mul(tt, t);
        assert_eq!(f.format_elem(tt), "1,1");
        assert_eq!(ttt, Elem::ONE);
        let got = h.h_scale(Sign::Plus, HPair::new(t, Elem::ONE), t);
        assert_eq!(got, HPair::new(tt, Elem::ONE));
    }

    #[test]
    fn parameter_examples() {
        let sp2 = herm(FieldCtx::prime(2).unwrap(), 1, 1);
        let f = &sp2.field;
        let min = sp2.build_parameter(Descriptor::Min).unwrap();
        assert_eq!(min.members(), &[HPair::ZERO]);
        let max = sp2.build_parameter(Descriptor::Max).unwrap();
        assert_eq!(max.members(), &[HPair::ZERO, pair(f, 0, 1)]);
        for h in sp2.universe() {
            assert_eq!(sp2.trace(Sign::Plus, h), f.mul(h.x, h.x));
        }
        assert!(matches!(
            sp2.build_parameter(Descriptor::KTimesZero),
            Err(FormError::KTimesZeroInvalid(_))
        ));
        assert!(matches!(
            sp2.build_parameter(Descriptor::Generated(vec![pair(f, 1, 0)])),
            Err(FormError::GeneratorOutsideMax(_))
        ));

        let pr2 = herm(FieldCtx::prime(2).unwrap(), 1, 0);
        let f = &pr2.field;
        let kx0 = pr2.build_parameter(Descriptor::KTimesZero).unwrap();
        assert_eq!(kx0.members(), &[HPair::ZERO, pair(f, 1, 0)]);
        let max = pr2.build_parameter(Descriptor::Max).unwrap();
        assert_eq!(max.len(), 4);
        for h in pr2.universe() {
            assert!(pr2.trace(Sign::Plus, h).is_zero());
        }
    }

    #[test]
    fn delta_inverse_and_j() {
        let f9 = FieldCtx::new(3, 2, &[1, 0, 1], InvolutionKind::FrobeniusHalf).unwrap();
        let h = herm(f9, 1, 1);
        let setup = FormSetup::new(h, Descriptor::Max, 3).unwrap();
        let f = setup.field();
        assert_eq!(setup.delta.len(), 27);
        for a in setup.universe() {
            let flipped = HPair::new(a.x, f.involute(a.y));
            assert_eq!(setup.delta.contains(a), setup.delta_inv.contains(flipped));
        }
        assert!(setup.j_is_field());
        assert!(!setup.admits_tlevel());
    }

    #[test]
    fn generated_between_min_and_max() {
        let f9 = FieldCtx::new(3, 2, &[1, 0, 1], InvolutionKind::FrobeniusHalf).unwrap();
        let h = herm(f9, 1, 1);
        let max = h.build_parameter(Descriptor::Max).unwrap();
        let g = *max.members().iter().find(|p| !p.x.is_zero()).unwrap();
        let gen = h.build_parameter(Descriptor::Generated(vec![g])).unwrap();
        let min = h.build_parameter(Descriptor::Min).unwrap();
        assert!(min.members().iter().all(|&m| gen.contains(m)));
        assert!(gen.members().iter().all(|&m| max.contains(m)));
        assert!(gen.contains(g));
    }
}
