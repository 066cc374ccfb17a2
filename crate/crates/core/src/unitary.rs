//! The module `M = K^(2n+1)`, the forms `B` and `Q`, the polarity map and
//! membership in `U_{2n+1}(K, Delta)`.
//!
//! Indices run over `{-n, ..., -1, 0, 1, ..., n}` and are stored in the order
//! `1, ..., n, 0, -n, ..., -1`.

use std::fmt;

use thiserror::Error;

use crate::field::{Elem, FieldCtx};
use crate::form_ring::{FormSetup, HPair, Sign};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum UnitaryError {
    #[error("precondition failed: {0}")]
    PreconditionFailed(String),
    #[error("row {row} does not match the column companion formula")]
    CompanionMismatch { row: i32 },
}

/// Storage position of index `i` in dimension `2n+1`.
#[inline]
pub fn pos(n: usize, i: i32) -> usize {
    debug_assert!(i.unsigned_abs() as usize <= n);
    if i > 0 {
        i as usize - 1
    } else if i == 0 {
        n
    } else {
        (2 * n as i32 + 1 + i) as usize
    }
}

/// Inverse of [`pos`].
#[inline]
pub fn index_at(n: usize, p: usize) -> i32 {
    if p < n {
        p as i32 + 1
    } else if p == n {
        0
    } else {
        p as i32 - 2 * n as i32 - 1
    }
}

/// All indices in storage order.
pub fn theta(n: usize) -> impl Iterator<Item = i32> + Clone {
    (0..2 * n + 1).map(move |p| index_at(n, p))
}

/// Hyperbolic indices (`i != 0`) in storage order.
pub fn theta_hb(n: usize) -> impl Iterator<Item = i32> + Clone {
    theta(n).filter(|&i| i != 0)
}

/// A column vector of `M`, Theta-indexed. Also used for row vectors of `M*`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct UVector {
    n: usize,
    data: Vec<Elem>,
}

impl UVector {
    pub fn zero(n: usize) -> Self {
        UVector {
            n,
            data: vec![Elem::ZERO; 2 * n + 1],
        }
    }

    /// The standard basis vector `e_i`.
    pub fn basis(n: usize, i: i32) -> Self {
        let mut v = Self::zero(n);
        v.set(i, Elem::ONE);
        v
    }

    pub fn from_storage(n: usize, data: Vec<Elem>) -> Self {
        assert_eq!(data.len(), 2 * n + 1);
        UVector { n, data }
    }

    pub fn rank(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn get(&self, i: i32) -> Elem {
        self.data[pos(self.n, i)]
    }

    #[inline]
    pub fn set(&mut self, i: i32, v: Elem) {
        let p = pos(self.n, i);
        self.data[p] = v;
    }

    pub fn storage(&self) -> &[Elem] {
        &self.data
    }

    /// `(u_1, ..., u_n, u_{-n}, ..., u_{-1})`.
    pub fn hyperbolic_part(&self) -> Vec<Elem> {
        theta_hb(self.n).map(|i| self.get(i)).collect()
    }

    pub fn add(&self, f: &FieldCtx, other: &UVector) -> UVector {
        let data = self.data.iter().zip(&other.data).map(|(&a, &b)| f.add(a, b)).collect();
        UVector { n: self.n, data }
    }

    /// Right scalar multiplication `u x`.
    pub fn scale(&self, f: &FieldCtx, x: Elem) -> UVector {
        UVector {
            n: self.n,
            data: self.data.iter().map(|&a| f.mul(a, x)).collect(),
        }
    }

    /// Left scalar multiplication `x u` (same as `u x` over a field).
    pub fn lscale(&self, f: &FieldCtx, x: Elem) -> UVector {
        UVector {
            n: self.n,
            data: self.data.iter().map(|&a| f.mul(x, a)).collect(),
        }
    }

    /// `row . col`.
    pub fn dot(&self, f: &FieldCtx, col: &UVector) -> Elem {
        self.data
            .iter()
            .zip(&col.data)
            .fold(Elem::ZERO, |acc, (&a, &b)| f.add(acc, f.mul(a, b)))
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(|e| e.is_zero())
    }

    /// Indices with nonzero entries, in storage order.
    pub fn support(&self) -> Vec<i32> {
        theta(self.n).filter(|&i| !self.get(i).is_zero()).collect()
    }
}

/// A `(2n+1) x (2n+1)` matrix with Theta-indexed rows and columns.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct UMatrix {
    n: usize,
    data: Vec<Elem>,
}

impl fmt::Debug for UMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let d = self.dim();
        writeln!(f, "UMatrix(n={})", self.n)?;
        for r in 0..d {
            let row: Vec<usize> = (0..d).map(|c| self.data[r * d + c].code()).collect();
            writeln!(f, "  {row:?}")?;
        }
        Ok(())
    }
}

impl UMatrix {
    pub fn identity(n: usize) -> Self {
        let d = 2 * n + 1;
        let mut data = vec![Elem::ZERO; d * d];
        for r in 0..d {
            data[r * d + r] = Elem::ONE;
        }
        UMatrix { n, data }
    }

    pub fn zero(n: usize) -> Self {
        let d = 2 * n + 1;
        UMatrix {
            n,
            data: vec![Elem::ZERO; d * d],
        }
    }

    /// From a row-major array in storage order.
    pub fn from_storage(n: usize, data: Vec<Elem>) -> Self {
        let d = 2 * n + 1;
        assert_eq!(data.len(), d * d);
        UMatrix { n, data }
    }

    pub fn rank(&self) -> usize {
        self.n
    }

    pub fn dim(&self) -> usize {
        2 * self.n + 1
    }

    pub fn storage(&self) -> &[Elem] {
        &self.data
    }

    /// Entry by storage position.
    #[inline]
    pub fn at(&self, r: usize, c: usize) -> Elem {
        self.data[r * self.dim() + c]
    }

    #[inline]
    pub fn get(&self, i: i32, j: i32) -> Elem {
        self.at(pos(self.n, i), pos(self.n, j))
    }

    #[inline]
    pub fn set(&mut self, i: i32, j: i32, v: Elem) {
        let d = self.dim();
        let idx = pos(self.n, i) * d + pos(self.n, j);
        self.data[idx] = v;
    }

    /// Adds `v` to entry `(i, j)`.
    pub fn add_at(&mut self, f: &FieldCtx, i: i32, j: i32, v: Elem) {
        let cur = self.get(i, j);
        self.set(i, j, f.add(cur, v));
    }

    pub fn col(&self, j: i32) -> UVector {
        let c = pos(self.n, j);
        let d = self.dim();
        UVector::from_storage(self.n, (0..d).map(|r| self.at(r, c)).collect())
    }

    pub fn row(&self, i: i32) -> UVector {
        let r = pos(self.n, i);
        let d = self.dim();
        UVector::from_storage(self.n, self.data[r * d..(r + 1) * d].to_vec())
    }

    pub fn is_identity(&self) -> bool {
        *self == UMatrix::identity(self.n)
    }

    pub fn mul(&self, f: &FieldCtx, other: &UMatrix) -> UMatrix {
        let d = self.dim();
        let mut out = vec![Elem::ZERO; d * d];
        for r in 0..d {
            for k in 0..d {
                let a = self.data[r * d + k];
                if a.is_zero() {
                    continue;
                }
                let orow = &other.data[k * d..(k + 1) * d];
                let dst = &mut out[r * d..(r + 1) * d];
                if a == Elem::ONE {
                    for (o, &b) in dst.iter_mut().zip(orow) {
                        *o = f.add(*o, b);
                    }
                } else {
                    for (o, &b) in dst.iter_mut().zip(orow) {
                        *o = f.add(*o, f.mul(a, b));
                    }
                }
            }
        }
        UMatrix { n: self.n, data: out }
    }

    pub fn mul_vec(&self, f: &FieldCtx, v: &UVector) -> UVector {
        let d = self.dim();
        let data = (0..d)
            .map(|r| (0..d).fold(Elem::ZERO, |acc, c| f.add(acc, f.mul(self.at(r, c), v.data[c]))))
            .collect();
        UVector::from_storage(self.n, data)
    }

    /// Row vector times matrix.
    pub fn row_mul(&self, f: &FieldCtx, row: &UVector) -> UVector {
        let d = self.dim();
        let data = (0..d)
            .map(|c| (0..d).fold(Elem::ZERO, |acc, r| f.add(acc, f.mul(row.data[r], self.at(r, c)))))
            .collect();
        UVector::from_storage(self.n, data)
    }

    /// Gauss-Jordan inverse; `None` when singular.
    pub fn inverse(&self, f: &FieldCtx) -> Option<UMatrix> {
        let d = self.dim();
        let mut a = self.data.clone();
        let mut inv = UMatrix::identity(self.n).data;
        for col in 0..d {
            let piv = (col..d).find(|&r| !a[r * d + col].is_zero())?;
            if piv != col {
                for c in 0..d {
                    a.swap(piv * d + c, col * d + c);
                    inv.swap(piv * d + c, col * d + c);
                }
            }
            let s = f.inv(a[col * d + col]).unwrap();
            for c in 0..d {
                a[col * d + c] = f.mul(a[col * d + c], s);
                inv[col * d + c] = f.mul(inv[col * d + c], s);
            }
            for r in 0..d {
                if r == col {
                    continue;
                }
                let m = a[r * d + col];
                if m.is_zero() {
                    continue;
                }
                for c in 0..d {
                    a[r * d + c] = f.sub(a[r * d + c], f.mul(m, a[col * d + c]));
                    inv[r * d + c] = f.sub(inv[r * d + c], f.mul(m, inv[col * d + c]));
                }
            }
        }
        Some(UMatrix { n: self.n, data: inv })
    }

    pub fn det(&self, f: &FieldCtx) -> Elem {
        let d = self.dim();
        let mut a = self.data.clone();
        let mut det = Elem::ONE;
        for col in 0..d {
            let Some(piv) = (col..d).find(|&r| !a[r * d + col].is_zero()) else {
                return Elem::ZERO;
            };
            if piv != col {
                for c in 0..d {
                    a.swap(piv * d + c, col * d + c);
                }
                det = f.neg(det);
            }
            let p = a[col * d + col];
            det = f.mul(det, p);
            let pinv = f.inv(p).unwrap();
            for r in col + 1..d {
                let m = f.mul(a[r * d + col], pinv);
                if m.is_zero() {
                    continue;
                }
                for c in col..d {
                    a[r * d + c] = f.sub(a[r * d + c], f.mul(m, a[col * d + c]));
                }
            }
        }
        det
    }

    /// `g h g^{-1}` given `g` and `g^{-1}`.
    pub fn conjugate_by(&self, f: &FieldCtx, g: &UMatrix, g_inv: &UMatrix) -> UMatrix {
        g.mul(f, self).mul(f, g_inv)
    }

    /// Entries `(i, j)` that differ from the identity, in storage order.
    pub fn nontrivial_entries(&self) -> Vec<(i32, i32, Elem)> {
        let d = self.dim();
        let mut out = Vec::new();
        for r in 0..d {
            for c in 0..d {
                let v = self.at(r, c);
                let e = if r == c { Elem::ONE } else { Elem::ZERO };
                if v != e {
                    out.push((index_at(self.n, r), index_at(self.n, c), v));
                }
            }
        }
        out
    }
}

/// `lambda^((s-1)/2)` style twist for `s = epsilon(i)`: `lambda^{exp}` with `exp` in `{-1, 0, 1}`.
pub fn lam(setup: &FormSetup, exp: i32) -> Elem {
    debug_assert!((-1..=1).contains(&exp));
    setup.lambda_pow(exp)
}

/// `B(u, v)`.
pub fn form_b(setup: &FormSetup, u: &UVector, v: &UVector) -> Elem {
    let f = setup.field();
    let n = setup.n as i32;
    let mut acc = Elem::ZERO;
    for i in 1..=n {
        acc = f.add(acc, f.mul(f.involute(u.get(i)), v.get(-i)));
    }
    acc = f.add(acc, f.mul(f.mul(f.involute(u.get(0)), setup.mu()), v.get(0)));
    for i in -n..=-1 {
        acc = f.add(acc, f.mul(f.mul(f.involute(u.get(i)), setup.lambda()), v.get(-i)));
    }
    acc
}

/// `Q(u) = (u_0, sum_{i>0} bar(u_i) u_{-i})`.
pub fn form_q(setup: &FormSetup, u: &UVector) -> HPair {
    let f = setup.field();
    let mut y = Elem::ZERO;
    for i in 1..=setup.n as i32 {
        y = f.add(y, f.mul(f.involute(u.get(i)), u.get(-i)));
    }
    HPair::new(u.get(0), y)
}

/// The polarity map `u -> tilde(u)`, returned as a row vector.
pub fn polarity(setup: &FormSetup, u: &UVector) -> UVector {
    let f = setup.field();
    let n = setup.n;
    let mut out = UVector::zero(n);
    for j in theta(n) {
        let v = if j > 0 {
            f.mul(f.involute(u.get(-j)), setup.lambda())
        } else if j == 0 {
            f.mul(f.involute(u.get(0)), setup.mu())
        } else {
            f.involute(u.get(-j))
        };
        out.set(j, v);
    }
    out
}

/// Why a matrix failed the membership test.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum NonMember {
    Singular,
    /// One of the four inverse-entry identities, numbered 1..=4, failed at `(i, j)`.
    InverseIdentity {
        identity: u8,
        i: i32,
        j: i32,
    },
    /// `Q(sigma_{*j})` is not congruent to `(delta_{0j}, 0)` modulo `Delta`.
    ColumnQuadratic {
        j: i32,
    },
}

impl fmt::Display for NonMember {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            NonMember::Singular => write!(f, "singular matrix"),
            NonMember::InverseIdentity { identity, i, j } => {
                write!(f, "inverse identity ({identity}) fails at ({i},{j})")
            }
            NonMember::ColumnQuadratic { j } => write!(f, "Q(column {j}) not congruent mod Delta"),
        }
    }
}

/// Membership via the inverse-entry identities and the column quadratic conditions.
pub fn check_member(setup: &FormSetup, sigma: &UMatrix) -> Result<(), NonMember> {
    let f = setup.field();
    let n = setup.n;
    let inv = sigma.inverse(f).ok_or(NonMember::Singular)?;
    let mu = setup.mu();
    let e = |i: i32| -> i32 {
        if i > 0 {
            1
        } else {
            -1
        }
    };
    for i in theta_hb(n) {
        for j in theta_hb(n) {
            let rhs = f.mul(
                f.mul(lam(setup, -(e(i) + 1) / 2), f.involute(sigma.get(-j, -i))),
                lam(setup, (e(j) + 1) / 2),
            );
            if inv.get(i, j) != rhs {
                return Err(NonMember::InverseIdentity { identity: 1, i, j });
            }
        }
    }
    for j in theta_hb(n) {
        let lhs = f.mul(mu, inv.get(0, j));
        let rhs = f.mul(f.involute(sigma.get(-j, 0)), lam(setup, (e(j) + 1) / 2));
        if lhs != rhs {
            return Err(NonMember::InverseIdentity { identity: 2, i: 0, j });
        }
    }
    for i in theta_hb(n) {
        let rhs = f.mul(f.mul(lam(setup, -(e(i) + 1) / 2), f.involute(sigma.get(0, -i))), mu);
        if inv.get(i, 0) != rhs {
            return Err(NonMember::InverseIdentity { identity: 3, i, j: 0 });
        }
    }
    if f.mul(mu, inv.get(0, 0)) != f.mul(f.involute(sigma.get(0, 0)), mu) {
        return Err(NonMember::InverseIdentity {
            identity: 4,
            i: 0,
            j: 0,
        });
    }
    for j in theta(n) {
        let expect = HPair::new(if j == 0 { Elem::ONE } else { Elem::ZERO }, Elem::ZERO);
        if !setup.congruent(form_q(setup, &sigma.col(j)), expect) {
            return Err(NonMember::ColumnQuadratic { j });
        }
    }
    Ok(())
}

pub fn is_member(setup: &FormSetup, sigma: &UMatrix) -> bool {
    check_member(setup, sigma).is_ok()
}

/// Definitional membership: `B(sigma u, sigma v) = B(u, v)` on basis pairs and
/// `Q(sigma u) == Q(u) mod Delta` on basis vectors and their pairwise sums.
pub fn member_oracle(setup: &FormSetup, sigma: &UMatrix) -> bool {
    let f = setup.field();
    let n = setup.n;
    if sigma.inverse(f).is_none() {
        return false;
    }
    let cols: Vec<UVector> = theta(n).map(|j| sigma.col(j)).collect();
    let basis: Vec<UVector> = theta(n).map(|j| UVector::basis(n, j)).collect();
    for (a, ea) in basis.iter().enumerate() {
        for (b, eb) in basis.iter().enumerate() {
            if form_b(setup, &cols[a], &cols[b]) != form_b(setup, ea, eb) {
                return false;
            }
        }
    }
    for a in 0..basis.len() {
        if !setup.congruent(form_q(setup, &cols[a]), form_q(setup, &basis[a])) {
            return false;
        }
        for b in a + 1..basis.len() {
            let su = cols[a].add(f, &cols[b]);
            let u = basis[a].add(f, &basis[b]);
            if !setup.congruent(form_q(setup, &su), form_q(setup, &u)) {
                return false;
            }
        }
    }
    true
}

/// Exhaustive definitional check over every `u, v` in `M`; only for tiny modules.
/// Returns `None` when `|M|` exceeds `limit`.
pub fn member_oracle_exhaustive(setup: &FormSetup, sigma: &UMatrix, limit: usize) -> Option<bool> {
    let f = setup.field();
    let n = setup.n;
    let d = 2 * n + 1;
    let q = f.size();
    let total = (q as u128).checked_pow(d as u32)?;
    if total > limit as u128 {
        return None;
    }
    if sigma.inverse(f).is_none() {
        return Some(false);
    }
    let vectors: Vec<UVector> = (0..total as usize)
        .map(|mut code| {
            let data = (0..d)
                .map(|_| {
                    let e = f.from_code(code % q).unwrap();
                    code /= q;
                    e
                })
                .collect();
            UVector::from_storage(n, data)
        })
        .collect();
    let images: Vec<UVector> = vectors.iter().map(|u| sigma.mul_vec(f, u)).collect();
    for (u, su) in vectors.iter().zip(&images) {
        if !setup.congruent(form_q(setup, su), form_q(setup, u)) {
            return Some(false);
        }
        for (v, sv) in vectors.iter().zip(&images) {
            if form_b(setup, su, sv) != form_b(setup, u, v) {
                return Some(false);
            }
        }
    }
    Some(true)
}

/// For a member with `sigma_{*j} = e_k x`, returns `x_hat` and checks
/// `sigma_{-k,*} = (e_{-j} x_hat)^t`.
pub fn column_companion(setup: &FormSetup, sigma: &UMatrix, j: i32, k: i32, x: Elem) -> Result<Elem, UnitaryError> {
    let f = setup.field();
    let n = setup.n;
    if j == 0 || k == 0 || x.is_zero() {
        return Err(UnitaryError::PreconditionFailed(
            "j, k must be hyperbolic and x nonzero".into(),
        ));
    }
    let mut expect_col = UVector::zero(n);
    expect_col.set(k, x);
    if sigma.col(j) != expect_col {
        return Err(UnitaryError::PreconditionFailed(format!("column {j} is not e_{k} * x")));
    }
    let ek = Sign::of(k).value();
    let ej = Sign::of(j).value();
    let x_hat = f.mul(
        f.mul(lam(setup, (ek - 1) / 2), f.inv(f.involute(x)).unwrap()),
        lam(setup, (1 - ej) / 2),
    );
    let mut expect_row = UVector::zero(n);
    expect_row.set(-j, x_hat);
    if sigma.row(-k) != expect_row {
        return Err(UnitaryError::CompanionMismatch { row: -k });
    }
    Ok(x_hat)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::presets;

    #[test]
    fn storage_positions() {
        let n = 3;
        let order: Vec<i32> = theta(n).collect();
        assert_eq!(order, vec![1, 2, 3, 0, -3, -2, -1]);
        for p in 0..7 {
            assert_eq!(pos(n, index_at(n, p)), p);
        }
    }

    #[test]
    fn form_b_examples() {
        let s = presets::gf5_symplectic(3);
        let f = s.field();
        let n = 3;
        assert_eq!(form_b(&s, &UVector::basis(n, 1), &UVector::basis(n, -1)), Elem::ONE);
        assert_eq!(form_b(&s, &UVector::basis(n, -1), &UVector::basis(n, 1)), f.from_int(4));
        assert_eq!(form_b(&s, &UVector::basis(n, 0), &UVector::basis(n, 0)), Elem::ZERO);
    }

    #[test]
    fn form_q_examples() {
        let s = presets::gf5_symplectic(3);
        let f = s.field();
        let mut u = UVector::zero(3);
        u.set(1, f.from_int(2));
        u.set(-1, f.from_int(3));
        assert_eq!(form_q(&s, &u), HPair::new(Elem::ZERO, Elem::ONE));
        assert_eq!(form_q(&s, &UVector::basis(3, 0)), HPair::new(Elem::ONE, Elem::ZERO));
        assert_eq!(form_q(&s, &UVector::basis(3, 1)), HPair::ZERO);
    }

    #[test]
    fn polarity_examples() {
        let s = presets::gf5_symplectic(3);
        let f = s.field();
        assert_eq!(polarity(&s, &UVector::basis(3, 1)), UVector::basis(3, -1));
        assert!(polarity(&s, &UVector::basis(3, 0)).is_zero());
        let mut expect = UVector::zero(3);
        expect.set(1, f.from_int(4));
        assert_eq!(polarity(&s, &UVector::basis(3, -1)), expect);
    }

    #[test]
    fn polarity_pairs_with_b_on_basis() {
        for s in [presets::sp2(3), presets::gf9_unitary(3), presets::gf5_symplectic(2)] {
            let f = s.field();
            for i in theta(s.n) {
                for j in theta(s.n) {
                    let u = UVector::basis(s.n, i);
                    let v = UVector::basis(s.n, j);
                    assert_eq!(polarity(&s, &u).dot(f, &v), form_b(&s, &u, &v));
                }
            }
        }
    }

    #[test]
    fn inverse_and_det() {
        let s = presets::pr8(3);
        let f = s.field();
        let t = f.parse_elem("0,1,0").unwrap();
        let mut m = UMatrix::identity(3);
        m.set(0, 0, t);
        m.set(1, -1, Elem::ONE);
        assert_eq!(m.det(f), t);
        let inv = m.inverse(f).unwrap();
        assert!(m.mul(f, &inv).is_identity());
        assert!(UMatrix::zero(3).inverse(f).is_none());
        assert_eq!(UMatrix::zero(3).det(f), Elem::ZERO);
    }

    #[test]
    fn identity_is_member() {
        for s in [presets::sp2(3), presets::pr2(3), presets::gf9_unitary(3)] {
            assert!(is_member(&s, &UMatrix::identity(s.n)));
            assert!(member_oracle(&s, &UMatrix::identity(s.n)));
        }
        let s = presets::sp2(3);
        assert_eq!(check_member(&s, &UMatrix::zero(3)), Err(NonMember::Singular));
    }

    #[test]
    fn long_root_member_and_corruption() {
        let s = presets::sp2(3);
        let mut t = UMatrix::identity(3);
        t.set(1, -1, Elem::ONE);
        assert!(is_member(&s, &t));
        assert!(member_oracle(&s, &t));
        let mut bad = UMatrix::identity(3);
        bad.set(1, 2, Elem::ONE);
        assert!(matches!(
            check_member(&s, &bad),
            Err(NonMember::InverseIdentity { identity: 1, .. })
        ));
        assert!(!member_oracle(&s, &bad));
        bad.set(-2, -1, Elem::ONE);
        assert!(is_member(&s, &bad));
    }

    #[test]
    fn exhaustive_oracle_small() {
        let s = presets::sp2(2);
        let mut t = UMatrix::identity(2);
        t.set(1, -1, Elem::ONE);
        assert_eq!(member_oracle_exhaustive(&s, &t, 1 << 12), Some(true));
        let mut bad = UMatrix::identity(2);
        bad.set(1, 2, Elem::ONE);
        assert_eq!(member_oracle_exhaustive(&s, &bad, 1 << 12), Some(false));
        assert_eq!(member_oracle_exhaustive(&presets::sp2(3), &t, 16), None);
    }

    #[test]
    fn companion_identity() {
        let s = presets::sp2(3);
        let id = UMatrix::identity(3);
        assert_eq!(column_companion(&s, &id, 1, 1, Elem::ONE), Ok(Elem::ONE));
        assert!(matches!(
            column_companion(&s, &id, 1, 2, Elem::ONE),
            Err(UnitaryError::PreconditionFailed(_))
        ));
    }

    #[test]
    fn companion_of_permutations() {
        let g = presets::gf5_symplectic(3);
        let f = g.field();
        let p12 = crate::elementary::perm_closed(&g, 1, 2).unwrap();
        assert_eq!(p12.col(1), UVector::basis(3, 2).scale(f, f.from_int(4)));
        assert_eq!(column_companion(&g, &p12, 1, 2, f.from_int(4)), Ok(f.from_int(4)));
        assert_eq!(p12.row(-2), UVector::basis(3, -1).scale(f, f.from_int(4)));

        let s = presets::sp2(3);
        let p13 = crate::elementary::perm_closed(&s, 1, 3).unwrap();
        assert_eq!(p13.col(1), UVector::basis(3, 3));
        assert_eq!(column_companion(&s, &p13, 1, 3, Elem::ONE), Ok(Elem::ONE));
        assert_eq!(p13.row(-3), UVector::basis(3, -1));
    }
}
