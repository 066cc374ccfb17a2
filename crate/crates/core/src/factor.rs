//! Certificates writing elementary transvections as short products of
//! elementary conjugates of a given element and its inverse.
//!
//! A certificate for `(sigma, t)` is a list of factors `(tau_k, e_k)` with
//! `prod_k tau_k sigma^{e_k} tau_k^{-1} = t`. Every construction below works on
//! a running conjugate `zeta = rho sigma rho^{-1}` and records `rho` as a word;
//! each reduction step is followed by a check on the actual matrix.

use std::collections::{HashMap, VecDeque};

use thiserror::Error;

use crate::elementary::{
    atom_inverse, atom_matrix, eval_word, extra_sign, short_companion, transvection_extra, transvection_short, Atom,
    EWord, ElemError,
};
use crate::field::Elem;
use crate::form_ring::{FormSetup, HPair, Sign};
use crate::level::{level_of, LevelClass, LevelError};
use crate::unitary::{is_member, theta, theta_hb, UMatrix};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum FactorError {
    #[error("level of sigma is {found}, need {need}")]
    WrongLevel { found: &'static str, need: &'static str },
    #[error("rank n={0} is too small, need n >= 3")]
    RankTooSmall(usize),
    #[error("bad target: {0}")]
    BadTarget(String),
    #[error("precondition failed: {0}")]
    PreconditionFailed(String),
    #[error("no SE2 parameters found for {0}")]
    ParameterUnsolvable(String),
    #[error("internal invariant violated: {0}")]
    InternalInvariant(String),
    #[error(transparent)]
    Level(#[from] LevelError),
    #[error(transparent)]
    Elem(#[from] ElemError),
}

/// One factor `tau sigma^{exp} tau^{-1}`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Factor {
    pub conj: EWord,
    pub exp: i8,
}

/// A verified product of conjugates of `base` and its inverse equal to `target`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ConjugateWord {
    pub base: UMatrix,
    pub factors: Vec<Factor>,
    pub target: UMatrix,
    pub target_atom: Option<Atom>,
}

impl ConjugateWord {
    /// Builds and verifies the certificate.
    pub fn new(
        setup: &FormSetup,
        base: UMatrix,
        factors: Vec<Factor>,
        target: UMatrix,
        target_atom: Option<Atom>,
    ) -> Result<Self, FactorError> {
        let cw = ConjugateWord {
            base,
            factors,
            target,
            target_atom,
        };
        if !verify_certificate(setup, &cw) {
            return Err(FactorError::InternalInvariant("certificate does not verify".into()));
        }
        Ok(cw)
    }

    pub fn len(&self) -> usize {
        self.factors.len()
    }

    pub fn is_empty(&self) -> bool {
        self.factors.is_empty()
    }

    /// The certificate for `rho t rho^{-1}` obtained by prefixing every conjugator with `rho`.
    pub fn conjugated_by(&self, setup: &FormSetup, rho: &EWord) -> Result<ConjugateWord, FactorError> {
        let f = setup.field();
        let r = eval_word(setup, rho)?;
        let ri = r.inverse(f).expect("elementary words are invertible");
        let factors = self
            .factors
            .iter()
            .map(|fa| Factor {
                conj: rho.then(&fa.conj),
                exp: fa.exp,
            })
            .collect();
        Ok(ConjugateWord {
            base: self.base.clone(),
            factors,
            target: r.mul(f, &self.target).mul(f, &ri),
            target_atom: None,
        })
    }
}

/// `prod_k tau_k sigma^{e_k} tau_k^{-1}`; `None` if a conjugator fails to evaluate.
pub fn certificate_product(setup: &FormSetup, cw: &ConjugateWord) -> Option<UMatrix> {
    let f = setup.field();
    let base_inv = cw.base.inverse(f)?;
    let mut acc = UMatrix::identity(setup.n);
    for fa in &cw.factors {
        let t = eval_word(setup, &fa.conj).ok()?;
        let ti = t.inverse(f)?;
        let s = match fa.exp {
            1 => &cw.base,
            -1 => &base_inv,
            _ => return None,
        };
        acc = acc.mul(f, &t.mul(f, s).mul(f, &ti));
    }
    Some(acc)
}

/// Re-checks membership of the base and every conjugator, then the product.
pub fn verify_certificate(setup: &FormSetup, cw: &ConjugateWord) -> bool {
    if cw.base.rank() != setup.n || cw.target.rank() != setup.n || !is_member(setup, &cw.base) {
        return false;
    }
    for fa in &cw.factors {
        match eval_word(setup, &fa.conj) {
            Ok(t) if is_member(setup, &t) => {}
            _ => return false,
        }
    }
    certificate_product(setup, cw).is_some_and(|p| p == cw.target)
}

/// The shape reached by the first-column reduction.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ReductionOutcome {
    /// `(tau sigma tau^{-1})_{*1} = e_{-1} x`.
    ToMinus1 { tau: EWord, x: Elem },
    /// `(tau sigma tau^{-1})_{*1} = e_2 x`.
    To2 { tau: EWord, x: Elem },
    /// `sigma_{*1} = e_1 x + e_0 y`.
    Colinear10 { x: Elem, y: Elem },
}

/// A running conjugate `zeta = rho sigma rho^{-1}`.
#[derive(Debug, Clone)]
struct Work<'a> {
    setup: &'a FormSetup,
    rho: EWord,
    zeta: UMatrix,
}

impl<'a> Work<'a> {
    fn new(setup: &'a FormSetup, sigma: &UMatrix) -> Self {
        Work {
            setup,
            rho: EWord::empty(),
            zeta: sigma.clone(),
        }
    }

    fn conj(&mut self, a: Atom) -> Result<(), FactorError> {
        let f = self.setup.field();
        let m = atom_matrix(self.setup, &a)?;
        let mi = atom_matrix(self.setup, &atom_inverse(self.setup, &a))?;
        self.zeta = m.mul(f, &self.zeta).mul(f, &mi);
        self.rho.0.insert(0, a);
        Ok(())
    }

    /// Factors `(g rho, e)` of `g zeta^e g^{-1}`.
    fn factor(&self, g: &[Atom], exp: i8) -> Factor {
        Factor {
            conj: EWord(g.to_vec()).then(&self.rho),
            exp,
        }
    }
}

fn internal(msg: impl Into<String>) -> FactorError {
    FactorError::InternalInvariant(msg.into())
}

/// Clears rows `0` and `-r`... of column `col` using `T_{-r}(b, c)` with pivot `u_r`;
/// fails if the solved pair leaves the form parameter.
fn clear_with_extra(w: &mut Work, col: i32, r: i32) -> Result<(), FactorError> {
    let setup = w.setup;
    let f = setup.field();
    let u0 = w.zeta.get(0, col);
    let um = w.zeta.get(-r, col);
    let piv = w.zeta.get(r, col);
    if u0.is_zero() && um.is_zero() {
        return Ok(());
    }
    let p = -r;
    let pinv = f.inv(piv).ok_or_else(|| internal("zero pivot"))?;
    let b = f.neg(f.mul(u0, pinv));
    let twist = setup.lambda_pow(-(1 + Sign::of(p).value()) / 2);
    let c = f.mul(
        f.sub(f.mul(f.mul(f.mul(twist, f.involute(b)), setup.mu()), u0), um),
        pinv,
    );
    let pair = HPair::new(b, c);
    if !setup.param(extra_sign(p)).contains(pair) {
        return Err(internal(format!(
            "solved extra parameter {} of T_{p} lies outside the form parameter",
            setup.format_pair(pair)
        )));
    }
    w.conj(Atom::Extra { i: p, x: b, y: c })?;
    if !w.zeta.get(0, col).is_zero() || !w.zeta.get(-r, col).is_zero() {
        return Err(internal("extra clearing step left nonzero entries"));
    }
    Ok(())
}

/// Clears every row `i` of column `col` in `rows` (skipping `0`, `+-r`, `-col`) with `T_{ir}(*)`.
fn clear_with_short(w: &mut Work, col: i32, r: i32, rows: &[i32]) -> Result<(), FactorError> {
    let f = w.setup.field();
    for &i in rows {
        if i == 0 || i == r || i == -r || i == -col {
            continue;
        }
        let ui = w.zeta.get(i, col);
        if ui.is_zero() {
            continue;
        }
        let a = f.neg(f.div(ui, w.zeta.get(r, col)));
        w.conj(Atom::Short { i, j: r, x: a })?;
        if !w.zeta.get(i, col).is_zero() {
            return Err(internal(format!("short clearing step failed at row {i}")));
        }
    }
    Ok(())
}

/// A word of `P` atoms moving index `from` to `to` while avoiding `avoid` (and their negatives).
fn perm_path(n: usize, from: i32, to: i32, avoid: &[i32], allowed: &[i32]) -> Option<Vec<Atom>> {
    let ok = |k: i32| k != 0 && allowed.contains(&k) && !avoid.iter().any(|&a| a == k || a == -k);
    let mut prev: HashMap<i32, i32> = HashMap::new();
    let mut queue = VecDeque::from([from]);
    prev.insert(from, from);
    while let Some(cur) = queue.pop_front() {
        if cur == to {
            break;
        }
        for m in theta_hb(n) {
            if ok(m) && m != cur && m != -cur && !prev.contains_key(&m) {
                prev.insert(m, cur);
                queue.push_back(m);
            }
        }
    }
    prev.get(&to)?;
    let mut path = vec![];
    let mut cur = to;
    while cur != from {
        let p = prev[&cur];
        path.push(Atom::Perm { i: cur, j: p });
        cur = p;
    }
    path.reverse();
    Some(path)
}

/// The column reduction inside the index block `allowed`: conjugates so that column
/// `col` becomes `e_{-col} x` or `e_r x` for some `r` outside `{0, +-col}`, or reports that
/// it is already supported on `{col, 0}`. With `second = Some(q)` the pivot is moved to `q` first.
fn reduce_column(w: &mut Work, col: i32, second: Option<i32>, allowed: &[i32]) -> Result<Option<i32>, FactorError> {
    let n = w.setup.n;
    let u = w.zeta.col(col);
    if !u.get(-col).is_zero() {
        clear_with_short(w, col, -col, allowed)?;
        clear_with_extra(w, col, -col)?;
        return Ok(Some(-col));
    }
    let Some(j) = allowed
        .iter()
        .copied()
        .find(|&j| j != 0 && j != col && j != -col && !u.get(j).is_zero())
    else {
        return Ok(None);
    };
    let mut r = j;
    if let Some(q) = second {
        if j != q {
            if let Some(path) = perm_path(n, j, q, &[col], allowed) {
                for a in path {
                    w.conj(a)?;
                }
                r = q;
            } else if w.zeta.get(q, col).is_zero() && j == -q {
                let y = w
                    .setup
                    .param(extra_sign(q))
                    .members()
                    .iter()
                    .find(|h| h.x.is_zero() && !h.y.is_zero())
                    .map(|h| h.y);
                if let Some(y) = y {
                    w.conj(Atom::Extra { i: q, x: Elem::ZERO, y })?;
                    r = q;
                }
            }
        }
    }
    if w.zeta.get(r, col).is_zero() {
        return Err(internal("pivot vanished after permutation"));
    }
    clear_with_short(w, col, r, allowed)?;
    clear_with_extra(w, col, r)?;
    Ok(Some(r))
}

fn column_is(zeta: &UMatrix, col: i32, r: i32) -> bool {
    let n = zeta.rank();
    theta(n).all(|i| (i == r) != zeta.get(i, col).is_zero())
}

/// First-column reduction over all indices.
pub fn reduce_first_column(setup: &FormSetup, sigma: &UMatrix) -> Result<ReductionOutcome, FactorError> {
    let all: Vec<i32> = theta(setup.n).collect();
    let mut w = Work::new(setup, sigma);
    let second = if setup.n >= 2 { Some(2) } else { None };
    match reduce_column(&mut w, 1, second, &all)? {
        None => Ok(ReductionOutcome::Colinear10 {
            x: sigma.get(1, 1),
            y: sigma.get(0, 1),
        }),
        Some(r) => {
            if !column_is(&w.zeta, 1, r) {
                return Err(internal("reduced column has the wrong shape"));
            }
            let x = w.zeta.get(r, 1);
            match r {
                -1 => Ok(ReductionOutcome::ToMinus1 { tau: w.rho, x }),
                2 => Ok(ReductionOutcome::To2 { tau: w.rho, x }),
                _ => Err(internal(format!(
                    "no permutation moves the pivot to index 2 (landed on {r})"
                ))),
            }
        }
    }
}

/// For `zeta_{*1} = e_2 x`: a word `tau` keeping that column with `(tau zeta tau^{-1})_{i,-2} = 0`
/// for some `i` in `{3, -3}`.
pub fn clear_minus2(setup: &FormSetup, zeta: &UMatrix) -> Result<EWord, FactorError> {
    let mut w = Work::new(setup, zeta);
    clear_minus2_work(&mut w)?;
    Ok(w.rho)
}

fn clear_minus2_work(w: &mut Work) -> Result<i32, FactorError> {
    let setup = w.setup;
    let f = setup.field();
    let n = setup.n;
    if n < 3 {
        return Err(FactorError::RankTooSmall(n));
    }
    if !column_is(&w.zeta, 1, 2) {
        return Err(FactorError::PreconditionFailed("column 1 is not e_2 x".into()));
    }
    let x = w.zeta.get(2, 1);
    let zero_at = |z: &UMatrix| [3, -3].into_iter().find(|&i| z.get(i, -2).is_zero());
    if let Some(i) = zero_at(&w.zeta) {
        return Ok(i);
    }
    let z12 = w.zeta.get(-1, -2);
    if !z12.is_zero() {
        let a = f.neg(f.div(w.zeta.get(-3, -2), z12));
        w.conj(Atom::Short { i: -3, j: -1, x: a })?;
    } else {
        let rows: Vec<i32> = theta_hb(n).filter(|i| i.abs() > 3).collect();
        for &i in &rows {
            if zero_at(&w.zeta).is_some() {
                break;
            }
            let ui = w.zeta.get(i, -2);
            if ui.is_zero() {
                continue;
            }
            let a = f.neg(f.div(ui, w.zeta.get(-3, -2)));
            w.conj(Atom::Short { i, j: -3, x: a })?;
        }
        if zero_at(&w.zeta).is_none() {
            clear_with_extra(w, -2, 3)?;
        }
    }
    if !column_is(&w.zeta, 1, 2) || w.zeta.get(2, 1) != x {
        return Err(internal("clearing row -2 disturbed column 1"));
    }
    zero_at(&w.zeta).ok_or_else(|| internal("no zero among entries (+-3,-2)"))
}

/// Identifies `m` as a nontrivial short root transvection `T_{ab}(c)`.
pub fn recognize_short(setup: &FormSetup, m: &UMatrix) -> Option<(i32, i32, Elem)> {
    let off = m.nontrivial_entries();
    if off.is_empty() || off.len() > 2 {
        return None;
    }
    for &(a, b, c) in &off {
        if a == 0 || b == 0 || a == b || a == -b {
            continue;
        }
        if transvection_short(setup, a, b, c).ok().as_ref() == Some(m) {
            return Some((a, b, c));
        }
    }
    None
}

/// Identifies `m` as a nontrivial extra short root transvection `T_l(y, z)`.
pub fn recognize_extra(setup: &FormSetup, m: &UMatrix) -> Option<(i32, HPair)> {
    if m.is_identity() {
        return None;
    }
    for l in theta_hb(setup.n) {
        let (y, z) = (m.get(0, -l), m.get(l, -l));
        if y.is_zero() && z.is_zero() {
            continue;
        }
        if transvection_extra(setup, l, y, z).ok().as_ref() == Some(m) {
            return Some((l, HPair::new(y, z)));
        }
    }
    None
}

/// A word `delta` with `delta T_{ab}(c) delta^{-1} = T_{ij}(x)`.
fn transport_short(setup: &FormSetup, from: (i32, i32, Elem), to: (i32, i32, Elem)) -> Result<EWord, FactorError> {
    let f = setup.field();
    let n = setup.n;
    let (a, b, c) = from;
    let (i, j, x) = to;
    let mut prev: HashMap<(i32, i32), ((i32, i32), Atom)> = HashMap::new();
    let mut queue = VecDeque::from([(a, b)]);
    let mut seen = vec![(a, b)];
    while let Some((p, q)) = queue.pop_front() {
        if (p, q) == (i, j) {
            break;
        }
        for k in theta_hb(n) {
            if k == p || k == -p || k == q || k == -q {
                continue;
            }
            for (next, atom) in [((k, q), Atom::Perm { i: k, j: p }), ((p, k), Atom::Perm { i: k, j: q })] {
                if !seen.contains(&next) {
                    seen.push(next);
                    prev.insert(next, ((p, q), atom));
                    queue.push_back(next);
                }
            }
        }
    }
    let mut perms = vec![];
    let mut cur = (i, j);
    while cur != (a, b) {
        let (p, atom) = *prev
            .get(&cur)
            .ok_or_else(|| internal("no permutation path between index pairs"))?;
        perms.push(atom);
        cur = p;
    }
    // perms[0] is applied last.
    let mut word = EWord(perms);
    if x != c {
        let k = theta_hb(n)
            .find(|&k| k != i && k != -i && k != j && k != -j)
            .ok_or(FactorError::RankTooSmall(n))?;
        word = EWord::single(Atom::Diag {
            i,
            j: k,
            x: f.div(x, c),
        })
        .then(&word);
    }
    let d = eval_word(setup, &word)?;
    let src = transvection_short(setup, a, b, c)?;
    let dst = transvection_short(setup, i, j, x)?;
    if d.mul(f, &src).mul(f, &d.inverse(f).unwrap()) != dst {
        return Err(internal("transport of short transvection failed"));
    }
    Ok(word)
}

/// A word `delta` with `delta T_l(y, 0) delta^{-1} = T_i(x, 0)`.
fn transport_extra_x(setup: &FormSetup, from: (i32, Elem), to: (i32, Elem)) -> Result<EWord, FactorError> {
    let f = setup.field();
    let n = setup.n;
    let (l, y) = from;
    let (i, x) = to;
    let all: Vec<i32> = theta_hb(n).collect();
    let path = perm_path(n, l, i, &[], &all).ok_or_else(|| internal("no permutation path between indices"))?;
    // P_{-m,-k} moves T_k to T_m.
    let mut perms: Vec<Atom> = path
        .into_iter()
        .map(|a| match a {
            Atom::Perm { i: m, j: k } => Atom::Perm { i: -m, j: -k },
            other => other,
        })
        .collect();
    perms.reverse();
    let mut word = EWord(perms);
    if x != y {
        let k = theta_hb(n)
            .find(|&k| k != i && k != -i)
            .ok_or(FactorError::RankTooSmall(n))?;
        let a = f.div(x, y);
        word = EWord::single(Atom::Diag {
            i: -i,
            j: k,
            x: f.inv(a).unwrap(),
        })
        .then(&word);
    }
    let d = eval_word(setup, &word)?;
    let src = transvection_extra(setup, l, y, Elem::ZERO)?;
    let dst = transvection_extra(setup, i, x, Elem::ZERO)?;
    if d.mul(f, &src).mul(f, &d.inverse(f).unwrap()) != dst {
        return Err(internal("transport of extra transvection failed"));
    }
    Ok(word)
}

fn shortcut(
    setup: &FormSetup,
    sigma: &UMatrix,
    target: &UMatrix,
    atom: Atom,
) -> Result<Option<ConjugateWord>, FactorError> {
    let f = setup.field();
    for exp in [1i8, -1] {
        let s = if exp == 1 {
            sigma.clone()
        } else {
            sigma.inverse(f).unwrap()
        };
        if &s == target {
            let fa = Factor {
                conj: EWord::empty(),
                exp,
            };
            return ConjugateWord::new(setup, sigma.clone(), vec![fa], target.clone(), Some(atom)).map(Some);
        }
    }
    Ok(None)
}

fn require_full(setup: &FormSetup, sigma: &UMatrix) -> Result<(), FactorError> {
    if setup.n < 3 {
        return Err(FactorError::RankTooSmall(setup.n));
    }
    match level_of(setup, sigma)? {
        LevelClass::Full { .. } => Ok(()),
        other => Err(FactorError::WrongLevel {
            found: other.name(),
            need: "Full",
        }),
    }
}

/// At most four conjugates of `sigma^{+-1}` whose product is `T_{ij}(x)`.
pub fn factor_short(setup: &FormSetup, sigma: &UMatrix, i: i32, j: i32, x: Elem) -> Result<ConjugateWord, FactorError> {
    require_full(setup, sigma)?;
    if x.is_zero() {
        return Err(FactorError::BadTarget("T_ij(0) is trivial".into()));
    }
    let target = transvection_short(setup, i, j, x)?;
    let atom = Atom::Short { i, j, x };
    if let Some(cw) = shortcut(setup, sigma, &target, atom)? {
        return Ok(cw);
    }
    let (factors, produced) = short_core(setup, sigma)?;
    let (a, b, c) =
        recognize_short(setup, &produced).ok_or_else(|| internal("commutator is not a short root transvection"))?;
    let delta = transport_short(setup, (a, b, c), (i, j, x))?;
    let factors = factors
        .into_iter()
        .map(|fa| Factor {
            conj: delta.then(&fa.conj),
            exp: fa.exp,
        })
        .collect();
    ConjugateWord::new(setup, sigma.clone(), factors, target, Some(atom))
}

/// Four factors whose product is some nontrivial short root transvection, and that product.
fn short_core(setup: &FormSetup, sigma: &UMatrix) -> Result<(Vec<Factor>, UMatrix), FactorError> {
    let f = setup.field();
    let n = setup.n;
    let hb: Vec<i32> = theta_hb(n).collect();
    let mut w = Work::new(setup, sigma);

    // Cases 2 and 3 conjugate until a hyperbolic off-diagonal entry appears.
    for _ in 0..4 {
        let z = &w.zeta;
        if hb.iter().any(|&a| hb.iter().any(|&b| a != b && !z.get(a, b).is_zero())) {
            break;
        }
        let diff = hb.iter().find_map(|&k| {
            hb.iter()
                .find(|&&l| l != k && l != -k && z.get(k, k) != z.get(l, l))
                .map(|&l| (k, l))
        });
        if let Some((k, l)) = diff {
            w.conj(Atom::Short {
                i: k,
                j: l,
                x: Elem::ONE,
            })?;
            continue;
        }
        if let Some(&j) = hb.iter().find(|&&j| !z.get(0, j).is_zero()) {
            let y = z.get(0, j);
            let i = *hb.iter().find(|&&i| i != j && i != -j).unwrap();
            w.conj(Atom::Extra { i, x: y, y: Elem::ZERO })?;
            continue;
        }
        let y = setup
            .delta
            .members()
            .iter()
            .find(|h| h.x == Elem::ONE)
            .map(|h| h.y)
            .ok_or_else(|| internal("diagonal element of full level but J(Delta) = 0"))?;
        w.conj(Atom::Extra { i: -1, x: Elem::ONE, y })?;
    }

    // Case 1: bring a nonzero off-diagonal hyperbolic entry into column 1.
    let z = &w.zeta;
    let (_, b) = hb
        .iter()
        .find_map(|&b| hb.iter().find(|&&a| a != b && !z.get(a, b).is_zero()).map(|&a| (a, b)))
        .ok_or_else(|| internal("no off-diagonal hyperbolic entry after pre-conjugation"))?;
    let perms: Vec<Atom> = if b == 1 {
        vec![]
    } else if b != -1 {
        vec![Atom::Perm { i: 1, j: b }]
    } else {
        vec![Atom::Perm { i: 2, j: -1 }, Atom::Perm { i: 1, j: 2 }]
    };
    for a in perms {
        w.conj(a)?;
    }
    let all: Vec<i32> = theta(n).collect();
    let r = reduce_column(&mut w, 1, Some(2), &all)?
        .ok_or_else(|| internal("column 1 unexpectedly supported on {1, 0}"))?;
    if !column_is(&w.zeta, 1, r) {
        return Err(internal("first column reduction failed"));
    }

    let one = Elem::ONE;
    let (outer, inner) = match r {
        -1 => {
            // Subcase 1.1: needs zeta_{-k,2} = 0 for some k outside {+-1, +-2}.
            let cands = |z: &UMatrix| -> Vec<i32> {
                hb.iter()
                    .copied()
                    .filter(|&k| k.abs() > 2 && z.get(-k, 2).is_zero())
                    .collect()
            };
            if cands(&w.zeta).is_empty() {
                let block: Vec<i32> = theta(n).filter(|&k| k != 1 && k != -1).collect();
                reduce_column(&mut w, 2, None, &block)?;
                if !column_is(&w.zeta, 1, -1) {
                    return Err(internal("block reduction disturbed column 1"));
                }
            }
            let k = *cands(&w.zeta)
                .first()
                .ok_or_else(|| internal("no zero entry in column 2"))?;
            (Atom::Short { i: k, j: 1, x: one }, Atom::Short { i: 1, j: -2, x: one })
        }
        2 => {
            // Subcase 1.2: needs zeta_{i,-2} = 0 for some i outside {+-1, +-2}.
            let found = hb.iter().copied().find(|&i| i.abs() > 2 && w.zeta.get(i, -2).is_zero());
            let i = match found {
                Some(i) => i,
                None => clear_minus2_work(&mut w)?,
            };
            (
                Atom::Short {
                    i: 2,
                    j: i,
                    x: f.neg(one),
                },
                Atom::Short { i: 1, j: 2, x: one },
            )
        }
        _ => return Err(internal(format!("unexpected pivot {r}"))),
    };
    // [B,[A,zeta]] = (BA)zeta * B zeta^-1 * zeta * A zeta^-1
    let factors = vec![
        w.factor(&[outer, inner], 1),
        w.factor(&[outer], -1),
        w.factor(&[], 1),
        w.factor(&[inner], -1),
    ];
    let probe = ConjugateWord {
        base: sigma.clone(),
        factors: factors.clone(),
        target: UMatrix::identity(n),
        target_atom: None,
    };
    let produced = certificate_product(setup, &probe).ok_or_else(|| internal("factor evaluation failed"))?;
    Ok((factors, produced))
}

/// At most twelve conjugates of `sigma^{+-1}` whose product is `T_i(a, b)`.
pub fn factor_extra(setup: &FormSetup, sigma: &UMatrix, i: i32, pair: HPair) -> Result<ConjugateWord, FactorError> {
    require_full(setup, sigma)?;
    if pair.is_zero() {
        return Err(FactorError::BadTarget("T_i(0,0) is trivial".into()));
    }
    let f = setup.field();
    let target = transvection_extra(setup, i, pair.x, pair.y)?;
    let atom = Atom::Extra {
        i,
        x: pair.x,
        y: pair.y,
    };
    if let Some(cw) = shortcut(setup, sigma, &target, atom)? {
        return Ok(cw);
    }
    let j = theta_hb(setup.n)
        .find(|&j| j != i && j != -i && Sign::of(j) == Sign::of(i))
        .ok_or(FactorError::RankTooSmall(setup.n))?;
    // T_i(a,b) = T_{j,-i}(-zc) * T_ij(x) * ^{T_j(y,z)} T_ij(-x) when (yc, xzc) = (a, b).
    let solved = f.units().find_map(|x| {
        let c = short_companion(setup, i, j, x);
        let ci = f.inv(c)?;
        let y = f.mul(pair.x, ci);
        let z = f.mul(pair.y, f.inv(f.mul(x, c))?);
        if !setup.param(extra_sign(j)).contains(HPair::new(y, z)) {
            return None;
        }
        let lhs = transvection_short(setup, j, -i, f.neg(f.mul(z, c))).ok()?;
        let tj = transvection_extra(setup, j, y, z).ok()?;
        let mid = transvection_short(setup, i, j, x).ok()?;
        let last = transvection_short(setup, i, j, f.neg(x)).ok()?;
        let conj_last = tj.mul(f, &last).mul(f, &tj.inverse(f)?);
        (lhs.mul(f, &mid).mul(f, &conj_last) == target).then_some((x, y, z, c))
    });
    let (x, y, z, c) =
        solved.ok_or_else(|| FactorError::ParameterUnsolvable(format!("T_{i}{}", setup.format_pair(pair))))?;
    let mut factors = vec![];
    let zc = f.mul(z, c);
    if !zc.is_zero() {
        factors.extend(factor_short(setup, sigma, j, -i, f.neg(zc))?.factors);
    }
    factors.extend(factor_short(setup, sigma, i, j, x)?.factors);
    let third = factor_short(setup, sigma, i, j, f.neg(x))?;
    let rho = EWord::single(Atom::Extra { i: j, x: y, y: z });
    factors.extend(third.conjugated_by(setup, &rho)?.factors);
    ConjugateWord::new(setup, sigma.clone(), factors, target, Some(atom))
}

/// At most two conjugates (one when `K = GF(2)` and `(0,1)` lies in `Delta`) whose product is `T_i(x, 0)`.
pub fn factor_tlevel(setup: &FormSetup, sigma: &UMatrix, i: i32, x: Elem) -> Result<ConjugateWord, FactorError> {
    if !setup.admits_tlevel() {
        return Err(FactorError::PreconditionFailed("setup has no (0, K x 0) level".into()));
    }
    match level_of(setup, sigma)? {
        LevelClass::TLevel { .. } => {}
        other => {
            return Err(FactorError::WrongLevel {
                found: other.name(),
                need: "TLevel",
            })
        }
    }
    if x.is_zero() {
        return Err(FactorError::BadTarget("T_i(0,0) is trivial".into()));
    }
    let f = setup.field();
    let n = setup.n;
    let target = transvection_extra(setup, i, x, Elem::ZERO)?;
    let atom = Atom::Extra { i, x, y: Elem::ZERO };
    if let Some(cw) = shortcut(setup, sigma, &target, atom)? {
        return Ok(cw);
    }
    let hb: Vec<i32> = theta_hb(n).collect();
    let gf2 = f.size() == 2;
    let long_root = setup.delta.contains(HPair::new(Elem::ZERO, Elem::ONE));

    if gf2 && long_root {
        // sigma = e + e_0 w^t; a g with row k equal to w and g e_0 = e_0 gives g sigma g^-1 = T_{-k}(1,0).
        let k = *hb
            .iter()
            .find(|&&k| !sigma.get(0, k).is_zero())
            .ok_or_else(|| internal("TLevel element over GF(2) with trivial middle row"))?;
        let mut wrow = sigma.row(0);
        wrow.set(0, Elem::ZERO);
        let mut g = UMatrix::identity(n);
        let mut word = vec![];
        for &j in &hb {
            if j == k || j == -k {
                continue;
            }
            let a = f.sub(wrow.get(j), g.get(k, j));
            if a.is_zero() {
                continue;
            }
            let at = Atom::Short { i: k, j, x: a };
            g = g.mul(f, &atom_matrix(setup, &at)?);
            word.push(at);
        }
        let y = f.sub(wrow.get(-k), g.get(k, -k));
        if !y.is_zero() {
            let at = Atom::Extra { i: k, x: Elem::ZERO, y };
            g = g.mul(f, &atom_matrix(setup, &at)?);
            word.push(at);
        }
        if g.row(k) != wrow {
            return Err(internal("row construction for the single conjugate failed"));
        }
        let produced = g.mul(f, sigma).mul(f, &g.inverse(f).unwrap());
        let (l, h) = recognize_extra(setup, &produced)
            .ok_or_else(|| internal("conjugate is not an extra short root transvection"))?;
        if !h.y.is_zero() {
            return Err(internal("conjugate has a long root component"));
        }
        let delta = transport_extra_x(setup, (l, h.x), (i, x))?;
        let fa = Factor {
            conj: delta.then(&EWord(word)),
            exp: 1,
        };
        return ConjugateWord::new(setup, sigma.clone(), vec![fa], target, Some(atom));
    }

    let mut w = Work::new(setup, sigma);
    let other = match hb.iter().copied().find(|&i0| !sigma.get(0, i0).is_zero()) {
        Some(i0) => {
            let j = match hb
                .iter()
                .copied()
                .find(|&j| j != i0 && j != -i0 && sigma.get(0, j).is_zero())
            {
                Some(j) => j,
                None => {
                    let j = hb.iter().copied().find(|&j| j != i0 && j != -i0).unwrap();
                    let a = f.div(sigma.get(0, j), sigma.get(0, i0));
                    w.conj(Atom::Short { i: i0, j, x: a })?;
                    if !w.zeta.get(0, j).is_zero() {
                        return Err(internal("pre-conjugation did not clear the middle row entry"));
                    }
                    j
                }
            };
            Atom::Short {
                i: i0,
                j: -j,
                x: Elem::ONE,
            }
        }
        None => Atom::Extra {
            i: 1,
            x: Elem::ONE,
            y: Elem::ZERO,
        },
    };
    // [zeta, g] = zeta * g zeta^-1 g^-1
    let factors = vec![w.factor(&[], 1), w.factor(&[other], -1)];
    let probe = ConjugateWord {
        base: sigma.clone(),
        factors: factors.clone(),
        target: UMatrix::identity(n),
        target_atom: None,
    };
    let produced = certificate_product(setup, &probe).ok_or_else(|| internal("factor evaluation failed"))?;
    let (l, h) = recognize_extra(setup, &produced)
        .ok_or_else(|| internal("commutator is not an extra short root transvection"))?;
    if !h.y.is_zero() {
        return Err(internal("commutator has a long root component"));
    }
    let delta = transport_extra_x(setup, (l, h.x), (i, x))?;
    let factors = factors
        .into_iter()
        .map(|fa| Factor {
            conj: delta.then(&fa.conj),
            exp: fa.exp,
        })
        .collect();
    ConjugateWord::new(setup, sigma.clone(), factors, target, Some(atom))
}
