//! Elementary transvections, the derived elements `D_{ij}(x)` and `P_{ij}`,
//! words in generators and a randomized checker for the relations between them.

use std::fmt;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::field::{Elem, FieldCtx};
use crate::form_ring::{FormSetup, HPair, Sign};
use crate::unitary::UMatrix;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ElemError {
    #[error("bad indices ({i},{j}): need hyperbolic i != +-j within rank {n}")]
    BadIndices { i: i32, j: i32, n: usize },
    #[error("bad index {i} for rank {n}")]
    BadIndex { i: i32, n: usize },
    #[error("parameter {pair} of T_{i} is not in the sign-{sign} form parameter")]
    ParameterNotInDelta { i: i32, pair: String, sign: i32 },
    #[error("D_{{ij}}(x) needs x != 0")]
    ZeroScalar,
}

/// A generator or derived element, with its parameters.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Atom {
    Short { i: i32, j: i32, x: Elem },
    Extra { i: i32, x: Elem, y: Elem },
    Diag { i: i32, j: i32, x: Elem },
    Perm { i: i32, j: i32 },
}

/// A word in atoms, evaluated left to right.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Default)]
pub struct EWord(pub Vec<Atom>);

impl EWord {
    pub fn empty() -> Self {
        EWord(Vec::new())
    }

    pub fn single(a: Atom) -> Self {
        EWord(vec![a])
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// `self * other`.
    pub fn then(&self, other: &EWord) -> EWord {
        let mut v = self.0.clone();
        v.extend_from_slice(&other.0);
        EWord(v)
    }

    pub fn atoms(&self) -> &[Atom] {
        &self.0
    }
}

#[inline]
fn eps(i: i32) -> i32 {
    Sign::of(i).value()
}

fn check_pair(setup: &FormSetup, i: i32, j: i32) -> Result<(), ElemError> {
    let n = setup.n as i32;
    if i == 0 || j == 0 || i.abs() > n || j.abs() > n || i == j || i == -j {
        return Err(ElemError::BadIndices { i, j, n: setup.n });
    }
    Ok(())
}

fn check_index(setup: &FormSetup, i: i32) -> Result<(), ElemError> {
    if i == 0 || i.unsigned_abs() as usize > setup.n {
        return Err(ElemError::BadIndex { i, n: setup.n });
    }
    Ok(())
}

/// `lambda^{(eps(j)-1)/2} bar(x) lambda^{(1-eps(i))/2}`, the companion coefficient of `T_{ij}(x)`.
pub fn short_companion(setup: &FormSetup, i: i32, j: i32, x: Elem) -> Elem {
    let f = setup.field();
    f.mul(
        f.mul(setup.lambda_pow((eps(j) - 1) / 2), f.involute(x)),
        setup.lambda_pow((1 - eps(i)) / 2),
    )
}

/// `T_{ij}(x)`.
pub fn transvection_short(setup: &FormSetup, i: i32, j: i32, x: Elem) -> Result<UMatrix, ElemError> {
    check_pair(setup, i, j)?;
    let f = setup.field();
    let mut m = UMatrix::identity(setup.n);
    m.add_at(f, i, j, x);
    m.add_at(f, -j, -i, f.neg(short_companion(setup, i, j, x)));
    Ok(m)
}

/// The form parameter that `T_i(x, y)` draws from: `Delta^{-eps(i)}`.
pub fn extra_sign(i: i32) -> Sign {
    Sign::of(i).flip()
}

/// `T_i(x, y)`; the pair must lie in `Delta^{-eps(i)}`.
pub fn transvection_extra(setup: &FormSetup, i: i32, x: Elem, y: Elem) -> Result<UMatrix, ElemError> {
    check_index(setup, i)?;
    let sign = extra_sign(i);
    if !setup.param(sign).contains(HPair::new(x, y)) {
        return Err(ElemError::ParameterNotInDelta {
            i,
            pair: setup.format_pair(HPair::new(x, y)),
            sign: sign.value(),
        });
    }
    Ok(extra_unchecked(setup, i, x, y))
}

fn extra_unchecked(setup: &FormSetup, i: i32, x: Elem, y: Elem) -> UMatrix {
    let f = setup.field();
    let mut m = UMatrix::identity(setup.n);
    m.add_at(f, 0, -i, x);
    let c = f.mul(f.mul(setup.lambda_pow(-(1 + eps(i)) / 2), f.involute(x)), setup.mu());
    m.add_at(f, i, 0, f.neg(c));
    m.add_at(f, i, -i, y);
    m
}

/// Closed form of `D_{ij}(x)`.
pub fn diag_closed(setup: &FormSetup, i: i32, j: i32, x: Elem) -> Result<UMatrix, ElemError> {
    check_pair(setup, i, j)?;
    let f = setup.field();
    let xi = f.inv(x).ok_or(ElemError::ZeroScalar)?;
    let twist = |s: i32, v: Elem| f.mul(f.mul(setup.lambda_pow((s - 1) / 2), v), setup.lambda_pow(-(s - 1) / 2));
    let mut m = UMatrix::identity(setup.n);
    m.set(i, i, x);
    m.set(j, j, xi);
    m.set(-i, -i, twist(eps(i), f.inv(f.involute(x)).unwrap()));
    m.set(-j, -j, twist(eps(j), f.involute(x)));
    Ok(m)
}

/// `T_{ij}(x-1) T_{ji}(1) T_{ij}(x^{-1}-1) T_{ji}(-x)`.
pub fn diag_word(f: &FieldCtx, i: i32, j: i32, x: Elem) -> Result<EWord, ElemError> {
    let xi = f.inv(x).ok_or(ElemError::ZeroScalar)?;
    Ok(EWord(vec![
        Atom::Short {
            i,
            j,
            x: f.sub(x, Elem::ONE),
        },
        Atom::Short {
            i: j,
            j: i,
            x: Elem::ONE,
        },
        Atom::Short {
            i,
            j,
            x: f.sub(xi, Elem::ONE),
        },
        Atom::Short {
            i: j,
            j: i,
            x: f.neg(x),
        },
    ]))
}

pub fn build_diag(setup: &FormSetup, i: i32, j: i32, x: Elem) -> Result<(UMatrix, EWord), ElemError> {
    let m = diag_closed(setup, i, j, x)?;
    Ok((m, diag_word(setup.field(), i, j, x)?))
}

/// Closed form of `P_{ij}`.
pub fn perm_closed(setup: &FormSetup, i: i32, j: i32) -> Result<UMatrix, ElemError> {
    check_pair(setup, i, j)?;
    let f = setup.field();
    let mut m = UMatrix::identity(setup.n);
    for k in [i, j, -i, -j] {
        m.set(k, k, Elem::ZERO);
    }
    m.set(i, j, Elem::ONE);
    m.set(j, i, f.neg(Elem::ONE));
    m.set(-i, -j, setup.lambda_pow((eps(i) - eps(j)) / 2));
    m.set(-j, -i, f.neg(setup.lambda_pow((eps(j) - eps(i)) / 2)));
    Ok(m)
}

/// `T_{ij}(1) T_{ji}(-1) T_{ij}(1)`.
pub fn perm_word(f: &FieldCtx, i: i32, j: i32) -> EWord {
    EWord(vec![
        Atom::Short { i, j, x: Elem::ONE },
        Atom::Short {
            i: j,
            j: i,
            x: f.neg(Elem::ONE),
        },
        Atom::Short { i, j, x: Elem::ONE },
    ])
}

pub fn build_perm(setup: &FormSetup, i: i32, j: i32) -> Result<(UMatrix, EWord), ElemError> {
    let m = perm_closed(setup, i, j)?;
    Ok((m, perm_word(setup.field(), i, j)))
}

pub fn atom_matrix(setup: &FormSetup, a: &Atom) -> Result<UMatrix, ElemError> {
    match *a {
        Atom::Short { i, j, x } => transvection_short(setup, i, j, x),
        Atom::Extra { i, x, y } => transvection_extra(setup, i, x, y),
        Atom::Diag { i, j, x } => diag_closed(setup, i, j, x),
        Atom::Perm { i, j } => perm_closed(setup, i, j),
    }
}

/// The inverse atom.
pub fn atom_inverse(setup: &FormSetup, a: &Atom) -> Atom {
    let f = setup.field();
    match *a {
        Atom::Short { i, j, x } => Atom::Short { i, j, x: f.neg(x) },
        Atom::Extra { i, x, y } => {
            let h = setup.h_neg(extra_sign(i), HPair::new(x, y));
            Atom::Extra { i, x: h.x, y: h.y }
        }
        Atom::Diag { i, j, x } => Atom::Diag {
            i,
            j,
            x: f.inv(x).unwrap_or(Elem::ZERO),
        },
        Atom::Perm { i, j } => Atom::Perm { i: j, j: i },
    }
}

/// Left-to-right product of the atoms.
pub fn eval_word(setup: &FormSetup, w: &EWord) -> Result<UMatrix, ElemError> {
    let f = setup.field();
    let mut acc = UMatrix::identity(setup.n);
    for a in w.atoms() {
        acc = acc.mul(f, &atom_matrix(setup, a)?);
    }
    Ok(acc)
}

pub fn word_inverse(setup: &FormSetup, w: &EWord) -> EWord {
    EWord(w.atoms().iter().rev().map(|a| atom_inverse(setup, a)).collect())
}

/// `g h g^{-1}`.
pub fn conj(f: &FieldCtx, g: &UMatrix, h: &UMatrix) -> UMatrix {
    g.mul(f, h).mul(f, &g.inverse(f).expect("invertible conjugator"))
}

/// `g h g^{-1} h^{-1}`.
pub fn commutator(f: &FieldCtx, g: &UMatrix, h: &UMatrix) -> UMatrix {
    let gi = g.inverse(f).expect("invertible");
    let hi = h.inverse(f).expect("invertible");
    g.mul(f, h).mul(f, &gi).mul(f, &hi)
}

/// Every short and extra short generator with nontrivial parameter, in a fixed order.
pub fn all_generators(setup: &FormSetup) -> Vec<Atom> {
    let f = setup.field();
    let n = setup.n as i32;
    let idx: Vec<i32> = (1..=n).chain((-n..=-1).rev()).collect();
    let mut out = Vec::new();
    for &i in &idx {
        for &j in &idx {
            if i == j || i == -j {
                continue;
            }
            for x in f.units() {
                out.push(Atom::Short { i, j, x });
            }
        }
    }
    for &i in &idx {
        for h in setup.param(extra_sign(i)).members() {
            if !h.is_zero() {
                out.push(Atom::Extra { i, x: h.x, y: h.y });
            }
        }
    }
    out
}

fn random_hb(rng: &mut impl Rng, n: usize) -> i32 {
    let k = rng.gen_range(1..=n as i32);
    if rng.gen_bool(0.5) {
        k
    } else {
        -k
    }
}

pub fn random_elem(f: &FieldCtx, rng: &mut impl Rng) -> Elem {
    f.from_code(rng.gen_range(0..f.size())).unwrap()
}

pub fn random_unit(f: &FieldCtx, rng: &mut impl Rng) -> Elem {
    f.from_code(rng.gen_range(1..f.size())).unwrap()
}

/// A random `(i, j)` with `i != +-j`.
pub fn random_pair(rng: &mut impl Rng, n: usize) -> (i32, i32) {
    assert!(n >= 2);
    loop {
        let (i, j) = (random_hb(rng, n), random_hb(rng, n));
        if i != j && i != -j {
            return (i, j);
        }
    }
}

fn random_param(setup: &FormSetup, i: i32, rng: &mut impl Rng) -> HPair {
    *setup.param(extra_sign(i)).members().choose(rng).unwrap()
}

/// A uniformly chosen short or extra short generator (parameters may be trivial).
pub fn random_atom(setup: &FormSetup, rng: &mut impl Rng) -> Atom {
    let f = setup.field();
    if setup.n >= 2 && rng.gen_bool(0.5) {
        let (i, j) = random_pair(rng, setup.n);
        Atom::Short {
            i,
            j,
            x: random_elem(f, rng),
        }
    } else {
        let i = random_hb(rng, setup.n);
        let h = random_param(setup, i, rng);
        Atom::Extra { i, x: h.x, y: h.y }
    }
}

pub fn random_word(setup: &FormSetup, len: usize, rng: &mut impl Rng) -> EWord {
    EWord((0..len).map(|_| random_atom(setup, rng)).collect())
}

/// Outcome of one relation family.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RelationOutcome {
    pub name: &'static str,
    pub passed: usize,
    pub failed: usize,
    pub first_counterexample: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RelationReport {
    pub seed: u64,
    pub samples: usize,
    pub outcomes: Vec<RelationOutcome>,
}

impl RelationReport {
    pub fn all_pass(&self) -> bool {
        self.outcomes.iter().all(|o| o.failed == 0)
    }
}

impl fmt::Display for RelationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "seed={} samples={}", self.seed, self.samples)?;
        for o in &self.outcomes {
            write!(f, "{:<8} pass={:<5} fail={}", o.name, o.passed, o.failed)?;
            if let Some(c) = &o.first_counterexample {
                write!(f, "  first counterexample: {c}")?;
            }
            writeln!(f)?;
        }
        Ok(())
    }
}

/// Names of the checked relation families, in report order.
pub const RELATIONS: [&str; 16] = [
    "S1", "S2", "S3", "S4", "S5", "E1", "E2", "E3", "SE1", "SE2", "D-i", "D-ii", "D-iii", "P-i", "P-ii", "P-iii",
];

/// One sampled instance: `None` when no admissible indices exist at this rank,
/// otherwise the two sides (or an error building either) and a description.
type Instance = Option<(Result<(UMatrix, UMatrix), ElemError>, String)>;

fn sample(setup: &FormSetup, name: &str, rng: &mut ChaCha8Rng) -> Instance {
    let f = setup.field();
    let n = setup.n;
    let t = |i, j, x| transvection_short(setup, i, j, x);
    let tx = |i, h: HPair| transvection_extra(setup, i, h.x, h.y);
    let lp = |e: i32| setup.lambda_pow(e);
    let pick = |rng: &mut ChaCha8Rng, need: usize, ok: &dyn Fn(&[i32]) -> bool| -> Option<Vec<i32>> {
        for _ in 0..1000 {
            let v: Vec<i32> = (0..need).map(|_| random_hb(rng, n)).collect();
            if ok(&v) {
                return Some(v);
            }
        }
        None
    };
    let distinct = |i: i32, j: i32| i != j && i != -j;
    macro_rules! go {
        ($desc:expr, $body:expr) => {{
            let r: Result<(UMatrix, UMatrix), ElemError> = (|| $body)();
            Some((r, $desc))
        }};
    }
    match name {
        "S1" => {
            let v = pick(rng, 2, &|v| distinct(v[0], v[1]))?;
            let (i, j, x) = (v[0], v[1], random_elem(f, rng));
            go!(format!("i={i} j={j} x={}", f.format_elem(x)), {
                Ok((t(i, j, x)?, t(-j, -i, f.neg(short_companion(setup, i, j, x)))?))
            })
        }
        "S2" => {
            let v = pick(rng, 2, &|v| distinct(v[0], v[1]))?;
            let (i, j) = (v[0], v[1]);
            let (x, y) = (random_elem(f, rng), random_elem(f, rng));
            go!(format!("i={i} j={j} x={} y={}", f.format_elem(x), f.format_elem(y)), {
                Ok((t(i, j, x)?.mul(f, &t(i, j, y)?), t(i, j, f.add(x, y))?))
            })
        }
        "S3" => {
            let v = pick(rng, 4, &|v| {
                let (i, j, k, l) = (v[0], v[1], v[2], v[3]);
                distinct(i, j) && distinct(k, l) && k != j && k != -i && l != i && l != -j
            })?;
            let (x, y) = (random_elem(f, rng), random_elem(f, rng));
            go!(format!("ijkl={v:?} x={} y={}", f.format_elem(x), f.format_elem(y)), {
                let c = commutator(f, &t(v[0], v[1], x)?, &t(v[2], v[3], y)?);
                Ok((c, UMatrix::identity(n)))
            })
        }
        "S4" => {
            let v = pick(rng, 3, &|v| {
                distinct(v[0], v[1]) && distinct(v[1], v[2]) && distinct(v[0], v[2])
            })?;
            let (i, j, k) = (v[0], v[1], v[2]);
            let (x, y) = (random_elem(f, rng), random_elem(f, rng));
            go!(
                format!("i={i} j={j} k={k} x={} y={}", f.format_elem(x), f.format_elem(y)),
                { Ok((commutator(f, &t(i, j, x)?, &t(j, k, y)?), t(i, k, f.mul(x, y))?)) }
            )
        }
        "S5" => {
            let v = pick(rng, 2, &|v| distinct(v[0], v[1]))?;
            let (i, j) = (v[0], v[1]);
            let (x, y) = (random_elem(f, rng), random_elem(f, rng));
            go!(format!("i={i} j={j} x={} y={}", f.format_elem(x), f.format_elem(y)), {
                let rhs_y = f.sub(
                    f.mul(x, y),
                    f.mul(
                        f.mul(f.mul(lp((-1 - eps(i)) / 2), f.involute(y)), f.involute(x)),
                        lp((1 - eps(i)) / 2),
                    ),
                );
                Ok((
                    commutator(f, &t(i, j, x)?, &t(j, -i, y)?),
                    tx(i, HPair::new(Elem::ZERO, rhs_y))?,
                ))
            })
        }
        "E1" => {
            let i = random_hb(rng, n);
            let (a, b) = (random_param(setup, i, rng), random_param(setup, i, rng));
            go!(
                format!("i={i} a={} b={}", setup.format_pair(a), setup.format_pair(b)),
                {
                    let sum = setup.h_add(extra_sign(i), a, b);
                    Ok((tx(i, a)?.mul(f, &tx(i, b)?), tx(i, sum)?))
                }
            )
        }
        "E2" => {
            let v = pick(rng, 2, &|v| distinct(v[0], v[1]))?;
            let (i, j) = (v[0], v[1]);
            let (a, b) = (random_param(setup, i, rng), random_param(setup, j, rng));
            go!(
                format!("i={i} j={j} a={} b={}", setup.format_pair(a), setup.format_pair(b)),
                {
                    let c = f.neg(f.mul(f.mul(f.mul(lp(-(1 + eps(i)) / 2), f.involute(a.x)), setup.mu()), b.x));
                    Ok((commutator(f, &tx(i, a)?, &tx(j, b)?), t(i, -j, c)?))
                }
            )
        }
        "E3" => {
            let i = random_hb(rng, n);
            let (a, b) = (random_param(setup, i, rng), random_param(setup, i, rng));
            go!(
                format!("i={i} a={} b={}", setup.format_pair(a), setup.format_pair(b)),
                {
                    let mu = setup.mu();
                    let inner = f.sub(
                        f.mul(f.mul(f.involute(a.x), mu), b.x),
                        f.mul(f.mul(f.involute(b.x), mu), a.x),
                    );
                    let y = f.neg(f.mul(lp(-(1 + eps(i)) / 2), inner));
                    Ok((commutator(f, &tx(i, a)?, &tx(i, b)?), tx(i, HPair::new(Elem::ZERO, y))?))
                }
            )
        }
        "SE1" => {
            let v = pick(rng, 3, &|v| distinct(v[0], v[1]) && v[2] != v[1] && v[2] != -v[0])?;
            let (i, j, k) = (v[0], v[1], v[2]);
            let x = random_elem(f, rng);
            let h = random_param(setup, k, rng);
            go!(
                format!("i={i} j={j} k={k} x={} h={}", f.format_elem(x), setup.format_pair(h)),
                { Ok((commutator(f, &t(i, j, x)?, &tx(k, h)?), UMatrix::identity(n))) }
            )
        }
        "SE2" => {
            let v = pick(rng, 2, &|v| distinct(v[0], v[1]))?;
            let (i, j) = (v[0], v[1]);
            let x = random_elem(f, rng);
            let h = random_param(setup, j, rng);
            go!(
                format!("i={i} j={j} x={} h={}", f.format_elem(x), setup.format_pair(h)),
                {
                    let c = short_companion(setup, i, j, x);
                    let rhs =
                        t(j, -i, f.mul(h.y, c))?.mul(f, &tx(i, HPair::new(f.mul(h.x, c), f.mul(f.mul(x, h.y), c)))?);
                    Ok((commutator(f, &t(i, j, x)?, &tx(j, h)?), rhs))
                }
            )
        }
        "D-i" | "D-ii" => {
            let v = pick(rng, 3, &|v| {
                distinct(v[0], v[1]) && distinct(v[2], v[0]) && distinct(v[2], v[1])
            })?;
            let (i, j, k) = (v[0], v[1], v[2]);
            let (a, x) = (random_unit(f, rng), random_elem(f, rng));
            go!(
                format!("i={i} j={j} k={k} a={} x={}", f.format_elem(a), f.format_elem(x)),
                {
                    if name == "D-i" {
                        Ok((
                            conj(f, &diag_closed(setup, i, k, a)?, &t(i, j, x)?),
                            t(i, j, f.mul(a, x))?,
                        ))
                    } else {
                        Ok((
                            conj(f, &diag_closed(setup, k, j, a)?, &t(i, j, x)?),
                            t(i, j, f.mul(x, a))?,
                        ))
                    }
                }
            )
        }
        "D-iii" => {
            let v = pick(rng, 2, &|v| distinct(v[0], v[1]))?;
            let (i, k) = (v[0], v[1]);
            let a = random_unit(f, rng);
            let h = random_param(setup, i, rng);
            go!(
                format!("i={i} k={k} a={} h={}", f.format_elem(a), setup.format_pair(h)),
                {
                    let s = (eps(i) + 1) / 2;
                    let z = f.mul(f.mul(f.mul(f.mul(lp(-s), f.involute(a)), lp(s)), h.y), a);
                    let lhs = conj(f, &diag_closed(setup, -i, k, f.inv(a).unwrap())?, &tx(i, h)?);
                    Ok((lhs, tx(i, HPair::new(f.mul(h.x, a), z))?))
                }
            )
        }
        "P-i" | "P-ii" => {
            let v = pick(rng, 3, &|v| {
                distinct(v[0], v[1]) && distinct(v[2], v[0]) && distinct(v[2], v[1])
            })?;
            let (i, j, k) = (v[0], v[1], v[2]);
            let x = random_elem(f, rng);
            go!(format!("i={i} j={j} k={k} x={}", f.format_elem(x)), {
                if name == "P-i" {
                    Ok((conj(f, &perm_closed(setup, k, i)?, &t(i, j, x)?), t(k, j, x)?))
                } else {
                    Ok((conj(f, &perm_closed(setup, k, j)?, &t(i, j, x)?), t(i, k, x)?))
                }
            })
        }
        "P-iii" => {
            let v = pick(rng, 2, &|v| distinct(v[0], v[1]))?;
            let (i, k) = (v[0], v[1]);
            let h = random_param(setup, i, rng);
            go!(format!("i={i} k={k} h={}", setup.format_pair(h)), {
                let z = f.mul(lp((eps(i) - eps(k)) / 2), h.y);
                let lhs = conj(f, &perm_closed(setup, -k, -i)?, &tx(i, h)?);
                Ok((lhs, tx(k, HPair::new(h.x, z))?))
            })
        }
        _ => unreachable!("unknown relation {name}"),
    }
}

/// Samples every relation family `samples` times with independent streams derived from `seed`.
pub fn check_relations(setup: &FormSetup, samples: usize, seed: u64) -> RelationReport {
    let outcomes = RELATIONS
        .iter()
        .enumerate()
        .map(|(idx, &name)| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(idx as u64);
            let mut out = RelationOutcome {
                name,
                passed: 0,
                failed: 0,
                first_counterexample: None,
            };
            for _ in 0..samples {
                let Some((res, desc)) = sample(setup, name, &mut rng) else {
                    break;
                };
                let ok = matches!(&res, Ok((l, r)) if l == r);
                if ok {
                    out.passed += 1;
                } else {
                    out.failed += 1;
                    if out.first_counterexample.is_none() {
                        let why = match res {
                            Err(e) => format!("{desc} ({e})"),
                            Ok(_) => desc,
                        };
                        out.first_counterexample = Some(why);
                    }
                }
            }
            out
        })
        .collect();
    RelationReport {
        seed,
        samples,
        outcomes,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::presets;
    use crate::unitary::is_member;

    #[test]
    fn short_examples() {
        let s = presets::sp2(3);
        let m = transvection_short(&s, 1, -2, Elem::ONE).unwrap();
        let mut expect = UMatrix::identity(3);
        expect.set(1, -2, Elem::ONE);
        expect.set(2, -1, Elem::ONE);
        assert_eq!(m, expect);
        assert!(transvection_short(&s, 1, 2, Elem::ZERO).unwrap().is_identity());
        assert!(matches!(
            transvection_short(&s, 1, -1, Elem::ONE),
            Err(ElemError::BadIndices { .. })
        ));

        let g = presets::gf5_symplectic(3);
        let f = g.field();
        let m = transvection_short(&g, 1, 2, f.from_int(2)).unwrap();
        let mut expect = UMatrix::identity(3);
        expect.set(1, 2, f.from_int(2));
        expect.set(-2, -1, f.from_int(3));
        assert_eq!(m, expect);
    }

    #[test]
    fn extra_examples() {
        let p = presets::pr2(3);
        let m = transvection_extra(&p, 1, Elem::ONE, Elem::ZERO).unwrap();
        let mut expect = UMatrix::identity(3);
        expect.set(0, -1, Elem::ONE);
        assert_eq!(m, expect);

        let s = presets::sp2(3);
        let m = transvection_extra(&s, 1, Elem::ZERO, Elem::ONE).unwrap();
        let mut expect = UMatrix::identity(3);
        expect.set(1, -1, Elem::ONE);
        assert_eq!(m, expect);
        assert!(matches!(
            transvection_extra(&s, 1, Elem::ONE, Elem::ZERO),
            Err(ElemError::ParameterNotInDelta { .. })
        ));
    }

    #[test]
    fn diag_example_gf5() {
        let g = presets::gf5_symplectic(3);
        let f = g.field();
        let (m, w) = build_diag(&g, 1, 2, f.from_int(2)).unwrap();
        let diag: Vec<i64> = (0..7).map(|p| m.at(p, p).code() as i64).collect();
        // storage order 1,2,3,0,-3,-2,-1: (-2,-2) = bar(2) = 2, (-1,-1) = bar(2)^-1 = 3
        assert_eq!(diag, vec![2, 3, 1, 1, 1, 2, 3]);
        assert_eq!(m.get(-1, -1), f.from_int(3));
        assert_eq!(m.get(-2, -2), f.from_int(2));
        assert!(is_member(&g, &m));
        assert_eq!(eval_word(&g, &w).unwrap(), m);
        assert!(diag_closed(&g, 1, 2, Elem::ONE).unwrap().is_identity());
        assert_eq!(build_diag(&g, 1, 2, Elem::ZERO), Err(ElemError::ZeroScalar));
    }

    #[test]
    fn perm_examples() {
        let g = presets::gf5_symplectic(3);
        let f = g.field();
        let p12 = perm_closed(&g, 1, 2).unwrap();
        assert_eq!(p12.get(-2, -1), f.from_int(4));
        assert!(p12.mul(f, &perm_closed(&g, 2, 1).unwrap()).is_identity());
        let s = presets::sp2(3);
        let p13 = perm_closed(&s, 1, 3).unwrap();
        assert_eq!(p13.col(1), crate::unitary::UVector::basis(3, 3));
        let w = EWord(vec![
            Atom::Short {
                i: 1,
                j: 2,
                x: Elem::ONE,
            },
            Atom::Short {
                i: 2,
                j: 1,
                x: f.neg(Elem::ONE),
            },
            Atom::Short {
                i: 1,
                j: 2,
                x: Elem::ONE,
            },
        ]);
        assert_eq!(eval_word(&g, &w).unwrap(), p12);
        assert!(eval_word(&g, &EWord::empty()).unwrap().is_identity());
    }

    #[test]
    fn relation_examples() {
        let g = presets::gf5_symplectic(3);
        let f = g.field();
        let a = transvection_short(&g, 1, 2, f.from_int(2)).unwrap();
        let b = transvection_short(&g, 2, 3, f.from_int(3)).unwrap();
        assert_eq!(commutator(f, &a, &b), transvection_short(&g, 1, 3, Elem::ONE).unwrap());
        let c = transvection_short(&g, 1, 2, f.from_int(3)).unwrap();
        assert!(a.mul(f, &c).is_identity());
        let p = presets::pr2(3);
        let t = transvection_extra(&p, 1, Elem::ONE, Elem::ZERO).unwrap();
        assert!(t.mul(p.field(), &t).is_identity());
    }

    #[test]
    fn relations_hold_small() {
        for s in [presets::sp2(3), presets::gf9_unitary(3), presets::o3(3)] {
            let r = check_relations(&s, 30, 11);
            assert!(r.all_pass(), "{r}");
            assert!(r.outcomes.iter().all(|o| o.passed == 30));
        }
    }

    #[test]
    fn inverse_atoms_and_words() {
        let s = presets::gf9_unitary(3);
        let f = s.field();
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..20 {
            let w = random_word(&s, 12, &mut rng);
            let m = eval_word(&s, &w).unwrap();
            assert!(is_member(&s, &m));
            let mi = eval_word(&s, &word_inverse(&s, &w)).unwrap();
            assert!(m.mul(f, &mi).is_identity());
        }
    }

    #[test]
    fn generator_count_sp2() {
        let s = presets::sp2(3);
        // 6*4 short index pairs, one unit; 6 long roots (0,1).
        assert_eq!(all_generators(&s).len(), 24 + 6);
    }
}
