//! Levels of conjugacy classes and principal congruence subgroups.
//!
//! Over a form field there are at most three odd form ideals: `(0,0)`,
//! `(0, K x 0)` (only when `mu = 0` and `K x 0` lies in `Delta`) and `(K, Delta)`.

use std::fmt;

use thiserror::Error;

use crate::elementary::{extra_sign, Atom};
use crate::field::Elem;
use crate::form_ring::{FormSetup, HPair, Sign};
use crate::unitary::{check_member, form_q, theta_hb, NonMember, UMatrix};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum LevelError {
    #[error("not a group member: {0}")]
    NotMember(NonMember),
    #[error("internal invariant violated: {0}")]
    InternalInvariant(String),
}

/// The generator that forced a classification.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Witness {
    /// `sigma_{ij}`, `i != j` hyperbolic.
    Entry { i: i32, j: i32, x: Elem },
    /// `sigma_{ii} - sigma_{jj}`.
    DiagDiff { i: i32, j: i32, x: Elem },
    /// `sigma_{i0} J(Delta)`.
    MiddleColumn { i: i32, x: Elem },
    /// `bar(J(Delta)) mu sigma_{0j}`.
    MiddleRow { j: i32, x: Elem },
    /// `bar(J(Delta)) mu (sigma_{00} - sigma_{jj}) J(Delta)`.
    MiddleDiag { j: i32, x: Elem },
    /// `Q(sigma_{*j})`.
    ColumnQ { j: i32, q: HPair },
    /// `(Q(sigma_{*0}) - (1,0)) o y + (y,z) - (y,z) o sigma_{ii}`.
    MiddleQ { i: i32, yz: HPair, value: HPair },
}

impl Witness {
    pub fn describe(&self, setup: &FormSetup) -> String {
        let f = setup.field();
        let e = |x: Elem| f.format_elem(x);
        match self {
            Witness::Entry { i, j, x } => format!("sigma[{i},{j}] = {}", e(*x)),
            Witness::DiagDiff { i, j, x } => format!("sigma[{i},{i}] - sigma[{j},{j}] = {}", e(*x)),
            Witness::MiddleColumn { i, x } => format!("sigma[{i},0] = {}", e(*x)),
            Witness::MiddleRow { j, x } => format!("mu * sigma[0,{j}] = {}", e(*x)),
            Witness::MiddleDiag { j, x } => format!("mu * (sigma[0,0] - sigma[{j},{j}]) = {}", e(*x)),
            Witness::ColumnQ { j, q } => format!("Q(sigma[*,{j}]) = {}", setup.format_pair(*q)),
            Witness::MiddleQ { i, yz, value } => format!(
                "middle Q term at i={i}, (y,z)={} gives {}",
                setup.format_pair(*yz),
                setup.format_pair(*value)
            ),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum LevelClass {
    Zero,
    TLevel { witness: Witness },
    Full { witness: Witness },
}

impl LevelClass {
    pub fn name(&self) -> &'static str {
        match self {
            LevelClass::Zero => "Zero",
            LevelClass::TLevel { .. } => "TLevel",
            LevelClass::Full { .. } => "Full",
        }
    }

    pub fn witness(&self) -> Option<&Witness> {
        match self {
            LevelClass::Zero => None,
            LevelClass::TLevel { witness } | LevelClass::Full { witness } => Some(witness),
        }
    }

    pub fn ideal(&self) -> OddFormIdeal {
        match self {
            LevelClass::Zero => OddFormIdeal::Zero,
            LevelClass::TLevel { .. } => OddFormIdeal::KTimesZero,
            LevelClass::Full { .. } => OddFormIdeal::Full,
        }
    }
}

/// One of the field-case odd form ideals `(I, Omega)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum OddFormIdeal {
    /// `(0, 0)`.
    Zero,
    /// `(0, K x 0)`.
    KTimesZero,
    /// `(K, Delta)`.
    Full,
}

impl fmt::Display for OddFormIdeal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            OddFormIdeal::Zero => "(0,0)",
            OddFormIdeal::KTimesZero => "(0,Kx0)",
            OddFormIdeal::Full => "(K,Delta)",
        })
    }
}

impl OddFormIdeal {
    pub fn ideal_is_k(self) -> bool {
        self == OddFormIdeal::Full
    }

    /// Whether this ideal exists for the setup.
    pub fn admissible(self, setup: &FormSetup) -> bool {
        self != OddFormIdeal::KTimesZero || setup.admits_tlevel()
    }

    /// Ideals of the setup strictly smaller than `self`.
    pub fn strictly_smaller(self, setup: &FormSetup) -> Vec<OddFormIdeal> {
        [OddFormIdeal::Zero, OddFormIdeal::KTimesZero, OddFormIdeal::Full]
            .into_iter()
            .filter(|&o| o < self && o.admissible(setup))
            .collect()
    }

    /// Membership in `Omega^{sign}`.
    pub fn omega_contains(self, setup: &FormSetup, sign: Sign, h: HPair) -> bool {
        match self {
            OddFormIdeal::Zero => h.is_zero(),
            OddFormIdeal::KTimesZero => h.y.is_zero(),
            OddFormIdeal::Full => setup.param(sign).contains(h),
        }
    }

    pub fn ideal_contains(self, x: Elem) -> bool {
        self.ideal_is_k() || x.is_zero()
    }
}

/// The level of the class of `sigma`, with the generator that forced it.
pub fn level_of(setup: &FormSetup, sigma: &UMatrix) -> Result<LevelClass, LevelError> {
    check_member(setup, sigma).map_err(LevelError::NotMember)?;
    let f = setup.field();
    let n = setup.n;
    let j_nonzero = setup.j_is_field();
    let mu = setup.mu();
    let hb: Vec<i32> = theta_hb(n).collect();

    for &i in &hb {
        for &j in &hb {
            if i != j && !sigma.get(i, j).is_zero() {
                return Ok(LevelClass::Full {
                    witness: Witness::Entry {
                        i,
                        j,
                        x: sigma.get(i, j),
                    },
                });
            }
        }
    }
    for &i in &hb {
        for &j in &hb {
            let d = f.sub(sigma.get(i, i), sigma.get(j, j));
            if i != j && !d.is_zero() {
                return Ok(LevelClass::Full {
                    witness: Witness::DiagDiff { i, j, x: d },
                });
            }
        }
    }
    if j_nonzero {
        for &i in &hb {
            if !sigma.get(i, 0).is_zero() {
                return Ok(LevelClass::Full {
                    witness: Witness::MiddleColumn { i, x: sigma.get(i, 0) },
                });
            }
        }
        if !mu.is_zero() {
            for &j in &hb {
                let x = f.mul(mu, sigma.get(0, j));
                if !x.is_zero() {
                    return Ok(LevelClass::Full {
                        witness: Witness::MiddleRow { j, x },
                    });
                }
            }
            for &j in &hb {
                let x = f.mul(mu, f.sub(sigma.get(0, 0), sigma.get(j, j)));
                if !x.is_zero() {
                    return Ok(LevelClass::Full {
                        witness: Witness::MiddleDiag { j, x },
                    });
                }
            }
        }
    }

    let mut z_witness = None;
    let mut check_z = |w: Witness, h: HPair| -> Result<(), LevelError> {
        if h.is_zero() {
            return Ok(());
        }
        if !h.y.is_zero() || !setup.admits_tlevel() {
            return Err(LevelError::InternalInvariant(format!(
                "nonzero Z generator outside the admissible ideals: {}",
                w.describe(setup)
            )));
        }
        if z_witness.is_none() {
            z_witness = Some(w);
        }
        Ok(())
    };
    for &j in &hb {
        let q = form_q(setup, &sigma.col(j));
        check_z(Witness::ColumnQ { j, q }, q)?;
    }
    let plus = Sign::Plus;
    let q0 = setup.h_sub(plus, form_q(setup, &sigma.col(0)), HPair::new(Elem::ONE, Elem::ZERO));
    for &i in &hb {
        let sii = sigma.get(i, i);
        for &yz in setup.delta.members() {
            let v = setup.h_sub(
                plus,
                setup.h_add(plus, setup.h_scale(plus, q0, yz.x), yz),
                setup.h_scale(plus, yz, sii),
            );
            check_z(Witness::MiddleQ { i, yz, value: v }, v)?;
        }
    }
    Ok(match z_witness {
        Some(witness) => LevelClass::TLevel { witness },
        None => LevelClass::Zero,
    })
}

/// Membership in the principal congruence subgroup of level `ideal`.
pub fn in_congruence(setup: &FormSetup, sigma: &UMatrix, ideal: OddFormIdeal) -> Result<bool, LevelError> {
    check_member(setup, sigma).map_err(LevelError::NotMember)?;
    let n = setup.n;
    if !ideal.ideal_is_k() {
        for i in theta_hb(n) {
            for j in theta_hb(n) {
                let e = if i == j { Elem::ONE } else { Elem::ZERO };
                if sigma.get(i, j) != e {
                    return Ok(false);
                }
            }
        }
    }
    for j in theta_hb(n) {
        if !ideal.omega_contains(setup, Sign::Plus, form_q(setup, &sigma.col(j))) {
            return Ok(false);
        }
    }
    let plus = Sign::Plus;
    let q0 = setup.h_sub(plus, form_q(setup, &sigma.col(0)), HPair::new(Elem::ONE, Elem::ZERO));
    for &a in &setup.j_delta {
        if !ideal.omega_contains(setup, plus, setup.h_scale(plus, q0, a)) {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Whether a short or extra short generator is `(I, Omega)`-elementary.
pub fn is_ideal_elementary(setup: &FormSetup, atom: &Atom, ideal: OddFormIdeal) -> bool {
    match *atom {
        Atom::Short { x, .. } => ideal.ideal_contains(x),
        Atom::Extra { i, x, y } => ideal.omega_contains(setup, extra_sign(i), HPair::new(x, y)),
        Atom::Diag { .. } | Atom::Perm { .. } => false,
    }
}
