//! Named setups used throughout the tests and the CLI.

use crate::field::{validate_scalars, FieldCtx, InvolutionKind};
use crate::form_ring::{Descriptor, FormSetup, HermitianField};

#[allow(clippy::too_many_arguments)]
fn build(
    p: u32,
    k: u32,
    modulus: &[u32],
    inv: InvolutionKind,
    lambda: i64,
    mu: i64,
    delta: Descriptor,
    n: usize,
) -> FormSetup {
    let f = FieldCtx::new(p, k, modulus, inv).expect("preset field");
    let scalars = validate_scalars(&f, f.from_int(lambda), f.from_int(mu)).expect("preset scalars");
    FormSetup::new(HermitianField::new(f, scalars), delta, n).expect("preset setup")
}

/// Symplectic data over GF(2): `lambda = 1`, `mu = 1`, `Delta = Delta_max = 0 x K`.
pub fn sp2(n: usize) -> FormSetup {
    build(2, 1, &[0, 1], InvolutionKind::Identity, 1, 1, Descriptor::Max, n)
}

/// Proctor's odd symplectic data over GF(2): `mu = 0`, `Delta = K x K`.
pub fn pr2(n: usize) -> FormSetup {
    build(2, 1, &[0, 1], InvolutionKind::Identity, 1, 0, Descriptor::Max, n)
}

/// Proctor data over GF(4) = GF(2)[t]/(t^2+t+1).
pub fn pr4(n: usize) -> FormSetup {
    build(2, 2, &[1, 1, 1], InvolutionKind::Identity, 1, 0, Descriptor::Max, n)
}

/// Proctor data over GF(8) = GF(2)[t]/(t^3+t+1).
pub fn pr8(n: usize) -> FormSetup {
    build(2, 3, &[1, 1, 0, 1], InvolutionKind::Identity, 1, 0, Descriptor::Max, n)
}

/// GF(5) with `lambda = 4`, `mu = 0`, `Delta = 0 x K` (which is `Delta_min` here).
pub fn gf5_symplectic(n: usize) -> FormSetup {
    build(5, 1, &[0, 1], InvolutionKind::Identity, 4, 0, Descriptor::Min, n)
}

/// Unitary data over GF(9) = GF(3)[t]/(t^2+1) with the Frobenius involution, `Delta = Delta_max`.
pub fn gf9_unitary(n: usize) -> FormSetup {
    build(
        3,
        2,
        &[1, 0, 1],
        InvolutionKind::FrobeniusHalf,
        1,
        1,
        Descriptor::Max,
        n,
    )
}

/// GF(2) with `mu = 0` and `Delta = K x 0`, so `(0,1)` is not in `Delta`.
pub fn tz2(n: usize) -> FormSetup {
    build(2, 1, &[0, 1], InvolutionKind::Identity, 1, 0, Descriptor::KTimesZero, n)
}

/// Orthogonal-flavoured data over GF(3): `lambda = 1`, `mu = 1`, `Delta = Delta_max`.
pub fn o3(n: usize) -> FormSetup {
    build(3, 1, &[0, 1], InvolutionKind::Identity, 1, 1, Descriptor::Max, n)
}

/// All presets by name.
pub fn by_name(name: &str, n: usize) -> Option<FormSetup> {
    Some(match name {
        "sp2" => sp2(n),
        "pr2" => pr2(n),
        "pr4" => pr4(n),
        "pr8" => pr8(n),
        "gf5" => gf5_symplectic(n),
        "gf9" => gf9_unitary(n),
        "tz2" => tz2(n),
        "o3" => o3(n),
        _ => return None,
    })
}

pub const NAMES: [&str; 8] = ["sp2", "pr2", "pr4", "pr8", "gf5", "gf9", "tz2", "o3"];

#[cfg(test)]
mod tests {
    use super::*;
    use crate::form_ring::HPair;

    #[test]
    fn all_presets_build() {
        for name in NAMES {
            let s = by_name(name, 3).unwrap();
            assert_eq!(s.n, 3);
        }
        assert!(by_name("nope", 3).is_none());
    }

    #[test]
    fn preset_parameters() {
        assert_eq!(sp2(3).delta.len(), 2);
        assert_eq!(pr2(3).delta.len(), 4);
        assert_eq!(pr8(3).delta.len(), 64);
        let g5 = gf5_symplectic(3);
        assert_eq!(g5.delta.len(), 5);
        assert!(g5.delta.members().iter().all(|h| h.x.is_zero()));
        let t = tz2(3);
        let f = t.field();
        assert!(t.delta.contains(HPair::new(f.one(), f.zero())));
        assert!(!t.delta.contains(HPair::new(f.zero(), f.one())));
        assert!(t.admits_tlevel());
        assert!(pr4(3).admits_tlevel());
        assert!(!sp2(3).admits_tlevel());
        assert_eq!(o3(3).delta.len(), 3);
    }
}
