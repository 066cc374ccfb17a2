use oddu_core::elementary::{
    atom_matrix, build_diag, build_perm, commutator, conj, eval_word, extra_sign, random_atom, random_word,
    transvection_extra, transvection_short, Atom,
};
use oddu_core::factor::{factor_extra, factor_short, verify_certificate};
use oddu_core::level::{in_congruence, level_of, LevelClass};
use oddu_core::presets;
use oddu_core::sharpness::{min_product_length, orbit_bfs, DEFAULT_FRONTIER_CAP, DEFAULT_ORBIT_CAP};
use oddu_core::unitary::{form_b, is_member, member_oracle, polarity, theta};
use oddu_core::{Elem, FormSetup, HPair, Sign, UMatrix, UVector};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const NAMES: [&str; 8] = ["sp2", "pr2", "pr4", "pr8", "gf5", "gf9", "tz2", "o3"];

fn setup(name: &str, n: usize) -> FormSetup {
    presets::by_name(name, n).unwrap()
}

fn name() -> impl Strategy<Value = &'static str> {
    prop::sample::select(NAMES.to_vec())
}

fn sign() -> impl Strategy<Value = Sign> {
    prop::bool::ANY.prop_map(|b| if b { Sign::Plus } else { Sign::Minus })
}

fn elem(s: &FormSetup, code: usize) -> Elem {
    s.field().from_code(code % s.field().size()).unwrap()
}

fn pair(s: &FormSetup, a: usize, b: usize) -> HPair {
    HPair::new(elem(s, a), elem(s, b))
}

fn random_hb(rng: &mut impl Rng, n: usize) -> i32 {
    let k = rng.gen_range(1..=n as i32);
    if rng.gen_bool(0.5) {
        k
    } else {
        -k
    }
}

fn random_unit(s: &FormSetup, rng: &mut impl Rng) -> Elem {
    let units: Vec<Elem> = s.field().units().collect();
    units[rng.gen_range(0..units.len())]
}

fn random_member(s: &FormSetup, sign: Sign, rng: &mut impl Rng) -> HPair {
    let m = s.param(sign).members();
    m[rng.gen_range(0..m.len())]
}

/// `lambda^{e/2}` for even `e`.
fn lam_half(s: &FormSetup, e: i32) -> Elem {
    assert_eq!(e % 2, 0);
    s.lambda_pow(e / 2)
}

fn eps(i: i32) -> i32 {
    Sign::of(i).value()
}

#[test]
fn involution_axioms_exhaustive() {
    for nm in NAMES {
        let s = setup(nm, 1);
        let f = s.field();
        assert_eq!(f.involute(f.one()), f.one());
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
fn enumeration_is_complete() {
    for nm in NAMES {
        let s = setup(nm, 1);
        let f = s.field();
        let all: std::collections::HashSet<Elem> = f.elements().collect();
        assert_eq!(all.len(), (f.characteristic() as usize).pow(f.degree()));
        assert_eq!(all.len(), f.size());
    }
}

#[test]
fn heisenberg_group_axioms_exhaustive() {
    for nm in NAMES {
        let s = setup(nm, 1);
        let all: Vec<HPair> = s.universe().collect();
        for sg in [Sign::Plus, Sign::Minus] {
            for &a in &all {
                assert_eq!(s.h_add(sg, HPair::ZERO, a), a);
                assert_eq!(s.h_add(sg, a, HPair::ZERO), a);
                assert_eq!(s.h_add(sg, a, s.h_neg(sg, a)), HPair::ZERO);
                assert_eq!(s.h_add(sg, s.h_neg(sg, a), a), HPair::ZERO);
            }
            if all.len() <= 16 {
                for &a in &all {
                    for &b in &all {
                        for &c in &all {
                            assert_eq!(s.h_add(sg, s.h_add(sg, a, b), c), s.h_add(sg, a, s.h_add(sg, b, c)));
                        }
                    }
                }
            }
        }
    }
}

#[test]
fn parameters_lie_between_min_and_max() {
    for nm in NAMES {
        let s = setup(nm, 1);
        let f = s.field();
        for sg in [Sign::Plus, Sign::Minus] {
            let p = s.param(sg);
            assert!(p.contains(HPair::ZERO));
            for h in s.delta_min_members(sg) {
                assert!(p.contains(h), "{nm}: min member {h:?} missing");
            }
            for &h in p.members() {
                assert!(s.trace(sg, h).is_zero(), "{nm}: {h:?} outside max");
                for c in f.elements() {
                    assert!(p.contains(s.h_scale(sg, h, c)));
                }
                for &g in p.members() {
                    assert!(p.contains(s.h_add(sg, h, g)));
                }
            }
        }
    }
}

#[test]
fn sign_flip_duality() {
    for nm in NAMES {
        let s = setup(nm, 1);
        let f = s.field();
        for h in s.universe() {
            let flipped = HPair::new(h.x, f.involute(h.y));
            assert_eq!(
                s.param(Sign::Plus).contains(h),
                s.param(Sign::Minus).contains(flipped),
                "{nm} {h:?}"
            );
        }
    }
}

#[test]
fn polarity_matches_form_on_basis() {
    for nm in NAMES {
        let s = setup(nm, 3);
        let f = s.field();
        for i in theta(3) {
            let u = UVector::basis(3, i);
            let t = polarity(&s, &u);
            for j in theta(3) {
                let v = UVector::basis(3, j);
                assert_eq!(t.dot(f, &v), form_b(&s, &u, &v));
            }
        }
    }
}

#[test]
fn diag_and_perm_words_match_closed_forms() {
    for nm in ["sp2", "gf5", "gf9", "pr4"] {
        let s = setup(nm, 3);
        let f = s.field();
        for i in [1, 2, 3, -1, -2, -3] {
            for j in [1, 2, 3, -1, -2, -3] {
                if i == j || i == -j {
                    continue;
                }
                let (pm, pw) = build_perm(&s, i, j).unwrap();
                assert_eq!(eval_word(&s, &pw).unwrap(), pm);
                for x in f.units() {
                    let (dm, dw) = build_diag(&s, i, j, x).unwrap();
                    assert_eq!(eval_word(&s, &dw).unwrap(), dm);
                }
            }
        }
    }
}

#[test]
fn involution_orbits_are_inverse_closed_in_char_2() {
    let s = presets::sp2(3);
    let t = transvection_extra(&s, 1, Elem::ZERO, Elem::ONE).unwrap();
    assert!(orbit_bfs(&s, &t, DEFAULT_ORBIT_CAP).unwrap().closed_under_inverse);
    let s = presets::pr2(2);
    let t = transvection_short(&s, 1, 2, Elem::ONE).unwrap();
    assert!(t.mul(s.field(), &t).is_identity());
    assert!(orbit_bfs(&s, &t, DEFAULT_ORBIT_CAP).unwrap().closed_under_inverse);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn trace_is_module_homomorphism(nm in name(), sg in sign(), a in 0usize..512, b in 0usize..512,
                                    c in 0usize..512, d in 0usize..512, e in 0usize..512) {
        let s = setup(nm, 1);
        let f = s.field();
        let (h, g, k) = (pair(&s, a, b), pair(&s, c, d), elem(&s, e));
        prop_assert_eq!(s.trace(sg, s.h_add(sg, h, g)), f.add(s.trace(sg, h), s.trace(sg, g)));
        let scaled = f.mul(f.mul(f.involute(k), s.trace(sg, h)), k);
        prop_assert_eq!(s.trace(sg, s.h_scale(sg, h, k)), scaled);
    }

    #[test]
    fn membership_agrees_with_oracle(nm in name(), n in 1usize..=3, seed in any::<u64>()) {
        let s = setup(nm, n);
        let f = s.field();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let m = eval_word(&s, &random_word(&s, 5, &mut rng)).unwrap();
        prop_assert!(is_member(&s, &m));
        prop_assert!(member_oracle(&s, &m));
        let mut bad = m.clone();
        let i = random_hb(&mut rng, n);
        let j = theta(n).nth(rng.gen_range(0..2 * n + 1)).unwrap();
        bad.add_at(f, i, j, random_unit(&s, &mut rng));
        prop_assert_eq!(is_member(&s, &bad), member_oracle(&s, &bad));
    }

    #[test]
    fn group_closure(nm in name(), n in 1usize..=3, seed in any::<u64>()) {
        let s = setup(nm, n);
        let f = s.field();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let a = eval_word(&s, &random_word(&s, 4, &mut rng)).unwrap();
        let b = eval_word(&s, &random_word(&s, 4, &mut rng)).unwrap();
        prop_assert!(is_member(&s, &a.mul(f, &b)));
        prop_assert!(is_member(&s, &a.inverse(f).unwrap()));
    }

    #[test]
    fn polarity_matches_form_on_random_pairs(nm in name(), seed in any::<u64>()) {
        let s = setup(nm, 3);
        let f = s.field();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut vec = || UVector::from_storage(3, (0..7).map(|_| random_unit(&s, &mut rng)).collect());
        let (u, v) = (vec(), vec());
        prop_assert_eq!(polarity(&s, &u).dot(f, &v), form_b(&s, &u, &v));
    }

    #[test]
    fn short_duality(nm in name(), seed in any::<u64>()) {
        let s = setup(nm, 3);
        let f = s.field();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let i = random_hb(&mut rng, 3);
        let j = loop {
            let j = random_hb(&mut rng, 3);
            if j != i && j != -i {
                break j;
            }
        };
        let x = random_unit(&s, &mut rng);
        let y = f.mul(f.mul(lam_half(&s, eps(j) - 1), f.involute(x)), lam_half(&s, 1 - eps(i)));
        prop_assert_eq!(
            transvection_short(&s, i, j, x).unwrap(),
            transvection_short(&s, -j, -i, f.neg(y)).unwrap()
        );
    }

    #[test]
    fn diag_and_perm_preserve_extra_parameters(nm in name(), seed in any::<u64>()) {
        let s = setup(nm, 3);
        let f = s.field();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let i = random_hb(&mut rng, 3);
        let k = loop {
            let k = random_hb(&mut rng, 3);
            if k != i && k != -i {
                break k;
            }
        };
        let h = random_member(&s, extra_sign(i), &mut rng);
        let t = transvection_extra(&s, i, h.x, h.y).unwrap();

        let a = random_unit(&s, &mut rng);
        let ai = f.inv(a).unwrap();
        let e = eps(i);
        let z = f.mul(
            f.mul(f.mul(lam_half(&s, -(e + 1)), f.involute(a)), lam_half(&s, e + 1)),
            f.mul(h.y, a),
        );
        let scaled = HPair::new(f.mul(h.x, a), z);
        prop_assert!(s.param(extra_sign(i)).contains(scaled));
        let (d, _) = build_diag(&s, -i, k, ai).unwrap();
        prop_assert_eq!(conj(f, &d, &t), transvection_extra(&s, i, scaled.x, scaled.y).unwrap());

        let moved = HPair::new(h.x, f.mul(lam_half(&s, e - eps(k)), h.y));
        prop_assert!(s.param(extra_sign(k)).contains(moved));
        let (p, _) = build_perm(&s, -k, -i).unwrap();
        prop_assert_eq!(conj(f, &p, &t), transvection_extra(&s, k, moved.x, moved.y).unwrap());
    }

    #[test]
    fn levels_of_transvections(nm in name(), n in 1usize..=3, seed in any::<u64>()) {
        let s = setup(nm, n);
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let i = random_hb(&mut rng, n);
        let x = random_unit(&s, &mut rng);
        if n >= 2 {
            let j = loop {
                let j = random_hb(&mut rng, n);
                if j != i && j != -i {
                    break j;
                }
            };
            let t = transvection_short(&s, i, j, x).unwrap();
            prop_assert_eq!(level_of(&s, &t).unwrap().name(), "Full");
        }
        let sg = extra_sign(i);
        if s.param(sg).contains(HPair::new(Elem::ZERO, x)) {
            let t = transvection_extra(&s, i, Elem::ZERO, x).unwrap();
            prop_assert_eq!(level_of(&s, &t).unwrap().name(), "Full");
        }
        if s.admits_tlevel() {
            let t = transvection_extra(&s, i, x, Elem::ZERO).unwrap();
            prop_assert_eq!(level_of(&s, &t).unwrap().name(), "TLevel");
        }
    }

    #[test]
    fn level_is_conjugation_invariant_and_consistent(nm in name(), n in 1usize..=3, seed in any::<u64>()) {
        let s = setup(nm, n);
        let f = s.field();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let sigma = atom_matrix(&s, &random_atom(&s, &mut rng)).unwrap();
        let l = level_of(&s, &sigma).unwrap();
        let ideal = l.ideal();
        prop_assert!(in_congruence(&s, &sigma, ideal).unwrap());
        for smaller in ideal.strictly_smaller(&s) {
            prop_assert!(!in_congruence(&s, &sigma, smaller).unwrap());
        }
        let tau = eval_word(&s, &random_word(&s, 4, &mut rng)).unwrap();
        let c = conj(f, &tau, &sigma);
        prop_assert_eq!(level_of(&s, &c).unwrap().ideal(), ideal);
        prop_assert!(in_congruence(&s, &c, ideal).unwrap());
    }

    #[test]
    fn commutator_expansion(nm in name(), seed in any::<u64>()) {
        let s = setup(nm, 3);
        let f = s.field();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut pick = || eval_word(&s, &random_word(&s, 3, &mut rng)).unwrap();
        let (a, b, z) = (pick(), pick(), pick());
        let zi = z.inverse(f).unwrap();
        let lhs = commutator(f, &b, &commutator(f, &a, &z));
        let rhs = conj(f, &b.mul(f, &a), &z).mul(f, &conj(f, &b, &zi)).mul(f, &z).mul(f, &conj(f, &a, &zi));
        prop_assert_eq!(lhs, rhs);
    }

    #[test]
    fn certificates_survive_global_conjugation(nm in prop::sample::select(vec!["sp2", "gf5", "gf9", "o3"]),
                                               seed in any::<u64>()) {
        let s = setup(nm, 3);
        let f = s.field();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let sigma = loop {
            let m = eval_word(&s, &random_word(&s, 5, &mut rng)).unwrap();
            if matches!(level_of(&s, &m).unwrap(), LevelClass::Full { .. }) {
                break m;
            }
        };
        let i = random_hb(&mut rng, 3);
        let cw = if rng.gen_bool(0.5) {
            let j = loop {
                let j = random_hb(&mut rng, 3);
                if j != i && j != -i {
                    break j;
                }
            };
            let cw = factor_short(&s, &sigma, i, j, random_unit(&s, &mut rng)).unwrap();
            prop_assert!(cw.len() <= 4);
            cw
        } else {
            let h = loop {
                let h = random_member(&s, extra_sign(i), &mut rng);
                if !h.is_zero() {
                    break h;
                }
            };
            let cw = factor_extra(&s, &sigma, i, h).unwrap();
            prop_assert!(cw.len() <= 12);
            cw
        };
        prop_assert!(verify_certificate(&s, &cw));
        let rho = random_word(&s, 3, &mut rng);
        let moved = cw.conjugated_by(&s, &rho).unwrap();
        prop_assert!(verify_certificate(&s, &moved));
        prop_assert_eq!(&moved.target, &conj(f, &eval_word(&s, &rho).unwrap(), &cw.target));
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(6))]

    #[test]
    fn search_is_consistent_with_factorization(seed in any::<u64>()) {
        let s = presets::sp2(3);
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let base = transvection_extra(&s, 1, Elem::ZERO, Elem::ONE).unwrap();
        let orbit = orbit_bfs(&s, &base, DEFAULT_ORBIT_CAP).unwrap();
        let i = random_hb(&mut rng, 3);
        let j = loop {
            let j = random_hb(&mut rng, 3);
            if j != i && j != -i {
                break j;
            }
        };
        let cw = factor_short(&s, &base, i, j, Elem::ONE).unwrap();
        let target: UMatrix = atom_matrix(&s, &Atom::Short { i, j, x: Elem::ONE }).unwrap();
        let r = min_product_length(&s, &orbit, &target, cw.len(), DEFAULT_FRONTIER_CAP).unwrap();
        prop_assert!(r.found_m.is_some_and(|m| m <= cw.len()));
        prop_assert_eq!(r.witness_product(s.field(), &orbit), target);
    }
}
