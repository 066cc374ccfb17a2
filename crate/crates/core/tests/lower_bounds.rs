use oddu_core::sharpness::{check_thm2, check_thm4_lower, DEFAULT_FRONTIER_CAP, DEFAULT_ORBIT_CAP};

#[test]
fn symplectic_gf2_class_needs_three_or_four() {
    let r = check_thm2(3, DEFAULT_ORBIT_CAP, 4, DEFAULT_FRONTIER_CAP).unwrap();
    println!("{r}{}", r.summary());
    assert_eq!(r.orbit_size, 63);
    assert!(r.inverse_closed);
    assert!(!r.in_c);
    assert!(!r.in_cc);
    assert!(matches!(r.min_m, Some(3 | 4)));
    assert!(r.passed());
}

#[test]
fn tlevel_lower_bounds() {
    let r = check_thm4_lower(DEFAULT_ORBIT_CAP, DEFAULT_FRONTIER_CAP).unwrap();
    println!("{r}{}", r.summary());
    assert!(r.passed(), "{r}");
}
