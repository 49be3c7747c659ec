use std::collections::BTreeMap;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use symreg_core::casestudy::*;
use symreg_core::complexity::{complexity, to_dot};
use symreg_core::expr::{eval_point, Expr};
use symreg_core::parser::{parse, print};
use symreg_core::symbolic::{affine_coefficients, differentiate, expand_terms, split_module, substitute, sweep};

pub fn sr4() -> Expr {
    parse(SR_MODEL_4).unwrap()
}

pub fn reference_complexities() -> Vec<usize> {
    let got: Vec<usize> = REFERENCE_MODELS
        .iter()
        .map(|m| complexity(&parse(m.formula).unwrap()))
        .collect();
    assert_eq!(got, [3, 4, 13, 17, 3, 4, 12, 17]);
    for m in &REFERENCE_MODELS {
        assert_eq!(complexity(&parse(m.formula).unwrap()), m.complexity, "{}", m.name);
        if let Some(budget) = m.max_complexity {
            assert!(m.complexity <= budget, "{}", m.name);
        }
    }
    got
}

pub fn reference_formulas_round_trip() {
    for m in &REFERENCE_MODELS {
        let e = parse(m.formula).unwrap();
        let again = parse(&print(&e)).unwrap();
        assert_eq!(e, again, "{}", m.name);
        assert_eq!(to_dot(&e).matches("->").count(), m.complexity);
    }
}

fn random_profile(rng: &mut ChaCha8Rng) -> (BTreeMap<String, f64>, String) {
    let stats = cohort_stats();
    let mut values = BTreeMap::new();
    for (name, s) in &stats {
        values.insert(name.to_string(), rng.random_range(s[2]..s[6]));
    }
    let g = if rng.random_bool(0.5) { "Male" } else { "Female" };
    (values, g.to_string())
}

/// Compares on `rows` random in-range profiles.
pub fn f_g_decomposition_recombines(rows: usize) {
    let e = sr4();
    let dec = split_module(&e, &SR4_SUM_PATH, &SR4_F_PATH).unwrap();
    assert_eq!(dec.coefficient, 1.0);
    let f_ref = parse(SR4_F).unwrap();
    let g_ref = parse(SR4_G).unwrap();
    let recombined = dec.recombine(&e).unwrap();
    let outer = |fg: f64, w: f64| 43.3409 - 10.0751 * (2.23561 - 0.0130747 * w) * fg;
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    for _ in 0..rows {
        let (vals, g) = random_profile(&mut rng);
        let cats = [("GENDER".to_string(), g)].into_iter().collect();
        let full = eval_point(&e, &vals, &cats).unwrap();
        let rec = eval_point(&recombined, &vals, &cats).unwrap();
        assert!((full - rec).abs() <= 1e-9 * full.abs().max(1.0), "{full} vs {rec}");
        let f = eval_point(&f_ref, &vals, &cats).unwrap();
        let gv = eval_point(&g_ref, &vals, &cats).unwrap();
        let by_parts = outer(f + gv, vals["BMXWAIST"]);
        assert!(
            (full - by_parts).abs() <= 1e-9 * full.abs().max(1.0),
            "{full} vs {by_parts}"
        );
        let f2 = eval_point(&dec.f, &vals, &cats).unwrap();
        let g2 = eval_point(&dec.g, &vals, &cats).unwrap();
        assert!((f - f2).abs() <= 1e-12 * f.abs().max(1.0));
        assert!((gv - g2).abs() <= 1e-9 * gv.abs().max(1.0));
    }
}

/// Returns the HIP*WAIST^2 coefficient and the constant term.
pub fn expanded_sr4_terms() -> (f64, f64) {
    let terms = expand_terms(&sr4());
    let hip_w2 = terms
        .iter()
        .find(|t| t.has_factors(&[("BMXHIP", 1), ("BMXWAIST", 2)]))
        .expect("HIP*WAIST^2 term");
    let rel = (hip_w2.coefficient - 7.75227e-5).abs() / 7.75227e-5;
    assert!(rel < 1e-6, "{} rel {rel}", hip_w2.coefficient);
    let constant = terms.iter().find(|t| t.is_constant()).expect("constant term");
    let rel = (constant.coefficient + 63.4491).abs() / 63.4491;
    assert!(rel < 1e-6, "{} rel {rel}", constant.coefficient);
    assert!(terms.last().unwrap().is_constant());
    (hip_w2.coefficient, constant.coefficient)
}

/// Returns (slope, intercept) for the female then male profile.
pub fn waist_derivative_by_gender() -> [(f64, f64); 2] {
    let d = differentiate(&sr4(), "BMXWAIST").unwrap();
    let (fs, fi) = affine_coefficients(&substitute(&d, &female_profile()).unwrap(), "BMXWAIST").unwrap();
    let (ms, mi) = affine_coefficients(&substitute(&d, &male_profile()).unwrap(), "BMXWAIST").unwrap();
    assert!((fs - FEMALE_WAIST_SLOPE.0).abs() <= 2e-4, "{fs}");
    assert!((fi - FEMALE_WAIST_SLOPE.1).abs() <= 2e-2, "{fi}");
    assert!((ms - MALE_WAIST_SLOPE.0).abs() <= 2e-4, "{ms}");
    assert!((mi - MALE_WAIST_SLOPE.1).abs() <= 2e-2, "{mi}");
    let female = sweep(&d, &female_profile(), "BMXWAIST", WAIST_RANGE, 200).unwrap();
    let male = sweep(&d, &male_profile(), "BMXWAIST", WAIST_RANGE, 200).unwrap();
    assert!(female.windows(2).all(|w| w[1].1 < w[0].1));
    assert!(female.iter().zip(&male).all(|(f, m)| f.1 > m.1));
    [(fs, fi), (ms, mi)]
}
