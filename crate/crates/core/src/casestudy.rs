//! Reference values for the NHANES body-fat case study: published model
//! formulas with their complexities and scores, cohort descriptive
//! statistics, and the gender-average profiles used for counterfactuals.

use std::collections::BTreeMap;

use crate::model::{Metrics, ModelDocument};
use crate::parser::parse;
use crate::symbolic::Binding;

#[derive(Clone, Copy, Debug)]
pub struct ReferenceModel {
    pub name: &'static str,
    /// Formula as typeset, modulo line continuations.
    pub formula: &'static str,
    pub features: &'static [&'static str],
    pub max_complexity: Option<usize>,
    pub complexity: usize,
    pub train_r2: f64,
    pub test_r2: f64,
}

const WT_HT: &[&str] = &["BMXWT", "BMXHT"];
const BODY: &[&str] = &["BMXWT", "BMXHT", "BMXLEG", "BMXARML", "BMXARMC", "BMXWAIST", "BMXHIP"];
const ALL: &[&str] = &[
    "RIAGENDR", "RIDAGEYR", "BMXWT", "BMXHT", "BMXLEG", "BMXARML", "BMXARMC", "BMXWAIST", "BMXHIP",
];
const ALL_CAT: &[&str] = &[
    "GENDER", "RIDAGEYR", "BMXWT", "BMXHT", "BMXLEG", "BMXARML", "BMXARMC", "BMXWAIST", "BMXHIP",
];

pub const GENDER_TABLE: &str = "cases{Male: -0.2514210227924248, Female: 0.24145479395502106}(GENDER)";

pub const SR_MODEL_4: &str = "43.3409 - 10.0751*(2.23561 - 0.0130747(BMXWAIST))\
*(0.0174372(BMXWAIST) + (0.0306655(BMXHIP) - 5.21981)*(0.019191(BMXWAIST) - 0.0146988(BMXWT) - 2.03625) \
+ (cases{Male: -0.2514210227924248, Female: 0.24145479395502106}(GENDER) - 0.164541)\
*(1.19881*(2.62601 - 0.0694562(BMXARMC))*(4.57897 - 0.0338513(BMXHT)) + 2.14167) - 3.16342)";

pub const REFERENCE_MODELS: [ReferenceModel; 8] = [
    ReferenceModel {
        name: "Baseline 1",
        formula: "0.264311(BMXWT) -0.696876(BMXHT) + 128.138627",
        features: WT_HT,
        max_complexity: None,
        complexity: 3,
        train_r2: 0.563,
        test_r2: 0.590,
    },
    ReferenceModel {
        name: "Baseline 2",
        formula: "0.733466*(BMXWT/(0.01(BMXHT))^2) + 12.084282",
        features: WT_HT,
        max_complexity: None,
        complexity: 4,
        train_r2: 0.329,
        test_r2: 0.358,
    },
    ReferenceModel {
        name: "Baseline 3",
        formula: "-0.312160(BMXWT) -0.237978(BMXHT) -0.109314(BMXLEG) + 0.003146(BMXARML) -0.123752(BMXARMC) \
+ 0.248836(BMXWAIST) + 0.635005(BMXHIP) + 15.689953",
        features: BODY,
        max_complexity: None,
        complexity: 13,
        train_r2: 0.737,
        test_r2: 0.776,
    },
    ReferenceModel {
        name: "Baseline 4",
        formula: "-0.169817(BMXWT) -0.103678(BMXHT) + 0.075362(BMXLEG) - 0.046780(BMXARML) + 0.069824(BMXARMC) \
+ 0.318612(BMXWAIST) + 0.249766(BMXHIP) + 8.675876(RIAGENDR) + 0.007782(RIDAGEYR) -1.087157",
        features: ALL,
        max_complexity: None,
        complexity: 17,
        train_r2: 0.820,
        test_r2: 0.843,
    },
    ReferenceModel {
        name: "SR Model 1",
        formula: "0.264355(BMXWT) - 0.697227(BMXHT) + 128.221",
        features: WT_HT,
        max_complexity: Some(3),
        complexity: 3,
        train_r2: 0.563,
        test_r2: 0.590,
    },
    ReferenceModel {
        name: "SR Model 2",
        formula: "- 0.711635*BMXHT + 20.7829*sqrt(0.0338353*BMXWT - 1) + 125.119",
        features: WT_HT,
        max_complexity: Some(4),
        complexity: 4,
        train_r2: 0.569,
        test_r2: 0.603,
    },
    ReferenceModel {
        name: "SR Model 3",
        formula: "533.592*exp(-0.0382652(BMXWAIST))*(1.34147 - 0.0076698(BMXHT) - 0.0124393(BMXLEG) \
+ (0.0731049(BMXWAIST) - 3.98442)*(0.0212026(BMXHIP) - 0.012399(BMXWT) - 1.35696)) + 44.9658",
        features: BODY,
        max_complexity: Some(13),
        complexity: 12,
        train_r2: 0.791,
        test_r2: 0.833,
    },
    ReferenceModel {
        name: "SR Model 4",
        formula: SR_MODEL_4,
        features: ALL_CAT,
        max_complexity: Some(17),
        complexity: 17,
        train_r2: 0.856,
        test_r2: 0.879,
    },
];

impl ReferenceModel {
    pub fn document(&self) -> ModelDocument {
        let expr = parse(self.formula).expect("reference formula parses");
        let mut doc = ModelDocument::from_expr(&expr, self.train_r2, self.test_r2, 0, self.name);
        doc.features = self.features.iter().map(|s| s.to_string()).collect();
        doc.expression = self.formula.to_string();
        doc.metrics = Metrics {
            complexity: self.complexity,
            train_r2: self.train_r2,
            test_r2: self.test_r2,
        };
        doc
    }
}

pub fn reference(name: &str) -> Option<&'static ReferenceModel> {
    REFERENCE_MODELS.iter().find(|m| m.name.eq_ignore_ascii_case(name))
}

/// Path of the bracketed sum `0.0174372*WAIST + f + (...) - 3.16342` inside
/// [`SR_MODEL_4`] as parsed.
pub const SR4_SUM_PATH: [usize; 2] = [1, 1];
/// Path of `f` (the hip x waist/weight product) inside [`SR_MODEL_4`].
pub const SR4_F_PATH: [usize; 5] = [1, 1, 0, 0, 1];

/// Subcomponents `f` and `g` of SR Model 4 written out explicitly.
pub const SR4_F: &str = "(0.019191(BMXWAIST) - 0.0146988(BMXWT) - 2.03625)*(0.0306655(BMXHIP) - 5.21981)";
pub const SR4_G: &str =
    "0.0174372(BMXWAIST) + (cases{Male: -0.2514210227924248, Female: 0.24145479395502106}(GENDER) - 0.164541)\
*(1.19881*(2.62601 - 0.0694562(BMXARMC))*(4.57897 - 0.0338513(BMXHT)) + 2.14167) - 3.16342";

/// Average adult female measurements.
pub fn female_profile() -> Binding {
    Binding::new()
        .value("BMXWT", 73.95)
        .value("BMXHT", 160.46)
        .value("BMXARMC", 31.87)
        .value("BMXHIP", 106.13)
        .category("GENDER", "Female")
}

/// Average adult male measurements.
pub fn male_profile() -> Binding {
    Binding::new()
        .value("BMXWT", 85.97)
        .value("BMXHT", 173.19)
        .value("BMXARMC", 34.33)
        .value("BMXHIP", 102.95)
        .category("GENDER", "Male")
}

/// Published affine approximations (slope, intercept) of the waist
/// derivative of SR Model 4 for the female and male profiles.
pub const FEMALE_WAIST_SLOPE: (f64, f64) = (-0.0053, 0.866);
pub const MALE_WAIST_SLOPE: (f64, f64) = (-0.0058, 0.882);

/// Waist circumference range of the cohort (cm).
pub const WAIST_RANGE: (f64, f64) = (56.4, 154.9);

pub const COHORT_ROWS: usize = 2403;
pub const COHORT_MALE: usize = 1158;
pub const COHORT_FEMALE: usize = 1245;

/// Published descriptive statistics: mean, std, min, 25%, 50%, 75%, max.
pub fn cohort_stats() -> BTreeMap<&'static str, [f64; 7]> {
    BTreeMap::from([
        ("RIDAGEYR", [38.1, 12.6, 18.0, 27.0, 38.0, 49.0, 59.0]),
        ("BMXWT", [79.7, 20.4, 36.2, 64.9, 76.9, 91.9, 176.5]),
        ("BMXHT", [166.6, 9.3, 138.3, 159.4, 166.5, 173.8, 190.2]),
        ("BMXLEG", [39.5, 3.6, 26.0, 37.0, 39.5, 42.0, 50.0]),
        ("BMXARML", [37.0, 2.7, 29.6, 35.0, 37.0, 39.0, 45.5]),
        ("BMXARMC", [33.1, 5.1, 20.7, 29.4, 32.9, 36.4, 52.7]),
        ("BMXWAIST", [96.0, 16.3, 56.4, 83.8, 94.7, 106.4, 154.9]),
        ("BMXHIP", [104.6, 12.8, 77.8, 95.5, 102.7, 111.6, 168.5]),
        ("DXDTOPF", [33.1, 8.6, 12.1, 27.1, 32.9, 40.2, 56.1]),
    ])
}
