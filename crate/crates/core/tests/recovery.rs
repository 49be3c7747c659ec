//! Ground-truth recovery on synthetic targets.

mod common;

use common::recovery::{affine_scores, bmi_scores};

#[test]
fn affine_target_recovered() {
    let hits = affine_scores(10);
    for h in &hits {
        eprintln!("affine {:.8} {}", h.0, h.1);
    }
    let n = hits.iter().filter(|h| h.0 > 0.9999).count();
    assert!(n >= 9, "{n}/10 seeds reached R2 > 0.9999");
}

#[test]
fn bmi_target_recovered() {
    let hits = bmi_scores(10);
    for h in &hits {
        eprintln!("bmi {:.8} {}", h.0, h.1);
    }
    let n = hits.iter().filter(|h| h.0 > 0.999).count();
    assert!(n >= 7, "{n}/10 seeds reached R2 > 0.999");
}
