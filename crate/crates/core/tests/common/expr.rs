use std::collections::BTreeMap;

use proptest::prelude::*;
use proptest::strategy::ValueTree;
use symreg_core::complexity::complexity;
use symreg_core::expr::eval_point;
use symreg_core::parser::{parse, print};
use symreg_core::symbolic::{differentiate, expand, simplify};
use symreg_core::{BinaryOp, Expr, UnaryOp};

use super::{check, runner};

fn leaf() -> impl Strategy<Value = Expr> {
    prop_oneof![
        Just(Expr::feature("x")),
        Just(Expr::feature("y")),
        (-5.0f64..5.0).prop_map(Expr::Constant),
        (-3.0f64..3.0, -3.0f64..3.0).prop_map(|(f, m)| Expr::category_map("G", [("F", f), ("M", m)])),
    ]
}

fn unary() -> impl Strategy<Value = UnaryOp> {
    prop::sample::select(UnaryOp::ALL.to_vec())
}

fn binary() -> impl Strategy<Value = BinaryOp> {
    prop::sample::select(vec![BinaryOp::Add, BinaryOp::Sub, BinaryOp::Mul, BinaryOp::Div])
}

fn grown(depth: u32, size: u32) -> impl Strategy<Value = Expr> {
    leaf().prop_recursive(depth, size, 2, |inner| {
        prop_oneof![
            (unary(), inner.clone()).prop_map(|(op, c)| Expr::unary(op, c)),
            (binary(), inner.clone(), inner).prop_map(|(op, l, r)| Expr::binary(op, l, r)),
        ]
    })
}

pub fn tree() -> impl Strategy<Value = Expr> {
    grown(5, 32)
}

/// Smaller trees keep the finite-difference oracle well conditioned.
fn smooth_tree() -> impl Strategy<Value = Expr> {
    grown(4, 20)
}

pub type Point = (BTreeMap<String, f64>, BTreeMap<String, String>);

pub fn point(x: f64, y: f64, male: bool) -> Point {
    let values = [("x".to_string(), x), ("y".to_string(), y)].into_iter().collect();
    let cats = [("G".to_string(), if male { "M" } else { "F" }.to_string())]
        .into_iter()
        .collect();
    (values, cats)
}

pub fn points() -> impl Strategy<Value = Vec<(f64, f64, bool)>> {
    prop::collection::vec((-4.0f64..4.0, -4.0f64..4.0, any::<bool>()), 100)
}

pub fn at(e: &Expr, p: &Point) -> f64 {
    eval_point(e, &p.0, &p.1).unwrap()
}

fn same_bits(a: f64, b: f64) -> bool {
    a.to_bits() == b.to_bits() || (a.is_nan() && b.is_nan())
}

/// Relative change of `e` under a 1e-12 relative nudge of every input.
/// Large values mean rounding differences between equivalent forms are
/// amplified, so a 1e-9 comparison there says nothing about correctness.
fn sensitivity(e: &Expr, p: &Point) -> f64 {
    let v = at(e, p);
    let mut q = p.clone();
    for x in q.0.values_mut() {
        *x *= 1.0 + 1e-12;
    }
    let w = at(e, &q);
    (v - w).abs() / v.abs().max(1e-300)
}

fn close(a: f64, b: f64, tol: f64) -> bool {
    (a - b).abs() <= tol * a.abs().max(b.abs()).max(1.0)
}

pub fn print_then_parse_evaluates_identically(cases: u32) {
    check(cases, (tree(), points()), |(e, pts)| {
        let back = parse(&print(&e)).unwrap();
        prop_assert_eq!(complexity(&back), complexity(&e));
        for &(x, y, m) in &pts {
            let p = point(x, y, m);
            prop_assert!(same_bits(at(&e, &p), at(&back, &p)), "{} at {:?}", print(&e), p);
        }
        Ok(())
    });
}

pub fn simplify_preserves_values(cases: u32) {
    check(cases, (tree(), points()), |(e, pts)| {
        let s = simplify(&e);
        prop_assert!(s.node_count() <= e.node_count());
        for &(x, y, m) in &pts {
            let p = point(x, y, m);
            let (a, b) = (at(&e, &p), at(&s, &p));
            if !a.is_finite() || sensitivity(&e, &p) > 1e-6 {
                continue;
            }
            prop_assert!(close(a, b, 1e-9), "{} -> {}: {} vs {}", print(&e), print(&s), a, b);
        }
        Ok(())
    });
}

pub fn expand_preserves_values(cases: u32) {
    check(cases, (tree(), points()), |(e, pts)| {
        let s = expand(&e);
        for &(x, y, m) in &pts {
            let p = point(x, y, m);
            let a = at(&e, &p);
            if !a.is_finite() || sensitivity(&e, &p) > 1e-6 {
                continue;
            }
            let b = at(&s, &p);
            // Expansion sums terms that the factored form never forms, so
            // cancellation is measured against the largest term.
            let scale = a.abs().max(b.abs()).max(1.0);
            prop_assert!(
                (a - b).abs() <= 1e-9 * scale || sensitivity(&s, &p) > 1e-6,
                "{} -> {}: {} vs {}",
                print(&e),
                print(&s),
                a,
                b
            );
        }
        Ok(())
    });
}

/// Five-point central difference of `e` in x.
fn central(e: &Expr, p: &Point, h: f64) -> f64 {
    let f = |d: f64| {
        let mut q = p.clone();
        *q.0.get_mut("x").unwrap() += d;
        at(e, &q)
    };
    (-f(2.0 * h) + 8.0 * f(h) - 8.0 * f(-h) + f(-2.0 * h)) / (12.0 * h)
}

/// Compares the symbolic derivative with finite differences on `trees`
/// trees of 100 points each; returns (checked, total) points.
pub fn derivative_matches_finite_differences(trees: usize) -> (usize, usize) {
    let mut runner = runner(1);
    let (mut checked, mut total, mut seen) = (0usize, 0usize, 0usize);
    while seen < trees {
        let e = smooth_tree().new_tree(&mut runner).unwrap().current();
        if !e.contains_variable("x") {
            continue;
        }
        seen += 1;
        let d = differentiate(&e, "x").unwrap();
        let pts = points().new_tree(&mut runner).unwrap().current();
        for (x, y, m) in pts {
            total += 1;
            let p = point(x, y, m);
            let analytic = at(&d, &p);
            let h = 1e-3 * x.abs().max(1.0);
            let (coarse, fine) = (central(&e, &p, h), central(&e, &p, h / 2.0));
            // Skip kinks, poles and domain edges: the two step sizes must
            // already agree far below the tolerance being tested.
            if !analytic.is_finite() || !coarse.is_finite() || !fine.is_finite() {
                continue;
            }
            // Rounding in f contributes about eps*|f|/h to the quotient.
            let rounding = f64::EPSILON * at(&e, &p).abs() / h;
            let scale = fine.abs().max(1e-3);
            if (coarse - fine).abs() > 1e-8 * scale || rounding > 1e-8 * scale || sensitivity(&e, &p) > 1e-8 {
                continue;
            }
            checked += 1;
            let rel = (analytic - fine).abs() / fine.abs().max(1e-3);
            assert!(
                rel < 1e-6,
                "d/dx {} = {} at {:?}: {} vs {}",
                print(&e),
                print(&d),
                p,
                analytic,
                fine
            );
        }
    }
    assert!(
        checked * 2 > total,
        "only {checked}/{total} points were well conditioned"
    );
    (checked, total)
}
