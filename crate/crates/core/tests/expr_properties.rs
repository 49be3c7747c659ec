mod common;

use std::collections::BTreeMap;

use common::expr::{self as oracle, tree};
use proptest::prelude::*;
use symreg_core::complexity::{complexity, to_dot};
use symreg_core::model::{load_model, save_model};
use symreg_core::{Expr, ModelDocument};

#[test]
fn print_then_parse_evaluates_identically() {
    oracle::print_then_parse_evaluates_identically(1000);
}

#[test]
fn simplify_preserves_values() {
    oracle::simplify_preserves_values(300);
}

#[test]
fn expand_preserves_values() {
    oracle::expand_preserves_values(300);
}

#[test]
fn derivative_matches_finite_differences() {
    oracle::derivative_matches_finite_differences(100);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(1000))]

    #[test]
    fn dot_output_is_valid(e in tree()) {
        let dot = to_dot(&e);
        prop_assert!(graphviz_rust::parse(&dot).is_ok(), "{}", dot);
        prop_assert_eq!(dot.matches("->").count(), complexity(&e));
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(300))]

    #[test]
    fn documents_round_trip(e in tree(), tr in -1.0f64..1.0, te in -1.0f64..1.0, seed in any::<u64>(), notes in ".{0,20}") {
        // The document format stores one table per column.
        let mut first = None;
        e.visit(&mut |n| if let Expr::CategoryMap { table, .. } = n { first.get_or_insert_with(|| table.clone()); });
        let e = match first {
            Some(t) => unify(&e, &t),
            None => e,
        };
        let doc = ModelDocument::from_expr(&e, tr, te, seed, notes);
        let back = ModelDocument::from_json(&doc.to_json()).unwrap();
        prop_assert_eq!(&back, &doc);
        prop_assert_eq!(back.metrics.train_r2.to_bits(), tr.to_bits());
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("m.json");
        save_model(&doc, &path).unwrap();
        prop_assert_eq!(load_model(&path).unwrap(), doc);
    }
}

fn unify(e: &Expr, table: &BTreeMap<String, f64>) -> Expr {
    match e {
        Expr::CategoryMap { name, .. } => Expr::CategoryMap {
            name: name.clone(),
            table: table.clone(),
        },
        Expr::Unary(op, c) => Expr::unary(*op, unify(c, table)),
        Expr::Binary(op, l, r) => Expr::binary(*op, unify(l, table), unify(r, table)),
        t => t.clone(),
    }
}
