//! Graph-edge complexity.
//!
//! An expression is lowered to an interaction graph: inputs feed interaction
//! cells, interactions feed each other, and the last cell feeds one output
//! node. Complexity is the number of edges in that graph.
//!
//! Lowering rules:
//! * affine wrappers `a*x + b` around an input are absorbed into the input's
//!   weight and bias;
//! * the output node absorbs any affine wrapper around the root;
//! * addends of a sum carry free weights, and a sum's constant terms are
//!   absorbed when at least one addend is an input;
//! * a pure scale passes through products and quotients;
//! * any other affine wrapper around an interaction becomes an explicit
//!   `linear` cell (one edge);
//! * n-ary sums and products become n - 1 binary cells (two edges each),
//!   unary cells cost one edge;
//! * a categorical lookup is an input followed by a `cat` cell (one edge);
//! * variable-free subtrees are constants and never produce edges unless the
//!   whole expression is constant.

use crate::expr::{BinaryOp, Expr, UnaryOp};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum NodeKind {
    Input,
    Constant,
    Interaction,
    Output,
}

#[derive(Clone, Debug, PartialEq)]
pub struct GraphNode {
    pub label: String,
    pub kind: NodeKind,
}

/// Lowered interaction graph; edges point from producer to consumer.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct Graph {
    pub nodes: Vec<GraphNode>,
    pub edges: Vec<(usize, usize)>,
}

impl Graph {
    fn add(&mut self, label: impl Into<String>, kind: NodeKind) -> usize {
        self.nodes.push(GraphNode {
            label: label.into(),
            kind,
        });
        self.nodes.len() - 1
    }

    fn cell(&mut self, label: &str, inputs: &[usize]) -> usize {
        let id = self.add(label, NodeKind::Interaction);
        for &i in inputs {
            self.edges.push((i, id));
        }
        id
    }
}

#[derive(Clone, Copy, PartialEq, Eq, Debug)]
enum Position {
    Root,
    Addend,
    /// Operand of a product or quotient: a pure scale passes through.
    Factor,
    /// Operand of a unary interaction.
    Argument,
}

struct Peeled<'a> {
    scale: bool,
    offset: bool,
    core: &'a Expr,
}

fn peel(mut e: &Expr) -> Peeled<'_> {
    let mut scale = false;
    let mut offset = false;
    loop {
        match e {
            Expr::Binary(BinaryOp::Add, l, r) => {
                if l.is_constant_expr() {
                    offset = true;
                    e = r;
                } else if r.is_constant_expr() {
                    offset = true;
                    e = l;
                } else {
                    break;
                }
            }
            Expr::Binary(BinaryOp::Sub, l, r) => {
                if r.is_constant_expr() {
                    offset = true;
                    e = l;
                } else if l.is_constant_expr() {
                    offset = true;
                    scale = true;
                    e = r;
                } else {
                    break;
                }
            }
            Expr::Binary(BinaryOp::Mul, l, r) => {
                if l.is_constant_expr() {
                    scale = true;
                    e = r;
                } else if r.is_constant_expr() {
                    scale = true;
                    e = l;
                } else {
                    break;
                }
            }
            Expr::Binary(BinaryOp::Div, l, r) if r.is_constant_expr() && !l.is_constant_expr() => {
                scale = true;
                e = l;
            }
            Expr::Unary(UnaryOp::Neg, c) if !c.is_constant_expr() => {
                scale = true;
                e = c;
            }
            _ => break,
        }
    }
    Peeled { scale, offset, core: e }
}

fn is_input(core: &Expr) -> bool {
    matches!(core, Expr::Feature(_) | Expr::CategoryMap { .. })
}

fn is_sum(core: &Expr) -> bool {
    matches!(core, Expr::Binary(BinaryOp::Add | BinaryOp::Sub, l, r) if !l.is_constant_expr() && !r.is_constant_expr())
}

fn is_product(core: &Expr) -> bool {
    matches!(core, Expr::Binary(BinaryOp::Mul, l, r) if !l.is_constant_expr() && !r.is_constant_expr())
}

/// Flattens a sum into its non-constant addends; returns whether a constant
/// term appeared anywhere in the chain.
fn collect_addends<'a>(core: &'a Expr, out: &mut Vec<Peeled<'a>>) -> bool {
    let mut offset = false;
    for child in core.children() {
        if child.is_constant_expr() {
            offset = true;
            continue;
        }
        let p = peel(child);
        offset |= p.offset;
        if is_sum(p.core) {
            offset |= collect_addends(p.core, out);
        } else {
            out.push(p);
        }
    }
    offset
}

fn collect_factors<'a>(core: &'a Expr, out: &mut Vec<Peeled<'a>>) {
    for child in core.children() {
        if child.is_constant_expr() {
            continue;
        }
        let p = peel(child);
        if !p.offset && is_product(p.core) {
            collect_factors(p.core, out);
        } else {
            out.push(p);
        }
    }
}

fn chain(g: &mut Graph, label: &str, operands: Vec<usize>) -> usize {
    let mut it = operands.into_iter();
    let mut acc = it.next().expect("chain needs an operand");
    for next in it {
        acc = g.cell(label, &[acc, next]);
    }
    acc
}

fn build(g: &mut Graph, p: Peeled<'_>, pos: Position) -> usize {
    let core = p.core;
    let mut offset = p.offset;
    let (node, absorbs_scale, absorbs_offset) = match core {
        Expr::Feature(name) => (g.add(name.as_str(), NodeKind::Input), true, true),
        Expr::CategoryMap { name, .. } => {
            let input = g.add(name.as_str(), NodeKind::Input);
            (g.cell("cat", &[input]), true, true)
        }
        Expr::Binary(BinaryOp::Add | BinaryOp::Sub, ..) if is_sum(core) => {
            let mut addends = Vec::new();
            offset |= collect_addends(core, &mut addends);
            let has_input = addends.iter().any(|a| is_input(a.core));
            let ids = addends.into_iter().map(|a| build(g, a, Position::Addend)).collect();
            (chain(g, "add", ids), true, has_input)
        }
        Expr::Binary(BinaryOp::Mul, ..) if is_product(core) => {
            let mut factors = Vec::new();
            collect_factors(core, &mut factors);
            let ids = factors.into_iter().map(|f| build(g, f, Position::Factor)).collect();
            (chain(g, "mul", ids), false, false)
        }
        Expr::Binary(BinaryOp::Div, l, r) if l.is_constant_expr() => {
            let arg = build(g, peel(r), Position::Argument);
            (g.cell("inv", &[arg]), false, false)
        }
        Expr::Binary(BinaryOp::Div, l, r) => {
            let a = build(g, peel(l), Position::Factor);
            let b = build(g, peel(r), Position::Factor);
            (g.cell("div", &[a, b]), false, false)
        }
        Expr::Unary(op, c) => {
            let arg = build(g, peel(c), Position::Argument);
            (g.cell(op.name(), &[arg]), false, false)
        }
        // Only reached when the whole expression is variable-free.
        _ => {
            let label = crate::expr::eval_constant(core).map_or_else(|| "const".to_string(), |v| format!("{v}"));
            (g.add(label, NodeKind::Constant), true, true)
        }
    };
    let needs_linear = match pos {
        Position::Root | Position::Addend => false,
        Position::Factor => offset && !absorbs_offset,
        Position::Argument => (p.scale && !absorbs_scale) || (offset && !absorbs_offset),
    };
    if needs_linear {
        g.cell("linear", &[node])
    } else {
        node
    }
}

/// Lowers `expr` to its interaction graph, ending in a single output node.
pub fn lower(expr: &Expr) -> Graph {
    let mut g = Graph::default();
    let root = if expr.is_constant_expr() {
        let label = crate::expr::eval_constant(expr).map_or_else(|| "const".to_string(), |v| format!("{v}"));
        g.add(label, NodeKind::Constant)
    } else {
        build(&mut g, peel(expr), Position::Root)
    };
    let out = g.add("output", NodeKind::Output);
    g.edges.push((root, out));
    g
}

/// Number of edges in the lowered graph.
pub fn complexity(expr: &Expr) -> usize {
    lower(expr).edges.len()
}

fn escape(label: &str) -> String {
    label.replace('\\', "\\\\").replace('"', "\\\"")
}

/// Graphviz DOT rendering of the lowered graph.
pub fn to_dot(expr: &Expr) -> String {
    let g = lower(expr);
    let mut out = String::from("digraph expression {\n  rankdir=LR;\n");
    for (i, n) in g.nodes.iter().enumerate() {
        let shape = match n.kind {
            NodeKind::Input => "box",
            NodeKind::Constant => "plaintext",
            NodeKind::Interaction => "ellipse",
            NodeKind::Output => "doublecircle",
        };
        out.push_str(&format!("  n{i} [label=\"{}\", shape={shape}];\n", escape(&n.label)));
    }
    for (a, b) in &g.edges {
        out.push_str(&format!("  n{a} -> n{b};\n"));
    }
    out.push_str("}\n");
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn x() -> Expr {
        Expr::feature("x")
    }
    fn y() -> Expr {
        Expr::feature("y")
    }
    fn c(v: f64) -> Expr {
        Expr::constant(v)
    }

    #[test]
    fn terminals_cost_one() {
        assert_eq!(complexity(&x()), 1);
        assert_eq!(complexity(&c(3.0)), 1);
        assert_eq!(complexity(&Expr::add(Expr::mul(c(2.0), x()), c(1.0))), 1);
    }

    #[test]
    fn weighted_sum_of_two() {
        let e = Expr::add(
            Expr::add(
                Expr::mul(c(0.26), Expr::feature("w")),
                Expr::mul(c(-0.69), Expr::feature("h")),
            ),
            c(128.1),
        );
        assert_eq!(complexity(&e), 3);
    }

    #[test]
    fn subtraction_of_two_features_is_an_interaction() {
        assert_eq!(complexity(&Expr::sub(x(), y())), 3);
        assert_eq!(complexity(&Expr::sub(x(), c(1.0))), 1);
    }

    #[test]
    fn offset_around_product_inside_product_costs_a_linear_cell() {
        let inner = Expr::mul(x(), y());
        let plain = Expr::mul(Expr::feature("z"), inner.clone());
        let scaled = Expr::mul(Expr::feature("z"), Expr::mul(c(3.0), inner.clone()));
        let shifted = Expr::mul(Expr::feature("z"), Expr::add(inner, c(1.0)));
        assert_eq!(complexity(&plain), 5);
        assert_eq!(complexity(&scaled), 5);
        assert_eq!(complexity(&shifted), 6);
    }

    #[test]
    fn root_affine_is_free() {
        let f = Expr::unary(UnaryOp::Exp, Expr::mul(x(), y()));
        let wrapped = Expr::add(Expr::mul(c(-4.0), f.clone()), c(9.0));
        assert_eq!(complexity(&f), complexity(&wrapped));
    }

    #[test]
    fn categorical_lookup_costs_an_extra_edge() {
        let g = Expr::category_map("g", [("a", 1.0), ("b", 2.0)]);
        assert_eq!(complexity(&g), 2);
        assert_eq!(complexity(&Expr::mul(g, x())), 4);
    }

    #[test]
    fn dot_edges_match_complexity() {
        let e = Expr::div(
            Expr::feature("w"),
            Expr::unary(UnaryOp::Square, Expr::mul(c(0.01), Expr::feature("h"))),
        );
        let dot = to_dot(&e);
        assert_eq!(dot.matches("->").count(), complexity(&e));
        assert_eq!(complexity(&e), 4);
        let single = to_dot(&Expr::feature("BMXWT"));
        assert_eq!(single.matches("->").count(), 1);
        assert_eq!(single.matches("[label=").count(), 2);
    }

    #[test]
    fn reassociated_sums_agree() {
        let a = Expr::add(Expr::add(x(), y()), Expr::feature("z"));
        let b = Expr::add(x(), Expr::add(y(), Expr::feature("z")));
        assert_eq!(complexity(&a), complexity(&b));
        assert_eq!(complexity(&a), 5);
    }
}
