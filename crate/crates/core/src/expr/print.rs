use std::fmt;

use super::{BinOp, Expr};

fn precedence(e: &Expr) -> u8 {
    match e {
        Expr::Binary { op: BinOp::Add | BinOp::Sub, .. } => 1,
        Expr::Binary { op: BinOp::Mul | BinOp::Div, .. } => 2,
        Expr::Neg(_) => 3,
        Expr::Binary { op: BinOp::Pow, .. } => 4,
        Expr::Num(_) | Expr::Var { .. } | Expr::Call { .. } => 5,
    }
}

fn write_child(f: &mut fmt::Formatter<'_>, child: &Expr, parens: bool) -> fmt::Result {
    if parens {
        write!(f, "({child})")
    } else {
        write!(f, "{child}")
    }
}

/// Prints the grammar accepted by [`super::parse`] with the minimal parentheses
/// needed for the re-parsed tree to be structurally identical.
impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Expr::Num(v) => write!(f, "{v}"),
            Expr::Var { name, .. } => f.write_str(name),
            Expr::Call { func, arg } => write!(f, "{}({arg})", func.name()),
            Expr::Neg(inner) => {
                f.write_str("-")?;
                write_child(f, inner, precedence(inner) < 3)
            }
            Expr::Binary { op, lhs, rhs } => {
                let (level, sym) = match op {
                    BinOp::Add => (1, " + "),
                    BinOp::Sub => (1, " - "),
                    BinOp::Mul => (2, "*"),
                    BinOp::Div => (2, "/"),
                    BinOp::Pow => (4, "^"),
                };
                if *op == BinOp::Pow {
                    write_child(f, lhs, precedence(lhs) <= 4)?;
                    f.write_str(sym)?;
                    write_child(f, rhs, precedence(rhs) < 3)
                } else {
                    write_child(f, lhs, precedence(lhs) < level)?;
                    f.write_str(sym)?;
                    write_child(f, rhs, precedence(rhs) <= level)
                }
            }
        }
    }
}

impl Expr {
    /// Canonical text in which sums and products are flattened and their operands
    /// sorted, so expressions equal up to commutativity and associativity print alike.
    pub fn normalized(&self) -> String {
        normalized_sum(self).0
    }
}

/// Returns the canonical string and whether it needs parentheses as a factor.
fn normalized_sum(e: &Expr) -> (String, bool) {
    let mut terms = Vec::new();
    collect_terms(e, false, &mut terms);
    terms.sort_by(|a, b| a.1.cmp(&b.1).then(a.0.cmp(&b.0)));
    let mut out = String::new();
    for (i, (neg, body)) in terms.iter().enumerate() {
        match (i, neg) {
            (0, true) => out.push('-'),
            (0, false) => {}
            (_, true) => out.push_str(" - "),
            (_, false) => out.push_str(" + "),
        }
        out.push_str(body);
    }
    let compound = terms.len() > 1 || terms.first().is_some_and(|t| t.0);
    (out, compound)
}

fn collect_terms(e: &Expr, neg: bool, out: &mut Vec<(bool, String)>) {
    match e {
        Expr::Binary { op: BinOp::Add, lhs, rhs } => {
            collect_terms(lhs, neg, out);
            collect_terms(rhs, neg, out);
        }
        Expr::Binary { op: BinOp::Sub, lhs, rhs } => {
            collect_terms(lhs, neg, out);
            collect_terms(rhs, !neg, out);
        }
        Expr::Neg(inner) => collect_terms(inner, !neg, out),
        _ => {
            let mut numer = Vec::new();
            let mut denom = Vec::new();
            let flip = collect_factors(e, &mut numer, &mut denom);
            numer.sort();
            denom.sort();
            let mut body = if numer.is_empty() { "1".to_string() } else { numer.join("*") };
            for d in denom {
                body.push('/');
                body.push_str(&d);
            }
            out.push((neg ^ flip, body));
        }
    }
}

/// Pushes factor strings; returns whether an odd number of negations was absorbed.
fn collect_factors(e: &Expr, numer: &mut Vec<String>, denom: &mut Vec<String>) -> bool {
    match e {
        Expr::Binary { op: BinOp::Mul, lhs, rhs } => {
            collect_factors(lhs, numer, denom) ^ collect_factors(rhs, numer, denom)
        }
        Expr::Binary { op: BinOp::Div, lhs, rhs } => {
            let a = collect_factors(lhs, numer, denom);
            let b = collect_factors(rhs, denom, numer);
            a ^ b
        }
        Expr::Neg(inner) => !collect_factors(inner, numer, denom),
        other => {
            numer.push(atom(other));
            false
        }
    }
}

fn atom(e: &Expr) -> String {
    match e {
        Expr::Num(v) => format!("{v}"),
        Expr::Var { name, .. } => name.clone(),
        Expr::Call { func, arg } => format!("{}({})", func.name(), normalized_sum(arg).0),
        Expr::Binary { op: BinOp::Pow, lhs, rhs } => format!("{}^{}", factor(lhs), factor(rhs)),
        other => factor(other),
    }
}

fn factor(e: &Expr) -> String {
    match e {
        Expr::Num(_) | Expr::Var { .. } | Expr::Call { .. } => atom(e),
        _ => {
            let (s, compound) = normalized_sum(e);
            let is_single_atom = !compound && !s.contains(['*', '/', '^']);
            if is_single_atom {
                s
            } else {
                format!("({s})")
            }
        }
    }
}
