//! Pretty-printers for forest and M-SRL. The rendering is deterministic and
//! reparses to a structurally equal term.

use std::fmt;

use num_traits::Zero;

use crate::msrl::MsrlTerm;
use crate::syntax::{ArithExpr, BoolExpr, Term};

const INDENT: &str = "    ";

/// Renders a forest term as source text (no trailing newline).
pub fn pretty_forest(term: &Term) -> String {
    let mut out = String::new();
    write_term(&mut out, term, 0);
    out
}

/// Renders an M-SRL term as source text (no trailing newline).
pub fn pretty_msrl(term: &MsrlTerm) -> String {
    let mut out = String::new();
    write_msrl(&mut out, term, 0);
    out
}

fn pad(out: &mut String, depth: usize) {
    for _ in 0..depth {
        out.push_str(INDENT);
    }
}

fn write_term(out: &mut String, term: &Term, depth: usize) {
    match term {
        Term::Skip { .. } => out.push_str("skip"),
        Term::Inc { target, expr, .. } => {
            out.push_str(&format!("{} += {}", target, aexp(expr)));
        }
        Term::Dec { target, expr, .. } => {
            out.push_str(&format!("{} -= {}", target, aexp(expr)));
        }
        Term::Seq { parts, .. } => {
            for (idx, part) in parts.iter().enumerate() {
                if idx > 0 {
                    out.push_str(";\n");
                    pad(out, depth);
                }
                write_term(out, part, depth);
            }
        }
        Term::If {
            guard,
            then_branch,
            else_branch,
            ..
        } => {
            out.push_str(&format!("if ({}) {{\n", bexp(guard)));
            pad(out, depth + 1);
            write_term(out, then_branch, depth + 1);
            out.push('\n');
            pad(out, depth);
            out.push_str("} else {\n");
            pad(out, depth + 1);
            write_term(out, else_branch, depth + 1);
            out.push('\n');
            pad(out, depth);
            out.push('}');
        }
        Term::FromTo {
            lead,
            from_bound,
            from_escape,
            to_bound,
            to_escape,
            body,
            ..
        } => {
            out.push_str(&format!(
                "from ({} = {} or {}) to ({} = {} or {}) {{\n",
                lead,
                aexp(from_bound),
                bexp_prec(from_escape, 1),
                lead,
                aexp(to_bound),
                bexp_prec(to_escape, 1),
            ));
            pad(out, depth + 1);
            write_term(out, body, depth + 1);
            out.push('\n');
            pad(out, depth);
            out.push('}');
        }
    }
}

fn write_msrl(out: &mut String, term: &MsrlTerm, depth: usize) {
    match term {
        MsrlTerm::Inc { reg, .. } => out.push_str(&format!("INC {reg}")),
        MsrlTerm::Dec { reg, .. } => out.push_str(&format!("DEC {reg}")),
        MsrlTerm::Seq { parts, .. } => {
            for (idx, part) in parts.iter().enumerate() {
                if idx > 0 {
                    out.push_str(";\n");
                    pad(out, depth);
                }
                write_msrl(out, part, depth);
            }
        }
        MsrlTerm::For { reg, body, .. } => {
            out.push_str(&format!("for {reg} {{\n"));
            pad(out, depth + 1);
            write_msrl(out, body, depth + 1);
            out.push('\n');
            pad(out, depth);
            out.push('}');
        }
    }
}

/// Renders an arithmetic expression at top level.
pub fn aexp(expr: &ArithExpr) -> String {
    aexp_at(expr, false)
}

// `right_operand` marks the right side of a `+`/`-`, where a chain or a
// negative literal needs parentheses to reparse into the same tree.
fn aexp_at(expr: &ArithExpr, right_operand: bool) -> String {
    match expr {
        ArithExpr::Int(n) => {
            if right_operand && n.sign() == num_bigint::Sign::Minus {
                format!("({n})")
            } else {
                n.to_string()
            }
        }
        ArithExpr::Var(v) => v.to_string(),
        // `0 - e` prints as unary minus, except over a literal (where `-k`
        // would fold back into one token).
        ArithExpr::Sub(l, r) if is_zero_literal(l) && !matches!(**r, ArithExpr::Int(_)) => {
            let rendered = format!("-{}", aexp_atom(r));
            if right_operand {
                format!("({rendered})")
            } else {
                rendered
            }
        }
        ArithExpr::Add(l, r) => {
            let rendered = format!("{} + {}", aexp_at(l, false), aexp_at(r, true));
            if right_operand {
                format!("({rendered})")
            } else {
                rendered
            }
        }
        ArithExpr::Sub(l, r) => {
            let rendered = format!("{} - {}", aexp_at(l, false), aexp_at(r, true));
            if right_operand {
                format!("({rendered})")
            } else {
                rendered
            }
        }
    }
}

fn is_zero_literal(expr: &ArithExpr) -> bool {
    matches!(expr, ArithExpr::Int(n) if n.is_zero())
}

fn aexp_atom(expr: &ArithExpr) -> String {
    match expr {
        ArithExpr::Var(v) => v.to_string(),
        ArithExpr::Int(n) if n.sign() != num_bigint::Sign::Minus => n.to_string(),
        other => format!("({})", aexp(other)),
    }
}

/// Renders a boolean expression at top level.
pub fn bexp(expr: &BoolExpr) -> String {
    bexp_prec(expr, 1)
}

// Precedence climbing: `or` is 1, `and` is 2, atoms are 3. A node below the
// required precedence gets parentheses; `or`/`and` print left-associated.
fn bexp_prec(expr: &BoolExpr, min_prec: u8) -> String {
    match expr {
        BoolExpr::False => "0".into(),
        BoolExpr::True => "1".into(),
        BoolExpr::Eq(l, r) => format!("{} = {}", aexp(l), aexp(r)),
        BoolExpr::Not(inner) => format!("!{}", bexp_atom(inner)),
        BoolExpr::Or(l, r) => {
            let rendered = format!("{} or {}", bexp_prec(l, 1), bexp_prec(r, 2));
            if min_prec > 1 {
                format!("({rendered})")
            } else {
                rendered
            }
        }
        BoolExpr::And(l, r) => {
            let rendered = format!("{} and {}", bexp_prec(l, 2), bexp_prec(r, 3));
            if min_prec > 2 {
                format!("({rendered})")
            } else {
                rendered
            }
        }
        // Internal operators have no surface syntax; this rendering is for
        // diagnostics only and does not reparse.
        BoolExpr::Le(l, r) => format!("{} <= {}", aexp(l), aexp(r)),
        BoolExpr::Gt(l, r) => format!("{} > {}", aexp(l), aexp(r)),
    }
}

fn bexp_atom(expr: &BoolExpr) -> String {
    match expr {
        BoolExpr::False => "0".into(),
        BoolExpr::True => "1".into(),
        BoolExpr::Not(inner) => format!("!{}", bexp_atom(inner)),
        other => format!("({})", bexp_prec(other, 1)),
    }
}

impl fmt::Display for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&pretty_forest(self))
    }
}

impl fmt::Display for MsrlTerm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&pretty_msrl(self))
    }
}
