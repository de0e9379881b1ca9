//! Abstract syntax of forest: arithmetic and boolean expressions, terms,
//! domain computations, well-formedness checking, and structural inversion.

use std::collections::BTreeSet;
use std::fmt;

use num_bigint::BigInt;

/// Identifiers that can never name a variable in either surface language.
pub const RESERVED_WORDS: &[&str] = &[
    "skip", "if", "else", "from", "to", "or", "and", "INC", "DEC", "for",
];

/// A source position (1-based line and column). `Loc::NONE` marks terms
/// built programmatically rather than parsed from text.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Loc {
    pub line: u32,
    pub col: u32,
}

impl Loc {
    pub const NONE: Loc = Loc { line: 0, col: 0 };

    pub fn new(line: u32, col: u32) -> Self {
        Loc { line, col }
    }
}

impl fmt::Display for Loc {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if *self == Loc::NONE {
            write!(f, "-")
        } else {
            write!(f, "{}:{}", self.line, self.col)
        }
    }
}

/// Error produced when a string is not a usable variable name.
#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("invalid variable name `{name}`: {reason}")]
pub struct InvalidVarName {
    pub name: String,
    pub reason: &'static str,
}

/// A variable name. Two variables are equal exactly when their names are.
///
/// Names follow identifier shape (`[A-Za-z_][A-Za-z0-9_]*`) and may not be a
/// reserved word. Names starting with `_` are produced by the M-SRL
/// translator's fresh-name supply; user-facing code normally sticks to
/// letter-initial names.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Var(String);

impl Var {
    /// Validating constructor.
    pub fn try_new(name: impl Into<String>) -> Result<Var, InvalidVarName> {
        let name = name.into();
        let mut chars = name.chars();
        let head_ok = chars
            .next()
            .is_some_and(|c| c.is_ascii_alphabetic() || c == '_');
        if !head_ok || !name.chars().all(|c| c.is_ascii_alphanumeric() || c == '_') {
            return Err(InvalidVarName {
                name,
                reason: "expected a letter or `_` followed by letters, digits, or `_`",
            });
        }
        if RESERVED_WORDS.contains(&name.as_str()) {
            return Err(InvalidVarName {
                name,
                reason: "reserved word",
            });
        }
        Ok(Var(name))
    }

    /// Panicking constructor for names known to be valid.
    pub fn new(name: impl Into<String>) -> Var {
        Var::try_new(name).unwrap()
    }

    pub fn name(&self) -> &str {
        &self.0
    }
}

impl fmt::Display for Var {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

/// Integer expressions: literals, variables, sums, and differences.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ArithExpr {
    Int(BigInt),
    Var(Var),
    Add(Box<ArithExpr>, Box<ArithExpr>),
    Sub(Box<ArithExpr>, Box<ArithExpr>),
}

// Constructor names mirror the operator vocabulary (`add`, `not`, ...);
// they are associated functions, not operator impls.
#[allow(clippy::should_implement_trait)]
impl ArithExpr {
    pub fn int(value: impl Into<BigInt>) -> ArithExpr {
        ArithExpr::Int(value.into())
    }

    pub fn var(v: Var) -> ArithExpr {
        ArithExpr::Var(v)
    }

    pub fn add(left: ArithExpr, right: ArithExpr) -> ArithExpr {
        ArithExpr::Add(Box::new(left), Box::new(right))
    }

    pub fn sub(left: ArithExpr, right: ArithExpr) -> ArithExpr {
        ArithExpr::Sub(Box::new(left), Box::new(right))
    }

    /// Unary minus as written in source text: `-e` is `0 - e`, except that a
    /// negated literal folds into the literal itself.
    pub fn neg(inner: ArithExpr) -> ArithExpr {
        match inner {
            ArithExpr::Int(n) => ArithExpr::Int(-n),
            other => ArithExpr::sub(ArithExpr::int(0), other),
        }
    }

    /// The set of variables occurring in the expression.
    pub fn dom(&self) -> BTreeSet<Var> {
        let mut out = BTreeSet::new();
        self.collect_dom(&mut out);
        out
    }

    fn collect_dom(&self, out: &mut BTreeSet<Var>) {
        match self {
            ArithExpr::Int(_) => {}
            ArithExpr::Var(v) => {
                out.insert(v.clone());
            }
            ArithExpr::Add(l, r) | ArithExpr::Sub(l, r) => {
                l.collect_dom(out);
                r.collect_dom(out);
            }
        }
    }

    fn mentions(&self, v: &Var) -> bool {
        match self {
            ArithExpr::Int(_) => false,
            ArithExpr::Var(w) => w == v,
            ArithExpr::Add(l, r) | ArithExpr::Sub(l, r) => l.mentions(v) || r.mentions(v),
        }
    }
}

/// Boolean expressions over the truth values 0 and 1.
///
/// `Le` and `Gt` belong to the internal extension used by the loop
/// desugaring; `validate` rejects them inside user terms.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum BoolExpr {
    False,
    True,
    Eq(ArithExpr, ArithExpr),
    Not(Box<BoolExpr>),
    And(Box<BoolExpr>, Box<BoolExpr>),
    Or(Box<BoolExpr>, Box<BoolExpr>),
    Le(ArithExpr, ArithExpr),
    Gt(ArithExpr, ArithExpr),
}

#[allow(clippy::should_implement_trait)]
impl BoolExpr {
    pub fn eq(left: ArithExpr, right: ArithExpr) -> BoolExpr {
        BoolExpr::Eq(left, right)
    }

    pub fn not(inner: BoolExpr) -> BoolExpr {
        BoolExpr::Not(Box::new(inner))
    }

    pub fn and(left: BoolExpr, right: BoolExpr) -> BoolExpr {
        BoolExpr::And(Box::new(left), Box::new(right))
    }

    pub fn or(left: BoolExpr, right: BoolExpr) -> BoolExpr {
        BoolExpr::Or(Box::new(left), Box::new(right))
    }

    pub fn le(left: ArithExpr, right: ArithExpr) -> BoolExpr {
        BoolExpr::Le(left, right)
    }

    pub fn gt(left: ArithExpr, right: ArithExpr) -> BoolExpr {
        BoolExpr::Gt(left, right)
    }

    /// The set of variables occurring in the expression.
    pub fn dom(&self) -> BTreeSet<Var> {
        let mut out = BTreeSet::new();
        self.collect_dom(&mut out);
        out
    }

    fn collect_dom(&self, out: &mut BTreeSet<Var>) {
        match self {
            BoolExpr::False | BoolExpr::True => {}
            BoolExpr::Eq(l, r) | BoolExpr::Le(l, r) | BoolExpr::Gt(l, r) => {
                l.collect_dom(out);
                r.collect_dom(out);
            }
            BoolExpr::Not(e) => e.collect_dom(out),
            BoolExpr::And(l, r) | BoolExpr::Or(l, r) => {
                l.collect_dom(out);
                r.collect_dom(out);
            }
        }
    }

    fn has_internal_op(&self) -> bool {
        match self {
            BoolExpr::Le(_, _) | BoolExpr::Gt(_, _) => true,
            BoolExpr::False | BoolExpr::True | BoolExpr::Eq(_, _) => false,
            BoolExpr::Not(e) => e.has_internal_op(),
            BoolExpr::And(l, r) | BoolExpr::Or(l, r) => l.has_internal_op() || r.has_internal_op(),
        }
    }
}

/// A forest term.
///
/// Terms are constructible in ill-formed states; [`Term::validate`] performs
/// the well-formedness check separately so front-ends can report every
/// violation with a position. `Seq` keeps its parts flattened (no `Seq`
/// directly inside `Seq`, never fewer than two parts); build sequences with
/// [`Term::seq`] to preserve that shape.
#[derive(Debug, Clone)]
pub enum Term {
    Skip {
        loc: Loc,
    },
    Inc {
        target: Var,
        expr: ArithExpr,
        loc: Loc,
    },
    Dec {
        target: Var,
        expr: ArithExpr,
        loc: Loc,
    },
    Seq {
        parts: Vec<Term>,
        loc: Loc,
    },
    If {
        guard: BoolExpr,
        then_branch: Box<Term>,
        else_branch: Box<Term>,
        loc: Loc,
    },
    FromTo {
        lead: Var,
        from_bound: ArithExpr,
        from_escape: BoolExpr,
        to_bound: ArithExpr,
        to_escape: BoolExpr,
        body: Box<Term>,
        loc: Loc,
    },
}

impl Term {
    pub fn skip() -> Term {
        Term::Skip { loc: Loc::NONE }
    }

    pub fn inc(target: Var, expr: ArithExpr) -> Term {
        Term::Inc {
            target,
            expr,
            loc: Loc::NONE,
        }
    }

    pub fn dec(target: Var, expr: ArithExpr) -> Term {
        Term::Dec {
            target,
            expr,
            loc: Loc::NONE,
        }
    }

    /// Builds a sequence in canonical shape: nested sequences are flattened,
    /// an empty sequence is `skip`, and a one-part sequence is the part.
    pub fn seq(parts: Vec<Term>) -> Term {
        let mut flat = Vec::with_capacity(parts.len());
        for p in parts {
            match p {
                Term::Seq { parts, .. } => flat.extend(parts),
                other => flat.push(other),
            }
        }
        match flat.len() {
            0 => Term::skip(),
            1 => flat.into_iter().next().unwrap(),
            _ => Term::Seq {
                parts: flat,
                loc: Loc::NONE,
            },
        }
    }

    pub fn if_else(guard: BoolExpr, then_branch: Term, else_branch: Term) -> Term {
        Term::If {
            guard,
            then_branch: Box::new(then_branch),
            else_branch: Box::new(else_branch),
            loc: Loc::NONE,
        }
    }

    pub fn from_to(
        lead: Var,
        from_bound: ArithExpr,
        from_escape: BoolExpr,
        to_bound: ArithExpr,
        to_escape: BoolExpr,
        body: Term,
    ) -> Term {
        Term::FromTo {
            lead,
            from_bound,
            from_escape,
            to_bound,
            to_escape,
            body: Box::new(body),
            loc: Loc::NONE,
        }
    }

    pub fn loc(&self) -> Loc {
        match self {
            Term::Skip { loc }
            | Term::Inc { loc, .. }
            | Term::Dec { loc, .. }
            | Term::Seq { loc, .. }
            | Term::If { loc, .. }
            | Term::FromTo { loc, .. } => *loc,
        }
    }

    pub fn with_loc(mut self, new_loc: Loc) -> Term {
        match &mut self {
            Term::Skip { loc }
            | Term::Inc { loc, .. }
            | Term::Dec { loc, .. }
            | Term::Seq { loc, .. }
            | Term::If { loc, .. }
            | Term::FromTo { loc, .. } => *loc = new_loc,
        }
        self
    }

    /// The domain: every variable the term mentions.
    pub fn dom(&self) -> BTreeSet<Var> {
        let mut out = BTreeSet::new();
        self.collect_dom(&mut out);
        out
    }

    fn collect_dom(&self, out: &mut BTreeSet<Var>) {
        match self {
            Term::Skip { .. } => {}
            Term::Inc { target, expr, .. } | Term::Dec { target, expr, .. } => {
                out.insert(target.clone());
                expr.collect_dom(out);
            }
            Term::Seq { parts, .. } => {
                for p in parts {
                    p.collect_dom(out);
                }
            }
            Term::If {
                guard,
                then_branch,
                else_branch,
                ..
            } => {
                guard.collect_dom(out);
                then_branch.collect_dom(out);
                else_branch.collect_dom(out);
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
                out.insert(lead.clone());
                from_bound.collect_dom(out);
                from_escape.collect_dom(out);
                to_bound.collect_dom(out);
                to_escape.collect_dom(out);
                body.collect_dom(out);
            }
        }
    }

    /// The writable domain: every variable the term may modify.
    pub fn wdom(&self) -> BTreeSet<Var> {
        let mut out = BTreeSet::new();
        self.collect_wdom(&mut out);
        out
    }

    fn collect_wdom(&self, out: &mut BTreeSet<Var>) {
        match self {
            Term::Skip { .. } => {}
            Term::Inc { target, .. } | Term::Dec { target, .. } => {
                out.insert(target.clone());
            }
            Term::Seq { parts, .. } => {
                for p in parts {
                    p.collect_wdom(out);
                }
            }
            Term::If {
                then_branch,
                else_branch,
                ..
            } => {
                then_branch.collect_wdom(out);
                else_branch.collect_wdom(out);
            }
            Term::FromTo { lead, body, .. } => {
                out.insert(lead.clone());
                body.collect_wdom(out);
            }
        }
    }

    /// The leading variables: every variable driving a `from-to` in the term.
    pub fn lead_vars(&self) -> BTreeSet<Var> {
        let mut out = BTreeSet::new();
        self.collect_lead(&mut out);
        out
    }

    fn collect_lead(&self, out: &mut BTreeSet<Var>) {
        match self {
            Term::Skip { .. } | Term::Inc { .. } | Term::Dec { .. } => {}
            Term::Seq { parts, .. } => {
                for p in parts {
                    p.collect_lead(out);
                }
            }
            Term::If { .. } => {}
            Term::FromTo { lead, body, .. } => {
                out.insert(lead.clone());
                body.collect_lead(out);
            }
        }
    }

    /// Checks every well-formedness side-condition and reports all
    /// violations found. The term is well-formed iff the report is empty.
    pub fn validate(&self) -> ValidationReport {
        let mut report = ValidationReport::default();
        self.check(&mut report);
        report
    }

    fn check(&self, report: &mut ValidationReport) {
        match self {
            Term::Skip { .. } => {}
            Term::Inc { target, expr, loc } | Term::Dec { target, expr, loc } => {
                if expr.mentions(target) {
                    report.push(
                        ViolationKind::TargetInSource,
                        *loc,
                        format!("assignment target `{target}` occurs in its source expression"),
                    );
                }
            }
            Term::Seq { parts, .. } => {
                for p in parts {
                    p.check(report);
                }
            }
            Term::If {
                guard,
                then_branch,
                else_branch,
                loc,
            } => {
                if guard.has_internal_op() {
                    report.push(
                        ViolationKind::InternalOperator,
                        *loc,
                        "selection guard uses an internal comparison operator".to_string(),
                    );
                }
                let mut written = then_branch.wdom();
                written.extend(else_branch.wdom());
                let clash: Vec<_> = guard.dom().intersection(&written).cloned().collect();
                if !clash.is_empty() {
                    report.push(
                        ViolationKind::GuardWriteOverlap,
                        *loc,
                        format!("branches write guard variable(s) {}", join_vars(&clash)),
                    );
                }
                then_branch.check(report);
                else_branch.check(report);
            }
            Term::FromTo {
                lead,
                from_bound,
                from_escape,
                to_bound,
                to_escape,
                body,
                loc,
            } => {
                if from_escape.has_internal_op() || to_escape.has_internal_op() {
                    report.push(
                        ViolationKind::InternalOperator,
                        *loc,
                        "loop escape uses an internal comparison operator".to_string(),
                    );
                }
                let mut controls = from_bound.dom();
                controls.extend(to_bound.dom());
                controls.insert(lead.clone());
                let written = body.wdom();
                let clash: Vec<_> = controls.intersection(&written).cloned().collect();
                if !clash.is_empty() {
                    let detail = if clash.contains(lead) {
                        format!("body writes leading variable `{lead}`")
                    } else {
                        format!("body writes bound variable(s) {}", join_vars(&clash))
                    };
                    report.push(ViolationKind::LoopControlWriteOverlap, *loc, detail);
                }
                body.check(report);
            }
        }
    }

    /// Structural inversion after a well-formedness check.
    pub fn invert(&self) -> Result<Term, ValidationReport> {
        let report = self.validate();
        if report.is_ok() {
            Ok(self.invert_unchecked())
        } else {
            Err(report)
        }
    }

    /// Structural inversion without validating first. On a well-formed term
    /// this agrees with [`Term::invert`]; an ill-formed term yields an
    /// equally ill-formed inverse.
    pub fn invert_unchecked(&self) -> Term {
        match self {
            Term::Skip { loc } => Term::Skip { loc: *loc },
            Term::Inc { target, expr, loc } => Term::Dec {
                target: target.clone(),
                expr: expr.clone(),
                loc: *loc,
            },
            Term::Dec { target, expr, loc } => Term::Inc {
                target: target.clone(),
                expr: expr.clone(),
                loc: *loc,
            },
            Term::Seq { parts, loc } => Term::Seq {
                parts: parts.iter().rev().map(Term::invert_unchecked).collect(),
                loc: *loc,
            },
            Term::If {
                guard,
                then_branch,
                else_branch,
                loc,
            } => Term::If {
                guard: guard.clone(),
                then_branch: Box::new(then_branch.invert_unchecked()),
                else_branch: Box::new(else_branch.invert_unchecked()),
                loc: *loc,
            },
            // The loop inverse swaps the (bound, escape) header pairs and
            // keeps the body as written; the backward interpretation of the
            // swapped loop is what runs the body's inverse.
            Term::FromTo {
                lead,
                from_bound,
                from_escape,
                to_bound,
                to_escape,
                body,
                loc,
            } => Term::FromTo {
                lead: lead.clone(),
                from_bound: to_bound.clone(),
                from_escape: to_escape.clone(),
                to_bound: from_bound.clone(),
                to_escape: from_escape.clone(),
                body: body.clone(),
                loc: *loc,
            },
        }
    }
}

// Structural equality ignores source locations.
impl PartialEq for Term {
    fn eq(&self, other: &Term) -> bool {
        match (self, other) {
            (Term::Skip { .. }, Term::Skip { .. }) => true,
            (
                Term::Inc {
                    target: t1,
                    expr: e1,
                    ..
                },
                Term::Inc {
                    target: t2,
                    expr: e2,
                    ..
                },
            )
            | (
                Term::Dec {
                    target: t1,
                    expr: e1,
                    ..
                },
                Term::Dec {
                    target: t2,
                    expr: e2,
                    ..
                },
            ) => t1 == t2 && e1 == e2,
            (Term::Seq { parts: p1, .. }, Term::Seq { parts: p2, .. }) => p1 == p2,
            (
                Term::If {
                    guard: g1,
                    then_branch: t1,
                    else_branch: f1,
                    ..
                },
                Term::If {
                    guard: g2,
                    then_branch: t2,
                    else_branch: f2,
                    ..
                },
            ) => g1 == g2 && t1 == t2 && f1 == f2,
            (
                Term::FromTo {
                    lead: i1,
                    from_bound: u1,
                    from_escape: in1,
                    to_bound: v1,
                    to_escape: out1,
                    body: b1,
                    ..
                },
                Term::FromTo {
                    lead: i2,
                    from_bound: u2,
                    from_escape: in2,
                    to_bound: v2,
                    to_escape: out2,
                    body: b2,
                    ..
                },
            ) => i1 == i2 && u1 == u2 && in1 == in2 && v1 == v2 && out1 == out2 && b1 == b2,
            _ => false,
        }
    }
}

impl Eq for Term {}

fn join_vars(vars: &[Var]) -> String {
    vars.iter()
        .map(|v| format!("`{v}`"))
        .collect::<Vec<_>>()
        .join(", ")
}

/// Why a term failed the well-formedness check.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ViolationKind {
    /// Assignment target occurs in its own source expression.
    TargetInSource,
    /// A selection branch writes a variable read by the guard.
    GuardWriteOverlap,
    /// A loop body writes its leading variable or a bound variable.
    LoopControlWriteOverlap,
    /// An internal-only comparison operator appears in a user term.
    InternalOperator,
}

impl fmt::Display for ViolationKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            ViolationKind::TargetInSource => "self-assignment-source",
            ViolationKind::GuardWriteOverlap => "guard-write-overlap",
            ViolationKind::LoopControlWriteOverlap => "loop-control-write-overlap",
            ViolationKind::InternalOperator => "internal-operator",
        };
        f.write_str(s)
    }
}

/// One well-formedness violation, with the location of the offending node.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Violation {
    pub kind: ViolationKind,
    pub loc: Loc,
    pub message: String,
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} at {}: {}", self.kind, self.loc, self.message)
    }
}

/// Outcome of `validate`: empty means well-formed.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct ValidationReport {
    pub violations: Vec<Violation>,
}

impl ValidationReport {
    pub fn is_ok(&self) -> bool {
        self.violations.is_empty()
    }

    fn push(&mut self, kind: ViolationKind, loc: Loc, message: String) {
        self.violations.push(Violation { kind, loc, message });
    }
}

impl fmt::Display for ValidationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_ok() {
            return f.write_str("ok");
        }
        for (idx, v) in self.violations.iter().enumerate() {
            if idx > 0 {
                writeln!(f)?;
            }
            write!(f, "{v}")?;
        }
        Ok(())
    }
}
