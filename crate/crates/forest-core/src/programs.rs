//! The benchmark programs — `sign`, `min_pos`, `min_neg`, `min_gen` — as
//! ready-to-run bundles, plus brute-force oracles for differential testing.

use crate::pretty::pretty_forest;
use crate::syntax::{ArithExpr, BoolExpr, Term, Var};

/// A program together with its calling convention: which variables are
/// inputs, which carry results, and which must be 0 at entry.
#[derive(Debug, Clone)]
pub struct ProgramBundle {
    pub name: &'static str,
    pub term: Term,
    pub inputs: Vec<(Var, &'static str)>,
    pub outputs: Vec<(Var, &'static str)>,
    /// Variables the contract expects to be 0 when the program starts.
    pub ancillas: Vec<Var>,
}

impl ProgramBundle {
    /// The bundle's source text: the pretty-printed term plus a final
    /// newline, exactly as shipped in the `examples/` directory.
    pub fn source(&self) -> String {
        let mut text = pretty_forest(&self.term);
        text.push('\n');
        text
    }
}

fn assert_distinct(vars: &[&Var]) {
    for (idx, a) in vars.iter().enumerate() {
        for b in &vars[idx + 1..] {
            assert!(a != b, "bundle variables must be distinct, got `{a}` twice");
        }
    }
}

/// `from (i = 0 or 0) to (i = x or !(s = 0)) { s += 1 }`
///
/// From any state with `i = s = 0`: ends with `i = s = sign(x)` in a number
/// of unfoldings that is 0 when `x = 0` and exactly 1 otherwise.
pub fn sign_program(x: Var, i: Var, s: Var) -> ProgramBundle {
    assert_distinct(&[&x, &i, &s]);
    let term = sign_term(&x, &i, &s);
    ProgramBundle {
        name: "sign",
        term,
        inputs: vec![(x, "value whose sign is taken")],
        outputs: vec![(i.clone(), "sign of x"), (s.clone(), "sign of x")],
        ancillas: vec![i, s],
    }
}

fn sign_term(x: &Var, i: &Var, s: &Var) -> Term {
    Term::from_to(
        i.clone(),
        ArithExpr::int(0),
        BoolExpr::False,
        ArithExpr::var(x.clone()),
        BoolExpr::not(BoolExpr::eq(ArithExpr::var(s.clone()), ArithExpr::int(0))),
        Term::inc(s.clone(), ArithExpr::int(1)),
    )
}

/// The minimum of two naturals:
///
/// ```text
/// min += x;
/// from (i = 0 or 0) to (i = x or found = 1) {
///     if (i = y) { min -= x; min += y; found += 1 } else { skip }
/// }
/// ```
///
/// For `x = m >= 0`, `y = n >= 0` and `i = min = found = 0`, ends with
/// `min = min(m, n)`; the counter stops at `min(m, n)` or one past it.
pub fn min_pos_program(x: Var, y: Var, i: Var, min: Var, found: Var) -> ProgramBundle {
    assert_distinct(&[&x, &y, &i, &min, &found]);
    let term = min_pos_term(&x, &y, &i, &min, &found);
    ProgramBundle {
        name: "min_pos",
        term,
        inputs: vec![(x, "first operand, >= 0"), (y, "second operand, >= 0")],
        outputs: vec![(min.clone(), "minimum of x and y")],
        ancillas: vec![i, min, found],
    }
}

fn min_pos_term(x: &Var, y: &Var, i: &Var, min: &Var, found: &Var) -> Term {
    Term::seq(vec![
        Term::inc(min.clone(), ArithExpr::var(x.clone())),
        Term::from_to(
            i.clone(),
            ArithExpr::int(0),
            BoolExpr::False,
            ArithExpr::var(x.clone()),
            BoolExpr::eq(ArithExpr::var(found.clone()), ArithExpr::int(1)),
            Term::if_else(
                BoolExpr::eq(ArithExpr::var(i.clone()), ArithExpr::var(y.clone())),
                Term::seq(vec![
                    Term::dec(min.clone(), ArithExpr::var(x.clone())),
                    Term::inc(min.clone(), ArithExpr::var(y.clone())),
                    Term::inc(found.clone(), ArithExpr::int(1)),
                ]),
                Term::skip(),
            ),
        ),
    ])
}

/// The minimum of two non-positive values: the `min_pos` scheme run on the
/// absolute values via negated bounds.
///
/// ```text
/// min += y;
/// from (i = 0 or 0) to (i = -x or found = 1) {
///     if (i = -y) { min -= y; min += x; found += 1 } else { skip }
/// }
/// ```
pub fn min_neg_program(x: Var, y: Var, i: Var, min: Var, found: Var) -> ProgramBundle {
    assert_distinct(&[&x, &y, &i, &min, &found]);
    let term = min_neg_term(&x, &y, &i, &min, &found);
    ProgramBundle {
        name: "min_neg",
        term,
        inputs: vec![(x, "first operand, <= 0"), (y, "second operand, <= 0")],
        outputs: vec![(min.clone(), "minimum of x and y")],
        ancillas: vec![i, min, found],
    }
}

fn min_neg_term(x: &Var, y: &Var, i: &Var, min: &Var, found: &Var) -> Term {
    let neg = |v: &Var| ArithExpr::sub(ArithExpr::int(0), ArithExpr::var(v.clone()));
    Term::seq(vec![
        Term::inc(min.clone(), ArithExpr::var(y.clone())),
        Term::from_to(
            i.clone(),
            ArithExpr::int(0),
            BoolExpr::False,
            neg(x),
            BoolExpr::eq(ArithExpr::var(found.clone()), ArithExpr::int(1)),
            Term::if_else(
                // |y| < |x| means x < y here, so the swap installs x.
                BoolExpr::eq(ArithExpr::var(i.clone()), neg(y)),
                Term::seq(vec![
                    Term::dec(min.clone(), ArithExpr::var(y.clone())),
                    Term::inc(min.clone(), ArithExpr::var(x.clone())),
                    Term::inc(found.clone(), ArithExpr::int(1)),
                ]),
                Term::skip(),
            ),
        ),
    ])
}

/// The minimum of two arbitrary integers in time proportional to the
/// smaller magnitude: two `sign` instances followed by a selection over the
/// recorded signs.
///
/// Ancillas in order: `[i1, s1, i2, s2, i3, min, found]`, all 0 at entry.
/// The sign pairs (i1, s1) and (i2, s2) hold sign(x) and sign(y) on exit;
/// i3 and found are scratch for the chosen minimum loop.
pub fn min_gen_program(x: Var, y: Var, ancillas: [Var; 7]) -> ProgramBundle {
    let [i1, s1, i2, s2, i3, min, found] = ancillas;
    let all = [&x, &y, &i1, &s1, &i2, &s2, &i3, &min, &found];
    assert_distinct(&all);
    let term = min_gen_term(&x, &y, &i1, &s1, &i2, &s2, &i3, &min, &found);
    ProgramBundle {
        name: "min_gen",
        term,
        inputs: vec![(x, "first operand"), (y, "second operand")],
        outputs: vec![(min.clone(), "minimum of x and y")],
        ancillas: vec![i1, s1, i2, s2, i3, min, found],
    }
}

/// `min_gen` followed by the inverted sign instances, which return
/// i1, s1, i2, s2 to 0. The selection never writes the sign variables, so
/// appending the inverses is valid; i3 and found stay dirty.
pub fn min_gen_clean_program(x: Var, y: Var, ancillas: [Var; 7]) -> ProgramBundle {
    let [i1, s1, i2, s2, i3, min, found] = ancillas;
    let all = [&x, &y, &i1, &s1, &i2, &s2, &i3, &min, &found];
    assert_distinct(&all);
    let body = min_gen_term(&x, &y, &i1, &s1, &i2, &s2, &i3, &min, &found);
    let undo_sign_y = sign_term(&y, &i2, &s2)
        .invert()
        .expect("sign is well-formed");
    let undo_sign_x = sign_term(&x, &i1, &s1)
        .invert()
        .expect("sign is well-formed");
    let term = Term::seq(vec![body, undo_sign_y, undo_sign_x]);
    ProgramBundle {
        name: "min_gen_clean",
        term,
        inputs: vec![(x, "first operand"), (y, "second operand")],
        outputs: vec![(min.clone(), "minimum of x and y")],
        ancillas: vec![i1, s1, i2, s2, i3, min, found],
    }
}

#[allow(clippy::too_many_arguments)]
fn min_gen_term(
    x: &Var,
    y: &Var,
    i1: &Var,
    s1: &Var,
    i2: &Var,
    s2: &Var,
    i3: &Var,
    min: &Var,
    found: &Var,
) -> Term {
    let is = |v: &Var, k: i64| BoolExpr::eq(ArithExpr::var(v.clone()), ArithExpr::int(k));
    // Zeros fold into the non-negative and non-positive cases; (0, 0) lands
    // in the min_pos branch. The remaining case is one strictly negative and
    // one strictly positive operand.
    let both_non_negative = BoolExpr::and(BoolExpr::not(is(s1, -1)), BoolExpr::not(is(s2, -1)));
    let both_non_positive = BoolExpr::and(BoolExpr::not(is(s1, 1)), BoolExpr::not(is(s2, 1)));
    let mixed = Term::if_else(
        is(s1, -1),
        Term::inc(min.clone(), ArithExpr::var(x.clone())),
        Term::inc(min.clone(), ArithExpr::var(y.clone())),
    );
    Term::seq(vec![
        sign_term(x, i1, s1),
        sign_term(y, i2, s2),
        Term::if_else(
            both_non_negative,
            min_pos_term(x, y, i3, min, found),
            Term::if_else(both_non_positive, min_neg_term(x, y, i3, min, found), mixed),
        ),
    ])
}

/// Ground truth for the minimum, computed directly.
pub fn oracle_min(m: i64, n: i64) -> i64 {
    m.min(n)
}

/// Ground truth for the sign, computed directly.
pub fn oracle_sign(n: i64) -> i64 {
    match n {
        0 => 0,
        n if n > 0 => 1,
        _ => -1,
    }
}

/// Every shipped bundle name, in export order.
pub fn bundle_names() -> &'static [&'static str] {
    &["sign", "min_pos", "min_neg", "min_gen", "min_gen_clean"]
}

/// Builds a shipped bundle by name with its standard variable names.
pub fn bundle(name: &str) -> Option<ProgramBundle> {
    let v = Var::new;
    let min_gen_vars = || {
        [
            v("i1"),
            v("s1"),
            v("i2"),
            v("s2"),
            v("i3"),
            v("min"),
            v("found"),
        ]
    };
    Some(match name {
        "sign" => sign_program(v("x"), v("i"), v("s")),
        "min_pos" => min_pos_program(v("x"), v("y"), v("i"), v("min"), v("found")),
        "min_neg" => min_neg_program(v("x"), v("y"), v("i"), v("min"), v("found")),
        "min_gen" => min_gen_program(v("x"), v("y"), min_gen_vars()),
        "min_gen_clean" => min_gen_clean_program(v("x"), v("y"), min_gen_vars()),
        _ => return None,
    })
}
