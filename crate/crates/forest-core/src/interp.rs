//! Expression evaluation and the deterministic big-step interpreter.
//!
//! User terms are executed through the internal extension (`ExtTerm`): a
//! `from-to` desugars into range/entry assertions plus a `loop-until`, with
//! the loop run forward or backward depending on how the bounds compare at
//! entry. A failed assertion produces the bottom outcome; fuel (when given)
//! caps the number of loop unfoldings so callers can box giant runs.

use std::collections::BTreeMap;
use std::fmt;
use std::io::Write;
use std::sync::LazyLock;

use num_bigint::BigInt;
use num_traits::Signed;

use crate::syntax::{ArithExpr, BoolExpr, Loc, Term, Var};

static ZERO: LazyLock<BigInt> = LazyLock::new(|| BigInt::from(0));

/// A program state: total map from variables to integers, stored as a
/// finite map that reads 0 for anything unbound.
#[derive(Debug, Clone, Default)]
pub struct State {
    bindings: BTreeMap<Var, BigInt>,
}

impl State {
    pub fn new() -> State {
        State::default()
    }

    pub fn from_pairs<V: Into<BigInt>>(pairs: impl IntoIterator<Item = (Var, V)>) -> State {
        let mut st = State::new();
        for (var, value) in pairs {
            st.set(var, value.into());
        }
        st
    }

    /// Total lookup: unbound variables read as zero.
    pub fn get(&self, var: &Var) -> &BigInt {
        self.bindings.get(var).unwrap_or(&ZERO)
    }

    pub fn set(&mut self, var: Var, value: BigInt) {
        self.bindings.insert(var, value);
    }

    /// Variables with an explicit binding (possibly bound to zero).
    pub fn vars(&self) -> impl Iterator<Item = &Var> {
        self.bindings.keys()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&Var, &BigInt)> {
        self.bindings.iter()
    }

    /// True when both states give the same value to every listed variable.
    pub fn agrees_with<'a>(&self, other: &State, vars: impl IntoIterator<Item = &'a Var>) -> bool {
        vars.into_iter().all(|v| self.get(v) == other.get(v))
    }
}

// Value equality of total maps: compare on the union of bound names, so
// an explicit zero binding equals an absent one.
impl PartialEq for State {
    fn eq(&self, other: &State) -> bool {
        self.agrees_with(other, self.bindings.keys().chain(other.bindings.keys()))
    }
}

impl Eq for State {}

/// Evaluates an arithmetic expression; exact integer arithmetic throughout.
pub fn eval_arith(state: &State, expr: &ArithExpr) -> BigInt {
    match expr {
        ArithExpr::Int(n) => n.clone(),
        ArithExpr::Var(v) => state.get(v).clone(),
        ArithExpr::Add(l, r) => eval_arith(state, l) + eval_arith(state, r),
        ArithExpr::Sub(l, r) => eval_arith(state, l) - eval_arith(state, r),
    }
}

/// Evaluates a boolean expression to 0 or 1.
///
/// The connectives are the quadratic polynomials `1 - m`, `m * n`, and
/// `m + n - m * n`; since every leaf evaluates to 0 or 1, so does the whole
/// expression.
pub fn eval_bool(state: &State, expr: &BoolExpr) -> u8 {
    match expr {
        BoolExpr::False => 0,
        BoolExpr::True => 1,
        BoolExpr::Eq(l, r) => u8::from(eval_arith(state, l) == eval_arith(state, r)),
        BoolExpr::Not(e) => 1 - eval_bool(state, e),
        BoolExpr::And(l, r) => eval_bool(state, l) * eval_bool(state, r),
        BoolExpr::Or(l, r) => {
            let m = eval_bool(state, l);
            let n = eval_bool(state, r);
            m + n - m * n
        }
        BoolExpr::Le(l, r) => u8::from(eval_arith(state, l) <= eval_arith(state, r)),
        BoolExpr::Gt(l, r) => u8::from(eval_arith(state, l) > eval_arith(state, r)),
    }
}

/// Why an interpretation hit bottom.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FailureReason {
    /// The leading variable was outside the interval spanned by the bounds.
    OutOfRange,
    /// The leading variable was in range but not at the start bound, and the
    /// entry escape did not hold.
    EntryCondition,
    /// The entry escape became true again after an unfolding.
    ReEntryCondition,
}

impl fmt::Display for FailureReason {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            FailureReason::OutOfRange => "out-of-range",
            FailureReason::EntryCondition => "entry-condition",
            FailureReason::ReEntryCondition => "re-entry-condition",
        };
        f.write_str(s)
    }
}

/// Result of interpreting a term.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Outcome {
    Success(State),
    Failure {
        reason: FailureReason,
        location: Loc,
    },
    /// Tooling-only: the unfolding cap was hit. Never produced without fuel.
    FuelExhausted {
        steps_used: u64,
    },
}

impl Outcome {
    pub fn success(&self) -> Option<&State> {
        match self {
            Outcome::Success(st) => Some(st),
            _ => None,
        }
    }
}

/// Counters for the work a run performed.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct StepStats {
    /// Executed assignments, including the desugared lead-variable steps.
    pub assignments: u64,
    /// Guard and until-condition evaluations, including the direction check.
    pub guard_evals: u64,
    /// Assertion evaluations, passing or failing.
    pub assert_evals: u64,
    /// Loop-body executions across all from-to loops.
    pub loop_unfoldings: u64,
}

impl StepStats {
    pub fn total(&self) -> u64 {
        self.assignments + self.guard_evals + self.assert_evals + self.loop_unfoldings
    }
}

/// The rules a run reports while executing.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Rule {
    Skip,
    Inc,
    Dec,
    IfTrue,
    IfFalse,
    FromTo,
    Assert1,
    Assert0,
    LoopBase,
    LoopRec,
}

impl fmt::Display for Rule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Rule::Skip => "Skip",
            Rule::Inc => "Inc",
            Rule::Dec => "Dec",
            Rule::IfTrue => "IfTrue",
            Rule::IfFalse => "IfFalse",
            Rule::FromTo => "FromTo",
            Rule::Assert1 => "Assert1",
            Rule::Assert0 => "Assert0",
            Rule::LoopBase => "LoopBase",
            Rule::LoopRec => "LoopRec",
        };
        f.write_str(s)
    }
}

/// Hook into a run: rule applications plus per-loop entry/exit bookkeeping.
///
/// `loop_entered` reports `|v - u|` measured at loop entry, which bounds how
/// many unfoldings that loop may perform; `loop_finished` reports how many it
/// actually performed (also on the failure path). All methods default to
/// no-ops.
pub trait RunObserver {
    fn rule_applied(&mut self, rule: Rule, loc: Loc, delta: Option<(&Var, &BigInt, &BigInt)>) {
        let _ = (rule, loc, delta);
    }

    fn loop_entered(&mut self, loc: Loc, bound: &BigInt) {
        let _ = (loc, bound);
    }

    fn loop_finished(&mut self, loc: Loc, bound: &BigInt, unfoldings: u64) {
        let _ = (loc, bound, unfoldings);
    }
}

/// Observer that ignores everything.
pub struct NoopObserver;

impl RunObserver for NoopObserver {}

/// Observer that writes the tab-separated trace format: one line per rule,
/// `stepIndex<TAB>ruleName<TAB>location<TAB>var=old→new` (or `-`).
pub struct TraceWriter<W: Write> {
    out: W,
    step: u64,
}

impl<W: Write> TraceWriter<W> {
    pub fn new(out: W) -> Self {
        TraceWriter { out, step: 0 }
    }

    pub fn into_inner(self) -> W {
        self.out
    }
}

impl<W: Write> RunObserver for TraceWriter<W> {
    fn rule_applied(&mut self, rule: Rule, loc: Loc, delta: Option<(&Var, &BigInt, &BigInt)>) {
        let result = match delta {
            Some((var, old, new)) => writeln!(
                self.out,
                "{}\t{}\t{}\t{}={}\u{2192}{}",
                self.step, rule, loc, var, old, new
            ),
            None => writeln!(self.out, "{}\t{}\t{}\t-", self.step, rule, loc),
        };
        let _ = result;
        self.step += 1;
    }
}

/// A term of the internal extension: user constructors plus `assert` and
/// `loop-until`. Produced only by the loop desugaring, never by the parser.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ExtTerm {
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
        parts: Vec<ExtTerm>,
    },
    If {
        guard: BoolExpr,
        then_branch: Box<ExtTerm>,
        else_branch: Box<ExtTerm>,
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
    Assert {
        cond: BoolExpr,
        role: FailureReason,
        loc: Loc,
    },
    LoopUntil {
        lead: Var,
        bound: ArithExpr,
        escape: BoolExpr,
        body: Box<ExtTerm>,
        loc: Loc,
    },
}

impl ExtTerm {
    /// Embeds a user term; `from-to` nodes stay intact and desugar lazily
    /// when reached.
    pub fn embed(term: &Term) -> ExtTerm {
        match term {
            Term::Skip { loc } => ExtTerm::Skip { loc: *loc },
            Term::Inc { target, expr, loc } => ExtTerm::Inc {
                target: target.clone(),
                expr: expr.clone(),
                loc: *loc,
            },
            Term::Dec { target, expr, loc } => ExtTerm::Dec {
                target: target.clone(),
                expr: expr.clone(),
                loc: *loc,
            },
            Term::Seq { parts, .. } => ExtTerm::Seq {
                parts: parts.iter().map(ExtTerm::embed).collect(),
            },
            Term::If {
                guard,
                then_branch,
                else_branch,
                loc,
            } => ExtTerm::If {
                guard: guard.clone(),
                then_branch: Box::new(ExtTerm::embed(then_branch)),
                else_branch: Box::new(ExtTerm::embed(else_branch)),
                loc: *loc,
            },
            Term::FromTo {
                lead,
                from_bound,
                from_escape,
                to_bound,
                to_escape,
                body,
                loc,
            } => ExtTerm::FromTo {
                lead: lead.clone(),
                from_bound: from_bound.clone(),
                from_escape: from_escape.clone(),
                to_bound: to_bound.clone(),
                to_escape: to_escape.clone(),
                body: body.clone(),
                loc: *loc,
            },
        }
    }
}

/// Runs a term from an initial state. `fuel`, when given, is the maximum
/// number of loop unfoldings before the run stops with `FuelExhausted`;
/// without fuel a run always ends in `Success` or `Failure`.
///
/// Callers are expected to pass terms that satisfy `validate`; the
/// interpreter executes ill-formed terms mechanically, but none of the
/// language guarantees hold for them.
pub fn run(term: &Term, initial: &State, fuel: Option<u64>) -> (Outcome, StepStats) {
    run_with_observer(term, initial, fuel, &mut NoopObserver)
}

/// Like [`run`], reporting rule applications and loop bookkeeping to `obs`.
pub fn run_with_observer(
    term: &Term,
    initial: &State,
    fuel: Option<u64>,
    obs: &mut dyn RunObserver,
) -> (Outcome, StepStats) {
    let mut state = initial.clone();
    let mut interp = Interp {
        fuel,
        stats: StepStats::default(),
        obs,
    };
    let ext = ExtTerm::embed(term);
    match interp.exec(&ext, &mut state) {
        Ok(()) => (Outcome::Success(state), interp.stats),
        Err(Halt::Bottom { reason, loc }) => (
            Outcome::Failure {
                reason,
                location: loc,
            },
            interp.stats,
        ),
        Err(Halt::Fuel { steps_used }) => (Outcome::FuelExhausted { steps_used }, interp.stats),
    }
}

enum Halt {
    Bottom { reason: FailureReason, loc: Loc },
    Fuel { steps_used: u64 },
}

struct Interp<'o> {
    fuel: Option<u64>,
    stats: StepStats,
    obs: &'o mut dyn RunObserver,
}

impl Interp<'_> {
    fn exec(&mut self, term: &ExtTerm, state: &mut State) -> Result<(), Halt> {
        match term {
            ExtTerm::Skip { loc } => {
                self.obs.rule_applied(Rule::Skip, *loc, None);
                Ok(())
            }
            ExtTerm::Inc { target, expr, loc } => self.assign(target, expr, *loc, false, state),
            ExtTerm::Dec { target, expr, loc } => self.assign(target, expr, *loc, true, state),
            ExtTerm::Seq { parts } => {
                // A failure in one part propagates without running the rest.
                for part in parts {
                    self.exec(part, state)?;
                }
                Ok(())
            }
            ExtTerm::If {
                guard,
                then_branch,
                else_branch,
                loc,
            } => {
                self.stats.guard_evals += 1;
                if eval_bool(state, guard) == 1 {
                    self.obs.rule_applied(Rule::IfTrue, *loc, None);
                    self.exec(then_branch, state)
                } else {
                    self.obs.rule_applied(Rule::IfFalse, *loc, None);
                    self.exec(else_branch, state)
                }
            }
            ExtTerm::Assert { cond, role, loc } => {
                self.stats.assert_evals += 1;
                if eval_bool(state, cond) == 1 {
                    self.obs.rule_applied(Rule::Assert1, *loc, None);
                    Ok(())
                } else {
                    self.obs.rule_applied(Rule::Assert0, *loc, None);
                    Err(Halt::Bottom {
                        reason: *role,
                        loc: *loc,
                    })
                }
            }
            ExtTerm::FromTo {
                lead,
                from_bound,
                from_escape,
                to_bound,
                to_escape,
                body,
                loc,
            } => self.exec_from_to(
                lead,
                from_bound,
                from_escape,
                to_bound,
                to_escape,
                body,
                *loc,
                state,
            ),
            ExtTerm::LoopUntil {
                lead,
                bound,
                escape,
                body,
                loc,
            } => {
                let mut unfoldings = 0;
                self.exec_loop(lead, bound, escape, body, *loc, state, &mut unfoldings)
            }
        }
    }

    fn assign(
        &mut self,
        target: &Var,
        expr: &ArithExpr,
        loc: Loc,
        negate: bool,
        state: &mut State,
    ) -> Result<(), Halt> {
        let amount = eval_arith(state, expr);
        let old = state.get(target).clone();
        let (rule, new) = if negate {
            (Rule::Dec, &old - &amount)
        } else {
            (Rule::Inc, &old + &amount)
        };
        self.stats.assignments += 1;
        self.obs.rule_applied(rule, loc, Some((target, &old, &new)));
        state.set(target.clone(), new);
        Ok(())
    }

    /// Desugars one `from-to` per the operational semantics: the direction
    /// check `e_u <= e_v` selects either
    /// `assert(e_u<=i and i<=e_v); assert(i=e_u or e_in);
    ///  loop until(i=e_v or e_out){ P; i+=1; assert(!e_in) }`
    /// or the mirrored sequence that steps `i` down and runs the body's
    /// inverse.
    ///
    /// The per-unfolding re-entry assert tests `!e_in` alone rather than the
    /// full entry disjunction `!(i = e_u or e_in)`: once the step moves `i`
    /// off the start bound it can never return there (the body cannot write
    /// `i` or the bound variables), so the two formulations agree.
    #[allow(clippy::too_many_arguments)]
    fn exec_from_to(
        &mut self,
        lead: &Var,
        from_bound: &ArithExpr,
        from_escape: &BoolExpr,
        to_bound: &ArithExpr,
        to_escape: &BoolExpr,
        body: &Term,
        loc: Loc,
        state: &mut State,
    ) -> Result<(), Halt> {
        self.stats.guard_evals += 1;
        let u = eval_arith(state, from_bound);
        let v = eval_arith(state, to_bound);
        let forward = u <= v;
        self.obs.rule_applied(Rule::FromTo, loc, None);

        let bound_span = (&v - &u).abs();
        self.obs.loop_entered(loc, &bound_span);

        let lead_ref = ArithExpr::var(lead.clone());
        let (range_lo, range_hi) = if forward {
            (from_bound, to_bound)
        } else {
            (to_bound, from_bound)
        };
        let range_check = ExtTerm::Assert {
            cond: BoolExpr::and(
                BoolExpr::le(range_lo.clone(), lead_ref.clone()),
                BoolExpr::le(lead_ref.clone(), range_hi.clone()),
            ),
            role: FailureReason::OutOfRange,
            loc,
        };
        let entry_check = ExtTerm::Assert {
            cond: BoolExpr::or(
                BoolExpr::eq(lead_ref.clone(), from_bound.clone()),
                from_escape.clone(),
            ),
            role: FailureReason::EntryCondition,
            loc,
        };
        let reentry_check = ExtTerm::Assert {
            cond: BoolExpr::not(from_escape.clone()),
            role: FailureReason::ReEntryCondition,
            loc,
        };
        let unfolding = if forward {
            vec![
                ExtTerm::embed(body),
                ExtTerm::Inc {
                    target: lead.clone(),
                    expr: ArithExpr::int(1),
                    loc,
                },
                reentry_check,
            ]
        } else {
            vec![
                ExtTerm::Dec {
                    target: lead.clone(),
                    expr: ArithExpr::int(1),
                    loc,
                },
                ExtTerm::embed(&body.invert_unchecked()),
                reentry_check,
            ]
        };
        let loop_body = ExtTerm::Seq { parts: unfolding };

        self.exec(&range_check, state)?;
        self.exec(&entry_check, state)?;

        let mut unfoldings = 0;
        let result = self.exec_loop(
            lead,
            to_bound,
            to_escape,
            &loop_body,
            loc,
            state,
            &mut unfoldings,
        );
        self.obs.loop_finished(loc, &bound_span, unfoldings);
        result
    }

    #[allow(clippy::too_many_arguments)]
    fn exec_loop(
        &mut self,
        lead: &Var,
        bound: &ArithExpr,
        escape: &BoolExpr,
        body: &ExtTerm,
        loc: Loc,
        state: &mut State,
        unfoldings: &mut u64,
    ) -> Result<(), Halt> {
        let until = BoolExpr::or(
            BoolExpr::eq(ArithExpr::var(lead.clone()), bound.clone()),
            escape.clone(),
        );
        loop {
            self.stats.guard_evals += 1;
            if eval_bool(state, &until) == 1 {
                self.obs.rule_applied(Rule::LoopBase, loc, None);
                return Ok(());
            }
            self.obs.rule_applied(Rule::LoopRec, loc, None);
            if let Some(max) = self.fuel {
                if self.stats.loop_unfoldings >= max {
                    return Err(Halt::Fuel { steps_used: max });
                }
            }
            self.stats.loop_unfoldings += 1;
            *unfoldings += 1;
            self.exec(body, state)?;
        }
    }
}

/// Convenience used by tooling: runs and also audits, for every loop, that
/// its unfoldings never exceeded `|v - u|` measured at entry.
pub fn run_audited(
    term: &Term,
    initial: &State,
    fuel: Option<u64>,
) -> (Outcome, StepStats, Vec<LoopBoundViolation>) {
    let mut auditor = BoundAuditor::default();
    let (outcome, stats) = run_with_observer(term, initial, fuel, &mut auditor);
    (outcome, stats, auditor.violations)
}

/// A loop that unfolded more often than its entry bound allows. The
/// termination argument rules this out; seeing one means the interpreter
/// itself is wrong.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LoopBoundViolation {
    pub loc: Loc,
    pub bound: BigInt,
    pub unfoldings: u64,
}

/// Observer collecting [`LoopBoundViolation`]s.
#[derive(Default)]
pub struct BoundAuditor {
    pub violations: Vec<LoopBoundViolation>,
}

impl RunObserver for BoundAuditor {
    fn loop_finished(&mut self, loc: Loc, bound: &BigInt, unfoldings: u64) {
        if BigInt::from(unfoldings) > *bound {
            self.violations.push(LoopBoundViolation {
                loc,
                bound: bound.clone(),
                unfoldings,
            });
        }
    }
}

/// Renders a run outcome's state for humans, one sorted `var=value` line per
/// variable in `vars`.
pub fn format_state<'a>(state: &State, vars: impl IntoIterator<Item = &'a Var>) -> String {
    let mut names: Vec<&Var> = vars.into_iter().collect();
    names.sort();
    names.dedup();
    let mut out = String::new();
    for v in names {
        out.push_str(&format!("{}={}\n", v, state.get(v)));
    }
    out
}
