//! M-SRL: registers, INC/DEC, sequencing, and the counted `for` loop,
//! together with its reference interpreter, inverter, the translation into
//! forest, and the simulation checker for translated programs.

use std::collections::BTreeSet;
use std::fmt;

use num_bigint::BigInt;
use num_traits::{Signed, Zero};

use crate::interp::{run, Outcome, State};
use crate::syntax::{ArithExpr, BoolExpr, Loc, Term, Var};

/// An M-SRL program. `Seq` keeps its parts flattened; build sequences with
/// [`MsrlTerm::seq`].
#[derive(Debug, Clone)]
pub enum MsrlTerm {
    Inc {
        reg: Var,
        loc: Loc,
    },
    Dec {
        reg: Var,
        loc: Loc,
    },
    Seq {
        parts: Vec<MsrlTerm>,
        loc: Loc,
    },
    For {
        reg: Var,
        body: Box<MsrlTerm>,
        loc: Loc,
    },
}

impl MsrlTerm {
    pub fn inc(reg: Var) -> MsrlTerm {
        MsrlTerm::Inc {
            reg,
            loc: Loc::NONE,
        }
    }

    pub fn dec(reg: Var) -> MsrlTerm {
        MsrlTerm::Dec {
            reg,
            loc: Loc::NONE,
        }
    }

    pub fn seq(parts: Vec<MsrlTerm>) -> MsrlTerm {
        let mut flat = Vec::with_capacity(parts.len());
        for p in parts {
            match p {
                MsrlTerm::Seq { parts, .. } => flat.extend(parts),
                other => flat.push(other),
            }
        }
        match flat.len() {
            1 => flat.into_iter().next().unwrap(),
            _ => MsrlTerm::Seq {
                parts: flat,
                loc: Loc::NONE,
            },
        }
    }

    pub fn for_loop(reg: Var, body: MsrlTerm) -> MsrlTerm {
        MsrlTerm::For {
            reg,
            body: Box::new(body),
            loc: Loc::NONE,
        }
    }

    pub fn loc(&self) -> Loc {
        match self {
            MsrlTerm::Inc { loc, .. }
            | MsrlTerm::Dec { loc, .. }
            | MsrlTerm::Seq { loc, .. }
            | MsrlTerm::For { loc, .. } => *loc,
        }
    }

    pub fn with_loc(mut self, new_loc: Loc) -> MsrlTerm {
        match &mut self {
            MsrlTerm::Inc { loc, .. }
            | MsrlTerm::Dec { loc, .. }
            | MsrlTerm::Seq { loc, .. }
            | MsrlTerm::For { loc, .. } => *loc = new_loc,
        }
        self
    }

    /// Registers the program mentions.
    pub fn dom(&self) -> BTreeSet<Var> {
        let mut out = BTreeSet::new();
        self.collect_dom(&mut out);
        out
    }

    fn collect_dom(&self, out: &mut BTreeSet<Var>) {
        match self {
            MsrlTerm::Inc { reg, .. } | MsrlTerm::Dec { reg, .. } => {
                out.insert(reg.clone());
            }
            MsrlTerm::Seq { parts, .. } => {
                for p in parts {
                    p.collect_dom(out);
                }
            }
            MsrlTerm::For { reg, body, .. } => {
                out.insert(reg.clone());
                body.collect_dom(out);
            }
        }
    }

    /// Registers the program writes.
    pub fn wdom(&self) -> BTreeSet<Var> {
        let mut out = BTreeSet::new();
        self.collect_wdom(&mut out);
        out
    }

    fn collect_wdom(&self, out: &mut BTreeSet<Var>) {
        match self {
            MsrlTerm::Inc { reg, .. } | MsrlTerm::Dec { reg, .. } => {
                out.insert(reg.clone());
            }
            MsrlTerm::Seq { parts, .. } => {
                for p in parts {
                    p.collect_wdom(out);
                }
            }
            MsrlTerm::For { body, .. } => body.collect_wdom(out),
        }
    }
}

// Structural equality ignores source locations.
impl PartialEq for MsrlTerm {
    fn eq(&self, other: &MsrlTerm) -> bool {
        match (self, other) {
            (MsrlTerm::Inc { reg: a, .. }, MsrlTerm::Inc { reg: b, .. })
            | (MsrlTerm::Dec { reg: a, .. }, MsrlTerm::Dec { reg: b, .. }) => a == b,
            (MsrlTerm::Seq { parts: a, .. }, MsrlTerm::Seq { parts: b, .. }) => a == b,
            (
                MsrlTerm::For {
                    reg: a, body: ba, ..
                },
                MsrlTerm::For {
                    reg: b, body: bb, ..
                },
            ) => a == b && ba == bb,
            _ => false,
        }
    }
}

impl Eq for MsrlTerm {}

/// A `for` whose body writes the loop register.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MsrlViolation {
    pub reg: Var,
    pub loc: Loc,
    pub message: String,
}

impl fmt::Display for MsrlViolation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "register-write at {}: {}", self.loc, self.message)
    }
}

/// Outcome of `validate_msrl`: empty means well-formed.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct MsrlValidationReport {
    pub violations: Vec<MsrlViolation>,
}

impl MsrlValidationReport {
    pub fn is_ok(&self) -> bool {
        self.violations.is_empty()
    }
}

impl fmt::Display for MsrlValidationReport {
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

/// Reports every `for` whose body writes its own register.
pub fn validate_msrl(term: &MsrlTerm) -> MsrlValidationReport {
    let mut report = MsrlValidationReport::default();
    check(term, &mut report);
    report
}

fn check(term: &MsrlTerm, report: &mut MsrlValidationReport) {
    match term {
        MsrlTerm::Inc { .. } | MsrlTerm::Dec { .. } => {}
        MsrlTerm::Seq { parts, .. } => {
            for p in parts {
                check(p, report);
            }
        }
        MsrlTerm::For { reg, body, loc } => {
            if body.wdom().contains(reg) {
                report.violations.push(MsrlViolation {
                    reg: reg.clone(),
                    loc: *loc,
                    message: format!("loop body writes its register `{reg}`"),
                });
            }
            check(body, report);
        }
    }
}

/// Structural inversion: increments and decrements swap, sequences reverse,
/// and a loop keeps its register while its body inverts.
pub fn invert_msrl(term: &MsrlTerm) -> MsrlTerm {
    match term {
        MsrlTerm::Inc { reg, loc } => MsrlTerm::Dec {
            reg: reg.clone(),
            loc: *loc,
        },
        MsrlTerm::Dec { reg, loc } => MsrlTerm::Inc {
            reg: reg.clone(),
            loc: *loc,
        },
        MsrlTerm::Seq { parts, loc } => MsrlTerm::Seq {
            parts: parts.iter().rev().map(invert_msrl).collect(),
            loc: *loc,
        },
        MsrlTerm::For { reg, body, loc } => MsrlTerm::For {
            reg: reg.clone(),
            body: Box::new(invert_msrl(body)),
            loc: *loc,
        },
    }
}

/// Runs an M-SRL program. Total: `for r {P}` reads the register once at
/// entry and unfolds `P` that many times, or the inverse of `P` when the
/// value is negative.
pub fn run_msrl(term: &MsrlTerm, initial: &State) -> State {
    let mut state = initial.clone();
    exec(term, &mut state);
    state
}

fn exec(term: &MsrlTerm, state: &mut State) {
    match term {
        MsrlTerm::Inc { reg, .. } => {
            let new = state.get(reg) + 1;
            state.set(reg.clone(), new);
        }
        MsrlTerm::Dec { reg, .. } => {
            let new = state.get(reg) - 1;
            state.set(reg.clone(), new);
        }
        MsrlTerm::Seq { parts, .. } => {
            for p in parts {
                exec(p, state);
            }
        }
        MsrlTerm::For { reg, body, .. } => {
            let count = state.get(reg).clone();
            if count.is_negative() {
                let inverse = invert_msrl(body);
                let mut k = BigInt::zero();
                while k < -&count {
                    exec(&inverse, state);
                    k += 1;
                }
            } else {
                let mut k = BigInt::zero();
                while k < count {
                    exec(body, state);
                    k += 1;
                }
            }
        }
    }
}

/// Handle to a term's translation into forest.
pub struct FreshNames {
    counter: u64,
    taken: BTreeSet<String>,
}

impl FreshNames {
    /// A supply that never collides with a name already used in `term`, nor
    /// with anything it issued before.
    pub fn for_term(term: &MsrlTerm) -> FreshNames {
        FreshNames {
            counter: 0,
            taken: term.dom().iter().map(|v| v.name().to_string()).collect(),
        }
    }

    fn next(&mut self) -> Var {
        loop {
            let candidate = format!("_it{}", self.counter);
            self.counter += 1;
            if self.taken.insert(candidate.clone()) {
                return Var::new(candidate);
            }
        }
    }
}

/// Translates M-SRL into forest:
/// `INC r` is `r += 1`, `DEC r` is `r -= 1`, sequences map across, and
/// `for r {P}` becomes `from (i = 0 or 0) to (i = r or 0) { P' }; i -= r`
/// with `i` a fresh leading variable.
pub fn translate(term: &MsrlTerm) -> Term {
    let mut fresh = FreshNames::for_term(term);
    translate_with(term, &mut fresh)
}

fn translate_with(term: &MsrlTerm, fresh: &mut FreshNames) -> Term {
    match term {
        MsrlTerm::Inc { reg, loc } => Term::inc(reg.clone(), ArithExpr::int(1)).with_loc(*loc),
        MsrlTerm::Dec { reg, loc } => Term::dec(reg.clone(), ArithExpr::int(1)).with_loc(*loc),
        MsrlTerm::Seq { parts, .. } => {
            Term::seq(parts.iter().map(|p| translate_with(p, fresh)).collect())
        }
        MsrlTerm::For { reg, body, loc } => {
            let lead = fresh.next();
            let loop_term = Term::from_to(
                lead.clone(),
                ArithExpr::int(0),
                BoolExpr::False,
                ArithExpr::var(reg.clone()),
                BoolExpr::False,
                translate_with(body, fresh),
            )
            .with_loc(*loc);
            Term::seq(vec![
                loop_term,
                Term::dec(lead, ArithExpr::var(reg.clone())).with_loc(*loc),
            ])
        }
    }
}

/// Result of checking that a translated program simulates its source.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum SimulationVerdict {
    Pass {
        msrl_final: State,
        forest_final: State,
    },
    Fail {
        reason: String,
        msrl_final: State,
        forest_final: Option<State>,
    },
}

impl SimulationVerdict {
    pub fn is_pass(&self) -> bool {
        matches!(self, SimulationVerdict::Pass { .. })
    }
}

/// Runs `msrl` natively and its translation under the forest interpreter,
/// then compares. PASS means the forest run succeeded, both finals agree on
/// every register of `msrl`, and every fresh leading variable ended at 0.
///
/// The initial state is extended with zeros for the translation's leading
/// variables, so callers need not know which names the supply issued.
pub fn check_simulation(msrl: &MsrlTerm, initial: &State) -> SimulationVerdict {
    let translated = translate(msrl);
    let leads = translated.lead_vars();

    let mut forest_initial = initial.clone();
    for lead in &leads {
        forest_initial.set(lead.clone(), BigInt::zero());
    }

    let msrl_final = run_msrl(msrl, initial);
    let (outcome, _) = run(&translated, &forest_initial, None);

    let forest_final = match outcome {
        Outcome::Success(st) => st,
        Outcome::Failure { reason, location } => {
            return SimulationVerdict::Fail {
                reason: format!("forest run failed: {reason} at {location}"),
                msrl_final,
                forest_final: None,
            }
        }
        Outcome::FuelExhausted { .. } => unreachable!("no fuel was supplied"),
    };

    if !msrl_final.agrees_with(&forest_final, msrl.dom().iter()) {
        return SimulationVerdict::Fail {
            reason: "states disagree on the program domain".to_string(),
            msrl_final,
            forest_final: Some(forest_final),
        };
    }
    if let Some(dirty) = leads.iter().find(|l| !forest_final.get(l).is_zero()) {
        return SimulationVerdict::Fail {
            reason: format!("leading variable `{dirty}` did not return to 0"),
            msrl_final,
            forest_final: Some(forest_final),
        };
    }
    SimulationVerdict::Pass {
        msrl_final,
        forest_final,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn v(name: &str) -> Var {
        Var::new(name)
    }

    fn for_inc_j() -> MsrlTerm {
        MsrlTerm::for_loop(v("r"), MsrlTerm::inc(v("j")))
    }

    #[test]
    fn validate_accepts_simple_loop() {
        assert!(validate_msrl(&for_inc_j()).is_ok());
    }

    #[test]
    fn validate_rejects_body_writing_register() {
        let t = MsrlTerm::for_loop(v("r"), MsrlTerm::dec(v("r")));
        let report = validate_msrl(&t);
        assert_eq!(report.violations.len(), 1);
        assert_eq!(report.violations[0].reg, v("r"));
    }

    #[test]
    fn validate_rejects_nested_write_on_outer_loop() {
        let t = MsrlTerm::for_loop(v("r"), MsrlTerm::for_loop(v("s"), MsrlTerm::inc(v("r"))));
        let report = validate_msrl(&t);
        assert_eq!(report.violations.len(), 1);
        assert_eq!(report.violations[0].reg, v("r"));
    }

    #[test]
    fn positive_count_unfolds_body() {
        let initial = State::from_pairs([(v("r"), 3), (v("j"), 0)]);
        let final_state = run_msrl(&for_inc_j(), &initial);
        assert_eq!(final_state, State::from_pairs([(v("r"), 3), (v("j"), 3)]));
    }

    #[test]
    fn negative_count_unfolds_inverse() {
        let initial = State::from_pairs([(v("r"), -2), (v("j"), 0)]);
        let final_state = run_msrl(&for_inc_j(), &initial);
        assert_eq!(final_state, State::from_pairs([(v("r"), -2), (v("j"), -2)]));
    }

    #[test]
    fn inc_dec_pair_is_identity() {
        let t = MsrlTerm::seq(vec![MsrlTerm::inc(v("r")), MsrlTerm::dec(v("r"))]);
        let initial = State::from_pairs([(v("r"), 41)]);
        assert_eq!(run_msrl(&t, &initial), initial);
    }

    #[test]
    fn invert_swaps_inc_and_dec() {
        assert_eq!(invert_msrl(&MsrlTerm::inc(v("r"))), MsrlTerm::dec(v("r")));
    }

    #[test]
    fn invert_maps_into_loop_bodies() {
        assert_eq!(
            invert_msrl(&for_inc_j()),
            MsrlTerm::for_loop(v("r"), MsrlTerm::dec(v("j")))
        );
    }

    #[test]
    fn invert_reverses_sequences() {
        let t = MsrlTerm::seq(vec![MsrlTerm::inc(v("a")), MsrlTerm::dec(v("b"))]);
        let expected = MsrlTerm::seq(vec![MsrlTerm::inc(v("b")), MsrlTerm::dec(v("a"))]);
        assert_eq!(invert_msrl(&t), expected);
    }

    #[test]
    fn inversion_undoes_runs() {
        let t = MsrlTerm::seq(vec![
            MsrlTerm::inc(v("j")),
            MsrlTerm::for_loop(
                v("r"),
                MsrlTerm::seq(vec![MsrlTerm::inc(v("j")), MsrlTerm::inc(v("k"))]),
            ),
        ]);
        let initial = State::from_pairs([(v("r"), 4), (v("j"), -1), (v("k"), 2)]);
        let forward = run_msrl(&t, &initial);
        assert_eq!(run_msrl(&invert_msrl(&t), &forward), initial);
    }

    #[test]
    fn translate_inc_is_increment_by_one() {
        assert_eq!(
            translate(&MsrlTerm::inc(v("r"))),
            Term::inc(v("r"), ArithExpr::int(1))
        );
    }

    #[test]
    fn translate_for_loop_matches_definition() {
        let it0 = v("_it0");
        let expected = Term::seq(vec![
            Term::from_to(
                it0.clone(),
                ArithExpr::int(0),
                BoolExpr::False,
                ArithExpr::var(v("r")),
                BoolExpr::False,
                Term::inc(v("j"), ArithExpr::int(1)),
            ),
            Term::dec(it0, ArithExpr::var(v("r"))),
        ]);
        assert_eq!(translate(&for_inc_j()), expected);
    }

    #[test]
    fn translate_nested_loops_use_distinct_leads() {
        let t = MsrlTerm::for_loop(v("r"), MsrlTerm::for_loop(v("s"), MsrlTerm::inc(v("j"))));
        let translated = translate(&t);
        let leads = translated.lead_vars();
        assert_eq!(leads.len(), 2);
        assert!(leads.contains(&v("_it0")) && leads.contains(&v("_it1")));
        assert!(translated.validate().is_ok());
    }

    #[test]
    fn translate_output_is_well_formed_with_disjoint_leads() {
        let t = MsrlTerm::seq(vec![
            for_inc_j(),
            MsrlTerm::for_loop(v("j"), MsrlTerm::inc(v("r"))),
        ]);
        let translated = translate(&t);
        assert!(translated.validate().is_ok());
        let leads = translated.lead_vars();
        assert!(leads.is_disjoint(&t.dom()));
        // dom of the translation is the source dom plus the fresh leads
        let mut expected_dom = t.dom();
        expected_dom.extend(leads);
        assert_eq!(translated.dom(), expected_dom);
    }

    #[test]
    fn fresh_supply_skips_names_in_source() {
        // A source program that already mentions `_it0` must not get it again.
        let t = MsrlTerm::for_loop(v("r"), MsrlTerm::inc(v("_it0")));
        let translated = translate(&t);
        assert_eq!(translated.lead_vars().into_iter().next(), Some(v("_it1")));
        assert!(translated.validate().is_ok());
    }

    #[test]
    fn simulation_passes_on_section_example() {
        let initial = State::from_pairs([(v("r"), 3), (v("j"), 0)]);
        let verdict = check_simulation(&for_inc_j(), &initial);
        let SimulationVerdict::Pass { forest_final, .. } = verdict else {
            panic!("expected PASS, got {verdict:?}");
        };
        assert_eq!(forest_final.get(&v("j")), &BigInt::from(3));
        assert_eq!(forest_final.get(&v("_it0")), &BigInt::from(0));
    }

    #[test]
    fn simulation_passes_on_inverse_pair() {
        let t = MsrlTerm::seq(vec![MsrlTerm::inc(v("r")), MsrlTerm::dec(v("r"))]);
        let initial = State::from_pairs([(v("r"), 7)]);
        assert!(check_simulation(&t, &initial).is_pass());
    }

    #[test]
    fn simulation_passes_with_negative_register() {
        let initial = State::from_pairs([(v("r"), -5), (v("j"), 2)]);
        let verdict = check_simulation(&for_inc_j(), &initial);
        let SimulationVerdict::Pass {
            msrl_final,
            forest_final,
        } = verdict
        else {
            panic!("expected PASS, got {verdict:?}");
        };
        assert_eq!(msrl_final.get(&v("j")), &BigInt::from(-3));
        assert_eq!(forest_final.get(&v("j")), &BigInt::from(-3));
    }
}
