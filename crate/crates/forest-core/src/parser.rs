//! Concrete-syntax front end for `.fst` (forest) and `.srl` (M-SRL) files:
//! a shared lexer and recursive-descent parsers for both languages.
//!
//! Grammar (forest):
//!
//! ```text
//! program := stmt (";" stmt)*
//! stmt    := "skip" | ident "+=" aexp | ident "-=" aexp
//!          | "if" "(" bexp ")" "{" program "}" "else" "{" program "}"
//!          | "from" "(" header ")" "to" "(" header ")" "{" program "}"
//! header  := bexp     -- must decompose as (ident = aexp) or bexp
//! aexp    := aterm (("+" | "-") aterm)*
//! aterm   := intlit | ident | "-" aterm | "(" aexp ")"
//! bexp    := conj ("or" conj)*
//! conj    := atom ("and" atom)*
//! atom    := "0" | "1" | "!" atom | aexp "=" aexp | "(" bexp ")"
//! ```
//!
//! M-SRL: `program := stmt (";" stmt)*` with
//! `stmt := "INC" ident | "DEC" ident | "for" ident "{" program "}"`.
//!
//! `//` starts a comment running to end of line. A trailing `;` before a
//! closing brace or end of input is tolerated with a warning. A bare `0` or
//! `1` in boolean position is a truth value; as an equality operand it is an
//! integer literal.

use num_bigint::BigInt;
use thiserror::Error;

use crate::msrl::MsrlTerm;
use crate::syntax::{ArithExpr, BoolExpr, Loc, Term, Var};

/// A source file: the text plus a display name for diagnostics.
#[derive(Debug, Clone)]
pub struct SourceFile {
    pub text: String,
    pub origin: String,
}

impl SourceFile {
    pub fn new(origin: impl Into<String>, text: impl Into<String>) -> SourceFile {
        SourceFile {
            origin: origin.into(),
            text: text.into(),
        }
    }
}

/// A syntax error with the position it occurred at.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("{loc}: {message}")]
pub struct SyntaxError {
    pub loc: Loc,
    pub message: String,
}

/// A non-fatal oddity the parser tolerated.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ParseWarning {
    pub loc: Loc,
    pub message: String,
}

/// A successful parse: the term plus any warnings.
#[derive(Debug, Clone)]
pub struct Parsed<T> {
    pub term: T,
    pub warnings: Vec<ParseWarning>,
}

/// Parses forest source text.
pub fn parse_forest(src: &SourceFile) -> Result<Parsed<Term>, Vec<SyntaxError>> {
    let tokens = lex(&src.text)?;
    let mut parser = Parser::new(tokens);
    let term = parser.parse_forest_program(false);
    parser.expect_end();
    parser.finish(term)
}

/// Parses M-SRL source text.
pub fn parse_msrl(src: &SourceFile) -> Result<Parsed<MsrlTerm>, Vec<SyntaxError>> {
    let tokens = lex(&src.text)?;
    let mut parser = Parser::new(tokens);
    let term = parser.parse_msrl_program(false);
    parser.expect_end();
    parser.finish(term)
}

// ---------------------------------------------------------------------------
// Lexer

#[derive(Debug, Clone, PartialEq, Eq)]
enum Tok {
    Ident(String),
    Int(BigInt),
    KwSkip,
    KwIf,
    KwElse,
    KwFrom,
    KwTo,
    KwOr,
    KwAnd,
    KwInc,
    KwDec,
    KwFor,
    Plus,
    Minus,
    PlusEq,
    MinusEq,
    Equal,
    Bang,
    LParen,
    RParen,
    LBrace,
    RBrace,
    Semi,
    Eof,
}

impl Tok {
    fn describe(&self) -> String {
        match self {
            Tok::Ident(name) => format!("identifier `{name}`"),
            Tok::Int(n) => format!("integer `{n}`"),
            Tok::KwSkip => "`skip`".into(),
            Tok::KwIf => "`if`".into(),
            Tok::KwElse => "`else`".into(),
            Tok::KwFrom => "`from`".into(),
            Tok::KwTo => "`to`".into(),
            Tok::KwOr => "`or`".into(),
            Tok::KwAnd => "`and`".into(),
            Tok::KwInc => "`INC`".into(),
            Tok::KwDec => "`DEC`".into(),
            Tok::KwFor => "`for`".into(),
            Tok::Plus => "`+`".into(),
            Tok::Minus => "`-`".into(),
            Tok::PlusEq => "`+=`".into(),
            Tok::MinusEq => "`-=`".into(),
            Tok::Equal => "`=`".into(),
            Tok::Bang => "`!`".into(),
            Tok::LParen => "`(`".into(),
            Tok::RParen => "`)`".into(),
            Tok::LBrace => "`{`".into(),
            Tok::RBrace => "`}`".into(),
            Tok::Semi => "`;`".into(),
            Tok::Eof => "end of input".into(),
        }
    }
}

#[derive(Debug, Clone)]
struct Token {
    tok: Tok,
    loc: Loc,
}

fn keyword(name: &str) -> Option<Tok> {
    Some(match name {
        "skip" => Tok::KwSkip,
        "if" => Tok::KwIf,
        "else" => Tok::KwElse,
        "from" => Tok::KwFrom,
        "to" => Tok::KwTo,
        "or" => Tok::KwOr,
        "and" => Tok::KwAnd,
        "INC" => Tok::KwInc,
        "DEC" => Tok::KwDec,
        "for" => Tok::KwFor,
        _ => return None,
    })
}

fn lex(text: &str) -> Result<Vec<Token>, Vec<SyntaxError>> {
    let chars: Vec<char> = text.chars().collect();
    let mut tokens = Vec::new();
    let mut errors = Vec::new();
    let mut idx = 0;
    let mut line: u32 = 1;
    let mut col: u32 = 1;

    macro_rules! push {
        ($tok:expr, $loc:expr) => {
            tokens.push(Token {
                tok: $tok,
                loc: $loc,
            })
        };
    }

    while idx < chars.len() {
        let c = chars[idx];
        let loc = Loc::new(line, col);
        match c {
            '\n' => {
                idx += 1;
                line += 1;
                col = 1;
            }
            c if c.is_whitespace() => {
                idx += 1;
                col += 1;
            }
            '/' if chars.get(idx + 1) == Some(&'/') => {
                while idx < chars.len() && chars[idx] != '\n' {
                    idx += 1;
                }
            }
            '+' => {
                if chars.get(idx + 1) == Some(&'=') {
                    push!(Tok::PlusEq, loc);
                    idx += 2;
                    col += 2;
                } else {
                    push!(Tok::Plus, loc);
                    idx += 1;
                    col += 1;
                }
            }
            '-' => {
                if chars.get(idx + 1) == Some(&'=') {
                    push!(Tok::MinusEq, loc);
                    idx += 2;
                    col += 2;
                } else {
                    push!(Tok::Minus, loc);
                    idx += 1;
                    col += 1;
                }
            }
            '=' => {
                push!(Tok::Equal, loc);
                idx += 1;
                col += 1;
            }
            '!' => {
                push!(Tok::Bang, loc);
                idx += 1;
                col += 1;
            }
            '(' => {
                push!(Tok::LParen, loc);
                idx += 1;
                col += 1;
            }
            ')' => {
                push!(Tok::RParen, loc);
                idx += 1;
                col += 1;
            }
            '{' => {
                push!(Tok::LBrace, loc);
                idx += 1;
                col += 1;
            }
            '}' => {
                push!(Tok::RBrace, loc);
                idx += 1;
                col += 1;
            }
            ';' => {
                push!(Tok::Semi, loc);
                idx += 1;
                col += 1;
            }
            c if c.is_ascii_digit() => {
                let start = idx;
                while idx < chars.len() && chars[idx].is_ascii_digit() {
                    idx += 1;
                    col += 1;
                }
                let digits: String = chars[start..idx].iter().collect();
                push!(Tok::Int(digits.parse().expect("digit run")), loc);
            }
            c if c.is_ascii_alphabetic() || c == '_' => {
                let start = idx;
                while idx < chars.len() && (chars[idx].is_ascii_alphanumeric() || chars[idx] == '_')
                {
                    idx += 1;
                    col += 1;
                }
                let name: String = chars[start..idx].iter().collect();
                match keyword(&name) {
                    Some(kw) => push!(kw, loc),
                    None => push!(Tok::Ident(name), loc),
                }
            }
            other => {
                errors.push(SyntaxError {
                    loc,
                    message: format!("unexpected character `{other}`"),
                });
                idx += 1;
                col += 1;
            }
        }
    }
    tokens.push(Token {
        tok: Tok::Eof,
        loc: Loc::new(line, col),
    });

    if errors.is_empty() {
        Ok(tokens)
    } else {
        Err(errors)
    }
}

// ---------------------------------------------------------------------------
// Parser

struct Parser {
    tokens: Vec<Token>,
    pos: usize,
    errors: Vec<SyntaxError>,
    warnings: Vec<ParseWarning>,
}

impl Parser {
    fn new(tokens: Vec<Token>) -> Parser {
        Parser {
            tokens,
            pos: 0,
            errors: Vec::new(),
            warnings: Vec::new(),
        }
    }

    fn peek(&self) -> &Tok {
        &self.tokens[self.pos].tok
    }

    fn peek_loc(&self) -> Loc {
        self.tokens[self.pos].loc
    }

    fn advance(&mut self) -> Loc {
        let loc = self.tokens[self.pos].loc;
        if self.pos + 1 < self.tokens.len() {
            self.pos += 1;
        }
        loc
    }

    fn eat(&mut self, tok: &Tok) -> Option<Loc> {
        if self.peek() == tok {
            Some(self.advance())
        } else {
            None
        }
    }

    fn expect(&mut self, tok: Tok) -> Result<Loc, SyntaxError> {
        if self.peek() == &tok {
            Ok(self.advance())
        } else {
            Err(self.error_here(format!(
                "expected {}, found {}",
                tok.describe(),
                self.peek().describe()
            )))
        }
    }

    fn error_here(&self, message: String) -> SyntaxError {
        SyntaxError {
            loc: self.peek_loc(),
            message,
        }
    }

    fn expect_end(&mut self) {
        if self.peek() != &Tok::Eof {
            let err = self.error_here(format!(
                "expected `;` or end of input, found {}",
                self.peek().describe()
            ));
            self.errors.push(err);
        }
    }

    fn finish<T>(self, term: T) -> Result<Parsed<T>, Vec<SyntaxError>> {
        if self.errors.is_empty() {
            Ok(Parsed {
                term,
                warnings: self.warnings,
            })
        } else {
            Err(self.errors)
        }
    }

    /// Skips ahead to the next statement boundary after an error: a `;` or
    /// `}` at the current nesting depth, or end of input.
    fn synchronize(&mut self) {
        let mut depth = 0usize;
        loop {
            match self.peek() {
                Tok::Eof => return,
                Tok::Semi if depth == 0 => return,
                Tok::LBrace => {
                    depth += 1;
                    self.advance();
                }
                Tok::RBrace => {
                    if depth == 0 {
                        return;
                    }
                    depth -= 1;
                    self.advance();
                }
                _ => {
                    self.advance();
                }
            }
        }
    }

    // -- statements: forest ------------------------------------------------

    fn parse_forest_program(&mut self, inside_braces: bool) -> Term {
        let mut parts = Vec::new();
        loop {
            match self.parse_forest_stmt() {
                Ok(stmt) => parts.push(stmt),
                Err(err) => {
                    self.errors.push(err);
                    self.synchronize();
                }
            }
            if let Some(semi_loc) = self.eat(&Tok::Semi) {
                let at_close = if inside_braces {
                    self.peek() == &Tok::RBrace
                } else {
                    self.peek() == &Tok::Eof
                };
                if at_close {
                    self.warnings.push(ParseWarning {
                        loc: semi_loc,
                        message: "trailing `;` before end of block".into(),
                    });
                    break;
                }
                continue;
            }
            break;
        }
        finish_seq(parts, Term::seq, Term::skip)
    }

    fn parse_forest_stmt(&mut self) -> Result<Term, SyntaxError> {
        match self.peek().clone() {
            Tok::KwSkip => {
                let loc = self.advance();
                Ok(Term::skip().with_loc(loc))
            }
            Tok::Ident(name) => {
                let loc = self.advance();
                let target = self.make_var(name, loc)?;
                match self.peek() {
                    Tok::PlusEq => {
                        self.advance();
                        let expr = self.parse_aexp()?;
                        Ok(Term::inc(target, expr).with_loc(loc))
                    }
                    Tok::MinusEq => {
                        self.advance();
                        let expr = self.parse_aexp()?;
                        Ok(Term::dec(target, expr).with_loc(loc))
                    }
                    other => Err(self.error_here(format!(
                        "expected `+=` or `-=` after `{target}`, found {}",
                        other.describe()
                    ))),
                }
            }
            Tok::KwIf => {
                let loc = self.advance();
                self.expect(Tok::LParen)?;
                let guard = self.parse_bexp()?;
                self.expect(Tok::RParen)?;
                self.expect(Tok::LBrace)?;
                let then_branch = self.parse_forest_program(true);
                self.expect(Tok::RBrace)?;
                self.expect(Tok::KwElse)?;
                self.expect(Tok::LBrace)?;
                let else_branch = self.parse_forest_program(true);
                self.expect(Tok::RBrace)?;
                Ok(Term::if_else(guard, then_branch, else_branch).with_loc(loc))
            }
            Tok::KwFrom => {
                let loc = self.advance();
                self.expect(Tok::LParen)?;
                let from_loc = self.peek_loc();
                let from_header = self.parse_bexp()?;
                self.expect(Tok::RParen)?;
                self.expect(Tok::KwTo)?;
                self.expect(Tok::LParen)?;
                let to_loc = self.peek_loc();
                let to_header = self.parse_bexp()?;
                self.expect(Tok::RParen)?;
                self.expect(Tok::LBrace)?;
                let body = self.parse_forest_program(true);
                self.expect(Tok::RBrace)?;

                let (from_lead, from_bound, from_escape) = decompose_header(from_header, from_loc)?;
                let (to_lead, to_bound, to_escape) = decompose_header(to_header, to_loc)?;
                if from_lead != to_lead {
                    return Err(SyntaxError {
                        loc: to_loc,
                        message: format!(
                            "leading variable mismatch: `{from_lead}` in the from-header vs `{to_lead}` in the to-header"
                        ),
                    });
                }
                Ok(Term::FromTo {
                    lead: from_lead,
                    from_bound,
                    from_escape,
                    to_bound,
                    to_escape,
                    body: Box::new(body),
                    loc,
                })
            }
            other => {
                Err(self.error_here(format!("expected a statement, found {}", other.describe())))
            }
        }
    }

    // -- statements: M-SRL -------------------------------------------------

    fn parse_msrl_program(&mut self, inside_braces: bool) -> MsrlTerm {
        let mut parts = Vec::new();
        loop {
            match self.parse_msrl_stmt() {
                Ok(stmt) => parts.push(stmt),
                Err(err) => {
                    self.errors.push(err);
                    self.synchronize();
                }
            }
            if let Some(semi_loc) = self.eat(&Tok::Semi) {
                let at_close = if inside_braces {
                    self.peek() == &Tok::RBrace
                } else {
                    self.peek() == &Tok::Eof
                };
                if at_close {
                    self.warnings.push(ParseWarning {
                        loc: semi_loc,
                        message: "trailing `;` before end of block".into(),
                    });
                    break;
                }
                continue;
            }
            break;
        }
        finish_seq(parts, MsrlTerm::seq, || MsrlTerm::Seq {
            parts: Vec::new(),
            loc: Loc::NONE,
        })
    }

    fn parse_msrl_stmt(&mut self) -> Result<MsrlTerm, SyntaxError> {
        match self.peek().clone() {
            Tok::KwInc => {
                let loc = self.advance();
                let reg = self.expect_ident()?;
                Ok(MsrlTerm::inc(reg).with_loc(loc))
            }
            Tok::KwDec => {
                let loc = self.advance();
                let reg = self.expect_ident()?;
                Ok(MsrlTerm::dec(reg).with_loc(loc))
            }
            Tok::KwFor => {
                let loc = self.advance();
                let reg = self.expect_ident()?;
                self.expect(Tok::LBrace)?;
                let body = self.parse_msrl_program(true);
                self.expect(Tok::RBrace)?;
                Ok(MsrlTerm::for_loop(reg, body).with_loc(loc))
            }
            other => Err(self.error_here(format!(
                "expected `INC`, `DEC`, or `for`, found {}",
                other.describe()
            ))),
        }
    }

    fn expect_ident(&mut self) -> Result<Var, SyntaxError> {
        match self.peek().clone() {
            Tok::Ident(name) => {
                let loc = self.advance();
                self.make_var(name, loc)
            }
            other => Err(self.error_here(format!(
                "expected a register name, found {}",
                other.describe()
            ))),
        }
    }

    fn make_var(&self, name: String, loc: Loc) -> Result<Var, SyntaxError> {
        Var::try_new(name).map_err(|e| SyntaxError {
            loc,
            message: e.to_string(),
        })
    }

    // -- expressions ---------------------------------------------------------

    fn parse_aexp(&mut self) -> Result<ArithExpr, SyntaxError> {
        let mut expr = self.parse_aterm()?;
        loop {
            if self.eat(&Tok::Plus).is_some() {
                expr = ArithExpr::add(expr, self.parse_aterm()?);
            } else if self.eat(&Tok::Minus).is_some() {
                expr = ArithExpr::sub(expr, self.parse_aterm()?);
            } else {
                return Ok(expr);
            }
        }
    }

    fn parse_aterm(&mut self) -> Result<ArithExpr, SyntaxError> {
        match self.peek().clone() {
            Tok::Int(n) => {
                self.advance();
                Ok(ArithExpr::Int(n))
            }
            Tok::Ident(name) => {
                let loc = self.advance();
                Ok(ArithExpr::var(self.make_var(name, loc)?))
            }
            Tok::Minus => {
                self.advance();
                Ok(ArithExpr::neg(self.parse_aterm()?))
            }
            Tok::LParen => {
                self.advance();
                let expr = self.parse_aexp()?;
                self.expect(Tok::RParen)?;
                Ok(expr)
            }
            other => Err(self.error_here(format!(
                "expected an integer expression, found {}",
                other.describe()
            ))),
        }
    }

    fn parse_bexp(&mut self) -> Result<BoolExpr, SyntaxError> {
        let mut expr = self.parse_conj()?;
        while self.eat(&Tok::KwOr).is_some() {
            expr = BoolExpr::or(expr, self.parse_conj()?);
        }
        Ok(expr)
    }

    fn parse_conj(&mut self) -> Result<BoolExpr, SyntaxError> {
        let mut expr = self.parse_bool_atom()?;
        while self.eat(&Tok::KwAnd).is_some() {
            expr = BoolExpr::and(expr, self.parse_bool_atom()?);
        }
        Ok(expr)
    }

    fn parse_bool_atom(&mut self) -> Result<BoolExpr, SyntaxError> {
        if self.eat(&Tok::Bang).is_some() {
            return Ok(BoolExpr::not(self.parse_bool_atom()?));
        }
        // `(` is ambiguous: it may open a boolean group or an integer
        // expression that is the left side of an equality. Try the boolean
        // reading, falling back when it fails or an `=` follows.
        if self.peek() == &Tok::LParen {
            let save = self.pos;
            self.advance();
            if let Ok(inner) = self.parse_bexp() {
                if self.eat(&Tok::RParen).is_some() && self.peek() != &Tok::Equal {
                    return Ok(inner);
                }
            }
            self.pos = save;
        }
        let loc = self.peek_loc();
        let left = self.parse_aexp()?;
        if self.eat(&Tok::Equal).is_some() {
            let right = self.parse_aexp()?;
            return Ok(BoolExpr::eq(left, right));
        }
        match left {
            ArithExpr::Int(n) if n == BigInt::from(0) => Ok(BoolExpr::False),
            ArithExpr::Int(n) if n == BigInt::from(1) => Ok(BoolExpr::True),
            _ => Err(SyntaxError {
                loc,
                message: "expected a boolean expression (`0`, `1`, `!`, an equality, or a group)"
                    .into(),
            }),
        }
    }
}

/// Assembles statement lists: one statement stands alone, several form a
/// sequence stamped with the first statement's position.
fn finish_seq<T>(parts: Vec<T>, seq: impl Fn(Vec<T>) -> T, empty: impl Fn() -> T) -> T {
    match parts.len() {
        0 => empty(),
        1 => parts.into_iter().next().unwrap(),
        _ => seq(parts),
    }
}

/// Splits a loop header into (leading variable, bound, escape).
///
/// The header must read `(i = e) or b`: the parsed expression's leftmost
/// or-spine element has to be an equality with a plain variable on the left,
/// and the remaining disjuncts fold back into the escape.
fn decompose_header(header: BoolExpr, loc: Loc) -> Result<(Var, ArithExpr, BoolExpr), SyntaxError> {
    let mut spine = Vec::new();
    flatten_or(header, &mut spine);
    if spine.len() < 2 {
        return Err(SyntaxError {
            loc,
            message: "loop header must have the shape `(<var> = <expr>) or <bool>`".into(),
        });
    }
    let escape = spine
        .split_off(1)
        .into_iter()
        .reduce(BoolExpr::or)
        .expect("at least one disjunct");
    match spine.into_iter().next().expect("first disjunct") {
        BoolExpr::Eq(ArithExpr::Var(lead), bound) => Ok((lead, bound, escape)),
        BoolExpr::Eq(_, _) => Err(SyntaxError {
            loc,
            message: "the header equality must have a plain variable on the left".into(),
        }),
        _ => Err(SyntaxError {
            loc,
            message: "loop header must have the shape `(<var> = <expr>) or <bool>`".into(),
        }),
    }
}

fn flatten_or(expr: BoolExpr, out: &mut Vec<BoolExpr>) {
    match expr {
        BoolExpr::Or(left, right) => {
            flatten_or(*left, out);
            out.push(*right);
        }
        other => out.push(other),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn v(name: &str) -> Var {
        Var::new(name)
    }

    fn parse_ok(text: &str) -> Term {
        let parsed = parse_forest(&SourceFile::new("test.fst", text))
            .unwrap_or_else(|errs| panic!("parse failed: {errs:?}"));
        parsed.term
    }

    fn parse_errs(text: &str) -> Vec<SyntaxError> {
        parse_forest(&SourceFile::new("test.fst", text)).expect_err("expected parse errors")
    }

    fn guard_of(text: &str) -> BoolExpr {
        let term = parse_ok(&format!("if ({text}) {{skip}} else {{skip}}"));
        let Term::If { guard, .. } = term else {
            panic!("expected selection");
        };
        guard
    }

    const MIN_POS_SOURCE: &str = "\
// m, n >= 0, x=m, y=n, i=0, min=0, found=0
min += x;
from ((i=0) or 0) to ((i=x) or (found=1)) {
    if (i=y) {
        min -= x;
        min += y;
        found += 1
    } else {skip}
}
// min = MIN(m, n)
";

    fn min_pos_reference_term() -> Term {
        let (x, y, i, min, found) = (v("x"), v("y"), v("i"), v("min"), v("found"));
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

    #[test]
    fn parses_min_pos_source() {
        assert_eq!(parse_ok(MIN_POS_SOURCE), min_pos_reference_term());
    }

    #[test]
    fn parses_bare_skip() {
        assert_eq!(parse_ok("skip"), Term::skip());
    }

    #[test]
    fn rejects_leading_variable_mismatch() {
        let errs = parse_errs("from (i=0 or 0) to (j=1 or 0) {skip}");
        assert!(errs[0].message.contains("leading variable mismatch"));
        assert!(errs[0].message.contains('i') && errs[0].message.contains('j'));
    }

    #[test]
    fn rejects_headers_without_escape() {
        let errs = parse_errs("from (i=0) to (i=5 or 0) {skip}");
        assert!(errs[0].message.contains("shape"));
    }

    #[test]
    fn rejects_header_equality_without_variable() {
        let errs = parse_errs("from (0=i or 0) to (i=5 or 0) {skip}");
        assert!(errs[0].message.contains("variable on the left"));
    }

    #[test]
    fn header_extra_disjuncts_fold_into_escape() {
        let term = parse_ok("from (i=0 or 0) to (i=5 or a=1 or b=2) {skip}");
        let Term::FromTo { to_escape, .. } = term else {
            panic!("expected loop");
        };
        assert_eq!(
            to_escape,
            BoolExpr::or(
                BoolExpr::eq(ArithExpr::var(v("a")), ArithExpr::int(1)),
                BoolExpr::eq(ArithExpr::var(v("b")), ArithExpr::int(2)),
            )
        );
    }

    #[test]
    fn comments_are_ignored() {
        assert_eq!(parse_ok("skip // the rest; is += ignored"), Term::skip());
    }

    #[test]
    fn trailing_semicolon_warns() {
        let parsed = parse_forest(&SourceFile::new("t", "x += 1;\n")).unwrap();
        assert_eq!(parsed.warnings.len(), 1);
        assert!(parsed.warnings[0].message.contains("trailing"));

        let parsed = parse_forest(&SourceFile::new("t", "if (0) {skip;} else {skip}")).unwrap();
        assert_eq!(parsed.warnings.len(), 1);
    }

    #[test]
    fn errors_carry_positions() {
        let errs = parse_errs("skip;\n  += 1");
        assert_eq!(errs[0].loc, Loc::new(2, 3));

        let errs = parse_errs("skip;\n  ?");
        assert_eq!(errs[0].loc, Loc::new(2, 3));
    }

    #[test]
    fn reports_multiple_statement_errors() {
        let errs = parse_errs("oops;\nx 2;\nskip");
        assert!(errs.len() >= 2, "got {errs:?}");
    }

    #[test]
    fn unary_minus_folds_literals_only() {
        let term = parse_ok("x += (-1) + -y");
        let Term::Inc { expr, .. } = term else {
            panic!("expected increment");
        };
        assert_eq!(
            expr,
            ArithExpr::add(
                ArithExpr::int(-1),
                ArithExpr::sub(ArithExpr::int(0), ArithExpr::var(v("y"))),
            )
        );
    }

    #[test]
    fn additive_operators_associate_left() {
        let term = parse_ok("x += 1 - 2 + 3");
        let Term::Inc { expr, .. } = term else {
            panic!("expected increment");
        };
        assert_eq!(
            expr,
            ArithExpr::add(
                ArithExpr::sub(ArithExpr::int(1), ArithExpr::int(2)),
                ArithExpr::int(3),
            )
        );
    }

    #[test]
    fn boolean_precedence_not_and_or() {
        assert_eq!(
            guard_of("0 or 1 and 0"),
            BoolExpr::or(
                BoolExpr::False,
                BoolExpr::and(BoolExpr::True, BoolExpr::False)
            )
        );
        assert_eq!(
            guard_of("!0 and 1"),
            BoolExpr::and(BoolExpr::not(BoolExpr::False), BoolExpr::True)
        );
        assert_eq!(
            guard_of("0 or 1 or 0"),
            BoolExpr::or(
                BoolExpr::or(BoolExpr::False, BoolExpr::True),
                BoolExpr::False
            )
        );
    }

    #[test]
    fn bare_zero_one_are_truth_values_in_equalities_integers() {
        assert_eq!(guard_of("0"), BoolExpr::False);
        assert_eq!(guard_of("1"), BoolExpr::True);
        assert_eq!(
            guard_of("0 = 1"),
            BoolExpr::eq(ArithExpr::int(0), ArithExpr::int(1))
        );
    }

    #[test]
    fn parenthesized_aexp_may_open_an_equality() {
        assert_eq!(
            guard_of("(x + 1) = y"),
            BoolExpr::eq(
                ArithExpr::add(ArithExpr::var(v("x")), ArithExpr::int(1)),
                ArithExpr::var(v("y")),
            )
        );
        assert_eq!(
            guard_of("(x) = 0"),
            BoolExpr::eq(ArithExpr::var(v("x")), ArithExpr::int(0))
        );
        assert_eq!(
            guard_of("(1) = x"),
            BoolExpr::eq(ArithExpr::int(1), ArithExpr::var(v("x")))
        );
    }

    #[test]
    fn bare_variable_is_not_a_boolean() {
        let errs = parse_errs("if (x) {skip} else {skip}");
        assert!(errs[0].message.contains("boolean"));
    }

    #[test]
    fn keywords_cannot_be_identifiers() {
        assert!(parse_forest(&SourceFile::new("t", "or += 1")).is_err());
        assert!(parse_msrl(&SourceFile::new("t", "INC for")).is_err());
    }

    #[test]
    fn underscore_identifiers_parse() {
        // Translator output such as `_it0 -= r` must be readable back.
        let term = parse_ok("_it0 -= r");
        assert_eq!(term, Term::dec(v("_it0"), ArithExpr::var(v("r"))));
    }

    #[test]
    fn parses_msrl_for_loop() {
        let parsed = parse_msrl(&SourceFile::new("t.srl", "for r {INC j}")).unwrap();
        assert_eq!(
            parsed.term,
            MsrlTerm::for_loop(v("r"), MsrlTerm::inc(v("j")))
        );
    }

    #[test]
    fn parses_msrl_sequence() {
        let parsed = parse_msrl(&SourceFile::new("t.srl", "INC r; DEC r")).unwrap();
        assert_eq!(
            parsed.term,
            MsrlTerm::seq(vec![MsrlTerm::inc(v("r")), MsrlTerm::dec(v("r"))])
        );
    }

    #[test]
    fn msrl_write_restriction_is_not_syntactic() {
        // `for r {DEC r}` parses fine; validate_msrl is what rejects it.
        let parsed = parse_msrl(&SourceFile::new("t.srl", "for r {DEC r}")).unwrap();
        assert!(!crate::msrl::validate_msrl(&parsed.term).is_ok());
    }

    #[test]
    fn msrl_errors_carry_positions() {
        let errs = parse_msrl(&SourceFile::new("t.srl", "INC r;\nskip"))
            .expect_err("forest keyword is not an M-SRL statement");
        assert_eq!(errs[0].loc, Loc::new(2, 1));
    }
}
