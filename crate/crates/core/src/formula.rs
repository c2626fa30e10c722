//! Formulas of the bimodal language with the derivative diamond `<>`, the
//! next-time operator `X` and the tangled derivative `<*>{..}`.
//!
//! Only the core connectives are stored. `T`, `|`, `->`, `[]` and `[+]`
//! are expanded by the parser and recovered by the printer through
//! pattern matching on the expanded shapes, so `parse(render(f)) == f`
//! holds for every formula.

use std::collections::BTreeSet;
use std::fmt;
use std::str::FromStr;

use thiserror::Error;

/// Maximum nesting accepted by the parser.
pub const MAX_PARSE_DEPTH: usize = 256;

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Formula {
    Var(String),
    Bot,
    Neg(Box<Formula>),
    And(Box<Formula>, Box<Formula>),
    /// The derivative diamond; interpreted by the derivative operator.
    Dia(Box<Formula>),
    /// The next-time operator; interpreted by inverse image under the map.
    Next(Box<Formula>),
    /// Tangled derivative. Arguments are nonempty, sorted by rendered text
    /// and duplicate-free; build it through [`Formula::tangle`].
    Tangle(Vec<Formula>),
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum FormulaError {
    #[error("syntax error at byte {pos}: {message}")]
    Syntax { pos: usize, message: String },
    #[error("tangle requires at least one argument")]
    EmptyTangle,
    #[error("next normal form is not defined for formulas containing a tangle")]
    TangleUnsupported,
}

impl Formula {
    pub fn var(name: impl Into<String>) -> Self {
        Formula::Var(name.into())
    }

    pub fn bot() -> Self {
        Formula::Bot
    }

    pub fn top() -> Self {
        Formula::not(Formula::Bot)
    }

    #[allow(clippy::should_implement_trait)]
    pub fn not(f: Formula) -> Self {
        Formula::Neg(Box::new(f))
    }

    pub fn and(a: Formula, b: Formula) -> Self {
        Formula::And(Box::new(a), Box::new(b))
    }

    pub fn or(a: Formula, b: Formula) -> Self {
        Formula::not(Formula::and(Formula::not(a), Formula::not(b)))
    }

    pub fn imp(a: Formula, b: Formula) -> Self {
        Formula::not(Formula::and(a, Formula::not(b)))
    }

    pub fn iff(a: Formula, b: Formula) -> Self {
        Formula::and(Formula::imp(a.clone(), b.clone()), Formula::imp(b, a))
    }

    pub fn dia(f: Formula) -> Self {
        Formula::Dia(Box::new(f))
    }

    /// `[]f`, i.e. `~<>~f`.
    pub fn square(f: Formula) -> Self {
        Formula::not(Formula::dia(Formula::not(f)))
    }

    /// `[+]f`, i.e. `f & []f`.
    pub fn boxdot(f: Formula) -> Self {
        Formula::and(f.clone(), Formula::square(f))
    }

    pub fn next(f: Formula) -> Self {
        Formula::Next(Box::new(f))
    }

    /// `X` applied `k` times.
    pub fn next_n(f: Formula, k: usize) -> Self {
        (0..k).fold(f, |acc, _| Formula::next(acc))
    }

    /// Builds a tangle, sorting and deduplicating the arguments.
    pub fn tangle(args: Vec<Formula>) -> Result<Self, FormulaError> {
        if args.is_empty() {
            return Err(FormulaError::EmptyTangle);
        }
        let mut keyed: Vec<(String, Formula)> =
            args.into_iter().map(|f| (f.to_string(), f)).collect();
        keyed.sort_by(|a, b| a.0.cmp(&b.0).then_with(|| a.1.cmp(&b.1)));
        keyed.dedup_by(|a, b| a.1 == b.1);
        Ok(Formula::Tangle(keyed.into_iter().map(|(_, f)| f).collect()))
    }

    /// Maximum number of nested `X` along any path.
    pub fn next_depth(&self) -> usize {
        match self {
            Formula::Var(_) | Formula::Bot => 0,
            Formula::Neg(a) | Formula::Dia(a) => a.next_depth(),
            Formula::And(a, b) => a.next_depth().max(b.next_depth()),
            Formula::Next(a) => 1 + a.next_depth(),
            Formula::Tangle(args) => args.iter().map(Formula::next_depth).max().unwrap_or(0),
        }
    }

    /// Maximum number of nested `<>` along any path. A tangle counts as one
    /// modal layer above its arguments.
    pub fn modal_depth(&self) -> usize {
        match self {
            Formula::Var(_) | Formula::Bot => 0,
            Formula::Neg(a) | Formula::Next(a) => a.modal_depth(),
            Formula::And(a, b) => a.modal_depth().max(b.modal_depth()),
            Formula::Dia(a) => 1 + a.modal_depth(),
            Formula::Tangle(args) => 1 + args.iter().map(Formula::modal_depth).max().unwrap_or(0),
        }
    }

    pub fn contains_tangle(&self) -> bool {
        match self {
            Formula::Var(_) | Formula::Bot => false,
            Formula::Neg(a) | Formula::Dia(a) | Formula::Next(a) => a.contains_tangle(),
            Formula::And(a, b) => a.contains_tangle() || b.contains_tangle(),
            Formula::Tangle(_) => true,
        }
    }

    /// Number of AST nodes.
    pub fn size(&self) -> usize {
        match self {
            Formula::Var(_) | Formula::Bot => 1,
            Formula::Neg(a) | Formula::Dia(a) | Formula::Next(a) => 1 + a.size(),
            Formula::And(a, b) => 1 + a.size() + b.size(),
            Formula::Tangle(args) => 1 + args.iter().map(Formula::size).sum::<usize>(),
        }
    }

    pub fn vars(&self) -> BTreeSet<String> {
        let mut out = BTreeSet::new();
        self.collect_vars(&mut out);
        out
    }

    fn collect_vars(&self, out: &mut BTreeSet<String>) {
        match self {
            Formula::Var(p) => {
                out.insert(p.clone());
            }
            Formula::Bot => {}
            Formula::Neg(a) | Formula::Dia(a) | Formula::Next(a) => a.collect_vars(out),
            Formula::And(a, b) => {
                a.collect_vars(out);
                b.collect_vars(out);
            }
            Formula::Tangle(args) => args.iter().for_each(|a| a.collect_vars(out)),
        }
    }

    /// Immediate subformulas.
    pub fn children(&self) -> Vec<&Formula> {
        match self {
            Formula::Var(_) | Formula::Bot => vec![],
            Formula::Neg(a) | Formula::Dia(a) | Formula::Next(a) => vec![a],
            Formula::And(a, b) => vec![a, b],
            Formula::Tangle(args) => args.iter().collect(),
        }
    }

    /// The least set containing `self` and closed under immediate subformulas.
    pub fn subformula_closure(&self) -> BTreeSet<Formula> {
        let mut out = BTreeSet::new();
        let mut stack = vec![self];
        while let Some(f) = stack.pop() {
            if out.insert(f.clone()) {
                stack.extend(f.children());
            }
        }
        out
    }

    /// Every stack of `X` sits directly on a variable (`X^k p`).
    pub fn is_next_normal(&self) -> bool {
        match self {
            Formula::Var(_) | Formula::Bot => true,
            Formula::Neg(a) | Formula::Dia(a) => a.is_next_normal(),
            Formula::And(a, b) => a.is_next_normal() && b.is_next_normal(),
            Formula::Next(a) => {
                let mut cur: &Formula = a;
                while let Formula::Next(inner) = cur {
                    cur = inner;
                }
                matches!(cur, Formula::Var(_))
            }
            Formula::Tangle(args) => args.iter().all(Formula::is_next_normal),
        }
    }

    /// Pushes every `X` down to the variables using the equivalences
    /// `X~a = ~Xa`, `X(a & b) = Xa & Xb`, `X<>a = <>Xa` and `XF = F`.
    /// Only the `<>` rule needs the map to be a homeomorphism.
    pub fn to_next_normal_form(&self) -> Result<Formula, FormulaError> {
        fn push(f: &Formula, k: usize) -> Result<Formula, FormulaError> {
            Ok(match f {
                Formula::Var(_) => Formula::next_n(f.clone(), k),
                Formula::Bot => Formula::Bot,
                Formula::Neg(a) => Formula::not(push(a, k)?),
                Formula::And(a, b) => Formula::and(push(a, k)?, push(b, k)?),
                Formula::Dia(a) => Formula::dia(push(a, k)?),
                Formula::Next(a) => push(a, k + 1)?,
                Formula::Tangle(_) => return Err(FormulaError::TangleUnsupported),
            })
        }
        push(self, 0)
    }

    /// Replaces each variable by the corresponding formula.
    pub fn substitute(&self, map: &dyn Fn(&str) -> Option<Formula>) -> Formula {
        match self {
            Formula::Var(p) => map(p).unwrap_or_else(|| self.clone()),
            Formula::Bot => Formula::Bot,
            Formula::Neg(a) => Formula::not(a.substitute(map)),
            Formula::And(a, b) => Formula::and(a.substitute(map), b.substitute(map)),
            Formula::Dia(a) => Formula::dia(a.substitute(map)),
            Formula::Next(a) => Formula::next(a.substitute(map)),
            Formula::Tangle(args) => {
                Formula::tangle(args.iter().map(|a| a.substitute(map)).collect())
                    .expect("substitution keeps tangles nonempty")
            }
        }
    }
}

// ---------------------------------------------------------------------------
// Printing

/// Precedence levels, low to high.
const PREC_IMP: u8 = 1;
const PREC_OR: u8 = 2;
const PREC_AND: u8 = 3;
const PREC_UNARY: u8 = 4;

/// The sugared reading of a node.
enum View<'a> {
    Atom(&'a str),
    Top,
    Bot,
    Not(&'a Formula),
    And(&'a Formula, &'a Formula),
    Or(&'a Formula, &'a Formula),
    Imp(&'a Formula, &'a Formula),
    Dia(&'a Formula),
    Box(&'a Formula),
    BoxDot(&'a Formula),
    Next(&'a Formula),
    Tangle(&'a [Formula]),
}

fn as_box(f: &Formula) -> Option<&Formula> {
    if let Formula::Neg(inner) = f {
        if let Formula::Dia(inner) = &**inner {
            if let Formula::Neg(a) = &**inner {
                return Some(a);
            }
        }
    }
    None
}

fn view(f: &Formula) -> View<'_> {
    match f {
        Formula::Var(p) => View::Atom(p),
        Formula::Bot => View::Bot,
        Formula::Dia(a) => View::Dia(a),
        Formula::Next(a) => View::Next(a),
        Formula::Tangle(args) => View::Tangle(args),
        Formula::And(a, b) => match as_box(b) {
            Some(inner) if inner == &**a => View::BoxDot(a),
            _ => View::And(a, b),
        },
        Formula::Neg(inner) => match &**inner {
            Formula::Bot => View::Top,
            Formula::Dia(d) => match &**d {
                Formula::Neg(a) => View::Box(a),
                _ => View::Not(inner),
            },
            Formula::And(a, b) => match (&**a, &**b) {
                (Formula::Neg(x), Formula::Neg(y)) if matches!(view(a), View::Not(_)) => {
                    View::Or(x, y)
                }
                (_, Formula::Neg(y)) => View::Imp(a, y),
                _ => View::Not(inner),
            },
            _ => View::Not(inner),
        },
    }
}

fn prec(v: &View<'_>) -> u8 {
    match v {
        View::Imp(..) => PREC_IMP,
        View::Or(..) => PREC_OR,
        View::And(..) => PREC_AND,
        _ => PREC_UNARY,
    }
}

fn write_at(f: &Formula, min: u8, out: &mut String) {
    let v = view(f);
    if prec(&v) < min {
        out.push('(');
        write_view(v, out);
        out.push(')');
    } else {
        write_view(v, out);
    }
}

fn write_view(v: View<'_>, out: &mut String) {
    match v {
        View::Atom(p) => out.push_str(p),
        View::Top => out.push('T'),
        View::Bot => out.push('F'),
        View::Not(a) => {
            out.push('~');
            write_at(a, PREC_UNARY, out);
        }
        View::Dia(a) => {
            out.push_str("<>");
            write_at(a, PREC_UNARY, out);
        }
        View::Box(a) => {
            out.push_str("[]");
            write_at(a, PREC_UNARY, out);
        }
        View::BoxDot(a) => {
            out.push_str("[+]");
            write_at(a, PREC_UNARY, out);
        }
        View::Next(a) => {
            out.push('X');
            // `Xp` would be fine, but a space keeps `X X p` readable
            out.push(' ');
            write_at(a, PREC_UNARY, out);
        }
        View::And(a, b) => {
            write_at(a, PREC_AND, out);
            out.push_str(" & ");
            write_at(b, PREC_UNARY, out);
        }
        View::Or(a, b) => {
            write_at(a, PREC_OR, out);
            out.push_str(" | ");
            write_at(b, PREC_AND, out);
        }
        View::Imp(a, b) => {
            write_at(a, PREC_OR, out);
            out.push_str(" -> ");
            write_at(b, PREC_IMP, out);
        }
        View::Tangle(args) => {
            out.push_str("<*>{");
            for (i, a) in args.iter().enumerate() {
                if i > 0 {
                    out.push(',');
                }
                write_at(a, PREC_IMP, out);
            }
            out.push('}');
        }
    }
}

/// Renders in the concrete syntax accepted by [`parse`].
pub fn render(f: &Formula) -> String {
    let mut out = String::new();
    write_at(f, PREC_IMP, &mut out);
    out
}

impl fmt::Display for Formula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&render(self))
    }
}

// ---------------------------------------------------------------------------
// Parsing

#[derive(Debug, Clone, PartialEq, Eq)]
enum Tok {
    Neg,
    Dia,
    Box,
    BoxDot,
    Next,
    Tangle,
    LBrace,
    RBrace,
    Comma,
    LParen,
    RParen,
    Top,
    Bot,
    And,
    Or,
    Imp,
    Ident(String),
    Eof,
}

fn describe(t: &Tok) -> String {
    match t {
        Tok::Ident(s) => format!("identifier `{s}`"),
        Tok::Eof => "end of input".to_string(),
        other => format!("{other:?}"),
    }
}

fn lex(text: &str) -> Result<Vec<(Tok, usize)>, FormulaError> {
    let bytes = text.as_bytes();
    let mut out = Vec::new();
    let mut i = 0;
    while i < bytes.len() {
        let c = bytes[i];
        if c.is_ascii_whitespace() {
            i += 1;
            continue;
        }
        let rest = &text[i..];
        let (tok, len) = if rest.starts_with("<*>") {
            (Tok::Tangle, 3)
        } else if rest.starts_with("<>") {
            (Tok::Dia, 2)
        } else if rest.starts_with("[+]") {
            (Tok::BoxDot, 3)
        } else if rest.starts_with("[]") {
            (Tok::Box, 2)
        } else if rest.starts_with("->") {
            (Tok::Imp, 2)
        } else {
            match c {
                b'~' => (Tok::Neg, 1),
                b'&' => (Tok::And, 1),
                b'|' => (Tok::Or, 1),
                b'{' => (Tok::LBrace, 1),
                b'}' => (Tok::RBrace, 1),
                b',' => (Tok::Comma, 1),
                b'(' => (Tok::LParen, 1),
                b')' => (Tok::RParen, 1),
                b'X' => (Tok::Next, 1),
                b'T' => (Tok::Top, 1),
                b'F' => (Tok::Bot, 1),
                b'a'..=b'z' => {
                    let len = rest
                        .bytes()
                        .take_while(|b| b.is_ascii_alphanumeric() || *b == b'_')
                        .count();
                    (Tok::Ident(rest[..len].to_string()), len)
                }
                _ => {
                    let ch = rest.chars().next().unwrap_or('?');
                    return Err(FormulaError::Syntax {
                        pos: i,
                        message: format!("unexpected character `{ch}`"),
                    });
                }
            }
        };
        out.push((tok, i));
        i += len;
    }
    out.push((Tok::Eof, text.len()));
    Ok(out)
}

struct Parser {
    toks: Vec<(Tok, usize)>,
    at: usize,
    depth: usize,
}

impl Parser {
    fn peek(&self) -> &Tok {
        &self.toks[self.at].0
    }

    fn pos(&self) -> usize {
        self.toks[self.at].1
    }

    fn bump(&mut self) -> Tok {
        let t = self.toks[self.at].0.clone();
        if self.at + 1 < self.toks.len() {
            self.at += 1;
        }
        t
    }

    fn error<T>(&self, message: String) -> Result<T, FormulaError> {
        Err(FormulaError::Syntax {
            pos: self.pos(),
            message,
        })
    }

    fn expect(&mut self, want: Tok) -> Result<(), FormulaError> {
        if *self.peek() == want {
            self.bump();
            Ok(())
        } else {
            self.error(format!(
                "expected {}, found {}",
                describe(&want),
                describe(self.peek())
            ))
        }
    }

    fn enter(&mut self) -> Result<(), FormulaError> {
        self.depth += 1;
        if self.depth > MAX_PARSE_DEPTH {
            return self.error(format!("nesting deeper than {MAX_PARSE_DEPTH}"));
        }
        Ok(())
    }

    fn formula(&mut self) -> Result<Formula, FormulaError> {
        self.enter()?;
        let lhs = self.or()?;
        let out = if *self.peek() == Tok::Imp {
            self.bump();
            let rhs = self.formula()?;
            Formula::imp(lhs, rhs)
        } else {
            lhs
        };
        self.depth -= 1;
        Ok(out)
    }

    fn or(&mut self) -> Result<Formula, FormulaError> {
        let mut acc = self.and()?;
        while *self.peek() == Tok::Or {
            self.bump();
            acc = Formula::or(acc, self.and()?);
        }
        Ok(acc)
    }

    fn and(&mut self) -> Result<Formula, FormulaError> {
        let mut acc = self.unary()?;
        while *self.peek() == Tok::And {
            self.bump();
            acc = Formula::and(acc, self.unary()?);
        }
        Ok(acc)
    }

    fn unary(&mut self) -> Result<Formula, FormulaError> {
        self.enter()?;
        let start = self.pos();
        let out = match self.bump() {
            Tok::Neg => Formula::not(self.unary()?),
            Tok::Dia => Formula::dia(self.unary()?),
            Tok::Box => Formula::square(self.unary()?),
            Tok::BoxDot => Formula::boxdot(self.unary()?),
            Tok::Next => Formula::next(self.unary()?),
            Tok::Top => Formula::top(),
            Tok::Bot => Formula::Bot,
            Tok::Ident(name) => Formula::Var(name),
            Tok::LParen => {
                let f = self.formula()?;
                self.expect(Tok::RParen)?;
                f
            }
            Tok::Tangle => {
                let open = self.pos();
                self.expect(Tok::LBrace)?;
                if *self.peek() == Tok::RBrace {
                    return Err(FormulaError::Syntax {
                        pos: open,
                        message: FormulaError::EmptyTangle.to_string(),
                    });
                }
                let mut args = vec![self.formula()?];
                while *self.peek() == Tok::Comma {
                    self.bump();
                    args.push(self.formula()?);
                }
                self.expect(Tok::RBrace)?;
                Formula::tangle(args)?
            }
            other => {
                return Err(FormulaError::Syntax {
                    pos: start,
                    message: format!("expected a formula, found {}", describe(&other)),
                });
            }
        };
        self.depth -= 1;
        Ok(out)
    }
}

/// Parses the ASCII concrete syntax.
///
/// Precedence from loosest to tightest: `->` (right associative), `|`,
/// `&`, then the prefix operators `~ <> [] [+] X` and `<*>{..}`.
pub fn parse(text: &str) -> Result<Formula, FormulaError> {
    let toks = lex(text)?;
    let mut p = Parser {
        toks,
        at: 0,
        depth: 0,
    };
    let f = p.formula()?;
    if *p.peek() != Tok::Eof {
        return p.error(format!("unexpected {}", describe(p.peek())));
    }
    Ok(f)
}

impl FromStr for Formula {
    type Err = FormulaError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        parse(s)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(s: &str) -> Formula {
        parse(s).unwrap()
    }

    fn v(s: &str) -> Formula {
        Formula::var(s)
    }

    #[test]
    fn parse_examples() {
        assert_eq!(
            p("<>p & []q -> X p"),
            Formula::imp(
                Formula::and(Formula::dia(v("p")), Formula::square(v("q"))),
                Formula::next(v("p"))
            )
        );
        assert_eq!(p("~X p"), Formula::not(Formula::next(v("p"))));
        assert_eq!(p("<*>{p, q}"), Formula::Tangle(vec![v("p"), v("q")]));
        assert_eq!(p("<*>{q, p, q}"), p("<*>{p,q}"));
    }

    #[test]
    fn precedence_and_associativity() {
        assert_eq!(
            p("a -> b -> c"),
            Formula::imp(v("a"), Formula::imp(v("b"), v("c")))
        );
        assert_eq!(
            p("a | b | c"),
            Formula::or(Formula::or(v("a"), v("b")), v("c"))
        );
        assert_eq!(
            p("a & b | c"),
            Formula::or(Formula::and(v("a"), v("b")), v("c"))
        );
        assert_eq!(p("~a & b"), Formula::and(Formula::not(v("a")), v("b")));
        assert_eq!(p("Xp"), Formula::next(v("p")));
        assert_eq!(p("T"), Formula::top());
        assert_eq!(p("p_1 & q2"), Formula::and(v("p_1"), v("q2")));
    }

    #[test]
    fn parse_errors() {
        assert!(matches!(
            parse("<*>{}"),
            Err(FormulaError::Syntax { pos: 3, .. })
        ));
        assert!(matches!(
            parse("p &"),
            Err(FormulaError::Syntax { pos: 3, .. })
        ));
        assert!(matches!(parse("(p"), Err(FormulaError::Syntax { .. })));
        assert!(matches!(
            parse("P"),
            Err(FormulaError::Syntax { pos: 0, .. })
        ));
        assert!(matches!(
            parse("p q"),
            Err(FormulaError::Syntax { pos: 2, .. })
        ));
        assert!(matches!(
            parse(""),
            Err(FormulaError::Syntax { pos: 0, .. })
        ));
        let deep = "(".repeat(10_000) + "p" + &")".repeat(10_000);
        assert!(parse(&deep).is_err());
        assert!(matches!(
            Formula::tangle(vec![]),
            Err(FormulaError::EmptyTangle)
        ));
    }

    #[test]
    fn render_examples() {
        assert_eq!(render(&Formula::dia(v("p"))), "<>p");
        assert_eq!(render(&Formula::boxdot(v("p"))), "[+]p");
        assert_eq!(render(&Formula::Tangle(vec![v("p"), v("q")])), "<*>{p,q}");
        assert_eq!(render(&p("[]p -> [][]p")), "[]p -> [][]p");
        assert_eq!(render(&p("(a -> b) -> c")), "(a -> b) -> c");
        assert_eq!(render(&p("~(a & b)")), "~(a & b)");
        assert_eq!(render(&p("X X p & X q")), "X X p & X q");
    }

    #[test]
    fn measures() {
        assert_eq!(v("p").next_depth(), 0);
        assert_eq!(p("X X p & X q").next_depth(), 2);
        assert_eq!(p("[] X p").next_depth(), 1);
        assert_eq!(p("[]<>p & <>q").modal_depth(), 2);
    }

    #[test]
    fn closure_examples() {
        let c = p("<>p").subformula_closure();
        assert_eq!(c, [p("<>p"), v("p")].into_iter().collect());
        let c = p("p & ~p").subformula_closure();
        assert_eq!(c, [p("p & ~p"), p("~p"), v("p")].into_iter().collect());
        // X[]p: X~<>~p, ~<>~p, <>~p, ~p, p
        let c = p("X []p").subformula_closure();
        assert_eq!(c.len(), 5);
        assert!(c.contains(&p("[]p")) && c.contains(&p("<>~p")) && c.contains(&v("p")));
    }

    #[test]
    fn normal_form_examples() {
        assert_eq!(p("X(p & q)").to_next_normal_form().unwrap(), p("Xp & Xq"));
        assert_eq!(p("X ~p").to_next_normal_form().unwrap(), p("~Xp"));
        assert_eq!(p("X []p").to_next_normal_form().unwrap(), p("[]Xp"));
        assert_eq!(
            p("X X <>(p -> X q)").to_next_normal_form().unwrap(),
            p("<>(X X p -> X X X q)")
        );
        assert_eq!(
            p("X <*>{p}").to_next_normal_form(),
            Err(FormulaError::TangleUnsupported)
        );
        assert!(p("X X p").is_next_normal());
        assert!(!p("X ~p").is_next_normal());
    }
}
