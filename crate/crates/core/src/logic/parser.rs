use std::fmt;

use super::model::{ModelSpec, Sentence, WeightedFormula};
use super::syntax::{Expr, Formula, Vocabulary};
use super::world::World;

/// A model or database syntax error; `line` and `column` are 1-based.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ParseError {
    pub line: usize,
    pub column: usize,
    pub message: String,
}

impl fmt::Display for ParseError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "line {}, column {}: {}", self.line, self.column, self.message)
    }
}

impl std::error::Error for ParseError {}

fn err(line: usize, column: usize, message: impl Into<String>) -> ParseError {
    ParseError { line, column, message: message.into() }
}

#[derive(Clone, Debug, PartialEq)]
enum Tok {
    Ident(String),
    LParen,
    RParen,
    Comma,
    Not,
    And,
    Or,
    Implies,
    Iff,
}

/// Tokens paired with their 1-based column.
fn tokenize(text: &str, line: usize, col0: usize) -> Result<Vec<(Tok, usize)>, ParseError> {
    let chars: Vec<char> = text.chars().collect();
    let mut out = Vec::new();
    let mut i = 0;
    while i < chars.len() {
        let c = chars[i];
        let col = col0 + i;
        if c.is_whitespace() {
            i += 1;
            continue;
        }
        let rest: String = chars[i..chars.len().min(i + 3)].iter().collect();
        let (tok, len) = if rest.starts_with("<=>") {
            (Tok::Iff, 3)
        } else if rest.starts_with("=>") {
            (Tok::Implies, 2)
        } else {
            match c {
                '(' => (Tok::LParen, 1),
                ')' => (Tok::RParen, 1),
                ',' => (Tok::Comma, 1),
                '!' => (Tok::Not, 1),
                '&' => (Tok::And, 1),
                '|' => (Tok::Or, 1),
                c if c.is_alphabetic() || c == '_' => {
                    let start = i;
                    while i < chars.len() && (chars[i].is_alphanumeric() || chars[i] == '_') {
                        i += 1;
                    }
                    out.push((Tok::Ident(chars[start..i].iter().collect()), col));
                    continue;
                }
                other => return Err(err(line, col, format!("unexpected character `{other}`"))),
            }
        };
        out.push((tok, col));
        i += len;
    }
    Ok(out)
}

struct FormulaParser<'a> {
    toks: Vec<(Tok, usize)>,
    pos: usize,
    line: usize,
    end_col: usize,
    vocab: &'a mut Vocabulary,
    vars: Vec<String>,
}

impl FormulaParser<'_> {
    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.pos).map(|(t, _)| t)
    }

    fn col(&self) -> usize {
        self.toks.get(self.pos).map_or(self.end_col, |(_, c)| *c)
    }

    fn expect(&mut self, want: Tok, what: &str) -> Result<(), ParseError> {
        if self.peek() == Some(&want) {
            self.pos += 1;
            Ok(())
        } else {
            Err(err(self.line, self.col(), format!("expected {what}")))
        }
    }

    fn iff(&mut self) -> Result<Expr, ParseError> {
        let lhs = self.implies()?;
        if self.peek() == Some(&Tok::Iff) {
            self.pos += 1;
            let rhs = self.iff()?;
            return Ok(Expr::iff(lhs, rhs));
        }
        Ok(lhs)
    }

    fn implies(&mut self) -> Result<Expr, ParseError> {
        let lhs = self.or()?;
        if self.peek() == Some(&Tok::Implies) {
            self.pos += 1;
            let rhs = self.implies()?;
            return Ok(Expr::implies(lhs, rhs));
        }
        Ok(lhs)
    }

    fn or(&mut self) -> Result<Expr, ParseError> {
        let mut e = self.and()?;
        while self.peek() == Some(&Tok::Or) {
            self.pos += 1;
            e = Expr::or(e, self.and()?);
        }
        Ok(e)
    }

    fn and(&mut self) -> Result<Expr, ParseError> {
        let mut e = self.unary()?;
        while self.peek() == Some(&Tok::And) {
            self.pos += 1;
            e = Expr::and(e, self.unary()?);
        }
        Ok(e)
    }

    fn unary(&mut self) -> Result<Expr, ParseError> {
        match self.peek() {
            Some(Tok::Not) => {
                self.pos += 1;
                Ok(Expr::not(self.unary()?))
            }
            Some(Tok::LParen) => {
                self.pos += 1;
                let e = self.iff()?;
                self.expect(Tok::RParen, "`)`")?;
                Ok(e)
            }
            Some(Tok::Ident(_)) => self.atom(),
            _ => Err(err(self.line, self.col(), "expected an atom, `!` or `(`")),
        }
    }

    fn atom(&mut self) -> Result<Expr, ParseError> {
        let name_col = self.col();
        let Some(Tok::Ident(name)) = self.peek().cloned() else { unreachable!() };
        self.pos += 1;
        self.expect(Tok::LParen, "`(` after predicate name")?;
        let mut args = Vec::new();
        loop {
            let col = self.col();
            let Some(Tok::Ident(arg)) = self.peek().cloned() else {
                return Err(err(self.line, col, "expected a variable"));
            };
            self.pos += 1;
            if arg.chars().next().is_some_and(|c| c.is_uppercase()) {
                return Err(err(self.line, col, format!("constant `{arg}` is not allowed in a formula")));
            }
            let idx = match self.vars.iter().position(|v| *v == arg) {
                Some(i) => i,
                None => {
                    if self.vars.len() == 2 {
                        return Err(err(self.line, col, format!("variable `{arg}` is a third variable; at most 2 are allowed")));
                    }
                    self.vars.push(arg);
                    self.vars.len() - 1
                }
            };
            args.push(idx);
            match self.peek() {
                Some(Tok::Comma) => self.pos += 1,
                Some(Tok::RParen) => {
                    self.pos += 1;
                    break;
                }
                _ => return Err(err(self.line, self.col(), "expected `,` or `)`")),
            }
        }
        let pred = self.vocab.declare(&name, args.len()).map_err(|e| err(self.line, name_col, e.to_string()))?;
        Ok(Expr::atom(pred, args))
    }
}

fn parse_formula_at(text: &str, line: usize, col0: usize, vocab: &mut Vocabulary) -> Result<Formula, ParseError> {
    let toks = tokenize(text, line, col0)?;
    if toks.is_empty() {
        return Err(err(line, col0, "expected a formula"));
    }
    let end_col = col0 + text.chars().count();
    let mut p = FormulaParser { toks, pos: 0, line, end_col, vocab, vars: Vec::new() };
    let expr = p.iff()?;
    if p.pos != p.toks.len() {
        return Err(err(line, p.col(), "unexpected trailing input"));
    }
    Formula::new(expr, p.vars).map_err(|e| err(line, col0, e.to_string()))
}

/// Parses one formula, declaring predicates on first use.
pub fn parse_formula(text: &str, vocab: &mut Vocabulary) -> Result<Formula, ParseError> {
    parse_formula_at(text, 1, 1, vocab)
}

fn strip_comment(line: &str) -> &str {
    line.split_once('#').map_or(line, |(code, _)| code)
}

/// Column (1-based) of byte offset `offset` in `line`.
fn column_of(line: &str, offset: usize) -> usize {
    line[..offset].chars().count() + 1
}

fn leading_ws(s: &str) -> usize {
    s.len() - s.trim_start().len()
}

pub fn parse_model(text: &str) -> Result<ModelSpec, ParseError> {
    let mut model = ModelSpec::default();
    for (i, raw) in text.lines().enumerate() {
        let line_no = i + 1;
        let code = strip_comment(raw);
        let trimmed = code.trim();
        if trimmed.is_empty() {
            continue;
        }
        let start = leading_ws(code);
        if let Some(rest) = trimmed.strip_prefix("predicate").filter(|r| r.starts_with(char::is_whitespace)) {
            let decl = rest.trim();
            let decl_col = column_of(raw, start + "predicate".len() + leading_ws(rest));
            let (name, arity) = decl
                .split_once('/')
                .ok_or_else(|| err(line_no, decl_col, "expected `name/arity`"))?;
            let arity: usize = arity
                .trim()
                .parse()
                .map_err(|_| err(line_no, decl_col, format!("invalid arity `{}`", arity.trim())))?;
            let name = name.trim();
            if name.is_empty() || !name.chars().all(|c| c.is_alphanumeric() || c == '_') {
                return Err(err(line_no, decl_col, format!("invalid predicate name `{name}`")));
            }
            model.vocabulary.declare(name, arity).map_err(|e| err(line_no, decl_col, e.to_string()))?;
        } else if let Some(rest) = trimmed.strip_prefix("hard").filter(|r| r.starts_with(char::is_whitespace)) {
            let col = column_of(raw, start + "hard".len());
            let f = parse_formula_at(rest, line_no, col, &mut model.vocabulary)?;
            model.hard.push(Sentence(f));
        } else if let Some((weight, formula)) = trimmed.split_once("::") {
            let w_text = weight.trim();
            let weight: f64 = w_text
                .parse()
                .ok()
                .filter(|w: &f64| w.is_finite())
                .ok_or_else(|| err(line_no, column_of(raw, start), format!("invalid weight `{w_text}`")))?;
            let col = column_of(raw, start + trimmed.find("::").unwrap() + 2);
            let f = parse_formula_at(formula, line_no, col, &mut model.vocabulary)?;
            model.soft.push(WeightedFormula { formula: f, weight });
        } else {
            return Err(err(
                line_no,
                column_of(raw, start),
                "expected `predicate name/arity`, `<weight> :: <formula>` or `hard <formula>`",
            ));
        }
    }
    Ok(model)
}

fn split_ground_atom(text: &str) -> Option<(&str, Vec<&str>)> {
    let text = text.trim().trim_end_matches('.');
    let (name, rest) = text.split_once('(')?;
    let inner = rest.trim_end().strip_suffix(')')?;
    let args: Vec<&str> = inner.split(',').map(str::trim).collect();
    if name.trim().is_empty() || args.iter().any(|a| a.is_empty()) {
        return None;
    }
    Some((name.trim(), args))
}

/// Parses a closed-world database against a vocabulary.
pub fn parse_database(text: &str, vocab: &Vocabulary) -> Result<World, ParseError> {
    let mut world: Option<World> = None;
    for (i, raw) in text.lines().enumerate() {
        let line_no = i + 1;
        let code = strip_comment(raw);
        let trimmed = code.trim();
        if trimmed.is_empty() {
            continue;
        }
        let col = column_of(raw, leading_ws(code));
        if let Some(rest) = trimmed.strip_prefix("domain").filter(|r| r.is_empty() || r.starts_with(char::is_whitespace)) {
            if world.is_some() {
                return Err(err(line_no, col, "domain declared twice"));
            }
            let names: Vec<String> = rest.split_whitespace().map(str::to_string).collect();
            world = Some(World::new(vocab, names).map_err(|e| err(line_no, col, e.to_string()))?);
            continue;
        }
        let w = world.as_mut().ok_or_else(|| err(line_no, col, "ground atom before the `domain` line"))?;
        let (pred, args) = split_ground_atom(trimmed).ok_or_else(|| err(line_no, col, "expected a ground atom `pred(C1,...)`"))?;
        w.assert_named(vocab, pred, &args).map_err(|e| err(line_no, col, e.to_string()))?;
    }
    world.ok_or_else(|| err(1, 1, "missing `domain` line"))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_weighted_and_hard_lines() {
        let m = parse_model("# smokers\npredicate sm/1\n1.0 :: fr(x,y) => sm(y)\nhard fr(x,y) => fr(y,x)\n").unwrap();
        assert_eq!(m.soft.len(), 1);
        assert_eq!(m.soft[0].weight, 1.0);
        assert_eq!(m.hard.len(), 1);
        assert_eq!(m.vocabulary.len(), 2);
        assert_eq!(m.soft[0].formula.display(&m.vocabulary).to_string(), "fr(x,y) => sm(y)");
    }

    #[test]
    fn precedence_and_associativity() {
        let mut v = Vocabulary::new();
        let f = parse_formula("!a(x) & b(x) | c(x) => d(x) => a(x) <=> b(x)", &mut v).unwrap();
        assert_eq!(f.display(&v).to_string(), "!a(x) & b(x) | c(x) => d(x) => a(x) <=> b(x)");
        let g = parse_formula("(a(x) => b(x)) => c(x)", &mut v).unwrap();
        assert_eq!(g.display(&v).to_string(), "(a(x) => b(x)) => c(x)");
        let h = parse_formula("!(a(x) | b(x))", &mut v).unwrap();
        assert_eq!(h.display(&v).to_string(), "!(a(x) | b(x))");
    }

    #[test]
    fn rejects_arity_three_and_constants() {
        let e = parse_model("1.0 :: p(x,y,z)").unwrap_err();
        assert_eq!(e.line, 1);
        let e = parse_model("\n\n1.0 :: fr(x, Bob)").unwrap_err();
        assert_eq!((e.line, e.column), (3, 14));
        assert!(e.message.contains("constant"));
        let e = parse_model("1.0 :: p(x) & q(y) & r(z)").unwrap_err();
        assert!(e.message.contains("at most 2"));
        assert!(parse_model("hard sm(x,y)\nhard sm(x)").is_err());
        assert!(parse_model("oops").is_err());
        assert!(parse_model("1.0 :: sm(x) &").is_err());
    }

    #[test]
    fn database_is_closed_world() {
        let m = parse_model("predicate sm/1\npredicate fr/2").unwrap();
        let w = parse_database("domain Alice Bob\nsm(Alice)\nfr(Alice, Bob)\n", &m.vocabulary).unwrap();
        assert_eq!(w.num_true_atoms(), 2);
        assert!(parse_database("domain A\nsm(B)", &m.vocabulary).is_err());
        assert!(parse_database("sm(A)", &m.vocabulary).is_err());
        assert!(parse_database("domain A\nxx(A)", &m.vocabulary).is_err());
    }
}
