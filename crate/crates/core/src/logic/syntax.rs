use std::fmt;

use super::LogicError;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct PredId(pub usize);

/// Index into a formula's variable list (at most two entries).
pub type VarId = usize;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Predicate {
    pub name: String,
    pub arity: usize,
}

/// Unary and binary predicates in declaration order.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Vocabulary {
    predicates: Vec<Predicate>,
}

impl Vocabulary {
    pub fn new() -> Self {
        Self::default()
    }

    /// Declares `name/arity`, or returns the existing id if already declared with the same arity.
    pub fn declare(&mut self, name: &str, arity: usize) -> Result<PredId, LogicError> {
        if !(1..=2).contains(&arity) {
            return Err(LogicError::UnsupportedArity { predicate: name.to_string(), arity });
        }
        if let Some(id) = self.lookup(name) {
            let existing = self.predicates[id.0].arity;
            if existing != arity {
                return Err(LogicError::ArityMismatch { predicate: name.to_string(), expected: existing, found: arity });
            }
            return Ok(id);
        }
        self.predicates.push(Predicate { name: name.to_string(), arity });
        Ok(PredId(self.predicates.len() - 1))
    }

    pub fn lookup(&self, name: &str) -> Option<PredId> {
        self.predicates.iter().position(|p| p.name == name).map(PredId)
    }

    pub fn predicate(&self, id: PredId) -> &Predicate {
        &self.predicates[id.0]
    }

    pub fn len(&self) -> usize {
        self.predicates.len()
    }

    pub fn is_empty(&self) -> bool {
        self.predicates.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (PredId, &Predicate)> {
        self.predicates.iter().enumerate().map(|(i, p)| (PredId(i), p))
    }

    pub fn unary_predicates(&self) -> Vec<PredId> {
        self.iter().filter(|(_, p)| p.arity == 1).map(|(id, _)| id).collect()
    }

    pub fn binary_predicates(&self) -> Vec<PredId> {
        self.iter().filter(|(_, p)| p.arity == 2).map(|(id, _)| id).collect()
    }

    /// Number of ground atoms over a domain of size `n`.
    pub fn ground_atom_count(&self, n: usize) -> usize {
        self.predicates.iter().map(|p| n.pow(p.arity as u32)).sum()
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Expr {
    Atom { pred: PredId, args: Vec<VarId> },
    /// Variable identity. Not part of the surface grammar; used by encodings.
    Equal(VarId, VarId),
    Not(Box<Expr>),
    And(Box<Expr>, Box<Expr>),
    Or(Box<Expr>, Box<Expr>),
    Implies(Box<Expr>, Box<Expr>),
    Iff(Box<Expr>, Box<Expr>),
}

impl Expr {
    pub fn atom(pred: PredId, args: Vec<VarId>) -> Expr {
        Expr::Atom { pred, args }
    }

    pub fn not(e: Expr) -> Expr {
        Expr::Not(Box::new(e))
    }

    pub fn and(a: Expr, b: Expr) -> Expr {
        Expr::And(Box::new(a), Box::new(b))
    }

    pub fn or(a: Expr, b: Expr) -> Expr {
        Expr::Or(Box::new(a), Box::new(b))
    }

    pub fn implies(a: Expr, b: Expr) -> Expr {
        Expr::Implies(Box::new(a), Box::new(b))
    }

    pub fn iff(a: Expr, b: Expr) -> Expr {
        Expr::Iff(Box::new(a), Box::new(b))
    }

    /// Evaluates at the variable level: `atom(pred, vars)` and `equal(a, b)` supply leaf truth values.
    pub fn eval_with<A, E>(&self, atom: &A, equal: &E) -> bool
    where
        A: Fn(PredId, &[VarId]) -> bool,
        E: Fn(VarId, VarId) -> bool,
    {
        match self {
            Expr::Atom { pred, args } => atom(*pred, args),
            Expr::Equal(a, b) => equal(*a, *b),
            Expr::Not(e) => !e.eval_with(atom, equal),
            Expr::And(a, b) => a.eval_with(atom, equal) && b.eval_with(atom, equal),
            Expr::Or(a, b) => a.eval_with(atom, equal) || b.eval_with(atom, equal),
            Expr::Implies(a, b) => !a.eval_with(atom, equal) || b.eval_with(atom, equal),
            Expr::Iff(a, b) => a.eval_with(atom, equal) == b.eval_with(atom, equal),
        }
    }

    pub fn for_each_atom<F: FnMut(PredId, &[VarId])>(&self, f: &mut F) {
        match self {
            Expr::Atom { pred, args } => f(*pred, args),
            Expr::Equal(..) => {}
            Expr::Not(e) => e.for_each_atom(f),
            Expr::And(a, b) | Expr::Or(a, b) | Expr::Implies(a, b) | Expr::Iff(a, b) => {
                a.for_each_atom(f);
                b.for_each_atom(f);
            }
        }
    }

    fn precedence(&self) -> u8 {
        match self {
            Expr::Iff(..) => 1,
            Expr::Implies(..) => 2,
            Expr::Or(..) => 3,
            Expr::And(..) => 4,
            Expr::Not(..) => 5,
            Expr::Atom { .. } | Expr::Equal(..) => 6,
        }
    }
}

/// Truth of ground atoms, addressed by element indices.
pub trait Interpretation {
    fn holds(&self, pred: PredId, args: &[usize]) -> bool;
}

/// A quantifier-free, constant-free formula over at most two variables.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Formula {
    expr: Expr,
    vars: Vec<String>,
}

impl Formula {
    pub fn new(expr: Expr, vars: Vec<String>) -> Result<Formula, LogicError> {
        if vars.len() > 2 {
            return Err(LogicError::TooManyVariables(vars.len()));
        }
        let mut bad = None;
        let mut check = |_: PredId, args: &[VarId]| {
            if let Some(&v) = args.iter().find(|&&v| v >= vars.len()) {
                bad = Some(v);
            }
        };
        expr.for_each_atom(&mut check);
        if let Some(v) = bad {
            return Err(LogicError::UnboundVariable(format!("#{v}")));
        }
        Ok(Formula { expr, vars })
    }

    pub fn expr(&self) -> &Expr {
        &self.expr
    }

    pub fn vars(&self) -> &[String] {
        &self.vars
    }

    pub fn num_vars(&self) -> usize {
        self.vars.len()
    }

    /// Truth under `binding[v]` = element assigned to variable `v`.
    pub fn eval<I: Interpretation + ?Sized>(&self, interp: &I, binding: &[usize]) -> bool {
        debug_assert!(binding.len() >= self.vars.len());
        self.expr.eval_with(
            &|pred, args: &[VarId]| {
                let mut ground = [0usize; 2];
                for (slot, &v) in ground.iter_mut().zip(args) {
                    *slot = binding[v];
                }
                interp.holds(pred, &ground[..args.len()])
            },
            &|a, b| binding[a] == binding[b],
        )
    }

    pub fn display<'a>(&'a self, vocab: &'a Vocabulary) -> FormulaDisplay<'a> {
        FormulaDisplay { formula: self, vocab }
    }
}

pub struct FormulaDisplay<'a> {
    formula: &'a Formula,
    vocab: &'a Vocabulary,
}

impl FormulaDisplay<'_> {
    fn write(&self, f: &mut fmt::Formatter<'_>, e: &Expr, parent: u8) -> fmt::Result {
        let prec = e.precedence();
        let paren = prec < parent;
        if paren {
            write!(f, "(")?;
        }
        let vars = &self.formula.vars;
        match e {
            Expr::Atom { pred, args } => {
                let names: Vec<&str> = args.iter().map(|&v| vars[v].as_str()).collect();
                write!(f, "{}({})", self.vocab.predicate(*pred).name, names.join(","))?;
            }
            Expr::Equal(a, b) => write!(f, "{} = {}", vars[*a], vars[*b])?,
            Expr::Not(inner) => {
                write!(f, "!")?;
                self.write(f, inner, prec)?;
            }
            Expr::And(a, b) | Expr::Or(a, b) | Expr::Implies(a, b) | Expr::Iff(a, b) => {
                let op = match e {
                    Expr::And(..) => "&",
                    Expr::Or(..) => "|",
                    Expr::Implies(..) => "=>",
                    _ => "<=>",
                };
                // Implications associate to the right, conjunction and disjunction to the left.
                let (left, right) = if prec <= 2 { (prec + 1, prec) } else { (prec, prec + 1) };
                self.write(f, a, left)?;
                write!(f, " {op} ")?;
                self.write(f, b, right)?;
            }
        }
        if paren {
            write!(f, ")")?;
        }
        Ok(())
    }
}

impl fmt::Display for FormulaDisplay<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.write(f, &self.formula.expr, 0)
    }
}
