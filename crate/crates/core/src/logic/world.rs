use std::collections::BTreeMap;

use super::syntax::{Interpretation, PredId, Vocabulary};
use super::LogicError;

/// Dense index of every ground atom over a fixed vocabulary and domain size.
///
/// Unary `p(a)` sits at `offset(p) + a`; binary `r(a, b)` at `offset(r) + a * n + b`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AtomLayout {
    n: usize,
    offsets: Vec<usize>,
    arities: Vec<usize>,
    total: usize,
}

impl AtomLayout {
    pub fn new(vocab: &Vocabulary, n: usize) -> Self {
        let mut offsets = Vec::with_capacity(vocab.len());
        let mut arities = Vec::with_capacity(vocab.len());
        let mut total = 0;
        for (_, p) in vocab.iter() {
            offsets.push(total);
            arities.push(p.arity);
            total += n.pow(p.arity as u32);
        }
        AtomLayout { n, offsets, arities, total }
    }

    pub fn domain_size(&self) -> usize {
        self.n
    }

    pub fn total(&self) -> usize {
        self.total
    }

    pub fn arity(&self, pred: PredId) -> usize {
        self.arities[pred.0]
    }

    #[inline]
    pub fn index(&self, pred: PredId, args: &[usize]) -> usize {
        match args {
            [a] => self.offsets[pred.0] + a,
            [a, b] => self.offsets[pred.0] + a * self.n + b,
            _ => unreachable!("only unary and binary atoms exist"),
        }
    }

    /// Inverse of [`AtomLayout::index`].
    pub fn atom(&self, index: usize) -> (PredId, Vec<usize>) {
        let p = self.offsets.partition_point(|&o| o <= index) - 1;
        let local = index - self.offsets[p];
        let args = if self.arities[p] == 1 { vec![local] } else { vec![local / self.n, local % self.n] };
        (PredId(p), args)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub struct GroundAtom {
    pub pred: PredId,
    pub args: Vec<usize>,
}

/// A training database: a finite domain and the set of true ground atoms (closed world).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct World {
    domain: Vec<String>,
    layout: AtomLayout,
    truth: Vec<bool>,
}

impl World {
    /// The empty world over `domain`.
    pub fn new(vocab: &Vocabulary, domain: Vec<String>) -> Result<Self, LogicError> {
        let mut seen = BTreeMap::new();
        for (i, c) in domain.iter().enumerate() {
            if seen.insert(c.clone(), i).is_some() {
                return Err(LogicError::DuplicateConstant(c.clone()));
            }
        }
        let layout = AtomLayout::new(vocab, domain.len());
        let truth = vec![false; layout.total()];
        Ok(World { domain, layout, truth })
    }

    /// Builds a world from atoms given by predicate and constant names.
    pub fn from_atoms<S: AsRef<str>>(
        vocab: &Vocabulary,
        domain: Vec<String>,
        atoms: &[(S, Vec<S>)],
    ) -> Result<Self, LogicError> {
        let mut w = World::new(vocab, domain)?;
        for (pred, args) in atoms {
            let names: Vec<&str> = args.iter().map(|a| a.as_ref()).collect();
            w.assert_named(vocab, pred.as_ref(), &names)?;
        }
        Ok(w)
    }

    /// Wraps a raw truth vector laid out by [`AtomLayout`].
    pub fn from_truth(vocab: &Vocabulary, domain: Vec<String>, truth: Vec<bool>) -> Result<Self, LogicError> {
        let mut w = World::new(vocab, domain)?;
        assert_eq!(truth.len(), w.truth.len(), "truth vector does not match the layout");
        w.truth = truth;
        Ok(w)
    }

    pub fn assert_named(&mut self, vocab: &Vocabulary, pred: &str, args: &[&str]) -> Result<(), LogicError> {
        let id = vocab.lookup(pred).ok_or_else(|| LogicError::UnknownPredicate(pred.to_string()))?;
        let arity = vocab.predicate(id).arity;
        if arity != args.len() {
            return Err(LogicError::ArityMismatch { predicate: pred.to_string(), expected: arity, found: args.len() });
        }
        let idx = args
            .iter()
            .map(|a| self.constant_index(a).ok_or_else(|| LogicError::UnknownConstant(a.to_string())))
            .collect::<Result<Vec<_>, _>>()?;
        self.set(id, &idx, true);
        Ok(())
    }

    pub fn set(&mut self, pred: PredId, args: &[usize], value: bool) {
        let i = self.layout.index(pred, args);
        self.truth[i] = value;
    }

    pub fn domain(&self) -> &[String] {
        &self.domain
    }

    pub fn domain_size(&self) -> usize {
        self.domain.len()
    }

    pub fn layout(&self) -> &AtomLayout {
        &self.layout
    }

    pub fn constant_index(&self, name: &str) -> Option<usize> {
        self.domain.iter().position(|c| c == name)
    }

    pub fn atoms(&self) -> impl Iterator<Item = GroundAtom> + '_ {
        self.truth.iter().enumerate().filter(|(_, &t)| t).map(|(i, _)| {
            let (pred, args) = self.layout.atom(i);
            GroundAtom { pred, args }
        })
    }

    pub fn num_true_atoms(&self) -> usize {
        self.truth.iter().filter(|&&t| t).count()
    }

    /// Renames constants: element `i` of the result plays the role of `perm[i]` here.
    pub fn permuted(&self, perm: &[usize]) -> World {
        assert_eq!(perm.len(), self.domain.len());
        let mut inverse = vec![0; perm.len()];
        for (i, &p) in perm.iter().enumerate() {
            inverse[p] = i;
        }
        let mut out = self.clone();
        out.domain = perm.iter().map(|&p| self.domain[p].clone()).collect();
        out.truth.iter_mut().for_each(|t| *t = false);
        for GroundAtom { pred, args } in self.atoms() {
            let mapped: Vec<usize> = args.iter().map(|&a| inverse[a]).collect();
            out.set(pred, &mapped, true);
        }
        out
    }
}

impl Interpretation for World {
    fn holds(&self, pred: PredId, args: &[usize]) -> bool {
        self.truth[self.layout.index(pred, args)]
    }
}
