use std::collections::{BTreeMap, BTreeSet, HashMap};

use num_bigint::BigInt;
use num_traits::Zero;

use super::PolytopeError;
use crate::logic::{ModelSpec, StatVector, World};
use crate::numerics::Rational;
use crate::wfomc::LocalStructure;

/// Largest count-space box the point enumeration will allocate.
pub const MAX_BOX_BITS: usize = 1 << 28;

/// Mixed-radix index over count vectors `0..=max[i]`.
struct CountBox {
    max: Vec<u32>,
    strides: Vec<usize>,
    total: usize,
}

impl CountBox {
    fn new(max: &[u32]) -> Result<Self, PolytopeError> {
        let mut strides = Vec::with_capacity(max.len());
        let mut total: usize = 1;
        for &m in max {
            strides.push(total);
            total = total
                .checked_mul(m as usize + 1)
                .filter(|&t| t <= MAX_BOX_BITS)
                .ok_or(PolytopeError::TooLarge)?;
        }
        Ok(CountBox { max: max.to_vec(), strides, total })
    }

    fn offset(&self, counts: &[u32]) -> usize {
        counts.iter().zip(&self.strides).map(|(&c, &s)| c as usize * s).sum()
    }

    fn decode(&self, mut offset: usize) -> Vec<u32> {
        let mut out = vec![0; self.max.len()];
        for i in (0..self.max.len()).rev() {
            out[i] = (offset / self.strides[i]) as u32;
            offset %= self.strides[i];
        }
        out
    }
}

/// A set of count vectors as a bitset over a [`CountBox`].
///
/// Sums never leave the box (counts are bounded by grounding totals), so
/// translation by a count vector is a plain shift of the bit index.
#[derive(Clone, Debug, PartialEq)]
struct Bits(Vec<u64>);

impl Bits {
    fn empty(total: usize) -> Self {
        Bits(vec![0; total.div_ceil(64)])
    }

    fn singleton(total: usize, i: usize) -> Self {
        let mut b = Bits::empty(total);
        b.0[i / 64] |= 1 << (i % 64);
        b
    }

    fn is_empty(&self) -> bool {
        self.0.iter().all(|&w| w == 0)
    }

    fn ones(&self) -> impl Iterator<Item = usize> + '_ {
        self.0.iter().enumerate().flat_map(|(wi, &w)| {
            let mut w = w;
            std::iter::from_fn(move || {
                if w == 0 {
                    return None;
                }
                let b = w.trailing_zeros() as usize;
                w &= w - 1;
                Some(wi * 64 + b)
            })
        })
    }

    fn count(&self) -> usize {
        self.0.iter().map(|w| w.count_ones() as usize).sum()
    }

    /// `self |= src << shift`.
    fn shift_or(&mut self, src: &Bits, shift: usize) {
        let words = shift / 64;
        let bits = shift % 64;
        let len = self.0.len();
        for (i, &w) in src.0.iter().enumerate() {
            if w == 0 {
                continue;
            }
            let j = i + words;
            if j >= len {
                break;
            }
            self.0[j] |= w << bits;
            if bits > 0 && j + 1 < len {
                self.0[j + 1] |= w >> (64 - bits);
            }
        }
    }

    fn union(&mut self, other: &Bits) {
        for (a, b) in self.0.iter_mut().zip(&other.0) {
            *a |= b;
        }
    }

    /// Minkowski sum.
    fn sum(&self, other: &Bits) -> Bits {
        let (small, large) = if self.count() <= other.count() { (self, other) } else { (other, self) };
        let mut out = Bits::empty(self.0.len() * 64);
        for s in small.ones() {
            out.shift_or(large, s);
        }
        out
    }
}

struct PointSearch<'a> {
    structure: &'a LocalStructure,
    cbox: CountBox,
    zero: Bits,
    /// Distinct count vectors of the allowed types per live cell pair.
    types: Vec<Vec<Bits>>,
    folds: HashMap<(usize, usize, usize), Bits>,
    found: Bits,
}

impl PointSearch<'_> {
    /// Set of sums of `p` pair-type count vectors for live cells `q <= r`.
    fn fold(&mut self, q: usize, r: usize, p: usize) -> Bits {
        if p == 0 {
            return self.zero.clone();
        }
        if let Some(b) = self.folds.get(&(q, r, p)) {
            return b.clone();
        }
        let live = self.structure.num_live();
        let mut types = Bits::empty(self.cbox.total);
        for t in &self.types[q * live + r] {
            types.union(t);
        }
        let prev = self.fold(q, r, p - 1);
        let out = if types.is_empty() { types } else { prev.sum(&types) };
        self.folds.insert((q, r, p), out.clone());
        out
    }

    fn visit(&mut self, q: usize, remaining: usize, j: &mut Vec<usize>, partial: Bits) {
        let live = self.structure.num_live();
        let last = q + 1 == live;
        let range = if last { remaining..=remaining } else { 0..=remaining };
        for c in range {
            let mut s = Bits::empty(self.cbox.total);
            let base: Vec<u32> = self.structure.cells[q].counts.iter().map(|&x| x * c as u32).collect();
            s.shift_or(&partial, self.cbox.offset(&base));
            let mut factors = vec![(q, q, c * c.saturating_sub(1) / 2)];
            factors.extend(j.iter().enumerate().map(|(r, &jr)| (r, q, jr * c)));
            for (a, b, p) in factors {
                if s.is_empty() {
                    break;
                }
                let f = self.fold(a, b, p);
                s = if p == 0 { s } else { s.sum(&f) };
            }
            if s.is_empty() {
                continue;
            }
            if last {
                self.found.union(&s);
            } else {
                j.push(c);
                self.visit(q + 1, remaining - c, j, s);
                j.pop();
            }
        }
    }
}

/// Per-formula grounding totals as integers.
pub fn grounding_totals(model: &ModelSpec, n: usize) -> Vec<u64> {
    model
        .soft
        .iter()
        .map(|s| crate::numerics::rational::falling_factorial(n as u64, s.formula.num_vars() as u64))
        .collect()
}

pub fn to_stat_vector(counts: &[u32], totals: &[u64]) -> StatVector {
    StatVector(
        counts
            .iter()
            .zip(totals)
            .map(|(&c, &t)| if t == 0 { Rational::zero() } else { Rational::new(BigInt::from(c), BigInt::from(t)) })
            .collect(),
    )
}

/// Every realizable grounding-count vector, from the lifted cell structure.
pub fn enumerate_counts(structure: &LocalStructure, totals: &[u64], n: usize) -> Result<Vec<Vec<u32>>, PolytopeError> {
    let max: Vec<u32> = totals.iter().map(|&t| t as u32).collect();
    let cbox = CountBox::new(&max)?;
    let live = structure.num_live();
    if live == 0 || n == 0 {
        return Ok(Vec::new());
    }
    let mut types = vec![Vec::new(); live * live];
    for q in 0..live {
        for r in q..live {
            let distinct: BTreeSet<&Vec<u32>> = structure.pair_types(q, r).iter().map(|t| &t.counts).collect();
            types[q * live + r] = distinct.into_iter().map(|c| Bits::singleton(cbox.total, cbox.offset(c))).collect();
        }
    }
    let zero = Bits::singleton(cbox.total, 0);
    let found = Bits::empty(cbox.total);
    let mut search = PointSearch { structure, cbox, zero: zero.clone(), types, folds: HashMap::new(), found };
    search.visit(0, n, &mut Vec::new(), zero);
    Ok(search.found.ones().map(|i| search.cbox.decode(i)).collect())
}

/// A lifted world class: element counts per live cell and, for each pair of
/// live cells `q <= r`, how many element pairs carry each allowed pair type.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CellConfiguration {
    pub cells: Vec<usize>,
    /// `(q, r) -> [(type index into pair_types(q, r), count)]`, zero counts omitted.
    pub pair_types: BTreeMap<(usize, usize), Vec<(usize, usize)>>,
}

impl CellConfiguration {
    pub fn counts(&self, structure: &LocalStructure) -> Vec<u32> {
        let mut out = vec![0u32; structure.tracked.len()];
        for (q, &c) in self.cells.iter().enumerate() {
            for (o, x) in out.iter_mut().zip(&structure.cells[q].counts) {
                *o += c as u32 * x;
            }
        }
        for (&(q, r), list) in &self.pair_types {
            let types = structure.pair_types(q, r);
            for &(t, k) in list {
                for (o, x) in out.iter_mut().zip(&types[t].counts) {
                    *o += k as u32 * x;
                }
            }
        }
        out
    }

    /// Builds a world in this class. Elements fill cells in order; element
    /// pairs of each cell pair take types in order.
    pub fn representative_world(&self, model: &ModelSpec, structure: &LocalStructure, domain: Vec<String>) -> World {
        let vocab = &model.vocabulary;
        let n: usize = self.cells.iter().sum();
        assert_eq!(domain.len(), n, "domain size must match the configuration");
        let mut cell_of = Vec::with_capacity(n);
        for (q, &c) in self.cells.iter().enumerate() {
            cell_of.extend(std::iter::repeat_n(q, c));
        }
        let mut world = World::new(vocab, domain).expect("distinct constants");
        let in_model = |p: crate::logic::PredId| p.0 < vocab.len();
        let nu = structure.unary.len();
        for (a, &q) in cell_of.iter().enumerate() {
            let bits = structure.cells[q].bits;
            for (k, &p) in structure.unary.iter().enumerate() {
                if in_model(p) && bits >> k & 1 == 1 {
                    world.set(p, &[a], true);
                }
            }
            for (k, &p) in structure.binary.iter().enumerate() {
                if in_model(p) && bits >> (nu + k) & 1 == 1 {
                    world.set(p, &[a, a], true);
                }
            }
        }
        for (&(q, r), list) in &self.pair_types {
            let members = |c: usize| -> Vec<usize> { (0..n).filter(|&e| cell_of[e] == c).collect() };
            let (mq, mr) = (members(q), members(r));
            let mut element_pairs = Vec::new();
            for &a in &mq {
                for &b in &mr {
                    if q != r || b > a {
                        element_pairs.push((a, b));
                    }
                }
            }
            let types = structure.pair_types(q, r);
            let mut next = element_pairs.into_iter();
            for &(t, k) in list {
                let bits = types[t].bits;
                for (a, b) in next.by_ref().take(k) {
                    for (kk, &p) in structure.binary.iter().enumerate() {
                        if !in_model(p) {
                            continue;
                        }
                        if bits >> (2 * kk) & 1 == 1 {
                            world.set(p, &[a, b], true);
                        }
                        if bits >> (2 * kk + 1) & 1 == 1 {
                            world.set(p, &[b, a], true);
                        }
                    }
                }
            }
        }
        world
    }
}

fn compositions(total: usize, parts: usize) -> Vec<Vec<usize>> {
    if parts == 0 {
        return if total == 0 { vec![Vec::new()] } else { Vec::new() };
    }
    if parts == 1 {
        return vec![vec![total]];
    }
    let mut out = Vec::new();
    for first in 0..=total {
        for mut rest in compositions(total - first, parts - 1) {
            rest.insert(0, first);
            out.push(rest);
        }
    }
    out
}

/// Every cell configuration over a domain of size `n`, up to `limit` of them.
pub fn enumerate_configurations(
    structure: &LocalStructure,
    n: usize,
    limit: usize,
) -> Result<Vec<CellConfiguration>, PolytopeError> {
    let live = structure.num_live();
    let mut out = Vec::new();
    for cells in compositions(n, live) {
        let mut partial = vec![BTreeMap::new()];
        for q in 0..live {
            for r in q..live {
                let p = if q == r { cells[q] * cells[q].saturating_sub(1) / 2 } else { cells[q] * cells[r] };
                if p == 0 {
                    continue;
                }
                let num_types = structure.pair_types(q, r).len();
                let splits = compositions(p, num_types);
                let mut next = Vec::new();
                for base in &partial {
                    for split in &splits {
                        let mut m: BTreeMap<(usize, usize), Vec<(usize, usize)>> = base.clone();
                        m.insert((q, r), split.iter().enumerate().filter(|(_, &k)| k > 0).map(|(t, &k)| (t, k)).collect());
                        next.push(m);
                        if next.len() + out.len() > limit {
                            return Err(PolytopeError::TooLarge);
                        }
                    }
                }
                partial = next;
            }
        }
        out.extend(partial.into_iter().map(|pair_types| CellConfiguration { cells: cells.clone(), pair_types }));
        if out.len() > limit {
            return Err(PolytopeError::TooLarge);
        }
    }
    Ok(out)
}
