//! Exact census of subgroups of a given index, with the normal-core bound
//! as a checked invariant and a few supporting finite-group utilities.

use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use crate::arith;
use crate::error::{Error, Result};
use crate::group::{self, Group};
use crate::homs::MuContext;

pub use crate::group::small_generating_set;

/// Limits on census cells.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CensusBounds {
    pub max_order: usize,
    pub max_k: usize,
    pub max_gens: usize,
    /// Upper bound on `(k!)^{|gens|}`, the size of the action search space.
    pub max_search: u128,
    /// Largest group handed to the subgroup-lattice oracle.
    pub oracle_order: usize,
    /// Seed for the generating-set search.
    #[serde(default)]
    pub seed: u64,
}

impl Default for CensusBounds {
    fn default() -> Self {
        CensusBounds { max_order: 100_000, max_k: 6, max_gens: 4, max_search: 1 << 40, oracle_order: 200, seed: 0 }
    }
}

/// A subgroup on sorted canonical ids of its parent.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SubgroupHandle {
    pub elements: Vec<usize>,
    pub index: usize,
    pub normal: bool,
    /// Intersection of all conjugates.
    pub core: Vec<usize>,
}

impl SubgroupHandle {
    pub fn order(&self) -> usize {
        self.elements.len()
    }

    pub fn core_index(&self, parent_order: usize) -> usize {
        parent_order / self.core.len()
    }
}

/// One census cell, as emitted in reports.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CensusReport {
    pub spec: String,
    pub q: u64,
    pub n: usize,
    pub k: usize,
    pub order: usize,
    pub count: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub subgroups: Option<Vec<SubgroupHandle>>,
    /// Catalog isogenies reaching each subgroup, in census order.
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub reached_by: Vec<Vec<String>>,
}

/// Builds the handle for a known subgroup, computing its normal core.
pub fn handle<G: Group + ?Sized>(g: &G, elements: Vec<usize>) -> SubgroupHandle {
    let core = core_ids(g, &elements);
    SubgroupHandle { index: g.order() / elements.len(), normal: core.len() == elements.len(), core, elements }
}

/// All subgroups of index exactly `k`.
///
/// Each subgroup `H` corresponds to the transitive action of `G` on the
/// cosets `Hx`; the search assigns to every element its coset label along
/// the edges of the Cayley graph, choosing generator permutations lazily and
/// numbering new cosets in order of first appearance. Every subgroup is
/// therefore produced exactly once, and the local condition
/// `f(g s) = pi_s(f(g))` is checked for every element `g` and generator `s`.
pub fn index_k_subgroups<G: Group + ?Sized>(g: &G, k: usize, bounds: &CensusBounds) -> Result<Vec<SubgroupHandle>> {
    let ids = index_k_subgroup_ids(g, k, bounds)?;
    let mut out: Vec<SubgroupHandle> = ids.into_iter().map(|h| handle(g, h)).collect();
    out.sort_by(|a, b| a.elements.cmp(&b.elements));
    for h in &out {
        let ci = h.core_index(g.order());
        if ci < k || ci as u128 > arith::factorial(k as u64) || g.order() % ci != 0 {
            return Err(Error::HypothesisViolated(format!("core index {ci} outside [{k}, {k}!]")));
        }
    }
    Ok(out)
}

/// As [`index_k_subgroups`] but without cores: sorted id lists only.
pub fn index_k_subgroup_ids<G: Group + ?Sized>(g: &G, k: usize, bounds: &CensusBounds) -> Result<Vec<Vec<usize>>> {
    let n = g.order();
    if k == 0 {
        return Err(Error::Config("index must be positive".into()));
    }
    if n > bounds.max_order {
        return Err(Error::BoundExceeded { what: "census group".into(), size: n as u128, bound: bounds.max_order as u128 });
    }
    if k > bounds.max_k {
        return Err(Error::BoundExceeded { what: "census index".into(), size: k as u128, bound: bounds.max_k as u128 });
    }
    if n % k != 0 {
        return Ok(Vec::new());
    }
    if k == 1 {
        return Ok(vec![(0..n).collect()]);
    }
    let gens = small_generating_set(g, bounds.seed);
    if gens.len() > bounds.max_gens {
        return Err(Error::BoundExceeded {
            what: "generating set".into(),
            size: gens.len() as u128,
            bound: bounds.max_gens as u128,
        });
    }
    let search = arith::factorial(k as u64).checked_pow(gens.len() as u32).unwrap_or(u128::MAX);
    if search > bounds.max_search {
        return Err(Error::BoundExceeded { what: "action search space".into(), size: search, bound: bounds.max_search });
    }
    Ok(CosetSearch::new(g, &gens, k).run())
}

const NONE: u8 = u8::MAX;

struct CosetSearch {
    n: usize,
    k: usize,
    ngens: usize,
    /// `edges[i] = (g, s, g*s)` in breadth-first order of `g`.
    edges: Vec<(u32, u8, u32)>,
    identity: usize,
}

/// Coset labels and the partial generator permutations.
struct State {
    label: Vec<u8>,
    fwd: Vec<u8>,
    bwd: Vec<u8>,
    points: usize,
    trail: Vec<Trail>,
}

enum Step {
    Done,
    Choice,
    Conflict,
}

/// Undo log entries.
enum Trail {
    Label(u32),
    Perm(u8, u8, u8),
}

impl CosetSearch {
    fn new<G: Group + ?Sized>(g: &G, gens: &[usize], k: usize) -> Self {
        let n = g.order();
        let mut seen = vec![false; n];
        let mut order = vec![g.identity()];
        seen[g.identity()] = true;
        let mut edges = Vec::with_capacity(n * gens.len());
        let mut i = 0;
        while i < order.len() {
            let x = order[i];
            for (si, &s) in gens.iter().enumerate() {
                let y = g.mul(x, s);
                edges.push((x as u32, si as u8, y as u32));
                if !seen[y] {
                    seen[y] = true;
                    order.push(y);
                }
            }
            i += 1;
        }
        CosetSearch { n, k, ngens: gens.len(), edges, identity: g.identity() }
    }

    fn run(&self) -> Vec<Vec<usize>> {
        let k = self.k;
        let mut st = State {
            label: vec![NONE; self.n],
            fwd: vec![NONE; self.ngens * k],
            bwd: vec![NONE; self.ngens * k],
            points: 1,
            trail: Vec::new(),
        };
        st.label[self.identity] = 0;
        // choice points: (edge, trail length, points, next candidate label)
        let mut stack: Vec<(usize, usize, usize, usize)> = Vec::new();
        let mut results = Vec::new();
        let mut e = 0usize;
        loop {
            match self.propagate(&mut e, &mut st) {
                Step::Done => {
                    if st.points == k {
                        results.push((0..self.n).filter(|&x| st.label[x] == 0).collect());
                    }
                }
                Step::Choice => stack.push((e, st.trail.len(), st.points, 0)),
                Step::Conflict => {}
            }
            // Resume at the most recent choice point with an untried label.
            loop {
                let Some(top) = stack.last_mut() else {
                    return results;
                };
                let (ce, tlen, pts, next) = *top;
                self.undo(tlen, &mut st);
                st.points = pts;
                let (x, s, y) = self.edges[ce];
                let s = s as usize;
                let limit = if pts < k { pts + 1 } else { pts };
                let c = (next..limit).find(|&c| c == pts || st.bwd[s * k + c] == NONE);
                if let Some(c) = c {
                    top.3 = c + 1;
                    let a = st.label[x as usize] as usize;
                    self.assign(s, a, c, &mut st);
                    st.label[y as usize] = c as u8;
                    st.trail.push(Trail::Label(y));
                    if c == pts {
                        st.points += 1;
                    }
                    e = ce + 1;
                    break;
                }
                stack.pop();
            }
        }
    }

    /// Applies every forced edge from `e` on; stops at the first edge whose
    /// target label is free.
    fn propagate(&self, e: &mut usize, st: &mut State) -> Step {
        let k = self.k;
        while *e < self.edges.len() {
            let (x, s, y) = self.edges[*e];
            let (s, y) = (s as usize, y as usize);
            let a = st.label[x as usize] as usize;
            let b = st.fwd[s * k + a];
            let ly = st.label[y];
            if b != NONE {
                if ly == NONE {
                    st.label[y] = b;
                    st.trail.push(Trail::Label(y as u32));
                } else if ly != b {
                    return Step::Conflict;
                }
            } else if ly != NONE {
                if st.bwd[s * k + ly as usize] != NONE {
                    return Step::Conflict;
                }
                self.assign(s, a, ly as usize, st);
            } else {
                return Step::Choice;
            }
            *e += 1;
        }
        Step::Done
    }

    fn assign(&self, s: usize, a: usize, b: usize, st: &mut State) {
        st.fwd[s * self.k + a] = b as u8;
        st.bwd[s * self.k + b] = a as u8;
        st.trail.push(Trail::Perm(s as u8, a as u8, b as u8));
    }

    fn undo(&self, len: usize, st: &mut State) {
        while st.trail.len() > len {
            match st.trail.pop().expect("nonempty trail") {
                Trail::Label(y) => st.label[y as usize] = NONE,
                Trail::Perm(s, a, b) => {
                    st.fwd[s as usize * self.k + a as usize] = NONE;
                    st.bwd[s as usize * self.k + b as usize] = NONE;
                }
            }
        }
    }
}

/// All subgroups, from cyclic subgroups closed under pairwise joins.
pub fn subgroup_lattice_oracle<G: Group + ?Sized>(g: &G, bound: usize) -> Result<Vec<Vec<usize>>> {
    if g.order() > bound {
        return Err(Error::BoundExceeded {
            what: "subgroup lattice oracle".into(),
            size: g.order() as u128,
            bound: bound as u128,
        });
    }
    // Each subgroup is kept with a generating set so joins stay cheap.
    let mut found: BTreeSet<Vec<usize>> = BTreeSet::new();
    let mut with_gens: Vec<(Vec<usize>, Vec<usize>)> = Vec::new();
    for x in 0..g.order() {
        let h = group::generate(g, &[x]);
        if found.insert(h.clone()) {
            with_gens.push((h, vec![x]));
        }
    }
    let mut start = 0;
    while start < with_gens.len() {
        let end = with_gens.len();
        for i in 0..end {
            for j in start.max(i + 1)..end {
                let gens: Vec<usize> = with_gens[i].1.iter().chain(&with_gens[j].1).copied().collect();
                let h = group::generate(g, &gens);
                if found.insert(h.clone()) {
                    with_gens.push((h, gens));
                }
            }
        }
        start = end;
    }
    Ok(found.into_iter().collect())
}

fn core_ids<G: Group + ?Sized>(g: &G, h: &[usize]) -> Vec<usize> {
    let mut in_core = group::mask(g.order(), h);
    for x in group::right_coset_representatives(g, h) {
        let conj = group::mask(g.order(), &h.iter().map(|&y| g.conjugate(y, x)).collect::<Vec<_>>());
        for (c, &m) in in_core.iter_mut().zip(&conj) {
            *c &= m;
        }
    }
    (0..g.order()).filter(|&x| in_core[x]).collect()
}

/// Intersection of the conjugates of `H`, checking `k <= [G : core] <= k!`
/// when `H` has index `k`.
pub fn normal_core<G: Group + ?Sized>(g: &G, h: &[usize]) -> Result<SubgroupHandle> {
    let mut h = h.to_vec();
    h.sort_unstable();
    h.dedup();
    if !group::is_subgroup(g, &h) {
        return Err(Error::NotSubgroup("normal core of a non-subgroup".into()));
    }
    let k = g.order() / h.len();
    let core = core_ids(g, &h);
    let ci = g.order() / core.len();
    if ci < k || ci as u128 > arith::factorial(k as u64) {
        return Err(Error::HypothesisViolated(format!("core index {ci} outside [{k}, {k}!]")));
    }
    Ok(handle(g, core))
}

/// The commutator subgroup, as the normal closure of generator commutators.
pub fn derived_subgroup<G: Group + ?Sized>(g: &G) -> SubgroupHandle {
    let gens = small_generating_set(g, 0);
    let mut seeds: Vec<usize> = Vec::new();
    for &a in &gens {
        for &b in &gens {
            seeds.push(g.mul(g.mul(g.inv(a), g.inv(b)), g.mul(a, b)));
        }
    }
    let elements = normal_closure(g, &seeds, &gens);
    SubgroupHandle { index: g.order() / elements.len(), normal: true, core: elements.clone(), elements }
}

fn normal_closure<G: Group + ?Sized>(g: &G, seeds: &[usize], gens: &[usize]) -> Vec<usize> {
    let mut current_gens: Vec<usize> = seeds.to_vec();
    loop {
        let h = group::generate(g, &current_gens);
        let in_h = group::mask(g.order(), &h);
        let missing: Vec<usize> = current_gens
            .iter()
            .flat_map(|&x| gens.iter().map(move |&s| (x, s)))
            .map(|(x, s)| g.conjugate(x, s))
            .filter(|&c| !in_h[c])
            .collect();
        if missing.is_empty() {
            return h;
        }
        current_gens.extend(missing);
        current_gens.sort_unstable();
        current_gens.dedup();
    }
}

/// Invariant factors of `G / [G, G]`.
pub fn abelianization_invariants<G: Group + ?Sized>(g: &G) -> Result<Vec<u64>> {
    let d = derived_subgroup(g);
    let gens = small_generating_set(g, 0);
    group::quotient_abelian_invariants(g, &d.elements, &gens)
}

/// Elements commuting with every element of `G`.
pub fn center<G: Group + ?Sized>(g: &G) -> SubgroupHandle {
    let gens = small_generating_set(g, 0);
    let elements: Vec<usize> =
        (0..g.order()).filter(|&x| gens.iter().all(|&s| g.mul(x, s) == g.mul(s, x))).collect();
    SubgroupHandle { index: g.order() / elements.len(), normal: true, core: elements.clone(), elements }
}

/// Both sides of `[G : H] = [G/N : HN/N] * [N : H ∩ N]`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct IndexFormula {
    pub lhs: usize,
    pub rhs: usize,
    pub equal: bool,
}

pub fn index_formula_check<G: Group + ?Sized>(g: &G, h: &[usize], n: &[usize]) -> Result<IndexFormula> {
    let mut h = h.to_vec();
    h.sort_unstable();
    h.dedup();
    let mut n = n.to_vec();
    n.sort_unstable();
    n.dedup();
    if !group::is_subgroup(g, &h) || !group::is_subgroup(g, &n) {
        return Err(Error::NotSubgroup("index formula needs subgroups".into()));
    }
    let gens = small_generating_set(g, 0);
    if !group::is_normalized_by(g, &n, &gens) {
        return Err(Error::HypothesisViolated("N is not normal".into()));
    }
    let in_n = group::mask(g.order(), &n);
    let meet = h.iter().filter(|&&x| in_n[x]).count();
    let mut hn = vec![false; g.order()];
    for &x in &h {
        for &y in &n {
            hn[g.mul(x, y)] = true;
        }
    }
    let hn_order = hn.iter().filter(|&&b| b).count();
    let lhs = g.order() / h.len();
    let rhs = (g.order() / hn_order) * (n.len() / meet);
    Ok(IndexFormula { lhs, rhs, equal: lhs == rhs })
}

/// Smallest `k` in `2..=k_max` with an index-`k` subgroup, if any.
pub fn minimal_proper_index<G: Group + ?Sized>(g: &G, k_max: usize, bounds: &CensusBounds) -> Result<Option<usize>> {
    for k in 2..=k_max {
        if !index_k_subgroup_ids(g, k, bounds)?.is_empty() {
            return Ok(Some(k));
        }
    }
    Ok(None)
}

/// For each named context, whether its induced isogeny reaches `H` (false
/// when `H` misses the rational image). `h` holds ids of the contexts'
/// common point group.
pub fn reached_by(h: &[usize], catalog: &[(String, &MuContext)]) -> Result<Vec<(String, bool)>> {
    let mut out = Vec::with_capacity(catalog.len());
    for (name, ctx) in catalog {
        let in_h = group::mask(ctx.group().order(), h);
        let reaches = if ctx.image().iter().all(|&x| in_h[x]) { ctx.induced_reaches(h)?.reaches } else { false };
        out.push((name.clone(), reaches));
    }
    Ok(out)
}

/// Groups subgroups (given by sorted ids) into conjugacy classes; returns
/// indices into `subgroups`, classes ordered by their first member.
pub fn conjugacy_classes<G: Group + ?Sized>(g: &G, subgroups: &[Vec<usize>]) -> Vec<Vec<usize>> {
    let gens = small_generating_set(g, 0);
    let position: std::collections::HashMap<&Vec<usize>, usize> =
        subgroups.iter().enumerate().map(|(i, h)| (h, i)).collect();
    let mut class = vec![usize::MAX; subgroups.len()];
    let mut classes = Vec::new();
    for i in 0..subgroups.len() {
        if class[i] != usize::MAX {
            continue;
        }
        let c = classes.len();
        class[i] = c;
        let mut members = vec![i];
        let mut j = 0;
        while j < members.len() {
            let h = &subgroups[members[j]];
            for &s in &gens {
                let mut conj: Vec<usize> = h.iter().map(|&x| g.conjugate(x, s)).collect();
                conj.sort_unstable();
                if let Some(&p) = position.get(&conj) {
                    if class[p] == usize::MAX {
                        class[p] = c;
                        members.push(p);
                    }
                }
            }
            j += 1;
        }
        members.sort_unstable();
        classes.push(members);
    }
    classes
}

#[cfg(test)]
mod tests;
