//! Generic finite-automaton algebra over arbitrary symbol sets.
//!
//! Automata here are the common currency of the whole crate: protocols,
//! per-participant projections, synchronous products and every derived
//! language are all [`FiniteAutomaton`] values. States are opaque indices;
//! human-readable provenance (e.g. subset contents after determinization)
//! is kept as optional metadata for diagnostics only.

use std::collections::{BTreeMap, BTreeSet, HashMap, VecDeque};
use std::fmt::Debug;
use std::hash::Hash;

use thiserror::Error;

use crate::semilinear::{LinearSet, SemilinearSet};

/// Anything that can label a transition. Blanket-implemented.
pub trait Symbol: Clone + Ord + Eq + Hash + Debug {}
impl<T: Clone + Ord + Eq + Hash + Debug> Symbol for T {}

pub type StateId = usize;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum AutomatonError {
    #[error("alphabet mismatch between operands")]
    AlphabetMismatch,
}

/// Boolean combination modes for [`FiniteAutomaton::product`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BoolOp {
    Intersect,
    Union,
    Difference,
}

/// Result of an inclusion query: either it holds, or a shortest witness
/// word from the larger-side language that the smaller side rejects.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Inclusion<S> {
    Holds,
    Fails { counterexample: Vec<S> },
}

impl<S> Inclusion<S> {
    pub fn holds(&self) -> bool {
        matches!(self, Inclusion::Holds)
    }
}

/// A finite automaton over symbol type `S`.
///
/// The alphabet carries the canonical symbol order used everywhere a
/// deterministic tie-break is needed (shortest words, enumeration,
/// counterexamples). Transitions are stored per state, keyed by the index
/// of the symbol in the alphabet; `eps` holds epsilon moves.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FiniteAutomaton<S: Symbol> {
    alphabet: Vec<S>,
    transitions: Vec<BTreeMap<usize, BTreeSet<StateId>>>,
    eps: Vec<BTreeSet<StateId>>,
    initial: StateId,
    finals: BTreeSet<StateId>,
    deterministic: bool,
    labels: Vec<String>,
}

impl<S: Symbol> FiniteAutomaton<S> {
    /// Builds an automaton from explicit parts. The alphabet is sorted and
    /// deduplicated into the canonical order; symbols on transitions must
    /// appear in it.
    pub fn new(
        alphabet: Vec<S>,
        num_states: usize,
        initial: StateId,
        finals: impl IntoIterator<Item = StateId>,
        transitions: impl IntoIterator<Item = (StateId, S, StateId)>,
        eps_transitions: impl IntoIterator<Item = (StateId, StateId)>,
    ) -> Self {
        let mut alphabet: Vec<S> = alphabet;
        alphabet.sort();
        alphabet.dedup();
        let num_states = num_states.max(initial + 1).max(1);
        let mut trans: Vec<BTreeMap<usize, BTreeSet<StateId>>> = vec![BTreeMap::new(); num_states];
        let mut eps: Vec<BTreeSet<StateId>> = vec![BTreeSet::new(); num_states];
        for (from, sym, to) in transitions {
            let idx = alphabet
                .binary_search(&sym)
                .unwrap_or_else(|_| panic!("transition symbol {sym:?} not in alphabet"));
            trans[from].entry(idx).or_default().insert(to);
        }
        for (from, to) in eps_transitions {
            eps[from].insert(to);
        }
        let mut fa = FiniteAutomaton {
            alphabet,
            transitions: trans,
            eps,
            initial,
            finals: finals.into_iter().collect(),
            deterministic: false,
            labels: Vec::new(),
        };
        fa.deterministic = fa.compute_deterministic();
        fa
    }

    /// Automaton recognizing the empty language over the given alphabet.
    pub fn empty(alphabet: Vec<S>) -> Self {
        Self::new(alphabet, 1, 0, [], [], [])
    }

    /// Automaton recognizing exactly the given finite set of words.
    pub fn from_words<I, W>(alphabet: Vec<S>, words: I) -> Self
    where
        I: IntoIterator<Item = W>,
        W: IntoIterator<Item = S>,
    {
        // Trie construction; determinization merges nothing further, but
        // normalizes the result.
        let mut alphabet: Vec<S> = alphabet;
        alphabet.sort();
        alphabet.dedup();
        let mut transitions: Vec<(StateId, S, StateId)> = Vec::new();
        let mut next: HashMap<(StateId, S), StateId> = HashMap::new();
        let mut finals = BTreeSet::new();
        let mut n_states = 1;
        for word in words {
            let mut cur = 0;
            for sym in word {
                cur = *next.entry((cur, sym.clone())).or_insert_with(|| {
                    let s = n_states;
                    n_states += 1;
                    transitions.push((cur, sym.clone(), s));
                    s
                });
            }
            finals.insert(cur);
        }
        Self::new(alphabet, n_states, 0, finals, transitions, [])
    }

    fn compute_deterministic(&self) -> bool {
        self.eps.iter().all(|e| e.is_empty())
            && self
                .transitions
                .iter()
                .all(|m| m.values().all(|succ| succ.len() <= 1))
    }

    pub fn alphabet(&self) -> &[S] {
        &self.alphabet
    }

    pub fn num_states(&self) -> usize {
        self.transitions.len()
    }

    pub fn initial(&self) -> StateId {
        self.initial
    }

    pub fn finals(&self) -> &BTreeSet<StateId> {
        &self.finals
    }

    pub fn is_final(&self, q: StateId) -> bool {
        self.finals.contains(&q)
    }

    pub fn is_deterministic(&self) -> bool {
        self.deterministic
    }

    pub fn state_label(&self, q: StateId) -> Option<&str> {
        self.labels.get(q).map(String::as_str)
    }

    pub fn set_state_labels(&mut self, labels: Vec<String>) {
        self.labels = labels;
    }

    /// All transitions as `(from, symbol, to)` triples, in canonical order.
    pub fn transitions(&self) -> impl Iterator<Item = (StateId, &S, StateId)> + '_ {
        self.transitions.iter().enumerate().flat_map(move |(q, m)| {
            m.iter().flat_map(move |(sym, succ)| {
                succ.iter().map(move |&to| (q, &self.alphabet[*sym], to))
            })
        })
    }

    pub fn successors(&self, q: StateId, sym: &S) -> impl Iterator<Item = StateId> + '_ {
        let idx = self.alphabet.binary_search(sym).ok();
        idx.and_then(|i| self.transitions[q].get(&i))
            .into_iter()
            .flat_map(|s| s.iter().copied())
    }

    /// Unique successor in a deterministic automaton.
    pub fn step(&self, q: StateId, sym: &S) -> Option<StateId> {
        self.successors(q, sym).next()
    }

    pub fn symbol_index(&self, sym: &S) -> Option<usize> {
        self.alphabet.binary_search(sym).ok()
    }

    fn eps_closure(&self, set: &BTreeSet<StateId>) -> BTreeSet<StateId> {
        let mut closure = set.clone();
        let mut stack: Vec<StateId> = set.iter().copied().collect();
        while let Some(q) = stack.pop() {
            for &r in &self.eps[q] {
                if closure.insert(r) {
                    stack.push(r);
                }
            }
        }
        closure
    }

    /// NFA simulation. Serves as the membership oracle the derived
    /// operations are tested against.
    pub fn accepts(&self, word: &[S]) -> bool {
        let mut current = self.eps_closure(&BTreeSet::from([self.initial]));
        for sym in word {
            let Some(idx) = self.alphabet.binary_search(sym).ok() else {
                return false;
            };
            let mut next = BTreeSet::new();
            for &q in &current {
                if let Some(succ) = self.transitions[q].get(&idx) {
                    next.extend(succ.iter().copied());
                }
            }
            if next.is_empty() {
                return false;
            }
            current = self.eps_closure(&next);
        }
        current.iter().any(|q| self.finals.contains(q))
    }

    /// Subset construction. The result is deterministic, contains only
    /// reachable non-empty subsets, and carries subset provenance labels.
    pub fn determinize(&self) -> Self {
        let start = self.eps_closure(&BTreeSet::from([self.initial]));
        let mut index: HashMap<BTreeSet<StateId>, StateId> = HashMap::new();
        let mut subsets: Vec<BTreeSet<StateId>> = vec![start.clone()];
        index.insert(start, 0);
        let mut transitions: Vec<BTreeMap<usize, BTreeSet<StateId>>> = Vec::new();
        let mut queue = VecDeque::from([0usize]);
        while let Some(qi) = queue.pop_front() {
            let subset = subsets[qi].clone();
            let mut row: BTreeMap<usize, BTreeSet<StateId>> = BTreeMap::new();
            for idx in 0..self.alphabet.len() {
                let mut next = BTreeSet::new();
                for &q in &subset {
                    if let Some(succ) = self.transitions[q].get(&idx) {
                        next.extend(succ.iter().copied());
                    }
                }
                if next.is_empty() {
                    continue;
                }
                let next = self.eps_closure(&next);
                let target = *index.entry(next.clone()).or_insert_with(|| {
                    subsets.push(next);
                    queue.push_back(subsets.len() - 1);
                    subsets.len() - 1
                });
                row.insert(idx, BTreeSet::from([target]));
            }
            if transitions.len() <= qi {
                transitions.resize(qi + 1, BTreeMap::new());
            }
            transitions[qi] = row;
        }
        let finals: BTreeSet<StateId> = subsets
            .iter()
            .enumerate()
            .filter(|(_, set)| set.iter().any(|q| self.finals.contains(q)))
            .map(|(i, _)| i)
            .collect();
        let labels = subsets
            .iter()
            .map(|set| {
                let parts: Vec<String> = set.iter().map(|q| self.describe_state(*q)).collect();
                format!("{{{}}}", parts.join(","))
            })
            .collect();
        let mut fa = FiniteAutomaton {
            alphabet: self.alphabet.clone(),
            transitions,
            eps: vec![BTreeSet::new(); subsets.len()],
            initial: 0,
            finals,
            deterministic: true,
            labels,
        };
        fa.deterministic = fa.compute_deterministic();
        fa
    }

    fn describe_state(&self, q: StateId) -> String {
        match self.labels.get(q) {
            Some(l) if !l.is_empty() => l.clone(),
            _ => q.to_string(),
        }
    }

    fn reachable_states(&self) -> BTreeSet<StateId> {
        let mut seen = BTreeSet::from([self.initial]);
        let mut stack = vec![self.initial];
        while let Some(q) = stack.pop() {
            for (_, succ) in &self.transitions[q] {
                for &r in succ {
                    if seen.insert(r) {
                        stack.push(r);
                    }
                }
            }
            for &r in &self.eps[q] {
                if seen.insert(r) {
                    stack.push(r);
                }
            }
        }
        seen
    }

    fn coreachable_states(&self) -> BTreeSet<StateId> {
        let mut rev: Vec<Vec<StateId>> = vec![Vec::new(); self.num_states()];
        for (q, row) in self.transitions.iter().enumerate() {
            for succ in row.values() {
                for &r in succ {
                    rev[r].push(q);
                }
            }
        }
        for (q, eps) in self.eps.iter().enumerate() {
            for &r in eps {
                rev[r].push(q);
            }
        }
        let mut seen: BTreeSet<StateId> = self.finals.clone();
        let mut stack: Vec<StateId> = self.finals.iter().copied().collect();
        while let Some(q) = stack.pop() {
            for &p in &rev[q] {
                if seen.insert(p) {
                    stack.push(p);
                }
            }
        }
        seen
    }

    /// Removes states that are unreachable from the initial state or that
    /// cannot reach a final state. Trimming an empty language yields a
    /// single non-final initial state with no transitions.
    pub fn trim(&self) -> Self {
        let reach = self.reachable_states();
        let coreach = self.coreachable_states();
        let keep: Vec<StateId> = reach.intersection(&coreach).copied().collect();
        if keep.is_empty() || !keep.contains(&self.initial) {
            let mut fa = Self::empty(self.alphabet.clone());
            fa.deterministic = true;
            return fa;
        }
        let remap: HashMap<StateId, StateId> =
            keep.iter().enumerate().map(|(i, &q)| (q, i)).collect();
        let mut transitions = vec![BTreeMap::new(); keep.len()];
        let mut eps = vec![BTreeSet::new(); keep.len()];
        for &q in &keep {
            let nq = remap[&q];
            for (sym, succ) in &self.transitions[q] {
                let kept: BTreeSet<StateId> = succ
                    .iter()
                    .filter_map(|r| remap.get(r).copied())
                    .collect();
                if !kept.is_empty() {
                    transitions[nq].insert(*sym, kept);
                }
            }
            for r in &self.eps[q] {
                if let Some(&nr) = remap.get(r) {
                    eps[nq].insert(nr);
                }
            }
        }
        let finals = self
            .finals
            .iter()
            .filter_map(|q| remap.get(q).copied())
            .collect();
        let labels = keep.iter().map(|&q| self.describe_state(q)).collect();
        let mut fa = FiniteAutomaton {
            alphabet: self.alphabet.clone(),
            transitions,
            eps,
            initial: remap[&self.initial],
            finals,
            deterministic: false,
            labels,
        };
        fa.deterministic = fa.compute_deterministic();
        fa
    }

    /// True iff every state is reachable and co-reachable.
    pub fn is_reduced(&self) -> bool {
        let reach = self.reachable_states();
        let coreach = self.coreachable_states();
        (0..self.num_states()).all(|q| reach.contains(&q) && coreach.contains(&q))
    }

    /// A reachable state that cannot reach a final state, if one exists.
    pub fn stuck_state(&self) -> Option<StateId> {
        let coreach = self.coreachable_states();
        let mut queue = VecDeque::from([self.initial]);
        let mut seen = BTreeSet::from([self.initial]);
        while let Some(q) = queue.pop_front() {
            if !coreach.contains(&q) {
                return Some(q);
            }
            for (_, succ) in &self.transitions[q] {
                for &r in succ {
                    if seen.insert(r) {
                        queue.push_back(r);
                    }
                }
            }
            for &r in &self.eps[q] {
                if seen.insert(r) {
                    queue.push_back(r);
                }
            }
        }
        None
    }

    /// Completes a deterministic automaton with a fresh non-final sink so
    /// that every (state, symbol) pair has a successor.
    pub fn complete(&self) -> Self {
        let base = if self.deterministic {
            self.clone()
        } else {
            self.determinize()
        };
        let n = base.num_states();
        let mut transitions = base.transitions.clone();
        let mut needs_sink = false;
        for row in transitions.iter_mut() {
            if row.len() < base.alphabet.len() {
                needs_sink = true;
                break;
            }
        }
        if !needs_sink && base.alphabet.is_empty() {
            return base;
        }
        if !needs_sink {
            return base;
        }
        transitions.push(BTreeMap::new());
        for row in transitions.iter_mut() {
            for idx in 0..base.alphabet.len() {
                row.entry(idx).or_insert_with(|| BTreeSet::from([n]));
            }
        }
        let mut labels = base.labels.clone();
        if !labels.is_empty() {
            labels.push("sink".to_string());
        }
        let mut fa = FiniteAutomaton {
            alphabet: base.alphabet.clone(),
            transitions,
            eps: vec![BTreeSet::new(); n + 1],
            initial: base.initial,
            finals: base.finals.clone(),
            deterministic: true,
            labels,
        };
        fa.deterministic = fa.compute_deterministic();
        fa
    }

    /// Language complement within `alphabet*`. Determinizes if needed,
    /// completes with a sink, and flips finals.
    pub fn complement(&self) -> Self {
        let complete = self.complete();
        let finals = (0..complete.num_states())
            .filter(|q| !complete.finals.contains(q))
            .collect();
        FiniteAutomaton {
            finals,
            ..complete
        }
    }

    /// Boolean combination of two same-alphabet languages via the pair
    /// construction on completed deterministic automata.
    pub fn product(&self, other: &Self, op: BoolOp) -> Result<Self, AutomatonError> {
        if self.alphabet != other.alphabet {
            return Err(AutomatonError::AlphabetMismatch);
        }
        let a = self.complete();
        let b = other.complete();
        // complete() may skip the sink when the automaton is already
        // complete, so both operands are now complete DFAs unless the
        // alphabet itself is empty.
        let mut index: HashMap<(StateId, StateId), StateId> = HashMap::new();
        let mut pairs: Vec<(StateId, StateId)> = vec![(a.initial, b.initial)];
        index.insert((a.initial, b.initial), 0);
        let mut transitions: Vec<BTreeMap<usize, BTreeSet<StateId>>> = Vec::new();
        let mut queue = VecDeque::from([0usize]);
        while let Some(qi) = queue.pop_front() {
            let (qa, qb) = pairs[qi];
            let mut row = BTreeMap::new();
            for idx in 0..a.alphabet.len() {
                let na = a.transitions[qa].get(&idx).and_then(|s| s.first().copied());
                let nb = b.transitions[qb].get(&idx).and_then(|s| s.first().copied());
                if let (Some(na), Some(nb)) = (na, nb) {
                    let target = *index.entry((na, nb)).or_insert_with(|| {
                        pairs.push((na, nb));
                        queue.push_back(pairs.len() - 1);
                        pairs.len() - 1
                    });
                    row.insert(idx, BTreeSet::from([target]));
                }
            }
            if transitions.len() <= qi {
                transitions.resize(qi + 1, BTreeMap::new());
            }
            transitions[qi] = row;
        }
        let finals: BTreeSet<StateId> = pairs
            .iter()
            .enumerate()
            .filter(|(_, &(qa, qb))| {
                let fa = a.finals.contains(&qa);
                let fb = b.finals.contains(&qb);
                match op {
                    BoolOp::Intersect => fa && fb,
                    BoolOp::Union => fa || fb,
                    BoolOp::Difference => fa && !fb,
                }
            })
            .map(|(i, _)| i)
            .collect();
        let mut fa = FiniteAutomaton {
            alphabet: a.alphabet.clone(),
            transitions,
            eps: vec![BTreeSet::new(); pairs.len()],
            initial: 0,
            finals,
            deterministic: true,
            labels: Vec::new(),
        };
        fa.deterministic = fa.compute_deterministic();
        Ok(fa.trim())
    }

    /// Does `self` include `other`, i.e. is every word of `other` also a
    /// word of `self`? On failure returns a shortest witness in canonical
    /// order.
    pub fn includes(&self, other: &Self) -> Result<Inclusion<S>, AutomatonError> {
        let diff = other.product(self, BoolOp::Difference)?;
        match diff.shortest_word() {
            None => Ok(Inclusion::Holds),
            Some(word) => Ok(Inclusion::Fails {
                counterexample: word,
            }),
        }
    }

    /// Exact language equality via two inclusions.
    pub fn equivalent_to(&self, other: &Self) -> Result<bool, AutomatonError> {
        Ok(self.includes(other)?.holds() && other.includes(self)?.holds())
    }

    pub fn is_empty_language(&self) -> bool {
        self.shortest_word().is_none()
    }

    /// Shortest accepted word; ties broken by the canonical symbol order.
    pub fn shortest_word(&self) -> Option<Vec<S>> {
        let start = self.eps_closure(&BTreeSet::from([self.initial]));
        if start.iter().any(|q| self.finals.contains(q)) {
            return Some(Vec::new());
        }
        // BFS over epsilon-closed subsets keeps the search deterministic
        // even for NFAs.
        let mut seen: BTreeSet<BTreeSet<StateId>> = BTreeSet::from([start.clone()]);
        let mut queue: VecDeque<(BTreeSet<StateId>, Vec<S>)> = VecDeque::from([(start, vec![])]);
        while let Some((subset, word)) = queue.pop_front() {
            for (idx, sym) in self.alphabet.iter().enumerate() {
                let mut next = BTreeSet::new();
                for &q in &subset {
                    if let Some(succ) = self.transitions[q].get(&idx) {
                        next.extend(succ.iter().copied());
                    }
                }
                if next.is_empty() {
                    continue;
                }
                let next = self.eps_closure(&next);
                let mut next_word = word.clone();
                next_word.push(sym.clone());
                if next.iter().any(|q| self.finals.contains(q)) {
                    return Some(next_word);
                }
                if seen.insert(next.clone()) {
                    queue.push_back((next, next_word));
                }
            }
        }
        None
    }

    /// All accepted words of length at most `max_len`, in
    /// length-lexicographic order.
    pub fn enumerate_words(&self, max_len: usize) -> Vec<Vec<S>> {
        let dfa = if self.deterministic {
            self.trim()
        } else {
            self.determinize().trim()
        };
        if dfa.is_empty_language() {
            return Vec::new();
        }
        // Distance to the nearest final state prunes dead prefixes.
        let dist = dfa.distance_to_final();
        let mut out = Vec::new();
        for len in 0..=max_len {
            let mut word: Vec<usize> = Vec::with_capacity(len);
            dfa.enumerate_rec(dfa.initial, len, &dist, &mut word, &mut out);
        }
        out
    }

    fn distance_to_final(&self) -> Vec<usize> {
        let mut rev: Vec<Vec<StateId>> = vec![Vec::new(); self.num_states()];
        for (q, row) in self.transitions.iter().enumerate() {
            for succ in row.values() {
                for &r in succ {
                    rev[r].push(q);
                }
            }
        }
        let mut dist = vec![usize::MAX; self.num_states()];
        let mut queue = VecDeque::new();
        for &f in &self.finals {
            dist[f] = 0;
            queue.push_back(f);
        }
        while let Some(q) = queue.pop_front() {
            for &p in &rev[q] {
                if dist[p] == usize::MAX {
                    dist[p] = dist[q] + 1;
                    queue.push_back(p);
                }
            }
        }
        dist
    }

    fn enumerate_rec(
        &self,
        q: StateId,
        remaining: usize,
        dist: &[usize],
        word: &mut Vec<usize>,
        out: &mut Vec<Vec<S>>,
    ) {
        if remaining == 0 {
            if self.finals.contains(&q) {
                out.push(word.iter().map(|&i| self.alphabet[i].clone()).collect());
            }
            return;
        }
        for (idx, succ) in &self.transitions[q] {
            for &r in succ {
                if dist[r] != usize::MAX && dist[r] <= remaining - 1 {
                    word.push(*idx);
                    self.enumerate_rec(r, remaining - 1, dist, word, out);
                    word.pop();
                }
            }
        }
    }

    /// Parikh image of the language, with one coordinate per alphabet
    /// symbol in canonical order.
    ///
    /// Computed by state elimination to a regular expression followed by a
    /// compositional evaluation into semilinear sets: concatenation is
    /// Minkowski sum, union concatenates parts, and star closes each
    /// non-empty subset of parts over its bases-turned-periods.
    pub fn parikh_image(&self) -> SemilinearSet {
        let dim = self.alphabet.len();
        let trimmed = self.trim();
        if trimmed.is_empty_language() {
            return SemilinearSet::empty(dim);
        }
        let regex = trimmed.to_regex();
        regex.parikh(dim)
    }

    /// State elimination into a regular expression over symbol indices.
    fn to_regex(&self) -> Regex {
        let n = self.num_states();
        // edge[(i, j)] = regex for moving i -> j
        let mut edge: HashMap<(usize, usize), Regex> = HashMap::new();
        let init = n;
        let acc = n + 1;
        let mut add = |map: &mut HashMap<(usize, usize), Regex>, i: usize, j: usize, r: Regex| {
            let slot = map.entry((i, j)).or_insert(Regex::Empty);
            *slot = Regex::alt(std::mem::replace(slot, Regex::Empty), r);
        };
        for (q, row) in self.transitions.iter().enumerate() {
            for (sym, succ) in row {
                for &r in succ {
                    add(&mut edge, q, r, Regex::Sym(*sym));
                }
            }
        }
        for (q, eps) in self.eps.iter().enumerate() {
            for &r in eps {
                add(&mut edge, q, r, Regex::Eps);
            }
        }
        add(&mut edge, init, self.initial, Regex::Eps);
        for &f in &self.finals {
            add(&mut edge, f, acc, Regex::Eps);
        }
        for victim in 0..n {
            let self_loop = edge.remove(&(victim, victim));
            let star = self_loop.map(Regex::star);
            let ins: Vec<(usize, Regex)> = edge
                .iter()
                .filter(|((_, j), _)| *j == victim)
                .map(|((i, _), r)| (*i, r.clone()))
                .collect();
            let outs: Vec<(usize, Regex)> = edge
                .iter()
                .filter(|((i, _), _)| *i == victim)
                .map(|((_, j), r)| (*j, r.clone()))
                .collect();
            edge.retain(|(i, j), _| *i != victim && *j != victim);
            for (i, rin) in &ins {
                for (j, rout) in &outs {
                    let mut r = rin.clone();
                    if let Some(s) = &star {
                        r = Regex::cat(r, s.clone());
                    }
                    r = Regex::cat(r, rout.clone());
                    add(&mut edge, *i, *j, r);
                }
            }
        }
        edge.remove(&(init, acc)).unwrap_or(Regex::Empty)
    }

    /// GraphViz rendering for diagnostics.
    pub fn to_dot(&self, name: &str) -> String {
        let mut out = String::new();
        out.push_str(&format!("digraph \"{name}\" {{\n  rankdir=LR;\n"));
        out.push_str("  __start [shape=point];\n");
        for q in 0..self.num_states() {
            let shape = if self.finals.contains(&q) {
                "doublecircle"
            } else {
                "circle"
            };
            let label = self.describe_state(q);
            out.push_str(&format!("  {q} [shape={shape},label=\"{label}\"];\n"));
        }
        out.push_str(&format!("  __start -> {};\n", self.initial));
        for (q, sym, r) in self.transitions() {
            out.push_str(&format!("  {q} -> {r} [label=\"{sym:?}\"];\n"));
        }
        for (q, eps) in self.eps.iter().enumerate() {
            for r in eps {
                out.push_str(&format!("  {q} -> {r} [label=\"ε\"];\n"));
            }
        }
        out.push_str("}\n");
        out
    }

    /// Rebuilds the same automaton over a different symbol type via a
    /// per-symbol mapping. The mapping must be injective and monotone with
    /// respect to the canonical orders.
    pub fn map_symbols<T: Symbol>(&self, f: impl Fn(&S) -> T) -> FiniteAutomaton<T> {
        let alphabet: Vec<T> = self.alphabet.iter().map(&f).collect();
        let sorted = {
            let mut a = alphabet.clone();
            a.sort();
            a.dedup();
            a
        };
        assert_eq!(
            sorted.len(),
            alphabet.len(),
            "symbol mapping must be injective"
        );
        assert_eq!(sorted, alphabet, "symbol mapping must preserve order");
        let mut fa = FiniteAutomaton {
            alphabet,
            transitions: self.transitions.clone(),
            eps: self.eps.clone(),
            initial: self.initial,
            finals: self.finals.clone(),
            deterministic: self.deterministic,
            labels: self.labels.clone(),
        };
        fa.deterministic = fa.compute_deterministic();
        fa
    }
}

/// Regular expressions over symbol indices, used only as an intermediate
/// for Parikh image computation.
#[derive(Debug, Clone)]
enum Regex {
    Empty,
    Eps,
    Sym(usize),
    Alt(Box<Regex>, Box<Regex>),
    Cat(Box<Regex>, Box<Regex>),
    Star(Box<Regex>),
}

impl Regex {
    fn alt(a: Regex, b: Regex) -> Regex {
        match (a, b) {
            (Regex::Empty, r) | (r, Regex::Empty) => r,
            (a, b) => Regex::Alt(Box::new(a), Box::new(b)),
        }
    }

    fn cat(a: Regex, b: Regex) -> Regex {
        match (a, b) {
            (Regex::Empty, _) | (_, Regex::Empty) => Regex::Empty,
            (Regex::Eps, r) | (r, Regex::Eps) => r,
            (a, b) => Regex::Cat(Box::new(a), Box::new(b)),
        }
    }

    fn star(r: Regex) -> Regex {
        match r {
            Regex::Empty | Regex::Eps => Regex::Eps,
            r => Regex::Star(Box::new(r)),
        }
    }

    fn parikh(&self, dim: usize) -> SemilinearSet {
        match self {
            Regex::Empty => SemilinearSet::empty(dim),
            Regex::Eps => SemilinearSet::singleton(vec![0; dim]),
            Regex::Sym(i) => {
                let mut v = vec![0u64; dim];
                v[*i] = 1;
                SemilinearSet::singleton(v)
            }
            Regex::Alt(a, b) => a.parikh(dim).union(&b.parikh(dim)).expect("same dim"),
            Regex::Cat(a, b) => a.parikh(dim).minkowski_sum(&b.parikh(dim)),
            Regex::Star(inner) => inner.parikh(dim).star_closure(),
        }
    }
}

/// Convenience wrapper matching the trimmed-empty contract in one place.
pub fn is_reduced<S: Symbol>(a: &FiniteAutomaton<S>) -> bool {
    a.is_reduced()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ab() -> Vec<char> {
        vec!['a', 'b']
    }

    /// Brute-force equality of two automata on all words up to `len`.
    fn agree_up_to(a: &FiniteAutomaton<char>, b: &FiniteAutomaton<char>, len: usize) -> bool {
        fn words(alpha: &[char], len: usize) -> Vec<Vec<char>> {
            let mut out: Vec<Vec<char>> = vec![vec![]];
            let mut layer: Vec<Vec<char>> = vec![vec![]];
            for _ in 0..len {
                let mut next = Vec::new();
                for w in &layer {
                    for &c in alpha {
                        let mut w2 = w.clone();
                        w2.push(c);
                        next.push(w2);
                    }
                }
                out.extend(next.iter().cloned());
                layer = next;
            }
            out
        }
        words(a.alphabet(), len)
            .into_iter()
            .all(|w| a.accepts(&w) == b.accepts(&w))
    }

    #[test]
    fn determinize_preserves_language() {
        // NFA for a|ab: 0 -a-> 1 (final), 0 -a-> 2, 2 -b-> 3 (final)
        let nfa = FiniteAutomaton::new(
            ab(),
            4,
            0,
            [1, 3],
            [(0, 'a', 1), (0, 'a', 2), (2, 'b', 3)],
            [],
        );
        assert!(!nfa.is_deterministic());
        let dfa = nfa.determinize();
        assert!(dfa.is_deterministic());
        assert!(agree_up_to(&nfa, &dfa, 4));
        assert!(dfa.accepts(&['a']));
        assert!(dfa.accepts(&['a', 'b']));
        assert!(!dfa.accepts(&['b']));
    }

    #[test]
    fn determinize_epsilon_to_final() {
        let nfa = FiniteAutomaton::new(ab(), 2, 0, [1], [], [(0, 1)]);
        let dfa = nfa.determinize();
        assert!(dfa.accepts(&[]));
    }

    #[test]
    fn determinize_dfa_is_isomorphic() {
        let dfa = FiniteAutomaton::new(ab(), 2, 0, [1], [(0, 'a', 1)], []);
        let d2 = dfa.determinize();
        assert_eq!(d2.num_states(), 2);
        assert!(agree_up_to(&dfa, &d2, 3));
    }

    #[test]
    fn trim_removes_unreachable_and_sink() {
        // state 2 unreachable; state 3 is a non-accepting sink loop
        let fa = FiniteAutomaton::new(
            ab(),
            4,
            0,
            [1],
            [(0, 'a', 1), (2, 'a', 1), (0, 'b', 3), (3, 'b', 3)],
            [],
        );
        assert!(!fa.is_reduced());
        let t = fa.trim();
        assert!(t.is_reduced());
        assert_eq!(t.num_states(), 2);
        assert!(agree_up_to(&fa, &t, 4));
    }

    #[test]
    fn trim_reduced_unchanged() {
        let fa = FiniteAutomaton::new(ab(), 2, 0, [1], [(0, 'a', 1)], []);
        assert!(fa.is_reduced());
        assert_eq!(fa.trim().num_states(), 2);
    }

    #[test]
    fn complement_of_empty_is_sigma_star() {
        let empty = FiniteAutomaton::empty(ab());
        let all = empty.complement();
        for w in [vec![], vec!['a'], vec!['b', 'a', 'b']] {
            assert!(all.accepts(&w));
        }
    }

    #[test]
    fn complement_is_involution() {
        // words containing the factor ab
        let fa = FiniteAutomaton::new(
            ab(),
            3,
            0,
            [2],
            [
                (0, 'a', 1),
                (0, 'b', 0),
                (1, 'a', 1),
                (1, 'b', 2),
                (2, 'a', 2),
                (2, 'b', 2),
            ],
            [],
        );
        let cc = fa.complement().complement();
        assert!(fa.equivalent_to(&cc).unwrap());
        // spot-check the single complement against brute force
        let c = fa.complement();
        for w in [
            vec![],
            vec!['a'],
            vec!['a', 'b'],
            vec!['b', 'a', 'a', 'b', 'a'],
            vec!['b', 'b', 'a', 'a', 'a'],
        ] {
            assert_eq!(c.accepts(&w), !fa.accepts(&w));
        }
    }

    #[test]
    fn product_modes() {
        // a*b and ab*
        let astar_b = FiniteAutomaton::new(ab(), 2, 0, [1], [(0, 'a', 0), (0, 'b', 1)], []);
        let a_bstar = FiniteAutomaton::new(ab(), 2, 0, [1], [(0, 'a', 1), (1, 'b', 1)], []);
        let inter = astar_b.product(&a_bstar, BoolOp::Intersect).unwrap();
        let words = inter.enumerate_words(4);
        assert_eq!(words, vec![vec!['a', 'b']]);

        let sigma_star = FiniteAutomaton::empty(ab()).complement();
        let same = astar_b.product(&sigma_star, BoolOp::Intersect).unwrap();
        assert!(same.equivalent_to(&astar_b).unwrap());

        let nothing = astar_b.product(&astar_b, BoolOp::Difference).unwrap();
        assert!(nothing.is_empty_language());
    }

    #[test]
    fn product_rejects_alphabet_mismatch() {
        let a = FiniteAutomaton::empty(vec!['a']);
        let b = FiniteAutomaton::empty(ab());
        assert_eq!(
            a.product(&b, BoolOp::Union).unwrap_err(),
            AutomatonError::AlphabetMismatch
        );
    }

    #[test]
    fn includes_with_counterexample() {
        let astar = FiniteAutomaton::new(ab(), 1, 0, [0], [(0, 'a', 0)], []);
        let astar_b = FiniteAutomaton::new(ab(), 2, 0, [1], [(0, 'a', 0), (0, 'b', 1)], []);
        let sigma_star = FiniteAutomaton::empty(ab()).complement();
        assert!(sigma_star.includes(&astar_b).unwrap().holds());
        assert!(astar.includes(&astar).unwrap().holds());
        match astar.includes(&astar_b).unwrap() {
            Inclusion::Fails { counterexample } => assert_eq!(counterexample, vec!['b']),
            Inclusion::Holds => panic!("inclusion should fail"),
        }
    }

    #[test]
    fn shortest_word_ties_break_by_order() {
        // aa | ab, shortest word should be aa under a < b
        let fa = FiniteAutomaton::from_words(ab(), [vec!['a', 'a'], vec!['a', 'b']]);
        assert_eq!(fa.shortest_word().unwrap(), vec!['a', 'a']);
        let empty = FiniteAutomaton::empty(ab());
        assert!(empty.shortest_word().is_none());
        assert!(empty.is_empty_language());
        let eps = FiniteAutomaton::new(ab(), 1, 0, [0], [], []);
        assert_eq!(eps.shortest_word().unwrap(), Vec::<char>::new());
    }

    #[test]
    fn enumerate_words_in_length_lex_order() {
        let astar = FiniteAutomaton::new(vec!['a'], 1, 0, [0], [(0, 'a', 0)], []);
        assert_eq!(
            astar.enumerate_words(2),
            vec![vec![], vec!['a'], vec!['a', 'a']]
        );
        assert!(FiniteAutomaton::empty(ab()).enumerate_words(3).is_empty());
    }

    #[test]
    fn parikh_image_of_a_star() {
        let astar = FiniteAutomaton::new(vec!['a'], 1, 0, [0], [(0, 'a', 0)], []);
        let s = astar.parikh_image();
        for n in 0..20u64 {
            assert!(s.member(&[n]).unwrap());
        }
    }

    #[test]
    fn parikh_image_matches_enumeration() {
        // (ab)* has Parikh image {(n, n)}
        let abstar = FiniteAutomaton::new(ab(), 2, 0, [0], [(0, 'a', 1), (1, 'b', 0)], []);
        let s = abstar.parikh_image();
        for x in 0..8u64 {
            for y in 0..8u64 {
                assert_eq!(s.member(&[x, y]).unwrap(), x == y, "at ({x},{y})");
            }
        }
        let empty = FiniteAutomaton::empty(ab());
        assert!(empty.parikh_image().is_empty());
    }

    #[test]
    fn random_automata_ops_agree_with_simulation() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(0x5eed);
        for round in 0..40 {
            let n = rng.gen_range(1..5);
            let mut transitions = Vec::new();
            for q in 0..n {
                for &c in &['a', 'b'] {
                    for _ in 0..rng.gen_range(0..3) {
                        transitions.push((q, c, rng.gen_range(0..n)));
                    }
                }
            }
            let finals: Vec<usize> = (0..n).filter(|_| rng.gen_bool(0.4)).collect();
            let nfa = FiniteAutomaton::new(ab(), n, 0, finals, transitions, []);
            let dfa = nfa.determinize();
            let trimmed = nfa.trim();
            assert!(agree_up_to(&nfa, &dfa, 6), "round {round}: determinize");
            assert!(agree_up_to(&nfa, &trimmed, 6), "round {round}: trim");
            let comp = dfa.complement();
            let mut all_words: Vec<Vec<char>> = vec![vec![]];
            for w in nfa.enumerate_words(6) {
                all_words.push(w);
            }
            for w in &all_words {
                assert_eq!(comp.accepts(w), !nfa.accepts(w), "round {round}: complement");
            }
        }
    }
}
