//! Mazurkiewicz-trace operations: equivalence, lexicographic normal forms,
//! trace membership, and bounded ambiguity search.
//!
//! A trace is an equivalence class of words under commutation of adjacent
//! independent letters. Everything here takes the independence relation
//! from a [`ConcurrentAlphabet`] and breaks ties with its canonical symbol
//! order.

use std::collections::{BTreeMap, BTreeSet, HashMap};

use crate::alphabet::{ConcurrentAlphabet, Participant, SyncEvent};
use crate::automata::{FiniteAutomaton, Symbol};

/// Trace equivalence: equality of lexicographic normal forms.
pub fn equivalent<S: Symbol>(w1: &[S], w2: &[S], alphabet: &ConcurrentAlphabet<S>) -> bool {
    if w1.len() != w2.len() {
        return false;
    }
    lex_normal_form(w1, alphabet) == lex_normal_form(w2, alphabet)
}

/// Per-participant projection of a sync-event word.
pub fn project(word: &[SyncEvent], p: &Participant) -> Vec<SyncEvent> {
    word.iter().filter(|e| e.involves(p)).cloned().collect()
}

/// Trace equivalence for sync-event words via equality of all
/// per-participant projections. Agrees with the normal-form route; the
/// test suite checks the two implementations against each other.
pub fn projection_equivalent(w1: &[SyncEvent], w2: &[SyncEvent]) -> bool {
    if w1.len() != w2.len() {
        return false;
    }
    let mut participants = BTreeSet::new();
    for e in w1.iter().chain(w2.iter()) {
        participants.insert(e.sender.clone());
        participants.insert(e.receiver.clone());
    }
    participants
        .iter()
        .all(|p| project(w1, p) == project(w2, p))
}

/// The unique lexicographically least word of `[w]`.
///
/// Greedy extraction: repeatedly emit the least symbol of the remaining
/// word whose every earlier remaining letter is independent of it.
pub fn lex_normal_form<S: Symbol>(w: &[S], alphabet: &ConcurrentAlphabet<S>) -> Vec<S> {
    let mut remaining: Vec<&S> = w.iter().collect();
    let mut out = Vec::with_capacity(w.len());
    while !remaining.is_empty() {
        let mut best: Option<usize> = None;
        for (pos, sym) in remaining.iter().enumerate() {
            let movable = remaining[..pos]
                .iter()
                .all(|earlier| alphabet.independent(earlier, sym));
            if movable {
                best = match best {
                    None => Some(pos),
                    Some(b) if remaining[pos] < remaining[b] => Some(pos),
                    keep => keep,
                };
            }
        }
        let pos = best.expect("the first letter is always movable");
        out.push(remaining.remove(pos).clone());
    }
    out
}

/// DFA of all lexicographically minimal words: the complement of
/// `∪ { Σ* b C(b,a)* a Σ* | a < b dependent-free pattern }` where the
/// middle letters are independent of `a`.
pub fn lex_min_automaton<S: Symbol>(alphabet: &ConcurrentAlphabet<S>) -> FiniteAutomaton<S> {
    let syms = alphabet.symbols().to_vec();
    let n = syms.len();
    // NFA for the forbidden patterns: some factor b v a with a < b,
    // a independent of b, and every letter of v independent of a.
    let mut transitions: Vec<(usize, S, usize)> = Vec::new();
    // state 0: anything; per (a, b) pattern a middle state; state `acc`.
    let mut state = 1;
    let acc = {
        // allocate after middles; we first collect middles
        let mut middles = Vec::new();
        for ia in 0..n {
            for ib in 0..n {
                if syms[ia] < syms[ib] && alphabet.independent_idx(ia, ib) {
                    middles.push((ia, ib, state));
                    state += 1;
                }
            }
        }
        let acc = state;
        for (ia, ib, mid) in middles {
            transitions.push((0, syms[ib].clone(), mid));
            for ic in 0..n {
                if alphabet.independent_idx(ic, ia) {
                    transitions.push((mid, syms[ic].clone(), mid));
                }
            }
            transitions.push((mid, syms[ia].clone(), acc));
        }
        acc
    };
    for s in &syms {
        transitions.push((0, s.clone(), 0));
        transitions.push((acc, s.clone(), acc));
    }
    let forbidden = FiniteAutomaton::new(syms, state + 1, 0, [acc], transitions, []);
    forbidden.complement().trim()
}

/// Intersects `a` with the lexicographically-minimal-word automaton. When
/// the input language is closed under the independence relation, the
/// result has exactly one word per trace.
pub fn lex_representation<S: Symbol>(
    a: &FiniteAutomaton<S>,
    alphabet: &ConcurrentAlphabet<S>,
) -> FiniteAutomaton<S> {
    let lexmin = lex_min_automaton(alphabet);
    a.product(&lexmin, crate::automata::BoolOp::Intersect)
        .expect("lex_min_automaton shares the alphabet")
}

/// Does some linearization of `[w]` belong to the language of `a`?
///
/// Memoized search over downward-closed consumed-position sets paired with
/// automaton states. A position may be consumed once every earlier
/// dependent position has been.
pub fn trace_member<S: Symbol>(
    w: &[S],
    a: &FiniteAutomaton<S>,
    alphabet: &ConcurrentAlphabet<S>,
) -> bool {
    trace_member_witness(w, a, alphabet).is_some()
}

/// Like [`trace_member`], returning the accepted linearization.
pub fn trace_member_witness<S: Symbol>(
    w: &[S],
    a: &FiniteAutomaton<S>,
    alphabet: &ConcurrentAlphabet<S>,
) -> Option<Vec<S>> {
    assert!(w.len() <= 63, "trace membership uses a positional bitmask");
    let dfa = if a.is_deterministic() {
        a.clone()
    } else {
        a.determinize()
    };
    // deps[i] = mask of earlier positions that must be consumed before i
    let deps: Vec<u64> = (0..w.len())
        .map(|i| {
            let mut mask = 0u64;
            for j in 0..i {
                if !alphabet.independent(&w[j], &w[i]) {
                    mask |= 1 << j;
                }
            }
            mask
        })
        .collect();
    let full: u64 = if w.is_empty() { 0 } else { (1 << w.len()) - 1 };
    let mut memo: HashMap<(u64, usize), bool> = HashMap::new();
    fn search<S: Symbol>(
        mask: u64,
        state: usize,
        w: &[S],
        deps: &[u64],
        dfa: &FiniteAutomaton<S>,
        full: u64,
        memo: &mut HashMap<(u64, usize), bool>,
        path: &mut Vec<usize>,
    ) -> bool {
        if mask == full {
            return dfa.is_final(state);
        }
        if let Some(&hit) = memo.get(&(mask, state)) {
            if !hit {
                return false;
            }
            // positive memo entries are only written on success paths, so
            // a fresh search is still needed to rebuild the witness; fall
            // through.
        }
        for i in 0..w.len() {
            if mask & (1 << i) != 0 || deps[i] & mask != deps[i] {
                continue;
            }
            if let Some(next) = dfa.step(state, &w[i]) {
                path.push(i);
                if search(mask | (1 << i), next, w, deps, dfa, full, memo, path) {
                    memo.insert((mask, state), true);
                    return true;
                }
                path.pop();
            }
        }
        memo.insert((mask, state), false);
        false
    }
    let mut path = Vec::new();
    if search(0, dfa.initial(), w, &deps, &dfa, full, &mut memo, &mut path) {
        Some(path.into_iter().map(|i| w[i].clone()).collect())
    } else {
        None
    }
}

/// Searches accepted words up to `max_len` for two distinct words of the
/// same trace. Returns the least such pair in length-lexicographic order;
/// `None` is inconclusive beyond the bound.
pub fn ambiguity_search<S: Symbol>(
    a: &FiniteAutomaton<S>,
    alphabet: &ConcurrentAlphabet<S>,
    max_len: usize,
) -> Option<(Vec<S>, Vec<S>)> {
    let mut buckets: BTreeMap<Vec<S>, Vec<S>> = BTreeMap::new();
    for w in a.enumerate_words(max_len) {
        let nf = lex_normal_form(&w, alphabet);
        if let Some(first) = buckets.get(&nf) {
            return Some((first.clone(), w));
        }
        buckets.insert(nf, w);
    }
    None
}

/// One lexicographically minimal representative per trace of length at
/// most `max_len`, in length-lexicographic order.
pub fn enumerate_traces<S: Symbol>(
    alphabet: &ConcurrentAlphabet<S>,
    max_len: usize,
) -> Vec<Vec<S>> {
    lex_min_automaton(alphabet).enumerate_words(max_len)
}

/// All linearizations of the trace of `w`, by closure under adjacent
/// independent swaps. Exponential; test/oracle use only.
pub fn linearizations<S: Symbol>(w: &[S], alphabet: &ConcurrentAlphabet<S>) -> Vec<Vec<S>> {
    let mut seen: BTreeSet<Vec<S>> = BTreeSet::from([w.to_vec()]);
    let mut stack = vec![w.to_vec()];
    while let Some(word) = stack.pop() {
        for i in 0..word.len().saturating_sub(1) {
            if alphabet.independent(&word[i], &word[i + 1]) {
                let mut swapped = word.clone();
                swapped.swap(i, i + 1);
                if seen.insert(swapped.clone()) {
                    stack.push(swapped);
                }
            }
        }
    }
    seen.into_iter().collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::alphabet::{sync_alphabet, MessageLabel};

    fn ev(s: &str, r: &str, m: &str) -> SyncEvent {
        SyncEvent::new(
            Participant::new(s),
            Participant::new(r),
            MessageLabel::unit(m),
        )
    }

    fn free_ab() -> ConcurrentAlphabet<char> {
        ConcurrentAlphabet::from_pairs(vec!['a', 'b'], [('a', 'b')])
    }

    #[test]
    fn equivalence_by_single_swap() {
        let alpha = sync_alphabet([ev("p", "q", "m"), ev("r", "s", "m")]);
        let w1 = [ev("p", "q", "m"), ev("r", "s", "m")];
        let w2 = [ev("r", "s", "m"), ev("p", "q", "m")];
        assert!(equivalent(&w1, &w2, &alpha));
        assert!(projection_equivalent(&w1, &w2));
        assert!(equivalent(&w1, &w1, &alpha));
    }

    #[test]
    fn dependent_letters_do_not_commute() {
        let alpha = sync_alphabet([ev("p", "q", "m1"), ev("p", "q", "m2")]);
        let w1 = [ev("p", "q", "m1"), ev("p", "q", "m2")];
        let w2 = [ev("p", "q", "m2"), ev("p", "q", "m1")];
        assert!(!equivalent(&w1, &w2, &alpha));
        assert!(!projection_equivalent(&w1, &w2));
    }

    #[test]
    fn normal_form_is_least_and_idempotent() {
        let alpha = sync_alphabet([ev("p", "q", "m"), ev("r", "s", "m")]);
        let w = [ev("r", "s", "m"), ev("p", "q", "m")];
        let nf = lex_normal_form(&w, &alpha);
        assert_eq!(nf, vec![ev("p", "q", "m"), ev("r", "s", "m")]);
        assert_eq!(lex_normal_form(&nf, &alpha), nf);
        assert!(equivalent(&w, &nf, &alpha));
        assert_eq!(lex_normal_form(&[] as &[SyncEvent], &alpha), vec![]);
    }

    #[test]
    fn normal_form_minimality_exhaustive() {
        // over a three-letter alphabet with one independent pair, the
        // normal form is the least of all linearizations
        let alpha = ConcurrentAlphabet::from_pairs(vec!['a', 'b', 'c'], [('a', 'c')]);
        let words = FiniteAutomaton::empty(vec!['a', 'b', 'c'])
            .complement()
            .enumerate_words(6);
        for w in words {
            let nf = lex_normal_form(&w, &alpha);
            let lins = linearizations(&w, &alpha);
            let least = lins.iter().min().unwrap();
            assert_eq!(&nf, least, "word {w:?}");
        }
    }

    #[test]
    fn lex_min_automaton_matches_normal_form() {
        let alpha = ConcurrentAlphabet::from_pairs(vec!['a', 'b', 'c'], [('a', 'b')]);
        let lexmin = lex_min_automaton(&alpha);
        let words = FiniteAutomaton::empty(vec!['a', 'b', 'c'])
            .complement()
            .enumerate_words(6);
        for w in words {
            let minimal = lex_normal_form(&w, &alpha) == w;
            assert_eq!(lexmin.accepts(&w), minimal, "word {w:?}");
        }
    }

    #[test]
    fn lex_min_automaton_section_corpus() {
        // Σ = {a1, a2, b} with a1 ≡ a2, rendered as {a, c, b}: accepts a·c,
        // rejects c·a
        let alpha = ConcurrentAlphabet::from_pairs(vec!['a', 'b', 'c'], [('a', 'c')]);
        let lexmin = lex_min_automaton(&alpha);
        assert!(lexmin.accepts(&['a', 'c']));
        assert!(!lexmin.accepts(&['c', 'a']));
        // with empty independence everything is minimal
        let discrete = ConcurrentAlphabet::from_pairs(vec!['a', 'b'], []);
        let all = lex_min_automaton(&discrete);
        for w in FiniteAutomaton::empty(vec!['a', 'b'])
            .complement()
            .enumerate_words(4)
        {
            assert!(all.accepts(&w));
        }
    }

    #[test]
    fn lex_representation_keeps_one_word_per_trace() {
        let alpha = free_ab();
        let both = FiniteAutomaton::from_words(vec!['a', 'b'], [vec!['a', 'b'], vec!['b', 'a']]);
        let rep = lex_representation(&both, &alpha);
        assert_eq!(rep.enumerate_words(3), vec![vec!['a', 'b']]);
        let empty = FiniteAutomaton::empty(vec!['a', 'b']);
        assert!(lex_representation(&empty, &alpha).is_empty_language());
    }

    #[test]
    fn trace_membership_with_swaps() {
        let alpha = sync_alphabet([ev("p", "q", "m"), ev("r", "s", "m"), ev("p", "q", "m1"), ev("p", "q", "m2")]);
        let lang = FiniteAutomaton::from_words(
            alpha.symbols().to_vec(),
            [vec![ev("p", "q", "m"), ev("r", "s", "m"), ev("p", "q", "m1")]],
        );
        let query_yes = [ev("r", "s", "m"), ev("p", "q", "m"), ev("p", "q", "m1")];
        let query_no = [ev("r", "s", "m"), ev("p", "q", "m"), ev("p", "q", "m2")];
        assert!(trace_member(&query_yes, &lang, &alpha));
        assert!(!trace_member(&query_no, &lang, &alpha));
        let witness = trace_member_witness(&query_yes, &lang, &alpha).unwrap();
        assert!(lang.accepts(&witness));
        assert!(equivalent(&witness, &query_yes, &alpha));
    }

    #[test]
    fn trace_membership_agrees_with_linearization_enumeration() {
        let alpha = ConcurrentAlphabet::from_pairs(vec!['a', 'b', 'c'], [('a', 'b'), ('a', 'c')]);
        let lang = FiniteAutomaton::new(
            vec!['a', 'b', 'c'],
            3,
            0,
            [2],
            [
                (0, 'a', 1),
                (1, 'b', 2),
                (2, 'c', 2),
                (0, 'b', 0),
                (2, 'a', 1),
            ],
            [],
        );
        let words = FiniteAutomaton::empty(vec!['a', 'b', 'c'])
            .complement()
            .enumerate_words(6);
        for w in words {
            let expected = linearizations(&w, &alpha).iter().any(|lin| lang.accepts(lin));
            assert_eq!(trace_member(&w, &lang, &alpha), expected, "word {w:?}");
        }
    }

    #[test]
    fn ambiguity_search_finds_duplicates() {
        let alpha = free_ab();
        let ambiguous =
            FiniteAutomaton::from_words(vec!['a', 'b'], [vec!['a', 'b'], vec!['b', 'a']]);
        let (w1, w2) = ambiguity_search(&ambiguous, &alpha, 3).unwrap();
        assert_eq!((w1, w2), (vec!['a', 'b'], vec!['b', 'a']));
        let empty = FiniteAutomaton::empty(vec!['a', 'b']);
        assert!(ambiguity_search(&empty, &alpha, 3).is_none());
    }

    #[test]
    fn enumerate_traces_skips_equivalent_words() {
        let alpha = free_ab();
        let traces = enumerate_traces(&alpha, 2);
        assert_eq!(
            traces,
            vec![
                vec![],
                vec!['a'],
                vec!['b'],
                vec!['a', 'a'],
                vec!['a', 'b'],
                vec!['b', 'b'],
            ]
        );
        let single = ConcurrentAlphabet::from_pairs(vec!['a'], []);
        assert_eq!(
            enumerate_traces(&single, 2),
            vec![vec![], vec!['a'], vec!['a', 'a']]
        );
        // empty independence: all words
        let discrete = ConcurrentAlphabet::from_pairs(vec!['a', 'b'], []);
        assert_eq!(enumerate_traces(&discrete, 1).len(), 3);
        assert_eq!(enumerate_traces(&discrete, 2).len(), 7);
    }

    #[test]
    fn three_way_equivalence_agreement_random() {
        use rand::{Rng, SeedableRng};
        let events = [
            ev("p", "q", "m1"),
            ev("p", "q", "m2"),
            ev("r", "s", "m1"),
            ev("q", "r", "m3"),
        ];
        let alpha = sync_alphabet(events.clone());
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(7);
        for _ in 0..2000 {
            let len = rng.gen_range(0..=8);
            let w1: Vec<SyncEvent> = (0..len)
                .map(|_| events[rng.gen_range(0..events.len())].clone())
                .collect();
            // half the time, mutate a permutation of w1 to get related pairs
            let w2: Vec<SyncEvent> = if rng.gen_bool(0.5) {
                let mut w = w1.clone();
                if w.len() >= 2 {
                    let i = rng.gen_range(0..w.len() - 1);
                    w.swap(i, i + 1);
                }
                w
            } else {
                (0..len)
                    .map(|_| events[rng.gen_range(0..events.len())].clone())
                    .collect()
            };
            let by_nf = equivalent(&w1, &w2, &alpha);
            let by_proj = projection_equivalent(&w1, &w2);
            assert_eq!(by_nf, by_proj, "w1 {w1:?} w2 {w2:?}");
        }
    }
}
