//! Synchronous message alphabets and their concurrency relation.
//!
//! Events are rendezvous exchanges `p->q:m` between distinct participants.
//! Two events are independent exactly when their participant sets are
//! disjoint; the induced relation over an alphabet drives every
//! trace-theoretic decision in the crate. This module also hosts the
//! structural topology analysis that predicts when the relation is
//! transitive.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use thiserror::Error;

use crate::automata::Symbol;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum AlphabetError {
    #[error("independence relation is not transitive: witness ({0}, {1}, {2})")]
    NotTransitive(String, String, String),
}

/// A protocol participant, identified by name.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Participant(pub String);

impl Participant {
    pub fn new(name: impl Into<String>) -> Self {
        let name = name.into();
        assert!(!name.is_empty(), "participant names must be nonempty");
        Participant(name)
    }

    pub fn name(&self) -> &str {
        &self.0
    }
}

impl fmt::Display for Participant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

/// Reference to a local type: a state of one participant's machine in a
/// named SCSM, or the distinguished unit type. Used as message payload
/// annotation for delegation.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct LocalTypeRef {
    pub scsm: String,
    pub participant: Participant,
    /// Specific state; `None` means the machine's initial state.
    pub state: Option<String>,
}

impl fmt::Display for LocalTypeRef {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}", self.scsm, self.participant)?;
        if let Some(s) = &self.state {
            write!(f, ":{s}")?;
        }
        Ok(())
    }
}

/// A message label. Within one system, equal label names imply equal
/// payload types; loaders enforce this.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct MessageLabel {
    pub name: String,
    /// `None` means unit payload.
    pub payload: Option<LocalTypeRef>,
}

impl MessageLabel {
    pub fn unit(name: impl Into<String>) -> Self {
        MessageLabel {
            name: name.into(),
            payload: None,
        }
    }

    pub fn delegating(name: impl Into<String>, payload: LocalTypeRef) -> Self {
        MessageLabel {
            name: name.into(),
            payload: Some(payload),
        }
    }
}

impl fmt::Display for MessageLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.name)
    }
}

/// A rendezvous exchange `sender -> receiver : label`.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct SyncEvent {
    pub sender: Participant,
    pub receiver: Participant,
    pub label: MessageLabel,
}

impl SyncEvent {
    pub fn new(sender: Participant, receiver: Participant, label: MessageLabel) -> Self {
        assert_ne!(sender, receiver, "sender and receiver must differ");
        SyncEvent {
            sender,
            receiver,
            label,
        }
    }

    pub fn participants(&self) -> [&Participant; 2] {
        [&self.sender, &self.receiver]
    }

    pub fn involves(&self, p: &Participant) -> bool {
        self.sender == *p || self.receiver == *p
    }

    /// The acknowledging reversal `receiver -> sender : label`.
    pub fn reversed(&self) -> SyncEvent {
        SyncEvent {
            sender: self.receiver.clone(),
            receiver: self.sender.clone(),
            label: self.label.clone(),
        }
    }
}

impl fmt::Display for SyncEvent {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}->{}:{}", self.sender, self.receiver, self.label)
    }
}

/// Events are independent iff their participant sets are disjoint.
pub fn sync_independence(e1: &SyncEvent, e2: &SyncEvent) -> bool {
    !e1.involves(&e2.sender) && !e1.involves(&e2.receiver)
}

/// An alphabet with an irreflexive symmetric independence relation and the
/// canonical total order given by symbol sort order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ConcurrentAlphabet<S: Symbol> {
    symbols: Vec<S>,
    /// Unordered independent pairs as (i, j) with i < j over symbol indices.
    independence: BTreeSet<(usize, usize)>,
}

impl<S: Symbol> ConcurrentAlphabet<S> {
    /// Builds the alphabet with the independence relation given by a
    /// predicate on distinct symbols. Symbols are sorted into canonical
    /// order and deduplicated.
    pub fn new(symbols: Vec<S>, independent: impl Fn(&S, &S) -> bool) -> Self {
        let mut symbols = symbols;
        symbols.sort();
        symbols.dedup();
        let mut independence = BTreeSet::new();
        for i in 0..symbols.len() {
            for j in i + 1..symbols.len() {
                if independent(&symbols[i], &symbols[j]) {
                    independence.insert((i, j));
                }
            }
        }
        ConcurrentAlphabet {
            symbols,
            independence,
        }
    }

    /// Alphabet with explicitly listed independent pairs.
    pub fn from_pairs(symbols: Vec<S>, pairs: impl IntoIterator<Item = (S, S)>) -> Self {
        let pairs: Vec<(S, S)> = pairs.into_iter().collect();
        ConcurrentAlphabet::new(symbols, |a, b| {
            pairs
                .iter()
                .any(|(x, y)| (x == a && y == b) || (x == b && y == a))
        })
    }

    pub fn symbols(&self) -> &[S] {
        &self.symbols
    }

    pub fn len(&self) -> usize {
        self.symbols.len()
    }

    pub fn is_empty(&self) -> bool {
        self.symbols.is_empty()
    }

    pub fn index_of(&self, s: &S) -> Option<usize> {
        self.symbols.binary_search(s).ok()
    }

    pub fn independent_idx(&self, i: usize, j: usize) -> bool {
        i != j && self.independence.contains(&(i.min(j), i.max(j)))
    }

    pub fn independent(&self, a: &S, b: &S) -> bool {
        match (self.index_of(a), self.index_of(b)) {
            (Some(i), Some(j)) => self.independent_idx(i, j),
            _ => false,
        }
    }

    pub fn independent_pairs(&self) -> impl Iterator<Item = (&S, &S)> + '_ {
        self.independence
            .iter()
            .map(|&(i, j)| (&self.symbols[i], &self.symbols[j]))
    }

    /// Some dependent pair of distinct symbols, if the alphabet is not a
    /// clique.
    pub fn non_independent_pair(&self) -> Option<(&S, &S)> {
        for i in 0..self.symbols.len() {
            for j in i + 1..self.symbols.len() {
                if !self.independence.contains(&(i, j)) {
                    return Some((&self.symbols[i], &self.symbols[j]));
                }
            }
        }
        None
    }

    /// Transitivity over pairwise-distinct triples: aCb and bCc imply aCc.
    /// On failure, returns one violating triple.
    pub fn is_transitive(&self) -> Result<(), (S, S, S)> {
        let n = self.symbols.len();
        for b in 0..n {
            let partners: Vec<usize> = (0..n).filter(|&a| self.independent_idx(a, b)).collect();
            for (pos, &a) in partners.iter().enumerate() {
                for &c in &partners[pos + 1..] {
                    if !self.independent_idx(a, c) {
                        return Err((
                            self.symbols[a].clone(),
                            self.symbols[b].clone(),
                            self.symbols[c].clone(),
                        ));
                    }
                }
            }
        }
        Ok(())
    }

    /// Partitions the symbols into cliques: mutually independent within a
    /// class, dependent across classes. Requires transitivity.
    pub fn clique_partition(&self) -> Result<CliquePartition<S>, AlphabetError>
    where
        S: fmt::Debug,
    {
        if let Err((a, b, c)) = self.is_transitive() {
            return Err(AlphabetError::NotTransitive(
                format!("{a:?}"),
                format!("{b:?}"),
                format!("{c:?}"),
            ));
        }
        // Union-find over the independence relation.
        let n = self.symbols.len();
        let mut parent: Vec<usize> = (0..n).collect();
        fn find(parent: &mut Vec<usize>, x: usize) -> usize {
            if parent[x] != x {
                let root = find(parent, parent[x]);
                parent[x] = root;
            }
            parent[x]
        }
        for &(i, j) in &self.independence {
            let (ri, rj) = (find(&mut parent, i), find(&mut parent, j));
            if ri != rj {
                parent[ri.max(rj)] = ri.min(rj);
            }
        }
        let mut classes: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
        for i in 0..n {
            let root = find(&mut parent, i);
            classes.entry(root).or_default().push(i);
        }
        let classes: Vec<Vec<S>> = classes
            .into_values()
            .map(|idxs| idxs.into_iter().map(|i| self.symbols[i].clone()).collect())
            .collect();
        Ok(CliquePartition { classes })
    }

    /// Restriction to a subset of the symbols, keeping the induced
    /// independence.
    pub fn restrict(&self, keep: &BTreeSet<S>) -> ConcurrentAlphabet<S> {
        let symbols: Vec<S> = self.symbols.iter().filter(|s| keep.contains(s)).cloned().collect();
        ConcurrentAlphabet::new(symbols, |a, b| self.independent(a, b))
    }
}

/// Disjoint independence cliques covering the alphabet, in canonical order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CliquePartition<S: Symbol> {
    pub classes: Vec<Vec<S>>,
}

impl<S: Symbol> CliquePartition<S> {
    pub fn class_of(&self, s: &S) -> Option<usize> {
        self.classes.iter().position(|c| c.contains(s))
    }
}

/// The concurrent alphabet of a set of sync events under Definition-style
/// participant-disjointness.
pub fn sync_alphabet(events: impl IntoIterator<Item = SyncEvent>) -> ConcurrentAlphabet<SyncEvent> {
    ConcurrentAlphabet::new(events.into_iter().collect(), sync_independence)
}

/// Which structural case of the transitivity analysis an alphabet falls
/// into.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum TopologyCase {
    /// At most three participants: the relation is empty.
    FewParticipants,
    /// Four participants, complete topology, single message value.
    CompleteSingleValue,
    /// Four participants, complete topology, several message values.
    CompleteMultiValue,
    /// Four participants, incomplete topology: the pair-count condition
    /// decides.
    IncompleteFour,
    /// Five or more participants: no closed-form condition; the direct
    /// check decides.
    ManyParticipants,
}

/// Structural report on a sync-event alphabet.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TopologyReport {
    pub participants: BTreeSet<Participant>,
    /// Number of distinct events per unordered participant pair.
    pub events_per_pair: BTreeMap<(Participant, Participant), usize>,
    pub complete: bool,
    pub case: TopologyCase,
    /// Whether the pair-count condition holds: no two disjoint pairs where
    /// one carries two or more events and the other at least one.
    pub pair_condition_holds: bool,
    pub transitive: bool,
    pub witness: Option<(SyncEvent, SyncEvent, SyncEvent)>,
}

/// Analyzes the communication topology of a sync-event alphabet. The
/// transitivity verdict always comes from the direct check; the case
/// analysis and the pair-count condition are informational.
pub fn classify_topology(alphabet: &ConcurrentAlphabet<SyncEvent>) -> TopologyReport {
    let mut participants = BTreeSet::new();
    let mut events_per_pair: BTreeMap<(Participant, Participant), usize> = BTreeMap::new();
    for e in alphabet.symbols() {
        participants.insert(e.sender.clone());
        participants.insert(e.receiver.clone());
        let key = if e.sender <= e.receiver {
            (e.sender.clone(), e.receiver.clone())
        } else {
            (e.receiver.clone(), e.sender.clone())
        };
        *events_per_pair.entry(key).or_insert(0) += 1;
    }
    let ps: Vec<&Participant> = participants.iter().collect();
    let all_pairs: Vec<(Participant, Participant)> = (0..ps.len())
        .flat_map(|i| (i + 1..ps.len()).map(move |j| (ps[i].clone(), ps[j].clone())))
        .collect();
    let complete = !all_pairs.is_empty()
        && all_pairs.iter().all(|pair| events_per_pair.contains_key(pair));

    // Condition: for disjoint unordered pairs A and B, two or more events
    // on A force zero events on B. Over four participants this is
    // equivalent to transitivity; beyond that the direct check governs.
    let mut pair_condition_holds = true;
    let pairs: Vec<(&(Participant, Participant), &usize)> = events_per_pair.iter().collect();
    for (i, (pa, ca)) in pairs.iter().enumerate() {
        for (pb, cb) in pairs.iter().skip(i + 1) {
            let disjoint =
                pa.0 != pb.0 && pa.0 != pb.1 && pa.1 != pb.0 && pa.1 != pb.1;
            if disjoint && ((**ca >= 2 && **cb >= 1) || (**cb >= 2 && **ca >= 1)) {
                pair_condition_holds = false;
            }
        }
    }

    let values: BTreeSet<&MessageLabel> = alphabet.symbols().iter().map(|e| &e.label).collect();
    let case = match participants.len() {
        0..=3 => TopologyCase::FewParticipants,
        4 if complete && values.len() == 1 => TopologyCase::CompleteSingleValue,
        4 if complete => TopologyCase::CompleteMultiValue,
        4 => TopologyCase::IncompleteFour,
        _ => TopologyCase::ManyParticipants,
    };

    let (transitive, witness) = match alphabet.is_transitive() {
        Ok(()) => (true, None),
        Err(t) => (false, Some(t)),
    };
    TopologyReport {
        participants,
        events_per_pair,
        complete,
        case,
        pair_condition_holds,
        transitive,
        witness,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    pub(crate) fn ev(s: &str, r: &str, m: &str) -> SyncEvent {
        SyncEvent::new(
            Participant::new(s),
            Participant::new(r),
            MessageLabel::unit(m),
        )
    }

    #[test]
    fn sync_independence_by_participant_disjointness() {
        assert!(sync_independence(&ev("p", "q", "m1"), &ev("r", "s", "m1")));
        assert!(!sync_independence(&ev("p", "q", "m1"), &ev("p", "q", "m2")));
        assert!(!sync_independence(&ev("p", "q", "m"), &ev("q", "r", "m")));
    }

    #[test]
    fn independence_is_irreflexive_and_symmetric() {
        let events = [
            ev("p", "q", "m"),
            ev("r", "s", "m"),
            ev("p", "r", "m"),
            ev("q", "s", "m"),
        ];
        for a in &events {
            assert!(!sync_independence(a, a));
            for b in &events {
                assert_eq!(sync_independence(a, b), sync_independence(b, a));
            }
        }
    }

    #[test]
    fn boomerang_is_not_transitive() {
        let alpha = sync_alphabet([ev("p", "q", "m1"), ev("r", "s", "m1"), ev("p", "q", "m2")]);
        let witness = alpha.is_transitive().unwrap_err();
        // the violating triple has the r->s event in the middle
        assert_eq!(witness.1, ev("r", "s", "m1"));
        assert!(!sync_independence(&witness.0, &witness.2));
    }

    #[test]
    fn complete_four_single_value_is_transitive() {
        let alpha = sync_alphabet([
            ev("p", "q", "m"),
            ev("p", "r", "m"),
            ev("p", "s", "m"),
            ev("q", "r", "m"),
            ev("q", "s", "m"),
            ev("r", "s", "m"),
        ]);
        assert!(alpha.is_transitive().is_ok());
        let pairs: Vec<(SyncEvent, SyncEvent)> = alpha
            .independent_pairs()
            .map(|(a, b)| (a.clone(), b.clone()))
            .collect();
        assert_eq!(
            pairs,
            vec![
                (ev("p", "q", "m"), ev("r", "s", "m")),
                (ev("p", "r", "m"), ev("q", "s", "m")),
                (ev("p", "s", "m"), ev("q", "r", "m")),
            ]
        );
        let cliques = alpha.clique_partition().unwrap();
        assert_eq!(cliques.classes.len(), 3);
        for class in &cliques.classes {
            assert_eq!(class.len(), 2);
        }
    }

    #[test]
    fn clique_partition_invariants() {
        let alpha = sync_alphabet([ev("p", "q", "m"), ev("r", "s", "m"), ev("t", "u", "m")]);
        let part = alpha.clique_partition().unwrap();
        assert_eq!(part.classes.len(), 1);
        assert_eq!(part.classes[0].len(), 3);
        // empty independence: singletons
        let alpha2 = sync_alphabet([ev("p", "q", "a"), ev("q", "r", "b"), ev("p", "r", "c")]);
        let part2 = alpha2.clique_partition().unwrap();
        assert_eq!(part2.classes.len(), 3);
        // cross-class pairs dependent, within-class independent
        for alpha in [&alpha, &alpha2] {
            let part = alpha.clique_partition().unwrap();
            for class in &part.classes {
                for a in class {
                    for b in class {
                        if a != b {
                            assert!(alpha.independent(a, b));
                        }
                    }
                }
            }
            for (i, ca) in part.classes.iter().enumerate() {
                for cb in part.classes.iter().skip(i + 1) {
                    for a in ca {
                        for b in cb {
                            assert!(!alpha.independent(a, b));
                        }
                    }
                }
            }
        }
    }

    #[test]
    fn clique_partition_requires_transitivity() {
        let alpha = sync_alphabet([ev("p", "q", "m1"), ev("r", "s", "m1"), ev("p", "q", "m2")]);
        assert!(matches!(
            alpha.clique_partition(),
            Err(AlphabetError::NotTransitive(..))
        ));
    }

    #[test]
    fn three_participants_have_empty_independence() {
        let alpha = sync_alphabet([ev("p", "q", "m1"), ev("q", "r", "m2"), ev("p", "r", "m3")]);
        assert_eq!(alpha.independent_pairs().count(), 0);
        let report = classify_topology(&alpha);
        assert_eq!(report.case, TopologyCase::FewParticipants);
        assert!(report.transitive);
    }

    #[test]
    fn rectangle_violates_pair_condition() {
        let alpha = sync_alphabet([
            ev("p", "q", "m1"),
            ev("r", "s", "m1"),
            ev("p", "q", "m2"),
            ev("r", "s", "m2"),
        ]);
        let report = classify_topology(&alpha);
        assert!(!report.pair_condition_holds);
        assert!(!report.transitive);
        assert!(report.witness.is_some());
    }

    #[test]
    fn coordinator_topology_is_transitive() {
        let alpha = sync_alphabet([
            ev("p", "q", "m1"),
            ev("p", "q", "m2"),
            ev("p", "r", "m"),
            ev("q", "r", "m"),
        ]);
        let report = classify_topology(&alpha);
        assert!(report.pair_condition_holds);
        assert!(report.transitive);
    }

    #[test]
    fn topology_verdict_agrees_with_direct_check() {
        // exhaustive family over 4 participants and 2 values: every subset
        // of a fixed event pool
        let pool: Vec<SyncEvent> = {
            let names = ["p", "q", "r", "s"];
            let mut v = Vec::new();
            for i in 0..4 {
                for j in 0..4 {
                    if i != j && i < 2 {
                        for m in ["m1", "m2"] {
                            v.push(ev(names[i], names[j], m));
                        }
                    }
                }
            }
            v
        };
        let mut checked = 0;
        for mask in 0u32..(1 << pool.len().min(12)) {
            let events: Vec<SyncEvent> = pool
                .iter()
                .enumerate()
                .filter(|(i, _)| mask & (1 << i) != 0)
                .map(|(_, e)| e.clone())
                .collect();
            let alpha = sync_alphabet(events);
            let report = classify_topology(&alpha);
            assert_eq!(report.transitive, alpha.is_transitive().is_ok());
            checked += 1;
        }
        assert!(checked >= 200);
    }
}
