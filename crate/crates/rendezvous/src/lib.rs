//! Synchronous realizability and verification of global message-passing
//! protocols, with a session type checker for mixed-choice processes.
//!
//! The crate decides whether a global protocol — a reduced DFA over
//! rendezvous events `p->q:m` — can be implemented by per-participant
//! state machines that jointly exhibit exactly the protocol's behaviors
//! without deadlocks, and type-checks pi-calculus style processes against
//! such machines.
//!
//! Modules:
//! - [`alphabet`]: events, participants, independence, topology analysis
//! - [`automata`]: generic NFA/DFA algebra all languages live in
//! - [`semilinear`]: Parikh-image arithmetic and the clique ∃→∀ conversion
//! - [`traces`]: Mazurkiewicz trace operations and normal forms
//! - [`protocol`]: protocol files, projections, choice classification
//! - [`scsm`]: communicating state machines, products, static checks
//! - [`realizability`]: the strategy ladder deciding realizability
//! - [`typecheck`]: mixed-choice process calculus and its type system

pub mod alphabet;
pub mod automata;
pub mod semilinear;
pub mod traces;
