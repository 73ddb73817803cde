//! Disproving termination of sole combinatory calculi.
//!
//! A combinator `Z x1 .. xn -> e` induces a single-rule term rewriting system
//! over the signature `{Z, A}` where `A` is binary application. This crate
//! searches, with a SAT solver, for a tree automaton whose final state is a
//! sink, whose language contains no normal form and which is closed under
//! innermost reduction. Such an automaton proves that the combinator is not
//! terminating; every automaton the search produces is re-checked by an
//! independent verifier and a smallest accepted term is extracted as a
//! concrete non-normalizing witness.
//!
//! Module map:
//!
//! * [`terms`]: terms, rules, left depth, redexes and reduction.
//! * [`automata`]: bottom-up tree automata, verifiers, language inclusion,
//!   TDA-to-TDAS construction and smallest-term extraction.
//! * [`encoding`]: CNF encodings for the sink-final search and the baseline.
//! * [`solver`]: DIMACS I/O, external solver processes and a built-in CDCL.
//! * [`search`]: the iterative disproof driver and the combinator corpus.

pub mod automata;
pub mod encoding;
pub mod search;
pub mod solver;
pub mod terms;

pub use automata::{State, StateSet, TreeAutomaton, VerificationReport};
pub use encoding::{CnfInstance, EncodingVariable, Method};
pub use search::{disprove, SearchOptions, SearchOutcome, SearchStatus};
pub use solver::{SolverChoice, SolverResult};
pub use terms::{CombinatorRule, Term};
