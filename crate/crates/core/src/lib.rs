//! Consistent query answering over relational instances with denial
//! constraints.
//!
//! Tuples in conflict form the hyperedges of a conflict hypergraph. Repairs
//! that delete tuples are its independent sets: maximal ones for S-repairs,
//! maximum ones for C-repairs, maximum-weight ones for weighted C-repairs.
//! Attribute-change repairs with a bounded candidate set are found by
//! uniform-cost search. Certain and possible answers follow, with
//! membership shortcuts for ground queries and an incremental path for a
//! consistent base instance plus a short update sequence.
//!
//! ```
//! use cqa_core::{parse_constraints, parse_instance, parse_query, certain_answers, Semantics, SolveBudget};
//!
//! let db = parse_instance("P(a,b,c)\nP(a,c,d)\nP(a,c,e)").unwrap();
//! let ics = parse_constraints(":- P(x,y,z), P(x,u,w), y != u.").unwrap();
//! let q = parse_query("? P(x,y,z)").unwrap();
//! let c = certain_answers(&db, &ics, &q, &Semantics::C, &SolveBudget::default()).unwrap();
//! assert_eq!(c.len(), 2);
//! let s = certain_answers(&db, &ics, &q, &Semantics::S, &SolveBudget::default()).unwrap();
//! assert!(s.is_empty());
//! ```

pub mod answer;
pub mod denial;
pub mod eval;
pub mod gadgets;
pub mod hypergraph;
pub mod incremental;
pub mod model;
pub mod repairs;
pub mod solve;
pub mod syntax;

pub use answer::{
    answers, certain_answers, certain_ground_fast, certain_literal_conjunction, consistent_answers,
    evaluate, possible_answers, possible_ground_fast, possible_literal_conjunction, AnswerError,
    AnswerMode, AnswerSet, Literal, Query, QueryError,
};
pub use denial::{
    is_consistent, violating_sets, Atom, CmpOp, Comparison, ConstraintSet, DenialConstraint, Term,
};
pub use gadgets::{
    block, graph_to_database, rhombus_extension, twin_extension, Block, SimpleGraph,
};
pub use hypergraph::{
    build_conflict_hypergraph, ConflictHypergraph, Hypergraph, VertexId, VertexSet,
};
pub use incremental::{
    incremental_a_certain, incremental_answer, incremental_c_distance, incremental_certain,
    incremental_possible, incremental_s_certain, touched_region, IncrementalError,
    IncrementalProblem, TouchedRegion,
};
pub use model::{
    apply_update, minimize_update, Constant, ConstraintClass, DbTuple, Instance, Schema, UpdateOp,
    UpdateSequence, Weight,
};
pub use repairs::{
    a_repairs_bounded, c_repairs, repairs, s_repairs, wc_repairs, ARepair, BoundedASpec,
    CellChange, RepairError, RepairList, Semantics, TupleRepair, WeightFn,
};
pub use solve::{
    alpha, alpha_weighted, enumerate_maximal_is, enumerate_maximum_is, min_hitting_set, SolveBudget,
};
pub use syntax::{
    parse_candidates, parse_constraint, parse_constraints, parse_instance, parse_query,
    parse_updates, ParseError,
};
