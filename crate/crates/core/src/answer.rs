//! Query evaluation and consistent query answering.
//!
//! Certain and possible answers are computed by enumerating the repairs of
//! the chosen semantics and intersecting (or uniting) the classical answers.
//! Ground queries under cardinality semantics also have a fast path that
//! asks membership questions of the conflict hypergraph instead.

use std::collections::{BTreeSet, HashSet};
use std::fmt;
use std::ops::ControlFlow;

use thiserror::Error;

use crate::denial::{Atom, Comparison, ConstraintSet, Term};
use crate::eval::{Body, TupleIndex};
use crate::hypergraph::{build_conflict_hypergraph, ConflictHypergraph, VertexId};
use crate::model::{Constant, DbTuple, Instance};
use crate::repairs::{a_repairs_bounded, repair_vertex_sets, RepairError, Semantics};
use crate::solve::{self, SolveBudget, SolveError};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum QueryError {
    #[error("query is unsafe: variable `{0}` does not occur in a positive atom")]
    UnsafeQuery(String),
    #[error("query has no atoms")]
    Empty,
    #[error("existential variable `{0}` does not occur in the query")]
    UnusedExistential(String),
}

#[derive(Debug, Error)]
pub enum AnswerError {
    #[error(transparent)]
    Query(#[from] QueryError),
    #[error(transparent)]
    Solve(#[from] SolveError),
    #[error("{0}")]
    Unsupported(String),
}

impl From<RepairError> for AnswerError {
    fn from(e: RepairError) -> Self {
        match e {
            RepairError::Solve(s) => AnswerError::Solve(s),
            // callers handle NoRepair before converting
            RepairError::NoRepair => AnswerError::Unsupported("no repair exists".into()),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Literal {
    pub positive: bool,
    pub atom: Atom,
}

impl fmt::Display for Literal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if !self.positive {
            f.write_str("not ")?;
        }
        write!(f, "{}", self.atom)
    }
}

/// The three supported query classes.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Query {
    GroundAtomic(DbTuple),
    /// Quantifier-free conjunction of possibly negated atoms. Free
    /// variables are those of the positive atoms.
    LiteralConjunction {
        literals: Vec<Literal>,
        comparisons: Vec<Comparison>,
    },
    /// `exists z1..zk: A1, ..., An, comparisons` with positive atoms only.
    Conjunctive {
        exists: Vec<String>,
        atoms: Vec<Atom>,
        comparisons: Vec<Comparison>,
    },
}

fn push_unique<'a>(out: &mut Vec<&'a str>, v: &'a str) {
    if !out.contains(&v) {
        out.push(v);
    }
}

impl Query {
    pub fn ground(t: DbTuple) -> Self {
        Query::GroundAtomic(t)
    }

    pub fn conjunctive(
        exists: Vec<String>,
        atoms: Vec<Atom>,
        comparisons: Vec<Comparison>,
    ) -> Result<Self, QueryError> {
        let q = Query::Conjunctive {
            exists,
            atoms,
            comparisons,
        };
        q.validate()?;
        Ok(q)
    }

    /// Builds a literal conjunction; a lone positive ground atom becomes
    /// [`Query::GroundAtomic`].
    pub fn literal_conjunction(
        literals: Vec<Literal>,
        comparisons: Vec<Comparison>,
    ) -> Result<Self, QueryError> {
        if comparisons.is_empty() && literals.len() == 1 && literals[0].positive {
            if let Some(t) = literals[0].atom.ground() {
                return Ok(Query::GroundAtomic(t));
            }
        }
        let q = Query::LiteralConjunction {
            literals,
            comparisons,
        };
        q.validate()?;
        Ok(q)
    }

    /// Checks safety: every variable occurs in some positive atom, and
    /// every existential variable occurs in the body.
    pub fn validate(&self) -> Result<(), QueryError> {
        let (pos, neg, cmps, exists): (Vec<&Atom>, Vec<&Atom>, &[Comparison], &[String]) =
            match self {
                Query::GroundAtomic(_) => return Ok(()),
                Query::LiteralConjunction {
                    literals,
                    comparisons,
                } => (
                    literals
                        .iter()
                        .filter(|l| l.positive)
                        .map(|l| &l.atom)
                        .collect(),
                    literals
                        .iter()
                        .filter(|l| !l.positive)
                        .map(|l| &l.atom)
                        .collect(),
                    comparisons,
                    &[],
                ),
                Query::Conjunctive {
                    exists,
                    atoms,
                    comparisons,
                } => (atoms.iter().collect(), Vec::new(), comparisons, exists),
            };
        if pos.is_empty() && neg.is_empty() {
            return Err(QueryError::Empty);
        }
        let bound: HashSet<&str> = pos.iter().flat_map(|a| a.variables()).collect();
        let others = neg.iter().flat_map(|a| a.variables()).chain(
            cmps.iter()
                .flat_map(|c| [&c.lhs, &c.rhs])
                .filter_map(Term::as_var),
        );
        for v in others {
            if !bound.contains(v) {
                return Err(QueryError::UnsafeQuery(v.to_string()));
            }
        }
        for z in exists {
            if !bound.contains(z.as_str()) {
                return Err(QueryError::UnusedExistential(z.clone()));
            }
        }
        Ok(())
    }

    /// Answer variables in order of first occurrence.
    pub fn free_variables(&self) -> Vec<&str> {
        let mut out = Vec::new();
        match self {
            Query::GroundAtomic(_) => {}
            Query::LiteralConjunction { literals, .. } => {
                for l in literals.iter().filter(|l| l.positive) {
                    l.atom.variables().for_each(|v| push_unique(&mut out, v));
                }
            }
            Query::Conjunctive { exists, atoms, .. } => {
                for a in atoms {
                    a.variables()
                        .filter(|v| !exists.iter().any(|z| z == v))
                        .for_each(|v| push_unique(&mut out, v));
                }
            }
        }
        out
    }

    /// True if the query mentions no variables at all.
    pub fn is_ground(&self) -> bool {
        match self {
            Query::GroundAtomic(_) => true,
            Query::LiteralConjunction {
                literals,
                comparisons,
            } => {
                literals.iter().all(|l| l.atom.ground().is_some())
                    && comparisons
                        .iter()
                        .all(|c| c.lhs.as_var().is_none() && c.rhs.as_var().is_none())
            }
            Query::Conjunctive { atoms, .. } => atoms.iter().all(|a| a.ground().is_some()),
        }
    }

    pub fn is_boolean(&self) -> bool {
        self.free_variables().is_empty()
    }

    /// The ground literals of a ground query, with the truth value of its
    /// (variable-free) comparisons.
    pub fn ground_literals(&self) -> Option<(Vec<(bool, DbTuple)>, bool)> {
        match self {
            Query::GroundAtomic(t) => Some((vec![(true, t.clone())], true)),
            Query::LiteralConjunction {
                literals,
                comparisons,
            } if self.is_ground() => {
                let lits = literals
                    .iter()
                    .map(|l| (l.positive, l.atom.ground().unwrap()))
                    .collect();
                let cmp_ok = comparisons.iter().all(|c| match (&c.lhs, &c.rhs) {
                    (Term::Const(l), Term::Const(r)) => c.op.holds(l, r),
                    _ => unreachable!("ground comparison"),
                });
                Some((lits, cmp_ok))
            }
            _ => None,
        }
    }

    fn body(&self) -> Body {
        match self {
            Query::GroundAtomic(t) => Body::new(&[Atom::from(t)], &[], &[]),
            Query::LiteralConjunction {
                literals,
                comparisons,
            } => {
                let pos: Vec<Atom> = literals
                    .iter()
                    .filter(|l| l.positive)
                    .map(|l| l.atom.clone())
                    .collect();
                let neg: Vec<Atom> = literals
                    .iter()
                    .filter(|l| !l.positive)
                    .map(|l| l.atom.clone())
                    .collect();
                Body::new(&pos, &neg, comparisons)
            }
            Query::Conjunctive {
                atoms, comparisons, ..
            } => Body::new(atoms, &[], comparisons),
        }
    }
}

impl fmt::Display for Query {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("? ")?;
        let parts: Vec<String> = match self {
            Query::GroundAtomic(t) => vec![t.to_string()],
            Query::LiteralConjunction {
                literals,
                comparisons,
            } => literals
                .iter()
                .map(ToString::to_string)
                .chain(comparisons.iter().map(ToString::to_string))
                .collect(),
            Query::Conjunctive {
                exists,
                atoms,
                comparisons,
            } => {
                if !exists.is_empty() {
                    write!(f, "exists {}: ", exists.join(","))?;
                }
                atoms
                    .iter()
                    .map(ToString::to_string)
                    .chain(comparisons.iter().map(ToString::to_string))
                    .collect()
            }
        };
        f.write_str(&parts.join(", "))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum AnswerMode {
    Certain,
    Possible,
}

impl fmt::Display for AnswerMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            AnswerMode::Certain => "certain",
            AnswerMode::Possible => "possible",
        })
    }
}

/// Answers to a query. A boolean query's answer is `yes` iff the set holds
/// the empty tuple.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AnswerSet {
    pub variables: Vec<String>,
    pub tuples: BTreeSet<Vec<Constant>>,
    /// Set when the answer was taken over an empty set of repairs.
    pub vacuous: bool,
}

impl AnswerSet {
    pub fn empty(variables: Vec<String>) -> Self {
        AnswerSet {
            variables,
            tuples: BTreeSet::new(),
            vacuous: false,
        }
    }

    pub fn boolean(yes: bool) -> Self {
        let mut a = AnswerSet::empty(Vec::new());
        if yes {
            a.tuples.insert(Vec::new());
        }
        a
    }

    pub fn is_boolean(&self) -> bool {
        self.variables.is_empty()
    }

    pub fn is_yes(&self) -> bool {
        !self.tuples.is_empty()
    }

    pub fn len(&self) -> usize {
        self.tuples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.tuples.is_empty()
    }

    pub fn contains(&self, t: &[Constant]) -> bool {
        self.tuples.contains(t)
    }

    fn intersect(&mut self, other: AnswerSet) {
        self.tuples = self.tuples.intersection(&other.tuples).cloned().collect();
    }

    fn unite(&mut self, other: AnswerSet) {
        self.tuples.extend(other.tuples);
    }
}

impl fmt::Display for AnswerSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_boolean() {
            return writeln!(f, "{}", if self.is_yes() { "yes" } else { "no" });
        }
        for t in &self.tuples {
            let vals: Vec<String> = t.iter().map(ToString::to_string).collect();
            writeln!(f, "({})", vals.join(","))?;
        }
        Ok(())
    }
}

pub(crate) fn evaluate_on(index: &TupleIndex, alive: &dyn Fn(u32) -> bool, q: &Query) -> AnswerSet {
    let vars: Vec<String> = q.free_variables().into_iter().map(String::from).collect();
    let body = q.body();
    let slots: Vec<usize> = vars.iter().map(|v| body.var_slot(v).unwrap()).collect();
    let mut out = AnswerSet::empty(vars);
    let boolean = slots.is_empty();
    let _ = body.for_each_match::<()>(index, alive, None, &mut |bindings, _| {
        out.tuples.insert(
            slots
                .iter()
                .map(|&s| bindings[s].clone().unwrap())
                .collect(),
        );
        if boolean {
            ControlFlow::Break(())
        } else {
            ControlFlow::Continue(())
        }
    });
    out
}

/// Classical answers of `q` over `instance`.
pub fn evaluate(instance: &Instance, q: &Query) -> Result<AnswerSet, QueryError> {
    q.validate()?;
    Ok(evaluate_on(&TupleIndex::new(instance), &|_| true, q))
}

fn combine(
    mode: AnswerMode,
    results: impl IntoIterator<Item = AnswerSet>,
    vars: Vec<String>,
) -> Option<AnswerSet> {
    let mut acc: Option<AnswerSet> = None;
    for r in results {
        match acc.as_mut() {
            None => acc = Some(r),
            Some(a) => match mode {
                AnswerMode::Certain => a.intersect(r),
                AnswerMode::Possible => a.unite(r),
            },
        }
    }
    acc.map(|mut a| {
        a.variables = vars;
        a
    })
}

/// Answers of `q` in every repair (certain) or some repair (possible),
/// computed by enumerating the repairs.
pub fn answers(
    instance: &Instance,
    ics: &ConstraintSet,
    q: &Query,
    sem: &Semantics,
    mode: AnswerMode,
    budget: &SolveBudget,
) -> Result<AnswerSet, AnswerError> {
    q.validate()?;
    let vars: Vec<String> = q.free_variables().into_iter().map(String::from).collect();
    if let Semantics::BoundedA(spec) = sem {
        return match a_repairs_bounded(instance, ics, spec) {
            Ok(reps) => {
                let results = reps
                    .iter()
                    .map(|r| evaluate_on(&TupleIndex::new(&r.result), &|_| true, q));
                Ok(combine(mode, results, vars).expect("at least one A-repair"))
            }
            Err(RepairError::NoRepair) => Ok(vacuous_answer(instance, q, mode)),
            Err(e) => Err(e.into()),
        };
    }
    let h = build_conflict_hypergraph(instance, ics);
    let index = TupleIndex::from_tuples(h.tuples().iter().cloned());
    let sets = repair_vertex_sets(&h, instance, sem, budget)?;
    let mut mask = vec![false; index.len()];
    let results = sets.iter().map(|s| {
        mask.iter_mut().for_each(|m| *m = false);
        for &v in s {
            mask[v as usize] = true;
        }
        evaluate_on(&index, &|id| mask[id as usize], q)
    });
    // tuple-based semantics always have at least one repair
    Ok(combine(mode, results.collect::<Vec<_>>(), vars).expect("at least one repair"))
}

/// Over an empty set of repairs a boolean query is certainly true and
/// possibly false. Open certain answers are reported as the classical
/// answers over the original instance, flagged as vacuous.
pub(crate) fn vacuous_answer(instance: &Instance, q: &Query, mode: AnswerMode) -> AnswerSet {
    let mut a = match (mode, q.is_boolean()) {
        (AnswerMode::Certain, true) => AnswerSet::boolean(true),
        (AnswerMode::Certain, false) => evaluate_on(&TupleIndex::new(instance), &|_| true, q),
        (AnswerMode::Possible, _) => {
            AnswerSet::empty(q.free_variables().into_iter().map(String::from).collect())
        }
    };
    a.vacuous = true;
    a
}

pub fn certain_answers(
    instance: &Instance,
    ics: &ConstraintSet,
    q: &Query,
    sem: &Semantics,
    budget: &SolveBudget,
) -> Result<AnswerSet, AnswerError> {
    answers(instance, ics, q, sem, AnswerMode::Certain, budget)
}

pub fn possible_answers(
    instance: &Instance,
    ics: &ConstraintSet,
    q: &Query,
    sem: &Semantics,
    budget: &SolveBudget,
) -> Result<AnswerSet, AnswerError> {
    answers(instance, ics, q, sem, AnswerMode::Possible, budget)
}

fn weight_fn<'a>(
    h: &'a ConflictHypergraph,
    instance: &'a Instance,
) -> impl Fn(VertexId) -> crate::model::Weight + 'a {
    move |v| instance.weight(h.tuple(v)).unwrap_or_default()
}

/// Is `t` in every repair, decided without enumerating repairs. Under S
/// this holds iff `t` meets no hyperedge; under C and weighted C it is the
/// optimum comparison of the conflict hypergraph with and without `t`.
pub fn certain_ground_fast(
    instance: &Instance,
    ics: &ConstraintSet,
    t: &DbTuple,
    sem: &Semantics,
    budget: &SolveBudget,
) -> Result<bool, AnswerError> {
    if !instance.contains(t) {
        return Ok(false);
    }
    let h = build_conflict_hypergraph(instance, ics);
    let v = h.vertex_of(t).expect("tuple of the instance");
    in_all(&h, instance, v, sem, budget)
}

/// Is `t` in some repair, decided without enumerating repairs.
pub fn possible_ground_fast(
    instance: &Instance,
    ics: &ConstraintSet,
    t: &DbTuple,
    sem: &Semantics,
    budget: &SolveBudget,
) -> Result<bool, AnswerError> {
    if !instance.contains(t) {
        return Ok(false);
    }
    let h = build_conflict_hypergraph(instance, ics);
    let v = h.vertex_of(t).expect("tuple of the instance");
    in_some(&h, instance, v, sem, budget)
}

fn in_all(
    h: &ConflictHypergraph,
    instance: &Instance,
    v: VertexId,
    sem: &Semantics,
    budget: &SolveBudget,
) -> Result<bool, AnswerError> {
    let g = h.graph();
    Ok(match sem {
        Semantics::S => !g.edges().iter().any(|e| e.contains(&v)),
        Semantics::C => solve::in_all_maximum_is(g, v, budget)?,
        Semantics::WeightedC => solve::in_all_max_weight_is(g, v, weight_fn(h, instance), budget)?,
        Semantics::BoundedA(_) => return Err(unsupported_fast()),
    })
}

fn in_some(
    h: &ConflictHypergraph,
    instance: &Instance,
    v: VertexId,
    sem: &Semantics,
    budget: &SolveBudget,
) -> Result<bool, AnswerError> {
    let g = h.graph();
    Ok(match sem {
        Semantics::S => !g.edges().iter().any(|e| e.len() == 1 && e[0] == v),
        Semantics::C => solve::in_some_maximum_is(g, v, budget)?,
        Semantics::WeightedC => solve::in_some_max_weight_is(g, v, weight_fn(h, instance), budget)?,
        Semantics::BoundedA(_) => return Err(unsupported_fast()),
    })
}

fn unsupported_fast() -> AnswerError {
    AnswerError::Unsupported("the membership fast path covers tuple-based semantics only".into())
}

/// Certain answer to a ground literal conjunction: every positive literal
/// in all optimal repairs, every negated one in none.
pub fn certain_literal_conjunction(
    instance: &Instance,
    ics: &ConstraintSet,
    q: &Query,
    sem: &Semantics,
    budget: &SolveBudget,
) -> Result<bool, AnswerError> {
    let (lits, cmp_ok) = q.ground_literals().ok_or_else(|| {
        AnswerError::Unsupported("query is not a ground literal conjunction".into())
    })?;
    if !cmp_ok {
        return Ok(false);
    }
    let h = build_conflict_hypergraph(instance, ics);
    for (positive, t) in lits {
        let holds = match (positive, h.vertex_of(&t)) {
            (true, None) => false,
            (false, None) => true,
            (true, Some(v)) => in_all(&h, instance, v, sem, budget)?,
            (false, Some(v)) => !in_some(&h, instance, v, sem, budget)?,
        };
        if !holds {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Possible answer to a ground literal conjunction: some optimal repair
/// keeps every positive literal and drops every negated one.
pub fn possible_literal_conjunction(
    instance: &Instance,
    ics: &ConstraintSet,
    q: &Query,
    sem: &Semantics,
    budget: &SolveBudget,
) -> Result<bool, AnswerError> {
    let (lits, cmp_ok) = q.ground_literals().ok_or_else(|| {
        AnswerError::Unsupported("query is not a ground literal conjunction".into())
    })?;
    if !cmp_ok {
        return Ok(false);
    }
    let h = build_conflict_hypergraph(instance, ics);
    let mut include = Vec::new();
    let mut exclude = Vec::new();
    for (positive, t) in lits {
        match (positive, h.vertex_of(&t)) {
            (true, None) => return Ok(false),
            (false, None) => {}
            (true, Some(v)) => include.push(v),
            (false, Some(v)) => exclude.push(v),
        }
    }
    let g = h.graph();
    Ok(match sem {
        Semantics::C => solve::exists_maximum_is_with(g, &include, &exclude, budget)?,
        Semantics::WeightedC => solve::exists_max_weight_is_with(
            g,
            &include,
            &exclude,
            weight_fn(&h, instance),
            budget,
        )?,
        Semantics::S => {
            let inc: BTreeSet<VertexId> = include.iter().copied().collect();
            if !g.is_independent(&inc) {
                return Ok(false);
            }
            // any independent set extends to a maximal one, so only the
            // exclusions need the enumeration
            exclude.is_empty()
                || solve::enumerate_maximal_is(g, budget)?
                    .iter()
                    .any(|s| inc.is_subset(s) && exclude.iter().all(|v| !s.contains(v)))
        }
        Semantics::BoundedA(_) => return Err(unsupported_fast()),
    })
}

/// Certain or possible answers, taking the membership fast path for
/// ground queries under tuple-based semantics and enumerating otherwise.
pub fn consistent_answers(
    instance: &Instance,
    ics: &ConstraintSet,
    q: &Query,
    sem: &Semantics,
    mode: AnswerMode,
    budget: &SolveBudget,
) -> Result<AnswerSet, AnswerError> {
    q.validate()?;
    if q.is_ground() && !matches!(sem, Semantics::BoundedA(_)) {
        let yes = match mode {
            AnswerMode::Certain => certain_literal_conjunction(instance, ics, q, sem, budget)?,
            AnswerMode::Possible => possible_literal_conjunction(instance, ics, q, sem, budget)?,
        };
        return Ok(AnswerSet::boolean(yes));
    }
    answers(instance, ics, q, sem, mode, budget)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::syntax::{parse_constraints, parse_instance, parse_query};
    use crate::tuple;

    fn fd() -> ConstraintSet {
        parse_constraints(":- P(x,y,z), P(x,u,w), y != u.").unwrap()
    }

    fn example1() -> Instance {
        parse_instance("P(a,b,c)\nP(a,c,d)\nP(a,c,e)").unwrap()
    }

    fn example4(n: i64) -> (Instance, ConstraintSet) {
        let mut text = String::from("S(0)\n");
        for i in 1..=n {
            text.push_str(&format!("R({i})\n"));
        }
        (
            parse_instance(&text).unwrap(),
            parse_constraints(":- R(x), S(y).").unwrap(),
        )
    }

    fn row(vals: &[&str]) -> Vec<Constant> {
        vals.iter().map(|v| Constant::sym(v)).collect()
    }

    fn b() -> SolveBudget {
        SolveBudget::default()
    }

    #[test]
    fn classical_evaluation() {
        let d2 = parse_instance("P(a,c,d)\nP(a,c,e)").unwrap();
        let a = evaluate(&d2, &parse_query("? P(x,y,z)").unwrap()).unwrap();
        assert_eq!(a.variables, vec!["x", "y", "z"]);
        assert_eq!(
            a.tuples,
            BTreeSet::from([row(&["a", "c", "d"]), row(&["a", "c", "e"])])
        );
        assert!(evaluate(&d2, &parse_query("P(a,c,d)").unwrap())
            .unwrap()
            .is_yes());
        let d = parse_instance("P(a,b)").unwrap();
        let a = evaluate(&d, &parse_query("? P(x,b), not P(x,c)").unwrap()).unwrap();
        assert_eq!(a.tuples, BTreeSet::from([row(&["a"])]));
        let a = evaluate(&d2, &parse_query("? exists z: P(x,y,z), x = a").unwrap()).unwrap();
        assert_eq!(a.tuples, BTreeSet::from([row(&["a", "c"])]));
    }

    #[test]
    fn example2_certain_answers() {
        let q = parse_query("? P(x,y,z)").unwrap();
        let c = certain_answers(&example1(), &fd(), &q, &Semantics::C, &b()).unwrap();
        assert_eq!(
            c.tuples,
            BTreeSet::from([row(&["a", "c", "d"]), row(&["a", "c", "e"])])
        );
        let s = certain_answers(&example1(), &fd(), &q, &Semantics::S, &b()).unwrap();
        assert!(s.is_empty());
        let p = possible_answers(&example1(), &fd(), &q, &Semantics::S, &b()).unwrap();
        assert_eq!(p.len(), 3);
    }

    #[test]
    fn example4_ground_answers() {
        let (d, ics) = example4(3);
        let q = parse_query("R(1)").unwrap();
        assert!(certain_answers(&d, &ics, &q, &Semantics::C, &b())
            .unwrap()
            .is_yes());
        assert!(!certain_answers(&d, &ics, &q, &Semantics::S, &b())
            .unwrap()
            .is_yes());
        assert!(certain_ground_fast(&d, &ics, &tuple!("R", 1), &Semantics::C, &b()).unwrap());
        assert!(!certain_ground_fast(&d, &ics, &tuple!("S", 0), &Semantics::C, &b()).unwrap());
        assert!(!certain_ground_fast(&d, &ics, &tuple!("R", 9), &Semantics::C, &b()).unwrap());
    }

    #[test]
    fn literal_conjunctions() {
        let q = parse_query("? P(a,c,d), not P(a,b,c)").unwrap();
        assert!(certain_literal_conjunction(&example1(), &fd(), &q, &Semantics::C, &b()).unwrap());
        let d = parse_instance("P(a,c,d)\nP(a,f,d)").unwrap();
        let q = parse_query("? P(a,c,d), not P(a,f,d)").unwrap();
        assert!(!certain_literal_conjunction(&d, &fd(), &q, &Semantics::C, &b()).unwrap());
        assert!(possible_literal_conjunction(&d, &fd(), &q, &Semantics::C, &b()).unwrap());
        let both = parse_query("? P(a,c,d), P(a,f,d)").unwrap();
        assert!(!possible_literal_conjunction(&d, &fd(), &both, &Semantics::C, &b()).unwrap());
        assert!(!possible_literal_conjunction(&d, &fd(), &both, &Semantics::S, &b()).unwrap());
    }

    #[test]
    fn consistent_instance_answers_classically() {
        let d = parse_instance("P(a,c,d)\nP(a,c,e)").unwrap();
        let q = parse_query("? P(x,y,z)").unwrap();
        for sem in [Semantics::S, Semantics::C, Semantics::WeightedC] {
            for mode in [AnswerMode::Certain, AnswerMode::Possible] {
                let a = answers(&d, &fd(), &q, &sem, mode, &b()).unwrap();
                assert_eq!(a, evaluate(&d, &q).unwrap());
            }
        }
    }

    #[test]
    fn display_forms() {
        assert_eq!(AnswerSet::boolean(true).to_string(), "yes\n");
        assert_eq!(AnswerSet::boolean(false).to_string(), "no\n");
        let q = parse_query("? exists z: P(x,y,z), x = a").unwrap();
        assert_eq!(parse_query(&q.to_string()).unwrap(), q);
        let q = parse_query("? P(a,c,d), not P(a,b,c)").unwrap();
        assert_eq!(parse_query(&q.to_string()).unwrap(), q);
    }
}
