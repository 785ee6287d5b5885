//! Denial constraints: representation, satisfaction and minimal violating
//! tuple sets.

use std::collections::{BTreeSet, HashSet};
use std::fmt;
use std::ops::ControlFlow;

use thiserror::Error;

use crate::eval::{Body, TupleIndex};
use crate::model::{Constant, DbTuple, Instance, ModelError, Schema};

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Term {
    Var(String),
    Const(Constant),
}

impl Term {
    pub fn var(name: &str) -> Self {
        Term::Var(name.to_string())
    }

    pub fn as_var(&self) -> Option<&str> {
        match self {
            Term::Var(v) => Some(v),
            Term::Const(_) => None,
        }
    }
}

impl fmt::Display for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Term::Var(v) => f.write_str(v),
            Term::Const(c) => write!(f, "{c}"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Atom {
    pub relation: String,
    pub terms: Vec<Term>,
}

impl Atom {
    pub fn variables(&self) -> impl Iterator<Item = &str> + '_ {
        self.terms.iter().filter_map(Term::as_var)
    }

    /// The ground tuple this atom denotes, if it has no variables.
    pub fn ground(&self) -> Option<DbTuple> {
        let args = self
            .terms
            .iter()
            .map(|t| match t {
                Term::Const(c) => Some(c.clone()),
                Term::Var(_) => None,
            })
            .collect::<Option<Vec<_>>>()?;
        Some(DbTuple::new(&self.relation, args))
    }
}

impl From<&DbTuple> for Atom {
    fn from(t: &DbTuple) -> Self {
        Atom {
            relation: t.relation.to_string(),
            terms: t.args.iter().cloned().map(Term::Const).collect(),
        }
    }
}

impl fmt::Display for Atom {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}(", self.relation)?;
        for (i, t) in self.terms.iter().enumerate() {
            if i > 0 {
                f.write_str(",")?;
            }
            write!(f, "{t}")?;
        }
        f.write_str(")")
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum CmpOp {
    Eq,
    Ne,
    Lt,
    Le,
    Gt,
    Ge,
}

impl CmpOp {
    pub fn holds(self, l: &Constant, r: &Constant) -> bool {
        match self {
            CmpOp::Eq => l == r,
            CmpOp::Ne => l != r,
            CmpOp::Lt => l < r,
            CmpOp::Le => l <= r,
            CmpOp::Gt => l > r,
            CmpOp::Ge => l >= r,
        }
    }

    pub fn symbol(self) -> &'static str {
        match self {
            CmpOp::Eq => "=",
            CmpOp::Ne => "!=",
            CmpOp::Lt => "<",
            CmpOp::Le => "<=",
            CmpOp::Gt => ">",
            CmpOp::Ge => ">=",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Comparison {
    pub lhs: Term,
    pub op: CmpOp,
    pub rhs: Term,
}

impl fmt::Display for Comparison {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} {} {}", self.lhs, self.op.symbol(), self.rhs)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ConstraintError {
    #[error("constraint `{0}` has no atoms")]
    NoAtoms(String),
    #[error("variable `{var}` in constraint `{id}` occurs only in comparisons")]
    UnsafeVariable { id: String, var: String },
    #[error("duplicate constraint id `{0}`")]
    DuplicateId(String),
    #[error(transparent)]
    Schema(#[from] ModelError),
}

/// `forall x. not(A1 and ... and Am and comparisons)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DenialConstraint {
    pub id: String,
    pub atoms: Vec<Atom>,
    pub comparisons: Vec<Comparison>,
}

impl DenialConstraint {
    pub fn new(
        id: &str,
        atoms: Vec<Atom>,
        comparisons: Vec<Comparison>,
    ) -> Result<Self, ConstraintError> {
        if atoms.is_empty() {
            return Err(ConstraintError::NoAtoms(id.to_string()));
        }
        let bound: HashSet<&str> = atoms.iter().flat_map(Atom::variables).collect();
        for c in &comparisons {
            for t in [&c.lhs, &c.rhs] {
                if let Term::Var(v) = t {
                    if !bound.contains(v.as_str()) {
                        return Err(ConstraintError::UnsafeVariable {
                            id: id.to_string(),
                            var: v.clone(),
                        });
                    }
                }
            }
        }
        Ok(DenialConstraint {
            id: id.to_string(),
            atoms,
            comparisons,
        })
    }

    pub fn check_schema(&self, schema: &Schema) -> Result<(), ModelError> {
        for a in &self.atoms {
            let arity = schema
                .arity(&a.relation)
                .ok_or_else(|| ModelError::UnknownRelation(a.relation.clone()))?;
            if arity != a.terms.len() {
                return Err(ModelError::ArityMismatch {
                    relation: a.relation.clone(),
                    expected: arity,
                    found: a.terms.len(),
                });
            }
        }
        Ok(())
    }

    pub(crate) fn body(&self) -> Body {
        Body::new(&self.atoms, &[], &self.comparisons)
    }
}

impl fmt::Display for DenialConstraint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(":- ")?;
        let parts: Vec<String> = self
            .atoms
            .iter()
            .map(ToString::to_string)
            .chain(self.comparisons.iter().map(ToString::to_string))
            .collect();
        write!(f, "{}.", parts.join(", "))
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct ConstraintSet {
    constraints: Vec<DenialConstraint>,
}

impl ConstraintSet {
    pub fn new(constraints: Vec<DenialConstraint>) -> Result<Self, ConstraintError> {
        let mut ids = HashSet::new();
        for c in &constraints {
            if !ids.insert(c.id.as_str()) {
                return Err(ConstraintError::DuplicateId(c.id.clone()));
            }
        }
        Ok(ConstraintSet { constraints })
    }

    pub fn constraints(&self) -> &[DenialConstraint] {
        &self.constraints
    }

    pub fn len(&self) -> usize {
        self.constraints.len()
    }

    pub fn is_empty(&self) -> bool {
        self.constraints.is_empty()
    }

    /// Largest atom count over the set; bounds every hyperedge size.
    pub fn max_atoms(&self) -> usize {
        self.constraints
            .iter()
            .map(|c| c.atoms.len())
            .max()
            .unwrap_or(0)
    }

    pub fn check_schema(&self, schema: &Schema) -> Result<(), ModelError> {
        self.constraints
            .iter()
            .try_for_each(|c| c.check_schema(schema))
    }
}

impl fmt::Display for ConstraintSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for c in &self.constraints {
            writeln!(f, "{c}")?;
        }
        Ok(())
    }
}

/// Keeps only the set-minimal members of `sets`. Each set must be sorted
/// and deduplicated. Subsumption is tested by looking up every proper
/// subset, so the cost is linear in the number of sets for bounded sizes.
pub(crate) fn minimize_sets(mut sets: Vec<Vec<u32>>) -> Vec<Vec<u32>> {
    sets.sort_unstable();
    sets.dedup();
    let Some(longest) = sets.iter().map(Vec::len).max() else {
        return sets;
    };
    // only sets shorter than the longest can be proper subsets of another
    let shorter: HashSet<&[u32]> = sets
        .iter()
        .filter(|s| s.len() < longest)
        .map(Vec::as_slice)
        .collect();
    if shorter.is_empty() {
        return sets;
    }
    let keep: Vec<bool> = sets
        .iter()
        .map(|s| !has_proper_subset_in(s, &shorter))
        .collect();
    sets.into_iter()
        .zip(keep)
        .filter_map(|(s, k)| k.then_some(s))
        .collect()
}

fn has_proper_subset_in(s: &[u32], all: &HashSet<&[u32]>) -> bool {
    let n = s.len();
    if n <= 1 {
        return false;
    }
    if n > 20 {
        return all
            .iter()
            .any(|o| o.len() < n && o.iter().all(|v| s.binary_search(v).is_ok()));
    }
    let full = (1u32 << n) - 1;
    let mut buf = Vec::with_capacity(n);
    (1..full).any(|mask| {
        buf.clear();
        buf.extend((0..n).filter(|i| mask & (1 << i) != 0).map(|i| s[i]));
        all.contains(buf.as_slice())
    })
}

/// Images (sorted id sets) of all satisfying assignments of `c`'s body,
/// optionally with one atom pinned to a given tuple. Not minimized.
pub(crate) fn violation_images(
    index: &TupleIndex,
    c: &DenialConstraint,
    alive: &dyn Fn(u32) -> bool,
    pinned: Option<(usize, u32)>,
) -> HashSet<Vec<u32>> {
    let body = c.body();
    let mut images = HashSet::new();
    let _ = body.for_each_match::<()>(index, alive, pinned, &mut |_, image| {
        let mut s = image.to_vec();
        s.sort_unstable();
        s.dedup();
        images.insert(s);
        ControlFlow::Continue(())
    });
    images
}

/// Violation images of `c` that involve at least one tuple from `focus`.
pub(crate) fn violation_images_touching(
    index: &TupleIndex,
    c: &DenialConstraint,
    alive: &dyn Fn(u32) -> bool,
    focus: &[u32],
) -> HashSet<Vec<u32>> {
    let body = c.body();
    let mut images = HashSet::new();
    for &id in focus {
        if !alive(id) {
            continue;
        }
        let rel = &index.tuple(id).relation;
        for ai in 0..body.atom_count() {
            if body.atom_relation(ai) != &**rel {
                continue;
            }
            let _ = body.for_each_match::<()>(index, alive, Some((ai, id)), &mut |_, image| {
                let mut s = image.to_vec();
                s.sort_unstable();
                s.dedup();
                images.insert(s);
                ControlFlow::Continue(())
            });
        }
    }
    images
}

/// True if some assignment satisfies the body of a constraint in `ics`.
pub(crate) fn has_violation(
    index: &TupleIndex,
    ics: &ConstraintSet,
    alive: &dyn Fn(u32) -> bool,
) -> bool {
    ics.constraints().iter().any(|c| {
        c.body()
            .for_each_match(index, alive, None, &mut |_, _| ControlFlow::Break(()))
            .is_break()
    })
}

/// All set-minimal tuple sets of `instance` that jointly violate `c`.
pub fn violating_sets(instance: &Instance, c: &DenialConstraint) -> BTreeSet<BTreeSet<DbTuple>> {
    let index = TupleIndex::new(instance);
    let images = violation_images(&index, c, &|_| true, None);
    minimize_sets(images.into_iter().collect())
        .into_iter()
        .map(|s| s.into_iter().map(|id| index.tuple(id).clone()).collect())
        .collect()
}

/// `D |= IC`.
pub fn is_consistent(instance: &Instance, ics: &ConstraintSet) -> bool {
    let index = TupleIndex::new(instance);
    !has_violation(&index, ics, &|_| true)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::syntax::parse_constraint;
    use crate::tuple;

    fn fd() -> DenialConstraint {
        parse_constraint(":- P(x,y,z), P(x,u,w), y != u.").unwrap()
    }

    fn example1() -> Instance {
        Instance::from_tuples([
            tuple!("P", "a", "b", "c"),
            tuple!("P", "a", "c", "d"),
            tuple!("P", "a", "c", "e"),
        ])
        .unwrap()
    }

    fn set(ts: &[DbTuple]) -> BTreeSet<DbTuple> {
        ts.iter().cloned().collect()
    }

    #[test]
    fn example1_fd_conflicts() {
        let v = violating_sets(&example1(), &fd());
        let expected = BTreeSet::from([
            set(&[tuple!("P", "a", "b", "c"), tuple!("P", "a", "c", "d")]),
            set(&[tuple!("P", "a", "b", "c"), tuple!("P", "a", "c", "e")]),
        ]);
        assert_eq!(v, expected);
        let ics = ConstraintSet::new(vec![fd()]).unwrap();
        assert!(!is_consistent(&example1(), &ics));
    }

    #[test]
    fn consistent_instances() {
        let ics = ConstraintSet::new(vec![fd()]).unwrap();
        let d2 = Instance::from_tuples([tuple!("P", "a", "c", "d"), tuple!("P", "a", "c", "e")])
            .unwrap();
        assert!(violating_sets(&d2, &fd()).is_empty());
        assert!(is_consistent(&d2, &ics));
        assert!(is_consistent(&Instance::default(), &ics));
    }

    #[test]
    fn cross_relation_denial() {
        let c = parse_constraint(":- R(x), S(y).").unwrap();
        let d = Instance::from_tuples([tuple!("R", 1), tuple!("R", 2), tuple!("S", 0)]).unwrap();
        let expected = BTreeSet::from([
            set(&[tuple!("R", 1), tuple!("S", 0)]),
            set(&[tuple!("R", 2), tuple!("S", 0)]),
        ]);
        assert_eq!(violating_sets(&d, &c), expected);
    }

    #[test]
    fn self_contradictory_comparison_never_fires() {
        let c = parse_constraint(":- P(x), x < x.").unwrap();
        let d = Instance::from_tuples([tuple!("P", 1), tuple!("P", 2)]).unwrap();
        assert!(violating_sets(&d, &c).is_empty());
    }

    #[test]
    fn single_atom_denial_gives_singletons() {
        let c = parse_constraint(":- P(x, 1).").unwrap();
        let d = Instance::from_tuples([tuple!("P", 1, 1), tuple!("P", 2, 0)]).unwrap();
        assert_eq!(
            violating_sets(&d, &c),
            BTreeSet::from([set(&[tuple!("P", 1, 1)])])
        );
    }

    #[test]
    fn atoms_may_share_a_tuple() {
        // P(x,y), P(y,x) with x = y collapses to a single tuple
        let c = parse_constraint(":- P(x,y), P(y,x).").unwrap();
        let d = Instance::from_tuples([tuple!("P", 1, 1), tuple!("P", 1, 2), tuple!("P", 2, 1)])
            .unwrap();
        let v = violating_sets(&d, &c);
        assert_eq!(
            v,
            BTreeSet::from([
                set(&[tuple!("P", 1, 1)]),
                set(&[tuple!("P", 1, 2), tuple!("P", 2, 1)]),
            ])
        );
    }

    #[test]
    fn non_minimal_images_are_dropped() {
        // images are {R(1)} and {R(1),R(5)}; the second is subsumed
        let c = parse_constraint(":- R(x), R(y), x <= 1.").unwrap();
        let d = Instance::from_tuples([tuple!("R", 1), tuple!("R", 5)]).unwrap();
        assert_eq!(
            violating_sets(&d, &c),
            BTreeSet::from([set(&[tuple!("R", 1)])])
        );
    }

    #[test]
    fn unsafe_and_empty_constraints_rejected() {
        let atoms = vec![Atom {
            relation: "P".into(),
            terms: vec![Term::var("x")],
        }];
        let cmp = vec![Comparison {
            lhs: Term::var("y"),
            op: CmpOp::Lt,
            rhs: Term::Const(Constant::Int(3)),
        }];
        assert!(matches!(
            DenialConstraint::new("c", atoms, cmp),
            Err(ConstraintError::UnsafeVariable { .. })
        ));
        assert!(matches!(
            DenialConstraint::new("c", vec![], vec![]),
            Err(ConstraintError::NoAtoms(_))
        ));
        assert!(ConstraintSet::new(vec![fd(), fd()]).is_err());
    }

    #[test]
    fn schema_check() {
        let mut s = Schema::new();
        s.add_relation("P", vec!["x".into(), "y".into()]).unwrap();
        assert!(fd().check_schema(&s).is_err());
        s.ensure_relation("R", 1).unwrap();
        assert!(parse_constraint(":- R(x).")
            .unwrap()
            .check_schema(&s)
            .is_ok());
    }
}
