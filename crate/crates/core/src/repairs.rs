//! Repair semantics: subset-maximal (S), cardinality (C), weighted
//! cardinality (WC) and bounded attribute-change (A) repairs.

use std::cmp::Reverse;
use std::collections::{BTreeMap, BTreeSet, BinaryHeap};
use std::fmt;

use thiserror::Error;

use crate::denial::{violation_images, violation_images_touching, ConstraintSet};
use crate::eval::TupleIndex;
use crate::hypergraph::{build_conflict_hypergraph, ConflictHypergraph, VertexSet};
use crate::model::{Constant, DbTuple, Instance, Weight};
use crate::solve::{self, SolveBudget, SolveError};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum RepairError {
    #[error("no combination of candidate values restores consistency")]
    NoRepair,
    #[error(transparent)]
    Solve(#[from] SolveError),
}

/// Cost of one attribute change.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub enum WeightFn {
    /// Every change costs 1, so the total is the number of changed cells.
    #[default]
    Unit,
    /// `alpha_A * (old - new)^2` for integer cells, with `alpha_A` looked
    /// up per `(relation, attribute index)` and defaulting to 1. A change
    /// involving a symbol costs `alpha_A`.
    Quadratic {
        coefficients: BTreeMap<(String, usize), Weight>,
    },
}

impl WeightFn {
    pub fn quadratic() -> Self {
        WeightFn::Quadratic {
            coefficients: BTreeMap::new(),
        }
    }

    pub fn cost(&self, relation: &str, attribute: usize, old: &Constant, new: &Constant) -> Weight {
        match self {
            WeightFn::Unit => Weight::ONE,
            WeightFn::Quadratic { coefficients } => {
                let alpha = coefficients
                    .get(&(relation.to_string(), attribute))
                    .copied()
                    .unwrap_or(Weight::ONE);
                match (old.as_int(), new.as_int()) {
                    (Some(a), Some(b)) => {
                        let d = (a as i128 - b as i128).unsigned_abs();
                        // clamp so that sums of a few thousand costs stay in range
                        let sq = d.saturating_mul(d).min(1 << 40) as i64;
                        alpha * Weight::integer(sq)
                    }
                    _ => alpha,
                }
            }
        }
    }
}

/// Parameters of bounded attribute-change repairs: the fixed candidate
/// values, the per-change cost, and a cap on explored search states.
/// Costs are aggregated by summation.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BoundedASpec {
    pub candidates: Vec<Constant>,
    pub weight_fn: WeightFn,
    pub max_states: usize,
}

impl BoundedASpec {
    pub fn new(candidates: Vec<Constant>, weight_fn: WeightFn) -> Self {
        let mut candidates = candidates;
        candidates.sort();
        candidates.dedup();
        BoundedASpec {
            candidates,
            weight_fn,
            max_states: 2_000_000,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Semantics {
    S,
    C,
    WeightedC,
    BoundedA(BoundedASpec),
}

impl fmt::Display for Semantics {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Semantics::S => "S",
            Semantics::C => "C",
            Semantics::WeightedC => "WC",
            Semantics::BoundedA(_) => "A",
        })
    }
}

/// A deletion-only repair.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TupleRepair {
    pub retained: BTreeSet<DbTuple>,
    pub deleted: BTreeSet<DbTuple>,
    /// Number of deleted tuples, or their total weight under WC.
    pub distance: Weight,
}

impl TupleRepair {
    /// The repair as an instance, keeping the original weights.
    pub fn to_instance(&self, original: &Instance) -> Instance {
        original.filter(|t| self.retained.contains(t))
    }
}

impl fmt::Display for TupleRepair {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let join = |s: &BTreeSet<DbTuple>| {
            s.iter()
                .map(ToString::to_string)
                .collect::<Vec<_>>()
                .join(" ")
        };
        writeln!(f, "retained: {}", join(&self.retained))?;
        writeln!(f, "deleted: {}", join(&self.deleted))?;
        writeln!(f, "distance: {}", self.distance)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct CellChange {
    pub tuple: DbTuple,
    pub attribute: usize,
    pub new_value: Constant,
}

impl fmt::Display for CellChange {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "change {} attr {} -> {}",
            self.tuple, self.attribute, self.new_value
        )
    }
}

/// An attribute-change repair: the change map, its aggregated cost and the
/// resulting instance.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ARepair {
    pub changes: Vec<CellChange>,
    pub cost: Weight,
    pub result: Instance,
}

impl fmt::Display for ARepair {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for c in &self.changes {
            writeln!(f, "{c}")?;
        }
        writeln!(f, "distance: {}", self.cost)
    }
}

/// Repairs of either kind, as returned by [`repairs`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum RepairList {
    Tuple(Vec<TupleRepair>),
    Attribute(Vec<ARepair>),
}

impl RepairList {
    pub fn len(&self) -> usize {
        match self {
            RepairList::Tuple(r) => r.len(),
            RepairList::Attribute(r) => r.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

/// Independent sets of the conflict hypergraph that correspond to the
/// repairs of a tuple-based semantics.
pub(crate) fn repair_vertex_sets(
    h: &ConflictHypergraph,
    instance: &Instance,
    sem: &Semantics,
    budget: &SolveBudget,
) -> Result<Vec<VertexSet>, RepairError> {
    let g = h.graph();
    Ok(match sem {
        Semantics::S => solve::enumerate_maximal_is(g, budget)?,
        Semantics::C => solve::enumerate_maximum_is(g, budget)?,
        Semantics::WeightedC => solve::enumerate_max_weight_is(
            g,
            |v| instance.weight(h.tuple(v)).unwrap_or_default(),
            budget,
        )?,
        Semantics::BoundedA(_) => panic!("attribute repairs have no vertex-set form"),
    })
}

fn tuple_repairs(
    instance: &Instance,
    ics: &ConstraintSet,
    sem: &Semantics,
    budget: &SolveBudget,
) -> Result<Vec<TupleRepair>, RepairError> {
    let h = build_conflict_hypergraph(instance, ics);
    let sets = repair_vertex_sets(&h, instance, sem, budget)?;
    let mut out: Vec<TupleRepair> = sets
        .iter()
        .map(|s| {
            let retained = h.to_tuples(s);
            let deleted: BTreeSet<DbTuple> = instance
                .tuples()
                .filter(|t| !retained.contains(t))
                .cloned()
                .collect();
            let distance = match sem {
                Semantics::WeightedC => deleted
                    .iter()
                    .map(|t| instance.weight(t).unwrap_or_default())
                    .sum(),
                _ => Weight::from(deleted.len()),
            };
            TupleRepair {
                retained,
                deleted,
                distance,
            }
        })
        .collect();
    out.sort_by(|a, b| a.retained.cmp(&b.retained));
    Ok(out)
}

/// S-repairs: maximal consistent subsets.
pub fn s_repairs(
    instance: &Instance,
    ics: &ConstraintSet,
    budget: &SolveBudget,
) -> Result<Vec<TupleRepair>, RepairError> {
    tuple_repairs(instance, ics, &Semantics::S, budget)
}

/// C-repairs: maximum-cardinality consistent subsets.
pub fn c_repairs(
    instance: &Instance,
    ics: &ConstraintSet,
    budget: &SolveBudget,
) -> Result<Vec<TupleRepair>, RepairError> {
    tuple_repairs(instance, ics, &Semantics::C, budget)
}

/// Weighted C-repairs: consistent subsets of minimum deleted weight.
pub fn wc_repairs(
    instance: &Instance,
    ics: &ConstraintSet,
    budget: &SolveBudget,
) -> Result<Vec<TupleRepair>, RepairError> {
    tuple_repairs(instance, ics, &Semantics::WeightedC, budget)
}

/// Repairs under any semantics.
pub fn repairs(
    instance: &Instance,
    ics: &ConstraintSet,
    sem: &Semantics,
    budget: &SolveBudget,
) -> Result<RepairList, RepairError> {
    match sem {
        Semantics::BoundedA(spec) => Ok(RepairList::Attribute(a_repairs_bounded(
            instance, ics, spec,
        )?)),
        _ => Ok(RepairList::Tuple(tuple_repairs(
            instance, ics, sem, budget,
        )?)),
    }
}

/// All minimum-cost attribute-change repairs whose new values come from
/// `spec.candidates`.
pub fn a_repairs_bounded(
    instance: &Instance,
    ics: &ConstraintSet,
    spec: &BoundedASpec,
) -> Result<Vec<ARepair>, RepairError> {
    ASearch::new(instance, ics, spec, None).run()
}

/// As [`a_repairs_bounded`], for an instance obtained from the consistent
/// `reference` by a few changes: every violation must then involve a tuple
/// outside `reference`, so only those tuples are used as join seeds.
pub(crate) fn a_repairs_near(
    instance: &Instance,
    reference: &Instance,
    ics: &ConstraintSet,
    spec: &BoundedASpec,
) -> Result<Vec<ARepair>, RepairError> {
    ASearch::new(instance, ics, spec, Some(reference)).run()
}

/// Uniform-cost search over change maps. A change map is a list of
/// (cell, option) pairs with strictly increasing cells, so each map is
/// generated once. Once the search moves past every changeable cell of a
/// tuple, that tuple is frozen; a violation made only of frozen tuples
/// can never be removed and prunes the branch.
struct ASearch<'a> {
    ics: &'a ConstraintSet,
    spec: &'a BoundedASpec,
    reference: Option<&'a Instance>,
    tuples: Vec<(DbTuple, Weight)>,
    cells: Vec<(usize, usize)>,
    options: Vec<Vec<(Constant, Weight)>>,
    /// Last cell index with at least one option, per tuple.
    last_changeable: Vec<Option<usize>>,
}

type ChangeMap = Vec<(usize, usize)>;

enum Verdict {
    Consistent,
    Dead,
    Open,
}

impl<'a> ASearch<'a> {
    fn new(
        instance: &'a Instance,
        ics: &'a ConstraintSet,
        spec: &'a BoundedASpec,
        reference: Option<&'a Instance>,
    ) -> Self {
        let tuples: Vec<(DbTuple, Weight)> = instance
            .weighted_tuples()
            .map(|(t, w)| (t.clone(), w))
            .collect();
        let mut cells = Vec::new();
        let mut options = Vec::new();
        let mut last_changeable = vec![None; tuples.len()];
        for (ti, (t, _)) in tuples.iter().enumerate() {
            for (ai, old) in t.args.iter().enumerate() {
                let opts: Vec<(Constant, Weight)> = spec
                    .candidates
                    .iter()
                    .filter(|c| *c != old)
                    .map(|c| (c.clone(), spec.weight_fn.cost(&t.relation, ai, old, c)))
                    .collect();
                if opts.is_empty() {
                    continue;
                }
                last_changeable[ti] = Some(cells.len());
                cells.push((ti, ai));
                options.push(opts);
            }
        }
        ASearch {
            ics,
            spec,
            reference,
            tuples,
            cells,
            options,
            last_changeable,
        }
    }

    fn changed_tuples(&self, map: &ChangeMap) -> Vec<DbTuple> {
        let mut out: Vec<DbTuple> = self.tuples.iter().map(|(t, _)| t.clone()).collect();
        for &(ci, oi) in map {
            let (ti, ai) = self.cells[ci];
            out[ti].args[ai] = self.options[ci][oi].0.clone();
        }
        out
    }

    fn judge(&self, map: &ChangeMap) -> Verdict {
        let changed = self.changed_tuples(map);
        let mut index = TupleIndex::default();
        let ids: Vec<u32> = changed.iter().map(|t| index.push(t.clone())).collect();
        let frontier = map.last().map(|&(ci, _)| ci);
        let mut frozen = vec![true; index.len()];
        for (ti, &id) in ids.iter().enumerate() {
            let movable = match (self.last_changeable[ti], frontier) {
                (None, _) => false,
                (Some(_), None) => true,
                (Some(last), Some(f)) => last > f,
            };
            if movable {
                frozen[id as usize] = false;
            }
        }
        let focus: Option<Vec<u32>> = self.reference.map(|r| {
            (0..index.len() as u32)
                .filter(|&id| !r.contains(index.tuple(id)))
                .collect()
        });
        let mut violated = false;
        for c in self.ics.constraints() {
            let images = match &focus {
                Some(f) => violation_images_touching(&index, c, &|_| true, f),
                None => violation_images(&index, c, &|_| true, None),
            };
            for img in images {
                violated = true;
                if img.iter().all(|&id| frozen[id as usize]) {
                    return Verdict::Dead;
                }
            }
        }
        if violated {
            Verdict::Open
        } else {
            Verdict::Consistent
        }
    }

    fn cost(&self, map: &ChangeMap) -> Weight {
        map.iter().map(|&(ci, oi)| self.options[ci][oi].1).sum()
    }

    fn to_repair(&self, map: &ChangeMap, cost: Weight) -> ARepair {
        let changed = self.changed_tuples(map);
        let mut changes: Vec<CellChange> = map
            .iter()
            .map(|&(ci, oi)| {
                let (ti, ai) = self.cells[ci];
                CellChange {
                    tuple: self.tuples[ti].0.clone(),
                    attribute: ai,
                    new_value: self.options[ci][oi].0.clone(),
                }
            })
            .collect();
        changes.sort();
        let mut result = Instance::new(Default::default());
        for (t, (_, w)) in changed.into_iter().zip(&self.tuples) {
            // schema is inferred from the tuples; arities are unchanged
            result
                .schema_mut()
                .ensure_relation(&t.relation, t.args.len())
                .expect("arity preserved");
            result.insert_weighted(t, *w).expect("positive weight");
        }
        ARepair {
            changes,
            cost,
            result,
        }
    }

    fn run(&self) -> Result<Vec<ARepair>, RepairError> {
        let mut heap: BinaryHeap<Reverse<(Weight, ChangeMap)>> = BinaryHeap::new();
        heap.push(Reverse((Weight::ZERO, Vec::new())));
        let mut best: Option<Weight> = None;
        let mut found: Vec<(ChangeMap, Weight)> = Vec::new();
        let mut states = 0usize;
        while let Some(Reverse((cost, map))) = heap.pop() {
            if best.is_some_and(|b| cost > b) {
                break;
            }
            states += 1;
            if states > self.spec.max_states {
                return Err(SolveError::BudgetExceeded(format!(
                    "more than {} attribute-repair states",
                    self.spec.max_states
                ))
                .into());
            }
            match self.judge(&map) {
                Verdict::Consistent => {
                    best = Some(cost);
                    found.push((map, cost));
                }
                Verdict::Dead => {}
                Verdict::Open if best.is_none() => {
                    let start = map.last().map_or(0, |&(ci, _)| ci + 1);
                    for ci in start..self.cells.len() {
                        for oi in 0..self.options[ci].len() {
                            let mut child = map.clone();
                            child.push((ci, oi));
                            let c = self.cost(&child);
                            heap.push(Reverse((c, child)));
                        }
                    }
                }
                Verdict::Open => {}
            }
        }
        if found.is_empty() {
            return Err(RepairError::NoRepair);
        }
        let mut out: Vec<ARepair> = found.iter().map(|(m, c)| self.to_repair(m, *c)).collect();
        out.sort_by(|a, b| a.changes.cmp(&b.changes));
        Ok(out)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::denial::is_consistent;
    use crate::syntax::{parse_constraints, parse_instance};
    use crate::tuple;

    fn fd() -> ConstraintSet {
        parse_constraints(":- P(x,y,z), P(x,u,w), y != u.").unwrap()
    }

    fn example1() -> Instance {
        parse_instance("P(a,b,c)\nP(a,c,d)\nP(a,c,e)").unwrap()
    }

    fn set(ts: &[DbTuple]) -> BTreeSet<DbTuple> {
        ts.iter().cloned().collect()
    }

    fn b() -> SolveBudget {
        SolveBudget::default()
    }

    #[test]
    fn example1_repairs() {
        let s = s_repairs(&example1(), &fd(), &b()).unwrap();
        assert_eq!(s.len(), 2);
        assert_eq!(s[0].retained, set(&[tuple!("P", "a", "b", "c")]));
        assert_eq!(
            s[1].retained,
            set(&[tuple!("P", "a", "c", "d"), tuple!("P", "a", "c", "e")])
        );
        let c = c_repairs(&example1(), &fd(), &b()).unwrap();
        assert_eq!(c.len(), 1);
        assert_eq!(c[0].retained, s[1].retained);
        assert_eq!(c[0].distance, Weight::ONE);
        assert_eq!(c[0].deleted, set(&[tuple!("P", "a", "b", "c")]));
    }

    #[test]
    fn consistent_instance_is_its_own_repair() {
        let d = parse_instance("P(a,c,d)\nP(a,c,e)").unwrap();
        for r in [s_repairs(&d, &fd(), &b()), c_repairs(&d, &fd(), &b())] {
            let r = r.unwrap();
            assert_eq!(r.len(), 1);
            assert_eq!(r[0].retained, d.tuple_set());
            assert_eq!(r[0].distance, Weight::ZERO);
        }
    }

    #[test]
    fn weighted_repairs() {
        let d = parse_instance("S(0) @ 10\nR(1)\nR(2)\nR(3)").unwrap();
        let ics = parse_constraints(":- R(x), S(y).").unwrap();
        let r = wc_repairs(&d, &ics, &b()).unwrap();
        assert_eq!(r.len(), 1);
        assert_eq!(r[0].retained, set(&[tuple!("S", 0)]));
        assert_eq!(r[0].distance, Weight::integer(3));

        let d = parse_instance("P(1) @ 2\nP(2)").unwrap();
        let ics = parse_constraints(":- P(x), P(y), x < y.").unwrap();
        let r = wc_repairs(&d, &ics, &b()).unwrap();
        assert_eq!(r.len(), 1);
        assert_eq!(r[0].deleted, set(&[tuple!("P", 2)]));

        let unit = parse_instance("P(1)\nP(2)\nP(3)").unwrap();
        let wc = wc_repairs(&unit, &ics, &b()).unwrap();
        let c = c_repairs(&unit, &ics, &b()).unwrap();
        assert_eq!(wc, c);
    }

    #[test]
    fn example1_attribute_repair() {
        let spec = BoundedASpec::new(vec![Constant::sym("b"), Constant::sym("c")], WeightFn::Unit);
        let reps = a_repairs_bounded(&example1(), &fd(), &spec).unwrap();
        assert!(reps.iter().all(|r| r.cost == Weight::ONE));
        let want = CellChange {
            tuple: tuple!("P", "a", "b", "c"),
            attribute: 1,
            new_value: Constant::sym("c"),
        };
        let r = reps
            .iter()
            .find(|r| r.changes == vec![want.clone()])
            .unwrap();
        assert_eq!(
            r.result.tuple_set(),
            set(&[
                tuple!("P", "a", "c", "c"),
                tuple!("P", "a", "c", "d"),
                tuple!("P", "a", "c", "e")
            ])
        );
        assert_eq!(want.to_string(), "change P(a,b,c) attr 1 -> c");
        for r in &reps {
            assert!(is_consistent(&r.result, &fd()));
        }
    }

    #[test]
    fn attribute_repair_edge_cases() {
        let d = parse_instance("P(a,c,d)").unwrap();
        let spec = BoundedASpec::new(vec![Constant::sym("b")], WeightFn::Unit);
        let reps = a_repairs_bounded(&d, &fd(), &spec).unwrap();
        assert_eq!(reps.len(), 1);
        assert!(reps[0].changes.is_empty());
        assert_eq!(reps[0].cost, Weight::ZERO);

        let d = parse_instance("P(2)").unwrap();
        let ics = parse_constraints(":- P(x), x != 3.").unwrap();
        let spec = BoundedASpec::new(vec![Constant::Int(3)], WeightFn::quadratic());
        let reps = a_repairs_bounded(&d, &ics, &spec).unwrap();
        assert_eq!(reps.len(), 1);
        assert_eq!(reps[0].cost, Weight::ONE);
        assert_eq!(reps[0].result.tuple_set(), set(&[tuple!("P", 3)]));

        let spec = BoundedASpec::new(vec![Constant::Int(5)], WeightFn::quadratic());
        assert_eq!(
            a_repairs_bounded(&d, &ics, &spec),
            Err(RepairError::NoRepair)
        );
    }

    #[test]
    fn quadratic_costs() {
        let mut coefficients = BTreeMap::new();
        coefficients.insert(("P".to_string(), 0), Weight::new(1, 2));
        let w = WeightFn::Quadratic { coefficients };
        assert_eq!(
            w.cost("P", 0, &Constant::Int(1), &Constant::Int(4)),
            Weight::new(9, 2)
        );
        assert_eq!(
            w.cost("P", 1, &Constant::Int(1), &Constant::Int(4)),
            Weight::integer(9)
        );
        assert_eq!(
            w.cost("P", 0, &Constant::sym("a"), &Constant::Int(4)),
            Weight::new(1, 2)
        );
    }

    #[test]
    fn repair_dump_format() {
        let c = c_repairs(&example1(), &fd(), &b()).unwrap();
        assert_eq!(
            c[0].to_string(),
            "retained: P(a,c,d) P(a,c,e)\ndeleted: P(a,b,c)\ndistance: 1\n"
        );
    }
}
