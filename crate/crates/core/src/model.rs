//! Schema, constants, tuples, instances and update sequences.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt;
use std::iter::Sum;
use std::ops::{Add, Sub};
use std::sync::Arc;

use num_rational::Ratio;
use num_traits::{ToPrimitive, Zero};
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ModelError {
    #[error("unknown relation `{0}`")]
    UnknownRelation(String),
    #[error("relation `{relation}` has arity {expected}, got {found} arguments")]
    ArityMismatch {
        relation: String,
        expected: usize,
        found: usize,
    },
    #[error("relation `{0}` declared twice")]
    DuplicateRelation(String),
    #[error("relation `{relation}` repeats attribute `{attribute}`")]
    DuplicateAttribute { relation: String, attribute: String },
    #[error("relation `{0}` must have arity at least 1")]
    ZeroArity(String),
    #[error("weight {0} is not positive")]
    NonPositiveWeight(Weight),
    #[error("attribute index {index} out of range for `{tuple}`")]
    AttributeOutOfRange { tuple: DbTuple, index: usize },
    #[error("change target `{0}` is not in the instance")]
    ChangeTargetMissing(DbTuple),
    #[error("delete target `{0}` is not in the instance")]
    DeleteTargetMissing(DbTuple),
}

/// A domain value. Integers order numerically, symbols lexicographically,
/// and every integer sorts before every symbol.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Constant {
    Int(i64),
    Sym(Arc<str>),
}

impl Constant {
    pub fn sym(s: &str) -> Self {
        Constant::Sym(Arc::from(s))
    }

    pub fn as_int(&self) -> Option<i64> {
        match self {
            Constant::Int(i) => Some(*i),
            Constant::Sym(_) => None,
        }
    }
}

impl From<i64> for Constant {
    fn from(v: i64) -> Self {
        Constant::Int(v)
    }
}

impl From<&str> for Constant {
    fn from(s: &str) -> Self {
        Constant::sym(s)
    }
}

/// Identifiers read as variables inside constraints and queries: a leading
/// uppercase letter or underscore, or one of `u`..`z` followed only by
/// digits and underscores (`x`, `y1`, `z_2`).
pub fn is_variable_name(s: &str) -> bool {
    let mut chars = s.chars();
    match chars.next() {
        Some(c) if c.is_ascii_uppercase() || c == '_' => true,
        Some(c) if ('u'..='z').contains(&c) => chars.all(|c| c.is_ascii_digit() || c == '_'),
        _ => false,
    }
}

fn is_plain_symbol(s: &str) -> bool {
    let mut chars = s.chars();
    match chars.next() {
        Some(c) if c.is_ascii_alphabetic() => {
            chars.all(|c| c.is_ascii_alphanumeric() || c == '_') && !is_variable_name(s)
        }
        _ => false,
    }
}

impl fmt::Display for Constant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Constant::Int(i) => write!(f, "{i}"),
            Constant::Sym(s) if is_plain_symbol(s) => f.write_str(s),
            Constant::Sym(s) => {
                f.write_str("\"")?;
                for c in s.chars() {
                    match c {
                        '"' => f.write_str("\\\"")?,
                        '\\' => f.write_str("\\\\")?,
                        c => write!(f, "{c}")?,
                    }
                }
                f.write_str("\"")
            }
        }
    }
}

/// Exact positive rational tuple weight.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Weight(Ratio<i64>);

impl Weight {
    pub const ONE: Weight = Weight(Ratio::new_raw(1, 1));
    pub const ZERO: Weight = Weight(Ratio::new_raw(0, 1));

    pub fn new(numer: i64, denom: i64) -> Self {
        Weight(Ratio::new(numer, denom))
    }

    pub fn integer(v: i64) -> Self {
        Weight(Ratio::from_integer(v))
    }

    pub fn ratio(self) -> Ratio<i64> {
        self.0
    }

    pub fn is_positive(self) -> bool {
        self.0 > Ratio::zero()
    }

    pub fn to_f64(self) -> f64 {
        self.0.to_f64().unwrap_or(f64::NAN)
    }
}

impl Default for Weight {
    fn default() -> Self {
        Weight::ONE
    }
}

impl From<usize> for Weight {
    fn from(v: usize) -> Self {
        Weight::integer(v as i64)
    }
}

impl Add for Weight {
    type Output = Weight;
    fn add(self, rhs: Weight) -> Weight {
        Weight(self.0 + rhs.0)
    }
}

impl Sub for Weight {
    type Output = Weight;
    fn sub(self, rhs: Weight) -> Weight {
        Weight(self.0 - rhs.0)
    }
}

impl std::ops::Mul for Weight {
    type Output = Weight;
    fn mul(self, rhs: Weight) -> Weight {
        Weight(self.0 * rhs.0)
    }
}

impl Sum for Weight {
    fn sum<I: Iterator<Item = Weight>>(iter: I) -> Weight {
        iter.fold(Weight::ZERO, |a, b| a + b)
    }
}

impl fmt::Display for Weight {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_integer() {
            write!(f, "{}", self.0.numer())
        } else {
            write!(f, "{}/{}", self.0.numer(), self.0.denom())
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Relation {
    pub name: String,
    pub arity: usize,
    pub attributes: Vec<String>,
}

impl fmt::Display for Relation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "relation {}/{} ({})",
            self.name,
            self.arity,
            self.attributes.join(",")
        )
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Schema {
    relations: Vec<Relation>,
    index: HashMap<String, usize>,
}

impl Schema {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn add_relation(&mut self, name: &str, attributes: Vec<String>) -> Result<(), ModelError> {
        if self.index.contains_key(name) {
            return Err(ModelError::DuplicateRelation(name.to_string()));
        }
        if attributes.is_empty() {
            return Err(ModelError::ZeroArity(name.to_string()));
        }
        let mut seen = BTreeSet::new();
        for a in &attributes {
            if !seen.insert(a.as_str()) {
                return Err(ModelError::DuplicateAttribute {
                    relation: name.to_string(),
                    attribute: a.clone(),
                });
            }
        }
        self.index.insert(name.to_string(), self.relations.len());
        self.relations.push(Relation {
            name: name.to_string(),
            arity: attributes.len(),
            attributes,
        });
        Ok(())
    }

    /// Declares `name` with default attribute names `a0..` unless it already
    /// exists with the same arity.
    pub fn ensure_relation(&mut self, name: &str, arity: usize) -> Result<(), ModelError> {
        match self.arity(name) {
            Some(a) if a == arity => Ok(()),
            Some(a) => Err(ModelError::ArityMismatch {
                relation: name.to_string(),
                expected: a,
                found: arity,
            }),
            None => self.add_relation(name, (0..arity).map(|i| format!("a{i}")).collect()),
        }
    }

    pub fn relation(&self, name: &str) -> Option<&Relation> {
        self.index.get(name).map(|&i| &self.relations[i])
    }

    pub fn arity(&self, name: &str) -> Option<usize> {
        self.relation(name).map(|r| r.arity)
    }

    pub fn relations(&self) -> &[Relation] {
        &self.relations
    }

    pub fn max_arity(&self) -> usize {
        self.relations.iter().map(|r| r.arity).max().unwrap_or(0)
    }

    pub fn check_tuple(&self, t: &DbTuple) -> Result<(), ModelError> {
        let arity = self
            .arity(&t.relation)
            .ok_or_else(|| ModelError::UnknownRelation(t.relation.to_string()))?;
        if arity != t.args.len() {
            return Err(ModelError::ArityMismatch {
                relation: t.relation.to_string(),
                expected: arity,
                found: t.args.len(),
            });
        }
        Ok(())
    }
}

/// A ground atom `R(c1,...,cn)`.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct DbTuple {
    pub relation: Arc<str>,
    pub args: Vec<Constant>,
}

impl DbTuple {
    pub fn new(relation: &str, args: Vec<Constant>) -> Self {
        DbTuple {
            relation: Arc::from(relation),
            args,
        }
    }

    /// Copy of this tuple with `args[index] = value`.
    pub fn with_arg(&self, index: usize, value: Constant) -> Self {
        let mut args = self.args.clone();
        args[index] = value;
        DbTuple {
            relation: self.relation.clone(),
            args,
        }
    }
}

impl fmt::Display for DbTuple {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}(", self.relation)?;
        for (i, a) in self.args.iter().enumerate() {
            if i > 0 {
                f.write_str(",")?;
            }
            write!(f, "{a}")?;
        }
        f.write_str(")")
    }
}

/// Shorthand for building tuples in tests and examples: `tuple!("P", "a", 1)`.
#[macro_export]
macro_rules! tuple {
    ($rel:expr $(, $arg:expr)* $(,)?) => {
        $crate::model::DbTuple::new($rel, vec![$($crate::model::Constant::from($arg)),*])
    };
}

/// A finite set of weighted tuples over a schema.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Instance {
    schema: Schema,
    tuples: BTreeMap<DbTuple, Weight>,
}

impl Instance {
    pub fn new(schema: Schema) -> Self {
        Instance {
            schema,
            tuples: BTreeMap::new(),
        }
    }

    /// Builds an instance whose schema is inferred from the tuples.
    pub fn from_tuples<I: IntoIterator<Item = DbTuple>>(tuples: I) -> Result<Self, ModelError> {
        let mut inst = Instance::default();
        for t in tuples {
            inst.schema.ensure_relation(&t.relation, t.args.len())?;
            inst.insert(t)?;
        }
        Ok(inst)
    }

    pub fn schema(&self) -> &Schema {
        &self.schema
    }

    pub fn schema_mut(&mut self) -> &mut Schema {
        &mut self.schema
    }

    /// Inserts with weight 1. Returns false if the tuple was already present.
    pub fn insert(&mut self, t: DbTuple) -> Result<bool, ModelError> {
        self.insert_weighted(t, Weight::ONE)
    }

    pub fn insert_weighted(&mut self, t: DbTuple, w: Weight) -> Result<bool, ModelError> {
        self.schema.check_tuple(&t)?;
        if !w.is_positive() {
            return Err(ModelError::NonPositiveWeight(w));
        }
        if self.tuples.contains_key(&t) {
            return Ok(false);
        }
        self.tuples.insert(t, w);
        Ok(true)
    }

    pub fn remove(&mut self, t: &DbTuple) -> Option<Weight> {
        self.tuples.remove(t)
    }

    pub fn contains(&self, t: &DbTuple) -> bool {
        self.tuples.contains_key(t)
    }

    pub fn weight(&self, t: &DbTuple) -> Option<Weight> {
        self.tuples.get(t).copied()
    }

    pub fn len(&self) -> usize {
        self.tuples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.tuples.is_empty()
    }

    /// Tuples in canonical (sorted) order.
    pub fn tuples(&self) -> impl Iterator<Item = &DbTuple> + '_ {
        self.tuples.keys()
    }

    pub fn weighted_tuples(&self) -> impl Iterator<Item = (&DbTuple, Weight)> + '_ {
        self.tuples.iter().map(|(t, w)| (t, *w))
    }

    pub fn tuple_set(&self) -> BTreeSet<DbTuple> {
        self.tuples.keys().cloned().collect()
    }

    /// Same schema and weights, restricted to the tuples accepted by `keep`.
    pub fn filter<F: FnMut(&DbTuple) -> bool>(&self, mut keep: F) -> Instance {
        Instance {
            schema: self.schema.clone(),
            tuples: self
                .tuples
                .iter()
                .filter(|(t, _)| keep(t))
                .map(|(t, w)| (t.clone(), *w))
                .collect(),
        }
    }

    pub fn total_weight(&self) -> Weight {
        self.tuples.values().copied().sum()
    }
}

impl fmt::Display for Instance {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for r in self.schema.relations() {
            writeln!(f, "{r}")?;
        }
        for (t, w) in &self.tuples {
            if *w == Weight::ONE {
                writeln!(f, "{t}")?;
            } else {
                writeln!(f, "{t} @ {w}")?;
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum UpdateOp {
    Insert(DbTuple, Weight),
    Delete(DbTuple),
    Change {
        target: DbTuple,
        attribute: usize,
        value: Constant,
    },
}

impl UpdateOp {
    pub fn insert(t: DbTuple) -> Self {
        UpdateOp::Insert(t, Weight::ONE)
    }

    pub fn is_change(&self) -> bool {
        matches!(self, UpdateOp::Change { .. })
    }
}

impl fmt::Display for UpdateOp {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            UpdateOp::Insert(t, w) if *w == Weight::ONE => write!(f, "insert {t}"),
            UpdateOp::Insert(t, w) => write!(f, "insert {t} @ {w}"),
            UpdateOp::Delete(t) => write!(f, "delete {t}"),
            UpdateOp::Change {
                target,
                attribute,
                value,
            } => write!(f, "change {target} attr {attribute} -> {value}"),
        }
    }
}

/// Ordered one-tuple updates, applied atomically.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct UpdateSequence {
    pub ops: Vec<UpdateOp>,
}

impl UpdateSequence {
    pub fn new(ops: Vec<UpdateOp>) -> Self {
        UpdateSequence { ops }
    }

    pub fn len(&self) -> usize {
        self.ops.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ops.is_empty()
    }

    pub fn is_insert_only(&self) -> bool {
        self.ops.iter().all(|op| matches!(op, UpdateOp::Insert(..)))
    }

    pub fn is_change_only(&self) -> bool {
        self.ops.iter().all(UpdateOp::is_change)
    }
}

impl fmt::Display for UpdateSequence {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for op in &self.ops {
            writeln!(f, "{op}")?;
        }
        Ok(())
    }
}

/// Computes `U(D)`. The input instance is left untouched; on error nothing
/// is applied.
pub fn apply_update(instance: &Instance, seq: &UpdateSequence) -> Result<Instance, ModelError> {
    let mut out = instance.clone();
    for op in &seq.ops {
        match op {
            UpdateOp::Insert(t, w) => {
                out.insert_weighted(t.clone(), *w)?;
            }
            UpdateOp::Delete(t) => {
                out.remove(t)
                    .ok_or_else(|| ModelError::DeleteTargetMissing(t.clone()))?;
            }
            UpdateOp::Change {
                target,
                attribute,
                value,
            } => {
                if *attribute >= target.args.len() {
                    return Err(ModelError::AttributeOutOfRange {
                        tuple: target.clone(),
                        index: *attribute,
                    });
                }
                let w = out
                    .remove(target)
                    .ok_or_else(|| ModelError::ChangeTargetMissing(target.clone()))?;
                out.insert_weighted(target.with_arg(*attribute, value.clone()), w)?;
            }
        }
    }
    Ok(out)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ConstraintClass {
    Denial,
    General,
}

/// Result of [`minimize_update`]: the retained operations and the tuples
/// whose deletion was dropped. Removing `dropped_deletions` (where present)
/// from `apply_update(D, ops)` yields `apply_update(D, original)`.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct MinimizedUpdate {
    pub ops: UpdateSequence,
    pub dropped_deletions: BTreeSet<DbTuple>,
}

impl MinimizedUpdate {
    pub fn apply(&self, instance: &Instance) -> Result<Instance, ModelError> {
        let applied = apply_update(instance, &self.ops)?;
        Ok(applied.filter(|t| !self.dropped_deletions.contains(t)))
    }
}

/// Drops deletions from a sequence when the constraints are denials:
/// deleting tuples never creates a violation, so the deletions are recorded
/// separately and any earlier insert or change producing the deleted tuple
/// is cancelled.
pub fn minimize_update(seq: &UpdateSequence, class: ConstraintClass) -> MinimizedUpdate {
    if class == ConstraintClass::General {
        return MinimizedUpdate {
            ops: seq.clone(),
            dropped_deletions: BTreeSet::new(),
        };
    }
    let mut ops: Vec<Option<UpdateOp>> = Vec::new();
    // latest surviving op producing each tuple
    let mut producer: HashMap<DbTuple, usize> = HashMap::new();
    let mut dropped = BTreeSet::new();

    fn delete(
        t: &DbTuple,
        ops: &mut [Option<UpdateOp>],
        producer: &mut HashMap<DbTuple, usize>,
        dropped: &mut BTreeSet<DbTuple>,
    ) {
        // t may also have been present in the base instance
        dropped.insert(t.clone());
        let Some(i) = producer.remove(t) else {
            return;
        };
        if let Some(UpdateOp::Change { target, .. }) = ops[i].take() {
            delete(&target, ops, producer, dropped);
        }
    }

    for op in &seq.ops {
        match op {
            UpdateOp::Delete(t) => delete(t, &mut ops, &mut producer, &mut dropped),
            UpdateOp::Insert(t, _) => {
                dropped.remove(t);
                producer.insert(t.clone(), ops.len());
                ops.push(Some(op.clone()));
            }
            UpdateOp::Change {
                target,
                attribute,
                value,
            } => {
                producer.remove(target);
                if *attribute < target.args.len() {
                    let result = target.with_arg(*attribute, value.clone());
                    dropped.remove(&result);
                    producer.insert(result, ops.len());
                }
                ops.push(Some(op.clone()));
            }
        }
    }
    MinimizedUpdate {
        ops: UpdateSequence::new(ops.into_iter().flatten().collect()),
        dropped_deletions: dropped,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn d2() -> Instance {
        Instance::from_tuples([tuple!("P", "a", "c", "d"), tuple!("P", "a", "c", "e")]).unwrap()
    }

    #[test]
    fn constant_order_puts_integers_first() {
        let mut v = vec![
            Constant::sym("b"),
            Constant::Int(10),
            Constant::sym("a"),
            Constant::Int(-2),
        ];
        v.sort();
        assert_eq!(
            v,
            vec![
                Constant::Int(-2),
                Constant::Int(10),
                Constant::sym("a"),
                Constant::sym("b")
            ]
        );
    }

    #[test]
    fn constant_display_quotes_ambiguous_symbols() {
        assert_eq!(Constant::sym("a").to_string(), "a");
        assert_eq!(Constant::sym("x").to_string(), "\"x\"");
        assert_eq!(Constant::sym("12").to_string(), "\"12\"");
        assert_eq!(Constant::sym("New York").to_string(), "\"New York\"");
        assert_eq!(Constant::Int(-4).to_string(), "-4");
    }

    #[test]
    fn schema_rejects_bad_declarations() {
        let mut s = Schema::new();
        s.add_relation("P", vec!["x".into(), "y".into()]).unwrap();
        assert!(matches!(
            s.add_relation("P", vec!["x".into()]),
            Err(ModelError::DuplicateRelation(_))
        ));
        assert!(matches!(
            s.add_relation("Q", vec!["x".into(), "x".into()]),
            Err(ModelError::DuplicateAttribute { .. })
        ));
        assert!(matches!(
            s.add_relation("E", vec![]),
            Err(ModelError::ZeroArity(_))
        ));
        assert!(s.ensure_relation("P", 3).is_err());
    }

    #[test]
    fn instance_has_set_semantics() {
        let mut i = d2();
        assert!(!i.insert(tuple!("P", "a", "c", "d")).unwrap());
        assert_eq!(i.len(), 2);
        assert!(i.insert(tuple!("P", "a")).is_err());
        assert!(i
            .insert_weighted(tuple!("P", "q", "q", "q"), Weight::ZERO)
            .is_err());
    }

    #[test]
    fn apply_insert_example() {
        let seq = UpdateSequence::new(vec![UpdateOp::insert(tuple!("P", "a", "f", "d"))]);
        let out = apply_update(&d2(), &seq).unwrap();
        assert_eq!(out.len(), 3);
        assert!(out.contains(&tuple!("P", "a", "f", "d")));
        assert_eq!(d2().len(), 2);
    }

    #[test]
    fn apply_empty_and_change() {
        assert_eq!(
            apply_update(&d2(), &UpdateSequence::default()).unwrap(),
            d2()
        );
        let mut i = Instance::from_tuples([tuple!("R", 1)]).unwrap();
        i.remove(&tuple!("R", 1));
        i.insert_weighted(tuple!("R", 1), Weight::new(3, 2))
            .unwrap();
        let seq = UpdateSequence::new(vec![UpdateOp::Change {
            target: tuple!("R", 1),
            attribute: 0,
            value: Constant::Int(2),
        }]);
        let out = apply_update(&i, &seq).unwrap();
        assert_eq!(out.tuple_set(), BTreeSet::from([tuple!("R", 2)]));
        assert_eq!(out.weight(&tuple!("R", 2)), Some(Weight::new(3, 2)));
    }

    #[test]
    fn apply_reports_missing_targets() {
        let seq = UpdateSequence::new(vec![UpdateOp::Delete(tuple!("P", "z", "z", "z"))]);
        assert!(matches!(
            apply_update(&d2(), &seq),
            Err(ModelError::DeleteTargetMissing(_))
        ));
        let seq = UpdateSequence::new(vec![UpdateOp::Change {
            target: tuple!("P", "z", "z", "z"),
            attribute: 0,
            value: Constant::sym("a"),
        }]);
        assert!(matches!(
            apply_update(&d2(), &seq),
            Err(ModelError::ChangeTargetMissing(_))
        ));
    }

    #[test]
    fn minimize_cancels_insert_then_delete() {
        let seq = UpdateSequence::new(vec![
            UpdateOp::insert(tuple!("R", 1)),
            UpdateOp::Delete(tuple!("R", 1)),
        ]);
        let m = minimize_update(&seq, ConstraintClass::Denial);
        assert!(m.ops.is_empty());
    }

    #[test]
    fn minimize_keeps_inserts() {
        let seq = UpdateSequence::new(vec![
            UpdateOp::insert(tuple!("R", 1)),
            UpdateOp::insert(tuple!("R", 2)),
        ]);
        let m = minimize_update(&seq, ConstraintClass::Denial);
        assert_eq!(m.ops, seq);
        assert!(m.dropped_deletions.is_empty());
        let g = minimize_update(
            &UpdateSequence::new(vec![UpdateOp::Delete(tuple!("R", 1))]),
            ConstraintClass::General,
        );
        assert_eq!(g.ops.len(), 1);
    }

    #[test]
    fn minimize_records_base_deletion() {
        let d = Instance::from_tuples([tuple!("R", 5), tuple!("R", 6)]).unwrap();
        let seq = UpdateSequence::new(vec![UpdateOp::Delete(tuple!("R", 5))]);
        let m = minimize_update(&seq, ConstraintClass::Denial);
        assert!(m.ops.is_empty());
        assert_eq!(m.apply(&d).unwrap(), apply_update(&d, &seq).unwrap());
    }

    #[test]
    fn minimize_unwinds_change_chains() {
        let d = Instance::from_tuples([tuple!("R", 1)]).unwrap();
        let seq = UpdateSequence::new(vec![
            UpdateOp::Change {
                target: tuple!("R", 1),
                attribute: 0,
                value: Constant::Int(2),
            },
            UpdateOp::Delete(tuple!("R", 2)),
            UpdateOp::insert(tuple!("R", 1)),
        ]);
        let m = minimize_update(&seq, ConstraintClass::Denial);
        assert_eq!(m.ops.len(), 1);
        assert_eq!(m.apply(&d).unwrap(), apply_update(&d, &seq).unwrap());
    }
}
