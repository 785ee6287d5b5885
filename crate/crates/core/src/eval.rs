//! Backtracking join over conjunctions of atoms, shared by constraint
//! checking and query evaluation.

use std::collections::HashMap;
use std::ops::ControlFlow;
use std::sync::Arc;

use crate::denial::{Atom, CmpOp, Comparison, Term};
use crate::model::{Constant, DbTuple, Instance};

/// Tuples of an instance under dense ids (canonical order) with a
/// per-relation id list and a full-tuple hash.
#[derive(Debug, Clone, Default)]
pub struct TupleIndex {
    tuples: Vec<DbTuple>,
    by_relation: HashMap<Arc<str>, Vec<u32>>,
    lookup: HashMap<DbTuple, u32>,
}

impl TupleIndex {
    pub fn new(instance: &Instance) -> Self {
        Self::from_tuples(instance.tuples().cloned())
    }

    pub fn from_tuples<I: IntoIterator<Item = DbTuple>>(tuples: I) -> Self {
        let mut idx = TupleIndex::default();
        for t in tuples {
            idx.push(t);
        }
        idx
    }

    /// Adds a tuple if absent and returns its id.
    pub fn push(&mut self, t: DbTuple) -> u32 {
        if let Some(&id) = self.lookup.get(&t) {
            return id;
        }
        let id = self.tuples.len() as u32;
        self.by_relation
            .entry(t.relation.clone())
            .or_default()
            .push(id);
        self.lookup.insert(t.clone(), id);
        self.tuples.push(t);
        id
    }

    pub fn len(&self) -> usize {
        self.tuples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.tuples.is_empty()
    }

    pub fn tuple(&self, id: u32) -> &DbTuple {
        &self.tuples[id as usize]
    }

    pub fn tuples(&self) -> &[DbTuple] {
        &self.tuples
    }

    pub fn id_of(&self, t: &DbTuple) -> Option<u32> {
        self.lookup.get(t).copied()
    }

    pub fn relation_ids(&self, relation: &str) -> &[u32] {
        self.by_relation
            .get(relation)
            .map(Vec::as_slice)
            .unwrap_or(&[])
    }
}

#[derive(Debug, Clone)]
enum Slot {
    Var(usize),
    Const(Constant),
}

#[derive(Debug, Clone)]
struct CompiledAtom {
    relation: Arc<str>,
    slots: Vec<Slot>,
}

#[derive(Debug, Clone)]
struct CompiledComparison {
    lhs: Slot,
    op: CmpOp,
    rhs: Slot,
}

/// A conjunction compiled to variable slots.
#[derive(Debug, Clone)]
pub struct Body {
    atoms: Vec<CompiledAtom>,
    negated: Vec<CompiledAtom>,
    comparisons: Vec<CompiledComparison>,
    var_names: Vec<String>,
}

/// Callback receiving a variable binding and the matched tuple ids.
pub type MatchVisitor<'a, B> = dyn FnMut(&[Option<Constant>], &[u32]) -> ControlFlow<B> + 'a;

impl Body {
    pub fn new(atoms: &[Atom], negated: &[Atom], comparisons: &[Comparison]) -> Self {
        let mut var_names: Vec<String> = Vec::new();
        let mut slot = |t: &Term| match t {
            Term::Const(c) => Slot::Const(c.clone()),
            Term::Var(v) => {
                let i = var_names.iter().position(|n| n == v).unwrap_or_else(|| {
                    var_names.push(v.clone());
                    var_names.len() - 1
                });
                Slot::Var(i)
            }
        };
        let mut compile = |a: &Atom| CompiledAtom {
            relation: Arc::from(a.relation.as_str()),
            slots: a.terms.iter().map(&mut slot).collect(),
        };
        let atoms: Vec<_> = atoms.iter().map(&mut compile).collect();
        let negated: Vec<_> = negated.iter().map(&mut compile).collect();
        let comparisons = comparisons
            .iter()
            .map(|c| CompiledComparison {
                lhs: slot(&c.lhs),
                op: c.op,
                rhs: slot(&c.rhs),
            })
            .collect();
        Body {
            atoms,
            negated,
            comparisons,
            var_names,
        }
    }

    pub fn var_names(&self) -> &[String] {
        &self.var_names
    }

    pub fn var_slot(&self, name: &str) -> Option<usize> {
        self.var_names.iter().position(|n| n == name)
    }

    pub fn atom_count(&self) -> usize {
        self.atoms.len()
    }

    pub fn atom_relation(&self, i: usize) -> &str {
        &self.atoms[i].relation
    }

    /// Calls `visit(bindings, image)` for every assignment satisfying the
    /// conjunction, where `image[i]` is the tuple id matched by atom `i`.
    /// Only tuples accepted by `alive` participate. With `pinned = Some((i,
    /// id))` atom `i` is restricted to tuple `id`.
    pub fn for_each_match<B>(
        &self,
        index: &TupleIndex,
        alive: &dyn Fn(u32) -> bool,
        pinned: Option<(usize, u32)>,
        visit: &mut MatchVisitor<'_, B>,
    ) -> ControlFlow<B> {
        let mut order: Vec<usize> = (0..self.atoms.len()).collect();
        if let Some((p, _)) = pinned {
            order.retain(|&i| i != p);
            order.insert(0, p);
        }
        // comparison i is checked right after order[ready[i]] binds its last variable
        let mut bound_at = vec![usize::MAX; self.var_names.len()];
        for (level, &ai) in order.iter().enumerate() {
            for s in &self.atoms[ai].slots {
                if let Slot::Var(v) = s {
                    if bound_at[*v] == usize::MAX {
                        bound_at[*v] = level;
                    }
                }
            }
        }
        let level_of = |s: &Slot| match s {
            Slot::Var(v) => bound_at[*v],
            Slot::Const(_) => 0,
        };
        let mut checks: Vec<Vec<usize>> = vec![Vec::new(); order.len().max(1)];
        for (ci, c) in self.comparisons.iter().enumerate() {
            let lvl = level_of(&c.lhs).max(level_of(&c.rhs));
            if lvl == usize::MAX {
                // unsafe comparison: never satisfiable under finite evaluation
                return ControlFlow::Continue(());
            }
            checks[lvl].push(ci);
        }
        let mut state = SearchState {
            bindings: vec![None; self.var_names.len()],
            image: vec![0; self.atoms.len()],
        };
        self.search(index, alive, pinned, &order, &checks, 0, &mut state, visit)
    }

    #[allow(clippy::too_many_arguments)]
    fn search<B>(
        &self,
        index: &TupleIndex,
        alive: &dyn Fn(u32) -> bool,
        pinned: Option<(usize, u32)>,
        order: &[usize],
        checks: &[Vec<usize>],
        level: usize,
        state: &mut SearchState,
        visit: &mut MatchVisitor<'_, B>,
    ) -> ControlFlow<B> {
        if level == order.len() {
            if order.is_empty()
                && !checks[0]
                    .iter()
                    .all(|&ci| self.compare(&self.comparisons[ci], &state.bindings))
            {
                return ControlFlow::Continue(());
            }
            if self
                .negated
                .iter()
                .any(|a| self.present(index, alive, a, &state.bindings))
            {
                return ControlFlow::Continue(());
            }
            return visit(&state.bindings, &state.image);
        }
        let ai = order[level];
        let atom = &self.atoms[ai];
        let candidates: &[u32] = match pinned {
            Some((p, ref id)) if p == ai => std::slice::from_ref(id),
            _ => index.relation_ids(&atom.relation),
        };
        let mut trail: Vec<usize> = Vec::with_capacity(atom.slots.len());
        for &id in candidates {
            if !alive(id) {
                continue;
            }
            let t = index.tuple(id);
            if t.relation != atom.relation || t.args.len() != atom.slots.len() {
                continue;
            }
            trail.clear();
            let mut ok = true;
            for (s, val) in atom.slots.iter().zip(&t.args) {
                match s {
                    Slot::Const(c) => {
                        if c != val {
                            ok = false;
                            break;
                        }
                    }
                    Slot::Var(v) => match &state.bindings[*v] {
                        Some(b) => {
                            if b != val {
                                ok = false;
                                break;
                            }
                        }
                        None => {
                            state.bindings[*v] = Some(val.clone());
                            trail.push(*v);
                        }
                    },
                }
            }
            if ok {
                ok = checks[level]
                    .iter()
                    .all(|&ci| self.compare(&self.comparisons[ci], &state.bindings));
            }
            if ok {
                state.image[ai] = id;
                let flow =
                    self.search(index, alive, pinned, order, checks, level + 1, state, visit);
                if flow.is_break() {
                    for &v in &trail {
                        state.bindings[v] = None;
                    }
                    return flow;
                }
            }
            for &v in &trail {
                state.bindings[v] = None;
            }
        }
        ControlFlow::Continue(())
    }

    fn value<'a>(s: &'a Slot, bindings: &'a [Option<Constant>]) -> Option<&'a Constant> {
        match s {
            Slot::Const(c) => Some(c),
            Slot::Var(v) => bindings[*v].as_ref(),
        }
    }

    fn compare(&self, c: &CompiledComparison, bindings: &[Option<Constant>]) -> bool {
        match (Self::value(&c.lhs, bindings), Self::value(&c.rhs, bindings)) {
            (Some(l), Some(r)) => c.op.holds(l, r),
            _ => false,
        }
    }

    fn present(
        &self,
        index: &TupleIndex,
        alive: &dyn Fn(u32) -> bool,
        atom: &CompiledAtom,
        bindings: &[Option<Constant>],
    ) -> bool {
        let mut args = Vec::with_capacity(atom.slots.len());
        for s in &atom.slots {
            match Self::value(s, bindings) {
                Some(c) => args.push(c.clone()),
                None => return false,
            }
        }
        let t = DbTuple {
            relation: atom.relation.clone(),
            args,
        };
        index.id_of(&t).is_some_and(alive)
    }
}

struct SearchState {
    bindings: Vec<Option<Constant>>,
    image: Vec<u32>,
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::tuple;

    #[test]
    fn index_deduplicates_and_groups() {
        let mut idx = TupleIndex::default();
        let a = idx.push(tuple!("R", 1));
        let b = idx.push(tuple!("S", 1));
        assert_eq!(idx.push(tuple!("R", 1)), a);
        assert_eq!(idx.relation_ids("R"), &[a]);
        assert_eq!(idx.relation_ids("S"), &[b]);
        assert!(idx.relation_ids("T").is_empty());
    }
}
