//! Brute-force oracles and random generators shared by the integration
//! tests. Nothing here calls the library's evaluator, hypergraph or solvers.

#![allow(dead_code)]

use std::collections::{BTreeMap, BTreeSet, HashMap};

use cqa_core::{
    Atom, CmpOp, Comparison, Constant, ConstraintSet, DbTuple, DenialConstraint, Instance, Query,
    Term, Weight,
};
use rand::seq::SliceRandom;
use rand::Rng;

pub type TupleSet = BTreeSet<DbTuple>;

fn unify(atom: &Atom, t: &DbTuple, env: &mut HashMap<String, Constant>) -> bool {
    if *atom.relation != *t.relation || atom.terms.len() != t.args.len() {
        return false;
    }
    for (term, val) in atom.terms.iter().zip(&t.args) {
        match term {
            Term::Const(c) => {
                if c != val {
                    return false;
                }
            }
            Term::Var(v) => match env.get(v) {
                Some(b) if b != val => return false,
                Some(_) => {}
                None => {
                    env.insert(v.clone(), val.clone());
                }
            },
        }
    }
    true
}

fn term_value<'a>(t: &'a Term, env: &'a HashMap<String, Constant>) -> Option<&'a Constant> {
    match t {
        Term::Const(c) => Some(c),
        Term::Var(v) => env.get(v),
    }
}

fn comparisons_hold(cmps: &[Comparison], env: &HashMap<String, Constant>) -> bool {
    cmps.iter().all(
        |c| match (term_value(&c.lhs, env), term_value(&c.rhs, env)) {
            (Some(l), Some(r)) => match c.op {
                CmpOp::Eq => l == r,
                CmpOp::Ne => l != r,
                CmpOp::Lt => l < r,
                CmpOp::Le => l <= r,
                CmpOp::Gt => l > r,
                CmpOp::Ge => l >= r,
            },
            _ => false,
        },
    )
}

/// Every environment obtained by mapping each atom to some tuple (full
/// cartesian product, no join ordering).
fn assignments(atoms: &[Atom], tuples: &[DbTuple]) -> Vec<HashMap<String, Constant>> {
    let mut out = Vec::new();
    let n = tuples.len();
    if atoms.is_empty() {
        out.push(HashMap::new());
        return out;
    }
    if n == 0 {
        return out;
    }
    let total = n.pow(atoms.len() as u32);
    for code in 0..total {
        let mut env = HashMap::new();
        let mut c = code;
        let mut ok = true;
        for a in atoms {
            let t = &tuples[c % n];
            c /= n;
            if !unify(a, t, &mut env) {
                ok = false;
                break;
            }
        }
        if ok {
            out.push(env);
        }
    }
    out
}

pub fn naive_violates(tuples: &TupleSet, c: &DenialConstraint) -> bool {
    let ts: Vec<DbTuple> = tuples.iter().cloned().collect();
    assignments(&c.atoms, &ts)
        .iter()
        .any(|env| comparisons_hold(&c.comparisons, env))
}

pub fn naive_consistent(tuples: &TupleSet, ics: &ConstraintSet) -> bool {
    !ics.constraints().iter().any(|c| naive_violates(tuples, c))
}

/// Classical answers by exhaustive assignment enumeration.
pub fn naive_eval(tuples: &TupleSet, q: &Query) -> BTreeSet<Vec<Constant>> {
    let (pos, neg, cmps): (Vec<Atom>, Vec<Atom>, Vec<Comparison>) = match q {
        Query::GroundAtomic(t) => (vec![Atom::from(t)], vec![], vec![]),
        Query::LiteralConjunction {
            literals,
            comparisons,
        } => (
            literals
                .iter()
                .filter(|l| l.positive)
                .map(|l| l.atom.clone())
                .collect(),
            literals
                .iter()
                .filter(|l| !l.positive)
                .map(|l| l.atom.clone())
                .collect(),
            comparisons.clone(),
        ),
        Query::Conjunctive {
            atoms, comparisons, ..
        } => (atoms.clone(), vec![], comparisons.clone()),
    };
    let vars: Vec<String> = q.free_variables().into_iter().map(String::from).collect();
    let ts: Vec<DbTuple> = tuples.iter().cloned().collect();
    let mut out = BTreeSet::new();
    for env in assignments(&pos, &ts) {
        if !comparisons_hold(&cmps, &env) {
            continue;
        }
        let blocked = neg.iter().any(|a| {
            let args: Vec<Constant> = a
                .terms
                .iter()
                .map(|t| term_value(t, &env).unwrap().clone())
                .collect();
            tuples.contains(&DbTuple::new(&a.relation, args))
        });
        if !blocked {
            out.insert(vars.iter().map(|v| env[v].clone()).collect());
        }
    }
    out
}

pub struct BruteRepairs {
    pub s: Vec<TupleSet>,
    pub c: Vec<TupleSet>,
    pub wc: Vec<TupleSet>,
}

/// Scans all 2^|D| subsets.
pub fn brute_repairs(d: &Instance, ics: &ConstraintSet) -> BruteRepairs {
    let all: Vec<(DbTuple, Weight)> = d.weighted_tuples().map(|(t, w)| (t.clone(), w)).collect();
    let n = all.len();
    assert!(n <= 16);
    let consistent: Vec<u32> = (0u32..1 << n)
        .filter(|&m| {
            let s: TupleSet = (0..n)
                .filter(|i| m & (1 << i) != 0)
                .map(|i| all[i].0.clone())
                .collect();
            naive_consistent(&s, ics)
        })
        .collect();
    let cons: BTreeSet<u32> = consistent.iter().copied().collect();
    let to_set = |m: u32| -> TupleSet {
        (0..n)
            .filter(|i| m & (1 << i) != 0)
            .map(|i| all[i].0.clone())
            .collect()
    };
    let maximal: Vec<u32> = consistent
        .iter()
        .copied()
        .filter(|&m| (0..n).all(|i| m & (1 << i) != 0 || !cons.contains(&(m | 1 << i))))
        .collect();
    let best = consistent.iter().map(|m| m.count_ones()).max().unwrap();
    let kept_weight =
        |m: u32| -> Weight { (0..n).filter(|i| m & (1 << i) != 0).map(|i| all[i].1).sum() };
    let best_w = consistent.iter().map(|&m| kept_weight(m)).max().unwrap();
    let mut s: Vec<TupleSet> = maximal.iter().map(|&m| to_set(m)).collect();
    let mut c: Vec<TupleSet> = consistent
        .iter()
        .filter(|m| m.count_ones() == best)
        .map(|&m| to_set(m))
        .collect();
    let mut wc: Vec<TupleSet> = consistent
        .iter()
        .filter(|&&m| kept_weight(m) == best_w)
        .map(|&m| to_set(m))
        .collect();
    s.sort();
    c.sort();
    wc.sort();
    BruteRepairs { s, c, wc }
}

pub fn certain_over(repairs: &[TupleSet], q: &Query) -> BTreeSet<Vec<Constant>> {
    let mut it = repairs.iter().map(|r| naive_eval(r, q));
    let first = it.next().expect("nonempty repair list");
    it.fold(first, |acc, a| acc.intersection(&a).cloned().collect())
}

pub fn possible_over(repairs: &[TupleSet], q: &Query) -> BTreeSet<Vec<Constant>> {
    repairs.iter().flat_map(|r| naive_eval(r, q)).collect()
}

// ---------------------------------------------------------------- graphs

/// Adjacency bitmasks of a graph on `n <= 32` vertices.
#[derive(Clone, Debug)]
pub struct BitGraph {
    pub n: u32,
    pub adj: Vec<u32>,
}

impl BitGraph {
    pub fn from_edges(n: u32, edges: &[(u32, u32)]) -> Self {
        let mut adj = vec![0u32; n as usize];
        for &(a, b) in edges {
            adj[a as usize] |= 1 << b;
            adj[b as usize] |= 1 << a;
        }
        BitGraph { n, adj }
    }

    pub fn full(&self) -> u32 {
        if self.n == 32 {
            u32::MAX
        } else {
            (1u32 << self.n) - 1
        }
    }

    /// Maximum independent set size inside `mask`, by in/out recursion.
    pub fn mis(&self, mask: u32) -> u32 {
        if mask == 0 {
            return 0;
        }
        let v = mask.trailing_zeros();
        let without = self.mis(mask & !(1 << v));
        if self.adj[v as usize] & mask == 0 {
            return without + 1;
        }
        let with = 1 + self.mis(mask & !(1 << v) & !self.adj[v as usize]);
        without.max(with)
    }

    pub fn alpha(&self) -> u32 {
        self.mis(self.full())
    }

    pub fn in_all(&self, v: u32) -> bool {
        self.mis(self.full() & !(1 << v)) < self.alpha()
    }

    pub fn in_some(&self, v: u32) -> bool {
        1 + self.mis(self.full() & !(1 << v) & !self.adj[v as usize]) == self.alpha()
    }

    /// All maximum independent sets, by subset scan (n <= 20).
    pub fn maximum_sets(&self) -> Vec<u32> {
        let a = self.alpha();
        (0..=self.full())
            .filter(|&s| {
                s.count_ones() == a
                    && (0..self.n).all(|v| s & (1 << v) == 0 || self.adj[v as usize] & s == 0)
            })
            .collect()
    }
}

/// Every labelled graph on `n` vertices, as edge lists.
pub fn all_graphs(n: u32) -> Vec<Vec<(u32, u32)>> {
    let pairs: Vec<(u32, u32)> = (0..n)
        .flat_map(|a| (a + 1..n).map(move |b| (a, b)))
        .collect();
    (0u32..1 << pairs.len())
        .map(|m| {
            pairs
                .iter()
                .enumerate()
                .filter(|(i, _)| m & (1 << i) != 0)
                .map(|(_, &p)| p)
                .collect()
        })
        .collect()
}

// ------------------------------------------------------------ generators

pub const VARS: [&str; 5] = ["x", "y", "z", "w", "u"];

fn random_term<R: Rng>(rng: &mut R, domain: i64) -> Term {
    if rng.gen_bool(0.85) {
        Term::var(VARS[rng.gen_range(0..VARS.len())])
    } else {
        Term::Const(Constant::Int(rng.gen_range(0..domain)))
    }
}

/// Schema used by the random instances: P/2, Q/2, R/1.
pub const RELATIONS: [(&str, usize); 3] = [("P", 2), ("Q", 2), ("R", 1)];

pub fn random_tuple<R: Rng>(rng: &mut R, domain: i64) -> DbTuple {
    let (rel, arity) = RELATIONS[rng.gen_range(0..RELATIONS.len())];
    DbTuple::new(
        rel,
        (0..arity)
            .map(|_| Constant::Int(rng.gen_range(0..domain)))
            .collect(),
    )
}

pub fn random_constraint<R: Rng>(
    rng: &mut R,
    id: &str,
    domain: i64,
    max_atoms: usize,
) -> DenialConstraint {
    loop {
        let k = rng.gen_range(1..=max_atoms);
        let atoms: Vec<Atom> = (0..k)
            .map(|_| {
                let (rel, arity) = RELATIONS[rng.gen_range(0..RELATIONS.len())];
                Atom {
                    relation: rel.to_string(),
                    terms: (0..arity).map(|_| random_term(rng, domain)).collect(),
                }
            })
            .collect();
        let vars: Vec<String> = atoms
            .iter()
            .flat_map(|a| a.variables().map(String::from))
            .collect();
        let mut comparisons = Vec::new();
        if !vars.is_empty() && rng.gen_bool(0.6) {
            let lhs = Term::Var(vars.choose(rng).unwrap().clone());
            let rhs = if rng.gen_bool(0.6) {
                Term::Var(vars.choose(rng).unwrap().clone())
            } else {
                Term::Const(Constant::Int(rng.gen_range(0..domain)))
            };
            let op = *[
                CmpOp::Eq,
                CmpOp::Ne,
                CmpOp::Lt,
                CmpOp::Le,
                CmpOp::Gt,
                CmpOp::Ge,
            ]
            .choose(rng)
            .unwrap();
            comparisons.push(Comparison { lhs, op, rhs });
        }
        // single-atom constraints without comparisons delete whole relations;
        // keep a few but not too many
        if k == 1 && comparisons.is_empty() && rng.gen_bool(0.7) {
            continue;
        }
        return DenialConstraint::new(id, atoms, comparisons).unwrap();
    }
}

pub fn random_constraints<R: Rng>(rng: &mut R, domain: i64) -> ConstraintSet {
    let k = rng.gen_range(1..=3);
    ConstraintSet::new(
        (0..k)
            .map(|i| random_constraint(rng, &format!("c{}", i + 1), domain, 3))
            .collect(),
    )
    .unwrap()
}

pub fn random_weight<R: Rng>(rng: &mut R) -> Weight {
    *[
        Weight::ONE,
        Weight::ONE,
        Weight::integer(2),
        Weight::integer(3),
        Weight::new(1, 2),
    ]
    .choose(rng)
    .unwrap()
}

pub fn random_instance<R: Rng>(
    rng: &mut R,
    max_tuples: usize,
    domain: i64,
    weighted: bool,
) -> Instance {
    let target = rng.gen_range(1..=max_tuples);
    let mut d = Instance::from_tuples(std::iter::empty()).unwrap();
    for (rel, arity) in RELATIONS {
        d.schema_mut().ensure_relation(rel, arity).unwrap();
    }
    let mut guard = 0;
    while d.len() < target && guard < 1000 {
        guard += 1;
        let w = if weighted {
            random_weight(rng)
        } else {
            Weight::ONE
        };
        d.insert_weighted(random_tuple(rng, domain), w).unwrap();
    }
    d
}

/// Query texts exercising every query class over the random schema.
pub fn random_query_texts<R: Rng>(rng: &mut R, d: &Instance, domain: i64) -> Vec<String> {
    let c = |rng: &mut R| rng.gen_range(0..domain);
    let some_tuple = |rng: &mut R| -> DbTuple {
        let ts: Vec<&DbTuple> = d.tuples().collect();
        if !ts.is_empty() && rng.gen_bool(0.8) {
            (*ts.choose(rng).unwrap()).clone()
        } else {
            random_tuple(rng, domain)
        }
    };
    let mut out = vec![
        "? P(x,y)".to_string(),
        "? R(x)".to_string(),
        format!("? Q(x,{})", c(rng)),
        "? exists y: P(x,y), Q(y,z)".to_string(),
        "? exists y: P(x,y)".to_string(),
        "? P(x,y), not R(x)".to_string(),
        format!("? P(x,y), x < y, not Q(y,{})", c(rng)),
        "? exists x,y: P(x,y), R(y)".to_string(),
    ];
    for _ in 0..3 {
        out.push(format!("{}", some_tuple(rng)));
    }
    out.push(format!("? {}, not {}", some_tuple(rng), some_tuple(rng)));
    out.push(format!("? not {}, {}", some_tuple(rng), some_tuple(rng)));
    out.push(format!("? {}, {}", some_tuple(rng), some_tuple(rng)));
    out
}

// --------------------------------------------------- attribute repairs

/// Per-change cost as an independent reimplementation of the two weight
/// forms: unit, or `alpha * (old - new)^2` with `alpha` per attribute and a
/// flat `alpha` when a symbol is involved.
pub fn oracle_change_cost(
    quadratic: Option<&BTreeMap<(String, usize), Weight>>,
    rel: &str,
    attr: usize,
    old: &Constant,
    new: &Constant,
) -> Weight {
    match quadratic {
        None => Weight::ONE,
        Some(coef) => {
            let a = coef
                .get(&(rel.to_string(), attr))
                .copied()
                .unwrap_or(Weight::ONE);
            match (old, new) {
                (Constant::Int(x), Constant::Int(y)) => a * Weight::integer((x - y) * (x - y)),
                _ => a,
            }
        }
    }
}

/// Cell changes as (original tuple, attribute, new value).
pub type ChangeMap = Vec<(DbTuple, usize, Constant)>;

/// All minimum-cost consistent change maps, by exhaustive scan. Each map
/// is a sorted list of (tuple, attribute, new value). `None` when no map
/// yields a consistent instance.
pub fn brute_a_repairs(
    d: &Instance,
    ics: &ConstraintSet,
    candidates: &[Constant],
    quadratic: Option<&BTreeMap<(String, usize), Weight>>,
) -> Option<(Weight, Vec<ChangeMap>)> {
    let tuples: Vec<DbTuple> = d.tuples().cloned().collect();
    let cells: Vec<(usize, usize)> = tuples
        .iter()
        .enumerate()
        .flat_map(|(ti, t)| (0..t.args.len()).map(move |ai| (ti, ai)))
        .collect();
    // option 0 keeps the cell, option i+1 writes candidates[i]
    let radix = candidates.len() + 1;
    let total = radix.pow(cells.len() as u32);
    let mut best: Option<Weight> = None;
    let mut maps = Vec::new();
    'outer: for code in 0..total {
        let mut c = code;
        let mut changed = tuples.clone();
        let mut cost = Weight::ZERO;
        let mut map = Vec::new();
        for &(ti, ai) in &cells {
            let o = c % radix;
            c /= radix;
            if o == 0 {
                continue;
            }
            let new = &candidates[o - 1];
            let old = &tuples[ti].args[ai];
            if new == old {
                continue 'outer;
            }
            cost = cost + oracle_change_cost(quadratic, &tuples[ti].relation, ai, old, new);
            changed[ti].args[ai] = new.clone();
            map.push((tuples[ti].clone(), ai, new.clone()));
        }
        let set: TupleSet = changed.into_iter().collect();
        if !naive_consistent(&set, ics) {
            continue;
        }
        map.sort();
        match best {
            Some(b) if cost > b => {}
            Some(b) if cost == b => maps.push(map),
            _ => {
                best = Some(cost);
                maps = vec![map];
            }
        }
    }
    maps.sort();
    best.map(|b| (b, maps))
}
