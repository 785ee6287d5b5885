//! Browser bindings for the demo page in `www/`. Each exported function
//! takes plain text and returns a JSON string. The work is done by the
//! `*_json` functions, which also run natively so the tests need no
//! browser.

use cqa_core::gadgets::SimpleGraph;
use cqa_core::solve::{alpha_size, in_all_maximum_is};
use cqa_core::{
    apply_update, block, build_conflict_hypergraph, c_repairs, certain_answers,
    incremental_c_distance, parse_constraints, parse_instance, s_repairs, Constant, DbTuple,
    Instance, Query, Semantics, SolveBudget, UpdateOp, UpdateSequence,
};
use serde_json::{json, Value};
use wasm_bindgen::prelude::*;

/// Largest `n` the slider may request.
pub const MAX_N: u32 = 2000;
/// Largest graph the block view accepts, so the page stays responsive.
pub const MAX_BLOCK_INPUT: u32 = 12;

fn err(e: impl std::fmt::Display) -> String {
    e.to_string()
}

/// Star instance `R(1..n)` plus an inserted `S(0)`: the C-repair keeps
/// every `R` tuple while an S-repair may keep `S(0)` alone.
pub fn example4_json(n: u32) -> Result<Value, String> {
    if n == 0 || n > MAX_N {
        return Err(format!("n must be between 1 and {MAX_N}"));
    }
    let budget = SolveBudget::default();
    let ics = parse_constraints(":- R(x), S(y).").map_err(err)?;
    let mut base =
        Instance::from_tuples((1..=n as i64).map(|i| DbTuple::new("R", vec![Constant::Int(i)])))
            .map_err(err)?;
    base.schema_mut().ensure_relation("S", 1).map_err(err)?;
    let s0 = DbTuple::new("S", vec![Constant::Int(0)]);
    let seq = UpdateSequence::new(vec![UpdateOp::insert(s0.clone())]);
    let updated = apply_update(&base, &seq).map_err(err)?;

    let s = s_repairs(&updated, &ics, &budget).map_err(err)?;
    let c = c_repairs(&updated, &ics, &budget).map_err(err)?;
    let c_distance = incremental_c_distance(&base, &seq, &ics).map_err(err)?;
    let q = Query::GroundAtomic(DbTuple::new("R", vec![Constant::Int(1)]));
    let certain = |sem: Semantics| -> Result<bool, String> {
        Ok(certain_answers(&updated, &ics, &q, &sem, &budget)
            .map_err(err)?
            .is_yes())
    };
    let summary = |r: &cqa_core::TupleRepair| {
        json!({
            "retained": r.retained.len(),
            "deleted": r.deleted.iter().map(ToString::to_string).take(5).collect::<Vec<_>>(),
            "deleted_count": r.deleted.len(),
            "distance": r.distance.to_string(),
        })
    };
    Ok(json!({
        "n": n,
        "s_repairs": s.iter().map(summary).collect::<Vec<_>>(),
        "c_repairs": c.iter().map(summary).collect::<Vec<_>>(),
        "c_distance": c_distance,
        "certain_r1_c": certain(Semantics::C)?,
        "certain_r1_s": certain(Semantics::S)?,
    }))
}

/// The block built from a graph file, with the independence number of the
/// input and whether `t` lies in every maximum independent set.
pub fn block_json(graph: &str, k: u32) -> Result<Value, String> {
    if k == 0 {
        return Err("k must be at least 1".into());
    }
    let g = SimpleGraph::parse(graph).map_err(err)?;
    if g.vertex_count() > MAX_BLOCK_INPUT {
        return Err(format!(
            "the demo accepts graphs with at most {MAX_BLOCK_INPUT} vertices"
        ));
    }
    let budget = SolveBudget::default();
    let alpha = alpha_size(&g.to_hypergraph(), &budget).map_err(err)?;
    let b = block(&g, k);
    let t_in_all = in_all_maximum_is(&b.graph.to_hypergraph(), b.t, &budget).map_err(err)?;
    let role = |v: u32| -> &'static str {
        if v == b.t {
            "t"
        } else if v == b.b {
            "b"
        } else if b.parts.g1.contains(&v) {
            "G1"
        } else if b.parts.g2.contains(&v) {
            "G2"
        } else if b.parts.i_k.contains(&v) {
            "Ik"
        } else {
            "Ik1"
        }
    };
    Ok(json!({
        "alpha": alpha,
        "k": k,
        "t_in_all_maximum": t_in_all,
        "vertices": b.graph.vertices().map(|v| json!({ "id": v, "role": role(v) })).collect::<Vec<_>>(),
        "edges": b.graph.edges().iter().map(|&(u, v)| [u, v]).collect::<Vec<_>>(),
        "file": b.to_file(),
    }))
}

/// Conflict hypergraph of an instance, with one C-repair highlighted.
pub fn hypergraph_json(instance: &str, constraints: &str) -> Result<Value, String> {
    let mut d = parse_instance(instance).map_err(|e| format!("instance {e}"))?;
    let ics = parse_constraints(constraints).map_err(|e| format!("constraints {e}"))?;
    for atom in ics.constraints().iter().flat_map(|c| &c.atoms) {
        d.schema_mut()
            .ensure_relation(&atom.relation, atom.terms.len())
            .map_err(err)?;
    }
    let h = build_conflict_hypergraph(&d, &ics);
    let budget = SolveBudget::default();
    let c = c_repairs(&d, &ics, &budget).map_err(err)?;
    let kept = c.first().map(|r| r.retained.clone()).unwrap_or_default();
    let vertices: Vec<Value> = h
        .tuples()
        .iter()
        .map(|t| json!({ "tuple": t.to_string(), "in_repair": kept.contains(t) }))
        .collect();
    let edges: Vec<Value> = h
        .graph()
        .edges()
        .iter()
        .enumerate()
        .map(|(i, e)| json!({ "constraint": h.edge_constraint(i), "members": e }))
        .collect();
    Ok(json!({
        "vertices": vertices,
        "edges": edges,
        "c_repairs": c.len(),
        "c_distance": c.first().map(|r| r.distance.to_string()),
    }))
}

fn to_js(r: Result<Value, String>) -> Result<String, JsError> {
    r.map(|v| v.to_string()).map_err(|e| JsError::new(&e))
}

#[wasm_bindgen]
pub fn example4(n: u32) -> Result<String, JsError> {
    to_js(example4_json(n))
}

#[wasm_bindgen(js_name = blockGraph)]
pub fn block_graph(graph: &str, k: u32) -> Result<String, JsError> {
    to_js(block_json(graph, k))
}

#[wasm_bindgen(js_name = conflictHypergraph)]
pub fn conflict_hypergraph(instance: &str, constraints: &str) -> Result<String, JsError> {
    to_js(hypergraph_json(instance, constraints))
}
