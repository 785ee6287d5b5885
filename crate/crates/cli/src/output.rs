use std::io::{self, Write};

use clap::ValueEnum;
use cqa_core::{AnswerMode, AnswerSet, ConflictHypergraph, DbTuple, RepairList, Semantics};
use serde_json::{json, Value};

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Text,
    JsonLines,
}

/// Writes results to standard output in the chosen format. JSON lines
/// carry the same fields as the text lines, one object per line.
pub struct Printer {
    format: Format,
    out: io::StdoutLock<'static>,
}

fn tuple_strings<'a>(ts: impl IntoIterator<Item = &'a DbTuple>) -> Vec<String> {
    ts.into_iter().map(ToString::to_string).collect()
}

impl Printer {
    pub fn new(format: Format) -> Self {
        Printer {
            format,
            out: io::stdout().lock(),
        }
    }

    fn json(&mut self, v: Value) -> io::Result<()> {
        writeln!(self.out, "{v}")
    }

    pub fn raw(&mut self, text: &str) -> anyhow::Result<()> {
        self.out.write_all(text.as_bytes())?;
        Ok(())
    }

    pub fn check(&mut self, h: &ConflictHypergraph) -> anyhow::Result<()> {
        let edges = h.graph().edges();
        match self.format {
            Format::Text => {
                if edges.is_empty() {
                    writeln!(self.out, "consistent")?;
                } else {
                    writeln!(self.out, "inconsistent: {} violating sets", edges.len())?;
                }
            }
            Format::JsonLines => {
                self.json(json!({ "consistent": edges.is_empty(), "violating_sets": edges.len() }))?
            }
        }
        for (i, e) in edges.iter().enumerate() {
            let tuples = tuple_strings(e.iter().map(|&v| h.tuple(v)));
            let constraint = h.edge_constraint(i);
            match self.format {
                Format::Text => writeln!(self.out, "{constraint}: {}", tuples.join(" "))?,
                Format::JsonLines => {
                    self.json(json!({ "constraint": constraint, "tuples": tuples }))?
                }
            }
        }
        Ok(())
    }

    pub fn repairs(&mut self, list: &RepairList) -> anyhow::Result<()> {
        match list {
            RepairList::Tuple(reps) => {
                for (i, r) in reps.iter().enumerate() {
                    match self.format {
                        Format::Text => {
                            if i > 0 {
                                writeln!(self.out)?;
                            }
                            write!(self.out, "repair {}\n{r}", i + 1)?;
                        }
                        Format::JsonLines => self.json(json!({
                            "repair": i + 1,
                            "retained": tuple_strings(&r.retained),
                            "deleted": tuple_strings(&r.deleted),
                            "distance": r.distance.to_string(),
                        }))?,
                    }
                }
            }
            RepairList::Attribute(reps) => {
                for (i, r) in reps.iter().enumerate() {
                    match self.format {
                        Format::Text => {
                            if i > 0 {
                                writeln!(self.out)?;
                            }
                            write!(self.out, "repair {}\n{r}", i + 1)?;
                        }
                        Format::JsonLines => {
                            let changes: Vec<Value> = r
                                .changes
                                .iter()
                                .map(|c| {
                                    json!({
                                        "tuple": c.tuple.to_string(),
                                        "attribute": c.attribute,
                                        "value": c.new_value.to_string(),
                                    })
                                })
                                .collect();
                            self.json(json!({
                                "repair": i + 1,
                                "changes": changes,
                                "distance": r.cost.to_string(),
                            }))?
                        }
                    }
                }
            }
        }
        Ok(())
    }

    pub fn no_repair(&mut self) -> anyhow::Result<()> {
        match self.format {
            Format::Text => writeln!(self.out, "no repair")?,
            Format::JsonLines => self.json(json!({ "repair": null }))?,
        }
        Ok(())
    }

    /// A header line naming the mode and semantics, then the answers. In
    /// text the header is a `#` comment so the body stays easy to parse.
    pub fn answers(
        &mut self,
        a: &AnswerSet,
        mode: AnswerMode,
        sem: &Semantics,
    ) -> anyhow::Result<()> {
        if a.vacuous {
            eprintln!("note: no repair exists, so the answer is vacuous");
        }
        match self.format {
            Format::Text => write!(self.out, "# {mode} answers under {sem}-repairs\n{a}")?,
            Format::JsonLines => {
                self.json(json!({
                    "mode": mode.to_string(),
                    "semantics": sem.to_string(),
                    "boolean": a.is_boolean(),
                    "vacuous": a.vacuous,
                }))?;
                if a.is_boolean() {
                    self.json(json!({ "answer": if a.is_yes() { "yes" } else { "no" } }))?;
                } else {
                    for t in &a.tuples {
                        let vals: Vec<String> = t.iter().map(ToString::to_string).collect();
                        self.json(json!({ "answer": vals }))?;
                    }
                }
            }
        }
        Ok(())
    }
}
