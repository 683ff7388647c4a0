//! The finite spectral groupoid of a model class.

use std::fmt::Write as _;
use std::sync::Arc;

use serde_json::{json, Value};

use super::{closure_leq, Arrow, Env, Param, SpectrumPoint};
use crate::logic::{Formula, Signature};
use crate::models::{eval, ModelClass, Tuples};

/// Points are every model of the class paired with every partial environment
/// over the parameter pool; arrows are all isomorphisms between the
/// underlying models, regardless of labels.
#[derive(Clone, Debug)]
pub struct SpectrumGroupoid {
    pub class: Arc<ModelClass>,
    pub params: Vec<Param>,
    pub points: Vec<SpectrumPoint>,
}

/// A connected component of the specialization relation together with the
/// indices of the sentences true at all of its points.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Component {
    pub points: Vec<usize>,
    pub shared: Vec<usize>,
}

/// `budget` parameter names per sort: `k0, k1, ..` for one sort, otherwise
/// suffixed with the sort name.
pub fn param_pool(sig: &Signature, budget: usize) -> Vec<Param> {
    let mut out = Vec::new();
    for s in sig.sort_ids() {
        for i in 0..budget {
            let name = if sig.sorts.len() == 1 {
                format!("k{i}")
            } else {
                format!("k{i}_{}", sig.sort_name(s))
            };
            out.push(Param::new(name, s));
        }
    }
    out
}

impl SpectrumGroupoid {
    pub fn build(class: Arc<ModelClass>, budget: usize) -> Self {
        let params = param_pool(&class.theory.sig, budget);
        let mut points = Vec::new();
        for (i, m) in class.models().iter().enumerate() {
            let m = Arc::new(m.clone());
            // each parameter is undefined (0) or names element v-1
            let radices: Vec<usize> = params.iter().map(|p| m.size(p.sort) + 1).collect();
            for choice in Tuples::new(radices) {
                let env: Env = params
                    .iter()
                    .zip(&choice)
                    .filter(|(_, c)| **c > 0)
                    .map(|(p, c)| (p.clone(), c - 1))
                    .collect();
                points.push(SpectrumPoint {
                    model: i,
                    structure: m.clone(),
                    env,
                });
            }
        }
        SpectrumGroupoid {
            class,
            params,
            points,
        }
    }

    /// The arrows from point `i` to point `j`.
    pub fn arrows(&self, i: usize, j: usize) -> Vec<Arrow> {
        let (a, b) = (&self.points[i], &self.points[j]);
        if a.model != b.model {
            return vec![];
        }
        self.class
            .automorphisms(a.model)
            .iter()
            .map(|h| Arrow {
                src: a.clone(),
                tgt: b.clone(),
                iso: h.clone(),
            })
            .collect()
    }

    pub fn arrow_count(&self) -> usize {
        let mut per_model = vec![0usize; self.class.len()];
        for p in &self.points {
            per_model[p.model] += 1;
        }
        per_model
            .iter()
            .enumerate()
            .map(|(m, k)| k * k * self.class.automorphisms(m).len())
            .sum()
    }

    /// Pairs `(i, j)`, `i != j`, with point `i` in the closure of point `j`.
    pub fn closure_edges(&self) -> Vec<(usize, usize)> {
        let mut out = Vec::new();
        for (i, a) in self.points.iter().enumerate() {
            for (j, b) in self.points.iter().enumerate() {
                if i != j && closure_leq(a, b).is_some() {
                    out.push((i, j));
                }
            }
        }
        out
    }

    /// Components of the closure relation taken in both directions, each with
    /// the sentences (closed formulas) that hold at all of its points.
    pub fn components(&self, sentences: &[Formula]) -> Vec<Component> {
        let n = self.points.len();
        let mut parent: Vec<usize> = (0..n).collect();
        fn find(parent: &mut [usize], mut x: usize) -> usize {
            while parent[x] != x {
                parent[x] = parent[parent[x]];
                x = parent[x];
            }
            x
        }
        for (i, j) in self.closure_edges() {
            let (a, b) = (find(&mut parent, i), find(&mut parent, j));
            if a != b {
                parent[a.max(b)] = a.min(b);
            }
        }
        let mut groups: Vec<Vec<usize>> = Vec::new();
        let mut slot = vec![usize::MAX; n];
        for i in 0..n {
            let r = find(&mut parent, i);
            if slot[r] == usize::MAX {
                slot[r] = groups.len();
                groups.push(Vec::new());
            }
            groups[slot[r]].push(i);
        }
        let truth: Vec<Vec<bool>> = (0..self.class.len())
            .map(|m| {
                sentences
                    .iter()
                    .map(|s| eval(self.class.get(m), s).is_ok_and(|d| d.contains(&[])))
                    .collect()
            })
            .collect();
        groups
            .into_iter()
            .map(|points| {
                let shared = (0..sentences.len())
                    .filter(|s| points.iter().all(|p| truth[self.points[*p].model][*s]))
                    .collect();
                Component { points, shared }
            })
            .collect()
    }

    pub fn to_json(&self) -> Value {
        let points: Vec<Value> = self
            .points
            .iter()
            .enumerate()
            .map(|(i, p)| {
                let env: Vec<Value> = p
                    .env
                    .iter()
                    .map(|(k, v)| {
                        json!({
                            "param": k.name,
                            "sort": self.class.theory.sig.sort_name(k.sort),
                            "value": v,
                        })
                    })
                    .collect();
                json!({ "id": i, "model": p.model, "sizes": p.structure.sizes(), "env": env })
            })
            .collect();
        let mut arrows = Vec::new();
        for i in 0..self.points.len() {
            for j in 0..self.points.len() {
                for a in self.arrows(i, j) {
                    arrows.push(json!({ "src": i, "tgt": j, "iso": a.iso.maps }));
                }
            }
        }
        let closure: Vec<Value> = self
            .closure_edges()
            .into_iter()
            .map(|(i, j)| json!([i, j]))
            .collect();
        json!({
            "theory": self.class.theory.name,
            "n": self.class.n,
            "params": self.params.iter().map(|p| p.name.clone()).collect::<Vec<_>>(),
            "points": points,
            "arrows": arrows,
            "closure": closure,
        })
    }

    /// The specialization preorder as a graph; an edge `i -> j` means point
    /// `i` lies in the closure of point `j`.
    pub fn to_dot(&self) -> String {
        let mut out = String::from("digraph spectrum {\n");
        for (i, p) in self.points.iter().enumerate() {
            let env: Vec<String> = p.env.iter().map(|(k, v)| format!("{k}={v}")).collect();
            let _ = writeln!(
                out,
                "  p{i} [label=\"M{} {{{}}}\"];",
                p.model,
                env.join(",")
            );
        }
        for (i, j) in self.closure_edges() {
            let _ = writeln!(out, "  p{i} -> p{j};");
        }
        out.push_str("}\n");
        out
    }
}
