//! Equivariant families over a model class and bounded definability search.
//!
//! Over a finite class compactness is automatic, so a family is definable
//! exactly when it is equivariant and some formula realizes it; the search
//! below looks for such a formula up to a depth bound.

mod space;

use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

use serde_json::{json, Value};

pub use space::{Bits, Candidate, FormulaSpace};

use crate::logic::{Context, Formula, SortId};
use crate::models::{eval, DefinableSet, Elem, FiniteStructure, Homomorphism, ModelClass};
use crate::spectrum::{in_open, BasicOpen, SpectrumGroupoid};

/// Wording used in reports in place of the compactness clause.
pub const COMPACTNESS_NOTE: &str = "finite-scale: compactness automatic";

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum DefinabilityError {
    Shape(String),
    Json(String),
}

impl fmt::Display for DefinabilityError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            DefinabilityError::Shape(m) => write!(f, "malformed family: {m}"),
            DefinabilityError::Json(m) => write!(f, "family file: {m}"),
        }
    }
}

impl std::error::Error for DefinabilityError {}

/// `M ↦ S_M ⊆ carriers(ctx)` for every member of a class.
#[derive(Clone, Debug)]
pub struct EquivariantFamily {
    pub class: Arc<ModelClass>,
    pub ctx: Context,
    pub sets: Vec<DefinableSet>,
}

/// An automorphism of member `model` moving `tuple` into or out of the
/// family: `tuple ∈ S_M` but `iso(tuple) ∉ S_M`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EquivarianceWitness {
    pub model: usize,
    pub iso: Homomorphism,
    pub tuple: Vec<Elem>,
}

impl EquivarianceWitness {
    pub fn to_json(&self) -> Value {
        json!({ "model": self.model, "iso": self.iso.maps, "tuple": self.tuple })
    }
}

fn hex(bytes: &[u8]) -> String {
    bytes.iter().map(|b| format!("{b:02x}")).collect()
}

impl EquivariantFamily {
    pub fn new(
        class: Arc<ModelClass>,
        ctx: Context,
        sets: Vec<DefinableSet>,
    ) -> Result<Self, DefinabilityError> {
        if sets.len() != class.len() {
            return Err(DefinabilityError::Shape(format!(
                "{} sets for {} models",
                sets.len(),
                class.len()
            )));
        }
        for (i, s) in sets.iter().enumerate() {
            let expected: usize = ctx.sorts().iter().map(|x| class.get(i).size(*x)).product();
            if s.ctx().sorts() != ctx.sorts() || s.bits().len() != expected {
                return Err(DefinabilityError::Shape(format!("set {i} has the wrong sorts")));
            }
        }
        Ok(EquivariantFamily { class, ctx, sets })
    }

    pub fn from_fn(
        class: Arc<ModelClass>,
        ctx: Context,
        member: impl Fn(usize, &FiniteStructure, &[Elem]) -> bool,
    ) -> Self {
        let sets = class
            .models()
            .iter()
            .enumerate()
            .map(|(i, m)| {
                let chosen: Vec<Vec<Elem>> = m
                    .tuples(&ctx.sorts())
                    .filter(|t| member(i, m, t))
                    .collect();
                DefinableSet::from_tuples(m, ctx.clone(), &chosen)
            })
            .collect();
        EquivariantFamily { class, ctx, sets }
    }

    /// `M ↦ φ^M`.
    pub fn from_formula(class: Arc<ModelClass>, f: &Formula) -> Result<Self, DefinabilityError> {
        let sets = class
            .models()
            .iter()
            .map(|m| eval(m, f).map_err(|e| DefinabilityError::Shape(e.to_string())))
            .collect::<Result<Vec<_>, _>>()?;
        Ok(EquivariantFamily {
            class,
            ctx: f.ctx().clone(),
            sets,
        })
    }

    /// Reads `{"context": [[name, sort], ..], "sets": [{"model": hex canonical
    /// form, "tuples": [[..], ..]}, ..]}`; tuples are over the canonical
    /// representative, every member must be listed.
    pub fn from_json(class: Arc<ModelClass>, v: &Value) -> Result<Self, DefinabilityError> {
        let bad = |m: &str| DefinabilityError::Json(m.to_string());
        let sig = &class.theory.sig;
        let mut vars = Vec::new();
        for item in v["context"].as_array().ok_or_else(|| bad("missing context"))? {
            let name = item[0].as_str().ok_or_else(|| bad("context entry needs a name"))?;
            let sort = item[1].as_str().ok_or_else(|| bad("context entry needs a sort"))?;
            let s = sig.sort_id(sort).ok_or_else(|| bad(&format!("unknown sort {sort}")))?;
            vars.push((name.to_string(), s));
        }
        let ctx = Context::new(vars).map_err(|e| bad(&e.to_string()))?;
        let mut by_form: BTreeMap<String, Vec<Vec<Elem>>> = BTreeMap::new();
        for entry in v["sets"].as_array().ok_or_else(|| bad("missing sets"))? {
            let form = entry["model"].as_str().ok_or_else(|| bad("set entry needs a model"))?;
            let tuples: Vec<Vec<Elem>> = serde_json::from_value(entry["tuples"].clone())
                .map_err(|e| bad(&e.to_string()))?;
            if by_form.insert(form.to_string(), tuples).is_some() {
                return Err(bad(&format!("model {form} listed twice")));
            }
        }
        let mut sets = Vec::new();
        for (i, m) in class.models().iter().enumerate() {
            let key = hex(class.form(i));
            let tuples = by_form
                .remove(&key)
                .ok_or_else(|| bad(&format!("no set for model {i} ({key})")))?;
            for t in &tuples {
                let ok = t.len() == ctx.len()
                    && t.iter().zip(ctx.sorts()).all(|(a, s)| *a < m.size(s));
                if !ok {
                    return Err(bad(&format!("tuple {t:?} out of range in model {i}")));
                }
            }
            sets.push(DefinableSet::from_tuples(m, ctx.clone(), &tuples));
        }
        if let Some(extra) = by_form.keys().next() {
            return Err(bad(&format!("model {extra} is not in the class")));
        }
        Ok(EquivariantFamily { class, ctx, sets })
    }

    pub fn to_json(&self) -> Value {
        let sig = &self.class.theory.sig;
        let ctx: Vec<Value> = self
            .ctx
            .vars()
            .iter()
            .map(|(n, s)| json!([n, sig.sort_name(*s)]))
            .collect();
        let sets: Vec<Value> = self
            .sets
            .iter()
            .enumerate()
            .map(|(i, s)| json!({ "model": hex(self.class.form(i)), "tuples": s.tuples() }))
            .collect();
        json!({ "context": ctx, "sets": sets })
    }

    fn bits(&self) -> Bits {
        let total: usize = self.sets.iter().map(|s| s.bits().len()).sum();
        let mut out = vec![0u64; total.div_ceil(64)];
        for (i, b) in self.sets.iter().flat_map(|s| s.bits().iter()).enumerate() {
            if *b {
                out[i / 64] |= 1 << (i % 64);
            }
        }
        out
    }

    /// First automorphism, in class and enumeration order, that does not
    /// preserve the family.
    pub fn equivariance_witness(&self) -> Option<EquivarianceWitness> {
        let sorts = self.ctx.sorts();
        for (i, set) in self.sets.iter().enumerate() {
            for iso in self.class.automorphisms(i) {
                for t in set.tuples() {
                    if !set.contains(&iso.apply_tuple(&sorts, &t)) {
                        return Some(EquivarianceWitness {
                            model: i,
                            iso: iso.clone(),
                            tuple: t,
                        });
                    }
                }
            }
        }
        None
    }

    /// `α(S_M) = S_N` for every isomorphism `α: M ≅ N` in the class.
    pub fn is_equivariant(&self) -> bool {
        self.equivariance_witness().is_none()
    }

    /// `φ^M = S_M` for every member.
    pub fn defined_by(&self, f: &Formula) -> bool {
        f.ctx().sorts() == self.ctx.sorts()
            && self
                .class
                .models()
                .iter()
                .zip(&self.sets)
                .all(|(m, s)| eval(m, f).is_ok_and(|d| d.bits() == s.bits()))
    }
}

/// Outcome of a bounded definability search.
#[derive(Clone, Debug)]
pub enum Definability {
    /// A formula, re-verified by evaluation on every member.
    Found(Formula),
    NotEquivariant(EquivarianceWitness),
    /// Nothing up to the bounds; relative to the class and bounds only.
    NoneAtBound { depth: usize, term_depth: usize },
}

impl Definability {
    pub fn formula(&self) -> Option<&Formula> {
        match self {
            Definability::Found(f) => Some(f),
            _ => None,
        }
    }

    pub fn verdict(&self) -> &'static str {
        match self {
            Definability::Found(_) => "definable",
            Definability::NotEquivariant(_) => "not equivariant",
            Definability::NoneAtBound { .. } => "none at bound",
        }
    }
}

/// The first formula in canonical order of depth at most `depth` defining
/// the family.
pub fn find_defining_formula(
    family: &EquivariantFamily,
    depth: usize,
    term_depth: usize,
) -> Definability {
    if let Some(w) = family.equivariance_witness() {
        return Definability::NotEquivariant(w);
    }
    let target = family.bits();
    let mut space = FormulaSpace::new(family.class.theory.sig.clone(), family.class.models(), term_depth);
    let level = space.level(&family.ctx.sorts(), depth);
    for c in level.iter() {
        if c.bits != target {
            continue;
        }
        if let Ok(f) = Formula::new(&family.class.theory.sig, family.ctx.clone(), c.body.clone()) {
            if family.defined_by(&f) {
                return Definability::Found(f);
            }
        }
    }
    Definability::NoneAtBound { depth, term_depth }
}

/// Formulas whose extension lies inside the family everywhere, one per
/// extension, and whether together they cover it.
#[derive(Clone, Debug)]
pub struct Pieces {
    pub formulas: Vec<Formula>,
    pub covers: bool,
}

pub fn definable_pieces(
    family: &EquivariantFamily,
    depth: usize,
    term_depth: usize,
) -> Result<Pieces, EquivarianceWitness> {
    if let Some(w) = family.equivariance_witness() {
        return Err(w);
    }
    let target = family.bits();
    let mut space = FormulaSpace::new(family.class.theory.sig.clone(), family.class.models(), term_depth);
    let level = space.level(&family.ctx.sorts(), depth);
    let mut union = vec![0u64; target.len()];
    let mut formulas = Vec::new();
    for c in level.iter() {
        if c.bits.iter().zip(&target).all(|(a, b)| a & !b == 0) {
            for (u, w) in union.iter_mut().zip(&c.bits) {
                *u |= w;
            }
            if let Ok(f) = Formula::new(&family.class.theory.sig, family.ctx.clone(), c.body.clone()) {
                formulas.push(f);
            }
        }
    }
    Ok(Pieces {
        formulas,
        covers: union == target,
    })
}

/// `s_M: φ^M -> ψ^M` for every member.
#[derive(Clone, Debug)]
pub struct FunctionFamily {
    pub class: Arc<ModelClass>,
    pub source: Formula,
    pub target: Formula,
    pub maps: Vec<BTreeMap<Vec<Elem>, Vec<Elem>>>,
}

impl FunctionFamily {
    pub fn new(
        class: Arc<ModelClass>,
        source: Formula,
        target: Formula,
        maps: Vec<BTreeMap<Vec<Elem>, Vec<Elem>>>,
    ) -> Result<Self, DefinabilityError> {
        let shape = |m: String| Err(DefinabilityError::Shape(m));
        if maps.len() != class.len() {
            return shape(format!("{} maps for {} models", maps.len(), class.len()));
        }
        for (i, (m, map)) in class.models().iter().zip(&maps).enumerate() {
            let dom = eval(m, &source).map_err(|e| DefinabilityError::Shape(e.to_string()))?;
            let cod = eval(m, &target).map_err(|e| DefinabilityError::Shape(e.to_string()))?;
            if dom.len() != map.len() || map.keys().any(|a| !dom.contains(a)) {
                return shape(format!("map {i} is not total on the source"));
            }
            if let Some((a, _)) = map.iter().find(|(_, b)| !cod.contains(b)) {
                return shape(format!("map {i} sends {a:?} outside the target"));
            }
        }
        Ok(FunctionFamily {
            class,
            source,
            target,
            maps,
        })
    }

    pub fn from_fn(
        class: Arc<ModelClass>,
        source: Formula,
        target: Formula,
        f: impl Fn(usize, &FiniteStructure, &[Elem]) -> Vec<Elem>,
    ) -> Result<Self, DefinabilityError> {
        let mut maps = Vec::new();
        for (i, m) in class.models().iter().enumerate() {
            let dom = eval(m, &source).map_err(|e| DefinabilityError::Shape(e.to_string()))?;
            maps.push(dom.tuples().into_iter().map(|a| (a.clone(), f(i, m, &a))).collect());
        }
        Self::new(class, source, target, maps)
    }

    /// Context of the graph: the source variables followed by the target
    /// variables, primed where names clash.
    pub fn graph_context(&self) -> Context {
        let mut vars: Vec<(String, SortId)> = self.source.ctx().vars().to_vec();
        for (n, s) in self.target.ctx().vars() {
            let mut name = n.clone();
            while vars.iter().any(|(v, _)| *v == name) {
                name.push('\'');
            }
            vars.push((name, *s));
        }
        Context::new(vars).expect("names made distinct")
    }

    pub fn graph(&self) -> EquivariantFamily {
        let ctx = self.graph_context();
        let k = self.source.ctx().len();
        let maps = self.maps.clone();
        EquivariantFamily::from_fn(self.class.clone(), ctx, move |i, _, t| {
            maps[i].get(&t[..k]).is_some_and(|b| b[..] == t[k..])
        })
    }
}

/// A formula `σ(x, y)` whose extension is the graph of every `s_M`.
pub fn find_defining_map(family: &FunctionFamily, depth: usize, term_depth: usize) -> Definability {
    find_defining_formula(&family.graph(), depth, term_depth)
}

/// Values `e(ν) ∈ ψ^{M_ν}` at the points `ν` of a basic open.
#[derive(Clone, Debug)]
pub struct PartialSection {
    pub open: BasicOpen,
    pub target: Formula,
    pub values: BTreeMap<usize, Vec<Elem>>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ExtensionError {
    /// `point` of the open has no value.
    Missing { point: usize },
    /// An arrow `from -> to` fixing the parameters does not carry the value
    /// at `from` to the value at `to`.
    NotEquivariant {
        from: usize,
        to: usize,
        iso: Homomorphism,
    },
    /// No point of the open names `tuple` in member `model`.
    Uncovered { model: usize, tuple: Vec<Elem> },
    Shape(String),
}

impl fmt::Display for ExtensionError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ExtensionError::Missing { point } => write!(f, "no value at point {point}"),
            ExtensionError::NotEquivariant { from, to, .. } => {
                write!(f, "section not equivariant along an arrow {from} -> {to}")
            }
            ExtensionError::Uncovered { model, tuple } => {
                write!(f, "no labelled point names {tuple:?} in model {model}")
            }
            ExtensionError::Shape(m) => write!(f, "{m}"),
        }
    }
}

impl std::error::Error for ExtensionError {}

impl PartialSection {
    pub fn from_fn(
        groupoid: &SpectrumGroupoid,
        open: BasicOpen,
        target: Formula,
        f: impl Fn(&crate::spectrum::SpectrumPoint) -> Vec<Elem>,
    ) -> Self {
        let values = groupoid
            .points
            .iter()
            .enumerate()
            .filter(|(_, p)| in_open(p, &open))
            .map(|(i, p)| (i, f(p)))
            .collect();
        PartialSection {
            open,
            target,
            values,
        }
    }
}

/// The points of the open, grouped by model.
fn open_points(section: &PartialSection, groupoid: &SpectrumGroupoid) -> Vec<Vec<usize>> {
    let mut out = vec![Vec::new(); groupoid.class.len()];
    for (i, p) in groupoid.points.iter().enumerate() {
        if in_open(p, &section.open) {
            out[p.model].push(i);
        }
    }
    out
}

/// Checks that `e(ν') = α(e(ν))` for every arrow `α: ν -> ν'` between points
/// of the open that fixes the open's parameters.
pub fn check_relative_equivariance(
    section: &PartialSection,
    groupoid: &SpectrumGroupoid,
) -> Result<(), ExtensionError> {
    let params = &section.open.params;
    let out_sorts = section.target.ctx().sorts();
    for (model, pts) in open_points(section, groupoid).iter().enumerate() {
        for &i in pts {
            let vi = section.values.get(&i).ok_or(ExtensionError::Missing { point: i })?;
            let ki = groupoid.points[i].values(params).expect("point in the open");
            for &j in pts {
                let vj = section.values.get(&j).ok_or(ExtensionError::Missing { point: j })?;
                let kj = groupoid.points[j].values(params).expect("point in the open");
                for iso in groupoid.class.automorphisms(model) {
                    let moves_k = params
                        .iter()
                        .zip(ki.iter().zip(&kj))
                        .all(|(p, (a, b))| iso.apply(p.sort, *a) == *b);
                    if moves_k && iso.apply_tuple(&out_sorts, vi) != *vj {
                        return Err(ExtensionError::NotEquivariant {
                            from: i,
                            to: j,
                            iso: iso.clone(),
                        });
                    }
                }
            }
        }
    }
    Ok(())
}

/// The unique equivariant extension `ẽ⟨M, a⟩ = α⁻¹(e(ν))` for any point `ν`
/// on `M` and automorphism `α` with `ν(k) = α(a)`. Every such choice is
/// computed and required to agree.
pub fn equivariant_extension(
    section: &PartialSection,
    groupoid: &SpectrumGroupoid,
) -> Result<FunctionFamily, ExtensionError> {
    check_relative_equivariance(section, groupoid)?;
    let params = &section.open.params;
    let out_sorts = section.target.ctx().sorts();
    let by_model = open_points(section, groupoid);
    let mut maps = Vec::new();
    for (model, m) in groupoid.class.models().iter().enumerate() {
        let dom = eval(m, &section.open.formula).map_err(|e| ExtensionError::Shape(e.to_string()))?;
        let mut map = BTreeMap::new();
        for a in dom.tuples() {
            let mut value: Option<Vec<Elem>> = None;
            for alpha in groupoid.class.automorphisms(model) {
                let moved: Vec<Elem> = params
                    .iter()
                    .zip(&a)
                    .map(|(p, x)| alpha.apply(p.sort, *x))
                    .collect();
                let back = alpha.inverse();
                for &j in &by_model[model] {
                    if groupoid.points[j].values(params).as_deref() != Some(&moved[..]) {
                        continue;
                    }
                    let v = back.apply_tuple(&out_sorts, &section.values[&j]);
                    match &value {
                        None => value = Some(v),
                        Some(old) => assert_eq!(*old, v, "extension depends on the chosen arrow"),
                    }
                }
            }
            let v = value.ok_or(ExtensionError::Uncovered {
                model,
                tuple: a.clone(),
            })?;
            map.insert(a, v);
        }
        maps.push(map);
    }
    FunctionFamily::new(
        groupoid.class.clone(),
        section.open.formula.clone(),
        section.target.clone(),
        maps,
    )
    .map_err(|e| ExtensionError::Shape(e.to_string()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cli::{parse_formula, parse_theory};
    use crate::logic::FuncId;
    use crate::spectrum::Param;

    fn groups(n: usize) -> Arc<ModelClass> {
        let t = Arc::new(parse_theory(include_str!("../../theories/groups.thy")).unwrap());
        Arc::new(crate::models::enumerate_models(&t, n).unwrap())
    }

    const MUL: FuncId = FuncId(1);
    const INV: FuncId = FuncId(2);

    #[test]
    fn formula_families_are_equivariant() {
        let class = groups(4);
        let sig = class.theory.sig.clone();
        for text in ["[x:G] mul(x, x) = e", "[x:G] exists y:G. x = mul(y, y)", "[x:G, y:G] mul(x, y) = mul(y, x)"] {
            let f = parse_formula(&sig, text).unwrap();
            assert!(EquivariantFamily::from_formula(class.clone(), &f).unwrap().is_equivariant());
        }
        let empty = EquivariantFamily::from_fn(class, Context::of_sorts(&[SortId(0)]), |_, _, _| false);
        assert!(empty.is_equivariant());
    }

    #[test]
    fn least_element_is_not_equivariant() {
        let class = groups(3);
        let fam = EquivariantFamily::from_fn(class.clone(), Context::of_sorts(&[SortId(0)]), |_, m, t| {
            m.size(SortId(0)) > 1 && t[0] == 1
        });
        let w = fam.equivariance_witness().unwrap();
        let m = class.get(w.model);
        assert!(crate::models::is_isomorphism(m, m, &w.iso));
        assert!(fam.sets[w.model].contains(&w.tuple));
        assert!(!fam.sets[w.model].contains(&w.iso.apply_tuple(&[SortId(0)], &w.tuple)));
        assert!(matches!(find_defining_formula(&fam, 2, 2), Definability::NotEquivariant(_)));
        assert!(definable_pieces(&fam, 2, 2).is_err());
    }

    #[test]
    fn identity_element_and_full_carrier() {
        let class = groups(4);
        let ctx = Context::new(vec![("x".into(), SortId(0))]).unwrap();
        let ids = EquivariantFamily::from_fn(class.clone(), ctx.clone(), |_, m, t| t[0] == m.apply(FuncId(0), &[]));
        let f = find_defining_formula(&ids, 1, 2);
        let f = f.formula().unwrap();
        let idem = parse_formula(&class.theory.sig, "[x:G] mul(x, x) = x").unwrap();
        assert!(ids.defined_by(&idem));
        assert!(ids.defined_by(f));
        let all = EquivariantFamily::from_fn(class, ctx, |_, _, _| true);
        assert_eq!(find_defining_formula(&all, 1, 2).formula().unwrap().body(), &crate::logic::Node::True);
    }

    #[test]
    fn squares_need_a_quantifier() {
        let class = groups(4);
        let ctx = Context::new(vec![("x".into(), SortId(0))]).unwrap();
        let squares = EquivariantFamily::from_fn(class, ctx, |_, m, t| {
            (0..m.size(SortId(0))).any(|y| m.apply(MUL, &[y, y]) == t[0])
        });
        assert!(matches!(find_defining_formula(&squares, 1, 2), Definability::NoneAtBound { .. }));
        let f = find_defining_formula(&squares, 2, 2);
        assert!(squares.defined_by(f.formula().unwrap()));
        let pieces = definable_pieces(&squares, 2, 2).unwrap();
        assert!(pieces.covers);
        let q = parse_formula(&squares.class.theory.sig, "[x:G] exists y:G. x = mul(y, y)").unwrap();
        assert!(squares.defined_by(&q));
    }

    #[test]
    fn inversion_and_squaring_maps() {
        let class = groups(4);
        let sig = class.theory.sig.clone();
        let x = parse_formula(&sig, "[x:G] true").unwrap();
        let y = parse_formula(&sig, "[y:G] true").unwrap();
        let inv = FunctionFamily::from_fn(class.clone(), x.clone(), y.clone(), |_, m, a| vec![m.apply(INV, a)]).unwrap();
        let sigma = find_defining_map(&inv, 1, 2);
        let sigma = sigma.formula().unwrap();
        let graph = parse_formula(&sig, "[x:G, y:G] mul(x, y) = e").unwrap();
        assert!(inv.graph().defined_by(&graph));
        assert!(inv.graph().defined_by(sigma));
        let sq = FunctionFamily::from_fn(class.clone(), x.clone(), y, |_, m, a| vec![m.apply(MUL, &[a[0], a[0]])]).unwrap();
        assert!(sq.graph().defined_by(find_defining_map(&sq, 1, 2).formula().unwrap()));
        let id = FunctionFamily::from_fn(class, x.clone(), x, |_, _, a| a.to_vec()).unwrap();
        assert_eq!(id.graph_context().name(1), "x'");
        let f = find_defining_map(&id, 1, 2);
        assert_eq!(crate::logic::print_node(&id.class.theory.sig, &id.graph_context(), f.formula().unwrap().body()), "x = x'");
    }

    #[test]
    fn json_round_trip() {
        let class = groups(3);
        let f = parse_formula(&class.theory.sig, "[x:G] mul(x, x) = e").unwrap();
        let fam = EquivariantFamily::from_formula(class.clone(), &f).unwrap();
        let back = EquivariantFamily::from_json(class.clone(), &fam.to_json()).unwrap();
        assert_eq!(back.sets, fam.sets);
        let mut v = fam.to_json();
        v["sets"].as_array_mut().unwrap().pop();
        assert!(EquivariantFamily::from_json(class, &v).is_err());
    }

    fn inverse_section(class: Arc<ModelClass>) -> (SpectrumGroupoid, PartialSection) {
        let g = SpectrumGroupoid::build(class.clone(), 1);
        let sig = &class.theory.sig;
        let k = Param::new("k0", SortId(0));
        let open = BasicOpen::new(parse_formula(sig, "[x:G] true").unwrap(), vec![k.clone()]).unwrap();
        let target = parse_formula(sig, "[y:G] true").unwrap();
        let s = PartialSection::from_fn(&g, open, target, |p| vec![p.structure.apply(INV, &[p.value(&k).unwrap()])]);
        (g, s)
    }

    #[test]
    fn extension_of_inverse_section() {
        let class = groups(4);
        let (g, s) = inverse_section(class.clone());
        let ext = equivariant_extension(&s, &g).unwrap();
        for (i, m) in class.models().iter().enumerate() {
            for a in 0..m.size(SortId(0)) {
                assert_eq!(ext.maps[i][&vec![a]], vec![m.apply(INV, &[a])]);
            }
        }
    }

    #[test]
    fn identity_section_extends_to_identity() {
        let class = groups(3);
        let g = SpectrumGroupoid::build(class.clone(), 1);
        let sig = &class.theory.sig;
        let k = Param::new("k0", SortId(0));
        let open = BasicOpen::new(parse_formula(sig, "[x:G] true").unwrap(), vec![k.clone()]).unwrap();
        let s = PartialSection::from_fn(&g, open, parse_formula(sig, "[y:G] true").unwrap(), |p| vec![p.value(&k).unwrap()]);
        let ext = equivariant_extension(&s, &g).unwrap();
        assert!(ext.maps.iter().all(|m| m.iter().all(|(a, b)| a == b)));
    }

    #[test]
    fn broken_section_is_rejected() {
        let class = groups(3);
        let (g, mut s) = inverse_section(class);
        // on Z3 send the label 1 to itself instead of its inverse
        let (idx, _) = g
            .points
            .iter()
            .enumerate()
            .find(|(_, p)| p.structure.size(SortId(0)) == 3 && p.env.values().next() == Some(&1))
            .unwrap();
        s.values.insert(idx, vec![1]);
        assert!(matches!(equivariant_extension(&s, &g), Err(ExtensionError::NotEquivariant { .. })));
    }
}
