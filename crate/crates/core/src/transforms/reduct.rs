//! The reduct `I*N` of a target model along an interpretation.

use super::TransformError;
use crate::logic::Interpretation;
use crate::models::{eval, is_model, FiniteStructure, Homomorphism};

pub fn reduct(n: &FiniteStructure, i: &Interpretation) -> Result<FiniteStructure, TransformError> {
    if !is_model(n, &i.target) {
        return Err(TransformError::NotAModel(i.target.name.clone()));
    }
    let ssig = i.source.sig.clone();
    let sizes: Vec<usize> = ssig.sort_ids().map(|s| n.size(i.map_sort(s))).collect();
    let mut funcs = Vec::new();
    for f in ssig.func_ids() {
        let sym = ssig.func(f);
        let graph = eval(n, &i.func_images[f.0])?;
        let k = sizes[sym.result.0];
        let mut table = Vec::new();
        for args in crate::models::Tuples::new(sym.args.iter().map(|s| sizes[s.0]).collect()) {
            let mut hits = (0..k).filter(|y| {
                let mut t = args.clone();
                t.push(*y);
                graph.contains(&t)
            });
            match (hits.next(), hits.next()) {
                (Some(y), None) => table.push(y),
                _ => {
                    return Err(TransformError::NotFunctional {
                        symbol: sym.name.clone(),
                        tuple: args,
                    })
                }
            }
        }
        funcs.push(table);
    }
    let rels = ssig
        .rel_ids()
        .map(|r| eval(n, &i.rel_images[r.0]).map(|d| d.bits().to_vec()))
        .collect::<Result<Vec<_>, _>>()?;
    let m = FiniteStructure::new(ssig, sizes, funcs, rels)?;
    if !is_model(&m, &i.source) {
        return Err(TransformError::NotAModel(i.source.name.clone()));
    }
    Ok(m)
}

/// `I*h`: the components of `h` at the images of the source sorts.
pub fn reduct_hom(h: &Homomorphism, i: &Interpretation) -> Homomorphism {
    Homomorphism {
        maps: i
            .source
            .sig
            .sort_ids()
            .map(|s| h.maps[i.map_sort(s).0].clone())
            .collect(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cli::{parse_formula_in, parse_theory};
    use crate::logic::{Context, FuncId, SortId};
    use crate::models::{enumerate_models, satisfies};
    use std::sync::Arc;

    fn groups() -> Arc<crate::logic::Theory> {
        Arc::new(parse_theory(include_str!("../../theories/groups.thy")).unwrap())
    }

    #[test]
    fn identity_reduct_is_the_model() {
        let t = groups();
        let id = Interpretation::identity(t.clone());
        for m in enumerate_models(&t, 4).unwrap().models() {
            assert_eq!(&reduct(m, &id).unwrap(), m);
        }
    }

    #[test]
    fn underlying_pointed_set_of_z4() {
        let g = groups();
        let p = Arc::new(parse_theory(include_str!("../../theories/pointed_sets.thy")).unwrap());
        let ctx = Context::new(vec![("y".into(), SortId(0))]).unwrap();
        let pt = parse_formula_in(&g.sig, &ctx, "y = e").unwrap();
        let i = Interpretation::new("forget", p, g.clone(), vec![SortId(0)], vec![pt], vec![]).unwrap();
        let z4 = FiniteStructure::from_fn(
            g.sig.clone(),
            vec![4],
            |f, a| match f.0 {
                0 => 0,
                1 => (a[0] + a[1]) % 4,
                _ => (4 - a[0]) % 4,
            },
            |_, _| false,
        )
        .unwrap();
        let r = reduct(&z4, &i).unwrap();
        assert_eq!(r.sizes(), &[4]);
        assert_eq!(r.func_table(FuncId(0)), &[0]);
    }

    #[test]
    fn translated_axioms_hold_in_reducts() {
        let g = groups();
        let p = Arc::new(parse_theory(include_str!("../../theories/pointed_sets.thy")).unwrap());
        let ctx = Context::new(vec![("y".into(), SortId(0))]).unwrap();
        let pt = parse_formula_in(&g.sig, &ctx, "y = e").unwrap();
        let i = Interpretation::new("forget", p.clone(), g.clone(), vec![SortId(0)], vec![pt], vec![]).unwrap();
        for n in enumerate_models(&g, 4).unwrap().models() {
            let m = reduct(n, &i).unwrap();
            for ax in &p.axioms {
                assert_eq!(satisfies(&m, ax), satisfies(n, &i.translate_sequent(ax)));
            }
        }
    }
}
