//! Canonical forms: equal byte strings exactly for isomorphic structures.
//!
//! Elements are first coloured by iterated refinement on how they occur in the
//! tables; colours are isomorphism invariant, so only relabellings that list
//! elements in colour order need to be tried. The canonical form is the least
//! encoding over those relabellings.

use std::collections::BTreeMap;

use super::structure::{Elem, FiniteStructure};

/// Colour of every element, per sort.
fn refine(m: &FiniteStructure) -> Vec<Vec<usize>> {
    let sig = m.signature();
    let mut colour: Vec<Vec<usize>> = m.sizes().iter().map(|n| vec![0; *n]).collect();
    let mut classes = count_classes(&colour);
    loop {
        // signature of an element: its colour plus a sorted list of the
        // occurrences it takes part in, described by the colours involved
        let mut sigs: Vec<Vec<Vec<usize>>> = colour
            .iter()
            .map(|c| c.iter().map(|x| vec![*x]).collect())
            .collect();
        let mut occ: Vec<Vec<Vec<Vec<usize>>>> =
            colour.iter().map(|c| vec![Vec::new(); c.len()]).collect();
        for f in sig.func_ids() {
            let sym = sig.func(f);
            for args in m.tuples(&sym.args) {
                let b = m.apply(f, &args);
                let mut desc: Vec<usize> = vec![0, f.0];
                desc.extend(args.iter().zip(&sym.args).map(|(a, s)| colour[s.0][*a]));
                desc.push(colour[sym.result.0][b]);
                for (i, (a, s)) in args.iter().zip(&sym.args).enumerate() {
                    let mut d = desc.clone();
                    d.push(i);
                    occ[s.0][*a].push(d);
                }
                let mut d = desc;
                d.push(usize::MAX);
                occ[sym.result.0][b].push(d);
            }
        }
        for r in sig.rel_ids() {
            let sym = sig.rel(r);
            for args in m.tuples(&sym.args) {
                if !m.holds(r, &args) {
                    continue;
                }
                let mut desc: Vec<usize> = vec![1, r.0];
                desc.extend(args.iter().zip(&sym.args).map(|(a, s)| colour[s.0][*a]));
                for (i, (a, s)) in args.iter().zip(&sym.args).enumerate() {
                    let mut d = desc.clone();
                    d.push(i);
                    occ[s.0][*a].push(d);
                }
            }
        }
        for (s, per_sort) in occ.into_iter().enumerate() {
            for (a, mut list) in per_sort.into_iter().enumerate() {
                list.sort();
                sigs[s][a].extend(list.into_iter().flat_map(|d| {
                    let mut v = vec![d.len()];
                    v.extend(d);
                    v
                }));
            }
        }
        let mut next = Vec::new();
        for per_sort in &sigs {
            let ranks: BTreeMap<&Vec<usize>, usize> = {
                let mut keys: Vec<&Vec<usize>> = per_sort.iter().collect();
                keys.sort();
                keys.dedup();
                keys.into_iter().enumerate().map(|(i, k)| (k, i)).collect()
            };
            next.push(per_sort.iter().map(|k| ranks[k]).collect::<Vec<_>>());
        }
        let n = count_classes(&next);
        colour = next;
        if n == classes {
            return colour;
        }
        classes = n;
    }
}

fn count_classes(colour: &[Vec<usize>]) -> usize {
    colour
        .iter()
        .map(|c| {
            let mut v = c.clone();
            v.sort_unstable();
            v.dedup();
            v.len()
        })
        .sum()
}

/// Encodes the structure under a relabelling `perm[s][old] = new`.
fn encode(m: &FiniteStructure, perm: &[Vec<Elem>], inv: &[Vec<Elem>]) -> Vec<u8> {
    let sig = m.signature();
    let mut out = Vec::new();
    for n in m.sizes() {
        out.extend_from_slice(&(*n as u32).to_be_bytes());
    }
    for f in sig.func_ids() {
        let sym = sig.func(f);
        for new_args in m.tuples(&sym.args) {
            let old: Vec<Elem> = new_args
                .iter()
                .zip(&sym.args)
                .map(|(a, s)| inv[s.0][*a])
                .collect();
            let v = perm[sym.result.0][m.apply(f, &old)];
            out.push(u8::try_from(v).expect("carriers above 255 elements are not supported"));
        }
    }
    for r in sig.rel_ids() {
        let sym = sig.rel(r);
        for new_args in m.tuples(&sym.args) {
            let old: Vec<Elem> = new_args
                .iter()
                .zip(&sym.args)
                .map(|(a, s)| inv[s.0][*a])
                .collect();
            out.push(m.holds(r, &old) as u8);
        }
    }
    out
}

struct Block {
    sort: usize,
    start: usize,
    members: Vec<Elem>,
}

/// The canonical byte string together with a relabelling that realises it.
pub fn canonical_with_perm(m: &FiniteStructure) -> (Vec<u8>, Vec<Vec<Elem>>) {
    let colour = refine(m);
    let mut blocks = Vec::new();
    for (s, cs) in colour.iter().enumerate() {
        let mut by: BTreeMap<usize, Vec<Elem>> = BTreeMap::new();
        for (a, c) in cs.iter().enumerate() {
            by.entry(*c).or_default().push(a);
        }
        let mut start = 0;
        for (_, members) in by {
            let len = members.len();
            blocks.push(Block {
                sort: s,
                start,
                members,
            });
            start += len;
        }
    }
    let mut perm: Vec<Vec<Elem>> = m.sizes().iter().map(|n| vec![0; *n]).collect();
    let mut inv = perm.clone();
    let mut best: Option<(Vec<u8>, Vec<Vec<Elem>>)> = None;
    search(m, &blocks, 0, &mut perm, &mut inv, &mut best);
    best.expect("at least one relabelling exists")
}

fn search(
    m: &FiniteStructure,
    blocks: &[Block],
    bi: usize,
    perm: &mut Vec<Vec<Elem>>,
    inv: &mut Vec<Vec<Elem>>,
    best: &mut Option<(Vec<u8>, Vec<Vec<Elem>>)>,
) {
    if bi == blocks.len() {
        let code = encode(m, perm, inv);
        if best.as_ref().map_or(true, |(b, _)| code < *b) {
            *best = Some((code, perm.clone()));
        }
        return;
    }
    let b = &blocks[bi];
    let mut order = b.members.clone();
    permute(&mut order, 0, &mut |order| {
        for (k, a) in order.iter().enumerate() {
            perm[b.sort][*a] = b.start + k;
            inv[b.sort][b.start + k] = *a;
        }
        search(m, blocks, bi + 1, perm, inv, best);
    });
}

fn permute(v: &mut Vec<Elem>, k: usize, f: &mut impl FnMut(&[Elem])) {
    if k == v.len() {
        f(v);
        return;
    }
    for i in k..v.len() {
        v.swap(k, i);
        permute(v, k + 1, f);
        v.swap(k, i);
    }
}

pub fn canonical_form(m: &FiniteStructure) -> Vec<u8> {
    canonical_with_perm(m).0
}

/// The isomorphic copy of `m` whose encoding is the canonical form.
pub fn canonical_structure(m: &FiniteStructure) -> FiniteStructure {
    let (_, perm) = canonical_with_perm(m);
    m.relabel(&perm)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::logic::Signature;
    use crate::models::hom::enumerate_isos;
    use std::sync::Arc;

    fn group_sig() -> Arc<Signature> {
        let mut sig = Signature::new();
        let g = sig.add_sort("G").unwrap();
        sig.add_func("e", &[], g).unwrap();
        sig.add_func("mul", &[g, g], g).unwrap();
        sig.add_func("inv", &[g], g).unwrap();
        Arc::new(sig)
    }

    fn z4() -> FiniteStructure {
        FiniteStructure::from_fn(group_sig(), vec![4], |f, a| match f.0 {
            0 => 0,
            1 => (a[0] + a[1]) % 4,
            _ => (4 - a[0]) % 4,
        }, |_, _| false)
        .unwrap()
    }

    fn klein() -> FiniteStructure {
        FiniteStructure::from_fn(group_sig(), vec![4], |f, a| match f.0 {
            0 => 0,
            1 => a[0] ^ a[1],
            _ => a[0],
        }, |_, _| false)
        .unwrap()
    }

    #[test]
    fn z4_and_klein_differ() {
        assert_ne!(canonical_form(&z4()), canonical_form(&klein()));
        assert!(enumerate_isos(&z4(), &klein()).is_empty());
    }

    #[test]
    fn relabelled_copies_agree() {
        let m = z4();
        let perm = vec![vec![2, 0, 3, 1]];
        let copy = m.relabel(&perm);
        assert_ne!(copy, m);
        assert_eq!(canonical_form(&copy), canonical_form(&m));
        assert_eq!(canonical_structure(&copy), canonical_structure(&m));
    }

    #[test]
    fn canonical_structure_encodes_to_form() {
        let m = klein().relabel(&[vec![3, 1, 0, 2]]);
        let c = canonical_structure(&m);
        assert_eq!(canonical_form(&c), canonical_form(&m));
        let id: Vec<Vec<Elem>> = vec![(0..4).collect()];
        assert_eq!(encode(&c, &id, &id), canonical_form(&m));
    }
}
