//! Homomorphisms and isomorphisms between finite structures.

use std::ops::ControlFlow;

use super::structure::{Elem, FiniteStructure};
use crate::logic::{FuncId, RelId, SortId};

/// Per-sort element maps `maps[s][a]`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Homomorphism {
    pub maps: Vec<Vec<Elem>>,
}

impl Homomorphism {
    pub fn identity(m: &FiniteStructure) -> Self {
        Homomorphism {
            maps: m.sizes().iter().map(|n| (0..*n).collect()).collect(),
        }
    }

    pub fn apply(&self, s: SortId, a: Elem) -> Elem {
        self.maps[s.0][a]
    }

    pub fn apply_tuple(&self, sorts: &[SortId], t: &[Elem]) -> Vec<Elem> {
        t.iter().zip(sorts).map(|(a, s)| self.apply(*s, *a)).collect()
    }

    /// `self` after `first`.
    pub fn compose(&self, first: &Homomorphism) -> Homomorphism {
        Homomorphism {
            maps: first
                .maps
                .iter()
                .zip(&self.maps)
                .map(|(f, g)| f.iter().map(|a| g[*a]).collect())
                .collect(),
        }
    }

    /// Inverse of a bijective map.
    pub fn inverse(&self) -> Homomorphism {
        Homomorphism {
            maps: self
                .maps
                .iter()
                .map(|m| {
                    let mut inv = vec![0; m.len()];
                    for (a, b) in m.iter().enumerate() {
                        inv[*b] = a;
                    }
                    inv
                })
                .collect(),
        }
    }

    pub fn is_bijective(&self) -> bool {
        self.maps.iter().all(|m| {
            let mut seen = vec![false; m.len()];
            m.iter().all(|b| *b < m.len() && !std::mem::replace(&mut seen[*b], true))
        })
    }
}

/// Checks the homomorphism conditions directly against the tables.
pub fn is_homomorphism(src: &FiniteStructure, tgt: &FiniteStructure, h: &Homomorphism) -> bool {
    let sig = src.signature();
    if sig != tgt.signature() && **sig != **tgt.signature() {
        return false;
    }
    if h.maps.len() != src.sizes().len()
        || h.maps
            .iter()
            .zip(src.sizes().iter().zip(tgt.sizes()))
            .any(|(m, (n, k))| m.len() != *n || m.iter().any(|b| b >= k))
    {
        return false;
    }
    for f in sig.func_ids() {
        let sym = sig.func(f);
        for args in src.tuples(&sym.args) {
            let lhs = h.apply(sym.result, src.apply(f, &args));
            let rhs = tgt.apply(f, &h.apply_tuple(&sym.args, &args));
            if lhs != rhs {
                return false;
            }
        }
    }
    for r in sig.rel_ids() {
        let sym = sig.rel(r);
        for args in src.tuples(&sym.args) {
            if src.holds(r, &args) && !tgt.holds(r, &h.apply_tuple(&sym.args, &args)) {
                return false;
            }
        }
    }
    true
}

pub fn is_isomorphism(src: &FiniteStructure, tgt: &FiniteStructure, h: &Homomorphism) -> bool {
    src.sizes() == tgt.sizes()
        && h.is_bijective()
        && is_homomorphism(src, tgt, h)
        && is_homomorphism(tgt, src, &h.inverse())
}

enum Constraint {
    Func {
        f: FuncId,
        args: Vec<(SortId, Elem)>,
        result: (SortId, Elem),
    },
    Rel {
        r: RelId,
        args: Vec<(SortId, Elem)>,
    },
}

/// Backtracking search for homomorphisms, optionally constrained by a fixed
/// partial map and optionally restricted to bijections (isomorphisms).
///
/// Candidates are produced in lexicographic order of the flattened maps.
pub struct HomSearch<'a> {
    src: &'a FiniteStructure,
    tgt: &'a FiniteStructure,
    order: Vec<(SortId, Elem)>,
    fixed: Vec<Vec<Option<Elem>>>,
    bijective: bool,
    // constraints checkable once position i is assigned; index 0 holds the
    // ones with no element positions
    ready: Vec<Vec<Constraint>>,
}

impl<'a> HomSearch<'a> {
    pub fn new(src: &'a FiniteStructure, tgt: &'a FiniteStructure) -> Self {
        let order: Vec<(SortId, Elem)> = src
            .sizes()
            .iter()
            .enumerate()
            .flat_map(|(s, n)| (0..*n).map(move |a| (SortId(s), a)))
            .collect();
        let mut pos = vec![Vec::new(); src.sizes().len()];
        for (i, (s, _)) in order.iter().enumerate() {
            pos[s.0].push(i);
        }
        let at = |s: SortId, a: Elem| pos[s.0][a] + 1;
        let mut ready: Vec<Vec<Constraint>> = (0..=order.len()).map(|_| Vec::new()).collect();
        let sig = src.signature();
        for f in sig.func_ids() {
            let sym = sig.func(f);
            for args in src.tuples(&sym.args) {
                let b = src.apply(f, &args);
                let tagged: Vec<(SortId, Elem)> =
                    sym.args.iter().copied().zip(args.iter().copied()).collect();
                let slot = tagged
                    .iter()
                    .map(|(s, a)| at(*s, *a))
                    .chain(std::iter::once(at(sym.result, b)))
                    .max()
                    .unwrap();
                ready[slot].push(Constraint::Func {
                    f,
                    args: tagged,
                    result: (sym.result, b),
                });
            }
        }
        for r in sig.rel_ids() {
            let sym = sig.rel(r);
            for args in src.tuples(&sym.args) {
                if !src.holds(r, &args) {
                    continue;
                }
                let tagged: Vec<(SortId, Elem)> =
                    sym.args.iter().copied().zip(args.iter().copied()).collect();
                let slot = tagged.iter().map(|(s, a)| at(*s, *a)).max().unwrap_or(0);
                ready[slot].push(Constraint::Rel { r, args: tagged });
            }
        }
        HomSearch {
            src,
            tgt,
            order,
            fixed: src.sizes().iter().map(|n| vec![None; *n]).collect(),
            bijective: false,
            ready,
        }
    }

    /// Requires `h(a) = b` for the given element of sort `s`.
    pub fn fix(mut self, s: SortId, a: Elem, b: Elem) -> Self {
        self.fixed[s.0][a] = Some(b);
        self
    }

    pub fn bijective(mut self, on: bool) -> Self {
        self.bijective = on;
        self
    }

    /// Calls `visit` for every solution until it breaks.
    pub fn run(&self, mut visit: impl FnMut(&Homomorphism) -> ControlFlow<()>) {
        if self.src.signature().as_ref() != self.tgt.signature().as_ref() {
            return;
        }
        if self.bijective {
            if self.src.sizes() != self.tgt.sizes() {
                return;
            }
            let sig = self.src.signature();
            let count = |m: &FiniteStructure, r: RelId| m.rel_table(r).iter().filter(|b| **b).count();
            if sig.rel_ids().any(|r| count(self.src, r) != count(self.tgt, r)) {
                return;
            }
        }
        for (s, row) in self.fixed.iter().enumerate() {
            if row.iter().flatten().any(|b| *b >= self.tgt.sizes()[s]) {
                return;
            }
        }
        let mut h = Homomorphism {
            maps: self.src.sizes().iter().map(|n| vec![0; *n]).collect(),
        };
        if !self.check(0, &h) {
            return;
        }
        let mut used: Vec<Vec<bool>> = self.tgt.sizes().iter().map(|n| vec![false; *n]).collect();
        let _ = self.go(0, &mut h, &mut used, &mut visit);
    }

    fn check(&self, slot: usize, h: &Homomorphism) -> bool {
        self.ready[slot].iter().all(|c| match c {
            Constraint::Func { f, args, result } => {
                let img: Vec<Elem> = args.iter().map(|(s, a)| h.maps[s.0][*a]).collect();
                self.tgt.apply(*f, &img) == h.maps[result.0 .0][result.1]
            }
            Constraint::Rel { r, args } => {
                let img: Vec<Elem> = args.iter().map(|(s, a)| h.maps[s.0][*a]).collect();
                self.tgt.holds(*r, &img)
            }
        })
    }

    fn go(
        &self,
        i: usize,
        h: &mut Homomorphism,
        used: &mut Vec<Vec<bool>>,
        visit: &mut impl FnMut(&Homomorphism) -> ControlFlow<()>,
    ) -> ControlFlow<()> {
        if i == self.order.len() {
            return visit(h);
        }
        let (s, a) = self.order[i];
        let range = match self.fixed[s.0][a] {
            Some(b) => b..b + 1,
            None => 0..self.tgt.size(s),
        };
        for b in range {
            if self.bijective && used[s.0][b] {
                continue;
            }
            h.maps[s.0][a] = b;
            if self.check(i + 1, h) {
                used[s.0][b] = true;
                let flow = self.go(i + 1, h, used, visit);
                used[s.0][b] = false;
                flow?;
            }
        }
        ControlFlow::Continue(())
    }

    pub fn all(&self) -> Vec<Homomorphism> {
        let mut out = Vec::new();
        self.run(|h| {
            out.push(h.clone());
            ControlFlow::Continue(())
        });
        out
    }

    pub fn first(&self) -> Option<Homomorphism> {
        let mut out = None;
        self.run(|h| {
            out = Some(h.clone());
            ControlFlow::Break(())
        });
        out
    }

    pub fn count(&self) -> usize {
        let mut n = 0;
        self.run(|_| {
            n += 1;
            ControlFlow::Continue(())
        });
        n
    }
}

pub fn enumerate_homs(src: &FiniteStructure, tgt: &FiniteStructure) -> Vec<Homomorphism> {
    HomSearch::new(src, tgt).all()
}

pub fn enumerate_isos(src: &FiniteStructure, tgt: &FiniteStructure) -> Vec<Homomorphism> {
    HomSearch::new(src, tgt).bijective(true).all()
}

pub fn automorphisms(m: &FiniteStructure) -> Vec<Homomorphism> {
    enumerate_isos(m, m)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::logic::Signature;
    use std::sync::Arc;

    fn zn(n: usize) -> FiniteStructure {
        let mut sig = Signature::new();
        let g = sig.add_sort("G").unwrap();
        sig.add_func("e", &[], g).unwrap();
        sig.add_func("add", &[g, g], g).unwrap();
        sig.add_func("neg", &[g], g).unwrap();
        FiniteStructure::from_fn(
            Arc::new(sig),
            vec![n],
            |f, a| match f.0 {
                0 => 0,
                1 => (a[0] + a[1]) % n,
                _ => (n - a[0]) % n,
            },
            |_, _| false,
        )
        .unwrap()
    }

    fn brute_homs(src: &FiniteStructure, tgt: &FiniteStructure) -> usize {
        let n = src.size(SortId(0));
        let k = tgt.size(SortId(0));
        crate::models::structure::Tuples::new(vec![k; n])
            .filter(|m| {
                is_homomorphism(
                    src,
                    tgt,
                    &Homomorphism {
                        maps: vec![m.clone()],
                    },
                )
            })
            .count()
    }

    #[test]
    fn cyclic_hom_counts() {
        assert_eq!(enumerate_homs(&zn(2), &zn(4)).len(), 2);
        assert_eq!(enumerate_isos(&zn(3), &zn(3)).len(), 2);
        for a in 1..=4 {
            for b in 1..=4 {
                assert_eq!(enumerate_homs(&zn(a), &zn(b)).len(), brute_homs(&zn(a), &zn(b)));
            }
        }
    }

    #[test]
    fn identity_is_found_first_among_automorphisms() {
        let m = zn(4);
        let auts = automorphisms(&m);
        assert_eq!(auts.len(), 2);
        assert_eq!(auts[0], Homomorphism::identity(&m));
        for a in &auts {
            assert!(is_isomorphism(&m, &m, a));
        }
    }

    #[test]
    fn fixed_points_constrain() {
        let (z2, z4) = (zn(2), zn(4));
        let s = HomSearch::new(&z2, &z4).fix(SortId(0), 1, 2);
        let all = s.all();
        assert_eq!(all.len(), 1);
        assert_eq!(all[0].maps, vec![vec![0, 2]]);
        assert!(HomSearch::new(&zn(2), &zn(3)).fix(SortId(0), 1, 1).first().is_none());
    }
}
