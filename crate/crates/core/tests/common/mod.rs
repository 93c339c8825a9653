#![allow(dead_code)]

use std::sync::Arc;

use catkit::fincat::{isos_between, FinCat, Iso, MorId, ObjId};
use catkit::functor::{check_nat_iso, EsoWitness, Functor, WeakEquivalenceCert};
use catkit::generators::{random_category, RandomBounds};
use catkit::lifting::{Kind, Structures};
use catkit::limits::{find, mediators, LimitShape};

pub fn corpus_member(seed: u64) -> Arc<FinCat> {
    Arc::new(random_category(seed, RandomBounds::default()))
}

/// Every kind whose search succeeds; closed under dependencies.
pub fn findable_kinds(c: &FinCat) -> Vec<Kind> {
    Kind::ALL
        .into_iter()
        .filter(|&k| Structures::find(c, &[k]).is_ok())
        .collect()
}

/// Copy counts in 1..=2 drawn from the seed's bits.
pub fn copies_for(seed: u64, n: usize) -> Vec<usize> {
    (0..n).map(|i| 1 + ((seed >> (i % 60)) & 1) as usize).collect()
}

/// Number of natural isomorphisms `h1 ⇒ h2`, by exhaustive search.
pub fn count_nat_isos(h1: &Functor, h2: &Functor) -> usize {
    let d = h1.source();
    let e = h1.target();
    let choices: Vec<Vec<Iso>> = d
        .object_ids()
        .map(|y| isos_between(e, h1.obj(y), h2.obj(y)))
        .collect();
    if choices.iter().any(|c| c.is_empty()) {
        return 0;
    }
    let mut count = 0;
    let mut idx = vec![0usize; choices.len()];
    loop {
        let comps: Vec<MorId> = idx.iter().zip(&choices).map(|(&i, c)| c[i].fwd).collect();
        if check_nat_iso(&comps, h1, h2).is_ok() {
            count += 1;
        }
        let mut k = 0;
        loop {
            if k == idx.len() {
                return count;
            }
            idx[k] += 1;
            if idx[k] < choices[k].len() {
                break;
            }
            idx[k] = 0;
            k += 1;
        }
    }
}

/// Same weak equivalence, but split through the highest preimage and the
/// last iso.
pub fn alternate_splitting(cert: &WeakEquivalenceCert) -> WeakEquivalenceCert {
    let g = cert.functor();
    let (c, d) = (g.source(), g.target());
    let splits = d
        .object_ids()
        .map(|y| {
            let xs: Vec<ObjId> = c.object_ids().collect();
            xs.into_iter()
                .rev()
                .find_map(|x| isos_between(d, g.obj(x), y).last().map(|&i| (x, i)))
                .expect("essentially surjective")
        })
        .collect();
    cert.with_splitting(EsoWitness { splits }).expect("valid splitting")
}

/// Coproduct by definition: `h ↦ (i1·h, i2·h)` is a bijection
/// `hom(apex, z) → hom(x1, z) × hom(x2, z)` for every `z`.
pub fn is_coproduct_oracle(c: &FinCat, x1: ObjId, x2: ObjId, apex: ObjId, i1: MorId, i2: MorId) -> bool {
    if c.src(i1) != x1 || c.src(i2) != x2 || c.dst(i1) != apex || c.dst(i2) != apex {
        return false;
    }
    c.object_ids().all(|z| {
        let mut images: Vec<(MorId, MorId)> = c.hom(apex, z).iter().map(|&h| (c.compose(i1, h), c.compose(i2, h))).collect();
        images.sort();
        images.dedup();
        images.len() == c.hom(apex, z).len() && images.len() == c.hom(x1, z).len() * c.hom(x2, z).len()
    })
}

/// The transferred witness agrees with the searched one up to a unique
/// comparison isomorphism.
pub fn agrees_with_search<S: LimitShape>(d: &FinCat, key: S::Key, w: &S) -> bool {
    let Some(found) = find::<S>(d, key) else {
        return false;
    };
    let m = mediators(d, &found.cone(d), &w.cone(d));
    m.len() == 1 && catkit::fincat::find_iso(d, m[0]).is_some()
}
