//! Skeletal completion, its weak equivalence, and factorization of functors
//! through any weak equivalence.

use std::sync::Arc;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::fincat::{canonical_iso, full_subcategory, isos_between, iso_classes, FinCat, Iso, MorId, Morphism, ObjId};
use crate::functor::{check_nat_iso, is_weak_equivalence, same_category, Functor, NatIso, WeakEquivalenceCert};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum CompletionError {
    #[error("functor source does not match the domain of the weak equivalence")]
    SourceMismatch,
    #[error("invalid factorization: {0}")]
    InvalidFactorization(String),
    #[error("object `{object}` has zero copies")]
    ZeroCopies { object: String },
    #[error("copy counts given for {got} objects, category has {expected}")]
    CopyCountMismatch { expected: usize, got: usize },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Fidelity {
    Exact,
    SkeletalApproximation,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct SkeletalityReport {
    pub is_skeletal: bool,
    pub is_gaunt: bool,
    pub fidelity: Fidelity,
}

pub fn skeletality(c: &FinCat) -> SkeletalityReport {
    let is_skeletal = iso_classes(c).len() == c.object_count();
    let is_gaunt = is_skeletal && c.object_ids().all(|x| isos_between(c, x, x).len() <= 1);
    SkeletalityReport {
        is_skeletal,
        is_gaunt,
        fidelity: if is_gaunt {
            Fidelity::Exact
        } else {
            Fidelity::SkeletalApproximation
        },
    }
}

pub const APPROXIMATION_WARNING: &str =
    "completed category has non-trivial automorphisms; skeletonization only approximates the univalent completion";

#[derive(Clone, Debug)]
pub struct CompletionResult {
    pub completed: Arc<FinCat>,
    pub eta: Functor,
    pub cert: WeakEquivalenceCert,
    /// Chosen representative (an object of the original) of every class,
    /// indexed by the objects of `completed`.
    pub representatives: Vec<ObjId>,
    /// `i_x: x ≅ r(x)` in the original category.
    pub canonical: Vec<Iso>,
    pub fidelity: Fidelity,
}

impl CompletionResult {
    pub fn original(&self) -> &Arc<FinCat> {
        self.eta.source()
    }

    pub fn warning(&self) -> Option<&'static str> {
        (self.fidelity == Fidelity::SkeletalApproximation).then_some(APPROXIMATION_WARNING)
    }
}

/// Keeps the lowest object of every isomorphism class. `η` sends
/// `f: x → y` to `i_x⁻¹·f·i_y`.
pub fn skeletize(c: &Arc<FinCat>) -> CompletionResult {
    let classes = iso_classes(c);
    let reps: Vec<ObjId> = classes.classes.iter().map(|cl| cl[0]).collect();
    let (sk, kept) = full_subcategory(c, &reps, format!("sk({})", c.name()));
    let mut new_mor = vec![usize::MAX; c.morphism_count()];
    for (i, &f) in kept.iter().enumerate() {
        new_mor[f.0] = i;
    }
    let canonical: Vec<Iso> = c
        .object_ids()
        .map(|x| canonical_iso(c, x, classes.representative(x)).expect("same class"))
        .collect();
    let obj_map = c.object_ids().map(|x| ObjId(classes.class_of[x.0])).collect();
    let mor_map = c
        .morphism_ids()
        .map(|f| {
            let conj = c.compose_all(&[canonical[c.src(f).0].inv, f, canonical[c.dst(f).0].fwd]);
            MorId(new_mor[conj.0])
        })
        .collect();
    let completed = Arc::new(sk);
    let eta = Functor::new(c.clone(), completed.clone(), obj_map, mor_map).expect("conjugation is functorial");
    let cert = is_weak_equivalence(&eta).expect("skeletonization is a weak equivalence");
    let fidelity = skeletality(&completed).fidelity;
    CompletionResult {
        completed,
        eta,
        cert,
        representatives: reps,
        canonical,
        fidelity,
    }
}

/// `H` with a natural isomorphism `α: G·H ⇒ F`.
#[derive(Clone, Debug)]
pub struct Factorization {
    pub h: Functor,
    pub alpha: NatIso,
}

/// Factors `f` through the weak equivalence of a completion.
pub fn factor_through(cr: &CompletionResult, f: &Functor) -> Result<Factorization, CompletionError> {
    factor_through_cert(&cr.cert, f)
}

/// With `(σy, i_y: Gσy ≅ y)` the chosen splitting: `H(y) = F(σy)`,
/// `H(g) = F(G⁻¹(i_y·g·i_y'⁻¹))` and `α_x = F(G⁻¹(i_{Gx}))`.
pub fn factor_through_cert(g: &WeakEquivalenceCert, f: &Functor) -> Result<Factorization, CompletionError> {
    if !same_category(g.source(), f.source()) {
        return Err(CompletionError::SourceMismatch);
    }
    let (c, d) = (&**g.source(), &**g.target());
    let sigma = |y: ObjId| g.split(y).0;
    let obj_map = d.object_ids().map(|y| f.obj(sigma(y))).collect();
    let mor_map = d
        .morphism_ids()
        .map(|m| {
            let (y1, y2) = (d.src(m), d.dst(m));
            let ((x1, i1), (x2, i2)) = (g.split(y1), g.split(y2));
            let conj = d.compose_all(&[i1.fwd, m, i2.inv]);
            f.mor(g.preimage(x1, x2, conj))
        })
        .collect();
    let h = Functor::new(g.target().clone(), f.target().clone(), obj_map, mor_map)
        .map_err(|e| CompletionError::InvalidFactorization(e.to_string()))?;
    let components: Vec<MorId> = c
        .object_ids()
        .map(|x| {
            let (s, i) = g.split(g.functor().obj(x));
            f.mor(g.preimage(s, x, i.fwd))
        })
        .collect();
    let gh = g.functor().then(&h).map_err(|e| CompletionError::InvalidFactorization(e.to_string()))?;
    let alpha = check_nat_iso(&components, &gh, f).map_err(|e| CompletionError::InvalidFactorization(e.to_string()))?;
    Ok(Factorization { h, alpha })
}

/// Checks that `alpha` is a natural isomorphism `G·H ⇒ F`.
pub fn validate_factorization(
    g: &WeakEquivalenceCert,
    f: &Functor,
    fac: &Factorization,
) -> Result<(), CompletionError> {
    let gh = g
        .functor()
        .then(&fac.h)
        .map_err(|e| CompletionError::InvalidFactorization(e.to_string()))?;
    check_nat_iso(&fac.alpha.forward_components(), &gh, f)
        .map(|_| ())
        .map_err(|e| CompletionError::InvalidFactorization(e.to_string()))
}

/// The comparison `H1 ⇒ H2` with components
/// `H1(i_y)⁻¹·α1_{σy}·α2_{σy}⁻¹·H2(i_y)`.
pub fn factorization_unique(
    g: &WeakEquivalenceCert,
    f: &Functor,
    first: &Factorization,
    second: &Factorization,
) -> Result<NatIso, CompletionError> {
    validate_factorization(g, f, first)?;
    validate_factorization(g, f, second)?;
    let e = &**f.target();
    let d = &**g.target();
    let components: Vec<MorId> = d
        .object_ids()
        .map(|y| {
            let (s, i) = g.split(y);
            e.compose_all(&[
                first.h.mor(i.inv),
                first.alpha.component(s).fwd,
                second.alpha.component(s).inv,
                second.h.mor(i.fwd),
            ])
        })
        .collect();
    check_nat_iso(&components, &first.h, &second.h).map_err(|e| CompletionError::InvalidFactorization(e.to_string()))
}

/// Every object `x` replaced by `copies[x]` isomorphic copies; the
/// projection back to `c` is a weak equivalence.
pub fn inflate(c: &Arc<FinCat>, copies: &[usize]) -> Result<(Arc<FinCat>, Functor), CompletionError> {
    if copies.len() != c.object_count() {
        return Err(CompletionError::CopyCountMismatch {
            expected: c.object_count(),
            got: copies.len(),
        });
    }
    if let Some(x) = copies.iter().position(|&k| k == 0) {
        return Err(CompletionError::ZeroCopies {
            object: c.object_label(ObjId(x)).to_string(),
        });
    }
    // new objects: (original, copy)
    let objs: Vec<(ObjId, usize)> = c
        .object_ids()
        .flat_map(|x| (0..copies[x.0]).map(move |k| (x, k)))
        .collect();
    let label = |(x, k): (ObjId, usize)| {
        if k == 0 {
            c.object_label(x).to_string()
        } else {
            format!("{}#{k}", c.object_label(x))
        }
    };
    let mut morphisms = Vec::new();
    let mut data = Vec::new();
    let mut index = std::collections::HashMap::new();
    let mut identities = vec![MorId(0); objs.len()];
    for (p, &(x, kx)) in objs.iter().enumerate() {
        for (q, &(y, ky)) in objs.iter().enumerate() {
            for &f in c.hom(x, y) {
                let id = MorId(morphisms.len());
                let name = if p == q && c.is_identity(f) {
                    identities[p] = id;
                    if kx == 0 {
                        c.label(f).to_string()
                    } else {
                        format!("id_{}", label((x, kx)))
                    }
                } else if kx == 0 && ky == 0 {
                    c.label(f).to_string()
                } else {
                    format!("{}[{kx},{ky}]", c.label(f))
                };
                morphisms.push(Morphism::new(name, ObjId(p), ObjId(q)));
                index.insert((p, q, f), id);
                data.push((p, q, f));
            }
        }
    }
    let inflated = FinCat::from_fn(
        format!("inflate({})", c.name()),
        objs.iter().map(|&o| label(o)).collect(),
        morphisms,
        identities,
        |f, g| {
            let (p, _, fm) = data[f.0];
            let (_, r, gm) = data[g.0];
            index[&(p, r, c.compose(fm, gm))]
        },
    )
    .expect("inflation of a valid category is valid");
    let inflated = Arc::new(inflated);
    let projection = Functor::new(
        inflated.clone(),
        c.clone(),
        objs.iter().map(|&(x, _)| x).collect(),
        data.iter().map(|&(_, _, f)| f).collect(),
    )
    .expect("projection is a functor");
    Ok((inflated, projection))
}

/// Full subcategory of the target on objects isomorphic to an image object.
#[derive(Clone, Debug)]
pub struct RepleteImage {
    pub category: Arc<FinCat>,
    /// Target objects kept, in index order.
    pub objects: Vec<ObjId>,
    pub inclusion: Functor,
    pub corestriction: Functor,
}

pub fn replete_image(f: &Functor) -> RepleteImage {
    let d = f.target();
    let objects: Vec<ObjId> = d
        .object_ids()
        .filter(|&y| f.obj_map().iter().any(|&fx| canonical_iso(d, fx, y).is_some()))
        .collect();
    let (sub, kept) = full_subcategory(d, &objects, format!("repl({})", d.name()));
    let category = Arc::new(sub);
    let mut new_mor = vec![usize::MAX; d.morphism_count()];
    for (i, &m) in kept.iter().enumerate() {
        new_mor[m.0] = i;
    }
    let new_obj = |y: ObjId| ObjId(objects.iter().position(|&o| o == y).expect("image object kept"));
    let inclusion = Functor::new(category.clone(), d.clone(), objects.clone(), kept.clone()).expect("inclusion");
    let corestriction = Functor::new(
        f.source().clone(),
        category.clone(),
        f.obj_map().iter().map(|&y| new_obj(y)).collect(),
        f.mor_map().iter().map(|&m| MorId(new_mor[m.0])).collect(),
    )
    .expect("corestriction");
    RepleteImage {
        category,
        objects,
        inclusion,
        corestriction,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::functor::{is_essentially_surjective, is_fully_faithful};
    use crate::generators::{cyclic_group, discrete, preorder_cat, setoid_groupoid, terminal_cat, walking_iso};

    fn arc(c: FinCat) -> Arc<FinCat> {
        Arc::new(c)
    }

    #[test]
    fn skeletality_examples() {
        let chain = preorder_cat(&["0", "1"], &[(0, 1)]).unwrap();
        assert_eq!(skeletality(&chain).fidelity, Fidelity::Exact);
        assert!(!skeletality(&walking_iso()).is_skeletal);
        let z2 = skeletality(&cyclic_group(2));
        assert!(z2.is_skeletal && !z2.is_gaunt);
        assert_eq!(z2.fidelity, Fidelity::SkeletalApproximation);
    }

    #[test]
    fn walking_iso_completes_to_terminal() {
        let cr = skeletize(&arc(walking_iso()));
        assert!(cr.completed.same_tables(&terminal_cat()));
        assert!(cr.cert.validate());
        assert_eq!(cr.representatives, vec![ObjId(0)]);
    }

    #[test]
    fn preorder_completes_to_poset() {
        // p ≅ q ≤ r
        let c = preorder_cat(&["p", "q", "r"], &[(0, 1), (1, 0), (0, 2), (1, 2)]).unwrap();
        let cr = skeletize(&arc(c));
        let expected = preorder_cat(&["p", "r"], &[(0, 1)]).unwrap();
        assert_eq!(cr.completed.object_labels(), expected.object_labels());
        assert_eq!(cr.completed.morphism_count(), 3);
        assert_eq!(cr.fidelity, Fidelity::Exact);
    }

    #[test]
    fn setoid_completes_to_two_objects() {
        let cr = skeletize(&arc(setoid_groupoid(3, &[(0, 1)]).unwrap()));
        assert_eq!(cr.completed.object_count(), 2);
        assert!(cr.completed.same_tables(&discrete(2)));
    }

    #[test]
    fn factor_collapse_through_walking_iso() {
        let c = arc(walking_iso());
        let t = arc(terminal_cat());
        let cr = skeletize(&c);
        let f = Functor::collapse(&c, &t).unwrap();
        let fac = factor_through(&cr, &f).unwrap();
        assert!(fac.h.is_isomorphism());
        assert!(validate_factorization(&cr.cert, &f, &fac).is_ok());
    }

    #[test]
    fn factor_eta_is_identity() {
        let c = arc(preorder_cat(&["p", "q", "r"], &[(0, 1), (1, 0), (0, 2), (1, 2)]).unwrap());
        let cr = skeletize(&c);
        let fac = factor_through(&cr, &cr.eta).unwrap();
        assert_eq!(fac.h, Functor::identity(&cr.completed));
    }

    #[test]
    fn factor_rejects_foreign_functor() {
        let cr = skeletize(&arc(walking_iso()));
        let other = Functor::identity(&arc(discrete(1)));
        assert_eq!(factor_through(&cr, &other).unwrap_err(), CompletionError::SourceMismatch);
    }

    #[test]
    fn uniqueness_between_equal_factorizations_is_identity() {
        let c = arc(walking_iso());
        let cr = skeletize(&c);
        let fac = factor_through(&cr, &Functor::identity(&c)).unwrap();
        let beta = factorization_unique(&cr.cert, &Functor::identity(&c), &fac, &fac).unwrap();
        assert_eq!(beta, NatIso::identity(&fac.h));
    }

    #[test]
    fn other_splitting_gives_component_f() {
        // factor the identity of the walking iso through its collapse with
        // two different splittings: b versus a as the preimage
        let c = arc(walking_iso());
        let t = arc(terminal_cat());
        let collapse = Functor::collapse(&c, &t).unwrap();
        // the identity of the walking iso factors through the collapse only
        // up to choice of point; compare H1 = a, H2 = b
        let cert = crate::functor::is_weak_equivalence(&collapse).unwrap();
        let other = cert
            .with_splitting(crate::functor::EsoWitness {
                splits: vec![(ObjId(1), Iso::identity(&t, ObjId(0)))],
            })
            .unwrap();
        let id = Functor::identity(&c);
        let first = factor_through_cert(&cert, &id).unwrap();
        let second = factor_through_cert(&other, &id).unwrap();
        let beta = factorization_unique(&cert, &id, &first, &second).unwrap();
        assert_eq!(c.label(beta.component(ObjId(0)).fwd), "f");
    }

    #[test]
    fn inflate_examples() {
        let t = arc(terminal_cat());
        let (w, p) = inflate(&t, &[2]).unwrap();
        assert_eq!((w.object_count(), w.morphism_count()), (2, 4));
        assert!(!skeletality(&w).is_skeletal);
        assert!(is_weak_equivalence(&p).is_some());
        let chain = arc(preorder_cat(&["0", "1"], &[(0, 1)]).unwrap());
        let (big, _) = inflate(&chain, &[2, 1]).unwrap();
        assert_eq!(big.object_count(), 3);
        let sk = skeletize(&big);
        assert!(sk.completed.same_tables(&chain));
        let (same, proj) = inflate(&chain, &[1, 1]).unwrap();
        assert!(same.same_tables(&chain));
        assert!(proj.is_isomorphism());
        assert!(matches!(inflate(&chain, &[0, 1]), Err(CompletionError::ZeroCopies { .. })));
    }

    #[test]
    fn replete_image_examples() {
        let t = arc(terminal_cat());
        let w = arc(walking_iso());
        let pick_a = Functor::new(t.clone(), w.clone(), vec![ObjId(0)], vec![MorId(0)]).unwrap();
        let r = replete_image(&pick_a);
        assert_eq!(r.objects, vec![ObjId(0), ObjId(1)]);
        assert!(is_fully_faithful(&r.inclusion).is_some());
        assert!(is_essentially_surjective(&r.corestriction).is_some());
        let d = arc(discrete(2));
        let pick = Functor::new(t.clone(), d, vec![ObjId(0)], vec![MorId(0)]).unwrap();
        assert_eq!(replete_image(&pick).objects, vec![ObjId(0)]);
        let id = Functor::identity(&w);
        assert_eq!(replete_image(&id).category.object_count(), 2);
    }
}
