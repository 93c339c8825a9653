//! Functors, natural isomorphisms and the weak-equivalence decision procedure.

use std::sync::Arc;

use thiserror::Error;

use crate::fincat::{canonical_iso, find_iso, opposite, FinCat, Iso, MorId, ObjId};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum FunctorError {
    #[error("object map has {got} entries, source has {expected} objects")]
    ObjectCountMismatch { expected: usize, got: usize },
    #[error("morphism map has {got} entries, source has {expected} morphisms")]
    MorphismCountMismatch { expected: usize, got: usize },
    #[error("image of `{morphism}` is out of range or has the wrong endpoints")]
    IllTypedImage { morphism: String },
    #[error("identity of `{object}` is not sent to an identity")]
    IdentityNotPreserved { object: String },
    #[error("composite {f}·{g} is not preserved")]
    CompositionNotPreserved { f: String, g: String },
    #[error("functor endpoints do not match: {0}")]
    EndpointMismatch(String),
    #[error("dangling reference `{name}` ({pointer})")]
    DanglingReference { name: String, pointer: String },
    #[error("no image given for `{name}` ({pointer})")]
    MissingImage { name: String, pointer: String },
}

pub(crate) fn same_category(a: &Arc<FinCat>, b: &Arc<FinCat>) -> bool {
    Arc::ptr_eq(a, b) || **a == **b
}

/// A functor between two finite categories, validated on construction.
#[derive(Clone, Debug)]
pub struct Functor {
    source: Arc<FinCat>,
    target: Arc<FinCat>,
    obj_map: Vec<ObjId>,
    mor_map: Vec<MorId>,
}

impl PartialEq for Functor {
    fn eq(&self, other: &Self) -> bool {
        self.obj_map == other.obj_map
            && self.mor_map == other.mor_map
            && same_category(&self.source, &other.source)
            && same_category(&self.target, &other.target)
    }
}

impl Functor {
    /// Checks typing, identities and composition exhaustively.
    pub fn new(
        source: Arc<FinCat>,
        target: Arc<FinCat>,
        obj_map: Vec<ObjId>,
        mor_map: Vec<MorId>,
    ) -> Result<Functor, FunctorError> {
        let (c, d) = (&*source, &*target);
        if obj_map.len() != c.object_count() {
            return Err(FunctorError::ObjectCountMismatch {
                expected: c.object_count(),
                got: obj_map.len(),
            });
        }
        if mor_map.len() != c.morphism_count() {
            return Err(FunctorError::MorphismCountMismatch {
                expected: c.morphism_count(),
                got: mor_map.len(),
            });
        }
        if let Some(x) = obj_map.iter().position(|y| y.0 >= d.object_count()) {
            return Err(FunctorError::IllTypedImage {
                morphism: format!("object {}", c.object_label(ObjId(x))),
            });
        }
        for f in c.morphism_ids() {
            let g = mor_map[f.0];
            let typed = g.0 < d.morphism_count()
                && d.src(g) == obj_map[c.src(f).0]
                && d.dst(g) == obj_map[c.dst(f).0];
            if !typed {
                return Err(FunctorError::IllTypedImage {
                    morphism: c.label(f).to_string(),
                });
            }
        }
        for x in c.object_ids() {
            if mor_map[c.id(x).0] != d.id(obj_map[x.0]) {
                return Err(FunctorError::IdentityNotPreserved {
                    object: c.object_label(x).to_string(),
                });
            }
        }
        for f in c.morphism_ids() {
            for g in c.out_of(c.dst(f)) {
                let lhs = mor_map[c.compose(f, g).0];
                let rhs = d.compose(mor_map[f.0], mor_map[g.0]);
                if lhs != rhs {
                    return Err(FunctorError::CompositionNotPreserved {
                        f: c.label(f).to_string(),
                        g: c.label(g).to_string(),
                    });
                }
            }
        }
        Ok(Functor {
            source,
            target,
            obj_map,
            mor_map,
        })
    }

    pub fn identity(c: &Arc<FinCat>) -> Functor {
        Functor {
            source: c.clone(),
            target: c.clone(),
            obj_map: c.object_ids().collect(),
            mor_map: c.morphism_ids().collect(),
        }
    }

    /// The unique functor into a category with a single object and a single
    /// morphism.
    pub fn collapse(source: &Arc<FinCat>, terminal: &Arc<FinCat>) -> Result<Functor, FunctorError> {
        Functor::new(
            source.clone(),
            terminal.clone(),
            vec![ObjId(0); source.object_count()],
            vec![MorId(0); source.morphism_count()],
        )
    }

    /// Diagrammatic composite: `self` then `other`.
    pub fn then(&self, other: &Functor) -> Result<Functor, FunctorError> {
        if !same_category(&self.target, &other.source) {
            return Err(FunctorError::EndpointMismatch(format!(
                "{} then {}",
                self.target.name(),
                other.source.name()
            )));
        }
        Ok(Functor {
            source: self.source.clone(),
            target: other.target.clone(),
            obj_map: self.obj_map.iter().map(|&x| other.obj(x)).collect(),
            mor_map: self.mor_map.iter().map(|&f| other.mor(f)).collect(),
        })
    }

    pub fn source(&self) -> &Arc<FinCat> {
        &self.source
    }

    pub fn target(&self) -> &Arc<FinCat> {
        &self.target
    }

    pub fn obj(&self, x: ObjId) -> ObjId {
        self.obj_map[x.0]
    }

    pub fn mor(&self, f: MorId) -> MorId {
        self.mor_map[f.0]
    }

    pub fn obj_map(&self) -> &[ObjId] {
        &self.obj_map
    }

    pub fn mor_map(&self) -> &[MorId] {
        &self.mor_map
    }

    pub fn map_iso(&self, i: Iso) -> Iso {
        Iso {
            fwd: self.mor(i.fwd),
            inv: self.mor(i.inv),
        }
    }

    /// Bijective on objects and on morphisms.
    pub fn is_isomorphism(&self) -> bool {
        let bij = |map: Vec<usize>, n: usize| {
            let mut seen = vec![false; n];
            map.len() == n && map.into_iter().all(|i| !std::mem::replace(&mut seen[i], true))
        };
        bij(self.obj_map.iter().map(|x| x.0).collect(), self.target.object_count())
            && bij(self.mor_map.iter().map(|f| f.0).collect(), self.target.morphism_count())
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum NatIsoError {
    #[error("functors do not share endpoints")]
    EndpointMismatch,
    #[error("expected {expected} components, got {got}")]
    WrongComponentCount { expected: usize, got: usize },
    #[error("component at `{object}` has the wrong type")]
    ComponentIllTyped { object: String },
    #[error("component at `{object}` is not an isomorphism")]
    ComponentNotIso { object: String },
    #[error("naturality square fails for `{morphism}`")]
    NaturalitySquareFails { morphism: String },
}

/// A natural isomorphism `α: F ⇒ G` with components `α_x: F x → G x`.
#[derive(Clone, Debug, PartialEq)]
pub struct NatIso {
    source: Functor,
    target: Functor,
    components: Vec<Iso>,
}

/// Checks naturality `F(f)·α_y = α_x·G(f)` and invertibility of every
/// component.
pub fn check_nat_iso(components: &[MorId], f: &Functor, g: &Functor) -> Result<NatIso, NatIsoError> {
    if !same_category(f.source(), g.source()) || !same_category(f.target(), g.target()) {
        return Err(NatIsoError::EndpointMismatch);
    }
    let (c, d) = (&**f.source(), &**f.target());
    if components.len() != c.object_count() {
        return Err(NatIsoError::WrongComponentCount {
            expected: c.object_count(),
            got: components.len(),
        });
    }
    let mut isos = Vec::with_capacity(components.len());
    for x in c.object_ids() {
        let a = components[x.0];
        if a.0 >= d.morphism_count() || d.src(a) != f.obj(x) || d.dst(a) != g.obj(x) {
            return Err(NatIsoError::ComponentIllTyped {
                object: c.object_label(x).to_string(),
            });
        }
        match find_iso(d, a) {
            Some(i) => isos.push(i),
            None => {
                return Err(NatIsoError::ComponentNotIso {
                    object: c.object_label(x).to_string(),
                })
            }
        }
    }
    for m in c.morphism_ids() {
        let (x, y) = (c.src(m), c.dst(m));
        if d.compose(f.mor(m), components[y.0]) != d.compose(components[x.0], g.mor(m)) {
            return Err(NatIsoError::NaturalitySquareFails {
                morphism: c.label(m).to_string(),
            });
        }
    }
    Ok(NatIso {
        source: f.clone(),
        target: g.clone(),
        components: isos,
    })
}

impl NatIso {
    pub fn identity(f: &Functor) -> NatIso {
        let d = f.target();
        NatIso {
            source: f.clone(),
            target: f.clone(),
            components: f.obj_map().iter().map(|&y| Iso::identity(d, y)).collect(),
        }
    }

    pub fn source(&self) -> &Functor {
        &self.source
    }

    pub fn target(&self) -> &Functor {
        &self.target
    }

    pub fn component(&self, x: ObjId) -> Iso {
        self.components[x.0]
    }

    pub fn components(&self) -> &[Iso] {
        &self.components
    }

    pub fn forward_components(&self) -> Vec<MorId> {
        self.components.iter().map(|i| i.fwd).collect()
    }

    pub fn inverse(&self) -> NatIso {
        NatIso {
            source: self.target.clone(),
            target: self.source.clone(),
            components: self.components.iter().map(|i| i.inverse()).collect(),
        }
    }
}

/// For every pair `(x, y)` of source objects, the inverse of the map
/// `hom(x, y) → hom(Fx, Fy)`, indexed by hom-set position in the target.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FfWitness {
    objects: usize,
    preimages: Vec<Vec<MorId>>,
}

impl FfWitness {
    pub fn preimage(&self, target: &FinCat, x: ObjId, y: ObjId, g: MorId) -> MorId {
        self.preimages[x.0 * self.objects + y.0][target.hom_position(g)]
    }
}

pub fn is_fully_faithful(f: &Functor) -> Option<FfWitness> {
    let (c, d) = (&**f.source(), &**f.target());
    let n = c.object_count();
    let mut preimages = Vec::with_capacity(n * n);
    for x in c.object_ids() {
        for y in c.object_ids() {
            let target_hom = d.hom(f.obj(x), f.obj(y));
            let source_hom = c.hom(x, y);
            if target_hom.len() != source_hom.len() {
                return None;
            }
            let mut inv = vec![None; target_hom.len()];
            for &m in source_hom {
                let slot = &mut inv[d.hom_position(f.mor(m))];
                if slot.is_some() {
                    return None;
                }
                *slot = Some(m);
            }
            preimages.push(inv.into_iter().map(|m| m.expect("counted")).collect());
        }
    }
    Some(FfWitness {
        objects: n,
        preimages,
    })
}

/// For every target object `y`, a chosen `(x, i: F x ≅ y)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EsoWitness {
    pub splits: Vec<(ObjId, Iso)>,
}

/// Lowest preimage object first; the identity is preferred when `F x = y`,
/// otherwise the iso with the lowest forward index.
pub fn is_essentially_surjective(f: &Functor) -> Option<EsoWitness> {
    let (c, d) = (&**f.source(), &**f.target());
    let splits = d
        .object_ids()
        .map(|y| {
            c.object_ids()
                .find_map(|x| canonical_iso(d, f.obj(x), y).map(|i| (x, i)))
        })
        .collect::<Option<Vec<_>>>()?;
    Some(EsoWitness { splits })
}

/// Evidence that a functor is fully faithful and (split) essentially
/// surjective.
#[derive(Clone, Debug, PartialEq)]
pub struct WeakEquivalenceCert {
    functor: Functor,
    ff: FfWitness,
    eso: EsoWitness,
}

pub fn is_weak_equivalence(f: &Functor) -> Option<WeakEquivalenceCert> {
    let ff = is_fully_faithful(f)?;
    let eso = is_essentially_surjective(f)?;
    Some(WeakEquivalenceCert {
        functor: f.clone(),
        ff,
        eso,
    })
}

impl WeakEquivalenceCert {
    /// Replaces the essential-surjectivity splitting, re-validating it.
    pub fn with_splitting(&self, eso: EsoWitness) -> Option<WeakEquivalenceCert> {
        let cert = WeakEquivalenceCert {
            functor: self.functor.clone(),
            ff: self.ff.clone(),
            eso,
        };
        cert.validate().then_some(cert)
    }

    pub fn functor(&self) -> &Functor {
        &self.functor
    }

    pub fn source(&self) -> &Arc<FinCat> {
        self.functor.source()
    }

    pub fn target(&self) -> &Arc<FinCat> {
        self.functor.target()
    }

    pub fn ff(&self) -> &FfWitness {
        &self.ff
    }

    pub fn eso(&self) -> &EsoWitness {
        &self.eso
    }

    /// The chosen `(x, i: G x ≅ y)`.
    pub fn split(&self, y: ObjId) -> (ObjId, Iso) {
        self.eso.splits[y.0]
    }

    /// `G⁻¹(g)` for `g: G x → G y`.
    pub fn preimage(&self, x: ObjId, y: ObjId, g: MorId) -> MorId {
        self.ff.preimage(self.target(), x, y, g)
    }

    /// Preimage of an isomorphism `G x ≅ G y`, which is again an isomorphism.
    pub fn preimage_iso(&self, x: ObjId, y: ObjId, i: Iso) -> Iso {
        Iso {
            fwd: self.preimage(x, y, i.fwd),
            inv: self.preimage(y, x, i.inv),
        }
    }

    /// Both witnesses re-checked against the functor's tables.
    pub fn validate(&self) -> bool {
        let g = &self.functor;
        let (c, d) = (&**g.source(), &**g.target());
        for x in c.object_ids() {
            for y in c.object_ids() {
                let source_hom = c.hom(x, y);
                let target_hom = d.hom(g.obj(x), g.obj(y));
                if source_hom.len() != target_hom.len() {
                    return false;
                }
                if source_hom.iter().any(|&m| self.preimage(x, y, g.mor(m)) != m) {
                    return false;
                }
                if target_hom.iter().any(|&t| g.mor(self.preimage(x, y, t)) != t) {
                    return false;
                }
            }
        }
        self.eso.splits.len() == d.object_count()
            && self.eso.splits.iter().enumerate().all(|(y, &(x, i))| {
                x.0 < c.object_count()
                    && i.is_valid(d)
                    && i.src(d) == g.obj(x)
                    && i.dst(d) == ObjId(y)
            })
    }

    /// The same evidence for the opposite functor.
    pub fn opposite(&self) -> WeakEquivalenceCert {
        let functor = opposite_functor(&self.functor);
        let eso = EsoWitness {
            splits: self.eso.splits.iter().map(|&(x, i)| (x, i.inverse())).collect(),
        };
        let n = self.source().object_count();
        let mut preimages = vec![Vec::new(); n * n];
        for x in 0..n {
            for y in 0..n {
                preimages[y * n + x] = self.ff.preimages[x * n + y].clone();
            }
        }
        WeakEquivalenceCert {
            functor,
            ff: FfWitness {
                objects: n,
                preimages,
            },
            eso,
        }
    }
}

/// `F^op: C^op → D^op`, same object and morphism maps.
pub fn opposite_functor(f: &Functor) -> Functor {
    Functor {
        source: Arc::new(opposite(f.source())),
        target: Arc::new(opposite(f.target())),
        obj_map: f.obj_map.clone(),
        mor_map: f.mor_map.clone(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::generators::{delooping, discrete, terminal_cat, walking_iso};

    fn arc(c: FinCat) -> Arc<FinCat> {
        Arc::new(c)
    }

    #[test]
    fn identity_and_collapse_are_weak_equivalences() {
        let w = arc(walking_iso());
        let t = arc(terminal_cat());
        assert!(is_weak_equivalence(&Functor::identity(&w)).is_some());
        let collapse = Functor::collapse(&w, &t).unwrap();
        let cert = is_weak_equivalence(&collapse).expect("collapse is a weak equivalence");
        assert!(cert.validate());
        assert_eq!(cert.split(ObjId(0)), (ObjId(0), Iso::identity(&t, ObjId(0))));
    }

    #[test]
    fn discrete_two_to_terminal_is_not_full() {
        let d = arc(discrete(2));
        let t = arc(terminal_cat());
        let f = Functor::collapse(&d, &t).unwrap();
        assert!(is_fully_faithful(&f).is_none());
        assert!(is_essentially_surjective(&f).is_some());
        assert!(is_weak_equivalence(&f).is_none());
    }

    #[test]
    fn inclusion_of_point_into_walking_iso_is_eso() {
        let t = arc(terminal_cat());
        let w = arc(walking_iso());
        let a = w.find_object("a").unwrap();
        let incl = Functor::new(t, w.clone(), vec![a], vec![w.id(a)]).unwrap();
        let eso = is_essentially_surjective(&incl).unwrap();
        let f = w.find_morphism("f").unwrap();
        assert_eq!(eso.splits[1].1.fwd, f);
        assert_eq!(eso.splits[0].1, Iso::identity(&w, a));
    }

    #[test]
    fn discrete_into_walking_iso_is_not_full() {
        let d = arc(discrete(2));
        let w = arc(walking_iso());
        let f = Functor::new(d, w.clone(), vec![ObjId(0), ObjId(1)], vec![w.id(ObjId(0)), w.id(ObjId(1))])
            .unwrap();
        assert!(is_weak_equivalence(&f).is_none());
    }

    #[test]
    fn composition_mismatch_is_rejected() {
        let w = arc(walking_iso());
        let m = arc(delooping(&["1", "e"], &[vec![0, 1], vec![1, 1]]).unwrap());
        let (ida, idb, f, g) = (
            w.find_morphism("id_a").unwrap(),
            w.find_morphism("id_b").unwrap(),
            w.find_morphism("f").unwrap(),
            w.find_morphism("g").unwrap(),
        );
        let mut mors = vec![MorId(0); 4];
        mors[ida.0] = MorId(0);
        mors[idb.0] = MorId(0);
        mors[f.0] = MorId(1);
        mors[g.0] = MorId(0);
        let err = Functor::new(w, m, vec![ObjId(0), ObjId(0)], mors).unwrap_err();
        assert!(matches!(err, FunctorError::CompositionNotPreserved { .. }));
    }

    #[test]
    fn nat_iso_between_points_of_walking_iso() {
        let t = arc(terminal_cat());
        let w = arc(walking_iso());
        let (a, b) = (w.find_object("a").unwrap(), w.find_object("b").unwrap());
        let pa = Functor::new(t.clone(), w.clone(), vec![a], vec![w.id(a)]).unwrap();
        let pb = Functor::new(t, w.clone(), vec![b], vec![w.id(b)]).unwrap();
        let f = w.find_morphism("f").unwrap();
        let alpha = check_nat_iso(&[f], &pa, &pb).unwrap();
        assert_eq!(alpha.component(ObjId(0)).inv, w.find_morphism("g").unwrap());
        assert!(check_nat_iso(&[w.id(a)], &pa, &pa).is_ok());
    }

    #[test]
    fn non_iso_component_is_rejected() {
        let t = arc(terminal_cat());
        let m = arc(delooping(&["1", "e"], &[vec![0, 1], vec![1, 1]]).unwrap());
        let p = Functor::new(t, m.clone(), vec![ObjId(0)], vec![MorId(0)]).unwrap();
        let e = m.find_morphism("e").unwrap();
        assert!(matches!(
            check_nat_iso(&[e], &p, &p),
            Err(NatIsoError::ComponentNotIso { .. })
        ));
    }

    #[test]
    fn opposite_cert_validates() {
        let w = arc(walking_iso());
        let t = arc(terminal_cat());
        let cert = is_weak_equivalence(&Functor::collapse(&w, &t).unwrap()).unwrap();
        let op = cert.opposite();
        assert!(op.validate());
        assert!(is_weak_equivalence(op.functor()).is_some());
    }
}
