//! Finite limits by exhaustive search: terminal objects, binary products,
//! equalizers and pullbacks, their transfer along weak equivalences,
//! preservation certificates, and colimits through the opposite category.

use std::collections::BTreeMap;
use std::fmt::Debug;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::fincat::{opposite, FinCat, Iso, MorId, ObjId};
use crate::functor::{check_nat_iso, same_category, Functor, NatIso, WeakEquivalenceCert};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum LimitError {
    #[error("legs do not form a cone over the diagram")]
    NotACone,
    #[error("weak-equivalence certificate does not validate")]
    InvalidCert,
    #[error("precondition violated: {0}")]
    PreconditionViolation(String),
    #[error("internal: transferred {kind} for {key} is not a limit")]
    TransferFails { kind: &'static str, key: String },
    #[error("internal: reflected {kind} for {key} is not a limit")]
    ReflectionFails { kind: &'static str, key: String },
    #[error("internal: constructed and direct {kind} comparison differ at {key}")]
    LiftDisagrees { kind: &'static str, key: String },
}

impl LimitError {
    /// Errors that can only come from a bug, never from bad input.
    pub fn is_internal(&self) -> bool {
        matches!(
            self,
            LimitError::TransferFails { .. } | LimitError::ReflectionFails { .. } | LimitError::LiftDisagrees { .. }
        )
    }
}

/// A finite diagram: `arrows[i] = (a, b, m)` with `m: nodes[a] → nodes[b]`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Diagram {
    pub nodes: Vec<ObjId>,
    pub arrows: Vec<(usize, usize, MorId)>,
}

impl Diagram {
    pub fn map(&self, f: &Functor) -> Diagram {
        Diagram {
            nodes: self.nodes.iter().map(|&x| f.obj(x)).collect(),
            arrows: self.arrows.iter().map(|&(a, b, m)| (a, b, f.mor(m))).collect(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Cone {
    pub apex: ObjId,
    pub legs: Vec<MorId>,
}

impl Cone {
    pub fn map(&self, f: &Functor) -> Cone {
        Cone {
            apex: f.obj(self.apex),
            legs: self.legs.iter().map(|&l| f.mor(l)).collect(),
        }
    }
}

pub fn is_cone(c: &FinCat, d: &Diagram, cone: &Cone) -> bool {
    cone.legs.len() == d.nodes.len()
        && cone
            .legs
            .iter()
            .zip(&d.nodes)
            .all(|(&l, &x)| l.0 < c.morphism_count() && c.src(l) == cone.apex && c.dst(l) == x)
        && d
            .arrows
            .iter()
            .all(|&(a, b, m)| c.compose(cone.legs[a], m) == cone.legs[b])
}

/// All cones with apex `z`, in lexicographic order of hom-set positions.
pub fn cones_from(c: &FinCat, d: &Diagram, z: ObjId) -> Vec<Vec<MorId>> {
    let mut out = Vec::new();
    let mut legs = Vec::with_capacity(d.nodes.len());
    extend_cones(c, d, z, &mut legs, &mut out);
    out
}

fn extend_cones(c: &FinCat, d: &Diagram, z: ObjId, legs: &mut Vec<MorId>, out: &mut Vec<Vec<MorId>>) {
    let k = legs.len();
    if k == d.nodes.len() {
        out.push(legs.clone());
        return;
    }
    for &l in c.hom(z, d.nodes[k]) {
        legs.push(l);
        let ok = d.arrows.iter().all(|&(a, b, m)| {
            let (a_set, b_set) = (a <= k, b <= k);
            !(a_set && b_set) || c.compose(legs[a], m) == legs[b]
        });
        if ok {
            extend_cones(c, d, z, legs, out);
        }
        legs.pop();
    }
}

/// All `h: z → apex` with `h·leg_k = other_k`.
pub fn mediators(c: &FinCat, limit: &Cone, other: &Cone) -> Vec<MorId> {
    c.hom(other.apex, limit.apex)
        .iter()
        .copied()
        .filter(|&h| {
            limit
                .legs
                .iter()
                .zip(&other.legs)
                .all(|(&l, &o)| c.compose(h, l) == o)
        })
        .collect()
}

/// First cone (in object order) with zero or several mediators.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Counterexample {
    pub cone: Cone,
    pub mediators: usize,
}

pub fn limit_counterexample(c: &FinCat, d: &Diagram, cone: &Cone) -> Option<Counterexample> {
    for z in c.object_ids() {
        for legs in cones_from(c, d, z) {
            let other = Cone { apex: z, legs };
            let n = mediators(c, cone, &other).len();
            if n != 1 {
                return Some(Counterexample { cone: other, mediators: n });
            }
        }
    }
    None
}

/// `h ↦ h·legs` is a bijection from `hom(z, apex)` onto the cones from `z`,
/// for every `z`.
pub fn is_limit(c: &FinCat, d: &Diagram, cone: &Cone) -> bool {
    if !is_cone(c, d, cone) {
        return false;
    }
    c.object_ids().all(|z| {
        let hom = c.hom(z, cone.apex);
        let mut images: Vec<Vec<MorId>> = hom
            .iter()
            .map(|&h| cone.legs.iter().map(|&l| c.compose(h, l)).collect())
            .collect();
        images.sort();
        images.dedup();
        images.len() == hom.len() && cones_from(c, d, z).len() == hom.len()
    })
}

/// Lowest apex, then lexicographically lowest legs.
pub fn find_limit(c: &FinCat, d: &Diagram) -> Option<Cone> {
    c.object_ids().find_map(|apex| {
        cones_from(c, d, apex)
            .into_iter()
            .map(|legs| Cone { apex, legs })
            .find(|cone| is_limit(c, d, cone))
    })
}

/// The unique mediator from `other` into the limit `limit`.
pub fn mediating(c: &FinCat, d: &Diagram, limit: &Cone, other: &Cone) -> Result<MorId, LimitError> {
    if !is_cone(c, d, other) {
        return Err(LimitError::NotACone);
    }
    match mediators(c, limit, other).as_slice() {
        [h] => Ok(*h),
        _ => Err(LimitError::PreconditionViolation("cone is not limiting".into())),
    }
}

/// A kind of finite limit, identified per diagram by a key.
pub trait LimitShape: Clone + Debug + PartialEq {
    type Key: Copy + Ord + Debug;
    const NAME: &'static str;

    /// All diagrams of this shape in `c`.
    fn keys(c: &FinCat) -> Vec<Self::Key>;
    fn diagram(c: &FinCat, key: Self::Key) -> Diagram;
    fn key_of(d: &Diagram) -> Self::Key;
    fn key(&self) -> Self::Key;
    fn cone(&self, c: &FinCat) -> Cone;
    fn from_cone(c: &FinCat, key: Self::Key, cone: &Cone) -> Self;
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TerminalW {
    pub t: ObjId,
}

impl LimitShape for TerminalW {
    type Key = ();
    const NAME: &'static str = "terminal";

    fn keys(_: &FinCat) -> Vec<()> {
        vec![()]
    }

    fn diagram(_: &FinCat, _: ()) -> Diagram {
        Diagram {
            nodes: vec![],
            arrows: vec![],
        }
    }

    fn key_of(_: &Diagram) {}

    fn key(&self) {}

    fn cone(&self, _: &FinCat) -> Cone {
        Cone {
            apex: self.t,
            legs: vec![],
        }
    }

    fn from_cone(_: &FinCat, _: (), cone: &Cone) -> Self {
        TerminalW { t: cone.apex }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct BinProductW {
    pub x1: ObjId,
    pub x2: ObjId,
    pub apex: ObjId,
    pub pi1: MorId,
    pub pi2: MorId,
}

impl LimitShape for BinProductW {
    type Key = (ObjId, ObjId);
    const NAME: &'static str = "binary product";

    fn keys(c: &FinCat) -> Vec<Self::Key> {
        c.object_ids().flat_map(|x| c.object_ids().map(move |y| (x, y))).collect()
    }

    fn diagram(_: &FinCat, (x1, x2): Self::Key) -> Diagram {
        Diagram {
            nodes: vec![x1, x2],
            arrows: vec![],
        }
    }

    fn key_of(d: &Diagram) -> Self::Key {
        (d.nodes[0], d.nodes[1])
    }

    fn key(&self) -> Self::Key {
        (self.x1, self.x2)
    }

    fn cone(&self, _: &FinCat) -> Cone {
        Cone {
            apex: self.apex,
            legs: vec![self.pi1, self.pi2],
        }
    }

    fn from_cone(_: &FinCat, (x1, x2): Self::Key, cone: &Cone) -> Self {
        BinProductW {
            x1,
            x2,
            apex: cone.apex,
            pi1: cone.legs[0],
            pi2: cone.legs[1],
        }
    }
}

/// Equalizer `arrow: apex → src f` of a parallel pair `f, g`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct EqualizerW {
    pub f: MorId,
    pub g: MorId,
    pub apex: ObjId,
    pub arrow: MorId,
}

impl LimitShape for EqualizerW {
    type Key = (MorId, MorId);
    const NAME: &'static str = "equalizer";

    fn keys(c: &FinCat) -> Vec<Self::Key> {
        c.morphism_ids()
            .flat_map(|f| c.hom(c.src(f), c.dst(f)).iter().map(move |&g| (f, g)))
            .collect()
    }

    fn diagram(c: &FinCat, (f, g): Self::Key) -> Diagram {
        Diagram {
            nodes: vec![c.src(f), c.dst(f)],
            arrows: vec![(0, 1, f), (0, 1, g)],
        }
    }

    fn key_of(d: &Diagram) -> Self::Key {
        (d.arrows[0].2, d.arrows[1].2)
    }

    fn key(&self) -> Self::Key {
        (self.f, self.g)
    }

    fn cone(&self, c: &FinCat) -> Cone {
        Cone {
            apex: self.apex,
            legs: vec![self.arrow, c.compose(self.arrow, self.f)],
        }
    }

    fn from_cone(_: &FinCat, (f, g): Self::Key, cone: &Cone) -> Self {
        EqualizerW {
            f,
            g,
            apex: cone.apex,
            arrow: cone.legs[0],
        }
    }
}

/// Pullback of a cospan `f: x → z ← y: g`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PullbackW {
    pub f: MorId,
    pub g: MorId,
    pub apex: ObjId,
    pub p1: MorId,
    pub p2: MorId,
}

impl LimitShape for PullbackW {
    type Key = (MorId, MorId);
    const NAME: &'static str = "pullback";

    fn keys(c: &FinCat) -> Vec<Self::Key> {
        c.morphism_ids()
            .flat_map(|f| c.morphism_ids().filter(move |&g| c.dst(g) == c.dst(f)).map(move |g| (f, g)))
            .collect()
    }

    fn diagram(c: &FinCat, (f, g): Self::Key) -> Diagram {
        Diagram {
            nodes: vec![c.src(f), c.src(g), c.dst(f)],
            arrows: vec![(0, 2, f), (1, 2, g)],
        }
    }

    fn key_of(d: &Diagram) -> Self::Key {
        (d.arrows[0].2, d.arrows[1].2)
    }

    fn key(&self) -> Self::Key {
        (self.f, self.g)
    }

    fn cone(&self, c: &FinCat) -> Cone {
        Cone {
            apex: self.apex,
            legs: vec![self.p1, self.p2, c.compose(self.p1, self.f)],
        }
    }

    fn from_cone(_: &FinCat, (f, g): Self::Key, cone: &Cone) -> Self {
        PullbackW {
            f,
            g,
            apex: cone.apex,
            p1: cone.legs[0],
            p2: cone.legs[1],
        }
    }
}

/// A table of chosen limits, possibly partial.
#[derive(Clone, Debug, PartialEq)]
pub struct Chosen<S: LimitShape> {
    pub entries: BTreeMap<S::Key, S>,
}

impl<S: LimitShape> Default for Chosen<S> {
    fn default() -> Self {
        Chosen {
            entries: BTreeMap::new(),
        }
    }
}

impl<S: LimitShape> Chosen<S> {
    pub fn get(&self, key: S::Key) -> Option<&S> {
        self.entries.get(&key)
    }

    pub fn insert(&mut self, w: S) {
        self.entries.insert(w.key(), w);
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// Every key of `c` has an entry.
    pub fn is_total(&self, c: &FinCat) -> bool {
        S::keys(c).iter().all(|k| self.entries.contains_key(k))
    }

    /// First entry that is mistyped or not a limit.
    pub fn first_invalid(&self, c: &FinCat) -> Option<S::Key> {
        self.entries
            .iter()
            .find(|(&k, w)| w.key() != k || !check(c, *w))
            .map(|(k, _)| *k)
    }
}

pub type ChosenTerminal = TerminalW;
pub type ChosenBinProducts = Chosen<BinProductW>;
pub type ChosenEqualizers = Chosen<EqualizerW>;
pub type ChosenPullbacks = Chosen<PullbackW>;

fn well_typed_key<S: LimitShape>(c: &FinCat, key: S::Key) -> bool {
    S::keys(c).contains(&key)
}

/// Brute-force universal-property check of a witness.
pub fn check<S: LimitShape>(c: &FinCat, w: &S) -> bool {
    let key = w.key();
    if !well_typed_key::<S>(c, key) {
        return false;
    }
    let cone = w.cone(c);
    if cone.apex.0 >= c.object_count() || cone.legs.iter().any(|l| l.0 >= c.morphism_count()) {
        return false;
    }
    is_limit(c, &S::diagram(c, key), &cone)
}

pub fn find<S: LimitShape>(c: &FinCat, key: S::Key) -> Option<S> {
    find_limit(c, &S::diagram(c, key)).map(|cone| S::from_cone(c, key, &cone))
}

/// Every key of `c`, or the first key without a limit.
pub fn find_all<S: LimitShape>(c: &FinCat) -> Result<Chosen<S>, S::Key> {
    let mut out = Chosen::default();
    for key in S::keys(c) {
        out.insert(find(c, key).ok_or(key)?);
    }
    Ok(out)
}

/// Every key of `c` that has a limit.
pub fn find_partial<S: LimitShape>(c: &FinCat) -> Chosen<S> {
    find_for_keys(c, S::keys(c))
}

pub fn find_for_keys<S: LimitShape>(c: &FinCat, keys: impl IntoIterator<Item = S::Key>) -> Chosen<S> {
    let mut out = Chosen::default();
    for key in keys {
        if let Some(w) = find(c, key) {
            out.insert(w);
        }
    }
    out
}

pub fn is_terminal(c: &FinCat, t: ObjId) -> bool {
    check(c, &TerminalW { t })
}

pub fn find_terminal(c: &FinCat) -> Option<TerminalW> {
    find(c, ())
}

/// The unique morphism `x → t`.
pub fn to_terminal(c: &FinCat, t: ObjId, x: ObjId) -> MorId {
    c.hom(x, t)[0]
}

pub fn is_binary_product(c: &FinCat, w: &BinProductW) -> bool {
    check(c, w)
}

pub fn find_binary_products(c: &FinCat) -> Option<ChosenBinProducts> {
    find_all(c).ok()
}

pub fn is_equalizer(c: &FinCat, w: &EqualizerW) -> bool {
    check(c, w)
}

pub fn find_equalizers(c: &FinCat) -> Option<ChosenEqualizers> {
    find_all(c).ok()
}

pub fn is_pullback(c: &FinCat, w: &PullbackW) -> bool {
    check(c, w)
}

pub fn find_pullbacks(c: &FinCat) -> Option<ChosenPullbacks> {
    find_all(c).ok()
}

/// `⟨g1, g2⟩: z → apex`.
pub fn pairing(c: &FinCat, w: &BinProductW, g1: MorId, g2: MorId) -> Result<MorId, LimitError> {
    if c.src(g1) != c.src(g2) {
        return Err(LimitError::NotACone);
    }
    let d = BinProductW::diagram(c, w.key());
    mediating(
        c,
        &d,
        &w.cone(c),
        &Cone {
            apex: c.src(g1),
            legs: vec![g1, g2],
        },
    )
}

/// `f1 × f2` between chosen products.
pub fn product_map(c: &FinCat, prods: &ChosenBinProducts, f1: MorId, f2: MorId) -> Result<MorId, LimitError> {
    let missing = || LimitError::PreconditionViolation("product missing from the chosen table".into());
    let from = prods.get((c.src(f1), c.src(f2))).ok_or_else(missing)?;
    let to = prods.get((c.dst(f1), c.dst(f2))).ok_or_else(missing)?;
    pairing(c, to, c.compose(from.pi1, f1), c.compose(from.pi2, f2))
}

/// Pulls a diagram of `D` back to `C` along the chosen splitting:
/// nodes `σ(y_k)`, arrows `G⁻¹(i_a·m·i_b⁻¹)`.
pub fn pull_back_diagram(g: &WeakEquivalenceCert, d: &Diagram) -> Diagram {
    let dc = &**g.target();
    let splits: Vec<(ObjId, Iso)> = d.nodes.iter().map(|&y| g.split(y)).collect();
    Diagram {
        nodes: splits.iter().map(|s| s.0).collect(),
        arrows: d
            .arrows
            .iter()
            .map(|&(a, b, m)| {
                let conj = dc.compose_all(&[splits[a].1.fwd, m, splits[b].1.inv]);
                (a, b, g.preimage(splits[a].0, splits[b].0, conj))
            })
            .collect(),
    }
}

/// The keys of `C` needed to transfer every key of `D`.
pub fn pulled_back_keys<S: LimitShape>(g: &WeakEquivalenceCert) -> Vec<S::Key> {
    let d = &**g.target();
    let mut keys: Vec<S::Key> = S::keys(d)
        .into_iter()
        .map(|k| S::key_of(&pull_back_diagram(g, &S::diagram(d, k))))
        .collect();
    keys.sort();
    keys.dedup();
    keys
}

/// `mu[k]: chosen apex over F(δ_k) → F(apex_k)`.
#[derive(Clone, Debug, PartialEq)]
pub struct PreservationCert<S: LimitShape> {
    pub functor: Functor,
    pub mu: BTreeMap<S::Key, Iso>,
}

pub type ProductPreservationCert = PreservationCert<BinProductW>;

/// The first key at which preservation fails.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PreservationFailure {
    pub key: String,
    pub counterexample: Option<Counterexample>,
}

/// Checks that every chosen limit of `c` is sent to a limit, and records
/// the comparison with the chosen limit in the target. Keys whose image has
/// no chosen witness in the target are skipped.
pub fn preserves<S: LimitShape>(
    f: &Functor,
    chosen_c: &Chosen<S>,
    chosen_d: &Chosen<S>,
) -> Result<PreservationCert<S>, PreservationFailure> {
    let (c, d) = (&**f.source(), &**f.target());
    let mut mu = BTreeMap::new();
    for (&key, w) in &chosen_c.entries {
        let image_diagram = S::diagram(c, key).map(f);
        let image = w.cone(c).map(f);
        if let Some(cx) = limit_counterexample(d, &image_diagram, &image) {
            return Err(PreservationFailure {
                key: format!("{key:?}"),
                counterexample: Some(cx),
            });
        }
        let Some(target) = chosen_d.get(S::key_of(&image_diagram)) else {
            continue;
        };
        let target = target.cone(d);
        let fwd = mediating(d, &image_diagram, &image, &target).expect("limit");
        let inv = mediating(d, &image_diagram, &target, &image).expect("limit");
        mu.insert(key, Iso { fwd, inv });
    }
    Ok(PreservationCert {
        functor: f.clone(),
        mu,
    })
}

/// Chosen limits on `D` from those on `C`: apex `G(p)`, legs `G(π_k)·i_k`.
/// Returns the table together with the preservation certificate of `G`.
pub fn transfer<S: LimitShape>(
    g: &WeakEquivalenceCert,
    chosen_c: &Chosen<S>,
) -> Result<(Chosen<S>, PreservationCert<S>), LimitError> {
    if !g.validate() {
        return Err(LimitError::InvalidCert);
    }
    let (c, d) = (&**g.source(), &**g.target());
    let mut out = Chosen::default();
    for key in S::keys(d) {
        let diagram = S::diagram(d, key);
        let pulled = pull_back_diagram(g, &diagram);
        let Some(w) = chosen_c.get(S::key_of(&pulled)) else {
            continue;
        };
        let cone = w.cone(c);
        let legs = cone
            .legs
            .iter()
            .zip(&diagram.nodes)
            .map(|(&l, &y)| d.compose(g.functor().mor(l), g.split(y).1.fwd))
            .collect();
        let cone = Cone {
            apex: g.functor().obj(cone.apex),
            legs,
        };
        if !is_limit(d, &diagram, &cone) {
            return Err(LimitError::TransferFails {
                kind: S::NAME,
                key: format!("{key:?}"),
            });
        }
        out.insert(S::from_cone(d, key, &cone));
    }
    let cert = preserves(g.functor(), chosen_c, &out).map_err(|e| LimitError::TransferFails {
        kind: S::NAME,
        key: e.key,
    })?;
    Ok((out, cert))
}

/// A fully faithful functor reflects limits: given a cone in `C` whose image
/// is a limit, every cone into it has the mediator `G⁻¹(h)` for the image
/// mediator `h`, and no other. Cross-checked by direct search.
pub fn reflect<S: LimitShape>(g: &WeakEquivalenceCert, key: S::Key, cone: &Cone) -> Result<(), LimitError> {
    let (c, d) = (&**g.source(), &**g.target());
    let diagram = S::diagram(c, key);
    let image_diagram = diagram.map(g.functor());
    let image = cone.map(g.functor());
    if !is_limit(d, &image_diagram, &image) {
        return Err(LimitError::PreconditionViolation(format!(
            "image of the {} cone at {key:?} is not a limit",
            S::NAME
        )));
    }
    let fail = || LimitError::ReflectionFails {
        kind: S::NAME,
        key: format!("{key:?}"),
    };
    let constructive = is_cone(c, &diagram, cone)
        && c.object_ids().all(|z| {
            cones_from(c, &diagram, z).into_iter().all(|legs| {
                let other = Cone { apex: z, legs };
                let Ok(h) = mediating(d, &image_diagram, &image, &other.map(g.functor())) else {
                    return false;
                };
                let u = g.preimage(z, cone.apex, h);
                // faithfulness makes u the only candidate
                mediators(c, cone, &other) == vec![u]
            })
        });
    if constructive != is_limit(c, &diagram, cone) || !constructive {
        return Err(fail());
    }
    Ok(())
}

/// Everything needed to lift a preservation certificate along `G`: the
/// weak equivalence `G: C → D`, functors `F: C → E`, `H: D → E` and
/// `α: G·H ⇒ F`.
pub struct LiftInput<'a> {
    pub g: &'a WeakEquivalenceCert,
    pub f: &'a Functor,
    pub h: &'a Functor,
    pub alpha: &'a NatIso,
}

impl LiftInput<'_> {
    pub fn validate(&self) -> Result<(), LimitError> {
        if !self.g.validate() {
            return Err(LimitError::InvalidCert);
        }
        let gh = self
            .g
            .functor()
            .then(self.h)
            .map_err(|e| LimitError::PreconditionViolation(e.to_string()))?;
        if !same_category(self.f.source(), self.g.source()) {
            return Err(LimitError::PreconditionViolation("F does not start at the domain of G".into()));
        }
        check_nat_iso(&self.alpha.forward_components(), &gh, self.f)
            .map(|_| ())
            .map_err(|e| LimitError::PreconditionViolation(format!("alpha: {e}")))
    }

    /// `β_y = H(i_y)⁻¹·α_{σy}: H(y) → F(σy)`.
    pub fn beta(&self, y: ObjId) -> Iso {
        let e = &**self.f.target();
        let (x, i) = self.g.split(y);
        self.h.map_iso(i.inverse()).then(e, self.alpha.component(x))
    }
}

/// Preservation by `H` from preservation by `F`: reflect the pulled-back
/// cone, push it through `F`, transport along `α`. The result must coincide
/// with the direct check.
pub fn lift_preservation<S: LimitShape>(
    input: &LiftInput,
    chosen_c: &Chosen<S>,
    chosen_d: &Chosen<S>,
    chosen_e: &Chosen<S>,
    f_cert: &PreservationCert<S>,
) -> Result<PreservationCert<S>, LimitError> {
    input.validate()?;
    let LiftInput { g, f, h, .. } = *input;
    let (c, d, e) = (&**g.source(), &**g.target(), &**f.target());
    let mut mu = BTreeMap::new();
    for (&key, w) in &chosen_d.entries {
        let diagram = S::diagram(d, key);
        let cone = w.cone(d);
        let Some(target) = chosen_e.get(S::key_of(&diagram.map(h))) else {
            continue;
        };
        let target = target.cone(e);
        // pulled back cone σ_k = G⁻¹(j·π_k·i_k⁻¹)
        let pulled = pull_back_diagram(g, &diagram);
        let ckey = S::key_of(&pulled);
        let (px, j) = g.split(cone.apex);
        let sigma = Cone {
            apex: px,
            legs: cone
                .legs
                .iter()
                .zip(&diagram.nodes)
                .map(|(&l, &y)| {
                    let (x, i) = g.split(y);
                    g.preimage(px, x, d.compose_all(&[j.fwd, l, i.inv]))
                })
                .collect(),
        };
        reflect::<S>(g, ckey, &sigma)?;
        let missing = |what: &str| LimitError::PreconditionViolation(format!("{what} missing at {ckey:?}"));
        let omega = chosen_c.get(ckey).ok_or_else(|| missing("chosen source limit"))?.cone(c);
        let mu_f = *f_cert.mu.get(&ckey).ok_or_else(|| missing("F comparison"))?;
        let u = Iso {
            fwd: mediating(c, &pulled, &omega, &sigma)?,
            inv: mediating(c, &pulled, &sigma, &omega)?,
        };
        // the chosen E-limit over F(pulled)
        let f_diagram = pulled.map(f);
        let eps = chosen_e
            .get(S::key_of(&f_diagram))
            .ok_or_else(|| missing("chosen target limit"))?
            .cone(e);
        let transported = Cone {
            apex: target.apex,
            legs: target
                .legs
                .iter()
                .zip(&diagram.nodes)
                .map(|(&l, &y)| e.compose(l, input.beta(y).fwd))
                .collect(),
        };
        let v = mediating(e, &f_diagram, &eps, &transported)?;
        let beta_p = input.beta(cone.apex);
        let fwd = e.compose_all(&[v, mu_f.fwd, f.mor(u.inv), beta_p.inv]);
        let inv = crate::fincat::find_iso(e, fwd).ok_or_else(|| LimitError::LiftDisagrees {
            kind: S::NAME,
            key: format!("{key:?}"),
        })?;
        mu.insert(key, inv);
    }
    let direct = preserves(h, chosen_d, chosen_e).map_err(|_| LimitError::LiftDisagrees {
        kind: S::NAME,
        key: "direct check".into(),
    })?;
    if direct.mu != mu {
        let key = direct
            .mu
            .iter()
            .find(|(k, v)| mu.get(k) != Some(v))
            .map(|(k, _)| format!("{k:?}"))
            .unwrap_or_default();
        return Err(LimitError::LiftDisagrees { kind: S::NAME, key });
    }
    Ok(PreservationCert {
        functor: h.clone(),
        mu,
    })
}

/// Colimits of `c` are limits of `opposite(c)`: a witness found there has
/// the same indices, with legs read as coprojections into the apex.
pub fn find_colimits<S: LimitShape>(c: &FinCat) -> Result<Chosen<S>, S::Key> {
    find_all(&opposite(c))
}

pub fn check_colimit<S: LimitShape>(c: &FinCat, w: &S) -> bool {
    check(&opposite(c), w)
}

pub fn find_initial(c: &FinCat) -> Option<TerminalW> {
    find_terminal(&opposite(c))
}

/// Coproducts as products of the opposite: `pi1`, `pi2` are injections.
pub fn find_binary_coproducts(c: &FinCat) -> Option<ChosenBinProducts> {
    find_colimits(c).ok()
}

/// Coequalizers as equalizers of the opposite: `arrow: dst f → apex`.
pub fn find_coequalizers(c: &FinCat) -> Option<ChosenEqualizers> {
    find_colimits(c).ok()
}

pub fn find_pushouts(c: &FinCat) -> Option<ChosenPullbacks> {
    find_colimits(c).ok()
}

pub fn transfer_colimits<S: LimitShape>(
    g: &WeakEquivalenceCert,
    chosen_c: &Chosen<S>,
) -> Result<(Chosen<S>, PreservationCert<S>), LimitError> {
    transfer(&g.opposite(), chosen_c)
}

#[cfg(test)]
mod tests {
    use std::sync::Arc;

    use super::*;
    use crate::completion::{inflate, skeletize};
    use crate::functor::is_weak_equivalence;
    use crate::generators::{discrete, finset_fragment, finset_subcategory, preorder_cat, terminal_cat, walking_iso};

    fn chain2() -> FinCat {
        preorder_cat(&["0", "1"], &[(0, 1)]).unwrap()
    }

    #[test]
    fn terminal_category_products_are_identities() {
        let t = terminal_cat();
        let prods = find_binary_products(&t).unwrap();
        assert_eq!(
            prods.get((ObjId(0), ObjId(0))),
            Some(&BinProductW {
                x1: ObjId(0),
                x2: ObjId(0),
                apex: ObjId(0),
                pi1: MorId(0),
                pi2: MorId(0)
            })
        );
    }

    #[test]
    fn chain_meets() {
        let c = chain2();
        let prods = find_binary_products(&c).unwrap();
        assert_eq!(prods.get((ObjId(0), ObjId(1))).unwrap().apex, ObjId(0));
        assert_eq!(find_terminal(&c), Some(TerminalW { t: ObjId(1) }));
        assert_eq!(find_initial(&c), Some(TerminalW { t: ObjId(0) }));
        let coprods = find_binary_coproducts(&c).unwrap();
        assert_eq!(coprods.get((ObjId(0), ObjId(1))).unwrap().apex, ObjId(1));
    }

    #[test]
    fn discrete_has_no_products() {
        assert!(find_binary_products(&discrete(2)).is_none());
    }

    #[test]
    fn finset_products_and_swaps() {
        let fs = finset_subcategory(&[1, 2, 4]);
        let c = &fs.category;
        let (two, four) = (fs.object_of_card(2).unwrap(), fs.object_of_card(4).unwrap());
        // 4 = 2 × 2 with digit projections
        let pi1 = fs.morphism(four, two, &[0, 0, 1, 1]).unwrap();
        let pi2 = fs.morphism(four, two, &[0, 1, 0, 1]).unwrap();
        let w = BinProductW {
            x1: two,
            x2: two,
            apex: four,
            pi1,
            pi2,
        };
        assert!(is_binary_product(c, &w));
        let swapped = BinProductW { pi1: pi2, pi2: pi1, ..w };
        assert!(is_binary_product(c, &swapped));
        let constant = fs.morphism(four, two, &[0, 0, 0, 0]).unwrap();
        assert!(!is_binary_product(c, &BinProductW { pi2: constant, ..w }));
        // diagonal pairs to the map hitting 0 and 3
        let id2 = c.id(two);
        let diag = pairing(c, &w, id2, id2).unwrap();
        assert_eq!(fs.maps[diag.0], vec![0, 3]);
        assert_eq!(pairing(c, &w, pi1, pi2).unwrap(), c.id(four));
        assert_eq!(pairing(c, &w, pi1, id2), Err(LimitError::NotACone));
    }

    #[test]
    fn finset_terminal_and_initial() {
        let fs = finset_fragment(3).unwrap();
        assert_eq!(find_terminal(&fs.category).map(|t| fs.card(t.t)), Some(1));
        assert_eq!(find_initial(&fs.category).map(|t| fs.card(t.t)), Some(0));
    }

    #[test]
    fn identity_fork_is_equalizer() {
        let c = chain2();
        let id = c.id(ObjId(0));
        let w: EqualizerW = find(&c, (id, id)).unwrap();
        assert_eq!(w, EqualizerW { f: id, g: id, apex: ObjId(0), arrow: id });
    }

    #[test]
    fn pullback_over_terminal_is_product() {
        let fs = finset_fragment(2).unwrap();
        let c = &fs.category;
        let one = fs.object_of_card(1).unwrap();
        for x in c.object_ids() {
            for y in c.object_ids() {
                let (f, g) = (to_terminal(c, one, x), to_terminal(c, one, y));
                let pb: Option<PullbackW> = find(c, (f, g));
                let pr: Option<BinProductW> = find(c, (x, y));
                assert_eq!(pb.map(|p| (p.apex, p.p1, p.p2)), pr.map(|p| (p.apex, p.pi1, p.pi2)));
            }
        }
    }

    #[test]
    fn transfer_along_collapse() {
        let c = Arc::new(walking_iso());
        let t = Arc::new(terminal_cat());
        let g = is_weak_equivalence(&Functor::collapse(&c, &t).unwrap()).unwrap();
        let prods = find_binary_products(&c).unwrap();
        let (onto, cert) = transfer(&g, &prods).unwrap();
        assert_eq!(onto, find_binary_products(&t).unwrap());
        assert_eq!(cert.mu.len(), 4);
    }

    #[test]
    fn transfer_along_identity_is_unchanged() {
        let c = Arc::new(chain2());
        let g = is_weak_equivalence(&Functor::identity(&c)).unwrap();
        let prods = find_binary_products(&c).unwrap();
        let (same, cert) = transfer(&g, &prods).unwrap();
        assert_eq!(same, prods);
        assert!(cert.mu.values().all(|i| c.is_identity(i.fwd)));
    }

    #[test]
    fn transfer_from_inflated_chain_matches_search() {
        let chain = Arc::new(chain2());
        let (big, proj) = inflate(&chain, &[2, 1]).unwrap();
        let g = is_weak_equivalence(&proj).unwrap();
        let prods = find_binary_products(&big).unwrap();
        let (onto, _) = transfer(&g, &prods).unwrap();
        assert_eq!(onto, find_binary_products(&chain).unwrap());
        let sk = skeletize(&big);
        let (onto_sk, _) = transfer(&sk.cert, &prods).unwrap();
        assert_eq!(onto_sk.len(), 4);
    }

    #[test]
    fn constant_functor_does_not_preserve_products() {
        let c = Arc::new(chain2());
        let k = Functor::new(
            c.clone(),
            c.clone(),
            vec![ObjId(0), ObjId(0)],
            vec![c.id(ObjId(0)); c.morphism_count()],
        )
        .unwrap();
        let prods = find_binary_products(&c).unwrap();
        assert!(preserves(&k, &prods, &prods).is_ok());
        // constant at the bottom preserves meets; the terminal is not kept
        let term = find_partial::<TerminalW>(&c);
        assert!(preserves(&k, &term, &term).is_err());
    }

    #[test]
    fn lift_along_identity() {
        let c = Arc::new(chain2());
        let id = Functor::identity(&c);
        let g = is_weak_equivalence(&id).unwrap();
        let prods = find_binary_products(&c).unwrap();
        let f_cert = preserves(&id, &prods, &prods).unwrap();
        let alpha = NatIso::identity(&id);
        let input = LiftInput {
            g: &g,
            f: &id,
            h: &id,
            alpha: &alpha,
        };
        let h_cert = lift_preservation(&input, &prods, &prods, &prods, &f_cert).unwrap();
        assert_eq!(h_cert.mu, f_cert.mu);
    }

    #[test]
    fn coequalizers_in_chain() {
        let c = chain2();
        let coeqs = find_coequalizers(&c).unwrap();
        assert!(coeqs.entries.values().all(|w| check_colimit(&c, w)));
    }
}
