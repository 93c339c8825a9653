//! Example categories and constructions, also used as the randomized test
//! corpus.

use std::collections::{BTreeSet, HashMap};
use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::completion::inflate;
use crate::fincat::{FinCat, MorId, Morphism, ObjId};
use crate::functor::Functor;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum GeneratorError {
    #[error("malformed input: {0}")]
    MalformedInput(String),
    #[error("size bound exceeded: {0}")]
    SizeBoundExceeded(String),
    #[error("monad law fails: {law} at `{object}`")]
    MonadLawViolation { law: &'static str, object: String },
    #[error("H-valued set axiom `{axiom}` fails at {tuple}")]
    AxiomViolation { axiom: &'static str, tuple: String },
}

fn labels(n: usize) -> Vec<String> {
    (0..n).map(|i| i.to_string()).collect()
}

pub fn terminal_cat() -> FinCat {
    FinCat::from_fn(
        "terminal",
        vec!["*".into()],
        vec![Morphism::new("id_*", ObjId(0), ObjId(0))],
        vec![MorId(0)],
        |_, _| MorId(0),
    )
    .expect("terminal category")
}

/// Objects `a`, `b`; morphisms `id_a`, `id_b`, `f: a → b`, `g: b → a`.
pub fn walking_iso() -> FinCat {
    let (a, b) = (ObjId(0), ObjId(1));
    let morphisms = vec![
        Morphism::new("id_a", a, a),
        Morphism::new("id_b", b, b),
        Morphism::new("f", a, b),
        Morphism::new("g", b, a),
    ];
    // Every hom-set is a singleton, so a composite is determined by its type.
    let by_type = |x: ObjId, y: ObjId| match (x.0, y.0) {
        (0, 0) => MorId(0),
        (1, 1) => MorId(1),
        (0, 1) => MorId(2),
        _ => MorId(3),
    };
    let ends = [(a, a), (b, b), (a, b), (b, a)];
    FinCat::from_fn(
        "walking-iso",
        vec!["a".into(), "b".into()],
        morphisms,
        vec![MorId(0), MorId(1)],
        |f, g| by_type(ends[f.0].0, ends[g.0].1),
    )
    .expect("walking iso")
}

pub fn discrete(n: usize) -> FinCat {
    let morphisms = (0..n)
        .map(|i| Morphism::new(format!("id_{i}"), ObjId(i), ObjId(i)))
        .collect();
    FinCat::from_fn(
        format!("discrete-{n}"),
        labels(n),
        morphisms,
        (0..n).map(MorId).collect(),
        |f, _| f,
    )
    .expect("discrete category")
}

/// Thin category on a relation given as index pairs `(i, j)` meaning
/// `i ≤ j`. Reflexive pairs are implicit; the relation must be transitive.
/// Morphisms are ordered lexicographically by `(src, dst)`.
pub fn preorder_cat(names: &[&str], leq: &[(usize, usize)]) -> Result<FinCat, GeneratorError> {
    let n = names.len();
    let mut rel = vec![vec![false; n]; n];
    for &(i, j) in leq {
        if i >= n || j >= n {
            return Err(GeneratorError::MalformedInput(format!("pair ({i}, {j}) out of range")));
        }
        rel[i][j] = true;
    }
    for (i, row) in rel.iter_mut().enumerate() {
        row[i] = true;
    }
    for i in 0..n {
        for j in 0..n {
            for k in 0..n {
                if rel[i][j] && rel[j][k] && !rel[i][k] {
                    return Err(GeneratorError::MalformedInput(format!(
                        "relation is not transitive: {i} ≤ {j} ≤ {k}"
                    )));
                }
            }
        }
    }
    Ok(thin_category("preorder", names.iter().map(|s| s.to_string()).collect(), &rel, "<="))
}

/// Reflexive-transitive closure of `pairs`, then [`preorder_cat`].
pub fn preorder_closure(names: &[&str], pairs: &[(usize, usize)]) -> Result<FinCat, GeneratorError> {
    let n = names.len();
    let rel = closure(n, pairs, false)?;
    let leq: Vec<_> = (0..n)
        .flat_map(|i| (0..n).map(move |j| (i, j)))
        .filter(|&(i, j)| rel[i][j])
        .collect();
    preorder_cat(names, &leq)
}

fn closure(n: usize, pairs: &[(usize, usize)], symmetric: bool) -> Result<Vec<Vec<bool>>, GeneratorError> {
    let mut rel = vec![vec![false; n]; n];
    for &(i, j) in pairs {
        if i >= n || j >= n {
            return Err(GeneratorError::MalformedInput(format!("pair ({i}, {j}) out of range")));
        }
        rel[i][j] = true;
        if symmetric {
            rel[j][i] = true;
        }
    }
    for (i, row) in rel.iter_mut().enumerate() {
        row[i] = true;
    }
    for k in 0..n {
        for i in 0..n {
            for j in 0..n {
                if rel[i][k] && rel[k][j] {
                    rel[i][j] = true;
                }
            }
        }
    }
    Ok(rel)
}

fn thin_category(name: &str, objects: Vec<String>, rel: &[Vec<bool>], sep: &str) -> FinCat {
    let n = objects.len();
    let mut index = vec![vec![None; n]; n];
    let mut morphisms = Vec::new();
    for i in 0..n {
        for j in 0..n {
            if rel[i][j] {
                index[i][j] = Some(MorId(morphisms.len()));
                let label = if i == j {
                    format!("id_{}", objects[i])
                } else {
                    format!("{}{sep}{}", objects[i], objects[j])
                };
                morphisms.push(Morphism::new(label, ObjId(i), ObjId(j)));
            }
        }
    }
    let ends: Vec<_> = morphisms.iter().map(|m| (m.src.0, m.dst.0)).collect();
    let identities = (0..n).map(|i| index[i][i].unwrap()).collect();
    FinCat::from_fn(name, objects, morphisms, identities, |f, g| {
        index[ends[f.0].0][ends[g.0].1].expect("transitive")
    })
    .expect("thin category")
}

/// Groupoid with a unique morphism `i → j` whenever `i ∼ j`, for the
/// equivalence relation generated by `pairs`.
pub fn setoid_groupoid(n: usize, pairs: &[(usize, usize)]) -> Result<FinCat, GeneratorError> {
    let rel = closure(n, pairs, true)?;
    Ok(thin_category("setoid", labels(n), &rel, "~"))
}

/// One-object category of a monoid given by its multiplication table
/// (`table[a][b] = a·b`). The unit is located automatically.
pub fn delooping(elements: &[&str], table: &[Vec<usize>]) -> Result<FinCat, GeneratorError> {
    let k = elements.len();
    if table.len() != k || table.iter().any(|row| row.len() != k || row.iter().any(|&v| v >= k)) {
        return Err(GeneratorError::MalformedInput("multiplication table has the wrong shape".into()));
    }
    let unit = (0..k)
        .find(|&e| (0..k).all(|a| table[e][a] == a && table[a][e] == a))
        .ok_or_else(|| GeneratorError::MalformedInput("no unit element".into()))?;
    for a in 0..k {
        for b in 0..k {
            for c in 0..k {
                if table[table[a][b]][c] != table[a][table[b][c]] {
                    return Err(GeneratorError::MalformedInput(format!(
                        "not associative on ({}, {}, {})",
                        elements[a], elements[b], elements[c]
                    )));
                }
            }
        }
    }
    let morphisms = elements
        .iter()
        .map(|e| Morphism::new(*e, ObjId(0), ObjId(0)))
        .collect();
    FinCat::from_fn("delooping", vec!["*".into()], morphisms, vec![MorId(unit)], |f, g| {
        MorId(table[f.0][g.0])
    })
    .map_err(|e| GeneratorError::MalformedInput(e.to_string()))
}

/// Cyclic group `Z/n` as a one-object category.
pub fn cyclic_group(n: usize) -> FinCat {
    let names: Vec<String> = (0..n).map(|i| i.to_string()).collect();
    let refs: Vec<&str> = names.iter().map(String::as_str).collect();
    let table: Vec<Vec<usize>> = (0..n).map(|a| (0..n).map(|b| (a + b) % n).collect()).collect();
    delooping(&refs, &table).expect("cyclic group")
}

pub const FINSET_MAX_CARD: usize = 3;

/// Full subcategory of finite sets on chosen cardinalities, with every
/// function recorded.
#[derive(Clone, Debug)]
pub struct FinSetFragment {
    pub category: FinCat,
    pub cards: Vec<usize>,
    /// `maps[f][i]` is the image of element `i` under morphism `f`.
    pub maps: Vec<Vec<usize>>,
    index: HashMap<(usize, usize, Vec<usize>), MorId>,
}

impl FinSetFragment {
    pub fn object_of_card(&self, k: usize) -> Option<ObjId> {
        self.cards.iter().position(|&c| c == k).map(ObjId)
    }

    pub fn card(&self, x: ObjId) -> usize {
        self.cards[x.0]
    }

    pub fn morphism(&self, src: ObjId, dst: ObjId, map: &[usize]) -> Option<MorId> {
        self.index.get(&(src.0, dst.0, map.to_vec())).copied()
    }

    pub fn is_injective(&self, f: MorId) -> bool {
        let map = &self.maps[f.0];
        map.iter().collect::<BTreeSet<_>>().len() == map.len()
    }
}

/// Sets `{0..=max_card}` with all functions. Capped at
/// [`FINSET_MAX_CARD`].
pub fn finset_fragment(max_card: usize) -> Result<FinSetFragment, GeneratorError> {
    finset_fragment_capped(max_card, FINSET_MAX_CARD)
}

pub fn finset_fragment_capped(max_card: usize, cap: usize) -> Result<FinSetFragment, GeneratorError> {
    if max_card > cap {
        return Err(GeneratorError::SizeBoundExceeded(format!(
            "finset fragment of cardinality {max_card} exceeds cap {cap}"
        )));
    }
    Ok(finset_subcategory(&(0..=max_card).collect::<Vec<_>>()))
}

/// Full subcategory of finite sets on the given (distinct) cardinalities.
pub fn finset_subcategory(cards: &[usize]) -> FinSetFragment {
    let n = cards.len();
    let mut morphisms = Vec::new();
    let mut maps = Vec::new();
    let mut index = HashMap::new();
    let mut identities = vec![MorId(0); n];
    for x in 0..n {
        for y in 0..n {
            let (a, b) = (cards[x], cards[y]);
            let count = b.checked_pow(a as u32).expect("small sets");
            for code in 0..count {
                // most significant digit first: element 0 varies slowest
                let mut map = vec![0; a];
                let mut rest = code;
                for i in (0..a).rev() {
                    map[i] = rest % b;
                    rest /= b;
                }
                let id = MorId(morphisms.len());
                let label = if x == y && map.iter().enumerate().all(|(i, &v)| i == v) {
                    identities[x] = id;
                    format!("id_{a}")
                } else {
                    format!("{a}->{b}{map:?}")
                };
                morphisms.push(Morphism::new(label, ObjId(x), ObjId(y)));
                index.insert((x, y, map.clone()), id);
                maps.push(map);
            }
        }
    }
    let category = FinCat::from_fn(
        format!("finset{cards:?}"),
        cards.iter().map(|c| c.to_string()).collect(),
        morphisms.clone(),
        identities,
        |f, g| {
            let composite: Vec<usize> = maps[f.0].iter().map(|&i| maps[g.0][i]).collect();
            index[&(morphisms[f.0].src.0, morphisms[g.0].dst.0, composite)]
        },
    )
    .expect("finite sets form a category");
    FinSetFragment {
        category,
        cards: cards.to_vec(),
        maps,
        index,
    }
}

const FUNCTOR_CATEGORY_BUDGET: usize = 200_000;

/// `[A, C]`: all functors `A → C` and all natural transformations.
#[derive(Clone, Debug)]
pub struct FunctorCategory {
    pub category: FinCat,
    pub functors: Vec<Functor>,
    /// Components of every morphism, indexed by morphism.
    pub transformations: Vec<Vec<MorId>>,
}

pub fn functor_category(a: &Arc<FinCat>, c: &Arc<FinCat>) -> Result<FunctorCategory, GeneratorError> {
    if a.object_count() > 2 {
        return Err(GeneratorError::SizeBoundExceeded(
            "functor categories are enumerated only for sources with at most 2 objects".into(),
        ));
    }
    let functors = all_functors(a, c)?;
    let mut morphisms = Vec::new();
    let mut transformations: Vec<Vec<MorId>> = Vec::new();
    let mut index: HashMap<(usize, usize, Vec<MorId>), MorId> = HashMap::new();
    let mut identities = vec![MorId(0); functors.len()];
    for (i, f) in functors.iter().enumerate() {
        for (j, g) in functors.iter().enumerate() {
            let homs: Vec<&[MorId]> = a.object_ids().map(|x| c.hom(f.obj(x), g.obj(x))).collect();
            for comps in cartesian(&homs) {
                let natural = a.morphism_ids().all(|m| {
                    c.compose(f.mor(m), comps[a.dst(m).0]) == c.compose(comps[a.src(m).0], g.mor(m))
                });
                if !natural {
                    continue;
                }
                let id = MorId(morphisms.len());
                let is_id = i == j && a.object_ids().all(|x| comps[x.0] == c.id(f.obj(x)));
                if is_id {
                    identities[i] = id;
                }
                morphisms.push(Morphism::new(
                    format!("F{i}=>F{j}#{}", morphisms.len()),
                    ObjId(i),
                    ObjId(j),
                ));
                index.insert((i, j, comps.clone()), id);
                transformations.push(comps);
            }
        }
    }
    let category = FinCat::from_fn(
        format!("[{}, {}]", a.name(), c.name()),
        (0..functors.len()).map(|i| format!("F{i}")).collect(),
        morphisms.clone(),
        identities,
        |s, t| {
            let comps: Vec<MorId> = transformations[s.0]
                .iter()
                .zip(&transformations[t.0])
                .map(|(&x, &y)| c.compose(x, y))
                .collect();
            index[&(morphisms[s.0].src.0, morphisms[t.0].dst.0, comps)]
        },
    )
    .expect("functor category");
    Ok(FunctorCategory {
        category,
        functors,
        transformations,
    })
}

fn cartesian(lists: &[&[MorId]]) -> Vec<Vec<MorId>> {
    let mut out = vec![Vec::new()];
    for list in lists {
        out = out
            .into_iter()
            .flat_map(|prefix| {
                list.iter().map(move |&m| {
                    let mut p = prefix.clone();
                    p.push(m);
                    p
                })
            })
            .collect();
    }
    out
}

fn all_functors(a: &Arc<FinCat>, c: &Arc<FinCat>) -> Result<Vec<Functor>, GeneratorError> {
    let n = a.object_count();
    let mut out = Vec::new();
    let mut budget = 0usize;
    let obj_maps = (0..c.object_count().pow(n as u32)).map(|code| {
        let mut rest = code;
        (0..n)
            .map(|_| {
                let x = ObjId(rest % c.object_count());
                rest /= c.object_count();
                x
            })
            .collect::<Vec<_>>()
    });
    let non_ids: Vec<MorId> = a.morphism_ids().filter(|&m| !a.is_identity(m)).collect();
    for obj_map in obj_maps {
        let homs: Vec<&[MorId]> = non_ids
            .iter()
            .map(|&m| c.hom(obj_map[a.src(m).0], obj_map[a.dst(m).0]))
            .collect();
        let count = homs.iter().map(|h| h.len()).product::<usize>();
        budget += count;
        if budget > FUNCTOR_CATEGORY_BUDGET {
            return Err(GeneratorError::SizeBoundExceeded(format!(
                "more than {FUNCTOR_CATEGORY_BUDGET} candidate functors"
            )));
        }
        for choice in cartesian(&homs) {
            let mut mor_map: Vec<MorId> = a.morphism_ids().map(|m| c.id(obj_map[a.src(m).0])).collect();
            for (&m, &img) in non_ids.iter().zip(&choice) {
                mor_map[m.0] = img;
            }
            if let Ok(f) = Functor::new(a.clone(), c.clone(), obj_map.clone(), mor_map) {
                out.push(f);
            }
        }
    }
    Ok(out)
}

/// Postcomposition `[A, C] → [A, D]` with `k: C → D`.
pub fn postcompose(src: &FunctorCategory, dst: &FunctorCategory, k: &Functor) -> Functor {
    let obj_map = src
        .functors
        .iter()
        .map(|f| {
            let fk = f.then(k).expect("composable");
            ObjId(dst.functors.iter().position(|g| *g == fk).expect("enumerated"))
        })
        .collect();
    let mor_map = src
        .category
        .morphism_ids()
        .map(|m| {
            let comps: Vec<MorId> = src.transformations[m.0].iter().map(|&x| k.mor(x)).collect();
            let (s, t) = (src.category.src(m), src.category.dst(m));
            let (s2, t2) = (
                src.functors[s.0].then(k).unwrap(),
                src.functors[t.0].then(k).unwrap(),
            );
            let (i, j) = (
                dst.functors.iter().position(|g| *g == s2).unwrap(),
                dst.functors.iter().position(|g| *g == t2).unwrap(),
            );
            dst.category
                .hom(ObjId(i), ObjId(j))
                .iter()
                .copied()
                .find(|&n| dst.transformations[n.0] == comps)
                .expect("enumerated")
        })
        .collect();
    Functor::new(
        Arc::new(src.category.clone()),
        Arc::new(dst.category.clone()),
        obj_map,
        mor_map,
    )
    .expect("postcomposition is a functor")
}

/// A monad `(T, unit, mult)` on a finite category.
#[derive(Clone, Debug)]
pub struct MonadW {
    pub endofunctor: Functor,
    /// `unit[x]: x → T x`
    pub unit: Vec<MorId>,
    /// `mult[x]: T T x → T x`
    pub mult: Vec<MorId>,
}

impl MonadW {
    pub fn identity(c: &Arc<FinCat>) -> MonadW {
        let ids: Vec<MorId> = c.object_ids().map(|x| c.id(x)).collect();
        MonadW {
            endofunctor: Functor::identity(c),
            unit: ids.clone(),
            mult: ids,
        }
    }

    /// Naturality of unit and multiplication, unit laws and associativity.
    pub fn validate(&self) -> Result<(), GeneratorError> {
        let t = &self.endofunctor;
        let c = &**t.source();
        if !crate::functor::same_category(t.source(), t.target()) {
            return Err(GeneratorError::MalformedInput("monad functor is not an endofunctor".into()));
        }
        let fail = |law, x: ObjId| GeneratorError::MonadLawViolation {
            law,
            object: c.object_label(x).to_string(),
        };
        for x in c.object_ids() {
            let (u, m) = (self.unit[x.0], self.mult[x.0]);
            if c.src(u) != x || c.dst(u) != t.obj(x) {
                return Err(fail("unit typing", x));
            }
            if c.src(m) != t.obj(t.obj(x)) || c.dst(m) != t.obj(x) {
                return Err(fail("multiplication typing", x));
            }
        }
        for f in c.morphism_ids() {
            let (x, y) = (c.src(f), c.dst(f));
            if c.compose(f, self.unit[y.0]) != c.compose(self.unit[x.0], t.mor(f)) {
                return Err(fail("unit naturality", x));
            }
            if c.compose(t.mor(t.mor(f)), self.mult[y.0]) != c.compose(self.mult[x.0], t.mor(f)) {
                return Err(fail("multiplication naturality", x));
            }
        }
        for x in c.object_ids() {
            let tx = t.obj(x);
            let m = self.mult[x.0];
            if c.compose(self.unit[tx.0], m) != c.id(tx) {
                return Err(fail("left unit", x));
            }
            if c.compose(t.mor(self.unit[x.0]), m) != c.id(tx) {
                return Err(fail("right unit", x));
            }
            if c.compose(t.mor(m), m) != c.compose(self.mult[tx.0], m) {
                return Err(fail("associativity", x));
            }
        }
        Ok(())
    }
}

/// Kleisli category, `hom(x, y) = C(x, T y)`, with the identity-on-objects
/// embedding `f ↦ f·unit`.
pub fn kleisli(m: &MonadW) -> Result<(FinCat, Functor), GeneratorError> {
    m.validate()?;
    let t = &m.endofunctor;
    let c = t.source().clone();
    let mut morphisms = Vec::new();
    let mut data: Vec<(ObjId, ObjId, MorId)> = Vec::new();
    let mut index: HashMap<(ObjId, MorId), MorId> = HashMap::new();
    for x in c.object_ids() {
        for y in c.object_ids() {
            for &f in c.hom(x, t.obj(y)) {
                let id = MorId(morphisms.len());
                morphisms.push(Morphism::new(format!("{}@{}", c.label(f), c.object_label(y)), x, y));
                data.push((x, y, f));
                index.insert((y, f), id);
            }
        }
    }
    let identities = c.object_ids().map(|x| index[&(x, m.unit[x.0])]).collect();
    let kl = FinCat::from_fn(
        format!("kleisli({})", c.name()),
        c.object_labels().to_vec(),
        morphisms,
        identities,
        |f, g| {
            let (_, _, fm) = data[f.0];
            let (_, z, gm) = data[g.0];
            index[&(z, c.compose_all(&[fm, t.mor(gm), m.mult[z.0]]))]
        },
    )
    .map_err(|e| GeneratorError::MalformedInput(e.to_string()))?;
    let kl = Arc::new(kl);
    let embed = Functor::new(
        c.clone(),
        kl.clone(),
        c.object_ids().collect(),
        c.morphism_ids()
            .map(|f| index[&(c.dst(f), c.compose(f, m.unit[c.dst(f).0]))])
            .collect(),
    )
    .map_err(|e| GeneratorError::MalformedInput(e.to_string()))?;
    Ok(((*kl).clone(), embed))
}

pub fn is_idempotent(c: &FinCat, e: MorId) -> bool {
    c.src(e) == c.dst(e) && c.compose(e, e) == e
}

/// A splitting `e = π·ι` with `ι·π = id`, lowest object then lowest `π`.
pub fn split_idempotent(c: &FinCat, e: MorId) -> Option<(ObjId, MorId, MorId)> {
    let x = c.src(e);
    c.object_ids().find_map(|y| {
        c.hom(x, y).iter().find_map(|&pi| {
            c.hom(y, x)
                .iter()
                .find(|&&iota| c.compose(pi, iota) == e && c.compose(iota, pi) == c.id(y))
                .map(|&iota| (y, pi, iota))
        })
    })
}

/// First idempotent without a splitting, if any.
pub fn first_unsplit_idempotent(c: &FinCat) -> Option<MorId> {
    c.morphism_ids()
        .filter(|&e| is_idempotent(c, e))
        .find(|&e| split_idempotent(c, e).is_none())
}

/// Objects are idempotents `(x, e)`; `hom((x,e₁), (y,e₂))` holds the `g`
/// with `e₁·g = g = g·e₂`.
pub fn karoubi_envelope(c: &Arc<FinCat>) -> (FinCat, Functor) {
    let idems: Vec<MorId> = c.morphism_ids().filter(|&e| is_idempotent(c, e)).collect();
    let obj_of: HashMap<MorId, ObjId> = idems.iter().enumerate().map(|(i, &e)| (e, ObjId(i))).collect();
    let mut morphisms = Vec::new();
    let mut data = Vec::new();
    let mut index = HashMap::new();
    for (i, &e1) in idems.iter().enumerate() {
        for (j, &e2) in idems.iter().enumerate() {
            for &g in c.hom(c.src(e1), c.src(e2)) {
                if c.compose(e1, g) == g && c.compose(g, e2) == g {
                    index.insert((i, j, g), MorId(morphisms.len()));
                    morphisms.push(Morphism::new(
                        format!("{}:({},{})", c.label(g), c.label(e1), c.label(e2)),
                        ObjId(i),
                        ObjId(j),
                    ));
                    data.push((i, j, g));
                }
            }
        }
    }
    let identities = idems.iter().enumerate().map(|(i, &e)| index[&(i, i, e)]).collect();
    let objects = idems
        .iter()
        .map(|&e| format!("({},{})", c.object_label(c.src(e)), c.label(e)))
        .collect();
    let kar = FinCat::from_fn(format!("karoubi({})", c.name()), objects, morphisms, identities, |f, g| {
        let (i, _, fm) = data[f.0];
        let (_, k, gm) = data[g.0];
        index[&(i, k, c.compose(fm, gm))]
    })
    .expect("Karoubi envelope");
    let kar = Arc::new(kar);
    let embed = Functor::new(
        c.clone(),
        kar.clone(),
        c.object_ids().map(|x| obj_of[&c.id(x)]).collect(),
        c.morphism_ids()
            .map(|f| index[&(obj_of[&c.id(c.src(f))].0, obj_of[&c.id(c.dst(f))].0, f)])
            .collect(),
    )
    .expect("Karoubi embedding");
    ((*kar).clone(), embed)
}

/// A finite Heyting algebra given by its order.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FiniteHeytingAlgebra {
    pub labels: Vec<String>,
    leq: Vec<Vec<bool>>,
    meet: Vec<Vec<usize>>,
    join: Vec<Vec<usize>>,
    imp: Vec<Vec<usize>>,
    top: usize,
    bottom: usize,
}

impl FiniteHeytingAlgebra {
    /// Computes meets, joins and implication from a partial order and checks
    /// residuation `a∧b ≤ c ⟺ a ≤ b⇒c`.
    pub fn from_order(labels: Vec<String>, leq: Vec<Vec<bool>>) -> Result<Self, GeneratorError> {
        let n = labels.len();
        if n == 0 || leq.len() != n || leq.iter().any(|r| r.len() != n) {
            return Err(GeneratorError::MalformedInput("order table has the wrong shape".into()));
        }
        for a in 0..n {
            if !leq[a][a] {
                return Err(GeneratorError::MalformedInput("order is not reflexive".into()));
            }
            for b in 0..n {
                if a != b && leq[a][b] && leq[b][a] {
                    return Err(GeneratorError::MalformedInput("order is not antisymmetric".into()));
                }
                for c in 0..n {
                    if leq[a][b] && leq[b][c] && !leq[a][c] {
                        return Err(GeneratorError::MalformedInput("order is not transitive".into()));
                    }
                }
            }
        }
        let greatest = |pred: &dyn Fn(usize) -> bool| {
            let cands: Vec<usize> = (0..n).filter(|&c| pred(c)).collect();
            cands.iter().copied().find(|&c| cands.iter().all(|&d| leq[d][c]))
        };
        let least = |pred: &dyn Fn(usize) -> bool| {
            let cands: Vec<usize> = (0..n).filter(|&c| pred(c)).collect();
            cands.iter().copied().find(|&c| cands.iter().all(|&d| leq[c][d]))
        };
        let missing = |what: &str| GeneratorError::MalformedInput(format!("missing {what}"));
        let top = greatest(&|_| true).ok_or_else(|| missing("top"))?;
        let bottom = least(&|_| true).ok_or_else(|| missing("bottom"))?;
        let mut meet = vec![vec![0; n]; n];
        let mut join = vec![vec![0; n]; n];
        for a in 0..n {
            for b in 0..n {
                meet[a][b] = greatest(&|c| leq[c][a] && leq[c][b]).ok_or_else(|| missing("meet"))?;
                join[a][b] = least(&|c| leq[a][c] && leq[b][c]).ok_or_else(|| missing("join"))?;
            }
        }
        let mut imp = vec![vec![0; n]; n];
        for a in 0..n {
            for b in 0..n {
                imp[a][b] = greatest(&|c| leq[meet[c][a]][b]).ok_or_else(|| missing("implication"))?;
            }
        }
        let h = FiniteHeytingAlgebra {
            labels,
            leq,
            meet,
            join,
            imp,
            top,
            bottom,
        };
        for a in 0..n {
            for b in 0..n {
                for c in 0..n {
                    if h.leq(h.meet(a, b), c) != h.leq(a, h.imp(b, c)) {
                        return Err(GeneratorError::MalformedInput("residuation fails".into()));
                    }
                }
            }
        }
        Ok(h)
    }

    /// `0 < 1 < … < n-1`
    pub fn chain(n: usize) -> Self {
        let leq = (0..n).map(|a| (0..n).map(|b| a <= b).collect()).collect();
        Self::from_order(labels(n), leq).expect("chains are Heyting")
    }

    /// Subsets of a `k`-element set.
    pub fn boolean(k: usize) -> Self {
        let n = 1usize << k;
        let leq = (0..n).map(|a| (0..n).map(|b| a & !b == 0).collect()).collect();
        Self::from_order(labels(n), leq).expect("Boolean algebras are Heyting")
    }

    pub fn size(&self) -> usize {
        self.labels.len()
    }

    pub fn leq(&self, a: usize, b: usize) -> bool {
        self.leq[a][b]
    }

    pub fn meet(&self, a: usize, b: usize) -> usize {
        self.meet[a][b]
    }

    pub fn join(&self, a: usize, b: usize) -> usize {
        self.join[a][b]
    }

    pub fn imp(&self, a: usize, b: usize) -> usize {
        self.imp[a][b]
    }

    pub fn top(&self) -> usize {
        self.top
    }

    pub fn bottom(&self) -> usize {
        self.bottom
    }

    pub fn join_all(&self, items: impl IntoIterator<Item = usize>) -> usize {
        items.into_iter().fold(self.bottom, |acc, x| self.join(acc, x))
    }

    /// The order as a thin category.
    pub fn as_category(&self) -> FinCat {
        thin_category("heyting", self.labels.clone(), &self.leq, "<=")
    }
}

pub const HVALUED_MAX_CARRIER: usize = 2;

/// H-valued sets on carriers `{0..n}` for `n ≤ max_carrier`, with
/// functional relations as morphisms.
pub fn hvalued_sets(h: &FiniteHeytingAlgebra, max_carrier: usize) -> Result<FinCat, GeneratorError> {
    if max_carrier > HVALUED_MAX_CARRIER {
        return Err(GeneratorError::SizeBoundExceeded(format!(
            "H-valued sets are capped at carriers of size {HVALUED_MAX_CARRIER}"
        )));
    }
    let k = h.size();
    // objects: (n, eq) with eq an n×n table
    let mut objects: Vec<(usize, Vec<usize>)> = Vec::new();
    for n in 0..=max_carrier {
        for code in 0..k.pow((n * n) as u32) {
            let mut eq = vec![0; n * n];
            let mut rest = code;
            for v in eq.iter_mut() {
                *v = rest % k;
                rest /= k;
            }
            let symmetric = (0..n).all(|x| (0..n).all(|y| eq[x * n + y] == eq[y * n + x]));
            let transitive = (0..n).all(|x| {
                (0..n).all(|y| (0..n).all(|z| h.leq(h.meet(eq[x * n + y], eq[y * n + z]), eq[x * n + z])))
            });
            if symmetric && transitive {
                objects.push((n, eq));
            }
        }
    }
    let mut morphisms = Vec::new();
    let mut rels: Vec<Vec<usize>> = Vec::new();
    let mut index = HashMap::new();
    let mut identities = vec![MorId(0); objects.len()];
    for (i, (nx, eqx)) in objects.iter().enumerate() {
        for (j, (ny, eqy)) in objects.iter().enumerate() {
            let (nx, ny) = (*nx, *ny);
            for code in 0..k.pow((nx * ny) as u32) {
                let mut rel = vec![0; nx * ny];
                let mut rest = code;
                for v in rel.iter_mut() {
                    *v = rest % k;
                    rest /= k;
                }
                if !functional_relation(h, nx, eqx, ny, eqy, &rel) {
                    continue;
                }
                let id = MorId(morphisms.len());
                if i == j && rel == *eqx {
                    identities[i] = id;
                }
                morphisms.push(Morphism::new(format!("R{}", morphisms.len()), ObjId(i), ObjId(j)));
                index.insert((i, j, rel.clone()), id);
                rels.push(rel);
            }
        }
    }
    let names = objects
        .iter()
        .map(|(n, eq)| {
            let vals: Vec<&str> = eq.iter().map(|&v| h.labels[v].as_str()).collect();
            format!("{n}:[{}]", vals.join(","))
        })
        .collect();
    let mut missing = None;
    let cat = FinCat::from_fn("hvalued-sets", names, morphisms.clone(), identities, |f, g| {
        let (x, y, z) = (morphisms[f.0].src.0, morphisms[f.0].dst.0, morphisms[g.0].dst.0);
        let (nx, ny, nz) = (objects[x].0, objects[y].0, objects[z].0);
        let mut comp = vec![0; nx * nz];
        for a in 0..nx {
            for c in 0..nz {
                comp[a * nz + c] =
                    h.join_all((0..ny).map(|b| h.meet(rels[f.0][a * ny + b], rels[g.0][b * nz + c])));
            }
        }
        match index.get(&(x, z, comp.clone())) {
            Some(&m) => m,
            None => {
                missing.get_or_insert_with(|| format!("{comp:?}"));
                f
            }
        }
    });
    if let Some(tuple) = missing {
        return Err(GeneratorError::AxiomViolation {
            axiom: "composite is functional",
            tuple,
        });
    }
    cat.map_err(|e| GeneratorError::AxiomViolation {
        axiom: "category laws",
        tuple: e.to_string(),
    })
}

fn functional_relation(
    h: &FiniteHeytingAlgebra,
    nx: usize,
    eqx: &[usize],
    ny: usize,
    eqy: &[usize],
    rel: &[usize],
) -> bool {
    let r = |x: usize, y: usize| rel[x * ny + y];
    let ex = |a: usize, b: usize| eqx[a * nx + b];
    let ey = |a: usize, b: usize| eqy[a * ny + b];
    for x in 0..nx {
        for y in 0..ny {
            // strict
            if !h.leq(r(x, y), h.meet(ex(x, x), ey(y, y))) {
                return false;
            }
            for x2 in 0..nx {
                for y2 in 0..ny {
                    // relational
                    if !h.leq(h.meet(h.meet(ex(x2, x), r(x, y)), ey(y, y2)), r(x2, y2)) {
                        return false;
                    }
                }
            }
            for y2 in 0..ny {
                // single-valued
                if !h.leq(h.meet(r(x, y), r(x, y2)), ey(y, y2)) {
                    return false;
                }
            }
        }
        // total
        if !h.leq(ex(x, x), h.join_all((0..ny).map(|y| r(x, y)))) {
            return false;
        }
    }
    true
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct RandomBounds {
    pub max_objects: usize,
    pub max_hom: usize,
}

impl Default for RandomBounds {
    fn default() -> Self {
        RandomBounds {
            max_objects: 5,
            max_hom: 3,
        }
    }
}

/// Seeded random category. Either a random preorder, or a category of
/// functions between small sets generated by random maps and closed under
/// composition (generators that would overflow a hom-set are dropped).
pub fn random_category(seed: u64, bounds: RandomBounds) -> FinCat {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n = rng.gen_range(1..=bounds.max_objects.max(1));
    let c = if rng.gen_bool(0.4) || bounds.max_hom < 2 {
        random_preorder(&mut rng, n)
    } else {
        random_concrete(&mut rng, n, bounds.max_hom)
    };
    c.with_name(format!("random-{seed}"))
}

fn random_preorder(rng: &mut ChaCha8Rng, n: usize) -> FinCat {
    let p = rng.gen_range(0.15..0.6);
    let pairs: Vec<(usize, usize)> = (0..n)
        .flat_map(|i| (0..n).map(move |j| (i, j)))
        .filter(|&(i, j)| i != j)
        .filter(|_| rng.gen_bool(p))
        .collect();
    let rel = closure(n, &pairs, false).expect("in range");
    let objects = (0..n).map(|i| format!("x{i}")).collect();
    thin_category("preorder", objects, &rel, "<=")
}

fn random_concrete(rng: &mut ChaCha8Rng, n: usize, max_hom: usize) -> FinCat {
    let with_point = rng.gen_bool(0.5);
    let mut cards: Vec<usize> = (0..n).map(|_| rng.gen_range(1..=3)).collect();
    if with_point {
        cards[n - 1] = 1;
    }
    // morphisms as (src, dst, map)
    let mut mors: Vec<(usize, usize, Vec<usize>)> = (0..n).map(|x| (x, x, (0..cards[x]).collect())).collect();
    let add_closed = |mors: &mut Vec<(usize, usize, Vec<usize>)>, new: (usize, usize, Vec<usize>)| -> bool {
        let mut trial = mors.clone();
        if trial.contains(&new) {
            return true;
        }
        trial.push(new);
        loop {
            let mut added = false;
            let len = trial.len();
            for i in 0..len {
                for j in 0..len {
                    if trial[i].1 != trial[j].0 {
                        continue;
                    }
                    let map: Vec<usize> = trial[i].2.iter().map(|&v| trial[j].2[v]).collect();
                    let cand = (trial[i].0, trial[j].1, map);
                    if !trial.contains(&cand) {
                        let hom = trial.iter().filter(|m| m.0 == cand.0 && m.1 == cand.1).count();
                        if hom >= max_hom {
                            return false;
                        }
                        trial.push(cand);
                        added = true;
                    }
                }
            }
            if !added {
                break;
            }
        }
        *mors = trial;
        true
    };
    if with_point {
        let t = n - 1;
        for x in 0..n {
            add_closed(&mut mors, (x, t, vec![0; cards[x]]));
        }
    }
    let gens = rng.gen_range(0..=2 * n);
    for _ in 0..gens {
        let (x, y) = (rng.gen_range(0..n), rng.gen_range(0..n));
        let map = (0..cards[x]).map(|_| rng.gen_range(0..cards[y])).collect();
        add_closed(&mut mors, (x, y, map));
    }
    let index: HashMap<(usize, usize, Vec<usize>), usize> =
        mors.iter().cloned().enumerate().map(|(i, m)| (m, i)).collect();
    let morphisms = mors
        .iter()
        .enumerate()
        .map(|(i, (x, y, _))| {
            let label = if i < n { format!("id_x{x}") } else { format!("m{i}") };
            Morphism::new(label, ObjId(*x), ObjId(*y))
        })
        .collect();
    FinCat::from_fn(
        "concrete",
        (0..n).map(|i| format!("x{i}")).collect(),
        morphisms,
        (0..n).map(MorId).collect(),
        |f, g| {
            let (x, _, fm) = &mors[f.0];
            let (_, z, gm) = &mors[g.0];
            let map: Vec<usize> = fm.iter().map(|&v| gm[v]).collect();
            MorId(index[&(*x, *z, map)])
        },
    )
    .expect("functions compose associatively")
}

/// A random base category, an inflation of it and the projection, which is
/// a weak equivalence.
pub fn random_weak_equivalence(seed: u64, bounds: RandomBounds) -> (Arc<FinCat>, Arc<FinCat>, Functor) {
    let base = Arc::new(random_category(seed, bounds));
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x9e37_79b9_7f4a_7c15);
    let mut copies: Vec<usize> = (0..base.object_count()).map(|_| rng.gen_range(1..=2)).collect();
    let pick = rng.gen_range(0..copies.len());
    copies[pick] = 2;
    let (inflated, projection) = inflate(&base, &copies).expect("positive copies");
    (base, inflated, projection)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::completion::{skeletality, skeletize, Fidelity};
    use crate::functor::is_fully_faithful;

    #[test]
    fn antisymmetric_preorder_is_gaunt() {
        let p = preorder_cat(&["0", "1", "2"], &[(0, 1), (1, 2), (0, 2)]).unwrap();
        assert_eq!(skeletality(&p).fidelity, Fidelity::Exact);
        assert!(preorder_cat(&["0", "1", "2"], &[(0, 1), (1, 2)]).is_err());
    }

    #[test]
    fn setoid_completes_to_classes() {
        let s = setoid_groupoid(3, &[(0, 1)]).unwrap();
        assert_eq!(skeletize(&Arc::new(s)).completed.object_count(), 2);
    }

    #[test]
    fn cyclic_group_is_skeletal_not_gaunt() {
        let r = skeletality(&cyclic_group(2));
        assert!(r.is_skeletal && !r.is_gaunt);
    }

    #[test]
    fn finset_fragment_sizes() {
        let f = finset_fragment(2).unwrap();
        // Σ |y|^|x| over x, y ∈ {0, 1, 2}
        assert_eq!(f.category.morphism_count(), 3 + 3 + 5);
        assert_eq!(finset_fragment(3).unwrap().category.morphism_count(), 4 + 6 + 14 + 36);
        assert!(finset_fragment(4).is_err());
    }

    #[test]
    fn identity_monad_kleisli_is_isomorphic() {
        let c = Arc::new(walking_iso());
        let (kl, embed) = kleisli(&MonadW::identity(&c)).unwrap();
        assert_eq!(kl.morphism_count(), c.morphism_count());
        assert!(embed.is_isomorphism());
    }

    #[test]
    fn constant_monad_has_singleton_homs() {
        let fs = finset_fragment(2).unwrap();
        let c = Arc::new(fs.category.clone());
        let one = fs.object_of_card(1).unwrap();
        let t = Functor::new(
            c.clone(),
            c.clone(),
            vec![one; c.object_count()],
            vec![c.id(one); c.morphism_count()],
        )
        .unwrap();
        let unit = c.object_ids().map(|x| c.hom(x, one)[0]).collect();
        let monad = MonadW {
            endofunctor: t,
            unit,
            mult: vec![c.id(one); c.object_count()],
        };
        let (kl, _) = kleisli(&monad).unwrap();
        for x in kl.object_ids() {
            for y in kl.object_ids() {
                assert_eq!(kl.hom(x, y).len(), 1);
            }
        }
    }

    #[test]
    fn broken_monad_is_rejected() {
        let c = Arc::new(finset_fragment(1).unwrap().category);
        let mut m = MonadW::identity(&c);
        let empty_to_one = c.hom(ObjId(0), ObjId(1))[0];
        m.unit[0] = empty_to_one;
        assert!(matches!(m.validate(), Err(GeneratorError::MonadLawViolation { .. })));
    }

    #[test]
    fn karoubi_of_idempotent_monoid_splits() {
        let c = Arc::new(delooping(&["1", "e"], &[vec![0, 1], vec![1, 1]]).unwrap());
        assert!(first_unsplit_idempotent(&c).is_some());
        let (kar, embed) = karoubi_envelope(&c);
        assert_eq!(kar.object_count(), 2);
        assert!(first_unsplit_idempotent(&kar).is_none());
        assert!(is_fully_faithful(&embed).is_some());
    }

    #[test]
    fn karoubi_of_discrete_is_itself() {
        let c = Arc::new(discrete(3));
        let (kar, embed) = karoubi_envelope(&c);
        assert!(kar.same_tables(&c));
        assert!(embed.is_isomorphism());
    }

    #[test]
    fn heyting_residuation_tables() {
        let h = FiniteHeytingAlgebra::chain(3);
        assert_eq!(h.imp(2, 1), 1);
        assert_eq!(h.imp(1, 2), 2);
        assert_eq!(h.imp(0, 0), 2);
        let b = FiniteHeytingAlgebra::boolean(2);
        // complement of {0} is {1}
        assert_eq!(b.imp(1, 0), 2);
        let diamond_minus = vec![
            vec![true, true, true, true, true],
            vec![false, true, false, false, true],
            vec![false, false, true, false, true],
            vec![false, false, false, true, true],
            vec![false, false, false, false, true],
        ];
        // M3 is a lattice but not distributive, hence not Heyting
        assert!(FiniteHeytingAlgebra::from_order(labels(5), diamond_minus).is_err());
    }

    #[test]
    fn hvalued_sets_examples() {
        let two = hvalued_sets(&FiniteHeytingAlgebra::boolean(1), 1).unwrap();
        let sk = skeletize(&Arc::new(two));
        // the empty set and a point
        assert_eq!(sk.completed.object_count(), 2);
        let three = hvalued_sets(&FiniteHeytingAlgebra::chain(3), 1).unwrap();
        assert!(!skeletality(&three).is_skeletal);
        let trivial = FiniteHeytingAlgebra::chain(1);
        let t = hvalued_sets(&trivial, 2).unwrap();
        assert_eq!(skeletize(&Arc::new(t)).completed.object_count(), 1);
        assert!(hvalued_sets(&trivial, 3).is_err());
    }

    #[test]
    fn random_category_is_reproducible() {
        let b = RandomBounds::default();
        for seed in 0..20 {
            let c = random_category(seed, b);
            assert_eq!(c, random_category(seed, b));
            assert!(c.object_count() <= 5);
            for x in c.object_ids() {
                for y in c.object_ids() {
                    assert!(c.hom(x, y).len() <= 3);
                }
            }
        }
    }
}
