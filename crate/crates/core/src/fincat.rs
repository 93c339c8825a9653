//! Finite categories given by explicit tables.
//!
//! Composition is written in diagrammatic order throughout: `compose(f, g)`
//! is "f then g" and is defined exactly when `dst(f) == src(g)`.

use std::fmt;

use petgraph::unionfind::UnionFind;
use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Index into the object table of a [`FinCat`].
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct ObjId(pub usize);

/// Index into the morphism table of a [`FinCat`].
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct MorId(pub usize);

impl fmt::Display for ObjId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "o{}", self.0)
    }
}

impl fmt::Display for MorId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "m{}", self.0)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Morphism {
    pub label: String,
    pub src: ObjId,
    pub dst: ObjId,
}

impl Morphism {
    pub fn new(label: impl Into<String>, src: ObjId, dst: ObjId) -> Self {
        Self {
            label: label.into(),
            src,
            dst,
        }
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum CategoryError {
    #[error("object `{object}` has no identity ({pointer})")]
    MissingIdentity { object: String, pointer: String },
    #[error("dangling reference `{name}` ({pointer})")]
    DanglingReference { name: String, pointer: String },
    #[error("label `{label}` is declared twice with different data ({pointer})")]
    DuplicateLabel { label: String, pointer: String },
    #[error("composite {f}·{g} = {fg} is ill-typed ({pointer})")]
    IllTypedComposite {
        f: String,
        g: String,
        fg: String,
        pointer: String,
    },
    #[error("composite {f}·{g} is missing ({pointer})")]
    MissingComposite { f: String, g: String, pointer: String },
    #[error("composite {f}·{g} is given twice: {first} and {second} ({pointer})")]
    ConflictingComposite {
        f: String,
        g: String,
        first: String,
        second: String,
        pointer: String,
    },
    #[error("unit law fails: {f}·{g} = {fg} ({pointer})")]
    UnitLawViolation {
        f: String,
        g: String,
        fg: String,
        pointer: String,
    },
    #[error("associativity fails on ({f}, {g}, {h}) ({pointer})")]
    AssociativityViolation {
        f: String,
        g: String,
        h: String,
        pointer: String,
    },
}

impl CategoryError {
    pub fn pointer(&self) -> &str {
        match self {
            CategoryError::MissingIdentity { pointer, .. }
            | CategoryError::DanglingReference { pointer, .. }
            | CategoryError::DuplicateLabel { pointer, .. }
            | CategoryError::IllTypedComposite { pointer, .. }
            | CategoryError::MissingComposite { pointer, .. }
            | CategoryError::ConflictingComposite { pointer, .. }
            | CategoryError::UnitLawViolation { pointer, .. }
            | CategoryError::AssociativityViolation { pointer, .. } => pointer,
        }
    }
}

/// Unchecked tables, the input of [`FinCat::from_parts`].
#[derive(Clone, Debug, Default)]
pub struct CategoryParts {
    pub name: String,
    pub objects: Vec<String>,
    pub morphisms: Vec<Morphism>,
    pub identities: Vec<MorId>,
    /// Dense `m * m` table, `comp[f * m + g]`.
    pub comp: Vec<Option<MorId>>,
}

/// A validated finite category.
///
/// Immutable after construction. Hom-sets are kept as index lists per
/// `(src, dst)` pair next to a dense composition table.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FinCat {
    name: String,
    objects: Vec<String>,
    morphisms: Vec<Morphism>,
    identities: Vec<MorId>,
    comp: Vec<Option<MorId>>,
    homs: Vec<Vec<MorId>>,
    hom_pos: Vec<usize>,
}

impl FinCat {
    /// Validates raw tables: typing, totality on composable pairs, unit laws
    /// and associativity, all exhaustively.
    pub fn from_parts(parts: CategoryParts) -> Result<FinCat, CategoryError> {
        Self::from_parts_with(parts, &|_, _| "/composition".to_string())
    }

    /// Builds a category from a composition function, called once per
    /// composable pair.
    pub fn from_fn(
        name: impl Into<String>,
        objects: Vec<String>,
        morphisms: Vec<Morphism>,
        identities: Vec<MorId>,
        mut comp: impl FnMut(MorId, MorId) -> MorId,
    ) -> Result<FinCat, CategoryError> {
        let m = morphisms.len();
        let mut table = vec![None; m * m];
        for f in 0..m {
            for g in 0..m {
                if morphisms[f].dst == morphisms[g].src {
                    table[f * m + g] = Some(comp(MorId(f), MorId(g)));
                }
            }
        }
        Self::from_parts(CategoryParts {
            name: name.into(),
            objects,
            morphisms,
            identities,
            comp: table,
        })
    }

    pub(crate) fn from_parts_with(
        parts: CategoryParts,
        pointer_for: &dyn Fn(MorId, MorId) -> String,
    ) -> Result<FinCat, CategoryError> {
        let CategoryParts {
            name,
            objects,
            morphisms,
            identities,
            comp,
        } = parts;
        let n = objects.len();
        let m = morphisms.len();
        let mlabel = |f: MorId| {
            morphisms
                .get(f.0)
                .map(|x| x.label.clone())
                .unwrap_or_else(|| f.to_string())
        };

        for (i, mor) in morphisms.iter().enumerate() {
            if mor.src.0 >= n {
                return Err(CategoryError::DanglingReference {
                    name: mor.src.to_string(),
                    pointer: format!("/morphisms/{i}/src"),
                });
            }
            if mor.dst.0 >= n {
                return Err(CategoryError::DanglingReference {
                    name: mor.dst.to_string(),
                    pointer: format!("/morphisms/{i}/dst"),
                });
            }
        }
        if identities.len() != n {
            let missing = identities.len().min(n.saturating_sub(1));
            return Err(CategoryError::MissingIdentity {
                object: objects.get(missing).cloned().unwrap_or_default(),
                pointer: "/identities".into(),
            });
        }
        for (x, &id) in identities.iter().enumerate() {
            let ok = id.0 < m && morphisms[id.0].src.0 == x && morphisms[id.0].dst.0 == x;
            if !ok {
                return Err(CategoryError::MissingIdentity {
                    object: objects[x].clone(),
                    pointer: format!("/identities/{}", objects[x]),
                });
            }
        }
        if comp.len() != m * m {
            return Err(CategoryError::MissingComposite {
                f: String::new(),
                g: String::new(),
                pointer: "/composition".into(),
            });
        }
        for f in 0..m {
            for g in 0..m {
                let (fm, gm) = (&morphisms[f], &morphisms[g]);
                let cell = comp[f * m + g];
                let pointer = || pointer_for(MorId(f), MorId(g));
                match cell {
                    None if fm.dst == gm.src => {
                        return Err(CategoryError::MissingComposite {
                            f: fm.label.clone(),
                            g: gm.label.clone(),
                            pointer: pointer(),
                        })
                    }
                    None => {}
                    Some(h) => {
                        let typed = fm.dst == gm.src
                            && h.0 < m
                            && morphisms[h.0].src == fm.src
                            && morphisms[h.0].dst == gm.dst;
                        if !typed {
                            return Err(CategoryError::IllTypedComposite {
                                f: fm.label.clone(),
                                g: gm.label.clone(),
                                fg: mlabel(h),
                                pointer: pointer(),
                            });
                        }
                    }
                }
            }
        }
        for f in 0..m {
            let ids = identities[morphisms[f].src.0];
            let idd = identities[morphisms[f].dst.0];
            let left = comp[ids.0 * m + f].expect("typed above");
            if left.0 != f {
                return Err(CategoryError::UnitLawViolation {
                    f: mlabel(ids),
                    g: mlabel(MorId(f)),
                    fg: mlabel(left),
                    pointer: pointer_for(ids, MorId(f)),
                });
            }
            let right = comp[f * m + idd.0].expect("typed above");
            if right.0 != f {
                return Err(CategoryError::UnitLawViolation {
                    f: mlabel(MorId(f)),
                    g: mlabel(idd),
                    fg: mlabel(right),
                    pointer: pointer_for(MorId(f), idd),
                });
            }
        }

        let mut homs = vec![Vec::new(); n * n];
        let mut hom_pos = vec![0; m];
        for (i, mor) in morphisms.iter().enumerate() {
            let cell = &mut homs[mor.src.0 * n + mor.dst.0];
            hom_pos[i] = cell.len();
            cell.push(MorId(i));
        }

        let c = FinCat {
            name,
            objects,
            morphisms,
            identities,
            comp,
            homs,
            hom_pos,
        };
        // (f·g)·h = f·(g·h), over composable triples only.
        for f in c.morphism_ids() {
            for g in c.out_of(c.dst(f)) {
                let fg = c.compose(f, g);
                for h in c.out_of(c.dst(g)) {
                    if c.compose(fg, h) != c.compose(f, c.compose(g, h)) {
                        return Err(CategoryError::AssociativityViolation {
                            f: c.label(f).to_string(),
                            g: c.label(g).to_string(),
                            h: c.label(h).to_string(),
                            pointer: pointer_for(f, g),
                        });
                    }
                }
            }
        }
        Ok(c)
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn with_name(mut self, name: impl Into<String>) -> Self {
        self.name = name.into();
        self
    }

    pub fn object_count(&self) -> usize {
        self.objects.len()
    }

    pub fn morphism_count(&self) -> usize {
        self.morphisms.len()
    }

    pub fn object_ids(&self) -> impl Iterator<Item = ObjId> + Clone {
        (0..self.objects.len()).map(ObjId)
    }

    pub fn morphism_ids(&self) -> impl Iterator<Item = MorId> + Clone {
        (0..self.morphisms.len()).map(MorId)
    }

    pub fn object_label(&self, x: ObjId) -> &str {
        &self.objects[x.0]
    }

    pub fn object_labels(&self) -> &[String] {
        &self.objects
    }

    pub fn morphism(&self, f: MorId) -> &Morphism {
        &self.morphisms[f.0]
    }

    pub fn label(&self, f: MorId) -> &str {
        &self.morphisms[f.0].label
    }

    pub fn src(&self, f: MorId) -> ObjId {
        self.morphisms[f.0].src
    }

    pub fn dst(&self, f: MorId) -> ObjId {
        self.morphisms[f.0].dst
    }

    pub fn id(&self, x: ObjId) -> MorId {
        self.identities[x.0]
    }

    pub fn is_identity(&self, f: MorId) -> bool {
        self.src(f) == self.dst(f) && self.id(self.src(f)) == f
    }

    /// `f·g`, "f then g". Panics when the pair is not composable.
    pub fn compose(&self, f: MorId, g: MorId) -> MorId {
        self.try_compose(f, g)
            .unwrap_or_else(|| panic!("{} and {} are not composable", self.label(f), self.label(g)))
    }

    pub fn try_compose(&self, f: MorId, g: MorId) -> Option<MorId> {
        self.comp[f.0 * self.morphisms.len() + g.0]
    }

    /// Left-to-right composite of a non-empty path.
    pub fn compose_all(&self, path: &[MorId]) -> MorId {
        let (first, rest) = path.split_first().expect("empty path");
        rest.iter().fold(*first, |acc, &g| self.compose(acc, g))
    }

    pub fn hom(&self, x: ObjId, y: ObjId) -> &[MorId] {
        &self.homs[x.0 * self.objects.len() + y.0]
    }

    /// Position of `f` inside `hom(src f, dst f)`.
    pub fn hom_position(&self, f: MorId) -> usize {
        self.hom_pos[f.0]
    }

    /// Morphisms with source `x`, in index order.
    pub fn out_of(&self, x: ObjId) -> impl Iterator<Item = MorId> + '_ {
        self.object_ids().flat_map(move |y| self.hom(x, y).iter().copied())
    }

    pub fn find_object(&self, label: &str) -> Option<ObjId> {
        self.objects.iter().position(|o| o == label).map(ObjId)
    }

    pub fn find_morphism(&self, label: &str) -> Option<MorId> {
        self.morphisms.iter().position(|m| m.label == label).map(MorId)
    }

    /// Table equality ignoring the name and all labels.
    pub fn same_tables(&self, other: &FinCat) -> bool {
        self.objects.len() == other.objects.len()
            && self.identities == other.identities
            && self.comp == other.comp
            && self
                .morphisms
                .iter()
                .zip(&other.morphisms)
                .all(|(a, b)| a.src == b.src && a.dst == b.dst)
            && self.morphisms.len() == other.morphisms.len()
    }

    pub fn parts(&self) -> CategoryParts {
        CategoryParts {
            name: self.name.clone(),
            objects: self.objects.clone(),
            morphisms: self.morphisms.clone(),
            identities: self.identities.clone(),
            comp: self.comp.clone(),
        }
    }
}

/// A two-sided isomorphism `fwd: x → y` with inverse `inv: y → x`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Iso {
    pub fwd: MorId,
    pub inv: MorId,
}

impl Iso {
    pub fn identity(c: &FinCat, x: ObjId) -> Iso {
        let id = c.id(x);
        Iso { fwd: id, inv: id }
    }

    pub fn inverse(self) -> Iso {
        Iso {
            fwd: self.inv,
            inv: self.fwd,
        }
    }

    /// `self` then `other`.
    pub fn then(self, c: &FinCat, other: Iso) -> Iso {
        Iso {
            fwd: c.compose(self.fwd, other.fwd),
            inv: c.compose(other.inv, self.inv),
        }
    }

    pub fn src(self, c: &FinCat) -> ObjId {
        c.src(self.fwd)
    }

    pub fn dst(self, c: &FinCat) -> ObjId {
        c.dst(self.fwd)
    }

    pub fn is_valid(self, c: &FinCat) -> bool {
        let (x, y) = (c.src(self.fwd), c.dst(self.fwd));
        c.src(self.inv) == y
            && c.dst(self.inv) == x
            && c.compose(self.fwd, self.inv) == c.id(x)
            && c.compose(self.inv, self.fwd) == c.id(y)
    }
}

/// The two-sided inverse of `f`, found by scanning the reverse hom-set.
pub fn find_iso(c: &FinCat, f: MorId) -> Option<Iso> {
    let (x, y) = (c.src(f), c.dst(f));
    c.hom(y, x)
        .iter()
        .copied()
        .find(|&g| c.compose(f, g) == c.id(x) && c.compose(g, f) == c.id(y))
        .map(|g| Iso { fwd: f, inv: g })
}

/// All isomorphisms `x → y`, ordered by forward morphism.
pub fn isos_between(c: &FinCat, x: ObjId, y: ObjId) -> Vec<Iso> {
    c.hom(x, y).iter().filter_map(|&f| find_iso(c, f)).collect()
}

/// The identity when `x == y`, otherwise the iso with the lowest forward index.
pub fn canonical_iso(c: &FinCat, x: ObjId, y: ObjId) -> Option<Iso> {
    if x == y {
        return Some(Iso::identity(c, x));
    }
    c.hom(x, y).iter().find_map(|&f| find_iso(c, f))
}

pub fn is_iso(c: &FinCat, f: MorId) -> bool {
    find_iso(c, f).is_some()
}

/// Partition of the objects into isomorphism classes.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct IsoClasses {
    /// Class index of every object.
    pub class_of: Vec<usize>,
    /// Classes ordered by their lowest member; members ascending.
    pub classes: Vec<Vec<ObjId>>,
}

impl IsoClasses {
    pub fn representative(&self, x: ObjId) -> ObjId {
        self.classes[self.class_of[x.0]][0]
    }

    pub fn len(&self) -> usize {
        self.classes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.classes.is_empty()
    }
}

pub fn iso_classes(c: &FinCat) -> IsoClasses {
    let n = c.object_count();
    let mut uf = UnionFind::<usize>::new(n);
    for f in c.morphism_ids() {
        let (x, y) = (c.src(f), c.dst(f));
        if x != y && find_iso(c, f).is_some() {
            uf.union(x.0, y.0);
        }
    }
    let mut class_of = vec![usize::MAX; n];
    let mut classes: Vec<Vec<ObjId>> = Vec::new();
    let mut root_class = std::collections::HashMap::new();
    for x in 0..n {
        let root = uf.find(x);
        let idx = *root_class.entry(root).or_insert_with(|| {
            classes.push(Vec::new());
            classes.len() - 1
        });
        class_of[x] = idx;
        classes[idx].push(ObjId(x));
    }
    IsoClasses { class_of, classes }
}

/// The full subcategory on `objects` (kept in the given order); morphisms
/// keep their relative index order. Returns the category and, for every
/// new morphism, its index in `c`.
pub fn full_subcategory(c: &FinCat, objects: &[ObjId], name: impl Into<String>) -> (FinCat, Vec<MorId>) {
    let mut new_obj = vec![None; c.object_count()];
    for (i, &x) in objects.iter().enumerate() {
        new_obj[x.0] = Some(ObjId(i));
    }
    let kept: Vec<MorId> = c
        .morphism_ids()
        .filter(|&f| new_obj[c.src(f).0].is_some() && new_obj[c.dst(f).0].is_some())
        .collect();
    let mut new_mor = vec![usize::MAX; c.morphism_count()];
    for (i, &f) in kept.iter().enumerate() {
        new_mor[f.0] = i;
    }
    let morphisms = kept
        .iter()
        .map(|&f| {
            Morphism::new(
                c.label(f),
                new_obj[c.src(f).0].unwrap(),
                new_obj[c.dst(f).0].unwrap(),
            )
        })
        .collect();
    let identities = objects.iter().map(|&x| MorId(new_mor[c.id(x).0])).collect();
    let labels = objects.iter().map(|&x| c.object_label(x).to_string()).collect();
    let sub = FinCat::from_fn(name, labels, morphisms, identities, |f, g| {
        MorId(new_mor[c.compose(kept[f.0], kept[g.0]).0])
    })
    .expect("full subcategory of a valid category is valid");
    (sub, kept)
}

/// Source and target swapped, composition reversed. Object and morphism
/// indices are unchanged.
pub fn opposite(c: &FinCat) -> FinCat {
    let name = match c.name.strip_suffix("^op") {
        Some(base) => base.to_string(),
        None => format!("{}^op", c.name),
    };
    let morphisms = c
        .morphisms
        .iter()
        .map(|m| Morphism::new(m.label.clone(), m.dst, m.src))
        .collect();
    FinCat::from_fn(name, c.objects.clone(), morphisms, c.identities.clone(), |f, g| {
        c.compose(g, f)
    })
    .expect("opposite of a valid category is valid")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::generators::{delooping, discrete, preorder_cat, terminal_cat, walking_iso};

    #[test]
    fn walking_iso_has_inverse_pair() {
        let c = walking_iso();
        let f = c.find_morphism("f").unwrap();
        let g = c.find_morphism("g").unwrap();
        assert_eq!(find_iso(&c, f), Some(Iso { fwd: f, inv: g }));
        let a = c.find_object("a").unwrap();
        assert_eq!(find_iso(&c, c.id(a)), Some(Iso::identity(&c, a)));
    }

    #[test]
    fn idempotent_has_no_inverse() {
        // {1, e} with e·e = e
        let c = delooping(&["1", "e"], &[vec![0, 1], vec![1, 1]]).unwrap();
        let e = c.find_morphism("e").unwrap();
        assert_eq!(find_iso(&c, e), None);
    }

    #[test]
    fn iso_class_examples() {
        let d = discrete(3);
        assert_eq!(iso_classes(&d).len(), 3);
        let w = walking_iso();
        assert_eq!(iso_classes(&w).classes, vec![vec![ObjId(0), ObjId(1)]]);
        // p ≤ q, q ≤ p, r
        let p = preorder_cat(&["p", "q", "r"], &[(0, 1), (1, 0)]).unwrap();
        assert_eq!(
            iso_classes(&p).classes,
            vec![vec![ObjId(0), ObjId(1)], vec![ObjId(2)]]
        );
    }

    #[test]
    fn opposite_is_involutive() {
        for c in [terminal_cat(), walking_iso(), preorder_cat(&["0", "1"], &[(0, 1)]).unwrap()] {
            let oo = opposite(&opposite(&c));
            assert!(oo.same_tables(&c));
            assert_eq!(oo.name(), c.name());
        }
        assert!(opposite(&terminal_cat()).same_tables(&terminal_cat()));
    }

    #[test]
    fn opposite_of_order_reverses_it() {
        let le = preorder_cat(&["0", "1", "2"], &[(0, 1), (1, 2), (0, 2)]).unwrap();
        let ge = preorder_cat(&["0", "1", "2"], &[(1, 0), (2, 1), (2, 0)]).unwrap();
        let op = opposite(&le);
        for x in op.object_ids() {
            for y in op.object_ids() {
                assert_eq!(op.hom(x, y).len(), ge.hom(x, y).len());
            }
        }
    }

    #[test]
    fn unit_law_violation_is_reported() {
        let mut parts = delooping(&["1", "e"], &[vec![0, 1], vec![1, 1]]).unwrap().parts();
        // 1·e := 1
        parts.comp[1] = Some(MorId(0));
        assert!(matches!(
            FinCat::from_parts(parts),
            Err(CategoryError::UnitLawViolation { .. })
        ));
    }

    #[test]
    fn ill_typed_composite_is_reported() {
        let mut parts = walking_iso().parts();
        let m = parts.morphisms.len();
        let (ida, f) = (0, 2);
        parts.comp[ida * m + ida] = Some(MorId(f));
        assert!(matches!(
            FinCat::from_parts(parts),
            Err(CategoryError::IllTypedComposite { .. })
        ));
    }

    #[test]
    fn associativity_violation_is_reported() {
        // Monoid-like table on one object that is unital but not associative:
        // elements 1, a, b with a·a = b, a·b = a, b·a = b, b·b = a.
        let objects = vec!["*".to_string()];
        let morphisms = ["1", "a", "b"]
            .iter()
            .map(|l| Morphism::new(*l, ObjId(0), ObjId(0)))
            .collect();
        let table = [[0, 1, 2], [1, 2, 1], [2, 2, 1]];
        let err = FinCat::from_fn("bad", objects, morphisms, vec![MorId(0)], |f, g| {
            MorId(table[f.0][g.0])
        })
        .unwrap_err();
        assert!(matches!(err, CategoryError::AssociativityViolation { .. }));
    }
}
