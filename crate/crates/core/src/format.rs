//! JSON interchange for categories and functors.
//!
//! ```json
//! {"name": "walking-iso", "objects": ["a", "b"],
//!  "morphisms": [{"id": "f", "src": "a", "dst": "b"}, {"id": "g", "src": "b", "dst": "a"}],
//!  "composition": [["f", "g", "id_a"], ["g", "f", "id_b"]]}
//! ```
//!
//! `[f, g, fg]` states `f·g = fg` in diagrammatic order ("f then g").
//! Identities may be omitted: an existing endomorphism labelled `id_<x>` is
//! taken as the identity of `x`, otherwise one is synthesized. Composites
//! involving an identity may be omitted.

use std::collections::{BTreeMap, HashMap};
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::fincat::{CategoryError, CategoryParts, FinCat, MorId, Morphism, ObjId};
use crate::functor::{Functor, FunctorError};

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RawMorphism {
    pub id: String,
    pub src: String,
    pub dst: String,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RawCategory {
    #[serde(default)]
    pub name: String,
    pub objects: Vec<String>,
    #[serde(default)]
    pub morphisms: Vec<RawMorphism>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub identities: Option<BTreeMap<String, String>>,
    #[serde(default)]
    pub composition: Vec<[String; 3]>,
    /// Optional chosen-structure block, see `crate::structure`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub structure: Option<serde_json::Value>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RawFunctor {
    pub source: String,
    pub target: String,
    pub on_objects: BTreeMap<String, String>,
    #[serde(default)]
    pub on_morphisms: BTreeMap<String, String>,
}

/// Parses and validates the interchange format. Labels are de-duplicated
/// and assigned indices in input order.
pub fn validate_category(raw: &RawCategory) -> Result<FinCat, CategoryError> {
    let mut objects: Vec<String> = Vec::new();
    let mut obj_index: HashMap<&str, usize> = HashMap::new();
    for o in &raw.objects {
        if !obj_index.contains_key(o.as_str()) {
            obj_index.insert(o, objects.len());
            objects.push(o.clone());
        }
    }
    let lookup_obj = |name: &str, pointer: String| {
        obj_index
            .get(name)
            .map(|&i| ObjId(i))
            .ok_or_else(|| CategoryError::DanglingReference {
                name: name.to_string(),
                pointer,
            })
    };

    let mut morphisms: Vec<Morphism> = Vec::new();
    let mut mor_index: HashMap<String, usize> = HashMap::new();
    for (i, m) in raw.morphisms.iter().enumerate() {
        let src = lookup_obj(&m.src, format!("/morphisms/{i}/src"))?;
        let dst = lookup_obj(&m.dst, format!("/morphisms/{i}/dst"))?;
        match mor_index.get(&m.id) {
            Some(&j) if morphisms[j].src == src && morphisms[j].dst == dst => {}
            Some(_) => {
                return Err(CategoryError::DuplicateLabel {
                    label: m.id.clone(),
                    pointer: format!("/morphisms/{i}"),
                })
            }
            None => {
                mor_index.insert(m.id.clone(), morphisms.len());
                morphisms.push(Morphism::new(m.id.clone(), src, dst));
            }
        }
    }

    let mut identities = Vec::with_capacity(objects.len());
    match &raw.identities {
        Some(map) => {
            for (obj, mor) in map {
                lookup_obj(obj, format!("/identities/{obj}"))?;
                if !mor_index.contains_key(mor) {
                    return Err(CategoryError::DanglingReference {
                        name: mor.clone(),
                        pointer: format!("/identities/{obj}"),
                    });
                }
            }
            for (x, obj) in objects.iter().enumerate() {
                let Some(mor) = map.get(obj) else {
                    return Err(CategoryError::MissingIdentity {
                        object: obj.clone(),
                        pointer: "/identities".into(),
                    });
                };
                let f = mor_index[mor];
                if morphisms[f].src.0 != x || morphisms[f].dst.0 != x {
                    return Err(CategoryError::MissingIdentity {
                        object: obj.clone(),
                        pointer: format!("/identities/{obj}"),
                    });
                }
                identities.push(MorId(f));
            }
        }
        None => {
            for (x, obj) in objects.iter().enumerate() {
                let label = format!("id_{obj}");
                match mor_index.get(&label) {
                    Some(&f) if morphisms[f].src.0 == x && morphisms[f].dst.0 == x => {
                        identities.push(MorId(f))
                    }
                    Some(&f) => {
                        return Err(CategoryError::MissingIdentity {
                            object: obj.clone(),
                            pointer: format!("/morphisms/{f}"),
                        })
                    }
                    None => {
                        mor_index.insert(label.clone(), morphisms.len());
                        identities.push(MorId(morphisms.len()));
                        morphisms.push(Morphism::new(label, ObjId(x), ObjId(x)));
                    }
                }
            }
        }
    }

    let m = morphisms.len();
    let mut comp: Vec<Option<MorId>> = vec![None; m * m];
    let mut origin: Vec<Option<usize>> = vec![None; m * m];
    let lookup_mor = |name: &str, pointer: String| {
        mor_index
            .get(name)
            .map(|&i| MorId(i))
            .ok_or_else(|| CategoryError::DanglingReference {
                name: name.to_string(),
                pointer,
            })
    };
    for (i, [f, g, fg]) in raw.composition.iter().enumerate() {
        let fm = lookup_mor(f, format!("/composition/{i}/0"))?;
        let gm = lookup_mor(g, format!("/composition/{i}/1"))?;
        let h = lookup_mor(fg, format!("/composition/{i}/2"))?;
        let (fd, gd, hd) = (&morphisms[fm.0], &morphisms[gm.0], &morphisms[h.0]);
        if fd.dst != gd.src || hd.src != fd.src || hd.dst != gd.dst {
            return Err(CategoryError::IllTypedComposite {
                f: f.clone(),
                g: g.clone(),
                fg: fg.clone(),
                pointer: format!("/composition/{i}"),
            });
        }
        let cell = fm.0 * m + gm.0;
        match comp[cell] {
            Some(prev) if prev != h => {
                return Err(CategoryError::ConflictingComposite {
                    f: f.clone(),
                    g: g.clone(),
                    first: morphisms[prev.0].label.clone(),
                    second: fg.clone(),
                    pointer: format!("/composition/{i}"),
                })
            }
            _ => {
                comp[cell] = Some(h);
                origin[cell] = Some(i);
            }
        }
    }
    for f in 0..m {
        for g in 0..m {
            if morphisms[f].dst != morphisms[g].src {
                continue;
            }
            let expected = if identities[morphisms[g].src.0].0 == f {
                Some(MorId(g))
            } else if identities[morphisms[f].dst.0].0 == g {
                Some(MorId(f))
            } else {
                None
            };
            if let Some(e) = expected {
                let cell = f * m + g;
                match comp[cell] {
                    None => comp[cell] = Some(e),
                    Some(h) if h != e => {
                        return Err(CategoryError::UnitLawViolation {
                            f: morphisms[f].label.clone(),
                            g: morphisms[g].label.clone(),
                            fg: morphisms[h.0].label.clone(),
                            pointer: format!("/composition/{}", origin[cell].unwrap_or(0)),
                        })
                    }
                    Some(_) => {}
                }
            }
        }
    }
    let pointer_for = |f: MorId, g: MorId| match origin[f.0 * m + g.0] {
        Some(i) => format!("/composition/{i}"),
        None => "/composition".to_string(),
    };
    FinCat::from_parts_with(
        CategoryParts {
            name: raw.name.clone(),
            objects,
            morphisms,
            identities,
            comp,
        },
        &pointer_for,
    )
}

pub fn parse_category(json: &str) -> Result<RawCategory, serde_json::Error> {
    serde_json::from_str(json)
}

/// Emits every table entry explicitly except composites with an identity.
pub fn category_to_raw(c: &FinCat) -> RawCategory {
    let objects = c.object_labels().to_vec();
    let morphisms = c
        .morphism_ids()
        .map(|f| RawMorphism {
            id: c.label(f).to_string(),
            src: c.object_label(c.src(f)).to_string(),
            dst: c.object_label(c.dst(f)).to_string(),
        })
        .collect();
    let identities = c
        .object_ids()
        .map(|x| (c.object_label(x).to_string(), c.label(c.id(x)).to_string()))
        .collect();
    let mut composition = Vec::new();
    for f in c.morphism_ids() {
        if c.is_identity(f) {
            continue;
        }
        for g in c.out_of(c.dst(f)) {
            if c.is_identity(g) {
                continue;
            }
            composition.push([
                c.label(f).to_string(),
                c.label(g).to_string(),
                c.label(c.compose(f, g)).to_string(),
            ]);
        }
    }
    RawCategory {
        name: c.name().to_string(),
        objects,
        morphisms,
        identities: Some(identities),
        composition,
        structure: None,
    }
}

/// Resolves a raw functor against already validated endpoints. Images of
/// identities may be omitted.
pub fn validate_functor(
    raw: &RawFunctor,
    source: &Arc<FinCat>,
    target: &Arc<FinCat>,
) -> Result<Functor, FunctorError> {
    let (c, d) = (&**source, &**target);
    let mut obj_map = Vec::with_capacity(c.object_count());
    for x in c.object_ids() {
        let label = c.object_label(x);
        let image = raw.on_objects.get(label).ok_or_else(|| FunctorError::MissingImage {
            name: label.to_string(),
            pointer: "/on_objects".into(),
        })?;
        let y = d.find_object(image).ok_or_else(|| FunctorError::DanglingReference {
            name: image.clone(),
            pointer: format!("/on_objects/{label}"),
        })?;
        obj_map.push(y);
    }
    for key in raw.on_objects.keys() {
        if c.find_object(key).is_none() {
            return Err(FunctorError::DanglingReference {
                name: key.clone(),
                pointer: format!("/on_objects/{key}"),
            });
        }
    }
    let mut mor_map = Vec::with_capacity(c.morphism_count());
    for f in c.morphism_ids() {
        let label = c.label(f);
        let g = match raw.on_morphisms.get(label) {
            Some(image) => d.find_morphism(image).ok_or_else(|| FunctorError::DanglingReference {
                name: image.clone(),
                pointer: format!("/on_morphisms/{label}"),
            })?,
            None if c.is_identity(f) => d.id(obj_map[c.src(f).0]),
            None => {
                return Err(FunctorError::MissingImage {
                    name: label.to_string(),
                    pointer: "/on_morphisms".into(),
                })
            }
        };
        mor_map.push(g);
    }
    for key in raw.on_morphisms.keys() {
        if c.find_morphism(key).is_none() {
            return Err(FunctorError::DanglingReference {
                name: key.clone(),
                pointer: format!("/on_morphisms/{key}"),
            });
        }
    }
    Functor::new(source.clone(), target.clone(), obj_map, mor_map)
}

pub fn functor_to_raw(f: &Functor) -> RawFunctor {
    let (c, d) = (&**f.source(), &**f.target());
    RawFunctor {
        source: c.name().to_string(),
        target: d.name().to_string(),
        on_objects: c
            .object_ids()
            .map(|x| (c.object_label(x).to_string(), d.object_label(f.obj(x)).to_string()))
            .collect(),
        on_morphisms: c
            .morphism_ids()
            .map(|m| (c.label(m).to_string(), d.label(f.mor(m)).to_string()))
            .collect(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use serde_json::json;

    fn raw(v: serde_json::Value) -> RawCategory {
        serde_json::from_value(v).unwrap()
    }

    fn walking_iso_json() -> serde_json::Value {
        json!({
            "name": "walking-iso",
            "objects": ["a", "b"],
            "morphisms": [
                {"id": "id_a", "src": "a", "dst": "a"},
                {"id": "id_b", "src": "b", "dst": "b"},
                {"id": "f", "src": "a", "dst": "b"},
                {"id": "g", "src": "b", "dst": "a"}
            ],
            "composition": [["f", "g", "id_a"], ["g", "f", "id_b"]]
        })
    }

    #[test]
    fn terminal_category_validates() {
        let c = validate_category(&raw(json!({"name": "1", "objects": ["*"]}))).unwrap();
        assert_eq!(c.object_count(), 1);
        assert_eq!(c.morphism_count(), 1);
        assert_eq!(c.label(MorId(0)), "id_*");
    }

    #[test]
    fn walking_iso_validates() {
        let c = validate_category(&raw(walking_iso_json())).unwrap();
        assert_eq!(c.morphism_count(), 4);
        assert_eq!(c.id(ObjId(0)), MorId(0));
    }

    #[test]
    fn redefined_composite_is_ill_typed() {
        let mut v = walking_iso_json();
        v["composition"][0] = json!(["f", "g", "id_b"]);
        let err = validate_category(&raw(v)).unwrap_err();
        assert!(matches!(err, CategoryError::IllTypedComposite { .. }));
        assert_eq!(err.pointer(), "/composition/0");
    }

    #[test]
    fn missing_composite_and_dangling_reference() {
        let mut v = walking_iso_json();
        v["composition"] = json!([["f", "g", "id_a"]]);
        assert!(matches!(
            validate_category(&raw(v)).unwrap_err(),
            CategoryError::MissingComposite { .. }
        ));
        let mut v = walking_iso_json();
        v["morphisms"][2]["dst"] = json!("c");
        let err = validate_category(&raw(v)).unwrap_err();
        assert_eq!(err.pointer(), "/morphisms/2/dst");
    }

    #[test]
    fn explicit_identity_map_must_cover_objects() {
        let mut v = walking_iso_json();
        v["identities"] = json!({"a": "id_a"});
        assert!(matches!(
            validate_category(&raw(v)).unwrap_err(),
            CategoryError::MissingIdentity { .. }
        ));
    }

    #[test]
    fn unit_law_violation_has_pointer() {
        let mut v = walking_iso_json();
        v["composition"]
            .as_array_mut()
            .unwrap()
            .push(json!(["id_a", "f", "f"]));
        assert!(validate_category(&raw(v.clone())).is_ok());
        let obj = json!({
            "objects": ["*"],
            "morphisms": [{"id": "e", "src": "*", "dst": "*"}],
            "composition": [["e", "e", "e"], ["id_*", "e", "id_*"]]
        });
        let err = validate_category(&raw(obj)).unwrap_err();
        assert!(matches!(err, CategoryError::UnitLawViolation { .. }));
        assert_eq!(err.pointer(), "/composition/1");
    }

    #[test]
    fn round_trip_through_json() {
        let c = validate_category(&raw(walking_iso_json())).unwrap();
        let text = serde_json::to_string(&category_to_raw(&c)).unwrap();
        let back = validate_category(&parse_category(&text).unwrap()).unwrap();
        assert_eq!(back, c);
    }
}
