//! The `"structure"` block of a category file: chosen witnesses by label.
//!
//! ```json
//! {"terminal": "1",
//!  "binproducts": [{"x1": "a", "x2": "b", "apex": "ab", "pi1": "p", "pi2": "q"}],
//!  "exponentials": [{"base": "a", "target": "b", "obj": "ba", "ev": "ev"}],
//!  "subobject_classifier": {"omega": "2", "tau": "true", "chi": {"m": "chi_m"}},
//!  "pnno": {"N": "n", "z": "zero", "s": "succ"}}
//! ```

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};
use serde_json::Value;
use thiserror::Error;

use crate::classifier::SubobjectClassifierW;
use crate::exponentials::{ChosenExponentials, ExponentialW};
use crate::fincat::{FinCat, Iso, MorId, ObjId};
use crate::lifting::{PreservationCerts, Structures};
use crate::limits::{BinProductW, Chosen, EqualizerW, LimitShape, PreservationCert, PullbackW, TerminalW};
use crate::nno::PNNOW;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RawProduct {
    pub x1: String,
    pub x2: String,
    pub apex: String,
    pub pi1: String,
    pub pi2: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RawEqualizer {
    pub f: String,
    pub g: String,
    pub apex: String,
    pub arrow: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RawPullback {
    pub f: String,
    pub g: String,
    pub apex: String,
    pub p1: String,
    pub p2: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RawExponential {
    pub base: String,
    pub target: String,
    pub obj: String,
    pub ev: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RawClassifier {
    pub omega: String,
    pub tau: String,
    #[serde(default)]
    pub chi: BTreeMap<String, String>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RawPnno {
    #[serde(rename = "N")]
    pub n: String,
    pub z: String,
    pub s: String,
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StructureBlock {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub terminal: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub binproducts: Option<Vec<RawProduct>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub equalizers: Option<Vec<RawEqualizer>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub pullbacks: Option<Vec<RawPullback>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub exponentials: Option<Vec<RawExponential>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub subobject_classifier: Option<RawClassifier>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub pnno: Option<RawPnno>,
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum StructureError {
    #[error("malformed structure block: {0}")]
    Malformed(String),
    #[error("unknown object `{label}` at {pointer}")]
    UnknownObject { label: String, pointer: String },
    #[error("unknown morphism `{label}` at {pointer}")]
    UnknownMorphism { label: String, pointer: String },
}

impl StructureError {
    pub fn pointer(&self) -> &str {
        match self {
            StructureError::Malformed(_) => "/structure",
            StructureError::UnknownObject { pointer, .. } | StructureError::UnknownMorphism { pointer, .. } => pointer,
        }
    }
}

struct Resolver<'a>(&'a FinCat);

impl Resolver<'_> {
    fn obj(&self, label: &str, pointer: String) -> Result<ObjId, StructureError> {
        self.0.find_object(label).ok_or_else(|| StructureError::UnknownObject {
            label: label.to_string(),
            pointer,
        })
    }

    fn mor(&self, label: &str, pointer: String) -> Result<MorId, StructureError> {
        self.0.find_morphism(label).ok_or_else(|| StructureError::UnknownMorphism {
            label: label.to_string(),
            pointer,
        })
    }
}

/// Resolves labels only; call `Structures::check` to validate.
pub fn structures_from_block(c: &FinCat, block: &StructureBlock) -> Result<Structures, StructureError> {
    let r = Resolver(c);
    let mut s = Structures::default();
    if let Some(t) = &block.terminal {
        s.terminal = Some(TerminalW {
            t: r.obj(t, "/structure/terminal".into())?,
        });
    }
    if let Some(list) = &block.binproducts {
        let mut chosen = Chosen::default();
        for (i, p) in list.iter().enumerate() {
            let at = |f: &str| format!("/structure/binproducts/{i}/{f}");
            chosen.insert(BinProductW {
                x1: r.obj(&p.x1, at("x1"))?,
                x2: r.obj(&p.x2, at("x2"))?,
                apex: r.obj(&p.apex, at("apex"))?,
                pi1: r.mor(&p.pi1, at("pi1"))?,
                pi2: r.mor(&p.pi2, at("pi2"))?,
            });
        }
        s.products = Some(chosen);
    }
    if let Some(list) = &block.equalizers {
        let mut chosen = Chosen::default();
        for (i, e) in list.iter().enumerate() {
            let at = |f: &str| format!("/structure/equalizers/{i}/{f}");
            chosen.insert(EqualizerW {
                f: r.mor(&e.f, at("f"))?,
                g: r.mor(&e.g, at("g"))?,
                apex: r.obj(&e.apex, at("apex"))?,
                arrow: r.mor(&e.arrow, at("arrow"))?,
            });
        }
        s.equalizers = Some(chosen);
    }
    if let Some(list) = &block.pullbacks {
        let mut chosen = Chosen::default();
        for (i, p) in list.iter().enumerate() {
            let at = |f: &str| format!("/structure/pullbacks/{i}/{f}");
            chosen.insert(PullbackW {
                f: r.mor(&p.f, at("f"))?,
                g: r.mor(&p.g, at("g"))?,
                apex: r.obj(&p.apex, at("apex"))?,
                p1: r.mor(&p.p1, at("p1"))?,
                p2: r.mor(&p.p2, at("p2"))?,
            });
        }
        s.pullbacks = Some(chosen);
    }
    if let Some(list) = &block.exponentials {
        let mut chosen = ChosenExponentials::default();
        for (i, e) in list.iter().enumerate() {
            let at = |f: &str| format!("/structure/exponentials/{i}/{f}");
            chosen.insert(ExponentialW {
                base: r.obj(&e.base, at("base"))?,
                target: r.obj(&e.target, at("target"))?,
                obj: r.obj(&e.obj, at("obj"))?,
                ev: r.mor(&e.ev, at("ev"))?,
            });
        }
        s.exponentials = Some(chosen);
    }
    if let Some(w) = &block.subobject_classifier {
        let at = |f: &str| format!("/structure/subobject_classifier/{f}");
        let mut chi = BTreeMap::new();
        for (m, x) in &w.chi {
            chi.insert(r.mor(m, at("chi"))?, r.mor(x, at(&format!("chi/{m}")))?);
        }
        s.classifier = Some(SubobjectClassifierW {
            omega: r.obj(&w.omega, at("omega"))?,
            tau: r.mor(&w.tau, at("tau"))?,
            chi,
        });
    }
    if let Some(w) = &block.pnno {
        let at = |f: &str| format!("/structure/pnno/{f}");
        s.pnno = Some(PNNOW {
            n: r.obj(&w.n, at("N"))?,
            z: r.mor(&w.z, at("z"))?,
            s: r.mor(&w.s, at("s"))?,
        });
    }
    Ok(s)
}

pub fn parse_structures(c: &FinCat, value: &Value) -> Result<Structures, StructureError> {
    let block: StructureBlock =
        serde_json::from_value(value.clone()).map_err(|e| StructureError::Malformed(e.to_string()))?;
    structures_from_block(c, &block)
}

pub fn structures_to_block(c: &FinCat, s: &Structures) -> StructureBlock {
    let o = |x: ObjId| c.object_label(x).to_string();
    let m = |f: MorId| c.label(f).to_string();
    StructureBlock {
        terminal: s.terminal.map(|t| o(t.t)),
        binproducts: s.products.as_ref().map(|ch| {
            ch.entries
                .values()
                .map(|p| RawProduct {
                    x1: o(p.x1),
                    x2: o(p.x2),
                    apex: o(p.apex),
                    pi1: m(p.pi1),
                    pi2: m(p.pi2),
                })
                .collect()
        }),
        equalizers: s.equalizers.as_ref().map(|ch| {
            ch.entries
                .values()
                .map(|e| RawEqualizer {
                    f: m(e.f),
                    g: m(e.g),
                    apex: o(e.apex),
                    arrow: m(e.arrow),
                })
                .collect()
        }),
        pullbacks: s.pullbacks.as_ref().map(|ch| {
            ch.entries
                .values()
                .map(|p| RawPullback {
                    f: m(p.f),
                    g: m(p.g),
                    apex: o(p.apex),
                    p1: m(p.p1),
                    p2: m(p.p2),
                })
                .collect()
        }),
        exponentials: s.exponentials.as_ref().map(|ch| {
            ch.entries
                .values()
                .map(|e| RawExponential {
                    base: o(e.base),
                    target: o(e.target),
                    obj: o(e.obj),
                    ev: m(e.ev),
                })
                .collect()
        }),
        subobject_classifier: s.classifier.as_ref().map(|w| RawClassifier {
            omega: o(w.omega),
            tau: m(w.tau),
            chi: w.chi.iter().map(|(&k, &v)| (m(k), m(v))).collect(),
        }),
        pnno: s.pnno.map(|w| RawPnno {
            n: o(w.n),
            z: m(w.z),
            s: m(w.s),
        }),
    }
}

pub fn structures_to_json(c: &FinCat, s: &Structures) -> Value {
    serde_json::to_value(structures_to_block(c, s)).expect("plain data")
}

fn iso_json(c: &FinCat, i: Iso) -> Value {
    serde_json::json!({ "fwd": c.label(i.fwd), "inv": c.label(i.inv) })
}

fn limit_cert_json<S: LimitShape>(cert: &PreservationCert<S>, key: impl Fn(&S::Key) -> Value) -> Value {
    let e = cert.functor.target();
    Value::Array(
        cert.mu
            .iter()
            .map(|(k, &i)| serde_json::json!({ "key": key(k), "comparison": iso_json(e, i) }))
            .collect(),
    )
}

/// Comparison isomorphisms by label, keyed on the source structure.
pub fn certs_to_json(certs: &PreservationCerts) -> Value {
    let mut out = serde_json::Map::new();
    if let Some(cert) = &certs.terminal {
        out.insert("terminal".into(), limit_cert_json(cert, |_| Value::Null));
    }
    if let Some(cert) = &certs.products {
        let c = cert.functor.source().clone();
        out.insert(
            "binproducts".into(),
            limit_cert_json(cert, |&(a, b)| serde_json::json!([c.object_label(a), c.object_label(b)])),
        );
    }
    if let Some(cert) = &certs.equalizers {
        let c = cert.functor.source().clone();
        out.insert(
            "equalizers".into(),
            limit_cert_json(cert, |&(f, g)| serde_json::json!([c.label(f), c.label(g)])),
        );
    }
    if let Some(cert) = &certs.pullbacks {
        let c = cert.functor.source().clone();
        out.insert(
            "pullbacks".into(),
            limit_cert_json(cert, |&(f, g)| serde_json::json!([c.label(f), c.label(g)])),
        );
    }
    if let Some(cert) = &certs.exponentials {
        let (c, e) = (cert.functor.source(), cert.functor.target());
        let list = cert
            .comparison
            .iter()
            .map(|(&(a, b), &i)| {
                serde_json::json!({
                    "key": [c.object_label(a), c.object_label(b)],
                    "comparison": iso_json(e, i),
                })
            })
            .collect();
        out.insert("exponentials".into(), Value::Array(list));
    }
    if let Some(cert) = &certs.classifier {
        let e = cert.functor.target();
        out.insert(
            "subobject_classifier".into(),
            serde_json::json!({ "comparison": iso_json(e, cert.condition2) }),
        );
    }
    if let Some(cert) = &certs.pnno {
        let e = cert.functor.target();
        out.insert("pnno".into(), serde_json::json!({ "comparison": iso_json(e, cert.comparison) }));
    }
    Value::Object(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::generators::{finset_fragment, FiniteHeytingAlgebra};
    use crate::lifting::Kind;

    #[test]
    fn round_trip_on_a_heyting_chain() {
        let c = FiniteHeytingAlgebra::chain(3).as_category();
        let kinds = [Kind::Terminal, Kind::Products, Kind::Equalizers, Kind::Pullbacks, Kind::Exponentials, Kind::Pnno];
        let s = Structures::find(&c, &kinds).unwrap();
        let v = structures_to_json(&c, &s);
        assert_eq!(parse_structures(&c, &v).unwrap(), s);
    }

    #[test]
    fn round_trip_classifier() {
        let fs = finset_fragment(3).unwrap();
        let s = Structures::find(&fs.category, &[Kind::Classifier]).unwrap();
        let v = structures_to_json(&fs.category, &s);
        assert!(v.get("subobject_classifier").is_some());
        assert_eq!(parse_structures(&fs.category, &v).unwrap(), s);
    }

    #[test]
    fn unknown_label_has_pointer() {
        let c = FiniteHeytingAlgebra::chain(2).as_category();
        let v = serde_json::json!({ "pnno": { "N": "nope", "z": "x", "s": "y" } });
        let err = parse_structures(&c, &v).unwrap_err();
        assert_eq!(err.pointer(), "/structure/pnno/N");
        assert!(parse_structures(&c, &serde_json::json!({ "bogus": 1 })).is_err());
    }
}
