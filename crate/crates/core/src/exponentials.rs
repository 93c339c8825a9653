//! Exponential objects relative to chosen binary products.
//!
//! `expo x y` is the object of maps from `x` to `y`: the exponential with
//! base `x` and target `y`, evaluated by `ev: expo x y × x → y`.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::fincat::{find_iso, FinCat, Iso, MorId, ObjId};
use crate::functor::{Functor, WeakEquivalenceCert};
use crate::limits::{pairing, ChosenBinProducts, LiftInput, LimitError, ProductPreservationCert};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ExponentialError {
    #[error(transparent)]
    Limit(#[from] LimitError),
    #[error("no exponential with base `{base}` and target `{target}`")]
    Missing { base: String, target: String },
    #[error("internal: transferred exponential at ({base}, {target}) is not universal")]
    TransferFails { base: String, target: String },
    #[error("comparison at ({base}, {target}) is not invertible")]
    NotPreserved { base: String, target: String },
    #[error("internal: constructed and direct exponential comparisons differ at ({base}, {target})")]
    LiftDisagrees { base: String, target: String },
}

impl ExponentialError {
    pub fn is_internal(&self) -> bool {
        match self {
            ExponentialError::Limit(e) => e.is_internal(),
            ExponentialError::TransferFails { .. } | ExponentialError::LiftDisagrees { .. } => true,
            _ => false,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ExponentialW {
    pub base: ObjId,
    pub target: ObjId,
    pub obj: ObjId,
    pub ev: MorId,
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct ChosenExponentials {
    pub entries: BTreeMap<(ObjId, ObjId), ExponentialW>,
}

impl ChosenExponentials {
    pub fn get(&self, base: ObjId, target: ObjId) -> Option<&ExponentialW> {
        self.entries.get(&(base, target))
    }

    pub fn insert(&mut self, w: ExponentialW) {
        self.entries.insert((w.base, w.target), w);
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn first_invalid(&self, c: &FinCat, prods: &ChosenBinProducts) -> Option<(ObjId, ObjId)> {
        self.entries
            .iter()
            .find(|(&k, w)| k != (w.base, w.target) || !is_exponential(c, prods, w))
            .map(|(k, _)| *k)
    }
}

/// `lam × id_x: z × x → e × x` through the chosen products.
fn times_id(c: &FinCat, prods: &ChosenBinProducts, lam: MorId, x: ObjId) -> Option<MorId> {
    let (z, e) = (c.src(lam), c.dst(lam));
    let from = prods.get((z, x))?;
    let to = prods.get((e, x))?;
    pairing(c, to, c.compose(from.pi1, lam), from.pi2).ok()
}

/// The unique `lam: z → e` with `(lam × id)·ev = f`, for `f: z × x → y`.
pub fn curry(c: &FinCat, prods: &ChosenBinProducts, w: &ExponentialW, z: ObjId, f: MorId) -> Option<MorId> {
    let mut found = c
        .hom(z, w.obj)
        .iter()
        .copied()
        .filter(|&lam| times_id(c, prods, lam, w.base).map(|m| c.compose(m, w.ev)) == Some(f));
    let lam = found.next()?;
    found.next().is_none().then_some(lam)
}

/// For every `z`, `lam ↦ (lam × id)·ev` is a bijection
/// `hom(z, e) → hom(z × x, y)`. Missing products make the check fail.
pub fn is_exponential(c: &FinCat, prods: &ChosenBinProducts, w: &ExponentialW) -> bool {
    let in_range = [w.base, w.target, w.obj].iter().all(|o| o.0 < c.object_count()) && w.ev.0 < c.morphism_count();
    if !in_range {
        return false;
    }
    let Some(p) = prods.get((w.obj, w.base)) else {
        return false;
    };
    if c.src(w.ev) != p.apex || c.dst(w.ev) != w.target {
        return false;
    }
    c.object_ids().all(|z| {
        let Some(pz) = prods.get((z, w.base)) else {
            return false;
        };
        let mut images = Vec::new();
        for &lam in c.hom(z, w.obj) {
            match times_id(c, prods, lam, w.base) {
                Some(m) => images.push(c.compose(m, w.ev)),
                None => return false,
            }
        }
        images.sort();
        images.dedup();
        images.len() == c.hom(z, w.obj).len() && images.len() == c.hom(pz.apex, w.target).len()
    })
}

pub fn find_exponential(c: &FinCat, prods: &ChosenBinProducts, base: ObjId, target: ObjId) -> Option<ExponentialW> {
    c.object_ids().find_map(|obj| {
        let p = prods.get((obj, base))?;
        c.hom(p.apex, target)
            .iter()
            .map(|&ev| ExponentialW { base, target, obj, ev })
            .find(|w| is_exponential(c, prods, w))
    })
}

/// All pairs, or the first pair without an exponential.
pub fn find_exponentials(c: &FinCat, prods: &ChosenBinProducts) -> Result<ChosenExponentials, (ObjId, ObjId)> {
    let mut out = ChosenExponentials::default();
    for x in c.object_ids() {
        for y in c.object_ids() {
            out.insert(find_exponential(c, prods, x, y).ok_or((x, y))?);
        }
    }
    Ok(out)
}

pub fn find_exponentials_partial(c: &FinCat, prods: &ChosenBinProducts) -> ChosenExponentials {
    let mut out = ChosenExponentials::default();
    for x in c.object_ids() {
        for y in c.object_ids() {
            if let Some(w) = find_exponential(c, prods, x, y) {
                out.insert(w);
            }
        }
    }
    out
}

/// `comparison[(x, y)]: F(expo x y) → expo F(x) F(y)`.
#[derive(Clone, Debug, PartialEq)]
pub struct ExpPreservationCert {
    pub functor: Functor,
    pub comparison: BTreeMap<(ObjId, ObjId), Iso>,
}

/// Everything about exponentials on one category.
#[derive(Clone, Copy)]
pub struct ExpContext<'a> {
    pub prods: &'a ChosenBinProducts,
    pub exps: &'a ChosenExponentials,
}

fn names(c: &FinCat, x: ObjId, y: ObjId) -> (String, String) {
    (c.object_label(x).to_string(), c.object_label(y).to_string())
}

/// The comparison `curry(μ·F(ev))` for every chosen exponential of the
/// source whose image pair has a chosen exponential; fails when one is not
/// invertible.
pub fn preserves_exponentials(
    f: &Functor,
    src: ExpContext,
    dst: ExpContext,
    mu: &ProductPreservationCert,
) -> Result<ExpPreservationCert, ExponentialError> {
    let (c, d) = (&**f.source(), &**f.target());
    let mut comparison = BTreeMap::new();
    for (&(x, y), w) in &src.exps.entries {
        let Some(target) = dst.exps.get(f.obj(x), f.obj(y)) else {
            continue;
        };
        let (base, tgt) = names(c, x, y);
        let missing = || ExponentialError::Missing {
            base: base.clone(),
            target: tgt.clone(),
        };
        let m = mu.mu.get(&(w.obj, x)).ok_or_else(missing)?;
        let lam = curry(d, dst.prods, target, f.obj(w.obj), d.compose(m.fwd, f.mor(w.ev))).ok_or_else(missing)?;
        let iso = find_iso(d, lam).ok_or_else(|| ExponentialError::NotPreserved {
            base: base.clone(),
            target: tgt.clone(),
        })?;
        comparison.insert((x, y), iso);
    }
    Ok(ExpPreservationCert {
        functor: f.clone(),
        comparison,
    })
}

/// Exponentials on `D` from those on `C`: object `G(e)` and evaluation
/// `(id × i1⁻¹)·μ·G(ev)·i2`. `dst_prods` are the chosen products of `D`
/// with comparison `mu` for `G`.
pub fn transfer_exponentials(
    g: &WeakEquivalenceCert,
    src: ExpContext,
    dst_prods: &ChosenBinProducts,
    mu: &ProductPreservationCert,
) -> Result<(ChosenExponentials, ExpPreservationCert), ExponentialError> {
    if !g.validate() {
        return Err(LimitError::InvalidCert.into());
    }
    let d = &**g.target();
    let gf = g.functor();
    let mut out = ChosenExponentials::default();
    for y1 in d.object_ids() {
        for y2 in d.object_ids() {
            let ((x1, i1), (x2, i2)) = (g.split(y1), g.split(y2));
            let Some(w) = src.exps.get(x1, x2) else {
                continue;
            };
            let (base, target) = names(d, y1, y2);
            let fail = || ExponentialError::TransferFails {
                base: base.clone(),
                target: target.clone(),
            };
            let e = gf.obj(w.obj);
            let (Some(p), Some(q)) = (dst_prods.get((e, y1)), dst_prods.get((e, gf.obj(x1)))) else {
                continue;
            };
            let Some(m) = mu.mu.get(&(w.obj, x1)) else {
                continue;
            };
            let shift = pairing(d, q, p.pi1, d.compose(p.pi2, i1.inv)).map_err(|_| fail())?;
            let ev = d.compose_all(&[shift, m.fwd, gf.mor(w.ev), i2.fwd]);
            let out_w = ExponentialW {
                base: y1,
                target: y2,
                obj: e,
                ev,
            };
            if !is_exponential(d, dst_prods, &out_w) {
                return Err(fail());
            }
            out.insert(out_w);
        }
    }
    let cert = preserves_exponentials(
        gf,
        src,
        ExpContext {
            prods: dst_prods,
            exps: &out,
        },
        mu,
    )
    .map_err(|e| match e {
        ExponentialError::NotPreserved { base, target } | ExponentialError::Missing { base, target } => {
            ExponentialError::TransferFails { base, target }
        }
        other => other,
    })?;
    Ok((out, cert))
}

/// `c_H = H(θ)⁻¹·α_{e}·c_F·ψ` where `θ: G(e) → q` compares the transported
/// and the chosen exponential of `D`, and `ψ` re-indexes the exponential of
/// `E` along `β`. Cross-checked against the direct comparison.
#[allow(clippy::too_many_arguments)]
pub fn lift_preservation_exponentials(
    input: &LiftInput,
    c_ctx: ExpContext,
    d_ctx: ExpContext,
    e_ctx: ExpContext,
    mu_g: &ProductPreservationCert,
    mu_h: &ProductPreservationCert,
    f_cert: &ExpPreservationCert,
) -> Result<ExpPreservationCert, ExponentialError> {
    input.validate()?;
    let LiftInput { g, f, h, alpha } = *input;
    let (d, e) = (&**g.target(), &**f.target());
    let (transported, _) = transfer_exponentials(g, c_ctx, d_ctx.prods, mu_g)?;
    let mut comparison = BTreeMap::new();
    for (&(y1, y2), w) in &d_ctx.exps.entries {
        let Some(target) = e_ctx.exps.get(h.obj(y1), h.obj(y2)) else {
            continue;
        };
        let (base, tgt) = names(d, y1, y2);
        let missing = || ExponentialError::Missing {
            base: base.clone(),
            target: tgt.clone(),
        };
        let (x1, x2) = (g.split(y1).0, g.split(y2).0);
        let ec = c_ctx.exps.get(x1, x2).ok_or_else(missing)?.obj;
        let tw = transported.get(y1, y2).ok_or_else(missing)?;
        // θ: G(e_C) → q
        let theta = curry(d, d_ctx.prods, w, tw.obj, tw.ev).ok_or_else(missing)?;
        let theta = find_iso(d, theta).ok_or_else(missing)?;
        let c_f = f_cert.comparison.get(&(x1, x2)).ok_or_else(missing)?;
        // ψ: expo F(x1) F(x2) → expo H(y1) H(y2)
        let middle = e_ctx.exps.get(f.obj(x1), f.obj(x2)).ok_or_else(missing)?;
        let (b1, b2) = (input.beta(y1), input.beta(y2));
        let p = e_ctx.prods.get((middle.obj, h.obj(y1))).ok_or_else(missing)?;
        let q = e_ctx.prods.get((middle.obj, f.obj(x1))).ok_or_else(missing)?;
        let shift = pairing(e, q, p.pi1, e.compose(p.pi2, b1.fwd))?;
        let psi = curry(e, e_ctx.prods, target, middle.obj, e.compose_all(&[shift, middle.ev, b2.inv]))
            .ok_or_else(missing)?;
        let fwd = e.compose_all(&[h.mor(theta.inv), alpha.component(ec).fwd, c_f.fwd, psi]);
        let iso = find_iso(e, fwd).ok_or_else(|| ExponentialError::LiftDisagrees {
            base: base.clone(),
            target: tgt.clone(),
        })?;
        comparison.insert((y1, y2), iso);
    }
    let direct = preserves_exponentials(h, d_ctx, e_ctx, mu_h).map_err(|_| ExponentialError::LiftDisagrees {
        base: "direct".into(),
        target: "check".into(),
    })?;
    if let Some((&(y1, y2), _)) = direct.comparison.iter().find(|(k, v)| comparison.get(k) != Some(v)) {
        let (base, target) = names(d, y1, y2);
        return Err(ExponentialError::LiftDisagrees { base, target });
    }
    if comparison.len() != direct.comparison.len() {
        return Err(ExponentialError::LiftDisagrees {
            base: "comparison".into(),
            target: "count".into(),
        });
    }
    Ok(ExpPreservationCert {
        functor: h.clone(),
        comparison,
    })
}

#[cfg(test)]
mod tests {
    use std::sync::Arc;

    use super::*;
    use crate::completion::inflate;
    use crate::functor::is_weak_equivalence;
    use crate::generators::{finset_subcategory, preorder_cat, terminal_cat, FiniteHeytingAlgebra};
    use crate::limits::{find_binary_products, preserves, transfer};

    #[test]
    fn terminal_category_is_closed() {
        let t = terminal_cat();
        let prods = find_binary_products(&t).unwrap();
        let exps = find_exponentials(&t, &prods).unwrap();
        assert_eq!(exps.get(ObjId(0), ObjId(0)).unwrap().ev, MorId(0));
    }

    #[test]
    fn finset_exponentials_need_every_product() {
        let fs = finset_subcategory(&[1, 2, 4]);
        let c = &fs.category;
        let prods = crate::limits::find_partial(c);
        let (one, two) = (fs.object_of_card(1).unwrap(), fs.object_of_card(2).unwrap());
        // 4 × 2 is missing, so 2^2 cannot be universal here
        assert!(prods.get((two, two)).is_some());
        assert!(find_exponential(c, &prods, two, two).is_none());
        // x^1 = x
        for y in c.object_ids() {
            let w = find_exponential(c, &prods, one, y).unwrap();
            assert_eq!(fs.card(w.obj), fs.card(y));
        }
    }

    #[test]
    fn chain_implication() {
        let h = FiniteHeytingAlgebra::chain(3);
        let c = h.as_category();
        let prods = find_binary_products(&c).unwrap();
        let exps = find_exponentials(&c, &prods).unwrap();
        for a in 0..3 {
            for b in 0..3 {
                assert_eq!(exps.get(ObjId(a), ObjId(b)).unwrap().obj, ObjId(h.imp(a, b)));
            }
        }
        let two = preorder_cat(&["0", "1"], &[(0, 1)]).unwrap();
        let p2 = find_binary_products(&two).unwrap();
        let e2 = find_exponentials(&two, &p2).unwrap();
        assert_eq!(e2.get(ObjId(0), ObjId(0)).unwrap().obj, ObjId(1));
        assert_eq!(e2.get(ObjId(1), ObjId(0)).unwrap().obj, ObjId(0));
    }

    #[test]
    fn transfer_from_inflated_heyting_chain() {
        let base = Arc::new(FiniteHeytingAlgebra::chain(3).as_category());
        let (big, proj) = inflate(&base, &[1, 2, 2]).unwrap();
        let g = is_weak_equivalence(&proj).unwrap();
        let prods = find_binary_products(&big).unwrap();
        let exps = find_exponentials(&big, &prods).unwrap();
        let (dprods, mu) = transfer(&g, &prods).unwrap();
        let (dexps, cert) = transfer_exponentials(&g, ExpContext { prods: &prods, exps: &exps }, &dprods, &mu).unwrap();
        let direct = find_exponentials(&base, &dprods).unwrap();
        for (k, w) in &direct.entries {
            assert_eq!(dexps.get(k.0, k.1).unwrap().obj, w.obj);
        }
        assert_eq!(cert.comparison.len(), exps.len());
    }

    #[test]
    fn meet_preserving_map_need_not_preserve_implication() {
        // 0, 1 ↦ 0 and 2 ↦ 2 keeps meets, but sends 1 ⇒ 0 = 0 to 0 while
        // 0 ⇒ 0 = 2
        let h = FiniteHeytingAlgebra::chain(3);
        let c = Arc::new(h.as_category());
        let prods = find_binary_products(&c).unwrap();
        let exps = find_exponentials(&c, &prods).unwrap();
        let hom = |a: usize, b: usize| c.hom(ObjId(a), ObjId(b))[0];
        let obj = [0usize, 0, 2];
        let k = Functor::new(
            c.clone(),
            c.clone(),
            obj.iter().map(|&o| ObjId(o)).collect(),
            c.morphism_ids()
                .map(|m| hom(obj[c.src(m).0], obj[c.dst(m).0]))
                .collect(),
        )
        .unwrap();
        let mu = preserves(&k, &prods, &prods).unwrap();
        let ctx = ExpContext { prods: &prods, exps: &exps };
        assert!(matches!(
            preserves_exponentials(&k, ctx, ctx, &mu),
            Err(ExponentialError::NotPreserved { .. })
        ));
        let id = Functor::identity(&c);
        let mu_id = preserves(&id, &prods, &prods).unwrap();
        let cert = preserves_exponentials(&id, ctx, ctx, &mu_id).unwrap();
        assert!(cert.comparison.values().all(|i| c.is_identity(i.fwd)));
    }
}
