//! Parameterized natural numbers objects.
//!
//! Only degenerate instances exist in finite categories; the checker is
//! exhaustive over all parameter objects, targets and recursion data.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::fincat::{find_iso, FinCat, Iso, MorId, ObjId};
use crate::functor::{Functor, WeakEquivalenceCert};
use crate::limits::{is_terminal, pairing, product_map, to_terminal, ChosenBinProducts, LiftInput, LimitError, ProductPreservationCert, TerminalW};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum PnnoError {
    #[error(transparent)]
    Limit(#[from] LimitError),
    #[error("zero or successor is ill-typed")]
    IllTyped,
    #[error("product of `{0}` with the candidate is missing")]
    MissingProduct(String),
    #[error("recursion into `{target}` with parameter `{parameter}` has {count} solutions")]
    NotUniversal { parameter: String, target: String, count: usize },
    #[error("functor does not preserve the terminal object")]
    TerminalNotPreserved,
    #[error("comparison is not invertible")]
    NotPreserved,
    #[error("internal: transferred pNNO does not validate: {0}")]
    TransferFails(String),
    #[error("internal: reflection disagrees with direct search")]
    ReflectionFails,
    #[error("internal: constructed and direct comparisons differ")]
    LiftDisagrees,
}

impl PnnoError {
    pub fn is_internal(&self) -> bool {
        match self {
            PnnoError::Limit(e) => e.is_internal(),
            PnnoError::TransferFails(_) | PnnoError::ReflectionFails | PnnoError::LiftDisagrees => true,
            _ => false,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PNNOW {
    #[serde(rename = "N")]
    pub n: ObjId,
    pub z: MorId,
    pub s: MorId,
}

/// Terminal object and chosen products of one category.
#[derive(Clone, Copy)]
pub struct PnnoContext<'a> {
    pub term: TerminalW,
    pub prods: &'a ChosenBinProducts,
}

/// `⟨id_a, !·z⟩: a → a × N` and `id_a × s`.
fn base_maps(c: &FinCat, ctx: PnnoContext, w: &PNNOW, a: ObjId) -> Result<(MorId, MorId), PnnoError> {
    let p = ctx
        .prods
        .get((a, w.n))
        .ok_or_else(|| PnnoError::MissingProduct(c.object_label(a).to_string()))?;
    let start = pairing(c, p, c.id(a), c.compose(to_terminal(c, ctx.term.t, a), w.z))?;
    let step = product_map(c, ctx.prods, c.id(a), w.s)?;
    Ok((start, step))
}

/// The solutions `f: a × N → m` of `⟨id, !·z⟩·f = z'` and
/// `(id × s)·f = f·s'`.
pub fn recursion_solutions(
    c: &FinCat,
    ctx: PnnoContext,
    w: &PNNOW,
    z2: MorId,
    s2: MorId,
) -> Result<Vec<MorId>, PnnoError> {
    let (a, m) = (c.src(z2), c.dst(z2));
    let (start, step) = base_maps(c, ctx, w, a)?;
    let apex = c.dst(start);
    Ok(c.hom(apex, m)
        .iter()
        .copied()
        .filter(|&f| c.compose(start, f) == z2 && c.compose(step, f) == c.compose(f, s2))
        .collect())
}

pub fn is_pnno(c: &FinCat, ctx: PnnoContext, w: PNNOW) -> Result<PNNOW, PnnoError> {
    if !is_terminal(c, ctx.term.t) {
        return Err(LimitError::PreconditionViolation("terminal object does not validate".into()).into());
    }
    let typed = w.n.0 < c.object_count()
        && w.z.0 < c.morphism_count()
        && w.s.0 < c.morphism_count()
        && c.src(w.z) == ctx.term.t
        && c.dst(w.z) == w.n
        && c.src(w.s) == w.n
        && c.dst(w.s) == w.n;
    if !typed {
        return Err(PnnoError::IllTyped);
    }
    for a in c.object_ids() {
        for m in c.object_ids() {
            for &z2 in c.hom(a, m) {
                for &s2 in c.hom(m, m) {
                    let count = recursion_solutions(c, ctx, &w, z2, s2)?.len();
                    if count != 1 {
                        return Err(PnnoError::NotUniversal {
                            parameter: c.object_label(a).to_string(),
                            target: c.object_label(m).to_string(),
                            count,
                        });
                    }
                }
            }
        }
    }
    Ok(w)
}

/// Sweeps `(N, z, s)` in index order.
pub fn find_pnno(c: &FinCat, ctx: PnnoContext) -> Option<PNNOW> {
    c.object_ids().find_map(|n| {
        c.hom(ctx.term.t, n).iter().find_map(|&z| {
            c.hom(n, n)
                .iter()
                .find_map(|&s| is_pnno(c, ctx, PNNOW { n, z, s }).ok())
        })
    })
}

/// Every candidate triple, in sweep order, with its verdict.
pub fn sweep_pnno(c: &FinCat, ctx: PnnoContext) -> Vec<(PNNOW, bool)> {
    let mut out = Vec::new();
    for n in c.object_ids() {
        for &z in c.hom(ctx.term.t, n) {
            for &s in c.hom(n, n) {
                let w = PNNOW { n, z, s };
                out.push((w, is_pnno(c, ctx, w).is_ok()));
            }
        }
    }
    out
}

/// `comparison: N₁ → F(N₀)`.
#[derive(Clone, Debug, PartialEq)]
pub struct PNNOPreservationCert {
    pub functor: Functor,
    pub comparison: Iso,
}

/// The canonical `⟨!, id⟩·f: N₁ → F(N₀)` where `f` solves the recursion
/// for `(!·F(z₀), F(s₀))`; it must be invertible.
pub fn preserves_pnno(
    f: &Functor,
    src: PnnoContext,
    w_c: &PNNOW,
    dst: PnnoContext,
    w_d: &PNNOW,
) -> Result<PNNOPreservationCert, PnnoError> {
    let d = &**f.target();
    let ft = f.obj(src.term.t);
    if !is_terminal(d, ft) {
        return Err(PnnoError::TerminalNotPreserved);
    }
    let z2 = d.compose(to_terminal(d, ft, dst.term.t), f.mor(w_c.z));
    let s2 = f.mor(w_c.s);
    let sols = recursion_solutions(d, dst, w_d, z2, s2)?;
    let [sol] = sols.as_slice() else {
        return Err(PnnoError::NotUniversal {
            parameter: d.object_label(dst.term.t).to_string(),
            target: d.object_label(f.obj(w_c.n)).to_string(),
            count: sols.len(),
        });
    };
    let p = dst
        .prods
        .get((dst.term.t, w_d.n))
        .ok_or_else(|| PnnoError::MissingProduct(d.object_label(dst.term.t).to_string()))?;
    let into = pairing(d, p, to_terminal(d, dst.term.t, w_d.n), d.id(w_d.n))?;
    let comparison = find_iso(d, d.compose(into, *sol)).ok_or(PnnoError::NotPreserved)?;
    Ok(PNNOPreservationCert {
        functor: f.clone(),
        comparison,
    })
}

/// `(G(N), !·G(z), G(s))`, re-validated.
pub fn transfer_pnno(
    g: &WeakEquivalenceCert,
    src: PnnoContext,
    w: &PNNOW,
    dst: PnnoContext,
) -> Result<(PNNOW, PNNOPreservationCert), PnnoError> {
    if !g.validate() {
        return Err(LimitError::InvalidCert.into());
    }
    let d = &**g.target();
    let gf = g.functor();
    let gt = gf.obj(src.term.t);
    let out = PNNOW {
        n: gf.obj(w.n),
        z: d.compose(to_terminal(d, gt, dst.term.t), gf.mor(w.z)),
        s: gf.mor(w.s),
    };
    is_pnno(d, dst, out).map_err(|e| PnnoError::TransferFails(e.to_string()))?;
    let cert = preserves_pnno(gf, src, w, dst, &out).map_err(|e| PnnoError::TransferFails(e.to_string()))?;
    Ok((out, cert))
}

/// Given that the image triple is a pNNO in `D`, every recursion problem in
/// `C` is solved by `G⁻¹(μ⁻¹·f_D)` and by nothing else. Cross-checked
/// against the direct search on `C`.
pub fn reflect_pnno(
    g: &WeakEquivalenceCert,
    src: PnnoContext,
    w: &PNNOW,
    dst: PnnoContext,
    mu: &ProductPreservationCert,
) -> Result<(), PnnoError> {
    let (c, d) = (&**g.source(), &**g.target());
    let gf = g.functor();
    let gt = gf.obj(src.term.t);
    let image = PNNOW {
        n: gf.obj(w.n),
        z: d.compose(to_terminal(d, gt, dst.term.t), gf.mor(w.z)),
        s: gf.mor(w.s),
    };
    is_pnno(d, dst, image).map_err(|e| LimitError::PreconditionViolation(format!("image triple: {e}")))?;
    let mut constructive = true;
    'outer: for a in c.object_ids() {
        for m in c.object_ids() {
            for &z2 in c.hom(a, m) {
                for &s2 in c.hom(m, m) {
                    let Some(iso) = mu.mu.get(&(a, w.n)) else {
                        constructive = false;
                        break 'outer;
                    };
                    let sols = recursion_solutions(d, dst, &image, gf.mor(z2), gf.mor(s2))?;
                    let [fd] = sols.as_slice() else {
                        constructive = false;
                        break 'outer;
                    };
                    let apex = c.dst(base_maps(c, src, w, a)?.0);
                    let candidate = g.preimage(apex, m, d.compose(iso.inv, *fd));
                    let direct = recursion_solutions(c, src, w, z2, s2)?;
                    if direct != vec![candidate] {
                        constructive = false;
                        break 'outer;
                    }
                }
            }
        }
    }
    let direct = is_pnno(c, src, *w).is_ok();
    if !constructive || !direct {
        return Err(PnnoError::ReflectionFails);
    }
    Ok(())
}

/// `c_H = c_F·α_N⁻¹·H(θ)` with `θ = c_G⁻¹: G(N_C) → N_D`. Cross-checked
/// against the direct comparison.
pub fn lift_preservation_pnno(
    input: &LiftInput,
    c_ctx: (PnnoContext, &PNNOW),
    d_ctx: (PnnoContext, &PNNOW),
    e_ctx: (PnnoContext, &PNNOW),
    g_cert: &PNNOPreservationCert,
    f_cert: &PNNOPreservationCert,
) -> Result<PNNOPreservationCert, PnnoError> {
    input.validate()?;
    let LiftInput { h, alpha, .. } = *input;
    let e = &**input.f.target();
    let theta = g_cert.comparison.inverse();
    let fwd = e.compose_all(&[f_cert.comparison.fwd, alpha.component(c_ctx.1.n).inv, h.mor(theta.fwd)]);
    let constructed = find_iso(e, fwd).ok_or(PnnoError::LiftDisagrees)?;
    let direct = preserves_pnno(h, d_ctx.0, d_ctx.1, e_ctx.0, e_ctx.1)?;
    if direct.comparison != constructed {
        return Err(PnnoError::LiftDisagrees);
    }
    Ok(direct)
}

#[cfg(test)]
mod tests {
    use std::sync::Arc;

    use super::*;
    use crate::completion::inflate;
    use crate::functor::is_weak_equivalence;
    use crate::generators::{finset_fragment, preorder_cat, terminal_cat};
    use crate::limits::{find_binary_products, find_partial, find_terminal, preserves, transfer};

    #[test]
    fn terminal_category_has_trivial_pnno() {
        let t = terminal_cat();
        let prods = find_binary_products(&t).unwrap();
        let ctx = PnnoContext {
            term: find_terminal(&t).unwrap(),
            prods: &prods,
        };
        let w = PNNOW {
            n: ObjId(0),
            z: MorId(0),
            s: MorId(0),
        };
        assert_eq!(is_pnno(&t, ctx, w), Ok(w));
    }

    #[test]
    fn chain_top_is_pnno() {
        let c = preorder_cat(&["0", "1"], &[(0, 1)]).unwrap();
        let prods = find_binary_products(&c).unwrap();
        let ctx = PnnoContext {
            term: find_terminal(&c).unwrap(),
            prods: &prods,
        };
        let found = find_pnno(&c, ctx).unwrap();
        assert_eq!(found.n, ObjId(1));
        // the bottom fails: no z
        assert_eq!(sweep_pnno(&c, ctx).len(), 1);
    }

    #[test]
    fn finset_has_no_pnno() {
        // {0, 1} is a two-element chain, where the top is one
        for k in 2..=3 {
            let fs = finset_fragment(k).unwrap();
            let c = &fs.category;
            let prods = find_partial(c);
            let ctx = PnnoContext {
                term: find_terminal(c).unwrap(),
                prods: &prods,
            };
            assert!(sweep_pnno(c, ctx).iter().all(|(_, ok)| !ok), "fragment {k}");
        }
    }

    #[test]
    fn transfer_and_reflect_on_walking_iso() {
        let t = Arc::new(terminal_cat());
        let (w2, proj) = inflate(&t, &[2]).unwrap();
        let g = is_weak_equivalence(&proj).unwrap();
        let prods_c = find_binary_products(&w2).unwrap();
        let term_c = find_terminal(&w2).unwrap();
        let src = PnnoContext {
            term: term_c,
            prods: &prods_c,
        };
        let w = find_pnno(&w2, src).unwrap();
        let (prods_d, mu) = transfer(&g, &prods_c).unwrap();
        let dst = PnnoContext {
            term: find_terminal(&t).unwrap(),
            prods: &prods_d,
        };
        let (wd, cert) = transfer_pnno(&g, src, &w, dst).unwrap();
        assert_eq!(wd, find_pnno(&t, dst).unwrap());
        assert!(cert.comparison.is_valid(&t));
        assert_eq!(reflect_pnno(&g, src, &w, dst, &mu), Ok(()));
        let _ = preserves(g.functor(), &prods_c, &prods_d).unwrap();
    }
}
