//! Monomorphisms and subobject classifiers, with transfer and both
//! preservation conditions.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::fincat::{find_iso, isos_between, FinCat, Iso, MorId, ObjId};
use crate::functor::{Functor, WeakEquivalenceCert};
use crate::limits::{is_limit, is_terminal, to_terminal, Cone, Diagram, LiftInput, LimitError, TerminalW};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ClassifierError {
    #[error(transparent)]
    Limit(#[from] LimitError),
    #[error("internal: mono characterizations disagree on `{morphism}`")]
    MonoCharacterizationsDisagree { morphism: String },
    #[error("truth map is not a morphism from the terminal object")]
    TruthMapIllTyped,
    #[error("truth map is not a monomorphism")]
    TruthMapNotMono,
    #[error("mono `{mono}` has no classifying map")]
    NoClassifier { mono: String },
    #[error("mono `{mono}` has {count} classifying maps")]
    AmbiguousClassifier { mono: String, count: usize },
    #[error("no subobject classifier")]
    NotFound,
    #[error("functor does not preserve the terminal object")]
    TerminalNotPreserved,
    #[error("functor does not preserve the subobject classifier")]
    NotPreserved,
    #[error("internal: the two preservation conditions disagree")]
    ConditionsDisagree,
    #[error("internal: transferred classifier does not validate: {0}")]
    TransferFails(String),
    #[error("internal: constructed and direct classifier comparisons differ")]
    LiftDisagrees,
}

impl ClassifierError {
    pub fn is_internal(&self) -> bool {
        match self {
            ClassifierError::Limit(e) => e.is_internal(),
            ClassifierError::MonoCharacterizationsDisagree { .. }
            | ClassifierError::ConditionsDisagree
            | ClassifierError::TransferFails(_)
            | ClassifierError::LiftDisagrees => true,
            _ => false,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum MonoMode {
    Cancellation,
    PullbackSquare,
}

/// Both characterizations were checked and hold.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MonoCert {
    pub f: MorId,
    pub modes: [MonoMode; 2],
}

/// `g·f = h·f ⇒ g = h` for every parallel pair into the source of `f`.
pub fn is_mono_by_cancellation(c: &FinCat, f: MorId) -> bool {
    let x = c.src(f);
    c.object_ids().all(|z| {
        let mut images: Vec<MorId> = c.hom(z, x).iter().map(|&g| c.compose(g, f)).collect();
        let n = images.len();
        images.sort();
        images.dedup();
        images.len() == n
    })
}

/// The square with `f` on two sides and identities on the others is a
/// pullback.
pub fn is_mono_by_pullback(c: &FinCat, f: MorId) -> bool {
    let (x, y) = (c.src(f), c.dst(f));
    let d = Diagram {
        nodes: vec![x, x, y],
        arrows: vec![(0, 2, f), (1, 2, f)],
    };
    let id = c.id(x);
    is_limit(
        c,
        &d,
        &Cone {
            apex: x,
            legs: vec![id, id, f],
        },
    )
}

pub fn is_mono(c: &FinCat, f: MorId) -> Result<Option<MonoCert>, ClassifierError> {
    match (is_mono_by_cancellation(c, f), is_mono_by_pullback(c, f)) {
        (true, true) => Ok(Some(MonoCert {
            f,
            modes: [MonoMode::Cancellation, MonoMode::PullbackSquare],
        })),
        (false, false) => Ok(None),
        _ => Err(ClassifierError::MonoCharacterizationsDisagree {
            morphism: c.label(f).to_string(),
        }),
    }
}

pub fn monos(c: &FinCat) -> Vec<MorId> {
    c.morphism_ids().filter(|&f| is_mono_by_cancellation(c, f)).collect()
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SubobjectClassifierW {
    pub omega: ObjId,
    pub tau: MorId,
    /// Classifying map of every mono.
    pub chi: BTreeMap<MorId, MorId>,
}

/// `f: x → y` is the pullback of `tau` along `chi`.
pub fn classifies(c: &FinCat, t: ObjId, tau: MorId, f: MorId, chi: MorId) -> bool {
    let (x, y) = (c.src(f), c.dst(f));
    if c.src(chi) != y || c.dst(chi) != c.dst(tau) {
        return false;
    }
    let d = Diagram {
        nodes: vec![y, t, c.dst(tau)],
        arrows: vec![(0, 2, chi), (1, 2, tau)],
    };
    is_limit(
        c,
        &d,
        &Cone {
            apex: x,
            legs: vec![f, to_terminal(c, t, x), c.compose(f, chi)],
        },
    )
}

/// Every mono must have exactly one classifying map.
pub fn is_subobject_classifier(
    c: &FinCat,
    term: TerminalW,
    omega: ObjId,
    tau: MorId,
) -> Result<SubobjectClassifierW, ClassifierError> {
    if !is_terminal(c, term.t) {
        return Err(ClassifierError::Limit(LimitError::PreconditionViolation(
            "terminal object does not validate".into(),
        )));
    }
    if tau.0 >= c.morphism_count() || c.src(tau) != term.t || c.dst(tau) != omega {
        return Err(ClassifierError::TruthMapIllTyped);
    }
    if is_mono(c, tau)?.is_none() {
        return Err(ClassifierError::TruthMapNotMono);
    }
    classify_all(c, term, omega, tau, &monos(c))
}

fn classify_all(
    c: &FinCat,
    term: TerminalW,
    omega: ObjId,
    tau: MorId,
    monos: &[MorId],
) -> Result<SubobjectClassifierW, ClassifierError> {
    let mut chi = BTreeMap::new();
    for &f in monos {
        let found: Vec<MorId> = c
            .hom(c.dst(f), omega)
            .iter()
            .copied()
            .filter(|&k| classifies(c, term.t, tau, f, k))
            .collect();
        match found.as_slice() {
            [k] => {
                chi.insert(f, *k);
            }
            [] => {
                return Err(ClassifierError::NoClassifier {
                    mono: c.label(f).to_string(),
                })
            }
            _ => {
                return Err(ClassifierError::AmbiguousClassifier {
                    mono: c.label(f).to_string(),
                    count: found.len(),
                })
            }
        }
    }
    Ok(SubobjectClassifierW { omega, tau, chi })
}

/// Sweeps `(Ω, τ)` in object, then morphism order.
pub fn find_subobject_classifier(c: &FinCat, term: TerminalW) -> Option<SubobjectClassifierW> {
    let all = monos(c);
    c.object_ids().find_map(|omega| {
        c.hom(term.t, omega)
            .iter()
            .filter(|&&tau| all.contains(&tau))
            .find_map(|&tau| classify_all(c, term, omega, tau, &all).ok())
    })
}

/// `condition1`: `(F(Ω₀), !·F(τ₀))` classifies. `condition2`: an iso
/// `i: F(Ω₀) → Ω₁` with `F(τ₀)·i = !⁻¹·τ₁`.
#[derive(Clone, Debug, PartialEq)]
pub struct OmegaPreservationCert {
    pub functor: Functor,
    pub condition1: SubobjectClassifierW,
    pub condition2: Iso,
}

/// Evaluates both conditions; they must agree.
pub fn preserves_subobject_classifier(
    f: &Functor,
    term_c: TerminalW,
    soc_c: &SubobjectClassifierW,
    term_d: TerminalW,
    soc_d: &SubobjectClassifierW,
) -> Result<OmegaPreservationCert, ClassifierError> {
    let d = &**f.target();
    let ft = f.obj(term_c.t);
    if !is_terminal(d, ft) {
        return Err(ClassifierError::TerminalNotPreserved);
    }
    let bang = to_terminal(d, ft, term_d.t);
    let bang_inv = to_terminal(d, term_d.t, ft);
    let image_omega = f.obj(soc_c.omega);
    let image_tau = d.compose(bang, f.mor(soc_c.tau));
    let cond1 = is_subobject_classifier(d, term_d, image_omega, image_tau);
    let lhs_target = d.compose(bang_inv, soc_d.tau);
    let cond2 = isos_between(d, image_omega, soc_d.omega)
        .into_iter()
        .find(|i| d.compose(f.mor(soc_c.tau), i.fwd) == lhs_target);
    match (cond1, cond2) {
        (Ok(condition1), Some(condition2)) => Ok(OmegaPreservationCert {
            functor: f.clone(),
            condition1,
            condition2,
        }),
        (Err(e), _) if e.is_internal() => Err(e),
        (Err(_), None) => Err(ClassifierError::NotPreserved),
        _ => Err(ClassifierError::ConditionsDisagree),
    }
}

/// `Ω_D = G(Ω)`, `τ_D = !·G(τ)`, `χ_D(f) = i_b⁻¹·G(χ(G⁻¹(i_a·f·i_b⁻¹)))`.
pub fn transfer_subobject_classifier(
    g: &WeakEquivalenceCert,
    term_c: TerminalW,
    soc_c: &SubobjectClassifierW,
    term_d: TerminalW,
) -> Result<(SubobjectClassifierW, OmegaPreservationCert), ClassifierError> {
    if !g.validate() {
        return Err(LimitError::InvalidCert.into());
    }
    let d = &**g.target();
    let gf = g.functor();
    let gt = gf.obj(term_c.t);
    let omega = gf.obj(soc_c.omega);
    let tau = d.compose(to_terminal(d, gt, term_d.t), gf.mor(soc_c.tau));
    let mut chi = BTreeMap::new();
    for f in monos(d) {
        let ((xa, ia), (xb, ib)) = (g.split(d.src(f)), g.split(d.dst(f)));
        let fc = g.preimage(xa, xb, d.compose_all(&[ia.fwd, f, ib.inv]));
        let k = soc_c
            .chi
            .get(&fc)
            .ok_or_else(|| ClassifierError::TransferFails(format!("no classifying map for `{}`", d.label(f))))?;
        chi.insert(f, d.compose(ib.inv, gf.mor(*k)));
    }
    let w = SubobjectClassifierW { omega, tau, chi };
    let direct = is_subobject_classifier(d, term_d, omega, tau).map_err(|e| ClassifierError::TransferFails(e.to_string()))?;
    if direct != w {
        return Err(ClassifierError::TransferFails("classifying maps differ".into()));
    }
    let cert = preserves_subobject_classifier(gf, term_c, soc_c, term_d, &w)
        .map_err(|e| ClassifierError::TransferFails(e.to_string()))?;
    Ok((w, cert))
}

/// Classifier data on one category.
#[derive(Clone, Copy)]
pub struct OmegaContext<'a> {
    pub term: TerminalW,
    pub soc: &'a SubobjectClassifierW,
}

/// `i_H = H(θ)⁻¹·α_Ω·i_F` with `θ: G(Ω_C) → Ω_D` the classifying map of
/// the transported truth map. Cross-checked against the direct conditions.
pub fn lift_preservation_subobject_classifier(
    input: &LiftInput,
    c_ctx: OmegaContext,
    d_ctx: OmegaContext,
    e_ctx: OmegaContext,
    f_cert: &OmegaPreservationCert,
) -> Result<OmegaPreservationCert, ClassifierError> {
    input.validate()?;
    let LiftInput { g, h, alpha, .. } = *input;
    let (d, e) = (&**g.target(), &**input.f.target());
    let gt = g.functor().obj(c_ctx.term.t);
    let moved_tau = d.compose(to_terminal(d, gt, d_ctx.term.t), g.functor().mor(c_ctx.soc.tau));
    let theta = *d_ctx
        .soc
        .chi
        .get(&moved_tau)
        .ok_or_else(|| ClassifierError::Limit(LimitError::PreconditionViolation("transported truth map unclassified".into())))?;
    let theta = find_iso(d, theta).ok_or(ClassifierError::LiftDisagrees)?;
    let fwd = e.compose_all(&[
        h.mor(theta.inv),
        alpha.component(c_ctx.soc.omega).fwd,
        f_cert.condition2.fwd,
    ]);
    let constructed = find_iso(e, fwd).ok_or(ClassifierError::LiftDisagrees)?;
    let direct = preserves_subobject_classifier(h, d_ctx.term, d_ctx.soc, e_ctx.term, e_ctx.soc)?;
    if direct.condition2 != constructed {
        return Err(ClassifierError::LiftDisagrees);
    }
    Ok(direct)
}

#[cfg(test)]
mod tests {
    use std::sync::Arc;

    use super::*;
    use crate::completion::inflate;
    use crate::functor::is_weak_equivalence;
    use crate::generators::{finset_fragment, terminal_cat};
    use crate::limits::find_terminal;

    #[test]
    fn monos_in_finset() {
        let fs = finset_fragment(2).unwrap();
        let c = &fs.category;
        for f in c.morphism_ids() {
            assert_eq!(is_mono(c, f).unwrap().is_some(), fs.is_injective(f), "{}", c.label(f));
        }
        let (two, one) = (fs.object_of_card(2).unwrap(), fs.object_of_card(1).unwrap());
        assert!(is_mono(c, fs.morphism(two, one, &[0, 0]).unwrap()).unwrap().is_none());
    }

    #[test]
    fn terminal_category_classifier() {
        let t = terminal_cat();
        let w = is_subobject_classifier(&t, TerminalW { t: ObjId(0) }, ObjId(0), MorId(0)).unwrap();
        assert_eq!(w.chi.len(), 1);
    }

    #[test]
    fn finset_classifier_is_two() {
        let fs = finset_fragment(3).unwrap();
        let c = &fs.category;
        let term = find_terminal(c).unwrap();
        let w = find_subobject_classifier(c, term).unwrap();
        assert_eq!(fs.card(w.omega), 2);
        // exactly the points of the 2-element set survive
        let survivors: Vec<(usize, MorId)> = c
            .object_ids()
            .flat_map(|o| c.hom(term.t, o).iter().map(move |&t| (o, t)))
            .filter(|&(o, t)| is_subobject_classifier(c, term, o, t).is_ok())
            .map(|(o, t)| (fs.card(o), t))
            .collect();
        assert_eq!(survivors.len(), 2);
        assert!(survivors.iter().all(|&(k, _)| k == 2));
        let three = fs.object_of_card(3).unwrap();
        let tau3 = c.hom(term.t, three)[0];
        assert!(matches!(
            is_subobject_classifier(c, term, three, tau3),
            Err(ClassifierError::AmbiguousClassifier { .. } | ClassifierError::NoClassifier { .. })
        ));
    }

    #[test]
    fn transfer_from_inflated_fragment() {
        let base = Arc::new(finset_fragment(2).unwrap().category);
        let (big, proj) = inflate(&base, &[2, 2, 2]).unwrap();
        let g = is_weak_equivalence(&proj).unwrap();
        let term_c = find_terminal(&big).unwrap();
        let soc_c = find_subobject_classifier(&big, term_c).unwrap();
        let term_d = find_terminal(&base).unwrap();
        let (soc_d, cert) = transfer_subobject_classifier(&g, term_c, &soc_c, term_d).unwrap();
        assert_eq!(soc_d, find_subobject_classifier(&base, term_d).unwrap());
        assert!(cert.condition2.is_valid(&base));
    }

    #[test]
    fn identity_preserves_classifier() {
        let fs = finset_fragment(2).unwrap();
        let c = Arc::new(fs.category.clone());
        let term = find_terminal(&c).unwrap();
        let soc = find_subobject_classifier(&c, term).unwrap();
        let cert = preserves_subobject_classifier(&Functor::identity(&c), term, &soc, term, &soc).unwrap();
        assert!(c.is_identity(cert.condition2.fwd));
    }

    #[test]
    fn collapse_to_point_fails_both_conditions() {
        let fs = finset_fragment(2).unwrap();
        let c = Arc::new(fs.category.clone());
        let one = fs.object_of_card(1).unwrap();
        let k = Functor::new(
            c.clone(),
            c.clone(),
            vec![one; c.object_count()],
            vec![c.id(one); c.morphism_count()],
        )
        .unwrap();
        let term = find_terminal(&c).unwrap();
        let soc = find_subobject_classifier(&c, term).unwrap();
        assert_eq!(
            preserves_subobject_classifier(&k, term, &soc, term, &soc),
            Err(ClassifierError::NotPreserved)
        );
    }

    #[test]
    fn two_element_fragment_has_no_classifier() {
        let fs = finset_fragment(1).unwrap();
        let term = find_terminal(&fs.category).unwrap();
        assert!(find_subobject_classifier(&fs.category, term).is_none());
    }
}
