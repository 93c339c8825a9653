//! Structure transfer along weak equivalences, for any mix of the supported
//! structure kinds: completing a structured category and factoring a
//! structured functor through the completion.

use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::classifier::{
    find_subobject_classifier, is_subobject_classifier, lift_preservation_subobject_classifier,
    preserves_subobject_classifier, transfer_subobject_classifier, ClassifierError, OmegaContext,
    OmegaPreservationCert, SubobjectClassifierW,
};
use crate::completion::{factor_through, skeletize, CompletionError, CompletionResult, Factorization};
use crate::exponentials::{
    find_exponentials, lift_preservation_exponentials, preserves_exponentials, transfer_exponentials,
    ChosenExponentials, ExpContext, ExpPreservationCert, ExponentialError,
};
use crate::fincat::FinCat;
use crate::functor::{Functor, WeakEquivalenceCert};
use crate::limits::{
    self, find_all, find_terminal, lift_preservation, BinProductW, Chosen, ChosenBinProducts, ChosenEqualizers,
    ChosenPullbacks, EqualizerW, LiftInput, LimitError, LimitShape, PreservationCert, ProductPreservationCert,
    PullbackW, TerminalW,
};
use crate::nno::{
    find_pnno, is_pnno, lift_preservation_pnno, preserves_pnno, transfer_pnno, PNNOPreservationCert, PnnoContext,
    PnnoError, PNNOW,
};

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Kind {
    Terminal,
    Products,
    Equalizers,
    Pullbacks,
    Exponentials,
    Classifier,
    Pnno,
}

impl Kind {
    /// Dependency order.
    pub const ALL: [Kind; 7] = [
        Kind::Terminal,
        Kind::Products,
        Kind::Equalizers,
        Kind::Pullbacks,
        Kind::Exponentials,
        Kind::Classifier,
        Kind::Pnno,
    ];

    pub const TOPOS: [Kind; 6] = [
        Kind::Terminal,
        Kind::Products,
        Kind::Equalizers,
        Kind::Pullbacks,
        Kind::Exponentials,
        Kind::Classifier,
    ];

    pub fn dependencies(self) -> &'static [Kind] {
        match self {
            Kind::Exponentials => &[Kind::Products],
            Kind::Classifier => &[Kind::Terminal],
            Kind::Pnno => &[Kind::Terminal, Kind::Products],
            _ => &[],
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Kind::Terminal => "terminal",
            Kind::Products => "products",
            Kind::Equalizers => "equalizers",
            Kind::Pullbacks => "pullbacks",
            Kind::Exponentials => "exponentials",
            Kind::Classifier => "omega",
            Kind::Pnno => "pnno",
        }
    }
}

impl fmt::Display for Kind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Kind {
    type Err = String;

    fn from_str(s: &str) -> Result<Kind, String> {
        Ok(match s {
            "terminal" => Kind::Terminal,
            "products" | "binproducts" => Kind::Products,
            "equalizers" => Kind::Equalizers,
            "pullbacks" => Kind::Pullbacks,
            "exponentials" => Kind::Exponentials,
            "omega" | "classifier" | "subobject_classifier" => Kind::Classifier,
            "pnno" => Kind::Pnno,
            other => return Err(format!("unknown structure `{other}`")),
        })
    }
}

/// Parses a comma-separated list; `topos` and `w-topos` expand to their
/// components, `all` to every kind. Result is in dependency order.
pub fn parse_kinds(list: &str) -> Result<Vec<Kind>, String> {
    let mut kinds = Vec::new();
    for item in list.split(',').map(str::trim).filter(|s| !s.is_empty()) {
        match item {
            "topos" => kinds.extend(Kind::TOPOS),
            "w-topos" | "all" => kinds.extend(Kind::ALL),
            other => kinds.push(other.parse()?),
        }
    }
    kinds.sort();
    kinds.dedup();
    Ok(kinds)
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum LiftError {
    #[error("{kind} needs {needs}")]
    DependencyMissing { kind: Kind, needs: Kind },
    #[error("no {kind} witness given")]
    MissingWitness { kind: Kind },
    #[error("{kind} witness does not validate: {detail}")]
    InvalidWitness { kind: Kind, detail: String },
    #[error("{kind} not found: {detail}")]
    NotFound { kind: Kind, detail: String },
    #[error("{kind} not preserved: {detail}")]
    NotPreserved { kind: Kind, detail: String },
    #[error("internal: {kind}: {detail}")]
    Internal { kind: Kind, detail: String },
    #[error(transparent)]
    Completion(#[from] CompletionError),
}

impl LiftError {
    pub fn is_internal(&self) -> bool {
        matches!(self, LiftError::Internal { .. })
    }
}

fn wrap(kind: Kind, internal: bool, detail: impl fmt::Display) -> LiftError {
    if internal {
        LiftError::Internal {
            kind,
            detail: detail.to_string(),
        }
    } else {
        LiftError::NotPreserved {
            kind,
            detail: detail.to_string(),
        }
    }
}

fn from_limit(kind: Kind) -> impl Fn(LimitError) -> LiftError {
    move |e| wrap(kind, e.is_internal(), e)
}

fn from_exp(e: ExponentialError) -> LiftError {
    wrap(Kind::Exponentials, e.is_internal(), e)
}

fn from_classifier(e: ClassifierError) -> LiftError {
    wrap(Kind::Classifier, e.is_internal(), e)
}

fn from_pnno(e: PnnoError) -> LiftError {
    wrap(Kind::Pnno, e.is_internal(), e)
}

/// Chosen structure on one category; absent kinds are `None`.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct Structures {
    pub terminal: Option<TerminalW>,
    pub products: Option<ChosenBinProducts>,
    pub equalizers: Option<ChosenEqualizers>,
    pub pullbacks: Option<ChosenPullbacks>,
    pub exponentials: Option<ChosenExponentials>,
    pub classifier: Option<SubobjectClassifierW>,
    pub pnno: Option<PNNOW>,
}

impl Structures {
    pub fn has(&self, kind: Kind) -> bool {
        match kind {
            Kind::Terminal => self.terminal.is_some(),
            Kind::Products => self.products.is_some(),
            Kind::Equalizers => self.equalizers.is_some(),
            Kind::Pullbacks => self.pullbacks.is_some(),
            Kind::Exponentials => self.exponentials.is_some(),
            Kind::Classifier => self.classifier.is_some(),
            Kind::Pnno => self.pnno.is_some(),
        }
    }

    pub fn kinds(&self) -> Vec<Kind> {
        Kind::ALL.into_iter().filter(|&k| self.has(k)).collect()
    }

    /// Only the listed kinds.
    pub fn restrict(&self, kinds: &[Kind]) -> Structures {
        let keep = |k: Kind| kinds.contains(&k);
        Structures {
            terminal: self.terminal.filter(|_| keep(Kind::Terminal)),
            products: self.products.clone().filter(|_| keep(Kind::Products)),
            equalizers: self.equalizers.clone().filter(|_| keep(Kind::Equalizers)),
            pullbacks: self.pullbacks.clone().filter(|_| keep(Kind::Pullbacks)),
            exponentials: self.exponentials.clone().filter(|_| keep(Kind::Exponentials)),
            classifier: self.classifier.clone().filter(|_| keep(Kind::Classifier)),
            pnno: self.pnno.filter(|_| keep(Kind::Pnno)),
        }
    }

    /// Exhaustive search for every listed kind (and its dependencies).
    /// Limit tables must be total.
    pub fn find(c: &FinCat, kinds: &[Kind]) -> Result<Structures, LiftError> {
        let mut wanted: Vec<Kind> = kinds.iter().flat_map(|k| k.dependencies().iter().chain([k])).copied().collect();
        wanted.sort();
        wanted.dedup();
        let mut s = Structures::default();
        let not_found = |kind, detail: String| LiftError::NotFound { kind, detail };
        let obj = |x: crate::fincat::ObjId| c.object_label(x).to_string();
        let mor = |m: crate::fincat::MorId| c.label(m).to_string();
        for kind in wanted {
            match kind {
                Kind::Terminal => {
                    s.terminal = Some(find_terminal(c).ok_or_else(|| not_found(kind, "no terminal object".into()))?)
                }
                Kind::Products => {
                    s.products = Some(find_all(c).map_err(|(a, b)| {
                        not_found(kind, format!("no product of `{}` and `{}`", obj(a), obj(b)))
                    })?)
                }
                Kind::Equalizers => {
                    s.equalizers = Some(find_all(c).map_err(|(f, g)| {
                        not_found(kind, format!("no equalizer of `{}` and `{}`", mor(f), mor(g)))
                    })?)
                }
                Kind::Pullbacks => {
                    s.pullbacks = Some(find_all(c).map_err(|(f, g)| {
                        not_found(kind, format!("no pullback of `{}` and `{}`", mor(f), mor(g)))
                    })?)
                }
                Kind::Exponentials => {
                    let prods = s.products.as_ref().expect("dependency first");
                    s.exponentials = Some(find_exponentials(c, prods).map_err(|(a, b)| {
                        not_found(kind, format!("no exponential with base `{}` and target `{}`", obj(a), obj(b)))
                    })?)
                }
                Kind::Classifier => {
                    let term = s.terminal.expect("dependency first");
                    s.classifier = Some(
                        find_subobject_classifier(c, term)
                            .ok_or_else(|| not_found(kind, "no subobject classifier".into()))?,
                    )
                }
                Kind::Pnno => {
                    let ctx = PnnoContext {
                        term: s.terminal.expect("dependency first"),
                        prods: s.products.as_ref().expect("dependency first"),
                    };
                    s.pnno = Some(find_pnno(c, ctx).ok_or_else(|| {
                        not_found(kind, "no parameterized natural numbers object".into())
                    })?)
                }
            }
        }
        Ok(s)
    }

    /// Checks every present witness against its universal property.
    pub fn check(&self, c: &FinCat) -> Result<(), LiftError> {
        for kind in self.kinds() {
            check_kind(kind, c, self)?;
        }
        Ok(())
    }
}

/// Preservation certificates of one functor.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct PreservationCerts {
    pub terminal: Option<PreservationCert<TerminalW>>,
    pub products: Option<ProductPreservationCert>,
    pub equalizers: Option<PreservationCert<EqualizerW>>,
    pub pullbacks: Option<PreservationCert<PullbackW>>,
    pub exponentials: Option<ExpPreservationCert>,
    pub classifier: Option<OmegaPreservationCert>,
    pub pnno: Option<PNNOPreservationCert>,
}

impl PreservationCerts {
    pub fn has(&self, kind: Kind) -> bool {
        match kind {
            Kind::Terminal => self.terminal.is_some(),
            Kind::Products => self.products.is_some(),
            Kind::Equalizers => self.equalizers.is_some(),
            Kind::Pullbacks => self.pullbacks.is_some(),
            Kind::Exponentials => self.exponentials.is_some(),
            Kind::Classifier => self.classifier.is_some(),
            Kind::Pnno => self.pnno.is_some(),
        }
    }

    pub fn kinds(&self) -> Vec<Kind> {
        Kind::ALL.into_iter().filter(|&k| self.has(k)).collect()
    }
}

/// The three categories of a lifting problem `G: C → D`, `F: C → E`,
/// `H: D → E`.
#[derive(Clone, Copy)]
pub struct Triple<'a> {
    pub c: &'a Structures,
    pub d: &'a Structures,
    pub e: &'a Structures,
}

/// One structure kind: checking, transfer along a weak equivalence, the
/// direct preservation decision, and lifting preservation to a factor.
pub trait StructureKind {
    const KIND: Kind;

    fn check(c: &FinCat, s: &Structures) -> Result<(), LiftError>;

    /// Writes the transferred witness into `dst` and `G`'s certificate into
    /// `certs`. Dependencies are already transferred.
    fn transfer(
        g: &WeakEquivalenceCert,
        src: &Structures,
        dst: &mut Structures,
        certs: &mut PreservationCerts,
    ) -> Result<(), LiftError>;

    fn preserves(
        f: &Functor,
        src: &Structures,
        dst: &Structures,
        certs: &mut PreservationCerts,
    ) -> Result<(), LiftError>;

    fn lift_preservation(
        input: &LiftInput,
        s: Triple,
        g_certs: &PreservationCerts,
        f_certs: &PreservationCerts,
        h_certs: &mut PreservationCerts,
    ) -> Result<(), LiftError>;
}

/// Where a limit shape lives inside the bundles.
pub trait LimitSlot: LimitShape {
    const KIND: Kind;
    fn get(s: &Structures) -> Option<Chosen<Self>>;
    fn put(s: &mut Structures, chosen: Chosen<Self>);
    fn cert(p: &PreservationCerts) -> Option<&PreservationCert<Self>>;
    fn put_cert(p: &mut PreservationCerts, cert: PreservationCert<Self>);
}

impl LimitSlot for TerminalW {
    const KIND: Kind = Kind::Terminal;

    fn get(s: &Structures) -> Option<Chosen<Self>> {
        s.terminal.map(|t| {
            let mut c = Chosen::default();
            c.insert(t);
            c
        })
    }

    fn put(s: &mut Structures, chosen: Chosen<Self>) {
        s.terminal = chosen.get(()).copied();
    }

    fn cert(p: &PreservationCerts) -> Option<&PreservationCert<Self>> {
        p.terminal.as_ref()
    }

    fn put_cert(p: &mut PreservationCerts, cert: PreservationCert<Self>) {
        p.terminal = Some(cert);
    }
}

macro_rules! table_slot {
    ($shape:ty, $kind:expr, $field:ident) => {
        impl LimitSlot for $shape {
            const KIND: Kind = $kind;

            fn get(s: &Structures) -> Option<Chosen<Self>> {
                s.$field.clone()
            }

            fn put(s: &mut Structures, chosen: Chosen<Self>) {
                s.$field = Some(chosen);
            }

            fn cert(p: &PreservationCerts) -> Option<&PreservationCert<Self>> {
                p.$field.as_ref()
            }

            fn put_cert(p: &mut PreservationCerts, cert: PreservationCert<Self>) {
                p.$field = Some(cert);
            }
        }
    };
}

table_slot!(BinProductW, Kind::Products, products);
table_slot!(EqualizerW, Kind::Equalizers, equalizers);
table_slot!(PullbackW, Kind::Pullbacks, pullbacks);

pub struct LimitKind<S>(std::marker::PhantomData<S>);

fn require<T>(kind: Kind, v: Option<T>) -> Result<T, LiftError> {
    v.ok_or(LiftError::MissingWitness { kind })
}

impl<S: LimitSlot> StructureKind for LimitKind<S> {
    const KIND: Kind = S::KIND;

    fn check(c: &FinCat, s: &Structures) -> Result<(), LiftError> {
        let chosen = require(S::KIND, S::get(s))?;
        if let Some(key) = chosen.first_invalid(c) {
            return Err(LiftError::InvalidWitness {
                kind: S::KIND,
                detail: format!("entry {key:?} is not a {}", S::NAME),
            });
        }
        Ok(())
    }

    fn transfer(
        g: &WeakEquivalenceCert,
        src: &Structures,
        dst: &mut Structures,
        certs: &mut PreservationCerts,
    ) -> Result<(), LiftError> {
        let chosen = require(S::KIND, S::get(src))?;
        let (out, cert) = limits::transfer(g, &chosen).map_err(from_limit(S::KIND))?;
        S::put(dst, out);
        S::put_cert(certs, cert);
        Ok(())
    }

    fn preserves(
        f: &Functor,
        src: &Structures,
        dst: &Structures,
        certs: &mut PreservationCerts,
    ) -> Result<(), LiftError> {
        let (a, b) = (require(S::KIND, S::get(src))?, require(S::KIND, S::get(dst))?);
        let cert = limits::preserves(f, &a, &b).map_err(|e| LiftError::NotPreserved {
            kind: S::KIND,
            detail: format!("image of {} at {} is not a limit", S::NAME, e.key),
        })?;
        S::put_cert(certs, cert);
        Ok(())
    }

    fn lift_preservation(
        input: &LiftInput,
        s: Triple,
        _: &PreservationCerts,
        f_certs: &PreservationCerts,
        h_certs: &mut PreservationCerts,
    ) -> Result<(), LiftError> {
        let k = S::KIND;
        let (c, d, e) = (require(k, S::get(s.c))?, require(k, S::get(s.d))?, require(k, S::get(s.e))?);
        let f_cert = require(k, S::cert(f_certs))?;
        let cert = lift_preservation(input, &c, &d, &e, f_cert).map_err(from_limit(k))?;
        S::put_cert(h_certs, cert);
        Ok(())
    }
}

pub struct ExponentialsKind;

fn exp_ctx(s: &Structures) -> Result<ExpContext<'_>, LiftError> {
    Ok(ExpContext {
        prods: require(Kind::Products, s.products.as_ref())?,
        exps: require(Kind::Exponentials, s.exponentials.as_ref())?,
    })
}

impl StructureKind for ExponentialsKind {
    const KIND: Kind = Kind::Exponentials;

    fn check(c: &FinCat, s: &Structures) -> Result<(), LiftError> {
        let ctx = exp_ctx(s)?;
        if let Some((x, y)) = ctx.exps.first_invalid(c, ctx.prods) {
            return Err(LiftError::InvalidWitness {
                kind: Self::KIND,
                detail: format!(
                    "exponential with base `{}` and target `{}`",
                    c.object_label(x),
                    c.object_label(y)
                ),
            });
        }
        Ok(())
    }

    fn transfer(
        g: &WeakEquivalenceCert,
        src: &Structures,
        dst: &mut Structures,
        certs: &mut PreservationCerts,
    ) -> Result<(), LiftError> {
        let ctx = exp_ctx(src)?;
        let dst_prods = require(Kind::Products, dst.products.as_ref())?;
        let mu = require(Kind::Products, certs.products.as_ref())?;
        let (exps, cert) = transfer_exponentials(g, ctx, dst_prods, mu).map_err(from_exp)?;
        dst.exponentials = Some(exps);
        certs.exponentials = Some(cert);
        Ok(())
    }

    fn preserves(
        f: &Functor,
        src: &Structures,
        dst: &Structures,
        certs: &mut PreservationCerts,
    ) -> Result<(), LiftError> {
        let mu = require(Kind::Products, certs.products.as_ref())?;
        let cert = preserves_exponentials(f, exp_ctx(src)?, exp_ctx(dst)?, mu).map_err(from_exp)?;
        certs.exponentials = Some(cert);
        Ok(())
    }

    fn lift_preservation(
        input: &LiftInput,
        s: Triple,
        g_certs: &PreservationCerts,
        f_certs: &PreservationCerts,
        h_certs: &mut PreservationCerts,
    ) -> Result<(), LiftError> {
        let mu_g = require(Kind::Products, g_certs.products.as_ref())?;
        let mu_h = require(Kind::Products, h_certs.products.as_ref())?;
        let f_cert = require(Kind::Exponentials, f_certs.exponentials.as_ref())?;
        let cert = lift_preservation_exponentials(input, exp_ctx(s.c)?, exp_ctx(s.d)?, exp_ctx(s.e)?, mu_g, mu_h, f_cert)
            .map_err(from_exp)?;
        h_certs.exponentials = Some(cert);
        Ok(())
    }
}

pub struct ClassifierKind;

fn omega_ctx(s: &Structures) -> Result<OmegaContext<'_>, LiftError> {
    Ok(OmegaContext {
        term: require(Kind::Terminal, s.terminal)?,
        soc: require(Kind::Classifier, s.classifier.as_ref())?,
    })
}

impl StructureKind for ClassifierKind {
    const KIND: Kind = Kind::Classifier;

    fn check(c: &FinCat, s: &Structures) -> Result<(), LiftError> {
        let ctx = omega_ctx(s)?;
        let found = is_subobject_classifier(c, ctx.term, ctx.soc.omega, ctx.soc.tau).map_err(|e| {
            LiftError::InvalidWitness {
                kind: Self::KIND,
                detail: e.to_string(),
            }
        })?;
        if found.chi != ctx.soc.chi {
            return Err(LiftError::InvalidWitness {
                kind: Self::KIND,
                detail: "classifying-map table differs from the unique classifying maps".into(),
            });
        }
        Ok(())
    }

    fn transfer(
        g: &WeakEquivalenceCert,
        src: &Structures,
        dst: &mut Structures,
        certs: &mut PreservationCerts,
    ) -> Result<(), LiftError> {
        let ctx = omega_ctx(src)?;
        let term_d = require(Kind::Terminal, dst.terminal)?;
        let (soc, cert) = transfer_subobject_classifier(g, ctx.term, ctx.soc, term_d).map_err(from_classifier)?;
        dst.classifier = Some(soc);
        certs.classifier = Some(cert);
        Ok(())
    }

    fn preserves(
        f: &Functor,
        src: &Structures,
        dst: &Structures,
        certs: &mut PreservationCerts,
    ) -> Result<(), LiftError> {
        let (a, b) = (omega_ctx(src)?, omega_ctx(dst)?);
        let cert = preserves_subobject_classifier(f, a.term, a.soc, b.term, b.soc).map_err(from_classifier)?;
        certs.classifier = Some(cert);
        Ok(())
    }

    fn lift_preservation(
        input: &LiftInput,
        s: Triple,
        _: &PreservationCerts,
        f_certs: &PreservationCerts,
        h_certs: &mut PreservationCerts,
    ) -> Result<(), LiftError> {
        let f_cert = require(Kind::Classifier, f_certs.classifier.as_ref())?;
        let cert = lift_preservation_subobject_classifier(input, omega_ctx(s.c)?, omega_ctx(s.d)?, omega_ctx(s.e)?, f_cert)
            .map_err(from_classifier)?;
        h_certs.classifier = Some(cert);
        Ok(())
    }
}

pub struct PnnoKind;

fn pnno_ctx(s: &Structures) -> Result<(PnnoContext<'_>, &PNNOW), LiftError> {
    Ok((
        PnnoContext {
            term: require(Kind::Terminal, s.terminal)?,
            prods: require(Kind::Products, s.products.as_ref())?,
        },
        require(Kind::Pnno, s.pnno.as_ref())?,
    ))
}

impl StructureKind for PnnoKind {
    const KIND: Kind = Kind::Pnno;

    fn check(c: &FinCat, s: &Structures) -> Result<(), LiftError> {
        let (ctx, w) = pnno_ctx(s)?;
        is_pnno(c, ctx, *w).map(|_| ()).map_err(|e| LiftError::InvalidWitness {
            kind: Self::KIND,
            detail: e.to_string(),
        })
    }

    fn transfer(
        g: &WeakEquivalenceCert,
        src: &Structures,
        dst: &mut Structures,
        certs: &mut PreservationCerts,
    ) -> Result<(), LiftError> {
        let (ctx, w) = pnno_ctx(src)?;
        let dctx = PnnoContext {
            term: require(Kind::Terminal, dst.terminal)?,
            prods: require(Kind::Products, dst.products.as_ref())?,
        };
        let (out, cert) = transfer_pnno(g, ctx, w, dctx).map_err(from_pnno)?;
        dst.pnno = Some(out);
        certs.pnno = Some(cert);
        Ok(())
    }

    fn preserves(
        f: &Functor,
        src: &Structures,
        dst: &Structures,
        certs: &mut PreservationCerts,
    ) -> Result<(), LiftError> {
        let ((a, wa), (b, wb)) = (pnno_ctx(src)?, pnno_ctx(dst)?);
        let cert = preserves_pnno(f, a, wa, b, wb).map_err(from_pnno)?;
        certs.pnno = Some(cert);
        Ok(())
    }

    fn lift_preservation(
        input: &LiftInput,
        s: Triple,
        g_certs: &PreservationCerts,
        f_certs: &PreservationCerts,
        h_certs: &mut PreservationCerts,
    ) -> Result<(), LiftError> {
        let g_cert = require(Kind::Pnno, g_certs.pnno.as_ref())?;
        let f_cert = require(Kind::Pnno, f_certs.pnno.as_ref())?;
        let cert = lift_preservation_pnno(input, pnno_ctx(s.c)?, pnno_ctx(s.d)?, pnno_ctx(s.e)?, g_cert, f_cert)
            .map_err(from_pnno)?;
        h_certs.pnno = Some(cert);
        Ok(())
    }
}

fn check_kind(kind: Kind, c: &FinCat, s: &Structures) -> Result<(), LiftError> {
    match kind {
        Kind::Terminal => LimitKind::<TerminalW>::check(c, s),
        Kind::Products => LimitKind::<BinProductW>::check(c, s),
        Kind::Equalizers => LimitKind::<EqualizerW>::check(c, s),
        Kind::Pullbacks => LimitKind::<PullbackW>::check(c, s),
        Kind::Exponentials => ExponentialsKind::check(c, s),
        Kind::Classifier => ClassifierKind::check(c, s),
        Kind::Pnno => PnnoKind::check(c, s),
    }
}

fn transfer_kind(
    kind: Kind,
    g: &WeakEquivalenceCert,
    src: &Structures,
    dst: &mut Structures,
    certs: &mut PreservationCerts,
) -> Result<(), LiftError> {
    match kind {
        Kind::Terminal => LimitKind::<TerminalW>::transfer(g, src, dst, certs),
        Kind::Products => LimitKind::<BinProductW>::transfer(g, src, dst, certs),
        Kind::Equalizers => LimitKind::<EqualizerW>::transfer(g, src, dst, certs),
        Kind::Pullbacks => LimitKind::<PullbackW>::transfer(g, src, dst, certs),
        Kind::Exponentials => ExponentialsKind::transfer(g, src, dst, certs),
        Kind::Classifier => ClassifierKind::transfer(g, src, dst, certs),
        Kind::Pnno => PnnoKind::transfer(g, src, dst, certs),
    }
}

fn preserves_kind(
    kind: Kind,
    f: &Functor,
    src: &Structures,
    dst: &Structures,
    certs: &mut PreservationCerts,
) -> Result<(), LiftError> {
    match kind {
        Kind::Terminal => LimitKind::<TerminalW>::preserves(f, src, dst, certs),
        Kind::Products => LimitKind::<BinProductW>::preserves(f, src, dst, certs),
        Kind::Equalizers => LimitKind::<EqualizerW>::preserves(f, src, dst, certs),
        Kind::Pullbacks => LimitKind::<PullbackW>::preserves(f, src, dst, certs),
        Kind::Exponentials => ExponentialsKind::preserves(f, src, dst, certs),
        Kind::Classifier => ClassifierKind::preserves(f, src, dst, certs),
        Kind::Pnno => PnnoKind::preserves(f, src, dst, certs),
    }
}

fn lift_kind(
    kind: Kind,
    input: &LiftInput,
    s: Triple,
    g_certs: &PreservationCerts,
    f_certs: &PreservationCerts,
    h_certs: &mut PreservationCerts,
) -> Result<(), LiftError> {
    match kind {
        Kind::Terminal => LimitKind::<TerminalW>::lift_preservation(input, s, g_certs, f_certs, h_certs),
        Kind::Products => LimitKind::<BinProductW>::lift_preservation(input, s, g_certs, f_certs, h_certs),
        Kind::Equalizers => LimitKind::<EqualizerW>::lift_preservation(input, s, g_certs, f_certs, h_certs),
        Kind::Pullbacks => LimitKind::<PullbackW>::lift_preservation(input, s, g_certs, f_certs, h_certs),
        Kind::Exponentials => ExponentialsKind::lift_preservation(input, s, g_certs, f_certs, h_certs),
        Kind::Classifier => ClassifierKind::lift_preservation(input, s, g_certs, f_certs, h_certs),
        Kind::Pnno => PnnoKind::lift_preservation(input, s, g_certs, f_certs, h_certs),
    }
}

/// Sorted, deduplicated, and with every dependency present.
fn ordered(kinds: &[Kind]) -> Result<Vec<Kind>, LiftError> {
    let mut ks = kinds.to_vec();
    ks.sort();
    ks.dedup();
    for &k in &ks {
        if let Some(&needs) = k.dependencies().iter().find(|d| !ks.contains(d)) {
            return Err(LiftError::DependencyMissing { kind: k, needs });
        }
    }
    Ok(ks)
}

/// Transfers the listed kinds along any weak equivalence.
pub fn transfer_structures(
    g: &WeakEquivalenceCert,
    kinds: &[Kind],
    src: &Structures,
) -> Result<(Structures, PreservationCerts), LiftError> {
    let ks = ordered(kinds)?;
    let mut dst = Structures::default();
    let mut certs = PreservationCerts::default();
    for k in ks {
        transfer_kind(k, g, src, &mut dst, &mut certs)?;
    }
    Ok((dst, certs))
}

/// Direct preservation decision for every listed kind.
pub fn preserves_structures(
    f: &Functor,
    kinds: &[Kind],
    src: &Structures,
    dst: &Structures,
) -> Result<PreservationCerts, LiftError> {
    let ks = ordered(kinds)?;
    let mut certs = PreservationCerts::default();
    for k in ks {
        preserves_kind(k, f, src, dst, &mut certs)?;
    }
    Ok(certs)
}

/// Lifts `F`'s certificates to `H` for every listed kind.
pub fn lift_structures(
    input: &LiftInput,
    kinds: &[Kind],
    s: Triple,
    g_certs: &PreservationCerts,
    f_certs: &PreservationCerts,
) -> Result<PreservationCerts, LiftError> {
    let ks = ordered(kinds)?;
    let mut h_certs = PreservationCerts::default();
    for k in ks {
        lift_kind(k, input, s, g_certs, f_certs, &mut h_certs)?;
    }
    Ok(h_certs)
}

#[derive(Clone, Debug)]
pub struct StructuredCompletion {
    pub completion: CompletionResult,
    pub kinds: Vec<Kind>,
    /// The witnesses on the original category.
    pub source: Structures,
    pub structures: Structures,
    pub eta_certs: PreservationCerts,
}

/// Skeletize, then transfer every listed kind along `η` in dependency order.
pub fn complete_structured(
    c: &Arc<FinCat>,
    kinds: &[Kind],
    witnesses: &Structures,
) -> Result<StructuredCompletion, LiftError> {
    let ks = ordered(kinds)?;
    for &k in &ks {
        if !witnesses.has(k) {
            return Err(LiftError::MissingWitness { kind: k });
        }
        check_kind(k, c, witnesses)?;
    }
    let completion = skeletize(c);
    let (structures, eta_certs) = transfer_structures(&completion.cert, &ks, witnesses)?;
    Ok(StructuredCompletion {
        completion,
        source: witnesses.restrict(&ks),
        kinds: ks,
        structures,
        eta_certs,
    })
}

/// Factors a structured functor `F` through the completion and lifts its
/// certificates to `H`. `f_certs` must agree with the direct check.
pub fn factor_structured(
    sc: &StructuredCompletion,
    f: &Functor,
    target: &Structures,
    f_certs: &PreservationCerts,
) -> Result<(Factorization, PreservationCerts), LiftError> {
    let direct = preserves_structures(f, &sc.kinds, &sc.source, target)?;
    for k in &sc.kinds {
        if !f_certs.has(*k) {
            return Err(LiftError::MissingWitness { kind: *k });
        }
    }
    if direct != restrict_certs(f_certs, &sc.kinds) {
        let kind = sc
            .kinds
            .iter()
            .copied()
            .find(|&k| restrict_certs(&direct, &[k]) != restrict_certs(f_certs, &[k]))
            .unwrap_or(Kind::Terminal);
        return Err(LiftError::InvalidWitness {
            kind,
            detail: "functor certificate disagrees with the direct check".into(),
        });
    }
    let fac = factor_through(&sc.completion, f)?;
    let input = LiftInput {
        g: &sc.completion.cert,
        f,
        h: &fac.h,
        alpha: &fac.alpha,
    };
    let h_certs = lift_structures(
        &input,
        &sc.kinds,
        Triple {
            c: &sc.source,
            d: &sc.structures,
            e: target,
        },
        &sc.eta_certs,
        f_certs,
    )?;
    Ok((fac, h_certs))
}

fn restrict_certs(p: &PreservationCerts, kinds: &[Kind]) -> PreservationCerts {
    let keep = |k: Kind| kinds.contains(&k);
    PreservationCerts {
        terminal: p.terminal.clone().filter(|_| keep(Kind::Terminal)),
        products: p.products.clone().filter(|_| keep(Kind::Products)),
        equalizers: p.equalizers.clone().filter(|_| keep(Kind::Equalizers)),
        pullbacks: p.pullbacks.clone().filter(|_| keep(Kind::Pullbacks)),
        exponentials: p.exponentials.clone().filter(|_| keep(Kind::Exponentials)),
        classifier: p.classifier.clone().filter(|_| keep(Kind::Classifier)),
        pnno: p.pnno.clone().filter(|_| keep(Kind::Pnno)),
    }
}

/// Finite limits, exponentials and a subobject classifier.
#[derive(Clone, Debug, PartialEq)]
pub struct ToposW {
    pub terminal: TerminalW,
    pub products: ChosenBinProducts,
    pub equalizers: ChosenEqualizers,
    pub pullbacks: ChosenPullbacks,
    pub exponentials: ChosenExponentials,
    pub classifier: SubobjectClassifierW,
}

impl ToposW {
    pub fn structures(&self) -> Structures {
        Structures {
            terminal: Some(self.terminal),
            products: Some(self.products.clone()),
            equalizers: Some(self.equalizers.clone()),
            pullbacks: Some(self.pullbacks.clone()),
            exponentials: Some(self.exponentials.clone()),
            classifier: Some(self.classifier.clone()),
            pnno: None,
        }
    }

    pub fn from_structures(s: &Structures) -> Option<ToposW> {
        Some(ToposW {
            terminal: s.terminal?,
            products: s.products.clone()?,
            equalizers: s.equalizers.clone()?,
            pullbacks: s.pullbacks.clone()?,
            exponentials: s.exponentials.clone()?,
            classifier: s.classifier.clone()?,
        })
    }
}

/// Runs every finder; the error names the first missing component.
pub fn assemble_topos(c: &FinCat) -> Result<ToposW, LiftError> {
    let s = Structures::find(c, &Kind::TOPOS)?;
    Ok(ToposW::from_structures(&s).expect("all components found"))
}

/// All six preservation certificates.
pub fn is_logical_functor(f: &Functor, src: &ToposW, dst: &ToposW) -> Result<PreservationCerts, LiftError> {
    preserves_structures(f, &Kind::TOPOS, &src.structures(), &dst.structures())
}

/// A topos together with a pNNO.
#[derive(Clone, Debug, PartialEq)]
pub struct WToposReport {
    pub topos: ToposW,
    pub pnno: PNNOW,
}

pub fn assemble_w_topos(c: &FinCat) -> Result<WToposReport, LiftError> {
    let s = Structures::find(c, &Kind::ALL)?;
    Ok(WToposReport {
        topos: ToposW::from_structures(&s).expect("all components found"),
        pnno: s.pnno.expect("found"),
    })
}
