use std::fs;
use std::path::Path;
use std::sync::Arc;

use catkit::completion::{skeletality, skeletize, validate_factorization, CompletionError, CompletionResult};
use catkit::fincat::{iso_classes, FinCat};
use catkit::format::{category_to_raw, functor_to_raw, parse_category, validate_category, validate_functor, RawFunctor};
use catkit::functor::Functor;
use catkit::generators::{
    delooping, finset_fragment, karoubi_envelope, kleisli, preorder_closure, setoid_groupoid, walking_iso,
    FiniteHeytingAlgebra, MonadW,
};
use catkit::lifting::{
    complete_structured, factor_structured, preserves_structures, Kind, LiftError, Structures,
};
use catkit::structure::{certs_to_json, parse_structures, structures_to_json};
use serde_json::{json, Value};

use crate::report::{CliError, RunReport, Status};

pub const DEFAULT_MAX_SEARCH: u64 = 10_000_000;

pub const DEMOS: [&str; 6] = ["walking-iso", "preorder", "setoid", "finset-omega", "heyting-chain", "karoubi"];

pub struct Loaded {
    pub category: Arc<FinCat>,
    pub block: Option<Value>,
}

fn read(path: &Path) -> Result<String, CliError> {
    fs::read_to_string(path).map_err(|source| CliError::Io {
        path: path.to_path_buf(),
        source,
    })
}

pub fn write_out(path: &Path, contents: &str) -> Result<(), CliError> {
    fs::write(path, contents).map_err(|source| CliError::Io {
        path: path.to_path_buf(),
        source,
    })
}

pub fn load_category(path: &Path) -> Result<Loaded, CliError> {
    let text = read(path)?;
    let raw = parse_category(&text).map_err(|e| CliError::Parse {
        path: path.to_path_buf(),
        message: e.to_string(),
    })?;
    let c = validate_category(&raw).map_err(|e| CliError::validation(e.to_string(), e.pointer().to_string()))?;
    Ok(Loaded {
        category: Arc::new(c),
        block: raw.structure,
    })
}

fn load_functor(path: &Path, source: &Arc<FinCat>, target: &Arc<FinCat>) -> Result<Functor, CliError> {
    let text = read(path)?;
    let raw: RawFunctor = serde_json::from_str(&text).map_err(|e| CliError::Parse {
        path: path.to_path_buf(),
        message: e.to_string(),
    })?;
    validate_functor(&raw, source, target).map_err(|e| CliError::validation(e.to_string(), None))
}

fn block_structures(loaded: &Loaded) -> Result<Option<Structures>, CliError> {
    let Some(block) = &loaded.block else {
        return Ok(None);
    };
    let s = parse_structures(&loaded.category, block)
        .map_err(|e| CliError::validation(e.to_string(), e.pointer().to_string()))?;
    s.check(&loaded.category).map_err(lift_error)?;
    Ok(Some(s))
}

pub fn lift_error(e: LiftError) -> CliError {
    match e {
        LiftError::MissingWitness { .. } | LiftError::NotFound { .. } => CliError::Absent(e.to_string()),
        LiftError::Internal { .. } => CliError::Internal(e.to_string()),
        LiftError::Completion(ref c) => completion_error(c.clone()),
        _ => CliError::validation(e.to_string(), None),
    }
}

fn completion_error(e: CompletionError) -> CliError {
    match e {
        CompletionError::InvalidFactorization(_) => CliError::Internal(e.to_string()),
        _ => CliError::validation(e.to_string(), None),
    }
}

/// Rough count of candidate checks a search for `kinds` performs.
pub fn search_estimate(c: &FinCat, kinds: &[Kind]) -> u64 {
    let n = c.object_count() as u64;
    let m = c.morphism_count() as u64;
    let h = c
        .object_ids()
        .flat_map(|x| c.object_ids().map(move |y| (x, y)))
        .map(|(x, y)| c.hom(x, y).len() as u64)
        .max()
        .unwrap_or(0);
    kinds
        .iter()
        .map(|k| match k {
            Kind::Terminal => n * n,
            Kind::Products => n * n * n * h * h * n,
            Kind::Equalizers => m * m * m * n,
            Kind::Pullbacks => m * m * m * m * n,
            Kind::Exponentials => n * n * n * h * n,
            Kind::Classifier => n * m * m * m,
            Kind::Pnno => n * m * m * m * m,
        })
        .fold(0u64, u64::saturating_add)
}

pub fn guard(c: &FinCat, kinds: &[Kind], cap: u64) -> Result<(), CliError> {
    let est = search_estimate(c, kinds);
    if est > cap {
        return Err(CliError::Absent(format!(
            "search for {} would need about {est} candidate checks, over the cap of {cap} (CATKIT_MAX_SEARCH)",
            kinds.iter().map(|k| k.name()).collect::<Vec<_>>().join(",")
        )));
    }
    Ok(())
}

fn summary(c: &FinCat) -> Value {
    let sk = skeletality(c);
    json!({
        "name": c.name(),
        "objects": c.object_count(),
        "morphisms": c.morphism_count(),
        "iso_classes": iso_classes(c).len(),
        "skeletal": sk.is_skeletal,
        "gaunt": sk.is_gaunt,
    })
}

fn category_json(c: &FinCat, s: Option<&Structures>) -> Value {
    let mut raw = category_to_raw(c);
    raw.structure = s.map(|s| structures_to_json(c, s));
    serde_json::to_value(raw).expect("plain data")
}

pub fn validate(path: &Path, report: &mut RunReport) -> Result<(), CliError> {
    let loaded = load_category(path)?;
    report.pass("category laws");
    if let Some(s) = block_structures(&loaded)? {
        for k in s.kinds() {
            report.pass(format!("structure {k}"));
        }
    }
    report.payload = summary(&loaded.category);
    Ok(())
}

pub fn analyze(path: &Path, kinds: &[Kind], cap: u64, report: &mut RunReport) -> Result<(), CliError> {
    let loaded = load_category(path)?;
    let c = &loaded.category;
    guard(c, kinds, cap)?;
    let mut found = Structures::default();
    let mut absent = Vec::new();
    for &k in kinds {
        match Structures::find(c, &[k]) {
            Ok(s) => {
                merge(&mut found, &s.restrict(&[k]));
                report.check(k.name(), Status::Pass, detail(c, &s, k));
            }
            Err(e @ LiftError::NotFound { .. }) => {
                report.check(k.name(), Status::Absent, e.to_string());
                absent.push(k.name());
            }
            Err(e) => return Err(lift_error(e)),
        }
    }
    report.payload = json!({
        "summary": summary(c),
        "structure": structures_to_json(c, &found),
    });
    if !absent.is_empty() {
        return Err(CliError::Absent(format!("absent: {}", absent.join(", "))));
    }
    Ok(())
}

fn merge(into: &mut Structures, s: &Structures) {
    into.terminal = into.terminal.or(s.terminal);
    into.products = into.products.take().or_else(|| s.products.clone());
    into.equalizers = into.equalizers.take().or_else(|| s.equalizers.clone());
    into.pullbacks = into.pullbacks.take().or_else(|| s.pullbacks.clone());
    into.exponentials = into.exponentials.take().or_else(|| s.exponentials.clone());
    into.classifier = into.classifier.take().or_else(|| s.classifier.clone());
    into.pnno = into.pnno.or(s.pnno);
}

fn detail(c: &FinCat, s: &Structures, k: Kind) -> Option<String> {
    match k {
        Kind::Terminal => s.terminal.map(|t| format!("`{}`", c.object_label(t.t))),
        Kind::Classifier => s.classifier.as_ref().map(|w| {
            format!(
                "omega = `{}` with {} global elements",
                c.object_label(w.omega),
                s.terminal.map_or(0, |t| c.hom(t.t, w.omega).len())
            )
        }),
        Kind::Pnno => s.pnno.map(|w| format!("N = `{}`", c.object_label(w.n))),
        _ => None,
    }
}

fn completion_payload(cr: &CompletionResult, s: Option<&Structures>) -> Value {
    let (orig, done) = (cr.original(), &cr.completed);
    let reps: serde_json::Map<String, Value> = done
        .object_ids()
        .map(|y| {
            (
                done.object_label(y).to_string(),
                Value::String(orig.object_label(cr.representatives[y.0]).to_string()),
            )
        })
        .collect();
    json!({
        "completed": category_json(done, s),
        "eta": serde_json::to_value(functor_to_raw(&cr.eta)).expect("plain data"),
        "fidelity": cr.fidelity,
        "representatives": reps,
    })
}

pub fn complete(path: &Path, carry: bool, report: &mut RunReport) -> Result<Value, CliError> {
    let loaded = load_category(path)?;
    let c = &loaded.category;
    report.pass("category laws");
    let payload = if carry {
        let s = block_structures(&loaded)?
            .ok_or_else(|| CliError::Absent("no structure block to carry".into()))?;
        let kinds = s.kinds();
        let sc = complete_structured(c, &kinds, &s).map_err(lift_error)?;
        sc.structures.check(&sc.completion.completed).map_err(|e| CliError::Internal(e.to_string()))?;
        for k in &kinds {
            report.pass(format!("transfer {k}"));
        }
        let direct = preserves_structures(&sc.completion.eta, &kinds, &sc.source, &sc.structures)
            .map_err(|e| CliError::Internal(e.to_string()))?;
        if direct != sc.eta_certs {
            return Err(CliError::Internal("unit certificates disagree with the direct check".into()));
        }
        report.pass("unit preserves structure");
        let mut p = completion_payload(&sc.completion, Some(&sc.structures));
        p["eta_certs"] = certs_to_json(&sc.eta_certs);
        if let Some(w) = sc.completion.warning() {
            report.warnings.push(w.to_string());
        }
        p
    } else {
        let cr = skeletize(c);
        if let Some(w) = cr.warning() {
            report.warnings.push(w.to_string());
        }
        completion_payload(&cr, None)
    };
    report.pass("unit is a weak equivalence");
    Ok(payload)
}

pub struct FactorArgs<'a> {
    pub source: &'a Path,
    pub functor: &'a Path,
    pub target: &'a Path,
    pub kinds: &'a [Kind],
    pub cap: u64,
}

fn witnesses(loaded: &Loaded, kinds: &[Kind], cap: u64) -> Result<Structures, CliError> {
    let given = block_structures(loaded)?.unwrap_or_default();
    let missing: Vec<Kind> = kinds.iter().copied().filter(|&k| !given.has(k)).collect();
    if missing.is_empty() {
        return Ok(given.restrict(kinds));
    }
    guard(&loaded.category, &missing, cap)?;
    let found = Structures::find(&loaded.category, kinds).map_err(lift_error)?;
    // witnesses from the file win over searched ones
    let mut s = given.restrict(kinds);
    merge(&mut s, &found);
    s.check(&loaded.category).map_err(lift_error)?;
    Ok(s)
}

pub fn factor(args: FactorArgs, report: &mut RunReport) -> Result<Value, CliError> {
    let src = load_category(args.source)?;
    let tgt = load_category(args.target)?;
    let f = load_functor(args.functor, &src.category, &tgt.category)?;
    report.pass("functor laws");
    if !skeletality(&tgt.category).is_gaunt {
        report
            .warnings
            .push("target is not gaunt; the factorization is unique only up to non-unique isomorphism".into());
    }
    let kinds = args.kinds;
    let (s_c, s_e) = (witnesses(&src, kinds, args.cap)?, witnesses(&tgt, kinds, args.cap)?);
    let sc = complete_structured(&src.category, kinds, &s_c).map_err(lift_error)?;
    let f_certs = preserves_structures(&f, kinds, &sc.source, &s_e).map_err(lift_error)?;
    for k in kinds {
        report.pass(format!("functor preserves {k}"));
    }
    let (fac, h_certs) = factor_structured(&sc, &f, &s_e, &f_certs).map_err(lift_error)?;
    validate_factorization(&sc.completion.cert, &f, &fac).map_err(completion_error)?;
    report.pass("unit then factor is isomorphic to the functor");
    let direct = preserves_structures(&fac.h, kinds, &sc.structures, &s_e).map_err(|e| CliError::Internal(e.to_string()))?;
    if direct != h_certs {
        return Err(CliError::Internal("lifted certificates disagree with the direct check".into()));
    }
    for k in kinds {
        report.pass(format!("factor preserves {k}"));
    }
    let e = &**f.target();
    let alpha: serde_json::Map<String, Value> = src
        .category
        .object_ids()
        .map(|x| {
            (
                src.category.object_label(x).to_string(),
                Value::String(e.label(fac.alpha.component(x).fwd).to_string()),
            )
        })
        .collect();
    Ok(json!({
        "completed": category_json(&sc.completion.completed, Some(&sc.structures)),
        "h": serde_json::to_value(functor_to_raw(&fac.h)).expect("plain data"),
        "alpha": alpha,
        "h_certs": certs_to_json(&h_certs),
    }))
}

pub fn export_dot(path: &Path) -> Result<String, CliError> {
    let loaded = load_category(path)?;
    Ok(to_dot(&loaded.category))
}

fn quote(s: &str) -> String {
    format!("\"{}\"", s.replace('\\', "\\\\").replace('"', "\\\""))
}

pub fn to_dot(c: &FinCat) -> String {
    let classes = iso_classes(c);
    let mut out = format!("digraph {} {{\n", quote(c.name()));
    let mut reps: Vec<_> = c.object_ids().map(|x| classes.representative(x)).collect();
    reps.sort();
    reps.dedup();
    for (i, r) in reps.iter().enumerate() {
        out.push_str(&format!("  subgraph cluster_{i} {{\n"));
        for x in c.object_ids().filter(|&x| classes.representative(x) == *r) {
            out.push_str(&format!("    {};\n", quote(c.object_label(x))));
        }
        out.push_str("  }\n");
    }
    for f in c.morphism_ids().filter(|&f| !c.is_identity(f)) {
        out.push_str(&format!(
            "  {} -> {} [label={}];\n",
            quote(c.object_label(c.src(f))),
            quote(c.object_label(c.dst(f))),
            quote(c.label(f))
        ));
    }
    out.push_str("}\n");
    out
}

fn generator_error(e: impl std::fmt::Display) -> CliError {
    CliError::Internal(e.to_string())
}

pub fn demo(name: &str, report: &mut RunReport) -> Result<Value, CliError> {
    match name {
        "walking-iso" => {
            let c = Arc::new(walking_iso());
            let cr = skeletize(&c);
            let ok = cr.completed.object_count() == 1 && cr.completed.morphism_count() == 1;
            report.check("completion is the terminal category", status(ok), None);
            Ok(completion_payload(&cr, None))
        }
        "preorder" => {
            // 0 ~ 1 and 2 ~ 3 ~ 4 below 5
            let names = ["a", "b", "c", "d", "e", "f"];
            let c = Arc::new(
                preorder_closure(&names, &[(0, 1), (1, 0), (2, 3), (3, 4), (4, 2), (0, 2), (2, 5)])
                    .map_err(generator_error)?,
            );
            let cr = skeletize(&c);
            let sk = skeletality(&cr.completed);
            report.check("completion is a poset", status(sk.is_gaunt), None);
            report.check("three classes", status(cr.completed.object_count() == 3), None);
            Ok(completion_payload(&cr, None))
        }
        "setoid" => {
            let c = Arc::new(setoid_groupoid(5, &[(0, 1), (1, 2), (3, 4)]).map_err(generator_error)?);
            let cr = skeletize(&c);
            report.check("two objects", status(cr.completed.object_count() == 2), None);
            Ok(completion_payload(&cr, None))
        }
        "finset-omega" => {
            let fs = finset_fragment(3).map_err(generator_error)?;
            let c = &fs.category;
            let s = Structures::find(c, &[Kind::Classifier]).map_err(lift_error)?;
            let w = s.classifier.as_ref().expect("found");
            report.check(
                "omega is the 2-element set",
                status(fs.card(w.omega) == 2),
                format!("|omega| = {}", fs.card(w.omega)),
            );
            Ok(json!({ "structure": structures_to_json(c, &s) }))
        }
        "heyting-chain" => {
            let h = FiniteHeytingAlgebra::chain(3);
            let c = Arc::new(h.as_category());
            let (big, _) = catkit::completion::inflate(&c, &[2, 2, 2]).map_err(generator_error)?;
            let kinds = [Kind::Terminal, Kind::Products, Kind::Exponentials, Kind::Pnno];
            let s = Structures::find(&big, &kinds).map_err(lift_error)?;
            let sc = complete_structured(&big, &kinds, &s).map_err(lift_error)?;
            let ok = sc.structures.check(&sc.completion.completed).is_ok();
            report.check("transferred meets, implication and pNNO validate", status(ok), None);
            let mut p = completion_payload(&sc.completion, Some(&sc.structures));
            p["eta_certs"] = certs_to_json(&sc.eta_certs);
            Ok(p)
        }
        "karoubi" => {
            // {1, e} with e·e = e
            let c = Arc::new(delooping(&["1", "e"], &[vec![0, 1], vec![1, 1]]).map_err(generator_error)?);
            let (k, _) = karoubi_envelope(&c);
            let k = Arc::new(k);
            let split = catkit::generators::first_unsplit_idempotent(&k).is_none();
            report.check("every idempotent splits", status(split), None);
            let (_, embed) = kleisli(&MonadW::identity(&c)).map_err(generator_error)?;
            report.check("identity monad Kleisli category is isomorphic to its base", status(embed.is_isomorphism()), None);
            Ok(json!({ "karoubi": category_json(&k, None) }))
        }
        other => Err(CliError::validation(
            format!("unknown demo `{other}`; available: {}", DEMOS.join(", ")),
            None,
        )),
    }
}

fn status(ok: bool) -> Status {
    if ok {
        Status::Pass
    } else {
        Status::Fail
    }
}
