//! Command-line front end. Subcommands: `catalog` (list the fourteen
//! classes), `construct` (build an arrangement), `verify` (classify and
//! compare against the stored reference), `invariants` (certificate for a
//! pair), `deform` (sampled path checks), `emit` (JSON or SVG).
//!
//! Exit codes are a stable contract: 0 success, 1 verification failure,
//! 2 input error, 3 internal inconsistency. Errors print one line of JSON
//! to stderr: `{"error":{"code":N,"message":"..."}}`.
//!
//! All files are UTF-8 JSON. Exact coefficients appear as literals in the
//! grammar `a/b`, `sqrt(d)`, `i`, with `+ - * ( )`.

use std::fs;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use clap::{Parser, Subcommand};
use serde::{Deserialize, Serialize};
use serde_json::json;

use crate::catalog::{
    self, bitangent_lattice_vectors, parse_section_expr, CatalogError, Choice, CmbId,
};
use crate::deform::{
    beta_arrangement, beta_exceptional, check_deformation, DeformError, PathSpec, SampleOutcome,
    SampleReport,
};
use crate::invariants::{
    certify_arrangements, dihedral_dependence_test, plinth_curves, splitting_type_checked,
    Certificate, InvariantResult, InvariantsError, VERDICT_COMBINATORICS_DIFFER,
};
use crate::mw::{MordellWeil, MwError};
use crate::parse::{parse_rat, parse_tower_elem};
use crate::plane::{
    classify, curve_from_section, Arrangement, Combinatorics, CurveForm, PlaneCurve, PlaneError,
};
use crate::polyring::{BivarPoly, PolyError};
use crate::qtower::{rat, Rat, TowerElem};
use crate::surface::{Surface, SurfaceError, SurfaceParams};
use crate::svg::{self, Window};

pub const EXIT_OK: i32 = 0;
pub const EXIT_VERIFICATION: i32 = 1;
pub const EXIT_INPUT: i32 = 2;
pub const EXIT_INTERNAL: i32 = 3;

/// A command failure with its exit code. Verification mismatches are not
/// errors; commands report those through their JSON output and exit status.
#[derive(Debug)]
pub struct CliError {
    pub code: i32,
    pub message: String,
}

impl CliError {
    fn input(message: impl Into<String>) -> CliError {
        CliError { code: EXIT_INPUT, message: message.into() }
    }

    fn internal(message: impl Into<String>) -> CliError {
        CliError { code: EXIT_INTERNAL, message: message.into() }
    }
}

fn mw_code(e: &MwError) -> i32 {
    match e {
        MwError::Internal(_) => EXIT_INTERNAL,
        _ => EXIT_INPUT,
    }
}

fn plane_code(e: &PlaneError) -> i32 {
    match e {
        PlaneError::Internal(_) => EXIT_INTERNAL,
        PlaneError::Mw(m) => mw_code(m),
        _ => EXIT_INPUT,
    }
}

fn invariants_code(e: &InvariantsError) -> i32 {
    match e {
        InvariantsError::OracleDisagreement { .. } => EXIT_INTERNAL,
        InvariantsError::Plane(p) => plane_code(p),
        InvariantsError::Mw(m) => mw_code(m),
        _ => EXIT_INPUT,
    }
}

fn catalog_code(e: &CatalogError) -> i32 {
    match e {
        CatalogError::Internal(_) | CatalogError::Golden(_, _) => EXIT_INTERNAL,
        CatalogError::Invariants(i) => invariants_code(i),
        CatalogError::Plane(p) => plane_code(p),
        CatalogError::Mw(m) => mw_code(m),
        _ => EXIT_INPUT,
    }
}

fn deform_code(e: &DeformError) -> i32 {
    match e {
        DeformError::Internal(_) => EXIT_INTERNAL,
        DeformError::Plane(p) => plane_code(p),
        _ => EXIT_INPUT,
    }
}

impl From<CatalogError> for CliError {
    fn from(e: CatalogError) -> CliError {
        CliError { code: catalog_code(&e), message: e.to_string() }
    }
}

impl From<PlaneError> for CliError {
    fn from(e: PlaneError) -> CliError {
        CliError { code: plane_code(&e), message: e.to_string() }
    }
}

impl From<InvariantsError> for CliError {
    fn from(e: InvariantsError) -> CliError {
        CliError { code: invariants_code(&e), message: e.to_string() }
    }
}

impl From<DeformError> for CliError {
    fn from(e: DeformError) -> CliError {
        CliError { code: deform_code(&e), message: e.to_string() }
    }
}

impl From<MwError> for CliError {
    fn from(e: MwError) -> CliError {
        CliError { code: mw_code(&e), message: e.to_string() }
    }
}

impl From<PolyError> for CliError {
    fn from(e: PolyError) -> CliError {
        CliError { code: EXIT_INPUT, message: e.to_string() }
    }
}

#[derive(Parser)]
#[command(
    name = "clarr",
    version,
    about = "Exact degree-7 conic-line arrangements from rational elliptic surfaces",
    after_help = "Exit codes: 0 success, 1 verification failure, 2 input error, 3 internal inconsistency."
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// List the fourteen arrangement classes with their canonical recipes.
    Catalog {
        /// Restrict to one class (e.g. Cmb212).
        #[arg(long)]
        cmb: Option<String>,
        /// Output file (stdout when omitted).
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Build an arrangement and write it as JSON (or SVG).
    Construct {
        /// Class id, e.g. Cmb123.
        #[arg(long)]
        cmb: String,
        /// Surface parameters "lambda,t1,t2,t3,t4" as rationals
        /// (default: the class's canonical basepoint).
        #[arg(long, allow_hyphen_values = true)]
        tau: Option<String>,
        /// Comma-separated component choices, e.g. "L13,Lb1,Lb3" or
        /// "P13+P14,P13+P14+P34" (default: the canonical choices).
        #[arg(long)]
        choices: Option<String>,
        /// Use the class's documented partner choices instead.
        #[arg(long, conflicts_with = "choices")]
        partner: bool,
        /// Output format.
        #[arg(long, default_value = "json", value_parser = ["json", "svg"])]
        format: String,
        /// SVG window "t0,t1,x0,x1" (default -6,6,-6,6).
        #[arg(long, allow_hyphen_values = true)]
        window: Option<String>,
        /// Output file (stdout when omitted).
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Classify an arrangement and compare with the class reference.
    Verify {
        /// Arrangement JSON file, or a class id for its canonical basepoint.
        input: Option<String>,
        /// Class whose reference to compare against (defaults to the file's
        /// own "cmb" tag).
        #[arg(long)]
        cmb: Option<String>,
        /// Output file (stdout when omitted).
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Certificate for a pair of arrangements with matching combinatorics.
    Invariants {
        /// Two arrangement JSON files written by `construct` (omit to use
        /// --cmb with the documented partner pair).
        #[arg(num_args = 0..=2)]
        inputs: Vec<PathBuf>,
        /// Class id: pair the canonical basepoint with its partner recipe.
        #[arg(long)]
        cmb: Option<String>,
        /// Pair the canonical basepoint with itself (control run).
        #[arg(long)]
        self_pair: bool,
        /// Odd prime for the dihedral dependence tests.
        #[arg(long, default_value_t = 3)]
        prime: u64,
        /// Output file (stdout when omitted).
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Check combinatorics along a sampled deformation path.
    Deform {
        /// Request JSON: a file path or an inline literal. Either
        /// {"cmb":"212","choices":[...],"waypoints":[{"lambda":"-10","t":[...]},...],
        ///  "samples_per_segment":8}
        /// or {"builtin":"beta_family","beta_from":"-4","beta_to":"3","samples":16}.
        #[arg(long)]
        request: String,
        /// Override the sample count of the request.
        #[arg(long)]
        samples: Option<u32>,
        /// Output file (stdout when omitted).
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Re-emit an arrangement as canonical JSON or as an SVG plot.
    Emit {
        /// Arrangement JSON file, or a class id for its canonical basepoint.
        input: String,
        /// Output format.
        #[arg(long, default_value = "json", value_parser = ["json", "svg"])]
        format: String,
        /// SVG window "t0,t1,x0,x1" (default -6,6,-6,6).
        #[arg(long, allow_hyphen_values = true)]
        window: Option<String>,
        /// Output file (stdout when omitted).
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

// ---------------------------------------------------------------------------
// JSON documents

/// One monomial of a homogeneous component equation, with the coefficient as
/// an exact literal.
#[derive(Debug, Clone, Serialize, Deserialize)]
struct TermDoc {
    t: u32,
    x: u32,
    z: u32,
    c: String,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
struct ComponentDoc {
    label: String,
    degree: u32,
    homogeneous: Vec<TermDoc>,
}

/// Serialized arrangement. The recipe fields are optional metadata; the
/// components and hints determine the arrangement.
#[derive(Debug, Clone, Serialize, Deserialize)]
struct ArrangementDoc {
    #[serde(skip_serializing_if = "Option::is_none")]
    cmb: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    tau: Option<SurfaceParams>,
    #[serde(skip_serializing_if = "Option::is_none")]
    choices: Option<Vec<String>>,
    components: Vec<ComponentDoc>,
    hints: Vec<String>,
}

fn affine_bivar(curve: &PlaneCurve) -> BivarPoly {
    match &curve.form {
        CurveForm::Graph { q } => {
            let mut terms = vec![((0u32, 1u32), TowerElem::from_int(1))];
            for (k, c) in q.coeffs().iter().enumerate() {
                terms.push(((k as u32, 0), c.neg()));
            }
            BivarPoly::from_terms(terms)
        }
        CurveForm::Vertical { a } => BivarPoly::from_terms(vec![
            ((1, 0), TowerElem::from_int(1)),
            ((0, 0), a.neg()),
        ]),
        CurveForm::General { c } => c.clone(),
    }
}

fn to_doc(
    arr: &Arrangement,
    cmb: Option<CmbId>,
    tau: Option<&SurfaceParams>,
    choices: Option<&[Choice]>,
) -> Result<ArrangementDoc, CliError> {
    let mut components = Vec::with_capacity(arr.curves.len());
    for curve in &arr.curves {
        let aff = affine_bivar(curve);
        let degree = curve.degree();
        let mut homogeneous = Vec::new();
        for (&(dt, dx), c) in aff.terms() {
            if dt + dx > degree {
                return Err(CliError::internal(format!(
                    "component {} has a term above its projective degree",
                    curve.label
                )));
            }
            homogeneous.push(TermDoc { t: dt, x: dx, z: degree - dt - dx, c: c.to_string() });
        }
        components.push(ComponentDoc { label: curve.label.clone(), degree, homogeneous });
    }
    Ok(ArrangementDoc {
        cmb: cmb.map(|id| id.as_str().to_string()),
        tau: tau.cloned(),
        choices: choices.map(|cs| cs.iter().map(|c| c.to_string()).collect()),
        components,
        hints: arr.hints.iter().map(|h| h.to_string()).collect(),
    })
}

fn from_doc(doc: &ArrangementDoc) -> Result<Arrangement, CliError> {
    let mut curves = Vec::with_capacity(doc.components.len());
    for comp in &doc.components {
        let mut terms = Vec::with_capacity(comp.homogeneous.len());
        for term in &comp.homogeneous {
            let c = parse_tower_elem(&term.c).map_err(|e| {
                CliError::input(format!(
                    "component {}: bad coefficient {:?}: {}",
                    comp.label, term.c, e
                ))
            })?;
            terms.push(((term.t, term.x), c));
        }
        let bivar = BivarPoly::from_terms(terms);
        curves.push(PlaneCurve::from_bivar(comp.label.clone(), bivar)?);
    }
    let mut hints = Vec::with_capacity(doc.hints.len());
    for h in &doc.hints {
        hints.push(
            parse_tower_elem(h)
                .map_err(|e| CliError::input(format!("bad hint {:?}: {}", h, e)))?,
        );
    }
    Ok(Arrangement::assemble(curves, hints)?)
}

fn read_doc(path: &Path) -> Result<ArrangementDoc, CliError> {
    let text = fs::read_to_string(path)
        .map_err(|e| CliError::input(format!("cannot read {}: {}", path.display(), e)))?;
    serde_json::from_str(&text)
        .map_err(|e| CliError::input(format!("cannot parse {}: {}", path.display(), e)))
}

// ---------------------------------------------------------------------------
// Flag parsing helpers

fn parse_cmb(s: &str) -> Result<CmbId, CliError> {
    CmbId::from_str(s).map_err(|e| CliError::input(e.to_string()))
}

fn parse_tau(s: &str) -> Result<SurfaceParams, CliError> {
    let parts: Vec<&str> = s.split(',').map(str::trim).collect();
    if parts.len() != 5 {
        return Err(CliError::input(format!(
            "--tau wants \"lambda,t1,t2,t3,t4\", got {} value(s)",
            parts.len()
        )));
    }
    let mut vals = Vec::with_capacity(5);
    for p in &parts {
        vals.push(
            parse_rat(p).map_err(|e| CliError::input(format!("bad rational {:?}: {}", p, e)))?,
        );
    }
    let t4 = vals.pop().unwrap();
    let t3 = vals.pop().unwrap();
    let t2 = vals.pop().unwrap();
    let t1 = vals.pop().unwrap();
    let lambda = vals.pop().unwrap();
    Ok(SurfaceParams::new(lambda, [t1, t2, t3, t4]))
}

fn parse_choices(s: &str) -> Result<Vec<Choice>, CliError> {
    s.split(',')
        .map(str::trim)
        .filter(|p| !p.is_empty())
        .map(|p| Choice::from_str(p).map_err(CliError::from))
        .collect()
}

fn parse_window(s: Option<&str>) -> Result<Window, CliError> {
    let Some(s) = s else { return Ok(Window::default()) };
    let parts: Vec<&str> = s.split(',').map(str::trim).collect();
    if parts.len() != 4 {
        return Err(CliError::input("--window wants \"t0,t1,x0,x1\""));
    }
    let mut v = [0f64; 4];
    for (k, p) in parts.iter().enumerate() {
        v[k] = p
            .parse::<f64>()
            .map_err(|_| CliError::input(format!("bad window bound {:?}", p)))?;
    }
    if v[0] >= v[1] || v[2] >= v[3] {
        return Err(CliError::input("--window bounds must satisfy t0 < t1 and x0 < x1"));
    }
    Ok(Window { t0: v[0], t1: v[1], x0: v[2], x1: v[3] })
}

fn write_output(out: Option<&Path>, text: &str) -> Result<(), CliError> {
    match out {
        Some(path) => fs::write(path, text)
            .map_err(|e| CliError::input(format!("cannot write {}: {}", path.display(), e))),
        None => {
            println!("{}", text.trim_end());
            Ok(())
        }
    }
}

fn pretty(value: &impl Serialize) -> Result<String, CliError> {
    serde_json::to_string_pretty(value)
        .map_err(|e| CliError::internal(format!("serialization failed: {}", e)))
}

/// Assembly with user-supplied parameters: surface-level rejections are
/// reported as parameters outside the moduli space.
fn assemble_user(
    params: &SurfaceParams,
    choices: &[Choice],
) -> Result<Arrangement, CliError> {
    catalog::assemble(params, choices).map_err(|e| match e {
        CatalogError::Surface(se) => {
            CliError::input(format!("parameters outside M: {}", se))
        }
        other => CliError::from(other),
    })
}

// ---------------------------------------------------------------------------
// catalog

#[derive(Serialize)]
struct CatalogDoc {
    id: String,
    summary: String,
    case: String,
    tau: SurfaceParams,
    choices: Vec<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    partner: Option<Vec<String>>,
}

fn catalog_doc(id: CmbId) -> Result<CatalogDoc, CliError> {
    let e = catalog::entry(id);
    let case = match Surface::new(e.params.clone()) {
        Ok(s) => match s.class {
            crate::surface::ParamClass::SplitConic { .. } => "split",
            crate::surface::ParamClass::SmoothConic => "smooth",
        },
        Err(_) => "invalid",
    };
    Ok(CatalogDoc {
        id: e.id.as_str().to_string(),
        summary: e.summary.to_string(),
        case: case.to_string(),
        tau: e.params.clone(),
        choices: e.choices.iter().map(|c| c.to_string()).collect(),
        partner: e.partner.as_ref().map(|cs| cs.iter().map(|c| c.to_string()).collect()),
    })
}

fn cmd_catalog(cmb: Option<String>, out: Option<PathBuf>) -> Result<i32, CliError> {
    let text = match cmb {
        Some(s) => pretty(&catalog_doc(parse_cmb(&s)?)?)?,
        None => {
            let docs = CmbId::ALL
                .into_iter()
                .map(catalog_doc)
                .collect::<Result<Vec<_>, _>>()?;
            pretty(&docs)?
        }
    };
    write_output(out.as_deref(), &text)?;
    Ok(EXIT_OK)
}

// ---------------------------------------------------------------------------
// construct

#[allow(clippy::too_many_arguments)]
fn cmd_construct(
    cmb: String,
    tau: Option<String>,
    choices: Option<String>,
    partner: bool,
    format: String,
    window: Option<String>,
    out: Option<PathBuf>,
) -> Result<i32, CliError> {
    let id = parse_cmb(&cmb)?;
    let entry = catalog::entry(id);
    let params = match tau {
        Some(s) => parse_tau(&s)?,
        None => entry.params.clone(),
    };
    let chosen: Vec<Choice> = match (&choices, partner) {
        (Some(s), _) => parse_choices(s)?,
        (None, true) => entry
            .partner
            .clone()
            .ok_or_else(|| CliError::input(format!("{} has no documented partner recipe", id.as_str())))?,
        (None, false) => entry.choices.clone(),
    };
    let arr = assemble_user(&params, &chosen)?;
    let text = match format.as_str() {
        "svg" => svg::render(&arr, &parse_window(window.as_deref())?),
        _ => pretty(&to_doc(&arr, Some(id), Some(&params), Some(&chosen))?)?,
    };
    write_output(out.as_deref(), &text)?;
    Ok(EXIT_OK)
}

// ---------------------------------------------------------------------------
// verify

#[derive(Serialize)]
struct CensusDiff {
    kind: String,
    got: u32,
    reference: u32,
}

#[derive(Serialize)]
struct VerifyDoc {
    cmb: String,
    isomorphic: bool,
    combinatorics: Combinatorics,
    #[serde(skip_serializing_if = "Option::is_none")]
    census_diff: Option<Vec<CensusDiff>>,
}

fn cmd_verify(
    input: Option<String>,
    cmb: Option<String>,
    out: Option<PathBuf>,
) -> Result<i32, CliError> {
    let (arr, id) = match &input {
        None => {
            let id = parse_cmb(cmb.as_deref().ok_or_else(|| {
                CliError::input("verify wants an arrangement file or a class id")
            })?)?;
            (catalog::canonical(id)?, id)
        }
        Some(s) => {
            if let Ok(id) = CmbId::from_str(s) {
                (catalog::canonical(id)?, id)
            } else {
                let doc = read_doc(Path::new(s))?;
                let id = match &cmb {
                    Some(flag) => parse_cmb(flag)?,
                    None => parse_cmb(doc.cmb.as_deref().ok_or_else(|| {
                        CliError::input(
                            "arrangement file carries no \"cmb\" tag; pass --cmb to name the reference",
                        )
                    })?)?,
                };
                (from_doc(&doc)?, id)
            }
        }
    };
    let comb = classify(&arr)?;
    let reference = catalog::golden(id)?;
    let isomorphic = comb.isomorphic(&reference);
    let census_diff = if isomorphic {
        None
    } else {
        let got = comb.census();
        let want = reference.census();
        let mut kinds: Vec<String> = got.keys().chain(want.keys()).cloned().collect();
        kinds.sort();
        kinds.dedup();
        Some(
            kinds
                .into_iter()
                .filter_map(|k| {
                    let g = got.get(&k).copied().unwrap_or(0);
                    let w = want.get(&k).copied().unwrap_or(0);
                    (g != w).then_some(CensusDiff { kind: k, got: g, reference: w })
                })
                .collect(),
        )
    };
    let doc = VerifyDoc { cmb: id.as_str().to_string(), isomorphic, combinatorics: comb, census_diff };
    write_output(out.as_deref(), &pretty(&doc)?)?;
    Ok(if isomorphic { EXIT_OK } else { EXIT_VERIFICATION })
}

// ---------------------------------------------------------------------------
// invariants

struct PairSide {
    index: u32,
    mw: MordellWeil,
    choices: Vec<Choice>,
    arr: Arrangement,
}

fn side_from_recipe(
    index: u32,
    params: &SurfaceParams,
    choices: Vec<Choice>,
) -> Result<PairSide, CliError> {
    let arr = assemble_user(params, &choices)?;
    let mw = MordellWeil::new(Surface::new(params.clone()).map_err(surface_input)?)?;
    Ok(PairSide { index, mw, choices, arr })
}

fn surface_input(e: SurfaceError) -> CliError {
    CliError::input(format!("parameters outside M: {}", e))
}

/// The documented invariant battery of a class, evaluated on one side of a
/// pair. Classes without a battery, and recipes whose shape does not match
/// the documented one, contribute nothing.
fn battery(id: CmbId, p: u64, side: &PairSide) -> Result<Vec<InvariantResult>, CliError> {
    let mw = &side.mw;
    match id {
        // conic-line pair split by the plinth quartic
        CmbId::C123 => {
            let (Some(Choice::Section(e0)), Some(Choice::Section(e1))) =
                (side.choices.first(), side.choices.get(1))
            else {
                return Ok(vec![]);
            };
            let pd = mw.combine(&parse_section_expr(e0)?)?;
            let pm = mw.combine(&parse_section_expr(e1)?)?;
            let d = curve_from_section(mw, &pd, "D")?;
            let m = curve_from_section(mw, &pm, "M")?;
            let branch = plinth_curves(mw)?;
            let value = splitting_type_checked(&branch, &d, &m, mw, &pd, &pm)?;
            Ok(vec![InvariantResult::SplittingType {
                arrangement: side.index,
                triple: vec!["D".into(), "M".into(), "plinth".into()],
                value,
            }])
        }
        // doubled section against a chord: dependence mod p
        CmbId::C124 | CmbId::C224 => {
            let (Some(Choice::Section(e0)), Some(Choice::Chord(i, j))) =
                (side.choices.first(), side.choices.get(1))
            else {
                return Ok(vec![]);
            };
            let pd = mw.combine(&parse_section_expr(e0)?)?;
            let pl = mw.generator(crate::mw::GenName::Chord(*i, *j))?;
            let dependent = dihedral_dependence_test(&[pd.lattice.clone(), pl.lattice.clone()], p)?;
            Ok(vec![InvariantResult::DihedralDependence {
                arrangement: side.index,
                p,
                points: vec!["D".into(), "L".into()],
                value: if dependent { "dependent".into() } else { "independent".into() },
            }])
        }
        // chord with two bitangents: dependence mod p
        CmbId::C212 => {
            let (Some(Choice::Chord(i, j)), Some(Choice::Bitangent(k)), Some(Choice::Bitangent(l))) =
                (side.choices.first(), side.choices.get(1), side.choices.get(2))
            else {
                return Ok(vec![]);
            };
            let pc = mw.generator(crate::mw::GenName::Chord(*i, *j))?;
            let vectors = bitangent_lattice_vectors();
            let points = vec![
                pc.lattice.clone(),
                vectors[(*k - 1) as usize].clone(),
                vectors[(*l - 1) as usize].clone(),
            ];
            let dependent = dihedral_dependence_test(&points, p)?;
            Ok(vec![InvariantResult::DihedralDependence {
                arrangement: side.index,
                p,
                points: vec!["chord".into(), "tangent_a".into(), "tangent_b".into()],
                value: if dependent { "dependent".into() } else { "independent".into() },
            }])
        }
        _ => Ok(vec![]),
    }
}

fn side_from_file(index: u32, path: &Path) -> Result<(PairSide, CmbId), CliError> {
    let doc = read_doc(path)?;
    let missing = |what: &str| {
        CliError::input(format!(
            "{}: file carries no {} metadata; write it with `construct`",
            path.display(),
            what
        ))
    };
    let id = parse_cmb(doc.cmb.as_deref().ok_or_else(|| missing("\"cmb\""))?)?;
    let params = doc.tau.clone().ok_or_else(|| missing("\"tau\""))?;
    let choice_strs = doc.choices.clone().ok_or_else(|| missing("\"choices\""))?;
    let mut choices = Vec::with_capacity(choice_strs.len());
    for s in &choice_strs {
        choices.push(Choice::from_str(s)?);
    }
    let arr = from_doc(&doc)?;
    let mw = MordellWeil::new(Surface::new(params).map_err(surface_input)?)?;
    Ok((PairSide { index, mw, choices, arr }, id))
}

fn cmd_invariants(
    inputs: Vec<PathBuf>,
    cmb: Option<String>,
    self_pair: bool,
    prime: u64,
    out: Option<PathBuf>,
) -> Result<i32, CliError> {
    let (side1, side2, id) = match (inputs.len(), &cmb) {
        (0, Some(s)) => {
            let id = parse_cmb(s)?;
            let entry = catalog::entry(id);
            let second = if self_pair {
                entry.choices.clone()
            } else {
                entry.partner.clone().ok_or_else(|| {
                    CliError::input(format!(
                        "{} has no documented partner recipe; pass two files or --self-pair",
                        id.as_str()
                    ))
                })?
            };
            (
                side_from_recipe(1, &entry.params, entry.choices.clone())?,
                side_from_recipe(2, &entry.params, second)?,
                id,
            )
        }
        (2, _) => {
            let (s1, id1) = side_from_file(1, &inputs[0])?;
            let (s2, id2) = side_from_file(2, &inputs[1])?;
            if id1 != id2 {
                return Err(CliError::input(format!(
                    "the two arrangements belong to different classes ({} vs {})",
                    id1.as_str(),
                    id2.as_str()
                )));
            }
            (s1, s2, id1)
        }
        (0, None) => {
            return Err(CliError::input(
                "invariants wants two arrangement files or --cmb with a partnered class",
            ))
        }
        (n, _) => {
            return Err(CliError::input(format!(
                "invariants wants exactly two arrangement files, got {}",
                n
            )))
        }
    };
    let mut results = battery(id, prime, &side1)?;
    results.extend(battery(id, prime, &side2)?);
    let cert: Certificate = certify_arrangements(&side1.arr, &side2.arr, results)?;
    let code = if cert.verdict == VERDICT_COMBINATORICS_DIFFER {
        EXIT_VERIFICATION
    } else {
        EXIT_OK
    };
    write_output(out.as_deref(), &pretty(&cert)?)?;
    Ok(code)
}

// ---------------------------------------------------------------------------
// deform

#[derive(Deserialize)]
#[serde(untagged)]
enum DeformRequest {
    Builtin {
        builtin: String,
        beta_from: String,
        beta_to: String,
        #[serde(default)]
        samples: Option<u32>,
        #[serde(default)]
        pair: Option<[usize; 2]>,
    },
    Path {
        cmb: String,
        #[serde(default)]
        choices: Option<Vec<String>>,
        waypoints: Vec<SurfaceParams>,
        samples_per_segment: u32,
    },
}

fn run_beta_sweep(
    from: &Rat,
    to: &Rat,
    samples: u32,
    pair: (usize, usize),
) -> Result<SampleReport, CliError> {
    if samples < 2 {
        return Err(CliError::input("a sweep needs at least two samples"));
    }
    if beta_exceptional(to).is_some() {
        return Err(CliError::input(format!(
            "the sweep endpoint beta = {} is an exceptional parameter; pick a reference endpoint where the family is nondegenerate",
            to
        )));
    }
    let reference = classify(&beta_arrangement(to, pair)?)?;
    let mut outcomes = Vec::with_capacity(samples as usize);
    let span = to - from;
    for k in 0..samples {
        let beta = from + &span * rat(k as i64, (samples - 1) as i64);
        let mut outcome = SampleOutcome {
            segment: 0,
            s: rat(k as i64, (samples - 1) as i64).to_string(),
            lambda: beta.to_string(),
            isomorphic: None,
            degeneracy: None,
            branch_ambiguity: false,
        };
        if let Some(reason) = beta_exceptional(&beta) {
            outcome.degeneracy = Some(reason);
        } else {
            match beta_arrangement(&beta, pair) {
                Err(e) => outcome.degeneracy = Some(e.to_string()),
                Ok(arr) => match classify(&arr) {
                    Err(e) => outcome.degeneracy = Some(e.to_string()),
                    Ok(comb) => outcome.isomorphic = Some(comb.isomorphic(&reference)),
                },
            }
        }
        outcomes.push(outcome);
    }
    let first_failure = outcomes.iter().position(|o| o.isomorphic != Some(true));
    Ok(SampleReport {
        all_isomorphic: first_failure.is_none(),
        first_failure,
        outcomes,
        collisions: vec![],
    })
}

fn cmd_deform(
    request: String,
    samples: Option<u32>,
    out: Option<PathBuf>,
) -> Result<i32, CliError> {
    let text = if request.trim_start().starts_with('{') {
        request
    } else {
        fs::read_to_string(&request)
            .map_err(|e| CliError::input(format!("cannot read {}: {}", request, e)))?
    };
    let req: DeformRequest = serde_json::from_str(&text)
        .map_err(|e| CliError::input(format!("cannot parse deform request: {}", e)))?;
    let report = match req {
        DeformRequest::Builtin { builtin, beta_from, beta_to, samples: n, pair } => {
            if builtin != "beta_family" {
                return Err(CliError::input(format!("unknown builtin family {:?}", builtin)));
            }
            let from = parse_rat(&beta_from)
                .map_err(|e| CliError::input(format!("bad beta_from: {}", e)))?;
            let to = parse_rat(&beta_to)
                .map_err(|e| CliError::input(format!("bad beta_to: {}", e)))?;
            let count = samples.or(n).unwrap_or(16);
            let pair = pair.map(|[a, b]| (a, b)).unwrap_or((1, 3));
            run_beta_sweep(&from, &to, count, pair)?
        }
        DeformRequest::Path { cmb, choices, waypoints, samples_per_segment } => {
            let id = parse_cmb(&cmb)?;
            let chosen: Vec<Choice> = match choices {
                Some(strs) => strs
                    .iter()
                    .map(|s| Choice::from_str(s).map_err(CliError::from))
                    .collect::<Result<_, _>>()?,
                None => catalog::entry(id).choices.clone(),
            };
            let spec = PathSpec {
                waypoints,
                samples_per_segment: samples.unwrap_or(samples_per_segment),
            };
            let reference = catalog::golden(id)?;
            check_deformation(&spec, &reference, |params| {
                catalog::assemble(params, &chosen).map_err(|e| e.to_string())
            })?
        }
    };
    let ok = report.all_isomorphic && report.collisions.is_empty();
    write_output(out.as_deref(), &pretty(&report)?)?;
    Ok(if ok { EXIT_OK } else { EXIT_VERIFICATION })
}

// ---------------------------------------------------------------------------
// emit

fn cmd_emit(
    input: String,
    format: String,
    window: Option<String>,
    out: Option<PathBuf>,
) -> Result<i32, CliError> {
    let (arr, doc) = if let Ok(id) = CmbId::from_str(&input) {
        let entry = catalog::entry(id);
        let arr = catalog::canonical(id)?;
        let doc = to_doc(&arr, Some(id), Some(&entry.params), Some(&entry.choices))?;
        (arr, doc)
    } else {
        let doc = read_doc(Path::new(&input))?;
        (from_doc(&doc)?, doc)
    };
    let text = match format.as_str() {
        "svg" => svg::render(&arr, &parse_window(window.as_deref())?),
        _ => pretty(&doc)?,
    };
    write_output(out.as_deref(), &text)?;
    Ok(EXIT_OK)
}

// ---------------------------------------------------------------------------
// entry points

fn dispatch(cli: Cli) -> Result<i32, CliError> {
    match cli.command {
        Command::Catalog { cmb, out } => cmd_catalog(cmb, out),
        Command::Construct { cmb, tau, choices, partner, format, window, out } => {
            cmd_construct(cmb, tau, choices, partner, format, window, out)
        }
        Command::Verify { input, cmb, out } => cmd_verify(input, cmb, out),
        Command::Invariants { inputs, cmb, self_pair, prime, out } => {
            cmd_invariants(inputs, cmb, self_pair, prime, out)
        }
        Command::Deform { request, samples, out } => cmd_deform(request, samples, out),
        Command::Emit { input, format, window, out } => cmd_emit(input, format, window, out),
    }
}

/// Run with explicit arguments (argv[0] included). Returns the exit code.
pub fn run_from<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            let code = match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => EXIT_OK,
                _ => EXIT_INPUT,
            };
            let _ = e.print();
            return code;
        }
    };
    match dispatch(cli) {
        Ok(code) => code,
        Err(err) => {
            eprintln!("{}", json!({ "error": { "code": err.code, "message": err.message } }));
            err.code
        }
    }
}

/// Entry point used by the `clarr` binary.
pub fn run_cli() -> i32 {
    run_from(std::env::args_os())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::invariants::{VERDICT_CERTIFIED, VERDICT_INDISTINGUISHABLE};

    fn tmp(name: &str) -> PathBuf {
        let dir = std::env::temp_dir().join(format!("clarr-cli-{}", std::process::id()));
        fs::create_dir_all(&dir).unwrap();
        dir.join(name)
    }

    fn run(args: &[&str]) -> i32 {
        let mut argv = vec!["clarr"];
        argv.extend_from_slice(args);
        run_from(argv)
    }

    #[test]
    fn doc_round_trip_is_lossless() {
        for id in [CmbId::C111, CmbId::C212, CmbId::C225] {
            let arr = catalog::canonical(id).unwrap();
            let doc = to_doc(&arr, Some(id), None, None).unwrap();
            let text = serde_json::to_string(&doc).unwrap();
            let back: ArrangementDoc = serde_json::from_str(&text).unwrap();
            let arr2 = from_doc(&back).unwrap();
            assert_eq!(arr.curves.len(), arr2.curves.len());
            for (a, b) in arr.curves.iter().zip(arr2.curves.iter()) {
                assert_eq!(a.label, b.label);
                assert_eq!(a.form, b.form, "component {} changed shape", a.label);
            }
            assert_eq!(arr.hints, arr2.hints);
        }
    }

    #[test]
    fn construct_then_verify_round_trip() {
        let path = tmp("c224.json");
        assert_eq!(
            run(&["construct", "--cmb", "Cmb224", "--out", path.to_str().unwrap()]),
            EXIT_OK
        );
        assert_eq!(run(&["verify", path.to_str().unwrap()]), EXIT_OK);
    }

    #[test]
    fn verify_catches_a_moved_line() {
        let path = tmp("c111-bent.json");
        assert_eq!(
            run(&["construct", "--cmb", "Cmb111", "--out", path.to_str().unwrap()]),
            EXIT_OK
        );
        let mut doc: ArrangementDoc =
            serde_json::from_str(&fs::read_to_string(&path).unwrap()).unwrap();
        // move the constant term of the last line by 1
        let comp = doc
            .components
            .iter_mut()
            .rev()
            .find(|c| c.degree == 1)
            .expect("some line");
        let term = comp
            .homogeneous
            .iter_mut()
            .find(|t| t.t == 0 && t.x == 0)
            .expect("constant term");
        let old = parse_tower_elem(&term.c).unwrap();
        term.c = old.add(&TowerElem::from_int(1)).to_string();
        fs::write(&path, serde_json::to_string(&doc).unwrap()).unwrap();
        assert_eq!(run(&["verify", path.to_str().unwrap()]), EXIT_VERIFICATION);
    }

    #[test]
    fn verify_rejects_malformed_json() {
        let path = tmp("broken.json");
        fs::write(&path, "{ not json").unwrap();
        assert_eq!(run(&["verify", path.to_str().unwrap()]), EXIT_INPUT);
    }

    #[test]
    fn unknown_class_is_an_input_error() {
        assert_eq!(run(&["catalog", "--cmb", "Cmb999"]), EXIT_INPUT);
    }

    #[test]
    fn repeated_base_points_are_outside_m() {
        let out = tmp("junk.json");
        assert_eq!(
            run(&[
                "construct",
                "--cmb",
                "Cmb111",
                "--tau",
                "0,-2,-1,1,1",
                "--out",
                out.to_str().unwrap()
            ]),
            EXIT_INPUT
        );
    }

    #[test]
    fn partner_certificates_distinguish_and_self_pairs_do_not() {
        let cert_path = tmp("cert123.json");
        assert_eq!(
            run(&["invariants", "--cmb", "Cmb123", "--out", cert_path.to_str().unwrap()]),
            EXIT_OK
        );
        let cert: Certificate =
            serde_json::from_str(&fs::read_to_string(&cert_path).unwrap()).unwrap();
        assert!(cert.combinatorics_isomorphic);
        assert_eq!(cert.verdict, VERDICT_CERTIFIED);

        let self_path = tmp("cert123-self.json");
        assert_eq!(
            run(&[
                "invariants",
                "--cmb",
                "Cmb123",
                "--self-pair",
                "--out",
                self_path.to_str().unwrap()
            ]),
            EXIT_OK
        );
        let cert: Certificate =
            serde_json::from_str(&fs::read_to_string(&self_path).unwrap()).unwrap();
        assert_eq!(cert.verdict, VERDICT_INDISTINGUISHABLE);
    }

    #[test]
    fn invariants_pairs_files_written_by_construct() {
        let a = tmp("b13.json");
        let b = tmp("b12.json");
        assert_eq!(
            run(&["construct", "--cmb", "Cmb212", "--out", a.to_str().unwrap()]),
            EXIT_OK
        );
        assert_eq!(
            run(&["construct", "--cmb", "Cmb212", "--partner", "--out", b.to_str().unwrap()]),
            EXIT_OK
        );
        let cert_path = tmp("cert212.json");
        assert_eq!(
            run(&[
                "invariants",
                a.to_str().unwrap(),
                b.to_str().unwrap(),
                "--out",
                cert_path.to_str().unwrap()
            ]),
            EXIT_OK
        );
        let cert: Certificate =
            serde_json::from_str(&fs::read_to_string(&cert_path).unwrap()).unwrap();
        assert_eq!(cert.verdict, VERDICT_CERTIFIED);
        let deps: Vec<&str> = cert
            .invariants
            .iter()
            .map(|r| match r {
                InvariantResult::DihedralDependence { value, .. } => value.as_str(),
                _ => panic!("dihedral battery expected"),
            })
            .collect();
        assert_eq!(deps, ["dependent", "independent"]);
    }

    #[test]
    fn emit_svg_produces_a_drawing() {
        let path = tmp("c212.svg");
        assert_eq!(
            run(&[
                "emit",
                "Cmb212",
                "--format",
                "svg",
                "--window",
                "-6,6,-6,6",
                "--out",
                path.to_str().unwrap()
            ]),
            EXIT_OK
        );
        let svg = fs::read_to_string(&path).unwrap();
        assert!(svg.starts_with("<svg"));
        assert!(svg.matches("<path").count() >= 5);
    }

    #[test]
    fn deform_beta_sweep_smoke() {
        let path = tmp("sweep.json");
        let req = r#"{"builtin":"beta_family","beta_from":"-4","beta_to":"3","samples":4}"#;
        assert_eq!(run(&["deform", "--request", req, "--out", path.to_str().unwrap()]), EXIT_OK);
        let report: SampleReport =
            serde_json::from_str(&fs::read_to_string(&path).unwrap()).unwrap();
        assert!(report.all_isomorphic);
        assert_eq!(report.outcomes.len(), 4);
    }
}
