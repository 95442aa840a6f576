//! Scenario ingestion, check orchestration and canonical report emission.
//!
//! Reports are serialized with sorted keys and no whitespace variance, so a
//! fixed scenario produces byte-identical output modulo the `timings_ms`
//! field. Exit codes: 0 all-pass, 2 schema error, 3 certified Kochen-Specker
//! absence, 4 verification failure, 5 internal arithmetic error.

use std::collections::BTreeMap;
use std::path::Path;
use std::sync::Arc;
use std::time::Instant;

use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use bohrnet_core::algebra::{span_close, StarAlgebra};
use bohrnet_core::descent::{Classification, DescentEngine, DescentReport};
use bohrnet_core::error::Error as CoreError;
use bohrnet_core::fragment::{
    build_fragment, mermin_peres_fragment, partition_contexts, pauli_m2_fragment,
    ContextFragment, FragmentDump, DEFAULT_FRAGMENT_BOUND,
};
use bohrnet_core::geometry::{Diamond, Interval};
use bohrnet_core::matrix::ExactMatrix;
use bohrnet_core::net::{
    constant_net, custom_net, majorana_chain, spin_chain, trivial_bulk_net, Net,
};
use bohrnet_core::spectrum::SpectrumBundle;

pub const EXIT_OK: i32 = 0;
pub const EXIT_SCHEMA: i32 = 2;
pub const EXIT_KS_ABSENT: i32 = 3;
pub const EXIT_CHECK_FAILED: i32 = 4;
pub const EXIT_INTERNAL: i32 = 5;

#[derive(Debug)]
pub struct CliError {
    pub code: i32,
    pub message: String,
}

impl CliError {
    fn schema(msg: impl Into<String>) -> Self {
        CliError { code: EXIT_SCHEMA, message: msg.into() }
    }
}

impl From<CoreError> for CliError {
    fn from(e: CoreError) -> Self {
        let code = match &e {
            CoreError::Parse(_) | CoreError::InvalidInput(_) | CoreError::OutOfBounds(_)
            | CoreError::SizeBound(_) | CoreError::DimensionMismatch(_) => EXIT_SCHEMA,
            _ => EXIT_INTERNAL,
        };
        CliError { code, message: e.to_string() }
    }
}

pub type CliResult<T> = std::result::Result<T, CliError>;

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum NetSpec {
    SpinChain { sites: u32 },
    Majorana { sites: u32 },
    Constant { sites: u32, generators: Vec<ExactMatrix>, ambient_dim: u32 },
    Custom { sites: u32, ambient_dim: u32, intervals: Vec<IntervalGenerators> },
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct IntervalGenerators {
    pub lo: u32,
    pub hi: u32,
    pub generators: Vec<ExactMatrix>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum FragmentSpec {
    PauliM2,
    MerminPeres,
    Partitions { n: u32 },
    NetInterval { lo: u32, hi: u32 },
    Custom { ambient_dim: u32, generators: Vec<ExactMatrix> },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CheckKind {
    Isotony,
    Local,
    StronglyLocal,
    EinsteinCausal,
    Additive,
    Descent,
    Boundary,
}

#[derive(Clone, Debug, Serialize, Deserialize, Default)]
pub struct CoverSpec {
    pub k: (u32, u32),
    pub i: (u32, u32),
    pub j: (u32, u32),
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct Scenario {
    pub net: Option<NetSpec>,
    #[serde(default)]
    pub checks: Vec<CheckKind>,
    /// Explicit covers for the descent check; absent means all covers.
    #[serde(default)]
    pub covers: Option<Vec<CoverSpec>>,
    #[serde(default)]
    pub extra_context_generators: Vec<ExactMatrix>,
    #[serde(default)]
    pub boundary_height: Option<u32>,
    #[serde(default)]
    pub max_fragment: Option<usize>,
    #[serde(default)]
    pub fragment: Option<FragmentSpec>,
}

pub fn load_scenario(path: &Path) -> CliResult<Scenario> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::schema(format!("cannot read {}: {e}", path.display())))?;
    parse_scenario(&text)
}

pub fn parse_scenario(text: &str) -> CliResult<Scenario> {
    serde_json::from_str(text).map_err(|e| CliError::schema(format!("scenario schema: {e}")))
}

/// FNV-1a over the canonical serialization of the scenario.
pub fn scenario_digest(scenario: &Scenario) -> String {
    let canonical = serde_json::to_value(scenario).expect("serializable scenario");
    let bytes = serde_json::to_string(&canonical).expect("canonical json");
    let mut h: u64 = 0xcbf2_9ce4_8422_2325;
    for b in bytes.as_bytes() {
        h ^= *b as u64;
        h = h.wrapping_mul(0x0000_0100_0000_01b3);
    }
    format!("{h:016x}")
}

pub fn build_net(spec: &NetSpec) -> CliResult<Net> {
    Ok(match spec {
        NetSpec::SpinChain { sites } => spin_chain(*sites)?,
        NetSpec::Majorana { sites } => majorana_chain(*sites)?,
        NetSpec::Constant { sites, generators, ambient_dim } => {
            let m = span_close(generators, *ambient_dim)?;
            constant_net(&m, *sites)?
        }
        NetSpec::Custom { sites, ambient_dim, intervals } => {
            let listed: Vec<(Interval, Vec<ExactMatrix>)> = intervals
                .iter()
                .map(|ig| Ok((Interval::new(ig.lo, ig.hi)?, ig.generators.clone())))
                .collect::<Result<_, CoreError>>()?;
            custom_net(*sites, *ambient_dim, &listed)?
        }
    })
}

pub fn build_fragment_from_spec(
    spec: &FragmentSpec,
    net: Option<&Net>,
    bound: usize,
) -> CliResult<ContextFragment> {
    Ok(match spec {
        FragmentSpec::PauliM2 => pauli_m2_fragment()?,
        FragmentSpec::MerminPeres => mermin_peres_fragment()?,
        FragmentSpec::Partitions { n } => partition_contexts(*n)?,
        FragmentSpec::NetInterval { lo, hi } => {
            let net = net.ok_or_else(|| {
                CliError::schema("fragment kind net_interval requires a net in the scenario")
            })?;
            let iv = Interval::new(*lo, *hi)?;
            build_fragment(net.algebra(&iv), net.generators_of(&iv), bound)?
        }
        FragmentSpec::Custom { ambient_dim, generators } => {
            let ambient = StarAlgebra::full(*ambient_dim);
            build_fragment(&ambient, generators, bound)?
        }
    })
}

fn interval(pair: (u32, u32)) -> CliResult<Interval> {
    Ok(Interval::new(pair.0, pair.1)?)
}

/// Outcome of one requested check, already JSON-shaped.
struct CheckOutcome {
    name: &'static str,
    pass: bool,
    details: Value,
}

pub struct RunOutput {
    pub report: Value,
    pub exit_code: i32,
}

/// Executes the scenario's checks in declared order and assembles the
/// canonical report.
pub fn run_scenario(scenario: &Scenario, threads: usize) -> CliResult<RunOutput> {
    let start = Instant::now();
    let bound = scenario.max_fragment.unwrap_or(DEFAULT_FRAGMENT_BOUND);
    let net = match &scenario.net {
        Some(spec) => Some(build_net(spec)?),
        None => None,
    };
    let mut outcomes = Vec::new();
    let mut timings: BTreeMap<String, u128> = BTreeMap::new();

    for check in &scenario.checks {
        let t0 = Instant::now();
        let outcome = run_check(*check, scenario, net.as_ref(), bound, threads)?;
        timings.insert(outcome.name.to_string(), t0.elapsed().as_millis());
        outcomes.push(outcome);
    }

    let all_pass = outcomes.iter().all(|o| o.pass);
    let results: Vec<Value> = outcomes
        .iter()
        .map(|o| json!({ "check": o.name, "pass": o.pass, "details": o.details }))
        .collect();
    timings.insert("total".into(), start.elapsed().as_millis());

    let report = json!({
        "version": env!("CARGO_PKG_VERSION"),
        "scenario_digest": scenario_digest(scenario),
        "results": results,
        "all_pass": all_pass,
        "timings_ms": timings,
    });
    let exit_code = if all_pass { EXIT_OK } else { EXIT_CHECK_FAILED };
    Ok(RunOutput { report, exit_code })
}

fn run_check(
    check: CheckKind,
    scenario: &Scenario,
    net: Option<&Net>,
    bound: usize,
    threads: usize,
) -> CliResult<CheckOutcome> {
    let net = net.ok_or_else(|| CliError::schema("this check requires a net"))?;
    Ok(match check {
        CheckKind::Isotony => {
            let pass = net.verify_isotony().is_ok();
            CheckOutcome { name: "isotony", pass, details: json!({}) }
        }
        CheckKind::Local => {
            let verdict = net.check_local();
            let details = witness_details(verdict.witness.as_ref().map(|w| {
                json!({
                    "left_interval": w.left_interval,
                    "right_interval": w.right_interval,
                    "left": w.left,
                    "right": w.right,
                    "replayed": w.replay(),
                })
            }));
            CheckOutcome { name: "local", pass: verdict.holds, details }
        }
        CheckKind::StronglyLocal => {
            let fragments = net.fragments(bound)?;
            // claims are fragment-scoped: record the quantification domain
            let provenance: Vec<Value> = fragments
                .iter()
                .map(|(iv, frag)| {
                    json!({
                        "interval": iv,
                        "generators": frag.provenance().len(),
                        "contexts": frag.len(),
                    })
                })
                .collect();
            match net.check_strongly_local(&fragments) {
                Ok(verdict) => {
                    let mut details =
                        witness_details(verdict.witness.as_ref().map(|w| {
                            serde_json::to_value(w).unwrap()
                        }));
                    details["fragment_provenance"] = json!(provenance);
                    CheckOutcome { name: "strongly_local", pass: verdict.holds, details }
                }
                Err(CoreError::NotLocal(msg)) => CheckOutcome {
                    name: "strongly_local",
                    pass: false,
                    details: json!({ "not_local": msg, "fragment_provenance": provenance }),
                },
                Err(e) => return Err(e.into()),
            }
        }
        CheckKind::EinsteinCausal => {
            let verdict = net.check_einstein_causal();
            CheckOutcome {
                name: "einstein_causal",
                pass: verdict.holds,
                details: witness_details(
                    verdict.witness.as_ref().map(|w| serde_json::to_value(w).unwrap()),
                ),
            }
        }
        CheckKind::Additive => {
            let verdict = net.check_additive();
            CheckOutcome {
                name: "additive",
                pass: verdict.holds,
                details: witness_details(
                    verdict.witness.as_ref().map(|w| serde_json::to_value(w).unwrap()),
                ),
            }
        }
        CheckKind::Descent => {
            let reports = run_descent(net, scenario, bound, threads)?;
            let pass = reports
                .iter()
                .all(|r| r.classification == Classification::StronglyLocalCover);
            CheckOutcome {
                name: "descent",
                pass,
                details: json!({ "covers": reports }),
            }
        }
        CheckKind::Boundary => {
            let height = scenario.boundary_height.unwrap_or(2);
            let reports = run_boundary(net, height, scenario, bound, threads)?;
            let pass = reports
                .iter()
                .all(|r| r.classification == Classification::StronglyLocalCover);
            CheckOutcome {
                name: "boundary",
                pass,
                details: json!({ "diamonds": reports }),
            }
        }
    })
}

fn witness_details(witness: Option<Value>) -> Value {
    match witness {
        Some(w) => json!({ "witness": w }),
        None => json!({}),
    }
}

/// Descent reports for the scenario's covers (or all covers).
pub fn run_descent(
    net: &Net,
    scenario: &Scenario,
    bound: usize,
    threads: usize,
) -> CliResult<Vec<DescentReport>> {
    let covers: Vec<(Interval, Interval, Interval)> = match &scenario.covers {
        Some(list) => list
            .iter()
            .map(|c| Ok((interval(c.k)?, interval(c.i)?, interval(c.j)?)))
            .collect::<CliResult<_>>()?,
        None => net.all_covers(),
    };
    let extra = &scenario.extra_context_generators;
    let mut engine = DescentEngine::new();
    let instances: Vec<_> = covers
        .iter()
        .map(|(k, i, j)| engine.cover_from_net(net, *k, *i, *j, extra, bound))
        .collect::<Result<_, CoreError>>()?;
    analyze_all(instances, threads)
}

/// Boundary descent over every admissible diamond with axis row < height.
pub fn run_boundary(
    boundary: &Net,
    height: u32,
    _scenario: &Scenario,
    bound: usize,
    threads: usize,
) -> CliResult<Vec<DescentReport>> {
    let bulk = trivial_bulk_net(boundary, height)?;
    let mut engine = DescentEngine::new();
    let instances: Vec<_> = bulk
        .diamonds()
        .into_iter()
        .map(|d: Diamond| engine.boundary_cover(boundary, d, bound))
        .collect::<Result<_, CoreError>>()?;
    analyze_all(instances, threads)
}

fn analyze_all(
    instances: Vec<bohrnet_core::descent::CoverInstance>,
    threads: usize,
) -> CliResult<Vec<DescentReport>> {
    if threads > 1 {
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build()
            .map_err(|e| CliError { code: EXIT_INTERNAL, message: e.to_string() })?;
        let reports: Result<Vec<_>, CoreError> = pool.install(|| {
            use rayon::prelude::*;
            instances
                .par_iter()
                .map(|cover| DescentEngine::new().analyze(cover))
                .collect()
        });
        Ok(reports?)
    } else {
        let mut engine = DescentEngine::new();
        instances.iter().map(|c| Ok(engine.analyze(c)?)).collect()
    }
}

/// Spectrum-bundle summary for a fragment.
pub fn run_spectrum(
    fragment: ContextFragment,
    emit_dot: Option<&Path>,
    open_bound: usize,
) -> CliResult<RunOutput> {
    let frag = Arc::new(fragment);
    let bundle = SpectrumBundle::new(frag.clone(), &[])?;
    let mut details = json!({
        "contexts": frag.len(),
        "fiber_sizes": bundle.fiber_sizes(),
        "total_points": bundle.total_points(),
    });
    if bundle.total_points() <= 20 && (1usize << bundle.total_points()) <= open_bound {
        let opens = bundle.enumerate_admissible(open_bound)?;
        let is_topology = bundle.family_is_topology(&opens);
        details["admissible_opens"] = json!(opens.len());
        details["family_is_topology"] = json!(is_topology);
    }
    if let Some(path) = emit_dot {
        std::fs::write(path, bundle.to_dot("bundle"))
            .map_err(|e| CliError::schema(format!("cannot write DOT: {e}")))?;
    }
    let report = json!({
        "version": env!("CARGO_PKG_VERSION"),
        "spectrum": details,
    });
    Ok(RunOutput { report, exit_code: EXIT_OK })
}

/// Kochen-Specker search: exit 0 with a section, 3 with certified absence.
pub fn run_ks_search(fragment: ContextFragment) -> CliResult<RunOutput> {
    let bundle = SpectrumBundle::new(Arc::new(fragment), &[])?;
    let outcome = bundle.ks_search();
    let sections = bundle.ks_sections(usize::MAX);
    let exit_code = if outcome.section.is_some() { EXIT_OK } else { EXIT_KS_ABSENT };
    let report = json!({
        "version": env!("CARGO_PKG_VERSION"),
        "ks": {
            "section": outcome.section,
            "section_count": sections.len(),
            "explored": outcome.explored,
            "exhausted": outcome.exhausted,
        },
    });
    Ok(RunOutput { report, exit_code })
}

pub fn load_fragment_dump(path: &Path) -> CliResult<ContextFragment> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::schema(format!("cannot read {}: {e}", path.display())))?;
    let dump: FragmentDump =
        serde_json::from_str(&text).map_err(|e| CliError::schema(format!("fragment schema: {e}")))?;
    Ok(ContextFragment::from_dump(&dump)?)
}

/// Canonical serialization: sorted keys, no whitespace variance.
pub fn canonical_json(v: &Value) -> String {
    serde_json::to_string(v).expect("serializable report")
}

/// The report with its timing field removed, for determinism comparisons.
pub fn strip_timings(v: &Value) -> Value {
    let mut v = v.clone();
    if let Some(map) = v.as_object_mut() {
        map.remove("timings_ms");
    }
    v
}

pub fn write_output(report: &Value, out: Option<&Path>) -> CliResult<()> {
    let text = canonical_json(report);
    match out {
        Some(path) => std::fs::write(path, text)
            .map_err(|e| CliError::schema(format!("cannot write {}: {e}", path.display()))),
        None => {
            println!("{text}");
            Ok(())
        }
    }
}
