//! Scenario documents: schema, validation and resource budgets.
//!
//! Parsing is two-staged. Serde enforces the shape (unknown fields are
//! rejected); validation then resolves names, builds spaces and maps, and
//! checks every budget, collecting all errors with their JSON location.

use std::collections::BTreeMap;
use std::fmt;

use eqweight::equivariant::default_depth;
use eqweight::group::FiniteGroup;
use eqweight::products::Identity;
use eqweight::spaces::{builtin, constant_map, fold_map, EquivariantMap, SimplicialGSet, BUILTINS};
use serde::Deserialize;
use sha2::{Digest, Sha256};

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RawScenario {
    pub version: u32,
    pub name: String,
    pub space: RawSpace,
    /// Extra spaces referenced by name from tasks.
    #[serde(default)]
    pub spaces: BTreeMap<String, RawSpace>,
    #[serde(default)]
    pub resolution: RawResolution,
    pub window: i64,
    #[serde(default)]
    pub filtration: FiltrationKind,
    #[serde(default)]
    pub budgets: Budgets,
    pub tasks: Vec<RawTask>,
    #[serde(default)]
    pub output: OutputOptions,
}

#[derive(Clone, Debug, Deserialize)]
#[serde(rename_all = "snake_case", deny_unknown_fields)]
pub enum RawSpace {
    Builtin(String),
    Simplicial(RawSimplicial),
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RawSimplicial {
    pub name: String,
    pub group: RawGroup,
    pub counts: Vec<usize>,
    pub faces: Vec<Vec<Vec<usize>>>,
    pub action: Vec<Vec<Vec<usize>>>,
}

#[derive(Clone, Debug, Deserialize)]
#[serde(rename_all = "snake_case", deny_unknown_fields)]
pub enum RawGroup {
    Trivial,
    Cyclic(usize),
    Dihedral(usize),
    Table(Vec<Vec<usize>>),
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ResolutionKind {
    /// Periodic for cyclic groups, bar otherwise.
    #[default]
    Auto,
    Periodic,
    Bar,
}

#[derive(Clone, Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RawResolution {
    #[serde(default)]
    pub kind: ResolutionKind,
    /// Defaults to the smallest depth certifying the window.
    pub depth: Option<usize>,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FiltrationKind {
    #[default]
    Canonical,
    Trivial,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Budgets {
    #[serde(default = "Budgets::default_max_depth")]
    pub max_depth: usize,
    /// Largest bar-resolution rank `|G|^depth`.
    #[serde(default = "Budgets::default_max_rank")]
    pub max_rank: usize,
    /// Largest dimension of a single degree of an L-complex.
    #[serde(default = "Budgets::default_max_hom_dim")]
    pub max_hom_dim: usize,
}

impl Budgets {
    fn default_max_depth() -> usize {
        24
    }
    fn default_max_rank() -> usize {
        1 << 12
    }
    fn default_max_hom_dim() -> usize {
        1 << 14
    }
}

impl Default for Budgets {
    fn default() -> Self {
        Budgets { max_depth: Self::default_max_depth(), max_rank: Self::default_max_rank(), max_hom_dim: Self::default_max_hom_dim() }
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputOptions {
    /// Adds wall-clock timings; the report is then no longer byte-stable.
    #[serde(default)]
    pub timing: bool,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum HsChoice {
    First,
    Second,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Side {
    #[default]
    Cohomology,
    Homology,
}

#[derive(Clone, Debug, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum RawTask {
    Cohomology {},
    Homology {},
    Hs {
        filtration: HsChoice,
        #[serde(default)]
        pages: Vec<usize>,
    },
    WeightSs {
        #[serde(default)]
        side: Side,
        #[serde(default)]
        pages: Vec<usize>,
    },
    Kunneth {
        /// Second factor; the scenario space when absent.
        other: Option<String>,
        window: Option<i64>,
    },
    Cup {
        #[serde(default = "default_page")]
        page: usize,
    },
    Cap {
        #[serde(default = "default_page")]
        page: usize,
    },
    Identity {
        identities: Vec<String>,
        map: Option<RawMap>,
        factor: Option<String>,
        #[serde(default)]
        pages: Vec<usize>,
        window: Option<i64>,
    },
    Duality {
        #[serde(default = "default_page")]
        page: usize,
    },
}

fn default_page() -> usize {
    1
}

#[derive(Clone, Debug, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum RawMap {
    /// `X ⊔ X → X`; the target is the scenario space.
    Fold { source: String },
    /// Every vertex to `vertex` of the target.
    Constant { source: String, target: Option<String>, vertex: usize },
    Explicit { source: String, target: Option<String>, assignment: Vec<Vec<Option<usize>>> },
}

/// Resolution choice after validation.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct ResolutionSpec {
    pub periodic: bool,
    pub depth: usize,
}

#[derive(Clone, Debug)]
pub enum Task {
    Cohomology,
    Homology,
    Hs { filtration: HsChoice, pages: Vec<usize> },
    WeightSs { side: Side, pages: Vec<usize> },
    Kunneth { other: SimplicialGSet, window: i64, depth: usize },
    Cup { page: usize },
    Cap { page: usize },
    Identity { identities: Vec<Identity>, map: Option<EquivariantMap>, factor: Option<SimplicialGSet>, pages: Vec<usize>, window: i64, depth: usize },
    Duality { page: usize },
}

impl Task {
    pub fn kind(&self) -> &'static str {
        match self {
            Task::Cohomology => "cohomology",
            Task::Homology => "homology",
            Task::Hs { .. } => "hs",
            Task::WeightSs { .. } => "weight_ss",
            Task::Kunneth { .. } => "kunneth",
            Task::Cup { .. } => "cup",
            Task::Cap { .. } => "cap",
            Task::Identity { .. } => "identity",
            Task::Duality { .. } => "duality",
        }
    }
}

#[derive(Clone, Debug)]
pub struct Scenario {
    pub name: String,
    /// SHA-256 of the document bytes, hex.
    pub digest: String,
    pub space: SimplicialGSet,
    pub resolution: ResolutionSpec,
    pub window: i64,
    pub filtration: FiltrationKind,
    pub budgets: Budgets,
    pub tasks: Vec<Task>,
    pub output: OutputOptions,
}

/// A validation error at a JSON location such as `/tasks/2/other`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ParseError {
    pub path: String,
    pub message: String,
}

impl fmt::Display for ParseError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: {}", self.path, self.message)
    }
}

struct Errors(Vec<ParseError>);

impl Errors {
    fn push(&mut self, path: impl Into<String>, message: impl Into<String>) {
        self.0.push(ParseError { path: path.into(), message: message.into() });
    }
}

pub fn digest(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}

/// Parses and validates a scenario document.
pub fn parse(document: &str) -> Result<Scenario, Vec<ParseError>> {
    let raw: RawScenario = serde_json::from_str(document).map_err(|e| {
        vec![ParseError { path: format!("line {} column {}", e.line(), e.column()), message: e.to_string() }]
    })?;
    validate(&raw, digest(document.as_bytes()))
}

fn build_group(g: &RawGroup) -> Result<FiniteGroup, String> {
    match g {
        RawGroup::Trivial => Ok(FiniteGroup::trivial()),
        RawGroup::Cyclic(0) | RawGroup::Dihedral(0) => Err("group order must be positive".into()),
        RawGroup::Cyclic(n) => Ok(FiniteGroup::cyclic(*n)),
        RawGroup::Dihedral(n) => Ok(FiniteGroup::dihedral(*n)),
        RawGroup::Table(t) => FiniteGroup::from_table(t.clone()).map_err(|e| e.to_string()),
    }
}

fn build_space(raw: &RawSpace) -> Result<SimplicialGSet, (String, String)> {
    match raw {
        RawSpace::Builtin(name) => builtin(name).map_err(|_| ("builtin".into(), format!("unknown builtin '{name}'; known: {}", BUILTINS.join(", ")))),
        RawSpace::Simplicial(s) => {
            let group = build_group(&s.group).map_err(|m| ("simplicial/group".to_string(), m))?;
            SimplicialGSet::new(&s.name, &group, s.counts.clone(), s.faces.clone(), s.action.clone()).map_err(|e| ("simplicial".into(), e.to_string()))
        }
    }
}

/// `dim` of the largest L-degree for a complex with degree dims `dims`
/// starting at 0, over a resolution with ranks `ranks`.
fn hom_dim_estimate(dims: &[usize], ranks: &[usize], window: i64) -> usize {
    (0..=window.max(0) + 1)
        .map(|n| {
            (0..ranks.len())
                .filter(|&p| (p as i64) <= n && ((n - p as i64) as usize) < dims.len())
                .map(|p| ranks[p] * dims[(n - p as i64) as usize])
                .sum::<usize>()
        })
        .max()
        .unwrap_or(0)
}

fn check_resolution(errs: &mut Errors, path: &str, group: &FiniteGroup, periodic: bool, depth: usize, dims: &[usize], window: i64, b: &Budgets) {
    if depth > b.max_depth {
        errs.push(path, format!("resolution depth {depth} exceeds budgets.max_depth = {}", b.max_depth));
        return;
    }
    let ranks: Vec<usize> = if periodic {
        vec![1; depth + 1]
    } else {
        let mut r = vec![1usize];
        for p in 1..=depth {
            match r[p - 1].checked_mul(group.order()).filter(|&x| x <= b.max_rank) {
                Some(x) => r.push(x),
                None => {
                    errs.push(path, format!("bar resolution rank |G|^{p} exceeds budgets.max_rank = {}", b.max_rank));
                    return;
                }
            }
        }
        r
    };
    let est = hom_dim_estimate(dims, &ranks, window);
    if est > b.max_hom_dim {
        errs.push(path, format!("an L-complex degree would have dimension {est}, over budgets.max_hom_dim = {}", b.max_hom_dim));
    }
}

fn counts(x: &SimplicialGSet) -> Vec<usize> {
    (0..=x.dim()).map(|k| x.count(k)).collect()
}

fn validate(raw: &RawScenario, digest: String) -> Result<Scenario, Vec<ParseError>> {
    let mut errs = Errors(Vec::new());
    if raw.version != SCHEMA_VERSION {
        errs.push("/version", format!("unsupported schema version {}; expected {SCHEMA_VERSION}", raw.version));
    }
    if raw.window < 0 {
        errs.push("/window", "window must be non-negative");
    }
    let space = match build_space(&raw.space) {
        Ok(s) => Some(s),
        Err((field, m)) => {
            errs.push(format!("/space/{field}"), m);
            None
        }
    };
    let mut named: BTreeMap<String, SimplicialGSet> = BTreeMap::new();
    for (name, s) in &raw.spaces {
        match build_space(s) {
            Ok(x) => {
                named.insert(name.clone(), x);
            }
            Err((field, m)) => errs.push(format!("/spaces/{name}/{field}"), m),
        }
    }
    let Some(space) = space else { return Err(errs.0) };
    let lookup = |name: &str| -> Result<SimplicialGSet, String> {
        if let Some(x) = named.get(name) {
            return Ok(x.clone());
        }
        builtin(name).map_err(|_| format!("'{name}' is neither a scenario space nor a builtin"))
    };

    let group = space.group().clone();
    let cyclic = group == FiniteGroup::cyclic(group.order());
    let periodic = match raw.resolution.kind {
        ResolutionKind::Auto => cyclic,
        ResolutionKind::Periodic => {
            if !cyclic {
                errs.push("/resolution/kind", "the periodic resolution needs a cyclic group");
            }
            true
        }
        ResolutionKind::Bar => false,
    };
    let k = space.cochains();
    let depth = raw.resolution.depth.unwrap_or_else(|| default_depth(k.complex(), raw.window));
    check_resolution(&mut errs, "/resolution/depth", &group, periodic, depth, &counts(&space), raw.window, &raw.budgets);

    let mut tasks = Vec::new();
    for (i, t) in raw.tasks.iter().enumerate() {
        let at = |f: &str| if f.is_empty() { format!("/tasks/{i}") } else { format!("/tasks/{i}/{f}") };
        let pages_ok = |errs: &mut Errors, pages: &[usize], min: usize| {
            for (j, &r) in pages.iter().enumerate() {
                if r < min {
                    errs.push(at(&format!("pages/{j}")), format!("page {r} is below the first reported page {min}"));
                }
            }
        };
        let task = match t {
            RawTask::Cohomology {} => Some(Task::Cohomology),
            RawTask::Homology {} => Some(Task::Homology),
            RawTask::Hs { filtration, pages } => {
                let min = if *filtration == HsChoice::First { 2 } else { 1 };
                pages_ok(&mut errs, pages, min);
                let pages = if pages.is_empty() { vec![min, min + 1] } else { pages.clone() };
                Some(Task::Hs { filtration: *filtration, pages })
            }
            RawTask::WeightSs { side, pages } => {
                pages_ok(&mut errs, pages, 1);
                let pages = if pages.is_empty() { vec![1, 2] } else { pages.clone() };
                Some(Task::WeightSs { side: *side, pages })
            }
            RawTask::Kunneth { other, window } => {
                let other = match other {
                    Some(name) => lookup(name).map_err(|m| errs.push(at("other"), m)).ok(),
                    None => Some(space.clone()),
                };
                other.and_then(|y| {
                    if y.group() != &group {
                        errs.push(at("other"), "the second factor must be over the scenario group");
                        return None;
                    }
                    let w = window.unwrap_or(raw.window).min(raw.window);
                    let kxy = k.tensor_external(&y.cochains()).ok()?;
                    let d = default_depth(kxy.complex(), w);
                    let before = errs.0.len();
                    if d > raw.budgets.max_depth {
                        errs.push(at("window"), format!("resolution depth {d} exceeds budgets.max_depth = {}", raw.budgets.max_depth));
                    } else {
                        let single: Vec<usize> = if periodic { vec![1; d + 1] } else { (0..=d as u32).map(|p| group.order().saturating_pow(p)).collect() };
                        if single.iter().any(|&r| r > raw.budgets.max_rank) {
                            errs.push(at("window"), format!("bar resolution ranks exceed budgets.max_rank = {}", raw.budgets.max_rank));
                        }
                        let tensor: Vec<usize> = (0..=d).map(|p| (0..=p).map(|s| single[s] * single[p - s]).sum()).collect();
                        let dims: Vec<usize> = kxy.complex().degrees().map(|n| kxy.complex().dim(n)).collect();
                        let est = hom_dim_estimate(&dims, &tensor, w);
                        if est > raw.budgets.max_hom_dim {
                            errs.push(at("window"), format!("the product L-complex would have dimension {est}, over budgets.max_hom_dim = {}", raw.budgets.max_hom_dim));
                        }
                    }
                    (errs.0.len() == before).then_some(Task::Kunneth { other: y, window: w, depth: d })
                })
            }
            RawTask::Cup { page } | RawTask::Cap { page } | RawTask::Duality { page } => {
                if *page < 1 {
                    errs.push(at("page"), "products are reported from page 1 on");
                }
                Some(match t {
                    RawTask::Cup { .. } => Task::Cup { page: *page },
                    RawTask::Cap { .. } => Task::Cap { page: *page },
                    _ => Task::Duality { page: *page },
                })
            }
            RawTask::Identity { identities, map, factor, pages, window } => {
                let before = errs.0.len();
                let mut ids = Vec::new();
                for (j, name) in identities.iter().enumerate() {
                    match Identity::from_name(name) {
                        Some(id) => ids.push(id),
                        None => {
                            let known: Vec<&str> = Identity::ALL.iter().map(|i| i.name()).collect();
                            errs.push(at(&format!("identities/{j}")), format!("unknown identity '{name}'; known: {}", known.join(", ")));
                        }
                    }
                }
                pages_ok(&mut errs, pages, 1);
                let map = map.as_ref().and_then(|m| build_map(m, &space, &lookup).map_err(|(f, msg)| errs.push(at(&format!("map/{f}")), msg)).ok());
                if map.is_none() && ids.iter().any(|i| i.needs_map()) && errs.0.len() == before {
                    errs.push(at("map"), format!("{} need an equivariant map", ids.iter().filter(|i| i.needs_map()).map(|i| i.name()).collect::<Vec<_>>().join(", ")));
                }
                let factor = factor.as_ref().and_then(|name| lookup(name).map_err(|m| errs.push(at("factor"), m)).ok());
                let w = window.unwrap_or(raw.window).min(raw.window);
                let mut d = default_depth(k.complex(), w);
                if let Some(m) = &map {
                    d = d.max(default_depth(m.source().cochains().complex(), w)).max(default_depth(m.target().cochains().complex(), w));
                    if m.source().group() != &group {
                        errs.push(at("map"), "the map must be over the scenario group");
                    }
                }
                check_resolution(&mut errs, &at("window"), &group, periodic, d, &counts(&space), w, &raw.budgets);
                (errs.0.len() == before).then(|| Task::Identity {
                    identities: ids,
                    map,
                    factor,
                    pages: if pages.is_empty() { vec![1, usize::MAX] } else { pages.clone() },
                    window: w,
                    depth: d,
                })
            }
        };
        if let Some(task) = task {
            tasks.push(task);
        }
    }
    if !errs.0.is_empty() {
        return Err(errs.0);
    }
    Ok(Scenario {
        name: raw.name.clone(),
        digest,
        space,
        resolution: ResolutionSpec { periodic, depth },
        window: raw.window,
        filtration: raw.filtration,
        budgets: raw.budgets,
        tasks,
        output: raw.output,
    })
}

fn build_map(m: &RawMap, space: &SimplicialGSet, lookup: &dyn Fn(&str) -> Result<SimplicialGSet, String>) -> Result<EquivariantMap, (String, String)> {
    let get = |field: &str, name: &str| lookup(name).map_err(|m| (field.to_string(), m));
    let target = |t: &Option<String>| match t {
        Some(name) => get("target", name),
        None => Ok(space.clone()),
    };
    let built = match m {
        RawMap::Fold { source } => fold_map(space, &get("source", source)?),
        RawMap::Constant { source, target: t, vertex } => constant_map(&get("source", source)?, &target(t)?, *vertex),
        RawMap::Explicit { source, target: t, assignment } => EquivariantMap::new(&get("source", source)?, &target(t)?, assignment.clone()),
    };
    built.map_err(|e| ("kind".to_string(), e.to_string()))
}
