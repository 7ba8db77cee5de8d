//! Executes the tasks of a validated scenario into a JSON report.
//!
//! Every number in a report comes from an `eqweight` operation; this module
//! only selects the certified part and arranges it. Objects are `BTreeMap`s,
//! so keys are sorted, and lists are built in a fixed order: the serialized
//! report depends on the scenario alone unless timings are requested.

use std::collections::BTreeMap;
use std::sync::OnceLock;
use std::time::Instant;

use eqweight::complex::Variance;
use eqweight::equivariant::{l_chain, l_cochain, HsFiltration};
use eqweight::filtration::{canonical_filtration, canonical_filtration_chain, spectral_sequence, FilteredChainComplex, FilteredComplex, SpectralSequence};
use eqweight::par;
use eqweight::products::{check_identity, equivariant_duality, kunneth, IdentityInstance, SpaceTowers};
use eqweight::resolution::FreeResolution;
use eqweight::spaces::SimplicialGSet;
use eqweight::Result;
use serde_json::{json, Value};

use crate::scenario::{FiltrationKind, HsChoice, Scenario, Side, Task, SCHEMA_VERSION};

/// Entry lists are `[p, q, value]` triples in key order.
fn triples(m: &BTreeMap<(i64, i64), usize>) -> Value {
    Value::Array(m.iter().map(|(&(p, q), &d)| json!([p, q, d])).collect())
}

fn pairs(m: &BTreeMap<i64, usize>) -> Value {
    Value::Array(m.iter().map(|(&k, &d)| json!([k, d])).collect())
}

fn page_label(r: usize) -> Value {
    if r == usize::MAX {
        json!("inf")
    } else {
        json!(r)
    }
}

pub fn resolution(x: &SimplicialGSet, periodic: bool, depth: usize, max_rank: usize) -> Result<FreeResolution> {
    if periodic {
        Ok(FreeResolution::periodic(x.group().order(), depth))
    } else {
        FreeResolution::bar(x.group(), depth, max_rank)
    }
}

struct Context<'a> {
    s: &'a Scenario,
    res: OnceLock<std::result::Result<FreeResolution, String>>,
    towers: OnceLock<std::result::Result<SpaceTowers, String>>,
}

impl Context<'_> {
    fn res(&self) -> Result<FreeResolution> {
        let r = self.res.get_or_init(|| {
            resolution(&self.s.space, self.s.resolution.periodic, self.s.resolution.depth, self.s.budgets.max_rank).map_err(|e| e.to_string())
        });
        r.clone().map_err(eqweight::Error::Argument)
    }

    fn towers(&self) -> Result<&SpaceTowers> {
        let t = self.towers.get_or_init(|| {
            let res = self.res().map_err(|e| e.to_string())?;
            SpaceTowers::new(&self.s.space, &res, self.s.window, 2).map_err(|e| e.to_string())
        });
        t.as_ref().map_err(|e| eqweight::Error::Argument(e.clone()))
    }
}

/// Total-degree change of a differential.
fn step(ss: &SpectralSequence) -> i64 {
    match ss.variance() {
        Variance::Cochain => 1,
        Variance::Chain => -1,
    }
}

/// Entries of page `r` in certified total degrees.
fn certified_entries(ss: &SpectralSequence, r: usize, ok: &dyn Fn(i64) -> bool) -> BTreeMap<(i64, i64), usize> {
    ss.entries(r).into_iter().filter(|&((p, q), _)| ok(p + q)).collect()
}

/// Ranks of `d_r` with source and target in certified degrees.
fn certified_ranks(ss: &SpectralSequence, r: usize, ok: &dyn Fn(i64) -> bool) -> BTreeMap<(i64, i64), usize> {
    ss.differential_ranks(r).into_iter().filter(|&((p, q), _)| ok(p + q) && ok(p + q + step(ss))).collect()
}

fn pages_json(ss: &SpectralSequence, pages: &[usize], ok: &dyn Fn(i64) -> bool, reindex: bool) -> Value {
    let list = pages
        .iter()
        .map(|&r| {
            let mut page = json!({
                "r": r,
                "entries": triples(&certified_entries(ss, r, ok)),
                "differential_ranks": triples(&certified_ranks(ss, r, ok)),
            });
            if reindex {
                let wv = ss.weight_view();
                let keep = |m: BTreeMap<(i64, i64), usize>| -> BTreeMap<(i64, i64), usize> { m.into_iter().filter(|&((p, q), _)| ok(p + q)).collect() };
                let ranks: BTreeMap<(i64, i64), usize> = wv.differential_ranks(r + 1).into_iter().filter(|&((p, q), _)| ok(p + q) && ok(p + q + step(ss))).collect();
                page["reindexed"] = json!({
                    "r": r + 1,
                    "entries": triples(&keep(wv.entries(r + 1))),
                    "differential_ranks": triples(&ranks),
                });
            }
            page
        })
        .collect();
    Value::Array(list)
}

/// First page from `from` on after which every certified differential
/// vanishes. Earlier pages depend on the resolution, so they are not searched.
fn degenerates(ss: &SpectralSequence, from: usize, ok: &dyn Fn(i64) -> bool) -> Value {
    let first = (from..=ss.last_page()).find(|&r| (r..=ss.last_page()).all(|s| certified_ranks(ss, s, ok).is_empty()));
    json!(first)
}

/// Runs one task; `Ok((passed, result))`.
fn run_task(cx: &Context, task: &Task) -> Result<(bool, Value)> {
    let s = cx.s;
    let w = s.window;
    match task {
        Task::Cohomology | Task::Homology => {
            let res = cx.res()?;
            let lc = match task {
                Task::Cohomology => l_cochain(&s.space.cochains(), &res, w)?,
                _ => l_chain(&s.space.chains(), &res, w)?,
            };
            let all = lc.cohomology();
            let uncertified: Vec<i64> = all.iter().filter(|(_, (_, c))| !c).map(|(&k, _)| k).collect();
            Ok((true, json!({ "dims": pairs(&lc.certified_dims()), "uncertified_degrees": uncertified })))
        }
        Task::Hs { filtration, pages } => {
            let res = cx.res()?;
            let lc = l_cochain(&s.space.cochains(), &res, w)?;
            let which = match filtration {
                HsChoice::First => HsFiltration::First,
                HsChoice::Second => HsFiltration::Second,
            };
            let ss = lc.hochschild_serre(which, pages.iter().copied().max().unwrap_or(2))?;
            let ok = |k: i64| lc.certified(k);
            let axes = match filtration {
                HsChoice::First => json!(["group_degree", "coefficient_degree"]),
                HsChoice::Second => json!(["coefficient_degree", "group_degree"]),
            };
            Ok((
                true,
                json!({
                    "filtration": match filtration { HsChoice::First => "first", HsChoice::Second => "second" },
                    "axes": axes,
                    "pages": pages_json(&ss, pages, &ok, false),
                    "infinity": triples(&certified_entries(&ss, ss.last_page(), &ok)),
                    "degenerates_at": degenerates(&ss, 2, &ok),
                }),
            ))
        }
        Task::WeightSs { side, pages } => {
            let res = cx.res()?;
            let r_max = pages.iter().copied().max().unwrap_or(1);
            let (ss, lc) = match side {
                Side::Cohomology => {
                    let k = s.space.cochains();
                    let lc = l_cochain(&k, &res, w)?;
                    let f = match s.filtration {
                        FiltrationKind::Canonical => canonical_filtration(k.complex())?,
                        FiltrationKind::Trivial => FilteredComplex::trivial(k.complex().clone())?,
                    };
                    (spectral_sequence(&lc.induced(&f)?, r_max)?, lc)
                }
                Side::Homology => {
                    let c = s.space.chains();
                    let lc = l_chain(&c, &res, w)?;
                    let f = match s.filtration {
                        FiltrationKind::Canonical => canonical_filtration_chain(c.complex())?,
                        FiltrationKind::Trivial => FilteredChainComplex::trivial(c.complex().clone())?,
                    };
                    (spectral_sequence(&lc.induced_chain(&f)?, r_max)?, lc)
                }
            };
            let ok = |k: i64| lc.certified(k);
            let (lo, hi) = ss.p_range();
            let mut omega = BTreeMap::new();
            for (k, _) in lc.certified_dims() {
                for l in lo..=hi {
                    omega.insert((k, l), ss.abutment_dim(k, l));
                }
            }
            Ok((
                true,
                json!({
                    "side": match side { Side::Cohomology => "cohomology", Side::Homology => "homology" },
                    "pages": pages_json(&ss, pages, &ok, true),
                    "infinity": triples(&certified_entries(&ss, ss.last_page(), &ok)),
                    "omega": triples(&omega),
                    "degenerates_at": degenerates(&ss, 1, &ok),
                }),
            ))
        }
        Task::Kunneth { other, window, depth } => {
            let rx = resolution(&s.space, s.resolution.periodic, *depth, s.budgets.max_rank)?;
            let ry = resolution(other, s.resolution.periodic, *depth, s.budgets.max_rank)?;
            let k = kunneth(&s.space, &rx, other, &ry, *window)?;
            Ok((
                k.agrees(),
                json!({
                    "other": other.name(),
                    "certified_window": k.window,
                    "agrees": k.agrees(),
                    "e1_product": triples(&k.e1_product),
                    "e1_tensor": triples(&k.e1_tensor),
                    "einf_product": triples(&k.einf_product),
                    "einf_tensor": triples(&k.einf_tensor),
                    "omega_product": triples(&k.omega_product),
                    "omega_tensor": triples(&k.omega_tensor),
                }),
            ))
        }
        Task::Cup { page } | Task::Cap { page } => {
            let t = cx.towers()?;
            let cup = matches!(task, Task::Cup { .. });
            let pp = if cup { t.cup_pages() } else { t.cap_pages() };
            let left = t.cohomology_entries(*page);
            let right = if cup { left.clone() } else { t.homology_entries(*page) };
            let mut products = Vec::new();
            for &(a, _) in &left {
                for &(b, _) in &right {
                    if !pp.certified(a, b) {
                        continue;
                    }
                    let m = pp.table(*page, a, b)?;
                    if m.rank() > 0 {
                        let target = pp.target_key(a, b);
                        products.push(json!({ "left": [a.0, a.1], "right": [b.0, b.1], "target": [target.0, target.1], "rank": m.rank() }));
                    }
                }
            }
            let mut on_total = Vec::new();
            if cup {
                for n in 0..=w {
                    for m in 0..=(w - n) {
                        let table = t.cup.on_cohomology(n, m)?;
                        on_total.push(json!([n, m, table.rank()]));
                    }
                }
            }
            let mut out = json!({ "page": page, "products": products });
            if cup {
                out["total_ranks"] = Value::Array(on_total);
            }
            Ok((true, out))
        }
        Task::Identity { identities, map, factor, pages, window, depth } => {
            let res = resolution(&s.space, s.resolution.periodic, *depth, s.budgets.max_rank)?;
            let inst = IdentityInstance {
                space: s.space.clone(),
                map: map.clone(),
                factor: factor.clone(),
                resolution: res,
                window: *window,
                pages: pages.clone(),
            };
            let reports = par::map_slice(identities, |&id| check_identity(id, &inst));
            let mut all = true;
            let mut results = Vec::new();
            for r in reports {
                let r = r?;
                let passed = r.passed() && r.checked > 0;
                all &= passed;
                let witness = r.witness.as_ref().map(|w| {
                    json!({
                        "page": w.page,
                        "entries": w.entries.iter().map(|&(p, q)| json!([p, q])).collect::<Vec<_>>(),
                        "basis": w.basis,
                        "lhs": w.lhs,
                        "rhs": w.rhs,
                    })
                });
                results.push(json!({ "identity": r.identity.name(), "checked": r.checked, "passed": passed, "witness": witness }));
            }
            let pages: Vec<Value> = pages.iter().map(|&r| page_label(r)).collect();
            Ok((all, json!({ "pages": pages, "results": results })))
        }
        Task::Duality { page } => {
            let t = cx.towers()?;
            let d = equivariant_duality(t, *page)?;
            let entries: Vec<Value> = d
                .entries
                .iter()
                .map(|e| {
                    json!({
                        "source": [e.source.0, e.source.1],
                        "target": [e.target.0, e.target.1],
                        "source_dim": e.source_dim,
                        "target_dim": e.target_dim,
                        "rank": e.rank,
                        "bijective": e.bijective(),
                    })
                })
                .collect();
            Ok((
                true,
                json!({
                    "page": page,
                    "class": [d.class_key.0, d.class_key.1],
                    "all_bijective": d.all_bijective(),
                    "entries": entries,
                    "cohomology": pairs(&d.cohomology),
                    "homology": pairs(&d.homology),
                }),
            ))
        }
    }
}

/// A finished run: the report and whether every task passed.
#[derive(Clone, Debug)]
pub struct Report {
    pub value: Value,
    pub all_passed: bool,
}

pub fn run(s: &Scenario) -> Report {
    let cx = Context { s, res: OnceLock::new(), towers: OnceLock::new() };
    let outcomes = par::map_slice(&s.tasks, |task| {
        let start = Instant::now();
        let out = run_task(&cx, task);
        (out, start.elapsed())
    });
    let mut all_passed = true;
    let mut tasks = Vec::new();
    for (i, (task, (out, elapsed))) in s.tasks.iter().zip(outcomes).enumerate() {
        let mut entry = json!({ "index": i, "kind": task.kind() });
        match out {
            Ok((passed, result)) => {
                entry["status"] = json!(if passed { "ok" } else { "failed" });
                entry["result"] = result;
                all_passed &= passed;
            }
            Err(e) => {
                entry["status"] = json!("failed");
                entry["error"] = json!(e.to_string());
                all_passed = false;
            }
        }
        if s.output.timing {
            entry["elapsed_ms"] = json!(elapsed.as_millis() as u64);
        }
        tasks.push(entry);
    }
    let x = &s.space;
    let value = json!({
        "schema_version": SCHEMA_VERSION,
        "name": s.name,
        "input_digest": s.digest,
        "space": { "name": x.name(), "group_order": x.group().order(), "counts": (0..=x.dim()).map(|k| x.count(k)).collect::<Vec<_>>() },
        "resolution": { "kind": if s.resolution.periodic { "periodic" } else { "bar" }, "depth": s.resolution.depth },
        "window": s.window,
        "tasks": tasks,
    });
    Report { value, all_passed }
}
