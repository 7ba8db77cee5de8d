//! One line per acceptance criterion, PASS or FAIL, then a nonzero exit if
//! any failed. Runs without the libtest harness so the lines always print.

use std::collections::BTreeMap;
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::time::Instant;

use eqweight::complex::Complex;
use eqweight::equivariant::{default_depth, l_chain, l_cochain, row_complex, HsFiltration, LComplex};
use eqweight::filtration::{canonical_filtration, spectral_sequence, FilteredComplex, SpectralSequence};
use eqweight::gf2::{self, BitMatrix, BitVec, Subspace};
use eqweight::group::{FiniteGroup, GComplex};
use eqweight::products::{equivariant_duality, kunneth, SpaceTowers};
use eqweight::resolution::FreeResolution;
use eqweight::spaces::{builtin, SimplicialGSet, BUILTINS};
use eqweight_cli::render::{render, Format};
use eqweight_cli::run::run;
use eqweight_cli::scenario::parse;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::Value;

type Check = Result<(), String>;

macro_rules! ensure {
    ($cond:expr, $($msg:tt)+) => {
        if !$cond {
            return Err(format!($($msg)+));
        }
    };
}

fn e<T, E: std::fmt::Display>(r: Result<T, E>) -> Result<T, String> {
    r.map_err(|e| e.to_string())
}

fn space(name: &str) -> SimplicialGSet {
    builtin(name).unwrap()
}

fn periodic_for(x: &SimplicialGSet, k: &Complex, window: i64) -> FreeResolution {
    if x.group().order() == 1 {
        FreeResolution::trivial()
    } else {
        FreeResolution::periodic(x.group().order(), default_depth(k, window))
    }
}

fn cochain_l(x: &SimplicialGSet, window: i64) -> Result<(GComplex, LComplex), String> {
    let k = x.cochains();
    let lc = e(l_cochain(&k, &periodic_for(x, k.complex(), window), window))?;
    Ok((k, lc))
}

/// Canonical weight tower of `x`.
fn weight_tower(x: &SimplicialGSet, window: i64, r_max: usize) -> Result<(LComplex, SpectralSequence), String> {
    let (k, lc) = cochain_l(x, window)?;
    let f = e(canonical_filtration(k.complex()))?;
    let ss = e(spectral_sequence(&e(lc.induced(&f))?, r_max))?;
    Ok((lc, ss))
}

fn certified(m: BTreeMap<(i64, i64), usize>, lc: &LComplex) -> BTreeMap<(i64, i64), usize> {
    m.into_iter().filter(|&((p, q), d)| d > 0 && lc.certified(p + q)).collect()
}

fn scenario(doc: &str) -> eqweight_cli::scenario::Scenario {
    parse(doc).unwrap_or_else(|errs| panic!("{errs:?}"))
}

fn cohomology_dims(x: &SimplicialGSet, res: &FreeResolution, window: i64) -> Result<BTreeMap<i64, usize>, String> {
    Ok(e(l_cochain(&x.cochains(), res, window))?.certified_dims())
}

fn reflection_dims() -> Check {
    let x = space("reflection_circle");
    let want: BTreeMap<i64, usize> = (0..=8).map(|k| (k, if k == 0 { 1 } else { 2 })).collect();
    let depth = default_depth(x.cochains().complex(), 8);
    for (label, res) in [("periodic", FreeResolution::periodic(2, depth)), ("bar", e(FreeResolution::bar(x.group(), depth, 4096))?)] {
        let start = Instant::now();
        let dims = cohomology_dims(&x, &res, 8)?;
        let secs = start.elapsed().as_secs_f64();
        ensure!(dims == want, "{label}: {dims:?}");
        ensure!(secs < 10.0, "{label} took {secs:.1} s");
    }
    Ok(())
}

fn reflection_hs_degenerates() -> Check {
    let (lc, _) = weight_tower(&space("reflection_circle"), 8, 1)?;
    let ss = e(lc.hochschild_serre(HsFiltration::First, 3))?;
    let d2: Vec<_> = ss.differential_ranks(2).into_iter().filter(|&((p, q), _)| lc.certified(p + q) && lc.certified(p + q + 1)).collect();
    ensure!(d2.is_empty(), "d_2 ranks {d2:?}");
    let e2 = certified(ss.entries(2), &lc);
    ensure!(e2 == certified(ss.infinity_entries(), &lc), "E_2 differs from E_inf");
    let want: BTreeMap<(i64, i64), usize> = (0..=8).flat_map(|p| [(p, 0), (p, 1)]).filter(|&(p, q)| p + q <= 8).map(|k| (k, 1)).collect();
    ensure!(e2 == want, "E_2 = {e2:?}");
    Ok(())
}

fn antipodal_hs() -> Check {
    let x = space("antipodal_circle");
    let (lc, _) = weight_tower(&x, 8, 1)?;
    let dims = lc.certified_dims();
    let want: BTreeMap<i64, usize> = (0..=8).map(|k| (k, usize::from(k <= 1))).collect();
    ensure!(dims == want, "dims {dims:?}");
    let ss = e(lc.hochschild_serre(HsFiltration::First, 4))?;
    let d2: BTreeMap<(i64, i64), usize> = ss.differential_ranks(2).into_iter().filter(|&((p, q), _)| lc.certified(p + q + 1)).collect();
    let want: BTreeMap<(i64, i64), usize> = (0..=6).map(|p| ((p, 1), 1)).collect();
    ensure!(d2 == want, "d_2 ranks {d2:?}");
    let e3 = certified(ss.entries(3), &lc);
    let shown = BTreeMap::from([((0, 0), 1), ((1, 0), 1)]);
    ensure!(e3 == shown, "E_3 = {e3:?}");
    ensure!(certified(ss.infinity_entries(), &lc) == shown, "not degenerate at E_3");
    Ok(())
}

fn reflection_homology() -> Check {
    let x = space("reflection_circle");
    let c = x.chains();
    let res = FreeResolution::periodic(2, default_depth(c.complex(), 8) + 2);
    let dims = e(l_chain(&c, &res, 8))?.certified_dims();
    for k in -8..=3 {
        let want = match k {
            ..=0 => 2,
            1 => 1,
            _ => 0,
        };
        ensure!(dims.get(&k).copied().unwrap_or(0) == want, "H_{k}: {dims:?}");
    }
    ensure!((-8..=0).all(|k| dims.contains_key(&k)), "degrees -8..0 not all certified: {dims:?}");
    let cohomology = cohomology_dims(&x, &FreeResolution::periodic(2, default_depth(x.cochains().complex(), 8)), 8)?;
    let as_homology: BTreeMap<i64, usize> = dims.iter().filter(|&(_, &d)| d > 0).map(|(&k, &d)| (k, d)).collect();
    ensure!(as_homology != cohomology, "homology dims coincide with cohomology dims");
    ensure!(dims[&0] != cohomology[&0], "degree 0 agrees");
    Ok(())
}

fn weight_page_two_is_hs_page_two() -> Check {
    for name in ["reflection_circle", "antipodal_circle", "torus_swap"] {
        let (lc, ss) = weight_tower(&space(name), 4, 2)?;
        let hs = e(lc.hochschild_serre(HsFiltration::First, 2))?;
        let w = certified(ss.weight_view().entries(2), &lc);
        let h = certified(hs.entries(2), &lc);
        ensure!(!w.is_empty() && w == h, "{name}: weight {w:?} vs HS {h:?}");
    }
    Ok(())
}

fn row_identity() -> Check {
    for &name in BUILTINS {
        let x = space(name);
        let d = x.dim() as i64;
        let (k, lc) = cochain_l(&x, 8 + d)?;
        let f = e(canonical_filtration(k.complex()))?;
        let ss = e(spectral_sequence(&e(lc.induced(&f))?, 2))?;
        let wv = ss.weight_view();
        for q in 0..=d {
            let row = e(row_complex(&k, &f, q))?;
            let rl = e(l_cochain(&row, &periodic_for(&x, row.complex(), 8), 8))?;
            for p in 0..=8 {
                ensure!(lc.certified(p + q) && rl.certified(p), "{name}: ({p}, {q}) not certified");
                let aux = rl.certified_dims().get(&p).copied().unwrap_or(0);
                ensure!(wv.dim(2, p, q) == aux, "{name}: E_2^({p},{q}) = {} but row cohomology {aux}", wv.dim(2, p, q));
            }
        }
    }
    Ok(())
}

fn bounds_and_omega() -> Check {
    for &name in BUILTINS {
        let x = space(name);
        let d = x.dim() as i64;
        let (lc, ss) = weight_tower(&x, 6, 4)?;
        let wv = ss.weight_view();
        for r in 2..=ss.last_page() + 1 {
            for ((p, q), _) in certified(wv.entries(r), &lc) {
                ensure!((0..=d).contains(&q) && p >= 0, "{name}: page {r} has ({p}, {q})");
            }
        }
        let inf = certified(wv.infinity_entries(), &lc);
        for (k, dim) in lc.certified_dims() {
            let graded = |l: i64| -> usize { inf.iter().filter(|&(&(p, q), _)| p + q == k && -q >= l).map(|(_, &v)| v).sum() };
            ensure!(wv.omega_dim(k, -d) == dim && graded(-d) == dim, "{name}: Omega^-d H^{k}");
            ensure!(wv.omega_dim(k, 1) == 0 && graded(1) == 0, "{name}: Omega^1 H^{k}");
        }
    }
    Ok(())
}

fn reports_without_resolution(doc: &str) -> Value {
    let r = run(&scenario(doc));
    r.value["tasks"].clone()
}

fn resolution_independence() -> Check {
    let cases = [
        ("reflection_circle", 4),
        ("antipodal_circle", 4),
        ("point_z2", 4),
        ("rotation_circle_z3", 3),
        ("point_z3", 3),
        ("rotation_circle_z4", 2),
        ("point_z4", 2),
    ];
    for (name, window) in cases {
        let tasks = r#"[{"kind": "cohomology"}, {"kind": "homology"},
            {"kind": "hs", "filtration": "first", "pages": [2, 3]}, {"kind": "hs", "filtration": "second", "pages": [2]},
            {"kind": "weight_ss", "pages": [1, 2]}, {"kind": "weight_ss", "side": "homology", "pages": [1, 2]}]"#;
        let doc = |kind: &str| format!(r#"{{"version": 1, "name": "{name}", "space": {{"builtin": "{name}"}}, "resolution": {{"kind": "{kind}"}}, "window": {window}, "tasks": {tasks}}}"#);
        let (bar, per) = (reports_without_resolution(&doc("bar")), reports_without_resolution(&doc("periodic")));
        ensure!(bar.as_array().unwrap().iter().all(|t| t["status"] == "ok"), "{name}: bar run failed");
        ensure!(bar == per, "{name}: bar and periodic reports differ");
    }
    Ok(())
}

fn odd_order_collapse() -> Check {
    let x = space("rotation_circle_z3");
    let (lc, ss) = weight_tower(&x, 6, 4)?;
    let (fixed, _) = x.cochains().fixed_subcomplex();
    let fss = e(spectral_sequence(&e(canonical_filtration(&fixed))?, 4))?;
    for r in 2..=5 {
        let eq = certified(ss.weight_view().entries(r), &lc);
        let fx = certified(fss.weight_view().entries(r), &lc);
        ensure!(eq == fx, "page {r}: {eq:?} vs fixed {fx:?}");
    }
    let (_, point) = cochain_l(&space("point_z3"), 8)?;
    let dims = point.certified_dims();
    ensure!((0..=8).all(|p| dims.get(&p).copied() == Some(usize::from(p == 0))), "H*(Z/3) = {dims:?}");
    Ok(())
}

fn kunneth_torus() -> Check {
    let x = space("reflection_circle");
    let kxy = e(x.cochains().tensor_external(&x.cochains()))?;
    let res = FreeResolution::periodic(2, default_depth(kxy.complex(), 6));
    let rep = e(kunneth(&x, &res, &x, &res, 6))?;
    ensure!(rep.window >= 6, "certified only up to {}", rep.window);
    ensure!(rep.agrees(), "product and tensor towers differ");
    Ok(())
}

fn identity_suites() -> Check {
    let all = r#"["commutativity", "associativity", "cup_functoriality", "cross_naturality", "pairing", "mixed", "projection"]"#;
    let docs = [
        format!(r#"{{"version": 1, "name": "fold", "space": {{"builtin": "reflection_circle"}}, "window": 4,
            "tasks": [{{"kind": "identity", "identities": {all}, "map": {{"kind": "fold", "source": "two_reflection_circles"}}}}]}}"#),
        format!(r#"{{"version": 1, "name": "swap", "space": {{"builtin": "torus_swap"}}, "window": 3,
            "tasks": [{{"kind": "identity", "identities": {all}, "map": {{"kind": "constant", "source": "reflection_circle", "vertex": 0}}}}]}}"#),
    ];
    for doc in &docs {
        let report = run(&scenario(doc));
        let results = report.value["tasks"][0]["result"]["results"].as_array().cloned().unwrap_or_default();
        ensure!(results.len() == 7, "{}: {}", report.value["name"], report.value["tasks"][0]);
        for r in results {
            ensure!(r["passed"] == true && r["checked"].as_u64() > Some(0), "{}: {r}", report.value["name"]);
        }
    }
    Ok(())
}

fn duality() -> Check {
    let x = space("reflection_circle");
    let t = e(SpaceTowers::new(&x, &periodic_for(&x, x.cochains().complex(), 4), 4, 2))?;
    let rep = e(equivariant_duality(&t, 2))?;
    ensure!(!rep.entries.is_empty() && rep.all_bijective(), "cap with [S^1] is not bijective on E_2");
    for name in ["circle", "torus"] {
        let x = space(name);
        let d = x.dim() as i64;
        let t = e(SpaceTowers::new(&x, &FreeResolution::trivial(), d, 2))?;
        let rep = e(equivariant_duality(&t, 2))?;
        ensure!(rep.all_bijective(), "{name}: not bijective");
        for k in 0..=d {
            let (a, b) = (rep.cohomology.get(&k).copied().unwrap_or(0), rep.homology.get(&(d - k)).copied().unwrap_or(0));
            ensure!(a == b && a == x.cochains().complex().homology_dim(k), "{name}: H^{k} = {a}, H_{} = {b}", d - k);
        }
    }
    Ok(())
}

/// A random cochain complex in degrees 0..=3 that splits into singletons and
/// pairs `x ↦ y`, each with a filtration level, hidden by a random
/// filtration-preserving change of basis. Returns it with `dim H^n`.
fn random_filtered(rng: &mut ChaCha8Rng) -> (FilteredComplex, Vec<usize>) {
    let mut levels: Vec<Vec<i64>> = vec![Vec::new(); 4];
    let mut edges = Vec::new();
    let mut betti = vec![0; 4];
    for _ in 0..rng.gen_range(0..7) {
        let n = rng.gen_range(0..4usize);
        let a = rng.gen_range(-2i64..=2);
        if n < 3 && rng.gen_bool(0.5) {
            levels[n].push(a);
            levels[n + 1].push(a + rng.gen_range(0..=3));
            edges.push((n, levels[n].len() - 1, levels[n + 1].len() - 1));
        } else {
            levels[n].push(a);
            betti[n] += 1;
        }
    }
    // Sort by descending level so that every F^p is a coordinate prefix.
    let pos: Vec<Vec<usize>> = levels
        .iter_mut()
        .map(|l| {
            let mut idx: Vec<usize> = (0..l.len()).collect();
            idx.sort_by_key(|&i| std::cmp::Reverse(l[i]));
            let mut pos = vec![0; idx.len()];
            for (new, &old) in idx.iter().enumerate() {
                pos[old] = new;
            }
            *l = idx.iter().map(|&i| l[i]).collect();
            pos
        })
        .collect();
    let dims: Vec<usize> = levels.iter().map(Vec::len).collect();
    let change: Vec<BitMatrix> = dims
        .iter()
        .map(|&k| {
            let mut t = BitMatrix::identity(k);
            for i in 0..k {
                for j in 0..i {
                    t.set(i, j, rng.gen_bool(0.4));
                }
            }
            t
        })
        .collect();
    let inverse = |t: &BitMatrix| BitMatrix::from_rows(t.rows(), &(0..t.rows()).map(|i| gf2::solve(t, &BitVec::unit(t.rows(), i)).unwrap()).collect::<Vec<_>>());
    let diffs = (0..4)
        .map(|n| {
            let next = if n < 3 { dims[n + 1] } else { 0 };
            let mut d = BitMatrix::zeros(dims[n], next);
            for &(m, i, j) in &edges {
                if m == n {
                    d.set(pos[n][i], pos[n + 1][j], true);
                }
            }
            if n < 3 {
                change[n].mul(&d).mul(&inverse(&change[n + 1]))
            } else {
                d
            }
        })
        .collect();
    let complex = Complex::cochain(0, dims.clone(), diffs).unwrap();
    let f = FilteredComplex::from_fn(complex, -2, 5, |p, n| Subspace::coordinate(dims[n as usize], 0..levels[n as usize].iter().filter(|&&a| a >= p).count())).unwrap();
    (f, betti)
}

fn recursion_holds(ss: &SpectralSequence) -> Check {
    e(ss.verify())?;
    for r in 0..ss.last_page() {
        let (dp, dq) = ss.differential_shift(r);
        for p in -6..=8 {
            for q in -8..=10 {
                if let (Some(a), Some(b)) = (ss.differential(r, p, q), ss.differential(r, p + dp, q + dq)) {
                    ensure!(a.cols() != b.rows() || a.mul(b).is_zero(), "d_{r} d_{r} != 0 at ({p}, {q})");
                }
                let next = ss.dim(r, p, q) - ss.differential_rank(r, p, q) - ss.differential_rank(r, p - dp, q - dq);
                ensure!(ss.dim(r + 1, p, q) == next, "E_{} at ({p}, {q})", r + 1);
            }
        }
    }
    Ok(())
}

fn property_suites() -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed);
    for case in 0..200 {
        let (f, betti) = random_filtered(&mut rng);
        let r_max = rng.gen_range(1..=5);
        let ss = e(spectral_sequence(&f, r_max))?;
        recursion_holds(&ss).map_err(|m| format!("case {case}: {m}"))?;
        for (n, &b) in betti.iter().enumerate() {
            let total: usize = ss.infinity_entries().iter().filter(|(k, _)| k.0 + k.1 == n as i64).map(|(_, d)| d).sum();
            ensure!(total == b, "case {case}: abutment in degree {n}");
        }
        let seq = eqweight::par::sequential(|| spectral_sequence(&f, r_max)).map_err(|e| e.to_string())?;
        ensure!((0..=ss.last_page()).all(|r| ss.entries(r) == seq.entries(r) && ss.differential_ranks(r) == seq.differential_ranks(r)), "case {case}: thread modes differ");
    }
    for (g, max_depth) in [(FiniteGroup::cyclic(2), 8), (FiniteGroup::cyclic(3), 6), (FiniteGroup::cyclic(4), 5), (FiniteGroup::dihedral(3), 3)] {
        for depth in 0..=max_depth {
            e(FreeResolution::periodic(g.order(), depth).verify()).map_err(|m| format!("periodic: {m}"))?;
            e(e(FreeResolution::bar(&g, depth, 4096))?.verify()).map_err(|m| format!("bar: {m}"))?;
        }
    }
    for &name in BUILTINS {
        let x = space(name);
        let k = x.cochains();
        if x.group().order() == 1 {
            continue;
        }
        let depth = default_depth(k.complex(), 3);
        let a = e(l_cochain(&k, &FreeResolution::periodic(x.group().order(), depth), 3))?.certified_dims();
        let b = e(l_cochain(&k, &FreeResolution::periodic(x.group().order(), depth + 2), 3))?.certified_dims();
        ensure!(a.iter().all(|(k, d)| b.get(k) == Some(d)), "{name}: deeper resolution changed certified dims");
        let (lc, ss) = weight_tower(&x, 3, 3)?;
        recursion_holds(&ss).map_err(|m| format!("{name}: {m}"))?;
        for (n, dim) in lc.certified_dims() {
            ensure!(ss.homology_dim(n) == dim, "{name}: abutment in degree {n}");
        }
    }
    let s = scenario(&std::fs::read_to_string(concat!(env!("CARGO_MANIFEST_DIR"), "/../../scenarios/reflection_circle_full.json")).map_err(|e| e.to_string())?);
    let one = render(&run(&s).value, Format::Json);
    ensure!(one == render(&run(&s).value, Format::Json), "two runs differ");
    ensure!(one == eqweight::par::sequential(|| render(&run(&s).value, Format::Json)), "sequential run differs");
    Ok(())
}

fn main() {
    let criteria: [(&str, fn() -> Check); 13] = [
        ("reflection circle cohomology, bar and periodic, window 8", reflection_dims),
        ("reflection circle Hochschild-Serre d_2 = 0 and E_2 = E_inf", reflection_hs_degenerates),
        ("antipodal circle cohomology, d_2 from row 1, E_3", antipodal_hs),
        ("reflection circle equivariant homology", reflection_homology),
        ("weight page 2 equals Hochschild-Serre page 2", weight_page_two_is_hs_page_two),
        ("row identity on all builtins", row_identity),
        ("bounds on weight pages and the Omega filtration", bounds_and_omega),
        ("bar and periodic resolutions give identical reports", resolution_independence),
        ("odd-order collapse onto the fixed subcomplex", odd_order_collapse),
        ("Kunneth for the reflection torus", kunneth_torus),
        ("product identities on two scenarios", identity_suites),
        ("duality by cap with the fundamental class", duality),
        ("engine property suites", property_suites),
    ];
    // Panics become FAIL lines; the default hook would also print a backtrace.
    std::panic::set_hook(Box::new(|_| {}));
    let mut failed = 0;
    for (i, (name, check)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let outcome = catch_unwind(AssertUnwindSafe(check)).unwrap_or_else(|p| {
            Err(p.downcast_ref::<String>().cloned().or_else(|| p.downcast_ref::<&str>().map(|s| s.to_string())).unwrap_or_else(|| "panicked".into()))
        });
        let ms = start.elapsed().as_millis();
        match outcome {
            Ok(()) => println!("PASS {:>2} {name} ({ms} ms)", i + 1),
            Err(why) => {
                failed += 1;
                println!("FAIL {:>2} {name} ({ms} ms): {why}", i + 1);
            }
        }
    }
    println!("{} of {} criteria passed", criteria.len() - failed, criteria.len());
    if failed > 0 {
        std::process::exit(1);
    }
}
