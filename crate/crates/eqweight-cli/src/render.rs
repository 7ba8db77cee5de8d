//! Report rendering. JSON is the canonical form; tables are for reading.

use std::collections::BTreeMap;
use std::fmt::Write;

use serde_json::Value;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Format {
    Json,
    Table,
}

pub fn render(report: &Value, format: Format) -> String {
    match format {
        Format::Json => {
            let mut s = serde_json::to_string_pretty(report).expect("reports serialize");
            s.push('\n');
            s
        }
        Format::Table => table(report),
    }
}

fn triples(v: &Value) -> BTreeMap<(i64, i64), u64> {
    let mut m = BTreeMap::new();
    for t in v.as_array().into_iter().flatten() {
        if let (Some(p), Some(q), Some(d)) = (t[0].as_i64(), t[1].as_i64(), t[2].as_u64()) {
            m.insert((p, q), d);
        }
    }
    m
}

/// A `p` by `q` grid, `q` descending down the rows; empty cells print `.`.
pub fn grid(entries: &BTreeMap<(i64, i64), u64>) -> String {
    if entries.is_empty() {
        return "  (zero)\n".to_string();
    }
    let (p0, p1) = (entries.keys().map(|k| k.0).min().unwrap(), entries.keys().map(|k| k.0).max().unwrap());
    let (q0, q1) = (entries.keys().map(|k| k.1).min().unwrap(), entries.keys().map(|k| k.1).max().unwrap());
    let width = entries.values().map(|d| d.to_string().len()).chain((p0..=p1).map(|p| p.to_string().len())).max().unwrap_or(1);
    let label = (q0..=q1).map(|q| q.to_string().len()).max().unwrap_or(1);
    let mut out = String::new();
    for q in (q0..=q1).rev() {
        let _ = write!(out, "  {q:>label$} |");
        for p in p0..=p1 {
            let cell = entries.get(&(p, q)).map_or(".".to_string(), u64::to_string);
            let _ = write!(out, " {cell:>width$}");
        }
        out.push('\n');
    }
    let _ = write!(out, "  {:>label$} +{}\n  {:>label$}  ", "", "-".repeat((width + 1) * (p1 - p0 + 1) as usize), "");
    for p in p0..=p1 {
        let _ = write!(out, " {p:>width$}");
    }
    out.push('\n');
    out
}

fn pairs_line(v: &Value) -> String {
    let parts: Vec<String> = v.as_array().into_iter().flatten().map(|t| format!("{}:{}", t[0], t[1])).collect();
    if parts.is_empty() {
        "(zero)".to_string()
    } else {
        parts.join(" ")
    }
}

fn pages(out: &mut String, pages: &Value, axes: &str) {
    for page in pages.as_array().into_iter().flatten() {
        let _ = writeln!(out, "  {}", format!("E_{} {axes}", page["r"]).trim_end());
        out.push_str(&grid(&triples(&page["entries"])));
        let ranks = triples(&page["differential_ranks"]);
        if !ranks.is_empty() {
            let list: Vec<String> = ranks.iter().map(|(k, r)| format!("({},{})→{r}", k.0, k.1)).collect();
            let _ = writeln!(out, "  rank d_{}: {}", page["r"], list.join(" "));
        }
        if let Some(re) = page.get("reindexed") {
            let _ = writeln!(out, "  reindexed Ẽ_{}", re["r"]);
            out.push_str(&grid(&triples(&re["entries"])));
        }
    }
}

fn table(report: &Value) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "scenario {}  digest {}", report["name"].as_str().unwrap_or(""), report["input_digest"].as_str().unwrap_or(""));
    let _ = writeln!(
        out,
        "space {} (|G| = {})  resolution {} depth {}  window {}",
        report["space"]["name"].as_str().unwrap_or(""),
        report["space"]["group_order"],
        report["resolution"]["kind"].as_str().unwrap_or(""),
        report["resolution"]["depth"],
        report["window"]
    );
    for task in report["tasks"].as_array().into_iter().flatten() {
        let kind = task["kind"].as_str().unwrap_or("");
        let _ = writeln!(out, "\n[{}] {} {}", task["index"], kind, task["status"].as_str().unwrap_or(""));
        if let Some(e) = task.get("error") {
            let _ = writeln!(out, "  error: {}", e.as_str().unwrap_or(""));
            continue;
        }
        let r = &task["result"];
        match kind {
            "cohomology" | "homology" => {
                let _ = writeln!(out, "  dims {}", pairs_line(&r["dims"]));
            }
            "hs" => {
                let axes = format!("(columns {}, rows {})", r["axes"][0].as_str().unwrap_or(""), r["axes"][1].as_str().unwrap_or(""));
                pages(&mut out, &r["pages"], &axes);
                let _ = writeln!(out, "  E_inf");
                out.push_str(&grid(&triples(&r["infinity"])));
            }
            "weight_ss" => {
                pages(&mut out, &r["pages"], "");
                let _ = writeln!(out, "  E_inf");
                out.push_str(&grid(&triples(&r["infinity"])));
                let _ = writeln!(out, "  omega (columns k, rows l)");
                out.push_str(&grid(&triples(&r["omega"])));
            }
            "kunneth" => {
                let _ = writeln!(out, "  with {}  window {}  agrees {}", r["other"].as_str().unwrap_or(""), r["certified_window"], r["agrees"]);
                let _ = writeln!(out, "  E_1 of the product");
                out.push_str(&grid(&triples(&r["e1_product"])));
            }
            "cup" | "cap" => {
                for p in r["products"].as_array().into_iter().flatten() {
                    let _ = writeln!(out, "  {} x {} -> {}  rank {}", p["left"], p["right"], p["target"], p["rank"]);
                }
                if let Some(t) = r.get("total_ranks") {
                    let nonzero: Vec<String> =
                        t.as_array().into_iter().flatten().filter(|x| x[2].as_u64() != Some(0)).map(|x| format!("H^{} x H^{}: {}", x[0], x[1], x[2])).collect();
                    let _ = writeln!(out, "  on H*: {}", nonzero.join(", "));
                }
            }
            "identity" => {
                for i in r["results"].as_array().into_iter().flatten() {
                    let verdict = if i["passed"] == Value::Bool(true) { "pass" } else { "FAIL" };
                    let _ = writeln!(out, "  {:<18} {verdict}  ({} checks)", i["identity"].as_str().unwrap_or(""), i["checked"]);
                }
            }
            "duality" => {
                let _ = writeln!(out, "  class {}  all bijective {}", r["class"], r["all_bijective"]);
                for e in r["entries"].as_array().into_iter().flatten() {
                    let _ = writeln!(out, "  {} -> {}  {} -> {}  rank {}", e["source"], e["target"], e["source_dim"], e["target_dim"], e["rank"]);
                }
            }
            _ => {}
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn grid_puts_high_q_first() {
        let m = BTreeMap::from([((0, 0), 1), ((1, 0), 1), ((0, 1), 2)]);
        let g = grid(&m);
        let rows: Vec<&str> = g.lines().collect();
        assert!(rows[0].starts_with("  1 |"));
        assert!(rows[0].ends_with("2 ."));
        assert!(rows[1].ends_with("1 1"));
    }
}
