//! Shared text and JSON renderings.

use netcomp::bounds::{BoundKind, CutRow, RateCertificate};
use netcomp::sets::SourceSet;
use netcomp::{BoundReport, BoundValue, Network};
use serde_json::{json, Value};

/// 1-based source indices, `{1,3}`.
pub fn sources(set: SourceSet) -> String {
    let ids: Vec<String> = set.iter().map(|i| (i.0 + 1).to_string()).collect();
    format!("{{{}}}", ids.join(","))
}

pub fn source_list(set: SourceSet) -> Vec<usize> {
    set.iter().map(|i| i.0 + 1).collect()
}

pub fn tuple(xs: &[usize]) -> String {
    let cells: Vec<String> = xs.iter().map(usize::to_string).collect();
    format!("({})", cells.join(","))
}

/// Rounded to 6 decimals; `null` for `+inf`.
pub fn approx_json(x: f64) -> Value {
    if x.is_finite() {
        json!((x * 1e6).round() / 1e6)
    } else {
        Value::Null
    }
}

pub fn approx_text(x: f64) -> String {
    if x.is_finite() {
        format!("{x:.6}")
    } else {
        "inf".into()
    }
}

fn gcd(a: usize, b: usize) -> usize {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

fn power_of(g: usize, x: usize) -> Option<usize> {
    let (mut p, mut j) = (1usize, 0);
    while p < x {
        p = p.checked_mul(g)?;
        j += 1;
    }
    (p == x).then_some(j)
}

/// `(i, j)` with `q = g^i` and `count = g^j` for a common base `g`, so that
/// `log_q(count) = j / i`.
fn log_exact(q: usize, count: usize) -> Option<(usize, usize)> {
    (2..=q.min(count)).find_map(|g| Some((power_of(g, q)?, power_of(g, count)?)))
}

/// `|C|/log_q(W)`, plus the reduced rational when the logarithm is rational.
pub fn exact_value(value: &BoundValue, q: usize) -> (String, Option<String>) {
    match value {
        BoundValue::Infinite => ("inf".into(), None),
        BoundValue::Finite(r) => {
            let form = format!("{}/log_{q}({})", r.cut_size, r.count);
            let rational = log_exact(q, r.count).map(|(i, j)| {
                let g = gcd(r.cut_size * i, j);
                let (a, b) = (r.cut_size * i / g, j / g);
                if b == 1 {
                    a.to_string()
                } else {
                    format!("{a}/{b}")
                }
            });
            (form, rational)
        }
    }
}

/// Headline value: the rational when exact, else the 6-decimal float.
pub fn headline(report: &BoundReport) -> String {
    let (form, rational) = exact_value(&report.value, report.input_size);
    match rational {
        Some(r) => format!("{r}  (= {form})"),
        None if report.value.is_finite() => format!("{}  (= {form}, approximate)", approx_text(report.approx())),
        None => "inf  (no cut constrains the rate)".into(),
    }
}

pub fn count_label(kind: BoundKind) -> &'static str {
    match kind {
        BoundKind::MinCut => "W",
        BoundKind::MinCutA | BoundKind::MinCutK => "R",
        BoundKind::Prop2 | BoundKind::Prop1 => "|f[A]|",
    }
}

fn certificate_form(row: &CutRow, edge_alphabet: usize) -> String {
    format!("{}^k <= {}^({}n)", row.count, edge_alphabet, row.analysis.cut.len())
}

pub fn row_json(net: &Network, kind: BoundKind, row: &CutRow, report: &BoundReport) -> Value {
    let (form, rational) = exact_value(&row.value, report.input_size);
    json!({
        "cut": net.edge_names(row.analysis.cut),
        "cut_size": row.analysis.cut.len(),
        "nodes": row.nodes.map(|n| {
            n.iter().map(|v| net.node_name(v).to_string()).collect::<Vec<_>>()
        }),
        "count_label": count_label(kind),
        "count": row.count,
        "I_C": source_list(row.analysis.separated),
        "J_C": source_list(row.analysis.side),
        "context": row.context,
        "value": {
            "exact": form,
            "rational": rational,
            "approx": approx_json(row.value.approx(report.input_size)),
        },
        "certificate_form": certificate_form(row, report.edge_alphabet),
    })
}

pub fn bound_json(net: &Network, report: &BoundReport) -> Value {
    let (form, rational) = exact_value(&report.value, report.input_size);
    let per_cut: Vec<Value> = report
        .per_cut
        .iter()
        .map(|r| row_json(net, report.kind, r, report))
        .collect();
    json!({
        "kind": report.kind.name(),
        "finite": report.value.is_finite(),
        "exact": form,
        "rational": rational,
        "approx": approx_json(report.approx()),
        "witness": report.witness.as_ref().map(|w| row_json(net, report.kind, w, report)),
        "cuts_examined": report.cuts_examined,
        "per_cut": per_cut,
    })
}

pub fn row_text(net: &Network, kind: BoundKind, row: &CutRow, report: &BoundReport) -> String {
    let mut out = String::new();
    let label = count_label(kind);
    out.push_str(&format!("  witness      {}\n", net.format_edges(row.analysis.cut)));
    if let Some(nodes) = row.nodes {
        out.push_str(&format!("  node set     {}\n", net.format_nodes(nodes)));
    }
    out.push_str(&format!("  |C|          {}\n", row.analysis.cut.len()));
    out.push_str(&format!("  {label:<12} {}\n", row.count));
    out.push_str(&format!("  I_C          {}\n", sources(row.analysis.separated)));
    out.push_str(&format!("  J_C          {}\n", sources(row.analysis.side)));
    if let Some(c) = &row.context {
        out.push_str(&format!("  c*           {}\n", tuple(c)));
    }
    out.push_str(&format!(
        "  certificate  rate k/n needs {}\n",
        certificate_form(row, report.edge_alphabet)
    ));
    out
}

pub fn bound_text(net: &Network, report: &BoundReport) -> String {
    let mut out = format!("{}: {}\n", net.name(), report.kind);
    out.push_str(&format!("  value        {}\n", headline(report)));
    if report.value.is_finite() {
        out.push_str(&format!("  approx       {}\n", approx_text(report.approx())));
    }
    if let Some(w) = &report.witness {
        out.push_str(&row_text(net, report.kind, w, report));
    }
    out.push_str(&format!("  cuts         {} examined\n", report.cuts_examined));
    if !report.per_cut.is_empty() {
        out.push_str("  all cuts:\n");
        for r in &report.per_cut {
            let (form, _) = exact_value(&r.value, report.input_size);
            out.push_str(&format!(
                "    {:<24} I_C={:<8} J_C={:<8} {}={:<4} {} ~ {}\n",
                net.format_edges(r.analysis.cut),
                sources(r.analysis.separated),
                sources(r.analysis.side),
                count_label(report.kind),
                r.count,
                form,
                approx_text(r.value.approx(report.input_size)),
            ));
        }
    }
    out
}

pub fn certificate_json(c: &RateCertificate) -> Value {
    json!({
        "count": c.count,
        "k": c.k,
        "n": c.n,
        "edge_alphabet": c.edge_alphabet,
        "edges": c.cut_size,
        "satisfied": c.satisfied,
        "text": c.to_string(),
    })
}
