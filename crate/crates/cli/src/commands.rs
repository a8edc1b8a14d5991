//! One function per subcommand.

use std::fs;
use std::path::Path;

use netcomp::bounds::{self, BoundKind, BoundOptions};
use netcomp::code::{exhaustive_search, execute, verify, SearchConfig, SearchOutcome, VerifyOutcome};
use netcomp::equivalence::{count_w_for_cut, partition};
use netcomp::instances;
use netcomp::radix;
use netcomp::sets::{SourceIdx, SourceSet};
use netcomp::tree::{self, TreeError};
use netcomp::{InputMatrix, Network, NetworkCode, NetworkDesc};
use serde_json::{json, Value};

use crate::format::{self, approx_json, approx_text, sources, tuple};
use crate::input::{self, load_code, Loaded};
use crate::{
    BoundArgs, ClassesArgs, CodeArgs, Command, CompareArgs, Failure, InstanceArgs, Report, SearchArgs,
    SimulateArgs, SplitArgs, TreeArgs,
};

pub fn dispatch(command: Command) -> Result<Report, Failure> {
    match command {
        Command::Bound(a) => bound(a),
        Command::Compare(a) => compare(a),
        Command::Classes(a) => classes(a),
        Command::Verify(a) => verify_code(a),
        Command::Simulate(a) => simulate(a),
        Command::Search(a) => search(a),
        Command::Tree(a) => tree_cmd(a),
        Command::SplitSources(a) => split_sources(a),
        Command::Instance(a) => instance(a),
    }
}

const N2_CAPACITY_NOTE: &str = "the computing capacity of this network for the arithmetic sum is known from prior work to be log_6(4) ~ 0.773706, strictly below the cut-set bound";

/// Extra notes on the bound: the known capacity gap on the split
/// three-source sum network.
fn bound_notes(l: &Loaded) -> Vec<String> {
    let mut notes = l.notes.clone();
    if *l.net.desc() == instances::n2_prime_network() && l.f.table() == instances::arithmetic_sum(3).table() {
        notes.push(N2_CAPACITY_NOTE.into());
    }
    notes
}

fn notes_text(notes: &[String]) -> String {
    notes.iter().map(|n| format!("note: {n}\n")).collect()
}

fn header(l: &Loaded) -> Value {
    json!({
        "network": l.net.name(),
        "function": l.f.name(),
        "sources": l.net.source_count(),
        "input_size": l.f.input_size(),
        "edge_alphabet": l.net.edge_alphabet(),
    })
}

fn with_header(l: &Loaded, notes: &[String], mut body: Value) -> Value {
    if let Value::Object(map) = &mut body {
        map.insert("instance".into(), header(l));
        map.insert("notes".into(), json!(notes));
    }
    body
}

fn rate_text(n: usize, k: usize) -> String {
    let g = gcd(n, k);
    if n / g == 1 {
        (k / g).to_string()
    } else {
        format!("{}/{}", k / g, n / g)
    }
}

fn gcd(a: usize, b: usize) -> usize {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

fn bound(a: BoundArgs) -> Result<Report, Failure> {
    let kind = BoundKind::parse(&a.kind).ok_or_else(|| {
        Failure::Malformed(format!(
            "unknown bound kind `{}`; expected min-cut, min-cut-a, min-cut-k, prop2 or prop1",
            a.kind
        ))
    })?;
    let l = a.source.load()?;
    let opts = BoundOptions {
        irreducible_only: a.irreducible,
        max_cut_size: a.max_cut_size,
        all_cuts: a.all_cuts,
        ..BoundOptions::default()
    };
    let report = bounds::compute(kind, &l.net, &l.f, &opts)?;
    let notes = bound_notes(&l);
    let text = format!("{}{}", format::bound_text(&l.net, &report), notes_text(&notes));
    let body = json!({ "bound": format::bound_json(&l.net, &report) });
    Ok(Report::new("bound", text, with_header(&l, &notes, body)))
}

fn code_or_bundled(path: &Option<std::path::PathBuf>, l: &Loaded) -> Result<Option<NetworkCode>, Failure> {
    match path {
        Some(p) => Ok(Some(load_code(p, &l.net, &l.f)?)),
        None => Ok(l.bundled_code.clone()),
    }
}

fn input_total(l: &Loaded, k: usize) -> usize {
    radix::checked_pow(l.f.input_size(), k * l.f.arity()).unwrap_or(usize::MAX)
}

fn outcome_json(outcome: &VerifyOutcome, total: usize) -> Value {
    match outcome {
        VerifyOutcome::Pass { checked } => json!({ "passed": true, "checked": checked, "total": total }),
        VerifyOutcome::Fail {
            input,
            expected,
            got,
            checked,
        } => json!({
            "passed": false,
            "checked": checked,
            "total": total,
            "counterexample": {
                "input": input.rows_iter().map(|r| r.to_vec()).collect::<Vec<_>>(),
                "expected": expected,
                "got": got,
            },
        }),
    }
}

fn outcome_text(outcome: &VerifyOutcome, total: usize) -> String {
    match outcome {
        VerifyOutcome::Pass { checked } => format!("{checked}/{total} inputs correct\n"),
        VerifyOutcome::Fail {
            input,
            expected,
            got,
            checked,
        } => format!(
            "FAILED after {checked}/{total} inputs\ncounterexample: x = {input}\n  expected {}\n  got      {}\n",
            tuple(expected),
            tuple(got)
        ),
    }
}

fn compare(a: CompareArgs) -> Result<Report, Failure> {
    let l = a.source.load()?;
    let opts = BoundOptions {
        irreducible_only: a.irreducible,
        ..BoundOptions::default()
    };
    let kinds: Vec<BoundKind> = BoundKind::ALL
        .into_iter()
        .filter(|&k| k != BoundKind::Prop1 || l.net.source_count() == 1)
        .collect();
    let mut text = format!("{}: compare\n", l.net.name());
    text.push_str(&format!(
        "  {:<15} {:<10} {:<14} {:<20} {:<4} {}\n",
        "kind", "value", "exact", "witness", "|C|", "count"
    ));
    let mut rows = Vec::new();
    for kind in kinds {
        let r = bounds::compute(kind, &l.net, &l.f, &opts)?;
        let (form, rational) = format::exact_value(&r.value, r.input_size);
        let (cut, size, count) = match &r.witness {
            Some(w) => (
                l.net.format_edges(w.analysis.cut),
                w.analysis.cut.len().to_string(),
                format!("{}={}", format::count_label(kind), w.count),
            ),
            None => ("-".into(), "-".into(), "-".into()),
        };
        text.push_str(&format!(
            "  {:<15} {:<10} {:<14} {:<20} {:<4} {}\n",
            kind.name(),
            rational.clone().unwrap_or_else(|| approx_text(r.approx())),
            form,
            cut,
            size,
            count
        ));
        rows.push(format::bound_json(&l.net, &r));
    }
    let code = code_or_bundled(&a.code, &l)?;
    let mut exit = 0;
    let code_json = match &code {
        Some(code) => {
            let outcome = verify(code, &l.net, &l.f)?;
            let total = input_total(&l, code.k());
            let rate = rate_text(code.n(), code.k());
            match &outcome {
                VerifyOutcome::Pass { checked } => text.push_str(&format!(
                    "  {:<15} {:<10} ({},{}) code verified on {checked}/{total} inputs\n",
                    "code rate",
                    rate,
                    code.n(),
                    code.k()
                )),
                VerifyOutcome::Fail { .. } => {
                    exit = 1;
                    text.push_str(&format!(
                        "  {:<15} {:<10} ({},{}) code FAILS verification\n",
                        "code rate",
                        rate,
                        code.n(),
                        code.k()
                    ));
                    text.push_str(&outcome_text(&outcome, total));
                }
            }
            json!({
                "n": code.n(),
                "k": code.k(),
                "rate": rate,
                "rate_approx": approx_json(code.rate()),
                "verification": outcome_json(&outcome, total),
            })
        }
        None => {
            text.push_str("  code rate       none (no code supplied)\n");
            Value::Null
        }
    };
    let notes = bound_notes(&l);
    text.push_str(&notes_text(&notes));
    let body = json!({ "bounds": rows, "code": code_json });
    Ok(Report::new("compare", text, with_header(&l, &notes, body)).exit(exit))
}

fn parse_list(flag: &str, text: &str) -> Result<Vec<usize>, Failure> {
    text.split(',')
        .map(str::trim)
        .filter(|t| !t.is_empty())
        .map(|t| {
            t.parse::<usize>()
                .map_err(|_| Failure::Malformed(format!("--{flag}: bad number (at `{t}`)")))
        })
        .collect()
}

fn parse_sources(flag: &str, text: Option<&str>, s: usize) -> Result<SourceSet, Failure> {
    let Some(text) = text else {
        return Ok(SourceSet::EMPTY);
    };
    let mut set = SourceSet::EMPTY;
    for i in parse_list(flag, text)? {
        if i == 0 || i > s {
            return Err(Failure::Malformed(format!(
                "--{flag}: source {i} is outside 1..={s} (at `{i}`)"
            )));
        }
        set.insert(SourceIdx(i - 1));
    }
    Ok(set)
}

fn classes(a: ClassesArgs) -> Result<Report, Failure> {
    let l = a.source.load()?;
    let s = l.net.source_count();
    let mut cut_json = Value::Null;
    let mut text = String::new();
    let (index, ctx_set, ctx) = match &a.cut {
        Some(cut) => {
            let names: Vec<&str> = cut.split(',').map(str::trim).filter(|t| !t.is_empty()).collect();
            let edges = l.net.edge_set(&names)?;
            let analysis = l.net.cut_analysis(edges)?;
            let count = count_w_for_cut(&l.f, &l.net, edges)?;
            text.push_str(&format!(
                "cut {}: I_C = {}, J_C = {}, c* = {}\n",
                l.net.format_edges(edges),
                sources(analysis.separated),
                sources(analysis.side),
                tuple(&count.context)
            ));
            cut_json = json!({
                "cut": l.net.edge_names(edges),
                "I_C": format::source_list(analysis.separated),
                "J_C": format::source_list(analysis.side),
                "context": count.context,
            });
            (analysis.separated, analysis.side, count.context)
        }
        None => {
            let index = parse_sources("index", a.index.as_deref(), s)?;
            if index.is_empty() {
                return Err(Failure::Malformed("give --index LIST or --cut EDGES".into()));
            }
            let ctx_set = parse_sources("context", a.context.as_deref(), s)?;
            let ctx = match &a.values {
                Some(v) => parse_list("values", v)?,
                None => Vec::new(),
            };
            (index, ctx_set, ctx)
        }
    };
    let p = partition(&l.f, index, ctx_set, &ctx)?;
    text.insert_str(
        0,
        &format!(
            "{}: classes for I = {}, J = {}, c = {}\n",
            l.net.name(),
            sources(index),
            sources(ctx_set),
            tuple(&ctx)
        ),
    );
    let width = index.len();
    let q = l.f.input_size();
    let mut classes = Vec::new();
    for c in 0..p.class_count() {
        let members = p.members(c);
        let listed: Vec<String> = members.iter().map(|m| tuple(m)).collect();
        text.push_str(&format!("class {c}: {}\n", listed.join(", ")));
        classes.push(json!({
            "class": c,
            "representative": p.representative(c),
            "members": members,
        }));
    }
    text.push_str(&format!("W = {}\n", p.class_count()));
    let class_of: Vec<Value> = p
        .class_map()
        .iter()
        .enumerate()
        .map(|(rank, &c)| json!({ "member": radix::unrank(rank, q, width), "class": c }))
        .collect();
    let body = json!({
        "index_set": format::source_list(index),
        "context_set": format::source_list(ctx_set),
        "context": ctx,
        "cut": cut_json,
        "class_count": p.class_count(),
        "class_of": class_of,
        "classes": classes,
    });
    Ok(Report::new("classes", text, with_header(&l, &l.notes, body)))
}

fn require_code(a: &CodeArgs, l: &Loaded) -> Result<NetworkCode, Failure> {
    code_or_bundled(&a.code, l)?
        .ok_or_else(|| Failure::Malformed("no code: give --code FILE (this instance bundles none)".into()))
}

fn verify_code(a: CodeArgs) -> Result<Report, Failure> {
    let l = a.source.load()?;
    let code = require_code(&a, &l)?;
    let outcome = verify(&code, &l.net, &l.f)?;
    let total = input_total(&l, code.k());
    let text = format!(
        "{}: ({},{}) code, rate {}\n{}{}",
        l.net.name(),
        code.n(),
        code.k(),
        rate_text(code.n(), code.k()),
        outcome_text(&outcome, total),
        notes_text(&l.notes)
    );
    let body = json!({
        "n": code.n(),
        "k": code.k(),
        "rate": rate_text(code.n(), code.k()),
        "verification": outcome_json(&outcome, total),
    });
    let exit = if outcome.passed() { 0 } else { 1 };
    Ok(Report::new("verify", text, with_header(&l, &l.notes, body)).exit(exit))
}

fn simulate(a: SimulateArgs) -> Result<Report, Failure> {
    let l = a.code.source.load()?;
    let code = require_code(&a.code, &l)?;
    let x = InputMatrix::parse(&a.input).map_err(|e| Failure::Malformed(format!("--input: {e}")))?;
    if x.rows() != code.k() || x.cols() != l.net.source_count() {
        return Err(Failure::Malformed(format!(
            "--input: expected a {}x{} block, got {}x{} (at `{}`)",
            code.k(),
            l.net.source_count(),
            x.rows(),
            x.cols(),
            a.input
        )));
    }
    x.check_alphabet(l.f.input_size())?;
    let trace = execute(&code, &l.net, &x)?;
    let expected = l.f.evaluate_block(&x)?;
    let mut text = format!("{}: ({},{}) code on x = {x}\n", l.net.name(), code.n(), code.k());
    let mut edges = Vec::new();
    for (e, block) in &trace.edges {
        let edge = l.net.edge(*e);
        let cells: Vec<String> = block.iter().map(usize::to_string).collect();
        let tag = if edge.infinite { "  (raw symbols)" } else { "" };
        text.push_str(&format!("  {:<8} {}{tag}\n", edge.name, cells.join(" ")));
        edges.push(json!({ "edge": edge.name, "infinite": edge.infinite, "block": block }));
    }
    let correct = trace.output == expected;
    text.push_str(&format!("  output   {}\n", tuple(&trace.output)));
    text.push_str(&format!(
        "  f(x)     {}  {}\n",
        tuple(&expected),
        if correct { "correct" } else { "WRONG" }
    ));
    let body = json!({
        "input": x.rows_iter().map(|r| r.to_vec()).collect::<Vec<_>>(),
        "edges": edges,
        "output": trace.output,
        "expected": expected,
        "correct": correct,
    });
    let exit = if correct { 0 } else { 1 };
    Ok(Report::new("simulate", text, with_header(&l, &l.notes, body)).exit(exit))
}

fn write_file(path: &Path, text: &str) -> Result<(), Failure> {
    fs::write(path, text).map_err(|e| Failure::Malformed(format!("{}: {e}", path.display())))
}

fn search(a: SearchArgs) -> Result<Report, Failure> {
    let l = a.source.load()?;
    let mut config = SearchConfig {
        symmetry: !a.no_symmetry,
        cut_pruning: !a.no_pruning,
        ..SearchConfig::default()
    };
    if let Some(b) = a.budget {
        config.budget = b;
    }
    let outcome = exhaustive_search(&l.net, &l.f, a.n, a.k, config)?;
    let stats = outcome.stats();
    let mut text = format!("{}: search for an ({},{}) code, rate {}\n", l.net.name(), a.n, a.k, rate_text(a.n, a.k));
    let code_json = match &outcome {
        SearchOutcome::Found { code, .. } => {
            text.push_str("  found a code\n");
            let code_text = code.to_text(&l.net);
            match &a.emit_code {
                Some(path) => {
                    write_file(path, &code_text)?;
                    text.push_str(&format!("  written to {}\n", path.display()));
                }
                None => {
                    for line in code_text.lines() {
                        text.push_str(&format!("  {line}\n"));
                    }
                }
            }
            json!(code_text)
        }
        SearchOutcome::Exhausted { .. } => {
            text.push_str(&format!("  no ({},{}) code exists: every candidate was ruled out\n", a.n, a.k));
            Value::Null
        }
    };
    text.push_str(&format!(
        "  space {}, leaves {}, pruned prefixes {}\n",
        stats.space, stats.leaves, stats.pruned
    ));
    text.push_str(&notes_text(&l.notes));
    let body = json!({
        "n": a.n,
        "k": a.k,
        "found": outcome.code().is_some(),
        "code": code_json,
        "stats": {
            "space": stats.space.to_string(),
            "leaves": stats.leaves,
            "pruned": stats.pruned,
        },
    });
    Ok(Report::new("search", text, with_header(&l, &l.notes, body)))
}

fn tree_cmd(a: TreeArgs) -> Result<Report, Failure> {
    let l = a.source.load()?;
    if !tree::is_multi_edge_tree(&l.net) {
        return Err(Failure::Malformed(format!("{}: not a multi-edge tree", l.net.name())));
    }
    let mut text = format!("{}: tree code at (n,k) = ({},{}), rate {}\n", l.net.name(), a.n, a.k, rate_text(a.n, a.k));
    let mut body = serde_json::Map::new();
    body.insert("n".into(), json!(a.n));
    body.insert("k".into(), json!(a.k));
    let result = if a.report {
        let report = tree::tree_capacity_report(&l.net, &l.f, a.n, a.k, &BoundOptions::default())?;
        text.push_str(&format!("  capacity     {}\n", format::headline(&report.bound)));
        body.insert("capacity".into(), format::bound_json(&l.net, &report.bound));
        let mut nodes = Vec::new();
        for p in &report.plan.nodes {
            let cert = p.certificate.map(|c| c.to_string()).unwrap_or_else(|| "-".into());
            let edges: Vec<String> = p.out_edges.iter().map(|&e| l.net.edge(e).name.clone()).collect();
            text.push_str(&format!(
                "  node {:<6} P(u) = {:<10} R = {:<4} out {:<16} {}\n",
                l.net.node_name(p.node),
                sources(p.ancestors),
                p.class_count(),
                format!("{{{}}}", edges.join(",")),
                cert
            ));
            nodes.push(json!({
                "node": l.net.node_name(p.node),
                "ancestors": format::source_list(p.ancestors),
                "class_count": p.class_count(),
                "out_edges": edges,
                "certificate": p.certificate.as_ref().map(format::certificate_json),
            }));
        }
        body.insert("plan".into(), json!(nodes));
        report.code.map(|(code, outcome)| (code, Some(outcome)))
    } else {
        tree::construct(&l.net, &l.f, a.n, a.k).map(|code| (code, None))
    };
    let exit = match result {
        Ok((code, outcome)) => {
            let outcome = match outcome {
                Some(o) => o,
                None => verify(&code, &l.net, &l.f)?,
            };
            let total = input_total(&l, a.k);
            text.push_str(&format!("  constructed; {}", outcome_text(&outcome, total)));
            if let Some(path) = &a.emit_code {
                write_file(path, &code.to_text(&l.net))?;
                text.push_str(&format!("  written to {}\n", path.display()));
            }
            body.insert("status".into(), json!("constructed"));
            body.insert("verification".into(), outcome_json(&outcome, total));
            if outcome.passed() {
                0
            } else {
                1
            }
        }
        Err(TreeError::Infeasible { node, certificate }) => {
            text.push_str(&format!("  infeasible: rate condition fails at node `{node}`: {certificate}\n"));
            body.insert("status".into(), json!("infeasible"));
            body.insert(
                "infeasible".into(),
                json!({ "node": node, "certificate": format::certificate_json(&certificate) }),
            );
            1
        }
        Err(e) => return Err(e.into()),
    };
    text.push_str(&notes_text(&l.notes));
    Ok(Report::new("tree", text, with_header(&l, &l.notes, Value::Object(body))).exit(exit))
}

fn split_sources(a: SplitArgs) -> Result<Report, Failure> {
    let (desc, origin) = match (&a.instance, &a.network) {
        (Some(name), _) => (
            instances::bundle(name).ok_or_else(|| input::unknown_instance(name))?.network,
            name.clone(),
        ),
        (None, Some(path)) => (
            NetworkDesc::parse(&input::read(path)?)
                .map_err(|e| Failure::Malformed(format!("{}: {e}", path.display())))?,
            path.display().to_string(),
        ),
        (None, None) => return Err(Failure::Malformed("give --instance NAME or --network FILE".into())),
    };
    let split = desc.split_sources();
    let report = split.validate();
    if !report.is_valid() {
        return Err(Failure::Malformed(format!("{origin}: invalid network after splitting\n{report}")));
    }
    let added: Vec<&String> = split.nodes.iter().filter(|n| !desc.nodes.contains(n)).collect();
    let text = split.to_text();
    let body = json!({
        "changed": split != desc,
        "added_nodes": added,
        "network": text,
    });
    Ok(Report::new("split-sources", text.clone(), body))
}

fn instance(a: InstanceArgs) -> Result<Report, Failure> {
    let b = instances::bundle(&a.name).ok_or_else(|| input::unknown_instance(&a.name))?;
    let net_text = b.network.to_text();
    let fn_text = b.function.to_text();
    let code_text = match &b.code {
        Some(code) => {
            let net = Network::new(b.network.clone())?;
            Some(code.to_text(&net))
        }
        None => None,
    };
    let mut files = Vec::new();
    let text = match &a.emit {
        Some(dir) => {
            fs::create_dir_all(dir).map_err(|e| Failure::Malformed(format!("{}: {e}", dir.display())))?;
            let mut out = String::new();
            let mut emit = |ext: &str, body: &str| -> Result<(), Failure> {
                let path = dir.join(format!("{}.{ext}", b.name));
                write_file(&path, body)?;
                out.push_str(&format!("wrote {}\n", path.display()));
                files.push(path.display().to_string());
                Ok(())
            };
            emit("network", &net_text)?;
            emit("function", &fn_text)?;
            if let Some(c) = &code_text {
                emit("code", c)?;
            }
            out
        }
        None => {
            let mut out = format!("# network\n{net_text}\n# function\n{fn_text}\n");
            if let Some(c) = &code_text {
                out.push_str(&format!("# code\n{c}\n"));
            }
            out
        }
    };
    let body = json!({
        "name": b.name,
        "network": net_text,
        "function": fn_text,
        "code": code_text,
        "files": files,
    });
    Ok(Report::new("instance", text, body))
}
