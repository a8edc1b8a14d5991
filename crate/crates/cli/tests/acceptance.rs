//! Acceptance run: one PASS/FAIL line per criterion, non-zero exit on any
//! failure.

#[path = "../../core/tests/support/mod.rs"]
mod support;

use std::panic::{catch_unwind, AssertUnwindSafe};
use std::sync::atomic::{AtomicUsize, Ordering::Relaxed};

use netcomp::bounds::{
    min_cut_a, min_cut_bound, min_cut_k, prop1_capacity, prop2_bound, rate_certificate, BoundOptions,
};
use netcomp::code::{exhaustive_search, single_source_code, verify, SearchConfig, SearchOutcome, VerifyOutcome};
use netcomp::equivalence::count_w_for_cut;
use netcomp::instances;
use netcomp::sets::EdgeSet;
use netcomp::tree::{self, TreeError};
use netcomp::{BoundReport, BoundValue, Network};
use proptest::prelude::*;
use proptest::test_runner::{Config, TestRunner};
use serde_json::Value;

use support::*;

type Check = fn() -> Result<String, String>;

macro_rules! ensure {
    ($cond:expr, $($msg:tt)+) => {
        if !$cond {
            return Err(format!($($msg)+));
        }
    };
}

fn cli(args: &[&str]) -> (i32, String) {
    let mut out = Vec::new();
    let mut err = Vec::new();
    let code = netcomp_cli::run(std::iter::once("netcomp").chain(args.iter().copied()), &mut out, &mut err);
    (code, String::from_utf8_lossy(&out).into_owned() + &String::from_utf8_lossy(&err))
}

fn cli_json(args: &[&str]) -> Result<Value, String> {
    let mut argv = vec!["--json"];
    argv.extend_from_slice(args);
    let (code, out) = cli(&argv);
    ensure!(code == 0, "`{}` exited {code}: {out}", args.join(" "));
    serde_json::from_str(&out).map_err(|e| e.to_string())
}

fn witness(net: &Network, r: &BoundReport) -> Vec<String> {
    r.witness.as_ref().map(|w| net.edge_names(w.analysis.cut)).unwrap_or_default()
}

fn opts() -> BoundOptions {
    BoundOptions::default()
}

fn criterion_1() -> Result<String, String> {
    let v = cli_json(&["bound", "--instance", "n1"])?;
    let b = &v["bound"];
    ensure!(b["rational"] == "2", "CLI value {}", b["rational"]);
    ensure!(b["witness"]["cut_size"] == 2 && b["witness"]["count"] == 2, "CLI witness {}", b["witness"]);

    let (net, f) = (instances::n1(), instances::product_plus_mod2());
    let full = min_cut_bound(&net, &f, &opts()).map_err(|e| e.to_string())?;
    let irreducible = min_cut_bound(&net, &f, &BoundOptions { irreducible_only: true, ..opts() })
        .map_err(|e| e.to_string())?;
    ensure!(full.value.equals_rational(2, 2, 1), "value {}", full.value);
    ensure!(full.value == irreducible.value && full.witness == irreducible.witness, "irreducible mode differs");

    // every one of the 2^7 - 1 non-empty edge subsets, straight from W
    let mut best = BoundValue::Infinite;
    let mut cut_sets = 0;
    for mask in 1u64..(1 << net.edge_count()) {
        let cut = EdgeSet(mask);
        if net.separated_sources(cut).is_empty() {
            continue;
        }
        cut_sets += 1;
        let w = count_w_for_cut(&f, &net, cut).map_err(|e| e.to_string())?.count;
        let value = BoundValue::from_count(cut.len(), w);
        if value.cmp_value(&best).is_lt() {
            best = value;
        }
    }
    ensure!(best.cmp_value(&full.value).is_eq(), "subset scan gives {best}");
    Ok(format!(
        "min-cut = 2 exactly, witness {:?} with |C| = 2, W = 2; {cut_sets} cut sets among 127 subsets agree; irreducible mode ({} cuts) agrees",
        witness(&net, &full),
        irreducible.cuts_examined
    ))
}

fn criterion_2() -> Result<String, String> {
    let (net, f) = (instances::n1(), instances::product_plus_mod2());
    let a = min_cut_a(&net, &f, &opts()).map_err(|e| e.to_string())?;
    ensure!(a.value.at_most_rational(2, 3, 2), "min-cut-A {}", a.value);
    let aw = a.witness.as_ref().ok_or("no min-cut-A witness")?;
    ensure!(witness(&net, &a) == ["e4", "e6", "e7"] && aw.count == 4, "min-cut-A witness {:?} R={}", witness(&net, &a), aw.count);

    let k = min_cut_k(&net, &f, &opts()).map_err(|e| e.to_string())?;
    ensure!(k.value.at_most_rational(2, 3, 2), "min-cut-K {}", k.value);
    let kw = k.witness.as_ref().ok_or("no min-cut-K witness")?;
    let u1 = net.node_set(&["1", "3", "v"]).map_err(|e| e.to_string())?;
    ensure!(kw.nodes == Some(u1), "min-cut-K node set {:?}", kw.nodes);

    let code = instances::bundle("n1").and_then(|b| b.code).ok_or("n1 ships no code")?;
    ensure!(verify(&code, &net, &f).map_err(|e| e.to_string())?.passed(), "bundled code fails");
    // k/n = 2/1 > 3/2
    ensure!(code.k() * 2 > code.n() * 3, "rate {}/{}", code.k(), code.n());
    Ok(format!(
        "min-cut-A = {} <= 3/2 at {{e4,e6,e7}} with R = 4; min-cut-K = {} <= 3/2 at U1 = {{1,3,v}}; verified code rate 2 > 3/2",
        a.value, k.value
    ))
}

fn criterion_3() -> Result<String, String> {
    let (net, f) = (instances::n1(), instances::product_plus_mod2());
    let code = instances::bundle("n1").and_then(|b| b.code).ok_or("n1 ships no code")?;
    let outcome = verify(&code, &net, &f).map_err(|e| e.to_string())?;
    ensure!(outcome == VerifyOutcome::Pass { checked: 64 }, "{outcome:?}");
    let (code, out) = cli(&["verify", "--instance", "n1"]);
    ensure!(code == 0 && out.contains("64/64 inputs correct"), "CLI: exit {code}, {out}");
    Ok("(1,2) code correct on 64/64 inputs".into())
}

fn criterion_4() -> Result<String, String> {
    let (net, f) = (instances::n1(), instances::product_plus_mod2());
    let r = prop2_bound(&net, &f, &opts()).map_err(|e| e.to_string())?;
    ensure!(r.value.equals_rational(2, 4, 1), "prop2 {}", r.value);
    ensure!(witness(&net, &r) == ["e4", "e5", "e6", "e7"], "witness {:?}", witness(&net, &r));
    Ok("prop2 = 4 exactly at {e4,e5,e6,e7}".into())
}

fn criterion_5() -> Result<String, String> {
    let split = instances::n2_network().split_sources();
    ensure!(split == instances::n2_prime_network(), "split(N2) differs from N2'");
    let (net, f) = (instances::n2_prime(), instances::arithmetic_sum(3));
    let r = min_cut_bound(&net, &f, &BoundOptions { all_cuts: true, ..opts() }).map_err(|e| e.to_string())?;
    ensure!(r.value.equals_rational(2, 1, 1), "min-cut {}", r.value);
    ensure!(witness(&net, &r) == ["e2", "e4"], "witness {:?}", witness(&net, &r));
    let infinite = EdgeSet(!net.finite_edges().0).intersection(EdgeSet::full(net.edge_count()));
    ensure!(infinite.len() == 2, "expected two bundles");
    ensure!(
        r.per_cut.iter().all(|row| row.analysis.cut.intersection(infinite).is_empty()),
        "a cut contains a bundle edge"
    );
    let (code, out) = cli(&["bound", "--instance", "n2-prime"]);
    ensure!(code == 0 && out.contains("log_6(4)"), "CLI note missing: {out}");
    Ok(format!(
        "split(N2) = N2'; min-cut = 1 exactly at {{e2,e4}}; none of {} cuts holds a bundle edge; capacity gap noted",
        r.per_cut.len()
    ))
}

fn criterion_6() -> Result<String, String> {
    let mut built = Vec::new();
    for (name, net, f) in [
        ("xor-tree", instances::xor_tree(), instances::xor()),
        ("double-edge sum tree", instances::sum_tree_doubled(), instances::arithmetic_sum(2)),
    ] {
        for (n, k) in [(1, 1), (2, 2)] {
            let code = tree::construct(&net, &f, n, k).map_err(|e| format!("{name} ({n},{k}): {e}"))?;
            let outcome = verify(&code, &net, &f).map_err(|e| e.to_string())?;
            ensure!(outcome.passed(), "{name} ({n},{k}): {outcome:?}");
            built.push(format!("{name} ({n},{k})"));
        }
    }

    let (net, f) = (instances::sum_tree_doubled(), instances::arithmetic_sum(2));
    let v = net.node_id("v").map_err(|e| e.to_string())?;
    let refusal = match tree::construct(&net, &f, 1, 2) {
        Err(TreeError::Infeasible { node, certificate }) => {
            ensure!(node == "v" && certificate.count == 3 && !certificate.satisfied, "refused at {node}: {certificate}");
            certificate
        }
        other => return Err(format!("double-edge sum tree (1,2) not refused: {other:?}")),
    };

    let single = instances::sum_tree_single();
    let plan = tree::plan_unchecked(&single, &f, 1, 2).map_err(|e| e.to_string())?;
    let cert = plan.node(v).and_then(|p| p.certificate).ok_or("no certificate at v")?;
    ensure!(!cert.satisfied && cert.count == 3, "certificate at v: {cert}");
    ensure!(matches!(tree::construct(&single, &f, 1, 2), Err(TreeError::Infeasible { .. })), "single-edge tree not refused");
    let config = SearchConfig {
        symmetry: false,
        cut_pruning: false,
        ..SearchConfig::default()
    };
    let outcome = exhaustive_search(&single, &f, 1, 2, config).map_err(|e| e.to_string())?;
    let SearchOutcome::Exhausted { stats } = outcome else {
        return Err("search found a (1,2) code on the single-edge sum tree".into());
    };
    Ok(format!(
        "{} verified; double-edge (1,2) refused at v ({refusal}); single-edge sum tree (1,2) fails at v ({cert}) and all {} encoder assignments, enumerated without pruning, fail",
        built.join(", "),
        stats.leaves
    ))
}

fn criterion_7() -> Result<String, String> {
    let (net, f) = (instances::parallel_pair(), instances::parity_of_quaternary());
    let r = prop1_capacity(&net, &f).map_err(|e| e.to_string())?;
    ensure!(r.value.equals_rational(4, 4, 1), "prop1 {}", r.value);
    let code = single_source_code(&net, &f, 1, 2).map_err(|e| e.to_string())?;
    let outcome = verify(&code, &net, &f).map_err(|e| e.to_string())?;
    ensure!(outcome.passed(), "(1,2) code: {outcome:?}");
    let cert = rate_certificate(2, 3, 1, 2, 2).map_err(|e| e.to_string())?;
    ensure!(!cert.satisfied, "certificate {cert}");
    let search = exhaustive_search(&net, &f, 1, 3, SearchConfig::default()).map_err(|e| e.to_string())?;
    ensure!(search.code().is_none(), "a (1,3) code was found");
    Ok(format!("prop1 = 4 exactly; (1,2) code verified; no (1,3) code ({cert})"))
}

/// Runs `test` on `cases` random inputs; the count of discarded cases is
/// reported alongside.
fn suite<S: Strategy>(
    name: &str,
    strategy: S,
    test: impl Fn(S::Value) -> Result<(), TestCaseError>,
) -> Result<String, String>
where
    S::Value: std::fmt::Debug,
{
    let mut runner = TestRunner::new(Config {
        cases: CASES,
        max_global_rejects: 100_000,
        failure_persistence: None,
        ..Config::default()
    });
    let passed = AtomicUsize::new(0);
    runner
        .run(&strategy, |v| {
            test(v)?;
            passed.fetch_add(1, Relaxed);
            Ok(())
        })
        .map_err(|e| format!("{name}: {e}"))?;
    let n = passed.load(Relaxed);
    ensure!(n >= 200, "{name}: only {n} cases ran");
    Ok(format!("{name} {n}"))
}

fn criterion_8() -> Result<String, String> {
    let found = AtomicUsize::new(0);
    let results = [
        suite("R>=W", instance(shape(1..=3, 0..=2, 0..=3), 2..=3, 1..=4), |(net, f)| {
            check_r_at_least_w(&net, &f)
        }),
        suite("W-monotone", instance(shape(1..=3, 0..=2, 0..=3), 2..=3, 1..=4), |(net, f)| {
            check_w_monotone(&net, &f)
        }),
        suite(
            "coarsening",
            ((1usize..=4).prop_flat_map(|s| function(s, 2..=3, 1..=4)), any::<u64>()),
            |(f, seed)| check_coarsening(&f, seed),
        ),
        suite(
            "embedding",
            ((2usize..=4).prop_flat_map(|s| function(s, 2..=3, 1..=4)), any::<u64>()),
            |(f, seed)| check_embedding(&f, seed),
        ),
        suite("F(C)-global", shape(1..=3, 0..=3, 0..=4), |sh| check_extension_global(&build_network(&sh))),
        suite(
            "cut-determinism",
            (shape(1..=2, 0..=2, 0..=2), 1usize..=2, 1usize..=2, any::<u64>()),
            |(sh, n, k, seed)| check_cut_determinism(&build_network(&sh), n, k, seed),
        ),
        suite(
            "W^k-classes",
            ((1usize..=3).prop_flat_map(|s| function(s, 2..=2, 1..=4)), 1usize..=2, any::<u64>()),
            |(f, k, seed)| check_block_classes(&f, k, seed),
        ),
        suite("bound-chain", instance(shape(1..=3, 0..=2, 0..=3), 2..=3, 1..=4), |(net, f)| {
            check_bound_chain(&net, &f)
        }),
        suite(
            "search-soundness",
            (instance(shape(1..=2, 0..=1, 0..=2), 2..=2, 1..=3), 1usize..=2, 1usize..=2),
            |((net, f), n, k)| {
                prop_assume!(net.edge_count() <= 4);
                if check_search_sound(&net, &f, n, k)? {
                    found.fetch_add(1, Relaxed);
                }
                Ok(())
            },
        ),
    ];
    let mut lines = Vec::new();
    for r in results {
        lines.push(r?);
    }
    let found = found.load(Relaxed);
    ensure!(found >= 20, "search soundness is vacuous: {found} codes found");
    Ok(format!("cases per suite: {}; {found} searched codes all within the bound", lines.join(", ")))
}

fn criterion_9() -> Result<String, String> {
    let functions = suite_functions();
    let mut contexts = 0;
    for f in &functions {
        contexts += check_all_contexts(f).map_err(|e| format!("{}: {e}", f.name()))?;
    }
    let mut runner = TestRunner::new(Config {
        cases: CASES,
        failure_persistence: None,
        ..Config::default()
    });
    let random = (arity_and_alphabet().prop_flat_map(|(s, q)| function(s, q..=q, 1..=4)), any::<u64>());
    runner
        .run(&random, |(f, seed)| {
            prop_assert!(f.table().len() <= 256);
            let (index, context, c) = pick(f.arity(), f.input_size(), seed);
            check_against_oracle(&f, index, context, &c)
        })
        .map_err(|e| e.to_string())?;
    Ok(format!(
        "{} suite functions, {contexts} (I,J,c) partitions match the pairwise oracle; {CASES} random tables agree",
        functions.len()
    ))
}

fn main() {
    let criteria: [(&str, Check); 9] = [
        ("N1 min-cut bound", criterion_1),
        ("prior bounds refuted on N1", criterion_2),
        ("N1 bundled code", criterion_3),
        ("N1 super-source bound", criterion_4),
        ("N2' after source splitting", criterion_5),
        ("tree construction", criterion_6),
        ("single-source capacity", criterion_7),
        ("property suites", criterion_8),
        ("oracle equivalence", criterion_9),
    ];
    let mut failed = 0;
    for (i, (title, check)) in criteria.iter().enumerate() {
        let result = catch_unwind(AssertUnwindSafe(check)).unwrap_or_else(|p| {
            Err(p
                .downcast_ref::<String>()
                .cloned()
                .or_else(|| p.downcast_ref::<&str>().map(|s| s.to_string()))
                .unwrap_or_else(|| "panicked".into()))
        });
        match result {
            Ok(detail) => println!("criterion {} PASS  {title}: {detail}", i + 1),
            Err(why) => {
                failed += 1;
                println!("criterion {} FAIL  {title}: {why}", i + 1);
            }
        }
    }
    println!("{} of {} criteria passed", criteria.len() - failed, criteria.len());
    if failed > 0 {
        std::process::exit(1);
    }
}
