//! Bundled networks, functions and codes.

use crate::code::{paper_code_n1, NetworkCode};
use crate::function::{BuiltinParams, TargetFunction};
use crate::network::{Network, NetworkDesc};

fn desc(name: &str, b: usize, nodes: &[&str], sources: &[&str], sink: &str, edges: &[(&str, &str, &str)]) -> NetworkDesc {
    let mut d = NetworkDesc::new(name, b);
    for node in nodes {
        d.add_node(node).expect("distinct node names");
    }
    for s in sources {
        d.add_source(s);
    }
    d.set_sink(sink);
    for (e, t, h) in edges {
        d.add_edge(e, t, h, false).expect("declared endpoints");
    }
    d
}

fn build(d: NetworkDesc) -> Network {
    Network::new(d).expect("bundled network is valid")
}

/// Three binary sources, a relay `v` and the sink `rho`.
pub fn n1_network() -> NetworkDesc {
    desc(
        "n1",
        2,
        &["1", "2", "3", "v", "rho"],
        &["1", "2", "3"],
        "rho",
        &[
            ("e1", "1", "v"),
            ("e2", "2", "v"),
            ("e3", "3", "v"),
            ("e4", "1", "rho"),
            ("e5", "2", "rho"),
            ("e6", "3", "rho"),
            ("e7", "v", "rho"),
        ],
    )
}

pub fn n1() -> Network {
    build(n1_network())
}

/// Sources 1 and 2 hear source 3; not a valid network until split.
pub fn n2_network() -> NetworkDesc {
    desc(
        "n2",
        2,
        &["3", "1", "2", "rho"],
        &["1", "2", "3"],
        "rho",
        &[("e1", "3", "1"), ("e2", "1", "rho"), ("e3", "3", "2"), ("e4", "2", "rho")],
    )
}

pub fn n2_prime_network() -> NetworkDesc {
    let mut d = desc(
        "n2",
        2,
        &["3", "1", "1'", "2", "2'", "rho"],
        &["1", "2", "3"],
        "rho",
        &[("e1", "3", "1'"), ("e2", "1'", "rho"), ("e3", "3", "2'"), ("e4", "2'", "rho")],
    );
    d.add_edge("1~1'", "1", "1'", true).expect("declared");
    d.add_edge("2~2'", "2", "2'", true).expect("declared");
    d
}

pub fn n2_prime() -> Network {
    build(n2_prime_network())
}

fn two_leaf_tree(name: &str, leaf_edges: usize, root_edges: usize) -> Network {
    let mut edges = Vec::new();
    for leaf in ["1", "2"] {
        for _ in 0..leaf_edges {
            edges.push((leaf, "v"));
        }
    }
    for _ in 0..root_edges {
        edges.push(("v", "rho"));
    }
    let names: Vec<String> = (1..=edges.len()).map(|i| format!("e{i}")).collect();
    let edges: Vec<(&str, &str, &str)> = names
        .iter()
        .zip(&edges)
        .map(|(n, (t, h))| (n.as_str(), *t, *h))
        .collect();
    build(desc(name, 2, &["1", "2", "v", "rho"], &["1", "2"], "rho", &edges))
}

/// `1 -> v`, `2 -> v`, `v -> rho`.
pub fn xor_tree() -> Network {
    two_leaf_tree("xor-tree", 1, 1)
}

/// As [`xor_tree`] with `v -> rho` doubled.
pub fn sum_tree() -> Network {
    two_leaf_tree("sum-tree", 1, 2)
}

pub fn sum_tree_single() -> Network {
    two_leaf_tree("sum-tree-single", 1, 1)
}

/// Every edge doubled.
pub fn sum_tree_doubled() -> Network {
    two_leaf_tree("sum-tree-doubled", 2, 2)
}

/// `1 => v => rho` with `multiplicity` parallel edges per hop.
pub fn chain(edge_alphabet: usize, multiplicity: usize) -> Network {
    let mut d = NetworkDesc::new("chain", edge_alphabet);
    d.add_source("1");
    d.add_node("v").expect("fresh");
    d.set_sink("rho");
    for i in 0..multiplicity {
        d.add_edge(&format!("a{}", i + 1), "1", "v", false).expect("declared");
    }
    for i in 0..multiplicity {
        d.add_edge(&format!("b{}", i + 1), "v", "rho", false).expect("declared");
    }
    build(d)
}

/// One edge `s -> t` over an edge alphabet of size `b`.
pub fn single_edge(b: usize) -> Network {
    build(desc("single-edge", b, &["s", "t"], &["s"], "t", &[("e", "s", "t")]))
}

/// Two parallel binary edges `s -> t`.
pub fn parallel_pair() -> Network {
    build(desc("parallel-pair", 2, &["s", "t"], &["s"], "t", &[("e1", "s", "t"), ("e2", "s", "t")]))
}

fn builtin(name: &str, arity: Option<usize>, q: Option<usize>) -> TargetFunction {
    TargetFunction::builtin(
        name,
        BuiltinParams {
            arity,
            input_size: q,
        },
    )
    .expect("builtin parameters are valid")
}

/// `x1 x2 + x3` over the binary field.
pub fn product_plus_mod2() -> TargetFunction {
    builtin("product-plus-mod2", None, None)
}

/// Sum of `s` binary inputs over the integers.
pub fn arithmetic_sum(s: usize) -> TargetFunction {
    builtin("arithmetic-sum", Some(s), Some(2))
}

/// Sum of two bits mod 2.
pub fn xor() -> TargetFunction {
    builtin("mod-sum", Some(2), Some(2))
}

/// `x mod 2` for `x` in `{0, 1, 2, 3}`.
pub fn parity_of_quaternary() -> TargetFunction {
    TargetFunction::from_fn("parity", 1, 4, 2, |x| x[0] % 2).expect("small table")
}

/// A named network and function, with a code when one is bundled.
#[derive(Clone, Debug)]
pub struct InstanceBundle {
    pub name: &'static str,
    pub network: NetworkDesc,
    pub function: TargetFunction,
    pub code: Option<NetworkCode>,
}

pub const INSTANCE_NAMES: [&str; 7] = [
    "n1",
    "n2",
    "n2-prime",
    "xor-tree",
    "sum-tree",
    "sum-tree-single",
    "parallel-pair",
];

pub fn bundle(name: &str) -> Option<InstanceBundle> {
    let (name, network, function, code) = match name {
        "n1" => ("n1", n1_network(), product_plus_mod2(), Some(paper_code_n1())),
        "n2" => ("n2", n2_network(), arithmetic_sum(3), None),
        "n2-prime" => ("n2-prime", n2_prime_network(), arithmetic_sum(3), None),
        "xor-tree" => ("xor-tree", xor_tree().desc().clone(), xor(), None),
        "sum-tree" => ("sum-tree", sum_tree().desc().clone(), arithmetic_sum(2), None),
        "sum-tree-single" => ("sum-tree-single", sum_tree_single().desc().clone(), arithmetic_sum(2), None),
        "parallel-pair" => ("parallel-pair", parallel_pair().desc().clone(), parity_of_quaternary(), None),
        _ => return None,
    };
    Some(InstanceBundle {
        name,
        network,
        function,
        code,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::code::verify;

    #[test]
    fn bundles_are_consistent() {
        for name in INSTANCE_NAMES {
            let b = bundle(name).unwrap();
            let net = Network::new(b.network.split_sources()).unwrap();
            assert_eq!(net.source_count(), b.function.arity(), "{name}");
            if let Some(code) = &b.code {
                assert!(verify(code, &net, &b.function).unwrap().passed());
            }
        }
        assert!(bundle("n3").is_none());
    }
}
