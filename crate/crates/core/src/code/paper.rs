use super::{CodeEncoders, NetworkCode};
use crate::instances;

/// The `(1, 2)` code on N1: source `i` sends row 1 of its column towards
/// `v` and row 2 straight to the sink; `v` computes `f` on row 1 and the
/// sink computes row 2 itself.
pub fn paper_code_n1() -> NetworkCode {
    let net = instances::n1();
    let mut tables = vec![None; net.edge_count()];
    let mut set = |name: &str, table: Vec<usize>| {
        tables[net.edge_id(name).expect("N1 edge").0] = Some(table);
    };
    // column rank of source i is 2 x_1i + x_2i
    for name in ["e1", "e2", "e3"] {
        set(name, vec![0, 0, 1, 1]);
    }
    for name in ["e4", "e5", "e6"] {
        set(name, vec![0, 1, 0, 1]);
    }
    // v sees (e1, e2, e3)
    set("e7", (0..8).map(|i| ((i >> 2) * ((i >> 1) & 1) + (i & 1)) % 2).collect());
    let encoders = CodeEncoders::new(&net, 2, 1, 2, tables).expect("N1 code shape");
    // the sink sees (e4, e5, e6, e7) and outputs (e7, e4 e5 + e6)
    let decoder = (0..16)
        .map(|i| {
            let (e4, e5, e6, e7) = (i >> 3, (i >> 2) & 1, (i >> 1) & 1, i & 1);
            e7 * 2 + (e4 * e5 + e6) % 2
        })
        .collect();
    NetworkCode::new(&net, encoders, 2, decoder).expect("N1 decoder shape")
}
