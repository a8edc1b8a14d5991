//! Forwarding code for a single source.
//!
//! The source computes `f^(k)(x)`, ranks it in `image^k`, writes the rank
//! as `n M` base-`|B|` digits and sends digits `p n .. (p+1) n` down the
//! `p`-th of `M` edge-disjoint paths. Interior nodes forward; the sink
//! reassembles the rank.

use num_bigint::BigUint;

use super::{CodeEncoders, CodeError, Layout, NetworkCode};
use crate::bounds::RateCertificate;
use crate::function::TargetFunction;
use crate::network::{Network, PathCount};
use crate::radix;
use crate::sets::{EdgeId, SourceIdx};

pub fn single_source_code(net: &Network, f: &TargetFunction, n: usize, k: usize) -> Result<NetworkCode, CodeError> {
    if net.source_count() != 1 {
        return Err(CodeError::NotSingleSource(net.source_count()));
    }
    if f.arity() != 1 {
        return Err(CodeError::ArityMismatch {
            sources: 1,
            arity: f.arity(),
        });
    }
    let layout = Layout::new(net, f.input_size(), n, k)?;
    let source = net.source_node(SourceIdx(0));
    let PathCount::Finite(m) = net.edge_disjoint_path_count(source, net.sink()) else {
        return Err(CodeError::UnboundedConnectivity);
    };
    let image = f.image();
    let b = net.edge_alphabet();
    let cert = RateCertificate::new(image.len(), k, n, b, m).ok_or(CodeError::ZeroBlock)?;
    if !cert.satisfied {
        return Err(CodeError::RateViolated(cert));
    }
    let paths = net
        .edge_disjoint_paths(source, net.sink())
        .ok_or(CodeError::UnboundedConnectivity)?;
    let q = f.input_size();
    let digits = n * m;

    // block carried by path p for each source column
    let blocks: Vec<Vec<usize>> = (0..layout.column_space)
        .map(|col| {
            let column = radix::unrank(col, q, k);
            let rank = column.iter().fold(0usize, |acc, &x| {
                acc * image.len() + image.binary_search(&f.at(x)).expect("value in image")
            });
            let word = radix::unrank(rank, b, digits);
            word.chunks(n).map(|c| radix::rank(c, b)).collect()
        })
        .collect();

    let mut on_path: Vec<Option<(usize, Option<EdgeId>)>> = vec![None; net.edge_count()];
    for (p, path) in paths.iter().enumerate() {
        for (i, &e) in path.iter().enumerate() {
            if !net.edge(e).infinite {
                on_path[e.0] = Some((p, i.checked_sub(1).map(|j| path[j])));
            }
        }
    }

    let mut tables: Vec<Option<Vec<usize>>> = vec![None; net.edge_count()];
    for e in (0..net.edge_count()).map(EdgeId) {
        let edge = net.edge(e);
        if edge.infinite {
            continue;
        }
        let len = layout.table_len[e.0];
        let table = match on_path[e.0] {
            None => vec![0; len],
            Some((p, None)) => (0..len).map(|col| blocks[col][p]).collect(),
            Some((p, Some(prev))) => {
                let inputs = net.in_edges(edge.tail);
                let radices: Vec<usize> = inputs.iter().map(|i| layout.edge_space[i.0]).collect();
                let slot = inputs.iter().position(|&i| i == prev).expect("path edge enters its tail");
                let raw = net.edge(prev).infinite;
                (0..len)
                    .map(|idx| {
                        let v = radix::unrank_mixed(idx, &radices)[slot];
                        if raw {
                            blocks[v][p]
                        } else {
                            v
                        }
                    })
                    .collect()
            }
        };
        tables[e.0] = Some(table);
    }
    let encoders = CodeEncoders::new(net, q, n, k, tables)?;

    let sink_inputs = net.in_edges(net.sink());
    let radices: Vec<usize> = sink_inputs.iter().map(|i| layout.edge_space[i.0]).collect();
    let last: Vec<usize> = paths
        .iter()
        .map(|path| {
            let e = *path.last().expect("non-empty path");
            sink_inputs.iter().position(|&i| i == e).expect("path ends at the sink")
        })
        .collect();
    let bound = BigUint::from(image.len()).pow(k as u32);
    let decoder = (0..layout.decoder_len)
        .map(|idx| {
            let received = radix::unrank_mixed(idx, &radices);
            let rank = last.iter().fold(BigUint::from(0u32), |acc, &slot| {
                acc * BigUint::from(layout.block_space) + BigUint::from(received[slot])
            });
            if rank >= bound {
                return 0;
            }
            let rank: usize = rank.try_into().expect("rank below |image|^k");
            radix::unrank(rank, image.len(), k)
                .iter()
                .fold(0, |acc, &i| acc * f.output_size() + image[i])
        })
        .collect();
    NetworkCode::new(net, encoders, f.output_size(), decoder)
}
