//! Peeling decoder checked against Gaussian elimination over GF(2).

use std::collections::{BTreeMap, BTreeSet};

use mdsa_core::lt::{encode_symbol, robust_soliton};
use mdsa_core::seed::rng_for;
use mdsa_core::{lt_decode, EncodedSymbol, NodeId};
use rand::Rng;

/// Sources whose value is determined by the symbols, with those values.
fn gf2_solvable(symbols: &[EncodedSymbol], k: usize) -> BTreeMap<usize, Vec<u8>> {
    let len = symbols.first().map_or(0, |s| s.payload.len());
    let mut rows: Vec<(Vec<bool>, Vec<u8>)> = symbols
        .iter()
        .map(|s| {
            let mut bits = vec![false; k];
            for id in &s.id_set {
                bits[id.index()] = true;
            }
            (bits, s.payload.clone())
        })
        .collect();
    // reduced row echelon form
    let mut pivot_row = 0;
    let mut pivots = Vec::new();
    for col in 0..k {
        let Some(r) = (pivot_row..rows.len()).find(|&r| rows[r].0[col]) else {
            continue;
        };
        rows.swap(pivot_row, r);
        let (bits, data) = rows[pivot_row].clone();
        for (i, row) in rows.iter_mut().enumerate() {
            if i != pivot_row && row.0[col] {
                for c in 0..k {
                    row.0[c] ^= bits[c];
                }
                for b in 0..len {
                    row.1[b] ^= data[b];
                }
            }
        }
        pivots.push(col);
        pivot_row += 1;
    }
    // a variable is determined iff its pivot row has no free columns
    let mut out = BTreeMap::new();
    for (r, &col) in pivots.iter().enumerate() {
        if rows[r].0.iter().filter(|&&b| b).count() == 1 {
            out.insert(col, rows[r].1.clone());
        }
    }
    out
}

fn random_instance(seed: u64) -> (usize, Vec<Vec<u8>>, Vec<EncodedSymbol>) {
    let mut rng = rng_for(seed, "lt-instance", &[]);
    let k = rng.random_range(1..=10);
    let sources: Vec<Vec<u8>> = (0..k).map(|_| (0..4).map(|_| rng.random()).collect()).collect();
    let count = rng.random_range(0..=2 * k + 2);
    let symbols = (0..count)
        .map(|_| {
            let d = rng.random_range(1..=k);
            let picks = rand::seq::index::sample(&mut rng, k, d);
            EncodedSymbol::combine(picks.iter().map(|i| (NodeId::from(i), sources[i].as_slice())))
                .unwrap()
        })
        .collect();
    (k, sources, symbols)
}

#[test]
fn peeling_is_sound_and_within_gf2_solvable_set() {
    for seed in 0..500 {
        let (k, sources, symbols) = random_instance(seed);
        let peeled = lt_decode(&symbols, k).unwrap();
        let solvable = gf2_solvable(&symbols, k);
        for (id, value) in &peeled {
            assert_eq!(solvable.get(&id.index()), Some(value), "seed {seed}");
            assert_eq!(value, &sources[id.index()]);
        }
        // XOR consistency with every fully covered symbol
        for s in &symbols {
            if s.id_set.iter().all(|id| peeled.contains_key(id)) {
                let mut acc = vec![0u8; 4];
                for id in &s.id_set {
                    for (a, b) in acc.iter_mut().zip(&peeled[id]) {
                        *a ^= b;
                    }
                }
                assert_eq!(acc, s.payload);
            }
        }
    }
}

#[test]
fn twenty_symbols_over_eight_sources() {
    let mut rng = rng_for(8, "k8", &[]);
    let sources: Vec<Vec<u8>> = (0..8).map(|_| (0..16).map(|_| rng.random()).collect()).collect();
    let dist = robust_soliton(8, 0.1, 0.5).unwrap();
    let symbols: Vec<EncodedSymbol> = (0..20).map(|_| encode_symbol(&sources, &dist, &mut rng)).collect();
    let peeled: BTreeSet<usize> = lt_decode(&symbols, 8).unwrap().keys().map(|k| k.index()).collect();
    let solvable: BTreeSet<usize> = gf2_solvable(&symbols, 8).keys().copied().collect();
    assert!(peeled.is_subset(&solvable));
}

#[test]
fn adding_symbols_never_shrinks_recovery() {
    for seed in 0..200 {
        let (k, _, symbols) = random_instance(seed);
        let mut prev = 0;
        for end in 0..=symbols.len() {
            let got = lt_decode(&symbols[..end], k).unwrap().len();
            assert!(got >= prev, "seed {seed}");
            prev = got;
        }
    }
}
