//! LT (Luby transform) coding: soliton degree distributions, XOR symbols and
//! a peeling decoder.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use rand::distr::weighted::WeightedIndex;
use rand::distr::Distribution;
use rand::Rng;

use crate::error::{Error, Result};
use crate::topology::NodeId;

/// Probability vector over degrees `1..=k`.
#[derive(Debug, Clone)]
pub struct DegreeDistribution {
    k: usize,
    probabilities: Vec<f64>,
    sampler: WeightedIndex<f64>,
}

impl DegreeDistribution {
    fn from_weights(weights: Vec<f64>) -> Result<Self> {
        let total: f64 = weights.iter().sum();
        if weights.is_empty() || !(total > 0.0) || weights.iter().any(|w| *w < 0.0) {
            return Err(Error::param("degree weights must be non-negative with positive sum"));
        }
        let probabilities: Vec<f64> = weights.iter().map(|w| w / total).collect();
        let sampler = WeightedIndex::new(&probabilities)
            .map_err(|e| Error::param(format!("degree weights: {e}")))?;
        Ok(DegreeDistribution {
            k: probabilities.len(),
            probabilities,
            sampler,
        })
    }

    pub fn k(&self) -> usize {
        self.k
    }

    /// `probabilities()[i]` is the probability of degree `i + 1`.
    pub fn probabilities(&self) -> &[f64] {
        &self.probabilities
    }

    pub fn prob(&self, degree: usize) -> f64 {
        if degree == 0 || degree > self.k {
            0.0
        } else {
            self.probabilities[degree - 1]
        }
    }

    pub fn mean(&self) -> f64 {
        self.probabilities
            .iter()
            .enumerate()
            .map(|(i, p)| (i + 1) as f64 * p)
            .sum()
    }

    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> usize {
        self.sampler.sample(rng) + 1
    }
}

fn ideal_weights(k: usize) -> Vec<f64> {
    (1..=k)
        .map(|i| {
            if i == 1 {
                1.0 / k as f64
            } else {
                1.0 / (i as f64 * (i - 1) as f64)
            }
        })
        .collect()
}

pub fn ideal_soliton(k: usize) -> Result<DegreeDistribution> {
    if k == 0 {
        return Err(Error::param("soliton needs k >= 1"));
    }
    DegreeDistribution::from_weights(ideal_weights(k))
}

/// Robust soliton: ideal soliton plus the `tau` correction with its spike at
/// `k / R`, where `R = c * ln(k / delta) * sqrt(k)`, renormalized.
pub fn robust_soliton(k: usize, c: f64, delta: f64) -> Result<DegreeDistribution> {
    if k == 0 {
        return Err(Error::param("soliton needs k >= 1"));
    }
    if !(c > 0.0 && c.is_finite()) {
        return Err(Error::param(format!("robust soliton c must be positive, got {c}")));
    }
    if !(delta > 0.0 && delta < 1.0) {
        return Err(Error::param(format!("robust soliton delta must be in (0,1), got {delta}")));
    }
    let kf = k as f64;
    let r = c * (kf / delta).ln() * kf.sqrt();
    let spike = ((kf / r).floor() as usize).clamp(1, k);
    let mut weights = ideal_weights(k);
    for (idx, w) in weights.iter_mut().enumerate() {
        let i = idx + 1;
        if i < spike {
            *w += r / (i as f64 * kf);
        } else if i == spike {
            *w += r * (r / delta).ln().max(0.0) / kf;
        }
    }
    DegreeDistribution::from_weights(weights)
}

/// XOR of the payloads of `id_set`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EncodedSymbol {
    pub id_set: BTreeSet<NodeId>,
    pub payload: Vec<u8>,
}

impl EncodedSymbol {
    /// Builds a symbol from the chosen sources, looking payloads up by id.
    pub fn combine<'a>(ids: impl IntoIterator<Item = (NodeId, &'a [u8])>) -> Option<Self> {
        let mut id_set = BTreeSet::new();
        let mut payload: Option<Vec<u8>> = None;
        for (id, data) in ids {
            if !id_set.insert(id) {
                continue;
            }
            match payload.as_mut() {
                None => payload = Some(data.to_vec()),
                Some(acc) => xor_into(acc, data),
            }
        }
        payload.map(|payload| EncodedSymbol { id_set, payload })
    }

    pub fn degree(&self) -> usize {
        self.id_set.len()
    }
}

impl fmt::Display for EncodedSymbol {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let ids: Vec<String> = self.id_set.iter().map(ToString::to_string).collect();
        write!(f, "ids={{{}}} len={}", ids.join(","), self.payload.len())
    }
}

pub(crate) fn xor_into(acc: &mut [u8], other: &[u8]) {
    for (a, b) in acc.iter_mut().zip(other) {
        *a ^= b;
    }
}

/// Draws one symbol over `sources` with a degree from `dist`.
pub fn encode_symbol<R: Rng + ?Sized>(
    sources: &[Vec<u8>],
    dist: &DegreeDistribution,
    rng: &mut R,
) -> EncodedSymbol {
    let d = dist.sample(rng).min(sources.len());
    let picks = rand::seq::index::sample(rng, sources.len(), d);
    EncodedSymbol::combine(picks.iter().map(|i| (NodeId::from(i), sources[i].as_slice())))
        .expect("degree is at least 1")
}

/// Peeling decoder. Returns every source that can be resolved by repeatedly
/// taking a degree-1 symbol and XOR-ing it out of the others.
pub fn lt_decode(symbols: &[EncodedSymbol], k: usize) -> Result<BTreeMap<NodeId, Vec<u8>>> {
    let mut by_set: BTreeMap<&BTreeSet<NodeId>, &[u8]> = BTreeMap::new();
    let mut len = None;
    for s in symbols {
        if s.id_set.is_empty() {
            return Err(Error::param("encoded symbol with empty id set"));
        }
        if let Some(bad) = s.id_set.iter().find(|id| id.index() >= k) {
            return Err(Error::param(format!("symbol references source {bad} >= k={k}")));
        }
        match len {
            None => len = Some(s.payload.len()),
            Some(l) if l != s.payload.len() => {
                return Err(Error::DataCorruption(format!(
                    "payload length {} differs from {l}",
                    s.payload.len()
                )))
            }
            _ => {}
        }
        if let Some(prev) = by_set.insert(&s.id_set, &s.payload) {
            if prev != s.payload.as_slice() {
                return Err(Error::DataCorruption(format!(
                    "two symbols over {s} carry different payloads"
                )));
            }
        }
    }

    // residual (unresolved ids, payload) per distinct symbol
    let mut residual: Vec<(BTreeSet<NodeId>, Vec<u8>)> = by_set
        .into_iter()
        .map(|(ids, p)| (ids.clone(), p.to_vec()))
        .collect();
    let mut containing: BTreeMap<NodeId, Vec<usize>> = BTreeMap::new();
    for (i, (ids, _)) in residual.iter().enumerate() {
        for &id in ids {
            containing.entry(id).or_default().push(i);
        }
    }
    let mut ripple: Vec<usize> = (0..residual.len())
        .filter(|&i| residual[i].0.len() == 1)
        .rev()
        .collect();
    let mut recovered: BTreeMap<NodeId, Vec<u8>> = BTreeMap::new();

    while let Some(i) = ripple.pop() {
        let Some(&id) = residual[i].0.iter().next() else {
            continue;
        };
        if residual[i].0.len() != 1 {
            continue;
        }
        let value = residual[i].1.clone();
        recovered.insert(id, value.clone());
        for &j in containing.get(&id).map(Vec::as_slice).unwrap_or(&[]) {
            let (ids, payload) = &mut residual[j];
            if !ids.remove(&id) {
                continue;
            }
            xor_into(payload, &value);
            match ids.len() {
                0 if payload.iter().any(|&b| b != 0) => {
                    return Err(Error::DataCorruption(format!(
                        "symbols disagree on the value of source {id}"
                    )))
                }
                1 => ripple.push(j),
                _ => {}
            }
        }
    }
    Ok(recovered)
}
