//! Brute-force map counting: ground truth for resonance constants.
//!
//! A map with prescribed vertex valences is a pair `(σ, ω)` where `σ` is the
//! fixed labelled-cycle permutation whose cycles are the vertices (one cycle
//! per vertex, cycle lengths = valences) and `ω` is a fixed-point-free
//! involution pairing darts into edges, subject to connectedness. The genus
//! comes from Euler's relation `V - E + F = 2 - 2g`, with faces counted as
//! the cycles of `σ∘ω` (apply `ω` first, then `σ`; the opposite convention
//! gives the same genus partition for these profiles, and this one is locked
//! by the `(3,3) -> {12, 3}` pins).
//!
//! Counts are for labelled structures exactly as the bijection gives them —
//! no automorphism quotients — which is what the exponential generating
//! convention `coefficient = count / m!` expects.

use rayon::prelude::*;
use serde::Serialize;
use std::collections::BTreeMap;

use crate::rational::{factorial, Rational};

/// Hard ceiling on the dart total: `(2E-1)!!` matchings get enumerated.
pub const MAX_DARTS: usize = 20;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum OracleError {
    #[error("profile {profile:?} has {darts} darts; enumerating {estimate} matchings exceeds the {max}-dart bound")]
    EnumerationTooLarge { profile: Vec<u32>, darts: usize, estimate: u128, max: usize },
    #[error("profile must not be empty")]
    EmptyProfile,
}

/// The fixed vertex permutation for a valence profile: vertex `i` owns a
/// contiguous dart block, cyclically ordered.
#[derive(Debug, Clone)]
pub struct DartStructure {
    pub valences: Vec<u32>,
    /// `sigma[d]` = dart after `d` in its vertex cycle.
    pub sigma: Vec<u32>,
    /// `vertex_of[d]` = index of the vertex owning dart `d`.
    pub vertex_of: Vec<u32>,
}

impl DartStructure {
    pub fn new(profile: &[u32]) -> Result<Self, OracleError> {
        if profile.is_empty() {
            return Err(OracleError::EmptyProfile);
        }
        let darts: usize = profile.iter().map(|&v| v as usize).sum();
        let mut sigma = vec![0u32; darts];
        let mut vertex_of = vec![0u32; darts];
        let mut start = 0usize;
        for (v, &valence) in profile.iter().enumerate() {
            let len = valence as usize;
            for i in 0..len {
                sigma[start + i] = (start + (i + 1) % len) as u32;
                vertex_of[start + i] = v as u32;
            }
            start += len;
        }
        Ok(DartStructure { valences: profile.to_vec(), sigma, vertex_of })
    }

    pub fn dart_count(&self) -> usize {
        self.sigma.len()
    }
}

/// Genus of the map `(sigma, omega)`, or `None` when the underlying graph
/// is disconnected. `omega` must be a fixed-point-free involution given as
/// `omega[d]` = partner of `d`.
pub fn genus_of_map(sigma: &[u32], omega: &[u32]) -> Option<u32> {
    let darts = sigma.len();
    debug_assert_eq!(omega.len(), darts);

    // Vertices and edges.
    let mut vertex_of = vec![u32::MAX; darts];
    let mut vertices = 0u32;
    for d in 0..darts {
        if vertex_of[d] == u32::MAX {
            let mut e = d;
            loop {
                vertex_of[e] = vertices;
                e = sigma[e] as usize;
                if e == d {
                    break;
                }
            }
            vertices += 1;
        }
    }
    let edges = (darts / 2) as u32;

    // Connectivity: orbit flood-fill of <sigma, omega> on darts.
    let mut seen = vec![false; darts];
    let mut stack = vec![0usize];
    seen[0] = true;
    let mut reached = 1usize;
    while let Some(d) = stack.pop() {
        for e in [sigma[d] as usize, omega[d] as usize] {
            if !seen[e] {
                seen[e] = true;
                reached += 1;
                stack.push(e);
            }
        }
    }
    if reached != darts {
        return None;
    }

    // Faces: cycles of sigma∘omega (omega first).
    let mut visited = vec![false; darts];
    let mut faces = 0u32;
    for d in 0..darts {
        if !visited[d] {
            let mut e = d;
            while !visited[e] {
                visited[e] = true;
                e = sigma[omega[e] as usize] as usize;
            }
            faces += 1;
        }
    }

    // V - E + F = 2 - 2g
    let euler = vertices as i64 - edges as i64 + faces as i64;
    debug_assert!(euler <= 2 && (2 - euler) % 2 == 0);
    Some(((2 - euler) / 2) as u32)
}

/// Exact count of genus-`g` maps with the given valence profile.
#[derive(Debug, Clone, Serialize)]
pub struct MapCountRecord {
    pub profile: Vec<u32>,
    pub genus: u32,
    pub count: u64,
    pub matchings_examined: u64,
}

/// Full genus partition of all matchings for a profile.
#[derive(Debug, Clone, Serialize)]
pub struct GenusPartition {
    pub profile: Vec<u32>,
    pub by_genus: BTreeMap<u32, u64>,
    pub disconnected: u64,
    pub matchings_examined: u64,
}

/// `(darts - 1)!!`, the number of perfect matchings on `darts` points.
pub fn double_factorial_odd(darts: usize) -> u128 {
    let mut acc: u128 = 1;
    let mut k = darts as u128;
    while k > 1 {
        acc *= k - 1;
        k -= 2;
    }
    acc
}

fn check_bounds(profile: &[u32]) -> Result<usize, OracleError> {
    if profile.is_empty() {
        return Err(OracleError::EmptyProfile);
    }
    let darts: usize = profile.iter().map(|&v| v as usize).sum();
    if darts > MAX_DARTS {
        return Err(OracleError::EnumerationTooLarge {
            profile: profile.to_vec(),
            darts,
            estimate: double_factorial_odd(darts),
            max: MAX_DARTS,
        });
    }
    Ok(darts)
}

/// Enumerate every fixed-point-free involution on the darts of `profile`
/// and partition the connected ones by genus.
///
/// Matchings are generated by pairing the lowest unmatched dart with each
/// candidate in turn; the first pairing level is fanned out across threads
/// and the per-branch tallies merged by addition.
pub fn count_all_genera(profile: &[u32]) -> Result<GenusPartition, OracleError> {
    let darts = check_bounds(profile)?;
    if !darts.is_multiple_of(2) {
        // No fixed-point-free involution on an odd set: reject by parity.
        return Ok(GenusPartition {
            profile: profile.to_vec(),
            by_genus: BTreeMap::new(),
            disconnected: 0,
            matchings_examined: 0,
        });
    }
    let structure = DartStructure::new(profile)?;
    let sigma = &structure.sigma;

    let max_genus = darts / 4 + 1;
    let tallies: Vec<(Vec<u64>, u64, u64)> = (1..darts)
        .into_par_iter()
        .map(|first_partner| {
            let mut omega = vec![u32::MAX; darts];
            omega[0] = first_partner as u32;
            omega[first_partner] = 0;
            let mut by_genus = vec![0u64; max_genus + 1];
            let mut disconnected = 0u64;
            let mut examined = 0u64;
            enumerate_rest(sigma, &mut omega, 1, &mut by_genus, &mut disconnected, &mut examined);
            (by_genus, disconnected, examined)
        })
        .collect();

    let mut by_genus_vec = vec![0u64; max_genus + 1];
    let mut disconnected = 0u64;
    let mut examined = 0u64;
    for (bg, dc, ex) in tallies {
        for (i, v) in bg.iter().enumerate() {
            by_genus_vec[i] += v;
        }
        disconnected += dc;
        examined += ex;
    }

    let by_genus = by_genus_vec
        .into_iter()
        .enumerate()
        .filter(|(_, c)| *c > 0)
        .map(|(g, c)| (g as u32, c))
        .collect();
    Ok(GenusPartition {
        profile: profile.to_vec(),
        by_genus,
        disconnected,
        matchings_examined: examined,
    })
}

fn enumerate_rest(
    sigma: &[u32],
    omega: &mut [u32],
    from: usize,
    by_genus: &mut [u64],
    disconnected: &mut u64,
    examined: &mut u64,
) {
    let mut d = from;
    while d < omega.len() && omega[d] != u32::MAX {
        d += 1;
    }
    if d == omega.len() {
        *examined += 1;
        match genus_of_map(sigma, omega) {
            Some(g) => by_genus[g as usize] += 1,
            None => *disconnected += 1,
        }
        return;
    }
    for e in d + 1..omega.len() {
        if omega[e] == u32::MAX {
            omega[d] = e as u32;
            omega[e] = d as u32;
            enumerate_rest(sigma, omega, d + 1, by_genus, disconnected, examined);
            omega[d] = u32::MAX;
            omega[e] = u32::MAX;
        }
    }
}

/// Count genus-`g` maps with the given valence profile.
pub fn count_maps(profile: &[u32], genus: u32) -> Result<MapCountRecord, OracleError> {
    let partition = count_all_genera(profile)?;
    Ok(MapCountRecord {
        profile: profile.to_vec(),
        genus,
        count: partition.by_genus.get(&genus).copied().unwrap_or(0),
        matchings_examined: partition.matchings_examined,
    })
}

/// What a resonance constant is a count *of*.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ResonanceKind {
    /// Taylor coefficients of `e_g`: maps with `m` trivalent vertices.
    FreeEnergy,
    /// Taylor coefficients of `z_g`: two extra univalent vertices.
    Subdiagonal,
}

/// Map counts converted to series coefficients by the `1/m!` labelled-count
/// normalization: order `m` maps to `count(genus, profile(m)) / m!`.
pub fn resonance_table(
    kind: ResonanceKind,
    genus: u32,
    orders: &[u32],
) -> Result<BTreeMap<u32, Rational>, OracleError> {
    let mut out = BTreeMap::new();
    for &m in orders {
        let mut profile: Vec<u32> = match kind {
            ResonanceKind::FreeEnergy => Vec::new(),
            ResonanceKind::Subdiagonal => vec![1, 1],
        };
        profile.extend(std::iter::repeat_n(3, m as usize));
        let record = count_maps(&profile, genus)?;
        let coeff = Rational::from_integer(record.count.into()) / factorial(m as u64);
        out.insert(m, coeff);
    }
    Ok(out)
}
