//! Local search for large uniform families with `vc_dim(F Δ F) <= d`.
//!
//! Kernel: propose a random `k`-set outside the family and add it when the
//! constraint survives; after `patience` consecutive rejections remove one or
//! two random members and continue. The annealing variant additionally
//! perturbs on a rejection with probability `exp(-1/T)`, cooling `T`
//! geometrically each step.

use std::fmt;
use std::str::FromStr;

use rand::seq::index::sample;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::bounds::{bound_value, Theorem};
use super::tracker::{DeltaTracker, ShatterGuard};
use crate::error::{Error, Result};
use crate::setfam::{binomial, check_ground_set, colex_unrank, vc_dim_exhaustive, KSubsets, SetFamily};

/// Uniformly random `m`-subfamily of the `k`-subsets of `[n]`, drawn by
/// sampling `m` distinct colex ranks. Deterministic per seed.
pub fn random_uniform_family(n: usize, k: usize, m: usize, seed: u64) -> Result<SetFamily> {
    check_ground_set(n)?;
    if k > n {
        return Err(Error::InvalidParameter(format!("k = {k} exceeds n = {n}")));
    }
    let total = binomial(n, k);
    if m as u128 > total {
        return Err(Error::InvalidParameter(format!(
            "m = {m} exceeds C({n},{k}) = {total}"
        )));
    }
    let total = usize::try_from(total)
        .map_err(|_| Error::TooLarge(format!("C({n},{k}) = {total} ranks")))?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let masks = sample(&mut rng, total, m)
        .into_iter()
        .map(|r| colex_unrank(r as u128, n, k));
    SetFamily::new(n, masks)
}

/// Mixes a base seed with grid coordinates (splitmix64 finalizer).
pub fn derive_seed(seed: u64, coords: &[u64]) -> u64 {
    coords.iter().fold(seed, |acc, &c| {
        let mut z = acc ^ c.wrapping_add(0x9E37_79B9_7F4A_7C15);
        z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
        z ^ (z >> 31)
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum Strategy {
    /// Add until stuck, then perturb. `patience = 0` picks `2·C(n,k)`.
    Greedy { patience: u32 },
    Anneal {
        patience: u32,
        initial_temperature: f64,
        cooling: f64,
    },
}

impl Strategy {
    pub fn greedy() -> Self {
        Strategy::Greedy { patience: 0 }
    }

    pub fn anneal() -> Self {
        Strategy::Anneal {
            patience: 0,
            initial_temperature: 0.5,
            cooling: 0.9995,
        }
    }

    fn patience(&self) -> u32 {
        match *self {
            Strategy::Greedy { patience } | Strategy::Anneal { patience, .. } => patience,
        }
    }
}

impl fmt::Display for Strategy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Strategy::Greedy { .. } => f.write_str("greedy"),
            Strategy::Anneal { .. } => f.write_str("anneal"),
        }
    }
}

impl FromStr for Strategy {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "greedy" => Ok(Strategy::greedy()),
            "anneal" => Ok(Strategy::anneal()),
            _ => Err(Error::InvalidParameter(format!(
                "unknown strategy `{s}` (expected greedy or anneal)"
            ))),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SearchConfig {
    pub n: usize,
    pub k: usize,
    pub d: usize,
    pub budget: u64,
    pub seed: u64,
    pub strategy: Strategy,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "event", rename_all = "lowercase")]
pub enum SearchEvent {
    Improved { step: u64, size: usize },
    Perturbed { step: u64, removed: Vec<u64> },
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "status", rename_all = "snake_case")]
pub enum ConjectureStatus {
    /// `d = 0` or `d >= n`, outside the conjecture's hypotheses.
    NotApplicable,
    /// No family found so far exceeds the conjectured bound.
    ConsistentSoFar,
    /// A family exceeding the conjectured bound, re-verified by brute force.
    Exceeded { family: SetFamily, vc_dim_delta: i32 },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SearchState {
    pub config: SearchConfig,
    pub moves_used: u64,
    pub current: SetFamily,
    pub best: SetFamily,
    pub best_size: usize,
    /// `2·C(n, ⌊d/2⌋)`.
    pub main_bound: u128,
    /// `2^r·C(n-r, ⌊d/2⌋)` when `0 < d < n`.
    pub conjecture_bound: Option<u128>,
    pub conjecture: ConjectureStatus,
    /// True once the family holds every `k`-subset.
    pub saturated: bool,
    pub transcript: Vec<SearchEvent>,
}

struct Pools {
    universe: Vec<u64>,
    inside: Vec<usize>,
    outside: Vec<usize>,
    pos: Vec<usize>,
    is_in: Vec<bool>,
}

impl Pools {
    fn new(universe: Vec<u64>) -> Self {
        let len = universe.len();
        Pools {
            universe,
            inside: Vec::new(),
            outside: (0..len).collect(),
            pos: (0..len).collect(),
            is_in: vec![false; len],
        }
    }

    fn move_in(&mut self, idx: usize) {
        debug_assert!(!self.is_in[idx]);
        let p = self.pos[idx];
        self.outside.swap_remove(p);
        if let Some(&moved) = self.outside.get(p) {
            self.pos[moved] = p;
        }
        self.pos[idx] = self.inside.len();
        self.inside.push(idx);
        self.is_in[idx] = true;
    }

    fn move_out(&mut self, idx: usize) {
        debug_assert!(self.is_in[idx]);
        let p = self.pos[idx];
        self.inside.swap_remove(p);
        if let Some(&moved) = self.inside.get(p) {
            self.pos[moved] = p;
        }
        self.pos[idx] = self.outside.len();
        self.outside.push(idx);
        self.is_in[idx] = false;
    }
}

/// Runs the local search. A best family is recorded only after an
/// independent from-scratch recomputation of `vc_dim(F Δ F)`; exceeding the
/// proved uniform bound is reported as an internal invariant violation.
pub fn search_extremal(config: &SearchConfig) -> Result<SearchState> {
    let SearchConfig { n, k, d, budget, seed, strategy } = config.clone();
    check_ground_set(n)?;
    if !(0 < k && k < n) || d >= n {
        return Err(Error::InvalidParameter(format!(
            "search needs 0 < k < n and d < n (n = {n}, k = {k}, d = {d})"
        )));
    }
    let universe_size = binomial(n, k);
    if universe_size > 1 << 22 {
        return Err(Error::TooLarge(format!("C({n},{k}) = {universe_size} candidate sets")));
    }
    let mut pools = Pools::new(KSubsets::new(n, k).collect());
    let universe_len = pools.universe.len();
    let patience = match strategy.patience() {
        0 => (2 * universe_len as u32).max(8),
        p => p,
    };
    let mut temperature = match strategy {
        Strategy::Anneal { initial_temperature, .. } => initial_temperature,
        Strategy::Greedy { .. } => 0.0,
    };

    let main_bound = bound_value(Theorem::Main, n, d as i64);
    let conjecture_bound = (d > 0).then(|| bound_value(Theorem::Conjecture, n, d as i64));
    let mut conjecture = if conjecture_bound.is_some() {
        ConjectureStatus::ConsistentSoFar
    } else {
        ConjectureStatus::NotApplicable
    };

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut tracker = DeltaTracker::new(n);
    let mut guard = ShatterGuard::new(n, d);
    let first = rng.gen_range(0..universe_len);
    pools.move_in(first);
    let fresh = tracker.add(pools.universe[first]);
    if let Some(g) = guard.as_mut() {
        g.insert(&fresh);
    }

    let mut best = tracker.family()?;
    let mut transcript = vec![SearchEvent::Improved { step: 0, size: 1 }];
    let mut stuck = 0u32;
    let mut moves_used = 0u64;
    let mut saturated = universe_len == 1;

    while moves_used < budget && !saturated {
        let step = moves_used;
        moves_used += 1;
        let idx = pools.outside[rng.gen_range(0..pools.outside.len())];
        let cand = pools.universe[idx];
        let diffs = tracker.new_differences(cand);
        let feasible = match guard.as_ref() {
            Some(g) => !g.would_violate(&diffs),
            None => {
                let mut delta = tracker.delta_masks();
                delta.extend_from_slice(&diffs);
                SetFamily::new(n, delta)?.vc_dim() <= d as i32
            }
        };
        if feasible {
            pools.move_in(idx);
            let fresh = tracker.add(cand);
            if let Some(g) = guard.as_mut() {
                g.insert(&fresh);
            }
            stuck = 0;
            if tracker.len() > best.len() {
                let family = tracker.family()?;
                let vc = family.delta().vc_dim();
                if vc > d as i32 {
                    return Err(Error::Invariant(format!(
                        "search recorded a family with vc_dim(FΔF) = {vc} > {d}"
                    )));
                }
                if family.len() as u128 > main_bound {
                    return Err(Error::Invariant(format!(
                        "family of size {} exceeds the proved bound {main_bound}",
                        family.len()
                    )));
                }
                if let Some(cb) = conjecture_bound {
                    if family.len() as u128 > cb {
                        let brute = vc_dim_exhaustive(&family.delta())?;
                        if brute <= d as i32 {
                            conjecture = ConjectureStatus::Exceeded {
                                family: family.clone(),
                                vc_dim_delta: brute,
                            };
                        }
                    }
                }
                transcript.push(SearchEvent::Improved {
                    step,
                    size: family.len(),
                });
                best = family;
            }
            saturated = tracker.len() == universe_len;
            continue;
        }

        stuck += 1;
        let mut perturb = stuck >= patience;
        if let Strategy::Anneal { cooling, .. } = strategy {
            if !perturb && temperature > 0.0 {
                perturb = rng.gen::<f64>() < (-1.0 / temperature).exp();
            }
            temperature *= cooling;
        }
        if perturb && tracker.len() > 1 {
            let count = rng.gen_range(1..=2usize).min(tracker.len() - 1);
            let mut removed = Vec::with_capacity(count);
            for _ in 0..count {
                let out = pools.inside[rng.gen_range(0..pools.inside.len())];
                pools.move_out(out);
                tracker.remove(pools.universe[out]);
                removed.push(pools.universe[out]);
            }
            if let Some(g) = guard.as_mut() {
                g.rebuild(&tracker.delta_masks());
            }
            transcript.push(SearchEvent::Perturbed { step, removed });
            stuck = 0;
        } else if perturb {
            stuck = 0;
        }
    }

    let best_size = best.len();
    Ok(SearchState {
        config: config.clone(),
        moves_used,
        current: tracker.family()?,
        best,
        best_size,
        main_bound,
        conjecture_bound,
        conjecture,
        saturated,
        transcript,
    })
}
