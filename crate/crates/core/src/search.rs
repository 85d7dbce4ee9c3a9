//! Searches for large acute sets: exact branch-and-bound, randomized greedy,
//! and integer grid constructions.
//!
//! Points of F_q^n are indexed in canonical (lexicographic) order, so index 0
//! is the zero vector.

use std::collections::BTreeSet;
use std::sync::atomic::{AtomicBool, AtomicU64, AtomicUsize, Ordering};
use std::sync::Mutex;
use std::time::{Instant, SystemTime, UNIX_EPOCH};

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exec;
use crate::field::{Elem, FieldInfo, FieldOptions, FieldSpec, QRClass};
use crate::geometry::{point_from_index, set_is_acute, space_size, triple_acute_raw, PointSet};
use crate::io::PointSetDoc;

/// Largest space `q^n` for the exact search.
pub const EXACT_SPACE_CAP: u128 = 10_000;
/// Largest space `q^n` for the greedy search.
pub const GREEDY_SPACE_CAP: u128 = 1_000_000;
/// Largest grid `m^n`.
pub const GRID_CAP: u128 = 1_000;
pub const DEFAULT_NODE_BUDGET: u64 = 100_000_000;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SearchMode {
    Exact,
    Greedy,
}

/// Echo of the parameters that produced a [`SearchReport`].
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SearchConfig {
    pub mode: SearchMode,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub node_budget: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub fix_origin: Option<bool>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub restarts: Option<u64>,
}

/// Run-dependent values, excluded from reproducibility comparisons.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Timestamp {
    pub generated_at_unix_ms: u64,
    pub wall_time_ms: f64,
}

impl Timestamp {
    fn since(start: Instant) -> Self {
        Timestamp {
            generated_at_unix_ms: SystemTime::now()
                .duration_since(UNIX_EPOCH)
                .map(|d| d.as_millis() as u64)
                .unwrap_or(0),
            wall_time_ms: start.elapsed().as_secs_f64() * 1e3,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SearchReport {
    pub field: FieldInfo,
    pub n: usize,
    pub best_size: usize,
    pub witness: PointSetDoc,
    /// True only when the whole search space was covered.
    pub exhaustive: bool,
    pub nodes_explored: u64,
    pub config: SearchConfig,
    pub timestamp: Timestamp,
}

impl SearchReport {
    pub fn witness_set(&self) -> Result<PointSet> {
        self.witness.to_set()
    }
}

/// All points of F_q^n with flattened coordinates.
struct Space {
    field: FieldSpec,
    n: usize,
    size: usize,
    coords: Vec<Elem>,
}

impl Space {
    fn new(field: &FieldSpec, n: usize, cap: u128) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidParameter(
                "dimension must be at least 1".into(),
            ));
        }
        let size = space_size(field, n).unwrap_or(u128::MAX);
        if size > cap {
            return Err(Error::SpaceTooLarge { size, cap });
        }
        let size = size as usize;
        let mut coords = Vec::with_capacity(size * n);
        for i in 0..size {
            coords.extend_from_slice(point_from_index(field, n, i as u64).coords());
        }
        Ok(Space {
            field: field.clone(),
            n,
            size,
            coords,
        })
    }

    fn point(&self, i: u32) -> &[Elem] {
        let i = i as usize * self.n;
        &self.coords[i..i + self.n]
    }

    fn acute(&self, a: u32, b: u32, c: u32) -> bool {
        triple_acute_raw(&self.field, self.point(a), self.point(b), self.point(c))
    }

    fn to_set(&self, indices: &[u32]) -> PointSet {
        let mut sorted = indices.to_vec();
        sorted.sort_unstable();
        let pts = sorted
            .iter()
            .map(|&i| point_from_index(&self.field, self.n, i as u64))
            .collect();
        PointSet::new(self.field.clone(), self.n, pts).expect("indices are distinct")
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct ExactOptions {
    /// Maximum number of insertion attempts in this run.
    pub node_budget: u64,
    /// Restrict to sets containing the zero vector. Sound because Δ is
    /// translation invariant.
    pub fix_origin: bool,
    pub space_cap: u128,
}

impl Default for ExactOptions {
    fn default() -> Self {
        ExactOptions {
            node_budget: DEFAULT_NODE_BUDGET,
            fix_origin: true,
            space_cap: EXACT_SPACE_CAP,
        }
    }
}

/// Resumable state of an exact search.
///
/// The search splits into one branch per choice of the first free point
/// (the second point when the origin is fixed). A branch listed in
/// `completed_branches` was exhausted relative to an incumbent no larger than
/// `best_size`, so a resumed run skips it.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ExactCheckpoint {
    pub field: FieldInfo,
    pub n: usize,
    pub fix_origin: bool,
    pub best_size: usize,
    /// Canonical point indices of the incumbent.
    pub witness: Vec<u64>,
    pub completed_branches: Vec<u64>,
    pub nodes_explored: u64,
}

struct Shared<'a> {
    space: &'a Space,
    best: AtomicUsize,
    incumbent: Mutex<Vec<u32>>,
    nodes: AtomicU64,
    budget: u64,
    aborted: AtomicBool,
}

impl Shared<'_> {
    fn offer(&self, set: &[u32]) {
        if set.len() <= self.best.load(Ordering::Relaxed) {
            return;
        }
        let mut inc = self.incumbent.lock().expect("incumbent lock poisoned");
        if set.len() > inc.len() {
            *inc = set.to_vec();
            self.best.fetch_max(set.len(), Ordering::Relaxed);
        }
    }

    /// Claims one insertion attempt; false once the budget is spent.
    fn tick(&self) -> bool {
        if self.nodes.fetch_add(1, Ordering::Relaxed) >= self.budget {
            self.aborted.store(true, Ordering::Relaxed);
            return false;
        }
        true
    }

    /// Depth-first extension of `set` by candidates. Every candidate is
    /// already compatible with all pairs of `set`. Returns false on abort.
    fn extend(&self, set: &mut Vec<u32>, cands: &[u32]) -> bool {
        self.offer(set);
        for (i, &c) in cands.iter().enumerate() {
            if set.len() + cands.len() - i <= self.best.load(Ordering::Relaxed) {
                return true;
            }
            if !self.tick() {
                return false;
            }
            let next: Vec<u32> = cands[i + 1..]
                .iter()
                .copied()
                .filter(|&x| set.iter().all(|&s| self.space.acute(c, s, x)))
                .collect();
            set.push(c);
            let done = self.extend(set, &next);
            set.pop();
            if !done {
                return false;
            }
        }
        true
    }
}

/// Exact maximum acute set size in F_q^n, with the origin fixed.
pub fn max_acute_exact(field: &FieldSpec, n: usize, node_budget: u64) -> Result<SearchReport> {
    let opts = ExactOptions {
        node_budget,
        ..ExactOptions::default()
    };
    exact_search(field, n, &opts, None).map(|(r, _)| r)
}

/// Branch-and-bound over points in canonical order.
///
/// State is the current set `S` and the candidates `C`: later points forming
/// an acute triangle with every pair of `S`. A branch is cut when
/// `|S| + |C|` cannot beat the incumbent. First-level branches run in
/// parallel and share the incumbent size.
pub fn exact_search(
    field: &FieldSpec,
    n: usize,
    opts: &ExactOptions,
    resume: Option<&ExactCheckpoint>,
) -> Result<(SearchReport, ExactCheckpoint)> {
    let start = Instant::now();
    let space = Space::new(field, n, opts.space_cap)?;
    let size = space.size as u32;

    let mut incumbent: Vec<u32> = Vec::new();
    let mut completed: BTreeSet<u64> = BTreeSet::new();
    let mut prior_nodes = 0;
    if let Some(cp) = resume {
        if cp.field != field.info() || cp.n != n || cp.fix_origin != opts.fix_origin {
            return Err(Error::InvalidParameter(
                "checkpoint was written for a different search".into(),
            ));
        }
        if cp.witness.iter().any(|&i| i >= size as u64) || cp.witness.len() != cp.best_size {
            return Err(Error::InvalidParameter(
                "checkpoint witness is malformed".into(),
            ));
        }
        incumbent = cp.witness.iter().map(|&i| i as u32).collect();
        completed = cp.completed_branches.iter().copied().collect();
        prior_nodes = cp.nodes_explored;
    }

    let prefix: Vec<u32> = if opts.fix_origin { vec![0] } else { Vec::new() };
    if incumbent.len() < prefix.len() {
        incumbent = prefix.clone();
    }
    let first = prefix.len() as u32;
    let branches: Vec<u32> = (first..size).collect();

    let shared = Shared {
        space: &space,
        best: AtomicUsize::new(incumbent.len()),
        incumbent: Mutex::new(incumbent),
        nodes: AtomicU64::new(0),
        budget: opts.node_budget,
        aborted: AtomicBool::new(false),
    };

    let done = exec::map_collect(branches.len(), |bi| {
        let c = branches[bi];
        if completed.contains(&(c as u64)) {
            return true;
        }
        if shared.aborted.load(Ordering::Relaxed) {
            return false;
        }
        // at most c itself plus every later point
        if prefix.len() + (size - c) as usize <= shared.best.load(Ordering::Relaxed) {
            return true;
        }
        if !shared.tick() {
            return false;
        }
        let cands: Vec<u32> = (c + 1..size)
            .filter(|&x| prefix.iter().all(|&s| space.acute(c, s, x)))
            .collect();
        let mut set = prefix.clone();
        set.push(c);
        shared.extend(&mut set, &cands)
    });

    for (&c, &ok) in branches.iter().zip(&done) {
        if ok {
            completed.insert(c as u64);
        }
    }
    let exhaustive = done.iter().all(|&d| d);
    let new_nodes = shared.nodes.load(Ordering::Relaxed).min(opts.node_budget);
    let witness = shared
        .incumbent
        .into_inner()
        .expect("incumbent lock poisoned");
    let witness_set = space.to_set(&witness);
    assert!(
        set_is_acute(&witness_set).acute,
        "search produced a non-acute witness"
    );

    let checkpoint = ExactCheckpoint {
        field: field.info(),
        n,
        fix_origin: opts.fix_origin,
        best_size: witness.len(),
        witness: {
            let mut w: Vec<u64> = witness.iter().map(|&i| i as u64).collect();
            w.sort_unstable();
            w
        },
        completed_branches: completed.into_iter().collect(),
        nodes_explored: prior_nodes + new_nodes,
    };
    let report = SearchReport {
        field: field.info(),
        n,
        best_size: witness.len(),
        witness: PointSetDoc::from_set(&witness_set),
        exhaustive,
        nodes_explored: prior_nodes + new_nodes,
        config: SearchConfig {
            mode: SearchMode::Exact,
            node_budget: Some(opts.node_budget),
            fix_origin: Some(opts.fix_origin),
            seed: None,
            restarts: None,
        },
        timestamp: Timestamp::since(start),
    };
    Ok((report, checkpoint))
}

/// Best of `restarts` randomized greedy passes. Each pass visits all points
/// in a seeded random order and keeps a point when the set stays acute.
pub fn greedy_lower(field: &FieldSpec, n: usize, restarts: u64, seed: u64) -> Result<SearchReport> {
    if restarts == 0 {
        return Err(Error::InvalidParameter(
            "restarts must be at least 1".into(),
        ));
    }
    let start = Instant::now();
    let space = Space::new(field, n, GREEDY_SPACE_CAP)?;
    let runs = exec::map_collect(restarts as usize, |r| {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(r as u64);
        let mut order: Vec<u32> = (0..space.size as u32).collect();
        order.shuffle(&mut rng);
        let mut set: Vec<u32> = Vec::new();
        for c in order {
            let ok = set
                .iter()
                .enumerate()
                .all(|(i, &a)| set[i + 1..].iter().all(|&b| space.acute(c, a, b)));
            if ok {
                set.push(c);
            }
        }
        set
    });
    // largest set, earliest restart on ties
    let best = runs
        .iter()
        .enumerate()
        .max_by(|(i, a), (j, b)| a.len().cmp(&b.len()).then(j.cmp(i)))
        .map(|(_, s)| s.clone())
        .unwrap_or_default();
    let witness_set = space.to_set(&best);
    assert!(
        set_is_acute(&witness_set).acute,
        "greedy produced a non-acute witness"
    );
    Ok(SearchReport {
        field: field.info(),
        n,
        best_size: best.len(),
        witness: PointSetDoc::from_set(&witness_set),
        exhaustive: false,
        nodes_explored: restarts * space.size as u64,
        config: SearchConfig {
            mode: SearchMode::Greedy,
            node_budget: None,
            fix_origin: None,
            seed: Some(seed),
            restarts: Some(restarts),
        },
        timestamp: Timestamp::since(start),
    })
}

/// Largest `M` such that `1, 2, ..., M` are all quadratic residues mod `p`.
pub fn qr_run(p: u64) -> Result<u64> {
    let field = FieldSpec::with_options(p, 1, None, FieldOptions { table_threshold: 0 })?;
    let mut m = 0;
    while m + 1 < p && field.qr_class(Elem::from_code(m + 1)) == QRClass::Residue {
        m += 1;
    }
    Ok(m)
}

/// Odd primes in `[lo, hi]`.
pub fn odd_primes_in(lo: u64, hi: u64) -> Vec<u64> {
    if hi < 3 || lo > hi {
        return Vec::new();
    }
    let hi = hi as usize;
    let mut composite = vec![false; hi + 1];
    let mut out = Vec::new();
    for i in 2..=hi {
        if composite[i] {
            continue;
        }
        if i >= 3 && i as u64 >= lo {
            out.push(i as u64);
        }
        let mut j = i * i;
        while j <= hi {
            composite[j] = true;
            j += i;
        }
    }
    out
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct QrRunRow {
    pub p: u64,
    pub run_length: u64,
}

pub fn qr_run_table(p_min: u64, p_max: u64) -> Result<Vec<QrRunRow>> {
    if p_min > p_max {
        return Err(Error::InvalidParameter(format!(
            "empty prime range [{p_min}, {p_max}]"
        )));
    }
    let primes = odd_primes_in(p_min, p_max);
    let runs = exec::map_collect(primes.len(), |i| qr_run(primes[i]));
    primes
        .iter()
        .zip(runs)
        .map(|(&p, r)| r.map(|run_length| QrRunRow { p, run_length }))
        .collect()
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GridReport {
    pub p: u64,
    pub n: usize,
    pub m: u64,
    pub size: usize,
    pub acute: bool,
    pub violation: Option<[usize; 3]>,
    /// Range of `2 (u - v)·(u - w)` over pairwise distinct triples, in ℤ.
    pub delta_min: Option<i64>,
    pub delta_max: Option<i64>,
    pub negative_deltas: bool,
    pub p_mod_4: u64,
    /// Whether `-1` is a residue mod `p`, i.e. whether negative Δ values can
    /// still be residues.
    pub minus_one_residue: bool,
    pub set: PointSetDoc,
}

/// The grid `{1, ..., m}^n` in F_p^n with its acuteness verdict.
pub fn grid_construct(p: u64, n: usize, m: u64) -> Result<GridReport> {
    let field = FieldSpec::prime(p)?;
    if n == 0 || m == 0 {
        return Err(Error::InvalidParameter("n and m must be at least 1".into()));
    }
    let size = (m as u128).checked_pow(n as u32).unwrap_or(u128::MAX);
    if size > GRID_CAP {
        return Err(Error::SpaceTooLarge {
            size,
            cap: GRID_CAP,
        });
    }
    let size = size as usize;
    let ints: Vec<Vec<i64>> = (0..size)
        .map(|mut i| {
            let mut c = vec![0i64; n];
            for x in c.iter_mut().rev() {
                *x = (i as u64 % m) as i64 + 1;
                i /= m as usize;
            }
            c
        })
        .collect();
    let pts = ints
        .iter()
        .map(|c| crate::geometry::Point::new(c.iter().map(|&x| field.from_int(x)).collect()))
        .collect();
    let set = PointSet::new(field.clone(), n, pts)?;
    let check = set_is_acute(&set);

    let ranges = exec::map_collect(size, |i| {
        let mut lo: Option<i64> = None;
        let mut hi: Option<i64> = None;
        for j in 0..size {
            for k in 0..size {
                if i == j || i == k || j == k {
                    continue;
                }
                let d: i64 = 2
                    * (0..n)
                        .map(|t| (ints[i][t] - ints[j][t]) * (ints[i][t] - ints[k][t]))
                        .sum::<i64>();
                lo = Some(lo.map_or(d, |x| x.min(d)));
                hi = Some(hi.map_or(d, |x| x.max(d)));
            }
        }
        (lo, hi)
    });
    let delta_min = ranges.iter().filter_map(|r| r.0).min();
    let delta_max = ranges.iter().filter_map(|r| r.1).max();
    Ok(GridReport {
        p,
        n,
        m,
        size,
        acute: check.acute,
        violation: check.violation,
        delta_min,
        delta_max,
        negative_deltas: delta_min.is_some_and(|d| d < 0),
        p_mod_4: p % 4,
        minus_one_residue: field.qr_class(field.minus_one()) == QRClass::Residue,
        set: PointSetDoc::from_set(&set),
    })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BoundRow {
    pub q: u64,
    pub n: usize,
    pub best_size: usize,
    pub exhaustive: bool,
    /// `2 q^{4/3}`, rounded to 2 decimals.
    pub planar_bound: f64,
    /// `best_size^3 <= 8 q^4`, evaluated in integers; only for n = 2.
    pub planar_bound_holds: Option<bool>,
    /// `q^{(n+1)/2}`, rounded to 2 decimals.
    pub reference_curve: f64,
    pub reference_note: String,
}

fn round2(x: f64) -> f64 {
    (x * 100.0).round() / 100.0
}

pub const REFERENCE_NOTE: &str = "shape only - constant unspecified";

pub fn bound_table(reports: &[SearchReport]) -> Vec<BoundRow> {
    reports
        .iter()
        .map(|r| {
            let q = r.field.q;
            let b = r.best_size as u128;
            BoundRow {
                q,
                n: r.n,
                best_size: r.best_size,
                exhaustive: r.exhaustive,
                planar_bound: round2(2.0 * (q as f64).powf(4.0 / 3.0)),
                planar_bound_holds: (r.n == 2).then(|| b.pow(3) <= 8 * (q as u128).pow(4)),
                reference_curve: round2((q as f64).powf((r.n as f64 + 1.0) / 2.0)),
                reference_note: REFERENCE_NOTE.to_string(),
            }
        })
        .collect()
}
