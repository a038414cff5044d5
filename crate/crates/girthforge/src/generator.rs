//! Randomised construction: reserve selection, high-girth random greedy packing with
//! reserves, paired generation under a cogirth constraint, sparsified booster selection
//! and the end-to-end pipeline.
//!
//! Every stage draws from its own ChaCha stream derived from the configured seed, so a
//! run is reproducible stage by stage.

use std::collections::{BTreeSet, HashMap, HashSet};
use std::time::Instant;

use rand::seq::{index, SliceRandom};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::absorbers::{
    assemble_decomposition, brute_force_omni_absorber, matching_set_girth_of, realizable,
    AbsorberBudget, MatchingSetGirth, OmniAbsorber, MAX_TABLE_EDGES,
};
use crate::boosters::{embed_rooted_booster, RootedBooster, DEFAULT_ATTEMPTS};
use crate::configurations::{cogirth, erdos_configs_through, girth, GirthReport};
use crate::error::{invalid, Error, Result};
use crate::hypergraph::{
    admissible, binom, colex_rank, complete_host, Clique, Edge, Hypergraph, Packing,
};
use crate::search::{witness_through, Rule, Universe};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct GenConfig {
    pub seed: u64,
    /// Probability of keeping each edge in the reserve.
    pub p_reserve: f64,
    /// Configurations of every size up to `g` are forbidden.
    pub g: usize,
    /// Candidate boosters sampled per root.
    pub sample_m: usize,
    /// Retry limit for reserve selection and pipeline attempts.
    pub attempts: usize,
    pub budget_ms: u64,
    /// Consecutive rejections that end a sampling-mode phase.
    pub stall_threshold: usize,
    /// Above this many available cliques, candidates are sampled instead of enumerated.
    pub pool_limit: usize,
}

impl Default for GenConfig {
    fn default() -> Self {
        GenConfig {
            seed: 0,
            p_reserve: 0.2,
            g: 5,
            sample_m: 4,
            attempts: 8,
            budget_ms: 300_000,
            stall_threshold: 2000,
            pool_limit: 2_000_000,
        }
    }
}

impl GenConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.p_reserve > 0.0 && self.p_reserve <= 1.0) {
            return Err(Error::Precondition(format!(
                "p_reserve must lie in (0, 1], got {}",
                self.p_reserve
            )));
        }
        if self.g < 3 {
            return Err(Error::Precondition(format!(
                "g must be at least 3, got {}",
                self.g
            )));
        }
        if self.sample_m == 0 || self.attempts == 0 {
            return Err(Error::Precondition(
                "sample_m and attempts must be positive".into(),
            ));
        }
        Ok(())
    }
}

/// Independent generator for one stage of a seeded run.
pub fn stage_rng(seed: u64, stage: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stage);
    rng
}

const STAGE_RESERVE: u64 = 1;
const STAGE_GREEDY: u64 = 2;
const STAGE_PHASE2: u64 = 3;
const STAGE_PAIR: u64 = 4;
const STAGE_ATTEMPT: u64 = 100;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ReserveSample {
    pub edge: Edge,
    /// Cliques in X ∪ {e} through e.
    pub cliques: usize,
    /// p^(C(q,r)−1) · n^(q−r).
    pub target: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ReserveAudit {
    pub p: f64,
    pub n: usize,
    pub attempts_used: usize,
    pub min_degree_ratio: f64,
    pub max_degree: usize,
    pub max_degree_bound: f64,
    pub max_degree_ok: bool,
    pub reserve_edges: usize,
    pub samples: Vec<ReserveSample>,
    /// Smallest observed cliques/target ratio over the samples.
    pub min_clique_ratio: Option<f64>,
}

const RESERVE_SAMPLES: usize = 32;

/// Keeps each host edge independently with probability `p`, retrying until Δ(X) ≤ 2p·n.
pub fn reserve_select<R: Rng>(
    host: &Hypergraph,
    q: usize,
    p: f64,
    rng: &mut R,
    attempts: usize,
) -> Result<(BTreeSet<Edge>, ReserveAudit)> {
    if !(p > 0.0 && p <= 1.0) {
        return Err(Error::Precondition(format!(
            "reserve probability must lie in (0, 1], got {p}"
        )));
    }
    let (n, r) = (host.n(), host.r());
    if q <= r {
        return invalid(format!("clique size {q} must exceed uniformity {r}"));
    }
    let bound = 2.0 * p * n as f64;
    let min_degree_ratio = host.min_codegree() as f64 / n.max(1) as f64;
    for attempt in 1..=attempts.max(1) {
        let x: BTreeSet<Edge> = host
            .edges()
            .iter()
            .filter(|_| rng.gen_bool(p))
            .cloned()
            .collect();
        let xg = Hypergraph::from_edge_set(n, r, &x)?;
        let max_degree = xg.max_codegree(r - 1);
        if max_degree as f64 > bound {
            continue;
        }
        let outside: Vec<&Edge> = host.edges().iter().filter(|e| !x.contains(*e)).collect();
        let take = outside.len().min(RESERVE_SAMPLES);
        let target = p.powi(binom(q, r) as i32 - 1) * (n as f64).powi((q - r) as i32);
        let mut samples = Vec::with_capacity(take);
        for i in index::sample(rng, outside.len(), take).into_iter() {
            let e = outside[i].clone();
            let mut with = x.clone();
            with.insert(e.clone());
            let cliques = Hypergraph::from_edge_set(n, r, &with)?
                .cliques_containing(&e, q)?
                .len();
            samples.push(ReserveSample {
                edge: e,
                cliques,
                target,
            });
        }
        samples.sort_by(|a, b| a.edge.cmp(&b.edge));
        let min_clique_ratio = samples
            .iter()
            .map(|s| s.cliques as f64 / s.target)
            .min_by(|a, b| a.total_cmp(b));
        let audit = ReserveAudit {
            p,
            n,
            attempts_used: attempt,
            min_degree_ratio,
            max_degree,
            max_degree_bound: bound,
            max_degree_ok: true,
            reserve_edges: x.len(),
            samples,
            min_clique_ratio,
        };
        return Ok((x, audit));
    }
    Err(Error::RetryExhausted(format!(
        "no reserve with maximum degree at most {bound:.1} in {attempts} attempts"
    )))
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct GenReport {
    /// Covered share of host \ (avoid ∪ reserve).
    pub covered_fraction: f64,
    /// Host edges outside `avoid` left uncovered, reserve included.
    pub leave: Vec<Edge>,
    pub leave_size: usize,
    pub girth_verified: GirthReport,
    pub iterations: u64,
    pub accepted: usize,
    pub rejected_conflict: u64,
    pub phase2_added: usize,
    pub reserve_stats: Option<ReserveAudit>,
    pub wall_ms: u64,
    pub mode: String,
    pub notes: Vec<String>,
}

fn edge_rank(e: &[u32]) -> u64 {
    colex_rank(e)
}

fn clique_edge_ranks(c: &[u32], r: usize) -> Vec<u64> {
    let mut out = Vec::new();
    crate::hypergraph::for_each_combination(c.len(), r, |idx| {
        let sub: Vec<u32> = idx.iter().map(|&i| c[i]).collect();
        out.push(edge_rank(&sub));
    });
    out
}

/// One growing packing with its conflict index.
struct Side {
    r: usize,
    g: usize,
    universe: Universe,
    blocks: Vec<Clique>,
    used: HashSet<u64>,
}

impl Side {
    fn new(n: usize, q: usize, r: usize, g: usize) -> Self {
        Side {
            r,
            g,
            universe: Universe::new(n, q, r),
            blocks: Vec::new(),
            used: HashSet::new(),
        }
    }

    fn free(&self, ranks: &[u64]) -> bool {
        ranks.iter().all(|e| !self.used.contains(e))
    }

    /// Pushes `c` if it closes no configuration of size <= g; the edges must be free.
    fn try_push(&mut self, c: &Clique) -> bool {
        let id = self.universe.push(c.as_slice());
        let rule = Rule::girth(self.universe.q(), self.r);
        if witness_through(&self.universe, rule, &[], &[id], self.g).is_some() {
            self.universe.pop();
            return false;
        }
        true
    }

    fn commit(&mut self, c: Clique, ranks: &[u64]) {
        self.used.extend(ranks.iter().copied());
        self.blocks.push(c);
    }
}

fn elapsed_ms(start: &Instant) -> u64 {
    start.elapsed().as_millis() as u64
}

/// Uniform random q-subset of `0..n`, sorted.
fn random_clique<R: Rng>(n: usize, q: usize, rng: &mut R) -> Clique {
    let mut v: Vec<u32> = index::sample(rng, n, q)
        .into_iter()
        .map(|i| i as u32)
        .collect();
    v.sort_unstable();
    Clique::from_sorted(v)
}

/// Random greedy packing of host \ (avoid ∪ reserve) with no configuration of size <= g,
/// followed by a reserve phase that covers leftover edges with cliques whose other edges
/// are all reserve edges.
pub fn greedy_high_girth(
    host: &Hypergraph,
    q: usize,
    g: usize,
    avoid: &BTreeSet<Edge>,
    reserve: &BTreeSet<Edge>,
    cfg: &GenConfig,
) -> Result<(Packing, GenReport)> {
    let start = Instant::now();
    let r = host.r();
    if q <= r {
        return invalid(format!("clique size {q} must exceed uniformity {r}"));
    }
    if g < 3 {
        return Err(Error::Precondition(format!(
            "g must be at least 3, got {g}"
        )));
    }
    if let Some(e) = avoid.intersection(reserve).next() {
        return Err(Error::Precondition(format!(
            "{:?} is both avoided and reserved",
            e.as_slice()
        )));
    }
    let n = host.n();
    let host_ranks: HashSet<u64> = host.edges().iter().map(|e| e.colex_rank()).collect();
    let reserve_ranks: HashSet<u64> = reserve.iter().map(|e| e.colex_rank()).collect();
    let allowed: BTreeSet<Edge> = host
        .edge_set()
        .into_iter()
        .filter(|e| !avoid.contains(e) && !reserve.contains(e))
        .collect();
    let allowed_ranks: HashSet<u64> = allowed.iter().map(|e| e.colex_rank()).collect();

    let mut side = Side::new(n, q, r, g);
    let mut notes = Vec::new();
    let mut iterations = 0u64;
    let mut rejected = 0u64;
    let mut rng = stage_rng(cfg.seed, STAGE_GREEDY);

    let pool_size = estimate_pool(&allowed, n, q, r);
    let mode = if pool_size <= cfg.pool_limit as u64 {
        "pool"
    } else {
        "sampling"
    };
    if mode == "pool" {
        let sub = Hypergraph::from_edge_set(n, r, &allowed)?;
        let mut pool = sub.all_cliques(q);
        pool.shuffle(&mut rng);
        for c in pool {
            iterations += 1;
            if iterations.is_multiple_of(4096) && elapsed_ms(&start) > cfg.budget_ms {
                notes.push(format!("time budget reached after {iterations} candidates"));
                break;
            }
            let ranks = clique_edge_ranks(c.as_slice(), r);
            if !side.free(&ranks) {
                continue;
            }
            if side.try_push(&c) {
                side.commit(c, &ranks);
            } else {
                rejected += 1;
            }
        }
    } else {
        let mut stall = 0usize;
        while stall < cfg.stall_threshold {
            iterations += 1;
            if iterations.is_multiple_of(4096) && elapsed_ms(&start) > cfg.budget_ms {
                notes.push(format!("time budget reached after {iterations} candidates"));
                break;
            }
            let c = random_clique(n, q, &mut rng);
            let ranks = clique_edge_ranks(c.as_slice(), r);
            if !ranks.iter().all(|e| allowed_ranks.contains(e)) || !side.free(&ranks) {
                stall += 1;
                continue;
            }
            if side.try_push(&c) {
                side.commit(c, &ranks);
                stall = 0;
            } else {
                rejected += 1;
                stall += 1;
            }
        }
    }

    let mut phase2_added = 0;
    if !reserve.is_empty() {
        let mut rng2 = stage_rng(cfg.seed, STAGE_PHASE2);
        let full = Hypergraph::from_edge_set(n, r, &host.edge_set())?;
        for e in &allowed {
            if side.used.contains(&e.colex_rank()) {
                continue;
            }
            let mut options: Vec<Clique> = full
                .cliques_containing(e, q)?
                .into_iter()
                .filter(|c| {
                    c.subsets(r)
                        .iter()
                        .all(|f| f == e || reserve_ranks.contains(&f.colex_rank()))
                })
                .collect();
            options.shuffle(&mut rng2);
            for c in options {
                iterations += 1;
                let ranks = clique_edge_ranks(c.as_slice(), r);
                if !side.free(&ranks) {
                    continue;
                }
                let outside = ranks.iter().filter(|x| !reserve_ranks.contains(x)).count();
                assert_eq!(
                    outside, 1,
                    "reserve-phase cliques have exactly one non-reserve edge"
                );
                if side.try_push(&c) {
                    side.commit(c, &ranks);
                    phase2_added += 1;
                    break;
                }
                rejected += 1;
            }
        }
    }

    let accepted = side.blocks.len();
    let blocks = side.blocks;
    let packing = Packing::new(host.clone(), q, blocks)?;
    let covered = packing.covered_edges();
    if let Some(e) = covered.iter().find(|e| avoid.contains(*e)) {
        return Err(Error::Verification(format!(
            "packing uses avoided edge {:?}",
            e.as_slice()
        )));
    }
    debug_assert!(covered.iter().all(|e| host_ranks.contains(&e.colex_rank())));
    let girth_verified = girth(&packing, g)?;
    if !girth_verified.value.exceeds(g) {
        return Err(Error::Verification(format!(
            "greedy output has girth {:?}, not above {g}",
            girth_verified.value
        )));
    }
    let covered_allowed = allowed.iter().filter(|e| covered.contains(*e)).count();
    let covered_fraction = if allowed.is_empty() {
        1.0
    } else {
        covered_allowed as f64 / allowed.len() as f64
    };
    let leave: Vec<Edge> = host
        .edges()
        .iter()
        .filter(|e| !avoid.contains(*e) && !covered.contains(*e))
        .cloned()
        .collect();
    let report = GenReport {
        covered_fraction,
        leave_size: leave.len(),
        leave,
        girth_verified,
        iterations,
        accepted,
        rejected_conflict: rejected,
        phase2_added,
        reserve_stats: None,
        wall_ms: elapsed_ms(&start),
        mode: mode.into(),
        notes,
    };
    Ok((packing, report))
}

/// Upper estimate of the number of q-cliques on the allowed edges.
fn estimate_pool(allowed: &BTreeSet<Edge>, n: usize, q: usize, r: usize) -> u64 {
    let full = binom(n, r).max(1);
    let density = allowed.len() as f64 / full as f64;
    (binom(n, q) as f64 * density.powi(binom(q, r) as i32).max(density)) as u64
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct PairReport {
    pub covered_fraction: [f64; 2],
    pub girth: [GirthReport; 2],
    pub cogirth: GirthReport,
    pub iterations: u64,
    pub accepted: [usize; 2],
    pub rejected_conflict: u64,
    pub wall_ms: u64,
    pub mode: String,
    pub notes: Vec<String>,
}

/// Two random greedy packings grown in alternation. Each keeps its own girth above g,
/// and their union has no (k(q−r)+r−1, k)-configuration with k <= g.
pub fn generate_pair_cogirth(
    host: &Hypergraph,
    q: usize,
    g: usize,
    cfg: &GenConfig,
) -> Result<(Packing, Packing, PairReport)> {
    let start = Instant::now();
    let r = host.r();
    if q <= r {
        return invalid(format!("clique size {q} must exceed uniformity {r}"));
    }
    if g < 3 {
        return Err(Error::Precondition(format!(
            "g must be at least 3, got {g}"
        )));
    }
    let n = host.n();
    let mut sides = [Side::new(n, q, r, g), Side::new(n, q, r, g)];
    let mut joint = Universe::new(n, q, r);
    let cogirth_rule = Rule::cogirth(q, r);
    let mut iterations = 0u64;
    let mut rejected = 0u64;
    let mut notes = Vec::new();

    let attempt = |side: &mut Side,
                   joint: &mut Universe,
                   c: &Clique,
                   ranks: &[u64],
                   rejected: &mut u64|
     -> bool {
        if !side.try_push(c) {
            *rejected += 1;
            return false;
        }
        let id = joint.push(c.as_slice());
        if witness_through(joint, cogirth_rule, &[], &[id], g).is_some() {
            joint.pop();
            side.universe.pop();
            *rejected += 1;
            return false;
        }
        side.commit(c.clone(), ranks);
        true
    };

    let host_ranks: HashSet<u64> = host.edges().iter().map(|e| e.colex_rank()).collect();
    let pool_size = estimate_pool(&host.edge_set(), n, q, r);
    let mode = if pool_size <= cfg.pool_limit as u64 {
        "pool"
    } else {
        "sampling"
    };
    if mode == "pool" {
        let all = host.all_cliques(q);
        let mut orders = [all.clone(), all];
        for (k, order) in orders.iter_mut().enumerate() {
            order.shuffle(&mut stage_rng(cfg.seed, STAGE_PAIR + k as u64));
        }
        let mut pos = [0usize, 0usize];
        'outer: loop {
            let mut progressed = false;
            for k in 0..2 {
                while pos[k] < orders[k].len() {
                    let c = &orders[k][pos[k]];
                    pos[k] += 1;
                    iterations += 1;
                    if iterations.is_multiple_of(4096) && elapsed_ms(&start) > cfg.budget_ms {
                        notes.push(format!("time budget reached after {iterations} candidates"));
                        break 'outer;
                    }
                    let ranks = clique_edge_ranks(c.as_slice(), r);
                    if !sides[k].free(&ranks) {
                        continue;
                    }
                    progressed = true;
                    if attempt(&mut sides[k], &mut joint, c, &ranks, &mut rejected) {
                        break;
                    }
                }
            }
            if !progressed {
                break;
            }
        }
    } else {
        let mut rng = stage_rng(cfg.seed, STAGE_PAIR);
        let mut stall = [0usize; 2];
        while stall.iter().any(|&s| s < cfg.stall_threshold) {
            for k in 0..2 {
                if stall[k] >= cfg.stall_threshold {
                    continue;
                }
                iterations += 1;
                let c = random_clique(n, q, &mut rng);
                let ranks = clique_edge_ranks(c.as_slice(), r);
                if !ranks.iter().all(|e| host_ranks.contains(e)) || !sides[k].free(&ranks) {
                    stall[k] += 1;
                    continue;
                }
                if attempt(&mut sides[k], &mut joint, &c, &ranks, &mut rejected) {
                    stall[k] = 0;
                } else {
                    stall[k] += 1;
                }
            }
            if elapsed_ms(&start) > cfg.budget_ms {
                notes.push(format!("time budget reached after {iterations} candidates"));
                break;
            }
        }
    }

    let [a, b] = sides;
    let accepted = [a.blocks.len(), b.blocks.len()];
    let s1 = Packing::new(host.clone(), q, a.blocks)?;
    let s2 = Packing::new(host.clone(), q, b.blocks)?;
    let g1 = girth(&s1, g)?;
    let g2 = girth(&s2, g)?;
    let co = cogirth(&s1, &s2, g)?;
    for (what, rep) in [
        ("first girth", &g1),
        ("second girth", &g2),
        ("cogirth", &co),
    ] {
        if !rep.value.exceeds(g) {
            return Err(Error::Verification(format!(
                "{what} is {:?}, not above {g}",
                rep.value
            )));
        }
    }
    let total = host.e().max(1) as f64;
    let report = PairReport {
        covered_fraction: [
            s1.covered_edges().len() as f64 / total,
            s2.covered_edges().len() as f64 / total,
        ],
        girth: [g1, g2],
        cogirth: co,
        iterations,
        accepted,
        rejected_conflict: rejected,
        wall_ms: elapsed_ms(&start),
        mode: mode.into(),
        notes,
    };
    Ok((s1, s2, report))
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct OmniBoosterPick {
    /// The chosen booster per root, in root order.
    pub boosters: Vec<RootedBooster>,
    pub chosen: Vec<usize>,
    pub sampled: Vec<usize>,
    pub disjoint: Vec<usize>,
    pub high_girth: Vec<usize>,
    pub collective: MatchingSetGirth,
}

/// Samples `m` embeddings of `template` per root, keeps those edge-disjoint from every
/// other root's samples and touching no realizable configuration of size <= g, and picks
/// the first survivor per root.
pub fn sparsify_and_pick<R: Rng>(
    roots: &[Clique],
    template: &RootedBooster,
    host: &Hypergraph,
    forbidden: &HashSet<Edge>,
    m: usize,
    g: usize,
    rng: &mut R,
) -> Result<OmniBoosterPick> {
    if m == 0 {
        return Err(Error::Precondition(
            "at least one sample per root is required".into(),
        ));
    }
    let (q, r) = (template.q(), template.r());
    let mut samples: Vec<Vec<RootedBooster>> = Vec::with_capacity(roots.len());
    for root in roots {
        let mut list = Vec::with_capacity(m);
        for _ in 0..m {
            match embed_rooted_booster(template, root, host, forbidden, DEFAULT_ATTEMPTS, rng) {
                Ok(b) => list.push(b),
                Err(Error::BudgetExhausted(_)) => {}
                Err(e) => return Err(e),
            }
        }
        if list.is_empty() {
            return Err(Error::BudgetExhausted(format!(
                "root {:?}: no embedding of the template fits the host",
                root.as_slice()
            )));
        }
        samples.push(list);
    }

    let mut owners: HashMap<&Edge, BTreeSet<usize>> = HashMap::new();
    for (h, list) in samples.iter().enumerate() {
        for b in list {
            for e in b.edges() {
                owners.entry(e).or_default().insert(h);
            }
        }
    }
    let disjoint: Vec<Vec<bool>> = samples
        .iter()
        .enumerate()
        .map(|(h, list)| {
            list.iter()
                .map(|b| b.edges().iter().all(|e| owners[e].iter().all(|&o| o == h)))
                .collect()
        })
        .collect();

    // Options per root are (sample index, side) flattened to 2j + side.
    let mut holders: HashMap<Clique, Vec<(usize, usize)>> = HashMap::new();
    for (h, list) in samples.iter().enumerate() {
        for (j, b) in list.iter().enumerate() {
            for (side, cl) in [b.on(), b.off()].into_iter().enumerate() {
                for c in cl {
                    holders
                        .entry(c.clone())
                        .or_default()
                        .push((h, 2 * j + side));
                }
            }
        }
    }
    let options = |h: usize, o: usize| -> Vec<Clique> {
        let b = &samples[h][o / 2];
        if o.is_multiple_of(2) { b.on() } else { b.off() }.to_vec()
    };
    let mut universe: Vec<Clique> = holders.keys().cloned().collect();
    universe.sort();
    let mut tainted: HashSet<(usize, usize)> = HashSet::new();
    for s in 3..=g {
        for f in erdos_configs_through(&universe, &[], s, q, r)? {
            if realizable(&f.cliques, &holders, &options, r) {
                for c in &f.cliques {
                    for &(h, o) in &holders[c] {
                        tainted.insert((h, o / 2));
                    }
                }
            }
        }
    }

    let mut chosen = Vec::with_capacity(roots.len());
    let mut counts_disjoint = Vec::new();
    let mut counts_high = Vec::new();
    for (h, list) in samples.iter().enumerate() {
        let high: Vec<bool> = (0..list.len())
            .map(|j| !tainted.contains(&(h, j)))
            .collect();
        counts_disjoint.push(disjoint[h].iter().filter(|&&d| d).count());
        counts_high.push(high.iter().filter(|&&x| x).count());
        match (0..list.len()).find(|&j| disjoint[h][j] && high[j]) {
            Some(j) => chosen.push(j),
            None => {
                return Err(Error::BudgetExhausted(format!(
                "root {:?}: none of {} sampled boosters is both disjoint and high-girth; raise m",
                roots[h].as_slice(),
                list.len()
            )))
            }
        }
    }
    let boosters: Vec<RootedBooster> = chosen
        .iter()
        .enumerate()
        .map(|(h, &j)| samples[h][j].clone())
        .collect();
    let sides: Vec<[Vec<Clique>; 2]> = boosters
        .iter()
        .map(|b| [b.on().to_vec(), b.off().to_vec()])
        .collect();
    let collective = matching_set_girth_of(&sides, q, r, g)?;
    if !collective.report.value.exceeds(g) {
        return Err(Error::Verification(format!(
            "picked boosters have collective girth {:?}, not above {g}",
            collective.report.value
        )));
    }
    Ok(OmniBoosterPick {
        boosters,
        chosen,
        sampled: samples.iter().map(|l| l.len()).collect(),
        disjoint: counts_disjoint,
        high_girth: counts_high,
        collective,
    })
}

const REPAIR_NODES: u64 = 200_000;

/// Depth-first extension of `start` by cliques of uncovered edges until every edge outside
/// X and A is covered, the uncovered part of X has an absorber decomposition, and the
/// whole has no configuration of size <= g. `None` when the node budget runs out first.
fn close_leave(
    host: &Hypergraph,
    start: &[Clique],
    ab: &OmniAbsorber,
    g: usize,
    budget: u64,
) -> Result<Option<Vec<Clique>>> {
    let (q, r, n) = (ab.q(), ab.r(), host.n());
    let x: HashSet<&Edge> = ab.x().iter().collect();
    let mut free: HashSet<Edge> = host
        .edges()
        .iter()
        .filter(|e| !ab.a().contains(*e))
        .cloned()
        .collect();
    for c in start {
        for e in c.subsets(r) {
            free.remove(&e);
        }
    }
    let mut universe = Universe::from_cliques(n, q, r, start);
    let mut blocks = start.to_vec();

    struct Ctx<'a> {
        q: usize,
        r: usize,
        n: usize,
        g: usize,
        ab: &'a OmniAbsorber,
        x: &'a HashSet<&'a Edge>,
        nodes: u64,
        budget: u64,
    }

    fn go(
        ctx: &mut Ctx,
        free: &mut HashSet<Edge>,
        universe: &mut Universe,
        blocks: &mut Vec<Clique>,
    ) -> Result<bool> {
        ctx.nodes += 1;
        if ctx.nodes > ctx.budget {
            return Ok(false);
        }
        let Some(e) = free.iter().filter(|e| !ctx.x.contains(*e)).min().cloned() else {
            let leave: Vec<Edge> = free.iter().cloned().collect();
            let Ok(mask) = ctx.ab.mask_of(&leave) else {
                return Ok(false);
            };
            let Some(extra) = ctx.ab.decomposition(mask) else {
                return Ok(false);
            };
            let all: Vec<Clique> = blocks.iter().chain(extra.iter()).cloned().collect();
            return Ok(crate::configurations::girth_of(&all, ctx.q, ctx.r, ctx.g)?
                .value
                .exceeds(ctx.g));
        };
        let others: Vec<u32> = (0..ctx.n as u32).filter(|v| !e.contains(*v)).collect();
        let mut options = Vec::new();
        crate::hypergraph::for_each_combination(others.len(), ctx.q - ctx.r, |idx| {
            let mut c = e.clone();
            for &i in idx {
                c = c.with(others[i]);
            }
            if c.subsets(ctx.r).iter().all(|f| free.contains(f)) {
                options.push(c);
            }
        });
        for c in options {
            let id = universe.push(c.as_slice());
            if witness_through(universe, Rule::girth(ctx.q, ctx.r), &[], &[id], ctx.g).is_none() {
                let edges = c.subsets(ctx.r);
                for f in &edges {
                    free.remove(f);
                }
                blocks.push(c);
                if go(ctx, free, universe, blocks)? {
                    return Ok(true);
                }
                let c = blocks.pop().expect("pushed above");
                free.extend(c.subsets(ctx.r));
            }
            universe.pop();
            if ctx.nodes > ctx.budget {
                break;
            }
        }
        Ok(false)
    }

    let mut ctx = Ctx {
        q,
        r,
        n,
        g,
        ab,
        x: &x,
        nodes: 0,
        budget,
    };
    Ok(go(&mut ctx, &mut free, &mut universe, &mut blocks)?.then_some(blocks))
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct AttemptLog {
    pub attempt: usize,
    pub seed: u64,
    pub reserve_edges: usize,
    pub absorber_edges: Option<usize>,
    pub covered_fraction: Option<f64>,
    pub outcome: String,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct PipelineReport {
    pub n: usize,
    pub q: usize,
    pub r: usize,
    pub g: usize,
    pub requested_complete: bool,
    pub complete: bool,
    pub mode: String,
    pub attempts: Vec<AttemptLog>,
    pub generator: GenReport,
    pub girth_verified: GirthReport,
    pub absorber: Option<OmniAbsorber>,
    pub notes: Vec<String>,
}

/// Reserve, absorber, greedy packing with reserves, and assembly. Complete mode retries
/// with fresh sub-seeds and downgrades to the best partial packing when every attempt fails.
pub fn pipeline_generate(
    n: usize,
    q: usize,
    r: usize,
    g: usize,
    complete: bool,
    cfg: &GenConfig,
) -> Result<(Packing, PipelineReport)> {
    cfg.validate()?;
    if g < 3 {
        return Err(Error::Precondition(format!(
            "g must be at least 3, got {g}"
        )));
    }
    if complete && !admissible(n, q, r)? {
        return Err(Error::NotAdmissible { n, q, r });
    }
    let start = Instant::now();
    let host = complete_host(n, r)?;
    let mut attempts = Vec::new();
    let mut notes = Vec::new();
    let mut best: Option<(Packing, GenReport, Option<OmniAbsorber>)> = None;

    let runs = if complete { cfg.attempts } else { 1 };
    for k in 0..runs {
        let seed = if k == 0 {
            cfg.seed
        } else {
            stage_rng(cfg.seed, STAGE_ATTEMPT + k as u64).gen()
        };
        let sub = GenConfig {
            seed,
            ..cfg.clone()
        };
        let mut rng = stage_rng(seed, STAGE_RESERVE);
        let (x, audit) = reserve_select(&host, q, cfg.p_reserve, &mut rng, cfg.attempts)?;
        let mut log = AttemptLog {
            attempt: k,
            seed,
            reserve_edges: x.len(),
            absorber_edges: None,
            covered_fraction: None,
            outcome: String::new(),
        };
        let absorber = if complete {
            if x.len() > MAX_TABLE_EDGES {
                log.outcome = format!(
                    "reserve of {} edges is too large for an exhaustive absorber",
                    x.len()
                );
                attempts.push(log);
                continue;
            }
            let xs: Vec<Edge> = x.iter().cloned().collect();
            let left = cfg.budget_ms.saturating_sub(elapsed_ms(&start)) / (runs - k) as u64;
            let budget = AbsorberBudget {
                time_ms: left.min(AbsorberBudget::default().time_ms),
                ..AbsorberBudget::default()
            };
            match brute_force_omni_absorber(&host, &xs, q, budget) {
                Ok(a) => Some(a),
                Err(e) => {
                    log.outcome = format!("absorber search failed: {e}");
                    attempts.push(log);
                    continue;
                }
            }
        } else {
            None
        };
        let avoid: BTreeSet<Edge> = absorber
            .iter()
            .flat_map(|a| a.a().iter().cloned())
            .collect();
        log.absorber_edges = absorber.as_ref().map(|a| a.a().len());
        let (mut m, mut report) = greedy_high_girth(&host, q, g, &avoid, &x, &sub)?;
        report.reserve_stats = Some(audit);
        log.covered_fraction = Some(report.covered_fraction);
        if let Some(ab) = &absorber {
            let repaired = match close_leave(&host, m.blocks(), ab, g, REPAIR_NODES)? {
                Some(blocks) => Some(blocks),
                None => close_leave(&host, &[], ab, g, REPAIR_NODES)?.inspect(|_| {
                    notes.push(format!("attempt {k}: greedy packing discarded, leave closed by search from scratch"));
                }),
            };
            if let Some(blocks) = repaired {
                m = Packing::new(host.clone(), q, blocks)?;
            }
            match assemble_decomposition(&m, ab, &host, Some(g)) {
                Ok(full) => {
                    log.outcome = "complete".into();
                    attempts.push(log);
                    let girth_verified = girth(&full, g)?;
                    let report = PipelineReport {
                        n,
                        q,
                        r,
                        g,
                        requested_complete: true,
                        complete: true,
                        mode: "complete".into(),
                        attempts,
                        generator: report,
                        girth_verified,
                        absorber: absorber.clone(),
                        notes,
                    };
                    return Ok((full, report));
                }
                Err(e) => log.outcome = format!("assembly failed: {e}"),
            }
        } else {
            log.outcome = "partial".into();
        }
        attempts.push(log);
        let better = best
            .as_ref()
            .is_none_or(|(_, b, _)| report.covered_fraction > b.covered_fraction);
        if better {
            best = Some((m, report, absorber));
        }
    }
    if complete {
        notes.push(format!(
            "no attempt completed in {runs} tries; returning the best partial packing"
        ));
    }
    let (m, report, absorber) = match best {
        Some(b) => b,
        None => {
            notes.push("no attempt reached the greedy stage; running it without reserve".into());
            let (m, report) =
                greedy_high_girth(&host, q, g, &BTreeSet::new(), &BTreeSet::new(), cfg)?;
            (m, report, None)
        }
    };
    let girth_verified = girth(&m, g)?;
    Ok((
        m,
        PipelineReport {
            n,
            q,
            r,
            g,
            requested_complete: complete,
            complete: false,
            mode: "partial".into(),
            attempts,
            generator: report,
            girth_verified,
            absorber,
            notes,
        },
    ))
}
