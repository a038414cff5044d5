//! Omni-absorbers: a fixed edge set A together with, for every divisible L ⊆ X, a
//! decomposition of L ∪ A drawn from a shared clique family.

use std::collections::{BTreeMap, BTreeSet, HashMap, HashSet};
use std::time::Instant;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::boosters::RootedBooster;
use crate::configurations::{erdos_configs_through, girth, girth_of, GirthReport, GirthValue};
use crate::error::{invalid, Error, Result};
use crate::hypergraph::{binom, check_matching, Clique, Edge, Hypergraph, Packing, VertexSet};

/// Largest reserve handled by exhaustive table construction.
pub const MAX_TABLE_EDGES: usize = 20;
/// Largest family handled by exact matching-set enumeration.
pub const MAX_EXACT_FAMILY: usize = 20;

/// On and off clique indices contributed by the booster of one base family member.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct BoostSlot {
    pub root: Clique,
    pub on: Vec<usize>,
    pub off: Vec<usize>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "AbsorberRepr", into = "AbsorberRepr")]
pub struct OmniAbsorber {
    q: usize,
    r: usize,
    x: Vec<Edge>,
    a: Vec<Edge>,
    family: Vec<Clique>,
    table: BTreeMap<u32, Vec<usize>>,
    slots: Vec<BoostSlot>,
}

#[derive(Clone, Serialize, Deserialize)]
struct AbsorberRepr {
    q: usize,
    r: usize,
    #[serde(rename = "X")]
    x: Vec<Edge>,
    #[serde(rename = "A")]
    a: Vec<Edge>,
    family: Vec<Clique>,
    table: BTreeMap<String, Vec<usize>>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    boosters: Vec<BoostSlot>,
}

impl TryFrom<AbsorberRepr> for OmniAbsorber {
    type Error = Error;

    fn try_from(r: AbsorberRepr) -> Result<Self> {
        let mut table = BTreeMap::new();
        for (k, v) in r.table {
            let mask: u32 = k
                .parse()
                .map_err(|_| Error::InvalidInput(format!("table key {k:?} is not a bitmask")))?;
            table.insert(mask, v);
        }
        let ab = OmniAbsorber {
            q: r.q,
            r: r.r,
            x: r.x,
            a: r.a,
            family: r.family,
            table,
            slots: r.boosters,
        };
        ab.validate()?;
        Ok(ab)
    }
}

impl From<OmniAbsorber> for AbsorberRepr {
    fn from(a: OmniAbsorber) -> Self {
        AbsorberRepr {
            q: a.q,
            r: a.r,
            x: a.x,
            a: a.a,
            family: a.family,
            table: a
                .table
                .into_iter()
                .map(|(k, v)| (k.to_string(), v))
                .collect(),
            boosters: a.slots,
        }
    }
}

fn vertex_bound<'a>(sets: impl IntoIterator<Item = &'a VertexSet>) -> usize {
    sets.into_iter()
        .filter_map(|s| s.max_vertex())
        .max()
        .map_or(0, |m| m as usize + 1)
}

fn is_divisible_edges(edges: &[Edge], n: usize, r: usize, q: usize) -> Result<bool> {
    Hypergraph::new(n, r, edges.to_vec())?.is_divisible(q)
}

fn edges_of(cliques: &[&Clique], r: usize) -> Vec<Edge> {
    let mut out: Vec<Edge> = cliques.iter().flat_map(|c| c.subsets(r)).collect();
    out.sort();
    out
}

impl OmniAbsorber {
    pub fn new(
        q: usize,
        r: usize,
        mut x: Vec<Edge>,
        mut a: Vec<Edge>,
        family: Vec<Clique>,
        table: BTreeMap<u32, Vec<usize>>,
    ) -> Result<Self> {
        x.sort();
        a.sort();
        let ab = OmniAbsorber {
            q,
            r,
            x,
            a,
            family,
            table,
            slots: Vec::new(),
        };
        ab.validate()?;
        Ok(ab)
    }

    pub fn q(&self) -> usize {
        self.q
    }

    pub fn r(&self) -> usize {
        self.r
    }

    pub fn x(&self) -> &[Edge] {
        &self.x
    }

    pub fn a(&self) -> &[Edge] {
        &self.a
    }

    pub fn family(&self) -> &[Clique] {
        &self.family
    }

    /// Keys are bitmasks over `x()` in order.
    pub fn table(&self) -> &BTreeMap<u32, Vec<usize>> {
        &self.table
    }

    pub fn slots(&self) -> &[BoostSlot] {
        &self.slots
    }

    pub fn mask_of(&self, l: &[Edge]) -> Result<u32> {
        let mut mask = 0u32;
        for e in l {
            match self.x.binary_search(e) {
                Ok(i) => mask |= 1 << i,
                Err(_) => return invalid(format!("{:?} is not in X", e.as_slice())),
            }
        }
        Ok(mask)
    }

    pub fn edges_of_mask(&self, mask: u32) -> Vec<Edge> {
        (0..self.x.len())
            .filter(|i| mask >> i & 1 == 1)
            .map(|i| self.x[i].clone())
            .collect()
    }

    /// The decomposition of L ∪ A, if L has an entry.
    pub fn decomposition(&self, mask: u32) -> Option<Vec<Clique>> {
        self.table
            .get(&mask)
            .map(|ids| ids.iter().map(|&i| self.family[i].clone()).collect())
    }

    /// Every divisible L ⊆ X, as bitmasks.
    pub fn divisible_masks(&self) -> Result<Vec<u32>> {
        divisible_masks(&self.x, self.q, self.r)
    }

    /// Most family members sharing a single edge of X ∪ A.
    pub fn refinement(&self) -> usize {
        let mut counts: HashMap<Edge, usize> = HashMap::new();
        for c in &self.family {
            for e in c.subsets(self.r) {
                *counts.entry(e).or_default() += 1;
            }
        }
        self.x
            .iter()
            .chain(&self.a)
            .map(|e| counts.get(e).copied().unwrap_or(0))
            .max()
            .unwrap_or(0)
    }

    /// Full re-verification of the omni-absorber property.
    pub fn validate(&self) -> Result<()> {
        let (q, r) = (self.q, self.r);
        if r == 0 || q <= r {
            return invalid(format!("need q > r >= 1, got q={q}, r={r}"));
        }
        if self.x.len() > MAX_TABLE_EDGES {
            return invalid(format!(
                "X has {} edges; tables hold at most {MAX_TABLE_EDGES}",
                self.x.len()
            ));
        }
        for (what, list) in [("X", &self.x), ("A", &self.a)] {
            if list.iter().any(|e| e.len() != r) {
                return invalid(format!("{what} holds a set that is not an r-edge"));
            }
            if list.windows(2).any(|w| w[0] >= w[1]) {
                return invalid(format!("{what} must be sorted without repeats"));
            }
        }
        if let Some(e) = self.x.iter().find(|e| self.a.binary_search(e).is_ok()) {
            return invalid(format!("{:?} lies in both X and A", e.as_slice()));
        }
        for c in &self.family {
            if c.len() != q {
                return invalid(format!(
                    "family clique {:?} does not have {q} vertices",
                    c.as_slice()
                ));
            }
            let in_x = c
                .subsets(r)
                .iter()
                .filter(|e| self.x.binary_search(e).is_ok())
                .count();
            if in_x > 1 {
                return invalid(format!(
                    "family clique {:?} meets X in {in_x} edges",
                    c.as_slice()
                ));
            }
        }
        for mask in self.divisible_masks()? {
            let Some(ids) = self.table.get(&mask) else {
                return Err(Error::Verification(format!(
                    "no table entry for divisible L = {mask}"
                )));
            };
            if ids.iter().any(|&i| i >= self.family.len()) {
                return invalid(format!("table entry {mask} names a missing family member"));
            }
            let cliques: Vec<&Clique> = ids.iter().map(|&i| &self.family[i]).collect();
            let mut want: Vec<Edge> = self.edges_of_mask(mask);
            want.extend(self.a.iter().cloned());
            want.sort();
            if edges_of(&cliques, r) != want {
                return Err(Error::Verification(format!(
                    "table entry {mask} does not decompose L ∪ A"
                )));
            }
        }
        for slot in &self.slots {
            if slot
                .on
                .iter()
                .chain(&slot.off)
                .any(|&i| i >= self.family.len())
            {
                return invalid("booster slot names a missing family member");
            }
        }
        Ok(())
    }
}

/// Divisibility data for one i-set S: modulus and edge masks of X-edges containing S.
struct Residue {
    modulus: u64,
    x_mask: u32,
    rest_mask: u128,
}

fn residues(x: &[Edge], rest: &[Edge], n: usize, q: usize, r: usize) -> Vec<Residue> {
    let mut out = Vec::new();
    for i in 0..r {
        let modulus = binom(q - i, r - i);
        crate::hypergraph::for_each_combination(n, i, |idx| {
            let s: Vec<u32> = idx.iter().map(|&v| v as u32).collect();
            let contains = |e: &Edge| s.iter().all(|&v| e.contains(v));
            let mut x_mask = 0u32;
            for (j, e) in x.iter().enumerate() {
                if contains(e) {
                    x_mask |= 1 << j;
                }
            }
            let mut rest_mask = 0u128;
            for (j, e) in rest.iter().enumerate() {
                if contains(e) {
                    rest_mask |= 1 << j;
                }
            }
            if x_mask != 0 || rest_mask != 0 {
                out.push(Residue {
                    modulus,
                    x_mask,
                    rest_mask,
                });
            }
        });
    }
    out
}

fn divisible_masks(x: &[Edge], q: usize, r: usize) -> Result<Vec<u32>> {
    if x.len() > MAX_TABLE_EDGES {
        return invalid(format!(
            "X has {} edges; at most {MAX_TABLE_EDGES} enumerate",
            x.len()
        ));
    }
    let res = residues(x, &[], vertex_bound(x), q, r);
    Ok((0u32..1 << x.len())
        .filter(|&m| {
            res.iter()
                .all(|s| ((m & s.x_mask).count_ones() as u64).is_multiple_of(s.modulus))
        })
        .collect())
}

#[derive(Clone, Copy, Debug)]
pub struct AbsorberBudget {
    /// Largest |A| tried.
    pub max_edges: usize,
    pub time_ms: u64,
}

impl Default for AbsorberBudget {
    fn default() -> Self {
        AbsorberBudget {
            max_edges: 24,
            time_ms: 120_000,
        }
    }
}

struct CliqueMask {
    rest: u128,
    x: u32,
}

/// Exact-cover search over host cliques meeting X in at most one edge.
struct Decomposer {
    cliques: Vec<CliqueMask>,
    by_rest: Vec<Vec<usize>>,
    by_x: Vec<Vec<usize>>,
}

impl Decomposer {
    fn solve(
        &self,
        rest: u128,
        x: u32,
        failed: &mut HashSet<(u128, u32)>,
        out: &mut Vec<usize>,
    ) -> bool {
        if rest == 0 && x == 0 {
            return true;
        }
        if failed.contains(&(rest, x)) {
            return false;
        }
        let options = if rest != 0 {
            &self.by_rest[rest.trailing_zeros() as usize]
        } else {
            &self.by_x[x.trailing_zeros() as usize]
        };
        for &c in options {
            let cm = &self.cliques[c];
            if cm.rest & !rest != 0 || cm.x & !x != 0 {
                continue;
            }
            out.push(c);
            if self.solve(rest & !cm.rest, x & !cm.x, failed, out) {
                return true;
            }
            out.pop();
        }
        if failed.len() < 4_000_000 {
            failed.insert((rest, x));
        }
        false
    }
}

fn next_combination(x: u128) -> Option<u128> {
    let c = x & x.wrapping_neg();
    let r = x.checked_add(c)?;
    Some((((r ^ x) >> 2) / c) | r)
}

/// Smallest A ⊆ host \ X (by size, then colex order of edge indices) such that L ∪ A
/// decomposes for every divisible L ⊆ X.
pub fn brute_force_omni_absorber(
    host: &Hypergraph,
    x: &[Edge],
    q: usize,
    budget: AbsorberBudget,
) -> Result<OmniAbsorber> {
    let r = host.r();
    if r == 0 || q <= r {
        return invalid(format!("need q > r >= 1, got q={q}, r={r}"));
    }
    let x: Vec<Edge> = x
        .iter()
        .cloned()
        .collect::<BTreeSet<_>>()
        .into_iter()
        .collect();
    if let Some(e) = x.iter().find(|e| !host.contains_edge(e)) {
        return invalid(format!("{:?} is not a host edge", e.as_slice()));
    }
    let rest: Vec<Edge> = host
        .edge_set()
        .into_iter()
        .filter(|e| x.binary_search(e).is_err())
        .collect();
    if x.len() > MAX_TABLE_EDGES || rest.len() > 128 {
        return Err(Error::Precondition(format!(
            "exhaustive search needs |X| <= {MAX_TABLE_EDGES} and at most 128 other host edges, got {} and {}",
            x.len(),
            rest.len()
        )));
    }
    let start = Instant::now();
    let masks = divisible_masks(&x, q, r)?;
    let res = residues(&x, &rest, host.n(), q, r);

    let mut cliques = Vec::new();
    let mut members = Vec::new();
    let mut by_rest = vec![Vec::new(); rest.len()];
    let mut by_x = vec![Vec::new(); x.len()];
    for c in host.all_cliques(q) {
        let (mut rm, mut xm) = (0u128, 0u32);
        for e in c.subsets(r) {
            match x.binary_search(&e) {
                Ok(i) => xm |= 1 << i,
                Err(_) => rm |= 1 << rest.binary_search(&e).expect("host edge"),
            }
        }
        if xm.count_ones() > 1 {
            continue;
        }
        let id = cliques.len();
        for (j, list) in by_rest.iter_mut().enumerate() {
            if rm >> j & 1 == 1 {
                list.push(id);
            }
        }
        for (j, list) in by_x.iter_mut().enumerate() {
            if xm >> j & 1 == 1 {
                list.push(id);
            }
        }
        cliques.push(CliqueMask { rest: rm, x: xm });
        members.push(c);
    }
    let dec = Decomposer {
        cliques,
        by_rest,
        by_x,
    };
    let block = binom(q, r) as usize;
    let mut failed: HashSet<(u128, u32)> = HashSet::new();
    let m = rest.len();
    let mut checked: u64 = 0;
    let mut k = 0;
    while k <= budget.max_edges.min(m) {
        let mut a: u128 = if k == 0 { 0 } else { (1u128 << k) - 1 };
        loop {
            if m < 128 && a >> m != 0 {
                break;
            }
            checked += 1;
            if checked.is_multiple_of(65_536) && start.elapsed().as_millis() as u64 > budget.time_ms
            {
                return Err(Error::BudgetExhausted(format!(
                    "no absorber with at most {k} edges found within {} ms",
                    budget.time_ms
                )));
            }
            let divisible = masks.iter().all(|&l| {
                res.iter().all(|s| {
                    (((a & s.rest_mask).count_ones() + (l & s.x_mask).count_ones()) as u64)
                        .is_multiple_of(s.modulus)
                })
            });
            if divisible {
                let mut table = BTreeMap::new();
                let mut ok = true;
                for &l in &masks {
                    let mut out = Vec::new();
                    if !dec.solve(a, l, &mut failed, &mut out) {
                        ok = false;
                        break;
                    }
                    table.insert(l, out);
                }
                if ok {
                    return finish(q, r, x, &rest, a, &members, table);
                }
            }
            if k == 0 {
                break;
            }
            match next_combination(a) {
                Some(next) => a = next,
                None => break,
            }
        }
        k += block;
    }
    Err(Error::BudgetExhausted(format!(
        "no absorber with at most {} edges",
        budget.max_edges
    )))
}

fn finish(
    q: usize,
    r: usize,
    x: Vec<Edge>,
    rest: &[Edge],
    a: u128,
    members: &[Clique],
    raw: BTreeMap<u32, Vec<usize>>,
) -> Result<OmniAbsorber> {
    let used: BTreeSet<usize> = raw.values().flatten().copied().collect();
    let family: Vec<Clique> = used.iter().map(|&i| members[i].clone()).collect();
    let index: HashMap<usize, usize> = used.iter().enumerate().map(|(k, &i)| (i, k)).collect();
    let table = raw
        .into_iter()
        .map(|(l, ids)| {
            let mut v: Vec<usize> = ids.iter().map(|i| index[i]).collect();
            v.sort_unstable();
            (l, v)
        })
        .collect();
    let a_edges = (0..rest.len())
        .filter(|j| a >> j & 1 == 1)
        .map(|j| rest[j].clone())
        .collect();
    OmniAbsorber::new(q, r, x, a_edges, family, table)
}

/// Replaces every family member H by a rooted booster: L's decomposition uses the
/// booster's on side when H was used and its off side otherwise.
pub fn canonical_boost(
    ab: &OmniAbsorber,
    boosters: &BTreeMap<usize, RootedBooster>,
) -> Result<OmniAbsorber> {
    if boosters.len() != ab.family.len() || boosters.keys().enumerate().any(|(i, &k)| i != k) {
        return invalid("exactly one booster per family member is required");
    }
    let taken: HashSet<&Edge> = ab.x.iter().chain(&ab.a).collect();
    let mut seen: HashSet<&Edge> = HashSet::new();
    for (&i, b) in boosters {
        b.validate()?;
        if b.q() != ab.q || b.r() != ab.r {
            return invalid(format!(
                "booster {i} has the wrong clique size or uniformity"
            ));
        }
        if b.root() != &ab.family[i] {
            return invalid(format!("booster {i} is not rooted at its family member"));
        }
        for e in b.edges() {
            if taken.contains(e) {
                return invalid(format!("booster {i} uses {:?} from X ∪ A", e.as_slice()));
            }
            if !seen.insert(e) {
                return invalid(format!("boosters overlap at {:?}", e.as_slice()));
            }
        }
    }
    let mut family = Vec::new();
    let mut slots = Vec::new();
    for (&i, b) in boosters {
        let on: Vec<usize> = (family.len()..family.len() + b.on().len()).collect();
        family.extend(b.on().iter().cloned());
        let off: Vec<usize> = (family.len()..family.len() + b.off().len()).collect();
        family.extend(b.off().iter().cloned());
        slots.push(BoostSlot {
            root: ab.family[i].clone(),
            on,
            off,
        });
    }
    let mut table = BTreeMap::new();
    for (&l, used) in &ab.table {
        let mut ids: Vec<usize> = slots
            .iter()
            .enumerate()
            .flat_map(|(h, s)| {
                if used.contains(&h) {
                    s.on.clone()
                } else {
                    s.off.clone()
                }
            })
            .collect();
        ids.sort_unstable();
        table.insert(l, ids);
    }
    let mut a: Vec<Edge> = ab.a.clone();
    a.extend(seen.into_iter().cloned());
    a.sort();
    let out = OmniAbsorber {
        q: ab.q,
        r: ab.r,
        x: ab.x.clone(),
        a,
        family,
        table,
        slots,
    };
    out.validate()?;
    Ok(out)
}

/// Minimum girth over all table entries, searched up to `g_max`.
pub fn collective_girth(ab: &OmniAbsorber, g_max: usize) -> Result<GirthReport> {
    let reports: Vec<GirthReport> = ab
        .table
        .par_iter()
        .map(|(&l, _)| girth_of(&ab.decomposition(l).expect("present"), ab.q, ab.r, g_max))
        .collect::<Result<_>>()?;
    Ok(reports
        .into_iter()
        .fold(GirthReport::sentinel(g_max), GirthReport::min))
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct MatchingSetGirth {
    pub report: GirthReport,
    /// False when the family is too large to enumerate and only the configuration bound was used.
    pub exact: bool,
    pub patterns: u64,
}

/// Minimum girth over the matching set of a boosted absorber: every on/off choice per
/// booster whose union is a matching.
pub fn matching_set_girth(ab: &OmniAbsorber, g_max: usize) -> Result<MatchingSetGirth> {
    let sides: Vec<[Vec<Clique>; 2]> = ab
        .slots
        .iter()
        .map(|s| {
            let pick = |ids: &[usize]| ids.iter().map(|&i| ab.family[i].clone()).collect();
            [pick(&s.on), pick(&s.off)]
        })
        .collect();
    matching_set_girth_of(&sides, ab.q, ab.r, g_max)
}

/// Minimum girth over every union of one side per group that forms a matching.
pub fn matching_set_girth_of(
    sides: &[[Vec<Clique>; 2]],
    q: usize,
    r: usize,
    g_max: usize,
) -> Result<MatchingSetGirth> {
    if sides.len() > MAX_EXACT_FAMILY {
        let report = side_choice_bound(sides, q, r, g_max)?;
        return Ok(MatchingSetGirth {
            report,
            exact: false,
            patterns: 0,
        });
    }
    let k = sides.len();
    let results: Vec<Option<GirthReport>> = (0u64..1 << k)
        .into_par_iter()
        .map(|pattern| {
            let m: Vec<Clique> = (0..k)
                .flat_map(|h| sides[h][(pattern >> h & 1) as usize].iter().cloned())
                .collect();
            if check_matching(&m, r).is_err() {
                return Ok(None);
            }
            girth_of(&m, q, r, g_max).map(Some)
        })
        .collect::<Result<_>>()?;
    let patterns = results.iter().flatten().count() as u64;
    let report = results
        .into_iter()
        .flatten()
        .fold(GirthReport::sentinel(g_max), GirthReport::min);
    Ok(MatchingSetGirth {
        report,
        exact: true,
        patterns,
    })
}

/// Choice labels for a clique: (group, option) pairs. A configuration is realizable when
/// each group contributes at most one option and the chosen options' cliques form a matching.
pub(crate) fn realizable(
    config: &[Clique],
    holders: &HashMap<Clique, Vec<(usize, usize)>>,
    options: &dyn Fn(usize, usize) -> Vec<Clique>,
    r: usize,
) -> bool {
    fn go(
        i: usize,
        config: &[Clique],
        holders: &HashMap<Clique, Vec<(usize, usize)>>,
        chosen: &mut Vec<(usize, usize)>,
        options: &dyn Fn(usize, usize) -> Vec<Clique>,
        r: usize,
    ) -> bool {
        if i == config.len() {
            let mut picks: Vec<(usize, usize)> = chosen.clone();
            picks.sort_unstable();
            picks.dedup();
            let union: Vec<Clique> = picks.iter().flat_map(|&(g, o)| options(g, o)).collect();
            return check_matching(&union, r).is_ok();
        }
        let Some(list) = holders.get(&config[i]) else {
            return false;
        };
        for &(g, o) in list {
            if chosen.iter().any(|&(cg, co)| cg == g && co != o) {
                continue;
            }
            chosen.push((g, o));
            if go(i + 1, config, holders, chosen, options, r) {
                return true;
            }
            chosen.pop();
        }
        false
    }
    go(0, config, holders, &mut Vec::new(), options, r)
}

/// Smallest realizable Erdős configuration over the union of all sides, ignoring groups
/// outside the configuration. Sound as a lower bound on the matching-set girth.
fn side_choice_bound(
    sides: &[[Vec<Clique>; 2]],
    q: usize,
    r: usize,
    g_max: usize,
) -> Result<GirthReport> {
    let mut holders: HashMap<Clique, Vec<(usize, usize)>> = HashMap::new();
    for (h, pair) in sides.iter().enumerate() {
        for (side, list) in pair.iter().enumerate() {
            for c in list {
                holders.entry(c.clone()).or_default().push((h, side));
            }
        }
    }
    let universe: Vec<Clique> = holders.keys().cloned().collect();
    let options = |g: usize, o: usize| sides[g][o].clone();
    for s in 3..=g_max {
        for f in erdos_configs_through(&universe, &[], s, q, r)? {
            if realizable(&f.cliques, &holders, &options, r) {
                return Ok(GirthReport {
                    value: GirthValue::Finite(s),
                    witness: Some(f),
                });
            }
        }
    }
    Ok(GirthReport::sentinel(g_max))
}

/// M plus the absorber's decomposition of the uncovered part of X: an exact decomposition
/// of `host`, re-verified. With `g`, the result must also have no configuration of size <= g.
pub fn assemble_decomposition(
    m: &Packing,
    ab: &OmniAbsorber,
    host: &Hypergraph,
    g: Option<usize>,
) -> Result<Packing> {
    let covered = m.covered_edges();
    if let Some(e) = ab.a.iter().find(|e| covered.contains(e)) {
        return Err(Error::Precondition(format!(
            "M uses absorber edge {:?}",
            e.as_slice()
        )));
    }
    let x: BTreeSet<&Edge> = ab.x.iter().collect();
    let a: BTreeSet<&Edge> = ab.a.iter().collect();
    if let Some(e) = host
        .edges()
        .iter()
        .find(|e| !covered.contains(e) && !x.contains(e) && !a.contains(e))
    {
        return Err(Error::Precondition(format!(
            "{:?} is covered by neither M nor the absorber",
            e.as_slice()
        )));
    }
    let leave: Vec<Edge> =
        ab.x.iter()
            .filter(|e| !covered.contains(e))
            .cloned()
            .collect();
    if !is_divisible_edges(&leave, host.n(), ab.r, ab.q)? {
        return Err(Error::Verification(
            "the uncovered part of X is not divisible".into(),
        ));
    }
    let mask = ab.mask_of(&leave)?;
    let Some(extra) = ab.decomposition(mask) else {
        return Err(Error::Verification(format!(
            "no table entry for leave {mask}"
        )));
    };
    let mut blocks = m.blocks().to_vec();
    blocks.extend(extra);
    let out = Packing::new(host.clone(), ab.q, blocks)?;
    if !out.is_decomposition() {
        return Err(Error::Verification(
            "assembled packing is not a decomposition".into(),
        ));
    }
    if let Some(g) = g {
        let rep = girth(&out, g)?;
        if !rep.value.exceeds(g) {
            return Err(Error::Verification(format!(
                "assembled decomposition has girth {:?}",
                rep.value
            )));
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hypergraph::complete_host;

    fn e(v: &[u32]) -> Edge {
        VertexSet::from_slice(v).unwrap()
    }

    #[test]
    fn trivial_absorbers() {
        let k6 = complete_host(6, 2).unwrap();
        let ab = brute_force_omni_absorber(&k6, &[], 3, AbsorberBudget::default()).unwrap();
        assert!(ab.a().is_empty());
        assert_eq!(ab.table().get(&0), Some(&vec![]));
        let single =
            brute_force_omni_absorber(&k6, &[e(&[0, 1])], 3, AbsorberBudget::default()).unwrap();
        assert!(single.a().is_empty());
        assert_eq!(single.table().len(), 1);
        assert!(collective_girth(&ab, 5).unwrap().value.is_sentinel());
    }

    #[test]
    fn triangle_absorber_in_k7() {
        let k7 = complete_host(7, 2).unwrap();
        let x = [e(&[0, 1]), e(&[0, 2]), e(&[1, 2])];
        let ab = brute_force_omni_absorber(&k7, &x, 3, AbsorberBudget::default()).unwrap();
        assert_eq!(ab.divisible_masks().unwrap(), vec![0, 7]);
        assert_eq!(ab.a().len() % 3, 0);
        ab.validate().unwrap();
        let json = serde_json::to_string(&ab).unwrap();
        let back: OmniAbsorber = serde_json::from_str(&json).unwrap();
        assert_eq!(back, ab);
    }

    #[test]
    fn pasch_table_has_girth_four() {
        let pasch = vec![e(&[1, 2, 3]), e(&[1, 4, 5]), e(&[2, 4, 6]), e(&[3, 5, 6])];
        let a = edges_of(&pasch.iter().collect::<Vec<_>>(), 2);
        let table = [(0u32, vec![0, 1, 2, 3])].into_iter().collect();
        let ab = OmniAbsorber::new(3, 2, vec![], a, pasch, table).unwrap();
        assert_eq!(
            collective_girth(&ab, 5).unwrap().value,
            GirthValue::Finite(4)
        );
    }

    #[test]
    fn assemble_fano() {
        let k7 = complete_host(7, 2).unwrap();
        let lines = [
            [0, 1, 2],
            [0, 3, 4],
            [0, 5, 6],
            [1, 3, 5],
            [1, 4, 6],
            [2, 3, 6],
            [2, 4, 5],
        ];
        let blocks: Vec<Clique> = lines.iter().map(|l| e(l)).collect();
        // The absorber owns the last two lines; X is a single edge that M must cover.
        let x = vec![e(&[0, 1])];
        let a = edges_of(&blocks[5..].iter().collect::<Vec<_>>(), 2);
        let family = vec![blocks[5].clone(), blocks[6].clone()];
        let table = [(0u32, vec![0, 1])].into_iter().collect();
        let ab = OmniAbsorber::new(3, 2, x, a, family, table).unwrap();
        let m = Packing::new(k7.clone(), 3, blocks[..5].to_vec()).unwrap();
        let full = assemble_decomposition(&m, &ab, &k7, Some(3)).unwrap();
        assert!(full.is_decomposition());
        let bad = Packing::new(k7.clone(), 3, blocks[..6].to_vec()).unwrap();
        assert!(matches!(
            assemble_decomposition(&bad, &ab, &k7, None),
            Err(Error::Precondition(_))
        ));
        let short = Packing::new(k7.clone(), 3, blocks[1..5].to_vec()).unwrap();
        assert!(matches!(
            assemble_decomposition(&short, &ab, &k7, None),
            Err(Error::Precondition(_))
        ));
    }

    #[test]
    fn canonical_boost_rejects_bad_maps() {
        let k7 = complete_host(7, 2).unwrap();
        let ab = brute_force_omni_absorber(&k7, &[], 3, AbsorberBudget::default()).unwrap();
        let same = canonical_boost(&ab, &BTreeMap::new()).unwrap();
        assert_eq!(same.a(), ab.a());
        let x = [e(&[0, 1]), e(&[0, 2]), e(&[1, 2])];
        let tri = brute_force_omni_absorber(&k7, &x, 3, AbsorberBudget::default()).unwrap();
        assert!(canonical_boost(&tri, &BTreeMap::new()).is_err());
    }
}
