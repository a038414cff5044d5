//! Configurations and the girth, cogirth and rooted-girth functionals.

use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use crate::boosters::RootedBooster;
use crate::error::{invalid, Error, Result};
use crate::hypergraph::{check_matching, Clique, Packing, VertexSet};
use crate::search::{min_witness, span_states, Rule, Universe};

/// A collection of cliques together with the number of vertices it spans.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub struct Configuration {
    pub cliques: Vec<Clique>,
    pub span: usize,
}

impl Configuration {
    pub fn new(mut cliques: Vec<Clique>) -> Self {
        cliques.sort();
        let span = span_of(&cliques);
        Configuration { cliques, span }
    }
}

pub fn span_of(cliques: &[Clique]) -> usize {
    cliques
        .iter()
        .flat_map(|c| c.as_slice().iter().copied())
        .collect::<BTreeSet<u32>>()
        .len()
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum GirthValue {
    Finite(usize),
    /// No witness of any size up to the stated bound.
    Exceeds(usize),
}

impl GirthValue {
    pub fn is_sentinel(&self) -> bool {
        matches!(self, GirthValue::Exceeds(_))
    }

    pub fn finite(&self) -> Option<usize> {
        match self {
            GirthValue::Finite(g) => Some(*g),
            GirthValue::Exceeds(_) => None,
        }
    }

    /// True iff no witness of size `<= g` exists.
    pub fn exceeds(&self, g: usize) -> bool {
        match self {
            GirthValue::Finite(v) => *v > g,
            GirthValue::Exceeds(m) => *m >= g,
        }
    }
}

impl std::fmt::Display for GirthValue {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            GirthValue::Finite(g) => write!(f, "{g}"),
            GirthValue::Exceeds(m) => write!(f, "> {m}"),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "GirthReportRepr", into = "GirthReportRepr")]
pub struct GirthReport {
    pub value: GirthValue,
    pub witness: Option<Configuration>,
}

#[derive(Clone, Serialize, Deserialize)]
#[serde(untagged)]
enum GirthField {
    Finite(usize),
    Text(String),
}

#[derive(Clone, Serialize, Deserialize)]
struct GirthReportRepr {
    girth: GirthField,
    gmax: usize,
    witness: Vec<Clique>,
}

impl TryFrom<GirthReportRepr> for GirthReport {
    type Error = Error;

    fn try_from(r: GirthReportRepr) -> Result<Self> {
        let value = match r.girth {
            GirthField::Finite(g) => GirthValue::Finite(g),
            GirthField::Text(t) if t == "inf" => GirthValue::Exceeds(r.gmax),
            GirthField::Text(t) => return invalid(format!("unknown girth value {t:?}")),
        };
        let witness = (!r.witness.is_empty()).then(|| Configuration::new(r.witness));
        Ok(GirthReport { value, witness })
    }
}

impl From<GirthReport> for GirthReportRepr {
    fn from(r: GirthReport) -> Self {
        let (girth, gmax) = match r.value {
            GirthValue::Finite(g) => (GirthField::Finite(g), g),
            GirthValue::Exceeds(m) => (GirthField::Text("inf".into()), m),
        };
        GirthReportRepr {
            girth,
            gmax,
            witness: r.witness.map(|w| w.cliques).unwrap_or_default(),
        }
    }
}

impl GirthReport {
    pub fn sentinel(g_max: usize) -> Self {
        GirthReport {
            value: GirthValue::Exceeds(g_max),
            witness: None,
        }
    }

    /// The smaller of two reports; ties keep `self`.
    pub fn min(self, other: GirthReport) -> GirthReport {
        match (self.value, other.value) {
            (GirthValue::Finite(a), GirthValue::Finite(b)) if b < a => other,
            (GirthValue::Exceeds(_), GirthValue::Finite(_)) => other,
            (GirthValue::Exceeds(a), GirthValue::Exceeds(b)) if b < a => other,
            _ => self,
        }
    }
}

fn vertex_bound(cliques: &[Clique]) -> usize {
    cliques
        .iter()
        .filter_map(|c| c.max_vertex())
        .max()
        .map_or(0, |m| m as usize + 1)
}

fn report_from(
    cliques: &[Clique],
    q: usize,
    r: usize,
    rule: Rule,
    ignore: &[u32],
    g_max: usize,
) -> GirthReport {
    let n = vertex_bound(cliques).max(ignore.iter().map(|&v| v as usize + 1).max().unwrap_or(0));
    let u = Universe::from_cliques(n, q, r, cliques);
    match min_witness(&u, rule, ignore, g_max) {
        Some(found) => GirthReport {
            value: GirthValue::Finite(found.size),
            witness: Some(Configuration::new(
                found
                    .ids
                    .iter()
                    .map(|&i| cliques[i as usize].clone())
                    .collect(),
            )),
        },
        None => GirthReport::sentinel(g_max),
    }
}

/// Girth of an arbitrary clique list treated as a multiset.
pub fn girth_of(cliques: &[Clique], q: usize, r: usize, g_max: usize) -> Result<GirthReport> {
    if g_max < 2 {
        return invalid("g_max must be at least 2");
    }
    let mut sorted = cliques.to_vec();
    sorted.sort();
    Ok(report_from(&sorted, q, r, Rule::girth(q, r), &[], g_max))
}

/// Smallest g in [2, g_max] admitting a ((q−r)g+r, g)-configuration.
pub fn girth(p: &Packing, g_max: usize) -> Result<GirthReport> {
    girth_of(p.blocks(), p.q(), p.r(), g_max)
}

/// Cogirth of two clique lists, repeated cliques counted as distinct members.
pub fn cogirth_of(
    a: &[Clique],
    b: &[Clique],
    q: usize,
    r: usize,
    g_max: usize,
) -> Result<GirthReport> {
    if g_max < 2 {
        return invalid("g_max must be at least 2");
    }
    let mut union: Vec<Clique> = a.iter().chain(b.iter()).cloned().collect();
    union.sort();
    Ok(report_from(&union, q, r, Rule::cogirth(q, r), &[], g_max))
}

/// Smallest g in [2, g_max] with a (g(q−r)+r−1, g)-configuration in P1 ∪ P2.
pub fn cogirth(p1: &Packing, p2: &Packing, g_max: usize) -> Result<GirthReport> {
    if p1.q() != p2.q() || p1.r() != p2.r() {
        return invalid(format!(
            "mismatched parameters: (q, r) = ({}, {}) vs ({}, {})",
            p1.q(),
            p1.r(),
            p2.q(),
            p2.r()
        ));
    }
    cogirth_of(p1.blocks(), p2.blocks(), p1.q(), p1.r(), g_max)
}

pub fn rooted_girth_of(
    cliques: &[Clique],
    q: usize,
    r: usize,
    root: &VertexSet,
    g_max: usize,
) -> Result<GirthReport> {
    if g_max < 1 {
        return invalid("g_max must be at least 1");
    }
    let mut sorted = cliques.to_vec();
    sorted.sort();
    Ok(report_from(
        &sorted,
        q,
        r,
        Rule::rooted(q, r),
        root.as_slice(),
        g_max,
    ))
}

/// Smallest g with g cliques having fewer than (q−r)g vertices outside `root`.
pub fn rooted_girth(p: &Packing, root: &VertexSet, g_max: usize) -> Result<GirthReport> {
    rooted_girth_of(p.blocks(), p.q(), p.r(), root, g_max)
}

/// Minimum of girth(on), girth(off ∪ {S}) and the rooted girth of on at V(S).
pub fn rooted_booster_girth(rb: &RootedBooster, g_max: usize) -> Result<GirthReport> {
    rb.validate()?;
    let (q, r) = (rb.q(), rb.r());
    let mut report = rooted_girth_of(rb.on(), q, r, rb.root(), g_max)?;
    if g_max >= 2 {
        let on = girth_of(rb.on(), q, r, g_max)?;
        let mut off: Vec<Clique> = rb.off().to_vec();
        off.push(rb.root().clone());
        let off = girth_of(&off, q, r, g_max)?;
        report = on.min(off).min(report);
    }
    Ok(report)
}

/// Whether `cliques` is an Erdős configuration of its size.
pub fn is_erdos(cliques: &[Clique], q: usize, r: usize) -> bool {
    let s = cliques.len();
    if s < 3 || span_of(cliques) > s * (q - r) + r {
        return false;
    }
    if check_matching(cliques, r).is_err() {
        return false;
    }
    !has_small_subconfig(cliques, q, r)
}

fn has_small_subconfig(cliques: &[Clique], q: usize, r: usize) -> bool {
    let s = cliques.len();
    for mask in 1u64..(1u64 << s) - 1 {
        let k = mask.count_ones() as usize;
        if k < 2 {
            continue;
        }
        let sub: Vec<Clique> = (0..s)
            .filter(|i| mask >> i & 1 == 1)
            .map(|i| cliques[i].clone())
            .collect();
        if span_of(&sub) <= k * (q - r) + r {
            return true;
        }
    }
    false
}

/// All (s(q−r)+r, s) Erdős configurations in `universe ∪ z` that contain `z`.
pub fn erdos_configs_through(
    universe: &[Clique],
    z: &[Clique],
    s: usize,
    q: usize,
    r: usize,
) -> Result<Vec<Configuration>> {
    if s < 3 {
        return invalid("Erdős configurations have at least three cliques");
    }
    if z.len() > s {
        return invalid("more required cliques than the configuration size");
    }
    check_matching(z, r)?;
    if universe.iter().chain(z).any(|c| c.len() != q) {
        return invalid(format!("every clique must have {q} vertices"));
    }
    let pool: Vec<Clique> = universe
        .iter()
        .chain(z.iter())
        .cloned()
        .collect::<BTreeSet<_>>()
        .into_iter()
        .collect();
    let through: Vec<u32> = z
        .iter()
        .map(|c| pool.binary_search(c).expect("z is pooled") as u32)
        .collect();
    let u = Universe::from_cliques(vertex_bound(&pool), q, r, &pool);
    let mut found: BTreeSet<Vec<u32>> = BTreeSet::new();
    for state in span_states(&u, Rule::girth(q, r), &through, s) {
        collect_erdos(&u, &state.span, &state.closure, &through, s, &mut found);
    }
    let mut out: Vec<Configuration> = found
        .into_iter()
        .map(|ids| Configuration::new(ids.iter().map(|&i| pool[i as usize].clone()).collect()))
        .collect();
    out.sort();
    Ok(out)
}

fn collect_erdos(
    u: &Universe,
    span: &[u32],
    closure: &[u32],
    through: &[u32],
    s: usize,
    found: &mut BTreeSet<Vec<u32>>,
) {
    let (q, r) = (u.q(), u.r());
    if span.len() > s * (q - r) + r {
        return;
    }
    let free: Vec<u32> = closure
        .iter()
        .copied()
        .filter(|c| !through.contains(c))
        .collect();
    let extra = s - through.len();
    crate::hypergraph::for_each_combination(free.len(), extra, |idx| {
        let mut ids: Vec<u32> = through.to_vec();
        ids.extend(idx.iter().map(|&i| free[i]));
        ids.sort_unstable();
        for i in 0..ids.len() {
            for j in i + 1..ids.len() {
                if u.overlap_at_least_r(ids[i], ids[j]) {
                    return;
                }
            }
        }
        let covered: BTreeSet<u32> = ids.iter().flat_map(|&i| u.clique(i).to_vec()).collect();
        if covered.len() != span.len() {
            return;
        }
        let cliques: Vec<Clique> = ids
            .iter()
            .map(|&i| VertexSet::from_sorted(u.clique(i).to_vec()))
            .collect();
        if !has_small_subconfig(&cliques, q, r) {
            found.insert(ids);
        }
    });
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hypergraph::complete_host;

    fn cl(v: &[u32]) -> Clique {
        VertexSet::from_slice(v).unwrap()
    }

    pub(crate) fn fano() -> Packing {
        let lines = [
            [0, 1, 2],
            [0, 3, 4],
            [0, 5, 6],
            [1, 3, 5],
            [1, 4, 6],
            [2, 3, 6],
            [2, 4, 5],
        ];
        Packing::in_complete(7, 2, 3, lines.iter().map(|l| cl(l)).collect()).unwrap()
    }

    #[test]
    fn fano_girth_four() {
        let rep = girth(&fano(), 6).unwrap();
        assert_eq!(rep.value, GirthValue::Finite(4));
        let w = rep.witness.unwrap();
        assert_eq!(w.cliques.len(), 4);
        assert!(w.span <= 6);
    }

    #[test]
    fn pasch_girth_four() {
        let p = Packing::in_complete(
            7,
            2,
            3,
            vec![
                cl(&[1, 2, 3]),
                cl(&[1, 4, 5]),
                cl(&[2, 4, 6]),
                cl(&[3, 5, 6]),
            ],
        )
        .unwrap();
        assert_eq!(girth(&p, 6).unwrap().value, GirthValue::Finite(4));
        assert!(girth(&p, 3).unwrap().value.is_sentinel());
    }

    #[test]
    fn cogirth_examples() {
        let f = fano();
        assert_eq!(cogirth(&f, &f, 5).unwrap().value, GirthValue::Finite(2));
        let a = Packing::in_complete(6, 2, 3, vec![cl(&[0, 1, 2])]).unwrap();
        let b = Packing::in_complete(6, 2, 3, vec![cl(&[3, 4, 5])]).unwrap();
        assert!(cogirth(&a, &b, 6).unwrap().value.is_sentinel());
        let c = Packing::in_complete(6, 3, 4, vec![cl(&[0, 1, 2, 3])]).unwrap();
        assert!(cogirth(&a, &c, 4).is_err());
    }

    #[test]
    fn rooted_girth_examples() {
        let p = Packing::in_complete(6, 2, 3, vec![cl(&[0, 1, 2])]).unwrap();
        let inside = rooted_girth(&p, &cl(&[0, 1, 2, 3]), 3).unwrap();
        assert_eq!(inside.value, GirthValue::Finite(1));
        let outside = rooted_girth(&p, &cl(&[4, 5]), 1).unwrap();
        assert!(outside.value.is_sentinel());
        assert!(rooted_girth(&fano(), &cl(&[]), 1)
            .unwrap()
            .value
            .is_sentinel());
    }

    #[test]
    fn erdos_through_k6_are_pasch() {
        let k6 = complete_host(6, 2).unwrap();
        let all = k6.all_cliques(3);
        let found = erdos_configs_through(&all, &[], 4, 3, 2).unwrap();
        assert!(!found.is_empty());
        for c in &found {
            assert_eq!(c.span, 6);
            assert!(is_erdos(&c.cliques, 3, 2));
        }
        // 6 points admit 30 distinct Pasch configurations.
        assert_eq!(found.len(), 30);
    }

    #[test]
    fn erdos_through_rejects_non_matching_z() {
        let z = [cl(&[0, 1, 2]), cl(&[0, 1, 3])];
        assert!(matches!(
            erdos_configs_through(&[], &z, 4, 3, 2),
            Err(Error::NotAMatching(_))
        ));
        assert!(erdos_configs_through(&[cl(&[0, 1, 2])], &[], 3, 3, 2)
            .unwrap()
            .is_empty());
    }

    #[test]
    fn girth_report_json() {
        let rep = girth(&fano(), 6).unwrap();
        let s = serde_json::to_string(&rep).unwrap();
        assert!(s.starts_with("{\"girth\":4"));
        let back: GirthReport = serde_json::from_str(&s).unwrap();
        assert_eq!(back, rep);
        let inf = GirthReport::sentinel(7);
        let s = serde_json::to_string(&inf).unwrap();
        assert!(s.contains("\"inf\""));
        assert_eq!(serde_json::from_str::<GirthReport>(&s).unwrap(), inf);
    }
}
