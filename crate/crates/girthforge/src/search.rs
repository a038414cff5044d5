//! Span-closure search over clique collections.
//!
//! States are vertex sets W grown by adding cliques that touch W. The closure of W
//! (all cliques whose counted vertices lie in W) decides whether some sub-collection
//! spans few enough vertices. Every connected configuration is reached through the
//! chain of its own partial spans, so bounding |W| by the largest admissible span is
//! complete.

use std::collections::{HashMap, HashSet};

use smallvec::SmallVec;

use crate::hypergraph::{binom, colex_rank, for_each_combination, Clique};

enum EdgeMap {
    Dense(Vec<SmallVec<[u32; 2]>>),
    Sparse(HashMap<u64, SmallVec<[u32; 2]>>),
}

const DENSE_LIMIT: u64 = 1 << 24;

/// Indexed clique collection; ids are insertion positions.
pub(crate) struct Universe {
    n: usize,
    q: usize,
    r: usize,
    flat: Vec<u32>,
    by_vertex: Vec<Vec<u32>>,
    by_edge: EdgeMap,
}

impl Universe {
    pub(crate) fn new(n: usize, q: usize, r: usize) -> Self {
        let count = binom(n, r);
        let by_edge = if count <= DENSE_LIMIT {
            EdgeMap::Dense(vec![SmallVec::new(); count as usize])
        } else {
            EdgeMap::Sparse(HashMap::new())
        };
        Universe {
            n,
            q,
            r,
            flat: Vec::new(),
            by_vertex: vec![Vec::new(); n],
            by_edge,
        }
    }

    pub(crate) fn from_cliques(n: usize, q: usize, r: usize, cliques: &[Clique]) -> Self {
        let mut u = Self::new(n, q, r);
        for c in cliques {
            u.push(c.as_slice());
        }
        u
    }

    pub(crate) fn len(&self) -> usize {
        self.flat.len() / self.q
    }

    pub(crate) fn q(&self) -> usize {
        self.q
    }

    pub(crate) fn r(&self) -> usize {
        self.r
    }

    pub(crate) fn clique(&self, id: u32) -> &[u32] {
        let s = id as usize * self.q;
        &self.flat[s..s + self.q]
    }

    pub(crate) fn with_vertex(&self, v: u32) -> &[u32] {
        &self.by_vertex[v as usize]
    }

    pub(crate) fn with_edge(&self, sorted: &[u32]) -> &[u32] {
        let rank = colex_rank(sorted);
        match &self.by_edge {
            EdgeMap::Dense(d) => &d[rank as usize],
            EdgeMap::Sparse(m) => m.get(&rank).map_or(&[], |v| v.as_slice()),
        }
    }

    pub(crate) fn push(&mut self, c: &[u32]) -> u32 {
        debug_assert_eq!(c.len(), self.q);
        let id = self.len() as u32;
        self.flat.extend_from_slice(c);
        for &v in c {
            self.by_vertex[v as usize].push(id);
        }
        let r = self.r;
        let mut sub = vec![0u32; r];
        for_each_combination(c.len(), r, |idx| {
            for (k, &i) in idx.iter().enumerate() {
                sub[k] = c[i];
            }
            let rank = colex_rank(&sub);
            match &mut self.by_edge {
                EdgeMap::Dense(d) => d[rank as usize].push(id),
                EdgeMap::Sparse(m) => m.entry(rank).or_default().push(id),
            }
        });
        id
    }

    /// Removes the most recently pushed clique.
    pub(crate) fn pop(&mut self) {
        let id = self.len() as u32 - 1;
        let c: Vec<u32> = self.clique(id).to_vec();
        for &v in &c {
            let list = &mut self.by_vertex[v as usize];
            debug_assert_eq!(list.last(), Some(&id));
            list.pop();
        }
        let r = self.r;
        for_each_combination(c.len(), r, |idx| {
            let sub: Vec<u32> = idx.iter().map(|&i| c[i]).collect();
            let rank = colex_rank(&sub);
            let list = match &mut self.by_edge {
                EdgeMap::Dense(d) => &mut d[rank as usize],
                EdgeMap::Sparse(m) => m.get_mut(&rank).expect("indexed edge"),
            };
            if let Some(pos) = list.iter().rposition(|&x| x == id) {
                list.remove(pos);
            }
        });
        self.flat.truncate(self.flat.len() - self.q);
    }

    /// Whether two cliques share at least r vertices.
    pub(crate) fn overlap_at_least_r(&self, a: u32, b: u32) -> bool {
        let (x, y) = (self.clique(a), self.clique(b));
        x.iter().filter(|v| y.contains(v)).count() >= self.r
    }
}

/// Witness rule: k cliques spanning `span` counted vertices qualify iff
/// `min_size <= k` and `slope * k + offset >= span`.
#[derive(Clone, Copy, Debug)]
pub(crate) struct Rule {
    pub slope: usize,
    pub offset: i64,
    pub min_size: usize,
}

impl Rule {
    pub(crate) fn girth(q: usize, r: usize) -> Self {
        Rule {
            slope: q - r,
            offset: r as i64,
            min_size: 2,
        }
    }

    pub(crate) fn cogirth(q: usize, r: usize) -> Self {
        Rule {
            slope: q - r,
            offset: r as i64 - 1,
            min_size: 2,
        }
    }

    pub(crate) fn rooted(q: usize, r: usize) -> Self {
        Rule {
            slope: q - r,
            offset: -1,
            min_size: 1,
        }
    }

    pub(crate) fn max_span(&self, size: usize) -> i64 {
        self.slope as i64 * size as i64 + self.offset
    }

    /// Smallest qualifying size for a given span.
    pub(crate) fn need(&self, span: usize) -> usize {
        let gap = span as i64 - self.offset;
        let k = if gap <= 0 {
            0
        } else {
            (gap as usize).div_ceil(self.slope)
        };
        k.max(self.min_size)
    }
}

#[derive(Clone, Copy, PartialEq, Eq)]
enum Goal {
    Any,
    Min,
    Collect,
}

type Fresh = SmallVec<[u32; 4]>;

#[derive(Default)]
struct Scan {
    closure: Vec<u32>,
    cands: Vec<(u32, Fresh)>,
    near: HashMap<Fresh, usize>,
}

/// A state recorded in collect mode: sorted span and sorted closure ids.
pub(crate) struct SpanState {
    pub span: Vec<u32>,
    pub closure: Vec<u32>,
}

struct Search<'a> {
    u: &'a Universe,
    rule: Rule,
    ignore: Vec<bool>,
    ignore_list: Vec<u32>,
    in_w: Vec<bool>,
    w: Vec<u32>,
    mark: Vec<u32>,
    epoch: u32,
    memo: HashSet<Vec<u32>>,
    floor: Option<u32>,
    required: Vec<u32>,
    max_size: usize,
    goal: Goal,
    best: Option<(usize, Vec<u32>)>,
    stop: bool,
    collected: Vec<SpanState>,
}

impl<'a> Search<'a> {
    fn new(u: &'a Universe, rule: Rule, ignore: &[u32], max_size: usize, goal: Goal) -> Self {
        let mut ig = vec![false; u.n];
        for &v in ignore {
            if (v as usize) < u.n {
                ig[v as usize] = true;
            }
        }
        let mut ignore_list: Vec<u32> = ignore
            .iter()
            .copied()
            .filter(|&v| (v as usize) < u.n)
            .collect();
        ignore_list.sort_unstable();
        ignore_list.dedup();
        Search {
            u,
            rule,
            ignore: ig,
            ignore_list,
            in_w: vec![false; u.n],
            w: Vec::new(),
            mark: vec![0; u.len()],
            epoch: 0,
            memo: HashSet::new(),
            floor: None,
            required: Vec::new(),
            max_size,
            goal,
            best: None,
            stop: false,
            collected: Vec::new(),
        }
    }

    fn next_epoch(&mut self) -> u32 {
        self.epoch = self.epoch.wrapping_add(1);
        if self.epoch == 0 {
            self.mark.iter_mut().for_each(|m| *m = 0);
            self.epoch = 1;
        }
        self.epoch
    }

    fn add_vertices(&mut self, vs: &[u32]) -> usize {
        let mut added = 0;
        for &v in vs {
            if !self.ignore[v as usize] && !self.in_w[v as usize] {
                self.in_w[v as usize] = true;
                self.w.push(v);
                added += 1;
            }
        }
        added
    }

    fn drop_vertices(&mut self, count: usize) {
        for _ in 0..count {
            let v = self.w.pop().expect("pushed vertex");
            self.in_w[v as usize] = false;
        }
    }

    fn inside(&self, v: u32) -> bool {
        self.in_w[v as usize] || self.ignore[v as usize]
    }

    /// Closure ids (sorted), extension candidates and, when `near` is set, the number of
    /// cliques per nonempty fresh set of size at most `room` touching W or the ignored set.
    fn scan(&mut self, room: usize, near: bool) -> Scan {
        let u = self.u;
        let r = u.r;
        let q = u.q;
        let epoch = self.next_epoch();
        let mut pool: Vec<u32> = self
            .w
            .iter()
            .copied()
            .chain(self.ignore_list.iter().copied())
            .collect();
        pool.sort_unstable();
        let via_edges = room > 0 && room <= q - r;
        let mut out = Scan::default();
        let mut sub = vec![0u32; r];
        let floor = self.floor;
        for_each_combination(pool.len(), r, |idx| {
            for (k, &i) in idx.iter().enumerate() {
                sub[k] = pool[i];
            }
            for &id in u.with_edge(&sub) {
                if self.mark[id as usize] == epoch {
                    continue;
                }
                let c = u.clique(id);
                let fresh: Fresh = c.iter().copied().filter(|&v| !self.inside(v)).collect();
                if fresh.is_empty() {
                    self.mark[id as usize] = epoch;
                    out.closure.push(id);
                } else if via_edges {
                    self.mark[id as usize] = epoch;
                    if fresh.len() <= room {
                        if near {
                            *out.near.entry(fresh.clone()).or_default() += 1;
                        }
                        if floor.is_none_or(|f| id > f) && c.iter().any(|&v| self.in_w[v as usize])
                        {
                            out.cands.push((id, fresh));
                        }
                    }
                }
            }
        });
        if room > q - r {
            let sources = if near {
                self.w.len() + self.ignore_list.len()
            } else {
                self.w.len()
            };
            for i in 0..sources {
                let (v, counted) = if i < self.w.len() {
                    (self.w[i], true)
                } else {
                    (self.ignore_list[i - self.w.len()], false)
                };
                for &id in u.with_vertex(v) {
                    if self.mark[id as usize] == epoch {
                        continue;
                    }
                    self.mark[id as usize] = epoch;
                    let c = u.clique(id);
                    let fresh: Fresh = c.iter().copied().filter(|&v| !self.inside(v)).collect();
                    if fresh.is_empty() {
                        out.closure.push(id);
                    } else if fresh.len() <= room {
                        if near {
                            *out.near.entry(fresh.clone()).or_default() += 1;
                        }
                        if floor.is_none_or(|f| id > f)
                            && (counted || c.iter().any(|&v| self.in_w[v as usize]))
                        {
                            out.cands.push((id, fresh));
                        }
                    }
                }
            }
        }
        out.closure.sort_unstable();
        out
    }

    /// Closure size of W ∪ `fresh`, counted from the near-clique table of W.
    fn child_closure(closure: usize, near: &HashMap<Fresh, usize>, fresh: &[u32]) -> usize {
        let mut total = closure;
        let k = fresh.len();
        let mut sub = Fresh::new();
        for mask in 1u32..(1 << k) {
            sub.clear();
            sub.extend((0..k).filter(|i| mask >> i & 1 == 1).map(|i| fresh[i]));
            total += near.get(&sub).copied().unwrap_or(0);
        }
        total
    }

    fn evaluate(&mut self, closure: &[u32]) {
        match self.goal {
            Goal::Collect => {
                if closure.len() >= self.rule.min_size.max(self.required.len()) {
                    let mut span = self.w.clone();
                    span.sort_unstable();
                    self.collected.push(SpanState {
                        span,
                        closure: closure.to_vec(),
                    });
                }
            }
            Goal::Any | Goal::Min => {
                let k = self.rule.need(self.w.len()).max(self.required.len());
                if k > closure.len() || k > self.max_size {
                    return;
                }
                let mut pick = self.required.clone();
                for &id in closure {
                    if pick.len() == k {
                        break;
                    }
                    if !self.required.contains(&id) {
                        pick.push(id);
                    }
                }
                pick.sort_unstable();
                let better = match &self.best {
                    None => true,
                    Some((bk, bw)) => (k, &pick) < (*bk, bw),
                };
                if better {
                    self.best = Some((k, pick));
                    self.max_size = k;
                    if self.goal == Goal::Any {
                        self.stop = true;
                    }
                }
            }
        }
    }

    fn explore(&mut self) {
        let mut key = self.w.clone();
        key.sort_unstable();
        if !self.memo.insert(key) {
            return;
        }
        let limit = self.rule.max_span(self.max_size);
        let room = (limit - self.w.len() as i64).max(0) as usize;
        let Scan {
            closure,
            mut cands,
            near,
        } = self.scan(room, self.goal != Goal::Collect && room > 0);
        self.evaluate(&closure);
        if self.stop || room == 0 {
            return;
        }
        cands.sort_unstable_by(|a, b| a.1.len().cmp(&b.1.len()).then(a.0.cmp(&b.0)));
        for (_, fresh) in cands {
            if self.stop {
                return;
            }
            let limit = self.rule.max_span(self.max_size);
            let span = self.w.len() as i64 + fresh.len() as i64;
            if span > limit {
                continue;
            }
            if span == limit && self.goal != Goal::Collect {
                // The child is a leaf: only its own closure matters.
                let k = self.rule.need(span as usize).max(self.required.len());
                if k > self.max_size || k > Self::child_closure(closure.len(), &near, &fresh) {
                    continue;
                }
            }
            let added = self.add_vertices(&fresh);
            self.explore();
            self.drop_vertices(added);
        }
    }

    fn start_from(&mut self, cliques: &[u32]) {
        let verts: Vec<u32> = cliques
            .iter()
            .flat_map(|&c| self.u.clique(c).to_vec())
            .collect();
        let added = self.add_vertices(&verts);
        self.explore();
        self.drop_vertices(added);
    }
}

/// Outcome of a minimising or first-hit search.
pub(crate) struct Found {
    pub size: usize,
    pub ids: Vec<u32>,
}

/// Lexicographically least smallest qualifying sub-collection of size at most `max_size`.
pub(crate) fn min_witness(
    u: &Universe,
    rule: Rule,
    ignore: &[u32],
    max_size: usize,
) -> Option<Found> {
    if max_size < rule.min_size {
        return None;
    }
    let mut s = Search::new(u, rule, ignore, max_size, Goal::Min);
    // Cliques whose counted part is empty are caught by the empty state.
    s.explore();
    for root in 0..u.len() as u32 {
        s.memo.clear();
        s.floor = Some(root);
        s.start_from(&[root]);
    }
    s.best.map(|(size, ids)| Found { size, ids })
}

/// First qualifying connected sub-collection containing every clique of `through`.
pub(crate) fn witness_through(
    u: &Universe,
    rule: Rule,
    ignore: &[u32],
    through: &[u32],
    max_size: usize,
) -> Option<Found> {
    if max_size < rule.min_size || max_size < through.len() {
        return None;
    }
    let mut s = Search::new(u, rule, ignore, max_size, Goal::Any);
    s.required = through.to_vec();
    s.start_from(through);
    s.best.map(|(size, ids)| Found { size, ids })
}

/// Every reachable span state of size at most the span bound for `size` cliques.
/// With `through` empty every clique serves as a start.
pub(crate) fn span_states(
    u: &Universe,
    rule: Rule,
    through: &[u32],
    size: usize,
) -> Vec<SpanState> {
    let mut s = Search::new(u, rule, &[], size, Goal::Collect);
    s.required = through.to_vec();
    if through.is_empty() {
        for root in 0..u.len() as u32 {
            s.start_from(&[root]);
        }
    } else {
        s.start_from(through);
    }
    s.collected
}
