//! Exact decision procedures for cubical and layered labellings.
//!
//! The search labels one edge at a time. Labels are canonical: an edge may
//! reuse any label already placed or take exactly one new label
//! (`max + 1`), so every labelling is visited once up to renaming.
//!
//! The edge labelled next is chosen from the current partial labelling
//! alone, which keeps the canonical argument valid while letting the search
//! go fail-first:
//!
//! 1. an unlabelled edge between two reached vertices has a forced label
//!    (`sig(u) ^ sig(v)` must be a single label) and is taken immediately;
//! 2. otherwise the frontier edge with the fewest admissible labels wins,
//!    ties broken by edge id;
//! 3. when nothing touches the reached set, the smallest untouched vertex
//!    with an edge starts a new component.
//!
//! A label `c` for a frontier edge `uw` is admissible when the new signature
//! `sig(u) ^ {c}` differs from every reached signature of the component and
//! its weight distance to every reached `z` is at most `dist_G(w, z)` (cube
//! distance never exceeds graph distance). In layered mode each label also
//! carries an orientation bit per component, `sig(v)_c ^ parity(v)` at
//! either endpoint of a `c`-edge, which must agree across all `c`-edges;
//! on a connected graph satisfying the cycle condition this is equivalent
//! to the odd-path condition.

use std::collections::{BTreeMap, HashSet};
use std::ops::ControlFlow;
use std::sync::atomic::{AtomicU64, Ordering};
use std::time::{Duration, Instant};

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::construct::ConstructionTrace;
use crate::exec::{self, Execution};
use crate::graph::{bfs_distances, EdgeId, Graph, GraphError, PathWitness, Vertex, VertexPairSet};
use crate::labelling::{EdgeLabelling, Label};

/// Limits on a search. Exceeding either yields a budget outcome, never a
/// wrong answer.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct Budget {
    pub max_nodes: Option<u64>,
    pub max_time: Option<Duration>,
}

impl Budget {
    pub fn unlimited() -> Self {
        Budget::default()
    }

    pub fn nodes(max_nodes: u64) -> Self {
        Budget {
            max_nodes: Some(max_nodes),
            max_time: None,
        }
    }

    pub fn with_time(mut self, limit: Duration) -> Self {
        self.max_time = Some(limit);
        self
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Property {
    Cubical,
    Layered,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct SearchStats {
    /// Accepted edge assignments.
    pub nodes: u64,
    pub max_depth: usize,
    pub elapsed: Duration,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Outcome {
    Witness(EdgeLabelling),
    Refuted,
    BudgetExhausted,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DecisionResult {
    pub outcome: Outcome,
    pub stats: SearchStats,
    pub budget: Budget,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SolverError {
    #[error("search budget exhausted after {} nodes", .0.nodes)]
    BudgetExhausted(SearchStats),
    #[error("input graph is not a tree")]
    NotATree,
    #[error(transparent)]
    Graph(#[from] GraphError),
}

/// A complete labelling reached by the search, with its signatures.
pub struct CompleteLabelling<'a> {
    labels: &'a [Label],
    sigma: &'a [u64],
    comp: &'a [u32],
    words: usize,
}

impl CompleteLabelling<'_> {
    /// Canonical labels, aligned with the graph's edge ids.
    pub fn labels(&self) -> &[Label] {
        self.labels
    }

    pub fn to_labelling(&self) -> EdgeLabelling {
        EdgeLabelling::from_raw(self.labels.to_vec()).canonical()
    }

    /// Cube distance of `x` and `y` under any embedding realising this
    /// labelling; `None` across components.
    pub fn distance(&self, x: Vertex, y: Vertex) -> Option<usize> {
        if self.comp[x] != self.comp[y] {
            return None;
        }
        let (a, b) = (
            &self.sigma[x * self.words..][..self.words],
            &self.sigma[y * self.words..][..self.words],
        );
        Some(
            a.iter()
                .zip(b)
                .map(|(p, q)| (p ^ q).count_ones() as usize)
                .sum(),
        )
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Flow {
    Continue,
    Stop,
    Abort,
}

struct Meter<'a> {
    nodes: u64,
    max_depth: usize,
    start: Instant,
    budget: Budget,
    shared: Option<&'a AtomicU64>,
    pending: u64,
    exhausted: bool,
}

const FLUSH: u64 = 1024;

impl<'a> Meter<'a> {
    fn new(budget: Budget, start: Instant, shared: Option<&'a AtomicU64>) -> Self {
        Meter {
            nodes: 0,
            max_depth: 0,
            start,
            budget,
            shared,
            pending: 0,
            exhausted: false,
        }
    }

    /// Count one node; false once the budget is gone.
    fn tick(&mut self, depth: usize) -> bool {
        self.nodes += 1;
        self.max_depth = self.max_depth.max(depth);
        match self.shared {
            None => {
                if self.budget.max_nodes.is_some_and(|m| self.nodes > m) {
                    self.exhausted = true;
                }
            }
            Some(total) => {
                self.pending += 1;
                if self.pending == FLUSH {
                    let seen = total.fetch_add(self.pending, Ordering::Relaxed) + self.pending;
                    self.pending = 0;
                    if self.budget.max_nodes.is_some_and(|m| seen > m) {
                        self.exhausted = true;
                    }
                }
            }
        }
        if self.nodes.is_multiple_of(FLUSH)
            && self
                .budget
                .max_time
                .is_some_and(|t| self.start.elapsed() > t)
        {
            self.exhausted = true;
        }
        !self.exhausted
    }

    fn flush(&mut self) {
        if let Some(total) = self.shared {
            total.fetch_add(self.pending, Ordering::Relaxed);
            self.pending = 0;
        }
    }
}

enum Move {
    Done,
    Forced(EdgeId),
    Branch {
        edge: EdgeId,
        from: Vertex,
        to: Vertex,
    },
    Start(Vertex),
}

type LeafFn<'f> = dyn FnMut(&CompleteLabelling) -> ControlFlow<()> + 'f;

struct Engine<'a> {
    g: &'a Graph,
    property: Property,
    dist: Option<&'a [u16]>,
    n: usize,
    words: usize,
    sigma: Vec<u64>,
    parity: Vec<bool>,
    comp: Vec<u32>,
    members: Vec<Vec<Vertex>>,
    labels: Vec<Label>,
    assigned: usize,
    max_label: Label,
    /// `[component][label]`: 0 unset, otherwise orientation bit + 1.
    orient: Vec<Vec<u8>>,
    orient_count: Vec<Vec<u32>>,
    /// Replay these labels while `assigned < replay.1`.
    replay: Option<(&'a [Label], usize)>,
    /// Record a task instead of descending once `assigned` reaches this.
    split_at: Option<usize>,
    tasks: Vec<Vec<Label>>,
    rng: Option<ChaCha8Rng>,
    meter: Meter<'a>,
}

const UNREACHED: u32 = u32::MAX;

impl<'a> Engine<'a> {
    fn new(g: &'a Graph, property: Property, dist: Option<&'a [u16]>, meter: Meter<'a>) -> Self {
        let n = g.vertex_count();
        let words = g.edge_count().div_ceil(64).max(1);
        Engine {
            g,
            property,
            dist,
            n,
            words,
            sigma: vec![0; n * words],
            parity: vec![false; n],
            comp: vec![UNREACHED; n],
            members: Vec::new(),
            labels: vec![0; g.edge_count()],
            assigned: 0,
            max_label: 0,
            orient: Vec::new(),
            orient_count: Vec::new(),
            replay: None,
            split_at: None,
            tasks: Vec::new(),
            rng: None,
            meter,
        }
    }

    fn sig(&self, v: Vertex) -> &[u64] {
        &self.sigma[v * self.words..(v + 1) * self.words]
    }

    fn bit(&self, v: Vertex, c: Label) -> bool {
        let i = (c - 1) as usize;
        self.sigma[v * self.words + i / 64] >> (i % 64) & 1 == 1
    }

    fn next_move(&self) -> Move {
        if self.assigned == self.labels.len() {
            return Move::Done;
        }
        let mut best: Option<(u32, EdgeId, Vertex, Vertex)> = None;
        for (e, &[a, b]) in self.g.edges().iter().enumerate() {
            if self.labels[e] != 0 {
                continue;
            }
            let (ra, rb) = (self.comp[a] != UNREACHED, self.comp[b] != UNREACHED);
            if ra && rb {
                return Move::Forced(e);
            }
            if ra || rb {
                let (from, to) = if ra { (a, b) } else { (b, a) };
                let size = self.admissible(from, to, None);
                if best.is_none_or(|(s, ..)| size < s) {
                    best = Some((size, e, from, to));
                }
            }
        }
        match best {
            Some((_, edge, from, to)) => Move::Branch { edge, from, to },
            None => {
                let v = (0..self.n)
                    .find(|&v| self.comp[v] == UNREACHED && self.g.degree(v) > 0)
                    .expect("unlabelled edges remain");
                Move::Start(v)
            }
        }
    }

    /// Count (and optionally list) labels admissible for a frontier edge
    /// `from -> to`.
    fn admissible(&self, from: Vertex, to: Vertex, mut out: Option<&mut Vec<Label>>) -> u32 {
        let w = self.words;
        let cap = (self.max_label + 1).min(self.labels.len() as Label);
        let mut allowed = vec![0u64; w];
        for c in 0..cap as usize {
            allowed[c / 64] |= 1 << (c % 64);
        }
        let mut forbidden = vec![0u64; w];
        let su = self.sig(from);
        let comp = self.comp[from] as usize;
        for &z in &self.members[comp] {
            let sz = self.sig(z);
            let d: u32 = su.iter().zip(sz).map(|(a, b)| (a ^ b).count_ones()).sum();
            if d == 1 {
                for i in 0..w {
                    forbidden[i] |= su[i] ^ sz[i];
                }
            }
            if let Some(dist) = self.dist {
                let dz = dist[to * self.n + z] as u32;
                if d + 1 > dz {
                    for i in 0..w {
                        allowed[i] &= su[i] ^ sz[i];
                    }
                }
            }
        }
        let mut count = 0;
        for i in 0..w {
            let mut m = allowed[i] & !forbidden[i];
            while m != 0 {
                let b = m.trailing_zeros() as usize;
                m &= m - 1;
                let c = (i * 64 + b + 1) as Label;
                if self.orientation_ok(comp, from, c) {
                    count += 1;
                    if let Some(list) = out.as_deref_mut() {
                        list.push(c);
                    }
                }
            }
        }
        count
    }

    fn orientation_bit(&self, v: Vertex, c: Label) -> u8 {
        (self.bit(v, c) ^ self.parity[v]) as u8 + 1
    }

    fn orientation_ok(&self, comp: usize, v: Vertex, c: Label) -> bool {
        if self.property == Property::Cubical {
            return true;
        }
        let cur = self.orient[comp][c as usize];
        cur == 0 || cur == self.orientation_bit(v, c)
    }

    fn push_orientation(&mut self, comp: usize, v: Vertex, c: Label) {
        if self.property == Property::Layered {
            let o = self.orientation_bit(v, c);
            let slot = &mut self.orient_count[comp][c as usize];
            *slot += 1;
            if *slot == 1 {
                self.orient[comp][c as usize] = o;
            }
        }
    }

    fn pop_orientation(&mut self, comp: usize, c: Label) {
        if self.property == Property::Layered {
            let slot = &mut self.orient_count[comp][c as usize];
            *slot -= 1;
            if *slot == 0 {
                self.orient[comp][c as usize] = 0;
            }
        }
    }

    fn replayed_label(&self, e: EdgeId) -> Option<Label> {
        match self.replay {
            Some((labels, depth)) if self.assigned < depth => Some(labels[e]),
            _ => None,
        }
    }

    /// Count a freshly accepted node unless it is being replayed.
    fn enter(&mut self) -> bool {
        let replayed = self.replay.is_some_and(|(_, d)| self.assigned <= d);
        replayed || self.meter.tick(self.assigned)
    }

    fn run(&mut self, leaf: &mut LeafFn<'_>) -> Flow {
        if self.split_at == Some(self.assigned) && self.assigned < self.labels.len() {
            self.tasks.push(self.labels.clone());
            return Flow::Continue;
        }
        match self.next_move() {
            Move::Done => {
                let view = CompleteLabelling {
                    labels: &self.labels,
                    sigma: &self.sigma,
                    comp: &self.comp,
                    words: self.words,
                };
                match leaf(&view) {
                    ControlFlow::Continue(()) => Flow::Continue,
                    ControlFlow::Break(()) => Flow::Stop,
                }
            }
            Move::Forced(e) => self.forced(e, leaf),
            Move::Branch { edge, from, to } => self.branch(edge, from, to, leaf),
            Move::Start(v) => {
                let c = self.members.len();
                self.comp[v] = c as u32;
                self.parity[v] = false;
                self.sigma[v * self.words..(v + 1) * self.words].fill(0);
                self.members.push(vec![v]);
                if self.property == Property::Layered {
                    self.orient.push(vec![0; self.labels.len() + 1]);
                    self.orient_count.push(vec![0; self.labels.len() + 1]);
                }
                let flow = self.run(leaf);
                self.members.pop();
                if self.property == Property::Layered {
                    self.orient.pop();
                    self.orient_count.pop();
                }
                self.comp[v] = UNREACHED;
                flow
            }
        }
    }

    fn forced(&mut self, e: EdgeId, leaf: &mut LeafFn<'_>) -> Flow {
        let [u, v] = self.g.endpoints(e);
        let (su, sv) = (self.sig(u), self.sig(v));
        let mut c = None;
        for i in 0..self.words {
            let x = su[i] ^ sv[i];
            if x == 0 {
                continue;
            }
            if x.count_ones() > 1 || c.is_some() {
                return Flow::Continue;
            }
            c = Some((i * 64 + x.trailing_zeros() as usize + 1) as Label);
        }
        let Some(c) = c else { return Flow::Continue };
        let comp = self.comp[u] as usize;
        if self.replayed_label(e).is_some_and(|want| want != c) {
            return Flow::Continue;
        }
        if !self.orientation_ok(comp, u, c) {
            return Flow::Continue;
        }
        self.labels[e] = c;
        self.assigned += 1;
        self.push_orientation(comp, u, c);
        let flow = if self.enter() {
            self.run(leaf)
        } else {
            Flow::Abort
        };
        self.pop_orientation(comp, c);
        self.assigned -= 1;
        self.labels[e] = 0;
        flow
    }

    fn branch(&mut self, e: EdgeId, from: Vertex, to: Vertex, leaf: &mut LeafFn<'_>) -> Flow {
        let mut candidates = Vec::new();
        self.admissible(from, to, Some(&mut candidates));
        if let Some(want) = self.replayed_label(e) {
            candidates.retain(|&c| c == want);
        } else if let Some(rng) = self.rng.as_mut() {
            candidates.shuffle(rng);
        }
        let comp = self.comp[from] as usize;
        let w = self.words;
        for c in candidates {
            let prev_max = self.max_label;
            self.sigma.copy_within(from * w..(from + 1) * w, to * w);
            let i = (c - 1) as usize;
            self.sigma[to * w + i / 64] ^= 1 << (i % 64);
            self.parity[to] = !self.parity[from];
            self.comp[to] = comp as u32;
            self.members[comp].push(to);
            self.labels[e] = c;
            self.assigned += 1;
            self.max_label = self.max_label.max(c);
            self.push_orientation(comp, from, c);

            let flow = if self.enter() {
                self.run(leaf)
            } else {
                Flow::Abort
            };

            self.pop_orientation(comp, c);
            self.max_label = prev_max;
            self.assigned -= 1;
            self.labels[e] = 0;
            self.members[comp].pop();
            self.comp[to] = UNREACHED;
            if flow != Flow::Continue {
                return flow;
            }
        }
        Flow::Continue
    }

    fn stats(&self) -> SearchStats {
        SearchStats {
            nodes: self.meter.nodes,
            max_depth: self.meter.max_depth,
            elapsed: self.meter.start.elapsed(),
        }
    }
}

/// All-pairs BFS distances, when the graph is small enough to tabulate.
fn distance_table(g: &Graph) -> Option<Vec<u16>> {
    let n = g.vertex_count();
    if n == 0 || n > 4096 {
        return None;
    }
    let mut table = vec![u16::MAX; n * n];
    for s in 0..n {
        let d = bfs_distances(g, s).expect("valid vertex");
        for (t, dt) in d.into_iter().enumerate() {
            if let Some(x) = dt {
                table[s * n + t] = x.min(u16::MAX as usize - 1) as u16;
            }
        }
    }
    Some(table)
}

/// Fold over every complete labelling with `property`, in canonical search
/// order. With [`Execution::Parallel`] the search tree is split into
/// subtrees after a short sequential prefix and the per-subtree
/// accumulators are merged left to right, so results match the sequential
/// run exactly.
pub fn enumerate_fold<A, I, L, M>(
    g: &Graph,
    property: Property,
    budget: Budget,
    exec: Execution,
    init: I,
    leaf: L,
    merge: M,
) -> Result<(A, SearchStats), SolverError>
where
    A: Send,
    I: Fn() -> A + Sync + Send,
    L: Fn(&mut A, &CompleteLabelling) + Sync + Send,
    M: Fn(A, A) -> A,
{
    let start = Instant::now();
    let dist = distance_table(g);
    let dist = dist.as_deref();

    if !exec.is_parallel() || g.edge_count() < 8 {
        let mut acc = init();
        let mut engine = Engine::new(g, property, dist, Meter::new(budget, start, None));
        let flow = engine.run(&mut |view| {
            leaf(&mut acc, view);
            ControlFlow::Continue(())
        });
        let stats = engine.stats();
        return match flow {
            Flow::Abort => Err(SolverError::BudgetExhausted(stats)),
            _ => Ok((acc, stats)),
        };
    }

    // grow the split depth until there is enough work to spread
    let target = 4 * rayon_threads();
    let mut split = 1;
    let (tasks, prefix) = loop {
        let mut engine = Engine::new(g, property, dist, Meter::new(budget, start, None));
        engine.split_at = Some(split);
        let flow = engine.run(&mut |_| ControlFlow::Continue(()));
        if flow == Flow::Abort {
            return Err(SolverError::BudgetExhausted(engine.stats()));
        }
        if engine.tasks.len() >= target || split + 1 >= g.edge_count() || engine.tasks.is_empty() {
            let stats = engine.stats();
            break (engine.tasks, stats);
        }
        split += 1;
    };

    let total = AtomicU64::new(prefix.nodes);
    let results = exec::map_slice(exec, &tasks, |task| {
        let mut acc = init();
        let mut engine = Engine::new(g, property, dist, Meter::new(budget, start, Some(&total)));
        engine.replay = Some((task.as_slice(), split));
        let flow = engine.run(&mut |view| {
            leaf(&mut acc, view);
            ControlFlow::Continue(())
        });
        engine.meter.flush();
        (
            acc,
            engine.meter.nodes,
            engine.meter.max_depth,
            flow == Flow::Abort,
        )
    });

    let mut stats = prefix;
    let mut aborted = false;
    let mut acc = init();
    for (a, nodes, depth, abort) in results {
        stats.nodes += nodes;
        stats.max_depth = stats.max_depth.max(depth);
        aborted |= abort;
        acc = merge(acc, a);
    }
    stats.elapsed = start.elapsed();
    if aborted || budget.max_nodes.is_some_and(|m| stats.nodes > m) {
        return Err(SolverError::BudgetExhausted(stats));
    }
    Ok((acc, stats))
}

fn rayon_threads() -> usize {
    #[cfg(feature = "parallel")]
    {
        rayon::current_num_threads()
    }
    #[cfg(not(feature = "parallel"))]
    {
        1
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EnumerationReport {
    /// Canonical complete labellings visited.
    pub count: u64,
    /// How many of them the visitor accepted.
    pub satisfied: u64,
    /// The first rejected labelling in canonical search order.
    pub first_counterexample: Option<EdgeLabelling>,
    pub stats: SearchStats,
}

impl EnumerationReport {
    pub fn violated(&self) -> u64 {
        self.count - self.satisfied
    }

    pub fn all_satisfied(&self) -> bool {
        self.count == self.satisfied
    }
}

type Tally = (u64, u64, Option<EdgeLabelling>);

/// Visit every labelling with `property` exactly once up to renaming.
pub fn enumerate_labellings<V>(
    g: &Graph,
    property: Property,
    budget: Budget,
    exec: Execution,
    visitor: V,
) -> Result<EnumerationReport, SolverError>
where
    V: Fn(&CompleteLabelling) -> bool + Sync + Send,
{
    let ((count, satisfied, first), stats) = enumerate_fold(
        g,
        property,
        budget,
        exec,
        || -> Tally { (0, 0, None) },
        |acc, view| {
            acc.0 += 1;
            if visitor(view) {
                acc.1 += 1;
            } else if acc.2.is_none() {
                acc.2 = Some(view.to_labelling());
            }
        },
        |a, b| (a.0 + b.0, a.1 + b.1, a.2.or(b.2)),
    )?;
    Ok(EnumerationReport {
        count,
        satisfied,
        first_counterexample: first,
        stats,
    })
}

/// [`enumerate_labellings`] for layered labellings with the default
/// execution mode.
pub fn enumerate_layered_labellings<V>(
    g: &Graph,
    budget: Budget,
    visitor: V,
) -> Result<EnumerationReport, SolverError>
where
    V: Fn(&CompleteLabelling) -> bool + Sync + Send,
{
    enumerate_labellings(g, Property::Layered, budget, Execution::default(), visitor)
}

/// First labelling with `property` in canonical search order. Runs
/// single-threaded so statistics are reproducible.
pub fn decide(g: &Graph, property: Property, budget: Budget) -> DecisionResult {
    let start = Instant::now();
    let dist = distance_table(g);
    let mut engine = Engine::new(
        g,
        property,
        dist.as_deref(),
        Meter::new(budget, start, None),
    );
    let mut found = None;
    let flow = engine.run(&mut |view| {
        found = Some(view.to_labelling());
        ControlFlow::Break(())
    });
    let outcome = match (flow, found) {
        (_, Some(chi)) => Outcome::Witness(chi),
        (Flow::Abort, None) => Outcome::BudgetExhausted,
        _ => Outcome::Refuted,
    };
    DecisionResult {
        outcome,
        stats: engine.stats(),
        budget,
    }
}

pub fn decide_layered(g: &Graph, budget: Budget) -> DecisionResult {
    decide(g, Property::Layered, budget)
}

pub fn decide_cubical(g: &Graph, budget: Budget) -> DecisionResult {
    decide(g, Property::Cubical, budget)
}

/// Outcome of checking that every layered labelling of a tree pushes some
/// pair to cube distance at least `t + 2`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SeparationReport {
    pub holds: bool,
    pub labellings: u64,
    pub counterexample: Option<EdgeLabelling>,
    /// Largest pair distance per labelling, tallied.
    pub max_distance_histogram: BTreeMap<usize, u64>,
    pub stats: SearchStats,
}

type SepAcc = (u64, Option<EdgeLabelling>, BTreeMap<usize, u64>);

pub fn verify_separating_condition_ii(
    tree: &Graph,
    pairs: &VertexPairSet,
    t: usize,
    budget: Budget,
) -> Result<SeparationReport, SolverError> {
    verify_separating_condition_ii_with(tree, pairs, t, budget, Execution::default())
}

pub fn verify_separating_condition_ii_with(
    tree: &Graph,
    pairs: &VertexPairSet,
    t: usize,
    budget: Budget,
    exec: Execution,
) -> Result<SeparationReport, SolverError> {
    if !tree.is_tree() {
        return Err(SolverError::NotATree);
    }
    let ((labellings, counterexample, hist), stats) = enumerate_fold(
        tree,
        Property::Layered,
        budget,
        exec,
        || -> SepAcc { (0, None, BTreeMap::new()) },
        |acc, view| {
            acc.0 += 1;
            let far = pairs
                .pairs()
                .iter()
                .map(|&[x, y]| view.distance(x, y).expect("trees are connected"))
                .max()
                .unwrap_or(0);
            *acc.2.entry(far).or_default() += 1;
            if far < t + 2 && acc.1.is_none() {
                acc.1 = Some(view.to_labelling());
            }
        },
        |mut a, b| {
            a.0 += b.0;
            a.1 = a.1.or(b.1);
            for (k, v) in b.2 {
                *a.2.entry(k).or_default() += v;
            }
            a
        },
    )?;
    Ok(SeparationReport {
        holds: counterexample.is_none(),
        labellings,
        counterexample,
        max_distance_histogram: hist,
        stats,
    })
}

/// Draw `count` layered labellings of a tree by randomised canonical
/// search. Sample `i` uses stream `i` of a ChaCha generator seeded with
/// `seed`, so results do not depend on scheduling.
pub fn sample_layered_labellings(
    tree: &Graph,
    count: usize,
    seed: u64,
) -> Result<Vec<EdgeLabelling>, SolverError> {
    sample_layered_labellings_with(tree, count, seed, Execution::default())
}

pub fn sample_layered_labellings_with(
    tree: &Graph,
    count: usize,
    seed: u64,
    exec: Execution,
) -> Result<Vec<EdgeLabelling>, SolverError> {
    if !tree.is_tree() {
        return Err(SolverError::NotATree);
    }
    Ok(exec::map_indices(exec, count, |i| {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(i as u64);
        let mut engine = Engine::new(
            tree,
            Property::Layered,
            None,
            Meter::new(Budget::unlimited(), Instant::now(), None),
        );
        engine.rng = Some(rng);
        let mut found = None;
        engine.run(&mut |view| {
            found = Some(view.to_labelling());
            ControlFlow::Break(())
        });
        found.expect("every tree has a layered labelling")
    }))
}

/// `wanted` paths of exactly `length` edges from `x` to `y`, pairwise
/// sharing only their endpoints. `Err` when more than `max_paths` candidate
/// paths would have to be enumerated.
pub fn find_disjoint_paths(
    g: &Graph,
    x: Vertex,
    y: Vertex,
    length: usize,
    wanted: usize,
    max_paths: usize,
) -> Result<Option<Vec<PathWitness>>, SolverError> {
    g.check_vertex(x)?;
    g.check_vertex(y)?;
    let to_y = bfs_distances(g, y)?;
    let mut paths: Vec<Vec<Vertex>> = Vec::new();
    let mut stack = vec![x];
    let mut on_path = vec![false; g.vertex_count()];
    on_path[x] = true;
    let mut overflow = false;
    collect_paths(
        g,
        y,
        length,
        &to_y,
        &mut stack,
        &mut on_path,
        &mut paths,
        max_paths,
        &mut overflow,
    );
    if overflow {
        return Err(SolverError::BudgetExhausted(SearchStats {
            nodes: max_paths as u64,
            ..SearchStats::default()
        }));
    }
    let interiors: Vec<HashSet<Vertex>> = paths
        .iter()
        .map(|p| p[1..p.len() - 1].iter().copied().collect())
        .collect();
    let mut chosen = Vec::new();
    if pack(&interiors, 0, wanted, &mut chosen) {
        let found = chosen
            .into_iter()
            .map(|i| PathWitness::new(g, paths[i].clone()).expect("enumerated paths are simple"))
            .collect();
        Ok(Some(found))
    } else {
        Ok(None)
    }
}

#[allow(clippy::too_many_arguments)]
fn collect_paths(
    g: &Graph,
    y: Vertex,
    length: usize,
    to_y: &[Option<usize>],
    stack: &mut Vec<Vertex>,
    on_path: &mut [bool],
    out: &mut Vec<Vec<Vertex>>,
    max_paths: usize,
    overflow: &mut bool,
) {
    let here = *stack.last().expect("non-empty");
    let used = stack.len() - 1;
    if here == y {
        if used == length {
            if out.len() == max_paths {
                *overflow = true;
            } else {
                out.push(stack.clone());
            }
        }
        return;
    }
    for &(w, _) in g.neighbors(here) {
        if *overflow {
            return;
        }
        if on_path[w] || to_y[w].is_none_or(|d| used + 1 + d > length) {
            continue;
        }
        on_path[w] = true;
        stack.push(w);
        collect_paths(g, y, length, to_y, stack, on_path, out, max_paths, overflow);
        stack.pop();
        on_path[w] = false;
    }
}

fn pack(
    interiors: &[HashSet<Vertex>],
    from: usize,
    wanted: usize,
    chosen: &mut Vec<usize>,
) -> bool {
    if chosen.len() == wanted {
        return true;
    }
    if interiors.len() - from < wanted - chosen.len() {
        return false;
    }
    for i in from..interiors.len() {
        if chosen
            .iter()
            .all(|&j| interiors[j].is_disjoint(&interiors[i]))
        {
            chosen.push(i);
            if pack(interiors, i + 1, wanted, chosen) {
                return true;
            }
            chosen.pop();
        }
    }
    false
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CertificateDetails {
    pub pairs: usize,
    pub spindle_length: usize,
    pub labellings_checked: u64,
    /// Disjoint paths re-detected per pair (at least `spindle_length + 1`).
    pub paths_per_pair: usize,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Certification {
    Certified(CertificateDetails),
    NotApplicable(String),
    BudgetExhausted(SearchStats),
}

/// Mechanical non-layeredness certificate for a spindle construction.
///
/// Two facts are checked, neither taken from the trace on trust:
/// (a) every layered labelling of the underlying tree puts some pair at
/// cube distance at least `k` (exhaustive search), and (b) every pair is
/// joined in `g` by at least `k + 1` internally disjoint paths of length
/// `k`. In a layer embedding such a pair would need `k + 1` distinct first
/// directions out of only `k`, so `g` is not layered.
pub fn certify_not_layered(
    g: &Graph,
    trace: Option<&ConstructionTrace>,
    budget: Budget,
) -> Certification {
    let Some(trace) = trace else {
        return Certification::NotApplicable("no construction trace".into());
    };
    if trace.expansion_rounds > 0 {
        return Certification::NotApplicable(format!(
            "the tree stage has {} vertices after {} expansion round(s); exhaustive labelling search is only feasible on the base tree",
            trace.tree_vertex_count, trace.expansion_rounds
        ));
    }
    let k = trace.k;
    if trace.t + 2 != k {
        return Certification::NotApplicable(format!(
            "trace has t = {} but spindle length {k}",
            trace.t
        ));
    }
    let tree = g.vertex_prefix(trace.tree_vertex_count);
    if !tree.is_tree() {
        return Certification::NotApplicable(
            "the traced vertex prefix is not a tree in this graph".into(),
        );
    }
    let pairs = match VertexPairSet::new(&tree, trace.pairs.iter().map(|&[x, y]| (x, y))) {
        Ok(p) => p,
        Err(e) => return Certification::NotApplicable(format!("bad pair list: {e}")),
    };
    let report = match verify_separating_condition_ii(&tree, &pairs, k - 2, budget) {
        Ok(r) => r,
        Err(SolverError::BudgetExhausted(stats)) => return Certification::BudgetExhausted(stats),
        Err(e) => return Certification::NotApplicable(e.to_string()),
    };
    if !report.holds {
        return Certification::NotApplicable(format!(
            "some layered labelling of the tree keeps every pair closer than {k}"
        ));
    }
    let mut min_found = usize::MAX;
    for &[x, y] in pairs.pairs() {
        match find_disjoint_paths(g, x, y, k, k + 1, 1 << 20) {
            Ok(Some(paths)) => min_found = min_found.min(paths.len()),
            Ok(None) => {
                return Certification::NotApplicable(format!(
                    "fewer than {} disjoint paths of length {k} join {x} and {y}",
                    k + 1
                ))
            }
            Err(SolverError::BudgetExhausted(stats)) => {
                return Certification::BudgetExhausted(stats)
            }
            Err(e) => return Certification::NotApplicable(e.to_string()),
        }
    }
    Certification::Certified(CertificateDetails {
        pairs: pairs.len(),
        spindle_length: k,
        labellings_checked: report.labellings,
        paths_per_pair: min_found,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::brute;
    use crate::labelling::{verify_cubical, verify_layered};

    fn small() -> Budget {
        Budget::nodes(1_000_000)
    }

    #[test]
    fn decides_small_examples() {
        assert_eq!(
            decide_layered(&Graph::cycle(4), small()).outcome,
            Outcome::Refuted
        );
        assert_eq!(
            decide_cubical(&Graph::cycle(3), small()).outcome,
            Outcome::Refuted
        );
        assert_eq!(
            decide_cubical(&Graph::complete_bipartite(2, 3), small()).outcome,
            Outcome::Refuted
        );
        match decide_cubical(&Graph::cycle(4), small()).outcome {
            Outcome::Witness(chi) => assert_eq!(chi.labels(), &[1, 2, 1, 2]),
            other => panic!("unexpected {other:?}"),
        }
        let p6 = Graph::path(6);
        match decide_layered(&p6, small()).outcome {
            Outcome::Witness(chi) => assert!(verify_layered(&p6, &chi).is_ok()),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn counts_match_naive_enumeration() {
        for g in brute::connected_graphs(5) {
            for property in [Property::Cubical, Property::Layered] {
                let report = enumerate_labellings(
                    &g,
                    property,
                    Budget::unlimited(),
                    Execution::Sequential,
                    |_| true,
                )
                .unwrap();
                assert_eq!(
                    report.count,
                    brute::naive_count(&g, property),
                    "{g:?} {property:?}"
                );
            }
        }
        let edge =
            enumerate_layered_labellings(&Graph::path(1), Budget::unlimited(), |_| true).unwrap();
        assert_eq!(edge.count, 1);
    }

    #[test]
    fn enumerated_labellings_verify() {
        let g = Graph::new(6, [(0, 1), (1, 2), (2, 3), (3, 0), (3, 4), (4, 5)]).unwrap();
        let cub = enumerate_labellings(
            &g,
            Property::Cubical,
            Budget::unlimited(),
            Execution::Sequential,
            |v| verify_cubical(&g, &v.to_labelling()).is_ok(),
        )
        .unwrap();
        assert!(cub.count > 0 && cub.all_satisfied());
        let lay = enumerate_labellings(
            &g,
            Property::Layered,
            Budget::unlimited(),
            Execution::Sequential,
            |v| verify_layered(&g, &v.to_labelling()).is_ok(),
        )
        .unwrap();
        assert!(lay.all_satisfied());
    }

    #[test]
    fn parallel_matches_sequential() {
        let tree = Graph::path(9);
        let run = |exec| {
            enumerate_labellings(&tree, Property::Layered, Budget::unlimited(), exec, |v| {
                v.distance(0, 9).unwrap() > 3
            })
            .unwrap()
        };
        let (a, b) = (run(Execution::Sequential), run(Execution::Parallel));
        assert_eq!(
            (a.count, a.satisfied, &a.first_counterexample),
            (b.count, b.satisfied, &b.first_counterexample)
        );
        assert_eq!(a.stats.nodes, b.stats.nodes);
    }

    #[test]
    fn budget_is_reported() {
        let r = decide_layered(&Graph::path(6), Budget::nodes(2));
        assert_eq!(r.outcome, Outcome::BudgetExhausted);
        let e = enumerate_labellings(
            &Graph::path(9),
            Property::Layered,
            Budget::nodes(10),
            Execution::Parallel,
            |_| true,
        );
        assert!(matches!(e, Err(SolverError::BudgetExhausted(_))));
    }

    #[test]
    fn separation_examples() {
        let edge = Graph::path(1);
        let pairs = VertexPairSet::new(&edge, [(0, 1)]).unwrap();
        let r = verify_separating_condition_ii(&edge, &pairs, 1, Budget::unlimited()).unwrap();
        assert!(!r.holds);
        assert_eq!(r.max_distance_histogram.get(&1), Some(&1));
        assert_eq!(
            verify_separating_condition_ii(
                &Graph::cycle(4),
                &VertexPairSet::default(),
                2,
                Budget::unlimited()
            ),
            Err(SolverError::NotATree)
        );
    }

    #[test]
    fn sampling_is_deterministic_and_valid() {
        let p6 = Graph::path(6);
        assert!(sample_layered_labellings(&p6, 0, 1).unwrap().is_empty());
        let a = sample_layered_labellings_with(&p6, 20, 7, Execution::Sequential).unwrap();
        let b = sample_layered_labellings_with(&p6, 20, 7, Execution::Parallel).unwrap();
        assert_eq!(a, b);
        assert!(a.iter().all(|chi| verify_layered(&p6, chi).is_ok()));
        assert!(a.iter().collect::<HashSet<_>>().len() > 1);
    }

    #[test]
    fn disjoint_paths_in_theta_graph() {
        // three internally disjoint paths of length 2 between 0 and 1
        let g = Graph::new(5, [(0, 2), (2, 1), (0, 3), (3, 1), (0, 4), (4, 1)]).unwrap();
        assert_eq!(
            find_disjoint_paths(&g, 0, 1, 2, 3, 100)
                .unwrap()
                .map(|p| p.len()),
            Some(3)
        );
        assert!(find_disjoint_paths(&g, 0, 1, 2, 4, 100).unwrap().is_none());
        assert!(find_disjoint_paths(&g, 0, 1, 2, 3, 2).is_err());
    }

    #[test]
    fn certify_without_trace() {
        assert!(matches!(
            certify_not_layered(&Graph::cycle(4), None, Budget::unlimited()),
            Certification::NotApplicable(_)
        ));
    }
}
