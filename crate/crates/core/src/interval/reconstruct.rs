//! Multi-pass reconstruction of proper interval graphs.
//!
//! The recursion picks a middle vertex, splits the graph into its closed
//! neighbourhood `M` and the (at most two) components `L`, `R` left behind,
//! recurses on `L` and `R`, and stitches the three endpoint orders together.
//! Every candidate model is checked against the stream before it is returned,
//! so an accepted model is always exact.
//!
//! Each recursive call is an `async` task that asks for stream passes. A small
//! driver collects the requests of all live tasks, serves them with one shared
//! physical pass, and resumes the tasks. Sibling calls on `L` and `R`, and the
//! calls on different components, therefore never cost extra passes.

use std::collections::{BinaryHeap, HashMap};
use std::future::Future;
use std::pin::Pin;
use std::sync::{Arc, Mutex};
use std::task::{Context, Poll, Waker};

use rand::Rng as _;

use super::order::{Endpoint, IntervalOrder};
use crate::graph::{Graph, VertexSet};
use crate::sketch::{ConnectivitySketch, DEFAULT_C};
use crate::stream::{Replay, SpaceBound, Stream, StreamConsumer, StreamError, StreamEvent};
use crate::util::{rng_for, splitmix64};

#[derive(Debug, thiserror::Error, Clone, PartialEq, Eq)]
pub enum PivError {
    #[error("not a proper interval graph ({0})")]
    NoInstance(&'static str),
    #[error("removing a closed neighbourhood left {0} components")]
    MoreThanTwoComponents(usize),
    #[error("no middle vertex found in {0} attempts")]
    Failure(usize),
    #[error(transparent)]
    Stream(#[from] StreamError),
}

impl PivError {
    /// The input was shown not to be a proper interval graph.
    pub fn is_negative(&self) -> bool {
        matches!(self, PivError::NoInstance(_) | PivError::MoreThanTwoComponents(_))
    }
}

/// Default number of middle-vertex attempts: `ceil(log5(n^2))`, at least one.
pub fn default_attempts(n: usize) -> usize {
    let n = n.max(2) as f64;
    ((n * n).ln() / 5f64.ln()).ceil().max(1.0) as usize
}

/// Pass bound `ceil(5 s log_{10/9} n)` for `n >= 2`.
pub fn pass_bound(n: usize, s: usize) -> usize {
    if n < 2 {
        return 1;
    }
    (5.0 * s as f64 * (n as f64).ln() / (10.0f64 / 9.0).ln()).ceil() as usize
}

/// A strict partial order on `0..n`, stored transitively closed.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PartialOrder {
    succ: Vec<VertexSet>,
}

impl PartialOrder {
    pub fn empty(n: usize) -> Self {
        Self { succ: (0..n).map(|_| VertexSet::new(n)).collect() }
    }

    /// Closure of the given pairs; `None` when they contain a cycle.
    pub fn from_pairs(n: usize, pairs: impl IntoIterator<Item = (usize, usize)>) -> Option<Self> {
        let mut po = Self::empty(n);
        for (u, v) in pairs {
            po.succ[u].insert(v);
        }
        po.close()
    }

    pub fn n(&self) -> usize {
        self.succ.len()
    }

    #[inline]
    pub fn less(&self, u: usize, v: usize) -> bool {
        self.succ[u].contains(v)
    }

    pub fn pairs(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.succ.iter().enumerate().flat_map(|(u, s)| s.iter().map(move |v| (u, v)))
    }

    fn close(mut self) -> Option<Self> {
        let n = self.n();
        for k in 0..n {
            for i in 0..n {
                if self.succ[i].contains(k) {
                    let via = self.succ[k].clone();
                    self.succ[i].union_with(&via);
                }
            }
        }
        (0..n).all(|v| !self.succ[v].contains(v)).then_some(self)
    }

    /// The order induced on `keep` (positions into this order), renumbered `0..keep.len()`.
    pub fn restrict(&self, keep: &[usize]) -> Self {
        let m = keep.len();
        let succ = keep
            .iter()
            .map(|&u| VertexSet::from_iter_cap(m, (0..m).filter(|&j| self.succ[u].contains(keep[j]))))
            .collect();
        Self { succ }
    }

    /// Adds `u < v` whenever `key[u] < key[v]`; `None` on a conflict.
    pub fn refine_by_key(&self, key: &[i64]) -> Option<Self> {
        let n = self.n();
        let mut po = self.clone();
        for u in 0..n {
            for v in 0..n {
                if key[u] < key[v] {
                    po.succ[u].insert(v);
                }
            }
        }
        po.close()
    }

    pub fn words(&self) -> usize {
        self.n() * self.n().div_ceil(64)
    }
}

/// Middle-vertex test on an explicit connected graph: every component of
/// `G - N[v]` has at most `9n/10` vertices.
pub fn is_middle_vertex(g: &Graph, v: usize) -> Result<bool, PivError> {
    let (rest, _) = g.delete(&g.closed_neighbors(v));
    let comps = rest.component_sets();
    if comps.len() > 2 {
        return Err(PivError::MoreThanTwoComponents(comps.len()));
    }
    Ok(comps.iter().all(|c| 10 * c.len() <= 9 * g.n()))
}

// ---------------------------------------------------------------------------
// Pass requests

/// One unit of work that needs a pass. Member lists are sorted and hold ids
/// local to the reconstructor.
enum Work {
    Neighbors { members: Arc<Vec<u32>>, center: u32, count: Vec<i64> },
    Components { members: Vec<u32>, sketch: ConnectivitySketch },
    Degrees { members: Arc<Vec<u32>>, side: Vec<u8>, deg: Vec<[i64; 3]> },
    Model { members: Arc<Vec<u32>>, order: IntervalOrder, deg: Vec<i64>, stray: i64 },
}

impl Work {
    fn on_event(&mut self, a: u32, b: u32, sign: i64) {
        match self {
            Work::Neighbors { members, center, count } => {
                let other = if a == *center {
                    b
                } else if b == *center {
                    a
                } else {
                    return;
                };
                if members.binary_search(center).is_ok() {
                    if let Ok(i) = members.binary_search(&other) {
                        count[i] += sign;
                    }
                }
            }
            Work::Components { members, sketch } => {
                if let (Ok(i), Ok(j)) = (members.binary_search(&a), members.binary_search(&b)) {
                    sketch.update(i, j, sign);
                }
            }
            Work::Degrees { members, side, deg } => {
                if let (Ok(i), Ok(j)) = (members.binary_search(&a), members.binary_search(&b)) {
                    deg[i][side[j] as usize] += sign;
                    deg[j][side[i] as usize] += sign;
                }
            }
            Work::Model { members, order, deg, stray } => {
                if let (Ok(i), Ok(j)) = (members.binary_search(&a), members.binary_search(&b)) {
                    deg[i] += sign;
                    deg[j] += sign;
                    if !order.has_edge(i, j) {
                        *stray += sign;
                    }
                }
            }
        }
    }

    fn words(&self) -> usize {
        match self {
            Work::Neighbors { count, .. } => 1 + count.len(),
            Work::Components { members, sketch } => members.len() + sketch.words(),
            Work::Degrees { side, deg, .. } => side.len() + 3 * deg.len(),
            Work::Model { order, deg, .. } => 1 + order.words() + deg.len(),
        }
    }
}

#[derive(Default)]
struct HubState {
    next: u64,
    pending: Vec<(u64, Work)>,
    done: HashMap<u64, Work>,
    /// Words held by suspended recursive calls between passes.
    held: usize,
}

#[derive(Clone, Default)]
struct Hub(Arc<Mutex<HubState>>);

impl Hub {
    fn lock(&self) -> std::sync::MutexGuard<'_, HubState> {
        self.0.lock().expect("hub poisoned")
    }

    fn request(&self, work: Work) -> Ticket {
        let mut st = self.lock();
        let id = st.next;
        st.next += 1;
        st.pending.push((id, work));
        Ticket { hub: self.clone(), id }
    }

    fn hold(&self, words: usize) -> HoldGuard {
        self.lock().held += words;
        HoldGuard { hub: self.clone(), words }
    }
}

struct HoldGuard {
    hub: Hub,
    words: usize,
}

impl Drop for HoldGuard {
    fn drop(&mut self) {
        if let Ok(mut st) = self.hub.0.lock() {
            st.held -= self.words;
        }
    }
}

/// Resolves to the work item once a pass has been served.
struct Ticket {
    hub: Hub,
    id: u64,
}

impl Future for Ticket {
    type Output = Work;

    fn poll(self: Pin<&mut Self>, _cx: &mut Context<'_>) -> Poll<Work> {
        match self.hub.lock().done.remove(&self.id) {
            Some(w) => Poll::Ready(w),
            None => Poll::Pending,
        }
    }
}

type Task<T> = Pin<Box<dyn Future<Output = T> + Send>>;

async fn join2<A, B>(a: A, b: B) -> (A::Output, B::Output)
where
    A: Future,
    B: Future,
{
    let (mut a, mut b) = (Box::pin(a), Box::pin(b));
    let (mut ra, mut rb) = (None, None);
    std::future::poll_fn(move |cx| {
        if ra.is_none() {
            if let Poll::Ready(x) = a.as_mut().poll(cx) {
                ra = Some(x);
            }
        }
        if rb.is_none() {
            if let Poll::Ready(x) = b.as_mut().poll(cx) {
                rb = Some(x);
            }
        }
        match (ra.is_some(), rb.is_some()) {
            (true, true) => Poll::Ready((ra.take().unwrap(), rb.take().unwrap())),
            _ => Poll::Pending,
        }
    })
    .await
}

async fn join_all<T>(tasks: Vec<Task<T>>) -> Vec<T> {
    let mut tasks: Vec<Option<Task<T>>> = tasks.into_iter().map(Some).collect();
    let mut out: Vec<Option<T>> = tasks.iter().map(|_| None).collect();
    std::future::poll_fn(move |cx| {
        for (slot, res) in tasks.iter_mut().zip(out.iter_mut()) {
            if let Some(t) = slot {
                if let Poll::Ready(x) = t.as_mut().poll(cx) {
                    *res = Some(x);
                    *slot = None;
                }
            }
        }
        if out.iter().all(Option::is_some) {
            Poll::Ready(out.iter_mut().map(|x| x.take().unwrap()).collect())
        } else {
            Poll::Pending
        }
    })
    .await
}

// ---------------------------------------------------------------------------
// Pass helpers

async fn neighbours(hub: &Hub, members: &Arc<Vec<u32>>, center: usize) -> VertexSet {
    let count = vec![0; members.len()];
    let w = hub.request(Work::Neighbors { members: members.clone(), center: members[center], count }).await;
    let Work::Neighbors { count, .. } = w else { unreachable!() };
    VertexSet::from_iter_cap(members.len(), (0..count.len()).filter(|&i| count[i] > 0))
}

/// Components of the subgraph induced by `subset` (sorted positions into `members`),
/// as sorted position lists; `None` when the sketch fails.
async fn components(hub: &Hub, members: &[u32], subset: &[usize], seed: u64) -> Option<Vec<Vec<usize>>> {
    let local: Vec<u32> = subset.iter().map(|&i| members[i]).collect();
    let sketch = ConnectivitySketch::new(local.len(), DEFAULT_C, seed);
    let w = hub.request(Work::Components { members: local, sketch }).await;
    let Work::Components { sketch, .. } = w else { unreachable!() };
    let labels = sketch.component_labels().ok()?;
    let mut groups: HashMap<usize, Vec<usize>> = HashMap::new();
    for (j, l) in labels.into_iter().enumerate() {
        groups.entry(l).or_default().push(subset[j]);
    }
    let mut comps: Vec<Vec<usize>> = groups.into_values().collect();
    comps.sort_unstable();
    Some(comps)
}

async fn model_matches(hub: &Hub, members: &Arc<Vec<u32>>, order: &IntervalOrder) -> bool {
    let work = Work::Model { members: members.clone(), order: order.clone(), deg: vec![0; members.len()], stray: 0 };
    let Work::Model { order, deg, stray, .. } = hub.request(work).await else { unreachable!() };
    stray == 0 && deg.iter().zip(order.degrees()).all(|(&d, e)| d == e as i64)
}

// ---------------------------------------------------------------------------
// The recursive step

#[derive(Clone, Copy)]
struct Params {
    attempts: usize,
}

const LEFT: u8 = 0;
const MID: u8 = 1;
const RIGHT: u8 = 2;

/// Reconstructs `G[members]` (connected) under the partial order `ord` on positions.
fn step(hub: Hub, params: Params, members: Arc<Vec<u32>>, ord: PartialOrder, seed: u64) -> Task<Result<IntervalOrder, PivError>> {
    Box::pin(async move {
        let n = members.len();
        match n {
            0 => return Ok(IntervalOrder::empty()),
            1 => return Ok(IntervalOrder::new(1, vec![Endpoint::Begin(0), Endpoint::End(0)]).expect("single interval")),
            _ => {}
        }
        let _held = hub.hold(2 * n + ord.words());
        let mut rng = rng_for(seed, 0x51de);

        // Step 1: look for a middle vertex.
        let mut found = None;
        for attempt in 0..params.attempts {
            let v = rng.random_range(0..n);
            let mut closed = neighbours(&hub, &members, v).await;
            closed.insert(v);
            let rest: Vec<usize> = (0..n).filter(|&u| !closed.contains(u)).collect();
            let comps = if rest.is_empty() {
                Vec::new()
            } else {
                match components(&hub, &members, &rest, splitmix64(seed ^ (attempt as u64) << 20)).await {
                    Some(c) => c,
                    None => continue,
                }
            };
            if comps.len() > 2 {
                return Err(PivError::MoreThanTwoComponents(comps.len()));
            }
            if comps.iter().all(|c| 10 * c.len() <= 9 * n) {
                found = Some((v, closed, comps));
                break;
            }
        }
        let Some((vstar, mid, mut comps)) = found else {
            return Err(PivError::Failure(params.attempts));
        };

        // Step 3: name the components so that the order runs from L through M to R.
        comps.resize(2, Vec::new());
        let mut side = vec![MID; n];
        let fits = |l: &[usize], r: &[usize], side: &mut Vec<u8>| {
            side.iter_mut().for_each(|s| *s = MID);
            l.iter().for_each(|&u| side[u] = LEFT);
            r.iter().for_each(|&u| side[u] = RIGHT);
            ord.pairs().all(|(u, w)| side[u] == LEFT || side[w] == RIGHT || (side[u] == MID && side[w] == MID))
        };
        let (l, r) = if fits(&comps[0], &comps[1], &mut side) {
            (comps[0].clone(), comps[1].clone())
        } else if fits(&comps[1], &comps[0], &mut side) {
            (comps[1].clone(), comps[0].clone())
        } else {
            return Err(PivError::NoInstance("left and right parts conflict with the order"));
        };
        let m: Vec<usize> = mid.iter().collect();

        // Step 4: neighbours in L, M and R.
        let w = hub
            .request(Work::Degrees { members: members.clone(), side: side.clone(), deg: vec![[0; 3]; n] })
            .await;
        let Work::Degrees { deg, .. } = w else { unreachable!() };
        let dl = |u: usize| deg[u][LEFT as usize];
        let dm = |u: usize| deg[u][MID as usize];
        let dr = |u: usize| deg[u][RIGHT as usize];

        // Step 5: the leftmost vertex `a` of M.
        let a = if !l.is_empty() {
            let a = choose_a_with_left(&m, &ord, dl, dm)?;
            let na = neighbours(&hub, &members, a).await;
            choose_b(&m, &na, a, &ord, dr, dm)?;
            with_closed(na, a)
        } else if !r.is_empty() {
            let b = pick(&maximal(&m, &ord, dr, true), |u| dm(u))
                .ok_or(PivError::NoInstance("no rightmost candidate in the middle"))?;
            let mut nb = neighbours(&hub, &members, b).await;
            nb.insert(b);
            let away: Vec<usize> = m.iter().copied().filter(|&u| !nb.contains(u)).collect();
            if away.is_empty() {
                // M is a clique, so every member is adjacent to the leftmost one.
                pick(&extremal(&m, &ord, false), |u| dr(u))
                    .ok_or(PivError::NoInstance("no leftmost candidate in the middle"))?;
                nb
            } else {
                let a = pick(&extremal(&away, &ord, false), |u| dm(u))
                    .ok_or(PivError::NoInstance("no leftmost candidate in the middle"))?;
                with_closed(neighbours(&hub, &members, a).await, a)
            }
        } else {
            let a = pick(&extremal(&m, &ord, false), |u| dm(u))
                .ok_or(PivError::NoInstance("no leftmost candidate in the middle"))?;
            let na = neighbours(&hub, &members, a).await;
            choose_b(&m, &na, a, &ord, dr, dm)?;
            with_closed(na, a)
        };

        // Step 6: recurse on L and R in shared passes.
        let sub = |part: &[usize], sign: i64| -> Result<(Arc<Vec<u32>>, PartialOrder), PivError> {
            let key: Vec<i64> = part.iter().map(|&u| sign * dm(u)).collect();
            let po = ord.restrict(part).refine_by_key(&key).ok_or(PivError::NoInstance("refined order has a cycle"))?;
            Ok((Arc::new(part.iter().map(|&u| members[u]).collect()), po))
        };
        let (ml, ol) = sub(&l, 1)?;
        let (mr, or) = sub(&r, -1)?;
        let left = step(hub.clone(), params, ml, ol, splitmix64(seed ^ 0x1ef7));
        let right = step(hub.clone(), params, mr, or, splitmix64(seed ^ 0x61487));
        let (perm_l, perm_r) = join2(left, right).await;
        let (perm_l, perm_r) = (perm_l?, perm_r?);

        // Step 7: order the beginnings inside M.
        let m_seq = order_middle(&m, &ord, &a, dl, dm, dr)?;

        // Steps 8-11: place every ending between two beginnings.
        let mut begin_seq: Vec<usize> = perm_l.begin_sequence().into_iter().map(|i| l[i]).collect();
        begin_seq.extend(&m_seq);
        begin_seq.extend(perm_r.begin_sequence().into_iter().map(|i| r[i]));
        let mut pos = vec![0usize; n];
        for (p, &u) in begin_seq.iter().enumerate() {
            pos[u] = p;
        }
        let (nl, nm) = (l.len(), m.len());
        let mut gap = vec![0usize; n];
        for (i, g) in begins_before_end(&perm_l).into_iter().enumerate() {
            let u = l[i];
            gap[u] = if dm(u) == 0 { g } else { nl + dm(u) as usize };
        }
        for (i, g) in begins_before_end(&perm_r).into_iter().enumerate() {
            gap[r[i]] = nl + nm + g;
        }
        for &u in &m {
            gap[u] = if dr(u) > 0 {
                nl + nm + dr(u) as usize
            } else if pos[u] > pos[vstar] {
                nl + nm
            } else {
                nl + dm(u) as usize + 1
            };
        }
        if (0..n).any(|u| gap[u] <= pos[u] || gap[u] > n) {
            return Err(PivError::NoInstance("an interval ends before it begins"));
        }
        let mut by_gap: Vec<Vec<usize>> = vec![Vec::new(); n + 1];
        for &u in &begin_seq {
            by_gap[gap[u]].push(u);
        }
        let mut tokens = Vec::with_capacity(2 * n);
        for (g, ends) in by_gap.into_iter().enumerate() {
            tokens.extend(ends.into_iter().map(Endpoint::End));
            if g < n {
                tokens.push(Endpoint::Begin(begin_seq[g]));
            }
        }
        let order = IntervalOrder::new(n, tokens).expect("every vertex placed once");

        // Step 12: no containment, and the model respects the order.
        if !order.is_proper() {
            return Err(PivError::NoInstance("constructed model has a nested interval"));
        }
        if ord.pairs().any(|(u, w)| pos[u] > pos[w]) {
            return Err(PivError::NoInstance("constructed model violates the order"));
        }

        // Step 13: compare with the stream.
        if !model_matches(&hub, &members, &order).await {
            return Err(PivError::NoInstance("model disagrees with the stream"));
        }
        Ok(order)
    })
}

fn with_closed(mut set: VertexSet, v: usize) -> VertexSet {
    set.insert(v);
    set
}

/// Candidates in `pool` that are minimal (or maximal) under `ord` within `pool`.
fn extremal(pool: &[usize], ord: &PartialOrder, largest: bool) -> Vec<usize> {
    pool.iter()
        .copied()
        .filter(|&u| !pool.iter().any(|&w| if largest { ord.less(u, w) } else { ord.less(w, u) }))
        .collect()
}

/// Vertices of `pool` with the largest `score` that are also extremal in `pool`.
fn maximal(pool: &[usize], ord: &PartialOrder, score: impl Fn(usize) -> i64, largest: bool) -> Vec<usize> {
    let Some(best) = pool.iter().map(|&u| score(u)).max() else {
        return Vec::new();
    };
    extremal(pool, ord, largest).into_iter().filter(|&u| score(u) == best).collect()
}

/// Lowest-index vertex minimising `key`.
fn pick(cands: &[usize], key: impl Fn(usize) -> i64) -> Option<usize> {
    cands.iter().copied().min_by_key(|&u| (key(u), u))
}

fn choose_a_with_left(
    m: &[usize],
    ord: &PartialOrder,
    dl: impl Fn(usize) -> i64,
    dm: impl Fn(usize) -> i64,
) -> Result<usize, PivError> {
    pick(&maximal(m, ord, dl, false), dm).ok_or(PivError::NoInstance("no leftmost candidate in the middle"))
}

/// The rightmost vertex of M. Only its existence matters afterwards.
fn choose_b(
    m: &[usize],
    na: &VertexSet,
    a: usize,
    ord: &PartialOrder,
    dr: impl Fn(usize) -> i64 + Copy,
    dm: impl Fn(usize) -> i64,
) -> Result<usize, PivError> {
    let away: Vec<usize> = m.iter().copied().filter(|&u| u != a && !na.contains(u)).collect();
    let b = if away.is_empty() { pick(&maximal(m, ord, dr, true), |_| 0) } else { pick(&maximal(&away, ord, dr, true), dm) };
    b.ok_or(PivError::NoInstance("no rightmost candidate in the middle"))
}

/// Topological order of M under the input order and the degree rules.
fn order_middle(
    m: &[usize],
    ord: &PartialOrder,
    near_a: &VertexSet,
    dl: impl Fn(usize) -> i64,
    dm: impl Fn(usize) -> i64,
    dr: impl Fn(usize) -> i64,
) -> Result<Vec<usize>, PivError> {
    let k = m.len();
    let before = |u: usize, v: usize| {
        let (iu, iv) = (near_a.contains(u), near_a.contains(v));
        ord.less(u, v)
            || dl(u) > dl(v)
            || dr(u) < dr(v)
            || (iu && iv && dm(u) < dm(v))
            || (!iu && !iv && dm(u) > dm(v))
            || (iu && !iv)
    };
    let mut indeg = vec![0usize; k];
    let mut out: Vec<Vec<usize>> = vec![Vec::new(); k];
    for i in 0..k {
        for j in 0..k {
            if i != j && before(m[i], m[j]) {
                out[i].push(j);
                indeg[j] += 1;
            }
        }
    }
    let mut heap: BinaryHeap<std::cmp::Reverse<(usize, usize)>> =
        (0..k).filter(|&i| indeg[i] == 0).map(|i| std::cmp::Reverse((m[i], i))).collect();
    let mut seq = Vec::with_capacity(k);
    while let Some(std::cmp::Reverse((_, i))) = heap.pop() {
        seq.push(m[i]);
        for &j in &out[i] {
            indeg[j] -= 1;
            if indeg[j] == 0 {
                heap.push(std::cmp::Reverse((m[j], j)));
            }
        }
    }
    if seq.len() < k {
        return Err(PivError::NoInstance("middle ordering rules conflict"));
    }
    Ok(seq)
}

/// For each vertex, the number of beginnings that precede its ending.
fn begins_before_end(order: &IntervalOrder) -> Vec<usize> {
    let mut out = vec![0; order.n()];
    let mut seen = 0;
    for t in order.tokens() {
        match *t {
            Endpoint::Begin(_) => seen += 1,
            Endpoint::End(v) => out[v] = seen,
        }
    }
    out
}

/// Reconstructs every component with a shared pass schedule, then concatenates.
fn root(hub: Hub, params: Params, n: usize, seed: u64) -> Task<Result<IntervalOrder, PivError>> {
    Box::pin(async move {
        if n <= 1 {
            return Ok(if n == 0 {
                IntervalOrder::empty()
            } else {
                IntervalOrder::new(1, vec![Endpoint::Begin(0), Endpoint::End(0)]).expect("single interval")
            });
        }
        let all: Vec<u32> = (0..n as u32).collect();
        let every: Vec<usize> = (0..n).collect();
        let comps = components(&hub, &all, &every, splitmix64(seed ^ 0xc0c0))
            .await
            .ok_or(PivError::Failure(1))?;
        let tasks: Vec<Task<Result<IntervalOrder, PivError>>> = comps
            .iter()
            .enumerate()
            .map(|(i, c)| {
                let members = Arc::new(c.iter().map(|&u| u as u32).collect::<Vec<u32>>());
                let ord = PartialOrder::empty(c.len());
                step(hub.clone(), params, members, ord, splitmix64(seed ^ (i as u64 + 1) << 32))
            })
            .collect();
        let parts = join_all(tasks).await;
        let mut tokens = Vec::with_capacity(2 * n);
        for (c, part) in comps.iter().zip(parts) {
            tokens.extend(part?.relabel(c, n));
        }
        let order = IntervalOrder::new(n, tokens).expect("components partition the vertices");
        if comps.len() > 1 && !model_matches(&hub, &Arc::new(all), &order).await {
            return Err(PivError::NoInstance("model disagrees with the stream"));
        }
        Ok(order)
    })
}

// ---------------------------------------------------------------------------
// Stream consumer

/// Runs the reconstruction on the subgraph induced by `members` as one
/// stream consumer. Call [`PivReconstructor::end_pass`] after every pass
/// until [`PivReconstructor::finished`] holds.
pub struct PivReconstructor {
    id: usize,
    members: Vec<u32>,
    hub: Hub,
    root: Option<Task<Result<IntervalOrder, PivError>>>,
    active: Vec<(u64, Work)>,
    outcome: Option<Result<IntervalOrder, PivError>>,
    budget: usize,
    passes: usize,
}

impl PivReconstructor {
    /// `members` are sorted global vertex ids; `attempts` is the middle-vertex retry count.
    pub fn new(id: usize, members: Vec<u32>, attempts: usize, seed: u64) -> Self {
        debug_assert!(members.windows(2).all(|w| w[0] < w[1]));
        let hub = Hub::default();
        let n = members.len();
        let params = Params { attempts: attempts.max(1) };
        let mut me = Self {
            id,
            root: Some(root(hub.clone(), params, n, seed)),
            hub,
            members,
            active: Vec::new(),
            outcome: None,
            budget: pass_bound(n, attempts.max(1)),
            passes: 0,
        };
        me.advance();
        me
    }

    fn advance(&mut self) {
        let Some(task) = self.root.as_mut() else { return };
        let mut cx = Context::from_waker(Waker::noop());
        match task.as_mut().poll(&mut cx) {
            Poll::Ready(res) => {
                self.outcome = Some(res);
                self.root = None;
            }
            Poll::Pending => {
                self.active = std::mem::take(&mut self.hub.lock().pending);
                debug_assert!(!self.active.is_empty(), "suspended without a pass request");
            }
        }
    }

    /// Hands the finished pass to the waiting calls and collects the next requests.
    pub fn end_pass(&mut self) {
        if self.root.is_none() {
            return;
        }
        self.passes += 1;
        {
            let mut st = self.hub.lock();
            st.done.extend(self.active.drain(..));
        }
        if self.passes > self.budget {
            self.root = None;
            self.outcome = Some(Err(PivError::Stream(StreamError::PassBudgetExceeded {
                consumer: self.label(),
                pass: self.passes,
                budget: self.budget,
            })));
            return;
        }
        self.advance();
    }

    pub fn finished(&self) -> bool {
        self.outcome.is_some()
    }

    pub fn passes_used(&self) -> usize {
        self.passes
    }

    pub fn members(&self) -> &[u32] {
        &self.members
    }

    /// The model over positions in `members`, once finished.
    pub fn outcome(&self) -> Option<&Result<IntervalOrder, PivError>> {
        self.outcome.as_ref()
    }

    pub fn into_outcome(self) -> Option<Result<IntervalOrder, PivError>> {
        self.outcome
    }
}

impl std::fmt::Debug for PivReconstructor {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("PivReconstructor").field("members", &self.members()).finish_non_exhaustive()
    }
}

impl StreamConsumer for PivReconstructor {
    fn label(&self) -> String {
        format!("piv#{}", self.id)
    }

    fn pass_budget(&self) -> usize {
        self.budget
    }

    fn on_event(&mut self, _pass: usize, ev: &StreamEvent) {
        if self.active.is_empty() {
            return;
        }
        let (Ok(a), Ok(b)) = (self.members.binary_search(&ev.u), self.members.binary_search(&ev.v)) else {
            return;
        };
        let sign = ev.sign();
        for (_, w) in &mut self.active {
            w.on_event(a as u32, b as u32, sign);
        }
    }

    fn words(&self) -> usize {
        let held = self.hub.0.lock().map(|s| s.held).unwrap_or(0);
        self.members.len() + held + self.active.iter().map(|(_, w)| 1 + w.words()).sum::<usize>()
    }

    fn space_bound(&self) -> Option<SpaceBound> {
        None
    }
}

/// Result of a standalone reconstruction run.
#[derive(Clone, Debug)]
pub struct PivRun {
    pub result: Result<IntervalOrder, PivError>,
    pub passes: usize,
    pub bound: usize,
}

/// Reconstructs the whole streamed graph, using `replay` for passes and accounting.
pub fn reconstruct_piv_with(replay: &mut Replay<'_>, attempts: usize, seed: u64) -> Result<PivRun, StreamError> {
    let n = replay.stream().n();
    let mut rec = [PivReconstructor::new(0, (0..n as u32).collect(), attempts, seed)];
    let mut pass = 0;
    while !rec[0].finished() {
        pass += 1;
        replay.replay(pass, &mut rec)?;
        rec[0].end_pass();
    }
    let [rec] = rec;
    let (passes, bound) = (rec.passes_used(), rec.budget);
    Ok(PivRun { result: rec.into_outcome().expect("finished"), passes, bound })
}

/// [`reconstruct_piv_with`] on a fresh replay, with `ceil(log5(n^2))` attempts when `attempts` is `None`.
pub fn reconstruct_piv(stream: &Stream, attempts: Option<usize>, seed: u64) -> Result<PivRun, StreamError> {
    let s = attempts.unwrap_or_else(|| default_attempts(stream.n()));
    reconstruct_piv_with(&mut Replay::new(stream), s, seed)
}

/// One pass: does the graph of `candidate` equal the streamed graph?
pub fn verify_model(stream: &Stream, candidate: &IntervalOrder) -> Result<bool, StreamError> {
    struct Check<'a> {
        order: &'a IntervalOrder,
        deg: Vec<i64>,
        stray: i64,
    }
    impl StreamConsumer for Check<'_> {
        fn label(&self) -> String {
            "piv-verify".into()
        }
        fn on_event(&mut self, _pass: usize, ev: &StreamEvent) {
            let (u, v) = ev.endpoints();
            self.deg[u] += ev.sign();
            self.deg[v] += ev.sign();
            if !self.order.has_edge(u, v) {
                self.stray += ev.sign();
            }
        }
        fn words(&self) -> usize {
            1 + self.deg.len() + self.order.words()
        }
    }
    if candidate.n() != stream.n() {
        return Ok(false);
    }
    let mut c = [Check { order: candidate, deg: vec![0; stream.n()], stray: 0 }];
    Replay::new(stream).replay(1, &mut c)?;
    let [c] = c;
    Ok(c.stray == 0 && c.deg.iter().zip(candidate.degrees()).all(|(&d, e)| d == e as i64))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::solvers::classes::named::*;

    fn run(g: &Graph, seed: u64) -> PivRun {
        reconstruct_piv(&Stream::from_graph(g, 0, None), None, seed).unwrap()
    }

    #[test]
    fn path_is_accepted() {
        let g = path(4);
        let r = run(&g, 3);
        let order = r.result.unwrap();
        assert!(order.is_proper());
        assert_eq!(order.to_graph().edges().collect::<Vec<_>>(), g.edges().collect::<Vec<_>>());
        assert!(r.passes <= r.bound);
    }

    #[test]
    fn obstructions_are_rejected() {
        for g in [claw(), net(), tent(), cycle(4), cycle(5)] {
            for seed in 0..5 {
                let r = run(&g, seed);
                let err = r.result.unwrap_err();
                assert!(err.is_negative() || matches!(err, PivError::Failure(_)), "{err:?}");
            }
        }
    }

    #[test]
    fn disconnected_inputs() {
        let g = Graph::from_edges(7, [(0, 1), (1, 2), (4, 5), (5, 6), (4, 6)]);
        let order = run(&g, 1).result.unwrap();
        assert_eq!(order.to_graph().edges().collect::<Vec<_>>(), g.edges().collect::<Vec<_>>());
    }

    #[test]
    fn tiny_inputs() {
        assert_eq!(run(&Graph::new(0), 0).result.unwrap().n(), 0);
        assert_eq!(run(&Graph::new(1), 0).passes, 0);
        assert!(run(&complete(2), 0).result.is_ok());
    }

    #[test]
    fn verify_model_examples() {
        let p3: IntervalOrder = "b0 b1 e0 b2 e1 e2".parse().unwrap();
        assert!(verify_model(&Stream::from_graph(&path(3), 0, None), &p3).unwrap());
        assert!(!verify_model(&Stream::from_graph(&complete(3), 0, None), &p3).unwrap());
        let k3: IntervalOrder = "b0 b1 b2 e0 e1 e2".parse().unwrap();
        let swapped: IntervalOrder = "b0 b1 e0 b2 e1 e2".parse().unwrap();
        let s = Stream::from_graph(&complete(3), 0, None);
        assert!(verify_model(&s, &k3).unwrap());
        assert!(!verify_model(&s, &swapped).unwrap());
    }

    #[test]
    fn middle_vertex_examples() {
        assert!(is_middle_vertex(&star(5), 0).unwrap());
        assert!(is_middle_vertex(&path(20), 0).unwrap());
        assert!(!is_middle_vertex(&path(21), 0).unwrap());
        assert!(is_middle_vertex(&path(21), 10).unwrap());
        assert!(matches!(is_middle_vertex(&star(3), 1), Err(PivError::MoreThanTwoComponents(_)) | Ok(_)));
        assert!(matches!(is_middle_vertex(&claw_with_long_legs(), 0), Err(PivError::MoreThanTwoComponents(3))));
    }

    fn claw_with_long_legs() -> Graph {
        Graph::from_edges(7, [(0, 1), (0, 2), (0, 3), (1, 4), (2, 5), (3, 6)])
    }

    #[test]
    fn partial_order_basics() {
        let po = PartialOrder::from_pairs(3, [(0, 1), (1, 2)]).unwrap();
        assert!(po.less(0, 2));
        assert!(PartialOrder::from_pairs(2, [(0, 1), (1, 0)]).is_none());
        let r = po.restrict(&[0, 2]);
        assert!(r.less(0, 1));
        assert!(po.refine_by_key(&[2, 1, 0]).is_none());
        assert!(PartialOrder::empty(3).refine_by_key(&[0, 0, 1]).unwrap().less(1, 2));
    }
}
