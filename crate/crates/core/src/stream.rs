//! Edge streams, multi-pass replay and space accounting.
//!
//! A stream is parsed once into a buffer. Multi-pass algorithms are simulated
//! by replaying that buffer; the buffer itself is harness memory and is never
//! charged to a consumer.

use std::collections::{BTreeMap, HashSet};
use std::fmt;
use std::str::FromStr;

use crate::graph::{Digraph, Graph, VertexSet};

#[derive(Debug, thiserror::Error, Clone, PartialEq, Eq)]
pub enum StreamError {
    #[error("line {line}: malformed input: {reason}")]
    MalformedLine { line: usize, reason: String },
    #[error("line {line}: edge ({u},{v}) inserted while present")]
    DuplicateInsert { line: usize, u: usize, v: usize },
    #[error("line {line}: edge ({u},{v}) deleted while absent")]
    DeleteAbsent { line: usize, u: usize, v: usize },
    #[error("line {line}: vertex {v} out of range for n={n}")]
    VertexOutOfRange { line: usize, v: usize, n: usize },
    #[error("line {line}: terminal flag for vertex {v} after its first insertion")]
    TerminalFlagOnLaterEdge { line: usize, v: usize },
    #[error("line {line}: deletion in an insertion-only stream")]
    DeleteInInsertionOnly { line: usize },
    #[error("missing header field `{0}`")]
    MissingHeader(&'static str),
    #[error("consumer `{consumer}` has a budget of {budget} passes but pass {pass} was requested")]
    PassBudgetExceeded { consumer: String, pass: usize, budget: usize },
    #[error("insertion-only consumer `{consumer}` cannot read a turnstile stream")]
    ModeMismatch { consumer: String },
    #[error("consumer `{consumer}` used {used} words, above its declared bound of {bound}")]
    SpaceBoundExceeded { consumer: String, used: usize, bound: usize },
    #[error("space cap exceeded: {used} words used, cap {cap}")]
    SpaceCapExceeded { used: usize, cap: usize },
    #[error("pass cap exceeded: pass {pass} requested, cap {cap}")]
    PassCapExceeded { pass: usize, cap: usize },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Op {
    Insert,
    Delete,
}

impl Op {
    pub fn sign(self) -> i64 {
        match self {
            Op::Insert => 1,
            Op::Delete => -1,
        }
    }
}

/// One edge update. For directed problems `(u, v)` is the arc `u -> v`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct StreamEvent {
    pub op: Op,
    pub u: u32,
    pub v: u32,
    pub term_u: bool,
    pub term_v: bool,
}

impl StreamEvent {
    pub fn insert(u: usize, v: usize) -> Self {
        Self { op: Op::Insert, u: u as u32, v: v as u32, term_u: false, term_v: false }
    }

    pub fn delete(u: usize, v: usize) -> Self {
        Self { op: Op::Delete, u: u as u32, v: v as u32, term_u: false, term_v: false }
    }

    #[inline]
    pub fn endpoints(&self) -> (usize, usize) {
        (self.u as usize, self.v as usize)
    }

    #[inline]
    pub fn sign(&self) -> i64 {
        self.op.sign()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Problem {
    Fvst,
    Cvd,
    Svd,
    Tvd,
    Bvd,
    Pivd,
    Oct,
    Sfvs,
    Mwc,
}

impl Problem {
    pub const ALL: [Problem; 9] = [
        Problem::Fvst,
        Problem::Cvd,
        Problem::Svd,
        Problem::Tvd,
        Problem::Bvd,
        Problem::Pivd,
        Problem::Oct,
        Problem::Sfvs,
        Problem::Mwc,
    ];

    pub fn tag(self) -> &'static str {
        match self {
            Problem::Fvst => "fvst",
            Problem::Cvd => "cvd",
            Problem::Svd => "svd",
            Problem::Tvd => "tvd",
            Problem::Bvd => "bvd",
            Problem::Pivd => "pivd",
            Problem::Oct => "oct",
            Problem::Sfvs => "sfvs",
            Problem::Mwc => "mwc",
        }
    }

    pub fn is_directed(self) -> bool {
        self == Problem::Fvst
    }

    pub fn has_terminals(self) -> bool {
        matches!(self, Problem::Sfvs | Problem::Mwc)
    }
}

impl fmt::Display for Problem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.tag())
    }
}

impl FromStr for Problem {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Problem::ALL
            .into_iter()
            .find(|p| p.tag() == s)
            .ok_or_else(|| format!("unknown problem `{s}`"))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum StreamMode {
    InsertionOnly,
    #[default]
    Turnstile,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct StreamHeader {
    pub n: usize,
    pub k: usize,
    pub problem: Option<Problem>,
    pub mode: StreamMode,
    /// Terminals declared in the header, before any event.
    pub terminals: Option<Vec<usize>>,
}

impl StreamHeader {
    pub fn new(n: usize, k: usize) -> Self {
        Self { n, k, problem: None, mode: StreamMode::Turnstile, terminals: None }
    }

    fn directed(&self) -> bool {
        self.problem.is_some_and(Problem::is_directed)
    }
}

/// A validated stream: header plus the ordered event buffer.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Stream {
    pub header: StreamHeader,
    pub events: Vec<StreamEvent>,
}

fn malformed(line: usize, reason: impl Into<String>) -> StreamError {
    StreamError::MalformedLine { line, reason: reason.into() }
}

fn parse_num(line: usize, tok: Option<&str>, what: &str) -> Result<usize, StreamError> {
    let tok = tok.ok_or_else(|| malformed(line, format!("missing {what}")))?;
    tok.parse::<usize>().map_err(|_| malformed(line, format!("bad {what} `{tok}`")))
}

fn parse_flag(line: usize, tok: &str) -> Result<bool, StreamError> {
    match tok {
        "0" => Ok(false),
        "1" => Ok(true),
        _ => Err(malformed(line, format!("bad terminal flag `{tok}`"))),
    }
}

/// Parses the line-oriented stream format and validates simple-graph
/// turnstile semantics.
pub fn parse_stream(text: &str) -> Result<Stream, StreamError> {
    let mut n = None;
    let mut k = 0;
    let mut problem = None;
    let mut mode = StreamMode::Turnstile;
    let mut terminals = None;
    let mut raw = Vec::new();

    for (idx, line) in text.lines().enumerate() {
        let lineno = idx + 1;
        let line = line.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let mut toks = line.split_whitespace();
        let head = toks.next().unwrap_or("");
        match head {
            "+" | "-" if n.is_none() => return Err(StreamError::MissingHeader("n")),
            "+" | "-" => {
                let u = parse_num(lineno, toks.next(), "endpoint")?;
                let v = parse_num(lineno, toks.next(), "endpoint")?;
                let rest: Vec<&str> = toks.collect();
                let (term_u, term_v) = match (head, rest.as_slice()) {
                    (_, []) => (false, false),
                    ("+", [a, b]) => (parse_flag(lineno, a)?, parse_flag(lineno, b)?),
                    _ => return Err(malformed(lineno, "unexpected trailing tokens")),
                };
                let op = if head == "+" { Op::Insert } else { Op::Delete };
                raw.push((lineno, StreamEvent { op, u: u as u32, v: v as u32, term_u, term_v }));
            }
            _ if !raw.is_empty() => return Err(malformed(lineno, "header field after the first event")),
            "n" => n = Some(parse_num(lineno, toks.next(), "n")?),
            "k" => k = parse_num(lineno, toks.next(), "k")?,
            "prob" => {
                let tag = toks.next().ok_or_else(|| malformed(lineno, "missing problem tag"))?;
                problem = Some(tag.parse::<Problem>().map_err(|e| malformed(lineno, e))?);
            }
            "mode" => {
                mode = match toks.next() {
                    Some("ins") => StreamMode::InsertionOnly,
                    Some("turn") => StreamMode::Turnstile,
                    other => return Err(malformed(lineno, format!("bad mode {other:?}"))),
                }
            }
            "terminals" => {
                let ids = toks
                    .map(|t| t.parse::<usize>().map_err(|_| malformed(lineno, format!("bad terminal `{t}`"))))
                    .collect::<Result<Vec<_>, _>>()?;
                terminals = Some((lineno, ids));
            }
            other => return Err(malformed(lineno, format!("unknown directive `{other}`"))),
        }
        if matches!(head, "n" | "k" | "prob" | "mode") && line.split_whitespace().count() != 2 {
            return Err(malformed(lineno, "expected exactly one value"));
        }
    }

    let n = n.ok_or(StreamError::MissingHeader("n"))?;
    let terminals = match terminals {
        Some((lineno, ids)) => {
            if let Some(&v) = ids.iter().find(|&&v| v >= n) {
                return Err(StreamError::VertexOutOfRange { line: lineno, v, n });
            }
            Some(ids)
        }
        None => None,
    };
    let header = StreamHeader { n, k, problem, mode, terminals };
    let mut checker = EventChecker::new(&header);
    for &(lineno, ev) in &raw {
        checker.check(lineno, &ev)?;
    }
    Ok(Stream { header, events: raw.into_iter().map(|(_, e)| e).collect() })
}

/// Incremental validator for the simple-graph turnstile rules.
struct EventChecker {
    n: usize,
    directed: bool,
    mode: StreamMode,
    present: HashSet<(u32, u32)>,
    seen: Vec<bool>,
}

impl EventChecker {
    fn new(header: &StreamHeader) -> Self {
        Self {
            n: header.n,
            directed: header.directed(),
            mode: header.mode,
            present: HashSet::new(),
            seen: vec![false; header.n],
        }
    }

    fn check(&mut self, line: usize, ev: &StreamEvent) -> Result<(), StreamError> {
        let (u, v) = ev.endpoints();
        for x in [u, v] {
            if x >= self.n {
                return Err(StreamError::VertexOutOfRange { line, v: x, n: self.n });
            }
        }
        if u == v {
            return Err(malformed(line, "self loop"));
        }
        let key = if self.directed || u < v { (ev.u, ev.v) } else { (ev.v, ev.u) };
        match ev.op {
            Op::Insert => {
                if !self.present.insert(key) {
                    return Err(StreamError::DuplicateInsert { line, u, v });
                }
                for (x, flag) in [(u, ev.term_u), (v, ev.term_v)] {
                    // Flags are fixed when a vertex is first seen; a set flag later is an error.
                    if flag && self.seen[x] {
                        return Err(StreamError::TerminalFlagOnLaterEdge { line, v: x });
                    }
                }
                // Both endpoints become seen only after the flags of this event are read,
                // so a vertex first appearing here may carry its flag.
                self.seen[u] = true;
                self.seen[v] = true;
            }
            Op::Delete => {
                if self.mode == StreamMode::InsertionOnly {
                    return Err(StreamError::DeleteInInsertionOnly { line });
                }
                if !self.present.remove(&key) {
                    return Err(StreamError::DeleteAbsent { line, u, v });
                }
            }
        }
        Ok(())
    }
}

impl Stream {
    /// Builds a stream from events, applying the same validation as the parser.
    pub fn from_events(header: StreamHeader, events: Vec<StreamEvent>) -> Result<Stream, StreamError> {
        let mut checker = EventChecker::new(&header);
        for (i, ev) in events.iter().enumerate() {
            checker.check(i + 1, ev)?;
        }
        Ok(Stream { header, events })
    }

    /// Insertion-only stream of an undirected graph's edges.
    pub fn from_graph(g: &Graph, k: usize, problem: Option<Problem>) -> Stream {
        let mut header = StreamHeader::new(g.n(), k);
        header.problem = problem;
        let events = g.edges().map(|(u, v)| StreamEvent::insert(u, v)).collect();
        Stream { header, events }
    }

    pub fn from_digraph(g: &Digraph, k: usize) -> Stream {
        let mut header = StreamHeader::new(g.n(), k);
        header.problem = Some(Problem::Fvst);
        let events = g.arcs().map(|(u, v)| StreamEvent::insert(u, v)).collect();
        Stream { header, events }
    }

    pub fn n(&self) -> usize {
        self.header.n
    }

    pub fn k(&self) -> usize {
        self.header.k
    }

    /// Header terminals plus every vertex flagged on its first insertion.
    pub fn terminals(&self) -> VertexSet {
        let mut t = VertexSet::from_iter_cap(self.n(), self.header.terminals.iter().flatten().copied());
        for ev in &self.events {
            if ev.term_u {
                t.insert(ev.u as usize);
            }
            if ev.term_v {
                t.insert(ev.v as usize);
            }
        }
        t
    }

    /// Serializes back to the text grammar.
    pub fn to_text(&self) -> String {
        let h = &self.header;
        let mut out = format!("n {}\nk {}\n", h.n, h.k);
        if let Some(p) = h.problem {
            out += &format!("prob {p}\n");
        }
        out += match h.mode {
            StreamMode::InsertionOnly => "mode ins\n",
            StreamMode::Turnstile => "mode turn\n",
        };
        if let Some(ts) = &h.terminals {
            let ids: Vec<String> = ts.iter().map(|t| t.to_string()).collect();
            out += &format!("terminals {}\n", ids.join(" "));
        }
        for ev in &self.events {
            match ev.op {
                Op::Insert if ev.term_u || ev.term_v => {
                    out += &format!("+ {} {} {} {}\n", ev.u, ev.v, ev.term_u as u8, ev.term_v as u8)
                }
                Op::Insert => out += &format!("+ {} {}\n", ev.u, ev.v),
                Op::Delete => out += &format!("- {} {}\n", ev.u, ev.v),
            }
        }
        out
    }
}

/// Final undirected graph of a stream. Oracle and verification paths only.
pub fn materialize(stream: &Stream) -> Graph {
    let mut g = Graph::new(stream.n());
    for ev in &stream.events {
        let (u, v) = ev.endpoints();
        match ev.op {
            Op::Insert => g.add_edge(u, v),
            Op::Delete => g.remove_edge(u, v),
        };
    }
    g
}

/// Final directed graph of a stream. Oracle and verification paths only.
pub fn materialize_digraph(stream: &Stream) -> Digraph {
    let mut g = Digraph::new(stream.n());
    for ev in &stream.events {
        let (u, v) = ev.endpoints();
        match ev.op {
            Op::Insert => g.add_arc(u, v),
            Op::Delete => g.remove_arc(u, v),
        };
    }
    g
}

/// Declared space bound of the shape `c1 * k^c2 * n * log2(n)^c3` words.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SpaceBound {
    pub c1: f64,
    pub c2: u32,
    pub c3: u32,
}

impl SpaceBound {
    pub fn eval(&self, n: usize, k: usize) -> usize {
        let logn = (n.max(2) as f64).log2();
        let v = self.c1 * (k.max(1) as f64).powi(self.c2 as i32) * n.max(1) as f64 * logn.powi(self.c3 as i32);
        v.ceil() as usize
    }
}

/// Anything that reads a stream pass by pass.
pub trait StreamConsumer {
    fn label(&self) -> String;

    /// Number of passes this consumer may read.
    fn pass_budget(&self) -> usize {
        1
    }

    fn insertion_only(&self) -> bool {
        false
    }

    fn on_event(&mut self, pass: usize, event: &StreamEvent);

    /// Words of state currently held.
    fn words(&self) -> usize;

    fn space_bound(&self) -> Option<SpaceBound> {
        None
    }
}

/// Phases of a run. Space is charged per phase and the peak is the largest phase total.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Phase {
    Pass(usize),
    Post,
}

impl fmt::Display for Phase {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Phase::Pass(p) => write!(f, "pass{p}"),
            Phase::Post => f.write_str("post"),
        }
    }
}

/// Per-phase, per-label word charges.
///
/// Consumers of one pass are charged the sum of their individual peaks, an
/// upper bound on their simultaneous footprint.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct SpaceLedger {
    phases: BTreeMap<Phase, BTreeMap<String, usize>>,
    totals: BTreeMap<Phase, usize>,
    peak: usize,
}

impl SpaceLedger {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn charge(&mut self, phase: Phase, label: &str, words: usize) {
        let entry = self.phases.entry(phase).or_default();
        *entry.entry(label.to_string()).or_default() += words;
        let total = self.totals.entry(phase).or_default();
        *total += words;
        self.peak = self.peak.max(*total);
    }

    pub fn phase_total(&self, phase: Phase) -> usize {
        self.totals.get(&phase).copied().unwrap_or(0)
    }

    pub fn peak_total(&self) -> usize {
        self.peak
    }

    pub fn passes(&self) -> usize {
        self.phases
            .keys()
            .filter_map(|p| match p {
                Phase::Pass(i) => Some(*i),
                Phase::Post => None,
            })
            .max()
            .unwrap_or(0)
    }

    /// Words charged to labels starting with `prefix`, summed per phase, maximum over phases.
    pub fn peak_for(&self, prefix: &str) -> usize {
        self.phases
            .values()
            .map(|m| m.iter().filter(|(l, _)| l.starts_with(prefix)).map(|(_, w)| w).sum())
            .max()
            .unwrap_or(0)
    }

    pub fn merge(&mut self, other: &SpaceLedger) {
        for (phase, labels) in &other.phases {
            for (label, &w) in labels {
                self.charge(*phase, label, w);
            }
        }
    }

    /// `key=value` lines, one per phase and label group.
    pub fn report_lines(&self) -> Vec<String> {
        let mut out = vec![format!("space_peak_words={}", self.peak)];
        for (phase, labels) in &self.phases {
            let mut groups: BTreeMap<&str, usize> = BTreeMap::new();
            for (l, w) in labels {
                let group = l.split(['#', '/']).next().unwrap_or(l);
                *groups.entry(group).or_default() += w;
            }
            for (g, w) in groups {
                out.push(format!("space_{phase}_{g}={w}"));
            }
        }
        out
    }
}

/// Drives passes over a stored stream and charges consumers to the ledger.
pub struct Replay<'s> {
    stream: &'s Stream,
    pub ledger: SpaceLedger,
    passes_cap: Option<usize>,
    space_cap: Option<usize>,
    jobs: usize,
}

impl<'s> Replay<'s> {
    pub fn new(stream: &'s Stream) -> Self {
        Self { stream, ledger: SpaceLedger::new(), passes_cap: None, space_cap: None, jobs: 1 }
    }

    pub fn with_caps(mut self, passes_cap: Option<usize>, space_cap: Option<usize>) -> Self {
        self.passes_cap = passes_cap;
        self.space_cap = space_cap;
        self
    }

    pub fn with_jobs(mut self, jobs: usize) -> Self {
        self.jobs = jobs.max(1);
        self
    }

    pub fn stream(&self) -> &'s Stream {
        self.stream
    }

    /// Delivers every event of the stream, in order, to each consumer for pass `pass`
    /// (passes count from 1).
    ///
    /// Each consumer reads the whole pass before the next one starts, so many
    /// consumers can be built, fed and reduced in batches that share one logical pass.
    pub fn replay<C: StreamConsumer + Send>(&mut self, pass: usize, consumers: &mut [C]) -> Result<(), StreamError> {
        if let Some(cap) = self.passes_cap {
            if pass > cap {
                return Err(StreamError::PassCapExceeded { pass, cap });
            }
        }
        for c in consumers.iter() {
            if pass == 0 || pass > c.pass_budget() {
                return Err(StreamError::PassBudgetExceeded { consumer: c.label(), pass, budget: c.pass_budget() });
            }
            if c.insertion_only() && self.stream.header.mode == StreamMode::Turnstile {
                return Err(StreamError::ModeMismatch { consumer: c.label() });
            }
        }
        let events = &self.stream.events;
        let peaks: Vec<usize> = if self.jobs > 1 && consumers.len() > 1 {
            let chunk = consumers.len().div_ceil(self.jobs);
            std::thread::scope(|scope| {
                let handles: Vec<_> = consumers
                    .chunks_mut(chunk)
                    .map(|part| scope.spawn(move || part.iter_mut().map(|c| feed(c, pass, events)).collect::<Vec<_>>()))
                    .collect();
                handles.into_iter().flat_map(|h| h.join().expect("replay worker panicked")).collect()
            })
        } else {
            consumers.iter_mut().map(|c| feed(c, pass, events)).collect()
        };
        let (n, k) = (self.stream.n(), self.stream.k());
        for (c, peak) in consumers.iter().zip(peaks) {
            if let Some(bound) = c.space_bound() {
                let b = bound.eval(n, k);
                if peak > b {
                    return Err(StreamError::SpaceBoundExceeded { consumer: c.label(), used: peak, bound: b });
                }
            }
            self.ledger.charge(Phase::Pass(pass), &c.label(), peak);
        }
        self.check_space()
    }

    /// Charges words held by post-processing or carried between passes.
    pub fn charge(&mut self, phase: Phase, label: &str, words: usize) -> Result<(), StreamError> {
        self.ledger.charge(phase, label, words);
        self.check_space()
    }

    fn check_space(&self) -> Result<(), StreamError> {
        match self.space_cap {
            Some(cap) if self.ledger.peak_total() > cap => {
                Err(StreamError::SpaceCapExceeded { used: self.ledger.peak_total(), cap })
            }
            _ => Ok(()),
        }
    }
}

fn feed<C: StreamConsumer>(c: &mut C, pass: usize, events: &[StreamEvent]) -> usize {
    let mut peak = c.words();
    for ev in events {
        c.on_event(pass, ev);
        peak = peak.max(c.words());
    }
    peak
}
