//! Edge-list ingestion, snapshot aggregation and plain-text persistence of
//! graphs and traces.

use std::collections::HashMap;
use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::Path;

use crate::chain::{HittingSample, LimitingDistribution};
use crate::error::{Error, Result};
use crate::graph::Graph;
use crate::interpolate::{Direction, InterpolationConfig, StopMode, Step, Trace};
use crate::ledger::{Sign, SignedEdge};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Event {
    pub source: usize,
    pub target: usize,
    pub time: i64,
}

/// Timestamped interactions over densely relabeled vertices.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct EventList {
    /// Sorted by time; ties keep file order.
    pub events: Vec<Event>,
    /// External label of each dense index, in order of first appearance.
    pub labels: Vec<String>,
    pub label_map: HashMap<String, usize>,
}

impl EventList {
    pub fn n(&self) -> usize {
        self.labels.len()
    }

    fn intern(&mut self, label: &str) -> usize {
        if let Some(&i) = self.label_map.get(label) {
            return i;
        }
        let i = self.labels.len();
        self.labels.push(label.to_string());
        self.label_map.insert(label.to_string(), i);
        i
    }

    fn finish(mut self) -> Self {
        self.events.sort_by_key(|e| e.time);
        self
    }

    /// Event labels as `(source, target, time)`.
    pub fn labeled(&self) -> impl Iterator<Item = (&str, &str, i64)> + '_ {
        self.events
            .iter()
            .map(|e| (self.labels[e.source].as_str(), self.labels[e.target].as_str(), e.time))
    }

    pub fn time_range(&self) -> Option<(i64, i64)> {
        Some((self.events.first()?.time, self.events.last()?.time))
    }
}

fn parse_err(path: &Path, line: usize, message: impl Into<String>) -> Error {
    Error::Parse {
        path: path.to_path_buf(),
        line,
        message: message.into(),
    }
}

fn data_lines<R: BufRead>(reader: R) -> impl Iterator<Item = (usize, std::io::Result<String>)> {
    reader
        .lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l))
        .filter(|(_, l)| match l {
            Ok(s) => {
                let t = s.trim();
                !t.is_empty() && !t.starts_with('#')
            }
            Err(_) => true,
        })
}

/// Reads whitespace-separated `u v [t]` lines; `#` starts a comment line.
/// Events without a timestamp get their data-line position as time.
pub fn read_edge_list(path: impl AsRef<Path>) -> Result<EventList> {
    let path = path.as_ref();
    parse_edge_list(BufReader::new(File::open(path)?), path)
}

pub fn parse_edge_list<R: BufRead>(reader: R, path: &Path) -> Result<EventList> {
    let mut ev = EventList::default();
    for (order, (lineno, line)) in data_lines(reader).enumerate() {
        let line = line?;
        let fields: Vec<&str> = line.split_whitespace().collect();
        let time = match fields.len() {
            2 => order as i64,
            3 => fields[2]
                .parse()
                .map_err(|_| parse_err(path, lineno, format!("bad timestamp {:?}", fields[2])))?,
            k => return Err(parse_err(path, lineno, format!("expected 2 or 3 fields, found {k}"))),
        };
        let source = ev.intern(fields[0]);
        let target = ev.intern(fields[1]);
        ev.events.push(Event { source, target, time });
    }
    Ok(ev.finish())
}

/// Default cap on authors per record; larger records are skipped.
pub const MAX_AUTHORS: usize = 10;

/// Reads `t a1 a2 ... ak` lines (one record per line, e.g. a publication and its
/// authors) and expands each record into a clique of events at time `t`.
/// Records with more than `max_authors` authors are skipped entirely.
pub fn read_author_lists(path: impl AsRef<Path>, max_authors: usize) -> Result<EventList> {
    let path = path.as_ref();
    parse_author_lists(BufReader::new(File::open(path)?), path, max_authors)
}

pub fn parse_author_lists<R: BufRead>(reader: R, path: &Path, max_authors: usize) -> Result<EventList> {
    let mut ev = EventList::default();
    for (lineno, line) in data_lines(reader) {
        let line = line?;
        let mut fields = line.split_whitespace();
        let t = fields.next().expect("data lines are nonempty");
        let time: i64 = t
            .parse()
            .map_err(|_| parse_err(path, lineno, format!("bad timestamp {t:?}")))?;
        let mut authors: Vec<&str> = fields.collect();
        authors.dedup();
        if authors.is_empty() {
            return Err(parse_err(path, lineno, "record has no authors"));
        }
        if authors.len() > max_authors {
            continue;
        }
        let ids: Vec<usize> = authors.iter().map(|a| ev.intern(a)).collect();
        for (i, &a) in ids.iter().enumerate() {
            for &b in &ids[i + 1..] {
                if a != b {
                    ev.events.push(Event {
                        source: a,
                        target: b,
                        time,
                    });
                }
            }
        }
    }
    Ok(ev.finish())
}

/// Cumulative snapshots over the vertex universe of all events.
#[derive(Debug, Clone, PartialEq)]
pub struct SnapshotSet {
    pub snapshots: Vec<Graph>,
    pub cutoffs: Vec<i64>,
}

/// Snapshot `k` holds an edge for every pair with some event at time `<= cutoffs[k]`.
/// Repeated events collapse and self-interactions are dropped.
pub fn aggregate_snapshots(ev: &EventList, cutoffs: &[i64], directed: bool) -> Result<SnapshotSet> {
    if cutoffs.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::InvalidParameter("cutoffs must be strictly increasing".into()));
    }
    let mut g = Graph::new(ev.n(), directed);
    let mut snapshots = Vec::with_capacity(cutoffs.len());
    let mut next = 0;
    for &cut in cutoffs {
        while next < ev.events.len() && ev.events[next].time <= cut {
            let e = ev.events[next];
            if e.source != e.target {
                g.add_edge(e.source, e.target)?;
            }
            next += 1;
        }
        snapshots.push(g.clone());
    }
    Ok(SnapshotSet {
        snapshots,
        cutoffs: cutoffs.to_vec(),
    })
}

/// Cutoffs every `stride` time units after the first event, the last one
/// covering every event.
pub fn stride_cutoffs(ev: &EventList, stride: i64) -> Result<Vec<i64>> {
    if stride <= 0 {
        return Err(Error::InvalidParameter(format!("stride must be positive, got {stride}")));
    }
    let Some((first, last)) = ev.time_range() else {
        return Ok(Vec::new());
    };
    let mut cuts = Vec::new();
    let mut c = first + stride;
    while c < last {
        cuts.push(c);
        c += stride;
    }
    cuts.push(last);
    Ok(cuts)
}

/// Header line `# n <n> directed <bool>`, then sorted `u v` lines.
pub fn write_graph(path: impl AsRef<Path>, g: &Graph) -> Result<()> {
    let mut w = BufWriter::new(File::create(path)?);
    format_graph(&mut w, g)?;
    w.flush()?;
    Ok(())
}

pub fn format_graph<W: Write>(w: &mut W, g: &Graph) -> Result<()> {
    writeln!(w, "# n {} directed {}", g.n(), g.is_directed())?;
    for (u, v) in g.sorted_edges() {
        writeln!(w, "{u} {v}")?;
    }
    Ok(())
}

/// Reads the format of [`write_graph`]. Without a header line the graph is
/// undirected and sized by the largest index.
pub fn read_graph(path: impl AsRef<Path>) -> Result<Graph> {
    let path = path.as_ref();
    parse_graph(BufReader::new(File::open(path)?), path)
}

pub fn parse_graph<R: BufRead>(reader: R, path: &Path) -> Result<Graph> {
    let mut header: Option<(usize, bool)> = None;
    let mut edges = Vec::new();
    for (i, line) in reader.lines().enumerate() {
        let line = line?;
        let lineno = i + 1;
        let t = line.trim();
        if t.is_empty() {
            continue;
        }
        if let Some(rest) = t.strip_prefix('#') {
            let f: Vec<&str> = rest.split_whitespace().collect();
            if let ["n", n, "directed", d] = f.as_slice() {
                let n = n.parse().map_err(|_| parse_err(path, lineno, "bad vertex count"))?;
                let d = d.parse().map_err(|_| parse_err(path, lineno, "bad directed flag"))?;
                header = Some((n, d));
            }
            continue;
        }
        let f: Vec<&str> = t.split_whitespace().collect();
        let [u, v] = f.as_slice() else {
            return Err(parse_err(path, lineno, format!("expected 2 fields, found {}", f.len())));
        };
        let u: usize = u.parse().map_err(|_| parse_err(path, lineno, format!("bad vertex {u:?}")))?;
        let v: usize = v.parse().map_err(|_| parse_err(path, lineno, format!("bad vertex {v:?}")))?;
        edges.push((lineno, u, v));
    }
    let (n, directed) = header.unwrap_or_else(|| {
        let n = edges.iter().map(|&(_, u, v)| u.max(v) + 1).max().unwrap_or(0);
        (n, false)
    });
    let mut g = Graph::new(n, directed);
    for (lineno, u, v) in edges {
        g.add_edge(u, v).map_err(|e| parse_err(path, lineno, e.to_string()))?;
    }
    Ok(g)
}

const TRACE_MAGIC: &str = "netinterp-trace";
const TRACE_VERSION: &str = "1";

fn opt_to_string(x: Option<u64>) -> String {
    x.map_or_else(|| "-".to_string(), |k| k.to_string())
}

fn stop_to_string(s: StopMode) -> String {
    match s {
        StopMode::FixedSteps(k) => format!("fixed {k}"),
        StopMode::UntilDistance => "until_distance".into(),
        StopMode::UntilTarget => "until_target".into(),
    }
}

pub fn write_trace(path: impl AsRef<Path>, trace: &Trace) -> Result<()> {
    let mut w = BufWriter::new(File::create(path)?);
    format_trace(&mut w, trace)?;
    w.flush()?;
    Ok(())
}

/// Line-oriented trace format: a versioned header of `key value` lines, then
/// one `A|R|F u v +1|-1` line per step (advance, regress, fallback advance).
pub fn format_trace<W: Write>(w: &mut W, t: &Trace) -> Result<()> {
    let c = &t.config;
    writeln!(w, "{TRACE_MAGIC} {TRACE_VERSION}")?;
    writeln!(w, "n {}", t.n)?;
    writeln!(w, "directed {}", t.directed)?;
    writeln!(w, "seed {}", c.seed)?;
    writeln!(w, "rate {}", c.rate)?;
    writeln!(w, "target_distance {}", c.target_distance)?;
    writeln!(w, "stop {}", stop_to_string(c.stop))?;
    writeln!(w, "false_edges {}", c.allow_false_edges)?;
    writeln!(w, "stat_every {}", opt_to_string(c.stat_sample_every))?;
    writeln!(w, "step_limit {}", opt_to_string(c.step_limit))?;
    writeln!(w, "initial_distance {}", t.initial_distance)?;
    writeln!(w, "steps {}", t.steps.len())?;
    for s in &t.steps {
        let d = match s.direction {
            Direction::Advance => 'A',
            Direction::Regress => 'R',
            Direction::Fallback => 'F',
        };
        let sign = match s.mv.sign {
            Sign::Plus => "+1",
            Sign::Minus => "-1",
        };
        writeln!(w, "{d} {} {} {sign}", s.mv.edge.0, s.mv.edge.1)?;
    }
    Ok(())
}

pub fn read_trace(path: impl AsRef<Path>) -> Result<Trace> {
    let path = path.as_ref();
    parse_trace(BufReader::new(File::open(path)?), path)
}

struct TraceReader<'a, R> {
    lines: std::iter::Enumerate<std::io::Lines<R>>,
    path: &'a Path,
    lineno: usize,
}

impl<R: BufRead> TraceReader<'_, R> {
    fn next_line(&mut self, what: &str) -> Result<String> {
        match self.lines.next() {
            Some((i, l)) => {
                self.lineno = i + 1;
                Ok(l?)
            }
            None => Err(Error::Truncated(format!("{}: missing {what}", self.path.display()))),
        }
    }

    fn field(&mut self, key: &str) -> Result<String> {
        let line = self.next_line(key)?;
        match line.split_once(' ') {
            Some((k, v)) if k == key => Ok(v.to_string()),
            _ => Err(self.err(format!("expected `{key} ...`, found {line:?}"))),
        }
    }

    fn parsed<T: std::str::FromStr>(&mut self, key: &str) -> Result<T> {
        let v = self.field(key)?;
        v.parse().map_err(|_| self.err(format!("bad {key} value {v:?}")))
    }

    fn optional(&mut self, key: &str) -> Result<Option<u64>> {
        let v = self.field(key)?;
        if v == "-" {
            return Ok(None);
        }
        v.parse().map(Some).map_err(|_| self.err(format!("bad {key} value {v:?}")))
    }

    fn err(&self, message: String) -> Error {
        parse_err(self.path, self.lineno, message)
    }
}

pub fn parse_trace<R: BufRead>(reader: R, path: &Path) -> Result<Trace> {
    let mut r = TraceReader {
        lines: reader.lines().enumerate(),
        path,
        lineno: 0,
    };
    let magic = r.next_line("header")?;
    match magic.split_once(' ') {
        Some((TRACE_MAGIC, TRACE_VERSION)) => {}
        Some((TRACE_MAGIC, v)) => return Err(Error::Version(v.to_string())),
        _ => return Err(r.err("not a trace file".into())),
    }
    let n: usize = r.parsed("n")?;
    let directed: bool = r.parsed("directed")?;
    let seed: u64 = r.parsed("seed")?;
    let rate: f64 = r.parsed("rate")?;
    let target_distance: u64 = r.parsed("target_distance")?;
    let stop_text = r.field("stop")?;
    let stop = match stop_text.split_whitespace().collect::<Vec<_>>().as_slice() {
        ["until_target"] => StopMode::UntilTarget,
        ["until_distance"] => StopMode::UntilDistance,
        ["fixed", k] => StopMode::FixedSteps(k.parse().map_err(|_| r.err(format!("bad step count {k:?}")))?),
        _ => return Err(r.err(format!("unknown stop mode {stop_text:?}"))),
    };
    let allow_false_edges: bool = r.parsed("false_edges")?;
    let stat_sample_every = r.optional("stat_every")?;
    let step_limit = r.optional("step_limit")?;
    let initial_distance: u64 = r.parsed("initial_distance")?;
    let count: usize = r.parsed("steps")?;

    let mut steps = Vec::with_capacity(count);
    let mut distance = initial_distance;
    for i in 0..count {
        let line = r.next_line(&format!("step {} of {count}", i + 1))?;
        let f: Vec<&str> = line.split_whitespace().collect();
        let [d, u, v, s] = f.as_slice() else {
            return Err(r.err(format!("expected 4 fields, found {}", f.len())));
        };
        let direction = match *d {
            "A" => Direction::Advance,
            "R" => Direction::Regress,
            "F" => Direction::Fallback,
            _ => return Err(r.err(format!("bad direction {d:?}"))),
        };
        let sign = match *s {
            "+1" => Sign::Plus,
            "-1" => Sign::Minus,
            _ => return Err(r.err(format!("bad sign {s:?}"))),
        };
        let u: usize = u.parse().map_err(|_| r.err(format!("bad vertex {u:?}")))?;
        let v: usize = v.parse().map_err(|_| r.err(format!("bad vertex {v:?}")))?;
        distance = if direction.is_advancing() {
            distance
                .checked_sub(1)
                .ok_or_else(|| r.err("advancing step below distance 0".into()))?
        } else {
            distance + 1
        };
        steps.push(Step {
            mv: SignedEdge { edge: (u, v), sign },
            direction,
            distance,
        });
    }
    if let Some((i, _)) = r.lines.find(|(_, l)| l.as_ref().map_or(true, |s| !s.trim().is_empty())) {
        return Err(parse_err(path, i + 1, "data after the declared step count"));
    }
    Ok(Trace {
        n,
        directed,
        initial_distance,
        config: InterpolationConfig {
            rate,
            target_distance,
            stop,
            allow_false_edges,
            seed,
            stat_sample_every,
            step_limit,
        },
        steps,
    })
}

/// `state,weight` rows.
pub fn write_distribution_csv<W: Write>(out: W, dist: &LimitingDistribution) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["state", "weight"])?;
    for (s, p) in dist.states() {
        w.write_record([s.to_string(), p.to_string()])?;
    }
    w.flush()?;
    Ok(())
}

/// `trial,steps` rows.
pub fn write_hitting_csv<W: Write>(out: W, sample: &HittingSample) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["trial", "steps"])?;
    for (i, t) in sample.times.iter().enumerate() {
        w.write_record([i.to_string(), t.to_string()])?;
    }
    w.flush()?;
    Ok(())
}

/// Creates `path`'s parent directories and opens it for buffered writing.
pub fn create_file(path: &Path) -> Result<BufWriter<File>> {
    if let Some(dir) = path.parent() {
        std::fs::create_dir_all(dir)?;
    }
    Ok(BufWriter::new(File::create(path)?))
}
