//! Netflow CSV ingestion, bidirectional session pairing and time windowing.

use std::cmp::Ordering;
use std::collections::HashMap;
use std::fmt::Write as _;
use std::io::BufRead;
use std::net::Ipv4Addr;

/// Exact header line of the flow CSV format.
pub const FLOW_HEADER: &str = "sTime,eTime,sIP,dIP,sPort,dPort,flags";

/// Header of the windowed-session CSV format.
pub const SESSION_HEADER: &str = "window_start,sTime,eTime,sIP,dIP,sPort,dPort,count";

const FLOW_FIELDS: [&str; 7] = ["sTime", "eTime", "sIP", "dIP", "sPort", "dPort", "flags"];
const SESSION_FIELDS: [&str; 8] = [
    "window_start",
    "sTime",
    "eTime",
    "sIP",
    "dIP",
    "sPort",
    "dPort",
    "count",
];

/// Ports below this are treated as service ports when picking a client.
const EPHEMERAL_PORT_FLOOR: u16 = 1024;

#[derive(Debug, thiserror::Error)]
pub enum IngestError {
    #[error("bad header: expected `{expected}`, found `{found}`")]
    BadHeader { expected: &'static str, found: String },
    #[error("missing header line")]
    MissingHeader,
    #[error("line {line}: field `{field}`: {reason}")]
    Malformed {
        line: usize,
        field: &'static str,
        reason: String,
    },
    #[error("window width must be positive and finite, got {0}")]
    InvalidWidth(f64),
    #[error("read error: {0}")]
    Io(#[from] std::io::Error),
}

/// One unidirectional netflow record.
#[derive(Debug, Clone, PartialEq)]
pub struct FlowRecord {
    pub s_time: f64,
    pub e_time: f64,
    pub s_ip: Ipv4Addr,
    pub d_ip: Ipv4Addr,
    pub s_port: u16,
    pub d_port: u16,
    pub flags: String,
}

/// A client/server communication assembled from one or more flow records.
#[derive(Debug, Clone, PartialEq)]
pub struct SessionRecord {
    pub client_ip: Ipv4Addr,
    pub server_ip: Ipv4Addr,
    pub client_port: u16,
    pub server_port: u16,
    pub start: f64,
    pub end: f64,
    pub constituent_count: usize,
}

/// Sessions whose start falls in `[start, start + width)`.
#[derive(Debug, Clone, PartialEq)]
pub struct TimeWindow {
    pub start: f64,
    pub width: f64,
    pub sessions: Vec<SessionRecord>,
}

impl TimeWindow {
    pub fn empty(start: f64, width: f64) -> Self {
        TimeWindow {
            start,
            width,
            sessions: Vec::new(),
        }
    }

    pub fn contains(&self, t: f64) -> bool {
        self.start <= t && t < self.start + self.width
    }
}

fn malformed(line: usize, field: &'static str, reason: impl Into<String>) -> IngestError {
    IngestError::Malformed {
        line,
        field,
        reason: reason.into(),
    }
}

fn parse_time(line: usize, field: &'static str, raw: &str) -> Result<f64, IngestError> {
    let t: f64 = raw
        .trim()
        .parse()
        .map_err(|_| malformed(line, field, format!("`{raw}` is not a number")))?;
    if !t.is_finite() {
        return Err(malformed(line, field, format!("`{raw}` is not finite")));
    }
    Ok(t)
}

fn parse_ip(line: usize, field: &'static str, raw: &str) -> Result<Ipv4Addr, IngestError> {
    raw.trim()
        .parse()
        .map_err(|_| malformed(line, field, format!("`{raw}` is not a dotted-quad IPv4 address")))
}

fn parse_port(line: usize, field: &'static str, raw: &str) -> Result<u16, IngestError> {
    let p: u64 = raw
        .trim()
        .parse()
        .map_err(|_| malformed(line, field, format!("`{raw}` is not an integer")))?;
    u16::try_from(p).map_err(|_| malformed(line, field, format!("port {p} out of range 0-65535")))
}

fn parse_count(line: usize, field: &'static str, raw: &str) -> Result<usize, IngestError> {
    let n: usize = raw
        .trim()
        .parse()
        .map_err(|_| malformed(line, field, format!("`{raw}` is not an integer")))?;
    if n == 0 {
        return Err(malformed(line, field, "count must be at least 1"));
    }
    Ok(n)
}

fn split_fields(line_no: usize, line: &str, expected: usize) -> Result<Vec<&str>, IngestError> {
    let fields: Vec<&str> = line.split(',').collect();
    if fields.len() != expected {
        return Err(malformed(
            line_no,
            "line",
            format!("expected {expected} comma-separated fields, found {}", fields.len()),
        ));
    }
    Ok(fields)
}

/// Reads lines, checks the header and yields `(line_number, line)` for every
/// non-blank data line.
fn data_lines<R: BufRead>(
    reader: R,
    header: &'static str,
) -> Result<Vec<(usize, String)>, IngestError> {
    let mut lines = reader.lines();
    let first = lines.next().ok_or(IngestError::MissingHeader)??;
    let first = first.trim_end_matches('\r');
    if first != header {
        return Err(IngestError::BadHeader {
            expected: header,
            found: first.to_string(),
        });
    }
    let mut out = Vec::new();
    for (i, line) in lines.enumerate() {
        let line = line?;
        let line = line.trim_end_matches('\r');
        if line.trim().is_empty() {
            continue;
        }
        out.push((i + 2, line.to_string()));
    }
    Ok(out)
}

/// Parses a flow CSV stream. Line numbers in errors are 1-based and count the
/// header.
pub fn parse_flows<R: BufRead>(reader: R) -> Result<Vec<FlowRecord>, IngestError> {
    data_lines(reader, FLOW_HEADER)?
        .into_iter()
        .map(|(n, line)| parse_flow_line(n, &line))
        .collect()
}

pub fn parse_flows_str(text: &str) -> Result<Vec<FlowRecord>, IngestError> {
    parse_flows(text.as_bytes())
}

fn parse_flow_line(n: usize, line: &str) -> Result<FlowRecord, IngestError> {
    let f = split_fields(n, line, FLOW_FIELDS.len())?;
    let s_time = parse_time(n, "sTime", f[0])?;
    let e_time = parse_time(n, "eTime", f[1])?;
    if e_time < s_time {
        return Err(malformed(n, "eTime", format!("eTime {e_time} precedes sTime {s_time}")));
    }
    Ok(FlowRecord {
        s_time,
        e_time,
        s_ip: parse_ip(n, "sIP", f[2])?,
        d_ip: parse_ip(n, "dIP", f[3])?,
        s_port: parse_port(n, "sPort", f[4])?,
        d_port: parse_port(n, "dPort", f[5])?,
        flags: f[6].to_string(),
    })
}

/// Serializes records in the flow CSV format, header included.
///
/// Times use the shortest representation that parses back to the same `f64`,
/// so `parse_flows(serialize_flows(r)) == r`.
pub fn serialize_flows(records: &[FlowRecord]) -> String {
    let mut out = String::with_capacity(64 * (records.len() + 1));
    out.push_str(FLOW_HEADER);
    out.push('\n');
    for r in records {
        let _ = writeln!(
            out,
            "{},{},{},{},{},{},{}",
            r.s_time, r.e_time, r.s_ip, r.d_ip, r.s_port, r.d_port, r.flags
        );
    }
    out
}

/// Endpoint pair with a fixed orientation, so both directions of a
/// conversation share one key.
type ConversationKey = ((Ipv4Addr, u16), (Ipv4Addr, u16));

fn conversation_key(r: &FlowRecord) -> (ConversationKey, bool) {
    let a = (r.s_ip, r.s_port);
    let b = (r.d_ip, r.d_port);
    if a <= b {
        ((a, b), true)
    } else {
        ((b, a), false)
    }
}

struct DisjointSets {
    parent: Vec<usize>,
}

impl DisjointSets {
    fn new(n: usize) -> Self {
        DisjointSets {
            parent: (0..n).collect(),
        }
    }

    fn find(&mut self, mut x: usize) -> usize {
        while self.parent[x] != x {
            self.parent[x] = self.parent[self.parent[x]];
            x = self.parent[x];
        }
        x
    }

    fn union(&mut self, a: usize, b: usize) {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra != rb {
            let (lo, hi) = if ra < rb { (ra, rb) } else { (rb, ra) };
            self.parent[hi] = lo;
        }
    }
}

/// Merges reverse-direction records with overlapping intervals into sessions.
///
/// Two records match when one's `(sIP, sPort, dIP, dPort)` is the other's
/// reversed and `max(starts) <= min(ends)`. Sessions are the connected
/// components of that relation, so a retransmitted record joins the session
/// through the reply it overlaps. Records that match nothing become singleton
/// sessions. Output is sorted by start time.
pub fn pair_bidirectional(records: &[FlowRecord]) -> Vec<SessionRecord> {
    let mut order: Vec<usize> = (0..records.len()).collect();
    order.sort_by(|&a, &b| records[a].s_time.total_cmp(&records[b].s_time).then(a.cmp(&b)));

    let mut sets = DisjointSets::new(records.len());
    // Per conversation: records still open in each direction (forward, reverse).
    let mut open: HashMap<ConversationKey, [Vec<usize>; 2]> = HashMap::new();
    for &i in &order {
        let r = &records[i];
        let (key, forward) = conversation_key(r);
        let lists = open.entry(key).or_default();
        let (mine, theirs) = if forward { (0, 1) } else { (1, 0) };
        // Sorted by start, so an earlier record overlaps r iff it ends at or
        // after r starts; anything ending earlier can never overlap again.
        lists[theirs].retain(|&j| records[j].e_time >= r.s_time);
        lists[mine].retain(|&j| records[j].e_time >= r.s_time);
        for &j in &lists[theirs] {
            sets.union(i, j);
        }
        lists[mine].push(i);
    }

    let mut groups: HashMap<usize, Vec<usize>> = HashMap::new();
    for &i in &order {
        let root = sets.find(i);
        groups.entry(root).or_default().push(i);
    }
    let mut sessions: Vec<SessionRecord> = groups
        .into_values()
        .map(|members| session_from_group(records, &members))
        .collect();
    sessions.sort_by(session_order);
    sessions
}

fn session_order(a: &SessionRecord, b: &SessionRecord) -> Ordering {
    a.start
        .total_cmp(&b.start)
        .then(a.client_ip.cmp(&b.client_ip))
        .then(a.client_port.cmp(&b.client_port))
        .then(a.server_ip.cmp(&b.server_ip))
        .then(a.server_port.cmp(&b.server_port))
        .then(a.end.total_cmp(&b.end))
        .then(a.constituent_count.cmp(&b.constituent_count))
}

/// Picks the client side among the records sharing the earliest start.
/// Returns true when the record's source should be the client.
fn source_is_client(first: &FlowRecord, earliest: &[&FlowRecord]) -> bool {
    let src = (first.s_ip, first.s_port);
    let dst = (first.d_ip, first.d_port);
    let src_started = earliest.iter().any(|r| (r.s_ip, r.s_port) == src);
    let dst_started = earliest.iter().any(|r| (r.s_ip, r.s_port) == dst);
    if src_started != dst_started {
        return src_started;
    }
    let src_ephemeral = src.1 >= EPHEMERAL_PORT_FLOOR;
    let dst_ephemeral = dst.1 >= EPHEMERAL_PORT_FLOOR;
    if src_ephemeral != dst_ephemeral {
        return src_ephemeral;
    }
    src <= dst
}

fn session_from_group(records: &[FlowRecord], members: &[usize]) -> SessionRecord {
    let start = members
        .iter()
        .map(|&i| records[i].s_time)
        .fold(f64::INFINITY, f64::min);
    let end = members
        .iter()
        .map(|&i| records[i].e_time)
        .fold(f64::NEG_INFINITY, f64::max);
    let earliest: Vec<&FlowRecord> = members
        .iter()
        .map(|&i| &records[i])
        .filter(|r| r.s_time == start)
        .collect();
    let first = earliest[0];
    let (client, server) = if source_is_client(first, &earliest) {
        ((first.s_ip, first.s_port), (first.d_ip, first.d_port))
    } else {
        ((first.d_ip, first.d_port), (first.s_ip, first.s_port))
    };
    SessionRecord {
        client_ip: client.0,
        server_ip: server.0,
        client_port: client.1,
        server_port: server.1,
        start,
        end,
        constituent_count: members.len(),
    }
}

/// Partitions sessions into half-open windows `[origin + i*width, origin + (i+1)*width)`.
///
/// Windows run from the first to the last occupied index with empty windows
/// emitted for any gaps. Sessions keep their input order within a window.
pub fn window(
    sessions: &[SessionRecord],
    width: f64,
    origin: f64,
) -> Result<Vec<TimeWindow>, IngestError> {
    if !(width > 0.0 && width.is_finite()) {
        return Err(IngestError::InvalidWidth(width));
    }
    if sessions.is_empty() {
        return Ok(Vec::new());
    }
    let index_of = |t: f64| ((t - origin) / width).floor() as i64;
    let indices: Vec<i64> = sessions.iter().map(|s| index_of(s.start)).collect();
    let lo = *indices.iter().min().unwrap();
    let hi = *indices.iter().max().unwrap();
    let mut windows: Vec<TimeWindow> = (lo..=hi)
        .map(|i| TimeWindow::empty(origin + i as f64 * width, width))
        .collect();
    for (s, i) in sessions.iter().zip(indices) {
        windows[(i - lo) as usize].sessions.push(s.clone());
    }
    Ok(windows)
}

/// Serializes windows as session CSV rows with a leading `window_start`.
/// Empty windows produce no rows.
pub fn serialize_windows(windows: &[TimeWindow]) -> String {
    let mut out = String::new();
    out.push_str(SESSION_HEADER);
    out.push('\n');
    for w in windows {
        for s in &w.sessions {
            let _ = writeln!(
                out,
                "{},{},{},{},{},{},{},{}",
                w.start,
                s.start,
                s.end,
                s.client_ip,
                s.server_ip,
                s.client_port,
                s.server_port,
                s.constituent_count
            );
        }
    }
    out
}

/// Reads a windowed-session CSV back into windows of the given width,
/// re-creating the empty windows between occupied ones.
pub fn parse_windows<R: BufRead>(reader: R, width: f64) -> Result<Vec<TimeWindow>, IngestError> {
    if !(width > 0.0 && width.is_finite()) {
        return Err(IngestError::InvalidWidth(width));
    }
    let mut rows: Vec<(f64, SessionRecord)> = Vec::new();
    for (n, line) in data_lines(reader, SESSION_HEADER)? {
        let f = split_fields(n, &line, SESSION_FIELDS.len())?;
        let window_start = parse_time(n, "window_start", f[0])?;
        let start = parse_time(n, "sTime", f[1])?;
        let end = parse_time(n, "eTime", f[2])?;
        if end < start {
            return Err(malformed(n, "eTime", format!("eTime {end} precedes sTime {start}")));
        }
        if !(window_start <= start && start < window_start + width) {
            return Err(malformed(
                n,
                "window_start",
                format!("session start {start} outside window [{window_start}, +{width})"),
            ));
        }
        rows.push((
            window_start,
            SessionRecord {
                start,
                end,
                client_ip: parse_ip(n, "sIP", f[3])?,
                server_ip: parse_ip(n, "dIP", f[4])?,
                client_port: parse_port(n, "sPort", f[5])?,
                server_port: parse_port(n, "dPort", f[6])?,
                constituent_count: parse_count(n, "count", f[7])?,
            },
        ));
    }
    let Some(first) = rows.iter().map(|(w, _)| *w).min_by(f64::total_cmp) else {
        return Ok(Vec::new());
    };
    let last = rows.iter().map(|(w, _)| *w).max_by(f64::total_cmp).unwrap();
    let count = ((last - first) / width).round() as usize + 1;
    let mut windows: Vec<TimeWindow> = (0..count)
        .map(|i| TimeWindow::empty(first + i as f64 * width, width))
        .collect();
    for (ws, s) in rows {
        let i = ((ws - first) / width).round() as usize;
        windows[i].start = ws;
        windows[i].sessions.push(s);
    }
    Ok(windows)
}
