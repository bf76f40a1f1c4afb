//! Seeded synthetic netflow with optional port scans.
//!
//! Clients `10.0.1.x` talk to servers `10.0.0.x` on a small palette of common
//! ports. Each client opens a Poisson number of conversations per window and
//! every conversation yields a request record and an overlapping reply.

use std::net::Ipv4Addr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Poisson};

use crate::flow::FlowRecord;

/// Scanner source ports start here; normal clients use 49152 and up, so
/// scan probes never pair with normal replies.
const SCAN_SOURCE_PORT_BASE: u16 = 33000;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum SynthError {
    #[error("invalid traffic profile: {0}")]
    InvalidProfile(String),
    #[error("scan port range [{lo}, {hi}] is empty")]
    EmptyPortRange { lo: u16, hi: u16 },
    #[error("scan window {index} is outside the {windows} generated windows")]
    WindowOutOfRange { index: usize, windows: usize },
}

#[derive(Debug, Clone, PartialEq)]
pub struct TrafficProfile {
    pub n_clients: usize,
    pub n_servers: usize,
    pub common_ports: Vec<u16>,
    /// Poisson mean of conversations per client per window.
    pub mean_flows: f64,
    /// Epoch seconds of the first window; a multiple of `window_width` keeps
    /// windows aligned with origin 0.
    pub start: f64,
    pub duration: f64,
    pub window_width: f64,
    pub seed: u64,
}

impl Default for TrafficProfile {
    fn default() -> Self {
        TrafficProfile {
            n_clients: 20,
            n_servers: 4,
            common_ports: vec![22, 53, 80, 443],
            mean_flows: 3.0,
            start: 1_500_000_000.0,
            duration: 60.0 * 300.0,
            window_width: 300.0,
            seed: 1,
        }
    }
}

impl TrafficProfile {
    pub fn n_windows(&self) -> usize {
        (self.duration / self.window_width).ceil() as usize
    }

    pub fn window_start(&self, index: usize) -> f64 {
        self.start + index as f64 * self.window_width
    }

    fn validate(&self) -> Result<(), SynthError> {
        let bad = |m: &str| Err(SynthError::InvalidProfile(m.into()));
        if self.n_clients == 0 || self.n_servers == 0 {
            return bad("client and server counts must be at least 1");
        }
        if self.n_clients > 254 || self.n_servers > 254 {
            return bad("at most 254 clients and 254 servers");
        }
        if self.common_ports.is_empty() {
            return bad("common port list is empty");
        }
        if !(self.mean_flows >= 0.0 && self.mean_flows.is_finite()) {
            return bad("mean flows must be finite and non-negative");
        }
        if !(self.window_width > 0.0 && self.duration > 0.0 && self.start.is_finite()) {
            return bad("duration and window width must be positive");
        }
        Ok(())
    }
}

pub fn client_ip(i: usize) -> Ipv4Addr {
    Ipv4Addr::new(10, 0, 1, (i + 1) as u8)
}

pub fn server_ip(i: usize) -> Ipv4Addr {
    Ipv4Addr::new(10, 0, 0, (i + 1) as u8)
}

/// A port scan from `scanner` against `target` over `[port_lo, port_hi]`,
/// placed in window `window_index` of a profile.
#[derive(Debug, Clone, PartialEq)]
pub struct ScanSpec {
    pub scanner: Ipv4Addr,
    pub target: Ipv4Addr,
    pub port_lo: u16,
    pub port_hi: u16,
    pub window_index: usize,
}

impl ScanSpec {
    /// Insider scan: first client against first server over ports 1..=100.
    pub fn default_at(window_index: usize) -> Self {
        ScanSpec {
            scanner: client_ip(0),
            target: server_ip(0),
            port_lo: 1,
            port_hi: 100,
            window_index,
        }
    }

    pub fn n_ports(&self) -> usize {
        (self.port_hi as usize + 1).saturating_sub(self.port_lo as usize)
    }
}

fn sort_records(records: &mut [FlowRecord]) {
    records.sort_by(|a, b| {
        a.s_time
            .total_cmp(&b.s_time)
            .then(a.s_ip.cmp(&b.s_ip))
            .then(a.s_port.cmp(&b.s_port))
            .then(a.d_ip.cmp(&b.d_ip))
            .then(a.d_port.cmp(&b.d_port))
    });
}

/// Normal traffic for the whole profile duration, sorted by start time.
pub fn generate_normal(p: &TrafficProfile) -> Result<Vec<FlowRecord>, SynthError> {
    p.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(p.seed);
    let poisson = (p.mean_flows > 0.0).then(|| Poisson::new(p.mean_flows).expect("mean is positive"));
    let end = p.start + p.duration;
    let mut out = Vec::new();
    for w in 0..p.n_windows() {
        let ws = p.window_start(w);
        let we = (ws + p.window_width).min(end);
        for c in 0..p.n_clients {
            let count = poisson.as_ref().map_or(0, |d| d.sample(&mut rng) as usize);
            for _ in 0..count {
                let server = server_ip(rng.random_range(0..p.n_servers));
                let port = p.common_ports[rng.random_range(0..p.common_ports.len())];
                let client_port: u16 = rng.random_range(49152..=65535);
                let s = rng.random_range(ws..we);
                let len: f64 = rng.random_range(0.01..2.0);
                let reply_delay = rng.random_range(0.0..len.min(0.05));
                out.push(FlowRecord {
                    s_time: s,
                    e_time: s + len,
                    s_ip: client_ip(c),
                    d_ip: server,
                    s_port: client_port,
                    d_port: port,
                    flags: "S".into(),
                });
                out.push(FlowRecord {
                    s_time: s + reply_delay,
                    e_time: s + len,
                    s_ip: server,
                    d_ip: client_ip(c),
                    s_port: port,
                    d_port: client_port,
                    flags: "SA".into(),
                });
            }
        }
    }
    sort_records(&mut out);
    Ok(out)
}

/// Adds one probe per port in the scan range, spread across the chosen
/// window, and re-sorts. Existing records are left as they are.
pub fn inject_scan(
    records: &[FlowRecord],
    p: &TrafficProfile,
    scan: &ScanSpec,
) -> Result<Vec<FlowRecord>, SynthError> {
    if scan.port_lo > scan.port_hi {
        return Err(SynthError::EmptyPortRange {
            lo: scan.port_lo,
            hi: scan.port_hi,
        });
    }
    let windows = p.n_windows();
    if scan.window_index >= windows {
        return Err(SynthError::WindowOutOfRange {
            index: scan.window_index,
            windows,
        });
    }
    let n = scan.n_ports();
    let ws = p.window_start(scan.window_index);
    let step = p.window_width / (n + 1) as f64;
    let mut out = records.to_vec();
    for (i, port) in (scan.port_lo..=scan.port_hi).enumerate() {
        let t = ws + step * (i + 1) as f64;
        out.push(FlowRecord {
            s_time: t,
            e_time: t + 0.001,
            s_ip: scan.scanner,
            d_ip: scan.target,
            s_port: SCAN_SOURCE_PORT_BASE.wrapping_add(i as u16),
            d_port: port,
            flags: "S".into(),
        });
    }
    sort_records(&mut out);
    Ok(out)
}

/// Normal traffic with the default insider scan injected into each listed
/// window.
pub fn scan_scenario(
    p: &TrafficProfile,
    scan_windows: &[usize],
) -> Result<Vec<FlowRecord>, SynthError> {
    let mut flows = generate_normal(p)?;
    for &w in scan_windows {
        flows = inject_scan(&flows, p, &ScanSpec::default_at(w))?;
    }
    Ok(flows)
}
