//! Experiment orchestration behind the CLI: config parsing, figure-data
//! generation, CSV and SVG emission.
//!
//! All output is deterministic: fixed 12-digit scientific notation, LF line
//! endings, header row first.

use std::fmt::Write as _;
use std::path::PathBuf;

use crate::channel_metrics::{
    bloch_to_density, ellipsoid_volume, trace_distance, volume_rate, von_neumann_entropy,
    BlochVector,
};
use crate::entanglement::{entanglement_of_formation, esd_time, ChannelKind, PairChannelConfig};
use crate::error::Error;
use crate::gdp_model::{
    analytic_state, damping_rates, dp_comparison, gdp_kraus, generator_from_micro, shape,
    MicroParams,
};
use crate::me2kraus::{choi, generator_matrix, kraus_from_choi, propagator, KrausSet};
use crate::operator_algebra::{identity, max_abs, sigma_x, sigma_y, sigma_z};

/// Which channel(s) an experiment runs.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ChannelChoice {
    Gdp,
    Dp,
    Both,
    Identity,
}

impl ChannelChoice {
    fn parse(s: &str) -> Result<Self, CliError> {
        match s {
            "gdp" => Ok(ChannelChoice::Gdp),
            "dp" => Ok(ChannelChoice::Dp),
            "both" => Ok(ChannelChoice::Both),
            "identity" => Ok(ChannelChoice::Identity),
            other => Err(CliError::Config(format!(
                "unknown channel '{other}' (expected gdp|dp|both|identity)"
            ))),
        }
    }
}

/// Errors surfaced by the experiment layer, mapped onto CLI exit codes.
#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("config error: {0}")]
    Config(String),
    #[error("numerical invariant failure: {0}")]
    Numeric(#[from] Error),
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) => 2,
            CliError::Numeric(_) => 3,
            CliError::Io(_) => 4,
        }
    }
}

/// Full experiment configuration; file values first, CLI flags override.
#[derive(Debug, Clone)]
pub struct ExperimentConfig {
    pub channel: ChannelChoice,
    pub temperature: f64,
    pub coupling: f64,
    pub omega0: f64,
    pub omegac: f64,
    /// None means the 20 omega_c default.
    pub omegamax: Option<f64>,
    pub t_start: f64,
    pub t_end: f64,
    pub points: usize,
    pub u: f64,
    pub v: f64,
    pub omega1: f64,
    pub omega2: f64,
    pub high_t_approx: bool,
    pub emit_svg: bool,
    pub out: Option<PathBuf>,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        ExperimentConfig {
            channel: ChannelChoice::Both,
            temperature: 50.0,
            coupling: 0.02,
            omega0: 1.0,
            omegac: 15.0,
            omegamax: None,
            t_start: 0.0,
            t_end: 1.0,
            points: 100,
            u: 0.0,
            v: 0.0,
            omega1: 0.1,
            omega2: 0.2,
            high_t_approx: false,
            emit_svg: false,
            out: None,
        }
    }
}

impl ExperimentConfig {
    /// Flat key=value config with '#' comments.
    pub fn apply_file(&mut self, text: &str) -> Result<(), CliError> {
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line.split_once('=').ok_or_else(|| {
                CliError::Config(format!("line {}: expected key=value", lineno + 1))
            })?;
            self.set(key.trim(), value.trim())?;
        }
        Ok(())
    }

    pub fn set(&mut self, key: &str, value: &str) -> Result<(), CliError> {
        let num = |v: &str| -> Result<f64, CliError> {
            v.parse::<f64>()
                .map_err(|_| CliError::Config(format!("invalid number '{v}' for key '{key}'")))
        };
        let flag = |v: &str| -> Result<bool, CliError> {
            match v {
                "true" | "1" | "yes" => Ok(true),
                "false" | "0" | "no" => Ok(false),
                _ => Err(CliError::Config(format!(
                    "invalid flag '{v}' for key '{key}'"
                ))),
            }
        };
        match key {
            "channel" => self.channel = ChannelChoice::parse(value)?,
            "T" => self.temperature = num(value)?,
            "alpha" => self.coupling = num(value)?,
            "omega0" => self.omega0 = num(value)?,
            "omegac" => self.omegac = num(value)?,
            "omegamax" => self.omegamax = Some(num(value)?),
            "t_start" => self.t_start = num(value)?,
            "t_end" => self.t_end = num(value)?,
            "points" => {
                self.points = value.parse::<usize>().map_err(|_| {
                    CliError::Config(format!("invalid integer '{value}' for 'points'"))
                })?
            }
            "u" => self.u = num(value)?,
            "v" => self.v = num(value)?,
            "omega1" => self.omega1 = num(value)?,
            "omega2" => self.omega2 = num(value)?,
            "high_t_approx" => self.high_t_approx = flag(value)?,
            "emit_svg" => self.emit_svg = flag(value)?,
            "out" => self.out = Some(PathBuf::from(value)),
            other => return Err(CliError::Config(format!("unknown key '{other}'"))),
        }
        Ok(())
    }

    pub fn validate(&self) -> Result<(), CliError> {
        if self.points < 2 {
            return Err(CliError::Config("points must be >= 2".into()));
        }
        if !(self.t_end > self.t_start && self.t_start >= 0.0) {
            return Err(CliError::Config(
                "time grid must satisfy t_end > t_start >= 0".into(),
            ));
        }
        if self.temperature <= 0.0 || self.omegac <= 0.0 {
            return Err(CliError::Config("T and omegac must be positive".into()));
        }
        if self.coupling < 0.0 {
            return Err(CliError::Config("alpha must be non-negative".into()));
        }
        Ok(())
    }

    pub fn micro(&self) -> MicroParams {
        let mut p = MicroParams::new(self.temperature, self.coupling, self.omega0, self.omegac);
        if let Some(cap) = self.omegamax {
            p.integration_cap = cap;
        }
        p
    }

    fn time_grid(&self) -> Vec<f64> {
        let n = self.points;
        (0..n)
            .map(|i| {
                self.t_start + (self.t_end - self.t_start) * i as f64 / (n - 1) as f64
            })
            .collect()
    }
}

fn sci(x: f64) -> String {
    format!("{:.12e}", x)
}

/// Rates, Lamb shift and channel parameters as a key=value report.
pub fn cmd_rates(cfg: &ExperimentConfig) -> Result<String, CliError> {
    cfg.validate()?;
    let p = cfg.micro();
    let r = damping_rates(&p, cfg.high_t_approx)?;
    let g = generator_from_micro(&p, cfg.high_t_approx)?;
    let mut out = String::new();
    out.push_str("# damping rates and channel parameters\n");
    writeln!(out, "gamma_zz0={}", sci(r.gamma_zz0)).unwrap();
    writeln!(out, "gamma_plus={}", sci(r.gamma_plus)).unwrap();
    writeln!(out, "gamma_minus={}", sci(r.gamma_minus)).unwrap();
    writeln!(out, "lamb_delta={}", sci(r.lamb_delta)).unwrap();
    writeln!(out, "x={}", sci(g.x)).unwrap();
    writeln!(out, "y={}", sci(g.y)).unwrap();
    writeln!(out, "z={}", sci(g.z)).unwrap();
    if g.y + g.z > 0.0 {
        let c = shape(&g, 0.0)?;
        writeln!(out, "theta={}", sci(c.theta)).unwrap();
        writeln!(out, "omega={}", sci(c.omega)).unwrap();
    } else {
        out.push_str("theta=degenerate\nomega=degenerate\n");
    }
    for w in p.regime_warnings() {
        writeln!(out, "warning: {w}").unwrap();
    }
    Ok(out)
}

/// Kraus matrices from the closed form and from the numeric pipeline, plus
/// their channel-action discrepancy.
pub struct KrausReport {
    pub text: String,
    pub discrepancy: f64,
}

fn fmt_kraus(out: &mut String, label: &str, k: &KrausSet) {
    writeln!(out, "{label} ({} operators)", k.ops.len()).unwrap();
    for (i, e) in k.ops.iter().enumerate() {
        writeln!(out, "  E{}:", i + 1).unwrap();
        for r in 0..2 {
            let row: Vec<String> = (0..2)
                .map(|c| format!("{} {}", sci(e[(r, c)].re), sci(e[(r, c)].im)))
                .collect();
            writeln!(out, "    {}", row.join("   ")).unwrap();
        }
    }
}

pub fn cmd_kraus(cfg: &ExperimentConfig, t: f64) -> Result<KrausReport, CliError> {
    cfg.validate()?;
    let p = cfg.micro();
    let g = generator_from_micro(&p, cfg.high_t_approx)?;
    let c = shape(&g, t)?;
    let closed = gdp_kraus(&c)?;
    let f = propagator(&generator_matrix(&g), t)?;
    let mut pipeline = kraus_from_choi(&choi(&f))?;
    pipeline.time_tag = Some(c.tau);
    let mut discrepancy: f64 = 0.0;
    for b in [identity(2), sigma_x(), sigma_y(), sigma_z()] {
        let d = max_abs(&(closed.apply_op(&b) - pipeline.apply_op(&b)));
        discrepancy = discrepancy.max(d);
    }
    let mut text = String::new();
    writeln!(text, "t={} tau={}", sci(t), sci(c.tau)).unwrap();
    writeln!(text, "theta={} omega={}", sci(c.theta), sci(c.omega)).unwrap();
    fmt_kraus(&mut text, "closed-form Kraus set", &closed);
    fmt_kraus(&mut text, "pipeline Kraus set", &pipeline);
    writeln!(text, "channel_action_discrepancy={}", sci(discrepancy)).unwrap();
    Ok(KrausReport { text, discrepancy })
}

/// One metrics row per grid point; see the header for the column order.
pub fn cmd_metrics(cfg: &ExperimentConfig) -> Result<String, CliError> {
    cfg.validate()?;
    let p = cfg.micro();
    let g = generator_from_micro(&p, cfg.high_t_approx)?;
    let gd = dp_comparison(&g);
    if g.y + g.z <= 0.0 {
        return Err(CliError::Config(
            "degenerate generator (alpha = 0): metrics are trivial".into(),
        ));
    }
    let rho0 = bloch_to_density(&BlochVector::from_angles(cfg.u, cfg.v))?;
    let mut out = String::new();
    out.push_str(
        "t,tau,V_gdp,V_dp,kappa_gdp,kappa_dp,S_gdp,S_dp,Tdist_gdp_init,Tdist_dp_init,Tdist_gdp_dp\n",
    );
    for t in cfg.time_grid() {
        let cg = shape(&g, t)?;
        let cd = shape(&gd, t)?;
        let rg = analytic_state(cfg.u, cfg.v, &cg);
        let rd = analytic_state(cfg.u, cfg.v, &cd);
        let cols = [
            t,
            cg.tau,
            ellipsoid_volume(&cg),
            ellipsoid_volume(&cd),
            volume_rate(&g, t),
            volume_rate(&gd, t),
            von_neumann_entropy(&rg),
            von_neumann_entropy(&rd),
            trace_distance(&rg, &rho0)?,
            trace_distance(&rd, &rho0)?,
            trace_distance(&rg, &rd)?,
        ];
        let row: Vec<String> = cols.iter().map(|x| sci(*x)).collect();
        out.push_str(&row.join(","));
        out.push('\n');
    }
    Ok(out)
}

/// Concurrence and entanglement-of-formation curves for the Bell pair, with
/// ESD times in trailing '#' metadata lines.
pub fn cmd_entangle(cfg: &ExperimentConfig) -> Result<String, CliError> {
    cfg.validate()?;
    let p = cfg.micro();
    let g = generator_from_micro(&p, cfg.high_t_approx)?;
    let (kind_a, kind_b) = match cfg.channel {
        ChannelChoice::Identity => (ChannelKind::Identity, ChannelKind::Identity),
        _ => (ChannelKind::Gdp, ChannelKind::Dp),
    };
    let mk = |kind| PairChannelConfig {
        generator: g,
        kind,
        omega1: cfg.omega1,
        omega2: cfg.omega2,
    };
    let (ca, cb) = (mk(kind_a), mk(kind_b));
    let mut out = String::new();
    out.push_str("t,C_gdp,C_dp,EoF_gdp,EoF_dp\n");
    let grid = cfg.time_grid();
    for &t in &grid {
        let c1 = ca.concurrence_at(t)?;
        let c2 = cb.concurrence_at(t)?;
        let row = [
            t,
            c1,
            c2,
            entanglement_of_formation(c1)?,
            entanglement_of_formation(c2)?,
        ];
        let cells: Vec<String> = row.iter().map(|x| sci(*x)).collect();
        out.push_str(&cells.join(","));
        out.push('\n');
    }
    let step = (cfg.t_end - cfg.t_start) / (cfg.points - 1) as f64;
    let fmt_esd = |t: Option<f64>| match t {
        Some(t) => sci(t),
        None => "none".to_string(),
    };
    writeln!(out, "# esd_gdp={}", fmt_esd(esd_time(&ca, cfg.t_end, step)?)).unwrap();
    writeln!(out, "# esd_dp={}", fmt_esd(esd_time(&cb, cfg.t_end, step)?)).unwrap();
    writeln!(out, "# assumed omegac={}", sci(cfg.omegac)).unwrap();
    Ok(out)
}

/// Cartesian sweep over (T, alpha, omega_c) triples; one metrics block per
/// combination, tagged by parameter columns.
pub fn cmd_sweep(
    cfg: &ExperimentConfig,
    triples: &[(f64, f64, f64)],
) -> Result<String, CliError> {
    if triples.is_empty() {
        return Err(CliError::Config("empty sweep".into()));
    }
    let mut out = String::new();
    out.push_str("T,alpha,omega_c,");
    let mut first = true;
    for &(temperature, alpha, omegac) in triples {
        let mut c = cfg.clone();
        c.temperature = temperature;
        c.coupling = alpha;
        c.omegac = omegac;
        c.omegamax = cfg.omegamax;
        let block = cmd_metrics(&c)?;
        let mut lines = block.lines();
        let header = lines.next().expect("metrics emits a header");
        if first {
            out.push_str(header);
            out.push('\n');
            first = false;
        }
        let tag = format!("{},{},{},", sci(temperature), sci(alpha), sci(omegac));
        for line in lines {
            out.push_str(&tag);
            out.push_str(line);
            out.push('\n');
        }
    }
    Ok(out)
}

/// The five parameter triples of the multi-parameter comparison figure.
pub const SWEEP_DEFAULT: [(f64, f64, f64); 5] = [
    (50.0, 0.005, 15.0),
    (100.0, 0.005, 50.0),
    (50.0, 0.02, 15.0),
    (50.0, 0.02, 50.0),
    (100.0, 0.02, 15.0),
];

/// Minimal polyline plot; one series per (label, points) pair.
pub fn render_svg(title: &str, series: &[(&str, Vec<(f64, f64)>)]) -> String {
    const W: f64 = 640.0;
    const H: f64 = 420.0;
    const M: f64 = 50.0;
    let all = series.iter().flat_map(|(_, pts)| pts.iter());
    let (mut x0, mut x1, mut y0, mut y1) = (f64::MAX, f64::MIN, f64::MAX, f64::MIN);
    for &(x, y) in all {
        x0 = x0.min(x);
        x1 = x1.max(x);
        y0 = y0.min(y);
        y1 = y1.max(y);
    }
    if x1 <= x0 {
        x1 = x0 + 1.0;
    }
    if y1 <= y0 {
        y1 = y0 + 1.0;
    }
    let colors = ["#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e"];
    let mut svg = format!(
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{W}\" height=\"{H}\" \
         viewBox=\"0 0 {W} {H}\">\n<rect width=\"{W}\" height=\"{H}\" fill=\"white\"/>\n\
         <text x=\"{}\" y=\"20\" text-anchor=\"middle\" font-size=\"14\">{title}</text>\n",
        W / 2.0
    );
    writeln!(
        svg,
        "<rect x=\"{M}\" y=\"{M}\" width=\"{}\" height=\"{}\" fill=\"none\" stroke=\"black\"/>",
        W - 2.0 * M,
        H - 2.0 * M
    )
    .unwrap();
    for (i, (label, pts)) in series.iter().enumerate() {
        let color = colors[i % colors.len()];
        let path: Vec<String> = pts
            .iter()
            .map(|&(x, y)| {
                let px = M + (x - x0) / (x1 - x0) * (W - 2.0 * M);
                let py = H - M - (y - y0) / (y1 - y0) * (H - 2.0 * M);
                format!("{:.2},{:.2}", px, py)
            })
            .collect();
        writeln!(
            svg,
            "<polyline points=\"{}\" fill=\"none\" stroke=\"{color}\" stroke-width=\"1.5\"/>",
            path.join(" ")
        )
        .unwrap();
        writeln!(
            svg,
            "<text x=\"{}\" y=\"{}\" font-size=\"12\" fill=\"{color}\">{label}</text>",
            W - M - 120.0,
            M + 16.0 * (i as f64 + 1.0)
        )
        .unwrap();
    }
    svg.push_str("</svg>\n");
    svg
}

/// Pull (x, column) series out of a metrics/entangle CSV for SVG plotting.
pub fn csv_series(csv: &str, columns: &[usize]) -> Vec<Vec<(f64, f64)>> {
    let mut out: Vec<Vec<(f64, f64)>> = columns.iter().map(|_| Vec::new()).collect();
    for line in csv.lines().skip(1) {
        if line.starts_with('#') {
            continue;
        }
        let cells: Vec<f64> = line
            .split(',')
            .filter_map(|c| c.parse::<f64>().ok())
            .collect();
        if cells.len() < 2 {
            continue;
        }
        for (slot, &col) in out.iter_mut().zip(columns.iter()) {
            if col < cells.len() {
                slot.push((cells[0], cells[col]));
            }
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn fig1_cfg() -> ExperimentConfig {
        let mut cfg = ExperimentConfig::default();
        cfg.high_t_approx = true;
        cfg.points = 21;
        cfg
    }

    #[test]
    fn config_file_parsing_and_overrides() {
        let mut cfg = ExperimentConfig::default();
        cfg.apply_file("# comment\nT = 10\nalpha=0.01 # trailing\n\npoints=5\n")
            .unwrap();
        assert_eq!(cfg.temperature, 10.0);
        assert_eq!(cfg.coupling, 0.01);
        assert_eq!(cfg.points, 5);
        cfg.set("T", "25").unwrap();
        assert_eq!(cfg.temperature, 25.0);
        assert!(cfg.apply_file("nonsense\n").is_err());
        assert!(cfg.set("bogus_key", "1").is_err());
    }

    #[test]
    fn config_validation() {
        let mut cfg = ExperimentConfig::default();
        cfg.points = 1;
        assert!(cfg.validate().is_err());
        cfg.points = 10;
        cfg.t_end = 0.0;
        assert!(cfg.validate().is_err());
    }

    #[test]
    fn rates_report_fig1() {
        let report = cmd_rates(&fig1_cfg()).unwrap();
        assert!(report.contains("y=6.28318"));
        assert!(report.contains("gamma_zz0=6.28318"));
        // regime is fine at Fig-1 parameters: no warnings
        assert!(!report.contains("warning"));
        let mut warn_cfg = fig1_cfg();
        warn_cfg.omega0 = 10.0;
        assert!(cmd_rates(&warn_cfg).unwrap().contains("warning"));
    }

    #[test]
    fn rates_report_zero_coupling() {
        let mut cfg = fig1_cfg();
        cfg.coupling = 0.0;
        let report = cmd_rates(&cfg).unwrap();
        assert!(report.contains("gamma_zz0=0.000000000000e0"));
        assert!(report.contains("theta=degenerate"));
    }

    #[test]
    fn kraus_report_small_discrepancy() {
        let rep = cmd_kraus(&fig1_cfg(), 0.1).unwrap();
        assert!(rep.discrepancy < 1e-9, "discrepancy {}", rep.discrepancy);
        assert!(rep.text.contains("closed-form Kraus set"));
        let rep0 = cmd_kraus(&fig1_cfg(), 0.0).unwrap();
        assert!(rep0.discrepancy < 1e-12);
    }

    #[test]
    fn metrics_first_row_and_ordering() {
        let csv = cmd_metrics(&fig1_cfg()).unwrap();
        let mut lines = csv.lines();
        let header = lines.next().unwrap();
        assert!(header.starts_with("t,tau,V_gdp,V_dp"));
        let first: Vec<f64> = lines
            .next()
            .unwrap()
            .split(',')
            .map(|c| c.parse().unwrap())
            .collect();
        let v0 = 4.0 * std::f64::consts::PI / 3.0;
        assert!((first[2] - v0).abs() < 1e-10 && (first[3] - v0).abs() < 1e-10);
        assert!(first[6].abs() < 1e-10 && first[7].abs() < 1e-10); // entropies 0
        assert!(first[8].abs() < 1e-12 && first[9].abs() < 1e-12 && first[10].abs() < 1e-12);
        // V_gdp > V_dp at every later grid point
        for line in csv.lines().skip(2) {
            let row: Vec<f64> = line.split(',').map(|c| c.parse().unwrap()).collect();
            assert!(row[2] > row[3], "t={}", row[0]);
        }
    }

    #[test]
    fn metrics_deterministic_output() {
        let a = cmd_metrics(&fig1_cfg()).unwrap();
        let b = cmd_metrics(&fig1_cfg()).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn entangle_identity_mode() {
        let mut cfg = fig1_cfg();
        cfg.channel = ChannelChoice::Identity;
        cfg.points = 5;
        cfg.t_end = 0.2;
        let csv = cmd_entangle(&cfg).unwrap();
        for line in csv.lines().skip(1).filter(|l| !l.starts_with('#')) {
            let row: Vec<f64> = line.split(',').map(|c| c.parse().unwrap()).collect();
            assert!((row[1] - 1.0).abs() < 1e-6 && (row[2] - 1.0).abs() < 1e-6);
        }
        assert!(csv.contains("# esd_gdp=none"));
    }

    #[test]
    fn sweep_single_point_matches_metrics() {
        let cfg = fig1_cfg();
        let sweep = cmd_sweep(&cfg, &[(cfg.temperature, cfg.coupling, cfg.omegac)]).unwrap();
        let metrics = cmd_metrics(&cfg).unwrap();
        let sweep_rows: Vec<&str> = sweep.lines().skip(1).collect();
        let metric_rows: Vec<&str> = metrics.lines().skip(1).collect();
        assert_eq!(sweep_rows.len(), metric_rows.len());
        for (s, m) in sweep_rows.iter().zip(metric_rows.iter()) {
            assert!(s.ends_with(m));
        }
        assert!(cmd_sweep(&cfg, &[]).is_err());
    }

    #[test]
    fn svg_contains_polylines() {
        let svg = render_svg("test", &[("a", vec![(0.0, 0.0), (1.0, 1.0)])]);
        assert!(svg.contains("<polyline"));
        assert!(svg.contains("</svg>"));
    }
}
