//! Plain-text data files: `#`-prefixed metadata, one comma-separated
//! column line, then rows. Floats are written in scientific notation with a
//! configurable number of significant digits; 17 digits round-trip exactly.

use std::fmt::Write as _;

use breitham_core::{
    Basis, CriticalEstimate, FockState, LatticeSpec, MassLevel, ModeSet, ModelParams, Momentum,
    Parity, ScalingFit, ScanRecord, SymmetricOperator, Vertex,
};

use crate::error::{CliError, Result};

pub const DEFAULT_PRECISION: usize = 17;

pub fn fmt_float(x: f64, precision: usize) -> String {
    if x.is_nan() {
        return "NaN".into();
    }
    if x.is_infinite() {
        return if x > 0.0 { "inf".into() } else { "-inf".into() };
    }
    format!("{:.*e}", precision.clamp(1, 17) - 1, x)
}

fn parse_err(line: usize, msg: impl Into<String>) -> CliError {
    CliError::Parse {
        path: "<input>".into(),
        line,
        msg: msg.into(),
    }
}

fn parse_f64(s: &str, line: usize) -> Result<f64> {
    s.trim()
        .parse::<f64>()
        .map_err(|_| parse_err(line, format!("not a number: {s:?}")))
}

fn parse_usize(s: &str, line: usize) -> Result<usize> {
    s.trim()
        .parse::<usize>()
        .map_err(|_| parse_err(line, format!("not an integer: {s:?}")))
}

/// Metadata emitted at the top of every data file.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct Meta {
    /// `(key, value)` pairs echoing the run configuration.
    pub config: Vec<(String, String)>,
    pub lattice: Option<LatticeSpec>,
    pub extra: Vec<String>,
}

impl Meta {
    pub fn render(&self, out: &mut String) {
        let _ = writeln!(out, "# breitham {}", env!("CARGO_PKG_VERSION"));
        if !self.config.is_empty() {
            let echo: Vec<String> = self
                .config
                .iter()
                .map(|(k, v)| format!("{k}={v}"))
                .collect();
            let _ = writeln!(out, "# config: {}", echo.join(" "));
        }
        if let Some(l) = &self.lattice {
            let _ = writeln!(
                out,
                "# lattice: d={} N={} dk={}",
                l.dim(),
                l.half_extent(),
                l.dk()
            );
        }
        for e in &self.extra {
            let _ = writeln!(out, "# {e}");
        }
    }
}

/// Non-comment lines with their 1-based line numbers.
fn data_lines(text: &str) -> impl Iterator<Item = (usize, &str)> {
    text.lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.trim_end_matches('\r')))
        .filter(|(_, l)| !l.starts_with('#') && !l.trim().is_empty())
}

type Rows<'t> = Vec<(usize, &'t str)>;

/// Splits off and checks the column line; returns the row lines.
fn expect_columns(text: &str, check: impl Fn(&[&str]) -> bool) -> Result<(Vec<String>, Rows<'_>)> {
    let mut lines = data_lines(text);
    let (n, head) = lines
        .next()
        .ok_or_else(|| parse_err(0, "missing column line"))?;
    let cols: Vec<&str> = head.split(',').map(str::trim).collect();
    if !check(&cols) {
        return Err(parse_err(n, format!("unexpected columns {head:?}")));
    }
    Ok((
        cols.iter().map(|c| c.to_string()).collect(),
        lines.collect(),
    ))
}

fn cells(line: &str, want: usize, n: usize) -> Result<Vec<&str>> {
    let c: Vec<&str> = line.split(',').collect();
    if c.len() != want {
        return Err(parse_err(
            n,
            format!("expected {want} fields, found {}", c.len()),
        ));
    }
    Ok(c)
}

// ---- basis dump ----

#[derive(Debug, Clone, PartialEq)]
pub struct BasisDump {
    pub dim: usize,
    pub half_extent: u32,
    pub states: Vec<FockState>,
}

pub fn basis_header(lattice: &LatticeSpec, count: usize) -> String {
    format!(
        "d={} N={} count={count}",
        lattice.dim(),
        lattice.half_extent()
    )
}

pub fn write_basis(basis: &Basis, meta: &Meta) -> String {
    let mut out = String::new();
    meta.render(&mut out);
    let _ = writeln!(out, "# {}", basis_header(basis.lattice(), basis.len()));
    for s in basis.states() {
        let _ = writeln!(out, "{s}");
    }
    out
}

pub fn parse_basis(text: &str) -> Result<BasisDump> {
    let mut header = None;
    for (i, line) in text.lines().enumerate() {
        if let Some(rest) = line.strip_prefix("# d=") {
            header = Some((i + 1, format!("d={rest}")));
        }
    }
    let (hn, header) = header.ok_or_else(|| parse_err(0, "missing d/N/count header"))?;
    let mut dim = None;
    let mut n = None;
    let mut count = None;
    for kv in header.split_whitespace() {
        match kv.split_once('=') {
            Some(("d", v)) => dim = Some(parse_usize(v, hn)?),
            Some(("N", v)) => n = Some(parse_usize(v, hn)? as u32),
            Some(("count", v)) => count = Some(parse_usize(v, hn)?),
            _ => return Err(parse_err(hn, format!("bad header field {kv:?}"))),
        }
    }
    let (dim, half_extent, count) = match (dim, n, count) {
        (Some(d), Some(n), Some(c)) => (d, n, c),
        _ => return Err(parse_err(hn, "header needs d, N and count")),
    };
    let mut states = Vec::new();
    for (ln, line) in data_lines(text) {
        let mut partons = Vec::new();
        for tuple in line.split(';') {
            let comps = tuple
                .split(',')
                .map(|c| {
                    c.trim()
                        .parse::<i32>()
                        .map_err(|_| parse_err(ln, format!("bad component {c:?}")))
                })
                .collect::<Result<Vec<i32>>>()?;
            if comps.len() != dim {
                return Err(parse_err(
                    ln,
                    format!("momentum {tuple:?} is not {dim}-dimensional"),
                ));
            }
            partons.push(Momentum::new(&comps).map_err(|e| parse_err(ln, e.to_string()))?);
        }
        states.push(FockState::new(partons));
    }
    if states.len() != count {
        return Err(parse_err(
            hn,
            format!("header count {count} but {} states", states.len()),
        ));
    }
    Ok(BasisDump {
        dim,
        half_extent,
        states,
    })
}

// ---- operator dump ----

pub fn vertex_name(v: Vertex) -> &'static str {
    match v {
        Vertex::Phi3 => "phi3",
        Vertex::Phi4 => "phi4",
    }
}

pub fn mode_set_name(m: ModeSet) -> &'static str {
    match m {
        ModeSet::Restricted => "restricted",
        ModeSet::FullLattice => "full",
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct OperatorDump {
    pub dim: usize,
    pub entries: Vec<(usize, usize, f64)>,
}

pub fn write_operator(op: &SymmetricOperator, meta: &Meta, precision: usize) -> String {
    let mut out = String::new();
    meta.render(&mut out);
    let _ = writeln!(out, "# dim={}", op.dim());
    if let Some(p) = op.params() {
        let _ = writeln!(out, "# params: {}", params_echo(p, precision));
    }
    out.push_str("i,j,value\n");
    for &(i, j, v) in op.entries() {
        let _ = writeln!(out, "{i},{j},{}", fmt_float(v, precision));
    }
    out
}

pub fn params_echo(p: &ModelParams, precision: usize) -> String {
    format!(
        "m0_sq={} g0={} mK_sq={} vertex={} mode_set={}",
        fmt_float(p.m0_sq(), precision),
        fmt_float(p.g0(), precision),
        fmt_float(p.mk_sq(), precision),
        vertex_name(p.vertex()),
        mode_set_name(p.mode_set()),
    )
}

pub fn parse_operator(text: &str) -> Result<OperatorDump> {
    let dim = text
        .lines()
        .find_map(|l| l.strip_prefix("# dim="))
        .ok_or_else(|| parse_err(0, "missing dim header"))
        .and_then(|v| parse_usize(v, 0))?;
    let (_, rows) = expect_columns(text, |c| c == ["i", "j", "value"])?;
    let mut entries = Vec::with_capacity(rows.len());
    for (n, line) in rows {
        let c = cells(line, 3, n)?;
        entries.push((
            parse_usize(c[0], n)?,
            parse_usize(c[1], n)?,
            parse_f64(c[2], n)?,
        ));
    }
    Ok(OperatorDump { dim, entries })
}

// ---- levels ----

#[derive(Debug, Clone, PartialEq)]
pub struct LevelRow {
    /// 1-based level number.
    pub n: usize,
    pub energy: f64,
    pub mass_sq: f64,
    /// NaN when `mass_sq < 0`.
    pub mass: f64,
    /// `+1`, `-1`, or `0` when unknown.
    pub parity: i8,
}

impl From<&MassLevel> for LevelRow {
    fn from(l: &MassLevel) -> Self {
        LevelRow {
            n: l.index + 1,
            energy: l.energy,
            mass_sq: l.mass_sq,
            mass: l.mass().unwrap_or(f64::NAN),
            parity: l.parity.map_or(0, |p| p.sign() as i8),
        }
    }
}

pub fn write_levels(levels: &[MassLevel], meta: &Meta, precision: usize) -> String {
    let mut out = String::new();
    meta.render(&mut out);
    out.push_str("n,E,M_sq,M,parity\n");
    for l in levels.iter().map(LevelRow::from) {
        let _ = writeln!(
            out,
            "{},{},{},{},{}",
            l.n,
            fmt_float(l.energy, precision),
            fmt_float(l.mass_sq, precision),
            fmt_float(l.mass, precision),
            l.parity
        );
    }
    out
}

pub fn parse_levels(text: &str) -> Result<Vec<LevelRow>> {
    let (_, rows) = expect_columns(text, |c| c == ["n", "E", "M_sq", "M", "parity"])?;
    rows.into_iter()
        .map(|(n, line)| {
            let c = cells(line, 5, n)?;
            let parity = match c[4].trim() {
                "1" => 1,
                "-1" => -1,
                "0" => 0,
                other => return Err(parse_err(n, format!("bad parity {other:?}"))),
            };
            Ok(LevelRow {
                n: parse_usize(c[0], n)?,
                energy: parse_f64(c[1], n)?,
                mass_sq: parse_f64(c[2], n)?,
                mass: parse_f64(c[3], n)?,
                parity,
            })
        })
        .collect()
}

// ---- scan ----

/// Scan rows as written: parities are not part of the file.
#[derive(Debug, Clone, PartialEq)]
pub struct ScanRow {
    pub lambda: f64,
    pub kappa: f64,
    pub m0_sq: f64,
    pub g0: f64,
    pub energies: Vec<f64>,
    pub mass_sq: Vec<f64>,
}

impl From<&ScanRecord> for ScanRow {
    fn from(r: &ScanRecord) -> Self {
        ScanRow {
            lambda: r.lambda,
            kappa: r.kappa,
            m0_sq: r.m0_sq,
            g0: r.g0,
            energies: r.energies.clone(),
            mass_sq: r.mass_sq.clone(),
        }
    }
}

pub fn scan_columns(levels: usize) -> String {
    let mut cols = vec![
        "lambda".to_string(),
        "kappa".into(),
        "m0_sq".into(),
        "g0".into(),
    ];
    cols.extend((1..=levels).map(|i| format!("E{i}")));
    cols.extend((1..=levels).map(|i| format!("M{i}_sq")));
    cols.join(",")
}

/// Rows shorter than `levels` (tiny bases) are padded with NaN.
pub fn write_scan(
    records: &[ScanRecord],
    levels: usize,
    failures: &[(f64, String)],
    meta: &Meta,
    precision: usize,
) -> String {
    let mut out = String::new();
    meta.render(&mut out);
    for (k, why) in failures {
        let _ = writeln!(out, "# failed kappa={}: {why}", fmt_float(*k, precision));
    }
    out.push_str(&scan_columns(levels));
    out.push('\n');
    for r in records {
        let mut row = vec![
            fmt_float(r.lambda, precision),
            fmt_float(r.kappa, precision),
            fmt_float(r.m0_sq, precision),
            fmt_float(r.g0, precision),
        ];
        for series in [&r.energies, &r.mass_sq] {
            for i in 0..levels {
                row.push(fmt_float(
                    series.get(i).copied().unwrap_or(f64::NAN),
                    precision,
                ));
            }
        }
        out.push_str(&row.join(","));
        out.push('\n');
    }
    out
}

pub fn parse_scan(text: &str) -> Result<Vec<ScanRow>> {
    let (cols, rows) = expect_columns(text, |c| {
        c.len() >= 6 && c.len() % 2 == 0 && c[..4] == ["lambda", "kappa", "m0_sq", "g0"]
    })?;
    let levels = (cols.len() - 4) / 2;
    if cols != scan_columns(levels).split(',').collect::<Vec<_>>() {
        return Err(parse_err(0, "scan columns out of order"));
    }
    rows.into_iter()
        .map(|(n, line)| {
            let c = cells(line, cols.len(), n)?;
            let v = c
                .iter()
                .map(|s| parse_f64(s, n))
                .collect::<Result<Vec<f64>>>()?;
            Ok(ScanRow {
                lambda: v[0],
                kappa: v[1],
                m0_sq: v[2],
                g0: v[3],
                energies: v[4..4 + levels].to_vec(),
                mass_sq: v[4 + levels..].to_vec(),
            })
        })
        .collect()
}

// ---- critical ----

#[derive(Debug, Clone, PartialEq)]
pub struct CriticalRow {
    pub lambda: f64,
    pub half_extent: u32,
    pub kappa_lo: f64,
    pub kappa_hi: f64,
    pub kappa_crit: f64,
    pub width: f64,
    pub m1_sq_lo: f64,
    pub m1_sq_hi: f64,
    /// NaN without a tabulated reference.
    pub kappa_ref: f64,
    pub alpha: f64,
}

impl From<&CriticalEstimate> for CriticalRow {
    fn from(e: &CriticalEstimate) -> Self {
        CriticalRow {
            lambda: e.lambda,
            half_extent: e.half_extent,
            kappa_lo: e.kappa_lo,
            kappa_hi: e.kappa_hi,
            kappa_crit: e.kappa_crit(),
            width: e.width(),
            m1_sq_lo: e.m1_sq_lo,
            m1_sq_hi: e.m1_sq_hi,
            kappa_ref: e.reference.unwrap_or(f64::NAN),
            alpha: e.alpha().unwrap_or(f64::NAN),
        }
    }
}

const CRITICAL_COLUMNS: [&str; 10] = [
    "lambda",
    "N",
    "kappa_lo",
    "kappa_hi",
    "kappa_crit",
    "width",
    "M1_sq_lo",
    "M1_sq_hi",
    "kappa_ref",
    "alpha",
];

pub fn write_critical(estimates: &[CriticalEstimate], meta: &Meta, precision: usize) -> String {
    let mut out = String::new();
    meta.render(&mut out);
    out.push_str(&CRITICAL_COLUMNS.join(","));
    out.push('\n');
    for r in estimates.iter().map(CriticalRow::from) {
        let f = |x| fmt_float(x, precision);
        let _ = writeln!(
            out,
            "{},{},{},{},{},{},{},{},{},{}",
            f(r.lambda),
            r.half_extent,
            f(r.kappa_lo),
            f(r.kappa_hi),
            f(r.kappa_crit),
            f(r.width),
            f(r.m1_sq_lo),
            f(r.m1_sq_hi),
            f(r.kappa_ref),
            f(r.alpha)
        );
    }
    out
}

pub fn parse_critical(text: &str) -> Result<Vec<CriticalRow>> {
    let (_, rows) = expect_columns(text, |c| c == CRITICAL_COLUMNS)?;
    rows.into_iter()
        .map(|(n, line)| {
            let c = cells(line, 10, n)?;
            let f = |i: usize| parse_f64(c[i], n);
            Ok(CriticalRow {
                lambda: f(0)?,
                half_extent: parse_usize(c[1], n)? as u32,
                kappa_lo: f(2)?,
                kappa_hi: f(3)?,
                kappa_crit: f(4)?,
                width: f(5)?,
                m1_sq_lo: f(6)?,
                m1_sq_hi: f(7)?,
                kappa_ref: f(8)?,
                alpha: f(9)?,
            })
        })
        .collect()
}

// ---- fit ----

const POINT_COLUMNS: [&str; 2] = ["kappa", "aM1"];

pub fn write_points(points: &[(f64, f64)], meta: &Meta, precision: usize) -> String {
    let mut out = String::new();
    meta.render(&mut out);
    out.push_str(&POINT_COLUMNS.join(","));
    out.push('\n');
    for &(k, m) in points {
        let _ = writeln!(
            out,
            "{},{}",
            fmt_float(k, precision),
            fmt_float(m, precision)
        );
    }
    out
}

pub fn parse_points(text: &str) -> Result<Vec<(f64, f64)>> {
    let (_, rows) = expect_columns(text, |c| c == POINT_COLUMNS)?;
    rows.into_iter()
        .map(|(n, line)| {
            let c = cells(line, 2, n)?;
            Ok((parse_f64(c[0], n)?, parse_f64(c[1], n)?))
        })
        .collect()
}

/// True when the first column line belongs to a scan file.
pub fn is_scan_file(text: &str) -> bool {
    data_lines(text)
        .next()
        .is_some_and(|(_, l)| l.starts_with("lambda,kappa,"))
}

const FIT_COLUMNS: [&str; 10] = [
    "C",
    "kappa_crit",
    "kappa_min",
    "kappa_max",
    "points",
    "rms_log",
    "A",
    "nu",
    "rms_power",
    "log_not_worse",
];

pub fn write_fit(fit: &ScalingFit, meta: &Meta, precision: usize) -> String {
    let mut out = String::new();
    meta.render(&mut out);
    out.push_str(&FIT_COLUMNS.join(","));
    out.push('\n');
    let f = |x| fmt_float(x, precision);
    let _ = writeln!(
        out,
        "{},{},{},{},{},{},{},{},{},{}",
        f(fit.amplitude),
        f(fit.kappa_crit),
        f(fit.kappa_min),
        f(fit.kappa_max),
        fit.points_used,
        f(fit.log_corrected_rms),
        f(fit.power_amplitude),
        f(fit.exponent),
        f(fit.power_rms),
        u8::from(fit.log_corrected_rms <= fit.power_rms)
    );
    out
}

pub fn parse_fit(text: &str) -> Result<ScalingFit> {
    let (_, rows) = expect_columns(text, |c| c == FIT_COLUMNS)?;
    let (n, line) = rows
        .first()
        .copied()
        .ok_or_else(|| parse_err(0, "missing fit row"))?;
    let c = cells(line, 10, n)?;
    let f = |i: usize| parse_f64(c[i], n);
    Ok(ScalingFit {
        amplitude: f(0)?,
        kappa_crit: f(1)?,
        kappa_min: f(2)?,
        kappa_max: f(3)?,
        points_used: parse_usize(c[4], n)?,
        log_corrected_rms: f(5)?,
        power_amplitude: f(6)?,
        exponent: f(7)?,
        power_rms: f(8)?,
    })
}

// ---- distribution ----

#[derive(Debug, Clone, PartialEq)]
pub struct DistributionRow {
    pub x: f64,
    /// Absent in single-coupling files.
    pub g0: Option<f64>,
    pub f_bar: f64,
}

/// `x,f_bar` rows for one coupling; zero bins omitted.
pub fn write_distribution(rows: &[(f64, f64)], meta: &Meta, precision: usize) -> String {
    let mut out = String::new();
    meta.render(&mut out);
    out.push_str("x,f_bar\n");
    for &(x, f) in rows {
        let _ = writeln!(
            out,
            "{},{}",
            fmt_float(x, precision),
            fmt_float(f, precision)
        );
    }
    out
}

/// `x,g0,f_bar` over the full `(g0, x)` grid, `g0` outermost.
pub fn write_distribution_sweep(rows: &[(f64, f64, f64)], meta: &Meta, precision: usize) -> String {
    let mut out = String::new();
    meta.render(&mut out);
    out.push_str("x,g0,f_bar\n");
    for &(x, g0, f) in rows {
        let _ = writeln!(
            out,
            "{},{},{}",
            fmt_float(x, precision),
            fmt_float(g0, precision),
            fmt_float(f, precision)
        );
    }
    out
}

pub fn parse_distribution(text: &str) -> Result<Vec<DistributionRow>> {
    let (cols, rows) = expect_columns(text, |c| c == ["x", "f_bar"] || c == ["x", "g0", "f_bar"])?;
    let sweep = cols.len() == 3;
    rows.into_iter()
        .map(|(n, line)| {
            let c = cells(line, cols.len(), n)?;
            Ok(if sweep {
                DistributionRow {
                    x: parse_f64(c[0], n)?,
                    g0: Some(parse_f64(c[1], n)?),
                    f_bar: parse_f64(c[2], n)?,
                }
            } else {
                DistributionRow {
                    x: parse_f64(c[0], n)?,
                    g0: None,
                    f_bar: parse_f64(c[1], n)?,
                }
            })
        })
        .collect()
}

pub fn parity_label(p: Option<Parity>) -> i8 {
    p.map_or(0, |p| p.sign() as i8)
}

#[cfg(test)]
mod tests {
    use super::*;
    use breitham_core::{build_lattice, enumerate_basis};

    #[test]
    fn seventeen_digits_round_trip() {
        for x in [
            0.1,
            1.0 / 3.0,
            -2.5e-300,
            6.02214076e23,
            f64::MIN_POSITIVE,
            0.0,
        ] {
            let s = fmt_float(x, DEFAULT_PRECISION);
            assert_eq!(s.parse::<f64>().unwrap().to_bits(), x.to_bits(), "{s}");
        }
        assert_eq!(fmt_float(1.0, 17), "1.0000000000000000e0");
        assert_eq!(fmt_float(1.0, 3), "1.00e0");
        assert_eq!(fmt_float(f64::NAN, 17), "NaN");
    }

    #[test]
    fn basis_dump_layout() {
        let l = build_lattice(3, 3, 1.0).unwrap();
        let b = enumerate_basis(&l);
        let text = write_basis(&b, &Meta::default());
        assert!(text.contains("# d=3 N=3 count=6\n"));
        assert!(text.lines().any(|l| l == "1,1,1;2,2,2"));
        let back = parse_basis(&text).unwrap();
        assert_eq!((back.dim, back.half_extent), (3, 3));
        assert_eq!(back.states, b.states());
    }

    #[test]
    fn rejects_malformed_rows() {
        assert!(parse_points("kappa,aM1\n0.1\n").is_err());
        assert!(parse_points("kappa,x\n").is_err());
        assert!(parse_levels("n,E,M_sq,M,parity\n1,2,3,4,7\n").is_err());
        assert!(parse_basis("# d=1 N=2 count=3\n2\n1;1\n").is_err());
    }

    #[test]
    fn scan_rows_pad_short_spectra() {
        let r = ScanRecord {
            lambda: 0.0,
            kappa: 0.1,
            m0_sq: 2.0,
            g0: 0.0,
            energies: vec![1.0],
            mass_sq: vec![0.5],
            parities: vec![None],
        };
        let text = write_scan(&[r], 2, &[], &Meta::default(), 17);
        let rows = parse_scan(&text).unwrap();
        assert_eq!(rows[0].energies[0], 1.0);
        assert!(rows[0].energies[1].is_nan());
    }
}
