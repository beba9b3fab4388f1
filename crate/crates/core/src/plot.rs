//! Report serialization (versioned CSV) and self-contained SVG line charts
//! of the sweep curves: one line per variant, mean over trials with min/max
//! whiskers.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use crate::bounds::{ParamWindow, WindowMode};
use crate::error::{Error, Result};
use crate::geometry::space_from_header;
use crate::sweep::{PairsMode, SweepMeta, SweepReport, SweepRow, Variant};

/// Versioned schema line; the first line of every report file.
pub const REPORT_SCHEMA: &str = "# proximet-report v1";
/// Fixed column header of report rows.
pub const REPORT_CSV_HEADER: &str = "q,trial,variant,r2approx,delta_n,good_index_count,runtime_ms";

fn fmt_opt(x: Option<f64>) -> String {
    x.map_or("nan".to_string(), |v| format!("{v}"))
}

fn window_str(w: &ParamWindow) -> String {
    format!(
        "lower={} upper={} nonempty={} mode={}",
        w.lower, w.upper, w.nonempty, w.mode
    )
}

fn parse_window(s: &str) -> Result<ParamWindow> {
    let mut map = BTreeMap::new();
    for part in s.split_whitespace() {
        if let Some((k, v)) = part.split_once('=') {
            map.insert(k.to_string(), v.to_string());
        }
    }
    let get = |k: &str| -> Result<&String> {
        map.get(k)
            .ok_or_else(|| Error::parameter(format!("window string missing `{k}`")))
    };
    let mode = match get("mode")?.as_str() {
        "insertion_only" => WindowMode::InsertionOnly,
        "combined" => WindowMode::Combined,
        other => return Err(Error::parameter(format!("unknown window mode `{other}`"))),
    };
    Ok(ParamWindow {
        lower: get("lower")?.parse().map_err(|_| Error::parameter("bad window lower"))?,
        upper: get("upper")?.parse().map_err(|_| Error::parameter("bad window upper"))?,
        nonempty: get("nonempty")? == "true",
        mode,
    })
}

/// Serialize a report: structured `# key: value` metadata comments followed
/// by the versioned column header and one CSV row per measurement.
pub fn report_to_csv(report: &SweepReport) -> String {
    let m = &report.meta;
    let mut out = String::new();
    let _ = writeln!(out, "{REPORT_SCHEMA}");
    let _ = writeln!(out, "# label: {}", m.label);
    let _ = writeln!(out, "# n: {}", m.n);
    let _ = writeln!(out, "# reference_edges: {}", m.reference_edges);
    let _ = writeln!(out, "# p: {}", m.p);
    let q_list = m.q_grid.iter().map(|q| format!("{q}")).collect::<Vec<_>>().join(",");
    let _ = writeln!(out, "# q_grid: {q_list}");
    let _ = writeln!(out, "# tau: {}", m.tau);
    let _ = writeln!(out, "# trials: {}", m.trials);
    let _ = writeln!(out, "# master_seed: {}", m.master_seed);
    let _ = writeln!(out, "# pairs: {}", m.pairs_mode);
    if let Some(space) = &m.space {
        for (key, value) in space.meta_pairs() {
            let _ = writeln!(out, "# {key}: {value}");
        }
    }
    if let Some(r) = m.r_used {
        let _ = writeln!(out, "# r: {r}");
    }
    if let Some(s) = m.s_hat {
        let _ = writeln!(out, "# s_hat: {s}");
    }
    if let Some(l) = m.l_hat {
        let _ = writeln!(out, "# l_hat: {l}");
    }
    if let Some(w) = &m.insertion_window {
        let _ = writeln!(out, "# insertion_window: {}", window_str(w));
    }
    if let Some(w) = &m.combined_window {
        let _ = writeln!(out, "# combined_window: {}", window_str(w));
    }
    for w in &m.warnings {
        let _ = writeln!(out, "# warning: {w}");
    }
    let _ = writeln!(out, "{REPORT_CSV_HEADER}");
    for row in &report.rows {
        let _ = writeln!(
            out,
            "{},{},{},{},{},{},{}",
            row.q,
            row.trial,
            row.variant,
            row.r2approx,
            fmt_opt(row.delta_n),
            row.good_index_count,
            row.runtime_ms
        );
    }
    out
}

pub fn write_report_csv(report: &SweepReport, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    std::fs::write(path, report_to_csv(report)).map_err(|e| Error::io(path, e))
}

/// Parse a report file back into memory; the inverse of `report_to_csv`.
pub fn read_report_csv(path: impl AsRef<Path>) -> Result<SweepReport> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    parse_report_csv(&text, path)
}

fn parse_report_csv(text: &str, path: &Path) -> Result<SweepReport> {
    let mut meta_map: BTreeMap<String, String> = BTreeMap::new();
    let mut warnings = Vec::new();
    let mut rows = Vec::new();
    let mut saw_header = false;
    for (idx, raw) in text.lines().enumerate() {
        let lineno = idx + 1;
        let line = raw.trim();
        if line.is_empty() {
            continue;
        }
        if let Some(comment) = line.strip_prefix('#') {
            let comment = comment.trim();
            if comment.starts_with("proximet-report") {
                continue;
            }
            if let Some((k, v)) = comment.split_once(':') {
                let (k, v) = (k.trim().to_string(), v.trim().to_string());
                if k == "warning" {
                    warnings.push(v);
                } else {
                    meta_map.insert(k, v);
                }
            }
            continue;
        }
        if line == REPORT_CSV_HEADER {
            saw_header = true;
            continue;
        }
        if !saw_header {
            return Err(Error::parse(path, lineno, "data before column header".to_string()));
        }
        let fields: Vec<&str> = line.split(',').collect();
        if fields.len() != 7 {
            return Err(Error::parse(path, lineno, format!("expected 7 fields, got {}", fields.len())));
        }
        let bad = |what: &str| Error::parse(path, lineno, format!("bad {what}"));
        let delta_n = if fields[4] == "nan" {
            None
        } else {
            Some(fields[4].parse::<f64>().map_err(|_| bad("delta_n"))?)
        };
        rows.push(SweepRow {
            q: fields[0].parse().map_err(|_| bad("q"))?,
            trial: fields[1].parse().map_err(|_| bad("trial"))?,
            variant: Variant::from_str(fields[2]).map_err(|_| bad("variant"))?,
            r2approx: fields[3].parse().map_err(|_| bad("r2approx"))?,
            delta_n,
            good_index_count: fields[5].parse().map_err(|_| bad("good_index_count"))?,
            runtime_ms: fields[6].parse().map_err(|_| bad("runtime_ms"))?,
        });
    }
    if !saw_header {
        return Err(Error::parse(path, 1, "missing column header".to_string()));
    }

    let get = |k: &str| -> Result<&String> {
        meta_map
            .get(k)
            .ok_or_else(|| Error::parse(path, 1, format!("missing metadata key `{k}`")))
    };
    let parse_f64 = |k: &str| -> Result<f64> {
        get(k)?.parse().map_err(|_| Error::parse(path, 1, format!("bad metadata `{k}`")))
    };
    let opt_f64 = |k: &str| -> Result<Option<f64>> {
        meta_map
            .get(k)
            .map(|v| v.parse::<f64>().map_err(|_| Error::parse(path, 1, format!("bad metadata `{k}`"))))
            .transpose()
    };
    let space = if meta_map.contains_key("space") {
        Some(space_from_header(&meta_map, path)?)
    } else {
        None
    };
    let q_grid: Vec<f64> = get("q_grid")?
        .split(',')
        .filter(|s| !s.is_empty())
        .map(|s| s.parse::<f64>().map_err(|_| Error::parse(path, 1, "bad q_grid".to_string())))
        .collect::<Result<_>>()?;
    let meta = SweepMeta {
        label: get("label")?.clone(),
        space,
        n: get("n")?.parse().map_err(|_| Error::parse(path, 1, "bad n".to_string()))?,
        reference_edges: get("reference_edges")?
            .parse()
            .map_err(|_| Error::parse(path, 1, "bad reference_edges".to_string()))?,
        r_used: opt_f64("r")?,
        p: parse_f64("p")?,
        q_grid,
        tau: parse_f64("tau")?,
        trials: get("trials")?.parse().map_err(|_| Error::parse(path, 1, "bad trials".to_string()))?,
        master_seed: get("master_seed")?
            .parse()
            .map_err(|_| Error::parse(path, 1, "bad master_seed".to_string()))?,
        pairs_mode: PairsMode::from_str(get("pairs")?)?,
        s_hat: opt_f64("s_hat")?,
        l_hat: opt_f64("l_hat")?,
        insertion_window: meta_map.get("insertion_window").map(|s| parse_window(s)).transpose()?,
        combined_window: meta_map.get("combined_window").map(|s| parse_window(s)).transpose()?,
        warnings,
    };
    Ok(SweepReport { meta, rows })
}

struct Series {
    name: &'static str,
    color: &'static str,
    /// (x, mean, min, max)
    points: Vec<(f64, f64, f64, f64)>,
}

fn aggregate(report: &SweepReport, stat: impl Fn(&SweepRow) -> Option<f64>) -> Vec<Series> {
    let variants = [
        (Variant::Observed, "observed", "#d62728"),
        (Variant::Filtered, "filtered", "#1f77b4"),
    ];
    variants
        .iter()
        .map(|&(variant, name, color)| {
            let mut points = Vec::new();
            for &q in &report.meta.q_grid {
                let values: Vec<f64> = report
                    .rows
                    .iter()
                    .filter(|r| r.variant == variant && r.q == q)
                    .filter_map(&stat)
                    .collect();
                if values.is_empty() {
                    continue;
                }
                let mean = values.iter().sum::<f64>() / values.len() as f64;
                let lo = values.iter().copied().fold(f64::INFINITY, f64::min);
                let hi = values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
                points.push((q, mean, lo, hi));
            }
            Series { name, color, points }
        })
        .collect()
}

fn fmt_tick(v: f64) -> String {
    if v == 0.0 {
        return "0".to_string();
    }
    let rounded = (v * 1e6).round() / 1e6;
    format!("{rounded}")
}

fn render_chart(title: &str, x_label: &str, y_label: &str, series: &[Series]) -> String {
    const W: f64 = 640.0;
    const H: f64 = 440.0;
    const ML: f64 = 74.0;
    const MR: f64 = 26.0;
    const MT: f64 = 44.0;
    const MB: f64 = 58.0;

    let xs: Vec<f64> = series.iter().flat_map(|s| s.points.iter().map(|p| p.0)).collect();
    let ys: Vec<f64> = series
        .iter()
        .flat_map(|s| s.points.iter().flat_map(|p| [p.2, p.3]))
        .collect();
    let (mut x0, mut x1) = min_max(&xs, (0.0, 1.0));
    let (mut y0, mut y1) = min_max(&ys, (0.0, 1.0));
    if x0 == x1 {
        x0 -= 0.5;
        x1 += 0.5;
    }
    if y0 == y1 {
        y0 -= 0.05;
        y1 += 0.05;
    }
    let pad = (y1 - y0) * 0.06;
    y0 -= pad;
    y1 += pad;

    let sx = |x: f64| ML + (x - x0) / (x1 - x0) * (W - ML - MR);
    let sy = |y: f64| H - MB - (y - y0) / (y1 - y0) * (H - MT - MB);

    let mut svg = String::new();
    let _ = writeln!(
        svg,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{W}" height="{H}" viewBox="0 0 {W} {H}">"#
    );
    let _ = writeln!(svg, r#"<rect width="{W}" height="{H}" fill="white"/>"#);
    let _ = writeln!(
        svg,
        r#"<text x="{}" y="24" font-family="sans-serif" font-size="15" text-anchor="middle">{title}</text>"#,
        W / 2.0
    );

    // axes
    let _ = writeln!(
        svg,
        r#"<line x1="{ML}" y1="{MT}" x2="{ML}" y2="{}" stroke="black"/>"#,
        H - MB
    );
    let _ = writeln!(
        svg,
        r#"<line x1="{ML}" y1="{}" x2="{}" y2="{}" stroke="black"/>"#,
        H - MB,
        W - MR,
        H - MB
    );

    for i in 0..=4 {
        let fx = x0 + (x1 - x0) * i as f64 / 4.0;
        let px = sx(fx);
        let _ = writeln!(
            svg,
            r#"<line x1="{px}" y1="{}" x2="{px}" y2="{}" stroke="black"/>"#,
            H - MB,
            H - MB + 5.0
        );
        let _ = writeln!(
            svg,
            r#"<text x="{px}" y="{}" font-family="sans-serif" font-size="11" text-anchor="middle">{}</text>"#,
            H - MB + 18.0,
            fmt_tick(fx)
        );
        let fy = y0 + (y1 - y0) * i as f64 / 4.0;
        let py = sy(fy);
        let _ = writeln!(
            svg,
            r#"<line x1="{}" y1="{py}" x2="{ML}" y2="{py}" stroke="black"/>"#,
            ML - 5.0
        );
        let _ = writeln!(
            svg,
            r##"<line x1="{ML}" y1="{py}" x2="{}" y2="{py}" stroke="#dddddd"/>"##,
            W - MR
        );
        let _ = writeln!(
            svg,
            r#"<text x="{}" y="{}" font-family="sans-serif" font-size="11" text-anchor="end">{}</text>"#,
            ML - 8.0,
            py + 4.0,
            fmt_tick(fy)
        );
    }
    let _ = writeln!(
        svg,
        r#"<text x="{}" y="{}" font-family="sans-serif" font-size="13" text-anchor="middle">{x_label}</text>"#,
        (ML + W - MR) / 2.0,
        H - 16.0
    );
    let _ = writeln!(
        svg,
        r#"<text x="20" y="{}" font-family="sans-serif" font-size="13" text-anchor="middle" transform="rotate(-90 20 {})">{y_label}</text>"#,
        (MT + H - MB) / 2.0,
        (MT + H - MB) / 2.0
    );

    for s in series {
        // min/max whiskers
        for &(x, _, lo, hi) in &s.points {
            let px = sx(x);
            let _ = writeln!(
                svg,
                r#"<line x1="{px}" y1="{}" x2="{px}" y2="{}" stroke="{}" stroke-width="1"/>"#,
                sy(lo),
                sy(hi),
                s.color
            );
            for y in [lo, hi] {
                let _ = writeln!(
                    svg,
                    r#"<line x1="{}" y1="{}" x2="{}" y2="{}" stroke="{}" stroke-width="1"/>"#,
                    px - 3.0,
                    sy(y),
                    px + 3.0,
                    sy(y),
                    s.color
                );
            }
        }
        if s.points.len() > 1 {
            let path: Vec<String> = s
                .points
                .iter()
                .map(|&(x, mean, _, _)| format!("{:.2},{:.2}", sx(x), sy(mean)))
                .collect();
            let _ = writeln!(
                svg,
                r#"<polyline points="{}" fill="none" stroke="{}" stroke-width="1.8"/>"#,
                path.join(" "),
                s.color
            );
        }
        for &(x, mean, _, _) in &s.points {
            let _ = writeln!(
                svg,
                r#"<circle cx="{:.2}" cy="{:.2}" r="3.2" fill="{}"/>"#,
                sx(x),
                sy(mean),
                s.color
            );
        }
    }

    // legend
    for (i, s) in series.iter().enumerate() {
        let y = MT + 8.0 + 18.0 * i as f64;
        let x = W - MR - 120.0;
        let _ = writeln!(
            svg,
            r#"<line x1="{x}" y1="{y}" x2="{}" y2="{y}" stroke="{}" stroke-width="2.5"/>"#,
            x + 24.0,
            s.color
        );
        let _ = writeln!(
            svg,
            r#"<text x="{}" y="{}" font-family="sans-serif" font-size="12">{}</text>"#,
            x + 30.0,
            y + 4.0,
            s.name
        );
    }
    let _ = writeln!(svg, "</svg>");
    svg
}

fn min_max(values: &[f64], fallback: (f64, f64)) -> (f64, f64) {
    if values.is_empty() {
        return fallback;
    }
    (
        values.iter().copied().fold(f64::INFINITY, f64::min),
        values.iter().copied().fold(f64::NEG_INFINITY, f64::max),
    )
}

/// Write `report.csv`, `r2approx.svg`, and `delta_n.svg` into `out_dir`.
/// Returns the paths written.
pub fn emit_plots(report: &SweepReport, out_dir: impl AsRef<Path>) -> Result<Vec<PathBuf>> {
    if report.rows.is_empty() {
        return Err(Error::parameter("cannot emit plots for an empty report"));
    }
    let out_dir = out_dir.as_ref();
    std::fs::create_dir_all(out_dir).map_err(|e| Error::io(out_dir, e))?;

    let csv_path = out_dir.join("report.csv");
    write_report_csv(report, &csv_path)?;

    let r2_path = out_dir.join("r2approx.svg");
    let r2 = render_chart(
        "2-approximation rate vs insertion probability",
        "insertion probability q",
        "R_2approx",
        &aggregate(report, |row| Some(row.r2approx)),
    );
    std::fs::write(&r2_path, r2).map_err(|e| Error::io(&r2_path, e))?;

    let dn_path = out_dir.join("delta_n.svg");
    let dn = render_chart(
        "normalized L2 error vs insertion probability",
        "insertion probability q",
        "delta_N",
        &aggregate(report, |row| row.delta_n),
    );
    std::fs::write(&dn_path, dn).map_err(|e| Error::io(&dn_path, e))?;

    Ok(vec![csv_path, r2_path, dn_path])
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::SpaceSpec;
    use crate::sweep::{run_synthetic_sweep, PairsMode, RadiusMode, SweepConfig};

    fn small_report() -> SweepReport {
        let cfg = SweepConfig {
            space: SpaceSpec::circle(1.0),
            n: 100,
            r_mode: RadiusMode::Explicit(0.12),
            p: 0.1,
            q_grid: vec![0.0, 0.05],
            tau: None,
            trials: 2,
            master_seed: 17,
            pairs_mode: PairsMode::All,
        };
        run_synthetic_sweep(&cfg).unwrap()
    }

    #[test]
    fn csv_round_trip_is_field_exact() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("report.csv");
        let report = small_report();
        write_report_csv(&report, &path).unwrap();
        let back = read_report_csv(&path).unwrap();
        assert_eq!(report.meta, back.meta);
        assert_eq!(report.rows, back.rows);
    }

    #[test]
    fn schema_header_is_stable() {
        let report = small_report();
        let text = report_to_csv(&report);
        let mut lines = text.lines();
        assert_eq!(lines.next(), Some("# proximet-report v1"));
        let header = text
            .lines()
            .find(|l| !l.starts_with('#'))
            .expect("column header");
        assert_eq!(header, "q,trial,variant,r2approx,delta_n,good_index_count,runtime_ms");
    }

    #[test]
    fn emit_plots_writes_three_files() {
        let dir = tempfile::tempdir().unwrap();
        let report = small_report();
        let files = emit_plots(&report, dir.path().join("out")).unwrap();
        assert_eq!(files.len(), 3);
        for f in &files {
            assert!(f.exists(), "{f:?}");
        }
        let svg = std::fs::read_to_string(&files[1]).unwrap();
        assert!(svg.contains("<polyline"));
        assert!(svg.contains("observed"));
        assert!(svg.contains("filtered"));
    }

    #[test]
    fn single_point_report_renders_markers() {
        let mut report = small_report();
        report.rows.retain(|r| r.q == 0.0);
        report.meta.q_grid = vec![0.0];
        let dir = tempfile::tempdir().unwrap();
        let files = emit_plots(&report, dir.path()).unwrap();
        let svg = std::fs::read_to_string(&files[1]).unwrap();
        assert!(svg.contains("<circle"));
    }

    #[test]
    fn unwritable_directory_is_io_error() {
        let report = small_report();
        let err = emit_plots(&report, "/proc/definitely/not/writable").unwrap_err();
        assert!(matches!(err, Error::Io { .. }));
    }
}
