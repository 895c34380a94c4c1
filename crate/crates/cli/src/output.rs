//! CSV emission.

use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};

use icnmp::StrategyId;

pub const RATES_HEADER: [&str; 7] = [
    "sweep_value",
    "strategy",
    "source",
    "y_msgs_per_s",
    "y_gross_mbps",
    "y_net_mbps",
    "w_max_or_peak",
];

pub const WINDOW_HEADER: [&str; 2] = ["time_s", "window"];

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Source {
    Model,
    Sim,
}

impl Source {
    pub fn as_str(self) -> &'static str {
        match self {
            Source::Model => "model",
            Source::Sim => "sim",
        }
    }
}

/// One line of the rates table.
#[derive(Debug, Clone, PartialEq)]
pub struct RateRow {
    /// Swept value in experiment-file units; `None` without a sweep.
    pub sweep_value: Option<f64>,
    pub strategy: StrategyId,
    pub source: Source,
    pub y_msgs_per_s: f64,
    pub y_gross_mbps: f64,
    pub y_net_mbps: f64,
    /// Model `W_max`, or the largest window the simulation reached.
    pub w_max_or_peak: u64,
}

/// `v` rounded to 12 significant digits, printed in the shortest decimal
/// form that parses back to that rounded value.
pub fn fmt_sig(v: f64) -> String {
    if !v.is_finite() {
        return v.to_string();
    }
    let rounded: f64 = format!("{v:.11e}").parse().expect("formatted float parses");
    rounded.to_string()
}

pub fn rates_path(prefix: &Path) -> PathBuf {
    suffixed(prefix, "-rates.csv")
}

pub fn window_path(prefix: &Path, strategy: StrategyId) -> PathBuf {
    suffixed(prefix, &format!("-window-{strategy}.csv"))
}

fn suffixed(prefix: &Path, suffix: &str) -> PathBuf {
    let mut s = prefix.as_os_str().to_owned();
    s.push(suffix);
    PathBuf::from(s)
}

pub fn write_rates(out: impl Write, rows: &[RateRow]) -> io::Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(RATES_HEADER)?;
    for r in rows {
        w.write_record([
            r.sweep_value.map(fmt_sig).unwrap_or_default(),
            r.strategy.to_string(),
            r.source.as_str().to_string(),
            fmt_sig(r.y_msgs_per_s),
            fmt_sig(r.y_gross_mbps),
            fmt_sig(r.y_net_mbps),
            r.w_max_or_peak.to_string(),
        ])?;
    }
    w.flush()
}

pub fn write_window(out: impl Write, trace: &[(f64, u64)]) -> io::Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(WINDOW_HEADER)?;
    for &(t, win) in trace {
        w.write_record([fmt_sig(t), win.to_string()])?;
    }
    w.flush()
}

/// Creates `path` (and missing parent directories) and hands a buffered
/// writer to `f`.
pub fn write_file(
    path: &Path,
    f: impl FnOnce(&mut BufWriter<File>) -> io::Result<()>,
) -> io::Result<()> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        std::fs::create_dir_all(dir)?;
    }
    let mut w = BufWriter::new(File::create(path)?);
    f(&mut w)?;
    w.flush()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn twelve_significant_digits() {
        assert_eq!(fmt_sig(512.7197518457752), "512.719751846");
        assert_eq!(fmt_sig(20.0), "20");
        assert_eq!(fmt_sig(0.1 + 0.2), "0.3");
        assert_eq!(fmt_sig(1.0 / 3.0), "0.333333333333");
        assert_eq!(fmt_sig(-2.5e-7), "-0.00000025");
        assert_eq!(fmt_sig(0.0), "0");
    }

    #[test]
    fn rates_layout() {
        let row = RateRow {
            sweep_value: Some(120.0),
            strategy: StrategyId::Fpf,
            source: Source::Model,
            y_msgs_per_s: 466.9,
            y_gross_mbps: 18.2,
            y_net_mbps: 15.3,
            w_max_or_peak: 111,
        };
        let bare = RateRow {
            sweep_value: None,
            ..row.clone()
        };
        let mut buf = Vec::new();
        write_rates(&mut buf, &[row, bare]).unwrap();
        assert_eq!(
            String::from_utf8(buf).unwrap(),
            "sweep_value,strategy,source,y_msgs_per_s,y_gross_mbps,y_net_mbps,w_max_or_peak\n\
             120,fpf,model,466.9,18.2,15.3,111\n\
             ,fpf,model,466.9,18.2,15.3,111\n"
        );
    }

    #[test]
    fn file_names() {
        let p = Path::new("out/fig11");
        assert_eq!(rates_path(p), Path::new("out/fig11-rates.csv"));
        assert_eq!(
            window_path(p, StrategyId::Pe),
            Path::new("out/fig11-window-pe.csv")
        );
    }
}
