//! Result tables, CSV files and gnuplot scripts.

use std::fmt::{self, Write as _};
use std::fs;
use std::path::{Path, PathBuf};

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
pub enum Value {
    Int(i64),
    Float(f64),
    Text(String),
    Bool(bool),
    Empty,
}

impl Value {
    pub fn as_f64(&self) -> Option<f64> {
        match self {
            Value::Int(i) => Some(*i as f64),
            Value::Float(x) => Some(*x),
            _ => None,
        }
    }

    pub fn opt_float(x: Option<f64>) -> Value {
        x.map_or(Value::Empty, Value::Float)
    }

    pub fn opt_int(x: Option<usize>) -> Value {
        x.map_or(Value::Empty, |v| Value::Int(v as i64))
    }
}

impl fmt::Display for Value {
    /// Floats use the shortest representation that parses back exactly.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Value::Int(i) => write!(f, "{i}"),
            Value::Float(x) => write!(f, "{x:e}"),
            Value::Text(s) => f.write_str(s),
            Value::Bool(b) => write!(f, "{b}"),
            Value::Empty => Ok(()),
        }
    }
}

impl From<usize> for Value {
    fn from(v: usize) -> Self {
        Value::Int(v as i64)
    }
}

impl From<f64> for Value {
    fn from(v: f64) -> Self {
        Value::Float(v)
    }
}

impl From<bool> for Value {
    fn from(v: bool) -> Self {
        Value::Bool(v)
    }
}

impl From<&str> for Value {
    fn from(v: &str) -> Self {
        Value::Text(v.to_string())
    }
}

impl From<String> for Value {
    fn from(v: String) -> Self {
        Value::Text(v)
    }
}

/// Layout of the generated plot: one panel per distinct `panels` tuple, one
/// series per distinct `series` value, `y` columns drawn against `x`.
#[derive(Debug, Clone, PartialEq)]
pub struct PlotSpec {
    pub x: &'static str,
    pub y: Vec<&'static str>,
    pub panels: Vec<&'static str>,
    pub series: Vec<&'static str>,
    pub log_x: bool,
    pub log_y: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    pub name: String,
    pub header: Vec<String>,
    pub rows: Vec<Vec<Value>>,
    pub plot: Option<PlotSpec>,
}

impl Table {
    pub fn new(name: impl Into<String>, header: &[&str]) -> Self {
        Self {
            name: name.into(),
            header: header.iter().map(|s| s.to_string()).collect(),
            rows: Vec::new(),
            plot: None,
        }
    }

    pub fn with_plot(mut self, plot: PlotSpec) -> Self {
        self.plot = Some(plot);
        self
    }

    pub fn push(&mut self, row: Vec<Value>) {
        debug_assert_eq!(row.len(), self.header.len(), "row width for {}", self.name);
        self.rows.push(row);
    }

    pub fn column(&self, name: &str) -> Option<usize> {
        self.header.iter().position(|h| h == name)
    }

    pub fn get(&self, row: usize, name: &str) -> Option<&Value> {
        self.column(name).and_then(|c| self.rows.get(row).map(|r| &r[c]))
    }

    /// Rows where every `(column, text)` pair matches.
    pub fn select<'a>(&'a self, filter: &'a [(&str, &str)]) -> impl Iterator<Item = &'a [Value]> + 'a {
        let cols: Vec<Option<usize>> = filter.iter().map(|(c, _)| self.column(c)).collect();
        self.rows.iter().filter_map(move |r| {
            let ok = cols
                .iter()
                .zip(filter)
                .all(|(c, (_, want))| c.is_some_and(|c| r[c].to_string() == *want));
            ok.then_some(r.as_slice())
        })
    }

    pub fn file_name(&self) -> String {
        format!("{}.csv", self.name)
    }
}

pub fn emit_csv(table: &Table, path: &Path) -> Result<()> {
    if table.rows.is_empty() {
        return Err(Error::InvalidParameter(format!("table {} has no rows", table.name)));
    }
    let mut w = csv::Writer::from_path(path).map_err(csv_io)?;
    w.write_record(&table.header).map_err(csv_io)?;
    for row in &table.rows {
        w.write_record(row.iter().map(|v| v.to_string())).map_err(csv_io)?;
    }
    w.flush()?;
    Ok(())
}

/// Header and raw fields of a CSV file.
pub fn read_csv(path: &Path) -> Result<(Vec<String>, Vec<Vec<String>>)> {
    let mut r = csv::Reader::from_path(path).map_err(csv_io)?;
    let header = r.headers().map_err(csv_io)?.iter().map(String::from).collect();
    let rows = r
        .records()
        .map(|rec| rec.map(|r| r.iter().map(String::from).collect()))
        .collect::<std::result::Result<_, _>>()
        .map_err(csv_io)?;
    Ok((header, rows))
}

fn csv_io(e: csv::Error) -> Error {
    match e.into_kind() {
        csv::ErrorKind::Io(io) => Error::Io(io),
        other => Error::Io(std::io::Error::new(std::io::ErrorKind::InvalidData, format!("{other:?}"))),
    }
}

fn quote(s: &str) -> String {
    format!("\"{}\"", s.replace('\\', "\\\\").replace('"', "\\\""))
}

fn distinct(table: &Table, cols: &[usize]) -> Vec<Vec<String>> {
    let mut out: Vec<Vec<String>> = Vec::new();
    for row in &table.rows {
        let key: Vec<String> = cols.iter().map(|&c| row[c].to_string()).collect();
        if !out.contains(&key) {
            out.push(key);
        }
    }
    out
}

/// Gnuplot script for `table`, reading `csv_name` from its own directory.
pub fn plot_script(table: &Table, csv_name: &str) -> Result<String> {
    let spec = table
        .plot
        .as_ref()
        .ok_or_else(|| Error::InvalidParameter(format!("table {} has no plot layout", table.name)))?;
    let col = |name: &str| {
        table
            .column(name)
            .ok_or_else(|| Error::InvalidParameter(format!("plot column {name} missing from {}", table.name)))
    };
    let x = col(spec.x)?;
    let ys: Vec<usize> = spec.y.iter().map(|c| col(c)).collect::<Result<_>>()?;
    let panel_cols: Vec<usize> = spec.panels.iter().map(|c| col(c)).collect::<Result<_>>()?;
    let series_cols: Vec<usize> = spec.series.iter().map(|c| col(c)).collect::<Result<_>>()?;
    let panels = distinct(table, &panel_cols);
    let series = distinct(table, &series_cols);

    let mut s = String::new();
    let _ = writeln!(s, "# generated from {csv_name}");
    let _ = writeln!(s, "set datafile separator ','");
    let _ = writeln!(s, "set terminal pngcairo size 900,600");
    let _ = writeln!(s, "set output '{}.png'", table.name);
    let _ = writeln!(s, "set key outside right");
    if spec.log_x {
        let _ = writeln!(s, "set logscale x");
    }
    if spec.log_y {
        let _ = writeln!(s, "set logscale y");
    }
    let _ = writeln!(s, "set xlabel {}", quote(spec.x));
    let _ = writeln!(s, "set ylabel {}", quote(&spec.y.join(", ")));
    let rows = (panels.len() as f64).sqrt().ceil() as usize;
    let cols = panels.len().div_ceil(rows.max(1));
    let _ = writeln!(s, "set multiplot layout {},{}", rows.max(1), cols.max(1));
    for panel in &panels {
        let title: Vec<String> = spec.panels.iter().zip(panel).map(|(c, v)| format!("{c}={v}")).collect();
        let _ = writeln!(s, "set title {}", quote(&title.join(" ")));
        let mut clauses = Vec::new();
        for ser in &series {
            let filter: Vec<String> = panel_cols
                .iter()
                .zip(panel)
                .chain(series_cols.iter().zip(ser))
                .map(|(c, v)| format!("strcol({}) eq {}", c + 1, quote(v)))
                .collect();
            let cond = if filter.is_empty() { "1".to_string() } else { filter.join(" && ") };
            for (&y, yname) in ys.iter().zip(&spec.y) {
                let mut label: Vec<String> = spec.series.iter().zip(ser).map(|(c, v)| format!("{c}={v}")).collect();
                if ys.len() > 1 {
                    label.push((*yname).to_string());
                }
                clauses.push(format!(
                    "'{csv_name}' every ::1 using ({cond} ? column({}) : 1/0):(column({})) with linespoints title {}",
                    x + 1,
                    y + 1,
                    quote(&label.join(" "))
                ));
            }
        }
        let _ = writeln!(s, "plot \\\n  {}", clauses.join(", \\\n  "));
    }
    let _ = writeln!(s, "unset multiplot");
    Ok(s)
}

pub fn emit_plot_script(table: &Table, csv_path: &Path) -> Result<PathBuf> {
    let csv_name = csv_path
        .file_name()
        .and_then(|n| n.to_str())
        .ok_or_else(|| Error::InvalidParameter(format!("bad csv path {}", csv_path.display())))?;
    let script = plot_script(table, csv_name)?;
    let out = csv_path.with_extension("gp");
    fs::write(&out, script)?;
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample() -> Table {
        let mut t = Table::new("demo", &["scheme", "m", "dt", "norm", "flag", "note"]).with_plot(PlotSpec {
            x: "dt",
            y: vec!["norm"],
            panels: vec!["scheme"],
            series: vec!["m"],
            log_x: true,
            log_y: false,
        });
        t.push(vec!["upwind".into(), 32usize.into(), 0.1.into(), 1.0000000000000002.into(), true.into(), Value::Empty]);
        t.push(vec!["centered".into(), 63usize.into(), 1e-3.into(), f64::NAN.into(), false.into(), "a,\"b\"".into()]);
        t
    }

    #[test]
    fn floats_round_trip() {
        for x in [0.1, 1.0 / 3.0, 6.002e-5, 1e300, -2.5e-310, 0.0, 123456789.0] {
            let text = Value::Float(x).to_string();
            assert_eq!(text.parse::<f64>().unwrap(), x, "{text}");
        }
        assert_eq!(Value::Float(f64::NAN).to_string(), "NaN");
    }

    #[test]
    fn csv_round_trip() {
        let dir = tempfile::tempdir().unwrap();
        let t = sample();
        let path = dir.path().join(t.file_name());
        emit_csv(&t, &path).unwrap();
        let (header, rows) = read_csv(&path).unwrap();
        assert_eq!(header, t.header);
        assert_eq!(rows.len(), 2);
        assert_eq!(rows[0][3].parse::<f64>().unwrap(), 1.0000000000000002);
        assert_eq!(rows[1][5], "a,\"b\"");
        assert!(rows[1][3].parse::<f64>().unwrap().is_nan());
    }

    #[test]
    fn single_row_gives_two_lines() {
        let dir = tempfile::tempdir().unwrap();
        let mut t = sample();
        t.rows.truncate(1);
        let path = dir.path().join("one.csv");
        emit_csv(&t, &path).unwrap();
        assert_eq!(std::fs::read_to_string(&path).unwrap().lines().count(), 2);
        t.rows.clear();
        assert!(emit_csv(&t, &path).is_err());
    }

    #[test]
    fn unwritable_path_is_io_error() {
        let err = emit_csv(&sample(), Path::new("/nonexistent-dir/x.csv")).unwrap_err();
        assert_eq!(err.exit_code(), 3);
    }

    #[test]
    fn plot_has_one_series_per_value_in_each_panel() {
        let script = plot_script(&sample(), "demo.csv").unwrap();
        assert_eq!(script.matches("set title").count(), 2);
        assert!(script.contains("strcol(1) eq \"upwind\" && strcol(2) eq \"32\""));
        assert_eq!(script.matches(" with linespoints").count(), 4);
        assert!(script.contains("set logscale x"));
    }

    #[test]
    fn select_filters_by_text() {
        let t = sample();
        assert_eq!(t.select(&[("m", "63")]).count(), 1);
        assert_eq!(t.select(&[("scheme", "upwind"), ("m", "63")]).count(), 0);
        assert_eq!(t.get(0, "m"), Some(&Value::Int(32)));
    }
}
