//! CSV tables with commented metadata headers, and gnuplot scripts over them.

use std::fmt::Write as _;
use std::fs;
use std::io;
use std::path::{Path, PathBuf};

use crate::config::ScenarioConfig;

/// A table cell. Floats print with 12 significant digits.
#[derive(Debug, Clone, PartialEq)]
pub enum Cell {
    F(f64),
    I(u64),
    /// A name; must not contain commas or line breaks.
    T(String),
}

impl Cell {
    fn render(&self, out: &mut String) {
        match self {
            // Negative zero prints as zero.
            Cell::F(x) => write!(out, "{:.11e}", x + 0.0).unwrap(),
            Cell::I(n) => write!(out, "{n}").unwrap(),
            Cell::T(t) => out.push_str(t),
        }
    }
}

/// How a table is drawn by the plot script.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum PlotHint {
    /// Column 2 (and 4 with error bars 5 when present) against column 1.
    Curve,
    /// Curves sharing a group are overlaid in one panel.
    Paired(String),
    /// Log-log sensitivity panel with SQL and HL lines.
    Sensitivity,
    /// Sphere map `(theta, phi, Q)`.
    Map,
    /// Not plotted.
    None,
}

impl PlotHint {
    fn tag(&self) -> String {
        match self {
            PlotHint::Curve => "curve".into(),
            PlotHint::Paired(g) => format!("paired {g}"),
            PlotHint::Sensitivity => "sensitivity".into(),
            PlotHint::Map => "map".into(),
            PlotHint::None => "none".into(),
        }
    }

    fn from_tag(tag: &str) -> Self {
        match tag.split_once(' ') {
            Some(("paired", g)) => PlotHint::Paired(g.into()),
            _ => match tag {
                "curve" => PlotHint::Curve,
                "sensitivity" => PlotHint::Sensitivity,
                "map" => PlotHint::Map,
                _ => PlotHint::None,
            },
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct DataTable {
    /// File name suffix; the file is `<scenario>_<name>.csv`.
    pub name: String,
    pub title: String,
    pub columns: Vec<String>,
    pub rows: Vec<Vec<Cell>>,
    pub plot: PlotHint,
}

impl DataTable {
    pub fn new(name: impl Into<String>, title: impl Into<String>, columns: &[&str], plot: PlotHint) -> Self {
        Self {
            name: name.into(),
            title: title.into(),
            columns: columns.iter().map(|c| c.to_string()).collect(),
            rows: Vec::new(),
            plot,
        }
    }

    pub fn push(&mut self, row: Vec<Cell>) {
        debug_assert_eq!(row.len(), self.columns.len());
        self.rows.push(row);
    }

    /// Stable sort on the first column.
    pub fn sort_by_first(&mut self) {
        let key = |c: &Cell| match c {
            Cell::F(x) => *x,
            Cell::I(n) => *n as f64,
            Cell::T(_) => 0.0,
        };
        self.rows.sort_by(|a, b| key(&a[0]).total_cmp(&key(&b[0])));
    }

    pub fn file_name(&self, cfg: &ScenarioConfig) -> String {
        format!("{}_{}.csv", cfg.scenario, self.name)
    }

    /// Column line and data rows.
    pub fn body(&self) -> String {
        let mut out = self.columns.join(",");
        out.push('\n');
        for row in &self.rows {
            for (i, c) in row.iter().enumerate() {
                if i > 0 {
                    out.push(',');
                }
                c.render(&mut out);
            }
            out.push('\n');
        }
        out
    }

    /// Full file text: metadata and config as `#` comments, then [`Self::body`].
    pub fn render(&self, cfg: &ScenarioConfig) -> String {
        let mut out = String::new();
        writeln!(out, "# catspin {}", env!("CARGO_PKG_VERSION")).unwrap();
        writeln!(out, "# scenario: {}", cfg.scenario).unwrap();
        writeln!(out, "# seed: {}", cfg.sampling.seed).unwrap();
        writeln!(out, "# table: {}", self.title).unwrap();
        writeln!(out, "# plot: {}", self.plot.tag()).unwrap();
        out.push_str("# begin config\n");
        for line in cfg.to_toml().lines() {
            if line.is_empty() {
                out.push_str("#\n");
            } else {
                writeln!(out, "# {line}").unwrap();
            }
        }
        out.push_str("# end config\n");
        out.push_str(&self.body());
        out
    }
}

/// The config text stored in a CSV header.
pub fn config_text_from_header(csv: &str) -> Option<String> {
    let mut inside = false;
    let mut out = String::new();
    for line in csv.lines() {
        match line {
            "# begin config" => inside = true,
            "# end config" => return Some(out),
            _ if inside => {
                out.push_str(line.strip_prefix('#')?.strip_prefix(' ').unwrap_or(""));
                out.push('\n');
            }
            _ => {}
        }
    }
    None
}

/// CSV text without its `#` header.
pub fn strip_header(csv: &str) -> String {
    csv.lines()
        .filter(|l| !l.starts_with('#'))
        .map(|l| format!("{l}\n"))
        .collect()
}

#[derive(Debug, thiserror::Error)]
pub enum OutputError {
    #[error("refusing to overwrite {0} (pass --overwrite to replace it)")]
    Exists(PathBuf),
    #[error("{path}: {source}")]
    Io { path: PathBuf, source: io::Error },
    #[error("plot input {0} does not exist")]
    MissingInput(PathBuf),
}

fn io_err(path: &Path) -> impl FnOnce(io::Error) -> OutputError + '_ {
    move |source| OutputError::Io {
        path: path.to_path_buf(),
        source,
    }
}

/// Writes all tables (and the plot script if requested). Nothing is written when any target exists
/// and `overwrite` is false.
pub fn write_tables(
    cfg: &ScenarioConfig,
    tables: &[DataTable],
    dir: &Path,
    overwrite: bool,
) -> Result<Vec<PathBuf>, OutputError> {
    let csv_paths: Vec<PathBuf> = tables.iter().map(|t| dir.join(t.file_name(cfg))).collect();
    let script_path = dir.join(format!("{}.gp", cfg.scenario));
    let mut targets = csv_paths.clone();
    if cfg.output.emit_plots {
        targets.push(script_path.clone());
    }
    if !overwrite {
        if let Some(p) = targets.iter().find(|p| p.exists()) {
            return Err(OutputError::Exists(p.clone()));
        }
    }
    fs::create_dir_all(dir).map_err(io_err(dir))?;
    for (t, path) in tables.iter().zip(&csv_paths) {
        fs::write(path, t.render(cfg)).map_err(io_err(path))?;
    }
    if cfg.output.emit_plots {
        let script = emit_plot_script(&csv_paths)?;
        fs::write(&script_path, script).map_err(io_err(&script_path))?;
    }
    Ok(targets)
}

struct PlotInput {
    path: PathBuf,
    title: String,
    plot: PlotHint,
    columns: Vec<String>,
}

fn read_plot_input(path: &Path) -> Result<PlotInput, OutputError> {
    if !path.is_file() {
        return Err(OutputError::MissingInput(path.to_path_buf()));
    }
    let text = fs::read_to_string(path).map_err(io_err(path))?;
    let mut title = path
        .file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_default();
    let mut plot = PlotHint::Curve;
    let mut columns = Vec::new();
    for line in text.lines() {
        if let Some(t) = line.strip_prefix("# table: ") {
            title = t.to_string();
        } else if let Some(p) = line.strip_prefix("# plot: ") {
            plot = PlotHint::from_tag(p);
        } else if !line.starts_with('#') {
            columns = line.split(',').map(str::to_string).collect();
            break;
        }
    }
    Ok(PlotInput {
        path: path.to_path_buf(),
        title,
        plot,
        columns,
    })
}

fn quote_path(p: &Path) -> String {
    format!("'{}'", p.display().to_string().replace('\'', "''"))
}

fn col(input: &PlotInput, name: &str) -> Option<usize> {
    input.columns.iter().position(|c| c == name).map(|i| i + 1)
}

/// Gnuplot script with one panel per curve, paired group, sensitivity table or map.
pub fn emit_plot_script(files: &[PathBuf]) -> Result<String, OutputError> {
    let inputs: Vec<PlotInput> = files.iter().map(|p| read_plot_input(p)).collect::<Result<_, _>>()?;
    let mut panels: Vec<Vec<&PlotInput>> = Vec::new();
    for input in &inputs {
        match &input.plot {
            PlotHint::None => {}
            PlotHint::Paired(g) => {
                let existing = panels
                    .iter_mut()
                    .find(|p| matches!(&p[0].plot, PlotHint::Paired(h) if h == g));
                match existing {
                    Some(panel) => panel.push(input),
                    None => panels.push(vec![input]),
                }
            }
            _ => panels.push(vec![input]),
        }
    }
    let mut s = String::new();
    s.push_str("set datafile separator ','\nset datafile commentschars '#'\nset key autotitle columnhead\n");
    s.push_str("set terminal pngcairo size 900,600\n");
    for (i, panel) in panels.iter().enumerate() {
        let first = panel[0];
        writeln!(s, "\nset output 'panel_{i}.png'").unwrap();
        writeln!(s, "set title '{}'", first.title.replace('\'', "''")).unwrap();
        writeln!(s, "set xlabel '{}'", first.columns.first().map_or("", String::as_str)).unwrap();
        match &first.plot {
            PlotHint::Sensitivity => {
                s.push_str("set logscale xy\nset ylabel 'V/cm'\n");
                let x = 1;
                let mut parts = Vec::new();
                for (name, style) in [
                    ("sigma1_v_cm", "points pt 7"),
                    ("sql_v_cm", "lines dt 2"),
                    ("hl_v_cm", "lines dt 3"),
                ] {
                    if let Some(c) = col(first, name) {
                        parts.push(format!(
                            "{} using {x}:{c} with {style} title '{name}'",
                            quote_path(&first.path)
                        ));
                    }
                }
                writeln!(s, "plot {}", parts.join(", \\\n     ")).unwrap();
                s.push_str("unset logscale xy\n");
            }
            PlotHint::Map => {
                s.push_str("set view map\nset ylabel 'phi (rad)'\nset xlabel 'theta (rad)'\n");
                writeln!(
                    s,
                    "splot {} using 1:2:3 with points pt 5 ps 0.4 palette notitle",
                    quote_path(&first.path)
                )
                .unwrap();
            }
            _ => {
                s.push_str("set ylabel 'probability'\n");
                let mut parts = Vec::new();
                for input in panel {
                    let path = quote_path(&input.path);
                    parts.push(format!(
                        "{path} using 1:2 with lines title '{} model'",
                        input.title.replace('\'', "''")
                    ));
                    if let (Some(m), Some(e)) = (col(input, "mean"), col(input, "stderr")) {
                        parts.push(format!(
                            "{path} using 1:{m}:{e} with yerrorbars title '{} data'",
                            input.title.replace('\'', "''")
                        ));
                    }
                }
                writeln!(s, "plot {}", parts.join(", \\\n     ")).unwrap();
            }
        }
    }
    Ok(s)
}
