//! Reading and writing the tab-separated panel files.
//!
//! One file per field, rows = assets, columns = dates with the most recent
//! date first, no header, `?` for a missing cell.

use std::fmt::Write as _;
use std::fs::File;
use std::io::{self, BufRead, BufReader, Write};
use std::path::{Path, PathBuf};
use std::thread;

use altarb_core::{parse_cell, MarketDataSet, PanelMatrix};

pub const CLOSE_FILE: &str = "cr.prc.txt";
pub const OPEN_FILE: &str = "cr.open.txt";
pub const HIGH_FILE: &str = "cr.high.txt";
pub const LOW_FILE: &str = "cr.low.txt";
pub const VOLUME_FILE: &str = "cr.vol.txt";
pub const CAP_FILE: &str = "cr.cap.txt";
pub const NAME_FILE: &str = "cr.name.txt";
pub const MINABLE_FILE: &str = "cr.mnbl.txt";

/// Numeric panel files in load order, with their field labels.
pub const PANEL_FILES: [(&str, &str); 6] = [
    ("close", CLOSE_FILE),
    ("open", OPEN_FILE),
    ("high", HIGH_FILE),
    ("low", LOW_FILE),
    ("volume", VOLUME_FILE),
    ("cap", CAP_FILE),
];

#[derive(Debug, thiserror::Error)]
pub enum IngestError {
    #[error("{path}: {source}")]
    Io { path: PathBuf, source: io::Error },

    #[error("{path}: line {line}, field {field}: malformed value {token:?}")]
    Cell {
        path: PathBuf,
        line: usize,
        field: usize,
        token: String,
    },

    #[error("{path}: line {line} has {found} fields, expected {expected}")]
    Ragged {
        path: PathBuf,
        line: usize,
        expected: usize,
        found: usize,
    },

    #[error("{path}: no data rows")]
    Empty { path: PathBuf },

    #[error("{path}: {source}")]
    Shape {
        path: PathBuf,
        source: altarb_core::Error,
    },
}

/// Splits a reader into tab-separated records. Blank lines are skipped and
/// every record must have the same number of fields.
fn read_records<R: BufRead>(
    reader: R,
    path: &Path,
    header: bool,
) -> Result<Vec<(usize, Vec<String>)>, IngestError> {
    let mut out: Vec<(usize, Vec<String>)> = Vec::new();
    let mut skipped_header = !header;
    for (idx, line) in reader.lines().enumerate() {
        let line = line.map_err(|source| IngestError::Io {
            path: path.to_owned(),
            source,
        })?;
        let line = line.strip_suffix('\r').unwrap_or(&line);
        if line.trim().is_empty() {
            continue;
        }
        if !skipped_header {
            skipped_header = true;
            continue;
        }
        let fields: Vec<String> = line.split('\t').map(|f| f.trim().to_owned()).collect();
        if let Some((_, first)) = out.first() {
            if first.len() != fields.len() {
                return Err(IngestError::Ragged {
                    path: path.to_owned(),
                    line: idx + 1,
                    expected: first.len(),
                    found: fields.len(),
                });
            }
        }
        out.push((idx + 1, fields));
    }
    if out.is_empty() {
        return Err(IngestError::Empty {
            path: path.to_owned(),
        });
    }
    Ok(out)
}

/// Parses a numeric panel from any reader; `path` only labels errors.
pub fn read_panel<R: BufRead>(
    mut reader: R,
    path: &Path,
    header: bool,
) -> Result<PanelMatrix, IngestError> {
    let io_err = |source| IngestError::Io {
        path: path.to_owned(),
        source,
    };
    let mut values = Vec::new();
    let (mut n_rows, mut n_dates) = (0usize, 0usize);
    let mut skipped_header = !header;
    let mut buf = String::new();
    let mut line_no = 0;
    loop {
        buf.clear();
        if reader.read_line(&mut buf).map_err(io_err)? == 0 {
            break;
        }
        line_no += 1;
        let line = buf.trim_end_matches(['\n', '\r']);
        if line.trim().is_empty() {
            continue;
        }
        if !skipped_header {
            skipped_header = true;
            continue;
        }
        let before = values.len();
        for (j, token) in line.split('\t').enumerate() {
            let token = token.trim();
            let v = parse_cell(token).map_err(|_| IngestError::Cell {
                path: path.to_owned(),
                line: line_no,
                field: j + 1,
                token: token.to_owned(),
            })?;
            values.push(v.unwrap_or(f64::NAN));
        }
        let found = values.len() - before;
        if n_rows == 0 {
            n_dates = found;
        } else if found != n_dates {
            return Err(IngestError::Ragged {
                path: path.to_owned(),
                line: line_no,
                expected: n_dates,
                found,
            });
        }
        n_rows += 1;
    }
    if n_rows == 0 {
        return Err(IngestError::Empty {
            path: path.to_owned(),
        });
    }
    PanelMatrix::new(n_rows, n_dates, values).map_err(|source| IngestError::Shape {
        path: path.to_owned(),
        source,
    })
}

fn open(path: &Path) -> Result<BufReader<File>, IngestError> {
    File::open(path)
        .map(BufReader::new)
        .map_err(|source| IngestError::Io {
            path: path.to_owned(),
            source,
        })
}

pub fn load_panel(path: &Path, header: bool) -> Result<PanelMatrix, IngestError> {
    read_panel(open(path)?, path, header)
}

/// Loads a file as text fields, without numeric conversion.
pub fn load_text_table(path: &Path, header: bool) -> Result<Vec<Vec<String>>, IngestError> {
    Ok(read_records(open(path)?, path, header)?
        .into_iter()
        .map(|(_, f)| f)
        .collect())
}

/// Writes a panel in the same format, `?` for missing cells. Values use the
/// shortest representation that parses back to the same `f64`.
pub fn write_panel<W: Write>(mut w: W, panel: &PanelMatrix) -> io::Result<()> {
    let mut line = String::new();
    for row in panel.rows() {
        line.clear();
        for (j, v) in row.iter().enumerate() {
            if j > 0 {
                line.push('\t');
            }
            if v.is_nan() {
                line.push('?');
            } else {
                let _ = write!(line, "{v}");
            }
        }
        line.push('\n');
        w.write_all(line.as_bytes())?;
    }
    Ok(())
}

/// Writes one name per line.
pub fn write_names<W: Write>(mut w: W, names: &[String]) -> io::Result<()> {
    for n in names {
        writeln!(w, "{n}")?;
    }
    Ok(())
}

/// Writes a complete data set into `dir` under the standard file names.
pub fn write_dataset(dir: &Path, ds: &MarketDataSet) -> io::Result<()> {
    for ((_, file), (_, panel)) in PANEL_FILES.iter().zip(ds.panels()) {
        write_panel(io::BufWriter::new(File::create(dir.join(file))?), panel)?;
    }
    write_names(File::create(dir.join(NAME_FILE))?, &ds.names)?;
    if let Some(m) = &ds.minable {
        let p = PanelMatrix::new(m.len(), 1, m.clone()).expect("one column per asset");
        write_panel(File::create(dir.join(MINABLE_FILE))?, &p)?;
    }
    Ok(())
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IngestReport {
    pub n_assets: usize,
    pub n_dates: usize,
    /// Missing cells per numeric panel, in [`PANEL_FILES`] order.
    pub n_missing: Vec<(&'static str, usize)>,
    pub warnings: Vec<String>,
}

/// Loads the six panels, the names and (if present) the minable flags from
/// `dir`. Files are read in parallel; the result does not depend on timing.
pub fn load_dataset(
    dir: &Path,
    header: bool,
) -> Result<(MarketDataSet, IngestReport), IngestError> {
    let panels: Vec<Result<PanelMatrix, IngestError>> = thread::scope(|scope| {
        let handles: Vec<_> = PANEL_FILES
            .iter()
            .map(|(_, file)| {
                let path = dir.join(file);
                scope.spawn(move || load_panel(&path, header))
            })
            .collect();
        handles
            .into_iter()
            .map(|h| h.join().expect("panel loader panicked"))
            .collect()
    });
    let mut panels = panels.into_iter().collect::<Result<Vec<_>, _>>()?.into_iter();
    let mut next = || panels.next().expect("six panels");
    let (close, open, high, low, volume, cap) = (next(), next(), next(), next(), next(), next());

    let name_path = dir.join(NAME_FILE);
    let names: Vec<String> = load_text_table(&name_path, header)?
        .into_iter()
        .map(|mut f| f.swap_remove(0))
        .collect();

    let mut warnings = Vec::new();
    let mnbl_path = dir.join(MINABLE_FILE);
    let minable = if mnbl_path.exists() {
        let m = load_panel(&mnbl_path, header)?;
        Some((0..m.n_assets()).map(|i| m.value(i, 0)).collect())
    } else {
        warnings.push(format!("{MINABLE_FILE} not found; minable flags unavailable"));
        None
    };

    let n_missing = [
        ("close", &close),
        ("open", &open),
        ("high", &high),
        ("low", &low),
        ("volume", &volume),
        ("cap", &cap),
    ]
    .iter()
    .map(|(label, p)| (*label, p.count_missing()))
    .collect();

    let ds = MarketDataSet::new(close, open, high, low, volume, cap, names, minable).map_err(
        |source| IngestError::Shape {
            path: dir.to_owned(),
            source,
        },
    )?;
    let report = IngestReport {
        n_assets: ds.n_assets(),
        n_dates: ds.n_dates(),
        n_missing,
        warnings,
    };
    Ok((ds, report))
}
