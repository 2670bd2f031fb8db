//! Text formats: UCR-style datasets, plain numeric CSV with a side label
//! file, segment annotations, and relevance artifacts.
//!
//! Dataset files hold one series per line. The delimiter (comma, tab or a
//! run of spaces) is taken from the first data line, and any other
//! delimiter appearing later is a parse error. Blank lines are skipped.
//! LF and CRLF line endings are both accepted. Series ids are the 1-based
//! data-record number. Reals are written in shortest round-trip form.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use crate::detect::SegmentAnnotation;
use crate::error::{Error, Result};
use crate::relevance::RelevanceVector;
use crate::series::{ClassLabel, LabeledDataset, TimeSeries};

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum DatasetFormat {
    /// `label<delim>v1<delim>v2...`
    Ucr,
    /// Pure numerics; labels, when needed, one per line in a side file.
    Csv { labels: Option<PathBuf> },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Delimiter {
    Comma,
    Tab,
    Spaces,
}

impl Delimiter {
    fn detect(line: &str) -> Delimiter {
        if line.contains(',') {
            Delimiter::Comma
        } else if line.contains('\t') {
            Delimiter::Tab
        } else {
            Delimiter::Spaces
        }
    }

    fn foreign(self) -> &'static [char] {
        match self {
            Delimiter::Comma => &['\t'],
            Delimiter::Tab => &[','],
            Delimiter::Spaces => &[',', '\t'],
        }
    }
}

/// One parsed data line.
#[derive(Debug, Clone)]
struct Record {
    label: Option<String>,
    values: Vec<f64>,
}

/// Splits `line` into `(column, token)` pairs; columns are 1-based
/// character positions.
fn tokens(line: &str, delim: Delimiter) -> Vec<(usize, &str)> {
    let mut out = Vec::new();
    match delim {
        Delimiter::Spaces => {
            let mut start = None;
            for (i, c) in line.char_indices() {
                match (c == ' ', start) {
                    (true, Some(s)) => {
                        out.push((s, &line[s..i]));
                        start = None;
                    }
                    (false, None) => start = Some(i),
                    _ => {}
                }
            }
            if let Some(s) = start {
                out.push((s, &line[s..]));
            }
        }
        Delimiter::Comma | Delimiter::Tab => {
            let sep = if delim == Delimiter::Comma { ',' } else { '\t' };
            let mut offset = 0;
            for piece in line.split(sep) {
                let lead = piece.len() - piece.trim_start_matches(' ').len();
                out.push((offset + lead, piece.trim_matches(' ')));
                offset += piece.len() + 1;
            }
        }
    }
    out.into_iter()
        .map(|(byte, tok)| (line[..byte].chars().count() + 1, tok))
        .collect()
}

fn parse_records(text: &str, path: &Path, with_label: bool) -> Result<Vec<Record>> {
    let err = |line: usize, column: usize, message: String| Error::Parse {
        path: path.to_path_buf(),
        line,
        column,
        message,
    };
    let mut delim = None;
    let mut records = Vec::new();
    for (ln, raw) in text.lines().enumerate() {
        let line_no = ln + 1;
        let line = raw.strip_suffix('\r').unwrap_or(raw);
        if line.trim().is_empty() {
            continue;
        }
        let d = *delim.get_or_insert_with(|| Delimiter::detect(line));
        if let Some(pos) = line.find(d.foreign()) {
            return Err(err(
                line_no,
                line[..pos].chars().count() + 1,
                format!("mixed delimiters: expected {d:?}"),
            ));
        }
        let toks = tokens(line, d);
        let mut iter = toks.into_iter();
        let label = if with_label {
            match iter.next() {
                Some((_, t)) if !t.is_empty() => Some(t.to_string()),
                Some((col, _)) => return Err(err(line_no, col, "empty label".into())),
                None => return Err(err(line_no, 1, "missing label".into())),
            }
        } else {
            None
        };
        let mut values = Vec::new();
        for (col, tok) in iter {
            if tok.is_empty() {
                return Err(err(line_no, col, "empty field".into()));
            }
            match tok.parse::<f64>() {
                Ok(v) if v.is_finite() => values.push(v),
                Ok(_) => return Err(err(line_no, col, format!("non-finite value {tok:?}"))),
                Err(_) => return Err(err(line_no, col, format!("invalid number {tok:?}"))),
            }
        }
        if values.is_empty() {
            return Err(err(line_no, line.chars().count() + 1, "no values".into()));
        }
        records.push(Record { label, values });
    }
    if records.is_empty() {
        return Err(Error::EmptyDataset(path.to_path_buf()));
    }
    Ok(records)
}

fn read(path: &Path) -> Result<String> {
    fs::read_to_string(path).map_err(|e| Error::io(path, e))
}

fn read_labels(path: &Path) -> Result<Vec<String>> {
    Ok(read(path)?
        .lines()
        .map(|l| l.trim().to_string())
        .filter(|l| !l.is_empty())
        .collect())
}

/// Parses dataset text; `path` is only used in error messages.
pub fn parse_dataset(text: &str, path: &Path, labels: Option<&[String]>) -> Result<LabeledDataset> {
    let records = parse_records(text, path, labels.is_none())?;
    if let Some(labels) = labels {
        if labels.len() != records.len() {
            return Err(Error::Parse {
                path: path.to_path_buf(),
                line: records.len().min(labels.len()) + 1,
                column: 1,
                message: format!(
                    "{} series but {} labels in the side file",
                    records.len(),
                    labels.len()
                ),
            });
        }
    }
    let mut instances = Vec::with_capacity(records.len());
    for (i, r) in records.into_iter().enumerate() {
        let token = match labels {
            Some(l) => l[i].clone(),
            None => r.label.expect("ucr records carry labels"),
        };
        let label = ClassLabel::new(&token)?;
        instances.push(TimeSeries::labeled(r.values, label)?.with_id((i + 1).to_string()));
    }
    let name = path
        .file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_default();
    LabeledDataset::new(name, instances)
}

pub fn load_dataset(path: impl AsRef<Path>, format: &DatasetFormat) -> Result<LabeledDataset> {
    let path = path.as_ref();
    let text = read(path)?;
    match format {
        DatasetFormat::Ucr => parse_dataset(&text, path, None),
        DatasetFormat::Csv { labels: Some(lp) } => {
            let labels = read_labels(lp)?;
            parse_dataset(&text, path, Some(&labels))
        }
        DatasetFormat::Csv { labels: None } => Err(Error::Argument(
            "csv datasets need a label side file".into(),
        )),
    }
}

/// Loads series that may lack labels (queries). UCR lines still carry a
/// leading label token, which is kept.
pub fn load_series(path: impl AsRef<Path>, format: &DatasetFormat) -> Result<Vec<TimeSeries>> {
    let path = path.as_ref();
    let text = read(path)?;
    let with_label = matches!(format, DatasetFormat::Ucr);
    let records = parse_records(&text, path, with_label)?;
    records
        .into_iter()
        .enumerate()
        .map(|(i, r)| {
            let mut s = TimeSeries::new(r.values)?.with_id((i + 1).to_string());
            if let Some(l) = r.label {
                s = s.with_label(ClassLabel::new(l)?);
            }
            Ok(s)
        })
        .collect()
}

/// Renders a dataset as comma-separated UCR text.
pub fn format_dataset(dataset: &LabeledDataset) -> String {
    let mut out = String::new();
    for (i, s) in dataset.instances().iter().enumerate() {
        out.push_str(dataset.label(i).as_str());
        for v in s.values() {
            let _ = write!(out, ",{v}");
        }
        out.push('\n');
    }
    out
}

pub fn write_dataset(path: impl AsRef<Path>, dataset: &LabeledDataset) -> Result<()> {
    let path = path.as_ref();
    fs::write(path, format_dataset(dataset)).map_err(|e| Error::io(path, e))
}

/// Parses `series_id,start,end` lines; `#` lines and blank lines are
/// skipped. Legality against the series is checked when the annotation is
/// applied.
pub fn parse_annotations(text: &str, path: &Path) -> Result<Vec<SegmentAnnotation>> {
    let mut out = Vec::new();
    for (ln, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let toks = tokens(line, Delimiter::Comma);
        let err = |column: usize, message: String| Error::Parse {
            path: path.to_path_buf(),
            line: ln + 1,
            column,
            message,
        };
        if toks.len() != 3 {
            return Err(err(1, format!("expected 3 fields, found {}", toks.len())));
        }
        if toks[0].1.is_empty() {
            return Err(err(toks[0].0, "empty series id".into()));
        }
        let index = |(col, tok): (usize, &str)| {
            tok.parse::<usize>()
                .map_err(|_| err(col, format!("invalid index {tok:?}")))
        };
        out.push(SegmentAnnotation::new(toks[0].1, index(toks[1])?, index(toks[2])?));
    }
    Ok(out)
}

pub fn load_annotations(path: impl AsRef<Path>) -> Result<Vec<SegmentAnnotation>> {
    let path = path.as_ref();
    parse_annotations(&read(path)?, path)
}

/// Pairs each annotation with the series whose id it names.
pub fn match_annotations(
    series: &[TimeSeries],
    annotations: &[SegmentAnnotation],
) -> Result<Vec<(TimeSeries, SegmentAnnotation)>> {
    annotations
        .iter()
        .map(|a| {
            series
                .iter()
                .find(|s| s.id() == a.series_id)
                .map(|s| (s.clone(), a.clone()))
                .ok_or_else(|| Error::Argument(format!("no series with id {:?}", a.series_id)))
        })
        .collect()
}

pub const RELEVANCE_HEADER: &str = "index,value,relevance,relevance_normalized";

pub fn format_relevance(series: &TimeSeries, rv: &RelevanceVector) -> Result<String> {
    if rv.len() != series.len() {
        return Err(Error::Argument(format!(
            "relevance has {} entries for a series of length {}",
            rv.len(),
            series.len()
        )));
    }
    let mut out = String::from(RELEVANCE_HEADER);
    out.push('\n');
    for (i, v) in series.values().iter().enumerate() {
        let _ = writeln!(out, "{},{},{},{}", i + 1, v, rv.values[i], rv.normalized[i]);
    }
    Ok(out)
}

/// Writes the relevance CSV and, if requested, an SVG next to it with the
/// same stem.
pub fn write_relevance(
    path: impl AsRef<Path>,
    series: &TimeSeries,
    rv: &RelevanceVector,
    emit_svg: bool,
) -> Result<()> {
    let path = path.as_ref();
    fs::write(path, format_relevance(series, rv)?).map_err(|e| Error::io(path, e))?;
    if emit_svg {
        let svg_path = path.with_extension("svg");
        fs::write(&svg_path, relevance_svg(series, rv)).map_err(|e| Error::io(&svg_path, e))?;
    }
    Ok(())
}

/// Columns of a relevance CSV.
#[derive(Debug, Clone, PartialEq)]
pub struct RelevanceTable {
    pub values: Vec<f64>,
    pub relevance: Vec<f64>,
    pub normalized: Vec<f64>,
}

pub fn read_relevance(path: impl AsRef<Path>) -> Result<RelevanceTable> {
    let path = path.as_ref();
    let text = read(path)?;
    let mut lines = text.lines().enumerate();
    match lines.next() {
        Some((_, h)) if h.trim_end() == RELEVANCE_HEADER => {}
        _ => {
            return Err(Error::Parse {
                path: path.to_path_buf(),
                line: 1,
                column: 1,
                message: format!("expected header {RELEVANCE_HEADER:?}"),
            })
        }
    }
    let mut table = RelevanceTable {
        values: vec![],
        relevance: vec![],
        normalized: vec![],
    };
    for (ln, line) in lines {
        let line = line.trim_end_matches('\r');
        if line.is_empty() {
            continue;
        }
        let toks = tokens(line, Delimiter::Comma);
        let err = |column: usize, message: String| Error::Parse {
            path: path.to_path_buf(),
            line: ln + 1,
            column,
            message,
        };
        if toks.len() != 4 {
            return Err(err(1, format!("expected 4 fields, found {}", toks.len())));
        }
        let mut nums = [0.0; 3];
        for (slot, &(col, tok)) in nums.iter_mut().zip(&toks[1..]) {
            *slot = tok
                .parse()
                .map_err(|_| err(col, format!("invalid number {tok:?}")))?;
        }
        table.values.push(nums[0]);
        table.relevance.push(nums[1]);
        table.normalized.push(nums[2]);
    }
    Ok(table)
}

/// Blue (least relevant) to yellow (most relevant).
fn ramp(t: f64) -> String {
    let t = t.clamp(0.0, 1.0);
    let c = (255.0 * t).round() as u8;
    let b = (255.0 * (1.0 - t)).round() as u8;
    format!("#{c:02x}{c:02x}{b:02x}")
}

/// Self-contained SVG: the series as a polyline with one marker per point
/// coloured by normalised relevance.
pub fn relevance_svg(series: &TimeSeries, rv: &RelevanceVector) -> String {
    const W: f64 = 800.0;
    const H: f64 = 300.0;
    const PAD: f64 = 20.0;
    let v = series.values();
    let lo = v.iter().copied().fold(f64::INFINITY, f64::min);
    let hi = v.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let span = if hi > lo { hi - lo } else { 1.0 };
    let step = if v.len() > 1 {
        (W - 2.0 * PAD) / (v.len() - 1) as f64
    } else {
        0.0
    };
    let xy = |i: usize| {
        let x = PAD + step * i as f64;
        let y = H - PAD - (v[i] - lo) / span * (H - 2.0 * PAD);
        (x, y)
    };
    let mut out = format!(
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{W}\" height=\"{H}\" viewBox=\"0 0 {W} {H}\">\n\
         <rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n<polyline fill=\"none\" stroke=\"#888888\" stroke-width=\"1\" points=\""
    );
    for i in 0..v.len() {
        let (x, y) = xy(i);
        let _ = write!(out, "{x:.2},{y:.2} ");
    }
    out.push_str("\"/>\n");
    for i in 0..v.len() {
        let (x, y) = xy(i);
        let _ = writeln!(
            out,
            "<circle cx=\"{x:.2}\" cy=\"{y:.2}\" r=\"4\" fill=\"{}\"><title>{}: r={}</title></circle>",
            ramp(rv.normalized[i]),
            i + 1,
            rv.values[i]
        );
    }
    out.push_str("</svg>\n");
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p() -> &'static Path {
        Path::new("mem.txt")
    }

    #[test]
    fn ucr_line() {
        let ds = parse_dataset("1,0.5,0.7,0.9\n2,1\n", p(), None).unwrap();
        assert_eq!(ds.label(0).as_str(), "1");
        assert_eq!(ds.instance(0).values(), &[0.5, 0.7, 0.9]);
        assert_eq!(ds.instance(1).len(), 1);
        assert_eq!(ds.instance(1).id(), "2");
    }

    #[test]
    fn nan_names_the_line() {
        let e = parse_dataset("1,0.5\n2,NaN,1\n", p(), None).unwrap_err();
        match e {
            Error::Parse { line, column, .. } => {
                assert_eq!(line, 2);
                assert_eq!(column, 3);
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn whitespace_and_tabs() {
        let ds = parse_dataset("  1.0000000e+00  -1.5  2\r\n -1 3\n", p(), None).unwrap();
        assert_eq!(ds.label(0).as_str(), "1.0000000e+00");
        assert_eq!(ds.instance(0).values(), &[-1.5, 2.0]);
        let ds = parse_dataset("a\t1\t2\nb\t3\n", p(), None).unwrap();
        assert_eq!(ds.instance(1).values(), &[3.0]);
    }

    #[test]
    fn mixed_delimiters_are_rejected() {
        let e = parse_dataset("a,1,2\nb\t3\n", p(), None).unwrap_err();
        assert!(matches!(e, Error::Parse { line: 2, column: 2, .. }));
    }

    #[test]
    fn empty_file() {
        assert!(matches!(
            parse_dataset("\n\n", p(), None),
            Err(Error::EmptyDataset(_))
        ));
    }

    #[test]
    fn malformed_tokens() {
        assert!(matches!(
            parse_dataset("a,1,,2\n", p(), None),
            Err(Error::Parse { line: 1, column: 5, .. })
        ));
        assert!(matches!(
            parse_dataset("a,1,x2\nb,1\n", p(), None),
            Err(Error::Parse { line: 1, column: 5, .. })
        ));
        assert!(matches!(
            parse_dataset("a\n", p(), None),
            Err(Error::Parse { line: 1, .. })
        ));
    }

    #[test]
    fn side_labels() {
        let labels = vec!["x".to_string(), "y".to_string()];
        let ds = parse_dataset("1,2\n3,4,5\n", p(), Some(&labels)).unwrap();
        assert_eq!(ds.label(1).as_str(), "y");
        assert_eq!(ds.instance(1).values(), &[3.0, 4.0, 5.0]);
        assert!(parse_dataset("1,2\n", p(), Some(&labels)).is_err());
    }

    #[test]
    fn annotations() {
        let a = parse_annotations("# id,start,end\n\n7,3,5\r\nbeat 2, 2 ,4\n", p()).unwrap();
        assert_eq!(a, vec![SegmentAnnotation::new("7", 3, 5), SegmentAnnotation::new("beat 2", 2, 4)]);
        assert!(matches!(
            parse_annotations("7,3\n", p()),
            Err(Error::Parse { line: 1, .. })
        ));
        assert!(matches!(
            parse_annotations("7,3,x\n", p()),
            Err(Error::Parse { line: 1, column: 5, .. })
        ));
    }

    #[test]
    fn ramp_end_points() {
        assert_eq!(ramp(0.0), "#0000ff");
        assert_eq!(ramp(1.0), "#ffff00");
    }
}
