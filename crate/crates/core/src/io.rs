//! CSV readers for points, forests and weights, and the artefact writers.

use std::fmt::Write as _;
use std::fs;
use std::io::Read;
use std::path::Path;

use crate::condense::CondensedTree;
use crate::error::{PlscanError, Result};
use crate::leaf_tree::Segment;
use crate::mst::{Edge, SpanningForest};
use crate::persistence::{LayerSet, PersistenceTrace};
use crate::select::Clustering;

pub const PRECISION_ENV: &str = "PLSCAN_PRECISION";
pub const DEFAULT_PRECISION: usize = 9;

fn parse_error(context: &str, line: u64, message: impl Into<String>) -> PlscanError {
    PlscanError::Parse { context: format!("{context}, line {line}"), message: message.into() }
}

fn records(source: &str, reader: impl Read) -> Result<Vec<(u64, Vec<String>)>> {
    let mut rdr = csv::ReaderBuilder::new()
        .has_headers(false)
        .flexible(true)
        .trim(csv::Trim::All)
        .comment(Some(b'#'))
        .from_reader(reader);
    let mut out = Vec::new();
    for rec in rdr.records() {
        let rec = rec.map_err(|e| {
            let line = e.position().map_or(0, |p| p.line());
            parse_error(source, line, e.to_string())
        })?;
        let line = rec.position().map_or(0, |p| p.line());
        if rec.iter().all(str::is_empty) {
            continue;
        }
        out.push((line, rec.iter().map(str::to_owned).collect()));
    }
    Ok(out)
}

fn parse_f64(source: &str, line: u64, field: &str) -> Result<f64> {
    field.parse::<f64>().map_err(|_| parse_error(source, line, format!("`{field}` is not a number")))
}

/// Row-major coordinates and the column count. A first row that does not
/// parse as numbers is taken as a header.
pub fn read_points(source: &str, reader: impl Read) -> Result<(Vec<f64>, usize)> {
    let mut recs = records(source, reader)?;
    if let Some((_, first)) = recs.first() {
        if first.iter().any(|f| f.parse::<f64>().is_err()) {
            recs.remove(0);
        }
    }
    let Some((_, first)) = recs.first() else {
        return Err(PlscanError::Parse { context: source.into(), message: "no data rows".into() });
    };
    let dim = first.len();
    let mut data = Vec::with_capacity(recs.len() * dim);
    for (line, rec) in &recs {
        if rec.len() != dim {
            return Err(parse_error(source, *line, format!("expected {dim} columns, found {}", rec.len())));
        }
        for field in rec {
            data.push(parse_f64(source, *line, field)?);
        }
    }
    Ok((data, dim))
}

/// Edges of a `u,v,weight` file. Returns the edges and the largest vertex
/// index plus one.
pub fn read_forest_edges(source: &str, reader: impl Read) -> Result<(Vec<Edge>, usize)> {
    let recs = records(source, reader)?;
    let Some((line, header)) = recs.first() else {
        return Err(PlscanError::Parse { context: source.into(), message: "empty forest file".into() });
    };
    if header.iter().map(|h| h.to_ascii_lowercase()).collect::<Vec<_>>() != ["u", "v", "weight"] {
        return Err(parse_error(source, *line, "forest files must start with the header `u,v,weight`"));
    }
    let mut edges = Vec::with_capacity(recs.len() - 1);
    let mut n = 0;
    for (line, rec) in &recs[1..] {
        if rec.len() != 3 {
            return Err(parse_error(source, *line, format!("expected 3 columns, found {}", rec.len())));
        }
        let index = |f: &str| {
            f.parse::<usize>().map_err(|_| parse_error(source, *line, format!("`{f}` is not a vertex index")))
        };
        let (u, v) = (index(&rec[0])?, index(&rec[1])?);
        let weight = parse_f64(source, *line, &rec[2])?;
        n = n.max(u + 1).max(v + 1);
        edges.push(Edge { u, v, weight });
    }
    Ok((edges, n))
}

/// A validated forest over `num_points` vertices, or over the vertices the
/// edges mention when not given.
pub fn read_forest(source: &str, reader: impl Read, num_points: Option<usize>) -> Result<SpanningForest> {
    let (edges, seen) = read_forest_edges(source, reader)?;
    let n = num_points.unwrap_or(seen);
    if n < seen {
        return Err(PlscanError::InvalidInput(format!("edges reference vertex {} but n = {n}", seen - 1)));
    }
    SpanningForest::from_precomputed(edges, n)
}

/// One weight per line; an optional non-numeric header line is skipped.
pub fn read_weights(source: &str, reader: impl Read) -> Result<Vec<f64>> {
    let (data, dim) = read_points(source, reader)?;
    if dim != 1 {
        return Err(PlscanError::Parse {
            context: source.into(),
            message: format!("expected a single weight column, found {dim}"),
        });
    }
    Ok(data)
}

/// Segments of a `segment,parent,d_min,d_max,s_min,s_max` dump.
pub fn read_leaf_tree(source: &str, reader: impl Read) -> Result<Vec<Segment>> {
    let recs = records(source, reader)?;
    let mut segments = Vec::new();
    for (i, (line, rec)) in recs.iter().enumerate() {
        if i == 0 && rec.first().is_some_and(|f| f == "segment") {
            continue;
        }
        if rec.len() != 6 {
            return Err(parse_error(source, *line, format!("expected 6 columns, found {}", rec.len())));
        }
        let id = rec[0].parse::<usize>().ok();
        if id != Some(segments.len()) {
            return Err(parse_error(source, *line, format!("expected segment {}", segments.len())));
        }
        let parent = rec[1]
            .parse::<usize>()
            .map_err(|_| parse_error(source, *line, format!("`{}` is not a segment index", rec[1])))?;
        let v: Vec<f64> = rec[2..].iter().map(|f| parse_f64(source, *line, f)).collect::<Result<_>>()?;
        segments.push(Segment { parent, d_min: v[0], d_max: v[1], s_min: v[2], s_max: v[3] });
    }
    Ok(segments)
}

/// Significant digits for written floats, from the environment if set.
pub fn precision() -> usize {
    std::env::var(PRECISION_ENV)
        .ok()
        .and_then(|v| v.parse::<usize>().ok())
        .filter(|&p| (1..=17).contains(&p))
        .unwrap_or(DEFAULT_PRECISION)
}

/// `%g`-style formatting with `digits` significant digits.
pub fn format_float(x: f64, digits: usize) -> String {
    if x == 0.0 {
        return "0".into();
    }
    if !x.is_finite() {
        return if x.is_nan() {
            "nan".into()
        } else if x > 0.0 {
            "inf".into()
        } else {
            "-inf".into()
        };
    }
    let sci = format!("{:.*e}", digits - 1, x);
    let (mantissa, exp) = sci.split_once('e').expect("exponent");
    let exp: i32 = exp.parse().expect("exponent");
    if exp < -5 || exp >= digits as i32 {
        let sign = if exp < 0 { '-' } else { '+' };
        format!("{}e{sign}{:02}", trim_zeros(mantissa), exp.abs())
    } else {
        let decimals = (digits as i32 - 1 - exp).max(0) as usize;
        trim_zeros(&format!("{x:.decimals$}")).to_owned()
    }
}

fn trim_zeros(s: &str) -> &str {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.')
    } else {
        s
    }
}

/// Renders CSV text with floats at the configured precision.
struct Table {
    text: String,
    digits: usize,
}

impl Table {
    fn new(header: &str) -> Self {
        Table { text: format!("{header}\n"), digits: precision() }
    }

    fn num(&self, x: f64) -> String {
        format_float(x, self.digits)
    }

    fn row(&mut self, fields: &[String]) {
        let _ = writeln!(self.text, "{}", fields.join(","));
    }
}

pub fn labels_csv(clustering: &Clustering) -> String {
    let mut t = Table::new("point,label,probability");
    for (i, (&l, &p)) in clustering.labels.iter().zip(&clustering.probabilities).enumerate() {
        let p = t.num(p);
        t.row(&[i.to_string(), l.to_string(), p]);
    }
    t.text
}

pub fn trace_csv(trace: &PersistenceTrace) -> String {
    let mut t = Table::new("min_size,total_persistence");
    for (&b, &v) in trace.breakpoints.iter().zip(&trace.totals) {
        let row = [t.num(b), t.num(v)];
        t.row(&row);
    }
    t.text
}

pub fn layers_csv(layers: &LayerSet) -> String {
    let mut t = Table::new("rank,cut,total_persistence");
    for (rank, layer) in layers.layers.iter().enumerate() {
        let row = [rank.to_string(), t.num(layer.cut), t.num(layer.total)];
        t.row(&row);
    }
    t.text
}

pub fn leaf_tree_csv(segments: &[Segment]) -> String {
    let mut t = Table::new("segment,parent,d_min,d_max,s_min,s_max");
    for (i, s) in segments.iter().enumerate() {
        let row = [
            i.to_string(),
            s.parent.to_string(),
            t.num(s.d_min),
            t.num(s.d_max),
            t.num(s.s_min),
            t.num(s.s_max),
        ];
        t.row(&row);
    }
    t.text
}

pub fn condensed_csv(condensed: &CondensedTree) -> String {
    let mut t = Table::new("parent,child,distance,size");
    for r in condensed.rows() {
        let row = [r.parent.to_string(), r.child.to_string(), t.num(r.distance), t.num(r.size)];
        t.row(&row);
    }
    t.text
}

pub fn write_file(path: &Path, contents: &str) -> Result<()> {
    fs::write(path, contents).map_err(|e| PlscanError::Io(format!("{}: {e}", path.display())))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn formats_like_printf_g() {
        assert_eq!(format_float(150.0, 9), "150");
        assert_eq!(format_float(0.92, 9), "0.92");
        assert_eq!(format_float(1.0 / 3.0, 9), "0.333333333");
        assert_eq!(format_float(2.0 / 3.0, 3), "0.667");
        assert_eq!(format_float(1.5e-7, 9), "1.5e-07");
        assert_eq!(format_float(1234567891234.0, 9), "1.23456789e+12");
        assert_eq!(format_float(-0.5, 9), "-0.5");
        assert_eq!(format_float(99999.99999, 3), "1e+05");
    }

    #[test]
    fn points_with_and_without_header() {
        let (d, dim) = read_points("a", "x,y\n1,2\n3,4\n".as_bytes()).unwrap();
        assert_eq!((d, dim), (vec![1.0, 2.0, 3.0, 4.0], 2));
        let (d, dim) = read_points("a", "1,2,3\n".as_bytes()).unwrap();
        assert_eq!((d, dim), (vec![1.0, 2.0, 3.0], 3));
    }

    #[test]
    fn malformed_rows_report_their_line() {
        let err = read_points("pts.csv", "1,2\n3,4\n5,oops\n".as_bytes()).unwrap_err();
        assert!(err.to_string().contains("pts.csv, line 3"), "{err}");
        let err = read_points("pts.csv", "1,2\n3\n".as_bytes()).unwrap_err();
        assert!(err.to_string().contains("line 2"), "{err}");
    }

    #[test]
    fn forest_requires_header() {
        assert!(read_forest("f", "0,1,1.0\n".as_bytes(), None).is_err());
        let f = read_forest("f", "u,v,weight\n0,1,1.5\n1,2,0.5\n".as_bytes(), None).unwrap();
        assert_eq!((f.n(), f.edges().len()), (3, 2));
        let f = read_forest("f", "u,v,weight\n0,1,1.5\n".as_bytes(), Some(4)).unwrap();
        assert_eq!(f.num_components(), 3);
        let err = read_forest("f", "u,v,weight\n0,1,1.5\n1,x,2\n".as_bytes(), None).unwrap_err();
        assert!(err.to_string().contains("line 3"), "{err}");
    }

    #[test]
    fn leaf_tree_round_trip() {
        let segs = vec![
            Segment { parent: 0, d_min: 0.0, d_max: 2.5, s_min: 2.0, s_max: 10.0 },
            Segment { parent: 0, d_min: 0.125, d_max: 2.5, s_min: 2.0, s_max: 4.0 },
        ];
        assert_eq!(read_leaf_tree("t", leaf_tree_csv(&segs).as_bytes()).unwrap(), segs);
    }
}
