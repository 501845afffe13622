//! File formats: numeric CSV point clouds, DOT graphs, diagram and
//! confidence CSVs, the params report, and the static diagram SVG.

use reebmap_core::confidence::ConfidenceRegion;
use reebmap_core::cover::IntervalCover;
use reebmap_core::error::{input_err, Error, Result};
use reebmap_core::geometry::PointCloud;
use reebmap_core::mapper::MapperGraph;
use reebmap_core::persistence::{ExtendedDiagram, PointType};
use reebmap_core::tuning::{HypothesisReport, MapperParams};
use std::path::Path;

/// Loads a point cloud from CSV: n rows of D numeric columns, '.' decimal
/// separator, optional single header row. Row order is preserved.
pub fn load_points(path: &Path) -> Result<PointCloud> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| Error::Input(format!("cannot read {}: {e}", path.display())))?;
    parse_points(&text, &path.display().to_string())
}

pub fn parse_points(text: &str, origin: &str) -> Result<PointCloud> {
    let mut rows: Vec<Vec<f64>> = Vec::new();
    let mut width: Option<usize> = None;
    for (idx, line) in text.lines().enumerate() {
        let line_no = idx + 1;
        let trimmed = line.trim();
        if trimmed.is_empty() {
            continue;
        }
        let fields: Vec<&str> = trimmed.split(',').map(str::trim).collect();
        let parsed: std::result::Result<Vec<f64>, _> =
            fields.iter().map(|f| f.parse::<f64>()).collect();
        match parsed {
            Ok(values) => {
                if let Some(w) = width {
                    if values.len() != w {
                        return input_err(format!(
                            "{origin}: line {line_no} has {} columns, expected {w}",
                            values.len()
                        ));
                    }
                } else {
                    width = Some(values.len());
                }
                rows.push(values);
            }
            Err(_) => {
                // a single non-numeric first row is a header
                if rows.is_empty() && width.is_none() {
                    width = None;
                    continue;
                }
                return input_err(format!("{origin}: non-numeric cell at line {line_no}"));
            }
        }
    }
    if rows.is_empty() {
        return input_err(format!("{origin}: no data rows"));
    }
    PointCloud::new(rows).map_err(|e| Error::Input(format!("{origin}: {e}")))
}

pub fn save_points(pc: &PointCloud, path: &Path) -> Result<()> {
    let mut out = String::new();
    for p in pc.points() {
        let row: Vec<String> = p.iter().map(|c| c.to_string()).collect();
        out.push_str(&row.join(","));
        out.push('\n');
    }
    write_file(path, &out)
}

pub fn write_file(path: &Path, content: &str) -> Result<()> {
    std::fs::write(path, content)
        .map_err(|e| Error::Input(format!("cannot write {}: {e}", path.display())))
}

/// DOT serialization: node label "c<id>|<size>" with an fvalue attribute,
/// one edge line per multiplicity.
pub fn dot_string(m: &MapperGraph) -> String {
    let mut out = String::from("graph mapper {\n");
    for node in &m.nodes {
        out.push_str(&format!(
            "  n{} [label=\"c{}|{}\", fvalue=\"{}\"];\n",
            node.id, node.id, node.size, node.fvalue
        ));
    }
    for &(u, v) in &m.edges {
        out.push_str(&format!("  n{u} -- n{v};\n"));
    }
    out.push_str("}\n");
    out
}

/// Recovers (node count, sorted edge multiset) from DOT text; used to check
/// that graph exports round-trip.
pub fn parse_dot(text: &str) -> Result<(usize, Vec<(usize, usize)>)> {
    let mut nodes = 0usize;
    let mut edges = Vec::new();
    for line in text.lines() {
        let line = line.trim();
        if let Some(rest) = line.strip_prefix('n') {
            if line.contains("--") {
                let parts: Vec<&str> = rest.trim_end_matches(';').split("--").collect();
                if parts.len() != 2 {
                    return input_err(format!("malformed edge line '{line}'"));
                }
                let u: usize = parts[0]
                    .trim()
                    .parse()
                    .map_err(|_| Error::Input(format!("bad edge '{line}'")))?;
                let v: usize = parts[1]
                    .trim()
                    .trim_start_matches('n')
                    .parse()
                    .map_err(|_| Error::Input(format!("bad edge '{line}'")))?;
                edges.push((u, v));
            } else if line.contains("label") {
                nodes += 1;
            }
        }
    }
    edges.sort_unstable();
    Ok((nodes, edges))
}

pub fn diagram_csv(d: &ExtendedDiagram) -> String {
    let mut out = String::from("type,birth,death\n");
    for p in &d.points {
        out.push_str(&format!("{},{},{}\n", p.ptype, p.birth, p.death));
    }
    out
}

pub fn parse_diagram_csv(text: &str) -> Result<ExtendedDiagram> {
    let mut points = Vec::new();
    for (idx, line) in text.lines().enumerate().skip(1) {
        if line.trim().is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.split(',').collect();
        if fields.len() != 3 {
            return input_err(format!("diagram csv: bad row at line {}", idx + 1));
        }
        let ptype = PointType::parse(fields[0])?;
        let birth: f64 = fields[1]
            .parse()
            .map_err(|_| Error::Input(format!("diagram csv: bad birth at line {}", idx + 1)))?;
        let death: f64 = fields[2]
            .parse()
            .map_err(|_| Error::Input(format!("diagram csv: bad death at line {}", idx + 1)))?;
        points.push(reebmap_core::persistence::DiagramPoint::new(
            ptype, birth, death,
        ));
    }
    Ok(ExtendedDiagram::new(points))
}

pub fn confidence_csv(region: &ConfidenceRegion) -> String {
    let mut out = String::from("type,birth,death,eta,significant\n");
    for (p, significant) in &region.per_point {
        out.push_str(&format!(
            "{},{},{},{},{}\n",
            p.ptype, p.birth, p.death, region.eta, significant
        ));
    }
    out
}

pub fn params_txt(
    params: &MapperParams,
    cover: &IntervalCover,
    report: &HypothesisReport,
    seed: u64,
    filter_name: &str,
) -> String {
    format!(
        "filter: {filter_name}\nseed: {seed}\ndelta: {}\nresolution: {}\ngain: {}\nintervals: {}\nvariant: {}\nprovenance: {}\n--- hypothesis checks ---\n{}\n",
        params.delta,
        params.r,
        params.g,
        cover.len(),
        params.variant,
        params.provenance,
        report
    )
}

/// Static SVG of the diagram: the diagonal, Ord0/Rel1 dots above/below it,
/// and squares of half-width eta centered on the extended points.
pub fn diagram_svg(d: &ExtendedDiagram, eta: f64) -> String {
    let (mut lo, mut hi) = (f64::INFINITY, f64::NEG_INFINITY);
    for p in &d.points {
        lo = lo.min(p.birth).min(p.death);
        hi = hi.max(p.birth).max(p.death);
    }
    if !lo.is_finite() || !hi.is_finite() {
        lo = 0.0;
        hi = 1.0;
    }
    let pad = (0.1 * (hi - lo)).max(0.1) + eta;
    let (lo, hi) = (lo - pad, hi + pad);
    let size = 480.0;
    let scale = size / (hi - lo);
    let x = |v: f64| (v - lo) * scale;
    let y = |v: f64| size - (v - lo) * scale;

    let mut out = format!(
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{size}\" height=\"{size}\" viewBox=\"0 0 {size} {size}\">\n"
    );
    out.push_str(&format!(
        "  <rect x=\"0\" y=\"0\" width=\"{size}\" height=\"{size}\" fill=\"white\"/>\n"
    ));
    out.push_str(&format!(
        "  <line x1=\"{}\" y1=\"{}\" x2=\"{}\" y2=\"{}\" stroke=\"black\" stroke-width=\"1\"/>\n",
        x(lo),
        y(lo),
        x(hi),
        y(hi)
    ));
    for p in &d.points {
        let (cx, cy) = (x(p.birth), y(p.death));
        match p.ptype {
            PointType::Ord0 => out.push_str(&format!(
                "  <circle cx=\"{cx}\" cy=\"{cy}\" r=\"4\" fill=\"steelblue\"><title>Ord0 ({},{})</title></circle>\n",
                p.birth, p.death
            )),
            PointType::Rel1 => out.push_str(&format!(
                "  <circle cx=\"{cx}\" cy=\"{cy}\" r=\"4\" fill=\"darkorange\"><title>Rel1 ({},{})</title></circle>\n",
                p.birth, p.death
            )),
            PointType::Ext0 | PointType::Ext1 => {
                let color = if p.ptype == PointType::Ext0 {
                    "seagreen"
                } else {
                    "crimson"
                };
                let half = (eta * scale).max(4.0);
                out.push_str(&format!(
                    "  <rect x=\"{}\" y=\"{}\" width=\"{}\" height=\"{}\" fill=\"none\" stroke=\"{color}\" stroke-width=\"1.5\"><title>{} ({},{}) half-width {eta}</title></rect>\n",
                    cx - half,
                    cy - half,
                    2.0 * half,
                    2.0 * half,
                    p.ptype,
                    p.birth,
                    p.death
                ));
                out.push_str(&format!(
                    "  <circle cx=\"{cx}\" cy=\"{cy}\" r=\"3\" fill=\"{color}\"/>\n"
                ));
            }
        }
    }
    out.push_str("</svg>\n");
    out
}

/// A denoise instruction `dtm:<k>:<tau_frac>` with an optional trailing
/// `:low` (default, remove high-DTM outliers) or `:high` (inverted
/// threshold direction).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DenoiseSpec {
    pub k: usize,
    pub tau_frac: f64,
    pub mode: reebmap_core::DtmKeep,
}

impl DenoiseSpec {
    pub fn parse(s: &str) -> Result<Self> {
        let parts: Vec<&str> = s.split(':').collect();
        if parts.len() < 3 || parts.len() > 4 || parts[0] != "dtm" {
            return input_err(format!(
                "malformed denoise spec '{s}' (expected dtm:<k>:<tau>[:low|high])"
            ));
        }
        let k: usize = parts[1]
            .parse()
            .map_err(|_| Error::Input(format!("bad neighbor count in '{s}'")))?;
        let tau_frac: f64 = parts[2]
            .parse()
            .map_err(|_| Error::Input(format!("bad threshold fraction in '{s}'")))?;
        let mode = match parts.get(3) {
            None | Some(&"low") => reebmap_core::DtmKeep::KeepLow,
            Some(&"high") => reebmap_core::DtmKeep::KeepHigh,
            Some(other) => {
                return input_err(format!("bad mode '{other}' in '{s}' (low or high)"))
            }
        };
        Ok(Self { k, tau_frac, mode })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use reebmap_core::persistence::DiagramPoint;

    #[test]
    fn parse_points_basic() {
        let pc = parse_points("0,0\n3,4\n", "t").unwrap();
        assert_eq!(pc.len(), 2);
        assert_eq!(pc.dim(), 2);
        let pc = parse_points("x,y\n1,2\n3,4\n", "t").unwrap();
        assert_eq!(pc.len(), 2);
    }

    #[test]
    fn parse_points_errors() {
        let err = parse_points("1,2\n3\n", "t").unwrap_err().to_string();
        assert!(err.contains("line 2"), "{err}");
        let err = parse_points("1,2\n3,x\n", "t").unwrap_err().to_string();
        assert!(err.contains("line 2"), "{err}");
        assert!(parse_points("", "t").is_err());
        assert!(parse_points("x,y\n", "t").is_err());
    }

    #[test]
    fn diagram_csv_round_trip() {
        let d = ExtendedDiagram::new(vec![
            DiagramPoint::new(PointType::Ext0, -1.0, 1.0),
            DiagramPoint::new(PointType::Ext1, 0.9999999999, -1.0),
        ]);
        let text = diagram_csv(&d);
        let back = parse_diagram_csv(&text).unwrap();
        assert_eq!(d, back);
    }

    #[test]
    fn denoise_spec_parse() {
        let s = DenoiseSpec::parse("dtm:10:0.4").unwrap();
        assert_eq!(
            (s.k, s.tau_frac, s.mode),
            (10, 0.4, reebmap_core::DtmKeep::KeepLow)
        );
        let s = DenoiseSpec::parse("dtm:5:0.3:high").unwrap();
        assert_eq!(s.mode, reebmap_core::DtmKeep::KeepHigh);
        assert!(DenoiseSpec::parse("dtm:5").is_err());
        assert!(DenoiseSpec::parse("knn:5:0.4").is_err());
        assert!(DenoiseSpec::parse("dtm:5:0.4:sideways").is_err());
    }
}
