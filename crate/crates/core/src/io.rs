//! Point-cloud files.
//!
//! CSV: a header `y1,...,yL` optionally followed by `label`, then one point
//! per row. JSON: `{"ell": L, "points": [[...], ...], "labels": [...]}`.
//! Floats are written in shortest round-trip form, so `ingest ∘ emit` is
//! the identity.

use std::fs::File;
use std::io::{BufReader, Read, Write};
use std::path::Path;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::efficiency::PointCloud;
use crate::error::{Error, Result};
use crate::point::{Point, Tolerance};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Csv,
    Json,
}

impl Format {
    /// Guess from the file extension; anything but `.json` is CSV.
    pub fn from_path(path: &Path) -> Format {
        match path.extension().and_then(|e| e.to_str()) {
            Some(e) if e.eq_ignore_ascii_case("json") => Format::Json,
            _ => Format::Csv,
        }
    }
}

impl FromStr for Format {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "csv" => Ok(Format::Csv),
            "json" => Ok(Format::Json),
            other => Err(Error::param("format", format!("unknown format `{other}` (csv or json)"))),
        }
    }
}

#[derive(Serialize, Deserialize)]
struct CloudFile {
    ell: usize,
    points: Vec<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    labels: Option<Vec<String>>,
}

pub fn ingest(path: &Path, format: Format, tol: Tolerance) -> Result<PointCloud> {
    let reader = BufReader::new(File::open(path)?);
    ingest_reader(reader, format, tol)
}

pub fn ingest_reader<R: Read>(reader: R, format: Format, tol: Tolerance) -> Result<PointCloud> {
    let (points, labels) = match format {
        Format::Csv => parse_csv(reader)?,
        Format::Json => parse_json(reader)?,
    };
    let n = points.len();
    let cloud = PointCloud::new(points, labels, tol)?;
    if cloud.merged() > 0 {
        log::warn!(
            "merged {} duplicate point(s) within tau = {:e}; {} of {n} remain",
            cloud.merged(),
            tol.tau(),
            cloud.len()
        );
    }
    Ok(cloud)
}

type Parsed = (Vec<Point>, Option<Vec<String>>);

fn parse_csv<R: Read>(reader: R) -> Result<Parsed> {
    let mut rdr = csv::ReaderBuilder::new()
        .has_headers(true)
        .flexible(true)
        .trim(csv::Trim::All)
        .from_reader(reader);
    let header = rdr.headers()?.clone();
    let has_label = header.iter().next_back() == Some("label");
    let ell = header.len() - usize::from(has_label);
    for (c, name) in header.iter().take(ell).enumerate() {
        if name != format!("y{}", c + 1) {
            return Err(Error::Input {
                line: 1,
                message: format!("expected header column `y{}`, found `{name}`", c + 1),
            });
        }
    }
    if ell < 2 {
        return Err(Error::Input {
            line: 1,
            message: format!("need at least 2 coordinates, header has {ell}"),
        });
    }
    let mut points = Vec::new();
    let mut labels = has_label.then(Vec::new);
    for record in rdr.records() {
        let record = record?;
        let line = record.position().map_or(0, |p| p.line() as usize);
        if record.len() != header.len() {
            return Err(Error::Input {
                line,
                message: format!("expected {} fields, found {}", header.len(), record.len()),
            });
        }
        let coords = record
            .iter()
            .take(ell)
            .map(|cell| {
                cell.parse::<f64>().map_err(|_| Error::Input {
                    line,
                    message: format!("non-numeric cell `{cell}`"),
                })
            })
            .collect::<Result<Vec<_>>>()?;
        points.push(Point::new(coords).map_err(|e| Error::Input {
            line,
            message: e.to_string(),
        })?);
        if let Some(l) = labels.as_mut() {
            l.push(record[ell].to_string());
        }
    }
    if points.is_empty() {
        return Err(Error::Input {
            line: 1,
            message: "no points".into(),
        });
    }
    Ok((points, labels))
}

fn parse_json<R: Read>(reader: R) -> Result<Parsed> {
    let file: CloudFile = serde_json::from_reader(reader)?;
    if file.ell < 2 {
        return Err(Error::Input {
            line: 1,
            message: format!("ell must be >= 2, got {}", file.ell),
        });
    }
    let points = file
        .points
        .into_iter()
        .enumerate()
        .map(|(i, p)| {
            if p.len() != file.ell {
                return Err(Error::param(
                    "points",
                    format!("point {i} has {} coordinates, ell is {}", p.len(), file.ell),
                ));
            }
            Point::new(p)
        })
        .collect::<Result<Vec<_>>>()?;
    if points.is_empty() {
        return Err(Error::param("points", "no points"));
    }
    Ok((points, file.labels))
}

pub fn emit(cloud: &PointCloud, path: &Path, format: Format) -> Result<()> {
    let mut f = File::create(path)?;
    emit_writer(cloud, &mut f, format)?;
    f.flush()?;
    Ok(())
}

pub fn emit_writer<W: Write>(cloud: &PointCloud, w: W, format: Format) -> Result<()> {
    match format {
        Format::Csv => {
            let mut wtr = csv::Writer::from_writer(w);
            let mut header: Vec<String> = (1..=cloud.ell()).map(|i| format!("y{i}")).collect();
            if cloud.labels().is_some() {
                header.push("label".into());
            }
            wtr.write_record(&header)?;
            for (i, p) in cloud.points().iter().enumerate() {
                let mut row: Vec<String> = p.coords().iter().map(|v| v.to_string()).collect();
                if let Some(l) = cloud.labels() {
                    row.push(l[i].clone());
                }
                wtr.write_record(&row)?;
            }
            wtr.flush()?;
        }
        Format::Json => {
            let file = CloudFile {
                ell: cloud.ell(),
                points: cloud.points().iter().map(|p| p.coords().to_vec()).collect(),
                labels: cloud.labels().map(|l| l.to_vec()),
            };
            let mut w = w;
            serde_json::to_writer_pretty(&mut w, &file)?;
            writeln!(w)?;
        }
    }
    Ok(())
}
