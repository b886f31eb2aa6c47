//! CSV and JSON formats, and atomic file output.
//!
//! Reals are written as `{:.16e}` (17 significant digits), which parses back
//! to the identical `f64`, so dump -> load -> dump is byte-identical.

use std::fs;
use std::io::Write;
use std::path::Path;

use serde::Serialize;
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};
use crate::model::{AcceptanceSegment, CulturalIdentity, WorldviewId, Worldviews};
use crate::population::{Agent, Kind, Population};
use crate::synthesis::IndicatorMatrix;
use crate::threat::ThreatUpdateRecord;

pub fn fmt_f64(x: f64) -> String {
    format!("{x:.16e}")
}

pub fn fmt_opt(x: Option<f64>) -> String {
    x.map(fmt_f64).unwrap_or_default()
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}

/// Writes `bytes` to a temporary sibling and renames it over `path`, so a
/// reader never sees a partially written file.
pub fn write_atomic(path: &Path, bytes: &[u8]) -> Result<()> {
    let dir = path.parent().filter(|p| !p.as_os_str().is_empty()).unwrap_or(Path::new("."));
    fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    let name = path
        .file_name()
        .ok_or_else(|| Error::data(path, "not a file path"))?
        .to_string_lossy();
    let tmp = dir.join(format!(".{name}.tmp-{}", std::process::id()));
    let result = (|| {
        let mut f = fs::File::create(&tmp)?;
        f.write_all(bytes)?;
        f.sync_all()?;
        fs::rename(&tmp, path)
    })();
    result.map_err(|e| {
        let _ = fs::remove_file(&tmp);
        Error::io(path, e)
    })
}

pub fn to_json_bytes<T: Serialize>(value: &T) -> Result<Vec<u8>> {
    let mut out = serde_json::to_vec_pretty(value)?;
    out.push(b'\n');
    Ok(out)
}

fn read_text(path: &Path) -> Result<String> {
    fs::read_to_string(path).map_err(|e| Error::io(path, e))
}

/// Builds CSV text from a header and rows of already formatted fields.
pub struct CsvTable {
    writer: csv::Writer<Vec<u8>>,
}

impl CsvTable {
    pub fn new<S: AsRef<[u8]>>(header: impl IntoIterator<Item = S>) -> Result<Self> {
        let mut writer = csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_writer(Vec::new());
        writer.write_record(header)?;
        Ok(CsvTable { writer })
    }

    pub fn row<S: AsRef<[u8]>>(&mut self, fields: impl IntoIterator<Item = S>) -> Result<()> {
        Ok(self.writer.write_record(fields)?)
    }

    pub fn into_bytes(self) -> Result<Vec<u8>> {
        self.writer
            .into_inner()
            .map_err(|e| Error::Io { path: "<csv buffer>".into(), source: e.into_error() })
    }
}

fn reader(text: &str) -> csv::Reader<&[u8]> {
    csv::ReaderBuilder::new().has_headers(true).from_reader(text.as_bytes())
}

fn parse_f64(path: &Path, line: usize, field: &str) -> Result<f64> {
    field
        .trim()
        .parse::<f64>()
        .ok()
        .filter(|x| x.is_finite())
        .ok_or_else(|| Error::data(path, format!("line {line}: not a finite number: {field:?}")))
}

// ---------------------------------------------------------------------------
// Populations: id,group,kind,<W>_a,<W>_b,<W>_B per worldview

pub fn population_csv(population: &Population) -> Result<Vec<u8>> {
    let wv = population.worldviews();
    let mut header = vec!["id".to_string(), "group".into(), "kind".into()];
    for l in wv.labels() {
        header.extend([format!("{l}_a"), format!("{l}_b"), format!("{l}_B")]);
    }
    let mut t = CsvTable::new(&header)?;
    for a in population.agents() {
        let mut row = vec![a.id.to_string(), wv.label(a.group).to_string(), a.kind.to_string()];
        for s in a.identity.segments() {
            row.extend([fmt_f64(s.position()), fmt_f64(s.lower()), fmt_f64(s.upper())]);
        }
        t.row(&row)?;
    }
    t.into_bytes()
}

pub fn write_population(path: &Path, population: &Population) -> Result<()> {
    write_atomic(path, &population_csv(population)?)
}

pub fn parse_population(path: &Path, text: &str) -> Result<Population> {
    let mut rdr = reader(text);
    let header: Vec<String> = rdr.headers()?.iter().map(str::to_string).collect();
    if header.len() < 3 + 6 || (header.len() - 3) % 3 != 0 || header[..3] != ["id", "group", "kind"] {
        return Err(Error::data(path, "expected header id,group,kind,<W>_a,<W>_b,<W>_B,..."));
    }
    let mut labels = Vec::new();
    for chunk in header[3..].chunks(3) {
        let label = chunk[0].strip_suffix("_a").unwrap_or("");
        if label.is_empty() || chunk[1] != format!("{label}_b") || chunk[2] != format!("{label}_B") {
            return Err(Error::data(path, format!("bad worldview columns {chunk:?}")));
        }
        labels.push(label.to_string());
    }
    let worldviews = Worldviews::new(labels)?;
    let mut agents = Vec::new();
    for (i, rec) in rdr.records().enumerate() {
        let rec = rec?;
        let line = i + 2;
        let id = rec[0]
            .parse::<usize>()
            .map_err(|_| Error::data(path, format!("line {line}: bad agent id {:?}", &rec[0])))?;
        let group = worldviews.id(&rec[1])?;
        let kind: Kind = rec[2].parse()?;
        let segments = (0..worldviews.len())
            .map(|w| {
                let f = |c: usize| parse_f64(path, line, &rec[3 + 3 * w + c]);
                AcceptanceSegment::new(f(0)?, f(1)?, f(2)?)
            })
            .collect::<Result<Vec<_>>>()?;
        agents.push(Agent {
            id,
            group,
            kind,
            identity: CulturalIdentity::new(segments)?,
        });
    }
    Population::new(worldviews, agents)
}

pub fn read_population(path: &Path) -> Result<Population> {
    parse_population(path, &read_text(path)?)
}

// ---------------------------------------------------------------------------
// Indicator matrices: observer_group,target_group,mean,std

pub fn indicators_csv(m: &IndicatorMatrix) -> Result<Vec<u8>> {
    let wv = &m.worldviews;
    let mut t = CsvTable::new(["observer_group", "target_group", "mean", "std"])?;
    for g in wv.ids() {
        for h in wv.ids() {
            t.row([
                wv.label(g).to_string(),
                wv.label(h).to_string(),
                fmt_f64(m.mean[g.0][h.0]),
                fmt_f64(m.std[g.0][h.0]),
            ])?;
        }
    }
    t.into_bytes()
}

/// Reads a reference matrix. Worldviews appear in first-seen order and every
/// ordered pair must be present exactly once.
pub fn parse_indicators(path: &Path, text: &str) -> Result<IndicatorMatrix> {
    let mut rdr = reader(text);
    if rdr.headers()?.iter().collect::<Vec<_>>() != ["observer_group", "target_group", "mean", "std"] {
        return Err(Error::data(path, "expected header observer_group,target_group,mean,std"));
    }
    let mut labels: Vec<String> = Vec::new();
    let mut rows = Vec::new();
    for (i, rec) in rdr.records().enumerate() {
        let rec = rec?;
        let line = i + 2;
        for l in [&rec[0], &rec[1]] {
            if !labels.iter().any(|x| x == l) {
                labels.push(l.to_string());
            }
        }
        rows.push((rec[0].to_string(), rec[1].to_string(), parse_f64(path, line, &rec[2])?, parse_f64(path, line, &rec[3])?));
    }
    let worldviews = Worldviews::new(labels)?;
    let k = worldviews.len();
    let mut mean = vec![vec![None; k]; k];
    let mut std = vec![vec![None; k]; k];
    for (g, h, m, s) in rows {
        let (g, h) = (worldviews.id(&g)?.0, worldviews.id(&h)?.0);
        if mean[g][h].is_some() {
            return Err(Error::data(path, format!("duplicate row for {}, {}", worldviews.labels()[g], worldviews.labels()[h])));
        }
        mean[g][h] = Some(m);
        std[g][h] = Some(s);
    }
    let complete = |v: Vec<Vec<Option<f64>>>| -> Result<Vec<Vec<f64>>> {
        v.into_iter()
            .map(|r| r.into_iter().collect::<Option<Vec<f64>>>())
            .collect::<Option<Vec<_>>>()
            .ok_or_else(|| Error::data(path, format!("need all {} ordered group pairs", k * k)))
    };
    IndicatorMatrix::new(worldviews, complete(mean)?, complete(std)?)
}

pub fn read_indicators(path: &Path) -> Result<IndicatorMatrix> {
    parse_indicators(path, &read_text(path)?)
}

// ---------------------------------------------------------------------------
// Threat traces

pub fn trace_csv<'a>(
    worldviews: &Worldviews,
    records: impl IntoIterator<Item = &'a ThreatUpdateRecord>,
) -> Result<Vec<u8>> {
    let mut t = CsvTable::new([
        "t",
        "agent_id",
        "group",
        "prototype",
        "omega_qi",
        "mu",
        "worldview",
        "side",
        "bound_before",
        "bound_after",
    ])?;
    for r in records {
        t.row([
            r.t.to_string(),
            r.agent_id.to_string(),
            worldviews.label(r.group).to_string(),
            format!("{}-{}", worldviews.label(r.group), r.kind),
            fmt_f64(r.omega_qi),
            fmt_f64(r.mu),
            worldviews.label(r.worldview).to_string(),
            r.side.to_string(),
            fmt_f64(r.bound_before),
            fmt_f64(r.bound_after),
        ])?;
    }
    t.into_bytes()
}

pub(crate) fn label(worldviews: &Worldviews, id: Option<WorldviewId>) -> String {
    id.map(|g| worldviews.label(g).to_string()).unwrap_or_else(|| "all".into())
}
