//! Instance files.
//!
//! CSV: one row per alternative, `ind_id,alt_id,utility,social[,label]`,
//! header required. JSON: `{"individuals":[{"id","alternatives":[...]}],
//! "metadata":{...}}`. Numbers are written in shortest round-trip form so
//! that loading a saved instance yields the same instance.

use std::collections::{BTreeMap, HashMap, HashSet};
use std::fs::File;
use std::io::{BufReader, BufWriter, Read, Write};
use std::path::Path;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{AltId, Alternative, IndId, Individual, Instance};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
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
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "csv" => Ok(Format::Csv),
            "json" => Ok(Format::Json),
            other => Err(format!("unknown format '{other}' (expected csv or json)")),
        }
    }
}

#[derive(Debug, Serialize, Deserialize)]
struct CsvRow {
    ind_id: String,
    alt_id: String,
    utility: String,
    social: String,
    #[serde(default)]
    label: Option<String>,
}

#[derive(Serialize, Deserialize)]
struct JsonInstance {
    individuals: Vec<Individual>,
    #[serde(default)]
    metadata: BTreeMap<String, String>,
}

pub fn load_instance(path: &Path, format: Format) -> Result<Instance> {
    let file = File::open(path).map_err(|e| Error::io(path, e))?;
    let reader = BufReader::new(file);
    match format {
        Format::Csv => read_instance_csv(reader),
        Format::Json => read_instance_json(reader),
    }
}

pub fn save_instance(instance: &Instance, path: &Path, format: Format) -> Result<()> {
    let file = File::create(path).map_err(|e| Error::io(path, e))?;
    let mut writer = BufWriter::new(file);
    match format {
        Format::Csv => write_instance_csv(instance, &mut writer)?,
        Format::Json => write_instance_json(instance, &mut writer)?,
    }
    writer.flush().map_err(|e| Error::io(path, e))
}

fn parse_field<T: FromStr>(raw: &str, what: &str, line: u64) -> Result<T> {
    raw.trim().parse().map_err(|_| Error::Parse {
        line: Some(line),
        message: format!("invalid {what} '{raw}'"),
    })
}

pub fn read_instance_csv<R: Read>(reader: R) -> Result<Instance> {
    let mut rdr = csv::ReaderBuilder::new()
        .has_headers(true)
        .trim(csv::Trim::All)
        .from_reader(reader);
    let headers = rdr.headers().map_err(csv_parse_error)?.clone();
    for required in ["ind_id", "alt_id", "utility", "social"] {
        if !headers.iter().any(|h| h == required) {
            return Err(Error::Parse {
                line: Some(1),
                message: format!("missing column '{required}' in header"),
            });
        }
    }

    let mut order: Vec<IndId> = Vec::new();
    let mut by_ind: HashMap<IndId, Vec<Alternative>> = HashMap::new();
    let mut seen: HashSet<(IndId, AltId)> = HashSet::new();
    for record in rdr.records() {
        let record = record.map_err(csv_parse_error)?;
        let line = record.position().map(|p| p.line()).unwrap_or(0);
        let row: CsvRow = record
            .deserialize(Some(&headers))
            .map_err(|e| Error::Parse {
                line: Some(line),
                message: e.to_string(),
            })?;
        let ind = IndId(parse_field(&row.ind_id, "ind_id", line)?);
        let alt = AltId(parse_field(&row.alt_id, "alt_id", line)?);
        let utility: f64 = parse_field(&row.utility, "utility", line)?;
        let social: f64 = parse_field(&row.social, "social", line)?;
        for (field, v) in [("utility", utility), ("social", social)] {
            if !v.is_finite() {
                return Err(Error::NonFinite {
                    field,
                    ind,
                    alt,
                    line: Some(line),
                });
            }
        }
        if !seen.insert((ind, alt)) {
            return Err(Error::DuplicateAlternative {
                ind,
                alt,
                line: Some(line),
            });
        }
        let label = row.label.filter(|l| !l.is_empty());
        by_ind
            .entry(ind)
            .or_insert_with(|| {
                order.push(ind);
                Vec::new()
            })
            .push(Alternative {
                id: alt,
                utility,
                social,
                label,
            });
    }

    let individuals = order
        .into_iter()
        .map(|id| Individual {
            id,
            alternatives: by_ind.remove(&id).unwrap_or_default(),
        })
        .collect();
    Instance::new(individuals)
}

fn csv_parse_error(e: csv::Error) -> Error {
    let line = e.position().map(|p| p.line());
    Error::Parse {
        line,
        message: e.to_string(),
    }
}

pub fn write_instance_csv<W: Write>(instance: &Instance, writer: W) -> Result<()> {
    let mut wtr = csv::Writer::from_writer(writer);
    wtr.write_record(["ind_id", "alt_id", "utility", "social", "label"])?;
    for ind in instance.individuals() {
        for alt in &ind.alternatives {
            wtr.write_record([
                ind.id.0.to_string(),
                alt.id.0.to_string(),
                alt.utility.to_string(),
                alt.social.to_string(),
                alt.label.clone().unwrap_or_default(),
            ])?;
        }
    }
    wtr.flush().map_err(|e| Error::io("<csv writer>", e))
}

pub fn read_instance_json<R: Read>(reader: R) -> Result<Instance> {
    let raw: JsonInstance = serde_json::from_reader(reader).map_err(|e| Error::Parse {
        line: Some(e.line() as u64),
        message: e.to_string(),
    })?;
    Instance::with_metadata(raw.individuals, raw.metadata)
}

pub fn write_instance_json<W: Write>(instance: &Instance, writer: W) -> Result<()> {
    serde_json::to_writer(writer, instance)?;
    Ok(())
}
