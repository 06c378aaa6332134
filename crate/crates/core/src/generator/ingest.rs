//! Instance files.
//!
//! JSON: `{"parcels": n, "workers": [{"capacity", "time_budget"}, ...],
//! "utility": [[...]; n], "delivery_time": [[...]; n], "arrival_order": [...]}`
//! with matrices parcel-major and `arrival_order` optional.
//!
//! CSV: a directory holding `workers.csv` (header
//! `worker_id,capacity,time_budget`, one row per worker in id order),
//! and headerless `utility.csv` / `time.csv` with one row per parcel.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{Instance, Worker, WorkerId};
use crate::online::validate_order;

pub const WORKERS_CSV: &str = "workers.csv";
pub const UTILITY_CSV: &str = "utility.csv";
pub const TIME_CSV: &str = "time.csv";

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct InstanceDoc {
    parcels: usize,
    workers: Vec<Worker>,
    utility: Vec<Vec<f64>>,
    delivery_time: Vec<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    arrival_order: Option<Vec<usize>>,
}

/// Loads an instance from a JSON file or a CSV directory.
pub fn load_instance(path: impl AsRef<Path>) -> Result<Instance> {
    load_instance_with_order(path).map(|(inst, _)| inst)
}

/// Loads an instance together with its optional stored arrival order.
pub fn load_instance_with_order(
    path: impl AsRef<Path>,
) -> Result<(Instance, Option<Vec<WorkerId>>)> {
    let path = path.as_ref();
    if path.is_dir() {
        return Ok((load_csv_dir(path)?, None));
    }
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    let doc: InstanceDoc = serde_json::from_str(&text).map_err(|e| Error::Parse {
        path: path.to_path_buf(),
        line: e.line(),
        column: e.column(),
        message: e.to_string(),
    })?;
    let instance = Instance::new(doc.parcels, doc.workers, &doc.utility, &doc.delivery_time)?;
    let order = match doc.arrival_order {
        Some(ids) => {
            let order: Vec<WorkerId> = ids.into_iter().map(WorkerId).collect();
            validate_order(&instance, &order)?;
            Some(order)
        }
        None => None,
    };
    Ok((instance, order))
}

pub fn save_instance_json(
    path: impl AsRef<Path>,
    instance: &Instance,
    order: Option<&[WorkerId]>,
) -> Result<()> {
    let path = path.as_ref();
    let doc = InstanceDoc {
        parcels: instance.n_parcels(),
        workers: instance.workers().to_vec(),
        utility: instance.utility_rows(),
        delivery_time: instance.time_rows(),
        arrival_order: order.map(|o| o.iter().map(|j| j.0).collect()),
    };
    let mut text = serde_json::to_string_pretty(&doc).expect("instance serializes");
    text.push('\n');
    fs::write(path, text).map_err(|e| Error::io(path, e))
}

pub fn save_instance_csv(dir: impl AsRef<Path>, instance: &Instance) -> Result<()> {
    let dir = dir.as_ref();
    fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    let mut workers = String::from("worker_id,capacity,time_budget\n");
    for (j, w) in instance.workers().iter().enumerate() {
        workers.push_str(&format!("{j},{},{}\n", w.capacity, w.time_budget));
    }
    write_file(&dir.join(WORKERS_CSV), workers.as_bytes())?;
    write_file(
        &dir.join(UTILITY_CSV),
        matrix_csv(&instance.utility_rows()).as_bytes(),
    )?;
    write_file(
        &dir.join(TIME_CSV),
        matrix_csv(&instance.time_rows()).as_bytes(),
    )
}

fn write_file(path: &Path, bytes: &[u8]) -> Result<()> {
    let mut f = fs::File::create(path).map_err(|e| Error::io(path, e))?;
    f.write_all(bytes).map_err(|e| Error::io(path, e))
}

fn matrix_csv(rows: &[Vec<f64>]) -> String {
    let mut out = String::new();
    for row in rows {
        let cells: Vec<String> = row.iter().map(|v| v.to_string()).collect();
        out.push_str(&cells.join(","));
        out.push('\n');
    }
    out
}

fn load_csv_dir(dir: &Path) -> Result<Instance> {
    let workers_path = dir.join(WORKERS_CSV);
    let mut workers = Vec::new();
    for (row, record) in read_records(&workers_path, true)?.into_iter().enumerate() {
        let (line, fields) = record;
        if fields.len() != 3 {
            return Err(parse_error(
                &workers_path,
                line,
                1,
                format!("expected 3 fields, found {}", fields.len()),
            ));
        }
        let id: usize = parse_field(&workers_path, line, 1, &fields[0])?;
        if id != row {
            return Err(parse_error(
                &workers_path,
                line,
                1,
                format!("worker_id {id} out of order, expected {row}"),
            ));
        }
        let capacity: u32 = parse_field(&workers_path, line, 2, &fields[1])?;
        let time_budget: f64 = parse_field(&workers_path, line, 3, &fields[2])?;
        workers.push(Worker::new(capacity, time_budget));
    }
    let utility = read_matrix(&dir.join(UTILITY_CSV))?;
    let time = read_matrix(&dir.join(TIME_CSV))?;
    Instance::new(utility.len(), workers, &utility, &time)
}

type Record = (usize, Vec<String>);

fn read_records(path: &Path, has_header: bool) -> Result<Vec<Record>> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(has_header)
        .flexible(true)
        .trim(csv::Trim::All)
        .from_path(path)
        .map_err(|e| csv_error(path, e))?;
    let mut out = Vec::new();
    for record in reader.records() {
        let record = record.map_err(|e| csv_error(path, e))?;
        let line = record.position().map_or(0, |p| p.line() as usize);
        out.push((line, record.iter().map(str::to_owned).collect()));
    }
    Ok(out)
}

fn read_matrix(path: &Path) -> Result<Vec<Vec<f64>>> {
    read_records(path, false)?
        .into_iter()
        .map(|(line, fields)| {
            fields
                .iter()
                .enumerate()
                .map(|(c, f)| parse_field(path, line, c + 1, f))
                .collect()
        })
        .collect()
}

fn parse_field<T: std::str::FromStr>(
    path: &Path,
    line: usize,
    column: usize,
    text: &str,
) -> Result<T>
where
    T::Err: std::fmt::Display,
{
    text.parse()
        .map_err(|e: T::Err| parse_error(path, line, column, format!("{text:?}: {e}")))
}

fn parse_error(path: &Path, line: usize, column: usize, message: String) -> Error {
    Error::Parse {
        path: PathBuf::from(path),
        line,
        column,
        message,
    }
}

fn csv_error(path: &Path, e: csv::Error) -> Error {
    let line = e.position().map_or(0, |p| p.line() as usize);
    match e.into_kind() {
        csv::ErrorKind::Io(io) => Error::io(path, io),
        other => parse_error(path, line, 0, format!("{other:?}")),
    }
}

/// Reads an arrival order file: worker ids separated by whitespace or commas.
pub fn read_order_file(path: impl AsRef<Path>) -> Result<Vec<WorkerId>> {
    let path = path.as_ref();
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    let mut order = Vec::new();
    for (k, line) in text.lines().enumerate() {
        let tokens = line
            .split(|c: char| c == ',' || c.is_whitespace())
            .filter(|s| !s.is_empty());
        for (col, token) in tokens.enumerate() {
            order.push(WorkerId(parse_field(path, k + 1, col + 1, token)?));
        }
    }
    Ok(order)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::fixtures::worked_example;

    #[test]
    fn json_round_trip() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("t.json");
        let inst = worked_example();
        let order = [WorkerId(1), WorkerId(3), WorkerId(2), WorkerId(0)];
        save_instance_json(&path, &inst, Some(&order)).unwrap();
        let (back, got) = load_instance_with_order(&path).unwrap();
        assert_eq!(back, inst);
        assert_eq!(got.unwrap(), order);
    }

    #[test]
    fn csv_round_trip() {
        let dir = tempfile::tempdir().unwrap();
        let inst = crate::generator::gen_synthetic(&crate::generator::SyntheticConfig {
            n_parcels: 7,
            n_workers: 3,
            seed: 1,
            ..Default::default()
        })
        .unwrap();
        save_instance_csv(dir.path(), &inst).unwrap();
        assert_eq!(load_instance(dir.path()).unwrap(), inst);
    }

    #[test]
    fn json_row_count_mismatch() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("bad.json");
        fs::write(
            &path,
            r#"{"parcels": 2, "workers": [{"capacity": 1, "time_budget": 1}],
               "utility": [[1]], "delivery_time": [[1], [1]]}"#,
        )
        .unwrap();
        assert!(matches!(
            load_instance(&path),
            Err(Error::Dimension {
                matrix: "utility",
                axis: "rows",
                expected: 2,
                found: 1
            })
        ));
    }

    #[test]
    fn json_errors_are_located() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("bad.json");
        fs::write(&path, "{\n  \"parcels\": 1,\n  \"workers\": [oops]\n}").unwrap();
        match load_instance(&path) {
            Err(Error::Parse { line, .. }) => assert_eq!(line, 3),
            other => panic!("{other:?}"),
        }
        fs::write(
            &path,
            r#"{"parcels": 1, "workers": [{"capacity": 1, "time_budget": 1}],
               "utility": [[-2]], "delivery_time": [[1]]}"#,
        )
        .unwrap();
        assert!(matches!(
            load_instance(&path),
            Err(Error::InvalidEntry {
                matrix: "utility",
                row: 0,
                col: 0,
                ..
            })
        ));
        fs::write(
            &path,
            r#"{"parcels": 1, "workers": [{"capacity": 1, "time_budget": 1}],
               "utility": [[1, 2]], "delivery_time": [[1]]}"#,
        )
        .unwrap();
        assert!(matches!(
            load_instance(&path),
            Err(Error::RowLength {
                matrix: "utility",
                row: 0,
                expected: 1,
                found: 2
            })
        ));
    }

    #[test]
    fn json_bad_order() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("bad.json");
        fs::write(
            &path,
            r#"{"parcels": 0, "workers": [{"capacity": 1, "time_budget": 1}],
               "utility": [], "delivery_time": [], "arrival_order": [0, 0]}"#,
        )
        .unwrap();
        assert!(matches!(load_instance(&path), Err(Error::InvalidOrder(_))));
    }

    #[test]
    fn csv_errors_are_located() {
        let dir = tempfile::tempdir().unwrap();
        save_instance_csv(dir.path(), &worked_example()).unwrap();
        let mut text = fs::read_to_string(dir.path().join(TIME_CSV)).unwrap();
        text = text.replacen(
            "1,1,1,1\n1,1,1,1\n1,1,1,1\n",
            "1,1,1,1\n1,1,1,1\n1,x,1,1\n",
            1,
        );
        fs::write(dir.path().join(TIME_CSV), text).unwrap();
        match load_instance(dir.path()) {
            Err(Error::Parse { line, column, .. }) => assert_eq!((line, column), (3, 2)),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn order_file() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("order.txt");
        fs::write(&path, "1\n3\n\n2\n0\n").unwrap();
        assert_eq!(
            read_order_file(&path).unwrap(),
            vec![WorkerId(1), WorkerId(3), WorkerId(2), WorkerId(0)]
        );
    }
}
