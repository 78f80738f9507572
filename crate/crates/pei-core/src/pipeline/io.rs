//! CSV readers and writers for the pipeline's file interfaces.
//!
//! Numbers are written with Rust's shortest round-trip float formatting, so
//! every emitted file reloads to exactly the values that produced it.

use std::collections::{BTreeMap, BTreeSet};
use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::Path;

use chrono::NaiveDate;

use crate::error::{Error, Result};
use crate::index::{IndexSeries, TypeTag, WeightedKeyword};

fn csv_err(path: &Path, e: csv::Error) -> Error {
    Error::Validation(format!("{}: {e}", path.display()))
}

pub fn writer(path: &Path) -> Result<csv::Writer<BufWriter<File>>> {
    let file = File::create(path).map_err(|e| Error::io(path, e))?;
    Ok(csv::Writer::from_writer(BufWriter::new(file)))
}

/// Read a `date,value` series CSV, sorted check deferred to alignment.
pub fn read_series_csv(path: &Path) -> Result<Vec<(NaiveDate, f64)>> {
    let file = File::open(path).map_err(|e| Error::io(path, e))?;
    let mut reader = csv::Reader::from_reader(file);
    let headers = reader.headers().map_err(|e| csv_err(path, e))?.clone();
    if headers.len() < 2 {
        return Err(Error::Validation(format!(
            "{}: expected a 'date,value' header",
            path.display()
        )));
    }
    let mut out = Vec::new();
    for (idx, record) in reader.records().enumerate() {
        let record = record.map_err(|e| csv_err(path, e))?;
        let date: NaiveDate = record[0].parse().map_err(|e| {
            Error::Validation(format!("{}: row {}: bad date: {e}", path.display(), idx + 2))
        })?;
        let value: f64 = record[1].parse().map_err(|e| {
            Error::Validation(format!("{}: row {}: bad value: {e}", path.display(), idx + 2))
        })?;
        out.push((date, value));
    }
    Ok(out)
}

pub fn write_series_csv(path: &Path, series: &[(NaiveDate, f64)]) -> Result<()> {
    let mut w = writer(path)?;
    w.write_record(["date", "value"]).map_err(|e| csv_err(path, e))?;
    for (d, v) in series {
        w.write_record([d.to_string(), v.to_string()]).map_err(|e| csv_err(path, e))?;
    }
    w.flush().map_err(|e| Error::io(path, e))
}

/// Read a `group,region` map CSV.
pub fn read_group_map(path: &Path) -> Result<BTreeMap<String, BTreeSet<String>>> {
    let file = File::open(path).map_err(|e| Error::io(path, e))?;
    let mut reader = csv::Reader::from_reader(file);
    let mut groups: BTreeMap<String, BTreeSet<String>> = BTreeMap::new();
    for record in reader.records() {
        let record = record.map_err(|e| csv_err(path, e))?;
        if record.len() < 2 {
            return Err(Error::Validation(format!(
                "{}: expected 'group,region' rows",
                path.display()
            )));
        }
        groups
            .entry(record[0].trim().to_string())
            .or_default()
            .insert(record[1].trim().to_string());
    }
    if groups.is_empty() {
        return Err(Error::Validation(format!("{}: group map is empty", path.display())));
    }
    Ok(groups)
}

pub fn write_weights_csv(path: &Path, entries: &[WeightedKeyword]) -> Result<()> {
    let mut w = writer(path)?;
    w.write_record(["keyword", "type", "d", "w"]).map_err(|e| csv_err(path, e))?;
    for e in entries {
        w.write_record([
            e.token.clone(),
            e.type_tag.to_string(),
            e.d.to_string(),
            e.weight.to_string(),
        ])
        .map_err(|err| csv_err(path, err))?;
    }
    w.flush().map_err(|e| Error::io(path, e))
}

pub fn read_weights_csv(path: &Path) -> Result<Vec<WeightedKeyword>> {
    let file = File::open(path).map_err(|e| Error::io(path, e))?;
    let mut reader = csv::Reader::from_reader(file);
    let mut out = Vec::new();
    for record in reader.records() {
        let record = record.map_err(|e| csv_err(path, e))?;
        let tag: TypeTag = record[1].parse()?;
        let parse = |s: &str| -> Result<f64> {
            s.parse().map_err(|e| Error::Validation(format!("{}: {e}", path.display())))
        };
        out.push(WeightedKeyword {
            token: record[0].to_string(),
            type_tag: tag,
            d: parse(&record[2])?,
            weight: parse(&record[3])?,
        });
    }
    Ok(out)
}

/// Long-format index CSV: `date,region,value`, region-major then date.
pub fn write_index_long(path: &Path, series: &[IndexSeries]) -> Result<()> {
    let mut w = writer(path)?;
    w.write_record(["date", "region", "value"]).map_err(|e| csv_err(path, e))?;
    for s in series {
        for (d, v) in s.dates.iter().zip(&s.values) {
            w.write_record([d.to_string(), s.region.clone(), v.to_string()])
                .map_err(|e| csv_err(path, e))?;
        }
    }
    w.flush().map_err(|e| Error::io(path, e))
}

pub fn read_index_long(path: &Path) -> Result<Vec<IndexSeries>> {
    let file = File::open(path).map_err(|e| Error::io(path, e))?;
    let mut reader = csv::Reader::from_reader(file);
    let mut grouped: BTreeMap<String, Vec<(NaiveDate, f64)>> = BTreeMap::new();
    let mut order: Vec<String> = Vec::new();
    for record in reader.records() {
        let record = record.map_err(|e| csv_err(path, e))?;
        let date: NaiveDate = record[0]
            .parse()
            .map_err(|e| Error::Validation(format!("{}: bad date: {e}", path.display())))?;
        let region = record[1].to_string();
        let value: f64 = record[2]
            .parse()
            .map_err(|e| Error::Validation(format!("{}: bad value: {e}", path.display())))?;
        if !grouped.contains_key(&region) {
            order.push(region.clone());
        }
        grouped.entry(region).or_default().push((date, value));
    }
    Ok(order
        .into_iter()
        .map(|region| {
            let points = grouped.remove(&region).expect("present");
            let (dates, values) = points.into_iter().unzip();
            IndexSeries { region, dates, values }
        })
        .collect())
}

/// Wide-format index CSV: `date,<region...>` with regions as columns.
pub fn write_index_wide(path: &Path, series: &[IndexSeries]) -> Result<()> {
    let Some(first) = series.first() else {
        return Err(Error::Argument("no index series to write".into()));
    };
    if series.iter().any(|s| s.dates != first.dates) {
        return Err(Error::Argument("index series are not on a shared calendar".into()));
    }
    let mut w = writer(path)?;
    let mut header = vec!["date".to_string()];
    header.extend(series.iter().map(|s| s.region.clone()));
    w.write_record(&header).map_err(|e| csv_err(path, e))?;
    for (i, d) in first.dates.iter().enumerate() {
        let mut row = vec![d.to_string()];
        row.extend(series.iter().map(|s| s.values[i].to_string()));
        w.write_record(&row).map_err(|e| csv_err(path, e))?;
    }
    w.flush().map_err(|e| Error::io(path, e))
}

/// Read a wide index CSV back into per-region series (header order).
pub fn read_index_wide(path: &Path) -> Result<Vec<IndexSeries>> {
    let file = File::open(path).map_err(|e| Error::io(path, e))?;
    let mut reader = csv::Reader::from_reader(file);
    let headers = reader.headers().map_err(|e| csv_err(path, e))?.clone();
    if headers.len() < 2 {
        return Err(Error::Validation(format!(
            "{}: expected 'date,<region...>' header",
            path.display()
        )));
    }
    let regions: Vec<String> = headers.iter().skip(1).map(|s| s.to_string()).collect();
    let mut dates = Vec::new();
    let mut columns: Vec<Vec<f64>> = vec![Vec::new(); regions.len()];
    for record in reader.records() {
        let record = record.map_err(|e| csv_err(path, e))?;
        dates.push(record[0].parse().map_err(|e| {
            Error::Validation(format!("{}: bad date: {e}", path.display()))
        })?);
        for (j, col) in columns.iter_mut().enumerate() {
            col.push(record[j + 1].parse().map_err(|e| {
                Error::Validation(format!("{}: bad value: {e}", path.display()))
            })?);
        }
    }
    Ok(regions
        .into_iter()
        .zip(columns)
        .map(|(region, values)| IndexSeries { region, dates: dates.clone(), values })
        .collect())
}

/// Write rows of `(date, label, value)` under the given value-column name.
pub fn write_labeled_series_csv(
    path: &Path,
    label_column: &str,
    rows: &[(NaiveDate, String, f64)],
) -> Result<()> {
    let mut w = writer(path)?;
    w.write_record(["date", label_column, "value"]).map_err(|e| csv_err(path, e))?;
    for (d, label, v) in rows {
        w.write_record([d.to_string(), label.clone(), v.to_string()])
            .map_err(|e| csv_err(path, e))?;
    }
    w.flush().map_err(|e| Error::io(path, e))
}

/// Read back a `date,<label>,value` CSV written by
/// [`write_labeled_series_csv`].
pub fn read_labeled_series_csv(path: &Path) -> Result<Vec<(NaiveDate, String, f64)>> {
    let file = File::open(path).map_err(|e| Error::io(path, e))?;
    let mut reader = csv::Reader::from_reader(file);
    let mut out = Vec::new();
    for record in reader.records() {
        let record = record.map_err(|e| csv_err(path, e))?;
        let date: NaiveDate = record[0]
            .parse()
            .map_err(|e| Error::Validation(format!("{}: bad date: {e}", path.display())))?;
        let value: f64 = record[2]
            .parse()
            .map_err(|e| Error::Validation(format!("{}: bad value: {e}", path.display())))?;
        out.push((date, record[1].to_string(), value));
    }
    Ok(out)
}

/// Plain `(text, count)` rows, e.g. term frequencies.
pub fn write_counts_csv(path: &Path, header: [&str; 2], rows: &[(String, u64)]) -> Result<()> {
    let mut w = writer(path)?;
    w.write_record(header).map_err(|e| csv_err(path, e))?;
    for (k, v) in rows {
        w.write_record([k.clone(), v.to_string()]).map_err(|e| csv_err(path, e))?;
    }
    w.flush().map_err(|e| Error::io(path, e))
}

pub fn write_text(path: &Path, text: &str) -> Result<()> {
    let mut f = File::create(path).map_err(|e| Error::io(path, e))?;
    f.write_all(text.as_bytes()).map_err(|e| Error::io(path, e))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn day(s: &str) -> NaiveDate {
        s.parse().unwrap()
    }

    #[test]
    fn series_csv_round_trips() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("s.csv");
        let series = vec![(day("2020-01-01"), 1.25), (day("2020-01-02"), -0.125)];
        write_series_csv(&path, &series).unwrap();
        assert_eq!(read_series_csv(&path).unwrap(), series);
    }

    #[test]
    fn weights_csv_round_trips() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("w.csv");
        let entries = vec![
            WeightedKeyword { token: "loan".into(), type_tag: TypeTag::E, d: 0.37, weight: 0.25 },
            WeightedKeyword { token: "rescue".into(), type_tag: TypeTag::D, d: 1.11, weight: 0.75 },
        ];
        write_weights_csv(&path, &entries).unwrap();
        assert_eq!(read_weights_csv(&path).unwrap(), entries);
    }

    #[test]
    fn index_csvs_round_trip() {
        let dir = tempfile::tempdir().unwrap();
        let series = vec![
            IndexSeries {
                region: "Hubei".into(),
                dates: vec![day("2020-01-01"), day("2020-01-02")],
                values: vec![0.5, 1.5],
            },
            IndexSeries {
                region: "Hainan".into(),
                dates: vec![day("2020-01-01"), day("2020-01-02")],
                values: vec![0.0, 2.0],
            },
        ];
        let long = dir.path().join("long.csv");
        write_index_long(&long, &series).unwrap();
        assert_eq!(read_index_long(&long).unwrap(), series);

        let wide = dir.path().join("wide.csv");
        write_index_wide(&wide, &series).unwrap();
        assert_eq!(read_index_wide(&wide).unwrap(), series);
    }

    #[test]
    fn labeled_series_csv_round_trips() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("cov.csv");
        let rows = vec![
            (day("2020-01-02"), "Central:covid".to_string(), -0.75),
            (day("2020-01-03"), "Central:stock".to_string(), 1.5e-3),
        ];
        write_labeled_series_csv(&path, "pair", &rows).unwrap();
        assert_eq!(read_labeled_series_csv(&path).unwrap(), rows);
    }

    #[test]
    fn group_map_reads_grouped_regions() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("g.csv");
        std::fs::write(&path, "group,region\nNorth,Beijing\nNorth,Heilongjiang\nSouth,Hainan\n")
            .unwrap();
        let map = read_group_map(&path).unwrap();
        assert_eq!(map.len(), 2);
        assert!(map["North"].contains("Beijing"));
        assert!(map["South"].contains("Hainan"));
    }
}
