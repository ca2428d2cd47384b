//! Two-column CSV measurement input for the fit subcommands.

use std::path::Path;

use sqz_core::estimate::DataSeries;

use crate::CliError;

/// Reads a two-column CSV with a mandatory header row into a validated
/// series. Column meanings depend on the fit: abscissa is a power in watts,
/// ordinate a loss fraction, a gain, or an efficiency.
pub fn read_series(path: &Path) -> Result<DataSeries, CliError> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(true)
        .trim(csv::Trim::All)
        .from_path(path)
        .map_err(|e| CliError::Input(format!("cannot read data {}: {e}", path.display())))?;

    let headers = reader
        .headers()
        .map_err(|e| CliError::Input(format!("bad header in {}: {e}", path.display())))?;
    if headers.len() != 2 {
        return Err(CliError::Input(format!(
            "data {} must have exactly two columns, header has {}",
            path.display(),
            headers.len()
        )));
    }

    let mut rows = Vec::new();
    for (i, record) in reader.records().enumerate() {
        let record = record
            .map_err(|e| CliError::Input(format!("bad row {} in {}: {e}", i + 2, path.display())))?;
        if record.len() != 2 {
            return Err(CliError::Input(format!(
                "row {} in {} has {} fields, expected 2",
                i + 2,
                path.display(),
                record.len()
            )));
        }
        let parse = |field: &str, col: &str| {
            field.parse::<f64>().map_err(|_| {
                CliError::Input(format!(
                    "row {} in {}: {col} value {field:?} is not a number",
                    i + 2,
                    path.display()
                ))
            })
        };
        rows.push((parse(&record[0], "abscissa")?, parse(&record[1], "ordinate")?));
    }
    DataSeries::new(rows).map_err(CliError::Model)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::io::Write;

    fn write_temp(content: &str) -> tempfile::NamedTempFile {
        let mut f = tempfile::NamedTempFile::new().unwrap();
        f.write_all(content.as_bytes()).unwrap();
        f.flush().unwrap();
        f
    }

    #[test]
    fn reads_two_column_csv() {
        let f = write_temp("pump_w,loss\n0.0,0.00445\n0.084,0.0101\n");
        let series = read_series(f.path()).unwrap();
        assert_eq!(series.len(), 2);
        assert_eq!(series.rows()[1], (0.084, 0.0101));
    }

    #[test]
    fn rejects_wrong_column_count() {
        let f = write_temp("a,b,c\n1,2,3\n");
        assert!(matches!(read_series(f.path()), Err(CliError::Input(_))));
    }

    #[test]
    fn rejects_non_numeric_fields() {
        let f = write_temp("p,g\n0.1,abc\n");
        let msg = read_series(f.path()).unwrap_err().to_string();
        assert!(msg.contains("row 2"), "{msg}");
    }

    #[test]
    fn rejects_unsorted_abscissae() {
        let f = write_temp("p,g\n0.2,2.0\n0.1,3.0\n");
        assert!(matches!(read_series(f.path()), Err(CliError::Model(_))));
    }
}
