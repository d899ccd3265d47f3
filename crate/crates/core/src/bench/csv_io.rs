use super::BenchRecord;
use crate::error::{Error, Result};

pub const CSV_HEADER: &str =
    "algorithm,bits,multiplier,trial,seed,p,g,b,x_expected,x_found,success,elapsed_ms,candidates_tested,smooth_found,rounds";

fn csv_error(e: csv::Error) -> Error {
    Error::invalid(format!("csv: {e}"))
}

/// UTF-8 CSV with LF line endings. `x_found` is empty when the solve failed.
pub fn emit_csv(records: &[BenchRecord]) -> Result<Vec<u8>> {
    let mut w =
        csv::WriterBuilder::new().has_headers(false).terminator(csv::Terminator::Any(b'\n')).from_writer(Vec::new());
    w.write_record(CSV_HEADER.split(',')).map_err(csv_error)?;
    for r in records {
        w.serialize(r).map_err(csv_error)?;
    }
    w.into_inner().map_err(|e| Error::invalid(format!("csv: {e}")))
}

pub fn parse_csv(data: &[u8]) -> Result<Vec<BenchRecord>> {
    let mut r = csv::ReaderBuilder::new().has_headers(true).from_reader(data);
    let header = r.headers().map_err(csv_error)?;
    if header.iter().collect::<Vec<_>>().join(",") != CSV_HEADER {
        return Err(Error::invalid("unexpected csv header"));
    }
    r.deserialize().map(|row| row.map_err(csv_error)).collect()
}
