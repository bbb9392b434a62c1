//! Dataset files: a `p,n` header line followed by `n` lines holding the upper
//! triangle (row-major, diagonal included) of one SPD matrix each.

use crate::error::{CliError, CliResult};
use scarot_core::SpdMatrix;
use std::io::{Read, Write};
use std::path::Path;

fn parse_err(line: usize, msg: impl std::fmt::Display) -> CliError {
    CliError::Parse(format!("line {line}: {msg}"))
}

pub fn read_from(reader: impl Read) -> CliResult<Vec<SpdMatrix>> {
    let mut rdr = csv::ReaderBuilder::new()
        .has_headers(false)
        .flexible(true)
        .trim(csv::Trim::All)
        .from_reader(reader);
    let mut records = rdr.records();
    let header = records
        .next()
        .ok_or_else(|| parse_err(1, "missing header"))?
        .map_err(|e| parse_err(1, e))?;
    if header.len() != 2 {
        return Err(parse_err(1, "header must be `p,n`"));
    }
    let field = |i: usize| -> CliResult<usize> { header[i].parse().map_err(|e| parse_err(1, format!("{e}: {:?}", &header[i]))) };
    let (p, n) = (field(0)?, field(1)?);
    if p == 0 {
        return Err(parse_err(1, "p must be positive"));
    }
    let width = p * (p + 1) / 2;
    let mut out = Vec::with_capacity(n);
    for (i, rec) in records.enumerate() {
        let line = i + 2;
        let rec = rec.map_err(|e| parse_err(line, e))?;
        if rec.len() != width {
            return Err(parse_err(line, format!("expected {width} values, found {}", rec.len())));
        }
        let values = rec
            .iter()
            .map(|s| s.parse::<f64>().map_err(|e| parse_err(line, format!("{e}: {s:?}"))))
            .collect::<CliResult<Vec<_>>>()?;
        out.push(SpdMatrix::from_upper(p, &values).map_err(|e| parse_err(line, e))?);
    }
    if out.len() != n {
        return Err(parse_err(1, format!("header announces {n} rows, found {}", out.len())));
    }
    Ok(out)
}

pub fn read(path: &Path) -> CliResult<Vec<SpdMatrix>> {
    let file = std::fs::File::open(path).map_err(|e| CliError::Parse(format!("{}: {e}", path.display())))?;
    read_from(file)
}

/// Values are written with 17 significant digits, which round-trips every
/// `f64` exactly.
pub fn write_to(writer: impl Write, xs: &[SpdMatrix]) -> CliResult<()> {
    let p = xs.first().map_or(0, SpdMatrix::dim);
    let mut w = csv::WriterBuilder::new().flexible(true).from_writer(writer);
    w.write_record([p.to_string(), xs.len().to_string()]).map_err(std::io::Error::from)?;
    for x in xs {
        w.write_record(x.upper().iter().map(|v| format!("{v:.16e}"))).map_err(std::io::Error::from)?;
    }
    w.flush()?;
    Ok(())
}

pub fn write(path: &Path, xs: &[SpdMatrix]) -> CliResult<()> {
    write_to(std::io::BufWriter::new(std::fs::File::create(path)?), xs)
}
