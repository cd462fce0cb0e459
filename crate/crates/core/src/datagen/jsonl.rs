//! One JSON record per line, keys in declaration order.

use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Read, Write};
use std::path::Path;

use super::{DataError, LabeledInstance};

pub fn emit_jsonl<W: Write>(instances: &[LabeledInstance], mut out: W) -> Result<(), DataError> {
    for inst in instances {
        serde_json::to_writer(&mut out, inst)?;
        out.write_all(b"\n")?;
    }
    out.flush()?;
    Ok(())
}

/// Parses records; blank lines are skipped and errors carry 1-based line numbers.
pub fn load_jsonl<R: Read>(input: R) -> Result<Vec<LabeledInstance>, DataError> {
    let mut out = Vec::new();
    for (i, line) in BufReader::new(input).lines().enumerate() {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        let inst =
            serde_json::from_str(&line).map_err(|e| DataError::Malformed { line: i + 1, message: e.to_string() })?;
        out.push(inst);
    }
    Ok(out)
}

pub fn write_jsonl(path: &Path, instances: &[LabeledInstance]) -> Result<(), DataError> {
    emit_jsonl(instances, BufWriter::new(File::create(path)?))
}

pub fn read_jsonl(path: &Path) -> Result<Vec<LabeledInstance>, DataError> {
    load_jsonl(File::open(path)?)
}
