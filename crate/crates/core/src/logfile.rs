//! JSONL serialization of interaction logs.
//!
//! Format: a header line `{persona_id, seed, horizon_days, format_version}`
//! (labeled logs additionally carry the anomaly spec; runs with generator
//! fallbacks carry warnings), then one [`ResponseRecord`] per line, UTF-8,
//! keys in declaration order.

use std::io::{self, BufRead, Write};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::anomaly::AnomalySpec;
use crate::simulator::{InteractionLog, ResponseRecord};

pub const FORMAT_VERSION: u32 = 1;

#[derive(Debug, Error)]
pub enum LogFileError {
    #[error("i/o error: {0}")]
    Io(#[from] io::Error),
    #[error("line {line}: {source}")]
    Malformed {
        line: usize,
        source: serde_json::Error,
    },
    #[error("missing header line")]
    MissingHeader,
    #[error("unsupported format_version {0}")]
    UnsupportedVersion(u32),
}

#[derive(Debug, Serialize, Deserialize)]
struct LogHeader {
    persona_id: u32,
    seed: u64,
    horizon_days: u32,
    format_version: u32,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    anomaly_spec: Option<AnomalySpec>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    warnings: Vec<String>,
}

/// Writes a log as JSONL. Byte-deterministic for a given log.
pub fn write_log<W: Write>(log: &InteractionLog, mut writer: W) -> Result<(), LogFileError> {
    let header = LogHeader {
        persona_id: log.persona_id,
        seed: log.seed,
        horizon_days: log.horizon_days,
        format_version: FORMAT_VERSION,
        anomaly_spec: log.anomaly_spec.clone(),
        warnings: log.warnings.clone(),
    };
    serde_json::to_writer(&mut writer, &header).map_err(io::Error::from)?;
    writer.write_all(b"\n")?;
    for record in &log.records {
        serde_json::to_writer(&mut writer, record).map_err(io::Error::from)?;
        writer.write_all(b"\n")?;
    }
    Ok(())
}

/// Reads a JSONL log produced by [`write_log`].
pub fn read_log<R: BufRead>(reader: R) -> Result<InteractionLog, LogFileError> {
    let mut lines = reader.lines();
    let header_line = lines.next().ok_or(LogFileError::MissingHeader)??;
    let header: LogHeader = serde_json::from_str(&header_line)
        .map_err(|source| LogFileError::Malformed { line: 1, source })?;
    if header.format_version != FORMAT_VERSION {
        return Err(LogFileError::UnsupportedVersion(header.format_version));
    }
    let mut records = Vec::new();
    for (i, line) in lines.enumerate() {
        let line = line?;
        if line.is_empty() {
            continue;
        }
        let record: ResponseRecord = serde_json::from_str(&line)
            .map_err(|source| LogFileError::Malformed { line: i + 2, source })?;
        records.push(record);
    }
    Ok(InteractionLog {
        persona_id: header.persona_id,
        seed: header.seed,
        horizon_days: header.horizon_days,
        anomaly_spec: header.anomaly_spec,
        warnings: header.warnings,
        records,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::anomaly::{inject, AnomalyKind, AnomalySpec, Speed};
    use crate::persona::builtin_personas;
    use crate::simulator::run_simulation;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn round_trip_preserves_log() {
        let persona = &builtin_personas()[2];
        let log = run_simulation(persona, 30, 42);
        let mut buf = Vec::new();
        write_log(&log, &mut buf).unwrap();
        let reread = read_log(buf.as_slice()).unwrap();
        assert_eq!(log, reread);
    }

    #[test]
    fn labeled_log_header_carries_spec() {
        let persona = &builtin_personas()[0];
        let log = run_simulation(persona, 60, 42);
        let spec = AnomalySpec::new(AnomalyKind::OffTopic, Speed::Fast, 20, 7);
        let labeled = inject(&log, &spec, &mut ChaCha8Rng::seed_from_u64(1)).unwrap();
        let mut buf = Vec::new();
        write_log(&labeled, &mut buf).unwrap();
        let text = String::from_utf8(buf.clone()).unwrap();
        let header = text.lines().next().unwrap();
        assert!(header.contains("\"anomaly_spec\""), "{header}");
        assert!(header.contains("\"format_version\":1"), "{header}");
        let reread = read_log(buf.as_slice()).unwrap();
        assert_eq!(reread.anomaly_spec, Some(spec));
    }

    #[test]
    fn writes_are_byte_deterministic() {
        let persona = &builtin_personas()[5];
        let log = run_simulation(persona, 20, 7);
        let mut a = Vec::new();
        let mut b = Vec::new();
        write_log(&log, &mut a).unwrap();
        write_log(&log, &mut b).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn header_field_order_is_stable() {
        let persona = &builtin_personas()[0];
        let log = run_simulation(persona, 5, 3);
        let mut buf = Vec::new();
        write_log(&log, &mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let header = text.lines().next().unwrap();
        assert!(header.starts_with("{\"persona_id\":1,\"seed\":3,\"horizon_days\":5,\"format_version\":1"));
    }
}
