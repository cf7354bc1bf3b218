//! File formats: flat key-value structured text for configs and manifests,
//! a dataset container with a text header and a little-endian binary body,
//! and tabular chart coordinates.
//!
//! Every writer is normalizing: fixed key order, shortest round-trip float
//! text, no timestamps. Write -> read -> write is byte-identical, which is
//! what makes reproduction checks a plain byte comparison.

use std::fs;
use std::io::{Read, Write};
use std::path::Path;

use num_complex::Complex64;
use thiserror::Error;

use crate::channel::{ArrayGeometry, ChannelVector, ConfigError, PolarPosition, SystemConfig};

pub const CONFIG_FORMAT: &str = "cchart-config-1";
pub const MANIFEST_FORMAT: &str = "cchart-manifest-1";
pub const DATASET_MAGIC: &str = "cchart-dataset-1";

#[derive(Debug, Error)]
pub enum IoError {
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error("line {0}: expected `key = value`")]
    BadLine(usize),
    #[error("missing key `{0}`")]
    MissingKey(String),
    #[error("key `{key}`: cannot parse `{value}`")]
    BadValue { key: String, value: String },
    #[error("unsupported format `{found}`, expected `{expected}`")]
    BadFormat { expected: &'static str, found: String },
    #[error("dataset header truncated before the data marker")]
    MissingDataMarker,
    #[error("dataset body ends mid-record ({got} of {want} bytes)")]
    TruncatedBody { want: usize, got: usize },
    #[error("dataset declares {declared} records but the body holds {found}")]
    RecordCountMismatch { declared: usize, found: usize },
    #[error("records must either all carry ground truth or none")]
    MixedGroundTruth,
    #[error("chart file line {0}: expected `index<TAB>x<TAB>y`")]
    BadChartLine(usize),
    #[error(transparent)]
    Config(#[from] ConfigError),
}

/// Shortest decimal text that parses back to exactly the same f64. This is
/// what Rust's default float Display produces; the alias exists so call
/// sites state the intent.
pub fn format_f64(x: f64) -> String {
    format!("{x}")
}

// ---------------------------------------------------------------------------
// Flat key-value files
// ---------------------------------------------------------------------------

/// An ordered list of `key = value` pairs. Order is preserved on parse and
/// respected on write, so a file that goes through a read/write cycle comes
/// back byte-identical (comments and blank lines excepted).
#[derive(Debug, Clone, Default, PartialEq)]
pub struct KvFile {
    entries: Vec<(String, String)>,
}

impl KvFile {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn set(&mut self, key: &str, value: impl Into<String>) {
        let value = value.into();
        if let Some(slot) = self.entries.iter_mut().find(|(k, _)| k == key) {
            slot.1 = value;
        } else {
            self.entries.push((key.to_string(), value));
        }
    }

    pub fn set_f64(&mut self, key: &str, value: f64) {
        self.set(key, format_f64(value));
    }

    pub fn get(&self, key: &str) -> Option<&str> {
        self.entries.iter().find(|(k, _)| k == key).map(|(_, v)| v.as_str())
    }

    pub fn require(&self, key: &str) -> Result<&str, IoError> {
        self.get(key).ok_or_else(|| IoError::MissingKey(key.to_string()))
    }

    pub fn require_f64(&self, key: &str) -> Result<f64, IoError> {
        let raw = self.require(key)?;
        raw.parse().map_err(|_| IoError::BadValue { key: key.to_string(), value: raw.to_string() })
    }

    pub fn require_usize(&self, key: &str) -> Result<usize, IoError> {
        let raw = self.require(key)?;
        raw.parse().map_err(|_| IoError::BadValue { key: key.to_string(), value: raw.to_string() })
    }

    pub fn entries(&self) -> &[(String, String)] {
        &self.entries
    }

    pub fn render(&self) -> String {
        let mut out = String::new();
        for (k, v) in &self.entries {
            out.push_str(k);
            out.push_str(" = ");
            out.push_str(v);
            out.push('\n');
        }
        out
    }

    pub fn parse(text: &str) -> Result<Self, IoError> {
        let mut entries = Vec::new();
        for (no, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let (k, v) = line.split_once('=').ok_or(IoError::BadLine(no + 1))?;
            let k = k.trim();
            if k.is_empty() {
                return Err(IoError::BadLine(no + 1));
            }
            entries.push((k.to_string(), v.trim().to_string()));
        }
        Ok(Self { entries })
    }

    pub fn write_file(&self, path: &Path) -> Result<(), IoError> {
        fs::write(path, self.render())?;
        Ok(())
    }

    pub fn read_file(path: &Path) -> Result<Self, IoError> {
        Self::parse(&fs::read_to_string(path)?)
    }
}

// ---------------------------------------------------------------------------
// System config <-> key-value
// ---------------------------------------------------------------------------

fn push_config_keys(kv: &mut KvFile, config: &SystemConfig) {
    kv.set_f64("fc", config.fc);
    kv.set_f64("delta_f", config.delta_f);
    kv.set("ns", config.ns.to_string());
    match &config.array {
        ArrayGeometry::Ula { na, spacing } => {
            kv.set("array", "ula");
            kv.set("na", na.to_string());
            kv.set_f64("spacing", *spacing);
        }
        ArrayGeometry::Uca { na, radius } => {
            kv.set("array", "uca");
            kv.set("na", na.to_string());
            kv.set_f64("radius", *radius);
        }
        ArrayGeometry::Arbitrary { elements } => {
            kv.set("array", "arbitrary");
            kv.set("na", elements.len().to_string());
            let flat: Vec<String> =
                elements.iter().flat_map(|e| [format_f64(e[0]), format_f64(e[1])]).collect();
            kv.set("elements", flat.join(" "));
        }
    }
}

/// Config file body for a system configuration.
pub fn config_to_kv(config: &SystemConfig) -> KvFile {
    let mut kv = KvFile::new();
    kv.set("format", CONFIG_FORMAT);
    push_config_keys(&mut kv, config);
    kv
}

/// Parse a system configuration from key-value entries. Works on both
/// config files and dataset headers (any `format` key is ignored here; the
/// callers police it).
pub fn config_from_kv(kv: &KvFile) -> Result<SystemConfig, IoError> {
    let fc = kv.require_f64("fc")?;
    let delta_f = kv.require_f64("delta_f")?;
    let ns = kv.require_usize("ns")?;
    let na = kv.require_usize("na")?;
    let array = match kv.require("array")? {
        "ula" => ArrayGeometry::Ula { na, spacing: kv.require_f64("spacing")? },
        "uca" => ArrayGeometry::Uca { na, radius: kv.require_f64("radius")? },
        "arbitrary" => {
            let raw = kv.require("elements")?;
            let nums: Result<Vec<f64>, _> = raw.split_whitespace().map(str::parse).collect();
            let nums = nums.map_err(|_| IoError::BadValue {
                key: "elements".to_string(),
                value: raw.to_string(),
            })?;
            if nums.len() != 2 * na {
                return Err(IoError::BadValue {
                    key: "elements".to_string(),
                    value: format!("{} values for na = {na}", nums.len()),
                });
            }
            let elements = nums.chunks_exact(2).map(|c| [c[0], c[1]]).collect();
            ArrayGeometry::Arbitrary { elements }
        }
        other => {
            return Err(IoError::BadValue { key: "array".to_string(), value: other.to_string() })
        }
    };
    Ok(SystemConfig::new(fc, delta_f, ns, array)?)
}

pub fn write_config(path: &Path, config: &SystemConfig) -> Result<(), IoError> {
    config_to_kv(config).write_file(path)
}

pub fn read_config(path: &Path) -> Result<SystemConfig, IoError> {
    let kv = KvFile::read_file(path)?;
    match kv.require("format")? {
        CONFIG_FORMAT => {}
        other => {
            return Err(IoError::BadFormat { expected: CONFIG_FORMAT, found: other.to_string() })
        }
    }
    config_from_kv(&kv)
}

// ---------------------------------------------------------------------------
// Dataset container
// ---------------------------------------------------------------------------

/// A batch of channel vectors plus the configuration that produced (or
/// should interpret) them.
#[derive(Debug, Clone)]
pub struct Dataset {
    pub config: SystemConfig,
    pub channels: Vec<ChannelVector>,
}

impl Dataset {
    pub fn has_ground_truth(&self) -> bool {
        !self.channels.is_empty() && self.channels.iter().all(|c| c.position.is_some())
    }
}

/// Write a dataset: text header, a `data:` marker line, then little-endian
/// f64 records. Each record is the optional ground truth (r, theta)
/// followed by the channel entries as interleaved real/imag pairs.
pub fn write_dataset(
    path: &Path,
    config: &SystemConfig,
    channels: &[ChannelVector],
) -> Result<(), IoError> {
    let tagged = channels.iter().filter(|c| c.position.is_some()).count();
    let ground_truth = match tagged {
        0 => false,
        t if t == channels.len() => true,
        _ => return Err(IoError::MixedGroundTruth),
    };

    let mut header = KvFile::new();
    header.set("n", channels.len().to_string());
    push_config_keys(&mut header, config);
    header.set("ground_truth", if ground_truth { "true" } else { "false" });

    let dim = config.dim();
    let mut body =
        Vec::with_capacity(channels.len() * (2 * dim + if ground_truth { 2 } else { 0 }) * 8);
    for ch in channels {
        debug_assert_eq!(ch.entries.len(), dim, "channel length must match the config");
        if let Some(pos) = ch.position {
            body.extend_from_slice(&pos.r.to_le_bytes());
            body.extend_from_slice(&pos.theta.to_le_bytes());
        }
        for z in &ch.entries {
            body.extend_from_slice(&z.re.to_le_bytes());
            body.extend_from_slice(&z.im.to_le_bytes());
        }
    }

    let mut file = fs::File::create(path)?;
    file.write_all(DATASET_MAGIC.as_bytes())?;
    file.write_all(b"\n")?;
    file.write_all(header.render().as_bytes())?;
    file.write_all(b"data:\n")?;
    file.write_all(&body)?;
    Ok(())
}

pub fn read_dataset(path: &Path) -> Result<Dataset, IoError> {
    let mut raw = Vec::new();
    fs::File::open(path)?.read_to_end(&mut raw)?;

    // Split the text header from the binary body at the marker line.
    let marker: &[u8] = b"\ndata:\n";
    let split = raw
        .windows(marker.len())
        .position(|w| w == marker)
        .ok_or(IoError::MissingDataMarker)?;
    let header_text = std::str::from_utf8(&raw[..split])
        .map_err(|_| IoError::MissingDataMarker)?
        .to_string();
    let body = &raw[split + marker.len()..];

    let mut lines = header_text.lines();
    let magic = lines.next().unwrap_or("");
    if magic != DATASET_MAGIC {
        return Err(IoError::BadFormat { expected: DATASET_MAGIC, found: magic.to_string() });
    }
    let kv = KvFile::parse(&lines.collect::<Vec<_>>().join("\n"))?;
    let n = kv.require_usize("n")?;
    let config = config_from_kv(&kv)?;
    let ground_truth = match kv.require("ground_truth")? {
        "true" => true,
        "false" => false,
        other => {
            return Err(IoError::BadValue {
                key: "ground_truth".to_string(),
                value: other.to_string(),
            })
        }
    };

    let dim = config.dim();
    let record_len = (2 * dim + if ground_truth { 2 } else { 0 }) * 8;
    if record_len > 0 && body.len() % record_len != 0 {
        return Err(IoError::TruncatedBody {
            want: record_len,
            got: body.len() % record_len,
        });
    }
    let found = if record_len == 0 { 0 } else { body.len() / record_len };
    if found != n {
        return Err(IoError::RecordCountMismatch { declared: n, found });
    }

    let mut channels = Vec::with_capacity(n);
    let mut cursor = body;
    let mut take = || -> f64 {
        let (head, rest) = cursor.split_at(8);
        cursor = rest;
        f64::from_le_bytes(head.try_into().expect("8-byte chunk"))
    };
    for _ in 0..n {
        let position = if ground_truth {
            let r = take();
            let theta = take();
            Some(PolarPosition { r, theta })
        } else {
            None
        };
        let mut entries = Vec::with_capacity(dim);
        for _ in 0..dim {
            let re = take();
            let im = take();
            entries.push(Complex64::new(re, im));
        }
        channels.push(ChannelVector { entries, position });
    }
    Ok(Dataset { config, channels })
}

// ---------------------------------------------------------------------------
// Chart coordinates
// ---------------------------------------------------------------------------

/// Tab-separated chart rows: original channel index, x, y. One comment line
/// names the columns.
pub fn write_chart_tsv(
    path: &Path,
    indices: &[usize],
    points: &[[f64; 2]],
) -> Result<(), IoError> {
    assert_eq!(indices.len(), points.len(), "one index per chart point");
    let mut out = String::from("# index\tx\ty\n");
    for (idx, p) in indices.iter().zip(points) {
        out.push_str(&format!("{idx}\t{}\t{}\n", format_f64(p[0]), format_f64(p[1])));
    }
    fs::write(path, out)?;
    Ok(())
}

pub fn read_chart_tsv(path: &Path) -> Result<(Vec<usize>, Vec<[f64; 2]>), IoError> {
    let text = fs::read_to_string(path)?;
    let mut indices = Vec::new();
    let mut points = Vec::new();
    for (no, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let cols: Vec<&str> = line.split('\t').collect();
        if cols.len() != 3 {
            return Err(IoError::BadChartLine(no + 1));
        }
        let idx: usize = cols[0].parse().map_err(|_| IoError::BadChartLine(no + 1))?;
        let x: f64 = cols[1].parse().map_err(|_| IoError::BadChartLine(no + 1))?;
        let y: f64 = cols[2].parse().map_err(|_| IoError::BadChartLine(no + 1))?;
        indices.push(idx);
        points.push([x, y]);
    }
    Ok((indices, points))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::channel::{sample_ues, synth_channel, RegionSpec};
    use tempfile::tempdir;

    fn tiny_config() -> SystemConfig {
        SystemConfig::new(3e9, 625e3, 4, ArrayGeometry::Uca { na: 8, radius: 0.42 }).unwrap()
    }

    #[test]
    fn kv_round_trips_and_rejects_garbage() {
        let text = "# comment\nfc = 3000000000\n\nname = base scenario\n";
        let kv = KvFile::parse(text).unwrap();
        assert_eq!(kv.get("fc"), Some("3000000000"));
        assert_eq!(kv.get("name"), Some("base scenario"));
        assert_eq!(kv.get("missing"), None);
        // Render normalizes; a second parse/render cycle is a fixed point.
        let rendered = kv.render();
        let again = KvFile::parse(&rendered).unwrap();
        assert_eq!(again.render(), rendered);

        assert!(matches!(KvFile::parse("novalue\n"), Err(IoError::BadLine(1))));
        assert!(matches!(KvFile::parse("ok = 1\n = empty\n"), Err(IoError::BadLine(2))));
        assert!(matches!(
            KvFile::parse("x = abc").unwrap().require_f64("x"),
            Err(IoError::BadValue { .. })
        ));
        assert!(matches!(
            KvFile::parse("").unwrap().require("absent"),
            Err(IoError::MissingKey(_))
        ));
    }

    #[test]
    fn float_text_is_bit_exact() {
        let gnarly = [
            0.1,
            1.0 / 3.0,
            299792458.0,
            4.238032261790852,
            1e-300,
            -0.0,
            f64::MAX,
            5.0_f64.sqrt() * 1e17,
        ];
        for &x in &gnarly {
            let back: f64 = format_f64(x).parse().unwrap();
            assert_eq!(back.to_bits(), x.to_bits(), "{x} round-trips");
        }
    }

    #[test]
    fn config_files_round_trip() {
        let dir = tempdir().unwrap();
        let configs = [
            tiny_config(),
            SystemConfig::new(3e9, 625e3, 16, ArrayGeometry::Ula { na: 16, spacing: 0.5 })
                .unwrap(),
            SystemConfig::new(
                2.4e9,
                1e6,
                2,
                ArrayGeometry::Arbitrary { elements: vec![[0.0, 0.05], [0.0, -0.05]] },
            )
            .unwrap(),
        ];
        for (i, config) in configs.iter().enumerate() {
            let path = dir.path().join(format!("c{i}.kv"));
            write_config(&path, config).unwrap();
            let back = read_config(&path).unwrap();
            assert_eq!(back.fc, config.fc);
            assert_eq!(back.delta_f, config.delta_f);
            assert_eq!(back.ns, config.ns);
            assert_eq!(back.array, config.array);
            // Second write is byte-identical.
            let first = fs::read(&path).unwrap();
            write_config(&path, &back).unwrap();
            assert_eq!(fs::read(&path).unwrap(), first);
        }

        let bad = dir.path().join("bad.kv");
        fs::write(&bad, "format = something-else\n").unwrap();
        assert!(matches!(read_config(&bad), Err(IoError::BadFormat { .. })));
    }

    #[test]
    fn datasets_round_trip_bit_exactly() {
        let dir = tempdir().unwrap();
        let config = tiny_config();
        let region = RegionSpec::new(100.0, 300.0, -1.0, 1.0).unwrap();
        let channels: Vec<_> =
            sample_ues(&region, 7, 3).iter().map(|p| synth_channel(&config, p)).collect();

        let path = dir.path().join("d.ccd");
        write_dataset(&path, &config, &channels).unwrap();
        let ds = read_dataset(&path).unwrap();
        assert_eq!(ds.config, config);
        assert!(ds.has_ground_truth());
        assert_eq!(ds.channels.len(), 7);
        for (a, b) in ds.channels.iter().zip(&channels) {
            let pa = a.position.unwrap();
            let pb = b.position.unwrap();
            assert_eq!(pa.r.to_bits(), pb.r.to_bits());
            assert_eq!(pa.theta.to_bits(), pb.theta.to_bits());
            for (za, zb) in a.entries.iter().zip(&b.entries) {
                assert_eq!(za.re.to_bits(), zb.re.to_bits());
                assert_eq!(za.im.to_bits(), zb.im.to_bits());
            }
        }
        // write(read(write(x))) == write(x), byte for byte.
        let first = fs::read(&path).unwrap();
        write_dataset(&path, &ds.config, &ds.channels).unwrap();
        assert_eq!(fs::read(&path).unwrap(), first);
    }

    #[test]
    fn datasets_handle_untagged_empty_and_mixed() {
        let dir = tempdir().unwrap();
        let config = tiny_config();
        let region = RegionSpec::new(100.0, 300.0, -1.0, 1.0).unwrap();
        let mut channels: Vec<_> =
            sample_ues(&region, 3, 4).iter().map(|p| synth_channel(&config, p)).collect();

        // All-untagged is valid and reads back untagged.
        let stripped: Vec<_> = channels
            .iter()
            .map(|c| ChannelVector { entries: c.entries.clone(), position: None })
            .collect();
        let path = dir.path().join("untagged.ccd");
        write_dataset(&path, &config, &stripped).unwrap();
        let ds = read_dataset(&path).unwrap();
        assert!(!ds.has_ground_truth());
        assert!(ds.channels.iter().all(|c| c.position.is_none()));

        // Empty dataset is valid.
        let empty = dir.path().join("empty.ccd");
        write_dataset(&empty, &config, &[]).unwrap();
        let ds = read_dataset(&empty).unwrap();
        assert!(ds.channels.is_empty());
        assert_eq!(ds.config, config);

        // Mixed tagging is refused at write time.
        channels[1].position = None;
        let mixed = dir.path().join("mixed.ccd");
        assert!(matches!(
            write_dataset(&mixed, &config, &channels),
            Err(IoError::MixedGroundTruth)
        ));
    }

    #[test]
    fn dataset_reader_rejects_corruption() {
        let dir = tempdir().unwrap();
        let config = tiny_config();
        let region = RegionSpec::new(100.0, 300.0, -1.0, 1.0).unwrap();
        let channels: Vec<_> =
            sample_ues(&region, 2, 8).iter().map(|p| synth_channel(&config, p)).collect();
        let path = dir.path().join("d.ccd");
        write_dataset(&path, &config, &channels).unwrap();
        let good = fs::read(&path).unwrap();

        // Chopped mid-record.
        fs::write(&path, &good[..good.len() - 5]).unwrap();
        assert!(matches!(read_dataset(&path), Err(IoError::TruncatedBody { .. })));

        // Whole record missing: count mismatch.
        let record = (2 + 2 * config.dim()) * 8;
        fs::write(&path, &good[..good.len() - record]).unwrap();
        assert!(matches!(
            read_dataset(&path),
            Err(IoError::RecordCountMismatch { declared: 2, found: 1 })
        ));

        // Wrong magic.
        let mut bad = good.clone();
        bad[0] = b'x';
        fs::write(&path, &bad).unwrap();
        assert!(matches!(read_dataset(&path), Err(IoError::BadFormat { .. })));

        // No marker at all.
        fs::write(&path, b"cchart-dataset-1\nn = 0\n").unwrap();
        assert!(matches!(read_dataset(&path), Err(IoError::MissingDataMarker)));
    }

    #[test]
    fn chart_tsv_round_trips() {
        let dir = tempdir().unwrap();
        let path = dir.path().join("chart.tsv");
        let indices = vec![0usize, 2, 5];
        let points = vec![[0.1, -3.7e-11], [1.0 / 3.0, 2.0], [-0.0, 5.0_f64.sqrt()]];
        write_chart_tsv(&path, &indices, &points).unwrap();
        let (ri, rp) = read_chart_tsv(&path).unwrap();
        assert_eq!(ri, indices);
        for (a, b) in rp.iter().zip(&points) {
            assert_eq!(a[0].to_bits(), b[0].to_bits());
            assert_eq!(a[1].to_bits(), b[1].to_bits());
        }

        fs::write(&path, "0\t1.0\n").unwrap();
        assert!(matches!(read_chart_tsv(&path), Err(IoError::BadChartLine(1))));
        fs::write(&path, "a\t1.0\t2.0\n").unwrap();
        assert!(matches!(read_chart_tsv(&path), Err(IoError::BadChartLine(1))));
    }
}
