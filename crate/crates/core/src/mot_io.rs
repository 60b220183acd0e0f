//! MOT Challenge 2D text format.
//!
//! Each line is `frame,id,bb_left,bb_top,bb_width,bb_height,conf[,x,y,z...]`.
//! Detection files use `id = -1`. Columns after `conf` are ignored.

use crate::geometry::BBox;
use crate::tracker::TrackOutput;
use std::collections::BTreeMap;
use std::fs;
use std::io::{self, BufRead, Write};
use std::path::{Path, PathBuf};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum MotIoError {
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error("{path}: {source}")]
    File {
        path: PathBuf,
        #[source]
        source: io::Error,
    },
    #[error(transparent)]
    Io(#[from] io::Error),
    #[error("frames out of order: frame {frame} after frame {previous}")]
    OutOfOrder { previous: u64, frame: u64 },
    #[error("duplicate identity {id} in frame {frame}")]
    DuplicateIdentity { frame: u64, id: u64 },
}

/// One parsed line.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MotRecord {
    pub frame: u64,
    /// `-1` means "no identity".
    pub id: i64,
    pub bbox: BBox,
    pub conf: f64,
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct MotFile {
    pub records: Vec<MotRecord>,
    /// Lines dropped for negative width or height.
    pub rejected: usize,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Detection {
    pub frame: u64,
    pub bbox: BBox,
    pub confidence: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GtEntry {
    pub frame: u64,
    pub id: u64,
    pub bbox: BBox,
}

impl MotFile {
    pub fn detections(&self) -> Vec<Detection> {
        self.records
            .iter()
            .map(|r| Detection {
                frame: r.frame,
                bbox: r.bbox,
                confidence: r.conf,
            })
            .collect()
    }

    /// Ground-truth view. Records without a positive identity are skipped;
    /// duplicate `(frame, id)` pairs are an error.
    pub fn gt_entries(&self) -> Result<Vec<GtEntry>, MotIoError> {
        let mut seen = std::collections::HashSet::new();
        let mut out = Vec::with_capacity(self.records.len());
        for r in &self.records {
            if r.id <= 0 {
                continue;
            }
            let id = r.id as u64;
            if !seen.insert((r.frame, id)) {
                return Err(MotIoError::DuplicateIdentity { frame: r.frame, id });
            }
            out.push(GtEntry {
                frame: r.frame,
                id,
                bbox: r.bbox,
            });
        }
        Ok(out)
    }

    /// Tracker-result view: every record with a positive identity.
    pub fn track_outputs(&self) -> Vec<TrackOutput> {
        self.records
            .iter()
            .filter(|r| r.id > 0)
            .map(|r| TrackOutput {
                frame: r.frame,
                id: r.id as u64,
                bbox: r.bbox,
            })
            .collect()
    }

    pub fn max_frame(&self) -> u64 {
        self.records.iter().map(|r| r.frame).max().unwrap_or(0)
    }
}

fn parse_int(field: &str, line: usize, name: &str) -> Result<i64, MotIoError> {
    let value: f64 = field.parse().map_err(|_| MotIoError::Parse {
        line,
        message: format!("{name} is not numeric: {field:?}"),
    })?;
    if !value.is_finite() || value.fract() != 0.0 || value.abs() > 9.0e15 {
        return Err(MotIoError::Parse {
            line,
            message: format!("{name} is not an integer: {field:?}"),
        });
    }
    Ok(value as i64)
}

fn parse_real(field: &str, line: usize, name: &str) -> Result<f64, MotIoError> {
    match field.parse::<f64>() {
        Ok(v) if v.is_finite() => Ok(v),
        _ => Err(MotIoError::Parse {
            line,
            message: format!("{name} is not a finite number: {field:?}"),
        }),
    }
}

pub fn parse_mot_file<R: BufRead>(reader: R) -> Result<MotFile, MotIoError> {
    let mut out = MotFile::default();
    for (idx, line) in reader.lines().enumerate() {
        let lineno = idx + 1;
        let line = line?;
        let trimmed = line.trim();
        if trimmed.is_empty() {
            continue;
        }
        let fields: Vec<&str> = trimmed.split(',').map(str::trim).collect();
        if fields.len() < 7 {
            return Err(MotIoError::Parse {
                line: lineno,
                message: format!("expected at least 7 comma-separated fields, found {}", fields.len()),
            });
        }
        let frame = parse_int(fields[0], lineno, "frame")?;
        if frame < 1 {
            return Err(MotIoError::Parse {
                line: lineno,
                message: format!("frame must be >= 1, found {frame}"),
            });
        }
        let id = parse_int(fields[1], lineno, "id")?;
        let left = parse_real(fields[2], lineno, "bb_left")?;
        let top = parse_real(fields[3], lineno, "bb_top")?;
        let width = parse_real(fields[4], lineno, "bb_width")?;
        let height = parse_real(fields[5], lineno, "bb_height")?;
        let conf = parse_real(fields[6], lineno, "conf")?;
        if width < 0.0 || height < 0.0 {
            out.rejected += 1;
            continue;
        }
        let bbox = BBox::from_ltwh(left, top, width, height).map_err(|e| MotIoError::Parse {
            line: lineno,
            message: e.to_string(),
        })?;
        out.records.push(MotRecord {
            frame: frame as u64,
            id,
            bbox,
            conf,
        });
    }
    Ok(out)
}

pub fn read_mot_file(path: &Path) -> Result<MotFile, MotIoError> {
    let file = fs::File::open(path).map_err(|source| MotIoError::File {
        path: path.to_path_buf(),
        source,
    })?;
    parse_mot_file(io::BufReader::new(file))
}

/// Writes `frame,id,left,top,width,height,1,-1,-1,-1` per record, two decimals.
pub fn write_results<W: Write>(outputs: &[TrackOutput], mut out: W) -> io::Result<()> {
    for o in outputs {
        let [l, t, w, h] = o.bbox.to_ltwh();
        writeln!(
            out,
            "{},{},{:.2},{:.2},{:.2},{:.2},1,-1,-1,-1",
            o.frame, o.id, l, t, w, h
        )?;
    }
    out.flush()
}

/// Detection lines: `frame,-1,left,top,width,height,conf,-1,-1,-1`.
pub fn write_detections<W: Write>(dets: &[Detection], mut out: W) -> io::Result<()> {
    for d in dets {
        let [l, t, w, h] = d.bbox.to_ltwh();
        writeln!(
            out,
            "{},-1,{:.2},{:.2},{:.2},{:.2},{:.4},-1,-1,-1",
            d.frame, l, t, w, h, d.confidence
        )?;
    }
    out.flush()
}

pub fn write_gt<W: Write>(gt: &[GtEntry], mut out: W) -> io::Result<()> {
    for g in gt {
        let [l, t, w, h] = g.bbox.to_ltwh();
        writeln!(
            out,
            "{},{},{:.2},{:.2},{:.2},{:.2},1,-1,-1,-1",
            g.frame, g.id, l, t, w, h
        )?;
    }
    out.flush()
}

/// Keeps detections with confidence strictly above `threshold`, in order.
pub fn filter_confidence(dets: Vec<Detection>, threshold: f64) -> Vec<Detection> {
    dets.into_iter().filter(|d| d.confidence > threshold).collect()
}

/// Groups detections into frames `1..=frame_count`, preserving file order
/// within each frame. Frames without detections get an empty list. The
/// input must be sorted by frame.
pub fn group_by_frame(dets: &[Detection], frame_count: u64) -> Result<Vec<Vec<BBox>>, MotIoError> {
    if let Some(w) = dets.windows(2).find(|w| w[1].frame < w[0].frame) {
        return Err(MotIoError::OutOfOrder {
            previous: w[0].frame,
            frame: w[1].frame,
        });
    }
    let last = dets.last().map(|d| d.frame).unwrap_or(0).max(frame_count);
    let mut frames: Vec<Vec<BBox>> = vec![Vec::new(); last as usize];
    for d in dets {
        frames[(d.frame - 1) as usize].push(d.bbox);
    }
    Ok(frames)
}

/// One sequence in the benchmark layout `<seq>/det/det.txt`, `<seq>/gt/gt.txt`.
#[derive(Debug, Clone, PartialEq)]
pub struct SequenceSpec {
    pub name: String,
    /// From `seqinfo.ini` when present, otherwise the largest frame index
    /// in the det/gt files; 0 when neither knows.
    pub frame_count: u64,
    pub frame_rate: Option<f64>,
    pub det_path: PathBuf,
    pub gt_path: Option<PathBuf>,
}

impl SequenceSpec {
    pub fn result_path(&self, results_dir: &Path) -> PathBuf {
        results_dir.join(format!("{}.txt", self.name))
    }
}

pub fn is_sequence_dir(dir: &Path) -> bool {
    dir.join("det").join("det.txt").is_file()
}

/// Reads one sequence directory.
pub fn load_sequence(dir: &Path) -> Result<SequenceSpec, MotIoError> {
    let det_path = dir.join("det").join("det.txt");
    if !det_path.is_file() {
        return Err(MotIoError::File {
            path: det_path,
            source: io::Error::new(io::ErrorKind::NotFound, "missing det/det.txt"),
        });
    }
    let gt = dir.join("gt").join("gt.txt");
    let gt_path = gt.is_file().then_some(gt);
    let name = dir
        .file_name()
        .map(|n| n.to_string_lossy().into_owned())
        .unwrap_or_else(|| "sequence".into());

    let mut frame_count = 0;
    let mut frame_rate = None;
    let ini = dir.join("seqinfo.ini");
    if ini.is_file() {
        let text = fs::read_to_string(&ini).map_err(|source| MotIoError::File { path: ini, source })?;
        let info = parse_seqinfo(&text);
        if let Some(len) = info.get("seqlength").and_then(|v| v.parse().ok()) {
            frame_count = len;
        }
        frame_rate = info.get("framerate").and_then(|v| v.parse().ok());
    }
    Ok(SequenceSpec {
        name,
        frame_count,
        frame_rate,
        det_path,
        gt_path,
    })
}

fn parse_seqinfo(text: &str) -> BTreeMap<String, String> {
    text.lines()
        .filter_map(|l| l.split_once('='))
        .map(|(k, v)| (k.trim().to_ascii_lowercase(), v.trim().to_string()))
        .collect()
}

/// Every sequence directory directly below `root`, sorted by name.
pub fn discover_sequences(root: &Path) -> Result<Vec<SequenceSpec>, MotIoError> {
    let entries = fs::read_dir(root).map_err(|source| MotIoError::File {
        path: root.to_path_buf(),
        source,
    })?;
    let mut dirs = Vec::new();
    for entry in entries {
        let path = entry?.path();
        if path.is_dir() && is_sequence_dir(&path) {
            dirs.push(path);
        }
    }
    dirs.sort();
    dirs.iter().map(|d| load_sequence(d)).collect()
}
