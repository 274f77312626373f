//! File formats: partition and ensemble JSON, dataset CSV, result reports.
//!
//! Cluster labels in files are 1-based. Point indices and motif ids are
//! 0-based, with `-1` marking points outside every motif.

use std::io::{Read, Write};

use serde::{Deserialize, Serialize};

use crate::consensus::{MeanResult, StationarityReport, StopReason};
use crate::ensemble::Dataset;
use crate::error::{Error, Result};
use crate::partition::{HardLabeling, LabeledPartition};
use crate::profile::MotifSet;
use crate::stability::StabilityReport;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum PartitionFile {
    Hard {
        ell: usize,
        m: usize,
        labels: Vec<i64>,
    },
    Soft {
        ell: usize,
        m: usize,
        values: Vec<Vec<f64>>,
    },
}

impl PartitionFile {
    pub fn from_partition(x: &LabeledPartition) -> Self {
        match x.to_hard() {
            Some(h) => PartitionFile::Hard {
                ell: x.ell(),
                m: x.m(),
                labels: h.labels().iter().map(|&l| l as i64 + 1).collect(),
            },
            None => PartitionFile::Soft {
                ell: x.ell(),
                m: x.m(),
                values: x.to_rows(),
            },
        }
    }

    pub fn dims(&self) -> (usize, usize) {
        match self {
            PartitionFile::Hard { ell, m, .. } | PartitionFile::Soft { ell, m, .. } => (*ell, *m),
        }
    }

    pub fn to_partition(&self) -> Result<LabeledPartition> {
        match self {
            PartitionFile::Hard { ell, m, labels } => {
                if labels.len() != *m {
                    return Err(Error::Parse(format!(
                        "field `labels` has {} entries but `m` is {m}",
                        labels.len()
                    )));
                }
                Ok(HardLabeling::from_one_based(*ell, labels)?.to_partition())
            }
            PartitionFile::Soft { ell, m, values } => {
                if values.len() != *ell || values.iter().any(|r| r.len() != *m) {
                    return Err(Error::Parse(format!(
                        "field `values` must hold {ell} rows of {m} entries"
                    )));
                }
                LabeledPartition::from_rows(values)
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EnsembleFile {
    pub ell: usize,
    pub m: usize,
    pub partitions: Vec<PartitionFile>,
}

impl EnsembleFile {
    pub fn from_partitions(sample: &[LabeledPartition]) -> Result<Self> {
        let first = sample
            .first()
            .ok_or_else(|| Error::validation("an ensemble needs at least one partition"))?;
        for x in sample {
            first.check_same_dims(x)?;
        }
        Ok(Self {
            ell: first.ell(),
            m: first.m(),
            partitions: sample.iter().map(PartitionFile::from_partition).collect(),
        })
    }

    pub fn to_partitions(&self) -> Result<Vec<LabeledPartition>> {
        if self.partitions.is_empty() {
            return Err(Error::Parse("field `partitions` is empty".into()));
        }
        self.partitions
            .iter()
            .enumerate()
            .map(|(i, p)| {
                if p.dims() != (self.ell, self.m) {
                    return Err(Error::Parse(format!(
                        "partitions[{i}] has (ell, m) = {:?}, ensemble declares ({}, {})",
                        p.dims(),
                        self.ell,
                        self.m
                    )));
                }
                p.to_partition().map_err(|e| match e {
                    Error::Parse(msg) | Error::Validation(msg) => {
                        Error::Parse(format!("partitions[{i}]: {msg}"))
                    }
                    other => other,
                })
            })
            .collect()
    }
}

pub fn read_ensemble<R: Read>(reader: R) -> Result<Vec<LabeledPartition>> {
    let file: EnsembleFile =
        serde_json::from_reader(reader).map_err(|e| Error::Parse(e.to_string()))?;
    file.to_partitions()
}

pub fn write_json<W: Write, T: Serialize>(mut writer: W, value: &T) -> Result<()> {
    serde_json::to_writer_pretty(&mut writer, value).map_err(|e| Error::Internal(e.to_string()))?;
    writer.write_all(b"\n")?;
    Ok(())
}

pub fn write_ensemble<W: Write>(writer: W, sample: &[LabeledPartition]) -> Result<()> {
    write_json(writer, &EnsembleFile::from_partitions(sample)?)
}

/// Writes `x1,...,xd[,label]` with 1-based labels.
pub fn write_dataset_csv<W: Write>(writer: W, data: &Dataset) -> Result<()> {
    let mut w = csv::Writer::from_writer(writer);
    let mut header: Vec<String> = (1..=data.d()).map(|t| format!("x{t}")).collect();
    if data.ground_truth().is_some() {
        header.push("label".into());
    }
    w.write_record(&header).map_err(csv_err)?;
    for j in 0..data.m() {
        let mut rec: Vec<String> = data.point(j).iter().map(|v| v.to_string()).collect();
        if let Some(gt) = data.ground_truth() {
            rec.push((gt[j] + 1).to_string());
        }
        w.write_record(&rec).map_err(csv_err)?;
    }
    w.flush()?;
    Ok(())
}

fn csv_err(e: csv::Error) -> Error {
    Error::Parse(e.to_string())
}

pub fn read_dataset_csv<R: Read>(reader: R) -> Result<Dataset> {
    let mut r = csv::Reader::from_reader(reader);
    let header = r.headers().map_err(csv_err)?.clone();
    let has_label = header.iter().next_back() == Some("label");
    let d = header.len() - usize::from(has_label);
    for (t, name) in header.iter().take(d).enumerate() {
        if name != format!("x{}", t + 1) {
            return Err(Error::Parse(format!(
                "dataset column {} is `{name}`, expected `x{}`",
                t + 1,
                t + 1
            )));
        }
    }
    let mut points = Vec::new();
    let mut labels = Vec::new();
    for (row, rec) in r.records().enumerate() {
        let rec = rec.map_err(csv_err)?;
        for (t, field) in rec.iter().take(d).enumerate() {
            points.push(field.trim().parse::<f64>().map_err(|_| {
                Error::Parse(format!(
                    "row {}: `x{}` = `{field}` is not a number",
                    row + 1,
                    t + 1
                ))
            })?);
        }
        if has_label {
            let field = rec.get(d).unwrap_or("");
            let l: usize = field.trim().parse().map_err(|_| {
                Error::Parse(format!(
                    "row {}: `label` = `{field}` is not a label",
                    row + 1
                ))
            })?;
            if l == 0 {
                return Err(Error::Parse(format!("row {}: labels are 1-based", row + 1)));
            }
            labels.push(l - 1);
        }
    }
    Dataset::new(d, points, has_label.then_some(labels))
}

/// Serialized form of a [`MeanResult`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MeanReport {
    pub ell: usize,
    pub m: usize,
    pub mean: Vec<Vec<f64>>,
    pub frechet_value: f64,
    pub g: f64,
    /// Relabeling applied to each ensemble member, as 0-based row mappings.
    pub permutations: Vec<Vec<usize>>,
    pub f_trace: Vec<f64>,
    pub iterations: usize,
    pub converged: bool,
    pub stop_reason: StopReason,
    pub restarts_used: usize,
    pub best_restart: usize,
    pub stationary: bool,
    pub stationarity: StationarityReport,
}

impl MeanReport {
    pub fn new(r: &MeanResult, stationarity: StationarityReport) -> Self {
        Self {
            ell: r.mean.ell(),
            m: r.mean.m(),
            mean: r.mean.to_rows(),
            frechet_value: r.frechet_value,
            g: r.g(),
            permutations: r
                .alignment
                .permutations()
                .iter()
                .map(|p| p.mapping().to_vec())
                .collect(),
            f_trace: r.f_trace.clone(),
            iterations: r.iterations,
            converged: r.converged,
            stop_reason: r.stop_reason,
            restarts_used: r.restarts_used,
            best_restart: r.best_restart,
            stationary: stationarity.is_stationary(),
            stationarity,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MotifReport {
    pub tau: f64,
    pub motifs: Vec<Vec<usize>>,
    pub uncovered: Vec<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub purity: Option<Vec<Option<f64>>>,
}

impl MotifReport {
    pub fn new(set: &MotifSet, ground_truth: Option<&[usize]>) -> Self {
        Self {
            tau: set.tau,
            motifs: set.motifs.clone(),
            uncovered: set.uncovered.clone(),
            purity: ground_truth.map(|gt| set.purity(gt)),
        }
    }
}

/// `point_index[,x1..xd],motif_id` with `-1` for uncovered points.
pub fn write_motif_csv<W: Write>(
    writer: W,
    set: &MotifSet,
    m: usize,
    data: Option<&Dataset>,
) -> Result<()> {
    let mut w = csv::Writer::from_writer(writer);
    let mut header = vec!["point_index".to_string()];
    if let Some(ds) = data {
        header.extend((1..=ds.d()).map(|t| format!("x{t}")));
    }
    header.push("motif_id".into());
    w.write_record(&header).map_err(csv_err)?;
    for (j, motif) in set.assignment(m).into_iter().enumerate() {
        let mut rec = vec![j.to_string()];
        if let Some(ds) = data {
            rec.extend(ds.point(j).iter().map(|v| v.to_string()));
        }
        rec.push(motif.map_or("-1".to_string(), |k| k.to_string()));
        w.write_record(&rec).map_err(csv_err)?;
    }
    w.flush()?;
    Ok(())
}

/// `k,G,g,F,D,selected_marker`; the marker lists the scores selecting `k`.
pub fn write_stability_csv<W: Write>(writer: W, report: &StabilityReport) -> Result<()> {
    let mut w = csv::Writer::from_writer(writer);
    w.write_record(["k", "G", "g", "F", "D", "selected_marker"])
        .map_err(csv_err)?;
    for row in &report.rows {
        let s = &report.selected;
        let marker: Vec<&str> = [(s.pairwise, "G"), (s.multiple, "g"), (s.frechet, "F")]
            .into_iter()
            .filter(|(k, _)| *k == row.k)
            .map(|(_, name)| name)
            .collect();
        w.write_record([
            row.k.to_string(),
            row.pairwise.to_string(),
            row.multiple.to_string(),
            row.frechet.to_string(),
            row.gap.to_string(),
            marker.join("|"),
        ])
        .map_err(csv_err)?;
    }
    w.flush()?;
    Ok(())
}
