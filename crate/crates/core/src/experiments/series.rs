use std::io::Write;

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MetricRecord {
    pub epoch: usize,
    pub objective: f64,
    pub rmse: f64,
}

/// Per-epoch training objective and evaluation RMSE of one model.
#[derive(Debug, Clone, PartialEq)]
pub struct MetricSeries {
    pub name: String,
    records: Vec<MetricRecord>,
}

impl MetricSeries {
    pub fn new(name: impl Into<String>) -> Self {
        Self { name: name.into(), records: Vec::new() }
    }

    /// Appends a record; epochs must strictly increase.
    pub fn push(&mut self, epoch: usize, objective: f64, rmse: f64) -> Result<()> {
        if let Some(last) = self.records.last() {
            if epoch <= last.epoch {
                return Err(Error::State(format!("epoch {epoch} does not follow {}", last.epoch)));
            }
        }
        self.records.push(MetricRecord { epoch, objective, rmse });
        Ok(())
    }

    pub fn records(&self) -> &[MetricRecord] {
        &self.records
    }

    pub fn last(&self) -> Option<&MetricRecord> {
        self.records.last()
    }

    pub fn at_epoch(&self, epoch: usize) -> Option<&MetricRecord> {
        self.records.binary_search_by_key(&epoch, |r| r.epoch).ok().map(|i| &self.records[i])
    }

    pub fn write_csv<W: Write>(&self, mut out: W) -> Result<()> {
        writeln!(out, "epoch,objective,rmse")?;
        for r in &self.records {
            writeln!(out, "{},{},{}", r.epoch, r.objective, r.rmse)?;
        }
        Ok(())
    }

    pub fn read_csv(name: impl Into<String>, text: &str) -> Result<Self> {
        let mut series = Self::new(name);
        let mut lines = text.lines().enumerate();
        match lines.next() {
            Some((_, "epoch,objective,rmse")) => {}
            _ => return Err(Error::Parse { line: 1, message: "expected header `epoch,objective,rmse`".into() }),
        }
        for (i, line) in lines {
            if line.trim().is_empty() {
                continue;
            }
            let bad = |m: String| Error::Parse { line: i + 1, message: m };
            let fields: Vec<&str> = line.split(',').collect();
            let [e, o, r] = fields[..] else {
                return Err(bad(format!("expected 3 fields, found {}", fields.len())));
            };
            let epoch = e.parse().map_err(|e| bad(format!("{e}")))?;
            let objective = o.parse().map_err(|e| bad(format!("{e}")))?;
            let rmse = r.parse().map_err(|e| bad(format!("{e}")))?;
            series.push(epoch, objective, rmse).map_err(|e| bad(e.to_string()))?;
        }
        Ok(series)
    }
}
