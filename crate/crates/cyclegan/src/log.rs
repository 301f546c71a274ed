use crate::error::GanError;
use std::fs::OpenOptions;
use std::io::Write;
use std::path::Path;

pub const LOSS_LOG_HEADER: &str =
    "epoch\titer\tloss_d_x\tloss_d_y\tloss_g_adv\tloss_cyc\tloss_id\ttotal";

/// One training step's losses. Cycle and identity are multiplier-scaled, so
/// loss_g_adv + loss_cyc + loss_id = total.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LossRecord {
    pub epoch: u32,
    pub iter: u64,
    pub loss_d_x: f64,
    pub loss_d_y: f64,
    pub loss_g_adv: f64,
    pub loss_cyc: f64,
    pub loss_id: f64,
    pub total: f64,
}

impl LossRecord {
    fn to_line(self) -> String {
        format!(
            "{}\t{}\t{}\t{}\t{}\t{}\t{}\t{}",
            self.epoch,
            self.iter,
            self.loss_d_x,
            self.loss_d_y,
            self.loss_g_adv,
            self.loss_cyc,
            self.loss_id,
            self.total
        )
    }
}

/// Appends records as TSV, writing the header when the file starts empty.
pub fn append_loss_log(path: &Path, records: &[LossRecord]) -> Result<(), GanError> {
    let mut file = OpenOptions::new().create(true).append(true).open(path)?;
    let needs_header = file.metadata()?.len() == 0;
    let mut out = String::new();
    if needs_header {
        out.push_str(LOSS_LOG_HEADER);
        out.push('\n');
    }
    for rec in records {
        out.push_str(&rec.to_line());
        out.push('\n');
    }
    file.write_all(out.as_bytes())?;
    Ok(())
}

/// Reads a loss log back; rejects missing or reordered columns.
pub fn read_loss_log(path: &Path) -> Result<Vec<LossRecord>, GanError> {
    let text = std::fs::read_to_string(path)?;
    let mut lines = text.lines();
    match lines.next() {
        Some(h) if h == LOSS_LOG_HEADER => {}
        other => {
            return Err(GanError::Train(format!(
                "loss log {} has unexpected header {:?}",
                path.display(),
                other
            )))
        }
    }
    let mut records = Vec::new();
    for (i, line) in lines.enumerate() {
        if line.is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.split('\t').collect();
        if fields.len() != 8 {
            return Err(GanError::Train(format!(
                "loss log line {} has {} fields, expected 8",
                i + 2,
                fields.len()
            )));
        }
        let parse = |s: &str| -> Result<f64, GanError> {
            s.parse().map_err(|_| GanError::Train(format!("bad number {s:?} in loss log")))
        };
        records.push(LossRecord {
            epoch: fields[0]
                .parse()
                .map_err(|_| GanError::Train(format!("bad epoch {:?}", fields[0])))?,
            iter: fields[1]
                .parse()
                .map_err(|_| GanError::Train(format!("bad iter {:?}", fields[1])))?,
            loss_d_x: parse(fields[2])?,
            loss_d_y: parse(fields[3])?,
            loss_g_adv: parse(fields[4])?,
            loss_cyc: parse(fields[5])?,
            loss_id: parse(fields[6])?,
            total: parse(fields[7])?,
        });
    }
    Ok(records)
}
