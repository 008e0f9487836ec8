//! Append-only JSON-lines journal of finished scan instances, keyed by the
//! instance digest.

use std::collections::BTreeMap;
use std::fs::{File, OpenOptions};
use std::io::{BufRead, BufReader, Write};
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::report::ReportJson;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct JournalEntry {
    pub digest: String,
    pub reports: Vec<ReportJson>,
}

pub struct Journal {
    path: PathBuf,
    done: BTreeMap<String, Vec<ReportJson>>,
}

impl Journal {
    /// Loads an existing journal; a truncated last line (an interrupted
    /// write) is ignored.
    pub fn open(path: &Path) -> std::io::Result<Journal> {
        let mut done = BTreeMap::new();
        if path.exists() {
            for line in BufReader::new(File::open(path)?).lines() {
                if let Ok(e) = serde_json::from_str::<JournalEntry>(&line?) {
                    done.insert(e.digest, e.reports);
                }
            }
        }
        Ok(Journal { path: path.to_path_buf(), done })
    }

    pub fn get(&self, digest: &str) -> Option<&Vec<ReportJson>> {
        self.done.get(digest)
    }

    pub fn len(&self) -> usize {
        self.done.len()
    }

    pub fn is_empty(&self) -> bool {
        self.done.is_empty()
    }

    pub fn record(&mut self, digest: &str, reports: &[ReportJson]) -> std::io::Result<()> {
        let e = JournalEntry { digest: digest.into(), reports: reports.to_vec() };
        let mut f = OpenOptions::new().create(true).append(true).open(&self.path)?;
        writeln!(f, "{}", serde_json::to_string(&e).expect("journal entries serialize"))?;
        f.flush()?;
        self.done.insert(e.digest, e.reports);
        Ok(())
    }
}
