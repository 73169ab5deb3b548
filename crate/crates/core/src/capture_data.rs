//! The observed cross-classification of records and the statistics the
//! models consume.
//!
//! Rows of the table are "mentioned in other sources?" (no / yes), columns
//! are the number of surviving letters in the killer's archive, `0..=m`.
//! The (no, 0) cell is the unknown count and has no stored value.

use std::collections::HashSet;
use std::io::Read;
use std::path::Path;

use crate::error::{Error, Result};
use crate::lognum::log_factorial;

/// Letters issued per event in the bundled corpus.
pub const DEFAULT_MAX_LETTERS: usize = 5;

const BUNDLED_TABLE: &str = include_str!("../data/table1.csv");

const HEADER: [&str; 3] = ["mentioned_other", "letters", "count"];

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CaptureTable {
    m: usize,
    /// `n_0j` for `j = 1..=m`; index 0 holds `j = 1`.
    no_mention_known: Vec<u64>,
    /// `n_1j` for `j = 0..=m`.
    mention: Vec<u64>,
}

impl CaptureTable {
    /// Builds a table from its known cells. `no_mention_known` lists
    /// `n_01..n_0m`, `mention` lists `n_10..n_1m`.
    pub fn new(m: usize, no_mention_known: Vec<u64>, mention: Vec<u64>) -> Result<Self> {
        if m == 0 {
            return Err(Error::usage("a capture table needs at least one letter column"));
        }
        if no_mention_known.len() != m || mention.len() != m + 1 {
            return Err(Error::usage(format!(
                "expected {m} known no-mention cells and {} mention cells, got {} and {}",
                m + 1,
                no_mention_known.len(),
                mention.len()
            )));
        }
        Ok(CaptureTable {
            m,
            no_mention_known,
            mention,
        })
    }

    /// The bundled table of killings, 1300 to 1569.
    pub fn bundled() -> Self {
        Self::from_reader(BUNDLED_TABLE.as_bytes(), DEFAULT_MAX_LETTERS)
            .expect("bundled table is valid")
    }

    pub fn m(&self) -> usize {
        self.m
    }

    /// `n_0j`, or `None` for the unknown `j = 0` cell.
    pub fn no_mention(&self, j: usize) -> Option<u64> {
        match j {
            0 => None,
            j if j <= self.m => Some(self.no_mention_known[j - 1]),
            _ => None,
        }
    }

    /// `n_1j`.
    pub fn mention(&self, j: usize) -> u64 {
        self.mention[j]
    }

    /// Known part of the column total `n_+j` (excludes the unknown at `j = 0`).
    pub fn column_known(&self, j: usize) -> u64 {
        self.no_mention(j).unwrap_or(0) + self.mention(j)
    }

    pub fn observed_total(&self) -> u64 {
        self.no_mention_known.iter().sum::<u64>() + self.mention.iter().sum::<u64>()
    }

    /// Reads the long-format CSV `mentioned_other,letters,count`. Cells
    /// not listed are zero; the (0, 0) cell must not appear.
    pub fn from_reader<R: Read>(reader: R, m: usize) -> Result<Self> {
        let mut rdr = csv::ReaderBuilder::new()
            .has_headers(true)
            .trim(csv::Trim::All)
            .from_reader(reader);

        let headers = rdr
            .headers()
            .map_err(|e| Error::ingestion(1, format!("unreadable header: {e}")))?
            .clone();
        if headers.is_empty() || (headers.len() == 1 && headers[0].is_empty()) {
            return Err(Error::ingestion(1, "empty file, header required"));
        }
        if headers.iter().ne(HEADER.iter().copied()) {
            return Err(Error::ingestion(
                1,
                format!("header must be `{}`", HEADER.join(",")),
            ));
        }

        let mut no_mention_known = vec![0u64; m];
        let mut mention = vec![0u64; m + 1];
        let mut seen = HashSet::new();

        for (idx, record) in rdr.records().enumerate() {
            // header is row 1
            let row = idx + 2;
            let record = record.map_err(|e| Error::ingestion(row, e.to_string()))?;
            if record.len() != 3 {
                return Err(Error::ingestion(row, format!("expected 3 fields, got {}", record.len())));
            }
            let mentioned: u8 = match &record[0] {
                "0" => 0,
                "1" => 1,
                other => {
                    return Err(Error::ingestion(
                        row,
                        format!("mentioned_other must be 0 or 1, got `{other}`"),
                    ))
                }
            };
            let letters: usize = record[1]
                .parse()
                .map_err(|_| Error::ingestion(row, format!("bad letters value `{}`", &record[1])))?;
            if letters > m {
                return Err(Error::ingestion(row, format!("letters {letters} exceeds m = {m}")));
            }
            let count: i64 = record[2]
                .parse()
                .map_err(|_| Error::ingestion(row, format!("bad count `{}`", &record[2])))?;
            if count < 0 {
                return Err(Error::ingestion(row, format!("negative count {count}")));
            }
            if mentioned == 0 && letters == 0 {
                return Err(Error::ingestion(
                    row,
                    "cell (mentioned_other=0, letters=0) is the unknown and must not be given",
                ));
            }
            if !seen.insert((mentioned, letters)) {
                return Err(Error::ingestion(
                    row,
                    format!("duplicate cell (mentioned_other={mentioned}, letters={letters})"),
                ));
            }
            let count = count as u64;
            if mentioned == 0 {
                no_mention_known[letters - 1] = count;
            } else {
                mention[letters] = count;
            }
        }

        CaptureTable::new(m, no_mention_known, mention)
    }

    pub fn load(path: impl AsRef<Path>, m: usize) -> Result<Self> {
        let path = path.as_ref();
        let file = std::fs::File::open(path).map_err(|source| Error::Io {
            path: path.to_path_buf(),
            source,
        })?;
        Self::from_reader(std::io::BufReader::new(file), m)
    }

    pub fn reduce(&self) -> ReducedTable {
        ReducedTable {
            n01: self.no_mention_known.iter().sum(),
            n10: self.mention[0],
            n11: self.mention[1..].iter().sum(),
        }
    }

    pub fn summarize(&self) -> SummaryStats {
        let s1 = (0..=self.m).map(|j| j as u64 * self.column_known(j)).sum();
        let s2_known = (0..=self.m)
            .map(|j| self.column_known(j) as f64 * ln_split_factorial(j, self.m))
            .sum();
        SummaryStats {
            n0_plus_known: self.no_mention_known.iter().sum(),
            n1_plus: self.mention.iter().sum(),
            s1,
            s2_known,
            observed_total: self.observed_total(),
        }
    }
}

/// Loads a capture table with the default `m = 5`.
pub fn load_capture_table(path: impl AsRef<Path>) -> Result<CaptureTable> {
    CaptureTable::load(path, DEFAULT_MAX_LETTERS)
}

/// `ln(j! (m-j)!)`.
pub(crate) fn ln_split_factorial(j: usize, m: usize) -> f64 {
    log_factorial(j as u64) + log_factorial((m - j) as u64)
}

/// The 2x2 reduction: any surviving letter counts as "in the archive".
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct ReducedTable {
    pub n01: u64,
    pub n10: u64,
    pub n11: u64,
}

impl ReducedTable {
    pub fn observed_total(&self) -> u64 {
        self.n01 + self.n10 + self.n11
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SummaryStats {
    /// Row total of the no-mention row, without the unknown cell.
    pub n0_plus_known: u64,
    pub n1_plus: u64,
    /// Total surviving letters, `Σ j n_+j`.
    pub s1: u64,
    /// `Σ n_+j ln(j!(m-j)!)` over known cells only. The unknown count adds
    /// `n ln(m!)` at evaluation time.
    pub s2_known: f64,
    pub observed_total: u64,
}
