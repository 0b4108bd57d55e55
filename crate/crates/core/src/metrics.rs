//! Plate- and character-level recognition accuracy.
//!
//! Counts are tallied exactly as integers; fractions are exposed either as
//! exact ratios ([`Fraction`]) or converted into any [`Real`].
//!
//! Character matches come from a unit-cost Levenshtein alignment, so a
//! prediction that drops or inserts one glyph only loses the affected
//! positions instead of everything after them.

use std::collections::{HashMap, HashSet};
use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use num_rational::Ratio;
use serde::{Deserialize, Serialize};

use crate::alphabet::PLATE_LEN;
use crate::error::{Error, Result};
use crate::manifest::Manifest;
use crate::scalar::Real;

/// Exact fraction of two counts.
pub type Fraction = Ratio<u64>;

pub fn to_real<R: Real>(f: Fraction) -> R {
    R::from_u64(*f.numer()).expect("u64") / R::from_u64(*f.denom()).expect("u64")
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Alignment {
    /// Truth positions aligned to an equal predicted glyph, ascending.
    pub matched: Vec<usize>,
    pub distance: usize,
}

/// Minimum edit-distance alignment of `pred` against `truth`.
///
/// The backtrace prefers, at every cell, match > substitution > deletion
/// (truth glyph dropped) > insertion (extra predicted glyph).
pub fn levenshtein_align(truth: &str, pred: &str) -> Alignment {
    let t: Vec<char> = truth.chars().collect();
    let p: Vec<char> = pred.chars().collect();
    let (n, m) = (t.len(), p.len());
    let cols = m + 1;
    let mut d = vec![0usize; (n + 1) * cols];
    for i in 0..=n {
        d[i * cols] = i;
    }
    for (j, cell) in d[..cols].iter_mut().enumerate() {
        *cell = j;
    }
    for i in 1..=n {
        for j in 1..=m {
            let sub = d[(i - 1) * cols + j - 1] + usize::from(t[i - 1] != p[j - 1]);
            let del = d[(i - 1) * cols + j] + 1;
            let ins = d[i * cols + j - 1] + 1;
            d[i * cols + j] = sub.min(del).min(ins);
        }
    }
    let mut matched = Vec::new();
    let (mut i, mut j) = (n, m);
    while i > 0 || j > 0 {
        let here = d[i * cols + j];
        if i > 0 && j > 0 {
            let diag = d[(i - 1) * cols + j - 1];
            if t[i - 1] == p[j - 1] && diag == here {
                matched.push(i - 1);
                i -= 1;
                j -= 1;
                continue;
            }
            if t[i - 1] != p[j - 1] && diag + 1 == here {
                i -= 1;
                j -= 1;
                continue;
            }
        }
        if i > 0 && d[(i - 1) * cols + j] + 1 == here {
            i -= 1;
        } else {
            j -= 1;
        }
    }
    matched.reverse();
    Alignment {
        matched,
        distance: d[n * cols + m],
    }
}

/// Integer tallies behind every metric.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct MatchCounts {
    pub plates: u64,
    pub exact_plates: u64,
    pub chars: u64,
    pub matched_chars: u64,
    pub first_total: u64,
    pub first_matched: u64,
    pub rest_total: u64,
    pub rest_matched: u64,
}

impl MatchCounts {
    pub fn add(&mut self, truth: &str, pred: &str) {
        let len = truth.chars().count() as u64;
        let alignment = levenshtein_align(truth, pred);
        self.plates += 1;
        self.exact_plates += u64::from(truth == pred);
        self.chars += len;
        self.matched_chars += alignment.matched.len() as u64;
        if len > 0 {
            self.first_total += 1;
            self.rest_total += len - 1;
            let first = alignment.matched.first() == Some(&0);
            self.first_matched += u64::from(first);
            self.rest_matched += alignment.matched.len() as u64 - u64::from(first);
        }
    }

    pub fn tally<T: AsRef<str>, P: AsRef<str>>(pairs: &[(T, P)]) -> Result<Self> {
        if pairs.is_empty() {
            return Err(Error::EmptyInput);
        }
        let mut c = Self::default();
        for (t, p) in pairs {
            c.add(t.as_ref(), p.as_ref());
        }
        Ok(c)
    }

    fn ratio(num: u64, den: u64) -> Fraction {
        if den == 0 {
            Fraction::new(0, 1)
        } else {
            Fraction::new(num, den)
        }
    }

    pub fn ra(&self) -> Fraction {
        Self::ratio(self.exact_plates, self.plates)
    }

    pub fn cra(&self) -> Fraction {
        Self::ratio(self.matched_chars, self.chars)
    }

    pub fn cra_c(&self) -> Fraction {
        Self::ratio(self.first_matched, self.first_total)
    }

    pub fn cra_nc(&self) -> Fraction {
        Self::ratio(self.rest_matched, self.rest_total)
    }
}

/// Fraction of predictions exactly equal to their truth.
pub fn recognition_accuracy<R: Real, T: AsRef<str>, P: AsRef<str>>(pairs: &[(T, P)]) -> Result<R> {
    Ok(to_real(MatchCounts::tally(pairs)?.ra()))
}

/// Matched truth glyphs over all truth glyphs.
pub fn character_accuracy<R: Real, T: AsRef<str>, P: AsRef<str>>(pairs: &[(T, P)]) -> Result<R> {
    Ok(to_real(MatchCounts::tally(pairs)?.cra()))
}

fn check_plate_truths<T: AsRef<str>, P>(pairs: &[(T, P)]) -> Result<()> {
    for (t, _) in pairs {
        let len = t.as_ref().chars().count();
        if len != PLATE_LEN {
            return Err(Error::BadTruthLength {
                truth: t.as_ref().to_string(),
                len,
            });
        }
    }
    Ok(())
}

/// `(CRA-C, CRA-NC)`: match rate of the leading province glyph and of the
/// six trailing glyphs. A deleted first glyph counts as wrong.
pub fn cra_split<R: Real, T: AsRef<str>, P: AsRef<str>>(pairs: &[(T, P)]) -> Result<(R, R)> {
    check_plate_truths(pairs)?;
    let c = MatchCounts::tally(pairs)?;
    Ok((to_real(c.cra_c()), to_real(c.cra_nc())))
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PredictionRecord {
    pub id: String,
    pub prediction: String,
}

pub fn parse_predictions(text: &str, origin: &Path) -> Result<Vec<PredictionRecord>> {
    text.lines()
        .enumerate()
        .filter(|(_, l)| !l.trim().is_empty())
        .map(|(n, l)| {
            serde_json::from_str(l).map_err(|e| Error::ManifestParse {
                path: origin.to_path_buf(),
                line: n + 1,
                reason: e.to_string(),
            })
        })
        .collect()
}

pub fn read_predictions(path: &Path) -> Result<Vec<PredictionRecord>> {
    let text =
        fs::read_to_string(path).map_err(|e| Error::io(format!("read {}", path.display()), e))?;
    parse_predictions(&text, path)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PlateError {
    pub id: String,
    pub truth: String,
    pub prediction: String,
    pub matched_chars: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvalReport<R> {
    pub ra: R,
    pub cra: R,
    pub cra_c: R,
    pub cra_nc: R,
    pub n_plates: u64,
    pub n_chars: u64,
    pub errors: Vec<PlateError>,
}

impl<R: Real> EvalReport<R> {
    pub fn from_counts(c: &MatchCounts, errors: Vec<PlateError>) -> Self {
        Self {
            ra: to_real(c.ra()),
            cra: to_real(c.cra()),
            cra_c: to_real(c.cra_c()),
            cra_nc: to_real(c.cra_nc()),
            n_plates: c.plates,
            n_chars: c.chars,
            errors,
        }
    }

    /// One-row text table with the RA / CRA / CRA-C / CRA-NC columns, in
    /// percent.
    pub fn table(&self, method: &str, training_data: &str) -> String {
        let pct = |v: R| v.to_f64().unwrap_or(f64::NAN) * 100.0;
        let mut s = String::new();
        let _ = writeln!(
            s,
            "{:<16} {:>14} {:>8} {:>8} {:>8} {:>8}",
            "Method", "Training Data", "RA", "CRA", "CRA-C", "CRA-NC"
        );
        let _ = writeln!(
            s,
            "{:<16} {:>14} {:>8.1} {:>8.1} {:>8.1} {:>8.1}",
            method,
            training_data,
            pct(self.ra),
            pct(self.cra),
            pct(self.cra_c),
            pct(self.cra_nc)
        );
        s
    }
}

/// Join predictions to manifest rows by id and score them.
///
/// Every manifest id must appear exactly once among the predictions, and no
/// prediction may name an id outside the manifest.
pub fn evaluate<R: Real>(
    manifest: &Manifest,
    predictions: &[PredictionRecord],
) -> Result<EvalReport<R>> {
    let mut by_id: HashMap<&str, &str> = HashMap::with_capacity(predictions.len());
    for p in predictions {
        if by_id.insert(p.id.as_str(), p.prediction.as_str()).is_some() {
            return Err(Error::DuplicatePrediction(p.id.clone()));
        }
    }
    let ids: HashSet<&str> = manifest.records.iter().map(|r| r.id.as_str()).collect();
    if let Some(p) = predictions.iter().find(|p| !ids.contains(p.id.as_str())) {
        return Err(Error::UnknownPrediction(p.id.clone()));
    }
    if manifest.is_empty() {
        return Err(Error::EmptyInput);
    }
    let mut counts = MatchCounts::default();
    let mut errors = Vec::new();
    for r in &manifest.records {
        let pred = *by_id
            .get(r.id.as_str())
            .ok_or_else(|| Error::MissingPrediction(r.id.clone()))?;
        let truth = r.label.as_str();
        counts.add(truth, pred);
        if truth != pred {
            errors.push(PlateError {
                id: r.id.clone(),
                truth: truth.to_string(),
                prediction: pred.to_string(),
                matched_chars: levenshtein_align(truth, pred).matched.len(),
            });
        }
    }
    Ok(EvalReport::from_counts(&counts, errors))
}
