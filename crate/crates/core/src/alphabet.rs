//! Plate glyph alphabet, class indices and the plate grammar.

use std::fmt;
use std::str::FromStr;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::seed;

/// Province abbreviations, in class-index order.
pub const PROVINCES: [char; 31] = [
    '京', '津', '冀', '晋', '蒙', '辽', '吉', '黑', '沪', '苏', '浙', '皖', '闽', '赣', '鲁', '豫',
    '鄂', '湘', '粤', '桂', '琼', '渝', '川', '贵', '云', '藏', '陕', '甘', '青', '宁', '新',
];

pub const LETTERS: [char; 26] = [
    'A', 'B', 'C', 'D', 'E', 'F', 'G', 'H', 'I', 'J', 'K', 'L', 'M', 'N', 'O', 'P', 'Q', 'R', 'S',
    'T', 'U', 'V', 'W', 'X', 'Y', 'Z',
];

pub const DIGITS: [char; 10] = ['0', '1', '2', '3', '4', '5', '6', '7', '8', '9'];

pub const PLATE_LEN: usize = 7;
pub const NUM_CLASSES: usize = 68;
pub const BLANK_INDEX: usize = 67;

/// Letters never issued on plates (confusable with 1 and 0).
const EXCLUDED_LETTERS: [char; 2] = ['I', 'O'];

/// Recognizer class layout: provinces 0–30, letters 31–56, digits 57–66,
/// CTC blank 67.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct PlateAlphabet;

impl PlateAlphabet {
    pub const PROVINCE_START: usize = 0;
    pub const LETTER_START: usize = 31;
    pub const DIGIT_START: usize = 57;

    pub fn num_classes(&self) -> usize {
        NUM_CLASSES
    }

    pub fn blank_index(&self) -> usize {
        BLANK_INDEX
    }

    /// Renderable glyph of a class index; `None` for the blank and out of range.
    pub fn glyph(&self, index: usize) -> Option<char> {
        match index {
            0..=30 => Some(PROVINCES[index]),
            31..=56 => Some(LETTERS[index - Self::LETTER_START]),
            57..=66 => Some(DIGITS[index - Self::DIGIT_START]),
            _ => None,
        }
    }

    pub fn index_of(&self, glyph: char) -> Option<usize> {
        if let Some(i) = PROVINCES.iter().position(|&c| c == glyph) {
            return Some(i);
        }
        match glyph {
            'A'..='Z' => Some(Self::LETTER_START + (glyph as usize - 'A' as usize)),
            '0'..='9' => Some(Self::DIGIT_START + (glyph as usize - '0' as usize)),
            _ => None,
        }
    }

    pub fn is_province(&self, glyph: char) -> bool {
        PROVINCES.contains(&glyph)
    }

    /// Letters allowed in the issued part of a plate (A–Z without I and O).
    pub fn plate_letters(&self) -> impl Iterator<Item = char> + Clone {
        LETTERS
            .iter()
            .copied()
            .filter(|c| !EXCLUDED_LETTERS.contains(c))
    }

    /// Glyphs allowed in positions 3–7.
    pub fn serial_glyphs(&self) -> impl Iterator<Item = char> + Clone {
        self.plate_letters().chain(DIGITS.iter().copied())
    }

    /// Every renderable glyph in class order.
    pub fn glyphs(&self) -> impl Iterator<Item = char> {
        PROVINCES
            .iter()
            .chain(LETTERS.iter())
            .chain(DIGITS.iter())
            .copied()
    }
}

/// A grammatical 7-glyph plate string: province, issuing letter, then five
/// letters or digits. Letters I and O never appear.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub struct PlateLabel(String);

impl PlateLabel {
    pub fn parse(text: &str) -> Result<Self> {
        let invalid = |reason: String| Error::InvalidLabel {
            label: text.to_string(),
            reason,
        };
        let glyphs: Vec<char> = text.chars().collect();
        if glyphs.len() != PLATE_LEN {
            return Err(invalid(format!(
                "expected {PLATE_LEN} glyphs, found {}",
                glyphs.len()
            )));
        }
        let alphabet = PlateAlphabet;
        if !alphabet.is_province(glyphs[0]) {
            return Err(invalid(format!(
                "position 1 must be a province glyph, found {:?}",
                glyphs[0]
            )));
        }
        if !alphabet.plate_letters().any(|c| c == glyphs[1]) {
            return Err(invalid(format!(
                "position 2 must be a letter other than I/O, found {:?}",
                glyphs[1]
            )));
        }
        for (pos, &g) in glyphs.iter().enumerate().skip(2) {
            if !alphabet.serial_glyphs().any(|c| c == g) {
                return Err(invalid(format!(
                    "position {} must be a digit or a letter other than I/O, found {g:?}",
                    pos + 1
                )));
            }
        }
        Ok(Self(text.to_string()))
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }

    pub fn glyphs(&self) -> impl Iterator<Item = char> + '_ {
        self.0.chars()
    }

    /// Class indices of the seven glyphs.
    pub fn class_indices(&self) -> Vec<usize> {
        self.glyphs()
            .map(|c| PlateAlphabet.index_of(c).expect("grammatical label"))
            .collect()
    }
}

impl fmt::Display for PlateLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl FromStr for PlateLabel {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Self::parse(s)
    }
}

impl TryFrom<String> for PlateLabel {
    type Error = Error;

    fn try_from(s: String) -> Result<Self> {
        Self::parse(&s)
    }
}

impl From<PlateLabel> for String {
    fn from(l: PlateLabel) -> String {
        l.0
    }
}

/// Draw a grammatical label. Provinces are uniform over all 31 glyphs; each
/// later position is uniform over its allowed set.
pub fn sample_label(seed: u64, alphabet: &PlateAlphabet) -> PlateLabel {
    let mut rng = seed::rng(seed);
    let letters: Vec<char> = alphabet.plate_letters().collect();
    let serial: Vec<char> = alphabet.serial_glyphs().collect();
    let mut text = String::with_capacity(PLATE_LEN * 3);
    text.push(PROVINCES[rng.random_range(0..PROVINCES.len())]);
    text.push(letters[rng.random_range(0..letters.len())]);
    for _ in 0..PLATE_LEN - 2 {
        text.push(serial[rng.random_range(0..serial.len())]);
    }
    PlateLabel(text)
}
