//! Glyph sources for the renderer.
//!
//! Two font formats are accepted: TrueType/OpenType outlines (rasterized with
//! `ab_glyph`) and GNU Unifont `.hex` bitmaps. Either way a glyph comes back
//! as a coverage map cropped to its ink bounds, which the renderer stretches
//! into a plate cell.

use std::collections::HashMap;
use std::fmt;
use std::path::Path;
use std::sync::Arc;

use ab_glyph::{Font, FontVec, PxScale};

use crate::error::{Error, Result};

/// Coverage in `[0, 1]`, row-major, cropped to the glyph's ink.
#[derive(Debug, Clone, PartialEq)]
pub struct Coverage {
    pub width: usize,
    pub height: usize,
    pub values: Vec<f32>,
}

impl Coverage {
    pub fn at(&self, x: usize, y: usize) -> f32 {
        self.values[y * self.width + x]
    }

    /// Crop away all-zero border rows and columns. `None` if nothing is inked.
    fn trimmed(self) -> Option<Self> {
        let (w, h) = (self.width, self.height);
        let inked = |x: usize, y: usize| self.values[y * w + x] > 0.0;
        let rows: Vec<usize> = (0..h).filter(|&y| (0..w).any(|x| inked(x, y))).collect();
        let cols: Vec<usize> = (0..w).filter(|&x| (0..h).any(|y| inked(x, y))).collect();
        let (&y0, &y1) = (rows.first()?, rows.last()?);
        let (&x0, &x1) = (cols.first()?, cols.last()?);
        let (nw, nh) = (x1 - x0 + 1, y1 - y0 + 1);
        let mut values = Vec::with_capacity(nw * nh);
        for y in y0..=y1 {
            values.extend_from_slice(&self.values[y * w + x0..y * w + x1 + 1]);
        }
        Some(Self {
            width: nw,
            height: nh,
            values,
        })
    }
}

pub trait GlyphSource: Send + Sync + fmt::Debug {
    fn has_glyph(&self, c: char) -> bool;

    /// Ink coverage of `c`; `MissingGlyph` when the font lacks it.
    fn coverage(&self, c: char) -> Result<Coverage>;
}

/// Unifont `.hex` bitmap font: `CODEPOINT:HEX` per line, 8×16 or 16×16.
#[derive(Debug, Clone)]
pub struct HexFont {
    glyphs: HashMap<char, Coverage>,
}

impl HexFont {
    pub fn parse(text: &str) -> std::result::Result<Self, String> {
        let mut glyphs = HashMap::new();
        for (n, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let (cp, bits) = line
                .split_once(':')
                .ok_or_else(|| format!("line {}: missing ':'", n + 1))?;
            let cp = u32::from_str_radix(cp, 16)
                .ok()
                .and_then(char::from_u32)
                .ok_or_else(|| format!("line {}: bad code point {cp:?}", n + 1))?;
            let width = match bits.len() {
                32 => 8,
                64 => 16,
                l => return Err(format!("line {}: bitmap has {l} hex digits", n + 1)),
            };
            let row_digits = width / 4;
            let mut values = Vec::with_capacity(width * 16);
            for row in 0..16 {
                let chunk = &bits[row * row_digits..(row + 1) * row_digits];
                let word = u32::from_str_radix(chunk, 16)
                    .map_err(|_| format!("line {}: bad hex {chunk:?}", n + 1))?;
                for x in 0..width {
                    let on = word >> (width - 1 - x) & 1 == 1;
                    values.push(if on { 1.0 } else { 0.0 });
                }
            }
            let cov = Coverage {
                width,
                height: 16,
                values,
            };
            if let Some(cov) = cov.trimmed() {
                glyphs.insert(cp, cov);
            }
        }
        if glyphs.is_empty() {
            return Err("no inked glyphs".into());
        }
        Ok(Self { glyphs })
    }
}

impl GlyphSource for HexFont {
    fn has_glyph(&self, c: char) -> bool {
        self.glyphs.contains_key(&c)
    }

    fn coverage(&self, c: char) -> Result<Coverage> {
        self.glyphs
            .get(&c)
            .cloned()
            .ok_or(Error::MissingGlyph { glyph: c })
    }
}

/// Pixel height at which outline glyphs are rasterized before stretching.
const OUTLINE_PX: f32 = 96.0;

pub struct OutlineFont {
    font: FontVec,
}

impl fmt::Debug for OutlineFont {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("OutlineFont")
            .field("glyphs", &self.font.glyph_count())
            .finish()
    }
}

impl OutlineFont {
    pub fn parse(bytes: Vec<u8>) -> std::result::Result<Self, String> {
        let font = FontVec::try_from_vec(bytes).map_err(|e| e.to_string())?;
        Ok(Self { font })
    }
}

impl GlyphSource for OutlineFont {
    fn has_glyph(&self, c: char) -> bool {
        self.font.glyph_id(c).0 != 0
    }

    fn coverage(&self, c: char) -> Result<Coverage> {
        let missing = Error::MissingGlyph { glyph: c };
        if !self.has_glyph(c) {
            return Err(missing);
        }
        let glyph = self.font.glyph_id(c).with_scale(PxScale::from(OUTLINE_PX));
        let outlined = self.font.outline_glyph(glyph).ok_or(missing)?;
        let bounds = outlined.px_bounds();
        let width = bounds.width().ceil() as usize;
        let height = bounds.height().ceil() as usize;
        let mut values = vec![0.0f32; width * height];
        outlined.draw(|x, y, v| {
            let (x, y) = (x as usize, y as usize);
            if x < width && y < height {
                values[y * width + x] = v.clamp(0.0, 1.0);
            }
        });
        Coverage {
            width,
            height,
            values,
        }
        .trimmed()
        .ok_or(Error::MissingGlyph { glyph: c })
    }
}

/// Load a font file, choosing the parser by extension (`.hex` for bitmaps,
/// anything else as TrueType/OpenType).
pub fn load_font(path: &Path) -> Result<Arc<dyn GlyphSource>> {
    let fail = |reason: String| Error::FontLoad {
        path: path.to_path_buf(),
        reason,
    };
    let bytes = std::fs::read(path).map_err(|e| fail(e.to_string()))?;
    let is_hex = path
        .extension()
        .is_some_and(|e| e.eq_ignore_ascii_case("hex"));
    if is_hex {
        let text = String::from_utf8(bytes).map_err(|e| fail(e.to_string()))?;
        Ok(Arc::new(HexFont::parse(&text).map_err(fail)?))
    } else {
        Ok(Arc::new(OutlineFont::parse(bytes).map_err(fail)?))
    }
}

pub(crate) const BUNDLED_PROVINCES: &str = include_str!("../../../assets/fonts/provinces.hex");
pub(crate) const BUNDLED_LATIN: &[u8] = include_bytes!("../../../assets/fonts/latin-bold.ttf");

/// The province and Latin fonts shipped with the repository.
pub fn bundled_fonts() -> (Arc<dyn GlyphSource>, Arc<dyn GlyphSource>) {
    let provinces = HexFont::parse(BUNDLED_PROVINCES).expect("bundled hex font parses");
    let latin = OutlineFont::parse(BUNDLED_LATIN.to_vec()).expect("bundled outline font parses");
    (Arc::new(provinces), Arc::new(latin))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::alphabet::{PlateAlphabet, DIGITS, LETTERS, PROVINCES};

    #[test]
    fn bundled_fonts_cover_the_alphabet() {
        let (prov, latin) = bundled_fonts();
        for c in PROVINCES {
            assert!(prov.has_glyph(c), "{c}");
            let cov = prov.coverage(c).unwrap();
            assert!(cov.width > 4 && cov.height > 4);
        }
        for c in LETTERS.iter().chain(DIGITS.iter()) {
            let cov = latin.coverage(*c).unwrap();
            assert!(cov.values.iter().any(|&v| v > 0.5), "{c}");
        }
        assert_eq!(PlateAlphabet.glyphs().count(), 67);
    }

    #[test]
    fn missing_glyph_is_reported() {
        let (prov, latin) = bundled_fonts();
        assert!(matches!(
            prov.coverage('A'),
            Err(Error::MissingGlyph { glyph: 'A' })
        ));
        assert!(matches!(
            latin.coverage('京'),
            Err(Error::MissingGlyph { .. })
        ));
    }

    #[test]
    fn hex_parser_reads_narrow_glyph_and_trims() {
        // 8x16 glyph with a single vertical bar in column 3, rows 4..=11.
        let mut bits = String::new();
        for row in 0..16 {
            bits.push_str(if (4..12).contains(&row) { "10" } else { "00" });
        }
        let font = HexFont::parse(&format!("0031:{bits}\n")).unwrap();
        let cov = font.coverage('1').unwrap();
        assert_eq!((cov.width, cov.height), (1, 8));
        assert!(cov.values.iter().all(|&v| v == 1.0));
    }

    #[test]
    fn hex_parser_rejects_garbage() {
        assert!(HexFont::parse("zz").is_err());
        assert!(HexFont::parse("0041:00FF").is_err());
        assert!(HexFont::parse("").is_err());
    }

    #[test]
    fn load_font_errors() {
        let dir = tempfile::tempdir().unwrap();
        let missing = dir.path().join("nope.ttf");
        assert!(matches!(load_font(&missing), Err(Error::FontLoad { .. })));
        let junk = dir.path().join("junk.ttf");
        std::fs::write(&junk, b"not a font").unwrap();
        assert!(matches!(load_font(&junk), Err(Error::FontLoad { .. })));
    }
}
