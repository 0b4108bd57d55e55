//! Scripted plate rendering: blue single-row plates drawn from a label.

use std::fs;
use std::path::{Path, PathBuf};
use std::sync::Arc;

use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::alphabet::{sample_label, PlateAlphabet, PlateLabel, PLATE_LEN};
use crate::error::{Error, Result};
use crate::font::{bundled_fonts, load_font, Coverage, GlyphSource};
use crate::image::ImageBuffer;
use crate::manifest::{Manifest, ManifestRecord, SourceTag};
use crate::seed;

/// Axis-aligned pixel rectangle.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Cell {
    pub x: usize,
    pub y: usize,
    pub w: usize,
    pub h: usize,
}

impl Cell {
    pub const fn new(x: usize, y: usize, w: usize, h: usize) -> Self {
        Self { x, y, w, h }
    }

    fn overlaps(&self, other: &Cell) -> bool {
        self.x < other.x + other.w
            && other.x < self.x + self.w
            && self.y < other.y + other.h
            && other.y < self.y + self.h
    }

    fn inside(&self, w: usize, h: usize) -> bool {
        self.w > 0 && self.h > 0 && self.x + self.w <= w && self.y + self.h <= h
    }
}

pub const CANVAS_W: usize = 440;
pub const CANVAS_H: usize = 140;
pub const BLUE_PLATE: [u8; 3] = [0x0d, 0x3b, 0xa8];
pub const WHITE: [u8; 3] = [0xff, 0xff, 0xff];

/// Glyph cells of a 440×140 single-row plate (1 px per mm).
pub const STANDARD_CELLS: [Cell; PLATE_LEN] = [
    Cell::new(15, 25, 45, 90),
    Cell::new(72, 25, 45, 90),
    Cell::new(151, 25, 45, 90),
    Cell::new(208, 25, 45, 90),
    Cell::new(265, 25, 45, 90),
    Cell::new(322, 25, 45, 90),
    Cell::new(379, 25, 45, 90),
];

/// Glyphs are drawn this far inside their cell, leaving room for jitter.
const GLYPH_MARGIN: usize = 3;
const MAX_JITTER: i64 = 2;
const FRAME_INSET: usize = 5;
const FRAME_WIDTH: usize = 3;
const DOT_RADIUS: f64 = 5.0;

/// Serializable form of a [`RenderSpec`]; fonts are referenced by path and
/// default to the bundled pair when absent.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RenderConfig {
    pub canvas_w: usize,
    pub canvas_h: usize,
    pub background_color: [u8; 3],
    pub glyph_color: [u8; 3],
    pub font_province: Option<PathBuf>,
    pub font_latin: Option<PathBuf>,
    pub cells: Vec<Cell>,
}

impl Default for RenderConfig {
    fn default() -> Self {
        Self {
            canvas_w: CANVAS_W,
            canvas_h: CANVAS_H,
            background_color: BLUE_PLATE,
            glyph_color: WHITE,
            font_province: None,
            font_latin: None,
            cells: STANDARD_CELLS.to_vec(),
        }
    }
}

#[derive(Debug, Clone)]
pub struct RenderSpec {
    canvas_w: usize,
    canvas_h: usize,
    background: [u8; 3],
    glyph_color: [u8; 3],
    font_province: Arc<dyn GlyphSource>,
    font_latin: Arc<dyn GlyphSource>,
    cells: [Cell; PLATE_LEN],
}

impl RenderSpec {
    /// Standard blue plate with the bundled fonts.
    pub fn standard() -> Self {
        Self::from_config(&RenderConfig::default()).expect("default config is valid")
    }

    pub fn from_config(config: &RenderConfig) -> Result<Self> {
        let (bundled_province, bundled_latin) = bundled_fonts();
        let font_province = match &config.font_province {
            Some(p) => load_font(p)?,
            None => bundled_province,
        };
        let font_latin = match &config.font_latin {
            Some(p) => load_font(p)?,
            None => bundled_latin,
        };
        let cells: [Cell; PLATE_LEN] =
            config.cells.clone().try_into().map_err(|c: Vec<Cell>| {
                Error::InvalidRenderSpec(format!("expected {PLATE_LEN} cells, got {}", c.len()))
            })?;
        Self::new(
            config.canvas_w,
            config.canvas_h,
            config.background_color,
            config.glyph_color,
            font_province,
            font_latin,
            cells,
        )
    }

    pub fn new(
        canvas_w: usize,
        canvas_h: usize,
        background: [u8; 3],
        glyph_color: [u8; 3],
        font_province: Arc<dyn GlyphSource>,
        font_latin: Arc<dyn GlyphSource>,
        cells: [Cell; PLATE_LEN],
    ) -> Result<Self> {
        for (i, c) in cells.iter().enumerate() {
            if !c.inside(canvas_w, canvas_h) {
                return Err(Error::InvalidRenderSpec(format!(
                    "cell {} {c:?} exceeds the {canvas_w}x{canvas_h} canvas",
                    i + 1
                )));
            }
            if c.w <= 2 * GLYPH_MARGIN || c.h <= 2 * GLYPH_MARGIN {
                return Err(Error::InvalidRenderSpec(format!(
                    "cell {} too small",
                    i + 1
                )));
            }
            for (j, d) in cells.iter().enumerate().skip(i + 1) {
                if c.overlaps(d) {
                    return Err(Error::InvalidRenderSpec(format!(
                        "cells {} and {} overlap",
                        i + 1,
                        j + 1
                    )));
                }
            }
        }
        if background == glyph_color {
            return Err(Error::InvalidRenderSpec(
                "background and glyph colors are identical".into(),
            ));
        }
        Ok(Self {
            canvas_w,
            canvas_h,
            background,
            glyph_color,
            font_province,
            font_latin,
            cells,
        })
    }

    pub fn canvas(&self) -> (usize, usize) {
        (self.canvas_w, self.canvas_h)
    }

    pub fn background(&self) -> [u8; 3] {
        self.background
    }

    pub fn glyph_color(&self) -> [u8; 3] {
        self.glyph_color
    }

    pub fn cells(&self) -> &[Cell; PLATE_LEN] {
        &self.cells
    }

    fn font_for(&self, glyph: char) -> &dyn GlyphSource {
        if PlateAlphabet.is_province(glyph) {
            self.font_province.as_ref()
        } else {
            self.font_latin.as_ref()
        }
    }

    /// Fail early if either font lacks a glyph the alphabet can produce.
    pub fn check_fonts(&self) -> Result<()> {
        for g in PlateAlphabet.glyphs() {
            if !self.font_for(g).has_glyph(g) {
                return Err(Error::MissingGlyph { glyph: g });
            }
        }
        Ok(())
    }
}

fn blend(bg: [u8; 3], fg: [u8; 3], alpha: f32) -> [u8; 3] {
    let mut out = [0u8; 3];
    for c in 0..3 {
        let v = bg[c] as f32 + (fg[c] as f32 - bg[c] as f32) * alpha;
        out[c] = v.round().clamp(0.0, 255.0) as u8;
    }
    out
}

/// Bilinear lookup of a coverage map at continuous coordinates, clamped.
fn coverage_at(cov: &Coverage, u: f32, v: f32) -> f32 {
    let u = u.clamp(0.0, (cov.width - 1) as f32);
    let v = v.clamp(0.0, (cov.height - 1) as f32);
    let (x0, y0) = (u.floor() as usize, v.floor() as usize);
    let (x1, y1) = ((x0 + 1).min(cov.width - 1), (y0 + 1).min(cov.height - 1));
    let (fx, fy) = (u - x0 as f32, v - y0 as f32);
    let top = cov.at(x0, y0) * (1.0 - fx) + cov.at(x1, y0) * fx;
    let bottom = cov.at(x0, y1) * (1.0 - fx) + cov.at(x1, y1) * fx;
    top * (1.0 - fy) + bottom * fy
}

/// Steepened coverage-to-alpha curve: upscaled bitmap strokes would
/// otherwise blur into mostly partial coverage.
fn glyph_alpha(coverage: f32) -> f32 {
    ((coverage - 0.2) / 0.5).clamp(0.0, 1.0)
}

fn stamp_glyph(img: &mut ImageBuffer, cell: Cell, cov: &Coverage, fg: [u8; 3], jitter: (i64, i64)) {
    let bw = cell.w - 2 * GLYPH_MARGIN;
    let bh = cell.h - 2 * GLYPH_MARGIN;
    let bx = cell.x as i64 + GLYPH_MARGIN as i64 + jitter.0;
    let by = cell.y as i64 + GLYPH_MARGIN as i64 + jitter.1;
    let sx = cov.width as f32 / bw as f32;
    let sy = cov.height as f32 / bh as f32;
    for py in 0..bh {
        let y = by + py as i64;
        if y < cell.y as i64 || y >= (cell.y + cell.h) as i64 {
            continue;
        }
        let v = (py as f32 + 0.5) * sy - 0.5;
        for px in 0..bw {
            let x = bx + px as i64;
            if x < cell.x as i64 || x >= (cell.x + cell.w) as i64 {
                continue;
            }
            let u = (px as f32 + 0.5) * sx - 0.5;
            let a = glyph_alpha(coverage_at(cov, u, v));
            if a > 0.0 {
                let p = img.pixel_mut(x as usize, y as usize);
                let bg = [p[0], p[1], p[2]];
                p.copy_from_slice(&blend(bg, fg, a));
            }
        }
    }
}

fn draw_frame(img: &mut ImageBuffer, color: [u8; 3]) {
    let (w, h) = img.dimensions();
    if w <= 2 * (FRAME_INSET + FRAME_WIDTH) || h <= 2 * (FRAME_INSET + FRAME_WIDTH) {
        return;
    }
    for y in FRAME_INSET..h - FRAME_INSET {
        for x in FRAME_INSET..w - FRAME_INSET {
            let edge = x < FRAME_INSET + FRAME_WIDTH
                || x >= w - FRAME_INSET - FRAME_WIDTH
                || y < FRAME_INSET + FRAME_WIDTH
                || y >= h - FRAME_INSET - FRAME_WIDTH;
            if edge {
                img.pixel_mut(x, y).copy_from_slice(&color);
            }
        }
    }
}

/// Separator dot centred in the gap between cells 2 and 3.
fn draw_separator(img: &mut ImageBuffer, left: Cell, right: Cell, color: [u8; 3]) {
    let gap_start = left.x + left.w;
    if right.x <= gap_start {
        return;
    }
    let cx = (gap_start + right.x) as f64 / 2.0 - 0.5;
    let cy = (left.y + left.h / 2) as f64 - 0.5;
    let r = DOT_RADIUS.min((right.x - gap_start) as f64 / 2.0 - 1.0);
    if r <= 0.0 {
        return;
    }
    let (w, h) = img.dimensions();
    for y in 0..h {
        for x in gap_start..right.x.min(w) {
            let (dx, dy) = (x as f64 - cx, y as f64 - cy);
            if dx * dx + dy * dy <= r * r {
                img.pixel_mut(x, y).copy_from_slice(&color);
            }
        }
    }
}

/// Draw `label` onto a fresh canvas. Glyph placement jitters by up to two
/// pixels per glyph, drawn from `seed`.
pub fn render_plate(label: &PlateLabel, spec: &RenderSpec, seed: u64) -> Result<ImageBuffer> {
    let mut rng = seed::rng(seed::mix64(seed, 1));
    let mut img = ImageBuffer::filled(spec.canvas_w, spec.canvas_h, &spec.background);
    draw_frame(&mut img, spec.glyph_color);
    draw_separator(&mut img, spec.cells[1], spec.cells[2], spec.glyph_color);
    for (glyph, cell) in label.glyphs().zip(spec.cells.iter()) {
        let cov = spec.font_for(glyph).coverage(glyph)?;
        let jitter = (
            rng.random_range(-MAX_JITTER..=MAX_JITTER),
            rng.random_range(-MAX_JITTER..=MAX_JITTER),
        );
        stamp_glyph(&mut img, *cell, &cov, spec.glyph_color, jitter);
    }
    Ok(img)
}

/// File name stem and id of record `index` in a scripted batch.
pub fn script_id(index: usize) -> String {
    format!("script-{index:06}")
}

/// Render `count` labelled plates into `out_dir/images/`.
///
/// Record `i` uses seed `mix64(master_seed, i)` for both its label and its
/// rendering, so any subset of a batch can be regenerated independently.
/// Records come back in index order regardless of scheduling.
pub fn batch_render(
    count: usize,
    master_seed: u64,
    spec: &RenderSpec,
    out_dir: &Path,
) -> Result<Manifest> {
    spec.check_fonts()?;
    let images = out_dir.join("images");
    fs::create_dir_all(&images)
        .map_err(|e| Error::io(format!("create {}", images.display()), e))?;
    let records = (0..count)
        .into_par_iter()
        .map(|i| {
            let seed = seed::mix64(master_seed, i as u64);
            let label = sample_label(seed, &PlateAlphabet);
            let img = render_plate(&label, spec, seed)?;
            let id = script_id(i);
            let rel = format!("images/{id}.png");
            img.save_png(&out_dir.join(&rel))?;
            Ok(ManifestRecord::new(id, rel, label, SourceTag::Script, seed))
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(Manifest::new(out_dir, records))
}
