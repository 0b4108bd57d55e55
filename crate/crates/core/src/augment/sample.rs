//! Scalar-generic resampling kernels shared by the geometric and photometric
//! transforms. All sampling replicates edge pixels.

use crate::image::ImageBuffer;
use crate::scalar::Real;

/// 2×3 affine map `p ↦ M·p + t`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Affine2<R> {
    pub m: [[R; 2]; 2],
    pub t: [R; 2],
}

impl<R: Real> Affine2<R> {
    pub fn identity() -> Self {
        Self {
            m: [[R::one(), R::zero()], [R::zero(), R::one()]],
            t: [R::zero(), R::zero()],
        }
    }

    /// Linear part `A` applied about `center`, then shifted by `shift`:
    /// `p ↦ center + A·(p − center) + shift`.
    pub fn about(a: [[R; 2]; 2], center: [R; 2], shift: [R; 2]) -> Self {
        let ac = [
            a[0][0] * center[0] + a[0][1] * center[1],
            a[1][0] * center[0] + a[1][1] * center[1],
        ];
        Self {
            m: a,
            t: [center[0] - ac[0] + shift[0], center[1] - ac[1] + shift[1]],
        }
    }

    /// `Rot(θ) · Shear_x · Scale`. With y pointing down, positive angles turn
    /// content clockwise on screen.
    pub fn linear_part(rotation_rad: R, shear: R, scale: R) -> [[R; 2]; 2] {
        let (s, c) = rotation_rad.sin_cos();
        [
            [c * scale, (c * shear - s) * scale],
            [s * scale, (s * shear + c) * scale],
        ]
    }

    pub fn apply(&self, p: [R; 2]) -> [R; 2] {
        [
            self.m[0][0] * p[0] + self.m[0][1] * p[1] + self.t[0],
            self.m[1][0] * p[0] + self.m[1][1] * p[1] + self.t[1],
        ]
    }

    pub fn inverse(&self) -> Option<Self> {
        let [[a, b], [c, d]] = self.m;
        let det = a * d - b * c;
        if det == R::zero() || !det.is_finite() {
            return None;
        }
        let inv = [[d / det, -b / det], [-c / det, a / det]];
        let t = [
            -(inv[0][0] * self.t[0] + inv[0][1] * self.t[1]),
            -(inv[1][0] * self.t[0] + inv[1][1] * self.t[1]),
        ];
        Some(Self { m: inv, t })
    }

    pub fn compose(&self, then: &Self) -> Self {
        let m = [
            [
                then.m[0][0] * self.m[0][0] + then.m[0][1] * self.m[1][0],
                then.m[0][0] * self.m[0][1] + then.m[0][1] * self.m[1][1],
            ],
            [
                then.m[1][0] * self.m[0][0] + then.m[1][1] * self.m[1][0],
                then.m[1][0] * self.m[0][1] + then.m[1][1] * self.m[1][1],
            ],
        ];
        Self {
            m,
            t: then.apply(self.t),
        }
    }
}

/// Image center in pixel-index coordinates.
pub fn center<R: Real>(img: &ImageBuffer) -> [R; 2] {
    let two = R::of(2.0);
    [
        R::of_usize(img.width() - 1) / two,
        R::of_usize(img.height() - 1) / two,
    ]
}

/// `u8 → R` conversion table.
pub(crate) fn sample_lut<R: Real>() -> [R; 256] {
    std::array::from_fn(|v| R::of_usize(v))
}

/// Fractional bits of fixed-point sampling positions.
const POS_BITS: u32 = 16;
/// Bits of each bilinear weight; the four weights of a pixel sum to
/// `1 << 2 * WEIGHT_BITS`.
const WEIGHT_BITS: u32 = 8;
const WEIGHT_ONE: u32 = 1 << WEIGHT_BITS;
/// Far outside any image, so clamping stays exact.
const POS_LIMIT: f64 = 1e9;

/// Position in 16.16 fixed point, rounded. NaN lands on the low edge.
fn to_fixed<R: Real>(v: R) -> i64 {
    let limit = R::of(POS_LIMIT);
    let clamped = v.max(-limit).min(limit);
    (clamped * R::of_usize(1 << POS_BITS))
        .round()
        .to_i64()
        .unwrap_or(0)
}

/// Clamp-to-edge bilinear tap along one axis: `(i0, i1, weight of i1)`.
#[inline(always)]
fn axis_tap(pos: i64, len: usize) -> (usize, usize, u32) {
    let c = pos.clamp(0, ((len - 1) as i64) << POS_BITS);
    let i0 = (c >> POS_BITS) as usize;
    let i1 = (i0 + 1).min(len - 1);
    let f = ((c >> (POS_BITS - WEIGHT_BITS)) as u32) & (WEIGHT_ONE - 1);
    (i0, i1, f)
}

/// Bilinear interpolation of every channel between four source pixels
/// given by sample offsets, rounded into `out`.
#[inline(always)]
fn blend4<const CH: usize>(src: &[u8], offsets: [usize; 4], fx: u32, fy: u32, out: &mut [u8]) {
    let (gx, gy) = (WEIGHT_ONE - fx, WEIGHT_ONE - fy);
    let weights = [gx * gy, fx * gy, gx * fy, fx * fy];
    let half = 1u32 << (2 * WEIGHT_BITS - 1);
    let mut acc = [half; CH];
    for (&o, &wt) in offsets.iter().zip(&weights) {
        let px = &src[o..o + CH];
        for c in 0..CH {
            acc[c] += px[c] as u32 * wt;
        }
    }
    for c in 0..CH {
        out[c] = (acc[c] >> (2 * WEIGHT_BITS)) as u8;
    }
}

fn warp_rows<const CH: usize>(
    img: &ImageBuffer,
    out: &mut [u8],
    row_start: impl Fn(usize) -> [i64; 2],
    step: [i64; 2],
) {
    let (w, h) = img.dimensions();
    let src = img.samples();
    for (y, row) in out.chunks_exact_mut(w * CH).enumerate() {
        let [mut sx, mut sy] = row_start(y);
        for px in row.chunks_exact_mut(CH) {
            let (x0, x1, fx) = axis_tap(sx, w);
            let (y0, y1, fy) = axis_tap(sy, h);
            let at = |x: usize, y: usize| (y * w + x) * CH;
            blend4::<CH>(
                src,
                [at(x0, y0), at(x1, y0), at(x0, y1), at(x1, y1)],
                fx,
                fy,
                px,
            );
            sx += step[0];
            sy += step[1];
        }
    }
}

/// Inverse-map warp: output pixel `p` takes the bilinear sample of the
/// source at `inverse(p)`. Positions are evaluated in `R` at the start of
/// each row and advanced in fixed point along it.
pub fn warp<R: Real>(img: &ImageBuffer, inverse: &Affine2<R>) -> ImageBuffer {
    let mut out = vec![0u8; img.samples().len()];
    let start = |y: usize| inverse.apply([R::zero(), R::of_usize(y)]).map(to_fixed);
    let step = [to_fixed(inverse.m[0][0]), to_fixed(inverse.m[1][0])];
    if inverse.m[0][1] == R::zero() && inverse.m[1][0] == R::zero() {
        // Axis-aligned: source x depends only on x and source y only on y.
        let (w, h) = img.dimensions();
        let x0 = start(0)[0];
        let xs: Vec<_> = (0..w as i64)
            .map(|x| axis_tap(x0 + x * step[0], w))
            .collect();
        let ys: Vec<_> = (0..h).map(|y| axis_tap(start(y)[1], h)).collect();
        if img.channels() == 1 {
            resize_rows::<1>(img, &mut out, &xs, &ys);
        } else {
            resize_rows::<3>(img, &mut out, &xs, &ys);
        }
        return img.with_samples(out);
    }
    if img.channels() == 1 {
        warp_rows::<1>(img, &mut out, start, step);
    } else {
        warp_rows::<3>(img, &mut out, start, step);
    }
    img.with_samples(out)
}

/// Warp by the forward map `forward`; `None` when it is singular.
pub fn warp_affine<R: Real>(img: &ImageBuffer, forward: &Affine2<R>) -> Option<ImageBuffer> {
    let inv = forward.inverse()?;
    Some(warp(img, &inv))
}

/// Half-pixel-center taps for resampling `src_len` onto `dst_len`.
fn resize_taps<R: Real>(src_len: usize, dst_len: usize) -> Vec<(usize, usize, u32)> {
    let half = R::of(0.5);
    let scale = R::of_usize(src_len) / R::of_usize(dst_len);
    (0..dst_len)
        .map(|i| axis_tap(to_fixed((R::of_usize(i) + half) * scale - half), src_len))
        .collect()
}

/// Separable form of `blend4`: each source row is interpolated along x
/// into 16-bit partial sums, then row pairs are blended along y. The
/// integer arithmetic is the same as the two-dimensional blend.
fn resize_rows<const CH: usize>(
    img: &ImageBuffer,
    out: &mut [u8],
    xs: &[(usize, usize, u32)],
    ys: &[(usize, usize, u32)],
) {
    let src = img.samples();
    let row_len = xs.len() * CH;
    let mut horizontal = vec![0u16; img.height() * row_len];
    for (dst, row) in horizontal
        .chunks_exact_mut(row_len)
        .zip(src.chunks_exact(img.width() * CH))
    {
        for (px, &(x0, x1, fx)) in dst.chunks_exact_mut(CH).zip(xs) {
            let gx = WEIGHT_ONE - fx;
            for c in 0..CH {
                let v = u32::from(row[x0 * CH + c]) * gx + u32::from(row[x1 * CH + c]) * fx;
                px[c] = v as u16;
            }
        }
    }
    let half = 1u32 << (2 * WEIGHT_BITS - 1);
    for (dst, &(y0, y1, fy)) in out.chunks_exact_mut(row_len).zip(ys) {
        let gy = WEIGHT_ONE - fy;
        let a = &horizontal[y0 * row_len..(y0 + 1) * row_len];
        let b = &horizontal[y1 * row_len..(y1 + 1) * row_len];
        for ((d, &va), &vb) in dst.iter_mut().zip(a).zip(b) {
            *d = ((u32::from(va) * gy + u32::from(vb) * fy + half) >> (2 * WEIGHT_BITS)) as u8;
        }
    }
}

/// Bilinear resize with half-pixel centers. Same-size resizes are exact
/// copies.
pub fn resize_bilinear<R: Real>(img: &ImageBuffer, width: usize, height: usize) -> ImageBuffer {
    assert!(width > 0 && height > 0);
    if (width, height) == img.dimensions() {
        return img.clone();
    }
    let xs = resize_taps::<R>(img.width(), width);
    let ys = resize_taps::<R>(img.height(), height);
    let mut out = vec![0u8; width * height * img.channels() as usize];
    if img.channels() == 1 {
        resize_rows::<1>(img, &mut out, &xs, &ys);
    } else {
        resize_rows::<3>(img, &mut out, &xs, &ys);
    }
    ImageBuffer::new(width, height, img.channels(), out).expect("sized")
}

/// Copy of `img` as `R` samples with `left/right/top/bottom` pixels of edge
/// replication. Returns the padded plane and its width in pixels.
pub(crate) fn pad_replicate<T: Copy>(
    img: &ImageBuffer,
    [left, right, top, bottom]: [usize; 4],
    convert: impl Fn(u8) -> T,
) -> (Vec<T>, usize) {
    let (w, h) = img.dimensions();
    let ch = img.channels() as usize;
    let pw = w + left + right;
    let ph = h + top + bottom;
    let src = img.samples();
    let mut out = Vec::with_capacity(pw * ph * ch);
    for py in 0..ph {
        let sy = py.saturating_sub(top).min(h - 1);
        let row = &src[sy * w * ch..(sy + 1) * w * ch];
        for _ in 0..left {
            out.extend(row[..ch].iter().map(|&v| convert(v)));
        }
        out.extend(row.iter().map(|&v| convert(v)));
        for _ in 0..right {
            out.extend(row[(w - 1) * ch..].iter().map(|&v| convert(v)));
        }
    }
    (out, pw)
}

/// Fractional bits of fixed-point kernel weights.
const KERNEL_BITS: u32 = 16;

/// Sparse convolution kernel on the integer grid.
#[derive(Debug, Clone, PartialEq)]
pub struct SparseKernel<R> {
    /// `(dx, dy, weight)`; offsets are unique.
    pub taps: Vec<(i64, i64, R)>,
}

impl<R: Real> SparseKernel<R> {
    pub fn sum(&self) -> R {
        self.taps.iter().map(|t| t.2).sum()
    }

    /// Weights in fixed point with `KERNEL_BITS` fractional bits. Rounding
    /// residue goes to the taps with the largest remainders, so the fixed
    /// weights sum to the rounded fixed sum.
    fn fixed_weights(&self) -> Vec<i32> {
        let one = R::of_usize(1 << KERNEL_BITS);
        let scaled: Vec<R> = self.taps.iter().map(|t| t.2 * one).collect();
        let mut fixed: Vec<i64> = scaled
            .iter()
            .map(|v| v.floor().to_i64().unwrap_or(0))
            .collect();
        let target = scaled
            .iter()
            .copied()
            .sum::<R>()
            .round()
            .to_i64()
            .unwrap_or(0);
        let mut order: Vec<usize> = (0..fixed.len()).collect();
        order.sort_by(|&a, &b| {
            let ra = scaled[a] - scaled[a].floor();
            let rb = scaled[b] - scaled[b].floor();
            rb.partial_cmp(&ra)
                .unwrap_or(std::cmp::Ordering::Equal)
                .then(a.cmp(&b))
        });
        let residue = target - fixed.iter().sum::<i64>();
        for &i in order.iter().cycle().take(residue.max(0) as usize) {
            fixed[i] += 1;
        }
        fixed.into_iter().map(|v| v as i32).collect()
    }

    /// Correlate with clamp-to-edge borders:
    /// `out(x, y) = Σ w · in(x + dx, y + dy)`, accumulated in fixed point.
    ///
    /// # Panics
    ///
    /// If the absolute weights sum above 64.
    pub fn apply(&self, img: &ImageBuffer) -> ImageBuffer {
        let weights = self.fixed_weights();
        let magnitude: i64 = weights.iter().map(|&v| i64::from(v).abs()).sum();
        assert!(magnitude <= 64 << KERNEL_BITS, "kernel weights too large");
        let reach = |f: fn(&(i64, i64, R)) -> i64| {
            self.taps.iter().map(f).max().unwrap_or(0).max(0) as usize
        };
        let left = reach(|t| -t.0);
        let right = reach(|t| t.0);
        let top = reach(|t| -t.1);
        let bottom = reach(|t| t.1);
        let pad = [left, right, top, bottom];
        let offsets: Vec<(usize, usize)> = self
            .taps
            .iter()
            .map(|t| ((top as i64 + t.1) as usize, (left as i64 + t.0) as usize))
            .collect();
        let half = 1i32 << (KERNEL_BITS - 1);
        // Below this bound every partial sum is an integer under 2^24, which
        // f32 holds exactly; f32 multiplies vectorize better than i32 ones.
        let out = if magnitude <= 1 << KERNEL_BITS {
            let narrow: Vec<f32> = weights.iter().map(|&v| v as f32).collect();
            let (padded, pw) = pad_replicate(img, pad, f32::from);
            correlate(&padded, pw, img, &offsets, &narrow, half as f32, |a| {
                a as i32
            })
        } else {
            let (padded, pw) = pad_replicate(img, pad, i32::from);
            correlate(&padded, pw, img, &offsets, &weights, half, |a| a)
        };
        img.with_samples(out)
    }
}

/// Fixed-point correlation over a padded plane; `offsets` are each tap's
/// `(row, column)` in the plane relative to output `(0, 0)`. Sums are
/// integers; `T` only needs to hold them exactly.
fn correlate<T>(
    padded: &[T],
    pw: usize,
    img: &ImageBuffer,
    offsets: &[(usize, usize)],
    weights: &[T],
    half: T,
    finish: impl Fn(T) -> i32,
) -> Vec<u8>
where
    T: Copy + std::ops::Mul<Output = T> + std::ops::AddAssign,
{
    let (w, h) = img.dimensions();
    let ch = img.channels() as usize;
    let mut out = vec![0u8; w * h * ch];
    let mut acc = vec![half; w * ch];
    for (y, dst_row) in out.chunks_exact_mut(w * ch).enumerate() {
        acc.fill(half);
        for (&(row, col), &weight) in offsets.iter().zip(weights) {
            let start = ((row + y) * pw + col) * ch;
            for (a, &s) in acc.iter_mut().zip(&padded[start..start + w * ch]) {
                *a += weight * s;
            }
        }
        for (d, &a) in dst_row.iter_mut().zip(&acc) {
            *d = (finish(a) >> KERNEL_BITS).clamp(0, 255) as u8;
        }
    }
    out
}

/// Normalized line kernel of `length` taps spaced one pixel apart along
/// direction `angle_rad`, centred on the origin. Off-grid taps are split
/// bilinearly onto their four neighbours.
pub fn line_kernel<R: Real>(length: usize, angle_rad: R) -> SparseKernel<R> {
    assert!(length % 2 == 1, "line kernel length must be odd");
    let half = (length / 2) as i64;
    let weight = R::one() / R::of_usize(length);
    let (s, c) = angle_rad.sin_cos();
    let mut taps: Vec<(i64, i64, R)> = Vec::new();
    let mut add = |dx: i64, dy: i64, w: R| {
        if w == R::zero() {
            return;
        }
        match taps.iter_mut().find(|t| t.0 == dx && t.1 == dy) {
            Some(t) => t.2 = t.2 + w,
            None => taps.push((dx, dy, w)),
        }
    };
    for k in -half..=half {
        let kr = R::from_i64(k).expect("i64");
        let (x, y) = (kr * c, kr * s);
        let (x0, y0) = (x.floor(), y.floor());
        let (fx, fy) = (x - x0, y - y0);
        let (ix, iy) = (x0.to_i64().expect("finite"), y0.to_i64().expect("finite"));
        add(ix, iy, weight * (R::one() - fx) * (R::one() - fy));
        add(ix + 1, iy, weight * fx * (R::one() - fy));
        add(ix, iy + 1, weight * (R::one() - fx) * fy);
        add(ix + 1, iy + 1, weight * fx * fy);
    }
    taps.sort_by_key(|t| (t.1, t.0));
    SparseKernel { taps }
}

/// Multiply every pixel by a gain that ramps linearly from `gain_min` to
/// `gain_max` along the projection onto the unit vector at `axis_angle_rad`.
pub fn light_ramp<R: Real>(
    img: &ImageBuffer,
    gain_min: R,
    gain_max: R,
    axis_angle_rad: R,
) -> ImageBuffer {
    let (w, h) = img.dimensions();
    let ch = img.channels() as usize;
    let (s, c) = axis_angle_rad.sin_cos();
    let proj = |x: usize, y: usize| R::of_usize(x) * c + R::of_usize(y) * s;
    let corners = [
        proj(0, 0),
        proj(w - 1, 0),
        proj(0, h - 1),
        proj(w - 1, h - 1),
    ];
    let lo = corners.iter().copied().fold(R::infinity(), R::min);
    let hi = corners.iter().copied().fold(R::neg_infinity(), R::max);
    let span = hi - lo;
    let slope = if span > R::zero() {
        (gain_max - gain_min) / span
    } else {
        R::zero()
    };
    let lut = sample_lut::<R>();
    let src = img.samples();
    let mut out = vec![0u8; src.len()];
    for y in 0..h {
        let base = y * w * ch;
        for x in 0..w {
            let g = gain_min + (proj(x, y) - lo) * slope;
            let i = base + x * ch;
            for k in i..i + ch {
                out[k] = (lut[src[k] as usize] * g).to_sample();
            }
        }
    }
    img.with_samples(out)
}
