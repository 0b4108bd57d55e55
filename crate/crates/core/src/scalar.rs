//! Scalar abstraction for the numeric kernels.
//!
//! Resampling geometry, blur kernels, light ramps and metric fractions are
//! written against [`Real`] so they can run in `f32` or `f64`. The crate root
//! pins the pipeline to one concrete type so that transform logs replay
//! bit-exactly.

use std::fmt::{Debug, Display};
use std::iter::Sum;

use num_traits::{Float, FloatConst, FromPrimitive, ToPrimitive};

pub trait Real:
    Float + FloatConst + FromPrimitive + ToPrimitive + Sum + Debug + Display + Send + Sync + 'static
{
    /// Lossy conversion from `f64`. Parameters are stored as `f64` in logs.
    fn of(v: f64) -> Self {
        Self::from_f64(v).expect("finite f64 is representable")
    }

    fn of_usize(v: usize) -> Self {
        Self::from_usize(v).expect("usize is representable")
    }

    /// Round half away from zero and clamp into the 8-bit sample range.
    #[inline]
    fn to_sample(self) -> u8 {
        // Truncation of v + 0.5 equals rounding for the positive values that
        // survive the clamp, and avoids a libm call per sample.
        let v = self + Self::of(0.5);
        if v.is_nan() || v < Self::one() {
            0
        } else if v >= Self::of(255.0) {
            255
        } else {
            v.to_u8().unwrap_or(255)
        }
    }

    /// `floor` as an index, for finite non-negative values.
    #[inline]
    fn index_floor(self) -> usize {
        self.floor().to_usize().unwrap_or(0)
    }
}

macro_rules! native_float {
    ($($t:ty)*) => ($(
        impl Real for $t {
            #[inline]
            fn to_sample(self) -> u8 {
                // Saturating cast: negatives and NaN go to 0, overflow to 255.
                (self + 0.5) as u8
            }

            #[inline]
            fn index_floor(self) -> usize {
                self as usize
            }
        }
    )*)
}

native_float!(f32 f64);
