//! Adaptive Gauss-Kronrod (7/15) quadrature over piecewise-smooth integrands.
//!
//! Callers pass the kink locations as breakpoints so that no panel straddles
//! a change of functional form.

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use crate::error::QuadratureError;

const KRONROD_NODES: [f64; 8] = [
    0.991_455_371_120_812_639_206_854_697_526_329,
    0.949_107_912_342_758_524_526_189_684_047_851,
    0.864_864_423_359_769_072_789_712_788_640_926,
    0.741_531_185_599_394_439_863_864_773_280_788,
    0.586_087_235_467_691_130_294_144_845_693_013,
    0.405_845_151_377_397_166_906_606_412_076_961,
    0.207_784_955_007_898_467_600_689_403_773_245,
    0.0,
];

const KRONROD_WEIGHTS: [f64; 8] = [
    0.022_935_322_010_529_224_963_732_008_058_970,
    0.063_092_092_629_978_553_290_700_663_189_204,
    0.104_790_010_322_250_183_839_876_322_541_518,
    0.140_653_259_715_525_918_745_189_590_510_238,
    0.169_004_726_639_267_902_826_583_426_598_550,
    0.190_350_578_064_785_409_913_256_402_421_014,
    0.204_432_940_075_298_892_414_161_999_234_649,
    0.209_482_141_084_727_828_012_999_174_891_714,
];

// Gauss weights for the odd-indexed Kronrod nodes (1, 3, 5, 7).
const GAUSS_WEIGHTS: [f64; 4] = [
    0.129_484_966_168_869_693_270_611_432_679_082,
    0.279_705_391_489_276_667_901_467_771_423_780,
    0.381_830_050_505_118_944_950_369_775_488_975,
    0.417_959_183_673_469_387_755_102_040_816_327,
];

/// Result of an integration with its error estimate.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Integral {
    pub value: f64,
    pub error: f64,
}

#[derive(Debug, Clone, Copy)]
pub struct QuadratureOptions {
    pub absolute_tolerance: f64,
    pub max_subdivisions: usize,
}

impl Default for QuadratureOptions {
    fn default() -> Self {
        Self {
            absolute_tolerance: 1e-10,
            max_subdivisions: 4000,
        }
    }
}

impl QuadratureOptions {
    pub fn with_tolerance(absolute_tolerance: f64) -> Self {
        Self {
            absolute_tolerance,
            ..Self::default()
        }
    }
}

#[derive(Debug, Clone, Copy)]
struct Panel {
    lower: f64,
    upper: f64,
    value: f64,
    error: f64,
}

impl PartialEq for Panel {
    fn eq(&self, other: &Self) -> bool {
        self.error.total_cmp(&other.error) == Ordering::Equal
    }
}

impl Eq for Panel {}

impl PartialOrd for Panel {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Panel {
    fn cmp(&self, other: &Self) -> Ordering {
        self.error.total_cmp(&other.error)
    }
}

fn kronrod_panel<F>(f: &mut F, lower: f64, upper: f64) -> Result<Panel, QuadratureError>
where
    F: FnMut(f64) -> f64,
{
    let centre = 0.5 * (lower + upper);
    let half = 0.5 * (upper - lower);
    let mut eval = |x: f64| {
        let y = f(x);
        if y.is_finite() {
            Ok(y)
        } else {
            Err(QuadratureError::NonFinite(x))
        }
    };

    let mid = eval(centre)?;
    let mut kronrod = KRONROD_WEIGHTS[7] * mid;
    let mut gauss = GAUSS_WEIGHTS[3] * mid;
    for (i, (&node, &weight)) in KRONROD_NODES[..7].iter().zip(&KRONROD_WEIGHTS[..7]).enumerate() {
        let dx = half * node;
        let pair = eval(centre - dx)? + eval(centre + dx)?;
        kronrod += weight * pair;
        if i % 2 == 1 {
            gauss += GAUSS_WEIGHTS[i / 2] * pair;
        }
    }
    Ok(Panel {
        lower,
        upper,
        value: kronrod * half,
        error: ((kronrod - gauss) * half).abs(),
    })
}

/// Integrates `f` over `[breakpoints[0], breakpoints[last]]`, starting from
/// one panel per consecutive pair of breakpoints and bisecting the panel
/// with the largest error until the total estimate meets the tolerance.
pub fn integrate<F>(
    mut f: F,
    breakpoints: &[f64],
    options: QuadratureOptions,
) -> Result<Integral, QuadratureError>
where
    F: FnMut(f64) -> f64,
{
    let mut heap = BinaryHeap::new();
    for pair in breakpoints.windows(2) {
        if pair[1] > pair[0] {
            heap.push(kronrod_panel(&mut f, pair[0], pair[1])?);
        }
    }
    let (lower, upper) = match (breakpoints.first(), breakpoints.last()) {
        (Some(&a), Some(&b)) => (a, b),
        _ => (0.0, 0.0),
    };

    let mut subdivisions = 0;
    loop {
        let error: f64 = heap.iter().map(|p| p.error).sum();
        if error <= options.absolute_tolerance {
            let value = neumaier_sum(heap.iter().map(|p| p.value));
            return Ok(Integral { value, error });
        }
        if subdivisions >= options.max_subdivisions {
            return Err(QuadratureError::NotConverged {
                lower,
                upper,
                estimate: error,
                tolerance: options.absolute_tolerance,
                subdivisions,
            });
        }
        let worst = heap.pop().expect("error > 0 implies a panel");
        let mid = 0.5 * (worst.lower + worst.upper);
        if mid <= worst.lower || mid >= worst.upper {
            // panel cannot be split any further in f64
            return Err(QuadratureError::NotConverged {
                lower,
                upper,
                estimate: error,
                tolerance: options.absolute_tolerance,
                subdivisions,
            });
        }
        heap.push(kronrod_panel(&mut f, worst.lower, mid)?);
        heap.push(kronrod_panel(&mut f, mid, worst.upper)?);
        subdivisions += 1;
    }
}

/// Compensated (Neumaier) summation.
pub fn neumaier_sum<I: IntoIterator<Item = f64>>(values: I) -> f64 {
    let mut sum = 0.0_f64;
    let mut compensation = 0.0_f64;
    for v in values {
        let t = sum + v;
        if sum.abs() >= v.abs() {
            compensation += (sum - t) + v;
        } else {
            compensation += (v - t) + sum;
        }
        sum = t;
    }
    sum + compensation
}
