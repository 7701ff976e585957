//! Adaptive Gauss-Kronrod (7/15) quadrature for the non-negative integrands
//! that define N-functions through their derivatives.

use std::collections::BinaryHeap;

const XGK: [f64; 8] = [
    0.991_455_371_120_812_639_206_854_697_526_329,
    0.949_107_912_342_758_524_526_189_684_047_851,
    0.864_864_423_359_769_072_789_712_788_640_926,
    0.741_531_185_599_394_439_863_864_773_280_788,
    0.586_087_235_467_691_130_294_144_845_693_013,
    0.405_845_151_377_397_166_906_606_412_076_961,
    0.207_784_955_007_898_467_600_689_403_773_245,
    0.0,
];
const WGK: [f64; 8] = [
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
const WG: [f64; 4] = [
    0.129_484_966_168_869_693_270_611_432_679_082,
    0.279_705_391_489_276_667_901_467_771_423_780,
    0.381_830_050_505_118_944_950_369_775_488_975,
    0.417_959_183_673_469_387_755_102_040_816_327,
];

/// Relative tolerance used for every N-function quadrature in the crate.
pub const REL_TOL: f64 = 1e-13;

const MAX_PANELS: usize = 400;

fn kronrod<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64) -> (f64, f64) {
    let c = 0.5 * (a + b);
    let hw = 0.5 * (b - a);
    let fc = f(c);
    let mut k = fc * WGK[7];
    let mut g = fc * WG[3];
    for j in 0..7 {
        let dx = hw * XGK[j];
        let pair = f(c - dx) + f(c + dx);
        k += WGK[j] * pair;
        if j % 2 == 1 {
            g += WG[j / 2] * pair;
        }
    }
    (k * hw, (k - g).abs() * hw)
}

/// Integrates a non-negative `f` over `[a, b]` to relative accuracy `rel_tol`,
/// bisecting the panel with the largest error estimate first.
pub fn integrate<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64, rel_tol: f64) -> f64 {
    if b <= a {
        return 0.0;
    }
    let (v, e) = kronrod(f, a, b);
    let mut panels = BinaryHeap::from([Panel { lo: a, hi: b, val: v, err: e }]);
    let (mut total, mut err) = (v, e);
    while err > rel_tol * total.abs() && err > 1e-300 && panels.len() < MAX_PANELS {
        let Some(worst) = panels.pop() else { break };
        let mid = 0.5 * (worst.lo + worst.hi);
        if mid <= worst.lo || mid >= worst.hi {
            panels.push(Panel { err: 0.0, ..worst });
            err -= worst.err;
            continue;
        }
        let (v1, e1) = kronrod(f, worst.lo, mid);
        let (v2, e2) = kronrod(f, mid, worst.hi);
        total += v1 + v2 - worst.val;
        err += e1 + e2 - worst.err;
        panels.push(Panel { lo: worst.lo, hi: mid, val: v1, err: e1 });
        panels.push(Panel { lo: mid, hi: worst.hi, val: v2, err: e2 });
    }
    // Re-sum to avoid drift from the running updates.
    panels.iter().map(|p| p.val).sum()
}

struct Panel {
    lo: f64,
    hi: f64,
    val: f64,
    err: f64,
}

impl PartialEq for Panel {
    fn eq(&self, o: &Self) -> bool {
        self.err.total_cmp(&o.err).is_eq()
    }
}
impl Eq for Panel {}
impl PartialOrd for Panel {
    fn partial_cmp(&self, o: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(o))
    }
}
impl Ord for Panel {
    fn cmp(&self, o: &Self) -> std::cmp::Ordering {
        self.err.total_cmp(&o.err)
    }
}

/// Integrates over `[lo, hi]` after splitting at `lo + scale * 2^k`, so that
/// integrands whose behaviour changes at the scale `scale` (shifted N-functions)
/// and then grows like a power are resolved piece by piece.
pub fn integrate_graded<F: Fn(f64) -> f64>(f: &F, lo: f64, hi: f64, scale: f64) -> f64 {
    if hi <= lo {
        return 0.0;
    }
    if !(scale > 0.0) || !scale.is_finite() {
        return integrate(f, lo, hi, REL_TOL);
    }
    let mut total = 0.0;
    let mut left = lo;
    let mut step = scale;
    loop {
        let right = lo + step;
        if right >= hi {
            total += integrate(f, left, hi, REL_TOL);
            break;
        }
        total += integrate(f, left, right, REL_TOL);
        left = right;
        step *= 2.0;
    }
    total
}
