//! Adaptive Gauss–Kronrod panel quadrature for complex integrands.
//!
//! A 7-point Gauss / 15-point Kronrod pair per panel, worst-panel-first
//! refinement, and a deterministic final summation in ascending panel order
//! (so mirrored integrands give exactly conjugated results).

use crate::Complex64;
use std::cmp::Ordering;
use std::collections::BinaryHeap;

// G7/K15 nodes and weights on [-1, 1].
const XGK: [f64; 8] = [
    0.991_455_371_120_813,
    0.949_107_912_342_759,
    0.864_864_423_359_769,
    0.741_531_185_599_394,
    0.586_087_235_467_691,
    0.405_845_151_377_397,
    0.207_784_955_007_898,
    0.000_000_000_000_000,
];
const WGK: [f64; 8] = [
    0.022_935_322_010_529,
    0.063_092_092_629_979,
    0.104_790_010_322_250,
    0.140_653_259_715_525,
    0.169_004_726_639_267,
    0.190_350_578_064_785,
    0.204_432_940_075_298,
    0.209_482_141_084_728,
];
const WG: [f64; 4] = [
    0.129_484_966_168_870,
    0.279_705_391_489_277,
    0.381_830_050_505_119,
    0.417_959_183_673_469,
];

#[derive(Debug, Clone, Copy)]
pub(crate) struct Panel {
    pub a: f64,
    pub b: f64,
    pub value: Complex64,
    pub error: f64,
}

pub(crate) fn gk15<F: Fn(f64) -> Complex64>(f: &F, a: f64, b: f64) -> Panel {
    let half = 0.5 * (b - a);
    let mid = 0.5 * (a + b);
    let fc = f(mid);
    let mut kron = WGK[7] * fc;
    let mut gauss = WG[3] * fc;
    for i in 0..7 {
        let dx = half * XGK[i];
        let fv = f(mid - dx) + f(mid + dx);
        kron += WGK[i] * fv;
        if i % 2 == 1 {
            gauss += WG[i / 2] * fv;
        }
    }
    kron *= half;
    gauss *= half;
    Panel {
        a,
        b,
        value: kron,
        error: (kron - gauss).norm(),
    }
}

struct HeapItem {
    error: f64,
    seq: usize,
    panel: Panel,
}

impl PartialEq for HeapItem {
    fn eq(&self, other: &Self) -> bool {
        self.error == other.error && self.seq == other.seq
    }
}
impl Eq for HeapItem {}
impl PartialOrd for HeapItem {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for HeapItem {
    fn cmp(&self, other: &Self) -> Ordering {
        self.error
            .total_cmp(&other.error)
            .then_with(|| other.seq.cmp(&self.seq))
    }
}

pub(crate) struct QuadOutcome {
    pub value: Complex64,
    pub error: f64,
}

/// Integrate over the given initial segments, refining until the summed
/// panel error drops below `tol` or the panel budget is exhausted.
pub(crate) fn adaptive<F: Fn(f64) -> Complex64>(
    f: &F,
    segments: &[(f64, f64)],
    tol: f64,
    max_panels: usize,
) -> QuadOutcome {
    let mut heap = BinaryHeap::new();
    let mut seq = 0usize;
    let mut total_err = 0.0;
    for &(a, b) in segments {
        if b <= a {
            continue;
        }
        let p = gk15(f, a, b);
        total_err += p.error;
        heap.push(HeapItem {
            error: p.error,
            seq,
            panel: p,
        });
        seq += 1;
    }
    while total_err > tol && heap.len() < max_panels {
        let Some(worst) = heap.pop() else { break };
        let p = worst.panel;
        let mid = 0.5 * (p.a + p.b);
        if !(mid > p.a && mid < p.b) {
            // Panel at floating-point resolution; keep it as is.
            heap.push(worst);
            break;
        }
        total_err -= p.error;
        for (a, b) in [(p.a, mid), (mid, p.b)] {
            let sub = gk15(f, a, b);
            total_err += sub.error;
            heap.push(HeapItem {
                error: sub.error,
                seq,
                panel: sub,
            });
            seq += 1;
        }
    }
    // Deterministic summation in ascending interval order.
    let mut panels: Vec<Panel> = heap.into_iter().map(|h| h.panel).collect();
    panels.sort_by(|x, y| x.a.total_cmp(&y.a));
    let mut value = Complex64::new(0.0, 0.0);
    let mut error = 0.0;
    for p in &panels {
        value += p.value;
        error += p.error;
    }
    QuadOutcome { value, error }
}

/// Split `[a, b]` into panels no wider than `width`, returned in order.
pub(crate) fn uniform_breaks(a: f64, b: f64, width: f64) -> Vec<(f64, f64)> {
    debug_assert!(width > 0.0);
    let count = (((b - a) / width).ceil() as usize).max(1);
    let h = (b - a) / count as f64;
    (0..count)
        .map(|i| (a + i as f64 * h, if i + 1 == count { b } else { a + (i + 1) as f64 * h }))
        .collect()
}

/// Panels covering `[center - half, center + half]`, dense near the center
/// and growing geometrically outward.
#[cfg_attr(not(test), allow(dead_code))]
pub(crate) fn centered_breaks(center: f64, half: f64, first: f64, ratio: f64) -> Vec<(f64, f64)> {
    debug_assert!(ratio > 1.0 && half > 0.0);
    let mut cuts = vec![0.0f64];
    let mut step = first.max(1e-12);
    let mut x = 0.0;
    while x + step < half {
        x += step;
        cuts.push(x);
        step *= ratio;
    }
    cuts.push(half);
    let mut segs: Vec<(f64, f64)> = cuts
        .windows(2)
        .map(|w| (center - w[1], center - w[0]))
        .collect();
    segs.reverse();
    segs.extend(cuts.windows(2).map(|w| (center + w[0], center + w[1])));
    segs
}

/// Geometric panels from `|from|` to `|to|` on the positive axis, mirrored
/// when `from < 0`.
pub(crate) fn geometric_breaks(from: f64, to: f64, first: f64, ratio: f64) -> Vec<(f64, f64)> {
    debug_assert!(ratio > 1.0);
    let sign = if to < 0.0 || from < 0.0 { -1.0 } else { 1.0 };
    let (lo, hi) = (from.abs().min(to.abs()), from.abs().max(to.abs()));
    let mut cuts = vec![lo];
    let mut step = first.max(1e-12);
    let mut x = lo;
    while x + step < hi {
        x += step;
        cuts.push(x);
        step *= ratio;
    }
    cuts.push(hi);
    let mut out: Vec<(f64, f64)> = cuts.windows(2).map(|w| (sign * w[0], sign * w[1])).collect();
    if sign < 0.0 {
        for seg in &mut out {
            *seg = (seg.1, seg.0);
        }
        out.reverse();
    }
    out
}
