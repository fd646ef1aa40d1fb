//! Algebraic intersection numbers of lifted paths on the two-sheeted model.
//!
//! Base-plane crossings of the two polylines count when both lifts are on the same sheet
//! there; the sign is `+1` when the second path crosses the first from right to left.

use super::route::{CoverPath, Locate};
use crate::error::Result;
use crate::numerics::C64;

const SAMPLES_PER_PIECE: usize = 96;

fn cross(a: C64, b: C64) -> f64 {
    (a.conj() * b).im
}

/// Crossing parameters of segments `p0→p1` and `q0→q1`, half-open at the far ends.
fn segment_crossing(p0: C64, p1: C64, q0: C64, q1: C64) -> Option<(f64, f64)> {
    let d = p1 - p0;
    let e = q1 - q0;
    let den = cross(d, e);
    if den == 0.0 {
        return None;
    }
    let s = cross(q0 - p0, e) / den;
    let t = cross(q0 - p0, d) / den;
    if (0.0..1.0).contains(&s) && (0.0..1.0).contains(&t) {
        Some((s, t))
    } else {
        None
    }
}

/// Signed intersection number `p · q`.
pub fn intersection(at: &dyn Locate, p: &CoverPath, q: &CoverPath) -> Result<i32> {
    let h = at.hyper();
    let ps = p.samples(at, SAMPLES_PER_PIECE)?;
    let qs = q.samples(at, SAMPLES_PER_PIECE)?;
    // bounding boxes per segment keep the double loop cheap
    let mut total = 0;
    for i in 0..ps.len().saturating_sub(1) {
        let (p0, wp0) = ps[i];
        let p1 = ps[i + 1].0;
        let (pminx, pmaxx) = (p0.re.min(p1.re), p0.re.max(p1.re));
        let (pminy, pmaxy) = (p0.im.min(p1.im), p0.im.max(p1.im));
        for j in 0..qs.len().saturating_sub(1) {
            let (q0, wq0) = qs[j];
            let q1 = qs[j + 1].0;
            if q0.re.max(q1.re) < pminx || q0.re.min(q1.re) > pmaxx || q0.im.max(q1.im) < pminy || q0.im.min(q1.im) > pmaxy
            {
                continue;
            }
            if let Some((s, _)) = segment_crossing(p0, p1, q0, q1) {
                let x = p0 + (p1 - p0) * s;
                let w1 = h.continue_w(p0, wp0, x);
                let w2 = h.continue_w(q0, wq0, x);
                if (w1 - w2).norm() < (w1 + w2).norm() {
                    total += cross(p1 - p0, q1 - q0).signum() as i32;
                }
            }
        }
    }
    Ok(total)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn crossing_parameters() {
        let c = |a: f64, b: f64| C64::new(a, b);
        let (s, t) = segment_crossing(c(0.0, 0.0), c(2.0, 0.0), c(1.0, -1.0), c(1.0, 1.0)).unwrap();
        assert!((s - 0.5).abs() < 1e-15 && (t - 0.5).abs() < 1e-15);
        assert!(cross(c(1.0, 0.0), c(0.0, 1.0)) > 0.0);
        assert!(segment_crossing(c(0.0, 0.0), c(1.0, 0.0), c(0.0, 1.0), c(1.0, 1.0)).is_none());
    }
}
