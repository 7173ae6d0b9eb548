//! Smooth transition functions built from `exp(-1/t)`.

fn sigma(t: f64) -> f64 {
    if t <= 0.0 {
        0.0
    } else {
        (-1.0 / t).exp()
    }
}

/// C-infinity step: 0 for `x <= 0`, 1 for `x >= 1`, strictly monotone in between.
pub fn smooth_step(x: f64) -> f64 {
    if x <= 0.0 {
        0.0
    } else if x >= 1.0 {
        1.0
    } else {
        let a = sigma(x);
        let b = sigma(1.0 - x);
        a / (a + b)
    }
}

/// Step from 0 at `lo` to 1 at `hi`.
pub fn transition(x: f64, lo: f64, hi: f64) -> f64 {
    smooth_step((x - lo) / (hi - lo))
}
