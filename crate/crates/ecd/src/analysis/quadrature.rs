//! One-dimensional quadrature routines.

/// Adaptive Simpson quadrature to the requested relative tolerance.
pub fn adaptive_quadrature(f: &dyn Fn(f64) -> f64, a: f64, b: f64, rel_tol: f64) -> f64 {
    let fa = f(a);
    let fb = f(b);
    let m = 0.5 * (a + b);
    let fm = f(m);
    let whole = simpson(a, b, fa, fm, fb);
    let scale = whole.abs().max(1e-300);
    recurse(f, a, b, fa, fm, fb, whole, rel_tol * scale, 50)
}

fn simpson(a: f64, b: f64, fa: f64, fm: f64, fb: f64) -> f64 {
    (b - a) / 6.0 * (fa + 4.0 * fm + fb)
}

#[allow(clippy::too_many_arguments)]
fn recurse(
    f: &dyn Fn(f64) -> f64,
    a: f64,
    b: f64,
    fa: f64,
    fm: f64,
    fb: f64,
    whole: f64,
    abs_tol: f64,
    depth: u32,
) -> f64 {
    let m = 0.5 * (a + b);
    let lm = 0.5 * (a + m);
    let rm = 0.5 * (m + b);
    let flm = f(lm);
    let frm = f(rm);
    let left = simpson(a, m, fa, flm, fm);
    let right = simpson(m, b, fm, frm, fb);
    let delta = left + right - whole;
    if depth == 0 || delta.abs() <= 15.0 * abs_tol {
        return left + right + delta / 15.0;
    }
    recurse(f, a, m, fa, flm, fm, left, 0.5 * abs_tol, depth - 1)
        + recurse(f, m, b, fm, frm, fb, right, 0.5 * abs_tol, depth - 1)
}

/// 10-point Gauss-Legendre nodes on [-1, 1] (positive half) and weights.
const GL10_NODES: [f64; 5] = [
    0.148_874_338_981_631_2,
    0.433_395_394_129_247_2,
    0.679_409_568_299_024_4,
    0.865_063_366_688_984_5,
    0.973_906_528_517_171_7,
];
const GL10_WEIGHTS: [f64; 5] = [
    0.295_524_224_714_752_9,
    0.269_266_719_309_996_3,
    0.219_086_362_515_982_0,
    0.149_451_349_150_580_6,
    0.066_671_344_308_688_14,
];

fn gauss10(f: &dyn Fn(f64) -> f64, a: f64, b: f64) -> f64 {
    let c = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    let mut sum = 0.0;
    for (x, w) in GL10_NODES.iter().zip(GL10_WEIGHTS.iter()) {
        sum += w * (f(c + h * x) + f(c - h * x));
    }
    sum * h
}

/// Composite 10-point Gauss-Legendre rule over a mesh graded toward `a`
/// (panel edges at a + (b-a)(k/panels)^3), suitable for integrands with an
/// integrable endpoint singularity or a boundary layer at `a`.
pub fn composite_gauss10(f: &dyn Fn(f64) -> f64, a: f64, b: f64, panels: usize) -> f64 {
    let mut sum = 0.0;
    let mut left = a;
    for k in 1..=panels {
        let frac = k as f64 / panels as f64;
        let right = a + (b - a) * frac * frac * frac;
        sum += gauss10(f, left, right);
        left = right;
    }
    sum
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn integrates_polynomials_exactly_enough() {
        let got = adaptive_quadrature(&|x| x * x * x - 2.0 * x + 1.0, 0.0, 2.0, 1e-12);
        assert_relative_eq!(got, 2.0, max_relative = 1e-12);
    }

    #[test]
    fn integrates_oscillatory() {
        let got = adaptive_quadrature(&|x: f64| x.sin(), 0.0, std::f64::consts::PI, 1e-10);
        assert_relative_eq!(got, 2.0, max_relative = 1e-9);
    }

    #[test]
    fn gauss_composite_handles_sqrt_singularity() {
        // ∫0^1 x^{-1/2} dx = 2
        let got = composite_gauss10(&|x: f64| x.powf(-0.5), 0.0, 1.0, 4000);
        assert_relative_eq!(got, 2.0, max_relative = 1e-6);
    }
}
