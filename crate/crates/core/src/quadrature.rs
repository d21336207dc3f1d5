//! Globally adaptive 7/15-point Gauss-Kronrod quadrature.
//!
//! The interval with the largest error estimate is bisected until the summed
//! estimate meets `max(abs_tol, rel_tol * |integral|)`. Nesting two calls gives
//! the double integrals needed for the exact wiretap-SINR distribution.

use crate::error::{Error, Result};
use crate::scalar::Scalar;

#[allow(clippy::excessive_precision)]
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

#[allow(clippy::excessive_precision)]
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

// Gauss weights for XGK[1], XGK[3], XGK[5] and the centre.
#[allow(clippy::excessive_precision)]
const WG: [f64; 4] = [
    0.129_484_966_168_869_693_270_611_432_679_082,
    0.279_705_391_489_276_667_901_467_771_423_780,
    0.381_830_050_505_118_944_950_369_775_488_975,
    0.417_959_183_673_469_387_755_102_040_816_327,
];

#[derive(Debug, Clone, Copy)]
pub struct QuadOptions<T> {
    pub abs_tol: T,
    pub rel_tol: T,
    pub max_intervals: usize,
}

impl<T: Scalar> Default for QuadOptions<T> {
    fn default() -> Self {
        Self {
            abs_tol: T::zero(),
            rel_tol: T::lit(1e-8),
            max_intervals: 2000,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadEstimate<T> {
    pub value: T,
    pub error: T,
    pub intervals: usize,
}

#[derive(Clone, Copy)]
struct Segment<T> {
    a: T,
    b: T,
    value: T,
    error: T,
}

fn gk15<T: Scalar, F: FnMut(T) -> T>(f: &mut F, a: T, b: T) -> (T, T) {
    let half = T::lit(0.5);
    let centre = half * (a + b);
    let half_len = half * (b - a);
    let fc = f(centre);
    let mut kronrod = fc * T::lit(WGK[7]);
    let mut gauss = fc * T::lit(WG[3]);
    for j in 0..7 {
        let dx = half_len * T::lit(XGK[j]);
        let pair = f(centre - dx) + f(centre + dx);
        kronrod = kronrod + T::lit(WGK[j]) * pair;
        if j % 2 == 1 {
            gauss = gauss + T::lit(WG[j / 2]) * pair;
        }
    }
    let value = kronrod * half_len;
    let error = ((kronrod - gauss) * half_len).abs();
    (value, error)
}

/// Integrates `f` over `[a, b]`, seeding the adaptive partition with the given
/// interior `breaks` (ignored if outside the interval).
pub fn integrate<T, F>(
    mut f: F,
    a: T,
    b: T,
    breaks: &[T],
    opts: &QuadOptions<T>,
) -> Result<QuadEstimate<T>>
where
    T: Scalar,
    F: FnMut(T) -> T,
{
    if a == b {
        return Ok(QuadEstimate {
            value: T::zero(),
            error: T::zero(),
            intervals: 0,
        });
    }
    let mut nodes = vec![a];
    let mut interior: Vec<T> = breaks.iter().copied().filter(|&x| x > a && x < b).collect();
    interior.sort_by(|x, y| x.partial_cmp(y).expect("finite breakpoints"));
    nodes.extend(interior);
    nodes.push(b);

    let mut segs: Vec<Segment<T>> = nodes
        .windows(2)
        .map(|w| {
            let (value, error) = gk15(&mut f, w[0], w[1]);
            Segment {
                a: w[0],
                b: w[1],
                value,
                error,
            }
        })
        .collect();

    loop {
        let total: T = segs.iter().fold(T::zero(), |s, g| s + g.value);
        let err: T = segs.iter().fold(T::zero(), |s, g| s + g.error);
        let tol = opts.abs_tol.max(opts.rel_tol * total.abs());
        if !total.is_finite() {
            return Err(Error::Domain(format!("non-finite integrand on [{a}, {b}]")));
        }
        if err <= tol {
            return Ok(QuadEstimate {
                value: total,
                error: err,
                intervals: segs.len(),
            });
        }
        if segs.len() >= opts.max_intervals {
            return Err(Error::Quadrature {
                estimate: total.as_f64(),
                error: err.as_f64(),
                tolerance: tol.as_f64(),
                intervals: segs.len(),
            });
        }
        let (worst, _) = segs
            .iter()
            .enumerate()
            .fold((0usize, T::neg_infinity()), |(bi, be), (i, s)| {
                if s.error > be {
                    (i, s.error)
                } else {
                    (bi, be)
                }
            });
        let s = segs[worst];
        let mid = T::lit(0.5) * (s.a + s.b);
        if !(mid > s.a && mid < s.b) {
            // Interval collapsed to adjacent floats; accept what we have.
            segs[worst].error = T::zero();
            continue;
        }
        let (v1, e1) = gk15(&mut f, s.a, mid);
        let (v2, e2) = gk15(&mut f, mid, s.b);
        segs[worst] = Segment {
            a: s.a,
            b: mid,
            value: v1,
            error: e1,
        };
        segs.push(Segment {
            a: mid,
            b: s.b,
            value: v2,
            error: e2,
        });
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn weights_sum_to_two() {
        let k: f64 = WGK[7] + 2.0 * WGK[..7].iter().sum::<f64>();
        let g: f64 = WG[3] + 2.0 * WG[..3].iter().sum::<f64>();
        assert!((k - 2.0).abs() < 1e-15);
        assert!((g - 2.0).abs() < 1e-15);
    }

    #[test]
    fn single_panel_exact_for_high_degree_polynomials() {
        // Kronrod-15 integrates degree 22 exactly.
        for deg in [0, 3, 10, 21, 22] {
            let (v, _) = gk15(&mut |x: f64| x.powi(deg), 0.0, 1.0);
            assert!((v - 1.0 / (deg as f64 + 1.0)).abs() < 1e-14, "deg {deg}");
        }
    }

    #[test]
    fn adaptive_handles_peaks_and_kinks() {
        let opts = QuadOptions {
            rel_tol: 1e-10,
            ..Default::default()
        };
        let r = integrate(|x: f64| (-x).exp(), 0.0, 50.0, &[], &opts).unwrap();
        assert!((r.value - (1.0 - (-50.0f64).exp())).abs() < 1e-10);

        let r = integrate(|x: f64| (x - 0.3).abs(), 0.0, 1.0, &[], &opts).unwrap();
        assert!((r.value - (0.045 + 0.245)).abs() < 1e-10);

        // Narrow Lorentzian: integral of eps/((x-c)^2+eps^2) over the real line is pi.
        let eps = 1e-4;
        let r = integrate(
            |x: f64| eps / ((x - 0.123).powi(2) + eps * eps),
            -1e3,
            1e3,
            &[0.123],
            &opts,
        )
        .unwrap();
        let exact = (1e3f64 - 0.123).atan2(eps) + (1e3f64 + 0.123).atan2(eps);
        assert!((r.value - exact).abs() < 1e-8);
    }

    #[test]
    fn reports_nonconvergence() {
        let opts = QuadOptions {
            rel_tol: 1e-14,
            max_intervals: 4,
            ..Default::default()
        };
        let r = integrate(|x: f64| (1.0 / x).sin(), 1e-3, 1.0, &[], &opts);
        assert!(matches!(r, Err(Error::Quadrature { .. })));
    }
}
