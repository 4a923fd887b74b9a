//! Adaptive Gauss–Kronrod quadrature with endpoint-singularity substitution
//! and infinite-interval transforms.

use std::collections::BinaryHeap;

use crate::error::{Error, Result};

const XGK: [f64; 8] = [
    0.991_455_371_120_812_6,
    0.949_107_912_342_758_5,
    0.864_864_423_359_769_1,
    0.741_531_185_599_394_4,
    0.586_087_235_467_691_1,
    0.405_845_151_377_397_2,
    0.207_784_955_007_898_5,
    0.0,
];

const WGK: [f64; 8] = [
    0.022_935_322_010_529_22,
    0.063_092_092_629_978_55,
    0.104_790_010_322_250_18,
    0.140_653_259_715_525_92,
    0.169_004_726_639_267_9,
    0.190_350_578_064_785_4,
    0.204_432_940_075_298_9,
    0.209_482_141_084_727_83,
];

const WG: [f64; 4] = [
    0.129_484_966_168_869_7,
    0.279_705_391_489_276_7,
    0.381_830_050_505_118_9,
    0.417_959_183_673_469_4,
];

const MAX_INTERVALS: usize = 4000;

#[derive(Debug, Clone, Copy)]
struct Panel {
    a: f64,
    b: f64,
    value: f64,
    error: f64,
    resabs: f64,
}

impl PartialEq for Panel {
    fn eq(&self, other: &Self) -> bool {
        self.error == other.error
    }
}
impl Eq for Panel {}
impl PartialOrd for Panel {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Panel {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        self.error.total_cmp(&other.error)
    }
}

fn rescale_error(err: f64, resabs: f64, resasc: f64) -> f64 {
    let mut scaled = err.abs();
    if resasc != 0.0 && scaled != 0.0 {
        let scale = (200.0 * scaled / resasc).powf(1.5);
        scaled = if scale < 1.0 { resasc * scale } else { resasc };
    }
    if resabs > f64::MIN_POSITIVE / (50.0 * f64::EPSILON) {
        let min_err = 50.0 * f64::EPSILON * resabs;
        if min_err > scaled {
            scaled = min_err;
        }
    }
    scaled
}

/// One 15-point Kronrod panel with its embedded 7-point Gauss estimate.
fn gk15<F: Fn(f64) -> f64 + ?Sized>(f: &F, a: f64, b: f64) -> Panel {
    let center = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let fc = f(center);
    let mut resg = WG[3] * fc;
    let mut resk = WGK[7] * fc;
    let mut resabs = resk.abs();
    let mut fv1 = [0.0; 7];
    let mut fv2 = [0.0; 7];
    for (j, &wg) in WG.iter().enumerate().take(3) {
        let jtw = 2 * j + 1;
        let dx = half * XGK[jtw];
        let f1 = f(center - dx);
        let f2 = f(center + dx);
        fv1[jtw] = f1;
        fv2[jtw] = f2;
        resg += wg * (f1 + f2);
        resk += WGK[jtw] * (f1 + f2);
        resabs += WGK[jtw] * (f1.abs() + f2.abs());
    }
    for j in 0..4 {
        let jtwm1 = 2 * j;
        let dx = half * XGK[jtwm1];
        let f1 = f(center - dx);
        let f2 = f(center + dx);
        fv1[jtwm1] = f1;
        fv2[jtwm1] = f2;
        resk += WGK[jtwm1] * (f1 + f2);
        resabs += WGK[jtwm1] * (f1.abs() + f2.abs());
    }
    let reskh = 0.5 * resk;
    let mut resasc = WGK[7] * (fc - reskh).abs();
    for j in 0..7 {
        resasc += WGK[j] * ((fv1[j] - reskh).abs() + (fv2[j] - reskh).abs());
    }
    let value = resk * half;
    let resabs = resabs * half.abs();
    let resasc = resasc * half.abs();
    let error = rescale_error((resk - resg) * half, resabs, resasc);
    Panel {
        a,
        b,
        value,
        error,
        resabs,
    }
}

/// Globally adaptive Gauss–Kronrod integration of a smooth (or mildly
/// singular) integrand over a finite interval.
pub fn adaptive<F: Fn(f64) -> f64 + ?Sized>(f: &F, a: f64, b: f64, rel_tol: f64) -> Result<f64> {
    if a == b {
        return Ok(0.0);
    }
    let first = gk15(f, a, b);
    let mut total = first.value;
    let mut total_err = first.error;
    let mut total_abs = first.resabs;
    let mut heap = BinaryHeap::new();
    heap.push(first);
    while total_err > rel_tol * total.abs() && total_err > 1e3 * f64::MIN_POSITIVE {
        if heap.len() >= MAX_INTERVALS {
            break;
        }
        let worst = match heap.pop() {
            Some(p) => p,
            None => break,
        };
        let mid = 0.5 * (worst.a + worst.b);
        if mid <= worst.a.min(worst.b) || mid >= worst.a.max(worst.b) {
            heap.push(worst);
            break;
        }
        let left = gk15(f, worst.a, mid);
        let right = gk15(f, mid, worst.b);
        total += left.value + right.value - worst.value;
        total_err += left.error + right.error - worst.error;
        total_abs += left.resabs + right.resabs - worst.resabs;
        heap.push(left);
        heap.push(right);
    }
    // Recompute sums to shed accumulated cancellation from the updates.
    let (sum, err) = heap
        .iter()
        .fold((0.0, 0.0), |(s, e), p| (s + p.value, e + p.error));
    if !sum.is_finite() {
        return Err(Error::ToleranceNotMet {
            estimate: f64::INFINITY,
            requested: rel_tol,
        });
    }
    let roundoff_floor = 100.0 * f64::EPSILON * total_abs;
    if err > rel_tol * sum.abs() && err > roundoff_floor && err > 1e3 * f64::MIN_POSITIVE {
        return Err(Error::ToleranceNotMet {
            estimate: err / sum.abs().max(f64::MIN_POSITIVE),
            requested: rel_tol,
        });
    }
    Ok(sum)
}

/// Integrates over `[a, b]` with `0 < a < b`, switching to a logarithmic
/// variable when the interval spans several decades.
pub fn integrate_span<F: Fn(f64) -> f64 + ?Sized>(
    f: &F,
    a: f64,
    b: f64,
    rel_tol: f64,
) -> Result<f64> {
    if a > 0.0 && b / a > 64.0 {
        let g = |u: f64| {
            let x = u.exp();
            f(x) * x
        };
        adaptive(&g, a.ln(), b.ln(), rel_tol)
    } else {
        adaptive(f, a, b, rel_tol)
    }
}

/// Upper limit of a [`Quadrant`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Upper {
    Finite(f64),
    Infinity,
}

/// A one-dimensional integration problem with optional power-law
/// descriptions of the integrand at its endpoints.
///
/// An exponent `p` at a finite endpoint `c` means `f(x) ~ k·|x − c|^p`; at an
/// infinite upper limit it means `f(x) ~ k·x^p` as `x → ∞`.
pub struct Quadrant<'f> {
    integrand: &'f (dyn Fn(f64) -> f64 + Sync),
    lower: f64,
    upper: Upper,
    lower_exponent: Option<f64>,
    upper_exponent: Option<f64>,
}

impl std::fmt::Debug for Quadrant<'_> {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("Quadrant")
            .field("lower", &self.lower)
            .field("upper", &self.upper)
            .field("lower_exponent", &self.lower_exponent)
            .field("upper_exponent", &self.upper_exponent)
            .finish()
    }
}

impl<'f> Quadrant<'f> {
    pub fn new(integrand: &'f (dyn Fn(f64) -> f64 + Sync), lower: f64, upper: Upper) -> Result<Self> {
        let ok = match upper {
            Upper::Finite(b) => lower < b,
            Upper::Infinity => lower.is_finite(),
        };
        if !ok {
            return Err(Error::Domain(format!("empty quadrant [{lower}, {upper:?}]")));
        }
        Ok(Self {
            integrand,
            lower,
            upper,
            lower_exponent: None,
            upper_exponent: None,
        })
    }

    pub fn lower(&self) -> f64 {
        self.lower
    }

    pub fn upper(&self) -> Upper {
        self.upper
    }

    pub fn lower_exponent(&self) -> Option<f64> {
        self.lower_exponent
    }

    pub fn eval(&self, x: f64) -> f64 {
        (self.integrand)(x)
    }

    /// Declares the power-law exponent at the lower endpoint, checked against
    /// the measured log-log slope over one probe decade.
    pub fn with_lower_exponent(mut self, p: f64) -> Result<Self> {
        let span = match self.upper {
            Upper::Finite(b) => (b - self.lower).min(1.0),
            Upper::Infinity => 1.0,
        };
        let delta = 1e-4 * span;
        let lo = self.lower;
        let measured = self.probe_slope(|d| lo + d, delta);
        check_declared(p, measured)?;
        self.lower_exponent = Some(p);
        Ok(self)
    }

    /// Declares the power-law exponent at the upper endpoint.
    pub fn with_upper_exponent(mut self, p: f64) -> Result<Self> {
        let measured = match self.upper {
            Upper::Finite(b) => {
                let delta = 1e-4 * (b - self.lower).min(1.0);
                self.probe_slope(|d| b - d, delta)
            }
            Upper::Infinity => {
                let x = 1e4 * self.lower.abs().max(1.0);
                let f1 = self.eval(x).abs();
                let f2 = self.eval(10.0 * x).abs();
                if f1 > 0.0 && f2 > 0.0 {
                    Some((f2 / f1).log10())
                } else {
                    None
                }
            }
        };
        check_declared(p, measured)?;
        self.upper_exponent = Some(p);
        Ok(self)
    }

    fn probe_slope(&self, at: impl Fn(f64) -> f64, delta: f64) -> Option<f64> {
        let f1 = self.eval(at(delta / 10.0)).abs();
        let f2 = self.eval(at(delta)).abs();
        if f1 > 0.0 && f2 > 0.0 && f1.is_finite() && f2.is_finite() {
            Some((f2 / f1).log10())
        } else {
            None
        }
    }
}

fn check_declared(declared: f64, measured: Option<f64>) -> Result<()> {
    if let Some(m) = measured {
        if (m - declared).abs() > 0.05 * declared.abs().max(1.0) {
            return Err(Error::ExponentMismatch {
                declared,
                measured: m,
            });
        }
    }
    Ok(())
}

/// Power substitution exponent that flattens an `x^p` endpoint behaviour.
fn flattening_power(p: f64) -> f64 {
    if p < 0.0 {
        2.0 / (1.0 + p)
    } else {
        1.0
    }
}

/// Integrates `f` over `[a, b]` where the lower endpoint behaves like
/// `(x − a)^pa` and the upper like `(b − x)^pb`.
fn finite_with_exponents<F: Fn(f64) -> f64 + ?Sized>(
    f: &F,
    a: f64,
    b: f64,
    pa: Option<f64>,
    pb: Option<f64>,
    rel_tol: f64,
) -> Result<f64> {
    for (end, p) in [(a, pa), (b, pb)] {
        if let Some(p) = p {
            if p <= -1.0 {
                return Err(Error::NonIntegrable {
                    endpoint: end,
                    exponent: p,
                });
            }
        }
    }
    let ka = pa.map(flattening_power).unwrap_or(1.0);
    let kb = pb.map(flattening_power).unwrap_or(1.0);
    if ka == 1.0 && kb == 1.0 {
        return adaptive(f, a, b, rel_tol);
    }
    let mid = 0.5 * (a + b);
    let left = if ka == 1.0 {
        adaptive(f, a, mid, rel_tol)?
    } else {
        let h = mid - a;
        let g = |u: f64| {
            let x = a + h * u.powf(ka);
            f(x) * h * ka * u.powf(ka - 1.0)
        };
        adaptive(&g, 0.0, 1.0, rel_tol)?
    };
    let right = if kb == 1.0 {
        adaptive(f, mid, b, rel_tol)?
    } else {
        let h = b - mid;
        let g = |u: f64| {
            let x = b - h * u.powf(kb);
            f(x) * h * kb * u.powf(kb - 1.0)
        };
        adaptive(&g, 0.0, 1.0, rel_tol)?
    };
    Ok(left + right)
}

/// Integrates over `[a, b]` when `f` behaves like `(x − a)^p` at `a`.
pub fn integrate_from_singular<F: Fn(f64) -> f64 + ?Sized>(
    f: &F,
    a: f64,
    b: f64,
    p: f64,
    rel_tol: f64,
) -> Result<f64> {
    finite_with_exponents(f, a, b, Some(p), None, rel_tol)
}

/// Integrates a [`Quadrant`] to relative accuracy `rel_tol`.
///
/// Declared integrable endpoint singularities are removed by a power
/// substitution; an infinite upper limit is mapped to a finite one with
/// `x ↦ 1/x`.
pub fn integrate(q: &Quadrant<'_>, rel_tol: f64) -> Result<f64> {
    if !(rel_tol > 0.0 && rel_tol <= 1e-3) {
        return Err(Error::Domain(format!("rel_tol {rel_tol} outside (0, 1e-3]")));
    }
    let f = |x: f64| q.eval(x);
    match q.upper {
        Upper::Finite(b) => finite_with_exponents(&f, q.lower, b, q.lower_exponent, q.upper_exponent, rel_tol),
        Upper::Infinity => {
            let split = if q.lower > 0.0 { q.lower } else { 1.0 };
            let head = if split > q.lower {
                finite_with_exponents(&f, q.lower, split, q.lower_exponent, None, rel_tol)?
            } else {
                0.0
            };
            // x = split / v maps [split, ∞) onto (0, 1].
            let tail_exp = match q.upper_exponent {
                Some(p) if p >= -1.0 => {
                    return Err(Error::NonIntegrable {
                        endpoint: f64::INFINITY,
                        exponent: p,
                    })
                }
                Some(p) => Some(-p - 2.0),
                None => None,
            };
            let lower_exp = if split == q.lower { q.lower_exponent } else { None };
            let g = |v: f64| {
                if v == 0.0 {
                    return 0.0;
                }
                let x = split / v;
                f(x) * split / (v * v)
            };
            let tail = finite_with_exponents(&g, 0.0, 1.0, tail_exp, lower_exp, rel_tol)?;
            Ok(head + tail)
        }
    }
}
