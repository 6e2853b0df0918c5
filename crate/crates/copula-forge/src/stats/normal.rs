//! Standard normal CDF and quantile.
//!
//! erf/erfc follow W. J. Cody's rational Chebyshev approximations (the
//! SPECFUN `calerf` scheme), accurate to roughly machine precision. The
//! quantile uses Acklam's rational approximation refined with one Halley
//! step against the CDF.

use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
pub enum NormalError {
    #[error("quantile argument must lie strictly inside (0, 1), got {0}")]
    QuantileDomain(f64),
}

const FRAC_1_SQRT_PI: f64 = 0.5641895835477562869;

// Cody's coefficients for |x| <= 0.46875.
const ERF_A: [f64; 5] = [
    3.16112374387056560e0,
    1.13864154151050156e2,
    3.77485237685302021e2,
    3.20937758913846947e3,
    1.85777706184603153e-1,
];
const ERF_B: [f64; 4] = [
    2.36012909523441209e1,
    2.44024637934444173e2,
    1.28261652607737228e3,
    2.84423683343917062e3,
];

// Cody's coefficients for 0.46875 < |x| <= 4.
const ERF_C: [f64; 9] = [
    5.64188496988670089e-1,
    8.88314979438837594e0,
    6.61191906371416295e1,
    2.98635138197400131e2,
    8.81952221241769090e2,
    1.71204761263407058e3,
    2.05107837782607147e3,
    1.23033935479799725e3,
    2.15311535474403846e-8,
];
const ERF_D: [f64; 8] = [
    1.57449261107098347e1,
    1.17693950891312499e2,
    5.37181101862009858e2,
    1.62138957456669019e3,
    3.29079923573345963e3,
    4.36261909014324716e3,
    3.43936767414372164e3,
    1.23033935480374942e3,
];

// Cody's coefficients for |x| > 4.
const ERF_P: [f64; 6] = [
    3.05326634961232344e-1,
    3.60344899949804439e-1,
    1.25781726111229246e-1,
    1.60837851487422766e-2,
    6.58749161529837803e-4,
    1.63153871373020978e-2,
];
const ERF_Q: [f64; 5] = [
    2.56852019228982242e0,
    1.87295284992346047e0,
    5.27905102951428412e-1,
    6.05183413124413191e-2,
    2.33520497626869185e-3,
];

fn erf_small(x: f64) -> f64 {
    let z = x * x;
    let mut num = ERF_A[4] * z;
    let mut den = z;
    for i in 0..3 {
        num = (num + ERF_A[i]) * z;
        den = (den + ERF_B[i]) * z;
    }
    x * (num + ERF_A[3]) / (den + ERF_B[3])
}

// erfc(y) for 0.46875 < y <= 4.
fn erfc_mid(y: f64) -> f64 {
    let mut num = ERF_C[8] * y;
    let mut den = y;
    for i in 0..7 {
        num = (num + ERF_C[i]) * y;
        den = (den + ERF_D[i]) * y;
    }
    let ratio = (num + ERF_C[7]) / (den + ERF_D[7]);
    scaled_by_exp(y, ratio)
}

// erfc(y) for y > 4.
fn erfc_large(y: f64) -> f64 {
    let z = 1.0 / (y * y);
    let mut num = ERF_P[5] * z;
    let mut den = z;
    for i in 0..3 {
        num = (num + ERF_P[i]) * z;
        den = (den + ERF_Q[i]) * z;
    }
    let ratio = z * (num + ERF_P[4]) / (den + ERF_Q[4]);
    let ratio = (FRAC_1_SQRT_PI - ratio) / y;
    scaled_by_exp(y, ratio)
}

// Multiplies by exp(-y^2) split as exp(-ysq^2) * exp(-(y-ysq)(y+ysq)) with
// ysq truncated to 1/16ths, Cody's trick against cancellation in the
// exponent.
fn scaled_by_exp(y: f64, ratio: f64) -> f64 {
    let ysq = (y * 16.0).trunc() / 16.0;
    let del = (y - ysq) * (y + ysq);
    (-ysq * ysq).exp() * (-del).exp() * ratio
}

pub fn erf(x: f64) -> f64 {
    let y = x.abs();
    if y <= 0.46875 {
        erf_small(x)
    } else {
        let e = 1.0 - erfc_abs(y);
        if x < 0.0 {
            -e
        } else {
            e
        }
    }
}

fn erfc_abs(y: f64) -> f64 {
    if y <= 0.46875 {
        1.0 - erf_small(y)
    } else if y <= 4.0 {
        erfc_mid(y)
    } else if y < 26.6 {
        erfc_large(y)
    } else {
        0.0
    }
}

pub fn erfc(x: f64) -> f64 {
    if x < 0.0 {
        2.0 - erfc_abs(-x)
    } else {
        erfc_abs(x)
    }
}

/// Standard normal CDF, absolute error below 1e-14.
pub fn std_normal_cdf(x: f64) -> f64 {
    0.5 * erfc(-x * std::f64::consts::FRAC_1_SQRT_2)
}

fn std_normal_pdf(x: f64) -> f64 {
    (-(x * x) / 2.0).exp() * 0.3989422804014326779
}

// Acklam's coefficients.
const PPF_A: [f64; 6] = [
    -3.969683028665376e+01,
    2.209460984245205e+02,
    -2.759285104469687e+02,
    1.383577518672690e+02,
    -3.066479806614716e+01,
    2.506628277459239e+00,
];
const PPF_B: [f64; 5] = [
    -5.447609879822406e+01,
    1.615858368580409e+02,
    -1.556989798598866e+02,
    6.680131188771972e+01,
    -1.328068155288572e+01,
];
const PPF_C: [f64; 6] = [
    -7.784894002430293e-03,
    -3.223964580411365e-01,
    -2.400758277161838e+00,
    -2.549732539343734e+00,
    4.374664141464968e+00,
    2.938163982698783e+00,
];
const PPF_D: [f64; 4] = [
    7.784695709041462e-03,
    3.224671290700398e-01,
    2.445134137142996e+00,
    3.754408661907416e+00,
];

/// Standard normal quantile on (0, 1).
///
/// After the rational estimate, one Halley refinement against
/// [`std_normal_cdf`] brings |cdf(quantile(p)) - p| to the order of 1e-15.
pub fn std_normal_quantile(p: f64) -> Result<f64, NormalError> {
    if !(p > 0.0 && p < 1.0) {
        return Err(NormalError::QuantileDomain(p));
    }
    const P_LOW: f64 = 0.02425;

    let x = if p < P_LOW {
        let q = (-2.0 * p.ln()).sqrt();
        (((((PPF_C[0] * q + PPF_C[1]) * q + PPF_C[2]) * q + PPF_C[3]) * q + PPF_C[4]) * q
            + PPF_C[5])
            / ((((PPF_D[0] * q + PPF_D[1]) * q + PPF_D[2]) * q + PPF_D[3]) * q + 1.0)
    } else if p <= 1.0 - P_LOW {
        let q = p - 0.5;
        let r = q * q;
        (((((PPF_A[0] * r + PPF_A[1]) * r + PPF_A[2]) * r + PPF_A[3]) * r + PPF_A[4]) * r
            + PPF_A[5])
            * q
            / (((((PPF_B[0] * r + PPF_B[1]) * r + PPF_B[2]) * r + PPF_B[3]) * r + PPF_B[4]) * r
                + 1.0)
    } else {
        let q = (-2.0 * (1.0 - p).ln()).sqrt();
        -(((((PPF_C[0] * q + PPF_C[1]) * q + PPF_C[2]) * q + PPF_C[3]) * q + PPF_C[4]) * q
            + PPF_C[5])
            / ((((PPF_D[0] * q + PPF_D[1]) * q + PPF_D[2]) * q + PPF_D[3]) * q + 1.0)
    };

    // Halley refinement.
    let e = std_normal_cdf(x) - p;
    let u = e / std_normal_pdf(x);
    Ok(x - u / (1.0 + x * u / 2.0))
}
