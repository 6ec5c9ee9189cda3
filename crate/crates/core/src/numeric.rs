//! Small numerical kernels shared across modules.

use serde::{Deserialize, Deserializer, Serialize, Serializer};

/// `ln Σ exp(xᵢ)` with the maximum subtracted before exponentiation.
pub fn log_sum_exp(xs: impl IntoIterator<Item = f64> + Clone) -> f64 {
    let m = xs.clone().into_iter().fold(f64::NEG_INFINITY, f64::max);
    if !m.is_finite() {
        return m;
    }
    let s: f64 = xs.into_iter().map(|x| (x - m).exp()).sum();
    m + s.ln()
}

/// Taylor coefficients of `ln cosh u` beyond the quadratic term, for powers
/// u⁴, u⁶, …, u²⁴.
#[allow(clippy::excessive_precision)] // 17-digit reference values
const LN_COSH_SERIES: [f64; 11] = [
    -1.0 / 12.0,
    1.0 / 45.0,
    -17.0 / 2520.0,
    31.0 / 14175.0,
    -691.0 / 935550.0,
    10922.0 / 42567525.0,
    -9.0989649190707392e-5,
    3.2779302274754777e-5,
    -1.1956455712177624e-5,
    4.4052445258770229e-6,
    -1.6365968284715348e-6,
];

/// `ln(cosh(u) · e^{−u²/2})`, accurate in relative terms down to tiny `u`.
///
/// Near zero the two terms cancel to O(u⁴), so a series is used there.
pub fn ln_cosh_gauss(u: f64) -> f64 {
    let a = u.abs();
    if a < 0.3 {
        let u2 = a * a;
        let mut pow = u2 * u2;
        let mut acc = 0.0;
        for c in LN_COSH_SERIES {
            acc += c * pow;
            pow *= u2;
        }
        acc
    } else if a < 20.0 {
        // cosh a − 1 = 2 sinh²(a/2) without cancellation
        let sh = (0.5 * a).sinh();
        (2.0 * sh * sh).ln_1p() - 0.5 * a * a
    } else {
        a + (-2.0 * a).exp().ln_1p() - std::f64::consts::LN_2 - 0.5 * a * a
    }
}

/// `cosh(u) · e^{−u²/2}`.
pub fn cosh_gauss(u: f64) -> f64 {
    ln_cosh_gauss(u).exp()
}

/// `1 − cosh(u) · e^{−u²/2}` without cancellation; strictly positive for u ≠ 0.
pub fn cosh_gauss_deficit(u: f64) -> f64 {
    -ln_cosh_gauss(u).exp_m1()
}

/// Eigenvalues `(min, max)` of the symmetric matrix `[[a, b], [b, c]]`.
pub fn sym2_eigenvalues(a: f64, b: f64, c: f64) -> (f64, f64) {
    let mean = 0.5 * (a + c);
    let r = (0.25 * (a - c) * (a - c) + b * b).sqrt();
    (mean - r, mean + r)
}

/// Format with 6 significant digits in the style of C's `%g`.
pub fn format_sig6(x: f64) -> String {
    if x.is_nan() {
        return "nan".into();
    }
    if x.is_infinite() {
        return if x > 0.0 { "inf".into() } else { "-inf".into() };
    }
    if x == 0.0 {
        return "0".into();
    }
    let exp = x.abs().log10().floor() as i32;
    // rounding can bump the exponent (999999.7 -> 1e6)
    let rounded: f64 = format!("{x:.5e}").parse().unwrap_or(x);
    let exp = if rounded.abs() >= 10f64.powi(exp + 1) {
        exp + 1
    } else {
        exp
    };
    if (-5..6).contains(&exp) {
        let decimals = (5 - exp).max(0) as usize;
        let s = format!("{x:.decimals$}");
        trim_zeros(&s)
    } else {
        let s = format!("{x:.5e}");
        let (mant, e) = s.split_once('e').unwrap();
        format!("{}e{}", trim_zeros(mant), e)
    }
}

fn trim_zeros(s: &str) -> String {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.').to_string()
    } else {
        s.to_string()
    }
}

/// Full-precision (17 significant digits) text form used in CSV output.
pub fn format_full(x: f64) -> String {
    if x.is_infinite() {
        return if x > 0.0 { "inf".into() } else { "-inf".into() };
    }
    if x.is_nan() {
        return "nan".into();
    }
    format!("{x:.16e}")
}

/// Extended real: a finite value or ±∞. Serialized as a JSON number, or as
/// the strings `"inf"` / `"-inf"`.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd)]
pub struct ExtReal(pub f64);

impl ExtReal {
    pub const INFINITY: ExtReal = ExtReal(f64::INFINITY);

    pub fn is_finite(self) -> bool {
        self.0.is_finite()
    }
}

impl From<f64> for ExtReal {
    fn from(x: f64) -> Self {
        ExtReal(x)
    }
}

impl Serialize for ExtReal {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        if self.0 == f64::INFINITY {
            s.serialize_str("inf")
        } else if self.0 == f64::NEG_INFINITY {
            s.serialize_str("-inf")
        } else if self.0.is_nan() {
            s.serialize_str("nan")
        } else {
            s.serialize_f64(self.0)
        }
    }
}

impl<'de> Deserialize<'de> for ExtReal {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Repr {
            Num(f64),
            Str(String),
        }
        match Repr::deserialize(d)? {
            Repr::Num(x) => Ok(ExtReal(x)),
            Repr::Str(s) => match s.as_str() {
                "inf" => Ok(ExtReal(f64::INFINITY)),
                "-inf" => Ok(ExtReal(f64::NEG_INFINITY)),
                "nan" => Ok(ExtReal(f64::NAN)),
                other => Err(serde::de::Error::custom(format!("invalid extended real `{other}`"))),
            },
        }
    }
}
