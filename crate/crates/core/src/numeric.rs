//! Numeric kernels shared by the sensing and analytics modules: the Gaussian
//! Q-function and its inverse, the regularized incomplete gamma function and
//! its upper-tail quantile (chi-square style detector thresholds), and an
//! adaptive Gauss-Kronrod integrator.

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum NumericError {
    #[error("argument {value} outside domain {domain}")]
    Domain { value: f64, domain: &'static str },
    #[error("quadrature did not reach tolerance {tol} (best error estimate {err})")]
    QuadratureNotConverged { tol: f64, err: f64 },
    #[error("root solve did not converge for {what}")]
    NoConvergence { what: &'static str },
}

// ---------------------------------------------------------------------------
// Error function
// ---------------------------------------------------------------------------

// Rational-approximation coefficients (Cody's CALERF data), three regimes.
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
const INV_SQRT_PI: f64 = 5.6418958354775628695e-1;

/// erfc evaluated on `[0.46875, 4]` and the scaled tail, without the
/// final `exp(-x^2)` factor split (regimes 2 and 3 of the approximation).
fn erfc_positive(y: f64) -> f64 {
    debug_assert!(y >= 0.46875);
    let result = if y <= 4.0 {
        let mut num = ERF_C[8] * y;
        let mut den = y;
        for i in 0..7 {
            num = (num + ERF_C[i]) * y;
            den = (den + ERF_D[i]) * y;
        }
        (num + ERF_C[7]) / (den + ERF_D[7])
    } else {
        let z = 1.0 / (y * y);
        let mut num = ERF_P[5] * z;
        let mut den = z;
        for i in 0..4 {
            num = (num + ERF_P[i]) * z;
            den = (den + ERF_Q[i]) * z;
        }
        let r = z * (num + ERF_P[4]) / (den + ERF_Q[4]);
        (INV_SQRT_PI - r) / y
    };
    // exp(-y^2) split to preserve accuracy for large y.
    let ysq = (y * 16.0).trunc() / 16.0;
    let del = (y - ysq) * (y + ysq);
    (-ysq * ysq).exp() * (-del).exp() * result
}

/// Complementary error function.
pub fn erfc(x: f64) -> f64 {
    let y = x.abs();
    if y < 0.46875 {
        let z = y * y;
        let mut num = ERF_A[4] * z;
        let mut den = z;
        for i in 0..3 {
            num = (num + ERF_A[i]) * z;
            den = (den + ERF_B[i]) * z;
        }
        let erf = x * (num + ERF_A[3]) / (den + ERF_B[3]);
        1.0 - erf
    } else if x > 0.0 {
        if y > 26.5 {
            0.0
        } else {
            erfc_positive(y)
        }
    } else if y > 26.5 {
        2.0
    } else {
        2.0 - erfc_positive(y)
    }
}

// ---------------------------------------------------------------------------
// Gaussian tail
// ---------------------------------------------------------------------------

const SQRT_2: f64 = std::f64::consts::SQRT_2;
const SQRT_2PI: f64 = 2.5066282746310005024;

/// Standard normal density.
pub fn normal_pdf(x: f64) -> f64 {
    (-0.5 * x * x).exp() / SQRT_2PI
}

/// Gaussian tail probability Q(x) = Pr{N(0,1) > x}.
pub fn q_function(x: f64) -> f64 {
    0.5 * erfc(x / SQRT_2)
}

// Acklam's rational approximation of the inverse normal CDF, used as the
// starting point for Newton refinement.
fn inv_normal_cdf_approx(p: f64) -> f64 {
    const A: [f64; 6] = [
        -3.969683028665376e+01,
        2.209460984245205e+02,
        -2.759285104469687e+02,
        1.383577518672690e+02,
        -3.066479806614716e+01,
        2.506628277459239e+00,
    ];
    const B: [f64; 5] = [
        -5.447609879822406e+01,
        1.615858368580409e+02,
        -1.556989798598866e+02,
        6.680131188771972e+01,
        -1.328068155288572e+01,
    ];
    const C: [f64; 6] = [
        -7.784894002430293e-03,
        -3.223964580411365e-01,
        -2.400758277161838e+00,
        -2.549732539343734e+00,
        4.374664141464968e+00,
        2.938163982698783e+00,
    ];
    const D: [f64; 4] = [
        7.784695709041462e-03,
        3.224671290700398e-01,
        2.445134137142996e+00,
        3.754408661907416e+00,
    ];
    const P_LOW: f64 = 0.02425;

    if p < P_LOW {
        let q = (-2.0 * p.ln()).sqrt();
        (((((C[0] * q + C[1]) * q + C[2]) * q + C[3]) * q + C[4]) * q + C[5])
            / ((((D[0] * q + D[1]) * q + D[2]) * q + D[3]) * q + 1.0)
    } else if p <= 1.0 - P_LOW {
        let q = p - 0.5;
        let r = q * q;
        (((((A[0] * r + A[1]) * r + A[2]) * r + A[3]) * r + A[4]) * r + A[5]) * q
            / (((((B[0] * r + B[1]) * r + B[2]) * r + B[3]) * r + B[4]) * r + 1.0)
    } else {
        let q = (-2.0 * (1.0 - p).ln()).sqrt();
        -(((((C[0] * q + C[1]) * q + C[2]) * q + C[3]) * q + C[4]) * q + C[5])
            / ((((D[0] * q + D[1]) * q + D[2]) * q + D[3]) * q + 1.0)
    }
}

/// Inverse of [`q_function`] for `p` strictly inside `(0, 1)`, without the
/// domain check. Accurate to ~1 ulp after two Newton refinements.
pub(crate) fn q_inverse_unchecked(p: f64) -> f64 {
    // Q(z) = p  <=>  Phi(z) = 1 - p.
    let mut z = inv_normal_cdf_approx(1.0 - p);
    for _ in 0..2 {
        let pdf = normal_pdf(z);
        if pdf <= f64::MIN_POSITIVE {
            break;
        }
        z += (q_function(z) - p) / pdf;
    }
    z
}

/// Inverse Gaussian tail: returns z with Q(z) = p.
pub fn q_inverse(p: f64) -> Result<f64, NumericError> {
    if !(p > 0.0 && p < 1.0) {
        return Err(NumericError::Domain {
            value: p,
            domain: "(0, 1)",
        });
    }
    Ok(q_inverse_unchecked(p))
}

// ---------------------------------------------------------------------------
// Incomplete gamma (for exact chi-square detector thresholds)
// ---------------------------------------------------------------------------

/// Natural log of the gamma function (Lanczos, g = 7).
pub fn ln_gamma(x: f64) -> f64 {
    const COEF: [f64; 9] = [
        0.99999999999980993,
        676.5203681218851,
        -1259.1392167224028,
        771.32342877765313,
        -176.61502916214059,
        12.507343278686905,
        -0.13857109526572012,
        9.9843695780195716e-6,
        1.5056327351493116e-7,
    ];
    if x < 0.5 {
        // Reflection.
        let pi = std::f64::consts::PI;
        return (pi / (pi * x).sin()).ln() - ln_gamma(1.0 - x);
    }
    let x = x - 1.0;
    let mut acc = COEF[0];
    for (i, c) in COEF.iter().enumerate().skip(1) {
        acc += c / (x + i as f64);
    }
    let t = x + 7.5;
    0.5 * (2.0 * std::f64::consts::PI).ln() + (x + 0.5) * t.ln() - t + acc.ln()
}

/// Regularized lower incomplete gamma P(a, x).
pub fn reg_gamma_lower(a: f64, x: f64) -> Result<f64, NumericError> {
    if a <= 0.0 {
        return Err(NumericError::Domain {
            value: a,
            domain: "a > 0",
        });
    }
    if x < 0.0 {
        return Err(NumericError::Domain {
            value: x,
            domain: "x >= 0",
        });
    }
    if x == 0.0 {
        return Ok(0.0);
    }
    if x < a + 1.0 {
        // Series representation.
        let mut ap = a;
        let mut sum = 1.0 / a;
        let mut del = sum;
        for _ in 0..500 {
            ap += 1.0;
            del *= x / ap;
            sum += del;
            if del.abs() < sum.abs() * 1e-16 {
                let ln_pref = a * x.ln() - x - ln_gamma(a);
                return Ok((sum * ln_pref.exp()).clamp(0.0, 1.0));
            }
        }
        Err(NumericError::NoConvergence {
            what: "incomplete gamma series",
        })
    } else {
        // Continued fraction for Q(a, x), modified Lentz.
        let tiny = 1e-300;
        let mut b = x + 1.0 - a;
        let mut c = 1.0 / tiny;
        let mut d = 1.0 / b;
        let mut h = d;
        for i in 1..500 {
            let an = -(i as f64) * (i as f64 - a);
            b += 2.0;
            d = an * d + b;
            if d.abs() < tiny {
                d = tiny;
            }
            c = b + an / c;
            if c.abs() < tiny {
                c = tiny;
            }
            d = 1.0 / d;
            let del = d * c;
            h *= del;
            if (del - 1.0).abs() < 1e-16 {
                let ln_pref = a * x.ln() - x - ln_gamma(a);
                return Ok((1.0 - ln_pref.exp() * h).clamp(0.0, 1.0));
            }
        }
        Err(NumericError::NoConvergence {
            what: "incomplete gamma continued fraction",
        })
    }
}

/// Upper-tail quantile of the Gamma(a, 1) distribution: the x with
/// Pr{X > x} = p. Wilson-Hilferty start, Newton refinement.
pub fn gamma_upper_quantile(a: f64, p: f64) -> Result<f64, NumericError> {
    if !(p > 0.0 && p < 1.0) {
        return Err(NumericError::Domain {
            value: p,
            domain: "(0, 1)",
        });
    }
    let z = q_inverse(p)?;
    let t = 1.0 - 1.0 / (9.0 * a) + z / (3.0 * a.sqrt());
    let mut x = (a * t * t * t).max(1e-8);
    for _ in 0..60 {
        let upper = 1.0 - reg_gamma_lower(a, x)?;
        let pdf = ((a - 1.0) * x.ln() - x - ln_gamma(a)).exp();
        if pdf <= f64::MIN_POSITIVE {
            break;
        }
        let step = (upper - p) / pdf;
        let next = (x + step).max(x / 10.0);
        if (next - x).abs() <= 1e-14 * x.abs() {
            return Ok(next);
        }
        x = next;
    }
    let upper = 1.0 - reg_gamma_lower(a, x)?;
    if (upper - p).abs() < 1e-9 {
        Ok(x)
    } else {
        Err(NumericError::NoConvergence {
            what: "gamma quantile",
        })
    }
}

// ---------------------------------------------------------------------------
// Adaptive Gauss-Kronrod quadrature
// ---------------------------------------------------------------------------

// 15-point Kronrod abscissae/weights with the embedded 7-point Gauss rule.
const XGK: [f64; 8] = [
    0.991455371120813,
    0.949107912342759,
    0.864864423359769,
    0.741531185599394,
    0.586087235467691,
    0.405845151377397,
    0.207784955007898,
    0.000000000000000,
];
const WGK: [f64; 8] = [
    0.022935322010529,
    0.063092092629979,
    0.104790010322250,
    0.140653259715525,
    0.169004726639267,
    0.190350578064785,
    0.204432940075298,
    0.209482141084728,
];
const WG: [f64; 4] = [
    0.129484966168870,
    0.279705391489277,
    0.381830050505119,
    0.417959183673469,
];

/// One Gauss-Kronrod 15(7) panel; returns (integral, |K15 - G7| error proxy).
fn gk15<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64) -> (f64, f64) {
    let center = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let fc = f(center);
    let mut kronrod = fc * WGK[7];
    let mut gauss = fc * WG[3];
    for j in 0..7 {
        let x = half * XGK[j];
        let f1 = f(center - x);
        let f2 = f(center + x);
        kronrod += WGK[j] * (f1 + f2);
        if j % 2 == 1 {
            // Odd Kronrod indices are the embedded Gauss nodes.
            gauss += WG[j / 2] * (f1 + f2);
        }
    }
    kronrod *= half;
    gauss *= half;
    (kronrod, (kronrod - gauss).abs())
}

/// Integrate `f` over `[a, b]` to absolute tolerance `abs_tol` by adaptive
/// bisection of Gauss-Kronrod panels.
pub fn integrate<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, abs_tol: f64) -> Result<f64, NumericError> {
    if !(a.is_finite() && b.is_finite()) {
        return Err(NumericError::Domain {
            value: if a.is_finite() { b } else { a },
            domain: "finite interval",
        });
    }
    if a == b {
        return Ok(0.0);
    }
    // Worklist of panels, refined worst-first.
    let (i0, e0) = gk15(&f, a, b);
    let mut panels = vec![(a, b, i0, e0)];
    let max_panels = 4096;
    loop {
        let total_err: f64 = panels.iter().map(|p| p.3).sum();
        if total_err <= abs_tol {
            return Ok(panels.iter().map(|p| p.2).sum());
        }
        if panels.len() >= max_panels {
            return Err(NumericError::QuadratureNotConverged {
                tol: abs_tol,
                err: total_err,
            });
        }
        let worst = panels
            .iter()
            .enumerate()
            .max_by(|x, y| x.1 .3.total_cmp(&y.1 .3))
            .map(|(i, _)| i)
            .unwrap();
        let (pa, pb, _, _) = panels.swap_remove(worst);
        let mid = 0.5 * (pa + pb);
        if mid <= pa || mid >= pb {
            // Interval at floating-point resolution; cannot refine further.
            return Err(NumericError::QuadratureNotConverged {
                tol: abs_tol,
                err: total_err,
            });
        }
        let (il, el) = gk15(&f, pa, mid);
        let (ir, er) = gk15(&f, mid, pb);
        panels.push((pa, mid, il, el));
        panels.push((mid, pb, ir, er));
    }
}

/// Integrate across known feature locations: the interval is pre-split at
/// the given interior breakpoints so the adaptive refinement cannot overlook
/// a transition far narrower than the first panel.
pub fn integrate_with_breakpoints<F: Fn(f64) -> f64>(
    f: F,
    a: f64,
    b: f64,
    interior: &[f64],
    abs_tol: f64,
) -> Result<f64, NumericError> {
    let mut cuts: Vec<f64> = interior.iter().copied().filter(|x| *x > a && *x < b).collect();
    cuts.sort_by(f64::total_cmp);
    cuts.dedup();
    let mut edges = Vec::with_capacity(cuts.len() + 2);
    edges.push(a);
    edges.extend(cuts);
    edges.push(b);
    let per_segment = abs_tol / (edges.len() - 1) as f64;
    let mut total = 0.0;
    for pair in edges.windows(2) {
        total += integrate(&f, pair[0], pair[1], per_segment)?;
    }
    Ok(total)
}
