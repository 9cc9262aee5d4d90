#pragma once

#include <cmath>
#include <limits>
#include <stdexcept>

namespace mgdp {

/// Standard normal CDF. Absolute error below 1e-15 over the whole real line.
inline double norm_cdf(double x) {
    return 0.5 * std::erfc(-x / std::sqrt(2.0));
}

/// Standard normal density.
inline double norm_pdf(double x) {
    static const double inv_sqrt_2pi = 0.3989422804014326779;
    return inv_sqrt_2pi * std::exp(-0.5 * x * x);
}

namespace detail {

// Rational initial guess for the normal quantile (Acklam's approximation),
// valid for p in (0, 0.5]. Relative error of the raw guess is ~1e-9; the
// caller refines it to near machine precision.
inline double norm_quantile_guess(double p) {
    static const double a[6] = {-3.969683028665376e+01, 2.209460984245205e+02,
                                -2.759285104469687e+02, 1.383577518672690e+02,
                                -3.066479806614716e+01, 2.506628277459239e+00};
    static const double b[5] = {-5.447609879822406e+01, 1.615858368580409e+02,
                                -1.556989798598866e+02, 6.680131188771972e+01,
                                -1.328068155288572e+01};
    static const double c[6] = {-7.784894002430293e-03, -3.223964580411365e-01,
                                -2.400758277161838e+00, -2.549732539343734e+00,
                                4.374664141464968e+00,  2.938163982698783e+00};
    static const double d[4] = {7.784695709041462e-03, 3.224671290700398e-01,
                                2.445134137142996e+00, 3.754408661907416e+00};
    const double p_low = 0.02425;
    if (p < p_low) {
        double q = std::sqrt(-2.0 * std::log(p));
        return (((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
               ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
    }
    double q = p - 0.5;
    double r = q * q;
    return (((((a[0] * r + a[1]) * r + a[2]) * r + a[3]) * r + a[4]) * r + a[5]) * q /
           (((((b[0] * r + b[1]) * r + b[2]) * r + b[3]) * r + b[4]) * r + 1.0);
}

inline double norm_quantile_half(double p) {
    // p in (0, 0.5]; one Halley step against the erfc-based CDF.
    double x = norm_quantile_guess(p);
    double err = norm_cdf(x) - p;
    double u = err / norm_pdf(x);
    x -= u / (1.0 + 0.5 * x * u);
    return x;
}

}  // namespace detail

/// Inverse of the standard normal CDF. Absolute error below 1e-12 for
/// p in [1e-300, 1 - 1e-16].
inline double norm_quantile(double p) {
    if (!(p > 0.0 && p < 1.0))
        throw std::domain_error("norm_quantile: p must lie in (0, 1)");
    // 1 - p is exact for p >= 0.5, so the reflected branch loses nothing.
    if (p > 0.5) return -detail::norm_quantile_half(1.0 - p);
    return detail::norm_quantile_half(p);
}

}  // namespace mgdp
