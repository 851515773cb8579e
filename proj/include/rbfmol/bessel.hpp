#pragma once

#include <cmath>
#include <stdexcept>

#include "rbfmol/vec.hpp"

namespace rbfmol {

namespace detail {

inline constexpr double kEulerGamma = 0.57721566490153286061;

// K_n(x) for integer n and small x, from the ascending series.
inline double bessel_k_series(int n, double x) {
    const double half = 0.5 * x;
    const double q = 0.25 * x * x;

    double finite = 0.0;
    if (n > 0) {
        double fact_nk1 = 1.0;  // (n-k-1)!
        for (int j = 2; j <= n - 1; ++j) fact_nk1 *= j;
        double term_pow = 1.0;
        double k_fact = 1.0;
        for (int k = 0; k < n; ++k) {
            if (k > 0) {
                k_fact *= k;
                term_pow *= -q;
                fact_nk1 /= (n - k);
            }
            finite += fact_nk1 / k_fact * term_pow;
        }
        finite *= 0.5 * std::pow(half, -n);
    }

    double n_fact = 1.0;
    for (int j = 2; j <= n; ++j) n_fact *= j;

    // psi(m) = -gamma + H_{m-1}
    double h_k = 0.0;  // H_k
    double h_nk = 0.0;  // H_{n+k}
    for (int j = 1; j <= n; ++j) h_nk += 1.0 / j;

    double i_sum = 0.0;
    double psi_sum = 0.0;
    double coef = 1.0 / n_fact;  // q^k / (k! (n+k)!)
    for (int k = 0; k < 200; ++k) {
        if (k > 0) {
            coef *= q / (double(k) * double(n + k));
            h_k += 1.0 / k;
            h_nk += 1.0 / (n + k);
        }
        i_sum += coef;
        const double psi_pair = (-kEulerGamma + h_k) + (-kEulerGamma + h_nk);
        psi_sum += psi_pair * coef;
        if (coef < 1e-18 * std::abs(i_sum) && k > 2) break;
    }
    const double half_n = std::pow(half, n);
    const double i_n = half_n * i_sum;
    const double sign = (n % 2 == 0) ? 1.0 : -1.0;
    return finite - sign * std::log(half) * i_n + sign * 0.5 * half_n * psi_sum;
}

// K_0 and K_1 for x >= 2 by Steed's continued fraction (Temme normalisation).
inline void bessel_k01_cf(double x, double& k0, double& k1) {
    const double eps = 1e-16;
    double b = 2.0 * (1.0 + x);
    double d = 1.0 / b;
    double h = d;
    double delh = d;
    double q1 = 0.0;
    double q2 = 1.0;
    const double a1 = 0.25;
    double q = a1;
    double c = a1;
    double a = -a1;
    double s = 1.0 + q * delh;
    for (int i = 2; i <= 100000; ++i) {
        a -= 2.0 * (i - 1);
        c = -a * c / i;
        const double qnew = (q1 - b * q2) / a;
        q1 = q2;
        q2 = qnew;
        q += c * qnew;
        b += 2.0;
        d = 1.0 / (b + a * d);
        delh = (b * d - 1.0) * delh;
        h += delh;
        const double dels = q * delh;
        s += dels;
        if (std::abs(dels / s) < eps) break;
    }
    h = a1 * h;
    k0 = std::sqrt(kPi / (2.0 * x)) * std::exp(-x) / s;
    k1 = k0 * (x + 0.5 - h) / x;
}

inline double bessel_k_integer(int n, double x) {
    if (x < 2.0) return bessel_k_series(n, x);
    double k0 = 0.0;
    double k1 = 0.0;
    bessel_k01_cf(x, k0, k1);
    if (n == 0) return k0;
    double km = k0;
    double k = k1;
    for (int m = 1; m < n; ++m) {
        const double next = km + 2.0 * m / x * k;
        km = k;
        k = next;
    }
    return k;
}

// K_{m+1/2}(x) = sqrt(pi/2x) e^{-x} sum_k (m+k)! / (k! (m-k)! (2x)^k)
inline double bessel_k_half(int m, double x) {
    double sum = 0.0;
    double term = 1.0;
    for (int k = 0; k <= m; ++k) {
        if (k > 0) term *= double((m + k) * (m - k + 1)) / (double(k) * 2.0 * x);
        sum += term;
    }
    return std::sqrt(kPi / (2.0 * x)) * std::exp(-x) * sum;
}

}  // namespace detail

/**
 * @brief Modified Bessel function of the second kind K_nu(x).
 *
 * Supports nu in {0, 1/2, 1, ..., 7/2}: half-integer orders in closed form,
 * integer orders by ascending series below x=2 and a continued fraction above.
 */
inline double modified_bessel_k(double nu, double x) {
    if (!(x > 0.0)) throw std::domain_error("modified_bessel_k: x must be positive");
    const double twice = 2.0 * nu;
    const long t = std::lround(twice);
    if (std::abs(twice - double(t)) > 1e-12 || t < 0 || t > 7)
        throw std::domain_error("modified_bessel_k: unsupported order");
    if (t % 2 == 1) return detail::bessel_k_half(int(t / 2), x);
    return detail::bessel_k_integer(int(t / 2), x);
}

namespace detail {

/// log K_nu(x); the large-argument asymptotic series takes over before K_nu underflows.
inline double log_bessel_k(double nu, double x) {
    if (x < 600.0) return std::log(modified_bessel_k(nu, x));
    const double mu = 4.0 * nu * nu;
    double term = 1.0, sum = 1.0;
    for (int k = 1; k < 12; ++k) {
        term *= (mu - (2.0 * k - 1) * (2.0 * k - 1)) / (8.0 * k * x);
        sum += term;
    }
    return -x + 0.5 * std::log(kPi / (2.0 * x)) + std::log(sum);
}

}  // namespace detail

}  // namespace rbfmol
