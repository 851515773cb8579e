#pragma once

#include <array>
#include <cmath>
#include <complex>
#include <initializer_list>
#include <stdexcept>

namespace rbfmol {

using cplx = std::complex<double>;

inline constexpr double kPi = 3.14159265358979323846;
inline constexpr double kTwoPi = 2.0 * kPi;
inline constexpr int kMaxDim = 4;

/// Point in R^n for n <= kMaxDim, stored inline so hot loops stay allocation free.
class Vec {
public:
    Vec() = default;
    explicit Vec(int n, double fill = 0.0) : n_(n) {
        if (n < 1 || n > kMaxDim) throw std::invalid_argument("Vec: dimension must be in [1,4]");
        v_.fill(0.0);
        for (int i = 0; i < n; ++i) v_[i] = fill;
    }
    Vec(std::initializer_list<double> xs) : n_(static_cast<int>(xs.size())) {
        if (n_ < 1 || n_ > kMaxDim) throw std::invalid_argument("Vec: dimension must be in [1,4]");
        v_.fill(0.0);
        int i = 0;
        for (double x : xs) v_[i++] = x;
    }
    static Vec scalar(double x) {
        Vec v(1);
        v[0] = x;
        return v;
    }
    static Vec axis(int n, int i, double len = 1.0) {
        Vec v(n);
        v[i] = len;
        return v;
    }

    int dim() const { return n_; }
    double& operator[](int i) { return v_[i]; }
    double operator[](int i) const { return v_[i]; }

    double norm2() const {
        double s = 0.0;
        for (int i = 0; i < n_; ++i) s += v_[i] * v_[i];
        return s;
    }
    double norm() const {
        if (n_ == 1) return std::abs(v_[0]);
        if (n_ == 2) return std::hypot(v_[0], v_[1]);
        const double m = max_abs();
        if (m == 0.0 || !std::isfinite(m)) return m;
        double s = 0.0;
        for (int i = 0; i < n_; ++i) s += (v_[i] / m) * (v_[i] / m);
        return m * std::sqrt(s);
    }
    double max_abs() const {
        double m = 0.0;
        for (int i = 0; i < n_; ++i) m = std::max(m, std::abs(v_[i]));
        return m;
    }
    double dot(const Vec& o) const {
        double s = 0.0;
        for (int i = 0; i < n_; ++i) s += v_[i] * o.v_[i];
        return s;
    }

    Vec& operator+=(const Vec& o) {
        for (int i = 0; i < n_; ++i) v_[i] += o.v_[i];
        return *this;
    }
    Vec& operator-=(const Vec& o) {
        for (int i = 0; i < n_; ++i) v_[i] -= o.v_[i];
        return *this;
    }
    Vec& operator*=(double s) {
        for (int i = 0; i < n_; ++i) v_[i] *= s;
        return *this;
    }
    friend Vec operator+(Vec a, const Vec& b) { return a += b; }
    friend Vec operator-(Vec a, const Vec& b) { return a -= b; }
    friend Vec operator*(Vec a, double s) { return a *= s; }
    friend Vec operator*(double s, Vec a) { return a *= s; }

private:
    std::array<double, kMaxDim> v_{};
    int n_ = 1;
};

/// Reduce each coordinate to [-pi, pi).
inline Vec reduce_to_cell(Vec eta) {
    for (int i = 0; i < eta.dim(); ++i) {
        double r = std::remainder(eta[i], kTwoPi);
        if (r >= kPi) r -= kTwoPi;
        eta[i] = r;
    }
    return eta;
}

/// Iterates integer multi-indices k with |k|_inf <= K in lexicographic order.
class LatticeBox {
public:
    LatticeBox(int n, int K) : n_(n), K_(K) {}
    long count() const {
        long c = 1;
        for (int i = 0; i < n_; ++i) c *= (2L * K_ + 1);
        return c;
    }
    template <class F>
    void for_each(F&& f) const {
        std::array<int, kMaxDim> k{};
        for (int i = 0; i < n_; ++i) k[i] = -K_;
        while (true) {
            f(k);
            int i = n_ - 1;
            while (i >= 0 && k[i] == K_) {
                k[i] = -K_;
                --i;
            }
            if (i < 0) break;
            ++k[i];
        }
    }

private:
    int n_;
    int K_;
};

inline bool is_zero_index(const std::array<int, kMaxDim>& k, int n) {
    for (int i = 0; i < n; ++i)
        if (k[i] != 0) return false;
    return true;
}

inline Vec lattice_point(const std::array<int, kMaxDim>& k, int n, double spacing) {
    Vec v(n);
    for (int i = 0; i < n; ++i) v[i] = spacing * k[i];
    return v;
}

/// exp(z) with the real part clamped at -700 so tiny magnitudes never underflow to NaN paths.
inline cplx clamped_exp(cplx z) {
    double re = std::max(z.real(), -700.0);
    return std::polar(std::exp(re), z.imag());
}

}  // namespace rbfmol
