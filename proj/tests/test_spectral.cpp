#include <catch_amalgamated.hpp>

#include <cmath>
#include <random>

#include "rbfmol/cardinal.hpp"
#include "rbfmol/quadrature.hpp"
#include "rbfmol/spectral.hpp"

using namespace rbfmol;
using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;

namespace {

// int over [-R, R] of g on panels of width w
template <class G>
double panel_integral(G&& g, double R, double w) {
    std::vector<double> bp;
    for (double x = -R; x < R - 1e-12; x += w) bp.push_back(x);
    bp.push_back(R);
    double s = 0.0;
    for (std::size_t i = 0; i + 1 < bp.size(); ++i) s += adaptive_gk(g, bp[i], bp[i + 1], 1e-16, 1e-12).value;
    return s;
}

}  // namespace

TEST_CASE("weighted L1 norms of a gaussian", "[spectral]") {
    const auto f = make_gaussian_density(1);
    const auto w = weighted_l1_norm(f, Weight::wiener());
    CHECK_FALSE(w.divergent);
    CHECK_THAT(w.value, WithinAbs(std::sqrt(kPi), 1e-8));
    CHECK_THAT(weighted_l1_norm(f, Weight::hom(2.0)).value, WithinAbs(std::sqrt(kPi) / 2.0, 1e-8));
    // 2D: int e^{-|xi|^2} = pi
    CHECK_THAT(weighted_l1_norm(make_gaussian_density(2), Weight::wiener()).value, WithinRel(kPi, 1e-7));
}

TEST_CASE("mixed norm is monotone in r", "[spectral][property]") {
    const auto f = make_gaussian_density(1);
    double prev = 0.0;
    for (double r : {0.5, 1.0, 1.5, 2.0}) {
        const double v = weighted_l1_norm(f, Weight::mixed(r, 2.0)).value;
        CHECK(v >= prev);
        prev = v;
    }
    CHECK(weighted_l1_norm(f, Weight::mixed(1.0, 2.0)).value <= weighted_l1_norm(f, Weight::mixed(2.0, 2.0)).value);
}

TEST_CASE("weighted L1 norm of an algebraic density includes its tail", "[spectral]") {
    // int (1 + xi^2)^-1 = pi
    CHECK_THAT(weighted_l1_norm(make_algebraic_density(1, 1.0), Weight::wiener()).value, WithinRel(kPi, 1e-5));
}

TEST_CASE("divergent weights are flagged", "[spectral]") {
    CHECK(weighted_l1_norm(make_algebraic_density(1, 0.6), Weight::hom(1.0)).divergent);
    CHECK(weighted_l1_norm(make_singular_density(2, 1.5), Weight::wiener()).divergent == false);
    CHECK_THROWS(make_singular_density(1, 1.0));
    CHECK_THROWS(make_algebraic_density(1, 0.4));
}

TEST_CASE("weighted sup norm", "[spectral]") {
    std::vector<Vec> pts;
    std::vector<double> ones, decay;
    for (double x = -10; x <= 10; x += 0.5) {
        pts.push_back(Vec::scalar(x));
        ones.push_back(1.0);
        decay.push_back(std::pow(1.0 + std::abs(x), -2.0));
    }
    CHECK(weighted_sup_norm(pts, ones, 0.0) == 1.0);
    CHECK_THAT(weighted_sup_norm(pts, decay, 2.0), WithinRel(1.0, 1e-14));
    CHECK_THROWS(weighted_sup_norm(pts, std::vector<double>{1.0}, 0.0));
}

TEST_CASE("weighted sup norm of the multiquadric cardinal function stays bounded", "[spectral]") {
    const CardinalFunction L = make_cardinal(make_basis(Family::multiquadric, 1, 1.0));
    double prev = 0.0;
    for (double R : {8.0, 16.0, 32.0, 60.0}) {
        std::vector<Vec> pts;
        std::vector<double> vals;
        for (double x = -R; x <= R; x += 0.25) {
            pts.push_back(Vec::scalar(x));
            vals.push_back(L(Vec::scalar(x)));
        }
        const double v = weighted_sup_norm(pts, vals, 3.0);
        CHECK(std::isfinite(v));
        if (prev > 0.0) CHECK(v <= prev * 1.01);
        prev = std::max(prev, v);
    }
}

TEST_CASE("alias operator is a contraction", "[spectral][property]") {
    const auto b = make_basis(Family::multiquadric, 1, 1.0);
    const auto lp = choose_truncation(b);
    std::mt19937 rng(5);
    std::uniform_real_distribution<double> us(0.5, 2.0), uh(0.2, 1.0);
    for (int r = 0; r < 10; ++r) {
        const auto f = make_gaussian_density(1, us(rng));
        const double h = uh(rng);
        const double R = 12.0 * kTwoPi / h;
        const double lhs = panel_integral([&](double x) { return std::abs(alias_apply(f, b, h, Vec::scalar(x), lp)); }, R, kPi / h);
        CHECK(lhs <= weighted_l1_norm(f, Weight::wiener()).value * (1.0 + 1e-9));
    }
}

TEST_CASE("alias operator on compactly supported data", "[spectral]") {
    const auto b = make_basis(Family::polyharmonic, 1, 1.0, 3.0);
    const auto lp = choose_truncation(b);
    const auto f = make_bump_density(1, 1.0);
    for (double x : {-0.9, -0.3, 0.0, 0.5, 0.99}) {
        const Vec xi = Vec::scalar(x);
        CHECK_THAT(std::abs(alias_apply(f, b, 0.1, xi, lp) - f.evaluate(xi) * lagrange_symbol(b, xi * 0.1, lp)), WithinAbs(0.0, 1e-15));
    }
}

TEST_CASE("alias sum is periodic", "[spectral][property]") {
    const auto f = make_algebraic_density(1, 1.5);
    for (double h : {0.5, 0.125}) {
        for (double x : {0.1, 2.0, -7.0}) {
            const cplx a = alias_sum(f, h, Vec::scalar(x)), b = alias_sum(f, h, Vec::scalar(x + kTwoPi / h));
            CHECK(std::abs(a - b) <= 1e-10 * std::abs(a));
        }
    }
}

TEST_CASE("interpolation error density agrees with the alias form", "[spectral]") {
    const auto b = make_basis(Family::polyharmonic, 1, 1.0, 3.0);
    const auto lp = choose_truncation(b);
    const auto f = make_gaussian_density(1);
    const double h = 0.5;
    for (double x : {0.7, 3.0, 9.0, 15.0}) {
        const Vec xi = Vec::scalar(x);
        const cplx direct = alias_apply(f, b, h, xi, lp) - f.evaluate(xi);
        CHECK(std::abs(interp_error_density(f, b, h, xi, lp) - direct) <= 1e-12 * std::max(1.0, std::abs(direct)) + 1e-15);
    }
}

TEST_CASE("interpolation error obeys the (1 - L^) bound", "[spectral][property]") {
    const auto f = make_gaussian_density(1);
    for (const auto& b : {make_basis(Family::polyharmonic, 1, 1.0, 3.0), make_basis(Family::multiquadric, 1, 1.0)}) {
        for (double h : {0.5, 0.25, 0.125}) {
            const ErrorNorms e = interp_error_norm(f, b, h, choose_truncation(b), true);
            CHECK(e.interp_error <= e.interp_bound * (1.0 + 1e-8));
            CHECK_THAT(e.error, WithinRel(e.interp_error, 1e-8));
        }
    }
}

TEST_CASE("spatial interpolant is cardinal at the nodes", "[spectral]") {
    const auto b = make_basis(Family::polyharmonic, 1, 1.0, 3.0);
    const CardinalFunction L = make_cardinal(b);
    const auto f = make_gaussian_density(1);
    const double h = 0.5;
    for (int j : {0, 1, 3}) {
        const Vec x = Vec::scalar(j * h);
        CHECK_THAT(interpolate_spatial(f, L, h, x, 60).value, WithinAbs(f.spatial(x), 1e-12));
    }
}

TEST_CASE("spatial interpolant matches the inverse transform of the alias operator", "[spectral]") {
    const auto b = make_basis(Family::multiquadric, 1, 1.0);
    const auto lp = choose_truncation(b);
    const CardinalFunction L = make_cardinal(b);
    const auto f = make_gaussian_density(1);
    const double h = 0.5;
    for (double x : {0.3, 1.1}) {
        const double R = 20.0 * kTwoPi / h;
        const double oracle =
            panel_integral([&](double xi) { return std::real(alias_apply(f, b, h, Vec::scalar(xi), lp) * std::exp(cplx(0.0, x * xi))); }, R, kPi / h) / kTwoPi;
        CHECK_THAT(interpolate_spatial(f, L, h, Vec::scalar(x), 60).value, WithinAbs(oracle, 1e-7));
    }
}

TEST_CASE("gaussian basis needs a summation taper", "[spectral]") {
    const CardinalFunction L = make_cardinal(make_basis(Family::gaussian, 1, 1.0));
    const auto f = make_gaussian_density(1);
    CHECK_THROWS(interpolate_spatial(f, L, 0.5, Vec::scalar(0.3), 40));
    const auto s = interpolate_spatial(f, L, 0.5, Vec::scalar(0.3), 40, SpatialTaper{});
    CHECK(s.converged);
    CHECK_THAT(s.value, WithinAbs(f.spatial(Vec::scalar(0.3)), 1e-3));
    CHECK_THROWS(interpolate_spatial(make_algebraic_density(1, 1.0), L, 0.5, Vec::scalar(0.3), 40, SpatialTaper{}));
}
