#include <catch_amalgamated.hpp>

#include <cmath>

#include "rbfmol/basis.hpp"
#include "rbfmol/bessel.hpp"
#include "rbfmol/io.hpp"
#include "rbfmol/quadrature.hpp"

using namespace rbfmol;
using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;

TEST_CASE("modified_bessel_k closed form at half-integer order", "[bessel]") {
    CHECK_THAT(modified_bessel_k(0.5, 1.0), WithinRel(std::sqrt(kPi / 2.0) * std::exp(-1.0), 1e-13));
    // K_{3/2}(x) = sqrt(pi/(2x)) e^{-x} (1 + 1/x)
    CHECK_THAT(modified_bessel_k(1.5, 2.0), WithinRel(std::sqrt(kPi / 4.0) * std::exp(-2.0) * 1.5, 1e-13));
}

TEST_CASE("modified_bessel_k integer orders match the integral representation", "[bessel]") {
    // K_nu(x) = int_0^inf e^{-x cosh t} cosh(nu t) dt
    for (int nu : {0, 1, 2}) {
        for (double x : {0.1, 1.0, 1.9, 2.1, 7.5, 30.0}) {
            const auto q = adaptive_gk([&](double t) { return std::exp(-x * std::cosh(t)) * std::cosh(nu * t); }, 0.0, 40.0, 1e-300, 1e-14);
            CHECK_THAT(modified_bessel_k(nu, x), WithinRel(q.value, 1e-10));
        }
    }
}

TEST_CASE("modified_bessel_k leading asymptotic term at x = 50", "[bessel]") {
    const double lead = std::sqrt(kPi / 100.0) * std::exp(-50.0);
    // the first correction is (4 nu^2 - 1)/(8 x), below 2% for nu <= 3/2
    for (double nu : {0.5, 1.0, 1.5}) CHECK(std::abs(modified_bessel_k(nu, 50.0) / lead - 1.0) <= 0.02 + 1e-12);
    for (double nu : {2.0, 2.5}) {
        const double mu = 4.0 * nu * nu;
        const double two_term = 1.0 + (mu - 1.0) / 400.0 + (mu - 1.0) * (mu - 9.0) / (2.0 * 400.0 * 400.0);
        CHECK_THAT(modified_bessel_k(nu, 50.0) / lead, WithinRel(two_term, 1e-4));
    }
}

TEST_CASE("modified_bessel_k rejects bad arguments", "[bessel]") {
    CHECK_THROWS_AS(modified_bessel_k(1.0, 0.0), std::domain_error);
    CHECK_THROWS_AS(modified_bessel_k(0.3, 1.0), std::domain_error);
}

TEST_CASE("log_bessel_k agrees with log K where K is representable", "[bessel]") {
    CHECK_THAT(detail::log_bessel_k(1.0, 500.0), WithinRel(std::log(modified_bessel_k(1.0, 500.0)), 1e-12));
    const double big = detail::log_bessel_k(1.5, 2000.0);
    CHECK(std::isfinite(big));
    CHECK_THAT(big, WithinRel(-2000.0 + 0.5 * std::log(kPi / 4000.0), 1e-6));
}

TEST_CASE("catalogue orders", "[basis]") {
    CHECK(make_basis(Family::multiquadric, 1, 1.0).kappa == 2.0);
    CHECK(make_basis(Family::multiquadric, 2, 1.0).kappa == 3.0);
    CHECK(make_basis(Family::gaussian, 1, 1.0).kappa == 0.0);
    CHECK(make_basis(Family::gaussian, 1, 1.0).super_polynomial());
    const auto ph = make_basis(Family::polyharmonic, 1, 1.0, 3.0);
    CHECK(ph.kappa == 4.0);
    CHECK(ph.decayN == 4.0);
    for (double r : {0.1, 1.0, 7.0}) CHECK_THAT(ph.fourier(Vec::scalar(r)), WithinRel(std::pow(r, -4.0), 1e-14));
}

TEST_CASE("make_basis rejects invalid parameters", "[basis]") {
    CHECK_THROWS(make_basis(Family::polyharmonic, 1, 1.0, 0.0));
    CHECK_THROWS(make_basis(Family::gaussian, 1, 0.0));
    CHECK_THROWS(make_basis(Family::gaussian, 0, 1.0));
    CHECK_THROWS(make_basis(Family::custom, 1, 1.0));
}

TEST_CASE("multiquadric transform against its closed form", "[basis]") {
    // n = 1, c = 1: phi^(eta) = pi^-1 (2 pi) |eta|^-1 K_1(|eta|)
    const auto mq = make_basis(Family::multiquadric, 1, 1.0);
    for (double r : {0.01, 0.5, 3.0}) CHECK_THAT(mq.fourier(Vec::scalar(r)), WithinRel(2.0 / r * modified_bessel_k(1.0, r), 1e-13));
    // A_n = 2^n pi^{(n-1)/2} Gamma((n+1)/2)
    CHECK_THAT(mq.A_lower, WithinRel(2.0, 1e-15));
    CHECK_THAT(make_basis(Family::multiquadric, 2, 1.0).A_lower, WithinRel(4.0 * std::sqrt(kPi) * std::tgamma(1.5), 1e-15));
}

TEST_CASE("every catalogue basis passes membership", "[basis][property]") {
    for (const auto& b : {make_basis(Family::gaussian, 1, 1.0), make_basis(Family::gaussian, 2, 1.5), make_basis(Family::multiquadric, 1, 1.0),
                          make_basis(Family::multiquadric, 2, 1.0), make_basis(Family::multiquadric, 1, 3.0),
                          make_basis(Family::polyharmonic, 1, 1.0, 3.0), make_basis(Family::polyharmonic, 2, 1.0, 1.0)}) {
        INFO(to_string(b.family) << " n=" << b.n << " c=" << b.c);
        const MembershipReport rep = verify_membership(b);
        for (const auto& c : rep.checks) {
            INFO(c.name << ": " << c.detail);
            CHECK(c.pass);
        }
    }
}

TEST_CASE("polyharmonic membership constants are exact", "[basis]") {
    const MembershipReport rep = verify_membership(make_basis(Family::polyharmonic, 1, 1.0, 3.0));
    CHECK(rep.pass());
    CHECK_THAT(rep.fitted_lower, WithinRel(1.0, 1e-12));
    CHECK_THAT(rep.fitted_upper, WithinRel(1.0, 1e-12));
}

TEST_CASE("sign-changing transform fails membership", "[basis]") {
    const auto bad = make_custom_basis(1, [](const Vec& eta) { return std::cos(eta[0]) * std::pow(eta.norm(), -2.0); }, 2.0, 2.0);
    CHECK_FALSE(verify_membership(bad).pass());
}

TEST_CASE("multiquadric dilation identity", "[basis][property]") {
    for (double c : {0.5, 2.0, 3.0}) {
        const auto bc = make_basis(Family::multiquadric, 1, c), b1 = make_basis(Family::multiquadric, 1, 1.0);
        for (double x : {0.0, 0.3, 1.7, 12.0}) CHECK_THAT(bc.spatial(Vec::scalar(x)), WithinRel(c * b1.spatial(Vec::scalar(x / c)), 1e-15));
    }
}

TEST_CASE("transform rescaling law", "[basis][property]") {
    // gaussian: phi_c(x) = phi(x/c) gives c^n; multiquadric: phi_c(x) = c phi_1(x/c) gives c^{n+1}
    for (Family f : {Family::gaussian, Family::multiquadric}) {
        for (int n : {1, 2}) {
            for (double c : {0.5, 2.0, 4.0}) {
                const auto bc = make_basis(f, n, c), b1 = make_basis(f, n, 1.0);
                const double factor = std::pow(c, f == Family::gaussian ? n : n + 1);
                for (double r : {0.05, 0.7, 1.9}) {
                    const Vec eta = Vec::axis(n, 0, r);
                    CHECK_THAT(bc.fourier(eta), WithinRel(factor * b1.fourier(eta * c), 1e-12));
                }
            }
        }
    }
}

TEST_CASE("gaussian spatial form transforms to the catalogue transform", "[basis]") {
    const auto g = make_basis(Family::gaussian, 1, 1.3);
    for (double eta : {0.5, 1.0, 2.0}) {
        const auto q = adaptive_gk([&](double x) { return g.spatial(Vec::scalar(x)) * std::cos(x * eta); }, -60.0, 60.0, 1e-15);
        CHECK_THAT(q.value, WithinRel(g.fourier(Vec::scalar(eta)), 1e-10));
    }
}

TEST_CASE("basis JSON round trip", "[basis][io]") {
    const BasisSpec s{Family::multiquadric, 2, 1.5, 0.0};
    const json j = s;
    const BasisSpec back = j.get<BasisSpec>();
    CHECK(back.family == s.family);
    CHECK(back.n == 2);
    CHECK(back.c == 1.5);
    CHECK(back.build().kappa == 3.0);
    CHECK_THROWS(json{{"family", "wendland"}, {"n", 1}}.get<BasisSpec>());
}
