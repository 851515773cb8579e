#include <catch_amalgamated.hpp>

#include <cmath>
#include <random>

#include "rbfmol/io.hpp"
#include "rbfmol/quadrature.hpp"
#include "rbfmol/symbols.hpp"

using namespace rbfmol;
using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;

namespace {

SymbolParams frac(double s) {
    SymbolParams p;
    p.s = s;
    return p;
}

LevySpec compound_poisson(double lambda, double mean, double sd) {
    LevySpec s;
    s.n = 1;
    s.drift = {0.0};
    s.diffusion = {0.0};
    s.jumps.kind = JumpKind::gaussian;
    s.jumps.intensity = lambda;
    s.jumps.mean = mean;
    s.jumps.sd = sd;
    return s;
}

}  // namespace

TEST_CASE("cutoff profile", "[symbols]") {
    const CutoffSpec chi(1.0, 2.0);
    CHECK(chi(0.0) == 1.0);
    CHECK(chi(1.0) == 1.0);
    CHECK(chi(2.0) == 0.0);
    CHECK(chi(5.0) == 0.0);
    double prev = 1.0;
    for (double r = 1.0; r <= 2.0; r += 0.01) {
        const double v = chi(r);
        CHECK(v >= 0.0);
        CHECK(v <= 1.0);
        CHECK(v <= prev + 1e-15);
        prev = v;
    }
    CHECK_THROWS(CutoffSpec(2.0, 1.0));
    CHECK_THROWS(CutoffSpec(0.0, 1.0));
}

TEST_CASE("catalogue symbols", "[symbols]") {
    const Symbol heat = make_symbol(SymbolKind::heat, 1);
    CHECK(heat(Vec::scalar(2.0)) == cplx(4.0, 0.0));
    CHECK(heat.q == 2.0);

    const Symbol tr = make_symbol(SymbolKind::transport, 1);
    for (double x : {-3.0, 0.5, 10.0}) CHECK(tr(Vec::scalar(x)).real() == 0.0);
    CHECK(tr(Vec::scalar(2.0)) == cplx(0.0, 2.0));

    const Symbol fr = make_symbol(SymbolKind::fractional_reg, 1, frac(0.5));
    for (double x : {2.0, 3.0, 100.0}) CHECK_THAT(fr(Vec::scalar(x)).real(), WithinRel(x, 1e-15));
    CHECK(fr(Vec::scalar(0.5)) == cplx(0.0, 0.0));
    CHECK_THAT(fr.q, WithinAbs(1.0, 1e-15));
    CHECK_THROWS(make_symbol(SymbolKind::fractional_reg, 1, frac(1.0)));
    CHECK_THROWS(make_symbol(SymbolKind::fractional_reg, 1, frac(0.0)));

    const Symbol hw = make_symbol(SymbolKind::halfwave_reg, 1);
    CHECK(hw(Vec::scalar(3.0)) == cplx(0.0, 3.0));
    CHECK(hw(Vec::scalar(0.7)) == cplx(0.0, 0.0));

    const Symbol sch = make_symbol(SymbolKind::schrodinger, 2);
    CHECK(sch(Vec{1.0, 2.0}) == cplx(0.0, 5.0));
}

TEST_CASE("catalogue symbols have nonnegative real part", "[symbols][property]") {
    std::mt19937 rng(1);
    std::uniform_real_distribution<double> u(-50.0, 50.0);
    const std::vector<Symbol> syms = {make_symbol(SymbolKind::heat, 1), make_symbol(SymbolKind::transport, 1),
                                      make_symbol(SymbolKind::schrodinger, 1), make_symbol(SymbolKind::halfwave_reg, 1),
                                      make_symbol(SymbolKind::fractional_reg, 1, frac(0.75)), levy_symbol(compound_poisson(2.0, 0.3, 0.7))};
    for (const auto& a : syms) {
        REQUIRE(a.re_nonneg);
        for (int i = 0; i < 1000; ++i) CHECK(a(Vec::scalar(u(rng))).real() >= -1e-12);
    }
}

TEST_CASE("homogeneous symbols scale exactly", "[symbols][property]") {
    for (const auto& a : {make_symbol(SymbolKind::heat, 2), make_symbol(SymbolKind::transport, 2), make_symbol(SymbolKind::schrodinger, 2)}) {
        for (double lam : {0.5, 3.0, 16.0}) {
            const Vec xi{0.3, -1.2};
            CHECK(std::abs(a(xi * lam) - std::pow(lam, a.q) * a(xi)) <= 1e-13 * std::abs(a(xi * lam)));
        }
    }
}

TEST_CASE("pure diffusion Levy symbol", "[symbols]") {
    LevySpec s;
    s.n = 1;
    s.drift = {0.0};
    s.diffusion = {2.0};
    const Symbol a = levy_symbol(s);
    CHECK(a.q == 2.0);
    for (double x : {0.1, 1.0, 7.0}) CHECK_THAT(std::abs(a(Vec::scalar(x)) - cplx(x * x, 0.0)), WithinAbs(0.0, 1e-14));
}

TEST_CASE("compound Poisson symbol against direct quadrature", "[symbols]") {
    const double lambda = 2.0, sd = 0.8;
    const Symbol a = levy_symbol(compound_poisson(lambda, 0.0, sd));
    CHECK(a.q == 0.0);
    for (double x : {0.2, 1.0, 3.0, 10.0}) {
        // lambda int (1 - e^{i x y}) p(y) dy; the sine part vanishes for a centred density
        const auto q = adaptive_gk(
            [&](double y) { return (1.0 - std::cos(x * y)) * std::exp(-0.5 * y * y / (sd * sd)) / (sd * std::sqrt(kTwoPi)); }, -15.0 * sd,
            15.0 * sd, 1e-15, 1e-13);
        CHECK_THAT(std::abs(a(Vec::scalar(x)) - cplx(lambda * q.value, 0.0)), WithinAbs(0.0, 1e-12));
        CHECK_THAT(a(Vec::scalar(x)).real(), WithinRel(lambda * (1.0 - std::exp(-0.5 * sd * sd * x * x)), 1e-12));
    }
}

TEST_CASE("custom jump density uses quadrature and matches the closed form", "[symbols]") {
    LevySpec g = compound_poisson(1.5, 0.4, 0.6);
    LevySpec c = g;
    c.jumps.kind = JumpKind::custom;
    c.jumps.density = [](double x) { return std::exp(-0.5 * std::pow((x - 0.4) / 0.6, 2)) / (0.6 * std::sqrt(kTwoPi)); };
    c.jumps.window_lo = 0.4 - 12 * 0.6;
    c.jumps.window_hi = 0.4 + 12 * 0.6;
    const Symbol ag = levy_symbol(g), ac = levy_symbol(c);
    for (double x : {-4.0, 0.3, 2.0, 9.0}) CHECK(std::abs(ag(Vec::scalar(x)) - ac(Vec::scalar(x))) < 1e-9);
}

TEST_CASE("Levy symbols are conjugate symmetric with nonnegative real part", "[symbols][property]") {
    LevySpec s = compound_poisson(2.0, 0.5, 1.0);
    s.drift = {0.5};
    s.diffusion = {1.0};
    const Symbol a = levy_symbol(s);
    CHECK(a.q == 2.0);
    std::mt19937 rng(2);
    std::uniform_real_distribution<double> u(-30.0, 30.0);
    for (int i = 0; i < 1000; ++i) {
        const double x = u(rng);
        CHECK(a(Vec::scalar(x)).real() >= -1e-12);
        CHECK(std::abs(a(Vec::scalar(-x)) - std::conj(a(Vec::scalar(x)))) < 1e-12 * (1.0 + std::abs(a(Vec::scalar(x)))));
    }
    const auto d = levy_diagnostics(s);
    CHECK(std::isfinite(d.measure_moment));
    CHECK(d.measure_moment > 0.0);
    CHECK_THAT(d.window_mass, WithinAbs(1.0, 1e-12));
}

TEST_CASE("symbol order fits", "[symbols]") {
    CHECK_THAT(verify_symbol_order(make_symbol(SymbolKind::heat, 1)).q_hat, WithinAbs(2.0, 0.05));
    CHECK_THAT(verify_symbol_order(levy_symbol(compound_poisson(2.0, 0.0, 1.0))).q_hat, WithinAbs(0.0, 0.05));
    CHECK_THAT(verify_symbol_order(make_symbol(SymbolKind::fractional_reg, 1, frac(0.7))).q_hat, WithinAbs(1.4, 0.05));
    CHECK_THROWS(verify_symbol_order(make_symbol(SymbolKind::heat, 1), 0.0, 2.0));
}

TEST_CASE("asymptotic limits", "[symbols]") {
    const auto h = asymptotic_limit(make_symbol(SymbolKind::heat, 1), Vec::scalar(1.7), 2.0);
    REQUIRE(h);
    CHECK_THAT(std::abs(*h - cplx(1.7 * 1.7, 0.0)), WithinAbs(0.0, 1e-12));
    const auto f = asymptotic_limit(make_symbol(SymbolKind::fractional_reg, 1, frac(0.75)), Vec::scalar(0.3), 1.5);
    REQUIRE(f);
    CHECK_THAT(f->real(), WithinRel(std::pow(0.3, 1.5), 1e-10));
    const auto cp = asymptotic_limit(levy_symbol(compound_poisson(2.5, 0.0, 1.0)), Vec::scalar(1.0), 0.0);
    REQUIRE(cp);
    CHECK_THAT(cp->real(), WithinRel(2.5, 1e-10));
    // an oscillating symbol has no limit
    const Symbol osc = make_custom_symbol(1, [](const Vec& x) { return cplx(2.0 + std::sin(x[0]), 0.0); }, 0.0, true);
    CHECK_FALSE(asymptotic_limit(osc, Vec::scalar(1.0), 0.0).has_value());
}

TEST_CASE("symbol JSON specs", "[symbols][io]") {
    const SymbolSpec fs{"fractional_reg", json{{"s", 0.75}, {"cutoff", {{"r0", 1.0}, {"r1", 2.0}}}}};
    CHECK_THAT(fs.build(1).q, WithinAbs(1.5, 1e-15));
    const SymbolSpec ls{"levy", json::parse(R"({"drift": [0.5], "diffusion": [[1]], "jumps": {"kind": "gaussian", "intensity": 2, "sd": 1}})")};
    CHECK(ls.build(1).q == 2.0);
    CHECK_THROWS(SymbolSpec{"wave", json::object()}.build(1));
    CHECK_THROWS(SymbolSpec{"levy", json::parse(R"({"diffusion": [1, 2]})")}.build(1));
}
