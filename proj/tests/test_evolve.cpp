#include <catch_amalgamated.hpp>

#include <cmath>

#include "rbfmol/evolve.hpp"

using namespace rbfmol;
using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;

namespace {

double max_diff(const LatticeState& a, const LatticeState& b) { return max_node_difference(a, b); }

}  // namespace

TEST_CASE("heat stencil at h = 1 has zero row sum and is even", "[evolve]") {
    for (const auto& b : {make_basis(Family::polyharmonic, 1, 1.0, 3.0), make_basis(Family::multiquadric, 1, 1.0)}) {
        const auto lp = choose_truncation(b);
        const GeneratorStencil st = generator_stencil(b, make_symbol(SymbolKind::heat, 1), 1.0, 200, lp);
        CHECK(st.resolved);
        CHECK(std::abs(st.row_sum()) < 1e-10);
        for (int j = 1; j <= 20; ++j) CHECK_THAT(std::abs(st({j}) - st({-j})), WithinAbs(0.0, 1e-13));
        CHECK(st({0}).real() < 0.0);
    }
}

TEST_CASE("stencil decay obeys the algebraic bound", "[evolve][property]") {
    const std::vector<std::pair<BasisFunction, Symbol>> cases = {
        {make_basis(Family::multiquadric, 1, 1.0), make_symbol(SymbolKind::heat, 1)},
        {make_basis(Family::polyharmonic, 1, 1.0, 3.0), make_symbol(SymbolKind::heat, 1)},
        {make_basis(Family::polyharmonic, 1, 1.0, 3.0), make_symbol(SymbolKind::transport, 1)}};
    for (const auto& [b, a] : cases) {
        const GeneratorStencil st = generator_stencil(b, a, 1.0, 200, choose_truncation(b));
        INFO(to_string(b.family) << " / " << to_string(a.kind) << ": exponent " << st.decay_exponent);
        CHECK(st.decay_exponent <= -(b.kappa + b.n) + 0.4);
    }
}

TEST_CASE("heat generator has a nonpositive Fourier diagonal", "[evolve][property]") {
    const auto b = make_basis(Family::polyharmonic, 1, 1.0, 3.0);
    const GeneratorStencil st = generator_stencil(b, make_symbol(SymbolKind::heat, 1), 0.25, 300, choose_truncation(b));
    for (const cplx& l : st.diagonal(257)) {
        CHECK(l.real() <= 1e-9);
        CHECK(std::abs(l.imag()) <= 1e-9);
    }
}

TEST_CASE("integration to T = 0 is the identity", "[evolve]") {
    const auto b = make_basis(Family::polyharmonic, 1, 1.0, 3.0);
    const auto f = make_gaussian_density(1);
    const GeneratorStencil st = generator_stencil(b, make_symbol(SymbolKind::heat, 1), 0.25, 100, choose_truncation(b));
    const LatticeState s0 = make_lattice_state(f, 0.25, 32);
    CHECK(max_diff(integrate_mol(s0, st, 0.0), s0) < 1e-15);
    CHECK(max_diff(integrate_mol(s0, st, 0.0, TimeMethod::rk4, 4), s0) == 0.0);
}

TEST_CASE("constant data stay constant under the heat flow", "[evolve]") {
    const auto b = make_basis(Family::multiquadric, 1, 1.0);
    const GeneratorStencil st = generator_stencil(b, make_symbol(SymbolKind::heat, 1), 0.5, 400, choose_truncation(b));
    const LatticeState s0 = make_lattice_state(1, 0.5, 40, [](const Vec&) { return cplx(1.0, 0.0); });
    const LatticeState sT = integrate_mol(s0, st, 2.0);
    // the truncated stencil keeps a row-sum residue, which drifts a constant by about T * |row sum|
    CHECK(std::abs(st.row_sum()) < 1e-11);
    CHECK(max_diff(sT, s0) <= 2.0 * std::abs(st.row_sum()) * 1.01 + 1e-14);
    CHECK_FALSE(sT.unstable);
}

TEST_CASE("rk4 converges at fourth order to the exponential integrator", "[evolve]") {
    const auto b = make_basis(Family::polyharmonic, 1, 1.0, 3.0);
    const auto f = make_gaussian_density(1);
    const double h = 0.25, T = 0.5;
    const GeneratorStencil st = generator_stencil(b, make_symbol(SymbolKind::heat, 1), h, 200, choose_truncation(b));
    const LatticeState s0 = make_lattice_state(f, h, 64);
    const LatticeState ref = integrate_mol(s0, st, T);
    std::vector<double> err;
    for (int steps : {128, 256, 512}) err.push_back(max_diff(integrate_mol(s0, st, T, TimeMethod::rk4, steps), ref));
    for (std::size_t i = 0; i + 1 < err.size(); ++i) {
        const double ratio = err[i] / err[i + 1];
        INFO("ratio " << ratio);
        CHECK(ratio >= 16.0 * 0.8);
        CHECK(ratio <= 16.0 * 1.2);
    }
}

TEST_CASE("instability is flagged", "[evolve]") {
    const auto b = make_basis(Family::polyharmonic, 1, 1.0, 3.0);
    const GeneratorStencil st = generator_stencil(b, make_symbol(SymbolKind::heat, 1), 0.1, 100, choose_truncation(b));
    const LatticeState s0 = make_lattice_state(make_gaussian_density(1), 0.1, 32);
    CHECK(integrate_mol(s0, st, 5.0, TimeMethod::rk4, 4).unstable);
}

TEST_CASE("spectral solution at t = 0 and mass conservation", "[evolve]") {
    const auto b = make_basis(Family::polyharmonic, 1, 1.0, 3.0);
    const auto lp = choose_truncation(b);
    const auto f = make_gaussian_density(1);
    const Symbol heat = make_symbol(SymbolKind::heat, 1);
    for (double x : {0.4, 3.0, 11.0}) CHECK(solve_spectral(f, b, heat, 0.5, 0.0, Vec::scalar(x), lp) == alias_apply(f, b, 0.5, Vec::scalar(x), lp));
    const cplx m0 = solve_spectral(f, b, heat, 0.5, 0.0, Vec::scalar(0.0), lp);
    for (double t : {0.5, 1.0, 4.0}) CHECK(std::abs(solve_spectral(f, b, heat, 0.5, t, Vec::scalar(0.0), lp) - m0) < 1e-10);
    const auto grid = std::vector<Vec>{Vec::scalar(0.1), Vec::scalar(0.2)};
    CHECK(solve_spectral(f, b, heat, 0.5, 1.0, grid, lp).size() == 2);
}

TEST_CASE("transport keeps the Fourier magnitude up to the multiplier damping", "[evolve]") {
    const auto b = make_basis(Family::polyharmonic, 1, 1.0, 3.0);
    const auto lp = choose_truncation(b);
    const auto f = make_gaussian_density(1);
    const Symbol tr = make_symbol(SymbolKind::transport, 1);
    const double h = 0.25, t = 0.5;
    for (double x : {0.3, 2.0, 6.0}) {
        const Vec xi = Vec::scalar(x);
        const cplx G = scheme_multiplier(b, tr, xi, h, lp);
        CHECK(G.real() >= -1e-12);
        CHECK(G.real() < 1e-2 * std::abs(G.imag()) + 1e-12);
        CHECK_THAT(std::abs(solve_spectral(f, b, tr, h, t, xi, lp)), WithinRel(std::abs(alias_apply(f, b, h, xi, lp)) * std::exp(-t * G.real()), 1e-12));
    }
}

TEST_CASE("time path and spectral path agree", "[evolve]") {
    const auto b = make_basis(Family::polyharmonic, 1, 1.0, 3.0);
    const auto lp = choose_truncation(b);
    const auto f = make_gaussian_density(1);
    for (const auto& a : {make_symbol(SymbolKind::heat, 1), make_symbol(SymbolKind::transport, 1)}) {
        const CrossValidation cv = cross_validate(f, b, a, 0.25, 64, 0.5, lp);
        INFO(to_string(a.kind) << ": " << cv.discrepancy);
        CHECK(cv.pass);
        CHECK(cv.discrepancy < 1e-4);
        CHECK(cv.discrepancy_2J <= cv.discrepancy * 1.01 + 1e-13);
    }
    // at T = 0 both paths reduce to the nodal values f(hj)
    CHECK(cross_validate(f, b, make_symbol(SymbolKind::heat, 1), 0.25, 32, 1e-12, lp).discrepancy < 1e-10);
}
