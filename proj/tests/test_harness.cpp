#include <catch_amalgamated.hpp>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "rbfmol/fit.hpp"
#include "rbfmol/io.hpp"
#include "rbfmol/study.hpp"

using namespace rbfmol;
namespace fs = std::filesystem;
using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;

namespace {

std::vector<double> ladder(int start, int count) {
    std::vector<double> h;
    for (int m = start; m < start + count; ++m) h.push_back(std::ldexp(1.0, -m));
    return h;
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

fs::path scratch_dir(const std::string& name) {
    const fs::path d = fs::temp_directory_path() / ("rbfmol_test_" + name);
    fs::remove_all(d);
    fs::create_directories(d);
    return d;
}

json small_interp_config() {
    return json::parse(R"({
        "study": "interp_convergence",
        "basis": {"family": "polyharmonic", "n": 1, "c": 1, "p": 3},
        "datum": {"kind": "gaussian", "params": {"sigma": 1}},
        "ladder": {"start": 2, "count": 5}
    })");
}

}  // namespace

TEST_CASE("rate estimation recovers exact power laws", "[harness][fit]") {
    const auto h = ladder(1, 8);
    std::vector<double> e;
    for (double x : h) e.push_back(5.0 * x * x * x);
    const RateFit r = estimate_rate(h, e);
    CHECK_FALSE(r.exact);
    CHECK_THAT(r.slope, WithinAbs(3.0, 1e-10));
    CHECK_THAT(std::exp(r.intercept), WithinRel(5.0, 1e-9));
    for (double o : r.pairwise) CHECK_THAT(o, WithinAbs(3.0, 1e-10));
}

TEST_CASE("asymptotic rate ignores the coarse end", "[harness][fit]") {
    const auto h = ladder(3, 8);
    std::vector<double> e;
    for (double x : h) e.push_back(x * x * (1.0 + 0.1 * x));
    const double s = estimate_rate_asymptotic(h, e).slope;
    CHECK(s >= 1.95);
    CHECK(s <= 2.05);
}

TEST_CASE("plateau detection", "[harness][fit]") {
    const auto h = ladder(0, 12);
    std::vector<double> e;
    for (double x : h) e.push_back(1e-6 + std::pow(x, 4.0));
    const Plateau p = estimate_plateau(h, e);
    REQUIRE(p.found);
    CHECK_THAT(p.value, WithinRel(1e-6, 0.02));
    // a clean power law has no plateau
    std::vector<double> clean;
    for (double x : h) clean.push_back(std::pow(x, 2.0));
    CHECK_FALSE(estimate_plateau(h, clean).found);
}

TEST_CASE("exact zeros are reported rather than fitted", "[harness][fit]") {
    const auto h = ladder(1, 5);
    const std::vector<double> e = {1e-3, 1e-4, 0.0, 1e-6, 1e-7};
    CHECK(estimate_rate(h, e).exact);
    CHECK_FALSE(estimate_plateau(h, e).found);
}

TEST_CASE("FNV-1a reference vectors", "[harness][io]") {
    CHECK(fnv1a("") == 0xcbf29ce484222325ULL);
    CHECK(fnv1a("a") == 0xaf63dc4c8601ec8cULL);
    CHECK(fnv1a("foobar") == 0x85944171f73967e8ULL);
    CHECK(hex64(0xaf63dc4c8601ec8cULL) == "af63dc4c8601ec8c");
    CHECK(hex64(1) == "0000000000000001");
}

TEST_CASE("atomic writes leave no temporary behind", "[harness][io]") {
    const fs::path d = scratch_dir("atomic");
    write_file_atomic(d / "x.txt", "first\n");
    write_file_atomic(d / "x.txt", "second\n");
    CHECK(slurp(d / "x.txt") == "second\n");
    int entries = 0;
    for (const auto& e : fs::directory_iterator(d)) {
        ++entries;
        CHECK(e.path().filename() == "x.txt");
    }
    CHECK(entries == 1);
    fs::remove_all(d);
}

TEST_CASE("config validation", "[harness][config]") {
    CHECK_NOTHROW(parse_config(small_interp_config()));
    auto bad = [](auto edit) {
        json j = small_interp_config();
        edit(j);
        return j;
    };
    CHECK_THROWS_AS(parse_config(bad([](json& j) { j["ladder"]["count"] = 3; })), std::invalid_argument);
    CHECK_THROWS_AS(parse_config(bad([](json& j) { j["tolerance"] = -1.0; })), std::invalid_argument);
    CHECK_THROWS_AS(parse_config(bad([](json& j) { j["rate_tolerance"] = 0.0; })), std::invalid_argument);
    CHECK_THROWS_AS(parse_config(bad([](json& j) { j["study"] = "scheme_convergence"; })), std::invalid_argument);
    CHECK_THROWS_AS(parse_config(bad([](json& j) { j["study"] = "nonsense"; })), std::invalid_argument);
    CHECK_THROWS_AS(parse_config(bad([](json& j) { j.erase("basis"); })), std::invalid_argument);
    CHECK_THROWS(parse_config(bad([](json& j) { j["basis"]["family"] = "wendland"; })));
    CHECK_THROWS(parse_config(bad([](json& j) { j["t"] = json::array({1.0, -2.0}); })));
    CHECK_THROWS(parse_config(bad([](json& j) {
        j["study"] = "cross_validation";
        j["symbol"] = {{"kind", "heat"}};
        j["cross_validation"] = {{"J", 0}};
    })));
}

TEST_CASE("config hash ignores output location and thread count", "[harness][config]") {
    const ExperimentConfig a = parse_config(small_interp_config());
    json j = small_interp_config();
    j["output"] = {{"dir", "elsewhere"}};
    j["jobs"] = 8;
    const ExperimentConfig b = parse_config(j);
    CHECK(a.hash() == b.hash());
    CHECK(a.hash().size() == 16);
    j["ladder"]["count"] = 6;
    CHECK(parse_config(j).hash() != a.hash());
    // key order in the input does not matter
    const json reordered = json::parse(R"({"ladder": {"count": 5, "start": 2}, "datum": {"params": {"sigma": 1}, "kind": "gaussian"},
        "basis": {"p": 3, "c": 1, "n": 1, "family": "polyharmonic"}, "study": "interp_convergence"})");
    CHECK(parse_config(reordered).hash() == a.hash());
}

TEST_CASE("series CSV and SVG", "[harness][output]") {
    Series s;
    s.label = "demo";
    s.h = ladder(1, 6);
    for (double x : s.h) s.error.push_back(1e-6 + x * x);
    s.failures.assign(s.h.size(), "");
    s.predicted_rate = 2.0;
    detail::finish_series(s, 0.25, 0.2, 0.1);
    const std::string csv = series_csv(s);
    std::istringstream in(csv);
    std::string line;
    std::getline(in, line);
    CHECK(line == "h,error,order");
    int rows = 0;
    while (std::getline(in, line)) ++rows;
    CHECK(rows == 6);

    StudyResult r;
    r.config = parse_config(small_interp_config());
    r.series.push_back(s);
    const std::string svg = series_svg(r, s);
    CHECK(svg.find("<svg") != std::string::npos);
    CHECK(svg.find("slope-guide") != std::string::npos);
}

TEST_CASE("study run writes a content-addressed result directory", "[harness][output]") {
    const fs::path out = scratch_dir("run");
    ExperimentConfig cfg = parse_config(small_interp_config());
    StudyResult r = run_study(cfg);
    REQUIRE(r.series.size() == 1);
    const Series& s = r.series[0];
    CHECK(s.fit_ok);
    REQUIRE(s.predicted_rate);
    CHECK(*s.predicted_rate == 4.0);
    REQUIRE(s.rate_pass);
    CHECK(*s.rate_pass);

    const fs::path dir = emit_outputs(r, out);
    CHECK(dir == out / cfg.hash());
    for (const char* f : {"config.json", "result.json", "results.csv", "plot.svg", "run.json"}) CHECK(fs::exists(dir / f));
    const json res = json::parse(slurp(dir / "result.json"));
    CHECK(res["hash"] == cfg.hash());
    CHECK(res["series"].size() == 1);
    CHECK(res.contains("all_predictions_pass"));

    // a rerun reproduces result.json byte for byte; timings live in run.json
    const std::string first = slurp(dir / "result.json");
    StudyResult again = run_study(cfg);
    emit_outputs(again, out);
    CHECK(slurp(dir / "result.json") == first);
    fs::remove_all(out);
}

TEST_CASE("saturation studies mark their plateau guide", "[harness][output]") {
    const fs::path out = scratch_dir("saturation");
    const ExperimentConfig cfg = parse_config(json::parse(R"({
        "study": "interp_saturation",
        "basis": {"family": "gaussian", "n": 1, "c": 0.5},
        "datum": {"kind": "gaussian", "params": {"sigma": 1}},
        "ladder": {"start": 0, "count": 8}
    })"));
    StudyResult r = run_study(cfg);
    REQUIRE(r.series.size() == 1);
    CHECK(r.series[0].plateau.found);
    REQUIRE(r.series[0].plateau_in_bracket);
    CHECK(*r.series[0].plateau_in_bracket);
    const fs::path dir = emit_outputs(r, out);
    CHECK(slurp(dir / "plot.svg").find("plateau-guide") != std::string::npos);
    fs::remove_all(out);
}

TEST_CASE("constants table schema", "[harness][output]") {
    const fs::path out = scratch_dir("constants");
    const ExperimentConfig cfg = parse_config(json::parse(R"({
        "study": "constants_table",
        "basis": {"family": "multiquadric", "n": 1, "c": 1},
        "symbol": {"kind": "heat"},
        "constants": {"q": [0, 1], "sweep_c": [1, 2, 4]}
    })"));
    StudyResult r = run_study(cfg);
    REQUIRE(r.details.contains("report"));
    const json& rep = r.details["report"];
    for (const char* k : {"A_lower", "A_upper", "l_upper", "l_lower", "g_upper", "g_lower", "rho", "tails", "invariants_hold"}) {
        INFO(k);
        CHECK(rep.contains(k));
    }
    REQUIRE(r.details.contains("sweep"));
    CHECK(r.details["sweep"].size() == 3);
    const fs::path dir = emit_outputs(r, out);
    std::istringstream in(slurp(dir / "constants.csv"));
    std::string line;
    std::getline(in, line);
    CHECK(line.rfind("c,A_lower,A_upper,l_upper", 0) == 0);
    int rows = 0;
    while (std::getline(in, line)) ++rows;
    CHECK(rows == 3);
    fs::remove_all(out);
}
