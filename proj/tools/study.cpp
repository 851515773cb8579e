// study: command-line front end of the experiment harness.

#include <cstdio>
#include <iostream>
#include <thread>

#include <CLI11.hpp>

#include "rbfmol/rbfmol.hpp"

using namespace rbfmol;

namespace {

void print_summary(const StudyResult& r) {
    std::cout << to_string(r.config.study) << " -> " << r.directory.string() << '\n';
    for (const Series& s : r.series) {
        std::cout << "  " << s.label << ": ";
        if (s.fit_ok) std::cout << "fitted rate " << s.fit.slope << " (asymptotic " << s.asymptotic_fit.slope << ")";
        else std::cout << "no fit";
        if (s.predicted_rate) std::cout << ", predicted " << *s.predicted_rate << (s.rate_pass.value_or(false) ? " PASS" : " FAIL");
        if (s.plateau.found) std::cout << ", plateau " << s.plateau.value;
        if (s.plateau_in_bracket) std::cout << (*s.plateau_in_bracket ? " (in bracket)" : " (outside bracket)");
        std::cout << '\n';
        for (std::size_t i = 0; i < s.failures.size(); ++i)
            if (!s.failures[i].empty()) std::cout << "    h=" << s.h[i] << " failed: " << s.failures[i] << '\n';
    }
    if (r.details.contains("discrepancy"))
        std::cout << "  cross-validation discrepancy " << r.details["discrepancy"].get<double>() << " (budget "
                  << r.details["budget"].get<double>() << ")\n";
    if (r.details.contains("rho_exponent")) std::cout << "  rho exponent " << r.details["rho_exponent"].get<double>() << '\n';
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Convergence and saturation studies for lattice RBF interpolation and method-of-lines schemes"};
    app.require_subcommand(1);
    std::string out_dir;
    double tol = 0.0;
    int jobs = static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
    app.add_option("--out", out_dir, "Output root directory (results go under <out>/<hash>/)");
    app.add_option("--tol", tol, "Lattice-sum tail tolerance (overrides the config)")->check(CLI::PositiveNumber);
    app.add_option("--jobs", jobs, "Worker threads for ladder points")->check(CLI::PositiveNumber);

    std::string config_path;
    auto* run = app.add_subcommand("run", "Run a study from a JSON config and write CSV/JSON/SVG outputs");
    run->add_option("config", config_path, "Study config (JSON)")->required()->check(CLI::ExistingFile);

    std::string basis_path, symbol_path;
    auto* constants = app.add_subcommand("constants", "Print the constants report of a basis (JSON)");
    constants->add_option("basis", basis_path, "Basis spec {family,n,c,p} (JSON)")->required()->check(CLI::ExistingFile);
    constants->add_option("--symbol", symbol_path, "Symbol spec {kind,params} (JSON)")->check(CLI::ExistingFile);

    std::string validate_path;
    auto* validate = app.add_subcommand("validate", "Check a study config without running it");
    validate->add_option("config", validate_path, "Study config (JSON)")->required()->check(CLI::ExistingFile);

    // global flags are accepted after the subcommand too
    for (auto* sub : {run, constants, validate}) sub->fallthrough();

    CLI11_PARSE(app, argc, argv);

    try {
        if (*run) {
            ExperimentConfig cfg = load_config(config_path);
            if (tol > 0.0) cfg.tolerance = tol;
            if (!out_dir.empty()) cfg.out_dir = out_dir;
            cfg.jobs = jobs;
            StudyResult r = run_study(cfg);
            emit_outputs(r, cfg.out_dir);
            print_summary(r);
            return 0;
        }
        if (*constants) {
            const BasisFunction b = read_json_file(basis_path).get<BasisSpec>().build();
            std::optional<Symbol> a;
            json symbol_doc;
            if (!symbol_path.empty()) {
                symbol_doc = read_json_file(symbol_path);
                a = symbol_doc.get<SymbolSpec>().build(b.n);
            }
            const double t = tol > 0.0 ? tol : 1e-14;
            const json rep = to_json_value(constants_report(b, {0.0, 1.0, 2.0}, a ? &*a : nullptr, t));
            if (!out_dir.empty()) {
                const std::filesystem::path dir = std::filesystem::path(out_dir) / hex64(fnv1a(rep["basis"].dump() + symbol_doc.dump()));
                std::filesystem::create_directories(dir);
                write_file_atomic(dir / "constants.json", rep.dump(2) + "\n");
                std::cerr << "wrote " << (dir / "constants.json").string() << '\n';
            }
            std::cout << rep.dump(2) << '\n';
            return 0;
        }
        if (*validate) {
            const ExperimentConfig cfg = load_config(validate_path);
            std::cout << "valid: " << to_string(cfg.study) << ", hash " << cfg.hash() << ", " << cfg.ladder.count << " ladder points\n";
            return 0;
        }
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
    return 0;
}
