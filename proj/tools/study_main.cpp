// Convergence-study CLI for the theta-scheme / Galerkin discretization of
// dX + AX dt = Q^{1/2} dW on (0,1).
//
// Exit codes: 0 success, 2 invalid config, 3 admissibility failure,
// 4 acceptance-assertion failure in --check mode.

#include "spde/study.hpp"

#include <CLI11.hpp>

#include <fstream>
#include <iostream>
#include <sstream>

namespace {

int run(const spde::StudyConfig& cfg, bool check, bool emit_plot) {
    const spde::ConvergenceReport rep = spde::run_study(cfg);

    std::string payload = cfg.format == spde::OutputFormat::csv ? spde::report_to_csv(rep)
                                                                : spde::report_to_json(rep, cfg);
    if (!cfg.out_path.empty()) {
        std::ofstream out(cfg.out_path, std::ios::binary);
        if (!out) {
            std::cerr << "error: cannot write " << cfg.out_path << "\n";
            return 2;
        }
        out << payload;
    } else {
        std::cout << payload;
    }

    if (emit_plot) {
        const std::string csv = cfg.out_path.empty() ? std::string("study.csv") : cfg.out_path;
        std::ofstream gp(csv + ".gp");
        gp << spde::gnuplot_script(rep, csv);
    }

    std::cerr << rep.study << ": " << rep.points.size() << " points";
    if (rep.fit.slope) std::cerr << ", fitted slope " << *rep.fit.slope << " (R^2 " << rep.fit.r2 << ")";
    if (rep.theory_sup > 0.0) std::cerr << ", theory sup " << rep.theory_sup;
    std::cerr << "\n";
    for (const auto& n : rep.notes) std::cerr << "note: " << n << "\n";
    if (rep.contamination_warning) std::cerr << "warning: pinned-resolution floor is not negligible\n";

    if (check) {
        std::string why;
        if (!spde::check_passes(rep, cfg, &why)) {
            std::cerr << "check failed: " << why << "\n";
            return 4;
        }
        std::cerr << "check passed\n";
    }
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"convergence studies for the implicitly time-stepped stochastic heat equation"};
    app.require_subcommand(1);

    CLI::App* study = app.add_subcommand("study", "run a convergence study from a config file");
    std::string config_path;
    study->add_option("--config", config_path, "key = value config file")->required();

    std::string theta, n_list, m_list, noise, beta0, seed, out, format;
    bool allow_unstable = false, check = false, emit_plot = false;
    study->add_option("--theta", theta, "override theta");
    study->add_option("--N-list", n_list, "override N_list (comma separated)");
    study->add_option("--M-list", m_list, "override M_list (comma separated)");
    study->add_option("--noise", noise, "override noise kind");
    study->add_option("--beta0", beta0, "override beta0");
    study->add_option("--seed", seed, "override seed");
    study->add_option("--out", out, "override output path");
    study->add_option("--format", format, "csv | json");
    study->add_flag("--allow-unstable-theta", allow_unstable, "permit theta <= 1/2 (instability demo)");
    study->add_flag("--check", check, "exit 4 when the configured acceptance assertion fails");
    study->add_flag("--emit-plot-script", emit_plot, "write a gnuplot script next to the CSV");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 2;
    }

    try {
        spde::StudyConfig cfg = spde::parse_config_file(config_path);
        // Flag overrides reuse the config parser so the syntax stays identical.
        std::ostringstream overrides;
        if (!theta.empty()) overrides << "theta = " << theta << "\n";
        if (!n_list.empty()) overrides << "N_list = " << n_list << "\n";
        if (!m_list.empty()) overrides << "M_list = " << m_list << "\n";
        if (!noise.empty()) overrides << "noise = " << noise << "\n";
        if (!beta0.empty()) overrides << "beta0 = " << beta0 << "\n";
        if (!seed.empty()) overrides << "seed = " << seed << "\n";
        if (!out.empty()) overrides << "out = " << out << "\n";
        if (!format.empty()) overrides << "format = " << format << "\n";
        if (!overrides.str().empty()) {
            std::ifstream in(config_path);
            std::stringstream buf;
            buf << in.rdbuf() << "\n" << overrides.str();
            cfg = spde::parse_config_text(buf.str(), config_path);
        }
        if (allow_unstable) cfg.allow_unstable_theta = true;
        return run(cfg, check, emit_plot);
    } catch (const spde::AdmissibilityError& e) {
        std::cerr << "admissibility error: " << e.what() << "\n";
        return 3;
    } catch (const spde::ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
}
