#include "spde/study.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include <nlohmann/json.hpp>

namespace spde {

namespace {

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r\n");
    if (b == std::string::npos) return "";
    const auto e = s.find_last_not_of(" \t\r\n");
    return s.substr(b, e - b + 1);
}

double parse_double(const std::string& v, const std::string& key) {
    try {
        std::size_t pos = 0;
        const double d = std::stod(v, &pos);
        if (pos != v.size()) throw std::invalid_argument(v);
        return d;
    } catch (const std::exception&) {
        throw ConfigError("invalid number for '" + key + "': " + v);
    }
}

long parse_long(const std::string& v, const std::string& key) {
    long out = 0;
    const auto res = std::from_chars(v.data(), v.data() + v.size(), out);
    if (res.ec != std::errc() || res.ptr != v.data() + v.size())
        throw ConfigError("invalid integer for '" + key + "': " + v);
    return out;
}

template <typename T>
std::vector<T> parse_list(const std::string& v, const std::string& key) {
    std::vector<T> out;
    std::stringstream ss(v);
    std::string item;
    while (std::getline(ss, item, ',')) {
        item = trim(item);
        if (item.empty()) continue;
        out.push_back(static_cast<T>(parse_long(item, key)));
    }
    if (out.empty()) throw ConfigError("empty list for '" + key + "'");
    return out;
}

std::string fmt17(double x) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

struct InitialDatum {
    Vector coeffs;  // A-basis
};

InitialDatum parse_x0(const std::string& spec, int modes) {
    InitialDatum x;
    x.coeffs = Vector::Zero(modes);
    if (spec == "zero") return x;
    if (spec.rfind("mode:", 0) == 0) {
        std::stringstream ss(spec.substr(5));
        std::string kpart, apart;
        std::getline(ss, kpart, ':');
        double amp = 1.0;
        if (std::getline(ss, apart, ':')) amp = parse_double(trim(apart), "x0");
        const long k = parse_long(trim(kpart), "x0");
        if (k < 1 || k > modes) throw ConfigError("x0 mode index out of range: " + spec);
        x.coeffs[k - 1] = amp;
        return x;
    }
    throw ConfigError("invalid x0 spec: " + spec + " (want zero | mode:<k>[:<amp>])");
}

Vector parse_g(const std::string& spec, int modes) {
    if (spec == "all") return Vector::Ones(modes);
    if (spec.rfind("mode:", 0) == 0) {
        const long k = parse_long(trim(spec.substr(5)), "g");
        if (k < 1 || k > modes) throw ConfigError("g mode index out of range: " + spec);
        Vector g = Vector::Zero(modes);
        g[k - 1] = 1.0;
        return g;
    }
    std::vector<double> coeffs;
    std::stringstream ss(spec);
    std::string item;
    while (std::getline(ss, item, ',')) {
        item = trim(item);
        if (!item.empty()) coeffs.push_back(parse_double(item, "g"));
    }
    if (coeffs.empty() || coeffs.size() > static_cast<std::size_t>(modes))
        throw ConfigError("invalid g coefficient list: " + spec);
    Vector g = Vector::Zero(modes);
    for (std::size_t i = 0; i < coeffs.size(); ++i) g[static_cast<Eigen::Index>(i)] = coeffs[i];
    return g;
}

CovarianceModel build_noise(const StudyConfig& cfg, const SpectralModel& model) {
    switch (cfg.noise) {
        case NoiseKind::white: return white_covariance(cfg.modes);
        case NoiseKind::diagonal_power: return diagonal_power_covariance(model, cfg.beta0);
        case NoiseKind::kernel:
            if (cfg.kernel_file.empty()) throw ConfigError("noise = kernel needs kernel_file");
            return kernel_covariance_from_file(cfg.modes, cfg.kernel_file);
        case NoiseKind::zero:
            return CovarianceModel(Matrix::Zero(cfg.modes, cfg.modes), CovarianceModel::Kind::custom, "zero");
    }
    throw ConfigError("unreachable noise kind");
}

bool is_time_study(StudyKind k) {
    return k == StudyKind::time_weak || k == StudyKind::time_strong ||
           k == StudyKind::deterministic || k == StudyKind::validate_mc;
}

}  // namespace

const char* study_kind_name(StudyKind kind) {
    switch (kind) {
        case StudyKind::time_weak: return "time-weak";
        case StudyKind::space_weak: return "space-weak";
        case StudyKind::time_strong: return "time-strong";
        case StudyKind::space_strong: return "space-strong";
        case StudyKind::deterministic: return "deterministic";
        case StudyKind::validate_mc: return "validate-mc";
    }
    return "?";
}

StudyConfig parse_config_text(const std::string& text, const std::string& origin) {
    StudyConfig cfg;
    std::istringstream in(text);
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        line = trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw ConfigError(origin + ":" + std::to_string(lineno) + ": expected key = value");
        const std::string key = trim(line.substr(0, eq));
        const std::string val = trim(line.substr(eq + 1));
        if (val.empty()) continue;  // empty value means keep the default

        if (key == "study") {
            if (val == "time-weak") cfg.kind = StudyKind::time_weak;
            else if (val == "space-weak") cfg.kind = StudyKind::space_weak;
            else if (val == "time-strong") cfg.kind = StudyKind::time_strong;
            else if (val == "space-strong") cfg.kind = StudyKind::space_strong;
            else if (val == "deterministic") cfg.kind = StudyKind::deterministic;
            else if (val == "validate-mc") cfg.kind = StudyKind::validate_mc;
            else throw ConfigError("unknown study kind: " + val);
        } else if (key == "K") {
            cfg.modes = static_cast<int>(parse_long(val, key));
        } else if (key == "noise") {
            if (val == "white") cfg.noise = NoiseKind::white;
            else if (val == "diagonal") cfg.noise = NoiseKind::diagonal_power;
            else if (val == "kernel") cfg.noise = NoiseKind::kernel;
            else if (val == "zero") cfg.noise = NoiseKind::zero;
            else throw ConfigError("unknown noise kind: " + val);
        } else if (key == "beta0") {
            cfg.beta0 = parse_double(val, key);
        } else if (key == "kernel_file") {
            cfg.kernel_file = val;
        } else if (key == "alpha") {
            cfg.alpha = parse_double(val, key);
        } else if (key == "beta") {
            cfg.beta = parse_double(val, key);
        } else if (key == "theta") {
            cfg.theta = parse_double(val, key);
        } else if (key == "allow_unstable_theta") {
            cfg.allow_unstable_theta = (val == "1" || val == "true" || val == "yes");
        } else if (key == "T") {
            cfg.total_time = parse_double(val, key);
        } else if (key == "N_list") {
            cfg.n_list = parse_list<long>(val, key);
        } else if (key == "space") {
            if (val == "spectral") cfg.space = SpaceKind::spectral;
            else if (val == "p1") cfg.space = SpaceKind::fem_p1;
            else throw ConfigError("unknown space kind: " + val);
        } else if (key == "m_list") {
            cfg.m_list = parse_list<int>(val, key);
        } else if (key == "M_list") {
            cfg.elements_list = parse_list<int>(val, key);
        } else if (key == "x0") {
            cfg.x0_spec = val;
        } else if (key == "g") {
            cfg.g_spec = val;
        } else if (key == "phase") {
            cfg.phase = parse_double(val, key);
        } else if (key == "mc_paths") {
            cfg.mc_paths = static_cast<std::uint64_t>(parse_long(val, key));
        } else if (key == "seed") {
            cfg.seed = static_cast<std::uint64_t>(parse_long(val, key));
        } else if (key == "out") {
            cfg.out_path = val;
        } else if (key == "format") {
            if (val == "csv") cfg.format = OutputFormat::csv;
            else if (val == "json") cfg.format = OutputFormat::json;
            else throw ConfigError("unknown format: " + val);
        } else if (key == "check_slope_min") {
            cfg.check_slope_min = parse_double(val, key);
        } else if (key == "check_slope_max") {
            cfg.check_slope_max = parse_double(val, key);
        } else {
            throw ConfigError(origin + ":" + std::to_string(lineno) + ": unknown key '" + key + "'");
        }
    }
    if (cfg.modes < 1) throw ConfigError("K must be >= 1");
    if (cfg.m_list.empty()) cfg.m_list = {cfg.modes};
    return cfg;
}

StudyConfig parse_config_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file: " + path);
    std::stringstream buf;
    buf << in.rdbuf();
    return parse_config_text(buf.str(), path);
}

RateFit fit_rate(std::span<const StudyPoint> points) {
    RateFit out;
    std::vector<double> x, y;
    for (const auto& p : points) {
        if (!(p.error > 0.0) || !std::isfinite(p.error)) {
            out.notes.push_back("excluded nonpositive error at resolution " + fmt17(p.resolution));
            continue;
        }
        x.push_back(std::log2(p.resolution));
        y.push_back(std::log2(p.error));
    }
    if (x.size() < 2) {
        out.notes.push_back("fewer than two usable points, no fit");
        return out;
    }
    const LineFit f = fit_line(x, y);
    out.intercept = f.intercept;
    out.r2 = f.r2;
    if (x.size() >= 3) out.slope = f.slope;
    else out.notes.push_back("only two usable points, slope not claimed");
    return out;
}

ConvergenceReport run_study(const StudyConfig& cfg) {
    try {
        admissible_gamma(cfg.alpha, cfg.beta);
    } catch (const std::invalid_argument& e) {
        throw AdmissibilityError(e.what());
    }
    const RegularityIndices idx = admissible_gamma(cfg.alpha, cfg.beta);

    if (cfg.n_list.empty()) throw ConfigError("N_list must not be empty");
    const bool time_study = is_time_study(cfg.kind);
    if (time_study && cfg.n_list.size() < 2 && cfg.kind != StudyKind::validate_mc)
        throw ConfigError("time studies need at least two N values");

    // Everything the grid loops construct is validated here, before any
    // parallel region, so the loops below cannot throw.
    for (long n : cfg.n_list)
        if (n < 1) throw ConfigError("N_list entries must be >= 1");
    if (!(cfg.theta >= 0.0 && cfg.theta <= 1.0) ||
        (cfg.theta <= 0.5 && !cfg.allow_unstable_theta))
        throw ConfigError("theta must satisfy 1/2 < theta <= 1 (or set allow_unstable_theta)");
    if (!(cfg.total_time > 0.0)) throw ConfigError("T must be positive");
    if (cfg.space == SpaceKind::spectral) {
        if (cfg.m_list.empty()) throw ConfigError("m_list must not be empty for spectral spaces");
        for (int m : cfg.m_list)
            if (m < 1 || m > cfg.modes) throw ConfigError("m_list entries must lie in [1, K]");
    } else {
        if (cfg.elements_list.empty()) throw ConfigError("M_list must not be empty for p1 spaces");
        for (int m : cfg.elements_list)
            if (m < 2) throw ConfigError("M_list entries must be >= 2");
    }

    ConvergenceReport rep;
    rep.study = study_kind_name(cfg.kind);
    rep.seed = cfg.seed;

    const SpectralModel model = build_dirichlet_laplacian_1d(cfg.modes);
    StudyConfig effective = cfg;
    if (cfg.kind == StudyKind::deterministic && cfg.noise != NoiseKind::zero) {
        effective.noise = NoiseKind::zero;
        rep.notes.push_back("deterministic study: noise forced to zero");
    }
    const CovarianceModel q = build_noise(effective, model);
    const InitialDatum x0 = parse_x0(cfg.x0_spec, cfg.modes);
    Functional phi = cosine_functional(parse_g(cfg.g_spec, cfg.modes), cfg.phase);
    const std::span<const double> x0span{x0.coeffs.data(), static_cast<std::size_t>(x0.coeffs.size())};

    auto make_space = [&](int size) {
        return cfg.space == SpaceKind::spectral ? build_spectral_space(size, model)
                                                : build_p1_space(size, model);
    };

    const GaussianState cont = continuous_law(model, q, x0span, cfg.total_time);
    const double e_cont = expect_functional(cont, phi);

    if (time_study) {
        const std::vector<int>& sizes = cfg.space == SpaceKind::spectral ? cfg.m_list : cfg.elements_list;
        const int pinned = *std::max_element(sizes.begin(), sizes.end());
        const DiscreteSpace space = make_space(pinned);

        rep.points.resize(cfg.n_list.size());
        if (cfg.kind == StudyKind::validate_mc) {
            for (std::size_t i = 0; i < cfg.n_list.size(); ++i) {
                const long n = cfg.n_list[i];
                const ThetaScheme scheme(cfg.theta, cfg.total_time, n, cfg.allow_unstable_theta);
                const GaussianState disc = discrete_law(space, q, scheme, x0span);
                const double exact = expect_functional(disc, phi, &space);
                const SchemeSampler sampler(space, q, scheme, x0span);
                const NoiseStream stream(cfg.seed ^ (static_cast<std::uint64_t>(n) * 0x9E3779B97F4A7C15ull));
                const McEstimate est = mc_expect_functional(sampler, phi, cfg.mc_paths, stream);
                rep.points[i] = {scheme.dt(), scheme.dt(), space.mesh_width(),
                                 std::abs(est.estimate - exact), est.stderr_};
            }
        } else {
#pragma omp parallel for schedule(dynamic)
            for (std::ptrdiff_t i = 0; i < static_cast<std::ptrdiff_t>(cfg.n_list.size()); ++i) {
                const long n = cfg.n_list[static_cast<std::size_t>(i)];
                const ThetaScheme scheme(cfg.theta, cfg.total_time, n, cfg.allow_unstable_theta);
                double err = 0.0;
                if (cfg.kind == StudyKind::time_strong)
                    err = std::sqrt(std::max(0.0, strong_error_sq(model, space, q, scheme, x0span)));
                else
                    err = weak_error(model, space, q, scheme, x0span, phi);
                rep.points[static_cast<std::size_t>(i)] = {scheme.dt(), scheme.dt(),
                                                           space.mesh_width(), err, 0.0};
            }
        }

        // Space-error floor of the pinned space: the semidiscrete law for weak
        // errors, the large-N limit of the coupled error for strong ones.
        if (cfg.kind != StudyKind::validate_mc) {
            if (cfg.kind == StudyKind::time_strong) {
                const ThetaScheme fine(cfg.theta, cfg.total_time, 1L << 22, cfg.allow_unstable_theta);
                rep.floor_error = std::sqrt(std::max(0.0, strong_error_sq(model, space, q, fine, x0span)));
            } else {
                const GaussianState semi = semidiscrete_law(space, q, x0span, cfg.total_time);
                rep.floor_error = std::abs(expect_functional(semi, phi, &space) - e_cont);
            }
            double coarsest = 0.0;
            double coarsest_dt = -1.0;
            for (const auto& p : rep.points)
                if (p.dt > coarsest_dt) { coarsest_dt = p.dt; coarsest = p.error; }
            rep.coarsest_error = coarsest;
            if (rep.floor_error > 0.05 * coarsest) {
                rep.contamination_warning = true;
                rep.notes.push_back("space floor " + fmt17(rep.floor_error) +
                                    " exceeds 5% of the coarsest time error " + fmt17(coarsest));
            }
        }
    } else {
        const std::vector<int>& sizes = cfg.space == SpaceKind::spectral ? cfg.m_list : cfg.elements_list;
        if (sizes.size() < 2) throw ConfigError("space studies need at least two space resolutions");
        const long pinned_n = *std::max_element(cfg.n_list.begin(), cfg.n_list.end());
        const ThetaScheme scheme(cfg.theta, cfg.total_time, pinned_n, cfg.allow_unstable_theta);

        rep.points.resize(sizes.size());
#pragma omp parallel for schedule(dynamic)
        for (std::ptrdiff_t i = 0; i < static_cast<std::ptrdiff_t>(sizes.size()); ++i) {
            const DiscreteSpace space = make_space(sizes[static_cast<std::size_t>(i)]);
            double err = 0.0;
            if (cfg.kind == StudyKind::space_strong)
                err = std::sqrt(std::max(0.0, strong_error_sq(model, space, q, scheme, x0span)));
            else
                err = weak_error(model, space, q, scheme, x0span, phi);
            rep.points[static_cast<std::size_t>(i)] = {space.mesh_width(), scheme.dt(),
                                                       space.mesh_width(), err, 0.0};
        }

        // Time-error floor at the pinned N, measured on the exact subspace.
        const DiscreteSpace full = build_spectral_space(cfg.modes, model);
        rep.floor_error =
            cfg.kind == StudyKind::space_strong
                ? std::sqrt(std::max(0.0, strong_error_sq(model, full, q, scheme, x0span)))
                : weak_error(model, full, q, scheme, x0span, phi);
        double coarsest = 0.0;
        double coarsest_h = -1.0;
        for (const auto& p : rep.points)
            if (p.h > coarsest_h) { coarsest_h = p.h; coarsest = p.error; }
        rep.coarsest_error = coarsest;
        if (rep.floor_error > 0.05 * coarsest) {
            rep.contamination_warning = true;
            rep.notes.push_back("time floor " + fmt17(rep.floor_error) +
                                " exceeds 5% of the coarsest space error " + fmt17(coarsest));
        }
    }

    // Sort by decreasing resolution so CSV rows go coarse to fine.
    std::sort(rep.points.begin(), rep.points.end(),
              [](const StudyPoint& a, const StudyPoint& b) { return a.resolution > b.resolution; });
    rep.fit = fit_rate(rep.points);
    // Prefactors bend the log-log line at coarse resolutions; when the fit is
    // poor the coarsest point may be dropped (recorded in the output).
    if (rep.fit.slope && rep.fit.r2 < 0.98 && rep.points.size() >= 4) {
        RateFit refit = fit_rate(std::span<const StudyPoint>(rep.points).subspan(1));
        if (refit.slope && refit.r2 > rep.fit.r2) {
            refit.notes.push_back("dropped the coarsest point: R^2 improved from " +
                                  fmt17(rep.fit.r2) + " to " + fmt17(refit.r2));
            rep.fit = std::move(refit);
        }
    }
    switch (cfg.kind) {
        case StudyKind::time_weak: rep.theory_sup = idx.gamma_sup; break;
        case StudyKind::space_weak: rep.theory_sup = 2.0 * idx.gamma_sup; break;
        case StudyKind::time_strong: rep.theory_sup = 0.5 * idx.gamma_sup; break;
        case StudyKind::space_strong: rep.theory_sup = idx.gamma_sup; break;
        case StudyKind::deterministic: rep.theory_sup = 1.0; break;
        case StudyKind::validate_mc: rep.theory_sup = 0.0; break;
    }
    return rep;
}

std::string report_to_csv(const ConvergenceReport& report) {
    std::string out = "study,resolution,dt,h,error,stderr,seed\n";
    for (const auto& p : report.points) {
        out += report.study;
        out += ',' + fmt17(p.resolution) + ',' + fmt17(p.dt) + ',' + fmt17(p.h) + ',' +
               fmt17(p.error) + ',' + fmt17(p.stderr_) + ',' + std::to_string(report.seed) + '\n';
    }
    return out;
}

std::string report_to_json(const ConvergenceReport& report, const StudyConfig& cfg) {
    nlohmann::ordered_json j;
    j["study"] = report.study;
    j["config"] = {
        {"K", cfg.modes},
        {"noise", cfg.noise == NoiseKind::white          ? "white"
                  : cfg.noise == NoiseKind::diagonal_power ? "diagonal"
                  : cfg.noise == NoiseKind::kernel         ? "kernel"
                                                           : "zero"},
        {"beta0", cfg.beta0},
        {"kernel_file", cfg.kernel_file},
        {"alpha", cfg.alpha},
        {"beta", cfg.beta},
        {"theta", cfg.theta},
        {"T", cfg.total_time},
        {"N_list", cfg.n_list},
        {"space", cfg.space == SpaceKind::spectral ? "spectral" : "p1"},
        {"m_list", cfg.m_list},
        {"M_list", cfg.elements_list},
        {"x0", cfg.x0_spec},
        {"g", cfg.g_spec},
        {"phase", cfg.phase},
        {"mc_paths", cfg.mc_paths},
        {"seed", cfg.seed},
    };
    j["points"] = nlohmann::ordered_json::array();
    for (const auto& p : report.points)
        j["points"].push_back({{"resolution", p.resolution},
                               {"dt", p.dt},
                               {"h", p.h},
                               {"error", p.error},
                               {"stderr", p.stderr_}});
    if (report.fit.slope) j["fit"]["slope"] = *report.fit.slope;
    j["fit"]["intercept_log2"] = report.fit.intercept;
    j["fit"]["r2"] = report.fit.r2;
    j["theory_sup"] = report.theory_sup;
    j["contamination_warning"] = report.contamination_warning;
    j["floor_error"] = report.floor_error;
    j["notes"] = report.notes;
    for (const auto& n : report.fit.notes) j["notes"].push_back(n);
    return j.dump(2) + "\n";
}

std::string gnuplot_script(const ConvergenceReport& report, const std::string& csv_path) {
    std::string s;
    s += "set datafile separator ','\n";
    s += "set logscale xy 2\n";
    s += "set xlabel 'resolution'\nset ylabel 'error'\n";
    s += "set key left top\n";
    s += "set title '" + report.study + " study'\n";
    if (report.fit.slope)
        s += "fit_label = 'fitted slope " + fmt17(*report.fit.slope) + "'\n";
    s += "plot '" + csv_path + "' every ::1 using 2:5 with linespoints title '" + report.study + "'";
    if (report.fit.slope)
        s += ", 2**(" + fmt17(report.fit.intercept) + ") * x**(" + fmt17(*report.fit.slope) +
             ") title fit_label";
    s += "\n";
    return s;
}

bool check_passes(const ConvergenceReport& report, const StudyConfig& cfg, std::string* why) {
    if (cfg.kind == StudyKind::validate_mc) {
        for (const auto& p : report.points) {
            if (p.error > 4.0 * p.stderr_) {
                if (why) *why = "validate-mc: |estimate - exact| = " + fmt17(p.error) +
                                " exceeds 4 x stderr = " + fmt17(4.0 * p.stderr_);
                return false;
            }
        }
        return true;
    }
    if (cfg.check_slope_min || cfg.check_slope_max) {
        if (!report.fit.slope) {
            if (why) *why = "no fitted slope to check";
            return false;
        }
        if (cfg.check_slope_min && *report.fit.slope < *cfg.check_slope_min) {
            if (why) *why = "slope " + fmt17(*report.fit.slope) + " below " + fmt17(*cfg.check_slope_min);
            return false;
        }
        if (cfg.check_slope_max && *report.fit.slope > *cfg.check_slope_max) {
            if (why) *why = "slope " + fmt17(*report.fit.slope) + " above " + fmt17(*cfg.check_slope_max);
            return false;
        }
    }
    return true;
}

}  // namespace spde
