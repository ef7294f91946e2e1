#pragma once

#include "spde/law.hpp"
#include "spde/mc.hpp"

#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace spde {

struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct AdmissibilityError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

enum class StudyKind { time_weak, space_weak, time_strong, space_strong, deterministic, validate_mc };
enum class NoiseKind { white, diagonal_power, kernel, zero };
enum class SpaceKind { spectral, fem_p1 };
enum class OutputFormat { csv, json };

struct StudyConfig {
    StudyKind kind = StudyKind::time_weak;
    int modes = 64;                     // spectral truncation K of the model
    NoiseKind noise = NoiseKind::white;
    double beta0 = 0.0;                 // diagonal_power exponent
    std::string kernel_file;            // kernel cosine coefficients, one per line
    double alpha = 0.51;                // declared regularity indices
    double beta = 0.0;
    double theta = 1.0;
    bool allow_unstable_theta = false;
    double total_time = 1.0;
    std::vector<long> n_list = {8, 16, 32, 64, 128, 256};
    SpaceKind space = SpaceKind::spectral;
    std::vector<int> m_list;            // spectral dims; empty means {modes}
    std::vector<int> elements_list = {4, 8, 16, 32};  // P1 element counts
    std::string x0_spec = "zero";       // zero | mode:<k>[:<amp>]
    std::string g_spec = "all";         // all | mode:<k> | c1,c2,...
    double phase = 0.0;
    std::uint64_t mc_paths = 100000;
    std::uint64_t seed = 12345;
    std::string out_path;
    OutputFormat format = OutputFormat::csv;
    std::optional<double> check_slope_min;
    std::optional<double> check_slope_max;
};

/// Parses a flat `key = value` config file (UTF-8, '#' comments). Unknown
/// keys or malformed values raise ConfigError.
StudyConfig parse_config_file(const std::string& path);
StudyConfig parse_config_text(const std::string& text, const std::string& origin = "<config>");

struct StudyPoint {
    double resolution = 0.0;  // dt for time studies, h for space studies
    double dt = 0.0;
    double h = 0.0;
    double error = 0.0;
    double stderr_ = 0.0;     // nonzero only for validate-mc
};

struct RateFit {
    std::optional<double> slope;  // reported only with >= 3 usable points
    double intercept = 0.0;       // log2 of the fitted constant
    double r2 = 0.0;
    std::vector<std::string> notes;
};

/// OLS of log2(error) on log2(resolution). Points with error <= 0 are
/// excluded with a note; fewer than two left means no fit at all, fewer than
/// three means the fit is computed but no slope is claimed.
RateFit fit_rate(std::span<const StudyPoint> points);

struct ConvergenceReport {
    std::string study;
    std::vector<StudyPoint> points;
    RateFit fit;
    double theory_sup = 0.0;          // gamma_sup or 2 gamma_sup, as applicable
    bool contamination_warning = false;
    double floor_error = 0.0;         // error frozen by the pinned resolution
    double coarsest_error = 0.0;
    std::uint64_t seed = 0;
    std::vector<std::string> notes;
};

ConvergenceReport run_study(const StudyConfig& cfg);

/// Serializations. Numbers carry 17 significant digits; identical configs
/// produce byte-identical bytes.
std::string report_to_csv(const ConvergenceReport& report);
std::string report_to_json(const ConvergenceReport& report, const StudyConfig& cfg);
std::string gnuplot_script(const ConvergenceReport& report, const std::string& csv_path);

/// True when every point satisfies the --check criterion for its study kind
/// (slope window when configured; the 4-stderr match for validate-mc).
bool check_passes(const ConvergenceReport& report, const StudyConfig& cfg, std::string* why = nullptr);

const char* study_kind_name(StudyKind kind);

}  // namespace spde
