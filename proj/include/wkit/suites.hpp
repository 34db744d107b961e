#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <random>
#include <string>
#include <utility>
#include <vector>

#include "wkit/qseries.hpp"
#include "wkit/report.hpp"

namespace wkit {

struct GridSpec {
    double from = 0.5;
    double to = 2.0;
    int count = 200;
    bool log = true;

    std::vector<double> points() const;
};

struct Theorem1Options {
    std::vector<std::pair<int, int>> surfaces{{-2, 1}, {1, -2}};
    // Multiplies the resolved s; anything other than 1 moves the point off the surface.
    double s_factor = 1.0;
    // Evaluation point of the quantum space; sampled on the unit circle when absent.
    std::optional<cplx> a;
};

struct RunConfig {
    EllipticParams params;
    TruncationPolicy policy;
    std::vector<std::string> suites;
    GridSpec grid;
    std::uint64_t seed = 1;
    std::map<std::string, double> tolerances;
    bool record_timing = false;
    Theorem1Options theorem1;
};

const std::vector<std::string>& suite_names();

// Strict parse: unknown keys, wrong types and invalid values raise ConfigError.
RunConfig parse_config(const nlohmann::json& j);
RunConfig load_config(const std::string& path);

// Uniform doubles from the raw 64-bit stream so output does not depend on the
// standard library's distribution implementations.
class Sampler {
public:
    explicit Sampler(std::uint64_t seed) : eng_(seed) {}
    double uniform() { return double(eng_() >> 11) * 0x1.0p-53; }
    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }
    // Random point with modulus in [rmin, rmax] (log-uniform) and argument in [amin, amax].
    cplx polar(double rmin, double rmax, double amin, double amax);
    int pick(int n) { return int(eng_() % std::uint64_t(n)); }

private:
    std::mt19937_64 eng_;
};

std::vector<CheckReport> run_suite(const std::string& name, const RunConfig& config);

// Runs every requested suite, applies tolerance overrides and sorts by
// (suite, check) while keeping generation order within a check.
std::vector<CheckReport> run_suites(const RunConfig& config);

}  // namespace wkit
