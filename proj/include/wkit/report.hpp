#pragma once

#include <chrono>
#include <complex>
#include <string>

#include <json.hpp>

namespace wkit {

// One verification outcome. pass is always residual <= tolerance.
struct CheckReport {
    std::string suite;
    std::string check;
    std::string anchor;
    nlohmann::json inputs = nlohmann::json::object();
    double residual = 0.0;
    double tolerance = 0.0;
    bool pass = false;
    double wall_ms = 0.0;

    static CheckReport make(std::string suite, std::string check, std::string anchor,
                            nlohmann::json inputs, double residual, double tolerance);
    // Recompute pass from residual and tolerance.
    void finalize();
};

void to_json(nlohmann::json& j, const CheckReport& r);
void from_json(const nlohmann::json& j, CheckReport& r);

// Complex numbers travel as [re, im].
inline nlohmann::json complex_json(std::complex<double> z) {
    return nlohmann::json::array({z.real(), z.imag()});
}

// Measures wall time of a scope in milliseconds.
class Stopwatch {
public:
    Stopwatch() : start_(std::chrono::steady_clock::now()) {}
    double elapsed_ms() const {
        return std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start_)
            .count();
    }

private:
    std::chrono::steady_clock::time_point start_;
};

}  // namespace wkit
