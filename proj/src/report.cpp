#include "wkit/report.hpp"

#include <cmath>

#include "wkit/errors.hpp"

namespace wkit {

CheckReport CheckReport::make(std::string suite, std::string check, std::string anchor,
                              nlohmann::json inputs, double residual, double tolerance) {
    CheckReport r;
    r.suite = std::move(suite);
    r.check = std::move(check);
    r.anchor = std::move(anchor);
    r.inputs = std::move(inputs);
    r.residual = residual;
    r.tolerance = tolerance;
    r.finalize();
    return r;
}

void CheckReport::finalize() { pass = std::isfinite(residual) && residual <= tolerance; }

namespace {

// JSON has no infinity or NaN; encode non-finite residuals as strings.
nlohmann::json encode_real(double v) {
    if (std::isfinite(v)) return v;
    if (std::isnan(v)) return "nan";
    return v > 0 ? "inf" : "-inf";
}

double decode_real(const nlohmann::json& j) {
    if (j.is_number()) return j.get<double>();
    const auto s = j.get<std::string>();
    if (s == "nan") return std::nan("");
    if (s == "inf") return HUGE_VAL;
    if (s == "-inf") return -HUGE_VAL;
    throw ConfigError("bad real value " + s);
}

}  // namespace

void to_json(nlohmann::json& j, const CheckReport& r) {
    j = nlohmann::json{{"suite", r.suite},
                       {"check", r.check},
                       {"anchor", r.anchor},
                       {"inputs", r.inputs},
                       {"residual", encode_real(r.residual)},
                       {"tolerance", encode_real(r.tolerance)},
                       {"pass", r.pass},
                       {"wall_ms", r.wall_ms}};
}

void from_json(const nlohmann::json& j, CheckReport& r) {
    static const char* keys[] = {"suite",    "check",     "anchor", "inputs",
                                 "residual", "tolerance", "pass",   "wall_ms"};
    if (!j.is_object() || j.size() != std::size(keys)) throw ConfigError("report must have exactly the CheckReport fields");
    for (const char* k : keys)
        if (!j.contains(k)) throw ConfigError(std::string("report lacks field ") + k);
    r.suite = j.at("suite").get<std::string>();
    r.check = j.at("check").get<std::string>();
    r.anchor = j.at("anchor").get<std::string>();
    r.inputs = j.at("inputs");
    r.residual = decode_real(j.at("residual"));
    r.tolerance = decode_real(j.at("tolerance"));
    r.pass = j.at("pass").get<bool>();
    r.wall_ms = j.at("wall_ms").get<double>();
}

}  // namespace wkit
