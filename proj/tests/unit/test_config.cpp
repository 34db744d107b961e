#include <doctest.h>

#include <algorithm>
#include <cmath>

#include "wkit/suites.hpp"

using namespace wkit;
using nlohmann::json;

TEST_CASE("config defaults and value forms") {
    const auto cfg = parse_config(json::object());
    CHECK(cfg.params.N == 2);
    CHECK(cfg.params.q == cplx(0.3));
    CHECK(cfg.params.s == cplx(0.2));
    CHECK(cfg.suites == suite_names());
    CHECK(cfg.seed == 1);
    CHECK_FALSE(cfg.record_timing);

    const auto c2 = parse_config(json::parse(R"({"params": {"N": 3, "q": "0.4,0.1", "s": [0.2, -0.1], "c": 0.5}})"));
    CHECK(c2.params.q == cplx(0.4, 0.1));
    CHECK(c2.params.s == cplx(0.2, -0.1));
    CHECK(c2.params.c == cplx(0.5));

    // p fixes s = -sqrt(p) on the principal branch.
    const auto c3 = parse_config(json::parse(R"({"params": {"p": 0.09}})"));
    CHECK(std::abs(c3.params.s + 0.3) < 1e-15);

    const auto c4 = parse_config(json::parse(
        R"({"suites": ["alpha-identity"], "grid": {"from": 0.6, "to": 1.5, "count": 7, "log": false},
            "tolerances": {"n0": 1e-9}, "theorem1": {"surfaces": [[-1, -1]], "s_factor": 1.02}})"));
    CHECK(c4.suites == std::vector<std::string>{"alpha-identity"});
    CHECK(c4.grid.points().size() == 7);
    CHECK(c4.grid.points().front() == doctest::Approx(0.6));
    CHECK(c4.grid.points().back() == doctest::Approx(1.5));
    CHECK(c4.tolerances.at("n0") == 1e-9);
    CHECK(c4.theorem1.surfaces == std::vector<std::pair<int, int>>{{-1, -1}});
}

TEST_CASE("config rejects bad input") {
    const char* bad[] = {
        R"({"bogus": 1})",
        R"({"params": {"N": 2, "r": 1}})",
        R"({"params": {"N": 7}})",
        R"({"params": {"N": 2.5}})",
        R"({"params": {"q": 1.5}})",
        R"({"params": {"s": 0.2, "p": 0.04}})",
        R"({"params": {"q": "0.3;0.1"}})",
        R"({"suites": ["theta-identities", "nope"]})",
        R"({"suites": "theta-identities"})",
        R"({"grid": {"count": 0}})",
        R"({"grid": {"log": 1}})",
        R"({"seed": -3})",
        R"({"tolerances": {"nope": 1e-3}})",
        R"({"tolerances": {"n0": -1}})",
        R"({"policy": {"tail_eps": 1e-3}})",
        R"({"theorem1": {"surfaces": [[1]]}})",
        R"([1, 2])",
    };
    for (const char* text : bad) {
        CAPTURE(text);
        CHECK_THROWS_AS(parse_config(json::parse(text)), ConfigError);
    }
    CHECK_THROWS_AS(load_config("/nonexistent/config.json"), ConfigError);
}

TEST_CASE("check reports") {
    auto r = CheckReport::make("s", "c", "anchor", {{"x", 1}}, 1e-9, 1e-9);
    CHECK(r.pass);
    r.residual = std::nextafter(1e-9, 1.0);
    r.finalize();
    CHECK_FALSE(r.pass);
    CHECK_FALSE(CheckReport::make("s", "c", "a", {}, NAN, 1.0).pass);

    // Serialization keeps exactly the report fields and round-trips.
    const auto orig = CheckReport::make("suite", "check", "anchor text", {{"z", complex_json({0.1, -2.5})}},
                                        1.2345678901234567e-13, 1e-10);
    const json j = orig;
    CHECK(j.size() == 8);
    for (const char* key : {"suite", "check", "anchor", "inputs", "residual", "tolerance", "pass", "wall_ms"})
        CHECK(j.contains(key));
    const auto back = j.get<CheckReport>();
    CHECK(back.residual == orig.residual);
    CHECK(back.inputs == orig.inputs);
    CHECK(json(back).dump() == j.dump());
}

TEST_CASE("sampler is reproducible") {
    Sampler a(7), b(7);
    for (int i = 0; i < 50; ++i) CHECK(a.uniform() == b.uniform());
    Sampler c(7);
    for (int i = 0; i < 1000; ++i) {
        const cplx z = c.polar(0.7, 1.3, -0.5, 0.5);
        CHECK(std::abs(z) >= 0.7 - 1e-15);
        CHECK(std::abs(z) <= 1.3 + 1e-15);
        CHECK(std::abs(std::arg(z)) <= 0.5 + 1e-15);
    }
}

TEST_CASE("suite runs are deterministic, ordered and honour tolerances") {
    auto cfg = parse_config(json::parse(R"({"suites": ["n0", "theta-identities", "alpha-identity"], "seed": 11})"));
    const auto a = run_suites(cfg);
    const auto b = run_suites(cfg);
    CHECK(json(a).dump() == json(b).dump());
    CHECK(std::is_sorted(a.begin(), a.end(), [](const CheckReport& x, const CheckReport& y) {
        return std::tie(x.suite, x.check) < std::tie(y.suite, y.check);
    }));
    for (const auto& r : a) CHECK(r.wall_ms == 0.0);

    // A different seed moves the sampled points.
    cfg.seed = 12;
    CHECK(json(run_suites(cfg)).dump() != json(a).dump());

    // A zero tolerance override turns the inexact n0 checks red.
    cfg.tolerances["n0"] = 0.0;
    const auto strict = run_suites(cfg);
    const bool any_red = std::any_of(strict.begin(), strict.end(),
                                     [](const CheckReport& r) { return r.suite == "n0" && !r.pass; });
    CHECK(any_red);
}
