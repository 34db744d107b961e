#include "wkit/suites.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <functional>
#include <numbers>
#include <set>
#include <sstream>
#include <tuple>

#include "wkit/abelianity.hpp"
#include "wkit/errors.hpp"
#include "wkit/fusion.hpp"
#include "wkit/rmatrix.hpp"
#include "wkit/wgen.hpp"

namespace wkit {

namespace {

using nlohmann::json;
constexpr double kPi = std::numbers::pi;
constexpr int kResamples = 5;

// FNV-1a, so per-suite seeds do not depend on std::hash.
std::uint64_t fnv1a(const std::string& s) {
    std::uint64_t h = 1469598103934665603ull;
    for (unsigned char ch : s) {
        h ^= ch;
        h *= 1099511628211ull;
    }
    return h;
}

// Draws a point, evaluates, and redraws on PoleHit up to kResamples times.
template <class Point>
CheckReport sampled(Sampler& rng, const std::function<Point(Sampler&)>& draw,
                    const std::function<CheckReport(const Point&)>& eval, const char* suite,
                    const char* check) {
    std::string last;
    for (int attempt = 0; attempt <= kResamples; ++attempt) {
        const Point p = draw(rng);
        try {
            Stopwatch sw;
            auto r = eval(p);
            r.wall_ms = sw.elapsed_ms();
            return r;
        } catch (const PoleHit& e) {
            last = e.what();
        }
    }
    return CheckReport::make(suite, check, "point sampling exhausted by poles",
                             {{"pole_hits", kResamples + 1}, {"error", last}}, HUGE_VAL, 0.0);
}

CheckReport failure(const std::string& suite, const std::string& check, const std::exception& e,
                    json inputs = json::object()) {
    inputs["error"] = e.what();
    return CheckReport::make(suite, check, "check could not be evaluated", std::move(inputs),
                             HUGE_VAL, 0.0);
}

json params_json(const EllipticParams& p) {
    return {{"N", p.N}, {"q", complex_json(p.q)}, {"s", complex_json(p.s)}, {"c", complex_json(p.c)}};
}

// Evaluation point of the quantum space. L(z) = R-hat(z/a) uses principal powers, so a stays
// within pi/6 of 1 and z/a keeps |arg| < pi/2 for the sampled z.
cplx eval_point(Sampler& rng) { return std::polar(1.0, rng.uniform(-kPi / 6, kPi / 6)); }

double rel(cplx a, cplx b) { return std::abs(a - b) / std::max({1.0, std::abs(a), std::abs(b)}); }

// Times a check that needs no sampled point.
template <class F>
CheckReport timed(F&& f) {
    Stopwatch sw;
    auto r = f();
    r.wall_ms = sw.elapsed_ms();
    return r;
}

// ---------------------------------------------------------------- scalar layer

std::vector<CheckReport> theta_suite(const RunConfig& cfg, Sampler& rng) {
    const char* S = "theta-identities";
    const auto& P = cfg.params;
    const auto& pol = cfg.policy;
    const int N = P.N;
    std::vector<CheckReport> out;
    const double chars[5] = {0.0, 0.5, -0.5, 1.0 / N, -1.0 / N};

    struct ThetaPoint { double g1, g2; cplx xi, tau; };
    for (int i = 0; i < 100; ++i)
        out.push_back(sampled<ThetaPoint>(
            rng,
            [&](Sampler& r) {
                ThetaPoint t{chars[r.pick(5)], chars[r.pick(5)], 0.0, 0.0};
                t.tau = {r.uniform(-0.5, 0.5), r.uniform(0.3, 3.0)};
                t.xi = std::polar(std::sqrt(r.uniform()), r.uniform(-kPi, kPi));
                return t;
            },
            [&](const ThetaPoint& t) {
                const cplx a = qseries::theta_char_series(t.g1, t.g2, t.xi, t.tau, pol);
                const cplx b = qseries::theta_char_product(t.g1, t.g2, t.xi, t.tau, pol);
                return CheckReport::make(S, "series-vs-product",
                                         "characteristic theta: series and product forms agree",
                                         {{"g1", t.g1}, {"g2", t.g2}, {"xi", complex_json(t.xi)},
                                          {"tau", complex_json(t.tau)}},
                                         std::abs(a - b) / (1.0 + std::abs(b)), 1e-10);
            },
            S, "series-vs-product"));

    using Pair = std::pair<cplx, cplx>;
    auto draw_az = [](Sampler& r) {
        return Pair{std::polar(r.uniform(0.3, 0.8), r.uniform(-kPi, kPi)),
                    r.polar(0.5, 1.5, -kPi, kPi)};
    };
    for (int i = 0; i < 20; ++i) {
        out.push_back(sampled<Pair>(
            rng, draw_az,
            [&](const Pair& az) {
                const auto [a, z] = az;
                const cplx p = a * a;
                auto T = [&](cplx x) { return qseries::theta_big(x, p, pol); };
                const cplx t1 = T(p * z), t2 = T(z) / z;
                const cplx t3 = T(a * z), t4 = T(a / z);
                const double r1 = std::abs(t1 + t2) / std::max({std::abs(t1), std::abs(t2), 1e-300});
                const double r2 = std::abs(t3 - t4) / std::max({std::abs(t3), std::abs(t4), 1e-300});
                return CheckReport::make(S, "theta-quasi-periodicity",
                                         "quasi-periodicity and reflection of the Jacobi theta function",
                                         {{"a", complex_json(a)}, {"z", complex_json(z)}},
                                         std::max(r1, r2), 1e-10);
            },
            S, "theta-quasi-periodicity"));
        out.push_back(sampled<Pair>(
            rng, draw_az,
            [&](const Pair& az) {
                const auto [a, z] = az;
                const cplx a2 = a * a;
                cplx a2N = 1.0;
                for (int j = 0; j < N; ++j) a2N *= a2;
                cplx lhs = 1.0, step = 1.0;
                for (int j = 0; j < N; ++j, step *= a2) lhs *= qseries::theta_big(step * z, a2N, pol);
                const cplx rhs = std::pow(qseries::pochhammer(a2N, {a2N}, pol), N) /
                                 qseries::pochhammer(a2, {a2}, pol) * qseries::theta_big(z, a2, pol);
                return CheckReport::make(S, "theta-product-identity",
                                         "product of N nome-a^{2N} thetas equals one nome-a^2 theta",
                                         {{"N", N}, {"a", complex_json(a)}, {"z", complex_json(z)}},
                                         std::abs(lhs - rhs) / std::max(std::abs(rhs), 1e-300), 1e-10);
            },
            S, "theta-product-identity"));
    }

    // tau_N and U on the principal-branch-safe domain.
    const double centre = -N * std::arg(P.q) / 2.0;
    auto draw_safe = [&](Sampler& r) { return r.polar(0.6, 1.4, centre - kPi / 4, centre + kPi / 4); };
    for (int i = 0; i < 20; ++i) {
        out.push_back(sampled<cplx>(
            rng, draw_safe,
            [&](const cplx& z) {
                const cplx t = qseries::tau_N(z, P, pol);
                const cplx per = qseries::tau_N(P.qpow(double(N)) * z, P, pol);
                const cplx inv = qseries::tau_N(1.0 / z, P, pol);
                const double r = std::max(std::abs(per / t - 1.0), std::abs(t * inv - 1.0));
                return CheckReport::make(S, "tau-periodicity-inversion",
                                         "tau_N is q^N-periodic and inverts under z -> 1/z",
                                         {{"N", N}, {"q", complex_json(P.q)}, {"z", complex_json(z)}}, r,
                                         1e-10);
            },
            S, "tau-periodicity-inversion"));
        out.push_back(sampled<cplx>(
            rng, draw_safe,
            [&](const cplx& z) {
                const cplx u = qseries::U(z, P, pol);
                double r = std::max(rel(u, qseries::U(1.0 / z, P, pol)),
                                    rel(u, qseries::U(P.qpow(double(N)) * z, P, pol)));
                cplx prod = 1.0;
                for (int j = 1; j <= N; ++j) prod *= qseries::U(P.qpow(double(j)) * z, P, pol);
                r = std::max(r, std::abs(prod - 1.0));
                if (rmatrix::in_safe_domain(z)) r = std::max(r, rel(u, qseries::U_from_tau(z, P, pol)));
                return CheckReport::make(S, "U-identities",
                                         "U is inversion symmetric, q^N-periodic and its q-ladder product is 1",
                                         {{"N", N}, {"q", complex_json(P.q)}, {"z", complex_json(z)}}, r,
                                         1e-10);
            },
            S, "U-identities"));
    }

    if (std::abs(P.p()) < 1.0 - 1e-6)
        for (int i = 0; i < 10; ++i)
            out.push_back(sampled<cplx>(
                rng, [&](Sampler& r) { return r.polar(0.6, 1.4, -kPi, kPi); },
                [&](const cplx& z) {
                    const cplx z2 = z * z;
                    const cplx k1 = qseries::kappa_inv(z2, P, pol);
                    const cplx k2 = qseries::kappa_inv(1.0 / z2, P, pol);
                    const cplx deep = qseries::kappa_inv(z2, P, pol.refined());
                    const double r = std::max(std::abs(k1 * k2 - 1.0), rel(k1, deep));
                    return CheckReport::make(S, "kappa-inversion",
                                             "normalization kappa inverts under z^2 -> z^-2",
                                             {{"params", params_json(P)}, {"z", complex_json(z)}}, r,
                                             1e-10);
                },
                S, "kappa-inversion"));

    for (int m = -3; m <= 3; ++m)
        for (int n = -3; n <= 3; ++n) {
            if (m == 0 && n == 0) continue;
            // The two forms coincide only on the surface, so (s, c) is resolved per pair.
            EllipticParams Ps;
            try {
                Ps = wgen::resolve_surface(m, n, N, P.q, m + n == 0 ? double(N) / n : 0.0).params;
            } catch (const Error& e) {
                out.push_back(failure(S, "Y-two-forms", e, {{"m", m}, {"n", n}}));
                continue;
            }
            out.push_back(sampled<cplx>(
                rng, [&](Sampler& r) { return r.polar(0.7, 1.4, -kPi, kPi); },
                [&, Ps](const cplx& x) {
                    const auto f = qseries::Y_mn_forms(x, m, n, Ps, pol);
                    const cplx back = qseries::Y_mn(1.0 / x, m, n, Ps, pol);
                    const double r = std::max(f.difference, std::abs(f.product_form * back - 1.0));
                    return CheckReport::make(S, "Y-two-forms",
                                             "both written forms of Y_{m,n} agree and Y(x) Y(1/x) = 1",
                                             {{"params", params_json(Ps)}, {"m", m}, {"n", n},
                                              {"x", complex_json(x)}},
                                             r, 1e-10);
                },
                S, "Y-two-forms"));
        }

    for (int i = 0; i < 10; ++i)
        out.push_back(sampled<cplx>(
            rng, [&](Sampler& r) { return r.polar(0.7, 1.4, -kPi, kPi); },
            [&](const cplx& x) {
                const cplx y = qseries::Y_FF(x, P, pol) * qseries::Y_FF(1.0 / x, P, pol);
                const cplx i = qseries::I_series(x, P, pol) + qseries::I_series(1.0 / x, P, pol);
                return CheckReport::make(S, "inversion-symmetries",
                                         "Y_FF(x) Y_FF(1/x) = 1 and I(x) + I(1/x) = 0",
                                         {{"params", params_json(P)}, {"x", complex_json(x)}},
                                         std::max(std::abs(y - 1.0), std::abs(i)), 1e-10);
            },
            S, "inversion-symmetries"));
    return out;
}

// ------------------------------------------------------------------- R-matrix

std::vector<CheckReport> rmatrix_suite(const RunConfig& cfg, Sampler& rng) {
    const char* S = "rmatrix-properties";
    const auto& P = cfg.params;
    const auto& pol = cfg.policy;
    std::vector<CheckReport> out;
    try {
        P.require_elliptic();
    } catch (const Error& e) {
        out.push_back(failure(S, "elliptic-nome", e, params_json(P)));
        return out;
    }
    using Pair = std::pair<cplx, cplx>;
    auto draw = [](Sampler& r) {
        return Pair{r.polar(0.7, 1.3, -kPi / 3, kPi / 3), r.polar(0.7, 1.3, -kPi / 3, kPi / 3)};
    };
    auto one = [&](const char* check, std::function<CheckReport(const Pair&)> f) {
        out.push_back(sampled<Pair>(rng, draw, f, S, check));
    };
    for (int i = 0; i < 20; ++i) {
        one("yang-baxter-R", [&](const Pair& p) {
            return rmatrix::check_yang_baxter(p.first, p.second, P, RKind::R, 1.0, pol);
        });
        one("yang-baxter-Rhat", [&](const Pair& p) {
            return rmatrix::check_yang_baxter(p.first, p.second, P, RKind::Rhat, 1.0, pol);
        });
        one("unitarity", [&](const Pair& p) { return rmatrix::check_unitarity(p.first, P, 1.0, pol); });
        one("hat-unitarity",
            [&](const Pair& p) { return rmatrix::check_hat_unitarity(p.first, P, 1.0, pol); });
        one("crossing-R",
            [&](const Pair& p) { return rmatrix::check_crossing(p.first, P, RKind::R, 1.0, pol); });
        one("crossing-Rhat",
            [&](const Pair& p) { return rmatrix::check_crossing(p.first, P, RKind::Rhat, 1.0, pol); });
        one("antisymmetry", [&](const Pair& p) {
            // Fold the argument into (-pi/2, 0].
            const cplx z = std::polar(std::abs(p.first), -std::abs(std::arg(p.first)) * 1.4);
            return rmatrix::check_antisymmetry(z, P, 1.0, pol);
        });
        one("quasi-periodicity",
            [&](const Pair& p) { return rmatrix::check_quasi_periodicity(p.first, P, 1.0, pol); });
        const int a = i % 5 - 2;
        one("quasi-periodicity-M", [&](const Pair& p) {
            return rmatrix::check_quasi_periodicity_M(p.first, a, P, i % 2 == 1, 1.0, pol);
        });
        one("zn-symmetry",
            [&](const Pair& p) { return rmatrix::check_zn_symmetry(p.first, P, RKind::R, pol); });
    }
    try {
        out.push_back(timed([&] { return rmatrix::check_regularity(P, 1.0, pol); }));
        out.push_back(timed([&] { return rmatrix::check_kernel_at_q(P, pol); }));
    } catch (const Error& e) {
        out.push_back(failure(S, "regularity", e, params_json(P)));
    }
    return out;
}

// --------------------------------------------------------------------- fusion

std::vector<CheckReport> fusion_suite(const RunConfig& cfg, Sampler& rng) {
    const char* S = "fusion-identities";
    const auto& P = cfg.params;
    const int N = P.N;
    std::vector<CheckReport> out;
    for (int k = 1; k <= N; ++k) out.push_back(timed([&] { return tensor::check_antisymmetrizer(k, N); }));
    try {
        P.require_elliptic();
    } catch (const Error& e) {
        out.push_back(failure(S, "elliptic-nome", e, params_json(P)));
        return out;
    }
    auto draw = [](Sampler& r) { return r.polar(0.7, 1.3, -kPi / 3, kPi / 3); };
    for (int k = 2; k <= N; ++k)
        for (int kp = 1; kp <= N; ++kp) {
            if (k + kp > 5 || std::pow(double(N), k + kp) > 729.0) continue;
            for (int i = 0; i < 3; ++i) {
                out.push_back(sampled<cplx>(
                    rng, draw,
                    [&](const cplx& x) { return tensor::check_fusion_identities(k, kp, P, x, 1.0, cfg.policy); },
                    S, "projector-identities"));
                out.push_back(sampled<cplx>(
                    rng, draw,
                    [&](const cplx& x) {
                        return tensor::check_fused_crossing_unitarity(k, kp, P, x, 1.0, cfg.policy);
                    },
                    S, "fused-crossing-unitarity"));
            }
        }
    return out;
}

// ----------------------------------------------------------- W generators

struct ResolvedSurface {
    SurfaceSpec spec;
    EvalRep rep;
};

// Resolves each configured surface at c = 0; unusable ones become failed reports.
std::vector<ResolvedSurface> resolve_surfaces(const RunConfig& cfg, Sampler& rng, const char* suite,
                                              std::vector<CheckReport>& out) {
    std::vector<ResolvedSurface> result;
    for (auto [m, n] : cfg.theorem1.surfaces) {
        json in = {{"N", cfg.params.N}, {"q", complex_json(cfg.params.q)}, {"m", m}, {"n", n},
                   {"s_factor", cfg.theorem1.s_factor}};
        try {
            auto spec = wgen::resolve_surface(m, n, cfg.params.N, cfg.params.q, 0.0);
            in["s"] = complex_json(spec.params.s);
            in["p_warning"] = spec.p_warning;
            if (spec.p_warning)
                throw ModulusOutOfRange("surface point has |p| >= 1; R-matrix checks are unavailable");
            spec.params = spec.params.with_s(spec.params.s * cfg.theorem1.s_factor);
            const cplx a = cfg.theorem1.a.value_or(eval_point(rng));
            in["a"] = complex_json(a);
            out.push_back(CheckReport::make(suite, "surface-resolution",
                                            "s^m (s*)^n = q^{-N} at the resolved point", in,
                                            spec.surface_residual, 1e-12));
            result.push_back({spec, EvalRep{spec.params, a}});
        } catch (const Error& e) {
            out.push_back(failure(suite, "surface-resolution", e, in));
        }
    }
    return result;
}

using ZW = std::pair<cplx, cplx>;
ZW draw_zw(Sampler& r) {
    return {r.polar(0.7, 1.3, -kPi / 3, kPi / 3), r.polar(0.7, 1.3, -kPi / 3, kPi / 3)};
}

std::vector<CheckReport> theorem1_suite(const RunConfig& cfg, Sampler& rng) {
    const char* S = "theorem1-exchange";
    const auto& pol = cfg.policy;
    std::vector<CheckReport> out;
    for (const auto& [spec, rep] : resolve_surfaces(cfg, rng, S, out)) {
        const int N = spec.params.N;
        out.push_back(sampled<ZW>(rng, draw_zw,
                                  [&](const ZW& p) { return wgen::check_rll(p.first, p.second, rep, pol); },
                                  S, "RLL"));
        for (int k = 1; k <= N; ++k) {
            for (int i = 0; i < 3; ++i)
                out.push_back(sampled<ZW>(
                    rng, draw_zw,
                    [&](const ZW& p) { return wgen::exchange_residual_tL(k, p.first, p.second, spec, rep, pol); },
                    S, "tL-exchange"));
            out.push_back(sampled<ZW>(
                rng, draw_zw,
                [&](const ZW& p) { return wgen::check_qantisym(k, p.first, spec, rep, pol); }, S,
                "Q-antisymmetrizer"));
        }
        // t^{(N)} commutes with L(w) without any surface condition.
        auto off = spec;
        off.params = spec.params.with_s(spec.params.s * 1.02);
        const EvalRep off_rep{off.params, rep.a};
        out.push_back(sampled<ZW>(
            rng, draw_zw,
            [&](const ZW& p) {
                auto r = wgen::exchange_residual_tL(N, p.first, p.second, off, off_rep, pol);
                r.check = "tL-exchange-kN-off-surface";
                return r;
            },
            S, "tL-exchange-kN-off-surface"));
    }
    return out;
}

std::vector<CheckReport> corollary2_suite(const RunConfig& cfg, Sampler& rng) {
    const char* S = "corollary2-exchange";
    const auto& pol = cfg.policy;
    std::vector<CheckReport> out;
    for (const auto& [spec, rep] : resolve_surfaces(cfg, rng, S, out)) {
        const int N = spec.params.N;
        for (int k = 1; k <= N; ++k)
            for (int kp = 1; kp <= N; ++kp) {
                for (int i = 0; i < 2; ++i)
                    out.push_back(sampled<ZW>(
                        rng, draw_zw,
                        [&](const ZW& p) {
                            return wgen::exchange_residual_tt(k, kp, p.first, p.second, spec, rep, pol);
                        },
                        S, "tt-exchange"));
                out.push_back(sampled<ZW>(
                    rng, draw_zw,
                    [&](const ZW& p) {
                        return wgen::check_prefactor_consistency(k, kp, p.first, p.second, spec, pol);
                    },
                    S, "prefactor-consistency"));
            }
    }
    return out;
}

std::vector<CheckReport> qdet_suite(const RunConfig& cfg, Sampler& rng) {
    const char* S = "qdet";
    const auto& P = cfg.params;
    const auto& pol = cfg.policy;
    const int N = P.N;
    std::vector<CheckReport> out;
    for (int m = -N; m <= N; ++m) out.push_back(timed([&] { return wgen::check_trace_MA(m, N); }));
    if (N > 4) return out;
    try {
        P.require_elliptic();
        const EvalRep rep{P, eval_point(rng)};
        for (int i = 0; i < 3; ++i)
            out.push_back(sampled<cplx>(
                rng, [](Sampler& r) { return r.polar(0.7, 1.3, -kPi / 3, kPi / 3); },
                [&](const cplx& z) { return wgen::qdet_extract(z, rep, pol).report; }, S,
                "qdet-proportionality"));
    } catch (const Error& e) {
        out.push_back(failure(S, "qdet-proportionality", e, params_json(P)));
    }
    std::vector<CheckReport> surf;
    for (const auto& [spec, rep] : resolve_surfaces(cfg, rng, S, surf))
        for (int i = 0; i < 2; ++i)
            out.push_back(sampled<cplx>(
                rng, [](Sampler& r) { return r.polar(0.7, 1.3, -kPi / 3, kPi / 3); },
                [&](const cplx& z) { return wgen::check_t_qdet(z, spec, rep, pol); }, S, "t-qdet"));
    // Surface failures matter here too; successful resolutions are reported by the exchange suites.
    for (auto& r : surf)
        if (!r.pass) out.push_back(r);
    return out;
}

std::vector<CheckReport> n0_suite(const RunConfig& cfg, Sampler& rng) {
    const char* S = "n0";
    const auto& P = cfg.params;
    std::vector<CheckReport> out;
    try {
        P.require_elliptic();
    } catch (const Error& e) {
        out.push_back(failure(S, "elliptic-nome", e, params_json(P)));
        return out;
    }
    const EvalRep rep{P, eval_point(rng)};
    for (int m = 0; m < P.N; ++m)
        for (int k = 1; k <= P.N; ++k) {
            try {
                out.push_back(timed([&] { return wgen::n0_check(k, m, rep, cfg.policy); }));
            } catch (const Error& e) {
                out.push_back(failure(S, "n0-symmetric-polynomial", e, {{"k", k}, {"m", m}}));
            }
        }
    return out;
}

std::vector<CheckReport> abelianity_suite(const RunConfig& cfg, Sampler&) {
    using qseries::AbelBranch;
    std::vector<qseries::AbelInstance> instances = {
        {AbelBranch::abel1, 2, -3, 2, 1},        {AbelBranch::abel1, 3, 2, -1, 1},
        {AbelBranch::abel2, 2, 1, 1, 2},         {AbelBranch::abel2, 3, -1, 1, 1},
        {AbelBranch::abel3, 1, 2, 1, 2},         {AbelBranch::abel3, -1, 3, 1, 1},
        {AbelBranch::abel4, -3, 3, 0, 1},        {AbelBranch::abel4, -5, 5, 0, 1},
        {AbelBranch::equal_twist, 1, 1, 1, 2},
    };
    std::vector<cplx> grid;
    for (double x : cfg.grid.points()) grid.push_back(x);
    std::vector<CheckReport> out;
    for (const auto& inst : instances) {
        try {
            out.push_back(timed([&] {
                return qseries::abelianity_check(inst, cfg.params.N, cfg.params.q, grid, 1.0, cfg.policy);
            }));
        } catch (const Error& e) {
            out.push_back(failure("abelianity", qseries::to_string(inst.branch), e,
                                  {{"m", inst.m}, {"n", inst.n}}));
        }
    }
    return out;
}

std::vector<CheckReport> critical_suite(const RunConfig& cfg, Sampler& rng) {
    const char* S = "critical-poisson";
    const auto& P = cfg.params;
    const auto& pol = cfg.policy;
    const int N = P.N;
    std::vector<CheckReport> out;
    for (int k = 1; k <= N; ++k)
        for (int kp = 1; kp <= N; ++kp) {
            if (k + kp > 5) continue;
            for (int i = 0; i < 5; ++i)
                out.push_back(sampled<cplx>(
                    rng, [](Sampler& r) { return r.polar(0.6, 1.6, -kPi, kPi); },
                    [&](const cplx& x) { return wgen::check_Y_critical(x, k, kp, P, pol); }, S,
                    "Y-critical"));
            const auto ann = qseries::f_cr_modes_annulus(k, kp, P);
            const double lo = std::isfinite(ann.outer) ? std::pow(ann.inner, 0.8) : 0.5;
            const double hi = std::isfinite(ann.outer) ? std::pow(ann.outer, 0.8) : 2.0;
            for (int i = 0; i < 50; ++i)
                out.push_back(sampled<cplx>(
                    rng, [&](Sampler& r) { return r.polar(lo, hi, -kPi, kPi); },
                    [&](const cplx& x) { return wgen::critical_poisson_check(k, kp, x, P, 1e-4, pol); },
                    S, "f_cr-three-way"));
            // With k or k' equal to N the function vanishes identically and x = 1 sits on
            // poles of individual I terms.
            if (std::max(k, kp) < N) try {
                out.push_back(timed([&] { return wgen::critical_poisson_check(k, kp, 1.0, P, 1e-4, pol); }));
            } catch (const Error& e) {
                out.push_back(failure(S, "f_cr-three-way", e, {{"k", k}, {"kprime", kp}, {"x", 1.0}}));
            }
        }
    if (std::abs(P.p()) < 1.0 - 1e-6)
        for (int k = 1; k <= std::min(N, 2); ++k)
            for (int kp = 1; kp <= std::min(N, 2); ++kp) {
                if (std::pow(double(N), k + kp) > 256.0) continue;
                for (int i = 0; i < 2; ++i) {
                    auto draw = [](Sampler& r) { return r.polar(0.85, 1.1, 0.1, 0.4); };
                    out.push_back(sampled<cplx>(
                        rng, draw, [&](const cplx& x) { return tensor::check_M_identity(x, k, kp, P, pol); },
                        S, "M-identity"));
                    out.push_back(sampled<cplx>(
                        rng, draw,
                        [&](const cplx& x) {
                            return tensor::check_M_derivative(x, k, kp, P, 1e-4, false, pol);
                        },
                        S, "M-derivative"));
                }
            }
    return out;
}

std::vector<CheckReport> alpha_suite(const RunConfig&, Sampler&) {
    return {timed([] { return wgen::alpha_identity_check(4, 4); })};
}

using SuiteFn = std::vector<CheckReport> (*)(const RunConfig&, Sampler&);

const std::vector<std::pair<std::string, SuiteFn>>& registry() {
    static const std::vector<std::pair<std::string, SuiteFn>> r = {
        {"theta-identities", theta_suite},       {"rmatrix-properties", rmatrix_suite},
        {"fusion-identities", fusion_suite},     {"theorem1-exchange", theorem1_suite},
        {"corollary2-exchange", corollary2_suite}, {"qdet", qdet_suite},
        {"n0", n0_suite},                        {"abelianity", abelianity_suite},
        {"critical-poisson", critical_suite},    {"alpha-identity", alpha_suite},
    };
    return r;
}

// ------------------------------------------------------------------- config

[[noreturn]] void bad(const std::string& msg) { throw ConfigError(msg); }

void only_keys(const json& j, const std::string& where, std::initializer_list<const char*> allowed) {
    if (!j.is_object()) bad(where + " must be an object");
    for (auto it = j.begin(); it != j.end(); ++it) {
        if (std::none_of(allowed.begin(), allowed.end(), [&](const char* k) { return it.key() == k; }))
            bad("unknown key '" + it.key() + "' in " + where);
    }
}

double real_of(const json& j, const std::string& where) {
    if (!j.is_number()) bad(where + " must be a number");
    return j.get<double>();
}

int int_of(const json& j, const std::string& where) {
    if (!j.is_number_integer()) bad(where + " must be an integer");
    return j.get<int>();
}

// A number, a [re, im] array, or a "re,im" string.
cplx complex_of(const json& j, const std::string& where) {
    if (j.is_number()) return j.get<double>();
    if (j.is_array() && j.size() == 2 && j[0].is_number() && j[1].is_number())
        return {j[0].get<double>(), j[1].get<double>()};
    if (j.is_string()) {
        const auto s = j.get<std::string>();
        std::istringstream is(s);
        double re = 0, im = 0;
        char comma = 0;
        if (is >> re >> comma >> im && comma == ',' && (is >> std::ws).eof()) return {re, im};
    }
    bad(where + " must be a number, a [re, im] pair or a \"re,im\" string");
}

}  // namespace

cplx Sampler::polar(double rmin, double rmax, double amin, double amax) {
    const double r = std::exp(uniform(std::log(rmin), std::log(rmax)));
    return std::polar(r, uniform(amin, amax));
}

std::vector<double> GridSpec::points() const {
    std::vector<double> out;
    for (int i = 0; i < count; ++i) {
        const double t = count == 1 ? 0.0 : double(i) / (count - 1);
        out.push_back(log ? std::exp(std::log(from) + t * (std::log(to) - std::log(from)))
                          : from + t * (to - from));
    }
    return out;
}

const std::vector<std::string>& suite_names() {
    static const std::vector<std::string> names = [] {
        std::vector<std::string> v;
        for (const auto& [n, f] : registry()) v.push_back(n);
        return v;
    }();
    return names;
}

RunConfig parse_config(const json& j) {
    only_keys(j, "config",
              {"params", "policy", "suites", "grid", "seed", "tolerances", "record_timing", "theorem1"});
    RunConfig cfg;
    cfg.suites = suite_names();

    int N = 2;
    cplx q = 0.3, s = 0.2, c = 0.0;
    if (j.contains("params")) {
        const auto& p = j["params"];
        only_keys(p, "params", {"N", "q", "s", "p", "c"});
        if (p.contains("s") && p.contains("p")) bad("params accepts s or p, not both");
        if (p.contains("N")) N = int_of(p["N"], "params.N");
        if (p.contains("q")) q = complex_of(p["q"], "params.q");
        if (p.contains("s")) s = complex_of(p["s"], "params.s");
        // The designated value of -p^{1/2} with the principal square root.
        if (p.contains("p")) s = -std::sqrt(complex_of(p["p"], "params.p"));
        if (p.contains("c")) c = complex_of(p["c"], "params.c");
    }
    if (N < 2 || N > 6) bad("params.N must lie in 2..6");
    try {
        cfg.params = EllipticParams::make(N, q, s, c);
    } catch (const Error& e) {
        bad(std::string("params: ") + e.what());
    }

    if (j.contains("policy")) {
        const auto& p = j["policy"];
        only_keys(p, "policy", {"tail_eps", "max_terms"});
        if (p.contains("tail_eps")) cfg.policy.tail_eps = real_of(p["tail_eps"], "policy.tail_eps");
        if (p.contains("max_terms")) cfg.policy.max_terms = int_of(p["max_terms"], "policy.max_terms");
        try {
            cfg.policy.validate();
        } catch (const Error& e) {
            bad(std::string("policy: ") + e.what());
        }
    }

    if (j.contains("suites")) {
        const auto& s = j["suites"];
        if (!s.is_array() || s.empty()) bad("suites must be a non-empty array of names");
        cfg.suites.clear();
        std::set<std::string> seen;
        for (const auto& e : s) {
            if (!e.is_string()) bad("suite names must be strings");
            const auto name = e.get<std::string>();
            if (std::find(suite_names().begin(), suite_names().end(), name) == suite_names().end())
                bad("unknown suite '" + name + "'");
            if (seen.insert(name).second) cfg.suites.push_back(name);
        }
    }

    if (j.contains("grid")) {
        const auto& g = j["grid"];
        only_keys(g, "grid", {"from", "to", "count", "log"});
        if (g.contains("from")) cfg.grid.from = real_of(g["from"], "grid.from");
        if (g.contains("to")) cfg.grid.to = real_of(g["to"], "grid.to");
        if (g.contains("count")) cfg.grid.count = int_of(g["count"], "grid.count");
        if (g.contains("log")) {
            if (!g["log"].is_boolean()) bad("grid.log must be a boolean");
            cfg.grid.log = g["log"].get<bool>();
        }
    }
    if (cfg.grid.count < 1 || cfg.grid.count > 100000) bad("grid.count must lie in 1..100000");
    if (!(cfg.grid.from < cfg.grid.to)) bad("grid.from must be below grid.to");
    if (cfg.grid.log && cfg.grid.from <= 0) bad("a logarithmic grid needs grid.from > 0");

    if (j.contains("seed")) {
        if (!j["seed"].is_number_unsigned()) bad("seed must be a non-negative integer");
        cfg.seed = j["seed"].get<std::uint64_t>();
    }

    if (j.contains("tolerances")) {
        const auto& t = j["tolerances"];
        if (!t.is_object()) bad("tolerances must be an object keyed by suite");
        for (auto it = t.begin(); it != t.end(); ++it) {
            if (std::find(suite_names().begin(), suite_names().end(), it.key()) == suite_names().end())
                bad("tolerance for unknown suite '" + it.key() + "'");
            const double v = real_of(it.value(), "tolerances." + it.key());
            if (!(v >= 0.0)) bad("tolerances must be non-negative");
            cfg.tolerances[it.key()] = v;
        }
    }

    if (j.contains("record_timing")) {
        if (!j["record_timing"].is_boolean()) bad("record_timing must be a boolean");
        cfg.record_timing = j["record_timing"].get<bool>();
    }

    if (j.contains("theorem1")) {
        const auto& t = j["theorem1"];
        only_keys(t, "theorem1", {"surfaces", "s_factor", "a"});
        if (t.contains("surfaces")) {
            const auto& s = t["surfaces"];
            if (!s.is_array() || s.empty()) bad("theorem1.surfaces must be a non-empty array");
            cfg.theorem1.surfaces.clear();
            for (const auto& e : s) {
                if (!e.is_array() || e.size() != 2) bad("each surface is an [m, n] pair");
                cfg.theorem1.surfaces.emplace_back(int_of(e[0], "surface m"), int_of(e[1], "surface n"));
            }
        }
        if (t.contains("s_factor")) {
            cfg.theorem1.s_factor = real_of(t["s_factor"], "theorem1.s_factor");
            if (!(cfg.theorem1.s_factor > 0)) bad("theorem1.s_factor must be positive");
        }
        if (t.contains("a")) {
            cfg.theorem1.a = complex_of(t["a"], "theorem1.a");
            if (*cfg.theorem1.a == 0.0) bad("theorem1.a must be nonzero");
        }
    }
    return cfg;
}

RunConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot read config file '" + path + "'");
    json j;
    try {
        j = json::parse(in);
    } catch (const json::parse_error& e) {
        throw ConfigError(std::string("malformed JSON: ") + e.what());
    }
    return parse_config(j);
}

std::vector<CheckReport> run_suite(const std::string& name, const RunConfig& config) {
    for (const auto& [n, fn] : registry()) {
        if (n != name) continue;
        Sampler rng(config.seed ^ fnv1a(name));
        auto reports = fn(config, rng);
        for (auto& r : reports) {
            r.suite = name;
            if (auto it = config.tolerances.find(name); it != config.tolerances.end()) {
                r.tolerance = it->second;
                r.finalize();
            }
            if (!config.record_timing) r.wall_ms = 0.0;
        }
        return reports;
    }
    throw ConfigError("unknown suite '" + name + "'");
}

std::vector<CheckReport> run_suites(const RunConfig& config) {
    std::vector<CheckReport> all;
    for (const auto& name : config.suites) {
        auto r = run_suite(name, config);
        all.insert(all.end(), r.begin(), r.end());
    }
    std::stable_sort(all.begin(), all.end(), [](const CheckReport& a, const CheckReport& b) {
        return std::tie(a.suite, a.check) < std::tie(b.suite, b.check);
    });
    return all;
}

}  // namespace wkit
