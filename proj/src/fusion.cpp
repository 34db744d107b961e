#include "wkit/fusion.hpp"

#include <algorithm>
#include <cmath>

namespace wkit::tensor {

namespace {

const char* kSuite = "fusion-identities";

std::vector<std::string> concat(std::vector<std::string> a, const std::vector<std::string>& b) {
    a.insert(a.end(), b.begin(), b.end());
    return a;
}

nlohmann::json base_inputs(const EllipticParams& params, int k, int kprime, cplx x) {
    return {{"N", params.N},
            {"q", complex_json(params.q)},
            {"s", complex_json(params.s)},
            {"k", k},
            {"kprime", kprime},
            {"x", complex_json(x)}};
}

double projector_residual(const LabeledTensor& X, const LabeledTensor& A) {
    const auto xa = X * A;
    const auto axa = A * xa;
    return rel_residual(xa.matrix(), tensor::embed(axa, xa.labels()).matrix());
}

// Product over i = 1..k of factor(i) placed left to right.
template <class F>
LabeledTensor chain(int k, const std::vector<std::string>& labels, F&& factor) {
    LabeledTensor acc;
    for (int i = 1; i <= k; ++i) {
        auto f = factor(i);
        acc = (i == 1) ? tensor::embed(f, labels) : acc * f;
    }
    return acc;
}

}  // namespace

LabeledTensor fused_R(cplx x, int k, int kprime, const EllipticParams& params, bool inverse,
                      const TruncationPolicy& policy) {
    const int N = params.N;
    if (k < 1 || kprime < 1) throw InvalidParams("fused product needs k, k' >= 1");
    const auto rows = numbered_labels(k);
    const auto cols = numbered_labels(kprime, "'");
    auto acc = LabeledTensor::identity(concat(rows, cols), N);
    for (int j = 1; j <= kprime; ++j)
        for (int i = k; i >= 1; --i) {
            const double e = double(i - j) - (k - kprime) / 2.0;
            const auto f = rmatrix::r_on(RKind::Rhat, params.qpow(e) * x, rows[i - 1],
                                         cols[j - 1], params, policy);
            acc = tensor::apply_right(acc, f);
        }
    return inverse ? acc.inverse() : acc;
}

LabeledTensor M_matrix(cplx x, int k, int kprime, const EllipticParams& params, cplx c,
                       bool control, const TruncationPolicy& policy) {
    const auto rows = numbered_labels(k);
    const auto rinv = fused_R(x, k, kprime, params, true, policy);
    const auto a = fused_R(params.qpow(c) * x, k, kprime, params, false, policy);
    const cplx shift = control ? -c : -c - double(params.N);
    const auto b = fused_R(params.qpow(shift) * x, k, kprime, params, false, policy);
    const auto inner = rinv * b * rinv;
    return partial_transpose(partial_transpose(a, rows) * partial_transpose(inner, rows), rows);
}

double FusionResiduals::max() const {
    return std::max({rhat_product, rhat_t0_inverse, r_inverse, rhat_inverse, fused_Ak,
                     fused_Akprime});
}

FusionResiduals fusion_residuals(int k, int kprime, const EllipticParams& params, cplx x,
                                 double perturb, const TruncationPolicy& policy) {
    const int N = params.N;
    if (k < 2 || k > N) throw InvalidParams("fusion identities need 2 <= k <= N");
    if (kprime < 1 || kprime > N) throw InvalidParams("k' must lie in 1..N");
    const auto rows = numbered_labels(k);
    const auto labels = concat(rows, {"0"});
    const auto A = antisymmetrizer(k, N, rows).proj;
    // Argument of factor i, with the last factor perturbed for test-power controls.
    auto arg = [&](int i, int direction) {
        cplx a = x * params.qpow(double(direction * (i - 1)));
        return i == k ? a * perturb : a;
    };

    FusionResiduals r{};
    const auto rhat = chain(k, labels, [&](int i) {
        return rmatrix::r_on(RKind::Rhat, arg(i, -1), rows[i - 1], "0", params, policy);
    });
    r.rhat_product = projector_residual(rhat, A);
    const auto t0 = chain(k, labels, [&](int i) {
        const auto f = rmatrix::r_on(RKind::Rhat, arg(i, -1), rows[i - 1], "0", params, policy);
        return partial_transpose(f.inverse(), {"0"});
    });
    r.rhat_t0_inverse = projector_residual(t0, A);
    const auto rinv = chain(k, labels, [&](int i) {
        return rmatrix::r_on(RKind::R, arg(i, +1), rows[i - 1], "0", params, policy).inverse();
    });
    r.r_inverse = projector_residual(rinv, A);
    const auto hinv = chain(k, labels, [&](int i) {
        return rmatrix::r_on(RKind::Rhat, arg(i, +1), rows[i - 1], "0", params, policy).inverse();
    });
    r.rhat_inverse = projector_residual(hinv, A);

    const auto cols = numbered_labels(kprime, "'");
    const auto F = fused_R(x * perturb, k, kprime, params, false, policy);
    const auto Finv = F.inverse();
    const auto Ak = antisymmetrizer(k, N, rows).proj;
    const auto Akp = antisymmetrizer(kprime, N, cols).proj;
    r.fused_Ak = std::max(projector_residual(F, Ak), projector_residual(Finv, Ak));
    r.fused_Akprime = std::max(projector_residual(F, Akp), projector_residual(Finv, Akp));
    return r;
}

CheckReport check_fusion_identities(int k, int kprime, const EllipticParams& params, cplx x,
                                    double perturb, const TruncationPolicy& policy) {
    const auto r = fusion_residuals(k, kprime, params, x, perturb, policy);
    auto in = base_inputs(params, k, kprime, x);
    in["perturb"] = perturb;
    in["rhat_product"] = r.rhat_product;
    in["rhat_t0_inverse"] = r.rhat_t0_inverse;
    in["r_inverse"] = r.r_inverse;
    in["rhat_inverse"] = r.rhat_inverse;
    in["fused_Ak"] = r.fused_Ak;
    in["fused_Akprime"] = r.fused_Akprime;
    return CheckReport::make(kSuite, "projector-identities",
                             "one-sided antisymmetrizer identities X A = A X A", in, r.max(), 1e-8);
}

CheckReport check_fused_crossing_unitarity(int k, int kprime, const EllipticParams& params, cplx x,
                                           double perturb, const TruncationPolicy& policy) {
    const auto rows = numbered_labels(k);
    const cplx qN = params.qpow(double(params.N));
    const auto lhs = partial_transpose(fused_R(x, k, kprime, params, false, policy), rows).inverse();
    const auto rhs =
        partial_transpose(fused_R(qN * x * perturb, k, kprime, params, true, policy), rows);
    auto in = base_inputs(params, k, kprime, x);
    in["perturb"] = perturb;
    return CheckReport::make(kSuite, "fused-crossing-unitarity",
                             "crossing-unitarity of the fused R-matrix", in,
                             rel_residual(lhs.matrix(), rhs.matrix()), 1e-8);
}

CheckReport check_M_identity(cplx x, int k, int kprime, const EllipticParams& params,
                             const TruncationPolicy& policy) {
    const auto m = M_matrix(x, k, kprime, params, -double(params.N), false, policy);
    const Mat id = Mat::Identity(m.rows(), m.rows());
    return CheckReport::make("critical-poisson", "M-identity",
                             "M(x) at the critical level is the identity",
                             base_inputs(params, k, kprime, x), rel_residual(m.matrix(), id), 1e-8);
}

CheckReport check_M_derivative(cplx x, int k, int kprime, const EllipticParams& params, double eps,
                               bool control, const TruncationPolicy& policy) {
    const double cr = -double(params.N);
    const auto up = M_matrix(x, k, kprime, params, cr + eps, control, policy);
    const auto down = M_matrix(x, k, kprime, params, cr - eps, control, policy);
    const auto mid = M_matrix(x, k, kprime, params, cr, control, policy);
    const double deriv = (up.matrix() - down.matrix()).norm() / (2.0 * eps);
    auto in = base_inputs(params, k, kprime, x);
    in["eps"] = eps;
    in["control"] = control;
    in["derivative_norm"] = deriv;
    return CheckReport::make("critical-poisson", control ? "M-derivative-control" : "M-derivative",
                             "dM/dc vanishes at the critical level", in, deriv / mid.norm(), 1e-5);
}

CheckReport check_antisymmetrizer(int k, int N) {
    const auto a = antisymmetrizer(k, N);
    long binom = 1;
    for (int i = 1; i <= k; ++i) binom = binom * (N - k + i) / i;
    nlohmann::json in = {{"N", N}, {"k", k}, {"rank", a.rank()}, {"expected_rank", binom}};
    const double idem = a.idempotency_residual();
    in["idempotency"] = idem;
    const double residual = a.rank() == binom ? idem : HUGE_VAL;
    return CheckReport::make(kSuite, "antisymmetrizer", "antisymmetrizer is a projector of rank C(N,k)",
                             in, residual, 1e-12);
}

}  // namespace wkit::tensor
