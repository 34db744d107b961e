#include "wkit/rmatrix.hpp"

#include <cmath>
#include <numbers>

#include <unsupported/Eigen/KroneckerProduct>

namespace wkit {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr cplx kI{0.0, 1.0};

Mat kron(const Mat& a, const Mat& b) { return Eigen::kroneckerProduct(a, b).eval(); }

Mat matrix_power(const Mat& m, int e) {
    Mat base = e >= 0 ? m : Mat(m.inverse());
    Mat r = Mat::Identity(m.rows(), m.cols());
    for (int i = 0, n = std::abs(e); i < n; ++i) r = r * base;
    return r;
}

cplx ipow(cplx z, int n) {
    cplx r = 1.0;
    for (int i = 0; i < n; ++i) r *= z;
    return r;
}

}  // namespace

const char* to_string(RKind kind) {
    switch (kind) {
        case RKind::Z: return "Z";
        case RKind::R: return "R";
        case RKind::Rhat: return "Rhat";
    }
    return "?";
}

ZnMatrices ZnMatrices::make(int N) {
    if (N < 2) throw InvalidParams("N must be at least 2");
    ZnMatrices m;
    m.N = N;
    m.g = Mat::Zero(N, N);
    m.h = Mat::Zero(N, N);
    m.g_half = Mat::Zero(N, N);
    for (int j = 1; j <= N; ++j) {
        m.g(j - 1, j - 1) = std::exp(2.0 * kPi * kI * double(j) / double(N));
        m.g_half(j - 1, j - 1) = std::exp(kPi * kI * double(j) / double(N));
    }
    for (int i = 0; i < N; ++i) m.h(i, (i + 1) % N) = 1.0;
    m.GH = m.g_half * m.h * m.g_half;
    return m;
}

Mat ZnMatrices::M(int m) const { return matrix_power(GH, -m); }

Mat ZnMatrices::I(int a1, int a2) const { return matrix_power(g, a2) * matrix_power(h, a1); }

namespace rmatrix {

cplx xi_of(cplx z) {
    if (z == 0.0) throw ZeroArgument("spectral parameter z = 0");
    return std::log(z) / (kI * kPi);
}

cplx zeta_of(const EllipticParams& params) { return std::log(params.q) / (kI * kPi); }

cplx tau_of(const EllipticParams& params) {
    // exp(i pi tau) = -s with the principal log of s, so Re tau lies in (-2, 0].
    // Only this branch makes the generators vanish on the twist surfaces.
    return std::log(params.s) / (kI * kPi) - 1.0;
}

namespace {

struct RawSum {
    Mat sum;          // sum_alpha W_alpha I_alpha (x) I_alpha^{-1}
    cplx theta_ratio; // theta[1/2,1/2](zeta) / theta[1/2,1/2](xi + zeta)
};

RawSum raw_sum(cplx xi, const EllipticParams& params, const TruncationPolicy& policy) {
    params.require_elliptic();
    const int N = params.N;
    const cplx zeta = zeta_of(params);
    const cplx tau = tau_of(params);
    const auto zn = ZnMatrices::make(N);
    RawSum out{Mat::Zero(N * N, N * N), 0.0};
    for (int a1 = 0; a1 < N; ++a1)
        for (int a2 = 0; a2 < N; ++a2) {
            const double g1 = 0.5 + double(a1) / N;
            const double g2 = 0.5 + double(a2) / N;
            const cplx den = double(N) * qseries::theta_char_product(g1, g2, zeta / double(N), tau, policy);
            guard_pole(den, "W coefficient denominator");
            const cplx w = qseries::theta_char_product(g1, g2, xi + zeta / double(N), tau, policy) / den;
            const Mat ia = zn.I(a1, a2);
            out.sum += w * kron(ia, ia.adjoint());
        }
    const cplx den = qseries::theta_char_product(0.5, 0.5, xi + zeta, tau, policy);
    guard_pole(den, "prefactor theta denominator");
    out.theta_ratio = qseries::theta_char_product(0.5, 0.5, zeta, tau, policy) / den;
    return out;
}

Mat gauge(const Mat& z_gauge, int N) {
    const auto zn = ZnMatrices::make(N);
    const Mat G = kron(zn.g_half, zn.g_half);
    return G * z_gauge * G.adjoint();
}

const std::vector<std::string> kPair = {"1", "2"};

// tau_N(q^{1/2}/z) / kappa(z^2) with the factor that vanishes at z = q in tau_N
// cancelled against the matching pole of 1/kappa.
cplx hat_normalization(cplx z, const EllipticParams& params, const TruncationPolicy& policy) {
    const int N = params.N;
    const cplx q = params.q;
    const cplx p = params.p();
    const cplx Q = ipow(q, 2 * N);
    const cplx b = p * ipow(q, 2 * N - 2);
    const cplx z2 = z * z;
    auto P2 = [&](cplx x) { return qseries::pochhammer(x, {p, Q}, policy); };
    auto P1 = [&](cplx x) { return qseries::pochhammer(x, {Q}, policy); };
    const cplx kden = P2(Q * z2) * P2(p * q * q / z2) * P2(p * z2) * P2(b / z2);
    const cplx tden = qseries::theta_big(z2, Q, policy);
    guard_pole(kden, "kappa denominator");
    guard_pole(tden, "tau_N denominator theta");
    const cplx knum = P2(Q / z2) * P2(q * q * z2) * P2(p / z2) * P2(b * z2);
    const cplx tnum = cpow(std::sqrt(q) / z, 2.0 / N - 2.0) * P1(Q * z2 / (q * q)) * P1(Q);
    return knum / kden * tnum / tden;
}

}  // namespace

RMatrixValue build_Z_xi(cplx xi, const EllipticParams& params, const TruncationPolicy& policy) {
    const int N = params.N;
    const cplx z = std::exp(kI * kPi * xi);
    const RawSum raw = raw_sum(xi, params, policy);
    const cplx pref = std::exp(kI * kPi * xi * (2.0 / N - 2.0)) *
                      qseries::kappa_inv(z * z, params, policy) * raw.theta_ratio;
    return {LabeledTensor(kPair, N, pref * raw.sum), RKind::Z, z, params};
}

RMatrixValue build_R_xi(cplx xi, const EllipticParams& params, const TruncationPolicy& policy) {
    auto v = build_Z_xi(xi, params, policy);
    return {LabeledTensor(kPair, params.N, gauge(v.op.matrix(), params.N)), RKind::R, v.spectral,
            params};
}

RMatrixValue build_Z(cplx z, const EllipticParams& params, const TruncationPolicy& policy) {
    return build_Z_xi(xi_of(z), params, policy);
}

RMatrixValue build_R(cplx z, const EllipticParams& params, const TruncationPolicy& policy) {
    return build_R_xi(xi_of(z), params, policy);
}

RMatrixValue build_Rhat(cplx z, const EllipticParams& params, const TruncationPolicy& policy) {
    const int N = params.N;
    const cplx xi = xi_of(z);
    const RawSum raw = raw_sum(xi, params, policy);
    const cplx pref = std::exp(kI * kPi * xi * (2.0 / N - 2.0)) * raw.theta_ratio *
                      hat_normalization(z, params, policy);
    return {LabeledTensor(kPair, N, gauge(pref * raw.sum, N)), RKind::Rhat, z, params};
}

LabeledTensor r_on(RKind kind, cplx z, const std::string& a, const std::string& b,
                   const EllipticParams& params, const TruncationPolicy& policy) {
    RMatrixValue v;
    switch (kind) {
        case RKind::Z: v = build_Z(z, params, policy); break;
        case RKind::R: v = build_R(z, params, policy); break;
        case RKind::Rhat: v = build_Rhat(z, params, policy); break;
    }
    return tensor::relabel(v.op, {a, b});
}

Mat permutation(int N) {
    Mat P = Mat::Zero(N * N, N * N);
    for (int i = 0; i < N; ++i)
        for (int j = 0; j < N; ++j) P(i * N + j, j * N + i) = 1.0;
    return P;
}

bool in_safe_domain(cplx z) { return z != 0.0 && std::abs(std::arg(z)) < kPi / 2; }

namespace {

nlohmann::json base_inputs(const EllipticParams& params) {
    return {{"N", params.N},
            {"q", complex_json(params.q)},
            {"s", complex_json(params.s)},
            {"c", complex_json(params.c)}};
}

constexpr double kTol = 1e-9;
const char* kSuite = "rmatrix-properties";

Mat id(int n) { return Mat::Identity(n, n); }

}  // namespace

CheckReport check_yang_baxter(cplx z, cplx w, const EllipticParams& params, RKind kind,
                              double perturb, const TruncationPolicy& policy) {
    const auto r12 = r_on(kind, z, "1", "2", params, policy);
    const auto r13 = r_on(kind, w, "1", "3", params, policy);
    const auto r23 = r_on(kind, w / z * perturb, "2", "3", params, policy);
    const std::vector<std::string> order = {"1", "2", "3"};
    const auto lhs = tensor::embed(r12 * r13 * r23, order);
    const auto rhs = tensor::embed(r23 * r13 * r12, order);
    auto in = base_inputs(params);
    in["z"] = complex_json(z);
    in["w"] = complex_json(w);
    in["kind"] = to_string(kind);
    in["perturb"] = perturb;
    return CheckReport::make(kSuite, std::string("yang-baxter-") + to_string(kind),
                             "Yang-Baxter equation", in,
                             rel_residual(lhs.matrix(), rhs.matrix()), kTol);
}

CheckReport check_unitarity(cplx z, const EllipticParams& params, double perturb,
                            const TruncationPolicy& policy) {
    const auto r12 = r_on(RKind::R, z, "1", "2", params, policy);
    const auto r21 = r_on(RKind::R, 1.0 / (z * perturb), "2", "1", params, policy);
    const auto prod = tensor::embed(r12 * r21, {"1", "2"});
    auto in = base_inputs(params);
    in["z"] = complex_json(z);
    in["perturb"] = perturb;
    return CheckReport::make(kSuite, "unitarity-R", "unitarity R12(z) R21(1/z) = 1", in,
                             rel_residual(prod.matrix(), id(params.N * params.N)), kTol);
}

CheckReport check_hat_unitarity(cplx z, const EllipticParams& params, double perturb,
                                const TruncationPolicy& policy) {
    const auto r12 = r_on(RKind::Rhat, z, "1", "2", params, policy);
    const auto r21 = r_on(RKind::Rhat, 1.0 / (z * perturb), "2", "1", params, policy);
    const auto prod = tensor::embed(r12 * r21, {"1", "2"});
    const cplx u = qseries::U(z, params, policy);
    auto in = base_inputs(params);
    in["z"] = complex_json(z);
    in["perturb"] = perturb;
    return CheckReport::make(kSuite, "unitarity-Rhat", "unitarity of R-hat equals U(z)", in,
                             rel_residual(prod.matrix(), u * id(params.N * params.N)), kTol);
}

CheckReport check_regularity(const EllipticParams& params, double perturb,
                             const TruncationPolicy& policy) {
    const auto r = build_R(cplx(perturb, 0.0), params, policy);
    auto in = base_inputs(params);
    in["perturb"] = perturb;
    return CheckReport::make(kSuite, "regularity", "regularity R12(1) = P12", in,
                             rel_residual(r.op.matrix(), permutation(params.N)), kTol);
}

CheckReport check_crossing(cplx z, const EllipticParams& params, RKind kind, double perturb,
                           const TruncationPolicy& policy) {
    const int N = params.N;
    const cplx qN = ipow(params.q, N);
    const std::vector<std::string> order = {"1", "2"};
    auto in = base_inputs(params);
    in["z"] = complex_json(z);
    in["kind"] = to_string(kind);
    in["perturb"] = perturb;

    // (R12(x)^{t2})^{-1} = (R12(q^N x)^{-1})^{t2}
    const auto r = r_on(kind, z, "1", "2", params, policy);
    const auto rq = r_on(kind, qN * z * perturb, "1", "2", params, policy);
    const Mat cu_lhs = tensor::partial_transpose(r, {"2"}).inverse().matrix();
    const Mat cu_rhs = tensor::partial_transpose(rq.inverse(), {"2"}).matrix();
    const double cu = rel_residual(cu_lhs, cu_rhs);
    in["crossing_unitarity"] = cu;

    double residual = cu;
    if (kind != RKind::Rhat) {
        // R12(z)^{t2} R21(z^{-1} q^{-N})^{t2} = 1
        const auto r21 = r_on(kind, 1.0 / (z * qN) * perturb, "2", "1", params, policy);
        const auto prod = tensor::partial_transpose(r, {"2"}) *
                          tensor::partial_transpose(tensor::embed(r21, order), {"2"});
        const double cs = rel_residual(prod.matrix(), id(N * N));
        in["crossing_symmetry"] = cs;
        residual = std::max(residual, cs);
    }
    return CheckReport::make(kSuite, std::string("crossing-") + to_string(kind),
                             "crossing symmetry and crossing-unitarity", in, residual, kTol);
}

CheckReport check_antisymmetry(cplx z, const EllipticParams& params, double perturb,
                               const TruncationPolicy& policy) {
    const double arg = std::arg(z);
    if (!(arg > -kPi / 2 && arg <= 0.0))
        throw BranchDomainViolation("antisymmetry is realized for arg z in (-pi/2, 0]");
    const int N = params.N;
    const auto zn = ZnMatrices::make(N);
    const cplx xi = xi_of(z);
    const Mat lhs = build_R_xi(xi + 1.0 + xi_of(perturb), params, policy).op.matrix();
    const Mat rz = build_R_xi(xi, params, policy).op.matrix();
    const Mat gi = kron(zn.g.adjoint(), id(N));
    const Mat g1 = kron(zn.g, id(N));
    const Mat rhs = params.omega() * gi * rz * g1;
    auto in = base_inputs(params);
    in["z"] = complex_json(z);
    in["perturb"] = perturb;
    return CheckReport::make(kSuite, "antisymmetry", "antisymmetry R12(-z) = omega g^{-1} R12(z) g",
                             in, rel_residual(lhs, rhs), kTol);
}

CheckReport check_quasi_periodicity(cplx z, const EllipticParams& params, double perturb,
                                    const TruncationPolicy& policy) {
    const int N = params.N;
    const auto zn = ZnMatrices::make(N);
    const Mat lhs = build_Rhat(params.s * perturb * z, params, policy).op.matrix();
    const auto r21 = r_on(RKind::Rhat, 1.0 / z, "2", "1", params, policy);
    const Mat r21m = tensor::embed(r21, {"1", "2"}).matrix();
    const Mat T = kron(zn.GH, id(N));
    const Mat rhs = T.inverse() * r21m.inverse() * T;
    auto in = base_inputs(params);
    in["z"] = complex_json(z);
    in["perturb"] = perturb;
    return CheckReport::make(kSuite, "quasi-periodicity",
                             "quasi-periodicity of R-hat under z -> -p^{1/2} z", in,
                             rel_residual(lhs, rhs), kTol);
}

CheckReport check_quasi_periodicity_M(cplx x, int a, const EllipticParams& params, bool starred,
                                      double perturb, const TruncationPolicy& policy) {
    if (a < -3 || a > 3) throw InvalidParams("twist exponent must lie in -3..3");
    const int N = params.N;
    const auto zn = ZnMatrices::make(N);
    const EllipticParams used = starred ? params.with_s(params.sstar()).with_c(0.0) : params;
    const cplx sv = used.s;
    cplx shift = 1.0;
    for (int i = 0; i < std::abs(a); ++i) shift *= a > 0 ? sv : 1.0 / sv;
    const Mat Ma = kron(zn.M(a), id(N));
    const Mat lhs = Ma * build_Rhat(x, used, policy).op.matrix() * Ma.inverse();
    const Mat rhs = qseries::F_a(x, a, sv, used, policy) *
                    build_Rhat(shift * perturb * x, used, policy).op.matrix();
    auto in = base_inputs(params);
    in["x"] = complex_json(x);
    in["a"] = a;
    in["starred"] = starred;
    in["perturb"] = perturb;
    return CheckReport::make(kSuite, starred ? "quasi-periodicity-M-star" : "quasi-periodicity-M",
                             "twisted quasi-periodicity M_a R-hat(x) = F_a(x) R-hat(s^a x) M_a",
                             in, rel_residual(lhs, rhs), kTol);
}

CheckReport check_zn_symmetry(cplx z, const EllipticParams& params, RKind kind,
                              const TruncationPolicy& policy) {
    const int N = params.N;
    const Mat m = r_on(kind, z, "1", "2", params, policy).matrix();
    const double top = m.cwiseAbs().maxCoeff();
    double worst = 0.0;
    int admissible = 0;
    for (int i = 0; i < N; ++i)
        for (int j = 0; j < N; ++j)
            for (int k = 0; k < N; ++k)
                for (int l = 0; l < N; ++l) {
                    if ((i + j - k - l) % N == 0) {
                        ++admissible;
                        continue;
                    }
                    worst = std::max(worst, std::abs(m(i * N + j, k * N + l)));
                }
    auto in = base_inputs(params);
    in["z"] = complex_json(z);
    in["kind"] = to_string(kind);
    in["admissible_entries"] = admissible;
    return CheckReport::make(kSuite, std::string("zn-symmetry-") + to_string(kind),
                             "Z_N symmetry of the vertex weights", in, worst / top, 1e-12);
}

CheckReport check_kernel_at_q(const EllipticParams& params, const TruncationPolicy& policy) {
    const int N = params.N;
    const Mat r = build_Rhat(params.q, params, policy).op.matrix();
    Eigen::JacobiSVD<Mat> svd(r, Eigen::ComputeFullV);
    const auto& sv = svd.singularValues();
    const double cut = 1e-8 * sv(0);
    Mat basis(N * N, 0);
    for (Eigen::Index i = 0; i < sv.size(); ++i)
        if (sv(i) < cut) {
            basis.conservativeResize(Eigen::NoChange, basis.cols() + 1);
            basis.col(basis.cols() - 1) = svd.matrixV().col(i);
        }
    const Mat proj = basis * basis.adjoint();
    const Mat a2 = tensor::antisymmetrizer(2, N).proj.matrix();
    const int expected = N * (N - 1) / 2;
    const double distance = (proj - a2).norm();
    auto in = base_inputs(params);
    in["kernel_dimension"] = int(basis.cols());
    in["expected_dimension"] = expected;
    in["subspace_distance"] = distance;
    const double residual = int(basis.cols()) == expected ? distance : HUGE_VAL;
    return CheckReport::make(kSuite, "kernel-at-q", "ker R-hat(q) = im A_2", in, residual, 1e-8);
}

}  // namespace rmatrix
}  // namespace wkit
