#include "wkit/qseries.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <string>
#include <vector>

namespace wkit {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr cplx kI{0.0, 1.0};
constexpr double kModulusMargin = 1e-6;

cplx ipow(cplx z, int n) {
    cplx r = 1.0;
    cplx b = n >= 0 ? z : 1.0 / z;
    for (int k = 0, e = std::abs(n); k < e; ++k) r *= b;
    return r;
}

bool on_unit_square(cplx x) { return std::abs(x * x - 1.0) < 1e-14; }

}  // namespace

void TruncationPolicy::validate() const {
    if (!(tail_eps > 0.0 && tail_eps <= 1e-8))
        throw InvalidParams("tail_eps must lie in (0, 1e-8], got " + std::to_string(tail_eps));
    if (max_terms < 64)
        throw InvalidParams("max_terms must be at least 64, got " + std::to_string(max_terms));
}

TruncationPolicy TruncationPolicy::refined() const {
    return {tail_eps * tail_eps, max_terms * 2};
}

EllipticParams EllipticParams::make(int N, cplx q, cplx s, cplx c) {
    EllipticParams p{N, q, s, c};
    p.validate();
    return p;
}

void EllipticParams::validate() const {
    if (N < 2) throw InvalidParams("N must be at least 2");
    if (q == 0.0) throw ZeroArgument("q must be nonzero");
    if (std::abs(q) >= 1.0) throw ModulusOutOfRange("|q| must be below 1");
    if (std::abs(ipow(q, 2 * N) - 1.0) <= 1e-6) throw InvalidParams("q^{2N} too close to 1");
    if (s == 0.0) throw ZeroArgument("s must be nonzero");
}

void EllipticParams::require_elliptic() const {
    if (std::abs(p()) >= 1.0 - kModulusMargin)
        throw ModulusOutOfRange("R-matrix construction needs |p| < 1, got |p| = " +
                                std::to_string(std::abs(p())));
}

cplx EllipticParams::sstar() const { return s * qpow(-c); }

cplx EllipticParams::omega() const { return std::exp(2.0 * kPi * kI / double(N)); }

cplx EllipticParams::qpow(cplx e) const { return std::exp(e * std::log(q)); }

EllipticParams EllipticParams::with_c(cplx new_c) const {
    auto r = *this;
    r.c = new_c;
    return r;
}

EllipticParams EllipticParams::with_s(cplx new_s) const {
    auto r = *this;
    r.s = new_s;
    return r;
}

cplx cpow(cplx z, cplx e) {
    if (z == 0.0) throw ZeroArgument("fractional power of zero");
    return std::exp(e * std::log(z));
}

void guard_pole(cplx value, const char* what, double threshold) {
    if (!(std::abs(value) >= threshold)) throw PoleHit(std::string(what) + " vanishes");
}

namespace qseries {

namespace {

struct PochWalker {
    std::span<const cplx> moduli;
    std::vector<double> mags;
    cplx z;
    double bound;
    int max_terms;
    cplx result = 1.0;

    void walk(std::size_t level, cplx lattice, double mag) {
        if (level == moduli.size()) {
            result *= 1.0 - z * lattice;
            return;
        }
        cplx cur = lattice;
        double cur_mag = mag;
        for (int n = 0;; ++n) {
            if (cur_mag < bound) return;
            if (n >= max_terms)
                throw TruncationBudgetExceeded("pochhammer index cap " +
                                               std::to_string(max_terms) + " reached");
            walk(level + 1, cur, cur_mag);
            cur *= moduli[level];
            cur_mag *= mags[level];
        }
    }
};

}  // namespace

cplx pochhammer(cplx z, std::span<const cplx> moduli, const TruncationPolicy& policy) {
    if (!std::isfinite(z.real()) || !std::isfinite(z.imag()))
        throw InvalidParams("pochhammer argument must be finite");
    PochWalker w{moduli, {}, z, policy.tail_eps / (std::abs(z) + 1.0), policy.max_terms};
    for (cplx p : moduli) {
        if (std::abs(p) >= 1.0 - kModulusMargin)
            throw ModulusOutOfRange("pochhammer modulus with |p| = " + std::to_string(std::abs(p)));
        w.mags.push_back(std::abs(p));
    }
    if (z == 0.0) return 1.0;
    w.walk(0, 1.0, 1.0);
    return w.result;
}

cplx pochhammer(cplx z, std::initializer_list<cplx> moduli, const TruncationPolicy& policy) {
    return pochhammer(z, std::span<const cplx>(moduli.begin(), moduli.size()), policy);
}

cplx theta_big(cplx z, cplx p, const TruncationPolicy& policy) {
    if (z == 0.0) throw ZeroArgument("theta_big at z = 0");
    return pochhammer(z, {p}, policy) * pochhammer(p / z, {p}, policy) *
           pochhammer(p, {p}, policy);
}

cplx theta_char_series(double g1, double g2, cplx xi, cplx tau, const TruncationPolicy& policy) {
    const double im_tau = tau.imag();
    if (im_tau < 1e-6) throw NonconvergentTau("Im tau must be at least 1e-6");
    // Minimal symmetric depth from the Gaussian factor alone.
    const double m_bound = std::sqrt(-std::log(policy.tail_eps) / (kPi * im_tau)) - std::abs(g1);
    const int m_min = std::max(0, int(std::ceil(m_bound)));
    // Centre the walk on the peak of |term| so large Im xi stays accurate.
    const long centre = std::lround(-xi.imag() / im_tau - g1);
    auto term = [&](long m) {
        const double u = double(m) + g1;
        return std::exp(kI * kPi * u * u * tau + 2.0 * kI * kPi * u * (xi + g2));
    };
    cplx sum = term(centre);
    double peak = std::abs(sum);
    for (int d = 1;; ++d) {
        if (d > policy.max_terms)
            throw TruncationBudgetExceeded("theta series depth cap reached");
        const cplx a = term(centre + d);
        const cplx b = term(centre - d);
        sum += a + b;
        peak = std::max({peak, std::abs(a), std::abs(b)});
        if (d >= m_min && std::abs(a) <= policy.tail_eps * peak &&
            std::abs(b) <= policy.tail_eps * peak)
            break;
    }
    return sum;
}

cplx theta_char_product(double g1, double g2, cplx xi, cplx tau, const TruncationPolicy& policy) {
    if (tau.imag() < 1e-6) throw NonconvergentTau("Im tau must be at least 1e-6");
    const cplx p = std::exp(2.0 * kI * kPi * tau);
    const cplx pref = std::exp(kI * kPi * tau * g1 * g1 + 2.0 * kI * kPi * g1 * xi +
                               2.0 * kI * kPi * g1 * g2);
    const cplx arg = -std::exp(2.0 * kI * kPi * g2) * std::exp(2.0 * kI * kPi * tau * (g1 + 0.5)) *
                     std::exp(2.0 * kI * kPi * xi);
    return pref * theta_big(arg, p, policy);
}

cplx tau_N(cplx z, const EllipticParams& params, const TruncationPolicy& policy) {
    if (z == 0.0) throw ZeroArgument("tau_N at z = 0");
    const int N = params.N;
    const cplx Q = ipow(params.q, 2 * N);
    const cplx z2 = z * z;
    const cplx den = theta_big(params.q / z2, Q, policy);
    guard_pole(den, "tau_N denominator theta");
    return cpow(z, 2.0 / N - 2.0) * theta_big(params.q * z2, Q, policy) / den;
}

cplx U(cplx z, const EllipticParams& params, const TruncationPolicy& policy) {
    if (z == 0.0) throw ZeroArgument("U at z = 0");
    const int N = params.N;
    const cplx q = params.q;
    const cplx Q = ipow(q, 2 * N);
    const cplx z2 = z * z;
    const cplx den = theta_big(z2, Q, policy) * theta_big(1.0 / z2, Q, policy);
    guard_pole(den, "U denominator theta");
    return cpow(q, 2.0 / N - 2.0) * theta_big(q * q * z2, Q, policy) *
           theta_big(q * q / z2, Q, policy) / den;
}

cplx U_from_tau(cplx z, const EllipticParams& params, const TruncationPolicy& policy) {
    const cplx qh = std::sqrt(params.q);
    return tau_N(qh * z, params, policy) * tau_N(qh / z, params, policy);
}

cplx kappa_inv(cplx z2, const EllipticParams& params, const TruncationPolicy& policy) {
    if (z2 == 0.0) throw ZeroArgument("kappa_inv at z^2 = 0");
    const int N = params.N;
    const cplx q = params.q;
    const cplx p = params.p();
    const cplx Q = ipow(q, 2 * N);
    const cplx b = p * ipow(q, 2 * N - 2);
    auto P = [&](cplx x) { return pochhammer(x, {p, Q}, policy); };
    const cplx num = P(Q / z2) * P(q * q * z2) * P(p / z2) * P(b * z2);
    const cplx den = P(Q * z2) * P(q * q / z2) * P(p * z2) * P(b / z2);
    guard_pole(den, "kappa denominator");
    return num / den;
}

cplx F_a(cplx x, int a, cplx s_val, const EllipticParams& params, const TruncationPolicy& policy) {
    if (x == 0.0) throw ZeroArgument("F_a at x = 0");
    cplx r = 1.0;
    if (a > 0) {
        for (int l = 0; l < a; ++l) r *= U(ipow(s_val, l) * x, params, policy);
    } else if (a < 0) {
        for (int l = 1; l <= -a; ++l) {
            const cplx u = U(ipow(s_val, -l) * x, params, policy);
            guard_pole(u, "U factor of F_a");
            r /= u;
        }
    }
    return r;
}

YForms Y_mn_forms(cplx x, int m, int n, const EllipticParams& params,
                  const TruncationPolicy& policy) {
    const cplx s = params.s;
    const cplx ss = params.sstar();
    auto F = [&](cplx y, int a, cplx sv) { return F_a(y, a, sv, params, policy); };
    const cplx ratio_den = F(ipow(ss, -n) * x, n, ss) * F(x, m, s);
    const cplx prod_den = F(x, m, s) * F(x, -m, s);
    guard_pole(ratio_den, "Y_mn denominator");
    guard_pole(prod_den, "Y_mn denominator");
    YForms out{};
    out.ratio_form = F(x, n, ss) * F(ipow(ss, n) * x, m, s) / ratio_den;
    out.product_form = F(x, n, ss) * F(x, -n, ss) / prod_den;
    out.difference =
        std::abs(out.ratio_form - out.product_form) / std::max(1.0, std::abs(out.product_form));
    return out;
}

cplx Y_mn(cplx x, int m, int n, const EllipticParams& params, const TruncationPolicy& policy) {
    return Y_mn_forms(x, m, n, params, policy).product_form;
}

cplx Y_FF(cplx x, const EllipticParams& params, const TruncationPolicy& policy) {
    if (x == 0.0) throw ZeroArgument("Y_FF at x = 0");
    const cplx q = params.q;
    const cplx Q = ipow(q, 2 * params.N);
    const cplx a = params.qpow(2.0 + 2.0 * params.c);
    const cplx b = params.qpow(-2.0 * params.c);
    const cplx x2 = x * x;
    const cplx xm2 = 1.0 / x2;
    auto T = [&](cplx y) { return theta_big(y, Q, policy); };
    const cplx den = T(x2) * T(q * q * x2) * T(b * xm2) * T(a * xm2);
    guard_pole(den, "Y_FF denominator");
    return T(xm2) * T(q * q * xm2) * T(a * x2) * T(b * x2) / den;
}

cplx Y_kkprime_cr(cplx x, int k, int kprime, const EllipticParams& params,
                  const TruncationPolicy& policy) {
    if (k < 1 || k > params.N || kprime < 1 || kprime > params.N)
        throw InvalidParams("k and k' must lie in 1..N");
    return grid_product(k, kprime, [&](double e) {
        const cplx den = U(params.qpow(e - params.c) * x, params, policy);
        guard_pole(den, "Y^{(k,k')} denominator");
        return U(params.qpow(e) * x, params, policy) / den;
    });
}

namespace {

// sum_{l>=0} y Q^l / (1 - y Q^l) - y / (2 (1 - y))
cplx I_half(cplx y, cplx Q, const TruncationPolicy& policy) {
    cplx sum = 0.0;
    cplx yl = y;
    for (int l = 0;; ++l) {
        if (l >= policy.max_terms) throw TruncationBudgetExceeded("I(x) series cap reached");
        const cplx den = 1.0 - yl;
        guard_pole(den, "I(x) summand");
        const cplx t = yl / den;
        sum += t;
        if (std::abs(t) <= policy.tail_eps * std::max(1.0, std::abs(sum))) break;
        yl *= Q;
    }
    return sum - 0.5 * y / (1.0 - y);
}

}  // namespace

cplx I_series(cplx x, const EllipticParams& params, const TruncationPolicy& policy) {
    if (x == 0.0) throw ZeroArgument("I at x = 0");
    // Odd under x <-> 1/x; the simple pole at x^2 = 1 has vanishing principal value.
    if (on_unit_square(x)) return 0.0;
    const cplx Q = ipow(params.q, 2 * params.N);
    const cplx x2 = x * x;
    return I_half(x2, Q, policy) - I_half(1.0 / x2, Q, policy);
}

cplx f_cr_series(cplx x, int k, int kprime, const EllipticParams& params,
                 const TruncationPolicy& policy) {
    if (k < 1 || k > params.N || kprime < 1 || kprime > params.N)
        throw InvalidParams("k and k' must lie in 1..N");
    cplx sum = 0.0;
    for (int i2 = 1 - k; i2 <= k - 1; i2 += 2)
        for (int j2 = 1 - kprime; j2 <= kprime - 1; j2 += 2) {
            const double e = (i2 - j2) / 2.0;
            sum += 2.0 * I_series(params.qpow(e) * x, params, policy) -
                   I_series(params.qpow(e + 1.0) * x, params, policy) -
                   I_series(params.qpow(e - 1.0) * x, params, policy);
        }
    // Overall sign fixed so that f_cr equals dY^{(k,k')}/dc at c = -N.
    return 2.0 * std::log(params.q) * sum;
}

bool Annulus::contains(cplx x) const {
    const double r = std::abs(x);
    return r > inner && r < outer;
}

Annulus f_cr_modes_annulus(int k, int kprime, const EllipticParams& params) {
    const int N = params.N;
    const int a = N - std::max(k, kprime);
    const int b = std::min(k, kprime);
    const double aq = std::abs(params.q);
    if (a == 0) return {0.0, std::numeric_limits<double>::infinity()};
    if (a + b == N) {
        const int m = std::min(a, b);
        return {std::pow(aq, m), std::pow(aq, -m)};
    }
    const int d = N - a - b;
    return {std::pow(aq, d / 2.0), std::pow(aq, -d / 2.0)};
}

cplx f_cr_modes(cplx x, int k, int kprime, const EllipticParams& params,
                const TruncationPolicy& policy) {
    const int N = params.N;
    if (k < 1 || k > N || kprime < 1 || kprime > N)
        throw InvalidParams("k and k' must lie in 1..N");
    const Annulus ann = f_cr_modes_annulus(k, kprime, params);
    if (!ann.contains(x))
        throw OutsideConvergenceAnnulus("|x| must lie in (" + std::to_string(ann.inner) + ", " +
                                        std::to_string(ann.outer) + ")");
    const int a = N - std::max(k, kprime);
    const int b = std::min(k, kprime);
    if (a == 0 || on_unit_square(x)) return 0.0;
    const cplx q = params.q;
    const cplx qq = q - 1.0 / q;
    // [ar][br]/[Nr] for r > 0, written without negative powers of q.
    auto coef = [&](int r) {
        return -ipow(q, (N - a - b) * r) * (1.0 - ipow(q, 2 * a * r)) * (1.0 - ipow(q, 2 * b * r)) /
               ((1.0 - ipow(q, 2 * N * r)) * qq);
    };
    // For k = k' the coefficients tend to a constant whose r-sum is resummed in closed form.
    const cplx c_inf = (a + b == N) ? -1.0 / qq : 0.0;
    // coef(r) - c_inf, formed without cancelling two nearly equal numbers: the
    // error would otherwise be amplified by |x|^{2r} near the annulus edge.
    auto reduced = [&](int r) {
        if (a + b != N) return coef(r);
        const cplx A = ipow(q, 2 * a * r), B = ipow(q, 2 * b * r);
        return (A + B - 2.0 * A * B) / ((1.0 - A * B) * qq);
    };
    const cplx x2 = x * x;
    const cplx xm2 = 1.0 / x2;
    cplx sum = 0.0;
    cplx up = 1.0;
    cplx down = 1.0;
    for (int r = 1;; ++r) {
        if (r > policy.max_terms) throw TruncationBudgetExceeded("mode sum cap reached");
        up *= x2;
        down *= xm2;
        const cplx t = reduced(r) * (up - down);
        sum += t;
        if (r > 2 && std::abs(t) <= policy.tail_eps * std::max(1.0, std::abs(sum))) break;
    }
    sum += c_inf * (x2 + 1.0) / (1.0 - x2);
    return -2.0 * qq * std::log(q) * sum;
}

}  // namespace qseries
}  // namespace wkit
