#include <doctest.h>

#include <cmath>
#include <numbers>
#include <string>
#include <vector>

#include "helpers.hpp"
#include "wkit/abelianity.hpp"
#include "wkit/qseries.hpp"

using namespace wkit;
using namespace wkit::qseries;
using wkit::testing::rel_err;

namespace {

constexpr double kPi = std::numbers::pi;

// Sum of log factors, independent of the library's product loop.
cplx log_space_pochhammer(cplx z, cplx p, double tail) {
    cplx acc = 0.0;
    cplx pn = 1.0;
    for (int n = 0; n < 10000 && std::abs(pn) * (std::abs(z) + 1.0) >= tail; ++n) {
        acc += std::log(1.0 - z * pn);
        pn *= p;
    }
    return std::exp(acc);
}

cplx direct_theta(cplx z, cplx p, int terms) {
    cplx a = 1.0, b = 1.0, c = 1.0, pn = 1.0;
    for (int n = 0; n < terms; ++n) {
        a *= 1.0 - z * pn;
        b *= 1.0 - p / z * pn;
        c *= 1.0 - p * pn;
        pn *= p;
    }
    return a * b * c;
}

cplx q_number(cplx q, double n) { return (std::pow(q, n) - std::pow(q, -n)) / (q - 1.0 / q); }

}  // namespace

TEST_CASE("truncation policy and parameter validation") {
    CHECK_NOTHROW(TruncationPolicy{}.validate());
    CHECK_THROWS_AS((TruncationPolicy{1e-6, 512}).validate(), InvalidParams);
    CHECK_THROWS_AS((TruncationPolicy{1e-16, 32}).validate(), InvalidParams);
    CHECK_THROWS_AS(EllipticParams::make(1, 0.5, 0.3), InvalidParams);
    CHECK_THROWS_AS(EllipticParams::make(2, 1.2, 0.3), ModulusOutOfRange);
    // q^{2N} = 1 up to machine scale is refused.
    CHECK_THROWS_AS(EllipticParams::make(2, std::polar(1.0 - 1e-9, kPi / 2), 0.3), InvalidParams);

    const auto P = EllipticParams::make(3, 0.4, 0.2, 0.7);
    CHECK(std::abs(P.pstar() - P.p() * std::pow(P.q, -2.0 * P.c)) < 1e-15);
    CHECK(std::abs(P.sstar() - P.s * std::pow(P.q, -P.c)) < 1e-15);
    CHECK(std::abs(P.omega() - std::polar(1.0, 2 * kPi / 3)) < 1e-15);
}

TEST_CASE("pochhammer") {
    CHECK(pochhammer(0.0, {0.5}) == cplx(1.0));
    CHECK(std::abs(pochhammer(1.0, {0.3})) == 0.0);
    CHECK(rel_err(pochhammer(0.5, {0.1}), log_space_pochhammer(0.5, 0.1, 1e-18)) < 1e-12);

    const cplx z{0.3, -0.7}, p{0.2, 0.5};
    CHECK(rel_err(pochhammer(z, {p}), log_space_pochhammer(z, p, 1e-18)) < 1e-12);

    // Two moduli: product over the lattice n1, n2 >= 0.
    const cplx p1 = 0.3, p2{0.1, 0.2};
    cplx expect = 1.0;
    for (int a = 0; a < 80; ++a)
        for (int b = 0; b < 80; ++b) expect *= 1.0 - z * std::pow(p1, a) * std::pow(p2, b);
    CHECK(rel_err(pochhammer(z, {p1, p2}), expect) < 1e-12);

    CHECK_THROWS_AS(pochhammer(0.5, {1.0}), ModulusOutOfRange);
    CHECK_THROWS_AS(pochhammer(0.5, {0.9999}, TruncationPolicy{1e-16, 64}), TruncationBudgetExceeded);
}

TEST_CASE("theta_big") {
    CHECK(std::abs(theta_big(1.0, 0.3)) == 0.0);
    const cplx p = 0.2, z{0.7, 0.1};
    CHECK(std::abs(theta_big(p * z, p) + theta_big(z, p) / z) < 1e-12);
    CHECK(rel_err(theta_big(0.3, 0.1), direct_theta(0.3, 0.1, 64)) < 1e-14);
    CHECK(rel_err(theta_big(0.3, 0.1), theta_big(0.3, 0.1, TruncationPolicy{}.refined())) < 1e-15);
    CHECK_THROWS_AS(theta_big(0.0, 0.3), ZeroArgument);
    CHECK_THROWS_AS(theta_big(0.5, 1.1), ModulusOutOfRange);
}

TEST_CASE("characteristic thetas") {
    const cplx tau{0.2, 0.9}, xi{0.3, -0.2};
    for (double g2 : {0.0, 0.5, 1.0 / 3}) {
        CHECK(rel_err(theta_char_series(1.5, g2, xi, tau), theta_char_series(0.5, g2, xi, tau)) < 1e-13);
        CHECK(rel_err(theta_char_product(1.5, g2, xi, tau), theta_char_product(0.5, g2, xi, tau)) < 1e-12);
    }
    CHECK(std::abs(theta_char_series(0.5, 0.5, 0.0, cplx(0, 1))) < 1e-12);
    CHECK(std::abs(theta_char_product(0.5, 0.5, 0.0, cplx(0, 1))) < 1e-12);

    const double gammas[] = {0.0, 0.5, -0.5, 1.0 / 3, -1.0 / 3};
    for (int i = 0; i < 25; ++i) {
        const double g1 = gammas[i % 5], g2 = gammas[(3 * i + 1) % 5];
        const cplx t{-0.5 + 0.04 * i, 0.3 + 0.1 * i};
        const cplx x = std::polar(0.2 + 0.03 * i, 0.7 * i);
        const cplx a = theta_char_series(g1, g2, x, t), b = theta_char_product(g1, g2, x, t);
        CHECK(std::abs(a - b) <= 1e-10 * (1.0 + std::abs(a)));
    }
    CHECK_THROWS_AS(theta_char_series(0.5, 0.5, 0.1, cplx(0.3, 1e-8)), NonconvergentTau);
}

TEST_CASE("tau_N and U") {
    const auto P3 = EllipticParams::make(3, 0.5, 0.3);
    CHECK(std::abs(tau_N(1.0, P3) - 1.0) < 1e-14);
    CHECK(std::abs(tau_N(std::pow(0.5, 3) * 0.8, P3) / tau_N(0.8, P3) - 1.0) < 1e-10);
    const cplx z{0.7, 0.2};
    CHECK(std::abs(tau_N(z, P3) * tau_N(1.0 / z, P3) - 1.0) < 1e-10);
    CHECK_THROWS_AS(tau_N(0.0, P3), ZeroArgument);

    const auto P = EllipticParams::make(3, 0.4, 0.3);
    for (cplx x : {cplx(1.3), cplx(0.8, 0.4), cplx(-0.6, 0.9)}) {
        CHECK(rel_err(U(x, P), U(1.0 / x, P)) < 1e-10);
        CHECK(rel_err(U(std::pow(P.q, 3) * x, P), U(x, P)) < 1e-10);
        cplx prod = 1.0;
        for (int i = 1; i <= 3; ++i) prod *= U(std::pow(P.q, i) * x, P);
        CHECK(std::abs(prod - 1.0) < 1e-10);
    }
    // The closed form agrees with the tau_N product on the principal-branch-safe domain.
    CHECK(rel_err(U(cplx(1.1, 0.3), P), U_from_tau(cplx(1.1, 0.3), P)) < 1e-10);
    // U does not depend on s or c.
    CHECK(U(1.3, P) == U(1.3, P.with_s(0.1).with_c(0.4)));
}

TEST_CASE("kappa inverse") {
    const auto P = EllipticParams::make(2, 0.5, 0.3);
    CHECK(std::abs(kappa_inv(1.0, P) - 1.0) < 1e-14);
    const cplx z2{0.8, 0.3};
    CHECK(std::abs(kappa_inv(z2, P) * kappa_inv(1.0 / z2, P) - 1.0) < 1e-12);
    CHECK(rel_err(kappa_inv(z2, P), kappa_inv(z2, P, TruncationPolicy{}.refined())) < 1e-10);
}

TEST_CASE("F_a ladder") {
    const auto P = EllipticParams::make(3, 0.45, 0.3, 0.2);
    const cplx x{1.2, 0.1};
    CHECK(F_a(x, 0, P.s, P) == cplx(1.0));
    CHECK(F_a(x, 1, P.s, P) == U(x, P));
    CHECK(std::abs(F_a(x, -1, P.s, P) * U(x / P.s, P) - 1.0) < 1e-12);
    // The starred ladder uses s*.
    const cplx s = P.sstar();
    CHECK(rel_err(F_a(x, 2, s, P), U(x, P) * U(s * x, P)) < 1e-14);
}

TEST_CASE("Y_mn") {
    const auto P = EllipticParams::make(2, 0.3, 0.2);
    CHECK(std::abs(Y_mn(1.3, 2, 2, P) - 1.0) < 1e-14);

    // On S_{m,n} the two written forms coincide.
    for (auto [m, n] : {std::pair{-1, -1}, {-2, 1}, {3, -1}, {2, 3}, {-3, 1}}) {
        const cplx s = std::exp(-2.0 * std::log(P.q) / double(m + n));
        const auto Ps = P.with_s(s);
        for (cplx x : {cplx(1.3), cplx(0.7, 0.5)}) {
            const auto f = Y_mn_forms(x, m, n, Ps);
            CHECK(f.difference < 1e-10);
            CHECK(std::abs(Y_mn(x, m, n, Ps) * Y_mn(1.0 / x, m, n, Ps) - 1.0) < 1e-10);
        }
    }
    // m + n = 0 needs c = N/n.
    const auto Pc = P.with_c(2.0 / 3.0).with_s(0.5);
    CHECK(Y_mn_forms(1.13, -3, 3, Pc).difference < 1e-10);

    // Off the surface the forms separate, which is what gives the equality its content.
    const auto off = Y_mn_forms(1.3, -2, 1, P.with_s(std::pow(P.q, 2.0) * 1.01));
    CHECK(off.difference > 1e-3);
}

TEST_CASE("Y_FF closed form") {
    const TruncationPolicy deep = TruncationPolicy{}.refined();
    const auto P = EllipticParams::make(2, 0.5, 0.3);
    // At c = 0 numerator and denominator carry the same four thetas.
    CHECK(std::abs(Y_FF(1.2, P, deep) - 1.0) < 1e-15);
    // Snapshot at c = 0.3 from a doubled-depth evaluation.
    CHECK(std::abs(Y_FF(1.2, P.with_c(0.3)) - cplx(-20.997405864907979, 0.0)) < 1e-12);

    const auto Pc = P.with_c(0.3);
    for (cplx x : {cplx(1.2), cplx(0.9, 0.4)})
        CHECK(std::abs(Y_FF(x, Pc) * Y_FF(1.0 / x, Pc) - 1.0) < 1e-10);

    // c = -1/2: q^{2+2c} = q^{-2c}, leaving a four-theta ratio.
    const auto Ph = P.with_c(-0.5);
    const cplx x{1.1, 0.2}, Q = std::pow(P.q, 4), q2 = P.q * P.q;
    auto T = [&](cplx y) { return theta_big(y, Q); };
    const cplx four = T(1.0 / (x * x)) * T(q2 / (x * x)) * T(P.q * x * x) * T(P.q * x * x) /
                      (T(x * x) * T(q2 * x * x) * T(P.q / (x * x)) * T(P.q / (x * x)));
    CHECK(rel_err(Y_FF(x, Ph), four) < 1e-12);
}

TEST_CASE("Y^{(k,k')} at special central charges") {
    const auto P = EllipticParams::make(3, 0.5, 0.3);
    const cplx x{1.3, 0.2};
    for (int k = 1; k <= 3; ++k)
        for (int kp = 1; kp <= 3; ++kp) {
            CHECK(std::abs(Y_kkprime_cr(x, k, kp, P.with_c(-3.0)) - 1.0) < 1e-10);
            CHECK(std::abs(Y_kkprime_cr(x, k, kp, P) - 1.0) < 1e-14);
        }
    const auto Pc = P.with_c(0.37);
    CHECK(rel_err(Y_kkprime_cr(x, 1, 1, Pc), U(x, P) / U(std::pow(P.q, -0.37) * x, P)) < 1e-14);
    CHECK_THROWS_AS(Y_kkprime_cr(x, 4, 1, P), InvalidParams);
}

TEST_CASE("I series") {
    const auto P = EllipticParams::make(2, 0.6, 0.3);
    CHECK(I_series(1.0, P) == cplx(0.0));
    const cplx x{0.8, 0.3};
    CHECK(std::abs(I_series(x, P) + I_series(1.0 / x, P)) < 1e-12);

    // Literal sum at doubled depth.
    auto half = [&](cplx y) {
        cplx acc = -0.5 * y / (1.0 - y);
        for (int l = 0; l < 400; ++l) {
            const cplx t = y * std::pow(P.q, 4.0 * l);
            acc += t / (1.0 - t);
        }
        return acc;
    };
    const cplx lit = half(0.64) - half(1.0 / 0.64);
    CHECK(rel_err(I_series(0.8, P), lit) < 1e-12);
    CHECK(std::abs(I_series(0.8, P) - 2.0959033638107192) < 1e-12);
}

TEST_CASE("f_cr series and mode forms") {
    const auto P = EllipticParams::make(2, 0.55, 0.3);
    CHECK(std::abs(f_cr_series(1.0, 1, 1, P)) < 1e-14);
    CHECK(std::abs(f_cr_modes(1.0, 1, 1, P)) < 1e-14);

    const auto P3 = EllipticParams::make(3, 0.5, 0.3);
    for (int k = 1; k <= 3; ++k) {
        const cplx x = std::polar(1.1, 0.4);
        CHECK(std::abs(f_cr_series(x, k, k, P3) + f_cr_series(1.0 / x, k, k, P3)) < 1e-10);
        CHECK(std::abs(f_cr_modes(x, k, k, P3) + f_cr_modes(1.0 / x, k, k, P3)) < 1e-10);
    }
    for (auto [k, kp] : {std::pair{1, 1}, {2, 1}, {1, 2}, {2, 2}}) {
        const auto ann = f_cr_modes_annulus(k, kp, P3);
        for (int i = 0; i < 12; ++i) {
            const double r = std::pow(ann.inner, 0.9 - 0.15 * i);
            const cplx x = std::polar(std::isfinite(r) ? r : 1.0, 0.5 * i);
            if (!ann.contains(x)) continue;
            CHECK(std::abs(f_cr_series(x, k, kp, P3) - f_cr_modes(x, k, kp, P3)) < 1e-8);
        }
    }
    CHECK_THROWS_AS(f_cr_modes(0.2, 2, 1, P3), OutsideConvergenceAnnulus);
}

TEST_CASE("f_cr sign against the literal prefactors") {
    const auto P = EllipticParams::make(3, 0.5, 0.3);
    const cplx x = std::polar(1.0, 0.3);
    const int k = 1, kp = 2;
    // Literal -2 ln q prefactor over the I combination.
    cplx bracket = 0.0;
    for (int i2 = 1 - k; i2 <= k - 1; i2 += 2)
        for (int j2 = 1 - kp; j2 <= kp - 1; j2 += 2) {
            const double e = (i2 - j2) / 2.0;
            bracket += 2.0 * I_series(std::pow(P.q, e) * x, P) - I_series(std::pow(P.q, e + 1) * x, P) -
                       I_series(std::pow(P.q, e - 1) * x, P);
        }
    const cplx literal_series = -2.0 * std::log(P.q) * bracket;
    // Literal mode sum; on |x| = 1 the terms decay like q^{|r|}.
    cplx modes = 0.0;
    for (int r = -300; r <= 300; ++r) {
        if (r == 0) continue;
        modes += q_number(P.q, (3 - 2) * r) * q_number(P.q, 1 * r) / q_number(P.q, 3 * r) *
                 std::pow(x, 2.0 * r);
    }
    const cplx literal_modes = -2.0 * (P.q - 1.0 / P.q) * std::log(P.q) * modes;

    const cplx f = f_cr_series(x, k, kp, P);
    CHECK(std::abs(f - literal_modes) < 1e-10);
    CHECK(std::abs(f + literal_series) < 1e-10);
    CHECK(std::abs(f) > 1e-2);
    // The numeric derivative of Y^{(k,k')} at c = -N picks the mode-sum sign.
    const double h = 1e-4;
    const cplx d = (Y_kkprime_cr(x, k, kp, P.with_c(-3.0 + h)) - Y_kkprime_cr(x, k, kp, P.with_c(-3.0 - h))) /
                   (2.0 * h);
    CHECK(std::abs(d - f) < 1e-6);
}

TEST_CASE("abelianity branches") {
    std::vector<cplx> grid;
    for (int i = 0; i < 200; ++i) grid.push_back(0.5 * std::pow(4.0, i / 199.0));

    SUBCASE("abel4 literal values") {
        const AbelInstance inst{AbelBranch::abel4, -3, 3, 0, 1};
        const auto pt = resolve_abelian(inst, 2, 0.6);
        CHECK(std::abs(pt.c - 2.0 / 3.0) < 1e-15);
        CHECK(std::abs(pt.s - std::pow(0.6, -2.0 / 3.0)) < 1e-14);
        CHECK(std::abs(pt.sstar - std::pow(0.6, -4.0 / 3.0)) < 1e-14);
        CHECK(abelianity_check(inst, 2, 0.6, grid).residual < 1e-9);
        CHECK(abelianity_check(inst, 2, 0.6, grid, 1.01).residual > 1e-3);
    }
    SUBCASE("abel1") {
        const AbelInstance inst{AbelBranch::abel1, 2, -3, 2, 1};
        const auto pt = resolve_abelian(inst, 2, 0.6);
        // c = N/(nm) (lambda' m - lambda n) with lambda = 2, lambda' = -1.
        CHECK(std::abs(pt.c - 2.0 / -6.0 * (-1.0 * 2 - 2.0 * -3)) < 1e-14);
        CHECK(abelianity_check(inst, 2, 0.6, grid).residual < 1e-9);
        CHECK(abelianity_check(inst, 2, 0.6, grid, 1.01).residual > 1e-3);
    }
    SUBCASE("abel2 and abel3") {
        for (const AbelInstance inst : {AbelInstance{AbelBranch::abel2, 2, 1, 1, 2},
                                        AbelInstance{AbelBranch::abel2, 3, -1, 1, 1},
                                        AbelInstance{AbelBranch::abel3, 1, 2, 1, 2},
                                        AbelInstance{AbelBranch::abel3, -1, 3, 1, 1}}) {
            const std::string branch = to_string(inst.branch);
            CAPTURE(branch);
            CHECK(abelianity_check(inst, 3, 0.45, grid).residual < 1e-9);
            CHECK(abelianity_check(inst, 3, 0.45, grid, 1.01).residual > 1e-3);
        }
    }
    SUBCASE("domain violations") {
        CHECK_THROWS_AS(resolve_abelian({AbelBranch::abel4, -2, 2, 0, 1}, 2, 0.6), BranchDomainViolation);
        CHECK_THROWS_AS(resolve_abelian({AbelBranch::abel1, 2, -3, 1, 1}, 2, 0.6), BranchDomainViolation);
        CHECK_THROWS_AS(resolve_abelian({AbelBranch::abel2, 2, 2, 1, 1}, 2, 0.6), BranchDomainViolation);
        CHECK_THROWS_AS(abel_branch_from_string("abel9"), InvalidParams);
    }
}
