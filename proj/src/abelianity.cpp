#include "wkit/abelianity.hpp"

#include <cmath>
#include <cstdlib>
#include <numeric>

#include "wkit/errors.hpp"

namespace wkit::qseries {

namespace {

bool divides(long d, long v) { return v != 0 && v % d == 0; }

// lambda in Z/2, or Z/u with u a divisor of one of `bases`.
void check_fractional(long num, long den, std::initializer_list<long> bases, const char* what) {
    if (den <= 0) throw BranchDomainViolation(std::string(what) + " denominator must be positive");
    const long g = std::gcd(std::labs(num), den);
    const long d = den / g;
    if (d == 1 || d == 2) return;
    for (long b : bases)
        if (divides(d, std::labs(b))) return;
    throw BranchDomainViolation(std::string(what) + " denominator is not 2 or a divisor of the twist");
}

}  // namespace

const char* to_string(AbelBranch branch) {
    switch (branch) {
        case AbelBranch::abel1: return "abel1";
        case AbelBranch::abel2: return "abel2";
        case AbelBranch::abel3: return "abel3";
        case AbelBranch::abel4: return "abel4";
        case AbelBranch::equal_twist: return "equal_twist";
    }
    return "?";
}

AbelBranch abel_branch_from_string(const std::string& name) {
    for (auto b : {AbelBranch::abel1, AbelBranch::abel2, AbelBranch::abel3, AbelBranch::abel4,
                   AbelBranch::equal_twist})
        if (name == to_string(b)) return b;
    throw InvalidParams("unknown abelianity branch '" + name + "'");
}

AbelPoint resolve_abelian(const AbelInstance& inst, int N, cplx q) {
    const int m = inst.m, n = inst.n;
    const double lam = double(inst.lambda_num) / double(inst.lambda_den);
    const cplx lq = std::log(q);
    auto qp = [&](double e) { return std::exp(e * lq); };
    const double dN = N;
    switch (inst.branch) {
        case AbelBranch::abel1: {
            if (std::abs(m) <= 1 || std::abs(n) <= 1)
                throw BranchDomainViolation("abel1 needs |m|, |n| > 1");
            if (inst.lambda_den != 1 || inst.lambda_num == 0 || inst.lambda_num == 1)
                throw BranchDomainViolation("abel1 needs integers lambda, lambda' = 1 - lambda, both nonzero");
            const double lamp = 1.0 - lam;
            return {qp(-dN * lam / m), qp(-dN * lamp / n), dN / (n * m) * (lamp * m - lam * n)};
        }
        case AbelBranch::abel2:
        case AbelBranch::equal_twist: {
            if (inst.branch == AbelBranch::abel2) {
                if (std::abs(n) != 1 || std::abs(m) <= 1)
                    throw BranchDomainViolation("abel2 needs |n| = 1 and |m| > 1");
                check_fractional(inst.lambda_num, inst.lambda_den, {m, m + n}, "abel2 lambda");
            } else {
                if (m != n || std::abs(m) != 1)
                    throw BranchDomainViolation("equal_twist needs m = n = +-1");
                check_fractional(inst.lambda_num, inst.lambda_den, {}, "equal_twist lambda");
            }
            return {qp(-dN * lam), qp(-dN * n * (1.0 - lam * m)), dN * n * (1.0 - lam * (m + n))};
        }
        case AbelBranch::abel3: {
            if (std::abs(m) != 1 || std::abs(n) <= 1)
                throw BranchDomainViolation("abel3 needs |m| = 1 and |n| > 1");
            check_fractional(inst.lambda_num, inst.lambda_den, {n, n + m}, "abel3 lambda'");
            return {qp(-dN * m * (1.0 - lam * n)), qp(-dN * lam), dN * m * (lam * (n + m) - 1.0)};
        }
        case AbelBranch::abel4: {
            if (m + n != 0 || n <= 0 || n % 2 == 0)
                throw BranchDomainViolation("abel4 needs m + n = 0 with n > 0 odd");
            return {qp(-(n - 1) * dN / (2.0 * n)), qp(-(n + 1) * dN / (2.0 * n)), dN / n};
        }
    }
    throw BranchDomainViolation("unknown branch");
}

CheckReport abelianity_check(const AbelInstance& inst, int N, cplx q, const std::vector<cplx>& grid,
                             double perturb, const TruncationPolicy& policy) {
    const auto pt = resolve_abelian(inst, N, q);
    const auto params = EllipticParams::make(N, q, pt.s * perturb, pt.c);
    // The stored s* must agree with s q^{-c}; a mismatch means the branch formulas disagree.
    const double consistency = std::abs(EllipticParams::make(N, q, pt.s, pt.c).sstar() - pt.sstar) /
                               std::abs(pt.sstar);
    double worst = consistency;
    for (cplx x : grid) worst = std::max(worst, std::abs(Y_mn(x, inst.m, inst.n, params, policy) - 1.0));
    nlohmann::json in = {{"branch", to_string(inst.branch)},
                         {"N", N},
                         {"q", complex_json(q)},
                         {"m", inst.m},
                         {"n", inst.n},
                         {"lambda", {inst.lambda_num, inst.lambda_den}},
                         {"s", complex_json(params.s)},
                         {"sstar", complex_json(params.sstar())},
                         {"c", complex_json(pt.c)},
                         {"perturb", perturb},
                         {"grid_points", grid.size()},
                         {"sstar_consistency", consistency}};
    return CheckReport::make("abelianity", to_string(inst.branch),
                             "structure function Y_{m,n} is identically 1", in, worst, 1e-9);
}

}  // namespace wkit::qseries
