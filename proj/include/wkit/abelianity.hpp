#pragma once

#include <vector>

#include "wkit/qseries.hpp"
#include "wkit/report.hpp"

namespace wkit::qseries {

// equal_twist is the m = n = +-1 case, which reuses the abel2 formulas.
enum class AbelBranch { abel1, abel2, abel3, abel4, equal_twist };

const char* to_string(AbelBranch branch);
AbelBranch abel_branch_from_string(const std::string& name);

struct AbelInstance {
    AbelBranch branch = AbelBranch::abel1;
    int m = 0;
    int n = 0;
    // lambda for abel1, abel2 and equal_twist; lambda' for abel3; unused for abel4.
    long lambda_num = 0;
    long lambda_den = 1;
};

// (s, s*, c) from the branch formulas after checking the branch domain.
struct AbelPoint {
    cplx s, sstar, c;
};
AbelPoint resolve_abelian(const AbelInstance& inst, int N, cplx q);

// max |Y_{m,n}(x) - 1| over the grid; perturb scales s with c held fixed.
CheckReport abelianity_check(const AbelInstance& inst, int N, cplx q, const std::vector<cplx>& grid,
                             double perturb = 1.0, const TruncationPolicy& policy = {});

}  // namespace wkit::qseries
