#pragma once

#include <string>

#include "wkit/qseries.hpp"
#include "wkit/report.hpp"
#include "wkit/tensor.hpp"

namespace wkit {

// The Z_N clock and shift matrices and the twists built from them.
struct ZnMatrices {
    int N = 0;
    Mat g;       // diag(omega^j), j = 1..N
    Mat h;       // h_{i,i+1 mod N} = 1
    Mat g_half;  // diag(omega^{j/2})
    Mat GH;      // g^{1/2} h g^{1/2}

    static ZnMatrices make(int N);
    // GH^{-m}
    Mat M(int m) const;
    // g^{a2} h^{a1}
    Mat I(int a1, int a2) const;
};

enum class RKind { Z, R, Rhat };

const char* to_string(RKind kind);

struct RMatrixValue {
    LabeledTensor op;
    RKind kind = RKind::R;
    cplx spectral = 1.0;
    EllipticParams params;
};

namespace rmatrix {

// Logarithmic spectral coordinates: z = e^{i pi xi}, q = e^{i pi zeta}, and e^{i pi tau} = -s.
cplx xi_of(cplx z);
cplx zeta_of(const EllipticParams& params);
cplx tau_of(const EllipticParams& params);

RMatrixValue build_Z(cplx z, const EllipticParams& params, const TruncationPolicy& policy = {});
RMatrixValue build_R(cplx z, const EllipticParams& params, const TruncationPolicy& policy = {});
RMatrixValue build_Rhat(cplx z, const EllipticParams& params, const TruncationPolicy& policy = {});

// Same constructions driven by the logarithmic coordinate xi, so that xi + 1
// realizes the continuation z -> -z without a branch choice.
RMatrixValue build_Z_xi(cplx xi, const EllipticParams& params, const TruncationPolicy& policy = {});
RMatrixValue build_R_xi(cplx xi, const EllipticParams& params, const TruncationPolicy& policy = {});

// Matrix of R(z) or R-hat(z) on labels (a, b).
LabeledTensor r_on(RKind kind, cplx z, const std::string& a, const std::string& b,
                   const EllipticParams& params, const TruncationPolicy& policy = {});

Mat permutation(int N);

// True when |arg z| < pi/2, away from the negative real axis.
bool in_safe_domain(cplx z);

CheckReport check_yang_baxter(cplx z, cplx w, const EllipticParams& params, RKind kind = RKind::R,
                              double perturb = 1.0, const TruncationPolicy& policy = {});
CheckReport check_unitarity(cplx z, const EllipticParams& params, double perturb = 1.0,
                            const TruncationPolicy& policy = {});
CheckReport check_hat_unitarity(cplx z, const EllipticParams& params, double perturb = 1.0,
                                const TruncationPolicy& policy = {});
CheckReport check_regularity(const EllipticParams& params, double perturb = 1.0,
                             const TruncationPolicy& policy = {});
// Residual is the larger of crossing symmetry and crossing-unitarity for R,
// and crossing-unitarity alone for R-hat.
CheckReport check_crossing(cplx z, const EllipticParams& params, RKind kind = RKind::R,
                           double perturb = 1.0, const TruncationPolicy& policy = {});
CheckReport check_antisymmetry(cplx z, const EllipticParams& params, double perturb = 1.0,
                               const TruncationPolicy& policy = {});
CheckReport check_quasi_periodicity(cplx z, const EllipticParams& params, double perturb = 1.0,
                                    const TruncationPolicy& policy = {});
// M_a R-hat(x) = F_a(x) R-hat(s^a x) M_a with M_a = GH^{-a}; starred uses p* and s*.
CheckReport check_quasi_periodicity_M(cplx x, int a, const EllipticParams& params,
                                      bool starred = false, double perturb = 1.0,
                                      const TruncationPolicy& policy = {});
CheckReport check_zn_symmetry(cplx z, const EllipticParams& params, RKind kind = RKind::R,
                              const TruncationPolicy& policy = {});
// ker R-hat(q) against the image of the rank-2 antisymmetrizer.
CheckReport check_kernel_at_q(const EllipticParams& params, const TruncationPolicy& policy = {});

}  // namespace rmatrix
}  // namespace wkit
