#pragma once

#include "wkit/rmatrix.hpp"

namespace wkit::tensor {

// Fused product over row spaces 1..k and column spaces 1'..k':
// highest row index leftmost inside, lowest column index leftmost outside.
LabeledTensor fused_R(cplx x, int k, int kprime, const EllipticParams& params, bool inverse = false,
                      const TruncationPolicy& policy = {});

// The critical-level matrix built from three fused products at central charge c.
// control swaps the q^{-c-N} argument for q^{-c}.
LabeledTensor M_matrix(cplx x, int k, int kprime, const EllipticParams& params, cplx c,
                       bool control = false, const TruncationPolicy& policy = {});

struct FusionResiduals {
    double rhat_product;      // R-hat_{10}(z) ... R-hat_{k0}(z q^{1-k})
    double rhat_t0_inverse;   // transposed inverses with the same arguments
    double r_inverse;         // R^{-1}_{10}(z) ... R^{-1}_{k0}(z q^{k-1})
    double rhat_inverse;      // R-hat inverses with ascending arguments
    double fused_Ak;          // fused product and its inverse against A_k
    double fused_Akprime;     // fused product and its inverse against A_k'
    double max() const;
};

FusionResiduals fusion_residuals(int k, int kprime, const EllipticParams& params, cplx x,
                                 double perturb = 1.0, const TruncationPolicy& policy = {});

CheckReport check_fusion_identities(int k, int kprime, const EllipticParams& params, cplx x,
                                    double perturb = 1.0, const TruncationPolicy& policy = {});
CheckReport check_fused_crossing_unitarity(int k, int kprime, const EllipticParams& params, cplx x,
                                           double perturb = 1.0,
                                           const TruncationPolicy& policy = {});
// M at c = -N equals the identity.
CheckReport check_M_identity(cplx x, int k, int kprime, const EllipticParams& params,
                             const TruncationPolicy& policy = {});
CheckReport check_M_derivative(cplx x, int k, int kprime, const EllipticParams& params,
                               double eps = 1e-4, bool control = false,
                               const TruncationPolicy& policy = {});
CheckReport check_antisymmetrizer(int k, int N);

}  // namespace wkit::tensor
