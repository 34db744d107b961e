#pragma once

#include <optional>
#include <vector>

#include "wkit/fusion.hpp"

namespace wkit {

// A surface s^m (s*)^n = q^{-N} with a concrete parameter point on it.
struct SurfaceSpec {
    int m = 0;
    int n = 0;
    EllipticParams params;
    bool p_warning = false;  // |p| >= 1: R-matrix based checks are unavailable
    double surface_residual = 0.0;
};

// Evaluation representation: L(z) is R-hat acting on an auxiliary space and the
// quantum space "V", evaluated at z / a.
struct EvalRep {
    EllipticParams params;
    cplx a = 1.0;

    LabeledTensor L(cplx z, const std::string& aux, const TruncationPolicy& policy = {}) const;
};

struct WGenerator {
    int k = 0;
    cplx z = 1.0;
    Mat t;                 // operator on the quantum space
    LabeledTensor Q;       // on spaces 1..k and V
    LabeledTensor QA;      // Q A_k
    std::vector<cplx> zi;  // q^{i-1-(k-1)/2} z
};

namespace wgen {

SurfaceSpec resolve_surface(int m, int n, int N, cplx q, cplx c = 0.0,
                            std::optional<cplx> s_free = std::nullopt);

// Built from rep.params; the surface contributes the twist exponents (m, n).
WGenerator build_t(int k, cplx z, const SurfaceSpec& surface, const EvalRep& rep,
                   const TruncationPolicy& policy = {});

// prod_i F_{-m}(z_i/w) / F*_n(z_i/w)
cplx exchange_factor(int k, cplx z, cplx w, int m, int n, const EllipticParams& params,
                     const TruncationPolicy& policy = {});

CheckReport check_qantisym(int k, cplx z, const SurfaceSpec& surface, const EvalRep& rep,
                           const TruncationPolicy& policy = {});
CheckReport check_rll(cplx z, cplx w, const EvalRep& rep, const TruncationPolicy& policy = {});

CheckReport exchange_residual_tL(int k, cplx z, cplx w, const SurfaceSpec& surface,
                                 const EvalRep& rep, const TruncationPolicy& policy = {});
CheckReport exchange_residual_tt(int k, int kprime, cplx z, cplx w, const SurfaceSpec& surface,
                                 const EvalRep& rep, const TruncationPolicy& policy = {});

// Structure-function prefactor of the tt exchange computed two ways: from the
// tL exchange factors and from the product of Y_{m,n}.
CheckReport check_prefactor_consistency(int k, int kprime, cplx z, cplx w,
                                        const SurfaceSpec& surface,
                                        const TruncationPolicy& policy = {});

struct QdetResult {
    cplx value;
    CheckReport report;
};
QdetResult qdet_extract(cplx z, const EvalRep& rep, const TruncationPolicy& policy = {});

CheckReport check_t_qdet(cplx z, const SurfaceSpec& surface, const EvalRep& rep,
                         const TruncationPolicy& policy = {});
CheckReport check_trace_MA(int m, int N);

// e_k of the eigenvalues of the twist GH^{-m}.
cplx elementary_symmetric(const Mat& M, int k);
CheckReport n0_check(int k, int m, const EvalRep& rep, const TruncationPolicy& policy = {});

// Central-difference dY^{(k,k')}/dc at c = -N against both closed forms of f_cr.
CheckReport critical_poisson_check(int k, int kprime, cplx x, const EllipticParams& params,
                                   double eps = 1e-4, const TruncationPolicy& policy = {});
CheckReport check_Y_critical(cplx x, int k, int kprime, const EllipticParams& params,
                             const TruncationPolicy& policy = {});

CheckReport alpha_identity_check(int k_max, int N_max = 4);

struct DegenerationMatrices {
    Mat F;  // on auxiliary (x) quantum space, diagonal q^{-alpha_{jl}}
    Mat V;  // diag z^{(N+1-2j)/N}
    Mat D;  // diag q^{1-N}, q^{3-N}, ..., q^{N-1}
};
DegenerationMatrices build_degeneration_matrices(const EllipticParams& params, cplx z);

}  // namespace wgen
}  // namespace wkit
