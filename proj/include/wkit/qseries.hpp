#pragma once

#include <complex>
#include <initializer_list>
#include <span>

#include "wkit/errors.hpp"

namespace wkit {

using cplx = std::complex<double>;

// Series and product truncation control.
struct TruncationPolicy {
    double tail_eps = 1e-16;
    int max_terms = 512;

    void validate() const;
    // Deeper truncation used by refinement oracles.
    TruncationPolicy refined() const;
};

// Rank, deformation parameter, designated value s of -p^{1/2} and central charge.
// s is stored, never recomputed from p, so the half-period sign is fixed once.
struct EllipticParams {
    int N = 2;
    cplx q{0.5, 0.0};
    cplx s{0.3, 0.0};
    cplx c{0.0, 0.0};

    static EllipticParams make(int N, cplx q, cplx s, cplx c = 0.0);

    cplx p() const { return s * s; }
    cplx sstar() const;
    cplx pstar() const { return sstar() * sstar(); }
    cplx omega() const;
    // q^e on the principal branch of log q.
    cplx qpow(cplx e) const;

    EllipticParams with_c(cplx new_c) const;
    EllipticParams with_s(cplx new_s) const;

    void validate() const;
    // R-matrix construction needs a convergent elliptic nome.
    void require_elliptic() const;
};

// z^e with the principal logarithm.
cplx cpow(cplx z, cplx e);

// Raise PoleHit when |value| is below threshold.
void guard_pole(cplx value, const char* what, double threshold = 1e-14);

namespace qseries {

cplx pochhammer(cplx z, std::span<const cplx> moduli, const TruncationPolicy& policy = {});
cplx pochhammer(cplx z, std::initializer_list<cplx> moduli, const TruncationPolicy& policy = {});

cplx theta_big(cplx z, cplx p, const TruncationPolicy& policy = {});

cplx theta_char_series(double g1, double g2, cplx xi, cplx tau,
                       const TruncationPolicy& policy = {});
cplx theta_char_product(double g1, double g2, cplx xi, cplx tau,
                        const TruncationPolicy& policy = {});

cplx tau_N(cplx z, const EllipticParams& params, const TruncationPolicy& policy = {});

// Branch-free closed form of U.
cplx U(cplx z, const EllipticParams& params, const TruncationPolicy& policy = {});
// U as tau_N(q^{1/2} z) tau_N(q^{1/2}/z) with principal powers.
cplx U_from_tau(cplx z, const EllipticParams& params, const TruncationPolicy& policy = {});

cplx kappa_inv(cplx z2, const EllipticParams& params, const TruncationPolicy& policy = {});

cplx F_a(cplx x, int a, cplx s_val, const EllipticParams& params,
         const TruncationPolicy& policy = {});

struct YForms {
    cplx ratio_form;    // F*_n(x) F_m(s*^n x) / (F*_n(s*^{-n} x) F_m(x))
    cplx product_form;  // F*_n(x) F*_{-n}(x) / (F_m(x) F_{-m}(x))
    double difference;
};

cplx Y_mn(cplx x, int m, int n, const EllipticParams& params,
          const TruncationPolicy& policy = {});
YForms Y_mn_forms(cplx x, int m, int n, const EllipticParams& params,
                  const TruncationPolicy& policy = {});

cplx Y_FF(cplx x, const EllipticParams& params, const TruncationPolicy& policy = {});

cplx Y_kkprime_cr(cplx x, int k, int kprime, const EllipticParams& params,
                  const TruncationPolicy& policy = {});

cplx I_series(cplx x, const EllipticParams& params, const TruncationPolicy& policy = {});

cplx f_cr_series(cplx x, int k, int kprime, const EllipticParams& params,
                 const TruncationPolicy& policy = {});

struct Annulus {
    double inner;
    double outer;
    bool contains(cplx x) const;
};
Annulus f_cr_modes_annulus(int k, int kprime, const EllipticParams& params);

cplx f_cr_modes(cplx x, int k, int kprime, const EllipticParams& params,
                const TruncationPolicy& policy = {});

// Product over the centered grids i in (1-k)/2..(k-1)/2, j in (1-k')/2..(k'-1)/2
// of g(i - j). Exponents are passed as twice their value to keep them exact.
template <class G>
cplx grid_product(int k, int kprime, G&& g) {
    cplx r = 1.0;
    for (int i2 = 1 - k; i2 <= k - 1; i2 += 2)
        for (int j2 = 1 - kprime; j2 <= kprime - 1; j2 += 2) r *= g((i2 - j2) / 2.0);
    return r;
}

}  // namespace qseries
}  // namespace wkit
