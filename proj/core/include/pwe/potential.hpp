#pragma once

#include <cmath>
#include <limits>

#include "pwe/engine.hpp"

namespace pwe {

// The subadditive potential family f_{n,t,p} = |g^{(n)}| |det DT^n|^{1/p} nu_n^t,
// raised to an overall power q. p = infinity drops the determinant factor
// (the G-family f_{n,t} = |G^{(n)}| nu_n^t of the variational principle).
struct PotentialSpec {
    Weight weight;
    double t = 0;
    double p = std::numeric_limits<double>::infinity();
    double q = 1;
    double s = 0;  // split parameter, consumed by the split bound
    bool G_mode = false;

    double det_coef() const { return std::isinf(p) ? 0.0 : 1.0 / p; }

    void validate(double alpha = 1.0) const {
        if (!(p > 1))
            throw ParameterError("potential requires p in (1, inf]");
        if (t < 0 || s < 0 || s > t)
            throw ParameterError("potential requires 0 <= s <= t");
        (void)alpha;
        if (!std::isinf(p)) {
            const double qmax = p / (p - 1);
            if (q < 1 - 1e-12 || q > qmax + 1e-12)
                throw ParameterError("q must lie in [1, p/(p-1)]");
        } else if (q < 1 - 1e-12) {
            throw ParameterError("q must be >= 1");
        }
    }

    // log sup of f^q over one cylinder, from its record. det_coef and t are
    // nonnegative so the sup uses the upper det/nu enclosures.
    double log_sup(const CylRecord& r) const {
        if (r.log_g_sup == kNegInf) return kNegInf;
        return q * (r.log_g_sup + det_coef() * r.log_det_hi + t * r.log_nu_hi);
    }
    double log_inf(const CylRecord& r) const {
        if (r.log_g_inf == kNegInf) return kNegInf;
        return q * (r.log_g_inf + det_coef() * r.log_det_lo + t * r.log_nu_lo);
    }
    // Variant using the extended-neighbourhood expansion nu~ (the proof-side
    // quantity); coincides with log_sup for affine branches with margin 0.
    double log_sup_tilde(const CylRecord& r) const {
        if (r.log_g_sup == kNegInf) return kNegInf;
        return q * (r.log_g_sup + det_coef() * r.log_det_hi + t * r.log_nu_tilde_hi);
    }

    // Exact rational value of sup f^q when representable: locally constant
    // rational weight, no fractional det/nu powers.
    std::optional<Rat> exact_sup(const CylRecord& r) const {
        if (!r.g_exact || t != 0 || r.log_g_sup != r.log_g_inf) return std::nullopt;
        const bool q_integral = q == std::nearbyint(q);
        if (!q_integral) return std::nullopt;
        Rat base = *r.g_exact;
        if (det_coef() != 0) {
            if (!r.det_exact || det_coef() != std::nearbyint(det_coef()))
                return std::nullopt;
            base *= pow_rat(*r.det_exact, static_cast<long>(det_coef()));
        }
        return pow_rat(base, static_cast<long>(q));
    }

    std::string cache_key() const {
        char buf[128];
        std::snprintf(buf, sizeof(buf), "t=%.17g;p=%.17g;q=%.17g;s=%.17g;", t, p, q, s);
        return weight_cache_key(weight) + buf;
    }
};

std::string weight_cache_key(const Weight& w);

}  // namespace pwe
