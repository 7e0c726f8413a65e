#pragma once

#include "pwe/complexity.hpp"
#include "pwe/pressure.hpp"
#include "pwe/symbolic.hpp"

namespace pwe {

// R^{t,p}_*(g) = exp(D^b/p + ((p-1)/p) P*({p/(p-1) log f_{n,t,p}})), evaluated
// from finite-n data. Every limit is carried as a bracket: the per-n curve,
// the Fekete upper bound, and the exact SFT limit when available. The D^b
// rate is reported both honestly (Fekete over the window) and as the
// stabilized value 0 when the computed D^b_n window is constant.
struct EssentialBound {
    double t = 0, p = 2;
    PressureEstimate pressure;  // of {q0 log f_{n,t,p}}, q0 = p/(p-1)
    std::vector<long long> db_n;
    double db_rate_fekete = 0, db_rate_last = 0;
    bool db_stabilized = false;
    double db_rate_used = 0;  // 0 when stabilized, else the Fekete rate
    double value_upper = 0;   // exp(db_used/p + ((p-1)/p) * pressure upper)
    std::optional<double> value_lower;
    double value_honest_upper = 0;  // with the un-stabilized D^b Fekete rate
    bool nu_tilde_differs = false;  // nu vs nu~ discrepancy observed

    // per-n composition exp(log(D^b_n)/(np) + ((p-1)/p) a_n/n)
    double finite_value(int n, bool stabilized_db = true) const;
};

EssentialBound essential_bound(const System& sys, const Weight& g, double t, double p,
                               int n_max);

// R^{t,s,p}_*(g): the D^b term is weighted by nu_n^s and the pressure part
// runs with nu^{t-s}. The s = 0 case reproduces essential_bound bit-exactly.
struct SplitBound {
    double t = 0, s = 0, p = 2;
    PressureEstimate pressure;  // of {q0 log f_{n,t-s,p}}
    std::vector<double> dbw_n;  // D^b_n({log nu^s})
    double dbw_rate_fekete = 0, dbw_rate_increment = 0;
    bool dbw_increment_stable = false;
    double dbw_rate_used = 0;
    double value_upper = 0;
    double value_via_boundary = 0;  // footnote variant: P*({log nu^s}, dO)/p
};

SplitBound essential_bound_split(const System& sys, const Weight& g, double t, double s,
                                 double p, int n_max);

struct ThomineBound {
    std::vector<std::pair<int, double>> per_n;
    double value = 0;  // at n_max
};
ThomineBound thomine_bound(const System& sys, const Weight& g, double t, double p,
                           int n_max);

// R^{t,p,q}_*(g) from measure candidates (paper integrand log(|g||det DT|^{1/p})),
// next to the complexity-free relaxation
// exp(D^b/p) * lim ||g^{(n)} |det DT^n|^{1/p+1/q} nu_n^t||^{1/n}.
struct VariationalBoundResult {
    double value = 0;
    double relaxation = 0;
    std::string best_label;
    double q = 1;
};
VariationalBoundResult variational_bound(const System& sys, const Weight& g, double t,
                                         double p, double q,
                                         const std::vector<MeasureCandidate>& measures,
                                         int n_max, double db_rate_used);

// Finite-n Lasota-Yorke coefficient n (D^b_n)^{1/p} (sum sup f^{p/(p-1)})^{(p-1)/p}
// modulo the universal constant; .root is its n-th root.
struct LyCoefficient {
    double value = 0;
    double root = 0;
};
LyCoefficient ly_coefficient(const System& sys, const Weight& g, double t, double p,
                             int n);

void validate_bound_params(double t, double p, double alpha = 1.0);

}  // namespace pwe
