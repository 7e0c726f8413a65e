#pragma once

#include "pwe/potential.hpp"
#include "pwe/system.hpp"

namespace pwe {

struct TargetSet {
    enum class Kind { Full, Boundary, Singular, CustomBox };
    Kind kind = Kind::Full;
    int K = 0;                   // Singular truncation depth
    std::vector<double> lo, hi;  // CustomBox

    static TargetSet full() { return {}; }
    static TargetSet boundary() { return {Kind::Boundary, 0, {}, {}}; }
    static TargetSet singular(int K) { return {Kind::Singular, K, {}, {}}; }
    static TargetSet box(std::vector<double> lo, std::vector<double> hi) {
        return {Kind::CustomBox, 0, std::move(lo), std::move(hi)};
    }
    std::string describe() const;
};

struct PressurePoint {
    int n = 0;
    double a_n = 0;  // log sum; -inf sentinel when the restricted sum vanishes
    double rate = 0;
    bool minus_inf = false;
    bool exact = false;  // accumulated in exact rational arithmetic
    std::optional<Rat> exact_sum;
    bool via_matrix = false;
};

// Finite-n pressure data: the per-n curve, the Fekete upper bound for the
// limit, the exact SFT limit when the map is Markov with locally constant
// data, and (filled by the variational layer) a measure lower bound.
struct PressureEstimate {
    TargetSet target;
    std::vector<PressurePoint> per_n;
    double fekete_upper = std::numeric_limits<double>::infinity();
    std::optional<double> markov_limit;
    bool markov_limit_exact = false;
    std::optional<double> measure_lower;

    // Certified upper bound for the limit pressure.
    double upper_value() const { return markov_limit ? *markov_limit : fekete_upper; }
    // Certified lower bound (exact limit, or the best measure objective).
    std::optional<double> lower_value() const {
        if (markov_limit) return markov_limit;
        return measure_lower;
    }
    const PressurePoint& at(int n) const;
};

PressureEstimate pressure_estimate(const System& sys, const PotentialSpec& pot,
                                   const TargetSet& target, int n_max);
PressureEstimate boundary_pressure(const System& sys, const PotentialSpec& pot, int K,
                                   int n_max);

// Transfer-matrix route for Markov maps with locally constant one-step data:
// per-n sums via weighted adjacency powers and the exact limit log(Perron).
struct MarkovPressure {
    bool applicable = false;
    bool exact = false;  // false on the d>=2 bracket tier (per-coordinate squeeze)
    std::vector<double> a_n;        // lower values when !exact
    std::vector<double> a_n_upper;  // equal to a_n when exact
    double limit = 0;
};
MarkovPressure markov_pressure(const System& sys, const PotentialSpec& pot, int n_max);

struct SmallBoundaryVerdict {
    enum class V { Holds, Fails, Inconclusive };
    V verdict = V::Inconclusive;
    double margin = 0;
    double boundary_upper = 0;
    std::optional<double> full_lower;
    std::string detail;
};
SmallBoundaryVerdict small_boundary_check(const PressureEstimate& full,
                                          const PressureEstimate& boundary,
                                          double tol = 1e-12);

// Finite-n proxies of the trivial pressure sandwich: the {q log f} pressure
// value (middle, as e^{a_n/(nq)}) must lie in [lower, upper].
struct SandwichResult {
    double lower = 0, middle = 0, upper = 0;
};
SandwichResult trivial_sandwich(const System& sys, const PotentialSpec& pot,
                                const TargetSet& target, int n_max);

// Lambda_{d-1}: top exterior-power growth rate over words; 1 when d == 1,
// exact per-word data for diagonal affine branches.
double lambda_top_exterior(const System& sys, int n_max);

// max over admissible n-words of an additive per-symbol functional (max-plus
// Bellman over the transition graph). Markov maps only.
double max_word_sum(const System& sys, const std::vector<double>& per_piece, int n);

}  // namespace pwe
