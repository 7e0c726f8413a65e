#pragma once

#include "pwe/potential.hpp"
#include "pwe/system.hpp"

namespace pwe {

// D^b_n: maximum number of depth-n cylinder closures containing one point.
// Falls back to the per-axis product decomposition beyond the enumeration
// budget (product maps only).
long long complexity_beginning(const System& sys, int n);

// Weighted form D^b_n({log f_n}): each cylinder weighted by sup f_n.
double complexity_beginning_weighted(const System& sys, const PotentialSpec& pot, int n);

// D^e_n: maximum number of closed depth-n branch images covering one point.
// Markov maps use end-word counts on the piece images; otherwise a geometric
// sweep over enumerated images.
long long complexity_end(const System& sys, int n);

// Admissible n-word counts ending at each piece (Markov transition counts).
std::vector<long long> end_word_counts(const System& sys, int n);

struct ComplexityProfile {
    int n_max = 0;
    std::vector<long long> db_n, de_n;  // index i <-> depth i+1
    std::vector<double> db_weighted_n;  // empty when no potential given
    std::vector<double> db_rate, de_rate, dbw_rate;
    double db_rate_last = 0, de_rate_last = 0, dbw_rate_last = 0;
    double db_rate_fekete = 0, de_rate_fekete = 0, dbw_rate_fekete = 0;
    bool db_stabilized = false;  // D^b_n constant over the computed window
};

ComplexityProfile complexity_profile(const System& sys, int n_max,
                                     const PotentialSpec* weighted = nullptr);

}  // namespace pwe
