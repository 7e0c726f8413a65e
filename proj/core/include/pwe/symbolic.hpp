#pragma once

#include "pwe/pressure.hpp"

namespace pwe {

// Word graph presenting the symbolic model at order k: vertices are nonempty
// k-cylinders, edges nonempty (k+1)-cylinders. When the map is Markov for its
// own partition the depth-1 graph is the exact subshift presentation;
// otherwise the graph over-approximates the language and may only be used for
// upper-bound heuristics.
struct SymbolicModel {
    int alphabet = 0;
    int order = 1;
    bool markov_exact = false;
    std::vector<std::vector<int>> vertices;  // k-words, lexicographic

    struct Edge {
        int from = 0, to = 0;
        std::vector<int> word;  // (k+1)-word
        double log_g_inf = 0, log_g_sup = 0;  // one-step weight on the edge cylinder
        double log_det_step = 0;              // one-step log|det DT|
        std::vector<double> log_a_step;       // one-step per-coordinate log|a_c|
    };
    std::vector<Edge> edges;
    std::vector<std::vector<int>> out_edges;  // vertex -> edge ids

    int vertex_index(const std::vector<int>& word) const;
};

SymbolicModel build_symbolic(const System& sys, const Weight& G, int k);

// inf over the word's cylinder of log f_{m,t,p} (m = word length): the depth-m
// proxy of the symbolic potential; exact for locally constant data.
double symbolic_potential(const System& sys, const PotentialSpec& pot,
                          const std::vector<int>& word);

struct MeasureCandidate {
    enum class Kind { MarkovChain, PeriodicOrbit };
    Kind kind = Kind::MarkovChain;
    std::string label;
    int order = 0;          // Markov order, or orbit period
    std::vector<int> word;  // periodic word (orbit candidates)
    double entropy = 0;
    double log_g_integral = 0;    // int log|G| dmu
    double log_det_integral = 0;  // int log|det DT| dmu
    std::vector<double> lyap_coord;
    double lyap_smallest = 0;
    bool lyap_approximate = false;

    double objective(double t) const {
        return entropy + log_g_integral - t * lyap_smallest;
    }
};

// Equilibrium Markov measure of the edge-weighted graph: maximizes
// h + int(log|G|) - t*chi over order-k Markov measures via Perron data.
// Throws NotMarkov when exactness is required but the model is not an exact
// presentation.
MeasureCandidate optimize_markov(const System& sys, const SymbolicModel& model, double t,
                                 bool require_exact = true);

// All admissible periodic orbits up to period L_max (necklaces, geometric
// fixed-point verification), as atomic invariant measures.
std::vector<MeasureCandidate> enumerate_periodic(const System& sys, const Weight& G,
                                                 int L_max);

struct VariationalReport {
    double best_objective = 0;       // measure lower bound
    std::string best_label;
    double pressure_upper = 0;       // exact SFT limit or Fekete upper bound
    bool pressure_upper_exact = false;
    double gap = 0;
    SmallBoundaryVerdict boundary;
    double ruelle_max_objective = 0;  // max h - int log|det| over candidates
    bool pass = false;
    std::vector<MeasureCandidate> candidates;  // all, best first among ties
    PressureEstimate full_pressure;
    PressureEstimate boundary_pressure_est;
};

VariationalReport variational_check(const System& sys, const Weight& G, double t,
                                    int k_max, int L_max, int n_max,
                                    double tol = 1e-9);

}  // namespace pwe
