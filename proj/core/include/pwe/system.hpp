#pragma once

#include <map>
#include <memory>
#include <string>
#include <variant>

#include "pwe/engine.hpp"

namespace pwe {

// One-step per-piece data in mode-neutral form, used by the transfer-matrix
// fast paths and the symbolic layer.
struct PieceLogs {
    bool affine = true;
    double log_g_inf = 0, log_g_sup = 0;  // log|g| over the piece
    std::optional<Rat> g_exact;
    double log_det = 0;                 // affine: exact; smooth: midpoint of range
    double log_det_lo = 0, log_det_hi = 0;
    std::vector<double> log_abs_a;      // per coordinate (affine)
};

template <class S>
struct TypedSystem {
    PiecewiseMap<S> map;
    mutable std::map<int, CylinderSet<S>> cylsets;

    const CylinderSet<S>& cylinders(int depth, long long budget) const {
        auto it = cylsets.find(depth);
        if (it == cylsets.end())
            it = cylsets.emplace(depth, enumerate_cylinders(map, depth, budget)).first;
        return it->second;
    }
};

// Type-erased dynamical system: exact-rational or binary64 geometry behind one
// interface. Immutable after construction apart from enumeration caches;
// operations are pure and safe to call concurrently on distinct systems.
class System {
public:
    System(PiecewiseMap<Rat> m, std::string name);
    System(PiecewiseMap<double> m, std::string name);

    const std::string& name() const { return name_; }
    bool exact() const;
    int dimension() const;
    int piece_count() const;
    bool all_affine() const;
    double lambda_log() const;  // log(lambda)
    double phase_volume() const;
    std::vector<double> phase_lo() const;
    std::vector<double> phase_hi() const;

    long long budget() const { return budget_; }
    void set_budget(long long b) { budget_ = b; }

    void validate() const;

    // --- cylinder layer -----------------------------------------------------
    // Cached per-depth, per-weight cylinder records in lexicographic order.
    const CylTable& table(const Weight& w, int depth) const;
    // Number of nonempty depth-n cylinders; uses the Markov path count when the
    // geometric enumeration would blow the budget.
    long long cylinder_count(int depth) const;
    bool count_within_budget(int depth) const;
    // Flags (lex order) for closure contact with S_O^{(K)} or with a box.
    std::vector<bool> meets_singular(int depth, int K) const;
    std::vector<bool> meets_box(int depth, const std::vector<double>& lo,
                                const std::vector<double>& hi) const;

    const MarkovInfo& markov() const;
    std::vector<PieceLogs> piece_logs(const Weight& w) const;
    // Closed piece images as double boxes (lo, hi), indexed by piece.
    std::vector<std::pair<std::vector<double>, std::vector<double>>> piece_images() const;

    // --- sweeps ---------------------------------------------------------------
    // Max multiplicity of depth-n cylinder closures, optionally weighted
    // (weights aligned with table order).
    double db_sweep(int depth, const std::vector<double>* weights) const;
    // Max multiplicity of closed depth-n branch images (geometric route).
    long long de_sweep_geometric(int depth) const;
    // Max multiplicity of piece images weighted per piece (Markov D^e route).
    double weighted_image_sweep(const std::vector<double>& piece_weights) const;

    // Product structure (d >= 2, diagonal affine, grid-aligned pieces):
    // returns the 1D factor systems when the map is a product.
    std::optional<std::vector<System>> product_factors() const;

    System blocked(int m) const;

    // Periodic-orbit admissibility: the fixed point of the composed branch of
    // the cyclic word, when it lies in the closed cylinder and its orbit
    // follows the word. Affine only.
    std::optional<std::vector<double>> periodic_point(const std::vector<int>& word) const;

    struct EvalOut {
        bool boundary = false;
        int piece = -1;
        std::vector<double> image;
        std::vector<double> jacobian;
    };
    EvalOut evaluate(const std::vector<double>& x) const;
    double birkhoff(const Weight& w, const std::vector<int>& word,
                    const std::vector<double>& x) const;
    ExpansionInfo word_expansion(const std::vector<int>& word) const;

    // nu_* proxy: max over depth-n cylinders of nu_n^{1/n}.
    double nu_star(int depth) const;

    using Variant = std::variant<TypedSystem<Rat>, TypedSystem<double>>;
    const Variant& holder() const { return *holder_; }

private:
    std::shared_ptr<Variant> holder_;  // shared so System copies share caches
    std::string name_;
    long long budget_ = 400000;
    mutable std::shared_ptr<std::optional<MarkovInfo>> markov_;
    mutable std::shared_ptr<std::map<std::string, CylTable>> tables_;
};

std::string weight_cache_key(const Weight& w);

}  // namespace pwe
