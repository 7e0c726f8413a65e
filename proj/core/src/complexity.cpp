#include "pwe/complexity.hpp"

#include <cmath>

namespace pwe {

long long complexity_beginning(const System& sys, int n) {
    if (sys.count_within_budget(n))
        return static_cast<long long>(std::llround(sys.db_sweep(n, nullptr)));
    if (auto factors = sys.product_factors()) {
        long long prod = 1;
        for (auto& f : *factors) {
            f.set_budget(sys.budget());
            prod *= complexity_beginning(f, n);
        }
        return prod;
    }
    throw DepthExplosionError("D^b_" + std::to_string(n) +
                                  " needs enumeration beyond the budget and the map "
                                  "has no product structure",
                              sys.budget());
}

double complexity_beginning_weighted(const System& sys, const PotentialSpec& pot, int n) {
    const CylTable& t = sys.table(pot.weight, n);
    std::vector<double> w(t.records.size());
    bool all_one = true;
    for (size_t i = 0; i < t.records.size(); ++i) {
        const double ls = pot.log_sup(t.records[i]);
        w[i] = ls == kNegInf ? 0.0 : std::exp(ls);
        if (w[i] != 1.0) all_one = false;
    }
    if (all_one)  // f == 1 reduces to the unweighted count exactly
        return static_cast<double>(complexity_beginning(sys, n));
    return sys.db_sweep(n, &w);
}

std::vector<long long> end_word_counts(const System& sys, int n) {
    const MarkovInfo& mk = sys.markov();
    if (!mk.markov) throw NotMarkovError("end-word counts require a Markov map");
    const int pieces = sys.piece_count();
    std::vector<long long> u(pieces, 1);
    for (int step = 1; step < n; ++step) {
        std::vector<long long> v(pieces, 0);
        for (int i = 0; i < pieces; ++i)
            for (int j : mk.successors[i]) v[j] += u[i];
        u = std::move(v);
    }
    return u;
}

long long complexity_end(const System& sys, int n) {
    const MarkovInfo& mk = sys.markov();
    if (mk.markov) {
        // For Markov maps T^n(O_i) = T(O_{last symbol}), so the image family
        // is the piece images weighted by end-word counts.
        const auto counts = end_word_counts(sys, n);
        std::vector<double> w(counts.begin(), counts.end());
        return static_cast<long long>(std::llround(sys.weighted_image_sweep(w)));
    }
    return sys.de_sweep_geometric(n);
}

ComplexityProfile complexity_profile(const System& sys, int n_max,
                                     const PotentialSpec* weighted) {
    ComplexityProfile p;
    p.n_max = n_max;
    p.db_rate_fekete = p.de_rate_fekete = p.dbw_rate_fekete =
        std::numeric_limits<double>::infinity();
    for (int n = 1; n <= n_max; ++n) {
        const long long db = complexity_beginning(sys, n);
        const long long de = complexity_end(sys, n);
        p.db_n.push_back(db);
        p.de_n.push_back(de);
        p.db_rate.push_back(std::log(static_cast<double>(db)) / n);
        p.de_rate.push_back(std::log(static_cast<double>(de)) / n);
        p.db_rate_fekete = std::min(p.db_rate_fekete, p.db_rate.back());
        p.de_rate_fekete = std::min(p.de_rate_fekete, p.de_rate.back());
        if (weighted) {
            const double w = complexity_beginning_weighted(sys, *weighted, n);
            p.db_weighted_n.push_back(w);
            p.dbw_rate.push_back(std::log(w) / n);
            p.dbw_rate_fekete = std::min(p.dbw_rate_fekete, p.dbw_rate.back());
        }
    }
    p.db_rate_last = p.db_rate.back();
    p.de_rate_last = p.de_rate.back();
    if (weighted) p.dbw_rate_last = p.dbw_rate.back();
    p.db_stabilized = true;
    for (long long v : p.db_n)
        if (v != p.db_n.back()) p.db_stabilized = false;
    return p;
}

}  // namespace pwe
