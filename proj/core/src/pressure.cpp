#include "pwe/pressure.hpp"

#include <cmath>
#include <sstream>

#include "pwe/perron.hpp"

namespace pwe {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// Deterministic log-sum-exp over values (index order), skipping -inf.
double log_sum_exp(const std::vector<double>& logs) {
    double m = kNegInf;
    for (double l : logs) m = std::max(m, l);
    if (m == kNegInf) return kNegInf;
    double s = 0;
    for (double l : logs)
        if (l != kNegInf) s += std::exp(l - m);
    return m + std::log(s);
}

std::vector<char> select_records(const System& sys, const CylTable& t,
                                 const TargetSet& target, int n) {
    std::vector<char> sel(t.records.size(), 1);
    switch (target.kind) {
        case TargetSet::Kind::Full:
            break;
        case TargetSet::Kind::Boundary:
            for (size_t i = 0; i < t.records.size(); ++i)
                sel[i] = t.records[i].touches_boundary;
            break;
        case TargetSet::Kind::Singular: {
            const auto flags = sys.meets_singular(n, target.K);
            for (size_t i = 0; i < flags.size(); ++i) sel[i] = flags[i];
            break;
        }
        case TargetSet::Kind::CustomBox: {
            const auto flags = sys.meets_box(n, target.lo, target.hi);
            for (size_t i = 0; i < flags.size(); ++i) sel[i] = flags[i];
            break;
        }
    }
    return sel;
}

// Per-piece log weights for the matrix route, one vector per coordinate.
struct SymbolWeights {
    bool applicable = false;
    bool exact = false;
    std::vector<std::vector<double>> wlog;  // [coord][piece]
};

SymbolWeights symbol_weights(const System& sys, const PotentialSpec& pot) {
    SymbolWeights sw;
    if (!sys.markov().markov || !sys.all_affine()) return sw;
    const auto logs = sys.piece_logs(pot.weight);
    for (const auto& pl : logs)
        if (pl.log_g_inf != pl.log_g_sup) return sw;  // weight not locally constant
    const int d = sys.dimension();
    const int pieces = sys.piece_count();
    sw.applicable = true;
    if (pot.t == 0 || d == 1) {
        sw.exact = true;
        std::vector<double> w(pieces);
        for (int s = 0; s < pieces; ++s) {
            const double nu_term = d == 1 ? -pot.t * logs[s].log_abs_a[0] : 0.0;
            w[s] = pot.q * (logs[s].log_g_inf + pot.det_coef() * logs[s].log_det + nu_term);
        }
        sw.wlog.push_back(std::move(w));
        return sw;
    }
    // d >= 2 with t > 0: check for a coordinate that minimizes |a_c| on every
    // piece (then nu_n factorizes per symbol exactly); otherwise bracket.
    int c0 = -1;
    for (int c = 0; c < d && c0 < 0; ++c) {
        bool dominated = true;
        for (int s = 0; s < pieces && dominated; ++s)
            for (int c2 = 0; c2 < d; ++c2)
                if (logs[s].log_abs_a[c] > logs[s].log_abs_a[c2] + 1e-15) dominated = false;
        if (dominated) c0 = c;
    }
    if (c0 >= 0) {
        sw.exact = true;
        std::vector<double> w(pieces);
        for (int s = 0; s < pieces; ++s)
            w[s] = pot.q * (logs[s].log_g_inf + pot.det_coef() * logs[s].log_det -
                            pot.t * logs[s].log_abs_a[c0]);
        sw.wlog.push_back(std::move(w));
        return sw;
    }
    sw.exact = false;
    for (int c = 0; c < d; ++c) {
        std::vector<double> w(pieces);
        for (int s = 0; s < pieces; ++s)
            w[s] = pot.q * (logs[s].log_g_inf + pot.det_coef() * logs[s].log_det -
                            pot.t * logs[s].log_abs_a[c]);
        sw.wlog.push_back(std::move(w));
    }
    return sw;
}

// Rescaled weighted word-sum iteration: a_n = log sum over admissible n-words
// of prod_k exp(wlog[word_k]).
std::vector<double> matrix_route_a_n(const MarkovInfo& mk, const std::vector<double>& wlog,
                                     int n_max) {
    const int pieces = static_cast<int>(wlog.size());
    std::vector<double> a(n_max + 1, kNegInf);
    std::vector<double> u(pieces);
    double shift = 0;
    for (int s = 0; s < pieces; ++s) u[s] = std::exp(wlog[s]);
    for (int n = 1; n <= n_max; ++n) {
        double total = 0;
        for (double x : u) total += x;
        if (total == 0) break;
        a[n] = shift + std::log(total);
        if (n == n_max) break;
        std::vector<double> v(pieces, 0.0);
        for (int i = 0; i < pieces; ++i) {
            if (u[i] == 0) continue;
            for (int j : mk.successors[i]) v[j] += u[i] * std::exp(wlog[j]);
        }
        double norm = 0;
        for (double x : v) norm += x;
        if (norm == 0) {
            u.assign(pieces, 0.0);
            continue;
        }
        for (double& x : v) x /= norm;
        shift += std::log(norm);
        // total of next step is sum(v)*norm-shifted: fold the scale so sum(u)=1
        u = std::move(v);
    }
    return a;
}

double matrix_route_limit(const MarkovInfo& mk, const std::vector<double>& wlog) {
    const int pieces = static_cast<int>(wlog.size());
    SparseMatrix m;
    m.n = pieces;
    m.rows.resize(pieces);
    for (int i = 0; i < pieces; ++i)
        for (int j : mk.successors[i]) m.rows[i].emplace_back(j, std::exp(wlog[j]));
    const auto pr = dominant_nonnegative(m, 1e-14, 200000);
    return pr.eigenvalue == 0 ? kNegInf : std::log(pr.eigenvalue);
}

double maxplus_word_max(const MarkovInfo& mk, const std::vector<double>& phi, int n) {
    const int pieces = static_cast<int>(phi.size());
    std::vector<double> v(phi);
    for (int step = 2; step <= n; ++step) {
        std::vector<double> w(pieces, kNegInf);
        for (int i = 0; i < pieces; ++i) {
            if (v[i] == kNegInf) continue;
            for (int j : mk.successors[i]) w[j] = std::max(w[j], v[i] + phi[j]);
        }
        v = std::move(w);
    }
    double best = kNegInf;
    for (double x : v) best = std::max(best, x);
    return best;
}

}  // namespace

std::string TargetSet::describe() const {
    switch (kind) {
        case Kind::Full: return "full";
        case Kind::Boundary: return "boundary";
        case Kind::Singular: return "singular:" + std::to_string(K);
        case Kind::CustomBox: return "custom-box";
    }
    return "?";
}

const PressurePoint& PressureEstimate::at(int n) const {
    for (const auto& p : per_n)
        if (p.n == n) return p;
    throw Error("no pressure point at depth " + std::to_string(n));
}

MarkovPressure markov_pressure(const System& sys, const PotentialSpec& pot, int n_max) {
    MarkovPressure mp;
    const SymbolWeights sw = symbol_weights(sys, pot);
    if (!sw.applicable) return mp;
    mp.applicable = true;
    mp.exact = sw.exact;
    const MarkovInfo& mk = sys.markov();
    std::vector<std::vector<double>> curves;
    double best_limit = kNegInf;
    for (const auto& w : sw.wlog) {
        curves.push_back(matrix_route_a_n(mk, w, n_max));
        best_limit = std::max(best_limit, matrix_route_limit(mk, w));
    }
    mp.limit = best_limit;
    mp.a_n.assign(n_max + 1, kNegInf);
    mp.a_n_upper.assign(n_max + 1, kNegInf);
    for (int n = 1; n <= n_max; ++n) {
        double lo = kNegInf;
        std::vector<double> vals;
        for (const auto& c : curves) {
            lo = std::max(lo, c[n]);
            vals.push_back(c[n]);
        }
        mp.a_n[n] = lo;
        mp.a_n_upper[n] = sw.exact ? lo : log_sum_exp(vals);
    }
    return mp;
}

PressureEstimate pressure_estimate(const System& sys, const PotentialSpec& pot,
                                   const TargetSet& target, int n_max) {
    pot.validate();
    PressureEstimate est;
    est.target = target;
    MarkovPressure mp;
    if (target.kind == TargetSet::Kind::Full) mp = markov_pressure(sys, pot, n_max);
    for (int n = 1; n <= n_max; ++n) {
        PressurePoint point;
        point.n = n;
        if (sys.count_within_budget(n)) {
            const CylTable& t = sys.table(pot.weight, n);
            const auto sel = select_records(sys, t, target, n);
            bool all_exact = true;
            Rat sum(0);
            for (size_t i = 0; i < t.records.size() && all_exact; ++i) {
                if (!sel[i]) continue;
                auto e = pot.exact_sup(t.records[i]);
                if (!e)
                    all_exact = false;
                else
                    sum += *e;
            }
            if (all_exact) {
                point.exact = true;
                point.exact_sum = sum;
                point.a_n = (sum == 0) ? kNegInf : log_rat(sum);
            } else {
                std::vector<double> logs;
                for (size_t i = 0; i < t.records.size(); ++i)
                    if (sel[i]) logs.push_back(pot.log_sup(t.records[i]));
                point.a_n = log_sum_exp(logs);
            }
        } else if (mp.applicable && target.kind == TargetSet::Kind::Full) {
            point.a_n = mp.a_n[n];
            point.via_matrix = true;
        } else {
            throw DepthExplosionError(
                "pressure at depth " + std::to_string(n) +
                    " needs enumeration beyond the budget (" + target.describe() + ")",
                sys.budget());
        }
        point.minus_inf = point.a_n == kNegInf;
        point.rate = point.minus_inf ? kNegInf : point.a_n / n;
        est.per_n.push_back(std::move(point));
    }
    est.fekete_upper = kInf;
    for (const auto& p : est.per_n) est.fekete_upper = std::min(est.fekete_upper, p.rate);
    if (target.kind == TargetSet::Kind::Full && mp.applicable) {
        est.markov_limit = mp.limit;
        est.markov_limit_exact = mp.exact;
    }
    return est;
}

PressureEstimate boundary_pressure(const System& sys, const PotentialSpec& pot, int K,
                                   int n_max) {
    const TargetSet target = K == 0 ? TargetSet::boundary() : TargetSet::singular(K);
    return pressure_estimate(sys, pot, target, n_max);
}

SmallBoundaryVerdict small_boundary_check(const PressureEstimate& full,
                                          const PressureEstimate& boundary, double tol) {
    SmallBoundaryVerdict v;
    v.boundary_upper = boundary.upper_value();
    v.full_lower = full.lower_value();
    std::ostringstream os;
    if (v.full_lower && v.boundary_upper < *v.full_lower - tol) {
        v.verdict = SmallBoundaryVerdict::V::Holds;
        v.margin = *v.full_lower - v.boundary_upper;
        os << "boundary upper " << v.boundary_upper << " < full lower " << *v.full_lower;
    } else if (boundary.measure_lower &&
               *boundary.measure_lower > full.fekete_upper + tol) {
        v.verdict = SmallBoundaryVerdict::V::Fails;
        v.margin = *boundary.measure_lower - full.fekete_upper;
        os << "boundary lower exceeds full upper";
    } else {
        v.verdict = SmallBoundaryVerdict::V::Inconclusive;
        v.margin = v.full_lower ? *v.full_lower - v.boundary_upper : 0.0;
        os << "no strict separation certificate at this depth";
    }
    v.detail = os.str();
    return v;
}

SandwichResult trivial_sandwich(const System& sys, const PotentialSpec& pot,
                                const TargetSet& target, int n_max) {
    const int n = n_max;
    const CylTable& t = sys.table(pot.weight, n);
    const auto sel = select_records(sys, t, target, n);
    long long count = 0;
    double min_inf = kInf, max_sup = kNegInf;
    for (size_t i = 0; i < t.records.size(); ++i) {
        if (!sel[i]) continue;
        ++count;
        // log f (without the q power)
        min_inf = std::min(min_inf, pot.log_inf(t.records[i]) / pot.q);
        max_sup = std::max(max_sup, pot.log_sup(t.records[i]) / pot.q);
    }
    SandwichResult r;
    if (count == 0) {
        r.lower = r.middle = r.upper = 0;
        return r;
    }
    const double ent = std::log(static_cast<double>(count)) / (n * pot.q);
    r.lower = std::exp(ent + min_inf / n);
    r.upper = std::exp(ent + max_sup / n);
    const auto est = pressure_estimate(sys, pot, target, n_max);
    r.middle = std::exp(est.at(n).a_n / (n * pot.q));
    return r;
}

double lambda_top_exterior(const System& sys, int n_max) {
    if (sys.dimension() == 1) return 1.0;
    if (!sys.all_affine())
        throw UnsupportedGeometryError("Lambda_{d-1} requires affine branches in d >= 2");
    const MarkovInfo& mk = sys.markov();
    if (mk.markov) {
        const auto logs = sys.piece_logs(Weight::one());
        double best = kNegInf;
        for (int c = 0; c < sys.dimension(); ++c) {
            std::vector<double> phi(sys.piece_count());
            for (int s = 0; s < sys.piece_count(); ++s)
                phi[s] = logs[s].log_det - logs[s].log_abs_a[c];
            best = std::max(best, maxplus_word_max(mk, phi, n_max));
        }
        return std::exp(best / n_max);
    }
    const CylTable& t = sys.table(Weight::one(), n_max);
    double best = kNegInf;
    for (const auto& r : t.records)
        best = std::max(best, r.log_det_hi + r.log_nu_hi);
    return std::exp(best / n_max);
}

double max_word_sum(const System& sys, const std::vector<double>& per_piece, int n) {
    const MarkovInfo& mk = sys.markov();
    if (!mk.markov) throw NotMarkovError("max_word_sum requires a Markov map");
    return maxplus_word_max(mk, per_piece, n);
}

}  // namespace pwe
