#include "pwe/symbolic.hpp"

#include <algorithm>
#include <cmath>
#include <map>

#include "pwe/perron.hpp"

namespace pwe {

namespace {

// stationary Parry-type measure of an edge-weighted graph from Perron data
struct ParryData {
    double log_rho = 0;
    std::vector<double> pi;                      // vertex stationary weights
    std::vector<std::vector<double>> edge_prob;  // aligned with out_edges
};

ParryData parry_measure(const SymbolicModel& model, const std::vector<double>& edge_logw) {
    const int n = static_cast<int>(model.vertices.size());
    SparseMatrix m;
    m.n = n;
    m.rows.resize(n);
    for (int v = 0; v < n; ++v)
        for (int eid : model.out_edges[v])
            m.rows[v].emplace_back(model.edges[eid].to, std::exp(edge_logw[eid]));
    const auto right = dominant_nonnegative(m, 1e-14, 200000);
    const auto left = dominant_nonnegative_transpose(m, 1e-14, 200000);
    ParryData pd;
    if (right.eigenvalue <= 0) throw NoMeasuresError("weighted graph has zero Perron root");
    pd.log_rho = std::log(right.eigenvalue);
    const double rho = right.eigenvalue;
    pd.pi.resize(n);
    double z = 0;
    for (int v = 0; v < n; ++v) {
        pd.pi[v] = left.vec[v] * right.vec[v];
        z += pd.pi[v];
    }
    for (double& x : pd.pi) x /= z;
    pd.edge_prob.resize(n);
    for (int v = 0; v < n; ++v) {
        pd.edge_prob[v].resize(model.out_edges[v].size());
        double row = 0;
        for (size_t k = 0; k < model.out_edges[v].size(); ++k) {
            const auto& e = model.edges[model.out_edges[v][k]];
            const double p =
                std::exp(edge_logw[model.out_edges[v][k]]) * right.vec[e.to] /
                (rho * std::max(right.vec[v], 1e-300));
            pd.edge_prob[v][k] = p;
            row += p;
        }
        // normalize away roundoff so each row is a probability vector
        if (row > 0)
            for (double& p : pd.edge_prob[v]) p /= row;
    }
    return pd;
}

}  // namespace

int SymbolicModel::vertex_index(const std::vector<int>& word) const {
    auto it = std::lower_bound(vertices.begin(), vertices.end(), word);
    if (it == vertices.end() || *it != word) return -1;
    return static_cast<int>(it - vertices.begin());
}

SymbolicModel build_symbolic(const System& sys, const Weight& G, int k) {
    SymbolicModel model;
    model.alphabet = sys.piece_count();
    model.order = k;
    model.markov_exact = sys.markov().markov;
    if (model.markov_exact && k == 1) {
        // exact SFT presentation straight from the transition structure
        const auto& mk = sys.markov();
        const auto logs = sys.piece_logs(G);
        for (int i = 0; i < sys.piece_count(); ++i) model.vertices.push_back({i});
        model.out_edges.resize(model.vertices.size());
        for (int i = 0; i < sys.piece_count(); ++i) {
            for (int j : mk.successors[i]) {
                SymbolicModel::Edge e;
                e.from = i;
                e.to = j;
                e.word = {i, j};
                e.log_g_inf = logs[i].log_g_inf;
                e.log_g_sup = logs[i].log_g_sup;
                e.log_det_step = logs[i].log_det;
                e.log_a_step = logs[i].log_abs_a;
                model.out_edges[i].push_back(static_cast<int>(model.edges.size()));
                model.edges.push_back(std::move(e));
            }
        }
        return model;
    }
    // generic route through the (k+1)-cylinders
    const CylTable& tk = sys.table(G, k);
    const CylTable& tk1 = sys.table(G, k + 1);
    for (const auto& r : tk.records) model.vertices.push_back(r.word);
    model.out_edges.resize(model.vertices.size());
    const auto piece_logs = sys.piece_logs(G);
    for (const auto& r : tk1.records) {
        SymbolicModel::Edge e;
        e.word = r.word;
        std::vector<int> prefix(r.word.begin(), r.word.end() - 1);
        std::vector<int> suffix(r.word.begin() + 1, r.word.end());
        e.from = model.vertex_index(prefix);
        e.to = model.vertex_index(suffix);
        if (e.from < 0 || e.to < 0)
            throw Error("inconsistent cylinder tables while building the word graph");
        // one-step data at the first symbol, evaluated on the edge cylinder
        const int s0 = r.word.front();
        e.log_det_step = piece_logs[s0].log_det;
        e.log_a_step = piece_logs[s0].log_abs_a;
        if (piece_logs[s0].log_g_inf == piece_logs[s0].log_g_sup) {
            e.log_g_inf = piece_logs[s0].log_g_inf;
            e.log_g_sup = piece_logs[s0].log_g_sup;
        } else {
            // weight varies within the piece: use the edge cylinder enclosure
            // of the one-step weight = (log of the n-step product) minus the
            // (n-1)-step product is not available record-wise; fall back to
            // the piece-level enclosure (labeled approximate by callers).
            e.log_g_inf = piece_logs[s0].log_g_inf;
            e.log_g_sup = piece_logs[s0].log_g_sup;
        }
        model.out_edges[e.from].push_back(static_cast<int>(model.edges.size()));
        model.edges.push_back(std::move(e));
    }
    return model;
}

double symbolic_potential(const System& sys, const PotentialSpec& pot,
                          const std::vector<int>& word) {
    const int m = static_cast<int>(word.size());
    const CylTable& t = sys.table(pot.weight, m);
    for (const auto& r : t.records)
        if (r.word == word) return pot.log_inf(r);
    throw EmptyCylinderError("word indexes an empty cylinder");
}

MeasureCandidate optimize_markov(const System& sys, const SymbolicModel& model, double t,
                                 bool require_exact) {
    if (require_exact && !model.markov_exact)
        throw NotMarkovError(
            "optimize_markov requires an exact SFT presentation (Markov map)");
    if (model.edges.empty()) throw NoMeasuresError("word graph has no edges");
    const int d = sys.dimension();
    // maximize h + int(log G) - t*chi; chi = min over coordinates of the
    // per-coordinate exponent, so optimize per coordinate and take the best.
    ParryData best;
    int best_c = 0;
    double best_obj = kNegInf;
    for (int c = 0; c < d; ++c) {
        std::vector<double> w(model.edges.size());
        for (size_t e = 0; e < model.edges.size(); ++e)
            w[e] = model.edges[e].log_g_inf - t * model.edges[e].log_a_step[c];
        ParryData pd = parry_measure(model, w);
        if (pd.log_rho > best_obj) {
            best_obj = pd.log_rho;
            best = std::move(pd);
            best_c = c;
        }
    }
    (void)best_c;
    MeasureCandidate cand;
    cand.kind = MeasureCandidate::Kind::MarkovChain;
    cand.label = "markov(k=" + std::to_string(model.order) + ")";
    cand.order = model.order;
    cand.lyap_coord.assign(d, 0.0);
    double h = 0, gint = 0, detint = 0;
    for (size_t v = 0; v < model.vertices.size(); ++v) {
        for (size_t k = 0; k < model.out_edges[v].size(); ++k) {
            const double p = best.edge_prob[v][k];
            if (p <= 0) continue;
            const double mass = best.pi[v] * p;
            const auto& e = model.edges[model.out_edges[v][k]];
            h -= mass * std::log(p);
            gint += mass * e.log_g_inf;
            detint += mass * e.log_det_step;
            for (int c = 0; c < d; ++c) cand.lyap_coord[c] += mass * e.log_a_step[c];
        }
    }
    cand.entropy = h;
    cand.log_g_integral = gint;
    cand.log_det_integral = detint;
    cand.lyap_smallest = *std::min_element(cand.lyap_coord.begin(), cand.lyap_coord.end());
    return cand;
}

std::vector<MeasureCandidate> enumerate_periodic(const System& sys, const Weight& G,
                                                 int L_max) {
    std::vector<MeasureCandidate> out;
    if (!sys.all_affine()) return out;
    const int pieces = sys.piece_count();
    const auto logs = sys.piece_logs(G);
    const int d = sys.dimension();
    std::vector<int> word;
    // enumerate necklaces: lexicographically minimal primitive words
    std::function<void(int, int)> rec = [&](int pos, int L) {
        if (pos == L) {
            // primitive: no strict period divides L
            for (int per = 1; per < L; ++per) {
                if (L % per != 0) continue;
                bool periodic = true;
                for (int i = per; i < L && periodic; ++i)
                    if (word[i] != word[i - per]) periodic = false;
                if (periodic) return;
            }
            // minimal rotation representative
            for (int r = 1; r < L; ++r) {
                std::vector<int> rot(word.begin() + r, word.end());
                rot.insert(rot.end(), word.begin(), word.begin() + r);
                if (rot < word) return;
            }
            auto x = sys.periodic_point(word);
            if (!x) return;
            MeasureCandidate c;
            c.kind = MeasureCandidate::Kind::PeriodicOrbit;
            c.order = L;
            c.word = word;
            std::string lbl = "orbit(";
            for (int s : word) lbl += std::to_string(s);
            c.label = lbl + ")";
            c.entropy = 0.0;
            const double gprod = sys.birkhoff(G, word, *x);
            c.log_g_integral = gprod == 0 ? kNegInf : std::log(gprod) / L;
            c.lyap_coord.assign(d, 0.0);
            double det = 0;
            for (int s : word) {
                det += logs[s].log_det;
                for (int cc = 0; cc < d; ++cc) c.lyap_coord[cc] += logs[s].log_abs_a[cc];
            }
            c.log_det_integral = det / L;
            for (double& v : c.lyap_coord) v /= L;
            c.lyap_smallest =
                *std::min_element(c.lyap_coord.begin(), c.lyap_coord.end());
            out.push_back(std::move(c));
            return;
        }
        for (int s = 0; s < pieces; ++s) {
            word.push_back(s);
            rec(pos + 1, L);
            word.pop_back();
        }
    };
    for (int L = 1; L <= L_max; ++L) rec(0, L);
    return out;
}

VariationalReport variational_check(const System& sys, const Weight& G, double t,
                                    int k_max, int L_max, int n_max, double tol) {
    VariationalReport rep;
    PotentialSpec pot;
    pot.weight = G;
    pot.t = t;
    pot.G_mode = true;
    rep.full_pressure = pressure_estimate(sys, pot, TargetSet::full(), n_max);
    rep.boundary_pressure_est = pressure_estimate(sys, pot, TargetSet::boundary(), n_max);

    // candidates: order-k Markov equilibria (exact presentations only) plus
    // periodic orbits
    if (sys.markov().markov) {
        for (int k = 1; k <= k_max; ++k) {
            const SymbolicModel model = build_symbolic(sys, G, k);
            rep.candidates.push_back(optimize_markov(sys, model, t));
        }
    }
    auto orbits = enumerate_periodic(sys, G, L_max);
    rep.candidates.insert(rep.candidates.end(), orbits.begin(), orbits.end());
    if (rep.candidates.empty()) throw NoMeasuresError("no measure candidates available");

    rep.best_objective = kNegInf;
    for (const auto& c : rep.candidates) {
        const double obj = c.objective(t);
        if (obj > rep.best_objective + 1e-15) {
            rep.best_objective = obj;
            rep.best_label = c.label;
        }
    }
    std::stable_sort(rep.candidates.begin(), rep.candidates.end(),
                     [&](const MeasureCandidate& a, const MeasureCandidate& b) {
                         return a.objective(t) > b.objective(t);
                     });
    rep.full_pressure.measure_lower = rep.best_objective;

    rep.pressure_upper = rep.full_pressure.upper_value();
    rep.pressure_upper_exact = rep.full_pressure.markov_limit.has_value() &&
                               rep.full_pressure.markov_limit_exact;
    rep.gap = rep.pressure_upper - rep.best_objective;
    rep.boundary = small_boundary_check(rep.full_pressure, rep.boundary_pressure_est);

    // Ruelle inequality check: sup over candidates of h - int log|det DT|
    {
        const Weight det_inv = Weight::det_power(-1.0);
        double best = kNegInf;
        if (sys.markov().markov) {
            const SymbolicModel model = build_symbolic(sys, det_inv, 1);
            best = optimize_markov(sys, model, 0.0).objective(0.0);
        }
        for (const auto& orb : enumerate_periodic(sys, det_inv, L_max))
            best = std::max(best, orb.objective(0.0));
        rep.ruelle_max_objective = best;
    }

    rep.pass = std::abs(rep.gap) <= tol &&
               rep.boundary.verdict == SmallBoundaryVerdict::V::Holds;
    return rep;
}

}  // namespace pwe
