#include "pwe/system.hpp"

#include <sstream>

namespace pwe {

namespace {

template <class S>
std::vector<S> to_scalar_vec(const std::vector<double>& x) {
    std::vector<S> v(x.size());
    for (size_t i = 0; i < x.size(); ++i) v[i] = S(x[i]);
    return v;
}

template <class S>
Box<S> to_scalar_box(const std::vector<double>& lo, const std::vector<double>& hi) {
    Box<S> b;
    b.lo = to_scalar_vec<S>(lo);
    b.hi = to_scalar_vec<S>(hi);
    return b;
}

// Admissible word counts via the transition structure (Markov maps only):
// counts[n] = number of admissible n-words.
long long markov_word_count(const MarkovInfo& mk, int pieces, int depth) {
    std::vector<long long> u(pieces, 1);
    for (int n = 1; n < depth; ++n) {
        std::vector<long long> v(pieces, 0);
        for (int i = 0; i < pieces; ++i)
            for (int j : mk.successors[i]) v[j] += u[i];
        u = std::move(v);
    }
    long long total = 0;
    for (long long x : u) total += x;
    return total;
}

}  // namespace

std::string weight_cache_key(const Weight& w) {
    std::ostringstream os;
    os << static_cast<int>(w.kind) << "|" << rat_to_string(w.constant_value) << "|"
       << w.det_exponent << "|";
    for (const auto& v : w.piece_values) os << rat_to_string(v) << ",";
    os << "|";
    for (const auto& e : w.exp_affine) {
        for (double c : e.coef) os << c << ":";
        os << e.c << ";";
    }
    return os.str();
}

System::System(PiecewiseMap<Rat> m, std::string name)
    : holder_(std::make_shared<Variant>(TypedSystem<Rat>{std::move(m), {}})),
      name_(std::move(name)),
      markov_(std::make_shared<std::optional<MarkovInfo>>()),
      tables_(std::make_shared<std::map<std::string, CylTable>>()) {}

System::System(PiecewiseMap<double> m, std::string name)
    : holder_(std::make_shared<Variant>(TypedSystem<double>{std::move(m), {}})),
      name_(std::move(name)),
      markov_(std::make_shared<std::optional<MarkovInfo>>()),
      tables_(std::make_shared<std::map<std::string, CylTable>>()) {}

bool System::exact() const {
    return std::holds_alternative<TypedSystem<Rat>>(*holder_);
}

int System::dimension() const {
    return std::visit([](const auto& ts) { return ts.map.dimension; }, *holder_);
}

int System::piece_count() const {
    return std::visit([](const auto& ts) { return ts.map.piece_count(); }, *holder_);
}

bool System::all_affine() const {
    return std::visit([](const auto& ts) { return ts.map.all_affine(); }, *holder_);
}

double System::lambda_log() const {
    return std::visit([](const auto& ts) { return std::log(to_double(ts.map.lambda)); },
                      *holder_);
}

double System::phase_volume() const {
    return std::visit([](const auto& ts) { return to_double(ts.map.phase.volume()); },
                      *holder_);
}

std::vector<double> System::phase_lo() const {
    return std::visit([](const auto& ts) { return ts.map.phase.lo_d(); }, *holder_);
}

std::vector<double> System::phase_hi() const {
    return std::visit([](const auto& ts) { return ts.map.phase.hi_d(); }, *holder_);
}

void System::validate() const {
    std::visit([](const auto& ts) { ts.map.validate(); }, *holder_);
}

const CylTable& System::table(const Weight& w, int depth) const {
    const std::string key = std::to_string(depth) + "#" + weight_cache_key(w);
    auto it = tables_->find(key);
    if (it != tables_->end()) return it->second;
    CylTable t = std::visit(
        [&](const auto& ts) { return build_cyl_table(ts.map, w, ts.cylinders(depth, budget_)); },
        *holder_);
    return tables_->emplace(key, std::move(t)).first->second;
}

bool System::count_within_budget(int depth) const {
    // conservative: |I|^depth fits the budget, or the enumeration is cached
    return std::visit(
        [&](const auto& ts) {
            if (ts.cylsets.count(depth)) return true;
            double bound = 1;
            for (int k = 0; k < depth; ++k) {
                bound *= ts.map.piece_count();
                if (bound > static_cast<double>(budget_)) return false;
            }
            return true;
        },
        *holder_);
}

long long System::cylinder_count(int depth) const {
    if (count_within_budget(depth)) {
        return std::visit(
            [&](const auto& ts) {
                return static_cast<long long>(ts.cylinders(depth, budget_).cyls.size());
            },
            *holder_);
    }
    const MarkovInfo& mk = markov();
    if (!mk.markov)
        throw DepthExplosionError("cylinder count at depth " + std::to_string(depth) +
                                      " exceeds budget and the map is not Markov",
                                  budget_);
    return markov_word_count(mk, piece_count(), depth);
}

std::vector<bool> System::meets_singular(int depth, int K) const {
    return std::visit(
        [&](const auto& ts) {
            const auto& set = ts.cylinders(depth, budget_);
            const auto sing = singular_set(ts.map, K);
            std::vector<bool> out(set.cyls.size());
            for (size_t i = 0; i < set.cyls.size(); ++i)
                out[i] = cylinder_meets_faces(set.cyls[i], sing.faces);
            return out;
        },
        *holder_);
}

std::vector<bool> System::meets_box(int depth, const std::vector<double>& lo,
                                    const std::vector<double>& hi) const {
    return std::visit(
        [&](const auto& ts) {
            using S = typename std::decay_t<decltype(ts.map.pieces[0].region.lo[0])>;
            const auto& set = ts.cylinders(depth, budget_);
            const Box<S> target = to_scalar_box<S>(lo, hi);
            std::vector<bool> out(set.cyls.size());
            for (size_t i = 0; i < set.cyls.size(); ++i)
                out[i] = set.cyls[i].region.touches(target);
            return out;
        },
        *holder_);
}

const MarkovInfo& System::markov() const {
    if (!markov_->has_value())
        *markov_ = std::visit([](const auto& ts) { return markov_structure(ts.map); },
                              *holder_);
    return **markov_;
}

std::vector<PieceLogs> System::piece_logs(const Weight& w) const {
    return std::visit(
        [&](const auto& ts) {
            std::vector<PieceLogs> out;
            out.reserve(ts.map.pieces.size());
            for (const auto& p : ts.map.pieces) {
                PieceLogs pl;
                pl.affine = p.affine();
                double s, i;
                std::optional<Rat> e;
                detail::weight_step_logs(w, p, p.region, s, i, e);
                pl.log_g_sup = s;
                pl.log_g_inf = i;
                pl.g_exact = e;
                if (p.affine()) {
                    pl.log_det_lo = pl.log_det_hi = pl.log_det =
                        std::log(to_double(p.aff().abs_det()));
                    for (const auto& ac : p.aff().a)
                        pl.log_abs_a.push_back(std::log(std::abs(to_double(ac))));
                } else {
                    auto [dlo, dhi] = p.quad().deriv_range(to_double(p.region.lo[0]),
                                                           to_double(p.region.hi[0]));
                    pl.log_det_lo = std::log(std::min(std::abs(dlo), std::abs(dhi)));
                    pl.log_det_hi = std::log(std::max(std::abs(dlo), std::abs(dhi)));
                    pl.log_det = 0.5 * (pl.log_det_lo + pl.log_det_hi);
                    pl.log_abs_a.push_back(pl.log_det);  // 1D: derivative = determinant
                }
                out.push_back(std::move(pl));
            }
            return out;
        },
        *holder_);
}

std::vector<std::pair<std::vector<double>, std::vector<double>>> System::piece_images()
    const {
    return std::visit(
        [](const auto& ts) {
            std::vector<std::pair<std::vector<double>, std::vector<double>>> out;
            for (const auto& p : ts.map.pieces) {
                auto img = piece_image(p);
                out.emplace_back(img.lo_d(), img.hi_d());
            }
            return out;
        },
        *holder_);
}

double System::db_sweep(int depth, const std::vector<double>* weights) const {
    return std::visit(
        [&](const auto& ts) {
            using S = typename std::decay_t<decltype(ts.map.pieces[0].region.lo[0])>;
            const auto& set = ts.cylinders(depth, budget_);
            std::vector<Box<S>> boxes;
            boxes.reserve(set.cyls.size());
            for (const auto& c : set.cyls) boxes.push_back(c.region);
            return box_cover_multiplicity<S>(boxes, weights);
        },
        *holder_);
}

long long System::de_sweep_geometric(int depth) const {
    return std::visit(
        [&](const auto& ts) {
            using S = typename std::decay_t<decltype(ts.map.pieces[0].region.lo[0])>;
            const auto& set = ts.cylinders(depth, budget_);
            std::vector<Box<S>> boxes;
            boxes.reserve(set.cyls.size());
            for (const auto& c : set.cyls) boxes.push_back(c.last_image);
            return box_cover_count<S>(boxes);
        },
        *holder_);
}

double System::weighted_image_sweep(const std::vector<double>& piece_weights) const {
    return std::visit(
        [&](const auto& ts) {
            using S = typename std::decay_t<decltype(ts.map.pieces[0].region.lo[0])>;
            std::vector<Box<S>> boxes;
            for (const auto& p : ts.map.pieces) boxes.push_back(piece_image(p));
            return box_cover_multiplicity<S>(boxes, &piece_weights);
        },
        *holder_);
}

std::optional<std::vector<System>> System::product_factors() const {
    if (dimension() < 2 || !all_affine()) return std::nullopt;
    return std::visit(
        [&](const auto& ts) -> std::optional<std::vector<System>> {
            using S = typename std::decay_t<decltype(ts.map.pieces[0].region.lo[0])>;
            const auto& map = ts.map;
            const int d = map.dimension;
            // collect per-axis cells (lo, hi, a, b); each must be consistent
            std::vector<std::vector<std::tuple<S, S, S, S>>> cells(d);
            for (const auto& p : map.pieces) {
                for (int a = 0; a < d; ++a) {
                    std::tuple<S, S, S, S> cell{p.region.lo[a], p.region.hi[a],
                                                p.aff().a[a], p.aff().b[a]};
                    auto& bucket = cells[a];
                    bool found = false;
                    for (auto& c : bucket) {
                        if (std::get<0>(c) == std::get<0>(cell) &&
                            std::get<1>(c) == std::get<1>(cell)) {
                            if (std::get<2>(c) != std::get<2>(cell) ||
                                std::get<3>(c) != std::get<3>(cell))
                                return std::nullopt;  // branch not axis-separable
                            found = true;
                            break;
                        }
                    }
                    if (!found) bucket.push_back(cell);
                }
            }
            size_t combos = 1;
            for (int a = 0; a < d; ++a) combos *= cells[a].size();
            if (combos != map.pieces.size()) return std::nullopt;
            std::vector<System> factors;
            for (int a = 0; a < d; ++a) {
                PiecewiseMap<S> f;
                f.dimension = 1;
                f.phase = Box<S>({map.phase.lo[a]}, {map.phase.hi[a]});
                f.lambda = map.lambda;  // conservative; factor may expand more
                std::sort(cells[a].begin(), cells[a].end(),
                          [](const auto& x, const auto& y) {
                              return std::get<0>(x) < std::get<0>(y);
                          });
                int idx = 0;
                for (const auto& c : cells[a]) {
                    Piece<S> piece;
                    piece.index = idx++;
                    piece.region = Box<S>({std::get<0>(c)}, {std::get<1>(c)});
                    AffineBranch<S> br;
                    br.a = {std::get<2>(c)};
                    br.b = {std::get<3>(c)};
                    piece.branch = br;
                    piece.extension_margin = S(0);
                    f.pieces.push_back(std::move(piece));
                }
                factors.emplace_back(std::move(f), name_ + ".axis" + std::to_string(a));
            }
            return factors;
        },
        *holder_);
}

System System::blocked(int m) const {
    return std::visit(
        [&](const auto& ts) {
            return System(make_blocked_map(ts.map, m, budget_),
                          name_ + "^" + std::to_string(m));
        },
        *holder_);
}

std::optional<std::vector<double>> System::periodic_point(
    const std::vector<int>& word) const {
    if (!all_affine()) return std::nullopt;
    return std::visit(
        [&](const auto& ts) -> std::optional<std::vector<double>> {
            using S = typename std::decay_t<decltype(ts.map.pieces[0].region.lo[0])>;
            const auto& map = ts.map;
            AffineBranch<S> comp;
            comp.a.assign(map.dimension, S(1));
            comp.b.assign(map.dimension, S(0));
            for (int idx : word) comp = map.pieces[idx].aff().compose_after(comp);
            std::vector<S> x(map.dimension);
            for (int c = 0; c < map.dimension; ++c) {
                if (comp.a[c] == S(1)) return std::nullopt;
                x[c] = comp.b[c] / (S(1) - comp.a[c]);
            }
            std::vector<S> cur = x;
            for (int idx : word) {
                if (!map.pieces[idx].region.contains_closed(cur)) return std::nullopt;
                cur = map.pieces[idx].aff().apply(cur);
            }
            std::vector<double> out(map.dimension);
            for (int c = 0; c < map.dimension; ++c) out[c] = to_double(x[c]);
            return out;
        },
        *holder_);
}

System::EvalOut System::evaluate(const std::vector<double>& x) const {
    return std::visit(
        [&](const auto& ts) {
            using S = typename std::decay_t<decltype(ts.map.pieces[0].region.lo[0])>;
            auto r = evaluate_map(ts.map, to_scalar_vec<S>(x));
            EvalOut out;
            out.boundary = r.boundary;
            out.piece = r.piece;
            for (const auto& v : r.image) out.image.push_back(to_double(v));
            out.jacobian = r.jacobian_diag;
            return out;
        },
        *holder_);
}

double System::birkhoff(const Weight& w, const std::vector<int>& word,
                        const std::vector<double>& x) const {
    return std::visit(
        [&](const auto& ts) {
            using S = typename std::decay_t<decltype(ts.map.pieces[0].region.lo[0])>;
            return birkhoff_weight(ts.map, w, word, to_scalar_vec<S>(x));
        },
        *holder_);
}

ExpansionInfo System::word_expansion(const std::vector<int>& word) const {
    return std::visit(
        [&](const auto& ts) {
            using S = typename std::decay_t<decltype(ts.map.pieces[0].region.lo[0])>;
            const auto& map = ts.map;
            Cyl<S> c;
            c.region = map.phase;
            c.last_image = map.phase;
            if (map.all_affine()) {
                AffineBranch<S> id;
                id.a.assign(map.dimension, S(1));
                id.b.assign(map.dimension, S(0));
                c.composed = id;
            }
            for (int idx : word) {
                const Piece<S>& p = map.pieces.at(idx);
                Box<S> j = c.last_image.intersect(p.region);
                if (!j.nonempty())
                    throw EmptyCylinderError("word indexes an empty cylinder");
                if (c.composed && p.affine()) {
                    c.region = c.composed->preimage(j).intersect(c.region);
                    c.composed = p.aff().compose_after(*c.composed);
                    c.last_image = p.aff().image(j);
                } else {
                    auto steps = detail::step_images(map, c.word, c.region);
                    Box<S> t = j;
                    for (int k = static_cast<int>(c.word.size()) - 1; k >= 0; --k)
                        t = detail::branch_preimage(map.pieces[c.word[k]], t, steps[k]);
                    c.region = t;
                    c.composed.reset();
                    c.last_image = detail::branch_image_box(p, j);
                }
                c.word.push_back(idx);
                if (!c.region.nonempty())
                    throw EmptyCylinderError("word indexes an empty cylinder");
            }
            return smallest_expansion(map, c);
        },
        *holder_);
}

double System::nu_star(int depth) const {
    const Weight one = Weight::one();
    const CylTable& t = table(one, depth);
    double best = kNegInf;
    for (const auto& r : t.records) best = std::max(best, r.log_nu_hi);
    return std::exp(best / depth);
}

}  // namespace pwe
