#pragma once

#include <algorithm>
#include <limits>
#include <map>
#include <numeric>
#include <optional>
#include <utility>

#include "pwe/map.hpp"

namespace pwe {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

inline Rat pow_like(const Rat& x, int m) { return pow_rat(x, m); }
inline double pow_like(double x, int m) { return std::pow(x, m); }

// ---------------------------------------------------------------------------
// Cylinders
// ---------------------------------------------------------------------------

template <class S>
struct Cyl {
    std::vector<int> word;
    Box<S> region;      // O_word in base space
    Box<S> last_image;  // T^n(O_word) enclosure (exact for affine chains)
    std::optional<AffineBranch<S>> composed;  // linearization, affine chains only
};

template <class S>
struct CylinderSet {
    int depth = 0;
    std::vector<Cyl<S>> cyls;  // lexicographic word order
};

namespace detail {

// Forward step images of a region through the branches of `word`.
// steps[k] = enclosure of T^k(region), k = 0..n.
template <class S>
std::vector<Box<S>> step_images(const PiecewiseMap<S>& map, const std::vector<int>& word,
                                const Box<S>& region) {
    std::vector<Box<S>> steps;
    steps.reserve(word.size() + 1);
    steps.push_back(region);
    Box<S> cur = region;
    for (int idx : word) {
        const Piece<S>& p = map.pieces[idx];
        cur = cur.intersect(p.extended_region());
        if (p.affine()) {
            cur = p.aff().image(cur);
        } else {
            const auto& q = p.quad();
            const double u = q.apply(to_double(cur.lo[0]));
            const double v = q.apply(to_double(cur.hi[0]));
            cur = Box<S>({S(std::min(u, v))}, {S(std::max(u, v))});
        }
        steps.push_back(cur);
    }
    return steps;
}

template <class S>
Box<S> branch_preimage(const Piece<S>& p, const Box<S>& target, const Box<S>& host) {
    if (p.affine()) return p.aff().preimage(target).intersect(host);
    const auto& q = p.quad();
    const double lo = to_double(host.lo[0]), hi = to_double(host.hi[0]);
    const double u = q.invert(to_double(target.lo[0]), lo, hi);
    const double v = q.invert(to_double(target.hi[0]), lo, hi);
    return Box<S>({S(std::min(u, v))}, {S(std::max(u, v))}).intersect(host);
}

template <class S>
Box<S> branch_image_box(const Piece<S>& p, const Box<S>& box) {
    if (p.affine()) return p.aff().image(box);
    const auto& q = p.quad();
    const double u = q.apply(to_double(box.lo[0]));
    const double v = q.apply(to_double(box.hi[0]));
    return Box<S>({S(std::min(u, v))}, {S(std::max(u, v))});
}

}  // namespace detail

// Breadth-first refinement. Deterministic lexicographic output; throws
// DepthExplosion when the candidate count would exceed `budget`.
template <class S>
CylinderSet<S> enumerate_cylinders(const PiecewiseMap<S>& map, int depth, long long budget) {
    if (depth < 1) throw Error("cylinder depth must be >= 1");
    CylinderSet<S> level;
    level.depth = 0;
    Cyl<S> root;
    root.region = map.phase;
    root.last_image = map.phase;
    if (map.all_affine()) {
        AffineBranch<S> id;
        id.a.assign(map.dimension, S(1));
        id.b.assign(map.dimension, S(0));
        root.composed = id;
    }
    level.cyls.push_back(std::move(root));

    for (int n = 0; n < depth; ++n) {
        const long long bound =
            static_cast<long long>(level.cyls.size()) * map.piece_count();
        if (bound > budget)
            throw DepthExplosionError(
                "cylinder count bound " + std::to_string(bound) + " exceeds budget " +
                    std::to_string(budget) + " at depth " + std::to_string(n + 1),
                bound);
        CylinderSet<S> next;
        next.depth = n + 1;
        next.cyls.reserve(level.cyls.size());
        for (const Cyl<S>& c : level.cyls) {
            for (const Piece<S>& p : map.pieces) {
                Box<S> j = c.last_image.intersect(p.region);
                if (!j.nonempty()) continue;
                Cyl<S> e;
                e.word = c.word;
                e.word.push_back(p.index);
                if (c.composed && p.affine()) {
                    e.region = c.composed->preimage(j).intersect(c.region);
                    e.composed = p.aff().compose_after(*c.composed);
                    e.last_image = p.aff().image(j);
                } else if (c.composed) {
                    e.region = c.composed->preimage(j).intersect(c.region);
                    e.last_image = detail::branch_image_box(p, j);
                } else {
                    auto steps = detail::step_images(map, c.word, c.region);
                    Box<S> t = j;
                    for (int k = static_cast<int>(c.word.size()) - 1; k >= 0; --k)
                        t = detail::branch_preimage(map.pieces[c.word[k]], t, steps[k]);
                    e.region = t;
                    e.last_image = detail::branch_image_box(p, j);
                }
                if (!e.region.nonempty()) continue;
                next.cyls.push_back(std::move(e));
            }
        }
        level = std::move(next);
    }
    return level;
}

// ---------------------------------------------------------------------------
// Partition boundary and its pullbacks
// ---------------------------------------------------------------------------

template <class S>
struct BoundarySet {
    std::vector<Face<S>> faces;
    int pullback_depth = 0;  // K: faces of S_O^{(K)} = union_{k<=K} T^{-k}(dO)
};

template <class S>
std::vector<Face<S>> partition_boundary(const PiecewiseMap<S>& map) {
    std::vector<Face<S>> faces;
    for (const auto& p : map.pieces) {
        for (int a = 0; a < map.dimension; ++a) {
            Box<S> ext;
            for (int o = 0; o < map.dimension; ++o) {
                if (o == a) continue;
                ext.lo.push_back(p.region.lo[o]);
                ext.hi.push_back(p.region.hi[o]);
            }
            faces.push_back(Face<S>{a, p.region.lo[a], ext});
            faces.push_back(Face<S>{a, p.region.hi[a], ext});
        }
    }
    return faces;
}

// One pullback step: preimages of each face under every branch, clipped to the
// piece regions.
template <class S>
std::vector<Face<S>> pullback_faces(const PiecewiseMap<S>& map,
                                    const std::vector<Face<S>>& faces) {
    const S t = GeomTraits<S>::tol();
    std::vector<Face<S>> out;
    for (const auto& p : map.pieces) {
        for (const Face<S>& f : faces) {
            S coord;
            if (p.affine()) {
                coord = (f.coord - p.aff().b[f.axis]) / p.aff().a[f.axis];
            } else {
                const auto& q = p.quad();
                const double lo = to_double(p.region.lo[0]), hi = to_double(p.region.hi[0]);
                const double ilo = q.apply(lo), ihi = q.apply(hi);
                const double c = to_double(f.coord);
                if (c < std::min(ilo, ihi) - 1e-12 || c > std::max(ilo, ihi) + 1e-12) continue;
                coord = S(q.invert(c, lo, hi));
            }
            if (coord < p.region.lo[f.axis] - t || coord > p.region.hi[f.axis] + t) continue;
            Face<S> g;
            g.axis = f.axis;
            g.coord = coord;
            int k = 0;
            bool dead = false;
            for (int o = 0; o < map.dimension; ++o) {
                if (o == f.axis) continue;
                S lo, hi;
                if (p.affine()) {
                    const S u = (f.extent.lo[k] - p.aff().b[o]) / p.aff().a[o];
                    const S v = (f.extent.hi[k] - p.aff().b[o]) / p.aff().a[o];
                    lo = std::min(u, v);
                    hi = std::max(u, v);
                } else {
                    lo = f.extent.lo[k];
                    hi = f.extent.hi[k];
                }
                lo = std::max(lo, p.region.lo[o]);
                hi = std::min(hi, p.region.hi[o]);
                if (hi < lo - t) dead = true;
                g.extent.lo.push_back(lo);
                g.extent.hi.push_back(hi);
                ++k;
            }
            if (!dead) out.push_back(std::move(g));
        }
    }
    return out;
}

template <class S>
BoundarySet<S> singular_set(const PiecewiseMap<S>& map, int K) {
    BoundarySet<S> b;
    b.pullback_depth = K;
    b.faces = partition_boundary(map);
    std::vector<Face<S>> layer = b.faces;
    for (int k = 1; k <= K; ++k) {
        layer = pullback_faces(map, layer);
        b.faces.insert(b.faces.end(), layer.begin(), layer.end());
    }
    return b;
}

template <class S>
bool cylinder_meets_faces(const Cyl<S>& c, const std::vector<Face<S>>& faces) {
    for (const auto& f : faces)
        if (f.touches_box(c.region)) return true;
    return false;
}

// ---------------------------------------------------------------------------
// Markov structure and blocked systems
// ---------------------------------------------------------------------------

struct MarkovInfo {
    bool markov = false;
    // successors[i] = pieces fully covered by T(O_i), when markov
    std::vector<std::vector<int>> successors;
};

template <class S>
Box<S> piece_image(const Piece<S>& p) {
    if (p.affine()) return p.aff().image(p.region);
    const auto& q = p.quad();
    const double u = q.apply(to_double(p.region.lo[0]));
    const double v = q.apply(to_double(p.region.hi[0]));
    return Box<S>({S(std::min(u, v))}, {S(std::max(u, v))});
}

// T is Markov for its own partition iff every branch image is a union of
// pieces (each overlapped piece fully covered).
template <class S>
MarkovInfo markov_structure(const PiecewiseMap<S>& map) {
    MarkovInfo info;
    info.markov = true;
    info.successors.resize(map.pieces.size());
    for (size_t i = 0; i < map.pieces.size() && info.markov; ++i) {
        const Box<S> img = piece_image(map.pieces[i]);
        S covered(0);
        for (const auto& p : map.pieces) {
            const Box<S> inter = img.intersect(p.region);
            if (!inter.nonempty()) continue;
            const S iv = inter.volume();
            const S pv = p.region.volume();
            S slack;
            if constexpr (GeomTraits<S>::exact)
                slack = S(0);
            else
                slack = S(1e-9) * pv;
            if (pv - iv > slack) {
                info.markov = false;  // partially covered piece
                break;
            }
            info.successors[i].push_back(p.index);
            covered += iv;
        }
        const S iv = img.volume();
        S slack;
        if constexpr (GeomTraits<S>::exact)
            slack = S(0);
        else
            slack = S(1e-9) * iv;
        if (covered < iv - slack) info.markov = false;
    }
    if (!info.markov) info.successors.clear();
    return info;
}

// Blocked system T^m whose pieces are the m-cylinders (affine chains only).
template <class S>
PiecewiseMap<S> make_blocked_map(const PiecewiseMap<S>& map, int m, long long budget) {
    if (!map.all_affine())
        throw UnsupportedGeometryError("blocked map requires affine branches");
    auto cyls = enumerate_cylinders(map, m, budget);
    PiecewiseMap<S> out;
    out.dimension = map.dimension;
    out.phase = map.phase;
    out.lambda = pow_like(map.lambda, m);
    out.pieces.reserve(cyls.cyls.size());
    int idx = 0;
    for (auto& c : cyls.cyls) {
        Piece<S> p;
        p.index = idx++;
        p.region = c.region;
        p.branch = *c.composed;
        p.extension_margin = S(0);
        out.pieces.push_back(std::move(p));
    }
    return out;
}

// ---------------------------------------------------------------------------
// Per-cylinder records (mode-neutral extraction)
// ---------------------------------------------------------------------------

struct CylRecord {
    std::vector<int> word;
    std::vector<double> lo, hi;  // region hull
    double log_volume = 0;
    std::optional<Rat> volume;
    double log_det_lo = 0, log_det_hi = 0;  // log|det DT^n| over the cylinder
    std::optional<Rat> det_exact;
    double log_nu_lo = 0, log_nu_hi = 0;  // log nu_n enclosure (tight when affine)
    double log_nu_tilde_hi = 0;           // extended-region variant
    double log_g_sup = 0, log_g_inf = 0;  // log|g^{(n)}|; -inf when g vanishes
    std::optional<Rat> g_exact;
    bool touches_boundary = false;  // closure meets the partition boundary
};

struct CylTable {
    int depth = 0;
    bool exact = false;
    bool affine = true;
    bool weight_locally_constant = true;
    std::vector<CylRecord> records;  // lexicographic
};

struct ExpansionInfo {
    double log_nu_lo = 0, log_nu_hi = 0;
    double log_nu_tilde_hi = 0;
    std::optional<Rat> nu_exact;
};

namespace detail {

// log|g| range of the one-step weight over a step box, plus exact value when
// the weight is constant there.
template <class S>
void weight_step_logs(const Weight& w, const Piece<S>& piece, const Box<S>& box,
                      double& log_sup, double& log_inf, std::optional<Rat>& exact) {
    switch (w.kind) {
        case Weight::Kind::Constant: {
            const Rat v = abs_rat(w.constant_value);
            exact = v;
            log_sup = log_inf = (v == 0 ? kNegInf : log_rat(v));
            return;
        }
        case Weight::Kind::PiecewiseConstant: {
            const Rat v = abs_rat(w.piece_values.at(piece.index));
            exact = v;
            log_sup = log_inf = (v == 0 ? kNegInf : log_rat(v));
            return;
        }
        case Weight::Kind::DetJacobianPower: {
            exact.reset();
            if (piece.affine()) {
                if constexpr (GeomTraits<S>::exact) {
                    const Rat det = piece.aff().abs_det();
                    log_sup = log_inf = w.det_exponent * log_rat(det);
                    if (w.det_exponent_integral())
                        exact = pow_rat(det, static_cast<long>(w.det_exponent));
                } else {
                    const double det = to_double(piece.aff().abs_det());
                    log_sup = log_inf = w.det_exponent * std::log(det);
                }
            } else {
                const auto& q = piece.quad();
                auto [dlo, dhi] = q.deriv_range(to_double(box.lo[0]), to_double(box.hi[0]));
                const double alo = std::min(std::abs(dlo), std::abs(dhi));
                const double ahi = std::max(std::abs(dlo), std::abs(dhi));
                const double v1 = w.det_exponent * std::log(alo);
                const double v2 = w.det_exponent * std::log(ahi);
                log_inf = std::min(v1, v2);
                log_sup = std::max(v1, v2);
            }
            return;
        }
        case Weight::Kind::ExpAffine: {
            const auto& ea = w.exp_affine.at(piece.index);
            double sup = ea.c, inf = ea.c;
            for (size_t c = 0; c < box.lo.size(); ++c) {
                const double l = to_double(box.lo[c]) * ea.coef[c];
                const double h = to_double(box.hi[c]) * ea.coef[c];
                sup += std::max(l, h);
                inf += std::min(l, h);
            }
            log_sup = sup;
            log_inf = inf;
            exact.reset();
            return;
        }
    }
}

}  // namespace detail

// Expansion data of one word: enclosure of nu_n and the extended-region
// nu~_{n,i}. Exact (sup == inf) for affine chains with margin 0.
template <class S>
ExpansionInfo smallest_expansion(const PiecewiseMap<S>& map, const Cyl<S>& c) {
    ExpansionInfo e{};
    if (c.composed) {
        if constexpr (GeomTraits<S>::exact) {
            const Rat smin = c.composed->min_abs_a();
            const double lg = -log_rat(smin);
            e.log_nu_lo = e.log_nu_hi = e.log_nu_tilde_hi = lg;
            e.nu_exact = Rat(1) / smin;
        } else {
            const double lg = -std::log(to_double(c.composed->min_abs_a()));
            e.log_nu_lo = e.log_nu_hi = e.log_nu_tilde_hi = lg;
        }
        return e;
    }
    // 1D smooth chain: nu_n(x) = 1/|(T^n)'(x)|, bounded by per-step derivative
    // ranges over the step images.
    auto steps = detail::step_images(map, c.word, c.region);
    double lo_prod = 0, hi_prod = 0, ext_lo_prod = 0;
    for (size_t k = 0; k < c.word.size(); ++k) {
        const Piece<S>& p = map.pieces[c.word[k]];
        double dlo, dhi, elo, ehi;
        const double m = to_double(p.extension_margin);
        if (p.affine()) {
            dlo = dhi = elo = ehi = to_double(p.aff().a[0]);
        } else {
            const auto& q = p.quad();
            std::tie(dlo, dhi) =
                q.deriv_range(to_double(steps[k].lo[0]), to_double(steps[k].hi[0]));
            std::tie(elo, ehi) =
                q.deriv_range(to_double(steps[k].lo[0]) - m, to_double(steps[k].hi[0]) + m);
        }
        lo_prod += std::log(std::min(std::abs(dlo), std::abs(dhi)));
        hi_prod += std::log(std::max(std::abs(dlo), std::abs(dhi)));
        ext_lo_prod += std::log(std::min(std::abs(elo), std::abs(ehi)));
    }
    e.log_nu_lo = -hi_prod;
    e.log_nu_hi = -lo_prod;
    e.log_nu_tilde_hi = -ext_lo_prod;
    return e;
}

template <class S>
CylTable build_cyl_table(const PiecewiseMap<S>& map, const Weight& weight,
                         const CylinderSet<S>& set) {
    CylTable table;
    table.depth = set.depth;
    table.exact = GeomTraits<S>::exact;
    table.affine = map.all_affine();
    const auto boundary = partition_boundary(map);
    table.records.reserve(set.cyls.size());
    for (const Cyl<S>& c : set.cyls) {
        CylRecord r;
        r.word = c.word;
        r.lo = c.region.lo_d();
        r.hi = c.region.hi_d();
        const S vol = c.region.volume();
        if constexpr (GeomTraits<S>::exact) {
            r.log_volume = log_rat(vol);
            r.volume = vol;
        } else {
            r.log_volume = std::log(to_double(vol));
        }
        if (c.composed) {
            if constexpr (GeomTraits<S>::exact) {
                const Rat det = c.composed->abs_det();
                r.log_det_lo = r.log_det_hi = log_rat(det);
                r.det_exact = det;
            } else {
                r.log_det_lo = r.log_det_hi = std::log(to_double(c.composed->abs_det()));
            }
        } else {
            auto steps = detail::step_images(map, c.word, c.region);
            double lo = 0, hi = 0;
            for (size_t k = 0; k < c.word.size(); ++k) {
                const Piece<S>& p = map.pieces[c.word[k]];
                if (p.affine()) {
                    const double d = std::log(std::abs(to_double(p.aff().a[0])));
                    lo += d;
                    hi += d;
                } else {
                    auto [dlo, dhi] = p.quad().deriv_range(to_double(steps[k].lo[0]),
                                                           to_double(steps[k].hi[0]));
                    lo += std::log(std::min(std::abs(dlo), std::abs(dhi)));
                    hi += std::log(std::max(std::abs(dlo), std::abs(dhi)));
                }
            }
            r.log_det_lo = lo;
            r.log_det_hi = hi;
        }
        const ExpansionInfo exp = smallest_expansion(map, c);
        r.log_nu_lo = exp.log_nu_lo;
        r.log_nu_hi = exp.log_nu_hi;
        r.log_nu_tilde_hi = exp.log_nu_tilde_hi;

        if (weight.kind == Weight::Kind::ExpAffine && c.composed) {
            // The Birkhoff exponent sum_k e_{w_k}(T^k x) is affine in x; fold
            // the chain into one affine functional and take the exact vertex
            // sup/inf over the region.
            std::vector<double> coef(map.dimension, 0.0);
            double cst = 0;
            AffineBranch<S> prefix;
            prefix.a.assign(map.dimension, S(1));
            prefix.b.assign(map.dimension, S(0));
            for (int k = 0; k < static_cast<int>(c.word.size()); ++k) {
                const auto& ea = weight.exp_affine.at(c.word[k]);
                for (int d = 0; d < map.dimension; ++d) {
                    coef[d] += ea.coef[d] * to_double(prefix.a[d]);
                    cst += ea.coef[d] * to_double(prefix.b[d]);
                }
                cst += ea.c;
                prefix = map.pieces[c.word[k]].aff().compose_after(prefix);
            }
            double sup = cst, inf = cst;
            for (int d = 0; d < map.dimension; ++d) {
                const double l = coef[d] * to_double(c.region.lo[d]);
                const double h = coef[d] * to_double(c.region.hi[d]);
                sup += std::max(l, h);
                inf += std::min(l, h);
            }
            r.log_g_sup = sup;
            r.log_g_inf = inf;
        } else {
            auto steps = detail::step_images(map, c.word, c.region);
            double sup = 0, inf = 0;
            std::optional<Rat> exact(Rat(1));
            for (size_t k = 0; k < c.word.size(); ++k) {
                double s, i;
                std::optional<Rat> e;
                detail::weight_step_logs(weight, map.pieces[c.word[k]], steps[k], s, i, e);
                sup += s;
                inf += i;
                if (exact && e)
                    *exact *= *e;
                else
                    exact.reset();
            }
            r.log_g_sup = sup;
            r.log_g_inf = inf;
            r.g_exact = exact;
        }
        if (r.log_g_sup != r.log_g_inf) table.weight_locally_constant = false;
        r.touches_boundary = cylinder_meets_faces(c, boundary);
        table.records.push_back(std::move(r));
    }
    return table;
}

// ---------------------------------------------------------------------------
// Overlap sweeps (exact closed-cover multiplicities)
// ---------------------------------------------------------------------------

namespace detail {

template <class S>
std::vector<S> sorted_unique(std::vector<S> v) {
    std::sort(v.begin(), v.end());
    if constexpr (GeomTraits<S>::exact) {
        v.erase(std::unique(v.begin(), v.end()), v.end());
        return v;
    } else {
        std::vector<S> out;
        for (const S& x : v)
            if (out.empty() || x - out.back() > GeomTraits<S>::tol()) out.push_back(x);
        return out;
    }
}

template <class S>
size_t coord_index(const std::vector<S>& coords, const S& x) {
    auto it = std::lower_bound(coords.begin(), coords.end(), x);
    if (it == coords.end()) return coords.size() - 1;
    if (it != coords.begin() && x - *(it - 1) < *it - x) --it;
    return static_cast<size_t>(it - coords.begin());
}

}  // namespace detail

// Maximum weighted multiplicity of a family of closed boxes: sup over x of the
// sum of weights of boxes whose closure contains x. Per-axis endpoint sweep
// with a d-dimensional difference array; exact comparisons in rational mode.
// The max of the (upper semi-continuous) coverage function is attained at a
// grid point of box endpoints.
template <class S>
double box_cover_multiplicity(const std::vector<Box<S>>& boxes,
                              const std::vector<double>* weights) {
    if (boxes.empty()) return 0.0;
    const int d = boxes[0].dim();
    std::vector<std::vector<S>> coords(d);
    for (const auto& b : boxes)
        for (int a = 0; a < d; ++a) {
            coords[a].push_back(b.lo[a]);
            coords[a].push_back(b.hi[a]);
        }
    std::vector<size_t> sizes(d);
    for (int a = 0; a < d; ++a) {
        coords[a] = detail::sorted_unique(std::move(coords[a]));
        sizes[a] = coords[a].size();
    }
    size_t total = 1;
    for (int a = 0; a < d; ++a) total *= sizes[a];
    std::vector<double> grid(total, 0.0);
    std::vector<size_t> stride(d, 1);
    for (int a = d - 2; a >= 0; --a) stride[a] = stride[a + 1] * sizes[a + 1];

    for (size_t bi = 0; bi < boxes.size(); ++bi) {
        const double w = weights ? (*weights)[bi] : 1.0;
        std::vector<size_t> l(d), r(d);
        for (int a = 0; a < d; ++a) {
            l[a] = detail::coord_index(coords[a], boxes[bi].lo[a]);
            r[a] = detail::coord_index(coords[a], boxes[bi].hi[a]);
        }
        const int corners = 1 << d;
        for (int msk = 0; msk < corners; ++msk) {
            size_t pos = 0;
            bool ok = true;
            int sign = 1;
            for (int a = 0; a < d; ++a) {
                if (msk & (1 << a)) {
                    if (r[a] + 1 >= sizes[a]) {
                        ok = false;
                        break;
                    }
                    pos += (r[a] + 1) * stride[a];
                    sign = -sign;
                } else {
                    pos += l[a] * stride[a];
                }
            }
            if (ok) grid[pos] += sign * w;
        }
    }
    for (int a = 0; a < d; ++a) {
        for (size_t i = 0; i < total; ++i) {
            const size_t idx_a = (i / stride[a]) % sizes[a];
            if (idx_a == 0) continue;
            grid[i] += grid[i - stride[a]];
        }
    }
    double best = 0;
    for (double v : grid) best = std::max(best, v);
    return best;
}

template <class S>
long long box_cover_count(const std::vector<Box<S>>& boxes) {
    return static_cast<long long>(std::llround(box_cover_multiplicity<S>(boxes, nullptr)));
}

// ---------------------------------------------------------------------------
// Certified sup of log f over a smooth 1D cylinder (dyadic grid + Lipschitz)
// ---------------------------------------------------------------------------

// Integrand: log|g^{(n)}(x)| + det_coef * log|(T^n)'(x)| (in 1D a nu_n^t
// factor folds into det_coef since nu_n = 1/|(T^n)'|). Returns {certified
// upper bound, sampled lower bound}; the grid step is chosen so the Lipschitz
// correction stays below target_gap.
template <class S>
std::pair<double, double> certified_log_sup_smooth(const PiecewiseMap<S>& map,
                                                   const Weight& weight,
                                                   const Cyl<S>& cyl, double det_coef,
                                                   double target_gap) {
    static_assert(!GeomTraits<S>::exact, "smooth sup certification is binary64-only");
    auto steps = detail::step_images(map, cyl.word, cyl.region);
    double lip = 0;
    double chain_hi = 1.0;  // sup |(T^k)'| over the cylinder
    for (size_t k = 0; k < cyl.word.size(); ++k) {
        const Piece<S>& p = map.pieces[cyl.word[k]];
        double dlo, dhi, d2;
        if (p.affine()) {
            dlo = dhi = to_double(p.aff().a[0]);
            d2 = 0;
        } else {
            std::tie(dlo, dhi) =
                p.quad().deriv_range(to_double(steps[k].lo[0]), to_double(steps[k].hi[0]));
            d2 = std::abs(p.quad().second_deriv());
        }
        const double amin = std::min(std::abs(dlo), std::abs(dhi));
        double local = std::abs(det_coef) * (d2 > 0 ? d2 / amin : 0.0);
        if (weight.kind == Weight::Kind::DetJacobianPower && d2 > 0)
            local += std::abs(weight.det_exponent) * d2 / amin;
        else if (weight.kind == Weight::Kind::ExpAffine)
            local += std::abs(weight.exp_affine.at(p.index).coef[0]);
        lip += local * chain_hi;
        chain_hi *= std::max(std::abs(dlo), std::abs(dhi));
    }
    const double a = to_double(cyl.region.lo[0]);
    const double b = to_double(cyl.region.hi[0]);
    int cells = 1;
    if (lip > 0 && target_gap > 0)
        cells = std::max(1, static_cast<int>(std::ceil(lip * (b - a) / target_gap)));
    cells = std::min(cells, 1 << 20);
    auto integrand = [&](double x0) {
        double x = x0, acc = 0;
        for (size_t k = 0; k < cyl.word.size(); ++k) {
            const Piece<S>& p = map.pieces[cyl.word[k]];
            acc += std::log(weight_value_at(weight, p, std::vector<S>{S(x)}));
            const double dv = p.affine() ? to_double(p.aff().a[0]) : p.quad().deriv(x);
            acc += det_coef * std::log(std::abs(dv));
            x = p.affine() ? to_double(p.aff().a[0]) * x + to_double(p.aff().b[0])
                           : p.quad().apply(x);
        }
        return acc;
    };
    double best = kNegInf;
    for (int i = 0; i <= cells; ++i) {
        const double x = a + (b - a) * i / cells;
        best = std::max(best, integrand(x));
    }
    return {best + lip * (b - a) / cells, best};
}

}  // namespace pwe
