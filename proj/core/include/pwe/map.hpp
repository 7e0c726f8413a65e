#pragma once

#include <cmath>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "pwe/geometry.hpp"

namespace pwe {

// ---------------------------------------------------------------------------
// Branches
// ---------------------------------------------------------------------------

// Diagonal affine map x |-> a.*x + b (scalar slope when dim==1). Diagonal is
// the v1 restriction for d >= 2; arbitrary nonzero slopes (and signs) in 1D.
template <class S>
struct AffineBranch {
    std::vector<S> a, b;

    int dim() const { return static_cast<int>(a.size()); }

    std::vector<S> apply(const std::vector<S>& x) const {
        std::vector<S> y(x.size());
        for (size_t c = 0; c < x.size(); ++c) y[c] = a[c] * x[c] + b[c];
        return y;
    }

    std::vector<S> apply_inverse(const std::vector<S>& y) const {
        std::vector<S> x(y.size());
        for (size_t c = 0; c < y.size(); ++c) x[c] = (y[c] - b[c]) / a[c];
        return x;
    }

    Box<S> image(const Box<S>& box) const {
        Box<S> r;
        r.lo.resize(a.size());
        r.hi.resize(a.size());
        for (size_t c = 0; c < a.size(); ++c) {
            const S u = a[c] * box.lo[c] + b[c];
            const S v = a[c] * box.hi[c] + b[c];
            r.lo[c] = std::min(u, v);
            r.hi[c] = std::max(u, v);
        }
        return r;
    }

    Box<S> preimage(const Box<S>& box) const {
        Box<S> r;
        r.lo.resize(a.size());
        r.hi.resize(a.size());
        for (size_t c = 0; c < a.size(); ++c) {
            const S u = (box.lo[c] - b[c]) / a[c];
            const S v = (box.hi[c] - b[c]) / a[c];
            r.lo[c] = std::min(u, v);
            r.hi[c] = std::max(u, v);
        }
        return r;
    }

    // this-after-other composition: (*this).compose_after(g) = (*this) o g.
    AffineBranch compose_after(const AffineBranch& g) const {
        AffineBranch r;
        r.a.resize(a.size());
        r.b.resize(a.size());
        for (size_t c = 0; c < a.size(); ++c) {
            r.a[c] = a[c] * g.a[c];
            r.b[c] = a[c] * g.b[c] + b[c];
        }
        return r;
    }

    S abs_det() const {
        S d(1);
        for (const S& ac : a) d *= (ac < 0 ? S(-ac) : ac);
        return d;
    }

    // Smallest/largest singular value of the (diagonal) linear part.
    S min_abs_a() const {
        S m = a[0] < 0 ? S(-a[0]) : a[0];
        for (size_t c = 1; c < a.size(); ++c) m = std::min(m, S(a[c] < 0 ? -a[c] : a[c]));
        return m;
    }
    S max_abs_a() const {
        S m = a[0] < 0 ? S(-a[0]) : a[0];
        for (size_t c = 1; c < a.size(); ++c) m = std::max(m, S(a[c] < 0 ? -a[c] : a[c]));
        return m;
    }
};

// 1D smooth catalog branch: T(x) = c2 x^2 + c1 x + c0, monotone with
// |T'| >= lambda on the extended region. binary64 only.
struct QuadraticBranch {
    double c2 = 0, c1 = 0, c0 = 0;

    double apply(double x) const { return (c2 * x + c1) * x + c0; }
    double deriv(double x) const { return 2 * c2 * x + c1; }
    double second_deriv() const { return 2 * c2; }

    // T' is linear so its range over an interval is attained at endpoints.
    std::pair<double, double> deriv_range(double lo, double hi) const {
        const double u = deriv(lo), v = deriv(hi);
        return {std::min(u, v), std::max(u, v)};
    }

    // Inverse of y for the branch restricted to [lo, hi] (monotone there).
    double invert(double y, double lo, double hi) const {
        if (c2 == 0) return (y - c0) / c1;
        const double disc = c1 * c1 - 4 * c2 * (c0 - y);
        const double sq = std::sqrt(std::max(disc, 0.0));
        const double r1 = (-c1 + sq) / (2 * c2);
        const double r2 = (-c1 - sq) / (2 * c2);
        const double mid = 0.5 * (lo + hi);
        return std::abs(r1 - mid) <= std::abs(r2 - mid) ? r1 : r2;
    }
};

template <class S>
using BranchVariant = std::variant<AffineBranch<S>, QuadraticBranch>;

template <class S>
struct Piece {
    int index = 0;
    Box<S> region;
    BranchVariant<S> branch;
    S extension_margin{};  // radius of the neighbourhood on which the branch extends

    bool affine() const { return std::holds_alternative<AffineBranch<S>>(branch); }
    const AffineBranch<S>& aff() const { return std::get<AffineBranch<S>>(branch); }
    const QuadraticBranch& quad() const { return std::get<QuadraticBranch>(branch); }

    Box<S> extended_region() const {
        Box<S> r = region;
        for (int a = 0; a < r.dim(); ++a) {
            r.lo[a] -= extension_margin;
            r.hi[a] += extension_margin;
        }
        return r;
    }
};

// ---------------------------------------------------------------------------
// Weights
// ---------------------------------------------------------------------------

// Piecewise weight g. All bound formulas consume |g|, so evaluation returns
// moduli; kinds are chosen so per-piece Lipschitz constants of log|g| are
// computable.
struct Weight {
    enum class Kind { Constant, DetJacobianPower, PiecewiseConstant, ExpAffine };

    struct AffineExponent {
        std::vector<double> coef;
        double c = 0;
    };

    Kind kind = Kind::Constant;
    Rat constant_value = Rat(1);
    double det_exponent = 0;
    std::vector<Rat> piece_values;
    std::vector<AffineExponent> exp_affine;
    bool complex_modulus_only = true;

    static Weight one() { return constant(Rat(1)); }
    static Weight constant(Rat c) {
        Weight w;
        w.kind = Kind::Constant;
        w.constant_value = std::move(c);
        return w;
    }
    static Weight det_power(double exponent) {
        Weight w;
        w.kind = Kind::DetJacobianPower;
        w.det_exponent = exponent;
        return w;
    }
    static Weight piecewise(std::vector<Rat> values) {
        Weight w;
        w.kind = Kind::PiecewiseConstant;
        w.piece_values = std::move(values);
        return w;
    }

    bool det_exponent_integral() const {
        return kind != Kind::DetJacobianPower ||
               det_exponent == std::nearbyint(det_exponent);
    }

    // Hoelder exponent of log|g| per piece; every supported kind is Lipschitz.
    double alpha() const { return 1.0; }

    std::string describe() const {
        switch (kind) {
            case Kind::Constant: return "constant(" + rat_to_string(constant_value) + ")";
            case Kind::DetJacobianPower: {
                char buf[64];
                std::snprintf(buf, sizeof(buf), "%.17g", det_exponent);
                return std::string("|det DT|^") + buf;
            }
            case Kind::PiecewiseConstant: return "piecewise_constant";
            case Kind::ExpAffine: return "exp_affine";
        }
        return "?";
    }
};

// ---------------------------------------------------------------------------
// Piecewise expanding map
// ---------------------------------------------------------------------------

template <class S>
struct PiecewiseMap {
    int dimension = 1;
    Box<S> phase;  // the manifold M (axis-aligned box model)
    std::vector<Piece<S>> pieces;
    S lambda{};  // uniform expansion lower bound, > 1

    bool all_affine() const {
        for (const auto& p : pieces)
            if (!p.affine()) return false;
        return true;
    }

    int piece_count() const { return static_cast<int>(pieces.size()); }

    // Checks the definition invariants: pairwise disjoint open regions whose
    // closures cover M (up to measure zero), expansion >= lambda on every
    // (extended) region, and branch images inside M.
    void validate() const {
        if (!(to_double(lambda) > 1.0))
            throw InvalidMapError("expansion bound lambda must exceed 1");
        if (pieces.empty()) throw InvalidMapError("map has no pieces");
        S total(0);
        for (const auto& p : pieces) {
            if (!p.region.nonempty()) throw InvalidMapError("piece region is empty");
            total += p.region.volume();
            if (p.affine()) {
                if (!(p.aff().min_abs_a() >= lambda))
                    throw InvalidMapError("piece " + std::to_string(p.index) +
                                          " expands less than lambda");
                if (p.aff().abs_det() <= 0)
                    throw InvalidMapError("affine branch with zero determinant");
                if (!p.aff().image(p.region).subset_of_closed(phase))
                    throw InvalidMapError("branch image leaves the phase space");
            } else {
                if constexpr (GeomTraits<S>::exact) {
                    throw InvalidMapError("smooth branches require binary64 arithmetic");
                } else {
                    const auto& q = p.quad();
                    const Box<S> ext = p.extended_region();
                    auto [dlo, dhi] = q.deriv_range(to_double(ext.lo[0]), to_double(ext.hi[0]));
                    if (std::min(std::abs(dlo), std::abs(dhi)) < to_double(lambda) ||
                        dlo * dhi <= 0)
                        throw InvalidMapError("smooth branch not uniformly expanding");
                    const double ilo = q.apply(to_double(p.region.lo[0]));
                    const double ihi = q.apply(to_double(p.region.hi[0]));
                    if (std::min(ilo, ihi) < to_double(phase.lo[0]) - 1e-12 ||
                        std::max(ilo, ihi) > to_double(phase.hi[0]) + 1e-12)
                        throw InvalidMapError("branch image leaves the phase space");
                }
            }
        }
        const S t = GeomTraits<S>::exact ? S(0) : S(1e-9);
        const S pv = phase.volume();
        if (total - pv > t || pv - total > t)
            throw InvalidMapError("piece closures do not cover the phase space mod 0");
        for (size_t i = 0; i < pieces.size(); ++i)
            for (size_t j = i + 1; j < pieces.size(); ++j)
                if (pieces[i].region.intersect(pieces[j].region).nonempty())
                    throw InvalidMapError("piece regions overlap");
    }
};

template <class S>
struct EvalResult {
    bool boundary = false;  // x lies on the partition boundary (within tol)
    int piece = -1;
    std::vector<S> image;
    std::vector<double> jacobian_diag;
};

template <class S>
std::vector<S> branch_apply(const BranchVariant<S>& br, const std::vector<S>& x) {
    if (std::holds_alternative<AffineBranch<S>>(br))
        return std::get<AffineBranch<S>>(br).apply(x);
    if constexpr (!GeomTraits<S>::exact) {
        return {std::get<QuadraticBranch>(br).apply(to_double(x[0]))};
    }
    throw UnsupportedGeometryError("smooth branch in exact mode");
}

// Locates x in the partition and applies the branch. Boundary contact (within
// geometric tolerance) yields a Boundary marker; a point outside all closed
// regions signals an invalid description.
template <class S>
EvalResult<S> evaluate_map(const PiecewiseMap<S>& map, const std::vector<S>& x) {
    const Piece<S>* host = nullptr;
    for (const auto& p : map.pieces) {
        if (p.region.contains_open(x)) {
            host = &p;
            break;
        }
    }
    if (!host) {
        for (const auto& p : map.pieces) {
            if (p.region.contains_closed(x)) {
                EvalResult<S> r;
                r.boundary = true;
                return r;
            }
        }
        throw NoPieceError("point outside all closed piece regions");
    }
    EvalResult<S> r;
    r.piece = host->index;
    r.image = branch_apply(host->branch, x);
    if (host->affine()) {
        for (const S& ac : host->aff().a) r.jacobian_diag.push_back(to_double(ac));
    } else {
        r.jacobian_diag.push_back(std::get<QuadraticBranch>(host->branch).deriv(to_double(x[0])));
    }
    return r;
}

// |g| at a point of the given piece.
template <class S>
double weight_value_at(const Weight& w, const Piece<S>& piece, const std::vector<S>& x) {
    switch (w.kind) {
        case Weight::Kind::Constant:
            return std::abs(to_double(w.constant_value));
        case Weight::Kind::PiecewiseConstant:
            return std::abs(to_double(w.piece_values.at(piece.index)));
        case Weight::Kind::DetJacobianPower: {
            double det;
            if (piece.affine())
                det = to_double(piece.aff().abs_det());
            else
                det = std::abs(std::get<QuadraticBranch>(piece.branch).deriv(to_double(x[0])));
            return std::pow(det, w.det_exponent);
        }
        case Weight::Kind::ExpAffine: {
            const auto& e = w.exp_affine.at(piece.index);
            double s = e.c;
            for (size_t c = 0; c < x.size(); ++c) s += e.coef[c] * to_double(x[c]);
            return std::exp(s);
        }
    }
    return 1.0;
}

// Birkhoff product |g^{(n)}(x)| along the branch composition prescribed by
// `word`; throws WordMismatch if the orbit leaves the word's closures.
template <class S>
double birkhoff_weight(const PiecewiseMap<S>& map, const Weight& w,
                       const std::vector<int>& word, std::vector<S> x) {
    double acc = 1.0;
    for (int k = 0; k < static_cast<int>(word.size()); ++k) {
        const Piece<S>& piece = map.pieces.at(word[k]);
        if (!piece.region.contains_closed(x))
            throw WordMismatchError("orbit leaves the prescribed word at step " +
                                    std::to_string(k));
        acc *= weight_value_at(w, piece, x);
        x = branch_apply(piece.branch, x);
    }
    return acc;
}

}  // namespace pwe
