#pragma once

#include <algorithm>
#include <vector>

#include "pwe/rational.hpp"

namespace pwe {

// Comparison policy per scalar type: exact for Rat, eps_geom-tolerant for
// binary64 geometry.
template <class S>
struct GeomTraits;

template <>
struct GeomTraits<Rat> {
    static constexpr bool exact = true;
    static Rat tol() { return Rat(0); }
};

template <>
struct GeomTraits<double> {
    static constexpr bool exact = false;
    static double tol() { return 1e-12; }
};

using Point = std::vector<double>;

// Axis-aligned open box (open interval when dim()==1). All region geometry in
// the library reduces to this type; see the v1 geometric restriction in the
// catalog maps.
template <class S>
struct Box {
    std::vector<S> lo, hi;

    Box() = default;
    Box(std::vector<S> lo_, std::vector<S> hi_) : lo(std::move(lo_)), hi(std::move(hi_)) {}

    int dim() const { return static_cast<int>(lo.size()); }

    S volume() const {
        S v(1);
        for (int a = 0; a < dim(); ++a) {
            if (hi[a] <= lo[a]) return S(0);
            v *= hi[a] - lo[a];
        }
        return v;
    }

    // Positive-volume test (mod-0 semantics: degenerate boxes count as empty).
    bool nonempty() const {
        const S t = GeomTraits<S>::tol();
        for (int a = 0; a < dim(); ++a)
            if (!(hi[a] - lo[a] > t)) return false;
        return true;
    }

    S diameter_sup() const {  // sup-norm diameter
        S d(0);
        for (int a = 0; a < dim(); ++a) d = std::max(d, S(hi[a] - lo[a]));
        return d;
    }

    Box intersect(const Box& o) const {
        Box r;
        r.lo.resize(lo.size());
        r.hi.resize(hi.size());
        for (int a = 0; a < dim(); ++a) {
            r.lo[a] = std::max(lo[a], o.lo[a]);
            r.hi[a] = std::min(hi[a], o.hi[a]);
        }
        return r;
    }

    bool contains_open(const std::vector<S>& x) const {
        const S t = GeomTraits<S>::tol();
        for (int a = 0; a < dim(); ++a)
            if (!(x[a] - lo[a] > t && hi[a] - x[a] > t)) return false;
        return true;
    }

    bool contains_closed(const std::vector<S>& x) const {
        const S t = GeomTraits<S>::tol();
        for (int a = 0; a < dim(); ++a)
            if (x[a] < lo[a] - t || x[a] > hi[a] + t) return false;
        return true;
    }

    // Closure-vs-closure contact.
    bool touches(const Box& o) const {
        const S t = GeomTraits<S>::tol();
        for (int a = 0; a < dim(); ++a)
            if (o.lo[a] - hi[a] > t || lo[a] - o.hi[a] > t) return false;
        return true;
    }

    // Is this box contained in `o` up to tolerance (closures)?
    bool subset_of_closed(const Box& o) const {
        const S t = GeomTraits<S>::tol();
        for (int a = 0; a < dim(); ++a)
            if (lo[a] < o.lo[a] - t || hi[a] > o.hi[a] + t) return false;
        return true;
    }

    std::vector<double> lo_d() const {
        std::vector<double> v(lo.size());
        for (size_t a = 0; a < lo.size(); ++a) v[a] = to_double(lo[a]);
        return v;
    }
    std::vector<double> hi_d() const {
        std::vector<double> v(hi.size());
        for (size_t a = 0; a < hi.size(); ++a) v[a] = to_double(hi[a]);
        return v;
    }
};

// An axis-aligned face {x_axis = coord} x extent, used for partition
// boundaries and their pullbacks. In 1D the extent is empty and the face is a
// point.
template <class S>
struct Face {
    int axis = 0;
    S coord{};
    Box<S> extent;  // box in the remaining coordinates ordered by axis index

    bool touches_box(const Box<S>& b) const {
        const S t = GeomTraits<S>::tol();
        if (coord < b.lo[axis] - t || coord > b.hi[axis] + t) return false;
        int k = 0;
        for (int a = 0; a < b.dim(); ++a) {
            if (a == axis) continue;
            if (extent.lo[k] - b.hi[a] > t || b.lo[a] - extent.hi[k] > t) return false;
            ++k;
        }
        return true;
    }
};

}  // namespace pwe
