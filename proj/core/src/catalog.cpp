#include "pwe/catalog.hpp"

#include <cmath>

namespace pwe::catalog {

namespace {

Piece<Rat> affine_piece_1d(int idx, const Rat& lo, const Rat& hi, const Rat& a,
                           const Rat& b) {
    Piece<Rat> p;
    p.index = idx;
    p.region = Box<Rat>({lo}, {hi});
    AffineBranch<Rat> br;
    br.a = {a};
    br.b = {b};
    p.branch = br;
    p.extension_margin = Rat(0);
    return p;
}

PiecewiseMap<Rat> doubling_map() {
    PiecewiseMap<Rat> m;
    m.dimension = 1;
    m.phase = Box<Rat>({Rat(0)}, {Rat(1)});
    m.lambda = Rat(2);
    m.pieces.push_back(affine_piece_1d(0, Rat(0), Rat(1, 2), Rat(2), Rat(0)));
    m.pieces.push_back(affine_piece_1d(1, Rat(1, 2), Rat(1), Rat(2), Rat(-1)));
    return m;
}

PiecewiseMap<Rat> tent_map() {
    PiecewiseMap<Rat> m;
    m.dimension = 1;
    m.phase = Box<Rat>({Rat(0)}, {Rat(1)});
    m.lambda = Rat(2);
    m.pieces.push_back(affine_piece_1d(0, Rat(0), Rat(1, 2), Rat(2), Rat(0)));
    m.pieces.push_back(affine_piece_1d(1, Rat(1, 2), Rat(1), Rat(-2), Rat(2)));
    return m;
}

// Three full-height branch rows with slopes 2, -3, 3; Markov for its own
// partition, with a slope-2 fixed point at 0 and h_top = log(1+sqrt 2).
PiecewiseMap<Rat> slopes_2_3_map() {
    PiecewiseMap<Rat> m;
    m.dimension = 1;
    m.phase = Box<Rat>({Rat(0)}, {Rat(1)});
    m.lambda = Rat(2);
    m.pieces.push_back(affine_piece_1d(0, Rat(0), Rat(1, 2), Rat(2), Rat(0)));
    m.pieces.push_back(affine_piece_1d(1, Rat(1, 2), Rat(5, 6), Rat(-3), Rat(5, 2)));
    m.pieces.push_back(affine_piece_1d(2, Rat(5, 6), Rat(1), Rat(3), Rat(-5, 2)));
    return m;
}

PiecewiseMap<double> golden_beta_map() {
    const double beta = (1.0 + std::sqrt(5.0)) / 2.0;
    const double split = beta - 1.0;  // = 1/beta
    PiecewiseMap<double> m;
    m.dimension = 1;
    m.phase = Box<double>({0.0}, {1.0});
    m.lambda = beta;
    Piece<double> p0;
    p0.index = 0;
    p0.region = Box<double>({0.0}, {split});
    AffineBranch<double> b0;
    b0.a = {beta};
    b0.b = {0.0};
    p0.branch = b0;
    p0.extension_margin = 0.0;
    Piece<double> p1;
    p1.index = 1;
    p1.region = Box<double>({split}, {1.0});
    AffineBranch<double> b1;
    b1.a = {beta};
    b1.b = {-1.0};
    p1.branch = b1;
    p1.extension_margin = 0.0;
    m.pieces = {p0, p1};
    return m;
}

PiecewiseMap<Rat> beta_2d_map() {
    PiecewiseMap<Rat> m;
    m.dimension = 2;
    m.phase = Box<Rat>({Rat(0), Rat(0)}, {Rat(1), Rat(1)});
    m.lambda = Rat(2);
    int idx = 0;
    for (int i = 0; i < 2; ++i) {
        for (int j = 0; j < 3; ++j) {
            Piece<Rat> p;
            p.index = idx++;
            p.region = Box<Rat>({Rat(i, 2), Rat(j, 3)}, {Rat(i + 1, 2), Rat(j + 1, 3)});
            AffineBranch<Rat> br;
            br.a = {Rat(2), Rat(3)};
            br.b = {Rat(-i), Rat(-j)};
            p.branch = br;
            p.extension_margin = Rat(0);
            m.pieces.push_back(std::move(p));
        }
    }
    return m;
}

}  // namespace

std::vector<std::string> names() {
    return {"doubling", "golden_beta", "slopes_2_3", "beta_2d_diag_2_3", "tent"};
}

bool has(const std::string& name) {
    for (const auto& n : names())
        if (n == name) return true;
    return false;
}

System get(const std::string& name) {
    if (name == "doubling") return System(doubling_map(), name);
    if (name == "golden_beta") return System(golden_beta_map(), name);
    if (name == "slopes_2_3") return System(slopes_2_3_map(), name);
    if (name == "beta_2d_diag_2_3") return System(beta_2d_map(), name);
    if (name == "tent") return System(tent_map(), name);
    throw ConfigError("unknown catalog map '" + name + "'");
}

System perturbed_doubling(double eps) {
    // T(x) = 2x + eps*x*(1-x) mod 1: two quadratic full branches split where
    // (2+eps)x - eps x^2 = 1.
    PiecewiseMap<double> m;
    m.dimension = 1;
    m.phase = Box<double>({0.0}, {1.0});
    // split solves (2+eps)x - eps x^2 = 1; the branch cut of the mod-1 action
    const double split =
        ((2.0 + eps) - std::sqrt((2.0 + eps) * (2.0 + eps) - 4.0 * eps)) / (2.0 * eps);
    m.lambda = 2.0 - eps * 1.03;  // T' = 2+eps-2*eps*x >= 2-eps-0.02*eps on extensions
    Piece<double> p0;
    p0.index = 0;
    p0.region = Box<double>({0.0}, {split});
    QuadraticBranch q0{-eps, 2.0 + eps, 0.0};
    p0.branch = q0;
    p0.extension_margin = 0.01;
    Piece<double> p1;
    p1.index = 1;
    p1.region = Box<double>({split}, {1.0});
    QuadraticBranch q1{-eps, 2.0 + eps, -1.0};
    p1.branch = q1;
    p1.extension_margin = 0.01;
    m.pieces = {p0, p1};
    return System(std::move(m), "perturbed_doubling");
}

}  // namespace pwe::catalog
