#include "pwe/perron.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace pwe {

std::vector<double> SparseMatrix::apply(const std::vector<double>& v) const {
    std::vector<double> out(n, 0.0);
    for (int i = 0; i < n; ++i) {
        double acc = 0;
        for (const auto& [j, a] : rows[i]) acc += a * v[j];
        out[i] = acc;
    }
    return out;
}

std::vector<double> SparseMatrix::apply_transpose(const std::vector<double>& v) const {
    std::vector<double> out(n, 0.0);
    for (int i = 0; i < n; ++i)
        for (const auto& [j, a] : rows[i]) out[j] += a * v[i];
    return out;
}

SparseMatrix SparseMatrix::transpose() const {
    SparseMatrix t;
    t.n = n;
    t.rows.resize(n);
    for (int i = 0; i < n; ++i)
        for (const auto& [j, a] : rows[i]) t.rows[j].emplace_back(i, a);
    return t;
}

namespace {

double l1(const std::vector<double>& v) {
    double s = 0;
    for (double x : v) s += std::abs(x);
    return s;
}

PowerResult dominant_impl(const SparseMatrix& m, bool transpose, double tol, int cap) {
    PowerResult r;
    std::vector<double> v(m.n, 1.0 / std::max(1, m.n));
    double lam = 0;
    for (int it = 1; it <= cap; ++it) {
        std::vector<double> w = transpose ? m.apply_transpose(v) : m.apply(v);
        const double norm = l1(w);
        if (norm == 0.0) {
            r.eigenvalue = 0;
            r.vec = std::move(w);
            r.iterations = it;
            r.converged = true;
            return r;
        }
        lam = norm;  // v is l1-normalized and nonnegative
        for (double& x : w) x /= norm;
        double res = 0;
        for (size_t i = 0; i < w.size(); ++i) res = std::max(res, std::abs(w[i] - v[i]));
        v = std::move(w);
        if (res < tol) {
            r.eigenvalue = lam;
            r.vec = std::move(v);
            r.iterations = it;
            r.residual = res;
            r.converged = true;
            return r;
        }
        r.residual = res;
    }
    throw NoConvergenceError("power iteration did not converge within cap", r.residual);
}

}  // namespace

PowerResult dominant_nonnegative(const SparseMatrix& m, double tol, int cap) {
    return dominant_impl(m, false, tol, cap);
}

PowerResult dominant_nonnegative_transpose(const SparseMatrix& m, double tol, int cap) {
    return dominant_impl(m, true, tol, cap);
}

ModulusResult dominant_modulus(
    const std::function<std::vector<double>(const std::vector<double>&)>& op, int dim,
    double tol, int cap) {
    ModulusResult r;
    std::vector<double> v(dim);
    for (int i = 0; i < dim; ++i) v[i] = 1.0 + 0.37 * ((i * 2654435761u) % 97);
    double norm0 = std::sqrt(std::inner_product(v.begin(), v.end(), v.begin(), 0.0));
    for (double& x : v) x /= norm0;
    double prev = 0;
    int stable = 0;
    const int window = 8;
    double accum = 0;
    int accum_count = 0;
    for (int it = 1; it <= cap; ++it) {
        std::vector<double> w = op(v);
        const double norm = std::sqrt(std::inner_product(w.begin(), w.end(), w.begin(), 0.0));
        if (norm < 1e-280) {
            r.modulus = 0;
            r.exact_zero = true;
            r.iterations = it;
            r.converged = true;
            return r;
        }
        for (double& x : w) x /= norm;
        v = std::move(w);
        accum += std::log(norm);
        ++accum_count;
        if (accum_count == window) {
            const double est = std::exp(accum / window);
            if (std::abs(est - prev) <= tol * std::max(1.0, est))
                ++stable;
            else
                stable = 0;
            prev = est;
            accum = 0;
            accum_count = 0;
            if (stable >= 3) {
                r.modulus = est;
                r.iterations = it;
                r.converged = true;
                return r;
            }
        }
        r.iterations = it;
    }
    r.modulus = prev;
    r.converged = false;
    return r;
}

ModulusResult subdominant_modulus(const SparseMatrix& m, const PowerResult& right,
                                  const PowerResult& left, double tol, int cap) {
    const double lam = right.eigenvalue;
    double lr = 0;
    for (int i = 0; i < m.n; ++i) lr += left.vec[i] * right.vec[i];
    auto op = [&](const std::vector<double>& v) {
        std::vector<double> w = m.apply(v);
        if (lam != 0 && lr != 0) {
            double lv = 0;
            for (int i = 0; i < m.n; ++i) lv += left.vec[i] * v[i];
            const double c = lam * lv / lr;
            for (int i = 0; i < m.n; ++i) w[i] -= c * right.vec[i];
        }
        return w;
    };
    return dominant_modulus(op, m.n, tol, cap);
}

}  // namespace pwe
