#pragma once

#include <functional>
#include <vector>

#include "pwe/errors.hpp"

namespace pwe {

struct SparseMatrix {
    int n = 0;
    std::vector<std::vector<std::pair<int, double>>> rows;  // row -> (col, value)

    std::vector<double> apply(const std::vector<double>& v) const;
    std::vector<double> apply_transpose(const std::vector<double>& v) const;
    SparseMatrix transpose() const;
};

struct PowerResult {
    double eigenvalue = 0;
    std::vector<double> vec;  // l1-normalized nonnegative eigenvector
    int iterations = 0;
    double residual = 0;
    bool converged = false;
};

// Power iteration for a nonnegative operator, seeded with the constant vector.
// Throws NoConvergence after `cap` iterations (residual attached).
PowerResult dominant_nonnegative(const SparseMatrix& m, double tol = 1e-13,
                                 int cap = 100000);
PowerResult dominant_nonnegative_transpose(const SparseMatrix& m, double tol = 1e-13,
                                           int cap = 100000);

// Modulus of the dominant eigenvalue of a general linear operator, estimated
// from norm growth; used on the rank-one-deflated matrix for subdominant data.
// Exact zero is reported when the iterates vanish (nilpotent compression).
struct ModulusResult {
    double modulus = 0;
    int iterations = 0;
    bool exact_zero = false;
    bool converged = false;
};
ModulusResult dominant_modulus(const std::function<std::vector<double>(const std::vector<double>&)>& op,
                               int dim, double tol = 1e-10, int cap = 100000);

// Subdominant modulus of a nonnegative matrix via deflation by the dominant
// rank-one projection (right vector r, left vector l).
ModulusResult subdominant_modulus(const SparseMatrix& m, const PowerResult& right,
                                  const PowerResult& left, double tol = 1e-10,
                                  int cap = 100000);

}  // namespace pwe
