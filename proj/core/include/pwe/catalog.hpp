#pragma once

#include <string>
#include <vector>

#include "pwe/system.hpp"

namespace pwe::catalog {

// Built-in example systems: doubling, golden_beta, slopes_2_3,
// beta_2d_diag_2_3, tent.
std::vector<std::string> names();
bool has(const std::string& name);
System get(const std::string& name);

// Smooth (quadratic-branch) variant of the doubling map used to exercise the
// binary64 certified-sup machinery; not part of the named catalog.
System perturbed_doubling(double eps = 0.5);

}  // namespace pwe::catalog
