#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>
#include "pwe/catalog.hpp"

using namespace pwe;

TEST_CASE("doubling cylinders") {
    System s = catalog::get("doubling");
    s.validate();
    CHECK(s.cylinder_count(5) == 32);
    const CylTable& t = s.table(Weight::det_power(-1.0), 5);
    CHECK(t.records.size() == 32);
    CHECK(t.records[0].g_exact.has_value());
    CHECK(*t.records[0].g_exact == Rat(1, 32));
}

TEST_CASE("golden fibonacci") {
    System s = catalog::get("golden_beta");
    s.validate();
    long long expect[] = {2, 3, 5, 8, 13, 21, 34, 55};
    for (int n = 1; n <= 8; ++n) CHECK(s.cylinder_count(n) == expect[n - 1]);
    CHECK(s.markov().markov);
}

TEST_CASE("beta2d") {
    System s = catalog::get("beta_2d_diag_2_3");
    s.validate();
    CHECK(s.cylinder_count(3) == 216);
    CHECK(s.markov().markov);
    CHECK(s.db_sweep(2, nullptr) == doctest::Approx(4.0));
}
