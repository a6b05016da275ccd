#include <cmath>

#include "doctest.h"
#include "ductmc/chemistry.hpp"
#include "test_util.hpp"

using namespace ductmc;
using ductmc::testutil::thrown_code;

TEST_CASE("survival frequency matches exp(-rate*dt)") {
  RngStream rng(31, 0);
  const int n = 100000;
  int alive = 0;
  for (int i = 0; i < n; ++i) alive += survives(0.5, 0.01, rng) ? 1 : 0;
  const double expected = std::exp(-0.005);  // 0.9950125
  CHECK(double(alive) / n == doctest::Approx(expected).epsilon(0.002 / expected));
}

TEST_CASE("certain decay and certain survival") {
  RngStream rng(32, 0);
  for (int i = 0; i < 100; ++i) {
    CHECK(survives(0.0, 1.0, rng));
    CHECK_FALSE(survives(1e12, 1.0, rng));
  }
}

TEST_CASE("zero rate consumes no randomness") {
  RngStream a(7, 3);
  RngStream b(7, 3);
  for (int i = 0; i < 5; ++i) CHECK(survives(0.0, 1e-3, a));
  // Both streams must still be in lockstep.
  for (int i = 0; i < 8; ++i) CHECK(a.next_u64() == b.next_u64());
}

TEST_CASE("negative rate is rejected") {
  RngStream rng(33, 0);
  CHECK(thrown_code([&] { survives(-1.0, 1e-3, rng); }) == "InvalidSpecies");
}
