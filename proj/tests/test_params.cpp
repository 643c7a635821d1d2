#include <doctest.h>

#include "maxstab/errors.hpp"
#include "maxstab/params.hpp"

using namespace maxstab;

TEST_CASE("identifiability mask follows the (r, p) table") {
  struct Row {
    int r, p;
    std::array<bool, 4> want;
  };
  const Row rows[] = {
      {0, 1, {false, false, true, false}},  {0, 2, {false, false, true, true}},
      {0, 5, {false, false, true, true}},   {1, 0, {true, false, false, false}},
      {2, 0, {true, true, false, false}},   {3, 0, {true, true, false, false}},
      {1, 1, {true, false, true, false}},   {1, 2, {true, false, true, true}},
      {2, 1, {true, true, true, false}},    {2, 3, {true, true, true, true}},
      {4, 2, {true, true, true, true}},
  };
  for (const Row& row : rows) {
    const IdentifiabilityMask mask = identifiability_mask(row.r, row.p);
    CHECK(mask.free == row.want);
  }
}

TEST_CASE("mask is a pure function of (r, p)") {
  const IdentifiabilityMask a = identifiability_mask(1, 2);
  const IdentifiabilityMask b = identifiability_mask(1, 2);
  CHECK(a.free == b.free);
  CHECK((a.fixed_values.array() == b.fixed_values.array()).all());
  for (int r = 2; r <= 4; ++r)
    for (int p = 2; p <= 4; ++p) CHECK(identifiability_mask(r, p).n_free() == 4);
}

TEST_CASE("mask rejects the empty design") {
  CHECK_THROWS_AS(identifiability_mask(0, 0), ConfigError);
  CHECK_THROWS_AS(identifiability_mask(-1, 2), ConfigError);
}

TEST_CASE("mask pins non-free slots") {
  const ParamVector pins{0.5, 1.25, 0.7, 0.9};
  const IdentifiabilityMask mask = identifiability_mask(1, 1, pins);
  const ParamVector applied = mask.apply({9.0, 9.0, 9.0, 9.0});
  CHECK(applied.theta1 == 9.0);
  CHECK(applied.alpha1 == 1.25);
  CHECK(applied.theta2 == 9.0);
  CHECK(applied.alpha2 == 0.9);
  // Default pins are 1.0, the natural choice for unit-lag designs.
  CHECK((identifiability_mask(1, 1).fixed_values.array() == 1.0).all());
}

TEST_CASE("parameter box validation and membership") {
  ParamBox box;
  box.validate();
  CHECK(box.contains({0.06, 1.0, 0.04, 1.0}));
  CHECK(!box.contains({0.06, 2.5, 0.04, 1.0}));
  CHECK(!box.contains({0.0, 1.0, 0.04, 1.0}));
  CHECK(box.clamp({-1.0, 3.0, 0.5, 1.0}).theta1 == box.lower[0]);
  CHECK(box.clamp({-1.0, 3.0, 0.5, 1.0}).alpha1 == 2.0);

  ParamBox bad = box;
  bad.upper[1] = 2.5;
  CHECK_THROWS_AS(bad.validate(), ConfigError);
  bad = box;
  bad.lower[0] = 0.0;
  CHECK_THROWS_AS(bad.validate(), ConfigError);
  bad = box;
  bad.lower[2] = 11.0;
  CHECK_THROWS_AS(bad.validate(), ConfigError);
}
