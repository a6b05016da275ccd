#include <cmath>

#include "doctest.h"
#include "ductmc/error.hpp"
#include "ductmc/transport.hpp"
#include "test_util.hpp"

using namespace ductmc;
using ductmc::testutil::thrown_code;

namespace {

VesselGeometry geom(double radius, double length) {
  VesselGeometry g;
  g.radius_um = radius;
  g.length_um = length;
  return g;
}

FlowProfile flow_of(FlowKind kind, double v) {
  FlowProfile f;
  f.kind = kind;
  f.mean_velocity_um_s = v;
  return f;
}

}  // namespace

TEST_CASE("uniform flow velocity is radius independent") {
  const VesselGeometry g = geom(30.0, 2000.0);
  const FlowProfile f = flow_of(FlowKind::Uniform, 5000.0);
  CHECK(velocity_at(f, g, 0.0) == doctest::Approx(5000.0));
  CHECK(velocity_at(f, g, 17.3) == doctest::Approx(5000.0));
  CHECK(velocity_at(f, g, 30.0) == doctest::Approx(5000.0));
}

TEST_CASE("poiseuille profile hits its landmarks") {
  const VesselGeometry g = geom(30.0, 2000.0);
  const FlowProfile f = flow_of(FlowKind::Poiseuille, 5000.0);
  CHECK(velocity_at(f, g, 0.0) == doctest::Approx(10000.0));
  CHECK(velocity_at(f, g, 30.0) == doctest::Approx(0.0).epsilon(1e-12));
  // r = R/sqrt(2) recovers the mean velocity.
  CHECK(velocity_at(f, g, 30.0 / std::sqrt(2.0)) == doctest::Approx(5000.0));
}

TEST_CASE("velocity outside the duct is rejected") {
  const VesselGeometry g = geom(30.0, 2000.0);
  const FlowProfile f = flow_of(FlowKind::Poiseuille, 5000.0);
  CHECK(thrown_code([&] { velocity_at(f, g, 30.0001); }) == "RadialOutOfRange");
}

TEST_CASE("no flow means zero velocity everywhere") {
  const VesselGeometry g = geom(30.0, 2000.0);
  const FlowProfile f = flow_of(FlowKind::None, 0.0);
  CHECK(velocity_at(f, g, 12.0) == doctest::Approx(0.0));
}

TEST_CASE("poiseuille cross-section average equals the mean velocity") {
  const VesselGeometry g = geom(30.0, 2000.0);
  const FlowProfile f = flow_of(FlowKind::Poiseuille, 5000.0);
  // Area-weighted midpoint quadrature of v(r) over the disc.
  const int n = 20000;
  const double R = g.radius_um;
  double sum = 0.0;
  for (int i = 0; i < n; ++i) {
    const double r = (i + 0.5) / n * R;
    sum += velocity_at(f, g, r) * 2.0 * M_PI * r * (R / n);
  }
  const double mean = sum / (M_PI * R * R);
  CHECK(mean == doctest::Approx(5000.0).epsilon(1e-6));
}

TEST_CASE("peclet number reference values") {
  CHECK(peclet(30.0, 5000.0, 670.0) == doctest::Approx(223.8806).epsilon(1e-4 / 223.0));
  CHECK(peclet(60.0, 5000.0, 670.0) == doctest::Approx(447.7612).epsilon(1e-4));
  CHECK(peclet(30.0, 0.0, 670.0) == doctest::Approx(0.0));
}

TEST_CASE("dispersion factor reference values") {
  const double pe = peclet(30.0, 5000.0, 670.0);
  CHECK(dispersion_factor(2000.0, pe, 30.0) == doctest::Approx(0.2978).epsilon(0.001 / 0.2978));
  CHECK(dispersion_factor(4000.0, pe, 30.0) == doctest::Approx(0.59553).epsilon(0.002 / 0.59553));
  // L = Pe * R sits exactly on the regime boundary.
  CHECK(dispersion_factor(pe * 30.0, pe, 30.0) == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(thrown_code([] { dispersion_factor(2000.0, 0.0, 30.0); }) == "ZeroPeclet");
}

TEST_CASE("regime classification covers all three branches") {
  MoleculeSpecies sp;
  sp.species_id = 0;
  sp.diffusion_um2_s = 670.0;

  SUBCASE("vein-like duct is poiseuille dominated") {
    const DimensionlessReport rep =
        classify_flow_regime(geom(30.0, 2000.0), flow_of(FlowKind::Poiseuille, 5000.0), sp);
    CHECK(rep.regime == FlowRegime::PoiseuilleDominated);
    CHECK(rep.peclet == doctest::Approx(223.8806).epsilon(1e-6));
    REQUIRE(rep.dispersion_factor.has_value());
    CHECK(*rep.dispersion_factor == doctest::Approx(0.2978).epsilon(0.01));
  }

  SUBCASE("zero velocity is pure diffusion with no dispersion factor") {
    const DimensionlessReport rep =
        classify_flow_regime(geom(30.0, 2000.0), flow_of(FlowKind::None, 0.0), sp);
    CHECK(rep.regime == FlowRegime::PureDiffusion);
    CHECK(rep.peclet == doctest::Approx(0.0));
    CHECK_FALSE(rep.dispersion_factor.has_value());
  }

  SUBCASE("long narrow duct with weak flow is uniform dispersive") {
    const DimensionlessReport rep =
        classify_flow_regime(geom(4.0, 60000.0), flow_of(FlowKind::Uniform, 100.0), sp);
    CHECK(rep.regime == FlowRegime::UniformDispersive);
    REQUIRE(rep.dispersion_factor.has_value());
    CHECK(*rep.dispersion_factor > 1.0);
  }
}

TEST_CASE("regime names are stable") {
  CHECK(std::string(to_string(FlowRegime::PureDiffusion)) == "PureDiffusion");
  CHECK(std::string(to_string(FlowRegime::PoiseuilleDominated)) == "PoiseuilleDominated");
  CHECK(std::string(to_string(FlowRegime::UniformDispersive)) == "UniformDispersive");
}

TEST_CASE("brownian step has the advertised moments") {
  VesselGeometry g = geom(30.0, 2000.0);
  MoleculeSpecies sp;
  sp.species_id = 0;
  sp.diffusion_um2_s = 670.0;
  const double dt = 1e-3;

  SUBCASE("no flow: zero-mean increments with variance 2*D*dt per axis") {
    const FlowProfile f = flow_of(FlowKind::None, 0.0);
    RngStream rng(11, 0);
    const int n = 100000;
    double sx = 0, sy = 0, sz = 0, sxx = 0, syy = 0, szz = 0;
    for (int i = 0; i < n; ++i) {
      const Vec3 origin{100.0, 3.0, -4.0};
      const Segment seg = brownian_step(origin, sp, f, g, dt, rng);
      const double dx = seg.end.x - origin.x;
      const double dy = seg.end.y - origin.y;
      const double dz = seg.end.z - origin.z;
      sx += dx; sy += dy; sz += dz;
      sxx += dx * dx; syy += dy * dy; szz += dz * dz;
      CHECK(seg.start.x == origin.x);
    }
    const double var = 2.0 * 670.0 * dt;  // 1.34 um^2
    CHECK(sxx / n == doctest::Approx(var).epsilon(0.03));
    CHECK(syy / n == doctest::Approx(var).epsilon(0.03));
    CHECK(szz / n == doctest::Approx(var).epsilon(0.03));
    const double se = std::sqrt(var / n) * 4.0;
    CHECK(std::abs(sx / n) < se);
    CHECK(std::abs(sy / n) < se);
    CHECK(std::abs(sz / n) < se);
  }

  SUBCASE("uniform flow shifts the axial mean by v*dt") {
    const FlowProfile f = flow_of(FlowKind::Uniform, 5000.0);
    RngStream rng(12, 0);
    const int n = 100000;
    double sx = 0;
    for (int i = 0; i < n; ++i) {
      const Vec3 origin{100.0, 0.0, 0.0};
      const Segment seg = brownian_step(origin, sp, f, g, dt, rng);
      sx += seg.end.x - origin.x;
    }
    const double drift = 5000.0 * dt;  // 5 um
    const double se = std::sqrt(2.0 * 670.0 * dt / n) * 4.0;
    CHECK(std::abs(sx / n - drift) < se);
  }

  SUBCASE("poiseuille advection is evaluated at the step start radius") {
    const FlowProfile f = flow_of(FlowKind::Poiseuille, 5000.0);
    // At the wall the local velocity vanishes, so the axial mean is zero.
    RngStream rng(13, 0);
    const int n = 100000;
    double sx = 0;
    for (int i = 0; i < n; ++i) {
      const Vec3 origin{100.0, 30.0, 0.0};
      const Segment seg = brownian_step(origin, sp, f, g, dt, rng);
      sx += seg.end.x - origin.x;
    }
    const double se = std::sqrt(2.0 * 670.0 * dt / n) * 4.0;
    CHECK(std::abs(sx / n) < se);
  }
}
