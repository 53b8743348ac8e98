#include <cmath>
#include <complex>

#include "doctest.h"
#include "eit/errors.hpp"
#include "eit/experiments.hpp"
#include "eit/lightfield.hpp"
#include "eit/units.hpp"
#include "oracles.hpp"

using namespace eit;
using namespace eit::units;
using oracle::rel_close;

namespace {

FieldSpec cycling_probe(double intensity) {
  FieldSpec f;
  f.lower_manifold = Manifold::S1_2_6;
  f.upper_manifold = Manifold::P3_2_6;
  f.reference_lower = ground(4, 4);
  f.reference_upper = d2(5, 5);
  f.intensity = intensity;
  f.polarization = Polarization::sigma_plus();
  return f;
}

}  // namespace

TEST_SUITE("lightfield") {

TEST_CASE("field amplitude") {
  CHECK(electric_field_amplitude(0.0) == 0.0);
  CHECK(electric_field_amplitude(1e-3) == doctest::Approx(86.8).epsilon(0.05 / 86.8));
  const double ref = std::sqrt(2 * 10.0 / (299792458.0 * 8.8541878128e-12));
  CHECK(rel_close(electric_field_amplitude(1e-3), ref, 1e-12));
  CHECK(rel_close(electric_field_amplitude(4.0), 2 * electric_field_amplitude(1.0), 1e-14));
  CHECK_THROWS_AS(electric_field_amplitude(-1.0), std::domain_error);
}

TEST_CASE("cycling probe Rabi frequency by two routes") {
  const auto reg = cesium_registry(Manifold::P3_2_6);
  const auto field = cycling_probe(12.7e-6);
  const double omega = std::abs(rabi_frequency(field, ground(4, 4), d2(5, 5), reg));
  CHECK(angular_to_mhz(omega) == doctest::Approx(0.40).epsilon(0.01 / 0.40));

  // Saturation route: Omega = Gamma sqrt(s / 2), s = I / I_sat.
  const double gamma = 1.0 / 30.405e-9;
  const double s = 12.7e-6 / 1.1023e-3;
  const double sat_route = gamma * std::sqrt(s / 2);
  CHECK(rel_close(omega, sat_route, 2e-3));

  // Dipole route: the stretched state has one decay channel, so its dipole
  // follows from the lifetime alone.
  const double d = oracle::single_channel_dipole(gamma, 852.347275e-9);
  const double e = std::sqrt(2 * 12.7e-6 * 1e4 / (299792458.0 * 8.8541878128e-12));
  CHECK(rel_close(omega, d * e / 1.054571817e-34, 1e-4));
}

TEST_CASE("zero fields and polarization selection") {
  const auto reg = cesium_registry(Manifold::P3_2_6);
  auto field = cycling_probe(0.0);
  for (const auto& lo : reg.basis()) {
    if (lo.manifold != Manifold::S1_2_6) continue;
    for (const auto& up : reg.basis())
      if (up.manifold == Manifold::P3_2_6) REQUIRE(rabi_frequency(field, lo, up, reg) == complex(0.0));
  }
  field.intensity = 1.0;
  CHECK(rabi_frequency(field, ground(4, 0), d2(4, 0), reg) == complex(0.0));
  CHECK(rabi_frequency(field, ground(4, 0), d2(5, 1), reg) != complex(0.0));
  CHECK(rabi_frequency(field, ground(4, 0), d2(5, 3), reg) == complex(0.0));
}

TEST_CASE("states outside the field manifolds are rejected") {
  const auto reg = cesium_registry(Manifold::P3_2_6);
  const auto field = cycling_probe(1.0);
  CHECK_THROWS_AS(rabi_frequency(field, d2(5, 1), seven_s(4, 1), reg), std::domain_error);
  CHECK_THROWS_AS(hyperfine_dipole_element(ground(4, 0), seven_s(4, 0), 0, reg), std::domain_error);
}

TEST_CASE("global phase leaves |Omega| unchanged") {
  const auto reg = cesium_registry(Manifold::P3_2_6);
  auto field = cycling_probe(1.0);
  field.polarization = Polarization(complex(0.3, 0.1), complex(0.5, -0.2), complex(0.7, 0.4));
  const complex phase = std::polar(1.0, 1.234);
  auto rotated = field;
  rotated.polarization = Polarization(phase * complex(0.3, 0.1), phase * complex(0.5, -0.2),
                                      phase * complex(0.7, 0.4));
  for (auto up : {d2(5, 1), d2(4, 0), d2(3, -1), d2(5, 0)}) {
    const double a = std::abs(rabi_frequency(field, ground(4, 0), up, reg));
    const double b = std::abs(rabi_frequency(rotated, ground(4, 0), up, reg));
    CHECK(rel_close(a, b, 1e-13));
  }
}

TEST_CASE("Omega scales as sqrt(I) over six decades") {
  const auto reg = cesium_registry(Manifold::P3_2_6);
  const double base = std::abs(rabi_frequency(cycling_probe(1e-3), ground(4, 4), d2(5, 5), reg));
  const double other = std::abs(rabi_frequency(cycling_probe(1e-3), ground(4, 0), d2(5, 1), reg));
  for (int k = 0; k <= 6; ++k) {
    const double i = 1e-3 * std::pow(10.0, k);
    const double w = std::abs(rabi_frequency(cycling_probe(i), ground(4, 4), d2(5, 5), reg));
    REQUIRE(rel_close(w, base * std::sqrt(std::pow(10.0, k)), 1e-12));
    const double w2 = std::abs(rabi_frequency(cycling_probe(i), ground(4, 0), d2(5, 1), reg));
    REQUIRE(rel_close(w2 / w, other / base, 1e-12));
  }
  const double ratio = other / base;
  const double dip = std::abs(hyperfine_dipole_element(ground(4, 0), d2(5, 1), 1, reg) /
                              hyperfine_dipole_element(ground(4, 4), d2(5, 5), 1, reg));
  CHECK(rel_close(ratio, dip, 1e-12));
}

TEST_CASE("polarization normalization and admixture") {
  const Polarization p(complex(3, 0), 0.0, complex(0, 4));
  double norm = 0;
  for (auto a : p.amplitudes()) norm += std::norm(a);
  CHECK(norm == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(p.wrong_fraction(1) == doctest::Approx(9.0 / 25).epsilon(1e-14));
  CHECK_THROWS_AS(Polarization(0.0, 0.0, 0.0), ConfigError);

  const auto mix = Polarization::admixed(1, 0, 1e-4);
  CHECK(rel_close(mix.wrong_fraction(1), 1e-4, 1e-12));
  CHECK(rel_close(std::norm(mix.amplitude(0)), 1e-4, 1e-12));
  CHECK(Polarization::admixed(1, 0, 0.0).wrong_fraction(1) == 0.0);
  CHECK_THROWS_AS(Polarization::admixed(1, 1, 0.1), ConfigError);
  CHECK_THROWS_AS(Polarization::admixed(1, 0, 1.5), ConfigError);
}

TEST_CASE("field validation") {
  auto f = cycling_probe(-1.0);
  CHECK_THROWS_AS(f.validate(), ConfigError);
  f.intensity = 1.0;
  CHECK_NOTHROW(f.validate());
  f.reference_upper = seven_s(4, 4);
  CHECK_THROWS_AS(f.validate(), ConfigError);
}

}  // TEST_SUITE
