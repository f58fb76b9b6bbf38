#ifndef WHICHPATH_TESTS_HELPERS_HPP
#define WHICHPATH_TESTS_HELPERS_HPP

#include <cmath>
#include <complex>
#include <random>

#include "doctest.h"
#include "whichpath/joint_state.hpp"

namespace testing {

inline void check_close(double actual, double expected, double tol) {
  INFO("actual = ", actual, ", expected = ", expected);
  CHECK(std::abs(actual - expected) <= tol);
}

inline void check_close(std::complex<double> actual, std::complex<double> expected, double tol) {
  INFO("actual = ", actual.real(), "+", actual.imag(), "i, expected = ", expected.real(), "+", expected.imag(), "i");
  CHECK(std::abs(actual - expected) <= tol);
}

inline whichpath::JointState random_atom_state(std::mt19937_64& rng) {
  std::normal_distribution<double> n;
  whichpath::JointState s;
  s(whichpath::Atom::ground, 0, 0) = {n(rng), n(rng)};
  s(whichpath::Atom::excited, 0, 0) = {n(rng), n(rng)};
  const double norm = s.norm();
  s(whichpath::Atom::ground, 0, 0) /= norm;
  s(whichpath::Atom::excited, 0, 0) /= norm;
  return s;
}

}  // namespace testing

#endif
