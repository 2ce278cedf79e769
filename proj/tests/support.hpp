// Shared fixtures for the unit tests: random analytic forms and a few
// closed-form fields.
#ifndef CARTAN_TESTS_SUPPORT_HPP_
#define CARTAN_TESTS_SUPPORT_HPP_

#include <cmath>
#include <random>
#include <vector>

#include "cartan/chain.hpp"
#include "cartan/flow.hpp"
#include "cartan/forms.hpp"

namespace cartan::testing {

/// One smooth scalar: polynomial of degree <= 2 times a trigonometric factor.
struct AnalyticScalar {
  double c0 = 0.0;
  Vector lin;
  Matrix quad;
  Vector freq;
  double phase = 0.0;
  double amp = 0.0;

  double operator()(const Point& x) const {
    const double poly = c0 + lin.dot(x) + x.dot(quad * x);
    return poly * (1.0 + amp * std::sin(freq.dot(x) + phase));
  }
};

inline AnalyticScalar random_scalar(int n, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  AnalyticScalar s;
  s.c0 = u(rng);
  s.lin = Vector::NullaryExpr(n, [&] { return u(rng); });
  s.quad = 0.5 * Matrix::NullaryExpr(n, n, [&] { return u(rng); });
  s.freq = Vector::NullaryExpr(n, [&] { return u(rng); });
  s.phase = u(rng);
  s.amp = 0.5 * u(rng);
  return s;
}

inline DifferentialForm random_form(int n, int k, std::mt19937_64& rng, bool extended = false,
                                    double half_width = 10.0) {
  std::vector<AnalyticScalar> comps;
  for (int i = 0; i < binomial(n, k); ++i) comps.push_back(random_scalar(n, rng));
  return DifferentialForm(
      n, k, extended, Domain(n, half_width),
      [n, k, comps](const Point& x) {
        AltTensord a(n, k);
        for (std::size_t i = 0; i < comps.size(); ++i) a.comps()[static_cast<Eigen::Index>(i)] = comps[i](x);
        return a;
      },
      "random");
}

inline VectorField random_field(int n, std::mt19937_64& rng, bool extended = false,
                                double half_width = 10.0) {
  std::vector<AnalyticScalar> comps;
  for (int i = 0; i < n; ++i) comps.push_back(random_scalar(n, rng));
  return VectorField(
      n, extended, Domain(n, half_width),
      [n, comps](const Point& x) {
        Vector v(n);
        for (int i = 0; i < n; ++i) v[i] = comps[static_cast<std::size_t>(i)](x);
        return v;
      },
      "random");
}

inline Point random_point(int n, std::mt19937_64& rng, double r = 1.0) {
  std::uniform_real_distribution<double> u(-r, r);
  return Vector::NullaryExpr(n, [&] { return u(rng); });
}

inline VectorField abc_field(double half_width = 20.0) {
  return VectorField(
      3, false, Domain(3, half_width),
      [](const Point& x) {
        return make_vec({std::sin(x[2]) + std::cos(x[1]), std::sin(x[0]) + std::cos(x[2]),
                         std::sin(x[1]) + std::cos(x[0])});
      },
      "abc");
}

inline VectorField rotation_field(int n = 3, double omega = 1.0) {
  return VectorField(
      n, false, Domain(n, 100.0),
      [n, omega](const Point& x) {
        Vector v = Vector::Zero(n);
        v[0] = -omega * x[1];
        v[1] = omega * x[0];
        return v;
      },
      "rotation");
}

inline double max_abs_diff(const AltTensord& a, const AltTensord& b) { return (a - b).max_abs(); }

}  // namespace cartan::testing

#endif  // CARTAN_TESTS_SUPPORT_HPP_
