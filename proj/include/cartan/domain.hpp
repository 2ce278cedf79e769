// Points, validity domains, and the error types shared by the field modules.
#ifndef CARTAN_DOMAIN_HPP_
#define CARTAN_DOMAIN_HPP_

#include <functional>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "cartan/tensor.hpp"

namespace cartan {

/// A point of M = R^n. Extended points store the time coordinate last.
using Point = Eigen::VectorXd;
using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

struct ExtendedPoint {
  Point spatial;
  double time = 0.0;

  ExtendedPoint() = default;
  ExtendedPoint(Point x, double t) : spatial(std::move(x)), time(t) {}

  /// Coordinates (x^1, ..., x^n, t).
  Point flatten() const {
    Point p(spatial.size() + 1);
    p << spatial, time;
    return p;
  }

  static ExtendedPoint from_flat(const Point& p) {
    return {p.head(p.size() - 1), p[p.size() - 1]};
  }
};

inline Point make_point(std::initializer_list<double> xs) { return make_vec(xs); }

/// Evaluation outside the declared validity region.
class DomainError : public std::runtime_error {
 public:
  DomainError(const std::string& what, Point where)
      : std::runtime_error(what), where_(std::move(where)) {}
  const Point& where() const { return where_; }

 private:
  Point where_;
};

/// A region removed from the box, e.g. a shell around a discontinuity.
struct Exclusion {
  std::string name;
  std::function<bool(const Point&)> contains;
};

/// Axis-aligned validity box minus optional exclusions.
class Domain {
 public:
  Domain() = default;
  explicit Domain(int dim, double half_width = 1e6)
      : lower_(Point::Constant(dim, -half_width)), upper_(Point::Constant(dim, half_width)) {}
  Domain(Point lower, Point upper) : lower_(std::move(lower)), upper_(std::move(upper)) {}

  int dim() const { return static_cast<int>(lower_.size()); }
  const Point& lower() const { return lower_; }
  const Point& upper() const { return upper_; }
  const std::vector<Exclusion>& exclusions() const { return exclusions_; }

  Domain& exclude(Exclusion e) {
    exclusions_.push_back(std::move(e));
    return *this;
  }

  bool in_box(const Point& x) const {
    if (x.size() != lower_.size()) return false;
    return (x.array() >= lower_.array()).all() && (x.array() <= upper_.array()).all();
  }

  bool contains(const Point& x) const {
    if (!in_box(x)) return false;
    for (const auto& e : exclusions_)
      if (e.contains(x)) return false;
    return true;
  }

  void require(const Point& x, const std::string& who) const;

  /// Extend a spatial domain by a time interval (time last).
  Domain extended(double t_lo, double t_hi) const;

 private:
  Point lower_;
  Point upper_;
  std::vector<Exclusion> exclusions_;
};

std::string format_point(const Point& x);

}  // namespace cartan

#endif  // CARTAN_DOMAIN_HPP_
