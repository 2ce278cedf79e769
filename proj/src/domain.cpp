#include "cartan/domain.hpp"

#include <cstdio>

namespace cartan {

std::string format_point(const Point& x) {
  std::string s = "(";
  char buf[32];
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    std::snprintf(buf, sizeof buf, "%.9g", x[i]);
    if (i) s += ", ";
    s += buf;
  }
  return s + ")";
}

void Domain::require(const Point& x, const std::string& who) const {
  if (x.size() != lower_.size())
    throw DomainError(who + ": point dimension " + std::to_string(x.size()) +
                          " does not match domain dimension " + std::to_string(lower_.size()),
                      x);
  if (!x.allFinite()) throw DomainError(who + ": non-finite point " + format_point(x), x);
  if (!in_box(x)) throw DomainError(who + ": point " + format_point(x) + " outside domain box", x);
  for (const auto& e : exclusions_)
    if (e.contains(x))
      throw DomainError(who + ": point " + format_point(x) + " inside excluded region '" +
                            e.name + "'",
                        x);
}

Domain Domain::extended(double t_lo, double t_hi) const {
  const int n = dim();
  Point lo(n + 1), hi(n + 1);
  lo << lower_, t_lo;
  hi << upper_, t_hi;
  Domain out(lo, hi);
  for (const auto& e : exclusions_) {
    auto inner = e.contains;
    out.exclude({e.name, [inner, n](const Point& p) { return inner(p.head(n)); }});
  }
  return out;
}

}  // namespace cartan
