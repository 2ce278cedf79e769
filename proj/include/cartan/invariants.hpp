// Integral-invariant verdicts: absolute (all chains), relative (cycles), and
// equality of cycle integrals around a common tube of solutions in extended
// space.
#ifndef CARTAN_INVARIANTS_HPP_
#define CARTAN_INVARIANTS_HPP_

#include <functional>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "cartan/chain.hpp"
#include "cartan/flow.hpp"

namespace cartan {

inline constexpr double kDefaultDriftTolerance = 1e-5;

class InvariantError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum class InvariantKind { Absolute, Relative, TubeOfSolutions };

std::string to_string(InvariantKind kind);

struct InvariantReport {
  InvariantKind kind = InvariantKind::Absolute;
  std::vector<std::pair<double, double>> samples;  // (t, integral)
  double max_drift = 0.0;
  double tolerance = kDefaultDriftTolerance;
  bool passed = false;
  /// Differential cross-check: max |L_v a| at low-order nodes (absolute),
  /// |∮ L_v a| (relative), or max |i_ξ dσ| at nodes of both cycles (tube).
  double differential_residual = 0.0;
  /// ∫_Σ dσ over the swept tube; only for tube checks with a generated c2.
  std::optional<double> swept_flux;
};

struct InvariantOptions {
  double tolerance = kDefaultDriftTolerance;
  Stepper stepper;
};

/// ∫_{Φ_t(c)} a for every t, drift measured against t = 0.
InvariantReport check_absolute_invariant(const VectorField& v, const DifferentialForm& a,
                                         const Chain& c, const std::vector<double>& ts,
                                         const InvariantOptions& opts = {});

/// As above for a cycle; throws InvariantError naming the failed probe if c is
/// not a cycle.
InvariantReport check_relative_invariant(const VectorField& v, const DifferentialForm& a,
                                         const Chain& cycle, const std::vector<double>& ts,
                                         const InvariantOptions& opts = {});

struct TubeOfSolutionsOptions {
  double tolerance = 1e-6;
  /// i_ξ dσ must stay below this times max(1, |dσ|) at the sample nodes.
  double solution_tolerance = 1e-6;
  Stepper stepper;
};

/// Per-point flow duration used to slide c1 along the integral curves of ξ.
using DurationField = std::function<double(const Point&)>;

/// c2(u) = Φ^ξ_{τ(c1(u))}(c1(u)); also integrates dσ over the swept tube Σ
/// with ∂Σ = c1 - c2 (up to the sides, which cancel for cycles).
InvariantReport check_tube_of_solutions(const VectorField& xi, const DifferentialForm& sigma,
                                        const Chain& c1, const DurationField& duration,
                                        const TubeOfSolutionsOptions& opts = {});

/// Explicit second cycle.
InvariantReport check_tube_of_solutions(const VectorField& xi, const DifferentialForm& sigma,
                                        const Chain& c1, const Chain& c2,
                                        const TubeOfSolutionsOptions& opts = {});

/// Image of c under node-dependent flow durations.
Chain slide_along(const VectorField& xi, const Chain& c, const DurationField& duration,
                  const Stepper& stepper = {});

/// Σ(u, s) = Φ^ξ_{s τ(c(u))}(c(u)), oriented so that ∂Σ = c - slide_along(c).
Chain swept_tube(const VectorField& xi, const Chain& c, const DurationField& duration,
                 const Stepper& stepper = {});

/// Points of c at a tensor grid of `per_axis` Gauss nodes per cell.
std::vector<Point> chain_samples(const Chain& c, int per_axis = 3);

}  // namespace cartan

#endif  // CARTAN_INVARIANTS_HPP_
