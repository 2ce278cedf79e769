// Flow maps of vector fields: fixed-step RK4 point advection, flow-map
// Jacobians, lazy chain advection, and pullback of forms.
#ifndef CARTAN_FLOW_HPP_
#define CARTAN_FLOW_HPP_

#include <vector>

#include "cartan/chain.hpp"
#include "cartan/forms.hpp"

namespace cartan {

/// Trajectory left the domain (or the step size underflowed).
class FlowError : public DomainError {
 public:
  using DomainError::DomainError;
};

/// Fixed RK4 step h = min(max_step, |t| / min_steps).
struct Stepper {
  double max_step = 1e-3;
  int min_steps = 100;

  int steps_for(double t) const;
};

class FlowMap {
 public:
  FlowMap(VectorField field, double duration, Stepper stepper = {})
      : field_(std::move(field)), duration_(duration), stepper_(stepper) {}

  const VectorField& field() const { return field_; }
  double duration() const { return duration_; }
  const Stepper& stepper() const { return stepper_; }

  Point operator()(const Point& x) const;

 private:
  VectorField field_;
  double duration_;
  Stepper stepper_;
};

struct Trajectory {
  std::vector<double> times;
  std::vector<Point> points;
};

Point advect_point(const VectorField& v, const Point& x, double t, const Stepper& stepper = {});

/// Samples Φ_s(x) at `samples` + 1 equally spaced s in [0, t].
Trajectory trajectory(const VectorField& v, const Point& x, double t, int samples,
                      const Stepper& stepper = {});

/// Central-difference Jacobian of Φ_t at x.
Matrix flow_map_jacobian(const VectorField& v, const Point& x, double t,
                         const Stepper& stepper = {});

/// Φ_t(c): each cell map composed with the flow, evaluated lazily.
Chain advect_chain(const VectorField& v, const Chain& c, double t, const Stepper& stepper = {});

/// (Φ*a)_x(u, ...) = a_{Φ(x)}(DΦ u, ...).
DifferentialForm pullback(const FlowMap& phi, const DifferentialForm& a);

}  // namespace cartan

#endif  // CARTAN_FLOW_HPP_
