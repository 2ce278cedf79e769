#include "cartan/flow.hpp"

#include <cmath>

namespace cartan {

int Stepper::steps_for(double t) const {
  const double at = std::abs(t);
  if (at == 0.0) return 0;
  const double h = std::min(max_step, at / min_steps);
  if (!(h > 0.0) || !std::isfinite(h)) throw FlowError("flow: step size underflow", Point());
  return static_cast<int>(std::ceil(at / h - 1e-9));
}

Point advect_point(const VectorField& v, const Point& x, double t, const Stepper& stepper) {
  if (x.size() != v.dim())
    throw TensorError("advect_point: point dimension does not match field '" + v.description() +
                      "'");
  const int steps = stepper.steps_for(t);
  if (steps == 0) {
    v.domain().require(x, v.description());
    return x;
  }
  const double h = t / steps;
  Point y = x;
  try {
    for (int s = 0; s < steps; ++s) {
      const Vector k1 = v(y);
      const Vector k2 = v(y + 0.5 * h * k1);
      const Vector k3 = v(y + 0.5 * h * k2);
      const Vector k4 = v(y + h * k3);
      y += (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    }
    if (v.extended()) {
      // ṫ = 1: the time coordinate advances by exactly t.
      y[y.size() - 1] = x[x.size() - 1] + t;
    }
    v.domain().require(y, v.description());
  } catch (const FlowError&) {
    throw;
  } catch (const DomainError& e) {
    throw FlowError("flow of '" + v.description() + "' from " + format_point(x) +
                        " left its domain near " + format_point(e.where()) + ": " + e.what(),
                    e.where());
  }
  return y;
}

Point FlowMap::operator()(const Point& x) const {
  return advect_point(field_, x, duration_, stepper_);
}

Trajectory trajectory(const VectorField& v, const Point& x, double t, int samples,
                      const Stepper& stepper) {
  if (samples < 1) throw TensorError("trajectory: need at least one sample interval");
  Trajectory tr;
  tr.times.push_back(0.0);
  tr.points.push_back(x);
  const double dt = t / samples;
  for (int i = 1; i <= samples; ++i) {
    tr.points.push_back(advect_point(v, tr.points.back(), dt, stepper));
    tr.times.push_back(i * dt);
  }
  return tr;
}

Matrix flow_map_jacobian(const VectorField& v, const Point& x, double t, const Stepper& stepper) {
  const int n = v.dim();
  Matrix jac(n, n);
  for (int i = 0; i < n; ++i) {
    Point xp = x, xm = x;
    const double h = fd_step(x[i]);
    xp[i] += h;
    xm[i] -= h;
    jac.col(i) = (advect_point(v, xp, t, stepper) - advect_point(v, xm, t, stepper)) / (xp[i] - xm[i]);
  }
  return jac;
}

Chain advect_chain(const VectorField& v, const Chain& c, double t, const Stepper& stepper) {
  if (c.ambient_dim() != v.dim()) throw TensorError("advect_chain: dimension mismatch");
  return c.mapped([v, t, stepper](const Point& x) { return advect_point(v, x, t, stepper); });
}

DifferentialForm pullback(const FlowMap& phi, const DifferentialForm& a) {
  if (phi.field().dim() != a.dim()) throw TensorError("pullback: dimension mismatch");
  return DifferentialForm(
      a.dim(), a.degree(), a.extended(), a.domain(),
      [phi, a](const Point& x) {
        const Point y = phi(x);
        if (a.degree() == 0) return a(y);
        return pullback(a(y), flow_map_jacobian(phi.field(), x, phi.duration(), phi.stepper()));
      },
      "pullback(" + a.description() + ")");
}

}  // namespace cartan
