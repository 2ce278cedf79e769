// Differential forms and vector fields on R^n and on R^n x R, plus the
// exterior calculus acting on them (d, interior product, Lie derivative,
// spatial/time splitting on extended space).
//
// Fields are immutable values wrapping an evaluator closure; composite forms
// re-evaluate their operands on every call. Derivatives are central
// differences with per-coordinate step max(1e-5, 1e-5 |x_i|).
#ifndef CARTAN_FORMS_HPP_
#define CARTAN_FORMS_HPP_

#include <functional>
#include <string>

#include "cartan/domain.hpp"
#include "cartan/tensor.hpp"

namespace cartan {

struct DiffOptions {
  /// Combine steps h and h/2 as (4 D(h/2) - D(h)) / 3.
  bool richardson = false;
};

inline double fd_step(double xi) { return std::max(1e-5, 1e-5 * std::abs(xi)); }

class VectorField {
 public:
  using Evaluator = std::function<Vector(const Point&)>;

  VectorField() = default;
  VectorField(int dim, bool extended, Domain domain, Evaluator eval, std::string description);

  /// Number of ambient coordinates (n, or n + 1 on extended space).
  int dim() const { return dim_; }
  int spatial_dim() const { return extended_ ? dim_ - 1 : dim_; }
  bool extended() const { return extended_; }
  const Domain& domain() const { return domain_; }
  const std::string& description() const { return description_; }

  Vector operator()(const Point& x) const;
  Vector operator()(const ExtendedPoint& x) const { return (*this)(x.flatten()); }

  /// Same field, evaluator called without domain checks by the caller.
  const Evaluator& evaluator() const { return eval_; }

 private:
  int dim_ = 0;
  bool extended_ = false;
  Domain domain_;
  Evaluator eval_;
  std::string description_;
};

class DifferentialForm {
 public:
  using Evaluator = std::function<AltTensord(const Point&)>;

  DifferentialForm() = default;
  DifferentialForm(int dim, int degree, bool extended, Domain domain, Evaluator eval,
                   std::string description);

  int dim() const { return dim_; }
  int spatial_dim() const { return extended_ ? dim_ - 1 : dim_; }
  int degree() const { return degree_; }
  bool extended() const { return extended_; }
  const Domain& domain() const { return domain_; }
  const std::string& description() const { return description_; }

  AltTensord operator()(const Point& x) const;
  AltTensord operator()(const ExtendedPoint& x) const { return (*this)(x.flatten()); }

  /// Value of a 0-form.
  double scalar(const Point& x) const { return (*this)(x).value(); }

 private:
  int dim_ = 0;
  int degree_ = 0;
  bool extended_ = false;
  Domain domain_;
  Evaluator eval_;
  std::string description_;
};

/// dt∧ŝ + r̂ with both parts free of dt.
struct SpatialSplit {
  DifferentialForm s_hat;
  DifferentialForm r_hat;
};

// --- construction ----------------------------------------------------------

DifferentialForm constant_form(const AltTensord& value, Domain domain, bool extended = false,
                               std::string description = "const");
DifferentialForm zero_form(int dim, int degree, Domain domain, bool extended = false);
DifferentialForm scalar_field(int dim, bool extended, Domain domain,
                              std::function<double(const Point&)> f, std::string description);
DifferentialForm one_form(int dim, bool extended, Domain domain,
                          std::function<Vector(const Point&)> comps, std::string description);
/// dx^i on a domain of the given dimension.
DifferentialForm coordinate_differential(int i, Domain domain, bool extended = false);
/// dt on extended space (last coordinate).
DifferentialForm time_differential(Domain domain);

/// Euclidean index lowering: the 1-form with the field's components.
DifferentialForm flat(const VectorField& v);

VectorField constant_field(const Vector& value, Domain domain, bool extended = false,
                           std::string description = "const");
/// ∂_t on extended space.
VectorField time_unit_field(Domain domain);

// --- algebra ---------------------------------------------------------------

DifferentialForm operator+(const DifferentialForm& a, const DifferentialForm& b);
DifferentialForm operator-(const DifferentialForm& a, const DifferentialForm& b);
DifferentialForm operator*(double s, const DifferentialForm& a);
DifferentialForm wedge(const DifferentialForm& a, const DifferentialForm& b);

VectorField operator+(const VectorField& a, const VectorField& b);
VectorField operator*(double s, const VectorField& v);

// --- calculus --------------------------------------------------------------

/// Partial derivatives of every component: column i holds ∂_i comps.
Matrix component_partials(const DifferentialForm& a, const Point& x, int coords,
                          const DiffOptions& opts = {});

DifferentialForm exterior_derivative(const DifferentialForm& a, const DiffOptions& opts = {});
inline DifferentialForm d(const DifferentialForm& a, const DiffOptions& opts = {}) {
  return exterior_derivative(a, opts);
}

/// d̂: differentiates along the spatial coordinates only. Input must be spatial.
DifferentialForm spatial_exterior_derivative(const DifferentialForm& a,
                                             const DiffOptions& opts = {});

DifferentialForm interior(const VectorField& v, const DifferentialForm& a);

/// Cartan's formula i_v d a + d i_v a.
DifferentialForm lie_derivative(const VectorField& v, const DifferentialForm& a,
                                const DiffOptions& opts = {});

/// Componentwise ∂_t of an extended form (the Lie derivative along ∂_t in
/// adapted coordinates).
DifferentialForm time_derivative(const DifferentialForm& a, const DiffOptions& opts = {});

SpatialSplit split_extended(const DifferentialForm& a);

/// Largest |i_{∂t} a| component; zero for spatial forms.
double time_part_magnitude(const DifferentialForm& a, const Point& x);

}  // namespace cartan

#endif  // CARTAN_FORMS_HPP_
