#include "cartan/forms.hpp"

#include <utility>

namespace cartan {

namespace {

void require_compatible(const DifferentialForm& a, const DifferentialForm& b, const char* op) {
  if (a.dim() != b.dim() || a.extended() != b.extended())
    throw TensorError(std::string(op) + ": forms live on different spaces (" + a.description() +
                      ", " + b.description() + ")");
}

void require_compatible(const VectorField& v, const DifferentialForm& a, const char* op) {
  if (v.dim() != a.dim() || v.extended() != a.extended())
    throw TensorError(std::string(op) + ": field '" + v.description() + "' and form '" +
                      a.description() + "' live on different spaces");
}

// Central difference of a vector-valued function along coordinate i, using the
// realized step (x+h) - (x-h) so parameter rounding cancels.
template <typename F>
Vector central_difference(const F& f, const Point& x, int i, double h) {
  Point xp = x, xm = x;
  xp[i] += h;
  xm[i] -= h;
  const double denom = xp[i] - xm[i];
  return (f(xp) - f(xm)) / denom;
}

template <typename F>
Vector partial(const F& f, const Point& x, int i, const DiffOptions& opts) {
  const double h = fd_step(x[i]);
  if (!opts.richardson) return central_difference(f, x, i, h);
  const Vector coarse = central_difference(f, x, i, h);
  const Vector fine = central_difference(f, x, i, 0.5 * h);
  return (4.0 * fine - coarse) / 3.0;
}

// Alternating sum (da)_J = sum_m (-1)^m ∂_{j_m} a_{J \ j_m}, restricted to
// derivative directions < coords.
AltTensord assemble_derivative(const Matrix& partials, int dim, int degree, int coords) {
  AltTensord out(dim, degree + 1);
  const auto targets = combinations(dim, degree + 1);
  IndexSet rest(degree);
  for (std::size_t r = 0; r < targets.size(); ++r) {
    const IndexSet& J = targets[r];
    double acc = 0.0;
    for (int m = 0; m <= degree; ++m) {
      if (J[m] >= coords) continue;
      int c = 0;
      for (int q = 0; q <= degree; ++q)
        if (q != m) rest[c++] = J[q];
      const double s = (m % 2) ? -1.0 : 1.0;
      acc += s * partials(combination_rank(rest, dim), J[m]);
    }
    out.comps()[r] = acc;
  }
  return out;
}

}  // namespace

VectorField::VectorField(int dim, bool extended, Domain domain, Evaluator eval,
                         std::string description)
    : dim_(dim),
      extended_(extended),
      domain_(std::move(domain)),
      eval_(std::move(eval)),
      description_(std::move(description)) {
  if (dim < 1) throw TensorError("VectorField: dimension must be >= 1");
  if (extended && dim < 2) throw TensorError("VectorField: extended space needs dimension >= 2");
  if (domain_.dim() != dim) throw TensorError("VectorField: domain dimension mismatch");
}

Vector VectorField::operator()(const Point& x) const {
  domain_.require(x, description_);
  Vector v = eval_(x);
  if (v.size() != dim_)
    throw TensorError("VectorField '" + description_ + "': evaluator returned " +
                      std::to_string(v.size()) + " components, expected " + std::to_string(dim_));
  if (!v.allFinite())
    throw DomainError("VectorField '" + description_ + "': non-finite value at " + format_point(x),
                      x);
  return v;
}

DifferentialForm::DifferentialForm(int dim, int degree, bool extended, Domain domain,
                                   Evaluator eval, std::string description)
    : dim_(dim),
      degree_(degree),
      extended_(extended),
      domain_(std::move(domain)),
      eval_(std::move(eval)),
      description_(std::move(description)) {
  if (dim < 1) throw TensorError("DifferentialForm: dimension must be >= 1");
  if (degree < 0 || degree > dim) throw TensorError("DifferentialForm: degree out of range");
  if (extended && dim < 2) throw TensorError("DifferentialForm: extended space needs dimension >= 2");
  if (domain_.dim() != dim) throw TensorError("DifferentialForm: domain dimension mismatch");
}

AltTensord DifferentialForm::operator()(const Point& x) const {
  domain_.require(x, description_);
  AltTensord a = eval_(x);
  if (a.dim() != dim_ || a.degree() != degree_)
    throw TensorError("DifferentialForm '" + description_ + "': evaluator returned (" +
                      std::to_string(a.dim()) + "," + std::to_string(a.degree()) + "), declared (" +
                      std::to_string(dim_) + "," + std::to_string(degree_) + ")");
  if (!a.all_finite())
    throw DomainError("DifferentialForm '" + description_ + "': non-finite value at " +
                          format_point(x),
                      x);
  return a;
}

DifferentialForm constant_form(const AltTensord& value, Domain domain, bool extended,
                               std::string description) {
  return DifferentialForm(value.dim(), value.degree(), extended, std::move(domain),
                          [value](const Point&) { return value; }, std::move(description));
}

DifferentialForm zero_form(int dim, int degree, Domain domain, bool extended) {
  return constant_form(AltTensord(dim, degree), std::move(domain), extended, "0");
}

DifferentialForm scalar_field(int dim, bool extended, Domain domain,
                              std::function<double(const Point&)> f, std::string description) {
  return DifferentialForm(
      dim, 0, extended, std::move(domain),
      [f = std::move(f), dim](const Point& x) { return AltTensord::scalar(dim, f(x)); },
      std::move(description));
}

DifferentialForm one_form(int dim, bool extended, Domain domain,
                          std::function<Vector(const Point&)> comps, std::string description) {
  return DifferentialForm(
      dim, 1, extended, std::move(domain),
      [comps = std::move(comps), dim](const Point& x) { return AltTensord(dim, 1, comps(x)); },
      std::move(description));
}

DifferentialForm coordinate_differential(int i, Domain domain, bool extended) {
  const int dim = domain.dim();
  if (i < 0 || i >= dim) throw TensorError("coordinate_differential: index out of range");
  return constant_form(AltTensord::basis_covector(dim, i), std::move(domain), extended,
                       "dx" + std::to_string(i + 1));
}

DifferentialForm time_differential(Domain domain) {
  const int dim = domain.dim();
  return constant_form(AltTensord::basis_covector(dim, dim - 1), std::move(domain), true, "dt");
}

DifferentialForm flat(const VectorField& v) {
  const int dim = v.dim();
  return DifferentialForm(
      dim, 1, v.extended(), v.domain(),
      [v, dim](const Point& x) { return AltTensord(dim, 1, v(x)); }, "flat(" + v.description() + ")");
}

VectorField constant_field(const Vector& value, Domain domain, bool extended,
                           std::string description) {
  const int dim = static_cast<int>(value.size());
  return VectorField(dim, extended, std::move(domain), [value](const Point&) { return value; },
                     std::move(description));
}

VectorField time_unit_field(Domain domain) {
  const int dim = domain.dim();
  return constant_field(Vector::Unit(dim, dim - 1), std::move(domain), true, "d/dt");
}

DifferentialForm operator+(const DifferentialForm& a, const DifferentialForm& b) {
  require_compatible(a, b, "form sum");
  if (a.degree() != b.degree()) throw TensorError("form sum: degree mismatch");
  return DifferentialForm(
      a.dim(), a.degree(), a.extended(), a.domain(), [a, b](const Point& x) { return a(x) + b(x); },
      "(" + a.description() + " + " + b.description() + ")");
}

DifferentialForm operator-(const DifferentialForm& a, const DifferentialForm& b) {
  require_compatible(a, b, "form difference");
  if (a.degree() != b.degree()) throw TensorError("form difference: degree mismatch");
  return DifferentialForm(
      a.dim(), a.degree(), a.extended(), a.domain(), [a, b](const Point& x) { return a(x) - b(x); },
      "(" + a.description() + " - " + b.description() + ")");
}

DifferentialForm operator*(double s, const DifferentialForm& a) {
  return DifferentialForm(
      a.dim(), a.degree(), a.extended(), a.domain(), [a, s](const Point& x) { return s * a(x); },
      std::to_string(s) + "*" + a.description());
}

DifferentialForm wedge(const DifferentialForm& a, const DifferentialForm& b) {
  require_compatible(a, b, "wedge");
  if (a.degree() + b.degree() > a.dim()) throw TensorError("wedge: degree exceeds dimension");
  return DifferentialForm(
      a.dim(), a.degree() + b.degree(), a.extended(), a.domain(),
      [a, b](const Point& x) { return wedge(a(x), b(x)); },
      "(" + a.description() + " ^ " + b.description() + ")");
}

VectorField operator+(const VectorField& a, const VectorField& b) {
  if (a.dim() != b.dim() || a.extended() != b.extended())
    throw TensorError("field sum: fields live on different spaces");
  return VectorField(
      a.dim(), a.extended(), a.domain(), [a, b](const Point& x) -> Vector { return a(x) + b(x); },
      "(" + a.description() + " + " + b.description() + ")");
}

VectorField operator*(double s, const VectorField& v) {
  return VectorField(
      v.dim(), v.extended(), v.domain(), [v, s](const Point& x) -> Vector { return s * v(x); },
      std::to_string(s) + "*" + v.description());
}

Matrix component_partials(const DifferentialForm& a, const Point& x, int coords,
                          const DiffOptions& opts) {
  auto comps = [&a](const Point& y) -> Vector { return a(y).comps(); };
  Matrix out(binomial(a.dim(), a.degree()), coords);
  for (int i = 0; i < coords; ++i) out.col(i) = partial(comps, x, i, opts);
  return out;
}

DifferentialForm exterior_derivative(const DifferentialForm& a, const DiffOptions& opts) {
  if (a.degree() >= a.dim())
    throw TensorError("exterior_derivative: '" + a.description() +
                      "' is top degree; its derivative is identically zero");
  return DifferentialForm(
      a.dim(), a.degree() + 1, a.extended(), a.domain(),
      [a, opts](const Point& x) {
        return assemble_derivative(component_partials(a, x, a.dim(), opts), a.dim(), a.degree(),
                                   a.dim());
      },
      "d" + a.description());
}

double time_part_magnitude(const DifferentialForm& a, const Point& x) {
  if (!a.extended() || a.degree() == 0) return 0.0;
  return interior(Vector::Unit(a.dim(), a.dim() - 1), a(x)).max_abs();
}

DifferentialForm spatial_exterior_derivative(const DifferentialForm& a, const DiffOptions& opts) {
  if (!a.extended()) throw TensorError("spatial_exterior_derivative: form is not on extended space");
  if (a.degree() >= a.dim() - 1)
    throw TensorError("spatial_exterior_derivative: spatial degree already maximal");
  return DifferentialForm(
      a.dim(), a.degree() + 1, true, a.domain(),
      [a, opts](const Point& x) {
        const AltTensord here = a(x);
        if (here.degree() > 0) {
          const double tp = interior(Vector::Unit(a.dim(), a.dim() - 1), here).max_abs();
          if (tp > 1e-12 * std::max(1.0, here.max_abs()))
            throw TensorError("spatial_exterior_derivative: '" + a.description() +
                              "' has a dt component at " + format_point(x));
        }
        const int n = a.dim() - 1;
        return assemble_derivative(component_partials(a, x, n, opts), a.dim(), a.degree(), n);
      },
      "d^" + a.description());
}

DifferentialForm interior(const VectorField& v, const DifferentialForm& a) {
  require_compatible(v, a, "interior");
  if (a.degree() < 1) throw TensorError("interior: '" + a.description() + "' has degree 0");
  return DifferentialForm(
      a.dim(), a.degree() - 1, a.extended(), a.domain(),
      [v, a](const Point& x) { return interior(v(x), a(x)); },
      "i_" + v.description() + " " + a.description());
}

DifferentialForm lie_derivative(const VectorField& v, const DifferentialForm& a,
                                const DiffOptions& opts) {
  require_compatible(v, a, "lie_derivative");
  if (a.degree() == 0) return interior(v, exterior_derivative(a, opts));
  if (a.degree() == a.dim()) return exterior_derivative(interior(v, a), opts);
  const DifferentialForm ivda = interior(v, exterior_derivative(a, opts));
  const DifferentialForm d_iva = exterior_derivative(interior(v, a), opts);
  return DifferentialForm(
      a.dim(), a.degree(), a.extended(), a.domain(),
      [ivda, d_iva](const Point& x) { return ivda(x) + d_iva(x); },
      "L_" + v.description() + " " + a.description());
}

DifferentialForm time_derivative(const DifferentialForm& a, const DiffOptions& opts) {
  if (!a.extended()) throw TensorError("time_derivative: form is not on extended space");
  return DifferentialForm(
      a.dim(), a.degree(), true, a.domain(),
      [a, opts](const Point& x) {
        auto comps = [&a](const Point& y) -> Vector { return a(y).comps(); };
        return AltTensord(a.dim(), a.degree(), partial(comps, x, a.dim() - 1, opts));
      },
      "L_dt " + a.description());
}

SpatialSplit split_extended(const DifferentialForm& a) {
  if (!a.extended()) throw TensorError("split_extended: form is not on extended space");
  const Domain& dom = a.domain();
  const int dim = a.dim();
  if (a.degree() == 0)
    return {DifferentialForm(dim, 0, true, dom,
                             [dim](const Point&) { return AltTensord::scalar(dim, 0.0); }, "0"),
            a};
  const Vector et = Vector::Unit(dim, dim - 1);
  DifferentialForm s_hat(
      dim, a.degree() - 1, true, dom, [a, et](const Point& x) { return interior(et, a(x)); },
      "s^(" + a.description() + ")");
  const AltTensord dt = AltTensord::basis_covector(dim, dim - 1);
  DifferentialForm r_hat(
      dim, a.degree(), true, dom,
      [a, et, dt](const Point& x) {
        const AltTensord ax = a(x);
        return ax - wedge(dt, interior(et, ax));
      },
      "r^(" + a.description() + ")");
  return {s_hat, r_hat};
}

}  // namespace cartan
