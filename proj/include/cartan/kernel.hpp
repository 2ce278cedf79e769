// The distribution D = ker(w -> i_w dα), optionally intersected with the
// kernels of constraint 1-forms (e.g. dt on extended space): pointwise frames
// via SVD, rank/dimension reports, Frobenius residuals, and tracing of its
// integral curves and surfaces.
#ifndef CARTAN_KERNEL_HPP_
#define CARTAN_KERNEL_HPP_

#include <optional>
#include <string>
#include <vector>

#include "cartan/chain.hpp"
#include "cartan/flow.hpp"
#include "cartan/forms.hpp"

namespace cartan {

/// Singular values below tau * sigma_max count as zero.
inline constexpr double kRankTolerance = 1e-8;
/// A form whose largest singular value is below this is treated as vanishing.
inline constexpr double kDegenerateThreshold = 1e-8;

class KernelError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

using Constraints = std::vector<DifferentialForm>;

struct KernelFrame {
  Point point;
  Matrix basis;                         // orthonormal columns spanning D
  int rank_form = 0;                    // numerical rank of dα alone
  int constraint_rank = 0;              // rank added by the constraint rows
  std::vector<double> singular_values;  // of w -> i_w dα, descending
  bool degenerate = false;              // dα numerically zero at the point

  int dim() const { return static_cast<int>(basis.cols()); }
  int ambient_dim() const { return static_cast<int>(point.size()); }
};

KernelFrame kernel_of(const AltTensord& dalpha, const std::vector<AltTensord>& constraints,
                      double tau = kRankTolerance);

KernelFrame kernel_at(const DifferentialForm& dalpha, const Point& x,
                      const Constraints& constraints = {}, double tau = kRankTolerance);

struct DimensionReport {
  int ambient_dim = 0;
  int form_degree = 0;  // degree of dα, i.e. k + 1
  std::vector<Point> points;
  std::vector<int> ranks;
  std::vector<int> kernel_dims;
  std::vector<std::vector<double>> spectra;
  bool constant_rank = true;
  int rank = 0;            // rank at the first sample
  int dim_d = 0;           // kernel dimension at the first sample
  int bound = 0;           // dim M - (k + 1) for unconstrained kernels
  bool bound_satisfied = true;
  bool bound_equality = false;
};

DimensionReport dimension_report(const DifferentialForm& dalpha, const std::vector<Point>& points,
                                 const Constraints& constraints = {}, double tau = kRankTolerance);

/// Smooth local frame of D near a seed: projections of the seed basis onto
/// D(y), orthonormalized in order. Throws KernelError on a rank change.
class KernelFrameField {
 public:
  KernelFrameField(DifferentialForm dalpha, const Point& seed, Constraints constraints = {},
                   double tau = kRankTolerance);

  Matrix operator()(const Point& y) const;
  int dim() const { return static_cast<int>(seed_basis_.cols()); }
  const Matrix& seed_basis() const { return seed_basis_; }
  VectorField column(int j) const;

 private:
  DifferentialForm dalpha_;
  Constraints constraints_;
  double tau_;
  Matrix seed_basis_;
};

/// Unit field spanning the projection of `hint` onto D.
VectorField kernel_field(const DifferentialForm& dalpha, const Vector& hint,
                         const Constraints& constraints = {}, double tau = kRankTolerance);

/// Max over frame pairs of the part of [w_i, w_j](x) orthogonal to D(x).
/// Zero when dim D <= 1.
double frobenius_residual(const DifferentialForm& dalpha, const Point& x,
                          const Constraints& constraints = {}, double tau = kRankTolerance);

struct VortexLine {
  std::vector<Point> nodes;
  std::vector<double> arc;
  std::vector<Vector> tangents;         // unit kernel directions used at the nodes
  std::vector<double> node_residuals;   // |i_t dα| / |dα|
  double residual = 0.0;
  bool complete = true;
  std::string stop_reason;
};

struct TraceOptions {
  double step = 5e-3;  // arc-length step
  double tau = kRankTolerance;
  Constraints constraints;
  /// Initial orientation; the kernel direction at the seed is flipped to have
  /// positive inner product with it. Defaults to the largest component positive.
  std::optional<Vector> orientation;
};

/// Arc-length RK4 integral curve of the unit kernel field of a rank-(n-1) form.
/// direction = -1 traces against the orientation.
VortexLine trace_vortex_line(const DifferentialForm& dalpha, const Point& seed, double length,
                             int direction = 1, const TraceOptions& opts = {});

struct LineMotionReport {
  double hausdorff = 0.0;       // max over advected nodes of distance to the retraced line
  double residual = 0.0;        // max |i_{DΦ t} dα| / (|dα| |DΦ t|) along the advected line
  double lie_residual = 0.0;    // max |L_v dα| found by the precondition
  VortexLine original;
  std::vector<Point> advected;  // path A: original nodes pushed by Φ_t
  VortexLine retraced;          // path B: traced at Φ_t(seed)
};

struct LineMotionOptions {
  double length = 1.0;
  double lie_tol = 1e-4;  // relative to max(1, |dα|)
  TraceOptions trace;
  Stepper stepper;
};

/// Helmholtz line check: trace-then-advect versus advect-then-trace.
LineMotionReport check_lines_move_with_fluid(const VectorField& v, const DifferentialForm& dalpha,
                                             const Point& seed, double t,
                                             const LineMotionOptions& opts = {});

struct TubeSpec {
  Chain seed_cycle;   // c1 = ∂S1
  Chain transversal;  // S1
  VectorField along;  // W with i_W dα = 0
};

struct TubeReport {
  double flux_start = 0.0;
  double flux_end = 0.0;
  double difference = 0.0;
  double kernel_residual = 0.0;  // max |i_W dα| / |dα| on S1 samples
  double boundary_mismatch = 0.0;
  bool passed = false;
  double tolerance = 0.0;
  Chain end_section;
};

/// Fluxes of dα through S1 and S2 = Φ^W_s(S1).
TubeReport check_tube_strength(const DifferentialForm& dalpha, const TubeSpec& tube, double s,
                               double tol = 1e-7, const Constraints& constraints = {},
                               const Stepper& stepper = {});

struct SurfaceMesh {
  int dim = 0;
  std::vector<int> shape;                  // nodes per parameter axis
  std::vector<Vector> params;
  std::vector<Point> points;
  std::vector<std::vector<Vector>> tangents;  // per node, one per axis
  std::vector<double> residuals;
  double max_residual = 0.0;
  bool complete = true;
  std::string stop_reason;
};

struct SurfaceOptions {
  int nodes_per_axis = 11;
  double step = 5e-3;
  double tau = kRankTolerance;
  Constraints constraints;
  std::optional<Vector> orientation;  // used for one-dimensional kernels
};

/// Grid over [0, extent]^m grown by composing the flows of the local kernel
/// frame fields (first field first). m = 1 delegates to trace_vortex_line.
SurfaceMesh trace_integral_surface(const DifferentialForm& dalpha, const Point& seed, double extent,
                                   const SurfaceOptions& opts = {});

/// Pushes a mesh through Φ_t, carrying tangents by the flow Jacobian, and
/// re-measures how well the tangents annihilate dα.
SurfaceMesh advect_surface(const SurfaceMesh& mesh, const VectorField& v, double t,
                           const DifferentialForm& dalpha, const Stepper& stepper = {});

/// Largest principal angle between two subspaces given by orthonormal columns;
/// pi/2 when dimensions differ.
double max_principal_angle(const Matrix& a, const Matrix& b);

/// Distance from a point to a polyline refined by cubic Hermite segments.
double distance_to_curve(const Point& p, const std::vector<Point>& nodes,
                         const std::vector<Vector>& tangents);

}  // namespace cartan

#endif  // CARTAN_KERNEL_HPP_
