// Closed-form model systems (fluid flows, a Hamiltonian oscillator, and
// constructed higher-degree examples) packaged with the forms the checks need,
// plus Euler/Bernoulli residuals and the extended-space form σ = α̂ + dt∧β̂.
#ifndef CARTAN_SCENARIO_HPP_
#define CARTAN_SCENARIO_HPP_

#include <cstdint>
#include <functional>
#include <map>
#include <string>
#include <vector>

#include "cartan/expression.hpp"
#include "cartan/forms.hpp"

namespace cartan {

class ScenarioError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum class ScenarioKind { Fluid, Hamiltonian, Abstract };

std::string to_string(ScenarioKind kind);

/// Geometry used to build default loops, transversals and tubes.
struct SectionSpec {
  Point center;          // spatial point (time is the scenario's t_lo slice)
  Matrix frame;          // orthonormal columns; the first deg(dα) span transversals
  double size = 0.5;     // disc radius or parallelotope edge
  double loop_radius = 1.0;
  Vector axis;           // hint for the kernel field along tubes
  double tube_length = 1.0;
};

struct Scenario {
  std::string name;
  std::string summary;
  ScenarioKind kind = ScenarioKind::Fluid;
  bool steady = true;
  bool solution = true;            // satisfies i_v dα = dβ (time-dependent: i_ξ dσ = 0)
  bool constructed = false;        // abstract example built for testing, not a physical system
  bool bernoulli_constant = false; // E constant throughout the domain
  int spatial_dim = 0;
  int degree = 1;                  // degree k of α
  std::map<std::string, double> params;

  Domain domain;                   // spatial
  Domain extended_domain;
  Point sample_lo, sample_hi;      // spatial sampling box
  double t_lo = 0.0, t_hi = 1.0;   // sampling times

  // Spatial view, steady scenarios only.
  VectorField v;
  DifferentialForm alpha;
  DifferentialForm beta;

  // Extended view, always present.
  VectorField v_hat;               // (v(x, t), 0)
  VectorField xi;                  // ∂_t + v
  DifferentialForm alpha_hat;
  DifferentialForm beta_hat;
  DifferentialForm sigma;

  // Fluid scalars (ρ = 1, so the enthalpy equals the pressure); extended,
  // plus spatial versions for steady flows.
  DifferentialForm pressure_hat, potential_hat, enthalpy_hat, bernoulli_hat;
  DifferentialForm pressure, potential, enthalpy, bernoulli;

  Point seed;                      // line/surface seed (spatial)
  SectionSpec section;
  /// Closed-form flux of dα through the default transversal section with the
  /// given center and size, when known.
  std::function<double(const Point&, double)> section_flux;
};

// --- catalog ---------------------------------------------------------------

std::vector<std::string> catalog();

/// Builds a named scenario and runs its load-time self-checks. Unknown names
/// raise ScenarioError listing the catalog.
Scenario load_scenario(const std::string& name, const std::map<std::string, double>& params = {},
                       bool self_check = true);

/// Parameters a scenario accepts, with defaults.
std::map<std::string, double> default_params(const std::string& name);

struct CustomFluidSpec {
  std::vector<std::string> velocity;  // one expression per spatial coordinate
  std::string pressure = "0";
  std::string potential = "0";
  double half_width = 10.0;
  bool steady = true;
  bool solution = true;
};

/// Fluid from analytic expressions in x, y, z (and t when unsteady).
Scenario custom_fluid(const CustomFluidSpec& spec, bool self_check = true);

/// Load-time checks; throws ScenarioError with the first failure.
void self_check(const Scenario& s);

// --- sampling --------------------------------------------------------------

/// Deterministic random points inside the sampling box whose difference
/// stencils stay in the domain. Extended points carry a time in [t_lo, t_hi].
std::vector<Point> sample_points(const Scenario& s, int count, std::uint64_t seed, bool extended);

Point extended_point(const Point& x, double t);

// --- operations ------------------------------------------------------------

/// σ = α̂ + dt∧β̂ on extended space.
DifferentialForm build_sigma(const DifferentialForm& alpha_hat, const DifferentialForm& beta_hat);

/// i_v dα - dβ for steady scenarios; for fluids this is i_v dṽ + dE.
DifferentialForm invariance_residual_form(const Scenario& s);

/// i_v dṽ + dE at x (steady fluids).
AltTensord stationary_euler_residual(const Scenario& s, const Point& x);

struct EquivalenceSample {
  Point point;
  AltTensord decomposed;     // L_∂t α̂ + i_v d̂α̂ - d̂β̂ (no dt part)
  AltTensord solution;       // i_ξ dσ
  double decomposed_norm = 0.0;
  double solution_norm = 0.0;
  double spatial_norm = 0.0;    // norm of the dt-free part of i_ξ dσ
  double spatial_mismatch = 0.0;  // |spatial part of i_ξ dσ - decomposed|
  double time_mismatch = 0.0;     // |dt part of i_ξ dσ + i_v decomposed|
};

/// Both sides of the extended-space equivalence at an extended point.
EquivalenceSample cartan_residuals(const Scenario& s, const Point& x_ext);

/// Fluid form of the above: L_∂t v̂ + i_v d̂v̂ + d̂E against i_ξ dσ with σ = v̂ - E dt.
EquivalenceSample unsteady_euler_residual(const Scenario& s, const Point& x_ext);

/// Ratio test: both below tol, or both above with spatial_norm / decomposed_norm in [0.5, 2].
bool vanish_together(const EquivalenceSample& e, double tol);

struct BernoulliReport {
  double streamline_max = 0.0;   // max |v·∇E| along traced streamlines
  double vortex_line_max = 0.0;  // max |γ'·∇E| along traced vortex lines
  int vortex_lines_traced = 0;
  double variation = 0.0;        // max E - min E over sample points
  bool irrotational = false;
  bool passed = false;
  double tolerance = 0.0;
  std::vector<std::string> notes;
};

BernoulliReport bernoulli_checks(const Scenario& s, double tol = 1e-6, int seeds = 4,
                                 std::uint64_t seed = 0xbe11);

/// Finite-difference curl of a 3-d field.
Vector curl(const VectorField& v, const Point& x);

/// Max difference between dṽ and the curl arranged as ω·dS.
double vorticity_mismatch(const Scenario& s, const Point& x);

}  // namespace cartan

#endif  // CARTAN_SCENARIO_HPP_
