// Acceptance suite: one PASS/FAIL line per criterion, exit status 1 if any
// criterion fails. Criteria run concurrently and are printed in order.
#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <future>
#include <map>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "cartan/flow.hpp"
#include "cartan/forms.hpp"
#include "cartan/runner.hpp"
#include "cartan/scenario.hpp"
#include "support.hpp"

using namespace cartan;
using namespace cartan::testing;
namespace fs = std::filesystem;

namespace {

struct Verdict {
  bool passed = true;
  std::string detail;

  void require(bool ok, const std::string& what, double value) {
    passed = passed && ok;
    if (!detail.empty()) detail += ", ";
    char buf[96];
    std::snprintf(buf, sizeof buf, "%s=%.3e", what.c_str(), value);
    detail += buf;
    if (!ok) detail += "(!)";
  }
  void require(bool ok, const std::string& what) {
    passed = passed && ok;
    if (!detail.empty()) detail += ", ";
    detail += what + (ok ? "" : "(!)");
  }
};

CheckResult check(const std::string& scenario, const std::string& name, const std::string& options = "") {
  const RunConfig cfg =
      parse_config("scenario = " + scenario + "\nchecks = " + name + "\n[check " + name + "]\n" + options,
                   scenario + "/" + name);
  const Scenario s = build_scenario(cfg);
  validate_checks(cfg, s);
  return run_check(name, s, cfg);
}

double metric(const CheckResult& r, const std::string& key) {
  for (const auto& [k, v] : r.metrics)
    if (k == key) {
      if (v == "true") return 1.0;
      if (v == "false") return 0.0;
      return std::stod(v);
    }
  throw std::runtime_error(r.check + ": no metric " + key);
}

// (L_v a)_I = v^j ∂_j a_I + Σ_m a_{i_1..j..i_k} ∂_{i_m} v^j, with j in slot m.
AltTensord coordinate_lie(const VectorField& v, const DifferentialForm& a, const Point& x) {
  const int n = a.dim(), k = a.degree();
  const Matrix partials = component_partials(a, x, n);
  const AltTensord ax = a(x);
  const Vector vx = v(x);
  Matrix jac(n, n);  // jac(j, i) = ∂_i v^j
  for (int i = 0; i < n; ++i) {
    const double h = 1e-5;
    Point xp = x, xm = x;
    xp[i] += h;
    xm[i] -= h;
    jac.col(i) = (v(xp) - v(xm)) / (2 * h);
  }
  AltTensord out(n, k);
  Eigen::Index rank = 0;
  for (const IndexSet& idx : combinations(n, k)) {
    double sum = vx.dot(partials.row(rank));
    for (int m = 0; m < k; ++m)
      for (int j = 0; j < n; ++j) {
        IndexSet swapped = idx;
        swapped[m] = j;
        sum += ax.at(swapped) * jac(j, idx[m]);
      }
    out.comps()[rank++] = sum;
  }
  return out;
}

Verdict calculus_identities() {
  std::mt19937_64 rng(2024);
  double dd = 0, cartan = 0, leibniz = 0, split = 0;
  for (int trial = 0; trial < 10; ++trial) {
    const int n = 4;
    const int k = trial % 3;
    const auto a = random_form(n, k, rng);
    const auto b = random_form(n, k == 2 ? 1 : 1 + trial % 2, rng);
    const auto v = random_field(n, rng);
    const auto dda = d(d(a));
    const auto lie = lie_derivative(v, a);
    const auto lhs = d(wedge(a, b));
    const auto rhs = wedge(d(a), b) + (k % 2 ? -1.0 : 1.0) * wedge(a, d(b));
    const auto ext = random_form(n, 1 + trial % 2, rng, true);
    const auto parts = split_extended(ext);
    const auto decomposed = wedge(time_differential(ext.domain()),
                                  time_derivative(parts.r_hat) - spatial_exterior_derivative(parts.s_hat)) +
                            spatial_exterior_derivative(parts.r_hat);
    const auto dext = d(ext);
    for (int i = 0; i < 50; ++i) {
      const Point x = random_point(n, rng);
      dd = std::max(dd, dda(x).max_abs());
      cartan = std::max(cartan, max_abs_diff(lie(x), coordinate_lie(v, a, x)));
      leibniz = std::max(leibniz, max_abs_diff(lhs(x), rhs(x)));
      split = std::max(split, max_abs_diff(dext(x), decomposed(x)));
    }
  }
  Verdict out;
  out.require(dd < 1e-5, "dd", dd);
  out.require(cartan < 1e-5, "cartan", cartan);
  out.require(leibniz < 1e-5, "leibniz", leibniz);
  out.require(split < 1e-5, "split", split);
  return out;
}

Verdict kelvin_abc() {
  const CheckResult r = check("abc", "kelvin", "t_end = 1\nsamples = 11\ntol = 1e-6\n");
  Verdict out;
  out.require(r.passed && metric(r, "max_drift") < 1e-6, "drift", metric(r, "max_drift"));
  return out;
}

Verdict vorticity_pullback() {
  const Scenario s = load_scenario("abc");
  const auto w = d(s.alpha);
  const auto moved = pullback(FlowMap(s.v, 0.5), w);
  double worst = 0.0;
  for (const Point& x : sample_points(s, 20, 5, false)) worst = std::max(worst, max_abs_diff(moved(x), w(x)));
  Verdict out;
  out.require(worst < 1e-5, "max_component", worst);
  return out;
}

Verdict helmholtz_lines() {
  const CheckResult r = check("abc", "helmholtz_lines", "t = 0.5\ntol = 1e-4\n");
  Verdict out;
  out.require(metric(r, "line_residual") < 1e-4, "residual", metric(r, "line_residual"));
  out.require(metric(r, "hausdorff") < 1e-4, "hausdorff", metric(r, "hausdorff"));
  return out;
}

Verdict rigid_tube() {
  const CheckResult r = check("rigid_rotation", "tube_strength", "size = 0.5\ntol = 1e-7\nflux_tol = 1e-6\n");
  Verdict out;
  out.require(metric(r, "difference") < 1e-7, "sections", metric(r, "difference"));
  out.require(metric(r, "closed_form_error") < 1e-6, "vs_2pi_r2", metric(r, "closed_form_error"));
  out.require(r.passed, "check");
  return out;
}

Verdict stationary_euler() {
  Verdict out;
  for (const std::string name : {"abc", "rigid_rotation", "taylor_green"}) {
    const CheckResult e = check(name, "euler_residual", "points = 50\ntol = 1e-5\n");
    out.require(e.passed, name, metric(e, "max_residual"));
    const CheckResult b = check(name, "bernoulli");
    out.require(b.passed, name + ".bernoulli", metric(b, "streamline_max"));
  }
  return out;
}

Verdict cartan_equivalence() {
  double ratio_fail = 0, mismatch = 0;
  for (const std::string& name : catalog()) {
    if (name == "custom") continue;
    const Scenario s = load_scenario(name);
    for (const Point& x : sample_points(s, 20, 7, true)) {
      const EquivalenceSample e = cartan_residuals(s, x);
      if (!vanish_together(e, 1e-4)) ++ratio_fail;
      const double scale = std::max(1.0, e.decomposed_norm);
      mismatch = std::max({mismatch, e.spatial_mismatch / scale, e.time_mismatch / scale});
    }
  }
  Verdict out;
  out.require(ratio_fail == 0, "ratio_failures", ratio_fail);
  out.require(mismatch < 1e-6, "mismatch", mismatch);
  return out;
}

Verdict oscillator_tube() {
  const CheckResult r = check("oscillator", "tube_of_solutions", "tol = 1e-6\n");
  Verdict out;
  out.require(metric(r, "difference") < 1e-6, "cycles", metric(r, "difference"));
  out.require(std::abs(metric(r, "swept_flux")) < 1e-6, "swept", std::abs(metric(r, "swept_flux")));
  out.require(r.passed, "check");
  return out;
}

Verdict generalized_surfaces() {
  Verdict out;
  const CheckResult k = check("r5_decomposable", "kernel_dims", "expected_dim = 2\n");
  out.require(k.passed && metric(k, "dim_d") == 2 && metric(k, "bound_equality") == 1, "dim_d", metric(k, "dim_d"));
  const CheckResult f = check("r5_decomposable", "frobenius", "tol = 1e-6\n");
  out.require(f.passed, "frobenius", metric(f, "max_residual"));
  const CheckResult s = check("r5_decomposable", "surface_advect", "tol = 1e-5\n");
  out.require(s.passed, "surface", metric(s, "advected_residual"));
  const CheckResult t = check("r5_decomposable", "tube_strength", "tol = 1e-6\n");
  out.require(t.passed, "tube", metric(t, "difference"));
  return out;
}

Verdict kernel_angles() {
  Verdict out;
  double worst = 0.0;
  for (const std::string& name : catalog()) {
    if (name == "custom" || !load_scenario(name).solution) continue;
    const CheckResult r = check(name, "kernel_dims", "points = 20\ntol = 1e-5\n");
    worst = std::max(worst, metric(r, "max_principal_angle"));
    if (!r.passed) out.require(false, name);
  }
  out.require(worst < 1e-5, "max_angle", worst);
  return out;
}

std::map<std::string, std::string> csv_files(const fs::path& dir) {
  std::map<std::string, std::string> out;
  for (const auto& e : fs::directory_iterator(dir)) {
    if (e.path().extension() != ".csv") continue;
    std::ifstream in(e.path(), std::ios::binary);
    std::ostringstream s;
    s << in.rdbuf();
    out[e.path().filename().string()] = s.str();
  }
  return out;
}

Verdict determinism() {
  const fs::path root = fs::temp_directory_path() / "cartan_acceptance_determinism";
  fs::remove_all(root);
  int compared = 0, differing = 0;
  for (const char* file : {"abc.ini", "oscillator.ini", "curved_graph.ini"}) {
    const RunConfig cfg = load_config(fs::path(CARTAN_SOURCE_DIR) / "configs" / file);
    const fs::path a = root / (std::string(file) + ".1"), b = root / (std::string(file) + ".2");
    run(cfg, {a, false});
    run(cfg, {b, false});
    const auto fa = csv_files(a), fb = csv_files(b);
    compared += static_cast<int>(fa.size());
    if (fa != fb) ++differing;
  }
  fs::remove_all(root);
  Verdict out;
  out.require(differing == 0 && compared > 0, "csv_files", compared);
  return out;
}

}  // namespace

int main() {
  const std::vector<std::pair<std::string, std::function<Verdict()>>> criteria = {
      {"exterior-calculus identities", calculus_identities},
      {"Kelvin circulation, ABC", kelvin_abc},
      {"vorticity invariance under the ABC flow", vorticity_pullback},
      {"Helmholtz vortex lines move with the fluid", helmholtz_lines},
      {"Helmholtz tube strength, rigid rotation", rigid_tube},
      {"stationary Euler residual and Bernoulli", stationary_euler},
      {"extended-space equivalence ratio test", cartan_equivalence},
      {"tube of solutions, oscillator", oscillator_tube},
      {"generalized surfaces on R^5", generalized_surfaces},
      {"spatial kernel equivalence", kernel_angles},
      {"byte-identical CSV artifacts", determinism},
  };
  std::vector<std::future<Verdict>> futures;
  for (const auto& [title, fn] : criteria)
    futures.push_back(std::async(std::launch::async, [fn = fn]() {
      try {
        return fn();
      } catch (const std::exception& e) {
        Verdict v;
        v.require(false, std::string("exception: ") + e.what());
        return v;
      }
    }));
  int failures = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    const Verdict v = futures[i].get();
    failures += v.passed ? 0 : 1;
    std::printf("%s [%zu] %s: %s\n", v.passed ? "PASS" : "FAIL", i + 1, criteria[i].first.c_str(),
                v.detail.c_str());
    std::fflush(stdout);
  }
  return failures == 0 ? 0 : 1;
}
