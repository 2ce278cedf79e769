// Alternating tensors over R^n stored densely on lexicographically ordered
// strictly increasing index combinations.
#ifndef CARTAN_TENSOR_HPP_
#define CARTAN_TENSOR_HPP_

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <initializer_list>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace cartan {

template <typename Scalar>
using DynamicVector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

template <typename Scalar>
using DynamicMatrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;

using IndexSet = std::vector<int>;

inline Eigen::VectorXd make_vec(std::initializer_list<double> xs) {
  Eigen::VectorXd v(static_cast<Eigen::Index>(xs.size()));
  Eigen::Index i = 0;
  for (double x : xs) v[i++] = x;
  return v;
}

class TensorError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

inline std::int64_t binomial(int n, int k) {
  if (k < 0 || k > n) return 0;
  k = std::min(k, n - k);
  std::int64_t r = 1;
  for (int i = 1; i <= k; ++i) r = r * (n - k + i) / i;
  return r;
}

/// Lexicographic rank of a strictly increasing k-subset of {0..n-1}.
inline std::int64_t combination_rank(const IndexSet& c, int n) {
  const int k = static_cast<int>(c.size());
  std::int64_t rank = 0;
  int prev = -1;
  for (int i = 0; i < k; ++i) {
    for (int j = prev + 1; j < c[i]; ++j) rank += binomial(n - 1 - j, k - 1 - i);
    prev = c[i];
  }
  return rank;
}

/// All strictly increasing k-subsets of {0..n-1} in lexicographic order.
inline std::vector<IndexSet> combinations(int n, int k) {
  std::vector<IndexSet> out;
  if (k < 0 || k > n) return out;
  out.reserve(static_cast<std::size_t>(binomial(n, k)));
  IndexSet c(k);
  for (int i = 0; i < k; ++i) c[i] = i;
  while (true) {
    out.push_back(c);
    int i = k - 1;
    while (i >= 0 && c[i] == n - k + i) --i;
    if (i < 0) break;
    ++c[i];
    for (int j = i + 1; j < k; ++j) c[j] = c[j - 1] + 1;
  }
  return out;
}

/// Pointwise value of a k-form on R^n. Degree 0 holds a single scalar.
template <typename Scalar = double>
class AltTensor {
 public:
  using Vector = DynamicVector<Scalar>;

  AltTensor() = default;

  AltTensor(int dim, int degree) : dim_(dim), degree_(degree) {
    if (dim < 1) throw TensorError("AltTensor: dimension must be >= 1");
    if (degree < 0 || degree > dim)
      throw TensorError("AltTensor: degree " + std::to_string(degree) +
                        " out of range for dimension " + std::to_string(dim));
    comps_ = Vector::Zero(binomial(dim, degree));
  }

  AltTensor(int dim, int degree, Vector comps) : AltTensor(dim, degree) {
    if (comps.size() != comps_.size())
      throw TensorError("AltTensor: expected " + std::to_string(comps_.size()) +
                        " components, got " + std::to_string(comps.size()));
    comps_ = std::move(comps);
  }

  static AltTensor scalar(int dim, Scalar value) {
    AltTensor t(dim, 0);
    t.comps_[0] = value;
    return t;
  }

  /// dx^i as a tensor.
  static AltTensor basis_covector(int dim, int i) {
    AltTensor t(dim, 1);
    t.comps_[i] = Scalar(1);
    return t;
  }

  /// Covector with the given components.
  static AltTensor covector(const Vector& comps) {
    return AltTensor(static_cast<int>(comps.size()), 1, comps);
  }

  int dim() const { return dim_; }
  int degree() const { return degree_; }
  const Vector& comps() const { return comps_; }
  Vector& comps() { return comps_; }

  Scalar& operator[](const IndexSet& idx) { return comps_[combination_rank(idx, dim_)]; }
  Scalar operator[](const IndexSet& idx) const { return comps_[combination_rank(idx, dim_)]; }

  /// Component for an arbitrary (unsorted) index list, with the permutation sign.
  Scalar at(IndexSet idx) const {
    if (static_cast<int>(idx.size()) != degree_) throw TensorError("AltTensor::at: wrong index count");
    int sign = 1;
    for (std::size_t i = 0; i < idx.size(); ++i)
      for (std::size_t j = i + 1; j < idx.size(); ++j) {
        if (idx[i] == idx[j]) return Scalar(0);
        if (idx[i] > idx[j]) sign = -sign;
      }
    std::sort(idx.begin(), idx.end());
    return Scalar(sign) * (*this)[idx];
  }

  Scalar value() const {
    if (degree_ != 0) throw TensorError("AltTensor::value: not a scalar");
    return comps_[0];
  }

  Scalar norm() const { return comps_.norm(); }
  Scalar max_abs() const { return comps_.size() ? comps_.cwiseAbs().maxCoeff() : Scalar(0); }
  bool all_finite() const { return comps_.allFinite(); }

  AltTensor& operator+=(const AltTensor& o) {
    require_same_shape(o);
    comps_ += o.comps_;
    return *this;
  }
  AltTensor& operator-=(const AltTensor& o) {
    require_same_shape(o);
    comps_ -= o.comps_;
    return *this;
  }
  AltTensor& operator*=(Scalar s) {
    comps_ *= s;
    return *this;
  }

  friend AltTensor operator+(AltTensor a, const AltTensor& b) { return a += b; }
  friend AltTensor operator-(AltTensor a, const AltTensor& b) { return a -= b; }
  friend AltTensor operator-(AltTensor a) { return a *= Scalar(-1); }
  friend AltTensor operator*(Scalar s, AltTensor a) { return a *= s; }
  friend AltTensor operator*(AltTensor a, Scalar s) { return a *= s; }

 private:
  void require_same_shape(const AltTensor& o) const {
    if (o.dim_ != dim_ || o.degree_ != degree_)
      throw TensorError("AltTensor: shape mismatch (" + std::to_string(dim_) + "," +
                        std::to_string(degree_) + ") vs (" + std::to_string(o.dim_) + "," +
                        std::to_string(o.degree_) + ")");
  }

  int dim_ = 1;
  int degree_ = 0;
  Vector comps_ = Vector::Zero(1);
};

using AltTensord = AltTensor<double>;

template <typename Scalar>
AltTensor<Scalar> wedge(const AltTensor<Scalar>& a, const AltTensor<Scalar>& b) {
  if (a.dim() != b.dim())
    throw TensorError("wedge: dimension mismatch " + std::to_string(a.dim()) + " vs " +
                      std::to_string(b.dim()));
  const int n = a.dim();
  const int k = a.degree() + b.degree();
  if (k > n) throw TensorError("wedge: degree " + std::to_string(k) + " exceeds dimension");
  AltTensor<Scalar> out(n, k);
  const auto ia = combinations(n, a.degree());
  const auto ib = combinations(n, b.degree());
  IndexSet merged(k);
  for (std::size_t p = 0; p < ia.size(); ++p) {
    const Scalar ap = a.comps()[p];
    if (ap == Scalar(0)) continue;
    for (std::size_t q = 0; q < ib.size(); ++q) {
      const Scalar bq = b.comps()[q];
      if (bq == Scalar(0)) continue;
      const IndexSet& I = ia[p];
      const IndexSet& J = ib[q];
      // parity of the shuffle merging I and J
      int inversions = 0;
      bool overlap = false;
      for (int i : I)
        for (int j : J) {
          if (i == j) overlap = true;
          if (i > j) ++inversions;
        }
      if (overlap) continue;
      std::merge(I.begin(), I.end(), J.begin(), J.end(), merged.begin());
      const Scalar s = (inversions % 2) ? Scalar(-1) : Scalar(1);
      out.comps()[combination_rank(merged, n)] += s * ap * bq;
    }
  }
  return out;
}

/// i_w a : contraction of the first slot.
template <typename Scalar, typename Derived>
AltTensor<Scalar> interior(const Eigen::MatrixBase<Derived>& w, const AltTensor<Scalar>& a) {
  if (a.degree() < 1) throw TensorError("interior: degree-0 tensor has no slot to contract");
  if (w.size() != a.dim())
    throw TensorError("interior: vector dimension " + std::to_string(w.size()) +
                      " does not match tensor dimension " + std::to_string(a.dim()));
  const int n = a.dim();
  AltTensor<Scalar> out(n, a.degree() - 1);
  const auto targets = combinations(n, a.degree() - 1);
  IndexSet full(a.degree());
  for (std::size_t r = 0; r < targets.size(); ++r) {
    const IndexSet& J = targets[r];
    Scalar acc(0);
    for (int i = 0; i < n; ++i) {
      if (w[i] == Scalar(0)) continue;
      if (std::binary_search(J.begin(), J.end(), i)) continue;
      // position of i within sorted {i} u J gives the sign of moving it to the front
      int pos = 0;
      while (pos < static_cast<int>(J.size()) && J[pos] < i) ++pos;
      std::copy(J.begin(), J.begin() + pos, full.begin());
      full[pos] = i;
      std::copy(J.begin() + pos, J.end(), full.begin() + pos + 1);
      const Scalar s = (pos % 2) ? Scalar(-1) : Scalar(1);
      acc += s * w[i] * a[full];
    }
    out.comps()[r] = acc;
  }
  return out;
}

/// Matrix of the linear map w -> i_w a, one column per basis vector.
template <typename Scalar>
DynamicMatrix<Scalar> interior_matrix(const AltTensor<Scalar>& a) {
  const int n = a.dim();
  DynamicMatrix<Scalar> m(binomial(n, a.degree() - 1), n);
  for (int j = 0; j < n; ++j)
    m.col(j) = interior(DynamicVector<Scalar>::Unit(n, j), a).comps();
  return m;
}

/// a(v_1, ..., v_k) with the vectors as matrix columns.
template <typename Scalar, typename Derived>
Scalar eval_on_vectors(const AltTensor<Scalar>& a, const Eigen::MatrixBase<Derived>& vs) {
  if (vs.cols() != a.degree())
    throw TensorError("eval_on_vectors: expected " + std::to_string(a.degree()) +
                      " vectors, got " + std::to_string(vs.cols()));
  if (a.degree() == 0) return a.comps()[0];
  if (vs.rows() != a.dim()) throw TensorError("eval_on_vectors: vector dimension mismatch");
  const auto idx = combinations(a.dim(), a.degree());
  const int k = a.degree();
  DynamicMatrix<Scalar> sub(k, k);
  Scalar acc(0);
  for (std::size_t p = 0; p < idx.size(); ++p) {
    const Scalar c = a.comps()[p];
    if (c == Scalar(0)) continue;
    for (int r = 0; r < k; ++r) sub.row(r) = vs.row(idx[p][r]);
    acc += c * sub.determinant();
  }
  return acc;
}

template <typename Scalar>
Scalar eval_on_vectors(const AltTensor<Scalar>& a, const std::vector<DynamicVector<Scalar>>& vs) {
  DynamicMatrix<Scalar> m(a.dim(), static_cast<Eigen::Index>(vs.size()));
  for (std::size_t j = 0; j < vs.size(); ++j) {
    if (vs[j].size() != a.dim()) throw TensorError("eval_on_vectors: vector dimension mismatch");
    m.col(static_cast<Eigen::Index>(j)) = vs[j];
  }
  return eval_on_vectors(a, m);
}

/// Pullback of a tensor on R^m through a linear map R^n -> R^m (m x n matrix).
template <typename Scalar, typename Derived>
AltTensor<Scalar> pullback(const AltTensor<Scalar>& a, const Eigen::MatrixBase<Derived>& jac) {
  if (jac.rows() != a.dim()) throw TensorError("pullback: Jacobian rows must match tensor dimension");
  const int n = static_cast<int>(jac.cols());
  const int k = a.degree();
  AltTensor<Scalar> out(n, k);
  if (k == 0) {
    out.comps()[0] = a.comps()[0];
    return out;
  }
  const auto idx = combinations(n, k);
  DynamicMatrix<Scalar> cols(a.dim(), k);
  for (std::size_t p = 0; p < idx.size(); ++p) {
    for (int j = 0; j < k; ++j) cols.col(j) = jac.col(idx[p][j]);
    out.comps()[p] = eval_on_vectors(a, cols);
  }
  return out;
}

}  // namespace cartan

#endif  // CARTAN_TENSOR_HPP_
