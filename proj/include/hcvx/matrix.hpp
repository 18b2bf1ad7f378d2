#pragma once

#include <cmath>
#include <cstddef>
#include <limits>
#include <span>
#include <string>
#include <vector>

#include "hcvx/errors.hpp"

namespace hcvx {

inline constexpr std::size_t kMaxDimension = 64;

namespace detail {

inline void check_dimension(std::size_t n) {
  if (n == 0 || n > kMaxDimension) {
    throw InvalidArgument("matrix dimension " + std::to_string(n) +
                          " outside [1, " + std::to_string(kMaxDimension) +
                          "]");
  }
}

}  // namespace detail

/// Row-major dense matrix; used for eigenvector bases and scratch space.
template <class Real = double>
class DenseMatrix {
 public:
  DenseMatrix() = default;
  DenseMatrix(std::size_t rows, std::size_t cols)
      : rows_(rows), cols_(cols), data_(rows * cols, Real(0)) {}

  static DenseMatrix identity(std::size_t n) {
    DenseMatrix m(n, n);
    for (std::size_t i = 0; i < n; ++i) m(i, i) = Real(1);
    return m;
  }

  std::size_t rows() const noexcept { return rows_; }
  std::size_t cols() const noexcept { return cols_; }
  Real& operator()(std::size_t i, std::size_t j) { return data_[i * cols_ + j]; }
  const Real& operator()(std::size_t i, std::size_t j) const {
    return data_[i * cols_ + j];
  }

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<Real> data_;
};

/// Real symmetric matrix stored as its packed lower triangle, so
/// A(i, j) == A(j, i) holds by construction.
template <class Real = double>
class SymmetricMatrix {
 public:
  SymmetricMatrix() = default;

  explicit SymmetricMatrix(std::size_t dim)
      : dim_(dim), lower_(dim * (dim + 1) / 2, Real(0)) {
    detail::check_dimension(dim);
  }

  /// Dense row-major input. Entries mirrored across the diagonal must agree
  /// to `symmetry_tol` relative to the largest entry; the lower triangle is kept.
  static SymmetricMatrix from_rows(const std::vector<std::vector<double>>& rows,
                                   double symmetry_tol = 1e-12) {
    const std::size_t n = rows.size();
    detail::check_dimension(n);
    double scale = 0.0;
    for (const auto& row : rows) {
      if (row.size() != n) throw DimensionMismatch("matrix is not square");
      for (double v : row) {
        if (!std::isfinite(v)) throw InvalidArgument("matrix entry not finite");
        scale = std::max(scale, std::abs(v));
      }
    }
    SymmetricMatrix m(n);
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = 0; j <= i; ++j) {
        if (std::abs(rows[i][j] - rows[j][i]) > symmetry_tol * (1.0 + scale)) {
          throw InvalidArgument("matrix is not symmetric at (" +
                                std::to_string(i) + ", " + std::to_string(j) +
                                ")");
        }
        m.set(i, j, Real(rows[i][j]));
      }
    }
    return m;
  }

  static SymmetricMatrix diagonal(std::span<const double> values) {
    SymmetricMatrix m(values.size());
    for (std::size_t i = 0; i < values.size(); ++i) {
      if (!std::isfinite(values[i])) {
        throw InvalidArgument("matrix entry not finite");
      }
      m.set(i, i, Real(values[i]));
    }
    return m;
  }

  static SymmetricMatrix identity(std::size_t n, double scale = 1.0) {
    SymmetricMatrix m(n);
    for (std::size_t i = 0; i < n; ++i) m.set(i, i, Real(scale));
    return m;
  }

  std::size_t dim() const noexcept { return dim_; }

  const Real& operator()(std::size_t i, std::size_t j) const {
    return i >= j ? lower_[i * (i + 1) / 2 + j] : lower_[j * (j + 1) / 2 + i];
  }

  void set(std::size_t i, std::size_t j, const Real& value) {
    if (i >= j) {
      lower_[i * (i + 1) / 2 + j] = value;
    } else {
      lower_[j * (j + 1) / 2 + i] = value;
    }
  }

  Real max_abs() const {
    using std::abs;
    Real out(0);
    for (const auto& v : lower_) out = abs(v) > out ? Real(abs(v)) : out;
    return out;
  }

  Real frobenius() const {
    using std::sqrt;
    Real sum(0);
    for (std::size_t i = 0; i < dim_; ++i) {
      for (std::size_t j = 0; j < dim_; ++j) {
        const Real& v = (*this)(i, j);
        sum += v * v;
      }
    }
    return sqrt(sum);
  }

  bool is_diagonal() const {
    for (std::size_t i = 0; i < dim_; ++i) {
      for (std::size_t j = 0; j < i; ++j) {
        if ((*this)(i, j) != 0) return false;
      }
    }
    return true;
  }

  template <class To>
  SymmetricMatrix<To> cast() const {
    SymmetricMatrix<To> out(dim_);
    for (std::size_t i = 0; i < dim_; ++i) {
      for (std::size_t j = 0; j <= i; ++j) out.set(i, j, To((*this)(i, j)));
    }
    return out;
  }

  std::vector<std::vector<double>> rows() const {
    std::vector<std::vector<double>> out(dim_, std::vector<double>(dim_));
    for (std::size_t i = 0; i < dim_; ++i) {
      for (std::size_t j = 0; j < dim_; ++j) {
        out[i][j] = static_cast<double>((*this)(i, j));
      }
    }
    return out;
  }

  friend bool operator==(const SymmetricMatrix&, const SymmetricMatrix&) =
      default;

 private:
  std::size_t dim_ = 0;
  std::vector<Real> lower_;
};

/// Unit vector; input is rescaled to norm 1 at construction.
template <class Real = double>
class UnitVector {
 public:
  static constexpr double kNormTolerance = 1e-12;

  UnitVector() = default;

  explicit UnitVector(std::vector<Real> components)
      : components_(std::move(components)) {
    using std::abs;
    using std::sqrt;
    if (components_.empty()) throw InvalidArgument("empty vector");
    Real sum(0);
    for (const auto& c : components_) sum += c * c;
    const Real norm = sqrt(sum);
    if (!(norm > 0) || !(norm < std::numeric_limits<double>::max())) {
      throw InvalidArgument("vector cannot be normalized");
    }
    input_norm_ = static_cast<double>(norm);
    rescaled_ = abs(norm - Real(1)) > Real(kNormTolerance);
    for (auto& c : components_) c /= norm;
  }

  static UnitVector from(std::span<const double> values) {
    return UnitVector(std::vector<Real>(values.begin(), values.end()));
  }

  /// (1, ..., 1)/sqrt(n)
  static UnitVector uniform(std::size_t n) {
    return UnitVector(std::vector<Real>(n, Real(1)));
  }

  static UnitVector basis(std::size_t n, std::size_t k) {
    std::vector<Real> c(n, Real(0));
    c.at(k) = Real(1);
    return UnitVector(std::move(c));
  }

  std::size_t dim() const noexcept { return components_.size(); }
  const Real& operator[](std::size_t i) const { return components_[i]; }
  const std::vector<Real>& components() const noexcept { return components_; }
  // Norm of the raw input, and whether it was off by more than 1e-12.
  double input_norm() const noexcept { return input_norm_; }
  bool rescaled() const noexcept { return rescaled_; }

  template <class To>
  UnitVector<To> cast() const {
    return UnitVector<To>(std::vector<To>(components_.begin(), components_.end()));
  }

 private:
  std::vector<Real> components_;
  double input_norm_ = 1.0;
  bool rescaled_ = false;
};

}  // namespace hcvx
