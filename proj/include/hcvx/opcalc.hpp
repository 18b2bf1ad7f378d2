#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <numeric>
#include <optional>
#include <string>
#include <type_traits>
#include <vector>

#include "hcvx/convexity.hpp"
#include "hcvx/errors.hpp"
#include "hcvx/functions.hpp"
#include "hcvx/interval.hpp"
#include "hcvx/matrix.hpp"
#include "hcvx/precision.hpp"

namespace hcvx {

inline constexpr double kSpectrumSlack = 1e-12;
inline constexpr int kMaxJacobiSweeps = 100;

template <class Real>
struct SpectralDecomposition {
  std::vector<Real> eigenvalues;  // ascending
  DenseMatrix<Real> eigenvectors;  // column k pairs with eigenvalues[k]
  int sweeps = 0;

  std::size_t dim() const noexcept { return eigenvalues.size(); }
  double spread() const {
    return static_cast<double>(eigenvalues.back() - eigenvalues.front());
  }
};

/// Off-diagonal stopping threshold relative to ||A||_F.
template <class Real>
Real jacobi_tolerance() {
  if constexpr (std::is_same_v<Real, double>) {
    return 1e-12;
  } else {
    return Real(1000) * std::numeric_limits<Real>::epsilon();
  }
}

namespace detail {

template <class Real>
Real off_diagonal_norm(const DenseMatrix<Real>& a) {
  using std::sqrt;
  Real sum(0);
  for (std::size_t i = 0; i < a.rows(); ++i) {
    for (std::size_t j = 0; j < a.cols(); ++j) {
      if (i != j) sum += a(i, j) * a(i, j);
    }
  }
  return sqrt(sum);
}

// Cyclic Jacobi on the dense symmetric `a`, accumulating rotations into `v`.
template <class Real>
int jacobi_sweeps(DenseMatrix<Real>& a, DenseMatrix<Real>& v,
                  const Real& threshold, int max_sweeps) {
  using std::abs;
  using std::sqrt;
  const std::size_t n = a.rows();
  for (int sweep = 0; sweep <= max_sweeps; ++sweep) {
    const Real off = off_diagonal_norm(a);
    if (off <= threshold) return sweep;
    if (sweep == max_sweeps) {
      throw ConvergenceError("Jacobi did not converge in " +
                             std::to_string(max_sweeps) +
                             " sweeps (off-diagonal norm " +
                             std::to_string(static_cast<double>(off)) + ")");
    }
    for (std::size_t p = 0; p + 1 < n; ++p) {
      for (std::size_t q = p + 1; q < n; ++q) {
        const Real apq = a(p, q);
        if (apq == 0) continue;
        const Real theta = (a(q, q) - a(p, p)) / (Real(2) * apq);
        Real t;
        if (abs(theta) > Real(1e100)) {
          t = Real(1) / (Real(2) * theta);
        } else {
          t = Real(1) / (abs(theta) + sqrt(theta * theta + Real(1)));
          if (theta < 0) t = -t;
        }
        const Real c = Real(1) / sqrt(t * t + Real(1));
        const Real s = t * c;
        for (std::size_t k = 0; k < n; ++k) {
          const Real akp = a(k, p);
          const Real akq = a(k, q);
          a(k, p) = c * akp - s * akq;
          a(k, q) = s * akp + c * akq;
        }
        for (std::size_t k = 0; k < n; ++k) {
          const Real apk = a(p, k);
          const Real aqk = a(q, k);
          a(p, k) = c * apk - s * aqk;
          a(q, k) = s * apk + c * aqk;
        }
        a(p, q) = Real(0);
        a(q, p) = Real(0);
        for (std::size_t k = 0; k < n; ++k) {
          const Real vkp = v(k, p);
          const Real vkq = v(k, q);
          v(k, p) = c * vkp - s * vkq;
          v(k, q) = s * vkp + c * vkq;
        }
      }
    }
  }
  return max_sweeps;
}

template <class Real>
SpectralDecomposition<Real> sorted_decomposition(const DenseMatrix<Real>& a,
                                                 const DenseMatrix<Real>& v,
                                                 int sweeps) {
  const std::size_t n = a.rows();
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(), [&](std::size_t i, std::size_t j) {
    return a(i, i) < a(j, j);
  });
  SpectralDecomposition<Real> out;
  out.sweeps = sweeps;
  out.eigenvalues.resize(n);
  out.eigenvectors = DenseMatrix<Real>(n, n);
  for (std::size_t k = 0; k < n; ++k) {
    out.eigenvalues[k] = a(order[k], order[k]);
    for (std::size_t i = 0; i < n; ++i) out.eigenvectors(i, k) = v(i, order[k]);
  }
  return out;
}

template <class Real>
DenseMatrix<Real> dense(const SymmetricMatrix<Real>& A) {
  DenseMatrix<Real> a(A.dim(), A.dim());
  for (std::size_t i = 0; i < A.dim(); ++i) {
    for (std::size_t j = 0; j < A.dim(); ++j) a(i, j) = A(i, j);
  }
  return a;
}

}  // namespace detail

/// Cyclic Jacobi diagonalization. Stops once the off-diagonal Frobenius norm
/// is below jacobi_tolerance<Real>() * ||A||_F; eigenvalues come out ascending.
template <class Real>
SpectralDecomposition<Real> spectral_decompose(const SymmetricMatrix<Real>& A,
                                               int max_sweeps = kMaxJacobiSweeps) {
  DenseMatrix<Real> a = detail::dense(A);
  DenseMatrix<Real> v = DenseMatrix<Real>::identity(A.dim());
  const Real threshold = jacobi_tolerance<Real>() * A.frobenius();
  const int sweeps = detail::jacobi_sweeps(a, v, threshold, max_sweeps);
  return detail::sorted_decomposition(a, v, sweeps);
}

/// Decomposition seeded with an approximate eigenbasis (typically a double
/// decomposition of the same matrix). The seed is re-orthonormalized at Real
/// precision, so Q^T A Q is an exact similarity that is already nearly
/// diagonal and Jacobi finishes in a sweep or two.
template <class Real>
SpectralDecomposition<Real> spectral_decompose(const SymmetricMatrix<Real>& A,
                                               const DenseMatrix<double>& seed,
                                               int max_sweeps = kMaxJacobiSweeps) {
  using std::sqrt;
  const std::size_t n = A.dim();
  if (seed.rows() != n || seed.cols() != n) {
    throw DimensionMismatch("warm-start basis has the wrong shape");
  }
  DenseMatrix<Real> q(n, n);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) q(i, j) = Real(seed(i, j));
  }
  // Modified Gram-Schmidt, twice.
  for (int pass = 0; pass < 2; ++pass) {
    for (std::size_t k = 0; k < n; ++k) {
      for (std::size_t j = 0; j < k; ++j) {
        Real dot(0);
        for (std::size_t i = 0; i < n; ++i) dot += q(i, j) * q(i, k);
        for (std::size_t i = 0; i < n; ++i) q(i, k) -= dot * q(i, j);
      }
      Real norm(0);
      for (std::size_t i = 0; i < n; ++i) norm += q(i, k) * q(i, k);
      norm = sqrt(norm);
      if (!(norm > 0)) throw InvalidArgument("warm-start basis is singular");
      for (std::size_t i = 0; i < n; ++i) q(i, k) /= norm;
    }
  }
  DenseMatrix<Real> aq(n, n);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      Real sum(0);
      for (std::size_t k = 0; k < n; ++k) sum += A(i, k) * q(k, j);
      aq(i, j) = sum;
    }
  }
  DenseMatrix<Real> b(n, n);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j <= i; ++j) {
      Real sum(0);
      for (std::size_t k = 0; k < n; ++k) sum += q(k, i) * aq(k, j);
      b(i, j) = sum;
      b(j, i) = sum;
    }
  }
  const Real threshold = jacobi_tolerance<Real>() * A.frobenius();
  const int sweeps = detail::jacobi_sweeps(b, q, threshold, max_sweeps);
  return detail::sorted_decomposition(b, q, sweeps);
}

namespace detail {

// Eigenvalues outside f's domain by at most kSpectrumSlack at a closed
// endpoint are moved onto it; anything further out is an error.
template <class Real>
std::vector<Real> spectrum_in_domain(const ScalarFunction& f,
                                     const std::vector<Real>& eigenvalues) {
  const Interval& dom = f.domain();
  std::vector<Real> out = eigenvalues;
  std::vector<double> offending;
  for (auto& mu : out) {
    if (dom.contains(mu)) continue;
    const double m = static_cast<double>(mu);
    if (!dom.lo_open() && m < dom.lo() && m >= dom.lo() - kSpectrumSlack) {
      mu = Real(dom.lo());
    } else if (!dom.hi_open() && m > dom.hi() && m <= dom.hi() + kSpectrumSlack) {
      mu = Real(dom.hi());
    } else {
      offending.push_back(m);
    }
  }
  if (!offending.empty()) {
    std::string list;
    for (double m : offending) {
      if (!list.empty()) list += ", ";
      list += std::to_string(m);
    }
    throw SpectrumDomainError("eigenvalues {" + list + "} lie outside " +
                                  f.domain().describe() + " of " +
                                  std::string(f.name()),
                              std::move(offending));
  }
  return out;
}

}  // namespace detail

/// f(A) = Q f(Lambda) Q^T from an existing decomposition.
template <class Real>
SymmetricMatrix<Real> apply_function(const ScalarFunction& f,
                                     const SpectralDecomposition<Real>& d) {
  const std::vector<Real> mu = detail::spectrum_in_domain(f, d.eigenvalues);
  const std::size_t n = d.dim();
  std::vector<Real> fmu(n);
  for (std::size_t k = 0; k < n; ++k) fmu[k] = f.evaluate(mu[k]);
  SymmetricMatrix<Real> out(n);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j <= i; ++j) {
      Real sum(0);
      for (std::size_t k = 0; k < n; ++k) {
        sum += d.eigenvectors(i, k) * fmu[k] * d.eigenvectors(j, k);
      }
      out.set(i, j, sum);
    }
  }
  return out;
}

template <class Real>
SymmetricMatrix<Real> apply_function(const ScalarFunction& f,
                                     const SymmetricMatrix<Real>& A) {
  return apply_function(f, spectral_decompose(A));
}

/// x^T A x
template <class Real>
Real quadratic_form(const SymmetricMatrix<Real>& A, const UnitVector<Real>& x) {
  if (A.dim() != x.dim()) {
    throw DimensionMismatch("matrix is " + std::to_string(A.dim()) +
                            "-dimensional, vector " + std::to_string(x.dim()));
  }
  Real sum(0);
  for (std::size_t i = 0; i < A.dim(); ++i) {
    Real row(0);
    for (std::size_t j = 0; j < i; ++j) row += A(i, j) * x[j];
    sum += x[i] * (A(i, i) * x[i] + Real(2) * row);
  }
  return sum;
}

/// sum_k f(mu_k) <x, q_k>^2, the spectral expansion of <f(A)x, x>.
template <class Real>
Real spectral_expansion(const ScalarFunction& f,
                        const SpectralDecomposition<Real>& d,
                        const UnitVector<Real>& x) {
  if (d.dim() != x.dim()) throw DimensionMismatch("dimension mismatch");
  const std::vector<Real> mu = detail::spectrum_in_domain(f, d.eigenvalues);
  Real sum(0);
  for (std::size_t k = 0; k < d.dim(); ++k) {
    Real dot(0);
    for (std::size_t i = 0; i < d.dim(); ++i) dot += d.eigenvectors(i, k) * x[i];
    sum += f.evaluate(mu[k]) * dot * dot;
  }
  return sum;
}

struct SpectrumCheck {
  bool inside = true;
  std::vector<double> eigenvalues;
  std::vector<double> offending;
};

/// Sp(A) inside I, allowing kSpectrumSlack past closed endpoints.
inline SpectrumCheck spectrum_in(const SpectralDecomposition<double>& d,
                                 const Interval& I) {
  SpectrumCheck out;
  out.eigenvalues = d.eigenvalues;
  for (double mu : d.eigenvalues) {
    if (!I.contains_with_slack(mu, kSpectrumSlack)) out.offending.push_back(mu);
  }
  out.inside = out.offending.empty();
  return out;
}

inline SpectrumCheck spectrum_in(const SymmetricMatrix<double>& A,
                                 const Interval& I) {
  return spectrum_in(spectral_decompose(A), I);
}

enum class JensenMode { Classical, PerLambda, InfimumM, HalfBound };

inline std::string_view jensen_mode_name(JensenMode m) {
  switch (m) {
    case JensenMode::Classical:
      return "Classical";
    case JensenMode::PerLambda:
      return "PerLambda";
    case JensenMode::InfimumM:
      return "InfimumM";
    case JensenMode::HalfBound:
      return "HalfBound";
  }
  return "?";
}

inline std::optional<JensenMode> parse_jensen_mode(std::string_view s) {
  for (auto m : {JensenMode::Classical, JensenMode::PerLambda,
                 JensenMode::InfimumM, JensenMode::HalfBound}) {
    if (jensen_mode_name(m) == s) return m;
  }
  return std::nullopt;
}

struct JensenModeSpec {
  JensenMode mode = JensenMode::Classical;
  double lambda = 0.5;  // PerLambda only
};

/// f(<Ax,x>) <= factor * <f(A)x,x> with the factor chosen by the mode.
/// Only the signed margin is reported; a negative margin is data.
template <class Real>
struct JensenVerdict {
  Real quadratic{};  // <Ax, x>
  Real lhs{};        // f(<Ax, x>)
  Real form{};       // <f(A)x, x>
  Real rhs_factor{};
  Real rhs{};
  Real margin{};  // rhs - lhs
  JensenModeSpec mode;
};

/// Operator Jensen check on a precomputed decomposition of A.
template <class Real>
JensenVerdict<Real> jensen_verify(const ScalarFunction& f, const ScalarFunction& h,
                                  const SymmetricMatrix<Real>& A,
                                  const SpectralDecomposition<Real>& d,
                                  const UnitVector<Real>& x, JensenModeSpec mode,
                                  const std::optional<JensenCoefficient>& jc = {}) {
  if (A.dim() != x.dim() || d.dim() != A.dim()) {
    throw DimensionMismatch("matrix is " + std::to_string(A.dim()) +
                            "-dimensional, vector " + std::to_string(x.dim()));
  }
  JensenVerdict<Real> out;
  out.mode = mode;
  const std::vector<Real> mu = detail::spectrum_in_domain(f, d.eigenvalues);
  // <Ax,x> lies in [min Sp, max Sp]; pin it there against rounding.
  Real qf = quadratic_form(A, x);
  if (qf < mu.front()) qf = mu.front();
  if (qf > mu.back()) qf = mu.back();
  out.quadratic = qf;
  out.lhs = f.evaluate(qf);
  out.form = quadratic_form(apply_function(f, d), x);

  switch (mode.mode) {
    case JensenMode::Classical:
      out.rhs_factor = Real(1);
      break;
    case JensenMode::PerLambda: {
      if (!(mode.lambda > 0.0 && mode.lambda < 1.0)) {
        throw InvalidArgument("PerLambda needs lambda in (0, 1)");
      }
      const Real lam(mode.lambda);
      out.rhs_factor = h.evaluate(lam) / lam;
      break;
    }
    case JensenMode::InfimumM: {
      const JensenCoefficient coeff =
          jc ? *jc : jcoeff(h, Interval::open(0.0, 1.0));
      // Re-evaluated at Real precision at the point that realized the infimum.
      const Real t(coeff.argmin);
      out.rhs_factor = h.evaluate(t) / t;
      break;
    }
    case JensenMode::HalfBound: {
      const Real half(0.5);
      out.rhs_factor = Real(2) * h.evaluate(half);
      break;
    }
  }
  out.rhs = out.rhs_factor * out.form;
  out.margin = out.rhs - out.lhs;
  return out;
}

template <class Real>
JensenVerdict<Real> jensen_verify(const ScalarFunction& f, const ScalarFunction& h,
                                  const SymmetricMatrix<Real>& A,
                                  const UnitVector<Real>& x, JensenModeSpec mode,
                                  const std::optional<JensenCoefficient>& jc = {}) {
  if (A.dim() != x.dim()) {
    throw DimensionMismatch("matrix is " + std::to_string(A.dim()) +
                            "-dimensional, vector " + std::to_string(x.dim()));
  }
  return jensen_verify(f, h, A, spectral_decompose(A), x, mode, jc);
}

}  // namespace hcvx
