#include "gaitlab/numerics.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace gaitlab {

namespace {

double off_diagonal_norm(const Eigen::MatrixXd& a) {
  double s = 0.0;
  for (int i = 0; i < a.rows(); ++i)
    for (int j = 0; j < a.cols(); ++j)
      if (i != j) s += a(i, j) * a(i, j);
  return std::sqrt(s);
}

}  // namespace

SymEigen eigen_sym(const Eigen::MatrixXd& a, double symmetry_tol) {
  if (a.rows() != a.cols())
    throw std::invalid_argument("eigen_sym: matrix must be square");
  const int n = static_cast<int>(a.rows());
  const double asym = (a - a.transpose()).cwiseAbs().maxCoeff();
  if (asym > symmetry_tol)
    throw std::invalid_argument("eigen_sym: input asymmetry " +
                                std::to_string(asym) + " exceeds tolerance");

  Eigen::MatrixXd m = 0.5 * (a + a.transpose());
  Eigen::MatrixXd v = Eigen::MatrixXd::Identity(n, n);

  constexpr double kOffTol = 1e-12;
  constexpr int kMaxSweeps = 64;
  for (int sweep = 0; sweep < kMaxSweeps && off_diagonal_norm(m) >= kOffTol;
       ++sweep) {
    for (int p = 0; p < n - 1; ++p) {
      for (int q = p + 1; q < n; ++q) {
        const double apq = m(p, q);
        if (apq == 0.0) continue;
        const double tau = (m(q, q) - m(p, p)) / (2.0 * apq);
        const double t = (tau >= 0.0 ? 1.0 : -1.0) /
                         (std::abs(tau) + std::sqrt(1.0 + tau * tau));
        const double c = 1.0 / std::sqrt(1.0 + t * t);
        const double s = t * c;
        // m <- J^T m J with the Givens rotation in the (p, q) plane.
        for (int k = 0; k < n; ++k) {
          const double mkp = m(k, p);
          const double mkq = m(k, q);
          m(k, p) = c * mkp - s * mkq;
          m(k, q) = s * mkp + c * mkq;
        }
        for (int k = 0; k < n; ++k) {
          const double mpk = m(p, k);
          const double mqk = m(q, k);
          m(p, k) = c * mpk - s * mqk;
          m(q, k) = s * mpk + c * mqk;
        }
        for (int k = 0; k < n; ++k) {
          const double vkp = v(k, p);
          const double vkq = v(k, q);
          v(k, p) = c * vkp - s * vkq;
          v(k, q) = s * vkp + c * vkq;
        }
      }
    }
  }

  std::vector<int> order(n);
  std::iota(order.begin(), order.end(), 0);
  Eigen::VectorXd diag = m.diagonal();
  std::stable_sort(order.begin(), order.end(),
                   [&](int i, int j) { return diag(i) > diag(j); });

  SymEigen out;
  out.values.resize(n);
  out.vectors.resize(n, n);
  for (int i = 0; i < n; ++i) {
    out.values(i) = diag(order[i]);
    Eigen::VectorXd col = v.col(order[i]);
    for (int k = 0; k < n; ++k) {
      if (std::abs(col(k)) > 1e-9) {
        if (col(k) < 0.0) col = -col;
        break;
      }
    }
    out.vectors.col(i) = col;
  }
  return out;
}

Eigen::MatrixXd solve_gaussian(Eigen::MatrixXd a, Eigen::MatrixXd b) {
  const int n = static_cast<int>(a.rows());
  if (a.cols() != n)
    throw std::invalid_argument("solve_gaussian: matrix must be square");
  if (b.rows() != n)
    throw std::invalid_argument("solve_gaussian: dimension mismatch");

  const double scale = std::max(a.cwiseAbs().maxCoeff(), 1.0);
  for (int k = 0; k < n; ++k) {
    int pivot = k;
    for (int i = k + 1; i < n; ++i)
      if (std::abs(a(i, k)) > std::abs(a(pivot, k))) pivot = i;
    if (std::abs(a(pivot, k)) < 1e-14 * scale)
      throw std::runtime_error("solve_gaussian: singular matrix (pivot " +
                               std::to_string(a(pivot, k)) + ")");
    if (pivot != k) {
      a.row(k).swap(a.row(pivot));
      b.row(k).swap(b.row(pivot));
    }
    for (int i = k + 1; i < n; ++i) {
      const double f = a(i, k) / a(k, k);
      if (f == 0.0) continue;
      a.row(i).tail(n - k) -= f * a.row(k).tail(n - k);
      b.row(i) -= f * b.row(k);
    }
  }
  for (int k = n - 1; k >= 0; --k) {
    for (int i = k + 1; i < n; ++i) b.row(k) -= a(k, i) * b.row(i);
    b.row(k) /= a(k, k);
  }
  return b;
}

CubicSpline::CubicSpline(const Eigen::VectorXd& x, const Eigen::VectorXd& y)
    : x_(x), y_(y) {
  const int n = static_cast<int>(x.size()) - 1;  // interval count
  if (x.size() != y.size() || x.size() < 2)
    throw std::invalid_argument("CubicSpline: need at least two points");
  for (int i = 0; i < n; ++i)
    if (!(x(i + 1) > x(i)))
      throw std::invalid_argument("CubicSpline: abscissae must increase");

  m_.setZero(n + 1);
  if (n == 1) return;  // linear: zero curvature

  Eigen::VectorXd h(n);
  for (int i = 0; i < n; ++i) h(i) = x(i + 1) - x(i);

  if (n == 2) {
    // Single quadratic through three points: constant second derivative.
    const double d = 2.0 * ((y(2) - y(1)) / h(1) - (y(1) - y(0)) / h(0)) /
                     (h(0) + h(1));
    m_.setConstant(d);
    return;
  }

  // Tridiagonal system for interior second derivatives, with the
  // not-a-knot conditions folded into the first and last rows.
  const int k = n - 1;  // unknowns m_1 .. m_{n-1}
  Eigen::VectorXd lower(k), diag(k), upper(k), rhs(k);
  for (int i = 1; i <= k; ++i) {
    lower(i - 1) = h(i - 1);
    diag(i - 1) = 2.0 * (h(i - 1) + h(i));
    upper(i - 1) = h(i);
    rhs(i - 1) = 6.0 * ((y(i + 1) - y(i)) / h(i) - (y(i) - y(i - 1)) / h(i - 1));
  }
  // m_0 = (1 + h0/h1) m_1 - (h0/h1) m_2
  const double r0 = h(0) / h(1);
  diag(0) += h(0) * (1.0 + r0);
  upper(0) -= h(0) * r0;
  // m_n = (1 + h_{n-1}/h_{n-2}) m_{n-1} - (h_{n-1}/h_{n-2}) m_{n-2}
  const double rn = h(n - 1) / h(n - 2);
  diag(k - 1) += h(n - 1) * (1.0 + rn);
  lower(k - 1) -= h(n - 1) * rn;

  // Thomas algorithm.
  for (int i = 1; i < k; ++i) {
    const double f = lower(i) / diag(i - 1);
    diag(i) -= f * upper(i - 1);
    rhs(i) -= f * rhs(i - 1);
  }
  Eigen::VectorXd sol(k);
  sol(k - 1) = rhs(k - 1) / diag(k - 1);
  for (int i = k - 2; i >= 0; --i)
    sol(i) = (rhs(i) - upper(i) * sol(i + 1)) / diag(i);

  for (int i = 1; i <= k; ++i) m_(i) = sol(i - 1);
  m_(0) = (1.0 + r0) * m_(1) - r0 * m_(2);
  m_(n) = (1.0 + rn) * m_(n - 1) - rn * m_(n - 2);
}

double CubicSpline::operator()(double t) const {
  const int n = static_cast<int>(x_.size()) - 1;
  int i = static_cast<int>(std::upper_bound(x_.data(), x_.data() + n, t) -
                           x_.data()) -
          1;
  i = std::clamp(i, 0, n - 1);
  const double h = x_(i + 1) - x_(i);
  const double u = t - x_(i);
  const double b =
      (y_(i + 1) - y_(i)) / h - h * (2.0 * m_(i) + m_(i + 1)) / 6.0;
  return y_(i) + u * (b + u * (m_(i) / 2.0 + u * (m_(i + 1) - m_(i)) / (6.0 * h)));
}

std::vector<int> find_peaks(const Eigen::VectorXd& x, int min_distance,
                            double min_prominence) {
  const int n = static_cast<int>(x.size());
  std::vector<int> candidates;
  int i = 1;
  while (i < n - 1) {
    if (x(i) > x(i - 1)) {
      int j = i;
      while (j < n - 1 && x(j + 1) == x(j)) ++j;  // walk a plateau
      if (j < n - 1 && x(j + 1) < x(j)) candidates.push_back((i + j) / 2);
      i = j + 1;
    } else {
      ++i;
    }
  }

  // Prominence: height above the higher of the two valleys reached
  // before running into a taller sample (or the signal edge).
  std::vector<int> prominent;
  for (int p : candidates) {
    double left_min = x(p);
    for (int k = p - 1; k >= 0 && x(k) <= x(p); --k)
      left_min = std::min(left_min, x(k));
    double right_min = x(p);
    for (int k = p + 1; k < n && x(k) <= x(p); ++k)
      right_min = std::min(right_min, x(k));
    if (x(p) - std::max(left_min, right_min) >= min_prominence)
      prominent.push_back(p);
  }

  // Taller peaks claim their neighbourhood first.
  std::vector<int> by_height = prominent;
  std::stable_sort(by_height.begin(), by_height.end(),
                   [&](int a, int b) { return x(a) > x(b); });
  std::vector<int> accepted;
  for (int p : by_height) {
    bool ok = true;
    for (int q : accepted)
      if (std::abs(p - q) < min_distance) {
        ok = false;
        break;
      }
    if (ok) accepted.push_back(p);
  }
  std::sort(accepted.begin(), accepted.end());
  return accepted;
}

}  // namespace gaitlab
