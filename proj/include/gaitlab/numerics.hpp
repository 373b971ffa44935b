#pragma once

#include <Eigen/Dense>
#include <vector>

namespace gaitlab {

struct SymEigen {
  Eigen::VectorXd values;   // sorted descending
  Eigen::MatrixXd vectors;  // column i pairs with values(i)
};

// Eigendecomposition of a symmetric matrix by cyclic Jacobi rotations.
// Sweeps run until the off-diagonal Frobenius norm drops below 1e-12.
// Eigenvector signs are fixed so that the first component with
// |value| > 1e-9 is positive. Throws std::invalid_argument when the
// input is asymmetric beyond `symmetry_tol`.
SymEigen eigen_sym(const Eigen::MatrixXd& a, double symmetry_tol = 1e-9);

// Solves A X = B by Gaussian elimination with partial pivoting.
// Throws std::runtime_error on a numerically singular pivot.
Eigen::MatrixXd solve_gaussian(Eigen::MatrixXd a, Eigen::MatrixXd b);

// Piecewise-cubic interpolant through (x_i, y_i) with not-a-knot end
// conditions, so polynomials up to degree three are reproduced exactly.
// Degenerates to a single quadratic for three points and to a line for
// two. Knot abscissae must be strictly increasing.
class CubicSpline {
 public:
  CubicSpline(const Eigen::VectorXd& x, const Eigen::VectorXd& y);

  double operator()(double t) const;

 private:
  Eigen::VectorXd x_;
  Eigen::VectorXd y_;
  Eigen::VectorXd m_;  // second derivatives at the knots
};

// Indices of local maxima that are at least `min_prominence` above the
// higher of their two flanking valleys and at least `min_distance`
// samples apart (taller peaks win the distance contest). Plateau peaks
// report the centre sample of the flat run.
std::vector<int> find_peaks(const Eigen::VectorXd& x, int min_distance,
                            double min_prominence);

}  // namespace gaitlab
