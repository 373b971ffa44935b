#include "gaitlab/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace gaitlab {

namespace {

double circular_dot(const Eigen::VectorXd& a, const Eigen::VectorXd& b,
                    int shift) {
  const int n = static_cast<int>(a.size());
  double acc = 0.0;
  for (int k = 0; k < n; ++k) acc += a(k) * b((k + shift) % n);
  return acc;
}

double wrap_delay(int shift, int n) {
  double d = static_cast<double>(shift) / static_cast<double>(n);
  if (d >= 0.5) d -= 1.0;
  return d;
}

}  // namespace

CrossCovariance cross_covariance(const Eigen::VectorXd& a,
                                 const Eigen::VectorXd& b) {
  const int n = static_cast<int>(a.size());
  if (b.size() != n)
    throw std::invalid_argument("cross_covariance: length mismatch");
  if (n < 4)
    throw std::invalid_argument("cross_covariance: need at least 4 samples");

  const Eigen::VectorXd ac = a.array() - a.mean();
  const Eigen::VectorXd bc = b.array() - b.mean();

  const double gaa = circular_dot(ac, ac, 0);
  const double gbb = circular_dot(bc, bc, 0);
  const double floor_a = 1e-12 * (1.0 + a.cwiseAbs().maxCoeff());
  const double floor_b = 1e-12 * (1.0 + b.cwiseAbs().maxCoeff());
  if (gaa <= floor_a * floor_a * n || gbb <= floor_b * floor_b * n)
    throw std::invalid_argument("cross_covariance: zero-variance input");

  int best_shift = 0;
  double best_g = circular_dot(ac, bc, 0);
  for (int s = 1; s < n; ++s) {
    const double g = circular_dot(ac, bc, s);
    if (g > best_g ||
        (g == best_g &&
         std::abs(wrap_delay(s, n)) < std::abs(wrap_delay(best_shift, n)))) {
      best_g = g;
      best_shift = s;
    }
  }

  CrossCovariance out;
  out.value = best_g / std::sqrt(gaa * gbb);
  out.delay = wrap_delay(best_shift, n);
  return out;
}

KmpComparison compare_kmp_sets(const KmpSet& a, const KmpSet& b) {
  if (a.n_samples() != b.n_samples() || a.n_c != b.n_c)
    throw std::invalid_argument(
        "compare_kmp_sets: sets differ in shape (N_s " +
        std::to_string(a.n_samples()) + " vs " + std::to_string(b.n_samples()) +
        ", n_c " + std::to_string(a.n_c) + " vs " + std::to_string(b.n_c) +
        ")");
  KmpComparison out;
  for (int i = 0; i < a.n_c; ++i) {
    const CrossCovariance cc =
        cross_covariance(a.components.col(i), b.components.col(i));
    out.rows.push_back({i, cc.value, cc.delay});
  }
  return out;
}

SpeedReport speed_report(const TrajectoryLog& log, const std::string& gait_name,
                         const SegmentationParams& segmentation,
                         double trim_fraction) {
  if (!log.has_base)
    throw std::runtime_error("speed_report: log has no base position channel");
  const TrajectoryLog trimmed = trim(log, trim_fraction);
  const int n = trimmed.rows();
  const double elapsed = trimmed.time(n - 1) - trimmed.time(0);

  SpeedReport out;
  out.gait = gait_name;
  out.mean_speed = (trimmed.base_x(n - 1) - trimmed.base_x(0)) / elapsed;

  const auto segments = segment_cycles(trimmed, segmentation);
  const double dt = trimmed.time(1) - trimmed.time(0);
  std::vector<double> spans;
  for (const auto& seg : segments)
    spans.push_back(static_cast<double>(seg.rows() - 1));
  std::nth_element(spans.begin(), spans.begin() + spans.size() / 2,
                   spans.end());
  out.cycle_period = spans[spans.size() / 2] * dt;
  out.per_cycle_displacement = out.mean_speed * out.cycle_period;
  return out;
}

}  // namespace gaitlab
