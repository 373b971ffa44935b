#include "gaitlab/kmp_extract.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace gaitlab {

void TrajectoryLog::validate() const {
  const int n = rows();
  if (n < 2) throw std::invalid_argument("TrajectoryLog: need at least 2 rows");
  if (joints.rows() != n || vels.rows() != n || taus.rows() != n ||
      quat.rows() != n)
    throw std::invalid_argument("TrajectoryLog: block row counts differ");
  if (joints.cols() != kNumJoints || vels.cols() != kNumJoints ||
      taus.cols() != kNumJoints || quat.cols() != 4)
    throw std::invalid_argument("TrajectoryLog: block column counts wrong");
  if (has_base && (base_x.size() != n || base_z.size() != n))
    throw std::invalid_argument("TrajectoryLog: base column length mismatch");
  const double dt = time(1) - time(0);
  if (!(dt > 0.0))
    throw std::invalid_argument("TrajectoryLog: time must increase");
  for (int i = 1; i < n; ++i) {
    const double step = time(i) - time(i - 1);
    if (!(step > 0.0) || std::abs(step - dt) > 1e-9)
      throw std::invalid_argument(
          "TrajectoryLog: non-uniform sampling at row " + std::to_string(i));
  }
}

TrajectoryLog TrajectoryLog::slice(int begin, int end) const {
  if (begin < 0 || end > rows() || begin >= end)
    throw std::invalid_argument("TrajectoryLog::slice: bad range");
  TrajectoryLog out;
  const int n = end - begin;
  out.time = time.segment(begin, n);
  out.joints = joints.middleRows(begin, n);
  out.vels = vels.middleRows(begin, n);
  out.taus = taus.middleRows(begin, n);
  out.quat = quat.middleRows(begin, n);
  out.has_base = has_base;
  if (has_base) {
    out.base_x = base_x.segment(begin, n);
    out.base_z = base_z.segment(begin, n);
  }
  return out;
}

double periodicity_gap(const GaitCycle& cycle) {
  if (cycle.n_samples() < 2) return 0.0;
  return (cycle.samples.row(0) - cycle.samples.row(cycle.n_samples() - 1))
      .cwiseAbs()
      .maxCoeff();
}

TrajectoryLog trim(const TrajectoryLog& log, double fraction) {
  if (fraction < 0.0 || fraction >= 0.5)
    throw std::invalid_argument("trim: fraction must be in [0, 0.5)");
  const int n = log.rows();
  const int cut = static_cast<int>(std::floor(fraction * n));
  const int remaining = n - 2 * cut;
  if (remaining < 4)
    throw std::invalid_argument("trim: only " + std::to_string(remaining) +
                                " rows left, too short for cycle analysis");
  if (cut == 0) return log;
  return log.slice(cut, n - cut);
}

std::vector<Eigen::MatrixXd> segment_cycles(const TrajectoryLog& log,
                                            const SegmentationParams& params) {
  if (params.reference_channel < 0 || params.reference_channel >= kNumJoints)
    throw std::invalid_argument("segment_cycles: reference channel out of range");
  log.validate();
  const double dt = log.time(1) - log.time(0);
  const int min_distance =
      std::max(1, static_cast<int>(std::round(params.min_period / dt)));

  const Eigen::VectorXd ref = log.joints.col(params.reference_channel);
  const std::vector<int> peaks =
      find_peaks(ref, min_distance, params.prominence);
  if (peaks.size() < 3)
    throw std::runtime_error(
        std::string("segment_cycles: no periodic structure detected on ") +
        kJointColumns[params.reference_channel] + " (" +
        std::to_string(peaks.size()) + " peaks)");

  std::vector<int> spans;
  for (std::size_t k = 0; k + 1 < peaks.size(); ++k)
    spans.push_back(peaks[k + 1] - peaks[k]);
  std::vector<int> sorted_spans = spans;
  std::nth_element(sorted_spans.begin(),
                   sorted_spans.begin() + sorted_spans.size() / 2,
                   sorted_spans.end());
  const double median = sorted_spans[sorted_spans.size() / 2];

  std::vector<Eigen::MatrixXd> segments;
  for (std::size_t k = 0; k + 1 < peaks.size(); ++k) {
    if (std::abs(spans[k] - median) > 0.25 * median) continue;
    // Include the closing peak row as interpolation support.
    segments.push_back(
        log.joints.middleRows(peaks[k], spans[k] + 1));
  }
  return segments;
}

AlignedSegments normalize_segments(const std::vector<Eigen::MatrixXd>& segments,
                                   int n_samples) {
  if (n_samples < 2)
    throw std::invalid_argument("normalize_segments: n_samples must be >= 2");
  AlignedSegments out;
  for (const Eigen::MatrixXd& seg : segments) {
    const int support = static_cast<int>(seg.rows());
    if (support < 4) {
      ++out.skipped;
      continue;
    }
    const int span = support - 1;  // seg covers phases 0 .. 1 inclusive
    Eigen::VectorXd phases(support);
    for (int j = 0; j < support; ++j)
      phases(j) = static_cast<double>(j) / static_cast<double>(span);
    Eigen::MatrixXd aligned(n_samples, seg.cols());
    for (int c = 0; c < seg.cols(); ++c) {
      const CubicSpline spline(phases, seg.col(c));
      for (int k = 0; k < n_samples; ++k)
        aligned(k, c) =
            spline(static_cast<double>(k) / static_cast<double>(n_samples));
    }
    out.stack.push_back(std::move(aligned));
  }
  return out;
}

GaitCycle mean_cycle(const AlignedSegments& aligned, double period) {
  if (aligned.stack.empty())
    throw std::invalid_argument("mean_cycle: no aligned segments");
  GaitCycle cycle;
  cycle.samples = aligned.stack[0];
  for (std::size_t s = 1; s < aligned.stack.size(); ++s) {
    if (aligned.stack[s].rows() != cycle.samples.rows())
      throw std::invalid_argument("mean_cycle: inconsistent segment shape");
    cycle.samples += aligned.stack[s];
  }
  cycle.samples /= static_cast<double>(aligned.stack.size());
  const int n = cycle.n_samples();
  cycle.phase.resize(n);
  for (int k = 0; k < n; ++k)
    cycle.phase(k) = static_cast<double>(k) / static_cast<double>(n);
  cycle.period = period;
  return cycle;
}

Eigen::MatrixXd covariance(const GaitCycle& cycle) {
  const int n = cycle.n_samples();
  if (n < 2) throw std::invalid_argument("covariance: need at least 2 samples");
  Eigen::MatrixXd centered = cycle.samples;
  centered.rowwise() -= cycle.samples.colwise().mean();
  return centered.transpose() * centered / static_cast<double>(n);
}

KmpSet extract_kmps(const GaitCycle& cycle, int n_c) {
  const int nj = static_cast<int>(cycle.samples.cols());
  if (n_c < 1 || n_c > nj)
    throw std::invalid_argument("extract_kmps: n_c must be in [1, " +
                                std::to_string(nj) + "]");
  KmpSet set;
  set.n_c = n_c;
  set.mean_offset = cycle.samples.colwise().mean().transpose();

  Eigen::MatrixXd centered = cycle.samples;
  centered.rowwise() -= set.mean_offset.transpose();

  const SymEigen eig = eigen_sym(covariance(cycle));
  set.eigenvalues = eig.values;
  set.eigenvectors = eig.vectors;

  set.components.resize(cycle.n_samples(), n_c);
  for (int i = 0; i < n_c; ++i) {
    Eigen::VectorXd projection = centered * eig.vectors.col(i);
    const double inf_norm = projection.cwiseAbs().maxCoeff();
    if (inf_norm < 1e-12)
      throw std::runtime_error("extract_kmps: component " + std::to_string(i) +
                               " has zero projection; reduce n_c");
    set.components.col(i) = projection / inf_norm;
  }
  return set;
}

Eigen::VectorXd cumulative_variance(const Eigen::VectorXd& eigenvalues) {
  const int n = static_cast<int>(eigenvalues.size());
  if (n == 0) throw std::invalid_argument("cumulative_variance: empty input");
  for (int i = 0; i < n; ++i) {
    if (eigenvalues(i) < -1e-12)
      throw std::invalid_argument(
          "cumulative_variance: negative eigenvalue at " + std::to_string(i));
    if (i > 0 && eigenvalues(i) > eigenvalues(i - 1) + 1e-12)
      throw std::invalid_argument(
          "cumulative_variance: eigenvalues not sorted descending");
  }
  const double total = eigenvalues.sum();
  if (!(total > 0.0))
    throw std::invalid_argument("cumulative_variance: all eigenvalues zero");
  Eigen::VectorXd out(n);
  double acc = 0.0;
  for (int i = 0; i < n; ++i) {
    acc += eigenvalues(i);
    out(i) = acc / total * 100.0;
  }
  return out;
}

ExtractionResult extract_pipeline(const TrajectoryLog& log,
                                  const ExtractionParams& params) {
  const TrajectoryLog trimmed = trim(log, params.trim_fraction);
  const auto segments = segment_cycles(trimmed, params.segmentation);
  const AlignedSegments aligned =
      normalize_segments(segments, params.n_samples);
  if (aligned.stack.empty())
    throw std::runtime_error("extract_pipeline: every segment was degenerate");

  // Median retained span in samples, converted to seconds.
  const double dt = trimmed.time(1) - trimmed.time(0);
  std::vector<double> spans;
  for (const auto& seg : segments)
    if (seg.rows() >= 4) spans.push_back(static_cast<double>(seg.rows() - 1));
  std::nth_element(spans.begin(), spans.begin() + spans.size() / 2,
                   spans.end());
  const double period = spans[spans.size() / 2] * dt;

  ExtractionResult out;
  out.cycle = mean_cycle(aligned, period);
  out.kmps = extract_kmps(out.cycle, params.n_components);
  out.segments_used = static_cast<int>(aligned.stack.size());
  out.segments_skipped = aligned.skipped;
  return out;
}

}  // namespace gaitlab
