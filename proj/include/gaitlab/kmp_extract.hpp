#pragma once

#include <Eigen/Dense>
#include <vector>

#include "gaitlab/numerics.hpp"
#include "gaitlab/trajectory.hpp"

namespace gaitlab {

// One phase-normalized mean cycle of all joint angles.
struct GaitCycle {
  Eigen::MatrixXd samples;  // N_s x 8, canonical joint column order
  Eigen::VectorXd phase;    // N_s values k / N_s in [0, 1)
  double period = 0.0;      // s

  int n_samples() const { return static_cast<int>(samples.rows()); }
};

// Largest first-vs-last-row gap; small for a well aligned cycle.
double periodicity_gap(const GaitCycle& cycle);

// Normalized principal-component waveforms with their mean offsets.
struct KmpSet {
  Eigen::MatrixXd components;    // N_s x n_c, each column unit infinity norm
  Eigen::VectorXd mean_offset;   // 8, rad
  Eigen::VectorXd eigenvalues;   // 8, descending, rad^2
  Eigen::MatrixXd eigenvectors;  // 8 x 8; empty when loaded from file
  int n_c = 0;

  int n_samples() const { return static_cast<int>(components.rows()); }
};

// Drops floor(fraction * rows) rows from each end of the log.
// Throws std::invalid_argument for fraction outside [0, 0.5) or when
// fewer than four rows survive.
TrajectoryLog trim(const TrajectoryLog& log, double fraction = 0.15);

struct SegmentationParams {
  int reference_channel = 0;  // joint column driving peak detection
  double min_period = 0.2;    // s
  double prominence = 0.05;   // rad
};

// Joint-angle spans between consecutive reference-channel peaks. Each
// segment carries its closing peak row as interpolation support, so a
// span of m samples is returned as an (m+1) x 8 block. Spans straying
// more than 25% from the median span are dropped.
// Throws std::runtime_error when fewer than three peaks exist.
std::vector<Eigen::MatrixXd> segment_cycles(const TrajectoryLog& log,
                                            const SegmentationParams& params);

struct AlignedSegments {
  std::vector<Eigen::MatrixXd> stack;  // each N_s x 8
  int skipped = 0;                     // degenerate segments dropped
};

// Resamples every segment onto N_s phase-uniform points with piecewise
// cubic interpolation through its samples.
AlignedSegments normalize_segments(const std::vector<Eigen::MatrixXd>& segments,
                                   int n_samples);

// Pointwise mean across the aligned stack; `period` is the source
// cycle duration in seconds.
GaitCycle mean_cycle(const AlignedSegments& aligned, double period);

// cov(X^) = X^T X^ / N with column means removed first.
Eigen::MatrixXd covariance(const GaitCycle& cycle);

// Projects the zero-mean cycle onto the leading n_c covariance
// eigenvectors and scales each projection to unit infinity norm.
// Throws std::runtime_error when a retained component has (numerically)
// zero projection.
KmpSet extract_kmps(const GaitCycle& cycle, int n_c);

// Prefix sums of the eigenvalues as percentages of their total.
Eigen::VectorXd cumulative_variance(const Eigen::VectorXd& eigenvalues);

// trim -> segment -> normalize -> mean -> extract, the whole pipeline.
struct ExtractionParams {
  double trim_fraction = 0.15;
  int n_samples = 100;
  int n_components = 4;
  SegmentationParams segmentation;
};

struct ExtractionResult {
  GaitCycle cycle;
  KmpSet kmps;
  int segments_used = 0;
  int segments_skipped = 0;
};

ExtractionResult extract_pipeline(const TrajectoryLog& log,
                                  const ExtractionParams& params);

}  // namespace gaitlab
