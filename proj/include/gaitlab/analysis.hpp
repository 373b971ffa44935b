#pragma once

#include <Eigen/Dense>
#include <string>
#include <vector>

#include "gaitlab/kmp_extract.hpp"
#include "gaitlab/trajectory.hpp"

namespace gaitlab {

struct CrossCovariance {
  double value = 0.0;  // peak normalized circular cross-correlation, [-1, 1]
  double delay = 0.0;  // maximizing shift as a cycle fraction in [-0.5, 0.5)
};

// Peak of the normalized circular cross-correlation of the mean-centred
// signals over all integer shifts; ties resolve toward the smaller
// |delay|. Throws std::invalid_argument on length mismatch, fewer than
// four samples, or an input with zero variance.
CrossCovariance cross_covariance(const Eigen::VectorXd& a,
                                 const Eigen::VectorXd& b);

struct KmpComparison {
  struct Row {
    int index = 0;  // component number, 0-based
    double value = 0.0;
    double delay = 0.0;
  };
  std::vector<Row> rows;
};

// Componentwise cross-covariance of matching kMP columns.
KmpComparison compare_kmp_sets(const KmpSet& a, const KmpSet& b);

struct SpeedReport {
  std::string gait;
  double mean_speed = 0.0;             // m/s
  double per_cycle_displacement = 0.0; // m
  double cycle_period = 0.0;           // s
};

// Net base displacement over elapsed time on the trimmed log, with the
// cycle period taken from peak segmentation. Throws std::runtime_error
// when the log carries no base position channel.
SpeedReport speed_report(const TrajectoryLog& log, const std::string& gait_name,
                         const SegmentationParams& segmentation = {},
                         double trim_fraction = 0.15);

}  // namespace gaitlab
