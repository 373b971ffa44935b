#pragma once

#include <Eigen/Dense>
#include <array>
#include <map>
#include <string>

#include "gaitlab/kmp_extract.hpp"
#include "gaitlab/leg_kinematics.hpp"

namespace gaitlab {

// Coefficient map from kMP coordinates to joint angles, with the
// least-squares residual of its fit.
struct SynergyMatrix {
  Eigen::MatrixXd s;       // n_c x 8, rad per unit component
  double residual = 0.0;   // max |P*S - (Q - Z)| over the fit

  int n_c() const { return static_cast<int>(s.rows()); }
};

// Per-leg phase offsets (cycle fractions) and optional mean-preserving
// endpoint reshape scales, ordered FL, FR, BL, BR.
struct GaitSpec {
  std::array<double, 4> offsets{0.0, 0.0, 0.0, 0.0};
  bool reshape = false;
  std::array<double, 4> radial_scale{1.0, 1.0, 1.0, 1.0};
  std::array<double, 4> angular_scale{1.0, 1.0, 1.0, 1.0};

  void validate() const;  // offsets in [0,1), scales in (0.5, 1.5)
};

struct ReconstructedGait {
  GaitCycle cycle;
  int clamped_samples = 0;  // joint values projected onto their limits
  std::string kmp_id;
  std::string synergy_id;
};

// Moore-Penrose left inverse (P^T P)^-1 P^T via Gaussian elimination.
// Throws std::runtime_error with a condition estimate when P is rank
// deficient (smallest eigenvalue of P^T P <= 1e-10).
Eigen::MatrixXd pseudo_inverse(const Eigen::MatrixXd& p);

// S = P_inv * (Q_s - Z), the least-squares map from components to the
// target cycle.
SynergyMatrix fit_synergy(const KmpSet& kmps, const GaitCycle& target);

// Q = P * S + Z, clamped to the joint limits afterwards.
ReconstructedGait reconstruct(const KmpSet& kmps, const SynergyMatrix& synergy,
                              const LegGeometry& geometry = {});

// Rotates each leg's column pair by round(offset * N_s) samples (a pure
// per-joint permutation), then applies any endpoint reshaping in (r,
// alpha) space. Throws std::domain_error when a reshaped endpoint
// leaves the reachable annulus.
GaitCycle derive_gait(const GaitCycle& source, const GaitSpec& spec,
                      const LegGeometry& geometry = {});

// Footfall phase tables for the four named gaits.
const std::map<std::string, GaitSpec>& builtin_gait_specs();

// Offsets rebased so that applying the result to a trot-phased source
// lands the legs on `target`'s footfall phases; trot maps to identity.
GaitSpec relative_to_trot(const GaitSpec& target);

}  // namespace gaitlab
