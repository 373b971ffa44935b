#include "gaitlab/gait_synthesis.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

#include "gaitlab/numerics.hpp"

namespace gaitlab {

void GaitSpec::validate() const {
  for (double o : offsets)
    if (o < 0.0 || o >= 1.0)
      throw std::invalid_argument("GaitSpec: offsets must lie in [0, 1)");
  if (reshape)
    for (int i = 0; i < 4; ++i)
      if (radial_scale[i] <= 0.5 || radial_scale[i] >= 1.5 ||
          angular_scale[i] <= 0.5 || angular_scale[i] >= 1.5)
        throw std::invalid_argument(
            "GaitSpec: reshape scales must lie in (0.5, 1.5)");
}

Eigen::MatrixXd pseudo_inverse(const Eigen::MatrixXd& p) {
  if (p.rows() < p.cols())
    throw std::invalid_argument("pseudo_inverse: P must have N >= n_c");
  const Eigen::MatrixXd gram = p.transpose() * p;
  const SymEigen eig = eigen_sym(gram);
  const double lo = eig.values(eig.values.size() - 1);
  if (lo <= 1e-10) {
    const double cond = lo > 0.0 ? eig.values(0) / lo
                                 : std::numeric_limits<double>::infinity();
    throw std::runtime_error(
        "pseudo_inverse: rank-deficient P (condition estimate " +
        std::to_string(cond) + ")");
  }
  return solve_gaussian(gram, p.transpose());
}

SynergyMatrix fit_synergy(const KmpSet& kmps, const GaitCycle& target) {
  if (kmps.n_samples() != target.n_samples())
    throw std::invalid_argument("fit_synergy: N_s mismatch between kMPs (" +
                                std::to_string(kmps.n_samples()) +
                                ") and target (" +
                                std::to_string(target.n_samples()) + ")");
  Eigen::MatrixXd centered = target.samples;
  centered.rowwise() -= kmps.mean_offset.transpose();

  SynergyMatrix out;
  out.s = pseudo_inverse(kmps.components) * centered;
  out.residual =
      (kmps.components * out.s - centered).cwiseAbs().maxCoeff();
  return out;
}

ReconstructedGait reconstruct(const KmpSet& kmps, const SynergyMatrix& synergy,
                              const LegGeometry& geometry) {
  if (synergy.n_c() != kmps.n_c)
    throw std::invalid_argument("reconstruct: synergy has " +
                                std::to_string(synergy.n_c()) +
                                " rows for " + std::to_string(kmps.n_c) +
                                " components");
  ReconstructedGait out;
  out.cycle.samples = kmps.components * synergy.s;
  out.cycle.samples.rowwise() += kmps.mean_offset.transpose();

  const int n = static_cast<int>(out.cycle.samples.rows());
  for (int k = 0; k < n; ++k) {
    for (int leg = 0; leg < kNumLegs; ++leg) {
      const JointPair j{out.cycle.samples(k, 2 * leg),
                        out.cycle.samples(k, 2 * leg + 1)};
      const JointPair c = clamp_joints(geometry, j);
      if (c.beta1 != j.beta1) ++out.clamped_samples;
      if (c.beta2 != j.beta2) ++out.clamped_samples;
      out.cycle.samples(k, 2 * leg) = c.beta1;
      out.cycle.samples(k, 2 * leg + 1) = c.beta2;
    }
  }
  out.cycle.phase.resize(n);
  for (int k = 0; k < n; ++k)
    out.cycle.phase(k) = static_cast<double>(k) / static_cast<double>(n);
  return out;
}

namespace {

Eigen::VectorXd rotate_column(const Eigen::VectorXd& col, int shift) {
  const int n = static_cast<int>(col.size());
  Eigen::VectorXd out(n);
  for (int k = 0; k < n; ++k) out(k) = col(((k - shift) % n + n) % n);
  return out;
}

const char* leg_label(int leg) {
  static constexpr const char* names[4] = {"fl", "fr", "bl", "br"};
  return names[leg];
}

}  // namespace

GaitCycle derive_gait(const GaitCycle& source, const GaitSpec& spec,
                      const LegGeometry& geometry) {
  spec.validate();
  GaitCycle out = source;
  const int n = source.n_samples();
  if (n < 1) throw std::invalid_argument("derive_gait: empty cycle");

  for (int leg = 0; leg < kNumLegs; ++leg) {
    const int shift =
        static_cast<int>(std::llround(spec.offsets[leg] * n)) % n;
    if (shift == 0) continue;
    out.samples.col(2 * leg) = rotate_column(source.samples.col(2 * leg), shift);
    out.samples.col(2 * leg + 1) =
        rotate_column(source.samples.col(2 * leg + 1), shift);
  }

  if (!spec.reshape) return out;

  // Mean-preserving scaling of each leg's endpoint trace about its own
  // cycle mean, done in (r, alpha) space.
  for (int leg = 0; leg < kNumLegs; ++leg) {
    Eigen::VectorXd r(n), alpha(n);
    for (int k = 0; k < n; ++k) {
      const PolarEndpoint p = forward_kinematics(
          geometry,
          {out.samples(k, 2 * leg), out.samples(k, 2 * leg + 1)});
      r(k) = p.r;
      alpha(k) = p.alpha;
    }
    const double r_mean = r.mean();
    const double a_mean = alpha.mean();
    for (int k = 0; k < n; ++k) {
      const PolarEndpoint scaled{
          r_mean + spec.radial_scale[leg] * (r(k) - r_mean),
          a_mean + spec.angular_scale[leg] * (alpha(k) - a_mean)};
      JointPair j;
      try {
        j = inverse_kinematics(geometry, scaled, leg_label(leg));
      } catch (const std::domain_error& e) {
        throw std::domain_error("derive_gait: reshape at phase index " +
                                std::to_string(k) + ": " + e.what());
      }
      out.samples(k, 2 * leg) = j.beta1;
      out.samples(k, 2 * leg + 1) = j.beta2;
    }
  }
  return out;
}

const std::map<std::string, GaitSpec>& builtin_gait_specs() {
  static const std::map<std::string, GaitSpec> specs = [] {
    std::map<std::string, GaitSpec> m;
    m["trot"].offsets = {0.0, 0.5, 0.5, 0.0};
    m["walk"].offsets = {0.0, 0.5, 0.75, 0.25};
    m["bound"].offsets = {0.0, 0.0, 0.5, 0.5};
    m["gallop"].offsets = {0.0, 0.1, 0.5, 0.6};
    return m;
  }();
  return specs;
}

GaitSpec relative_to_trot(const GaitSpec& target) {
  const GaitSpec& trot = builtin_gait_specs().at("trot");
  GaitSpec out = target;
  for (int leg = 0; leg < kNumLegs; ++leg) {
    double d = target.offsets[leg] - trot.offsets[leg];
    d -= std::floor(d);  // wrap into [0, 1)
    out.offsets[leg] = d;
  }
  return out;
}

}  // namespace gaitlab
