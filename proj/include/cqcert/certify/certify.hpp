#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "cqcert/cq/cq.hpp"
#include "cqcert/model/problem.hpp"
#include "cqcert/numkit/dense.hpp"

namespace cqcert::certify {

/// Dg_t shared by one or more sampled indices.
struct Ray {
  numkit::Vector gradient;
  std::vector<std::size_t> positions;  // into the sampled index set
  std::vector<double> t_values;
};

/// cone{rays} + span{subspace columns}. The subspace is the row space of
/// DH(x), given by an orthonormal basis.
struct NormalConeModel {
  double eps = 0.0;
  std::size_t n = 0;
  std::vector<Ray> rays;
  numkit::DenseMatrix subspace;  // n x r
};

NormalConeModel normal_cone_model(const model::JacobianBundle& bundle, const cq::SpaceSplit& split,
                                  double eps);

enum class Membership { Inside, Outside, Inconclusive };

std::string_view to_string(Membership m) noexcept;

struct MembershipCertificate {
  Membership verdict = Membership::Inconclusive;
  numkit::Vector lambda;           // one per ray, >= 0
  numkit::Vector subspace_coeffs;  // one per subspace column
  double residual = 0.0;           // ||R lambda + S c - v||_2
  numkit::Vector farkas;           // unit y when outside
  double farkas_value = 0.0;       // <y, v>
  double max_ray_product = 0.0;    // max <y, ray> / ||ray||
  double max_subspace_product = 0.0;
  std::string note;
};

/// LP: min sum(lambda) s.t. R lambda + S c = v, lambda >= 0. Outside verdicts
/// carry y with <y, ray> <= 0, <y, s> = 0 and <y, v> > 0.
MembershipCertificate normal_cone_membership(const NormalConeModel& model, const numkit::Vector& v,
                                             double tol);

struct RayMultiplier {
  double t = 0.0;  // first index of the merged ray
  std::size_t multiplicity = 1;
  double lambda = 0.0;
};

struct MultiplierCertificate {
  std::vector<RayMultiplier> lambda;  // support only
  numkit::Vector subspace_coeffs;
  numkit::Vector mu;  // minimum-norm equality multiplier in R^m
  numkit::Vector w;   // mu in F1 coordinates
  double residual = 0.0;
  double complementarity_gap = 0.0;
  double hurwicz_residual = 0.0;
};

struct KktRefutation {
  numkit::Vector direction;
  double slope = 0.0;             // <grad f, y> < 0
  double kernel_residual = 0.0;   // ||DH y||_inf
  double max_active_product = 0.0;  // max over T_eps of <Dg_t, y>
};

enum class KktStatus { Certified, Refuted, Inconclusive };

std::string_view to_string(KktStatus s) noexcept;

struct KktEpsVerdict {
  double eps = 0.0;
  std::size_t rays = 0;
  Membership verdict = Membership::Inconclusive;
};

struct KktOutcome {
  KktStatus status = KktStatus::Inconclusive;
  double eps_used = 0.0;
  std::vector<KktEpsVerdict> per_eps;
  std::optional<MultiplierCertificate> certificate;
  std::optional<KktRefutation> refutation;
  std::string note;
};

/// Membership of -grad f at every eps; the two smallest must agree.
KktOutcome kkt_certificate(const model::JacobianBundle& bundle, const cq::SpaceSplit& split,
                           const std::vector<double>& eps_grid, double tol);

struct RestoreResult {
  numkit::Vector x;
  bool converged = false;
  std::size_t iterations = 0;
  double residual = 0.0;  // ||H(x)||_inf
  std::vector<double> trace;
};

/// Damped Gauss-Newton onto H = 0: x <- x - a DH(x)^+ H(x), halving a until
/// the residual decreases. Stops at ||H||_inf <= target or max_iter.
RestoreResult restore_feasibility(const model::Problem& problem, numkit::Vector x0,
                                  double rank_tol = 1e-8, std::size_t max_iter = 50,
                                  double target = 1e-12);

struct StepRecord {
  double q = 0.0;
  numkit::Vector restored;
  double h_residual = 0.0;
  double g_violation = 0.0;
  double correction_ratio = 0.0;  // ||x(q) - (x + q d)|| / q
  std::size_t iterations = 0;
  bool converged = false;
  std::vector<double> trace;
};

enum class CurveVerdict { Tangent, NonTangent, Failed };

std::string_view to_string(CurveVerdict v) noexcept;

struct CurveEvidence {
  numkit::Vector direction;
  std::vector<StepRecord> steps;
  double max_h_residual = 0.0;
  double max_g_violation = 0.0;
  double correction_ratio = 0.0;  // max over steps
  bool ratio_decreasing = false;
  bool in_linearized_cone = false;
  bool strict = false;
  CurveVerdict verdict = CurveVerdict::Failed;
  std::string note;
};

inline const std::vector<double> kDefaultAbadieSteps = {1e-1, 1e-2, 1e-3, 1e-4};

CurveEvidence abadie_probe(const model::Problem& problem, const numkit::Vector& d,
                           const std::vector<double>& steps, const cq::CheckConfig& config);

struct TangentSampleSet {
  std::vector<numkit::Vector> directions;  // unit 2-norm
  std::size_t attempts = 0;
  std::size_t restoration_failures = 0;
  std::size_t infeasible = 0;
  std::size_t degenerate = 0;
  std::string report;
};

/// Random restored feasible points near x, returned as unit directions.
/// Scales are radius * 10^(-3U) with U uniform on [0, 1).
TangentSampleSet tangent_samples(const model::Problem& problem, const numkit::Vector& x,
                                 std::size_t n_samples, double radius, std::uint64_t seed);

}  // namespace cqcert::certify
