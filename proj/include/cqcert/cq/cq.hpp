#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "cqcert/model/problem.hpp"
#include "cqcert/numkit/dense.hpp"

namespace cqcert::cq {

enum class Verdict { Holds, Fails, Inconclusive };

std::string_view to_string(Verdict v) noexcept;

/// Holds only if both hold; Fails if either fails; otherwise Inconclusive.
Verdict conjunction(Verdict a, Verdict b) noexcept;

struct CheckConfig {
  double rank_tol = 1e-8;
  double eq_radius = 0.1;
  std::size_t eq_samples = 100;
  std::vector<double> eps_grid = {1e-1, 1e-2, 1e-3, 1e-4, 1e-5, 1e-6, 1e-7, 1e-8};
  double lp_tol = 1e-9;
  double angle_tol = 1e-6;
  double margin_tol = 1e-9;
  std::size_t aff_probes = 16;
  std::uint64_t seed = 0;

  /// Throws std::invalid_argument on out-of-range settings.
  void validate() const;
};

/// Subspaces at the base point. E2 = ker DH, E1 = E2^perp (the row space),
/// F1 = im DH, F2 = F1^perp; all bases have orthonormal columns.
struct SpaceSplit {
  std::size_t n = 0;
  std::size_t m = 0;
  std::size_t rank = 0;
  numkit::DenseMatrix e1;    // n x r
  numkit::DenseMatrix e2;    // n x (n - r)
  numkit::DenseMatrix f1;    // m x r
  numkit::DenseMatrix f2;    // m x (m - r)
  numkit::DenseMatrix p_f1;  // m x m, projector onto F1
  numkit::Vector singular_values;
};

SpaceSplit decompose_spaces(const numkit::DenseMatrix& j_h, double tol);

struct EqEvidence {
  Verdict verdict = Verdict::Holds;
  bool trivial = false;  // F2 = {0}
  std::size_t samples_checked = 0;
  std::size_t failing_samples = 0;
  double worst_intersection_angle = 0.0;  // radians
  std::size_t worst_rank_deviation = 0;
  numkit::Vector first_failure;  // empty when none
  std::string note;
};

EqEvidence check_eq_condition(const model::Problem& problem, const numkit::Vector& xbar,
                              const SpaceSplit& split, double radius, std::size_t n_samples,
                              double angle_tol, double rank_tol, std::uint64_t seed);

struct IqAttempt {
  double eps = 0.0;
  std::size_t active = 0;
  std::string lp_status;
  double margin = 0.0;  // -s*, -inf when the active set is empty
};

struct IqEvidence {
  Verdict verdict = Verdict::Fails;
  bool vacuous = false;     // every T_eps on the grid was empty
  numkit::Vector direction; // unit infinity-norm at most, empty when none
  double margin = 0.0;      // kappa; -inf when vacuous
  double eps_used = 0.0;
  std::string lp_status;
  std::vector<IqAttempt> attempts;
};

/// Strict-margin LP over the given rows:
///   max s  s.t.  E1^T d = 0,  <row_k, d> + s <= 0,  -1 <= d <= 1.
/// Returns the attempt record and the maximizing d.
IqAttempt strict_margin(const numkit::DenseMatrix& g_rows, const std::vector<std::size_t>& rows,
                        const SpaceSplit& split, double lp_tol, numkit::Vector* direction);

IqEvidence find_iq_direction(const model::JacobianBundle& bundle, const SpaceSplit& split,
                             const std::vector<double>& eps_grid, double lp_tol, double margin_tol);

/// min over eps of max over T_eps of <Dg_t, d>; -inf when every T_eps is empty.
double h_value(const model::JacobianBundle& bundle, const numkit::Vector& d,
               const std::vector<double>& eps_grid);

struct ConeMembership {
  bool member = false;
  bool strict = false;
  double h = 0.0;
};

ConeMembership linearized_cone_contains(const model::JacobianBundle& bundle, const numkit::Vector& d,
                                        double tol, const std::vector<double>& eps_grid);

struct AffEvidence {
  Verdict verdict = Verdict::Inconclusive;
  std::size_t active = 0;
  double exact_margin = 0.0;
  std::vector<double> implicit_equalities;  // t-values of witnesses
  std::string reason;
};

AffEvidence check_aff_assumption(const model::JacobianBundle& bundle, const SpaceSplit& split,
                                 std::size_t n_probe, double lp_tol, double margin_tol,
                                 std::uint64_t seed);

struct NfmcqEvidence {
  Verdict verdict = Verdict::Inconclusive;
  std::string reason;
  std::size_t generators = 0;
  double modulus = 0.0;       // max step of t -> v_t on the grid
  double coarse_modulus = 0.0;  // same on every other grid point
};

NfmcqEvidence check_nfmcq(const model::Problem& problem, const model::JacobianBundle& bundle,
                          double lp_tol);

struct CqReport {
  Verdict mfcq = Verdict::Inconclusive;
  Verdict pmfcq = Verdict::Inconclusive;
  Verdict gpmfcq = Verdict::Inconclusive;
  Verdict nfmcq = Verdict::Inconclusive;
  Verdict aff_assumption = Verdict::Inconclusive;
  model::JacobianBundle bundle;
  double k_violation = 0.0;
  SpaceSplit split;
  EqEvidence eq;
  IqEvidence iq;
  IqAttempt exact;  // strict margin on the exact active set
  AffEvidence aff;
  NfmcqEvidence nfmcq_evidence;
  std::vector<std::string> notes;
};

CqReport check_cq(const model::Problem& problem, const CheckConfig& config);

}  // namespace cqcert::cq
