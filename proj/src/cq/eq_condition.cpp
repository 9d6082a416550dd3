#include <algorithm>
#include <numbers>
#include <stdexcept>

#include "cqcert/cq/cq.hpp"
#include "cqcert/error.hpp"
#include "cqcert/numkit/linalg.hpp"
#include "cqcert/rng.hpp"

namespace cqcert::cq {

EqEvidence check_eq_condition(const model::Problem& problem, const numkit::Vector& xbar,
                              const SpaceSplit& split, double radius, std::size_t n_samples,
                              double angle_tol, double rank_tol, std::uint64_t seed) {
  if (!(radius > 0.0)) throw std::invalid_argument("eq check: radius must be positive");
  if (n_samples < 1) throw std::invalid_argument("eq check: need at least one sample");
  EqEvidence ev;
  ev.worst_intersection_angle = std::numbers::pi / 2;
  if (split.f2.cols() == 0) {
    // r = m: rank cannot drop nearby and cannot exceed m.
    ev.trivial = true;
    ev.verdict = Verdict::Holds;
    ev.note = "F2 = {0}; the condition holds trivially";
    return ev;
  }

  Rng rng(seed, Stream::EqSampling);
  numkit::Vector x(xbar.size());
  for (std::size_t s = 0; s < n_samples; ++s) {
    for (std::size_t i = 0; i < x.size(); ++i) x[i] = xbar[i] + radius * (2.0 * rng.uniform() - 1.0);
    numkit::DenseMatrix j;
    try {
      j = problem.jacobian_h(x);
    } catch (const DomainError& e) {
      ev.verdict = Verdict::Inconclusive;
      ev.note = std::string("Jacobian undefined at a sample: ") + e.what();
      return ev;
    }
    const numkit::RankDecomposition rd = numkit::rank_decompose(j, rank_tol);
    const std::size_t deviation = rd.rank > split.rank ? rd.rank - split.rank : split.rank - rd.rank;
    const double angle = numkit::smallest_principal_angle(rd.image_basis, split.f2);
    ++ev.samples_checked;
    ev.worst_rank_deviation = std::max(ev.worst_rank_deviation, deviation);
    ev.worst_intersection_angle = std::min(ev.worst_intersection_angle, angle);
    if (deviation != 0 || !(angle > angle_tol)) {
      if (ev.failing_samples++ == 0) ev.first_failure = x;
    }
  }
  ev.verdict = ev.failing_samples == 0 ? Verdict::Holds : Verdict::Fails;
  return ev;
}

}  // namespace cqcert::cq
