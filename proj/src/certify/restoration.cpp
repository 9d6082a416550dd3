#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "cqcert/certify/certify.hpp"
#include "cqcert/error.hpp"
#include "cqcert/kernels.hpp"
#include "cqcert/numkit/linalg.hpp"
#include "cqcert/rng.hpp"

namespace cqcert::certify {

namespace {

constexpr double kHTol = 1e-10;
constexpr double kGTol = 1e-8;
constexpr double kZeroRatio = 1e-15;
constexpr std::size_t kMaxHalvings = 30;

double g_violation(const model::Problem& problem, const numkit::Vector& x) {
  if (!problem.has_inequalities()) return 0.0;
  return std::max(0.0, kernels::max_element(problem.inequalities(x)));
}

}  // namespace

std::string_view to_string(CurveVerdict v) noexcept {
  switch (v) {
    case CurveVerdict::Tangent:
      return "tangent";
    case CurveVerdict::NonTangent:
      return "non-tangent";
    case CurveVerdict::Failed:
      return "failed";
  }
  return "failed";
}

RestoreResult restore_feasibility(const model::Problem& problem, numkit::Vector x0, double rank_tol,
                                  std::size_t max_iter, double target) {
  RestoreResult out;
  out.x = std::move(x0);
  if (problem.n_equalities() == 0) {
    out.converged = true;
    out.trace.push_back(0.0);
    return out;
  }
  numkit::Vector h = problem.equalities(out.x);
  out.residual = kernels::max_abs(h);
  out.trace.push_back(out.residual);
  while (out.residual > target && out.iterations < max_iter) {
    const numkit::DenseMatrix j = problem.jacobian_h(out.x);
    const numkit::Vector step = numkit::pseudo_solve(j, h, rank_tol);
    double alpha = 1.0;
    bool accepted = false;
    for (std::size_t k = 0; k <= kMaxHalvings; ++k, alpha *= 0.5) {
      const numkit::Vector trial = numkit::axpy(-alpha, step, out.x);
      numkit::Vector ht;
      try {
        ht = problem.equalities(trial);
      } catch (const DomainError&) {
        continue;
      }
      const double rt = kernels::max_abs(ht);
      if (rt < out.residual) {
        out.x = trial;
        h = std::move(ht);
        out.residual = rt;
        accepted = true;
        break;
      }
    }
    ++out.iterations;
    out.trace.push_back(out.residual);
    if (!accepted) break;
  }
  out.converged = out.residual <= target;
  return out;
}

CurveEvidence abadie_probe(const model::Problem& problem, const numkit::Vector& d,
                           const std::vector<double>& steps, const cq::CheckConfig& config) {
  const numkit::Vector& xbar = problem.point();
  if (d.size() != xbar.size()) throw DimensionError("abadie probe: direction length mismatch");
  if (steps.empty()) throw std::invalid_argument("abadie probe: no step sizes");
  for (std::size_t k = 0; k < steps.size(); ++k) {
    if (!(steps[k] > 0.0)) throw std::invalid_argument("abadie probe: step sizes must be positive");
    if (k > 0 && !(steps[k] < steps[k - 1]))
      throw std::invalid_argument("abadie probe: step sizes must be decreasing");
  }
  CurveEvidence ev;
  ev.direction = d;
  const model::JacobianBundle bundle = problem.jacobians_at(xbar);
  const cq::ConeMembership cone = cq::linearized_cone_contains(bundle, d, 1e-9, config.eps_grid);
  ev.in_linearized_cone = cone.member;
  ev.strict = cone.strict;

  bool newton_failed = false;
  for (double q : steps) {
    StepRecord rec;
    rec.q = q;
    const numkit::Vector start = numkit::axpy(q, d, xbar);
    try {
      RestoreResult r = restore_feasibility(problem, start, config.rank_tol);
      rec.restored = std::move(r.x);
      rec.h_residual = r.residual;
      rec.iterations = r.iterations;
      rec.converged = r.converged;
      rec.trace = std::move(r.trace);
      rec.g_violation = g_violation(problem, rec.restored);
    } catch (const DomainError& e) {
      rec.restored = start;
      rec.h_residual = std::numeric_limits<double>::infinity();
      rec.g_violation = std::numeric_limits<double>::infinity();
      ev.note = e.what();
    }
    rec.correction_ratio = numkit::norm2(numkit::axpy(-1.0, start, rec.restored)) / q;
    newton_failed = newton_failed || !rec.converged;
    ev.max_h_residual = std::max(ev.max_h_residual, rec.h_residual);
    ev.max_g_violation = std::max(ev.max_g_violation, rec.g_violation);
    ev.correction_ratio = std::max(ev.correction_ratio, rec.correction_ratio);
    ev.steps.push_back(std::move(rec));
  }

  // Ratio trend over the last three steps: strictly decreasing, or already at
  // rounding level (an exactly feasible straight line needs no correction).
  const std::size_t tail = std::min<std::size_t>(3, ev.steps.size());
  bool decreasing = tail >= 2;
  bool negligible = true;
  for (std::size_t k = ev.steps.size() - tail; k < ev.steps.size(); ++k) {
    negligible = negligible && ev.steps[k].correction_ratio <= kZeroRatio;
    if (k > ev.steps.size() - tail)
      decreasing = decreasing && ev.steps[k].correction_ratio < ev.steps[k - 1].correction_ratio;
  }
  ev.ratio_decreasing = decreasing || negligible;

  const bool feasible = ev.max_h_residual <= kHTol && ev.max_g_violation <= kGTol;
  if (feasible && ev.ratio_decreasing) {
    ev.verdict = CurveVerdict::Tangent;
  } else if (newton_failed && ev.max_g_violation <= kGTol) {
    ev.verdict = CurveVerdict::Failed;
    if (ev.note.empty()) ev.note = "Newton restoration did not reach the residual target";
  } else {
    ev.verdict = CurveVerdict::NonTangent;
  }
  return ev;
}

TangentSampleSet tangent_samples(const model::Problem& problem, const numkit::Vector& x,
                                 std::size_t n_samples, double radius, std::uint64_t seed) {
  if (n_samples < 1) throw std::invalid_argument("tangent samples: need at least one sample");
  if (!(radius > 0.0)) throw std::invalid_argument("tangent samples: radius must be positive");
  TangentSampleSet out;
  Rng rng(seed, Stream::TangentSampling);
  const std::size_t n = x.size();
  const std::size_t max_attempts = 20 * n_samples;
  while (out.directions.size() < n_samples && out.attempts < max_attempts) {
    ++out.attempts;
    numkit::Vector dir(n);
    for (double& v : dir) v = rng.normal();
    const double len = numkit::norm2(dir);
    const double scale = radius * std::pow(10.0, -3.0 * rng.uniform());
    if (!(len > 0.0)) {
      ++out.degenerate;
      continue;
    }
    const numkit::Vector start = numkit::axpy(scale / len, dir, x);
    RestoreResult r;
    try {
      r = restore_feasibility(problem, start);
    } catch (const DomainError&) {
      ++out.restoration_failures;
      continue;
    }
    if (r.residual > kHTol) {
      ++out.restoration_failures;
      continue;
    }
    double g = 0.0;
    try {
      g = g_violation(problem, r.x);
    } catch (const DomainError&) {
      ++out.infeasible;
      continue;
    }
    if (g > 1e-10) {
      ++out.infeasible;
      continue;
    }
    numkit::Vector u = numkit::axpy(-1.0, x, r.x);
    const double ul = numkit::norm2(u);
    if (!(ul > 1e-9)) {
      ++out.degenerate;
      continue;
    }
    for (double& v : u) v /= ul;
    out.directions.push_back(std::move(u));
  }
  out.report = std::to_string(out.directions.size()) + " of " + std::to_string(n_samples) +
               " directions from " + std::to_string(out.attempts) + " attempts (" +
               std::to_string(out.restoration_failures) + " restoration failures, " +
               std::to_string(out.infeasible) + " inequality rejections, " +
               std::to_string(out.degenerate) + " degenerate)";
  return out;
}

}  // namespace cqcert::certify
