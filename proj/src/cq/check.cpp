#include <cmath>
#include <cstdio>

#include "cqcert/cq/cq.hpp"
#include "cqcert/error.hpp"

namespace cqcert::cq {

namespace {

std::string format_g(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3g", v);
  return buf;
}

}  // namespace

CqReport check_cq(const model::Problem& problem, const CheckConfig& config) {
  config.validate();
  CqReport rep;
  const numkit::Vector& xbar = problem.point();
  rep.bundle = problem.jacobians_at(xbar);
  rep.k_violation = problem.eval_G(xbar).k_violation;
  rep.split = decompose_spaces(rep.bundle.j_h, config.rank_tol);
  const bool surjective = rep.split.rank == rep.split.m;

  try {
    rep.eq = check_eq_condition(problem, xbar, rep.split, config.eq_radius, config.eq_samples,
                                config.angle_tol, config.rank_tol, config.seed);
  } catch (const Error& e) {
    rep.eq.verdict = Verdict::Inconclusive;
    rep.eq.note = e.what();
  }
  if (!rep.eq.note.empty()) rep.notes.push_back("EQ: " + rep.eq.note);

  try {
    rep.iq = find_iq_direction(rep.bundle, rep.split, config.eps_grid, config.lp_tol, config.margin_tol);
  } catch (const Error& e) {
    rep.iq.verdict = Verdict::Inconclusive;
    rep.notes.push_back(std::string("IQ: ") + e.what());
  }
  if (rep.iq.vacuous) rep.notes.push_back("IQ: holds vacuously, T_eps is empty at eps = " + format_g(rep.iq.eps_used));

  const std::vector<std::size_t> active = model::active_positions(rep.bundle.g_values, 0.0);
  try {
    rep.exact = strict_margin(rep.bundle.g_rows, active, rep.split, config.lp_tol, nullptr);
  } catch (const Error& e) {
    rep.exact.lp_status = "error";
    rep.notes.push_back(std::string("MFCQ: ") + e.what());
  }

  if (!surjective) {
    rep.mfcq = Verdict::Fails;
    rep.pmfcq = Verdict::Fails;
  } else {
    if (active.empty()) {
      rep.mfcq = Verdict::Holds;
    } else if (rep.exact.lp_status == "optimal") {
      rep.mfcq = -rep.exact.margin > config.margin_tol ? Verdict::Holds : Verdict::Fails;
    } else {
      rep.mfcq = Verdict::Inconclusive;
    }
    rep.pmfcq = rep.iq.verdict;
  }
  rep.gpmfcq = conjunction(rep.eq.verdict, rep.iq.verdict);

  try {
    rep.aff = check_aff_assumption(rep.bundle, rep.split, config.aff_probes, config.lp_tol,
                                   config.margin_tol, config.seed);
  } catch (const Error& e) {
    rep.aff.verdict = Verdict::Inconclusive;
    rep.aff.reason = e.what();
  }
  rep.aff_assumption = rep.aff.verdict;

  try {
    rep.nfmcq_evidence = check_nfmcq(problem, rep.bundle, config.lp_tol);
  } catch (const Error& e) {
    rep.nfmcq_evidence.verdict = Verdict::Inconclusive;
    rep.nfmcq_evidence.reason = e.what();
  }
  rep.nfmcq = rep.nfmcq_evidence.verdict;

  if (!rep.bundle.reliable) {
    rep.mfcq = rep.pmfcq = rep.gpmfcq = rep.nfmcq = rep.aff_assumption = Verdict::Inconclusive;
    rep.notes.push_back("analytic and finite-difference Jacobians disagree (relative " +
                        format_g(rep.bundle.fd_discrepancy) + "); verdicts withheld");
  }
  if (rep.k_violation > model::kActiveTol)
    rep.notes.push_back("base point violates the constraints (residual " + format_g(rep.k_violation) + ")");
  if (problem.spec().index_set.kind == model::IndexKind::Interval && problem.has_inequalities())
    rep.notes.push_back(
        "normal-cone representation assumes g_t uniformly differentiable at the base point; not checked");
  return rep;
}

}  // namespace cqcert::cq
