#include <algorithm>
#include <cmath>
#include <limits>

#include "cqcert/certify/certify.hpp"
#include "cqcert/kernels.hpp"
#include "cqcert/numkit/linalg.hpp"
#include "cqcert/numkit/nnls.hpp"

namespace cqcert::certify {

std::string_view to_string(KktStatus s) noexcept {
  switch (s) {
    case KktStatus::Certified:
      return "certified";
    case KktStatus::Refuted:
      return "refuted";
    case KktStatus::Inconclusive:
      return "inconclusive";
  }
  return "inconclusive";
}

namespace {

MultiplierCertificate assemble(const model::JacobianBundle& bundle, const cq::SpaceSplit& split,
                               const NormalConeModel& model, const MembershipCertificate& m) {
  MultiplierCertificate c;
  const std::size_t n = bundle.x.size();
  numkit::Vector stationarity = bundle.grad_f;
  for (std::size_t j = 0; j < model.rays.size(); ++j) {
    const double l = m.lambda[j];
    stationarity = numkit::axpy(l, model.rays[j].gradient, stationarity);
    if (l <= 0.0) continue;
    const Ray& ray = model.rays[j];
    c.lambda.push_back({ray.t_values.front(), ray.positions.size(), l});
    double worst_g = 0.0;
    for (std::size_t k : ray.positions) worst_g = std::max(worst_g, std::fabs(bundle.g_values[k]));
    c.complementarity_gap = std::max(c.complementarity_gap, l * worst_g);
  }
  c.subspace_coeffs = m.subspace_coeffs;
  numkit::Vector sub(n, 0.0);
  for (std::size_t j = 0; j < model.subspace.cols(); ++j)
    sub = numkit::axpy(m.subspace_coeffs[j], model.subspace.column(j), sub);
  stationarity = numkit::axpy(1.0, sub, stationarity);
  c.residual = numkit::norm2(stationarity);

  const std::size_t rows = bundle.j_h.rows();
  if (rows > 0) {
    // DH^T mu = S c; the minimum-norm mu lies in im DH = F1.
    c.mu = numkit::pseudo_solve(bundle.j_h.transposed(), sub);
    c.w = split.f1.apply_transposed(c.mu);
  }
  return c;
}

// Stationarity through DG(x)^*: lambda >= 0 on exactly active gradients,
// free multipliers on the raw rows of DH.
double hurwicz_residual(const model::JacobianBundle& bundle) {
  const std::size_t n = bundle.x.size();
  const std::vector<std::size_t> active = model::active_positions(bundle.g_values, 0.0);
  const auto groups = numkit::group_equal_rows(bundle.g_rows, active, 1e-12);
  const std::size_t m = bundle.j_h.rows();
  std::vector<numkit::Vector> cols;
  std::vector<bool> mask;
  for (const auto& g : groups) {
    const auto row = bundle.g_rows.row(g.front());
    cols.emplace_back(row.begin(), row.end());
    mask.push_back(true);
  }
  for (std::size_t i = 0; i < m; ++i) {
    const auto row = bundle.j_h.row(i);
    cols.emplace_back(row.begin(), row.end());
    mask.push_back(false);
  }
  const numkit::DenseMatrix a = numkit::DenseMatrix::from_columns(n, cols);
  return numkit::nnls_stationarity(a, mask, numkit::scaled(-1.0, bundle.grad_f)).residual_norm;
}

}  // namespace

KktOutcome kkt_certificate(const model::JacobianBundle& bundle, const cq::SpaceSplit& split,
                           const std::vector<double>& eps_grid, double tol) {
  if (eps_grid.empty()) throw std::invalid_argument("kkt_certificate: empty eps grid");
  KktOutcome out;
  if (!bundle.reliable) {
    out.note = "Jacobians unreliable";
    return out;
  }
  const numkit::Vector v = numkit::scaled(-1.0, bundle.grad_f);
  std::vector<NormalConeModel> models;
  std::vector<MembershipCertificate> certs;
  for (double eps : eps_grid) {
    models.push_back(normal_cone_model(bundle, split, eps));
    certs.push_back(normal_cone_membership(models.back(), v, tol));
    out.per_eps.push_back({eps, models.back().rays.size(), certs.back().verdict});
  }
  const std::size_t last = eps_grid.size() - 1;
  const std::size_t prev = last == 0 ? 0 : last - 1;
  out.eps_used = eps_grid[last];
  const Membership verdict = certs[last].verdict;
  if (verdict == Membership::Inconclusive) {
    out.note = certs[last].note;
    return out;
  }
  if (certs[prev].verdict != verdict) {
    out.note = "membership verdicts at the two smallest eps disagree";
    return out;
  }
  if (verdict == Membership::Inside) {
    out.status = KktStatus::Certified;
    MultiplierCertificate c = assemble(bundle, split, models[last], certs[last]);
    c.hurwicz_residual = hurwicz_residual(bundle);
    out.certificate = std::move(c);
    return out;
  }
  KktRefutation ref;
  ref.direction = certs[last].farkas;
  ref.slope = kernels::dot(bundle.grad_f, ref.direction);
  ref.kernel_residual = bundle.j_h.rows() == 0 ? 0.0 : kernels::max_abs(bundle.j_h.apply(ref.direction));
  ref.max_active_product = -std::numeric_limits<double>::infinity();
  for (const Ray& ray : models[last].rays)
    ref.max_active_product = std::max(ref.max_active_product, kernels::dot(ray.gradient, ref.direction));
  if (models[last].rays.empty()) ref.max_active_product = 0.0;
  out.status = KktStatus::Refuted;
  out.refutation = std::move(ref);
  return out;
}

}  // namespace cqcert::certify
