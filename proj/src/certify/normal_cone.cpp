#include <algorithm>
#include <cmath>
#include <limits>

#include "cqcert/certify/certify.hpp"
#include "cqcert/error.hpp"
#include "cqcert/kernels.hpp"
#include "cqcert/numkit/lp.hpp"

namespace cqcert::certify {

std::string_view to_string(Membership m) noexcept {
  switch (m) {
    case Membership::Inside:
      return "inside";
    case Membership::Outside:
      return "outside";
    case Membership::Inconclusive:
      return "inconclusive";
  }
  return "inconclusive";
}

NormalConeModel normal_cone_model(const model::JacobianBundle& bundle, const cq::SpaceSplit& split,
                                  double eps) {
  NormalConeModel m;
  m.eps = eps;
  m.n = bundle.x.size();
  m.subspace = split.e1;
  const std::vector<std::size_t> active = model::active_positions(bundle.g_values, eps);
  for (const auto& group : numkit::group_equal_rows(bundle.g_rows, active, 1e-12)) {
    Ray ray;
    const auto row = bundle.g_rows.row(group.front());
    ray.gradient.assign(row.begin(), row.end());
    ray.positions = group;
    for (std::size_t k : group) ray.t_values.push_back(bundle.t_values[k]);
    m.rays.push_back(std::move(ray));
  }
  return m;
}

MembershipCertificate normal_cone_membership(const NormalConeModel& model, const numkit::Vector& v,
                                             double tol) {
  if (v.size() != model.n) throw DimensionError("membership: vector length mismatch");
  const std::size_t n = model.n;
  const std::size_t k = model.rays.size();
  const std::size_t r = model.subspace.cols();
  MembershipCertificate cert;

  numkit::LpProblem lp;
  lp.c.assign(k + r, 0.0);
  std::fill(lp.c.begin(), lp.c.begin() + static_cast<std::ptrdiff_t>(k), 1.0);
  lp.a_ub = numkit::DenseMatrix(0, k + r);
  lp.a_eq = numkit::DenseMatrix(n, k + r);
  lp.b_eq = v;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < k; ++j) lp.a_eq(i, j) = model.rays[j].gradient[i];
    for (std::size_t j = 0; j < r; ++j) lp.a_eq(i, k + j) = model.subspace(i, j);
  }
  lp.lower.assign(k + r, 0.0);
  lp.upper.assign(k + r, std::numeric_limits<double>::infinity());
  for (std::size_t j = k; j < k + r; ++j) lp.lower[j] = -std::numeric_limits<double>::infinity();

  numkit::LpResult res;
  try {
    res = numkit::solve_lp(lp);
  } catch (const Error& e) {
    cert.note = e.what();
    return cert;
  }
  const double scale = 1.0 + numkit::norm2(v);

  if (res.status == numkit::LpStatus::Optimal) {
    cert.lambda.assign(res.x.begin(), res.x.begin() + static_cast<std::ptrdiff_t>(k));
    cert.subspace_coeffs.assign(res.x.begin() + static_cast<std::ptrdiff_t>(k), res.x.end());
    for (double& l : cert.lambda) l = std::max(l, 0.0);
    numkit::Vector recon(n, 0.0);
    for (std::size_t j = 0; j < k; ++j) recon = numkit::axpy(cert.lambda[j], model.rays[j].gradient, recon);
    for (std::size_t j = 0; j < r; ++j) recon = numkit::axpy(cert.subspace_coeffs[j], model.subspace.column(j), recon);
    cert.residual = numkit::norm2(numkit::axpy(-1.0, v, recon));
    if (cert.residual <= tol * scale) {
      cert.verdict = Membership::Inside;
    } else {
      cert.note = "LP solution does not reproduce the vector";
    }
    return cert;
  }
  if (res.status != numkit::LpStatus::Infeasible) {
    cert.note = "membership LP " + std::string(numkit::to_string(res.status));
    return cert;
  }

  // y = -q from the equality-row part of the Farkas ray, cleaned against the
  // subspace and normalized.
  numkit::Vector y = numkit::scaled(-1.0, res.farkas.eq);
  for (std::size_t j = 0; j < r; ++j) {
    const numkit::Vector s = model.subspace.column(j);
    y = numkit::axpy(-kernels::dot(s, y), s, y);
  }
  const double len = numkit::norm2(y);
  if (!(len > 0.0)) {
    cert.note = "degenerate Farkas ray";
    return cert;
  }
  for (double& c : y) c /= len;
  cert.farkas = y;
  cert.farkas_value = kernels::dot(y, v);
  cert.max_ray_product = -std::numeric_limits<double>::infinity();
  for (const Ray& ray : model.rays) {
    const double g = numkit::norm2(ray.gradient);
    if (g > 0.0) cert.max_ray_product = std::max(cert.max_ray_product, kernels::dot(y, ray.gradient) / g);
  }
  if (model.rays.empty()) cert.max_ray_product = 0.0;
  for (std::size_t j = 0; j < r; ++j)
    cert.max_subspace_product =
        std::max(cert.max_subspace_product, std::fabs(kernels::dot(y, model.subspace.column(j))));
  if (cert.farkas_value > tol && cert.max_ray_product <= tol && cert.max_subspace_product <= tol) {
    cert.verdict = Membership::Outside;
  } else {
    cert.note = "Farkas certificate failed verification";
  }
  return cert;
}

}  // namespace cqcert::certify
