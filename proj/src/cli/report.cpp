#include "report.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>

namespace cqcert::cli {

#ifndef CQCERT_VERSION
#define CQCERT_VERSION "0.0.0"
#endif

Json number(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  return v == 0.0 ? 0.0 : v;
}

Json vector_json(const numkit::Vector& v) {
  Json a = Json::array();
  for (double x : v) a.push_back(number(x));
  return a;
}

Json matrix_json(const numkit::DenseMatrix& m) {
  Json a = Json::array();
  for (std::size_t i = 0; i < m.rows(); ++i) {
    const auto row = m.row(i);
    a.push_back(vector_json(numkit::Vector(row.begin(), row.end())));
  }
  return a;
}

std::string format_number(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6g", v == 0.0 ? 0.0 : v);
  return buf;
}

std::string format_vector(const numkit::Vector& v) {
  std::string s = "(";
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (i > 0) s += ", ";
    s += format_number(v[i]);
  }
  return s + ")";
}

Json problem_json(std::string_view source, const model::Problem& problem) {
  const model::ProblemSpec& spec = problem.spec();
  Json p;
  p["source"] = source;
  p["name"] = spec.name;
  p["dim"] = spec.n;
  p["equalities"] = spec.equalities.size();
  p["objective"] = spec.objective_text;
  p["equality"] = spec.equality_texts;
  Json ineq;
  switch (spec.family_kind) {
    case model::FamilyKind::None:
      ineq["kind"] = "none";
      break;
    case model::FamilyKind::Parametric:
      ineq["kind"] = "parametric";
      break;
    case model::FamilyKind::List:
      ineq["kind"] = "list";
      break;
  }
  ineq["expressions"] = spec.inequality_texts;
  p["inequality"] = ineq;
  Json index;
  if (spec.family_kind == model::FamilyKind::None) {
    index["type"] = "empty";
  } else if (spec.index_set.kind == model::IndexKind::Interval) {
    index["type"] = "interval";
    index["lo"] = number(spec.index_set.lo);
    index["hi"] = number(spec.index_set.hi);
    index["open_lo"] = spec.index_set.open_lo;
    index["open_hi"] = spec.index_set.open_hi;
    index["grid"] = spec.index_set.grid_points;
    index["inset"] = number(spec.index_set.inset());
  } else {
    index["type"] = "finite";
    index["values"] = vector_json(spec.index_set.values);
  }
  index["samples"] = problem.n_indices();
  p["index_set"] = index;
  p["point"] = vector_json(spec.point);
  return p;
}

Json config_json(const cq::CheckConfig& config, std::optional<int> grid_override) {
  Json c;
  c["rank_tol"] = number(config.rank_tol);
  c["eq_radius"] = number(config.eq_radius);
  c["eq_samples"] = config.eq_samples;
  c["eps_grid"] = vector_json(config.eps_grid);
  c["lp_tol"] = number(config.lp_tol);
  c["angle_tol"] = number(config.angle_tol);
  c["margin_tol"] = number(config.margin_tol);
  c["active_tol"] = number(model::kActiveTol);
  c["aff_probes"] = config.aff_probes;
  if (grid_override) {
    c["grid"] = *grid_override;
  } else {
    c["grid"] = nullptr;
  }
  return c;
}

Json bundle_json(const model::JacobianBundle& b) {
  Json j;
  j["reliable"] = b.reliable;
  j["fd_discrepancy"] = number(b.fd_discrepancy);
  j["grad_f"] = vector_json(b.grad_f);
  j["j_h"] = matrix_json(b.j_h);
  j["h_values"] = vector_json(b.h_values);
  // Distinct inequality gradients keep the report short on fine grids.
  std::vector<std::size_t> all(b.g_rows.rows());
  for (std::size_t k = 0; k < all.size(); ++k) all[k] = k;
  Json rows = Json::array();
  for (const auto& group : numkit::group_equal_rows(b.g_rows, all, 0.0)) {
    Json r;
    r["t"] = number(b.t_values[group.front()]);
    r["count"] = group.size();
    const auto row = b.g_rows.row(group.front());
    r["gradient"] = vector_json(numkit::Vector(row.begin(), row.end()));
    rows.push_back(r);
  }
  j["g_gradients"] = rows;
  double gmax = -std::numeric_limits<double>::infinity();
  for (double g : b.g_values) gmax = std::max(gmax, g);
  j["max_g"] = number(gmax);
  return j;
}

Json split_json(const cq::SpaceSplit& s) {
  Json j;
  j["n"] = s.n;
  j["m"] = s.m;
  j["rank"] = s.rank;
  j["singular_values"] = vector_json(s.singular_values);
  auto columns = [](const numkit::DenseMatrix& m) {
    Json a = Json::array();
    for (std::size_t c = 0; c < m.cols(); ++c) a.push_back(vector_json(m.column(c)));
    return a;
  };
  j["e1"] = columns(s.e1);
  j["e2"] = columns(s.e2);
  j["f1"] = columns(s.f1);
  j["f2"] = columns(s.f2);
  return j;
}

Json eq_json(const cq::EqEvidence& ev) {
  Json j;
  j["verdict"] = cq::to_string(ev.verdict);
  j["trivial"] = ev.trivial;
  j["samples_checked"] = ev.samples_checked;
  j["failing_samples"] = ev.failing_samples;
  j["worst_intersection_angle"] = number(ev.worst_intersection_angle);
  j["worst_rank_deviation"] = ev.worst_rank_deviation;
  if (ev.first_failure.empty()) {
    j["first_failure"] = nullptr;
  } else {
    j["first_failure"] = vector_json(ev.first_failure);
  }
  return j;
}

Json iq_certificate_json(const cq::IqEvidence& ev) {
  Json j;
  j["verdict"] = cq::to_string(ev.verdict);
  j["vacuous"] = ev.vacuous;
  j["direction"] = vector_json(ev.direction);
  j["margin"] = number(ev.margin);
  j["eps_used"] = number(ev.eps_used);
  j["lp_status"] = ev.lp_status;
  return j;
}

Json iq_attempts_json(const cq::IqEvidence& ev) {
  Json a = Json::array();
  for (const cq::IqAttempt& t : ev.attempts) {
    Json j;
    j["eps"] = number(t.eps);
    j["active"] = t.active;
    j["lp_status"] = t.lp_status;
    j["margin"] = number(t.margin);
    a.push_back(j);
  }
  return a;
}

Json aff_json(const cq::AffEvidence& ev) {
  Json j;
  j["verdict"] = cq::to_string(ev.verdict);
  j["active"] = ev.active;
  j["exact_margin"] = number(ev.exact_margin);
  j["implicit_equalities"] = vector_json(ev.implicit_equalities);
  j["reason"] = ev.reason;
  return j;
}

Json nfmcq_json(const cq::NfmcqEvidence& ev) {
  Json j;
  j["verdict"] = cq::to_string(ev.verdict);
  j["reason"] = ev.reason;
  j["generators"] = ev.generators;
  j["modulus"] = number(ev.modulus);
  j["coarse_modulus"] = number(ev.coarse_modulus);
  return j;
}

Json cone_model_json(const certify::NormalConeModel& model) {
  Json j;
  j["eps"] = number(model.eps);
  Json rays = Json::array();
  for (const certify::Ray& r : model.rays) {
    Json ray;
    ray["t"] = number(r.t_values.front());
    ray["count"] = r.positions.size();
    ray["gradient"] = vector_json(r.gradient);
    rays.push_back(ray);
  }
  j["rays"] = rays;
  Json sub = Json::array();
  for (std::size_t c = 0; c < model.subspace.cols(); ++c) sub.push_back(vector_json(model.subspace.column(c)));
  j["subspace"] = sub;
  return j;
}

Json membership_json(const certify::MembershipCertificate& cert) {
  Json j;
  j["verdict"] = certify::to_string(cert.verdict);
  if (cert.verdict == certify::Membership::Inside) {
    j["lambda"] = vector_json(cert.lambda);
    j["subspace_coefficients"] = vector_json(cert.subspace_coeffs);
    j["residual"] = number(cert.residual);
  } else if (cert.verdict == certify::Membership::Outside) {
    j["farkas"] = vector_json(cert.farkas);
    j["farkas_value"] = number(cert.farkas_value);
    j["max_ray_product"] = number(cert.max_ray_product);
    j["max_subspace_product"] = number(cert.max_subspace_product);
  }
  if (!cert.note.empty()) j["note"] = cert.note;
  return j;
}

Json kkt_json(const certify::KktOutcome& o) {
  Json j;
  j["status"] = certify::to_string(o.status);
  j["eps_used"] = number(o.eps_used);
  Json per = Json::array();
  for (const auto& e : o.per_eps) {
    Json k;
    k["eps"] = number(e.eps);
    k["rays"] = e.rays;
    k["verdict"] = certify::to_string(e.verdict);
    per.push_back(k);
  }
  j["per_eps"] = per;
  if (o.certificate) {
    const auto& c = *o.certificate;
    Json lam = Json::array();
    for (const auto& l : c.lambda) {
      Json e;
      e["t"] = number(l.t);
      e["multiplicity"] = l.multiplicity;
      e["lambda"] = number(l.lambda);
      lam.push_back(e);
    }
    j["lambda"] = lam;
    j["subspace_coefficients"] = vector_json(c.subspace_coeffs);
    j["mu"] = vector_json(c.mu);
    j["w"] = vector_json(c.w);
    j["residual"] = number(c.residual);
    j["complementarity_gap"] = number(c.complementarity_gap);
    j["hurwicz_residual"] = number(c.hurwicz_residual);
  }
  if (o.refutation) {
    const auto& r = *o.refutation;
    j["farkas"] = vector_json(r.direction);
    j["slope"] = number(r.slope);
    j["kernel_residual"] = number(r.kernel_residual);
    j["max_active_product"] = number(r.max_active_product);
  }
  if (!o.note.empty()) j["note"] = o.note;
  return j;
}

Json curve_json(const certify::CurveEvidence& ev) {
  Json j;
  j["verdict"] = certify::to_string(ev.verdict);
  j["direction"] = vector_json(ev.direction);
  j["in_linearized_cone"] = ev.in_linearized_cone;
  j["strict"] = ev.strict;
  j["max_h_residual"] = number(ev.max_h_residual);
  j["max_g_violation"] = number(ev.max_g_violation);
  j["correction_ratio"] = number(ev.correction_ratio);
  j["ratio_decreasing"] = ev.ratio_decreasing;
  Json steps = Json::array();
  for (const auto& s : ev.steps) {
    Json k;
    k["q"] = number(s.q);
    k["restored"] = vector_json(s.restored);
    k["h_residual"] = number(s.h_residual);
    k["g_violation"] = number(s.g_violation);
    k["correction_ratio"] = number(s.correction_ratio);
    k["iterations"] = s.iterations;
    k["converged"] = s.converged;
    k["trace"] = vector_json(s.trace);
    steps.push_back(k);
  }
  j["steps"] = steps;
  if (!ev.note.empty()) j["note"] = ev.note;
  return j;
}

Json report_header(std::string_view command, std::string_view source, const model::Problem& problem,
                   const cq::CheckConfig& config, std::optional<int> grid_override) {
  Json r;
  r["schema"] = kSchemaId;
  r["tool"] = {{"name", "cqcert"}, {"version", CQCERT_VERSION}};
  r["command"] = command;
  r["problem"] = problem_json(source, problem);
  r["config"] = config_json(config, grid_override);
  r["seed"] = config.seed;
  return r;
}

}  // namespace cqcert::cli
