#include <algorithm>
#include <charconv>
#include <chrono>
#include <cmath>
#include <optional>
#include <ostream>
#include <stdexcept>

#include <CLI11.hpp>

#include "cqcert/certify/certify.hpp"
#include "cqcert/cli/cli.hpp"
#include "cqcert/cq/cq.hpp"
#include "cqcert/error.hpp"
#include "report.hpp"

namespace cqcert::cli {

namespace {

struct Options {
  std::string source;
  std::string report = "text";
  std::string eps_grid;
  std::string direction;
  std::string objective;
  std::string vector;
  std::string steps;
  int grid = 0;
  bool timings = false;
  bool list = false;
  cq::CheckConfig config;
  CLI::Option* grid_opt = nullptr;
  CLI::Option* objective_opt = nullptr;
};

std::vector<double> parse_list(std::string_view text, std::string_view what) {
  std::vector<double> out;
  std::size_t start = 0;
  while (start <= text.size()) {
    const std::size_t comma = std::min(text.find(',', start), text.size());
    std::string_view item = text.substr(start, comma - start);
    while (!item.empty() && (item.front() == ' ' || item.front() == '\t')) item.remove_prefix(1);
    while (!item.empty() && (item.back() == ' ' || item.back() == '\t')) item.remove_suffix(1);
    if (!item.empty() && item.front() == '+') item.remove_prefix(1);
    double v = 0.0;
    const auto [ptr, ec] = std::from_chars(item.data(), item.data() + item.size(), v);
    if (item.empty() || ec != std::errc() || ptr != item.data() + item.size() || !std::isfinite(v))
      throw std::invalid_argument("malformed number '" + std::string(item) + "' in " + std::string(what));
    out.push_back(v);
    start = comma + 1;
  }
  return out;
}

class Stopwatch {
 public:
  explicit Stopwatch(bool enabled) : enabled_(enabled) {}
  template <class F>
  auto time(const char* stage, F&& f) {
    const auto t0 = std::chrono::steady_clock::now();
    auto result = f();
    if (enabled_) {
      const std::chrono::duration<double, std::milli> ms = std::chrono::steady_clock::now() - t0;
      stages_[stage] = ms.count();
    }
    return result;
  }
  Json json() const {
    Json j;
    j["recorded"] = enabled_;
    if (enabled_) j["stages_ms"] = stages_;
    return j;
  }

 private:
  bool enabled_;
  Json stages_ = Json::object();
};

int exit_for(cq::Verdict v) {
  switch (v) {
    case cq::Verdict::Holds:
      return kExitHolds;
    case cq::Verdict::Fails:
      return kExitFails;
    case cq::Verdict::Inconclusive:
      return kExitInconclusive;
  }
  return kExitInconclusive;
}

struct Loaded {
  model::Problem problem;
  std::optional<int> grid_override;
};

Loaded load(const Options& o) {
  model::ProblemSpec spec = resolve_problem(o.source);
  std::optional<int> grid;
  if (o.grid_opt != nullptr && o.grid_opt->count() > 0) {
    if (o.grid < 2) throw std::invalid_argument("--grid needs at least 2 points");
    grid = o.grid;
    if (spec.index_set.kind == model::IndexKind::Interval) spec.index_set.grid_points = o.grid;
  }
  model::Problem problem(std::move(spec));
  if (o.objective_opt != nullptr && o.objective_opt->count() > 0) problem = problem.with_objective(o.objective);
  return {std::move(problem), grid};
}

numkit::Vector parse_vector_for(const std::string& text, const model::Problem& p, const char* what) {
  numkit::Vector v = parse_list(text, what);
  if (v.size() != p.dim())
    throw std::invalid_argument(std::string(what) + " has " + std::to_string(v.size()) +
                                " entries, expected " + std::to_string(p.dim()));
  return v;
}

void emit(std::ostream& out, const Options& o, const Json& report, const std::string& text) {
  if (o.report == "json") {
    out << report.dump(2) << '\n';
  } else {
    out << text;
  }
}

std::string line(std::string_view label, std::string_view value) {
  std::string s(label);
  s += ": ";
  s += value;
  s += '\n';
  return s;
}

std::string problem_line(const model::Problem& p) {
  const auto& spec = p.spec();
  return line("problem", (spec.name.empty() ? std::string("(unnamed)") : spec.name) + " (n = " +
                             std::to_string(spec.n) + ", m = " + std::to_string(p.n_equalities()) +
                             ", |T| = " + std::to_string(p.n_indices()) + ", point " +
                             format_vector(spec.point) + ")");
}

std::string kkt_text(const certify::KktOutcome& k) {
  std::string s = line("KKT", std::string(certify::to_string(k.status)) + " at eps = " + format_number(k.eps_used));
  if (k.certificate) {
    for (const auto& l : k.certificate->lambda)
      s += "  lambda(t = " + format_number(l.t) + ", x" + std::to_string(l.multiplicity) +
           ") = " + format_number(l.lambda) + "\n";
    s += "  mu = " + format_vector(k.certificate->mu) + "\n";
    s += "  residual = " + format_number(k.certificate->residual) + "\n";
  }
  if (k.refutation) {
    s += "  descent direction y = " + format_vector(k.refutation->direction) + "\n";
    s += "  <grad f, y> = " + format_number(k.refutation->slope) + "\n";
  }
  if (!k.note.empty()) s += "  note: " + k.note + "\n";
  return s;
}

int cmd_check_cq(const Options& o, std::ostream& out) {
  Stopwatch watch(o.timings);
  const Loaded l = load(o);
  const cq::CqReport rep = watch.time("check_cq", [&] { return cq::check_cq(l.problem, o.config); });
  const certify::KktOutcome kkt = watch.time("kkt", [&] {
    return certify::kkt_certificate(rep.bundle, rep.split, o.config.eps_grid, 1e-9);
  });
  std::optional<certify::CurveEvidence> probe;
  if (rep.iq.verdict == cq::Verdict::Holds && !rep.iq.vacuous) {
    probe = watch.time("abadie", [&] {
      return certify::abadie_probe(l.problem, rep.iq.direction, certify::kDefaultAbadieSteps, o.config);
    });
  }

  Json r = report_header("check-cq", o.source, l.problem, o.config, l.grid_override);
  r["status"] = cq::to_string(rep.gpmfcq);
  r["verdicts"] = {{"mfcq", cq::to_string(rep.mfcq)},
                   {"pmfcq", cq::to_string(rep.pmfcq)},
                   {"gpmfcq", cq::to_string(rep.gpmfcq)},
                   {"nfmcq", cq::to_string(rep.nfmcq)},
                   {"aff_assumption", cq::to_string(rep.aff_assumption)},
                   {"eq", cq::to_string(rep.eq.verdict)},
                   {"iq", cq::to_string(rep.iq.verdict)},
                   {"kkt", certify::to_string(kkt.status)}};
  Json cones = Json::array();
  for (double eps : o.config.eps_grid) {
    const certify::NormalConeModel m = certify::normal_cone_model(rep.bundle, rep.split, eps);
    cones.push_back({{"eps", number(eps)}, {"rays", m.rays.size()}, {"subspace_dim", m.subspace.cols()}});
  }
  r["certificates"] = {{"iq", iq_certificate_json(rep.iq)},
                       {"kkt", kkt_json(kkt)},
                       {"normal_cone", cone_model_json(certify::normal_cone_model(
                                           rep.bundle, rep.split, o.config.eps_grid.back()))}};
  Json ev;
  ev["jacobians"] = bundle_json(rep.bundle);
  ev["k_violation"] = number(rep.k_violation);
  ev["spaces"] = split_json(rep.split);
  ev["eq"] = eq_json(rep.eq);
  ev["iq_attempts"] = iq_attempts_json(rep.iq);
  ev["mfcq_exact"] = {{"active", rep.exact.active},
                      {"lp_status", rep.exact.lp_status},
                      {"margin", number(rep.exact.margin)}};
  ev["aff"] = aff_json(rep.aff);
  ev["nfmcq"] = nfmcq_json(rep.nfmcq_evidence);
  ev["normal_cone_per_eps"] = cones;
  ev["abadie"] = probe ? curve_json(*probe) : Json(nullptr);
  ev["notes"] = rep.notes;
  r["evidence"] = ev;
  r["timings"] = watch.json();

  std::string t = problem_line(l.problem);
  t += line("rank DH", std::to_string(rep.split.rank) + " (dim E2 = " + std::to_string(rep.split.e2.cols()) +
                           ", dim F2 = " + std::to_string(rep.split.f2.cols()) + ")");
  t += line("EQ", std::string(cq::to_string(rep.eq.verdict)) +
                      (rep.eq.trivial ? " (F2 = {0})"
                                      : " (" + std::to_string(rep.eq.samples_checked) + " samples, radius " +
                                            format_number(o.config.eq_radius) + ", min angle " +
                                            format_number(rep.eq.worst_intersection_angle) +
                                            ", max rank deviation " +
                                            std::to_string(rep.eq.worst_rank_deviation) + ")"));
  t += line("IQ", std::string(cq::to_string(rep.iq.verdict)) +
                      (rep.iq.vacuous ? " (vacuous)"
                                      : " at eps = " + format_number(rep.iq.eps_used) + ", direction " +
                                            format_vector(rep.iq.direction) + ", margin " +
                                            format_number(rep.iq.margin)));
  t += line("MFCQ", cq::to_string(rep.mfcq));
  t += line("PMFCQ", cq::to_string(rep.pmfcq));
  t += line("GPMFCQ", cq::to_string(rep.gpmfcq));
  t += line("NFMCQ", std::string(cq::to_string(rep.nfmcq)) + " (" + rep.nfmcq_evidence.reason + ")");
  t += line("aff assumption", std::string(cq::to_string(rep.aff_assumption)) + " (" + rep.aff.reason + ")");
  t += kkt_text(kkt);
  if (probe) t += line("Abadie probe along IQ direction", certify::to_string(probe->verdict));
  for (const auto& n : rep.notes) t += line("note", n);
  emit(out, o, r, t);
  return exit_for(rep.gpmfcq);
}

int cmd_check_kkt(const Options& o, std::ostream& out) {
  Stopwatch watch(o.timings);
  const Loaded l = load(o);
  o.config.validate();
  const model::JacobianBundle bundle =
      watch.time("jacobians", [&] { return l.problem.jacobians_at(l.problem.point()); });
  const cq::SpaceSplit split = cq::decompose_spaces(bundle.j_h, o.config.rank_tol);
  const certify::KktOutcome kkt =
      watch.time("kkt", [&] { return certify::kkt_certificate(bundle, split, o.config.eps_grid, 1e-9); });

  Json r = report_header("check-kkt", o.source, l.problem, o.config, l.grid_override);
  r["status"] = certify::to_string(kkt.status);
  r["verdicts"] = {{"kkt", certify::to_string(kkt.status)}};
  r["certificates"] = {{"kkt", kkt_json(kkt)}};
  r["evidence"] = {{"jacobians", bundle_json(bundle)},
                   {"spaces", split_json(split)},
                   {"normal_cone", cone_model_json(certify::normal_cone_model(bundle, split, kkt.eps_used))}};
  r["timings"] = watch.json();

  std::string t = problem_line(l.problem);
  t += line("objective", l.problem.spec().objective_text);
  t += line("grad f", format_vector(bundle.grad_f));
  t += kkt_text(kkt);
  emit(out, o, r, t);
  switch (kkt.status) {
    case certify::KktStatus::Certified:
      return kExitHolds;
    case certify::KktStatus::Refuted:
      return kExitFails;
    default:
      return kExitInconclusive;
  }
}

int cmd_cones(const Options& o, std::ostream& out) {
  Stopwatch watch(o.timings);
  const Loaded l = load(o);
  o.config.validate();
  const model::JacobianBundle bundle = l.problem.jacobians_at(l.problem.point());
  const cq::SpaceSplit split = cq::decompose_spaces(bundle.j_h, o.config.rank_tol);
  std::optional<numkit::Vector> v;
  if (!o.vector.empty()) v = parse_vector_for(o.vector, l.problem, "--vector");

  Json per = Json::array();
  std::string t = problem_line(l.problem);
  std::vector<certify::Membership> verdicts;
  for (double eps : o.config.eps_grid) {
    const certify::NormalConeModel m = certify::normal_cone_model(bundle, split, eps);
    Json j = cone_model_json(m);
    std::string row = "eps " + format_number(eps) + ": " + std::to_string(m.rays.size()) +
                      " ray(s), subspace dim " + std::to_string(m.subspace.cols());
    if (v) {
      const certify::MembershipCertificate c = certify::normal_cone_membership(m, *v, 1e-9);
      verdicts.push_back(c.verdict);
      j["membership"] = membership_json(c);
      row += ", vector " + std::string(certify::to_string(c.verdict));
      if (c.verdict == certify::Membership::Outside) row += " (separator " + format_vector(c.farkas) + ")";
    }
    per.push_back(j);
    t += row + "\n";
  }

  std::string status = "computed";
  int code = kExitHolds;
  if (v) {
    const certify::Membership last = verdicts.back();
    const certify::Membership prev = verdicts.size() > 1 ? verdicts[verdicts.size() - 2] : last;
    const certify::Membership agreed = last == prev ? last : certify::Membership::Inconclusive;
    status = certify::to_string(agreed);
    code = agreed == certify::Membership::Inside    ? kExitHolds
           : agreed == certify::Membership::Outside ? kExitFails
                                                    : kExitInconclusive;
  }
  t += line("status", status);

  Json r = report_header("cones", o.source, l.problem, o.config, l.grid_override);
  r["status"] = status;
  r["verdicts"] = {{"membership", status}};
  r["certificates"] = {{"normal_cone", per}};
  r["evidence"] = {{"jacobians", bundle_json(bundle)}, {"spaces", split_json(split)}};
  if (v) r["evidence"]["vector"] = vector_json(*v);
  r["timings"] = watch.json();
  emit(out, o, r, t);
  return code;
}

int cmd_abadie(const Options& o, std::ostream& out) {
  Stopwatch watch(o.timings);
  const Loaded l = load(o);
  o.config.validate();
  const numkit::Vector d = parse_vector_for(o.direction, l.problem, "--direction");
  const std::vector<double> steps = o.steps.empty() ? certify::kDefaultAbadieSteps : parse_list(o.steps, "--steps");
  const certify::CurveEvidence ev =
      watch.time("abadie", [&] { return certify::abadie_probe(l.problem, d, steps, o.config); });

  Json r = report_header("abadie", o.source, l.problem, o.config, l.grid_override);
  r["status"] = certify::to_string(ev.verdict);
  r["verdicts"] = {{"abadie", certify::to_string(ev.verdict)}};
  r["certificates"] = {{"curve", curve_json(ev)}};
  r["evidence"] = {{"steps", vector_json(steps)}};
  r["timings"] = watch.json();

  std::string t = problem_line(l.problem);
  t += line("direction", format_vector(d) + (ev.in_linearized_cone ? (ev.strict ? " (strictly inside the linearized cone)"
                                                                                 : " (in the linearized cone)")
                                                                    : " (outside the linearized cone)"));
  for (const auto& s : ev.steps)
    t += "  q = " + format_number(s.q) + ": |H| = " + format_number(s.h_residual) + ", g+ = " +
         format_number(s.g_violation) + ", correction/q = " + format_number(s.correction_ratio) + "\n";
  t += line("verdict", certify::to_string(ev.verdict));
  if (!ev.note.empty()) t += line("note", ev.note);
  emit(out, o, r, t);
  switch (ev.verdict) {
    case certify::CurveVerdict::Tangent:
      return kExitHolds;
    case certify::CurveVerdict::NonTangent:
      return kExitFails;
    default:
      return kExitInconclusive;
  }
}

int cmd_diff_test(const Options& o, std::ostream& out) {
  Stopwatch watch(o.timings);
  const Loaded l = load(o);
  const model::JacobianBundle b = watch.time("jacobians", [&] { return l.problem.jacobians_at(l.problem.point()); });
  const std::string status = b.reliable ? "reliable" : "unreliable";
  Json r = report_header("diff-test", o.source, l.problem, o.config, l.grid_override);
  r["status"] = status;
  r["verdicts"] = {{"jacobians", status}};
  r["certificates"] = Json::object();
  r["evidence"] = {{"jacobians", bundle_json(b)}, {"threshold", number(model::kFdReliability)}};
  r["timings"] = watch.json();
  std::string t = problem_line(l.problem);
  t += line("max relative discrepancy", format_number(b.fd_discrepancy));
  t += line("status", status);
  emit(out, o, r, t);
  return b.reliable ? kExitHolds : kExitFails;
}

int cmd_example(const Options& o, std::ostream& out) {
  if (o.list || o.source.empty()) {
    for (const auto& e : builtin_examples()) out << e.name << "  " << e.summary << '\n';
    return kExitHolds;
  }
  const BuiltinExample* e = find_builtin(o.source);
  if (e == nullptr) throw std::invalid_argument("unknown built-in example '" + o.source + "'");
  out << e->text;
  return kExitHolds;
}

void add_common(CLI::App* sub, Options& o) {
  sub->add_option("problem", o.source, "problem file, or example://<name>")->required();
  sub->add_option("--eps-grid", o.eps_grid, "decreasing eps values, comma separated");
  sub->add_option("--rank-tol", o.config.rank_tol, "relative singular-value cutoff");
  sub->add_option("--eq-radius", o.config.eq_radius, "sampling radius for the EQ check");
  sub->add_option("--eq-samples", o.config.eq_samples, "number of EQ samples");
  sub->add_option("--seed", o.config.seed, "random seed");
  sub->add_option("--lp-tol", o.config.lp_tol, "LP feasibility and optimality tolerance");
  sub->add_option("--angle-tol", o.config.angle_tol, "principal-angle threshold (radians)");
  sub->add_option("--report", o.report, "output format")->check(CLI::IsMember({"text", "json"}));
  o.objective_opt = sub->add_option("--objective", o.objective, "override the objective expression");
  o.grid_opt = sub->add_option("--grid", o.grid, "grid points for interval index sets");
  sub->add_flag("--timings", o.timings, "record stage timings in the report");
}

}  // namespace

int run_command(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Constraint-qualification and KKT certificates for smooth programs", "cqcert"};
  app.set_version_flag("--version", CQCERT_VERSION);
  app.require_subcommand(1, 1);

  // One Options per subcommand keeps option objects unshared.
  std::vector<std::unique_ptr<Options>> store;
  auto make = [&](const char* name, const char* help) {
    store.push_back(std::make_unique<Options>());
    CLI::App* sub = app.add_subcommand(name, help);
    return std::pair<CLI::App*, Options*>(sub, store.back().get());
  };
  auto [cq_app, cq_o] = make("check-cq", "check MFCQ, PMFCQ, GPMFCQ, NFMCQ and the aff assumption");
  add_common(cq_app, *cq_o);
  cq_app->add_option("--aff-probes", cq_o->config.aff_probes, "random kernel probes for the aff check");
  auto [kkt_app, kkt_o] = make("check-kkt", "certify or refute first-order optimality");
  add_common(kkt_app, *kkt_o);
  auto [cone_app, cone_o] = make("cones", "normal-cone model per eps, optional membership test");
  add_common(cone_app, *cone_o);
  cone_app->add_option("--vector", cone_o->vector, "vector to test for membership");
  auto [ab_app, ab_o] = make("abadie", "restoration probe along a direction");
  add_common(ab_app, *ab_o);
  ab_app->add_option("--direction", ab_o->direction, "direction d1,d2,...")->required();
  ab_app->add_option("--steps", ab_o->steps, "decreasing step sizes, comma separated");
  auto [diff_app, diff_o] = make("diff-test", "compare analytic and finite-difference Jacobians");
  add_common(diff_app, *diff_o);
  auto [ex_app, ex_o] = make("example", "print a built-in problem file");
  ex_app->add_option("name", ex_o->source, "example name");
  ex_app->add_flag("--list", ex_o->list, "list built-in examples");

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitHolds : kExitInputError;
  }

  try {
    for (std::size_t k = 0; k < store.size(); ++k) {
      Options& o = *store[k];
      if (!o.eps_grid.empty()) o.config.eps_grid = parse_list(o.eps_grid, "--eps-grid");
    }
    if (*cq_app) {
      cq_o->config.validate();
      return cmd_check_cq(*cq_o, out);
    }
    if (*kkt_app) return cmd_check_kkt(*kkt_o, out);
    if (*cone_app) return cmd_cones(*cone_o, out);
    if (*ab_app) return cmd_abadie(*ab_o, out);
    if (*diff_app) return cmd_diff_test(*diff_o, out);
    if (*ex_app) return cmd_example(*ex_o, out);
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return kExitInputError;
  } catch (const std::invalid_argument& e) {
    err << "error: " << e.what() << '\n';
    return kExitInputError;
  }
  return kExitInputError;
}

}  // namespace cqcert::cli
