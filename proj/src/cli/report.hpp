#pragma once

// JSON fragments for the cq-certify/1 report schema. Non-finite numbers are
// written as the strings "inf", "-inf" and "nan".

#include <optional>
#include <string>
#include <string_view>

#include <json.hpp>

#include "cqcert/certify/certify.hpp"
#include "cqcert/cq/cq.hpp"
#include "cqcert/model/problem.hpp"

namespace cqcert::cli {

using Json = nlohmann::ordered_json;

inline constexpr std::string_view kSchemaId = "cq-certify/1";

Json number(double v);
Json vector_json(const numkit::Vector& v);
Json matrix_json(const numkit::DenseMatrix& m);

Json problem_json(std::string_view source, const model::Problem& problem);
Json config_json(const cq::CheckConfig& config, std::optional<int> grid_override);
Json bundle_json(const model::JacobianBundle& bundle);
Json split_json(const cq::SpaceSplit& split);

Json eq_json(const cq::EqEvidence& ev);
Json iq_certificate_json(const cq::IqEvidence& ev);
Json iq_attempts_json(const cq::IqEvidence& ev);
Json aff_json(const cq::AffEvidence& ev);
Json nfmcq_json(const cq::NfmcqEvidence& ev);

Json cone_model_json(const certify::NormalConeModel& model);
Json membership_json(const certify::MembershipCertificate& cert);
Json kkt_json(const certify::KktOutcome& outcome);
Json curve_json(const certify::CurveEvidence& ev);

/// Skeleton with schema, tool, command, problem, config and seed filled in.
Json report_header(std::string_view command, std::string_view source, const model::Problem& problem,
                   const cq::CheckConfig& config, std::optional<int> grid_override);

std::string format_number(double v);
std::string format_vector(const numkit::Vector& v);

}  // namespace cqcert::cli
