// SPDX-License-Identifier: Apache-2.0
#include "phishgen/error.hpp"

#include <cmath>

#include "phishgen/rng.hpp"

namespace phishgen {

std::string_view to_string(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::invalid_argument: return "invalid-argument";
    case ErrorCode::network_unreachable: return "network-unreachable";
    case ErrorCode::http_status: return "non-success-status";
    case ErrorCode::not_html: return "not-html";
    case ErrorCode::timeout: return "timeout";
    case ErrorCode::malformed_reference: return "malformed-reference";
    case ErrorCode::binary_input: return "binary-input";
    case ErrorCode::feature_not_applicable: return "feature-not-applicable";
    case ErrorCode::invalid_params: return "invalid-params";
    case ErrorCode::missing_nodes: return "missing-nodes";
    case ErrorCode::no_logo_candidate: return "no-logo-candidate";
    case ErrorCode::undecodable_image: return "undecodable-image";
    case ErrorCode::no_applicable_rule: return "no-applicable-rule";
    case ErrorCode::conflicting_features: return "conflicting-features";
    case ErrorCode::empty_ledger: return "empty-ledger";
    case ErrorCode::io_error: return "io-error";
    case ErrorCode::parse_error: return "parse-error";
  }
  return "unknown";
}

double Rng::normal() {
  if (has_spare_) {
    has_spare_ = false;
    return spare_;
  }
  double u1 = 0.0;
  do {
    u1 = unit();
  } while (u1 <= 0.0);
  const double u2 = unit();
  const double radius = std::sqrt(-2.0 * std::log(u1));
  const double angle = 2.0 * 3.14159265358979323846 * u2;
  spare_ = radius * std::sin(angle);
  has_spare_ = true;
  return radius * std::cos(angle);
}

}  // namespace phishgen
