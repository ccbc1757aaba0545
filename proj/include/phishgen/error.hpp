// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace phishgen {

enum class ErrorCode {
  invalid_argument,
  network_unreachable,
  http_status,
  not_html,
  timeout,
  malformed_reference,
  binary_input,
  feature_not_applicable,
  invalid_params,
  missing_nodes,
  no_logo_candidate,
  undecodable_image,
  no_applicable_rule,
  conflicting_features,
  empty_ledger,
  io_error,
  parse_error,
};

std::string_view to_string(ErrorCode code) noexcept;

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(message), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace phishgen
