// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include <json.hpp>

namespace phishgen {

enum class Verdict { phishing, legitimate };

std::string_view to_string(Verdict v) noexcept;
std::optional<Verdict> parse_verdict(std::string_view text);

struct ConfusionCounts {
  std::uint64_t tp = 0;
  std::uint64_t fp = 0;
  std::uint64_t tn = 0;
  std::uint64_t fn = 0;

  std::uint64_t total() const noexcept { return tp + fp + tn + fn; }
  friend bool operator==(const ConfusionCounts&, const ConfusionCounts&) = default;
};

/// Undefined metrics are nullopt, never 0.
struct ScoreReport {
  double accuracy = 0;
  std::optional<double> precision;
  std::optional<double> recall;
  std::optional<double> f1;
};

/// (actual, predicted) pairs; phishing is the positive class. Throws
/// Error(invalid_argument) for an empty list.
ConfusionCounts tally(const std::vector<std::pair<Verdict, Verdict>>& verdicts);
/// Throws Error(invalid_argument) when the total is zero.
ScoreReport score(const ConfusionCounts& counts);

struct VerdictRow {
  std::string id;
  Verdict actual;
  Verdict predicted;
};

/// Reads `id,actual,predicted` rows (comma, tab or semicolon separated; an
/// optional header line is skipped). Throws Error(parse_error).
std::vector<VerdictRow> parse_verdicts(std::string_view text);

nlohmann::json to_json(const ConfusionCounts& counts);
nlohmann::json to_json(const ScoreReport& report);

}  // namespace phishgen
