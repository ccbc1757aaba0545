// SPDX-License-Identifier: Apache-2.0
#include "phishgen/metrics.hpp"

#include <algorithm>
#include <cctype>

#include "phishgen/error.hpp"

namespace phishgen {
namespace {

std::string clean(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  if (s.size() >= 2 && s.front() == '"' && s.back() == '"') s = s.substr(1, s.size() - 2);
  std::string out(s);
  for (auto& c : out) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return out;
}

nlohmann::json optional_json(const std::optional<double>& v) { return v ? nlohmann::json(*v) : nlohmann::json(); }

}  // namespace

std::string_view to_string(Verdict v) noexcept { return v == Verdict::phishing ? "phishing" : "legitimate"; }

std::optional<Verdict> parse_verdict(std::string_view text) {
  const auto t = clean(text);
  if (t == "phishing" || t == "phish" || t == "1" || t == "positive") return Verdict::phishing;
  if (t == "legitimate" || t == "legit" || t == "benign" || t == "0" || t == "negative") return Verdict::legitimate;
  return std::nullopt;
}

ConfusionCounts tally(const std::vector<std::pair<Verdict, Verdict>>& verdicts) {
  if (verdicts.empty()) throw Error(ErrorCode::invalid_argument, "no verdicts to tally");
  ConfusionCounts c;
  for (const auto& [actual, predicted] : verdicts) {
    if (actual == Verdict::phishing) {
      ++(predicted == Verdict::phishing ? c.tp : c.fn);
    } else {
      ++(predicted == Verdict::phishing ? c.fp : c.tn);
    }
  }
  return c;
}

ScoreReport score(const ConfusionCounts& c) {
  if (c.total() == 0) throw Error(ErrorCode::invalid_argument, "cannot score an empty confusion matrix");
  ScoreReport r;
  r.accuracy = static_cast<double>(c.tp + c.tn) / static_cast<double>(c.total());
  if (c.tp + c.fp > 0) r.precision = static_cast<double>(c.tp) / static_cast<double>(c.tp + c.fp);
  if (c.tp + c.fn > 0) r.recall = static_cast<double>(c.tp) / static_cast<double>(c.tp + c.fn);
  if (r.precision && r.recall && *r.precision + *r.recall > 0)
    r.f1 = 2 * *r.precision * *r.recall / (*r.precision + *r.recall);
  return r;
}

std::vector<VerdictRow> parse_verdicts(std::string_view text) {
  std::vector<VerdictRow> rows;
  std::size_t start = 0;
  int line_no = 0;
  while (start < text.size()) {
    auto end = text.find('\n', start);
    if (end == std::string_view::npos) end = text.size();
    auto line = text.substr(start, end - start);
    start = end + 1;
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    if (clean(line).empty() || line.front() == '#') continue;
    const char delim = line.find('\t') != std::string_view::npos   ? '\t'
                       : line.find(';') != std::string_view::npos ? ';'
                                                                   : ',';
    std::vector<std::string_view> fields;
    std::size_t k = 0;
    while (true) {
      const auto d = line.find(delim, k);
      fields.push_back(line.substr(k, d == std::string_view::npos ? std::string_view::npos : d - k));
      if (d == std::string_view::npos) break;
      k = d + 1;
    }
    if (fields.size() != 3)
      throw Error(ErrorCode::parse_error, "verdicts line " + std::to_string(line_no) + ": expected id,actual,predicted");
    const auto actual = parse_verdict(fields[1]);
    const auto predicted = parse_verdict(fields[2]);
    if (!actual || !predicted) {
      if (rows.empty() && clean(fields[1]) == "actual") continue;  // header
      throw Error(ErrorCode::parse_error, "verdicts line " + std::to_string(line_no) + ": unknown label");
    }
    std::string id(fields[0]);
    while (!id.empty() && std::isspace(static_cast<unsigned char>(id.back()))) id.pop_back();
    rows.push_back({std::move(id), *actual, *predicted});
  }
  return rows;
}

nlohmann::json to_json(const ConfusionCounts& c) {
  return {{"tp", c.tp}, {"fp", c.fp}, {"tn", c.tn}, {"fn", c.fn}, {"total", c.total()}};
}

nlohmann::json to_json(const ScoreReport& r) {
  return {{"accuracy", r.accuracy},
          {"precision", optional_json(r.precision)},
          {"recall", optional_json(r.recall)},
          {"f1", optional_json(r.f1)}};
}

}  // namespace phishgen
