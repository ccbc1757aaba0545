// SPDX-License-Identifier: Apache-2.0
#include "phishgen/service.hpp"

#include <arpa/inet.h>
#include <httplib.h>
#include <fmt/chrono.h>
#include <fmt/format.h>

#include <fstream>
#include <map>
#include <mutex>
#include <random>
#include <shared_mutex>
#include <sstream>
#include <thread>

#include "phishgen/error.hpp"
#include "phishgen/pipeline.hpp"
#include "phishgen/url.hpp"

namespace phishgen {
namespace {

using json = nlohmann::json;
namespace fs = std::filesystem;
using Clock = std::chrono::steady_clock;

constexpr std::string_view kBanner =
    "<div id=\"phishgen-banner\" style=\"position:fixed;top:0;left:0;right:0;z-index:2147483647;"
    "background:#b00020;color:#fff;font:bold 14px sans-serif;text-align:center;padding:4px;\">"
    "RESEARCH ARTIFACT - generated page, do not enter real credentials</div>";

int status_for(ErrorCode code) {
  switch (code) {
    case ErrorCode::invalid_argument:
    case ErrorCode::invalid_params:
    case ErrorCode::parse_error:
    case ErrorCode::malformed_reference:
      return 400;
    case ErrorCode::network_unreachable:
    case ErrorCode::http_status:
    case ErrorCode::timeout:
      return 502;
    case ErrorCode::not_html:
    case ErrorCode::binary_input:
    case ErrorCode::feature_not_applicable:
    case ErrorCode::no_logo_candidate:
    case ErrorCode::no_applicable_rule:
    case ErrorCode::empty_ledger:
    case ErrorCode::missing_nodes:
    case ErrorCode::undecodable_image:
      return 422;
    case ErrorCode::conflicting_features:
      return 409;
    case ErrorCode::io_error:
      return 500;
  }
  return 500;
}

void send_json(httplib::Response& res, int status, const json& body) {
  res.status = status;
  res.set_content(body.dump(), "application/json");
}

void send_error(httplib::Response& res, int status, std::string_view code, std::string_view message) {
  send_json(res, status, {{"error", code}, {"message", message}});
}

void send_error(httplib::Response& res, const Error& e) {
  send_error(res, status_for(e.code()), to_string(e.code()), e.what());
}

json parse_body(const httplib::Request& req) {
  try {
    auto body = json::parse(req.body);
    if (!body.is_object()) throw Error(ErrorCode::invalid_argument, "request body must be a JSON object");
    return body;
  } catch (const json::exception& e) {
    throw Error(ErrorCode::invalid_argument, std::string("malformed JSON: ") + e.what());
  }
}

std::string random_hex(std::size_t bytes) {
  static thread_local std::random_device rd;
  std::string out;
  for (std::size_t i = 0; i < bytes; ++i) out += fmt::format("{:02x}", rd() & 0xFFu);
  return out;
}

std::optional<std::string> read_file(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  if (!in) return std::nullopt;
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::uint64_t seed_from(const json& v) {
  if (v.is_number_unsigned()) return v.get<std::uint64_t>();
  if (v.is_number_integer() && v.get<std::int64_t>() >= 0) return static_cast<std::uint64_t>(v.get<std::int64_t>());
  if (v.is_string()) {
    const auto s = v.get<std::string>();
    std::size_t used = 0;
    try {
      const auto n = std::stoull(s, &used, 0);
      if (used == s.size() && !s.empty() && s[0] != '-') return n;
    } catch (const std::exception&) {
    }
  }
  throw Error(ErrorCode::invalid_argument, "seed must be a non-negative 64-bit integer");
}

// {"features": ["C1", ...]} or {"features": {"random": {...}}} / {"random": {...}}.
GenerationRecipe recipe_from_request(const json& body, std::uint64_t seed) {
  GenerationRecipe r;
  r.seed = seed;
  json random_spec;
  bool random = false;
  const json features = body.value("features", json());
  if (features.is_array()) {
    r.mode = SelectionMode::explicit_list;
    for (const auto& f : features) {
      if (!f.is_string()) throw Error(ErrorCode::invalid_argument, "feature ids must be strings");
      const auto id = parse_feature_id(f.get<std::string>());
      if (!id) throw Error(ErrorCode::invalid_argument, "unknown feature " + f.dump());
      r.features.push_back(*id);
    }
  } else if (features.is_object()) {
    random = true;
    random_spec = features.contains("random") ? features["random"] : features;
  } else if (features == "random" || body.contains("random")) {
    random = true;
    random_spec = body.value("random", json::object());
  } else {
    throw Error(ErrorCode::invalid_argument, "features must be a list of ids or a random spec");
  }
  if (random) {
    r.mode = SelectionMode::random;
    if (random_spec.is_object()) {
      for (const char* key : {"count_content", "count_visual"}) {
        if (!random_spec.contains(key) || random_spec[key].is_null()) continue;
        if (!random_spec[key].is_number_integer()) throw Error(ErrorCode::invalid_argument, std::string(key) + " must be an integer");
        (std::string_view(key) == "count_content" ? r.count_content : r.count_visual) = random_spec[key].get<int>();
      }
    }
  }
  if (body.contains("params")) r.params = body["params"];
  r.validate();
  return r;
}

}  // namespace

bool is_loopback_host(std::string_view host) {
  if (host == "localhost" || host == "::1" || host == "[::1]") return true;
  in_addr addr{};
  return inet_pton(AF_INET, std::string(host).c_str(), &addr) == 1 && (ntohl(addr.s_addr) >> 24) == 127;
}

std::string inject_banner(std::string_view html) {
  std::string out(html);
  std::size_t pos = 0;
  while ((pos = out.find('<', pos)) != std::string::npos) {
    const auto tag = out.substr(pos + 1, 4);
    const bool body_tag = tag.size() == 4 && std::equal(tag.begin(), tag.end(), "body", [](char a, char b) {
                            return std::tolower(static_cast<unsigned char>(a)) == b;
                          });
    const char after = pos + 5 < out.size() ? out[pos + 5] : '\0';
    if (body_tag && (after == '>' || after == ' ' || after == '\t' || after == '\n' || after == '\r' || after == '/')) {
      const auto close = out.find('>', pos);
      if (close == std::string::npos) break;
      out.insert(close + 1, kBanner);
      return out;
    }
    ++pos;
  }
  return std::string(kBanner) + out;
}

struct Service::Impl {
  struct BundleEntry {
    std::string recipe;  // serialized, for reuse checks
    std::string capture_path;
  };
  struct Session {
    std::string id;
    fs::path dir;
    WebpageSnapshot snapshot;
    ApplicabilityReport report;
    Clock::time_point last_access;
    std::mutex generate_mu;
    std::map<std::string, BundleEntry> bundles;  // guarded by Impl::mu
  };

  explicit Impl(ServiceConfig c) : config(std::move(c)) {
    if (!config.clock) config.clock = [] { return Clock::now(); };
    if (config.port < 0 || config.port > 65535) throw Error(ErrorCode::invalid_argument, "port out of range");
    if (config.session_ttl.count() <= 0) throw Error(ErrorCode::invalid_argument, "session TTL must be positive");
    if (!is_loopback_host(config.host)) {
      if (!config.allow_remote)
        throw Error(ErrorCode::invalid_argument,
                    "refusing to bind to non-loopback address " + config.host + " without allow_remote");
      fmt::print(stderr, "warning: serving generated phishing pages on {}; anyone who can reach it can open them\n",
                 config.host);
    }
    config.fetch_policy.validate();
    fs::create_directories(config.sandbox_dir);
    routes();
  }

  ServiceConfig config;
  httplib::Server server;
  std::thread thread;
  int bound_port = -1;
  std::shared_mutex mu;
  std::map<std::string, std::shared_ptr<Session>> sessions;

  void purge_expired() {
    const auto now = config.clock();
    std::unique_lock lock(mu);
    std::erase_if(sessions, [&](const auto& kv) { return now - kv.second->last_access > config.session_ttl; });
  }

  std::shared_ptr<Session> find_session(const std::string& id) {
    purge_expired();
    std::unique_lock lock(mu);
    const auto it = sessions.find(id);
    if (it == sessions.end()) return nullptr;
    it->second->last_access = config.clock();
    return it->second;
  }

  void routes() {
    server.set_payload_max_length(config.max_capture_bytes + 1);
    if (config.cors_origin) {
      server.set_post_routing_handler([this](const httplib::Request&, httplib::Response& res) {
        res.set_header("Access-Control-Allow-Origin", *config.cors_origin);
        res.set_header("Vary", "Origin");
      });
      server.Options(R"(/.*)", [](const httplib::Request&, httplib::Response& res) {
        res.set_header("Access-Control-Allow-Methods", "GET, POST, OPTIONS");
        res.set_header("Access-Control-Allow-Headers", "Content-Type");
        res.status = 204;
      });
    }
    server.set_exception_handler([](const httplib::Request&, httplib::Response& res, std::exception_ptr ep) {
      try {
        std::rethrow_exception(ep);
      } catch (const Error& e) {
        send_error(res, e);
      } catch (const std::exception& e) {
        send_error(res, 500, "internal", e.what());
      }
    });

    server.Get("/features", [](const httplib::Request& req, httplib::Response& res) {
      std::optional<FeatureCategory> filter;
      if (req.has_param("category")) {
        filter = parse_category(req.get_param_value("category"));
        if (!filter) return send_error(res, 400, "invalid_argument", "category must be content or visual");
      }
      send_json(res, 200, catalog_to_json(filter));
    });

    server.Post("/analyze", [this](const httplib::Request& req, httplib::Response& res) { analyze(req, res); });
    server.Post("/generate", [this](const httplib::Request& req, httplib::Response& res) { generate(req, res); });
    server.Get(R"(/bundles/([0-9a-f]+)/([0-9a-f]+)(/.*)?)",
               [this](const httplib::Request& req, httplib::Response& res) { serve(req, res); });
    server.Post(R"(/bundles/([0-9a-f]+)/([0-9a-f]+)/(.+))",
                [this](const httplib::Request& req, httplib::Response& res) { capture(req, res); });

    if (config.ui_dir && !server.set_mount_point("/", config.ui_dir->string()))
      throw Error(ErrorCode::io_error, "UI directory not found: " + config.ui_dir->string());
  }

  void analyze(const httplib::Request& req, httplib::Response& res) {
    const auto body = parse_body(req);
    const auto url = body.value("url", json()).is_string() ? body["url"].get<std::string>() : std::string();
    if (!is_web_url(url)) return send_error(res, 400, "invalid_argument", "url must be an absolute http(s) URL");
    auto snapshot = localize_assets(fetch_page(url, config.fetch_policy), config.fetch_policy);
    const auto doc = parse_document(snapshot.markup);
    auto report = analyze_applicability(doc, &snapshot.assets);

    auto session = std::make_shared<Session>();
    session->id = random_hex(16);
    session->dir = config.sandbox_dir / session->id;
    session->snapshot = std::move(snapshot);
    session->report = std::move(report);
    session->last_access = config.clock();
    fs::create_directories(session->dir);
    {
      std::unique_lock lock(mu);
      sessions[session->id] = session;
    }
    send_json(res, 200,
              {{"schema_version", 1},
               {"session_id", session->id},
               {"source_url", session->snapshot.origin_url},
               {"fetch_status", to_string(session->snapshot.fetch_status)},
               {"report", to_json(session->report)}});
  }

  void generate(const httplib::Request& req, httplib::Response& res) {
    const auto body = parse_body(req);
    const auto sid = body.value("session_id", json()).is_string() ? body["session_id"].get<std::string>() : std::string();
    auto session = find_session(sid);
    if (!session) return send_error(res, 404, "unknown_session", "no such session (it may have expired)");

    std::uint64_t seed = 0;
    if (body.contains("seed") && !body["seed"].is_null()) {
      seed = seed_from(body["seed"]);
    } else {
      std::random_device rd;
      seed = (static_cast<std::uint64_t>(rd()) << 32) ^ rd();
    }
    auto recipe = recipe_from_request(body, seed);
    if (recipe.mode == SelectionMode::explicit_list) {
      json rejected = json::array();
      for (auto id : recipe.features) {
        if (!session->report.applicable(id)) rejected.push_back(to_string(id));
      }
      if (!rejected.empty()) {
        return send_json(res, 422, {{"error", "feature_not_applicable"},
                                    {"message", "requested features do not apply to this page"},
                                    {"features", rejected}});
      }
    }

    std::lock_guard generate_lock(session->generate_mu);
    const auto recipe_text = to_json(recipe).dump();
    const auto bid = hex_id(recipe.seed);
    const auto bundle_dir = session->dir / "bundles" / bid;
    {
      std::shared_lock lock(mu);
      const auto it = session->bundles.find(bid);
      if (it != session->bundles.end() && it->second.recipe != recipe_text)
        return send_error(res, 409, "bundle_exists", "seed already used for a different recipe in this session");
    }
    auto bundle = phishgen::generate(session->snapshot, recipe);
    bool fresh = false;
    {
      std::shared_lock lock(mu);
      fresh = !session->bundles.contains(bid);
    }
    if (fresh) {
      write_bundle(bundle, bundle_dir);
      std::unique_lock lock(mu);
      session->bundles[bid] = {recipe_text, recipe.capture.capture_path};
    }

    json ledger = json::array();
    for (const auto& app : bundle.ledger) {
      ledger.push_back({{"feature", to_string(app.feature)},
                        {"params_used", app.params_used},
                        {"assets_added", app.assets_added},
                        {"notes", app.notes}});
    }
    json skipped = json::array();
    for (const auto& s : bundle.skipped) skipped.push_back({{"feature", to_string(s.feature)}, {"reason", s.reason}});
    send_json(res, 200,
              {{"schema_version", 1},
               {"bundle_id", bid},
               {"seed", recipe.seed},
               {"source_url", bundle.source_url},
               {"spoofed_url", bundle.spoofed_url},
               {"ledger", std::move(ledger)},
               {"skipped", std::move(skipped)},
               {"preview_url", fmt::format("/bundles/{}/{}/", sid, bid)}});
  }

  // Returns the bundle directory, or nullopt after writing a 404.
  std::optional<std::pair<std::shared_ptr<Session>, BundleEntry>> lookup(const std::string& sid, const std::string& bid,
                                                                         httplib::Response& res) {
    auto session = find_session(sid);
    if (session) {
      std::shared_lock lock(mu);
      const auto it = session->bundles.find(bid);
      if (it != session->bundles.end()) return std::make_pair(session, it->second);
    }
    send_error(res, 404, "not_found", "no such bundle");
    return std::nullopt;
  }

  void serve(const httplib::Request& req, httplib::Response& res) {
    const std::string sid = req.matches[1], bid = req.matches[2];
    std::string rel = req.matches[3];
    const auto found = lookup(sid, bid, res);
    if (!found) return;
    if (!rel.empty()) rel.erase(0, 1);
    if (rel.empty()) rel = "index.html";
    if (!is_safe_relative_path(rel)) return send_error(res, 404, "not_found", "no such file");
    const auto bytes = read_file(found->first->dir / "bundles" / bid / rel);
    if (!bytes) return send_error(res, 404, "not_found", "no such file");
    auto type = content_type_for_extension(path_extension(rel));
    if (type.empty()) type = "application/octet-stream";
    const bool html = type.starts_with("text/html");
    if (type.starts_with("text/") || type == "application/javascript" || type == "image/svg+xml") type += "; charset=utf-8";
    res.set_header("Cache-Control", "no-store");
    res.set_header("X-Robots-Tag", "noindex, nofollow");
    res.set_content(html && config.banner ? inject_banner(*bytes) : *bytes, type);
  }

  void capture(const httplib::Request& req, httplib::Response& res) {
    const std::string sid = req.matches[1], bid = req.matches[2], rel = req.matches[3];
    const auto found = lookup(sid, bid, res);
    if (!found) return;
    if (rel != found->second.capture_path) return send_error(res, 404, "not_found", "no capture sink here");
    if (req.body.size() > config.max_capture_bytes)
      return send_error(res, 413, "payload_too_large", "capture body exceeds the size limit");
    std::string line;
    for (char c : req.body) {
      if (c == '\n') line += "%0A";
      else if (c == '\r') line += "%0D";
      else line += c;
    }
    const auto dir = found->first->dir / "captures";
    fs::create_directories(dir);
    {
      std::unique_lock lock(mu);  // one writer at a time keeps lines whole
      std::ofstream out(dir / (bid + ".log"), std::ios::binary | std::ios::app);
      if (!out) throw Error(ErrorCode::io_error, "cannot open capture log");
      out << fmt::format("{:%Y-%m-%dT%H:%M:%SZ}", fmt::gmtime(std::time(nullptr))) << '\t' << line << '\n';
    }
    res.status = 204;
  }
};

Service::Service(ServiceConfig config) : impl_(std::make_unique<Impl>(std::move(config))) {}

Service::~Service() { stop(); }

int Service::bind() {
  if (impl_->bound_port >= 0) return impl_->bound_port;
  const auto& host = impl_->config.host;
  const auto bind_host = host.starts_with('[') ? host.substr(1, host.size() - 2) : host;
  if (impl_->config.port == 0) {
    impl_->bound_port = impl_->server.bind_to_any_port(bind_host);
  } else if (impl_->server.bind_to_port(bind_host, impl_->config.port)) {
    impl_->bound_port = impl_->config.port;
  }
  if (impl_->bound_port < 0) throw Error(ErrorCode::io_error, fmt::format("cannot bind {}:{}", host, impl_->config.port));
  return impl_->bound_port;
}

void Service::run() {
  bind();
  impl_->server.listen_after_bind();
}

int Service::start() {
  const int p = bind();
  impl_->thread = std::thread([this] { impl_->server.listen_after_bind(); });
  impl_->server.wait_until_ready();
  return p;
}

void Service::stop() {
  if (!impl_) return;
  impl_->server.stop();
  if (impl_->thread.joinable()) impl_->thread.join();
}

const ServiceConfig& Service::config() const noexcept { return impl_->config; }

int Service::port() const noexcept { return impl_->bound_port; }

}  // namespace phishgen
