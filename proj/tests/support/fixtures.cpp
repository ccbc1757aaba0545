// SPDX-License-Identifier: Apache-2.0
#include "fixtures.hpp"

#include <httplib.h>
#include <fmt/format.h>

#include <chrono>
#include <fstream>
#include <functional>
#include <mutex>
#include <set>
#include <sstream>
#include <thread>

#include <unistd.h>

namespace fixtures {

namespace fs = std::filesystem;
using phishgen::RasterImage;

RasterImage solid(int w, int h, std::uint8_t r, std::uint8_t g, std::uint8_t b, std::uint8_t a) {
  RasterImage img(w, h);
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      auto* p = img.at(x, y);
      p[0] = r;
      p[1] = g;
      p[2] = b;
      p[3] = a;
    }
  }
  return img;
}

RasterImage pattern(int w, int h, std::uint32_t salt) {
  RasterImage img(w, h);
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      auto* p = img.at(x, y);
      p[0] = static_cast<std::uint8_t>((x * 7 + salt * 31) & 0xFF);
      p[1] = static_cast<std::uint8_t>((y * 11 + salt * 17) & 0xFF);
      p[2] = static_cast<std::uint8_t>(((x ^ y) * 5 + salt) & 0xFF);
      p[3] = static_cast<std::uint8_t>(128 + ((x + y + salt) % 128));
    }
  }
  return img;
}

std::string png(const RasterImage& img) { return phishgen::encode_png(img); }

phishgen::WebpageSnapshot snapshot(std::string markup, std::string origin, phishgen::AssetMap assets) {
  phishgen::WebpageSnapshot s;
  s.origin_url = std::move(origin);
  s.fetched_at = 1700000000;
  s.markup = std::move(markup);
  s.assets = std::move(assets);
  s.fetch_status = phishgen::FetchStatus::complete;
  return s;
}

phishgen::WebpageSnapshot login_page() {
  const std::string markup = R"(<!DOCTYPE html>
<html><head><title>Example Bank</title></head>
<body><header><img src="assets/logo.png" alt="Example Bank logo" width="48" height="24"></header>
<nav><a href="/accounts">Accounts</a> <a href="https://help.example.com/faq">Help and support</a></nav>
<main><h1>Welcome back</h1>
<form action="/session" method="get"><input name="username"><input type="password" name="password"><button type="submit">Sign in</button></form>
<p>Your security is our priority</p></main></body></html>
)";
  phishgen::AssetMap assets;
  assets["assets/logo.png"] = {"https://www.example.com/logo.png", phishgen::AssetKind::image, png(pattern(48, 24)),
                               "image/png"};
  return snapshot(markup, "https://www.example.com/login", std::move(assets));
}

phishgen::WebpageSnapshot svg_logo_page() {
  const std::string markup = R"(<!DOCTYPE html>
<html><head><title>Vector Co</title></head>
<body><header><img src="assets/logo.svg" alt="logo"></header>
<p>Plain page <a href="/contact">Contact</a></p></body></html>
)";
  const std::string svg =
      R"(<svg xmlns="http://www.w3.org/2000/svg" width="40" height="20" viewBox="0 0 40 20">)"
      R"(<rect x="0" y="0" width="40" height="20" fill="#1a73e8"/><circle cx="10" cy="10" r="6" fill="#fff"/></svg>)";
  phishgen::AssetMap assets;
  assets["assets/logo.svg"] = {"https://vector.example.com/logo.svg", phishgen::AssetKind::image, svg, "image/svg+xml"};
  return snapshot(markup, "https://vector.example.com/", std::move(assets));
}

std::string corpus_page(int i) {
  std::ostringstream s;
  s << "<!DOCTYPE html>\n<html><head><meta charset=\"utf-8\"><title>Site " << i << "</title>";
  if (i % 4 == 0) s << "<link rel=\"stylesheet\" href=\"site" << i << ".css\">";
  s << "</head>\n<body>";
  if (i % 3 != 2) s << "<header><img src=\"logo" << i << (i % 5 == 0 ? ".svg" : ".png") << "\" alt=\"logo\"></header>";
  s << "<nav>";
  for (int k = 0; k <= i % 4; ++k) s << "<a href=\"/section" << k << "\">Section " << k << "</a> ";
  s << "</nav>\n<h1>Welcome to site number " << i << "</h1>";
  if (i % 2 == 0) {
    s << "<form action=\"/login\" method=\"post\"><input name=\"email\"><input type=\"password\" name=\"pw\">"
         "<button type=\"submit\">Log in</button></form>";
  } else {
    s << "<p><a href=\"/signin\">Sign in</a> to continue</p>";
  }
  if (i % 7 == 0) s << "<button class=\"social\">Sign in with Google</button>";
  s << "<p>Paragraph " << i << " with a few words of text</p></body></html>\n";
  return s.str();
}

std::vector<fs::path> write_corpus(const fs::path& dir, int n) {
  fs::create_directories(dir);
  std::vector<fs::path> out;
  for (int i = 0; i < n; ++i) {
    const auto page = dir / fmt::format("page_{:03}.html", i);
    std::ofstream(page, std::ios::binary) << corpus_page(i);
    if (i % 3 != 2) {
      if (i % 5 == 0) {
        std::ofstream(dir / fmt::format("logo{}.svg", i), std::ios::binary)
            << fmt::format(R"(<svg xmlns="http://www.w3.org/2000/svg" width="{0}" height="20">)"
                           R"(<rect width="{0}" height="20" fill="#{1:06x}"/></svg>)",
                           20 + i % 30, (i * 2654435761u) & 0xFFFFFF);
      } else {
        std::ofstream(dir / fmt::format("logo{}.png", i), std::ios::binary)
            << png(pattern(16 + i % 24, 12 + i % 9, static_cast<std::uint32_t>(i)));
      }
    }
    if (i % 4 == 0) std::ofstream(dir / fmt::format("site{}.css", i)) << "body{margin:" << i % 10 << "px}\n";
    out.push_back(page);
  }
  return out;
}

fs::path temp_dir(const std::string& name) {
  const auto dir = fs::temp_directory_path() / fmt::format("phishgen-test-{}-{}", name, ::getpid());
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

std::map<std::string, std::string> read_tree(const fs::path& dir) {
  std::map<std::string, std::string> out;
  for (const auto& e : fs::recursive_directory_iterator(dir)) {
    if (!e.is_regular_file()) continue;
    std::ifstream in(e.path(), std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    out[fs::relative(e.path(), dir).generic_string()] = ss.str();
  }
  return out;
}

struct FixtureServer::Impl {
  httplib::Server server;
  std::thread thread;
  int port = 0;
};

FixtureServer::FixtureServer() : impl_(std::make_unique<Impl>()) {
  impl_->port = impl_->server.bind_to_any_port("127.0.0.1");
  impl_->thread = std::thread([this] { impl_->server.listen_after_bind(); });
  impl_->server.wait_until_ready();
}

FixtureServer::~FixtureServer() {
  impl_->server.stop();
  impl_->thread.join();
}

void FixtureServer::add(const std::string& path, std::string body, std::string content_type, int status) {
  impl_->server.Get(path, [body = std::move(body), content_type = std::move(content_type), status](
                              const httplib::Request&, httplib::Response& res) {
    res.status = status;
    res.set_content(body, content_type);
  });
}

void FixtureServer::redirect(const std::string& path, const std::string& location) {
  impl_->server.Get(path, [location](const httplib::Request&, httplib::Response& res) { res.set_redirect(location); });
}

void FixtureServer::slow(const std::string& path, int delay_ms) {
  impl_->server.Get(path, [delay_ms](const httplib::Request&, httplib::Response& res) {
    std::this_thread::sleep_for(std::chrono::milliseconds(delay_ms));
    res.set_content("<html><body>late</body></html>", "text/html");
  });
}

std::string FixtureServer::url(const std::string& path) const {
  return fmt::format("http://127.0.0.1:{}{}", impl_->port, path);
}

int FixtureServer::port() const { return impl_->port; }

namespace {

HttpReply convert(const httplib::Result& r) {
  HttpReply out;
  if (!r) return out;
  out.status = r->status;
  out.body = r->body;
  for (const auto& [k, v] : r->headers) out.headers[k] = v;
  return out;
}

}  // namespace

HttpReply http_get(int port, const std::string& path) {
  httplib::Client cli("127.0.0.1", port);
  cli.set_read_timeout(30, 0);
  return convert(cli.Get(path));
}

HttpReply http_post(int port, const std::string& path, const std::string& body, const std::string& content_type) {
  httplib::Client cli("127.0.0.1", port);
  cli.set_read_timeout(30, 0);
  return convert(cli.Post(path, body, content_type));
}

std::vector<phishgen::NodeId> unledgered_changes(const phishgen::Document& before, const phishgen::Document& after,
                                                 const std::vector<phishgen::FeatureApplication>& ledger) {
  std::set<phishgen::NodeId> listed;
  for (const auto& app : ledger) {
    listed.insert(app.touched_nodes.begin(), app.touched_nodes.end());
    listed.insert(app.injected_nodes.begin(), app.injected_nodes.end());
  }
  // Inserting a ledgered node explains the change to its parent's child list.
  auto child_ids = [&](const phishgen::Node& n) {
    std::vector<phishgen::NodeId> ids;
    for (const auto& c : n.children()) {
      if (!before.find(c->id()) && listed.contains(c->id())) continue;
      ids.push_back(c->id());
    }
    return ids;
  };
  std::vector<phishgen::NodeId> out;
  std::function<void(const phishgen::Node&, bool)> walk = [&](const phishgen::Node& n, bool under_injected) {
    const bool is_listed = listed.contains(n.id());
    const auto* old = before.find(n.id());
    bool changed = false;
    if (!old) {
      changed = !under_injected;
    } else {
      changed = old->tag() != n.tag() || old->data() != n.data() || old->attributes() != n.attributes() ||
                child_ids(*old) != child_ids(n);
    }
    if (changed && !is_listed) out.push_back(n.id());
    for (const auto& c : n.children()) walk(*c, under_injected || (!old && is_listed));
  };
  walk(after.root(), false);
  return out;
}

}  // namespace fixtures
