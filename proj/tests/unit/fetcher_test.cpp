// SPDX-License-Identifier: Apache-2.0
#include <gtest/gtest.h>

#include <fstream>

#include "fixtures.hpp"
#include "phishgen/error.hpp"
#include "phishgen/fetcher.hpp"
#include "phishgen/html.hpp"

using namespace phishgen;
namespace fs = std::filesystem;

namespace {

ErrorCode code_of(const std::function<void()>& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  ADD_FAILURE() << "no error thrown";
  return ErrorCode::io_error;
}

}  // namespace

TEST(Fetcher, FetchesAndLocalizesAssets) {
  fixtures::FixtureServer server;
  const auto logo = fixtures::png(fixtures::pattern(8, 8));
  server.add("/site/index.html",
             R"(<html><head><link rel="stylesheet" href="css/main.css"><script src="/js/app.js" integrity="sha384-x"></script>)"
             R"(<meta http-equiv="Content-Security-Policy" content="default-src 'self'"></head>)"
             R"(<body><img src="img/logo.png" srcset="img/logo.png 1x"><style>.x{background:url('img/bg.png')}</style></body></html>)",
             "text/html");
  server.add("/site/css/main.css", "@import url(\"more.css\");body{background:url(../img/bg.png)}", "text/css");
  server.add("/site/css/more.css", "p{color:red}", "text/css");
  server.add("/js/app.js", "console.log(1)", "application/javascript");
  server.add("/site/img/logo.png", logo, "image/png");
  server.add("/site/img/bg.png", fixtures::png(fixtures::solid(2, 2, 1, 2, 3)), "image/png");

  FetchPolicy policy;
  const auto page = fetch_page(server.url("/site/index.html"), policy);
  EXPECT_EQ(page.origin_url, server.url("/site/index.html"));
  EXPECT_GT(page.fetched_at, 0);
  const auto snap = localize_assets(page, policy);
  EXPECT_EQ(snap.fetch_status, FetchStatus::complete);
  EXPECT_EQ(snap.assets.size(), 5u);
  for (const auto& [path, rec] : snap.assets) {
    EXPECT_EQ(path.rfind("assets/", 0), 0u) << path;
    EXPECT_FALSE(rec.missing()) << path;
  }
  EXPECT_EQ(snap.markup.find("integrity"), std::string::npos);
  EXPECT_EQ(snap.markup.find("Content-Security-Policy"), std::string::npos);
  const auto doc = parse_document(snap.markup);
  const auto& img_src = *doc.first_element("img")->attribute("src");
  EXPECT_EQ(snap.assets.at(img_src).bytes, logo);
  // Stylesheet references now point at sibling asset files.
  for (const auto& [path, rec] : snap.assets) {
    if (rec.kind == AssetKind::stylesheet && rec.bytes.find("background") != std::string::npos) {
      EXPECT_EQ(rec.bytes.find("../img"), std::string::npos);
    }
  }
  // Localizing again changes nothing.
  EXPECT_EQ(localize_assets(snap, policy), snap);
}

TEST(Fetcher, MissingAssetMakesSnapshotPartial) {
  fixtures::FixtureServer server;
  server.add("/p.html", R"(<html><body><img src="gone.png"><img src="ok.png"></body></html>)", "text/html");
  server.add("/ok.png", fixtures::png(fixtures::solid(1, 1, 0, 0, 0)), "image/png");
  const auto snap = localize_assets(fetch_page(server.url("/p.html"), {}), {});
  EXPECT_EQ(snap.fetch_status, FetchStatus::partial);
  EXPECT_NE(snap.markup.find("gone.png"), std::string::npos);
}

TEST(Fetcher, FollowsRedirects) {
  fixtures::FixtureServer server;
  server.add("/final.html", "<html><body>final</body></html>", "text/html");
  server.redirect("/start", "/final.html");
  const auto page = fetch_page(server.url("/start"), {});
  EXPECT_EQ(page.origin_url, server.url("/final.html"));
}

TEST(Fetcher, ErrorMapping) {
  fixtures::FixtureServer server;
  server.add("/404", "nope", "text/plain", 404);
  server.add("/image", fixtures::png(fixtures::solid(2, 2, 0, 0, 0)), "image/png");
  server.slow("/slow", 1500);
  EXPECT_EQ(code_of([&] { fetch_page("ftp://example.com/", {}); }), ErrorCode::invalid_argument);
  EXPECT_EQ(code_of([&] { fetch_page(server.url("/404"), {}); }), ErrorCode::http_status);
  EXPECT_EQ(code_of([&] { fetch_page(server.url("/image"), {}); }), ErrorCode::not_html);
  FetchPolicy quick;
  quick.timeout_s = 0.3;
  EXPECT_EQ(code_of([&] { fetch_page(server.url("/slow"), quick); }), ErrorCode::timeout);
  int closed_port = 0;
  {
    fixtures::FixtureServer gone;
    closed_port = gone.port();
  }
  EXPECT_EQ(code_of([&] { fetch_page("http://127.0.0.1:" + std::to_string(closed_port) + "/", {}); }),
            ErrorCode::network_unreachable);
}

TEST(Fetcher, TranscodesDeclaredCharset) {
  const std::string latin1 = "<html><head><meta charset=\"iso-8859-1\"></head><body>caf\xE9</body></html>";
  const auto s = snapshot_from_markup(latin1, "https://x.example/", 0);
  EXPECT_NE(s.markup.find("caf\xC3\xA9"), std::string::npos);
  EXPECT_NE(s.markup.find("utf-8"), std::string::npos);
  EXPECT_EQ(sniff_meta_charset(latin1), "iso-8859-1");
}

TEST(Fetcher, DirectoryLoaderStaysInsideDirectory) {
  const auto dir = fixtures::temp_dir("dirloader");
  std::ofstream(dir / "a.css") << "x";
  const auto loader = directory_loader("https://site.example/pages/index.html", dir);
  EXPECT_TRUE(loader("https://site.example/pages/a.css"));
  EXPECT_FALSE(loader("https://site.example/other/a.css"));
  EXPECT_FALSE(loader("https://site.example/pages/../../etc/passwd"));
  fs::remove_all(dir);
}

TEST(Snapshot, WriteReadRoundTrip) {
  const auto dir = fixtures::temp_dir("snapshot");
  auto s = fixtures::login_page();
  s.assets["assets/missing.css"] = {"https://www.example.com/m.css", AssetKind::stylesheet, "", "text/css"};
  s.fetch_status = FetchStatus::partial;
  write_snapshot(s, dir);
  EXPECT_EQ(read_snapshot(dir), s);
  fs::remove_all(dir);
}
