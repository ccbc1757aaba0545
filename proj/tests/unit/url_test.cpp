// SPDX-License-Identifier: Apache-2.0
#include <gtest/gtest.h>

#include "phishgen/error.hpp"
#include "phishgen/url.hpp"

using namespace phishgen;

TEST(Url, ParsesComponents) {
  const auto u = parse_absolute_url("HTTPS://user@Example.COM:8443/a/b?x=1#top");
  ASSERT_TRUE(u);
  EXPECT_EQ(u->scheme, "https");
  EXPECT_EQ(u->userinfo, "user");
  EXPECT_EQ(u->host, "example.com");
  EXPECT_EQ(u->port, "8443");
  EXPECT_EQ(u->path, "/a/b");
  EXPECT_EQ(u->query, "x=1");
  EXPECT_EQ(u->fragment, "top");
  EXPECT_EQ(u->origin(), "https://example.com:8443");
}

TEST(Url, RejectsRelativeAndHostless) {
  EXPECT_FALSE(parse_absolute_url("/just/a/path"));
  EXPECT_FALSE(is_web_url("http://"));
  EXPECT_FALSE(is_web_url("ftp://example.com/"));
  EXPECT_FALSE(is_web_url("mailto:a@b.c"));
  EXPECT_TRUE(is_web_url("http://127.0.0.1:8080/"));
}

// Expected values follow the reference-resolution examples of the URI
// standard for base http://a/b/c/d;p?q.
TEST(Url, ResolvesReferences) {
  const std::string base = "http://a/b/c/d;p?q";
  const std::pair<const char*, const char*> cases[] = {
      {"g", "http://a/b/c/g"},         {"./g", "http://a/b/c/g"},      {"g/", "http://a/b/c/g/"},
      {"/g", "http://a/g"},            {"//g", "http://g/"},            {"?y", "http://a/b/c/d;p?y"},
      {"g?y", "http://a/b/c/g?y"},     {"#s", "http://a/b/c/d;p?q#s"}, {"g#s", "http://a/b/c/g#s"},
      {"..", "http://a/b/"},           {"../g", "http://a/b/g"},       {"../..", "http://a/"},
      {"../../g", "http://a/g"},       {"../../../g", "http://a/g"},   {"/./g", "http://a/g"},
      {"g/../h", "http://a/b/c/h"},    {"", "http://a/b/c/d;p?q"},     {".", "http://a/b/c/"},
  };
  for (const auto& [ref, want] : cases) EXPECT_EQ(resolve_reference(base, ref), want) << ref;
}

TEST(Url, ExtensionAndStem) {
  EXPECT_EQ(path_extension("https://x.com/img/Logo.PNG?v=2"), "png");
  EXPECT_EQ(path_extension("assets/file"), "");
  EXPECT_EQ(path_stem("https://x.com/img/logo.svg"), "logo");
}
