// SPDX-License-Identifier: Apache-2.0
#include <gtest/gtest.h>

#include <fstream>
#include <set>
#include <sstream>

#include "phishgen/error.hpp"
#include "phishgen/spoof.hpp"

using namespace phishgen;

namespace {

// Every single-edit spoof, by direct application of each rule.
std::set<std::string> one_edit_oracle(const std::string& subdomains, const std::string& label, const std::string& tld,
                                      const SpoofRuleSet& rules) {
  std::set<std::string> out;
  for (const auto& [key, reps] : rules.homoglyphs) {
    for (std::size_t pos = label.find(key); pos != std::string::npos; pos = label.find(key, pos + 1)) {
      for (const auto& r : reps) {
        std::string l = label;
        l.replace(pos, key.size(), r);
        out.insert(subdomains + l + "." + tld);
      }
    }
  }
  for (const auto& p : rules.prefixes) out.insert(subdomains + p + label + "." + tld);
  for (const auto& s : rules.suffixes) out.insert(subdomains + label + s + "." + tld);
  for (const auto& t : rules.tld_swaps) {
    if (t != tld) out.insert(subdomains + label + "." + t);
  }
  return out;
}

bool rule_exists(const SpoofRuleSet& rules, const SpoofEdit& e) {
  switch (e.kind) {
    case EditKind::homoglyph:
      for (const auto& [key, reps] : rules.homoglyphs) {
        if (key == e.before && std::find(reps.begin(), reps.end(), e.after) != reps.end()) return true;
      }
      return false;
    case EditKind::prefix:
      return e.before.empty() && std::find(rules.prefixes.begin(), rules.prefixes.end(), e.after) != rules.prefixes.end();
    case EditKind::suffix:
      return e.before.empty() && std::find(rules.suffixes.begin(), rules.suffixes.end(), e.after) != rules.suffixes.end();
    case EditKind::tld_swap:
      return std::find(rules.tld_swaps.begin(), rules.tld_swaps.end(), e.after) != rules.tld_swaps.end();
  }
  return false;
}

}  // namespace

TEST(Spoof, SplitsDomains) {
  const auto p = split_domain("login.accounts.example.co.uk");
  EXPECT_EQ(p.subdomains, "login.accounts.");
  EXPECT_EQ(p.label, "example");
  EXPECT_EQ(p.suffix, "co.uk");
  EXPECT_THROW(split_domain("localhost"), Error);
  EXPECT_THROW(split_domain("192.168.0.1"), Error);
  EXPECT_THROW(split_domain(".com"), Error);
}

TEST(Spoof, MandatedSubstitution) {
  EXPECT_EQ(replay_edits("domain.com", {{EditKind::homoglyph, 0, "d", "cl"}}), "clomain.com");
}

TEST(Spoof, KnownExampleReplays) {
  const std::vector<SpoofEdit> edits = {{EditKind::homoglyph, 6, "o", "c"},
                                        {EditKind::suffix, 8, "", "-login"},
                                        {EditKind::tld_swap, 15, "com", "co"}};
  EXPECT_EQ(replay_edits("facebook.com", edits), "facebock-login.co");
  for (const auto& e : edits) EXPECT_TRUE(rule_exists(default_spoof_rules(), e));
}

TEST(Spoof, SamplerReachesKnownExample) {
  const auto rules = default_spoof_rules();
  bool found = false;
  for (std::uint64_t seed = 0; seed < 100000 && !found; ++seed) {
    Rng rng(seed);
    found = spoof_domain("facebook.com", rules, rng).spoofed_domain == "facebock-login.co";
  }
  EXPECT_TRUE(found);
}

TEST(Spoof, SingleEditSamplesMatchOracle) {
  const auto rules = default_spoof_rules();
  const auto oracle = one_edit_oracle("", "ml", "com", rules);
  // m->nn, m->rn, l->1, 3 prefixes, 3 suffixes, 3 TLDs.
  EXPECT_EQ(oracle.size(), 12u);
  std::set<std::string> seen;
  for (std::uint64_t seed = 0; seed < 500; ++seed) {
    Rng rng(seed);
    const auto r = spoof_domain("ml.com", rules, rng, 1, 1);
    ASSERT_EQ(r.edits.size(), 1u);
    EXPECT_TRUE(oracle.contains(r.spoofed_domain)) << r.spoofed_domain;
    seen.insert(r.spoofed_domain);
  }
  EXPECT_EQ(seen, oracle);
}

TEST(Spoof, DefaultSamplesSatisfyInvariants) {
  const auto rules = default_spoof_rules();
  for (const char* domain : {"facebook.com", "www.paypal.com", "bank.co.uk", "x.io", "mail.google.com"}) {
    for (std::uint64_t seed = 0; seed < 200; ++seed) {
      Rng rng(seed);
      const auto r = spoof_domain(domain, rules, rng);
      EXPECT_NE(r.spoofed_domain, r.original_domain);
      EXPECT_EQ(replay_edits(r.original_domain, r.edits), r.spoofed_domain);
      EXPECT_GE(r.edits.size(), 1u);
      EXPECT_LE(r.edits.size(), 3u);
      for (const auto& e : r.edits) EXPECT_TRUE(rule_exists(rules, e));
      // Subdomains never change.
      const auto sub = split_domain(domain).subdomains;
      EXPECT_EQ(r.spoofed_domain.substr(0, sub.size()), sub);
    }
  }
}

TEST(Spoof, MinEditsHonoured) {
  Rng rng(5);
  const auto r = spoof_domain("facebook.com", default_spoof_rules(), rng, 3);
  EXPECT_GE(r.edits.size(), 3u);
  EXPECT_LE(r.edits.size(), 5u);
}

TEST(Spoof, NoApplicableRule) {
  SpoofRuleSet rules;
  rules.homoglyphs = {{"q", {"g"}}};
  Rng rng(1);
  try {
    spoof_domain("x.com", rules, rng);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::no_applicable_rule);
  }
}

TEST(Spoof, UrlKeepsEverythingButHost) {
  Rng rng(2);
  SpoofResult r;
  const auto out = spoof_url("https://user@facebook.com:8443/login?x=1#f", default_spoof_rules(), rng, 1, &r);
  EXPECT_EQ(out, "https://user@" + r.spoofed_domain + ":8443/login?x=1#f");
  Rng rng2(2);
  const auto bare = spoof_url("https://facebook.com", default_spoof_rules(), rng2);
  EXPECT_EQ(bare.find('/', 8), std::string::npos);
}

TEST(Spoof, UrlReplayForManySeeds) {
  for (std::uint64_t seed = 0; seed < 50; ++seed) {
    Rng rng(seed);
    SpoofResult r;
    spoof_url("https://facebook.com/login?x=1", default_spoof_rules(), rng, 1, &r);
    EXPECT_EQ(replay_edits(r.original_domain, r.edits), r.spoofed_domain);
  }
}

TEST(Spoof, Deterministic) {
  Rng a(77), b(77);
  const auto x = spoof_domain("github.com", default_spoof_rules(), a);
  const auto y = spoof_domain("github.com", default_spoof_rules(), b);
  EXPECT_EQ(x.spoofed_domain, y.spoofed_domain);
  EXPECT_EQ(x.edits, y.edits);
}

TEST(Spoof, RuleValidation) {
  SpoofRuleSet bad;
  bad.prefixes = {"secure"};
  EXPECT_THROW(bad.validate(), Error);
  SpoofRuleSet identity;
  identity.homoglyphs = {{"a", {"a"}}};
  EXPECT_THROW(identity.validate(), Error);
  EXPECT_THROW(parse_spoof_rules("bogus\ta\tb\n"), Error);
}

TEST(Spoof, DataFileMatchesDefaults) {
  const auto rules = load_spoof_rules(std::string(PHISHGEN_DATA_DIR) + "/spoof_rules.tsv");
  const auto defaults = default_spoof_rules();
  EXPECT_EQ(rules.homoglyphs, defaults.homoglyphs);
  EXPECT_EQ(rules.prefixes, defaults.prefixes);
  EXPECT_EQ(rules.suffixes, defaults.suffixes);
  EXPECT_EQ(rules.tld_swaps, defaults.tld_swaps);
}
