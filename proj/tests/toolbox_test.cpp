// Copyright 2026 The crashsift Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.


#include <gtest/gtest.h>

#include <algorithm>
#include <random>
#include <set>

#include <sys/stat.h>

#include "crashsift/error.hpp"
#include "crashsift/tool_runner.hpp"
#include "crashsift/toolbox.hpp"
#include "support.hpp"

namespace crashsift {
namespace {

namespace fs = std::filesystem;
using testing::TempDir;

ErrorKind kind_of(const std::function<void()>& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.kind();
  }
  ADD_FAILURE() << "no error";
  return ErrorKind::ParseError;
}

class ImgdecTest : public ::testing::Test {
 protected:
  void SetUp() override {
    root_ = testing::copy_fixture("pipeline/imgdec", tmp_ / "imgdec");
    checkout_ = std::make_unique<ProjectCheckout>("imgdec", root_, Language::C);
    index_ = build_symbol_index(*checkout_);
  }
  TempDir tmp_;
  fs::path root_;
  std::unique_ptr<ProjectCheckout> checkout_;
  SymbolIndex index_;
};

TEST_F(ImgdecTest, IndexesDefinitionsAndDeclarations) {
  EXPECT_EQ(index_.definition_count(), 8u);
  ASSERT_TRUE(index_.entries.count("decode_plane"));
  const auto& list = index_.entries.at("decode_plane");
  bool decl = false, def = false;
  for (const auto& e : list) {
    if (e.is_definition) {
      def = true;
      EXPECT_EQ(e.file, "src/image.c");
      EXPECT_LE(e.line_start, e.line_end);
      EXPECT_NE(e.signature.find("decode_plane"), std::string::npos);
    } else {
      decl = true;
      EXPECT_EQ(e.file, "src/image.h");
    }
  }
  EXPECT_TRUE(decl);
  EXPECT_TRUE(def);
}

TEST_F(ImgdecTest, CallersOfDecodePlane) {
  auto callers = find_callers(index_, "decode_plane");
  ASSERT_EQ(callers.size(), 1u);
  EXPECT_EQ(callers[0].caller, "imgdec_decode");
  EXPECT_EQ(callers[0].file, "src/api.c");
}

TEST_F(ImgdecTest, TestHarnessCallsDoNotHideTheApi) {
  auto ep = entry_points(index_);
  EXPECT_EQ(ep, std::vector<std::string>{"imgdec_decode"});
  // The harnesses do call it.
  auto callers = find_callers(index_, "imgdec_decode");
  EXPECT_EQ(callers.size(), 2u);
}

TEST_F(ImgdecTest, FunctionSearchReturnsSource) {
  auto hits = function_search(index_, *checkout_, "parse_header");
  ASSERT_EQ(hits.size(), 1u);
  EXPECT_EQ(hits[0].file, "src/header.c");
  EXPECT_NE(hits[0].source_text.find("parse_header"), std::string::npos);
  EXPECT_NE(hits[0].source_text.find('{'), std::string::npos);
  EXPECT_EQ(kind_of([&] { function_search(index_, *checkout_, "no_such_function"); }), ErrorKind::NotFound);
}

TEST_F(ImgdecTest, IndexJsonRoundTrip) {
  auto path = tmp_ / "index.json";
  save_index(index_, path);
  EXPECT_EQ(load_index(path), index_);
  EXPECT_EQ(symbol_index_from_json(to_json(index_)), index_);
}

TEST_F(ImgdecTest, IndexIsDeterministic) { EXPECT_EQ(build_symbol_index(*checkout_), index_); }

TEST_F(ImgdecTest, MetadataDirectoryIsNotIndexed) {
  testing::write_text(checkout_->metadata_dir() / "junk.c", "int hidden_fn(void) { return 0; }\n");
  auto again = build_symbol_index(*checkout_);
  EXPECT_EQ(again.entries.count("hidden_fn"), 0u);
}

TEST(SymbolIndex, QualifiedMethodsInCpp) {
  TempDir tmp;
  auto root = testing::copy_fixture("libraw/src", tmp / "libraw");
  ProjectCheckout checkout("libraw", root, Language::CPlusPlus);
  auto index = build_symbol_index(checkout);
  EXPECT_TRUE(index.entries.count("LibRaw::crxDecodePlane"));
  auto callers = find_callers(index, "crxDecodePlane");
  ASSERT_EQ(callers.size(), 1u);
  EXPECT_EQ(callers[0].caller, "LibRaw::crxLoadDecodeLoop");
  // A qualified query matches the same call sites.
  EXPECT_EQ(find_callers(index, "LibRaw::crxDecodePlane"), callers);
  auto ep = entry_points(index);
  std::set<std::string> eps(ep.begin(), ep.end());
  EXPECT_EQ(eps, (std::set<std::string>{"LibRaw::open_buffer", "LibRaw::unpack"}));
  auto src = function_search(index, checkout, "crxDecodePlane");
  ASSERT_EQ(src.size(), 1u);
  EXPECT_EQ(src[0].line_start, 19);
}

TEST(SymbolIndex, EmptyProject) {
  TempDir tmp;
  testing::write_text(tmp / "README", "nothing here\n");
  ProjectCheckout checkout("empty", tmp.path());
  EXPECT_EQ(kind_of([&] { build_symbol_index(checkout); }), ErrorKind::EmptyProject);
}

TEST(SymbolIndex, TestPredicates) {
  EXPECT_TRUE(is_test_location("tests/a.c"));
  EXPECT_TRUE(is_test_location("src/fuzz/x.cc"));
  EXPECT_FALSE(is_test_location("src/tests.c"));
  EXPECT_TRUE(is_test_name("test_decode"));
  EXPECT_TRUE(is_test_name("Foo::TestBar"));
  EXPECT_TRUE(is_test_name("decode_test"));
  EXPECT_FALSE(is_test_name("attest"));
  EXPECT_EQ(base_name("a::b::c"), "c");
  EXPECT_EQ(base_name("plain"), "plain");
}

// Random C call graphs: the index must agree with the brute-force scan.
TEST(SymbolIndex, MatchesOracleOnRandomCallGraphs) {
  std::mt19937 rng(20261019);
  for (int round = 0; round < 25; ++round) {
    TempDir tmp;
    const int n = 3 + static_cast<int>(rng() % 10);
    std::vector<std::string> names;
    for (int i = 0; i < n; ++i) names.push_back("fn" + std::to_string(i));
    std::string files[3];
    for (int i = 0; i < n; ++i) {
      std::string body;
      for (int j = i + 1; j < n; ++j) {
        if (rng() % 3 == 0) body += "  total += " + names[j] + "(x);\n";
      }
      if (rng() % 4 == 0) body += "  /* " + names[(i + 1) % n] + "(x) in a comment */\n";
      if (rng() % 4 == 0) body += "  log_it(\"" + names[(i + 2) % n] + "(x)\");\n";
      files[rng() % 3] += "int " + names[i] + "(int x) {\n  int total = x;\n" + body + "  return total;\n}\n\n";
    }
    testing::write_text(tmp / "src/a.c", files[0] + "\n");
    testing::write_text(tmp / "src/b.c", files[1] + "\n");
    testing::write_text(tmp / "lib/c.c", files[2] + "\nint keep(void) { return 0; }\n");
    testing::write_text(tmp / "tests/t.c", "int test_all(void) { return " + names[n - 1] + "(1); }\n");
    ProjectCheckout checkout("rand", tmp.path());
    auto index = build_symbol_index(checkout);
    auto scan = testing::oracle_scan(tmp.path());
    std::set<std::string> queries(names.begin(), names.end());
    queries.insert("log_it");
    for (const auto& q : queries) {
      std::vector<std::tuple<std::string, std::string, int>> got;
      for (const auto& c : find_callers(index, q)) got.emplace_back(c.caller, c.file, c.line);
      std::sort(got.begin(), got.end());
      EXPECT_EQ(got, testing::oracle_callers(scan, q)) << "round " << round << " callee " << q;
    }
    auto ep = entry_points(index);
    EXPECT_EQ(std::set<std::string>(ep.begin(), ep.end()), testing::oracle_entry_points(scan)) << "round " << round;
  }
}

// --- sandbox ----------------------------------------------------------------

class SandboxTest : public ::testing::Test {
 protected:
  void SetUp() override {
    root_ = testing::copy_fixture("tiny", tmp_ / "tiny");
    checkout_ = std::make_unique<ProjectCheckout>("tiny", root_, Language::C);
  }
  TempDir tmp_;
  fs::path root_;
  std::unique_ptr<ProjectCheckout> checkout_;
};

TEST_F(SandboxTest, ReadOnlyCommandsRun) {
  auto r = code_search(*checkout_, "grep -rn \"helper\" .");
  EXPECT_EQ(r.exit_status, 0);
  EXPECT_NE(r.stdout_text.find("lib.c:3"), std::string::npos);
  EXPECT_EQ(code_search(*checkout_, "wc -l lib.c").exit_status, 0);
  EXPECT_EQ(code_search(*checkout_, "sed -n 1,2p lib.c").exit_status, 0);
  EXPECT_EQ(code_search(*checkout_, "find . -name *.c").exit_status, 0);
  // A non-matching grep is not an error for the sandbox.
  EXPECT_EQ(code_search(*checkout_, "grep nothing_matches lib.c").exit_status, 1);
}

TEST_F(SandboxTest, OutputIsCapped) {
  std::string big(200 * 1024, 'x');
  testing::write_text(root_ / "big.txt", big + "\n");
  SearchLimits limits;
  limits.output_cap_bytes = 1024;
  auto r = code_search(*checkout_, "cat big.txt", limits);
  EXPECT_TRUE(r.truncated);
  EXPECT_LE(r.stdout_text.size(), 1024u);
}

TEST_F(SandboxTest, SplitCommandQuoting) {
  EXPECT_EQ(split_command("grep -n 'a b' \"c d\" e\\ f"),
            (std::vector<std::string>{"grep", "-n", "a b", "c d", "e f"}));
  EXPECT_EQ(kind_of([] { split_command("cat a | wc"); }), ErrorKind::DisallowedCommand);
  EXPECT_EQ(kind_of([] { split_command("cat 'unterminated"); }), ErrorKind::DisallowedCommand);
  EXPECT_EQ(kind_of([] { split_command("   "); }), ErrorKind::DisallowedCommand);
}

TEST_F(SandboxTest, ResolveRejectsEscapes) {
  EXPECT_EQ(checkout_->resolve("lib.c"), checkout_->root() / "lib.c");
  EXPECT_EQ(kind_of([&] { checkout_->resolve("../x"); }), ErrorKind::PathEscape);
  EXPECT_EQ(kind_of([&] { checkout_->resolve("/etc/passwd"); }), ErrorKind::PathEscape);
  testing::write_text(tmp_ / "outside/secret", "x\n");
  fs::create_directory_symlink(tmp_ / "outside", root_ / "out");
  EXPECT_EQ(kind_of([&] { checkout_->resolve("out/secret"); }), ErrorKind::PathEscape);
  // A link that stays inside is fine.
  fs::create_symlink(root_ / "lib.c", root_ / "alias.c");
  EXPECT_EQ(checkout_->resolve("alias.c"), checkout_->root() / "lib.c");
}

TEST_F(SandboxTest, TimeoutIsReported) {
  // A FIFO nobody writes to makes cat block.
  auto fifo = root_ / "pipe";
  ASSERT_EQ(::mkfifo(fifo.c_str(), 0600), 0);
  SearchLimits limits;
  limits.timeout = std::chrono::milliseconds(200);
  EXPECT_EQ(kind_of([&] { code_search(*checkout_, "cat pipe", limits); }), ErrorKind::Timeout);
}

TEST_F(SandboxTest, ToolRunnerReportsErrorsAsText) {
  auto index = std::make_shared<const SymbolIndex>(build_symbol_index(*checkout_));
  ToolboxRunner runner(*checkout_, index);
  EXPECT_NE(runner.run({kToolCodeSearch, "rm lib.c"}).find("DisallowedCommand"), std::string::npos);
  EXPECT_NE(runner.run({kToolFindCallers, "leaf"}).find("lib.c:3 in helper"), std::string::npos);
  EXPECT_NE(runner.run({kToolFindCallers, "tiny_api"}).find("no callers"), std::string::npos);
  EXPECT_EQ(runner.run({kToolEntryPoints, ""}), "tiny_api\n");
  EXPECT_NE(runner.run({kToolFunctionSearch, "helper"}).find("static int helper"), std::string::npos);
  EXPECT_NE(runner.run({"shell", "ls"}).find("unknown tool"), std::string::npos);
  EXPECT_TRUE(fs::exists(root_ / "lib.c"));
}

}  // namespace
}  // namespace crashsift
