// Copyright 2026 The trmeval Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.


#include "trmeval/io.h"

#include <gtest/gtest.h>

#include <cmath>
#include <functional>
#include <limits>
#include <string>
#include <vector>

#include "test_util.h"
#include "trmeval/error.h"

namespace trmeval {
namespace {

using testing::ReadFile;
using testing::TempDir;
using testing::WriteLines;

// Runs fn and returns the error it raised.
Error ErrorOf(const std::function<void()>& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e;
  }
  ADD_FAILURE() << "expected an error";
  return Error(ErrorCode::kIo, "none");
}

bool Contains(const Error& e, const std::string& needle) {
  return std::string(e.what()).find(needle) != std::string::npos;
}

TEST(LoadCorpusTest, TwoLinesInFileOrder) {
  TempDir dir("corpus_ok");
  WriteLines(dir / "c.jsonl",
             {R"({"id":"z","candidates":["A man runs."],"references":["a man","b"]})",
              R"({"references":["x"],"id":"a","candidates":["y","w"]})"});
  const Corpus corpus = LoadCorpus(dir / "c.jsonl");
  ASSERT_EQ(corpus.instances.size(), 2u);
  EXPECT_EQ(corpus.instances[0].id, "z");
  EXPECT_EQ(corpus.instances[0].candidates[0].raw(), "A man runs.");
  EXPECT_EQ(corpus.instances[0].candidates[0].tokens(),
            (Tokens{"a", "man", "runs"}));
  EXPECT_EQ(corpus.instances[0].m(), 2u);
  EXPECT_EQ(corpus.instances[1].id, "a");
  EXPECT_EQ(corpus.instances[1].n(), 2u);
}

TEST(LoadCorpusTest, MissingKeyCitesLine) {
  TempDir dir("corpus_missing");
  WriteLines(dir / "c.jsonl", {R"({"id":"a","candidates":["x"]})"});
  const Error e = ErrorOf([&] { LoadCorpus(dir / "c.jsonl"); });
  EXPECT_EQ(e.code(), ErrorCode::kValidation);
  EXPECT_TRUE(Contains(e, "c.jsonl:1:"));
  EXPECT_TRUE(Contains(e, "references"));
}

TEST(LoadCorpusTest, DuplicateIdNamesTheId) {
  TempDir dir("corpus_dup");
  WriteLines(dir / "c.jsonl",
             {R"({"id":"same","candidates":["x"],"references":["y"]})",
              R"({"id":"same","candidates":["x"],"references":["y"]})"});
  const Error e = ErrorOf([&] { LoadCorpus(dir / "c.jsonl"); });
  EXPECT_EQ(e.code(), ErrorCode::kValidation);
  EXPECT_TRUE(Contains(e, ":2:"));
  EXPECT_TRUE(Contains(e, "duplicate id 'same'"));
}

TEST(LoadCorpusTest, RejectsMalformedInput) {
  TempDir dir("corpus_bad");
  const std::vector<std::pair<std::string, std::string>> cases = {
      {R"({"id":"a","candidates":["x"],"references":["y"]}, )", "malformed"},
      {R"(["a"])", "object"},
      {R"({"id":"a","candidates":["x"],"references":["y"],"extra":1})", "extra"},
      {R"({"id":"","candidates":["x"],"references":["y"]})", "id"},
      {R"({"id":7,"candidates":["x"],"references":["y"]})", "id"},
      {R"({"id":"a","candidates":[],"references":["y"]})", "empty"},
      {R"({"id":"a","candidates":["x", 3],"references":["y"]})", "strings"},
      {R"({"id":"a","candidates":"x","references":["y"]})", "array"},
  };
  for (const auto& [line, needle] : cases) {
    WriteLines(dir / "c.jsonl",
               {R"({"id":"ok","candidates":["x"],"references":["y"]})", line});
    const Error e = ErrorOf([&] { LoadCorpus(dir / "c.jsonl"); });
    EXPECT_EQ(e.code(), ErrorCode::kValidation) << line;
    EXPECT_TRUE(Contains(e, ":2:")) << e.what();
    EXPECT_TRUE(Contains(e, needle)) << e.what();
  }
}

TEST(LoadCorpusTest, BlankLineEmptyFileAndMissingFile) {
  TempDir dir("corpus_blank");
  WriteLines(dir / "c.jsonl",
             {R"({"id":"a","candidates":["x"],"references":["y"]})", ""});
  EXPECT_TRUE(Contains(ErrorOf([&] { LoadCorpus(dir / "c.jsonl"); }), ":2: blank"));
  WriteLines(dir / "e.jsonl", {});
  EXPECT_EQ(ErrorOf([&] { LoadCorpus(dir / "e.jsonl"); }).code(),
            ErrorCode::kValidation);
  EXPECT_EQ(ErrorOf([&] { LoadCorpus(dir / "absent.jsonl"); }).code(),
            ErrorCode::kIo);
}

std::string Header(int dim) {
  return R"({"format_version":1,"dim":)" + std::to_string(dim) +
         R"(,"encoder_name":"test","pooling":"mean"})";
}

std::string Entry(const std::string& text, const std::string& vector) {
  return R"({"key":")" + TextKey(text) + R"(","vector":)" + vector + "}";
}

TEST(LoadEmbeddingsTest, HeaderAndOneLine) {
  TempDir dir("emb_ok");
  WriteLines(dir / "e.jsonl", {Header(4), Entry("hello", "[0.5,0.5,0.5,0.5]")});
  const EmbeddingTable t = LoadEmbeddings(dir / "e.jsonl");
  EXPECT_EQ(t.size(), 1u);
  EXPECT_EQ(t.dim(), 4);
  EXPECT_EQ(t.header().encoder_name, "test");
  EXPECT_EQ(t.Lookup("hello")(2), 0.5);
}

TEST(LoadEmbeddingsTest, RejectsBadLines) {
  TempDir dir("emb_bad");
  const std::vector<std::pair<std::string, std::string>> cases = {
      {Entry("a", "[1.0,0.0,0.0]"), "length 3"},
      {Entry("a", "[0.5,0.0,0.0,0.0]"), "norm"},
      {R"({"key":"ABC","vector":[1.0,0.0,0.0,0.0]})", "hex"},
      {Entry("a", R"([1.0,0.0,0.0,"x"])"), "numbers"},
      {Entry("a", "[1.0,0.0,0.0,0.0]").substr(1), "malformed"},
  };
  for (const auto& [line, needle] : cases) {
    WriteLines(dir / "e.jsonl", {Header(4), line});
    const Error e = ErrorOf([&] { LoadEmbeddings(dir / "e.jsonl"); });
    EXPECT_EQ(e.code(), ErrorCode::kValidation) << line;
    EXPECT_TRUE(Contains(e, "e.jsonl:2:")) << e.what();
    EXPECT_TRUE(Contains(e, needle)) << e.what();
  }
  WriteLines(dir / "e.jsonl", {Header(2), Entry("a", "[1.0,0.0]"), Entry("a", "[0.0,1.0]")});
  EXPECT_TRUE(Contains(ErrorOf([&] { LoadEmbeddings(dir / "e.jsonl"); }), ":3:"));
  WriteLines(dir / "e.jsonl",
             {R"({"format_version":2,"dim":2,"encoder_name":"t","pooling":"p"})"});
  EXPECT_TRUE(Contains(ErrorOf([&] { LoadEmbeddings(dir / "e.jsonl"); }), ":1:"));
  WriteLines(dir / "e.jsonl",
             {R"({"format_version":1,"dim":0,"encoder_name":"t","pooling":"p"})"});
  EXPECT_TRUE(Contains(ErrorOf([&] { LoadEmbeddings(dir / "e.jsonl"); }), "dim"));
}

TEST(WriteEmbeddingsTest, RoundTripsSortedByKey) {
  TempDir dir("emb_rt");
  EmbeddingTable t(EmbeddingHeader{1, 2, "enc", "cls"});
  t.Insert(TextKey("b"), Eigen::Vector2d(0.6, 0.8));
  t.Insert(TextKey("a"), Eigen::Vector2d(1.0 / std::sqrt(2.0), 1.0 / std::sqrt(2.0)));
  WriteEmbeddings(t, dir / "e.jsonl");
  const EmbeddingTable back = LoadEmbeddings(dir / "e.jsonl");
  EXPECT_EQ(back.size(), 2u);
  EXPECT_EQ(back.Lookup("a"), t.Lookup("a"));
  EXPECT_EQ(back.Lookup("b"), t.Lookup("b"));
  const std::string text = ReadFile(dir / "e.jsonl");
  EXPECT_LT(text.find(std::min(TextKey("a"), TextKey("b"))),
            text.find(std::max(TextKey("a"), TextKey("b"))));
  WriteEmbeddings(back, dir / "f.jsonl");
  EXPECT_EQ(ReadFile(dir / "f.jsonl"), text);
}

TEST(FormatDoubleTest, SeventeenDigits) {
  EXPECT_EQ(FormatDouble(2.0), "2.0");
  EXPECT_EQ(FormatDouble(-0.5), "-0.5");
  EXPECT_EQ(FormatDouble(0.1), "0.10000000000000001");
  EXPECT_EQ(FormatDouble(1e21), "1e+21");
  EXPECT_THROW(FormatDouble(std::numeric_limits<double>::quiet_NaN()), Error);
  EXPECT_THROW(FormatDouble(std::numeric_limits<double>::infinity()), Error);
}

TEST(SerializeJsonTest, SortedIndentedExact) {
  nlohmann::json v;
  v["zeta"] = 1;
  v["alpha"] = nlohmann::json::array({0.25, 3.0, "s"});
  v["mid"] = nlohmann::json::object();
  EXPECT_EQ(SerializeJson(v),
            "{\n"
            "  \"alpha\": [\n"
            "    0.25,\n"
            "    3.0,\n"
            "    \"s\"\n"
            "  ],\n"
            "  \"mid\": {},\n"
            "  \"zeta\": 1\n"
            "}\n");
}

TEST(ReportTest, RoundTripAndDeterminism) {
  TempDir dir("report");
  nlohmann::json report;
  report["hmp"] = 2.0 / 101.0;
  report["log10_hmp"] = std::log10(2.0 / 101.0);
  report["instances"] = nlohmann::json::array(
      {nlohmann::json{{"id", "a"}, {"p", 1.0 / 3.0}, {"evaluations", 3}}});
  report["tool_version"] = "x";
  WriteReport(report, dir / "r1.json");
  WriteReport(report, dir / "r2.json");
  EXPECT_EQ(ReadReport(dir / "r1.json"), report);
  EXPECT_EQ(ReadFile(dir / "r1.json"), ReadFile(dir / "r2.json"));
  nlohmann::json bad;
  bad["x"] = std::numeric_limits<double>::quiet_NaN();
  EXPECT_THROW(SerializeJson(bad), Error);
}

TEST(CurveTest, HeaderPlusOneLinePerRow) {
  TempDir dir("curve");
  const std::vector<SensitivityRow> rows = {
      {1, 0.5, std::log10(0.5)}, {2, 0.25, std::log10(0.25)}, {3, 0.1, -1.0}};
  WriteCurve(rows, dir / "c.csv");
  const std::string text = ReadFile(dir / "c.csv");
  EXPECT_EQ(std::count(text.begin(), text.end(), '\n'), 4);
  EXPECT_EQ(text.substr(0, text.find('\n')), "k,hmp,log10_hmp");
  EXPECT_NE(text.find("\n3,0.10000000000000001,-1.0\n"), std::string::npos);
}

TEST(WriteTextFileTest, UnwritablePath) {
  EXPECT_EQ(ErrorOf([] { WriteTextFile("/nonexistent-dir/x/y.txt", "z"); }).code(),
            ErrorCode::kIo);
}

}  // namespace
}  // namespace trmeval
