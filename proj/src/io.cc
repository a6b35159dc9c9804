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

#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <iostream>
#include <map>
#include <set>
#include <sstream>
#include <utility>
#include <vector>

#include "trmeval/error.h"

namespace trmeval {
namespace {

using nlohmann::json;

class LineError {
 public:
  LineError(const std::filesystem::path& path, std::size_t line)
      : prefix_(path.string() + ":" + std::to_string(line) + ": ") {}
  LineError(const LineError& base, const std::string& id)
      : prefix_(base.prefix_ + "instance '" + id + "': ") {}

  [[noreturn]] void Fail(const std::string& message) const {
    throw Error(ErrorCode::kValidation, prefix_ + message);
  }

 private:
  std::string prefix_;
};

// Calls fn(line_number, text) for every line. Blank lines are errors.
void ForEachLine(const std::filesystem::path& path,
                 const std::function<void(std::size_t, const std::string&)>& fn) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::kIo, "cannot open " + path.string());
  std::string text;
  std::size_t line = 0;
  while (std::getline(in, text)) {
    ++line;
    if (text.find_first_not_of(" \t\r") == std::string::npos) {
      LineError(path, line).Fail("blank line");
    }
    fn(line, text);
  }
  if (in.bad()) throw Error(ErrorCode::kIo, "read error on " + path.string());
  if (line == 0) {
    throw Error(ErrorCode::kValidation, path.string() + ": file is empty");
  }
}

json ParseObject(const std::string& text, const LineError& err) {
  json value;
  try {
    value = json::parse(text);
  } catch (const json::exception& e) {
    err.Fail(std::string("malformed JSON: ") + e.what());
  }
  if (!value.is_object()) err.Fail("expected a JSON object");
  return value;
}

void CheckKeys(const json& obj, const std::set<std::string>& allowed,
               const LineError& err) {
  for (const auto& [key, unused] : obj.items()) {
    if (!allowed.count(key)) err.Fail("unexpected key '" + key + "'");
  }
  for (const auto& key : allowed) {
    if (!obj.contains(key)) err.Fail("missing key '" + key + "'");
  }
}

std::vector<std::string> StringList(const json& obj, const std::string& key,
                                    const LineError& err) {
  const json& value = obj.at(key);
  if (!value.is_array()) err.Fail("'" + key + "' must be an array of strings");
  if (value.empty()) err.Fail("'" + key + "' must not be empty");
  std::vector<std::string> out;
  out.reserve(value.size());
  for (const auto& item : value) {
    if (!item.is_string()) err.Fail("'" + key + "' must contain only strings");
    out.push_back(item.get<std::string>());
  }
  return out;
}

void SerializeInto(const json& value, int indent, std::string& out) {
  const std::string pad(indent, ' ');
  const std::string inner(indent + 2, ' ');
  switch (value.type()) {
    case json::value_t::object: {
      if (value.empty()) {
        out += "{}";
        return;
      }
      out += "{\n";
      bool first = true;
      for (const auto& [key, item] : value.items()) {
        if (!first) out += ",\n";
        first = false;
        out += inner + json(key).dump() + ": ";
        SerializeInto(item, indent + 2, out);
      }
      out += "\n" + pad + "}";
      return;
    }
    case json::value_t::array: {
      if (value.empty()) {
        out += "[]";
        return;
      }
      out += "[\n";
      bool first = true;
      for (const auto& item : value) {
        if (!first) out += ",\n";
        first = false;
        out += inner;
        SerializeInto(item, indent + 2, out);
      }
      out += "\n" + pad + "]";
      return;
    }
    case json::value_t::number_float:
      out += FormatDouble(value.get<double>());
      return;
    default:
      out += value.dump();
      return;
  }
}

}  // namespace

std::string FormatDouble(double value) {
  if (!std::isfinite(value)) {
    throw Error(ErrorCode::kInvalidArgument, "cannot serialize a non-finite number");
  }
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.17g", value);
  std::string out(buf);
  if (out.find_first_of(".eE") == std::string::npos) out += ".0";
  return out;
}

Corpus LoadCorpus(const std::filesystem::path& path) {
  std::vector<EvalInstance> instances;
  std::set<std::string> ids;
  ForEachLine(path, [&](std::size_t line, const std::string& text) {
    const LineError err(path, line);
    const json obj = ParseObject(text, err);
    CheckKeys(obj, {"id", "candidates", "references"}, err);
    if (!obj["id"].is_string() || obj["id"].get<std::string>().empty()) {
      err.Fail("'id' must be a nonempty string");
    }
    EvalInstance instance;
    instance.id = obj["id"].get<std::string>();
    if (!ids.insert(instance.id).second) {
      err.Fail("duplicate id '" + instance.id + "'");
    }
    const LineError id_err(err, instance.id);
    const auto candidates = StringList(obj, "candidates", id_err);
    const auto references = StringList(obj, "references", id_err);
    instance.candidates = MakeUtterances(candidates);
    instance.references = MakeUtterances(references);
    instances.push_back(std::move(instance));
  });
  return MakeCorpus(std::move(instances));
}

EmbeddingTable LoadEmbeddings(const std::filesystem::path& path) {
  std::optional<EmbeddingTable> table;
  ForEachLine(path, [&](std::size_t line, const std::string& text) {
    const LineError err(path, line);
    const json obj = ParseObject(text, err);
    if (line == 1) {
      CheckKeys(obj, {"format_version", "dim", "encoder_name", "pooling"}, err);
      if (!obj["format_version"].is_number_integer() ||
          obj["format_version"].get<int>() != kEmbeddingFormatVersion) {
        err.Fail("unsupported format_version");
      }
      if (!obj["dim"].is_number_integer() || obj["dim"].get<long long>() <= 0) {
        err.Fail("'dim' must be a positive integer");
      }
      if (!obj["encoder_name"].is_string() || !obj["pooling"].is_string()) {
        err.Fail("'encoder_name' and 'pooling' must be strings");
      }
      EmbeddingHeader header;
      header.format_version = obj["format_version"].get<int>();
      header.dim = obj["dim"].get<int>();
      header.encoder_name = obj["encoder_name"].get<std::string>();
      header.pooling = obj["pooling"].get<std::string>();
      table.emplace(std::move(header));
      return;
    }
    CheckKeys(obj, {"key", "vector"}, err);
    if (!obj["key"].is_string()) err.Fail("'key' must be a string");
    const auto key = obj["key"].get<std::string>();
    if (!IsTextKey(key)) err.Fail("'key' is not 64 lowercase hex characters");
    const json& vec = obj["vector"];
    if (!vec.is_array()) err.Fail("'vector' must be an array of numbers");
    if (static_cast<int>(vec.size()) != table->dim()) {
      err.Fail("vector has length " + std::to_string(vec.size()) +
               ", header dim is " + std::to_string(table->dim()));
    }
    Eigen::VectorXd v(table->dim());
    for (int i = 0; i < table->dim(); ++i) {
      if (!vec[i].is_number()) err.Fail("'vector' must contain only numbers");
      v(i) = vec[i].get<double>();
    }
    try {
      table->Insert(key, std::move(v));
    } catch (const Error& e) {
      err.Fail(e.what());
    }
  });
  return std::move(*table);
}

void WriteCorpus(const Corpus& corpus, const std::filesystem::path& path) {
  std::string out;
  for (const auto& instance : corpus.instances) {
    json obj;
    obj["id"] = instance.id;
    obj["candidates"] = json::array();
    obj["references"] = json::array();
    for (const auto& c : instance.candidates) obj["candidates"].push_back(c.raw());
    for (const auto& r : instance.references) obj["references"].push_back(r.raw());
    out += obj.dump() + "\n";
  }
  WriteTextFile(path, out);
}

void WriteEmbeddings(const EmbeddingTable& table,
                     const std::filesystem::path& path) {
  json header;
  header["format_version"] = table.header().format_version;
  header["dim"] = table.dim();
  header["encoder_name"] = table.header().encoder_name;
  header["pooling"] = table.header().pooling;
  std::string out = header.dump() + "\n";
  std::map<std::string, const Eigen::VectorXd*> sorted;
  for (const auto& [key, v] : table.entries()) sorted.emplace(key, &v);
  for (const auto& [key, v] : sorted) {
    out += "{\"key\":\"" + key + "\",\"vector\":[";
    for (Eigen::Index i = 0; i < v->size(); ++i) {
      if (i > 0) out += ",";
      out += FormatDouble((*v)(i));
    }
    out += "]}\n";
  }
  WriteTextFile(path, out);
}

std::string SerializeJson(const nlohmann::json& value) {
  std::string out;
  SerializeInto(value, 0, out);
  out += "\n";
  return out;
}

void WriteReport(const nlohmann::json& report, const std::filesystem::path& path) {
  WriteTextFile(path, SerializeJson(report));
}

nlohmann::json ReadReport(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::kIo, "cannot open " + path.string());
  std::stringstream buffer;
  buffer << in.rdbuf();
  try {
    return json::parse(buffer.str());
  } catch (const json::exception& e) {
    throw Error(ErrorCode::kValidation,
                path.string() + ": malformed report: " + e.what());
  }
}

void WriteCurve(std::span<const SensitivityRow> rows,
                const std::filesystem::path& path) {
  std::string out = "k,hmp,log10_hmp\n";
  for (const auto& row : rows) {
    out += std::to_string(row.k) + "," + FormatDouble(row.hmp) + "," +
           FormatDouble(row.log10_hmp) + "\n";
  }
  WriteTextFile(path, out);
}

void WriteTextFile(const std::filesystem::path& path, const std::string& contents) {
  if (path == "-") {
    std::cout << contents << std::flush;
    return;
  }
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorCode::kIo, "cannot write " + path.string());
  out << contents;
  out.close();
  if (!out) throw Error(ErrorCode::kIo, "write failed for " + path.string());
}

}  // namespace trmeval
