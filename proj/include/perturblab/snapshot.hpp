#pragma once

// Dataset snapshot format: newline-delimited JSON, one example per line,
// fields dense (array), embeddings (array of arrays), sparse (array of
// nullable integers), label (0 or 1).

#include <istream>
#include <ostream>
#include <string>
#include <vector>

#include <json.hpp>

#include "perturblab/augment.hpp"

namespace plab {

inline nlohmann::json example_to_json(const Example& ex) {
  nlohmann::json j;
  j["dense"] = ex.dense;
  j["embeddings"] = ex.embeddings;
  nlohmann::json sparse = nlohmann::json::array();
  for (const SparseSlot& s : ex.sparse) {
    if (s)
      sparse.push_back(*s);
    else
      sparse.push_back(nullptr);
  }
  j["sparse"] = sparse;
  j["label"] = ex.label;
  return j;
}

inline Example example_from_json(const nlohmann::json& j) {
  Example ex;
  ex.dense = j.at("dense").get<Vector>();
  ex.embeddings = j.at("embeddings").get<std::vector<Vector>>();
  for (const auto& s : j.at("sparse")) {
    if (s.is_null())
      ex.sparse.emplace_back();
    else
      ex.sparse.emplace_back(s.get<std::int64_t>());
  }
  ex.label = j.at("label").get<int>();
  require(ex.label == 0 || ex.label == 1, "example: label must be 0 or 1");
  return ex;
}

inline void write_examples_jsonl(std::ostream& os, const std::vector<Example>& examples) {
  for (const Example& ex : examples) os << example_to_json(ex).dump() << '\n';
}

inline std::vector<Example> read_examples_jsonl(std::istream& is) {
  std::vector<Example> out;
  std::string line;
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    out.push_back(example_from_json(nlohmann::json::parse(line)));
  }
  return out;
}

}  // namespace plab
