#pragma once

// Pretrained word vectors: text lines "word v1 ... v_d".

#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <unordered_map>
#include <vector>

#include "tlre/corpus.hpp"
#include "tlre/params.hpp"

namespace tlre {

/// `found` and `missing` count vocabulary words other than <pad>/<unk>;
/// those two reserved rows are never overwritten.
struct EmbeddingCoverage {
  std::size_t found = 0;
  std::size_t missing = 0;
  std::size_t lines = 0;
  std::size_t duplicates = 0;
  std::vector<std::string> warnings;
};

template <class T>
EmbeddingCoverage load_pretrained_embeddings(std::istream& in, const Vocabulary& vocab, ModelParams<T>& params,
                                             const std::string& source = "vectors") {
  EmbeddingCoverage report;
  const auto dim = params.word_dim();
  std::unordered_map<int, std::size_t> seen_at;  // vocab id -> line
  std::string line, word;
  std::size_t lineno = 0;
  std::vector<double> values;
  while (std::getline(in, line)) {
    ++lineno;
    std::istringstream ls(line);
    if (!(ls >> word)) continue;
    values.clear();
    std::string tok;
    while (ls >> tok) {
      try {
        std::size_t used = 0;
        values.push_back(std::stod(tok, &used));
        if (used != tok.size()) throw std::invalid_argument(tok);
      } catch (const std::exception&) {
        throw Error(source + ":" + std::to_string(lineno) + ": invalid number '" + tok + "'");
      }
    }
    // word2vec text files may open with a "count dim" header line.
    if (lineno == 1 && values.size() == 1 && dim != 1 && word.find_first_not_of("0123456789") == std::string::npos) {
      continue;
    }
    if (static_cast<Eigen::Index>(values.size()) != dim) {
      throw Error(source + ":" + std::to_string(lineno) + ": vector has " + std::to_string(values.size()) +
                  " components, expected " + std::to_string(dim));
    }
    ++report.lines;
    if (!vocab.contains(word)) continue;
    const int id = vocab.lookup(word);
    if (id == Vocabulary::kPad || id == Vocabulary::kUnk) continue;
    if (auto it = seen_at.find(id); it != seen_at.end()) {
      ++report.duplicates;
      report.warnings.push_back(source + ":" + std::to_string(lineno) + ": '" + word +
                                "' repeats line " + std::to_string(it->second) + "; last occurrence wins");
      it->second = lineno;
    } else {
      seen_at.emplace(id, lineno);
    }
    for (Eigen::Index k = 0; k < dim; ++k) params.word_emb(id, k) = static_cast<T>(values[static_cast<std::size_t>(k)]);
  }
  report.found = seen_at.size();
  report.missing = vocab.size() - 2 - report.found;
  return report;
}

template <class T>
EmbeddingCoverage load_pretrained_embeddings(const std::filesystem::path& path, const Vocabulary& vocab,
                                             ModelParams<T>& params) {
  std::ifstream in(path);
  if (!in) throw Error("cannot read pretrained vectors " + path.string());
  return load_pretrained_embeddings(in, vocab, params, path.string());
}

}  // namespace tlre
