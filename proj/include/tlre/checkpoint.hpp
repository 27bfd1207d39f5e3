#pragma once

// Checkpoint container:
//   8 bytes   magic "TLRECKPT"
//   u32 LE    format version
//   u64 LE    header length in bytes
//   header    UTF-8 JSON: dtype, config, vocabulary, heads (labels), tensors
//             (name, rows, cols) in data order
//   data      row-major little-endian values of every tensor, in header order

#include <array>
#include <bit>
#include <cstdint>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <map>
#include <string>
#include <type_traits>
#include <vector>

#include "json.hpp"
#include "tlre/config.hpp"
#include "tlre/corpus.hpp"
#include "tlre/params.hpp"

namespace tlre {

inline constexpr std::uint32_t kCheckpointVersion = 1;
inline constexpr std::array<char, 8> kCheckpointMagic{'T', 'L', 'R', 'E', 'C', 'K', 'P', 'T'};

template <class T>
struct Checkpoint {
  std::uint32_t version = kCheckpointVersion;
  TrainConfig config;
  Vocabulary vocab;
  std::map<std::string, LabelSet> head_labels;
  ModelParams<T> params;
};

namespace detail {

template <class U>
void put_le(std::ostream& out, U value) {
  static_assert(std::is_unsigned_v<U>);
  for (std::size_t i = 0; i < sizeof(U); ++i) out.put(static_cast<char>((value >> (8 * i)) & 0xFF));
}

template <class U>
U get_le(std::istream& in, const std::string& what) {
  U value = 0;
  for (std::size_t i = 0; i < sizeof(U); ++i) {
    const int c = in.get();
    if (c == std::char_traits<char>::eof()) throw Error("checkpoint truncated while reading " + what);
    value |= static_cast<U>(static_cast<unsigned char>(c)) << (8 * i);
  }
  return value;
}

template <class T>
using Bits = std::conditional_t<sizeof(T) == 4, std::uint32_t, std::uint64_t>;

template <class T>
const char* dtype_name() {
  return sizeof(T) == 4 ? "f32" : "f64";
}

inline nlohmann::json config_json(const TrainConfig& c) {
  return {{"word_dim", c.word_dim},         {"pos1_dim", c.pos1_dim},
          {"pos2_dim", c.pos2_dim},         {"hidden", c.hidden},
          {"batch_size", c.batch_size},     {"lr", c.lr},
          {"beta1", c.beta1},               {"beta2", c.beta2},
          {"adam_eps", c.adam_eps},         {"epochs", c.epochs},
          {"seed", c.seed},                 {"sample_prob", c.sample_prob},
          {"position_clip", c.position_clip},
          {"precision", c.precision == Precision::Single ? "single" : "double"},
          {"dev_fraction", c.dev_fraction},
          {"averaging", c.averaging == Averaging::Micro ? "micro" : "macro"}};
}

inline TrainConfig config_from_json(const nlohmann::json& j) {
  TrainConfig c;
  c.word_dim = j.at("word_dim");
  c.pos1_dim = j.at("pos1_dim");
  c.pos2_dim = j.at("pos2_dim");
  c.hidden = j.at("hidden");
  c.batch_size = j.at("batch_size");
  c.lr = j.at("lr");
  c.beta1 = j.at("beta1");
  c.beta2 = j.at("beta2");
  c.adam_eps = j.at("adam_eps");
  c.epochs = j.at("epochs");
  c.seed = j.at("seed");
  c.sample_prob = j.at("sample_prob");
  c.position_clip = j.at("position_clip");
  c.precision = j.at("precision") == "double" ? Precision::Double : Precision::Single;
  c.dev_fraction = j.at("dev_fraction");
  c.averaging = j.at("averaging") == "macro" ? Averaging::Macro : Averaging::Micro;
  return c;
}

}  // namespace detail

template <class T>
void save_checkpoint(const ModelParams<T>& params, const Vocabulary& vocab, const TrainConfig& cfg,
                     const std::map<std::string, LabelSet>& head_labels, std::ostream& out) {
  nlohmann::json header;
  header["dtype"] = detail::dtype_name<T>();
  header["config"] = detail::config_json(cfg);
  header["vocab"] = vocab.tokens();
  header["heads"] = nlohmann::json::object();
  for (const auto& [name, head] : params.heads) {
    auto it = head_labels.find(name);
    if (it == head_labels.end()) throw Error("save_checkpoint: no label set for head '" + name + "'");
    if (static_cast<Eigen::Index>(it->second.size()) != head.labels()) {
      throw Error("save_checkpoint: head '" + name + "' size does not match its label set");
    }
    header["heads"][name] = {{"labels", it->second.names()}, {"negative", it->second.negative()}};
  }
  const auto tensors = named_tensors(params);
  header["tensors"] = nlohmann::json::array();
  for (const auto& nt : tensors) {
    header["tensors"].push_back({{"name", nt.name}, {"rows", nt.tensor->rows()}, {"cols", nt.tensor->cols()}});
  }
  const std::string text = header.dump();
  out.write(kCheckpointMagic.data(), kCheckpointMagic.size());
  detail::put_le<std::uint32_t>(out, kCheckpointVersion);
  detail::put_le<std::uint64_t>(out, text.size());
  out.write(text.data(), static_cast<std::streamsize>(text.size()));
  for (const auto& nt : tensors) {
    const auto& t = *nt.tensor;
    for (Eigen::Index i = 0; i < t.size(); ++i) detail::put_le(out, std::bit_cast<detail::Bits<T>>(t.data()[i]));
  }
  if (!out) throw Error("save_checkpoint: write failed");
}

template <class T>
void save_checkpoint(const ModelParams<T>& params, const Vocabulary& vocab, const TrainConfig& cfg,
                     const std::map<std::string, LabelSet>& head_labels, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write checkpoint " + path.string());
  save_checkpoint(params, vocab, cfg, head_labels, out);
}

/// Reads a checkpoint. Stored values are converted to T when the file's dtype
/// differs.
template <class T>
Checkpoint<T> load_checkpoint(std::istream& in) {
  std::array<char, 8> magic{};
  in.read(magic.data(), magic.size());
  if (in.gcount() != static_cast<std::streamsize>(magic.size())) throw Error("checkpoint truncated while reading magic");
  if (magic != kCheckpointMagic) throw Error("not a checkpoint file (bad magic)");
  Checkpoint<T> ck;
  ck.version = detail::get_le<std::uint32_t>(in, "version");
  if (ck.version != kCheckpointVersion) {
    throw Error("checkpoint version " + std::to_string(ck.version) + " is not supported (expected " +
                std::to_string(kCheckpointVersion) + ")");
  }
  const auto header_len = detail::get_le<std::uint64_t>(in, "header length");
  std::string text(header_len, '\0');
  in.read(text.data(), static_cast<std::streamsize>(header_len));
  if (static_cast<std::uint64_t>(in.gcount()) != header_len) throw Error("checkpoint truncated while reading header");
  nlohmann::json header;
  try {
    header = nlohmann::json::parse(text);
  } catch (const std::exception& e) {
    throw Error(std::string("checkpoint header is not valid JSON: ") + e.what());
  }
  const std::string dtype = header.at("dtype");
  if (dtype != "f32" && dtype != "f64") throw Error("checkpoint dtype '" + dtype + "' is not supported");
  ck.config = detail::config_from_json(header.at("config"));
  ck.vocab = Vocabulary::from_tokens(header.at("vocab").get<std::vector<std::string>>());
  for (const auto& [name, h] : header.at("heads").items()) {
    ck.head_labels.emplace(name, LabelSet(h.at("labels").template get<std::vector<std::string>>(), h.at("negative").template get<std::size_t>()));
  }

  std::map<std::string, Tensor<T>> loaded;
  for (const auto& entry : header.at("tensors")) {
    const std::string name = entry.at("name");
    const Eigen::Index rows = entry.at("rows"), cols = entry.at("cols");
    Tensor<T> t(rows, cols);
    for (Eigen::Index i = 0; i < t.size(); ++i) {
      if (dtype == "f32") {
        t.data()[i] = static_cast<T>(std::bit_cast<float>(detail::get_le<std::uint32_t>(in, "tensor " + name)));
      } else {
        t.data()[i] = static_cast<T>(std::bit_cast<double>(detail::get_le<std::uint64_t>(in, "tensor " + name)));
      }
    }
    loaded.emplace(name, std::move(t));
  }
  auto take = [&](const std::string& name) {
    auto it = loaded.find(name);
    if (it == loaded.end()) throw Error("checkpoint is missing tensor " + name);
    return std::move(it->second);
  };
  ck.params.word_emb = take("emb.word");
  ck.params.pos1_emb = take("emb.pos1");
  ck.params.pos2_emb = take("emb.pos2");
  ck.params.encoder.fwd = {take("enc.fwd.W"), take("enc.fwd.U"), take("enc.fwd.b")};
  ck.params.encoder.bwd = {take("enc.bwd.W"), take("enc.bwd.U"), take("enc.bwd.b")};
  for (const auto& [name, labels] : ck.head_labels) {
    ck.params.heads[name] = {take("head." + name + ".W"), take("head." + name + ".b")};
  }
  ck.params.encoder.fwd.check();
  ck.params.encoder.bwd.check();
  if (ck.params.word_emb.rows() != static_cast<Eigen::Index>(ck.vocab.size())) {
    throw Error("checkpoint word embedding rows do not match the vocabulary");
  }
  return ck;
}

template <class T>
Checkpoint<T> load_checkpoint(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open checkpoint " + path.string());
  return load_checkpoint<T>(in);
}

}  // namespace tlre
