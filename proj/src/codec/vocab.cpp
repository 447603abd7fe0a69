#include "gridscale/codec/vocab.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "gridscale/error.hpp"
#include "gridscale/util/rng.hpp"

namespace gridscale::codec {

ByteTokenizer::ByteTokenizer(TokenId vocab_size) : vocab_size_(vocab_size) {
  if (vocab_size < 256) throw Error("vocabulary must hold at least the 256 byte ids");
}

std::vector<TokenId> ByteTokenizer::encode(std::string_view text) const {
  std::vector<TokenId> out;
  encode_into(text, out);
  return out;
}

void ByteTokenizer::encode_into(std::string_view text, std::vector<TokenId>& out) const {
  out.reserve(out.size() + text.size());
  for (unsigned char c : text) out.push_back(c);
}

VocabularyRemap::VocabularyRemap(std::vector<TokenId> ids, std::string provenance)
    : ids_(std::move(ids)), provenance_(std::move(provenance)) {
  for (std::size_t k = 0; k < ids_.size(); ++k) {
    if (!index_.emplace(ids_[k], static_cast<std::int32_t>(k)).second) {
      throw InvariantError("remap ids unique", "id " + std::to_string(ids_[k]) + " repeated");
    }
    if (ByteTokenizer::is_text(ids_[k])) {
      throw InvariantError("remap disjoint from text ids", "id " + std::to_string(ids_[k]));
    }
  }
}

std::int32_t VocabularyRemap::bin_of(TokenId id) const {
  auto it = index_.find(id);
  return it == index_.end() ? -1 : it->second;
}

util::Json VocabularyRemap::to_json() const {
  return {{"schema", "gridremap/1"}, {"bins", ids_.size()}, {"provenance", provenance_}, {"ids", ids_}};
}

VocabularyRemap VocabularyRemap::from_json(const util::Json& j) {
  auto ids = j.at("ids").get<std::vector<TokenId>>();
  if (j.at("bins").get<std::size_t>() != ids.size()) throw ParseError("remap: bins does not match ids", 0, 0);
  return VocabularyRemap(std::move(ids), j.at("provenance").get<std::string>());
}

VocabularyRemap build_remap(const FrequencyTable& counts, int bins, const std::unordered_set<TokenId>& excluded,
                            std::string provenance) {
  if (bins <= 0) throw Error("build_remap: bins must be positive");
  std::vector<TokenId> eligible;
  eligible.reserve(counts.size());
  for (std::size_t id = 0; id < counts.size(); ++id) {
    auto t = static_cast<TokenId>(id);
    if (!excluded.count(t) && !ByteTokenizer::is_text(t)) eligible.push_back(t);
  }
  if (eligible.size() < static_cast<std::size_t>(bins)) {
    throw Error("build_remap: only " + std::to_string(eligible.size()) + " eligible ids for " +
                std::to_string(bins) + " bins");
  }
  auto less = [&](TokenId a, TokenId b) {
    return counts[a] != counts[b] ? counts[a] < counts[b] : a < b;
  };
  auto mid = eligible.begin() + bins;
  std::partial_sort(eligible.begin(), mid, eligible.end(), less);
  eligible.resize(static_cast<std::size_t>(bins));
  return VocabularyRemap(std::move(eligible), std::move(provenance));
}

FrequencyTable synthetic_zipf_frequencies(TokenId vocab_size, std::uint64_t seed) {
  std::vector<TokenId> order(static_cast<std::size_t>(vocab_size - 256));
  std::iota(order.begin(), order.end(), 256);
  auto rng = util::make_rng(seed, {0x7a697066});
  util::shuffle(order, rng);
  FrequencyTable counts(static_cast<std::size_t>(vocab_size));
  auto count_at = [](std::size_t rank) {
    return static_cast<std::uint64_t>(std::floor(1e9 / std::pow(static_cast<double>(rank), 1.1)));
  };
  for (std::size_t b = 0; b < 256; ++b) counts[b] = count_at(b + 1);
  for (std::size_t r = 0; r < order.size(); ++r) counts[static_cast<std::size_t>(order[r])] = count_at(257 + r);
  return counts;
}

VocabularyRemap default_remap(int bins, const ByteTokenizer& tokenizer, std::uint64_t seed) {
  auto counts = synthetic_zipf_frequencies(tokenizer.vocab_size(), seed);
  return build_remap(counts, bins, {}, "synthetic-zipf(seed=" + std::to_string(seed) + ")");
}

}  // namespace gridscale::codec
