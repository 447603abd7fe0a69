#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include "gridscale/util/jsonl.hpp"

namespace gridscale::codec {

using TokenId = std::int32_t;

/// Stand-in host tokenizer: UTF-8 bytes map to ids 0..255; the remaining ids
/// up to vocab_size exist but no text produces them.
class ByteTokenizer {
 public:
  explicit ByteTokenizer(TokenId vocab_size = 128256);

  TokenId vocab_size() const { return vocab_size_; }
  std::vector<TokenId> encode(std::string_view text) const;
  void encode_into(std::string_view text, std::vector<TokenId>& out) const;
  static bool is_text(TokenId id) { return id >= 0 && id < 256; }

 private:
  TokenId vocab_size_;
};

/// Float bin k <-> host token ids[k].
class VocabularyRemap {
 public:
  VocabularyRemap() = default;
  VocabularyRemap(std::vector<TokenId> ids, std::string provenance);

  const std::vector<TokenId>& ids() const { return ids_; }
  const std::string& provenance() const { return provenance_; }
  int bins() const { return static_cast<int>(ids_.size()); }

  TokenId token_of(std::int32_t bin) const { return ids_.at(static_cast<std::size_t>(bin)); }
  /// Bin of a float token, -1 when the id is outside the band.
  std::int32_t bin_of(TokenId id) const;
  bool in_band(TokenId id) const { return bin_of(id) >= 0; }

  util::Json to_json() const;
  static VocabularyRemap from_json(const util::Json& j);

  bool operator==(const VocabularyRemap& o) const { return ids_ == o.ids_ && provenance_ == o.provenance_; }

 private:
  std::vector<TokenId> ids_;
  std::string provenance_;
  std::unordered_map<TokenId, std::int32_t> index_;
};

/// counts[id] = usage count of token id.
using FrequencyTable = std::vector<std::uint64_t>;

/// The B least frequent ids outside `excluded`, ties broken by ascending id,
/// ordered by (count, id). Throws if fewer than B ids are eligible.
VocabularyRemap build_remap(const FrequencyTable& counts, int bins, const std::unordered_set<TokenId>& excluded,
                            std::string provenance = "custom");

/// Seeded Zipf-like usage counts for a vocabulary: count = floor(1e9 / r^1.1)
/// where r is a seeded random rank. Byte ids get the top ranks.
FrequencyTable synthetic_zipf_frequencies(TokenId vocab_size, std::uint64_t seed);

/// Default remap for the byte tokenizer: Zipf table, byte ids excluded.
VocabularyRemap default_remap(int bins, const ByteTokenizer& tokenizer = ByteTokenizer{}, std::uint64_t seed = 0);

}  // namespace gridscale::codec
