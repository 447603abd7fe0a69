#pragma once

#include <cstddef>
#include <map>
#include <string>
#include <vector>

#include "gridscale/codec/codec.hpp"
#include "gridscale/codec/vocab.hpp"
#include "gridscale/qa/record.hpp"

namespace gridscale::codec {

struct GroupSpan {
  std::string name;
  std::size_t offset = 0;  ///< first float token
  std::size_t length = 0;

  bool operator==(const GroupSpan&) const = default;
};

struct TokenizedPrompt {
  std::vector<TokenId> ids;
  std::vector<GroupSpan> groups;
  std::map<std::string, double> norm_constants;

  std::size_t float_token_count() const;
};

struct EncodedRecord {
  TokenizedPrompt question;
  TokenizedPrompt answer;
};

class Codec {
 public:
  Codec(CodecConfig config, VocabularyRemap remap, ByteTokenizer tokenizer = ByteTokenizer{});

  const CodecConfig& config() const { return config_; }
  const VocabularyRemap& remap() const { return remap_; }
  const ByteTokenizer& tokenizer() const { return tokenizer_; }

  /// Tokenizes both texts. Float groups are discretized against the record's
  /// norm constants; scalars are written as text.
  EncodedRecord encode_record(const qa::QARecord& record) const;

  /// Tokens for one text with the given groups substituted.
  TokenizedPrompt encode_text(const std::string& text, const qa::QARecord& record,
                              const std::vector<qa::FloatGroup>& groups) const;

  struct AnswerShape {
    std::vector<std::string> names;    ///< answer groups in slot order
    std::vector<std::size_t> lengths;  ///< expected element counts
    std::map<std::string, double> norm_constants;
  };

  struct DecodedAnswer {
    std::string text;  ///< float runs replaced by "{name}"
    std::vector<qa::FloatGroup> groups;
  };

  /// Inverse of the answer half of encode_record. Throws ParseError (column =
  /// token index + 1) on ids outside both the text range and the float band,
  /// or when the float runs do not match the expected shape.
  DecodedAnswer decode_answer(const std::vector<TokenId>& tokens, const AnswerShape& shape) const;

  static AnswerShape answer_shape(const qa::QARecord& record);

 private:
  CodecConfig config_;
  VocabularyRemap remap_;
  ByteTokenizer tokenizer_;
};

/// Text with scalar slots filled and group slots left as "{name}".
std::string fill_scalars(const std::string& text, const qa::QARecord& record);

}  // namespace gridscale::codec
