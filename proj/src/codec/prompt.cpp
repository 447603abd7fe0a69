#include "gridscale/codec/prompt.hpp"

#include <string_view>

#include "gridscale/error.hpp"

namespace gridscale::codec {

std::size_t TokenizedPrompt::float_token_count() const {
  std::size_t n = 0;
  for (const auto& g : groups) n += g.length;
  return n;
}

Codec::Codec(CodecConfig config, VocabularyRemap remap, ByteTokenizer tokenizer)
    : config_(config), remap_(std::move(remap)), tokenizer_(tokenizer) {
  config_.check();
  if (remap_.bins() != config_.bins) {
    throw Error("remap has " + std::to_string(remap_.bins()) + " ids but the codec uses " +
                std::to_string(config_.bins) + " bins");
  }
  for (TokenId id : remap_.ids()) {
    if (id >= tokenizer_.vocab_size()) throw Error("remap id " + std::to_string(id) + " outside the vocabulary");
  }
}

std::string fill_scalars(const std::string& text, const qa::QARecord& record) {
  std::string out;
  std::size_t pos = 0;
  for (;;) {
    auto open = text.find('{', pos);
    if (open == std::string::npos) break;
    auto close = text.find('}', open);
    if (close == std::string::npos) throw ParseError("unterminated slot in template", 1, open + 1);
    out.append(text, pos, open - pos);
    std::string slot = text.substr(open + 1, close - open - 1);
    auto it = record.scalars.find(slot);
    out += it != record.scalars.end() ? it->second : "{" + slot + "}";
    pos = close + 1;
  }
  out.append(text, pos);
  return out;
}

TokenizedPrompt Codec::encode_text(const std::string& text, const qa::QARecord& record,
                                   const std::vector<qa::FloatGroup>& groups) const {
  TokenizedPrompt p;
  std::size_t pos = 0;
  auto emit_text = [&](std::string_view s) { tokenizer_.encode_into(s, p.ids); };
  for (;;) {
    auto open = text.find('{', pos);
    if (open == std::string::npos) break;
    auto close = text.find('}', open);
    if (close == std::string::npos) throw ParseError("unterminated slot in template", 1, open + 1);
    emit_text(std::string_view(text).substr(pos, open - pos));
    std::string slot = text.substr(open + 1, close - open - 1);
    pos = close + 1;
    if (auto it = record.scalars.find(slot); it != record.scalars.end()) {
      emit_text(it->second);
      continue;
    }
    const qa::FloatGroup* group = nullptr;
    for (const auto& g : groups) {
      if (g.name == slot) group = &g;
    }
    if (!group) throw InvariantError("slot resolves to exactly one value", "{" + slot + "} in " + record.key());
    auto norm = record.norm_constants.find(slot);
    if (norm == record.norm_constants.end()) throw InvariantError("norm constants cover every group", slot);
    for (double v : group->values) {
      if (std::abs(v) > norm->second) {
        throw InvariantError("group within its norm constant", slot + " in " + record.key());
      }
    }
    auto bins = discretize_with(group->values, norm->second, config_);
    p.groups.push_back({slot, p.ids.size(), bins.size()});
    p.norm_constants[slot] = norm->second;
    for (auto k : bins) p.ids.push_back(remap_.token_of(k));
  }
  emit_text(std::string_view(text).substr(pos));
  return p;
}

EncodedRecord Codec::encode_record(const qa::QARecord& record) const {
  return {encode_text(record.question_text, record, record.float_groups),
          encode_text(record.answer_text, record, record.answer_float_groups)};
}

Codec::AnswerShape Codec::answer_shape(const qa::QARecord& record) {
  AnswerShape shape;
  for (const auto& g : record.answer_float_groups) {
    shape.names.push_back(g.name);
    shape.lengths.push_back(g.values.size());
    shape.norm_constants[g.name] = record.norm_constants.at(g.name);
  }
  return shape;
}

Codec::DecodedAnswer Codec::decode_answer(const std::vector<TokenId>& tokens, const AnswerShape& shape) const {
  DecodedAnswer out;
  std::size_t run = 0;
  std::size_t i = 0;
  while (i < tokens.size()) {
    TokenId id = tokens[i];
    if (ByteTokenizer::is_text(id)) {
      out.text.push_back(static_cast<char>(static_cast<unsigned char>(id)));
      ++i;
      continue;
    }
    if (!remap_.in_band(id)) {
      throw ParseError("token " + std::to_string(id) + " is neither text nor a float bin", 1, i + 1);
    }
    std::vector<std::int32_t> bins;
    std::size_t start = i;
    while (i < tokens.size() && remap_.in_band(tokens[i])) bins.push_back(remap_.bin_of(tokens[i++]));
    if (run >= shape.names.size()) {
      throw ParseError("unexpected float run (answer has " + std::to_string(shape.names.size()) + " groups)", 1,
                       start + 1);
    }
    const auto& name = shape.names[run];
    if (run < shape.lengths.size() && bins.size() != shape.lengths[run]) {
      throw ParseError("group " + name + " has " + std::to_string(bins.size()) + " values, expected " +
                           std::to_string(shape.lengths[run]),
                       1, start + 1);
    }
    out.groups.push_back({name, undiscretize(bins, shape.norm_constants.at(name), config_)});
    out.text += "{" + name + "}";
    ++run;
  }
  if (run != shape.names.size()) {
    throw ParseError("answer has " + std::to_string(run) + " float runs, expected " +
                         std::to_string(shape.names.size()),
                     1, tokens.size() + 1);
  }
  return out;
}

}  // namespace gridscale::codec
