#pragma once

#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "gridscale/codec/prompt.hpp"
#include "gridscale/util/jsonl.hpp"

namespace gridscale::harness {

/// Ground truth the reference responder answers from: the encoded answer of
/// one record, keyed by request id.
struct AnswerKey {
  std::string id;
  std::vector<codec::TokenId> answer_token_ids;
  std::vector<codec::GroupSpan> groups;
  std::map<std::string, double> norm_constants;
};

util::Json to_json(const AnswerKey& k);
AnswerKey answer_key_from_json(const util::Json& j);

enum class ResponderMode { oracle, noisy_oracle, scaling_emulator };

std::string_view to_string(ResponderMode mode);
ResponderMode parse_responder_mode(std::string_view text);

/// Emulated model. Noise is added to float groups in physical units and
/// reflected back into [-m, m] before re-binning; text tokens are untouched.
///  - noisy_oracle: standard deviation `sigma`.
///  - scaling_emulator: standard deviation sqrt(alpha * train_size^k), so the
///    expected squared error follows alpha * N^k plus the codec's own term.
struct ReferenceConfig {
  ResponderMode mode = ResponderMode::oracle;
  double sigma = 0.05;
  double alpha = 1e-3;
  double k = -0.4;
  double train_size = 1;
  std::uint64_t seed = 0;

  double noise_sigma() const;
};

/// Answer tokens for one request. The noise stream depends only on (seed, id),
/// so answers do not depend on request order.
std::vector<codec::TokenId> reference_answer(const AnswerKey& key, const codec::VocabularyRemap& remap,
                                             const codec::CodecConfig& codec, const ReferenceConfig& config);

}  // namespace gridscale::harness
