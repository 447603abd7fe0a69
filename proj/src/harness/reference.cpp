#include "gridscale/harness/reference.hpp"

#include <cmath>

#include "gridscale/error.hpp"
#include "gridscale/qa/builder.hpp"
#include "gridscale/util/rng.hpp"

namespace gridscale::harness {

util::Json to_json(const AnswerKey& k) {
  util::Json groups = util::Json::array();
  for (const auto& g : k.groups) groups.push_back({{"name", g.name}, {"offset", g.offset}, {"length", g.length}});
  return {{"id", k.id}, {"answer_token_ids", k.answer_token_ids}, {"groups", groups}, {"norm_constants", k.norm_constants}};
}

AnswerKey answer_key_from_json(const util::Json& j) {
  AnswerKey k;
  k.id = j.at("id").get<std::string>();
  k.answer_token_ids = j.at("answer_token_ids").get<std::vector<codec::TokenId>>();
  for (const auto& g : j.at("groups")) {
    k.groups.push_back({g.at("name").get<std::string>(), g.at("offset").get<std::size_t>(),
                        g.at("length").get<std::size_t>()});
  }
  k.norm_constants = j.at("norm_constants").get<std::map<std::string, double>>();
  return k;
}

std::string_view to_string(ResponderMode mode) {
  switch (mode) {
    case ResponderMode::oracle: return "oracle";
    case ResponderMode::noisy_oracle: return "noisy_oracle";
    case ResponderMode::scaling_emulator: return "scaling_emulator";
  }
  return "?";
}

ResponderMode parse_responder_mode(std::string_view text) {
  if (text == "oracle") return ResponderMode::oracle;
  if (text == "noisy_oracle") return ResponderMode::noisy_oracle;
  if (text == "scaling_emulator") return ResponderMode::scaling_emulator;
  throw Error("unknown responder mode '" + std::string(text) + "'");
}

double ReferenceConfig::noise_sigma() const {
  switch (mode) {
    case ResponderMode::oracle: return 0.0;
    case ResponderMode::noisy_oracle: return sigma;
    case ResponderMode::scaling_emulator:
      if (!(train_size > 0)) throw Error("scaling emulator needs a positive training-set size");
      return std::sqrt(alpha * std::pow(train_size, k));
  }
  return 0.0;
}

namespace {

double reflect(double v, double m) {
  // Folding with period 4m keeps the result in [-m, m] for any excursion.
  const double period = 4.0 * m;
  double u = std::fmod(v + m, period);
  if (u < 0) u += period;
  return u <= 2.0 * m ? u - m : 3.0 * m - u;
}

}  // namespace

std::vector<codec::TokenId> reference_answer(const AnswerKey& key, const codec::VocabularyRemap& remap,
                                             const codec::CodecConfig& codec, const ReferenceConfig& config) {
  auto tokens = key.answer_token_ids;
  const double sigma = config.noise_sigma();
  if (sigma == 0.0) return tokens;
  for (std::size_t gi = 0; gi < key.groups.size(); ++gi) {
    const auto& g = key.groups[gi];
    const double m = key.norm_constants.at(g.name);
    if (m == 0.0) continue;
    if (g.offset + g.length > tokens.size()) throw Error("answer key " + key.id + ": group " + g.name + " out of range");
    auto rng = util::make_rng(qa::record_rank(config.seed, key.id), {gi});
    std::vector<std::int32_t> bins(g.length);
    for (std::size_t i = 0; i < g.length; ++i) {
      bins[i] = remap.bin_of(tokens[g.offset + i]);
      if (bins[i] < 0) throw Error("answer key " + key.id + ": token outside the float band in " + g.name);
    }
    auto values = codec::undiscretize(bins, m, codec);
    for (double& v : values) v = reflect(v + sigma * util::standard_normal(rng), m);
    auto noisy = codec::discretize_with(values, m, codec);
    for (std::size_t i = 0; i < g.length; ++i) tokens[g.offset + i] = remap.token_of(noisy[i]);
  }
  return tokens;
}

}  // namespace gridscale::harness
