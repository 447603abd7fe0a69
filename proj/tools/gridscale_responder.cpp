// Reference responder: answers protocol requests from an answer-key file,
// optionally corrupting float groups to emulate an imperfect model.

#include <iostream>
#include <string>
#include <unordered_map>

#include <CLI11.hpp>

#include "gridscale/error.hpp"
#include "gridscale/harness/reference.hpp"
#include "gridscale/harness/responder.hpp"
#include "gridscale/util/rng.hpp"

using namespace gridscale;

int main(int argc, char** argv) {
  CLI::App app{"gridscale reference responder"};
  std::string mode = "oracle", answers_path, remap_path;
  harness::ReferenceConfig cfg;
  bool shuffle = false;
  app.add_option("--mode", mode, "oracle, noisy_oracle or scaling_emulator");
  app.add_option("--answers", answers_path, "answer-key JSONL")->required();
  app.add_option("--remap", remap_path, "vocabulary remap JSON")->required();
  app.add_option("--sigma", cfg.sigma, "noisy_oracle standard deviation, physical units");
  app.add_option("--alpha", cfg.alpha, "scaling_emulator coefficient");
  app.add_option("--k", cfg.k, "scaling_emulator exponent");
  app.add_option("--train-size", cfg.train_size, "training-set size N");
  app.add_option("--seed", cfg.seed);
  app.add_flag("--shuffle", shuffle, "answer after stdin closes, in a seeded random order");
  CLI11_PARSE(app, argc, argv);

  try {
    cfg.mode = harness::parse_responder_mode(mode);
    cfg.noise_sigma();
    auto remap = codec::VocabularyRemap::from_json(util::read_json(remap_path));
    codec::CodecConfig codec{remap.bins()};
    std::unordered_map<std::string, harness::AnswerKey> keys;
    for (const auto& j : util::read_jsonl(answers_path)) {
      auto k = harness::answer_key_from_json(j);
      keys.emplace(k.id, std::move(k));
    }

    std::vector<std::string> pending;
    std::string line;
    while (std::getline(std::cin, line)) {
      if (line.empty()) continue;
      auto req = harness::request_from_json(util::Json::parse(line));
      harness::ResponderResponse resp{req.id, {}};
      auto it = keys.find(req.id);
      if (it == keys.end()) {
        std::cerr << "gridscale-responder: no answer key for " << req.id << "\n";
      } else {
        resp.answer_token_ids = harness::reference_answer(it->second, remap, codec, cfg);
      }
      auto out = harness::to_json(resp).dump();
      if (shuffle) {
        pending.push_back(std::move(out));
      } else {
        std::cout << out << '\n' << std::flush;
      }
    }
    if (shuffle) {
      auto rng = util::make_rng(cfg.seed, {0x5u});
      util::shuffle(pending, rng);
      for (const auto& out : pending) std::cout << out << '\n';
      std::cout.flush();
    }
  } catch (const std::exception& e) {
    std::cerr << "gridscale-responder: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
