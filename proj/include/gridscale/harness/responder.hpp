#pragma once

#include <map>
#include <string>
#include <vector>

#include "gridscale/codec/vocab.hpp"
#include "gridscale/error.hpp"
#include "gridscale/qa/record.hpp"
#include "gridscale/util/jsonl.hpp"

namespace gridscale::harness {

using codec::TokenId;

/// One line on the responder's stdin.
struct ResponderRequest {
  std::string id;
  qa::Task task = qa::Task::opf;
  std::vector<TokenId> prompt_token_ids;
  std::map<std::string, double> norm_constants;  ///< question and answer groups
};

/// One line on the responder's stdout.
struct ResponderResponse {
  std::string id;
  std::vector<TokenId> answer_token_ids;
};

util::Json to_json(const ResponderRequest& r);
ResponderRequest request_from_json(const util::Json& j);
util::Json to_json(const ResponderResponse& r);
ResponderResponse response_from_json(const util::Json& j);

enum class AnswerStatus { answered, timed_out };

struct ResponderAnswer {
  std::string id;
  AnswerStatus status = AnswerStatus::timed_out;
  std::vector<TokenId> answer_token_ids;
};

struct SessionOptions {
  double timeout_s = 60;  ///< longest wait for the next response
};

/// The responder exited before answering everything.
class ResponderCrash : public Error {
 public:
  ResponderCrash(const std::string& what, std::vector<std::string> unanswered)
      : Error(what), unanswered_(std::move(unanswered)) {}
  const std::vector<std::string>& unanswered() const { return unanswered_; }

 private:
  std::vector<std::string> unanswered_;
};

/// Runs `command` under /bin/sh, writes every request as one JSON line, then
/// closes its stdin. Responses are matched by id in any order; unknown or
/// repeated ids and malformed lines are logged and dropped. If no response
/// arrives for `timeout_s`, the process is killed and the rest are marked
/// timed out. Results come back in request order. Throws Error on duplicate
/// request ids and ResponderCrash if the process exits early.
std::vector<ResponderAnswer> query_responder(const std::string& command, const std::vector<ResponderRequest>& requests,
                                             const SessionOptions& options = {});

/// Replaces each `{name}` for the names in `values`; other braces are kept.
std::string expand_command(const std::string& command, const std::map<std::string, std::string>& values);

}  // namespace gridscale::harness
