#include "gridscale/harness/responder.hpp"

#include <fcntl.h>
#include <poll.h>
#include <signal.h>
#include <sys/socket.h>
#include <sys/wait.h>
#include <unistd.h>

#include <cerrno>
#include <chrono>
#include <cstring>
#include <thread>
#include <unordered_map>

#include "gridscale/util/log.hpp"

namespace gridscale::harness {

util::Json to_json(const ResponderRequest& r) {
  return {{"id", r.id},
          {"task", qa::to_string(r.task)},
          {"prompt_token_ids", r.prompt_token_ids},
          {"norm_constants", r.norm_constants}};
}

ResponderRequest request_from_json(const util::Json& j) {
  ResponderRequest r;
  r.id = j.at("id").get<std::string>();
  r.task = qa::parse_task(j.at("task").get<std::string>());
  r.prompt_token_ids = j.at("prompt_token_ids").get<std::vector<TokenId>>();
  r.norm_constants = j.at("norm_constants").get<std::map<std::string, double>>();
  return r;
}

util::Json to_json(const ResponderResponse& r) { return {{"id", r.id}, {"answer_token_ids", r.answer_token_ids}}; }

ResponderResponse response_from_json(const util::Json& j) {
  return {j.at("id").get<std::string>(), j.at("answer_token_ids").get<std::vector<TokenId>>()};
}

std::string expand_command(const std::string& command, const std::map<std::string, std::string>& values) {
  std::string out;
  std::size_t pos = 0;
  while (pos < command.size()) {
    auto open = command.find('{', pos);
    if (open == std::string::npos) break;
    auto close = command.find('}', open);
    if (close == std::string::npos) break;
    out.append(command, pos, open - pos);
    auto it = values.find(command.substr(open + 1, close - open - 1));
    if (it != values.end()) {
      out += it->second;
    } else {
      out.append(command, open, close - open + 1);
    }
    pos = close + 1;
  }
  out.append(command, std::min(pos, command.size()));
  return out;
}

namespace {

struct Child {
  pid_t pid = -1;
  int in = -1;   // our end of the child's stdin (socket)
  int out = -1;  // read end of the child's stdout
};

Child spawn(const std::string& command) {
  int sock[2];
  int pipe_out[2];
  if (socketpair(AF_UNIX, SOCK_STREAM | SOCK_CLOEXEC, 0, sock) != 0) throw Error("socketpair failed");
  if (pipe2(pipe_out, O_CLOEXEC) != 0) {
    close(sock[0]);
    close(sock[1]);
    throw Error("pipe failed");
  }
  pid_t pid = fork();
  if (pid < 0) throw Error("fork failed: " + std::string(std::strerror(errno)));
  if (pid == 0) {
    // Own process group, so a kill also reaches whatever the shell started.
    setpgid(0, 0);
    dup2(sock[1], STDIN_FILENO);
    dup2(pipe_out[1], STDOUT_FILENO);
    // Restore default SIGPIPE in case the parent ignores it.
    signal(SIGPIPE, SIG_DFL);
    execl("/bin/sh", "sh", "-c", command.c_str(), static_cast<char*>(nullptr));
    _exit(127);
  }
  setpgid(pid, pid);
  close(sock[1]);
  close(pipe_out[1]);
  return {pid, sock[0], pipe_out[0]};
}

// Writes everything or stops at the first error (the child went away).
void write_all(int fd, const std::string& data) {
  std::size_t done = 0;
  while (done < data.size()) {
    ssize_t n = send(fd, data.data() + done, data.size() - done, MSG_NOSIGNAL);
    if (n < 0) {
      if (errno == EINTR) continue;
      return;
    }
    done += static_cast<std::size_t>(n);
  }
}

std::string describe_status(int status) {
  if (WIFEXITED(status)) return "exit status " + std::to_string(WEXITSTATUS(status));
  if (WIFSIGNALED(status)) return "signal " + std::to_string(WTERMSIG(status));
  return "status " + std::to_string(status);
}

}  // namespace

std::vector<ResponderAnswer> query_responder(const std::string& command, const std::vector<ResponderRequest>& requests,
                                             const SessionOptions& options) {
  std::unordered_map<std::string, std::size_t> index;
  std::vector<ResponderAnswer> answers(requests.size());
  for (std::size_t i = 0; i < requests.size(); ++i) {
    if (!index.emplace(requests[i].id, i).second) throw Error("duplicate request id " + requests[i].id);
    answers[i].id = requests[i].id;
  }
  if (requests.empty()) return answers;

  std::string payload;
  for (const auto& r : requests) payload += to_json(r).dump() + "\n";

  Child child = spawn(command);
  std::thread writer([&] {
    write_all(child.in, payload);
    close(child.in);
  });

  auto log = util::logger();
  std::size_t pending = requests.size();
  std::string buffer;
  bool eof = false;
  bool timed_out = false;
  const auto idle = std::chrono::duration<double>(options.timeout_s);
  auto deadline = std::chrono::steady_clock::now() + idle;

  auto handle_line = [&](const std::string& line) {
    if (line.empty()) return;
    ResponderResponse resp;
    try {
      resp = response_from_json(util::Json::parse(line));
    } catch (const std::exception& e) {
      log->warn("responder: malformed line dropped: {}", e.what());
      return;
    }
    auto it = index.find(resp.id);
    if (it == index.end()) {
      log->warn("responder: unknown id {}", resp.id);
      return;
    }
    auto& a = answers[it->second];
    if (a.status == AnswerStatus::answered) {
      log->warn("responder: repeated id {}", resp.id);
      return;
    }
    a.status = AnswerStatus::answered;
    a.answer_token_ids = std::move(resp.answer_token_ids);
    --pending;
    deadline = std::chrono::steady_clock::now() + idle;
  };

  char chunk[65536];
  while (pending > 0 && !eof) {
    auto left = std::chrono::duration_cast<std::chrono::milliseconds>(deadline - std::chrono::steady_clock::now());
    if (left.count() <= 0) {
      timed_out = true;
      break;
    }
    pollfd p{child.out, POLLIN, 0};
    int ready = poll(&p, 1, static_cast<int>(std::min<long long>(left.count(), 1000)));
    if (ready < 0 && errno != EINTR) throw Error("poll failed: " + std::string(std::strerror(errno)));
    if (ready <= 0) continue;
    ssize_t n = read(child.out, chunk, sizeof(chunk));
    if (n < 0) {
      if (errno == EINTR) continue;
      eof = true;
      break;
    }
    if (n == 0) {
      eof = true;
      break;
    }
    buffer.append(chunk, static_cast<std::size_t>(n));
    std::size_t start = 0;
    for (auto nl = buffer.find('\n'); nl != std::string::npos; nl = buffer.find('\n', start)) {
      handle_line(buffer.substr(start, nl - start));
      start = nl + 1;
    }
    buffer.erase(0, start);
  }
  if (eof && !buffer.empty()) handle_line(buffer);

  int status = 0;
  bool reaped = false;
  if (!timed_out) {
    // Give the process a moment to exit on its own.
    for (int i = 0; i < 50 && !reaped; ++i) {
      reaped = waitpid(child.pid, &status, WNOHANG) == child.pid;
      if (!reaped) std::this_thread::sleep_for(std::chrono::milliseconds(20));
    }
  }
  kill(-child.pid, SIGKILL);
  if (!reaped) waitpid(child.pid, &status, 0);
  writer.join();
  close(child.out);

  std::vector<std::string> missing;
  for (const auto& a : answers) {
    if (a.status != AnswerStatus::answered) missing.push_back(a.id);
  }
  if (!missing.empty() && !timed_out) {
    std::string list;
    for (std::size_t i = 0; i < missing.size() && i < 20; ++i) list += (i ? ", " : "") + missing[i];
    if (missing.size() > 20) list += ", ...";
    throw ResponderCrash("responder exited (" + describe_status(status) + ") with " +
                             std::to_string(missing.size()) + " unanswered request(s): " + list,
                         missing);
  }
  if (timed_out) log->warn("responder: {} request(s) timed out", missing.size());
  return answers;
}

}  // namespace gridscale::harness
