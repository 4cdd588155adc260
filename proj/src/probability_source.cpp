#include "altc/probability_source.hpp"

#include <fcntl.h>
#include <spawn.h>
#include <sys/wait.h>
#include <unistd.h>

#include <cerrno>
#include <cmath>
#include <csignal>
#include <cstring>

#include "altc/error.hpp"
#include "json.hpp"

extern char** environ;

namespace altc {

void check_probabilities(const std::vector<double>& probs, std::size_t num_classes) {
  if (probs.size() != num_classes) {
    throw Error(ErrorCode::ProtocolError, "expected " + std::to_string(num_classes) +
                                              " probabilities, got " +
                                              std::to_string(probs.size()));
  }
  for (const double p : probs) {
    if (!(p >= 0.0 && p <= 1.0)) {
      throw Error(ErrorCode::ProtocolError, "probability outside [0, 1]");
    }
  }
}

std::vector<double> LinearModelSource::predict_proba(const Document& doc) {
  return altc::predict_proba(model_, featurizer_.featurize(doc.text));
}

ExternalProcessSource::ExternalProcessSource(std::vector<std::string> argv, std::size_t num_classes)
    : num_classes_(num_classes) {
  if (argv.empty()) throw Error(ErrorCode::InvalidArgument, "empty command for probability source");
  // A dead child must surface as EPIPE, not kill us.
  std::signal(SIGPIPE, SIG_IGN);

  int in_pipe[2];
  int out_pipe[2];
  if (pipe2(in_pipe, O_CLOEXEC) != 0) throw Error(ErrorCode::IoError, "pipe() failed");
  if (pipe2(out_pipe, O_CLOEXEC) != 0) {
    close(in_pipe[0]);
    close(in_pipe[1]);
    throw Error(ErrorCode::IoError, "pipe() failed");
  }

  posix_spawn_file_actions_t actions;
  posix_spawn_file_actions_init(&actions);
  posix_spawn_file_actions_adddup2(&actions, in_pipe[0], STDIN_FILENO);
  posix_spawn_file_actions_adddup2(&actions, out_pipe[1], STDOUT_FILENO);
  posix_spawn_file_actions_addclose(&actions, in_pipe[1]);
  posix_spawn_file_actions_addclose(&actions, out_pipe[0]);

  std::vector<char*> args;
  for (auto& a : argv) args.push_back(a.data());
  args.push_back(nullptr);

  pid_t pid = -1;
  const int rc = posix_spawnp(&pid, args[0], &actions, nullptr, args.data(), environ);
  posix_spawn_file_actions_destroy(&actions);
  close(in_pipe[0]);
  close(out_pipe[1]);
  if (rc != 0) {
    close(in_pipe[1]);
    close(out_pipe[0]);
    throw Error(ErrorCode::IoError, "cannot start '" + argv[0] + "': " + std::strerror(rc),
                argv[0]);
  }
  pid_ = pid;
  to_child_ = in_pipe[1];
  from_child_ = out_pipe[0];
}

ExternalProcessSource::~ExternalProcessSource() {
  if (to_child_ >= 0) close(to_child_);
  if (from_child_ >= 0) close(from_child_);
  if (pid_ > 0) {
    int status = 0;
    waitpid(pid_, &status, 0);
  }
}

std::string ExternalProcessSource::read_line() {
  while (true) {
    const auto nl = buffer_.find('\n');
    if (nl != std::string::npos) {
      std::string line = buffer_.substr(0, nl);
      buffer_.erase(0, nl + 1);
      return line;
    }
    char chunk[4096];
    const ssize_t n = read(from_child_, chunk, sizeof chunk);
    if (n < 0 && errno == EINTR) continue;
    if (n <= 0) throw Error(ErrorCode::ProtocolError, "probability source closed its output");
    buffer_.append(chunk, static_cast<std::size_t>(n));
  }
}

std::vector<double> ExternalProcessSource::predict_proba(const Document& doc) {
  nlohmann::ordered_json request;
  request["id"] = doc.id;
  request["text"] = doc.text;
  const std::string line = request.dump() + '\n';
  std::size_t written = 0;
  while (written < line.size()) {
    const ssize_t n = write(to_child_, line.data() + written, line.size() - written);
    if (n < 0 && errno == EINTR) continue;
    if (n <= 0) throw Error(ErrorCode::ProtocolError, "probability source closed its input");
    written += static_cast<std::size_t>(n);
  }

  std::vector<double> probs;
  try {
    const auto reply = nlohmann::json::parse(read_line());
    if (reply.at("id").get<std::string>() != doc.id) {
      throw Error(ErrorCode::ProtocolError, "reply id does not match request id '" + doc.id + "'",
                  doc.id);
    }
    probs = reply.at("probs").get<std::vector<double>>();
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::ProtocolError, std::string("bad reply from probability source: ") +
                                              e.what(),
                doc.id);
  }
  check_probabilities(probs, num_classes_);
  return probs;
}

}  // namespace altc
