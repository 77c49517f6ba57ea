#include <fcntl.h>
#include <poll.h>
#include <signal.h>
#include <sys/wait.h>
#include <unistd.h>

#include <cerrno>
#include <cstring>

#include "ftd/embed.hpp"
#include "json.hpp"

namespace ftd::embed {

using nlohmann::json;

struct ServiceProvider::Process {
  pid_t pid = -1;
  int to_child = -1;
  int from_child = -1;
  std::string buffer;

  ~Process() { stop(); }

  void stop() {
    if (to_child >= 0) ::close(to_child);
    if (from_child >= 0) ::close(from_child);
    to_child = from_child = -1;
    if (pid > 0) {
      ::kill(-pid, SIGKILL);
      int status = 0;
      ::waitpid(pid, &status, 0);
      pid = -1;
    }
  }

  static std::unique_ptr<Process> start(const std::string& command) {
    int in_pipe[2];
    int out_pipe[2];
    if (::pipe(in_pipe) != 0) throw std::runtime_error(std::strerror(errno));
    if (::pipe(out_pipe) != 0) {
      ::close(in_pipe[0]);
      ::close(in_pipe[1]);
      throw std::runtime_error(std::strerror(errno));
    }
    const pid_t pid = ::fork();
    if (pid < 0) throw std::runtime_error(std::strerror(errno));
    if (pid == 0) {
      ::setpgid(0, 0);
      ::dup2(in_pipe[0], STDIN_FILENO);
      ::dup2(out_pipe[1], STDOUT_FILENO);
      ::close(in_pipe[0]);
      ::close(in_pipe[1]);
      ::close(out_pipe[0]);
      ::close(out_pipe[1]);
      ::execl("/bin/sh", "sh", "-c", command.c_str(), static_cast<char*>(nullptr));
      ::_exit(127);
    }
    ::setpgid(pid, pid);
    ::close(in_pipe[0]);
    ::close(out_pipe[1]);
    auto p = std::make_unique<Process>();
    p->pid = pid;
    p->to_child = in_pipe[1];
    p->from_child = out_pipe[0];
    ::fcntl(p->to_child, F_SETFD, FD_CLOEXEC);
    ::fcntl(p->from_child, F_SETFD, FD_CLOEXEC);
    return p;
  }

  void write_all(const std::string& data) {
    std::size_t off = 0;
    while (off < data.size()) {
      const ssize_t n = ::write(to_child, data.data() + off, data.size() - off);
      if (n < 0) {
        if (errno == EINTR) continue;
        throw std::runtime_error(std::string("write to service failed: ") + std::strerror(errno));
      }
      off += static_cast<std::size_t>(n);
    }
  }

  std::string read_line(std::chrono::milliseconds timeout) {
    const auto deadline = std::chrono::steady_clock::now() + timeout;
    for (;;) {
      if (auto nl = buffer.find('\n'); nl != std::string::npos) {
        std::string line = buffer.substr(0, nl);
        buffer.erase(0, nl + 1);
        return line;
      }
      const auto left = std::chrono::duration_cast<std::chrono::milliseconds>(
          deadline - std::chrono::steady_clock::now());
      if (left.count() <= 0) throw std::runtime_error("service timed out");
      pollfd pfd{from_child, POLLIN, 0};
      const int rc = ::poll(&pfd, 1, static_cast<int>(left.count()));
      if (rc < 0) {
        if (errno == EINTR) continue;
        throw std::runtime_error(std::strerror(errno));
      }
      if (rc == 0) throw std::runtime_error("service timed out");
      char chunk[65536];
      const ssize_t n = ::read(from_child, chunk, sizeof chunk);
      if (n < 0) {
        if (errno == EINTR) continue;
        throw std::runtime_error(std::strerror(errno));
      }
      if (n == 0) throw std::runtime_error("service closed its output");
      buffer.append(chunk, static_cast<std::size_t>(n));
    }
  }
};

ServiceProvider::ServiceProvider(ServiceConfig config) : config_(std::move(config)) {
  if (config_.command.empty())
    throw EmbeddingError(EmbeddingError::Kind::unavailable, "no embedding service command configured");
  // A dead child must surface as a write error, not kill the process.
  ::signal(SIGPIPE, SIG_IGN);
  const std::string probe = "dimension probe";
  std::lock_guard lock(mutex_);
  auto vectors = exchange(std::span<const std::string>(&probe, 1));
  dim_ = vectors.front().size();
  if (dim_ == 0)
    throw EmbeddingError(EmbeddingError::Kind::invalid_output, "service returned an empty vector");
}

ServiceProvider::~ServiceProvider() = default;

std::vector<EmbeddingVector> ServiceProvider::exchange(std::span<const std::string> texts) const {
  const std::string request = json{{"texts", texts}}.dump() + "\n";
  std::string last_error;
  for (int attempt = 0; attempt <= config_.retries; ++attempt) {
    try {
      if (!process_) process_ = Process::start(config_.command);
      process_->write_all(request);
      const std::string line = process_->read_line(config_.timeout);
      const json response = json::parse(line);
      if (!response.contains("vectors") || !response["vectors"].is_array())
        throw std::runtime_error("response lacks 'vectors'");
      auto vectors = response["vectors"].get<std::vector<EmbeddingVector>>();
      if (vectors.size() != texts.size())
        throw std::runtime_error("response has " + std::to_string(vectors.size()) +
                                 " vectors for " + std::to_string(texts.size()) + " texts");
      for (const auto& v : vectors) {
        if (dim_ != 0 && v.size() != dim_) {
          throw EmbeddingError(EmbeddingError::Kind::dimension_mismatch,
                               "service returned dimension " + std::to_string(v.size()) +
                                   ", expected " + std::to_string(dim_));
        }
      }
      return vectors;
    } catch (const EmbeddingError&) {
      throw;
    } catch (const std::exception& e) {
      last_error = e.what();
      process_.reset();
    }
  }
  throw EmbeddingError(EmbeddingError::Kind::unavailable,
                       "embedding service '" + config_.command + "' unavailable after " +
                           std::to_string(config_.retries + 1) + " attempts: " + last_error);
}

std::vector<EmbeddingVector> ServiceProvider::embed(std::span<const std::string> texts) const {
  std::vector<EmbeddingVector> out;
  out.reserve(texts.size());
  std::lock_guard lock(mutex_);
  const std::size_t batch = std::max<std::size_t>(1, config_.batch_size);
  for (std::size_t i = 0; i < texts.size(); i += batch) {
    auto part = exchange(texts.subspan(i, std::min(batch, texts.size() - i)));
    for (auto& v : part) out.push_back(std::move(v));
  }
  return out;
}

}  // namespace ftd::embed
