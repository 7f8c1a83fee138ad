#include "shapsrc/external_oracle.hpp"

#include <fcntl.h>
#include <poll.h>
#include <signal.h>
#include <sys/wait.h>
#include <unistd.h>

#include <cmath>
#include <cstring>

#include <json.hpp>

namespace shapsrc {

namespace {

using nlohmann::json;

[[noreturn]] void child_exec(const std::string& command, int in_fd, int out_fd) {
    ::dup2(in_fd, STDIN_FILENO);
    ::dup2(out_fd, STDOUT_FILENO);
    ::close(in_fd);
    ::close(out_fd);
    ::execl("/bin/sh", "sh", "-c", command.c_str(), static_cast<char*>(nullptr));
    ::_exit(127);
}

}  // namespace

ExternalOracle::ExternalOracle(const std::string& command,
                               std::vector<std::string> source_names,
                               std::vector<std::string> target_names, double timeout_sec)
    : source_names_(std::move(source_names)),
      target_names_(std::move(target_names)),
      timeout_sec_(timeout_sec) {
    if (target_names_.empty()) throw InvalidInput("external oracle needs at least one target");

    // A dying child must surface as OracleFailure, not kill us via SIGPIPE.
    ::signal(SIGPIPE, SIG_IGN);

    int to_pipe[2], from_pipe[2];
    if (::pipe(to_pipe) != 0 || ::pipe(from_pipe) != 0)
        throw OracleFailure("cannot create pipes for external scorer");

    const long pid = ::fork();
    if (pid < 0) throw OracleFailure("cannot fork external scorer");
    if (pid == 0) {
        ::close(to_pipe[1]);
        ::close(from_pipe[0]);
        child_exec(command, to_pipe[0], from_pipe[1]);
    }
    ::close(to_pipe[0]);
    ::close(from_pipe[1]);
    to_child_ = to_pipe[1];
    from_child_ = from_pipe[0];
    pid_ = pid;

    json hello = {{"hello", 1}, {"sources", source_names_}, {"targets", target_names_}};
    std::string reply;
    try {
        reply = send_request(hello.dump());
        json ack = json::parse(reply);
        if (!ack.value("ok", false)) throw OracleFailure("scorer refused handshake", reply);
        if (ack.contains("score_range") && ack["score_range"].is_array() &&
            ack["score_range"].size() == 2) {
            range_.lo = ack["score_range"][0].get<double>();
            range_.hi = ack["score_range"][1].get<double>();
        }
    } catch (const json::exception& e) {
        close_child();
        throw OracleFailure(std::string("bad handshake reply: ") + e.what(), reply);
    } catch (...) {
        close_child();
        throw;
    }
}

ExternalOracle::~ExternalOracle() { close_child(); }

void ExternalOracle::close_child() {
    if (to_child_ >= 0) {
        ::close(to_child_);
        to_child_ = -1;
    }
    if (from_child_ >= 0) {
        ::close(from_child_);
        from_child_ = -1;
    }
    if (pid_ > 0) {
        int status = 0;
        // Give the child a moment to exit on closed stdin, then reap.
        for (int i = 0; i < 50; ++i) {
            if (::waitpid(static_cast<pid_t>(pid_), &status, WNOHANG) != 0) {
                pid_ = -1;
                return;
            }
            ::usleep(10 * 1000);
        }
        ::kill(static_cast<pid_t>(pid_), SIGKILL);
        ::waitpid(static_cast<pid_t>(pid_), &status, 0);
        pid_ = -1;
    }
}

std::string ExternalOracle::send_request(const std::string& line) {
    std::string framed = line;
    framed.push_back('\n');
    std::size_t written = 0;
    while (written < framed.size()) {
        const ssize_t n = ::write(to_child_, framed.data() + written, framed.size() - written);
        if (n < 0) {
            if (errno == EINTR) continue;
            throw OracleFailure("scorer process closed its input (write failed)");
        }
        written += static_cast<std::size_t>(n);
    }

    for (;;) {
        const std::size_t nl = read_buf_.find('\n');
        if (nl != std::string::npos) {
            std::string out = read_buf_.substr(0, nl);
            read_buf_.erase(0, nl + 1);
            return out;
        }
        struct pollfd pfd{from_child_, POLLIN, 0};
        const int rc = ::poll(&pfd, 1, static_cast<int>(timeout_sec_ * 1000.0));
        if (rc == 0) throw OracleFailure("scorer timed out after " +
                                         std::to_string(timeout_sec_) + "s", read_buf_);
        if (rc < 0) {
            if (errno == EINTR) continue;
            throw OracleFailure("poll on scorer output failed");
        }
        char chunk[4096];
        const ssize_t n = ::read(from_child_, chunk, sizeof(chunk));
        if (n < 0) {
            if (errno == EINTR) continue;
            throw OracleFailure("read from scorer failed");
        }
        if (n == 0) throw OracleFailure("scorer process exited mid-conversation", read_buf_);
        read_buf_.append(chunk, static_cast<std::size_t>(n));
    }
}

ScoreVector ExternalOracle::score(const TrainBundle& bundle) {
    std::lock_guard lock(io_mu_);  // one request per process at a time

    json train = json::array();
    for (const auto& part : bundle.per_source) {
        if (part.source >= source_names_.size())
            throw InvalidInput("bundle references unknown source " + std::to_string(part.source));
        train.push_back({{"source", source_names_[part.source]}, {"indices", part.indices}});
    }
    const std::uint64_t id = next_id_++;
    json request = {{"id", id}, {"train", train}, {"targets", target_names_}};

    const std::string reply = send_request(request.dump());
    json response;
    try {
        response = json::parse(reply);
    } catch (const json::exception& e) {
        throw OracleFailure(std::string("malformed scorer response: ") + e.what(), reply);
    }
    if (!response.is_object() || response.value("id", std::uint64_t{0}) != id)
        throw OracleFailure("scorer response id mismatch", reply);
    if (!response.contains("scores") || !response["scores"].is_array())
        throw OracleFailure("scorer response has no scores array", reply);
    if (response["scores"].size() != target_names_.size())
        throw OracleFailure("scorer returned " + std::to_string(response["scores"].size()) +
                                " scores for " + std::to_string(target_names_.size()) +
                                " targets",
                            reply);
    ScoreVector out;
    out.reserve(target_names_.size());
    for (const auto& s : response["scores"]) {
        if (!s.is_number()) throw OracleFailure("non-numeric score in response", reply);
        const double v = s.get<double>();
        if (!std::isfinite(v)) throw OracleFailure("non-finite score in response", reply);
        out.push_back(v);
    }
    return out;
}

ScoreVector external_score(const std::string& command, const TrainBundle& bundle,
                           const std::vector<std::string>& source_names,
                           const std::vector<std::string>& target_names, double timeout_sec) {
    ExternalOracle oracle(command, source_names, target_names, timeout_sec);
    return oracle.score(bundle);
}

}  // namespace shapsrc
