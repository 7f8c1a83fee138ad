#pragma once

#include <cstdint>
#include <mutex>
#include <string>
#include <vector>

#include "shapsrc/oracle.hpp"

namespace shapsrc {

// Scores subsets through a child process speaking line-delimited JSON on
// its standard input/output:
//   handshake:  {"hello": 1, "sources": [...], "targets": [...]}
//               -> {"ok": true, "score_range": [lo, hi]}
//   request:    {"id": n, "train": [{"source": name, "indices": [..]}, ..],
//                "targets": [...]}
//   response:   {"id": n, "scores": [..]}   (aligned with request targets)
//
// Requests on one process are serialized; run several ExternalOracle
// instances for concurrent trainings. Any protocol violation (process
// exit, malformed or misaligned response, NaN, timeout) raises
// OracleFailure carrying the raw payload.
class ExternalOracle : public Oracle {
public:
    ExternalOracle(const std::string& command, std::vector<std::string> source_names,
                   std::vector<std::string> target_names, double timeout_sec = 60.0);
    ~ExternalOracle() override;

    ExternalOracle(const ExternalOracle&) = delete;
    ExternalOracle& operator=(const ExternalOracle&) = delete;

    std::size_t target_count() const override { return target_names_.size(); }
    ScoreRange score_range() const override { return range_; }
    ScoreVector score(const TrainBundle& bundle) override;
    ScoreVector empty_score() const override { return ScoreVector(target_names_.size(), range_.lo); }

private:
    std::string send_request(const std::string& line);  // one line out, one line in
    void close_child();

    std::vector<std::string> source_names_;
    std::vector<std::string> target_names_;
    ScoreRange range_{0.0, 1.0};
    double timeout_sec_;
    std::mutex io_mu_;
    int to_child_ = -1;
    int from_child_ = -1;
    long pid_ = -1;
    std::uint64_t next_id_ = 1;
    std::string read_buf_;
};

// One-shot convenience wrapper: spawn, handshake, score one bundle, shut down.
ScoreVector external_score(const std::string& command, const TrainBundle& bundle,
                           const std::vector<std::string>& source_names,
                           const std::vector<std::string>& target_names,
                           double timeout_sec = 60.0);

}  // namespace shapsrc
