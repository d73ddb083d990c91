#pragma once

#include <map>
#include <string>
#include <vector>

#include "packbench/dataset.hpp"
#include "packbench/policies.hpp"

namespace packbench {

/// Success thresholds reported by default.
inline const std::vector<Rational> kSuccessThresholds = {Rational(1, 2), Rational(3, 5), Rational(7, 10),
                                                         Rational(4, 5), Rational(9, 10), Rational(1)};

/// Arithmetic mean. Throws std::invalid_argument on empty input.
double average_reward(const std::vector<Rational>& rewards);

/// Percentage of rewards >= x, compared exactly. Throws on empty input or
/// x outside [0, 1].
double success_at(const std::vector<Rational>& rewards, const Rational& x);

/// Exact decimal threshold, e.g. "0.7" -> 7/10.
Rational parse_threshold(std::string_view text);

struct EvalConfig {
    Mode mode = Mode::Vanilla;
    std::string policy = "lf:aligned:blbf";
    SearchConfig search;
    std::uint64_t seed = 0;
    std::vector<Rational> thresholds = kSuccessThresholds;
    int threads = 1;
};

struct EvalReport {
    std::size_t task_count = 0;
    double average_reward = 0.0;
    /// Threshold -> percentage.
    std::vector<std::pair<Rational, double>> success;
    std::vector<Rational> rewards;
    std::vector<Trajectory> trajectories;
    std::string config_digest;

    [[nodiscard]] double success_at(const Rational& x) const;
    /// Canonical JSON document (trajectories excluded).
    [[nodiscard]] std::string to_json() const;
    /// Fixed-width table: policy, mode, average reward, Success@ columns.
    [[nodiscard]] std::string to_table() const;
};

class TaskError : public std::runtime_error {
public:
    TaskError(std::size_t index, const std::string& what)
        : std::runtime_error("task " + std::to_string(index) + ": " + what), index_(index) {}
    [[nodiscard]] std::size_t index() const { return index_; }

private:
    std::size_t index_;
};

/// Builds one task per pack, runs the configured solver, aggregates. The
/// policy seed for task i is derived from (cfg.seed, i).
EvalReport evaluate(const std::vector<Pack>& packs, const EvalConfig& cfg);
EvalReport evaluate(const std::vector<std::shared_ptr<const Task>>& tasks, const EvalConfig& cfg);

std::vector<std::shared_ptr<const Task>> build_tasks(const std::vector<Pack>& packs, int threads = 1);

}  // namespace packbench
