#pragma once

#include <cstdint>
#include <memory>
#include <string>
#include <vector>

#include "packbench/env.hpp"

namespace packbench {

class WrongPhase : public std::logic_error {
public:
    using std::logic_error::logic_error;
};

/// Decision rule for one phase. rank() returns every action index of the
/// observation, most preferred first; choose() is rank()[0].
class PhasePolicy {
public:
    virtual ~PhasePolicy() = default;
    [[nodiscard]] virtual std::vector<int> rank(const Observation& obs) const = 0;
    [[nodiscard]] virtual int choose(const Observation& obs) const { return rank(obs).front(); }
    [[nodiscard]] virtual std::string id() const = 0;
};

/// Uniform over valid actions. The draw for an observation depends only on
/// (seed, step, phase), so clones and replays see the same choices.
class RandomPolicy final : public PhasePolicy {
public:
    explicit RandomPolicy(std::uint64_t seed) : seed_(seed) {}
    [[nodiscard]] std::vector<int> rank(const Observation& obs) const override;
    [[nodiscard]] int choose(const Observation& obs) const override;
    [[nodiscard]] std::string id() const override { return "random"; }

private:
    std::uint64_t seed_;
};

/// Shape selection: largest voxel volume first, ties to the lower index.
class LargestFirstPolicy final : public PhasePolicy {
public:
    [[nodiscard]] std::vector<int> rank(const Observation& obs) const override;
    [[nodiscard]] std::string id() const override { return "largest_first"; }
};

/// Rotation selection: smallest extent vertical, second smallest across the
/// width, largest along the depth; i.e. minimise (d_y, d_x), ties to the
/// lower rotation index. In Easy mode it ranks the feasible-rotation list.
class AlignedPolicy final : public PhasePolicy {
public:
    [[nodiscard]] std::vector<int> rank(const Observation& obs) const override;
    [[nodiscard]] std::string id() const override { return "aligned"; }
};

/// Vanilla location selection: the first (bottom-left-back) candidate.
class BlbfPolicy final : public PhasePolicy {
public:
    [[nodiscard]] std::vector<int> rank(const Observation& obs) const override;
    [[nodiscard]] std::string id() const override { return "blbf"; }
};

/// Easy mode: lowest anchor over all rotations, then the lowest-index
/// rotation that fits there. Valid for both Easy location and rotation phases.
class LowestPolicy final : public PhasePolicy {
public:
    [[nodiscard]] std::vector<int> rank(const Observation& obs) const override;
    [[nodiscard]] std::string id() const override { return "lowest"; }
};

/// Rotation that Aligned picks for a shape with the given canonical dims.
int aligned_rotation(const Dims& canonical);

/// A policy per phase. The spec string lists phase policies in the mode's
/// phase order: vanilla "shape:rotation:location", easy
/// "shape:location[:rotation]" (rotation defaults to lowest). Accepted ids:
/// random, largest_first (lf), aligned, blbf, lowest.
class Policy {
public:
    Policy(std::shared_ptr<const PhasePolicy> shape, std::shared_ptr<const PhasePolicy> rotation,
           std::shared_ptr<const PhasePolicy> location);

    /// Throws std::invalid_argument on unknown ids or mode/policy mismatch.
    static Policy parse(std::string_view spec, Mode mode, std::uint64_t seed = 0);

    [[nodiscard]] const PhasePolicy& for_phase(Phase phase) const;
    [[nodiscard]] std::vector<int> rank(const Observation& obs) const { return for_phase(obs.phase).rank(obs); }
    [[nodiscard]] int choose(const Observation& obs) const { return for_phase(obs.phase).choose(obs); }
    [[nodiscard]] std::string id(Mode mode) const;

private:
    std::shared_ptr<const PhasePolicy> shape_, rotation_, location_;
};

struct SearchConfig {
    int beams = 1;
    int backtracks = 0;
    /// Cap on environment steps per task, across all branches.
    std::int64_t node_budget = 1'000'000;
};

struct TrajectoryStep {
    std::uint64_t state_digest = 0;
    Phase phase = Phase::ShapeSelect;
    int action = 0;
    Rational reward;
    bool done = false;
};

struct Trajectory {
    std::vector<TrajectoryStep> steps;
    Rational cumulative;
    std::int64_t nodes_expanded = 0;

    [[nodiscard]] std::vector<int> actions() const;
    /// One line per step: step<TAB>phase<TAB>action<TAB>reward<TAB>done,
    /// reward with 12 decimals.
    [[nodiscard]] std::string to_log() const;
};

Trajectory greedy_rollout(const std::shared_ptr<const Task>& task, Mode mode, const Policy& policy);

/// Depth-first search over shape-selection choices in policy-rank order.
/// Each revert to an earlier shape choice spends one backtrack. Budget 0 is
/// the greedy rollout; the nodes visited under budget b are a prefix of
/// those under b + 1.
Trajectory backtrack_search(const std::shared_ptr<const Task>& task, Mode mode, const Policy& policy,
                            const SearchConfig& cfg);

/// Beam search over shape-selection choices. The top-ranked child of the
/// leading beam is always kept, so beams = 1 is the greedy rollout.
Trajectory beam_search(const std::shared_ptr<const Task>& task, Mode mode, const Policy& policy,
                       const SearchConfig& cfg);

/// Greedy, beam or backtracking, by configuration. Throws if both beams > 1
/// and backtracks > 0 are requested.
Trajectory solve(const std::shared_ptr<const Task>& task, Mode mode, const Policy& policy, const SearchConfig& cfg);

/// Replays actions on a fresh episode and returns the per-step record.
Trajectory replay_actions(const std::shared_ptr<const Task>& task, Mode mode, const std::vector<int>& actions);

}  // namespace packbench
