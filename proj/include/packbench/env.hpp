#pragma once

#include <array>
#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "packbench/packing.hpp"

namespace packbench {

enum class Mode { Vanilla, Easy };
enum class Phase { ShapeSelect, RotationSelect, LocationSelect, Done };

std::string_view to_string(Mode mode);
std::string_view to_string(Phase phase);
Mode parse_mode(std::string_view name);
Phase parse_phase(std::string_view name);

/// One shape of a task, in canonical orientation, with all 24 rotated grids.
struct TaskShape {
    ShapeSpec spec;
    ScaleFactor scale;
    int pool_index = 0;
    std::array<std::shared_ptr<const VoxelGrid>, kRotationCount> rotated;
    /// rotated[r] == rotated[distinct_of[r]], with distinct_of[r] <= r.
    std::array<int, kRotationCount> distinct_of{};

    [[nodiscard]] const VoxelGrid& canonical() const { return *rotated[0]; }
    [[nodiscard]] std::int64_t volume() const { return rotated[0]->count(); }
};

/// A pack taken apart: its placed shapes, back in canonical orientation.
struct Task {
    std::vector<TaskShape> shapes;
    std::int64_t total_volume = 0;
    /// The source pack's placements; placement i is shape i of the task.
    std::vector<Placement> source_placements;
    std::uint64_t source_seed = 0;
};

class EmptyPack : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

std::shared_ptr<const Task> new_task(const Pack& pack);
std::shared_ptr<const Task> new_task(const Pack& pack, const ShapeCatalog& catalog);

/// Vanilla action sequence that re-creates the source pack.
std::vector<int> ground_truth_actions(const Task& task);

class InvalidAction : public std::out_of_range {
public:
    using std::out_of_range::out_of_range;
};

class EpisodeFinished : public std::logic_error {
public:
    using std::logic_error::logic_error;
};

struct Observation {
    Mode mode = Mode::Vanilla;
    Phase phase = Phase::ShapeSelect;
    int step = 0;
    BoxOccupancy box;
    /// Task indices of the shapes still outside, in task order.
    std::vector<int> remaining;
    std::vector<std::shared_ptr<const VoxelGrid>> remaining_grids;
    std::optional<int> chosen_shape;
    /// Chosen shape in the chosen rotation, or canonical before one is chosen.
    std::shared_ptr<const VoxelGrid> chosen_grid;
    std::optional<int> chosen_rotation;
    std::optional<Anchor> chosen_anchor;
    /// LocationSelect: the advertised anchors, ascending in blbf_less order.
    std::vector<Anchor> candidates;
    /// Easy RotationSelect: rotations feasible at chosen_anchor, ascending.
    std::vector<int> feasible_rotations;
    int action_count = 0;
};

struct StepResult {
    Rational reward;
    bool done = false;
    [[nodiscard]] double reward_value() const { return reward.to_double(); }
};

/// Episode of the packing environment.
///
/// Vanilla: ShapeSelect -> RotationSelect -> LocationSelect -> ShapeSelect.
/// Easy:    ShapeSelect -> LocationSelect -> RotationSelect -> ShapeSelect.
/// Copies are independent (the box is copy-on-write), so clone() is cheap.
class Episode {
public:
    Episode(std::shared_ptr<const Task> task, Mode mode);

    /// Throws InvalidAction (state unchanged) or EpisodeFinished.
    StepResult step(int action);

    [[nodiscard]] Observation observe() const;
    [[nodiscard]] int action_count() const;
    [[nodiscard]] Episode clone() const { return *this; }

    [[nodiscard]] Mode mode() const { return mode_; }
    [[nodiscard]] Phase phase() const { return phase_; }
    [[nodiscard]] bool done() const { return phase_ == Phase::Done; }
    [[nodiscard]] int steps_taken() const { return step_; }
    [[nodiscard]] const Task& task() const { return *task_; }
    [[nodiscard]] const std::shared_ptr<const Task>& task_ptr() const { return task_; }
    [[nodiscard]] const BoxOccupancy& box() const { return box_; }
    [[nodiscard]] const std::vector<int>& remaining() const { return remaining_; }
    [[nodiscard]] const std::vector<Anchor>& candidates() const { return candidates_; }
    [[nodiscard]] const std::vector<int>& feasible_rotations() const { return feasible_rotations_; }
    [[nodiscard]] std::int64_t placed_volume() const { return placed_volume_; }
    [[nodiscard]] Rational cumulative_reward() const { return Rational(placed_volume_, task_->total_volume); }

    /// Canonical text form of the full state; equal states give equal bytes.
    [[nodiscard]] std::string serialize() const;
    /// 64-bit FNV-1a of serialize().
    [[nodiscard]] std::uint64_t digest() const;

private:
    void check_live() const;
    StepResult place_pending(const Anchor& anchor, int rotation);

    std::shared_ptr<const Task> task_;
    Mode mode_;
    Phase phase_ = Phase::ShapeSelect;
    int step_ = 0;
    BoxOccupancy box_;
    std::vector<int> remaining_;
    std::int64_t placed_volume_ = 0;
    int pending_shape_ = -1;
    int pending_rotation_ = -1;
    std::optional<Anchor> pending_anchor_;
    std::vector<Anchor> candidates_;
    std::vector<int> feasible_rotations_;
};

/// Fresh episode and its first observation.
std::pair<Episode, Observation> reset(std::shared_ptr<const Task> task, Mode mode);

/// Feasible anchors of a shape over all 24 rotations, ascending.
std::vector<Anchor> union_candidates(const BoxOccupancy& box, const TaskShape& shape);

/// Rotations (ascending) in which the shape fits at the anchor.
std::vector<int> feasible_rotations_at(const BoxOccupancy& box, const TaskShape& shape, const Anchor& anchor);

}  // namespace packbench
