#include "packbench/env.hpp"

#include <algorithm>
#include <sstream>

namespace packbench {

namespace {

constexpr std::array<std::string_view, 4> kPhaseNames = {"shape", "rotation", "location", "done"};

std::string anchor_text(const Anchor& a) {
    return std::to_string(a.gx) + "," + std::to_string(a.gy) + "," + std::to_string(a.gz);
}

}  // namespace

std::string_view to_string(Mode mode) { return mode == Mode::Vanilla ? "vanilla" : "easy"; }

std::string_view to_string(Phase phase) { return kPhaseNames[static_cast<std::size_t>(phase)]; }

Mode parse_mode(std::string_view name) {
    if (name == "vanilla") return Mode::Vanilla;
    if (name == "easy") return Mode::Easy;
    throw std::invalid_argument("unknown mode '" + std::string(name) + "' (expected vanilla or easy)");
}

Phase parse_phase(std::string_view name) {
    for (std::size_t i = 0; i < kPhaseNames.size(); ++i) {
        if (kPhaseNames[i] == name) return static_cast<Phase>(i);
    }
    throw std::invalid_argument("unknown phase '" + std::string(name) + "'");
}

std::shared_ptr<const Task> new_task(const Pack& pack) {
    const ShapeCatalog catalog(pack.pool);
    return new_task(pack, catalog);
}

std::shared_ptr<const Task> new_task(const Pack& pack, const ShapeCatalog& catalog) {
    if (pack.placements.empty()) throw EmptyPack("pack has no placed shapes");
    auto task = std::make_shared<Task>();
    task->source_placements = pack.placements;
    task->source_seed = pack.seed;
    for (const auto& pl : pack.placements) {
        TaskShape shape;
        shape.spec = catalog.pool().at(static_cast<std::size_t>(pl.shape_idx));
        shape.scale = pl.scale;
        shape.pool_index = pl.shape_idx;
        for (int r = 0; r < kRotationCount; ++r) {
            shape.rotated[r] = catalog.grid(pl.shape_idx, pl.scale.gene(), r);
            if (!shape.rotated[r]) {
                throw std::invalid_argument("placed shape '" + shape.spec.id + "' does not fit in the box");
            }
            shape.distinct_of[r] = r;
            for (int q = 0; q < r; ++q) {
                if (shape.distinct_of[q] == q && *shape.rotated[q] == *shape.rotated[r]) {
                    shape.distinct_of[r] = q;
                    break;
                }
            }
        }
        task->total_volume += shape.volume();
        task->shapes.push_back(std::move(shape));
    }
    return task;
}

std::vector<int> ground_truth_actions(const Task& task) {
    // Non-owning alias: the episode never outlives this call.
    Episode ep(std::shared_ptr<const Task>(std::shared_ptr<const Task>{}, &task), Mode::Vanilla);
    std::vector<int> actions;
    for (const auto& pl : task.source_placements) {
        actions.push_back(0);  // the next source shape is always first in the remaining list
        ep.step(0);
        actions.push_back(pl.rotation);
        if (ep.step(pl.rotation).done) throw InfeasiblePlacement("source rotation has no feasible anchor");
        const auto& cands = ep.candidates();
        const auto it = std::find(cands.begin(), cands.end(), pl.anchor);
        if (it == cands.end()) throw InfeasiblePlacement("source anchor " + anchor_text(pl.anchor) + " is not feasible");
        const int k = static_cast<int>(it - cands.begin());
        actions.push_back(k);
        ep.step(k);
    }
    return actions;
}

std::vector<Anchor> union_candidates(const BoxOccupancy& box, const TaskShape& shape) {
    std::vector<std::uint8_t> hit(static_cast<std::size_t>(kAnchorGrid) * kAnchorGrid * kAnchorGrid, 0);
    auto idx = [](const Anchor& a) { return static_cast<std::size_t>((a.gy * kAnchorGrid + a.gx) * kAnchorGrid + a.gz); };
    for (int r = 0; r < kRotationCount; ++r) {
        if (shape.distinct_of[r] != r) continue;
        for (const auto& a : candidate_locations(box, *shape.rotated[r])) hit[idx(a)] = 1;
    }
    std::vector<Anchor> out;
    for (int gy = 0; gy < kAnchorGrid; ++gy)
        for (int gx = 0; gx < kAnchorGrid; ++gx)
            for (int gz = 0; gz < kAnchorGrid; ++gz) {
                const Anchor a{gx, gy, gz};
                if (hit[idx(a)]) out.push_back(a);
            }
    return out;
}

std::vector<int> feasible_rotations_at(const BoxOccupancy& box, const TaskShape& shape, const Anchor& anchor) {
    std::array<bool, kRotationCount> ok{};
    std::vector<int> out;
    for (int r = 0; r < kRotationCount; ++r) {
        const int rep = shape.distinct_of[r];
        ok[r] = rep == r ? feasible(box, *shape.rotated[r], anchor) : ok[rep];
        if (ok[r]) out.push_back(r);
    }
    return out;
}

// ---------------------------------------------------------------------------
// Episode

Episode::Episode(std::shared_ptr<const Task> task, Mode mode) : task_(std::move(task)), mode_(mode) {
    if (!task_ || task_->shapes.empty()) throw std::invalid_argument("episode needs a non-empty task");
    remaining_.resize(task_->shapes.size());
    for (std::size_t i = 0; i < remaining_.size(); ++i) remaining_[i] = static_cast<int>(i);
}

std::pair<Episode, Observation> reset(std::shared_ptr<const Task> task, Mode mode) {
    Episode ep(std::move(task), mode);
    Observation obs = ep.observe();
    return {std::move(ep), std::move(obs)};
}

void Episode::check_live() const {
    if (phase_ == Phase::Done) throw EpisodeFinished("episode is finished");
}

int Episode::action_count() const {
    check_live();
    switch (phase_) {
        case Phase::ShapeSelect: return static_cast<int>(remaining_.size());
        case Phase::RotationSelect:
            return mode_ == Mode::Vanilla ? kRotationCount : static_cast<int>(feasible_rotations_.size());
        case Phase::LocationSelect: return static_cast<int>(candidates_.size());
        case Phase::Done: break;
    }
    return 0;
}

StepResult Episode::step(int action) {
    const int count = action_count();
    if (action < 0 || action >= count) {
        throw InvalidAction("action " + std::to_string(action) + " out of range [0, " + std::to_string(count) + ") in " +
                            std::string(to_string(phase_)) + " phase");
    }
    ++step_;
    switch (phase_) {
        case Phase::ShapeSelect: {
            pending_shape_ = remaining_[static_cast<std::size_t>(action)];
            if (mode_ == Mode::Vanilla) {
                phase_ = Phase::RotationSelect;
                return {};
            }
            candidates_ = union_candidates(box_, task_->shapes[static_cast<std::size_t>(pending_shape_)]);
            phase_ = candidates_.empty() ? Phase::Done : Phase::LocationSelect;
            return {Rational(0), candidates_.empty()};
        }
        case Phase::RotationSelect: {
            const auto& shape = task_->shapes[static_cast<std::size_t>(pending_shape_)];
            if (mode_ == Mode::Easy) return place_pending(*pending_anchor_, feasible_rotations_[static_cast<std::size_t>(action)]);
            pending_rotation_ = action;
            candidates_ = candidate_locations(box_, *shape.rotated[static_cast<std::size_t>(action)]);
            phase_ = candidates_.empty() ? Phase::Done : Phase::LocationSelect;
            return {Rational(0), candidates_.empty()};
        }
        case Phase::LocationSelect: {
            const Anchor anchor = candidates_[static_cast<std::size_t>(action)];
            if (mode_ == Mode::Vanilla) return place_pending(anchor, pending_rotation_);
            pending_anchor_ = anchor;
            feasible_rotations_ =
                feasible_rotations_at(box_, task_->shapes[static_cast<std::size_t>(pending_shape_)], anchor);
            candidates_.clear();
            phase_ = Phase::RotationSelect;
            return {};
        }
        case Phase::Done: break;
    }
    throw std::logic_error("unreachable episode phase");
}

StepResult Episode::place_pending(const Anchor& anchor, int rotation) {
    const auto& shape = task_->shapes[static_cast<std::size_t>(pending_shape_)];
    box_ = place(box_, *shape.rotated[static_cast<std::size_t>(rotation)],
                 Placement{shape.pool_index, shape.scale, rotation, anchor});
    placed_volume_ += shape.volume();
    remaining_.erase(std::find(remaining_.begin(), remaining_.end(), pending_shape_));
    pending_shape_ = -1;
    pending_rotation_ = -1;
    pending_anchor_.reset();
    candidates_.clear();
    feasible_rotations_.clear();
    phase_ = remaining_.empty() ? Phase::Done : Phase::ShapeSelect;
    return {Rational(shape.volume(), task_->total_volume), remaining_.empty()};
}

Observation Episode::observe() const {
    Observation obs;
    obs.mode = mode_;
    obs.phase = phase_;
    obs.step = step_;
    obs.box = box_;
    obs.remaining = remaining_;
    for (const int i : remaining_) obs.remaining_grids.push_back(task_->shapes[static_cast<std::size_t>(i)].rotated[0]);
    if (pending_shape_ >= 0) {
        const auto& shape = task_->shapes[static_cast<std::size_t>(pending_shape_)];
        obs.chosen_shape = pending_shape_;
        obs.chosen_grid = shape.rotated[static_cast<std::size_t>(pending_rotation_ >= 0 ? pending_rotation_ : 0)];
    }
    if (pending_rotation_ >= 0) obs.chosen_rotation = pending_rotation_;
    obs.chosen_anchor = pending_anchor_;
    obs.candidates = candidates_;
    obs.feasible_rotations = feasible_rotations_;
    obs.action_count = phase_ == Phase::Done ? 0 : action_count();
    return obs;
}

std::string Episode::serialize() const {
    std::ostringstream out;
    out << to_string(mode_) << ' ' << to_string(phase_) << ' ' << step_ << ' ' << placed_volume_ << '/'
        << task_->total_volume << " pending " << pending_shape_ << ' ' << pending_rotation_ << ' '
        << (pending_anchor_ ? anchor_text(*pending_anchor_) : "-") << " remaining";
    for (const int i : remaining_) out << ' ' << i;
    out << " placed";
    for (const auto& p : box_.placements()) {
        out << ' ' << p.shape_idx << ':' << p.scale.volume_ratio().to_string() << ':' << p.rotation << ':'
            << anchor_text(p.anchor);
    }
    // Candidate lists are a function of the fields above; only their size is recorded.
    out << " candidates " << candidates_.size();
    out << " rotations";
    for (const int r : feasible_rotations_) out << ' ' << r;
    return out.str();
}

std::uint64_t Episode::digest() const {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (const char c : serialize()) {
        h ^= static_cast<unsigned char>(c);
        h *= 0x100000001b3ULL;
    }
    return h;
}

}  // namespace packbench
