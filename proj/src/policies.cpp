#include "packbench/policies.hpp"

#include <algorithm>
#include <cstdio>
#include <numeric>

#include "packbench/rng.hpp"

namespace packbench {

namespace {

std::vector<int> identity_ranking(int n) {
    std::vector<int> out(static_cast<std::size_t>(n));
    std::iota(out.begin(), out.end(), 0);
    return out;
}

void require_phase(const Observation& obs, Phase phase, const char* who) {
    if (obs.phase != phase) {
        throw WrongPhase(std::string(who) + " cannot act in the " + std::string(to_string(obs.phase)) + " phase");
    }
}

// Sort key of a rotation under the Aligned rule.
std::pair<int, int> aligned_key(const Dims& canonical, int r) {
    const Dims d = rotated_dims(canonical, r);
    return {d.y, d.x};
}

}  // namespace

std::vector<int> RandomPolicy::rank(const Observation& obs) const {
    if (obs.phase == Phase::Done) throw WrongPhase("random policy cannot act on a finished episode");
    std::vector<int> out = identity_ranking(obs.action_count);
    Rng rng = make_rng(seed_, {stream::kPolicy, static_cast<std::uint64_t>(obs.step),
                               static_cast<std::uint64_t>(obs.phase)});
    for (int i = 0; i + 1 < obs.action_count; ++i) {
        std::swap(out[static_cast<std::size_t>(i)], out[static_cast<std::size_t>(i + uniform_index(rng, obs.action_count - i))]);
    }
    return out;
}

int RandomPolicy::choose(const Observation& obs) const { return rank(obs).front(); }

std::vector<int> LargestFirstPolicy::rank(const Observation& obs) const {
    require_phase(obs, Phase::ShapeSelect, "largest_first");
    std::vector<int> out = identity_ranking(obs.action_count);
    std::stable_sort(out.begin(), out.end(), [&](int a, int b) {
        return obs.remaining_grids[static_cast<std::size_t>(a)]->count() >
               obs.remaining_grids[static_cast<std::size_t>(b)]->count();
    });
    return out;
}

int aligned_rotation(const Dims& canonical) {
    int best = 0;
    for (int r = 1; r < kRotationCount; ++r) {
        if (aligned_key(canonical, r) < aligned_key(canonical, best)) best = r;
    }
    return best;
}

std::vector<int> AlignedPolicy::rank(const Observation& obs) const {
    require_phase(obs, Phase::RotationSelect, "aligned");
    const Dims canonical = obs.chosen_grid->dims();
    // Vanilla actions are rotation indices; Easy actions index the feasible list.
    auto rotation_of = [&](int action) {
        return obs.mode == Mode::Vanilla ? action : obs.feasible_rotations[static_cast<std::size_t>(action)];
    };
    std::vector<int> out = identity_ranking(obs.action_count);
    std::stable_sort(out.begin(), out.end(), [&](int a, int b) {
        return aligned_key(canonical, rotation_of(a)) < aligned_key(canonical, rotation_of(b));
    });
    return out;
}

std::vector<int> BlbfPolicy::rank(const Observation& obs) const {
    require_phase(obs, Phase::LocationSelect, "blbf");
    return identity_ranking(obs.action_count);
}

std::vector<int> LowestPolicy::rank(const Observation& obs) const {
    if (obs.mode != Mode::Easy || (obs.phase != Phase::LocationSelect && obs.phase != Phase::RotationSelect)) {
        throw WrongPhase("lowest acts only in easy-mode location and rotation phases");
    }
    return identity_ranking(obs.action_count);
}

// ---------------------------------------------------------------------------
// Policy triples

Policy::Policy(std::shared_ptr<const PhasePolicy> shape, std::shared_ptr<const PhasePolicy> rotation,
               std::shared_ptr<const PhasePolicy> location)
    : shape_(std::move(shape)), rotation_(std::move(rotation)), location_(std::move(location)) {
    if (!shape_ || !rotation_ || !location_) throw std::invalid_argument("policy needs all three phases");
}

namespace {

std::string canonical_id(std::string_view id) {
    if (id == "lf" || id == "largest-first" || id == "largest_first") return "largest_first";
    return std::string(id);
}

std::shared_ptr<const PhasePolicy> make_phase_policy(const std::string& id, Phase phase, Mode mode,
                                                    std::uint64_t seed) {
    auto mismatch = [&] {
        return std::invalid_argument("policy '" + id + "' is not valid for " + std::string(to_string(phase)) +
                                     " selection in " + std::string(to_string(mode)) + " mode");
    };
    if (id == "random") return std::make_shared<RandomPolicy>(derive_seed(seed, {static_cast<std::uint64_t>(phase)}));
    if (id != "largest_first" && id != "aligned" && id != "blbf" && id != "lowest") {
        throw std::invalid_argument("unknown policy id '" + id + "'");
    }
    switch (phase) {
        case Phase::ShapeSelect:
            if (id == "largest_first") return std::make_shared<LargestFirstPolicy>();
            break;
        case Phase::RotationSelect:
            if (id == "aligned") return std::make_shared<AlignedPolicy>();
            if (id == "lowest" && mode == Mode::Easy) return std::make_shared<LowestPolicy>();
            break;
        case Phase::LocationSelect:
            if (id == "blbf" && mode == Mode::Vanilla) return std::make_shared<BlbfPolicy>();
            if (id == "lowest" && mode == Mode::Easy) return std::make_shared<LowestPolicy>();
            break;
        case Phase::Done: break;
    }
    throw mismatch();
}

}  // namespace

Policy Policy::parse(std::string_view spec, Mode mode, std::uint64_t seed) {
    std::vector<std::string> parts;
    std::size_t start = 0;
    while (true) {
        const auto colon = spec.find(':', start);
        parts.push_back(canonical_id(spec.substr(start, colon == std::string_view::npos ? spec.npos : colon - start)));
        if (colon == std::string_view::npos) break;
        start = colon + 1;
    }
    if (mode == Mode::Vanilla) {
        if (parts.size() != 3) throw std::invalid_argument("vanilla policy must be shape:rotation:location");
        return Policy(make_phase_policy(parts[0], Phase::ShapeSelect, mode, seed),
                      make_phase_policy(parts[1], Phase::RotationSelect, mode, seed),
                      make_phase_policy(parts[2], Phase::LocationSelect, mode, seed));
    }
    if (parts.size() != 2 && parts.size() != 3) {
        throw std::invalid_argument("easy policy must be shape:location[:rotation]");
    }
    const std::string rotation = parts.size() == 3 ? parts[2] : "lowest";
    return Policy(make_phase_policy(parts[0], Phase::ShapeSelect, mode, seed),
                  make_phase_policy(rotation, Phase::RotationSelect, mode, seed),
                  make_phase_policy(parts[1], Phase::LocationSelect, mode, seed));
}

const PhasePolicy& Policy::for_phase(Phase phase) const {
    switch (phase) {
        case Phase::ShapeSelect: return *shape_;
        case Phase::RotationSelect: return *rotation_;
        case Phase::LocationSelect: return *location_;
        case Phase::Done: break;
    }
    throw WrongPhase("no policy acts on a finished episode");
}

std::string Policy::id(Mode mode) const {
    if (mode == Mode::Vanilla) return shape_->id() + ":" + rotation_->id() + ":" + location_->id();
    return shape_->id() + ":" + location_->id() + ":" + rotation_->id();
}

// ---------------------------------------------------------------------------
// Trajectories

std::vector<int> Trajectory::actions() const {
    std::vector<int> out;
    out.reserve(steps.size());
    for (const auto& s : steps) out.push_back(s.action);
    return out;
}

std::string Trajectory::to_log() const {
    std::string out;
    char line[128];
    for (std::size_t i = 0; i < steps.size(); ++i) {
        const auto& s = steps[i];
        std::snprintf(line, sizeof line, "%zu\t%s\t%d\t%.12f\t%d\n", i, std::string(to_string(s.phase)).c_str(), s.action,
                      s.reward.to_double(), s.done ? 1 : 0);
        out += line;
    }
    return out;
}

namespace {

void take_step(Episode& ep, Trajectory& traj, int action) {
    TrajectoryStep s;
    s.state_digest = ep.digest();
    s.phase = ep.phase();
    s.action = action;
    const StepResult r = ep.step(action);
    s.reward = r.reward;
    s.done = r.done;
    traj.cumulative += r.reward;
    traj.steps.push_back(s);
    ++traj.nodes_expanded;
}

// Runs the policy until the next shape-selection phase (or the end).
void complete_placement(Episode& ep, Trajectory& traj, const Policy& policy, std::int64_t& nodes,
                        std::int64_t node_budget) {
    while (!ep.done() && ep.phase() != Phase::ShapeSelect && nodes < node_budget) {
        take_step(ep, traj, policy.choose(ep.observe()));
        ++nodes;
    }
}

}  // namespace

Trajectory greedy_rollout(const std::shared_ptr<const Task>& task, Mode mode, const Policy& policy) {
    Episode ep(task, mode);
    Trajectory traj;
    while (!ep.done()) take_step(ep, traj, policy.choose(ep.observe()));
    return traj;
}

Trajectory replay_actions(const std::shared_ptr<const Task>& task, Mode mode, const std::vector<int>& actions) {
    Episode ep(task, mode);
    Trajectory traj;
    for (const int a : actions) take_step(ep, traj, a);
    return traj;
}

Trajectory backtrack_search(const std::shared_ptr<const Task>& task, Mode mode, const Policy& policy,
                            const SearchConfig& cfg) {
    if (cfg.backtracks < 0) throw std::invalid_argument("backtrack budget must be >= 0");
    struct Frame {
        Episode state;
        std::vector<int> ranking;
        std::size_t next;
        Trajectory prefix;
    };

    std::vector<Frame> stack;
    std::int64_t nodes = 0;
    int budget = cfg.backtracks;
    Episode ep(task, mode);
    Trajectory cur;
    std::optional<Trajectory> best;

    while (true) {
        while (!ep.done() && nodes < cfg.node_budget) {
            const Observation obs = ep.observe();
            int action = 0;
            if (obs.phase == Phase::ShapeSelect) {
                std::vector<int> ranking = policy.rank(obs);
                action = ranking.front();
                stack.push_back({ep, std::move(ranking), 1, cur});
            } else {
                action = policy.choose(obs);
            }
            take_step(ep, cur, action);
            ++nodes;
        }
        if (!best || cur.cumulative > best->cumulative) best = cur;
        if (best->cumulative == Rational(1) || budget == 0 || nodes >= cfg.node_budget) break;

        while (!stack.empty() && stack.back().next >= stack.back().ranking.size()) stack.pop_back();
        if (stack.empty()) break;
        --budget;
        Frame& f = stack.back();
        const int action = f.ranking[f.next++];
        ep = f.state;
        cur = f.prefix;
        take_step(ep, cur, action);
        ++nodes;
    }
    best->nodes_expanded = nodes;
    return *best;
}

Trajectory beam_search(const std::shared_ptr<const Task>& task, Mode mode, const Policy& policy,
                       const SearchConfig& cfg) {
    if (cfg.beams < 1) throw std::invalid_argument("beam count must be >= 1");
    struct Beam {
        Episode ep;
        Trajectory traj;
    };
    struct Child {
        Beam beam;
        std::size_t parent;
        std::size_t rank;
    };

    std::int64_t nodes = 0;
    std::vector<Beam> beams;
    beams.push_back({Episode(task, mode), {}});
    std::vector<Trajectory> finished;

    while (!beams.empty()) {
        std::vector<Child> live;
        for (std::size_t b = 0; b < beams.size(); ++b) {
            if (nodes >= cfg.node_budget) {
                finished.push_back(beams[b].traj);
                continue;
            }
            const std::vector<int> ranking = policy.rank(beams[b].ep.observe());
            const std::size_t k = std::min(ranking.size(), static_cast<std::size_t>(cfg.beams));
            for (std::size_t j = 0; j < k; ++j) {
                if (nodes >= cfg.node_budget) break;
                Beam child = beams[b];
                take_step(child.ep, child.traj, ranking[j]);
                ++nodes;
                complete_placement(child.ep, child.traj, policy, nodes, cfg.node_budget);
                if (child.ep.done() || nodes >= cfg.node_budget) {
                    finished.push_back(std::move(child.traj));
                } else {
                    live.push_back({std::move(child), b, j});
                }
            }
        }
        if (live.empty()) break;

        // The leading beam's first choice always survives; the rest compete by
        // reward, then by parent order and policy rank.
        std::vector<std::size_t> order(live.size());
        std::iota(order.begin(), order.end(), 0);
        std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
            const bool fa = live[a].parent == 0 && live[a].rank == 0;
            const bool fb = live[b].parent == 0 && live[b].rank == 0;
            if (fa != fb) return fa;
            const auto ra = live[a].beam.traj.cumulative;
            const auto rb = live[b].beam.traj.cumulative;
            if (ra != rb) return ra > rb;
            if (live[a].parent != live[b].parent) return live[a].parent < live[b].parent;
            return live[a].rank < live[b].rank;
        });
        std::vector<Beam> next;
        for (std::size_t i = 0; i < order.size() && next.size() < static_cast<std::size_t>(cfg.beams); ++i) {
            next.push_back(std::move(live[order[i]].beam));
        }
        beams = std::move(next);
    }

    std::size_t best = 0;
    for (std::size_t i = 1; i < finished.size(); ++i) {
        if (finished[i].cumulative > finished[best].cumulative) best = i;
    }
    Trajectory out = std::move(finished.at(best));
    out.nodes_expanded = nodes;
    return out;
}

Trajectory solve(const std::shared_ptr<const Task>& task, Mode mode, const Policy& policy, const SearchConfig& cfg) {
    if (cfg.beams > 1 && cfg.backtracks > 0) {
        throw std::invalid_argument("beam search and backtracking cannot be combined");
    }
    if (cfg.beams > 1) return beam_search(task, mode, policy, cfg);
    if (cfg.backtracks > 0) return backtrack_search(task, mode, policy, cfg);
    return greedy_rollout(task, mode, policy);
}

}  // namespace packbench
