#include "packbench/eval.hpp"

#include <cstdio>
#include <numeric>

#include <json.hpp>

#include "packbench/parallel.hpp"
#include "packbench/rng.hpp"

namespace packbench {

namespace {

void require_rewards(const std::vector<Rational>& rewards) {
    if (rewards.empty()) throw std::invalid_argument("no rewards to aggregate");
}

std::string threshold_text(const Rational& x) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%g", x.to_double());
    return buf;
}

}  // namespace

double average_reward(const std::vector<Rational>& rewards) {
    require_rewards(rewards);
    long double sum = 0;
    for (const auto& r : rewards) sum += static_cast<long double>(r.num()) / static_cast<long double>(r.den());
    return static_cast<double>(sum / static_cast<long double>(rewards.size()));
}

double success_at(const std::vector<Rational>& rewards, const Rational& x) {
    require_rewards(rewards);
    if (x < Rational(0) || x > Rational(1)) throw std::invalid_argument("success threshold must be in [0, 1]");
    const auto hits = std::count_if(rewards.begin(), rewards.end(), [&](const Rational& r) { return r >= x; });
    return 100.0 * static_cast<double>(hits) / static_cast<double>(rewards.size());
}

Rational parse_threshold(std::string_view text) {
    Rational x;
    const auto dot = text.find('.');
    if (text.find('/') != std::string_view::npos || dot == std::string_view::npos) {
        x = Rational::parse(text);
    } else {
        std::string digits = std::string(text.substr(0, dot)) + std::string(text.substr(dot + 1));
        const auto decimals = text.size() - dot - 1;
        if (decimals > 12 || digits.empty()) throw std::invalid_argument("malformed threshold '" + std::string(text) + "'");
        std::int64_t den = 1;
        for (std::size_t i = 0; i < decimals; ++i) den *= 10;
        x = Rational(Rational::parse(digits).num(), den);
    }
    if (x < Rational(0) || x > Rational(1)) throw std::invalid_argument("success threshold must be in [0, 1]");
    return x;
}

double EvalReport::success_at(const Rational& x) const {
    for (const auto& [t, pct] : success) {
        if (t == x) return pct;
    }
    return packbench::success_at(rewards, x);
}

std::string EvalReport::to_json() const {
    nlohmann::ordered_json j;
    j["config"] = config_digest;
    j["task_count"] = task_count;
    j["average_reward"] = average_reward;
    nlohmann::ordered_json s = nlohmann::ordered_json::object();
    for (const auto& [t, pct] : success) s[threshold_text(t)] = pct;
    j["success"] = std::move(s);
    std::vector<std::string> r;
    for (const auto& x : rewards) r.push_back(x.to_string());
    j["rewards"] = r;
    return j.dump(2) + "\n";
}

std::string EvalReport::to_table() const {
    std::string out;
    char buf[64];
    out += "config: " + config_digest + "\n";
    out += "  tasks  avg_reward";
    for (const auto& [t, pct] : success) {
        std::snprintf(buf, sizeof buf, "  S@%-5s", threshold_text(t).c_str());
        out += buf;
    }
    out += "\n";
    std::snprintf(buf, sizeof buf, "%7zu  %10.3f", task_count, average_reward);
    out += buf;
    for (const auto& [t, pct] : success) {
        std::snprintf(buf, sizeof buf, "  %7.2f", pct);
        out += buf;
    }
    out += "\n";
    return out;
}

std::vector<std::shared_ptr<const Task>> build_tasks(const std::vector<Pack>& packs, int threads) {
    std::vector<std::shared_ptr<const Task>> tasks(packs.size());
    parallel_for(static_cast<int>(packs.size()), threads, [&](int i) {
        try {
            tasks[static_cast<std::size_t>(i)] = new_task(packs[static_cast<std::size_t>(i)]);
        } catch (const std::exception& e) {
            throw TaskError(static_cast<std::size_t>(i), e.what());
        }
    });
    return tasks;
}

EvalReport evaluate(const std::vector<Pack>& packs, const EvalConfig& cfg) {
    return evaluate(build_tasks(packs, cfg.threads), cfg);
}

EvalReport evaluate(const std::vector<std::shared_ptr<const Task>>& tasks, const EvalConfig& cfg) {
    if (tasks.empty()) throw std::invalid_argument("no tasks to evaluate");
    // Validates the policy string once, before any work is done.
    (void)Policy::parse(cfg.policy, cfg.mode, cfg.seed);

    EvalReport report;
    report.task_count = tasks.size();
    report.trajectories.resize(tasks.size());
    parallel_for(static_cast<int>(tasks.size()), cfg.threads, [&](int i) {
        const Policy policy = Policy::parse(cfg.policy, cfg.mode, derive_seed(cfg.seed, {stream::kTask, static_cast<std::uint64_t>(i)}));
        try {
            report.trajectories[static_cast<std::size_t>(i)] = solve(tasks[static_cast<std::size_t>(i)], cfg.mode, policy, cfg.search);
        } catch (const std::exception& e) {
            throw TaskError(static_cast<std::size_t>(i), e.what());
        }
    });
    for (const auto& t : report.trajectories) report.rewards.push_back(t.cumulative);
    report.average_reward = average_reward(report.rewards);
    for (const auto& x : cfg.thresholds) report.success.emplace_back(x, packbench::success_at(report.rewards, x));
    report.config_digest = "mode=" + std::string(to_string(cfg.mode)) + ";policy=" + cfg.policy +
                           ";beams=" + std::to_string(cfg.search.beams) +
                           ";backtracks=" + std::to_string(cfg.search.backtracks) +
                           ";node_budget=" + std::to_string(cfg.search.node_budget) +
                           ";seed=" + std::to_string(cfg.seed);
    return report;
}

}  // namespace packbench
