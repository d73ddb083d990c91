#include <doctest.h>

#include <random>

#include "packbench/eval.hpp"
#include "packbench/evolution.hpp"

using namespace packbench;

namespace {

std::vector<Pack> small_packs(int n, std::uint64_t seed) {
    PoolSpec ps;
    ps.pool_size = 6;
    EvolutionConfig cfg;
    cfg.population = 8;
    cfg.elite = 2;
    cfg.lucky = 2;
    cfg.max_generations = 4;
    std::vector<Pack> packs;
    for (int i = 0; i < n; ++i) {
        ps.seed = seed + static_cast<std::uint64_t>(i);
        cfg.seed = seed + static_cast<std::uint64_t>(i);
        packs.push_back(evolve(sample_pool(ps), cfg).best);
    }
    return packs;
}

}  // namespace

TEST_CASE("average reward and success rate") {
    const std::vector<Rational> r{Rational(1), Rational(4, 5), Rational(2, 5)};
    CHECK(average_reward(r) == doctest::Approx(2.2 / 3.0).epsilon(1e-12));
    CHECK(success_at(r, Rational(7, 10)) == doctest::Approx(200.0 / 3.0));
    CHECK(success_at(r, Rational(0)) == 100.0);
    CHECK(success_at(r, Rational(1)) == doctest::Approx(100.0 / 3.0));
    // Boundary values count as successes under the exact comparison.
    CHECK(success_at({Rational(7, 10)}, parse_threshold("0.7")) == 100.0);
    CHECK_THROWS_AS((void)average_reward({}), std::invalid_argument);
    CHECK_THROWS_AS((void)success_at({}, Rational(1, 2)), std::invalid_argument);
    CHECK_THROWS_AS((void)success_at(r, Rational(3, 2)), std::invalid_argument);
}

TEST_CASE("average reward matches the exact mean") {
    // Rewards over a shared denominator, so the exact mean is one fraction.
    constexpr std::int64_t den = 1'000'000;
    std::mt19937_64 rng(3);
    std::uniform_int_distribution<std::int64_t> num(0, den);
    for (int t = 0; t < 200; ++t) {
        std::vector<Rational> r;
        std::int64_t total = 0;
        const int n = 1 + t % 50;
        for (int i = 0; i < n; ++i) {
            const std::int64_t k = num(rng);
            r.emplace_back(k, den);
            total += k;
        }
        CHECK(average_reward(r) == doctest::Approx(Rational(total, den * n).to_double()).epsilon(1e-12));
    }
}

TEST_CASE("threshold parsing") {
    CHECK(parse_threshold("0.7") == Rational(7, 10));
    CHECK(parse_threshold("1") == Rational(1));
    CHECK(parse_threshold("1.0") == Rational(1));
    CHECK(parse_threshold("0.55") == Rational(11, 20));
    CHECK(parse_threshold("3/4") == Rational(3, 4));
    CHECK_THROWS(parse_threshold("1.5"));
    CHECK_THROWS(parse_threshold("abc"));
    CHECK_THROWS(parse_threshold("."));
}

TEST_CASE("evaluation reports") {
    const auto packs = small_packs(6, 100);
    EvalConfig cfg;
    const auto a = evaluate(packs, cfg);
    CHECK(a.task_count == 6);
    CHECK(a.rewards.size() == 6);
    CHECK(a.average_reward == doctest::Approx(average_reward(a.rewards)));
    for (std::size_t i = 0; i < packs.size(); ++i) {
        const auto t = new_task(packs[i]);
        CHECK(a.rewards[i] == greedy_rollout(t, Mode::Vanilla, Policy::parse(cfg.policy, Mode::Vanilla)).cumulative);
    }
    REQUIRE(a.success.size() == kSuccessThresholds.size());
    for (std::size_t i = 1; i < a.success.size(); ++i) CHECK(a.success[i].second <= a.success[i - 1].second);

    cfg.threads = 3;
    const auto b = evaluate(packs, cfg);
    CHECK(b.to_json() == a.to_json());
    CHECK(b.to_table() == a.to_table());

    cfg.policy = "random:random:random";
    cfg.seed = 5;
    const auto c1 = evaluate(packs, cfg);
    const auto c2 = evaluate(packs, cfg);
    CHECK(c1.to_json() == c2.to_json());
    CHECK(c1.config_digest != a.config_digest);

    CHECK_THROWS(evaluate(std::vector<Pack>{}, cfg));
}

TEST_CASE("a trivially packable task scores full marks") {
    const std::vector<ShapeSpec> pool{{"c", ShapeKind::Cuboid, {0.2, 0.2, 0.2}, 0, ""}};
    const Pack p = create_pack(pool, Chromosome{{0}, {2}, {0}});
    const auto report = evaluate(std::vector<Pack>{p}, EvalConfig{});
    CHECK(report.average_reward == 1.0);
    CHECK(report.success_at(Rational(1)) == 100.0);
}
