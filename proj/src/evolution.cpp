#include "packbench/evolution.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

namespace packbench {

namespace {

double round_mm(double v) { return std::round(v * 1000.0) / 1000.0; }

double uniform(Rng& rng, double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(rng); }

std::vector<double> sample_params(ShapeKind kind, double lo, double hi, Rng& rng) {
    auto extent = [&] { return round_mm(uniform(rng, lo, hi)); };
    switch (kind) {
        case ShapeKind::Cuboid: return {extent(), extent(), extent()};
        case ShapeKind::LPrism:
        case ShapeKind::TPrism: {
            const double w = extent(), h = extent(), d = extent();
            const double a = round_mm(w * uniform(rng, 0.3, 0.6));
            const double b = round_mm(h * uniform(rng, 0.3, 0.6));
            return {w, h, d, a, b};
        }
        case ShapeKind::Cylinder: {
            const double r = round_mm(extent() / 2);
            return {r, extent()};
        }
        case ShapeKind::Sphere: return {round_mm(extent() / 2)};
        case ShapeKind::HollowBox: {
            const double w = extent(), h = extent(), d = extent();
            return {w, h, d, round_mm(std::min(w, d) * uniform(rng, 0.12, 0.25))};
        }
        case ShapeKind::MeshFile: break;
    }
    throw std::invalid_argument("cannot sample parameters for a mesh shape");
}

std::int64_t evaluate(const ShapeCatalog& catalog, const Chromosome& c) { return packed_volume(catalog, c); }

constexpr std::uint64_t kSelectionSlot = 0xFFFFFFFFULL;

}  // namespace

std::vector<ShapeSpec> sample_pool(const PoolSpec& spec) {
    if (spec.pool_size < 1) throw std::invalid_argument("pool_size must be >= 1");
    if (spec.kinds.empty()) throw std::invalid_argument("pool needs at least one shape kind");
    if (!(spec.min_extent > 0) || spec.max_extent < spec.min_extent) {
        throw std::invalid_argument("invalid extent range");
    }
    Rng kind_rng = make_rng(spec.seed, {stream::kPool});
    std::vector<ShapeSpec> pool;
    pool.reserve(static_cast<std::size_t>(spec.pool_size));
    for (int i = 0; i < spec.pool_size; ++i) {
        ShapeSpec s;
        s.kind = spec.kinds[static_cast<std::size_t>(uniform_index(kind_rng, static_cast<int>(spec.kinds.size())))];
        s.seed = derive_seed(spec.seed, {stream::kPool, static_cast<std::uint64_t>(i) + 1});
        Rng rng(s.seed);
        s.params = sample_params(s.kind, spec.min_extent, spec.max_extent, rng);
        s.id = std::string(to_string(s.kind)) + "_" + std::to_string(i);
        s.validate();
        pool.push_back(std::move(s));
    }
    return pool;
}

void EvolutionConfig::validate() const {
    if (population < 2) throw std::invalid_argument("population must be >= 2");
    if (elite < 1 || lucky < 0 || elite + lucky > population) {
        throw std::invalid_argument("need elite >= 1, lucky >= 0 and elite + lucky <= population");
    }
    if (elite + lucky < 2 && elite + lucky < population) {
        throw std::invalid_argument("offspring need at least two survivors to breed from");
    }
    if (max_generations < 0 || patience < 1) throw std::invalid_argument("invalid generation limits");
    for (const double p : {mutation.order_swap, mutation.rotation_point, mutation.scale_point}) {
        if (p > 1.0) throw std::invalid_argument("mutation rates must be <= 1");
    }
}

Chromosome random_chromosome(int n, Rng& rng) {
    if (n < 1) throw std::invalid_argument("chromosome needs n >= 1");
    Chromosome c;
    c.order.resize(static_cast<std::size_t>(n));
    std::iota(c.order.begin(), c.order.end(), 0);
    for (int i = n - 1; i > 0; --i) std::swap(c.order[i], c.order[uniform_index(rng, i + 1)]);
    for (int i = 0; i < n; ++i) c.scales.push_back(uniform_index(rng, 5));
    for (int i = 0; i < n; ++i) c.rotations.push_back(uniform_index(rng, kRotationCount));
    return c;
}

Rational fitness(const Chromosome& c, const ShapeCatalog& catalog) {
    return Rational(evaluate(catalog, c), kBoxVolume);
}

std::vector<int> osx_crossover(const std::vector<int>& a, const std::vector<int>& b, int c1, int c2) {
    const int n = static_cast<int>(a.size());
    if (b.size() != a.size()) throw std::invalid_argument("parents differ in length");
    if (c1 < 0 || c2 > n || c1 > c2) throw std::invalid_argument("invalid crossover cuts");
    if (n == 0) return {};
    std::vector<int> child(a.size(), -1);
    std::vector<char> used(a.size(), 0);
    for (int i = c1; i < c2; ++i) {
        child[i] = a[i];
        used[static_cast<std::size_t>(a[i])] = 1;
    }
    int pos = c2 % n;
    for (int k = 0; k < n; ++k) {
        const int gene = b[static_cast<std::size_t>((c2 + k) % n)];
        if (used[static_cast<std::size_t>(gene)]) continue;
        while (child[static_cast<std::size_t>(pos)] != -1) pos = (pos + 1) % n;
        child[static_cast<std::size_t>(pos)] = gene;
        used[static_cast<std::size_t>(gene)] = 1;
    }
    return child;
}

std::vector<int> osx_crossover(const std::vector<int>& a, const std::vector<int>& b, Rng& rng) {
    const int n = static_cast<int>(a.size());
    int c1 = uniform_index(rng, n + 1);
    int c2 = uniform_index(rng, n + 1);
    if (c1 > c2) std::swap(c1, c2);
    return osx_crossover(a, b, c1, c2);
}

std::vector<int> single_point_crossover(const std::vector<int>& a, const std::vector<int>& b, int cut) {
    if (a.size() != b.size()) throw std::invalid_argument("parents differ in length");
    if (cut < 0 || static_cast<std::size_t>(cut) > a.size()) throw std::invalid_argument("invalid crossover cut");
    std::vector<int> child(a.begin(), a.begin() + cut);
    child.insert(child.end(), b.begin() + cut, b.end());
    return child;
}

std::vector<int> single_point_crossover(const std::vector<int>& a, const std::vector<int>& b, Rng& rng) {
    return single_point_crossover(a, b, uniform_index(rng, static_cast<int>(a.size()) + 1));
}

Chromosome mutate(Chromosome c, const MutationRates& rates, Rng& rng) {
    const int n = static_cast<int>(c.order.size());
    const double rot_rate = rates.rotation_point < 0 ? 1.0 / n : rates.rotation_point;
    const double scale_rate = rates.scale_point < 0 ? 1.0 / n : rates.scale_point;
    if (n >= 2 && bernoulli(rng, rates.order_swap)) {
        const int i = uniform_index(rng, n);
        int j = uniform_index(rng, n - 1);
        if (j >= i) ++j;
        std::swap(c.order[i], c.order[j]);
    }
    // A point mutation always changes the gene: it draws among the other values.
    for (auto& r : c.rotations) {
        if (bernoulli(rng, rot_rate)) {
            const int v = uniform_index(rng, kRotationCount - 1);
            r = v >= r ? v + 1 : v;
        }
    }
    for (auto& s : c.scales) {
        if (bernoulli(rng, scale_rate)) {
            const int v = uniform_index(rng, 4);
            s = v >= s ? v + 1 : v;
        }
    }
    return c;
}

EvolutionResult evolve(const std::vector<ShapeSpec>& pool, const EvolutionConfig& cfg) {
    const ShapeCatalog catalog(pool);
    return evolve(catalog, cfg);
}

EvolutionResult evolve(const ShapeCatalog& catalog, const EvolutionConfig& cfg) {
    cfg.validate();
    const int n = static_cast<int>(catalog.size());
    if (n < 1) throw std::invalid_argument("empty shape pool");

    struct Individual {
        Chromosome genome;
        std::int64_t volume = -1;
    };

    std::vector<Individual> population(static_cast<std::size_t>(cfg.population));
    for (int slot = 0; slot < cfg.population; ++slot) {
        Rng rng = make_rng(cfg.seed, {stream::kEvolution, 0, static_cast<std::uint64_t>(slot)});
        population[static_cast<std::size_t>(slot)].genome = random_chromosome(n, rng);
    }

    EvolutionResult result;
    Individual best_ever;
    int last_improvement = 0;
    const int survivors = cfg.elite + cfg.lucky;

    for (int gen = 0;; ++gen) {
        parallel_for(cfg.population, cfg.threads, [&](int i) {
            auto& ind = population[static_cast<std::size_t>(i)];
            if (ind.volume < 0) ind.volume = evaluate(catalog, ind.genome);
        });

        std::vector<int> rank(population.size());
        std::iota(rank.begin(), rank.end(), 0);
        std::stable_sort(rank.begin(), rank.end(), [&](int a, int b) {
            return population[static_cast<std::size_t>(a)].volume > population[static_cast<std::size_t>(b)].volume;
        });

        const Individual& best = population[static_cast<std::size_t>(rank.front())];
        if (gen == 0 || best.volume > best_ever.volume) {
            best_ever = best;
            last_improvement = gen;
        }
        double mean = 0.0;
        for (const auto& ind : population) mean += static_cast<double>(ind.volume);
        mean /= static_cast<double>(population.size()) * static_cast<double>(kBoxVolume);
        result.trace.generations.push_back({gen, Rational(best_ever.volume, kBoxVolume), mean});

        if (cfg.snapshot_every > 0 && gen % cfg.snapshot_every == 0) {
            Pack snap = create_pack(catalog, best_ever.genome);
            snap.seed = cfg.seed;
            snap.generations_run = gen;
            result.trace.snapshots.push_back({gen, best_ever.genome, std::move(snap)});
        }

        if (gen >= cfg.max_generations || gen - last_improvement >= cfg.patience) {
            result.best_chromosome = best_ever.genome;
            result.best = create_pack(catalog, best_ever.genome);
            result.best.seed = cfg.seed;
            result.best.generations_run = gen;
            return result;
        }

        // Selection: elites by rank, then lucky survivors uniformly from the rest.
        Rng select_rng = make_rng(cfg.seed, {stream::kEvolution, static_cast<std::uint64_t>(gen + 1), kSelectionSlot});
        std::vector<int> rest(rank.begin() + cfg.elite, rank.end());
        std::vector<Individual> next;
        next.reserve(population.size());
        for (int i = 0; i < cfg.elite; ++i) next.push_back(population[static_cast<std::size_t>(rank[i])]);
        for (int i = 0; i < cfg.lucky; ++i) {
            const int pick = i + uniform_index(select_rng, static_cast<int>(rest.size()) - i);
            std::swap(rest[static_cast<std::size_t>(i)], rest[static_cast<std::size_t>(pick)]);
            next.push_back(population[static_cast<std::size_t>(rest[static_cast<std::size_t>(i)])]);
        }

        for (int slot = survivors; slot < cfg.population; ++slot) {
            Rng rng = make_rng(cfg.seed, {stream::kEvolution, static_cast<std::uint64_t>(gen + 1),
                                          static_cast<std::uint64_t>(slot)});
            const int p1 = uniform_index(rng, survivors);
            int p2 = uniform_index(rng, survivors - 1);
            if (p2 >= p1) ++p2;
            const Chromosome& a = next[static_cast<std::size_t>(p1)].genome;
            const Chromosome& b = next[static_cast<std::size_t>(p2)].genome;
            Chromosome child;
            child.order = osx_crossover(a.order, b.order, rng);
            child.rotations = single_point_crossover(a.rotations, b.rotations, rng);
            child.scales = single_point_crossover(a.scales, b.scales, rng);
            next.push_back({mutate(std::move(child), cfg.mutation, rng), -1});
        }
        population = std::move(next);
    }
}

}  // namespace packbench
