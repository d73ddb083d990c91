#pragma once

#include <cstdint>
#include <vector>

#include "packbench/packing.hpp"
#include "packbench/parallel.hpp"
#include "packbench/rng.hpp"

namespace packbench {

/// Procedural shape-pool sampler. Kinds are drawn uniformly from `kinds`,
/// then extents uniformly from [min_extent, max_extent].
struct PoolSpec {
    int pool_size = 10;
    std::vector<ShapeKind> kinds{kProceduralKinds.begin(), kProceduralKinds.end()};
    // Sized so a pool oversubscribes the box: evolved packs keep roughly half
    // of the pool, which keeps shape selection a real choice.
    double min_extent = 0.3;
    double max_extent = 0.8;
    std::uint64_t seed = 0;
};

std::vector<ShapeSpec> sample_pool(const PoolSpec& spec);

struct MutationRates {
    double order_swap = 0.2;
    /// Per-gene point rates; a negative value means 1/n.
    double rotation_point = -1.0;
    double scale_point = -1.0;
};

struct EvolutionConfig {
    int population = 100;
    int elite = 25;
    int lucky = 25;
    int max_generations = 1000;
    int patience = 100;
    MutationRates mutation;
    std::uint64_t seed = 0;
    /// Keep the best chromosome and pack every this many generations (0: never).
    int snapshot_every = 0;
    /// Worker threads for fitness evaluation (0: hardware default, capped by
    /// PACKBENCH_THREADS). Results do not depend on this value.
    int threads = 1;

    void validate() const;
};

struct GenerationStats {
    int generation = 0;
    Rational best;
    double mean = 0.0;
};

struct Snapshot {
    int generation = 0;
    Chromosome best;
    Pack pack;
};

struct EvolutionTrace {
    std::vector<GenerationStats> generations;
    std::vector<Snapshot> snapshots;
};

struct EvolutionResult {
    Pack best;
    Chromosome best_chromosome;
    EvolutionTrace trace;
};

Chromosome random_chromosome(int n, Rng& rng);

/// Fitness = density of the pack the chromosome decodes to.
Rational fitness(const Chromosome& c, const ShapeCatalog& catalog);

/// Ordered crossover: copies a[c1, c2) and fills the other positions from b,
/// starting at c2 and wrapping, skipping genes already present.
std::vector<int> osx_crossover(const std::vector<int>& a, const std::vector<int>& b, int c1, int c2);
std::vector<int> osx_crossover(const std::vector<int>& a, const std::vector<int>& b, Rng& rng);

/// a[0, cut) ++ b[cut, n).
std::vector<int> single_point_crossover(const std::vector<int>& a, const std::vector<int>& b, int cut);
std::vector<int> single_point_crossover(const std::vector<int>& a, const std::vector<int>& b, Rng& rng);

Chromosome mutate(Chromosome c, const MutationRates& rates, Rng& rng);

EvolutionResult evolve(const std::vector<ShapeSpec>& pool, const EvolutionConfig& cfg);
EvolutionResult evolve(const ShapeCatalog& catalog, const EvolutionConfig& cfg);

}  // namespace packbench
