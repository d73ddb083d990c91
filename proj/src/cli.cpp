#include "packbench/cli.hpp"

#include <chrono>
#include <cstdio>
#include <ctime>
#include <fstream>
#include <map>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "packbench/dataset.hpp"
#include "packbench/eval.hpp"
#include "packbench/parallel.hpp"

namespace packbench {

namespace {

using Json = nlohmann::ordered_json;
namespace fs = std::filesystem;

// Bad flags or values; maps to exit code 1.
struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Missing or inconsistent input data; maps to exit code 2.
struct DataError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

std::string utc_now() {
    const auto t = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    std::tm tm{};
    gmtime_r(&t, &tm);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

std::string read_file(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw DataError("cannot open '" + path.string() + "'");
    std::stringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

std::string fmt(const char* f, double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, f, v);
    return buf;
}

// Collects what a manifest needs while a command runs.
struct Manifest {
    std::string command;
    std::vector<std::string> args;
    Json config = Json::object();
    Json seeds = Json::object();
    std::vector<std::string> outputs;
    std::string started = utc_now();

    void write(const fs::path& dir) const {
        Json j;
        j["command"] = command;
        j["tool_version"] = std::string(kToolVersion);
        j["args"] = args;
        j["config"] = config;
        j["seeds"] = seeds;
        j["started"] = started;
        j["finished"] = utc_now();
        j["outputs"] = outputs;
        write_file_atomic(dir / (command + ".manifest.json"), j.dump(2) + "\n");
    }
};

struct PoolFlags {
    int pool_size = 10;
    double min_extent = PoolSpec{}.min_extent;
    double max_extent = PoolSpec{}.max_extent;
};

struct EvolveFlags {
    PoolFlags pool;
    int packs = 1;
    int population = 20;
    int elite = -1;
    int lucky = -1;
    int generations = 100;
    int patience = 100;
    bool paper_scale = false;
};

void add_pool_flags(CLI::App& app, PoolFlags& f) {
    app.add_option("--pool-size", f.pool_size, "Shapes per pool")->check(CLI::PositiveNumber);
    app.add_option("--min-extent", f.min_extent, "Smallest sampled extent (box units)");
    app.add_option("--max-extent", f.max_extent, "Largest sampled extent (box units)");
}

void add_evolve_flags(CLI::App& app, EvolveFlags& f) {
    add_pool_flags(app, f.pool);
    app.add_option("--population", f.population, "Population size");
    app.add_option("--elite", f.elite, "Elite survivors per generation (default: population/4)");
    app.add_option("--lucky", f.lucky, "Lucky survivors per generation (default: population/4)");
    app.add_option("--generations", f.generations, "Maximum generations");
    app.add_option("--patience", f.patience, "Stop after this many generations without improvement");
    app.add_flag("--paper-scale", f.paper_scale, "Pool 50, population 100, 1000 generations, patience 100");
}

// Flags the user typed explicitly win over --paper-scale.
void apply_paper_scale(const CLI::App& app, EvolveFlags& f) {
    if (!f.paper_scale) return;
    if (app.count("--pool-size") == 0) f.pool.pool_size = 50;
    if (app.count("--population") == 0) f.population = 100;
    if (app.count("--generations") == 0) f.generations = 1000;
    if (app.count("--patience") == 0) f.patience = 100;
}

PoolSpec pool_spec(const PoolFlags& f, std::uint64_t seed) {
    if (!(f.min_extent > 0.0 && f.min_extent <= f.max_extent && f.max_extent <= 1.0)) {
        throw ConfigError("extents must satisfy 0 < min-extent <= max-extent <= 1");
    }
    PoolSpec spec;
    spec.pool_size = f.pool_size;
    spec.min_extent = f.min_extent;
    spec.max_extent = f.max_extent;
    spec.seed = seed;
    return spec;
}

EvolutionConfig evolution_config(const EvolveFlags& f, std::uint64_t seed) {
    EvolutionConfig cfg;
    cfg.population = f.population;
    cfg.elite = f.elite >= 0 ? f.elite : f.population / 4;
    cfg.lucky = f.lucky >= 0 ? f.lucky : f.population / 4;
    cfg.max_generations = f.generations;
    cfg.patience = f.patience;
    cfg.seed = seed;
    try {
        cfg.validate();
    } catch (const std::exception& e) {
        throw ConfigError(e.what());
    }
    return cfg;
}

Json evolve_config_json(const EvolveFlags& f, const EvolutionConfig& cfg, std::uint64_t seed) {
    Json j;
    j["seed"] = seed;
    j["pool_size"] = f.pool.pool_size;
    j["min_extent"] = f.pool.min_extent;
    j["max_extent"] = f.pool.max_extent;
    j["population"] = cfg.population;
    j["elite"] = cfg.elite;
    j["lucky"] = cfg.lucky;
    j["generations"] = cfg.max_generations;
    j["patience"] = cfg.patience;
    j["order_swap_rate"] = cfg.mutation.order_swap;
    return j;
}

// Seeds of run i, shared by `evolve` and `hardness`.
std::uint64_t run_pool_seed(std::uint64_t seed, int i) {
    return derive_seed(seed, {stream::kPack, static_cast<std::uint64_t>(i), stream::kPool});
}
std::uint64_t run_evolution_seed(std::uint64_t seed, int i) {
    return derive_seed(seed, {stream::kPack, static_cast<std::uint64_t>(i), stream::kEvolution});
}

std::string trace_csv(const EvolutionTrace& trace) {
    std::string out = "generation,best_fitness,mean_fitness,best_exact\n";
    for (const auto& g : trace.generations) {
        out += std::to_string(g.generation) + "," + fmt("%.12f", g.best.to_double()) + "," + fmt("%.12f", g.mean) + "," +
               g.best.to_string() + "\n";
    }
    return out;
}

std::string indexed(const char* prefix, std::size_t i, const char* suffix) {
    char buf[48];
    std::snprintf(buf, sizeof buf, "%s%04zu%s", prefix, i, suffix);
    return buf;
}

// ---- gen-pool -------------------------------------------------------------

int cmd_gen_pool(const PoolFlags& flags, std::uint64_t seed, const fs::path& out_dir, Manifest& m, std::ostream& out) {
    const PoolSpec spec = pool_spec(flags, seed);
    const auto pool = sample_pool(spec);
    Json shapes = Json::array();
    for (const auto& s : pool) {
        Json j;
        j["id"] = s.id;
        j["kind"] = std::string(to_string(s.kind));
        j["params"] = s.params;
        j["seed"] = s.seed;
        shapes.push_back(std::move(j));
    }
    const fs::path path = out_dir / "pool.json";
    write_file_atomic(path, shapes.dump(2) + "\n");
    m.config = {{"pool_size", flags.pool_size}, {"min_extent", flags.min_extent}, {"max_extent", flags.max_extent}};
    m.seeds = {{"seed", seed}};
    m.outputs = {path.string()};
    out << "wrote " << pool.size() << " shapes to " << path.string() << "\n";
    return kExitOk;
}

// ---- evolve ---------------------------------------------------------------

int cmd_evolve(const EvolveFlags& flags, std::uint64_t seed, int threads, const fs::path& out_dir, Manifest& m,
               std::ostream& out) {
    if (flags.packs <= 0) throw ConfigError("--packs must be positive");
    const EvolutionConfig base = evolution_config(flags, seed);
    (void)pool_spec(flags.pool, seed);

    std::vector<EvolutionResult> results(static_cast<std::size_t>(flags.packs));
    parallel_for(flags.packs, threads, [&](int i) {
        const auto pool = sample_pool(pool_spec(flags.pool, run_pool_seed(seed, i)));
        EvolutionConfig cfg = base;
        cfg.seed = run_evolution_seed(seed, i);
        results[static_cast<std::size_t>(i)] = evolve(pool, cfg);
    });

    PackDataset ds;
    Json gen = evolve_config_json(flags, base, seed);
    gen["command"] = "evolve";
    gen["packs"] = flags.packs;
    ds.generator = gen.dump();
    for (const auto& r : results) ds.packs.push_back(r.best);

    const fs::path dataset_path = out_dir / "dataset.jsonl";
    save_dataset(ds, dataset_path);
    m.outputs.push_back(dataset_path.string());
    for (std::size_t i = 0; i < results.size(); ++i) {
        const fs::path trace_path = out_dir / "traces" / indexed("pack_", i, ".csv");
        write_file_atomic(trace_path, trace_csv(results[i].trace));
        m.outputs.push_back(trace_path.string());
    }
    m.config = gen;
    m.seeds["seed"] = seed;
    Json runs = Json::array();
    for (int i = 0; i < flags.packs; ++i) {
        runs.push_back({{"pool", run_pool_seed(seed, i)}, {"evolution", run_evolution_seed(seed, i)}});
    }
    m.seeds["runs"] = std::move(runs);

    for (std::size_t i = 0; i < results.size(); ++i) {
        const auto& p = results[i].best;
        out << "pack " << i << ": density " << fmt("%.4f", p.density.to_double()) << " (" << p.placements.size() << "/"
            << p.pool.size() << " shapes, " << p.generations_run + 1 << " generations)\n";
    }
    out << "wrote " << dataset_path.string() << "\n";
    return kExitOk;
}

// ---- solve ----------------------------------------------------------------

struct SolveFlags {
    fs::path dataset;
    std::string mode = "vanilla";
    std::string policy = "lf:aligned:blbf";
    int beams = 1;
    int backtracks = 0;
    std::int64_t node_budget = SearchConfig{}.node_budget;
    std::vector<std::string> success;
};

std::vector<Rational> parse_thresholds(const std::vector<std::string>& texts) {
    if (texts.empty()) return kSuccessThresholds;
    std::vector<Rational> xs;
    for (const auto& t : texts) xs.push_back(parse_threshold(t));
    return xs;
}

PackDataset load_or_fail(const fs::path& path) {
    if (!fs::exists(path)) throw DataError("dataset '" + path.string() + "' does not exist");
    return load_dataset(path);
}

int cmd_solve(const SolveFlags& flags, std::uint64_t seed, int threads, const fs::path& out_dir, Manifest& m,
              std::ostream& out) {
    EvalConfig cfg;
    try {
        cfg.mode = parse_mode(flags.mode);
        cfg.policy = flags.policy;
        (void)Policy::parse(cfg.policy, cfg.mode, seed);
        cfg.search = {flags.beams, flags.backtracks, flags.node_budget};
        if (cfg.search.beams < 1) throw std::invalid_argument("--beams must be >= 1");
        if (cfg.search.backtracks < 0) throw std::invalid_argument("--backtracks must be >= 0");
        if (cfg.search.node_budget < 1) throw std::invalid_argument("--node-budget must be >= 1");
        if (cfg.search.beams > 1 && cfg.search.backtracks > 0) {
            throw std::invalid_argument("--beams and --backtracks cannot be combined");
        }
        cfg.thresholds = parse_thresholds(flags.success);
    } catch (const std::invalid_argument& e) {
        throw ConfigError(e.what());
    }
    cfg.seed = seed;
    cfg.threads = threads;

    const PackDataset ds = load_or_fail(flags.dataset);
    if (ds.packs.empty()) throw DataError("dataset '" + flags.dataset.string() + "' has no packs");
    const EvalReport report = evaluate(ds.packs, cfg);

    for (std::size_t i = 0; i < report.trajectories.size(); ++i) {
        const fs::path log_path = out_dir / "trajectories" / indexed("task_", i, ".log");
        write_file_atomic(log_path, trajectory_log_header(i, cfg.mode, cfg.policy) + "\n" + report.trajectories[i].to_log());
        m.outputs.push_back(log_path.string());
    }
    write_file_atomic(out_dir / "report.json", report.to_json());
    write_file_atomic(out_dir / "report.txt", report.to_table());
    m.outputs.push_back((out_dir / "report.json").string());
    m.outputs.push_back((out_dir / "report.txt").string());
    m.config = {{"dataset", flags.dataset.string()},
                {"mode", flags.mode},
                {"policy", flags.policy},
                {"beams", flags.beams},
                {"backtracks", flags.backtracks},
                {"node_budget", flags.node_budget}};
    std::vector<std::string> ts;
    for (const auto& x : cfg.thresholds) ts.push_back(x.to_string());
    m.config["success"] = ts;
    m.seeds["seed"] = seed;
    out << report.to_table();
    return kExitOk;
}

// ---- hardness -------------------------------------------------------------

struct HardnessFlags {
    EvolveFlags evolve;
    int runs = 8;
    int snapshot_every = 10;
};

int cmd_hardness(const HardnessFlags& flags, std::uint64_t seed, int threads, const fs::path& out_dir, Manifest& m,
                 std::ostream& out) {
    if (flags.runs <= 0) throw ConfigError("--runs must be positive");
    if (flags.snapshot_every <= 0) throw ConfigError("--snapshot-every must be positive");
    EvolutionConfig base = evolution_config(flags.evolve, seed);
    base.snapshot_every = flags.snapshot_every;
    (void)pool_spec(flags.evolve.pool, seed);

    std::vector<EvolutionResult> results(static_cast<std::size_t>(flags.runs));
    parallel_for(flags.runs, threads, [&](int i) {
        const auto pool = sample_pool(pool_spec(flags.evolve.pool, run_pool_seed(seed, i)));
        EvolutionConfig cfg = base;
        cfg.seed = run_evolution_seed(seed, i);
        results[static_cast<std::size_t>(i)] = evolve(pool, cfg);
    });

    // A run that stopped early keeps its final best for later generations.
    const Rational x07(7, 10), x10(1);
    std::string csv = "generation,avg_reward,s@0.7,s@1.0\n";
    for (int g = 0; g <= base.max_generations; g += flags.snapshot_every) {
        std::vector<Pack> packs;
        for (const auto& r : results) {
            const Snapshot* snap = nullptr;
            for (const auto& s : r.trace.snapshots) {
                if (s.generation == g) snap = &s;
            }
            packs.push_back(snap ? snap->pack : r.best);
        }
        EvalConfig cfg;
        cfg.policy = "lf:aligned:blbf";
        cfg.thresholds = {x07, x10};
        cfg.threads = threads;
        const EvalReport rep = evaluate(packs, cfg);
        csv += std::to_string(g) + "," + fmt("%.6f", rep.average_reward) + "," + fmt("%.2f", rep.success_at(x07)) + "," +
               fmt("%.2f", rep.success_at(x10)) + "\n";
    }
    const fs::path path = out_dir / "hardness.csv";
    write_file_atomic(path, csv);
    m.outputs.push_back(path.string());
    m.config = evolve_config_json(flags.evolve, base, seed);
    m.config["runs"] = flags.runs;
    m.config["snapshot_every"] = flags.snapshot_every;
    m.config["policy"] = "lf:aligned:blbf";
    m.seeds["seed"] = seed;
    out << csv;
    return kExitOk;
}

// ---- export-voxels --------------------------------------------------------

int cmd_export_voxels(const fs::path& dataset, const fs::path& log_path, const fs::path& out_dir, Manifest& m,
                      std::ostream& out) {
    if (!fs::exists(log_path)) throw DataError("trajectory '" + log_path.string() + "' does not exist");
    TrajectoryLog log;
    try {
        log = parse_trajectory_log(read_file(log_path));
    } catch (const std::invalid_argument& e) {
        throw DataError(log_path.string() + ": " + e.what());
    }
    const PackDataset ds = load_or_fail(dataset);
    if (log.task >= ds.packs.size()) {
        throw DataError("trajectory task " + std::to_string(log.task) + " is not in the dataset");
    }
    const auto task = new_task(ds.packs[log.task]);
    Episode ep(task, log.mode);

    std::string index = "step,phase,action,occupied,cumulative_reward\n";
    auto dump = [&](std::uint32_t step) {
        const fs::path p = out_dir / indexed("step_", step, ".pbvx");
        write_file_atomic(p, encode_voxel_dump(ep.box(), step));
        m.outputs.push_back(p.string());
    };
    dump(0);
    Rational cumulative;
    for (std::size_t i = 0; i < log.actions.size(); ++i) {
        const Phase phase = ep.phase();
        StepResult r;
        try {
            r = ep.step(log.actions[i]);
        } catch (const std::exception& e) {
            throw DataError("step " + std::to_string(i) + ": " + e.what());
        }
        cumulative += r.reward;
        if (std::abs(r.reward_value() - log.rewards[i]) > 1e-9 || r.done != log.done[i]) {
            throw DataError("step " + std::to_string(i) + " does not reproduce the logged reward");
        }
        // Occupied voxels account for the whole logged reward.
        if (Rational(ep.box().count(), task->total_volume) != cumulative) {
            throw DataError("step " + std::to_string(i) + ": occupancy does not match the reward");
        }
        dump(static_cast<std::uint32_t>(i + 1));
        index += std::to_string(i + 1) + "," + std::string(to_string(phase)) + "," + std::to_string(log.actions[i]) + "," +
                 std::to_string(ep.box().count()) + "," + cumulative.to_string() + "\n";
    }
    write_file_atomic(out_dir / "steps.csv", index);
    m.outputs.push_back((out_dir / "steps.csv").string());
    m.config = {{"dataset", dataset.string()}, {"trajectory", log_path.string()}};
    out << "wrote " << log.actions.size() + 1 << " dumps to " << out_dir.string() << "\n";
    return kExitOk;
}

void put_u32(std::string& s, std::uint32_t v) {
    for (int i = 0; i < 4; ++i) s.push_back(static_cast<char>((v >> (8 * i)) & 0xFF));
}
void put_u64(std::string& s, std::uint64_t v) {
    for (int i = 0; i < 8; ++i) s.push_back(static_cast<char>((v >> (8 * i)) & 0xFF));
}
std::uint64_t get_le(std::string_view s, std::size_t at, int bytes) {
    std::uint64_t v = 0;
    for (int i = 0; i < bytes; ++i) v |= static_cast<std::uint64_t>(static_cast<unsigned char>(s[at + i])) << (8 * i);
    return v;
}

constexpr std::size_t kDumpHeader = 4 + 4 + 12 + 4 + 8;

}  // namespace

std::string trajectory_log_header(std::size_t task, Mode mode, const std::string& policy) {
    return "# task " + std::to_string(task) + " mode " + std::string(to_string(mode)) + " policy " + policy;
}

TrajectoryLog parse_trajectory_log(std::string_view text) {
    TrajectoryLog log;
    std::istringstream in{std::string(text)};
    std::string line;
    bool have_header = false;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        std::istringstream ls(line);
        if (line[0] == '#') {
            std::string hash, k_task, k_mode, mode, k_policy;
            ls >> hash >> k_task >> log.task >> k_mode >> mode >> k_policy >> log.policy;
            if (!ls || k_task != "task" || k_mode != "mode" || k_policy != "policy") {
                throw std::invalid_argument("malformed trajectory header '" + line + "'");
            }
            log.mode = parse_mode(mode);
            have_header = true;
            continue;
        }
        std::size_t step = 0;
        std::string phase;
        int action = 0, done = 0;
        double reward = 0;
        ls >> step >> phase >> action >> reward >> done;
        if (!ls || step != log.actions.size()) throw std::invalid_argument("malformed trajectory line '" + line + "'");
        log.actions.push_back(action);
        log.rewards.push_back(reward);
        log.done.push_back(done != 0);
    }
    if (!have_header) throw std::invalid_argument("trajectory log has no header");
    return log;
}

std::string encode_voxel_dump(const BoxOccupancy& box, std::uint32_t step) {
    constexpr std::size_t n = static_cast<std::size_t>(kVoxelsPerUnit) * kVoxelsPerUnit * kVoxelsPerUnit;
    std::string s(kVoxelDumpMagic);
    put_u32(s, 1);
    for (int i = 0; i < 3; ++i) put_u32(s, static_cast<std::uint32_t>(kVoxelsPerUnit));
    put_u32(s, step);
    put_u64(s, static_cast<std::uint64_t>(box.count()));
    std::string bits((n + 7) / 8, '\0');
    for (int x = 0; x < kVoxelsPerUnit; ++x) {
        for (int y = 0; y < kVoxelsPerUnit; ++y) {
            const RowBits col = box.column(x, y);
            if (col == 0) continue;
            for (int z = 0; z < kVoxelsPerUnit; ++z) {
                if ((col >> z) & 1) {
                    const std::size_t i = (static_cast<std::size_t>(x) * kVoxelsPerUnit + y) * kVoxelsPerUnit + z;
                    bits[i / 8] = static_cast<char>(bits[i / 8] | (1 << (i % 8)));
                }
            }
        }
    }
    return s + bits;
}

VoxelDump decode_voxel_dump(std::string_view bytes) {
    if (bytes.size() < kDumpHeader || bytes.substr(0, 4) != kVoxelDumpMagic) {
        throw std::invalid_argument("not a voxel dump");
    }
    if (get_le(bytes, 4, 4) != 1) throw std::invalid_argument("unsupported voxel dump version");
    VoxelDump d;
    d.dims = {static_cast<int>(get_le(bytes, 8, 4)), static_cast<int>(get_le(bytes, 12, 4)),
              static_cast<int>(get_le(bytes, 16, 4))};
    d.step = static_cast<std::uint32_t>(get_le(bytes, 20, 4));
    d.occupied = get_le(bytes, 24, 8);
    const std::size_t n = static_cast<std::size_t>(d.dims.x) * d.dims.y * d.dims.z;
    if (bytes.size() != kDumpHeader + (n + 7) / 8) throw std::invalid_argument("truncated voxel dump");
    d.cells.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
        d.cells[i] = static_cast<std::uint8_t>((static_cast<unsigned char>(bytes[kDumpHeader + i / 8]) >> (i % 8)) & 1);
    }
    return d;
}

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Irregular-shape packing benchmark: dataset generation, solving and evaluation", "packbench"};
    app.require_subcommand(1);
    app.set_version_flag("--version", std::string(kToolVersion));

    std::uint64_t seed = 0;
    int threads = 0;
    std::string out_dir = ".";
    auto common = [&](CLI::App* sub) {
        sub->add_option("--seed", seed, "Master seed");
        sub->add_option("--threads", threads, "Worker threads (0: all cores; capped by PACKBENCH_THREADS)");
        sub->add_option("--out", out_dir, "Output directory");
    };

    PoolFlags pool_flags;
    auto* gen_pool = app.add_subcommand("gen-pool", "Sample a procedural shape pool");
    add_pool_flags(*gen_pool, pool_flags);
    common(gen_pool);

    EvolveFlags evolve_flags;
    auto* evolve_cmd = app.add_subcommand("evolve", "Evolve packs and write a dataset");
    evolve_cmd->add_option("--packs", evolve_flags.packs, "Number of packs");
    add_evolve_flags(*evolve_cmd, evolve_flags);
    common(evolve_cmd);

    SolveFlags solve_flags;
    auto* solve_cmd = app.add_subcommand("solve", "Solve every task of a dataset and report");
    solve_cmd->add_option("--dataset", solve_flags.dataset, "Dataset file")->required();
    solve_cmd->add_option("--mode", solve_flags.mode, "vanilla or easy");
    solve_cmd->add_option("--policy", solve_flags.policy, "Phase policies, e.g. lf:aligned:blbf or lf:lowest");
    solve_cmd->add_option("--beams", solve_flags.beams, "Beam width");
    solve_cmd->add_option("--backtracks", solve_flags.backtracks, "Backtracking budget");
    solve_cmd->add_option("--node-budget", solve_flags.node_budget, "Cap on environment steps per task");
    solve_cmd->add_option("--success", solve_flags.success, "Success thresholds, e.g. 0.7")->delimiter(',');
    common(solve_cmd);

    HardnessFlags hardness_flags;
    auto* hardness_cmd = app.add_subcommand("hardness", "Heuristic reward against evolution generation");
    hardness_cmd->add_option("--runs", hardness_flags.runs, "Evolution instances");
    hardness_cmd->add_option("--snapshot-every", hardness_flags.snapshot_every, "Generations between snapshots");
    add_evolve_flags(*hardness_cmd, hardness_flags.evolve);
    common(hardness_cmd);

    std::string export_dataset, export_log;
    auto* export_cmd = app.add_subcommand("export-voxels", "Dump the box occupancy after every step of a trajectory");
    export_cmd->add_option("--dataset", export_dataset, "Dataset file")->required();
    export_cmd->add_option("--trajectory", export_log, "Trajectory log written by solve")->required();
    common(export_cmd);

    std::vector<const char*> argv{"packbench"};
    for (const auto& a : args) argv.push_back(a.c_str());
    try {
        app.parse(static_cast<int>(argv.size()), argv.data());
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? kExitOk : kExitConfig;
    }

    Manifest m;
    m.args = args;
    const fs::path dir(out_dir);
    try {
        const int workers = resolve_threads(threads);
        int code = kExitOk;
        if (gen_pool->parsed()) {
            m.command = "gen-pool";
            code = cmd_gen_pool(pool_flags, seed, dir, m, out);
        } else if (evolve_cmd->parsed()) {
            m.command = "evolve";
            apply_paper_scale(*evolve_cmd, evolve_flags);
            code = cmd_evolve(evolve_flags, seed, workers, dir, m, out);
        } else if (solve_cmd->parsed()) {
            m.command = "solve";
            code = cmd_solve(solve_flags, seed, workers, dir, m, out);
        } else if (hardness_cmd->parsed()) {
            m.command = "hardness";
            apply_paper_scale(*hardness_cmd, hardness_flags.evolve);
            code = cmd_hardness(hardness_flags, seed, workers, dir, m, out);
        } else {
            m.command = "export-voxels";
            code = cmd_export_voxels(export_dataset, export_log, dir, m, out);
        }
        m.write(dir);
        return code;
    } catch (const ConfigError& e) {
        err << "error: " << e.what() << "\n";
        return kExitConfig;
    } catch (const DataError& e) {
        err << "error: " << e.what() << "\n";
        return kExitData;
    } catch (const DatasetError& e) {
        err << "error: " << e.what() << "\n";
        return kExitData;
    } catch (const TaskError& e) {
        err << "error: " << e.what() << "\n";
        return kExitData;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return kExitData;
    }
}

}  // namespace packbench
