#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "packbench/cli.hpp"
#include "packbench/dataset.hpp"

using namespace packbench;
namespace fs = std::filesystem;

namespace {

struct TempDir {
    fs::path path;
    explicit TempDir(const std::string& name) : path(fs::temp_directory_path() / name) {
        fs::remove_all(path);
        fs::create_directories(path);
    }
    ~TempDir() { fs::remove_all(path); }
};

int run(const std::vector<std::string>& args, std::string* out_text = nullptr) {
    std::ostringstream out, err;
    const int code = run_cli(args, out, err);
    if (out_text) *out_text = out.str();
    return code;
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    return {std::istreambuf_iterator<char>(in), {}};
}

std::vector<std::string> small_evolve(const fs::path& out, const std::string& seed) {
    return {"evolve",       "--packs",      "2",  "--pool-size", "6",   "--population", "8", "--generations",
            "6",            "--seed",       seed, "--out",       out.string()};
}

}  // namespace

TEST_CASE("exit codes") {
    TempDir dir("packbench_cli_codes");
    CHECK(run({"--help"}) == kExitOk);
    CHECK(run({}) == kExitConfig);
    CHECK(run({"frobnicate"}) == kExitConfig);
    CHECK(run({"evolve", "--population", "-3", "--out", dir.path.string()}) == kExitConfig);
    CHECK(run({"evolve", "--packs", "1", "--population", "8", "--elite", "6", "--lucky", "6", "--out",
               dir.path.string()}) == kExitConfig);
    CHECK(run({"solve", "--dataset", (dir.path / "missing.jsonl").string(), "--out", dir.path.string()}) == kExitData);

    const auto garbage = dir.path / "garbage.jsonl";
    std::ofstream(garbage) << "not json\n";
    CHECK(run({"solve", "--dataset", garbage.string(), "--out", dir.path.string()}) == kExitData);

    REQUIRE(run(small_evolve(dir.path / "ds", "1")) == kExitOk);
    const auto ds = (dir.path / "ds" / "dataset.jsonl").string();
    CHECK(run({"solve", "--dataset", ds, "--policy", "lf:lowest", "--out", dir.path.string()}) == kExitConfig);
    CHECK(run({"solve", "--dataset", ds, "--beams", "2", "--backtracks", "2", "--out", dir.path.string()}) ==
          kExitConfig);
    CHECK(run({"solve", "--dataset", ds, "--success", "1.5", "--out", dir.path.string()}) == kExitConfig);
}

TEST_CASE("evolve is deterministic and writes traces and a manifest") {
    TempDir dir("packbench_cli_evolve");
    REQUIRE(run(small_evolve(dir.path / "a", "9")) == kExitOk);
    REQUIRE(run(small_evolve(dir.path / "b", "9")) == kExitOk);
    REQUIRE(run(small_evolve(dir.path / "c", "10")) == kExitOk);
    const auto a = slurp(dir.path / "a" / "dataset.jsonl");
    CHECK(a == slurp(dir.path / "b" / "dataset.jsonl"));
    CHECK(a != slurp(dir.path / "c" / "dataset.jsonl"));
    CHECK(load_dataset(dir.path / "a" / "dataset.jsonl").packs.size() == 2);

    std::istringstream trace(slurp(dir.path / "a" / "traces" / "pack_0000.csv"));
    std::string line;
    std::getline(trace, line);
    CHECK(line == "generation,best_fitness,mean_fitness,best_exact");
    double prev = -1;
    int rows = 0;
    while (std::getline(trace, line)) {
        const double best = std::stod(line.substr(line.find(',') + 1));
        CHECK(best >= prev);
        prev = best;
        ++rows;
    }
    CHECK(rows >= 1);

    const auto manifest = nlohmann::json::parse(slurp(dir.path / "a" / "evolve.manifest.json"));
    CHECK(manifest["command"] == "evolve");
    CHECK(manifest["tool_version"] == std::string(kToolVersion));
    CHECK(manifest.contains("seeds"));
    CHECK(manifest.contains("outputs"));
}

TEST_CASE("solve, trajectory logs and voxel export") {
    TempDir dir("packbench_cli_solve");
    REQUIRE(run(small_evolve(dir.path / "ds", "3")) == kExitOk);
    const auto ds = (dir.path / "ds" / "dataset.jsonl").string();
    std::string table;
    REQUIRE(run({"solve", "--dataset", ds, "--out", (dir.path / "s").string()}, &table) == kExitOk);
    CHECK(table.find("lf:aligned:blbf") != std::string::npos);
    const auto report = nlohmann::json::parse(slurp(dir.path / "s" / "report.json"));
    CHECK(report["task_count"] == 2);

    const auto log_path = dir.path / "s" / "trajectories" / "task_0000.log";
    const auto log = parse_trajectory_log(slurp(log_path));
    CHECK(log.task == 0);
    CHECK(log.mode == Mode::Vanilla);
    REQUIRE_FALSE(log.actions.empty());
    CHECK(log.done.back());
    CHECK_THROWS_AS(parse_trajectory_log("garbage"), std::invalid_argument);

    REQUIRE(run({"export-voxels", "--dataset", ds, "--trajectory", log_path.string(), "--out",
                 (dir.path / "v").string()}) == kExitOk);
    const auto first = decode_voxel_dump(slurp(dir.path / "v" / "step_0000.pbvx"));
    CHECK(first.dims == Dims{100, 100, 100});
    CHECK(first.occupied == 0);
    std::uint64_t last_occupied = 0;
    for (std::size_t s = 0; s <= log.actions.size(); ++s) {
        char name[32];
        std::snprintf(name, sizeof name, "step_%04zu.pbvx", s);
        const auto bytes = slurp(dir.path / "v" / name);
        REQUIRE(bytes.substr(0, 4) == std::string(kVoxelDumpMagic));
        const auto dump = decode_voxel_dump(bytes);
        CHECK(dump.step == s);
        CHECK(dump.occupied >= last_occupied);
        std::uint64_t counted = 0;
        for (const auto c : dump.cells) counted += c;
        CHECK(counted == dump.occupied);
        last_occupied = dump.occupied;
    }
    CHECK(last_occupied > 0);
    CHECK_THROWS(decode_voxel_dump("XXXX"));
}

TEST_CASE("voxel dumps round-trip") {
    const auto g = VoxelGrid(Dims{3, 2, 5}, std::vector<std::uint8_t>(30, 1));
    const auto box = place(BoxOccupancy(), g, {0, ScaleFactor(), 0, {1, 2, 3}});
    const auto dump = decode_voxel_dump(encode_voxel_dump(box, 7));
    CHECK(dump.step == 7);
    CHECK(dump.occupied == 30);
    CHECK(dump.cells == box.dense());
}

TEST_CASE("trajectory log header") {
    CHECK(trajectory_log_header(3, Mode::Vanilla, "lf:aligned:blbf") == "# task 3 mode vanilla policy lf:aligned:blbf");
}
