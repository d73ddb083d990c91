#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "packbench/dataset.hpp"
#include "packbench/evolution.hpp"

using namespace packbench;

namespace {

PackDataset sample_dataset(int n) {
    PackDataset ds;
    ds.generator = R"({"pool_size":6,"seed":1})";
    PoolSpec ps;
    ps.pool_size = 6;
    EvolutionConfig cfg;
    cfg.population = 8;
    cfg.elite = 2;
    cfg.lucky = 2;
    cfg.max_generations = 3;
    for (int i = 0; i < n; ++i) {
        ps.seed = 50 + static_cast<std::uint64_t>(i);
        cfg.seed = ps.seed;
        ds.packs.push_back(evolve(sample_pool(ps), cfg).best);
    }
    return ds;
}

std::vector<std::string> split_lines(const std::string& text) {
    std::vector<std::string> lines;
    std::istringstream in(text);
    for (std::string l; std::getline(in, l);) lines.push_back(l);
    return lines;
}

std::string join_lines(const std::vector<std::string>& lines) {
    std::string out;
    for (const auto& l : lines) out += l + "\n";
    return out;
}

void replace_once(std::string& s, const std::string& from, const std::string& to) {
    const auto pos = s.find(from);
    REQUIRE(pos != std::string::npos);
    s.replace(pos, from.size(), to);
}

}  // namespace

TEST_CASE("datasets round-trip byte for byte") {
    const auto ds = sample_dataset(3);
    const auto text = serialize_dataset(ds);
    const auto back = parse_dataset(text);
    CHECK(back.packs == ds.packs);
    CHECK(serialize_dataset(back) == text);
    CHECK(split_lines(text).size() == 4);

    const auto path = std::filesystem::temp_directory_path() / "packbench_test_dataset.jsonl";
    save_dataset(ds, path);
    CHECK(load_dataset(path).packs == ds.packs);
    std::ifstream in(path);
    CHECK(std::string(std::istreambuf_iterator<char>(in), {}) == text);
    std::filesystem::remove(path);
    CHECK_THROWS_AS(load_dataset(path), DatasetError);

    for (const auto& p : ds.packs) CHECK(pack_from_json_line(pack_to_json_line(p)) == p);
}

TEST_CASE("tampered datasets are rejected with their location") {
    const auto ds = sample_dataset(3);
    auto lines = split_lines(serialize_dataset(ds));

    SUBCASE("density") {
        auto bad = lines;
        const auto d = ds.packs[1].density;
        replace_once(bad[2], "\"density\":\"" + d.to_string() + "\"",
                     "\"density\":\"" + (d + Rational(1, 1'000'000)).to_string() + "\"");
        try {
            (void)parse_dataset(join_lines(bad));
            FAIL("accepted a wrong density");
        } catch (const DatasetError& e) {
            CHECK(e.line() == 3);
            CHECK(e.pack() == 1);
        }
    }
    SUBCASE("anchor") {
        auto bad = lines;
        const auto& a = ds.packs[2].placements.back().anchor;
        const std::string from = "\"anchor\":[" + std::to_string(a.gx) + "," + std::to_string(a.gy) + "," +
                                 std::to_string(a.gz) + "]";
        const std::string to = "\"anchor\":[" + std::to_string(a.gx) + "," + std::to_string(a.gy) + "," +
                               std::to_string(a.gz == 0 ? 1 : a.gz - 1) + "]";
        replace_once(bad[3], from, to);
        try {
            (void)parse_dataset(join_lines(bad));
            FAIL("accepted a moved anchor");
        } catch (const DatasetError& e) {
            CHECK(e.line() == 4);
            CHECK(e.pack() == 2);
        }
    }
    SUBCASE("version") {
        auto bad = lines;
        replace_once(bad[0], "\"version\":1", "\"version\":2");
        CHECK_THROWS_AS(parse_dataset(join_lines(bad)), DatasetError);
    }
    SUBCASE("malformed record") {
        auto bad = lines;
        bad[1] = bad[1].substr(0, bad[1].size() / 2);
        try {
            (void)parse_dataset(join_lines(bad));
            FAIL("accepted a truncated record");
        } catch (const DatasetError& e) {
            CHECK(e.line() == 2);
            CHECK(e.pack() == 0);
        }
    }
    SUBCASE("missing header") {
        auto bad = lines;
        bad.erase(bad.begin());
        CHECK_THROWS_AS(parse_dataset(join_lines(bad)), DatasetError);
        CHECK_THROWS_AS(parse_dataset(""), DatasetError);
    }
}

TEST_CASE("atomic writes replace the file") {
    const auto path = std::filesystem::temp_directory_path() / "packbench_test_atomic.txt";
    write_file_atomic(path, "one");
    write_file_atomic(path, "two");
    std::ifstream in(path);
    CHECK(std::string(std::istreambuf_iterator<char>(in), {}) == "two");
    std::filesystem::remove(path);
}
