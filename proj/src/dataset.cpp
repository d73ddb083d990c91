#include "packbench/dataset.hpp"

#include <fstream>
#include <sstream>

#include <json.hpp>

#include "packbench/env.hpp"
#include "packbench/policies.hpp"

namespace packbench {

namespace {

using Json = nlohmann::ordered_json;

constexpr std::string_view kFormat = "packbench-dataset";

Json shape_to_json(const ShapeSpec& s) {
    Json j;
    j["id"] = s.id;
    j["kind"] = std::string(to_string(s.kind));
    if (s.kind == ShapeKind::MeshFile) {
        j["path"] = s.mesh_path;
    } else {
        j["params"] = s.params;
    }
    j["seed"] = s.seed;
    return j;
}

ShapeSpec shape_from_json(const Json& j) {
    ShapeSpec s;
    s.id = j.at("id").get<std::string>();
    s.kind = parse_shape_kind(j.at("kind").get<std::string>());
    if (s.kind == ShapeKind::MeshFile) {
        s.mesh_path = j.at("path").get<std::string>();
    } else {
        s.params = j.at("params").get<std::vector<double>>();
    }
    s.seed = j.at("seed").get<std::uint64_t>();
    s.validate();
    return s;
}

Json pack_to_json(const Pack& p) {
    Json j;
    j["version"] = kDatasetVersion;
    j["seed"] = p.seed;
    Json pool = Json::array();
    for (const auto& s : p.pool) pool.push_back(shape_to_json(s));
    j["pool"] = std::move(pool);
    Json placements = Json::array();
    for (const auto& pl : p.placements) {
        Json e;
        e["shape_idx"] = pl.shape_idx;
        e["scale"] = pl.scale.volume_ratio().to_string();
        e["rotation"] = pl.rotation;
        e["anchor"] = {pl.anchor.gx, pl.anchor.gy, pl.anchor.gz};
        placements.push_back(std::move(e));
    }
    j["placements"] = std::move(placements);
    j["density"] = p.density.to_string();
    j["generations_run"] = p.generations_run;
    return j;
}

Pack pack_from_json(const Json& j) {
    const int version = j.at("version").get<int>();
    if (version != kDatasetVersion) {
        throw std::invalid_argument("record version " + std::to_string(version) + " is not supported (expected " +
                                    std::to_string(kDatasetVersion) + ")");
    }
    Pack p;
    p.seed = j.at("seed").get<std::uint64_t>();
    for (const auto& s : j.at("pool")) p.pool.push_back(shape_from_json(s));
    for (const auto& e : j.at("placements")) {
        Placement pl;
        pl.shape_idx = e.at("shape_idx").get<int>();
        if (pl.shape_idx < 0 || static_cast<std::size_t>(pl.shape_idx) >= p.pool.size()) {
            throw std::invalid_argument("shape_idx " + std::to_string(pl.shape_idx) + " out of range");
        }
        pl.scale = ScaleFactor::from_ratio(Rational::parse(e.at("scale").get<std::string>()));
        pl.rotation = e.at("rotation").get<int>();
        if (pl.rotation < 0 || pl.rotation >= kRotationCount) throw std::invalid_argument("rotation out of range");
        const auto& a = e.at("anchor");
        if (!a.is_array() || a.size() != 3) throw std::invalid_argument("anchor must be [gx, gy, gz]");
        pl.anchor = {a[0].get<int>(), a[1].get<int>(), a[2].get<int>()};
        p.placements.push_back(pl);
    }
    p.density = Rational::parse(j.at("density").get<std::string>());
    p.generations_run = j.at("generations_run").get<int>();
    return p;
}

// Recomputes the density and replays the ground-truth actions to reward 1.
void validate_pack(const Pack& p) {
    const ShapeCatalog catalog(p.pool);
    const Rational recomputed = density(p, catalog);
    if (recomputed != p.density) {
        throw std::invalid_argument("density " + p.density.to_string() + " does not match recomputed " +
                                    recomputed.to_string());
    }
    if (p.placements.empty()) return;
    const auto task = new_task(p, catalog);
    const Trajectory t = replay_actions(task, Mode::Vanilla, ground_truth_actions(*task));
    if (t.cumulative != Rational(1) || !t.steps.back().done) {
        throw std::invalid_argument("replay reached reward " + t.cumulative.to_string() + " instead of 1");
    }
}

}  // namespace

std::string pack_to_json_line(const Pack& p) { return pack_to_json(p).dump(); }

Pack pack_from_json_line(std::string_view line) { return pack_from_json(Json::parse(line)); }

std::string serialize_dataset(const PackDataset& ds) {
    Json header;
    header["format"] = std::string(kFormat);
    header["version"] = kDatasetVersion;
    header["generator"] = Json::parse(ds.generator);
    std::string out = header.dump() + "\n";
    for (const auto& p : ds.packs) out += pack_to_json_line(p) + "\n";
    return out;
}

PackDataset parse_dataset(std::string_view text) {
    PackDataset ds;
    std::istringstream in{std::string(text)};
    std::string line;
    int line_no = 0;
    bool have_header = false;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) continue;
        if (!have_header) {
            try {
                const Json header = Json::parse(line);
                if (header.at("format").get<std::string>() != kFormat) {
                    throw DatasetError("not a packbench dataset", line_no, -1);
                }
                const int version = header.at("version").get<int>();
                if (version != kDatasetVersion) {
                    throw DatasetError("dataset version " + std::to_string(version) + " is not supported (expected " +
                                           std::to_string(kDatasetVersion) + ")",
                                       line_no, -1);
                }
                ds.generator = header.at("generator").dump();
            } catch (const nlohmann::json::exception& e) {
                throw DatasetError("line " + std::to_string(line_no) + ": malformed header: " + e.what(), line_no, -1);
            }
            have_header = true;
            continue;
        }
        const int index = static_cast<int>(ds.packs.size());
        Pack p;
        try {
            p = pack_from_json_line(line);
        } catch (const std::exception& e) {
            throw DatasetError("line " + std::to_string(line_no) + ": malformed record: " + e.what(), line_no, index);
        }
        try {
            validate_pack(p);
        } catch (const std::exception& e) {
            throw DatasetError("pack " + std::to_string(index) + " (line " + std::to_string(line_no) +
                                   "): " + e.what(),
                               line_no, index);
        }
        ds.packs.push_back(std::move(p));
    }
    if (!have_header) throw DatasetError("dataset has no header line", 0, -1);
    return ds;
}

void write_file_atomic(const std::filesystem::path& path, std::string_view content) {
    if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
    const auto tmp = std::filesystem::path(path.string() + ".tmp");
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw std::runtime_error("cannot write '" + tmp.string() + "'");
        out.write(content.data(), static_cast<std::streamsize>(content.size()));
        if (!out) throw std::runtime_error("short write to '" + tmp.string() + "'");
    }
    std::filesystem::rename(tmp, path);
}

void save_dataset(const PackDataset& ds, const std::filesystem::path& path) {
    write_file_atomic(path, serialize_dataset(ds));
}

PackDataset load_dataset(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw DatasetError("cannot open dataset '" + path.string() + "'", 0, -1);
    std::stringstream buf;
    buf << in.rdbuf();
    return parse_dataset(buf.str());
}

}  // namespace packbench
