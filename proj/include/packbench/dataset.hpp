#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "packbench/packing.hpp"

namespace packbench {

inline constexpr int kDatasetVersion = 1;

/// Line-oriented pack dataset. The first line is a header object
///   {"format":"packbench-dataset","version":1,"generator":{...}}
/// and every following line one pack record
///   {"version":1,"seed":S,"pool":[...],"placements":[{"shape_idx":i,
///    "scale":"p/q","rotation":r,"anchor":[gx,gy,gz]}],"density":"p/q",
///    "generations_run":G}
struct PackDataset {
    /// Free-form generator description (a JSON object in text form).
    std::string generator = "{}";
    std::vector<Pack> packs;
};

/// Raised for unreadable or inconsistent dataset files. line is 1-based
/// (0 when unknown); pack is the record index or -1.
class DatasetError : public std::runtime_error {
public:
    DatasetError(const std::string& what, int line, int pack)
        : std::runtime_error(what), line_(line), pack_(pack) {}
    [[nodiscard]] int line() const { return line_; }
    [[nodiscard]] int pack() const { return pack_; }

private:
    int line_;
    int pack_;
};

std::string serialize_dataset(const PackDataset& ds);
/// Parses and validates: every density is recomputed and every pack is
/// replayed to full reward.
PackDataset parse_dataset(std::string_view text);

void save_dataset(const PackDataset& ds, const std::filesystem::path& path);
PackDataset load_dataset(const std::filesystem::path& path);

/// One record line (no trailing newline).
std::string pack_to_json_line(const Pack& p);
Pack pack_from_json_line(std::string_view line);

/// Writes to a temporary sibling and renames into place.
void write_file_atomic(const std::filesystem::path& path, std::string_view content);

}  // namespace packbench
