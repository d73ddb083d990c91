#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include "packbench/env.hpp"
#include "packbench/evolution.hpp"

namespace packbench {

inline constexpr std::string_view kToolVersion = "0.1.0";

/// Process exit codes.
enum ExitCode : int { kExitOk = 0, kExitConfig = 1, kExitData = 2 };

/// Entry point of the `packbench` tool. args excludes the program name.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

/// Header line of a trajectory log, e.g. "# task 3 mode vanilla policy lf:aligned:blbf".
std::string trajectory_log_header(std::size_t task, Mode mode, const std::string& policy);

struct TrajectoryLog {
    std::size_t task = 0;
    Mode mode = Mode::Vanilla;
    std::string policy;
    std::vector<int> actions;
    std::vector<double> rewards;
    std::vector<bool> done;
};

TrajectoryLog parse_trajectory_log(std::string_view text);

/// Dense occupancy dump:
///   bytes 0-3   magic "PBVX"
///   uint32      format version (1)
///   uint32 x3   dims (100, 100, 100)
///   uint32      step index
///   uint64      occupied voxel count
///   bits        cell (x*100 + y)*100 + z at byte i/8, bit i%8 (LSB first)
/// All integers little-endian.
inline constexpr std::string_view kVoxelDumpMagic = "PBVX";
std::string encode_voxel_dump(const BoxOccupancy& box, std::uint32_t step);

struct VoxelDump {
    Dims dims;
    std::uint32_t step = 0;
    std::uint64_t occupied = 0;
    std::vector<std::uint8_t> cells;
};
VoxelDump decode_voxel_dump(std::string_view bytes);

}  // namespace packbench
