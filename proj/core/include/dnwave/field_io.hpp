#pragma once

// CSV snapshots with JSON sidecars.
//
// CSV: header `z_tangential,z_normal,value` (two-dimensional grids) or
// `z_normal,value` (one-dimensional grids), one row per cell, tangential
// index outer and normal index inner. Values are written with 17
// significant digits so files round-trip bit-exactly.
//
// Sidecar: {"time": t, "m": m, "p": p, "grid": {...}}.

#include <filesystem>
#include <string>

#include <nlohmann/json.hpp>

#include "dnwave/grid.hpp"

namespace dnwave {

nlohmann::json grid_to_json(const HalfSpaceGrid& grid);
HalfSpaceGrid grid_from_json(const nlohmann::json& j);

void write_field_csv(const std::filesystem::path& path, const ScalarField& field);
/// Reads values for `grid`; throws GridError on header or row-count mismatch.
ScalarField read_field_csv(const std::filesystem::path& path, const HalfSpaceGrid& grid,
                           double time = 0.0);

/// Writes `<stem>_t<time>.csv` and `<stem>_t<time>.json` into `dir`; returns the CSV path.
std::filesystem::path write_snapshot(const std::filesystem::path& dir, const std::string& stem,
                                     const ScalarField& field, const ModelParams& params);
/// Reads a snapshot written by write_snapshot from its CSV path.
ScalarField read_snapshot(const std::filesystem::path& csv_path);

/// Writes every snapshot of a sequence; returns the CSV paths.
std::vector<std::filesystem::path> write_sequence(const std::filesystem::path& dir,
                                                  const std::string& stem,
                                                  const FieldSequence& seq,
                                                  const ModelParams& params);

/// Fixed-format time tag used in snapshot file names.
std::string time_tag(double time);

void write_json(const std::filesystem::path& path, const nlohmann::json& j);

}  // namespace dnwave
