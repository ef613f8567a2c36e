// Deterministic SVG line plots over trace tables.
#pragma once

#include "fods/experiments/csv.hpp"

#include <string>
#include <vector>

namespace fods::experiments {

// Plots the named columns of `trace` against its time axis (column "t" when
// present, otherwise "k"). Unknown channel names raise ConfigError; a table
// with no rows yields an empty-axes plot. Output depends only on the inputs.
std::string render_svg_text(const Table& trace, const std::vector<std::string>& channels);

// Reads the trace CSV at `csv_path`, renders `channels` (empty = every
// non-axis column), and writes the plot next to the CSV (extension swapped to
// .svg) or to `out_path` when given. Returns the written path.
std::string render_svg(const std::string& csv_path, const std::vector<std::string>& channels,
                       const std::string& out_path = "");

}  // namespace fods::experiments
