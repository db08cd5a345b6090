#pragma once

#include <string>
#include <vector>

#include "dwlab/classify.hpp"
#include "dwlab/evolve.hpp"
#include "dwlab/lattice.hpp"

// Deterministic serialization: CSV with 17 significant digits and LF line
// endings, plus P6 PPM charge/energy heatmaps.  Identical inputs always
// produce byte-identical outputs.

namespace dwlab {

enum class HeatmapQuantity { charge_density, energy_density };

struct HeatmapSpec {
  HeatmapQuantity quantity = HeatmapQuantity::charge_density;
  double limit = 0.0;  // color-scale max; 0 = symmetric max|value| from data
  int x_stride = 1;
  int t_stride = 1;
};

// Full-precision decimal; round-trips any finite double exactly.
std::string format_double(double v);

std::string format_timeseries(const std::vector<DiagnosticsSample>& rows);

std::string format_snapshot(const FieldState& s);
FieldState read_snapshot(const std::string& text);

std::string format_outcome(const OutcomeRecord& rec);

std::string format_track(const ChargeTrack& track);

// P6, maxval 255; rows = time increasing downward, columns = x; value 0 is
// white, +limit pure red, -limit pure blue, linear in between.
std::string render_heatmap(const Trajectory& traj, const HeatmapSpec& spec,
                           const ModelParams& m);

void write_file(const std::string& path, const std::string& content);
std::string read_file(const std::string& path);

}  // namespace dwlab
