#pragma once

#include <stdexcept>
#include <string>
#include <vector>

#include "dwlab/classify.hpp"
#include "dwlab/evolve.hpp"
#include "dwlab/io.hpp"
#include "dwlab/lattice.hpp"
#include "dwlab/relax.hpp"

// Plain-text key=value run configuration.  One key per line, `#` starts a
// comment, unknown and duplicate keys are rejected with line numbers, and
// write_config(read_config(text)) reproduces the canonical form losslessly.

namespace dwlab {

enum class RelaxTarget { kink, antikink, psi_plus, psi_minus, molecule, all };
enum class RelaxMethodChoice { stochastic, gradient_flow, hybrid };

struct RunConfig {
  int schema_version = 1;
  double lambda = 1.0;

  Grid grid{-40.0, 40.0, 1601};        // evolution grid
  Grid relax_grid{-20.0, 20.0, 801};   // static-solver grid

  RelaxTarget relax_kind = RelaxTarget::kink;
  RelaxMethodChoice relax_method = RelaxMethodChoice::hybrid;
  RelaxationSchedule schedule;

  double flow_step = 0.0;  // 0 = auto (0.4 dx^2 on the relax grid)
  double flow_tol = 1e-10;
  long flow_max_iters = 2000000;

  EvolveConfig evolve;

  // Collision profiles are named, not serialized; "mirror" builds the right
  // profile by reflecting the relaxed left one.  The dressed (psi_plus)
  // branch is the default partner: it is the true minimum for lambda < 2.
  RelaxTarget collision_left = RelaxTarget::psi_plus;
  std::string collision_right = "mirror";
  double x_left = -10.0, x_right = 10.0;
  double v_left = 0.6, v_right = -0.6;

  ClassifierThresholds thresholds;

  std::vector<double> scan_v;  // scan.v_values, comma separated
  int scan_workers = 0;        // 0 = hardware concurrency

  HeatmapSpec heatmap;

  bool operator==(const RunConfig& o) const;
};

// Thrown with a message that carries the offending line number.
struct ConfigError : std::runtime_error {
  explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

RunConfig read_config(const std::string& text,
                      const std::vector<std::string>& overrides = {});
std::string write_config(const RunConfig& cfg);

const char* relax_target_name(RelaxTarget k);
const char* relax_method_name(RelaxMethodChoice m);

}  // namespace dwlab
