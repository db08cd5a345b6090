#pragma once

#include <optional>
#include <string>
#include <vector>

#include "dwlab/evolve.hpp"
#include "dwlab/lattice.hpp"

// Outcome classification from topological charge-density trajectories:
// the quantitative stand-in for reading red/blue charge stripes off a
// space-time plot.  A charged object is a contiguous same-sign lump of
// smoothed J^0 carrying enough net charge; neutral radiation ripples fail
// the net-charge test no matter how large their local |J^0| is.

namespace dwlab {

// Half the tanh(1)-crossing width of the lambda = 0 kink, 1/sqrt(2).
inline constexpr double kKinkHalfWidth = 0.7071067811865476;

struct ClassifierThresholds {
  double noise_floor = 1e-3;                      // on peak |J^0|
  double capture_radius = 4.0 * kKinkHalfWidth;   // bound-pair separation scale
  double persistence_fraction = 0.2;              // tail window of the run
  double oscillation_amplitude = 0.05;            // internal-mode field swing
  int min_oscillations = 3;                       // bound-phase separation cycles
  double presence_charge = 0.5;                   // net lump charge for presence
  double decay_ratio = 0.5;                       // late/early oscillation ratio
};

struct ChargeTrack {
  std::vector<double> times;
  // Charge-weighted centroid of the dominant positive / negative lump;
  // NaN where the lump is absent.
  std::vector<double> positive_position, negative_position;
  std::vector<double> positive_peak, negative_peak;  // max |J^0| in the lump
  std::vector<double> positive_charge, negative_charge;  // net lump charge
  std::vector<char> positive_present, negative_present;
};

ChargeTrack track_charges(const Trajectory& traj, const ClassifierThresholds& th);

enum class Outcome { scatter, annihilate, capture, excitation_decay, undecided };

std::string outcome_name(Outcome o);

struct OutcomeRecord {
  Outcome outcome = Outcome::undecided;
  double final_Q = 0.0;
  std::optional<double> outgoing_speed_positive;  // signed, fitted over the tail
  std::optional<double> outgoing_speed_negative;
  std::optional<double> oscillation_period;       // capture only
  double radiated_energy_fraction = 0.0;
  double asymmetry_index = 0.0;
  bool breather_like = false;
};

// Max over snapshots of ||H(x) - H(mirrored x)||_L2 / E_total, mirroring
// about the domain midpoint.
double asymmetry_index(const Trajectory& traj, const ModelParams& m);

OutcomeRecord classify_outcome(const Trajectory& traj, const ChargeTrack& track,
                               const ClassifierThresholds& th, const ModelParams& m);

struct ScanEntry {
  double v = 0.0;
  OutcomeRecord record;
};

struct ScanResult {
  std::vector<ScanEntry> entries;  // ascending v
  std::optional<double> v1_estimate;  // edge of the low-v annihilation band
  std::optional<double> v1_error;     // half the local scan spacing
};

// Runs one collision per velocity (symmetric +-v) on a worker pool and
// classifies each; deterministic regardless of worker count.
ScanResult velocity_scan(const std::vector<double>& velocities,
                         const CollisionSetup& base, const Grid& grid,
                         const ModelParams& m, const EvolveConfig& cfg,
                         const ClassifierThresholds& th, int workers);

}  // namespace dwlab
