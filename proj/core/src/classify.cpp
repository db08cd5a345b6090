#include "dwlab/classify.hpp"

#include <algorithm>
#include <atomic>
#include <mutex>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <thread>

namespace dwlab {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

std::vector<double> box_smooth(const std::vector<double>& f, int hw) {
  const int n = static_cast<int>(f.size());
  std::vector<double> out(f.size());
  for (int i = 0; i < n; ++i) {
    const int a = std::max(0, i - hw);
    const int b = std::min(n - 1, i + hw);
    double s = 0.0;
    for (int j = a; j <= b; ++j) s += f[j];
    out[i] = s / (b - a + 1);
  }
  return out;
}

struct Lump {
  bool present = false;
  double position = kNaN;
  double peak = 0.0;
  double charge = 0.0;
};

// Dominant contiguous same-sign lump of the smoothed charge density.
// Radiation ripples carry large local |J^0| but near-zero net charge,
// so presence demands both a peak above the noise floor and enough net
// charge inside the lump.
Lump find_lump(const std::vector<double>& j, const Grid& g, int sign,
               const ClassifierThresholds& th) {
  const int n = g.n;
  Lump lump;
  int imax = -1;
  double best = 0.0;
  for (int i = 0; i < n; ++i) {
    const double v = sign * j[i];
    if (v > best) {
      best = v;
      imax = i;
    }
  }
  if (imax < 0 || best < th.noise_floor) return lump;
  int lo = imax, hi = imax;
  while (lo > 0 && sign * j[lo - 1] > 0.0) --lo;
  while (hi < n - 1 && sign * j[hi + 1] > 0.0) ++hi;
  double q = 0.0, xq = 0.0;
  for (int i = lo; i <= hi; ++i) {
    const double w = (i == lo || i == hi) ? 0.5 : 1.0;
    q += w * j[i];
    xq += w * j[i] * g.x(i);
  }
  q *= g.dx();
  xq *= g.dx();
  if (sign * q < th.presence_charge) return lump;
  lump.present = true;
  lump.peak = best;
  lump.charge = q;
  lump.position = xq / q;
  return lump;
}

double interp_at(const std::vector<double>& f, const Grid& g, double x) {
  double t = (x - g.x_min) / g.dx();
  if (t <= 0.0) return f.front();
  if (t >= g.n - 1) return f.back();
  const int j = std::min(static_cast<int>(t), g.n - 2);
  const double frac = t - j;
  return f[j] + frac * (f[j + 1] - f[j]);
}

// Least-squares slope of y over x.
double fit_slope(const std::vector<double>& x, const std::vector<double>& y) {
  const size_t n = x.size();
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (size_t i = 0; i < n; ++i) {
    sx += x[i];
    sy += y[i];
    sxx += x[i] * x[i];
    sxy += x[i] * y[i];
  }
  const double d = n * sxx - sx * sx;
  return d == 0.0 ? 0.0 : (n * sxy - sx * sy) / d;
}

// Half the peak-to-peak swing after removing a straight-line trend.
double detrended_amplitude(const std::vector<double>& t, const std::vector<double>& y) {
  if (y.size() < 4) return 0.0;
  const double slope = fit_slope(t, y);
  double mt = 0, my = 0;
  for (size_t i = 0; i < y.size(); ++i) {
    mt += t[i];
    my += y[i];
  }
  mt /= y.size();
  my /= y.size();
  double lo = 0.0, hi = 0.0;
  for (size_t i = 0; i < y.size(); ++i) {
    const double r = y[i] - (my + slope * (t[i] - mt));
    lo = std::min(lo, r);
    hi = std::max(hi, r);
  }
  return 0.5 * (hi - lo);
}

std::vector<size_t> local_maxima(const std::vector<double>& y, double prominence) {
  std::vector<size_t> peaks;
  for (size_t i = 1; i + 1 < y.size(); ++i) {
    if (!(y[i] >= y[i - 1] && y[i] > y[i + 1])) continue;
    double left = y[i], right = y[i];
    for (size_t j = i; j-- > 0;) {
      left = std::min(left, y[j]);
      if (y[j] > y[i]) break;
    }
    for (size_t j = i + 1; j < y.size(); ++j) {
      right = std::min(right, y[j]);
      if (y[j] > y[i]) break;
    }
    if (y[i] - std::max(left, right) >= prominence) peaks.push_back(i);
  }
  return peaks;
}

}  // namespace

ChargeTrack track_charges(const Trajectory& traj, const ClassifierThresholds& th) {
  ChargeTrack track;
  if (traj.snapshots.empty()) return track;
  // Smoothing scale is the physical kink half-width, not a tunable: tracks
  // must stay invariant under classification-threshold changes.
  const Grid& g = traj.snapshots.front().grid;
  const int hw = std::max(1, static_cast<int>(std::lround(kKinkHalfWidth / g.dx())));
  for (const FieldState& s : traj.snapshots) {
    const auto j = box_smooth(charge_density(s), hw);
    const Lump pos = find_lump(j, g, +1, th);
    const Lump neg = find_lump(j, g, -1, th);
    track.times.push_back(s.time);
    track.positive_position.push_back(pos.position);
    track.negative_position.push_back(neg.position);
    track.positive_peak.push_back(pos.peak);
    track.negative_peak.push_back(neg.peak);
    track.positive_charge.push_back(pos.charge);
    track.negative_charge.push_back(neg.charge);
    track.positive_present.push_back(pos.present ? 1 : 0);
    track.negative_present.push_back(neg.present ? 1 : 0);
  }
  return track;
}

std::string outcome_name(Outcome o) {
  switch (o) {
    case Outcome::scatter: return "scatter";
    case Outcome::annihilate: return "annihilate";
    case Outcome::capture: return "capture";
    case Outcome::excitation_decay: return "excitation_decay";
    case Outcome::undecided: return "undecided";
  }
  return "undecided";
}

double asymmetry_index(const Trajectory& traj, const ModelParams& m) {
  if (traj.snapshots.empty()) return 0.0;
  const double e0 = total_energy(traj.snapshots.front(), m);
  if (!(e0 > 0.0)) return 0.0;
  const Grid& g = traj.snapshots.front().grid;
  double worst = 0.0;
  std::vector<double> d2(g.n);
  for (const FieldState& s : traj.snapshots) {
    const auto h = energy_density(s, m);
    for (int i = 0; i < g.n; ++i) {
      const double d = h[i] - h[g.n - 1 - i];
      d2[i] = d * d;
    }
    worst = std::max(worst, std::sqrt(trapezoid(d2, g.dx())));
  }
  return worst / e0;
}

OutcomeRecord classify_outcome(const Trajectory& traj, const ChargeTrack& track,
                               const ClassifierThresholds& th, const ModelParams& m) {
  if (traj.snapshots.size() != track.times.size())
    throw std::invalid_argument("classify_outcome: track does not match trajectory");
  OutcomeRecord rec;
  rec.asymmetry_index = asymmetry_index(traj, m);
  const size_t nt = track.times.size();
  if (nt < 4 || !traj.completed) return rec;

  const double q0 = topological_charge(traj.snapshots.front());
  rec.final_Q = topological_charge(traj.snapshots.back());

  // Energy retained near the last-known lump positions; a lump that is
  // momentarily invisible (merged phase of a bound pair) still anchors
  // its window.
  {
    const FieldState& last = traj.snapshots.back();
    const double e0 = total_energy(traj.snapshots.front(), m);
    const auto h = energy_density(last, m);
    const Grid& g = last.grid;
    double cpos = kNaN, cneg = kNaN;
    for (size_t k = 0; k < nt; ++k) {
      if (track.positive_present[k]) cpos = track.positive_position[k];
      if (track.negative_present[k]) cneg = track.negative_position[k];
    }
    double kept = 0.0;
    for (int i = 0; i < g.n; ++i) {
      const double x = g.x(i);
      const bool inside =
          (!std::isnan(cpos) && std::fabs(x - cpos) <= th.capture_radius) ||
          (!std::isnan(cneg) && std::fabs(x - cneg) <= th.capture_radius);
      if (inside) kept += ((i == 0 || i == g.n - 1) ? 0.5 : 1.0) * h[i];
    }
    kept *= g.dx();
    rec.radiated_energy_fraction =
        e0 > 0.0 ? std::clamp(1.0 - kept / e0, 0.0, 1.0) : 0.0;
  }

  // First contact: both lumps inside the capture radius, or one of them
  // swallowed while approaching.
  size_t contact = nt;
  for (size_t k = 0; k < nt; ++k) {
    const bool both = track.positive_present[k] && track.negative_present[k];
    if (both) {
      const double sep =
          std::fabs(track.positive_position[k] - track.negative_position[k]);
      if (sep <= th.capture_radius) {
        contact = k;
        break;
      }
    } else if (k > 0 && track.positive_present[k - 1] && track.negative_present[k - 1]) {
      contact = k;
      break;
    }
  }
  if (contact == nt) return rec;  // lumps never met

  const double t_end = track.times[nt - 1];
  const double tail_start =
      t_end - th.persistence_fraction * (t_end - track.times.front());
  size_t tail0 = nt - 1;
  while (tail0 > 0 && track.times[tail0 - 1] >= tail_start) --tail0;
  tail0 = std::max(tail0, contact);
  const size_t tail_frames = nt - tail0;

  size_t any_tail = 0, both_tail = 0;
  for (size_t k = tail0; k < nt; ++k) {
    const bool p = track.positive_present[k], q = track.negative_present[k];
    if (p || q) ++any_tail;
    if (p && q) ++both_tail;
  }

  // Post-contact visibility: separation samples plus burst structure (a
  // breathing bound pair blinks in and out as the charges merge and
  // re-emerge, one burst per oscillation cycle).
  std::vector<double> sep_t, sep_v;
  std::vector<double> burst_starts;
  bool in_burst = false;
  int initial_order = 0;
  for (size_t k = contact == 0 ? 0 : contact - 1; k < nt; ++k) {
    const bool both = track.positive_present[k] && track.negative_present[k];
    if (both) {
      const double d = track.positive_position[k] - track.negative_position[k];
      if (k >= contact) {
        sep_t.push_back(track.times[k]);
        sep_v.push_back(std::fabs(d));
        if (!in_burst) burst_starts.push_back(track.times[k]);
      }
      if (initial_order == 0) initial_order = d < 0.0 ? -1 : 1;
      if (k >= contact && initial_order != 0 && d * initial_order < 0.0)
        rec.breather_like = true;
    }
    in_burst = both && k >= contact;
  }

  // Annihilation: charged objects gone for essentially the whole tail.
  if (any_tail <= tail_frames / 10) {
    // A Q = +-1 trajectory cannot annihilate with pinned boundaries; a
    // vanished track there is a tracker failure, not a physics outcome.
    if (std::fabs(q0) < 0.25) rec.outcome = Outcome::annihilate;
    return rec;
  }

  if (both_tail >= (tail_frames + 1) / 2) {
    std::vector<double> tt, sp, sn, ss;
    for (size_t k = tail0; k < nt; ++k) {
      if (!(track.positive_present[k] && track.negative_present[k])) continue;
      tt.push_back(track.times[k]);
      sp.push_back(track.positive_position[k]);
      sn.push_back(track.negative_position[k]);
      ss.push_back(std::fabs(track.positive_position[k] - track.negative_position[k]));
    }
    std::vector<double> tmp = ss;
    std::nth_element(tmp.begin(), tmp.begin() + tmp.size() / 2, tmp.end());
    const double sep_med = tmp[tmp.size() / 2];
    const double sep_slope = fit_slope(tt, ss);

    if (sep_med > th.capture_radius && sep_slope > 0.0) {
      rec.outcome = Outcome::scatter;
      rec.outgoing_speed_positive = fit_slope(tt, sp);
      rec.outgoing_speed_negative = fit_slope(tt, sn);

      // Excitation check: the field sampled at each moving centroid keeps
      // oscillating after the lumps separate; decay means the late swing
      // drops well below the early one.
      std::vector<double> et, ep, en;
      const Grid& g = traj.snapshots.front().grid;
      for (size_t k = contact; k < nt; ++k) {
        if (!(track.positive_present[k] && track.negative_present[k])) continue;
        const double sep =
            std::fabs(track.positive_position[k] - track.negative_position[k]);
        if (sep <= th.capture_radius) continue;
        et.push_back(track.times[k]);
        ep.push_back(interp_at(traj.snapshots[k].psi, g, track.positive_position[k]));
        en.push_back(interp_at(traj.snapshots[k].psi, g, track.negative_position[k]));
      }
      const size_t ne = et.size();
      if (ne >= 24) {
        const size_t w = ne / 3;
        auto window_amp = [&](const std::vector<double>& y, size_t a, size_t b) {
          std::vector<double> wt(et.begin() + a, et.begin() + b);
          std::vector<double> wy(y.begin() + a, y.begin() + b);
          return detrended_amplitude(wt, wy);
        };
        const double early = std::min(window_amp(ep, 0, w), window_amp(en, 0, w));
        const double late = std::max(window_amp(ep, ne - w, ne), window_amp(en, ne - w, ne));
        if (early >= th.oscillation_amplitude && late <= th.decay_ratio * early)
          rec.outcome = Outcome::excitation_decay;
      }
      return rec;
    }
  }

  // Capture: the pair stays visible, bounded, and has cycled enough
  // times.  A deep-merging bion blinks at a low duty cycle, so steady
  // tail presence and persistent blinking both count.
  double t_last = -std::numeric_limits<double>::infinity();
  for (size_t k = contact; k < nt; ++k)
    if (track.positive_present[k] || track.negative_present[k])
      t_last = track.times[k];
  size_t tail_bursts = 0;
  {
    bool in = false;
    for (size_t k = tail0; k < nt; ++k) {
      const bool both = track.positive_present[k] && track.negative_present[k];
      if (both && !in) ++tail_bursts;
      in = both;
    }
  }
  const double tail_span = t_end - track.times[tail0];
  const bool steady = any_tail * 2 >= tail_frames;
  const bool blinking = t_last >= t_end - 0.2 * tail_span &&
                        tail_bursts >= static_cast<size_t>(th.min_oscillations);
  if ((steady || blinking) && !sep_v.empty()) {
    std::vector<double> tmp = sep_v;
    std::nth_element(tmp.begin(), tmp.begin() + tmp.size() / 2, tmp.end());
    const double sep_med = tmp[tmp.size() / 2];
    const auto peaks = local_maxima(sep_v, th.oscillation_amplitude);
    const long cycles = std::max<long>(static_cast<long>(peaks.size()),
                                       static_cast<long>(burst_starts.size()) - 1);
    // A blinking pair re-merges between bursts, so it is bounded by
    // construction; visible separations are biased toward the turning
    // points and only get a loose cap.
    const bool bounded = steady ? sep_med <= th.capture_radius
                                : sep_med <= 2.0 * th.capture_radius;
    if (bounded && cycles >= th.min_oscillations) {
      // A bound pair whose charges interchange is a breather, not a
      // capture; the flag alone records it.
      if (!rec.breather_like) rec.outcome = Outcome::capture;
      if (peaks.size() >= 2) {
        double acc = 0.0;
        for (size_t i = 1; i < peaks.size(); ++i)
          acc += sep_t[peaks[i]] - sep_t[peaks[i - 1]];
        rec.oscillation_period = acc / (peaks.size() - 1);
      } else if (burst_starts.size() >= 3) {
        rec.oscillation_period = (burst_starts.back() - burst_starts.front()) /
                                 (burst_starts.size() - 1);
      }
      return rec;
    }
  }
  return rec;
}

ScanResult velocity_scan(const std::vector<double>& velocities,
                         const CollisionSetup& base, const Grid& grid,
                         const ModelParams& m, const EvolveConfig& cfg,
                         const ClassifierThresholds& th, int workers) {
  ScanResult result;
  if (velocities.empty()) return result;
  std::vector<double> vs = velocities;
  std::sort(vs.begin(), vs.end());
  result.entries.resize(vs.size());

  std::atomic<size_t> next{0};
  std::exception_ptr setup_error;
  std::mutex err_mutex;
  auto work = [&]() {
    for (;;) {
      const size_t i = next.fetch_add(1);
      if (i >= vs.size()) return;
      ScanEntry& e = result.entries[i];
      e.v = vs[i];
      CollisionSetup setup = base;
      setup.v_left = vs[i];
      setup.v_right = -vs[i];
      try {
        const FieldState s0 = compose_collision(setup, grid);
        const Trajectory traj = run(s0, m, cfg);
        const ChargeTrack track = track_charges(traj, th);
        e.record = classify_outcome(traj, track, th, m);
      } catch (const std::invalid_argument&) {
        // Bad geometry poisons every velocity; surface it instead of
        // reporting a column of undecided.
        std::lock_guard<std::mutex> lk(err_mutex);
        if (!setup_error) setup_error = std::current_exception();
        next.store(vs.size());
        return;
      } catch (const std::runtime_error&) {
        e.record = OutcomeRecord{};  // blowup at this v: undecided
      }
    }
  };

  const int nw = std::clamp(workers, 1, static_cast<int>(vs.size()));
  if (nw <= 1) {
    work();
  } else {
    std::vector<std::thread> pool;
    pool.reserve(nw);
    for (int i = 0; i < nw; ++i) pool.emplace_back(work);
    for (auto& t : pool) t.join();
  }
  if (setup_error) std::rethrow_exception(setup_error);

  // v1: lowest velocity whose outcome leaves the contiguous annihilation
  // band that starts at the bottom of the scan.
  if (result.entries.front().record.outcome == Outcome::annihilate) {
    for (size_t i = 1; i < result.entries.size(); ++i) {
      if (result.entries[i].record.outcome != Outcome::annihilate) {
        result.v1_estimate = result.entries[i].v;
        result.v1_error = result.entries[i].v - result.entries[i - 1].v;
        break;
      }
    }
  }
  return result;
}

}  // namespace dwlab
