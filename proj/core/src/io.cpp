#include "dwlab/io.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace dwlab {

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string format_timeseries(const std::vector<DiagnosticsSample>& rows) {
  std::string out = "time,total_energy,Q,Q_N,first_integral_max,pcac_max\n";
  for (const auto& r : rows) {
    out += format_double(r.time);
    out += ',';
    out += format_double(r.total_energy);
    out += ',';
    out += format_double(r.topological_charge);
    out += ',';
    out += format_double(r.noether_charge);
    out += ',';
    out += format_double(r.max_first_integral_deviation);
    out += ',';
    out += format_double(r.max_pcac_residual);
    out += '\n';
  }
  return out;
}

std::string format_snapshot(const FieldState& s) {
  std::string out = "# time=" + format_double(s.time) + "\n";
  out += "x,phi,psi,phi_dot,psi_dot\n";
  for (int i = 0; i < s.grid.n; ++i) {
    out += format_double(s.grid.x(i));
    out += ',';
    out += format_double(s.phi[i]);
    out += ',';
    out += format_double(s.psi[i]);
    out += ',';
    out += format_double(s.phi_dot[i]);
    out += ',';
    out += format_double(s.psi_dot[i]);
    out += '\n';
  }
  return out;
}

// stod rejects subnormals (ERANGE underflow); strtod returns them, and
// far-vacuum velocities do get that small.
static double parse_field(const std::string& s) {
  const char* begin = s.c_str();
  char* end = nullptr;
  const double v = std::strtod(begin, &end);
  if (end == begin) throw std::runtime_error("read_snapshot: bad number '" + s + "'");
  return v;
}

FieldState read_snapshot(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  double time = 0.0;
  if (!std::getline(in, line) || line.rfind("# time=", 0) != 0)
    throw std::runtime_error("read_snapshot: missing '# time=' line");
  time = parse_field(line.substr(7));
  if (!std::getline(in, line) || line != "x,phi,psi,phi_dot,psi_dot")
    throw std::runtime_error("read_snapshot: bad header row");

  std::vector<double> x, phi, psi, pd, sd;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    double c[5];
    size_t pos = 0;
    for (int k = 0; k < 5; ++k) {
      const size_t next = k < 4 ? line.find(',', pos) : line.size();
      if (next == std::string::npos)
        throw std::runtime_error("read_snapshot: short row");
      c[k] = parse_field(line.substr(pos, next - pos));
      pos = next + 1;
    }
    x.push_back(c[0]);
    phi.push_back(c[1]);
    psi.push_back(c[2]);
    pd.push_back(c[3]);
    sd.push_back(c[4]);
  }
  const int n = static_cast<int>(x.size());
  if (n < 8) throw std::runtime_error("read_snapshot: too few rows");
  FieldState s(Grid{x.front(), x.back(), n});
  s.time = time;
  s.phi = std::move(phi);
  s.psi = std::move(psi);
  s.phi_dot = std::move(pd);
  s.psi_dot = std::move(sd);
  return s;
}

std::string format_outcome(const OutcomeRecord& rec) {
  std::string out;
  out += "outcome=" + outcome_name(rec.outcome) + "\n";
  out += "final_Q=" + format_double(rec.final_Q) + "\n";
  if (rec.outgoing_speed_positive)
    out += "outgoing_speed_positive=" + format_double(*rec.outgoing_speed_positive) + "\n";
  if (rec.outgoing_speed_negative)
    out += "outgoing_speed_negative=" + format_double(*rec.outgoing_speed_negative) + "\n";
  if (rec.oscillation_period)
    out += "oscillation_period=" + format_double(*rec.oscillation_period) + "\n";
  out += "radiated_energy_fraction=" + format_double(rec.radiated_energy_fraction) + "\n";
  out += "asymmetry_index=" + format_double(rec.asymmetry_index) + "\n";
  out += std::string("breather_like=") + (rec.breather_like ? "true" : "false") + "\n";
  return out;
}

std::string format_track(const ChargeTrack& track) {
  std::string out =
      "time,positive_position,negative_position,positive_peak,negative_peak,"
      "positive_charge,negative_charge,positive_present,negative_present\n";
  for (size_t k = 0; k < track.times.size(); ++k) {
    out += format_double(track.times[k]);
    out += ',';
    out += format_double(track.positive_position[k]);
    out += ',';
    out += format_double(track.negative_position[k]);
    out += ',';
    out += format_double(track.positive_peak[k]);
    out += ',';
    out += format_double(track.negative_peak[k]);
    out += ',';
    out += format_double(track.positive_charge[k]);
    out += ',';
    out += format_double(track.negative_charge[k]);
    out += ',';
    out += track.positive_present[k] ? '1' : '0';
    out += ',';
    out += track.negative_present[k] ? '1' : '0';
    out += '\n';
  }
  return out;
}

std::string render_heatmap(const Trajectory& traj, const HeatmapSpec& spec,
                           const ModelParams& m) {
  if (traj.snapshots.empty())
    throw std::invalid_argument("render_heatmap: empty trajectory");
  if (spec.x_stride < 1 || spec.t_stride < 1)
    throw std::invalid_argument("render_heatmap: strides must be >= 1");

  const Grid& g = traj.snapshots.front().grid;
  std::vector<std::vector<double>> cells;
  double peak = 0.0;
  for (size_t k = 0; k < traj.snapshots.size(); k += spec.t_stride) {
    const auto full = spec.quantity == HeatmapQuantity::charge_density
                          ? charge_density(traj.snapshots[k])
                          : energy_density(traj.snapshots[k], m);
    std::vector<double> row;
    for (int i = 0; i < g.n; i += spec.x_stride) {
      row.push_back(full[i]);
      peak = std::max(peak, std::fabs(full[i]));
    }
    cells.push_back(std::move(row));
  }
  const double limit = spec.limit > 0.0 ? spec.limit : peak;

  const int w = static_cast<int>(cells.front().size());
  const int h = static_cast<int>(cells.size());
  std::string out = "P6\n" + std::to_string(w) + " " + std::to_string(h) + "\n255\n";
  out.reserve(out.size() + static_cast<size_t>(w) * h * 3);
  for (const auto& row : cells) {
    for (double v : row) {
      double t = limit > 0.0 ? v / limit : 0.0;
      t = std::clamp(t, -1.0, 1.0);
      unsigned char rgb[3];
      if (t >= 0.0) {
        const unsigned char c = static_cast<unsigned char>(std::lround(255.0 * (1.0 - t)));
        rgb[0] = 255;
        rgb[1] = c;
        rgb[2] = c;
      } else {
        const unsigned char c = static_cast<unsigned char>(std::lround(255.0 * (1.0 + t)));
        rgb[0] = c;
        rgb[1] = c;
        rgb[2] = 255;
      }
      out.append(reinterpret_cast<const char*>(rgb), 3);
    }
  }
  return out;
}

void write_file(const std::string& path, const std::string& content) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("cannot open for writing: " + path);
  f.write(content.data(), static_cast<std::streamsize>(content.size()));
  if (!f) throw std::runtime_error("short write: " + path);
}

std::string read_file(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("cannot open: " + path);
  std::ostringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

}  // namespace dwlab
