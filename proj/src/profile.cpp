#include "hpfo/profile.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <vector>

#include "hpfo/error.hpp"

namespace hpfo {

DisturbanceProfile::Sample DisturbanceProfile::at(double t) const {
  return {wind_ms.at(t), dni_wm2.at(t), dhi_wm2.at(t), tair_c.at(t), demand_kw.at(t)};
}

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

std::vector<std::string> split(const std::string& line) {
  std::vector<std::string> out;
  std::stringstream ss(line);
  std::string cell;
  while (std::getline(ss, cell, ',')) out.push_back(trim(cell));
  if (!line.empty() && line.back() == ',') out.emplace_back();
  return out;
}

double to_number(const std::string& cell, int lineno) {
  std::size_t used = 0;
  double v = 0.0;
  try {
    v = std::stod(cell, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used == 0 || used != cell.size() || !std::isfinite(v))
    throw ParseError("profile: bad number '" + cell + "' on line " + std::to_string(lineno), lineno);
  return v;
}

// 1 s grid from 0 to horizon (inclusive, last point at horizon).
std::vector<double> second_grid(double horizon_s) {
  std::vector<double> t;
  const auto n = static_cast<long>(std::floor(horizon_s));
  for (long i = 0; i <= n; ++i) t.push_back(static_cast<double>(i));
  if (t.back() < horizon_s) t.push_back(horizon_s);
  if (t.size() == 1) t.push_back(1.0);
  return t;
}

TimeSeries sample(const MonotoneCubic& f, double horizon_s) {
  std::vector<double> t = second_grid(horizon_s);
  std::vector<double> v(t.size());
  std::transform(t.begin(), t.end(), v.begin(), [&f](double x) { return f(x); });
  return TimeSeries(std::move(t), std::move(v));
}

}  // namespace

ProfileColumns read_profile_csv(std::istream& in) {
  static const char* kNames[] = {"wind_ms", "dni_wm2", "dhi_wm2", "tair_c", "demand_kw"};
  std::string line;
  int lineno = 0;
  std::vector<std::string> header;
  while (std::getline(in, line)) {
    ++lineno;
    if (!trim(line).empty()) {
      header = split(trim(line));
      break;
    }
  }
  if (header.empty()) throw ParseError("profile: missing header", lineno);

  int t_col = -1;
  int cols[5] = {-1, -1, -1, -1, -1};
  for (int c = 0; c < static_cast<int>(header.size()); ++c) {
    if (header[c] == "t_s") {
      t_col = c;
      continue;
    }
    const auto it = std::find(std::begin(kNames), std::end(kNames), header[c]);
    if (it == std::end(kNames))
      throw ParseError("profile: unknown column '" + header[c] + "'", lineno);
    cols[it - std::begin(kNames)] = c;
  }
  if (t_col < 0) throw ParseError("profile: header lacks t_s", lineno);

  std::vector<double> t;
  std::vector<std::vector<double>> values(5);
  while (std::getline(in, line)) {
    ++lineno;
    const std::string s = trim(line);
    if (s.empty()) continue;
    const auto cells = split(s);
    if (cells.size() != header.size())
      throw ParseError("profile: expected " + std::to_string(header.size()) + " cells on line " +
                           std::to_string(lineno),
                       lineno);
    const double tv = to_number(cells[t_col], lineno);
    if (!t.empty() && !(tv > t.back()))
      throw ParseError("profile: t_s not strictly increasing on line " + std::to_string(lineno), lineno);
    t.push_back(tv);
    for (int k = 0; k < 5; ++k)
      if (cols[k] >= 0) values[k].push_back(to_number(cells[cols[k]], lineno));
  }
  if (t.empty()) throw ParseError("profile: no data rows", lineno);

  ProfileColumns out;
  std::optional<TimeSeries>* slots[] = {&out.wind_ms, &out.dni_wm2, &out.dhi_wm2, &out.tair_c, &out.demand_kw};
  for (int k = 0; k < 5; ++k)
    if (cols[k] >= 0) *slots[k] = TimeSeries(t, values[k]);
  return out;
}

ProfileColumns read_profile_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open profile '" + path + "'", 0);
  return read_profile_csv(in);
}

void write_profile_csv(std::ostream& out, const DisturbanceProfile& p, double horizon_s, double step_s) {
  out << "t_s,wind_ms,dni_wm2,dhi_wm2,tair_c,demand_kw\n";
  const auto n = static_cast<long>(std::floor(horizon_s / step_s + 1e-9));
  char buf[256];
  for (long i = 0; i <= n; ++i) {
    const double t = static_cast<double>(i) * step_s;
    const auto s = p.at(t);
    std::snprintf(buf, sizeof buf, "%.10g,%.10g,%.10g,%.10g,%.10g,%.10g\n", t, s.wind_ms, s.dni_wm2, s.dhi_wm2,
                  s.tair_c, s.demand_kw);
    out << buf;
  }
}

TimeSeries synth_wind_profile(double mean_ms, double horizon_s, std::uint64_t seed) {
  if (!(mean_ms > 0.0)) throw std::invalid_argument("synth_wind_profile: mean must be positive");
  if (!(horizon_s >= 0.0)) throw std::invalid_argument("synth_wind_profile: horizon must be non-negative");
  constexpr double kBlock = 600.0;
  constexpr double kSample = 60.0;
  const auto n_samples = std::max<long>(1, static_cast<long>(std::ceil(horizon_s / kSample))) + 1;
  const auto n_blocks = static_cast<long>(std::floor((n_samples - 1) * kSample / kBlock)) + 1;

  UniformStream rng(seed);
  std::vector<double> block_mean(n_blocks);
  for (auto& b : block_mean) b = mean_ms + rng.uniform(-2.0, 2.0);

  std::vector<double> t(n_samples);
  std::vector<double> v(n_samples);
  for (long j = 0; j < n_samples; ++j) {
    t[j] = j * kSample;
    const auto block = static_cast<long>(std::floor(t[j] / kBlock));
    v[j] = std::max(0.0, block_mean[block] * (1.0 + rng.uniform(-0.05, 0.05)));
  }
  return sample(MonotoneCubic(std::move(t), std::move(v)), horizon_s);
}

TimeSeries synth_demand_profile(double base_kw, double variation_kw, double period_s, double horizon_s,
                                std::uint64_t seed) {
  if (!(period_s > 0.0)) throw std::invalid_argument("synth_demand_profile: period must be positive");
  if (!(variation_kw >= 0.0)) throw std::invalid_argument("synth_demand_profile: variation must be non-negative");
  if (variation_kw == 0.0) return TimeSeries::constant(base_kw);
  const double half = 0.5 * period_s;
  const auto n = std::max<long>(1, static_cast<long>(std::ceil(horizon_s / half))) + 1;
  UniformStream rng(seed);
  std::vector<double> t(n);
  std::vector<double> v(n);
  for (long j = 0; j < n; ++j) {
    t[j] = j * half;
    const double sign = j % 2 == 0 ? 1.0 : -1.0;
    v[j] = std::max(0.0, base_kw + sign * variation_kw * rng.uniform(0.5, 1.0));
  }
  return sample(MonotoneCubic(std::move(t), std::move(v)), horizon_s);
}

TimeSeries ramp_profile(double start, double end, double horizon_s) {
  if (!(horizon_s > 0.0) || start == end) return TimeSeries::constant(start);
  return TimeSeries({0.0, horizon_s}, {start, end});
}

}  // namespace hpfo
