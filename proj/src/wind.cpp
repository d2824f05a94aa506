#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>
#include <string>

#include "hpfo/error.hpp"
#include "hpfo/plants.hpp"
#include "hpfo/units.hpp"

namespace hpfo {

namespace {

constexpr double kBetzLimit = 16.0 / 27.0;

// Below rated: a common 5 MW reference curve. From 12 m/s on the
// coefficients are chosen so the rotor yields at least rated power at the
// default density and rotor area.
const std::vector<double> kRefSpeeds = {
    3.0,  3.5,  4.0,  4.5,  5.0,  5.5,  6.0,  6.5,  7.0,  7.5,  8.0,  8.5,  9.0,  9.5,  10.0,
    10.5, 11.0, 11.5, 12.0, 12.5, 13.0, 13.5, 14.0, 14.5, 15.0, 15.5, 16.0, 16.5, 17.0, 17.5,
    18.0, 18.5, 19.0, 19.5, 20.0, 20.5, 21.0, 21.5, 22.0, 22.5, 23.0, 23.5, 24.0, 24.5, 25.0};
const std::vector<double> kRefCp = {
    0.178085, 0.289075, 0.349022, 0.384728, 0.406059, 0.420228, 0.428823, 0.433873, 0.436223,
    0.436845, 0.436575, 0.436511, 0.436561, 0.436517, 0.435903, 0.434673, 0.433230, 0.430031,
    0.378870, 0.335200, 0.297991, 0.266092, 0.238589, 0.214748, 0.193981, 0.175808, 0.159836,
    0.145741, 0.133256, 0.122158, 0.112258, 0.103400, 0.095450, 0.088294, 0.081836, 0.075993,
    0.070693, 0.065875, 0.061485, 0.057476, 0.053809, 0.050447, 0.047359, 0.044518, 0.041900};

bool parse_pair(const std::string& line, double& a, double& b) {
  std::string s = line;
  std::replace(s.begin(), s.end(), ',', ' ');
  std::istringstream is(s);
  std::string rest;
  if (!(is >> a >> b)) return false;
  return !(is >> rest);
}

}  // namespace

CpCurve::CpCurve(std::vector<double> speeds, std::vector<double> cp) {
  for (double c : cp)
    if (!(c >= 0.0 && c <= kBetzLimit)) throw ValidationError("Cp table: coefficient outside [0, 16/27]");
  try {
    interp_ = MonotoneCubic(std::move(speeds), std::move(cp));
  } catch (const std::invalid_argument& e) {
    throw ValidationError(std::string("Cp table: ") + e.what());
  }
}

CpCurve CpCurve::reference_5mw() { return CpCurve(kRefSpeeds, kRefCp); }

CpCurve CpCurve::parse(std::istream& in) {
  std::vector<double> speeds;
  std::vector<double> cp;
  std::string line;
  int lineno = 0;
  bool first = true;
  while (std::getline(in, line)) {
    ++lineno;
    if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    double a = 0.0;
    double b = 0.0;
    const bool ok = parse_pair(line, a, b);
    const bool header = first && !ok;
    first = false;
    if (header) continue;
    if (!ok) throw ParseError("Cp table: expected two numbers on line " + std::to_string(lineno), lineno);
    speeds.push_back(a);
    cp.push_back(b);
  }
  return CpCurve(std::move(speeds), std::move(cp));
}

CpCurve CpCurve::load(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open Cp table '" + path + "'", 0);
  return parse(in);
}

void WindModel::validate() const {
  if (n_t <= 0) throw ValidationError("wind: n_t must be positive");
  if (!(rho > 0.0)) throw ValidationError("wind: rho must be positive");
  if (!(rotor_area > 0.0)) throw ValidationError("wind: rotor_area must be positive");
  if (!(rated_power > 0.0)) throw ValidationError("wind: rated_power must be positive");
  if (!(cut_in >= 0.0 && cut_in < cut_out)) throw ValidationError("wind: need 0 <= cut_in < cut_out");
  if (!(wake_factor > 0.0 && wake_factor <= 1.0)) throw ValidationError("wind: wake_factor must be in (0, 1]");
}

double WindModel::turbine_power(double speed) const {
  if (speed < 0.0 || std::isnan(speed)) throw NegativeSpeedError("wind speed must be non-negative");
  if (speed < cut_in || speed > cut_out) return 0.0;
  const double aero = units::watts_to_kw(0.5 * rho * rotor_area * cp(speed) * speed * speed * speed);
  return std::min(rated_power, std::max(0.0, aero) * wake_factor);
}

double available_wind_power(std::span<const double> speeds, const WindModel& m) {
  if (speeds.size() == 1) return m.n_t * m.turbine_power(speeds[0]);
  if (speeds.size() != static_cast<std::size_t>(m.n_t))
    throw std::invalid_argument("available_wind_power: need one speed per turbine or one ambient speed");
  double total = 0.0;
  for (double s : speeds) total += m.turbine_power(s);
  return total;
}

double available_wind_power(double ambient_speed, const WindModel& m) {
  return available_wind_power(std::span<const double>(&ambient_speed, 1), m);
}

double wind_output(double setpoint, std::span<const double> speeds, const WindModel& m) {
  return std::min(setpoint, available_wind_power(speeds, m));
}

}  // namespace hpfo
