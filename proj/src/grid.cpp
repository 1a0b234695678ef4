#include "pedcross/grid.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "pedcross/strings.hpp"

namespace pedcross {

namespace {

void check_increasing(const std::vector<double>& xs, const char* name) {
  for (std::size_t i = 0; i < xs.size(); ++i) {
    if (!(xs[i] >= 0.0)) throw std::invalid_argument(std::string("grid: ") + name + " values must be nonnegative");
    if (i > 0 && !(xs[i] > xs[i - 1])) {
      throw std::invalid_argument(std::string("grid: ") + name + " values must be strictly increasing");
    }
  }
}

}  // namespace

void ParamGrid::validate() const {
  check_increasing(sigma_v_values, "sigma_v");
  check_increasing(c_values, "c");
}

std::vector<double> ParamGrid::range(double start, double stop, double step) {
  if (!(step > 0.0) || stop < start) throw std::invalid_argument("grid range: need step > 0 and stop >= start");
  const auto n = static_cast<long long>(std::floor((stop - start) / step + 1e-9));
  std::vector<double> out;
  out.reserve(static_cast<std::size_t>(n + 1));
  for (long long i = 0; i <= n; ++i) out.push_back(canonical_decimal(start + static_cast<double>(i) * step));
  return out;
}

ParamGrid ParamGrid::standard() { return {range(0.0, 1.0, 0.1), range(0.0, 100.0, 10.0)}; }

std::vector<ModelParams> ParamGrid::cells_for(Variant variant) const {
  const std::vector<double> zero{0.0};
  const auto& sigmas = uses_belief(variant) ? sigma_v_values : zero;
  const auto& cs = uses_looming(variant) ? c_values : zero;
  std::vector<ModelParams> out;
  for (double s : sigmas) {
    for (double c : cs) out.push_back({s, c});
  }
  return out;
}

bool ParamGrid::has_sigma_v(double v) const {
  return std::find(sigma_v_values.begin(), sigma_v_values.end(), v) != sigma_v_values.end();
}

bool ParamGrid::has_c(double v) const { return std::find(c_values.begin(), c_values.end(), v) != c_values.end(); }

std::vector<double> parse_value_list(const std::string& text) {
  const auto t = std::string(trim(text));
  if (t.empty()) return {};
  if (t.find(':') != std::string::npos) {
    const auto parts = split(t, ':');
    if (parts.size() != 3) throw std::invalid_argument("range must be start:stop:step, got '" + t + "'");
    return ParamGrid::range(parse_double(parts[0]), parse_double(parts[1]), parse_double(parts[2]));
  }
  std::vector<double> out;
  for (const auto& p : split(t, ',')) out.push_back(canonical_decimal(parse_double(p)));
  return out;
}

}  // namespace pedcross
