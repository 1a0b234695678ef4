#pragma once

#include <string>
#include <vector>

#include "pedcross/episode.hpp"
#include "pedcross/observation.hpp"

namespace pedcross {

// Values of the non-policy parameters the policy is conditioned on and
// later evaluated over.
struct ParamGrid {
  std::vector<double> sigma_v_values;
  std::vector<double> c_values;

  // Strictly increasing and nonnegative; throws std::invalid_argument.
  void validate() const;

  // Inclusive range start, start + step, ..., stop.
  static std::vector<double> range(double start, double stop, double step);

  // 0..1 by 0.1 and 0..100 by 10, endpoints inclusive (11 x 11).
  static ParamGrid standard();

  // Cells relevant to a variant: BM has a single (0, 0) cell, LM varies c
  // only, VM varies sigma_v only, VLM the full product.
  std::vector<ModelParams> cells_for(Variant variant) const;

  bool has_sigma_v(double v) const;
  bool has_c(double v) const;
};

// Parses "0,0.1,0.2" or "start:stop:step".
std::vector<double> parse_value_list(const std::string& text);

}  // namespace pedcross
