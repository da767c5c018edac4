#include "ptpmdl/quantizer.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "ptpmdl/types.hpp"

namespace ptpmdl {

namespace {

// 2 pi^2 ln2 (1/2 - 3/(16 ln2)) ~= 3.1404, i.e. 1.7721^2.
double level_constant() {
  constexpr double pi = std::numbers::pi;
  constexpr double ln2 = std::numbers::ln2;
  return 2.0 * pi * pi * ln2 * (0.5 - 3.0 / (16.0 * ln2));
}

double sin_squared(double x) {
  const double s = std::sin(x);
  return s * s;
}

}  // namespace

std::uint32_t grid_size(std::uint64_t n) {
  if (n == 0) throw ConfigError("grid size needs a positive sequence length");
  return static_cast<std::uint32_t>(std::ceil(std::sqrt(level_constant() * static_cast<double>(n))));
}

QuantizerGrid build_grid(std::uint64_t n) { return build_grid_with_levels(grid_size(n)); }

QuantizerGrid build_grid_with_levels(std::uint32_t k) {
  if (k == 0) throw ConfigError("quantizer needs at least one level");
  constexpr double half_pi = std::numbers::pi / 2.0;
  QuantizerGrid grid;
  grid.size = k;
  grid.edges.resize(k + 1);
  grid.levels.resize(k);
  const double kd = static_cast<double>(k);
  for (std::uint32_t i = 0; i <= k; ++i) grid.edges[i] = sin_squared(half_pi * i / kd);
  grid.edges[0] = 0.0;
  grid.edges[k] = 1.0;
  for (std::uint32_t i = 0; i < k; ++i) grid.levels[i] = sin_squared(half_pi * (i + 0.5) / kd);
  return grid;
}

QuantizedParam quantize(double theta, const QuantizerGrid& grid) {
  if (!(theta >= 0.0 && theta <= 1.0)) throw ConfigError("parameter outside [0, 1]");
  const auto k = static_cast<std::int64_t>(grid.size);
  const double u = std::asin(std::sqrt(theta)) * 2.0 / std::numbers::pi;
  auto bin = std::clamp<std::int64_t>(static_cast<std::int64_t>(u * static_cast<double>(k)), 0, k - 1);
  // The companded guess can be one bin off near an edge; settle against the
  // stored edges so quantize(levels[i]) and boundary values are exact.
  while (bin > 0 && theta < grid.edges[bin]) --bin;
  while (bin < k - 1 && theta >= grid.edges[bin + 1]) ++bin;
  return dequantize(static_cast<std::uint32_t>(bin), grid);
}

QuantizedParam dequantize(std::uint32_t index, const QuantizerGrid& grid) {
  if (index >= grid.size) throw FormatError("quantizer index out of range");
  return {index, grid.levels[index]};
}

}  // namespace ptpmdl
