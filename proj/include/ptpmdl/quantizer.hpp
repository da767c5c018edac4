#ifndef PTPMDL_QUANTIZER_HPP
#define PTPMDL_QUANTIZER_HPP

#include <Eigen/Core>
#include <cstdint>

namespace ptpmdl {

/// Number of representation levels used for a length-N sequence:
/// ceil(sqrt(2 pi^2 ln2 (1/2 - 3/(16 ln2)) N)), roughly ceil(1.772 sqrt(N)).
std::uint32_t grid_size(std::uint64_t n);

/// Parameter quantizer matched to Jeffreys' prior. Bins are uniform in the
/// arcsine-companded domain u = (2/pi) asin(sqrt(theta)); each level sits at
/// the companded midpoint of its bin, so levels are symmetric about 1/2 and
/// strictly inside (0, 1).
struct QuantizerGrid {
  std::uint32_t size = 0;   ///< K
  Eigen::ArrayXd edges;     ///< K+1 ascending, edges[0]=0, edges[K]=1
  Eigen::ArrayXd levels;    ///< K representation levels
};

/// Grid with grid_size(n) levels. Pure function of n.
QuantizerGrid build_grid(std::uint64_t n);

/// Grid with exactly k levels.
QuantizerGrid build_grid_with_levels(std::uint32_t k);

struct QuantizedParam {
  std::uint32_t index = 0;  ///< bin index k_s
  double level = 0.5;       ///< representation level r_s = p(1|s)

  friend bool operator==(const QuantizedParam&, const QuantizedParam&) = default;
};

/// Maps theta in [0,1] to its half-open bin [edges[k], edges[k+1]); theta = 1
/// falls in the last bin.
QuantizedParam quantize(double theta, const QuantizerGrid& grid);

/// The parameter stored at bin `index`.
QuantizedParam dequantize(std::uint32_t index, const QuantizerGrid& grid);

}  // namespace ptpmdl

#endif  // PTPMDL_QUANTIZER_HPP
