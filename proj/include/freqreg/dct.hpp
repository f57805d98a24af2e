#pragma once

#include <vector>

#include "freqreg/tensor.hpp"

namespace freqreg {

// Cosine transforms with an unnormalized inverse: the DC basis function is the
// constant 1, not 1/2.  The forward transform is the exact algebraic inverse,
// so it scales the DC row by 1/D and the others by 2/D.
//
//   idct_1d:  W(y) = sum_x T(x) * cos[(pi/D)(y+1/2)x]
//   dct_1d:   T(0) = (1/D) sum_y W(y)
//             T(x) = (2/D) sum_y W(y) * cos[(pi/D)(y+1/2)x],  x >= 1

std::vector<double> idct_1d(const std::vector<double>& coeffs);
std::vector<double> dct_1d(const std::vector<double>& values);

// Separable N-D versions: the 1D transform applied along each axis in turn.
DenseTensor idct_nd(const DenseTensor& coeffs);
DenseTensor dct_nd(const DenseTensor& values);

// Transpose of the idct_nd linear map, for gradients:
//   out(x) = sum_y g(y) * prod_i cos[(pi/D_i)(y_i+1/2)x_i]
DenseTensor idct_nd_adjoint(const DenseTensor& cotangent);

// Adjoint computed only for output positions with every index below
// out_limit; the rest are left zero.  Used by callers that mask the result
// anyway, so high-index columns need not be computed.
DenseTensor idct_nd_adjoint_limited(const DenseTensor& cotangent, std::size_t out_limit);

// Shared cosine table, cached per dimension: table[x*D + y] = cos[(pi/D)(y+1/2)x].
const std::vector<double>& cosine_table(std::size_t dim);

}  // namespace freqreg
