#pragma once

// Weight specification strings:
//
//   const:<c>              c > 0
//   power:<alpha>          |x|^alpha in the ambient dimension
//   step:<a>,<b>[,<axis>]  a where x[axis] < 0, b elsewhere (axis defaults to 0)
//   sampled:<path>         positive real scalar field file (see field_io.hpp)

#include <string>

#include "rieszlab/weights.hpp"

namespace rieszlab {

Weight parse_weight_spec(const std::string& spec, int dim);

}  // namespace rieszlab
