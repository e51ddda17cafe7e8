#include "kmgr/nn/tensor.hpp"

#include <sstream>

namespace kmgr::nn {

std::string shape_str(const std::vector<std::size_t>& shape) {
  std::ostringstream oss;
  oss << '(';
  for (std::size_t i = 0; i < shape.size(); ++i) {
    if (i) oss << ", ";
    oss << shape[i];
  }
  oss << ')';
  return oss.str();
}

}  // namespace kmgr::nn
