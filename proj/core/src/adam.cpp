#include "kmgr/nn/adam.hpp"

#include <cmath>

#include "kmgr/util/error.hpp"

namespace kmgr::nn {

template <typename T>
void Adam<T>::step(const std::vector<Param<T>*>& params) {
  if (m_.empty()) {
    m_.resize(params.size());
    v_.resize(params.size());
    for (std::size_t i = 0; i < params.size(); ++i) {
      m_[i].assign(params[i]->value.numel(), T{0});
      v_[i].assign(params[i]->value.numel(), T{0});
    }
  }
  if (m_.size() != params.size()) throw DataError("adam: parameter list changed between steps");

  ++t_;
  const double b1 = cfg_.beta1, b2 = cfg_.beta2;
  const double correction1 = 1.0 - std::pow(b1, static_cast<double>(t_));
  const double correction2 = 1.0 - std::pow(b2, static_cast<double>(t_));
  // Fold both bias corrections into the step size (Kingma & Ba, §2).
  const double alpha = cfg_.lr * std::sqrt(correction2) / correction1;

  for (std::size_t i = 0; i < params.size(); ++i) {
    Param<T>& p = *params[i];
    if (m_[i].size() != p.value.numel()) throw DataError("adam: parameter shape changed between steps");
    T* value = p.value.data.data();
    const T* grad = p.grad.data.data();
    T* m = m_[i].data();
    T* v = v_[i].data();
    for (std::size_t j = 0; j < p.value.numel(); ++j) {
      const double g = static_cast<double>(grad[j]);
      const double mj = b1 * static_cast<double>(m[j]) + (1.0 - b1) * g;
      const double vj = b2 * static_cast<double>(v[j]) + (1.0 - b2) * g * g;
      m[j] = static_cast<T>(mj);
      v[j] = static_cast<T>(vj);
      value[j] -= static_cast<T>(alpha * mj / (std::sqrt(vj) + cfg_.eps));
    }
  }
}

template class Adam<float>;
template class Adam<double>;

}  // namespace kmgr::nn
