#pragma once

#include <cmath>
#include <cstdint>

#include "sgmix/error.hpp"
#include "sgmix/gcn.hpp"
#include "sgmix/matrix.hpp"

namespace sgmix {

/// Classic Adam with L2 regularization folded into the gradient
/// (g' = g + weight_decay * theta before the moment updates).
template <typename T>
struct AdamState {
  DenseMatrix<T> m_w0, v_w0;
  DenseMatrix<T> m_w1, v_w1;
  std::uint64_t step = 0;
  double lr = 0.01;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;
  double weight_decay = 0.0;
};

template <typename T>
AdamState<T> make_adam_state(const GcnModel<T>& model, double lr, double weight_decay) {
  AdamState<T> st;
  st.lr = lr;
  st.weight_decay = weight_decay;
  st.m_w0 = DenseMatrix<T>(model.w0.rows, model.w0.cols);
  st.v_w0 = DenseMatrix<T>(model.w0.rows, model.w0.cols);
  st.m_w1 = DenseMatrix<T>(model.w1.rows, model.w1.cols);
  st.v_w1 = DenseMatrix<T>(model.w1.rows, model.w1.cols);
  return st;
}

namespace detail {

template <typename T>
void adam_update(DenseMatrix<T>& weights, DenseMatrix<T>& m, DenseMatrix<T>& v,
                 const DenseMatrix<T>& grad, const AdamState<T>& st) {
  if (grad.rows != weights.rows || grad.cols != weights.cols)
    throw std::logic_error("adam_step: gradient shape mismatch");
  const double bc1 = 1.0 - std::pow(st.beta1, static_cast<double>(st.step));
  const double bc2 = 1.0 - std::pow(st.beta2, static_cast<double>(st.step));
  for (std::size_t k = 0; k < weights.data.size(); ++k) {
    const double g = static_cast<double>(grad.data[k]) +
                     st.weight_decay * static_cast<double>(weights.data[k]);
    const double mk = st.beta1 * static_cast<double>(m.data[k]) + (1.0 - st.beta1) * g;
    const double vk = st.beta2 * static_cast<double>(v.data[k]) + (1.0 - st.beta2) * g * g;
    m.data[k] = static_cast<T>(mk);
    v.data[k] = static_cast<T>(vk);
    const double update = st.lr * (mk / bc1) / (std::sqrt(vk / bc2) + st.eps);
    weights.data[k] = static_cast<T>(static_cast<double>(weights.data[k]) - update);
  }
}

}  // namespace detail

/// One bias-corrected step over both weight matrices; increments the step
/// counter first. Throws NumericError on non-finite gradients.
template <typename T>
void adam_step(AdamState<T>& st, GcnModel<T>& model, const Gradients<T>& grads) {
  ensure_finite(grads.w0, "gradient w0");
  ensure_finite(grads.w1, "gradient w1");
  st.step += 1;
  detail::adam_update(model.w0, st.m_w0, st.v_w0, grads.w0, st);
  detail::adam_update(model.w1, st.m_w1, st.v_w1, grads.w1, st);
}

}  // namespace sgmix
