#pragma once

#include <cmath>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>

#include "sgmix/error.hpp"
#include "sgmix/graph.hpp"
#include "sgmix/matrix.hpp"
#include "sgmix/mixup.hpp"
#include "sgmix/rng.hpp"

namespace sgmix {

// Two-layer graph convolution:
//   hidden = dropout(relu(A @ X @ W0))
//   probs  = softmax(A @ hidden @ W1)
// with A the symmetrically normalized adjacency. Forward, losses, exact
// reverse-mode gradients, and the Adam update are all written out by hand;
// the same templates instantiate at float for training and at double for
// finite-difference checks.

template <typename T>
struct GcnModel {
  DenseMatrix<T> w0;  // num_features x hidden
  DenseMatrix<T> w1;  // hidden x num_classes
  std::uint32_t hidden = 0;
  double dropout_p = 0.5;
};

template <typename U, typename T>
GcnModel<U> cast_model(const GcnModel<T>& m) {
  return {m.w0.template cast<U>(), m.w1.template cast<U>(), m.hidden, m.dropout_p};
}

template <typename T>
void ensure_finite(const DenseMatrix<T>& m, const char* what) {
  for (T v : m.data) {
    if (!std::isfinite(v)) throw NumericError(std::string("non-finite value in ") + what);
  }
}

// --- dense kernels -----------------------------------------------------------

/// a (r x k) times b (k x c). Row-sequential accumulation; zero entries of a
/// are skipped, which leaves the result bit-identical and makes sparse 0/1
/// feature matrices cheap.
template <typename T>
DenseMatrix<T> matmul(const DenseMatrix<T>& a, const DenseMatrix<T>& b) {
  if (a.cols != b.rows) throw DataError("matmul: inner dimensions differ");
  DenseMatrix<T> out(a.rows, b.cols);
  for (std::size_t i = 0; i < a.rows; ++i) {
    T* out_row = out.row(i);
    const T* a_row = a.row(i);
    for (std::size_t k = 0; k < a.cols; ++k) {
      const T s = a_row[k];
      if (s == T{0}) continue;
      const T* b_row = b.row(k);
      for (std::size_t j = 0; j < b.cols; ++j) out_row[j] += s * b_row[j];
    }
  }
  return out;
}

/// a^T (k x r) times b (r x c) without materializing the transpose.
template <typename T>
DenseMatrix<T> matmul_at_b(const DenseMatrix<T>& a, const DenseMatrix<T>& b) {
  if (a.rows != b.rows) throw DataError("matmul_at_b: row counts differ");
  DenseMatrix<T> out(a.cols, b.cols);
  for (std::size_t i = 0; i < a.rows; ++i) {
    const T* a_row = a.row(i);
    const T* b_row = b.row(i);
    for (std::size_t k = 0; k < a.cols; ++k) {
      const T s = a_row[k];
      if (s == T{0}) continue;
      T* out_row = out.row(k);
      for (std::size_t j = 0; j < b.cols; ++j) out_row[j] += s * b_row[j];
    }
  }
  return out;
}

/// a (r x k) times b^T (k x c), i.e. out[i][j] = dot(a.row(i), b.row(j)).
template <typename T>
DenseMatrix<T> matmul_a_bt(const DenseMatrix<T>& a, const DenseMatrix<T>& b) {
  if (a.cols != b.cols) throw DataError("matmul_a_bt: column counts differ");
  DenseMatrix<T> out(a.rows, b.rows);
  for (std::size_t i = 0; i < a.rows; ++i) {
    const T* a_row = a.row(i);
    T* out_row = out.row(i);
    for (std::size_t j = 0; j < b.rows; ++j) {
      const T* b_row = b.row(j);
      T acc{0};
      for (std::size_t k = 0; k < a.cols; ++k) acc += a_row[k] * b_row[k];
      out_row[j] = acc;
    }
  }
  return out;
}

/// Sparse-dense product with the normalized adjacency. Weights are stored in
/// double and rounded to T at use, so both precisions share one structure.
template <typename T>
DenseMatrix<T> spmm(const NormalizedAdjacency& adj, const DenseMatrix<T>& dense) {
  if (adj.num_nodes() != dense.rows) throw DataError("spmm: adjacency/dense shape mismatch");
  DenseMatrix<T> out(dense.rows, dense.cols);
  for (std::size_t u = 0; u < adj.num_nodes(); ++u) {
    T* out_row = out.row(u);
    const std::uint64_t begin = adj.structure.offsets[u];
    const std::uint64_t end = adj.structure.offsets[u + 1];
    for (std::uint64_t e = begin; e < end; ++e) {
      const T w = static_cast<T>(adj.weights[e]);
      const T* src = dense.row(adj.structure.cols[e]);
      for (std::size_t j = 0; j < dense.cols; ++j) out_row[j] += w * src[j];
    }
  }
  return out;
}

// --- initialization -----------------------------------------------------------

/// Uniform Glorot: entries in +-sqrt(6 / (fan_in + fan_out)).
template <typename T>
DenseMatrix<T> glorot_init(std::size_t fan_in, std::size_t fan_out, RngStream& rng) {
  DenseMatrix<T> w(fan_in, fan_out);
  const double bound = std::sqrt(6.0 / static_cast<double>(fan_in + fan_out));
  for (auto& v : w.data) v = static_cast<T>((2.0 * rng.uniform() - 1.0) * bound);
  return w;
}

template <typename T>
GcnModel<T> init_model(std::uint32_t num_features, std::uint32_t hidden,
                       std::uint32_t num_classes, double dropout_p, RngStream& rng) {
  GcnModel<T> m;
  m.hidden = hidden;
  m.dropout_p = dropout_p;
  m.w0 = glorot_init<T>(num_features, hidden, rng);
  m.w1 = glorot_init<T>(hidden, num_classes, rng);
  return m;
}

// --- forward -------------------------------------------------------------------

template <typename T>
struct ForwardTrace {
  DenseMatrix<T> pre_hidden;    // A @ X @ W0, before ReLU
  DenseMatrix<T> hidden;        // after ReLU (and dropout in train mode)
  DenseMatrix<T> dropout_mask;  // entries 0 or 1/(1-p); empty if not applied
  DenseMatrix<T> logits;        // A @ hidden @ W1
  DenseMatrix<T> probs;         // row-wise softmax of logits
  bool train_mode = false;
};

template <typename T>
DenseMatrix<T> sample_dropout_mask(std::size_t rows, std::size_t cols, double p,
                                   RngStream& rng) {
  DenseMatrix<T> mask(rows, cols);
  const T keep = static_cast<T>(1.0 / (1.0 - p));
  for (auto& v : mask.data) v = rng.uniform() >= p ? keep : T{0};
  return mask;
}

/// Train mode applies inverted dropout to the hidden layer, drawing a fresh
/// mask from rng unless reuse_mask pins one (gradient checks replay the same
/// mask across loss evaluations). Eval mode is fully deterministic.
template <typename T>
ForwardTrace<T> forward(const GcnModel<T>& model, const NormalizedAdjacency& adj,
                        const DenseMatrix<T>& x, bool train_mode, RngStream* rng,
                        const DenseMatrix<T>* reuse_mask = nullptr) {
  if (x.cols != model.w0.rows) throw DataError("forward: feature width != w0 rows");
  if (model.w0.cols != model.w1.rows) throw DataError("forward: w0/w1 shapes incompatible");
  ensure_finite(x, "features");
  ensure_finite(model.w0, "w0");
  ensure_finite(model.w1, "w1");

  ForwardTrace<T> tr;
  tr.train_mode = train_mode;
  tr.pre_hidden = spmm(adj, matmul(x, model.w0));

  tr.hidden = tr.pre_hidden;
  for (auto& v : tr.hidden.data) v = v > T{0} ? v : T{0};

  const bool apply_dropout = train_mode && model.dropout_p > 0.0;
  if (apply_dropout) {
    if (reuse_mask != nullptr) {
      tr.dropout_mask = *reuse_mask;
    } else {
      if (rng == nullptr) throw UsageError("forward: train mode with dropout needs an rng");
      tr.dropout_mask =
          sample_dropout_mask<T>(tr.hidden.rows, tr.hidden.cols, model.dropout_p, *rng);
    }
    for (std::size_t k = 0; k < tr.hidden.data.size(); ++k)
      tr.hidden.data[k] *= tr.dropout_mask.data[k];
  }

  tr.logits = spmm(adj, matmul(tr.hidden, model.w1));

  tr.probs = DenseMatrix<T>(tr.logits.rows, tr.logits.cols);
  for (std::size_t i = 0; i < tr.logits.rows; ++i) {
    const T* z = tr.logits.row(i);
    T* p = tr.probs.row(i);
    T zmax = z[0];
    for (std::size_t c = 1; c < tr.logits.cols; ++c) zmax = std::max(zmax, z[c]);
    T sum{0};
    for (std::size_t c = 0; c < tr.logits.cols; ++c) {
      p[c] = std::exp(z[c] - zmax);
      sum += p[c];
    }
    for (std::size_t c = 0; c < tr.logits.cols; ++c) p[c] /= sum;
  }
  return tr;
}

// --- losses ---------------------------------------------------------------------

/// -log softmax(logits[row])[cls], evaluated in double via log-sum-exp.
template <typename T>
double cross_entropy_at(const DenseMatrix<T>& logits, std::size_t row, std::size_t cls) {
  const T* z = logits.row(row);
  double zmax = static_cast<double>(z[0]);
  for (std::size_t c = 1; c < logits.cols; ++c) zmax = std::max(zmax, static_cast<double>(z[c]));
  double sum = 0.0;
  for (std::size_t c = 0; c < logits.cols; ++c) sum += std::exp(static_cast<double>(z[c]) - zmax);
  return -(static_cast<double>(z[cls]) - zmax - std::log(sum));
}

/// Mean cross-entropy over train-masked nodes.
template <typename T>
double loss_main(const ForwardTrace<T>& trace, std::span<const Label> labels,
                 std::span<const std::uint8_t> masks) {
  double sum = 0.0;
  std::size_t count = 0;
  for (std::size_t u = 0; u < masks.size(); ++u) {
    if (masks[u] & kRoleTrain) {
      sum += cross_entropy_at(trace.logits, u, labels[u]);
      ++count;
    }
  }
  if (count == 0) throw DataError("loss_main: no train-masked nodes");
  return sum / static_cast<double>(count);
}

/// Mean over pairs of lambda * CE(y_i) + (1 - lambda) * CE(y_j), read at each
/// pair's virtual node. Real nodes contribute nothing.
template <typename T>
double loss_mixup(const ForwardTrace<T>& trace, const VirtualGraphBatch& batch) {
  if (batch.pairs.empty()) throw DataError("loss_mixup: batch has no pairs");
  double sum = 0.0;
  for (std::size_t k = 0; k < batch.pairs.size(); ++k) {
    const std::size_t v = batch.virtual_indices[k];
    if (v >= trace.logits.rows) throw std::logic_error("loss_mixup: virtual index out of range");
    const MixupPair& p = batch.pairs[k];
    sum += p.lambda * cross_entropy_at(trace.logits, v, p.label_i) +
           (1.0 - p.lambda) * cross_entropy_at(trace.logits, v, p.label_j);
  }
  return sum / static_cast<double>(batch.pairs.size());
}

inline double loss_total(double main, double mixup, double mu) { return main + mu * mixup; }

// --- backward -------------------------------------------------------------------

template <typename T>
struct Gradients {
  DenseMatrix<T> w0;
  DenseMatrix<T> w1;
};

/// Inputs of the virtual-batch branch, bundled for backward().
template <typename T>
struct MixupBranch {
  const NormalizedAdjacency* adj = nullptr;
  const DenseMatrix<T>* features = nullptr;
  const ForwardTrace<T>* trace = nullptr;
  const VirtualGraphBatch* batch = nullptr;
};

namespace detail {

/// Backprop through one two-layer stack given dL/dlogits.
template <typename T>
Gradients<T> layers_backward(const GcnModel<T>& model, const NormalizedAdjacency& adj,
                             const DenseMatrix<T>& x, const ForwardTrace<T>& trace,
                             const DenseMatrix<T>& d_logits) {
  if (trace.hidden.cols != model.w1.rows || trace.pre_hidden.cols != model.w0.cols)
    throw std::logic_error("layers_backward: trace/weight shape mismatch");
  Gradients<T> g;
  // A is symmetric, so dL/d(hidden @ W1) = A^T @ dL/dlogits = A @ dL/dlogits.
  DenseMatrix<T> d_t2 = spmm(adj, d_logits);
  g.w1 = matmul_at_b(trace.hidden, d_t2);
  DenseMatrix<T> d_hidden = matmul_a_bt(d_t2, model.w1);
  if (!trace.dropout_mask.empty()) {
    for (std::size_t k = 0; k < d_hidden.data.size(); ++k)
      d_hidden.data[k] *= trace.dropout_mask.data[k];
  }
  for (std::size_t k = 0; k < d_hidden.data.size(); ++k) {
    if (!(trace.pre_hidden.data[k] > T{0})) d_hidden.data[k] = T{0};
  }
  DenseMatrix<T> d_t1 = spmm(adj, d_hidden);
  g.w0 = matmul_at_b(x, d_t1);
  return g;
}

}  // namespace detail

/// Exact gradients of loss_main + mu * loss_mixup with respect to both weight
/// matrices. The traces must come from matching forward calls (same dropout
/// masks). Pass mix = nullptr (or mu = 0 with no branch) for vanilla training.
template <typename T>
Gradients<T> backward(const GcnModel<T>& model, const NormalizedAdjacency& adj,
                      const DenseMatrix<T>& x, const ForwardTrace<T>& trace,
                      std::span<const Label> labels, std::span<const std::uint8_t> masks,
                      const MixupBranch<T>* mix, double mu) {
  std::size_t train_count = 0;
  for (std::uint8_t m : masks) {
    if (m & kRoleTrain) ++train_count;
  }
  if (train_count == 0) throw DataError("backward: no train-masked nodes");

  DenseMatrix<T> d_logits(trace.probs.rows, trace.probs.cols);
  const T inv_count = static_cast<T>(1.0 / static_cast<double>(train_count));
  for (std::size_t u = 0; u < masks.size(); ++u) {
    if (!(masks[u] & kRoleTrain)) continue;
    const T* p = trace.probs.row(u);
    T* d = d_logits.row(u);
    for (std::size_t c = 0; c < d_logits.cols; ++c) d[c] = p[c] * inv_count;
    d[labels[u]] -= inv_count;
  }
  Gradients<T> g = detail::layers_backward(model, adj, x, trace, d_logits);

  if (mix != nullptr && mu != 0.0) {
    const VirtualGraphBatch& batch = *mix->batch;
    DenseMatrix<T> d_mix(mix->trace->probs.rows, mix->trace->probs.cols);
    const double inv_pairs = 1.0 / static_cast<double>(batch.pairs.size());
    for (std::size_t k = 0; k < batch.pairs.size(); ++k) {
      const MixupPair& pr = batch.pairs[k];
      const std::size_t v = batch.virtual_indices[k];
      const T* p = mix->trace->probs.row(v);
      T* d = d_mix.row(v);
      for (std::size_t c = 0; c < d_mix.cols; ++c) d[c] = static_cast<T>(p[c] * inv_pairs);
      d[pr.label_i] -= static_cast<T>(pr.lambda * inv_pairs);
      d[pr.label_j] -= static_cast<T>((1.0 - pr.lambda) * inv_pairs);
    }
    Gradients<T> gm =
        detail::layers_backward(model, *mix->adj, *mix->features, *mix->trace, d_mix);
    const T mu_t = static_cast<T>(mu);
    for (std::size_t k = 0; k < g.w0.data.size(); ++k) g.w0.data[k] += mu_t * gm.w0.data[k];
    for (std::size_t k = 0; k < g.w1.data.size(); ++k) g.w1.data[k] += mu_t * gm.w1.data[k];
  }
  return g;
}

}  // namespace sgmix
