/* Copyright 2026 The XSepConv Authors. All Rights Reserved.

Licensed under the Apache License, Version 2.0 (the "License");
you may not use this file except in compliance with the License.
You may obtain a copy of the License at

    http://www.apache.org/licenses/LICENSE-2.0

Unless required by applicable law or agreed to in writing, software
distributed under the License is distributed on an "AS IS" BASIS,
WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
See the License for the specific language governing permissions and
limitations under the License.
==============================================================================*/

#include "xsepconv/toy_train.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <sstream>
#include <stdexcept>
#include <tuple>

#include "xsepconv/verification.hpp"

namespace xsepconv {

namespace {

constexpr int kSide = 16;
constexpr int kClasses = 3;

struct Model {
  std::vector<BlockSpec> specs;
  std::vector<BlockState> states;
  std::vector<double> head_w;  // kClasses x channels
  std::vector<double> head_b;
  int channels = 0;
};

struct Forward {
  std::vector<Tensor4> inputs;  // input of every block
  std::vector<BlockState> updated;
  std::vector<double> pooled;   // n x channels
  std::vector<double> probs;    // n x kClasses
  Dims last{};
};

Tensor4 subset(const Tensor4& images, const std::vector<int>& idx,
               std::size_t begin, std::size_t end) {
  const Dims d = images.dims();
  Tensor4 out(Dims{static_cast<int>(end - begin), d.c, d.h, d.w});
  const std::size_t item = static_cast<std::size_t>(d.c) * d.plane();
  for (std::size_t i = begin; i < end; ++i) {
    const double* src = images.data().data() + static_cast<std::size_t>(idx[i]) * item;
    std::copy(src, src + item, out.data().data() + (i - begin) * item);
  }
  return out;
}

Forward forward(const Model& m, const Tensor4& images) {
  const Dims d = images.dims();
  Tensor4 h(Dims{d.n, m.channels, d.h, d.w});
  for (int n = 0; n < d.n; ++n) {
    for (int c = 0; c < m.channels; ++c) {
      auto dst = h.plane(n, c);
      auto src = images.plane(n, 0);
      std::copy(src.begin(), src.end(), dst.begin());
    }
  }
  Forward f;
  for (std::size_t b = 0; b < m.specs.size(); ++b) {
    f.inputs.push_back(h);
    BlockTrace t = block_forward_trace(m.states[b], m.specs[b], h);
    f.updated.push_back(std::move(t.updated));
    h = std::move(t.output);
  }
  f.last = h.dims();
  const double inv_area = 1.0 / static_cast<double>(f.last.plane());
  f.pooled.assign(static_cast<std::size_t>(d.n) * m.channels, 0.0);
  f.probs.assign(static_cast<std::size_t>(d.n) * kClasses, 0.0);
  for (int n = 0; n < d.n; ++n) {
    for (int c = 0; c < m.channels; ++c) {
      double s = 0.0;
      for (double v : h.plane(n, c)) s += v;
      f.pooled[n * m.channels + c] = s * inv_area;
    }
    double logits[kClasses];
    double top = -INFINITY;
    for (int k = 0; k < kClasses; ++k) {
      double z = m.head_b[k];
      for (int c = 0; c < m.channels; ++c) {
        z += m.head_w[k * m.channels + c] * f.pooled[n * m.channels + c];
      }
      logits[k] = z;
      top = std::max(top, z);
    }
    double norm = 0.0;
    for (double& z : logits) norm += (z = std::exp(z - top));
    for (int k = 0; k < kClasses; ++k) f.probs[n * kClasses + k] = logits[k] / norm;
  }
  return f;
}

// Mean cross-entropy and accuracy.
std::pair<double, double> score(const Forward& f, const std::vector<int>& labels,
                                const std::vector<int>& idx, std::size_t begin) {
  const std::size_t n = f.probs.size() / kClasses;
  double loss = 0.0;
  std::size_t correct = 0;
  for (std::size_t i = 0; i < n; ++i) {
    const int y = labels[idx[begin + i]];
    const double* p = &f.probs[i * kClasses];
    loss -= std::log(std::max(p[y], 1e-300));
    int best = 0;
    for (int k = 1; k < kClasses; ++k) {
      if (p[k] > p[best]) best = k;
    }
    correct += best == y;
  }
  return {loss / static_cast<double>(n),
          static_cast<double>(correct) / static_cast<double>(n)};
}

std::vector<int> iota_index(int n) {
  std::vector<int> idx(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) idx[i] = i;
  return idx;
}

EpochMetrics evaluate(const Model& m, const ToyDataset& train,
                      const ToyDataset& test, int epoch) {
  EpochMetrics e;
  e.epoch = epoch;
  const auto tr_idx = iota_index(static_cast<int>(train.labels.size()));
  const auto te_idx = iota_index(static_cast<int>(test.labels.size()));
  std::tie(e.train_loss, e.train_acc) =
      score(forward(m, train.images), train.labels, tr_idx, 0);
  std::tie(e.test_loss, e.test_acc) =
      score(forward(m, test.images), test.labels, te_idx, 0);
  return e;
}

void sgd_step(Model& m, const Tensor4& batch, const std::vector<int>& labels,
              const std::vector<int>& idx, std::size_t begin, double lr) {
  Forward f = forward(m, batch);
  const int n = batch.dims().n;
  const int C = m.channels;
  std::vector<double> dlogits(f.probs);
  for (int i = 0; i < n; ++i) {
    dlogits[i * kClasses + labels[idx[begin + i]]] -= 1.0;
    for (int k = 0; k < kClasses; ++k) dlogits[i * kClasses + k] /= n;
  }
  std::vector<double> dw(m.head_w.size(), 0.0), db(kClasses, 0.0);
  Tensor4 grad(f.last);
  const double inv_area = 1.0 / static_cast<double>(f.last.plane());
  for (int i = 0; i < n; ++i) {
    for (int k = 0; k < kClasses; ++k) {
      const double g = dlogits[i * kClasses + k];
      db[k] += g;
      for (int c = 0; c < C; ++c) dw[k * C + c] += g * f.pooled[i * C + c];
    }
    for (int c = 0; c < C; ++c) {
      double g = 0.0;
      for (int k = 0; k < kClasses; ++k) {
        g += m.head_w[k * C + c] * dlogits[i * kClasses + k];
      }
      for (double& v : grad.plane(i, c)) v = g * inv_area;
    }
  }
  for (int b = static_cast<int>(m.specs.size()) - 1; b >= 0; --b) {
    BlockBackward bb = block_backward(m.states[b], m.specs[b], f.inputs[b], grad);
    BlockState& s = m.states[b];
    s = std::move(f.updated[b]);  // running statistics from this batch
    for (std::size_t l = 0; l < s.weights.size(); ++l) {
      auto& w = s.weights[l].values();
      const auto& g = bb.grads.weights[l].values();
      for (std::size_t j = 0; j < w.size(); ++j) w[j] -= lr * g[j];
      for (int c = 0; c < C; ++c) {
        s.bn[l].gamma[c] -= lr * bb.grads.gamma[l][c];
        s.bn[l].beta[c] -= lr * bb.grads.beta[l][c];
      }
    }
    grad = std::move(bb.grad_input);
  }
  for (std::size_t j = 0; j < dw.size(); ++j) m.head_w[j] -= lr * dw[j];
  for (int k = 0; k < kClasses; ++k) m.head_b[k] -= lr * db[k];
}

}  // namespace

ToyDataset make_toy_dataset(int samples, std::uint64_t seed) {
  if (samples < 1) throw std::invalid_argument("toy dataset needs samples >= 1");
  Rng rng(seed);
  ToyDataset d{Tensor4(Dims{samples, 1, kSide, kSide}), {}};
  for (int n = 0; n < samples; ++n) {
    for (double& v : d.images.plane(n, 0)) v = rng.uniform(-0.05, 0.05);
    const int label = rng.integer(0, kClasses - 1);
    const int len = rng.integer(6, 10);
    int y0 = 0, x0 = 0, dy = 0, dx = 0;
    if (label == 0) {
      y0 = rng.integer(1, kSide - 2);
      x0 = rng.integer(0, kSide - len);
      dx = 1;
    } else if (label == 1) {
      x0 = rng.integer(1, kSide - 2);
      y0 = rng.integer(0, kSide - len);
      dy = 1;
    } else {
      dy = 1;
      dx = rng.integer(0, 1) ? 1 : -1;
      y0 = rng.integer(0, kSide - len);
      x0 = dx > 0 ? rng.integer(0, kSide - len) : rng.integer(len - 1, kSide - 1);
    }
    for (int t = 0; t < len; ++t) d.images(n, 0, y0 + t * dy, x0 + t * dx) += 1.0;
    d.labels.push_back(label);
  }
  return d;
}

ToyReport train_toy(const ToyOptions& o) {
  if (o.epochs < 1) throw std::invalid_argument("epochs must be >= 1");
  if (o.batch < 2) throw std::invalid_argument("batch must be >= 2 for batch norm");
  if (!(o.learning_rate > 0.0)) throw std::invalid_argument("learning rate must be > 0");
  Rng master(o.seed);
  const ToyDataset train = make_toy_dataset(o.train_samples, master.next());
  const ToyDataset test = make_toy_dataset(o.test_samples, master.next());

  Model m;
  m.channels = o.channels;
  const PaddingSchedule schedule = improved_schedule(3);
  for (int b = 0; b < 3; ++b) {
    BlockSpec spec;
    spec.variant = o.variant;
    spec.k = o.k;
    spec.c = o.channels;
    spec.stride = o.variant == BlockVariant::XSepDownsample ? Stride{2, 2} : Stride{1, 1};
    spec.activation = Activation::HardSwish;
    spec.pad = schedule.layers[b];
    validate(spec);
    BlockState state = init_block(spec, master.next());
    set_bn_mode(state, BnMode::Train);
    m.specs.push_back(spec);
    m.states.push_back(std::move(state));
  }
  const double bound = std::sqrt(6.0 / (o.channels + kClasses));
  for (int j = 0; j < kClasses * o.channels; ++j) {
    m.head_w.push_back(master.uniform(-bound, bound));
  }
  m.head_b.assign(kClasses, 0.0);

  ToyReport report;
  report.epochs.push_back(evaluate(m, train, test, 0));
  std::vector<int> order = iota_index(o.train_samples);
  for (int epoch = 1; epoch <= o.epochs; ++epoch) {
    for (int i = o.train_samples - 1; i > 0; --i) {
      std::swap(order[i], order[master.integer(0, i)]);
    }
    for (std::size_t begin = 0; begin < order.size(); begin += o.batch) {
      const std::size_t end = std::min(order.size(), begin + o.batch);
      if (end - begin < 2) break;
      sgd_step(m, subset(train.images, order, begin, end), train.labels, order,
               begin, o.learning_rate);
    }
    const EpochMetrics e = evaluate(m, train, test, epoch);
    report.epochs.push_back(e);
    if (!std::isfinite(e.train_loss) || !std::isfinite(e.test_loss)) {
      report.diverged = true;
      break;
    }
  }
  return report;
}

std::string to_csv(const ToyReport& report) {
  std::ostringstream out;
  out << "epoch,train_loss,train_acc,test_loss,test_acc\n";
  char buf[160];
  for (const auto& e : report.epochs) {
    std::snprintf(buf, sizeof buf, "%d,%.6f,%.6f,%.6f,%.6f\n", e.epoch,
                  e.train_loss, e.train_acc, e.test_loss, e.test_acc);
    out << buf;
  }
  return out.str();
}

}  // namespace xsepconv
