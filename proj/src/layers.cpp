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

#include "xsepconv/layers.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace xsepconv {

std::string_view to_string(Activation a) {
  switch (a) {
    case Activation::ReLU: return "ReLU";
    case Activation::HardSwish: return "HardSwish";
    case Activation::Identity: return "Identity";
  }
  throw std::logic_error("unknown Activation");
}

Activation activation_from_string(std::string_view name) {
  if (name == "ReLU") return Activation::ReLU;
  if (name == "HardSwish") return Activation::HardSwish;
  if (name == "Identity") return Activation::Identity;
  throw std::invalid_argument("unknown activation '" + std::string(name) + "'");
}

double activate(Activation a, double x) {
  switch (a) {
    case Activation::ReLU: return x > 0.0 ? x : 0.0;
    case Activation::HardSwish:
      if (x <= -3.0) return 0.0;
      if (x >= 3.0) return x;
      return x * (x + 3.0) / 6.0;
    case Activation::Identity: return x;
  }
  throw std::logic_error("unknown Activation");
}

double activate_derivative(Activation a, double x) {
  switch (a) {
    case Activation::ReLU: return x > 0.0 ? 1.0 : 0.0;
    case Activation::HardSwish:
      if (x <= -3.0) return 0.0;
      if (x >= 3.0) return 1.0;
      return (2.0 * x + 3.0) / 6.0;
    case Activation::Identity: return 1.0;
  }
  throw std::logic_error("unknown Activation");
}

Tensor4 activation_forward(Activation a, const Tensor4& x) {
  if (a == Activation::Identity) return x;
  Tensor4 y(x.dims());
  auto src = x.data();
  auto dst = y.data();
  for (std::size_t i = 0; i < src.size(); ++i) dst[i] = activate(a, src[i]);
  return y;
}

Tensor4 activation_backward(Activation a, const Tensor4& pre,
                            const Tensor4& grad_out) {
  if (!(pre.dims() == grad_out.dims())) {
    throw std::invalid_argument("activation_backward: dim mismatch");
  }
  if (a == Activation::Identity) return grad_out;
  Tensor4 g(pre.dims());
  auto p = pre.data();
  auto go = grad_out.data();
  auto dst = g.data();
  for (std::size_t i = 0; i < p.size(); ++i) {
    dst[i] = go[i] * activate_derivative(a, p[i]);
  }
  return g;
}

BatchNormParams BatchNormParams::identity(int channels, double epsilon) {
  BatchNormParams bn;
  bn.gamma.assign(channels, 1.0);
  bn.beta.assign(channels, 0.0);
  bn.running_mean.assign(channels, 0.0);
  bn.running_var.assign(channels, 1.0);
  bn.epsilon = epsilon;
  return bn;
}

void validate(const BatchNormParams& bn) {
  const std::size_t c = bn.gamma.size();
  if (c == 0 || bn.beta.size() != c || bn.running_mean.size() != c ||
      bn.running_var.size() != c) {
    throw std::invalid_argument("batch norm: inconsistent channel counts");
  }
  if (bn.epsilon < 0.0) {
    throw std::invalid_argument("batch norm: epsilon must be >= 0");
  }
  for (double v : bn.running_var) {
    if (v < 0.0) throw std::invalid_argument("batch norm: negative variance");
    if (bn.mode == BnMode::Inference && v + bn.epsilon <= 0.0) {
      throw std::invalid_argument("batch norm: var + epsilon must be > 0");
    }
  }
}

namespace {

struct ChannelStats {
  double mean;
  double var;
  double unbiased;
};

ChannelStats channel_stats(const BatchNormParams& bn, const Tensor4& x, int c) {
  const Dims d = x.dims();
  if (bn.mode == BnMode::Inference) {
    return {bn.running_mean[c], bn.running_var[c], bn.running_var[c]};
  }
  const double count = static_cast<double>(d.n) * d.plane();
  double s = 0.0;
  for (int n = 0; n < d.n; ++n) {
    for (double v : x.plane(n, c)) s += v;
  }
  const double mean = s / count;
  double ss = 0.0;
  for (int n = 0; n < d.n; ++n) {
    for (double v : x.plane(n, c)) ss += (v - mean) * (v - mean);
  }
  return {mean, ss / count, count > 1.0 ? ss / (count - 1.0) : ss / count};
}

void check_bn_input(const BatchNormParams& bn, const Tensor4& x) {
  validate(bn);
  if (x.dims().c != bn.channels()) {
    throw std::invalid_argument("batch norm: channel mismatch");
  }
}

}  // namespace

BnForward bn_forward(const BatchNormParams& bn, const Tensor4& x) {
  check_bn_input(bn, x);
  const Dims d = x.dims();
  BnForward f{Tensor4(d), BnCache{Tensor4(d), std::vector<double>(d.c)}, bn};

  for (int c = 0; c < d.c; ++c) {
    const ChannelStats st = channel_stats(bn, x, c);
    if (bn.mode == BnMode::Train) {
      f.updated.running_mean[c] =
          (1.0 - bn.momentum) * bn.running_mean[c] + bn.momentum * st.mean;
      f.updated.running_var[c] =
          (1.0 - bn.momentum) * bn.running_var[c] + bn.momentum * st.unbiased;
    }
    const double inv_std = 1.0 / std::sqrt(st.var + bn.epsilon);
    f.cache.inv_std[c] = inv_std;
    for (int n = 0; n < d.n; ++n) {
      auto src = x.plane(n, c);
      auto xhat = f.cache.normalized.plane(n, c);
      auto dst = f.output.plane(n, c);
      for (std::size_t i = 0; i < src.size(); ++i) {
        xhat[i] = (src[i] - st.mean) * inv_std;
        dst[i] = bn.gamma[c] * xhat[i] + bn.beta[c];
      }
    }
  }
  return f;
}

void bn_activation_inplace(const BatchNormParams& bn, Activation a, Tensor4& x) {
  check_bn_input(bn, x);
  const Dims d = x.dims();
#pragma omp parallel for schedule(static)
  for (int c = 0; c < d.c; ++c) {
    const ChannelStats st = channel_stats(bn, x, c);
    const double inv_std = 1.0 / std::sqrt(st.var + bn.epsilon);
    for (int n = 0; n < d.n; ++n) {
      for (double& v : x.plane(n, c)) {
        const double xhat = (v - st.mean) * inv_std;
        v = activate(a, bn.gamma[c] * xhat + bn.beta[c]);
      }
    }
  }
}

BnBackward bn_backward(const BatchNormParams& bn, const BnCache& cache,
                       const Tensor4& grad_out) {
  const Dims d = grad_out.dims();
  if (!(cache.normalized.dims() == d) || d.c != bn.channels()) {
    throw std::invalid_argument("bn_backward: dim mismatch");
  }
  BnBackward b{Tensor4(d), std::vector<double>(d.c, 0.0),
               std::vector<double>(d.c, 0.0)};
  const double count = static_cast<double>(d.n) * d.plane();

  for (int c = 0; c < d.c; ++c) {
    double sum_dy = 0.0, sum_dy_xhat = 0.0;
    for (int n = 0; n < d.n; ++n) {
      auto dy = grad_out.plane(n, c);
      auto xhat = cache.normalized.plane(n, c);
      for (std::size_t i = 0; i < dy.size(); ++i) {
        sum_dy += dy[i];
        sum_dy_xhat += dy[i] * xhat[i];
      }
    }
    b.grad_gamma[c] = sum_dy_xhat;
    b.grad_beta[c] = sum_dy;
    const double scale = bn.gamma[c] * cache.inv_std[c];
    for (int n = 0; n < d.n; ++n) {
      auto dy = grad_out.plane(n, c);
      auto xhat = cache.normalized.plane(n, c);
      auto dx = b.grad_input.plane(n, c);
      for (std::size_t i = 0; i < dy.size(); ++i) {
        if (bn.mode == BnMode::Train) {
          // Batch statistics depend on every element of the channel.
          dx[i] = scale * (dy[i] - sum_dy / count -
                           xhat[i] * sum_dy_xhat / count);
        } else {
          dx[i] = scale * dy[i];
        }
      }
    }
  }
  return b;
}

}  // namespace xsepconv
