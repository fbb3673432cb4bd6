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

#include "xsepconv/padding.hpp"

#include <algorithm>
#include <array>
#include <stdexcept>

namespace xsepconv {

namespace {

bool pads_bottom(PadDirection d) {
  return d == PadDirection::RightBottom || d == PadDirection::LeftBottom;
}

bool pads_right(PadDirection d) {
  return d == PadDirection::RightBottom || d == PadDirection::RightTop;
}

// Cycle indexed by i % 4 for 1-based layer index i.
constexpr std::array<PadDirection, 4> kCycle = {
    PadDirection::RightTop,     // D0
    PadDirection::RightBottom,  // D1
    PadDirection::LeftTop,      // D2
    PadDirection::LeftBottom,   // D3
};

constexpr std::array<PadDirection, 4> kGroupDirections = {
    PadDirection::LeftTop, PadDirection::RightBottom, PadDirection::LeftBottom,
    PadDirection::RightTop};

PadSpec two_by_two_pad(PadDirection d) { return same_pad(2, 2, 1, 1, d); }

}  // namespace

PadDirection opposite(PadDirection d) {
  switch (d) {
    case PadDirection::RightBottom: return PadDirection::LeftTop;
    case PadDirection::LeftTop: return PadDirection::RightBottom;
    case PadDirection::LeftBottom: return PadDirection::RightTop;
    case PadDirection::RightTop: return PadDirection::LeftBottom;
  }
  throw std::logic_error("unknown PadDirection");
}

std::string_view to_code(PadDirection d) {
  switch (d) {
    case PadDirection::RightBottom: return "RB";
    case PadDirection::LeftTop: return "LT";
    case PadDirection::LeftBottom: return "LB";
    case PadDirection::RightTop: return "RT";
  }
  throw std::logic_error("unknown PadDirection");
}

PadDirection direction_from_code(std::string_view code) {
  if (code == "RB") return PadDirection::RightBottom;
  if (code == "LT") return PadDirection::LeftTop;
  if (code == "LB") return PadDirection::LeftBottom;
  if (code == "RT") return PadDirection::RightTop;
  throw std::invalid_argument("unknown padding direction code '" +
                              std::string(code) + "'");
}

std::string to_code(const PadAssignment& a) {
  return a.is_grouped() ? std::string("GROUPED")
                        : std::string(to_code(a.direction));
}

PadAssignment assignment_from_code(std::string_view code) {
  if (code == "GROUPED") return PadAssignment::grouped();
  return PadAssignment::single(direction_from_code(code));
}

std::pair<double, double> half_pixel_shift(PadDirection d) {
  // Extra zero at the bottom means output row y sees input rows y and y+1,
  // so mass moves up by half a pixel.
  return {pads_bottom(d) ? -0.5 : 0.5, pads_right(d) ? -0.5 : 0.5};
}

PadSpec same_pad(int kernel_h, int kernel_w, int stride_h, int stride_w,
                 std::optional<PadDirection> direction) {
  if (kernel_h < 1 || kernel_w < 1) {
    throw std::invalid_argument("same_pad: kernel dims must be >= 1");
  }
  auto stride_ok = [](int s) { return s == 1 || s == 2; };
  if (!stride_ok(stride_h) || !stride_ok(stride_w)) {
    throw std::invalid_argument("same_pad: strides must be 1 or 2");
  }
  const bool even_h = kernel_h % 2 == 0;
  const bool even_w = kernel_w % 2 == 0;
  if ((even_h || even_w) && !direction) {
    throw std::invalid_argument(
        "same_pad: even kernel axis requires a padding direction");
  }
  PadSpec p;
  if (even_h) {
    const int big = kernel_h / 2, small = kernel_h / 2 - 1;
    p.top = pads_bottom(*direction) ? small : big;
    p.bottom = pads_bottom(*direction) ? big : small;
  } else {
    p.top = p.bottom = (kernel_h - 1) / 2;
  }
  if (even_w) {
    const int big = kernel_w / 2, small = kernel_w / 2 - 1;
    p.left = pads_right(*direction) ? small : big;
    p.right = pads_right(*direction) ? big : small;
  } else {
    p.left = p.right = (kernel_w - 1) / 2;
  }
  return p;
}

PaddingSchedule improved_schedule(int n_even_layers) {
  if (n_even_layers < 0) {
    throw std::invalid_argument("improved_schedule: negative layer count");
  }
  PaddingSchedule s;
  s.layers.reserve(n_even_layers);
  for (int i = 1; i <= n_even_layers; ++i) {
    s.layers.push_back(PadAssignment::single(kCycle[i % 4]));
  }
  if (n_even_layers % 4 == 1) s.layers.back() = PadAssignment::grouped();
  return s;
}

std::pair<double, double> net_offset(const PaddingSchedule& schedule) {
  double dy = 0.0, dx = 0.0;
  for (const auto& a : schedule.layers) {
    if (a.is_grouped()) continue;
    const auto [sy, sx] = half_pixel_shift(a.direction);
    dy += sy;
    dx += sx;
  }
  return {dy, dx};
}

std::vector<ChannelGroup> channel_groups(int channels) {
  if (channels < 1) {
    throw std::invalid_argument("channel_groups: zero channels");
  }
  std::vector<ChannelGroup> groups;
  const int base = channels / 4, rem = channels % 4;
  int begin = 0;
  for (int g = 0; g < 4; ++g) {
    const int size = base + (g < rem ? 1 : 0);
    if (size == 0) continue;
    groups.push_back({begin, begin + size, kGroupDirections[g]});
    begin += size;
  }
  return groups;
}

GroupedPadding grouped_original_pad(const Tensor4& x) {
  const Dims& d = x.dims();
  GroupedPadding result{Tensor4(Dims{d.n, d.c, d.h + 1, d.w + 1}),
                        channel_groups(d.c)};
  for (const auto& g : result.groups) {
    const PadSpec p = two_by_two_pad(g.direction);
    for (int n = 0; n < d.n; ++n) {
      for (int c = g.begin; c < g.end; ++c) {
        for (int y = 0; y < d.h; ++y) {
          for (int xx = 0; xx < d.w; ++xx) {
            result.padded(n, c, y + p.top, xx + p.left) = x(n, c, y, xx);
          }
        }
      }
    }
  }
  return result;
}

Tensor4 grouped_original_crop(const Tensor4& padded,
                              const std::vector<ChannelGroup>& groups) {
  const Dims& d = padded.dims();
  if (d.h < 2 || d.w < 2) {
    throw std::invalid_argument("grouped_original_crop: tensor too small");
  }
  Tensor4 out(Dims{d.n, d.c, d.h - 1, d.w - 1});
  for (const auto& g : groups) {
    if (g.end > d.c) {
      throw std::invalid_argument("grouped_original_crop: group out of range");
    }
    const PadSpec p = two_by_two_pad(g.direction);
    for (int n = 0; n < d.n; ++n) {
      for (int c = g.begin; c < g.end; ++c) {
        for (int y = 0; y < d.h - 1; ++y) {
          for (int xx = 0; xx < d.w - 1; ++xx) {
            out(n, c, y, xx) = padded(n, c, y + p.top, xx + p.left);
          }
        }
      }
    }
  }
  return out;
}

}  // namespace xsepconv
