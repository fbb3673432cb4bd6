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

#ifndef XSEPCONV_PADDING_HPP_
#define XSEPCONV_PADDING_HPP_

#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "xsepconv/tensor.hpp"

namespace xsepconv {

// Sides that receive the extra zero row/column for an even-sized kernel.
enum class PadDirection { RightBottom, LeftTop, LeftBottom, RightTop };

PadDirection opposite(PadDirection d);

// Short code used in schedule files: "RB", "LT", "LB", "RT".
std::string_view to_code(PadDirection d);
PadDirection direction_from_code(std::string_view code);

// Signed centroid displacement (dy, dx) in pixels caused by one 2x2 SAME
// layer padded in direction d. Negative points toward top/left.
std::pair<double, double> half_pixel_shift(PadDirection d);

// Padding of one even-kernel layer: a single direction, or the four-group
// within-layer split (GroupedOriginal).
struct PadAssignment {
  enum class Kind { Single, GroupedOriginal };

  Kind kind = Kind::Single;
  PadDirection direction = PadDirection::RightBottom;

  static PadAssignment single(PadDirection d) { return {Kind::Single, d}; }
  static PadAssignment grouped() {
    return {Kind::GroupedOriginal, PadDirection::LeftTop};
  }
  bool is_grouped() const { return kind == Kind::GroupedOriginal; }
  bool operator==(const PadAssignment&) const = default;
};

std::string to_code(const PadAssignment& a);
PadAssignment assignment_from_code(std::string_view code);

struct PaddingSchedule {
  std::vector<PadAssignment> layers;

  int n_even_layers() const { return static_cast<int>(layers.size()); }
};

// SAME padding for a kernel/stride pair. Odd axes pad (k-1)/2 per side;
// even axes pad k/2 on the side named by `direction` and k/2-1 on the other.
// Output size is ceil(in/stride) on both axes for every input size.
PadSpec same_pad(int kernel_h, int kernel_w, int stride_h, int stride_w,
                 std::optional<PadDirection> direction = std::nullopt);

// Cross-layer schedule: layer i (1-based) takes D[i % 4] with
// D1=RightBottom, D2=LeftTop, D3=LeftBottom, D0=RightTop. When N % 4 == 1 the
// last layer falls back to GroupedOriginal.
PaddingSchedule improved_schedule(int n_even_layers);

// Predicted centroid drift (dy, dx) after running the whole schedule through
// uniform 2x2 SAME layers. Each Single layer contributes half a pixel per
// axis; GroupedOriginal contributes nothing.
std::pair<double, double> net_offset(const PaddingSchedule& schedule);

struct ChannelGroup {
  int begin = 0;  // first channel
  int end = 0;    // one past last channel
  PadDirection direction = PadDirection::LeftTop;
};

// Contiguous four-way channel split, earlier groups taking the remainder.
// Empty groups are dropped, so c < 4 yields fewer than four entries.
std::vector<ChannelGroup> channel_groups(int channels);

struct GroupedPadding {
  Tensor4 padded;
  std::vector<ChannelGroup> groups;
};

// Pads each channel group for a 2x2 stride-1 SAME convolution, group g using
// [LeftTop, RightBottom, LeftBottom, RightTop][g]. Output is (h+1) x (w+1)
// for every group.
GroupedPadding grouped_original_pad(const Tensor4& x);

// Inverse of grouped_original_pad's placement: crops each group's window out
// of a (h+1) x (w+1) tensor. Used to route gradients back.
Tensor4 grouped_original_crop(const Tensor4& padded,
                              const std::vector<ChannelGroup>& groups);

}  // namespace xsepconv

#endif  // XSEPCONV_PADDING_HPP_
