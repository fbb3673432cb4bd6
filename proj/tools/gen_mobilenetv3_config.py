#!/usr/bin/env python3
# Copyright 2026 The XSepConv Authors. All Rights Reserved.
#
# Licensed under the Apache License, Version 2.0 (the "License");
# you may not use this file except in compliance with the License.
# You may obtain a copy of the License at
#
#     http://www.apache.org/licenses/LICENSE-2.0
#
# Unless required by applicable law or agreed to in writing, software
# distributed under the License is distributed on an "AS IS" BASIS,
# WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
# See the License for the specific language governing permissions and
# limitations under the License.
# ==============================================================================
"""Writes configs/mobilenetv3-small-cifar.json.

MobileNetV3-Small on 32x32 inputs: the stem and first bottleneck keep
stride 1, leaving three downsampling bottlenecks (32 -> 16 -> 8 -> 4).
Everything except the depthwise convolutions is an opaque cost entry.
"""

import json
import math
import sys

# k, expand, out, squeeze-excite, stride
BNECKS = [
    (3, 16, 16, True, 1),
    (3, 72, 24, False, 2),
    (3, 88, 24, False, 1),
    (5, 96, 40, True, 2),
    (5, 240, 40, True, 1),
    (5, 240, 40, True, 1),
    (5, 120, 48, True, 1),
    (5, 144, 48, True, 1),
    (5, 288, 96, True, 2),
    (5, 576, 96, True, 1),
    (5, 576, 96, True, 1),
]
CLASSES = 10


def make_divisible(v, divisor=8):
    r = max(divisor, int(v + divisor / 2) // divisor * divisor)
    return r + divisor if r < 0.9 * v else r


def opaque(name, c, macs, params, **extra):
    return dict(name=name, kind="opaque", c=c, opaque_macs=macs,
                opaque_params=params, **extra)


def build():
    h = 32
    layers = [opaque("stem_conv3x3", 16, 27 * 16 * h * h, 27 * 16 + 2 * 16)]
    cin = 16
    for i, (k, e, o, se, s) in enumerate(BNECKS, start=1):
        tag = "bneck%d" % i
        if e != cin:
            layers.append(opaque(tag + ".expand", e, cin * e * h * h, cin * e + 2 * e))
        layers.append(dict(name=tag + ".dw", kind="dw", k=k, c=e, stride=s, h=h, w=h))
        h = math.ceil(h / s)
        layers.append(opaque(tag + ".dw_bn", e, 0, 2 * e))
        if se:
            r = make_divisible(e / 4)
            layers.append(opaque(tag + ".se", e, 2 * e * r, 2 * e * r + r + e))
        layers.append(opaque(tag + ".project", o, e * o * h * h, e * o + 2 * o))
        cin = o
    layers.append(opaque("head_conv1x1", 576, 96 * 576 * h * h, 96 * 576 + 2 * 576))
    layers.append(opaque("pool_fc1024", 1024, 576 * 1024, 576 * 1024 + 1024,
                         out_hw=[1, 1]))
    layers.append(opaque("classifier", CLASSES, 1024 * CLASSES,
                         1024 * CLASSES + CLASSES))
    return {
        "input": [3, 32, 32],
        "layers": layers,
        "reference": {
            "flops_convention": "macs",
            "baseline_flops": 17.51e6,
            "substituted_flops": 16.71e6,
            "baseline_params": 1.52e6,
            "substituted_params": 1.50e6,
        },
    }


if __name__ == "__main__":
    out = sys.argv[1] if len(sys.argv) > 1 else "configs/mobilenetv3-small-cifar.json"
    with open(out, "w", encoding="utf-8") as f:
        json.dump(build(), f, indent=2)
        f.write("\n")
