#!/usr/bin/env python3
# Copyright 2026 The edgepart Authors.
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
"""Regenerates data/mobilenet_v2.jsonl.

Enumerates the leaf modules of torchvision's MobileNetV2 (width 1.0, 1000
classes) in forward order, without importing torch.
"""
import json
import sys

SETTINGS = [  # expansion, out channels, repeats, stride
    (1, 16, 1, 1), (6, 24, 2, 2), (6, 32, 3, 2), (6, 64, 4, 2),
    (6, 96, 3, 1), (6, 160, 3, 2), (6, 320, 1, 1),
]

HEADER = """\
# mobilenet_v2
# Leaf modules of torchvision.models.mobilenet_v2() in forward order (141 total):
#   stem ConvBNReLU6 (3) + 1 block with expansion 1 (5) + 16 blocks with
#   expansion 6 (8 each) + final 1x1 ConvBNReLU6 (3) + Dropout + Linear (2).
# Conv2d rows carry the module's in/out channel attributes; depthwise convs
# therefore report c_in = c_out = hidden width even though groups = c_in.
# BatchNorm2d param_count = 2 * channels (affine weight + bias).
# ReLU6 and Dropout are "other" with param_count 0."""


def build():
    rows = []

    def add(**kw):
        kw["index"] = len(rows)
        rows.append(kw)

    def conv(k, cin, cout, groups=1):
        add(kind="conv2d", kernel_h=k, kernel_w=k, c_in=cin, c_out=cout,
            param_count=k * k * (cin // groups) * cout)

    def bn(c):
        add(kind="other", param_count=2 * c)

    def act():
        add(kind="other", param_count=0)

    conv(3, 3, 32); bn(32); act()
    inp = 32
    for t, c, n, _ in SETTINGS:
        for _ in range(n):
            hidden = inp * t
            if t != 1:
                conv(1, inp, hidden); bn(hidden); act()
            conv(3, hidden, hidden, groups=hidden); bn(hidden); act()
            conv(1, hidden, c); bn(c)
            inp = c
    conv(1, 320, 1280); bn(1280); act()
    act()  # dropout
    add(kind="linear", n_in=1280, n_out=1000, param_count=1280 * 1000 + 1000)
    return rows


def main():
    out = sys.stdout
    print(HEADER, file=out)
    for row in build():
        print(json.dumps(row, sort_keys=True, separators=(",", ":")), file=out)


if __name__ == "__main__":
    main()
