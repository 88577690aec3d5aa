#!/usr/bin/env python3
# Copyright 2026 The p2c Authors.
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
"""Writes pert_fixture.pertw, the hand-set single-layer encoder fixture.

Config: L=1, H=4, A=1, ff=8, |Y|=3, |C|=3, max_len=4, eps=1e-12.
Vocabularies are those of pert_fixture.dict (one syllable, one character).

Every tensor is filled from its position k in the canonical tensor list and
the flat row-major element index e:

    layernorm gammas:  1 + ((e + k) % 5 - 2) / 8
    everything else:   ((7 * e + 3 * k) % 17 - 8) / 16

All values are multiples of 1/16 and therefore exact in float32.
Run from this directory: python3 make_pert_fixture.py
"""

import json
import struct

L, H, A, FF, Y, C, MAX_LEN = 1, 4, 1, 8, 3, 3, 4
SYLLABLES = ["a"]
CHARS = ["阿"]


def fnv1a64(data: bytes) -> int:
    h = 0xCBF29CE484222325
    for b in data:
        h ^= b
        h = (h * 0x100000001B3) & 0xFFFFFFFFFFFFFFFF
    return h


def vocab_checksum(entries):
    return fnv1a64(b"".join(e.encode("utf-8") + b"\n" for e in entries))


def tensor_names():
    out = [
        ("embeddings.token", [Y, H]),
        ("embeddings.position", [MAX_LEN, H]),
        ("embeddings.layernorm.gamma", [H]),
        ("embeddings.layernorm.beta", [H]),
    ]
    for l in range(L):
        p = f"layers.{l}."
        for proj in ("query", "key", "value", "output"):
            out.append((p + f"attention.{proj}.weight", [H, H]))
            out.append((p + f"attention.{proj}.bias", [H]))
        out.append((p + "attention.layernorm.gamma", [H]))
        out.append((p + "attention.layernorm.beta", [H]))
        out.append((p + "ffn.intermediate.weight", [H, FF]))
        out.append((p + "ffn.intermediate.bias", [FF]))
        out.append((p + "ffn.output.weight", [FF, H]))
        out.append((p + "ffn.output.bias", [H]))
        out.append((p + "ffn.layernorm.gamma", [H]))
        out.append((p + "ffn.layernorm.beta", [H]))
    out.append(("classifier.weight", [H, C]))
    out.append(("classifier.bias", [C]))
    return out


def value(name, k, e):
    if name.endswith("gamma"):
        return 1 + ((e + k) % 5 - 2) / 8
    return ((7 * e + 3 * k) % 17 - 8) / 16


def main():
    table = []
    data = bytearray()
    for k, (name, shape) in enumerate(tensor_names()):
        numel = 1
        for s in shape:
            numel *= s
        table.append({"name": name, "shape": shape, "offset": len(data)})
        for e in range(numel):
            data += struct.pack("<f", value(name, k, e))
    manifest = {
        "format": "PERTW1",
        "config": {
            "num_layers": L,
            "hidden_size": H,
            "num_heads": A,
            "ff_size": FF,
            "pinyin_vocab_size": Y,
            "char_vocab_size": C,
            "max_len": MAX_LEN,
            "layernorm_epsilon": 1e-12,
            "activation": "gelu",
        },
        "pinyin_vocab_checksum": f"{vocab_checksum(SYLLABLES):016x}",
        "char_vocab_checksum": f"{vocab_checksum(CHARS):016x}",
        "data_checksum": f"{fnv1a64(bytes(data)):016x}",
        "tensors": table,
    }
    text = json.dumps(manifest, indent=1, ensure_ascii=False).encode("utf-8")
    with open("pert_fixture.pertw", "wb") as f:
        f.write(b"PERTW1")
        f.write(struct.pack("<I", len(text)))
        f.write(text)
        f.write(bytes(data))
    with open("pert_fixture.dict", "w", encoding="utf-8") as f:
        f.write("# p2c-dict v1\n")
        for s, c in zip(SYLLABLES, CHARS):
            f.write(f"{s} {c}\n")


if __name__ == "__main__":
    main()
