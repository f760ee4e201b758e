#!/usr/bin/env python3
# Copyright 2026 The qvsmt Authors
#
# Licensed under the Apache License, Version 2.0 (the "License");
# you may not use this file except in compliance with the License.
# You may obtain a copy of the License at
#
#      http://www.apache.org/licenses/LICENSE-2.0
#
# Unless required by applicable law or agreed to in writing, software
# distributed under the License is distributed on an "AS IS" BASIS,
# WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
# See the License for the specific language governing permissions and
# limitations under the License.
"""Structural diff of an SMT-LIB dump against a golden row map.

usage: golden_diff.py MAP [DUMP | --qvsmt BIN ARGS...]
"""

import re
import subprocess
import sys

BRANCHES = ["00", "01", "10", "11"]


def parse_sexpr(text):
    toks = re.findall(r"\(|\)|[^\s()]+", text)
    pos = 0

    def rd():
        nonlocal pos
        t = toks[pos]
        pos += 1
        if t != "(":
            return t
        out = []
        while toks[pos] != ")":
            out.append(rd())
        pos += 1
        return out

    return rd()


def render(e):
    return e if isinstance(e, str) else "(" + " ".join(render(x) for x in e) + ")"


def negated_eqs(e, out):
    # adjacent (< d (- eps)) (> d eps) inside a flattened or, same d
    if isinstance(e, str):
        return
    kids = e[1:]
    i = 0
    while i < len(kids):
        a = kids[i]
        b = kids[i + 1] if i + 1 < len(kids) else None
        if (e[0] == "or" and isinstance(a, list) and isinstance(b, list) and len(a) == 3 and len(b) == 3
                and a[0] == "<" and b[0] == ">" and a[1] == b[1]):
            out.append(render(a[1]))
            i += 2
            continue
        negated_eqs(a, out)
        i += 1


def items(dump):
    sec = None
    got = {"decl": [], "qc": [], "init": [], "op": [], "spec": []}
    names = {"qubit-constraints": "qc", "initial": "init", "operations": "op", "spec": "spec"}
    for line in dump.splitlines():
        line = line.strip()
        m = re.match(r"; section: (\S+)", line)
        if m:
            sec = names.get(m.group(1))
            continue
        if line.startswith("(declare-fun"):
            got["decl"].append(line.split()[1])
        elif line.startswith("(assert"):
            body = parse_sexpr(line)[1]
            if sec == "spec":
                negated_eqs(body, got["spec"])
            elif sec:
                got[sec].append(render(body))
    return got


def rows(path):
    out = []
    for raw in open(path, encoding="utf-8"):
        if not raw.strip() or raw.lstrip().startswith("#"):
            continue
        sec, name, count, rx = [p.strip() for p in raw.rstrip("\n").split("|", 3)]
        m = re.search(r"\{b(?::([0-9,]+))?\}", name)
        if not m:
            out.append((sec, name, int(count), rx))
            continue
        for b in (m.group(1).split(",") if m.group(1) else BRANCHES):
            out.append((sec, name.replace(m.group(0), b), int(count), re.sub(r"\{b(:[0-9,]+)?\}", b, rx)))
    return out


def main(argv):
    if len(argv) < 3:
        print(__doc__, file=sys.stderr)
        return 2
    if argv[2] == "--qvsmt":
        dump = subprocess.run(argv[3:], check=True, capture_output=True, text=True).stdout
    else:
        dump = open(argv[2], encoding="utf-8").read()
    got = items(dump)
    owner = {k: [None] * len(v) for k, v in got.items()}
    bad = 0
    table = rows(argv[1])
    for sec, name, count, rx in table:
        hits = [i for i, s in enumerate(got[sec]) if re.search(rx, s)]
        for i in hits:
            if owner[sec][i] is not None:
                print(f"FAIL {sec} item claimed by {owner[sec][i]} and {name}: {got[sec][i][:100]}")
                bad += 1
            owner[sec][i] = name
        flag = "ok  " if len(hits) == count else "FAIL"
        if len(hits) != count:
            bad += 1
        print(f"{flag} {sec:<5} {name:<24} expected {count:>3} got {len(hits):>3}")
    for sec, own in owner.items():
        for i, o in enumerate(own):
            if o is None:
                print(f"FAIL {sec} item with no reference row: {got[sec][i][:100]}")
                bad += 1
    total = sum(len(v) for v in got.values())
    print(f"{len(table)} rows, {total} items, {bad} mismatches")
    return 1 if bad else 0


if __name__ == "__main__":
    sys.exit(main(sys.argv))
