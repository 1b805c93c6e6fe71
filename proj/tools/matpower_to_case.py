#!/usr/bin/env python3
# Copyright 2026 The SCSR Authors
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
"""Converts a MATPOWER .m case into the substation-extended case format.

Large benchmark files (118-, 1354-bus) are not bundled with the repository;
point this script at your own copy:

    python3 tools/matpower_to_case.py case118.m --out cases/ieee118.case

Substation extensions that MATPOWER does not carry are filled with defaults:
coupler ratings sized from the incident line capacity, two feeders per load,
a 10 000 EUR/MWh shedding price, and reserve prices at a tenth of the energy
price. Branches with rateA = 0 receive a rating scaled from their impedance.
"""

import argparse
import re
import sys


def parse_matrix(text, name):
    m = re.search(r"mpc\." + name + r"\s*=\s*\[(.*?)\];", text, re.S)
    if not m:
        raise SystemExit(f"matrix mpc.{name} not found")
    rows = []
    for line in m.group(1).splitlines():
        line = line.split("%")[0].strip().rstrip(";")
        if not line:
            continue
        rows.append([float(tok) for tok in line.split()])
    return rows


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("mfile")
    ap.add_argument("--out", required=True)
    ap.add_argument("--shed-cost", type=float, default=10000.0)
    ap.add_argument("--feeders", type=int, default=2,
                    help="feeders each demand is split into")
    args = ap.parse_args()

    text = open(args.mfile).read()
    base = float(re.search(r"mpc\.baseMVA\s*=\s*([0-9.]+)", text).group(1))
    bus = parse_matrix(text, "bus")
    gen = parse_matrix(text, "gen")
    branch = parse_matrix(text, "branch")
    try:
        gencost = parse_matrix(text, "gencost")
    except SystemExit:
        gencost = None

    ids = {int(b[0]): f"S{int(b[0])}" for b in bus}
    out = []
    out.append("# converted from " + args.mfile)
    out.append("")
    out.append("[meta]")
    out.append(f"base_mva = {base}")
    ref = next((int(b[0]) for b in bus if int(b[1]) == 3), int(bus[0][0]))
    out.append(f"reference = {ids[ref]}")
    out.append("")
    out.append("[substations]")
    out.append("id s_max v_min v_max")
    incident = {int(b[0]): 0.0 for b in bus}
    for br in branch:
        rate = br[5] if br[5] > 0 else 1.5 * base / max(br[3], 1e-3) * 0.1
        incident[int(br[0])] += rate
        incident[int(br[1])] += rate
    for b in bus:
        vmin = (b[12] if len(b) > 12 else 0.9) ** 2
        vmax = (b[11] if len(b) > 11 else 1.1) ** 2
        s_max = max(100.0, incident[int(b[0])])
        out.append(f"{ids[int(b[0])]} {s_max:.1f} {vmin:.4f} {vmax:.4f}")
    out.append("")
    out.append("[branches]")
    out.append("id from to g_series b_series g_shunt b_shunt s_max")
    for k, br in enumerate(branch):
        r, x, btot = br[2], br[3], br[4]
        den = r * r + x * x
        g = r / den if den else 0.0
        bseries = -x / den if den else 0.0
        rate = br[5] if br[5] > 0 else 1.5 * base / max(x, 1e-3) * 0.1
        out.append(
            f"L{k + 1:03d} {ids[int(br[0])]} {ids[int(br[1])]} "
            f"{g:.6f} {bseries:.6f} 0 {btot / 2:.5f} {rate:.1f}")
    out.append("")
    out.append("[generators]")
    out.append("id sub p_min p_max q_min q_max ramp_up ramp_down "
               "cost cost_up cost_down")
    for k, g in enumerate(gen):
        cost = 30.0
        if gencost and len(gencost[k]) >= 6:
            cost = gencost[k][-2] if gencost[k][0] == 2 else 30.0
        pmax = g[8]
        out.append(
            f"G{k + 1} {ids[int(g[0])]} {max(0.0, g[9]):.1f} {pmax:.1f} "
            f"{g[4]:.1f} {g[3]:.1f} {0.5 * pmax:.1f} {0.5 * pmax:.1f} "
            f"{cost:.2f} {0.1 * cost:.2f} {0.05 * cost:.2f}")
    out.append("")
    out.append("[loads]")
    out.append("id sub p_demand pf_tangent cost_shed")
    n = 0
    for b in bus:
        pd, qd = b[2], b[3]
        if pd <= 0:
            continue
        n += 1
        for f in range(args.feeders):
            tag = chr(ord("a") + f) if args.feeders > 1 else ""
            out.append(
                f"D{n}{tag} {ids[int(b[0])]} {pd / args.feeders:.3f} "
                f"{qd / pd:.5f} {args.shed_cost}")
    with open(args.out, "w") as f:
        f.write("\n".join(out) + "\n")
    print(f"wrote {args.out}: {len(bus)} substations, {len(branch)} branches")
    return 0


if __name__ == "__main__":
    sys.exit(main())
