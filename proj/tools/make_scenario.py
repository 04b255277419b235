#!/usr/bin/env python3
"""Writes the bundled three-lane terrain and team capability models.

data/terrain.pgm    160x160 px, 8 px cells -> 20x20 grid
data/team_red.json  capability MDP over forts f1..f6
data/team_blue.json same structure, less reliable

Bright pixels are hard going. The staging area (cols 0-2) and the
objective area (cols 17-19) are scrub. Between them, walls leave three
one-cell lanes from the cell east of F4 to the cells west of F6:
  north  rough valley: dark with bright rocks (easy driving, poor view)
  middle gravel track: moderate on both counts
  south  smooth ridge: uniform mid-gray plateau (clear view, slower)
"""

import argparse
import json
from pathlib import Path

CELL = 8
N = 20

BACKGROUND, WALL, VALLEY, TRACK, RIDGE = range(5)


def lanes():
    north = [(9, 3), (8, 4), (7, 5), (6, 6)] + [(5, c) for c in range(7, 13)] + [(6, 13), (7, 14), (8, 15), (9, 16)]
    middle = [(10, c) for c in range(3, 17)]
    south = [(20 - r, c) for r, c in north]
    cells = {}
    cells.update({c: VALLEY for c in north})
    cells.update({c: TRACK for c in middle})
    cells.update({c: RIDGE for c in south})
    return cells


LANES = lanes()


def region(row, col):
    if col < 3 or col > 16:
        return BACKGROUND
    return LANES.get((row, col), WALL)


def pixel(kind, y, x):
    if kind == WALL:
        return 0.97
    if kind == VALLEY:  # one bright pixel in five
        return 1.0 if (y + 2 * x) % 5 == 0 else 0.0
    if kind == TRACK:
        return 0.1 if (x + y) % 2 == 0 else 0.5
    if kind == RIDGE:
        return 0.65
    return 0.5 if (x + y) % 2 == 0 else 1.0  # scrub


def terrain():
    size = N * CELL
    rows = []
    for y in range(size):
        rows.append(bytes(round(255 * pixel(region(y // CELL, x // CELL), y, x)) for x in range(size)))
    return b"P5\n# three-lane overwatch terrain\n%d %d\n255\n" % (size, size) + b"".join(rows)


def capability(forts, success):
    states = ["s_eps"] + ["s_" + f for f in forts] + ["s_f"]
    labels = {"s_eps": None, "s_f": "f_err"}
    labels.update({"s_" + f: f for f in forts})
    transitions = []
    for s in states[:-1]:
        for f in forts:
            transitions.append({"state": s, "action": "explore_" + f,
                                "next": {"s_" + f: success, "s_f": round(1 - success, 10)}})
        transitions.append({"state": s, "action": "roam", "next": {"s_eps": 1.0}})
    return {"states": states, "actions": ["explore_" + f for f in forts] + ["roam"],
            "propositions": forts + ["f_err"], "labels": labels, "initial": "s_eps",
            "failure": "s_f", "transitions": transitions}


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--out", type=Path, default=Path(__file__).resolve().parent.parent / "data")
    args = ap.parse_args()
    args.out.mkdir(parents=True, exist_ok=True)
    (args.out / "terrain.pgm").write_bytes(terrain())
    forts = ["f%d" % i for i in range(1, 7)]
    for name, success in (("team_red", 0.95), ("team_blue", 0.9)):
        text = json.dumps(capability(forts, success), indent=2) + "\n"
        (args.out / (name + ".json")).write_text(text)


if __name__ == "__main__":
    main()
