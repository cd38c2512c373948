# Copyright 2026 The BNET Authors
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

"""Regenerates tests/data/golden_traces.inc from the gymnasium reference dynamics."""
import numpy as np
import gymnasium as gym

def cartpole_trace(start, actions):
    env = gym.make("CartPole-v1").unwrapped
    env.reset(seed=0)
    env.state = np.array(start, dtype=np.float64)
    rows = []
    for a in actions:
        _, r, term, _, _ = env.step(a)
        rows.append((a, *[float(v) for v in env.state], r, int(term)))
        if term:
            break
    return rows

def mountaincar_trace(start, actions):
    env = gym.make("MountainCar-v0").unwrapped
    env.reset(seed=0)
    env.state = np.array(start, dtype=np.float64)
    rows = []
    for a in actions:
        _, r, term, _, _ = env.step(a)
        rows.append((a, float(env.state[0]), float(env.state[1]), r, int(term)))
        if term:
            break
    return rows

rng = np.random.default_rng(7)
traces = {
    "kCartPolePushRight": ([0.0, 0.0, 0.0, 0.0], [1] * 40),
    "kCartPoleMixed": ([0.01, -0.02, 0.03, 0.04], list(rng.integers(0, 2, 60))),
}
mc = {
    "kMountainCarLeftWall": ([-0.5, 0.0], [0] * 120),
    "kMountainCarMixed": ([-0.45, 0.0], [2] * 30 + [0] * 40 + [2] * 130),
}

out = [open(__file__).read().split("\n\n")[0].replace("# ", " * ").replace("#", " *").join(["/*\n", "\n */"]), "",
       "// Generated by scripts/make_golden_traces.py. Do not edit.", ""]
for name, (s, acts) in traces.items():
    rows = cartpole_trace(s, [int(a) for a in acts])
    out.append(f"inline constexpr double {name}Start[4] = {{{', '.join(repr(float(v)) for v in s)}}};")
    out.append(f"// action, x, x_dot, theta, theta_dot, reward, terminal")
    out.append(f"inline constexpr double {name}[][7] = {{")
    for r in rows:
        out.append("    {" + ", ".join(repr(float(v)) for v in r) + "},")
    out.append("};")
    out.append("")
for name, (s, acts) in mc.items():
    rows = mountaincar_trace(s, acts)
    out.append(f"inline constexpr double {name}Start[2] = {{{', '.join(repr(float(v)) for v in s)}}};")
    out.append(f"// action, position, velocity, reward, terminal")
    out.append(f"inline constexpr double {name}[][5] = {{")
    for r in rows:
        out.append("    {" + ", ".join(repr(float(v)) for v in r) + "},")
    out.append("};")
    out.append("")
open("tests/data/golden_traces.inc", "w").write("\n".join(out))
