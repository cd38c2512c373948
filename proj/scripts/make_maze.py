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

"""Searches for a 15x15 sliding-marble maze whose shortest solution is exactly 23 moves."""
import random
from collections import deque

N = 15
MOVES = [(-1, 0), (0, 1), (1, 0), (0, -1)]  # up, right, down, left

def slide(g, r, c, d):
    dr, dc = MOVES[d]
    while 0 <= r + dr < N and 0 <= c + dc < N and g[r + dr][c + dc] != '#':
        r += dr; c += dc
    return r, c

def bfs(g, s, goal):
    dist = {s: 0}; q = deque([s])
    while q:
        p = q.popleft()
        if p == goal:
            return dist[p]
        for d in range(4):
            n = slide(g, *p, d)
            if n not in dist:
                dist[n] = dist[p] + 1; q.append(n)
    return None

def make(seed):
    rnd = random.Random(seed)
    g = [['#' if r in (0, N - 1) or c in (0, N - 1) else '.' for c in range(N)] for r in range(N)]
    start, goal = (13, 13), (1, 1)
    cells = [(r, c) for r in range(1, N - 1) for c in range(1, N - 1) if (r, c) not in (start, goal)]
    best = None
    for it in range(20000):
        r, c = rnd.choice(cells)
        old = g[r][c]
        g[r][c] = '#' if old == '.' else '.'
        d = bfs(g, start, goal)
        score = -abs((d or 0) - 23) if d else -100
        cur = best if best is not None else -1000
        if score >= cur or rnd.random() < 0.01:
            best = score
            if d == 23:
                return g, start, goal
        else:
            g[r][c] = old
    return None

for seed in range(200):
    res = make(seed)
    if res:
        g, s, goal = res
        g[s[0]][s[1]] = 'S'; g[goal[0]][goal[1]] = 'G'
        print(seed)
        print("\n".join("".join(row) for row in g))
        break
