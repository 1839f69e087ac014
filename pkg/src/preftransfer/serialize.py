"""Trajectory JSON-lines serialization.

One trajectory per line:
    {"env": id, "pairs": [{"s": [f64...], "a": [f64...]|int, "t": int}, ...], "costs": {id: f64}}
Field order is fixed as listed; floats carry 17 significant digits.
"""

import json

import numpy as np

from .envs import StateActionPair, TabularMDP, Trajectory, TrajectorySet


def _fmt(x):
    return format(float(x), ".17g")


def _state_list(s):
    if np.isscalar(s):
        return [float(s)]
    return [float(v) for v in np.asarray(s).ravel()]


def trajectory_to_json(traj, env_id):
    parts = [f'{{"env": {json.dumps(env_id)}, "pairs": [']
    pair_strs = []
    for p in traj.pairs:
        s = ", ".join(_fmt(v) for v in _state_list(p.state))
        if isinstance(p.action, (int, np.integer)):
            a = str(int(p.action))
        else:
            a = "[" + ", ".join(_fmt(v) for v in np.asarray(p.action).ravel()) + "]"
        pair_strs.append(f'{{"s": [{s}], "a": {a}, "t": {p.step_index}}}')
    parts.append(", ".join(pair_strs))
    costs = ", ".join(f"{json.dumps(k)}: {_fmt(v)}" for k, v in traj.cached_costs.items())
    parts.append(f'], "costs": {{{costs}}}}}')
    return "".join(parts)


def write_trajectories(path, trajset, env_id):
    with open(path, "w") as f:
        for traj in trajset:
            f.write(trajectory_to_json(traj, env_id) + "\n")


def trajectory_from_json(line, env=None):
    obj = json.loads(line)
    tabular = isinstance(env, TabularMDP)
    pairs = []
    for p in obj["pairs"]:
        s = p["s"]
        state = int(s[0]) if tabular else np.asarray(s, dtype=float)
        a = p["a"]
        action = int(a) if isinstance(a, int) else np.asarray(a, dtype=float)
        pairs.append(StateActionPair(state=state, action=action, step_index=int(p["t"])))
    return Trajectory(pairs=pairs, cached_costs={k: float(v) for k, v in obj.get("costs", {}).items()})


def read_trajectories(path, env=None, provenance="initial_demos"):
    trajs = []
    with open(path) as f:
        for i, line in enumerate(f, start=1):
            if not line.strip():
                continue
            try:
                trajs.append(trajectory_from_json(line, env))
            except (json.JSONDecodeError, KeyError, TypeError, ValueError) as e:
                raise ValueError(f"{path}:{i}: malformed trajectory line: {e}") from e
    return TrajectorySet(trajectories=trajs, provenance=provenance)
