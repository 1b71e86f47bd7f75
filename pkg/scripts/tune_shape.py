"""Grid scan of the pulse-shape knobs (sigma_frac, delta_frac) at fixed gate time.

This is how the shipped defaults were picked.
"""

import itertools

import numpy as np
from _common import parser

from dstirap.analysis import SweepResult, ordered_map, write_csv
from dstirap.atoms import cesium_params
from dstirap.gates import gate_fidelity


def _point(args):
    n, t, sf, df = args
    return gate_fidelity(cesium_params(n), t, sigma_frac=sf, delta_frac=df)


if __name__ == "__main__":
    ap = parser(__doc__)
    ap.add_argument("--qubits", type=int, default=2)
    ap.add_argument("--t-total", type=float, default=0.6)
    args = ap.parse_args()
    sigmas = np.round(np.arange(0.08, 0.1451, 0.01), 3)
    deltas = np.round(np.arange(0.55, 0.951, 0.05), 3)
    pts = [(s, d) for s, d in itertools.product(sigmas, deltas) if s * d < 0.25]
    vals = ordered_map(_point, [(args.qubits, args.t_total, s, d) for s, d in pts], args.workers)
    res = SweepResult(("sigma_frac", "delta_frac"), "fidelity", tuple((s, d, v) for (s, d), v in zip(pts, vals)))
    print(write_csv(res, args.out / f"tune_{args.qubits}q.csv"))
    s, d = res.argmax()
    print(f"best sigma_frac = {s:g}, delta_frac = {d:g}, F = {max(vals):.5f}")
