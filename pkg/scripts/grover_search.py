"""Grover success probability with the simulated gate, against gate time."""

import numpy as np
from _common import parser

from dstirap.analysis import write_csv
from dstirap.atoms import cesium_params
from dstirap.grover import GroverConfig, grover_vs_gate_time, optimal_iterations, run_grover

if __name__ == "__main__":
    ap = parser(__doc__)
    ap.add_argument("--qubits", type=int, nargs="+", default=[2, 3, 4])
    args = ap.parse_args()
    times = np.linspace(0.2, 1.0, 9)
    for n in args.qubits:
        ideal = run_grover(GroverConfig(n, optimal_iterations(n)))
        res = grover_vs_gate_time(times, cesium_params(n), workers=args.workers)
        print(write_csv(res, args.out / f"grover_{n}q.csv"), f"(ideal {ideal:.4f})")
