"""Fidelity surface over relative Rabi errors of control (xi) and target (zeta)."""

import numpy as np
from _common import parser

from dstirap.analysis import rabi_error_sweep, write_csv
from dstirap.atoms import cesium_params

if __name__ == "__main__":
    ap = parser(__doc__)
    ap.add_argument("--qubits", type=int, default=2)
    args = ap.parse_args()
    grid = np.linspace(-0.1, 0.1, 9)
    res = rabi_error_sweep(grid, grid, cesium_params(args.qubits), workers=args.workers)
    print(write_csv(res, args.out / f"rabi_{args.qubits}q.csv"))
    f = res.values()
    print(f"min {f.min():.5f}  max {f.max():.5f}")
