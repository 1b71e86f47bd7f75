"""Fidelity against control-target spacing l; V follows C6 / l^6."""

import numpy as np
from _common import parser

from dstirap.analysis import position_sweep, write_csv
from dstirap.atoms import cesium_params

if __name__ == "__main__":
    ap = parser(__doc__)
    ap.add_argument("--qubits", type=int, default=2)
    args = ap.parse_args()
    res = position_sweep(np.linspace(5.4, 12.0, 23), cesium_params(args.qubits), workers=args.workers)
    print(write_csv(res, args.out / f"position_{args.qubits}q.csv"))
