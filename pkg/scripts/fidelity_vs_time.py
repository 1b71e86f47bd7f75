"""Average gate fidelity against total gate time for 2, 3 and 4 qubits."""

import numpy as np
from _common import parser

from dstirap.analysis import fidelity_vs_gate_time, write_csv
from dstirap.atoms import cesium_params

if __name__ == "__main__":
    ap = parser(__doc__)
    ap.add_argument("--qubits", type=int, nargs="+", default=[2, 3, 4])
    ap.add_argument("--points", type=int, default=17)
    args = ap.parse_args()
    times = np.linspace(0.2, 1.0, args.points)
    for n in args.qubits:
        res = fidelity_vs_gate_time(times, cesium_params(n), workers=args.workers)
        print(write_csv(res, args.out / f"fidelity_vs_time_{n}q.csv"))
        for t, f in res.rows:
            print(f"  n={n} T={t:.3f} us F={f:.5f}")
