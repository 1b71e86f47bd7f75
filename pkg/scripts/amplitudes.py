"""Re amplitude of |A> against Omega_c (control in |0>) and against V (control in |1>)."""

import numpy as np
from _common import parser

from dstirap.analysis import amplitude_vs_omega_c, amplitude_vs_V, write_csv
from dstirap.atoms import cesium_params

if __name__ == "__main__":
    args = parser(__doc__).parse_args()
    p = cesium_params(2)
    a = amplitude_vs_omega_c(np.linspace(0, 5, 21), p, workers=args.workers)
    b = amplitude_vs_V(np.concatenate([np.linspace(0, 10, 21), [15, 30, 60, 120, 282]]), p, workers=args.workers)
    print(write_csv(a, args.out / "amplitude_vs_omega_c.csv"))
    print(write_csv(b, args.out / "amplitude_vs_v.csv"))
