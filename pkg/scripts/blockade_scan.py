"""Fidelity against blockade strength V for Omega_c = 3, 4, 5 Omega_0."""

import numpy as np
from _common import parser

from dstirap.analysis import blockade_argmax, blockade_sweep, write_csv
from dstirap.atoms import cesium_params

if __name__ == "__main__":
    args = parser(__doc__).parse_args()
    res = blockade_sweep(np.arange(1.0, 31.0), (3.0, 4.0, 5.0), cesium_params(2), workers=args.workers)
    print(write_csv(res, args.out / "blockade.csv"))
    for r, v in blockade_argmax(res).items():
        print(f"Omega_c = {r:g} Omega_0: best V = {v:g} Omega_0")
