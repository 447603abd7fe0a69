#!/usr/bin/env python3
"""Independent reference for the power-flow tests.

Exports the PYPOWER copies of the IEEE 14/30/118 cases as MATPOWER .m files
and freezes PYPOWER's Newton-Raphson solutions (with and without generator
reactive-limit enforcement) into JSON used by the C++ tests.

Run once; the outputs are committed:
    python3 tests/oracle/pypower_reference.py data/cases tests/data
"""
import json
import sys
from pathlib import Path

import numpy as np
import pypower.runpf as _runpf_mod
from pypower.api import case14, case30, case118, ppoption


def _patched_runpf():
    """PYPOWER's runpf with its reactive-limit loop repaired for current numpy.

    Only PV-bus units are switched to PQ; the slack unit keeps absorbing the
    residual, so the reference bus never moves.
    """
    src = Path(_runpf_mod.__file__).read_text()
    src = src.replace(
        "mx = find( gen_status & qg_max_lim )",
        "not_ref = bus[gen[:, GEN_BUS].astype(int), BUS_TYPE] != REF\n"
        "                mx = find( gen_status & qg_max_lim & not_ref )")
    src = src.replace(
        "mn = find( gen_status & qg_min_lim )",
        "mn = find( gen_status & qg_min_lim & not_ref )")
    src = src.replace(
        "(bus[gen[:, GEN_BUS], BUS_TYPE] == PV | \n"
        "                                      bus[gen[:, GEN_BUS], BUS_TYPE] == REF))",
        "((bus[gen[:, GEN_BUS].astype(int), BUS_TYPE] == PV) | "
        "(bus[gen[:, GEN_BUS].astype(int), BUS_TYPE] == REF)))")
    src = src.replace("if len(infeas) == len(remaining) or all(infeas == remaining):",
                      "if len(infeas) == len(remaining):")
    src = src.replace("bi = gen[limited[i], GEN_BUS]  ", "bi = int(gen[limited[i], GEN_BUS])  ")
    ns = {"__name__": "patched_runpf", "__file__": _runpf_mod.__file__}
    exec(compile(src, _runpf_mod.__file__, "exec"), ns)
    return ns["runpf"]


runpf = _patched_runpf()


def fmt_row(row):
    return "\t" + "\t".join(repr(float(v)) if not float(v).is_integer() else str(int(v)) for v in row) + ";"


def write_matpower(name, ppc, path):
    lines = [f"function mpc = {name}", "%% exported from PYPOWER", "", "mpc.version = '2';",
             f"mpc.baseMVA = {ppc['baseMVA']};", ""]
    for key in ("bus", "gen", "branch", "gencost"):
        lines.append(f"mpc.{key} = [")
        lines.extend(fmt_row(r) for r in ppc[key])
        lines.append("];")
        lines.append("")
    path.write_text("\n".join(lines))


def flat_start(ppc):
    ppc = {k: (v.copy() if isinstance(v, np.ndarray) else v) for k, v in ppc.items()}
    ppc["bus"][:, 7] = 1.0
    ppc["bus"][:, 8] = 0.0
    return ppc


def solve(ppc, enforce_q):
    opt = ppoption(VERBOSE=0, OUT_ALL=0, PF_TOL=1e-10, ENFORCE_Q_LIMS=1 if enforce_q else 0)
    res, ok = runpf(flat_start(ppc), opt)
    assert ok, "reference power flow failed"
    br = res["branch"]
    sf = np.hypot(br[:, 13], br[:, 14])
    st = np.hypot(br[:, 15], br[:, 16])
    return {
        "vm": res["bus"][:, 7].tolist(),
        "va_deg": res["bus"][:, 8].tolist(),
        "gen_p": res["gen"][:, 1].tolist(),
        "gen_q": res["gen"][:, 2].tolist(),
        "branch_mva_max": np.maximum(sf, st).tolist(),
        "losses_mw": float((br[:, 13] + br[:, 15]).sum()),
    }


def main():
    case_dir = Path(sys.argv[1])
    data_dir = Path(sys.argv[2])
    for name, fn in (("case14", case14), ("case30", case30), ("case118", case118)):
        ppc = fn()
        write_matpower(name, ppc, case_dir / f"{name}.m")
        ref = {"case": name, "plain": solve(ppc, False), "q_limited": solve(ppc, True)}
        (data_dir / f"{name}_reference.json").write_text(json.dumps(ref, indent=1))
        print(name, "ok")


if __name__ == "__main__":
    main()
