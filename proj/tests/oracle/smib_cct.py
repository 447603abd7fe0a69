"""Critical clearing time of a single machine against an infinite bus.

Equal-area criterion for the critical angle, then the swing equation is
integrated under the faulted power curve (scipy, tight tolerances) to turn
that angle into a time. Writes tests/data/smib_cct.json.
"""
import json
import math
import pathlib

from scipy.integrate import solve_ivp

F = 60.0
H = 5.0
XD = 0.3        # machine transient reactance
XLINE = 0.4     # line reactance
XINF = 1e-4     # infinite-bus source reactance
YF = 1000.0     # fault shunt susceptance magnitude at the machine terminal
P = 0.8         # machine output, pu
V = 1.0         # both bus voltage magnitudes


def main():
    ws = 2 * math.pi * F
    # Steady state: V2 = V at angle th, V1 = V at 0.
    th = math.asin(P * XLINE / (V * V))
    v1 = complex(V, 0)
    v2 = complex(V * math.cos(th), V * math.sin(th))
    i_line = (v2 - v1) / complex(0, XLINE)       # from machine bus towards the infinite bus
    e = v2 + complex(0, XD) * i_line               # machine EMF
    e_inf = v1 + complex(0, XINF) * (-i_line)  # infinite source injects -i_line
    d0 = math.atan2(e.imag, e.real) - math.atan2(e_inf.imag, e_inf.real)
    ee = abs(e) * abs(e_inf)
    xb = XLINE + XINF
    p_pre = ee / (XD + xb)
    xf = 1.0 / YF
    p_fault = ee / (XD + xb + XD * xb / xf)
    pm = P
    d_max = math.pi - math.asin(pm / p_pre)
    cos_cr = (pm * (d_max - d0) + p_pre * math.cos(d_max) - p_fault * math.cos(d0)) / (p_pre - p_fault)
    d_cr = math.acos(cos_cr)

    def rhs(t, y):
        return [y[1], ws / (2 * H) * (pm - p_fault * math.sin(y[0]))]

    def hit(t, y):
        return y[0] - d_cr
    hit.terminal = True
    sol = solve_ivp(rhs, (0, 5), [d0, 0.0], events=hit, rtol=1e-12, atol=1e-12, method="DOP853")
    t_cr = float(sol.t_events[0][0])
    out = {
        "f_nominal": F, "h": H, "xd_prime": XD, "x_line": XLINE, "x_infinite": XINF,
        "fault_admittance": YF, "p_mw": P * 100, "base_mva": 100.0,
        "delta0": d0, "delta_critical": d_cr, "critical_clearing_time": t_cr,
    }
    path = pathlib.Path(__file__).resolve().parents[1] / "data" / "smib_cct.json"
    path.write_text(json.dumps(out, indent=2) + "\n")
    print(json.dumps(out, indent=2))


if __name__ == "__main__":
    main()
