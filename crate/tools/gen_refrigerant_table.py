#!/usr/bin/env python3
"""Generate a (p, h)-gridded refrigerant property table as JSON.

The simulator reads refrigerant properties from a self-describing JSON file
with explicit grid vectors and row-major property matrices (see
`crates/frostsim/src/properties/refrigerant.rs` for the schema). This script
produces such a file from a Peng-Robinson equation of state with a linear
ideal-gas heat capacity, referenced so that saturated liquid at 0 degC has
h = 200 kJ/kg and s = 1 kJ/(kg K) (IIR convention).

Usage:
    python3 tools/gen_refrigerant_table.py --out data/r1234yf.json
    python3 tools/gen_refrigerant_table.py --np 20 --nh 30 \
        --out crates/frostsim/src/properties/r1234yf_builtin.json

Options:
    --fluid   fluid name (only "R1234yf" is built in)
    --p-min / --p-max   pressure span [Pa]      (default 1e5 .. 30e5)
    --h-min / --h-max   enthalpy span [J/kg]    (default 150e3 .. 550e3)
    --np / --nh         grid sizes              (default 40 x 60)
    --out               output path

The pressure grid is geometric, the enthalpy grid uniform. Internal energy
is stored as u = h - p/rho evaluated at each node so the thermodynamic
identity holds exactly at grid points.
"""

import argparse
import json
import math

R_UNIV = 8.314462618  # J/(mol K)

FLUIDS = {
    # name: (molar mass [kg/mol], Tc [K], pc [Pa], acentric factor,
    #        cp0 = c0 + c1*T [J/(mol K)])
    "R1234yf": (0.1140416, 367.85, 3.3822e6, 0.276, 31.0, 0.242),
}

SQRT2 = math.sqrt(2.0)


class PengRobinson:
    def __init__(self, name):
        self.name = name
        self.m, self.tc, self.pc, self.omega, self.cp_c0, self.cp_c1 = FLUIDS[name]
        self.kappa = 0.37464 + 1.54226 * self.omega - 0.26992 * self.omega**2
        self.b = 0.07780 * R_UNIV * self.tc / self.pc
        self.ac = 0.45724 * R_UNIV**2 * self.tc**2 / self.pc
        # enthalpy/entropy offsets fixed later by the reference state
        self.h_off = 0.0
        self.s_off = 0.0

    def a_and_dadt(self, t):
        tr = t / self.tc
        sq = math.sqrt(tr)
        alpha = (1.0 + self.kappa * (1.0 - sq)) ** 2
        a = self.ac * alpha
        dadt = -self.ac * self.kappa * (1.0 + self.kappa * (1.0 - sq)) / math.sqrt(t * self.tc)
        return a, dadt

    def z_roots(self, t, p):
        a, _ = self.a_and_dadt(t)
        big_a = a * p / (R_UNIV * t) ** 2
        big_b = self.b * p / (R_UNIV * t)
        # z^3 + c2 z^2 + c1 z + c0 = 0
        c2 = -(1.0 - big_b)
        c1 = big_a - 3.0 * big_b**2 - 2.0 * big_b
        c0 = -(big_a * big_b - big_b**2 - big_b**3)
        roots = cubic_roots(c2, c1, c0)
        roots = [z for z in roots if z > big_b]
        return sorted(roots), big_a, big_b

    def ln_phi(self, z, big_a, big_b):
        return (
            z
            - 1.0
            - math.log(z - big_b)
            - big_a / (2.0 * SQRT2 * big_b)
            * math.log((z + (1.0 + SQRT2) * big_b) / (z + (1.0 - SQRT2) * big_b))
        )

    def cp0(self, t):
        return self.cp_c0 + self.cp_c1 * t

    def h_ideal(self, t):
        # relative to 0 K integration constant (absorbed in h_off)
        return self.cp_c0 * t + 0.5 * self.cp_c1 * t**2

    def s_ideal(self, t, p):
        return self.cp_c0 * math.log(t) + self.cp_c1 * t - R_UNIV * math.log(p)

    def props_from_z(self, t, p, z):
        """Specific h [J/kg], s [J/(kg K)], rho [kg/m3] for one root."""
        a, dadt = self.a_and_dadt(t)
        big_b = self.b * p / (R_UNIV * t)
        log_term = math.log((z + (1.0 + SQRT2) * big_b) / (z + (1.0 - SQRT2) * big_b))
        h_dep = R_UNIV * t * (z - 1.0) + (t * dadt - a) / (2.0 * SQRT2 * self.b) * log_term
        s_dep = R_UNIV * math.log(z - big_b) + dadt / (2.0 * SQRT2 * self.b) * log_term
        h = (self.h_ideal(t) + h_dep) / self.m + self.h_off
        s = (self.s_ideal(t, p) + s_dep) / self.m + self.s_off
        v = z * R_UNIV * t / p  # molar volume
        rho = self.m / v
        return h, s, rho

    def phase_props(self, t, p, phase):
        roots, big_a, big_b = self.z_roots(t, p)
        z = roots[0] if phase == "liq" else roots[-1]
        return self.props_from_z(t, p, z)

    def p_sat(self, t):
        """Saturation pressure via fugacity equality (successive substitution)."""
        if t >= self.tc:
            raise ValueError("supercritical temperature")
        p = self.pc * math.exp(5.373 * (1.0 + self.omega) * (1.0 - self.tc / t))
        for _ in range(200):
            roots, big_a, big_b = self.z_roots(t, p)
            if len(roots) < 2:
                # nudge toward the two-root region
                p *= 0.98 if roots and roots[0] > 0.3 else 1.02
                continue
            zl, zv = roots[0], roots[-1]
            lnphi_l = self.ln_phi(zl, big_a, big_b)
            lnphi_v = self.ln_phi(zv, big_a, big_b)
            ratio = math.exp(lnphi_l - lnphi_v)
            p_new = p * ratio
            if abs(p_new - p) < 1e-9 * p:
                return p_new
            p = p_new
        raise RuntimeError(f"p_sat failed to converge at T={t}")

    def t_sat(self, p):
        # successive substitution in p_sat degrades within ~1 K of critical;
        # cap the bracket and require the table span to stay below it
        lo, hi = 180.0, self.tc - 2.0
        flo = self.p_sat(lo) - p
        fhi = self.p_sat(hi) - p
        if flo * fhi > 0:
            raise ValueError(f"T_sat bracket failure at p={p}")
        for _ in range(200):
            mid = 0.5 * (lo + hi)
            fm = self.p_sat(mid) - p
            if abs(fm) < 1e-8 * p:
                return mid
            if flo * fm <= 0:
                hi = mid
            else:
                lo, flo = mid, fm
        return 0.5 * (lo + hi)

    def t_from_h(self, p, h, phase, t_lo, t_hi):
        """Invert h(T) at fixed p for one phase branch (h monotone in T)."""
        f_lo = self.phase_props(t_lo, p, phase)[0] - h
        f_hi = self.phase_props(t_hi, p, phase)[0] - h
        if f_lo * f_hi > 0:
            raise ValueError(
                f"t_from_h bracket failure p={p:.4g} h={h:.6g} phase={phase} "
                f"[{t_lo}, {t_hi}] -> [{f_lo:.4g}, {f_hi:.4g}]"
            )
        for _ in range(200):
            mid = 0.5 * (t_lo + t_hi)
            fm = self.phase_props(mid, p, phase)[0] - h
            if abs(t_hi - t_lo) < 1e-10:
                return mid
            if f_lo * fm <= 0:
                t_hi = mid
            else:
                t_lo, f_lo = mid, fm
        return 0.5 * (t_lo + t_hi)


def cubic_roots(c2, c1, c0):
    """Real roots of z^3 + c2 z^2 + c1 z + c0 = 0 (Cardano)."""
    q = (3.0 * c1 - c2**2) / 9.0
    r = (9.0 * c2 * c1 - 27.0 * c0 - 2.0 * c2**3) / 54.0
    disc = q**3 + r**2
    if disc > 0:
        s = math.copysign(abs(r + math.sqrt(disc)) ** (1.0 / 3.0), r + math.sqrt(disc))
        t = math.copysign(abs(r - math.sqrt(disc)) ** (1.0 / 3.0), r - math.sqrt(disc))
        return [s + t - c2 / 3.0]
    theta = math.acos(max(-1.0, min(1.0, r / math.sqrt(-(q**3))))) if q < 0 else 0.0
    m = 2.0 * math.sqrt(-q)
    return [
        m * math.cos(theta / 3.0) - c2 / 3.0,
        m * math.cos((theta + 2.0 * math.pi) / 3.0) - c2 / 3.0,
        m * math.cos((theta + 4.0 * math.pi) / 3.0) - c2 / 3.0,
    ]


def build_table(fluid, p_min, p_max, n_p, h_min, h_max, n_h):
    eos = PengRobinson(fluid)

    # pin the IIR reference state: sat. liquid at 0 degC -> 200 kJ/kg, 1 kJ/(kg K)
    t_ref = 273.15
    p_ref = eos.p_sat(t_ref)
    h_raw, s_raw, _ = eos.phase_props(t_ref, p_ref, "liq")
    eos.h_off = 200e3 - h_raw
    eos.s_off = 1000.0 - s_raw

    p_grid = [p_min * (p_max / p_min) ** (i / (n_p - 1)) for i in range(n_p)]
    h_grid = [h_min + (h_max - h_min) * j / (n_h - 1) for j in range(n_h)]

    sat = {"t_sat": [], "h_liq": [], "h_vap": [], "rho_liq": [], "rho_vap": [],
           "s_liq": [], "s_vap": []}
    mats = {k: [] for k in ("temperature", "density", "internal_energy", "quality", "entropy")}

    for p in p_grid:
        ts = eos.t_sat(p)
        hl, sl, rl = eos.phase_props(ts, p, "liq")
        hv, sv, rv = eos.phase_props(ts, p, "vap")
        sat["t_sat"].append(ts)
        sat["h_liq"].append(hl)
        sat["h_vap"].append(hv)
        sat["rho_liq"].append(rl)
        sat["rho_vap"].append(rv)
        sat["s_liq"].append(sl)
        sat["s_vap"].append(sv)

        row = {k: [] for k in mats}
        for h in h_grid:
            if h <= hl:
                t = eos.t_from_h(p, h, "liq", 150.0, ts)
                _, s, rho = eos.phase_props(t, p, "liq")
                x = 0.0
            elif h >= hv:
                t = eos.t_from_h(p, h, "vap", ts, 700.0)
                _, s, rho = eos.phase_props(t, p, "vap")
                x = 1.0
            else:
                x = (h - hl) / (hv - hl)
                v = (1.0 - x) / rl + x / rv
                rho = 1.0 / v
                s = (1.0 - x) * sl + x * sv
                t = ts
            row["temperature"].append(t)
            row["density"].append(rho)
            row["internal_energy"].append(h - p / rho)
            row["quality"].append(x)
            row["entropy"].append(s)
        for k in mats:
            mats[k].append(row[k])

    return {
        "version": 1,
        "fluid": fluid,
        "pressure": p_grid,
        "enthalpy": h_grid,
        **mats,
        "saturation": sat,
    }


def main():
    ap = argparse.ArgumentParser(description=__doc__, formatter_class=argparse.RawDescriptionHelpFormatter)
    ap.add_argument("--fluid", default="R1234yf", choices=sorted(FLUIDS))
    ap.add_argument("--p-min", type=float, default=1e5)
    ap.add_argument("--p-max", type=float, default=30e5)
    ap.add_argument("--h-min", type=float, default=150e3)
    ap.add_argument("--h-max", type=float, default=550e3)
    ap.add_argument("--np", type=int, default=40, dest="n_p")
    ap.add_argument("--nh", type=int, default=60, dest="n_h")
    ap.add_argument("--out", required=True)
    args = ap.parse_args()

    table = build_table(args.fluid, args.p_min, args.p_max, args.n_p,
                        args.h_min, args.h_max, args.n_h)
    with open(args.out, "w") as f:
        json.dump(table, f)
        f.write("\n")

    sat = table["saturation"]
    print(f"wrote {args.out}: {args.n_p} pressures x {args.n_h} enthalpies")
    print(f"  T_sat({table['pressure'][0]/1e5:.2f} bar) = {sat['t_sat'][0]:.2f} K, "
          f"T_sat({table['pressure'][-1]/1e5:.2f} bar) = {sat['t_sat'][-1]:.2f} K")


if __name__ == "__main__":
    main()
