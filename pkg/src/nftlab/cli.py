"""Command-line driver.

Subcommands: ``inft`` (spectrum JSON -> potential CSV), ``nft`` (potential
CSV -> reflection samples), ``convergence`` (error sweeps over N),
``domain`` (window estimates) and ``bench`` (timings).

Exit codes: 0 success, 2 invalid input, 3 numerical failure.
"""

from __future__ import annotations

import argparse
import csv
import json
import sys
import time
from pathlib import Path

import numpy as np

from . import __version__
from .core import (NFSpectrum, SampledPotential, TimeGrid, read_potential_csv,
                   write_potential_csv)
from .darboux import inft
from .domain import (qpsk_domain, rc_T_estimate, sech_domain, soliton_domain,
                     find_T)
from .forward import (forward_scatter, norming_constants, reflection_samples,
                      scattering_coefficients)
from .layerpeel import lp_fast, lp_sequential
from .signals import (RaisedCosineParams, metric_b, metric_q, metric_rho,
                      rc_impulse, sech_a, sech_discrete, sech_potential,
                      sech_spectrum)
from .synthesis import SynthesisPlan, lp_input_direct, rho_fourier_coeffs

SCHEMA = "nftlab/1"
EXIT_INPUT, EXIT_NUMERIC = 2, 3


class InputError(ValueError):
    pass


# ---------------------------------------------------------------------------
# helpers
# ---------------------------------------------------------------------------

def _load_spectrum(path: str, seed: int | None) -> tuple[NFSpectrum, dict]:
    try:
        raw = json.loads(Path(path).read_text())
    except (OSError, json.JSONDecodeError) as exc:
        raise InputError(f"cannot read spectrum {path}: {exc}")
    rho = raw.setdefault("rho", {"kind": "zero"})
    if seed is not None and rho.get("kind") == "qpsk-rc" and "symbols" not in rho:
        rho["seed"] = seed
    if rho.get("kind") == "sech" and "bound_states" not in raw:
        S = sech_discrete(float(rho.get("A_R", 0.4)), int(rho.get("K", 0)))
        raw["bound_states"] = [{"zeta": [z.real, z.imag], "b": [b.real, b.imag]}
                               for z, b in S.pairs]
    try:
        return NFSpectrum.from_json(raw), raw
    except (KeyError, TypeError, ValueError) as exc:
        raise InputError(f"invalid spectrum: {exc}")


def _rc_params(rho: dict, A: float | None = None) -> RaisedCosineParams:
    return RaisedCosineParams(A if A is not None else float(rho.get("A_rc", 1.0)),
                              float(rho.get("tau_s", 1.0)),
                              float(rho.get("beta", 0.5)))


def _domain(spec: NFSpectrum, raw: dict, eps: float, args) -> tuple[float, float, dict]:
    """Window ``(T1, T2)`` and a provenance record."""
    if args.T2 is not None:
        T2 = float(args.T2)
        T1 = float(args.T1) if args.T1 is not None else -T2
        return T1, T2, {"method": "user"}
    rho = raw["rho"]
    kind = rho.get("kind", "zero")
    S = spec.discrete
    prov: dict = {"eps": eps}
    if kind == "sech":
        A_R = float(rho.get("A_R", 0.4))
        T = 1.1 * sech_domain(A_R, eps) if 0 < A_R < 0.5 else 0.0
        prov.update(method="sech_domain x1.1", T_sech=T)
        if S.K:
            kappa, Ts = soliton_domain(S)
            prov.update(kappa=kappa, T_soliton=Ts)
            T = max(T, Ts)
        T = T if T > 0 else 30.0
        return -T, T, prov
    if kind == "rc":
        p = _rc_params(rho)
        T = rc_T_estimate(p.A_rc, p.tau_s, p.beta, eps)
        prov.update(method="rc_T_estimate", T_eps=T)
        return -T, T, prov
    if kind == "qpsk-rc":
        A = spec.continuous.meta["A_rc"]
        p = _rc_params(rho, A)
        N_sym = len(spec.continuous.meta["symbols"])
        T_eps = rc_T_estimate(A, p.tau_s, p.beta, eps)
        T1, T2 = qpsk_domain(N_sym, p.tau_s, eps, A, p.beta, T_eps=T_eps)
        prov.update(method="qpsk_domain", T_eps=T_eps, W=5 * np.log2(N_sym))
        return T1, T2, prov
    if kind == "zero" and S.K == 0:
        return -1.0, 1.0, {"method": "default (zero spectrum)"}
    if S.K:
        kappa, T = soliton_domain(S)
        prov.update(method="soliton_domain", kappa=kappa)
        return -T, T, prov
    raise InputError("no domain heuristic for this spectrum; pass --T1/--T2")


def _reference_q(raw: dict, grid: TimeGrid):
    rho = raw["rho"]
    if rho.get("kind") == "sech":
        A = float(rho.get("A_R", 0.4)) + int(rho.get("K", 0))
        return sech_potential(A, grid).q
    if rho.get("kind", "zero") == "zero" and not raw.get("bound_states"):
        return np.zeros(grid.N + 1, complex)
    return None


def _rel(num, ref, fn) -> float:
    num, ref = np.asarray(num), np.asarray(ref)
    if not np.any(ref):
        return 0.0 if not np.any(num) else float("inf")
    return fn(num, ref)


def _rho_error(q: SampledPotential, spec: NFSpectrum) -> float:
    """Relative error of the IA_3 reflection samples on ``Omega_h``."""
    N = q.grid.N
    rs = reflection_samples(forward_scatter(q, "ia3"), q.grid, max(N // 2, 1))
    ok = ~rs.near_zero
    return _rel(rs.rho[ok], spec.continuous(rs.xi)[ok], metric_rho)


def _orders(errs, Ns):
    out = [float("nan")]
    for i in range(1, len(errs)):
        e0, e1 = errs[i - 1], errs[i]
        if e0 > 0 and e1 > 0:
            out.append(float(np.log(e0 / e1) / np.log(Ns[i] / Ns[i - 1])))
        else:
            out.append(float("nan"))
    return out


def _out_dir(args) -> Path:
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    return out


def _write_json(path: Path, obj) -> None:
    path.write_text(json.dumps(obj, indent=2, default=_jsonable) + "\n")


def _jsonable(x):
    if isinstance(x, (np.floating, np.integer)):
        return x.item()
    if isinstance(x, complex):
        return [x.real, x.imag]
    if isinstance(x, np.ndarray):
        return x.tolist()
    raise TypeError(type(x))


def _config(args) -> dict:
    return {k: v for k, v in vars(args).items() if k != "func"}


def _sweep(args) -> list[int]:
    if not args.sweep:
        return [args.N]
    try:
        Ns = [int(s) for s in args.sweep.split(",") if s.strip()]
    except ValueError:
        raise InputError(f"bad --sweep list {args.sweep!r}")
    if not Ns or any(n < 1 for n in Ns):
        raise InputError("--sweep needs positive integers")
    return Ns


def _check_pow2(N: int, lp: str) -> None:
    if lp == "fast" and N & (N - 1):
        raise InputError(f"N={N} must be a power of two for the fast path")


def _build_grid(T1: float, T2: float, N: int, spec: NFSpectrum) -> TimeGrid:
    grid = TimeGrid(T1, T2, N)
    if spec.continuous.bandlimited and grid.Lambda < spec.Lambda:
        need = int(np.ceil(2 * spec.Lambda * (T2 - T1) / np.pi))
        raise InputError(
            f"grid band {grid.Lambda:.4g} < spectrum support {spec.Lambda:.4g}; "
            f"use N >= {need}")
    return grid


# ---------------------------------------------------------------------------
# commands
# ---------------------------------------------------------------------------

def cmd_inft(args) -> int:
    spec, raw = _load_spectrum(args.spectrum, args.seed)
    _check_pow2(args.N, args.lp)
    T1, T2, prov = _domain(spec, raw, args.eps, args)
    grid = _build_grid(T1, T2, args.N, spec)
    t0 = time.perf_counter()
    q = inft(spec, grid, n_os=args.n_os, route=args.synth, lp=args.lp, dt=args.dt)
    elapsed = time.perf_counter() - t0
    out = _out_dir(args)
    write_potential_csv(out / "potential.csv", q)
    report = {
        "schema": SCHEMA, "version": __version__, "command": "inft",
        "config": _config(args),
        "grid": {"T1": grid.T1, "T2": grid.T2, "N": grid.N, "h": grid.h,
                 "Lambda": grid.Lambda},
        "spectrum_Lambda": spec.Lambda,
        "domain": prov,
        "methods": {"lp": args.lp, "synth": args.synth, "dt": args.dt},
        "K": spec.K,
        "timing_s": elapsed,
    }
    ref = _reference_q(raw, grid)
    if ref is not None:
        report["e_rel_q"] = _rel(q.q, ref, metric_q)
    _write_json(out / "report.json", report)
    return 0


def cmd_nft(args) -> int:
    try:
        p = read_potential_csv(args.signal)
    except (OSError, ValueError) as exc:
        raise InputError(f"cannot read signal {args.signal}: {exc}")
    t0 = time.perf_counter()
    P = forward_scatter(p, args.scheme)
    M = max(1, (args.n_os * p.grid.N) // 2)
    rs = reflection_samples(P, p.grid, M)
    zetas = [complex(*map(float, z.split(","))) for z in args.zeta or []]
    m = 1 if args.scheme == "tr" else int(args.scheme[-1])
    b = norming_constants(p, zetas, m=m) if zetas else np.zeros(0)
    elapsed = time.perf_counter() - t0
    out = _out_dir(args)
    with open(out / "rho.csv", "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["xi", "re_rho", "im_rho", "near_zero"])
        for x, r, nz in zip(rs.xi, rs.rho, rs.near_zero):
            w.writerow([repr(float(x)), repr(float(r.real)),
                        repr(float(r.imag)), int(nz)])
    _write_json(out / "report.json", {
        "schema": SCHEMA, "version": __version__, "command": "nft",
        "config": _config(args),
        "grid": {"T1": p.grid.T1, "T2": p.grid.T2, "N": p.grid.N,
                 "h": p.grid.h},
        "bound_states": [{"zeta": [z.real, z.imag], "b": [c.real, c.imag]}
                         for z, c in zip(zetas, b)],
        "near_zero_count": int(rs.near_zero.sum()),
        "timing_s": elapsed,
    })
    return 0


def _convergence_forward(args, Ns):
    A = float(args.sech)
    T = float(args.T2) if args.T2 is not None else 30.0
    xi = np.linspace(-4, 4, 65)
    exact = sech_a(xi, A)
    rows = []
    for N in Ns:
        grid = TimeGrid.symmetric(T, N)
        t0 = time.perf_counter()
        P = forward_scatter(sech_potential(A, grid), args.scheme)
        a, _ = scattering_coefficients(P, grid, xi)
        rows.append({"N": N, "e_rel_a": _rel(a, exact, metric_rho),
                     "runtime_s": time.perf_counter() - t0})
    return rows, "e_rel_a"


def _convergence_inverse(args, Ns):
    spec, raw = _load_spectrum(args.spectrum, args.seed)
    T1, T2, _ = _domain(spec, raw, args.eps, args)
    rows = []
    for N in Ns:
        _check_pow2(N, args.lp)
        grid = _build_grid(T1, T2, N, spec)
        t0 = time.perf_counter()
        q = inft(spec, grid, n_os=args.n_os, route=args.synth, lp=args.lp,
                 dt=args.dt)
        row = {"N": N, "runtime_s": time.perf_counter() - t0}
        ref = _reference_q(raw, grid)
        row["e_rel_q"] = _rel(q.q, ref, metric_q) if ref is not None else float("nan")
        row["e_rel_rho"] = _rho_error(q, spec)
        if spec.K:
            b = norming_constants(q, spec.discrete.eigenvalues)
            row["e_rel_b"] = metric_b(b, spec.discrete.norming_constants)
        else:
            row["e_rel_b"] = float("nan")
        rows.append(row)
    key = "e_rel_q" if not np.isnan(rows[0]["e_rel_q"]) else "e_rel_rho"
    return rows, key


def cmd_convergence(args) -> int:
    Ns = _sweep(args)
    if args.sech is not None:
        rows, key = _convergence_forward(args, Ns)
    elif args.spectrum:
        rows, key = _convergence_inverse(args, Ns)
    else:
        raise InputError("convergence needs --spectrum or --sech")
    orders = _orders([r[key] for r in rows], [r["N"] for r in rows])
    out = _out_dir(args)
    cols = ["N"] + [k for k in rows[0] if k not in ("N", "runtime_s")] \
        + ["runtime_s", "order"]
    with open(out / "convergence.csv", "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(cols)
        for r, o in zip(rows, orders):
            r = dict(r, order=o)
            w.writerow([r[c] if c == "N" else repr(float(r[c])) for c in cols])
    _write_json(out / "report.json", {
        "schema": SCHEMA, "version": __version__, "command": "convergence",
        "config": _config(args), "metric": key, "rows": rows,
        "orders": orders})
    return 0


def cmd_domain(args) -> int:
    spec, raw = _load_spectrum(args.spectrum, args.seed)
    T1, T2, prov = _domain(spec, raw, args.eps, args)
    res = {"schema": SCHEMA, "version": __version__, "command": "domain",
           "config": _config(args), "T1": T1, "T2": T2, "provenance": prov}
    if raw["rho"].get("kind") == "rc" and args.numeric:
        p = _rc_params(raw["rho"])
        res["T_epstein"] = find_T(rc_impulse(p), args.eps, scale=0.25 * p.tau_s)
    out = _out_dir(args)
    _write_json(out / "domain.json", res)
    print(json.dumps({"T1": T1, "T2": T2}))
    return 0


def cmd_bench(args) -> int:
    Ns = _sweep(args)
    rows = []
    for N in Ns:
        _check_pow2(N, args.lp)
        grid = TimeGrid.symmetric(30.0, N)
        plan = SynthesisPlan.from_grid(grid, args.n_os)
        P = lp_input_direct(rho_fourier_coeffs(sech_spectrum(0.4).continuous, plan))
        peel = lp_fast if args.lp == "fast" else lp_sequential
        times = []
        for _ in range(args.repeat):
            t0 = time.perf_counter()
            peel(P, grid)
            times.append(time.perf_counter() - t0)
        med = float(np.median(times))
        rows.append((N, med, med / N))
    out = _out_dir(args)
    with open(out / "bench.csv", "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["N", "seconds", "seconds_per_sample"])
        for r in rows:
            w.writerow([r[0], repr(r[1]), repr(r[2])])
    return 0


# ---------------------------------------------------------------------------
# parser
# ---------------------------------------------------------------------------

def _positive_float(s):
    v = float(s)
    if not v > 0:
        raise argparse.ArgumentTypeError("must be positive")
    return v


def _positive_int(s):
    v = int(s)
    if v < 1:
        raise argparse.ArgumentTypeError("must be >= 1")
    return v


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="nftlab", description=__doc__.split("\n")[0])
    ap.add_argument("--version", action="version", version=__version__)
    sub = ap.add_subparsers(dest="command", required=True)

    def common(p):
        p.add_argument("--N", type=_positive_int, default=4096)
        p.add_argument("--n-os", dest="n_os", type=_positive_int, default=8)
        p.add_argument("--eps", type=_positive_float, default=1e-9)
        p.add_argument("--seed", type=int, default=None)
        p.add_argument("--out", default=".")
        p.add_argument("--T1", type=float, default=None)
        p.add_argument("--T2", type=float, default=None)

    def inverse(p):
        p.add_argument("--lp", choices=["seq", "fast"], default="fast")
        p.add_argument("--synth", choices=["direct", "rh"], default="direct")
        p.add_argument("--dt", choices=["cdt", "fdt", "fdt-pf"], default="cdt")

    p = sub.add_parser("inft", help="spectrum JSON -> potential CSV")
    common(p)
    inverse(p)
    p.add_argument("--spectrum", required=True)
    p.set_defaults(func=cmd_inft)

    p = sub.add_parser("nft", help="potential CSV -> reflection samples")
    common(p)
    p.add_argument("--signal", required=True)
    p.add_argument("--scheme", choices=["tr", "ia1", "ia2", "ia3"], default="ia3")
    p.add_argument("--zeta", action="append",
                   help="eigenvalue 're,im' for a norming constant; repeatable")
    p.set_defaults(func=cmd_nft)

    p = sub.add_parser("convergence", help="error sweep over N")
    common(p)
    inverse(p)
    p.add_argument("--spectrum")
    p.add_argument("--sech", type=float, default=None,
                   help="forward sweep on A sech t instead of an inverse sweep")
    p.add_argument("--scheme", choices=["tr", "ia1", "ia2", "ia3"], default="ia3")
    p.add_argument("--sweep", default="1024,2048,4096,8192,16384")
    p.set_defaults(func=cmd_convergence)

    p = sub.add_parser("domain", help="computational-domain estimate")
    common(p)
    p.add_argument("--spectrum", required=True)
    p.add_argument("--numeric", action="store_true",
                   help="also search the Epstein bound numerically (rc only)")
    p.set_defaults(func=cmd_domain)

    p = sub.add_parser("bench", help="layer-peeling timings")
    common(p)
    p.add_argument("--lp", choices=["seq", "fast"], default="fast")
    p.add_argument("--sweep", default="8192,16384,32768,65536")
    p.add_argument("--repeat", type=_positive_int, default=5)
    p.set_defaults(func=cmd_bench)
    return ap


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (InputError, NotImplementedError, ValueError, KeyError) as exc:
        print(f"nftlab: error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except ArithmeticError as exc:
        print(f"nftlab: numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERIC


if __name__ == "__main__":
    sys.exit(main())
