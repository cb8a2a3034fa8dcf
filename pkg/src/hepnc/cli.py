"""Command-line front end: enumeration, map verification, region rasters,
and simulation sweeps, emitting CSV/JSON artifacts.

Verbs: sfs, maps, regions, simulate, verify.  Every command is
deterministic given its inputs; exit status is 0 only when all requested
verifications pass and all outputs were written.
"""

from __future__ import annotations

import argparse
import dataclasses
import json
import math
import sys
import time

import numpy as np

from . import clustering, quantizer, sfs as sfs_mod, simulation
from .psk import SchemePair, make_scheme

DEFAULT_GRID = (-1.6, 1.6, -1.6, 1.6)
DEFAULT_GRID_N = 500
DEFAULT_SNR_BR = {"awgn_random_phase": 7.0, "rayleigh_block": 25.0}


def _fmt(x: float) -> str:
    return f"{x:.12g}"


class CliError(Exception):
    """Validation failure; message is printed and the command exits 2."""


def _scheme_from_args(args) -> SchemePair:
    pos = [v for v in (args.m1, args.m2) if v is not None]
    if args.scheme is not None and pos:
        raise CliError("give the scheme either positionally or via --scheme, not both")
    if args.scheme is not None:
        m1, m2 = args.scheme
    elif len(pos) == 2:
        m1, m2 = pos
    else:
        raise CliError("scheme required: pass M1 M2 or --scheme M1 M2")
    try:
        return make_scheme(m1, m2)
    except ValueError as e:
        raise CliError(str(e)) from None


def _open_out(path: str | None):
    if path is None:
        return sys.stdout, False
    try:
        return open(path, "w", encoding="utf-8"), True
    except OSError as e:
        raise CliError(f"cannot write {path}: {e}") from None


def _library(scheme: SchemePair) -> clustering.MapLibrary:
    try:
        return clustering.builtin_library(scheme)
    except ValueError:
        return clustering.construct_library(scheme)


# --- sfs ---------------------------------------------------------------


def run_sfs(scheme: SchemePair, out_path: str | None) -> int:
    states = sfs_mod.enumerate_sfs(scheme)
    brute = sfs_mod.brute_force_sfs(scheme)
    fh, close = _open_out(out_path)
    try:
        fh.write("gamma,theta,re,im,n1,n2,l,brute_force_match\n")
        for s in states:
            match = any(abs(s.value - b) <= 1e-9 for b in brute)
            if s.is_origin:
                n1 = n2 = slot = ""
            else:
                n1, n2 = (str(v) for v in s.circle_index)
                slot = str(s.phase_slot)
            fh.write(
                f"{_fmt(s.gamma)},{_fmt(s.theta)},{_fmt(s.value.real)},"
                f"{_fmt(s.value.imag)},{n1},{n2},{slot},"
                f"{'true' if match else 'false'}\n"
            )
    finally:
        if close:
            fh.close()
    if close:
        print(f"wrote {len(states)} singular fade states to {out_path}")
    ok = len(states) == len(brute) and all(
        any(abs(s.value - b) <= 1e-9 for b in brute) for s in states
    )
    return 0 if ok else 1


# --- maps --------------------------------------------------------------


def _map_report(m: clustering.ClusterMap, library: clustering.MapLibrary) -> dict:
    removed = []
    for s in library.sfs_list:
        if not s.is_origin and clustering.removes_sfs(m, s):
            n1, n2 = s.circle_index
            removed.append([n1, n2, s.phase_slot])
    return {
        "cells": m.cells.tolist(),
        "label_count": m.label_count,
        "exclusive_law": clustering.check_exclusive_law(m),
        "broadcast_length": clustering.broadcast_length(m),
        "removes": removed,
    }


def run_maps(scheme: SchemePair, out_path: str | None) -> int:
    try:
        library = _library(scheme)
    except RuntimeError as e:
        print(f"map construction failed: {e}", file=sys.stderr)
        return 1
    reports = [_map_report(m, library) for m in library.maps]
    uncovered = [
        i for i, (s, cov) in enumerate(zip(library.sfs_list, library.coverage))
        if not s.is_origin and not cov
    ]
    doc = {
        "scheme": [scheme.m1, scheme.m2],
        "maps": reports,
        "coverage_complete": not uncovered,
    }
    fh, close = _open_out(out_path)
    try:
        json.dump(doc, fh, indent=2)
        fh.write("\n")
    finally:
        if close:
            fh.close()
    if close:
        print(f"wrote {len(reports)} maps to {out_path}")
    ok = doc["coverage_complete"] and all(r["exclusive_law"] for r in reports)
    return 0 if ok else 1


def run_maps_check(scheme: SchemePair, check_path: str) -> int:
    try:
        with open(check_path, encoding="utf-8") as fh:
            doc = json.load(fh)
    except (OSError, json.JSONDecodeError) as e:
        raise CliError(f"cannot read {check_path}: {e}") from None
    if "scheme" in doc and tuple(doc["scheme"]) != (scheme.m1, scheme.m2):
        print(f"scheme mismatch: file says {doc['scheme']}", file=sys.stderr)
        return 1
    cell_blocks = [m["cells"] for m in doc["maps"]] if "maps" in doc else [doc["cells"]]
    failures = 0
    for i, cells in enumerate(cell_blocks):
        try:
            clustering.ClusterMap.from_cells(scheme, cells)
        except ValueError as e:
            failures += 1
            print(f"map {i}: FAIL ({e})")
        else:
            print(f"map {i}: ok")
    return 0 if failures == 0 else 1


# --- regions -----------------------------------------------------------


def _curve_json(c: quantizer.RegionCurve) -> dict:
    if c.kind == "circle":
        return {
            "kind": "circle",
            "center_re": c.center.real,
            "center_im": c.center.imag,
            "radius": c.radius,
        }
    return {"kind": "line", "a": c.a, "b": c.b, "c": c.c}


def run_regions(scheme: SchemePair, grid, out_path: str | None) -> int:
    xmin, xmax, ymin, ymax, n = grid
    bounds = (xmin, xmax, ymin, ymax)
    n = int(n)
    if n < 1 or xmax <= xmin or ymax <= ymin:
        raise CliError("invalid grid: need XMIN < XMAX, YMIN < YMAX, N >= 1")
    raster_path = out_path or f"regions_{scheme.label()}.csv"
    boundary_path = raster_path.rsplit(".", 1)[0] + ".boundaries.json"

    xs, ys, labels = quantizer.rasterize(scheme, bounds, n)
    fh, close = _open_out(raster_path)
    try:
        fh.write("x,y,label\n")
        i = 0
        for y in ys:
            for x in xs:
                fh.write(f"{_fmt(x)},{_fmt(y)},{labels[i]}\n")
                i += 1
    finally:
        if close:
            fh.close()

    curves = [_curve_json(c) for c in quantizer.boundary_curves(scheme)]
    with open(boundary_path, "w", encoding="utf-8") as fh:
        json.dump({"scheme": [scheme.m1, scheme.m2], "curves": curves}, fh, indent=2)
        fh.write("\n")

    stats = quantizer.compare_partition(scheme, bounds, n)
    print(
        f"raster {n}x{n}: {stats['compared']} cells compared, "
        f"{stats['boundary']} near boundaries, {stats['mismatches']} mismatches"
    )
    print(f"wrote {raster_path} and {boundary_path}")
    return 0 if stats["mismatches"] == 0 else 1


# --- simulate ----------------------------------------------------------


def _parse_config_text(text: str) -> dict:
    values = {}
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise CliError(f"config line {lineno}: expected key = value")
        key, _, val = line.partition("=")
        values[key.strip().lower()] = val.strip()
    return values


def _split_numbers(val: str) -> list[str]:
    return val.replace(",", " ").split()


def load_sim_config(path: str) -> tuple[simulation.SimConfig, list[float]]:
    """Parse a key=value config file into a SimConfig plus the SNR_AR sweep
    points (field-level validation errors raise CliError)."""
    try:
        with open(path, encoding="utf-8") as fh:
            values = _parse_config_text(fh.read())
    except OSError as e:
        raise CliError(f"cannot read {path}: {e}") from None

    def take(key, default=None):
        return values.pop(key, default)

    raw_scheme = take("scheme")
    if raw_scheme is None:
        raise CliError("config field 'scheme' is required (e.g. scheme = 4 2)")
    parts = _split_numbers(raw_scheme)
    if len(parts) != 2:
        raise CliError("config field 'scheme' must be two integers")
    try:
        scheme = make_scheme(int(parts[0]), int(parts[1]))
    except ValueError as e:
        raise CliError(f"config field 'scheme': {e}") from None

    kind = take("channel", "awgn")
    if kind not in simulation._KIND_ALIASES:
        raise CliError(f"config field 'channel': unknown kind {kind!r}")
    kind = simulation._KIND_ALIASES[kind]

    def number(key, default):
        raw = take(key)
        if raw is None:
            return default
        try:
            return float(raw)
        except ValueError:
            raise CliError(f"config field {key!r} must be a number") from None

    def integer(key, default):
        raw = take(key)
        if raw is None:
            return default
        try:
            return int(raw)
        except ValueError:
            raise CliError(f"config field {key!r} must be an integer") from None

    snr_br = number("snr_br_db", DEFAULT_SNR_BR[kind])
    raw_ar = take("snr_ar", "0 5 10 15 20 25 30")
    try:
        snr_ar = [float(v) for v in _split_numbers(raw_ar)]
    except ValueError:
        raise CliError("config field 'snr_ar' must be a list of numbers") from None
    if not snr_ar:
        raise CliError("config field 'snr_ar' must be nonempty")
    symbols = integer("symbols", 100_000)
    seed = integer("seed", 0)
    maps_used = integer("maps_used", None)
    block_length = integer("block_length", 1)
    if values:
        raise CliError(f"unknown config fields: {', '.join(sorted(values))}")

    try:
        channel = simulation.ChannelModel(
            kind=kind, snr_ar_db=snr_ar[0], snr_br_db=snr_br,
            block_length=block_length,
        )
        config = simulation.SimConfig(
            scheme=scheme, channel=channel, library=_library(scheme),
            max_maps_used=maps_used, symbols=symbols, seed=seed,
        )
    except ValueError as e:
        raise CliError(str(e)) from None
    return config, snr_ar


def run_simulate(config_path: str, out_path: str | None,
                 seed: int | None = None, maps_used: int | None = None) -> int:
    config, snr_ar = load_sim_config(config_path)
    try:
        if seed is not None:
            config = dataclasses.replace(config, seed=seed)
        if maps_used is not None:
            config = dataclasses.replace(config, max_maps_used=maps_used)
    except ValueError as e:
        raise CliError(str(e)) from None

    t0 = time.perf_counter()
    results = simulation.sweep(config, snr_ar)
    dt = time.perf_counter() - t0

    fh, close = _open_out(out_path or "sweep.csv")
    try:
        fh.write("snr_ar_db,rer,ber_ab,ber_ba,ber_avg,symbols\n")
        for snr, r in results:
            fh.write(
                f"{_fmt(snr)},{_fmt(r.rer)},{_fmt(r.ber_ab)},{_fmt(r.ber_ba)},"
                f"{_fmt(r.ber_avg)},{r.counts['symbols']}\n"
            )
    finally:
        if close:
            fh.close()
    total = sum(r.counts["symbols"] for _, r in results)
    print(f"simulated {total} symbols over {len(results)} points in {dt:.1f} s")
    return 0


# --- verify ------------------------------------------------------------


def run_verify(scheme: SchemePair, seed: int = 0) -> int:
    checks: list[tuple[str, bool, float]] = []

    t0 = time.perf_counter()
    states = sfs_mod.enumerate_sfs(scheme)
    brute = sfs_mod.brute_force_sfs(scheme)
    from ._complexset import sets_equal

    ok = sets_equal([s.value for s in states], brute, 1e-9)
    expected_circles = scheme.m1 * scheme.m2 // 4 - scheme.m2 // 2 + 1
    ok = ok and len(sfs_mod.sfs_circle_radii(scheme)) == expected_circles
    checks.append(("sfs closed form matches brute force", ok, time.perf_counter() - t0))

    t0 = time.perf_counter()
    try:
        library = _library(scheme)
        ok = all(clustering.check_exclusive_law(m) for m in library.maps)
        ok = ok and all(
            cov for s, cov in zip(library.sfs_list, library.coverage)
            if not s.is_origin
        )
    except RuntimeError:
        ok = False
    checks.append(("map library exclusive law and coverage", ok, time.perf_counter() - t0))

    t0 = time.perf_counter()
    stats = quantizer.compare_partition(scheme, DEFAULT_GRID, 200)
    ok = stats["mismatches"] == 0
    checks.append(("analytic regions match argmin oracle", ok, time.perf_counter() - t0))

    t0 = time.perf_counter()
    rng = np.random.default_rng(seed)
    gammas = rng.uniform(0.0, 2.0, 1000)
    thetas = rng.uniform(-math.pi, math.pi, 1000)
    cap1 = 2.0 * math.sin(math.pi / scheme.m1)
    cap2 = 2.0 * math.sin(math.pi / scheme.m2)
    ok = True
    for m in library.maps:
        for g, th in zip(gammas, thetas):
            bound = min(cap1, g * cap2)
            if clustering.min_cluster_distance(m, g, th) > bound + 1e-9:
                ok = False
                break
        if not ok:
            break
    checks.append(("distance bound holds on random fades", ok, time.perf_counter() - t0))

    failures = 0
    for name, passed, dt in checks:
        print(f"[{'PASS' if passed else 'FAIL'}] {name} ({dt:.2f} s)")
        failures += 0 if passed else 1
    return 0 if failures == 0 else 1


# --- argument parsing ----------------------------------------------------


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="hepnc",
        description="Heterogeneous-PSK physical-layer network coding toolkit",
    )
    sub = parser.add_subparsers(dest="verb", required=True)

    def add_scheme_args(p):
        p.add_argument("m1", nargs="?", type=int, default=None,
                       help="PSK order of user A")
        p.add_argument("m2", nargs="?", type=int, default=None,
                       help="PSK order of user B")
        p.add_argument("--scheme", nargs=2, type=int, metavar=("M1", "M2"))

    p = sub.add_parser("sfs", help="enumerate singular fade states to CSV")
    add_scheme_args(p)
    p.add_argument("--out", metavar="PATH")

    p = sub.add_parser("maps", help="emit or check a denoising map library")
    add_scheme_args(p)
    p.add_argument("--out", metavar="PATH")
    p.add_argument("--check", metavar="PATH",
                   help="verify maps from a JSON file instead of emitting")

    p = sub.add_parser("regions", help="rasterize the fade-plane partition")
    add_scheme_args(p)
    p.add_argument("--out", metavar="PATH")
    p.add_argument(
        "--grid", nargs=5, type=float,
        metavar=("XMIN", "XMAX", "YMIN", "YMAX", "N"),
        default=[*DEFAULT_GRID, DEFAULT_GRID_N],
    )

    p = sub.add_parser("simulate", help="run a simulation sweep from a config file")
    p.add_argument("--config", metavar="PATH", required=True)
    p.add_argument("--out", metavar="PATH")
    p.add_argument("--seed", type=int, metavar="U64")
    p.add_argument("--maps-used", type=int, metavar="K")

    p = sub.add_parser("verify", help="run the self-test suite for a scheme")
    add_scheme_args(p)
    p.add_argument("--seed", type=int, default=0, metavar="U64")
    return parser


def main(argv=None) -> int:
    parser = _build_parser()
    args = parser.parse_args(argv)
    try:
        if args.verb == "sfs":
            return run_sfs(_scheme_from_args(args), args.out)
        if args.verb == "maps":
            scheme = _scheme_from_args(args)
            if args.check:
                return run_maps_check(scheme, args.check)
            return run_maps(scheme, args.out)
        if args.verb == "regions":
            return run_regions(_scheme_from_args(args), args.grid, args.out)
        if args.verb == "simulate":
            return run_simulate(args.config, args.out, args.seed, args.maps_used)
        if args.verb == "verify":
            return run_verify(_scheme_from_args(args), args.seed)
    except CliError as e:
        print(f"error: {e}", file=sys.stderr)
        return 2
    raise AssertionError("unreachable")  # pragma: no cover


if __name__ == "__main__":
    sys.exit(main())
