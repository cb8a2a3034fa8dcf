"""The decision diagram the relay consults every block.

Given the current fade w = H_B/H_A the relay must pick a denoising map.
The complex plane splits into a wedge-shaped region around each singular
fade state (use that state's map) plus two clustering-independent zones
where any valid map performs identically: outside all state neighborhoods
at large |w|, and a pocket around the origin at small |w|.

The analytic region test is compared against a brute-force oracle on a
grid, then rendered if matplotlib is available.
"""

import sys
import time

from hepnc import boundary_curves, compare_partition, make_scheme, rasterize

BOUNDS = (-1.6, 1.6, -1.6, 1.6)


def check(sch, n=300):
    t0 = time.perf_counter()
    stats = compare_partition(sch, BOUNDS, n, margin=1e-3)
    dt = time.perf_counter() - t0
    print(f"{sch.m1}x{sch.m2} at {n}x{n}: {stats['compared']} cells away from "
          f"boundaries, {stats['mismatches']} analytic/oracle mismatches "
          f"({dt:.1f} s)")
    return stats


def render(sch, n, path):
    try:
        import matplotlib
        matplotlib.use("Agg")
        import matplotlib.pyplot as plt
        import numpy as np
    except ImportError:
        print("matplotlib not installed; skipping the plot")
        return
    xs, ys, labels = rasterize(sch, BOUNDS, n)
    names = sorted(set(labels))
    index = {name: i for i, name in enumerate(names)}
    img = np.array([index[l] for l in labels]).reshape(n, n)

    fig, ax = plt.subplots(figsize=(6, 6))
    ax.imshow(img, origin="lower", extent=BOUNDS, cmap="tab20",
              interpolation="nearest")
    for c in boundary_curves(sch):
        if c.kind == "circle":
            ax.add_patch(plt.Circle((c.center.real, c.center.imag), c.radius,
                                    fill=False, lw=0.5, color="black"))
        else:
            # a*x + b*y = c drawn across the frame
            t = np.linspace(-3, 3, 2)
            if abs(c.b) > abs(c.a):
                ax.plot(t, (c.c - c.a * t) / c.b, lw=0.5, color="black")
            else:
                ax.plot((c.c - c.b * t) / c.a, t, lw=0.5, color="black")
    ax.set_xlim(BOUNDS[0], BOUNDS[1])
    ax.set_ylim(BOUNDS[2], BOUNDS[3])
    ax.set_xlabel("Re(w)")
    ax.set_ylabel("Im(w)")
    ax.set_title(f"Fade-plane partition, {sch.m1}-PSK / {sch.m2}-PSK")
    fig.tight_layout()
    fig.savefig(path, dpi=130)
    print(f"wrote {path}")


def main():
    n = int(sys.argv[1]) if len(sys.argv) > 1 else 300
    for m1, m2 in [(4, 2), (8, 4)]:
        sch = make_scheme(m1, m2)
        stats = check(sch, n)
        if stats["mismatches"]:
            raise SystemExit("partition disagreement; see stats above")
        render(sch, n, f"partition_{m1}x{m2}.png")


if __name__ == "__main__":
    main()
