"""Where does joint relay decoding break down?

For each constellation pairing this script enumerates the singular fade
states: channel ratios H_B/H_A at which two different transmitted pairs
produce the same noiseless superposition at the relay.  The closed-form
enumeration (concentric circles, evenly rotated) is cross-checked against
a brute-force sweep over all difference ratios, and optionally drawn.
"""

import math

from hepnc import brute_force_sfs, enumerate_sfs, make_scheme, sfs_circle_radii


def describe(m1, m2):
    sch = make_scheme(m1, m2)
    states = enumerate_sfs(sch)
    brute = brute_force_sfs(sch)
    radii = sfs_circle_radii(sch)

    print(f"\n{m1}-PSK / {m2}-PSK: {len(states)} singular fade states "
          f"({len(radii)} circles + origin)")
    print(f"  circle radii: {', '.join(f'{r:.4f}' for r in radii)}")
    for s in states[:5]:
        tag = "origin" if s.is_origin else (
            f"circle (n1={s.circle_index[0]}, n2={s.circle_index[1]}) "
            f"slot {s.phase_slot}")
        print(f"  gamma={s.gamma:.4f}  theta={s.theta:+.4f}  {tag}")
    if len(states) > 5:
        print(f"  ... {len(states) - 5} more")

    matched = all(
        any(abs(s.value - b) <= 1e-9 for b in brute) for s in states
    ) and len(states) == len(brute)
    print(f"  matches brute force over all symbol differences: {matched}")
    return states


def plot(states, m1, m2, path):
    try:
        import matplotlib
        matplotlib.use("Agg")
        import matplotlib.pyplot as plt
    except ImportError:
        print("matplotlib not installed; skipping the plot")
        return
    fig, ax = plt.subplots(figsize=(5, 5))
    xs = [s.value.real for s in states]
    ys = [s.value.imag for s in states]
    ax.scatter(xs, ys, s=18, color="crimson", zorder=3)
    for r in sfs_circle_radii(make_scheme(m1, m2)):
        ax.add_patch(plt.Circle((0, 0), r, fill=False, ls=":", color="gray"))
    ax.set_aspect("equal")
    ax.set_xlabel("Re(H_B / H_A)")
    ax.set_ylabel("Im(H_B / H_A)")
    ax.set_title(f"Singular fade states, {m1}-PSK / {m2}-PSK")
    fig.tight_layout()
    fig.savefig(path, dpi=120)
    print(f"\nwrote {path}")


def main():
    for m1, m2 in [(4, 2), (8, 2), (8, 4)]:
        states = describe(m1, m2)
    plot(states, 8, 4, "sfs_8x4.png")

    # sanity: the innermost circle shrinks as the stronger user's
    # constellation densifies, because closer points collide at weaker fades
    inner = {m1: sfs_circle_radii(make_scheme(m1, 2))[0] for m1 in (2, 4, 8)}
    print(f"\ninnermost circle radius by M1: "
          + ", ".join(f"{k}: {v:.4f} (= sin(pi/{k}))" for k, v in inner.items()))
    assert all(abs(v - math.sin(math.pi / k)) < 1e-12 for k, v in inner.items())


if __name__ == "__main__":
    main()
