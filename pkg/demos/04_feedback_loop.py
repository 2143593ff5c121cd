"""
A feedback loop of length four
==============================

y1 -> y2 -> y3 -> y4 -> y1 with a unit delay on y2 -> y3, and y5 -> y1.
Longer cycles are allowed; only 2-cycles and skeleton triangles are not.
Whether the loop is stable decides whether the removal tests succeed.
"""
from utfsr import networks as nw
from utfsr.errors import DivergenceDetected
from utfsr.lti import covariances_from_psd
from utfsr.model import psd, simulate, validate_utf
from utfsr.reconstruct import utf_sr
from utfsr.wiener import cwsep

for g41 in (0.25, 3.0):
    m = nw.four_cycle(g41=g41)
    print(f"loop gain {2 * g41:g}/z:", validate_utf(m).summary())
    S = psd(m)
    report = utf_sr(S)
    print("  ", report.status.value, "removed", report.removed_edges)
    R = covariances_from_psd(S, 32)
    print("   cwsep(y5, {}, y4):   ", cwsep(R, 4, [], 3).separated)
    print("   cwsep(y5, {}, y4/z): ", cwsep(R, 4, [], 3, delayed=True).separated)
    print("   cwsep(y4, {}, y5/z): ", cwsep(R, 3, [], 4, delayed=True).separated)
    try:
        simulate(m, 10_000, seed=0)
        print("   simulation stays bounded")
    except DivergenceDetected as exc:
        print("   simulation diverges:", exc)
