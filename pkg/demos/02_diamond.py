"""
Reconstruction with and without a certificate
=============================================

Four nodes: y4 -> y1 -> y2 -> y3 <- y4. The coparents y2 and y4 are linked
by the moral bound, closing two triangles; the removal tests then have to
decide which triangle edge is spurious.
"""
import json

from utfsr import networks as nw
from utfsr.model import psd
from utfsr.reconstruct import certify_against_truth, utf_sr

# generic gains: exactly one edge per triangle is removable
m = nw.diamond()
report = utf_sr(psd(m))
print(report.status.value)
print("moral bound:", report.moral_bound.sorted_edges())
print("output:     ", report.output.sorted_edges())
print(json.dumps(report.to_dict()["triangles"][0], indent=1))

# gains chosen so that y4's direct influence on y3 cancels the path via y1, y2
m = nw.diamond(2, 2, 2, -8)
report = utf_sr(psd(m))
print(report.status.value, "removed", report.removed_edges)

# the flag is honest: a true edge went missing, but nothing spurious was kept
truth = certify_against_truth(report, m)
print("false positives:", sorted(truth.false_positives))
print("false negatives:", sorted(truth.false_negatives))
