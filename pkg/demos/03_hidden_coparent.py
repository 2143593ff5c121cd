"""
Why the moral bound step matters
================================

y2 and y4 are coparents of both y3 and y5. For one value of the y2 -> y5
gain (c = 3) the two collider contributions cancel, the moral bound never
links y2 and y4, and no triangle needs testing. For other values the link
appears and the removal tests are asked to resolve it.
"""
from utfsr import networks as nw
from utfsr.lti import covariances_from_psd
from utfsr.model import psd
from utfsr.reconstruct import certify_against_truth, utf_sr
from utfsr.wiener import cwsep, noncausal_wiener

for c in (3.0, 1.0):
    m = nw.hidden_coparent(c)
    S = psd(m)
    res = noncausal_wiener(S, 1, [0, 2, 3, 4])
    report = utf_sr(S)
    truth = certify_against_truth(report, m)
    print(f"c = {c}: y4 margin when estimating y2 = {res.margin(3):.3g}")
    print(f"  {report.status.value}, {len(report.triangles)} triangles, "
          f"missing {sorted(truth.false_negatives)}")

# y3 and y4 are uncorrelated at every lag although y4 drives y3, so a removal
# test run on the full moral graph would drop the true edge y3 - y4
R = covariances_from_psd(psd(nw.hidden_coparent(3.0)), 32)
print("cwsep(y3, {}, y4):", cwsep(R, 2, [], 3).separated)
