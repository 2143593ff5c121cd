"""
Two networks, one spectrum
==========================

Without restrictions on the topology the skeleton cannot be read off the
output spectrum: a triangle whose direct edge cancels the indirect path looks
exactly like a collider with rescaled noise.
"""
import numpy as np

from utfsr import networks as nw
from utfsr.lti import FrequencyGrid
from utfsr.model import causal_graph, psd, validate_utf

grid = FrequencyGrid(256)

# y1 -> y2 -> y3 plus a direct y1 -> y3 that undoes the path through y2
triangle = nw.triangle_network(a=1.0, b=1.0, c=-1.0)
# y1 -> y2 <- y3 with a smaller gain and non-unit noise
collider = nw.triangle_twin(a=1.0, b=1.0)

S1 = psd(triangle, grid).values
S2 = psd(collider, grid).values
print("largest entrywise difference:", np.max(np.abs(S1 - S2)))
print("spectrum (constant in frequency):")
print(S1[0].real)

# the spectra agree although the edge sets differ
print("edges of the first network: ", sorted(causal_graph(triangle).edges))
print("edges of the second network:", sorted(causal_graph(collider).edges))

# only the second one satisfies the triangle-free assumption
print(validate_utf(triangle).summary())
print(validate_utf(collider).summary())
