"""Small reference networks with known structure.

Nodes are 0-based here; docstrings name them ``y1 .. yn``.
"""
from __future__ import annotations

from .graphs import DirectedGraph
from .lti import RationalTransfer
from .model import Ldim, NoiseChannel


def triangle_network(a=1.0, b=1.0, c=-1.0) -> Ldim:
    """``y1 -> y2`` (gain a), ``y2 -> y3`` (b), ``y1 -> y3`` (c), unit noise.

    With ``c = -a*b`` the direct path cancels the one through ``y2`` and
    ``y1``, ``y3`` become uncorrelated.
    """
    return Ldim(3, {(0, 1): a, (1, 2): b, (0, 2): c})


def triangle_twin(a=1.0, b=1.0) -> Ldim:
    """Two-edge network ``y1 -> y2 <- y3`` whose output spectrum equals that
    of ``triangle_network(a, b, -a*b)``."""
    k = 1.0 + b * b
    return Ldim(3, {(0, 1): a, (2, 1): b / k},
                [NoiseChannel(1.0), NoiseChannel(1.0 / k), NoiseChannel(k)])


def diamond(h14=1.0, h21=1.0, h32=1.0, h34=1.0) -> Ldim:
    """``y4 -> y1 -> y2 -> y3 <- y4`` with static gains; ``y2`` and ``y4``
    are coparents of ``y3``.

    The default gains give a network whose skeleton is recovered and
    certified. ``diamond(2, 2, 2, -8)`` makes the path through
    ``y1, y2`` cancel the direct ``y4 -> y3`` influence.
    """
    return Ldim(4, {(3, 0): h14, (0, 1): h21, (1, 2): h32, (3, 2): h34})


def hidden_coparent(c=3.0) -> Ldim:
    """Five nodes where ``y2`` and ``y4`` are coparents twice (of ``y3``
    and ``y5``) with coefficients ``3, -6`` and ``c, 6``.

    The coparent term in the precision matrix is ``-18 + 6c``: at ``c = 3``
    the two collider contributions cancel, so ``{y2, y4}`` never enters the
    moral bound. Independently of ``c``, ``y3`` is uncorrelated with ``y4``.
    """
    return Ldim(5, {(3, 0): 1.0, (0, 1): 2.0, (1, 2): 3.0, (3, 2): -6.0,
                    (1, 4): c, (3, 4): 6.0})


def collider_cancellation(a=1.0, b=1.0) -> Ldim:
    """``y1, y2`` both feed ``y3`` (gains -a, b) and ``y4`` (gains a, b).

    The coparent contributions cancel so the moral bound misses ``{y1, y2}``.
    """
    return Ldim(4, {(0, 2): -a, (1, 2): b, (0, 3): a, (1, 3): b})


def four_cycle(g41=3.0, g51=4.0, g12=1.0, g23=1.0, g34=2.0) -> Ldim:
    """Directed loop ``y1 -> y2 -> y3 -> y4 -> y1`` with one unit delay on
    ``y2 -> y3``, plus an exogenous ``y5 -> y1``.

    ``y4`` and ``y5`` are coparents of ``y1``, closing the triangle
    ``{y1, y4, y5}``. With the default gains the loop gain is ``6 z^-1``,
    which is unstable as a recursion; the output spectrum still exists on the
    unit circle.
    """
    return Ldim(5, {(3, 0): g41, (4, 0): g51, (0, 1): g12,
                    (1, 2): RationalTransfer.delay(1, g23), (2, 3): g34})


def blanket_graph() -> DirectedGraph:
    """``y3 -> y1 -> y2 <- y4``, ``y2 -> y5``: moralizing links ``y1, y4``
    and the Markov blanket of ``y1`` is ``{y2, y3, y4}``."""
    return DirectedGraph(5, frozenset({(2, 0), (0, 1), (3, 1), (1, 4)}))
