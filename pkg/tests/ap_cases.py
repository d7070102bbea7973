"""Hand-computed AP scenarios shared by the unit and acceptance suites.

Each case: (name, labels in rank order, scores, num_gt, expected AP). The
expected value is worked out from the PR points and the precision envelope.
"""
from __future__ import annotations

HAND_AP_CASES = [
    # (r, p) = (1, 1)
    ("single TP", [True], [0.9], 1, 1.0),
    # (0, 0), (1, 1/2): envelope 1/2 over [0, 1]
    ("FP then TP", [False, True], [0.9, 0.8], 1, 0.5),
    # (1/2, 1), (1/2, 1/2), (1, 2/3): 1/2 * 1 + 1/2 * 2/3
    ("TP FP TP", [True, False, True], [0.9, 0.8, 0.7], 2, 5 / 6),
    ("no detections", [], [], 3, 0.0),
    ("only FPs", [False, False], [0.9, 0.1], 1, 0.0),
    # recall stops at 2/4
    ("partial recall", [True, True], [0.9, 0.8], 4, 0.5),
    # (0, 0), (1/2, 1/2), (1/2, 1/3), (1, 1/2): envelope 1/2 everywhere
    ("alternating", [False, True, False, True], [0.9, 0.8, 0.7, 0.6], 2, 0.5),
    # (1/2, 1), (1/2, 1/2), (1/2, 1/3), (1, 1/2): 1/2 + 1/2 * 1/2
    ("late second hit", [True, False, False, True], [0.9, 0.8, 0.7, 0.6], 2, 0.75),
    # (1/3, 1), (2/3, 1), (2/3, 2/3), (1, 3/4): 2/3 + 1/3 * 3/4
    ("three of three", [True, True, False, True], [0.9, 0.8, 0.7, 0.6], 3, 11 / 12),
    # (0, 0), (1/2, 1/2), (1, 2/3): envelope 2/3 throughout
    ("rising precision", [False, True, True], [0.9, 0.8, 0.7], 2, 2 / 3),
    # equal scores keep input order: FP ranks first
    ("tie keeps order FP first", [False, True], [0.5, 0.5], 1, 0.5),
    ("tie keeps order TP first", [True, False], [0.5, 0.5], 1, 1.0),
    # scores given out of rank order: ranked TP(0.9), FP(0.6), TP(0.3)
    ("unsorted input", [False, True, True], [0.6, 0.9, 0.3], 2, 5 / 6),
]
