"""Reference latency table (BEC design, epsilon = 0.3).

Keys are ``(n, rate)``; each entry holds the unoptimized cycle count and
``(threshold, cycles, reduction_percent)`` rows as published. Some
published percentages do not equal ``1 - cycles/baseline`` exactly; they
are kept verbatim.
"""

DESIGN_EPSILON = 0.3

LATENCY_TARGETS = {
    (1024, 0.3): (303, [(1e-13, 288, 4.9), (1e-12, 260, 14.0), (1e-11, 234, 22.7)]),
    (1024, 0.5): (266, [(1e-4, 255, 4.1), (5e-4, 218, 18.0), (1e-3, 197, 21.8)]),
    (1024, 0.7): (172, [(0.1, 165, 4.0), (0.2, 137, 20.0), (0.4, 126, 23.6)]),
    (2048, 0.3): (576, [(1e-18, 549, 4.6), (1e-17, 519, 9.9), (1e-16, 493, 14.4)]),
    (2048, 0.5): (493, [(1e-6, 487, 1.2), (1e-5, 436, 10.5), (1e-4, 323, 33.6)]),
    (2048, 0.7): (297, [(0.1, 269, 9.4), (0.2, 248, 16.5), (0.3, 228, 23.2)]),
    (16384, 0.3): (3992, [(1e-50, 3661, 8.3), (1e-45, 3242, 18.8), (1e-40, 2721, 31.8)]),
    (16384, 0.5): (3327, [(1e-13, 3187, 4.2), (1e-12, 2898, 12.9), (1e-11, 2465, 25.9)]),
    (16384, 0.7): (1350, [(0.1, 1260, 6.6), (0.2, 1165, 13.7), (0.4, 898, 33.4)]),
}


def k_for(n: int, rate: float) -> int:
    return int(round(rate * n))
