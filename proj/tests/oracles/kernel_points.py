"""Line kernel values (1/pi) int_0^inf exp(-t^s) cos(rt) dt at 30 digits.

Run: python3 tests/oracles/kernel_points.py
"""
import mpmath as mp

mp.mp.dps = 30

for s, r in [(3, 4), (3, 8), (3, 12), (2.5, 5), (4, 0), (4, 3), (6, 7), (0.5, 2)]:
    if s < 1:
        # t = u^2 tames the cusp of exp(-t^s) at the origin
        v = mp.quadosc(lambda u: 2 * u * mp.exp(-u ** (2 * s)) * mp.cos(r * u * u), [0, mp.inf],
                       zeros=lambda n: mp.sqrt((n - mp.mpf(1) / 2) * mp.pi / r)) / mp.pi
    elif r == 0:
        v = mp.quad(lambda t: mp.exp(-t ** s), [0, mp.inf]) / mp.pi
    else:
        v = mp.quadosc(lambda t: mp.exp(-t ** s) * mp.cos(r * t), [0, mp.inf], omega=r) / mp.pi
    print(s, r, mp.nstr(v, 20))
