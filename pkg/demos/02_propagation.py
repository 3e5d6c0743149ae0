"""Path-loss models of the medium module, plotted over distance.

Free space falls off as 1/d^2, two-ray ground as 1/d^4 beyond the crossover
distance, and log-normal shadowing scatters around the log-distance line
with a per-link Gaussian draw.  Writes propagation.png next to this script.
"""

import math

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt
import numpy as np

from wsnsim.medium import (
    PathLossModel,
    PathLossParams,
    crossover_distance,
    free_space_rx_power,
    log_normal_rx_power,
    shadowing_draw_db,
    two_ray_ground_rx_power,
    watts_to_dbm,
)

tx_w = 0.750
fs = PathLossParams()
trg = PathLossParams(model=PathLossModel.TWO_RAY_GROUND, ht_m=1.5, hr_m=1.5)
ln = PathLossParams(model=PathLossModel.LOG_NORMAL_SHADOWING, d0_m=1.0,
                    exponent=2.7, sigma_db=4.0)

distances = np.logspace(0.3, 3.0, 200)
fs_dbm = [watts_to_dbm(free_space_rx_power(tx_w, fs, d)) for d in distances]
trg_dbm = [watts_to_dbm(two_ray_ground_rx_power(tx_w, trg, d)) for d in distances]

# One frozen shadowing draw per link: sample a few links of a run.
links = [(0, peer) for peer in range(1, 40)]
link_d = np.linspace(5, 900, len(links))
ln_dbm = [
    watts_to_dbm(log_normal_rx_power(tx_w, ln, d, shadowing_draw_db(ln, 7, a, b)))
    for (a, b), d in zip(links, link_d)
]

fig, ax = plt.subplots(figsize=(8, 5))
ax.semilogx(distances, fs_dbm, label="free space (1/d$^2$)")
ax.semilogx(distances, trg_dbm, label="two-ray ground (1/d$^4$)")
ax.scatter(link_d, ln_dbm, s=12, color="tab:green", alpha=0.7,
           label="log-normal shadowing (n=2.7, $\\sigma$=4 dB)")
dc = crossover_distance(trg)
ax.axvline(dc, linestyle="dashed", color="gray")
ax.text(dc * 1.05, min(fs_dbm), f"crossover {dc:.0f} m", rotation=90, va="bottom")
ax.axhline(-85, linestyle="dotted", color="black", label="default sensitivity (-85 dBm)")
ax.set_xlabel("distance [m]")
ax.set_ylabel("received power [dBm]")
ax.set_title("Received power at 750 mW tx, 2.4 GHz")
ax.grid(True, which="both", alpha=0.3)
ax.legend()
fig.tight_layout()
fig.savefig("propagation.png", dpi=120)
print("wrote propagation.png")
print(f"two-ray/free-space crossover at {dc:.1f} m")
print(f"free-space range at -85 dBm sensitivity: "
      f"{math.sqrt(tx_w / 10 ** ((-85 - 30) / 10)) * fs.wavelength_m / (4 * math.pi):,.0f} m")
