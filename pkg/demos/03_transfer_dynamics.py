"""
Following the electron
======================

Start on dot A and integrate the Schroedinger equation through the pulse
sequence.  Near the optimal coupling the electron drops into the chain's
lowest standing wave while both dots sit above the band bottom, then lands
on dot B.  Away from the optimum some weight is left behind.
"""

# %%
import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt

from chainbus import SystemParams, run_transfer

# l = 19, l' = 30: eleven bonds apart
base = SystemParams(n_chain=48, attach_left=19, hop_endpoint=0.89, total_time=480.0)

fig, axes = plt.subplots(1, 3, figsize=(12, 3.5), sharey=True)
for ax, j0 in zip(axes, (0.8, 0.89, 1.0)):
    traj = run_transfer(base.replace(hop_endpoint=j0))
    pops = traj.populations
    print(f"J0 = {j0}: F = {traj.fidelity:.5f}, norm drift {traj.norm_drift:.1e}")
    ax.plot(traj.times, pops[:, 0], "r--", label="A")
    ax.plot(traj.times, pops[:, 1], "k:", label="chain")
    ax.plot(traj.times, pops[:, 2], "b-", label="B")
    ax.set_title(f"J0 = {j0} J")
    ax.set_xlabel("t J")
axes[0].set_ylabel("population")
axes[0].legend()
fig.tight_layout()
fig.savefig("transfer_dynamics.png", dpi=120)
