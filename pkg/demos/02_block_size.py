# %% [markdown]
# # Effect of the block size
#
# The block size D sets how many consecutive excitation samples share one
# precision. D = 1 is the plain sparse prior. Larger blocks suit excitations
# whose energy arrives in short bursts. This script scores a handful of
# frames at every F0 for several D values.

# %%
import numpy as np

from vempz import SynthSpec, analyze, spectral_distortion, synth_frame
from vempz.experiment import run_seed

F0S = (200.0, 300.0, 400.0)
BLOCKS = (1, 2, 4, 5, 8)
RUNS = 5

# %%
print("F0    " + "".join(f"D={d:<7d}" for d in BLOCKS) + "lp2")
for f0 in F0S:
    scores = {d: [] for d in BLOCKS}
    lp = []
    for run in range(RUNS):
        sf = synth_frame(SynthSpec(f0=f0, seed=run_seed(42, f0, run)))
        for d in BLOCKS:
            res = analyze(sf.frame, "vem-pz", k=5, l=5, block_size=d)
            scores[d].append(spectral_distortion(sf.model_true, res.model))
        lp.append(spectral_distortion(sf.model_true, analyze(sf.frame, "lp2", k=10).model))
    cells = "".join(f"{np.mean(scores[d]):<9.2f}" for d in BLOCKS)
    print(f"{f0:<6.0f}{cells}{np.mean(lp):.2f}")

# %% [markdown]
# Each cell is a mean spectral distortion over RUNS frames; lower is better.
