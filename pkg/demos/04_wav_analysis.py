# %% [markdown]
# # Frame-by-frame analysis of a WAV file
#
# Any mono 16-bit WAV can be analyzed. To keep the demo self-contained we
# write one from synthetic frames with a falling F0, read it back in 30 ms
# frames and fit each frame with K = L = 10, the order used for real speech.

# %%
import tempfile
from pathlib import Path

import numpy as np

from vempz import SynthSpec, analyze, synth_frame
from vempz.io import read_wav, response_table, write_csv, write_wav

tmp = Path(tempfile.mkdtemp())
y = np.concatenate([synth_frame(SynthSpec(f0=f0, seed=i)).y for i, f0 in enumerate((300.0, 260.0, 220.0, 200.0))])
wav = tmp / "nasal.wav"
write_wav(wav, 0.9 * y / np.max(np.abs(y)), 8000)

# %%
frames = list(read_wav(wav, frame_length=240, hop=240))
print(f"{len(frames)} frames from {wav.name}")
for i, frame in enumerate(frames):
    res = analyze(frame, "vem-pz", k=10, l=10, block_size=8)
    poles = res.model.poles()
    upper = sorted(p for p in poles if p.imag > 0 and abs(p) > 0.9)
    peaks = [f"{np.angle(p) * 4000 / np.pi:.0f}" for p in sorted(upper, key=np.angle)]
    print(f"frame {i}: {res.iterations:3d} sweeps, sharp poles at {', '.join(peaks)} Hz")

# %% [markdown]
# The model response and the frame periodogram on 512 frequencies, written as
# CSV for any plotting tool.

# %%
table = response_table(res.model, frames[-1])
out = tmp / "response.csv"
write_csv(out, ("freq_hz", "model_db", "periodogram_db"),
          ([f"{v:.4f}" for v in row] for row in zip(*table.values())))
print("wrote", out)
